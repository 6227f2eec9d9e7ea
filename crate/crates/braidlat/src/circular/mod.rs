//! Circular subsets of the diagonal negative lattice: recognition,
//! adapted bases, coefficient profiles, and the reduction pipelines that
//! re-derive the structure theorems on concrete vector sets. Every lemma
//! hypothesis is checked before use and every proof-step invariant is
//! asserted during reduction; a failure identifies the broken step
//! instead of being silently tolerated.

mod reduce;

pub use reduce::{
    reduce_positive_injective, reduce_positive_noninjective, reduce_semipositive,
    ComponentReduction, InjectiveReduction, MoveRecord, NoninjectiveReduction,
    SemipositiveReduction, TerminalStructure,
};

use crate::embed::DiagonalVector;
use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

/// A finite set of vectors in a common diagonal lattice of rank N.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct VectorSet {
    pub vectors: Vec<DiagonalVector>,
    pub rank: usize,
}

impl VectorSet {
    pub fn new(vectors: Vec<DiagonalVector>, rank: usize) -> Self {
        assert!(vectors.iter().all(|v| v.0.len() == rank));
        VectorSet { vectors, rank }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn pairing(&self, i: usize, j: usize) -> i64 {
        self.vectors[i].pairing(&self.vectors[j])
    }

    pub fn wu(&self) -> DiagonalVector {
        let mut wu = DiagonalVector(vec![0; self.rank]);
        for v in &self.vectors {
            wu = wu.add(v);
        }
        wu
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// Exactly one pair with pairing −1 in each connected component.
    Semipositive,
    /// All pairings of distinct vectors non-negative.
    Positive,
    Neither,
}

/// What [`classify_set`] reports: circularity, the connected components
/// of the hit relation, the flavor, and the Wu element with its norm.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct CircularityReport {
    pub is_circular: bool,
    pub components: Vec<Vec<usize>>,
    pub flavor: Flavor,
    pub wu: DiagonalVector,
    pub wu_norm: i64,
}

/// Exact pairwise classification of a vector set.
pub fn classify_set(vs: &VectorSet) -> CircularityReport {
    let n = vs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut circular = true;
    let mut any_negative_pair = false;
    for i in 0..n {
        let mut neighbours = 0;
        for j in 0..n {
            if i == j {
                continue;
            }
            let p = vs.pairing(i, j);
            if p != 0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
            match p {
                0 => {}
                -1 | 1 => neighbours += 1,
                _ => circular = false,
            }
            if p < 0 {
                any_negative_pair = true;
            }
        }
        if neighbours != 2 {
            circular = false;
        }
    }
    let mut comp_map: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let root = find(&mut parent, i);
        comp_map.entry(root).or_default().push(i);
    }
    let components: Vec<Vec<usize>> = comp_map.into_values().collect();
    if circular {
        circular = components.iter().all(|c| c.len() >= 3);
    }
    let flavor = if !circular {
        Flavor::Neither
    } else if !any_negative_pair {
        Flavor::Positive
    } else {
        // Exactly one −1 pair per component makes the set semipositive.
        let mut ok = true;
        for comp in &components {
            let mut negative_pairs = 0;
            for (a, &i) in comp.iter().enumerate() {
                for &j in &comp[a + 1..] {
                    if vs.pairing(i, j) == -1 {
                        negative_pairs += 1;
                    }
                }
            }
            if negative_pairs != 1 {
                ok = false;
            }
        }
        if ok {
            Flavor::Semipositive
        } else {
            Flavor::Neither
        }
    };
    let wu = vs.wu();
    let wu_norm = wu.pairing(&wu);
    CircularityReport {
        is_circular: circular,
        components,
        flavor,
        wu,
        wu_norm,
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PipelineError {
    #[error("precondition failed: {name}: {detail}")]
    Precondition { name: &'static str, detail: String },
    #[error("proof-step invariant broke at {step}: {detail}")]
    StepInvariant { step: &'static str, detail: String },
}

pub(crate) fn precondition(name: &'static str, detail: impl Into<String>) -> PipelineError {
    PipelineError::Precondition {
        name,
        detail: detail.into(),
    }
}

pub(crate) fn step_invariant(step: &'static str, detail: impl Into<String>) -> PipelineError {
    PipelineError::StepInvariant {
        step,
        detail: detail.into(),
    }
}

/// Per-axis signs ε with Σv = −Σ εₐeₐ.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct AdaptedBasis {
    pub signs: Vec<i8>,
}

fn rank_over_q(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let cols = if m.is_empty() { 0 } else { m[0].len() };
    let mut rank = 0;
    for col in 0..cols {
        let pivot_row = (rank..m.len()).find(|&r| !m[r][col].is_zero());
        let Some(pr) = pivot_row else { continue };
        m.swap(rank, pr);
        let pivot = m[rank][col].clone();
        for r in rank + 1..m.len() {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for c in col..cols {
                let val = &m[r][c] * &pivot - &factor * &m[rank][c];
                m[r][c] = val;
            }
        }
        rank += 1;
    }
    rank
}

fn rank_over_f2(rows: &[Vec<i64>]) -> usize {
    let mut bits: Vec<u128> = rows
        .iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .fold(0u128, |acc, (i, &v)| acc | (((v & 1) as u128) << i))
        })
        .collect();
    let mut rank = 0;
    let cols = rows.first().map_or(0, |r| r.len());
    assert!(cols <= 128, "rank computation supports at most 128 axes");
    for col in 0..cols {
        let mask = 1u128 << col;
        let Some(pr) = (rank..bits.len()).find(|&r| bits[r] & mask != 0) else {
            continue;
        };
        bits.swap(rank, pr);
        for r in 0..bits.len() {
            if r != rank && bits[r] & mask != 0 {
                bits[r] ^= bits[rank];
            }
        }
        rank += 1;
    }
    rank
}

/// The span has full rank over ℚ (finite index) and over 𝔽₂ (odd index).
pub(crate) fn has_finite_odd_index(vs: &VectorSet) -> bool {
    let rows: Vec<Vec<i64>> = vs.vectors.iter().map(|v| v.0.clone()).collect();
    rank_over_q(&rows) == vs.rank && rank_over_f2(&rows) == vs.rank
}

/// Finds per-axis signs making the canonical basis adapted to the set.
/// The preconditions — circularity, finite odd index, Wu norm −N — are
/// checked and reported individually.
pub fn adapted_basis(vs: &VectorSet) -> Result<AdaptedBasis, PipelineError> {
    let report = classify_set(vs);
    if !report.is_circular {
        return Err(precondition("circular", "the set is not circular"));
    }
    if !has_finite_odd_index(vs) {
        return Err(precondition(
            "odd-index",
            "the span does not have finite odd index",
        ));
    }
    if report.wu_norm != -(vs.rank as i64) {
        return Err(precondition(
            "wu-norm",
            format!("wu norm {} differs from -{}", report.wu_norm, vs.rank),
        ));
    }
    let mut signs = Vec::with_capacity(vs.rank);
    for a in 0..vs.rank {
        match report.wu.0[a] {
            1 => signs.push(-1),
            -1 => signs.push(1),
            other => {
                return Err(precondition(
                    "wu-coordinates",
                    format!("wu coordinate {other} on axis {a} is not ±1"),
                ));
            }
        }
    }
    Ok(AdaptedBasis { signs })
}

/// The table of pairings against an adapted basis, the subset 𝒲, the map
/// v ↦ e_v on it and whether that map is injective.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct CoefficientProfile {
    /// `table[v][a]` = pairing of vector v with the adapted basis vector
    /// on axis a; always in {−1,0,1,2}.
    pub table: Vec<Vec<i64>>,
    /// Indices of vectors v with W·v = v·v + 2.
    pub w_subset: Vec<usize>,
    /// For v in the subset, the unique axis with pairing in {−1,2}.
    pub assignment: Vec<(usize, usize)>,
    pub injective: bool,
}

/// Computes all pairings v·e and asserts the coefficient dichotomy:
/// Σₑ (v·e)(v·e − 1) equals 2 exactly on the subset 𝒲 and 0 elsewhere.
pub fn coefficient_profile(
    vs: &VectorSet,
    basis: &AdaptedBasis,
) -> Result<CoefficientProfile, PipelineError> {
    let wu = vs.wu();
    let mut table = Vec::with_capacity(vs.len());
    let mut w_subset = Vec::new();
    let mut assignment = Vec::new();
    for (vi, v) in vs.vectors.iter().enumerate() {
        let row: Vec<i64> = (0..vs.rank)
            .map(|a| -(basis.signs[a] as i64) * v.0[a])
            .collect();
        if let Some(&bad) = row.iter().find(|&&c| !(-1..=2).contains(&c)) {
            return Err(step_invariant(
                "coefficient-bounds",
                format!("vector {vi} pairs to {bad} with a basis vector"),
            ));
        }
        let dichotomy: i64 = row.iter().map(|&c| c * (c - 1)).sum();
        let in_w = wu.pairing(v) == v.norm() + 2;
        let expected = if in_w { 2 } else { 0 };
        if dichotomy != expected {
            return Err(step_invariant(
                "coefficient-dichotomy",
                format!("vector {vi}: sum v·e(v·e-1) = {dichotomy}, expected {expected}"),
            ));
        }
        if in_w {
            let hits: Vec<usize> = (0..vs.rank)
                .filter(|&a| row[a] == -1 || row[a] == 2)
                .collect();
            if hits.len() != 1 {
                return Err(step_invariant(
                    "unique-assigned-axis",
                    format!("vector {vi} has {} axes with pairing in {{-1,2}}", hits.len()),
                ));
            }
            w_subset.push(vi);
            assignment.push((vi, hits[0]));
        }
        table.push(row);
    }
    let mut images: Vec<usize> = assignment.iter().map(|&(_, a)| a).collect();
    images.sort_unstable();
    let distinct = images.windows(2).all(|w| w[0] != w[1]);
    Ok(CoefficientProfile {
        table,
        w_subset,
        assignment,
        injective: distinct,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triple() -> VectorSet {
        VectorSet::new(
            vec![
                DiagonalVector(vec![1, -1, 0]),
                DiagonalVector(vec![-1, 0, 1]),
                DiagonalVector(vec![-1, 0, -2]),
            ],
            3,
        )
    }

    #[test]
    fn triple_is_positive_circular() {
        let report = classify_set(&triple());
        assert!(report.is_circular);
        assert_eq!(report.flavor, Flavor::Positive);
        assert_eq!(report.components, vec![vec![0, 1, 2]]);
        assert_eq!(report.wu_norm, -3);
    }

    #[test]
    fn two_orthogonal_vectors_are_not_circular() {
        let vs = VectorSet::new(
            vec![
                DiagonalVector(vec![1, 0]),
                DiagonalVector(vec![0, 1]),
            ],
            2,
        );
        let report = classify_set(&vs);
        assert!(!report.is_circular);
        assert_eq!(report.flavor, Flavor::Neither);
    }

    #[test]
    fn adapted_basis_all_positive_for_triple() {
        let basis = adapted_basis(&triple()).unwrap();
        assert_eq!(basis.signs, vec![1, 1, 1]);
    }

    #[test]
    fn adapted_basis_tracks_axis_negation() {
        let mut vs = triple();
        for v in &mut vs.vectors {
            v.0[1] = -v.0[1];
        }
        let basis = adapted_basis(&vs).unwrap();
        assert_eq!(basis.signs, vec![1, -1, 1]);
    }

    #[test]
    fn adapted_basis_rejects_wrong_wu_norm() {
        let vs = VectorSet::new(
            vec![
                DiagonalVector(vec![1, -1, 0, 0]),
                DiagonalVector(vec![0, 1, -1, 0]),
                DiagonalVector(vec![0, 0, 1, -1]),
            ],
            4,
        );
        assert!(matches!(
            adapted_basis(&vs),
            Err(PipelineError::Precondition { .. })
        ));
    }

    #[test]
    fn profile_of_triple() {
        let vs = triple();
        let basis = adapted_basis(&vs).unwrap();
        let profile = coefficient_profile(&vs, &basis).unwrap();
        // Positive case: the subset is the whole set and the map repeats
        // the first axis, so it is not injective.
        assert_eq!(profile.w_subset, vec![0, 1, 2]);
        assert!(!profile.injective);
    }
}
