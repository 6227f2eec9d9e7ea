//! Exhaustive, exact search for isometric embeddings of a negative
//! definite Gram lattice into the standard diagonal negative lattice of
//! equal rank, subject to the odd-index constraint.
//!
//! The search assigns integer coordinate rows vector by vector, in the
//! basis order of the Gram matrix. Two regimes:
//!
//! - when the sum of all Gram entries equals −rank, every odd-index
//!   embedding can be axis-sign-normalized so that the coordinate columns
//!   each sum to −1 (the Wu element is characteristic with square −N, so
//!   its coordinates are all ±1). The search then imposes the column-sum
//!   condition, and, when the Gram additionally has circular shape, the
//!   per-coordinate range {−2,…,1};
//! - otherwise coordinates range over ±⌊√norm⌋ and the first use of every
//!   fresh axis is forced positive, since axis sign flips are then free
//!   symmetries.
//!
//! In both regimes axes are introduced in first-use order, so the first
//! certificate found is the least one under the value order, independent
//! of any scheduling.

use crate::lattice::{determinant_rows, is_negative_definite, GramLattice};
use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

/// A vector of the diagonal lattice; the pairing of u and v is −Σuᵢvᵢ.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct DiagonalVector(pub Vec<i64>);

impl DiagonalVector {
    pub fn pairing(&self, other: &DiagonalVector) -> i64 {
        -self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a * b)
            .sum::<i64>()
    }

    pub fn norm(&self) -> i64 {
        self.pairing(self)
    }

    pub fn add(&self, other: &DiagonalVector) -> DiagonalVector {
        DiagonalVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, c: i64) -> DiagonalVector {
        DiagonalVector(self.0.iter().map(|a| a * c).collect())
    }

    pub fn basis(rank: usize, axis: usize) -> DiagonalVector {
        let mut coords = vec![0; rank];
        coords[axis] = 1;
        DiagonalVector(coords)
    }
}

/// Deterministic counters of the search, serialized with certificates.
/// Wall time is deliberately absent: serialized output is byte-identical
/// across runs.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub pruned: u64,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct EmbeddingCertificate {
    pub vectors: Vec<DiagonalVector>,
    pub gram_target: GramLattice,
    /// |det| of the coordinate matrix; odd by construction.
    pub index: u64,
    pub wu: DiagonalVector,
    pub stats: SearchStats,
}

/// Search outcome; running out of budget is never conflated with a
/// completed negative search.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EmbeddingSearch {
    Found(Box<EmbeddingCertificate>),
    /// The space was exhausted: no odd-index embedding exists.
    None { stats: SearchStats },
    BudgetExceeded { stats: SearchStats },
}

impl EmbeddingSearch {
    pub fn found(&self) -> Option<&EmbeddingCertificate> {
        match self {
            EmbeddingSearch::Found(cert) => Some(cert),
            _ => None,
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, EmbeddingSearch::None { .. })
    }
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum EmbedError {
    #[error("embedding target must be negative definite")]
    NotNegativeDefinite,
}

/// |det| of the coordinate matrix of a square system, or `NotFullRank`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum IndexResult {
    Index(BigInt),
    NotFullRank,
}

pub fn odd_index(vectors: &[DiagonalVector]) -> IndexResult {
    let rows: Vec<Vec<i64>> = vectors.iter().map(|v| v.0.clone()).collect();
    assert!(rows.iter().all(|r| r.len() == rows.len()), "square system expected");
    let det = determinant_rows(&rows);
    if det.is_zero() {
        IndexResult::NotFullRank
    } else {
        IndexResult::Index(det.magnitude().clone().into())
    }
}

/// Re-checks everything a certificate claims: pairings against the target
/// Gram, the odd index, and the Wu sum.
pub fn verify_certificate(cert: &EmbeddingCertificate) -> bool {
    let n = cert.gram_target.rank();
    if cert.vectors.len() != n {
        return false;
    }
    for i in 0..n {
        for j in 0..n {
            if cert.vectors[i].pairing(&cert.vectors[j]) != cert.gram_target.gram[i][j] {
                return false;
            }
        }
    }
    if n == 0 {
        return cert.index == 1 && cert.wu.0.is_empty();
    }
    match odd_index(&cert.vectors) {
        IndexResult::Index(det) => {
            if det != BigInt::from(cert.index) || (&det % 2) == BigInt::zero() {
                return false;
            }
        }
        IndexResult::NotFullRank => return false,
    }
    let mut wu = DiagonalVector(vec![0; n]);
    for v in &cert.vectors {
        wu = wu.add(v);
    }
    wu == cert.wu
}

/// The Gram matrix of a circular subset in the sense used by the
/// coefficient bounds: off-diagonal pairings in {−1,0,1} with exactly two
/// non-zero pairings per row, and components of size at least 3.
fn gram_is_circular(gram: &[Vec<i64>]) -> bool {
    let n = gram.len();
    if n == 0 {
        return false;
    }
    for i in 0..n {
        let mut neighbours = 0;
        for j in 0..n {
            if i == j {
                continue;
            }
            match gram[i][j] {
                0 => {}
                -1 | 1 => neighbours += 1,
                _ => return false,
            }
        }
        if neighbours != 2 {
            return false;
        }
    }
    // Two neighbours per vertex and no small components: check component
    // sizes via union-find over non-zero pairings.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if gram[i][j] != 0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut sizes = vec![0usize; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        sizes[root] += 1;
    }
    sizes.iter().all(|&s| s == 0 || s >= 3)
}

fn isqrt(v: i64) -> i64 {
    let mut r = 0i64;
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r
}

struct Search<'a> {
    gram: &'a [Vec<i64>],
    n: usize,
    adapted: bool,
    /// Per-coordinate hard bounds; {−2,…,1} in the adapted circular
    /// regime, ±max⌊√norm⌋ otherwise.
    coord_lo: i64,
    coord_hi: i64,
    budget: u64,
    stats: SearchStats,
    rows: Vec<Vec<i64>>,
    col_sums: Vec<i64>,
    solution: Option<Vec<Vec<i64>>>,
}

enum Step {
    Found,
    NotHere,
    Budget,
}

impl<'a> Search<'a> {
    fn run(&mut self) -> Step {
        self.place_vector(0, 0)
    }

    fn place_vector(&mut self, i: usize, used_axes: usize) -> Step {
        if i == self.n {
            return self.accept();
        }
        let norm = -self.gram[i][i];
        let mut row = vec![0i64; self.n];
        let target_dots: Vec<i64> = (0..i).map(|j| -self.gram[i][j]).collect();
        self.fill_coord(i, 0, used_axes, norm, &mut row, &target_dots)
    }

    /// Depth-first fill of coordinates for vector i, axis by axis.
    /// `used_axes` counts the axes already introduced; fresh axes must be
    /// taken in increasing order.
    fn fill_coord(
        &mut self,
        i: usize,
        axis: usize,
        used_axes: usize,
        remaining_norm: i64,
        row: &mut Vec<i64>,
        target_dots: &[i64],
    ) -> Step {
        if axis == self.n {
            if remaining_norm != 0 {
                self.stats.pruned += 1;
                return Step::NotHere;
            }
            for (j, &want) in target_dots.iter().enumerate() {
                let dot: i64 = (0..self.n).map(|a| row[a] * self.rows[j][a]).sum();
                if dot != want {
                    self.stats.pruned += 1;
                    return Step::NotHere;
                }
            }
            self.rows.push(row.clone());
            for a in 0..self.n {
                self.col_sums[a] += row[a];
            }
            let step = self.place_vector(i + 1, used_axes);
            if !matches!(step, Step::Found) {
                let row = self.rows.pop().unwrap();
                for a in 0..self.n {
                    self.col_sums[a] -= row[a];
                }
            }
            return step;
        }
        self.stats.nodes += 1;
        if self.stats.nodes >= self.budget {
            return Step::Budget;
        }

        let root = isqrt(remaining_norm);
        let lo = self.coord_lo.max(-root);
        let hi = self.coord_hi.min(root);
        for value in lo..=hi {
            // Fresh axes are introduced in order; without the column-sum
            // normalization, sign flips are free and the first use of a
            // fresh axis is forced non-negative.
            if value != 0 {
                if axis > used_axes {
                    continue;
                }
                if axis == used_axes && !self.adapted && value < 0 {
                    continue;
                }
            }
            row[axis] = value;
            let next_used = if value != 0 && axis == used_axes {
                used_axes + 1
            } else {
                used_axes
            };
            let next_norm = remaining_norm - value * value;
            if self.feasible(i, axis, next_norm, row, target_dots) {
                match self.fill_coord(i, axis + 1, next_used, next_norm, row, target_dots) {
                    Step::NotHere => {}
                    other => return other,
                }
            } else {
                self.stats.pruned += 1;
            }
            row[axis] = 0;
        }
        Step::NotHere
    }

    /// Partial-assignment feasibility: dot-product slack against every
    /// placed vector plus column-sum bounds in the adapted regime.
    fn feasible(
        &self,
        i: usize,
        axis: usize,
        remaining_norm: i64,
        row: &[i64],
        target_dots: &[i64],
    ) -> bool {
        let max_abs = self
            .coord_lo
            .abs()
            .max(self.coord_hi.abs())
            .min(isqrt(remaining_norm));
        for (j, &want) in target_dots.iter().enumerate() {
            let partial: i64 = (0..=axis).map(|a| row[a] * self.rows[j][a]).sum();
            let slack: i64 = (axis + 1..self.n)
                .map(|a| self.rows[j][a].abs() * max_abs)
                .sum();
            if (partial - want).abs() > slack {
                return false;
            }
        }
        if self.adapted {
            let remaining_vectors = (self.n - i - 1) as i64;
            for a in 0..self.n {
                let (fixed, pending_here) = if a <= axis {
                    (self.col_sums[a] + row[a], 0)
                } else {
                    (self.col_sums[a], 1)
                };
                let slots = remaining_vectors + pending_here;
                let lo_total = fixed + slots * self.coord_lo;
                let hi_total = fixed + slots * self.coord_hi;
                if !(lo_total..=hi_total).contains(&-1) {
                    return false;
                }
            }
        }
        true
    }

    fn accept(&mut self) -> Step {
        if self.adapted && self.col_sums.iter().any(|&s| s != -1) {
            self.stats.pruned += 1;
            return Step::NotHere;
        }
        let det = determinant_rows(&self.rows);
        if det.is_zero() || (&det % 2) == BigInt::zero() {
            self.stats.pruned += 1;
            return Step::NotHere;
        }
        self.solution = Some(self.rows.clone());
        Step::Found
    }
}

/// Searches for an odd-index isometric embedding of the lattice into the
/// diagonal negative lattice of equal rank.
pub fn find_embedding(lattice: &GramLattice, budget: u64) -> Result<EmbeddingSearch, EmbedError> {
    if !is_negative_definite(lattice) {
        return Err(EmbedError::NotNegativeDefinite);
    }
    let n = lattice.rank();
    if n == 0 {
        return Ok(EmbeddingSearch::Found(Box::new(EmbeddingCertificate {
            vectors: Vec::new(),
            gram_target: lattice.clone(),
            index: 1,
            wu: DiagonalVector(Vec::new()),
            stats: SearchStats::default(),
        })));
    }
    let wu: i64 = lattice.gram.iter().flatten().sum();
    let adapted = wu == -(n as i64);
    let circular = gram_is_circular(&lattice.gram);
    let max_root = (0..n).map(|i| isqrt(-lattice.gram[i][i])).max().unwrap_or(0);
    let (coord_lo, coord_hi) = if adapted && circular {
        (-2, 1)
    } else {
        (-max_root, max_root)
    };
    let mut search = Search {
        gram: &lattice.gram,
        n,
        adapted,
        coord_lo,
        coord_hi,
        budget,
        stats: SearchStats::default(),
        rows: Vec::with_capacity(n),
        col_sums: vec![0; n],
        solution: None,
    };
    let step = search.run();
    let stats = search.stats;
    if matches!(step, Step::Budget) {
        return Ok(EmbeddingSearch::BudgetExceeded { stats });
    }
    match search.solution {
        Some(rows) => {
            let vectors: Vec<DiagonalVector> = rows.into_iter().map(DiagonalVector).collect();
            let index = match odd_index(&vectors) {
                IndexResult::Index(det) => {
                    let (_, digits) = det.to_u64_digits();
                    debug_assert!(digits.len() <= 1);
                    digits.first().copied().unwrap_or(0)
                }
                IndexResult::NotFullRank => unreachable!("accepted solutions are full rank"),
            };
            let mut wu = DiagonalVector(vec![0; n]);
            for v in &vectors {
                wu = wu.add(v);
            }
            let cert = EmbeddingCertificate {
                vectors,
                gram_target: lattice.clone(),
                index,
                wu,
                stats,
            };
            debug_assert!(verify_certificate(&cert));
            Ok(EmbeddingSearch::Found(Box::new(cert)))
        }
        None => Ok(EmbeddingSearch::None { stats }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{gamma_gram, GammaSpec};

    fn gram(rows: Vec<Vec<i64>>) -> GramLattice {
        GramLattice::from_rows(rows).unwrap()
    }

    #[test]
    fn three_vector_example() {
        let target = gram(vec![vec![-2, 1, 1], vec![1, -2, 1], vec![1, 1, -5]]);
        let result = find_embedding(&target, 1_000_000).unwrap();
        let cert = result.found().expect("embedding exists");
        assert_eq!(cert.index, 3);
        assert_eq!(
            cert.vectors,
            vec![
                DiagonalVector(vec![1, -1, 0]),
                DiagonalVector(vec![-1, 0, 1]),
                DiagonalVector(vec![-1, 0, -2]),
            ]
        );
        assert!(verify_certificate(cert));
    }

    #[test]
    fn slice_example_embeds() {
        let spec = GammaSpec::new(1, vec![3], vec![7], 1).unwrap();
        let result = find_embedding(&gamma_gram(&spec), 10_000_000).unwrap();
        let cert = result.found().expect("slice closure must embed");
        assert!(verify_certificate(cert));
        assert_eq!(cert.index % 2, 1);
    }

    #[test]
    fn obstructed_example_fails() {
        let spec = GammaSpec::new(0, vec![1, 3], vec![2, 2], 1).unwrap();
        let result = find_embedding(&gamma_gram(&spec), 10_000_000).unwrap();
        assert!(result.is_none(), "no odd-index embedding at rank 4");
    }

    #[test]
    fn verify_rejects_sign_flip() {
        let target = gram(vec![vec![-2, 1, 1], vec![1, -2, 1], vec![1, 1, -5]]);
        let result = find_embedding(&target, 1_000_000).unwrap();
        let mut cert = result.found().unwrap().clone();
        cert.vectors[2].0[2] = -cert.vectors[2].0[2];
        assert!(!verify_certificate(&cert));
    }

    #[test]
    fn empty_certificate_verifies() {
        let cert = EmbeddingCertificate {
            vectors: Vec::new(),
            gram_target: gram(Vec::new()),
            index: 1,
            wu: DiagonalVector(Vec::new()),
            stats: SearchStats::default(),
        };
        assert!(verify_certificate(&cert));
    }

    #[test]
    fn odd_index_examples() {
        let triple = vec![
            DiagonalVector(vec![1, -1, 0]),
            DiagonalVector(vec![-1, 0, 1]),
            DiagonalVector(vec![-1, 0, -2]),
        ];
        assert_eq!(odd_index(&triple), IndexResult::Index(BigInt::from(3)));
        let unimodular = vec![
            DiagonalVector(vec![-1, 0, 0]),
            DiagonalVector(vec![0, -1, 0]),
            DiagonalVector(vec![0, 0, -1]),
        ];
        assert_eq!(odd_index(&unimodular), IndexResult::Index(BigInt::from(1)));
        let dependent = vec![
            DiagonalVector(vec![1, -1, 0]),
            DiagonalVector(vec![-1, 1, 0]),
            DiagonalVector(vec![0, 0, 1]),
        ];
        assert_eq!(odd_index(&dependent), IndexResult::NotFullRank);
    }

    #[test]
    fn figure_eight_lattice_has_no_embedding() {
        // Norm-3 vectors do not exist in the rank-2 diagonal lattice.
        let spec = GammaSpec::new(0, vec![1, 1], vec![1, 1], 1).unwrap();
        let result = find_embedding(&gamma_gram(&spec), 1_000_000).unwrap();
        assert!(result.is_none());
    }
}
