//! The weighted cycle-graph lattice: Gram matrix construction, exact
//! negative-definiteness and determinant tests by fraction-free (Bareiss)
//! elimination over arbitrary-precision integers, the Wu-element norm
//! identity and the signature formula for alternating normal forms.
//!
//! No floating point appears anywhere in this module.

use crate::calculus::weight_string;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

/// Parameters of the weighted cycle graph: d ∈ {0,1}, vertex weights
/// −xᵢ−2 separated by runs of yᵢ−1 weights −2, and k orthogonal copies.
/// Each copy has n = Σyᵢ vertices and the construction requires n ≥ 2.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct GammaSpec {
    pub d: u8,
    pub x: Vec<u64>,
    pub y: Vec<u64>,
    pub k: usize,
}

impl GammaSpec {
    pub fn new(d: u8, x: Vec<u64>, y: Vec<u64>, k: usize) -> Result<Self, LatticeError> {
        if d > 1 {
            return Err(LatticeError::InvalidSpec("d must be 0 or 1".into()));
        }
        if x.is_empty() || x.len() != y.len() {
            return Err(LatticeError::InvalidSpec(
                "x and y must be non-empty and of equal length".into(),
            ));
        }
        if x.iter().chain(y.iter()).any(|&v| v == 0) {
            return Err(LatticeError::InvalidSpec("labels must be positive".into()));
        }
        if k == 0 {
            return Err(LatticeError::InvalidSpec("k must be at least 1".into()));
        }
        let spec = GammaSpec { d, x, y, k };
        if spec.vertices_per_copy() < 2 {
            return Err(LatticeError::SumYTooSmall {
                sum_y: spec.vertices_per_copy() as u64,
            });
        }
        Ok(spec)
    }

    pub fn t(&self) -> usize {
        self.x.len()
    }

    pub fn vertices_per_copy(&self) -> usize {
        self.y.iter().sum::<u64>() as usize
    }

    pub fn rank(&self) -> usize {
        self.k * self.vertices_per_copy()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("the cycle graph needs at least two vertices per copy, got {sum_y}")]
    SumYTooSmall { sum_y: u64 },
    #[error("matrix is not symmetric at ({row},{col})")]
    NotSymmetric { row: usize, col: usize },
}

/// A symmetric integer Gram matrix, optionally remembering the cycle-graph
/// spec it was built from.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct GramLattice {
    pub gram: Vec<Vec<i64>>,
    pub spec: Option<GammaSpec>,
}

impl GramLattice {
    pub fn from_rows(gram: Vec<Vec<i64>>) -> Result<Self, LatticeError> {
        let n = gram.len();
        for (i, row) in gram.iter().enumerate() {
            if row.len() != n {
                return Err(LatticeError::NotSymmetric { row: i, col: row.len() });
            }
            for j in 0..n {
                if gram[i][j] != gram[j][i] {
                    return Err(LatticeError::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(GramLattice { gram, spec: None })
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }
}

/// Builds the Gram matrix of k orthogonal copies of the weighted cycle
/// graph. Within a copy, consecutive vertices pair to 1 and the closing
/// pair to (−1)^d; with only two vertices the two parallel edges
/// accumulate to 1 + (−1)^d.
pub fn gamma_gram(spec: &GammaSpec) -> GramLattice {
    let n = spec.vertices_per_copy();
    let weights = weight_string(&spec.x, &spec.y).0;
    debug_assert_eq!(weights.len(), n);
    let closing: i64 = if spec.d == 0 { 1 } else { -1 };
    let rank = spec.rank();
    let mut gram = vec![vec![0i64; rank]; rank];
    for copy in 0..spec.k {
        let base = copy * n;
        for i in 0..n {
            gram[base + i][base + i] = weights[i];
        }
        if n == 2 {
            gram[base][base + 1] = 1 + closing;
            gram[base + 1][base] = 1 + closing;
        } else {
            for i in 0..n - 1 {
                gram[base + i][base + i + 1] = 1;
                gram[base + i + 1][base + i] = 1;
            }
            gram[base][base + n - 1] = closing;
            gram[base + n - 1][base] = closing;
        }
    }
    GramLattice {
        gram,
        spec: Some(spec.clone()),
    }
}

fn to_bigint_matrix(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    m.iter()
        .map(|row| row.iter().map(|&v| BigInt::from(v)).collect())
        .collect()
}

/// Fraction-free elimination without pivoting. Returns the sequence of
/// leading principal minors d₁,…,d_n, stopping early (with a trailing
/// zero) if a zero pivot blocks the elimination.
fn bareiss_leading_minors(matrix: &[Vec<i64>]) -> Vec<BigInt> {
    let n = matrix.len();
    let mut m = to_bigint_matrix(matrix);
    let mut minors = Vec::with_capacity(n);
    let mut prev = BigInt::from(1);
    for k in 0..n {
        let pivot = m[k][k].clone();
        minors.push(pivot.clone());
        if pivot.is_zero() {
            return minors;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &pivot - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev;
            }
        }
        prev = pivot;
    }
    minors
}

/// Exact test: all leading principal minors of −G positive.
pub fn is_negative_definite(lattice: &GramLattice) -> bool {
    let n = lattice.rank();
    if n == 0 {
        return true;
    }
    let negated: Vec<Vec<i64>> = lattice
        .gram
        .iter()
        .map(|row| row.iter().map(|&v| -v).collect())
        .collect();
    let minors = bareiss_leading_minors(&negated);
    minors.len() == n && minors.iter().all(|d| d.is_positive())
}

/// Exact integer determinant by Bareiss elimination with row pivoting.
pub fn determinant(lattice: &GramLattice) -> BigInt {
    determinant_rows(&lattice.gram)
}

pub(crate) fn determinant_rows(rows: &[Vec<i64>]) -> BigInt {
    let n = rows.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut m = to_bigint_matrix(rows);
    let mut prev = BigInt::from(1);
    let mut sign = 1i8;
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        let pivot = m[k][k].clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &pivot - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = pivot;
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// W·W for W the sum of the basis vectors: the sum of all Gram entries.
pub fn wu_norm(lattice: &GramLattice) -> i64 {
    lattice.gram.iter().flatten().sum()
}

/// σ(K) = 2d − e(β) with e(β) = 6d + Σxᵢ − Σyᵢ. Accepts any alternating
/// form data, not only the finite-order shape with Σ(xᵢ−yᵢ) = −4d.
pub fn signature_erle(d: i64, x: &[u64], y: &[u64]) -> i64 {
    let sum_x: i64 = x.iter().map(|&v| v as i64).sum();
    let sum_y: i64 = y.iter().map(|&v| v as i64).sum();
    let e = 6 * d + sum_x - sum_y;
    2 * d - e
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(d: u8, x: &[u64], y: &[u64], k: usize) -> GammaSpec {
        GammaSpec::new(d, x.to_vec(), y.to_vec(), k).unwrap()
    }

    #[test]
    fn square_knot_gram() {
        let g = gamma_gram(&spec(0, &[3], &[3], 1));
        assert_eq!(
            g.gram,
            vec![vec![-5, 1, 1], vec![1, -2, 1], vec![1, 1, -2]]
        );
    }

    #[test]
    fn figure_eight_gram_accumulates_parallel_edges() {
        let g = gamma_gram(&spec(0, &[1, 1], &[1, 1], 1));
        assert_eq!(g.gram, vec![vec![-3, 2], vec![2, -3]]);
        assert_eq!(determinant(&g), BigInt::from(5));
    }

    #[test]
    fn d1_gram_closing_edge() {
        let g = gamma_gram(&spec(1, &[3], &[7], 1));
        assert_eq!(g.rank(), 7);
        let diag: Vec<i64> = (0..7).map(|i| g.gram[i][i]).collect();
        assert_eq!(diag, vec![-5, -2, -2, -2, -2, -2, -2]);
        assert_eq!(g.gram[0][6], -1);
        assert_eq!(g.gram[0][1], 1);
    }

    #[test]
    fn rejects_single_vertex() {
        assert!(matches!(
            GammaSpec::new(0, vec![1], vec![1], 1),
            Err(LatticeError::SumYTooSmall { .. })
        ));
    }

    #[test]
    fn definiteness_examples() {
        assert!(is_negative_definite(&gamma_gram(&spec(0, &[3], &[3], 1))));
        let degenerate = GramLattice::from_rows(vec![vec![-2, 2], vec![2, -2]]).unwrap();
        assert!(!is_negative_definite(&degenerate));
        let positive = GramLattice::from_rows(vec![vec![1]]).unwrap();
        assert!(!is_negative_definite(&positive));
    }

    #[test]
    fn determinant_examples() {
        let square = gamma_gram(&spec(0, &[3], &[3], 1));
        assert_eq!(determinant(&square), BigInt::from(-9));
        let doubled = gamma_gram(&spec(0, &[3], &[3], 2));
        assert_eq!(determinant(&doubled), BigInt::from(81));
    }

    #[test]
    fn wu_norm_examples() {
        assert_eq!(wu_norm(&gamma_gram(&spec(1, &[3], &[7], 1))), -7);
        assert_eq!(wu_norm(&gamma_gram(&spec(0, &[3], &[3], 1))), -3);
        assert_eq!(wu_norm(&gamma_gram(&spec(0, &[3], &[3], 3))), -9);
    }

    #[test]
    fn signature_examples() {
        assert_eq!(signature_erle(1, &[3], &[7]), 0);
        assert_eq!(signature_erle(0, &[1, 1], &[1, 1]), 0);
        assert_eq!(signature_erle(0, &[5], &[3]), -2);
    }

    #[test]
    fn determinant_with_zero_leading_pivot() {
        let m = GramLattice::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(determinant(&m), BigInt::from(-1));
        let z = GramLattice::from_rows(vec![vec![0, 0], vec![0, 5]]).unwrap();
        assert_eq!(determinant(&z), BigInt::from(0));
    }
}
