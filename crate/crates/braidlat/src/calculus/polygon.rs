//! Labelled regular polygons and the symmetry test behind the
//! amphichirality family. A labelling assigns x-values to vertices and
//! y-values to edges; the test looks for a dihedral symmetry φ with
//! xᵢ = y_{φ_E(i)} and yᵢ = x_{φ_V(i+1)} for every i.

use serde::Serialize;

/// Vertex labels x₁..x_t and edge labels y₁..y_t of a t-gon, encoding the
/// tuple (x₁,y₁,…,x_t,y_t). The degenerate t = 1 case is accepted and
/// treated as a 1-gon whose only symmetry check is x₁ = y₁.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct PolygonLabelling {
    pub x: Vec<u64>,
    pub y: Vec<u64>,
}

impl PolygonLabelling {
    pub fn new(x: Vec<u64>, y: Vec<u64>) -> Self {
        assert!(!x.is_empty() && x.len() == y.len());
        PolygonLabelling { x, y }
    }

    pub fn t(&self) -> usize {
        self.x.len()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "kind", content = "offset", rename_all = "lowercase")]
pub enum SymmetryKind {
    /// φ_V(i+1) = φ_V(i)+1 and φ_E(i) = φ_V(i); witnesses that the mirror
    /// knot is isotopic to the knot itself.
    Rotation(usize),
    /// φ_V(i+1) = φ_V(i)−1 and φ_E(i) = φ_V(i)−1; witnesses that the
    /// mirror knot is isotopic to the reverse.
    Reflection(usize),
}

/// A symmetry satisfying both labelling conditions, with the vertex map
/// spelled out (0-based: vertex i maps to `phi_v[i]`).
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SymmetryWitness {
    pub kind: SymmetryKind,
    pub phi_v: Vec<usize>,
}

impl SymmetryWitness {
    /// Re-checks the two displayed conditions against a labelling.
    pub fn verify(&self, lab: &PolygonLabelling) -> bool {
        let t = lab.t();
        if self.phi_v.len() != t {
            return false;
        }
        let phi_e = |i: usize| -> usize {
            match self.kind {
                SymmetryKind::Rotation(_) => self.phi_v[i],
                SymmetryKind::Reflection(_) => (self.phi_v[i] + t - 1) % t,
            }
        };
        (0..t).all(|i| {
            lab.x[i] == lab.y[phi_e(i)] && lab.y[i] == lab.x[self.phi_v[(i + 1) % t]]
        })
    }
}

/// Enumerates all 2t dihedral symmetries of the t-gon and returns the
/// first one satisfying the labelling conditions. Rotations are tried
/// before reflections, offsets in increasing order.
pub fn family3_symmetry(lab: &PolygonLabelling) -> Option<SymmetryWitness> {
    let t = lab.t();
    for offset in 0..t {
        let phi_v: Vec<usize> = (0..t).map(|i| (i + offset) % t).collect();
        let witness = SymmetryWitness {
            kind: SymmetryKind::Rotation(offset),
            phi_v,
        };
        if witness.verify(lab) {
            return Some(witness);
        }
    }
    for offset in 0..t {
        let phi_v: Vec<usize> = (0..t).map(|i| (offset + t - i % t) % t).collect();
        let witness = SymmetryWitness {
            kind: SymmetryKind::Reflection(offset),
            phi_v,
        };
        if witness.verify(lab) {
            return Some(witness);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab(x: &[u64], y: &[u64]) -> PolygonLabelling {
        PolygonLabelling::new(x.to_vec(), y.to_vec())
    }

    #[test]
    fn figure_eight_rotation() {
        let w = family3_symmetry(&lab(&[1, 1], &[1, 1])).unwrap();
        assert!(matches!(w.kind, SymmetryKind::Rotation(_)));
    }

    #[test]
    fn eight_nine_reflection() {
        let w = family3_symmetry(&lab(&[3, 1], &[1, 3])).unwrap();
        assert!(matches!(w.kind, SymmetryKind::Reflection(_)));
    }

    #[test]
    fn shifted_rotation() {
        let w = family3_symmetry(&lab(&[1, 2, 3], &[3, 1, 2])).unwrap();
        assert!(matches!(w.kind, SymmetryKind::Rotation(_)));
    }

    #[test]
    fn asymmetric_bigon_fails() {
        assert_eq!(family3_symmetry(&lab(&[1, 3], &[2, 2])), None);
    }

    #[test]
    fn one_gon_identity() {
        assert!(family3_symmetry(&lab(&[2], &[2])).is_some());
        assert_eq!(family3_symmetry(&lab(&[2], &[3])), None);
    }

    #[test]
    fn invariant_under_relabelling() {
        // Rotating the pair sequence relabels the polygon and must not
        // change whether a symmetry exists.
        let cases: [(&[u64], &[u64]); 3] = [
            (&[3, 1], &[1, 3]),
            (&[1, 2, 3], &[3, 1, 2]),
            (&[1, 3], &[2, 2]),
        ];
        for (x, y) in cases {
            let t = x.len();
            let base = family3_symmetry(&lab(x, y)).is_some();
            for r in 1..t {
                let xr: Vec<u64> = (0..t).map(|i| x[(i + r) % t]).collect();
                let yr: Vec<u64> = (0..t).map(|i| y[(i + r) % t]).collect();
                assert_eq!(family3_symmetry(&lab(&xr, &yr)).is_some(), base);
            }
        }
    }
}
