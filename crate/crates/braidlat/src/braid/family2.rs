//! Symmetric-union braid constructors: the braid β_a whose closure is the
//! symmetric union attached to a ∈ B₃, its conjugate companion β′_a, and
//! the generator that follows a sequence of (−2)-expansion moves.

use super::BraidWord;
use crate::calculus::ExpansionMove;

/// β_a = σ₂σ₁σ₂⁻¹ · a · σ₂σ₁⁻¹σ₂⁻¹ · a⁻¹, concatenated literally.
pub fn symmetric_union_braid(a: &BraidWord) -> BraidWord {
    let left = BraidWord::parse("baB").unwrap();
    let right = BraidWord::parse("bAB").unwrap();
    left.concat(a).concat(&right).concat(&a.invert())
}

/// β′_a = σ₂⁻² · a · σ₂² · Δ⁻¹ · a⁻¹ · Δ, conjugate to β_a.
pub fn symmetric_union_conjugate(a: &BraidWord) -> BraidWord {
    let delta = BraidWord::half_twist();
    BraidWord::parse("BB")
        .unwrap()
        .concat(a)
        .concat(&BraidWord::parse("bb").unwrap())
        .concat(&delta.invert())
        .concat(&a.invert())
        .concat(&delta)
}

/// Builds the word a for a sequence of expansion moves, starting from
/// a₀ = σ₂⁻¹σ₁². Move A prepends σ₂⁻¹, move B prepends σ₁; the closures of
/// the returned β′_a realize the corresponding expansion strings.
/// Returns (a, β′_a).
pub fn family2_braid_from_expansions(moves: &[ExpansionMove]) -> (BraidWord, BraidWord) {
    let mut a = BraidWord::parse("Baa").unwrap();
    for m in moves {
        let prefix = match m {
            ExpansionMove::A => BraidWord::parse("B").unwrap(),
            ExpansionMove::B => BraidWord::parse("a").unwrap(),
        };
        a = prefix.concat(&a);
    }
    let braid = symmetric_union_conjugate(&a);
    (a, braid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::garside_conjugate;

    #[test]
    fn empty_tangle_gives_trivial_braid() {
        let braid = symmetric_union_braid(&BraidWord::empty());
        assert_eq!(braid.free_reduce(), BraidWord::empty());
    }

    #[test]
    fn base_case_is_square_knot_braid() {
        let a = BraidWord::parse("Baa").unwrap();
        let braid = symmetric_union_conjugate(&a);
        let target = BraidWord::parse("BBBaaa").unwrap();
        assert!(garside_conjugate(&braid, &target, 1_000_000).unwrap());
    }

    #[test]
    fn beta_and_companion_are_conjugate() {
        for text in ["Baa", "aBaa", "BBaa", "abA"] {
            let a = BraidWord::parse(text).unwrap();
            let beta = symmetric_union_braid(&a);
            let companion = symmetric_union_conjugate(&a);
            assert!(
                garside_conjugate(&beta, &companion, 1_000_000).unwrap(),
                "β_a and β′_a disagree for a = {text}"
            );
            assert_eq!(beta.exponent_sum(), 0);
        }
    }

    #[test]
    fn move_sequences_prepend() {
        let (a, _) = family2_braid_from_expansions(&[]);
        assert_eq!(a, BraidWord::parse("Baa").unwrap());
        let (a, _) = family2_braid_from_expansions(&[ExpansionMove::A]);
        assert_eq!(a, BraidWord::parse("BBaa").unwrap());
        let (a, _) = family2_braid_from_expansions(&[ExpansionMove::B]);
        assert_eq!(a, BraidWord::parse("aBaa").unwrap());
    }
}
