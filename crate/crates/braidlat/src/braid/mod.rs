//! Words in the 3-strand braid group: parsing, free reduction, closure
//! combinatorics, Garside conjugacy, alternating normal forms and the
//! symmetric-union constructors.

mod family2;
mod garside;
mod normal_form;

pub use family2::{family2_braid_from_expansions, symmetric_union_braid, symmetric_union_conjugate};
pub use garside::{garside_conjugate, garside_normal_form, ConjugacyError, GarsideForm};
pub use normal_form::{mirror_normal_form, to_normal_form, NormalForm3, NormalFormFailure};

use serde::Serialize;
use thiserror::Error;

/// A single generator or inverse generator of the 3-strand braid group.
///
/// Only the two standard generators exist on three strands, so `index` is
/// always `1` or `2`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Letter {
    index: u8,
    sign: i8,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("generator index {index} out of range at byte {offset}: only s1 and s2 exist on three strands")]
    IndexOutOfRange { offset: usize, index: u64 },
}

impl Letter {
    pub fn new(index: u8, positive: bool) -> Option<Self> {
        if index == 1 || index == 2 {
            Some(Letter {
                index,
                sign: if positive { 1 } else { -1 },
            })
        } else {
            None
        }
    }

    pub fn index(&self) -> u8 {
        self.index
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn inverse(&self) -> Self {
        Letter {
            index: self.index,
            sign: -self.sign,
        }
    }

    /// Mirror image: flips the crossing sign.
    pub fn mirror(&self) -> Self {
        self.inverse()
    }

    /// Exchanges the two generators. Conjugation by the half twist
    /// realizes this exchange, so it preserves conjugacy classes.
    pub fn swap_index(&self) -> Self {
        Letter {
            index: 3 - self.index,
            sign: self.sign,
        }
    }

    fn to_char(self) -> char {
        match (self.index, self.sign) {
            (1, 1) => 'a',
            (1, -1) => 'A',
            (2, 1) => 'b',
            _ => 'B',
        }
    }
}

/// A word in the generators of the 3-strand braid group. Words are plain
/// letter sequences; no reduction is applied implicitly.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct BraidWord {
    letters: Vec<Letter>,
}

impl BraidWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        BraidWord { letters }
    }

    pub fn empty() -> Self {
        BraidWord::default()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// σ₁σ₂σ₁, the Garside half twist.
    pub fn half_twist() -> Self {
        BraidWord::parse("aba").unwrap()
    }

    /// (σ₁σ₂)³ = Δ², the generator of the center.
    pub fn full_twist() -> Self {
        BraidWord::parse("ababab").unwrap()
    }

    /// Generator power σ_index^exp.
    pub fn generator_power(index: u8, exp: i64) -> Self {
        let letter = Letter::new(index, exp >= 0).expect("index must be 1 or 2");
        BraidWord::new(vec![letter; exp.unsigned_abs() as usize])
    }

    /// Parses either the compact grammar (`a`/`A`/`b`/`B`, whitespace
    /// ignored) or the verbose grammar (`s1`/`s2` tokens with an optional
    /// `^<int>` exponent, whitespace separated). The two grammars cannot be
    /// mixed inside one word.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let compact = text.bytes().any(|b| matches!(b, b'a' | b'A' | b'b' | b'B'));
        let verbose = text.contains('s');
        if compact && verbose {
            let offset = text.find('s').unwrap_or(0);
            return Err(ParseError::Syntax {
                offset,
                message: "compact and verbose syntaxes cannot be mixed".into(),
            });
        }
        if verbose {
            Self::parse_verbose(text)
        } else {
            Self::parse_compact(text)
        }
    }

    fn parse_compact(text: &str) -> Result<Self, ParseError> {
        let mut letters = Vec::new();
        for (offset, ch) in text.char_indices() {
            let letter = match ch {
                'a' => Letter::new(1, true),
                'A' => Letter::new(1, false),
                'b' => Letter::new(2, true),
                'B' => Letter::new(2, false),
                c if c.is_whitespace() => continue,
                _ => {
                    return Err(ParseError::Syntax {
                        offset,
                        message: format!("unexpected character {ch:?}"),
                    })
                }
            };
            letters.push(letter.unwrap());
        }
        Ok(BraidWord::new(letters))
    }

    fn parse_verbose(text: &str) -> Result<Self, ParseError> {
        let mut letters = Vec::new();
        let mut rest = text;
        let mut offset = 0usize;
        loop {
            let trimmed = rest.trim_start();
            offset += rest.len() - trimmed.len();
            rest = trimmed;
            if rest.is_empty() {
                break;
            }
            if !rest.starts_with('s') {
                return Err(ParseError::Syntax {
                    offset,
                    message: format!("expected token `s1` or `s2`, found {:?}", rest.chars().next().unwrap()),
                });
            }
            let token_start = offset;
            rest = &rest[1..];
            offset += 1;
            let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
            if digits.is_empty() {
                return Err(ParseError::Syntax {
                    offset,
                    message: "missing generator index after `s`".into(),
                });
            }
            rest = &rest[digits.len()..];
            offset += digits.len();
            let index: u64 = digits.parse().map_err(|_| ParseError::Syntax {
                offset: token_start,
                message: "unreadable generator index".into(),
            })?;
            if index != 1 && index != 2 {
                return Err(ParseError::IndexOutOfRange {
                    offset: token_start,
                    index,
                });
            }
            let mut exp: i64 = 1;
            if let Some(stripped) = rest.strip_prefix('^') {
                offset += 1;
                rest = stripped;
                let sign_len = if rest.starts_with('-') || rest.starts_with('+') { 1 } else { 0 };
                let num_len = sign_len
                    + rest[sign_len..]
                        .chars()
                        .take_while(|c| c.is_ascii_digit())
                        .count();
                if num_len == sign_len {
                    return Err(ParseError::Syntax {
                        offset,
                        message: "missing exponent after `^`".into(),
                    });
                }
                exp = rest[..num_len].parse().map_err(|_| ParseError::Syntax {
                    offset,
                    message: "unreadable exponent".into(),
                })?;
                rest = &rest[num_len..];
                offset += num_len;
            }
            let letter = Letter::new(index as u8, exp >= 0).unwrap();
            letters.extend(std::iter::repeat(letter).take(exp.unsigned_abs() as usize));
        }
        Ok(BraidWord::new(letters))
    }

    /// Compact printer; round-trips through [`BraidWord::parse`].
    pub fn to_compact(&self) -> String {
        self.letters.iter().map(|l| l.to_char()).collect()
    }

    /// Image under the exponent sum homomorphism B₃ → ℤ.
    pub fn exponent_sum(&self) -> i64 {
        self.letters.iter().map(|l| l.sign as i64).sum()
    }

    pub fn mirror(&self) -> Self {
        BraidWord::new(self.letters.iter().map(Letter::mirror).collect())
    }

    pub fn reverse(&self) -> Self {
        BraidWord::new(self.letters.iter().rev().copied().collect())
    }

    pub fn invert(&self) -> Self {
        BraidWord::new(self.letters.iter().rev().map(Letter::inverse).collect())
    }

    /// Exchanges σ₁ and σ₂ throughout; equal to conjugation by the half
    /// twist, hence stays in the conjugacy class.
    pub fn swap_generators(&self) -> Self {
        BraidWord::new(self.letters.iter().map(Letter::swap_index).collect())
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        BraidWord::new(letters)
    }

    /// u · self · u⁻¹.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.concat(self).concat(&u.invert())
    }

    pub fn repeat(&self, n: usize) -> Self {
        let mut letters = Vec::with_capacity(self.len() * n);
        for _ in 0..n {
            letters.extend_from_slice(&self.letters);
        }
        BraidWord::new(letters)
    }

    /// Removes adjacent inverse pairs to a fixed point.
    pub fn free_reduce(&self) -> Self {
        let mut stack: Vec<Letter> = Vec::with_capacity(self.len());
        for &l in &self.letters {
            if stack.last().is_some_and(|top| *top == l.inverse()) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        BraidWord::new(stack)
    }

    /// Removes adjacent and cyclically adjacent inverse pairs to a fixed
    /// point. The result represents a conjugate of the input.
    pub fn free_cyclic_reduce(&self) -> Self {
        let mut word = self.free_reduce();
        while word.len() >= 2 {
            let first = word.letters[0];
            let last = *word.letters.last().unwrap();
            if first == last.inverse() {
                word = BraidWord::new(word.letters[1..word.len() - 1].to_vec()).free_reduce();
            } else {
                break;
            }
        }
        word
    }

    /// Permutation of strand endpoints induced by the word.
    pub fn closure_permutation(&self) -> ClosurePermutation {
        let mut perm = [0usize, 1, 2];
        for l in &self.letters {
            let i = (l.index - 1) as usize;
            // Sign does not matter for the underlying permutation.
            for slot in perm.iter_mut() {
                if *slot == i {
                    *slot = i + 1;
                } else if *slot == i + 1 {
                    *slot = i;
                }
            }
        }
        ClosurePermutation::new(perm)
    }
}

impl std::fmt::Display for BraidWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_compact())
    }
}

/// The permutation of {1,2,3} induced by a braid word, together with its
/// cycle count. The closure is a knot exactly when there is one cycle.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct ClosurePermutation {
    /// `perm[i]` is the 0-based end position of the strand starting at `i`.
    pub perm: [usize; 3],
    pub cycle_count: usize,
}

impl ClosurePermutation {
    fn new(perm: [usize; 3]) -> Self {
        let mut seen = [false; 3];
        let mut cycles = 0;
        for start in 0..3 {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut at = start;
            while !seen[at] {
                seen[at] = true;
                at = perm[at];
            }
        }
        ClosurePermutation {
            perm,
            cycle_count: cycles,
        }
    }

    pub fn is_knot(&self) -> bool {
        self.cycle_count == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(text: &str) -> BraidWord {
        BraidWord::parse(text).unwrap()
    }

    #[test]
    fn parses_compact_with_whitespace() {
        let word = w("a b b a a a a B B B B B");
        assert_eq!(word.len(), 12);
        assert_eq!(word.to_compact(), "abbaaaaBBBBB");
    }

    #[test]
    fn parses_verbose_exponents() {
        let word = w("s1^3 s2^-3");
        assert_eq!(word.to_compact(), "aaaBBB");
    }

    #[test]
    fn rejects_out_of_range_generator() {
        assert_eq!(
            BraidWord::parse("s3"),
            Err(ParseError::IndexOutOfRange { offset: 0, index: 3 })
        );
    }

    #[test]
    fn rejects_mixed_syntax() {
        assert!(matches!(
            BraidWord::parse("a s2"),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(
            BraidWord::parse("a c"),
            Err(ParseError::Syntax { offset: 2, .. })
        ));
    }

    #[test]
    fn printer_round_trips() {
        for text in ["", "aB", "abbaaaaBBBBB", "ABab"] {
            let word = w(text);
            assert_eq!(BraidWord::parse(&word.to_compact()).unwrap(), word);
        }
    }

    #[test]
    fn exponent_sum_examples() {
        assert_eq!(w("").exponent_sum(), 0);
        assert_eq!(w("abbaaaaBBBBB").exponent_sum(), 2);
        assert_eq!(w("ababab aaa BBBBBBB").exponent_sum(), 2);
    }

    #[test]
    fn exponent_sum_behaviour_under_involutions() {
        let word = w("abAbbBa");
        assert_eq!(word.mirror().exponent_sum(), -word.exponent_sum());
        assert_eq!(word.invert().exponent_sum(), -word.exponent_sum());
        assert_eq!(word.reverse().exponent_sum(), word.exponent_sum());
        assert_eq!(
            word.free_cyclic_reduce().exponent_sum(),
            word.exponent_sum()
        );
    }

    #[test]
    fn closure_components_examples() {
        assert_eq!(w("ab").closure_permutation().cycle_count, 1);
        assert_eq!(w("aaBB").closure_permutation().cycle_count, 3);
        assert_eq!(w("aB").closure_permutation().cycle_count, 1);
    }

    #[test]
    fn mirror_and_reverse_examples() {
        assert_eq!(w("aB").mirror(), w("Ab"));
        assert_eq!(w("abbb").reverse(), w("bbba"));
        assert_eq!(w("baAB").free_cyclic_reduce(), BraidWord::empty());
    }

    #[test]
    fn cyclic_reduction_wraps_around() {
        // b · a · a⁻¹ · b⁻¹ reduces to nothing; B...b cancels cyclically.
        assert_eq!(w("Bab").free_cyclic_reduce(), w("a"));
    }

    #[test]
    fn closure_invariant_under_rotation() {
        let word = w("abbAB");
        let rotated = BraidWord::new(
            word.letters()
                .iter()
                .cycle()
                .skip(2)
                .take(word.len())
                .copied()
                .collect(),
        );
        assert_eq!(
            word.closure_permutation().cycle_count,
            rotated.closure_permutation().cycle_count
        );
    }
}
