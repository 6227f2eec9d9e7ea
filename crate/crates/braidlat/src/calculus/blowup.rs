//! Blowups of non-negative integer strings. A blowup inserts a 1 and
//! increments the two entries that become its neighbours (cyclically for
//! the head and tail cases). Strings reachable from (0,0) carry the exact
//! invariant Σ entries = 3·length − 6, which serves as a constant-time
//! rejection filter throughout.

use serde::Serialize;
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// A finite string of non-negative integers.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct NatString(pub Vec<u64>);

impl NatString {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn parse(text: &str) -> Option<Self> {
        let inner = text.trim().strip_prefix('[')?.strip_suffix(']')?;
        if inner.trim().is_empty() {
            return Some(NatString(Vec::new()));
        }
        let entries: Option<Vec<u64>> = inner.split(',').map(|p| p.trim().parse().ok()).collect();
        entries.map(NatString)
    }
}

impl fmt::Display for NatString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// One of the three blowup shapes. Interior positions are 1-based: the new
/// 1 lands between entries i and i+1.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "kind", content = "position", rename_all = "lowercase")]
pub enum BlowupMove {
    Head,
    Interior(usize),
    Tail,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BlowupError {
    #[error("interior position {position} out of range 1..{max}")]
    PositionOutOfRange { position: usize, max: usize },
    #[error("blowups require strings of length at least 2, got {len}")]
    TooShort { len: usize },
}

/// Applies one blowup move.
pub fn blowup(z: &NatString, mv: BlowupMove) -> Result<NatString, BlowupError> {
    let k = z.len();
    if k < 2 {
        return Err(BlowupError::TooShort { len: k });
    }
    let s = &z.0;
    let out = match mv {
        BlowupMove::Head => {
            let mut v = Vec::with_capacity(k + 1);
            v.push(1);
            v.push(s[0] + 1);
            v.extend_from_slice(&s[1..k - 1]);
            v.push(s[k - 1] + 1);
            v
        }
        BlowupMove::Interior(i) => {
            if i < 1 || i >= k {
                return Err(BlowupError::PositionOutOfRange { position: i, max: k });
            }
            let mut v = Vec::with_capacity(k + 1);
            v.extend_from_slice(&s[..i - 1]);
            v.push(s[i - 1] + 1);
            v.push(1);
            v.push(s[i] + 1);
            v.extend_from_slice(&s[i + 1..]);
            v
        }
        BlowupMove::Tail => {
            let mut v = Vec::with_capacity(k + 1);
            v.push(s[0] + 1);
            v.extend_from_slice(&s[1..k - 1]);
            v.push(s[k - 1] + 1);
            v.push(1);
            v
        }
    };
    Ok(NatString(out))
}

/// A witnessed derivation from (0,0). `strings[0]` is (0,0) and each move
/// transforms `strings[i]` into `strings[i+1]`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct BlowupChain {
    pub strings: Vec<NatString>,
    pub moves: Vec<BlowupMove>,
}

impl BlowupChain {
    pub fn target(&self) -> &NatString {
        self.strings.last().unwrap()
    }

    /// Re-applies every move and confirms the recorded intermediate
    /// strings, starting from (0,0).
    pub fn replay(&self) -> bool {
        if self.strings.first() != Some(&NatString(vec![0, 0])) {
            return false;
        }
        if self.strings.len() != self.moves.len() + 1 {
            return false;
        }
        for (i, mv) in self.moves.iter().enumerate() {
            match blowup(&self.strings[i], *mv) {
                Ok(next) if next == self.strings[i + 1] => {}
                _ => return false,
            }
        }
        true
    }
}

fn sum_invariant_holds(s: &NatString) -> bool {
    s.sum() as i64 == 3 * s.len() as i64 - 6
}

/// Searches for a blowdown derivation of `s` back to (0,0). Backtracking
/// over the three inverse shapes; greedy removal can dead-end when several
/// entries equal 1, so failures are memoized per string.
pub fn blowdown_chain(s: &NatString) -> Option<BlowupChain> {
    if !sum_invariant_holds(s) {
        return None;
    }
    let mut dead: HashMap<Vec<u64>, ()> = HashMap::new();
    // The trace unwinds from (0,0) upward, so it is already in order.
    let mut ascending: Vec<(BlowupMove, NatString)> = Vec::new();
    if !blowdown_search(s, &mut dead, &mut ascending) {
        return None;
    }
    let mut strings = vec![NatString(vec![0, 0])];
    let mut moves = Vec::new();
    for (mv, string) in ascending {
        moves.push(mv);
        strings.push(string);
    }
    Some(BlowupChain { strings, moves })
}

fn blowdown_search(
    s: &NatString,
    dead: &mut HashMap<Vec<u64>, ()>,
    trace: &mut Vec<(BlowupMove, NatString)>,
) -> bool {
    if s.0 == [0, 0] {
        return true;
    }
    // Every iterated blowup other than (0,0) itself is strictly positive.
    if s.len() <= 2 || s.0.contains(&0) {
        return false;
    }
    if dead.contains_key(&s.0) {
        return false;
    }
    let k = s.len();
    let mut candidates: Vec<(BlowupMove, NatString)> = Vec::new();
    if s.0[0] == 1 && s.0[1] >= 1 && s.0[k - 1] >= 1 {
        let mut v = s.0[1..].to_vec();
        v[0] -= 1;
        *v.last_mut().unwrap() -= 1;
        candidates.push((BlowupMove::Head, NatString(v)));
    }
    for j in 1..k - 1 {
        if s.0[j] == 1 && s.0[j - 1] >= 1 && s.0[j + 1] >= 1 {
            let mut v = Vec::with_capacity(k - 1);
            v.extend_from_slice(&s.0[..j]);
            v.extend_from_slice(&s.0[j + 1..]);
            v[j - 1] -= 1;
            v[j] -= 1;
            candidates.push((BlowupMove::Interior(j), NatString(v)));
        }
    }
    if s.0[k - 1] == 1 && s.0[0] >= 1 && s.0[k - 2] >= 1 {
        let mut v = s.0[..k - 1].to_vec();
        v[0] -= 1;
        *v.last_mut().unwrap() -= 1;
        candidates.push((BlowupMove::Tail, NatString(v)));
    }
    for (mv, smaller) in candidates {
        if !sum_invariant_holds(&smaller) {
            continue;
        }
        if blowdown_search(&smaller, dead, trace) {
            trace.push((mv, s.clone()));
            return true;
        }
    }
    dead.insert(s.0.clone(), ());
    false
}

/// The string (x₁+2, 2^{y₁−1}, …, x_t+2, 2^{y_t−1}) of length Σyᵢ.
pub fn c_string(x: &[u64], y: &[u64]) -> NatString {
    assert_eq!(x.len(), y.len());
    assert!(x.iter().chain(y.iter()).all(|&v| v >= 1));
    let mut out = Vec::new();
    for (&xi, &yi) in x.iter().zip(y) {
        out.push(xi + 2);
        out.extend(std::iter::repeat(2).take((yi - 1) as usize));
    }
    NatString(out)
}

/// A successful ribbon-family test: positions i < j (0-based) whose
/// demotion from 2 to 1 yields an iterated blowup of (0,0) with exactly
/// two 1's.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Family1Witness {
    pub demoted_positions: (usize, usize),
    pub demoted_string: NatString,
    pub chain: BlowupChain,
}

/// Looks for two entries equal to 2 whose demotion to 1 produces an
/// iterated blowup of (0,0) containing exactly two 1's.
pub fn family1_check(c: &NatString) -> Option<Family1Witness> {
    // The demoted string must carry the blowup sum invariant.
    if c.sum() as i64 != 3 * c.len() as i64 - 4 {
        return None;
    }
    // Exactly two 1's in the demoted string means none before demotion.
    if c.0.contains(&1) {
        return None;
    }
    let twos: Vec<usize> = (0..c.len()).filter(|&i| c.0[i] == 2).collect();
    for (a, &i) in twos.iter().enumerate() {
        for &j in &twos[a + 1..] {
            let mut demoted = c.0.clone();
            demoted[i] = 1;
            demoted[j] = 1;
            let demoted = NatString(demoted);
            if let Some(chain) = blowdown_chain(&demoted) {
                return Some(Family1Witness {
                    demoted_positions: (i, j),
                    demoted_string: demoted,
                    chain,
                });
            }
        }
    }
    None
}

/// Outcome of the dominated-blowup search; budget exhaustion is reported
/// separately from a definite failure.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum WitnessOutcome {
    Found(BlowupChain),
    None,
    BudgetExceeded { nodes: u64 },
}

/// Searches for an iterated blowup (s₁,…,s_N) of (0,0), N = Σyᵢ, with
/// sᵢ ≤ cᵢ pointwise for c the associated string. Enumerates dominated
/// strings with the correct sum, testing each by blowdown.
pub fn quasipositivity_witness(x: &[u64], y: &[u64], budget: u64) -> WitnessOutcome {
    let c = c_string(x, y);
    let n = c.len();
    if n < 2 {
        return WitnessOutcome::None;
    }
    let target_sum = 3 * n as i64 - 6;
    if target_sum < 0 {
        return WitnessOutcome::None;
    }
    let mut nodes: u64 = 0;
    let mut partial: Vec<u64> = Vec::with_capacity(n);
    let suffix_max: Vec<i64> = {
        let mut acc = vec![0i64; n + 1];
        for i in (0..n).rev() {
            acc[i] = acc[i + 1] + c.0[i] as i64;
        }
        acc
    };

    enum Descend {
        Found(BlowupChain),
        NotHere,
        Budget,
    }

    fn descend(
        c: &NatString,
        pos: usize,
        remaining: i64,
        suffix_max: &[i64],
        partial: &mut Vec<u64>,
        nodes: &mut u64,
        budget: u64,
    ) -> Descend {
        *nodes += 1;
        if *nodes > budget {
            return Descend::Budget;
        }
        let n = c.len();
        if pos == n {
            return match blowdown_chain(&NatString(partial.clone())) {
                Some(chain) => Descend::Found(chain),
                None => Descend::NotHere,
            };
        }
        if remaining < 0 || remaining > suffix_max[pos] {
            return Descend::NotHere;
        }
        let cap = c.0[pos].min(remaining.max(0) as u64);
        for v in 0..=cap {
            partial.push(v);
            let result = descend(c, pos + 1, remaining - v as i64, suffix_max, partial, nodes, budget);
            partial.pop();
            match result {
                Descend::NotHere => {}
                other => return other,
            }
        }
        Descend::NotHere
    }

    match descend(&c, 0, target_sum, &suffix_max, &mut partial, &mut nodes, budget) {
        Descend::Budget => WitnessOutcome::BudgetExceeded { nodes },
        Descend::Found(chain) => WitnessOutcome::Found(chain),
        Descend::NotHere => WitnessOutcome::None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ns(v: &[u64]) -> NatString {
        NatString(v.to_vec())
    }

    #[test]
    fn blowup_base_cases() {
        assert_eq!(blowup(&ns(&[0, 0]), BlowupMove::Head).unwrap(), ns(&[1, 1, 1]));
        assert_eq!(
            blowup(&ns(&[1, 1, 1]), BlowupMove::Interior(1)).unwrap(),
            ns(&[2, 1, 2, 1])
        );
        assert_eq!(
            blowup(&ns(&[1, 1, 1]), BlowupMove::Interior(2)).unwrap(),
            ns(&[1, 2, 1, 2])
        );
        assert_eq!(
            blowup(&ns(&[2, 1, 2, 1]), BlowupMove::Head).unwrap(),
            ns(&[1, 3, 1, 2, 2])
        );
    }

    #[test]
    fn blowup_rejects_bad_positions() {
        assert!(matches!(
            blowup(&ns(&[1, 1, 1]), BlowupMove::Interior(3)),
            Err(BlowupError::PositionOutOfRange { .. })
        ));
        assert!(matches!(
            blowup(&ns(&[1]), BlowupMove::Head),
            Err(BlowupError::TooShort { .. })
        ));
    }

    #[test]
    fn worked_example_chain() {
        let chain = blowdown_chain(&ns(&[5, 1, 2, 2, 2, 2, 1])).unwrap();
        let expected: Vec<NatString> = [
            vec![0, 0],
            vec![1, 1, 1],
            vec![2, 1, 2, 1],
            vec![3, 1, 2, 2, 1],
            vec![4, 1, 2, 2, 2, 1],
            vec![5, 1, 2, 2, 2, 2, 1],
        ]
        .into_iter()
        .map(NatString)
        .collect();
        assert_eq!(chain.strings, expected);
        assert_eq!(chain.moves.len(), 5);
        assert!(chain.replay());
    }

    #[test]
    fn base_and_negative_cases() {
        let empty = blowdown_chain(&ns(&[0, 0])).unwrap();
        assert!(empty.moves.is_empty());
        assert_eq!(blowdown_chain(&ns(&[2, 2])), None);
    }

    #[test]
    fn sum_invariant_along_chains() {
        let chain = blowdown_chain(&ns(&[3, 1, 2, 4, 1, 2, 2])).unwrap();
        for s in &chain.strings {
            assert_eq!(s.sum() as i64, 3 * s.len() as i64 - 6);
        }
    }

    #[test]
    fn c_string_examples() {
        assert_eq!(c_string(&[3], &[7]), ns(&[5, 2, 2, 2, 2, 2, 2]));
        assert_eq!(c_string(&[1, 2], &[3, 4]), ns(&[3, 2, 2, 4, 2, 2, 2]));
        assert_eq!(c_string(&[1], &[1]), ns(&[3]));
    }

    #[test]
    fn family1_examples() {
        let w = family1_check(&ns(&[5, 2, 2, 2, 2, 2, 2])).unwrap();
        assert_eq!(w.demoted_string, ns(&[5, 1, 2, 2, 2, 2, 1]));
        let w = family1_check(&ns(&[3, 2, 2, 4, 2, 2, 2])).unwrap();
        assert_eq!(w.demoted_string, ns(&[3, 1, 2, 4, 1, 2, 2]));
        let w = family1_check(&ns(&[3, 2, 2, 2, 2])).unwrap();
        assert_eq!(w.demoted_string, ns(&[3, 1, 2, 2, 1]));
        assert_eq!(family1_check(&ns(&[2, 2, 2])), None);
    }

    #[test]
    fn witness_examples() {
        match quasipositivity_witness(&[3], &[7], 1_000_000) {
            WitnessOutcome::Found(chain) => {
                assert_eq!(chain.target(), &ns(&[5, 1, 2, 2, 2, 2, 1]))
            }
            other => panic!("expected witness, got {other:?}"),
        }
        match quasipositivity_witness(&[1], &[5], 1_000_000) {
            WitnessOutcome::Found(chain) => assert_eq!(chain.target(), &ns(&[3, 1, 2, 2, 1])),
            other => panic!("expected witness, got {other:?}"),
        }
        assert_eq!(
            quasipositivity_witness(&[1], &[1], 1_000_000),
            WitnessOutcome::None
        );
    }

    #[test]
    fn serializes_as_bracketed_csv() {
        let s = ns(&[5, 1, 2, 2, 2, 2, 1]);
        assert_eq!(s.to_string(), "[5,1,2,2,2,2,1]");
        assert_eq!(NatString::parse("[5,1,2,2,2,2,1]").unwrap(), s);
    }
}
