//! The end-to-end decision procedure: given a 3-braid word whose closure
//! is a knot, decide which concordance family the closure can belong to
//! and emit independently re-checkable certificates.

use crate::braid::{
    family2_braid_from_expansions, garside_conjugate, mirror_normal_form, to_normal_form,
    BraidWord, NormalForm3, NormalFormFailure, ParseError,
};
use crate::calculus::{
    c_string, expansion_certificate, family1_check, family3_symmetry, quasipositivity_witness,
    weight_string, BlowupChain, CircularString, ExpansionMove, Family1Witness, NatString,
    PolygonLabelling, SymmetryKind, SymmetryWitness, WitnessOutcome,
};
use crate::lattice::signature_erle;
use crate::SearchLimits;
use rayon::prelude::*;
use serde::Serialize;

/// Which isotopy the polygon symmetry certifies for the mirror knot.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MirrorDirection {
    /// Rotation: the mirror is isotopic to the knot itself.
    MirrorIsotopicToKnot,
    /// Reflection: the mirror is isotopic to the reverse.
    MirrorIsotopicToReverse,
}

/// The amphichirality certificate attached to a polygon symmetry. The
/// braid-level conjugacy check is advisory: a budget overrun leaves the
/// witness valid but unconfirmed at the braid level.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct AmphichiralityWitness {
    pub direction: MirrorDirection,
    pub conjugacy_checked: bool,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Family1Certificate {
    pub normal_form: NormalForm3,
    pub c_string: NatString,
    pub witness: Family1Witness,
    pub quasipositive_witness: BlowupChain,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Family2Certificate {
    pub normal_form: NormalForm3,
    pub weight_string: CircularString,
    pub expansion_moves: Vec<ExpansionMove>,
    pub a_word: String,
    pub crosscheck: bool,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Family3Certificate {
    pub normal_form: NormalForm3,
    pub symmetry: SymmetryWitness,
    pub amphichirality: AmphichiralityWitness,
}

/// The classification verdict. Exactly one variant; every certificate can
/// be re-checked by the module that produced it.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Verdict {
    NotAKnot {
        components: usize,
    },
    /// Quasipositive and ribbon: concordance order one.
    Family1 {
        certificate: Family1Certificate,
        annotations: Vec<String>,
        paper_refs: Vec<String>,
    },
    /// Symmetric union, hence ribbon: concordance order one.
    Family2 {
        certificate: Family2Certificate,
        annotations: Vec<String>,
        paper_refs: Vec<String>,
    },
    /// Amphichiral; finite order is not decided by membership alone.
    Family3 {
        certificate: Family3Certificate,
        annotations: Vec<String>,
        paper_refs: Vec<String>,
    },
    /// All family tests definitively failed: infinite concordance order.
    Obstructed {
        normal_form: Option<NormalForm3>,
        failed_checks: Vec<String>,
        annotations: Vec<String>,
        paper_refs: Vec<String>,
    },
    /// A bounded search gave out before a definite answer existed.
    Inconclusive {
        reason: String,
    },
}

impl Verdict {
    pub fn family_tag(&self) -> &'static str {
        match self {
            Verdict::NotAKnot { .. } => "not_a_knot",
            Verdict::Family1 { .. } => "family1",
            Verdict::Family2 { .. } => "family2",
            Verdict::Family3 { .. } => "family3",
            Verdict::Obstructed { .. } => "obstructed",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn conclusion(&self) -> &'static str {
        match self {
            Verdict::NotAKnot { .. } => "closure is a link, not a knot",
            Verdict::Family1 { .. } => "quasipositive, ribbon: concordance order 1",
            Verdict::Family2 { .. } => "symmetric union, ribbon: concordance order 1",
            Verdict::Family3 { .. } => "amphichiral; finite order not decided",
            Verdict::Obstructed { .. } => "infinite concordance order",
            Verdict::Inconclusive { .. } => "no verdict within the search budget",
        }
    }
}

/// The exponent-sum bound |e(β)| ≤ 2 that every finite-order 3-braid
/// closure satisfies.
pub fn bennequin_bound_ok(w: &BraidWord) -> bool {
    w.exponent_sum().abs() <= 2
}

/// Rebuilds the symmetric-union braid from the expansion moves and checks
/// that its closure's weight string matches `s` up to circular symmetry.
pub fn crosscheck_family2(a: &BraidWord, s: &CircularString, limits: &SearchLimits) -> bool {
    let (built_a, braid) = family2_braid_from_expansions(&derive_moves_for(s));
    if built_a != *a {
        return false;
    }
    match to_normal_form(&braid, limits) {
        Ok(nf) => {
            if nf.d != 0 {
                return false;
            }
            weight_string(&nf.x, &nf.y).dihedral_eq(s)
        }
        Err(_) => false,
    }
}

fn derive_moves_for(s: &CircularString) -> Vec<ExpansionMove> {
    expansion_certificate(s).unwrap_or_default()
}

/// Builds the amphichirality witness for a symmetry found on the normal
/// form, confirming at the braid level that the mirror word is conjugate
/// to the predicted word.
pub fn amphichirality_witness(
    nf: &NormalForm3,
    symmetry: &SymmetryWitness,
    limits: &SearchLimits,
) -> AmphichiralityWitness {
    let word = nf.to_word();
    let (direction, predicted) = match symmetry.kind {
        SymmetryKind::Rotation(_) => (MirrorDirection::MirrorIsotopicToKnot, word.clone()),
        SymmetryKind::Reflection(_) => (MirrorDirection::MirrorIsotopicToReverse, word.reverse()),
    };
    let conjugacy_checked =
        garside_conjugate(&word.mirror(), &predicted, limits.conjugacy_budget).unwrap_or(false);
    AmphichiralityWitness {
        direction,
        conjugacy_checked,
    }
}

/// Decides the family of the closure of `w` per the classification
/// theorem. All failure modes are verdict variants, never panics.
pub fn classify_knot(w: &BraidWord, limits: &SearchLimits) -> Verdict {
    let closure = w.closure_permutation();
    if !closure.is_knot() {
        return Verdict::NotAKnot {
            components: closure.cycle_count,
        };
    }
    if !bennequin_bound_ok(w) {
        return Verdict::Obstructed {
            normal_form: None,
            failed_checks: vec![format!(
                "exponent sum {} violates the slice-genus bound |e| <= 2",
                w.exponent_sum()
            )],
            annotations: Vec::new(),
            paper_refs: vec!["slice-bennequin-bound".into()],
        };
    }
    let mut annotations: Vec<String> = Vec::new();
    let nf = match to_normal_form(w, limits) {
        Ok(nf) => nf,
        Err(err) => {
            return Verdict::Inconclusive {
                reason: format!("no alternating normal form: {err}"),
            }
        }
    };
    let nf = if nf.d == -1 {
        annotations.push("mirror_of_input".into());
        match mirror_normal_form(&nf, limits) {
            Ok(m) => m,
            Err(err) => {
                return Verdict::Inconclusive {
                    reason: format!("mirror normalization failed: {err}"),
                }
            }
        }
    } else {
        nf
    };
    // The signature vanishes identically on valid normal forms; assert it
    // rather than assume it.
    debug_assert_eq!(signature_erle(nf.d as i64, &nf.x, &nf.y), 0);

    if nf.d == 1 {
        return classify_d1(nf, annotations, limits);
    }
    classify_d0(nf, annotations, limits)
}

fn classify_d1(nf: NormalForm3, annotations: Vec<String>, limits: &SearchLimits) -> Verdict {
    let c = c_string(&nf.x, &nf.y);
    match family1_check(&c) {
        Some(witness) => {
            let qp = match quasipositivity_witness(&nf.x, &nf.y, limits.witness_budget) {
                WitnessOutcome::Found(chain) => chain,
                WitnessOutcome::None => {
                    // The demotion witness itself dominates the string, so
                    // this cannot happen; treat as a definite failure.
                    return Verdict::Inconclusive {
                        reason: "domination witness search contradicted the demotion witness"
                            .into(),
                    };
                }
                WitnessOutcome::BudgetExceeded { nodes } => {
                    return Verdict::Inconclusive {
                        reason: format!("quasipositivity witness search ran out at {nodes} nodes"),
                    }
                }
            };
            Verdict::Family1 {
                certificate: Family1Certificate {
                    normal_form: nf,
                    c_string: c,
                    witness,
                    quasipositive_witness: qp,
                },
                annotations,
                paper_refs: vec![
                    "quasipositive-blowup-criterion".into(),
                    "ribbon-from-exponent-sum-two".into(),
                ],
            }
        }
        None => Verdict::Obstructed {
            normal_form: Some(nf),
            failed_checks: vec![
                "family1: no demotion of the associated string is an iterated blowup".into(),
                "family2: requires exponent sum 0, found 2".into(),
                "family3: requires exponent sum 0, found 2".into(),
            ],
            annotations,
            paper_refs: vec!["lattice-embedding-obstruction".into()],
        },
    }
}

fn classify_d0(nf: NormalForm3, mut annotations: Vec<String>, limits: &SearchLimits) -> Verdict {
    let n: u64 = nf.y.iter().sum();
    // Base cases: the unknot and the figure-eight close small forms.
    if n == 1 {
        annotations.push("unknot".into());
        let symmetry = family3_symmetry(&PolygonLabelling::new(nf.x.clone(), nf.y.clone()))
            .expect("a balanced 1-gon always has the identity symmetry");
        let amphichirality = amphichirality_witness(&nf, &symmetry, limits);
        return Verdict::Family3 {
            certificate: Family3Certificate {
                normal_form: nf,
                symmetry,
                amphichirality,
            },
            annotations,
            paper_refs: vec!["polygon-symmetry-amphichiral".into()],
        };
    }
    if n == 2 {
        annotations.push("figure_eight".into());
    }
    let mut failed: Vec<String> = vec!["family1: requires exponent sum ±2, found 0".into()];

    // Family 2 first: for t = 1 the expansion route is the only one, and
    // when both families apply it carries the stronger conclusion.
    let s = weight_string(&nf.x, &nf.y);
    let family2 = expansion_certificate(&s);
    let family3 = family3_symmetry(&PolygonLabelling::new(nf.x.clone(), nf.y.clone()));

    if let Some(moves) = family2 {
        if family3.is_some() {
            annotations.push("family3".into());
        }
        let (a, _braid) = family2_braid_from_expansions(&moves);
        let crosscheck = crosscheck_family2(&a, &s, limits);
        return Verdict::Family2 {
            certificate: Family2Certificate {
                normal_form: nf,
                weight_string: s.canonical(),
                expansion_moves: moves,
                a_word: a.to_compact(),
                crosscheck,
            },
            annotations,
            paper_refs: vec!["symmetric-union-expansion".into()],
        };
    }
    failed.push("family2: weight string is not an iterated (-2)-expansion of (-2,-2,-5)".into());

    if let Some(symmetry) = family3 {
        let amphichirality = amphichirality_witness(&nf, &symmetry, limits);
        return Verdict::Family3 {
            certificate: Family3Certificate {
                normal_form: nf,
                symmetry,
                amphichirality,
            },
            annotations,
            paper_refs: vec!["polygon-symmetry-amphichiral".into()],
        };
    }
    failed.push("family3: no polygon symmetry matches the labelling".into());

    Verdict::Obstructed {
        normal_form: Some(nf),
        failed_checks: failed,
        annotations,
        paper_refs: vec!["lattice-embedding-obstruction".into()],
    }
}

/// A named braid word for batch runs.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct KnotRecord {
    pub name: String,
    pub braid: String,
}

/// Per-record batch outcome; parse failures stay inline and never abort
/// the batch.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(untagged)]
pub enum BatchOutcome {
    Verdict(Verdict),
    Error { error: String },
}

/// Classifies every record, preserving input order. Records are
/// independent, so they may be processed in parallel; the output order
/// and content do not depend on scheduling.
pub fn batch_classify(records: &[KnotRecord], limits: &SearchLimits) -> Vec<(String, BatchOutcome)> {
    records
        .par_iter()
        .map(|record| {
            let outcome = match BraidWord::parse(&record.braid) {
                Ok(word) => BatchOutcome::Verdict(classify_knot(&word, limits)),
                Err(err) => BatchOutcome::Error {
                    error: parse_error_string(&err),
                },
            };
            (record.name.clone(), outcome)
        })
        .collect()
}

fn parse_error_string(err: &ParseError) -> String {
    err.to_string()
}

/// Convenience wrapper mapping normal-form failures into inconclusive
/// verdicts for callers that need a verdict for arbitrary words.
pub fn normal_form_or_verdict(
    w: &BraidWord,
    limits: &SearchLimits,
) -> Result<NormalForm3, Box<Verdict>> {
    match to_normal_form(w, limits) {
        Ok(nf) => Ok(nf),
        Err(NormalFormFailure::ExponentSum { e }) => Err(Box::new(Verdict::Obstructed {
            normal_form: None,
            failed_checks: vec![format!("exponent sum {e} admits no finite-order normal form")],
            annotations: Vec::new(),
            paper_refs: vec!["slice-bennequin-bound".into()],
        })),
        Err(err) => Err(Box::new(Verdict::Inconclusive {
            reason: err.to_string(),
        })),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classify(text: &str) -> Verdict {
        classify_knot(&BraidWord::parse(text).unwrap(), &SearchLimits::default())
    }

    #[test]
    fn worked_example_family1() {
        let verdict = classify("abbaaaaBBBBB");
        match &verdict {
            Verdict::Family1 { certificate, .. } => {
                assert_eq!(certificate.normal_form.x, vec![3]);
                assert_eq!(certificate.normal_form.y, vec![7]);
                assert_eq!(
                    certificate.witness.demoted_string,
                    NatString(vec![5, 1, 2, 2, 2, 2, 1])
                );
            }
            other => panic!("expected family1, got {}", other.family_tag()),
        }
    }

    #[test]
    fn figure_eight_is_family3_rotation() {
        let verdict = classify("aBaB");
        match &verdict {
            Verdict::Family3 { certificate, .. } => {
                assert!(matches!(
                    certificate.symmetry.kind,
                    SymmetryKind::Rotation(_)
                ));
                assert!(certificate.amphichirality.conjugacy_checked);
                assert_eq!(
                    certificate.amphichirality.direction,
                    MirrorDirection::MirrorIsotopicToKnot
                );
            }
            other => panic!("expected family3, got {}", other.family_tag()),
        }
    }

    #[test]
    fn eight_nine_is_family2_with_family3_annotation() {
        let verdict = classify("aaaBaBBB");
        match &verdict {
            Verdict::Family2 { annotations, certificate, .. } => {
                assert!(annotations.iter().any(|a| a == "family3"));
                assert!(certificate.crosscheck);
            }
            other => panic!("expected family2, got {}", other.family_tag()),
        }
    }

    #[test]
    fn obstructed_example() {
        let verdict = classify("aBBaaaBB");
        match &verdict {
            Verdict::Obstructed { failed_checks, .. } => {
                assert_eq!(failed_checks.len(), 3);
            }
            other => panic!("expected obstructed, got {}", other.family_tag()),
        }
    }

    #[test]
    fn links_are_rejected() {
        assert!(matches!(classify("aaBB"), Verdict::NotAKnot { components: 3 }));
    }

    #[test]
    fn unknot_word_is_family3() {
        let verdict = classify("aB");
        match &verdict {
            Verdict::Family3 { annotations, .. } => {
                assert!(annotations.iter().any(|a| a == "unknot"));
            }
            other => panic!("expected family3, got {}", other.family_tag()),
        }
    }

    #[test]
    fn high_exponent_sum_is_obstructed() {
        assert!(matches!(classify("aaa"), Verdict::Obstructed { .. }));
    }

    #[test]
    fn batch_isolates_failures() {
        let records = vec![
            KnotRecord {
                name: "good".into(),
                braid: "aBaB".into(),
            },
            KnotRecord {
                name: "bad".into(),
                braid: "s3".into(),
            },
        ];
        let out = batch_classify(&records, &SearchLimits::default());
        assert_eq!(out.len(), 2);
        assert!(matches!(out[0].1, BatchOutcome::Verdict(_)));
        assert!(matches!(out[1].1, BatchOutcome::Error { .. }));
    }

    #[test]
    fn mirror_pair_gets_same_family() {
        for text in ["abbaaaaBBBBB", "aBaB", "aaaBaBBB"] {
            let word = BraidWord::parse(text).unwrap();
            let direct = classify_knot(&word, &SearchLimits::default());
            let mirrored = classify_knot(&word.mirror(), &SearchLimits::default());
            assert_eq!(direct.family_tag(), mirrored.family_tag(), "word {text}");
        }
    }
}
