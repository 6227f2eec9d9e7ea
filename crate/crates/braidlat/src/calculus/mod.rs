//! The two string calculi: blowups of non-negative integer strings with
//! the quasipositivity/ribbon criterion, and (−2)-expansions of negative
//! strings with the symmetric-union certificate, plus the polygon
//! labelling symmetry test.

mod blowup;
mod expansion;
mod polygon;

pub use blowup::{
    blowdown_chain, blowup, c_string, family1_check, quasipositivity_witness, BlowupChain,
    BlowupError, BlowupMove, Family1Witness, NatString, WitnessOutcome,
};
pub use expansion::{
    expansion_certificate, minus2_expand, weight_string, CircularString, ExpansionError,
    ExpansionMove,
};
pub use polygon::{family3_symmetry, PolygonLabelling, SymmetryKind, SymmetryWitness};
