//! The three reduction pipelines. Each one checks its lemma hypotheses,
//! performs the prescribed moves with every proof-step invariant asserted,
//! and returns a canonical, replayable trace. Choice order is always
//! lowest vector index first, so traces are reproducible.

use super::{
    adapted_basis, classify_set, coefficient_profile, has_finite_odd_index, precondition,
    step_invariant, AdaptedBasis, CoefficientProfile, Flavor, PipelineError, VectorSet,
};
use crate::calculus::{
    blowdown_chain, expansion_certificate, BlowupChain, CircularString, ExpansionMove, NatString,
};
use crate::embed::DiagonalVector;
use serde::Serialize;
use std::collections::BTreeMap;

/// One reduction move; `indices` are stable slot ids of the vectors
/// involved, in the role order documented per kind.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct MoveRecord {
    pub kind: &'static str,
    pub indices: Vec<usize>,
    pub dropped_axis: Option<usize>,
}

/// Mutable working copy: slots keep their ids as vectors are replaced or
/// removed, axes deactivate as the ambient rank shrinks.
struct Working {
    slots: Vec<Option<DiagonalVector>>,
    signs: Vec<i8>,
    active_axes: Vec<bool>,
}

impl Working {
    fn new(vs: &VectorSet, basis: &AdaptedBasis) -> Self {
        Working {
            slots: vs.vectors.iter().cloned().map(Some).collect(),
            signs: basis.signs.clone(),
            active_axes: vec![true; vs.rank],
        }
    }

    fn live_ids(&self) -> Vec<usize> {
        (0..self.slots.len())
            .filter(|&i| self.slots[i].is_some())
            .collect()
    }

    fn vector(&self, id: usize) -> &DiagonalVector {
        self.slots[id].as_ref().expect("live slot")
    }

    fn active_axis_list(&self) -> Vec<usize> {
        (0..self.active_axes.len())
            .filter(|&a| self.active_axes[a])
            .collect()
    }

    /// Compresses live vectors onto active axes, returning the set, the
    /// id of each row and the global axis of each column.
    fn compress(&self) -> (VectorSet, Vec<usize>, Vec<usize>, AdaptedBasis) {
        let ids = self.live_ids();
        let axes = self.active_axis_list();
        let vectors: Vec<DiagonalVector> = ids
            .iter()
            .map(|&id| DiagonalVector(axes.iter().map(|&a| self.vector(id).0[a]).collect()))
            .collect();
        let signs: Vec<i8> = axes.iter().map(|&a| self.signs[a]).collect();
        (
            VectorSet::new(vectors, axes.len()),
            ids,
            axes,
            AdaptedBasis { signs },
        )
    }

    /// Classification plus adaptedness and profile checks on the current
    /// state; used as the per-step invariant bundle.
    fn checked_state(
        &self,
        step: &'static str,
    ) -> Result<(VectorSet, Vec<usize>, Vec<usize>, AdaptedBasis, CoefficientProfile), PipelineError>
    {
        let (vs, ids, axes, basis) = self.compress();
        if vs.len() != vs.rank {
            return Err(step_invariant(
                step,
                format!("{} live vectors over {} active axes", vs.len(), vs.rank),
            ));
        }
        let wu = vs.wu();
        for (col, &sign) in basis.signs.iter().enumerate() {
            if wu.0[col] != -(sign as i64) {
                return Err(step_invariant(
                    step,
                    format!(
                        "basis no longer adapted: wu coordinate {} on axis {}",
                        wu.0[col], axes[col]
                    ),
                ));
            }
        }
        let profile = coefficient_profile(&vs, &basis)
            .map_err(|e| step_invariant(step, format!("coefficient profile failed: {e}")))?;
        Ok((vs, ids, axes, basis, profile))
    }
}

/// Cyclic order of each component: start at the least index, walk towards
/// the lesser-indexed neighbour first.
fn cycle_order(vs: &VectorSet, component: &[usize]) -> Vec<usize> {
    if component.len() < 3 {
        return component.to_vec();
    }
    let neighbours = |i: usize| -> Vec<usize> {
        component
            .iter()
            .copied()
            .filter(|&j| j != i && vs.pairing(i, j) != 0)
            .collect()
    };
    let start = *component.iter().min().unwrap();
    let first = neighbours(start).into_iter().min().unwrap();
    let mut order = vec![start, first];
    while order.len() < component.len() {
        let cur = *order.last().unwrap();
        let prev = order[order.len() - 2];
        let next = neighbours(cur)
            .into_iter()
            .find(|&j| j != prev)
            .expect("circular component walk");
        order.push(next);
    }
    order
}

fn norms_along(vs: &VectorSet, order: &[usize]) -> Vec<i64> {
    order.iter().map(|&i| vs.vectors[i].norm()).collect()
}

// ---------------------------------------------------------------------
// Semipositive pipeline
// ---------------------------------------------------------------------

/// Outcome for one connected component of a semipositive reduction: the
/// dominated blowup string read off after the promotion step, with its
/// witnessing chain.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ComponentReduction {
    /// Slot ids in cycle order.
    pub component: Vec<usize>,
    /// Original self-intersection string (negated), aligned with the ids.
    pub c_string: NatString,
    /// The dominated blowup string with exactly two 1's.
    pub s_string: NatString,
    pub chain: BlowupChain,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SemipositiveReduction {
    pub trace: Vec<MoveRecord>,
    pub components: Vec<ComponentReduction>,
}

/// Checks the four hypotheses of the semipositive proposition.
fn check_semipositive_hypotheses(vs: &VectorSet) -> Result<Vec<Vec<usize>>, PipelineError> {
    let report = classify_set(vs);
    if !report.is_circular {
        return Err(precondition("circular", "input set is not circular"));
    }
    if report.flavor != Flavor::Semipositive {
        return Err(precondition(
            "flavor",
            format!("expected semipositive, found {:?}", report.flavor),
        ));
    }
    if !has_finite_odd_index(vs) {
        return Err(precondition("odd-index", "span is not of finite odd index"));
    }
    if report.wu_norm != -(vs.rank as i64) {
        return Err(precondition(
            "wu-norm",
            format!("wu norm {} instead of -{}", report.wu_norm, vs.rank),
        ));
    }
    for (ci, comp) in report.components.iter().enumerate() {
        if comp.iter().any(|&i| vs.vectors[i].norm() > -2) {
            return Err(precondition(
                "square-bound",
                format!("component {ci} contains a vector of square > -2"),
            ));
        }
        let excess: i64 = comp.iter().map(|&i| vs.vectors[i].norm() + 2).sum();
        let expected = 4 - comp.len() as i64;
        if excess != expected || expected >= -1 {
            return Err(precondition(
                "component-excess",
                format!(
                    "component {ci}: sum(v·v+2) = {excess}, expected {expected} < -1"
                ),
            ));
        }
    }
    Ok(report.components)
}

/// Runs the semipositive reduction: promote the unique hitter of every
/// basis vector outside the assignment image, then contract (−1)-vectors
/// until every component has three vectors, all of square −1. The
/// promoted set per component is a blowup string dominated by the
/// original self-intersection string.
pub fn reduce_semipositive(vs: &VectorSet) -> Result<SemipositiveReduction, PipelineError> {
    let components = check_semipositive_hypotheses(vs)?;
    let k = components.len();
    let basis = adapted_basis(vs)?;
    let mut work = Working::new(vs, &basis);
    let mut trace = Vec::new();

    let cycle_orders: Vec<Vec<usize>> = components
        .iter()
        .map(|comp| cycle_order(vs, comp))
        .collect();
    let c_strings: Vec<Vec<i64>> = cycle_orders
        .iter()
        .map(|order| norms_along(vs, order).iter().map(|&n| -n).collect())
        .collect();

    // Promotion step: every axis outside the image of the assignment has
    // a unique hitter of square −2; add the basis vector to it.
    let (cvs, ids, axes, cbasis, profile) = work.checked_state("promotion-entry")?;
    let image: Vec<usize> = profile.assignment.iter().map(|&(_, a)| axes[a]).collect();
    let mut promoted: Vec<usize> = Vec::new();
    for (col, &axis) in axes.iter().enumerate() {
        if image.contains(&axis) {
            continue;
        }
        let hitters: Vec<usize> = (0..cvs.len())
            .filter(|&r| cvs.vectors[r].0[col] != 0)
            .collect();
        if hitters.len() != 1 {
            return Err(step_invariant(
                "unique-hitter",
                format!("axis {axis} is hit by {} vectors", hitters.len()),
            ));
        }
        let row = hitters[0];
        let pairing = -(cbasis.signs[col] as i64) * cvs.vectors[row].0[col];
        if pairing != 1 {
            return Err(step_invariant(
                "unique-hitter",
                format!("axis {axis}: hitter pairs to {pairing}, expected 1"),
            ));
        }
        if cvs.vectors[row].norm() != -2 {
            return Err(step_invariant(
                "promoted-square",
                format!("hitter of axis {axis} has square {}", cvs.vectors[row].norm()),
            ));
        }
        let id = ids[row];
        if promoted.contains(&id) {
            return Err(step_invariant(
                "distinct-promotions",
                format!("vector {id} is the unique hitter of two axes"),
            ));
        }
        promoted.push(id);
        let sign = work.signs[axis] as i64;
        let slot = work.slots[id].as_mut().unwrap();
        slot.0[axis] += sign;
        work.active_axes[axis] = false;
        trace.push(MoveRecord {
            kind: "promote",
            indices: vec![id],
            dropped_axis: Some(axis),
        });
    }
    if promoted.len() != 2 * k {
        return Err(step_invariant(
            "promotion-count",
            format!("promoted {} vectors, expected 2k = {}", promoted.len(), 2 * k),
        ));
    }

    // Snapshot: the promoted set carries the blowup strings.
    let s_strings: Vec<Vec<i64>> = cycle_orders
        .iter()
        .map(|order| order.iter().map(|&id| -work.vector(id).norm()).collect())
        .collect();

    // Contraction step: remove (−1)-vectors from components of size ≥ 4.
    loop {
        let (cvs, ids, axes, _cbasis, _) = work.checked_state("minus1-contraction")?;
        let report = classify_set(&cvs);
        if !report.is_circular || report.flavor != Flavor::Semipositive {
            return Err(step_invariant(
                "minus1-contraction",
                "set is no longer semipositive circular",
            ));
        }
        let mut candidate: Option<(usize, Vec<usize>)> = None;
        for comp in &report.components {
            if comp.len() < 4 {
                continue;
            }
            for &r in comp {
                if cvs.vectors[r].norm() == -1
                    && candidate.as_ref().is_none_or(|(best, _)| ids[r] < ids[*best])
                {
                    candidate = Some((r, comp.clone()));
                }
            }
        }
        let Some((row, comp)) = candidate else { break };
        let neighbours: Vec<usize> = comp
            .iter()
            .copied()
            .filter(|&j| j != row && cvs.pairing(row, j) != 0)
            .collect();
        if neighbours.len() != 2 {
            return Err(step_invariant(
                "minus1-contraction",
                format!("(-1)-vector {} has {} neighbours", ids[row], neighbours.len()),
            ));
        }
        // The (−1)-vector spans one axis; that axis leaves the basis.
        let u = work.vector(ids[row]).clone();
        let axis = {
            let nonzero: Vec<usize> = (0..u.0.len()).filter(|&a| u.0[a] != 0).collect();
            if nonzero.len() != 1 || u.0[nonzero[0]].abs() != 1 {
                return Err(step_invariant(
                    "minus1-contraction",
                    format!("(-1)-vector {} is not a signed basis vector", ids[row]),
                ));
            }
            nonzero[0]
        };
        let mut updated = Vec::new();
        for &nb in &neighbours {
            let id = ids[nb];
            let coefficient = cvs.pairing(row, nb);
            let replaced = work.vector(id).add(&u.scale(coefficient));
            work.slots[id] = Some(replaced);
            updated.push(id);
        }
        let removed = ids[row];
        work.slots[removed] = None;
        work.active_axes[axis] = false;
        let _ = axes;
        trace.push(MoveRecord {
            kind: "minus1-contraction",
            indices: vec![removed, updated[0], updated[1]],
            dropped_axis: Some(axis),
        });
    }

    // Endgame: every component has three vectors, all of square −1.
    let (cvs, ids, _, _, _) = work.checked_state("endgame")?;
    let report = classify_set(&cvs);
    for comp in &report.components {
        if comp.len() != 3 || comp.iter().any(|&r| cvs.vectors[r].norm() != -1) {
            let ids_here: Vec<usize> = comp.iter().map(|&r| ids[r]).collect();
            return Err(step_invariant(
                "endgame",
                format!("terminal component {ids_here:?} is not three (-1)-vectors"),
            ));
        }
    }

    // Assemble and check the per-component blowup data.
    let mut out_components = Vec::new();
    for (ci, order) in cycle_orders.iter().enumerate() {
        let c = &c_strings[ci];
        let s = &s_strings[ci];
        let ones = s.iter().filter(|&&v| v == 1).count();
        if ones != 2 {
            return Err(step_invariant(
                "two-ones",
                format!("component {ci}: blowup string has {ones} ones"),
            ));
        }
        for (pos, (&ci_v, &si_v)) in c.iter().zip(s.iter()).enumerate() {
            let consistent = ci_v >= si_v && ((ci_v == si_v + 1) == (si_v == 1));
            if !consistent {
                return Err(step_invariant(
                    "domination",
                    format!("component {ci} position {pos}: c = {ci_v}, s = {si_v}"),
                ));
            }
        }
        let s_string = NatString(s.iter().map(|&v| v as u64).collect());
        let chain = blowdown_chain(&s_string).ok_or_else(|| {
            step_invariant(
                "blowdown",
                format!("component {ci}: {s_string} is not an iterated blowup"),
            )
        })?;
        out_components.push(ComponentReduction {
            component: order.clone(),
            c_string: NatString(c.iter().map(|&v| v as u64).collect()),
            s_string,
            chain,
        });
    }
    Ok(SemipositiveReduction {
        trace,
        components: out_components,
    })
}

// ---------------------------------------------------------------------
// Positive pipeline, non-injective assignment
// ---------------------------------------------------------------------

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct NoninjectiveReduction {
    pub trace: Vec<MoveRecord>,
    /// Slot ids of the component that reached size three.
    pub terminal_component: Vec<usize>,
    /// Original weight string of that component.
    pub weight_string: CircularString,
    /// Moves reconstructing it from (−2,−2,−5).
    pub expansion_moves: Vec<ExpansionMove>,
}

fn check_positive_hypotheses(
    vs: &VectorSet,
    want_injective: bool,
) -> Result<Vec<Vec<usize>>, PipelineError> {
    let report = classify_set(vs);
    if !report.is_circular {
        return Err(precondition("circular", "input set is not circular"));
    }
    if report.flavor != Flavor::Positive {
        return Err(precondition(
            "flavor",
            format!("expected positive, found {:?}", report.flavor),
        ));
    }
    if !has_finite_odd_index(vs) {
        return Err(precondition("odd-index", "span is not of finite odd index"));
    }
    if report.wu_norm != -(vs.rank as i64) {
        return Err(precondition(
            "wu-norm",
            format!("wu norm {} instead of -{}", report.wu_norm, vs.rank),
        ));
    }
    for (ci, comp) in report.components.iter().enumerate() {
        if comp.iter().any(|&i| vs.vectors[i].norm() > -2) {
            return Err(precondition(
                "square-bound",
                format!("component {ci} contains a vector of square > -2"),
            ));
        }
        let excess: i64 = comp.iter().map(|&i| vs.vectors[i].norm() + 2).sum();
        if excess != -(comp.len() as i64) {
            return Err(precondition(
                "component-excess",
                format!(
                    "component {ci}: sum(v·v+2) = {excess}, expected -{}",
                    comp.len()
                ),
            ));
        }
    }
    let basis = adapted_basis(vs)?;
    let profile = coefficient_profile(vs, &basis)?;
    if profile.w_subset.len() != vs.len() {
        return Err(precondition(
            "w-subset",
            "positive sets must have the full set as their coefficient subset",
        ));
    }
    if profile.injective != want_injective {
        return Err(precondition(
            "injectivity",
            format!(
                "assignment injectivity is {}, pipeline expects {}",
                profile.injective, want_injective
            ),
        ));
    }
    Ok(report.components)
}

/// The terminal shape of the non-injective pipeline: two unit-support
/// pairs and one vector of square −5 supported with coefficients 2 and 1.
fn assert_255_component(
    vs: &VectorSet,
    comp: &[usize],
    ids: &[usize],
) -> Result<(), PipelineError> {
    let detail = || {
        let slot_ids: Vec<usize> = comp.iter().map(|&r| ids[r]).collect();
        format!("terminal component {slot_ids:?}")
    };
    let mut norms: Vec<i64> = comp.iter().map(|&r| vs.vectors[r].norm()).collect();
    norms.sort_unstable();
    if norms != vec![-5, -2, -2] {
        return Err(step_invariant(
            "terminal-255",
            format!("{}: squares {norms:?}", detail()),
        ));
    }
    let heavy = *comp
        .iter()
        .find(|&&r| vs.vectors[r].norm() == -5)
        .expect("checked above");
    let heavy_support: Vec<(usize, i64)> = vs.vectors[heavy]
        .0
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c != 0)
        .map(|(a, &c)| (a, c.abs()))
        .collect();
    let mut magnitudes: Vec<i64> = heavy_support.iter().map(|&(_, m)| m).collect();
    magnitudes.sort_unstable();
    if magnitudes != vec![1, 2] {
        return Err(step_invariant(
            "terminal-255",
            format!("{}: heavy vector support magnitudes {magnitudes:?}", detail()),
        ));
    }
    for &r in comp {
        if r == heavy {
            continue;
        }
        let support: Vec<i64> = vs.vectors[r].0.iter().filter(|&&c| c != 0).map(|&c| c.abs()).collect();
        if support != vec![1, 1] {
            return Err(step_invariant(
                "terminal-255",
                format!("{}: light vector support {support:?}", detail()),
            ));
        }
    }
    Ok(())
}

/// Runs the contraction pipeline for positive sets with a non-injective
/// assignment, stopping when a component reaches three vectors and
/// certifying its weight string as an iterated (−2)-expansion of
/// (−2,−2,−5).
pub fn reduce_positive_noninjective(
    vs: &VectorSet,
) -> Result<NoninjectiveReduction, PipelineError> {
    let components = check_positive_hypotheses(vs, false)?;
    let basis = adapted_basis(vs)?;
    let mut work = Working::new(vs, &basis);
    let mut trace = Vec::new();

    let original_strings: BTreeMap<usize, (Vec<usize>, Vec<i64>)> = components
        .iter()
        .map(|comp| {
            let order = cycle_order(vs, comp);
            let weights = norms_along(vs, &order);
            (order[0], (order, weights))
        })
        .collect();

    loop {
        let (cvs, ids, axes, cbasis, profile) = work.checked_state("contraction")?;
        let report = classify_set(&cvs);
        if !report.is_circular || report.flavor != Flavor::Positive {
            return Err(step_invariant(
                "contraction",
                "set is no longer positive circular",
            ));
        }
        if let Some(comp) = report.components.iter().find(|c| c.len() == 3) {
            assert_255_component(&cvs, comp, &ids)?;
            let terminal_ids: Vec<usize> = comp.iter().map(|&r| ids[r]).collect();
            // The terminal component descends from exactly one original
            // component; its slot ids never change.
            let origin = original_strings
                .values()
                .find(|(order, _)| terminal_ids.iter().all(|id| order.contains(id)))
                .ok_or_else(|| {
                    step_invariant("terminal-origin", "terminal ids not from one component")
                })?;
            let weight = CircularString(origin.1.clone());
            let moves = expansion_certificate(&weight).ok_or_else(|| {
                step_invariant(
                    "expansion-certificate",
                    format!("{weight} is not an iterated (-2)-expansion of (-2,-2,-5)"),
                )
            })?;
            return Ok(NoninjectiveReduction {
                trace,
                terminal_component: terminal_ids,
                weight_string: weight,
                expansion_moves: moves,
            });
        }
        if profile.injective {
            return Err(step_invariant(
                "contraction",
                "assignment became injective during contraction",
            ));
        }
        // Candidate contractions: axes outside the image with their unique
        // hitters; lowest hitter id first.
        let image: Vec<usize> = profile.assignment.iter().map(|&(_, a)| a).collect();
        let mut candidates: Vec<(usize, usize, usize)> = Vec::new(); // (u id, row, col)
        for col in 0..axes.len() {
            if image.contains(&col) {
                continue;
            }
            let hitters: Vec<usize> = (0..cvs.len())
                .filter(|&r| cvs.vectors[r].0[col] != 0)
                .collect();
            if hitters.len() != 1 {
                return Err(step_invariant(
                    "unique-hitter",
                    format!("axis {} hit by {} vectors", axes[col], hitters.len()),
                ));
            }
            let row = hitters[0];
            let pairing = -(cbasis.signs[col] as i64) * cvs.vectors[row].0[col];
            if pairing != 1 || cvs.vectors[row].norm() != -2 {
                return Err(step_invariant(
                    "unique-hitter",
                    format!(
                        "axis {}: hitter has pairing {pairing} and square {}",
                        axes[col],
                        cvs.vectors[row].norm()
                    ),
                ));
            }
            candidates.push((ids[row], row, col));
        }
        candidates.sort_unstable();
        let Some(&(u_id, u_row, col)) = candidates.first() else {
            return Err(step_invariant(
                "contraction",
                "no contraction available although a component exceeds three vectors",
            ));
        };
        // e_u: the axis where u pairs to −1 (u = e_u − e).
        let e_u_col = (0..axes.len())
            .find(|&a| -(cbasis.signs[a] as i64) * cvs.vectors[u_row].0[a] == -1)
            .ok_or_else(|| {
                step_invariant("contraction", format!("vector {u_id} has no -1 pairing axis"))
            })?;
        let neighbours: Vec<usize> = (0..cvs.len())
            .filter(|&r| r != u_row && cvs.pairing(u_row, r) != 0)
            .collect();
        if neighbours.len() != 2 {
            return Err(step_invariant(
                "contraction",
                format!("vector {u_id} has {} neighbours", neighbours.len()),
            ));
        }
        // v: a neighbour hitting at least three basis vectors.
        let mut v_row: Option<usize> = None;
        for &nb in &neighbours {
            let support = cvs.vectors[nb].0.iter().filter(|&&c| c != 0).count();
            if support >= 3 && v_row.is_none_or(|best| ids[nb] < ids[best]) {
                v_row = Some(nb);
            }
        }
        let v_row = v_row.ok_or_else(|| {
            step_invariant(
                "wide-neighbour",
                format!("no neighbour of {u_id} hits three basis vectors"),
            )
        })?;
        if -(cbasis.signs[e_u_col] as i64) * cvs.vectors[v_row].0[e_u_col] != 1 {
            return Err(step_invariant(
                "wide-neighbour",
                format!("neighbour of {u_id} does not hit its -1 axis"),
            ));
        }
        let v_id = ids[v_row];
        let e_u_axis = axes[e_u_col];
        let dropped_axis = axes[col];
        let sign = work.signs[e_u_axis] as i64;
        let replaced = {
            let v_vec = work.vector(v_id);
            let mut coords = v_vec.0.clone();
            coords[e_u_axis] += sign;
            DiagonalVector(coords)
        };
        work.slots[v_id] = Some(replaced);
        work.slots[u_id] = None;
        work.active_axes[dropped_axis] = false;
        trace.push(MoveRecord {
            kind: "contraction",
            indices: vec![u_id, v_id],
            dropped_axis: Some(dropped_axis),
        });
    }
}

// ---------------------------------------------------------------------
// Positive pipeline, injective assignment
// ---------------------------------------------------------------------

/// Recognized irreducible-component shapes of the terminal set.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub enum TerminalStructure {
    /// Two three-vector components with squares (−2,−3,−4) across six
    /// shared axes.
    T2Pair {
        axes: Vec<usize>,
        components: [Vec<usize>; 2],
    },
    /// Two interleaved cycles of norm −3 vectors over 2m axes.
    PairedCycles {
        m: usize,
        axes: Vec<usize>,
        components: [Vec<usize>; 2],
    },
    /// A single odd cycle of 2m+1 norm −3 vectors over 2m+1 axes; the
    /// label relation is yᵢ = x_{i+m+1}.
    OddCycle {
        m: usize,
        axes: Vec<usize>,
        cycle: Vec<usize>,
    },
    /// Two three-vector cycles interleaved over six axes.
    TripleA {
        axes: Vec<usize>,
        components: [Vec<usize>; 2],
    },
    /// Two three-vector components over eight axes containing a
    /// triple-overlap pair each.
    TripleB {
        axes: Vec<usize>,
        components: [Vec<usize>; 2],
    },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct InjectiveReduction {
    pub trace: Vec<MoveRecord>,
    pub structures: Vec<TerminalStructure>,
    /// Weight strings of the original components, one per component, in
    /// cycle order.
    pub weight_strings: Vec<CircularString>,
    /// Weight strings re-derived by replaying the trace backwards from
    /// the terminal state; must match `weight_strings` entrywise.
    pub reconstructed: Vec<CircularString>,
}

/// Profile row helpers for the terminal recognizers.
struct Rows {
    /// Pairing of each vector with each adapted basis vector.
    profile: Vec<Vec<i64>>,
}

impl Rows {
    fn eneg(&self, r: usize) -> Option<usize> {
        let hits: Vec<usize> = (0..self.profile[r].len())
            .filter(|&a| self.profile[r][a] == -1)
            .collect();
        if hits.len() == 1 {
            Some(hits[0])
        } else {
            None
        }
    }

    fn plus_axes(&self, r: usize) -> Vec<usize> {
        (0..self.profile[r].len())
            .filter(|&a| self.profile[r][a] == 1)
            .collect()
    }

    fn support(&self, r: usize) -> Vec<usize> {
        (0..self.profile[r].len())
            .filter(|&a| self.profile[r][a] != 0)
            .collect()
    }
}

/// Runs the (−2)-contraction pipeline for positive sets with an injective
/// assignment and recognizes the terminal irreducible components.
pub fn reduce_positive_injective(vs: &VectorSet) -> Result<InjectiveReduction, PipelineError> {
    let components = check_positive_hypotheses(vs, true)?;
    let basis = adapted_basis(vs)?;
    let mut work = Working::new(vs, &basis);
    let mut trace = Vec::new();

    let cycle_orders: Vec<Vec<usize>> = components
        .iter()
        .map(|comp| cycle_order(vs, comp))
        .collect();
    let weight_strings: Vec<CircularString> = cycle_orders
        .iter()
        .map(|order| CircularString(norms_along(vs, order)))
        .collect();

    // Weight bookkeeping: cyclic id lists with current weights; each
    // contraction must act on them exactly like an inverse expansion.
    let mut string_state: Vec<Vec<(usize, i64)>> = cycle_orders
        .iter()
        .map(|order| order.iter().map(|&id| (id, vs.vectors[id].norm())).collect())
        .collect();

    loop {
        let (cvs, ids, axes, cbasis, profile) = work.checked_state("minus2-contraction")?;
        let report = classify_set(&cvs);
        if !report.is_circular || report.flavor != Flavor::Positive {
            return Err(step_invariant(
                "minus2-contraction",
                "set is no longer positive circular",
            ));
        }
        if !profile.injective || profile.w_subset.len() != cvs.len() {
            return Err(step_invariant(
                "minus2-contraction",
                "assignment stopped being an injective map on the whole set",
            ));
        }
        // Lemma conclusions as running invariants: v·e_v = −1 and every
        // axis is hit by exactly three vectors with pairings (−1,1,1).
        let rows = Rows {
            profile: profile.table.clone(),
        };
        for r in 0..cvs.len() {
            if rows.eneg(r).is_none() {
                return Err(step_invariant(
                    "own-axis",
                    format!("vector {} lacks a unique -1 pairing axis", ids[r]),
                ));
            }
        }
        for col in 0..axes.len() {
            let mut neg = 0;
            let mut pos = 0;
            for r in 0..cvs.len() {
                match profile.table[r][col] {
                    -1 => neg += 1,
                    1 => pos += 1,
                    0 => {}
                    other => {
                        return Err(step_invariant(
                            "axis-hits",
                            format!("axis {} has pairing {other}", axes[col]),
                        ));
                    }
                }
            }
            if neg != 1 || pos != 2 {
                return Err(step_invariant(
                    "axis-hits",
                    format!("axis {} hit pattern ({neg} neg, {pos} pos)", axes[col]),
                ));
            }
        }

        // Find the lowest-id (−2)-vector inside a component of size > 3.
        let mut candidate: Option<usize> = None;
        for comp in &report.components {
            if comp.len() <= 3 {
                continue;
            }
            for &r in comp {
                if cvs.vectors[r].norm() == -2
                    && candidate.is_none_or(|best| ids[r] < ids[best])
                {
                    candidate = Some(r);
                }
            }
        }
        let Some(u_row) = candidate else { break };
        let u_id = ids[u_row];
        let e_u_col = rows.eneg(u_row).expect("checked above");
        let u_support = rows.support(u_row);
        if u_support.len() != 2 {
            return Err(step_invariant(
                "minus2-shape",
                format!("(-2)-vector {u_id} has support {}", u_support.len()),
            ));
        }
        let f_col = *u_support.iter().find(|&&a| a != e_u_col).unwrap();
        let neighbours: Vec<usize> = (0..cvs.len())
            .filter(|&r| r != u_row && cvs.pairing(u_row, r) != 0)
            .collect();
        if neighbours.len() != 2 {
            return Err(step_invariant(
                "minus2-shape",
                format!("vector {u_id} has {} neighbours", neighbours.len()),
            ));
        }
        let v_rows: Vec<usize> = neighbours
            .iter()
            .copied()
            .filter(|&r| profile.table[r][e_u_col] == 1)
            .collect();
        if v_rows.len() != 1 {
            return Err(step_invariant(
                "neighbour-split",
                format!("{} neighbours of {u_id} hit its own axis", v_rows.len()),
            ));
        }
        let v_row = v_rows[0];
        let w_row = *neighbours.iter().find(|&&r| r != v_row).unwrap();
        if profile.table[v_row][f_col] != 0
            || profile.table[w_row][f_col] != -1
            || profile.table[w_row][e_u_col] != 0
        {
            return Err(step_invariant(
                "neighbour-split",
                format!("neighbours of {u_id} do not match the (-2)-contraction shape"),
            ));
        }
        let z_rows: Vec<usize> = (0..cvs.len())
            .filter(|&r| r != u_row && r != v_row && profile.table[r][e_u_col] == 1)
            .collect();
        if z_rows.len() != 1 {
            return Err(step_invariant(
                "third-hitter",
                format!("axis of {u_id} lacks its third hitter"),
            ));
        }
        let z_row = z_rows[0];
        if cvs.pairing(u_row, z_row) != 0
            || profile.table[z_row][f_col] != 1
            || cvs.vectors[z_row].norm() > -4
        {
            return Err(step_invariant(
                "third-hitter",
                format!("third hitter of {u_id} violates the lemma shape"),
            ));
        }
        let _ = f_col;

        let v_id = ids[v_row];
        let z_id = ids[z_row];
        let e_u_axis = axes[e_u_col];
        let minus_twos_before = (0..cvs.len())
            .filter(|&r| cvs.vectors[r].norm() == -2)
            .count();

        let u_vec = work.vector(u_id).clone();
        let v_new = work.vector(v_id).add(&u_vec);
        let z_new = {
            let mut coords = work.vector(z_id).0.clone();
            coords[e_u_axis] += work.signs[e_u_axis] as i64;
            DiagonalVector(coords)
        };
        if v_new.norm() != work.vector(v_id).norm() || z_new.norm() != work.vector(z_id).norm() + 1
        {
            return Err(step_invariant(
                "norm-update",
                format!("contraction at {u_id} changed squares unexpectedly"),
            ));
        }
        work.slots[v_id] = Some(v_new);
        work.slots[z_id] = Some(z_new);
        work.slots[u_id] = None;
        work.active_axes[e_u_axis] = false;

        // No new (−2)-vector may appear.
        let (after, _, _, _, _) = work.checked_state("no-new-minus2")?;
        let minus_twos_after = (0..after.len())
            .filter(|&r| after.vectors[r].norm() == -2)
            .count();
        if minus_twos_after != minus_twos_before - 1 {
            return Err(step_invariant(
                "no-new-minus2",
                format!("(-2)-count went {minus_twos_before} -> {minus_twos_after}"),
            ));
        }

        // String bookkeeping: removing u must join its two cycle
        // neighbours; z gains one unit of weight.
        let mut touched = false;
        for cycle in string_state.iter_mut() {
            if let Some(pos) = cycle.iter().position(|&(id, _)| id == u_id) {
                let len = cycle.len();
                let prev = cycle[(pos + len - 1) % len].0;
                let next = cycle[(pos + 1) % len].0;
                let mut ends = [prev, next];
                ends.sort_unstable();
                let mut expected = [v_id, ids[w_row]];
                expected.sort_unstable();
                if ends != expected {
                    return Err(step_invariant(
                        "string-locality",
                        format!("cycle neighbours of {u_id} are {ends:?}, expected {expected:?}"),
                    ));
                }
                cycle.remove(pos);
                touched = true;
            }
        }
        if !touched {
            return Err(step_invariant(
                "string-locality",
                format!("vector {u_id} not found in any cycle"),
            ));
        }
        let mut bumped = false;
        for cycle in string_state.iter_mut() {
            if let Some(entry) = cycle.iter_mut().find(|(id, _)| *id == z_id) {
                entry.1 += 1;
                bumped = true;
            }
        }
        if !bumped {
            return Err(step_invariant(
                "string-locality",
                format!("vector {z_id} not found in any cycle"),
            ));
        }

        trace.push(MoveRecord {
            kind: "minus2-contraction",
            indices: vec![u_id, v_id, z_id],
            dropped_axis: Some(e_u_axis),
        });
    }

    // Terminal set: every (−2)-vector sits in a three-vector component,
    // and the bookkeeping strings agree with the surviving vectors.
    let (cvs, ids, axes, _cbasis, profile) = work.checked_state("terminal")?;
    let report = classify_set(&cvs);
    for comp in &report.components {
        if comp.len() > 3 && comp.iter().any(|&r| cvs.vectors[r].norm() == -2) {
            return Err(step_invariant(
                "terminal",
                "a (-2)-vector remains in a large component",
            ));
        }
    }
    for cycle in &string_state {
        for &(id, weight) in cycle {
            let row = ids.iter().position(|&i| i == id).ok_or_else(|| {
                step_invariant("terminal", format!("stale id {id} in string state"))
            })?;
            if cvs.vectors[row].norm() != weight {
                return Err(step_invariant(
                    "terminal",
                    format!("bookkeeping weight {weight} for vector {id} disagrees"),
                ));
            }
        }
    }

    // Irreducible components: union of vectors with overlapping supports.
    let rows = Rows {
        profile: profile.table.clone(),
    };
    let n = cvs.len();
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
            let share = rows.support(i).iter().any(|a| rows.support(j).contains(a));
            if share {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut irreducible: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        irreducible.entry(root).or_default().push(i);
    }

    let mut structures = Vec::new();
    for members in irreducible.values() {
        let comps: Vec<Vec<usize>> = report
            .components
            .iter()
            .filter(|c| members.contains(&c[0]))
            .cloned()
            .collect();
        let structure = recognize_terminal(&cvs, &rows, &ids, &axes, &comps)?;
        structures.push(structure);
    }

    let reconstructed: Vec<CircularString> = {
        // Replay the trace backwards on the terminal cyclic strings: undo
        // each contraction by re-inserting the removed (−2) next to the
        // merged vector and decrementing the bumped one.
        let mut cycles: Vec<Vec<(usize, i64)>> = string_state.clone();
        for record in trace.iter().rev() {
            if record.kind != "minus2-contraction" {
                continue;
            }
            let (u_id, v_id, z_id) = (record.indices[0], record.indices[1], record.indices[2]);
            for cycle in cycles.iter_mut() {
                if let Some(entry) = cycle.iter_mut().find(|(id, _)| *id == z_id) {
                    entry.1 -= 1;
                }
            }
            for cycle in cycles.iter_mut() {
                if let Some(pos) = cycle.iter().position(|&(id, _)| id == v_id) {
                    cycle.insert(pos, (u_id, -2));
                }
            }
        }
        cycles
            .iter()
            .map(|cycle| CircularString(cycle.iter().map(|&(_, w)| w).collect()))
            .collect()
    };

    for (original, rebuilt) in weight_strings.iter().zip(&reconstructed) {
        if !original.dihedral_eq(rebuilt) {
            return Err(step_invariant(
                "reconstruction",
                format!("rebuilt string {rebuilt} differs from original {original}"),
            ));
        }
    }

    Ok(InjectiveReduction {
        trace,
        structures,
        weight_strings,
        reconstructed,
    })
}

/// Recognizes one irreducible component of the terminal set.
fn recognize_terminal(
    cvs: &VectorSet,
    rows: &Rows,
    ids: &[usize],
    axes: &[usize],
    comps: &[Vec<usize>],
) -> Result<TerminalStructure, PipelineError> {
    let fail = |detail: String| step_invariant("terminal-recognition", detail);
    let has_minus2 = comps
        .iter()
        .flatten()
        .any(|&r| cvs.vectors[r].norm() == -2);
    if has_minus2 {
        if comps.len() != 2 {
            return Err(fail(format!(
                "a (-2)-terminal irreducible set has {} components",
                comps.len()
            )));
        }
        return recognize_t2(cvs, rows, ids, axes, &comps[0], &comps[1]);
    }
    for comp in comps {
        for &r in comp {
            if cvs.vectors[r].norm() != -3 {
                return Err(fail(format!(
                    "vector {} has square {} in a (-3)-terminal set",
                    ids[r],
                    cvs.vectors[r].norm()
                )));
            }
        }
    }
    match comps.len() {
        1 => recognize_odd_cycle(cvs, rows, ids, axes, &comps[0]),
        2 => {
            if comps[0].len() == 3 && comps[1].len() == 3 {
                let axes_used: std::collections::BTreeSet<usize> = comps
                    .iter()
                    .flatten()
                    .flat_map(|&r| rows.support(r))
                    .collect();
                match axes_used.len() {
                    6 => recognize_paired(cvs, rows, ids, axes, &comps[0], &comps[1], true),
                    8 => recognize_triple_b(cvs, rows, ids, axes, &comps[0], &comps[1]),
                    other => Err(fail(format!(
                        "two triangle components over {other} axes match no pattern"
                    ))),
                }
            } else {
                recognize_paired(cvs, rows, ids, axes, &comps[0], &comps[1], false)
            }
        }
        other => Err(fail(format!(
            "irreducible set with {other} connected components matches no pattern"
        ))),
    }
}

/// Walks a cycle of norm −3 vectors following shared axes: the successor
/// of u is the neighbour whose own (−1) axis lies in u's plus-axes.
fn axis_walk(
    cvs: &VectorSet,
    rows: &Rows,
    comp: &[usize],
) -> Result<Vec<usize>, String> {
    let start = *comp.iter().min().unwrap();
    let neighbours = |r: usize| -> Vec<usize> {
        comp.iter()
            .copied()
            .filter(|&s| s != r && cvs.pairing(r, s) != 0)
            .collect()
    };
    let successor = |r: usize, prev: Option<usize>| -> Result<usize, String> {
        let plus = rows.plus_axes(r);
        let mut nexts: Vec<usize> = neighbours(r)
            .into_iter()
            .filter(|&s| Some(s) != prev)
            .filter(|&s| rows.eneg(s).map(|a| plus.contains(&a)).unwrap_or(false))
            .collect();
        nexts.sort_unstable();
        nexts
            .first()
            .copied()
            .ok_or_else(|| format!("no axis-successor at row {r}"))
    };
    let mut order = vec![start];
    let mut cur = successor(start, None).map_err(|e| e)?;
    order.push(cur);
    while order.len() < comp.len() {
        let prev = order[order.len() - 2];
        cur = successor(cur, Some(prev))?;
        order.push(cur);
    }
    Ok(order)
}

fn recognize_odd_cycle(
    cvs: &VectorSet,
    rows: &Rows,
    ids: &[usize],
    axes: &[usize],
    comp: &[usize],
) -> Result<TerminalStructure, PipelineError> {
    let fail = |detail: String| step_invariant("odd-cycle", detail);
    let len = comp.len();
    if len % 2 == 0 {
        return Err(fail(format!("cycle length {len} is even")));
    }
    let order = axis_walk(cvs, rows, comp).map_err(fail)?;
    let axes_used: std::collections::BTreeSet<usize> =
        comp.iter().flat_map(|&r| rows.support(r)).collect();
    if axes_used.len() != len {
        return Err(fail(format!(
            "{len} vectors over {} axes",
            axes_used.len()
        )));
    }
    // Label axes: the own-axis of the i-th vector is f_{2i-1 mod len}; the
    // remaining plus-axis is f_{2i mod len}. Verify global consistency.
    let mut label: Vec<Option<usize>> = vec![None; len];
    let axis_index: BTreeMap<usize, usize> = axes_used.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let mut assign = |axis: usize, lab: usize| -> Result<(), String> {
        let slot = axis_index[&axis];
        match label[slot] {
            None => {
                label[slot] = Some(lab);
                Ok(())
            }
            Some(existing) if existing == lab => Ok(()),
            Some(existing) => Err(format!(
                "axis {axis} labelled both {existing} and {lab}"
            )),
        }
    };
    for (i, &r) in order.iter().enumerate() {
        let own = rows.eneg(r).ok_or_else(|| fail("missing own axis".into()))?;
        assign(own, (2 * i + 1) % len).map_err(fail)?;
        let plus = rows.plus_axes(r);
        if plus.len() != 2 {
            return Err(fail(format!("vector {} has {} plus axes", ids[r], plus.len())));
        }
        let next = order[(i + 1) % len];
        let next_own = rows.eneg(next).unwrap();
        if !plus.contains(&next_own) {
            return Err(fail(format!(
                "successor's own axis missing from plus-axes of {}",
                ids[r]
            )));
        }
        let other = *plus.iter().find(|&&a| a != next_own).ok_or_else(|| {
            fail(format!("vector {} has no free plus axis", ids[r]))
        })?;
        assign(next_own, (2 * i + 3) % len).map_err(fail)?;
        assign(other, (2 * i + 2) % len).map_err(fail)?;
    }
    if label.iter().any(|l| l.is_none()) {
        return Err(fail("axis labelling incomplete".into()));
    }
    Ok(TerminalStructure::OddCycle {
        m: (len - 1) / 2,
        axes: axes_used.iter().map(|&a| axes[a]).collect(),
        cycle: order.iter().map(|&r| ids[r]).collect(),
    })
}

fn recognize_paired(
    cvs: &VectorSet,
    rows: &Rows,
    ids: &[usize],
    axes: &[usize],
    comp_a: &[usize],
    comp_b: &[usize],
    triangles: bool,
) -> Result<TerminalStructure, PipelineError> {
    let fail = |detail: String| step_invariant("paired-cycles", detail);
    if comp_a.len() != comp_b.len() {
        return Err(fail(format!(
            "component sizes {} and {} differ",
            comp_a.len(),
            comp_b.len()
        )));
    }
    let m = comp_a.len();
    let order_a = axis_walk(cvs, rows, comp_a).map_err(&fail)?;
    let axes_used: std::collections::BTreeSet<usize> = comp_a
        .iter()
        .chain(comp_b.iter())
        .flat_map(|&r| rows.support(r))
        .collect();
    if axes_used.len() != 2 * m {
        return Err(fail(format!(
            "{} vectors over {} axes",
            2 * m,
            axes_used.len()
        )));
    }
    // Odd labels f_{2i-1} are the own-axes along comp_a; even labels
    // f_{2i} are the remaining plus-axes.
    let mut odd = vec![0usize; m];
    let mut even = vec![0usize; m];
    for (i, &r) in order_a.iter().enumerate() {
        let own = rows.eneg(r).ok_or_else(|| fail("missing own axis".into()))?;
        odd[i] = own;
        let next_own = rows
            .eneg(order_a[(i + 1) % m])
            .ok_or_else(|| fail("missing own axis".into()))?;
        let plus = rows.plus_axes(r);
        if plus.len() != 2 || !plus.contains(&next_own) {
            return Err(fail(format!(
                "vector {} does not chain into its successor",
                ids[r]
            )));
        }
        even[i] = *plus.iter().find(|&&a| a != next_own).unwrap();
    }
    // Verify the second component is exactly {f_{2i} - f_{2i+1} - f_{2i+2}}.
    let mut matched = vec![false; comp_b.len()];
    for i in 0..m {
        let want_own = even[i];
        let want_plus: std::collections::BTreeSet<usize> =
            [odd[(i + 1) % m], even[(i + 1) % m]].into_iter().collect();
        let found = comp_b.iter().enumerate().find(|&(bi, &r)| {
            !matched[bi]
                && rows.eneg(r) == Some(want_own)
                && rows.plus_axes(r).into_iter().collect::<std::collections::BTreeSet<_>>()
                    == want_plus
        });
        match found {
            Some((bi, _)) => matched[bi] = true,
            None => {
                return Err(fail(format!(
                    "no partner vector with own axis {want_own}"
                )));
            }
        }
    }
    let interleaved: Vec<usize> = (0..m)
        .flat_map(|i| [odd[i], even[i]])
        .map(|a| axes[a])
        .collect();
    let components = [
        order_a.iter().map(|&r| ids[r]).collect::<Vec<usize>>(),
        comp_b.iter().map(|&r| ids[r]).collect::<Vec<usize>>(),
    ];
    if triangles {
        Ok(TerminalStructure::TripleA {
            axes: interleaved,
            components,
        })
    } else {
        Ok(TerminalStructure::PairedCycles {
            m,
            axes: interleaved,
            components,
        })
    }
}

fn recognize_triple_b(
    _cvs: &VectorSet,
    rows: &Rows,
    ids: &[usize],
    axes: &[usize],
    comp_a: &[usize],
    comp_b: &[usize],
) -> Result<TerminalStructure, PipelineError> {
    let fail = |detail: String| step_invariant("triple-b", detail);
    // In each component, exactly one pair overlaps in all three axes.
    let overlap_pair = |comp: &[usize]| -> Result<(usize, usize, usize), String> {
        let mut pairs = Vec::new();
        for (i, &r) in comp.iter().enumerate() {
            for &s in &comp[i + 1..] {
                let sr: std::collections::BTreeSet<usize> = rows.support(r).into_iter().collect();
                let ss: std::collections::BTreeSet<usize> = rows.support(s).into_iter().collect();
                if sr.intersection(&ss).count() == 3 {
                    pairs.push((r, s));
                }
            }
        }
        if pairs.len() != 1 {
            return Err(format!("{} triple-overlap pairs", pairs.len()));
        }
        let (b, c) = pairs[0];
        let a = *comp
            .iter()
            .find(|&&r| r != b && r != c)
            .ok_or("missing third vector")?;
        Ok((a, b, c))
    };
    let (a1, b1, c1) = overlap_pair(comp_a).map_err(&fail)?;
    let (a2, b2, c2) = overlap_pair(comp_b).map_err(&fail)?;
    // The shared +1 axis of the overlapping pair is the anchor the third
    // vector hits with −1.
    let anchor = |b: usize, c: usize, a: usize| -> Result<usize, String> {
        let shared: Vec<usize> = rows
            .plus_axes(b)
            .into_iter()
            .filter(|ax| rows.plus_axes(c).contains(ax))
            .collect();
        if shared.len() != 1 {
            return Err(format!("{} common plus axes", shared.len()));
        }
        if rows.eneg(a) != Some(shared[0]) {
            return Err("third vector does not own the anchor axis".into());
        }
        Ok(shared[0])
    };
    let f1 = anchor(b1, c1, a1).map_err(&fail)?;
    let f4 = anchor(b2, c2, a2).map_err(&fail)?;
    let e_b1 = rows.eneg(b1).ok_or_else(|| fail("missing own axis".into()))?;
    let e_c1 = rows.eneg(c1).ok_or_else(|| fail("missing own axis".into()))?;
    let plus_a1: std::collections::BTreeSet<usize> = rows.plus_axes(a1).into_iter().collect();
    let owns_2: std::collections::BTreeSet<usize> =
        [rows.eneg(b2).unwrap_or(usize::MAX), rows.eneg(c2).unwrap_or(usize::MAX)]
            .into_iter()
            .collect();
    if plus_a1 != owns_2 {
        return Err(fail(
            "plus axes of the first anchor vector are not owned by the second pair".into(),
        ));
    }
    let f2 = rows.eneg(b2).unwrap();
    let f3 = rows.eneg(c2).unwrap();
    let plus_a2: Vec<usize> = rows.plus_axes(a2);
    let f78: Vec<usize> = plus_a2
        .iter()
        .copied()
        .filter(|ax| ![f1, f2, f3, f4, e_b1, e_c1].contains(ax))
        .collect();
    if f78.len() != 2 {
        return Err(fail("second anchor vector lacks two fresh axes".into()));
    }
    let ordered = [f1, f2, f3, f4, e_b1, e_c1, f78[0], f78[1]];
    Ok(TerminalStructure::TripleB {
        axes: ordered.iter().map(|&a| axes[a]).collect(),
        components: [
            vec![ids[a1], ids[b1], ids[c1]],
            vec![ids[a2], ids[b2], ids[c2]],
        ],
    })
}

fn recognize_t2(
    cvs: &VectorSet,
    rows: &Rows,
    ids: &[usize],
    axes: &[usize],
    comp_a: &[usize],
    comp_b: &[usize],
) -> Result<TerminalStructure, PipelineError> {
    let fail = |detail: String| step_invariant("t2-pair", detail);
    let classify_comp = |comp: &[usize]| -> Result<(usize, usize, usize), String> {
        if comp.len() != 3 {
            return Err(format!("component of size {}", comp.len()));
        }
        let mut by_norm: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for &r in comp {
            by_norm.entry(cvs.vectors[r].norm()).or_default().push(r);
        }
        // Squares −2, −2−a, −2−b with a+b = 3 force exactly {−2,−3,−4}.
        let norms: Vec<i64> = by_norm.keys().copied().collect();
        if norms != vec![-4, -3, -2] {
            return Err(format!("component squares {norms:?}"));
        }
        Ok((by_norm[&-2][0], by_norm[&-3][0], by_norm[&-4][0]))
    };
    let (u1, v1, w1) = classify_comp(comp_a).map_err(&fail)?;
    let (u2, v2, w2) = classify_comp(comp_b).map_err(&fail)?;
    // Component one: u₁ = f₁−f₂, v₁ = f₂−f₃−f₄, w₁ = f₄−f₅−f₆−f₁.
    let f1 = rows.eneg(u1).ok_or_else(|| fail("u1 own axis".into()))?;
    let u1_plus = rows.plus_axes(u1);
    if u1_plus.len() != 1 {
        return Err(fail("u1 must have a single plus axis".into()));
    }
    let f2 = u1_plus[0];
    if rows.eneg(v1) != Some(f2) {
        return Err(fail("v1 does not own f2".into()));
    }
    let v1_plus = rows.plus_axes(v1);
    if v1_plus.len() != 2 {
        return Err(fail("v1 must have two plus axes".into()));
    }
    let f4 = rows.eneg(w1).ok_or_else(|| fail("w1 own axis".into()))?;
    if !v1_plus.contains(&f4) {
        return Err(fail("w1 does not own a plus axis of v1".into()));
    }
    let f3 = *v1_plus.iter().find(|&&a| a != f4).unwrap();
    let w1_plus = rows.plus_axes(w1);
    if w1_plus.len() != 3 || !w1_plus.contains(&f1) {
        return Err(fail("w1 must hit f1 and two fresh axes".into()));
    }
    let fresh: Vec<usize> = w1_plus.into_iter().filter(|&a| a != f1).collect();
    // Component two: v₂ = f₃−f₄−f₆, u₂ = f₆−f₅, w₂ = f₅−f₁−f₂−f₃.
    if rows.eneg(v2) != Some(f3) {
        return Err(fail("v2 does not own f3".into()));
    }
    let v2_plus: std::collections::BTreeSet<usize> = rows.plus_axes(v2).into_iter().collect();
    if !v2_plus.contains(&f4) || v2_plus.len() != 2 {
        return Err(fail("v2 must hit f4 and one fresh axis".into()));
    }
    let f6 = *v2_plus.iter().find(|&&a| a != f4).unwrap();
    if !fresh.contains(&f6) {
        return Err(fail("v2's fresh axis is not one of w1's".into()));
    }
    let f5 = *fresh.iter().find(|&&a| a != f6).unwrap();
    if rows.eneg(u2) != Some(f6) || rows.plus_axes(u2) != vec![f5] {
        return Err(fail("u2 is not f6 - f5".into()));
    }
    if rows.eneg(w2) != Some(f5) {
        return Err(fail("w2 does not own f5".into()));
    }
    let w2_plus: std::collections::BTreeSet<usize> = rows.plus_axes(w2).into_iter().collect();
    let expect: std::collections::BTreeSet<usize> = [f1, f2, f3].into_iter().collect();
    if w2_plus != expect {
        return Err(fail("w2 must hit f1, f2 and f3".into()));
    }
    Ok(TerminalStructure::T2Pair {
        axes: [f1, f2, f3, f4, f5, f6].iter().map(|&a| axes[a]).collect(),
        components: [
            vec![ids[u1], ids[v1], ids[w1]],
            vec![ids[u2], ids[v2], ids[w2]],
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::{find_embedding, EmbeddingSearch};
    use crate::lattice::{gamma_gram, GammaSpec};

    fn embed_spec(d: u8, x: &[u64], y: &[u64]) -> VectorSet {
        let spec = GammaSpec::new(d, x.to_vec(), y.to_vec(), 1).unwrap();
        let gram = gamma_gram(&spec);
        match find_embedding(&gram, 10_000_000).unwrap() {
            EmbeddingSearch::Found(cert) => {
                let rank = gram.rank();
                VectorSet::new(cert.vectors, rank)
            }
            other => panic!("expected embedding for d={d} x={x:?} y={y:?}, got {other:?}"),
        }
    }

    #[test]
    fn semipositive_example_string() {
        let vs = embed_spec(1, &[3], &[7]);
        let reduction = reduce_semipositive(&vs).unwrap();
        assert_eq!(reduction.components.len(), 1);
        let comp = &reduction.components[0];
        assert_eq!(comp.s_string, NatString(vec![5, 1, 2, 2, 2, 2, 1]));
        assert_eq!(comp.c_string, NatString(vec![5, 2, 2, 2, 2, 2, 2]));
    }

    #[test]
    fn semipositive_small_case() {
        let vs = embed_spec(1, &[1], &[5]);
        let reduction = reduce_semipositive(&vs).unwrap();
        assert_eq!(
            reduction.components[0].s_string,
            NatString(vec![3, 1, 2, 2, 1])
        );
    }

    #[test]
    fn semipositive_rejects_positive_input() {
        let vs = VectorSet::new(
            vec![
                DiagonalVector(vec![1, -1, 0]),
                DiagonalVector(vec![-1, 0, 1]),
                DiagonalVector(vec![-1, 0, -2]),
            ],
            3,
        );
        assert!(matches!(
            reduce_semipositive(&vs),
            Err(PipelineError::Precondition { name: "flavor", .. })
        ));
    }

    #[test]
    fn noninjective_triple_is_terminal() {
        let vs = VectorSet::new(
            vec![
                DiagonalVector(vec![1, -1, 0]),
                DiagonalVector(vec![-1, 0, 1]),
                DiagonalVector(vec![-1, 0, -2]),
            ],
            3,
        );
        let reduction = reduce_positive_noninjective(&vs).unwrap();
        assert!(reduction.trace.is_empty());
        assert_eq!(reduction.expansion_moves, Vec::<ExpansionMove>::new());
        assert_eq!(
            reduction.weight_string.canonical(),
            CircularString(vec![-5, -2, -2]).canonical()
        );
    }

    #[test]
    fn noninjective_square_knot_lattice() {
        let vs = embed_spec(0, &[3], &[3]);
        let reduction = reduce_positive_noninjective(&vs).unwrap();
        assert!(reduction
            .weight_string
            .dihedral_eq(&CircularString(vec![-5, -2, -2])));
        assert!(reduction.expansion_moves.is_empty());
    }

    #[test]
    fn injective_odd_cycle_recognized() {
        // f_{2i-1} - f_{2i} - f_{2i+1} over Z/5.
        let mut vectors = Vec::new();
        for i in 1..=5usize {
            let mut coords = vec![0i64; 5];
            coords[(2 * i - 1) % 5] += 1;
            coords[(2 * i) % 5] -= 1;
            coords[(2 * i + 1) % 5] -= 1;
            vectors.push(DiagonalVector(coords));
        }
        let vs = VectorSet::new(vectors, 5);
        let reduction = reduce_positive_injective(&vs).unwrap();
        assert!(reduction.trace.is_empty());
        assert_eq!(reduction.structures.len(), 1);
        match &reduction.structures[0] {
            TerminalStructure::OddCycle { m, cycle, .. } => {
                assert_eq!(*m, 2);
                assert_eq!(cycle.len(), 5);
            }
            other => panic!("expected odd cycle, got {other:?}"),
        }
    }

    #[test]
    fn injective_rejects_noninjective_input() {
        let vs = VectorSet::new(
            vec![
                DiagonalVector(vec![1, -1, 0]),
                DiagonalVector(vec![-1, 0, 1]),
                DiagonalVector(vec![-1, 0, -2]),
            ],
            3,
        );
        assert!(matches!(
            reduce_positive_injective(&vs),
            Err(PipelineError::Precondition { name: "injectivity", .. })
        ));
    }
}
