//! The single-region algorithms: immediate delay successor, discrete
//! successors, immediate delay predecessors, discrete predecessors, the
//! ordered-partition re-insertion behind backward resets, the period
//! optimization for long delay-predecessor chains, and region-pattern
//! expansion.
//!
//! Everything here is a pure function over immutable regions. Integer
//! variables are handled one layer up (see [`crate::network`]); the
//! operations in this module are clock-only and expect variable-free guards.

use crate::model::{
    satisfies_clock_atoms, satisfies_invariant, ClockId, Guard, LocId, Network, Rel, Transition,
};
use crate::region::{Region, RegionClass};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KinematicsError {
    #[error("period is defined only for fully bounded regions")]
    PeriodUnbounded,
    #[error("period is defined only for regions with a fractional set")]
    PeriodNoFractions,
    #[error("bulk delay-predecessor skip would cross a clock at exactly zero")]
    SkipHitsZero,
}

/// Sorts and deduplicates a set of regions into the canonical output order.
fn canonical_set(mut regions: Vec<Region>) -> Vec<Region> {
    regions.sort();
    regions.dedup();
    regions
}

// ---------------------------------------------------------------------------
// Delay successor
// ---------------------------------------------------------------------------

/// The unique immediate delay successor, or `None` for class-U regions,
/// which have no delay successors at all.
pub fn immediate_delay_successor(region: &Region, net: &Network) -> Option<Region> {
    match region.class() {
        RegionClass::U => None,
        RegionClass::Z | RegionClass::M => {
            if region.unit_set().is_empty() {
                // Degenerate clock-free region.
                return None;
            }
            let mut succ = region.clone();
            let unit = succ.take_unit();
            let (oob, tmp): (Vec<ClockId>, Vec<ClockId>) = unit
                .into_iter()
                .partition(|&x| succ.h(x) == net.clock_max(x));
            if !tmp.is_empty() {
                // Smallest fractional part: these clocks just left a unit.
                succ.insert_fractional_smallest(tmp);
            }
            if !oob.is_empty() {
                // Most recently unbounded group.
                succ.push_unbounded_recent(oob);
            }
            Some(succ)
        }
        RegionClass::P => {
            let mut succ = region.clone();
            let top = succ
                .pop_fractional_largest()
                .expect("class P has fractions");
            for &x in &top {
                succ.set_h(x, succ.h(x) + 1);
            }
            succ.merge_into_unit(top);
            Some(succ)
        }
    }
}

// ---------------------------------------------------------------------------
// Discrete successors
// ---------------------------------------------------------------------------

/// Successor of `region` over one transition of one component, or `None`
/// when the guard fails or the target invariant is violated after resets.
pub fn discrete_successor_via(
    region: &Region,
    component: usize,
    t: &Transition,
    net: &Network,
) -> Option<Region> {
    if t.source != region.location(component) {
        return None;
    }
    if !satisfies_clock_atoms(region, &t.guard.clock_atoms) {
        return None;
    }
    let mut succ = region.clone();
    succ.set_location(component, t.target);
    succ.apply_resets(&t.resets);
    if !satisfies_invariant(&succ, net) {
        return None;
    }
    Some(succ)
}

/// All discrete successors of a single-automaton region, deduplicated and
/// sorted. Transitions carrying a synchronization label cannot fire alone
/// and are skipped.
pub fn find_discrete_successors(region: &Region, net: &Network) -> Vec<Region> {
    debug_assert_eq!(net.components.len(), 1);
    let mut out = Vec::new();
    for t in &net.components[0].transitions {
        debug_assert!(t.guard.int_atoms.is_empty());
        if t.sync.is_some() {
            continue;
        }
        if let Some(s) = discrete_successor_via(region, 0, t, net) {
            out.push(s);
        }
    }
    canonical_set(out)
}

// ---------------------------------------------------------------------------
// Delay predecessors
// ---------------------------------------------------------------------------

/// The immediate delay predecessors of a region; at most three.
///
/// A region containing a clock at exactly zero has no delay predecessors
/// (time cannot rewind below zero) and yields the empty set.
pub fn find_immediate_delay_predecessors(region: &Region, _net: &Network) -> Vec<Region> {
    if region.unit_set().iter().any(|&x| region.h(x) == 0) {
        return Vec::new();
    }
    let preds = match region.class() {
        RegionClass::U => {
            // The most recently unbounded clocks re-enter the unit; their
            // integer parts already sit at the maximum constant.
            let mut p = region.clone();
            let recent = p
                .pop_unbounded_recent()
                .expect("class U has unbounded sets");
            p.merge_into_unit(recent);
            vec![p]
        }
        RegionClass::Z | RegionClass::M => {
            if region.unit_set().is_empty() {
                return Vec::new(); // degenerate clock-free region
            }
            // Unit clocks step back below the boundary: integer part drops by
            // one and they become the largest-fraction group.
            let mut p = region.clone();
            let unit = p.take_unit();
            for &x in &unit {
                p.set_h(x, p.h(x) - 1);
            }
            p.push_fractional_largest(unit);
            vec![p]
        }
        RegionClass::P => {
            let mut base = region.clone();
            let smallest = base
                .remove_fractional_smallest()
                .expect("class P has fractions");
            base.merge_into_unit(smallest);
            let mut out = vec![base];
            if region.ell() >= 1 {
                // The most recent unbounded group may have left the unit in
                // the same step, alone or together with the smallest-fraction
                // group.
                let mut p1 = region.clone();
                let recent = p1.pop_unbounded_recent().unwrap();
                p1.merge_into_unit(recent);
                let mut p2 = p1.clone();
                let smallest = p2.remove_fractional_smallest().unwrap();
                p2.merge_into_unit(smallest);
                out.push(p1);
                out.push(p2);
            }
            out
        }
    };
    canonical_set(preds)
}

// ---------------------------------------------------------------------------
// part-regs: ordered re-insertion of reset clocks
// ---------------------------------------------------------------------------

/// All unordered partitions of `items` into non-empty blocks.
fn set_partitions(items: &[ClockId]) -> Vec<Vec<Vec<ClockId>>> {
    let mut out: Vec<Vec<Vec<ClockId>>> = vec![Vec::new()];
    for &item in items {
        let mut next = Vec::new();
        for p in &out {
            for b in 0..p.len() {
                let mut q = p.clone();
                q[b].push(item);
                next.push(q);
            }
            let mut q = p.clone();
            q.push(vec![item]);
            next.push(q);
        }
        out = next;
    }
    out
}

/// All sequences containing `ctx` in order and the `loose` blocks in any
/// order and position.
fn interleavings(ctx: &[Vec<ClockId>], loose: &[Vec<ClockId>]) -> Vec<Vec<Vec<ClockId>>> {
    if ctx.is_empty() && loose.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    if !ctx.is_empty() {
        for mut rest in interleavings(&ctx[1..], loose) {
            rest.insert(0, ctx[0].clone());
            out.push(rest);
        }
    }
    for i in 0..loose.len() {
        let mut remaining = loose.to_vec();
        let head = remaining.remove(i);
        for mut rest in interleavings(ctx, &remaining) {
            rest.insert(0, head.clone());
            out.push(rest);
        }
    }
    out
}

/// Candidate integer values for re-inserted clocks; `c_m(x) + 1` encodes a
/// clock that was unbounded before the reset.
pub type HAssign = Vec<(ClockId, u32)>;

fn h_of(h: &HAssign, x: ClockId) -> Option<u32> {
    h.iter().find(|(c, _)| *c == x).map(|(_, v)| *v)
}

/// Inserts the clocks of `xs` into the region segment `lo..hi` in every way
/// that preserves the relative order of the existing sets there.
///
/// `(lo, hi) = (-ℓ, -1)` addresses the unbounded sets and `(lo, hi) = (0, r)`
/// the unit and fractional sets. New groups may interleave with the existing
/// sets or merge into them; in the bounded segment a group may also merge
/// into the unit set, and a clock whose assigned value equals its maximum
/// constant is placed there directly (a bounded clock at `c_m` cannot carry a
/// fraction). Assigned values above `c_m` are clamped to `c_m`.
pub fn part_regs(
    region: &Region,
    lo: i32,
    hi: i32,
    xs: &[ClockId],
    hvals: &HAssign,
    net: &Network,
) -> Vec<Region> {
    debug_assert!(lo <= hi || (lo == 0 && hi == -1));
    let bounded_segment = hi >= 0;
    debug_assert!(if bounded_segment {
        lo == 0 && hi == region.frac_count() as i32
    } else {
        hi == -1 && lo == -(region.ell() as i32)
    });

    if xs.is_empty() {
        return vec![region.clone()];
    }

    let mut base = region.clone();
    let mut pending: Vec<ClockId> = Vec::new();
    for &x in xs {
        let v = h_of(hvals, x).unwrap_or_else(|| base.h(x));
        base.set_h(x, v.min(net.clock_max(x)));
        if bounded_segment && v == net.clock_max(x) {
            base.merge_into_unit(vec![x]);
        } else {
            pending.push(x);
        }
    }
    if pending.is_empty() {
        return vec![base];
    }

    let ctx: Vec<Vec<ClockId>> = if bounded_segment {
        base.fractional_sets().to_vec()
    } else {
        base.unbounded_sets().to_vec()
    };

    let mut out = Vec::new();
    for partition in set_partitions(&pending) {
        // Destination of each block: merge into a context set, merge into the
        // unit set (bounded segment only), or stand alone in the sequence.
        let n_blocks = partition.len();
        let merge_choices = ctx.len() + if bounded_segment { 1 } else { 0 } + 1;
        let mut stack = vec![Vec::<usize>::new()];
        while let Some(choice) = stack.pop() {
            if choice.len() < n_blocks {
                for c in 0..merge_choices {
                    let mut next = choice.clone();
                    next.push(c);
                    stack.push(next);
                }
                continue;
            }
            let mut merged_ctx = ctx.clone();
            let mut unit_extra: Vec<ClockId> = Vec::new();
            let mut loose: Vec<Vec<ClockId>> = Vec::new();
            for (b, &c) in choice.iter().enumerate() {
                if c < ctx.len() {
                    merged_ctx[c].extend(partition[b].iter().copied());
                } else if bounded_segment && c == ctx.len() {
                    unit_extra.extend(partition[b].iter().copied());
                } else {
                    loose.push(partition[b].clone());
                }
            }
            for seq in interleavings(&merged_ctx, &loose) {
                let mut r = base.clone();
                if bounded_segment {
                    r.set_fractional_sets(seq);
                    r.merge_into_unit(unit_extra.clone());
                } else {
                    r.set_unbounded_sets(seq);
                }
                r.canonicalize();
                out.push(r);
            }
        }
    }
    canonical_set(out)
}

// ---------------------------------------------------------------------------
// Discrete predecessors
// ---------------------------------------------------------------------------

fn equality_bound(guard: &Guard, x: ClockId) -> Option<u32> {
    guard
        .clock_atoms
        .iter()
        .find(|a| a.clock == x && a.rel == Rel::Eq)
        .map(|a| a.bound)
}

fn forced_unbounded(guard: &Guard, x: ClockId, net: &Network) -> bool {
    guard
        .clock_atoms
        .iter()
        .any(|a| a.clock == x && a.rel == Rel::Gt && a.bound == net.clock_max(x))
}

/// Candidate integer values for a reset clock, narrowed by the guard; the
/// value `c_m + 1` stands for "was unbounded". `None` when the guard leaves
/// no possible value.
fn guard_h_range(guard: &Guard, x: ClockId, cm: u32) -> Option<(u32, u32)> {
    let mut lo = 0u32;
    let mut hi = cm + 1;
    for a in &guard.clock_atoms {
        if a.clock != x {
            continue;
        }
        match a.rel {
            Rel::Eq => {
                lo = lo.max(a.bound);
                hi = hi.min(a.bound);
            }
            Rel::Ge | Rel::Gt => lo = lo.max(a.bound),
            Rel::Le => hi = hi.min(a.bound),
            Rel::Lt => {
                if a.bound == 0 {
                    return None;
                }
                hi = hi.min(a.bound - 1);
            }
        }
    }
    if lo > hi {
        None
    } else {
        Some((lo, hi))
    }
}

/// Discrete predecessors of `region` over one transition of one component.
///
/// Reset clocks must be exactly zero in `region`; otherwise the transition
/// contributes nothing. Reset clocks are re-materialized at every integer
/// value (or unbounded slot) consistent with the guard, in every ordered
/// arrangement that preserves the surviving sets, and candidates violating
/// the guard are dropped.
pub fn discrete_predecessors_via(
    region: &Region,
    component: usize,
    t: &Transition,
    net: &Network,
) -> Vec<Region> {
    if t.target != region.location(component) {
        return Vec::new();
    }
    if !t.resets.iter().all(|&x| region.is_exact_zero(x)) {
        return Vec::new();
    }
    let mut base = region.clone();
    base.set_location(component, t.source);
    let mut x_bnd: Vec<ClockId> = Vec::new();
    let mut x_oob: Vec<ClockId> = Vec::new();
    for &x in &t.resets {
        if let Some(c) = equality_bound(&t.guard, x) {
            base.set_h(x, c); // stays in the unit set
        } else if forced_unbounded(&t.guard, x, net) {
            base.set_h(x, net.clock_max(x));
            base.remove_from_unit(x);
            x_oob.push(x);
        } else {
            base.remove_from_unit(x);
            x_bnd.push(x);
        }
    }

    let ell = base.ell() as i32;
    let mut candidates = Vec::new();
    if x_bnd.is_empty() {
        let h: HAssign = x_oob.iter().map(|&x| (x, net.clock_max(x))).collect();
        candidates = part_regs(&base, -ell, -1, &x_oob, &h, net);
    } else {
        let ranges: Option<Vec<(u32, u32)>> = x_bnd
            .iter()
            .map(|&x| guard_h_range(&t.guard, x, net.clock_max(x)))
            .collect();
        if let Some(ranges) = ranges {
            let mut combo: Vec<u32> = ranges.iter().map(|&(lo, _)| lo).collect();
            loop {
                let mut delta: Vec<ClockId> = Vec::new();
                let mut rest: Vec<ClockId> = Vec::new();
                let mut h: HAssign = x_oob.iter().map(|&x| (x, net.clock_max(x))).collect();
                for (i, &x) in x_bnd.iter().enumerate() {
                    h.push((x, combo[i]));
                    if combo[i] > net.clock_max(x) {
                        delta.push(x);
                    } else {
                        rest.push(x);
                    }
                }
                let mut unbounded_in: Vec<ClockId> = x_oob.clone();
                unbounded_in.extend(delta.iter().copied());
                for r1 in part_regs(&base, -ell, -1, &unbounded_in, &h, net) {
                    let r = r1.frac_count() as i32;
                    candidates.extend(part_regs(&r1, 0, r, &rest, &h, net));
                }
                // next value combination
                let mut i = 0;
                loop {
                    if i == combo.len() {
                        break;
                    }
                    if combo[i] < ranges[i].1 {
                        combo[i] += 1;
                        break;
                    }
                    combo[i] = ranges[i].0;
                    i += 1;
                }
                if i == combo.len() {
                    break;
                }
            }
        }
    }
    candidates.retain(|c| satisfies_clock_atoms(c, &t.guard.clock_atoms));
    canonical_set(candidates)
}

/// All discrete predecessors of a single-automaton region.
pub fn find_discrete_predecessors(region: &Region, net: &Network) -> Vec<Region> {
    debug_assert_eq!(net.components.len(), 1);
    let mut out = Vec::new();
    for t in &net.components[0].transitions {
        debug_assert!(t.guard.int_atoms.is_empty());
        if t.sync.is_some() {
            continue;
        }
        out.extend(discrete_predecessors_via(region, 0, t, net));
    }
    canonical_set(out)
}

// ---------------------------------------------------------------------------
// Period optimization
// ---------------------------------------------------------------------------

/// Length of the structural cycle of a bounded region's delay-predecessor
/// chain: `2(r+1)` when the unit set is occupied, `2r` otherwise.
pub fn period(region: &Region) -> Result<u32, KinematicsError> {
    if region.ell() > 0 {
        return Err(KinematicsError::PeriodUnbounded);
    }
    let r = region.frac_count() as u32;
    if r == 0 {
        return Err(KinematicsError::PeriodNoFractions);
    }
    Ok(if region.unit_set().is_empty() {
        2 * r
    } else {
        2 * (r + 1)
    })
}

/// Jumps `⌊n/θ⌋` full periods down the (deterministic) delay-predecessor
/// chain of a bounded region by decrementing every integer part, leaving the
/// partition shape unchanged. The caller applies the remaining `n mod θ`
/// steps one by one.
///
/// Fails when the chain would cross a region containing a clock at exactly
/// zero, in which case step-by-step computation is required.
pub fn delay_predecessor_skip(region: &Region, n: u64) -> Result<Region, KinematicsError> {
    let theta = period(region)? as u64;
    let k = n / theta;
    if k == 0 {
        return Ok(region.clone());
    }
    skip_periods(region, k)
}

/// Jumps exactly `k` full periods backward; shared by [`delay_predecessor_skip`]
/// and the opt-in accelerated backward engine.
pub fn skip_periods(region: &Region, k: u64) -> Result<Region, KinematicsError> {
    period(region)?;
    if k == 0 {
        return Ok(region.clone());
    }
    let k32 = u32::try_from(k).map_err(|_| KinematicsError::SkipHitsZero)?;
    for c in 0..region.clock_count() {
        let id = ClockId(c as u32);
        let h = region.h(id);
        // Every clock is decremented once per period; a unit clock must stay
        // strictly positive even after the last period.
        let floor = if region.unit_set().contains(&id) {
            k32 + 1
        } else {
            k32
        };
        if h < floor {
            return Err(KinematicsError::SkipHitsZero);
        }
    }
    let mut out = region.clone();
    for c in 0..region.clock_count() {
        let id = ClockId(c as u32);
        out.set_h(id, out.h(id) - k32);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Region patterns
// ---------------------------------------------------------------------------

/// Per-clock constraint of a backward start pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClockShape {
    /// `x = c`: exactly the integer `c`.
    Exact(u32),
    /// `c < x < c+1`: inside the open unit interval above `c`.
    Interval(u32),
    /// `x > c_m(x)`.
    Unbounded,
}

/// Symbolic description of a set of target regions for backward search.
#[derive(Debug, Clone)]
pub struct RegionPattern {
    pub location: LocId,
    /// One entry per clock of the automaton.
    pub shapes: Vec<(ClockId, ClockShape)>,
    /// Optional grouping of the unbounded clocks, earliest group first.
    pub unbounded_order: Option<Vec<Vec<ClockId>>>,
    /// Optional grouping of the fractional clocks, smallest fraction first.
    pub frac_order: Option<Vec<Vec<ClockId>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PatternError {
    #[error("clock '{0}' is not constrained by the pattern")]
    Unconstrained(String),
    #[error("clock '{0}' is constrained more than once")]
    Duplicate(String),
    #[error("contradictory constraint on clock '{0}': {1}")]
    Contradiction(String, String),
    #[error("ordering mentions clock '{0}' whose constraint does not match")]
    OrderMismatch(String),
    #[error("{0} ordering does not cover exactly the {0} clocks")]
    OrderIncomplete(&'static str),
}

impl RegionPattern {
    /// The pattern matching exactly one concrete region.
    pub fn exact(region: &Region, net: &Network) -> RegionPattern {
        let mut shapes = Vec::new();
        for c in 0..region.clock_count() {
            let id = ClockId(c as u32);
            let shape = match region.status(id) {
                crate::model::ClockStatus::Unit => ClockShape::Exact(region.h(id)),
                crate::model::ClockStatus::Fractional => ClockShape::Interval(region.h(id)),
                crate::model::ClockStatus::Unbounded => ClockShape::Unbounded,
            };
            shapes.push((id, shape));
        }
        let _ = net;
        RegionPattern {
            location: region.location(0),
            shapes,
            unbounded_order: Some(region.unbounded_sets().to_vec()),
            frac_order: Some(region.fractional_sets().to_vec()),
        }
    }
}

fn check_order_cover(
    order: &[Vec<ClockId>],
    expected: &[ClockId],
    kind: &'static str,
    net: &Network,
    want_shape: impl Fn(ClockId) -> bool,
) -> Result<(), PatternError> {
    let mut listed: Vec<ClockId> = order.iter().flatten().copied().collect();
    for &c in &listed {
        if !want_shape(c) {
            return Err(PatternError::OrderMismatch(
                net.clocks[c.0 as usize].name.clone(),
            ));
        }
    }
    listed.sort_unstable();
    let mut expected = expected.to_vec();
    expected.sort_unstable();
    if listed != expected {
        return Err(PatternError::OrderIncomplete(kind));
    }
    Ok(())
}

/// Expands a pattern into the set of all regions consistent with it.
///
/// When an ordering is omitted, every ordered partition of the corresponding
/// clocks is generated.
pub fn enumerate_pattern(
    pattern: &RegionPattern,
    net: &Network,
) -> Result<Vec<Region>, PatternError> {
    debug_assert_eq!(net.components.len(), 1);
    let n = net.clock_count();
    let mut shape_of: Vec<Option<ClockShape>> = vec![None; n];
    for &(c, s) in &pattern.shapes {
        let slot = &mut shape_of[c.0 as usize];
        if slot.is_some() {
            return Err(PatternError::Duplicate(
                net.clocks[c.0 as usize].name.clone(),
            ));
        }
        *slot = Some(s);
    }
    let mut h = vec![0u32; n];
    let mut unit = Vec::new();
    let mut frac_clocks = Vec::new();
    let mut unb_clocks = Vec::new();
    for i in 0..n {
        let id = ClockId(i as u32);
        let cm = net.clock_max(id);
        let name = || net.clocks[i].name.clone();
        match shape_of[i] {
            None => return Err(PatternError::Unconstrained(name())),
            Some(ClockShape::Exact(c)) => {
                if c > cm {
                    return Err(PatternError::Contradiction(
                        name(),
                        format!("{} exceeds the maximum constant {}", c, cm),
                    ));
                }
                h[i] = c;
                unit.push(id);
            }
            Some(ClockShape::Interval(c)) => {
                if cm == 0 || c > cm - 1 {
                    return Err(PatternError::Contradiction(
                        name(),
                        format!(
                            "({0}, {1}) lies beyond the maximum constant {2}",
                            c,
                            c + 1,
                            cm
                        ),
                    ));
                }
                h[i] = c;
                frac_clocks.push(id);
            }
            Some(ClockShape::Unbounded) => {
                h[i] = cm;
                unb_clocks.push(id);
            }
        }
    }

    let locs = vec![pattern.location];
    let mut bases: Vec<Region> = match &pattern.unbounded_order {
        Some(order) => {
            check_order_cover(order, &unb_clocks, "unbounded", net, |c| {
                matches!(shape_of[c.0 as usize], Some(ClockShape::Unbounded))
            })?;
            vec![Region::from_parts(
                locs.clone(),
                h.clone(),
                order.clone(),
                unit.clone(),
                vec![],
            )]
        }
        None => {
            let seed = Region::from_parts(locs.clone(), h.clone(), vec![], unit.clone(), vec![]);
            let hv: HAssign = unb_clocks.iter().map(|&c| (c, net.clock_max(c))).collect();
            part_regs(&seed, 0, -1, &unb_clocks, &hv, net)
        }
    };

    if let Some(order) = &pattern.frac_order {
        check_order_cover(order, &frac_clocks, "fractional", net, |c| {
            matches!(shape_of[c.0 as usize], Some(ClockShape::Interval(_)))
        })?;
        for b in &mut bases {
            *b = Region::from_parts(
                b.locations().to_vec(),
                h.clone(),
                b.unbounded_sets().to_vec(),
                unit.clone(),
                order.clone(),
            );
        }
        Ok(canonical_set(bases))
    } else {
        let hv: HAssign = frac_clocks.iter().map(|&c| (c, h[c.0 as usize])).collect();
        let mut out = Vec::new();
        for b in &bases {
            for cand in part_regs(b, 0, b.frac_count() as i32, &frac_clocks, &hv, net) {
                // Interval-constrained clocks must end up fractional; the
                // re-insertion also offers unit placements, which describe
                // different regions.
                if frac_clocks
                    .iter()
                    .all(|&c| cand.status(c) == crate::model::ClockStatus::Fractional)
                {
                    out.push(cand);
                }
            }
        }
        Ok(canonical_set(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AtomDef, AutomatonDef, EdgeDef};
    use crate::oracle::scratch_net;
    use crate::region::initial_region;

    fn c(i: u32) -> ClockId {
        ClockId(i)
    }

    /// Two clocks x, y with c_m = 2; the regions of the worked two-clock
    /// delay-predecessor example. y became unbounded before x.
    fn two_clock_net() -> Network {
        scratch_net(&[2, 2])
    }

    fn region(
        h: Vec<u32>,
        unbounded: Vec<Vec<ClockId>>,
        unit: Vec<ClockId>,
        fractional: Vec<Vec<ClockId>>,
    ) -> Region {
        Region::from_parts(vec![LocId(0)], h, unbounded, unit, fractional)
    }

    #[test]
    fn delay_successor_of_r1_is_r0() {
        let net = two_clock_net();
        let r1 = region(vec![2, 2], vec![vec![c(1)]], vec![c(0)], vec![]);
        let r0 = region(vec![2, 2], vec![vec![c(1)], vec![c(0)]], vec![], vec![]);
        assert_eq!(immediate_delay_successor(&r1, &net), Some(r0));
    }

    #[test]
    fn delay_successor_increments_on_unit_entry() {
        let net = scratch_net(&[2]);
        let r = region(vec![1], vec![], vec![], vec![vec![c(0)]]);
        let s = immediate_delay_successor(&r, &net).unwrap();
        assert_eq!(s.h(c(0)), 2);
        assert_eq!(s.unit_set(), &[c(0)]);
        assert_eq!(s.class(), RegionClass::Z);
    }

    #[test]
    fn class_u_has_no_delay_successor() {
        let net = two_clock_net();
        let r0 = region(vec![2, 2], vec![vec![c(1)], vec![c(0)]], vec![], vec![]);
        assert_eq!(immediate_delay_successor(&r0, &net), None);
    }

    #[test]
    fn delay_predecessor_of_r0_is_r1() {
        let net = two_clock_net();
        let r0 = region(vec![2, 2], vec![vec![c(1)], vec![c(0)]], vec![], vec![]);
        let r1 = region(vec![2, 2], vec![vec![c(1)]], vec![c(0)], vec![]);
        assert_eq!(find_immediate_delay_predecessors(&r0, &net), vec![r1]);
    }

    #[test]
    fn class_p_with_unbounded_clocks_has_three_delay_predecessors() {
        let net = two_clock_net();
        let r2 = region(vec![1, 2], vec![vec![c(1)]], vec![], vec![vec![c(0)]]);
        let r3 = region(vec![1, 2], vec![vec![c(1)]], vec![c(0)], vec![]);
        let r4 = region(vec![1, 2], vec![], vec![c(0), c(1)], vec![]);
        let r5 = region(vec![1, 2], vec![], vec![c(1)], vec![vec![c(0)]]);
        let preds = find_immediate_delay_predecessors(&r2, &net);
        assert_eq!(preds.len(), 3);
        assert!(preds.contains(&r3) && preds.contains(&r4) && preds.contains(&r5));
        assert_eq!(r4.class(), RegionClass::Z);
        assert_eq!(r5.class(), RegionClass::M);
        // Every predecessor steps forward to the original region.
        for p in &preds {
            assert_eq!(immediate_delay_successor(p, &net).as_ref(), Some(&r2));
        }
    }

    #[test]
    fn initial_region_has_no_delay_predecessors() {
        let net = two_clock_net();
        let init = initial_region(&net, &[LocId(0)]).unwrap();
        assert!(find_immediate_delay_predecessors(&init, &net).is_empty());
    }

    /// Four clocks with c_m = 5 and a transition guarded by `z > 5` that
    /// resets `w`, applied to the region where x, y share a fraction above 2
    /// and z became unbounded before w.
    #[test]
    fn discrete_successor_resets_into_the_unit_set() {
        let mut def = AutomatonDef::new("A");
        for name in ["x", "y", "z", "w"] {
            def.clock(name, Some(5));
        }
        def.location("q", true);
        def.location("qp", false);
        def.edge(
            EdgeDef::new("q", "qp")
                .guard_atom(AtomDef::clock("z", Rel::Gt, 5))
                .reset("w"),
        );
        let net = Network::link(&[def]).unwrap();
        let (x, y, z, w) = (c(0), c(1), c(2), c(3));
        let r = region(
            vec![2, 2, 5, 5],
            vec![vec![z], vec![w]],
            vec![],
            vec![vec![x, y]],
        );
        let succs = find_discrete_successors(&r, &net);
        assert_eq!(succs.len(), 1);
        let s = &succs[0];
        assert_eq!(s.location(0), LocId(1));
        assert_eq!(s.h(w), 0);
        assert_eq!(s.set_index(w), 0);
        assert_eq!(s.set_index(z), -1);
        assert_eq!(s.set_index(x), 1);
        assert_eq!(s.ell(), 1);
    }

    #[test]
    fn punctual_self_loop_resets_its_clock_into_the_unit_set() {
        // A flower petal: fire x == 1 with x exactly 1 while y runs free.
        let mut def = AutomatonDef::new("A");
        def.clock("x", Some(1));
        def.clock("y", Some(1));
        def.location("q0", true);
        def.edge(
            EdgeDef::new("q0", "q0")
                .guard_atom(AtomDef::clock("x", Rel::Eq, 1))
                .reset("x"),
        );
        let net = Network::link(&[def]).unwrap();
        let r = region(vec![1, 1], vec![], vec![c(0), c(1)], vec![]);
        let succs = find_discrete_successors(&r, &net);
        assert_eq!(
            succs,
            vec![region(vec![0, 1], vec![], vec![c(0), c(1)], vec![])]
        );
        assert!(succs[0].is_exact_zero(c(0)));
    }

    #[test]
    fn no_enabled_guard_means_no_discrete_successors() {
        let mut def = AutomatonDef::new("A");
        def.clock("x", Some(2));
        def.location("q0", true);
        def.edge(EdgeDef::new("q0", "q0").guard_atom(AtomDef::clock("x", Rel::Eq, 1)));
        let net = Network::link(&[def]).unwrap();
        let init = initial_region(&net, &[LocId(0)]).unwrap();
        assert!(find_discrete_successors(&init, &net).is_empty());
    }

    #[test]
    fn discrete_predecessors_of_single_clock_reset() {
        // One clock, c_m = 1, guard x >= 0, reset {x}: the region with x
        // exactly zero has four predecessors.
        let mut def = AutomatonDef::new("A");
        def.clock("x", Some(1));
        def.location("q0", true);
        def.location("q1", false);
        def.edge(
            EdgeDef::new("q0", "q1")
                .guard_atom(AtomDef::clock("x", Rel::Ge, 0))
                .reset("x"),
        );
        let net = Network::link(&[def]).unwrap();
        let target = Region::all_unit(vec![LocId(1)], vec![0]);
        let preds = find_discrete_predecessors(&target, &net);
        let expected = vec![
            Region::from_parts(vec![LocId(0)], vec![0], vec![], vec![c(0)], vec![]),
            Region::from_parts(vec![LocId(0)], vec![0], vec![], vec![], vec![vec![c(0)]]),
            Region::from_parts(vec![LocId(0)], vec![1], vec![], vec![c(0)], vec![]),
            Region::from_parts(vec![LocId(0)], vec![1], vec![vec![c(0)]], vec![], vec![]),
        ];
        assert_eq!(preds.len(), 4);
        for e in &expected {
            assert!(preds.contains(e), "missing {:?}", e);
        }
    }

    #[test]
    fn resetless_transition_relocates_the_region() {
        let mut def = AutomatonDef::new("A");
        def.clock("x", Some(1));
        def.location("q0", true);
        def.location("q1", false);
        def.edge(EdgeDef::new("q0", "q1").guard_atom(AtomDef::clock("x", Rel::Ge, 1)));
        let net = Network::link(&[def]).unwrap();
        let at_q1 = region(vec![1], vec![], vec![c(0)], vec![]);
        let mut expected = at_q1.clone();
        expected.set_location(0, LocId(0));
        let mut at_q1_goal = at_q1;
        at_q1_goal.set_location(0, LocId(1));
        assert_eq!(
            find_discrete_predecessors(&at_q1_goal, &net),
            vec![expected]
        );

        // With the guard unsatisfied by the relocated region, nothing remains.
        let zero_at_q1 = Region::all_unit(vec![LocId(1)], vec![0]);
        assert!(find_discrete_predecessors(&zero_at_q1, &net).is_empty());
    }

    #[test]
    fn discrete_predecessors_skip_transitions_whose_resets_are_not_zero() {
        let mut def = AutomatonDef::new("A");
        def.clock("x", Some(1));
        def.location("q0", true);
        def.edge(EdgeDef::new("q0", "q0").reset("x"));
        let net = Network::link(&[def]).unwrap();
        let r = region(vec![1], vec![], vec![c(0)], vec![]);
        assert!(find_discrete_predecessors(&r, &net).is_empty());
    }

    /// Six clocks under the guard x>=0 && y>=1 && w>5 && p==1 && z>3 && s>4
    /// with resets {x, y, w, p}, applied backward to the region where
    /// x, y, w, p are exactly zero and z, s carry increasing fractions
    /// above 4.
    #[test]
    fn discrete_predecessors_rematerialize_mixed_guard_resets() {
        let mut def = AutomatonDef::new("A");
        for name in ["x", "y", "w", "p", "z", "s"] {
            def.clock(name, Some(5));
        }
        def.location("q0", true);
        def.location("q", false);
        def.edge(
            EdgeDef::new("q0", "q")
                .guard_atom(AtomDef::clock("x", Rel::Ge, 0))
                .guard_atom(AtomDef::clock("y", Rel::Ge, 1))
                .guard_atom(AtomDef::clock("w", Rel::Gt, 5))
                .guard_atom(AtomDef::clock("p", Rel::Eq, 1))
                .guard_atom(AtomDef::clock("z", Rel::Gt, 3))
                .guard_atom(AtomDef::clock("s", Rel::Gt, 4))
                .reset("x")
                .reset("y")
                .reset("w")
                .reset("p"),
        );
        let net = Network::link(&[def]).unwrap();
        let (x, y, w, p, z, s) = (c(0), c(1), c(2), c(3), c(4), c(5));
        let target = Region::from_parts(
            vec![LocId(1)],
            vec![0, 0, 0, 0, 4, 4],
            vec![],
            vec![x, y, w, p],
            vec![vec![z], vec![s]],
        );
        let preds = find_discrete_predecessors(&target, &net);
        let witness = Region::from_parts(
            vec![LocId(0)],
            vec![3, 2, 5, 1, 4, 4],
            vec![vec![w]],
            vec![p],
            vec![vec![z], vec![x, y], vec![s]],
        );
        assert!(preds.contains(&witness), "got {} predecessors", preds.len());
        // Every candidate satisfies the guard and steps forward to the target.
        for cand in &preds {
            assert!(satisfies_clock_atoms(
                cand,
                &net.components[0].transitions[0].guard.clock_atoms
            ));
            let fwd = discrete_successor_via(cand, 0, &net.components[0].transitions[0], &net);
            assert_eq!(fwd.as_ref(), Some(&target));
        }
    }

    #[test]
    fn part_regs_returns_input_for_empty_clock_set() {
        let net = two_clock_net();
        let r = region(vec![0, 0], vec![], vec![c(0), c(1)], vec![]);
        assert_eq!(part_regs(&r, 0, 0, &[], &Vec::new(), &net), vec![r.clone()]);
    }

    #[test]
    fn part_regs_unbounded_against_empty_context_counts_ordered_partitions() {
        let net = two_clock_net();
        let empty = Region::from_parts(vec![LocId(0)], vec![2, 2], vec![], vec![], vec![]);
        let hv: HAssign = vec![(c(0), 2), (c(1), 2)];
        let out = part_regs(&empty, 0, -1, &[c(0), c(1)], &hv, &net);
        assert_eq!(out.len(), 3);
        assert!(out.contains(&region(vec![2, 2], vec![vec![c(0), c(1)]], vec![], vec![])));
        assert!(out.contains(&region(
            vec![2, 2],
            vec![vec![c(0)], vec![c(1)]],
            vec![],
            vec![]
        )));
        assert!(out.contains(&region(
            vec![2, 2],
            vec![vec![c(1)], vec![c(0)]],
            vec![],
            vec![]
        )));
    }

    #[test]
    fn part_regs_places_maximum_valued_clocks_in_the_unit_set() {
        let net = two_clock_net();
        let base = region(vec![0, 0], vec![], vec![c(1)], vec![]);
        let out = part_regs(&base, 0, 0, &[c(0)], &vec![(c(0), 2)], &net);
        assert_eq!(
            out,
            vec![region(vec![2, 0], vec![], vec![c(0), c(1)], vec![])]
        );
    }

    #[test]
    fn part_regs_bounded_offers_unit_and_fraction_placements() {
        // Re-inserting two clocks below c_m into a region with no fractional
        // sets: each clock may sit at its integer value or carry a fraction,
        // with all orderings of the fractions.
        let net = two_clock_net();
        let empty = Region::from_parts(vec![LocId(0)], vec![0, 0], vec![], vec![], vec![]);
        let hv: HAssign = vec![(c(0), 0), (c(1), 0)];
        let out = part_regs(&empty, 0, 0, &[c(0), c(1)], &hv, &net);
        assert_eq!(out.len(), 6);
    }

    #[test]
    fn period_formula() {
        let m = region(vec![1, 1], vec![], vec![c(0)], vec![vec![c(1)]]);
        assert_eq!(period(&m), Ok(4));
        let p = region(vec![1, 1], vec![], vec![], vec![vec![c(0), c(1)]]);
        assert_eq!(period(&p), Ok(2));
        let p3 = region(
            vec![1, 1, 1],
            vec![],
            vec![],
            vec![vec![c(0)], vec![c(1)], vec![c(2)]],
        );
        assert_eq!(period(&p3), Ok(6));
        let u = region(vec![2, 2], vec![vec![c(0), c(1)]], vec![], vec![]);
        assert_eq!(period(&u), Err(KinematicsError::PeriodUnbounded));
    }

    #[test]
    fn skip_is_identity_below_one_period() {
        let m = region(vec![2, 1], vec![], vec![c(0)], vec![vec![c(1)]]);
        assert_eq!(delay_predecessor_skip(&m, 3), Ok(m.clone()));
    }

    #[test]
    fn skip_matches_iterated_single_steps() {
        let net = two_clock_net();
        let m = region(vec![2, 1], vec![], vec![c(0)], vec![vec![c(1)]]);
        let theta = period(&m).unwrap() as u64;
        let skipped = delay_predecessor_skip(&m, theta).unwrap();
        let mut stepped = m.clone();
        for _ in 0..theta {
            let preds = find_immediate_delay_predecessors(&stepped, &net);
            assert_eq!(preds.len(), 1, "bounded chain is deterministic");
            stepped = preds.into_iter().next().unwrap();
        }
        assert_eq!(skipped, stepped);
        assert_eq!(skipped.h(c(0)), 1);
        assert_eq!(skipped.h(c(1)), 0);
    }

    #[test]
    fn skip_refuses_to_cross_zero() {
        let m = region(vec![1, 1], vec![], vec![c(0)], vec![vec![c(1)]]);
        assert_eq!(
            delay_predecessor_skip(&m, 4),
            Err(KinematicsError::SkipHitsZero)
        );
    }

    #[test]
    fn pattern_without_order_expands_all_ordered_partitions() {
        let net = two_clock_net();
        let pattern = RegionPattern {
            location: LocId(0),
            shapes: vec![(c(0), ClockShape::Unbounded), (c(1), ClockShape::Unbounded)],
            unbounded_order: None,
            frac_order: None,
        };
        let out = enumerate_pattern(&pattern, &net).unwrap();
        assert_eq!(out.len(), 3);
    }

    #[test]
    fn pattern_with_order_expands_to_one_region() {
        let net = two_clock_net();
        let pattern = RegionPattern {
            location: LocId(0),
            shapes: vec![(c(0), ClockShape::Exact(1)), (c(1), ClockShape::Unbounded)],
            unbounded_order: Some(vec![vec![c(1)]]),
            frac_order: Some(vec![]),
        };
        let out = enumerate_pattern(&pattern, &net).unwrap();
        assert_eq!(
            out,
            vec![region(vec![1, 2], vec![vec![c(1)]], vec![c(0)], vec![])]
        );
    }

    #[test]
    fn pattern_fraction_orderings() {
        let net = two_clock_net();
        let pattern = RegionPattern {
            location: LocId(0),
            shapes: vec![
                (c(0), ClockShape::Interval(0)),
                (c(1), ClockShape::Interval(1)),
            ],
            unbounded_order: None,
            frac_order: None,
        };
        // Same fraction, c0 smaller, or c1 smaller.
        let out = enumerate_pattern(&pattern, &net).unwrap();
        assert_eq!(out.len(), 3);
        for r in &out {
            assert_eq!(r.status(c(0)), crate::model::ClockStatus::Fractional);
            assert_eq!(r.status(c(1)), crate::model::ClockStatus::Fractional);
        }
    }

    #[test]
    fn pattern_errors() {
        let net = two_clock_net();
        let missing = RegionPattern {
            location: LocId(0),
            shapes: vec![(c(0), ClockShape::Exact(0))],
            unbounded_order: None,
            frac_order: None,
        };
        assert!(matches!(
            enumerate_pattern(&missing, &net),
            Err(PatternError::Unconstrained(_))
        ));
        let contradictory = RegionPattern {
            location: LocId(0),
            shapes: vec![(c(0), ClockShape::Exact(3)), (c(1), ClockShape::Exact(0))],
            unbounded_order: None,
            frac_order: None,
        };
        assert!(matches!(
            enumerate_pattern(&contradictory, &net),
            Err(PatternError::Contradiction(_, _))
        ));
    }
}
