//! Differential-testing support: a concrete-valuation simulator with exact
//! rational arithmetic, the abstraction function from valuations to regions,
//! exhaustive region enumeration, and the ordered-partition counting formulas.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::model::{AutomatonDef, ClockId, LocId, Network};
use crate::region::Region;

/// Exact clock value.
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("negative clock value")]
    NegativeValue,
    #[error("two or more clocks are unbounded but no unbounding order was supplied")]
    MissingUnboundOrder,
    #[error("unbounding order does not cover exactly the unbounded clocks")]
    BadUnboundOrder,
}

fn floor_of(v: &Rat) -> BigInt {
    v.floor().to_integer()
}

fn frac_of(v: &Rat) -> Rat {
    v - v.floor()
}

/// Abstracts a concrete valuation into the unique region containing it.
///
/// The valuation alone cannot recover the order in which clocks became
/// unbounded, so when two or more clocks exceed their maximum constant the
/// caller must supply that history as `unbound_order`, earliest group first.
pub fn abstract_valuation(
    values: &[Rat],
    locs: Vec<LocId>,
    net: &Network,
    unbound_order: Option<&[Vec<ClockId>]>,
) -> Result<Region, OracleError> {
    assert_eq!(values.len(), net.clock_count());
    let mut h = vec![0u32; values.len()];
    let mut unit = Vec::new();
    let mut unbounded_clocks = Vec::new();
    let mut frac_clocks: Vec<(Rat, ClockId)> = Vec::new();

    for (i, v) in values.iter().enumerate() {
        if v.is_negative() {
            return Err(OracleError::NegativeValue);
        }
        let id = ClockId(i as u32);
        let cm = net.clock_max(id);
        if *v > Rat::from(BigInt::from(cm)) {
            h[i] = cm;
            unbounded_clocks.push(id);
        } else {
            let f = frac_of(v);
            h[i] = floor_of(v).to_u32().expect("clock value fits u32");
            if f.is_zero() {
                unit.push(id);
            } else {
                frac_clocks.push((f, id));
            }
        }
    }

    // Group bounded clocks by equal fractional parts, ascending.
    frac_clocks.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut fractional: Vec<Vec<ClockId>> = Vec::new();
    let mut last: Option<Rat> = None;
    for (f, id) in frac_clocks {
        if last.as_ref() == Some(&f) {
            fractional.last_mut().unwrap().push(id);
        } else {
            fractional.push(vec![id]);
            last = Some(f);
        }
    }

    let unbounded: Vec<Vec<ClockId>> = match unbound_order {
        None => {
            if unbounded_clocks.len() > 1 {
                return Err(OracleError::MissingUnboundOrder);
            }
            unbounded_clocks.iter().map(|&c| vec![c]).collect()
        }
        Some(groups) => {
            let mut covered: Vec<ClockId> = groups.iter().flatten().copied().collect();
            covered.sort_unstable();
            let mut expected = unbounded_clocks.clone();
            expected.sort_unstable();
            if covered != expected {
                return Err(OracleError::BadUnboundOrder);
            }
            groups.to_vec()
        }
    };

    Ok(Region::from_parts(locs, h, unbounded, unit, fractional))
}

/// A canonical concrete valuation inside the region.
///
/// Fractional groups `X_1..X_r` receive fractions `i/(r+1)`; unbounded clocks
/// receive `c_m + k` with the earliest-unbounded group the largest.
pub fn sample(region: &Region, net: &Network) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); region.clock_count()];
    let r = region.frac_count();
    for &c in region.unit_set() {
        out[c.0 as usize] = Rat::from(BigInt::from(region.h(c)));
    }
    for (p, set) in region.fractional_sets().iter().enumerate() {
        let f = rat((p + 1) as i64, (r + 1) as i64);
        for &c in set {
            out[c.0 as usize] = Rat::from(BigInt::from(region.h(c))) + f.clone();
        }
    }
    let ell = region.ell();
    for (p, set) in region.unbounded_sets().iter().enumerate() {
        // Earliest group (p = 0) has been growing the longest.
        let k = (ell - p) as i64;
        for &c in set {
            out[c.0 as usize] =
                Rat::from(BigInt::from(net.clock_max(c))) + Rat::from(BigInt::from(k));
        }
    }
    out
}

/// Sweeps time forward from a sample of `region`, abstracting after every
/// boundary crossing, until all clocks are unbounded. The first element is
/// `region` itself; the remainder is the semantic delay-successor chain.
pub fn delay_sweep_chain(region: &Region, net: &Network) -> Vec<Region> {
    let mut values = sample(region, net);
    let mut order: Vec<Vec<ClockId>> = region.unbounded_sets().to_vec();
    let mut chain = Vec::new();
    loop {
        let current = abstract_valuation(&values, region.locations().to_vec(), net, Some(&order))
            .expect("sweep valuation abstracts");
        chain.push(current);

        let bounded: Vec<usize> = (0..values.len())
            .filter(|&i| values[i] <= Rat::from(BigInt::from(net.clock_max(ClockId(i as u32)))))
            .collect();
        if bounded.is_empty() {
            break;
        }
        let fracs: Vec<Rat> = bounded.iter().map(|&i| frac_of(&values[i])).collect();
        let positive: Vec<&Rat> = fracs.iter().filter(|f| !f.is_zero()).collect();
        let delta = if positive.len() == fracs.len() {
            // All bounded clocks strictly inside a unit: jump to the next boundary.
            Rat::one() - positive.iter().max().copied().unwrap().clone()
        } else {
            // Some clock sits on a boundary: any small step enters the next region.
            let mut bound = Rat::one();
            if let Some(max) = positive.iter().max() {
                bound = bound.min(Rat::one() - (*max).clone());
            }
            if let Some(min) = positive.iter().min() {
                bound = bound.min((*min).clone());
            }
            bound / Rat::from(BigInt::from(2))
        };
        // Clocks leaving a unit at their maximum constant become unbounded now,
        // all of them simultaneously.
        let newly_unbounded: Vec<ClockId> = bounded
            .iter()
            .filter(|&&i| {
                frac_of(&values[i]).is_zero()
                    && values[i] == Rat::from(BigInt::from(net.clock_max(ClockId(i as u32))))
            })
            .map(|&i| ClockId(i as u32))
            .collect();
        if !newly_unbounded.is_empty() {
            order.push(newly_unbounded);
        }
        for v in values.iter_mut() {
            *v += delta.clone();
        }
    }
    chain
}

// ---------------------------------------------------------------------------
// Counting formulas
// ---------------------------------------------------------------------------

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= BigUint::from(n - i);
        den *= BigUint::from(i + 1);
    }
    num / den
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// Fubini number: ordered set partitions of an n-element set, via the
/// recurrence a_n = sum over i of C(n,i) * a_{n-i}.
pub fn fubini(n: u64) -> BigUint {
    let mut a: Vec<BigUint> = vec![BigUint::one()];
    for m in 1..=n {
        let mut total = BigUint::zero();
        for i in 1..=m {
            total += binomial(m, i) * a[(m - i) as usize].clone();
        }
        a.push(total);
    }
    a[n as usize].clone()
}

/// Stirling number of the second kind by the alternating-sum formula.
pub fn stirling2(n: u64, k: u64) -> BigUint {
    let mut sum = BigInt::zero();
    for d in 0..=k {
        let term = BigInt::from(binomial(k, d)) * BigInt::from(k - d).pow(n as u32);
        if d % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let sum = sum / BigInt::from(factorial(k));
    assert!(!sum.is_negative());
    sum.to_biguint().unwrap()
}

fn ordered_partition_count(m: u64) -> BigUint {
    (0..=m).map(|k| factorial(k) * stirling2(m, k)).sum()
}

/// Upper bound on discrete predecessors of a region over one transition for
/// `n` clocks sharing the maximum constant `c_m`: clocks split into `u`
/// unbounded and `n-u` bounded ones, of which `i` sit at integer values;
/// each side contributes its value choices times its ordered partitions.
pub fn lemma1_bound(n: u64, c_m: u64) -> BigUint {
    let mut total = BigUint::zero();
    for u in 0..=n {
        let b = n - u;
        let mut bounded = BigUint::zero();
        for i in 0..=b {
            bounded += BigUint::from(c_m + 1).pow(i as u32)
                * BigUint::from(c_m).pow((b - i) as u32)
                * binomial(b, b - i)
                * ordered_partition_count(b - i);
        }
        total += bounded * binomial(n, u) * ordered_partition_count(u);
    }
    total
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration
// ---------------------------------------------------------------------------

/// All ordered partitions of `items` into non-empty blocks.
pub fn ordered_partitions(items: &[ClockId]) -> Vec<Vec<Vec<ClockId>>> {
    let mut out: Vec<Vec<Vec<ClockId>>> = vec![Vec::new()];
    for &item in items {
        let mut next = Vec::new();
        for p in &out {
            for b in 0..p.len() {
                let mut q = p.clone();
                q[b].push(item);
                next.push(q);
            }
            for slot in 0..=p.len() {
                let mut q = p.clone();
                q.insert(slot, vec![item]);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Every valid region over the network's clocks at a fixed location tuple.
pub fn enumerate_regions(net: &Network, locs: &[LocId]) -> Vec<Region> {
    #[derive(Clone)]
    enum Slot {
        Unit(u32),
        Frac(u32),
        Unb,
    }
    let n = net.clock_count();
    let mut assignments: Vec<Vec<Slot>> = vec![Vec::new()];
    for i in 0..n {
        let cm = net.clock_max(ClockId(i as u32));
        let mut next = Vec::new();
        for a in &assignments {
            for h in 0..=cm {
                let mut b = a.clone();
                b.push(Slot::Unit(h));
                next.push(b);
            }
            for h in 0..cm {
                let mut b = a.clone();
                b.push(Slot::Frac(h));
                next.push(b);
            }
            let mut b = a.clone();
            b.push(Slot::Unb);
            next.push(b);
        }
        assignments = next;
    }

    let mut out = Vec::new();
    for a in &assignments {
        let mut h = vec![0u32; n];
        let mut unit = Vec::new();
        let mut frac_clocks = Vec::new();
        let mut unb_clocks = Vec::new();
        for (i, slot) in a.iter().enumerate() {
            let id = ClockId(i as u32);
            match slot {
                Slot::Unit(v) => {
                    h[i] = *v;
                    unit.push(id);
                }
                Slot::Frac(v) => {
                    h[i] = *v;
                    frac_clocks.push(id);
                }
                Slot::Unb => {
                    h[i] = net.clock_max(id);
                    unb_clocks.push(id);
                }
            }
        }
        for unb_part in ordered_partitions(&unb_clocks) {
            for frac_part in ordered_partitions(&frac_clocks) {
                out.push(Region::from_parts(
                    locs.to_vec(),
                    h.clone(),
                    unb_part.clone(),
                    unit.clone(),
                    frac_part,
                ));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Deterministic generation support
// ---------------------------------------------------------------------------

/// Splitmix64; deterministic across platforms, good enough for test models.
pub struct Prng(u64);

impl Prng {
    pub fn new(seed: u64) -> Self {
        Prng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }
}

/// A single-location test network with clocks `c0..` of the given maxima.
pub fn scratch_net(maxes: &[u32]) -> Network {
    let mut def = AutomatonDef::new("A");
    for (i, &m) in maxes.iter().enumerate() {
        def.clock(&format!("c{}", i), Some(m));
    }
    def.location("q0", true);
    Network::link(&[def]).unwrap()
}

/// A random variable-free automaton: up to `max_locs` locations, guards built
/// from random clock atoms, random reset sets. Deterministic in the seed.
pub fn random_automaton(seed: u64, n_clocks: usize, max_locs: usize, c_m: u32) -> AutomatonDef {
    use crate::model::{AtomDef, EdgeDef, ExprDef, Rel};
    let mut rng = Prng::new(seed);
    let mut def = AutomatonDef::new("R");
    for i in 0..n_clocks {
        def.clock(&format!("c{}", i), Some(c_m));
    }
    let n_locs = 1 + rng.below(max_locs as u64) as usize;
    for i in 0..n_locs {
        def.location(&format!("q{}", i), i == 0);
    }
    let rels = [Rel::Lt, Rel::Le, Rel::Eq, Rel::Ge, Rel::Gt];
    let n_edges = 1 + rng.below(2 * n_locs as u64) as usize;
    for _ in 0..n_edges {
        let src = format!("q{}", rng.below(n_locs as u64));
        let dst = format!("q{}", rng.below(n_locs as u64));
        let mut edge = EdgeDef::new(&src, &dst);
        let n_atoms = rng.below(3) as usize;
        for _ in 0..n_atoms {
            let clock = format!("c{}", rng.below(n_clocks as u64));
            let rel = rels[rng.below(5) as usize];
            let bound = rng.below(c_m as u64 + 1) as u32;
            edge = edge.guard_atom(AtomDef::new(
                ExprDef::name(&clock),
                rel,
                ExprDef::Const(bound as i64),
            ));
        }
        for i in 0..n_clocks {
            if rng.chance(1, 3) {
                edge = edge.reset(&format!("c{}", i));
            }
        }
        def.edge(edge);
    }
    def
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::initial_region;

    #[test]
    fn fubini_small_values() {
        assert_eq!(fubini(0), BigUint::from(1u32));
        assert_eq!(fubini(1), BigUint::from(1u32));
        assert_eq!(fubini(2), BigUint::from(3u32));
        assert_eq!(fubini(3), BigUint::from(13u32));
        assert_eq!(fubini(4), BigUint::from(75u32));
    }

    #[test]
    fn stirling_small_values() {
        assert_eq!(stirling2(4, 2), BigUint::from(7u32));
        assert_eq!(stirling2(3, 0), BigUint::from(0u32));
        assert_eq!(stirling2(0, 0), BigUint::from(1u32));
        for n in 1..=6 {
            assert_eq!(stirling2(n, n), BigUint::from(1u32));
        }
    }

    #[test]
    fn fubini_agrees_with_stirling_sum() {
        for n in 0..=8 {
            assert_eq!(fubini(n), ordered_partition_count(n));
        }
    }

    #[test]
    fn lemma1_hand_values() {
        assert_eq!(lemma1_bound(1, 1), BigUint::from(4u32));
        assert_eq!(lemma1_bound(1, 2), BigUint::from(6u32));
    }

    #[test]
    fn ordered_partitions_counts_match_fubini() {
        for n in 0..=5 {
            let items: Vec<ClockId> = (0..n).map(ClockId).collect();
            let parts = ordered_partitions(&items);
            assert_eq!(BigUint::from(parts.len()), fubini(n as u64));
        }
    }

    #[test]
    fn abstraction_of_worked_example_valuation() {
        // x = y = 2.3, z = 6, w = 7 with c_m = 5 and z unbounded before w.
        let net = scratch_net(&[5, 5, 5, 5]);
        let (x, y, z, w) = (ClockId(0), ClockId(1), ClockId(2), ClockId(3));
        let values = vec![rat(23, 10), rat(23, 10), rat(6, 1), rat(7, 1)];
        let r =
            abstract_valuation(&values, vec![LocId(0)], &net, Some(&[vec![z], vec![w]])).unwrap();
        r.check_valid(&net).unwrap();
        assert_eq!(r.h(x), 2);
        assert_eq!(r.h(y), 2);
        assert_eq!(r.h(z), 5);
        assert_eq!(r.h(w), 5);
        assert_eq!(r.set_index(z), -1);
        assert_eq!(r.set_index(w), -2);
        assert_eq!(r.set_index(x), 1);
        assert_eq!(r.set_index(y), 1);
    }

    #[test]
    fn abstraction_requires_order_for_two_unbounded_clocks() {
        let net = scratch_net(&[1, 1]);
        let values = vec![rat(3, 1), rat(2, 1)];
        assert_eq!(
            abstract_valuation(&values, vec![LocId(0)], &net, None),
            Err(OracleError::MissingUnboundOrder)
        );
    }

    #[test]
    fn abstraction_of_zero_and_half() {
        let net = scratch_net(&[1]);
        let r = abstract_valuation(&[rat(1, 2)], vec![LocId(0)], &net, None).unwrap();
        assert_eq!(r.h(ClockId(0)), 0);
        assert_eq!(r.set_index(ClockId(0)), 1);

        let init = abstract_valuation(&[rat(0, 1)], vec![LocId(0)], &net, None).unwrap();
        assert_eq!(init, initial_region(&net, &[LocId(0)]).unwrap());
    }

    #[test]
    fn sample_round_trips_through_abstraction() {
        let net = scratch_net(&[2, 2, 2]);
        for r in enumerate_regions(&net, &[LocId(0)]) {
            let v = sample(&r, &net);
            let back =
                abstract_valuation(&v, vec![LocId(0)], &net, Some(r.unbounded_sets())).unwrap();
            assert_eq!(back.canonical_key(), r.canonical_key(), "{:?}", r);
        }
    }

    #[test]
    fn every_enumerated_region_is_valid_and_classified_once() {
        let net = scratch_net(&[2, 1]);
        let regions = enumerate_regions(&net, &[LocId(0)]);
        for r in &regions {
            r.check_valid(&net).unwrap();
            let c = r.class();
            let z = r.frac_count() == 0 && !r.unit_set().is_empty();
            let p = r.frac_count() > 0 && r.unit_set().is_empty();
            let m = r.frac_count() > 0 && !r.unit_set().is_empty();
            let u = r.ell() > 0 && r.frac_count() == 0 && r.unit_set().is_empty();
            let claims = [z, p, m, u];
            assert_eq!(claims.iter().filter(|&&b| b).count(), 1);
            let expected = match claims.iter().position(|&b| b).unwrap() {
                0 => crate::region::RegionClass::Z,
                1 => crate::region::RegionClass::P,
                2 => crate::region::RegionClass::M,
                _ => crate::region::RegionClass::U,
            };
            assert_eq!(c, expected);
        }
        // Also ensure the enumeration has no duplicates.
        let mut keys: Vec<_> = regions.iter().map(|r| r.canonical_key()).collect();
        keys.sort();
        let before = keys.len();
        keys.dedup();
        assert_eq!(before, keys.len());
    }

    #[test]
    fn enumeration_count_matches_lemma1_for_two_clocks() {
        let net = scratch_net(&[1, 1]);
        let regions = enumerate_regions(&net, &[LocId(0)]);
        assert_eq!(BigUint::from(regions.len()), lemma1_bound(2, 1));
    }
}
