//! Region representation based on ordered clock partitions.
//!
//! A region stores, besides the location tuple and the integer part of every
//! clock, a partition of the clocks into three zones: an ordered list of
//! unbounded sets recording the order in which clocks exceeded their maximum
//! constants, the unit set of bounded clocks with fractional part zero, and an
//! ordered list of fractional sets sorted by increasing fractional part.

use crate::model::{ClockId, ClockStatus, LocId, Network};

/// Taxonomy of regions driving the delay successor/predecessor algorithms.
///
/// `Z`: all bounded clocks at integer values (unit set non-empty).
/// `P`: all bounded clocks with positive fractions (unit set empty).
/// `M`: bounded clocks split between the unit set and fractional sets.
/// `U`: every clock unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionClass {
    Z,
    P,
    M,
    U,
}

/// A region of a (network of) timed automata.
///
/// Clock sets are kept sorted and empty non-unit sets are never stored, so
/// structural equality of two `Region` values coincides with structural
/// equivalence of the regions they denote.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Region {
    locs: Vec<LocId>,
    h: Vec<u32>,
    /// Unbounded sets, earliest first: entry `p` is the set at index `-(p+1)`.
    unbounded: Vec<Vec<ClockId>>,
    /// The unit set `X_0`; may be empty.
    unit: Vec<ClockId>,
    /// Fractional sets by increasing fractional part: index `p` holds `X_{p+1}`.
    fractional: Vec<Vec<ClockId>>,
}

/// Opaque comparable key; two regions get equal keys iff they are
/// structurally equivalent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RegionKey(Box<[i64]>);

/// A region paired with an integer-variable valuation; the unit of search.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SearchState {
    pub region: Region,
    pub vars: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegionError {
    #[error("location '{0}' is not an initial location")]
    NotInitial(String),
    #[error("expected a location for each of the {expected} components, got {got}")]
    LocationArity { expected: usize, got: usize },
}

impl Region {
    /// Builds a region with every clock in the unit set at the given value.
    pub fn all_unit(locs: Vec<LocId>, h: Vec<u32>) -> Region {
        let unit = (0..h.len() as u32).map(ClockId).collect();
        Region {
            locs,
            h,
            unbounded: Vec::new(),
            unit,
            fractional: Vec::new(),
        }
    }

    /// Assembles a region from explicit parts, canonicalizing set order.
    pub fn from_parts(
        locs: Vec<LocId>,
        h: Vec<u32>,
        unbounded: Vec<Vec<ClockId>>,
        unit: Vec<ClockId>,
        fractional: Vec<Vec<ClockId>>,
    ) -> Region {
        let mut r = Region {
            locs,
            h,
            unbounded,
            unit,
            fractional,
        };
        r.canonicalize();
        r
    }

    /// Sorts every set and drops empty non-unit sets.
    pub fn canonicalize(&mut self) {
        self.unit.sort_unstable();
        self.unit.dedup();
        for s in &mut self.unbounded {
            s.sort_unstable();
            s.dedup();
        }
        for s in &mut self.fractional {
            s.sort_unstable();
            s.dedup();
        }
        self.unbounded.retain(|s| !s.is_empty());
        self.fractional.retain(|s| !s.is_empty());
    }

    pub fn location(&self, component: usize) -> LocId {
        self.locs[component]
    }

    pub fn locations(&self) -> &[LocId] {
        &self.locs
    }

    pub fn set_location(&mut self, component: usize, loc: LocId) {
        self.locs[component] = loc;
    }

    pub fn clock_count(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self, clock: ClockId) -> u32 {
        self.h[clock.0 as usize]
    }

    pub fn set_h(&mut self, clock: ClockId, value: u32) {
        self.h[clock.0 as usize] = value;
    }

    /// Number of unbounded sets.
    pub fn ell(&self) -> usize {
        self.unbounded.len()
    }

    /// Number of fractional sets (the unit set not counted).
    pub fn frac_count(&self) -> usize {
        self.fractional.len()
    }

    pub fn unit_set(&self) -> &[ClockId] {
        &self.unit
    }

    pub fn unbounded_sets(&self) -> &[Vec<ClockId>] {
        &self.unbounded
    }

    pub fn fractional_sets(&self) -> &[Vec<ClockId>] {
        &self.fractional
    }

    pub fn status(&self, clock: ClockId) -> ClockStatus {
        if self.unit.contains(&clock) {
            ClockStatus::Unit
        } else if self.fractional.iter().any(|s| s.contains(&clock)) {
            ClockStatus::Fractional
        } else {
            ClockStatus::Unbounded
        }
    }

    /// Signed set index of a clock: `-j` for the j-th unbounded set (−1 is
    /// the earliest), 0 for the unit set, `i` for the i-th fractional set
    /// (1 has the smallest fractional part).
    pub fn set_index(&self, clock: ClockId) -> i32 {
        if let Some(p) = self.unbounded.iter().position(|s| s.contains(&clock)) {
            return -((p + 1) as i32);
        }
        if self.unit.contains(&clock) {
            return 0;
        }
        let p = self
            .fractional
            .iter()
            .position(|s| s.contains(&clock))
            .expect("clock not in any set");
        (p + 1) as i32
    }

    /// Classification per the Z/P/M/U taxonomy.
    pub fn class(&self) -> RegionClass {
        let r = self.frac_count();
        if r == 0 {
            if self.unit.is_empty() && self.ell() > 0 {
                RegionClass::U
            } else {
                RegionClass::Z
            }
        } else if self.unit.is_empty() {
            RegionClass::P
        } else {
            RegionClass::M
        }
    }

    /// Clock has integer value exactly zero (no fractional part).
    pub fn is_exact_zero(&self, clock: ClockId) -> bool {
        self.h(clock) == 0 && self.unit.contains(&clock)
    }

    /// All clocks exactly zero and every location initial.
    pub fn is_initial(&self, net: &Network) -> bool {
        self.unit.len() == self.h.len()
            && self.h.iter().all(|&v| v == 0)
            && self
                .locs
                .iter()
                .enumerate()
                .all(|(ci, &l)| net.components[ci].locations[l.0 as usize].initial)
    }

    /// Sets the given clocks to exactly zero, moving them into the unit set.
    pub fn apply_resets(&mut self, clocks: &[ClockId]) {
        for &x in clocks {
            self.set_h(x, 0);
            if !self.unit.contains(&x) {
                for s in &mut self.unbounded {
                    s.retain(|&c| c != x);
                }
                for s in &mut self.fractional {
                    s.retain(|&c| c != x);
                }
                self.unit.push(x);
            }
        }
        self.canonicalize();
    }

    /// Moves the contents of the unit set out, leaving it empty.
    pub fn take_unit(&mut self) -> Vec<ClockId> {
        std::mem::take(&mut self.unit)
    }

    /// Drops a clock from the unit set, leaving it unassigned; the caller is
    /// responsible for re-inserting it before the region escapes.
    pub fn remove_from_unit(&mut self, clock: ClockId) {
        self.unit.retain(|&c| c != clock);
    }

    /// Replaces the whole sequence of unbounded sets, earliest first.
    pub fn set_unbounded_sets(&mut self, sets: Vec<Vec<ClockId>>) {
        self.unbounded = sets;
    }

    /// Replaces the whole sequence of fractional sets, smallest first.
    pub fn set_fractional_sets(&mut self, sets: Vec<Vec<ClockId>>) {
        self.fractional = sets;
    }

    /// Merges clocks into the unit set.
    pub fn merge_into_unit(&mut self, clocks: Vec<ClockId>) {
        self.unit.extend(clocks);
        self.unit.sort_unstable();
    }

    /// Appends a set as the most recently unbounded group.
    pub fn push_unbounded_recent(&mut self, set: Vec<ClockId>) {
        debug_assert!(!set.is_empty());
        self.unbounded.push(set);
    }

    /// Removes and returns the most recently unbounded group.
    pub fn pop_unbounded_recent(&mut self) -> Option<Vec<ClockId>> {
        self.unbounded.pop()
    }

    /// Inserts a set as the new smallest-fraction group `X_1`.
    pub fn insert_fractional_smallest(&mut self, set: Vec<ClockId>) {
        debug_assert!(!set.is_empty());
        self.fractional.insert(0, set);
    }

    /// Appends a set as the new largest-fraction group `X_{r+1}`.
    pub fn push_fractional_largest(&mut self, set: Vec<ClockId>) {
        debug_assert!(!set.is_empty());
        self.fractional.push(set);
    }

    /// Removes and returns the largest-fraction group `X_r`.
    pub fn pop_fractional_largest(&mut self) -> Option<Vec<ClockId>> {
        self.fractional.pop()
    }

    /// Removes and returns the smallest-fraction group `X_1`.
    pub fn remove_fractional_smallest(&mut self) -> Option<Vec<ClockId>> {
        if self.fractional.is_empty() {
            None
        } else {
            Some(self.fractional.remove(0))
        }
    }

    /// Restricts the region to the given clocks, renumbering them by their
    /// position in `keep`. The location tuple is left untouched.
    pub fn project(&self, keep: &[ClockId]) -> Region {
        let map = |s: &Vec<ClockId>| -> Vec<ClockId> {
            let mut out: Vec<ClockId> = s
                .iter()
                .filter_map(|c| keep.iter().position(|k| k == c))
                .map(|i| ClockId(i as u32))
                .collect();
            out.sort_unstable();
            out
        };
        let mut r = Region {
            locs: self.locs.clone(),
            h: keep.iter().map(|&c| self.h(c)).collect(),
            unbounded: self.unbounded.iter().map(map).collect(),
            unit: map(&self.unit),
            fractional: self.fractional.iter().map(map).collect(),
        };
        r.canonicalize();
        r
    }

    /// Encodes the region as an opaque, totally ordered key.
    pub fn canonical_key(&self) -> RegionKey {
        let mut v = Vec::with_capacity(1 + self.locs.len() + 2 * self.h.len());
        v.push(self.locs.len() as i64);
        for l in &self.locs {
            v.push(l.0 as i64);
        }
        for c in 0..self.h.len() {
            let id = ClockId(c as u32);
            v.push(self.h(id) as i64);
            v.push(self.set_index(id) as i64);
        }
        RegionKey(v.into_boxed_slice())
    }

    /// Structural well-formedness check, used by tests and debug assertions.
    pub fn check_valid(&self, net: &Network) -> Result<(), String> {
        if self.locs.len() != net.components.len() {
            return Err(format!(
                "location tuple has {} entries for {} components",
                self.locs.len(),
                net.components.len()
            ));
        }
        if self.h.len() != net.clock_count() {
            return Err("integer-part table size mismatch".to_string());
        }
        let mut seen = vec![false; self.h.len()];
        let mut mark = |s: &[ClockId]| -> Result<(), String> {
            for &c in s {
                let i = c.0 as usize;
                if i >= seen.len() {
                    return Err(format!("clock id {} out of range", i));
                }
                if seen[i] {
                    return Err(format!("clock {} appears in two sets", i));
                }
                seen[i] = true;
            }
            Ok(())
        };
        for s in &self.unbounded {
            if s.is_empty() {
                return Err("empty unbounded set".to_string());
            }
            mark(s)?;
        }
        mark(&self.unit)?;
        for s in &self.fractional {
            if s.is_empty() {
                return Err("empty fractional set".to_string());
            }
            mark(s)?;
        }
        if !seen.iter().all(|&b| b) {
            return Err("sets do not cover all clocks".to_string());
        }
        for c in 0..self.h.len() {
            let id = ClockId(c as u32);
            let cm = net.clock_max(id);
            match self.status(id) {
                ClockStatus::Unbounded => {
                    if self.h(id) != cm {
                        return Err(format!(
                            "unbounded clock {} has h {} != c_m {}",
                            c,
                            self.h(id),
                            cm
                        ));
                    }
                }
                ClockStatus::Fractional => {
                    if cm == 0 || self.h(id) > cm - 1 {
                        return Err(format!(
                            "fractional clock {} has h {} with c_m {}",
                            c,
                            self.h(id),
                            cm
                        ));
                    }
                }
                ClockStatus::Unit => {
                    if self.h(id) > cm {
                        return Err(format!(
                            "unit clock {} has h {} > c_m {}",
                            c,
                            self.h(id),
                            cm
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The unique initial region at the given location tuple: all clocks exactly
/// zero.
pub fn initial_region(net: &Network, locs: &[LocId]) -> Result<Region, RegionError> {
    if locs.len() != net.components.len() {
        return Err(RegionError::LocationArity {
            expected: net.components.len(),
            got: locs.len(),
        });
    }
    for (ci, &l) in locs.iter().enumerate() {
        let loc = &net.components[ci].locations[l.0 as usize];
        if !loc.initial {
            return Err(RegionError::NotInitial(loc.name.clone()));
        }
    }
    Ok(Region::all_unit(locs.to_vec(), vec![0; net.clock_count()]))
}

/// Classification per the Z/P/M/U taxonomy.
pub fn classify(region: &Region) -> RegionClass {
    region.class()
}

/// Opaque comparable key for visited stores and deterministic ordering.
pub fn canonical_key(region: &Region) -> RegionKey {
    region.canonical_key()
}
