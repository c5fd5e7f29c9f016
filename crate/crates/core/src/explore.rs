//! Forward and backward reachability engines with DFS/BFS frontiers, a
//! canonical visited store, limits and statistics.

use std::collections::{HashMap, VecDeque};
use std::time::{Duration, Instant};

use crate::kinematics::{
    discrete_predecessors_via, enumerate_pattern, find_immediate_delay_predecessors, skip_periods,
    RegionPattern,
};
use crate::model::{eval_query, satisfies_invariant, Network, Query, UpdateError};
use crate::network::{network_delay_successor, network_discrete_successors, StepLabel};
use crate::region::{initial_region, Region, SearchState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Dfs,
    Bfs,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Dfs => "dfs",
            Strategy::Bfs => "bfs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub strategy: Strategy,
    pub direction: Direction,
    /// Stop once this many regions have been generated.
    pub max_regions: Option<usize>,
    pub max_millis: Option<u64>,
    /// Opt-in acceleration of backward delay chains by whole periods.
    pub delay_skip: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            strategy: Strategy::Dfs,
            direction: Direction::Forward,
            max_regions: None,
            max_millis: None,
            delay_skip: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Reachable,
    Unreachable,
    LimitExceeded,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Reachable => "reachable",
            Verdict::Unreachable => "unreachable",
            Verdict::LimitExceeded => "limit-exceeded",
        }
    }
}

/// One state of a witness trace together with the step that produced it from
/// the previous entry (`None` for the first).
#[derive(Debug, Clone)]
pub struct WitnessStep {
    pub state: SearchState,
    pub step: Option<StepLabel>,
}

#[derive(Debug, Clone)]
pub struct SearchStats {
    pub verdict: Verdict,
    /// Regions produced by the successor (or predecessor) computations over
    /// the whole run, before deduplication: expanding a state forward counts
    /// one region for the delay computation (the delay step of an
    /// all-unbounded region yields the region itself) plus one per discrete
    /// successor; expanding backward counts every returned predecessor.
    pub regions_stored: usize,
    /// Unique canonical states in the visited store at termination.
    pub states_stored: usize,
    pub elapsed: Duration,
    pub strategy: Strategy,
    pub direction: Direction,
    pub witness: Option<Vec<WitnessStep>>,
    pub diagnostic: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ExploreError {
    #[error("integer update failed: {error}")]
    Update {
        error: UpdateError,
        /// Path from an initial state to the state whose expansion failed.
        trace: Vec<WitnessStep>,
    },
    #[error(
        "backward reachability is restricted to a single automaton without integer variables: {0}"
    )]
    BackwardScope(String),
}

struct Limits {
    max_regions: Option<usize>,
    deadline: Option<Instant>,
}

impl Limits {
    fn new(cfg: &SearchConfig, start: Instant) -> Limits {
        Limits {
            max_regions: cfg.max_regions,
            deadline: cfg.max_millis.map(|ms| start + Duration::from_millis(ms)),
        }
    }

    fn exceeded(&self, stored: usize) -> bool {
        if let Some(max) = self.max_regions {
            if stored > max {
                return true;
            }
        }
        if let Some(deadline) = self.deadline {
            if Instant::now() > deadline {
                return true;
            }
        }
        false
    }
}

// ---------------------------------------------------------------------------
// Forward search
// ---------------------------------------------------------------------------

type ForwardStore = HashMap<SearchState, Option<(SearchState, StepLabel)>>;

fn forward_witness(store: &ForwardStore, last: &SearchState) -> Vec<WitnessStep> {
    let mut steps = Vec::new();
    let mut current = last.clone();
    loop {
        match store.get(&current).expect("witness states are stored") {
            Some((parent, label)) => {
                steps.push(WitnessStep {
                    state: current.clone(),
                    step: Some(*label),
                });
                current = parent.clone();
            }
            None => {
                steps.push(WitnessStep {
                    state: current,
                    step: None,
                });
                break;
            }
        }
    }
    steps.reverse();
    steps
}

/// Explores forward from the initial states until the query is satisfied,
/// the reachable space is exhausted, or a limit is hit.
///
/// Expansion order is deterministic: children are pushed with the delay
/// successor first and transitions in declaration order, so BFS visits delay
/// successors before discrete ones while DFS expands discrete successors
/// before walking delay chains.
pub fn forward_reach(
    net: &Network,
    query: &Query,
    cfg: &SearchConfig,
) -> Result<SearchStats, ExploreError> {
    let start = Instant::now();
    let limits = Limits::new(cfg, start);
    let mut visited: ForwardStore = HashMap::new();
    let mut frontier: VecDeque<SearchState> = VecDeque::new();

    for locs in net.initial_location_tuples() {
        let region = initial_region(net, &locs).expect("initial location tuple");
        if !satisfies_invariant(&region, net) {
            continue;
        }
        let state = SearchState {
            region,
            vars: net.initial_vars(),
        };
        if visited.insert(state.clone(), None).is_none() {
            frontier.push_back(state);
        }
    }

    let mut generated = 0usize;
    let stats = |verdict: Verdict,
                 generated: usize,
                 states: usize,
                 witness: Option<Vec<WitnessStep>>| SearchStats {
        verdict,
        regions_stored: generated,
        states_stored: states,
        elapsed: start.elapsed(),
        strategy: cfg.strategy,
        direction: Direction::Forward,
        witness,
        diagnostic: None,
    };

    loop {
        let state = match cfg.strategy {
            Strategy::Dfs => frontier.pop_back(),
            Strategy::Bfs => frontier.pop_front(),
        };
        let Some(state) = state else {
            return Ok(stats(Verdict::Unreachable, generated, visited.len(), None));
        };
        if eval_query(query, &state) {
            let witness = forward_witness(&visited, &state);
            return Ok(stats(
                Verdict::Reachable,
                generated,
                visited.len(),
                Some(witness),
            ));
        }
        if limits.exceeded(generated) {
            return Ok(stats(
                Verdict::LimitExceeded,
                generated,
                visited.len(),
                None,
            ));
        }

        let delay = network_delay_successor(&state, net).map(|d| (d, StepLabel::Delay));
        let discrete = match network_discrete_successors(&state, net) {
            Ok(more) => more,
            Err(error) => {
                return Err(ExploreError::Update {
                    error,
                    trace: forward_witness(&visited, &state),
                })
            }
        };
        // The delay computation produces one region per expanded state (for
        // an all-unbounded region it is the state itself); each enabled
        // transition produces one more.
        generated += 1 + discrete.len();
        // Children are pushed with the delay successor first and transitions
        // in declaration order. BFS therefore dequeues the delay successor
        // first; DFS pops transitions (last-declared first) before the delay
        // successor, keeping the search near the guards instead of diving
        // down delay chains into the unbounded sink.
        for (child, label) in delay.into_iter().chain(discrete) {
            if !visited.contains_key(&child) {
                visited.insert(child.clone(), Some((state.clone(), label)));
                frontier.push_back(child);
            }
        }
    }
}

/// Forward exploration of the entire reachable state space, by searching for
/// the unsatisfiable query.
pub fn explore_full(net: &Network, cfg: &SearchConfig) -> Result<SearchStats, ExploreError> {
    forward_reach(net, &Query::literal_false(), cfg)
}

// ---------------------------------------------------------------------------
// Backward search
// ---------------------------------------------------------------------------

type BackwardStore = HashMap<Region, Option<(Region, StepLabel)>>;

fn backward_witness(store: &BackwardStore, found: &Region) -> Vec<WitnessStep> {
    // Parents point from a predecessor to the region it preceded, so walking
    // the chain from the initial region already yields a forward trace.
    let mut steps = Vec::new();
    let mut current = found.clone();
    let mut incoming: Option<StepLabel> = None;
    loop {
        let parent = store.get(&current).expect("witness regions are stored");
        steps.push(WitnessStep {
            state: SearchState {
                region: current.clone(),
                vars: Vec::new(),
            },
            step: incoming,
        });
        match parent {
            Some((next, label)) => {
                incoming = Some(*label);
                current = next.clone();
            }
            None => break,
        }
    }
    steps
}

/// True when every transition into the location resets at least one clock;
/// regions without exactly-zero clocks then have no discrete predecessors,
/// making whole delay periods safe to jump over.
fn location_skippable(region: &Region, net: &Network) -> bool {
    let loc = region.location(0);
    net.components[0]
        .transitions
        .iter()
        .all(|t| t.target != loc || !t.resets.is_empty())
}

fn max_skippable_periods(region: &Region) -> u64 {
    let mut k = u64::MAX;
    for c in 0..region.clock_count() {
        let id = crate::model::ClockId(c as u32);
        let h = region.h(id) as u64;
        let room = if region.unit_set().contains(&id) {
            h.saturating_sub(1)
        } else {
            h
        };
        k = k.min(room);
    }
    if k == u64::MAX {
        0
    } else {
        k
    }
}

/// Explores backward from the regions described by `pattern` until an
/// initial region is reached or the predecessor closure is exhausted.
pub fn backward_reach(
    net: &Network,
    pattern: &RegionPattern,
    cfg: &SearchConfig,
) -> Result<SearchStats, ExploreError> {
    if net.components.len() != 1 {
        return Err(ExploreError::BackwardScope(format!(
            "network has {} components",
            net.components.len()
        )));
    }
    if !net.vars.is_empty() {
        return Err(ExploreError::BackwardScope(format!(
            "model declares {} integer variables",
            net.vars.len()
        )));
    }

    let start = Instant::now();
    let limits = Limits::new(cfg, start);
    let stats = |verdict: Verdict,
                 generated: usize,
                 states: usize,
                 witness: Option<Vec<WitnessStep>>,
                 diagnostic: Option<String>| SearchStats {
        verdict,
        regions_stored: generated,
        states_stored: states,
        elapsed: start.elapsed(),
        strategy: cfg.strategy,
        direction: Direction::Backward,
        witness,
        diagnostic,
    };

    let seeds = match enumerate_pattern(pattern, net) {
        Ok(seeds) => seeds,
        Err(e) => {
            return Ok(stats(Verdict::Unreachable, 0, 0, None, Some(e.to_string())));
        }
    };

    let mut visited: BackwardStore = HashMap::new();
    let mut frontier: VecDeque<Region> = VecDeque::new();
    for seed in seeds {
        if visited.insert(seed.clone(), None).is_none() {
            frontier.push_back(seed);
        }
    }

    let mut generated = 0usize;
    loop {
        let region = match cfg.strategy {
            Strategy::Dfs => frontier.pop_back(),
            Strategy::Bfs => frontier.pop_front(),
        };
        let Some(region) = region else {
            return Ok(stats(
                Verdict::Unreachable,
                generated,
                visited.len(),
                None,
                None,
            ));
        };
        if region.is_initial(net) {
            let witness = backward_witness(&visited, &region);
            return Ok(stats(
                Verdict::Reachable,
                generated,
                visited.len(),
                Some(witness),
                None,
            ));
        }
        if limits.exceeded(generated) {
            return Ok(stats(
                Verdict::LimitExceeded,
                generated,
                visited.len(),
                None,
                None,
            ));
        }

        let mut delay_children: Vec<(Region, StepLabel)> = Vec::new();
        let mut delay_handled = false;
        if cfg.delay_skip && location_skippable(&region, net) {
            let periods = max_skippable_periods(&region);
            if periods >= 1 {
                if let Ok(landing) = skip_periods(&region, periods) {
                    delay_children.push((landing, StepLabel::DelaySkip { periods }));
                    delay_handled = true;
                }
            }
        }
        if !delay_handled {
            for p in find_immediate_delay_predecessors(&region, net) {
                delay_children.push((p, StepLabel::Delay));
            }
        }
        let mut discrete_children: Vec<(Region, StepLabel)> = Vec::new();
        for (ti, t) in net.components[0].transitions.iter().enumerate() {
            if t.sync.is_some() {
                continue;
            }
            for p in discrete_predecessors_via(&region, 0, t, net) {
                discrete_children.push((
                    p,
                    StepLabel::Internal {
                        component: 0,
                        transition: ti,
                    },
                ));
            }
        }
        generated += delay_children.len() + discrete_children.len();
        // Same push discipline as the forward engine: delay predecessors
        // first, discrete predecessors in declaration order; DFS thus
        // expands discrete predecessors before walking delay chains.
        for (child, label) in delay_children.into_iter().chain(discrete_children) {
            if !visited.contains_key(&child) {
                visited.insert(child.clone(), Some((region.clone(), label)));
                frontier.push_back(child);
            }
        }
    }
}

// Re-export for callers that only need the engine surface.
pub use crate::kinematics::PatternError;
