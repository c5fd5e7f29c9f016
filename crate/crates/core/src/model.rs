//! Timed automata, networks, guards, invariants, integer variables and queries.
//!
//! Models exist in two forms: the *surface* form ([`AutomatonDef`]) produced by
//! the parser and the benchmark generators, and the *linked* form ([`Network`])
//! in which every name has been resolved to an index. Clock names are prefixed
//! with their component name (`Comp.x`) so they are globally unique; integer
//! variables and channels are shared across the whole network.

use std::fmt;

use crate::region::{Region, SearchState};

/// Index of a clock in [`Network::clocks`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockId(pub u32);

/// Index of an integer variable in [`Network::vars`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

/// Index of a location within its component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocId(pub u32);

/// Index of a channel in [`Network::channels`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChanId(pub u32);

/// Comparison relation used by clock constraints and integer atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rel {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Rel {
    pub fn holds_int(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Rel::Lt => lhs < rhs,
            Rel::Le => lhs <= rhs,
            Rel::Eq => lhs == rhs,
            Rel::Ge => lhs >= rhs,
            Rel::Gt => lhs > rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Eq => "==",
            Rel::Ge => ">=",
            Rel::Gt => ">",
        }
    }
}

/// Position of a token in a source file, for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SrcPos {
    pub file: String,
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for SrcPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.col)
    }
}

/// A problem found while linking or validating a model.
#[derive(Debug, Clone)]
pub struct Diagnostic {
    pub message: String,
    pub pos: Option<SrcPos>,
}

impl Diagnostic {
    pub fn new(message: impl Into<String>, pos: Option<SrcPos>) -> Self {
        Diagnostic {
            message: message.into(),
            pos,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.pos {
            Some(p) => write!(f, "{}: {}", p, self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

// ---------------------------------------------------------------------------
// Surface form
// ---------------------------------------------------------------------------

/// Integer expression over variables and literals, prior to name resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprDef {
    Const(i64),
    Name(String),
    Add(Box<ExprDef>, Box<ExprDef>),
    Sub(Box<ExprDef>, Box<ExprDef>),
    Mul(Box<ExprDef>, Box<ExprDef>),
}

impl ExprDef {
    pub fn name(n: impl Into<String>) -> Self {
        ExprDef::Name(n.into())
    }
}

/// One conjunct of a guard or invariant, prior to name resolution.
#[derive(Debug, Clone)]
pub struct AtomDef {
    pub lhs: ExprDef,
    pub rel: Rel,
    pub rhs: ExprDef,
    pub pos: Option<SrcPos>,
}

impl AtomDef {
    pub fn new(lhs: ExprDef, rel: Rel, rhs: ExprDef) -> Self {
        AtomDef {
            lhs,
            rel,
            rhs,
            pos: None,
        }
    }

    /// Convenience for the common `clock REL constant` shape.
    pub fn clock(name: &str, rel: Rel, bound: u32) -> Self {
        AtomDef::new(ExprDef::name(name), rel, ExprDef::Const(bound as i64))
    }
}

#[derive(Debug, Clone)]
pub struct ClockDef {
    pub name: String,
    pub max: Option<u32>,
    pub pos: Option<SrcPos>,
}

#[derive(Debug, Clone)]
pub struct VarDef {
    pub name: String,
    pub init: i64,
    pub lo: i64,
    pub hi: i64,
    pub pos: Option<SrcPos>,
}

#[derive(Debug, Clone)]
pub struct LocationDef {
    pub name: String,
    pub initial: bool,
    pub urgent: bool,
    pub invariant: Vec<AtomDef>,
    pub pos: Option<SrcPos>,
}

/// Synchronization polarity on a channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SyncDir {
    Emit,
    Receive,
}

#[derive(Debug, Clone)]
pub struct EdgeDef {
    pub source: String,
    pub target: String,
    pub guard: Vec<AtomDef>,
    pub sync: Option<(String, SyncDir)>,
    pub resets: Vec<String>,
    pub updates: Vec<(String, ExprDef)>,
    pub pos: Option<SrcPos>,
}

/// A single automaton as written in one source file or built by a generator.
#[derive(Debug, Clone, Default)]
pub struct AutomatonDef {
    pub name: String,
    pub clocks: Vec<ClockDef>,
    pub vars: Vec<VarDef>,
    pub channels: Vec<String>,
    pub locations: Vec<LocationDef>,
    pub edges: Vec<EdgeDef>,
}

impl AutomatonDef {
    pub fn new(name: impl Into<String>) -> Self {
        AutomatonDef {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn clock(&mut self, name: &str, max: Option<u32>) -> &mut Self {
        self.clocks.push(ClockDef {
            name: name.to_string(),
            max,
            pos: None,
        });
        self
    }

    pub fn int_var(&mut self, name: &str, init: i64, lo: i64, hi: i64) -> &mut Self {
        self.vars.push(VarDef {
            name: name.to_string(),
            init,
            lo,
            hi,
            pos: None,
        });
        self
    }

    pub fn location(&mut self, name: &str, initial: bool) -> &mut Self {
        self.locations.push(LocationDef {
            name: name.to_string(),
            initial,
            urgent: false,
            invariant: Vec::new(),
            pos: None,
        });
        self
    }

    pub fn edge(&mut self, edge: EdgeDef) -> &mut Self {
        self.edges.push(edge);
        self
    }
}

impl EdgeDef {
    pub fn new(source: &str, target: &str) -> Self {
        EdgeDef {
            source: source.to_string(),
            target: target.to_string(),
            guard: Vec::new(),
            sync: None,
            resets: Vec::new(),
            updates: Vec::new(),
            pos: None,
        }
    }

    pub fn guard_atom(mut self, atom: AtomDef) -> Self {
        self.guard.push(atom);
        self
    }

    pub fn reset(mut self, clock: &str) -> Self {
        self.resets.push(clock.to_string());
        self
    }

    pub fn update(mut self, var: &str, expr: ExprDef) -> Self {
        self.updates.push((var.to_string(), expr));
        self
    }

    pub fn sync(mut self, channel: &str, dir: SyncDir) -> Self {
        self.sync = Some((channel.to_string(), dir));
        self
    }
}

// ---------------------------------------------------------------------------
// Linked form
// ---------------------------------------------------------------------------

/// Resolved integer expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntExpr {
    Const(i64),
    Var(VarId),
    Add(Box<IntExpr>, Box<IntExpr>),
    Sub(Box<IntExpr>, Box<IntExpr>),
    Mul(Box<IntExpr>, Box<IntExpr>),
}

impl IntExpr {
    pub fn eval(&self, vars: &[i64]) -> i64 {
        match self {
            IntExpr::Const(c) => *c,
            IntExpr::Var(v) => vars[v.0 as usize],
            IntExpr::Add(a, b) => a.eval(vars) + b.eval(vars),
            IntExpr::Sub(a, b) => a.eval(vars) - b.eval(vars),
            IntExpr::Mul(a, b) => a.eval(vars) * b.eval(vars),
        }
    }
}

/// Constraint `clock REL bound` with a non-negative integer bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClockConstraint {
    pub clock: ClockId,
    pub rel: Rel,
    pub bound: u32,
    pub pos: Option<SrcPos>,
}

/// Comparison between two integer expressions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntAtom {
    pub lhs: IntExpr,
    pub rel: Rel,
    pub rhs: IntExpr,
    pub pos: Option<SrcPos>,
}

impl IntAtom {
    pub fn holds(&self, vars: &[i64]) -> bool {
        self.rel.holds_int(self.lhs.eval(vars), self.rhs.eval(vars))
    }
}

/// Conjunction of clock constraints and integer comparisons. Empty means true.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Guard {
    pub clock_atoms: Vec<ClockConstraint>,
    pub int_atoms: Vec<IntAtom>,
}

impl Guard {
    pub fn is_true(&self) -> bool {
        self.clock_atoms.is_empty() && self.int_atoms.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct Transition {
    pub source: LocId,
    pub target: LocId,
    pub sync: Option<(ChanId, SyncDir)>,
    pub guard: Guard,
    /// Sorted, deduplicated global clock ids.
    pub resets: Vec<ClockId>,
    /// Ordered assignments, applied left to right.
    pub updates: Vec<(VarId, IntExpr)>,
    pub pos: Option<SrcPos>,
}

#[derive(Debug, Clone)]
pub struct Location {
    pub name: String,
    pub initial: bool,
    pub urgent: bool,
    /// Upper-bound clock atoms only.
    pub invariant: Vec<ClockConstraint>,
    pub pos: Option<SrcPos>,
}

#[derive(Debug, Clone)]
pub struct Component {
    pub name: String,
    pub locations: Vec<Location>,
    pub transitions: Vec<Transition>,
}

impl Component {
    pub fn location_id(&self, name: &str) -> Option<LocId> {
        self.locations
            .iter()
            .position(|l| l.name == name)
            .map(|i| LocId(i as u32))
    }

    pub fn initial_locations(&self) -> Vec<LocId> {
        self.locations
            .iter()
            .enumerate()
            .filter(|(_, l)| l.initial)
            .map(|(i, _)| LocId(i as u32))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct ClockInfo {
    /// Globally unique name, `Component.local` for networks of size > 1.
    pub name: String,
    pub component: usize,
    pub local_name: String,
    /// Maximum constant `c_m` for this clock.
    pub max: u32,
}

#[derive(Debug, Clone)]
pub struct VarInfo {
    pub name: String,
    pub init: i64,
    pub lo: i64,
    pub hi: i64,
}

/// A linked network of timed automata with shared variables and channels.
#[derive(Debug, Clone)]
pub struct Network {
    pub components: Vec<Component>,
    pub clocks: Vec<ClockInfo>,
    pub vars: Vec<VarInfo>,
    pub channels: Vec<String>,
}

impl Network {
    /// Resolves a set of automaton definitions into a network.
    ///
    /// Clock names are prefixed with the component name when the network has
    /// more than one component. Integer variables and channels are shared:
    /// a variable may be declared in any file and referenced from all others.
    pub fn link(defs: &[AutomatonDef]) -> Result<Network, Vec<Diagnostic>> {
        let mut diags = Vec::new();
        let mut clocks: Vec<ClockInfo> = Vec::new();
        let mut vars: Vec<VarInfo> = Vec::new();
        let mut channels: Vec<String> = Vec::new();
        let multi = defs.len() > 1;

        if defs.is_empty() {
            return Err(vec![Diagnostic::new("no automata given", None)]);
        }
        for (i, d) in defs.iter().enumerate() {
            if defs[..i].iter().any(|o| o.name == d.name) {
                diags.push(Diagnostic::new(
                    format!("duplicate automaton name '{}'", d.name),
                    None,
                ));
            }
        }

        for (ci, def) in defs.iter().enumerate() {
            for c in &def.clocks {
                if def.clocks.iter().filter(|o| o.name == c.name).count() > 1 {
                    diags.push(Diagnostic::new(
                        format!("duplicate clock '{}' in automaton '{}'", c.name, def.name),
                        c.pos.clone(),
                    ));
                }
            }
            for c in &def.clocks {
                let name = if multi {
                    format!("{}.{}", def.name, c.name)
                } else {
                    c.name.clone()
                };
                clocks.push(ClockInfo {
                    name,
                    component: ci,
                    local_name: c.name.clone(),
                    max: c.max.unwrap_or(0),
                });
            }
            for v in &def.vars {
                if vars.iter().any(|o| o.name == v.name) {
                    diags.push(Diagnostic::new(
                        format!("integer variable '{}' declared more than once", v.name),
                        v.pos.clone(),
                    ));
                    continue;
                }
                vars.push(VarInfo {
                    name: v.name.clone(),
                    init: v.init,
                    lo: v.lo,
                    hi: v.hi,
                });
            }
            for ch in &def.channels {
                if !channels.contains(ch) {
                    channels.push(ch.clone());
                }
            }
        }

        let clock_lookup = |ci: usize, name: &str| -> Option<ClockId> {
            clocks
                .iter()
                .position(|c| c.component == ci && c.local_name == name)
                .map(|i| ClockId(i as u32))
        };
        let var_lookup = |name: &str| -> Option<VarId> {
            vars.iter()
                .position(|v| v.name == name)
                .map(|i| VarId(i as u32))
        };
        let chan_lookup = |name: &str| -> Option<ChanId> {
            channels
                .iter()
                .position(|c| c == name)
                .map(|i| ChanId(i as u32))
        };

        let mut components = Vec::new();
        for (ci, def) in defs.iter().enumerate() {
            let mut locations = Vec::new();
            for l in &def.locations {
                if def.locations.iter().filter(|o| o.name == l.name).count() > 1 {
                    diags.push(Diagnostic::new(
                        format!(
                            "duplicate location '{}' in automaton '{}'",
                            l.name, def.name
                        ),
                        l.pos.clone(),
                    ));
                }
                let mut invariant = Vec::new();
                for atom in &l.invariant {
                    match resolve_atom(atom, ci, &clock_lookup, &var_lookup, &mut diags) {
                        Some(ResolvedAtom::Clock(cc)) => invariant.push(cc),
                        Some(ResolvedAtom::Int(_)) => diags.push(Diagnostic::new(
                            "invariant atoms must constrain clocks",
                            atom.pos.clone(),
                        )),
                        None => {}
                    }
                }
                locations.push(Location {
                    name: l.name.clone(),
                    initial: l.initial,
                    urgent: l.urgent,
                    invariant,
                    pos: l.pos.clone(),
                });
            }
            let loc_id =
                |name: &str, pos: &Option<SrcPos>, diags: &mut Vec<Diagnostic>| match locations
                    .iter()
                    .position(|l| l.name == name)
                {
                    Some(i) => Some(LocId(i as u32)),
                    None => {
                        diags.push(Diagnostic::new(
                            format!("unknown location '{}' in automaton '{}'", name, def.name),
                            pos.clone(),
                        ));
                        None
                    }
                };

            let mut transitions = Vec::new();
            for e in &def.edges {
                let (Some(source), Some(target)) = (
                    loc_id(&e.source, &e.pos, &mut diags),
                    loc_id(&e.target, &e.pos, &mut diags),
                ) else {
                    continue;
                };
                let mut guard = Guard::default();
                for atom in &e.guard {
                    match resolve_atom(atom, ci, &clock_lookup, &var_lookup, &mut diags) {
                        Some(ResolvedAtom::Clock(cc)) => guard.clock_atoms.push(cc),
                        Some(ResolvedAtom::Int(ia)) => guard.int_atoms.push(ia),
                        None => {}
                    }
                }
                let mut resets = Vec::new();
                for r in &e.resets {
                    match clock_lookup(ci, r) {
                        Some(id) => resets.push(id),
                        None => diags.push(Diagnostic::new(
                            format!("unknown clock '{}' in reset", r),
                            e.pos.clone(),
                        )),
                    }
                }
                resets.sort();
                resets.dedup();
                let mut updates = Vec::new();
                for (name, expr) in &e.updates {
                    let Some(var) = var_lookup(name) else {
                        diags.push(Diagnostic::new(
                            format!("unknown integer variable '{}' in update", name),
                            e.pos.clone(),
                        ));
                        continue;
                    };
                    match resolve_expr(expr, &var_lookup) {
                        Ok(ie) => updates.push((var, ie)),
                        Err(msg) => diags.push(Diagnostic::new(msg, e.pos.clone())),
                    }
                }
                let sync = match &e.sync {
                    None => None,
                    Some((name, dir)) => match chan_lookup(name) {
                        Some(id) => Some((id, *dir)),
                        None => {
                            diags.push(Diagnostic::new(
                                format!("unknown channel '{}'", name),
                                e.pos.clone(),
                            ));
                            None
                        }
                    },
                };
                transitions.push(Transition {
                    source,
                    target,
                    sync,
                    guard,
                    resets,
                    updates,
                    pos: e.pos.clone(),
                });
            }
            components.push(Component {
                name: def.name.clone(),
                locations,
                transitions,
            });
        }

        // Infer missing clock maxima from the constants they are compared with.
        let mut net = Network {
            components,
            clocks,
            vars,
            channels,
        };
        for (ci, def) in defs.iter().enumerate() {
            for (local_idx, c) in def.clocks.iter().enumerate() {
                if c.max.is_some() {
                    continue;
                }
                let id = ClockId(
                    net.clocks
                        .iter()
                        .position(|k| k.component == ci && k.local_name == c.name)
                        .unwrap() as u32,
                );
                let inferred = net.max_constant_on(id, local_idx, ci);
                net.clocks[id.0 as usize].max = inferred;
            }
        }

        if diags.is_empty() {
            Ok(net)
        } else {
            Err(diags)
        }
    }

    fn max_constant_on(&self, clock: ClockId, _local_idx: usize, ci: usize) -> u32 {
        let mut m = 0;
        let comp = &self.components[ci];
        for t in &comp.transitions {
            for a in &t.guard.clock_atoms {
                if a.clock == clock {
                    m = m.max(a.bound);
                }
            }
        }
        for l in &comp.locations {
            for a in &l.invariant {
                if a.clock == clock {
                    m = m.max(a.bound);
                }
            }
        }
        m
    }

    pub fn clock_max(&self, clock: ClockId) -> u32 {
        self.clocks[clock.0 as usize].max
    }

    pub fn clock_count(&self) -> usize {
        self.clocks.len()
    }

    pub fn component_id(&self, name: &str) -> Option<usize> {
        self.components.iter().position(|c| c.name == name)
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .map(|i| VarId(i as u32))
    }

    pub fn clock_id(&self, name: &str) -> Option<ClockId> {
        self.clocks
            .iter()
            .position(|c| c.name == name || (self.components.len() == 1 && c.local_name == name))
            .map(|i| ClockId(i as u32))
    }

    pub fn initial_vars(&self) -> Vec<i64> {
        self.vars.iter().map(|v| v.init).collect()
    }

    /// All initial location tuples (cartesian product of initial locations).
    pub fn initial_location_tuples(&self) -> Vec<Vec<LocId>> {
        let mut tuples: Vec<Vec<LocId>> = vec![Vec::new()];
        for comp in &self.components {
            let inits = comp.initial_locations();
            let mut next = Vec::new();
            for t in &tuples {
                for &l in &inits {
                    let mut t2 = t.clone();
                    t2.push(l);
                    next.push(t2);
                }
            }
            tuples = next;
        }
        tuples
    }
}

enum ResolvedAtom {
    Clock(ClockConstraint),
    Int(IntAtom),
}

fn expr_mentions_clock(
    e: &ExprDef,
    ci: usize,
    clock: &impl Fn(usize, &str) -> Option<ClockId>,
) -> bool {
    match e {
        ExprDef::Const(_) => false,
        ExprDef::Name(n) => clock(ci, n).is_some(),
        ExprDef::Add(a, b) | ExprDef::Sub(a, b) | ExprDef::Mul(a, b) => {
            expr_mentions_clock(a, ci, clock) || expr_mentions_clock(b, ci, clock)
        }
    }
}

fn resolve_expr(e: &ExprDef, var: &impl Fn(&str) -> Option<VarId>) -> Result<IntExpr, String> {
    match e {
        ExprDef::Const(c) => Ok(IntExpr::Const(*c)),
        ExprDef::Name(n) => var(n)
            .map(IntExpr::Var)
            .ok_or_else(|| format!("unknown integer variable '{}'", n)),
        ExprDef::Add(a, b) => Ok(IntExpr::Add(
            Box::new(resolve_expr(a, var)?),
            Box::new(resolve_expr(b, var)?),
        )),
        ExprDef::Sub(a, b) => Ok(IntExpr::Sub(
            Box::new(resolve_expr(a, var)?),
            Box::new(resolve_expr(b, var)?),
        )),
        ExprDef::Mul(a, b) => Ok(IntExpr::Mul(
            Box::new(resolve_expr(a, var)?),
            Box::new(resolve_expr(b, var)?),
        )),
    }
}

fn resolve_atom(
    atom: &AtomDef,
    ci: usize,
    clock: &impl Fn(usize, &str) -> Option<ClockId>,
    var: &impl Fn(&str) -> Option<VarId>,
    diags: &mut Vec<Diagnostic>,
) -> Option<ResolvedAtom> {
    // A constraint whose left side names a clock must be `clock REL constant`.
    if let ExprDef::Name(n) = &atom.lhs {
        if let Some(id) = clock(ci, n) {
            return match &atom.rhs {
                ExprDef::Const(c) if *c >= 0 => Some(ResolvedAtom::Clock(ClockConstraint {
                    clock: id,
                    rel: atom.rel,
                    bound: *c as u32,
                    pos: atom.pos.clone(),
                })),
                ExprDef::Const(_) => {
                    diags.push(Diagnostic::new(
                        format!("clock '{}' compared with a negative constant", n),
                        atom.pos.clone(),
                    ));
                    None
                }
                _ => {
                    diags.push(Diagnostic::new(
                        format!(
                            "clock '{}' may only be compared with an integer constant",
                            n
                        ),
                        atom.pos.clone(),
                    ));
                    None
                }
            };
        }
    }
    if expr_mentions_clock(&atom.lhs, ci, clock) || expr_mentions_clock(&atom.rhs, ci, clock) {
        diags.push(Diagnostic::new(
            "clocks cannot appear inside arithmetic expressions",
            atom.pos.clone(),
        ));
        return None;
    }
    let lhs = match resolve_expr(&atom.lhs, var) {
        Ok(e) => e,
        Err(msg) => {
            diags.push(Diagnostic::new(msg, atom.pos.clone()));
            return None;
        }
    };
    let rhs = match resolve_expr(&atom.rhs, var) {
        Ok(e) => e,
        Err(msg) => {
            diags.push(Diagnostic::new(msg, atom.pos.clone()));
            return None;
        }
    };
    Some(ResolvedAtom::Int(IntAtom {
        lhs,
        rel: atom.rel,
        rhs,
        pos: atom.pos.clone(),
    }))
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// Checks the semantic rules of a linked network.
///
/// Returns an empty list when the model is well-formed; otherwise one
/// diagnostic per violation.
pub fn validate_model(net: &Network) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for comp in &net.components {
        if !comp.locations.iter().any(|l| l.initial) {
            diags.push(Diagnostic::new(
                format!("automaton '{}' has no initial location", comp.name),
                None,
            ));
        }
        for l in &comp.locations {
            for a in &l.invariant {
                if !matches!(a.rel, Rel::Le | Rel::Lt) {
                    diags.push(Diagnostic::new(
                        format!(
                            "invariant must be an upper bound: {} {} {}",
                            net.clocks[a.clock.0 as usize].name,
                            a.rel.symbol(),
                            a.bound
                        ),
                        a.pos.clone(),
                    ));
                }
                if a.bound > net.clock_max(a.clock) {
                    diags.push(Diagnostic::new(
                        format!(
                            "constant exceeds maximum: {} has max {} but invariant uses {}",
                            net.clocks[a.clock.0 as usize].name,
                            net.clock_max(a.clock),
                            a.bound
                        ),
                        a.pos.clone(),
                    ));
                }
            }
        }
        for t in &comp.transitions {
            for a in &t.guard.clock_atoms {
                if a.bound > net.clock_max(a.clock) {
                    diags.push(Diagnostic::new(
                        format!(
                            "constant exceeds maximum: {} has max {} but guard uses {}",
                            net.clocks[a.clock.0 as usize].name,
                            net.clock_max(a.clock),
                            a.bound
                        ),
                        a.pos.clone(),
                    ));
                }
            }
        }
    }
    for v in &net.vars {
        if v.lo > v.hi {
            diags.push(Diagnostic::new(
                format!("variable '{}' has empty range [{},{}]", v.name, v.lo, v.hi),
                None,
            ));
        } else if v.init < v.lo || v.init > v.hi {
            diags.push(Diagnostic::new(
                format!(
                    "variable '{}' initial value {} outside range [{},{}]",
                    v.name, v.init, v.lo, v.hi
                ),
                None,
            ));
        }
    }
    diags
}

// ---------------------------------------------------------------------------
// Guard, invariant and query evaluation
// ---------------------------------------------------------------------------

/// Where a clock sits inside a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClockStatus {
    /// Bounded with fractional part zero (in the unit set).
    Unit,
    /// Bounded with fractional part strictly between 0 and 1.
    Fractional,
    /// Strictly above its maximum constant.
    Unbounded,
}

/// Decision table for a single clock constraint against a region.
///
/// `h` is the clock's integer part as stored in the region.
pub fn clock_atom_holds(status: ClockStatus, h: u32, rel: Rel, c: u32) -> bool {
    use ClockStatus::*;
    match rel {
        Rel::Eq => status == Unit && h == c,
        Rel::Lt => status != Unbounded && h < c,
        Rel::Le => (status == Unit && h <= c) || (status == Fractional && h < c),
        Rel::Gt => match status {
            Unbounded => true,
            Fractional => h >= c,
            Unit => h > c,
        },
        Rel::Ge => status == Unbounded || h >= c,
    }
}

/// True iff every valuation in the region satisfies all clock atoms.
pub fn satisfies_clock_atoms(region: &Region, atoms: &[ClockConstraint]) -> bool {
    atoms
        .iter()
        .all(|a| clock_atom_holds(region.status(a.clock), region.h(a.clock), a.rel, a.bound))
}

/// True iff the region together with the variable valuation satisfies the guard.
pub fn satisfies_guard(region: &Region, vars: &[i64], guard: &Guard) -> bool {
    satisfies_clock_atoms(region, &guard.clock_atoms)
        && guard.int_atoms.iter().all(|a| a.holds(vars))
}

/// Conjunction of every component's invariant at its current location.
pub fn satisfies_invariant(region: &Region, net: &Network) -> bool {
    net.components.iter().enumerate().all(|(ci, comp)| {
        let loc = &comp.locations[region.location(ci).0 as usize];
        satisfies_clock_atoms(region, &loc.invariant)
    })
}

// ---------------------------------------------------------------------------
// Integer updates
// ---------------------------------------------------------------------------

/// An assignment drove a variable outside its declared range.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("variable '{name}' assigned {value}, outside range [{lo},{hi}]")]
pub struct UpdateError {
    pub name: String,
    pub value: i64,
    pub lo: i64,
    pub hi: i64,
}

/// Applies ordered assignments left to right, checking declared ranges.
pub fn apply_updates(
    updates: &[(VarId, IntExpr)],
    vars: &mut [i64],
    net: &Network,
) -> Result<(), UpdateError> {
    for (var, expr) in updates {
        let value = expr.eval(vars);
        let info = &net.vars[var.0 as usize];
        if value < info.lo || value > info.hi {
            return Err(UpdateError {
                name: info.name.clone(),
                value,
                lo: info.lo,
                hi: info.hi,
            });
        }
        vars[var.0 as usize] = value;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

/// One conjunct of an existential-eventually query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryAtom {
    /// `Component.location`
    Loc {
        component: usize,
        loc: LocId,
    },
    Int(IntAtom),
    True,
    False,
}

/// Existential-eventually reachability query `E<> (atom && atom && ...)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub atoms: Vec<QueryAtom>,
}

impl Query {
    /// The query `E<> (false)`, which forces full state-space exploration.
    pub fn literal_false() -> Self {
        Query {
            atoms: vec![QueryAtom::False],
        }
    }
}

/// True iff every atom of the query holds in the state.
pub fn eval_query(query: &Query, state: &SearchState) -> bool {
    query.atoms.iter().all(|atom| match atom {
        QueryAtom::Loc { component, loc } => state.region.location(*component) == *loc,
        QueryAtom::Int(a) => a.holds(&state.vars),
        QueryAtom::True => true,
        QueryAtom::False => false,
    })
}
