//! Product semantics for networks: delay and discrete successors of search
//! states, with urgency, invariants, shared integer variables and binary
//! channel synchronization.
//!
//! The network is explored over a single global region whose location is the
//! component tuple and whose clock universe is the union of all component
//! clocks; its fractional ordering carries the interleaving information that
//! couples the components, so the single-region algorithms apply verbatim.

use crate::kinematics::{immediate_delay_successor, period};
use crate::model::{
    apply_updates, satisfies_guard, satisfies_invariant, ChanId, Network, SyncDir, Transition,
    UpdateError,
};
use crate::region::SearchState;

/// How a state was produced from its predecessor during search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepLabel {
    Delay,
    /// Bulk jump over `periods` full delay periods; produced only by the
    /// opt-in accelerated backward engine.
    DelaySkip {
        periods: u64,
    },
    Internal {
        component: usize,
        transition: usize,
    },
    Sync {
        channel: ChanId,
        emitter: usize,
        emitter_transition: usize,
        receiver: usize,
        receiver_transition: usize,
    },
}

fn any_location_urgent(state: &SearchState, net: &Network) -> bool {
    net.components
        .iter()
        .enumerate()
        .any(|(ci, comp)| comp.locations[state.region.location(ci).0 as usize].urgent)
}

/// The immediate delay successor of the whole network state, if time may
/// elapse: no component location is urgent and the successor satisfies every
/// component invariant.
pub fn network_delay_successor(state: &SearchState, net: &Network) -> Option<SearchState> {
    if any_location_urgent(state, net) {
        return None;
    }
    let region = immediate_delay_successor(&state.region, net)?;
    if !satisfies_invariant(&region, net) {
        return None;
    }
    Some(SearchState {
        region,
        vars: state.vars.clone(),
    })
}

fn fire_internal(
    state: &SearchState,
    component: usize,
    t: &Transition,
    net: &Network,
) -> Result<Option<SearchState>, UpdateError> {
    let mut region = state.region.clone();
    region.set_location(component, t.target);
    region.apply_resets(&t.resets);
    if !satisfies_invariant(&region, net) {
        return Ok(None);
    }
    let mut vars = state.vars.clone();
    apply_updates(&t.updates, &mut vars, net)?;
    Ok(Some(SearchState { region, vars }))
}

fn fire_sync(
    state: &SearchState,
    emitter: usize,
    et: &Transition,
    receiver: usize,
    rt: &Transition,
    net: &Network,
) -> Result<Option<SearchState>, UpdateError> {
    let mut region = state.region.clone();
    region.set_location(emitter, et.target);
    region.set_location(receiver, rt.target);
    region.apply_resets(&et.resets);
    region.apply_resets(&rt.resets);
    if !satisfies_invariant(&region, net) {
        return Ok(None);
    }
    let mut vars = state.vars.clone();
    apply_updates(&et.updates, &mut vars, net)?;
    apply_updates(&rt.updates, &mut vars, net)?;
    Ok(Some(SearchState { region, vars }))
}

/// All discrete successors: internal moves of single components plus binary
/// emitter/receiver handshakes, in declaration order, deduplicated keeping
/// the first occurrence. The emitter's updates are applied before the
/// receiver's.
pub fn network_discrete_successors(
    state: &SearchState,
    net: &Network,
) -> Result<Vec<(SearchState, StepLabel)>, UpdateError> {
    let mut out: Vec<(SearchState, StepLabel)> = Vec::new();
    let push = |out: &mut Vec<(SearchState, StepLabel)>, s: SearchState, label: StepLabel| {
        if !out.iter().any(|(existing, _)| *existing == s) {
            out.push((s, label));
        }
    };

    for (ci, comp) in net.components.iter().enumerate() {
        for (ti, t) in comp.transitions.iter().enumerate() {
            if t.sync.is_some() || t.source != state.region.location(ci) {
                continue;
            }
            if !satisfies_guard(&state.region, &state.vars, &t.guard) {
                continue;
            }
            if let Some(s) = fire_internal(state, ci, t, net)? {
                push(
                    &mut out,
                    s,
                    StepLabel::Internal {
                        component: ci,
                        transition: ti,
                    },
                );
            }
        }
    }

    for (ei, ecomp) in net.components.iter().enumerate() {
        for (eti, et) in ecomp.transitions.iter().enumerate() {
            let Some((chan, SyncDir::Emit)) = et.sync else {
                continue;
            };
            if et.source != state.region.location(ei)
                || !satisfies_guard(&state.region, &state.vars, &et.guard)
            {
                continue;
            }
            for (ri, rcomp) in net.components.iter().enumerate() {
                if ri == ei {
                    continue;
                }
                for (rti, rt) in rcomp.transitions.iter().enumerate() {
                    let Some((rchan, SyncDir::Receive)) = rt.sync else {
                        continue;
                    };
                    if rchan != chan
                        || rt.source != state.region.location(ri)
                        || !satisfies_guard(&state.region, &state.vars, &rt.guard)
                    {
                        continue;
                    }
                    if let Some(s) = fire_sync(state, ei, et, ri, rt, net)? {
                        push(
                            &mut out,
                            s,
                            StepLabel::Sync {
                                channel: chan,
                                emitter: ei,
                                emitter_transition: eti,
                                receiver: ri,
                                receiver_transition: rti,
                            },
                        );
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Re-executes one labelled step from a state; used to replay witnesses.
pub fn step_successor(
    state: &SearchState,
    label: &StepLabel,
    net: &Network,
) -> Result<Option<SearchState>, UpdateError> {
    match label {
        StepLabel::Delay => Ok(network_delay_successor(state, net)),
        StepLabel::DelaySkip { periods } => {
            let Ok(theta) = period(&state.region) else {
                return Ok(None);
            };
            let mut current = state.clone();
            for _ in 0..periods * theta as u64 {
                match network_delay_successor(&current, net) {
                    Some(next) => current = next,
                    None => return Ok(None),
                }
            }
            Ok(Some(current))
        }
        StepLabel::Internal {
            component,
            transition,
        } => {
            let t = &net.components[*component].transitions[*transition];
            if t.source != state.region.location(*component)
                || !satisfies_guard(&state.region, &state.vars, &t.guard)
            {
                return Ok(None);
            }
            fire_internal(state, *component, t, net)
        }
        StepLabel::Sync {
            emitter,
            emitter_transition,
            receiver,
            receiver_transition,
            ..
        } => {
            let et = &net.components[*emitter].transitions[*emitter_transition];
            let rt = &net.components[*receiver].transitions[*receiver_transition];
            if et.source != state.region.location(*emitter)
                || rt.source != state.region.location(*receiver)
                || !satisfies_guard(&state.region, &state.vars, &et.guard)
                || !satisfies_guard(&state.region, &state.vars, &rt.guard)
            {
                return Ok(None);
            }
            fire_sync(state, *emitter, et, *receiver, rt, net)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AtomDef, AutomatonDef, EdgeDef, ExprDef, Network, Rel};
    use crate::region::initial_region;

    fn state_of(net: &Network) -> SearchState {
        let locs = net.initial_location_tuples().remove(0);
        SearchState {
            region: initial_region(net, &locs).unwrap(),
            vars: net.initial_vars(),
        }
    }

    #[test]
    fn urgent_location_blocks_delay() {
        let mut a = AutomatonDef::new("A");
        a.clock("x", Some(1));
        a.location("q0", true);
        a.locations[0].urgent = true;
        let mut b = AutomatonDef::new("B");
        b.clock("y", Some(1));
        b.location("p0", true);
        let net = Network::link(&[a, b]).unwrap();
        let s = state_of(&net);
        assert!(network_delay_successor(&s, &net).is_none());
    }

    #[test]
    fn invariant_cuts_delay_successor() {
        // x <= 0 pins the automaton to the initial region.
        let mut a = AutomatonDef::new("A");
        a.clock("x", Some(1));
        a.location("q0", true);
        a.locations[0]
            .invariant
            .push(AtomDef::clock("x", Rel::Le, 0));
        let net = Network::link(&[a]).unwrap();
        let s = state_of(&net);
        assert!(network_delay_successor(&s, &net).is_none());
    }

    #[test]
    fn emitter_updates_apply_before_receiver_updates() {
        // Emitter sets v to 1; receiver doubles it. Order matters: the
        // emitter-first rule yields 2, the other order would yield 1.
        let mut a = AutomatonDef::new("A");
        a.clock("x", Some(0));
        a.int_var("v", 0, 0, 10);
        a.channels.push("c".to_string());
        a.location("a0", true);
        a.location("a1", false);
        a.edge(
            EdgeDef::new("a0", "a1")
                .sync("c", SyncDir::Emit)
                .update("v", ExprDef::Const(1)),
        );
        let mut b = AutomatonDef::new("B");
        b.clock("y", Some(0));
        b.channels.push("c".to_string());
        b.location("b0", true);
        b.location("b1", false);
        b.edge(EdgeDef::new("b0", "b1").sync("c", SyncDir::Receive).update(
            "v",
            ExprDef::Mul(Box::new(ExprDef::name("v")), Box::new(ExprDef::Const(2))),
        ));
        let net = Network::link(&[a, b]).unwrap();
        let s = state_of(&net);
        let succs = network_discrete_successors(&s, &net).unwrap();
        assert_eq!(succs.len(), 1);
        assert_eq!(succs[0].0.vars, vec![2]);
        assert!(matches!(succs[0].1, StepLabel::Sync { .. }));
    }

    #[test]
    fn sync_requires_a_willing_receiver() {
        let mut a = AutomatonDef::new("A");
        a.clock("x", Some(1));
        a.channels.push("c".to_string());
        a.location("a0", true);
        a.location("a1", false);
        a.edge(EdgeDef::new("a0", "a1").sync("c", SyncDir::Emit));
        let mut b = AutomatonDef::new("B");
        b.clock("y", Some(1));
        b.channels.push("c".to_string());
        b.location("b0", true);
        b.location("b1", false);
        // Receiver guard is unsatisfiable in the initial state.
        b.edge(
            EdgeDef::new("b0", "b1")
                .sync("c", SyncDir::Receive)
                .guard_atom(AtomDef::clock("y", Rel::Eq, 1)),
        );
        let net = Network::link(&[a, b]).unwrap();
        let s = state_of(&net);
        assert!(network_discrete_successors(&s, &net).unwrap().is_empty());
    }

    #[test]
    fn update_outside_range_is_an_error() {
        let mut a = AutomatonDef::new("A");
        a.clock("x", Some(0));
        a.int_var("v", 0, 0, 1);
        a.location("q0", true);
        a.edge(EdgeDef::new("q0", "q0").update(
            "v",
            ExprDef::Add(Box::new(ExprDef::name("v")), Box::new(ExprDef::Const(1))),
        ));
        let net = Network::link(&[a]).unwrap();
        let s = state_of(&net);
        let first = network_discrete_successors(&s, &net).unwrap();
        assert_eq!(first.len(), 1);
        let err = network_discrete_successors(&first[0].0, &net).unwrap_err();
        assert_eq!(err.value, 2);
    }
}
