//! Programmatic generators for the hand-crafted benchmark families, each
//! parameterized by size. The generators build surface definitions, so their
//! output can also be rendered to model text and fed back through the parser.

use crate::model::{AtomDef, AutomatonDef, EdgeDef, ExprDef, Rel};

/// A single automaton with `n` punctual self-loops over clocks `x1..xn` and a
/// final edge requiring every `xi` to be exactly zero while `y >= 1`. The
/// integer value of `y` on entering `Goal` is the least common multiple of
/// `1..n`.
pub fn gen_flower(n: u32) -> AutomatonDef {
    assert!(n >= 1);
    let mut def = AutomatonDef::new("Flower");
    for i in 1..=n {
        def.clock(&format!("x{}", i), Some(i));
    }
    def.clock("y", Some(1));
    def.location("q0", true);
    def.location("Goal", false);
    for i in 1..=n {
        let x = format!("x{}", i);
        def.edge(
            EdgeDef::new("q0", "q0")
                .guard_atom(AtomDef::clock(&x, Rel::Eq, i))
                .reset(&x),
        );
    }
    let mut goal = EdgeDef::new("q0", "Goal");
    for i in 1..=n {
        goal = goal.guard_atom(AtomDef::clock(&format!("x{}", i), Rel::Eq, 0));
    }
    goal = goal.guard_atom(AtomDef::clock("y", Rel::Ge, 1));
    def.edge(goal);
    def
}

/// `k` components that flip their boolean counter whenever their clock hits
/// its punctual bound.
pub fn gen_boolean(k: u32) -> Vec<AutomatonDef> {
    assert!(k >= 2);
    (1..=k)
        .map(|i| {
            let mut def = AutomatonDef::new(format!("Boolean{}", i));
            def.clock("x", Some(i));
            let ctr = format!("ctr{}", i);
            def.int_var(&ctr, 0, 0, 1);
            def.location("q0", true);
            def.location("q1", false);
            let flip = ExprDef::Sub(Box::new(ExprDef::Const(1)), Box::new(ExprDef::name(&ctr)));
            def.edge(
                EdgeDef::new("q0", "q1")
                    .guard_atom(AtomDef::clock("x", Rel::Eq, i))
                    .reset("x")
                    .update(&ctr, flip.clone()),
            );
            def.edge(
                EdgeDef::new("q1", "q0")
                    .guard_atom(AtomDef::clock("x", Rel::Eq, i))
                    .reset("x")
                    .update(&ctr, flip),
            );
            def
        })
        .collect()
}

/// `k` six-location rings, each cycling on the punctual guard `x == i`.
pub fn gen_ring(k: u32) -> Vec<AutomatonDef> {
    assert!(k >= 2);
    (1..=k)
        .map(|i| {
            let mut def = AutomatonDef::new(format!("P{}", i));
            def.clock("x", Some(i));
            let names = ["q0", "q1", "q2", "q3", "q4", "Goal"];
            for (j, name) in names.iter().enumerate() {
                def.location(name, j == 0);
            }
            for j in 0..names.len() {
                let next = names[(j + 1) % names.len()];
                def.edge(
                    EdgeDef::new(names[j], next)
                        .guard_atom(AtomDef::clock("x", Rel::Eq, i))
                        .reset("x"),
                );
            }
            def
        })
        .collect()
}

/// `k-1` key components that each increment the shared `gate` counter on
/// their last edge, plus an unlocker whose final edge into `Goal` is enabled
/// only once `gate` equals `k-1`.
pub fn gen_gates(k: u32) -> Vec<AutomatonDef> {
    assert!(k >= 2);
    let mut defs = Vec::new();
    for i in 1..=k - 1 {
        let mut def = AutomatonDef::new(format!("Key{}", i));
        def.clock("x", Some(i));
        for j in 0..=i {
            def.location(&format!("q{}", j), j == 0);
        }
        for j in 0..i {
            let mut edge = EdgeDef::new(&format!("q{}", j), &format!("q{}", j + 1))
                .guard_atom(AtomDef::clock("x", Rel::Eq, i));
            if j + 1 < i {
                edge = edge.reset("x");
            } else {
                edge = edge.update(
                    "gate",
                    ExprDef::Add(Box::new(ExprDef::name("gate")), Box::new(ExprDef::Const(1))),
                );
            }
            def.edge(edge);
        }
        defs.push(def);
    }
    let mut unlocker = AutomatonDef::new("Unlocker");
    unlocker.clock("x", Some(k - 1));
    unlocker.int_var("gate", 0, 0, (k - 1) as i64);
    for j in 0..k {
        unlocker.location(&format!("q{}", j), j == 0);
    }
    unlocker.location("Goal", false);
    for j in 0..k - 1 {
        unlocker.edge(
            EdgeDef::new(&format!("q{}", j), &format!("q{}", j + 1))
                .guard_atom(AtomDef::clock("x", Rel::Eq, k - 1))
                .reset("x"),
        );
    }
    unlocker.edge(
        EdgeDef::new(&format!("q{}", k - 1), "Goal")
            .guard_atom(AtomDef::clock("x", Rel::Eq, k - 1))
            .guard_atom(AtomDef::new(
                ExprDef::name("gate"),
                Rel::Eq,
                ExprDef::Const((k - 1) as i64),
            )),
    );
    defs.push(unlocker);
    defs
}

/// The reachability query used with each family in the benchmark tables.
pub fn canonical_query(family: &str, k: u32) -> String {
    match family {
        "flower" => "E<> (Flower.Goal)".to_string(),
        "boolean" => {
            let atoms: Vec<String> = (1..=k).map(|i| format!("ctr{} == 1", i)).collect();
            format!("E<> ({})", atoms.join(" && "))
        }
        "ring" => {
            let atoms: Vec<String> = (1..=k).map(|i| format!("P{}.Goal", i)).collect();
            format!("E<> ({})", atoms.join(" && "))
        }
        "gates" => "E<> (Unlocker.Goal)".to_string(),
        other => panic!("unknown benchmark family '{}'", other),
    }
}

/// The backward start pattern used with the flower automaton: `x1` exactly 1,
/// `x2` and `y` unbounded, every other clock exactly 0. With
/// `simultaneous = true` the two unbounded clocks form one group (which is
/// unreachable, as `y >= 1` forces `y` to unbound before `x2`); otherwise `y`
/// unbounds first and the region is reachable.
pub fn flower_backward_pattern(n: u32, simultaneous: bool) -> String {
    assert!(n >= 2);
    let mut lines = vec![
        "location q0".to_string(),
        "x1 = 1".to_string(),
        "x2 > max".to_string(),
    ];
    for i in 3..=n {
        lines.push(format!("x{} = 0", i));
    }
    lines.push("y > max".to_string());
    if simultaneous {
        lines.push("order unbounded: [x2, y]".to_string());
    } else {
        lines.push("order unbounded: [y] < [x2]".to_string());
    }
    lines.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_model, Network};

    #[test]
    fn flower_structure() {
        let def = gen_flower(4);
        assert_eq!(def.clocks.len(), 5);
        assert_eq!(def.edges.len(), 5);
        assert_eq!(def.locations.len(), 2);
        let net = Network::link(&[def]).unwrap();
        assert!(validate_model(&net).is_empty());
        assert_eq!(net.clock_max(net.clock_id("x3").unwrap()), 3);
        assert_eq!(net.clock_max(net.clock_id("y").unwrap()), 1);
    }

    #[test]
    fn ring_components_have_six_locations_and_transitions() {
        for def in gen_ring(2) {
            assert_eq!(def.locations.len(), 6);
            assert_eq!(def.edges.len(), 6);
        }
    }

    #[test]
    fn gates_share_one_counter_with_range_k_minus_one() {
        let defs = gen_gates(3);
        assert_eq!(defs.len(), 3); // two keys and the unlocker
        let net = Network::link(&defs).unwrap();
        assert!(validate_model(&net).is_empty());
        assert_eq!(net.vars.len(), 1);
        assert_eq!(net.vars[0].lo, 0);
        assert_eq!(net.vars[0].hi, 2);
    }

    #[test]
    fn all_families_validate_up_to_k_8() {
        for k in 2..=8 {
            for defs in [gen_boolean(k), gen_ring(k), gen_gates(k)] {
                let net = Network::link(&defs).unwrap();
                assert!(validate_model(&net).is_empty(), "k = {}", k);
            }
            let net = Network::link(&[gen_flower(k)]).unwrap();
            assert!(validate_model(&net).is_empty());
        }
    }
}
