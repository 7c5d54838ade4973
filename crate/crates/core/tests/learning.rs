// SPDX-License-Identifier: Apache-2.0

mod common;

use std::collections::BTreeSet;

use cdsl::engine::{search, Conflict, EngineConfig, ImplicationGraph, LearnMode, Reason, SearchState};
use cdsl::fault::Fault;
use cdsl::learning::{analyze_decision_based, analyze_uip, backjump_level, LearntConstraint};
use cdsl::logic5::Value5;
use cdsl::netlist::{extract_cone, Circuit, GateId};
use common::oracles::{dominator_uip, random_trail, small_cone_faults, violations, RandomTrail};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn names(c: &Circuit, lc: &LearntConstraint) -> BTreeSet<String> {
    lc.gates().map(|g| c.name(g).to_string()).collect()
}

fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

#[test]
fn worked_example_hand_built_graph() {
    let c = common::learning_example();
    let g = |n: &str| c.find(n).unwrap();
    let one = Value5::One;
    let mut t = ImplicationGraph::new();
    let x0 = t.push_root(g("x0"), one, Reason::Constraint);
    let x1 = t.push_decision(g("x1"), one);
    let z1 = t.push_implied(g("z1"), one, vec![x1]);
    let x2 = t.push_decision(g("x2"), one);
    let x3 = t.push_decision(g("x3"), one);
    let x5 = t.push_implied(g("x5"), one, vec![x3]);
    let x4 = t.push_decision(g("x4"), one);
    let x9 = t.push_implied(g("x9"), one, vec![z1, x3, x4]);
    let x7 = t.push_implied(g("x7"), one, vec![x4, x5, x9]);
    t.check().unwrap();
    let conflict = Conflict {
        gate: Some(g("x8")),
        nodes: vec![x4, x7, x0, x2],
    };
    let lc = analyze_uip(&t, &conflict).unwrap();
    assert_eq!(names(&c, &lc), set(&["x0", "x2", "x4", "x5", "z1", "x3"]));
    assert_eq!(lc.uip, Some(g("x4")));
    assert_eq!(backjump_level(&lc), t.node(x3).level);

    let db = analyze_decision_based(&t).unwrap();
    assert_eq!(names(&c, &db), set(&["x1", "x2", "x3", "x4"]));
}

#[test]
fn learning_example_engine_replay() {
    let c = common::learning_example();
    let g = |n: &str| c.find(n).unwrap();
    let fault = Fault::sa0(g("f"));
    let cone = extract_cone(&c, fault.site).unwrap();
    let config = EngineConfig::cdsl(100);
    let mut s = SearchState::new(&c, &cone, fault, &config);
    s.activate(&[]).unwrap();
    s.propagate().unwrap();
    let mut conflict = None;
    for n in ["x0", "x1", "x2", "x3", "x4"] {
        s.assume(g(n), Value5::One);
        if let Err(k) = s.propagate() {
            conflict = Some(k);
            break;
        }
    }
    let conflict = conflict.expect("replay conflicts");
    assert_eq!(conflict.gate, Some(g("x8")));
    let lc = analyze_uip(s.trail(), &conflict).unwrap();
    assert_eq!(names(&c, &lc), set(&["x0", "x2", "x4", "x5", "z1", "x3"]));
    assert_eq!(lc.uip, Some(g("x4")));
    let x3_level = lc.literals.iter().find(|l| l.gate == g("x3")).unwrap().level;
    assert_eq!(backjump_level(&lc), x3_level);
    let db = analyze_decision_based(s.trail()).unwrap();
    assert_eq!(names(&c, &db), set(&["x0", "x1", "x2", "x3", "x4"]));
}

#[test]
fn first_uip_matches_dominator_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut agree = 0;
    for _ in 0..2000 {
        let RandomTrail { trail, conflict } = random_trail(&mut rng);
        trail.check().unwrap();
        let lc = analyze_uip(&trail, &conflict).unwrap();
        let (uip, cut) = dominator_uip(&trail, &conflict);
        let want: BTreeSet<GateId> = cut.iter().map(|&n| trail.node(n).gate).collect();
        let got: BTreeSet<GateId> = lc.gates().collect();
        assert_eq!(got, want);
        assert_eq!(lc.uip, Some(trail.node(uip).gate));
        let level = trail.node(uip).level;
        assert_eq!(lc.literals.iter().filter(|l| l.level == level).count(), 1);
        agree += 1;
    }
    assert_eq!(agree, 2000);
}

#[test]
fn learnt_constraints_hold_on_every_test() {
    let mut circuits = vec![common::masking(), common::consensus()];
    for seed in 0..6 {
        circuits.push(common::redundant_logic(seed, 8, 40));
        circuits.push(common::random_circuit(seed, 10, 60, 4));
    }
    for name in ["c432", "c880"] {
        circuits.push(common::benchmark(name));
    }
    let mut producing = 0;
    let mut checked = 0;
    for (i, c) in circuits.iter().enumerate() {
        let mut config = EngineConfig::cdsl(100);
        if i % 2 == 1 {
            config.learn_mode = LearnMode::Both;
        }
        for fault in small_cone_faults(c, 16) {
            let cone = extract_cone(c, fault.site).unwrap();
            let out = search(c, &cone, fault, &config, &[]);
            if out.learnt.is_empty() {
                continue;
            }
            producing += 1;
            for lc in &out.learnt {
                assert_eq!(violations(c, fault, lc), 0, "{} {}", fault.label(c), lc.dump(c));
                checked += 1;
            }
        }
    }
    assert!(producing >= 100, "only {producing} faults learnt anything");
    assert!(checked >= producing);
}
