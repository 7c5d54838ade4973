// SPDX-License-Identifier: Apache-2.0

mod common;

use cdsl::engine::{run_fault, run_faults, run_two_stage, search, EngineConfig, Reason, SearchState};
use cdsl::fault::{enumerate_faults, AtpgResult, Fault, Status};
use cdsl::logic5::Value5;
use cdsl::netlist::{extract_cone, parse_bench, Circuit};
use cdsl::oracle::{detects, exhaustive_classify, Classification};
use proptest::prelude::*;

fn fault(c: &Circuit, label: &str) -> Fault {
    Fault::parse(c, label).unwrap()
}

fn solve(c: &Circuit, f: Fault, config: &EngineConfig) -> AtpgResult {
    let cone = extract_cone(c, f.site).unwrap();
    run_fault(c, &cone, f, config)
}

fn check_against_oracle(c: &Circuit, results: &[AtpgResult]) {
    for r in results {
        match &r.status {
            Status::Testable(p) => assert!(detects(c, p, r.fault), "{}", r.fault.label(c)),
            Status::Untestable => {
                if let Ok(cone) = extract_cone(c, r.fault.site) {
                    assert_eq!(exhaustive_classify(c, &cone, r.fault), Ok(Classification::Untestable));
                }
            }
            Status::Aborted => {}
        }
    }
}

#[test]
fn activation_places_the_fault_effect() {
    let c = common::and2();
    let config = EngineConfig::plain(100);
    let y = fault(&c, "y/0");
    let cone = extract_cone(&c, y.site).unwrap();
    let mut s = SearchState::new(&c, &cone, y, &config);
    s.activate(&[]).unwrap();
    assert_eq!(s.value(y.site), Value5::D);
    assert!(s.j_frontier().contains(&y.site));
    assert_eq!(s.trail().node(0).reason, Reason::FaultActivation);
    assert_eq!(s.trail().node(0).level, 0);

    let a = fault(&c, "a/1");
    let cone = extract_cone(&c, a.site).unwrap();
    let mut s = SearchState::new(&c, &cone, a, &config);
    s.activate(&[]).unwrap();
    s.propagate().unwrap();
    assert_eq!(s.value(a.site), Value5::Dbar);
    assert!(s.j_frontier().is_empty());
}

#[test]
fn forward_and_backward_implication() {
    let c = parse_bench("INPUT(a)\nINPUT(b)\nINPUT(c)\nOUTPUT(z)\ny = AND(a, b)\nz = AND(y, c)").unwrap();
    let g = |n: &str| c.find(n).unwrap();
    let config = EngineConfig::plain(100);
    let f = fault(&c, "c/0");
    let cone = extract_cone(&c, f.site).unwrap();

    let mut s = SearchState::new(&c, &cone, f, &config);
    s.activate(&[]).unwrap();
    let na = s.assume(g("a"), Value5::One);
    let nb = s.assume(g("b"), Value5::One);
    s.propagate().unwrap();
    assert_eq!(s.value(g("y")), Value5::One);
    let node = s.trail().nodes().iter().find(|n| n.gate == g("y")).unwrap();
    assert_eq!(node.reason, Reason::Implied(vec![na, nb]));
    assert_eq!(node.level, 2);

    let mut s = SearchState::new(&c, &cone, f, &config);
    s.activate(&[]).unwrap();
    s.assume(g("y"), Value5::Zero);
    s.assume(g("a"), Value5::One);
    s.propagate().unwrap();
    assert_eq!(s.value(g("b")), Value5::Zero);
}

#[test]
fn side_input_gets_the_non_controlling_value() {
    let c = common::and2();
    let config = EngineConfig::plain(100);
    let f = fault(&c, "a/0");
    let cone = extract_cone(&c, f.site).unwrap();
    let mut s = SearchState::new(&c, &cone, f, &config);
    s.activate(&[]).unwrap();
    s.propagate().unwrap();
    assert_eq!(s.decide(), Some((c.find("b").unwrap(), Value5::One)));
}

#[test]
fn lowest_gate_breaks_propagation_ties() {
    let c = parse_bench("INPUT(a)\nINPUT(b)\nINPUT(c)\nOUTPUT(y1)\nOUTPUT(y2)\ny1 = AND(a, b)\ny2 = AND(a, c)").unwrap();
    let config = EngineConfig::plain(100);
    let f = fault(&c, "a/0");
    let cone = extract_cone(&c, f.site).unwrap();
    let mut s = SearchState::new(&c, &cone, f, &config);
    s.activate(&[]).unwrap();
    s.propagate().unwrap();
    assert_eq!(s.d_frontier().len(), 2);
    assert_eq!(s.decide(), Some((c.find("b").unwrap(), Value5::One)));
}

#[test]
fn blocked_effect_leaves_nothing_to_decide() {
    let c = common::and2();
    let config = EngineConfig::plain(100);
    let f = fault(&c, "a/0");
    let cone = extract_cone(&c, f.site).unwrap();
    let mut s = SearchState::new(&c, &cone, f, &config);
    s.activate(&[]).unwrap();
    s.assume(c.find("b").unwrap(), Value5::Zero);
    s.propagate().unwrap();
    assert!(s.d_frontier().is_empty());
    assert_eq!(s.decide(), None);
}

#[test]
fn chronological_flip() {
    let c = common::and2();
    let b = c.find("b").unwrap();
    let config = EngineConfig::plain(100);
    let f = fault(&c, "a/0");
    let cone = extract_cone(&c, f.site).unwrap();
    let mut s = SearchState::new(&c, &cone, f, &config);
    s.activate(&[]).unwrap();
    s.propagate().unwrap();
    s.assume(b, Value5::Zero);
    s.propagate().unwrap();
    assert!(s.backtrack_chrono());
    assert_eq!(s.value(b), Value5::One);
    assert_eq!(s.stats().backtracks, 1);
    let node = s.trail().nodes().iter().find(|n| n.gate == b).unwrap();
    assert!(matches!(node.reason, Reason::Implied(_)));
    assert_eq!(node.level, 0);
    assert!(!s.backtrack_chrono());
}

#[test]
fn small_examples() {
    let c = common::and2();
    let r = solve(&c, fault(&c, "y/0"), &EngineConfig::plain(100));
    assert_eq!(r.status, Status::Testable("11".parse().unwrap()));

    for config in [EngineConfig::plain(100), EngineConfig::cdsl(100)] {
        let c = common::absorption();
        assert_eq!(solve(&c, fault(&c, "m/0"), &config).status, Status::Untestable);
        let c = common::consensus();
        assert_eq!(solve(&c, fault(&c, "t3/0"), &config).status, Status::Untestable);
        let all = run_faults(&c, &enumerate_faults(&c), &config, &[], 1);
        check_against_oracle(&c, &all);
    }
}

#[test]
fn c17_matches_exhaustive_oracle() {
    let c = common::benchmark("c17");
    for config in [EngineConfig::plain(100), EngineConfig::cdsl(100)] {
        let rs = run_faults(&c, &enumerate_faults(&c), &config, &[], 1);
        assert!(rs.iter().all(|r| r.status.is_testable()));
        check_against_oracle(&c, &rs);
    }
}

#[test]
fn limit_one_aborts_a_hard_fault() {
    let c = common::multiplier(5);
    let faults = enumerate_faults(&c);
    let plain = run_faults(&c, &faults, &EngineConfig::plain(1000), &[], 0);
    let hard = plain
        .iter()
        .find(|r| r.stats.backtracks >= 2)
        .expect("some fault needs two backtracks");
    assert_eq!(solve(&c, hard.fault, &EngineConfig::plain(1)).status, Status::Aborted);
    let r = solve(&c, hard.fault, &EngineConfig::plain(1));
    assert_eq!(r.stats.backtracks, 1);
}

#[test]
fn two_stage_retries_only_aborts() {
    let c = common::multiplier(6);
    let faults = enumerate_faults(&c);
    let config = EngineConfig::default();
    let one = run_faults(&c, &faults, &config.stage1(), &[], 0);
    let two = run_two_stage(&c, &faults, &config, &[], 0);
    let aborted = |rs: &[AtpgResult]| rs.iter().filter(|r| r.status == Status::Aborted).count();
    assert!(aborted(&two) <= aborted(&one));
    for (a, b) in one.iter().zip(&two) {
        if a.status != Status::Aborted {
            assert_eq!(a.status, b.status);
            assert_eq!(b.stats.learnt_count, 0);
        }
    }
    check_against_oracle(&c, &two);
}

#[test]
fn results_do_not_depend_on_jobs() {
    let c = common::benchmark("c432");
    let faults = enumerate_faults(&c);
    let strip = |rs: Vec<AtpgResult>| -> Vec<_> {
        rs.into_iter()
            .map(|mut r| {
                r.stats.micros = 0;
                r
            })
            .collect()
    };
    let config = EngineConfig::cdsl(100);
    let a = strip(run_faults(&c, &faults, &config, &[], 1));
    let b = strip(run_faults(&c, &faults, &config, &[], 0));
    let d = strip(run_faults(&c, &faults, &config, &[], 3));
    assert_eq!(a, b);
    assert_eq!(a, d);
}

#[test]
fn every_backjump_is_asserting() {
    let c = common::multiplier(6);
    let config = EngineConfig::cdsl(100);
    let mut checks = 0;
    let mut conflicts = 0;
    for f in enumerate_faults(&c) {
        let cone = extract_cone(&c, f.site).unwrap();
        let out = search(&c, &cone, f, &config, &[]);
        checks += out.asserting_checks;
        conflicts += out.result.stats.conflicts;
    }
    assert!(conflicts > 0);
    assert!(checks > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_circuits_agree_with_oracle(seed in any::<u64>(), n_pi in 2usize..9, n_gates in 2usize..40, learn in any::<bool>()) {
        let c = common::random_circuit(seed, n_pi, n_gates, 3);
        let mut config = if learn { EngineConfig::cdsl(1000) } else { EngineConfig::plain(1000) };
        config.check_invariants = true;
        let rs = run_faults(&c, &enumerate_faults(&c), &config, &[], 1);
        check_against_oracle(&c, &rs);
        for r in &rs {
            prop_assert!(r.status != Status::Aborted);
        }
    }

    #[test]
    fn redundant_logic_agrees_with_oracle(seed in any::<u64>(), learn in any::<bool>()) {
        let c = common::redundant_logic(seed, 6, 25);
        let mut config = if learn { EngineConfig::cdsl(1000) } else { EngineConfig::plain(1000) };
        config.check_invariants = true;
        let rs = run_faults(&c, &enumerate_faults(&c), &config, &[], 1);
        check_against_oracle(&c, &rs);
    }
}
