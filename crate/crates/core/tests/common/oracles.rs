// SPDX-License-Identifier: Apache-2.0

//! Reference implementations the library is checked against.

use std::collections::BTreeSet;

use cdsl::engine::{Conflict, ImplicationGraph, NodeId, Reason};
use cdsl::fault::{enumerate_faults, Fault};
use cdsl::learning::LearntConstraint;
use cdsl::logic5::Value5;
use cdsl::netlist::{extract_cone, Circuit, GateId, GateKind};
use cdsl::oracle::for_each_batch;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub struct RandomTrail {
    pub trail: ImplicationGraph,
    pub conflict: Conflict,
}

pub fn random_trail(rng: &mut ChaCha8Rng) -> RandomTrail {
    let mut t = ImplicationGraph::new();
    let mut gate = 0usize;
    let mut next = || {
        gate += 1;
        GateId::new(gate)
    };
    for _ in 0..rng.gen_range(0..3) {
        t.push_root(next(), Value5::One, Reason::FaultActivation);
    }
    let levels = rng.gen_range(1..7);
    for _ in 0..levels {
        let d = t.push_decision(next(), Value5::One);
        let mut here = vec![d];
        for _ in 0..rng.gen_range(0..8) {
            let mut ants = vec![here[rng.gen_range(0..here.len())]];
            for _ in 0..rng.gen_range(0..3) {
                ants.push(rng.gen_range(0..t.len()));
            }
            ants.sort_unstable();
            ants.dedup();
            let id = t.push_implied(next(), Value5::One, ants);
            here.push(id);
        }
    }
    let top = t.decision_level();
    let start = t.level_start(top);
    let mut nodes = vec![rng.gen_range(start..t.len())];
    for _ in 0..rng.gen_range(0..4) {
        nodes.push(rng.gen_range(0..t.len()));
    }
    nodes.sort_unstable();
    nodes.dedup();
    RandomTrail {
        trail: t,
        conflict: Conflict { gate: None, nodes },
    }
}

/// First UIP as the dominator of the conflict closest to it, then the cut
/// behind it.
pub fn dominator_uip(t: &ImplicationGraph, conflict: &Conflict) -> (NodeId, BTreeSet<NodeId>) {
    let level = conflict.nodes.iter().map(|&n| t.node(n).level).max().unwrap();
    let decision = t.level_start(level);
    let at_level: Vec<NodeId> = (decision..t.len()).filter(|&n| t.node(n).level == level).collect();
    let reaches_conflict_without = |skip: NodeId| -> bool {
        if skip == decision {
            return false;
        }
        let mut seen = BTreeSet::from([decision]);
        let mut stack = vec![decision];
        while let Some(u) = stack.pop() {
            if conflict.nodes.contains(&u) {
                return true;
            }
            for &v in &at_level {
                if v != skip && !seen.contains(&v) && t.node(v).antecedents().contains(&u) {
                    seen.insert(v);
                    stack.push(v);
                }
            }
        }
        false
    };
    let uip = at_level
        .iter()
        .copied()
        .filter(|&u| !reaches_conflict_without(u))
        .max()
        .unwrap();
    let mut cut = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let mut stack: Vec<NodeId> = conflict.nodes.clone();
    while let Some(v) = stack.pop() {
        if !seen.insert(v) {
            continue;
        }
        if t.node(v).level == level && v != uip {
            stack.extend(t.node(v).antecedents().iter().copied());
        } else {
            cut.insert(v);
        }
    }
    (uip, cut)
}

/// Number of detecting cone-PI assignments under which every literal of
/// `lc` holds.
pub fn violations(c: &Circuit, fault: Fault, lc: &LearntConstraint) -> u64 {
    let cone = extract_cone(c, fault.site).unwrap();
    let mut bad = 0u64;
    for_each_batch(c, &cone, fault, |b| {
        let mut m = b.detect;
        for lit in &lc.literals {
            let i = lit.gate.index();
            let (g, f) = (lit.value.good().as_bool().unwrap(), lit.value.faulty().as_bool().unwrap());
            m &= if g { b.good[i] } else { !b.good[i] };
            m &= if f { b.faulty[i] } else { !b.faulty[i] };
        }
        bad += m.count_ones() as u64;
        true
    })
    .unwrap();
    bad
}

pub fn small_cone_faults(c: &Circuit, max_pis: usize) -> Vec<Fault> {
    enumerate_faults(c)
        .into_iter()
        .filter(|f| extract_cone(c, f.site).map(|k| k.pis().len() <= max_pis).unwrap_or(false))
        .collect()
}

pub fn boolean(kind: GateKind, ins: &[bool]) -> bool {
    match kind {
        GateKind::Buf | GateKind::Output => ins[0],
        GateKind::Not => !ins[0],
        GateKind::And => ins.iter().all(|&b| b),
        GateKind::Nand => !ins.iter().all(|&b| b),
        GateKind::Or => ins.iter().any(|&b| b),
        GateKind::Nor => !ins.iter().any(|&b| b),
        GateKind::Xor => ins.iter().filter(|&&b| b).count() % 2 == 1,
        GateKind::Xnor => ins.iter().filter(|&&b| b).count() % 2 == 0,
        GateKind::Input => unreachable!(),
    }
}

/// Value over every 0/1 completion of the unknown inputs; X if they disagree.
pub fn ternary(kind: GateKind, ins: &[Option<bool>]) -> Option<bool> {
    let free: Vec<usize> = (0..ins.len()).filter(|&i| ins[i].is_none()).collect();
    let mut seen = [false; 2];
    for mask in 0u32..(1 << free.len()) {
        let mut full: Vec<bool> = ins.iter().map(|v| v.unwrap_or(false)).collect();
        for (k, &i) in free.iter().enumerate() {
            full[i] = (mask >> k) & 1 == 1;
        }
        seen[boolean(kind, &full) as usize] = true;
    }
    match seen {
        [true, false] => Some(false),
        [false, true] => Some(true),
        _ => None,
    }
}

pub fn split(v: Value5) -> (Option<bool>, Option<bool>) {
    match v {
        Value5::Zero => (Some(false), Some(false)),
        Value5::One => (Some(true), Some(true)),
        Value5::D => (Some(true), Some(false)),
        Value5::Dbar => (Some(false), Some(true)),
        Value5::X => (None, None),
    }
}

pub fn pair_oracle(kind: GateKind, ins: &[Value5]) -> Value5 {
    let good: Vec<Option<bool>> = ins.iter().map(|&v| split(v).0).collect();
    let faulty: Vec<Option<bool>> = ins.iter().map(|&v| split(v).1).collect();
    match (ternary(kind, &good), ternary(kind, &faulty)) {
        (Some(g), Some(f)) => Value5::from_bits(g, f),
        _ => Value5::X,
    }
}

pub fn tuples(n: usize) -> Vec<Vec<Value5>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| Value5::ALL.into_iter().map(move |v| [t.clone(), vec![v]].concat()))
            .collect();
    }
    out
}

pub fn arities(kind: GateKind) -> std::ops::RangeInclusive<usize> {
    match kind {
        GateKind::Buf | GateKind::Not | GateKind::Output => 1..=1,
        _ => 2..=4,
    }
}

/// Violations of each constraint in `db`, from one exhaustive pass.
pub fn violations_all(c: &Circuit, fault: Fault, db: &[LearntConstraint]) -> Vec<u64> {
    let cone = extract_cone(c, fault.site).unwrap();
    let mut bad = vec![0u64; db.len()];
    for_each_batch(c, &cone, fault, |b| {
        if b.detect == 0 {
            return true;
        }
        for (k, lc) in db.iter().enumerate() {
            let mut m = b.detect;
            for lit in &lc.literals {
                let i = lit.gate.index();
                let (g, f) = (lit.value.good().as_bool().unwrap(), lit.value.faulty().as_bool().unwrap());
                m &= if g { b.good[i] } else { !b.good[i] };
                m &= if f { b.faulty[i] } else { !b.faulty[i] };
            }
            bad[k] += m.count_ones() as u64;
        }
        true
    })
    .unwrap();
    bad
}
