// SPDX-License-Identifier: Apache-2.0

//! Conflict analysis over the implication graph, the learnt-constraint
//! database and the backjump target.

mod vsids;

use std::collections::BTreeSet;
use std::fmt::Write;

use thiserror::Error;

pub use vsids::VsidsState;

use crate::engine::graph::{Assignment, Conflict, ImplicationGraph, NodeId, Reason};
use crate::logic5::Value5;
use crate::netlist::{Circuit, GateId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    pub gate: GateId,
    pub value: Value5,
    /// Decision level of the assignment when the constraint was learnt.
    pub level: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    DecisionBased,
    UipBased,
    /// Conflict at level 0, resolved down to constraints and the activation.
    Refutation,
}

impl ConstraintKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ConstraintKind::DecisionBased => "decision",
            ConstraintKind::UipBased => "uip",
            ConstraintKind::Refutation => "refutation",
        }
    }
}

/// Not all of `literals` may hold at the same time.
#[derive(Debug, Clone, PartialEq)]
pub struct LearntConstraint {
    pub literals: Vec<Literal>,
    pub kind: ConstraintKind,
    pub uip: Option<GateId>,
    pub conflict_level: u32,
    pub last_used: u64,
}

impl LearntConstraint {
    pub fn contains(&self, gate: GateId) -> bool {
        self.literals.iter().any(|l| l.gate == gate)
    }

    pub fn gates(&self) -> impl Iterator<Item = GateId> + '_ {
        self.literals.iter().map(|l| l.gate)
    }

    /// `kind uip name=value@level ...`
    pub fn dump(&self, circuit: &Circuit) -> String {
        let mut out = String::from(self.kind.keyword());
        match self.uip {
            Some(u) => {
                let _ = write!(out, " {}", circuit.name(u));
            }
            None => out.push_str(" -"),
        }
        for l in &self.literals {
            let _ = write!(out, " {}={}@{}", circuit.name(l.gate), l.value, l.level);
        }
        out
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("no decisions on the trail")]
    EmptyTrail,
    #[error("conflict at decision level 0")]
    LevelZero,
    #[error("no assertable implication point at level {0}")]
    NoAssertableUip(u32),
}

/// Every decision currently on the trail.
pub fn analyze_decision_based(trail: &ImplicationGraph) -> Result<LearntConstraint, AnalysisError> {
    let literals: Vec<Literal> = trail.decisions().map(|id| literal(trail.node(id))).collect();
    if literals.is_empty() {
        return Err(AnalysisError::EmptyTrail);
    }
    Ok(LearntConstraint {
        conflict_level: trail.decision_level(),
        literals,
        kind: ConstraintKind::DecisionBased,
        uip: None,
        last_used: 0,
    })
}

fn literal(a: &Assignment) -> Literal {
    Literal {
        gate: a.gate,
        value: a.value,
        level: a.level,
    }
}

/// First unique implication point.
pub fn analyze_uip(trail: &ImplicationGraph, conflict: &Conflict) -> Result<LearntConstraint, AnalysisError> {
    analyze_uip_with(trail, conflict, |_| true)
}

/// First unique implication point whose assignment satisfies `assertable`.
///
/// Resolution continues past level-L literals that are rejected by the
/// predicate until an accepted one is the only literal left at level L.
pub fn analyze_uip_with<P>(
    trail: &ImplicationGraph,
    conflict: &Conflict,
    assertable: P,
) -> Result<LearntConstraint, AnalysisError>
where
    P: Fn(&Assignment) -> bool,
{
    let level = conflict
        .nodes
        .iter()
        .map(|&n| trail.node(n).level)
        .max()
        .unwrap_or(0);
    if level == 0 {
        return Err(AnalysisError::LevelZero);
    }
    let mut set: BTreeSet<NodeId> = conflict.nodes.iter().copied().collect();
    let uip = loop {
        let mut at_level = set.iter().rev().filter(|&&n| trail.node(n).level == level);
        let latest = *at_level.next().expect("conflict level has a literal");
        let more = at_level.next().is_some();
        let node = trail.node(latest);
        if !more && assertable(node) {
            break latest;
        }
        match &node.reason {
            Reason::Implied(ants) => {
                set.remove(&latest);
                set.extend(ants.iter().copied());
            }
            _ => return Err(AnalysisError::NoAssertableUip(level)),
        }
    };
    Ok(LearntConstraint {
        literals: set.iter().map(|&n| literal(trail.node(n))).collect(),
        kind: ConstraintKind::UipBased,
        uip: Some(trail.node(uip).gate),
        conflict_level: level,
        last_used: 0,
    })
}

/// Resolves a conflict all the way down to root assignments.
pub fn refutation(trail: &ImplicationGraph, conflict: &Conflict) -> LearntConstraint {
    let mut set: BTreeSet<NodeId> = conflict.nodes.iter().copied().collect();
    let mut roots = BTreeSet::new();
    while let Some(n) = set.pop_last() {
        match &trail.node(n).reason {
            Reason::Implied(ants) => set.extend(ants.iter().copied()),
            _ => {
                roots.insert(n);
            }
        }
    }
    LearntConstraint {
        literals: roots.iter().map(|&n| literal(trail.node(n))).collect(),
        kind: ConstraintKind::Refutation,
        uip: None,
        conflict_level: 0,
        last_used: 0,
    }
}

/// Largest recorded level among the non-UIP literals, 0 if there are none.
pub fn backjump_level(constraint: &LearntConstraint) -> u32 {
    constraint
        .literals
        .iter()
        .filter(|l| Some(l.gate) != constraint.uip)
        .map(|l| l.level)
        .max()
        .unwrap_or(0)
}

#[derive(Debug, Clone)]
pub struct ClauseDb {
    constraints: Vec<LearntConstraint>,
    loop_counter: u64,
    /// `u64::MAX` disables forgetting.
    forget_n: u64,
}

impl ClauseDb {
    pub fn new(forget_n: u64) -> ClauseDb {
        ClauseDb {
            constraints: Vec::new(),
            loop_counter: 0,
            forget_n,
        }
    }

    pub fn constraints(&self) -> &[LearntConstraint] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn loop_counter(&self) -> u64 {
        self.loop_counter
    }

    pub fn forget_n(&self) -> u64 {
        self.forget_n
    }

    /// Starts a conflict-analysis round.
    pub fn start_loop(&mut self) {
        self.loop_counter += 1;
    }

    /// Adds a constraint, marked as used in the current round. Returns its index.
    pub fn add(&mut self, mut constraint: LearntConstraint) -> usize {
        constraint.last_used = self.loop_counter;
        self.constraints.push(constraint);
        self.constraints.len() - 1
    }

    pub fn touch(&mut self, index: usize) {
        self.constraints[index].last_used = self.loop_counter;
    }

    pub fn forget_pass(&mut self) {
        let (now, n) = (self.loop_counter, self.forget_n);
        self.constraints.retain(|c| now - c.last_used <= n);
    }
}

/// An assignment forced by a constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Forced {
    pub gate: GateId,
    pub value: Value5,
    /// Gates of the literals that currently match.
    pub antecedents: Vec<GateId>,
    pub constraint: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("learnt constraint {index} is fully matched")]
pub struct ConstraintViolated {
    pub index: usize,
}

/// Unit implication, treating every binary literal as assertable.
pub fn unit_imply(db: &mut ClauseDb, values: &[Value5]) -> Result<Vec<Forced>, ConstraintViolated> {
    unit_imply_with(db, values, |_| true)
}

/// Unit implication. The remaining literal is flipped only when its value is
/// binary and `assertable` accepts its gate, i.e. the gate can hold nothing
/// but 0 or 1.
pub fn unit_imply_with<P>(
    db: &mut ClauseDb,
    values: &[Value5],
    assertable: P,
) -> Result<Vec<Forced>, ConstraintViolated>
where
    P: Fn(GateId) -> bool,
{
    let mut forced = Vec::new();
    let mut fired = Vec::new();
    for (index, c) in db.constraints.iter().enumerate() {
        let mut open = None;
        let mut n_open = 0;
        let mut satisfied = false;
        for lit in &c.literals {
            let v = values[lit.gate.index()];
            if v == lit.value {
                continue;
            }
            if v == Value5::X {
                n_open += 1;
                open = Some(*lit);
                if n_open > 1 {
                    break;
                }
            } else {
                satisfied = true;
                break;
            }
        }
        if satisfied || n_open > 1 {
            continue;
        }
        match open {
            None => {
                db.constraints[index].last_used = db.loop_counter;
                return Err(ConstraintViolated { index });
            }
            Some(lit) => {
                let Some(b) = lit.value.as_bool() else { continue };
                if !assertable(lit.gate) {
                    continue;
                }
                fired.push(index);
                forced.push(Forced {
                    gate: lit.gate,
                    value: Value5::from_bool(!b),
                    antecedents: c.gates().filter(|&g| g != lit.gate).collect(),
                    constraint: index,
                });
            }
        }
    }
    for index in fired {
        db.touch(index);
    }
    Ok(forced)
}
