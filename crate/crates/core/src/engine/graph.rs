// SPDX-License-Identifier: Apache-2.0

//! The trail of assignments with reason edges and decision levels.

use crate::logic5::Value5;
use crate::netlist::GateId;

/// Position of an assignment on the trail.
pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reason {
    Decision,
    Implied(Vec<NodeId>),
    FaultActivation,
    /// External PI constraint, always at level 0.
    Constraint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub gate: GateId,
    pub value: Value5,
    pub level: u32,
    pub reason: Reason,
}

impl Assignment {
    pub fn antecedents(&self) -> &[NodeId] {
        match &self.reason {
            Reason::Implied(a) => a,
            _ => &[],
        }
    }

    pub fn is_decision(&self) -> bool {
        self.reason == Reason::Decision
    }
}

/// A set of trail assignments that cannot all hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conflict {
    /// Gate where the disagreement surfaced, if a single one exists.
    pub gate: Option<GateId>,
    pub nodes: Vec<NodeId>,
}

#[derive(Debug, Clone, Default)]
pub struct ImplicationGraph {
    nodes: Vec<Assignment>,
    /// Trail position where each decision level starts; entry 0 is level 0.
    level_index: Vec<usize>,
}

impl ImplicationGraph {
    pub fn new() -> ImplicationGraph {
        ImplicationGraph {
            nodes: Vec::new(),
            level_index: vec![0],
        }
    }

    pub fn decision_level(&self) -> u32 {
        (self.level_index.len() - 1) as u32
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Assignment {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Assignment] {
        &self.nodes
    }

    pub fn level_start(&self, level: u32) -> usize {
        self.level_index[level as usize]
    }

    /// Level-0 assignment without antecedents.
    pub fn push_root(&mut self, gate: GateId, value: Value5, reason: Reason) -> NodeId {
        assert!(
            matches!(reason, Reason::FaultActivation | Reason::Constraint),
            "root assignments are activations or constraints"
        );
        assert_eq!(self.decision_level(), 0, "root assignment above level 0");
        self.nodes.push(Assignment { gate, value, level: 0, reason });
        self.nodes.len() - 1
    }

    /// Opens a new decision level.
    pub fn push_decision(&mut self, gate: GateId, value: Value5) -> NodeId {
        self.level_index.push(self.nodes.len());
        let level = self.decision_level();
        self.nodes.push(Assignment {
            gate,
            value,
            level,
            reason: Reason::Decision,
        });
        self.nodes.len() - 1
    }

    pub fn push_implied(&mut self, gate: GateId, value: Value5, antecedents: Vec<NodeId>) -> NodeId {
        assert!(!antecedents.is_empty(), "implication without antecedents");
        let id = self.nodes.len();
        let level = antecedents
            .iter()
            .map(|&a| {
                assert!(a < id, "antecedent {a} not yet on the trail");
                self.nodes[a].level
            })
            .max()
            .unwrap_or(0);
        self.nodes.push(Assignment {
            gate,
            value,
            level,
            reason: Reason::Implied(antecedents),
        });
        id
    }

    /// Removes every assignment above `level`, returning them in trail order.
    pub fn pop_to_level(&mut self, level: u32) -> Vec<Assignment> {
        if level >= self.decision_level() {
            return Vec::new();
        }
        let cut = self.level_index[level as usize + 1];
        self.level_index.truncate(level as usize + 1);
        self.nodes.split_off(cut)
    }

    pub fn decisions(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.level_index[1..].iter().copied()
    }

    /// Checks the structural invariants. Used by tests.
    pub fn check(&self) -> Result<(), String> {
        for (id, n) in self.nodes.iter().enumerate() {
            match &n.reason {
                Reason::Decision => {
                    if self.level_index.get(n.level as usize) != Some(&id) {
                        return Err(format!("decision {id} does not open level {}", n.level));
                    }
                }
                Reason::Implied(ants) => {
                    if ants.is_empty() {
                        return Err(format!("implied node {id} without antecedents"));
                    }
                    if ants.iter().any(|&a| a >= id) {
                        return Err(format!("node {id} has an antecedent after it"));
                    }
                    let max = ants.iter().map(|&a| self.nodes[a].level).max().unwrap();
                    if max != n.level {
                        return Err(format!("node {id} level {} != max antecedent level {max}", n.level));
                    }
                }
                Reason::FaultActivation | Reason::Constraint => {
                    if n.level != 0 {
                        return Err(format!("root node {id} above level 0"));
                    }
                }
            }
        }
        Ok(())
    }
}
