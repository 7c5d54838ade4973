// SPDX-License-Identifier: Apache-2.0

//! Ranks conflict-heavy gates of a failed search, traces them back to PI
//! constraints and proposes constraint edits.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde_json::{json, Value};
use thiserror::Error;

use crate::engine::{search, EngineConfig};
use crate::fault::{AtpgResult, Fault, Status};
use crate::learning::LearntConstraint;
use crate::logic5::Value5;
use crate::netlist::{extract_cone, Circuit, GateId, GateKind};
use crate::oracle::Logic3;

/// A PI held at a fixed value by the test environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PiConstraint {
    pub pi: GateId,
    pub value: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagnosisError {
    #[error("line {line}: expected name=0 or name=1")]
    Syntax { line: usize },
    #[error("line {line}: unknown net '{name}'")]
    UnknownNet { line: usize, name: String },
    #[error("line {line}: '{name}' is not a primary input")]
    NotInput { line: usize, name: String },
    #[error("line {line}: '{name}' is constrained twice")]
    Duplicate { line: usize, name: String },
    #[error("no learnt constraints to score")]
    EmptyDb,
    #[error("fault is testable under the given constraints")]
    NotFailing,
}

/// Reads `name=0|1` lines; `#` starts a comment.
pub fn parse_constraints(circuit: &Circuit, text: &str) -> Result<Vec<PiConstraint>, DiagnosisError> {
    let mut out: Vec<PiConstraint> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (name, value) = body.split_once('=').ok_or(DiagnosisError::Syntax { line })?;
        let (name, value) = (name.trim(), value.trim());
        let value = match value {
            "0" => false,
            "1" => true,
            _ => return Err(DiagnosisError::Syntax { line }),
        };
        let pi = circuit.find(name).ok_or_else(|| DiagnosisError::UnknownNet {
            line,
            name: name.to_string(),
        })?;
        if circuit.kind(pi) != GateKind::Input {
            return Err(DiagnosisError::NotInput {
                line,
                name: name.to_string(),
            });
        }
        if out.iter().any(|c| c.pi == pi) {
            return Err(DiagnosisError::Duplicate {
                line,
                name: name.to_string(),
            });
        }
        out.push(PiConstraint { pi, value });
    }
    Ok(out)
}

pub fn write_constraints(circuit: &Circuit, constraints: &[PiConstraint]) -> String {
    let mut out = String::new();
    for c in constraints {
        let _ = writeln!(out, "{}={}", circuit.name(c.pi), c.value as u8);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suggestion {
    Relax,
    AddOpposite,
}

impl Suggestion {
    pub fn label(self) -> &'static str {
        match self {
            Suggestion::Relax => "RELAX",
            Suggestion::AddOpposite => "ADD_OPPOSITE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImplicatedPi {
    pub pi: GateId,
    /// Value in the failed search's final assignment, or the constrained value.
    pub alpha: Logic3,
    pub suggestion: Suggestion,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosisReport {
    pub fault: Fault,
    pub status_before: Status,
    pub gate_scores: Vec<(GateId, usize)>,
    pub top_k: usize,
    pub implicated_pis: Vec<ImplicatedPi>,
    pub rerun: Option<AtpgResult>,
}

impl DiagnosisReport {
    pub fn top_gates(&self) -> Vec<GateId> {
        self.gate_scores.iter().take(self.top_k).map(|&(g, _)| g).collect()
    }

    pub fn to_json(&self, circuit: &Circuit) -> Value {
        let gates: Vec<Value> = self
            .gate_scores
            .iter()
            .map(|&(g, n)| json!({"gate": circuit.name(g), "frequency": n}))
            .collect();
        let pis: Vec<Value> = self
            .implicated_pis
            .iter()
            .map(|p| {
                json!({
                    "pi": circuit.name(p.pi),
                    "alpha": p.alpha.symbol().to_string(),
                    "suggestion": p.suggestion.label(),
                })
            })
            .collect();
        let rerun = match &self.rerun {
            Some(r) => json!({
                "status": r.status.label(),
                "pattern": r.status.pattern().map(|p| p.to_string()),
                "backtracks": r.stats.backtracks,
            }),
            None => Value::Null,
        };
        json!({
            "fault": self.fault.label(circuit),
            "status_before": self.status_before.label(),
            "top_k": self.top_k,
            "gate_scores": gates,
            "implicated_pis": pis,
            "rerun": rerun,
        })
    }
}

/// Number of constraints each gate occurs in, most frequent first, ties to
/// the lowest id.
pub fn score_gates(constraints: &[LearntConstraint]) -> Result<Vec<(GateId, usize)>, DiagnosisError> {
    if constraints.is_empty() {
        return Err(DiagnosisError::EmptyDb);
    }
    let mut counts: BTreeMap<GateId, usize> = BTreeMap::new();
    for c in constraints {
        let mut gates: Vec<GateId> = c.gates().collect();
        gates.sort_unstable();
        gates.dedup();
        for g in gates {
            *counts.entry(g).or_default() += 1;
        }
    }
    let mut ranked: Vec<(GateId, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(ranked)
}

/// PIs in the transitive fanin of `top_gates`, in PI order.
pub fn trace_to_constraints(
    circuit: &Circuit,
    constraints: &[PiConstraint],
    top_gates: &[GateId],
    final_values: &[Value5],
) -> Vec<ImplicatedPi> {
    let mut seen = vec![false; circuit.len()];
    let mut stack: Vec<GateId> = top_gates.to_vec();
    for g in top_gates {
        seen[g.index()] = true;
    }
    while let Some(g) = stack.pop() {
        for &f in circuit.fanin(g) {
            if !seen[f.index()] {
                seen[f.index()] = true;
                stack.push(f);
            }
        }
    }
    let mut out = Vec::new();
    for &pi in circuit.primary_inputs() {
        if !seen[pi.index()] {
            continue;
        }
        if let Some(c) = constraints.iter().find(|c| c.pi == pi) {
            out.push(ImplicatedPi {
                pi,
                alpha: Logic3::from_bool(c.value),
                suggestion: Suggestion::Relax,
            });
        } else if let Some(b) = final_values.get(pi.index()).and_then(|v| v.good().as_bool()) {
            out.push(ImplicatedPi {
                pi,
                alpha: Logic3::from_bool(b),
                suggestion: Suggestion::AddOpposite,
            });
        }
    }
    out
}

/// Constraint set with the suggestions applied; the input is not modified.
pub fn apply_suggestions(constraints: &[PiConstraint], implicated: &[ImplicatedPi]) -> Vec<PiConstraint> {
    let mut out: Vec<PiConstraint> = constraints
        .iter()
        .filter(|c| {
            !implicated
                .iter()
                .any(|p| p.pi == c.pi && p.suggestion == Suggestion::Relax)
        })
        .copied()
        .collect();
    for p in implicated {
        if p.suggestion == Suggestion::AddOpposite {
            if let Some(b) = p.alpha.as_bool() {
                out.push(PiConstraint { pi: p.pi, value: !b });
            }
        }
    }
    out.sort();
    out
}

/// Runs the fault with the stage-2 configuration and analyses what it learnt.
pub fn diagnose(
    circuit: &Circuit,
    fault: Fault,
    config: &EngineConfig,
    constraints: &[PiConstraint],
    top_k: usize,
) -> Result<DiagnosisReport, DiagnosisError> {
    let stage2 = config.stage2();
    let Ok(cone) = extract_cone(circuit, fault.site) else {
        return Err(DiagnosisError::EmptyDb);
    };
    let outcome = search(circuit, &cone, fault, &stage2, constraints);
    if outcome.result.status.is_testable() {
        return Err(DiagnosisError::NotFailing);
    }
    let gate_scores = score_gates(outcome.db.constraints())?;
    let top_k = top_k.min(gate_scores.len());
    let top: Vec<GateId> = gate_scores.iter().take(top_k).map(|&(g, _)| g).collect();
    let implicated_pis = trace_to_constraints(circuit, constraints, &top, &outcome.final_values);
    Ok(DiagnosisReport {
        fault,
        status_before: outcome.result.status,
        gate_scores,
        top_k,
        implicated_pis,
        rerun: None,
    })
}

/// `diagnose`, then a stage-2 rerun under the edited constraint set.
pub fn diagnose_and_rerun(
    circuit: &Circuit,
    fault: Fault,
    config: &EngineConfig,
    constraints: &[PiConstraint],
    top_k: usize,
) -> Result<DiagnosisReport, DiagnosisError> {
    let mut report = diagnose(circuit, fault, config, constraints, top_k)?;
    let edited = apply_suggestions(constraints, &report.implicated_pis);
    let cone = extract_cone(circuit, fault.site).map_err(|_| DiagnosisError::EmptyDb)?;
    report.rerun = Some(search(circuit, &cone, fault, &config.stage2(), &edited).result);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learning::{ConstraintKind, Literal};
    use crate::netlist::parse_bench;

    fn lc(gates: &[usize]) -> LearntConstraint {
        LearntConstraint {
            literals: gates
                .iter()
                .map(|&g| Literal {
                    gate: GateId::new(g),
                    value: Value5::One,
                    level: 1,
                })
                .collect(),
            kind: ConstraintKind::UipBased,
            uip: None,
            conflict_level: 1,
            last_used: 0,
        }
    }

    #[test]
    fn scores_count_constraints() {
        let db = vec![lc(&[1, 2]), lc(&[1, 3]), lc(&[1]), lc(&[2]), lc(&[4])];
        let ranked = score_gates(&db).unwrap();
        assert_eq!(ranked[0], (GateId::new(1), 3));
        assert_eq!(ranked[1], (GateId::new(2), 2));
        assert_eq!(ranked[2], (GateId::new(3), 1));
        assert_eq!(ranked[3], (GateId::new(4), 1));
        assert_eq!(score_gates(&[]), Err(DiagnosisError::EmptyDb));
    }

    #[test]
    fn constraint_file() {
        let c = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)").unwrap();
        let cs = parse_constraints(&c, "# pins\na=1\n b = 0 \n").unwrap();
        assert_eq!(cs.len(), 2);
        assert_eq!(write_constraints(&c, &cs), "a=1\nb=0\n");
        assert!(matches!(parse_constraints(&c, "y=1"), Err(DiagnosisError::NotInput { .. })));
        assert!(matches!(parse_constraints(&c, "a=1\na=0"), Err(DiagnosisError::Duplicate { line: 2, .. })));
        assert!(matches!(parse_constraints(&c, "a=2"), Err(DiagnosisError::Syntax { line: 1 })));
        assert!(matches!(parse_constraints(&c, "q=1"), Err(DiagnosisError::UnknownNet { .. })));
    }

    #[test]
    fn trace_kinds() {
        let c = parse_bench("INPUT(a)\nINPUT(b)\nINPUT(e)\nOUTPUT(y)\nOUTPUT(z)\ny = AND(a, b)\nz = NOT(e)").unwrap();
        let (a, b, e, y) = (c.find("a").unwrap(), c.find("b").unwrap(), c.find("e").unwrap(), c.find("y").unwrap());
        let mut values = vec![Value5::X; c.len()];
        values[b.index()] = Value5::One;
        let cons = [PiConstraint { pi: a, value: false }];
        let got = trace_to_constraints(&c, &cons, &[y], &values);
        assert_eq!(
            got,
            vec![
                ImplicatedPi { pi: a, alpha: Logic3::Zero, suggestion: Suggestion::Relax },
                ImplicatedPi { pi: b, alpha: Logic3::One, suggestion: Suggestion::AddOpposite },
            ]
        );
        let own = trace_to_constraints(&c, &[PiConstraint { pi: e, value: true }], &[e], &values);
        assert_eq!(own[0].pi, e);
        let edited = apply_suggestions(&cons, &got);
        assert_eq!(edited, vec![PiConstraint { pi: b, value: false }]);
    }
}
