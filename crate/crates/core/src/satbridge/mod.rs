// SPDX-License-Identifier: Apache-2.0

//! Dual-copy CNF encoding of a fault cone, DIMACS I/O and a timing harness
//! that sets encoding cost against solving cost.

mod solver;

use std::fmt::Write;
use std::time::Instant;

use thiserror::Error;

pub use solver::{solve, SatResult, Solver};

use crate::engine::{run_fault, EngineConfig};
use crate::fault::{Fault, Status};
use crate::netlist::{extract_cone, Circuit, Cone, GateId, GateKind};
use crate::oracle::{Logic3, Pattern};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Machine {
    Good,
    Faulty,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfInstance {
    pub num_vars: u32,
    pub clauses: Vec<Vec<i32>>,
    pub comments: Vec<String>,
    good: Vec<u32>,
    faulty: Vec<u32>,
}

impl CnfInstance {
    pub fn empty() -> CnfInstance {
        CnfInstance {
            num_vars: 0,
            clauses: Vec::new(),
            comments: Vec::new(),
            good: Vec::new(),
            faulty: Vec::new(),
        }
    }

    /// DIMACS variable of a gate copy, if encoded.
    pub fn var(&self, gate: GateId, copy: Machine) -> Option<u32> {
        let table = match copy {
            Machine::Good => &self.good,
            Machine::Faulty => &self.faulty,
        };
        table.get(gate.index()).copied().filter(|&v| v != 0)
    }

    /// PI projection of a model; PIs outside the encoding are X.
    pub fn pattern(&self, circuit: &Circuit, model: &[bool]) -> Pattern {
        Pattern(
            circuit
                .primary_inputs()
                .iter()
                .map(|&pi| match self.var(pi, Machine::Good) {
                    Some(v) => Logic3::from_bool(model[v as usize - 1]),
                    None => Logic3::X,
                })
                .collect(),
        )
    }

    fn fresh(&mut self) -> i32 {
        self.num_vars += 1;
        self.num_vars as i32
    }
}

fn gate_clauses(inst: &mut CnfInstance, kind: GateKind, out: i32, ins: &[i32]) {
    let cls = &mut inst.clauses;
    match kind {
        GateKind::Input => {}
        GateKind::Buf | GateKind::Output => {
            cls.push(vec![-out, ins[0]]);
            cls.push(vec![out, -ins[0]]);
        }
        GateKind::Not => {
            cls.push(vec![-out, -ins[0]]);
            cls.push(vec![out, ins[0]]);
        }
        GateKind::And | GateKind::Nand => {
            let y = if kind == GateKind::And { out } else { -out };
            for &a in ins {
                cls.push(vec![-y, a]);
            }
            let mut big: Vec<i32> = ins.iter().map(|&a| -a).collect();
            big.push(y);
            cls.push(big);
        }
        GateKind::Or | GateKind::Nor => {
            let y = if kind == GateKind::Or { out } else { -out };
            for &a in ins {
                cls.push(vec![y, -a]);
            }
            let mut big: Vec<i32> = ins.to_vec();
            big.push(-y);
            cls.push(big);
        }
        GateKind::Xor | GateKind::Xnor => {
            let mut acc = ins[0];
            for (i, &b) in ins.iter().enumerate().skip(1) {
                let last = i == ins.len() - 1;
                let t = if last {
                    if kind == GateKind::Xor {
                        out
                    } else {
                        -out
                    }
                } else {
                    inst.fresh()
                };
                let cls = &mut inst.clauses;
                cls.push(vec![-t, acc, b]);
                cls.push(vec![-t, -acc, -b]);
                cls.push(vec![t, -acc, b]);
                cls.push(vec![t, acc, -b]);
                acc = t;
            }
        }
    }
}

/// Satisfiable exactly when the fault is detectable.
pub fn encode(circuit: &Circuit, cone: &Cone, fault: Fault) -> CnfInstance {
    let mut inst = CnfInstance {
        num_vars: 0,
        clauses: Vec::new(),
        comments: vec![format!("fault {}", fault.label(circuit))],
        good: vec![0; circuit.len()],
        faulty: vec![0; circuit.len()],
    };
    let mut order = cone.members().to_vec();
    order.sort_by_key(|&g| (circuit.level(g), g));
    for &g in &order {
        inst.good[g.index()] = inst.fresh() as u32;
    }
    for &g in &order {
        if cone.in_effect_region(g) {
            inst.faulty[g.index()] = inst.fresh() as u32;
        }
    }
    let mut ins = Vec::new();
    for &g in &order {
        let kind = circuit.kind(g);
        if kind == GateKind::Input {
            continue;
        }
        ins.clear();
        ins.extend(circuit.fanin(g).iter().map(|f| inst.good[f.index()] as i32));
        let out = inst.good[g.index()] as i32;
        gate_clauses(&mut inst, kind, out, &ins);
    }
    let site = inst.faulty[fault.site.index()] as i32;
    inst.clauses.push(vec![if fault.polarity.stuck_value() { site } else { -site }]);
    for &g in &order {
        let kind = circuit.kind(g);
        if g == fault.site || !cone.in_effect_region(g) || kind == GateKind::Input {
            continue;
        }
        ins.clear();
        ins.extend(circuit.fanin(g).iter().map(|f| {
            if cone.in_effect_region(*f) {
                inst.faulty[f.index()] as i32
            } else {
                inst.good[f.index()] as i32
            }
        }));
        let out = inst.faulty[g.index()] as i32;
        gate_clauses(&mut inst, kind, out, &ins);
    }
    let mut any = Vec::new();
    for &po in cone.pos() {
        let (gv, fv) = (inst.good[po.index()] as i32, inst.faulty[po.index()] as i32);
        let d = inst.fresh();
        inst.clauses.push(vec![-d, gv, fv]);
        inst.clauses.push(vec![-d, -gv, -fv]);
        any.push(d);
    }
    inst.clauses.push(any);
    let n_good = inst.good.iter().filter(|&&v| v != 0).count();
    let n_faulty = inst.faulty.iter().filter(|&&v| v != 0).count();
    let digest = inst
        .good
        .iter()
        .chain(&inst.faulty)
        .fold(0xcbf2_9ce4_8422_2325u64, |h, &v| (h ^ v as u64).wrapping_mul(0x100_0000_01b3));
    inst.comments.push(format!("vars good={n_good} faulty={n_faulty} map={digest:016x}"));
    inst
}

pub fn write_dimacs(inst: &CnfInstance) -> String {
    let mut out = String::new();
    for c in &inst.comments {
        let _ = writeln!(out, "c {c}");
    }
    let _ = writeln!(out, "p cnf {} {}", inst.num_vars, inst.clauses.len());
    for cl in &inst.clauses {
        for l in cl {
            let _ = write!(out, "{l} ");
        }
        out.push_str("0\n");
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DimacsError {
    #[error("missing problem line")]
    MissingHeader,
    #[error("line {0}: malformed input")]
    Syntax(usize),
    #[error("literal {lit} exceeds declared {vars} variables")]
    Range { lit: i32, vars: u32 },
    #[error("header declares {declared} clauses, found {found}")]
    Count { declared: usize, found: usize },
}

pub fn parse_dimacs(text: &str) -> Result<(u32, Vec<Vec<i32>>), DimacsError> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 3 || parts[0] != "cnf" {
                return Err(DimacsError::Syntax(idx + 1));
            }
            let v = parts[1].parse().map_err(|_| DimacsError::Syntax(idx + 1))?;
            let c = parts[2].parse().map_err(|_| DimacsError::Syntax(idx + 1))?;
            header = Some((v, c));
            continue;
        }
        let (vars, _) = header.ok_or(DimacsError::MissingHeader)?;
        for tok in line.split_whitespace() {
            let lit: i32 = tok.parse().map_err(|_| DimacsError::Syntax(idx + 1))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() > vars {
                return Err(DimacsError::Range { lit, vars });
            } else {
                current.push(lit);
            }
        }
    }
    let (vars, declared) = header.ok_or(DimacsError::MissingHeader)?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != declared {
        return Err(DimacsError::Count {
            declared,
            found: clauses.len(),
        });
    }
    Ok((vars, clauses))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub fault: Fault,
    pub t_generate_us: f64,
    pub t_solve_us: f64,
    pub t_cdsl_us: f64,
    pub sat: bool,
    pub engine: Status,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    xs[xs.len() / 2]
}

fn micros_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e6
}

/// Median-of-`repeats` wall clock for encoding plus DIMACS text, solving
/// with the internal solver, and the engine. Faults without a PO path are
/// skipped.
pub fn timed_compare(circuit: &Circuit, faults: &[Fault], config: &EngineConfig, repeats: usize) -> Vec<TimingRow> {
    let repeats = repeats.max(1);
    let mut rows = Vec::new();
    for &fault in faults {
        let Ok(cone) = extract_cone(circuit, fault.site) else {
            continue;
        };
        let mut gen = Vec::with_capacity(repeats);
        let mut sol = Vec::with_capacity(repeats);
        let mut eng = Vec::with_capacity(repeats);
        let mut sat = false;
        let mut engine = Status::Aborted;
        for _ in 0..repeats {
            let t = Instant::now();
            let inst = encode(circuit, &cone, fault);
            let text = write_dimacs(&inst);
            gen.push(micros_since(t));
            std::hint::black_box(text.len());

            let t = Instant::now();
            let result = solve(inst.num_vars as usize, &inst.clauses);
            sol.push(micros_since(t));
            sat = result.is_sat();

            let t = Instant::now();
            engine = run_fault(circuit, &cone, fault, config).status;
            eng.push(micros_since(t));
        }
        rows.push(TimingRow {
            fault,
            t_generate_us: median(gen),
            t_solve_us: median(sol),
            t_cdsl_us: median(eng),
            sat,
            engine,
        });
    }
    rows
}

pub fn write_timing_csv(circuit: &Circuit, rows: &[TimingRow]) -> String {
    let mut out = String::from("fault,t_generate_us,t_solve_us,t_cdsl_us\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.3},{:.3},{:.3}",
            r.fault.label(circuit),
            r.t_generate_us,
            r.t_solve_us,
            r.t_cdsl_us
        );
    }
    out
}
