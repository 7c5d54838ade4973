// SPDX-License-Identifier: Apache-2.0

//! Gate-level netlists: the immutable circuit graph every other module works on.
//!
//! A [`Circuit`] is built either by [`parse_bench`] from ISCAS `.bench` text or
//! programmatically through [`CircuitBuilder`]. Both paths run the same
//! validation (arity, undefined references, combinational loops) and produce a
//! levelized graph with dense gate ids assigned in declaration order.
//!
//! Primary outputs are modelled as dedicated `OUTPUT` pseudo-gates with a
//! single fanin. They carry the observed value but are not nets of their own,
//! so they never appear in a fault list.

mod bench;
mod cone;

use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

pub use bench::{parse_bench, write_bench};
pub use cone::{extract_cone, Cone};

/// Dense index of a gate inside its [`Circuit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GateId(u32);

impl GateId {
    pub fn new(index: usize) -> GateId {
        GateId(u32::try_from(index).expect("gate index exceeds u32"))
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for GateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    Input,
    Output,
    And,
    Nand,
    Or,
    Nor,
    Not,
    Buf,
    Xor,
    Xnor,
}

impl GateKind {
    pub const LOGIC: [GateKind; 8] = [
        GateKind::And,
        GateKind::Nand,
        GateKind::Or,
        GateKind::Nor,
        GateKind::Not,
        GateKind::Buf,
        GateKind::Xor,
        GateKind::Xnor,
    ];

    /// Keyword used in `.bench` files.
    pub fn keyword(self) -> &'static str {
        match self {
            GateKind::Input => "INPUT",
            GateKind::Output => "OUTPUT",
            GateKind::And => "AND",
            GateKind::Nand => "NAND",
            GateKind::Or => "OR",
            GateKind::Nor => "NOR",
            GateKind::Not => "NOT",
            GateKind::Buf => "BUF",
            GateKind::Xor => "XOR",
            GateKind::Xnor => "XNOR",
        }
    }

    /// Parses a logic-gate keyword. `INPUT`/`OUTPUT` are declarations, not
    /// gate functions, and are rejected here.
    pub fn from_keyword(word: &str) -> Option<GateKind> {
        let kind = match word.to_ascii_uppercase().as_str() {
            "AND" => GateKind::And,
            "NAND" => GateKind::Nand,
            "OR" => GateKind::Or,
            "NOR" => GateKind::Nor,
            "NOT" | "INV" => GateKind::Not,
            "BUF" | "BUFF" => GateKind::Buf,
            "XOR" => GateKind::Xor,
            "XNOR" => GateKind::Xnor,
            _ => return None,
        };
        Some(kind)
    }

    pub fn arity_ok(self, n: usize) -> bool {
        match self {
            GateKind::Input => n == 0,
            GateKind::Output | GateKind::Not | GateKind::Buf => n == 1,
            _ => n >= 2,
        }
    }

    /// True when the gate complements the underlying AND/OR/XOR/BUF function.
    pub fn is_inverting(self) -> bool {
        matches!(self, GateKind::Nand | GateKind::Nor | GateKind::Not | GateKind::Xnor)
    }

    /// The input value that alone determines the output, if any.
    pub fn controlling_value(self) -> Option<bool> {
        match self {
            GateKind::And | GateKind::Nand => Some(false),
            GateKind::Or | GateKind::Nor => Some(true),
            _ => None,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub id: GateId,
    pub kind: GateKind,
    pub fanin: Vec<GateId>,
    pub fanout: Vec<GateId>,
    /// Net name from the source file. `OUTPUT` pseudo-gates carry the name of
    /// the net they observe.
    pub name: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetlistError {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("combinational loop through gate '{gate}'")]
    Cycle { gate: String },
    #[error("line {line}: {kind} gate '{gate}' cannot take {got} input(s)")]
    Arity {
        line: usize,
        gate: String,
        kind: GateKind,
        got: usize,
    },
    #[error("line {line}: reference to undeclared net '{name}'")]
    UndefinedNet { line: usize, name: String },
    #[error("fault site '{gate}' reaches no primary output")]
    UnreachableFault { gate: String },
}

/// Immutable, levelized combinational circuit.
#[derive(Debug, Clone)]
pub struct Circuit {
    gates: Vec<Gate>,
    inputs: Vec<GateId>,
    outputs: Vec<GateId>,
    levels: Vec<u32>,
    order: Vec<GateId>,
    names: HashMap<String, GateId>,
}

impl Circuit {
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    #[inline]
    pub fn gate(&self, id: GateId) -> &Gate {
        &self.gates[id.index()]
    }

    #[inline]
    pub fn kind(&self, id: GateId) -> GateKind {
        self.gates[id.index()].kind
    }

    #[inline]
    pub fn fanin(&self, id: GateId) -> &[GateId] {
        &self.gates[id.index()].fanin
    }

    #[inline]
    pub fn fanout(&self, id: GateId) -> &[GateId] {
        &self.gates[id.index()].fanout
    }

    pub fn name(&self, id: GateId) -> &str {
        &self.gates[id.index()].name
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn primary_inputs(&self) -> &[GateId] {
        &self.inputs
    }

    /// The `OUTPUT` pseudo-gates, in declaration order.
    pub fn primary_outputs(&self) -> &[GateId] {
        &self.outputs
    }

    #[inline]
    pub fn level(&self, id: GateId) -> u32 {
        self.levels[id.index()]
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn max_level(&self) -> u32 {
        self.levels.iter().copied().max().unwrap_or(0)
    }

    /// Gates sorted by (level, id); a valid forward-evaluation order.
    pub fn topo_order(&self) -> &[GateId] {
        &self.order
    }

    /// Looks up a net by name. `OUTPUT` pseudo-gates are not nets and are
    /// never returned.
    pub fn find(&self, name: &str) -> Option<GateId> {
        self.names.get(name).copied()
    }

    /// Gates that carry a net of their own (everything except `OUTPUT`
    /// pseudo-gates), in id order.
    pub fn nets(&self) -> impl Iterator<Item = GateId> + '_ {
        self.gates
            .iter()
            .filter(|g| g.kind != GateKind::Output)
            .map(|g| g.id)
    }

    /// Position of `id` in the primary-input list.
    pub fn input_position(&self, id: GateId) -> Option<usize> {
        self.inputs.iter().position(|&pi| pi == id)
    }

    fn from_parts(gates: Vec<Gate>, lines: &[usize]) -> Result<Circuit, NetlistError> {
        let mut gates = gates;
        for gate in &gates {
            if !gate.kind.arity_ok(gate.fanin.len()) {
                return Err(NetlistError::Arity {
                    line: lines.get(gate.id.index()).copied().unwrap_or(0),
                    gate: gate.name.clone(),
                    kind: gate.kind,
                    got: gate.fanin.len(),
                });
            }
        }
        let mut fanout: Vec<Vec<GateId>> = vec![Vec::new(); gates.len()];
        for gate in &gates {
            for &src in &gate.fanin {
                let list = &mut fanout[src.index()];
                if list.last() != Some(&gate.id) {
                    list.push(gate.id);
                }
            }
        }
        for (gate, fo) in gates.iter_mut().zip(fanout) {
            gate.fanout = fo;
        }
        let levels = compute_levels(&gates)?;
        let mut order: Vec<GateId> = gates.iter().map(|g| g.id).collect();
        order.sort_by_key(|&id| (levels[id.index()], id));
        let inputs = gates
            .iter()
            .filter(|g| g.kind == GateKind::Input)
            .map(|g| g.id)
            .collect();
        let outputs = gates
            .iter()
            .filter(|g| g.kind == GateKind::Output)
            .map(|g| g.id)
            .collect();
        let names = gates
            .iter()
            .filter(|g| g.kind != GateKind::Output)
            .map(|g| (g.name.clone(), g.id))
            .collect();
        Ok(Circuit {
            gates,
            inputs,
            outputs,
            levels,
            order,
            names,
        })
    }
}

/// Recomputes the topological depth of every gate (primary inputs at 0).
pub fn levelize(circuit: &Circuit) -> Result<Vec<u32>, NetlistError> {
    compute_levels(&circuit.gates)
}

fn compute_levels(gates: &[Gate]) -> Result<Vec<u32>, NetlistError> {
    let n = gates.len();
    let mut pending: Vec<usize> = gates.iter().map(|g| g.fanin.len()).collect();
    let mut levels = vec![0u32; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| pending[i] == 0).collect();
    let mut done = 0;
    while let Some(i) = queue.pop_front() {
        done += 1;
        let gate = &gates[i];
        if !gate.fanin.is_empty() {
            levels[i] = 1 + gate
                .fanin
                .iter()
                .map(|f| levels[f.index()])
                .max()
                .unwrap_or(0);
        }
        for &h in &gate.fanout {
            // fanout is deduplicated, fanin may repeat a driver
            let edges = gates[h.index()].fanin.iter().filter(|&&f| f.index() == i).count();
            pending[h.index()] -= edges;
            if pending[h.index()] == 0 {
                queue.push_back(h.index());
            }
        }
    }
    if done < n {
        let stuck = (0..n).find(|&i| pending[i] > 0).expect("unfinished gate");
        return Err(NetlistError::Cycle {
            gate: gates[stuck].name.clone(),
        });
    }
    Ok(levels)
}

/// Incremental construction of a [`Circuit`] from code.
///
/// ```
/// use cdsl::netlist::{CircuitBuilder, GateKind};
/// let mut b = CircuitBuilder::new();
/// let a = b.input("a");
/// let c = b.input("b");
/// let y = b.gate("y", GateKind::And, &[a, c]);
/// b.output(y);
/// let circuit = b.finish().unwrap();
/// assert_eq!(circuit.primary_inputs().len(), 2);
/// ```
#[derive(Debug, Default)]
pub struct CircuitBuilder {
    gates: Vec<Gate>,
}

impl CircuitBuilder {
    pub fn new() -> CircuitBuilder {
        CircuitBuilder::default()
    }

    fn push(&mut self, name: &str, kind: GateKind, fanin: &[GateId]) -> GateId {
        let id = GateId::new(self.gates.len());
        self.gates.push(Gate {
            id,
            kind,
            fanin: fanin.to_vec(),
            fanout: Vec::new(),
            name: name.to_string(),
        });
        id
    }

    pub fn input(&mut self, name: &str) -> GateId {
        self.push(name, GateKind::Input, &[])
    }

    pub fn gate(&mut self, name: &str, kind: GateKind, fanin: &[GateId]) -> GateId {
        assert!(
            kind != GateKind::Input && kind != GateKind::Output,
            "use input()/output() for declarations"
        );
        self.push(name, kind, fanin)
    }

    /// Marks `net` as observable at a primary output.
    pub fn output(&mut self, net: GateId) -> GateId {
        let name = self.gates[net.index()].name.clone();
        self.push(&name, GateKind::Output, &[net])
    }

    pub fn finish(self) -> Result<Circuit, NetlistError> {
        let mut seen = HashMap::new();
        for g in self.gates.iter().filter(|g| g.kind != GateKind::Output) {
            if seen.insert(g.name.clone(), g.id).is_some() {
                return Err(NetlistError::Syntax {
                    line: 0,
                    message: format!("net '{}' defined twice", g.name),
                });
            }
        }
        Circuit::from_parts(self.gates, &[])
    }
}
