// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeSet, VecDeque};

use super::graph::{Conflict, ImplicationGraph, NodeId, Reason};
use super::{fault_seed, EngineConfig, LearnMode, SearchOutcome};
use crate::diagnosis::PiConstraint;
use crate::fault::{AtpgResult, Fault, Stats, Status};
use crate::learning::{
    analyze_decision_based, analyze_uip_with, backjump_level, refutation, unit_imply_with, ClauseDb,
    ConstraintKind, LearntConstraint, VsidsState,
};
use crate::logic5::{eval_iter, eval_tri, Tri, Value5};
use crate::netlist::{Circuit, Cone, GateId, GateKind};
use crate::oracle::{Logic3, Pattern};

const UNASSIGNED: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Objective {
    Justify(GateId),
    Propagate(GateId),
}

enum Progress {
    Success,
    Blocked(Conflict),
    Open,
}

enum Resolution {
    Continue,
    Done(Status),
}

/// Search state for one fault.
pub struct SearchState<'a> {
    circuit: &'a Circuit,
    cone: &'a Cone,
    fault: Fault,
    config: &'a EngineConfig,
    values: Vec<Value5>,
    node_of: Vec<u32>,
    trail: ImplicationGraph,
    d_frontier: BTreeSet<GateId>,
    j_frontier: BTreeSet<GateId>,
    queue: VecDeque<GateId>,
    queued: Vec<bool>,
    db: ClauseDb,
    vsids: VsidsState,
    learnt: Vec<LearntConstraint>,
    activation: NodeId,
    xpath: Vec<u32>,
    xpath_stamp: u32,
    stats: Stats,
    asserting_checks: u64,
}

impl<'a> SearchState<'a> {
    pub fn new(circuit: &'a Circuit, cone: &'a Cone, fault: Fault, config: &'a EngineConfig) -> SearchState<'a> {
        let n = circuit.len();
        SearchState {
            circuit,
            cone,
            fault,
            config,
            values: vec![Value5::X; n],
            node_of: vec![UNASSIGNED; n],
            trail: ImplicationGraph::new(),
            d_frontier: BTreeSet::new(),
            j_frontier: BTreeSet::new(),
            queue: VecDeque::new(),
            queued: vec![false; n],
            db: ClauseDb::new(config.forget_n),
            vsids: VsidsState::new(
                n,
                config.vsids.decay,
                config.vsids.pick_probability,
                fault_seed(config.rng_seed, fault),
            ),
            learnt: Vec::new(),
            activation: 0,
            xpath: vec![0; n],
            xpath_stamp: 0,
            stats: Stats::default(),
            asserting_checks: 0,
        }
    }

    pub fn values(&self) -> &[Value5] {
        &self.values
    }

    pub fn trail(&self) -> &ImplicationGraph {
        &self.trail
    }

    pub fn d_frontier(&self) -> &BTreeSet<GateId> {
        &self.d_frontier
    }

    pub fn j_frontier(&self) -> &BTreeSet<GateId> {
        &self.j_frontier
    }

    pub fn db(&self) -> &ClauseDb {
        &self.db
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn value(&self, g: GateId) -> Value5 {
        self.values[g.index()]
    }

    fn node(&self, g: GateId) -> NodeId {
        let n = self.node_of[g.index()];
        debug_assert!(n != UNASSIGNED, "gate {g} has no assignment");
        n as NodeId
    }

    /// Gates that can only ever carry 0 or 1.
    fn binary_domain(&self, g: GateId) -> bool {
        !self.cone.in_effect_region(g)
    }

    pub(super) fn finish(self, status: Status) -> SearchOutcome {
        let mut stats = self.stats;
        stats.learnt_count = self
            .learnt
            .iter()
            .filter(|c| c.kind != ConstraintKind::Refutation)
            .count() as u64;
        SearchOutcome {
            result: AtpgResult {
                fault: self.fault,
                status,
                stats,
            },
            db: self.db,
            learnt: self.learnt,
            final_values: self.values,
            asserting_checks: self.asserting_checks,
        }
    }

    // ---- assignment bookkeeping ----

    fn record(&mut self, g: GateId, value: Value5, id: NodeId) {
        self.values[g.index()] = value;
        self.node_of[g.index()] = id as u32;
        self.enqueue(g);
        let circuit = self.circuit;
        for &h in circuit.fanout(g) {
            self.enqueue(h);
        }
        self.refresh(g);
        for &h in circuit.fanout(g) {
            self.refresh(h);
        }
    }

    fn assign_root(&mut self, g: GateId, value: Value5, reason: Reason) -> NodeId {
        let id = self.trail.push_root(g, value, reason);
        self.record(g, value, id);
        id
    }

    fn assign_decision(&mut self, g: GateId, value: Value5) -> NodeId {
        let id = self.trail.push_decision(g, value);
        self.record(g, value, id);
        id
    }

    fn assign_implied(&mut self, g: GateId, value: Value5, mut antecedents: Vec<NodeId>) -> NodeId {
        antecedents.sort_unstable();
        antecedents.dedup();
        let id = self.trail.push_implied(g, value, antecedents);
        self.record(g, value, id);
        id
    }

    fn enqueue(&mut self, g: GateId) {
        if self.cone.contains(g) && !self.queued[g.index()] {
            self.queued[g.index()] = true;
            self.queue.push_back(g);
        }
    }

    fn clear_queue(&mut self) {
        for g in self.queue.drain(..) {
            self.queued[g.index()] = false;
        }
    }

    fn pop_to_level(&mut self, level: u32) {
        let popped = self.trail.pop_to_level(level);
        for a in &popped {
            self.values[a.gate.index()] = Value5::X;
            self.node_of[a.gate.index()] = UNASSIGNED;
        }
        let circuit = self.circuit;
        for a in &popped {
            self.refresh(a.gate);
            for &h in circuit.fanout(a.gate) {
                self.refresh(h);
            }
        }
        self.clear_queue();
    }

    // ---- frontiers ----

    fn inputs_eval(&self, g: GateId) -> Value5 {
        let kind = self.circuit.kind(g);
        let ins = self.circuit.fanin(g).iter().map(|f| self.values[f.index()]);
        if g == self.fault.site {
            let good = eval_tri(kind, ins.map(Value5::good));
            Value5::from_pair(good, Tri::from_bool(self.fault.polarity.stuck_value()))
        } else {
            eval_iter(kind, ins)
        }
    }

    fn unjustified(&self, g: GateId) -> bool {
        if self.circuit.kind(g) == GateKind::Input || !self.values[g.index()].is_known() {
            return false;
        }
        if g == self.fault.site {
            let kind = self.circuit.kind(g);
            eval_tri(kind, self.circuit.fanin(g).iter().map(|f| self.values[f.index()].good())) == Tri::X
        } else {
            self.inputs_eval(g) == Value5::X
        }
    }

    fn on_d_frontier(&self, g: GateId) -> bool {
        self.values[g.index()] == Value5::X
            && self
                .circuit
                .fanin(g)
                .iter()
                .any(|f| self.values[f.index()].is_fault_effect())
    }

    fn refresh(&mut self, g: GateId) {
        if !self.cone.contains(g) {
            return;
        }
        if self.unjustified(g) {
            self.j_frontier.insert(g);
        } else {
            self.j_frontier.remove(&g);
        }
        if self.on_d_frontier(g) {
            self.d_frontier.insert(g);
        } else {
            self.d_frontier.remove(&g);
        }
    }

    /// Frontiers rebuilt from the value map.
    pub fn recompute_frontiers(&self) -> (BTreeSet<GateId>, BTreeSet<GateId>) {
        let mut d = BTreeSet::new();
        let mut j = BTreeSet::new();
        for &g in self.cone.members() {
            if self.on_d_frontier(g) {
                d.insert(g);
            }
            if self.unjustified(g) {
                j.insert(g);
            }
        }
        (d, j)
    }

    pub fn check_invariants(&self) {
        if let Err(e) = self.trail.check() {
            panic!("trail invariant violated: {e}");
        }
        let (d, j) = self.recompute_frontiers();
        assert_eq!(d, self.d_frontier, "d-frontier out of sync");
        assert_eq!(j, self.j_frontier, "j-frontier out of sync");
        for (id, a) in self.trail.nodes().iter().enumerate() {
            assert_eq!(self.node_of[a.gate.index()] as usize, id);
            assert_eq!(self.values[a.gate.index()], a.value);
            assert!(self.cone.contains(a.gate), "assignment outside the cone");
        }
        let assigned = self.values.iter().filter(|v| **v != Value5::X).count();
        assert_eq!(assigned, self.trail.len());
    }

    // ---- implication ----

    fn expand(&self, id: NodeId) -> Vec<NodeId> {
        match &self.trail.node(id).reason {
            Reason::Implied(ants) => ants.clone(),
            _ => vec![id],
        }
    }

    fn known_inputs(&self, g: GateId) -> Vec<NodeId> {
        self.circuit
            .fanin(g)
            .iter()
            .filter(|f| self.values[f.index()] != Value5::X)
            .map(|&f| self.node(f))
            .collect()
    }

    fn forward_antecedents(&self, g: GateId) -> Vec<NodeId> {
        let kind = self.circuit.kind(g);
        if let Some(c) = kind.controlling_value() {
            let cv = Value5::from_bool(c);
            let best = self
                .circuit
                .fanin(g)
                .iter()
                .filter(|f| self.values[f.index()] == cv)
                .map(|&f| self.node(f))
                .min_by_key(|&n| (self.trail.node(n).level, n));
            if let Some(n) = best {
                return vec![n];
            }
        }
        self.known_inputs(g)
    }

    fn examine(&mut self, g: GateId) -> Result<(), Conflict> {
        let kind = self.circuit.kind(g);
        if kind == GateKind::Input {
            return Ok(());
        }
        let value = self.values[g.index()];
        let fwd = self.inputs_eval(g);
        if fwd.is_known() {
            if value == Value5::X {
                let ants = self.forward_antecedents(g);
                self.assign_implied(g, fwd, ants);
                return Ok(());
            }
            if value != fwd {
                let mut nodes = self.forward_antecedents(g);
                nodes.extend(self.expand(self.node(g)));
                return Err(self.conflict(Some(g), nodes));
            }
        }
        if value.is_known() {
            self.backward(g, value)?;
        }
        Ok(())
    }

    fn conflict(&self, gate: Option<GateId>, mut nodes: Vec<NodeId>) -> Conflict {
        nodes.sort_unstable();
        nodes.dedup();
        Conflict { gate, nodes }
    }

    /// Input values forced by an assigned output.
    fn backward(&mut self, g: GateId, value: Value5) -> Result<(), Conflict> {
        let circuit = self.circuit;
        let kind = circuit.kind(g);
        let fanin = circuit.fanin(g);
        let ins: Vec<Value5> = fanin.iter().map(|f| self.values[f.index()]).collect();
        if !ins.contains(&Value5::X) {
            return Ok(());
        }
        let comps: &[usize] = if g == self.fault.site { &[0] } else { &[0, 1] };
        let comp = |v: Value5, c: usize| if c == 0 { v.good() } else { v.faulty() }.as_bool();
        let mut req = vec![[None::<bool>; 2]; ins.len()];
        let mut clash = false;
        for &c in comps {
            let out = comp(value, c).expect("assigned value has known components");
            let base = out ^ kind.is_inverting();
            match kind {
                GateKind::And | GateKind::Nand | GateKind::Or | GateKind::Nor => {
                    let ctrl = kind.controlling_value().expect("and/or family");
                    if base != ctrl {
                        for (i, &v) in ins.iter().enumerate() {
                            match comp(v, c) {
                                None => req[i][c] = Some(!ctrl),
                                Some(b) if b == ctrl => clash = true,
                                _ => {}
                            }
                        }
                    } else {
                        let mut open = ins.iter().enumerate().filter(|(_, &v)| comp(v, c) != Some(!ctrl));
                        match (open.next(), open.next()) {
                            (Some((i, &v)), None) if v == Value5::X => req[i][c] = Some(ctrl),
                            (None, _) => clash = true,
                            _ => {}
                        }
                    }
                }
                GateKind::Xor | GateKind::Xnor => {
                    let mut xs = ins.iter().enumerate().filter(|(_, &v)| v == Value5::X);
                    if let (Some((i, _)), None) = (xs.next(), xs.next()) {
                        let parity = ins
                            .iter()
                            .filter_map(|&v| comp(v, c))
                            .fold(false, |a, b| a ^ b);
                        req[i][c] = Some(base ^ parity);
                    }
                }
                GateKind::Buf | GateKind::Not | GateKind::Output => {
                    req[0][c] = Some(base);
                }
                GateKind::Input => {}
            }
        }
        let mut ants = self.known_inputs(g);
        ants.push(self.node(g));
        if clash {
            return Err(self.conflict(Some(g), ants));
        }
        let mut implied: Vec<(GateId, Value5)> = Vec::new();
        for (i, r) in req.iter().enumerate() {
            if ins[i] != Value5::X {
                continue;
            }
            let f = fanin[i];
            let v = if self.binary_domain(f) {
                match (r[0], r[1]) {
                    (Some(a), Some(b)) if a != b => return Err(self.conflict(Some(g), ants)),
                    (Some(a), _) | (None, Some(a)) => Value5::from_bool(a),
                    (None, None) => continue,
                }
            } else {
                match (r[0], r[1]) {
                    (Some(a), Some(b)) => Value5::from_bits(a, b),
                    _ => continue,
                }
            };
            match implied.iter().find(|(h, _)| *h == f) {
                Some(&(_, prev)) if prev != v => return Err(self.conflict(Some(g), ants)),
                Some(_) => {}
                None => implied.push((f, v)),
            }
        }
        for (f, v) in implied {
            self.assign_implied(f, v, ants.clone());
        }
        Ok(())
    }

    /// Structural and learnt-constraint implications to a fixpoint.
    pub fn propagate(&mut self) -> Result<(), Conflict> {
        loop {
            while let Some(g) = self.queue.pop_front() {
                self.queued[g.index()] = false;
                if let Err(c) = self.examine(g) {
                    self.clear_queue();
                    return Err(c);
                }
            }
            if !self.config.learning_enabled || self.db.is_empty() {
                return Ok(());
            }
            let cone = self.cone;
            let outcome = unit_imply_with(&mut self.db, &self.values, |g| !cone.in_effect_region(g));
            match outcome {
                Err(v) => {
                    let nodes = self.db.constraints()[v.index]
                        .gates()
                        .map(|g| self.node(g))
                        .collect();
                    return Err(self.conflict(None, nodes));
                }
                Ok(forced) => {
                    let Some(f) = forced.into_iter().find(|f| self.values[f.gate.index()] == Value5::X) else {
                        return Ok(());
                    };
                    let mut ants: Vec<NodeId> = f.antecedents.iter().map(|&g| self.node(g)).collect();
                    if ants.is_empty() {
                        ants.push(self.activation);
                    }
                    self.assign_implied(f.gate, f.value, ants);
                }
            }
        }
    }

    // ---- goal tests ----

    fn mark_xpaths(&mut self) {
        self.xpath_stamp += 1;
        let stamp = self.xpath_stamp;
        let open = |v: Value5| v == Value5::X || v.is_fault_effect();
        let mut stack: Vec<GateId> = Vec::new();
        for &po in self.cone.pos() {
            if open(self.values[po.index()]) {
                self.xpath[po.index()] = stamp;
                stack.push(po);
            }
        }
        while let Some(g) = stack.pop() {
            for &f in self.circuit.fanin(g) {
                if self.cone.in_effect_region(f) && self.xpath[f.index()] != stamp && open(self.values[f.index()]) {
                    self.xpath[f.index()] = stamp;
                    stack.push(f);
                }
            }
        }
    }

    fn has_xpath(&self, g: GateId) -> bool {
        self.xpath[g.index()] == self.xpath_stamp
    }

    /// Assignments that cut every path from the site to a PO.
    fn blocking_nodes(&self) -> Vec<NodeId> {
        let open = |v: Value5| v == Value5::X || v.is_fault_effect();
        let n = self.circuit.len();
        let mut seen = vec![false; n];
        let mut stack = vec![self.fault.site];
        seen[self.fault.site.index()] = true;
        let mut nodes = Vec::new();
        while let Some(g) = stack.pop() {
            for &h in self.circuit.fanout(g) {
                if !self.cone.contains(h) || seen[h.index()] {
                    continue;
                }
                seen[h.index()] = true;
                if open(self.values[h.index()]) {
                    stack.push(h);
                } else {
                    nodes.push(self.node(h));
                }
            }
        }
        nodes
    }

    fn progress(&mut self) -> Progress {
        let at_po = self
            .cone
            .pos()
            .iter()
            .any(|p| self.values[p.index()].is_fault_effect());
        if at_po {
            return if self.j_frontier.is_empty() {
                Progress::Success
            } else {
                Progress::Open
            };
        }
        self.mark_xpaths();
        if !self.has_xpath(self.fault.site) {
            let mut nodes = self.blocking_nodes();
            if nodes.is_empty() {
                nodes.push(self.activation);
            }
            return Progress::Blocked(self.conflict(None, nodes));
        }
        Progress::Open
    }

    // ---- decisions ----

    /// X input to pursue and the good value wanted on it.
    fn choose_input(&self, g: GateId, out_good: bool, justify: bool) -> (GateId, bool) {
        let kind = self.circuit.kind(g);
        let fanin = self.circuit.fanin(g);
        let xs = || fanin.iter().copied().filter(|f| self.values[f.index()] == Value5::X);
        let lowest = || xs().min_by_key(|&f| self.circuit.level(f)).expect("objective has an X input");
        let highest = || {
            xs().fold(None, |best: Option<GateId>, f| match best {
                Some(b) if self.circuit.level(b) >= self.circuit.level(f) => Some(b),
                _ => Some(f),
            })
            .expect("objective has an X input")
        };
        let base = out_good ^ kind.is_inverting();
        match kind {
            GateKind::Buf | GateKind::Output | GateKind::Not => (fanin[0], base),
            GateKind::And | GateKind::Nand | GateKind::Or | GateKind::Nor => {
                let ctrl = kind.controlling_value().expect("and/or family");
                if justify && base == ctrl {
                    (lowest(), ctrl)
                } else {
                    (highest(), !ctrl)
                }
            }
            GateKind::Xor | GateKind::Xnor => {
                let f = lowest();
                if justify && xs().count() == 1 {
                    let parity = fanin
                        .iter()
                        .filter_map(|h| self.values[h.index()].good().as_bool())
                        .fold(false, |a, b| a ^ b);
                    (f, base ^ parity)
                } else {
                    (f, false)
                }
            }
            GateKind::Input => unreachable!("inputs are never objectives"),
        }
    }

    fn backtrace(&self, objective: Objective) -> (GateId, Value5) {
        let (mut g, mut want) = match objective {
            Objective::Justify(o) => {
                let good = self.values[o.index()].good().as_bool().expect("justified gate is assigned");
                self.choose_input(o, good, true)
            }
            Objective::Propagate(o) => self.choose_input(o, false, false),
        };
        while !self.binary_domain(g) || (!self.config.line_decisions && self.circuit.kind(g) != GateKind::Input) {
            (g, want) = self.choose_input(g, want, true);
        }
        (g, Value5::from_bool(want))
    }

    fn objectives(&self) -> Vec<Objective> {
        if !self.j_frontier.is_empty() {
            self.j_frontier.iter().map(|&g| Objective::Justify(g)).collect()
        } else {
            self.d_frontier
                .iter()
                .filter(|&&g| self.has_xpath(g))
                .map(|&g| Objective::Propagate(g))
                .collect()
        }
    }

    /// Picks the next decision, or `None` when no objective remains.
    pub fn decide(&mut self) -> Option<(GateId, Value5)> {
        let objectives = self.objectives();
        let first = *objectives.first()?;
        let mut choice = self.backtrace(first);
        if self.config.learning_enabled && self.vsids.roll() {
            let mut cands: Vec<(GateId, Value5)> = Vec::new();
            for &o in &objectives {
                let c = self.backtrace(o);
                if !cands.iter().any(|(g, _)| *g == c.0) {
                    cands.push(c);
                }
            }
            let gates: Vec<GateId> = cands.iter().map(|c| c.0).collect();
            if let Some(best) = self.vsids.best(&gates) {
                choice = *cands.iter().find(|c| c.0 == best).expect("candidate present");
            }
        }
        Some(choice)
    }

    // ---- conflicts ----

    /// Undoes the latest decision and asserts its opposite value.
    pub fn backtrack_chrono(&mut self) -> bool {
        let level = self.trail.decision_level();
        if level == 0 {
            return false;
        }
        let d = self.trail.node(self.trail.level_start(level)).clone();
        self.pop_to_level(level - 1);
        let mut ants: Vec<NodeId> = self.trail.decisions().collect();
        if ants.is_empty() {
            ants.push(self.activation);
        }
        self.assign_implied(d.gate, d.value.invert(), ants);
        self.stats.backtracks += 1;
        true
    }

    fn record_refutation(&mut self, conflict: &Conflict) {
        if !self.config.learning_enabled {
            return;
        }
        let r = refutation(&self.trail, conflict);
        self.db.start_loop();
        self.db.add(r.clone());
        self.learnt.push(r);
    }

    fn resolve(&mut self, conflict: Conflict) -> Resolution {
        self.stats.conflicts += 1;
        if !self.config.learning_enabled {
            if self.trail.decision_level() == 0 {
                return Resolution::Done(Status::Untestable);
            }
            if self.stats.backtracks >= self.config.backtrack_limit {
                return Resolution::Done(Status::Aborted);
            }
            self.backtrack_chrono();
            return Resolution::Continue;
        }
        let level = conflict
            .nodes
            .iter()
            .map(|&n| self.trail.node(n).level)
            .max()
            .unwrap_or(0);
        if level == 0 {
            self.record_refutation(&conflict);
            return Resolution::Done(Status::Untestable);
        }
        if self.stats.backtracks >= self.config.backtrack_limit {
            return Resolution::Done(Status::Aborted);
        }
        self.db.start_loop();
        let cone = self.cone;
        let uip = analyze_uip_with(&self.trail, &conflict, |a| {
            !cone.in_effect_region(a.gate) && a.value.as_bool().is_some()
        })
        .expect("every conflict level holds an assertable decision");
        if self.config.learn_mode == LearnMode::Both {
            if let Ok(dec) = analyze_decision_based(&self.trail) {
                self.db.add(dec.clone());
                self.learnt.push(dec);
            }
        }
        self.vsids.bump_and_decay(&uip);
        self.db.forget_pass();
        let target = backjump_level(&uip);
        let uip_gate = uip.uip.expect("uip constraint names its uip");
        self.db.add(uip.clone());
        self.pop_to_level(target);

        let mut ants = Vec::new();
        let mut flip = None;
        for lit in &uip.literals {
            let v = self.values[lit.gate.index()];
            if lit.gate == uip_gate {
                assert_eq!(v, Value5::X, "uip still assigned after backjump");
                flip = lit.value.as_bool().map(|b| Value5::from_bool(!b));
            } else {
                assert_eq!(v, lit.value, "learnt constraint not unit after backjump");
                ants.push(self.node(lit.gate));
            }
        }
        self.asserting_checks += 1;
        if ants.is_empty() {
            ants.push(self.activation);
        }
        let flip = flip.expect("uip literal is binary");
        self.assign_implied(uip_gate, flip, ants);
        self.learnt.push(uip);
        self.stats.backtracks += 1;
        Resolution::Continue
    }

    // ---- driver ----

    fn initialize(&mut self, constraints: &[PiConstraint]) -> Result<(), Conflict> {
        let site = self.fault.site;
        self.activation = self.assign_root(site, self.fault.activation_value(), Reason::FaultActivation);
        let mut sorted: Vec<PiConstraint> = constraints.to_vec();
        sorted.sort_by_key(|c| c.pi);
        for c in sorted {
            if !self.cone.contains(c.pi) {
                continue;
            }
            if c.pi == site {
                if c.value == self.fault.polarity.stuck_value() {
                    return Err(Conflict {
                        gate: Some(site),
                        nodes: vec![self.activation],
                    });
                }
                continue;
            }
            self.assign_root(c.pi, Value5::from_bool(c.value), Reason::Constraint);
        }
        Ok(())
    }

    /// Places the fault effect and the PI constraints at level 0.
    pub fn activate(&mut self, constraints: &[PiConstraint]) -> Result<(), Conflict> {
        self.initialize(constraints)
    }

    /// Pushes `gate = value` as a decision on a new level.
    pub fn assume(&mut self, gate: GateId, value: Value5) -> NodeId {
        self.assign_decision(gate, value)
    }

    pub fn pattern(&self) -> Pattern {
        Pattern(
            self.circuit
                .primary_inputs()
                .iter()
                .map(|pi| match self.values[pi.index()].good().as_bool() {
                    Some(b) => Logic3::from_bool(b),
                    None => Logic3::X,
                })
                .collect(),
        )
    }

    pub fn run(&mut self, constraints: &[PiConstraint]) -> Status {
        if let Err(c) = self.initialize(constraints) {
            self.stats.conflicts += 1;
            self.record_refutation(&c);
            return Status::Untestable;
        }
        loop {
            let conflict = match self.propagate() {
                Err(c) => c,
                Ok(()) => {
                    if self.config.check_invariants {
                        self.check_invariants();
                    }
                    match self.progress() {
                        Progress::Success => {
                            let mut p = self.pattern();
                            for c in constraints {
                                if let Some(pos) = self.circuit.input_position(c.pi) {
                                    p.0[pos] = Logic3::from_bool(c.value);
                                }
                            }
                            return Status::Testable(p);
                        }
                        Progress::Blocked(c) => c,
                        Progress::Open => match self.decide() {
                            Some((g, v)) => {
                                self.stats.decisions += 1;
                                self.assign_decision(g, v);
                                continue;
                            }
                            None => {
                                debug_assert!(false, "open search state without objectives");
                                let mut nodes: Vec<NodeId> = self.trail.decisions().collect();
                                nodes.push(self.activation);
                                self.conflict(None, nodes)
                            }
                        },
                    }
                }
            };
            if let Resolution::Done(status) = self.resolve(conflict) {
                return status;
            }
        }
    }
}
