// SPDX-License-Identifier: Apache-2.0

//! Independent checkers: a plain three-valued good/faulty simulator and an
//! exhaustive enumerator over the PIs of a fault cone.
//!
//! Nothing here uses the five-valued calculus.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::fault::Fault;
use crate::netlist::{Circuit, Cone, GateId, GateKind};

/// Maximum number of cone PIs `exhaustive_classify` will enumerate.
pub const ENUMERATION_BOUND: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Logic3 {
    Zero,
    One,
    X,
}

impl Logic3 {
    pub fn from_bool(b: bool) -> Logic3 {
        if b {
            Logic3::One
        } else {
            Logic3::Zero
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Logic3::Zero => Some(false),
            Logic3::One => Some(true),
            Logic3::X => None,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Logic3::Zero => '0',
            Logic3::One => '1',
            Logic3::X => 'X',
        }
    }

    fn negate(self) -> Logic3 {
        match self {
            Logic3::Zero => Logic3::One,
            Logic3::One => Logic3::Zero,
            Logic3::X => Logic3::X,
        }
    }
}

/// Values for every PI, in circuit PI order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Pattern(pub Vec<Logic3>);

impl Pattern {
    pub fn all_x(n: usize) -> Pattern {
        Pattern(vec![Logic3::X; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, idx: usize) -> Logic3 {
        self.0[idx]
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.0 {
            write!(f, "{}", v.symbol())?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid pattern character '{0}'")]
pub struct PatternError(pub char);

impl FromStr for Pattern {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Pattern, PatternError> {
        s.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(Logic3::Zero),
                '1' => Ok(Logic3::One),
                'X' | 'x' | '-' => Ok(Logic3::X),
                other => Err(PatternError(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Pattern)
    }
}

fn eval3(kind: GateKind, ins: &[Logic3]) -> Logic3 {
    let and = |ins: &[Logic3]| {
        if ins.contains(&Logic3::Zero) {
            Logic3::Zero
        } else if ins.contains(&Logic3::X) {
            Logic3::X
        } else {
            Logic3::One
        }
    };
    let or = |ins: &[Logic3]| {
        if ins.contains(&Logic3::One) {
            Logic3::One
        } else if ins.contains(&Logic3::X) {
            Logic3::X
        } else {
            Logic3::Zero
        }
    };
    let xor = |ins: &[Logic3]| {
        if ins.contains(&Logic3::X) {
            Logic3::X
        } else {
            Logic3::from_bool(ins.iter().filter(|&&v| v == Logic3::One).count() % 2 == 1)
        }
    };
    match kind {
        GateKind::Input => Logic3::X,
        GateKind::Output | GateKind::Buf => ins[0],
        GateKind::Not => ins[0].negate(),
        GateKind::And => and(ins),
        GateKind::Nand => and(ins).negate(),
        GateKind::Or => or(ins),
        GateKind::Nor => or(ins).negate(),
        GateKind::Xor => xor(ins),
        GateKind::Xnor => xor(ins).negate(),
    }
}

/// Per-gate values of one machine. The fault site, when given, is forced to
/// its stuck value.
pub fn simulate_gates(circuit: &Circuit, pattern: &Pattern, fault: Option<Fault>) -> Vec<Logic3> {
    let mut values = vec![Logic3::X; circuit.len()];
    for (pos, &pi) in circuit.primary_inputs().iter().enumerate() {
        values[pi.index()] = pattern.0.get(pos).copied().unwrap_or(Logic3::X);
    }
    let mut buf = Vec::new();
    for &g in circuit.topo_order() {
        if circuit.kind(g) != GateKind::Input {
            buf.clear();
            buf.extend(circuit.fanin(g).iter().map(|f| values[f.index()]));
            values[g.index()] = eval3(circuit.kind(g), &buf);
        }
        if let Some(f) = fault {
            if f.site == g {
                values[g.index()] = Logic3::from_bool(f.polarity.stuck_value());
            }
        }
    }
    values
}

/// PO values in PO order.
pub fn simulate(circuit: &Circuit, pattern: &Pattern, fault: Option<Fault>) -> Vec<Logic3> {
    let values = simulate_gates(circuit, pattern, fault);
    circuit
        .primary_outputs()
        .iter()
        .map(|po| values[po.index()])
        .collect()
}

pub fn detects(circuit: &Circuit, pattern: &Pattern, fault: Fault) -> bool {
    let good = simulate(circuit, pattern, None);
    let bad = simulate(circuit, pattern, Some(fault));
    good.iter().zip(&bad).any(|(g, b)| match (g.as_bool(), b.as_bool()) {
        (Some(x), Some(y)) => x != y,
        _ => false,
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cone has {pis} primary inputs, enumeration bound is {bound}")]
pub struct TooLarge {
    pub pis: usize,
    pub bound: usize,
}

/// Packed good and faulty values for 64 consecutive cone-PI assignments.
///
/// Assignment index `base + lane`; bit `k` of the index drives cone PI `k`.
pub struct PackedBatch<'a> {
    pub base: u64,
    /// Lanes that correspond to real assignments.
    pub valid: u64,
    /// Lanes whose assignment detects the fault.
    pub detect: u64,
    pub good: &'a [u64],
    pub faulty: &'a [u64],
}

fn pack(kind: GateKind, ins: impl Iterator<Item = u64>) -> u64 {
    let mut ins = ins;
    let first = ins.next().unwrap_or(0);
    match kind {
        GateKind::Input => 0,
        GateKind::Output | GateKind::Buf => first,
        GateKind::Not => !first,
        GateKind::And => ins.fold(first, |a, b| a & b),
        GateKind::Nand => !ins.fold(first, |a, b| a & b),
        GateKind::Or => ins.fold(first, |a, b| a | b),
        GateKind::Nor => !ins.fold(first, |a, b| a | b),
        GateKind::Xor => ins.fold(first, |a, b| a ^ b),
        GateKind::Xnor => !ins.fold(first, |a, b| a ^ b),
    }
}

const LANE_BITS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Walks every assignment of the cone PIs in batches of 64 and hands each
/// batch to `visit`. Returning `false` from `visit` stops the walk.
pub fn for_each_batch<F>(circuit: &Circuit, cone: &Cone, fault: Fault, mut visit: F) -> Result<(), TooLarge>
where
    F: FnMut(&PackedBatch<'_>) -> bool,
{
    let pis = cone.pis();
    let n = pis.len();
    if n > ENUMERATION_BOUND {
        return Err(TooLarge { pis: n, bound: ENUMERATION_BOUND });
    }
    let total: u64 = 1 << n;
    let valid_all = if total >= 64 { u64::MAX } else { (1u64 << total) - 1 };
    let mut order: Vec<GateId> = cone.members().to_vec();
    order.sort_by_key(|&g| (circuit.level(g), g));
    let mut good = vec![0u64; circuit.len()];
    let mut faulty = vec![0u64; circuit.len()];
    let stuck = if fault.polarity.stuck_value() { u64::MAX } else { 0 };
    let mut base = 0u64;
    while base < total {
        for (k, &pi) in pis.iter().enumerate() {
            good[pi.index()] = if k < 6 {
                LANE_BITS[k]
            } else if (base >> k) & 1 == 1 {
                u64::MAX
            } else {
                0
            };
        }
        for &g in &order {
            let kind = circuit.kind(g);
            if kind != GateKind::Input {
                good[g.index()] = pack(kind, circuit.fanin(g).iter().map(|f| good[f.index()]));
            }
            faulty[g.index()] = if g == fault.site {
                stuck
            } else if cone.in_effect_region(g) && kind != GateKind::Input {
                pack(
                    kind,
                    circuit.fanin(g).iter().map(|f| {
                        if cone.in_effect_region(*f) {
                            faulty[f.index()]
                        } else {
                            good[f.index()]
                        }
                    }),
                )
            } else {
                good[g.index()]
            };
        }
        let mut detect = 0u64;
        for po in cone.pos() {
            detect |= good[po.index()] ^ faulty[po.index()];
        }
        let batch = PackedBatch {
            base,
            valid: valid_all,
            detect: detect & valid_all,
            good: &good,
            faulty: &faulty,
        };
        if !visit(&batch) {
            break;
        }
        base += 64;
    }
    Ok(())
}

fn assignment_pattern(circuit: &Circuit, cone: &Cone, index: u64) -> Pattern {
    let mut pat = Pattern::all_x(circuit.primary_inputs().len());
    for (k, &pi) in cone.pis().iter().enumerate() {
        let pos = circuit.input_position(pi).expect("cone PI is a primary input");
        pat.0[pos] = Logic3::from_bool((index >> k) & 1 == 1);
    }
    pat
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    /// Every detecting assignment of the cone PIs; other PIs are X.
    Testable(Vec<Pattern>),
    Untestable,
}

/// Enumerates all cone-PI assignments and collects the detecting ones.
pub fn exhaustive_classify(circuit: &Circuit, cone: &Cone, fault: Fault) -> Result<Classification, TooLarge> {
    let mut found = Vec::new();
    for_each_batch(circuit, cone, fault, |b| {
        let mut bits = b.detect;
        while bits != 0 {
            let lane = bits.trailing_zeros() as u64;
            found.push(assignment_pattern(circuit, cone, b.base + lane));
            bits &= bits - 1;
        }
        true
    })?;
    Ok(if found.is_empty() {
        Classification::Untestable
    } else {
        Classification::Testable(found)
    })
}

/// First detecting assignment, if any.
pub fn exhaustive_witness(circuit: &Circuit, cone: &Cone, fault: Fault) -> Result<Option<Pattern>, TooLarge> {
    let mut found = None;
    for_each_batch(circuit, cone, fault, |b| {
        if b.detect != 0 {
            found = Some(assignment_pattern(circuit, cone, b.base + b.detect.trailing_zeros() as u64));
            false
        } else {
            true
        }
    })?;
    Ok(found)
}

/// First detecting assignment that agrees with every `(pi, value)` pin.
/// Pins on PIs outside the cone are ignored.
pub fn constrained_witness(
    circuit: &Circuit,
    cone: &Cone,
    fault: Fault,
    pins: &[(GateId, bool)],
) -> Result<Option<Pattern>, TooLarge> {
    let pins: Vec<(GateId, bool)> = pins.iter().copied().filter(|(g, _)| cone.pis().contains(g)).collect();
    let mut found = None;
    for_each_batch(circuit, cone, fault, |b| {
        let mut ok = b.detect;
        for &(pi, v) in &pins {
            let w = b.good[pi.index()];
            ok &= if v { w } else { !w };
        }
        if ok != 0 {
            let mut pat = assignment_pattern(circuit, cone, b.base + ok.trailing_zeros() as u64);
            for &(pi, v) in &pins {
                if let Some(pos) = circuit.input_position(pi) {
                    pat.0[pos] = Logic3::from_bool(v);
                }
            }
            found = Some(pat);
            false
        } else {
            true
        }
    })?;
    Ok(found)
}
