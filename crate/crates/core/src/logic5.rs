// SPDX-License-Identifier: Apache-2.0

//! Five-valued D-calculus.
//!
//! Every [`Value5`] is a pair of three-valued signals: the value in the good
//! machine and the value in the faulty machine. Gate evaluation works on the
//! pairs, folding the two-input three-valued operation over the inputs one
//! component at a time, and only collapses back into five values at the end.
//! A pair with an unknown component is reported as `X`.
//!
//! The three-valued tables are generated from the boolean gate functions by
//! taking, for each input combination, the common result over every completion
//! of the unknown inputs.

use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netlist::GateKind;

/// Three-valued signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tri {
    Zero,
    One,
    X,
}

impl Tri {
    pub const ALL: [Tri; 3] = [Tri::Zero, Tri::One, Tri::X];

    #[inline]
    pub fn from_bool(b: bool) -> Tri {
        if b {
            Tri::One
        } else {
            Tri::Zero
        }
    }

    #[inline]
    pub fn as_bool(self) -> Option<bool> {
        match self {
            Tri::Zero => Some(false),
            Tri::One => Some(true),
            Tri::X => None,
        }
    }

    #[inline]
    pub fn not(self) -> Tri {
        match self {
            Tri::Zero => Tri::One,
            Tri::One => Tri::Zero,
            Tri::X => Tri::X,
        }
    }

    fn completions(self) -> &'static [bool] {
        match self {
            Tri::Zero => &[false],
            Tri::One => &[true],
            Tri::X => &[false, true],
        }
    }
}

/// Lifts a boolean binary operator to three values.
fn lift(op: fn(bool, bool) -> bool) -> [[Tri; 3]; 3] {
    let mut table = [[Tri::X; 3]; 3];
    for a in Tri::ALL {
        for b in Tri::ALL {
            let mut seen = [false; 2];
            for &x in a.completions() {
                for &y in b.completions() {
                    seen[op(x, y) as usize] = true;
                }
            }
            table[a as usize][b as usize] = match seen {
                [true, false] => Tri::Zero,
                [false, true] => Tri::One,
                _ => Tri::X,
            };
        }
    }
    table
}

struct Tables {
    and: [[Tri; 3]; 3],
    or: [[Tri; 3]; 3],
    xor: [[Tri; 3]; 3],
}

static TABLES: LazyLock<Tables> = LazyLock::new(|| Tables {
    and: lift(|a, b| a & b),
    or: lift(|a, b| a | b),
    xor: lift(|a, b| a ^ b),
});

/// Five-valued signal: a (good, faulty) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Value5 {
    Zero,
    One,
    X,
    /// good 1, faulty 0
    D,
    /// good 0, faulty 1
    Dbar,
}

impl Value5 {
    pub const ALL: [Value5; 5] = [Value5::Zero, Value5::One, Value5::X, Value5::D, Value5::Dbar];

    /// The four fully specified values.
    pub const KNOWN: [Value5; 4] = [Value5::Zero, Value5::One, Value5::D, Value5::Dbar];

    #[inline]
    pub fn from_pair(good: Tri, faulty: Tri) -> Value5 {
        match (good, faulty) {
            (Tri::Zero, Tri::Zero) => Value5::Zero,
            (Tri::One, Tri::One) => Value5::One,
            (Tri::One, Tri::Zero) => Value5::D,
            (Tri::Zero, Tri::One) => Value5::Dbar,
            _ => Value5::X,
        }
    }

    #[inline]
    pub fn from_bits(good: bool, faulty: bool) -> Value5 {
        Value5::from_pair(Tri::from_bool(good), Tri::from_bool(faulty))
    }

    #[inline]
    pub fn from_bool(b: bool) -> Value5 {
        if b {
            Value5::One
        } else {
            Value5::Zero
        }
    }

    #[inline]
    pub fn pair(self) -> (Tri, Tri) {
        match self {
            Value5::Zero => (Tri::Zero, Tri::Zero),
            Value5::One => (Tri::One, Tri::One),
            Value5::D => (Tri::One, Tri::Zero),
            Value5::Dbar => (Tri::Zero, Tri::One),
            Value5::X => (Tri::X, Tri::X),
        }
    }

    #[inline]
    pub fn good(self) -> Tri {
        self.pair().0
    }

    #[inline]
    pub fn faulty(self) -> Tri {
        self.pair().1
    }

    #[inline]
    pub fn is_known(self) -> bool {
        self != Value5::X
    }

    /// D or D̄: the good and faulty machines disagree.
    #[inline]
    pub fn is_fault_effect(self) -> bool {
        matches!(self, Value5::D | Value5::Dbar)
    }

    /// 0 or 1 in both machines.
    #[inline]
    pub fn as_bool(self) -> Option<bool> {
        match self {
            Value5::Zero => Some(false),
            Value5::One => Some(true),
            _ => None,
        }
    }

    #[inline]
    pub fn invert(self) -> Value5 {
        let (g, f) = self.pair();
        Value5::from_pair(g.not(), f.not())
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Value5::Zero => "0",
            Value5::One => "1",
            Value5::X => "X",
            Value5::D => "D",
            Value5::Dbar => "!D",
        }
    }
}

impl fmt::Display for Value5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Value5 {
    type Err = String;

    fn from_str(s: &str) -> Result<Value5, String> {
        Value5::ALL
            .into_iter()
            .find(|v| v.symbol().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown value '{s}'"))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{kind} cannot be evaluated with {got} input(s)")]
pub struct ArityError {
    pub kind: GateKind,
    pub got: usize,
}

/// Three-valued evaluation of one machine component. Arity is not checked.
#[inline]
pub fn eval_tri<I>(kind: GateKind, inputs: I) -> Tri
where
    I: IntoIterator<Item = Tri>,
{
    let t = &*TABLES;
    let (table, invert) = match kind {
        GateKind::And => (&t.and, false),
        GateKind::Nand => (&t.and, true),
        GateKind::Or => (&t.or, false),
        GateKind::Nor => (&t.or, true),
        GateKind::Xor => (&t.xor, false),
        GateKind::Xnor => (&t.xor, true),
        GateKind::Buf | GateKind::Output => return inputs.into_iter().next().unwrap_or(Tri::X),
        GateKind::Not => return inputs.into_iter().next().unwrap_or(Tri::X).not(),
        GateKind::Input => return Tri::X,
    };
    let mut it = inputs.into_iter();
    let mut acc = it.next().unwrap_or(Tri::X);
    for v in it {
        acc = table[acc as usize][v as usize];
    }
    if invert {
        acc.not()
    } else {
        acc
    }
}

/// Five-valued evaluation without an arity check; the engine's hot path.
#[inline]
pub fn eval_iter<I>(kind: GateKind, inputs: I) -> Value5
where
    I: IntoIterator<Item = Value5>,
    I::IntoIter: Clone,
{
    let it = inputs.into_iter();
    let good = eval_tri(kind, it.clone().map(Value5::good));
    if good == Tri::X {
        return Value5::X;
    }
    let faulty = eval_tri(kind, it.map(Value5::faulty));
    Value5::from_pair(good, faulty)
}

/// Forward implication through one gate.
pub fn eval_gate(kind: GateKind, inputs: &[Value5]) -> Result<Value5, ArityError> {
    if kind == GateKind::Input || !kind.arity_ok(inputs.len()) {
        return Err(ArityError {
            kind,
            got: inputs.len(),
        });
    }
    Ok(eval_iter(kind, inputs.iter().copied()))
}

/// Every way of assigning as few of the `X` inputs as possible (to 0, 1, D or
/// D̄) such that the gate evaluates to `output`.
///
/// Candidates are returned in a fixed order. An empty list means no
/// completion exists. Enumeration is exponential in the number of `X` inputs.
pub fn justify_gate(kind: GateKind, output: Value5, current: &[Value5]) -> Vec<Vec<Value5>> {
    debug_assert!(output.is_known(), "nothing to justify for X");
    if kind == GateKind::Input || !kind.arity_ok(current.len()) {
        return Vec::new();
    }
    let free: Vec<usize> = (0..current.len())
        .filter(|&i| current[i] == Value5::X)
        .collect();
    for size in 0..=free.len() {
        let mut found = Vec::new();
        for subset in subsets(&free, size) {
            let mut digits = vec![0usize; size];
            loop {
                let mut cand = current.to_vec();
                for (slot, &pos) in subset.iter().enumerate() {
                    cand[pos] = Value5::KNOWN[digits[slot]];
                }
                if eval_iter(kind, cand.iter().copied()) == output {
                    found.push(cand);
                }
                if !advance(&mut digits, Value5::KNOWN.len()) {
                    break;
                }
            }
        }
        if !found.is_empty() {
            return found;
        }
    }
    Vec::new()
}

fn subsets(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut rest in subsets(&items[i + 1..], size - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Odometer increment; false once every digit wrapped.
fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}
