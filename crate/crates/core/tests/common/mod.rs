// SPDX-License-Identifier: Apache-2.0

//! Circuits shared by the integration tests.

#![allow(dead_code)]

pub mod oracles;

use std::path::PathBuf;

use cdsl::netlist::{parse_bench, Circuit, CircuitBuilder, GateId, GateKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const BENCHMARKS: [&str; 7] = ["c17", "c432", "c499", "c880", "c1355", "c1908", "c6288"];

pub fn benchmark_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../benchmarks/iscas85")
        .join(format!("{name}.bench"))
}

pub fn benchmark(name: &str) -> Circuit {
    let text = std::fs::read_to_string(benchmark_path(name)).expect("benchmark file");
    parse_bench(&text).expect("benchmark parses")
}

pub fn and2() -> Circuit {
    parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)").unwrap()
}

/// y = a OR (a AND b); m/SA0 is redundant.
pub fn absorption() -> Circuit {
    parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\nm = AND(a, b)\ny = OR(a, m)").unwrap()
}

/// Consensus form ab + a'c + bc. The bc term is redundant.
pub fn consensus() -> Circuit {
    parse_bench(
        "INPUT(a)\nINPUT(b)\nINPUT(c)\nOUTPUT(y)\n\
         na = NOT(a)\nt1 = AND(a, b)\nt2 = AND(na, c)\nt3 = AND(b, c)\ny = OR(t1, t2, t3)",
    )
    .unwrap()
}

/// Graph shape of the worked conflict example. `f` is the fault site.
pub fn learning_example() -> Circuit {
    parse_bench(
        "INPUT(x0)\nINPUT(x1)\nINPUT(x3)\nINPUT(x4)\nINPUT(f)\nOUTPUT(out)\n\
         z1 = BUFF(x1)\nx5 = BUFF(x3)\n\
         x9 = AND(z1, x3, x4)\nx7 = AND(x4, x5, x9)\nx8 = AND(x4, x7)\n\
         x2 = XOR(x0, x8)\nout = AND(f, x2)",
    )
    .unwrap()
}

/// `s/SA0` is observable only through `g`, which a pinned `m = 0` closes.
pub fn masking() -> Circuit {
    parse_bench(
        "INPUT(a)\nINPUT(b)\nINPUT(c)\nINPUT(d)\nINPUT(e)\nINPUT(m)\nOUTPUT(y)\nOUTPUT(z)\n\
         s = AND(a, b)\nt = OR(s, c)\nk = AND(m, d)\ng = AND(t, k)\n\
         h = NAND(e, c)\ny = XOR(g, h)\nz = NOR(d, e)",
    )
    .unwrap()
}

/// Unsigned n x n array multiplier from AND partial products and ripple
/// adders, the structure of c6288.
pub fn multiplier(n: usize) -> Circuit {
    let mut b = CircuitBuilder::new();
    let xs: Vec<GateId> = (0..n).map(|i| b.input(&format!("a{i}"))).collect();
    let ys: Vec<GateId> = (0..n).map(|i| b.input(&format!("b{i}"))).collect();
    let mut acc: Vec<Option<GateId>> = vec![None; 2 * n];
    let mut uid = 0;
    let mut name = |p: &str| {
        uid += 1;
        format!("{p}{uid}")
    };
    for (i, &y) in ys.iter().enumerate() {
        let mut carry: Option<GateId> = None;
        for k in i..2 * n {
            let pp = if k - i < n {
                Some(b.gate(&name("pp"), GateKind::And, &[xs[k - i], y]))
            } else {
                None
            };
            let ops: Vec<GateId> = [acc[k], pp, carry].into_iter().flatten().collect();
            match ops.len() {
                0 => break,
                1 => {
                    acc[k] = Some(ops[0]);
                    carry = None;
                }
                2 => {
                    acc[k] = Some(b.gate(&name("hs"), GateKind::Xor, &ops));
                    carry = Some(b.gate(&name("hc"), GateKind::And, &ops));
                }
                _ => {
                    let t = b.gate(&name("ft"), GateKind::Xor, &ops[..2]);
                    acc[k] = Some(b.gate(&name("fs"), GateKind::Xor, &[t, ops[2]]));
                    let g1 = b.gate(&name("fg"), GateKind::And, &ops[..2]);
                    let g2 = b.gate(&name("fp"), GateKind::And, &[t, ops[2]]);
                    carry = Some(b.gate(&name("fc"), GateKind::Or, &[g1, g2]));
                }
            }
        }
    }
    for bit in acc.into_iter().flatten() {
        b.output(bit);
    }
    b.finish().unwrap()
}

/// Layered random logic with injected consensus and absorption
/// redundancies.
pub fn redundant_logic(seed: u64, n_pi: usize, blocks: usize) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = CircuitBuilder::new();
    let mut nets: Vec<GateId> = (0..n_pi).map(|i| b.input(&format!("i{i}"))).collect();
    let mut fresh: Vec<GateId> = Vec::new();
    let mut uid = 0;
    let mut name = |p: &str| {
        uid += 1;
        format!("{p}{uid}")
    };
    for _ in 0..blocks {
        let lo = nets.len().saturating_sub(3 * n_pi);
        let pick = |rng: &mut ChaCha8Rng| nets[rng.gen_range(lo..nets.len())];
        let (x, y, z) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let out = match rng.gen_range(0..4) {
            0 => {
                let nx = b.gate(&name("n"), GateKind::Not, &[x]);
                let t1 = b.gate(&name("c"), GateKind::And, &[x, y]);
                let t2 = b.gate(&name("c"), GateKind::And, &[nx, z]);
                let t3 = b.gate(&name("c"), GateKind::And, &[y, z]);
                b.gate(&name("s"), GateKind::Or, &[t1, t2, t3])
            }
            1 => {
                let m = b.gate(&name("m"), GateKind::And, &[x, y]);
                b.gate(&name("s"), GateKind::Or, &[x, m])
            }
            2 => {
                let t = b.gate(&name("x"), GateKind::Xor, &[x, y]);
                b.gate(&name("s"), GateKind::Nand, &[t, z])
            }
            _ => {
                let o = b.gate(&name("o"), GateKind::Or, &[x, z]);
                let t = b.gate(&name("a"), GateKind::And, &[o, x, y]);
                b.gate(&name("s"), GateKind::Nor, &[t, z])
            }
        };
        nets.push(out);
        fresh.push(out);
    }
    let tail = fresh.len().saturating_sub(n_pi);
    let outs: Vec<GateId> = fresh[tail..].to_vec();
    for o in outs {
        b.output(o);
    }
    b.finish().unwrap()
}

/// Random DAG over all gate kinds.
pub fn random_circuit(seed: u64, n_pi: usize, n_gates: usize, n_po: usize) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = CircuitBuilder::new();
    let mut nets: Vec<GateId> = (0..n_pi).map(|i| b.input(&format!("p{i}"))).collect();
    let kinds = [
        GateKind::And,
        GateKind::Nand,
        GateKind::Or,
        GateKind::Nor,
        GateKind::Xor,
        GateKind::Xnor,
        GateKind::Not,
        GateKind::Buf,
    ];
    for i in 0..n_gates {
        let kind = kinds[rng.gen_range(0..kinds.len())];
        let arity = match kind {
            GateKind::Not | GateKind::Buf => 1,
            _ => rng.gen_range(2..=3),
        };
        let fanin: Vec<GateId> = (0..arity).map(|_| nets[rng.gen_range(0..nets.len())]).collect();
        nets.push(b.gate(&format!("g{i}"), kind, &fanin));
    }
    let n = nets.len();
    for k in 0..n_po.min(n_gates) {
        b.output(nets[n - 1 - k]);
    }
    b.finish().unwrap()
}
