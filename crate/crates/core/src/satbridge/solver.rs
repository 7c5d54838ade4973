// SPDX-License-Identifier: Apache-2.0

//! Small CDCL solver: two watched literals, first-UIP learning, activity
//! ordering. No restarts, no preprocessing.

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    /// Value of variable `v` at index `v - 1`.
    Sat(Vec<bool>),
    Unsat,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }
}

/// Internal literal: `2 * var + negated`, vars 0-based.
type Lit = u32;

fn lit_of(dimacs: i32) -> Lit {
    let v = dimacs.unsigned_abs() - 1;
    2 * v + (dimacs < 0) as u32
}

struct Heap {
    heap: Vec<usize>,
    pos: Vec<usize>,
}

impl Heap {
    fn new(n: usize) -> Heap {
        Heap {
            heap: (0..n).collect(),
            pos: (0..n).collect(),
        }
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v] != NONE
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let p = (i - 1) / 2;
            if act[self.heap[p]] >= act[v] {
                break;
            }
            self.heap[i] = self.heap[p];
            self.pos[self.heap[i]] = i;
            i = p;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let c = if r < n && act[self.heap[r]] > act[self.heap[l]] { r } else { l };
            if act[self.heap[c]] <= act[v] {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i]] = i;
            i = c;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        self.pos[v] = self.heap.len() - 1;
        self.up(self.heap.len() - 1, act);
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("nonempty");
        self.pos[top] = NONE;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = 0;
            self.down(0, act);
        }
        Some(top)
    }
}

pub struct Solver {
    /// Clause literals, back to back; clause `i` is `lits[start[i]..start[i + 1]]`.
    lits: Vec<Lit>,
    start: Vec<usize>,
    watches: Vec<Vec<u32>>,
    assign: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<usize>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    inc: f64,
    heap: Heap,
    seen: Vec<bool>,
    phase: Vec<bool>,
    unsat: bool,
    pub conflicts: u64,
    pub decisions: u64,
}

impl Solver {
    pub fn new(num_vars: usize, clauses: &[Vec<i32>]) -> Solver {
        let total: usize = clauses.iter().map(Vec::len).sum();
        let mut s = Solver {
            lits: Vec::with_capacity(total),
            start: Vec::with_capacity(clauses.len() + 1),
            watches: vec![Vec::new(); 2 * num_vars],
            assign: vec![-1; num_vars],
            level: vec![0; num_vars],
            reason: vec![NONE; num_vars],
            trail: Vec::with_capacity(num_vars),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; num_vars],
            inc: 1.0,
            heap: Heap::new(num_vars),
            seen: vec![false; num_vars],
            phase: vec![false; num_vars],
            unsat: false,
            conflicts: 0,
            decisions: 0,
        };
        s.start.push(0);
        let mut buf = Vec::new();
        for c in clauses {
            buf.clear();
            buf.extend(c.iter().map(|&d| lit_of(d)));
            s.add_clause(&mut buf);
        }
        s
    }

    #[inline]
    fn value(&self, l: Lit) -> i8 {
        let a = self.assign[(l >> 1) as usize];
        if a < 0 {
            -1
        } else {
            a ^ (l & 1) as i8
        }
    }

    fn push_clause(&mut self, lits: &[Lit]) -> usize {
        let idx = self.start.len() - 1;
        self.watches[lits[0] as usize].push(idx as u32);
        self.watches[lits[1] as usize].push(idx as u32);
        self.lits.extend_from_slice(lits);
        self.start.push(self.lits.len());
        idx
    }

    fn add_clause(&mut self, lits: &mut Vec<Lit>) {
        if self.unsat {
            return;
        }
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0] ^ 1 == w[1]) {
            return;
        }
        lits.retain(|&l| self.value(l) != 0);
        if lits.iter().any(|&l| self.value(l) == 1) {
            return;
        }
        match lits.len() {
            0 => self.unsat = true,
            1 => {
                self.enqueue(lits[0], NONE);
                if self.propagate().is_some() {
                    self.unsat = true;
                }
            }
            _ => {
                self.push_clause(lits);
            }
        }
    }

    fn enqueue(&mut self, l: Lit, reason: usize) {
        let v = (l >> 1) as usize;
        self.assign[v] = 1 ^ (l & 1) as i8;
        self.level[v] = self.trail_lim.len() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let falsified = p ^ 1;
            let mut ws = std::mem::take(&mut self.watches[falsified as usize]);
            let mut conflict = None;
            let (mut i, mut j) = (0, 0);
            while i < ws.len() {
                let ci = ws[i] as usize;
                i += 1;
                let (lo, hi) = (self.start[ci], self.start[ci + 1]);
                let assign = &self.assign;
                let val = |l: Lit| {
                    let a = assign[(l >> 1) as usize];
                    if a < 0 {
                        -1
                    } else {
                        a ^ (l & 1) as i8
                    }
                };
                let c = &mut self.lits[lo..hi];
                if c[0] == falsified {
                    c.swap(0, 1);
                }
                let first = c[0];
                let first_val = val(first);
                if first_val == 1 {
                    ws[j] = ci as u32;
                    j += 1;
                    continue;
                }
                let mut moved = None;
                for k in 2..c.len() {
                    if val(c[k]) != 0 {
                        c.swap(1, k);
                        moved = Some(c[1]);
                        break;
                    }
                }
                if let Some(w) = moved {
                    self.watches[w as usize].push(ci as u32);
                    continue;
                }
                ws[j] = ci as u32;
                j += 1;
                if first_val == 0 {
                    conflict = Some(ci);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.enqueue(first, ci);
                }
            }
            ws.truncate(j);
            self.watches[falsified as usize] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.inc *= 1e-100;
        }
        if self.heap.contains(v) {
            let i = self.heap.pos[v];
            self.heap.up(i, &self.activity);
        }
    }

    fn analyze(&mut self, mut confl: usize) -> (Vec<Lit>, u32) {
        let current = self.trail_lim.len() as u32;
        let mut learnt: Vec<Lit> = vec![0];
        let mut path = 0;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        loop {
            for k in self.start[confl]..self.start[confl + 1] {
                let q = self.lits[k];
                let v = (q >> 1) as usize;
                if Some(q) == p || self.seen[v] || self.level[v] == 0 {
                    continue;
                }
                self.seen[v] = true;
                self.bump(v);
                if self.level[v] >= current {
                    path += 1;
                } else {
                    learnt.push(q);
                }
            }
            loop {
                idx -= 1;
                if self.seen[(self.trail[idx] >> 1) as usize] {
                    break;
                }
            }
            let lit = self.trail[idx];
            let v = (lit >> 1) as usize;
            self.seen[v] = false;
            path -= 1;
            p = Some(lit);
            if path == 0 {
                break;
            }
            confl = self.reason[v];
        }
        learnt[0] = p.expect("uip found") ^ 1;
        for &l in &learnt[1..] {
            self.seen[(l >> 1) as usize] = false;
        }
        let mut back = 0;
        if learnt.len() > 1 {
            let mut best = 1;
            for i in 2..learnt.len() {
                if self.level[(learnt[i] >> 1) as usize] > self.level[(learnt[best] >> 1) as usize] {
                    best = i;
                }
            }
            learnt.swap(1, best);
            back = self.level[(learnt[1] >> 1) as usize];
        }
        (learnt, back)
    }

    fn cancel_until(&mut self, level: u32) {
        if self.trail_lim.len() as u32 <= level {
            return;
        }
        let cut = self.trail_lim[level as usize];
        for i in (cut..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = (l >> 1) as usize;
            self.phase[v] = l & 1 == 0;
            self.assign[v] = -1;
            self.reason[v] = NONE;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(cut);
        self.trail_lim.truncate(level as usize);
        self.qhead = cut;
    }

    pub fn solve(&mut self) -> SatResult {
        if self.unsat {
            return SatResult::Unsat;
        }
        loop {
            if let Some(confl) = self.propagate() {
                self.conflicts += 1;
                if self.trail_lim.is_empty() {
                    return SatResult::Unsat;
                }
                let (learnt, back) = self.analyze(confl);
                self.cancel_until(back);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NONE);
                } else {
                    let idx = self.push_clause(&learnt);
                    self.enqueue(learnt[0], idx);
                }
                self.inc /= 0.95;
                continue;
            }
            let mut next = None;
            while let Some(v) = self.heap.pop(&self.activity) {
                if self.assign[v] < 0 {
                    next = Some(v);
                    break;
                }
            }
            let Some(v) = next else {
                return SatResult::Sat(self.assign.iter().map(|&a| a == 1).collect());
            };
            self.decisions += 1;
            self.trail_lim.push(self.trail.len());
            let l = 2 * v as u32 + (!self.phase[v]) as u32;
            self.enqueue(l, NONE);
        }
    }
}

pub fn solve(num_vars: usize, clauses: &[Vec<i32>]) -> SatResult {
    Solver::new(num_vars, clauses).solve()
}
