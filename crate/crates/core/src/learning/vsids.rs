// SPDX-License-Identifier: Apache-2.0

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::LearntConstraint;
use crate::netlist::GateId;

/// Decaying conflict-participation scores.
#[derive(Debug, Clone)]
pub struct VsidsState {
    scores: Vec<f64>,
    decay: f64,
    bump: f64,
    pick_probability: f64,
    rng: ChaCha8Rng,
}

impl VsidsState {
    pub fn new(n_gates: usize, decay: f64, pick_probability: f64, seed: u64) -> VsidsState {
        VsidsState {
            scores: vec![0.0; n_gates],
            decay,
            bump: 1.0,
            pick_probability,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn score(&self, gate: GateId) -> f64 {
        self.scores[gate.index()]
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    /// Adds the bump to every gate of the constraint, then decays all scores.
    pub fn bump_and_decay(&mut self, constraint: &LearntConstraint) {
        for lit in &constraint.literals {
            self.scores[lit.gate.index()] += self.bump;
        }
        if self.decay != 1.0 {
            for s in &mut self.scores {
                *s *= self.decay;
            }
        }
    }

    /// Multiplies every score by `factor`.
    pub fn rescale(&mut self, factor: f64) {
        for s in &mut self.scores {
            *s *= factor;
        }
    }

    /// One Bernoulli draw with the pick probability.
    pub fn roll(&mut self) -> bool {
        self.rng.gen::<f64>() < self.pick_probability
    }

    /// Highest score, ties to the lowest gate id.
    pub fn best(&self, candidates: &[GateId]) -> Option<GateId> {
        let mut best: Option<GateId> = None;
        for &c in candidates {
            best = match best {
                None => Some(c),
                Some(b) => {
                    let (sc, sb) = (self.score(c), self.score(b));
                    if sc > sb || (sc == sb && c < b) {
                        Some(c)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        best
    }

    pub fn pick(&mut self, structural: GateId, candidates: &[GateId]) -> GateId {
        if self.roll() {
            self.best(candidates).unwrap_or(structural)
        } else {
            structural
        }
    }
}
