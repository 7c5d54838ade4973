// SPDX-License-Identifier: Apache-2.0

//! D-algorithm search with an explicit implication graph, optional
//! conflict-driven learning, and the single- and two-stage drivers.

pub mod graph;
mod search;

use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

pub use graph::{Assignment, Conflict, ImplicationGraph, NodeId, Reason};
pub use search::SearchState;

use crate::diagnosis::PiConstraint;
use crate::fault::{AtpgResult, Fault, Stats, Status};
use crate::learning::{ClauseDb, LearntConstraint};
use crate::logic5::Value5;
use crate::netlist::{extract_cone, Circuit, Cone};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VsidsConfig {
    pub decay: f64,
    pub bump: f64,
    pub pick_probability: f64,
}

impl Default for VsidsConfig {
    fn default() -> VsidsConfig {
        VsidsConfig {
            decay: 0.95,
            bump: 1.0,
            pick_probability: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LearnMode {
    #[default]
    UipOnly,
    /// UIP constraint plus the decision-based constraint on every conflict.
    Both,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub backtrack_limit: u64,
    pub learning_enabled: bool,
    pub vsids: VsidsConfig,
    /// Rounds a constraint may go unused before it is dropped. `u64::MAX`
    /// keeps everything.
    pub forget_n: u64,
    pub rng_seed: u64,
    pub stage1_limit: u64,
    pub stage2_limit: u64,
    pub learn_mode: LearnMode,
    /// Stop the backtrace at the first unassigned line outside the fault
    /// effect region instead of following it to a PI.
    pub line_decisions: bool,
    /// Re-derive frontiers and trail invariants after every fixpoint.
    pub check_invariants: bool,
}

impl Default for EngineConfig {
    fn default() -> EngineConfig {
        EngineConfig {
            backtrack_limit: 100,
            learning_enabled: true,
            vsids: VsidsConfig::default(),
            forget_n: 1000,
            rng_seed: 1,
            stage1_limit: 20,
            stage2_limit: 100,
            learn_mode: LearnMode::UipOnly,
            line_decisions: false,
            check_invariants: false,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("vsids decay {0} outside [0, 1]")]
    Decay(f64),
    #[error("pick probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("stage-1 limit {stage1} must be below stage-2 limit {stage2}")]
    StageLimits { stage1: u64, stage2: u64 },
}

impl EngineConfig {
    /// Baseline D-algorithm: no learning, chronological backtracking.
    pub fn plain(limit: u64) -> EngineConfig {
        EngineConfig {
            backtrack_limit: limit,
            learning_enabled: false,
            ..EngineConfig::default()
        }
    }

    pub fn cdsl(limit: u64) -> EngineConfig {
        EngineConfig {
            backtrack_limit: limit,
            learning_enabled: true,
            ..EngineConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..=1.0).contains(&self.vsids.decay) {
            return Err(ConfigError::Decay(self.vsids.decay));
        }
        if !(0.0..=1.0).contains(&self.vsids.pick_probability) {
            return Err(ConfigError::Probability(self.vsids.pick_probability));
        }
        Ok(())
    }

    pub fn validate_two_stage(&self) -> Result<(), ConfigError> {
        self.validate()?;
        if self.stage1_limit >= self.stage2_limit {
            return Err(ConfigError::StageLimits {
                stage1: self.stage1_limit,
                stage2: self.stage2_limit,
            });
        }
        Ok(())
    }

    pub fn stage1(&self) -> EngineConfig {
        EngineConfig {
            backtrack_limit: self.stage1_limit,
            learning_enabled: false,
            ..self.clone()
        }
    }

    pub fn stage2(&self) -> EngineConfig {
        EngineConfig {
            backtrack_limit: self.stage2_limit,
            learning_enabled: true,
            ..self.clone()
        }
    }
}

/// Everything a search leaves behind.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub result: AtpgResult,
    /// Clause database at the end of the search.
    pub db: ClauseDb,
    /// Every constraint learnt, in order, including forgotten ones.
    pub learnt: Vec<LearntConstraint>,
    /// Per-gate values when the search stopped.
    pub final_values: Vec<Value5>,
    /// Backjumps after which the learnt constraint was checked to be unit.
    pub asserting_checks: u64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Per-fault generator seed, independent of scheduling.
pub fn fault_seed(seed: u64, fault: Fault) -> u64 {
    splitmix64(seed ^ splitmix64(((fault.site.index() as u64) << 1) | fault.polarity.stuck_value() as u64))
}

pub fn search(
    circuit: &Circuit,
    cone: &Cone,
    fault: Fault,
    config: &EngineConfig,
    constraints: &[PiConstraint],
) -> SearchOutcome {
    let start = Instant::now();
    let mut state = SearchState::new(circuit, cone, fault, config);
    let status = state.run(constraints);
    let mut outcome = state.finish(status);
    outcome.result.stats.micros = start.elapsed().as_micros() as u64;
    outcome
}

pub fn run_fault(circuit: &Circuit, cone: &Cone, fault: Fault, config: &EngineConfig) -> AtpgResult {
    search(circuit, cone, fault, config, &[]).result
}

/// Extracts the cone and searches. A fault that reaches no PO is
/// untestable without search.
pub fn solve_fault(
    circuit: &Circuit,
    fault: Fault,
    config: &EngineConfig,
    constraints: &[PiConstraint],
) -> AtpgResult {
    match extract_cone(circuit, fault.site) {
        Ok(cone) => search(circuit, &cone, fault, config, constraints).result,
        Err(_) => AtpgResult {
            fault,
            status: Status::Untestable,
            stats: Stats::default(),
        },
    }
}

/// Runs every fault, `jobs` at a time (0 = all cores). Results are in fault
/// order.
pub fn run_faults(
    circuit: &Circuit,
    faults: &[Fault],
    config: &EngineConfig,
    constraints: &[PiConstraint],
    jobs: usize,
) -> Vec<AtpgResult> {
    let work = |f: &Fault| solve_fault(circuit, *f, config, constraints);
    match jobs {
        1 => faults.iter().map(work).collect(),
        0 => faults.par_iter().map(work).collect(),
        n => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| faults.par_iter().map(work).collect()),
            Err(_) => faults.iter().map(work).collect(),
        },
    }
}

/// Stage 1 without learning at `stage1_limit`; stage-1 aborts are retried
/// with learning at `stage2_limit`.
pub fn run_two_stage(
    circuit: &Circuit,
    faults: &[Fault],
    config: &EngineConfig,
    constraints: &[PiConstraint],
    jobs: usize,
) -> Vec<AtpgResult> {
    let mut results = run_faults(circuit, faults, &config.stage1(), constraints, jobs);
    let retry: Vec<usize> = (0..results.len())
        .filter(|&i| results[i].status == Status::Aborted)
        .collect();
    let again: Vec<Fault> = retry.iter().map(|&i| faults[i]).collect();
    let second = run_faults(circuit, &again, &config.stage2(), constraints, jobs);
    for (i, r) in retry.into_iter().zip(second) {
        results[i] = r;
    }
    results
}
