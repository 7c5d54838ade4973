// SPDX-License-Identifier: Apache-2.0

//! Text artifacts of a run: patterns, per-fault statistics and the coverage
//! summary.

use std::fmt::Write;

use thiserror::Error;

use crate::engine::EngineConfig;
use crate::fault::{AtpgResult, CoverageReport, Fault, FaultError};
use crate::netlist::Circuit;
use crate::oracle::Pattern;

pub const STATS_HEADER: &str = "fault,status,decisions,backtracks,conflicts,learnt_count,micros";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Fault {
        line: usize,
        #[source]
        source: FaultError,
    },
}

/// `# key=value` lines recording the run settings.
pub fn config_header(mode: &str, config: &EngineConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# mode={mode}");
    let _ = writeln!(out, "# abort_limit={}", config.backtrack_limit);
    let _ = writeln!(out, "# stage1_limit={}", config.stage1_limit);
    let _ = writeln!(out, "# stage2_limit={}", config.stage2_limit);
    let _ = writeln!(out, "# vsids_decay={}", config.vsids.decay);
    let _ = writeln!(out, "# vsids_prob={}", config.vsids.pick_probability);
    let forget = if config.forget_n == u64::MAX {
        "inf".to_string()
    } else {
        config.forget_n.to_string()
    };
    let _ = writeln!(out, "# forget_n={forget}");
    let _ = writeln!(out, "# seed={}", config.rng_seed);
    out
}

/// One `name/p : vector` line per testable fault.
pub fn write_patterns(circuit: &Circuit, results: &[AtpgResult], header: &str) -> String {
    let mut out = String::from(header);
    let names: Vec<&str> = circuit.primary_inputs().iter().map(|&p| circuit.name(p)).collect();
    let _ = writeln!(out, "# pis: {}", names.join(" "));
    for r in results {
        if let Some(p) = r.status.pattern() {
            let _ = writeln!(out, "{} : {}", r.fault.label(circuit), p);
        }
    }
    out
}

pub fn parse_patterns(circuit: &Circuit, text: &str) -> Result<Vec<(Fault, Pattern)>, ReportError> {
    let mut out = Vec::new();
    let n = circuit.primary_inputs().len();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let (f, p) = body.split_once(':').ok_or_else(|| ReportError::Syntax {
            line,
            message: "expected 'fault : pattern'".into(),
        })?;
        let fault = Fault::parse(circuit, f).map_err(|source| ReportError::Fault { line, source })?;
        let pattern: Pattern = p.parse().map_err(|e| ReportError::Syntax {
            line,
            message: format!("{e}"),
        })?;
        if pattern.len() != n {
            return Err(ReportError::Syntax {
                line,
                message: format!("pattern has {} values, circuit has {n} inputs", pattern.len()),
            });
        }
        out.push((fault, pattern));
    }
    Ok(out)
}

/// Stats CSV. Without `timing` the micros column is written as 0 so that
/// repeated runs compare byte for byte.
pub fn write_stats_csv(circuit: &Circuit, results: &[AtpgResult], timing: bool) -> String {
    let mut out = String::from(STATS_HEADER);
    out.push('\n');
    for r in results {
        let s = &r.stats;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.fault.label(circuit),
            r.status.label(),
            s.decisions,
            s.backtracks,
            s.conflicts,
            s.learnt_count,
            if timing { s.micros } else { 0 }
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatsRow {
    pub fault: Fault,
    pub status: String,
    pub backtracks: u64,
}

pub fn parse_stats_csv(circuit: &Circuit, text: &str) -> Result<Vec<StatsRow>, ReportError> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') || body == STATS_HEADER {
            continue;
        }
        let cols: Vec<&str> = body.split(',').collect();
        if cols.len() != 7 {
            return Err(ReportError::Syntax {
                line,
                message: format!("expected 7 columns, found {}", cols.len()),
            });
        }
        let fault = Fault::parse(circuit, cols[0]).map_err(|source| ReportError::Fault { line, source })?;
        let status = cols[1].to_string();
        if !matches!(status.as_str(), "TESTABLE" | "UNTESTABLE" | "ABORTED") {
            return Err(ReportError::Syntax {
                line,
                message: format!("unknown status '{status}'"),
            });
        }
        let backtracks = cols[3].parse().map_err(|_| ReportError::Syntax {
            line,
            message: "bad backtrack count".into(),
        })?;
        rows.push(StatsRow {
            fault,
            status,
            backtracks,
        });
    }
    Ok(rows)
}

pub fn coverage_summary(report: &CoverageReport, header: &str) -> String {
    let mut out = String::from(header);
    let _ = writeln!(out, "n_total={}", report.n_total);
    let _ = writeln!(out, "n_testable={}", report.n_testable);
    let _ = writeln!(out, "n_untestable={}", report.n_untestable);
    let _ = writeln!(out, "n_aborted={}", report.n_aborted);
    let _ = writeln!(out, "fault_coverage={:.6}", report.fault_coverage);
    let _ = writeln!(out, "test_coverage={:.6}", report.test_coverage());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fault::{Stats, Status};
    use crate::netlist::parse_bench;

    #[test]
    fn round_trips() {
        let c = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)").unwrap();
        let y = c.find("y").unwrap();
        let results = vec![
            AtpgResult {
                fault: Fault::sa0(y),
                status: Status::Testable("11".parse().unwrap()),
                stats: Stats { decisions: 2, micros: 9, ..Stats::default() },
            },
            AtpgResult {
                fault: Fault::sa1(y),
                status: Status::Aborted,
                stats: Stats::default(),
            },
        ];
        let text = write_patterns(&c, &results, "");
        assert!(text.contains("y/0 : 11\n"));
        let parsed = parse_patterns(&c, &text).unwrap();
        assert_eq!(parsed, vec![(Fault::sa0(y), "11".parse().unwrap())]);

        let csv = write_stats_csv(&c, &results, false);
        assert!(csv.contains("y/0,TESTABLE,2,0,0,0,0\n"));
        assert!(write_stats_csv(&c, &results, true).contains(",9\n"));
        let rows = parse_stats_csv(&c, &csv).unwrap();
        assert_eq!(rows[1].status, "ABORTED");
        assert!(parse_patterns(&c, "y/0 : 1\n").is_err());
        assert!(parse_stats_csv(&c, "y/0,MAYBE,0,0,0,0,0").is_err());
    }
}
