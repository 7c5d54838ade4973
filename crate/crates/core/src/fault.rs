// SPDX-License-Identifier: Apache-2.0

//! Single stuck-at faults, per-fault outcomes and coverage bookkeeping.

use std::fmt::Write;

use thiserror::Error;

use crate::logic5::Value5;
use crate::netlist::{Circuit, GateId};
use crate::oracle::Pattern;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Sa0,
    Sa1,
}

impl Polarity {
    pub fn stuck_value(self) -> bool {
        self == Polarity::Sa1
    }

    pub fn digit(self) -> char {
        match self {
            Polarity::Sa0 => '0',
            Polarity::Sa1 => '1',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fault {
    pub site: GateId,
    pub polarity: Polarity,
}

impl Fault {
    pub fn new(site: GateId, polarity: Polarity) -> Fault {
        Fault { site, polarity }
    }

    pub fn sa0(site: GateId) -> Fault {
        Fault::new(site, Polarity::Sa0)
    }

    pub fn sa1(site: GateId) -> Fault {
        Fault::new(site, Polarity::Sa1)
    }

    /// Value the site carries once the fault is excited: D for stuck-at-0,
    /// D̄ for stuck-at-1.
    pub fn activation_value(self) -> Value5 {
        match self.polarity {
            Polarity::Sa0 => Value5::D,
            Polarity::Sa1 => Value5::Dbar,
        }
    }

    /// `name/0` or `name/1`.
    pub fn label(self, circuit: &Circuit) -> String {
        format!("{}/{}", circuit.name(self.site), self.polarity.digit())
    }

    pub fn parse(circuit: &Circuit, text: &str) -> Result<Fault, FaultError> {
        let text = text.trim();
        let (name, pol) = text
            .rsplit_once('/')
            .ok_or_else(|| FaultError::Syntax(text.to_string()))?;
        let polarity = match pol.trim() {
            "0" => Polarity::Sa0,
            "1" => Polarity::Sa1,
            _ => return Err(FaultError::Syntax(text.to_string())),
        };
        let site = circuit
            .find(name.trim())
            .ok_or_else(|| FaultError::UnknownNet(name.trim().to_string()))?;
        Ok(Fault { site, polarity })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FaultError {
    #[error("malformed fault '{0}', expected name/0 or name/1")]
    Syntax(String),
    #[error("fault refers to unknown net '{0}'")]
    UnknownNet(String),
    #[error("line {line}: {source}")]
    Line {
        line: usize,
        #[source]
        source: Box<FaultError>,
    },
    #[error("coverage of an empty result list")]
    EmptyInput,
}

/// Both polarities on every net, in gate id order.
pub fn enumerate_faults(circuit: &Circuit) -> Vec<Fault> {
    circuit
        .nets()
        .flat_map(|g| [Fault::sa0(g), Fault::sa1(g)])
        .collect()
}

/// Reads a fault list: one `name/0` or `name/1` per line, `#` comments.
pub fn parse_fault_list(circuit: &Circuit, text: &str) -> Result<Vec<Fault>, FaultError> {
    let mut faults = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fault = Fault::parse(circuit, line).map_err(|e| FaultError::Line {
            line: idx + 1,
            source: Box::new(e),
        })?;
        faults.push(fault);
    }
    Ok(faults)
}

pub fn write_fault_list(circuit: &Circuit, faults: &[Fault]) -> String {
    let mut out = String::new();
    for f in faults {
        let _ = writeln!(out, "{}", f.label(circuit));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Testable(Pattern),
    Untestable,
    Aborted,
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Testable(_) => "TESTABLE",
            Status::Untestable => "UNTESTABLE",
            Status::Aborted => "ABORTED",
        }
    }

    pub fn is_testable(&self) -> bool {
        matches!(self, Status::Testable(_))
    }

    pub fn pattern(&self) -> Option<&Pattern> {
        match self {
            Status::Testable(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub decisions: u64,
    pub backtracks: u64,
    pub conflicts: u64,
    pub learnt_count: u64,
    /// Wall-clock time spent on the fault.
    pub micros: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtpgResult {
    pub fault: Fault,
    pub status: Status,
    pub stats: Stats,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageReport {
    pub n_total: usize,
    pub n_testable: usize,
    pub n_untestable: usize,
    pub n_aborted: usize,
    pub fault_coverage: f64,
}

impl CoverageReport {
    /// Testable over everything not proven untestable. Auxiliary metric; 1.0
    /// when every fault is untestable.
    pub fn test_coverage(&self) -> f64 {
        let denom = self.n_total - self.n_untestable;
        if denom == 0 {
            1.0
        } else {
            self.n_testable as f64 / denom as f64
        }
    }
}

pub fn coverage(results: &[AtpgResult]) -> Result<CoverageReport, FaultError> {
    if results.is_empty() {
        return Err(FaultError::EmptyInput);
    }
    let mut report = CoverageReport {
        n_total: results.len(),
        n_testable: 0,
        n_untestable: 0,
        n_aborted: 0,
        fault_coverage: 0.0,
    };
    for r in results {
        match r.status {
            Status::Testable(_) => report.n_testable += 1,
            Status::Untestable => report.n_untestable += 1,
            Status::Aborted => report.n_aborted += 1,
        }
    }
    report.fault_coverage = report.n_testable as f64 / report.n_total as f64;
    Ok(report)
}
