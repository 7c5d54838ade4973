// SPDX-License-Identifier: Apache-2.0

//! Conflict-driven structural learning for stuck-at test generation.

pub mod diagnosis;
pub mod engine;
pub mod fault;
pub mod learning;
pub mod logic5;
pub mod netlist;
pub mod oracle;
pub mod report;
pub mod satbridge;
