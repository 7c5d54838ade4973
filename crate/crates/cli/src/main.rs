// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cdsl::diagnosis::{diagnose, diagnose_and_rerun, parse_constraints, DiagnosisError, PiConstraint};
use cdsl::engine::{run_faults, run_two_stage, EngineConfig, LearnMode, VsidsConfig};
use cdsl::fault::{coverage, enumerate_faults, parse_fault_list, Fault, Status};
use cdsl::netlist::{extract_cone, parse_bench, Circuit};
use cdsl::oracle::{constrained_witness, detects, Logic3};
use cdsl::report::{
    config_header, coverage_summary, parse_patterns, parse_stats_csv, write_patterns, write_stats_csv,
};
use cdsl::satbridge::{encode, timed_compare, write_dimacs, write_timing_csv};

#[derive(Parser)]
#[command(name = "cdsl", version, about = "Conflict-driven structural learning ATPG")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate tests, export CNF or time the SAT path.
    Run(RunArgs),
    /// Replay a previous run against the oracles.
    Verify(VerifyArgs),
    /// Explain aborted and untestable faults of a previous run.
    Diagnose(DiagnoseArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Plain,
    Cdsl,
    TwoStage,
    SatExport,
    Compare,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Plain => "plain",
            Mode::Cdsl => "cdsl",
            Mode::TwoStage => "two-stage",
            Mode::SatExport => "sat-export",
            Mode::Compare => "compare",
        }
    }
}

#[derive(Args, Clone)]
struct EngineArgs {
    /// Backtracks per fault before it is aborted.
    #[arg(long, default_value_t = 100)]
    abort_limit: u64,
    #[arg(long, default_value_t = 20)]
    stage1_limit: u64,
    #[arg(long, default_value_t = 100)]
    stage2_limit: u64,
    #[arg(long, default_value_t = 0.95)]
    vsids_decay: f64,
    /// Probability of taking the VSIDS choice at a decision.
    #[arg(long, default_value_t = 0.5)]
    vsids_prob: f64,
    /// Rounds an unused learnt constraint survives; 0 disables forgetting.
    #[arg(long, default_value_t = 1000)]
    forget_n: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also learn the decision-based constraint on every conflict.
    #[arg(long)]
    learn_both: bool,
    /// Decide on internal lines instead of tracing objectives to PIs.
    #[arg(long)]
    line_decisions: bool,
    /// Recheck frontiers and trail after every implication pass.
    #[arg(long)]
    check_invariants: bool,
}

impl EngineArgs {
    fn config(&self, learning: bool) -> Result<EngineConfig> {
        let config = EngineConfig {
            backtrack_limit: self.abort_limit,
            learning_enabled: learning,
            vsids: VsidsConfig {
                decay: self.vsids_decay,
                pick_probability: self.vsids_prob,
                ..VsidsConfig::default()
            },
            forget_n: if self.forget_n == 0 { u64::MAX } else { self.forget_n },
            rng_seed: self.seed,
            stage1_limit: self.stage1_limit,
            stage2_limit: self.stage2_limit,
            learn_mode: if self.learn_both { LearnMode::Both } else { LearnMode::UipOnly },
            line_decisions: self.line_decisions,
            check_invariants: self.check_invariants,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
struct Inputs {
    /// Circuit in .bench format.
    circuit: PathBuf,
    /// Fault list, one `net/0` or `net/1` per line. Default: every net, both polarities.
    #[arg(long)]
    faults: Option<PathBuf>,
    /// PI constraints, one `name=0|1` per line.
    #[arg(long)]
    constraints: Option<PathBuf>,
    /// Directory for reports.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long, value_enum, default_value = "cdsl")]
    mode: Mode,
    #[command(flatten)]
    engine: EngineArgs,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Write 0 in the micros column so reruns compare byte for byte.
    #[arg(long)]
    no_timing: bool,
    /// Timing repeats per fault in compare mode.
    #[arg(long, default_value_t = 5)]
    repeats: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    inputs: Inputs,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[command(flatten)]
    engine: EngineArgs,
    /// Gates kept from the frequency ranking.
    #[arg(long, default_value_t = 5)]
    top_k: usize,
    /// Rerun each fault with the suggested constraint edits.
    #[arg(long)]
    apply: bool,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn load_circuit(path: &Path) -> Result<Circuit> {
    parse_bench(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn load_faults(circuit: &Circuit, inputs: &Inputs) -> Result<Vec<Fault>> {
    match &inputs.faults {
        Some(p) => parse_fault_list(circuit, &read(p)?).with_context(|| format!("{}", p.display())),
        None => Ok(enumerate_faults(circuit)),
    }
}

fn load_constraints(circuit: &Circuit, inputs: &Inputs) -> Result<Vec<PiConstraint>> {
    match &inputs.constraints {
        Some(p) => parse_constraints(circuit, &read(p)?).with_context(|| format!("{}", p.display())),
        None => Ok(Vec::new()),
    }
}

fn cnf_name(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.' { c } else { '_' })
        .collect::<String>()
        + ".cnf"
}

fn cmd_run(args: RunArgs) -> Result<ExitCode> {
    let circuit = load_circuit(&args.inputs.circuit)?;
    let faults = load_faults(&circuit, &args.inputs)?;
    let constraints = load_constraints(&circuit, &args.inputs)?;
    let out = &args.inputs.out;
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let config = args.engine.config(args.mode != Mode::Plain)?;
    let header = config_header(args.mode.name(), &config);

    match args.mode {
        Mode::SatExport => {
            let dir = out.join("cnf");
            fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
            let mut written = 0;
            for &f in &faults {
                let Ok(cone) = extract_cone(&circuit, f.site) else {
                    continue;
                };
                let label = f.label(&circuit);
                write(&dir.join(cnf_name(&label)), &write_dimacs(&encode(&circuit, &cone, f)))?;
                written += 1;
            }
            println!("wrote {written} DIMACS files to {}", dir.display());
            return Ok(ExitCode::SUCCESS);
        }
        Mode::Compare => {
            if !constraints.is_empty() {
                bail!("compare mode does not take PI constraints");
            }
            let rows = timed_compare(&circuit, &faults, &config, args.repeats);
            write(&out.join("timing.csv"), &write_timing_csv(&circuit, &rows))?;
            let mut agree = 0;
            let mut decided = 0;
            for r in &rows {
                let sat_testable = r.sat;
                match r.engine {
                    Status::Aborted => {}
                    ref s => {
                        decided += 1;
                        if s.is_testable() == sat_testable {
                            agree += 1;
                        }
                    }
                }
            }
            println!("faults={} decided={decided} agree={agree}", rows.len());
            return Ok(ExitCode::SUCCESS);
        }
        _ => {}
    }

    let results = match args.mode {
        Mode::TwoStage => {
            config.validate_two_stage()?;
            run_two_stage(&circuit, &faults, &config, &constraints, args.jobs)
        }
        _ => run_faults(&circuit, &faults, &config, &constraints, args.jobs),
    };
    let report = coverage(&results)?;
    write(&out.join("patterns.txt"), &write_patterns(&circuit, &results, &header))?;
    write(&out.join("stats.csv"), &write_stats_csv(&circuit, &results, !args.no_timing))?;
    let summary = coverage_summary(&report, &header);
    write(&out.join("coverage.txt"), &summary)?;
    print!("{}", coverage_summary(&report, ""));
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let circuit = load_circuit(&args.inputs.circuit)?;
    let constraints = load_constraints(&circuit, &args.inputs)?;
    let pins: Vec<_> = constraints.iter().map(|c| (c.pi, c.value)).collect();
    let pat_path = args.inputs.out.join("patterns.txt");
    let stats_path = args.inputs.out.join("stats.csv");
    let patterns = parse_patterns(&circuit, &read(&pat_path)?).with_context(|| format!("{}", pat_path.display()))?;
    let rows = parse_stats_csv(&circuit, &read(&stats_path)?).with_context(|| format!("{}", stats_path.display()))?;

    let mut mismatches = Vec::new();
    let mut skipped = 0;
    let mut checked = 0;
    for (fault, pattern) in &patterns {
        checked += 1;
        let clash = constraints.iter().any(|c| {
            let pos = circuit.input_position(c.pi).expect("constraint on a PI");
            matches!(pattern.get(pos), Logic3::Zero | Logic3::One) && pattern.get(pos) != Logic3::from_bool(c.value)
        });
        if clash || !detects(&circuit, pattern, *fault) {
            mismatches.push(format!("{}: pattern {pattern} does not detect", fault.label(&circuit)));
        }
    }
    for row in &rows {
        let label = row.fault.label(&circuit);
        match row.status.as_str() {
            "TESTABLE" => {
                if !patterns.iter().any(|(f, _)| *f == row.fault) {
                    mismatches.push(format!("{label}: TESTABLE without a pattern"));
                }
            }
            "UNTESTABLE" => {
                let Ok(cone) = extract_cone(&circuit, row.fault.site) else {
                    checked += 1;
                    continue;
                };
                match constrained_witness(&circuit, &cone, row.fault, &pins) {
                    Ok(None) => checked += 1,
                    Ok(Some(p)) => {
                        checked += 1;
                        mismatches.push(format!("{label}: UNTESTABLE but {p} detects"));
                    }
                    Err(_) => {
                        skipped += 1;
                        println!("{label}: skipped (too large)");
                    }
                }
            }
            _ => {}
        }
    }
    for m in &mismatches {
        println!("MISMATCH {m}");
    }
    println!("checked={checked} skipped={skipped} mismatches={}", mismatches.len());
    Ok(if mismatches.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn cmd_diagnose(args: DiagnoseArgs) -> Result<ExitCode> {
    let circuit = load_circuit(&args.inputs.circuit)?;
    let constraints = load_constraints(&circuit, &args.inputs)?;
    let stats_path = args.inputs.out.join("stats.csv");
    if !stats_path.exists() {
        bail!("no previous run: {} not found", stats_path.display());
    }
    let rows = parse_stats_csv(&circuit, &read(&stats_path)?).with_context(|| format!("{}", stats_path.display()))?;
    let wanted = match &args.inputs.faults {
        Some(_) => Some(load_faults(&circuit, &args.inputs)?),
        None => None,
    };
    let config = args.engine.config(true)?;
    let mut reports = Vec::new();
    for row in rows {
        if row.status == "TESTABLE" {
            continue;
        }
        if let Some(w) = &wanted {
            if !w.contains(&row.fault) {
                continue;
            }
        }
        let label = row.fault.label(&circuit);
        let result = if args.apply {
            diagnose_and_rerun(&circuit, row.fault, &config, &constraints, args.top_k)
        } else {
            diagnose(&circuit, row.fault, &config, &constraints, args.top_k)
        };
        let entry = match result {
            Ok(r) => {
                let pis: Vec<String> = r
                    .implicated_pis
                    .iter()
                    .map(|p| format!("{}={} {}", circuit.name(p.pi), p.alpha.symbol(), p.suggestion.label()))
                    .collect();
                let after = r.rerun.as_ref().map(|x| x.status.label()).unwrap_or("-");
                println!("{label}: {} implicated [{}] rerun {after}", r.status_before.label(), pis.join(", "));
                r.to_json(&circuit)
            }
            Err(e @ (DiagnosisError::EmptyDb | DiagnosisError::NotFailing)) => {
                println!("{label}: {e}");
                json!({"fault": label, "status_before": row.status, "note": e.to_string()})
            }
            Err(e) => return Err(e.into()),
        };
        reports.push(entry);
    }
    let path = args.inputs.out.join("diagnosis.json");
    let text = serde_json::to_string_pretty(&Value::Array(reports))? + "\n";
    write(&path, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Diagnose(a) => cmd_diagnose(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
