use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde_json::Value;
use telegate::scenario::{
    exit_code, run, sweep, verify, write_csv, Mode, RunReport, RunStatus, Scenario, VerifyOptions,
};

#[derive(Parser)]
#[command(name = "telegate", version, about = "Teleportation-based two-qubit gate simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its JSON report.
    Run {
        scenario: PathBuf,
        #[command(flatten)]
        exec: ExecFlags,
        #[command(flatten)]
        out: OutFlags,
        /// Omit the `generated_unix` field.
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Run the oracle and invariant suites.
    Verify {
        /// Smaller samples, no sweeps.
        #[arg(long)]
        quick: bool,
        /// Directory with replacement printed correction tables.
        #[arg(long)]
        assets: Option<PathBuf>,
        #[command(flatten)]
        out: OutFlags,
    },
    /// Run a scenario once per parameter value and write a CSV table.
    Sweep {
        scenario: PathBuf,
        /// Dotted parameter path, e.g. `noise.overlap.resource`.
        #[arg(long)]
        axis: String,
        /// Comma-separated values, each read as JSON.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        #[command(flatten)]
        exec: ExecFlags,
        #[command(flatten)]
        out: OutFlags,
    },
}

#[derive(Args)]
struct ExecFlags {
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Sample this many shots per setting.
    #[arg(long, conflicts_with = "exact")]
    shots: Option<u64>,
    /// Exact enumeration, overriding the scenario mode.
    #[arg(long)]
    exact: bool,
}

#[derive(Args)]
struct OutFlags {
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// No summary on stderr.
    #[arg(long)]
    quiet: bool,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<telegate::Error> for Failure {
    fn from(e: telegate::Error) -> Self {
        Failure {
            code: exit_code(&e) as u8,
            message: e.to_string(),
        }
    }
}

fn load(path: &Path, exec: &ExecFlags) -> Result<Scenario, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })?;
    let mut s = Scenario::from_json(&text).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })?;
    if let Some(seed) = exec.seed {
        s.seed = Some(seed);
    }
    if let Some(n) = exec.shots {
        s.mode = Mode::Shots(n);
    }
    if exec.exact {
        s.mode = Mode::Exact;
    }
    s.validate().map_err(|(key, e)| Failure {
        code: 2,
        message: format!("{}: {key}: {e}", path.display()),
    })?;
    Ok(s)
}

fn emit(out: &OutFlags, bytes: &[u8]) -> Result<(), Failure> {
    let io = |e: io::Error| Failure {
        code: 4,
        message: format!("writing output: {e}"),
    };
    match &out.out {
        Some(p) => fs::write(p, bytes).map_err(io),
        None => io::stdout().write_all(bytes).map_err(io),
    }
}

fn summary(r: &RunReport) -> String {
    let mut parts = vec![format!("model {:?}", r.model).to_lowercase()];
    for (k, v) in &r.metrics.classical {
        parts.push(format!("{k} = {v}"));
    }
    if let Some(e) = &r.metrics.entangling {
        parts.push(format!("entangling F = {}", e.fidelity));
    }
    if let Some(b) = &r.metrics.bounds {
        parts.push(format!("process in [{}, {}]", b.process.lower, b.process.upper));
    }
    if let Some(p) = &r.metrics.parallelism {
        parts.push(format!(
            "parallelism {} ({})",
            p.value,
            if p.pass { "pass" } else { "fail" }
        ));
    }
    if let Some(x) = &r.metrics.resource {
        parts.push(format!("resource F = {}", x.fidelity));
    }
    parts.join(", ")
}

fn cmd_run(path: &Path, exec: &ExecFlags, out: &OutFlags, no_timestamp: bool) -> Result<u8, Failure> {
    let s = load(path, exec)?;
    let mut report = run(&s)?;
    if !no_timestamp {
        report.generated_unix = SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs());
    }
    let mut json = report.to_json();
    json.push('\n');
    emit(out, json.as_bytes())?;
    let violations = report.violations();
    if !out.quiet {
        eprintln!("{}", summary(&report));
        for v in &violations {
            eprintln!("invariant violated: {v}");
        }
    }
    Ok(if !violations.is_empty() {
        4
    } else if report.status == RunStatus::ZeroAcceptance {
        if !out.quiet {
            eprintln!("zero acceptance in at least one setting");
        }
        3
    } else {
        0
    })
}

fn cmd_verify(quick: bool, assets: Option<PathBuf>, out: &OutFlags) -> Result<u8, Failure> {
    let summary = verify(&VerifyOptions {
        quick,
        assets_dir: assets,
    });
    let mut text = String::new();
    for c in &summary.checks {
        text += &format!(
            "{} {:<26} {:>7.2}s  {}\n",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.seconds,
            c.detail
        );
    }
    let passed = summary.checks.iter().filter(|c| c.pass).count();
    text += &format!("{passed}/{} checks passed\n", summary.checks.len());
    match &out.out {
        Some(p) => {
            let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
            fs::write(p, json + "\n").map_err(|e| Failure {
                code: 4,
                message: format!("writing output: {e}"),
            })?;
            if !out.quiet {
                print!("{text}");
            }
        }
        None if !out.quiet || !summary.passed() => print!("{text}"),
        None => {}
    }
    Ok(if summary.passed() { 0 } else { 4 })
}

fn parse_value(raw: &str) -> Value {
    serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()))
}

fn cmd_sweep(path: &Path, axis: &str, values: &[String], exec: &ExecFlags, out: &OutFlags) -> Result<u8, Failure> {
    let s = load(path, exec)?;
    let values: Vec<Value> = values.iter().map(|v| parse_value(v)).collect();
    let points = sweep(&s, axis, &values)?;
    let mut buf = Vec::new();
    write_csv(&mut buf, axis, &points)?;
    emit(out, &buf)?;
    let zero = points.iter().any(|p| p.report.status == RunStatus::ZeroAcceptance);
    if !out.quiet {
        eprintln!("{} sweep points over {axis}", points.len());
    }
    Ok(if zero { 3 } else { 0 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run {
            scenario,
            exec,
            out,
            no_timestamp,
        } => cmd_run(scenario, exec, out, *no_timestamp),
        Command::Verify { quick, assets, out } => cmd_verify(*quick, assets.clone(), out),
        Command::Sweep {
            scenario,
            axis,
            values,
            exec,
            out,
        } => cmd_sweep(scenario, axis, values, exec, out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
