use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::{fs, io};

use clap::{Parser, Subcommand};
use serde::Deserialize;

use degseq::lab::{summary_json, write_csv};
use degseq::{collision_bound_check, run_plan, verify_identity_suite, with_threads, Error, Execution, ExperimentPlan, Model, ModelParams, Sampler, SamplerConfig};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "degseq", version, about = "Degree-sequence models of G(n, p): identity checks, samplers, decay experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every closed-form identity against exhaustive enumeration (n <= 5, k <= 2).
    Verify {
        #[arg(long)]
        n: usize,
        /// Number of graphs; a single --p value is shared by all of them.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Comma-separated edge probabilities.
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Execute a JSON plan file and write its CSV and JSON reports.
    Run {
        plan: PathBuf,
        /// Worker threads; results do not depend on it.
        #[arg(long, env = "DEGSEQ_THREADS")]
        threads: Option<usize>,
        /// Overrides the plan's CSV output path.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Overrides the plan's JSON output path.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Print sampled degree sequences, one per line.
    Sample {
        #[arg(long)]
        model: Model,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Output {
    csv: PathBuf,
    json: PathBuf,
}

/// A plan file: the experiment plus where its reports go. Relative output
/// paths resolve against the plan file's directory.
#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct PlanFile {
    plan: ExperimentPlan,
    output: Output,
    #[serde(default)]
    collision_bound: bool,
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn usage_or_io(e: Error) -> ExitCode {
    match e {
        Error::Io(_) => fail(EXIT_IO, e),
        _ => fail(EXIT_USAGE, e),
    }
}

fn verify(n: usize, k: usize, mut p: Vec<f64>, json: bool) -> ExitCode {
    if p.len() == 1 && k > 1 {
        p = vec![p[0]; k];
    }
    if p.len() != k {
        return fail(EXIT_USAGE, format!("{} probabilities given for k = {k}", p.len()));
    }
    let report = match ModelParams::new(n, p).and_then(|params| verify_identity_suite(&params)) {
        Ok(r) => r,
        Err(e) => return usage_or_io(e),
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("serialisable report"));
    } else {
        for c in &report.checks {
            let status = match (c.tolerance, c.passed()) {
                (None, _) => "INFO",
                (_, true) => "PASS",
                (_, false) => "FAIL",
            };
            let tol = c.tolerance.map_or_else(|| "-".to_string(), |t| format!("{t:e}"));
            println!("{status}  [{}] {}: max error {:e} (tolerance {tol})", c.statement, c.description, c.max_error);
        }
    }
    let failures: Vec<_> = report.failures().collect();
    if failures.is_empty() {
        return ExitCode::SUCCESS;
    }
    for c in failures {
        eprintln!("identity failed: [{}] {} at {}", c.statement, c.description, c.witness.as_deref().unwrap_or("?"));
    }
    ExitCode::from(EXIT_FAIL)
}

fn write_file(path: &Path, contents: &[u8]) -> io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)
}

fn run(plan_path: &Path, threads: Option<usize>, csv: Option<PathBuf>, json: Option<PathBuf>) -> ExitCode {
    let text = match fs::read_to_string(plan_path) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_IO, format!("{}: {e}", plan_path.display())),
    };
    let file: PlanFile = match serde_json::from_str(&text) {
        Ok(f) => f,
        Err(e) => return fail(EXIT_USAGE, format!("{}: {e}", plan_path.display())),
    };
    if let Err(e) = file.plan.validate() {
        return fail(EXIT_USAGE, e);
    }
    let base = plan_path.parent().unwrap_or(Path::new(""));
    let csv_path = csv.unwrap_or_else(|| base.join(&file.output.csv));
    let json_path = json.unwrap_or_else(|| base.join(&file.output.json));

    let outcome = with_threads(threads, || {
        let report = run_plan(&file.plan, Execution::default())?;
        let bound = if file.collision_bound { Some(collision_bound_check(&file.plan, Execution::default())?) } else { None };
        Ok::<_, Error>((report, bound))
    });
    let (report, bound) = match outcome {
        Ok(r) => r,
        Err(e) => return usage_or_io(e),
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let mut csv_bytes = Vec::new();
    write_csv(&report, &mut csv_bytes).expect("writing to memory");
    for (path, bytes) in [(&csv_path, csv_bytes), (&json_path, summary_json(&report, bound.as_ref()).into_bytes())] {
        if let Err(e) = write_file(path, &bytes) {
            return fail(EXIT_IO, format!("{}: {e}", path.display()));
        }
    }
    ExitCode::SUCCESS
}

fn sample(model: Model, n: usize, p: f64, count: u64, seed: u64) -> ExitCode {
    let sampler = match ModelParams::single(n, p).and_then(|params| Sampler::new(&SamplerConfig { seed, model, params })) {
        Ok(s) => s,
        Err(e) => return usage_or_io(e),
    };
    let mut out = String::new();
    for r in 0..count {
        out.push_str(&sampler.sample(0, r).to_string());
        out.push('\n');
        if out.len() > 1 << 16 {
            print!("{out}");
            out.clear();
        }
    }
    print!("{out}");
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Verify { n, k, p, json } => verify(n, k, p, json),
        Command::Run { plan, threads, csv, json } => run(&plan, threads, csv, json),
        Command::Sample { model, n, p, count, seed } => sample(model, n, p, count, seed),
    }
}
