// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ptfriction::asymptotics::{
    classical_force_asymptote, classical_slip_time, classify, lz_threshold, quantum_force_asymptote,
    two_level_bound, well_depth, QuantumAsymptote,
};
use ptfriction::config::{load_config, ConfigFile};
use ptfriction::output::{emit, format_sig9};
use ptfriction::special::solve_u_eta;
use ptfriction::sweep::{resolve_workers, run_single, run_sweep, SweepResult};
use ptfriction::{validate, DimensionlessConfig, Error, Formalism};

const EXIT_SWEEP_FAILED: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Parser)]
#[command(name = "ptfriction", version, about = "Quantum and classical Prandtl-Tomlinson friction simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a single parameter point.
    Run(RunArgs),
    /// Run the sweep described in a config file.
    Sweep(RunArgs),
    /// Print closed-form reference values.
    Oracle(OracleArgs),
    /// Run the built-in invariant checks.
    Validate,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormalismArg {
    Quantum,
    Classical,
    Both,
}

impl FormalismArg {
    fn expand(self) -> Vec<Formalism> {
        match self {
            FormalismArg::Quantum => vec![Formalism::Quantum],
            FormalismArg::Classical => vec![Formalism::Classical],
            FormalismArg::Both => vec![Formalism::Quantum, Formalism::Classical],
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; falls back to PT_FRICTION_WORKERS, then all cores.
    #[arg(long)]
    workers: Option<usize>,
    /// Also write per-row trajectory CSVs.
    #[arg(long)]
    traj: bool,
    #[arg(long, value_enum)]
    formalism: Option<FormalismArg>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    lambda_bar: Option<f64>,
    #[arg(long)]
    omega_t: Option<f64>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) => EXIT_IO,
            _ => EXIT_CONFIG,
        };
        Failure { code, message: e.to_string() }
    }
}

fn read_config(path: Option<&Path>) -> Result<ConfigFile, Failure> {
    match path {
        Some(p) => Ok(load_config(p)?),
        None => Ok(ptfriction::config::parse_config("")?),
    }
}

fn formalisms(args: &RunArgs, file: &ConfigFile) -> Vec<Formalism> {
    args.formalism
        .map(FormalismArg::expand)
        .or_else(|| file.formalisms.clone())
        .unwrap_or_else(|| vec![Formalism::Quantum, Formalism::Classical])
}

fn print_rows(result: &SweepResult) {
    for row in &result.points {
        let show = |x: Option<f64>| x.map(format_sig9).unwrap_or_else(|| "-".into());
        println!(
            "{}={} {:9} F_max/F0={} P0_min={} SL_max={} [{}] {}",
            result.swept_param,
            format_sig9(row.swept_value),
            row.formalism.as_str(),
            show(row.f_max_over_f0),
            show(row.p0_min),
            show(row.sl_max),
            row.regime.as_str(),
            row.status.label()
        );
    }
}

fn finish(result: &SweepResult, out: &Path) -> Result<(), Failure> {
    print_rows(result);
    let files = emit(result, out)?;
    println!("wrote {} and {}", files.csv.display(), files.json.display());
    for t in &files.trajectories {
        println!("wrote {}", t.display());
    }
    if result.failure_threshold_exceeded() {
        return Err(Failure {
            code: EXIT_SWEEP_FAILED,
            message: format!("{} of {} points failed", result.failed_points, result.total_points),
        });
    }
    Ok(())
}

fn cmd_run(args: &RunArgs) -> Result<(), Failure> {
    let file = read_config(args.config.as_deref())?;
    let mut cfg = file.point.clone();
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let kinds = formalisms(args, &file);
    let workers = resolve_workers(args.workers);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| Failure {
        code: EXIT_CONFIG,
        message: e.to_string(),
    })?;
    let result = pool.install(|| run_single(&cfg, &kinds, args.traj));
    finish(&result, &args.out)
}

fn cmd_sweep(args: &RunArgs) -> Result<(), Failure> {
    let Some(path) = args.config.as_deref() else {
        return Err(Failure { code: EXIT_CONFIG, message: "sweep requires --config".into() });
    };
    let file = read_config(Some(path))?;
    let Some(mut spec) = file.sweep.clone() else {
        return Err(Failure { code: EXIT_CONFIG, message: format!("{} has no sweep_kind", path.display()) });
    };
    if let Some(seed) = args.seed {
        spec.base.seed = seed;
    }
    if let Some(f) = args.formalism {
        spec.formalisms = f.expand();
    }
    let result = run_sweep(&spec, resolve_workers(args.workers), args.traj)?;
    finish(&result, &args.out)
}

fn cmd_oracle(args: &OracleArgs) -> Result<(), Failure> {
    let file = read_config(args.config.as_deref())?;
    let cfg = DimensionlessConfig {
        eta: args.eta.unwrap_or(file.point.eta),
        lambda_bar: args.lambda_bar.unwrap_or(file.point.lambda_bar),
        omega_t: args.omega_t.unwrap_or(file.point.omega_t),
        ..file.point
    };
    cfg.validate()?;
    let (eta, lb, wt) = (cfg.eta, cfg.lambda_bar, cfg.omega_t);
    let opt = |r: ptfriction::Result<f64>| r.map(format_sig9).unwrap_or_else(|e| format!("n/a ({e})"));
    println!("eta = {}, lambda_bar = {}, Omega T = {}", format_sig9(eta), format_sig9(lb), format_sig9(wt));
    println!("regime                     {}", classify(eta).regime.as_str());
    println!("u0 = U0 / hbar Omega       {}", format_sig9(cfg.u0()));
    println!("classical F_max / F0       {}", opt(classical_force_asymptote(eta, wt)));
    match quantum_force_asymptote(eta, lb, wt)? {
        QuantumAsymptote::Value(v) => println!("quantum F_max / F0         {}", format_sig9(v)),
        QuantumAsymptote::UpperBound(v) => println!("quantum F_max / F0         < {}", format_sig9(v)),
    }
    println!("two-level bound            {}", format_sig9(two_level_bound(eta, lb, wt)));
    println!("classical slip time / T    {}", opt(classical_slip_time(eta)));
    println!("u (u = eta sin u)          {}", opt(solve_u_eta(eta)));
    println!("well depth / hbar Omega    {}", opt(well_depth(eta, lb)));
    println!("level-in-well threshold    {}", opt(lz_threshold(eta)));
    Ok(())
}

fn cmd_validate() -> Result<(), Failure> {
    let checks = validate::run_all();
    let failed = checks.iter().filter(|c| !c.passed).count();
    for c in &checks {
        println!("{} {:28} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if failed > 0 {
        return Err(Failure { code: EXIT_SWEEP_FAILED, message: format!("{failed} check(s) failed") });
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Validate => cmd_validate(),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
