use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use zekit::formats::{read_json, write_json, ChannelJson, CodeJson, ObservableJson, SystemJson};
use zekit::runs::{
    self, cn_probe, superactivate, sweep, two_shot_demo, round_trip, write_sweep_csv, Command, KLJson,
    ProbeAngle, RunConfig, SearchReportJson,
};
use zekit::{Error, Result, WorkerPool};
use zekit_core::chansynth::{synthesize, DEFAULT_EPS, DEFAULT_ETA};
use zekit_core::codesearch::DEFAULT_SEARCH_TOL;
use zekit_core::klcodes::{self, pi_certificate, verify_code, CodeCandidate, DEFAULT_KL_TOL};
use zekit_core::observables::{
    indistinguishable_check_with, positive_basis_with_scale, tensor_observables, Observable, DEFAULT_SAMPLES,
    DEFAULT_SCALE,
};
use zekit_core::opsys::{n_theta_tensor, OperatorSystem};
use zekit_core::{Angle, VERSION};

/// Operator systems, zero-error codes and superactivation experiments.
///
/// Angles are fractions of π: `--theta 1/3` means π/3.
#[derive(Parser)]
#[command(name = "zekit", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Clone)]
struct SearchArgs {
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_SEARCH_TOL)]
    tol: f64,
}

#[derive(Args, Clone)]
struct SystemSource {
    /// System JSON file.
    #[arg(long, conflicts_with = "theta")]
    system: Option<PathBuf>,
    /// Tensor factors 𝔑_θ, repeatable, as fractions of π.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_angle)]
    theta: Vec<Angle>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Channel whose graph is 𝔑_θ.
    Synthesize {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_angle)]
        theta: Angle,
        #[arg(long, default_value_t = DEFAULT_ETA)]
        eta: f64,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Knill–Laflamme check of a code against a system.
    Verify {
        #[command(flatten)]
        source: SystemSource,
        /// Code JSON file.
        #[arg(long, conflicts_with_all = ["product_code", "pi_certificate"])]
        code: Option<PathBuf>,
        /// Use the n-fold product code (|0..0> + i|1..1>, |2..2> + i|3..3>).
        #[arg(long, conflicts_with = "pi_certificate")]
        product_code: Option<usize>,
        /// Use the explicit certificate for 𝔑_π.
        #[arg(long)]
        pi_certificate: bool,
        #[arg(long, default_value_t = DEFAULT_KL_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Multi-start feasibility search.
    Search {
        #[command(flatten)]
        source: SystemSource,
        #[command(flatten)]
        search: SearchArgs,
        /// Code dimension.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pair floors over a grid of angle pairs, as CSV.
    Sweep {
        /// Comma-separated fractions of π.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',', value_parser = parse_angle, required = true)]
        theta1_grid: Vec<Angle>,
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',', value_parser = parse_angle, required = true)]
        theta2_grid: Vec<Angle>,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Single, pair and tripartite evidence for three angles summing to π.
    Superactivate {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_angle, value_delimiter = ',', required = true)]
        theta: Vec<Angle>,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Positive-operator basis of 𝔑_θ (tensored when --theta repeats).
    Observable {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_angle, required = true)]
        theta: Vec<Angle>,
        #[arg(long, default_value_t = DEFAULT_SCALE)]
        scale: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Indistinguishability of a subspace under an observable.
    Indist {
        #[arg(long)]
        obs: PathBuf,
        #[arg(long)]
        code: PathBuf,
        #[arg(long, default_value_t = DEFAULT_KL_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes 𝔑_{θ₁} ⊗ … as system JSON.
    System {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_angle, required = true)]
        theta: Vec<Angle>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Four-fold code and two-fold floors for θ₁ + θ₂ = π/2.
    TwoShot {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_angle, value_delimiter = ',', required = true)]
        theta: Vec<Angle>,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search floor of an n-fold product (n ≤ 3) with angle-sum flags.
    CnProbe {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_angle)]
        theta: Vec<Angle>,
        /// Angles in radians, bypassing exact fractions.
        #[arg(long, allow_hyphen_values = true)]
        theta_raw: Vec<f64>,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_angle(s: &str) -> std::result::Result<Angle, String> {
    s.parse().map_err(|e: zekit_core::Error| e.to_string())
}

fn load_system(source: &SystemSource) -> Result<OperatorSystem> {
    match (&source.system, source.theta.is_empty()) {
        (Some(path), _) => OperatorSystem::try_from(&read_json::<SystemJson>(path)?),
        (None, false) => Ok(n_theta_tensor(&source.theta)?),
        (None, true) => Err(Error::Config(String::from("give --system or at least one --theta"))),
    }
}

fn require_count(thetas: &[Angle], n: usize) -> Result<()> {
    if thetas.len() != n {
        return Err(Error::Config(format!("expected {n} angles, got {}", thetas.len())));
    }
    Ok(())
}

fn config(command: Command, thetas: Vec<Angle>, s: &SearchArgs, out: &Option<PathBuf>) -> Result<RunConfig> {
    RunConfig::new(command, thetas, s.restarts, s.seed, s.tol, out.clone())
}

#[derive(Serialize)]
struct SynthesisSummary {
    version: String,
    check: runs::ChannelCheck,
    channel: ChannelJson,
}

#[derive(Serialize)]
struct VerifySummary {
    version: String,
    ambient_dim: usize,
    system_dim: usize,
    code_dim: usize,
    report: KLJson,
}

#[derive(Serialize)]
struct IndistSummary {
    version: String,
    kl: KLJson,
    tv_spread: f64,
    samples: usize,
    seed: u64,
    pass: bool,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Cmd::Synthesize { theta, eta, eps, out } => {
            let ch = synthesize(&zekit_core::opsys::n_theta(theta), eta, eps)?;
            let check = round_trip(theta, &ch)?;
            let summary = SynthesisSummary { version: VERSION.to_string(), check, channel: ChannelJson::from(&ch) };
            write_json(&summary, out.as_deref())
        }
        Cmd::Verify { source, code, product_code, pi_certificate: pi, tol, out } => {
            let l = load_system(&source)?;
            let code = match (code, product_code, pi) {
                (Some(path), _, _) => CodeCandidate::try_from(&read_json::<CodeJson>(&path)?)?,
                (None, Some(n), _) => klcodes::product_code(n)?,
                (None, None, true) => pi_certificate(),
                (None, None, false) => {
                    return Err(Error::Config(String::from("give --code, --product-code or --pi-certificate")))
                }
            };
            let r = verify_code(&l, &code, tol)?;
            let summary = VerifySummary {
                version: VERSION.to_string(),
                ambient_dim: l.ambient_dim(),
                system_dim: l.dim(),
                code_dim: code.len(),
                report: KLJson::from(&r),
            };
            write_json(&summary, out.as_deref())
        }
        Cmd::Search { source, search, dim, out } => {
            let cfg = config(Command::Search, source.theta.clone(), &search, &out)?;
            let l = load_system(&source)?;
            let pool = WorkerPool::from_env()?;
            let r = pool.search(&l, dim, cfg.restarts, cfg.seed, cfg.tol)?;
            write_json(&SearchReportJson::new(&l, &r), cfg.out_path.as_deref())
        }
        Cmd::Sweep { theta1_grid, theta2_grid, search, out } => {
            let cfg = config(Command::Sweep, vec![], &search, &out)?;
            let pool = WorkerPool::from_env()?;
            let result = sweep(&pool, &theta1_grid, &theta2_grid, cfg.restarts, cfg.seed, cfg.tol)?;
            eprintln!(
                "calibration threshold {:e} (100 x {:e} on theta = 1)",
                result.calibration.threshold, result.calibration.max_converged_objective
            );
            match cfg.out_path.as_deref() {
                Some(p) => {
                    let f = File::create(p).map_err(|e| Error::Io(p.display().to_string(), e))?;
                    write_sweep_csv(&result.rows, BufWriter::new(f))
                }
                None => write_sweep_csv(&result.rows, std::io::stdout().lock()),
            }
        }
        Cmd::Superactivate { theta, search, out } => {
            let cfg = config(Command::Superactivate, theta, &search, &out)?;
            require_count(&cfg.thetas, 3)?;
            let pool = WorkerPool::from_env()?;
            let thetas = [cfg.thetas[0], cfg.thetas[1], cfg.thetas[2]];
            let report = superactivate(&pool, thetas, cfg.restarts, cfg.seed, cfg.tol)?;
            write_json(&report, cfg.out_path.as_deref())
        }
        Cmd::Observable { theta, scale, out } => {
            let factors = theta
                .iter()
                .map(|&t| positive_basis_with_scale(&zekit_core::opsys::n_theta(t), scale))
                .collect::<zekit_core::Result<Vec<Observable>>>()?;
            let obs = if factors.len() == 1 { factors.into_iter().next().expect("one factor") } else { tensor_observables(&factors)? };
            write_json(&ObservableJson::from(&obs), out.as_deref())
        }
        Cmd::Indist { obs, code, tol, samples, seed, out } => {
            let o = Observable::try_from(&read_json::<ObservableJson>(&obs)?)?;
            let c = CodeCandidate::try_from(&read_json::<CodeJson>(&code)?)?;
            let r = indistinguishable_check_with(&o, &c, tol, samples, seed)?;
            let summary = IndistSummary {
                version: VERSION.to_string(),
                kl: KLJson::from(&r.kl),
                tv_spread: r.tv_spread,
                samples: r.samples,
                seed: r.seed,
                pass: r.pass,
            };
            write_json(&summary, out.as_deref())
        }
        Cmd::System { theta, out } => write_json(&SystemJson::from(&n_theta_tensor(&theta)?), out.as_deref()),
        Cmd::TwoShot { theta, search, out } => {
            let cfg = config(Command::TwoShot, theta, &search, &out)?;
            require_count(&cfg.thetas, 2)?;
            let pool = WorkerPool::from_env()?;
            let report = two_shot_demo(&pool, cfg.thetas[0], cfg.thetas[1], cfg.restarts, cfg.seed, cfg.tol)?;
            write_json(&report, cfg.out_path.as_deref())
        }
        Cmd::CnProbe { theta, theta_raw, search, out } => {
            let cfg = config(Command::CnProbe, theta.clone(), &search, &out)?;
            let pool = WorkerPool::from_env()?;
            let angles: Vec<ProbeAngle> =
                theta.into_iter().map(ProbeAngle::Exact).chain(theta_raw.into_iter().map(ProbeAngle::Raw)).collect();
            let report = cn_probe(&pool, &angles, cfg.restarts, cfg.seed, cfg.tol)?;
            write_json(&report, cfg.out_path.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("zekit: {e}");
            ExitCode::FAILURE
        }
    }
}
