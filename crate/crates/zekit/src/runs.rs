//! End-to-end runs and their JSON/CSV reports. Reports carry no timestamps or
//! thread counts, so identical inputs give byte-identical output.

use std::io::Write;
use std::path::PathBuf;

use num_rational::Ratio;
use serde::Serialize;
use zekit_core::chansynth::{graph_distance, Channel, graph_of, synthesize, DEFAULT_EPS, DEFAULT_ETA};
use zekit_core::codesearch::FeasibilityReport;
use zekit_core::klcodes::{product_code, verify_code, KLReport};
use zekit_core::opsys::{n_theta, n_theta_radians, n_theta_tensor, tensor_all, OperatorSystem};
use zekit_core::{Angle, VERSION};

use crate::formats::CodeJson;
use crate::{Error, Result, WorkerPool};

/// Tolerance for the analytic codes (tripartite and four-fold).
pub const EXACT_KL_TOL: f64 = 1e-12;
/// Restarts of the feasible baseline run on `𝔑_π`.
pub const CALIBRATION_RESTARTS: usize = 16;
/// Multiple of the largest converged baseline objective used as the threshold.
pub const CALIBRATION_FACTOR: f64 = 100.0;
/// Largest tensor power accepted by [`cn_probe`].
pub const MAX_PROBE_FACTORS: usize = 3;
const TP_TOL: f64 = 1e-9;
const GRAPH_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Synthesize,
    Verify,
    Search,
    Sweep,
    Superactivate,
    Observable,
    Indist,
    System,
    TwoShot,
    CnProbe,
}

/// Parameters shared by the subcommands.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub thetas: Vec<Angle>,
    pub restarts: usize,
    pub seed: u64,
    pub tol: f64,
    pub out_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(
        command: Command,
        thetas: Vec<Angle>,
        restarts: usize,
        seed: u64,
        tol: f64,
        out_path: Option<PathBuf>,
    ) -> Result<Self> {
        if restarts < 1 {
            return Err(Error::Config(String::from("restarts must be at least 1")));
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Config(format!("tol must be positive, got {tol}")));
        }
        Ok(Self { command, thetas, restarts, seed, tol, out_path })
    }
}

fn fractions(thetas: &[Angle]) -> Vec<String> {
    thetas.iter().map(Angle::to_string).collect()
}

/// Exact sum of the angles as a fraction of π, without reduction mod 2.
fn exact_sum(thetas: &[Angle]) -> Ratio<i64> {
    thetas.iter().map(|t| Ratio::new(t.numerator(), t.denominator())).sum()
}

fn require_sum(thetas: &[Angle], expected: Ratio<i64>) -> Result<()> {
    let found = exact_sum(thetas);
    if found != expected {
        return Err(zekit_core::Error::AngleSumMismatch { expected: expected.to_string(), found: found.to_string() }.into());
    }
    Ok(())
}

/// Threshold for "positive floor" claims, from a feasible baseline run on `𝔑_π`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Calibration {
    pub baseline_theta: String,
    pub restarts: usize,
    pub seed: u64,
    pub tol: f64,
    pub converged_restarts: usize,
    pub max_converged_objective: f64,
    pub factor: f64,
    pub threshold: f64,
}

/// `100 ×` the largest objective reached by a converged restart on `𝔑_π`.
pub fn calibrate(pool: &WorkerPool, seed: u64, tol: f64) -> Result<Calibration> {
    let report = pool.search(&n_theta(Angle::PI), 2, CALIBRATION_RESTARTS, seed, tol)?;
    let converged: Vec<f64> = report.restart_floors.iter().copied().filter(|&f| f < tol).collect();
    if converged.is_empty() {
        return Err(Error::Calibration(format!(
            "no restart on the feasible baseline reached {tol:e} (best {:e})",
            report.objective_min
        )));
    }
    let max_converged_objective = converged.iter().copied().fold(0.0, f64::max);
    Ok(Calibration {
        baseline_theta: Angle::PI.to_string(),
        restarts: CALIBRATION_RESTARTS,
        seed,
        tol,
        converged_restarts: converged.len(),
        max_converged_objective,
        factor: CALIBRATION_FACTOR,
        threshold: CALIBRATION_FACTOR * max_converged_objective,
    })
}

/// Search floor of one system.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FloorEntry {
    pub thetas: Vec<String>,
    pub objective_min: f64,
    pub converged_at_tol: bool,
    pub restarts: usize,
    pub iterations_total: usize,
    pub best_restart: usize,
    pub above_threshold: bool,
}

impl FloorEntry {
    fn new(thetas: Vec<String>, r: &FeasibilityReport, threshold: f64) -> Self {
        Self {
            thetas,
            objective_min: r.objective_min,
            converged_at_tol: r.converged_at_tol,
            restarts: r.restarts,
            iterations_total: r.iterations_total,
            best_restart: r.best_restart,
            above_threshold: r.objective_min > threshold,
        }
    }
}

fn floor_of(pool: &WorkerPool, thetas: &[Angle], restarts: usize, seed: u64, tol: f64, threshold: f64) -> Result<FloorEntry> {
    let l = n_theta_tensor(thetas)?;
    let r = pool.search(&l, 2, restarts, seed, tol)?;
    Ok(FloorEntry::new(fractions(thetas), &r, threshold))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KLJson {
    pub max_offdiag: f64,
    pub max_diag_spread: f64,
    pub tol: f64,
    pub pass: bool,
}

impl From<&KLReport> for KLJson {
    fn from(r: &KLReport) -> Self {
        Self { max_offdiag: r.max_offdiag, max_diag_spread: r.max_diag_spread, tol: r.tol, pass: r.pass }
    }
}

/// Round trip of a synthesized channel.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChannelCheck {
    pub theta: String,
    pub d_a: usize,
    pub d_b: usize,
    pub d_e: usize,
    pub tp_residual: f64,
    pub graph_residual: f64,
    pub pass: bool,
}

/// Synthesizes a channel with graph `𝔑_θ` and measures the round trip.
pub fn channel_check(theta: Angle) -> Result<ChannelCheck> {
    let ch = synthesize(&n_theta(theta), DEFAULT_ETA, DEFAULT_EPS)?;
    round_trip(theta, &ch)
}

/// Trace-preservation and graph residuals of `ch` against `𝔑_θ`.
pub fn round_trip(theta: Angle, ch: &Channel) -> Result<ChannelCheck> {
    let l = n_theta(theta);
    let tp_residual = ch.tp_residual();
    let graph_residual = graph_distance(&graph_of(ch), &l)?;
    Ok(ChannelCheck {
        theta: theta.to_string(),
        d_a: ch.d_a(),
        d_b: ch.d_b(),
        d_e: ch.kraus().len(),
        tp_residual,
        graph_residual,
        pass: tp_residual < TP_TOL && graph_residual < GRAPH_TOL,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuperactivationReport {
    pub version: String,
    pub thetas: Vec<String>,
    pub restarts: usize,
    pub seed: u64,
    pub tol: f64,
    pub kl_tol: f64,
    pub calibration: Calibration,
    pub singles: Vec<FloorEntry>,
    pub pairs: Vec<FloorEntry>,
    pub tripartite: KLJson,
    pub channels: Vec<ChannelCheck>,
    /// Every single and pair floor is above threshold and the tripartite code passes.
    pub superactivation_evidenced: bool,
}

/// Single and pairwise search floors plus the explicit tripartite code, for
/// positive angles summing exactly to `π`.
pub fn superactivate(pool: &WorkerPool, thetas: [Angle; 3], restarts: usize, seed: u64, tol: f64) -> Result<SuperactivationReport> {
    if let Some(t) = thetas.iter().find(|t| t.numerator() <= 0) {
        return Err(Error::Config(format!("angles must be positive, got {t}")));
    }
    require_sum(&thetas, Ratio::from_integer(1))?;
    let calibration = calibrate(pool, seed, tol)?;
    let threshold = calibration.threshold;
    let singles = thetas
        .iter()
        .map(|&t| floor_of(pool, &[t], restarts, seed, tol, threshold))
        .collect::<Result<Vec<_>>>()?;
    let pairs = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(i, j)| floor_of(pool, &[thetas[i], thetas[j]], restarts, seed, tol, threshold))
        .collect::<Result<Vec<_>>>()?;
    let kl = verify_code(&n_theta_tensor(&thetas)?, &product_code(3)?, EXACT_KL_TOL)?;
    let channels = thetas.iter().map(|&t| channel_check(t)).collect::<Result<Vec<_>>>()?;
    let floors_ok = singles.iter().chain(&pairs).all(|f| f.above_threshold);
    Ok(SuperactivationReport {
        version: VERSION.to_string(),
        thetas: fractions(&thetas),
        restarts,
        seed,
        tol,
        kl_tol: EXACT_KL_TOL,
        calibration,
        singles,
        pairs,
        tripartite: KLJson::from(&kl),
        channels,
        superactivation_evidenced: floors_ok && kl.pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoShotReport {
    pub version: String,
    pub thetas: Vec<String>,
    pub restarts: usize,
    pub seed: u64,
    pub tol: f64,
    pub kl_tol: f64,
    pub calibration: Calibration,
    /// `product_code(4)` on `𝔑_{θ₁} ⊗ 𝔑_{θ₂} ⊗ 𝔑_{θ₁} ⊗ 𝔑_{θ₂}`.
    pub four_fold: KLJson,
    /// Floors of `𝔑_{θ₁}^{⊗2}`, `𝔑_{θ₂}^{⊗2}` and `𝔑_{θ₁} ⊗ 𝔑_{θ₂}`.
    pub two_fold: Vec<FloorEntry>,
    pub two_shot_evidenced: bool,
}

/// Two uses of the pair `(θ₁, θ₂)` with `θ₁ + θ₂ = π/2`.
pub fn two_shot_demo(pool: &WorkerPool, theta1: Angle, theta2: Angle, restarts: usize, seed: u64, tol: f64) -> Result<TwoShotReport> {
    require_sum(&[theta1, theta2], Ratio::new(1, 2))?;
    let calibration = calibrate(pool, seed, tol)?;
    let threshold = calibration.threshold;
    let kl = verify_code(&n_theta_tensor(&[theta1, theta2, theta1, theta2])?, &product_code(4)?, EXACT_KL_TOL)?;
    let two_fold = [[theta1, theta1], [theta2, theta2], [theta1, theta2]]
        .iter()
        .map(|ts| floor_of(pool, ts, restarts, seed, tol, threshold))
        .collect::<Result<Vec<_>>>()?;
    let evidenced = kl.pass && two_fold.iter().all(|f| f.above_threshold);
    Ok(TwoShotReport {
        version: VERSION.to_string(),
        thetas: fractions(&[theta1, theta2]),
        restarts,
        seed,
        tol,
        kl_tol: EXACT_KL_TOL,
        calibration,
        four_fold: KLJson::from(&kl),
        two_fold,
        two_shot_evidenced: evidenced,
    })
}

/// An angle given exactly as a fraction of `π`, or as raw radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProbeAngle {
    Exact(Angle),
    Raw(f64),
}

impl ProbeAngle {
    pub fn radians(self) -> f64 {
        match self {
            ProbeAngle::Exact(a) => a.radians(),
            ProbeAngle::Raw(r) => r,
        }
    }

    fn system(self) -> OperatorSystem {
        match self {
            ProbeAngle::Exact(a) => n_theta(a),
            ProbeAngle::Raw(r) => n_theta_radians(r),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeAngleJson {
    /// Fraction of `π`, absent for raw input.
    pub fraction: Option<String>,
    pub radians: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CnProbeReport {
    pub version: String,
    pub thetas: Vec<ProbeAngleJson>,
    /// Some angle bypassed exact fraction input.
    pub angle_bypass: bool,
    pub abs_sum_radians: f64,
    pub at_most_2ln_3_2: bool,
    pub below_pi: bool,
    pub restarts: usize,
    pub seed: u64,
    pub tol: f64,
    pub calibration: Calibration,
    pub objective_min: f64,
    pub converged_at_tol: bool,
    pub iterations_total: usize,
    pub above_threshold: bool,
}

/// Search floor of `𝔑_{θ₁} ⊗ … ⊗ 𝔑_{θ_n}` for `n ≤ 3`, flagged by the size of
/// `|θ₁| + … + |θ_n|`.
pub fn cn_probe(pool: &WorkerPool, thetas: &[ProbeAngle], restarts: usize, seed: u64, tol: f64) -> Result<CnProbeReport> {
    if thetas.len() > MAX_PROBE_FACTORS {
        return Err(zekit_core::Error::DimensionGuard(thetas.len()).into());
    }
    if thetas.is_empty() {
        return Err(Error::Config(String::from("cn-probe needs at least one angle")));
    }
    let calibration = calibrate(pool, seed, tol)?;
    let systems: Vec<OperatorSystem> = thetas.iter().map(|t| t.system()).collect();
    let l = tensor_all(&systems)?;
    let r = pool.search(&l, 2, restarts, seed, tol)?;
    let abs_sum: f64 = thetas.iter().map(|t| t.radians().abs()).sum();
    let threshold = calibration.threshold;
    Ok(CnProbeReport {
        version: VERSION.to_string(),
        thetas: thetas
            .iter()
            .map(|&t| ProbeAngleJson {
                fraction: match t {
                    ProbeAngle::Exact(a) => Some(a.to_string()),
                    ProbeAngle::Raw(_) => None,
                },
                radians: t.radians(),
            })
            .collect(),
        angle_bypass: thetas.iter().any(|t| matches!(t, ProbeAngle::Raw(_))),
        abs_sum_radians: abs_sum,
        at_most_2ln_3_2: abs_sum <= 2.0 * 1.5f64.ln(),
        below_pi: abs_sum < std::f64::consts::PI,
        restarts,
        seed,
        tol,
        calibration,
        objective_min: r.objective_min,
        converged_at_tol: r.converged_at_tol,
        iterations_total: r.iterations_total,
        above_threshold: r.objective_min > threshold,
    })
}

/// One CSV row of a sweep. Angles are in units of `π`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub theta1: f64,
    pub theta2: f64,
    pub objective_min: f64,
    pub restarts: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub calibration: Calibration,
    pub rows: Vec<SweepRow>,
}

/// Pair floors of `𝔑_{θ₁} ⊗ 𝔑_{θ₂}` over a grid, first grid slowest.
pub fn sweep(pool: &WorkerPool, grid1: &[Angle], grid2: &[Angle], restarts: usize, seed: u64, tol: f64) -> Result<SweepResult> {
    let calibration = calibrate(pool, seed, tol)?;
    let mut rows = Vec::with_capacity(grid1.len() * grid2.len());
    for &t1 in grid1 {
        for &t2 in grid2 {
            let r = pool.search(&n_theta_tensor(&[t1, t2])?, 2, restarts, seed, tol)?;
            rows.push(SweepRow {
                theta1: t1.numerator() as f64 / t1.denominator() as f64,
                theta2: t2.numerator() as f64 / t2.denominator() as f64,
                objective_min: r.objective_min,
                restarts: r.restarts,
                converged: r.converged_at_tol,
            });
        }
    }
    Ok(SweepResult { calibration, rows })
}

/// Writes sweep rows as CSV with a header line.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::Io(String::from("<csv>"), e))?;
    Ok(())
}

/// JSON form of a search report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchReportJson {
    pub version: String,
    pub ambient_dim: usize,
    pub system_dim: usize,
    pub code_dim: usize,
    pub objective_min: f64,
    pub converged_at_tol: bool,
    pub restarts: usize,
    pub iterations_total: usize,
    pub seed: u64,
    pub tol: f64,
    pub best_restart: usize,
    pub restart_floors: Vec<f64>,
    pub certificate: CodeJson,
}

impl SearchReportJson {
    pub fn new(l: &OperatorSystem, r: &FeasibilityReport) -> Self {
        Self {
            version: VERSION.to_string(),
            ambient_dim: l.ambient_dim(),
            system_dim: l.dim(),
            code_dim: r.certificate.len(),
            objective_min: r.objective_min,
            converged_at_tol: r.converged_at_tol,
            restarts: r.restarts,
            iterations_total: r.iterations_total,
            seed: r.seed,
            tol: r.tol,
            best_restart: r.best_restart,
            restart_floors: r.restart_floors.clone(),
            certificate: CodeJson::from(&r.certificate),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_config_rejects_bad_parameters() {
        assert!(RunConfig::new(Command::Search, vec![], 0, 1, 1e-18, None).is_err());
        assert!(RunConfig::new(Command::Search, vec![], 1, 1, 0.0, None).is_err());
        assert!(RunConfig::new(Command::Search, vec![], 1, 1, 1e-18, None).is_ok());
    }

    #[test]
    fn exact_sums() {
        let t = Angle::new(1, 3);
        assert!(require_sum(&[t, t, t], Ratio::from_integer(1)).is_ok());
        let q = Angle::new(1, 4);
        assert!(matches!(
            require_sum(&[q, q, q], Ratio::from_integer(1)),
            Err(Error::Core(zekit_core::Error::AngleSumMismatch { .. }))
        ));
        // three π's wrap to π modulo 2π but do not sum to π
        assert!(require_sum(&[Angle::PI; 3], Ratio::from_integer(1)).is_err());
    }

    #[test]
    fn superactivate_rejects_wrong_sums_and_signs() {
        let pool = WorkerPool::with_threads(Some(1)).unwrap();
        let q = Angle::new(1, 4);
        assert!(matches!(
            superactivate(&pool, [q, q, q], 1, 0, 1e-18),
            Err(Error::Core(zekit_core::Error::AngleSumMismatch { .. }))
        ));
        let neg = [Angle::new(-1, 3), Angle::new(2, 3), Angle::new(2, 3)];
        assert!(matches!(superactivate(&pool, neg, 1, 0, 1e-18), Err(Error::Config(_))));
    }

    #[test]
    fn cn_probe_guards_the_tensor_power() {
        let pool = WorkerPool::with_threads(Some(1)).unwrap();
        let t = ProbeAngle::Exact(Angle::new(1, 12));
        assert!(matches!(
            cn_probe(&pool, &[t; 4], 1, 0, 1e-18),
            Err(Error::Core(zekit_core::Error::DimensionGuard(4)))
        ));
    }

    #[test]
    fn calibration_threshold_is_tiny() {
        let pool = WorkerPool::with_threads(None).unwrap();
        let c = calibrate(&pool, 42, 1e-18).unwrap();
        assert!(c.converged_restarts >= 1);
        assert!(c.threshold < 1e-16 && c.threshold >= 0.0);
    }

    #[test]
    fn csv_layout() {
        let rows = [SweepRow { theta1: 0.5, theta2: -0.25, objective_min: 0.01, restarts: 4, converged: false }];
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "theta1,theta2,objective_min,restarts,converged\n0.5,-0.25,0.01,4,false\n");
    }
}
