//! Reproducible Monte-Carlo experiment runner: sweeps compression factors
//! for a configured process model, estimates the Rihaczek spectrum with
//! the smoothed (MVU), compressive (CS), and symmetrized-compressive
//! estimators, and aggregates NMSE / squared-bias / variance curves plus
//! plot-ready figure exports.
//!
//! Note on the Gaussian assumption: closed-form variance/bound formulas
//! assume a circular Gaussian process. The OFDM model is QPSK-driven (not
//! Gaussian); its bound report is computed on a Gaussian surrogate sharing
//! the same correlation matrix, which is the standard evaluation
//! convention for these bounds.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use tfrs_core::{
    bound_report, chirp_correlation, compressive_solution, derive_seed, eaf_from_corr, h_approx,
    h_exact, make_lag_support, mvu_estimate, ofdm_closed_eaf, ofdm_closed_rs, ofdm_correlation,
    ofdm_realization, reconstruct_rs, rs_from_corr, symmetrized_from_subsampled, BoundReport,
    BpConfig, ChirpParams, CompressError, CorrelationMatrix, GaussianSampler, GridError,
    LagSupport, OfdmParams, SignalVector, SolverError, TfMatrix,
};

/// Process model selection for one experiment.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelConfig {
    /// Cyclic-prefixed OFDM symbol with random QPSK data.
    Ofdm(OfdmParams),
    /// Two-component Gaussian chirp process.
    Chirp(ChirpParams),
    /// User-supplied correlation matrix (CSV in the core grid format);
    /// realizations are circular Gaussian.
    CustomCorr { path: PathBuf },
}

/// Estimators that can be enabled per run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    /// Smoothed minimum-variance-unbiased estimate from the full lag window.
    Mvu,
    /// Compressive estimate from P random ambiguity measurements.
    Cs,
    /// Symmetrized compressive estimate.
    CsSym,
}

impl EstimatorKind {
    /// Stable identifier used in CSV headers and file names.
    pub fn label(&self) -> &'static str {
        match self {
            EstimatorKind::Mvu => "mvu",
            EstimatorKind::Cs => "cs",
            EstimatorKind::CsSym => "cs_sym",
        }
    }
}

/// Fully resolved experiment description; serialized into every report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Process model.
    pub model: ModelConfig,
    /// Assumed lag-support half-width M (time lags).
    pub m_half: usize,
    /// Assumed lag-support half-width L (frequency lags).
    pub l_half: usize,
    /// Monte-Carlo trials per compression point.
    pub trials: usize,
    /// Measurement counts P to sweep (each in 1..=S′; S′ itself means no
    /// compression).
    pub compression_points: Vec<usize>,
    /// Nominal sparsity level K for the bound report.
    pub k_nominal: usize,
    /// Master seed; all per-trial randomness derives from it.
    pub master_seed: u64,
    /// Basis-pursuit solver settings.
    #[serde(default)]
    pub solver: BpConfig,
    /// Output directory (created if missing); None runs in memory only.
    #[serde(default)]
    pub outputs: Option<PathBuf>,
    /// Estimators to run; all three when omitted.
    #[serde(default = "all_estimators")]
    pub estimators: Vec<EstimatorKind>,
    /// Whether to compute the (expensive) theoretical bound report.
    #[serde(default)]
    pub include_bounds: bool,
}

fn all_estimators() -> Vec<EstimatorKind> {
    vec![EstimatorKind::Mvu, EstimatorKind::Cs, EstimatorKind::CsSym]
}

/// Aggregated statistics for one estimator at one compression point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimatorStats {
    /// Estimator identifier.
    pub estimator: String,
    /// Empirical NMSE = mean ‖R̂−R̄‖² / ‖R̄‖².
    pub nmse: f64,
    /// Normalized squared bias ‖mean R̂ − R̄‖² / ‖R̄‖².
    pub bias_sq_norm: f64,
    /// Normalized variance (so that nmse = bias_sq_norm + var_norm).
    pub var_norm: f64,
    /// Per-trial squared errors ‖R̂_t − R̄‖² (unnormalized), trial order.
    pub per_trial_err_sq: Vec<f64>,
    /// Relative path of the averaged estimate matrix, when written.
    pub mean_matrix_file: Option<String>,
    /// Relative path of the trial-0 example estimate, when written.
    pub example_matrix_file: Option<String>,
}

/// Results for one compression point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompressionPointReport {
    /// Measurement count P.
    pub p_count: usize,
    /// Compression factor S′/P.
    pub factor: f64,
    /// Per-estimator aggregates.
    pub stats: Vec<EstimatorStats>,
    /// Trials whose basis-pursuit solve did not converge.
    pub failed_trials: Vec<usize>,
}

/// Complete, self-describing experiment output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    /// Resolved configuration (replay contract).
    pub config: ExperimentConfig,
    /// Grid size N.
    pub n_size: usize,
    /// Extended-support size S′.
    pub s_prime: usize,
    /// Ground-truth energy ‖R̄‖₂².
    pub rs_energy: f64,
    /// One entry per compression point, config order.
    pub points: Vec<CompressionPointReport>,
    /// Theoretical bound report (Gaussian surrogate for non-Gaussian
    /// models), when requested.
    pub bounds: Option<BoundReport>,
    /// Relative path of the ground-truth RS matrix, when written.
    pub truth_matrix_file: Option<String>,
    /// Wall-clock duration of the run in seconds.
    pub wall_clock_secs: f64,
}

/// Runner errors; the binary maps these onto exit codes.
#[derive(Debug, Error)]
pub enum RunError {
    /// Invalid configuration (exit code 1).
    #[error("configuration error: {0}")]
    Config(String),
    /// More than 1% of trials failed to solve (exit code 2).
    #[error("solver failure budget exceeded: {failed} of {total} trials failed")]
    SolverBudget { failed: usize, total: usize },
    /// Filesystem problem.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// Grid/serialization problem.
    #[error("grid error: {0}")]
    Grid(#[from] GridError),
    /// Miscellaneous internal failure.
    #[error("{0}")]
    Internal(String),
}

/// Resolved model: ground truth plus a realization sampler.
pub struct ResolvedModel {
    /// Exact correlation matrix.
    pub corr: CorrelationMatrix,
    /// Realization kind.
    sampler: Sampler,
}

enum Sampler {
    Ofdm(OfdmParams),
    Gaussian(Box<GaussianSampler>),
}

impl ResolvedModel {
    /// Draws one seeded realization.
    pub fn draw(&self, seed: u64) -> SignalVector {
        match &self.sampler {
            Sampler::Ofdm(p) => ofdm_realization(p, seed),
            Sampler::Gaussian(s) => s.draw(seed),
        }
    }
}

/// Materializes the configured model: correlation matrix and sampler.
pub fn resolve_model(model: &ModelConfig) -> Result<ResolvedModel, RunError> {
    match model {
        ModelConfig::Ofdm(p) => {
            let corr = ofdm_correlation(p).map_err(|e| RunError::Config(e.to_string()))?;
            Ok(ResolvedModel {
                corr,
                sampler: Sampler::Ofdm(*p),
            })
        }
        ModelConfig::Chirp(p) => {
            let corr = chirp_correlation(p).map_err(|e| RunError::Config(e.to_string()))?;
            let sampler = GaussianSampler::new(&corr);
            Ok(ResolvedModel {
                corr,
                sampler: Sampler::Gaussian(Box::new(sampler)),
            })
        }
        ModelConfig::CustomCorr { path } => {
            let grid = read_grid(path)?;
            let n = grid.n();
            let gamma = nalgebra::DMatrix::from_fn(n, n, |i, j| grid.get(i as i64, j as i64));
            let corr =
                CorrelationMatrix::new(gamma).map_err(|e| RunError::Config(e.to_string()))?;
            let sampler = GaussianSampler::new(&corr);
            Ok(ResolvedModel {
                corr,
                sampler: Sampler::Gaussian(Box::new(sampler)),
            })
        }
    }
}

/// Writes a grid to a CSV file (core text format).
pub fn write_grid(path: &Path, g: &TfMatrix) -> Result<(), RunError> {
    let mut f = fs::File::create(path)?;
    g.write_csv(&mut f)?;
    Ok(())
}

/// Reads a grid from a CSV file (core text format).
pub fn read_grid(path: &Path) -> Result<TfMatrix, RunError> {
    let mut f = fs::File::open(path)?;
    Ok(TfMatrix::read_csv(&mut f)?)
}

fn validate(cfg: &ExperimentConfig, sup: &LagSupport) -> Result<(), RunError> {
    if cfg.trials == 0 {
        return Err(RunError::Config("trials must be ≥ 1".into()));
    }
    if cfg.estimators.is_empty() {
        return Err(RunError::Config("at least one estimator required".into()));
    }
    if cfg.compression_points.is_empty() {
        return Err(RunError::Config("at least one compression point required".into()));
    }
    for &p in &cfg.compression_points {
        if p == 0 || p > sup.s_prime {
            return Err(RunError::Config(format!(
                "compression point P = {p} outside 1..={}",
                sup.s_prime
            )));
        }
    }
    if cfg.include_bounds && (cfg.k_nominal == 0 || cfg.k_nominal > sup.s_prime) {
        return Err(RunError::Config(format!(
            "k_nominal = {} outside 1..={}",
            cfg.k_nominal, sup.s_prime
        )));
    }
    Ok(())
}

/// Per-trial estimator outputs (None when the solve failed).
struct TrialResult {
    trial: usize,
    estimates: Vec<Option<TfMatrix>>,
    failed: bool,
}

struct Accumulator {
    sum_dev: TfMatrix,
    sum_err_sq: f64,
    per_trial: Vec<f64>,
    example: Option<TfMatrix>,
    count: usize,
}

impl Accumulator {
    fn new(n: usize) -> Self {
        Accumulator {
            sum_dev: TfMatrix::zeros(n),
            sum_err_sq: 0.0,
            per_trial: Vec::new(),
            example: None,
            count: 0,
        }
    }

    fn add(&mut self, trial: usize, est: &TfMatrix, truth: &TfMatrix) {
        let dev = est.sub(truth);
        let n = dev.n() as i64;
        for i in 0..n {
            for j in 0..n {
                let cur = self.sum_dev.get(i, j);
                self.sum_dev.set(i, j, cur + dev.get(i, j));
            }
        }
        self.sum_err_sq += dev.norm_sq();
        self.per_trial.push(dev.norm_sq());
        if trial == 0 {
            self.example = Some(est.clone());
        }
        self.count += 1;
    }
}

/// Runs the full experiment: seeded trial-parallel sweep over compression
/// points, fixed-order aggregation (results are independent of thread
/// count), optional artifact output. Fails with [`RunError::SolverBudget`]
/// when more than 1% of all trials fail to solve.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    let start = Instant::now();
    let model = resolve_model(&cfg.model)?;
    let n = model.corr.n();
    let sup = make_lag_support(n, cfg.m_half, cfg.l_half)
        .map_err(|e| RunError::Config(e.to_string()))?;
    validate(cfg, &sup)?;
    let rs_true = rs_from_corr(&model.corr);
    let energy = rs_true.norm_sq();
    if energy == 0.0 {
        return Err(RunError::Config("model has zero-energy spectrum".into()));
    }

    if let Some(dir) = &cfg.outputs {
        fs::create_dir_all(dir)?;
    }

    let mut points = Vec::new();
    let mut total_failed = 0usize;
    for (point_idx, &p_count) in cfg.compression_points.iter().enumerate() {
        let point_seed = derive_seed(cfg.master_seed, 0x0001_0000 + point_idx as u64);
        let mut accs: Vec<Accumulator> =
            cfg.estimators.iter().map(|_| Accumulator::new(n)).collect();
        let mut failed_trials = Vec::new();

        // Chunked parallel map, serial fixed-order fold: bounded memory and
        // bit-identical aggregation regardless of the thread pool.
        const CHUNK: usize = 64;
        let mut trial = 0usize;
        while trial < cfg.trials {
            let hi = (trial + CHUNK).min(cfg.trials);
            let chunk: Vec<TrialResult> = (trial..hi)
                .into_par_iter()
                .map(|t| run_trial(cfg, &model, &sup, p_count, point_seed, t))
                .collect();
            for res in chunk {
                if res.failed {
                    failed_trials.push(res.trial);
                    total_failed += 1;
                }
                for (acc, est) in accs.iter_mut().zip(&res.estimates) {
                    if let Some(est) = est {
                        acc.add(res.trial, est, &rs_true);
                    }
                }
            }
            trial = hi;
        }

        let mut stats = Vec::new();
        for (kind, acc) in cfg.estimators.iter().zip(accs) {
            let t = acc.count.max(1) as f64;
            let mean_dev = acc.sum_dev.map(|z| z / t);
            let bias_sq = mean_dev.norm_sq();
            let mean_err = acc.sum_err_sq / t;
            // mean_err = bias² + variance exactly (same trial set).
            let variance = (mean_err - bias_sq).max(0.0);
            let mut mean_matrix_file = None;
            let mut example_matrix_file = None;
            if let Some(dir) = &cfg.outputs {
                let mean_est = {
                    let mut g = mean_dev;
                    for i in 0..n as i64 {
                        for j in 0..n as i64 {
                            let cur = g.get(i, j);
                            g.set(i, j, cur + rs_true.get(i, j));
                        }
                    }
                    g
                };
                let name = format!("mean_{}_p{}.csv", kind.label(), p_count);
                write_grid(&dir.join(&name), &mean_est)?;
                mean_matrix_file = Some(name);
                if let Some(example) = &acc.example {
                    let name = format!("example_{}_p{}.csv", kind.label(), p_count);
                    write_grid(&dir.join(&name), example)?;
                    example_matrix_file = Some(name);
                }
            }
            stats.push(EstimatorStats {
                estimator: kind.label().to_string(),
                nmse: mean_err / energy,
                bias_sq_norm: bias_sq / energy,
                var_norm: variance / energy,
                per_trial_err_sq: acc.per_trial,
                mean_matrix_file,
                example_matrix_file,
            });
        }
        points.push(CompressionPointReport {
            p_count,
            factor: sup.s_prime as f64 / p_count as f64,
            stats,
            failed_trials,
        });
    }

    let total_runs = cfg.trials * cfg.compression_points.len();
    if total_failed as f64 > 0.01 * total_runs as f64 {
        return Err(RunError::SolverBudget {
            failed: total_failed,
            total: total_runs,
        });
    }

    let bounds = if cfg.include_bounds {
        Some(
            bound_report(&model.corr, &sup, cfg.k_nominal, 1.0)
                .map_err(|e| RunError::Internal(e.to_string()))?,
        )
    } else {
        None
    };

    let mut truth_matrix_file = None;
    if let Some(dir) = &cfg.outputs {
        write_grid(&dir.join("truth_rs.csv"), &rs_true)?;
        truth_matrix_file = Some("truth_rs.csv".to_string());
    }

    let report = ExperimentReport {
        config: cfg.clone(),
        n_size: n,
        s_prime: sup.s_prime,
        rs_energy: energy,
        points,
        bounds,
        truth_matrix_file,
        wall_clock_secs: start.elapsed().as_secs_f64(),
    };

    if let Some(dir) = &cfg.outputs {
        fs::write(
            dir.join("report.json"),
            serde_json::to_string_pretty(&report)
                .map_err(|e| RunError::Internal(e.to_string()))?,
        )?;
        write_curves_csv(&report, &dir.join("curves.csv"))?;
    }
    Ok(report)
}

fn run_trial(
    cfg: &ExperimentConfig,
    model: &ResolvedModel,
    sup: &LagSupport,
    p_count: usize,
    point_seed: u64,
    trial: usize,
) -> TrialResult {
    let trial_seed = derive_seed(point_seed, trial as u64);
    let x = model.draw(derive_seed(trial_seed, 0));
    let sample_seed = derive_seed(trial_seed, 1);

    let needs_cs = cfg
        .estimators
        .iter()
        .any(|e| matches!(e, EstimatorKind::Cs | EstimatorKind::CsSym));
    let cs_solution = if needs_cs {
        match compressive_solution(&x, sup, p_count, sample_seed, &cfg.solver) {
            Ok((_, _, r_hat)) => Some(r_hat),
            Err(CompressError::Solver(SolverError::MaxIterations { .. })) => None,
            Err(e) => panic!("unexpected compressive failure: {e}"),
        }
    } else {
        None
    };
    let failed = needs_cs && cs_solution.is_none();

    let estimates = cfg
        .estimators
        .iter()
        .map(|kind| match kind {
            EstimatorKind::Mvu => Some(mvu_estimate(&x, sup)),
            EstimatorKind::Cs => cs_solution.as_ref().map(reconstruct_rs),
            EstimatorKind::CsSym => cs_solution.as_ref().map(symmetrized_from_subsampled),
        })
        .collect();
    TrialResult {
        trial,
        estimates,
        failed,
    }
}

fn fmt_float(v: f64) -> String {
    format!("{v:.17e}")
}

/// Writes the aggregate sweep as CSV: one row per compression point with
/// `factor,p` then `nmse,bias_sq,variance` per estimator (normalized).
pub fn write_curves_csv(report: &ExperimentReport, path: &Path) -> Result<(), RunError> {
    let mut header = vec!["factor".to_string(), "p".to_string()];
    for est in &report.config.estimators {
        for metric in ["nmse", "bias_sq", "variance"] {
            header.push(format!("{}_{}", est.label(), metric));
        }
    }
    let mut out = header.join(",") + "\n";
    for point in &report.points {
        let mut row = vec![fmt_float(point.factor), point.p_count.to_string()];
        for stats in &point.stats {
            row.push(fmt_float(stats.nmse));
            row.push(fmt_float(stats.bias_sq_norm));
            row.push(fmt_float(stats.var_norm));
        }
        out.push_str(&(row.join(",") + "\n"));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Figure identifiers accepted by [`emit_figure_data`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    /// Ground-truth OFDM RS and EAF (closed forms).
    Fig1,
    /// Ranked second moments h and their approximation.
    Fig2,
    /// OFDM example estimates (single realization).
    Fig3,
    /// OFDM NMSE / bias / variance vs compression factor.
    Fig4,
    /// Chirp example estimates (single realization).
    Fig5,
    /// Chirp NMSE / bias / variance vs compression factor.
    Fig6,
}

impl std::str::FromStr for FigureId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fig1" => Ok(FigureId::Fig1),
            "fig2" => Ok(FigureId::Fig2),
            "fig3" => Ok(FigureId::Fig3),
            "fig4" => Ok(FigureId::Fig4),
            "fig5" => Ok(FigureId::Fig5),
            "fig6" => Ok(FigureId::Fig6),
            other => Err(format!("unknown figure id '{other}' (use fig1..fig6)")),
        }
    }
}

/// Writes plot-ready data files for one figure next to the report
/// artifacts; returns the written file names.
pub fn emit_figure_data(
    report: &ExperimentReport,
    report_dir: &Path,
    which: FigureId,
) -> Result<Vec<PathBuf>, RunError> {
    match which {
        FigureId::Fig1 => {
            let p = match &report.config.model {
                ModelConfig::Ofdm(p) => *p,
                _ => {
                    return Err(RunError::Config(
                        "fig1 requires an OFDM-model report".into(),
                    ))
                }
            };
            let rs_path = report_dir.join("fig1_rs.csv");
            let eaf_path = report_dir.join("fig1_eaf.csv");
            write_grid(&rs_path, &ofdm_closed_rs(&p))?;
            write_grid(&eaf_path, &ofdm_closed_eaf(&p))?;
            Ok(vec![rs_path, eaf_path])
        }
        FigureId::Fig2 => {
            let model = resolve_model(&report.config.model)?;
            let sup = make_lag_support(report.n_size, report.config.m_half, report.config.l_half)
                .map_err(|e| RunError::Config(e.to_string()))?;
            let rows = ranked_h_rows(&model.corr, &sup)?;
            let path = report_dir.join("fig2_h_ranked.csv");
            let mut out = String::from("rank,p,q,h_norm,h_approx_norm\n");
            for (rank, (p, q, h, ha)) in rows.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    rank + 1,
                    p,
                    q,
                    fmt_float(*h),
                    fmt_float(*ha)
                ));
            }
            fs::write(&path, out)?;
            Ok(vec![path])
        }
        FigureId::Fig3 | FigureId::Fig5 => {
            let want_ofdm = which == FigureId::Fig3;
            let is_ofdm = matches!(report.config.model, ModelConfig::Ofdm(_));
            if want_ofdm != is_ofdm {
                return Err(RunError::Config(format!(
                    "{} requires {} report",
                    if want_ofdm { "fig3" } else { "fig5" },
                    if want_ofdm { "an OFDM-model" } else { "a chirp/custom-model" }
                )));
            }
            let mut written = Vec::new();
            let truth = report.truth_matrix_file.as_ref().ok_or_else(|| {
                RunError::Config("missing aggregate: truth_rs matrix was not written".into())
            })?;
            written.push(report_dir.join(truth));
            for point in &report.points {
                for stats in &point.stats {
                    let file = stats.example_matrix_file.as_ref().ok_or_else(|| {
                        RunError::Config(format!(
                            "missing aggregate: example matrix for estimator '{}' at P = {}",
                            stats.estimator, point.p_count
                        ))
                    })?;
                    written.push(report_dir.join(file));
                }
            }
            // Example matrices are already on disk; just verify presence.
            for path in &written {
                if !path.exists() {
                    return Err(RunError::Config(format!(
                        "missing aggregate file {}",
                        path.display()
                    )));
                }
            }
            Ok(written)
        }
        FigureId::Fig4 | FigureId::Fig6 => {
            let want_ofdm = which == FigureId::Fig4;
            let is_ofdm = matches!(report.config.model, ModelConfig::Ofdm(_));
            if want_ofdm != is_ofdm {
                return Err(RunError::Config(format!(
                    "{} requires {} report",
                    if want_ofdm { "fig4" } else { "fig6" },
                    if want_ofdm { "an OFDM-model" } else { "a chirp/custom-model" }
                )));
            }
            let path = report_dir.join(if want_ofdm {
                "fig4_curves.csv"
            } else {
                "fig6_curves.csv"
            });
            write_curves_csv(report, &path)?;
            Ok(vec![path])
        }
    }
}

/// Ranked (by |R̃_MVU| descending, flat-index tie-break) subsample points
/// with h_exact and h_approx, both normalized by the top h_exact value.
fn ranked_h_rows(
    corr: &CorrelationMatrix,
    sup: &LagSupport,
) -> Result<Vec<(usize, usize, f64, f64)>, RunError> {
    let rs = rs_from_corr(corr);
    let smoothed = tfrs_core::expected_mvu(&rs, sup);
    let mut order: Vec<(usize, usize)> = (0..sup.dl)
        .flat_map(|p| (0..sup.dm).map(move |q| (p, q)))
        .collect();
    order.sort_by(|&a, &b| {
        let ma = smoothed
            .get((a.0 * sup.dn) as i64, (a.1 * sup.dk) as i64)
            .norm();
        let mb = smoothed
            .get((b.0 * sup.dn) as i64, (b.1 * sup.dk) as i64)
            .norm();
        mb.partial_cmp(&ma)
            .unwrap()
            .then((a.0 * sup.dm + a.1).cmp(&(b.0 * sup.dm + b.1)))
    });
    let rows: Vec<(usize, usize, f64, f64)> = order
        .par_iter()
        .map(|&(p, q)| {
            let h = h_exact(corr, sup, p, q).expect("in-range index");
            let ha = h_approx(&rs, sup, p, q);
            (p, q, h, ha)
        })
        .collect();
    let h0 = rows.first().map(|r| r.2).unwrap_or(1.0).max(1e-300);
    Ok(rows
        .into_iter()
        .map(|(p, q, h, ha)| (p, q, h / h0, ha / h0))
        .collect())
}

/// Named preset configurations.
pub fn preset(name: &str) -> Result<ExperimentConfig, RunError> {
    let base = |model: ModelConfig, m: usize, l: usize, trials: usize, pts: Vec<usize>, k: usize, bounds: bool| {
        ExperimentConfig {
            model,
            m_half: m,
            l_half: l,
            trials,
            compression_points: pts,
            k_nominal: k,
            master_seed: 20_240_101,
            solver: BpConfig::default(),
            outputs: None,
            estimators: vec![EstimatorKind::Mvu, EstimatorKind::Cs, EstimatorKind::CsSym],
            include_bounds: bounds,
        }
    };
    match name {
        // S′ = 128 for (N, M, L) = (128, 3, 7); factors {1, 2, ≈5}.
        "ofdm-desk" => Ok(base(
            ModelConfig::Ofdm(OfdmParams::desk()),
            3,
            7,
            200,
            vec![128, 64, 25],
            40,
            true,
        )),
        // Same support geometry at N = 512 (S′ = 128), publication trials.
        "ofdm-paper" => Ok(base(
            ModelConfig::Ofdm(OfdmParams::paper()),
            3,
            7,
            1000,
            vec![128, 64, 25],
            40,
            false,
        )),
        // S′ = 256 for (128, 7, 7).
        "chirp-desk" => Ok(base(
            ModelConfig::Chirp(ChirpParams::desk()),
            7,
            7,
            200,
            vec![256, 128, 51],
            40,
            true,
        )),
        // S′ = 1024 for (512, 15, 15).
        "chirp-paper" => Ok(base(
            ModelConfig::Chirp(ChirpParams::paper()),
            15,
            15,
            1000,
            vec![1024, 512, 205],
            40,
            false,
        )),
        other => Err(RunError::Config(format!(
            "unknown preset '{other}' (ofdm-desk, ofdm-paper, chirp-desk, chirp-paper)"
        ))),
    }
}

/// Loads a config from a JSON file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, RunError> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| RunError::Config(format!("{}: {e}", path.display())))
}

/// Ground-truth expected ambiguity function of the configured model
/// (convenience for exports and tests).
pub fn model_eaf(model: &ModelConfig) -> Result<TfMatrix, RunError> {
    Ok(eaf_from_corr(&resolve_model(model)?.corr))
}
