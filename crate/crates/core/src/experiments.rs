//! Experiment drivers shared by the `enlarge` binary, the examples and the
//! acceptance tests.
//!
//! Every driver takes a serializable config (unknown keys rejected, missing
//! keys defaulted), simulates in chunks of paths and returns a report that
//! embeds the config. Chunking never changes results: each path has its
//! own random substream and every statistic is computed from the
//! concatenated per-path values.

use std::ops::Range;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classifier::{self, ClassificationVerdict, LadderConfig, Verdict};
use crate::enlarged::{
    compensate_brownian, compensate_martingale, expected_abs_drift_integral, integrate_under_enlargement_with_guard,
    levy_bridge_compensator, realize_x_ensemble, symmetry_from_columns, DecomposedProcess, EnlargementSpec,
    SymmetryReport, DEFAULT_OVERFLOW_GUARD,
};
use crate::error::{Error, Result};
use crate::finite::{random_instance, FiniteDemoReport, FiniteInstance, RandomInstanceSpec};
use crate::gaussian::DriftProfile;
use crate::integrand::DeterministicIntegrand;
use crate::martingale::{
    increment_regression_test, jeulin_lemma_probe, levy_characterization_suite, Basis, LevyReport,
    LookaheadReport, LookaheadSample, MartingaleTestReport, Observations, ProbeConfig, ProbeReport,
    QuadraticVariationReport, TestBattery, DEFAULT_THRESHOLD,
};
use crate::paths::{simulate_brownian_range, simulate_compound_poisson_range, JumpLaw, PathEnsemble};
use crate::rng::SeedSpec;
use crate::stats::{correlation, summary};
use crate::timegrid::{build_grid, Refinement, TimeGrid};

/// Paths simulated per chunk unless configured otherwise.
pub const DEFAULT_CHUNK: usize = 4096;

/// Exit status of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    StatisticalFail,
    /// The classifier refused the object (NOT_SEMIMARTINGALE, NOT_DEFINED,
    /// or a non-integrable Stieltjes sum).
    Refused,
    Undecided,
}

impl Status {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Status::Pass
        } else {
            Status::StatisticalFail
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::StatisticalFail => 2,
            Status::Refused => 3,
            Status::Undecided => 4,
        }
    }
}

/// Exit code for configuration errors.
pub const EXIT_CONFIG_ERROR: i32 = 64;

/// A serializable experiment result.
pub trait Report: Serialize {
    fn status(&self) -> Status;

    /// Plot-ready CSV tables as `(name, contents)`.
    fn tables(&self) -> Result<Vec<(String, String)>> {
        Ok(Vec::new())
    }
}

fn csv_string(write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<String> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Shape(e.to_string()))
}

fn chunks(n: usize, chunk: usize) -> impl Iterator<Item = Range<u64>> {
    let (n, c) = (n as u64, chunk.max(1) as u64);
    (0..n.div_ceil(c)).map(move |i| i * c..((i + 1) * c).min(n))
}

fn check_paths(paths: usize) -> Result<()> {
    if paths < 2 {
        return Err(Error::Config(format!("need at least 2 paths, got {paths}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    Uniform,
    /// Uniform base steps, then geometric refinement toward the singular point.
    Refined,
    /// Nodes uniform in `-ln(T - s)`.
    LogDistance,
}

/// Grid recipe; the singular point is supplied by the experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub kind: GridKind,
    /// Number of uniform (base) steps.
    pub steps: usize,
    /// Refinement ratio for `refined`.
    pub ratio: f64,
    /// Refinement depth for `refined`; by default the last step reaches
    /// `1e-6` of the horizon.
    pub depth: Option<usize>,
    /// Log-distance step for `log_distance`.
    pub du: f64,
    /// Closest approach to the singular point for `log_distance`.
    pub min_distance: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            kind: GridKind::Refined,
            steps: 1024,
            ratio: 0.5,
            depth: None,
            du: 0.004,
            min_distance: 1e-7,
        }
    }
}

impl GridConfig {
    pub fn uniform(steps: usize) -> Self {
        GridConfig {
            kind: GridKind::Uniform,
            steps,
            ..Self::default()
        }
    }

    pub fn refined(steps: usize, ratio: f64) -> Self {
        GridConfig {
            kind: GridKind::Refined,
            steps,
            ratio,
            ..Self::default()
        }
    }

    pub fn log_distance(du: f64, min_distance: f64) -> Self {
        GridConfig {
            kind: GridKind::LogDistance,
            du,
            min_distance,
            ..Self::default()
        }
    }

    /// Grid on `[0, horizon]`, refined toward `singular` when given.
    pub fn build(&self, horizon: f64, singular: Option<f64>) -> Result<TimeGrid> {
        match (self.kind, singular) {
            (GridKind::Uniform, _) | (_, None) => build_grid(horizon, self.steps, None),
            (GridKind::Refined, Some(sp)) => build_grid(
                horizon,
                self.steps,
                Some(Refinement {
                    singular_point: sp,
                    ratio: self.ratio,
                    depth: self.depth,
                }),
            ),
            (GridKind::LogDistance, Some(sp)) if sp <= horizon => TimeGrid::log_distance(sp, self.du, self.min_distance),
            (GridKind::LogDistance, Some(_)) => build_grid(horizon, self.steps, None),
        }
    }
}

fn info_horizon(phi: &DeterministicIntegrand) -> Result<f64> {
    match phi.support_end() {
        Some(h) if h > 0.0 => Ok(h),
        _ => Err(Error::Config(format!("{phi}: X needs an integrand with bounded, non-empty support"))),
    }
}

/// Enlargement spec whose grid contains every time in `times`.
fn enlargement(phi: &DeterministicIntegrand, grid: &GridConfig, eps: Option<f64>, times: &[f64]) -> Result<EnlargementSpec> {
    let h = info_horizon(phi)?;
    let base = grid.build(h, Some(h))?;
    let spec = EnlargementSpec::new(phi.clone(), &base, eps)?;
    if let Some(&t) = times.iter().find(|&&t| t > spec.sim_horizon) {
        return Err(Error::Config(format!(
            "time {t} lies beyond the simulated window [0, {}]",
            spec.sim_horizon
        )));
    }
    let grid = spec.grid.with_nodes(times)?;
    EnlargementSpec::new(phi.clone(), &grid, Some(spec.epsilon_exclusion))
}

/// Machine-precision bound used for the additivity invariant.
pub const ADDITIVITY_TOL: f64 = 1e-10;

// ---------------------------------------------------------------------------
// bridge-demo

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BridgeConfig {
    pub paths: usize,
    pub seed: u64,
    pub horizon: f64,
    pub grid: GridConfig,
    /// Exclusion margin before the horizon; defaults to the smallest step.
    pub epsilon: Option<f64>,
    pub battery: TestBattery,
    /// Also test the uncompensated path against `X - W_s` at the first pair.
    pub negative_control: bool,
    /// `|z|` the negative control must exceed.
    pub negative_control_min_z: f64,
    pub qv_time: f64,
    pub qv_rel_tol: f64,
    /// `(s, t)` of the symmetry regression.
    pub symmetry: (f64, f64),
    /// Number of decomposed paths to export for plotting.
    pub export_paths: usize,
    pub chunk: usize,
}

impl Default for BridgeConfig {
    fn default() -> Self {
        BridgeConfig {
            paths: 200_000,
            seed: 42,
            horizon: 1.0,
            grid: GridConfig::default(),
            epsilon: None,
            battery: TestBattery::new(&[(0.25, 0.5), (0.5, 0.75), (0.25, 0.9)], &Basis::DEFAULT),
            negative_control: true,
            negative_control_min_z: 10.0,
            qv_time: 0.9,
            qv_rel_tol: 0.02,
            symmetry: (0.25, 0.5),
            export_paths: 0,
            chunk: DEFAULT_CHUNK,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NegativeControl {
    pub report: MartingaleTestReport,
    pub min_abs_z: f64,
    /// The uncompensated path was rejected as required.
    pub detected: bool,
}

/// Correlation of the compensated path with `X` (no pinning) against the
/// raw path (pinned, `corr = t / √(t T)`).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PinningCheck {
    pub t: f64,
    pub corr_compensated: f64,
    /// `corr · √N`, approximately standard normal under independence.
    pub z_compensated: f64,
    pub corr_raw: f64,
    pub expected_raw: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BridgeReport {
    pub config: BridgeConfig,
    pub status: Status,
    pub grid_nodes: usize,
    pub smallest_step: f64,
    pub sim_horizon: f64,
    pub epsilon_exclusion: f64,
    /// Bound on the drift mass cut off by the exclusion margin.
    pub truncation_bound: f64,
    pub compensated: MartingaleTestReport,
    pub negative_control: Option<NegativeControl>,
    pub quadratic_variation: QuadraticVariationReport,
    pub symmetry: SymmetryReport,
    pub pinning: PinningCheck,
    pub max_additivity_defect: f64,
    /// Mean over paths of `Σ |ΔA|`.
    pub mean_fv_variation: f64,
    #[serde(skip)]
    pub sample: Option<DecomposedProcess>,
}

impl Report for BridgeReport {
    fn status(&self) -> Status {
        self.status
    }

    fn tables(&self) -> Result<Vec<(String, String)>> {
        let mut t = vec![("tests".to_string(), csv_string(|b| self.compensated.write_csv(b))?)];
        if let Some(nc) = &self.negative_control {
            t.push(("negative_control".into(), csv_string(|b| nc.report.write_csv(b))?));
        }
        if let Some(d) = &self.sample {
            t.push(("paths".into(), csv_string(|b| d.write_csv(b))?));
        }
        Ok(t)
    }
}

/// Enlargement of Brownian motion by its terminal value: compensates every
/// path with the bridge drift and certifies the result.
pub fn run_bridge(cfg: &BridgeConfig) -> Result<BridgeReport> {
    check_paths(cfg.paths)?;
    let phi = DeterministicIntegrand::indicator(cfg.horizon);
    let (s_sym, t_sym) = cfg.symmetry;
    let mut times = cfg.battery.times();
    times.extend([cfg.qv_time, s_sym, t_sym]);
    let spec = enlargement(&phi, &cfg.grid, cfg.epsilon, &times)?;
    let sim_grid = spec.simulation_grid()?;
    let obs_times: Vec<f64> = {
        let mut t = times.clone();
        t.sort_by(f64::total_cmp);
        t.dedup();
        t
    };
    let seed = SeedSpec::new(cfg.seed);

    let mut comp = Observations::empty(&obs_times);
    let mut raw = Observations::empty(&obs_times);
    let mut x_all = Vec::with_capacity(cfg.paths);
    let mut qv = Vec::with_capacity(cfg.paths);
    let mut defect: f64 = 0.0;
    let mut fv_var = Vec::with_capacity(cfg.paths);
    for range in chunks(cfg.paths, cfg.chunk) {
        let ens = simulate_brownian_range(&sim_grid, range, seed)?;
        let x = realize_x_ensemble(&spec, &ens)?;
        let dec = compensate_brownian(&spec, &ens, &x)?;
        comp.extend_from(&dec.martingale_part)?;
        raw.extend_from(&ens)?;
        qv.extend(crate::martingale::quadratic_variation(&dec.martingale_part, cfg.qv_time)?);
        defect = defect.max(dec.additivity_defect());
        fv_var.extend(dec.fv_variation());
        x_all.extend(x);
    }

    let compensated = increment_regression_test(&comp, &raw, &x_all, &cfg.battery)?.with_seed(seed);
    let negative_control = if cfg.negative_control {
        let battery = TestBattery::new(&cfg.battery.pairs[..1], &[Basis::InfoMinusState])
            .with_threshold(cfg.battery.threshold);
        let report = increment_regression_test(&raw, &raw, &x_all, &battery)?.with_seed(seed);
        let detected = report.max_abs_z > cfg.negative_control_min_z;
        Some(NegativeControl {
            report,
            min_abs_z: cfg.negative_control_min_z,
            detected,
        })
    } else {
        None
    };
    let quadratic_variation = QuadraticVariationReport::from_values(&qv, cfg.qv_time, cfg.qv_time, cfg.qv_rel_tol);
    let symmetry = symmetry_from_columns(raw.at(s_sym)?, raw.at(t_sym)?, &x_all, s_sym, t_sym, cfg.horizon);
    let n = x_all.len() as f64;
    let corr_compensated = correlation(comp.at(cfg.qv_time)?, &x_all);
    let pinning = PinningCheck {
        t: cfg.qv_time,
        corr_compensated,
        z_compensated: corr_compensated * n.sqrt(),
        corr_raw: correlation(raw.at(cfg.qv_time)?, &x_all),
        expected_raw: (cfg.qv_time / cfg.horizon).sqrt(),
    };
    let sample = if cfg.export_paths > 0 {
        let ens = simulate_brownian_range(&sim_grid, 0..cfg.export_paths.min(cfg.paths) as u64, seed)?;
        let x = realize_x_ensemble(&spec, &ens)?;
        Some(compensate_brownian(&spec, &ens, &x)?)
    } else {
        None
    };

    let pass = compensated.passed()
        && negative_control.as_ref().is_none_or(|nc| nc.detected)
        && quadratic_variation.passed
        && symmetry.z.abs() <= DEFAULT_THRESHOLD
        && pinning.z_compensated.abs() <= DEFAULT_THRESHOLD
        && defect <= ADDITIVITY_TOL;
    Ok(BridgeReport {
        config: cfg.clone(),
        status: Status::from_pass(pass),
        grid_nodes: spec.grid.len(),
        smallest_step: spec.grid.smallest_step(),
        sim_horizon: spec.sim_horizon,
        epsilon_exclusion: spec.epsilon_exclusion,
        truncation_bound: spec.truncation_bound()?,
        compensated,
        negative_control,
        quadratic_variation,
        symmetry,
        pinning,
        max_additivity_defect: defect,
        mean_fv_variation: summary(&fv_var).mean,
        sample,
    })
}

// ---------------------------------------------------------------------------
// drift-sim

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriftConfig {
    /// `X = ∫ φ dW`.
    pub phi: DeterministicIntegrand,
    /// Integrand `m` of the martingale `M = ∫ m dW`; `None` decomposes `W`.
    pub integrand: Option<DeterministicIntegrand>,
    /// Deterministic `H` integrated against the decomposition.
    pub h: Option<DeterministicIntegrand>,
    pub paths: usize,
    pub seed: u64,
    pub grid: GridConfig,
    pub epsilon: Option<f64>,
    pub battery: TestBattery,
    /// Distances `ε` before the information horizon at which the drift
    /// integral `∫_0^{T-ε} |dA|` is reported.
    pub truncations: Vec<f64>,
    pub ladder: LadderConfig,
    pub overflow_guard: f64,
    pub chunk: usize,
}

impl Default for DriftConfig {
    fn default() -> Self {
        DriftConfig {
            phi: DeterministicIntegrand::indicator(1.0),
            integrand: None,
            h: None,
            paths: 100_000,
            seed: 7,
            grid: GridConfig::log_distance(0.004, 1e-7),
            epsilon: None,
            battery: TestBattery::default(),
            truncations: Vec::new(),
            ladder: LadderConfig::default(),
            overflow_guard: DEFAULT_OVERFLOW_GUARD,
            chunk: 1024,
        }
    }
}

/// Ensemble mean of `∫_0^{T-ε} |dA|` against its Gaussian oracle.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DriftIntegralRung {
    pub epsilon: f64,
    pub mean: f64,
    pub se: f64,
    /// Oracle value of the truncated integral.
    pub expected: f64,
    /// `(mean - expected) / se`; measures discretization bias of the grid.
    pub z_expected: f64,
    /// Oracle mass beyond the truncation point.
    pub tail_bound: f64,
    /// `limit - mean`.
    pub limit_gap: f64,
    /// `|limit_gap| <= 4 SE + tail_bound`.
    pub within: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DriftReport {
    pub config: DriftConfig,
    pub status: Status,
    pub classification: Option<ClassificationVerdict>,
    pub refusal: Option<String>,
    pub grid_nodes: usize,
    pub sim_horizon: f64,
    pub epsilon_exclusion: f64,
    pub truncation_bound: f64,
    pub regression: Option<MartingaleTestReport>,
    /// `E ∫_0^T |dA|` from the Gaussian oracle.
    pub drift_integral_limit: f64,
    pub drift_integral: Vec<DriftIntegralRung>,
    /// Rung means increase as the truncation point approaches the horizon.
    pub drift_integral_monotone: bool,
    pub max_additivity_defect: Option<f64>,
}

impl Report for DriftReport {
    fn status(&self) -> Status {
        self.status
    }

    fn tables(&self) -> Result<Vec<(String, String)>> {
        let mut t = Vec::new();
        if let Some(r) = &self.regression {
            t.push(("tests".to_string(), csv_string(|b| r.write_csv(b))?));
        }
        if !self.drift_integral.is_empty() {
            let mut s = String::from("epsilon,mean,se,expected,tail_bound,limit_gap\n");
            for r in &self.drift_integral {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.epsilon, r.mean, r.se, r.expected, r.tail_bound, r.limit_gap
                ));
            }
            t.push(("drift_integral".into(), s));
        }
        if let Some(c) = &self.classification {
            t.push(("classification".into(), csv_string(|b| c.write_csv(b))?));
        }
        Ok(t)
    }
}

/// Decomposes `W` (or `∫ m dW`) under the enlargement by `X = ∫ φ dW`,
/// optionally integrates `H` against the decomposition, and certifies the
/// martingale part.
pub fn run_drift(cfg: &DriftConfig) -> Result<DriftReport> {
    check_paths(cfg.paths)?;
    let h = info_horizon(&cfg.phi)?;
    let mut times = cfg.battery.times();
    for &e in &cfg.truncations {
        if !(e > 0.0 && e < h) {
            return Err(Error::Config(format!("truncation distance {e} outside (0, {h})")));
        }
        times.push(h - e);
    }
    let spec = enlargement(&cfg.phi, &cfg.grid, cfg.epsilon, &times)?;
    let mut report = DriftReport {
        config: cfg.clone(),
        status: Status::Pass,
        classification: None,
        refusal: None,
        grid_nodes: spec.grid.len(),
        sim_horizon: spec.sim_horizon,
        epsilon_exclusion: spec.epsilon_exclusion,
        truncation_bound: spec.truncation_bound()?,
        regression: None,
        drift_integral_limit: expected_abs_drift_integral(&cfg.phi, cfg.integrand.as_ref(), 0.0, h)?,
        drift_integral: Vec::new(),
        drift_integral_monotone: true,
        max_additivity_defect: None,
    };
    if let Some(m) = &cfg.integrand {
        let c = classifier::classify(m, h, &cfg.ladder)?;
        let status = match c.verdict {
            Verdict::Semimartingale => None,
            Verdict::Undecided => Some(Status::Undecided),
            Verdict::NotSemimartingale | Verdict::NotDefined => Some(Status::Refused),
        };
        report.classification = Some(c.clone());
        if let Some(s) = status {
            report.status = s;
            report.refusal = Some(format!(
                "{m} is {} under the enlargement (Jeulin–Yor functional {}, ∫ m² ds = {}); no decomposition exists",
                c.verdict, c.jy_value, c.l2_value
            ));
            return Ok(report);
        }
    }

    let sim_grid = spec.simulation_grid()?;
    let seed = SeedSpec::new(cfg.seed);
    let obs_times = cfg.battery.times();
    let cut_idx = cfg
        .truncations
        .iter()
        .map(|&e| spec.grid.index_of(h - e))
        .collect::<Result<Vec<_>>>()?;
    let mut mart = Observations::empty(&obs_times);
    let mut state = Observations::empty(&obs_times);
    let mut x_all = Vec::with_capacity(cfg.paths);
    let mut cut_sums: Vec<Vec<f64>> = vec![Vec::with_capacity(cfg.paths); cut_idx.len()];
    let mut defect: f64 = 0.0;
    for range in chunks(cfg.paths, cfg.chunk) {
        let ens = simulate_brownian_range(&sim_grid, range, seed)?;
        let x = realize_x_ensemble(&spec, &ens)?;
        let dec = match &cfg.integrand {
            Some(m) => compensate_martingale(&spec, m, &ens, &x, &cfg.ladder)?,
            None => compensate_brownian(&spec, &ens, &x)?,
        };
        for (j, &k) in cut_idx.iter().enumerate() {
            cut_sums[j].extend(
                dec.fv_part
                    .paths()
                    .map(|a| a[..=k].windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>()),
            );
        }
        let dec = match &cfg.h {
            Some(hh) => match integrate_under_enlargement_with_guard(hh, &dec, cfg.overflow_guard) {
                Ok(d) => d,
                Err(e @ Error::NotIntegrable { .. }) => {
                    report.status = Status::Refused;
                    report.refusal = Some(e.to_string());
                    return Ok(report);
                }
                Err(e) => return Err(e),
            },
            None => dec,
        };
        defect = defect.max(dec.additivity_defect());
        mart.extend_from(&dec.martingale_part)?;
        state.extend_from(&ens)?;
        x_all.extend(x);
    }

    let regression = increment_regression_test(&mart, &state, &x_all, &cfg.battery)?.with_seed(seed);
    let limit = report.drift_integral_limit;
    let rungs = cfg
        .truncations
        .iter()
        .zip(&cut_sums)
        .map(|(&e, sums)| {
            let sm = summary(sums);
            let expected = expected_abs_drift_integral(&cfg.phi, cfg.integrand.as_ref(), 0.0, h - e)?;
            let tail_bound = expected_abs_drift_integral(&cfg.phi, cfg.integrand.as_ref(), h - e, h)?;
            let gap = limit - sm.mean;
            Ok(DriftIntegralRung {
                epsilon: e,
                mean: sm.mean,
                se: sm.se,
                expected,
                z_expected: (sm.mean - expected) / sm.se,
                tail_bound,
                limit_gap: gap,
                within: gap.abs() <= DEFAULT_THRESHOLD * sm.se + tail_bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut by_eps = rungs.clone();
    by_eps.sort_by(|a, b| b.epsilon.total_cmp(&a.epsilon));
    report.drift_integral_monotone = by_eps.windows(2).all(|w| w[1].mean >= w[0].mean);
    let pass = regression.passed()
        && rungs.iter().all(|r| r.within)
        && report.drift_integral_monotone
        && defect <= ADDITIVITY_TOL;
    report.status = Status::from_pass(pass);
    report.regression = Some(regression);
    report.drift_integral = rungs;
    report.max_additivity_defect = Some(defect);
    Ok(report)
}

// ---------------------------------------------------------------------------
// mg-test

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    /// The simulated Brownian path itself.
    Raw,
    /// The path minus its information drift.
    Compensated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MgTestConfig {
    pub process: ProcessKind,
    pub phi: DeterministicIntegrand,
    /// Deterministic drift `μ t` added to the tested process.
    pub drift: f64,
    pub paths: usize,
    pub seed: u64,
    pub grid: GridConfig,
    pub epsilon: Option<f64>,
    pub battery: TestBattery,
    /// Times of the Lévy characterization (consecutive increments).
    pub levy_times: Vec<f64>,
    /// Time of the quadratic-variation check (`None` skips it).
    pub qv_time: Option<f64>,
    pub qv_rel_tol: f64,
    pub chunk: usize,
}

impl Default for MgTestConfig {
    fn default() -> Self {
        MgTestConfig {
            process: ProcessKind::Compensated,
            phi: DeterministicIntegrand::indicator(1.0),
            drift: 0.0,
            paths: 100_000,
            seed: 11,
            grid: GridConfig::default(),
            epsilon: None,
            battery: TestBattery::default(),
            levy_times: vec![0.0, 0.25, 0.5, 0.75],
            qv_time: Some(0.75),
            qv_rel_tol: 0.02,
            chunk: DEFAULT_CHUNK,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MgTestReport {
    pub config: MgTestConfig,
    pub status: Status,
    pub regression: MartingaleTestReport,
    pub levy: LevyReport,
    pub quadratic_variation: Option<QuadraticVariationReport>,
}

impl Report for MgTestReport {
    fn status(&self) -> Status {
        self.status
    }

    fn tables(&self) -> Result<Vec<(String, String)>> {
        Ok(vec![("tests".to_string(), csv_string(|b| self.regression.write_csv(b))?)])
    }
}

/// Martingale battery, Lévy characterization and quadratic variation of a
/// raw or compensated Brownian path in the enlarged filtration.
pub fn run_mg_test(cfg: &MgTestConfig) -> Result<MgTestReport> {
    check_paths(cfg.paths)?;
    let mut times = cfg.battery.times();
    times.extend(&cfg.levy_times);
    times.extend(cfg.qv_time);
    let spec = enlargement(&cfg.phi, &cfg.grid, cfg.epsilon, &times)?;
    times.sort_by(f64::total_cmp);
    times.dedup();
    let sim_grid = spec.simulation_grid()?;
    let seed = SeedSpec::new(cfg.seed);
    let mut tested = Observations::empty(&times);
    let mut state = Observations::empty(&times);
    let mut x_all = Vec::with_capacity(cfg.paths);
    let mut qv = Vec::new();
    for range in chunks(cfg.paths, cfg.chunk) {
        let ens = simulate_brownian_range(&sim_grid, range, seed)?;
        let x = realize_x_ensemble(&spec, &ens)?;
        let process = match cfg.process {
            ProcessKind::Raw => ens.truncated(spec.grid.len())?,
            ProcessKind::Compensated => compensate_brownian(&spec, &ens, &x)?.martingale_part,
        };
        tested.extend_from(&process)?;
        state.extend_from(&ens)?;
        if let Some(t) = cfg.qv_time {
            qv.extend(quadratic_variation_with_drift(&process, t, cfg.drift)?);
        }
        x_all.extend(x);
    }
    let mu = cfg.drift;
    tested.add_deterministic(|t| mu * t);
    let regression = increment_regression_test(&tested, &state, &x_all, &cfg.battery)?.with_seed(seed);
    let levy = levy_characterization_suite(&tested, &cfg.levy_times, cfg.battery.threshold)?;
    let quadratic_variation = cfg
        .qv_time
        .map(|t| QuadraticVariationReport::from_values(&qv, t, t, cfg.qv_rel_tol));
    let pass = regression.passed() && levy.passed() && quadratic_variation.as_ref().is_none_or(|q| q.passed);
    Ok(MgTestReport {
        config: cfg.clone(),
        status: Status::from_pass(pass),
        regression,
        levy,
        quadratic_variation,
    })
}

fn quadratic_variation_with_drift(ens: &PathEnsemble, t: f64, drift: f64) -> Result<Vec<f64>> {
    let k = ens.grid().index_of(t)?;
    let nodes = ens.grid().nodes();
    Ok(ens
        .paths()
        .map(|p| {
            (0..k)
                .map(|i| (p[i + 1] - p[i] + drift * (nodes[i + 1] - nodes[i])).powi(2))
                .sum()
        })
        .collect())
}

// ---------------------------------------------------------------------------
// levy-demo

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LevyConfig {
    pub rate: f64,
    pub jumps: JumpLaw,
    pub paths: usize,
    pub seed: u64,
    pub steps: usize,
    pub horizon: f64,
    pub battery: TestBattery,
    /// Times `s` at which `E[Z_T - Z_s] = λ E[J] (T - s)` is checked.
    pub mean_check_times: Vec<f64>,
    pub chunk: usize,
}

impl Default for LevyConfig {
    fn default() -> Self {
        LevyConfig {
            rate: 1.0,
            jumps: JumpLaw::Symmetric(1.0),
            paths: 100_000,
            seed: 5,
            steps: 1024,
            horizon: 1.0,
            battery: TestBattery::new(&[(0.25, 0.5), (0.5, 0.75)], &[Basis::One, Basis::State, Basis::Info])
                .named("Z", "Z_1"),
            mean_check_times: vec![0.25, 0.5, 0.75],
            chunk: DEFAULT_CHUNK,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MeanCheck {
    pub s: f64,
    pub estimate: f64,
    pub se: f64,
    pub expected: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevyDemoReport {
    pub config: LevyConfig,
    pub status: Status,
    pub regression: MartingaleTestReport,
    pub mean_checks: Vec<MeanCheck>,
    pub max_additivity_defect: f64,
}

impl Report for LevyDemoReport {
    fn status(&self) -> Status {
        self.status
    }

    fn tables(&self) -> Result<Vec<(String, String)>> {
        Ok(vec![("tests".to_string(), csv_string(|b| self.regression.write_csv(b))?)])
    }
}

/// Compound Poisson bridge compensator `Z = M + ∫ (Z_T - Z_s)/(T - s) ds`
/// under enlargement by `Z_T`, certified by the regression battery.
pub fn run_levy(cfg: &LevyConfig) -> Result<LevyDemoReport> {
    check_paths(cfg.paths)?;
    let mut times = cfg.battery.times();
    times.extend(&cfg.mean_check_times);
    if let Some(&t) = times.iter().find(|&&t| !(t >= 0.0 && t < cfg.horizon)) {
        return Err(Error::Config(format!("time {t} outside [0, {})", cfg.horizon)));
    }
    let grid = build_grid(cfg.horizon, cfg.steps, None)?.with_nodes(&times)?;
    times.sort_by(f64::total_cmp);
    times.dedup();
    let seed = SeedSpec::new(cfg.seed);
    let mut mart = Observations::empty(&times);
    let mut state = Observations::empty(&times);
    let mut z_end = Vec::with_capacity(cfg.paths);
    let mut defect: f64 = 0.0;
    for range in chunks(cfg.paths, cfg.chunk) {
        let ens = simulate_compound_poisson_range(&grid, cfg.rate, cfg.jumps, range, seed)?;
        let z1 = ens.column(ens.n_nodes() - 1);
        let dec = levy_bridge_compensator(&ens, &z1, cfg.horizon)?;
        defect = defect.max(dec.additivity_defect());
        mart.extend_from(&dec.martingale_part)?;
        state.extend_from(&ens)?;
        z_end.extend(z1);
    }
    let regression = increment_regression_test(&mart, &state, &z_end, &cfg.battery)?.with_seed(seed);
    let mean_checks = cfg
        .mean_check_times
        .iter()
        .map(|&s| {
            let zs = state.at(s)?;
            let d: Vec<f64> = z_end.iter().zip(zs).map(|(a, b)| a - b).collect();
            let sm = summary(&d);
            let expected = cfg.rate * cfg.jumps.mean() * (cfg.horizon - s);
            let diff = sm.mean - expected;
            Ok(MeanCheck {
                s,
                estimate: sm.mean,
                se: sm.se,
                expected,
                z: if diff == 0.0 { 0.0 } else { diff / sm.se },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pass = regression.passed()
        && mean_checks.iter().all(|m| m.z.abs() <= DEFAULT_THRESHOLD)
        && defect <= ADDITIVITY_TOL;
    Ok(LevyDemoReport {
        config: cfg.clone(),
        status: Status::from_pass(pass),
        regression,
        mean_checks,
        max_additivity_defect: defect,
    })
}

// ---------------------------------------------------------------------------
// lookahead-demo

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LookaheadConfig {
    pub epsilon: f64,
    pub levels: Vec<u32>,
    pub delta: f64,
    pub paths: usize,
    pub seed: u64,
    pub threshold: f64,
    pub chunk: usize,
}

impl Default for LookaheadConfig {
    fn default() -> Self {
        LookaheadConfig {
            epsilon: 1.0 / 64.0,
            levels: vec![8, 10, 12],
            delta: 0.25,
            paths: 50_000,
            seed: 3,
            threshold: DEFAULT_THRESHOLD,
            chunk: 2048,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LookaheadDemoReport {
    pub config: LookaheadConfig,
    pub status: Status,
    pub report: LookaheadReport,
}

impl Report for LookaheadDemoReport {
    fn status(&self) -> Status {
        self.status
    }

    fn tables(&self) -> Result<Vec<(String, String)>> {
        let mut s = String::from("level,mean_integral,se,z,second_moment,p_sup_exceeds,tail_bound\n");
        for l in &self.report.levels {
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                l.level, l.mean_integral, l.se, l.z, l.second_moment, l.p_sup_exceeds, l.tail_bound
            ));
        }
        Ok(vec![("levels".into(), s)])
    }
}

/// The look-ahead integrands `H^n` on the dyadic grid of the finest level.
pub fn run_lookahead(cfg: &LookaheadConfig) -> Result<LookaheadDemoReport> {
    check_paths(cfg.paths)?;
    let finest = *cfg
        .levels
        .iter()
        .max()
        .ok_or_else(|| Error::Config("no dyadic levels".into()))?;
    if finest > 20 {
        return Err(Error::Config(format!("level {finest} is too fine to simulate")));
    }
    let grid = TimeGrid::uniform(1.0, 1 << finest);
    let seed = SeedSpec::new(cfg.seed);
    let mut sample = LookaheadSample::default();
    for range in chunks(cfg.paths, cfg.chunk) {
        let ens = simulate_brownian_range(&grid, range, seed)?;
        sample.merge(LookaheadSample::collect(&ens, cfg.epsilon, &cfg.levels)?)?;
    }
    let report = sample.report(cfg.epsilon, cfg.delta, cfg.threshold);
    Ok(LookaheadDemoReport {
        config: cfg.clone(),
        status: Status::from_pass(report.verdict == crate::martingale::TestVerdict::Pass),
        report,
    })
}

// ---------------------------------------------------------------------------
// jeulin-probe

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeRunConfig {
    pub integrand: DeterministicIntegrand,
    pub horizon: f64,
    pub paths: usize,
    pub seed: u64,
    pub probe: ProbeConfig,
}

impl Default for ProbeRunConfig {
    fn default() -> Self {
        ProbeRunConfig {
            integrand: DeterministicIntegrand::product(
                DeterministicIntegrand::jeulin_yor(0.75, 1.0),
                DeterministicIntegrand::power(-0.5, 1.0),
            ),
            horizon: 1.0,
            paths: 10_000,
            seed: 13,
            probe: ProbeConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeRunReport {
    pub config: ProbeRunConfig,
    pub status: Status,
    pub report: ProbeReport,
}

impl Report for ProbeRunReport {
    fn status(&self) -> Status {
        self.status
    }

    fn tables(&self) -> Result<Vec<(String, String)>> {
        let mut s = String::from("k,u,ln_epsilon,mean,expected_mean,fraction_above_ceiling\n");
        for r in &self.report.rungs {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.k, r.u, r.ln_epsilon, r.mean, r.expected_mean, r.fraction_above_ceiling
            ));
        }
        Ok(vec![("rungs".into(), s)])
    }
}

pub fn run_probe(cfg: &ProbeRunConfig) -> Result<ProbeRunReport> {
    let report = jeulin_lemma_probe(&cfg.integrand, cfg.horizon, cfg.paths, SeedSpec::new(cfg.seed), &cfg.probe)?;
    Ok(ProbeRunReport {
        config: cfg.clone(),
        status: Status::from_pass(report.verdict == crate::martingale::TestVerdict::Pass),
        report,
    })
}

// ---------------------------------------------------------------------------
// classify

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyConfig {
    pub integrand: DeterministicIntegrand,
    /// Horizon `T` of the enlargement by `W_T`; defaults to the end of the
    /// integrand's support.
    pub horizon: Option<f64>,
    pub ladder: LadderConfig,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            integrand: DeterministicIntegrand::jeulin_yor(0.75, 1.0),
            horizon: None,
            ladder: LadderConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub config: ClassifyConfig,
    pub status: Status,
    pub verdict: ClassificationVerdict,
}

impl Report for ClassifyReport {
    fn status(&self) -> Status {
        self.status
    }

    fn tables(&self) -> Result<Vec<(String, String)>> {
        Ok(vec![("verdict".to_string(), csv_string(|b| self.verdict.write_csv(b))?)])
    }
}

pub fn run_classify(cfg: &ClassifyConfig) -> Result<ClassifyReport> {
    let horizon = match cfg.horizon {
        Some(t) => t,
        None => cfg.integrand.support_end().filter(|&t| t > 0.0).unwrap_or(1.0),
    };
    let verdict = classifier::classify(&cfg.integrand, horizon, &cfg.ladder)?;
    let status = match verdict.verdict {
        Verdict::Semimartingale => Status::Pass,
        Verdict::NotSemimartingale | Verdict::NotDefined => Status::Refused,
        Verdict::Undecided => Status::Undecided,
    };
    Ok(ClassifyReport {
        config: cfg.clone(),
        status,
        verdict,
    })
}

// ---------------------------------------------------------------------------
// finite-demo

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FiniteConfig {
    /// Instance file to verify.
    pub instance: Option<PathBuf>,
    /// Number of random instances to verify.
    pub random: usize,
    pub seed: u64,
    pub max_outcomes: usize,
    pub max_stages: usize,
    pub max_values: usize,
    pub allow_null: bool,
}

impl Default for FiniteConfig {
    fn default() -> Self {
        FiniteConfig {
            instance: None,
            random: 0,
            seed: 1,
            max_outcomes: 8,
            max_stages: 3,
            max_values: 3,
            allow_null: false,
        }
    }
}

/// Aggregate over random instances.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RandomBatch {
    pub instances: usize,
    pub absolutely_continuous: usize,
    pub likelihood_qbar_martingale: usize,
    pub compensated_g_martingale: usize,
    pub matches_doob: usize,
    pub jacod_checks: usize,
    /// Indices of instances failing any check.
    pub failures: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FiniteRunReport {
    pub config: FiniteConfig,
    pub status: Status,
    pub instance: Option<FiniteDemoReport>,
    pub random: Option<RandomBatch>,
}

impl Report for FiniteRunReport {
    fn status(&self) -> Status {
        self.status
    }
}

pub fn run_finite(cfg: &FiniteConfig) -> Result<FiniteRunReport> {
    if cfg.instance.is_none() && cfg.random == 0 {
        return Err(Error::Config("give an instance file or a number of random instances".into()));
    }
    let instance = cfg
        .instance
        .as_deref()
        .map(|p| FiniteInstance::from_path(p).and_then(|i| i.run()))
        .transpose()?;
    let random = (cfg.random > 0).then(|| {
        let spec = RandomInstanceSpec {
            max_outcomes: cfg.max_outcomes,
            max_stages: cfg.max_stages,
            max_values: cfg.max_values,
            allow_null: cfg.allow_null,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut batch = RandomBatch::default();
        for i in 0..cfg.random {
            let rep = random_instance(&spec, &mut rng).run()?;
            batch.instances += 1;
            batch.absolutely_continuous += rep.absolute_continuity.holds as usize;
            if let Some(g) = &rep.girsanov {
                batch.likelihood_qbar_martingale += g.likelihood_is_qbar_martingale as usize;
                batch.compensated_g_martingale += g.compensated_is_g_martingale as usize;
                batch.matches_doob += g.matches_doob_decomposition as usize;
            }
            batch.jacod_checks += rep.jacod.all_hold() as usize;
            if !rep.passed {
                batch.failures.push(i);
            }
        }
        Ok::<_, Error>(batch)
    });
    let random = random.transpose()?;
    let pass = instance.as_ref().is_none_or(|r| r.passed) && random.as_ref().is_none_or(|b| b.failures.is_empty());
    Ok(FiniteRunReport {
        config: cfg.clone(),
        status: Status::from_pass(pass),
        instance,
        random,
    })
}

// ---------------------------------------------------------------------------
// self-convergence of the conditional-density identity

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelfConvergenceConfig {
    pub phi: DeterministicIntegrand,
    /// Time at which the identity residual is evaluated.
    pub t: f64,
    /// Steps of the finest uniform grid on `[0, T]`.
    pub fine_steps: usize,
    /// Number of grids; each halves the step of the previous one.
    pub levels: usize,
    pub paths: usize,
    pub seed: u64,
    /// Allowed relative deviation of each RMS ratio from `1/√2`.
    pub tolerance: f64,
    pub chunk: usize,
}

impl Default for SelfConvergenceConfig {
    fn default() -> Self {
        SelfConvergenceConfig {
            phi: DeterministicIntegrand::indicator(1.0),
            t: 0.5,
            fine_steps: 1024,
            levels: 4,
            paths: 10_000,
            seed: 17,
            tolerance: 0.25,
            chunk: DEFAULT_CHUNK,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConvergenceLevel {
    pub steps: usize,
    pub rms_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelfConvergenceReport {
    pub config: SelfConvergenceConfig,
    pub status: Status,
    /// Coarsest first.
    pub levels: Vec<ConvergenceLevel>,
    /// RMS at each level over RMS at the previous (coarser) one.
    pub ratios: Vec<f64>,
    pub expected_ratio: f64,
}

impl Report for SelfConvergenceReport {
    fn status(&self) -> Status {
        self.status
    }
}

/// RMS of the log-density identity residual at `t` on nested uniform grids
/// driven by the same paths.
pub fn run_self_convergence(cfg: &SelfConvergenceConfig) -> Result<SelfConvergenceReport> {
    check_paths(cfg.paths)?;
    let h = info_horizon(&cfg.phi)?;
    if cfg.levels < 2 || cfg.fine_steps >> (cfg.levels - 1) < 2 {
        return Err(Error::Config("need at least two levels and two steps on the coarsest grid".into()));
    }
    let fine = TimeGrid::uniform(h, cfg.fine_steps);
    let w_phi = cfg.phi.sample(fine.nodes())?;
    let seed = SeedSpec::new(cfg.seed);
    // coarsest first
    let setups = (0..cfg.levels)
        .rev()
        .map(|j| {
            let (g, idx) = fine.coarsened(1 << j)?;
            let k = g.index_of(cfg.t)?;
            let trunc = TimeGrid::from_nodes(g.nodes()[..=k].to_vec())?;
            Ok((DriftProfile::new(&cfg.phi, &trunc)?, idx[..=k].to_vec(), k))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sq: Vec<Vec<f64>> = vec![Vec::with_capacity(cfg.paths); cfg.levels];
    for range in chunks(cfg.paths, cfg.chunk) {
        let ens = simulate_brownian_range(&fine, range, seed)?;
        for p in ens.paths() {
            let x = *crate::gaussian::left_point_integral(&w_phi, p).last().unwrap();
            for (j, (profile, idx, k)) in setups.iter().enumerate() {
                let coarse: Vec<f64> = idx.iter().map(|&i| p[i]).collect();
                let r = profile.log_density_residual(&coarse, x, *k)?;
                sq[j].push(r * r);
            }
        }
    }
    let levels: Vec<ConvergenceLevel> = sq
        .iter()
        .enumerate()
        .map(|(j, v)| ConvergenceLevel {
            steps: cfg.fine_steps >> (cfg.levels - 1 - j),
            rms_residual: summary(v).mean.sqrt(),
        })
        .collect();
    let ratios: Vec<f64> = levels.windows(2).map(|w| w[1].rms_residual / w[0].rms_residual).collect();
    let expected_ratio = std::f64::consts::FRAC_1_SQRT_2;
    let pass = ratios
        .iter()
        .all(|r| (r / expected_ratio - 1.0).abs() <= cfg.tolerance);
    Ok(SelfConvergenceReport {
        config: cfg.clone(),
        status: Status::from_pass(pass),
        levels,
        ratios,
        expected_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunk_ranges_cover_paths() {
        let r: Vec<_> = chunks(10, 4).collect();
        assert_eq!(r, vec![0..4, 4..8, 8..10]);
        assert_eq!(chunks(0, 4).count(), 0);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Status::Pass.exit_code(), 0);
        assert_eq!(Status::StatisticalFail.exit_code(), 2);
        assert_eq!(Status::Refused.exit_code(), 3);
        assert_eq!(Status::Undecided.exit_code(), 4);
    }

    #[test]
    fn configs_reject_unknown_keys() {
        assert!(toml::from_str::<BridgeConfig>("paths = 10\nbogus = 1").is_err());
        let c: BridgeConfig = toml::from_str("paths = 10\n[grid]\nkind = \"uniform\"\nsteps = 64").unwrap();
        assert_eq!(c.paths, 10);
        assert_eq!(c.grid.kind, GridKind::Uniform);
        assert_eq!(c.seed, BridgeConfig::default().seed);
    }

    #[test]
    fn bridge_results_do_not_depend_on_chunking() {
        let cfg = BridgeConfig {
            paths: 600,
            grid: GridConfig::refined(64, 0.5),
            chunk: 600,
            ..BridgeConfig::default()
        };
        let a = run_bridge(&cfg).unwrap();
        let b = run_bridge(&BridgeConfig { chunk: 97, ..cfg }).unwrap();
        assert_eq!(
            serde_json::to_value(&a.compensated).unwrap(),
            serde_json::to_value(&b.compensated).unwrap()
        );
        assert_eq!(a.symmetry.slope, b.symmetry.slope);
    }

    #[test]
    fn refused_integrand_skips_simulation() {
        let cfg = DriftConfig {
            integrand: Some(DeterministicIntegrand::jeulin_yor(0.75, 1.0)),
            paths: 10,
            ..DriftConfig::default()
        };
        let r = run_drift(&cfg).unwrap();
        assert_eq!(r.status, Status::Refused);
        assert!(r.regression.is_none());
    }

    #[test]
    fn classify_statuses() {
        let r = run_classify(&ClassifyConfig::default()).unwrap();
        assert_eq!(r.status, Status::Refused);
        let r = run_classify(&ClassifyConfig {
            integrand: DeterministicIntegrand::jeulin_yor(1.25, 1.0),
            ..ClassifyConfig::default()
        })
        .unwrap();
        assert_eq!(r.status, Status::Pass);
    }
}
