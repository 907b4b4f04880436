//! Monte Carlo certification of martingale and Brownian behavior in an
//! enlarged filtration, the look-ahead non-integrator demonstration, and an
//! empirical probe of Jeulin's lemma.
//!
//! Martingale tests are weak-form: for `s < t` and a `G_s`-measurable test
//! function `g(W_s, X)`, the sample mean of `(M_t - M_s) g` must vanish
//! within its standard error. A battery of such tests is judged with a
//! Bonferroni-corrected `|z|` threshold.
//!
//! Statistics operate on [`Observations`], a column store of process values
//! at selected times, so that ensembles too large for memory can be
//! simulated in chunks and concatenated.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{self, FunctionalValue, LadderConfig};
use crate::error::{Error, Result};
use crate::integrand::DeterministicIntegrand;
use crate::paths::PathEnsemble;
use crate::rng::{SeedSpec, StreamDomain};
use crate::stats::{self, bonferroni_critical, summary};

pub const DEFAULT_THRESHOLD: f64 = 4.0;

const TIME_MATCH_TOL: f64 = 1e-12;

/// Values of one process on every path at a few times.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Observations {
    times: Vec<f64>,
    /// `columns[j][p]` is the value at `times[j]` on path `p`.
    columns: Vec<Vec<f64>>,
}

impl Observations {
    pub fn empty(times: &[f64]) -> Self {
        Observations {
            times: times.to_vec(),
            columns: vec![Vec::new(); times.len()],
        }
    }

    pub fn from_ensemble(ens: &PathEnsemble, times: &[f64]) -> Result<Self> {
        let mut o = Self::empty(times);
        o.extend_from(ens)?;
        Ok(o)
    }

    /// Appends the paths of `ens` (chunked simulation).
    pub fn extend_from(&mut self, ens: &PathEnsemble) -> Result<()> {
        for (j, &t) in self.times.iter().enumerate() {
            let k = ens.grid().index_of(t)?;
            self.columns[j].extend(ens.paths().map(|p| p[k]));
        }
        Ok(())
    }

    pub fn append(&mut self, other: &Observations) -> Result<()> {
        if other.times != self.times {
            return Err(Error::Shape("observation times differ".into()));
        }
        for (a, b) in self.columns.iter_mut().zip(&other.columns) {
            a.extend_from_slice(b);
        }
        Ok(())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Adds the deterministic function `f(t)` to the values at every time.
    pub fn add_deterministic(&mut self, f: impl Fn(f64) -> f64) {
        for (t, col) in self.times.iter().zip(&mut self.columns) {
            let shift = f(*t);
            col.iter_mut().for_each(|v| *v += shift);
        }
    }

    pub fn n_paths(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn at(&self, t: f64) -> Result<&[f64]> {
        let tol = TIME_MATCH_TOL * t.abs().max(1.0);
        self.times
            .iter()
            .position(|&x| (x - t).abs() <= tol)
            .map(|j| self.columns[j].as_slice())
            .ok_or(Error::NotOnGrid { t })
    }
}

/// `G_s`-measurable test functions of the state `S_s` (e.g. `W_s`) and the
/// added information `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Basis {
    One,
    State,
    Info,
    StateTimesInfo,
    StateSquared,
    InfoMinusState,
}

impl Basis {
    pub const DEFAULT: [Basis; 5] = [
        Basis::One,
        Basis::State,
        Basis::Info,
        Basis::StateTimesInfo,
        Basis::StateSquared,
    ];

    pub fn eval(&self, state: f64, info: f64) -> f64 {
        match self {
            Basis::One => 1.0,
            Basis::State => state,
            Basis::Info => info,
            Basis::StateTimesInfo => state * info,
            Basis::StateSquared => state * state,
            Basis::InfoMinusState => info - state,
        }
    }

    /// Label with the given state and info names, e.g. `W_s*X`.
    pub fn label(&self, state: &str, info: &str) -> String {
        match self {
            Basis::One => "1".into(),
            Basis::State => format!("{state}_s"),
            Basis::Info => info.into(),
            Basis::StateTimesInfo => format!("{state}_s*{info}"),
            Basis::StateSquared => format!("{state}_s^2"),
            Basis::InfoMinusState => format!("{info}-{state}_s"),
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::One => "1",
            Basis::State => "S",
            Basis::Info => "X",
            Basis::StateTimesInfo => "S*X",
            Basis::StateSquared => "S^2",
            Basis::InfoMinusState => "X-S",
        })
    }
}

/// Accepts `1`, `S`/`W`/`Z`, `X`, `S*X`, `S^2`, `X-S` (any state letter).
impl FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .trim()
            .replace("_s", "")
            .chars()
            .map(|c| if matches!(c, 'W' | 'Z') { 'S' } else { c })
            .collect::<String>()
            .replace("Ss", "S");
        Ok(match norm.as_str() {
            "1" => Basis::One,
            "S" => Basis::State,
            "X" => Basis::Info,
            "S*X" | "SX" => Basis::StateTimesInfo,
            "S^2" | "S2" => Basis::StateSquared,
            "X-S" => Basis::InfoMinusState,
            _ => return Err(Error::Config(format!("unknown basis function `{s}`"))),
        })
    }
}

impl TryFrom<String> for Basis {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Basis> for String {
    fn from(b: Basis) -> String {
        b.to_string()
    }
}

/// Pairs, basis and threshold of an increment-regression battery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TestBattery {
    pub pairs: Vec<(f64, f64)>,
    pub basis: Vec<Basis>,
    /// Single-test `|z|` limit; the battery limit is Bonferroni-corrected.
    pub threshold: f64,
    pub state_name: String,
    pub info_name: String,
}

impl Default for TestBattery {
    fn default() -> Self {
        TestBattery {
            pairs: vec![(0.25, 0.5), (0.5, 0.75)],
            basis: Basis::DEFAULT.to_vec(),
            threshold: DEFAULT_THRESHOLD,
            state_name: "W".into(),
            info_name: "X".into(),
        }
    }
}

impl TestBattery {
    pub fn new(pairs: &[(f64, f64)], basis: &[Basis]) -> Self {
        TestBattery {
            pairs: pairs.to_vec(),
            basis: basis.to_vec(),
            ..Self::default()
        }
    }

    pub fn named(mut self, state: &str, info: &str) -> Self {
        self.state_name = state.into();
        self.info_name = info.into();
        self
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    /// Every time a test needs, sorted and deduplicated.
    pub fn times(&self) -> Vec<f64> {
        let mut t: Vec<f64> = self.pairs.iter().flat_map(|&(s, t)| [s, t]).collect();
        t.sort_by(f64::total_cmp);
        t.dedup();
        t
    }

    fn validate(&self) -> Result<()> {
        if self.basis.is_empty() {
            return Err(Error::InvalidArgument("empty test basis".into()));
        }
        if self.pairs.is_empty() {
            return Err(Error::InvalidArgument("no (s, t) pairs".into()));
        }
        if let Some(&(s, t)) = self.pairs.iter().find(|(s, t)| !(s < t)) {
            return Err(Error::InvalidArgument(format!("need s < t, got ({s}, {t})")));
        }
        if !(self.threshold > 0.0) {
            return Err(Error::InvalidArgument("threshold must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestRecord {
    pub s: f64,
    pub t: f64,
    pub basis: String,
    pub estimate: f64,
    pub se: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correction {
    pub rule: String,
    pub threshold: f64,
    pub n_tests: usize,
    /// Per-test `|z|` limit after correction.
    pub critical: f64,
}

impl Correction {
    pub fn bonferroni(threshold: f64, n_tests: usize) -> Self {
        Correction {
            rule: "bonferroni".into(),
            threshold,
            n_tests,
            critical: bonferroni_critical(threshold, n_tests),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestVerdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MartingaleTestReport {
    pub tests: Vec<TestRecord>,
    pub n_paths: usize,
    pub correction: Correction,
    pub max_abs_z: f64,
    pub verdict: TestVerdict,
    pub seeds: Option<SeedSpec>,
}

impl MartingaleTestReport {
    pub fn passed(&self) -> bool {
        self.verdict == TestVerdict::Pass
    }

    pub fn with_seed(mut self, seed: SeedSpec) -> Self {
        self.seeds = Some(seed);
        self
    }

    pub fn find(&self, s: f64, t: f64, basis: &str) -> Option<&TestRecord> {
        self.tests.iter().find(|r| r.s == s && r.t == t && r.basis == basis)
    }

    pub const CSV_HEADER: &'static str = "s,t,basis,estimate,se,z";

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for r in &self.tests {
            writeln!(out, "{:?},{:?},{},{:?},{:?},{:?}", r.s, r.t, r.basis, r.estimate, r.se, r.z)?;
        }
        Ok(())
    }
}

fn z_score(estimate: f64, se: f64) -> f64 {
    if estimate == 0.0 {
        0.0
    } else {
        estimate / se
    }
}

fn verdict(max_abs_z: f64, critical: f64) -> TestVerdict {
    if max_abs_z <= critical {
        TestVerdict::Pass
    } else {
        TestVerdict::Fail
    }
}

/// Weak-form martingale test of `process` against `g(state_s, info)` for
/// every pair and basis function of the battery.
pub fn increment_regression_test(
    process: &Observations,
    state: &Observations,
    info: &[f64],
    battery: &TestBattery,
) -> Result<MartingaleTestReport> {
    battery.validate()?;
    let n = process.n_paths();
    if n < 2 || state.n_paths() != n || info.len() != n {
        return Err(Error::Shape(format!(
            "{} process paths, {} state paths, {} info values (need equal and at least 2)",
            n,
            state.n_paths(),
            info.len()
        )));
    }
    let mut tests = Vec::with_capacity(battery.pairs.len() * battery.basis.len());
    for &(s, t) in &battery.pairs {
        let ms = process.at(s)?;
        let mt = process.at(t)?;
        let ws = state.at(s)?;
        for b in &battery.basis {
            let prod: Vec<f64> = (0..n).map(|p| (mt[p] - ms[p]) * b.eval(ws[p], info[p])).collect();
            let sm = summary(&prod);
            tests.push(TestRecord {
                s,
                t,
                basis: b.label(&battery.state_name, &battery.info_name),
                estimate: sm.mean,
                se: sm.se,
                z: z_score(sm.mean, sm.se),
            });
        }
    }
    let correction = Correction::bonferroni(battery.threshold, tests.len());
    let max_abs_z = tests.iter().map(|r| r.z.abs()).fold(0.0, f64::max);
    Ok(MartingaleTestReport {
        n_paths: n,
        verdict: verdict(max_abs_z, correction.critical),
        correction,
        max_abs_z,
        tests,
        seeds: None,
    })
}

/// [`increment_regression_test`] on whole ensembles; `state` may live on a
/// different grid as long as it has the needed nodes.
pub fn increment_regression_test_ensemble(
    process: &PathEnsemble,
    state: &PathEnsemble,
    info: &[f64],
    battery: &TestBattery,
) -> Result<MartingaleTestReport> {
    let times = battery.times();
    let report = increment_regression_test(
        &Observations::from_ensemble(process, &times)?,
        &Observations::from_ensemble(state, &times)?,
        info,
        battery,
    )?;
    Ok(match process.seed_record() {
        Some(r) => report.with_seed(r.seed),
        None => report,
    })
}

/// Per-path discrete quadratic variation `Σ (ΔM)²` on `[0, t]`.
pub fn quadratic_variation(ens: &PathEnsemble, t: f64) -> Result<Vec<f64>> {
    let k = ens.grid().index_of(t)?;
    Ok(ens
        .paths()
        .map(|p| p[..=k].windows(2).map(|w| (w[1] - w[0]).powi(2)).sum())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticVariationReport {
    pub t: f64,
    pub n_paths: usize,
    pub mean: f64,
    pub se: f64,
    pub expected: f64,
    pub rel_error: f64,
    pub rel_tol: f64,
    pub passed: bool,
}

impl QuadraticVariationReport {
    pub fn from_values(qv: &[f64], t: f64, expected: f64, rel_tol: f64) -> Self {
        let sm = summary(qv);
        let err = (sm.mean - expected).abs();
        QuadraticVariationReport {
            t,
            n_paths: qv.len(),
            mean: sm.mean,
            se: sm.se,
            expected,
            rel_error: if expected == 0.0 { err } else { err / expected.abs() },
            rel_tol,
            passed: err <= rel_tol * expected.abs(),
        }
    }
}

/// Ensemble mean of the discrete quadratic variation on `[0, t]` against `expected`.
pub fn quadratic_variation_test(ens: &PathEnsemble, t: f64, expected: f64, rel_tol: f64) -> Result<QuadraticVariationReport> {
    let qv = quadratic_variation(ens, t)?;
    Ok(QuadraticVariationReport::from_values(&qv, t, expected, rel_tol))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyCheck {
    pub check: String,
    pub s: f64,
    pub t: f64,
    pub estimate: f64,
    pub expected: f64,
    pub se: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevyReport {
    pub checks: Vec<LevyCheck>,
    pub n_paths: usize,
    pub correction: Correction,
    pub max_abs_z: f64,
    pub verdict: TestVerdict,
}

impl LevyReport {
    pub fn passed(&self) -> bool {
        self.verdict == TestVerdict::Pass
    }
}

/// Moment checks of Brownian increments over consecutive `times`: mean 0,
/// variance `Δt`, skewness 0, excess kurtosis 0, and zero correlation of
/// neighbouring increments.
pub fn levy_characterization_suite(obs: &Observations, times: &[f64], threshold: f64) -> Result<LevyReport> {
    if times.len() < 2 {
        return Err(Error::InvalidArgument("need at least two times".into()));
    }
    let n = obs.n_paths();
    if n < 4 {
        return Err(Error::Shape("need at least 4 paths".into()));
    }
    let nf = n as f64;
    let mut checks = Vec::new();
    let mut increments: Vec<Vec<f64>> = Vec::new();
    for w in times.windows(2) {
        let (s, t) = (w[0], w[1]);
        if !(t > s) {
            return Err(Error::InvalidArgument("times must increase".into()));
        }
        let a = obs.at(s)?;
        let b = obs.at(t)?;
        let d: Vec<f64> = b.iter().zip(a).map(|(b, a)| b - a).collect();
        let sm = summary(&d);
        let dt = t - s;
        let mut push = |check: &str, estimate: f64, expected: f64, se: f64| {
            checks.push(LevyCheck {
                check: check.into(),
                s,
                t,
                estimate,
                expected,
                se,
                z: z_score(estimate - expected, se),
            })
        };
        push("mean", sm.mean, 0.0, sm.se);
        let m2 = sm.variance * (nf - 1.0) / nf;
        push("variance", sm.variance, dt, ((sm.m4 - m2 * m2) / nf).sqrt());
        push("skewness", sm.skewness, 0.0, (6.0 / nf).sqrt());
        push("excess_kurtosis", sm.excess_kurtosis, 0.0, (24.0 / nf).sqrt());
        increments.push(d);
    }
    for j in 1..increments.len() {
        let r = stats::correlation(&increments[j - 1], &increments[j]);
        checks.push(LevyCheck {
            check: "correlation".into(),
            s: times[j - 1],
            t: times[j + 1],
            estimate: r,
            expected: 0.0,
            se: 1.0 / nf.sqrt(),
            z: r * nf.sqrt(),
        });
    }
    let correction = Correction::bonferroni(threshold, checks.len());
    let max_abs_z = checks.iter().map(|c| c.z.abs()).fold(0.0, f64::max);
    Ok(LevyReport {
        n_paths: n,
        verdict: verdict(max_abs_z, correction.critical),
        correction,
        max_abs_z,
        checks,
    })
}

pub fn levy_characterization_suite_ensemble(ens: &PathEnsemble, times: &[f64], threshold: f64) -> Result<LevyReport> {
    levy_characterization_suite(&Observations::from_ensemble(ens, times)?, times, threshold)
}

/// Per-path statistics of the look-ahead integrands `H^n`, where `H^n`
/// equals the dyadic increment `Δ^n_k W` on `(k 2^{-n}, (k+1) 2^{-n}]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LookaheadSample {
    pub levels: Vec<u32>,
    /// `(H^n • W)_1 = Σ_k (Δ^n_k W)²`, per level and path.
    pub integral: Vec<Vec<f64>>,
    /// `sup_t |H^n_t| = max_k |Δ^n_k W|`, per level and path.
    pub sup: Vec<Vec<f64>>,
}

impl LookaheadSample {
    /// Requires every level to satisfy `2^{-n} <= epsilon` (so that `H^n`
    /// is predictable for the `epsilon`-look-ahead filtration) and the
    /// ensemble grid to contain the dyadic nodes of every level on `[0, 1]`.
    pub fn collect(ens: &PathEnsemble, epsilon: f64, levels: &[u32]) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidArgument("no dyadic levels".into()));
        }
        for &n in levels {
            if 2f64.powi(-(n as i32)) > epsilon {
                return Err(Error::InvalidArgument(format!(
                    "level {n}: 2^-{n} exceeds the look-ahead {epsilon}, so H^n is not predictable"
                )));
            }
        }
        let mut integral = Vec::with_capacity(levels.len());
        let mut sup = Vec::with_capacity(levels.len());
        for &n in levels {
            let m = 1usize << n;
            let idx = (0..=m)
                .map(|k| ens.grid().index_of(k as f64 / m as f64))
                .collect::<Result<Vec<_>>>()?;
            let (q, s): (Vec<f64>, Vec<f64>) = ens
                .paths()
                .map(|p| {
                    let mut q = 0.0;
                    let mut s: f64 = 0.0;
                    for w in idx.windows(2) {
                        let d = p[w[1]] - p[w[0]];
                        q += d * d;
                        s = s.max(d.abs());
                    }
                    (q, s)
                })
                .unzip();
            integral.push(q);
            sup.push(s);
        }
        Ok(LookaheadSample {
            levels: levels.to_vec(),
            integral,
            sup,
        })
    }

    pub fn merge(&mut self, other: LookaheadSample) -> Result<()> {
        if self.levels.is_empty() {
            *self = other;
            return Ok(());
        }
        if self.levels != other.levels {
            return Err(Error::Shape("look-ahead samples use different levels".into()));
        }
        for (a, b) in self.integral.iter_mut().zip(other.integral) {
            a.extend(b);
        }
        for (a, b) in self.sup.iter_mut().zip(other.sup) {
            a.extend(b);
        }
        Ok(())
    }

    pub fn report(&self, epsilon: f64, delta: f64, threshold: f64) -> LookaheadReport {
        let correction = Correction::bonferroni(threshold, self.levels.len());
        let levels: Vec<LookaheadLevel> = self
            .levels
            .iter()
            .enumerate()
            .map(|(j, &n)| {
                let q = &self.integral[j];
                let sm = summary(q);
                let nf = q.len() as f64;
                let exceed = self.sup[j].iter().filter(|&&s| s > delta).count();
                let size = 2f64.powi(n as i32);
                LookaheadLevel {
                    level: n,
                    mean_integral: sm.mean,
                    se: sm.se,
                    z: z_score(sm.mean - 1.0, sm.se),
                    second_moment: stats::compensated_sum(q.iter().map(|v| v * v)) / nf,
                    exceed_count: exceed,
                    p_sup_exceeds: exceed as f64 / nf,
                    tail_bound: size * 2.0 / (size.sqrt() * delta * (2.0 * std::f64::consts::PI).sqrt())
                        * (-0.5 * size * delta * delta).exp(),
                }
            })
            .collect();
        let max_abs_z = levels.iter().map(|l| l.z.abs()).fold(0.0, f64::max);
        // sup-probabilities must drop at least tenfold per two levels
        let decay_ok = levels.windows(2).all(|w| {
            let gap = (w[1].level - w[0].level) as f64;
            w[1].p_sup_exceeds <= w[0].p_sup_exceeds * 10f64.powf(-gap / 2.0)
        });
        let passed = max_abs_z <= correction.critical && decay_ok;
        LookaheadReport {
            epsilon,
            delta,
            n_paths: self.integral[0].len(),
            levels,
            correction,
            max_abs_z,
            decay_ok,
            verdict: if passed { TestVerdict::Pass } else { TestVerdict::Fail },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LookaheadLevel {
    pub level: u32,
    /// Sample mean of `(H^n • W)_1`, whose expectation is 1.
    pub mean_integral: f64,
    pub se: f64,
    pub z: f64,
    /// Sample `E[(H^n • W)_1²]`.
    pub second_moment: f64,
    pub exceed_count: usize,
    /// Empirical `P(sup |H^n| > δ)`.
    pub p_sup_exceeds: f64,
    /// Gaussian tail bound `2^n · 2 / (2^{n/2} δ √(2π)) · exp(-2^n δ² / 2)`.
    pub tail_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LookaheadReport {
    pub epsilon: f64,
    pub delta: f64,
    pub n_paths: usize,
    pub levels: Vec<LookaheadLevel>,
    pub correction: Correction,
    pub max_abs_z: f64,
    pub decay_ok: bool,
    pub verdict: TestVerdict,
}

/// Look-ahead demonstration on one ensemble (dyadic grid on `[0, 1]`).
pub fn non_integrator_demo(ens: &PathEnsemble, epsilon: f64, levels: &[u32], delta: f64) -> Result<LookaheadReport> {
    Ok(LookaheadSample::collect(ens, epsilon, levels)?.report(epsilon, delta, DEFAULT_THRESHOLD))
}

/// Settings of the Jeulin-lemma probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeConfig {
    /// Deepest rung; rung `k` truncates at `u_k = ln 2 · 2^k` in the
    /// log-distance variable `u = -ln((T - s)/T)`.
    pub depth: usize,
    /// Per-path partial integrals above this count as exceeding.
    pub ceiling: f64,
    /// Relative increment below which a rung counts as settled.
    pub tol: f64,
    /// Consecutive settled rungs that make a path's ladder Cauchy.
    pub cauchy_run: usize,
    /// Uniform `u` step up to `u_switch`.
    pub du: f64,
    pub u_switch: f64,
    /// Ratio of consecutive `u` nodes beyond `u_switch`.
    pub growth: f64,
    /// Required fraction of paths showing the expected behavior.
    pub required_fraction: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            depth: 36,
            ceiling: 1e3,
            tol: 1e-6,
            cauchy_run: 3,
            du: 0.05,
            u_switch: 4.0,
            growth: 1.02,
            required_fraction: 0.99,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeRung {
    pub k: usize,
    pub u: f64,
    pub ln_epsilon: f64,
    pub mean: f64,
    /// `√(2/π) ∫ A ds` up to the rung with the same panel rule (`E R = √(2/π)`).
    pub expected_mean: f64,
    pub fraction_above_ceiling: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub integrand: DeterministicIntegrand,
    pub horizon: f64,
    pub n_paths: usize,
    pub config: ProbeConfig,
    /// `∫_0^T A ds` from the classifier ladder.
    pub integral_of_a: FunctionalValue,
    pub rungs: Vec<ProbeRung>,
    /// Fraction of paths whose ladder is Cauchy by the deepest rung.
    pub fraction_cauchy: f64,
    /// Fraction of paths above the ceiling at the deepest rung.
    pub fraction_above_ceiling: f64,
    /// Cauchy on enough paths when `∫ A` is finite, above the ceiling on
    /// enough paths when it diverges.
    pub verdict: TestVerdict,
}

/// Simulates `R_s = |W_T - W_s| / √(T - s)` along the truncation ladder and
/// integrates `∫_0^{T-ε_k} R_s A_s ds` per path.
///
/// In `u = -ln((T - s)/T)` the standardized future increment
/// `Y(u) = (W_T - W_s)/√(T - s)` is a stationary Ornstein–Uhlenbeck process
/// with correlation `e^{-|Δu|/2}`, which is sampled exactly at the nodes.
/// This reaches distances from `T` far below floating-point resolution of
/// `s` itself. Paths come from the auxiliary substream of `seed`.
pub fn jeulin_lemma_probe(
    a: &DeterministicIntegrand,
    horizon: f64,
    n_paths: usize,
    seed: SeedSpec,
    cfg: &ProbeConfig,
) -> Result<ProbeReport> {
    if n_paths == 0 {
        return Err(Error::InvalidArgument("n_paths must be at least 1".into()));
    }
    if !(cfg.growth > 1.0 && cfg.du > 0.0 && cfg.u_switch >= 0.0 && cfg.tol > 0.0 && cfg.ceiling > 0.0) {
        return Err(Error::InvalidArgument("invalid probe configuration".into()));
    }
    let ln_t = horizon.ln();
    let rung_u: Vec<f64> = (0..=cfg.depth).map(classifier::rung_u).collect();
    let u_max = *rung_u.last().unwrap();
    let mut nodes = vec![0.0];
    let mut u = 0.0;
    while u < u_max {
        u = if u < cfg.u_switch { u + cfg.du } else { u * cfg.growth };
        nodes.push(u.min(u_max));
    }
    nodes.extend(&rung_u);
    nodes.sort_by(f64::total_cmp);
    nodes.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * y.abs().max(1.0));
    let rung_idx: Vec<usize> = rung_u
        .iter()
        .map(|&r| nodes.partition_point(|&x| x < r - 1e-12 * r.max(1.0)))
        .collect();

    // panel weight ∫ A ds over the panel, midpoint rule in u with ds = d du
    let weights = nodes
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            let ln_d = ln_t - mid;
            Ok(match a.ln_abs_at_distance(horizon, ln_d)? {
                Some(l) => (l + ln_d).exp() * (w[1] - w[0]),
                None => 0.0,
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let corr: Vec<(f64, f64)> = nodes
        .windows(2)
        .map(|w| {
            let r = (-0.5 * (w[1] - w[0])).exp();
            (r, (1.0 - r * r).sqrt())
        })
        .collect();

    let per_path: Vec<Vec<f64>> = (0..n_paths as u64)
        .into_par_iter()
        .map(|p| {
            let mut rng = seed.stream(StreamDomain::Auxiliary, p);
            let mut y: f64 = StandardNormal.sample(&mut rng);
            let mut acc = 0.0;
            let mut out = Vec::with_capacity(rung_idx.len());
            let mut next = 0;
            for (j, (&(r, c), &w)) in corr.iter().zip(&weights).enumerate() {
                while next < rung_idx.len() && rung_idx[next] == j {
                    out.push(acc);
                    next += 1;
                }
                let z: f64 = StandardNormal.sample(&mut rng);
                let y_next = r * y + c * z;
                acc += 0.5 * (y.abs() + y_next.abs()) * w;
                y = y_next;
            }
            while out.len() < rung_idx.len() {
                out.push(acc);
            }
            out
        })
        .collect();

    let c = (2.0 / std::f64::consts::PI).sqrt();
    let nf = n_paths as f64;
    let rungs: Vec<ProbeRung> = rung_idx
        .iter()
        .enumerate()
        .map(|(k, &idx)| {
            let col: Vec<f64> = per_path.iter().map(|v| v[k]).collect();
            ProbeRung {
                k,
                u: rung_u[k],
                ln_epsilon: ln_t - rung_u[k],
                mean: stats::mean(&col),
                expected_mean: c * stats::compensated_sum(weights[..idx].iter().copied()),
                fraction_above_ceiling: col.iter().filter(|&&v| v > cfg.ceiling).count() as f64 / nf,
            }
        })
        .collect();
    let cauchy = per_path
        .iter()
        .filter(|v| {
            let mut run = 0;
            for w in v.windows(2) {
                if (w[1] - w[0]).abs() <= cfg.tol * w[1].abs() {
                    run += 1;
                    if run >= cfg.cauchy_run {
                        return true;
                    }
                } else {
                    run = 0;
                }
            }
            false
        })
        .count();
    let fraction_cauchy = cauchy as f64 / nf;
    let fraction_above_ceiling = rungs.last().unwrap().fraction_above_ceiling;
    let integral_of_a = classifier::absolute_integral(a, horizon, &LadderConfig::default())?.value;
    let ok = match integral_of_a {
        FunctionalValue::Finite(_) => fraction_cauchy >= cfg.required_fraction,
        FunctionalValue::Diverges => fraction_above_ceiling >= cfg.required_fraction,
        FunctionalValue::Undecided => false,
    };
    Ok(ProbeReport {
        integrand: a.clone(),
        horizon,
        n_paths,
        config: *cfg,
        integral_of_a,
        rungs,
        fraction_cauchy,
        fraction_above_ceiling,
        verdict: if ok { TestVerdict::Pass } else { TestVerdict::Fail },
    })
}
