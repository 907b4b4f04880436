//! Enlarged-filtration objects on simulated paths: the drift compensator of
//! `W` after adding `X = ∫ φ dW`, compensated integrals `∫ m dW`, integrals
//! of deterministic `H` against a decomposition, and the compound Poisson
//! bridge compensator.
//!
//! All sums are left-point sums over the grid, so the drift is only ever
//! evaluated at nodes strictly before the last one.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{self, LadderConfig, Verdict};
use crate::error::{Error, Result};
use crate::gaussian::{left_point_integral, DriftProfile};
use crate::integrand::{DeterministicIntegrand, Family};
use crate::paths::{PathEnsemble, ProcessLabel};
use crate::stats::linear_fit;
use crate::timegrid::TimeGrid;

/// Per-path Stieltjes sums above this are reported as non-integrable.
pub const DEFAULT_OVERFLOW_GUARD: f64 = 1e12;

/// Enlargement of the Brownian filtration by `X = ∫ φ dW`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnlargementSpec {
    pub phi: DeterministicIntegrand,
    /// First time after which `φ ≡ 0`; `None` for unbounded support.
    pub info_horizon: Option<f64>,
    /// Last node of `grid`.
    pub sim_horizon: f64,
    pub grid: TimeGrid,
    /// The drift is never evaluated on `[info_horizon - ε, info_horizon]`.
    pub epsilon_exclusion: f64,
}

impl EnlargementSpec {
    /// Restricts `grid` to nodes at most `info_horizon - ε`. The margin `ε`
    /// defaults to the smallest step of `grid`.
    pub fn new(phi: DeterministicIntegrand, grid: &TimeGrid, epsilon: Option<f64>) -> Result<Self> {
        let eps = epsilon.unwrap_or_else(|| grid.smallest_step());
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument(format!("exclusion margin must be positive, got {eps}")));
        }
        let info_horizon = phi.support_end();
        let grid = match info_horizon {
            Some(h) => {
                let limit = h - eps;
                let keep = grid.nodes().partition_point(|&t| t <= limit * (1.0 + 1e-14));
                if keep < 2 {
                    return Err(Error::InvalidArgument(format!(
                        "grid has fewer than two nodes before {limit} (information horizon {h} minus margin {eps})"
                    )));
                }
                if keep == grid.len() {
                    grid.clone()
                } else {
                    TimeGrid::from_nodes(grid.nodes()[..keep].to_vec())?
                }
            }
            None => grid.clone(),
        };
        Ok(EnlargementSpec {
            sim_horizon: grid.last(),
            epsilon_exclusion: eps,
            phi,
            info_horizon,
            grid,
        })
    }

    /// Grid on which paths must be simulated: the enlargement grid, extended to the
    /// information horizon so that `X` can be realized from the same path.
    pub fn simulation_grid(&self) -> Result<TimeGrid> {
        match self.info_horizon {
            Some(h) => self.grid.extended_to(h),
            None => Err(self.unbounded()),
        }
    }

    /// Bound on the drift mass excluded near the horizon,
    /// `∫_{sim_horizon}^{info_horizon} E|ρ(X, s)| ds = √(2/π) ∫ |φ| / σ ds`.
    /// Closed form for indicators, `2 √(2/π) √(T - sim_horizon)`.
    pub fn truncation_bound(&self) -> Result<f64> {
        let Some(h) = self.info_horizon else {
            return Err(self.unbounded());
        };
        let c = (2.0 / std::f64::consts::PI).sqrt();
        let gap = h - self.sim_horizon;
        if gap <= 0.0 {
            return Ok(0.0);
        }
        Ok(match self.phi.family {
            Family::Indicator { horizon } if horizon == h => 2.0 * c * gap.sqrt(),
            _ => expected_abs_drift_integral(&self.phi, None, self.sim_horizon, h)?,
        })
    }

    fn unbounded(&self) -> Error {
        Error::NotEvaluable {
            family: self.phi.to_string(),
            reason: "X needs a path through the whole support, which is unbounded".into(),
        }
    }

    fn check_ensemble(&self, ens: &PathEnsemble) -> Result<()> {
        let n = self.grid.len();
        let nodes = ens.grid().nodes();
        if nodes.len() < n || nodes[..n] != *self.grid.nodes() {
            return Err(Error::Shape("ensemble grid does not start with the enlargement grid".into()));
        }
        Ok(())
    }
}

/// `E ∫_a^b |ρ(X, s)| |w(s)| ds = √(2/π) ∫_a^b |w φ| / σ ds`, using that
/// `X - m_s` is centered Gaussian with variance `σ_s²` (`w ≡ 1` when
/// `None`). The substitution `s = h - v²` with `h` the information horizon
/// removes the `(h - s)^{-1/2}` singularity of `1/σ`.
pub fn expected_abs_drift_integral(
    phi: &DeterministicIntegrand,
    weight: Option<&DeterministicIntegrand>,
    a: f64,
    b: f64,
) -> Result<f64> {
    let Some(h) = phi.support_end() else {
        return Err(Error::NotEvaluable {
            family: phi.to_string(),
            reason: "unbounded support".into(),
        });
    };
    let b = b.min(h);
    if !(a >= 0.0) || a >= b {
        return Ok(0.0);
    }
    let c = (2.0 / std::f64::consts::PI).sqrt();
    let f = |v: f64| {
        let s = h - v * v;
        let var = crate::gaussian::residual_variance(phi, s).unwrap_or(f64::NAN);
        let w = weight.map_or(Ok(1.0), |w| w.eval(s)).unwrap_or(f64::NAN);
        let p = phi.eval(s).unwrap_or(f64::NAN);
        if var > 0.0 {
            2.0 * v * (w * p).abs() / var.sqrt()
        } else {
            0.0
        }
    };
    let q = crate::quadrature::integrate(f, (h - b).sqrt(), (h - a).sqrt(), 1e-10, 0.0);
    if !q.value.is_finite() {
        return Err(Error::NotEvaluable {
            family: phi.to_string(),
            reason: "expected drift integral is not finite".into(),
        });
    }
    Ok(c * q.value)
}

/// `X = Σ φ(t_i) ΔW_i` over a path on [`EnlargementSpec::simulation_grid`].
pub fn realize_x(spec: &EnlargementSpec, extended_path: &[f64]) -> Result<f64> {
    let grid = spec.simulation_grid()?;
    if extended_path.len() != grid.len() {
        return Err(Error::Shape(format!(
            "path has {} values, simulation grid has {} nodes",
            extended_path.len(),
            grid.len()
        )));
    }
    let w = spec.phi.sample(grid.nodes())?;
    Ok(*left_point_integral(&w, extended_path).last().unwrap())
}

/// `X` for every path of an ensemble simulated on the simulation grid.
pub fn realize_x_ensemble(spec: &EnlargementSpec, ens: &PathEnsemble) -> Result<Vec<f64>> {
    let grid = spec.simulation_grid()?;
    if ens.grid().nodes() != grid.nodes() {
        return Err(Error::Shape("ensemble is not on the simulation grid".into()));
    }
    let w = spec.phi.sample(grid.nodes())?;
    Ok(ens
        .paths()
        .map(|p| crate::stats::compensated_sum(w.iter().zip(p.windows(2)).map(|(a, d)| a * (d[1] - d[0]))))
        .collect())
}

/// `A_k = Σ_{i<k} ρ(x, t_i) Δt_i` on the enlargement grid. The path may extend
/// beyond it.
pub fn drift_compensator(spec: &EnlargementSpec, path: &[f64], x: f64) -> Result<Vec<f64>> {
    let profile = DriftProfile::new(&spec.phi, &spec.grid)?;
    drift_path(&profile, path, x, None)
}

/// Left-point drift sums, optionally weighted by `weights[i]` (for `d[M, W] = m dt`).
fn drift_path(profile: &DriftProfile, path: &[f64], x: f64, weights: Option<&[f64]>) -> Result<Vec<f64>> {
    let mean = profile.running_mean(path)?;
    let nodes = profile.grid().nodes();
    let mut out = Vec::with_capacity(nodes.len());
    out.push(0.0);
    let mut acc = 0.0;
    for i in 0..nodes.len() - 1 {
        let w = weights.map_or(1.0, |w| w[i]);
        if w != 0.0 {
            acc += profile.drift(i, x, mean[i])? * w * (nodes[i + 1] - nodes[i]);
        }
        out.push(acc);
    }
    Ok(out)
}

/// A process split into a martingale part and a finite-variation part.
#[derive(Debug, Clone, PartialEq)]
pub struct DecomposedProcess {
    pub original: PathEnsemble,
    pub martingale_part: PathEnsemble,
    pub fv_part: PathEnsemble,
    pub label: String,
}

impl DecomposedProcess {
    fn from_rows(grid: &TimeGrid, rows: Vec<(Vec<f64>, Vec<f64>)>, label: &str) -> Result<Self> {
        let n_paths = rows.len();
        let n = grid.len();
        let mut orig = Vec::with_capacity(n_paths * n);
        let mut mart = Vec::with_capacity(n_paths * n);
        let mut fv = Vec::with_capacity(n_paths * n);
        for (o, a) in rows {
            mart.extend(o.iter().zip(&a).map(|(o, a)| o - a));
            orig.extend(o);
            fv.extend(a);
        }
        Self::from_parts(grid, n_paths, orig, mart, fv, label)
    }

    fn from_parts(
        grid: &TimeGrid,
        n_paths: usize,
        orig: Vec<f64>,
        mart: Vec<f64>,
        fv: Vec<f64>,
        label: &str,
    ) -> Result<Self> {
        let tag = |part: &str| ProcessLabel::Derived(format!("{label}:{part}"));
        Ok(DecomposedProcess {
            original: PathEnsemble::from_values(grid.clone(), n_paths, orig, tag("original"))?,
            martingale_part: PathEnsemble::from_values(grid.clone(), n_paths, mart, tag("martingale"))?,
            fv_part: PathEnsemble::from_values(grid.clone(), n_paths, fv, tag("fv"))?,
            label: label.to_string(),
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        self.original.grid()
    }

    pub fn n_paths(&self) -> usize {
        self.original.n_paths()
    }

    /// Largest `|original - (martingale + fv)|` relative to `max(1, |original|)`.
    pub fn additivity_defect(&self) -> f64 {
        self.original
            .values()
            .iter()
            .zip(self.martingale_part.values())
            .zip(self.fv_part.values())
            .map(|((o, m), a)| (o - (m + a)).abs() / o.abs().max(1.0))
            .fold(0.0, f64::max)
    }

    /// Discrete total variation `Σ |ΔA|` of the finite-variation part, per path.
    pub fn fv_variation(&self) -> Vec<f64> {
        self.fv_part
            .paths()
            .map(|p| p.windows(2).map(|w| (w[1] - w[0]).abs()).sum())
            .collect()
    }

    pub const CSV_HEADER: &'static str = "path,t,original,martingale_part,fv_part";

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        let nodes = self.grid().nodes();
        let offset = self.original.seed_record().map_or(0, |r| r.first_path);
        for p in 0..self.n_paths() {
            let (o, m, a) = (
                self.original.path(p),
                self.martingale_part.path(p),
                self.fv_part.path(p),
            );
            for k in 0..nodes.len() {
                writeln!(out, "{},{:?},{:?},{:?},{:?}", offset + p as u64, nodes[k], o[k], m[k], a[k])?;
            }
        }
        Ok(())
    }
}

fn check_info(ens: &PathEnsemble, x: &[f64]) -> Result<()> {
    if x.len() != ens.n_paths() {
        return Err(Error::Shape(format!("{} info values for {} paths", x.len(), ens.n_paths())));
    }
    Ok(())
}

/// `W = W̃ + A` with `A` the drift compensator of each path's own `X`.
pub fn compensate_brownian(spec: &EnlargementSpec, ens: &PathEnsemble, x: &[f64]) -> Result<DecomposedProcess> {
    spec.check_ensemble(ens)?;
    check_info(ens, x)?;
    let profile = DriftProfile::new(&spec.phi, &spec.grid)?;
    let n = spec.grid.len();
    let rows = (0..ens.n_paths())
        .into_par_iter()
        .map(|p| {
            let path = ens.path(p);
            let a = drift_path(&profile, path, x[p], None)?;
            Ok((path[..n].to_vec(), a))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut d = DecomposedProcess::from_rows(&spec.grid, rows, "compensated_brownian")?;
    carry_seed(&mut d, ens);
    Ok(d)
}

/// `M = ∫ m dW = M̃ + ∫ ρ(X, u) m_u du`, after checking with the classifier
/// that `M` remains a semimartingale under the enlargement (horizon = the
/// information horizon). Any other verdict is a refusal.
pub fn compensate_martingale(
    spec: &EnlargementSpec,
    m: &DeterministicIntegrand,
    ens: &PathEnsemble,
    x: &[f64],
    ladder: &LadderConfig,
) -> Result<DecomposedProcess> {
    spec.check_ensemble(ens)?;
    check_info(ens, x)?;
    let Some(horizon) = spec.info_horizon else {
        return Err(spec.unbounded());
    };
    let verdict = classifier::classify(m, horizon, ladder)?;
    if verdict.verdict != Verdict::Semimartingale {
        return Err(Error::Refused(format!(
            "{m} integrated against W is {} under the enlargement (Jeulin–Yor functional {}, L² norm {}); \
             its drift compensator does not exist",
            verdict.verdict, verdict.jy_value, verdict.l2_value
        )));
    }
    let profile = DriftProfile::new(&spec.phi, &spec.grid)?;
    let weights = m.sample(spec.grid.nodes())?;
    let n = spec.grid.len();
    let rows = (0..ens.n_paths())
        .into_par_iter()
        .map(|p| {
            let path = &ens.path(p)[..n];
            let mm = left_point_integral(&weights, path);
            let a = drift_path(&profile, path, x[p], Some(&weights))?;
            Ok((mm, a))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut d = DecomposedProcess::from_rows(&spec.grid, rows, "compensated_martingale")?;
    carry_seed(&mut d, ens);
    Ok(d)
}

/// `H • M = H • M̃ + H • A` with left-point sums, guarding the Stieltjes
/// sums `Σ |H| |ΔA|` path by path.
pub fn integrate_under_enlargement(h: &DeterministicIntegrand, dec: &DecomposedProcess) -> Result<DecomposedProcess> {
    integrate_under_enlargement_with_guard(h, dec, DEFAULT_OVERFLOW_GUARD)
}

pub fn integrate_under_enlargement_with_guard(
    h: &DeterministicIntegrand,
    dec: &DecomposedProcess,
    guard: f64,
) -> Result<DecomposedProcess> {
    let grid = dec.grid();
    let w = h.sample(grid.nodes())?;
    let n_paths = dec.n_paths();
    for p in 0..n_paths {
        let a = dec.fv_part.path(p);
        let stieltjes: f64 = w.iter().zip(a.windows(2)).map(|(h, d)| h.abs() * (d[1] - d[0]).abs()).sum();
        if !(stieltjes <= guard) {
            return Err(Error::NotIntegrable { path: p, guard });
        }
    }
    let integrate = |e: &PathEnsemble| -> Vec<f64> {
        e.paths().flat_map(|p| left_point_integral(&w, p)).collect()
    };
    let label = format!("{}|H={h}", dec.label);
    let mut out = DecomposedProcess::from_parts(
        grid,
        n_paths,
        integrate(&dec.original),
        integrate(&dec.martingale_part),
        integrate(&dec.fv_part),
        &label,
    )?;
    carry_seed(&mut out, &dec.original);
    Ok(out)
}

/// `Z = M + ∫_0^{·} (Z_T - Z_s)/(T - s) ds` on the nodes strictly before `horizon`.
pub fn levy_bridge_compensator(ens: &PathEnsemble, z_end: &[f64], horizon: f64) -> Result<DecomposedProcess> {
    check_info(ens, z_end)?;
    let keep = ens.grid().nodes().partition_point(|&t| t < horizon);
    if keep < 2 {
        return Err(Error::InvalidArgument(format!("fewer than two nodes before {horizon}")));
    }
    let grid = TimeGrid::from_nodes(ens.grid().nodes()[..keep].to_vec())?;
    let nodes = grid.nodes();
    let rows = (0..ens.n_paths())
        .into_par_iter()
        .map(|p| {
            let z = &ens.path(p)[..keep];
            let mut a = Vec::with_capacity(keep);
            let mut acc = 0.0;
            a.push(0.0);
            for i in 0..keep - 1 {
                acc += (z_end[p] - z[i]) / (horizon - nodes[i]) * (nodes[i + 1] - nodes[i]);
                a.push(acc);
            }
            (z.to_vec(), a)
        })
        .collect::<Vec<_>>();
    let mut d = DecomposedProcess::from_rows(&grid, rows, "levy_bridge")?;
    carry_seed(&mut d, ens);
    Ok(d)
}

fn carry_seed(d: &mut DecomposedProcess, src: &PathEnsemble) {
    if let Some(r) = src.seed_record() {
        for e in [&mut d.original, &mut d.martingale_part, &mut d.fv_part] {
            e.set_seed_record(r.clone());
        }
    }
}

/// Regression of `W_t - W_s` on `W_T - W_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub s: f64,
    pub t: f64,
    pub horizon: f64,
    pub n_paths: usize,
    pub slope: f64,
    pub slope_se: f64,
    /// `(t - s)/(T - s)`.
    pub expected: f64,
    pub z: f64,
}

/// Least-squares slope of `W_t - W_s` against `W_T - W_s` with `T` the
/// last node of the ensemble grid.
pub fn symmetry_identity_check(ens: &PathEnsemble, s: f64, t: f64) -> Result<SymmetryReport> {
    if !(s >= 0.0 && t > s) {
        return Err(Error::InvalidArgument(format!("need 0 <= s < t, got s = {s}, t = {t}")));
    }
    let horizon = ens.grid().last();
    if t > horizon {
        return Err(Error::InvalidArgument(format!("t = {t} beyond the last node {horizon}")));
    }
    let ws = ens.at_time(s)?;
    let wt = ens.at_time(t)?;
    let wh = ens.column(ens.n_nodes() - 1);
    Ok(symmetry_from_columns(&ws, &wt, &wh, s, t, horizon))
}

/// [`symmetry_identity_check`] from the values `W_s`, `W_t`, `W_T` of each
/// path (for ensembles simulated in chunks).
pub fn symmetry_from_columns(ws: &[f64], wt: &[f64], wh: &[f64], s: f64, t: f64, horizon: f64) -> SymmetryReport {
    let x: Vec<f64> = wh.iter().zip(ws).map(|(a, b)| a - b).collect();
    let y: Vec<f64> = wt.iter().zip(ws).map(|(a, b)| a - b).collect();
    let fit = linear_fit(&x, &y);
    let expected = (t - s) / (horizon - s);
    let diff = fit.slope - expected;
    let z = if diff == 0.0 { 0.0 } else { diff / fit.slope_se };
    SymmetryReport {
        s,
        t,
        horizon,
        n_paths: ws.len(),
        slope: fit.slope,
        slope_se: fit.slope_se,
        expected,
        z,
    }
}
