//! Gaussian conditional law of `X = ∫ φ dW` given the Brownian past.
//!
//! Given `F_t`, `X` is normal with mean `m_t = ∫_0^t φ dW` and variance
//! `σ_t² = ∫_t^∞ φ² ds`. The information drift is
//! `ρ(x, t) = (x - m_t) φ(t) / σ_t²`.
//!
//! On a grid, `m_t` is the left-point Itô sum while `σ_t²` comes from the
//! integrand in closed form (or quadrature). [`DriftProfile`] caches `φ` and
//! `σ²` at the nodes so per-path work is a single pass.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrand::DeterministicIntegrand;
use crate::timegrid::TimeGrid;

/// `σ_t² = ∫_t^∞ φ(s)² ds`.
pub fn residual_variance(phi: &DeterministicIntegrand, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time must be non-negative, got {t}")));
    }
    phi.square_integral(t, f64::INFINITY)
}

/// `m` at every node: `m_k = Σ_{i<k} φ(t_i) (W_{t_{i+1}} - W_{t_i})`.
pub fn running_mean(phi: &DeterministicIntegrand, grid: &TimeGrid, path: &[f64]) -> Result<Vec<f64>> {
    check_path(grid, path)?;
    let weights = phi.sample(grid.nodes())?;
    Ok(left_point_integral(&weights, path))
}

/// `ρ(x, t) = (x - m_t) φ(t) / σ_t²`.
pub fn information_drift(phi: &DeterministicIntegrand, x: f64, t: f64, m_t: f64) -> Result<f64> {
    let var = residual_variance(phi, t)?;
    if !(var > 0.0) {
        return Err(Error::DegenerateVariance { t });
    }
    Ok((x - m_t) * phi.eval(t)? / var)
}

/// Normal law of `X` given the past at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionalLaw {
    pub mean: f64,
    pub variance: f64,
}

impl ConditionalLaw {
    pub fn at(phi: &DeterministicIntegrand, t: f64, m_t: f64) -> Result<Self> {
        Ok(ConditionalLaw {
            mean: m_t,
            variance: residual_variance(phi, t)?,
        })
    }

    pub fn ln_density(&self, x: f64) -> Result<f64> {
        if !(self.variance > 0.0) {
            return Err(Error::InvalidArgument("conditional law is degenerate (variance 0)".into()));
        }
        let z = x - self.mean;
        Ok(-0.5 * (2.0 * std::f64::consts::PI * self.variance).ln() - z * z / (2.0 * self.variance))
    }
}

pub fn conditional_density(law: &ConditionalLaw, x: f64) -> Result<f64> {
    law.ln_density(x).map(f64::exp)
}

/// `φ` and `σ²` tabulated on a grid.
#[derive(Debug, Clone)]
pub struct DriftProfile {
    grid: TimeGrid,
    phi: Vec<f64>,
    variance: Vec<f64>,
}

impl DriftProfile {
    pub fn new(phi: &DeterministicIntegrand, grid: &TimeGrid) -> Result<Self> {
        let values = phi.sample(grid.nodes())?;
        let variance = grid
            .nodes()
            .iter()
            .map(|&t| residual_variance(phi, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(DriftProfile {
            grid: grid.clone(),
            phi: values,
            variance,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn variance(&self) -> &[f64] {
        &self.variance
    }

    /// Running mean of the path (which may extend beyond the profile grid;
    /// only the profile's nodes are used).
    pub fn running_mean(&self, path: &[f64]) -> Result<Vec<f64>> {
        if path.len() < self.grid.len() {
            return Err(Error::Shape(format!(
                "path has {} values, grid has {} nodes",
                path.len(),
                self.grid.len()
            )));
        }
        Ok(left_point_integral(&self.phi, &path[..self.grid.len()]))
    }

    /// `ρ(x, t_k)` given `m_{t_k}`.
    pub fn drift(&self, k: usize, x: f64, m: f64) -> Result<f64> {
        let var = self.variance[k];
        if !(var > 0.0) {
            return Err(Error::DegenerateVariance { t: self.grid.nodes()[k] });
        }
        Ok((x - m) * self.phi[k] / var)
    }

    /// Drift at every node but the last (the left points of the steps).
    pub fn drift_path(&self, x: f64, mean: &[f64]) -> Result<Vec<f64>> {
        (0..self.grid.len() - 1).map(|k| self.drift(k, x, mean[k])).collect()
    }

    /// `ln φ(t_k, x) - ln φ(0, x) - [Σ_{i<k} ρ_i ΔW_i - ½ Σ_{i<k} ρ_i² Δt_i]`
    /// for the conditional density `φ(t, x)` of `X` given `F_t`.
    pub fn log_density_residual(&self, path: &[f64], x: f64, k: usize) -> Result<f64> {
        if k >= self.grid.len() {
            return Err(Error::InvalidArgument(format!("node {k} beyond the grid")));
        }
        if !(self.variance[k] > 0.0) {
            return Err(Error::DegenerateVariance { t: self.grid.nodes()[k] });
        }
        let mean = self.running_mean(path)?;
        let nodes = self.grid.nodes();
        let mut ito = crate::stats::CompensatedSum::new();
        let mut quad = crate::stats::CompensatedSum::new();
        for i in 0..k {
            let rho = self.drift(i, x, mean[i])?;
            ito.add(rho * (path[i + 1] - path[i]));
            quad.add(rho * rho * (nodes[i + 1] - nodes[i]));
        }
        let law_t = ConditionalLaw {
            mean: mean[k],
            variance: self.variance[k],
        };
        let law_0 = ConditionalLaw {
            mean: 0.0,
            variance: self.variance[0],
        };
        Ok(law_t.ln_density(x)? - law_0.ln_density(x)? - (ito.value() - 0.5 * quad.value()))
    }
}

/// Residual of the exponential representation of the conditional density
/// at time `t` (a grid node).
pub fn log_density_identity_residual(
    phi: &DeterministicIntegrand,
    grid: &TimeGrid,
    path: &[f64],
    x: f64,
    t: f64,
) -> Result<f64> {
    check_path(grid, path)?;
    let k = grid.index_of(t)?;
    let profile = DriftProfile::new(phi, &TimeGrid::from_nodes(grid.nodes()[..=k.max(1)].to_vec())?)?;
    profile.log_density_residual(&path[..=k.max(1)], x, k)
}

/// Cumulative left-point sums `Σ_{i<k} w_i (p_{i+1} - p_i)`.
pub fn left_point_integral(weights: &[f64], path: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(path.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 0..path.len() - 1 {
        acc += weights[i] * (path[i + 1] - path[i]);
        out.push(acc);
    }
    out
}

fn check_path(grid: &TimeGrid, path: &[f64]) -> Result<()> {
    if path.len() != grid.len() {
        return Err(Error::Shape(format!(
            "path has {} values, grid has {} nodes",
            path.len(),
            grid.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature;

    #[test]
    fn residual_variance_of_indicator() {
        let phi = DeterministicIntegrand::indicator(1.0);
        assert_eq!(residual_variance(&phi, 0.25).unwrap(), 0.75);
        assert_eq!(residual_variance(&phi, 1.0).unwrap(), 0.0);
        assert_eq!(residual_variance(&phi, 2.0).unwrap(), 0.0);
        assert!(residual_variance(&phi, -0.1).is_err());
    }

    #[test]
    fn residual_variance_of_jeulin_yor_matches_brute_force() {
        let phi = DeterministicIntegrand::jeulin_yor(0.75, 1.0);
        let closed = residual_variance(&phi, 0.5).unwrap();
        // oracle: composite quadrature in u = -ln(1 - s), u in [ln 2, U], plus analytic tail
        let u_max: f64 = 1e6;
        let head = quadrature::integrate(|u: f64| u.powf(-1.5), std::f64::consts::LN_2, u_max, 1e-13, 0.0);
        let oracle = head.value + 2.0 * u_max.powf(-0.5);
        assert!((closed - oracle).abs() < 1e-8 * oracle, "{closed} vs {oracle}");
    }

    #[test]
    fn running_mean_special_cases() {
        let grid = TimeGrid::uniform(1.0, 4);
        let path = [0.0, 0.3, -0.2, 0.5, 0.1];
        let zero = running_mean(&DeterministicIntegrand::zero(), &grid, &path).unwrap();
        assert!(zero.iter().all(|&v| v == 0.0));
        let ind = running_mean(&DeterministicIntegrand::indicator(1.0), &grid, &path).unwrap();
        for (a, b) in ind.iter().zip(&path) {
            assert!((a - b).abs() < 1e-15);
        }
        let c = running_mean(&DeterministicIntegrand::constant(3.0, 2.0), &grid, &path).unwrap();
        for (a, b) in c.iter().zip(&path) {
            assert!((a - 3.0 * b).abs() < 1e-14);
        }
    }

    #[test]
    fn bridge_drift_identity() {
        let phi = DeterministicIntegrand::indicator(1.0);
        for &(x, t, m) in &[(0.7, 0.3, -0.2), (-1.5, 0.9, 0.4), (0.0, 0.0, 0.0)] {
            let r = information_drift(&phi, x, t, m).unwrap();
            assert!((r - (x - m) / (1.0 - t)).abs() <= 4.0 * f64::EPSILON * r.abs().max(1.0));
        }
        assert_eq!(information_drift(&phi, 0.4, 0.5, 0.4).unwrap(), 0.0);
        assert!(matches!(
            information_drift(&phi, 1.0, 1.0, 0.0),
            Err(Error::DegenerateVariance { .. })
        ));
    }

    #[test]
    fn density_values() {
        let std = ConditionalLaw { mean: 0.0, variance: 1.0 };
        let d = conditional_density(&std, 0.0).unwrap();
        assert!((d - 0.398_942_280_401_432_7).abs() < 1e-15);
        let law = ConditionalLaw { mean: 0.3, variance: 0.25 };
        let peak = conditional_density(&law, 0.3).unwrap();
        assert!((peak - 1.0 / (2.0 * std::f64::consts::PI * 0.25).sqrt()).abs() < 1e-15);
        let a = conditional_density(&law, 0.3 + 0.17).unwrap();
        let b = conditional_density(&law, 0.3 - 0.17).unwrap();
        assert!((a - b).abs() < 1e-15);
        assert!(conditional_density(&ConditionalLaw { mean: 0.0, variance: 0.0 }, 0.0).is_err());
    }

    #[test]
    fn residual_on_flat_path_is_log_variance_term() {
        let grid = TimeGrid::uniform(1.0, 64);
        let path = vec![0.0; grid.len()];
        let phi = DeterministicIntegrand::indicator(1.0);
        for &t in &[0.25, 0.5, 0.75] {
            let r = log_density_identity_residual(&phi, &grid, &path, 0.0, t).unwrap();
            let expected = -0.5 * (1.0 - t).ln();
            assert!((r - expected).abs() < 1e-10, "{r} vs {expected}");
        }
    }

    #[test]
    fn residual_requires_positive_variance() {
        let grid = TimeGrid::uniform(1.0, 4);
        let path = vec![0.0; 5];
        assert!(log_density_identity_residual(&DeterministicIntegrand::zero(), &grid, &path, 0.0, 0.5).is_err());
        let phi = DeterministicIntegrand::indicator(1.0);
        assert!(log_density_identity_residual(&phi, &grid, &path, 0.0, 1.0).is_err());
    }

    #[test]
    fn variance_is_non_increasing() {
        for phi in [
            DeterministicIntegrand::jeulin_yor(0.75, 1.0),
            DeterministicIntegrand::power(1.0, 1.0),
            DeterministicIntegrand::tabulated(vec![0.0, 0.3, 1.0], vec![1.0, -2.0, 0.5]).unwrap(),
        ] {
            let mut prev = f64::INFINITY;
            for k in 0..=200 {
                let v = residual_variance(&phi, k as f64 / 150.0).unwrap();
                assert!(v <= prev + 1e-15, "{phi} at step {k}");
                prev = v;
            }
        }
    }
}
