//! Time grids on `[0, horizon]` with optional geometric refinement toward a
//! point where a drift integrand blows up.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest step the default refinement depth must reach, relative to the horizon.
pub const DEFAULT_MIN_STEP_FRACTION: f64 = 1e-6;

const NODE_MATCH_TOL: f64 = 1e-12;

/// Geometric refinement toward a singular point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    pub singular_point: f64,
    /// Factor in `(0, 1)` by which the remaining distance to the singular
    /// point shrinks at every refined node.
    pub ratio: f64,
    /// Number of refined nodes. `None` picks the smallest depth whose last
    /// step is at most `1e-6 * horizon`.
    pub depth: Option<usize>,
}

impl Refinement {
    pub fn toward(singular_point: f64, ratio: f64) -> Self {
        Refinement {
            singular_point,
            ratio,
            depth: None,
        }
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth = Some(depth);
        self
    }
}

/// Strictly increasing time nodes starting at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    nodes: Vec<f64>,
    singular_point: Option<f64>,
    refinement_ratio: Option<f64>,
}

/// Builds a grid covering `[0, horizon]`.
///
/// Without refinement the grid is uniform with `n_base` steps. When the
/// singular point lies at or before the horizon, the grid covers
/// `[0, singular_point)`: `n_base - 1` uniform steps of size
/// `h = singular_point / n_base`, followed by nodes
/// `singular_point - h * ratio^j` for `j = 1..=depth`. The singular point
/// itself is never a node.
pub fn build_grid(horizon: f64, n_base: usize, refinement: Option<Refinement>) -> Result<TimeGrid> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
    }
    if n_base < 2 {
        return Err(Error::InvalidArgument(format!("n_base must be at least 2, got {n_base}")));
    }
    let Some(refine) = refinement else {
        return Ok(TimeGrid::uniform(horizon, n_base));
    };
    let sp = refine.singular_point;
    if !(sp >= 0.0) {
        return Err(Error::InvalidArgument(format!("singular point must be non-negative, got {sp}")));
    }
    if sp == 0.0 {
        return Err(Error::InvalidArgument("singular point at 0 leaves nothing to grid".into()));
    }
    if !(refine.ratio > 0.0 && refine.ratio < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "refinement ratio must lie in (0, 1), got {}",
            refine.ratio
        )));
    }
    if sp > horizon {
        let mut g = TimeGrid::uniform(horizon, n_base);
        g.singular_point = Some(sp);
        g.refinement_ratio = Some(refine.ratio);
        return Ok(g);
    }

    let h = sp / n_base as f64;
    let r = refine.ratio;
    let depth = match refine.depth {
        Some(d) => d,
        None => {
            // step j = h * r^(j-1) * (1 - r)
            let target = DEFAULT_MIN_STEP_FRACTION * horizon;
            let mut j = 1usize;
            while h * r.powi(j as i32 - 1) * (1.0 - r) > target {
                j += 1;
            }
            j
        }
    };
    let mut nodes: Vec<f64> = (0..n_base).map(|k| k as f64 * h).collect();
    let mut dist = h;
    for _ in 0..depth {
        dist *= r;
        let t = sp - dist;
        if t <= *nodes.last().unwrap() {
            break;
        }
        nodes.push(t);
    }
    Ok(TimeGrid {
        nodes,
        singular_point: Some(sp),
        refinement_ratio: Some(r),
    })
}

impl TimeGrid {
    pub fn uniform(horizon: f64, n_steps: usize) -> TimeGrid {
        let nodes = (0..=n_steps)
            .map(|k| {
                if k == n_steps {
                    horizon
                } else {
                    horizon * k as f64 / n_steps as f64
                }
            })
            .collect();
        TimeGrid {
            nodes,
            singular_point: None,
            refinement_ratio: None,
        }
    }

    /// Nodes `horizon (1 - e^{-k du})`, uniform in the log-distance to the
    /// horizon, down to a distance of `min_distance`. Every step is the same
    /// fraction of the remaining distance, which keeps left-point sums of
    /// `(horizon - s)^{-1/2}`-type drifts balanced across scales.
    pub fn log_distance(horizon: f64, du: f64, min_distance: f64) -> Result<TimeGrid> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
        }
        if !(du > 0.0 && min_distance > 0.0 && min_distance < horizon) {
            return Err(Error::InvalidArgument(format!(
                "need du > 0 and 0 < min_distance < horizon, got du = {du}, min_distance = {min_distance}"
            )));
        }
        let k_max = ((horizon / min_distance).ln() / du).floor() as usize;
        if k_max < 1 {
            return Err(Error::InvalidArgument("log-distance grid would have a single node".into()));
        }
        let nodes = (0..=k_max).map(|k| -horizon * (-(k as f64) * du).exp_m1()).collect();
        Ok(TimeGrid {
            nodes,
            singular_point: Some(horizon),
            refinement_ratio: Some((-du).exp()),
        })
    }

    /// Grid from explicit nodes; they must start at 0 and increase strictly.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<TimeGrid> {
        if nodes.len() < 2 {
            return Err(Error::InvalidArgument("a grid needs at least two nodes".into()));
        }
        if nodes[0] != 0.0 {
            return Err(Error::InvalidArgument("grid must start at 0".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::InvalidArgument("grid nodes must be finite and strictly increasing".into()));
        }
        Ok(TimeGrid {
            nodes,
            singular_point: None,
            refinement_ratio: None,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn last(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn singular_point(&self) -> Option<f64> {
        self.singular_point
    }

    pub fn refinement_ratio(&self) -> Option<f64> {
        self.refinement_ratio
    }

    /// Step sizes `t_{i+1} - t_i`.
    pub fn steps(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.windows(2).map(|w| w[1] - w[0])
    }

    pub fn smallest_step(&self) -> f64 {
        self.steps().fold(f64::INFINITY, f64::min)
    }

    /// Index of the node equal to `t` (up to a relative 1e-12).
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let tol = NODE_MATCH_TOL * t.abs().max(1.0);
        let pos = self.nodes.partition_point(|&x| x < t - tol);
        match self.nodes.get(pos) {
            Some(&x) if (x - t).abs() <= tol => Ok(pos),
            _ => Err(Error::NotOnGrid { t }),
        }
    }

    /// Index of the last node not exceeding `t`.
    pub fn floor_index(&self, t: f64) -> usize {
        let tol = NODE_MATCH_TOL * t.abs().max(1.0);
        self.nodes.partition_point(|&x| x <= t + tol).saturating_sub(1)
    }

    /// Adds the given times as nodes (existing nodes are kept).
    pub fn with_nodes(&self, extra: &[f64]) -> Result<TimeGrid> {
        let mut nodes = self.nodes.clone();
        for &t in extra {
            if !(t >= 0.0) || t > self.last() {
                return Err(Error::InvalidArgument(format!(
                    "node {t} outside grid range [0, {}]",
                    self.last()
                )));
            }
            if self.index_of(t).is_err() {
                nodes.push(t);
            }
        }
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        nodes.dedup();
        Ok(TimeGrid {
            nodes,
            singular_point: self.singular_point,
            refinement_ratio: self.refinement_ratio,
        })
    }

    /// Appends `t_end` (beyond the last node) so that a path simulated on the
    /// result also covers `t_end`. The result carries no singular point.
    pub fn extended_to(&self, t_end: f64) -> Result<TimeGrid> {
        if t_end <= self.last() {
            return Ok(TimeGrid {
                nodes: self.nodes.clone(),
                singular_point: None,
                refinement_ratio: None,
            });
        }
        let mut nodes = self.nodes.clone();
        nodes.push(t_end);
        Ok(TimeGrid {
            nodes,
            singular_point: None,
            refinement_ratio: None,
        })
    }

    /// Multiplies every node time by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<TimeGrid> {
        if !(factor > 0.0) {
            return Err(Error::InvalidArgument(format!("scale factor must be positive, got {factor}")));
        }
        Ok(TimeGrid {
            nodes: self.nodes.iter().map(|t| t * factor).collect(),
            singular_point: self.singular_point.map(|s| s * factor),
            refinement_ratio: self.refinement_ratio,
        })
    }

    /// Every `stride`-th node (the last node is always kept).
    pub fn coarsened(&self, stride: usize) -> Result<(TimeGrid, Vec<usize>)> {
        if stride == 0 {
            return Err(Error::InvalidArgument("stride must be positive".into()));
        }
        let mut idx: Vec<usize> = (0..self.len()).step_by(stride).collect();
        if *idx.last().unwrap() != self.len() - 1 {
            idx.push(self.len() - 1);
        }
        let nodes = idx.iter().map(|&i| self.nodes[i]).collect();
        Ok((
            TimeGrid {
                nodes,
                singular_point: self.singular_point,
                refinement_ratio: self.refinement_ratio,
            },
            idx,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_of_four_steps() {
        let g = build_grid(1.0, 4, None).unwrap();
        assert_eq!(g.nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn geometric_halving_toward_one() {
        let g = build_grid(1.0, 4, Some(Refinement::toward(1.0, 0.5).with_depth(3))).unwrap();
        assert_eq!(g.nodes(), &[0.0, 0.25, 0.5, 0.75, 0.875, 0.9375, 0.96875]);
        assert!(g.nodes().iter().all(|&t| t != 1.0));
    }

    #[test]
    fn log_distance_grid() {
        let g = TimeGrid::log_distance(2.0, 0.01, 1e-4).unwrap();
        assert_eq!(g.nodes()[0], 0.0);
        assert_eq!(g.singular_point(), Some(2.0));
        let d: Vec<f64> = g.nodes().iter().map(|t| 2.0 - t).collect();
        for w in d.windows(2) {
            assert!((w[1] / w[0] - (-0.01f64).exp()).abs() < 1e-9);
        }
        let last = *d.last().unwrap();
        assert!(last >= 1e-4 && last < 1e-4 * 0.01f64.exp());
        assert!(TimeGrid::log_distance(1.0, 0.0, 1e-3).is_err());
        assert!(TimeGrid::log_distance(1.0, 0.1, 2.0).is_err());
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(build_grid(0.0, 4, None).is_err());
        assert!(build_grid(-1.0, 4, None).is_err());
        assert!(build_grid(1.0, 1, None).is_err());
        assert!(build_grid(1.0, 4, Some(Refinement::toward(-0.5, 0.5))).is_err());
        assert!(build_grid(1.0, 4, Some(Refinement::toward(1.0, 1.0))).is_err());
    }

    #[test]
    fn default_depth_reaches_one_millionth() {
        let g = build_grid(1.0, 1024, Some(Refinement::toward(1.0, 0.5))).unwrap();
        assert!(g.smallest_step() <= 1e-6);
        assert!(g.last() < 1.0);
        let steps: Vec<f64> = g.steps().collect();
        let tail = &steps[1023..];
        for w in tail.windows(2) {
            assert!((w[1] / w[0] - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn singular_point_beyond_horizon_is_uniform() {
        let g = build_grid(1.0, 4, Some(Refinement::toward(2.0, 0.5))).unwrap();
        assert_eq!(g.nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn node_lookup_and_insertion() {
        let g = build_grid(1.0, 1024, Some(Refinement::toward(1.0, 0.5))).unwrap();
        assert_eq!(g.index_of(0.25).unwrap(), 256);
        assert!(g.index_of(0.9).is_err());
        let g2 = g.with_nodes(&[0.9]).unwrap();
        let k = g2.index_of(0.9).unwrap();
        assert!(g2.nodes()[k - 1] < 0.9 && g2.nodes()[k + 1] > 0.9);
        assert_eq!(g2.len(), g.len() + 1);
    }

    #[test]
    fn coarsening_keeps_endpoints() {
        let g = TimeGrid::uniform(1.0, 8);
        let (c, idx) = g.coarsened(2).unwrap();
        assert_eq!(c.nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(idx, vec![0, 2, 4, 6, 8]);
    }
}
