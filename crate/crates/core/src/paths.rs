//! Brownian and compound Poisson path ensembles.
//!
//! Paths are stored row-major (`values[path * n_nodes + node]`). Each path is
//! generated from its own substream (see [`crate::rng`]), so an ensemble for
//! paths `a..b` is bit-identical to rows `a..b` of a larger ensemble built
//! from the same seed. Large experiments use this to work in chunks.

use std::fmt;
use std::io::Write;
use std::ops::Range;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{SeedSpec, StreamDomain};
use crate::timegrid::TimeGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessLabel {
    Brownian,
    CompoundPoisson,
    Derived(String),
}

/// Where the draws of an ensemble came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub seed: SeedSpec,
    pub domain: StreamDomain,
    pub first_path: u64,
    pub derivation: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathEnsemble {
    grid: TimeGrid,
    values: Vec<f64>,
    n_paths: usize,
    label: ProcessLabel,
    seed_record: Option<SeedRecord>,
}

/// Jump size distribution of a compound Poisson process. Named in configs
/// as `const:c=1`, `sym:a=1` or `normal:mean=0,sd=1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum JumpLaw {
    /// Every jump equals the given size.
    Constant(f64),
    /// `+a` or `-a` with probability one half each.
    Symmetric(f64),
    Normal { mean: f64, sd: f64 },
}

impl fmt::Display for JumpLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            JumpLaw::Constant(c) => write!(f, "const:c={c}"),
            JumpLaw::Symmetric(a) => write!(f, "sym:a={a}"),
            JumpLaw::Normal { mean, sd } => write!(f, "normal:mean={mean},sd={sd}"),
        }
    }
}

impl FromStr for JumpLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("cannot parse jump law `{s}`"));
        let (name, rest) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
        let mut keys = std::collections::BTreeMap::new();
        for kv in rest.split(',').filter(|kv| !kv.trim().is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(bad)?;
            let v: f64 = v.trim().parse().map_err(|_| bad())?;
            keys.insert(k.trim().to_string(), v);
        }
        let mut take = |k: &str, default: Option<f64>| keys.remove(k).or(default).ok_or_else(bad);
        let law = match name {
            "const" | "constant" => JumpLaw::Constant(take("c", Some(1.0))?),
            "sym" | "symmetric" => JumpLaw::Symmetric(take("a", Some(1.0))?),
            "normal" => JumpLaw::Normal {
                mean: take("mean", Some(0.0))?,
                sd: take("sd", Some(1.0))?,
            },
            _ => return Err(bad()),
        };
        if !keys.is_empty() {
            return Err(Error::Config(format!("unknown jump-law keys in `{s}`")));
        }
        law.validate()?;
        Ok(law)
    }
}

impl TryFrom<String> for JumpLaw {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<JumpLaw> for String {
    fn from(j: JumpLaw) -> String {
        j.to_string()
    }
}

impl JumpLaw {
    pub fn mean(&self) -> f64 {
        match *self {
            JumpLaw::Constant(c) => c,
            JumpLaw::Symmetric(_) => 0.0,
            JumpLaw::Normal { mean, .. } => mean,
        }
    }

    pub fn second_moment(&self) -> f64 {
        match *self {
            JumpLaw::Constant(c) | JumpLaw::Symmetric(c) => c * c,
            JumpLaw::Normal { mean, sd } => mean * mean + sd * sd,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            JumpLaw::Constant(c) | JumpLaw::Symmetric(c) => c.is_finite(),
            JumpLaw::Normal { mean, sd } => mean.is_finite() && sd.is_finite() && sd >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("jump law {self:?} has no finite mean")))
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            JumpLaw::Constant(c) => c,
            JumpLaw::Symmetric(a) => {
                if rng.random::<bool>() {
                    a
                } else {
                    -a
                }
            }
            JumpLaw::Normal { mean, sd } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + sd * z
            }
        }
    }
}

impl PathEnsemble {
    /// Wraps precomputed values (row-major, one row per path).
    pub fn from_values(grid: TimeGrid, n_paths: usize, values: Vec<f64>, label: ProcessLabel) -> Result<Self> {
        if values.len() != n_paths * grid.len() {
            return Err(Error::Shape(format!(
                "{} values for {} paths on {} nodes",
                values.len(),
                n_paths,
                grid.len()
            )));
        }
        Ok(PathEnsemble {
            grid,
            values,
            n_paths,
            label,
            seed_record: None,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn n_paths(&self) -> usize {
        self.n_paths
    }

    pub fn n_nodes(&self) -> usize {
        self.grid.len()
    }

    pub fn label(&self) -> &ProcessLabel {
        &self.label
    }

    pub fn seed_record(&self) -> Option<&SeedRecord> {
        self.seed_record.as_ref()
    }

    pub(crate) fn set_seed_record(&mut self, record: SeedRecord) {
        self.seed_record = Some(record);
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn path(&self, p: usize) -> &[f64] {
        let n = self.n_nodes();
        &self.values[p * n..(p + 1) * n]
    }

    pub fn paths(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_nodes())
    }

    pub fn value(&self, p: usize, node: usize) -> f64 {
        self.values[p * self.n_nodes() + node]
    }

    /// Values of every path at one node.
    pub fn column(&self, node: usize) -> Vec<f64> {
        self.paths().map(|row| row[node]).collect()
    }

    /// Values of every path at time `t`, which must be a node.
    pub fn at_time(&self, t: f64) -> Result<Vec<f64>> {
        Ok(self.column(self.grid.index_of(t)?))
    }

    /// Restriction to the first `n_nodes` nodes of the grid.
    pub fn truncated(&self, n_nodes: usize) -> Result<PathEnsemble> {
        if n_nodes < 2 || n_nodes > self.n_nodes() {
            return Err(Error::Shape(format!("cannot truncate to {n_nodes} nodes")));
        }
        let grid = TimeGrid::from_nodes(self.grid.nodes()[..n_nodes].to_vec())?;
        let values = self.paths().flat_map(|row| row[..n_nodes].iter().copied()).collect();
        Ok(PathEnsemble {
            grid,
            values,
            n_paths: self.n_paths,
            label: self.label.clone(),
            seed_record: self.seed_record.clone(),
        })
    }

    /// Restriction to a subset of node indices (in increasing order).
    pub fn restricted(&self, grid: TimeGrid, node_idx: &[usize]) -> Result<PathEnsemble> {
        if grid.len() != node_idx.len() {
            return Err(Error::Shape("grid and index list differ in length".into()));
        }
        let values = self
            .paths()
            .flat_map(|row| node_idx.iter().map(move |&i| row[i]))
            .collect();
        Ok(PathEnsemble {
            grid,
            values,
            n_paths: self.n_paths,
            label: self.label.clone(),
            seed_record: self.seed_record.clone(),
        })
    }

    /// Writes `path,t,value` rows; floats use shortest round-trip formatting.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "path,t,value")?;
        let offset = self.seed_record.as_ref().map_or(0, |r| r.first_path);
        for (p, row) in self.paths().enumerate() {
            for (t, v) in self.grid.nodes().iter().zip(row) {
                writeln!(out, "{},{:?},{:?}", offset + p as u64, t, v)?;
            }
        }
        Ok(())
    }
}

/// Standard Brownian motion on the grid for paths `0..n_paths`.
pub fn simulate_brownian(grid: &TimeGrid, n_paths: usize, seed: SeedSpec) -> Result<PathEnsemble> {
    simulate_brownian_range(grid, 0..n_paths as u64, seed)
}

/// Brownian paths with global indices in `paths`.
pub fn simulate_brownian_range(grid: &TimeGrid, paths: Range<u64>, seed: SeedSpec) -> Result<PathEnsemble> {
    let n_paths = paths.end.saturating_sub(paths.start) as usize;
    if n_paths == 0 {
        return Err(Error::InvalidArgument("n_paths must be at least 1".into()));
    }
    let n = grid.len();
    let sd: Vec<f64> = grid.steps().map(f64::sqrt).collect();
    let mut values = vec![0.0; n_paths * n];
    values.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let mut rng = seed.stream(StreamDomain::Brownian, paths.start + i as u64);
        let mut w = 0.0;
        row[0] = 0.0;
        for (k, s) in sd.iter().enumerate() {
            let z: f64 = StandardNormal.sample(&mut rng);
            w += s * z;
            row[k + 1] = w;
        }
    });
    Ok(PathEnsemble {
        grid: grid.clone(),
        values,
        n_paths,
        label: ProcessLabel::Brownian,
        seed_record: Some(SeedRecord {
            seed,
            domain: StreamDomain::Brownian,
            first_path: paths.start,
            derivation: seed.describe(),
        }),
    })
}

/// Compound Poisson paths `Z_t = sum of jumps up to t`, recorded at grid nodes.
pub fn simulate_compound_poisson(
    grid: &TimeGrid,
    rate: f64,
    jumps: JumpLaw,
    n_paths: usize,
    seed: SeedSpec,
) -> Result<PathEnsemble> {
    simulate_compound_poisson_range(grid, rate, jumps, 0..n_paths as u64, seed)
}

pub fn simulate_compound_poisson_range(
    grid: &TimeGrid,
    rate: f64,
    jumps: JumpLaw,
    paths: Range<u64>,
    seed: SeedSpec,
) -> Result<PathEnsemble> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(Error::InvalidArgument(format!("jump rate must be non-negative, got {rate}")));
    }
    jumps.validate()?;
    let n_paths = paths.end.saturating_sub(paths.start) as usize;
    if n_paths == 0 {
        return Err(Error::InvalidArgument("n_paths must be at least 1".into()));
    }
    let n = grid.len();
    let nodes = grid.nodes();
    let mut values = vec![0.0; n_paths * n];
    if rate > 0.0 {
        let gap = Exp::new(rate).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let end = grid.last();
        values.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            let mut rng = seed.stream(StreamDomain::CompoundPoisson, paths.start + i as u64);
            let mut level = 0.0;
            let mut next_jump: f64 = gap.sample(&mut rng);
            for (k, &t) in nodes.iter().enumerate() {
                while next_jump <= t && next_jump <= end {
                    level += jumps.sample(&mut rng);
                    next_jump += gap.sample(&mut rng);
                }
                row[k] = level;
            }
        });
    }
    Ok(PathEnsemble {
        grid: grid.clone(),
        values,
        n_paths,
        label: ProcessLabel::CompoundPoisson,
        seed_record: Some(SeedRecord {
            seed,
            domain: StreamDomain::CompoundPoisson,
            first_path: paths.start,
            derivation: seed.describe(),
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::summary;

    #[test]
    fn jump_law_strings() {
        for law in [JumpLaw::Constant(1.0), JumpLaw::Symmetric(0.5), JumpLaw::Normal { mean: 0.1, sd: 2.0 }] {
            assert_eq!(law.to_string().parse::<JumpLaw>().unwrap(), law);
        }
        assert_eq!("sym".parse::<JumpLaw>().unwrap(), JumpLaw::Symmetric(1.0));
        assert!("sym:b=1".parse::<JumpLaw>().is_err());
        assert!("normal:sd=-1".parse::<JumpLaw>().is_err());
        assert!("cauchy".parse::<JumpLaw>().is_err());
    }

    #[test]
    fn brownian_starts_at_zero_and_has_unit_variance() {
        let grid = TimeGrid::uniform(1.0, 16);
        let ens = simulate_brownian(&grid, 100_000, SeedSpec::new(11)).unwrap();
        assert!(ens.column(0).iter().all(|&v| v == 0.0));
        let s = summary(&ens.column(16));
        // SE of a variance estimate is about sqrt(2/N) = 0.0045
        assert!((s.variance - 1.0).abs() < 0.02, "variance {}", s.variance);
    }

    #[test]
    fn disjoint_increments_are_uncorrelated() {
        let grid = TimeGrid::uniform(1.0, 4);
        let n = 100_000;
        let ens = simulate_brownian(&grid, n, SeedSpec::new(5)).unwrap();
        let a: Vec<f64> = ens.paths().map(|r| r[1] - r[0]).collect();
        let b: Vec<f64> = ens.paths().map(|r| r[3] - r[2]).collect();
        let corr = crate::stats::correlation(&a, &b);
        assert!(corr.abs() < 3.0 / (n as f64).sqrt(), "corr {corr}");
    }

    #[test]
    fn chunked_simulation_matches_whole() {
        let grid = TimeGrid::uniform(1.0, 8);
        let seed = SeedSpec::new(99);
        let whole = simulate_brownian(&grid, 10, seed).unwrap();
        let tail = simulate_brownian_range(&grid, 6..10, seed).unwrap();
        assert_eq!(&whole.values()[6 * 9..], tail.values());
    }

    #[test]
    fn thread_count_does_not_change_paths() {
        let grid = TimeGrid::uniform(1.0, 32);
        let seed = SeedSpec::new(3);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| simulate_brownian(&grid, 500, seed).unwrap());
        let b = four.install(|| simulate_brownian(&grid, 500, seed).unwrap());
        assert_eq!(a.values(), b.values());
        let c = one.install(|| simulate_compound_poisson(&grid, 2.0, JumpLaw::Symmetric(1.0), 500, seed).unwrap());
        let d = four.install(|| simulate_compound_poisson(&grid, 2.0, JumpLaw::Symmetric(1.0), 500, seed).unwrap());
        assert_eq!(c.values(), d.values());
    }

    #[test]
    fn compound_poisson_unit_jumps_mean() {
        let grid = TimeGrid::uniform(2.0, 8);
        let n = 100_000;
        let ens = simulate_compound_poisson(&grid, 1.0, JumpLaw::Constant(1.0), n, SeedSpec::new(8)).unwrap();
        let s = summary(&ens.column(8));
        assert!((s.mean - 2.0).abs() < 3.0 * (2.0 / n as f64).sqrt(), "mean {}", s.mean);
        // integer valued, non-decreasing
        assert!(ens.paths().all(|r| r.windows(2).all(|w| w[1] >= w[0] && w[1].fract() == 0.0)));
    }

    #[test]
    fn compound_poisson_symmetric_jumps_centered() {
        let grid = TimeGrid::uniform(1.0, 4);
        let n = 100_000;
        let ens = simulate_compound_poisson(&grid, 1.0, JumpLaw::Symmetric(1.0), n, SeedSpec::new(4)).unwrap();
        let s = summary(&ens.column(4));
        assert!(s.mean.abs() < 3.0 / (n as f64).sqrt());
    }

    #[test]
    fn zero_rate_gives_zero_paths() {
        let grid = TimeGrid::uniform(1.0, 4);
        let ens = simulate_compound_poisson(&grid, 0.0, JumpLaw::Constant(1.0), 10, SeedSpec::new(1)).unwrap();
        assert!(ens.values().iter().all(|&v| v == 0.0));
        assert!(simulate_compound_poisson(&grid, -1.0, JumpLaw::Constant(1.0), 10, SeedSpec::new(1)).is_err());
    }

    #[test]
    fn csv_has_header_and_full_precision() {
        let grid = TimeGrid::uniform(1.0, 2);
        let ens = simulate_brownian(&grid, 2, SeedSpec::new(1)).unwrap();
        let mut buf = Vec::new();
        ens.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("path,t,value"));
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 6);
        let last: f64 = rows[5].split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(last, ens.value(1, 2));
    }
}
