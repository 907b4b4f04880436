//! Exact verification on finite probability spaces.
//!
//! Outcomes are indices `0..n` with rational probabilities; σ-algebras are
//! partitions and filtrations are refining sequences of partitions indexed
//! by discrete stages `0..=n_stages - 1`. Everything is computed with
//! arbitrary-precision rationals, so every check is an exact equality.

mod instance;
mod jacod;
mod product;

pub use instance::{random_instance, FiniteDemoReport, FiniteInstance, RandomInstanceSpec};
pub use jacod::{countable_enlargement, jacod_discrete_checks, JacodReport, JacodRow, JacodStage};
pub use product::{
    check_absolute_continuity, discrete_girsanov, likelihood_process, AbsoluteContinuity, GirsanovResult,
    ProductSetup,
};

use std::collections::HashMap;
use std::hash::Hash;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Renders `num/den` (always with a denominator).
pub fn rat_str(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub(crate) mod ser {
    use super::{rat_str, Rational};
    use serde::ser::{SerializeSeq, Serializer};

    pub fn rat<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rat_str(r))
    }

    pub fn vec<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(rat_str))
    }

    pub fn opt_vec<S: Serializer>(v: &[Option<Rational>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|r| r.as_ref().map(rat_str)))
    }

    pub fn mat<S: Serializer>(m: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(m.len()))?;
        for row in m {
            seq.serialize_element(&row.iter().map(rat_str).collect::<Vec<_>>())?;
        }
        seq.end()
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    s.trim()
        .parse::<Rational>()
        .map_err(|_| Error::Config(format!("`{s}` is not a rational number")))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Outcomes with exact probabilities summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteOutcomeSpace {
    labels: Vec<String>,
    prob: Vec<Rational>,
}

impl FiniteOutcomeSpace {
    pub fn new(labels: Vec<String>, prob: Vec<Rational>) -> Result<Self> {
        if labels.is_empty() || labels.len() != prob.len() {
            return Err(Error::InvalidArgument("need one probability per outcome".into()));
        }
        if prob.iter().any(|p| p.is_negative()) {
            return Err(Error::InvalidArgument("probabilities must be non-negative".into()));
        }
        let total: Rational = prob.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidArgument(format!("probabilities sum to {}, not 1", rat_str(&total))));
        }
        let mut seen = labels.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != labels.len() {
            return Err(Error::InvalidArgument("outcome labels must be distinct".into()));
        }
        Ok(FiniteOutcomeSpace { labels, prob })
    }

    pub fn uniform(n: usize) -> Self {
        let labels = (1..=n).map(|i| i.to_string()).collect();
        let prob = vec![rat(1, n as i64); n];
        FiniteOutcomeSpace { labels, prob }
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn prob(&self) -> &[Rational] {
        &self.prob
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Config(format!("unknown outcome `{label}`")))
    }
}

/// Probability of a set of outcomes under `measure`.
pub fn measure_of(measure: &[Rational], set: &[usize]) -> Rational {
    set.iter().map(|&i| &measure[i]).sum()
}

/// A partition of `0..n` into non-empty blocks, ordered by smallest element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut block_of = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidArgument("empty block in partition".into()));
            }
            for &i in block {
                if i >= n {
                    return Err(Error::InvalidArgument(format!("outcome {i} out of range")));
                }
                if block_of[i] != usize::MAX {
                    return Err(Error::InvalidArgument(format!("outcome {i} in two blocks")));
                }
                block_of[i] = b;
            }
        }
        if block_of.contains(&usize::MAX) {
            return Err(Error::InvalidArgument("blocks do not cover the outcome set".into()));
        }
        Ok(Self::from_block_ids(&block_of))
    }

    /// Level sets of `labels`.
    pub fn from_labels<L: Eq + Hash>(labels: &[L]) -> Self {
        let mut ids: HashMap<&L, usize> = HashMap::new();
        let raw: Vec<usize> = labels
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(l).or_insert(next)
            })
            .collect();
        Self::from_block_ids(&raw)
    }

    fn from_block_ids(raw: &[usize]) -> Self {
        // renumber blocks by first appearance
        let mut map: HashMap<usize, usize> = HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut block_of = Vec::with_capacity(raw.len());
        for (i, r) in raw.iter().enumerate() {
            let b = *map.entry(*r).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(i);
            block_of.push(b);
        }
        Partition { blocks, block_of }
    }

    pub fn trivial(n: usize) -> Self {
        Self::from_block_ids(&vec![0; n])
    }

    pub fn discrete(n: usize) -> Self {
        Self::from_block_ids(&(0..n).collect::<Vec<_>>())
    }

    pub fn n_outcomes(&self) -> usize {
        self.block_of.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.block_of[i]
    }

    /// Coarsest common refinement (non-empty pairwise intersections).
    pub fn join(&self, other: &Partition) -> Result<Partition> {
        if self.n_outcomes() != other.n_outcomes() {
            return Err(Error::Shape("partitions of different outcome sets".into()));
        }
        let pairs: Vec<(usize, usize)> = (0..self.n_outcomes())
            .map(|i| (self.block_of[i], other.block_of[i]))
            .collect();
        Ok(Self::from_labels(&pairs))
    }

    /// `A × B` blocks on `Ω × Ω'`, outcome `(i, j)` at index `i * |Ω'| + j`.
    pub fn product(&self, other: &Partition) -> Partition {
        let m = other.n_outcomes();
        let ids: Vec<usize> = (0..self.n_outcomes() * m)
            .map(|ij| self.block_of[ij / m] * other.blocks.len() + other.block_of[ij % m])
            .collect();
        Self::from_block_ids(&ids)
    }

    /// Whether every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.blocks
            .iter()
            .all(|b| b.iter().all(|&i| coarser.block_of[i] == coarser.block_of[b[0]]))
    }

    /// Whether `f` is constant on every block.
    pub fn measurable(&self, f: &[Rational]) -> Option<usize> {
        self.blocks
            .iter()
            .position(|b| b.iter().any(|&i| f[i] != f[b[0]]))
    }
}

/// Refining sequence of partitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteFiltration {
    stages: Vec<Partition>,
}

impl FiniteFiltration {
    pub fn new(stages: Vec<Partition>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::InvalidArgument("a filtration needs at least one stage".into()));
        }
        let n = stages[0].n_outcomes();
        if stages.iter().any(|s| s.n_outcomes() != n) {
            return Err(Error::Shape("stages over different outcome sets".into()));
        }
        if let Some(k) = stages.windows(2).position(|w| !w[1].refines(&w[0])) {
            return Err(Error::InvalidArgument(format!("stage {} does not refine stage {k}", k + 1)));
        }
        Ok(FiniteFiltration { stages })
    }

    pub fn constant(p: Partition, n_stages: usize) -> Self {
        FiniteFiltration {
            stages: vec![p; n_stages],
        }
    }

    pub fn trivial(n_outcomes: usize, n_stages: usize) -> Self {
        Self::constant(Partition::trivial(n_outcomes), n_stages)
    }

    pub fn stages(&self) -> &[Partition] {
        &self.stages
    }

    pub fn stage(&self, k: usize) -> &Partition {
        &self.stages[k]
    }

    pub fn n_stages(&self) -> usize {
        self.stages.len()
    }

    pub fn n_outcomes(&self) -> usize {
        self.stages[0].n_outcomes()
    }

    /// Stagewise product on `Ω × Ω'`.
    pub fn product(&self, other: &FiniteFiltration) -> Result<FiniteFiltration> {
        check_same_length(self, other)?;
        Ok(FiniteFiltration {
            stages: self.stages.iter().zip(&other.stages).map(|(a, b)| a.product(b)).collect(),
        })
    }
}

fn check_same_length(a: &FiniteFiltration, b: &FiniteFiltration) -> Result<()> {
    if a.n_stages() != b.n_stages() || a.n_outcomes() != b.n_outcomes() {
        return Err(Error::Shape(format!(
            "filtrations differ: {} vs {} stages on {} vs {} outcomes",
            a.n_stages(),
            b.n_stages(),
            a.n_outcomes(),
            b.n_outcomes()
        )));
    }
    Ok(())
}

/// Stagewise join `F_k ∨ H_k`.
pub fn join_filtrations(f: &FiniteFiltration, h: &FiniteFiltration) -> Result<FiniteFiltration> {
    check_same_length(f, h)?;
    let stages = f
        .stages
        .iter()
        .zip(&h.stages)
        .map(|(a, b)| a.join(b))
        .collect::<Result<Vec<_>>>()?;
    Ok(FiniteFiltration { stages })
}

/// Every stage joined with the level sets of `x`.
pub fn initial_enlargement<L: Eq + Hash>(f: &FiniteFiltration, x: &[L]) -> Result<FiniteFiltration> {
    if x.len() != f.n_outcomes() {
        return Err(Error::Shape("X must label every outcome".into()));
    }
    join_filtrations(f, &FiniteFiltration::constant(Partition::from_labels(x), f.n_stages()))
}

/// `E[f | partition]` under `measure`; blocks of measure zero get value 0
/// and are listed in `null_blocks`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalExpectation {
    pub values: Vec<Rational>,
    pub null_blocks: Vec<usize>,
}

pub fn conditional_expectation(f: &[Rational], partition: &Partition, measure: &[Rational]) -> ConditionalExpectation {
    let mut values = vec![Rational::zero(); f.len()];
    let mut null_blocks = Vec::new();
    for (b, block) in partition.blocks().iter().enumerate() {
        let mass = measure_of(measure, block);
        if mass.is_zero() {
            null_blocks.push(b);
            continue;
        }
        let avg: Rational = block.iter().map(|&i| &f[i] * &measure[i]).sum::<Rational>() / mass;
        for &i in block {
            values[i] = avg.clone();
        }
    }
    ConditionalExpectation { values, null_blocks }
}

/// Checks adaptedness and the exact martingale property
/// `E[X_{k+1} | stage k] = X_k` on every block of positive measure.
pub fn check_martingale(process: &[Vec<Rational>], filt: &FiniteFiltration, measure: &[Rational]) -> Result<()> {
    check_adapted(process, filt)?;
    for k in 0..process.len() - 1 {
        let part = filt.stage(k);
        let ce = conditional_expectation(&process[k + 1], part, measure);
        for (b, block) in part.blocks().iter().enumerate() {
            if ce.null_blocks.contains(&b) {
                continue;
            }
            if ce.values[block[0]] != process[k][block[0]] {
                return Err(Error::NotMartingale { stage: k, block: b });
            }
        }
    }
    Ok(())
}

pub fn check_adapted(process: &[Vec<Rational>], filt: &FiniteFiltration) -> Result<()> {
    if process.len() != filt.n_stages() {
        return Err(Error::Shape(format!(
            "process has {} stages, filtration {}",
            process.len(),
            filt.n_stages()
        )));
    }
    for (k, values) in process.iter().enumerate() {
        if values.len() != filt.n_outcomes() {
            return Err(Error::Shape(format!("stage {k} has {} values", values.len())));
        }
        if let Some(b) = filt.stage(k).measurable(values) {
            return Err(Error::NotAdapted { stage: k, block: b });
        }
    }
    Ok(())
}

/// Doob decomposition `X = M + A` with `A_k = Σ_{j≤k} E[X_j - X_{j-1} | stage j-1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoobDecomposition {
    pub martingale: Vec<Vec<Rational>>,
    pub predictable: Vec<Vec<Rational>>,
}

pub fn doob_decomposition(process: &[Vec<Rational>], filt: &FiniteFiltration, measure: &[Rational]) -> Result<DoobDecomposition> {
    check_adapted(process, filt)?;
    let n = filt.n_outcomes();
    let mut predictable = vec![vec![Rational::zero(); n]];
    for k in 1..process.len() {
        let delta: Vec<Rational> = process[k].iter().zip(&process[k - 1]).map(|(a, b)| a - b).collect();
        let ce = conditional_expectation(&delta, filt.stage(k - 1), measure);
        let next = predictable[k - 1].iter().zip(&ce.values).map(|(a, d)| a + d).collect();
        predictable.push(next);
    }
    let martingale = process
        .iter()
        .zip(&predictable)
        .map(|(x, a)| x.iter().zip(a).map(|(x, a)| x - a).collect())
        .collect();
    Ok(DoobDecomposition { martingale, predictable })
}

/// `M_k = E[f | stage k]`: the martingale closed by `f`.
pub fn martingale_from_terminal(f: &[Rational], filt: &FiniteFiltration, measure: &[Rational]) -> Vec<Vec<Rational>> {
    filt.stages()
        .iter()
        .map(|p| conditional_expectation(f, p, measure).values)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rat(x, 1)).collect()
    }

    fn four_outcome_f() -> FiniteFiltration {
        FiniteFiltration::new(vec![
            Partition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap(),
            Partition::discrete(4),
        ])
        .unwrap()
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(3, vec![vec![0, 1]]).is_err());
        assert!(Partition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(Partition::new(3, vec![vec![0, 1], vec![], vec![2]]).is_err());
        assert!(FiniteFiltration::new(vec![Partition::discrete(3), Partition::trivial(3)]).is_err());
        assert!(FiniteOutcomeSpace::new(vec!["a".into(), "b".into()], vec![rat(1, 2), rat(1, 3)]).is_err());
    }

    #[test]
    fn joins() {
        let f = four_outcome_f();
        assert_eq!(join_filtrations(&f, &FiniteFiltration::trivial(4, 2)).unwrap(), f);
        assert_eq!(join_filtrations(&f, &f).unwrap(), f);
        let h = FiniteFiltration::constant(Partition::new(4, vec![vec![0, 2], vec![1, 3]]).unwrap(), 2);
        let g = join_filtrations(&f, &h).unwrap();
        assert_eq!(g.stage(0), &Partition::discrete(4));
    }

    #[test]
    fn initial_enlargements() {
        let f = four_outcome_f();
        assert_eq!(initial_enlargement(&f, &[7, 7, 7, 7]).unwrap(), f);
        assert_eq!(initial_enlargement(&f, &[1, 2, 3, 4]).unwrap().stage(0), &Partition::discrete(4));
        let g = initial_enlargement(&f, &[1, 1, 0, 0]).unwrap();
        assert_eq!(g.stage(0), f.stage(0));
        let g = initial_enlargement(&FiniteFiltration::trivial(4, 2), &[1, 1, 0, 0]).unwrap();
        assert_eq!(g.stage(0), &Partition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap());
    }

    #[test]
    fn conditional_expectations() {
        let p = FiniteOutcomeSpace::uniform(4);
        let f = r(&[1, 2, 3, 4]);
        let ce = conditional_expectation(&f, &Partition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap(), p.prob());
        assert_eq!(ce.values, vec![rat(3, 2), rat(3, 2), rat(7, 2), rat(7, 2)]);
        assert_eq!(conditional_expectation(&f, &Partition::discrete(4), p.prob()).values, f);
        let c = r(&[5, 5, 5, 5]);
        assert_eq!(conditional_expectation(&c, &Partition::trivial(4), p.prob()).values, c);
        let skew = vec![rat(1, 2), rat(1, 2), rat(0, 1), rat(0, 1)];
        let ce = conditional_expectation(&f, &Partition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap(), &skew);
        assert_eq!(ce.null_blocks, vec![1]);
    }

    #[test]
    fn tower_property() {
        let p = [rat(1, 10), rat(2, 10), rat(3, 10), rat(4, 10)];
        let f = r(&[3, -1, 4, 1]);
        let fine = Partition::new(4, vec![vec![0, 1], vec![2], vec![3]]).unwrap();
        let coarse = Partition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let two_step = conditional_expectation(&conditional_expectation(&f, &fine, &p).values, &coarse, &p);
        assert_eq!(two_step, conditional_expectation(&f, &coarse, &p));
    }

    #[test]
    fn doob_of_biased_walk() {
        // two ±1 steps with P(+1) = 2/3; outcomes ++, +-, -+, --
        let prob = [rat(4, 9), rat(2, 9), rat(2, 9), rat(1, 9)];
        let filt = FiniteFiltration::new(vec![
            Partition::trivial(4),
            Partition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap(),
            Partition::discrete(4),
        ])
        .unwrap();
        let walk = vec![r(&[0, 0, 0, 0]), r(&[1, 1, -1, -1]), r(&[2, 0, 0, -2])];
        let d = doob_decomposition(&walk, &filt, &prob).unwrap();
        for k in 0..3 {
            assert!(d.predictable[k].iter().all(|a| *a == rat(k as i64, 3)));
        }
        check_martingale(&d.martingale, &filt, &prob).unwrap();
        let m = doob_decomposition(&d.martingale, &filt, &prob).unwrap();
        assert!(m.predictable.iter().flatten().all(Zero::is_zero));
        let det = vec![r(&[0; 4]), r(&[1; 4]), r(&[3; 4])];
        let d = doob_decomposition(&det, &filt, &prob).unwrap();
        assert!(d.martingale.iter().flatten().all(Zero::is_zero));
        let not_adapted = vec![r(&[0, 1, 0, 0]), r(&[1, 1, -1, -1]), r(&[2, 0, 0, -2])];
        assert!(matches!(
            doob_decomposition(&not_adapted, &filt, &prob),
            Err(Error::NotAdapted { stage: 0, .. })
        ));
    }
}
