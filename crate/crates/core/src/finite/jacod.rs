//! Conditional-law densities of a discrete enlarging variable.

use num_traits::{One, Zero};
use serde::Serialize;

use super::{
    check_martingale, initial_enlargement, join_filtrations, measure_of, ser, FiniteFiltration, FiniteOutcomeSpace,
    Partition, Rational,
};
use crate::error::{Error, Result};

/// `r_k(A, x) = P(A ∩ {X = x}) / (P(A) P(X = x))` for every block of
/// positive mass at every stage.
#[derive(Debug, Clone, Serialize)]
pub struct JacodReport {
    pub values: Vec<String>,
    #[serde(serialize_with = "ser::vec")]
    pub law: Vec<Rational>,
    pub stages: Vec<JacodStage>,
    /// Conditional laws are dominated by the law of `X` at every stage.
    pub absolutely_continuous: bool,
    /// `Σ_x r_k(A, x) P(X = x) = 1` on every block.
    pub densities_normalized: bool,
    /// `k ↦ r_k(·, x)` is an F-martingale for every value `x`.
    pub densities_are_martingales: bool,
    /// The enlarged filtration equals the stagewise join with `σ(X)`.
    pub enlargement_is_join: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct JacodStage {
    pub stage: usize,
    pub rows: Vec<JacodRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct JacodRow {
    pub block: Vec<String>,
    #[serde(serialize_with = "ser::rat")]
    pub prob: Rational,
    /// One entry per value; `None` when `P(X = x) = 0`.
    #[serde(serialize_with = "ser::opt_vec")]
    pub density: Vec<Option<Rational>>,
}

impl JacodReport {
    pub fn all_hold(&self) -> bool {
        self.absolutely_continuous && self.densities_normalized && self.densities_are_martingales && self.enlargement_is_join
    }
}

pub fn jacod_discrete_checks(space: &FiniteOutcomeSpace, f: &FiniteFiltration, x: &[String]) -> Result<JacodReport> {
    let n = space.len();
    if x.len() != n || f.n_outcomes() != n {
        return Err(Error::Shape("X and the filtration must cover the outcome space".into()));
    }
    let p = space.prob();
    let level = Partition::from_labels(x);
    let values: Vec<String> = level.blocks().iter().map(|b| x[b[0]].clone()).collect();
    let law: Vec<Rational> = level.blocks().iter().map(|b| measure_of(p, b)).collect();

    let mut absolutely_continuous = true;
    let mut densities_normalized = true;
    // per value, the density process evaluated pointwise (0 on null blocks)
    let mut pointwise = vec![vec![vec![Rational::zero(); n]; f.n_stages()]; values.len()];
    let mut stages = Vec::with_capacity(f.n_stages());
    for (k, part) in f.stages().iter().enumerate() {
        let mut rows = Vec::new();
        for block in part.blocks() {
            let pa = measure_of(p, block);
            if pa.is_zero() {
                continue;
            }
            let mut density = Vec::with_capacity(values.len());
            let mut total = Rational::zero();
            for (v, lb) in level.blocks().iter().enumerate() {
                let joint: Vec<usize> = block.iter().copied().filter(|i| lb.contains(i)).collect();
                let pj = measure_of(p, &joint);
                if law[v].is_zero() {
                    absolutely_continuous &= pj.is_zero();
                    density.push(None);
                    continue;
                }
                let r = &pj / (&pa * &law[v]);
                total += &r * &law[v];
                for &i in block {
                    pointwise[v][k][i] = r.clone();
                }
                density.push(Some(r));
            }
            densities_normalized &= total.is_one();
            rows.push(JacodRow {
                block: block.iter().map(|&i| space.labels()[i].clone()).collect(),
                prob: pa,
                density,
            });
        }
        stages.push(JacodStage { stage: k, rows });
    }
    let densities_are_martingales = pointwise.iter().all(|q| check_martingale(q, f, p).is_ok());
    let enlarged = initial_enlargement(f, x)?;
    let joined = join_filtrations(f, &FiniteFiltration::constant(level, f.n_stages()))?;
    Ok(JacodReport {
        values,
        law,
        stages,
        absolutely_continuous,
        densities_normalized,
        densities_are_martingales,
        enlargement_is_join: enlarged == joined,
    })
}

/// Enlargement by a countable partition `{A_n}`, realized as
/// `X = Σ n 1_{A_n}`.
pub fn countable_enlargement(
    space: &FiniteOutcomeSpace,
    f: &FiniteFiltration,
    partition: &Partition,
) -> Result<(FiniteFiltration, JacodReport)> {
    if partition.n_outcomes() != space.len() {
        return Err(Error::Shape("partition must cover the outcome space".into()));
    }
    let x: Vec<String> = (0..space.len()).map(|i| partition.block_of(i).to_string()).collect();
    Ok((initial_enlargement(f, &x)?, jacod_discrete_checks(space, f, &x)?))
}
