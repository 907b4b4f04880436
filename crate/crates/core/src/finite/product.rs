//! Product-space construction: `P̄` is the law of `(ω, ω)` and `Q̄ = P ⊗ R`.

use num_traits::Zero;
use serde::Serialize;

use super::{
    check_martingale, conditional_expectation, doob_decomposition, join_filtrations, measure_of, ser,
    FiniteFiltration, FiniteOutcomeSpace, Rational,
};
use crate::error::{Error, Result};

/// `Ω × Ω` with the product filtration `F_k ⊗ H_k` and the two measures.
#[derive(Debug, Clone)]
pub struct ProductSetup {
    space: FiniteOutcomeSpace,
    f: FiniteFiltration,
    h: FiniteFiltration,
    r: Vec<Rational>,
    product: FiniteFiltration,
    pbar: Vec<Rational>,
    qbar: Vec<Rational>,
}

impl ProductSetup {
    /// `r = None` uses `R = P`.
    pub fn new(space: FiniteOutcomeSpace, f: FiniteFiltration, h: FiniteFiltration, r: Option<Vec<Rational>>) -> Result<Self> {
        let n = space.len();
        if f.n_outcomes() != n || h.n_outcomes() != n {
            return Err(Error::Shape("filtrations must live on the outcome space".into()));
        }
        let r = match r {
            Some(r) => FiniteOutcomeSpace::new(space.labels().to_vec(), r)?.prob().to_vec(),
            None => space.prob().to_vec(),
        };
        let product = f.product(&h)?;
        let p = space.prob();
        let mut pbar = vec![Rational::zero(); n * n];
        let mut qbar = Vec::with_capacity(n * n);
        for i in 0..n {
            pbar[i * n + i] = p[i].clone();
            for rj in &r {
                qbar.push(&p[i] * rj);
            }
        }
        Ok(ProductSetup {
            space,
            f,
            h,
            r,
            product,
            pbar,
            qbar,
        })
    }

    pub fn space(&self) -> &FiniteOutcomeSpace {
        &self.space
    }

    pub fn f(&self) -> &FiniteFiltration {
        &self.f
    }

    pub fn h(&self) -> &FiniteFiltration {
        &self.h
    }

    pub fn r(&self) -> &[Rational] {
        &self.r
    }

    pub fn product_filtration(&self) -> &FiniteFiltration {
        &self.product
    }

    pub fn pbar(&self) -> &[Rational] {
        &self.pbar
    }

    pub fn qbar(&self) -> &[Rational] {
        &self.qbar
    }

    /// `F_k ∨ H_k`, the pull-back of the product filtration along the diagonal.
    pub fn enlarged_filtration(&self) -> Result<FiniteFiltration> {
        join_filtrations(&self.f, &self.h)
    }

    fn n(&self) -> usize {
        self.space.len()
    }

    /// `(P̄(A×B), Q̄(A×B)) = (P(A∩B), P(A) R(B))`.
    fn block_masses(&self, k: usize, a: usize, b: usize) -> (Rational, Rational) {
        let fa = &self.f.stage(k).blocks()[a];
        let hb = &self.h.stage(k).blocks()[b];
        let both: Vec<usize> = fa.iter().copied().filter(|i| hb.contains(i)).collect();
        (
            measure_of(self.space.prob(), &both),
            measure_of(self.space.prob(), fa) * measure_of(&self.r, hb),
        )
    }
}

/// Outcome of the `P̄ ≪ Q̄` check, with the first offending rectangle.
#[derive(Debug, Clone, Serialize)]
pub struct AbsoluteContinuity {
    pub holds: bool,
    pub witness: Option<AcWitness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AcWitness {
    pub stage: usize,
    pub f_block: Vec<String>,
    pub h_block: Vec<String>,
    #[serde(serialize_with = "ser::rat")]
    pub pbar: Rational,
}

pub fn check_absolute_continuity(setup: &ProductSetup) -> AbsoluteContinuity {
    for k in 0..setup.f.n_stages() {
        for a in 0..setup.f.stage(k).blocks().len() {
            for b in 0..setup.h.stage(k).blocks().len() {
                let (p, q) = setup.block_masses(k, a, b);
                if q.is_zero() && !p.is_zero() {
                    let names = |bl: &[usize]| bl.iter().map(|&i| setup.space.labels()[i].clone()).collect();
                    return AbsoluteContinuity {
                        holds: false,
                        witness: Some(AcWitness {
                            stage: k,
                            f_block: names(&setup.f.stage(k).blocks()[a]),
                            h_block: names(&setup.h.stage(k).blocks()[b]),
                            pbar: p,
                        }),
                    };
                }
            }
        }
    }
    AbsoluteContinuity {
        holds: true,
        witness: None,
    }
}

/// `Z_k = dP̄/dQ̄` on the product filtration, as functions on `Ω × Ω`
/// (index `i * n + j`). Rectangles null under both measures get 0.
pub fn likelihood_process(setup: &ProductSetup) -> Result<Vec<Vec<Rational>>> {
    let n = setup.n();
    (0..setup.f.n_stages())
        .map(|k| {
            let (fk, hk) = (setup.f.stage(k), setup.h.stage(k));
            let mut table = vec![vec![None; hk.blocks().len()]; fk.blocks().len()];
            let mut z = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    let (a, b) = (fk.block_of(i), hk.block_of(j));
                    if table[a][b].is_none() {
                        let (p, q) = setup.block_masses(k, a, b);
                        let v = if q.is_zero() {
                            if !p.is_zero() {
                                return Err(Error::AbsoluteContinuity {
                                    stage: k,
                                    detail: format!("rectangle ({a}, {b}) has P̄ > 0 and Q̄ = 0"),
                                });
                            }
                            Rational::zero()
                        } else {
                            p / q
                        };
                        table[a][b] = Some(v);
                    }
                    z.push(table[a][b].clone().unwrap());
                }
            }
            Ok(z)
        })
        .collect()
}

/// Compensator of an F-martingale in the enlarged filtration, obtained
/// from `C_k = Σ_{j≤k} E_Q̄[ΔZ_j ΔM̄_j | stage j-1] / Z_{j-1}` on the
/// diagonal, together with the exact verification results.
#[derive(Debug, Clone, Serialize)]
pub struct GirsanovResult {
    #[serde(serialize_with = "ser::mat")]
    pub likelihood_diagonal: Vec<Vec<Rational>>,
    #[serde(serialize_with = "ser::mat")]
    pub compensator: Vec<Vec<Rational>>,
    #[serde(serialize_with = "ser::mat")]
    pub compensated: Vec<Vec<Rational>>,
    pub likelihood_is_qbar_martingale: bool,
    pub compensated_is_g_martingale: bool,
    pub matches_doob_decomposition: bool,
}

pub fn discrete_girsanov(setup: &ProductSetup, m: &[Vec<Rational>]) -> Result<GirsanovResult> {
    check_martingale(m, &setup.f, setup.space.prob())?;
    let n = setup.n();
    let z = likelihood_process(setup)?;
    let likelihood_is_qbar_martingale = check_martingale(&z, &setup.product, &setup.qbar).is_ok();
    let stages = m.len();

    let mut compensator = vec![vec![Rational::zero(); n]];
    for j in 1..stages {
        let dzdm: Vec<Rational> = (0..n * n)
            .map(|ij| (&z[j][ij] - &z[j - 1][ij]) * (&m[j][ij / n] - &m[j - 1][ij / n]))
            .collect();
        let ce = conditional_expectation(&dzdm, setup.product.stage(j - 1), &setup.qbar);
        let next = (0..n)
            .map(|w| {
                let d = w * n + w;
                let prev = &compensator[j - 1][w];
                if z[j - 1][d].is_zero() {
                    prev.clone()
                } else {
                    prev + &ce.values[d] / &z[j - 1][d]
                }
            })
            .collect();
        compensator.push(next);
    }
    let compensated: Vec<Vec<Rational>> = m
        .iter()
        .zip(&compensator)
        .map(|(mk, ck)| mk.iter().zip(ck).map(|(a, c)| a - c).collect())
        .collect();

    let g = setup.enlarged_filtration()?;
    let p = setup.space.prob();
    let compensated_is_g_martingale = check_martingale(&compensated, &g, p).is_ok();
    let doob = doob_decomposition(m, &g, p)?;
    let matches_doob_decomposition = doob
        .predictable
        .iter()
        .zip(&compensator)
        .all(|(a, c)| (0..n).all(|w| p[w].is_zero() || a[w] == c[w]));
    let likelihood_diagonal = z.iter().map(|zk| (0..n).map(|w| zk[w * n + w].clone()).collect()).collect();

    Ok(GirsanovResult {
        likelihood_diagonal,
        compensator,
        compensated,
        likelihood_is_qbar_martingale,
        compensated_is_g_martingale,
        matches_doob_decomposition,
    })
}
