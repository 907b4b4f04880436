//! Decides whether `M = ∫ m dW` stays a semimartingale after enlarging the
//! Brownian filtration by `W_T`.
//!
//! The two functionals are
//!
//! * `∫_0^T |m_s| (T - s)^{-1/2} ds` (finite iff `M` survives), and
//! * `∫_0^T m_s² ds` (finite iff `M` is defined at all).
//!
//! Both are evaluated on a truncation ladder in the log-distance variable
//! `u = -ln((T - s)/T)`: rung `k` integrates up to `u_k = ln 2 · 2^k`, i.e.
//! up to the distance `ε_k = T · 2^{-2^k}` from `T`. In `u` the square-root
//! singularity becomes an exponential weight, and logarithmic divergences
//! such as `∫ u^{-α} du` become visible as non-decaying rung increments
//! within a few dozen rungs.
//!
//! Each rung is integrated with adaptive Gauss–Kronrod quadrature. The
//! sequence of partial integrals is extrapolated geometrically (Aitken),
//! which is exact when the rung increments form a geometric sequence, as
//! they do for every power-of-log integrand.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrand::DeterministicIntegrand;
use crate::quadrature;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LadderConfig {
    /// Relative tolerance on successive extrapolated values.
    pub tol: f64,
    /// Number of rungs before giving up with UNDECIDED.
    pub max_rungs: usize,
    /// Partial integrals above this value certify divergence.
    pub ceiling: f64,
    /// Consecutive rungs within `tol` needed to accept convergence.
    pub cauchy_run: usize,
    /// Consecutive non-decreasing increments needed to certify divergence.
    pub divergence_run: usize,
}

impl Default for LadderConfig {
    fn default() -> Self {
        LadderConfig {
            tol: 1e-9,
            max_rungs: 40,
            ceiling: 1e6,
            cauchy_run: 3,
            divergence_run: 5,
        }
    }
}

impl LadderConfig {
    pub fn with_tol(tol: f64) -> Self {
        LadderConfig {
            tol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidArgument(format!("tolerance must lie in (0, 1), got {}", self.tol)));
        }
        if self.max_rungs < 2 || self.cauchy_run == 0 || self.divergence_run == 0 {
            return Err(Error::InvalidArgument("ladder needs at least two rungs and positive run lengths".into()));
        }
        Ok(())
    }
}

/// Value of a ladder-evaluated functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FunctionalValue {
    Finite(f64),
    Diverges,
    Undecided,
}

impl FunctionalValue {
    pub fn finite(&self) -> Option<f64> {
        match self {
            FunctionalValue::Finite(v) => Some(*v),
            _ => None,
        }
    }
}

impl fmt::Display for FunctionalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionalValue::Finite(v) => write!(f, "{v:?}"),
            FunctionalValue::Diverges => write!(f, "DIVERGES"),
            FunctionalValue::Undecided => write!(f, "UNDECIDED"),
        }
    }
}

impl Serialize for FunctionalValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FunctionalValue::Finite(v) => s.serialize_f64(*v),
            FunctionalValue::Diverges => s.serialize_str("DIVERGES"),
            FunctionalValue::Undecided => s.serialize_str("UNDECIDED"),
        }
    }
}

/// One rung of the truncation ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rung {
    pub k: usize,
    /// Upper end of the rung in `u`.
    pub u: f64,
    /// `ln ε_k`, exact even when `ε_k` underflows.
    pub ln_epsilon: f64,
    pub epsilon: f64,
    pub partial: f64,
    pub increment: f64,
    /// Geometric extrapolation of the partial integrals, when applicable.
    pub extrapolated: Option<f64>,
    pub quad_converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderResult {
    pub value: FunctionalValue,
    pub rungs: Vec<Rung>,
}

impl LadderResult {
    pub fn rungs_used(&self) -> usize {
        self.rungs.len()
    }
}

/// Upper end of rung `k` in the log-distance variable.
pub fn rung_u(k: usize) -> f64 {
    std::f64::consts::LN_2 * 2f64.powi(k as i32)
}

/// Runs the ladder for `∫_0^T g(s) ds` where `ln g` is supplied as a function
/// of `(u, ln d)` with `d = T - s = T e^{-u}`; `None` means `g = 0`. The
/// Jacobian `ds = d du` is applied here.
fn ladder<F>(horizon: f64, cfg: &LadderConfig, ln_g: F) -> Result<LadderResult>
where
    F: Fn(f64, f64) -> Result<Option<f64>>,
{
    cfg.validate()?;
    let ln_t = horizon.ln();
    let quad_tol = (cfg.tol * 1e-2).max(1e-13);
    let failure = std::cell::Cell::new(None::<Error>);
    let integrand = |u: f64| -> f64 {
        let ln_d = ln_t - u;
        match ln_g(u, ln_d) {
            Ok(Some(l)) => (l + ln_d).exp(),
            Ok(None) => 0.0,
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        }
    };

    let mut rungs: Vec<Rung> = Vec::with_capacity(cfg.max_rungs);
    let mut partial = 0.0;
    let mut lo = 0.0;
    let mut cauchy = 0usize;
    let mut growing = 0usize;
    for k in 0..cfg.max_rungs {
        let hi = rung_u(k);
        let q = quadrature::integrate(integrand, lo, hi, quad_tol, 0.0);
        if let Some(e) = failure.take() {
            return Err(e);
        }
        if !q.value.is_finite() {
            return Ok(LadderResult {
                value: FunctionalValue::Diverges,
                rungs,
            });
        }
        let increment = q.value;
        partial += increment;
        let extrapolated = match rungs.last() {
            Some(prev) if prev.increment > 0.0 && increment >= 0.0 => {
                let r = increment / prev.increment;
                (r < 1.0).then(|| partial + increment * r / (1.0 - r))
            }
            Some(_) if increment == 0.0 => Some(partial),
            _ => None,
        };
        if let Some(prev) = rungs.last() {
            if increment >= prev.increment && increment > 0.0 {
                growing += 1;
            } else {
                growing = 0;
            }
            let settled = match (extrapolated, prev.extrapolated) {
                (Some(a), Some(b)) => (a - b).abs() <= cfg.tol * a.abs(),
                _ => increment == 0.0 && prev.increment == 0.0,
            };
            cauchy = if settled { cauchy + 1 } else { 0 };
        }
        let ln_epsilon = ln_t - hi;
        rungs.push(Rung {
            k,
            u: hi,
            ln_epsilon,
            epsilon: ln_epsilon.exp(),
            partial,
            increment,
            extrapolated,
            quad_converged: q.converged,
        });
        if partial > cfg.ceiling || growing >= cfg.divergence_run {
            return Ok(LadderResult {
                value: FunctionalValue::Diverges,
                rungs,
            });
        }
        if cauchy >= cfg.cauchy_run {
            let v = extrapolated.unwrap_or(partial);
            return Ok(LadderResult {
                value: FunctionalValue::Finite(v),
                rungs,
            });
        }
        lo = hi;
    }
    Ok(LadderResult {
        value: FunctionalValue::Undecided,
        rungs,
    })
}

fn check_horizon(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon must be positive and finite, got {t}")));
    }
    Ok(())
}

/// `∫_0^T |m_s| (T - s)^{-1/2} ds`.
pub fn jeulin_yor_functional(m: &DeterministicIntegrand, t: f64, cfg: &LadderConfig) -> Result<LadderResult> {
    check_horizon(t)?;
    ladder(t, cfg, |_, ln_d| Ok(m.ln_abs_at_distance(t, ln_d)?.map(|l| l - 0.5 * ln_d)))
}

/// `∫_0^T |f(s)| ds`.
pub fn absolute_integral(f: &DeterministicIntegrand, t: f64, cfg: &LadderConfig) -> Result<LadderResult> {
    check_horizon(t)?;
    ladder(t, cfg, |_, ln_d| f.ln_abs_at_distance(t, ln_d))
}

/// `∫_0^T m_s² ds`.
pub fn l2_norm(m: &DeterministicIntegrand, t: f64, cfg: &LadderConfig) -> Result<LadderResult> {
    check_horizon(t)?;
    ladder(t, cfg, |_, ln_d| Ok(m.ln_abs_at_distance(t, ln_d)?.map(|l| 2.0 * l)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Semimartingale,
    NotSemimartingale,
    NotDefined,
    Undecided,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Semimartingale => "SEMIMARTINGALE",
            Verdict::NotSemimartingale => "NOT_SEMIMARTINGALE",
            Verdict::NotDefined => "NOT_DEFINED",
            Verdict::Undecided => "UNDECIDED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationVerdict {
    pub integrand: DeterministicIntegrand,
    pub horizon: f64,
    pub jy_value: FunctionalValue,
    pub l2_value: FunctionalValue,
    pub verdict: Verdict,
    pub config: LadderConfig,
    pub jy_ladder: Vec<Rung>,
    pub l2_ladder: Vec<Rung>,
}

impl ClassificationVerdict {
    pub fn rungs_used(&self) -> usize {
        self.jy_ladder.len().max(self.l2_ladder.len())
    }

    pub const CSV_HEADER: &'static str = "family,params,T,jy_value,l2_value,verdict,rungs_used";

    pub fn csv_row(&self) -> String {
        format!(
            "{},\"{}\",{:?},{},{},{},{}",
            self.integrand.family_name(),
            self.integrand.params(),
            self.horizon,
            self.jy_value,
            self.l2_value,
            self.verdict,
            self.rungs_used()
        )
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        writeln!(out, "{}", self.csv_row())?;
        Ok(())
    }
}

/// Combines both functionals: the integral is undefined when the L² norm
/// diverges, a semimartingale when both are finite, and not a
/// semimartingale when only the L² norm is finite.
pub fn classify(m: &DeterministicIntegrand, t: f64, cfg: &LadderConfig) -> Result<ClassificationVerdict> {
    let l2 = l2_norm(m, t, cfg)?;
    let jy = jeulin_yor_functional(m, t, cfg)?;
    let verdict = match (l2.value, jy.value) {
        (FunctionalValue::Diverges, _) => Verdict::NotDefined,
        (FunctionalValue::Undecided, _) => Verdict::Undecided,
        (FunctionalValue::Finite(_), FunctionalValue::Finite(_)) => Verdict::Semimartingale,
        (FunctionalValue::Finite(_), FunctionalValue::Diverges) => Verdict::NotSemimartingale,
        (FunctionalValue::Finite(_), FunctionalValue::Undecided) => Verdict::Undecided,
    };
    Ok(ClassificationVerdict {
        integrand: m.clone(),
        horizon: t,
        jy_value: jy.value,
        l2_value: l2.value,
        verdict,
        config: *cfg,
        jy_ladder: jy.rungs,
        l2_ladder: l2.rungs,
    })
}
