//! Deterministic integrands of time: the `φ` defining `X = ∫ φ dW`, the `m`
//! of a Wiener integral `M = ∫ m dW`, and test integrands `H`.
//!
//! Besides plain evaluation, every family can report `ln |f(T - d)|` from
//! `ln d`, which stays accurate when the distance `d` to a horizon `T` is far
//! below what `T - d` can resolve in floating point. The singularity-aware
//! integrals of [`crate::classifier`] and [`crate::martingale`] rely on it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Identically zero.
    Zero,
    /// `1` on `[0, T)`, `0` after.
    Indicator { horizon: f64 },
    /// `c` on `[0, T)`, `0` after.
    Constant { c: f64, horizon: f64 },
    /// `(T - s)^p` on `[0, T)`, `0` after.
    Power { exponent: f64, horizon: f64 },
    /// `(T - s)^(-1/2) * (-ln((T - s)/T))^(-alpha)` on `(T/2, T)`, `0` elsewhere.
    JeulinYor { alpha: f64, horizon: f64 },
    /// Piecewise-linear interpolation of `(times, values)`. Beyond the last
    /// time the function is zero when `zero_beyond` is set and undefined
    /// otherwise; before the first time it is zero.
    Tabulated {
        times: Vec<f64>,
        values: Vec<f64>,
        zero_beyond: bool,
    },
    /// Pointwise product.
    Product(Box<DeterministicIntegrand>, Box<DeterministicIntegrand>),
}

/// Serializes as its configuration string, e.g. `jy:alpha=0.75,T=1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct DeterministicIntegrand {
    pub family: Family,
    /// Relative tolerance for integrals without a closed form.
    pub quad_tol: f64,
}

impl DeterministicIntegrand {
    fn new(family: Family) -> Self {
        DeterministicIntegrand {
            family,
            quad_tol: DEFAULT_QUAD_TOL,
        }
    }

    pub fn zero() -> Self {
        Self::new(Family::Zero)
    }

    pub fn indicator(horizon: f64) -> Self {
        Self::new(Family::Indicator { horizon })
    }

    pub fn constant(c: f64, horizon: f64) -> Self {
        Self::new(Family::Constant { c, horizon })
    }

    pub fn power(exponent: f64, horizon: f64) -> Self {
        Self::new(Family::Power { exponent, horizon })
    }

    pub fn jeulin_yor(alpha: f64, horizon: f64) -> Self {
        Self::new(Family::JeulinYor { alpha, horizon })
    }

    pub fn tabulated(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::tabulated_with_tail(times, values, true)
    }

    pub fn tabulated_with_tail(times: Vec<f64>, values: Vec<f64>, zero_beyond: bool) -> Result<Self> {
        if times.len() != values.len() || times.is_empty() {
            return Err(Error::InvalidArgument(
                "tabulated integrand needs equally many (non-zero) times and values".into(),
            ));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || times[0] < 0.0 {
            return Err(Error::InvalidArgument("tabulated times must be non-negative and increasing".into()));
        }
        if values.iter().chain(&times).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("tabulated entries must be finite".into()));
        }
        Ok(Self::new(Family::Tabulated {
            times,
            values,
            zero_beyond,
        }))
    }

    pub fn product(a: DeterministicIntegrand, b: DeterministicIntegrand) -> Self {
        Self::new(Family::Product(Box::new(a), Box::new(b)))
    }

    pub fn with_quad_tol(mut self, tol: f64) -> Self {
        self.quad_tol = tol;
        self
    }

    /// Short name of the family, as used in reports.
    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::Zero => "zero",
            Family::Indicator { .. } => "indicator",
            Family::Constant { .. } => "const",
            Family::Power { .. } => "power",
            Family::JeulinYor { .. } => "jy",
            Family::Tabulated { .. } => "tab",
            Family::Product(..) => "product",
        }
    }

    /// Parameters of the family in `key=value` form.
    pub fn params(&self) -> String {
        let s = self.to_string();
        match s.split_once(':') {
            Some((_, p)) if !matches!(self.family, Family::Product(..)) => p.to_string(),
            _ => s,
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(self.not_evaluable(format!("negative time {t}")));
        }
        Ok(match &self.family {
            Family::Zero => 0.0,
            Family::Indicator { horizon } => indicator(t < *horizon),
            Family::Constant { c, horizon } => {
                if t < *horizon {
                    *c
                } else {
                    0.0
                }
            }
            Family::Power { exponent, horizon } => {
                if t < *horizon {
                    (horizon - t).powf(*exponent)
                } else {
                    0.0
                }
            }
            Family::JeulinYor { alpha, horizon } => {
                if t > 0.5 * horizon && t < *horizon {
                    let d = horizon - t;
                    d.powf(-0.5) * (-(d / horizon).ln()).powf(-alpha)
                } else {
                    0.0
                }
            }
            Family::Tabulated {
                times,
                values,
                zero_beyond,
            } => {
                let last = *times.last().unwrap();
                if t > last {
                    if *zero_beyond {
                        0.0
                    } else {
                        return Err(self.not_evaluable(format!("t = {t} beyond the table end {last}")));
                    }
                } else if t < times[0] {
                    0.0
                } else {
                    interpolate(times, values, t)
                }
            }
            Family::Product(a, b) => a.eval(t)? * b.eval(t)?,
        })
    }

    /// Values at every node of a grid.
    pub fn sample(&self, nodes: &[f64]) -> Result<Vec<f64>> {
        nodes.iter().map(|&t| self.eval(t)).collect()
    }

    /// First time after which the integrand vanishes identically, if any.
    pub fn support_end(&self) -> Option<f64> {
        match &self.family {
            Family::Zero => Some(0.0),
            Family::Indicator { horizon }
            | Family::Constant { horizon, .. }
            | Family::Power { horizon, .. }
            | Family::JeulinYor { horizon, .. } => Some(*horizon),
            Family::Tabulated {
                times, zero_beyond, ..
            } => zero_beyond.then(|| *times.last().unwrap()),
            Family::Product(a, b) => match (a.support_end(), b.support_end()) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            },
        }
    }

    /// `ln |f(T - d)|` given `ln d`, or `None` where `f` vanishes.
    ///
    /// Families whose own horizon coincides with `T` use closed forms in
    /// `ln d`, so distances far below `f64::EPSILON * T` are handled exactly.
    pub fn ln_abs_at_distance(&self, horizon: f64, ln_d: f64) -> Result<Option<f64>> {
        let d = ln_d.exp();
        if d > horizon {
            return Err(self.not_evaluable(format!("distance {d} exceeds horizon {horizon}")));
        }
        let same = |h: &f64| *h == horizon;
        let v = match &self.family {
            Family::Zero => None,
            Family::Indicator { horizon: h } if same(h) => Some(0.0),
            Family::Constant { c, horizon: h } if same(h) => (*c != 0.0).then(|| c.abs().ln()),
            Family::Power { exponent, horizon: h } if same(h) => Some(exponent * ln_d),
            Family::JeulinYor { alpha, horizon: h } if same(h) => {
                // u = -ln(d/T) > ln 2 on the support (T/2, T)
                let u = horizon.ln() - ln_d;
                (u > std::f64::consts::LN_2).then(|| -0.5 * ln_d - alpha * u.ln())
            }
            Family::Product(a, b) => match (
                a.ln_abs_at_distance(horizon, ln_d)?,
                b.ln_abs_at_distance(horizon, ln_d)?,
            ) {
                (Some(x), Some(y)) => Some(x + y),
                _ => None,
            },
            _ => {
                let v = self.eval(horizon - d)?;
                (v != 0.0).then(|| v.abs().ln())
            }
        };
        Ok(v)
    }

    /// `∫_a^b f(s)^2 ds`; `b = ∞` is allowed. Closed forms for the built-in
    /// families, adaptive quadrature (at `quad_tol`) otherwise.
    pub fn square_integral(&self, a: f64, b: f64) -> Result<f64> {
        if !(a >= 0.0) || !(b >= a) {
            return Err(Error::InvalidArgument(format!("bad integration range [{a}, {b}]")));
        }
        let clip = |h: f64| (a.min(h), b.min(h));
        Ok(match &self.family {
            Family::Zero => 0.0,
            Family::Indicator { horizon } => {
                let (lo, hi) = clip(*horizon);
                hi - lo
            }
            Family::Constant { c, horizon } => {
                let (lo, hi) = clip(*horizon);
                c * c * (hi - lo)
            }
            Family::Power { exponent, horizon } => {
                let (lo, hi) = clip(*horizon);
                let q = 2.0 * exponent + 1.0;
                if lo == hi {
                    0.0
                } else if q <= 0.0 && hi == *horizon {
                    f64::INFINITY
                } else if q == 0.0 {
                    ((horizon - lo) / (horizon - hi)).ln()
                } else {
                    ((horizon - lo).powf(q) - (horizon - hi).powf(q)) / q
                }
            }
            Family::JeulinYor { alpha, horizon } => {
                let lo = a.max(0.5 * horizon).min(*horizon);
                let hi = b.max(0.5 * horizon).min(*horizon);
                if lo == hi {
                    0.0
                } else {
                    // substitute u = -ln((T - s)/T): integrand u^(-2 alpha)
                    let u_lo = -((horizon - lo) / horizon).ln();
                    let q = 1.0 - 2.0 * alpha;
                    if hi == *horizon {
                        if q >= 0.0 {
                            f64::INFINITY
                        } else {
                            u_lo.powf(q) / -q
                        }
                    } else {
                        let u_hi = -((horizon - hi) / horizon).ln();
                        if q == 0.0 {
                            (u_hi / u_lo).ln()
                        } else {
                            (u_hi.powf(q) - u_lo.powf(q)) / q
                        }
                    }
                }
            }
            Family::Tabulated {
                times,
                values,
                zero_beyond,
            } => {
                let last = *times.last().unwrap();
                if b > last && !zero_beyond {
                    return Err(self.not_evaluable(format!(
                        "support extends beyond the table end {last}"
                    )));
                }
                // piecewise quadratic: integrate panel by panel
                let mut total = 0.0;
                for (w, v) in times.windows(2).zip(values.windows(2)) {
                    let lo = w[0].max(a);
                    let hi = w[1].min(b);
                    if hi > lo {
                        let f = |s: f64| {
                            let x = v[0] + (v[1] - v[0]) * (s - w[0]) / (w[1] - w[0]);
                            x * x
                        };
                        total += quadrature::integrate(f, lo, hi, self.quad_tol, 0.0).value;
                    }
                }
                total
            }
            Family::Product(..) => {
                let end = match self.support_end() {
                    Some(e) => b.min(e),
                    None if b.is_finite() => b,
                    None => {
                        return Err(self.not_evaluable("unbounded support".into()));
                    }
                };
                if end <= a {
                    0.0
                } else {
                    let f = |s: f64| self.eval(s).map(|v| v * v).unwrap_or(f64::NAN);
                    let r = quadrature::integrate(f, a, end, self.quad_tol, 0.0);
                    if !r.value.is_finite() {
                        return Err(self.not_evaluable("square integral is not finite".into()));
                    }
                    r.value
                }
            }
        })
    }

    /// Whether `∫_0^∞ f^2 < ∞` (closed form for built-ins, declared for tables).
    pub fn is_square_integrable(&self) -> bool {
        self.square_integral(0.0, f64::INFINITY)
            .map(f64::is_finite)
            .unwrap_or(false)
    }

    fn not_evaluable(&self, reason: String) -> Error {
        Error::NotEvaluable {
            family: self.to_string(),
            reason,
        }
    }
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn interpolate(times: &[f64], values: &[f64], t: f64) -> f64 {
    if times.len() == 1 {
        return values[0];
    }
    let k = times.partition_point(|&x| x <= t).clamp(1, times.len() - 1);
    let (t0, t1) = (times[k - 1], times[k]);
    let w = (t - t0) / (t1 - t0);
    values[k - 1] + w * (values[k] - values[k - 1])
}

impl fmt::Display for DeterministicIntegrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[f64]| xs.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join("/");
        match &self.family {
            Family::Zero => write!(f, "zero"),
            Family::Indicator { horizon } => write!(f, "indicator:T={horizon}"),
            Family::Constant { c, horizon } => write!(f, "const:c={c},T={horizon}"),
            Family::Power { exponent, horizon } => write!(f, "power:p={exponent},T={horizon}"),
            Family::JeulinYor { alpha, horizon } => write!(f, "jy:alpha={alpha},T={horizon}"),
            Family::Tabulated {
                times,
                values,
                zero_beyond,
            } => {
                write!(f, "tab:t={},v={}", join(times), join(values))?;
                if !zero_beyond {
                    write!(f, ",tail=open")?;
                }
                Ok(())
            }
            Family::Product(a, b) => write!(f, "{a}*{b}"),
        }
    }
}

/// Parses `indicator:T=1`, `jy:alpha=0.75,T=1`, `const:c=2,T=1`,
/// `power:p=1,T=1`, `tab:t=0/1,v=1/0[,tail=open]`, `zero`, and products
/// `a*b` of those. An optional `tol=` key sets the quadrature tolerance.
impl FromStr for DeterministicIntegrand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((a, b)) = s.split_once('*') {
            return Ok(DeterministicIntegrand::product(a.parse()?, b.parse()?));
        }
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut kv: Vec<(String, String)> = Vec::new();
        for part in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value in `{part}`")))?;
            kv.push((k.trim().to_string(), v.trim().to_string()));
        }
        let mut take = |key: &str| -> Option<String> {
            let i = kv.iter().position(|(k, _)| k == key)?;
            Some(kv.remove(i).1)
        };
        let num = |key: &str, v: Option<String>| -> Result<f64> {
            let v = v.ok_or_else(|| Error::Config(format!("integrand `{name}` needs `{key}=`")))?;
            v.parse::<f64>()
                .map_err(|_| Error::Config(format!("`{key}={v}` is not a number")))
        };
        let list = |key: &str, v: Option<String>| -> Result<Vec<f64>> {
            let v = v.ok_or_else(|| Error::Config(format!("integrand `{name}` needs `{key}=`")))?;
            v.split('/')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Config(format!("`{x}` in `{key}=` is not a number")))
                })
                .collect()
        };
        let tol = take("tol");
        let out = match name.trim() {
            "zero" => DeterministicIntegrand::zero(),
            "indicator" => DeterministicIntegrand::indicator(num("T", take("T"))?),
            "const" | "constant" => {
                DeterministicIntegrand::constant(num("c", take("c"))?, num("T", take("T"))?)
            }
            "power" => DeterministicIntegrand::power(num("p", take("p"))?, num("T", take("T"))?),
            "jy" | "jeulin_yor" => {
                DeterministicIntegrand::jeulin_yor(num("alpha", take("alpha"))?, num("T", take("T"))?)
            }
            "tab" | "tabulated" => {
                let times = list("t", take("t"))?;
                let values = list("v", take("v"))?;
                let zero_beyond = match take("tail").as_deref() {
                    None | Some("zero") => true,
                    Some("open") => false,
                    Some(other) => return Err(Error::Config(format!("unknown tail `{other}`"))),
                };
                DeterministicIntegrand::tabulated_with_tail(times, values, zero_beyond)
                    .map_err(|e| Error::Config(e.to_string()))?
            }
            other => return Err(Error::Config(format!("unknown integrand family `{other}`"))),
        };
        if let Some((k, _)) = kv.first() {
            return Err(Error::Config(format!("unknown key `{k}` for integrand `{name}`")));
        }
        let out = match tol {
            Some(t) => out.with_quad_tol(num("tol", Some(t))?),
            None => out,
        };
        out.validate()?;
        Ok(out)
    }
}

impl From<DeterministicIntegrand> for String {
    fn from(f: DeterministicIntegrand) -> String {
        f.to_string()
    }
}

impl TryFrom<String> for DeterministicIntegrand {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl DeterministicIntegrand {
    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        match &self.family {
            Family::Indicator { horizon }
            | Family::Constant { horizon, .. }
            | Family::Power { horizon, .. }
            | Family::JeulinYor { horizon, .. }
                if !(*horizon > 0.0 && horizon.is_finite()) =>
            {
                bad(format!("horizon must be positive and finite in `{self}`"))
            }
            Family::Product(a, b) => {
                a.validate()?;
                b.validate()
            }
            _ if !(self.quad_tol > 0.0) => bad(format!("tolerance must be positive in `{self}`")),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_values() {
        let f = DeterministicIntegrand::indicator(1.0);
        assert_eq!(f.eval(0.0).unwrap(), 1.0);
        assert_eq!(f.eval(0.999).unwrap(), 1.0);
        assert_eq!(f.eval(1.0).unwrap(), 0.0);
        assert_eq!(f.eval(3.0).unwrap(), 0.0);
        assert!(f.is_square_integrable());
    }

    #[test]
    fn parse_round_trip() {
        for s in [
            "indicator:T=1",
            "jy:alpha=0.75,T=1",
            "const:c=2,T=1.5",
            "power:p=1,T=1",
            "tab:t=0/0.5/1,v=1/2/0",
            "tab:t=0/1,v=1/1,tail=open",
            "zero",
            "jy:alpha=0.75,T=1*power:p=-0.5,T=1",
        ] {
            let f: DeterministicIntegrand = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
    }

    #[test]
    fn parse_errors() {
        assert!("jy:T=1".parse::<DeterministicIntegrand>().is_err());
        assert!("jy:alpha=x,T=1".parse::<DeterministicIntegrand>().is_err());
        assert!("indicator:T=1,bogus=3".parse::<DeterministicIntegrand>().is_err());
        assert!("wavelet:T=1".parse::<DeterministicIntegrand>().is_err());
        assert!("indicator:T=0".parse::<DeterministicIntegrand>().is_err());
    }

    #[test]
    fn power_square_integral_closed_form() {
        let f = DeterministicIntegrand::power(1.0, 1.0);
        let t: f64 = 0.3;
        let v = f.square_integral(t, f64::INFINITY).unwrap();
        assert!((v - (1.0 - t).powi(3) / 3.0).abs() < 1e-15);
        assert!(!DeterministicIntegrand::power(-0.5, 1.0).is_square_integrable());
    }

    #[test]
    fn jeulin_yor_square_integrability_threshold() {
        assert!(DeterministicIntegrand::jeulin_yor(0.75, 1.0).is_square_integrable());
        assert!(!DeterministicIntegrand::jeulin_yor(0.4, 1.0).is_square_integrable());
        let v = DeterministicIntegrand::jeulin_yor(0.75, 1.0)
            .square_integral(0.0, f64::INFINITY)
            .unwrap();
        // int_{ln 2}^inf u^(-1.5) du = 2 (ln 2)^(-1/2)
        assert!((v - 2.0 / std::f64::consts::LN_2.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn tabulated_tail_policy() {
        let open = DeterministicIntegrand::tabulated_with_tail(vec![0.0, 1.0], vec![1.0, 1.0], false).unwrap();
        assert!(open.eval(2.0).is_err());
        assert!(open.square_integral(0.0, f64::INFINITY).is_err());
        let closed = DeterministicIntegrand::tabulated(vec![0.0, 1.0], vec![1.0, 0.0]).unwrap();
        assert_eq!(closed.eval(0.25).unwrap(), 0.75);
        assert!((closed.square_integral(0.0, f64::INFINITY).unwrap() - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn log_distance_evaluation_matches_direct() {
        let fams = [
            DeterministicIntegrand::indicator(1.0),
            DeterministicIntegrand::constant(-2.0, 1.0),
            DeterministicIntegrand::power(-0.25, 1.0),
            DeterministicIntegrand::jeulin_yor(0.75, 1.0),
            DeterministicIntegrand::tabulated(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap(),
        ];
        for f in &fams {
            for &d in &[0.3, 1e-3, 1e-9] {
                let direct = f.eval(1.0 - d).unwrap();
                let via = f.ln_abs_at_distance(1.0, d.ln()).unwrap().map_or(0.0, f64::exp);
                assert!((direct.abs() - via).abs() <= 1e-6 * direct.abs().max(1.0), "{f} at d={d}");
            }
        }
        // far below f64 resolution of 1 - d
        let jy = DeterministicIntegrand::jeulin_yor(1.25, 1.0);
        let ln = jy.ln_abs_at_distance(1.0, -1e6).unwrap().unwrap();
        assert!((ln - (0.5e6 - 1.25 * 1e6f64.ln())).abs() < 1e-6);
    }
}
