//! Instance files, random instances and the combined demo report.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    check_absolute_continuity, discrete_girsanov, jacod_discrete_checks, martingale_from_terminal, parse_rational,
    rat, rat_str, AbsoluteContinuity, FiniteFiltration, FiniteOutcomeSpace, GirsanovResult, JacodReport, Partition,
    ProductSetup, Rational,
};
use crate::error::{Error, Result};

/// On-disk form: outcomes by label, rationals as strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub outcomes: Vec<String>,
    pub prob: Vec<String>,
    /// One partition per stage, blocks listed by outcome label.
    pub stages: Vec<Vec<Vec<String>>>,
    /// Value of the enlarging variable on each outcome.
    pub x: Vec<String>,
    /// Explicit F-martingale, one row per stage.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub martingale: Option<Vec<Vec<String>>>,
    /// Terminal value closing the martingale `E[terminal | F_k]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminal: Option<Vec<String>>,
    /// Reference measure `R`; defaults to `P`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<Vec<String>>,
}

/// A validated instance.
#[derive(Debug, Clone)]
pub struct FiniteInstance {
    pub config: InstanceConfig,
    pub space: FiniteOutcomeSpace,
    pub filtration: FiniteFiltration,
    pub x: Vec<String>,
    pub martingale: Vec<Vec<Rational>>,
    pub reference: Option<Vec<Rational>>,
}

fn parse_all(v: &[String]) -> Result<Vec<Rational>> {
    v.iter().map(|s| parse_rational(s)).collect()
}

impl FiniteInstance {
    pub fn from_config(config: InstanceConfig) -> Result<Self> {
        let space = FiniteOutcomeSpace::new(config.outcomes.clone(), parse_all(&config.prob)?)
            .map_err(|e| Error::Config(e.to_string()))?;
        let n = space.len();
        let stages = config
            .stages
            .iter()
            .map(|blocks| {
                let idx = blocks
                    .iter()
                    .map(|b| b.iter().map(|l| space.index_of(l)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                Partition::new(n, idx)
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Config(e.to_string()))?;
        let filtration = FiniteFiltration::new(stages).map_err(|e| Error::Config(e.to_string()))?;
        if config.x.len() != n {
            return Err(Error::Config(format!("x has {} entries for {n} outcomes", config.x.len())));
        }
        let martingale = match (&config.martingale, &config.terminal) {
            (Some(m), None) => {
                let m = m.iter().map(|row| parse_all(row)).collect::<Result<Vec<_>>>()?;
                if m.len() != filtration.n_stages() || m.iter().any(|row| row.len() != n) {
                    return Err(Error::Config("martingale must have one row per stage and one entry per outcome".into()));
                }
                m
            }
            (None, Some(t)) => {
                let t = parse_all(t)?;
                if t.len() != n {
                    return Err(Error::Config("terminal needs one entry per outcome".into()));
                }
                martingale_from_terminal(&t, &filtration, space.prob())
            }
            _ => return Err(Error::Config("give exactly one of `martingale` or `terminal`".into())),
        };
        let reference = config.reference.as_deref().map(parse_all).transpose()?;
        Ok(FiniteInstance {
            x: config.x.clone(),
            config,
            space,
            filtration,
            martingale,
            reference,
        })
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let config: InstanceConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_config(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Product setup for the initial enlargement by `X`.
    pub fn setup(&self) -> Result<ProductSetup> {
        let h = FiniteFiltration::constant(Partition::from_labels(&self.x), self.filtration.n_stages());
        ProductSetup::new(self.space.clone(), self.filtration.clone(), h, self.reference.clone())
    }

    /// Runs every exact check.
    pub fn run(&self) -> Result<FiniteDemoReport> {
        let setup = self.setup()?;
        let absolute_continuity = check_absolute_continuity(&setup);
        let girsanov = if absolute_continuity.holds {
            Some(discrete_girsanov(&setup, &self.martingale)?)
        } else {
            None
        };
        let jacod = jacod_discrete_checks(&self.space, &self.filtration, &self.x)?;
        let labels = self.space.labels();
        let enlarged_stages = setup
            .enlarged_filtration()?
            .stages()
            .iter()
            .map(|p| {
                p.blocks()
                    .iter()
                    .map(|b| b.iter().map(|&i| labels[i].clone()).collect())
                    .collect()
            })
            .collect();
        let passed = absolute_continuity.holds
            && girsanov.as_ref().is_some_and(|g| {
                g.likelihood_is_qbar_martingale && g.compensated_is_g_martingale && g.matches_doob_decomposition
            })
            && jacod.all_hold();
        Ok(FiniteDemoReport {
            outcomes: labels.to_vec(),
            enlarged_stages,
            absolute_continuity,
            girsanov,
            jacod,
            passed,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FiniteDemoReport {
    pub outcomes: Vec<String>,
    /// Blocks of `F_k ∨ σ(X)` by outcome label.
    pub enlarged_stages: Vec<Vec<Vec<String>>>,
    pub absolute_continuity: AbsoluteContinuity,
    pub girsanov: Option<GirsanovResult>,
    pub jacod: JacodReport,
    pub passed: bool,
}

/// Bounds for [`random_instance`].
#[derive(Debug, Clone, Copy)]
pub struct RandomInstanceSpec {
    pub max_outcomes: usize,
    pub max_stages: usize,
    pub max_values: usize,
    /// Allow outcomes of probability zero.
    pub allow_null: bool,
}

impl Default for RandomInstanceSpec {
    fn default() -> Self {
        RandomInstanceSpec {
            max_outcomes: 8,
            max_stages: 3,
            max_values: 3,
            allow_null: false,
        }
    }
}

/// Random refining filtration, rational probabilities, discrete `X` and a
/// martingale closed by a random rational terminal value; `R = P`.
pub fn random_instance<R: Rng + ?Sized>(spec: &RandomInstanceSpec, rng: &mut R) -> FiniteInstance {
    let n = rng.random_range(2..=spec.max_outcomes.max(2));
    let n_stages = rng.random_range(1..=spec.max_stages.max(1));
    let lo = if spec.allow_null { 0 } else { 1 };
    let mut weights: Vec<i64> = (0..n).map(|_| rng.random_range(lo..=9)).collect();
    if weights.iter().all(|&w| w == 0) {
        weights[0] = 1;
    }
    let total: i64 = weights.iter().sum();
    let outcomes: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();

    let mut ids: Vec<usize> = (0..n).map(|_| rng.random_range(0..2)).collect();
    let mut stages = Vec::with_capacity(n_stages);
    for k in 0..n_stages {
        if k > 0 {
            ids = ids.iter().map(|&b| 3 * b + rng.random_range(0..3)).collect();
        }
        stages.push(Partition::from_labels(&ids));
    }
    let values = rng.random_range(1..=spec.max_values.max(1));
    let x: Vec<String> = (0..n).map(|_| format!("x{}", rng.random_range(0..values))).collect();
    let terminal: Vec<Rational> = (0..n)
        .map(|_| rat(rng.random_range(-4..=4), rng.random_range(1..=3)))
        .collect();

    let names = |p: &Partition| -> Vec<Vec<String>> {
        p.blocks()
            .iter()
            .map(|b| b.iter().map(|&i| outcomes[i].clone()).collect())
            .collect()
    };
    let config = InstanceConfig {
        outcomes: outcomes.clone(),
        prob: weights.iter().map(|&w| rat_str(&rat(w, total))).collect(),
        stages: stages.iter().map(names).collect(),
        x,
        martingale: None,
        terminal: Some(terminal.iter().map(rat_str).collect()),
        reference: None,
    };
    FiniteInstance::from_config(config).expect("generated instance is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const WALK: &str = r#"
outcomes = ["++", "+-", "-+", "--"]
prob = ["1/4", "1/4", "1/4", "1/4"]
stages = [
  [["++", "+-", "-+", "--"]],
  [["++", "+-"], ["-+", "--"]],
  [["++"], ["+-"], ["-+"], ["--"]],
]
x = ["+", "0", "0", "-"]
martingale = [["0", "0", "0", "0"], ["1", "1", "-1", "-1"], ["2", "0", "0", "-2"]]
"#;

    #[test]
    fn parses_and_runs() {
        let inst = FiniteInstance::from_toml_str(WALK).unwrap();
        let rep = inst.run().unwrap();
        assert!(rep.passed);
        assert_eq!(rep.enlarged_stages[0].len(), 3);
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["girsanov"]["compensator"][1][0], "1/1");
    }

    #[test]
    fn terminal_and_martingale_agree() {
        let t = WALK.replace(
            r#"martingale = [["0", "0", "0", "0"], ["1", "1", "-1", "-1"], ["2", "0", "0", "-2"]]"#,
            r#"terminal = ["2", "0", "0", "-2"]"#,
        );
        let a = FiniteInstance::from_toml_str(WALK).unwrap();
        let b = FiniteInstance::from_toml_str(&t).unwrap();
        assert_eq!(a.martingale, b.martingale);
    }

    #[test]
    fn config_errors() {
        assert!(matches!(
            FiniteInstance::from_toml_str(&format!("{WALK}\nbogus = 1\n")),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            FiniteInstance::from_toml_str(&WALK.replace("\"1/4\", \"1/4\"]", "\"1/4\", \"1/3\"]")),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            FiniteInstance::from_toml_str(&WALK.replace("[[\"++\"], [\"+-\"]", "[[\"++\"], [\"??\"]")),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn random_instances_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let inst = random_instance(&RandomInstanceSpec::default(), &mut rng);
            let text = toml::to_string(&inst.config).unwrap();
            let back = FiniteInstance::from_toml_str(&text).unwrap();
            assert_eq!(back.martingale, inst.martingale);
            assert!(inst.run().unwrap().passed);
        }
    }
}
