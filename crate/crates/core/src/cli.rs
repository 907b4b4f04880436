//! Command-line front end of the `enlarge` binary.
//!
//! Each subcommand loads its config from an optional TOML file, applies
//! flag overrides, runs the experiment and writes `<command>.json` plus one
//! CSV per table into `--out` (or prints the JSON when no directory is
//! given). The process exit code follows [`Status::exit_code`]; config
//! errors exit with [`EXIT_CONFIG_ERROR`].

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::{
    run_bridge, run_classify, run_drift, run_finite, run_levy, run_lookahead, run_mg_test, run_probe, BridgeConfig,
    ClassifyConfig, DriftConfig, FiniteConfig, GridConfig, LevyConfig, LookaheadConfig, MgTestConfig, ProbeRunConfig,
    ProcessKind, Report, EXIT_CONFIG_ERROR,
};
use crate::integrand::DeterministicIntegrand;
use crate::paths::JumpLaw;

#[derive(Debug, Parser)]
#[command(name = "enlarge", version, about = "Initial enlargement of filtrations: simulation and exact checks")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// TOML config for the subcommand; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for JSON and CSV reports.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Omit the `generated_at` field so reports are byte-reproducible.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compensate Brownian motion enlarged by its terminal value.
    BridgeDemo(BridgeArgs),
    /// Decompose W or a Wiener integral under enlargement by a Gaussian X.
    DriftSim(DriftArgs),
    /// Classify an integrand with the Jeulin–Yor criterion.
    Classify(ClassifyArgs),
    /// Martingale battery on a raw or compensated path.
    MgTest(MgTestArgs),
    /// Compound Poisson process enlarged by its terminal value.
    LevyDemo(LevyArgs),
    /// Exact checks on a finite filtered space.
    FiniteDemo(FiniteArgs),
    /// Look-ahead integrands that defeat the integrator property.
    LookaheadDemo(LookaheadArgs),
    /// Pathwise two-sided probe of an additive functional.
    JeulinProbe(ProbeArgs),
}

#[derive(Debug, Args)]
pub struct BridgeArgs {
    #[arg(long)]
    pub paths: Option<usize>,
    /// Uniform base steps before refinement toward the horizon.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Number of decomposed paths written to `bridge-demo_paths.csv`.
    #[arg(long)]
    pub export_paths: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DriftArgs {
    /// Integrand of `X = ∫ φ dW`, e.g. `power:p=1,T=1`.
    #[arg(long)]
    pub phi: Option<DeterministicIntegrand>,
    /// Integrand `m` of `M = ∫ m dW` (default: `M = W`).
    #[arg(long)]
    pub integrand: Option<DeterministicIntegrand>,
    /// Deterministic `H` integrated against the decomposition.
    #[arg(long)]
    pub h: Option<DeterministicIntegrand>,
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated distances before the horizon for the drift integral.
    #[arg(long, value_delimiter = ',')]
    pub truncations: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Jy,
    Indicator,
    Const,
    Power,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long, value_enum, conflicts_with = "integrand")]
    pub family: Option<FamilyArg>,
    /// Exponent for `jy` and `power`, value for `const`.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Horizon of the enlargement.
    #[arg(long = "T", alias = "horizon")]
    pub horizon: Option<f64>,
    /// Full integrand spec, e.g. `jy:alpha=0.75,T=1`.
    #[arg(long)]
    pub integrand: Option<DeterministicIntegrand>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_rungs: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ProcessArg {
    Raw,
    Compensated,
}

#[derive(Debug, Args)]
pub struct MgTestArgs {
    #[arg(long, value_enum)]
    pub process: Option<ProcessArg>,
    #[arg(long)]
    pub phi: Option<DeterministicIntegrand>,
    /// Deterministic drift `μ` added as `μ t`.
    #[arg(long, allow_hyphen_values = true)]
    pub drift: Option<f64>,
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct LevyArgs {
    #[arg(long)]
    pub rate: Option<f64>,
    /// Jump law, e.g. `sym:a=1` or `normal:mean=0,sd=1`.
    #[arg(long)]
    pub jumps: Option<JumpLaw>,
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct FiniteArgs {
    /// Instance file (TOML).
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Number of random instances to verify.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct LookaheadArgs {
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Comma-separated dyadic levels.
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<u32>>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long)]
    pub integrand: Option<DeterministicIntegrand>,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub depth: Option<usize>,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn load<C: DeserializeOwned + Default>(path: Option<&Path>) -> Result<C> {
    match path {
        None => Ok(C::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))
        }
    }
}

fn set_steps(grid: &mut GridConfig, steps: Option<usize>) {
    set(&mut grid.steps, steps);
}

fn classify_integrand(a: &ClassifyArgs) -> Result<Option<DeterministicIntegrand>> {
    let t = a.horizon.unwrap_or(1.0);
    Ok(match a.family {
        None => a.integrand.clone(),
        Some(f) => {
            let need = |name: &str| a.alpha.ok_or_else(|| Error::Config(format!("--family {name} needs --alpha")));
            Some(match f {
                FamilyArg::Jy => DeterministicIntegrand::jeulin_yor(need("jy")?, t),
                FamilyArg::Power => DeterministicIntegrand::power(need("power")?, t),
                FamilyArg::Const => DeterministicIntegrand::constant(a.alpha.unwrap_or(1.0), t),
                FamilyArg::Indicator => DeterministicIntegrand::indicator(t),
            })
        }
    })
}

/// JSON envelope written for every command.
#[derive(Serialize)]
struct Envelope<'a, R> {
    command: &'a str,
    version: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at: Option<u64>,
    status: crate::experiments::Status,
    exit_code: i32,
    report: &'a R,
}

fn emit<R: Report>(command: &str, report: &R, common: &Common) -> Result<i32> {
    let status = report.status();
    let generated_at = (!common.no_timestamp).then(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    let env = Envelope {
        command,
        version: env!("CARGO_PKG_VERSION"),
        generated_at,
        status,
        exit_code: status.exit_code(),
        report,
    };
    let json = serde_json::to_string_pretty(&env).map_err(|e| Error::Shape(e.to_string()))?;
    match &common.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(format!("{command}.json")), json + "\n")?;
            for (name, csv) in report.tables()? {
                std::fs::write(dir.join(format!("{command}_{name}.csv")), csv)?;
            }
        }
        None => println!("{json}"),
    }
    eprintln!("{command}: {status:?} (exit {})", status.exit_code());
    Ok(status.exit_code())
}

fn dispatch(cli: Cli) -> Result<i32> {
    let common = cli.common.clone();
    let cfg_path = common.config.as_deref();
    match cli.command {
        Command::BridgeDemo(a) => {
            let mut c: BridgeConfig = load(cfg_path)?;
            set(&mut c.paths, a.paths);
            set_steps(&mut c.grid, a.steps);
            set(&mut c.seed, a.seed);
            set(&mut c.epsilon, a.epsilon.map(Some));
            set(&mut c.export_paths, a.export_paths);
            emit("bridge-demo", &run_bridge(&c)?, &common)
        }
        Command::DriftSim(a) => {
            let mut c: DriftConfig = load(cfg_path)?;
            set(&mut c.phi, a.phi);
            set(&mut c.integrand, a.integrand.map(Some));
            set(&mut c.h, a.h.map(Some));
            set(&mut c.paths, a.paths);
            set_steps(&mut c.grid, a.steps);
            set(&mut c.seed, a.seed);
            set(&mut c.truncations, a.truncations);
            emit("drift-sim", &run_drift(&c)?, &common)
        }
        Command::Classify(a) => {
            let mut c: ClassifyConfig = load(cfg_path)?;
            set(&mut c.integrand, classify_integrand(&a)?);
            set(&mut c.horizon, a.horizon.map(Some));
            set(&mut c.ladder.tol, a.tol);
            set(&mut c.ladder.max_rungs, a.max_rungs);
            emit("classify", &run_classify(&c)?, &common)
        }
        Command::MgTest(a) => {
            let mut c: MgTestConfig = load(cfg_path)?;
            set(
                &mut c.process,
                a.process.map(|p| match p {
                    ProcessArg::Raw => ProcessKind::Raw,
                    ProcessArg::Compensated => ProcessKind::Compensated,
                }),
            );
            set(&mut c.phi, a.phi);
            set(&mut c.drift, a.drift);
            set(&mut c.paths, a.paths);
            set_steps(&mut c.grid, a.steps);
            set(&mut c.seed, a.seed);
            emit("mg-test", &run_mg_test(&c)?, &common)
        }
        Command::LevyDemo(a) => {
            let mut c: LevyConfig = load(cfg_path)?;
            set(&mut c.rate, a.rate);
            set(&mut c.jumps, a.jumps);
            set(&mut c.paths, a.paths);
            set(&mut c.steps, a.steps);
            set(&mut c.seed, a.seed);
            emit("levy-demo", &run_levy(&c)?, &common)
        }
        Command::FiniteDemo(a) => {
            let mut c: FiniteConfig = load(cfg_path)?;
            set(&mut c.instance, a.instance.map(Some));
            set(&mut c.random, a.random);
            set(&mut c.seed, a.seed);
            emit("finite-demo", &run_finite(&c)?, &common)
        }
        Command::LookaheadDemo(a) => {
            let mut c: LookaheadConfig = load(cfg_path)?;
            set(&mut c.epsilon, a.epsilon);
            set(&mut c.levels, a.levels);
            set(&mut c.delta, a.delta);
            set(&mut c.paths, a.paths);
            set(&mut c.seed, a.seed);
            emit("lookahead-demo", &run_lookahead(&c)?, &common)
        }
        Command::JeulinProbe(a) => {
            let mut c: ProbeRunConfig = load(cfg_path)?;
            set(&mut c.integrand, a.integrand);
            set(&mut c.horizon, a.horizon);
            set(&mut c.paths, a.paths);
            set(&mut c.seed, a.seed);
            set(&mut c.probe.depth, a.depth);
            emit("jeulin-probe", &run_probe(&c)?, &common)
        }
    }
}

fn init_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Error::Config(format!("--threads: {e}")))?;
    }
    Ok(())
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG_ERROR } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = init_threads(cli.common.threads) {
        eprintln!("error: {e}");
        return EXIT_CONFIG_ERROR;
    }
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Io(_) => EXIT_CONFIG_ERROR,
                _ => 1,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_invocations() {
        let cli = Cli::try_parse_from(["enlarge", "classify", "--family", "jy", "--alpha", "0.75", "--T", "1"]).unwrap();
        let Command::Classify(a) = cli.command else { panic!() };
        let m = classify_integrand(&a).unwrap().unwrap();
        assert_eq!(m, DeterministicIntegrand::jeulin_yor(0.75, 1.0));

        let cli = Cli::try_parse_from(["enlarge", "bridge-demo", "--paths", "200000", "--steps", "1024", "--seed", "42"])
            .unwrap();
        assert!(matches!(cli.command, Command::BridgeDemo(BridgeArgs { paths: Some(200000), .. })));

        let cli = Cli::try_parse_from(["enlarge", "drift-sim", "--phi", "power:p=1,T=1", "--truncations", "0.1,0.01"])
            .unwrap();
        let Command::DriftSim(a) = cli.command else { panic!() };
        assert_eq!(a.truncations.unwrap(), vec![0.1, 0.01]);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["enlarge", "classify", "--family", "jy", "--alpha", "0.75", "--T", "1", "--no-timestamp"]), 3);
        assert_eq!(run(["enlarge", "classify", "--family", "jy", "--alpha", "1.5", "--no-timestamp"]), 0);
        assert_eq!(run(["enlarge", "classify", "--family", "jy"]), EXIT_CONFIG_ERROR);
        assert_eq!(run(["enlarge", "classify", "--bogus"]), EXIT_CONFIG_ERROR);
        assert_eq!(run(["enlarge", "finite-demo"]), EXIT_CONFIG_ERROR);
    }

    #[test]
    fn config_file_and_reports() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.toml");
        std::fs::write(&cfg, "integrand = \"jy:alpha=1.25,T=1\"\n[ladder]\ntol = 1e-8\n").unwrap();
        let out = dir.path().join("out");
        let args = |o: &Path| {
            vec![
                "enlarge".to_string(),
                "classify".into(),
                "--config".into(),
                cfg.display().to_string(),
                "--out".into(),
                o.display().to_string(),
                "--no-timestamp".into(),
            ]
        };
        assert_eq!(run(args(&out)), 0);
        let a = std::fs::read(out.join("classify.json")).unwrap();
        assert!(out.join("classify_verdict.csv").exists());
        let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
        assert_eq!(v["report"]["config"]["ladder"]["tol"], 1e-8);
        assert!(v.get("generated_at").is_none());
        let out2 = dir.path().join("out2");
        assert_eq!(run(args(&out2)), 0);
        assert_eq!(a, std::fs::read(out2.join("classify.json")).unwrap());

        std::fs::write(&cfg, "integrand = \"jy:alpha=1.25,T=1\"\nunknown = 3\n").unwrap();
        assert_eq!(run(args(&out)), EXIT_CONFIG_ERROR);
    }
}
