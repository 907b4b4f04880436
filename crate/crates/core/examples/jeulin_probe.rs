//! Pathwise behavior of `∫ f(s) (W_1 - W_s)² / (1 - s) ds`-type additive
//! functionals near the horizon: Cauchy ladders when `∫ f` is finite,
//! ceiling exceedance on almost every path when it diverges.
//!
//! `cargo run --release --example jeulin_probe [paths]`

use enlargement::experiments::{run_probe, ProbeRunConfig};
use enlargement::integrand::DeterministicIntegrand;

fn main() -> enlargement::Result<()> {
    let paths = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(10_000);
    let divergent = ProbeRunConfig::default().integrand;
    for integrand in [DeterministicIntegrand::jeulin_yor(0.75, 1.0), divergent] {
        let r = run_probe(&ProbeRunConfig {
            integrand,
            paths,
            ..ProbeRunConfig::default()
        })?;
        let p = &r.report;
        println!(
            "{}: ∫A = {}, Cauchy on {:.1}% of paths, above ceiling on {:.1}%",
            p.integrand,
            p.integral_of_a,
            100.0 * p.fraction_cauchy,
            100.0 * p.fraction_above_ceiling
        );
        for rung in p.rungs.iter().step_by(6) {
            println!(
                "  k={:>2} ln ε={:>8.2} mean {:>12.4} (exact {:>12.4})",
                rung.k, rung.ln_epsilon, rung.mean, rung.expected_mean
            );
        }
    }
    Ok(())
}
