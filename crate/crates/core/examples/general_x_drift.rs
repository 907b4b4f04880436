//! Enlargement by a general Wiener integral `X = ∫ φ dW`.
//!
//! With `φ(s) = 1 - s` the information drift is `(X - m_t) φ(t) / σ_t²`
//! with `σ_t² = (1 - t)³ / 3`. The example compensates `W`, tests the
//! martingale part and follows the mean drift variation as the truncation
//! point approaches the horizon.
//!
//! `cargo run --release --example general_x_drift [paths]`

use enlargement::experiments::{run_drift, DriftConfig};
use enlargement::integrand::DeterministicIntegrand;

fn main() -> enlargement::Result<()> {
    let paths = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(20_000);
    for phi in [DeterministicIntegrand::indicator(1.0), DeterministicIntegrand::power(1.0, 1.0)] {
        let r = run_drift(&DriftConfig {
            phi: phi.clone(),
            paths,
            truncations: vec![0.1, 0.01, 0.001],
            ..DriftConfig::default()
        })?;
        let reg = r.regression.as_ref().expect("no refusal for W");
        println!("phi = {phi}: max |z| {:.2} of {:.2}", reg.max_abs_z, reg.correction.critical);
        println!("  E∫|dA| over [0, T]: {:.4}", r.drift_integral_limit);
        for g in &r.drift_integral {
            println!(
                "  up to T-{:<6}: {:.4} ± {:.4}  (oracle {:.4}, tail ≤ {:.4})",
                g.epsilon, g.mean, g.se, g.expected, g.tail_bound
            );
        }
        println!("  status: {:?}\n", r.status);
    }
    Ok(())
}
