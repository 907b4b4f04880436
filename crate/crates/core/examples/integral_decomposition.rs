//! Integrating a deterministic `H` against the enlarged decomposition:
//! `H•W = H•W~ + H•A`, checked for exact additivity on every path and for
//! the martingale property of `H•W~`.
//!
//! `cargo run --release --example integral_decomposition [paths]`

use enlargement::experiments::{run_drift, DriftConfig};
use enlargement::integrand::DeterministicIntegrand;

fn main() -> enlargement::Result<()> {
    let paths = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(20_000);
    // H(s) = s as a linear interpolant, open beyond the last node
    let h: DeterministicIntegrand = "tab:t=0/1,v=0/1,tail=open".parse()?;
    let r = run_drift(&DriftConfig {
        h: Some(h),
        paths,
        ..DriftConfig::default()
    })?;
    let reg = r.regression.as_ref().expect("H is bounded");
    println!("max additivity defect: {:.2e}", r.max_additivity_defect.unwrap_or(f64::NAN));
    for t in &reg.tests {
        println!("({:.2}, {:.2}) {:<8} z = {:+.3}", t.s, t.t, t.basis, t.z);
    }
    println!("status: {:?}", r.status);

    // m = (1-s)^{-3/8} violates the criterion: the driver refuses
    let refused = run_drift(&DriftConfig {
        integrand: Some(DeterministicIntegrand::jeulin_yor(0.75, 1.0)),
        paths,
        ..DriftConfig::default()
    })?;
    println!("\n{:?}: {}", refused.status, refused.refusal.unwrap_or_default());
    Ok(())
}
