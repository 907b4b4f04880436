//! Brownian motion enlarged by its terminal value.
//!
//! Subtracts the bridge drift `∫ (W_1 - W_s)/(1 - s) ds` from every path and
//! certifies the remainder as a martingale in the enlarged filtration, next
//! to a negative control on the raw path.
//!
//! `cargo run --release --example bridge_demo [paths]`

use enlargement::experiments::{run_bridge, BridgeConfig};

fn main() -> enlargement::Result<()> {
    let paths = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(50_000);
    let r = run_bridge(&BridgeConfig {
        paths,
        ..BridgeConfig::default()
    })?;
    println!(
        "{} paths, {} nodes, exclusion {:.2e}, truncation bound {:.2e}",
        paths, r.grid_nodes, r.epsilon_exclusion, r.truncation_bound
    );
    println!("\ncompensated path  (critical |z| = {:.3})", r.compensated.correction.critical);
    for t in &r.compensated.tests {
        println!("  ({:.2}, {:.2})  {:<8} z = {:+.3}", t.s, t.t, t.basis, t.z);
    }
    if let Some(nc) = &r.negative_control {
        for t in &nc.report.tests {
            println!(
                "raw path, ({:.2}, {:.2}) {}: estimate {:.4} ± {:.4}, z = {:.1}",
                t.s, t.t, t.basis, t.estimate, t.se, t.z
            );
        }
    }
    let s = &r.symmetry;
    println!(
        "\nslope of W_{}-W_{} on W_1-W_{}: {:.4} ± {:.4} (exact {:.4})",
        s.t, s.s, s.s, s.slope, s.slope_se, s.expected
    );
    let q = &r.quadratic_variation;
    println!("[W~]_{} = {:.4} (expected {})", q.t, q.mean, q.expected);
    println!(
        "corr(W~_{t}, W_1) = {:+.4}; corr(W_{t}, W_1) = {:.4} (exact {:.4})",
        r.pinning.corr_compensated,
        r.pinning.corr_raw,
        r.pinning.expected_raw,
        t = r.pinning.t
    );
    println!("max additivity defect {:.1e}", r.max_additivity_defect);
    println!("status: {:?}", r.status);
    Ok(())
}
