//! Strong order of the discretized conditional-density identity: the RMS
//! residual shrinks by `1/√2` each time the step halves.
//!
//! `cargo run --release --example density_convergence [paths]`

use enlargement::experiments::{run_self_convergence, SelfConvergenceConfig};

fn main() -> enlargement::Result<()> {
    let paths = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(5_000);
    let r = run_self_convergence(&SelfConvergenceConfig {
        paths,
        ..SelfConvergenceConfig::default()
    })?;
    for (i, l) in r.levels.iter().enumerate() {
        let ratio = if i == 0 { String::new() } else { format!("  ratio {:.3}", r.ratios[i - 1]) };
        println!("{:>5} steps: RMS residual {:.3e}{ratio}", l.steps, l.rms_residual);
    }
    println!("expected ratio {:.3}; status {:?}", r.expected_ratio, r.status);
    Ok(())
}
