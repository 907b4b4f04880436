//! A compound Poisson process enlarged by its terminal value:
//! `Z_t - ∫_0^t (Z_1 - Z_s)/(1 - s) ds` is a martingale in the enlarged
//! filtration.
//!
//! `cargo run --release --example levy_bridge [paths]`

use enlargement::experiments::{run_levy, LevyConfig};
use enlargement::paths::JumpLaw;

fn main() -> enlargement::Result<()> {
    let paths = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(50_000);
    for jumps in [JumpLaw::Symmetric(1.0), JumpLaw::Constant(1.0), "normal:mean=0.5,sd=1".parse()?] {
        let r = run_levy(&LevyConfig {
            jumps,
            paths,
            ..LevyConfig::default()
        })?;
        println!("jumps {jumps}: max |z| {:.2}, status {:?}", r.regression.max_abs_z, r.status);
        for m in &r.mean_checks {
            println!("  E[Z_1 - Z_{}] = {:+.4} ± {:.4} (exact {:+.4})", m.s, m.estimate, m.se, m.expected);
        }
    }
    Ok(())
}
