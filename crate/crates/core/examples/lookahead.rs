//! Integrands that peek at the next dyadic increment: `(H^n•W)_1` has mean
//! one at every level while `sup |H^n|` vanishes, so `W` is no integrator in
//! the look-ahead filtration.
//!
//! `cargo run --release --example lookahead [paths]`

use enlargement::experiments::{run_lookahead, LookaheadConfig};

fn main() -> enlargement::Result<()> {
    let paths = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(20_000);
    let r = run_lookahead(&LookaheadConfig {
        paths,
        ..LookaheadConfig::default()
    })?;
    println!("level  E(H•W)_1          E(H•W)_1²  P(sup|H| > δ)  Gaussian bound");
    for l in &r.report.levels {
        println!(
            "{:>5}  {:.4} ± {:.4}  {:>9.4}  {:>13.5}  {:.3e}",
            l.level, l.mean_integral, l.se, l.second_moment, l.p_sup_exceeds, l.tail_bound
        );
    }
    println!("status: {:?}", r.status);
    Ok(())
}
