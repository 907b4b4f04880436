//! Which Wiener integrals `∫ m dW` stay semimartingales after enlarging by
//! `W_1`: the Jeulin–Yor functional `∫ |m_s| (1 - s)^{-1/2} ds` for the
//! family `m_s = (1 - s)^{-α/2}` and a few others.
//!
//! `cargo run --release --example classifier_table`

use enlargement::classifier::{classify, LadderConfig};
use enlargement::integrand::DeterministicIntegrand;

fn main() -> enlargement::Result<()> {
    let cfg = LadderConfig::default();
    let mut cases: Vec<DeterministicIntegrand> = [0.4, 0.6, 0.75, 0.9, 0.99, 1.01, 1.1, 1.25, 1.5]
        .iter()
        .map(|&a| DeterministicIntegrand::jeulin_yor(a, 1.0))
        .collect();
    cases.push(DeterministicIntegrand::indicator(1.0));
    cases.push(DeterministicIntegrand::power(-0.25, 1.0));
    println!("{:<28} {:>14} {:>14}  verdict", "m", "∫ m² ds", "JY functional");
    for m in &cases {
        let v = classify(m, 1.0, &cfg)?;
        println!("{:<28} {:>14} {:>14}  {}", m.to_string(), v.l2_value.to_string(), v.jy_value.to_string(), v.verdict);
    }
    Ok(())
}
