//! Exact enlargement on a finite space: the two-step walk enlarged by the
//! sign of its endpoint, then a batch of random instances.
//!
//! `cargo run --release --example finite_lab`

use enlargement::experiments::{run_finite, FiniteConfig};
use enlargement::finite::{rat_str, FiniteInstance};

fn main() -> enlargement::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/four_outcome.cfg");
    let inst = FiniteInstance::from_path(path.as_ref())?;
    let rep = inst.run()?;
    println!("outcomes {:?}", rep.outcomes);
    for (k, blocks) in rep.enlarged_stages.iter().enumerate() {
        println!("G_{k} = {blocks:?}");
    }
    let g = rep.girsanov.as_ref().expect("absolutely continuous");
    let show = |rows: &[Vec<_>]| {
        for (k, row) in rows.iter().enumerate() {
            println!("  stage {k}: {}", row.iter().map(rat_str).collect::<Vec<_>>().join("  "));
        }
    };
    println!("likelihood on the diagonal:");
    show(&g.likelihood_diagonal);
    println!("compensator:");
    show(&g.compensator);
    println!(
        "Z a Q-martingale: {}; M - C a G-martingale: {}; C = Doob drift: {}",
        g.likelihood_is_qbar_martingale, g.compensated_is_g_martingale, g.matches_doob_decomposition
    );
    for st in &rep.jacod.stages {
        for row in &st.rows {
            let d: Vec<String> = row.density.iter().map(|r| r.as_ref().map_or("-".into(), rat_str)).collect();
            println!("stage {} block {:?}: densities {:?}", st.stage, row.block, d);
        }
    }

    let batch = run_finite(&FiniteConfig {
        random: 200,
        ..FiniteConfig::default()
    })?;
    println!("\nrandom instances: {:?}", batch.random);
    Ok(())
}
