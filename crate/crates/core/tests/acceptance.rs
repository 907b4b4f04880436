//! Acceptance suite: every criterion runs at its stated size and tolerance
//! and prints one PASS/FAIL line. Exits non-zero if any criterion fails.
//!
//! `cargo test --release --test acceptance`

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};
use std::time::Instant;

use enlargement::classifier::{classify, FunctionalValue, LadderConfig, Verdict};
use enlargement::experiments::{
    run_bridge, run_drift, run_finite, run_levy, run_lookahead, run_probe, run_self_convergence, BridgeConfig,
    DriftConfig, FiniteConfig, GridConfig, LevyConfig, LookaheadConfig, ProbeRunConfig, SelfConvergenceConfig, Status,
};
use enlargement::gaussian::residual_variance;
use enlargement::integrand::DeterministicIntegrand;
use enlargement::martingale::{Basis, TestBattery};
use enlargement::paths::JumpLaw;
use enlargement::quadrature::integrate;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: String) -> Outcome {
    if cond {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn err(e: enlargement::Error) -> String {
    format!("error: {e}")
}

/// Bonferroni-corrected two-sided normal critical value, computed from the
/// normal tail independently of the library.
fn bonferroni(threshold: f64, n_tests: usize) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    let n = Normal::standard();
    let alpha = 2.0 * (1.0 - n.cdf(threshold));
    n.inverse_cdf(1.0 - alpha / (2.0 * n_tests as f64))
}

fn bridge_cfg() -> BridgeConfig {
    BridgeConfig {
        paths: 200_000,
        seed: 42,
        horizon: 1.0,
        grid: GridConfig::refined(1024, 0.5),
        battery: TestBattery::new(&[(0.25, 0.5), (0.5, 0.75), (0.25, 0.9)], &Basis::DEFAULT),
        symmetry: (0.25, 0.5),
        ..BridgeConfig::default()
    }
}

/// Criteria 1 and 2 share one 2·10^5-path run.
fn bridge() -> (Outcome, Outcome) {
    let start = Instant::now();
    let r = match run_bridge(&bridge_cfg()) {
        Ok(r) => r,
        Err(e) => return (Err(err(e.clone())), Err(err(e))),
    };
    let secs = start.elapsed().as_secs_f64();
    let crit = bonferroni(4.0, 15);
    let max_z = r.compensated.tests.iter().map(|t| t.z.abs()).fold(0.0, f64::max);
    let nc = r.negative_control.as_ref().and_then(|n| n.report.tests.first());
    let c1 = match nc {
        None => Err("negative control missing".into()),
        Some(nc) => check(
            r.compensated.tests.len() == 15
                && max_z <= crit
                && nc.basis == "X-W_s"
                && nc.z.abs() > 10.0
                && (nc.estimate - 0.25).abs() <= 4.0 * nc.se
                && secs < 300.0,
            format!(
                "compensated max|z| {max_z:.2} <= {crit:.2} over 15 tests; raw X-W_s at (0.25,0.5): {:.4} ± {:.4}, |z| {:.1} > 10; {secs:.0}s",
                nc.estimate, nc.se, nc.z.abs()
            ),
        ),
    };
    let s = &r.symmetry;
    let exact = (0.5 - 0.25) / (1.0 - 0.25);
    let c2 = check(
        (s.slope - exact).abs() <= 4.0 * s.slope_se,
        format!("slope {:.5} ± {:.5} vs 1/3", s.slope, s.slope_se),
    );
    (c1, c2)
}

fn drift_integral() -> Outcome {
    // ∫_0^1 (1 - s)^{-1/2} ds = 2
    let q = integrate(|s| (1.0 - s).powf(-0.5), 0.0, 1.0, 1e-12, 1e-12);
    let limit = 2.0 * (2.0 / PI).sqrt();
    let truncations = [0.1, 0.01, 0.001, 1e-4];
    let r = run_drift(&DriftConfig {
        phi: DeterministicIntegrand::indicator(1.0),
        paths: 50_000,
        seed: 3,
        grid: GridConfig::log_distance(0.004, 1e-7),
        truncations: truncations.to_vec(),
        ..DriftConfig::default()
    })
    .map_err(err)?;
    let mut ok = (q.value - 2.0).abs() <= 1e-6 && r.drift_integral.len() == truncations.len();
    let mut detail = vec![format!("quadrature {:.9}", q.value)];
    let mut last_gap = f64::INFINITY;
    for (rung, &eps) in r.drift_integral.iter().zip(&truncations) {
        // E|W_1 - W_s| / (1 - s) = √(2/π) (1 - s)^{-1/2}, so the tail beyond
        // 1 - ε carries 2 √(2/π) √ε
        let tail = limit * eps.sqrt();
        let gap = limit - rung.mean;
        ok &= gap.abs() <= 4.0 * rung.se + tail && gap < last_gap;
        last_gap = gap;
        detail.push(format!("ε={eps:e}: {:.4}±{:.4} (tail {:.4})", rung.mean, rung.se, tail));
    }
    detail.push(format!("limit {limit:.4}"));
    check(ok, detail.join("; "))
}

fn classifier_table() -> Outcome {
    let cfg = LadderConfig::default();
    let mut ok = true;
    let mut detail = Vec::new();
    for alpha in [0.4, 0.6, 0.75, 0.9, 1.1, 1.25, 1.5] {
        let v = classify(&DeterministicIntegrand::jeulin_yor(alpha, 1.0), 1.0, &cfg).map_err(err)?;
        // u = -ln(1 - s): ∫ m² = ∫_{ln 2}^∞ u^{-2α} du, JY = ∫_{ln 2}^∞ u^{-α} du
        let expected = if alpha <= 0.5 {
            Verdict::NotDefined
        } else if alpha <= 1.0 {
            Verdict::NotSemimartingale
        } else {
            Verdict::Semimartingale
        };
        ok &= v.verdict == expected;
        if alpha > 1.0 {
            let jy = LN_2.powf(1.0 - alpha) / (alpha - 1.0);
            ok &= matches!(v.jy_value, FunctionalValue::Finite(x) if (x - jy).abs() <= 1e-6 * jy);
        }
        if alpha > 0.5 {
            let l2 = LN_2.powf(1.0 - 2.0 * alpha) / (2.0 * alpha - 1.0);
            ok &= matches!(v.l2_value, FunctionalValue::Finite(x) if (x - l2).abs() <= 1e-6 * l2);
        }
        detail.push(format!("α={alpha}:{}", v.verdict));
    }
    let one = classify(&DeterministicIntegrand::indicator(1.0), 1.0, &cfg).map_err(err)?;
    ok &= one.verdict == Verdict::Semimartingale
        && matches!(one.jy_value, FunctionalValue::Finite(x) if (x - 2.0).abs() <= 1e-6);
    detail.push(format!("m≡1: {} {}", one.jy_value, one.verdict));
    check(ok, detail.join(" "))
}

fn general_x() -> Outcome {
    let phi = DeterministicIntegrand::power(1.0, 1.0);
    // residual variance ∫_t^1 (1 - s)² ds = (1 - t)³ / 3
    let var_ok = [0.0, 0.3, 0.9, 0.999]
        .iter()
        .all(|&t| (residual_variance(&phi, t).unwrap() - (1.0 - t).powi(3) / 3.0).abs() <= 1e-12);
    let r = run_drift(&DriftConfig {
        phi,
        paths: 100_000,
        seed: 5,
        battery: TestBattery::new(&[(0.25, 0.5), (0.5, 0.75), (0.25, 0.9)], &Basis::DEFAULT),
        ..DriftConfig::default()
    })
    .map_err(err)?;
    let reg = r.regression.as_ref().ok_or("no regression")?;
    let crit = bonferroni(4.0, reg.tests.len());
    let max_z = reg.tests.iter().map(|t| t.z.abs()).fold(0.0, f64::max);
    check(
        var_ok && max_z <= crit && r.status == Status::Pass,
        format!("σ² closed form {var_ok}; max|z| {max_z:.2} <= {crit:.2} over {} tests", reg.tests.len()),
    )
}

fn stochastic_integral() -> Outcome {
    let h: DeterministicIntegrand = "tab:t=0/1,v=0/1,tail=open".parse().map_err(err)?;
    if (h.eval(0.3).map_err(err)? - 0.3).abs() > 1e-15 {
        return Err("H(s) = s misrepresented".into());
    }
    let r = run_drift(&DriftConfig {
        h: Some(h),
        paths: 100_000,
        seed: 6,
        ..DriftConfig::default()
    })
    .map_err(err)?;
    let reg = r.regression.as_ref().ok_or("no regression")?;
    let defect = r.max_additivity_defect.unwrap_or(f64::INFINITY);
    let crit = bonferroni(4.0, reg.tests.len());
    let max_z = reg.tests.iter().map(|t| t.z.abs()).fold(0.0, f64::max);
    check(
        defect <= 1e-10 && max_z <= crit,
        format!("additivity defect {defect:.1e}; max|z| {max_z:.2} <= {crit:.2}"),
    )
}

fn levy() -> Outcome {
    let r = run_levy(&LevyConfig {
        rate: 1.0,
        jumps: JumpLaw::Symmetric(1.0),
        paths: 100_000,
        battery: TestBattery::new(&[(0.25, 0.5), (0.5, 0.75), (0.25, 0.9)], &[Basis::One, Basis::State, Basis::Info])
            .named("Z", "Z_1"),
        ..LevyConfig::default()
    })
    .map_err(err)?;
    let crit = bonferroni(4.0, r.regression.tests.len());
    let max_z = r.regression.tests.iter().map(|t| t.z.abs()).fold(0.0, f64::max);
    // symmetric jumps: E[Z_1 - Z_s] = 0
    let means_ok = r.mean_checks.iter().all(|m| m.estimate.abs() <= 4.0 * m.se);
    check(
        max_z <= crit && means_ok && r.max_additivity_defect <= 1e-10,
        format!("max|z| {max_z:.2} <= {crit:.2} over {} tests; means {means_ok}", r.regression.tests.len()),
    )
}

fn lookahead() -> Outcome {
    let r = run_lookahead(&LookaheadConfig {
        epsilon: 1.0 / 64.0,
        levels: vec![8, 10, 12],
        delta: 0.25,
        ..LookaheadConfig::default()
    })
    .map_err(err)?;
    let lv = &r.report.levels;
    let means_ok = lv.len() == 3 && lv.iter().all(|l| (l.mean_integral - 1.0).abs() <= 4.0 * l.se);
    let decay_ok = lv.windows(2).all(|w| w[1].p_sup_exceeds <= w[0].p_sup_exceeds / 10.0) && lv[0].p_sup_exceeds > 0.0;
    let d: Vec<String> = lv
        .iter()
        .map(|l| format!("n={}: {:.4}±{:.4}, P={:.5}", l.level, l.mean_integral, l.se, l.p_sup_exceeds))
        .collect();
    check(means_ok && decay_ok, d.join("; "))
}

fn finite_lab() -> Outcome {
    let start = Instant::now();
    let r = run_finite(&FiniteConfig {
        random: 200,
        seed: 2024,
        max_outcomes: 8,
        max_stages: 3,
        ..FiniteConfig::default()
    })
    .map_err(err)?;
    let secs = start.elapsed().as_secs_f64();
    let b = r.random.ok_or("no batch")?;
    check(
        b.instances == 200
            && b.absolutely_continuous == 200
            && b.likelihood_qbar_martingale == 200
            && b.compensated_g_martingale == 200
            && secs < 10.0,
        format!(
            "{} instances: AC {}, Z qbar-martingale {}, M-C G-martingale {}; {secs:.2}s",
            b.instances, b.absolutely_continuous, b.likelihood_qbar_martingale, b.compensated_g_martingale
        ),
    )
}

fn self_convergence() -> Outcome {
    let r = run_self_convergence(&SelfConvergenceConfig {
        phi: DeterministicIntegrand::indicator(1.0),
        t: 0.5,
        fine_steps: 1024,
        levels: 4,
        paths: 10_000,
        ..SelfConvergenceConfig::default()
    })
    .map_err(err)?;
    let ok = r.ratios.len() == 3 && r.ratios.iter().all(|q| (q / FRAC_1_SQRT_2 - 1.0).abs() <= 0.25);
    let d: Vec<String> = r.ratios.iter().map(|q| format!("{q:.3}")).collect();
    check(ok, format!("RMS ratios [{}] vs 0.707 ± 25%", d.join(", ")))
}

fn jeulin_probe() -> Outcome {
    let finite = run_probe(&ProbeRunConfig {
        integrand: DeterministicIntegrand::jeulin_yor(0.75, 1.0),
        ..ProbeRunConfig::default()
    })
    .map_err(err)?;
    let divergent = run_probe(&ProbeRunConfig::default()).map_err(err)?;
    let (f, d) = (&finite.report, &divergent.report);
    check(
        f.fraction_cauchy >= 0.99 && d.fraction_above_ceiling >= 0.99 && d.fraction_cauchy < 0.01,
        format!(
            "finite ∫A: Cauchy on {:.2}%; divergent ∫A: above ceiling on {:.2}% ({} paths, depth {})",
            100.0 * f.fraction_cauchy,
            100.0 * d.fraction_above_ceiling,
            d.n_paths,
            d.config.depth
        ),
    )
}

fn main() {
    let (c1, c2) = bridge();
    let results: Vec<(&str, Outcome)> = vec![
        ("1 bridge martingale certification", c1),
        ("2 symmetry identity", c2),
        ("3 drift-integral constant", drift_integral()),
        ("4 classifier table", classifier_table()),
        ("5 general-X drift", general_x()),
        ("6 stochastic-integral decomposition", stochastic_integral()),
        ("7 Lévy bridge", levy()),
        ("8 look-ahead demo", lookahead()),
        ("9 finite lab", finite_lab()),
        ("10 self-convergence order", self_convergence()),
        ("11 Jeulin probe", jeulin_probe()),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(d) => println!("PASS  {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL  {name}: {d}");
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
