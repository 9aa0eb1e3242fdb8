//! End-to-end acceptance run at full scale. Prints one PASS/FAIL line per
//! criterion and exits nonzero if any fails.

use std::time::Instant;

use anyhow::Result;
use lpp_shock::models::correspondence_probe;
use lpp_shock::twdist::TracyWidom;
use lpp_shock_lab::experiments::{replicas, run};
use lpp_shock_lab::report::ExperimentReport;
use lpp_shock_lab::verify::{interface_suite, oracle_suite, tw_suite};
use lpp_shock_lab::{with_threads, ExperimentConfig, ExperimentKind};

const SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    detail: String,
}

fn config(kind: ExperimentKind, t: f64, t_ref: Option<f64>, n: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(kind);
    c.t = t;
    c.t_ref = t_ref;
    c.n = n;
    c.master_seed = SEED;
    c
}

fn checks(r: &ExperimentReport, names: &[&str]) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in names {
        match r.check(name) {
            Some(c) => {
                ok &= c.passed;
                parts.push(format!("{name} {:.4} vs {:.4}", c.value, c.bound));
            }
            None => {
                ok = false;
                parts.push(format!("{name} missing"));
            }
        }
    }
    (ok, parts.join(", "))
}

fn criterion_1() -> Result<Outcome> {
    let o = oracle_suite(100, SEED)?;
    Ok(Outcome {
        passed: o.mismatches == 0 && o.instances == 100,
        detail: format!("{} instances, {} sites, {} mismatches", o.instances, o.sites, o.mismatches),
    })
}

fn criterion_2() -> Result<Outcome> {
    let (out, _) = replicas(SEED, 100, |plan| Ok(correspondence_probe(0.5, 30, 50, plan)?))?;
    let probes: usize = out.iter().map(|o| o.probes).sum();
    let bad: usize = out.iter().map(|o| o.violations).sum();
    let tables: usize = out.iter().map(|o| o.table_mismatches).sum();
    Ok(Outcome {
        passed: probes == 5000 && bad == 0 && tables == 0,
        detail: format!("{probes} probes, {bad} violations, {tables} table mismatches"),
    })
}

fn criterion_3() -> Result<Outcome> {
    let o = interface_suite(10_000, 50, SEED)?;
    Ok(Outcome {
        passed: o.instances == 10_000 && o.violations() == 0,
        detail: format!(
            "{} instances: conservation {}, first step {}, split {}, sandwich {}, tau {}",
            o.instances,
            o.conservation_violations,
            o.first_step_violations,
            o.split_violations,
            o.sandwich_violations,
            o.tau_mismatches
        ),
    })
}

fn criterion_4(tw: &TracyWidom) -> Result<Outcome> {
    let o = tw_suite(tw, 0.01)?;
    Ok(Outcome {
        passed: o.gue_route_gap <= 1e-6
            && o.goe_route_gap <= 1e-6
            && o.monotonicity_defect <= 0.0
            && o.limit_defect <= 1e-6,
        detail: format!(
            "{} points, route gaps {:.1e} (GUE) {:.1e} (GOE), monotonicity defect {:.1e}, limit defect {:.1e}",
            o.points, o.gue_route_gap, o.goe_route_gap, o.monotonicity_defect, o.limit_defect
        ),
    })
}

fn criterion_5(tw: &TracyWidom) -> Result<Outcome> {
    let mut c = config(ExperimentKind::TwoSpeed, 2000.0, Some(500.0), 10_000);
    c.alpha = 0.5;
    let (r, _) = run(&c, tw)?;
    let (ok, d) = checks(&r, &["ks", "ks_not_worse_than_ref", "k_doubling_mismatches"]);
    Ok(Outcome { passed: ok, detail: format!("{d}; KS(500) {:.4}", r.metrics["ks_ref"]) })
}

fn criterion_6(tw: &TracyWidom) -> Result<Outcome> {
    let mut c = config(ExperimentKind::Bernoulli, 4000.0, None, 10_000);
    c.marginal_n = Some(0);
    let (r, _) = run(&c, tw)?;
    let (ok, d) = checks(&r, &["ks", "cdf_at_zero"]);
    Ok(Outcome { passed: ok, detail: format!("{d}; F(0) {:.4}", r.metrics["cdf_at_zero"]) })
}

fn criterion_7(tw: &TracyWidom) -> Result<Outcome> {
    let mut c = config(ExperimentKind::Multipoint, 2000.0, None, 10_000);
    c.beta = 1.0;
    c.u = vec![-1.0, 1.0];
    let (r, _) = run(&c, tw)?;
    let (ok, d) = checks(&r, &["joint_cdf_gap", "max_abs_correlation", "one_point_ks"]);
    Ok(Outcome { passed: ok && r.counters["joint_points"] == 9, detail: d })
}

fn criterion_8(tw: &TracyWidom) -> Result<Outcome> {
    let (cross, _) = run(&config(ExperimentKind::NoCrossing, 2000.0, Some(500.0), 400), tw)?;
    let (a, da) = checks(&cross, &["frequency_nonincreasing", "restricted_mismatches"]);
    let (slow, _) = run(&config(ExperimentKind::SlowDecorrelation, 2000.0, Some(500.0), 1000), tw)?;
    let (b, db) = checks(&slow, &["negative_gaps", "mean_gap_shrinks"]);
    let (tails, _) = run(&config(ExperimentKind::Tails, 2000.0, None, 4000), tw)?;
    let (c, dc) = checks(&tails, &["upper_decreasing", "lower_decreasing", "lower_steeper"]);
    Ok(Outcome {
        passed: a && b && c,
        detail: format!(
            "crossing {:.4} -> {:.4} ({da}); gap mean {:.4} -> {:.4} ({db}); tail exponents upper {:.3} lower {:.3} ({dc})",
            cross.metrics["frequency_ref"],
            cross.metrics["frequency"],
            slow.metrics["mean_gap_ref"],
            slow.metrics["mean_gap"],
            tails.metrics["upper_exponent"],
            tails.metrics["lower_exponent"],
        ),
    })
}

fn criterion_9(tw: &TracyWidom) -> Result<Outcome> {
    let mut bytes = Vec::new();
    for kind in [ExperimentKind::TwoSpeed, ExperimentKind::Multipoint, ExperimentKind::SlowDecorrelation] {
        let c = config(kind, 300.0, Some(100.0), 64);
        for threads in [1, 3] {
            let (r, _) = with_threads(Some(threads), || run(&c, tw))??;
            bytes.push((kind, r.to_json()?));
        }
        let (r, _) = run(&c, tw)?;
        bytes.push((kind, r.to_json()?));
    }
    let same = bytes.chunks(3).all(|g| g[0].1 == g[1].1 && g[1].1 == g[2].1);
    Ok(Outcome {
        passed: same,
        detail: format!("{} runs over 3 experiments, 1 and 3 threads: byte-identical {same}", bytes.len()),
    })
}

fn main() {
    let tw = TracyWidom::new();
    let criteria: Vec<(&str, Box<dyn Fn() -> Result<Outcome>>)> = vec![
        ("oracle equivalence", Box::new(criterion_1)),
        ("TASEP-LPP correspondence", Box::new(criterion_2)),
        ("interface invariants", Box::new(criterion_3)),
        ("Tracy-Widom numerics", Box::new(|| criterion_4(&tw))),
        ("two-speed interface law", Box::new(|| criterion_5(&tw))),
        ("Bernoulli interface law", Box::new(|| criterion_6(&tw))),
        ("multipoint law", Box::new(|| criterion_7(&tw))),
        ("assumption checks", Box::new(|| criterion_8(&tw))),
        ("reproducibility", Box::new(|| criterion_9(&tw))),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != k + 1) {
            continue;
        }
        let t0 = Instant::now();
        let (passed, detail) = match f() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e:#}")),
        };
        failed += usize::from(!passed);
        println!(
            "{} criterion {} ({name}): {detail} [{:.1} s]",
            if passed { "PASS" } else { "FAIL" },
            k + 1,
            t0.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
