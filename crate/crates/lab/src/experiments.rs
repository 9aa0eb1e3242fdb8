//! Ensemble runners. Replicas are independent given their [`SeedPlan`] and
//! results are collected in replica order, so a report does not depend on
//! the number of worker threads.

use std::time::Instant;

use anyhow::{bail, Result};
use lpp_shock::interface::InterfaceError;
use lpp_shock::models::{
    correspondence_probe, local_increment, point_to_point_sample, BernoulliModel, ModelError,
    MultipointModel, TwoSpeedModel, SLOW_KAPPA, SLOW_MU0,
};
use lpp_shock::stats::{
    binomial_se, dkw_epsilon, ks_distance, ks_two_sample, mean, pearson_correlation, standard_error, Ecdf,
};
use lpp_shock::twdist::{
    bernoulli_prediction, multipoint_prediction, Law, point_to_point_constants, two_speed_prediction, NumericCdf,
    TracyWidom,
};
use lpp_shock::weights::SeedPlan;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::report::{Check, EcdfRow, ExperimentReport, KsSummary, Timings};

/// Master seed of the ensemble tagged `tag`; tag 0 is the master seed
/// itself.
pub fn sub_seed(master: u64, tag: u64) -> u64 {
    master ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Runs `f` on replicas `0..n` of `seed`, returning values and per-replica
/// seconds in replica order.
pub fn replicas<T, F>(seed: u64, n: usize, f: F) -> Result<(Vec<T>, Vec<f64>)>
where
    T: Send,
    F: Fn(SeedPlan) -> Result<T> + Sync,
{
    let out: Result<Vec<(T, f64)>> = (0..n as u64)
        .into_par_iter()
        .map(|r| {
            let t0 = Instant::now();
            let v = f(SeedPlan::new(seed, r))?;
            Ok((v, t0.elapsed().as_secs_f64()))
        })
        .collect();
    Ok(out?.into_iter().unzip())
}

/// Runs the experiment named in `config`.
pub fn run(config: &ExperimentConfig, tw: &TracyWidom) -> Result<(ExperimentReport, Timings)> {
    config.validate()?;
    let t0 = Instant::now();
    let (report, replica_seconds) = match config.experiment {
        ExperimentKind::TwoSpeed => run_two_speed(config, tw)?,
        ExperimentKind::Bernoulli => run_bernoulli(config)?,
        ExperimentKind::Multipoint => run_multipoint(config, tw)?,
        ExperimentKind::NoCrossing => check_no_crossing(config)?,
        ExperimentKind::SlowDecorrelation => check_slow_decorrelation(config)?,
        ExperimentKind::Tails => check_tails(config, tw)?,
        ExperimentKind::Correspondence => run_correspondence(config)?,
    };
    let timings = Timings {
        total_seconds: t0.elapsed().as_secs_f64(),
        threads: rayon::current_num_threads(),
        replica_seconds,
    };
    Ok((report, timings))
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let k = ((hi - lo) / step).round() as usize;
    (0..=k).map(|i| lo + step * i as f64).collect()
}

/// The configured `s` grid, or the default grid of the experiment.
pub fn eval_grid(config: &ExperimentConfig) -> Vec<f64> {
    if !config.s.is_empty() {
        return config.s.clone();
    }
    match config.experiment {
        ExperimentKind::TwoSpeed => grid(-5.0, 5.0, 0.25),
        ExperimentKind::Bernoulli => grid(-8.0, 8.0, 0.5),
        ExperimentKind::Multipoint => grid(-14.0, 2.0, 0.5),
        _ => grid(-10.0, 8.0, 0.5),
    }
}

fn multipoint_u(config: &ExperimentConfig) -> Vec<f64> {
    if config.u.is_empty() {
        vec![-1.0, 1.0]
    } else {
        config.u.clone()
    }
}

/// The limit law of the experiment's main statistic on its grid.
pub fn prediction(config: &ExperimentConfig, tw: &TracyWidom) -> Result<Vec<(f64, f64)>> {
    config.validate()?;
    let s = eval_grid(config);
    let f: Box<dyn Fn(f64) -> f64> = match config.experiment {
        ExperimentKind::TwoSpeed => {
            let p = TwoSpeedModel::new(config.alpha)?.constants();
            Box::new(move |s| two_speed_prediction(&p, &tw.goe, s))
        }
        ExperimentKind::Bernoulli => {
            let p = BernoulliModel::new(config.rho_minus, config.rho_plus)?.params;
            Box::new(move |u| bernoulli_prediction(&p, u))
        }
        ExperimentKind::Multipoint => {
            let m = MultipointModel::new(config.beta, config.t, multipoint_u(config))?;
            Box::new(move |s| one_point(&m, &tw.gue, 0)(s))
        }
        ExperimentKind::Tails => {
            let (_, sigma) = point_to_point_constants(config.eta);
            Box::new(move |s| tw.gue.at(s / sigma))
        }
        k => bail!("{} has no limit law to evaluate", k.name()),
    };
    Ok(s.into_iter().map(|x| (x, f(x))).collect())
}

fn ecdf_rows(e: &Ecdf, s: &[f64], model: impl Fn(f64) -> f64) -> Vec<EcdfRow> {
    s.iter().map(|&s| EcdfRow { s, empirical: e.at(s), predicted: model(s) }).collect()
}

fn ks_summary(e: &Ecdf, model: impl Fn(f64) -> f64) -> KsSummary {
    let k = ks_distance(e, model);
    KsSummary { distance: k.distance, location: k.location, model_value: k.model_value, dkw_99: dkw_epsilon(e.len(), 0.01) }
}

/// Monte Carlo standard error of an ECDF value near `p`.
fn ks_se(ks: &KsSummary, n: usize) -> f64 {
    binomial_se(ks.model_value.clamp(0.0, 1.0), n)
}

/// Scale of the comparison ensemble for checks over two values of `t`.
fn reference_scale(config: &ExperimentConfig) -> Option<f64> {
    config.t_ref.or_else(|| (config.t / 4.0 >= 50.0).then_some(config.t / 4.0))
}

/// Empirical `p`-quantile and a distribution-free standard error from the
/// order statistics two binomial standard errors either side.
fn quantile_with_se(e: &Ecdf, p: f64) -> (f64, f64) {
    let n = e.len() as f64;
    let d = 2.0 * binomial_se(p, e.len());
    let lo = e.quantile((p - d).max(1.0 / n));
    let hi = e.quantile((p + d).min(1.0));
    (e.quantile(p), (hi - lo) / 4.0)
}

fn two_speed_values(model: &TwoSpeedModel, seed: u64, n: usize, t: f64) -> Result<(Vec<f64>, Vec<f64>, u64)> {
    let (v, secs) = replicas(seed, n, |plan| match model.difference(plan, t) {
        Ok(d) => Ok(Some(model.statistic(d, t))),
        Err(ModelError::Interface(InterfaceError::Tie(_))) => Ok(None),
        Err(e) => Err(e.into()),
    })?;
    let ties = v.iter().filter(|x| x.is_none()).count() as u64;
    Ok((v.into_iter().flatten().collect(), secs, ties))
}

pub fn run_two_speed(config: &ExperimentConfig, tw: &TracyWidom) -> Result<(ExperimentReport, Vec<f64>)> {
    let model = TwoSpeedModel::new(config.alpha)?;
    let p = model.constants();
    let t = config.t;
    let mut r = ExperimentReport::new(config.clone());
    for (k, v) in [("eta0", p.eta0), ("mu", p.mu), ("sigma1", p.sigma1), ("sigma2", p.sigma2), ("gamma", p.gamma)] {
        r.constants.insert(k.into(), v);
    }
    let (values, secs, ties) = two_speed_values(&model, config.master_seed, config.n, t)?;
    r.counters.insert("ties".into(), ties);
    if values.is_empty() {
        bail!("every replica tied");
    }
    let predict = |s: f64| two_speed_prediction(&p, &tw.goe, s);
    let e = Ecdf::new(values.clone())?;
    let ks = ks_summary(&e, predict);
    r.ecdf = ecdf_rows(&e, &eval_grid(config), predict);
    r.checks.push(Check::at_most("ks", ks.distance, config.tolerance.unwrap_or(0.10)));
    r.metrics.insert("mean".into(), mean(&values)?);

    // recentering by a_t = t^(1/4)
    let shift = t.powf(0.25) / t.cbrt();
    let shifted = Ecdf::new(values.iter().map(|x| x - shift).collect())?;
    r.metrics.insert("a_t_shift".into(), shift);
    r.metrics.insert("a_t_ks_between".into(), ks_two_sample(&e, &shifted));
    r.metrics.insert("a_t_ks_vs_prediction".into(), ks_distance(&shifted, predict).distance);

    let n = t.floor() as usize;
    let k = n as i64 + 1;
    let doubled = (0..config.doubling_n.min(config.n) as u64)
        .into_par_iter()
        .map(|i| {
            let plan = SeedPlan::new(config.master_seed, i);
            let a = model.trace(plan, n, k)?;
            let b = model.trace(plan, n, 2 * k)?;
            Ok(u64::from(a != b))
        })
        .collect::<Result<Vec<u64>>>()?;
    let mismatches = doubled.iter().sum::<u64>();
    r.counters.insert("k_doubling_checked".into(), doubled.len() as u64);
    r.checks.push(Check::at_most("k_doubling_mismatches", mismatches as f64, 0.0));

    if let Some(tr) = config.t_ref {
        let (rv, _, rties) = two_speed_values(&model, sub_seed(config.master_seed, 1), config.n, tr)?;
        r.counters.insert("ties_ref".into(), rties);
        let re = Ecdf::new(rv.clone())?;
        let rks = ks_summary(&re, predict);
        let se = ks_se(&ks, e.len()).hypot(ks_se(&rks, re.len()));
        r.metrics.insert("ks_ref".into(), rks.distance);
        r.metrics.insert("ks_se_combined".into(), se);
        r.checks.push(Check::at_most("ks_not_worse_than_ref", ks.distance - rks.distance, 2.0 * se));
        if rv.len() == values.len() {
            r.series.insert("statistic_ref".into(), rv);
        }
    }
    r.ks = Some(ks);
    r.samples = values;
    Ok((r, secs))
}

pub fn run_bernoulli(config: &ExperimentConfig) -> Result<(ExperimentReport, Vec<f64>)> {
    let model = BernoulliModel::new(config.rho_minus, config.rho_plus)?;
    let p = model.params;
    let t = config.t;
    let mut r = ExperimentReport::new(config.clone());
    for (k, v) in [
        ("eta", p.eta),
        ("m_plus", p.m_plus),
        ("m_minus", p.m_minus),
        ("v_plus", p.v_plus),
        ("v_minus", p.v_minus),
    ] {
        r.constants.insert(k.into(), v);
    }
    let (v, secs) = replicas(config.master_seed, config.n, |plan| match model.difference(plan, t) {
        Ok(d) => Ok(Some(model.statistic(d, t))),
        Err(ModelError::Interface(InterfaceError::Tie(_))) => Ok(None),
        Err(e) => Err(e.into()),
    })?;
    r.counters.insert("ties".into(), v.iter().filter(|x| x.is_none()).count() as u64);
    let values: Vec<f64> = v.into_iter().flatten().collect();
    if values.is_empty() {
        bail!("every replica tied");
    }
    let predict = |u: f64| bernoulli_prediction(&p, u);
    let e = Ecdf::new(values.clone())?;
    let ks = ks_summary(&e, predict);
    r.ecdf = ecdf_rows(&e, &eval_grid(config), predict);
    r.checks.push(Check::at_most("ks", ks.distance, config.tolerance.unwrap_or(0.05)));
    r.checks.push(Check::at_most("cdf_at_zero", (e.at(0.0) - predict(0.0)).abs(), 0.05));
    r.metrics.insert("cdf_at_zero".into(), e.at(0.0));
    r.metrics.insert("mean".into(), mean(&values)?);
    r.ks = Some(ks);
    r.samples = values;

    let mn = config.marginal_n.unwrap_or(config.n.min(1000));
    if mn > 0 {
        let us = if config.u.is_empty() { vec![0.0] } else { config.u.clone() };
        let (m, _) = replicas(sub_seed(config.master_seed, 2), mn, |plan| Ok(model.marginals(plan, t, &us)?))?;
        for (k, u) in us.iter().enumerate() {
            let a: Vec<f64> = m.iter().map(|x| x.0[k]).collect();
            let b: Vec<f64> = m.iter().map(|x| x.1[k]).collect();
            let (ga, gb) = (p.marginal(true, *u), p.marginal(false, *u));
            let ka = ks_distance(&Ecdf::new(a.clone())?, |s| ga.cdf(s)).distance;
            let kb = ks_distance(&Ecdf::new(b.clone())?, |s| gb.cdf(s)).distance;
            r.checks.push(Check::at_most(&format!("marginal_ks_plus_{k}"), ka, 0.05));
            r.checks.push(Check::at_most(&format!("marginal_ks_minus_{k}"), kb, 0.05));
            if mn > 1 {
                r.metrics.insert(format!("marginal_correlation_{k}"), pearson_correlation(&a, &b).unwrap_or(f64::NAN));
            }
        }
        r.counters.insert("marginal_replicas".into(), mn as u64);
    }
    Ok((r, secs))
}

/// Smallest grid point `x` with `f(x) >= p`, by bisection on `[-30, 30]`.
fn invert(f: impl Fn(f64) -> f64, p: f64) -> f64 {
    let (mut lo, mut hi) = (-30.0, 30.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= p {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn one_point<'a>(m: &'a MultipointModel, gue: &'a NumericCdf, k: usize) -> impl Fn(f64) -> f64 + 'a {
    move |s| multipoint_prediction(&m.params, gue, &[m.u[k]], &[s]).expect("one point")
}

pub fn run_multipoint(config: &ExperimentConfig, tw: &TracyWidom) -> Result<(ExperimentReport, Vec<f64>)> {
    let u = multipoint_u(config);
    let model = MultipointModel::new(config.beta, config.t, u.clone())?;
    let p = model.params;
    let mut r = ExperimentReport::new(config.clone());
    for (k, v) in [("mu", p.mu), ("mu_plus", p.mu_plus), ("mu_minus", p.mu_minus), ("sigma", p.sigma)] {
        r.constants.insert(k.into(), v);
    }
    let (samples, secs) = replicas(config.master_seed, config.n, |plan| Ok(model.sample(plan)))?;
    let joints: Vec<Vec<f64>> = samples.iter().map(|s| s.joint()).collect();
    let tol = config.tolerance.unwrap_or(0.10);

    let first: Vec<f64> = joints.iter().map(|j| j[0]).collect();
    let f1 = one_point(&model, &tw.gue, 0);
    let e = Ecdf::new(first.clone())?;
    let ks = ks_summary(&e, &f1);
    r.ecdf = ecdf_rows(&e, &eval_grid(config), &f1);
    r.checks.push(Check::at_most("one_point_ks", ks.distance, tol));
    r.ks = Some(ks);

    // joint CDF on the product of each coordinate's predicted quartiles
    let levels: Vec<[f64; 3]> = (0..u.len())
        .map(|k| {
            let f = one_point(&model, &tw.gue, k);
            [0.25, 0.5, 0.75].map(|q| invert(&f, q))
        })
        .collect();
    let mut points: Vec<Vec<f64>> = vec![vec![]];
    for lv in &levels {
        points = points.iter().flat_map(|pt| lv.iter().map(move |s| [pt.clone(), vec![*s]].concat())).collect();
    }
    let mut gap: f64 = 0.0;
    for (i, pt) in points.iter().enumerate() {
        let emp = joints.iter().filter(|j| j.iter().zip(pt).all(|(a, b)| a <= b)).count() as f64 / joints.len() as f64;
        let pred = multipoint_prediction(&p, &tw.gue, &u, pt)?;
        r.metrics.insert(format!("joint_empirical_{i}"), emp);
        r.metrics.insert(format!("joint_predicted_{i}"), pred);
        gap = gap.max((emp - pred).abs());
    }
    r.counters.insert("joint_points".into(), points.len() as u64);
    r.checks.push(Check::at_most("joint_cdf_gap", gap, tol));

    let mut worst: f64 = 0.0;
    for k in 0..u.len() {
        let a: Vec<f64> = samples.iter().map(|s| s.plus[k]).collect();
        let b: Vec<f64> = samples.iter().map(|s| s.minus[k]).collect();
        let c = pearson_correlation(&a, &b).unwrap_or(f64::NAN);
        if k == 0 {
            r.correlation = Some(c);
        }
        r.metrics.insert(format!("correlation_{k}"), c);
        worst = worst.max(c.abs());
        r.series.insert(format!("plus_{k}"), a);
        r.series.insert(format!("minus_{k}"), b);
    }
    r.checks.push(Check::at_most("max_abs_correlation", worst, 0.05));
    r.samples = first;
    Ok((r, secs))
}

pub fn check_no_crossing(config: &ExperimentConfig) -> Result<(ExperimentReport, Vec<f64>)> {
    let u = multipoint_u(config);
    let mut r = ExperimentReport::new(config.clone());
    let run_at = |t: f64, seed: u64| -> Result<(Vec<f64>, Vec<f64>, u64, Vec<f64>)> {
        let model = MultipointModel::new(config.beta, t, u.clone())?;
        let (out, secs) = replicas(seed, config.n, |plan| Ok(model.crossing(plan, config.nu)?))?;
        let crossed = out.iter().map(|o| f64::from(u8::from(o.crossed()))).collect();
        let plus = out.iter().map(|o| f64::from(u8::from(o.plus_hits))).collect();
        let mism = out.iter().map(|o| o.restricted_mismatches as u64).sum();
        Ok((crossed, plus, mism, secs))
    };
    let model = MultipointModel::new(config.beta, config.t, u.clone())?;
    r.constants.insert("gamma_max".into(), model.gamma_max(config.nu));
    r.counters.insert("d_sites".into(), model.d_sites(config.nu).len() as u64);
    let (crossed, plus, mism, secs) = run_at(config.t, config.master_seed)?;
    let n = config.n;
    let freq = mean(&crossed)?;
    r.metrics.insert("frequency".into(), freq);
    r.metrics.insert("frequency_plus".into(), mean(&plus)?);
    r.counters.insert("restricted_mismatches".into(), mism);
    let mut total_mism = mism;
    if let Some(tr) = reference_scale(config) {
        let (rc, rp, rm, _) = run_at(tr, sub_seed(config.master_seed, 1))?;
        let rf = mean(&rc)?;
        let se = binomial_se(freq, n).hypot(binomial_se(rf, n));
        r.metrics.insert("t_ref".into(), tr);
        r.metrics.insert("frequency_ref".into(), rf);
        r.metrics.insert("frequency_plus_ref".into(), mean(&rp)?);
        r.metrics.insert("frequency_se_combined".into(), se);
        r.counters.insert("restricted_mismatches_ref".into(), rm);
        total_mism += rm;
        r.checks.push(Check::at_most("frequency_nonincreasing", freq - rf, 2.0 * se));
        r.series.insert("crossed_ref".into(), rc);
    }
    r.checks.push(Check::at_most("restricted_mismatches", total_mism as f64, 0.0));
    r.series.insert("plus_hits".into(), plus);
    r.samples = crossed;
    Ok((r, secs))
}

pub fn check_slow_decorrelation(config: &ExperimentConfig) -> Result<(ExperimentReport, Vec<f64>)> {
    let model = TwoSpeedModel::new(config.alpha)?;
    let mut r = ExperimentReport::new(config.clone());
    r.constants.insert("kappa".into(), SLOW_KAPPA);
    r.constants.insert("mu0".into(), SLOW_MU0);
    r.constants.insert("eta0".into(), model.constants().eta0);
    let run_at = |t: f64, seed: u64| {
        replicas(seed, config.n, |plan| Ok(model.decorrelation_gap(plan, t, config.nu)?))
    };
    let (gaps, secs) = run_at(config.t, config.master_seed)?;
    let g: Vec<f64> = gaps.iter().map(|x| x.gap).collect();
    let bulk: Vec<f64> = gaps.iter().map(|x| x.bulk).collect();
    let mut negative = gaps.iter().filter(|x| x.gap < -x.rounding).count();
    let e = Ecdf::new(g.clone())?;
    let (q, qse) = quantile_with_se(&e, 0.95);
    let (m, mse) = (mean(&g)?, standard_error(&g)?);
    r.metrics.insert("mean_gap".into(), m);
    r.metrics.insert("q95_gap".into(), q);
    r.metrics.insert("mean_bulk".into(), mean(&bulk)?);
    if let Some(tr) = reference_scale(config) {
        let (rg, _) = run_at(tr, sub_seed(config.master_seed, 1))?;
        let rgv: Vec<f64> = rg.iter().map(|x| x.gap).collect();
        negative += rg.iter().filter(|x| x.gap < -x.rounding).count();
        let re = Ecdf::new(rgv.clone())?;
        let (rq, rqse) = quantile_with_se(&re, 0.95);
        let (rm, rmse) = (mean(&rgv)?, standard_error(&rgv)?);
        r.metrics.insert("t_ref".into(), tr);
        r.metrics.insert("mean_gap_ref".into(), rm);
        r.metrics.insert("q95_gap_ref".into(), rq);
        r.metrics.insert("mean_bulk_ref".into(), mean(&rg.iter().map(|x| x.bulk).collect::<Vec<_>>())?);
        r.checks.push(Check::at_most("mean_gap_shrinks", m - rm, 2.0 * mse.hypot(rmse)));
        r.checks.push(Check::at_most("q95_gap_shrinks", q - rq, 2.0 * qse.hypot(rqse)));
        r.series.insert("gap_ref".into(), rgv);
    }
    r.counters.insert("negative_gaps".into(), negative as u64);
    r.metrics.insert("max_rounding".into(), gaps.iter().map(|x| x.rounding).fold(0.0, f64::max));
    r.checks.push(Check::at_most("negative_gaps", negative as f64, 0.0));
    r.series.insert("bulk".into(), bulk);
    r.samples = g;
    Ok((r, secs))
}

fn least_squares_slope(xy: &[(f64, f64)]) -> f64 {
    if xy.len() < 2 {
        return f64::NAN;
    }
    let k = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / k;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Slope of `ln(-ln p)` against `ln |s|` over the points with at least
/// `min_hits` hits and `p < 1`; the decay exponent of `p ~ exp(-c |s|^k)`.
fn tail_exponent(points: &[(f64, usize)], n: usize, min_hits: usize) -> f64 {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, h)| *h >= min_hits && *h < n)
        .map(|(s, h)| (s.abs().ln(), (-(*h as f64 / n as f64).ln()).ln()))
        .collect();
    least_squares_slope(&xy)
}

/// Decay rates `-d ln p / d|s|` of two tails, fitted over the offsets
/// where both have at least `min_hits` hits.
fn matched_decay_rates(upper: &[(f64, usize)], lower: &[(f64, usize)], min_hits: usize) -> (f64, f64, usize) {
    let both: Vec<usize> =
        (0..upper.len().min(lower.len())).filter(|&k| upper[k].1 >= min_hits && lower[k].1 >= min_hits).collect();
    let rate = |pts: &[(f64, usize)]| {
        let xy: Vec<(f64, f64)> = both.iter().map(|&k| (pts[k].0.abs(), (pts[k].1 as f64).ln())).collect();
        -least_squares_slope(&xy)
    };
    (rate(upper), rate(lower), both.len())
}

/// Steps along `points` (ordered by increasing `|s|`) where the hit count
/// fails to drop, among points with at least `min_hits` hits.
fn non_decreasing_steps(points: &[(f64, usize)], min_hits: usize) -> usize {
    let h: Vec<usize> = points.iter().map(|p| p.1).filter(|h| *h >= min_hits).collect();
    h.windows(2).filter(|w| w[1] >= w[0]).count()
}

pub const TAIL_MIN_HITS: usize = 10;

pub fn check_tails(config: &ExperimentConfig, tw: &TracyWidom) -> Result<(ExperimentReport, Vec<f64>)> {
    let (mu, sigma) = point_to_point_constants(config.eta);
    let l = config.t;
    let mut r = ExperimentReport::new(config.clone());
    r.constants.insert("mu_pp".into(), mu);
    r.constants.insert("sigma_pp".into(), sigma);
    let (x, secs) = replicas(config.master_seed, config.n, |plan| Ok(point_to_point_sample(plan, config.eta, l)?))?;
    let n = x.len();
    let e = Ecdf::new(x.clone())?;
    let predict = |s: f64| tw.gue.at(s / sigma);
    r.ecdf = ecdf_rows(&e, &eval_grid(config), predict);
    r.ks = Some(ks_summary(&e, predict));

    for s in 2..=8 {
        let s = s as f64;
        r.counters.insert(format!("raw_hits_{s}"), x.iter().filter(|v| **v > s).count() as u64);
        r.counters.insert(format!("raw_hits_-{s}"), x.iter().filter(|v| **v <= -s).count() as u64);
    }
    let centre = e.quantile(0.5);
    r.metrics.insert("tail_origin".into(), centre);
    let upper: Vec<(f64, usize)> =
        (2..=8).map(|s| (s as f64, x.iter().filter(|v| **v > centre + s as f64).count())).collect();
    let lower: Vec<(f64, usize)> =
        (2..=8).map(|s| (-s as f64, x.iter().filter(|v| **v <= centre - s as f64).count())).collect();
    for (s, h) in upper.iter().chain(&lower) {
        r.counters.insert(format!("hits_{s}"), *h as u64);
    }
    r.metrics.insert("upper_exponent".into(), tail_exponent(&upper, n, TAIL_MIN_HITS));
    r.metrics.insert("lower_exponent".into(), tail_exponent(&lower, n, TAIL_MIN_HITS));
    let (du, dl, points) = matched_decay_rates(&upper, &lower, TAIL_MIN_HITS);
    r.metrics.insert("upper_decay_rate".into(), du);
    r.metrics.insert("lower_decay_rate".into(), dl);
    r.counters.insert("matched_points".into(), points as u64);
    r.checks.push(Check::at_most("upper_decreasing", non_decreasing_steps(&upper, TAIL_MIN_HITS) as f64, 0.0));
    r.checks.push(Check::at_most("lower_decreasing", non_decreasing_steps(&lower, TAIL_MIN_HITS) as f64, 0.0));
    r.checks.push(Check { name: "lower_steeper".into(), value: dl - du, bound: 0.0, passed: dl > du });

    // mean of L / l against mu_pp plus the GUE mean correction
    let scale = l.powf(-2.0 / 3.0);
    let m = mu + mean(&x)? * scale;
    let corrected = mu + sigma * tw.gue.mean() * scale;
    r.metrics.insert("mean_l_over_l".into(), m);
    r.metrics.insert("mean_l_over_l_minus_mu_pp".into(), m - mu);
    r.constants.insert("corrected_mean".into(), corrected);
    r.checks.push(Check::at_most("mean_vs_corrected", (m - corrected).abs(), 0.02));
    r.samples = x;
    Ok((r, secs))
}

pub fn run_correspondence(config: &ExperimentConfig) -> Result<(ExperimentReport, Vec<f64>)> {
    let mut r = ExperimentReport::new(config.clone());
    let (out, secs) = replicas(config.master_seed, config.n, |plan| {
        Ok(correspondence_probe(config.alpha, config.size, config.probes, plan)?)
    })?;
    let probes: usize = out.iter().map(|o| o.probes).sum();
    let violations: usize = out.iter().map(|o| o.violations).sum();
    let tables: usize = out.iter().map(|o| o.table_mismatches).sum();
    r.counters.insert("probes".into(), probes as u64);
    r.counters.insert("violations".into(), violations as u64);
    r.counters.insert("table_mismatches".into(), tables as u64);
    r.checks.push(Check::at_most("violations", violations as f64, 0.0));
    r.checks.push(Check::at_most("table_mismatches", tables as f64, 0.0));
    r.samples = out.iter().map(|o| o.violations as f64).collect();

    let ln = config.local_n.unwrap_or(config.n);
    if ln > 1 {
        let u = config.u.first().copied().unwrap_or(1.0);
        let s = config.local_slope;
        let run_at = |t: f64, seed: u64| -> Result<(f64, f64)> {
            let (v, _) = replicas(seed, ln, |plan| Ok(local_increment(plan, s, u, t)?))?;
            Ok((mean(&v)?.abs(), standard_error(&v)?))
        };
        let (m, se) = run_at(config.t, sub_seed(config.master_seed, 3))?;
        r.metrics.insert("local_abs_mean".into(), m);
        r.metrics.insert("local_se".into(), se);
        if let Some(tr) = reference_scale(config) {
            let (rm, rse) = run_at(tr, sub_seed(config.master_seed, 4))?;
            r.metrics.insert("local_abs_mean_ref".into(), rm);
            r.metrics.insert("t_ref".into(), tr);
            r.checks.push(Check::at_most("local_mean_shrinks", m - rm, 2.0 * se.hypot(rse)));
        }
    }
    Ok((r, secs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_fit_recovers_power() {
        let n = 1_000_000;
        let pts: Vec<(f64, usize)> =
            (2..=6).map(|s| (s as f64, (n as f64 * (-0.3 * (s as f64).powf(1.5)).exp()) as usize)).collect();
        assert!((tail_exponent(&pts, n, 10) - 1.5).abs() < 0.01);
        assert_eq!(non_decreasing_steps(&pts, 10), 0);
        assert_eq!(non_decreasing_steps(&[(1.0, 5), (2.0, 50), (3.0, 40)], 10), 0);
        assert_eq!(non_decreasing_steps(&[(1.0, 40), (2.0, 40)], 10), 1);
        let fast: Vec<(f64, usize)> = (2..=6).map(|s| (-s as f64, n >> (2 * s))).collect();
        let slow: Vec<(f64, usize)> = (2..=6).map(|s| (s as f64, n >> s)).collect();
        let (du, dl, k) = matched_decay_rates(&slow, &fast, 10);
        assert_eq!(k, 5);
        assert!((du - 2f64.ln()).abs() < 1e-3 && (dl - 4f64.ln()).abs() < 1e-3);
    }

    #[test]
    fn quantile_error_brackets() {
        let e = Ecdf::new((0..1000).map(|k| k as f64).collect()).unwrap();
        let (q, se) = quantile_with_se(&e, 0.95);
        assert_eq!(q, 949.0);
        assert!(se > 1.0 && se < 20.0);
    }

    #[test]
    fn seeds_separate() {
        assert_eq!(sub_seed(9, 0), 9);
        assert_ne!(sub_seed(9, 1), sub_seed(9, 2));
    }
}
