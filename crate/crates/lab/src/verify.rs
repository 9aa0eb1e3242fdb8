//! Exact and numerical self-checks: passage times against enumeration,
//! interface invariants on small instances and the two Tracy-Widom routes.

use anyhow::Result;
use lpp_shock::interface::{antidiagonal_split_holds, event_translation_check, trace_from_grids};
use lpp_shock::lattice::{Site, Window};
use lpp_shock::lpp::{brute_force_passage, passage_times, StartSet};
use lpp_shock::models::TwoSpeedModel;
use lpp_shock::twdist::{f_goe, f_gue, TracyWidom};
use lpp_shock::weights::{sample_weights, SeedPlan, WeightSample};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct OracleOutcome {
    pub instances: usize,
    pub sites: usize,
    pub mismatches: usize,
}

/// Random windows up to 6 x 6 with random weights and one to three start
/// points; every passage time must equal the enumerated maximum bitwise.
pub fn oracle_suite(instances: usize, seed: u64) -> Result<OracleOutcome> {
    let per: Vec<(usize, usize)> = (0..instances as u64)
        .into_par_iter()
        .map(|r| -> Result<(usize, usize)> {
            let mut rng = SeedPlan::new(seed, r).stream(0x6f72_6163);
            let (w, h) = (rng.random_range(1..=6i64), rng.random_range(1..=6i64));
            let window = Window::new(0, w - 1, 0, h - 1).expect("nonempty");
            let values = (0..window.len()).map(|_| rng.random_range(0.01..5.0)).collect();
            let weights = WeightSample::from_values(window, values)?;
            let starts = (0..rng.random_range(1..=3))
                .map(|_| Site::new(rng.random_range(0..w), rng.random_range(0..h)))
                .collect();
            let start = StartSet::new(starts);
            let grid = passage_times(&weights, &start, window)?;
            let mut bad = 0;
            for s in window.sites() {
                let b = brute_force_passage(&weights, &start, s, |_| false, 1e6)?;
                bad += usize::from(grid.passage(s)?.raw().to_bits() != b.raw().to_bits());
            }
            Ok((window.len(), bad))
        })
        .collect::<Result<_>>()?;
    Ok(OracleOutcome {
        instances,
        sites: per.iter().map(|p| p.0).sum(),
        mismatches: per.iter().map(|p| p.1).sum(),
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct InterfaceOutcome {
    pub instances: usize,
    pub conservation_violations: usize,
    pub first_step_violations: usize,
    pub split_violations: usize,
    pub sandwich_violations: usize,
    pub tau_mismatches: usize,
}

impl InterfaceOutcome {
    pub fn violations(&self) -> usize {
        self.conservation_violations
            + self.first_step_violations
            + self.split_violations
            + self.sandwich_violations
            + self.tau_mismatches
    }
}

/// Two-speed instances with random `alpha` and `n <= n_max`: `I_n + J_n =
/// n`, `phi_1 = (1, 0)`, a single colour change on every anti-diagonal,
/// the nested translation events and `tau_n` against the grids.
pub fn interface_suite(instances: usize, n_max: usize, seed: u64) -> Result<InterfaceOutcome> {
    let per: Vec<InterfaceOutcome> = (0..instances as u64)
        .into_par_iter()
        .map(|r| -> Result<InterfaceOutcome> {
            let plan = SeedPlan::new(seed, r);
            let mut rng = plan.stream(0x6966_6163);
            let alpha = rng.random_range(0.05..0.95);
            let n = rng.random_range(1..=n_max);
            let model = TwoSpeedModel::new(alpha)?;
            let size = n as i64 + 2;
            let window = Window::new(-size, size, -size, size).expect("nonempty");
            let weights = sample_weights(&model.field(), window, plan);
            let (sp, sm) = model.start_sets(size);
            let plus = passage_times(&weights, &sp, window)?;
            let minus = passage_times(&weights, &sm, window)?;
            let trace = trace_from_grids(&plus, &minus, n)?;
            let mut o = InterfaceOutcome { instances: 1, ..Default::default() };
            o.first_step_violations += usize::from(trace.site(1) != Site::new(1, 0));
            for k in 0..=n {
                let p = trace.site(k);
                o.conservation_violations += usize::from(p.i + p.j != k as i64);
                let tau = plus.passage(p)?.raw().max(minus.passage(p)?.raw());
                o.tau_mismatches += usize::from(trace.times()[k].raw().to_bits() != tau.to_bits());
            }
            for k in 1..=n {
                o.split_violations += usize::from(!antidiagonal_split_holds(&trace, &plus, &minus, k)?);
                for m in 0..k as i64 {
                    let ev = event_translation_check(&trace, &plus, &minus, m, k)?;
                    o.sandwich_violations += usize::from(!ev.sandwich_holds());
                }
            }
            Ok(o)
        })
        .collect::<Result<_>>()?;
    let mut total = InterfaceOutcome::default();
    for o in per {
        total.instances += o.instances;
        total.conservation_violations += o.conservation_violations;
        total.first_step_violations += o.first_step_violations;
        total.split_violations += o.split_violations;
        total.sandwich_violations += o.sandwich_violations;
        total.tau_mismatches += o.tau_mismatches;
    }
    Ok(total)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TwOutcome {
    pub points: usize,
    pub gue_route_gap: f64,
    pub goe_route_gap: f64,
    /// Largest downward step of either tabulated CDF.
    pub monotonicity_defect: f64,
    /// Largest of `F(lo)` and `1 - F(hi)` over both laws and both routes.
    pub limit_defect: f64,
}

/// Compares the Painleve tables with the Fredholm determinants on
/// `[-8, 6]` with spacing `step`.
pub fn tw_suite(tw: &TracyWidom, step: f64) -> Result<TwOutcome> {
    let k = (14.0 / step).round() as usize;
    let xs: Vec<f64> = (0..=k).map(|i| -8.0 + step * i as f64).collect();
    let gaps: Vec<(f64, f64)> = xs
        .par_iter()
        .map(|&s| -> Result<(f64, f64)> {
            Ok(((f_gue(s)? - tw.gue.at(s)).abs(), (f_goe(s)? - tw.goe.at(s)).abs()))
        })
        .collect::<Result<_>>()?;
    let mut defect: f64 = 0.0;
    for c in [&tw.gue, &tw.goe] {
        for w in c.values().windows(2) {
            defect = defect.max(w[0] - w[1]);
        }
    }
    let limit = [
        tw.gue.at(-12.0),
        tw.goe.at(-12.0),
        1.0 - tw.gue.at(12.0),
        1.0 - tw.goe.at(12.0),
        f_gue(-10.0)?,
        f_goe(-10.0)?,
        1.0 - f_gue(10.0)?,
        1.0 - f_goe(10.0)?,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(TwOutcome {
        points: xs.len(),
        gue_route_gap: gaps.iter().map(|g| g.0).fold(0.0, f64::max),
        goe_route_gap: gaps.iter().map(|g| g.1).fold(0.0, f64::max),
        monotonicity_defect: defect,
        limit_defect: limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_clean() {
        let o = oracle_suite(10, 3).unwrap();
        assert_eq!(o.mismatches, 0);
        assert!(o.sites >= 10);
        let i = interface_suite(20, 12, 3).unwrap();
        assert_eq!(i.instances, 20);
        assert_eq!(i.violations(), 0);
    }
}
