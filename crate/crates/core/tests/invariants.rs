use lpp_shock::interface::{
    antidiagonal_split_holds, event_translation_check, trace_from_grids,
};
use lpp_shock::lattice::{Site, Window};
use lpp_shock::lpp::{
    brute_force_passage, max_path, passage_times, path_hits, point_passage, restricted_passage,
    StartSet,
};
use lpp_shock::models::TwoSpeedModel;
use lpp_shock::tasep::{evolve_from_weights, simulate_events, ParticleConfig};
use lpp_shock::weights::{sample_weights, RateField, SeedPlan, WeightSample};
use proptest::prelude::*;

fn weights_in(w: Window) -> impl Strategy<Value = WeightSample> {
    prop::collection::vec(0.01f64..5.0, w.len())
        .prop_map(move |v| WeightSample::from_values(w, v).unwrap())
}

fn small_window() -> impl Strategy<Value = Window> {
    (1i64..=6, 1i64..=6).prop_map(|(a, b)| Window::new(0, a - 1, 0, b - 1).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn dp_equals_enumeration((w, ws) in small_window().prop_flat_map(|w| (Just(w), weights_in(w)))) {
        let start = StartSet::single(Site::new(0, 0));
        let grid = passage_times(&ws, &start, w).unwrap();
        for s in w.sites() {
            let b = brute_force_passage(&ws, &start, s, |_| false, 1e6).unwrap();
            prop_assert_eq!(grid.get(s).unwrap().raw().to_bits(), b.raw().to_bits());
        }
    }

    #[test]
    fn superadditive_through_any_intermediate(
        seed in any::<u64>(), bi in 0i64..8, bj in 0i64..8, ci in 0i64..8, cj in 0i64..8,
    ) {
        let w = Window::new(0, 15, 0, 15).unwrap();
        let ws = sample_weights(&RateField::Homogeneous, w, SeedPlan::new(seed, 0));
        let a = Site::new(0, 0);
        let b = Site::new(bi, bj);
        let c = Site::new(bi + ci, bj + cj);
        let ab = point_passage(&ws, a, b).unwrap().raw();
        let bc = point_passage(&ws, b, c).unwrap().raw();
        let ac = point_passage(&ws, a, c).unwrap().raw();
        prop_assert!(ab + bc <= ac + 1e-12);
    }

    #[test]
    fn grid_monotone_and_restriction_dominated(seed in any::<u64>(), fi in 1i64..10, fj in 1i64..10) {
        let w = Window::new(0, 11, 0, 11).unwrap();
        let ws = sample_weights(&RateField::Homogeneous, w, SeedPlan::new(seed, 1));
        let start = StartSet::single(Site::new(0, 0));
        let grid = passage_times(&ws, &start, w).unwrap();
        for s in w.sites() {
            let here = grid.get(s).unwrap().raw();
            if let Some(r) = grid.get(s.right()) { prop_assert!(r.raw() >= here); }
            if let Some(u) = grid.get(s.up()) { prop_assert!(u.raw() >= here); }
        }
        let bad = Site::new(fi, fj);
        let end = Site::new(11, 11);
        let path = max_path(&grid, end).unwrap();
        let r = restricted_passage(&ws, &start, end, |s| s == bad).unwrap();
        let full = grid.get(end).unwrap();
        prop_assert!(r.raw() <= full.raw());
        prop_assert_eq!(r == full, !path_hits(&path, |s| s == bad));
    }

    #[test]
    fn interface_invariants(seed in any::<u64>(), n in 4usize..=50, alpha in 0.2f64..0.9) {
        let model = TwoSpeedModel::new(alpha).unwrap();
        let size = n as i64 + 2;
        let w = Window::new(-size, size, -size, size).unwrap();
        let ws = sample_weights(&model.field(), w, SeedPlan::new(seed, 2));
        let (sp, sm) = model.start_sets(size);
        let plus = passage_times(&ws, &sp, w).unwrap();
        let minus = passage_times(&ws, &sm, w).unwrap();
        let trace = trace_from_grids(&plus, &minus, n).unwrap();
        prop_assert_eq!(trace.site(1), Site::new(1, 0));
        for k in 0..=n {
            let p = trace.site(k);
            prop_assert_eq!(p.i + p.j, k as i64);
            let tau = plus.get(p).unwrap().raw().max(minus.get(p).unwrap().raw());
            prop_assert_eq!(trace.times()[k].raw(), tau);
        }
        for k in 1..=n {
            prop_assert!(antidiagonal_split_holds(&trace, &plus, &minus, k).unwrap());
            for m in 0..k as i64 {
                let ev = event_translation_check(&trace, &plus, &minus, m, k).unwrap();
                prop_assert!(ev.sandwich_holds());
            }
        }
    }

    #[test]
    fn tasep_recursion_matches_events(seed in any::<u64>(), size in 3i64..12) {
        let w = Window::new(0, size - 1, 0, size - 1).unwrap();
        let ws = sample_weights(&RateField::Homogeneous, w, SeedPlan::new(seed, 3));
        let config = ParticleConfig::new(0, (0..size).map(|n| -n).collect(), vec![1.0; size as usize]).unwrap();
        let table = evolve_from_weights(&config, &ws, w).unwrap();
        let run = simulate_events(&config, &ws, w).unwrap();
        let grid = passage_times(&ws, &config.staircase(), w).unwrap();
        for s in w.sites() {
            let a = table.get(s.i, s.j).unwrap();
            prop_assert_eq!(a, run.table().get(s.i, s.j).unwrap());
            prop_assert_eq!(a, grid.get(s).unwrap());
        }
        for n in 1..size {
            for t in [0.5, 1.0, 2.0, 4.0] {
                let (a, b) = (run.position(n - 1, t).unwrap(), run.position(n, t).unwrap());
                prop_assert!(a > b);
            }
        }
    }
}
