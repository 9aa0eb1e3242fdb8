//! TASEP driven by LPP weights, an event-driven oracle, and a
//! second-class particle under the basic coupling.
//!
//! Particle `n` sits at `x_n`, labels increase from right to left. The
//! weight `w(m, n)` is the waiting time of particle `n` for its jump to
//! `m - n` once that jump is enabled, so particle `n` reaches `m - n` at
//! the passage time `L(m, n)` from the staircase `{(x_n(0) + n, n)}`.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::distr::{Bernoulli, Distribution};
use rand::Rng;
use rand_distr::Exp1;

use crate::lattice::{Site, Window};
use crate::lpp::{Passage, StartSet};
use crate::weights::{SeedPlan, SiteLaw, WeightSample};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum TasepError {
    #[error("positions must be strictly decreasing in the label")]
    NotDecreasing,
    #[error("rates must be positive and finite")]
    BadRate,
    #[error("particle {0} is not part of the configuration")]
    MissingLabel(i64),
    #[error("particle {label} starts left of the window column {column}")]
    StartOutsideWindow { label: i64, column: i64 },
    #[error("weights at {site} do not follow the rate of particle {label}")]
    RateMismatch { label: i64, site: Site },
    #[error("window not covered by the weights")]
    Coverage,
    #[error("exclusion violated at time {0}")]
    Exclusion(f64),
    #[error("discrepancy count {count} at event {event}")]
    Coupling { count: usize, event: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

/// Consecutive labels `first_label, first_label + 1, ...` with positions
/// and jump rates.
#[derive(Clone, Debug, PartialEq)]
pub struct ParticleConfig {
    first_label: i64,
    positions: Vec<i64>,
    rates: Vec<f64>,
}

impl ParticleConfig {
    pub fn new(first_label: i64, positions: Vec<i64>, rates: Vec<f64>) -> Result<Self, TasepError> {
        if positions.len() != rates.len() {
            return Err(TasepError::InvalidParameter("positions and rates differ in length"));
        }
        if positions.windows(2).any(|w| w[1] >= w[0]) {
            return Err(TasepError::NotDecreasing);
        }
        if rates.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(TasepError::BadRate);
        }
        Ok(Self { first_label, positions, rates })
    }

    pub fn labels(&self) -> core::ops::Range<i64> {
        self.first_label..self.first_label + self.positions.len() as i64
    }

    pub fn position(&self, label: i64) -> Option<i64> {
        let k = usize::try_from(label - self.first_label).ok()?;
        self.positions.get(k).copied()
    }

    pub fn rate(&self, label: i64) -> Option<f64> {
        let k = usize::try_from(label - self.first_label).ok()?;
        self.rates.get(k).copied()
    }

    /// LPP start set `{(x_n + n, n)}`.
    pub fn staircase(&self) -> StartSet {
        StartSet::new(self.labels().map(|n| Site::new(self.position(n).unwrap() + n, n)).collect())
    }

    fn check_against(&self, weights: &WeightSample, window: &Window) -> Result<(), TasepError> {
        if !weights.window().contains_window(window) {
            return Err(TasepError::Coverage);
        }
        let (i0, i1) = window.i_range();
        let (j0, j1) = window.j_range();
        for n in j0..=j1 {
            let x = self.position(n).ok_or(TasepError::MissingLabel(n))?;
            if x + n < i0 {
                return Err(TasepError::StartOutsideWindow { label: n, column: i0 });
            }
            if let Some(field) = weights.field() {
                let v = self.rate(n).unwrap();
                for m in (x + n + 1).max(i0)..=i1 {
                    let site = Site::new(m, n);
                    if field.law_at(site) != (SiteLaw::Exponential { rate: v }) {
                        return Err(TasepError::RateMismatch { label: n, site });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Arrival times `T(m, n)` of particle `n` at `m - n` over a window of
/// `(m, n)`. Entries behind the initial position are `-inf`.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpTable {
    window: Window,
    times: Vec<f64>,
}

impl JumpTable {
    pub fn window(&self) -> Window {
        self.window
    }

    pub fn get(&self, m: i64, n: i64) -> Option<Passage> {
        self.window.index(Site::new(m, n)).map(|k| Passage::from_raw(self.times[k]))
    }

    pub fn raw(&self) -> &[f64] {
        &self.times
    }

    /// `x_n(t)`, or `None` when particle `n` may already have left the
    /// window by time `t`.
    pub fn position(&self, n: i64, t: f64) -> Option<i64> {
        let (i0, _) = self.window.i_range();
        let row = self.window.index(Site::new(i0, n))?;
        let w = self.window.width();
        let reached = self.times[row..row + w].partition_point(|&x| x <= t);
        (reached < w).then(|| i0 + reached as i64 - 1 - n)
    }
}

/// Tandem queue recursion over the window: particle `n` reaches `m - n`
/// a waiting time after both its previous arrival and the departure of
/// particle `n - 1` from that site. The lowest label in the window is
/// never blocked.
pub fn evolve_from_weights(
    config: &ParticleConfig,
    weights: &WeightSample,
    window: Window,
) -> Result<JumpTable, TasepError> {
    config.check_against(weights, &window)?;
    let (i0, i1) = window.i_range();
    let (j0, j1) = window.j_range();
    let w = window.width();
    let mut times = Vec::with_capacity(window.len());
    for n in j0..=j1 {
        let x = config.position(n).unwrap();
        let clocks = weights.row(n, i0, i1).unwrap();
        let base = times.len();
        for m in i0..=i1 {
            let k = (m - i0) as usize;
            let target = m - n;
            let v = match target.cmp(&x) {
                Ordering::Less => f64::NEG_INFINITY,
                Ordering::Equal => 0.0,
                Ordering::Greater => {
                    let own = if k == 0 { f64::NEG_INFINITY } else { times[base + k - 1] };
                    let vacated = if n == j0 { f64::NEG_INFINITY } else { times[base - w + k] };
                    let ready = if own >= vacated { own } else { vacated };
                    clocks[k] + ready
                }
            };
            times.push(v);
        }
    }
    Ok(JumpTable { window, times })
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Event {
    time: f64,
    label: i64,
}

impl Eq for Event {}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        other.time.total_cmp(&self.time).then_with(|| other.label.cmp(&self.label))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Jump history of each particle from the event-driven simulation.
#[derive(Clone, Debug, PartialEq)]
pub struct EventRun {
    first_label: i64,
    initial: Vec<i64>,
    jumps: Vec<Vec<f64>>,
    table: JumpTable,
}

impl EventRun {
    /// Position of particle `n` at time `t`.
    pub fn position(&self, n: i64, t: f64) -> Option<i64> {
        let k = usize::try_from(n - self.first_label).ok()?;
        let j = self.jumps.get(k)?;
        Some(self.initial[k] + j.partition_point(|&s| s <= t) as i64)
    }

    pub fn table(&self) -> &JumpTable {
        &self.table
    }

    pub fn event_count(&self) -> usize {
        self.jumps.iter().map(Vec::len).sum()
    }
}

/// Simulates the particles of the window rows in time order with explicit
/// clocks: once particle `n` is free to jump to `m - n`, it does so after
/// the waiting time `w(m, n)`. Jumps beyond column `i1` are not performed.
pub fn simulate_events(
    config: &ParticleConfig,
    weights: &WeightSample,
    window: Window,
) -> Result<EventRun, TasepError> {
    config.check_against(weights, &window)?;
    let (_, i1) = window.i_range();
    let (j0, j1) = window.j_range();
    let count = (j1 - j0 + 1) as usize;
    let mut pos: Vec<i64> = (j0..=j1).map(|n| config.position(n).unwrap()).collect();
    let initial = pos.clone();
    let mut jumps: Vec<Vec<f64>> = alloc::vec![Vec::new(); count];
    let mut pending = alloc::vec![false; count];
    let mut times = alloc::vec![f64::NEG_INFINITY; window.len()];
    for (k, n) in (j0..=j1).enumerate() {
        let start = Site::new(pos[k] + n, n);
        if let Some(idx) = window.index(start) {
            times[idx] = 0.0;
        }
    }
    let mut heap = BinaryHeap::new();

    let free = |pos: &[i64], k: usize| k == 0 || pos[k - 1] > pos[k] + 1;
    let clock = |k: usize, p: i64| -> Option<f64> {
        let n = j0 + k as i64;
        let m = p + 1 + n;
        (m <= i1).then(|| weights.get(Site::new(m, n)).unwrap())
    };
    for k in 0..count {
        if free(&pos, k) {
            if let Some(w) = clock(k, pos[k]) {
                heap.push(Event { time: w, label: k as i64 });
                pending[k] = true;
            }
        }
    }
    while let Some(Event { time, label }) = heap.pop() {
        let k = label as usize;
        pending[k] = false;
        if !free(&pos, k) {
            return Err(TasepError::Exclusion(time));
        }
        pos[k] += 1;
        jumps[k].push(time);
        let n = j0 + k as i64;
        times[window.index(Site::new(pos[k] + n, n)).unwrap()] = time;
        if free(&pos, k) && !pending[k] {
            if let Some(w) = clock(k, pos[k]) {
                heap.push(Event { time: time + w, label: k as i64 });
                pending[k] = true;
            }
        }
        if k + 1 < count && !pending[k + 1] && pos[k + 1] + 1 == pos[k] - 1 {
            if let Some(w) = clock(k + 1, pos[k + 1]) {
                heap.push(Event { time: time + w, label: k as i64 + 1 });
                pending[k + 1] = true;
            }
        }
    }
    Ok(EventRun {
        first_label: j0,
        initial,
        jumps,
        table: JumpTable { window, times },
    })
}

/// Piecewise-constant trajectory of the second-class particle.
#[derive(Clone, Debug, PartialEq)]
pub struct SecondClassTrack {
    times: Vec<f64>,
    sites: Vec<i64>,
}

impl SecondClassTrack {
    /// Jump times, increasing; the particle sits at `sites[k]` from
    /// `times[k]` on.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn sites(&self) -> &[i64] {
        &self.sites
    }

    pub fn at(&self, t: f64) -> i64 {
        let k = self.times.partition_point(|&s| s <= t);
        self.sites[k.max(1) - 1]
    }
}

/// Outcome of a coupled run.
#[derive(Clone, Debug, PartialEq)]
pub struct SecondClassRun {
    pub track: SecondClassTrack,
    /// Occupied sites of the process without the extra particle at the
    /// horizon, increasing.
    pub occupied: Vec<i64>,
    pub segment: (i64, i64),
    pub events: u64,
}

/// Step initial data: independent Bernoulli occupations with density
/// `rho_minus` left of the origin and `rho_plus` right of it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepProfile {
    pub rho_minus: f64,
    pub rho_plus: f64,
}

/// Runs two rate-1 TASEPs on `[-pad, pad]` that differ only at the
/// origin, driven by the same site clocks, up to `horizon`. `pad` defaults
/// to `3 * horizon` sites.
pub fn second_class_trajectory(
    profile: StepProfile,
    plan: SeedPlan,
    horizon: f64,
    pad: Option<i64>,
) -> Result<SecondClassRun, TasepError> {
    let ok = |r: f64| (0.0..=1.0).contains(&r);
    if !ok(profile.rho_minus) || !ok(profile.rho_plus) || !(horizon >= 0.0) {
        return Err(TasepError::InvalidParameter("densities in [0, 1], horizon >= 0"));
    }
    let pad = pad.unwrap_or((3.0 * horizon) as i64 + 10);
    let len = (2 * pad + 1) as usize;
    let origin = pad as usize;
    let mut rng = plan.stream(0x005e_c00d);
    let left = Bernoulli::new(profile.rho_minus).unwrap();
    let right = Bernoulli::new(profile.rho_plus).unwrap();
    // a: without the extra particle; b: with it
    let mut a = alloc::vec![false; len];
    for (x, cell) in a.iter_mut().enumerate() {
        *cell = match x.cmp(&origin) {
            Ordering::Less => left.sample(&mut rng),
            Ordering::Greater => right.sample(&mut rng),
            Ordering::Equal => false,
        };
    }
    let mut b = a.clone();
    b[origin] = true;

    let active = |a: &[bool], b: &[bool], x: usize| {
        x + 1 < a.len() && ((a[x] && !a[x + 1]) || (b[x] && !b[x + 1]))
    };
    let mut slots: Vec<usize> = Vec::new();
    let mut slot_of = alloc::vec![usize::MAX; len];
    let refresh = |x: usize, a: &[bool], b: &[bool], slots: &mut Vec<usize>, slot_of: &mut Vec<usize>| {
        let want = active(a, b, x);
        let have = slot_of[x] != usize::MAX;
        if want && !have {
            slot_of[x] = slots.len();
            slots.push(x);
        } else if !want && have {
            let s = slot_of[x];
            let last = *slots.last().unwrap();
            slots.swap_remove(s);
            if last != x {
                slot_of[last] = s;
            }
            slot_of[x] = usize::MAX;
        }
    };
    for x in 0..len {
        refresh(x, &a, &b, &mut slots, &mut slot_of);
    }

    let mut x2 = origin;
    let mut t = 0.0;
    let mut track = SecondClassTrack { times: alloc::vec![0.0], sites: alloc::vec![0] };
    let mut events = 0u64;
    loop {
        if slots.is_empty() {
            break;
        }
        let e: f64 = Exp1.sample(&mut rng);
        t += e / slots.len() as f64;
        if t > horizon {
            break;
        }
        let x = slots[rng.random_range(0..slots.len())];
        events += 1;
        for p in [&mut a, &mut b] {
            if p[x] && !p[x + 1] {
                p[x] = false;
                p[x + 1] = true;
            }
        }
        let lo = x.saturating_sub(1);
        for y in lo..=(x + 1).min(len - 1) {
            refresh(y, &a, &b, &mut slots, &mut slot_of);
        }
        let disc = |y: usize| a[y] != b[y];
        let count = disc(x) as usize + disc(x + 1) as usize;
        if x2 == x || x2 == x + 1 {
            if count != 1 {
                return Err(TasepError::Coupling { count, event: events });
            }
            let moved = if disc(x) { x } else { x + 1 };
            if moved != x2 {
                x2 = moved;
                track.times.push(t);
                track.sites.push(x2 as i64 - pad);
            }
        } else if count != 0 {
            return Err(TasepError::Coupling { count: count + 1, event: events });
        }
    }
    let occupied = a
        .iter()
        .enumerate()
        .filter(|(_, o)| **o)
        .map(|(x, _)| x as i64 - pad)
        .collect();
    Ok(SecondClassRun { track, occupied, segment: (-pad, pad), events })
}

/// Occupation frequencies in `bins` equal cells of `xi = x / t` over
/// `[xi_min, xi_max)`, averaged over an ensemble of occupied-site lists.
pub fn empirical_density_profile(
    states: &[Vec<i64>],
    t: f64,
    xi_min: f64,
    xi_max: f64,
    bins: usize,
) -> Vec<f64> {
    let mut hits = alloc::vec![0u64; bins];
    let width = (xi_max - xi_min) / bins as f64;
    let bin_of = |x: i64| {
        let xi = x as f64 / t;
        let b = libm::floor((xi - xi_min) / width);
        (b >= 0.0 && (b as usize) < bins).then_some(b as usize)
    };
    for s in states {
        for &x in s {
            if let Some(b) = bin_of(x) {
                hits[b] += 1;
            }
        }
    }
    let lo = libm::ceil(xi_min * t) as i64;
    let hi = libm::ceil(xi_max * t) as i64;
    let mut sites = alloc::vec![0u64; bins];
    for x in lo..hi {
        if let Some(b) = bin_of(x) {
            sites[b] += 1;
        }
    }
    hits.iter()
        .zip(&sites)
        .map(|(&h, &s)| if s == 0 { 0.0 } else { h as f64 / (s as f64 * states.len() as f64) })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lpp::passage_times;
    use crate::weights::{sample_weights, RateField};

    fn random_config(plan: SeedPlan, rows: i64, width: i64) -> ParticleConfig {
        let mut rng = plan.stream(1);
        let mut pos = Vec::new();
        let mut x = width / 2;
        for _ in 0..rows {
            pos.push(x);
            x -= rng.random_range(1..4);
        }
        let rates = (0..rows).map(|n| if n > 0 { 1.0 } else { 0.5 }).collect();
        ParticleConfig::new(0, pos, rates).unwrap()
    }

    #[test]
    fn free_particle_sums_clocks() {
        let window = Window::new(0, 9, 0, 0).unwrap();
        let vals: Vec<f64> = (0..10).map(|k| k as f64 * 0.5 + 0.25).collect();
        let w = WeightSample::from_values(window, vals.clone()).unwrap();
        let cfg = ParticleConfig::new(0, alloc::vec![0], alloc::vec![1.0]).unwrap();
        let tab = evolve_from_weights(&cfg, &w, window).unwrap();
        let mut acc = 0.0;
        for m in 1..10 {
            acc += vals[m as usize];
            assert_eq!(tab.get(m, 0), Some(Passage::Time(acc)));
        }
    }

    #[test]
    fn table_matches_lpp_and_events() {
        let field = RateField::two_speed(0.5).unwrap();
        for r in 0..20 {
            let plan = SeedPlan::new(31, r);
            let cfg = random_config(plan, 12, 24);
            let window = Window::new(-40, 30, 0, 11).unwrap();
            let w = sample_weights(&field, window, plan);
            let tab = evolve_from_weights(&cfg, &w, window).unwrap();
            let grid = passage_times(&w, &cfg.staircase(), window).unwrap();
            assert_eq!(tab.raw(), grid.raw());
            let ev = simulate_events(&cfg, &w, window).unwrap();
            assert_eq!(ev.table().raw(), tab.raw());
        }
    }

    #[test]
    fn two_particles_small_window() {
        let field = RateField::Homogeneous;
        let window = Window::new(0, 4, 0, 1).unwrap();
        let w = sample_weights(&field, window, SeedPlan::new(2, 2));
        let cfg = ParticleConfig::new(0, alloc::vec![0, -1], alloc::vec![1.0, 1.0]).unwrap();
        let ev = simulate_events(&cfg, &w, window).unwrap();
        let grid = passage_times(&w, &cfg.staircase(), window).unwrap();
        assert_eq!(ev.table().raw(), grid.raw());
    }

    #[test]
    fn rate_mismatch_detected() {
        let field = RateField::Homogeneous;
        let window = Window::new(0, 4, 0, 1).unwrap();
        let w = sample_weights(&field, window, SeedPlan::new(2, 2));
        let cfg = ParticleConfig::new(0, alloc::vec![0, -1], alloc::vec![1.0, 0.5]).unwrap();
        assert!(matches!(evolve_from_weights(&cfg, &w, window), Err(TasepError::RateMismatch { .. })));
    }

    #[test]
    fn second_class_starts_at_origin() {
        let run = second_class_trajectory(
            StepProfile { rho_minus: 0.25, rho_plus: 0.75 },
            SeedPlan::new(4, 0),
            200.0,
            None,
        )
        .unwrap();
        assert_eq!(run.track.at(0.0), 0);
        assert!(run.events > 10_000);
        for w in run.track.sites().windows(2) {
            assert_eq!((w[1] - w[0]).abs(), 1);
        }
    }

    #[test]
    fn second_class_moves_at_shock_speed() {
        let profile = StepProfile { rho_minus: 0.2, rho_plus: 0.6 };
        let horizon = 300.0;
        let runs = 6;
        let mut total = 0.0;
        for r in 0..runs {
            let run = second_class_trajectory(profile, SeedPlan::new(8, r), horizon, None).unwrap();
            total += run.track.at(horizon) as f64;
        }
        let speed = total / (runs as f64 * horizon);
        assert!((speed - (1.0 - 0.2 - 0.6)).abs() < 0.07, "{speed}");
    }

    #[test]
    fn profile_bins_in_unit_interval() {
        let states = alloc::vec![alloc::vec![-3, -1, 0, 2, 5], alloc::vec![-2, 1, 4]];
        let p = empirical_density_profile(&states, 5.0, -1.0, 1.0, 4);
        assert!(p.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}
