//! Last passage times from a start set.
//!
//! `L_S(p)` is the maximum over up-right paths from a site of `S` to `p` of
//! the summed weights of the path sites outside `S`. Unreachable sites get
//! [`Passage::Unreachable`]. The point-to-point time `L_{a -> b}` uses
//! `S = {a}`, so it excludes the weight at `a` and includes the one at `b`.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::lattice::{Site, Window};
use crate::weights::{WeightSample, WeightsError};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum LppError {
    #[error(transparent)]
    Weights(#[from] WeightsError),
    #[error("positions must be strictly decreasing in the label (labels {0} and {1})")]
    NotDecreasing(i64, i64),
    #[error("site {0} lies outside the computed window")]
    OutsideWindow(Site),
    #[error("site {0} is not reachable from the start set")]
    Unreachable(Site),
    #[error("brute force would enumerate {0:e} paths")]
    TooManyPaths(f64),
    #[error("path steps must be unit moves up or right")]
    BadPath,
}

/// A passage time, or the `-inf` sentinel for unreachable sites.
/// `Unreachable` compares below every time.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub enum Passage {
    Unreachable,
    Time(f64),
}

impl Passage {
    #[inline]
    pub fn from_raw(x: f64) -> Self {
        if x == f64::NEG_INFINITY {
            Passage::Unreachable
        } else {
            Passage::Time(x)
        }
    }

    #[inline]
    pub fn raw(self) -> f64 {
        match self {
            Passage::Unreachable => f64::NEG_INFINITY,
            Passage::Time(x) => x,
        }
    }

    pub fn time(self) -> Option<f64> {
        match self {
            Passage::Unreachable => None,
            Passage::Time(x) => Some(x),
        }
    }

    pub fn is_reachable(self) -> bool {
        matches!(self, Passage::Time(_))
    }
}

/// Which labels of a particle configuration enter a start set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Half {
    All,
    /// Labels `k > 0`.
    Positive,
    /// Labels `k <= 0`.
    NonPositive,
}

impl Half {
    fn admits(self, k: i64) -> bool {
        match self {
            Half::All => true,
            Half::Positive => k > 0,
            Half::NonPositive => k <= 0,
        }
    }
}

/// Finite set of start sites, sorted by row then column.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StartSet {
    points: Vec<Site>,
}

impl StartSet {
    pub fn new(mut points: Vec<Site>) -> Self {
        points.sort_by_key(|s| (s.j, s.i));
        points.dedup();
        Self { points }
    }

    pub fn single(site: Site) -> Self {
        Self { points: alloc::vec![site] }
    }

    pub fn points(&self) -> &[Site] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, site: Site) -> bool {
        self.points.binary_search_by_key(&(site.j, site.i), |s| (s.j, s.i)).is_ok()
    }

    /// Smallest window holding every start point, if any.
    pub fn bounding_window(&self) -> Option<Window> {
        let first = self.points.first()?;
        let (mut i0, mut i1) = (first.i, first.i);
        for p in &self.points {
            i0 = i0.min(p.i);
            i1 = i1.max(p.i);
        }
        Window::new(i0, i1, first.j, self.points.last()?.j)
    }

    /// Start points lying in row `j`.
    fn row(&self, j: i64) -> &[Site] {
        let a = self.points.partition_point(|s| s.j < j);
        let b = self.points.partition_point(|s| s.j <= j);
        &self.points[a..b]
    }
}

/// Staircase `{(x_k + k, k)}` of a particle configuration `k -> x_k`,
/// restricted to `|k| <= k_bound` and the labels admitted by `half`.
pub fn staircase_from_config(
    positions: &[(i64, i64)],
    half: Half,
    k_bound: i64,
) -> Result<StartSet, LppError> {
    let mut sorted: Vec<(i64, i64)> = positions.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0].0 == w[1].0 || w[1].1 >= w[0].1 {
            return Err(LppError::NotDecreasing(w[0].0, w[1].0));
        }
    }
    Ok(StartSet::new(
        sorted
            .into_iter()
            .filter(|&(k, _)| k.abs() <= k_bound && half.admits(k))
            .map(|(k, x)| Site::new(x + k, k))
            .collect(),
    ))
}

/// Row-by-row sweep of the recursion over `window`. `sink` sees each row
/// of raw times (`-inf` for unreachable) in increasing `j`; returning
/// `false` stops the sweep.
fn sweep<F, S>(
    weights: &WeightSample,
    start: &StartSet,
    window: Window,
    forbidden: F,
    mut sink: S,
) -> Result<(), LppError>
where
    F: Fn(Site) -> bool,
    S: FnMut(i64, &[f64]) -> bool,
{
    weights.check_covers(&window)?;
    let (i0, i1) = window.i_range();
    let (j0, j1) = window.j_range();
    let w = window.width();
    let mut below = alloc::vec![f64::NEG_INFINITY; w];
    let mut row = alloc::vec![f64::NEG_INFINITY; w];
    for j in j0..=j1 {
        let wrow = weights.row(j, i0, i1).expect("covered");
        let starts = start.row(j);
        let mut si = starts.partition_point(|s| s.i < i0);
        let mut left = f64::NEG_INFINITY;
        for x in 0..w {
            let i = i0 + x as i64;
            let down = below[x];
            let pred = left.max(down);
            let v = if forbidden(Site::new(i, j)) {
                f64::NEG_INFINITY
            } else if si < starts.len() && starts[si].i == i {
                si += 1;
                if pred > 0.0 { pred } else { 0.0 }
            } else {
                wrow[x] + pred
            };
            row[x] = v;
            left = v;
        }
        if !sink(j, &row) {
            break;
        }
        core::mem::swap(&mut below, &mut row);
    }
    Ok(())
}

/// Simultaneous sweep for two start sets over a region given row by row:
/// rows `rows.0..=rows.1`, row `j` spanning the columns `cols(j)`. Each
/// weight is requested once per site and shared by both recursions. Sites
/// outside the region count as unreachable, so the region must contain
/// every site from which an admissible path can enter it. `sink` sees the
/// first column of each row and the two rows of raw times.
pub fn sweep_pair<W, C, F, G, S>(
    weight: W,
    starts: [&StartSet; 2],
    forbidden: (F, G),
    rows: (i64, i64),
    cols: C,
    mut sink: S,
) where
    W: Fn(Site) -> f64,
    C: Fn(i64) -> (i64, i64),
    F: Fn(Site) -> bool,
    G: Fn(Site) -> bool,
    S: FnMut(i64, i64, &[f64], &[f64]) -> bool,
{
    let (mut below_i0, mut below_a, mut below_b) = (0i64, Vec::<f64>::new(), Vec::<f64>::new());
    let (mut row_a, mut row_b): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
    let (mut down_a, mut down_b): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
    for j in rows.0..=rows.1 {
        let (i0, i1) = cols(j);
        let w = if i1 >= i0 { (i1 - i0 + 1) as usize } else { 0 };
        // previous row realigned to the columns of this one
        for (down, below) in [(&mut down_a, &below_a), (&mut down_b, &below_b)] {
            down.clear();
            down.resize(w, f64::NEG_INFINITY);
            let lo = i0.max(below_i0);
            let hi = i1.min(below_i0 + below.len() as i64 - 1);
            if lo <= hi {
                let (d, b) = ((lo - i0) as usize, (lo - below_i0) as usize);
                let len = (hi - lo + 1) as usize;
                down[d..d + len].copy_from_slice(&below[b..b + len]);
            }
        }
        row_a.clear();
        row_b.clear();
        row_a.resize(w, 0.0);
        row_b.resize(w, 0.0);
        let (sa, sb) = (starts[0].row(j), starts[1].row(j));
        let mut ka = sa.partition_point(|s| s.i < i0);
        let mut kb = sb.partition_point(|s| s.i < i0);
        let (mut left_a, mut left_b) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        let (down_a, down_b) = (&down_a[..w], &down_b[..w]);
        for x in 0..w {
            let i = i0 + x as i64;
            let site = Site::new(i, j);
            let om = weight(site);
            let pa = left_a.max(down_a[x]);
            let pb = left_b.max(down_b[x]);
            let mut va = om + pa;
            let mut vb = om + pb;
            if ka < sa.len() && sa[ka].i == i {
                ka += 1;
                va = if pa > 0.0 { pa } else { 0.0 };
            }
            if kb < sb.len() && sb[kb].i == i {
                kb += 1;
                vb = if pb > 0.0 { pb } else { 0.0 };
            }
            if forbidden.0(site) {
                va = f64::NEG_INFINITY;
            }
            if forbidden.1(site) {
                vb = f64::NEG_INFINITY;
            }
            row_a[x] = va;
            row_b[x] = vb;
            left_a = va;
            left_b = vb;
        }
        if !sink(j, i0, &row_a, &row_b) {
            break;
        }
        core::mem::swap(&mut below_a, &mut row_a);
        core::mem::swap(&mut below_b, &mut row_b);
        below_i0 = i0;
    }
}

/// Passage times on a window together with the start set they came from.
#[derive(Clone, Debug, PartialEq)]
pub struct PassageGrid {
    window: Window,
    start: StartSet,
    times: Vec<f64>,
}

impl PassageGrid {
    pub fn window(&self) -> Window {
        self.window
    }

    pub fn start(&self) -> &StartSet {
        &self.start
    }

    /// `None` outside the window.
    pub fn get(&self, site: Site) -> Option<Passage> {
        self.window.index(site).map(|k| Passage::from_raw(self.times[k]))
    }

    pub fn passage(&self, site: Site) -> Result<Passage, LppError> {
        self.get(site).ok_or(LppError::OutsideWindow(site))
    }

    /// Raw times, row-major, `-inf` for unreachable sites.
    pub fn raw(&self) -> &[f64] {
        &self.times
    }

    #[inline]
    fn raw_at(&self, site: Site) -> f64 {
        self.window.index(site).map_or(f64::NEG_INFINITY, |k| self.times[k])
    }
}

/// Passage times from `start` at every site of `window`. Only start points
/// inside the window are used.
pub fn passage_times(
    weights: &WeightSample,
    start: &StartSet,
    window: Window,
) -> Result<PassageGrid, LppError> {
    passage_times_avoiding(weights, start, window, |_| false)
}

/// As [`passage_times`], with paths barred from sites where `forbidden`
/// holds.
pub fn passage_times_avoiding<F: Fn(Site) -> bool>(
    weights: &WeightSample,
    start: &StartSet,
    window: Window,
    forbidden: F,
) -> Result<PassageGrid, LppError> {
    let mut times = Vec::with_capacity(window.len());
    sweep(weights, start, window, forbidden, |_, row| {
        times.extend_from_slice(row);
        true
    })?;
    Ok(PassageGrid { window, start: start.clone(), times })
}

/// Passage times at selected `endpoints` only, keeping two rows in memory.
pub fn endpoint_passages<F: Fn(Site) -> bool>(
    weights: &WeightSample,
    start: &StartSet,
    window: Window,
    endpoints: &[Site],
    forbidden: F,
) -> Result<Vec<Passage>, LppError> {
    if let Some(p) = endpoints.iter().find(|p| !window.contains(**p)) {
        return Err(LppError::OutsideWindow(*p));
    }
    let top = endpoints.iter().map(|p| p.j).max();
    let Some(top) = top else { return Ok(Vec::new()) };
    let (i0, _) = window.i_range();
    let (j0, _) = window.j_range();
    let window = Window::new(i0, window.i_range().1, j0, top).expect("nonempty");
    let mut out = alloc::vec![Passage::Unreachable; endpoints.len()];
    sweep(weights, start, window, forbidden, |j, row| {
        for (k, p) in endpoints.iter().enumerate() {
            if p.j == j {
                out[k] = Passage::from_raw(row[(p.i - i0) as usize]);
            }
        }
        j < top
    })?;
    Ok(out)
}

/// `L_{a -> b}`; unreachable unless `a <= b` coordinatewise.
pub fn point_passage(weights: &WeightSample, a: Site, b: Site) -> Result<Passage, LppError> {
    if !a.precedes(b) {
        return Ok(Passage::Unreachable);
    }
    let window = Window::spanning(a, b);
    Ok(endpoint_passages(weights, &StartSet::single(a), window, &[b], |_| false)?[0])
}

/// Passage time from `start` to `end` over paths avoiding `forbidden`.
pub fn restricted_passage<F: Fn(Site) -> bool>(
    weights: &WeightSample,
    start: &StartSet,
    end: Site,
    forbidden: F,
) -> Result<Passage, LppError> {
    let Some(bb) = start.bounding_window() else { return Ok(Passage::Unreachable) };
    let ll = bb.lower_left();
    let Some(window) = Window::new(ll.i, end.i, ll.j, end.j) else {
        return Ok(Passage::Unreachable);
    };
    Ok(endpoint_passages(weights, start, window, &[end], forbidden)?[0])
}

/// Up-right lattice path, listed from its first site.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePath {
    sites: Vec<Site>,
}

impl LatticePath {
    pub fn new(sites: Vec<Site>) -> Result<Self, LppError> {
        if sites.is_empty() {
            return Err(LppError::BadPath);
        }
        for w in sites.windows(2) {
            if w[1] != w[0].right() && w[1] != w[0].up() {
                return Err(LppError::BadPath);
            }
        }
        Ok(Self { sites })
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn first(&self) -> Site {
        self.sites[0]
    }

    pub fn last(&self) -> Site {
        self.sites[self.sites.len() - 1]
    }

    /// Weight collected along the path, skipping sites of `start`, summed
    /// from the first site on.
    pub fn weight(&self, weights: &WeightSample, start: &StartSet) -> Result<f64, LppError> {
        let mut acc = 0.0;
        for &s in &self.sites {
            if !start.contains(s) {
                acc += weights.get(s).ok_or(LppError::OutsideWindow(s))?;
            }
        }
        Ok(acc)
    }
}

/// The maximizing path to `end`. Ties between the two predecessors go to
/// the horizontal one.
pub fn max_path(grid: &PassageGrid, end: Site) -> Result<LatticePath, LppError> {
    if !grid.passage(end)?.is_reachable() {
        return Err(LppError::Unreachable(end));
    }
    let mut sites = alloc::vec![end];
    let mut p = end;
    loop {
        let left = grid.raw_at(p.left());
        let down = grid.raw_at(p.down());
        let pred = left.max(down);
        if grid.start.contains(p) && !(pred > 0.0) {
            break;
        }
        if pred == f64::NEG_INFINITY {
            break;
        }
        p = if left >= down { p.left() } else { p.down() };
        sites.push(p);
    }
    sites.reverse();
    LatticePath::new(sites)
}

pub fn path_hits<F: Fn(Site) -> bool>(path: &LatticePath, target: F) -> bool {
    path.sites.iter().any(|s| target(*s))
}

fn binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    let mut c = 1.0f64;
    for m in 0..k {
        c = c * (n - m) as f64 / (m + 1) as f64;
    }
    c
}

/// Exhaustive maximum over all admissible paths from `start` to `end`.
/// Refuses when more than `max_paths` paths would be enumerated.
pub fn brute_force_passage<F: Fn(Site) -> bool>(
    weights: &WeightSample,
    start: &StartSet,
    end: Site,
    forbidden: F,
    max_paths: f64,
) -> Result<Passage, LppError> {
    let sources: Vec<Site> = start.points().iter().copied().filter(|s| s.precedes(end)).collect();
    let count: f64 = sources
        .iter()
        .map(|s| {
            let (dx, dy) = ((end.i - s.i) as u64, (end.j - s.j) as u64);
            binomial(dx + dy, dx)
        })
        .sum();
    if count > max_paths {
        return Err(LppError::TooManyPaths(count));
    }
    for s in &sources {
        weights.check_covers(&Window::spanning(*s, end))?;
    }
    let mut best = f64::NEG_INFINITY;
    let mut stack = Vec::new();
    for &s in &sources {
        if forbidden(s) {
            continue;
        }
        stack.push((s, 0.0f64));
        while let Some((p, acc)) = stack.pop() {
            if p == end {
                if acc.partial_cmp(&best) == Some(Ordering::Greater) {
                    best = acc;
                }
                continue;
            }
            for q in [p.right(), p.up()] {
                if q.precedes(end) && !forbidden(q) {
                    let w = if start.contains(q) { 0.0 } else { weights.get(q).unwrap() };
                    stack.push((q, acc + w));
                }
            }
        }
    }
    Ok(Passage::from_raw(best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{sample_weights, RateField, SeedPlan};
    use alloc::vec;

    fn fixture_2x2() -> WeightSample {
        // rows j = 1, 2; columns i = 1, 2
        WeightSample::from_values(Window::new(1, 2, 1, 2).unwrap(), vec![1.0, 2.0, 3.0, 4.0])
            .unwrap()
    }

    #[test]
    fn two_by_two_example() {
        let w = fixture_2x2();
        let a = Site::new(1, 1);
        let b = Site::new(2, 2);
        // paths (1,1)->(2,1)->(2,2) = 2 + 4, (1,1)->(1,2)->(2,2) = 3 + 4
        assert_eq!(point_passage(&w, a, b).unwrap(), Passage::Time(7.0));
        let grid = passage_times(&w, &StartSet::single(a), w.window()).unwrap();
        let path = max_path(&grid, b).unwrap();
        assert_eq!(path.sites(), &[a, Site::new(1, 2), b]);
    }

    #[test]
    fn unreachable_when_not_ordered() {
        let w = fixture_2x2();
        assert_eq!(point_passage(&w, Site::new(2, 1), Site::new(1, 2)).unwrap(), Passage::Unreachable);
        let grid = passage_times(&w, &StartSet::single(Site::new(2, 2)), w.window()).unwrap();
        assert_eq!(grid.get(Site::new(1, 1)), Some(Passage::Unreachable));
        assert!(matches!(max_path(&grid, Site::new(1, 1)), Err(LppError::Unreachable(_))));
    }

    #[test]
    fn passage_ordering() {
        assert!(Passage::Unreachable < Passage::Time(-1e300));
        assert!(Passage::Time(1.0) < Passage::Time(2.0));
    }

    #[test]
    fn staircase_selection() {
        let cfg: Vec<(i64, i64)> = (-5..=5).map(|k| (k, if k == 0 { 1 } else { -2 * k })).collect();
        let plus = staircase_from_config(&cfg, Half::Positive, 3).unwrap();
        assert_eq!(plus.points(), &[Site::new(-1, 1), Site::new(-2, 2), Site::new(-3, 3)]);
        let minus = staircase_from_config(&cfg, Half::NonPositive, 2).unwrap();
        assert_eq!(minus.points(), &[Site::new(2, -2), Site::new(1, -1), Site::new(1, 0)]);
        assert!(staircase_from_config(&cfg, Half::Positive, 0).unwrap().is_empty());
        let bad = [(0, 0), (1, 0)];
        assert!(staircase_from_config(&bad, Half::All, 5).is_err());
    }

    #[test]
    fn dp_matches_brute_force_random() {
        let field = RateField::two_speed(0.4).unwrap();
        let window = Window::new(-3, 6, -3, 6).unwrap();
        for r in 0..20 {
            let w = sample_weights(&field, window, SeedPlan::new(5, r));
            let start = StartSet::new(vec![Site::new(-1, 1), Site::new(0, 0), Site::new(2, -3)]);
            let grid = passage_times(&w, &start, window).unwrap();
            for end in [Site::new(6, 6), Site::new(3, 2), Site::new(-3, 6), Site::new(0, 0)] {
                let bf = brute_force_passage(&w, &start, end, |_| false, 1e6).unwrap();
                assert_eq!(grid.get(end).unwrap(), bf, "replica {r} end {end}");
            }
        }
    }

    #[test]
    fn path_weight_equals_time() {
        let field = RateField::Homogeneous;
        let window = Window::new(0, 30, 0, 30).unwrap();
        let w = sample_weights(&field, window, SeedPlan::new(9, 9));
        let start = StartSet::new(vec![Site::new(0, 5), Site::new(3, 0), Site::new(1, 2)]);
        let grid = passage_times(&w, &start, window).unwrap();
        let end = Site::new(30, 30);
        let path = max_path(&grid, end).unwrap();
        assert!(start.contains(path.first()));
        assert_eq!(path.last(), end);
        assert_eq!(path.weight(&w, &start).unwrap(), grid.get(end).unwrap().time().unwrap());
    }

    #[test]
    fn forbidden_sites() {
        let w = fixture_2x2();
        let a = Site::new(1, 1);
        let b = Site::new(2, 2);
        let blocked = Site::new(1, 2);
        let r = restricted_passage(&w, &StartSet::single(a), b, |s| s == blocked).unwrap();
        assert_eq!(r, Passage::Time(6.0));
        let bf = brute_force_passage(&w, &StartSet::single(a), b, |s| s == blocked, 10.0).unwrap();
        assert_eq!(r, bf);
    }

    #[test]
    fn endpoints_match_full_grid() {
        let field = RateField::Homogeneous;
        let window = Window::new(-10, 20, 0, 25).unwrap();
        let w = sample_weights(&field, window, SeedPlan::new(1, 2));
        let start = StartSet::new(vec![Site::new(-10, 0), Site::new(0, 3)]);
        let ends = [Site::new(20, 25), Site::new(5, 10), Site::new(-10, 2)];
        let grid = passage_times(&w, &start, window).unwrap();
        let e = endpoint_passages(&w, &start, window, &ends, |_| false).unwrap();
        for (k, p) in ends.iter().enumerate() {
            assert_eq!(grid.get(*p).unwrap(), e[k]);
        }
    }

    #[test]
    fn pair_sweep_matches_grids() {
        use crate::weights::SiteSampler;
        let field = RateField::two_speed(0.6).unwrap();
        let plan = SeedPlan::new(3, 4);
        let window = Window::new(-12, 12, -12, 12).unwrap();
        let w = sample_weights(&field, window, plan);
        let sampler = SiteSampler::new(field, plan);
        let a = StartSet::new(vec![Site::new(-3, 3), Site::new(-2, 2), Site::new(-1, 1)]);
        let b = StartSet::new(vec![Site::new(1, 0), Site::new(2, -2), Site::new(1, -1)]);
        let block = |s: Site| s == Site::new(0, 4);
        let ga = passage_times_avoiding(&w, &a, window, block).unwrap();
        let gb = passage_times(&w, &b, window).unwrap();
        let mut seen = 0;
        // staircase-shaped region: everything reachable lies in i + j >= 0
        sweep_pair(
            |s| sampler.at(s),
            [&a, &b],
            (block, |_| false),
            (-12, 12),
            |j| ((-j).max(-12), 12),
            |j, i0, ra, rb| {
                for (x, (va, vb)) in ra.iter().zip(rb).enumerate() {
                    let s = Site::new(i0 + x as i64, j);
                    assert_eq!(va.to_bits(), ga.get(s).unwrap().raw().to_bits(), "{s}");
                    assert_eq!(vb.to_bits(), gb.get(s).unwrap().raw().to_bits(), "{s}");
                    seen += 1;
                }
                true
            },
        );
        assert!(seen > 300);
    }

    #[test]
    fn brute_force_refuses_large() {
        let field = RateField::Homogeneous;
        let window = Window::new(0, 30, 0, 30).unwrap();
        let w = sample_weights(&field, window, SeedPlan::new(1, 2));
        let r = brute_force_passage(&w, &StartSet::single(Site::new(0, 0)), Site::new(30, 30), |_| false, 1e6);
        assert!(matches!(r, Err(LppError::TooManyPaths(_))));
    }

    #[test]
    fn coverage_error() {
        let w = fixture_2x2();
        let r = point_passage(&w, Site::new(0, 0), Site::new(2, 2));
        assert!(matches!(r, Err(LppError::Weights(WeightsError::Coverage { .. }))));
    }
}
