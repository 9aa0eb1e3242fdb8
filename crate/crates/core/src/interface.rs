//! Competition interface between two passage-time clusters.
//!
//! A site is red when `L+(p) > L-(p)`, so that the maximizer of
//! `max(L+, L-)` comes from the `+` start set, and blue when `L-(p) > L+(p)`.
//! The interface starts at the origin and steps right when the diagonal
//! neighbour `phi + (1, 1)` is red, up otherwise.

use alloc::vec::Vec;

use crate::lattice::Site;
use crate::lpp::{passage_times, sweep_pair, LppError, Passage, PassageGrid, StartSet};
use crate::weights::WeightSample;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum InterfaceError {
    #[error(transparent)]
    Lpp(#[from] LppError),
    #[error("passage times tie at {0}")]
    Tie(Site),
    #[error("interface left the computed window at step {0}")]
    LeftWindow(usize),
    #[error("time horizon must be positive")]
    BadHorizon,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Color {
    /// Won by the `+` cluster.
    Red,
    /// Won by the `-` cluster.
    Blue,
}

/// Colour of `site`; ties (including doubly unreachable sites) are errors.
pub fn color(site: Site, plus: &PassageGrid, minus: &PassageGrid) -> Result<Color, InterfaceError> {
    let a = plus.passage(site)?;
    let b = minus.passage(site)?;
    if a > b {
        Ok(Color::Red)
    } else if b > a {
        Ok(Color::Blue)
    } else {
        Err(InterfaceError::Tie(site))
    }
}

/// Interface sites `phi_0 = (0, 0), ..., phi_n` and the times
/// `tau_n = max(L+(phi_n), L-(phi_n))`.
#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceTrace {
    sites: Vec<Site>,
    times: Vec<Passage>,
}

impl InterfaceTrace {
    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn times(&self) -> &[Passage] {
        &self.times
    }

    /// Number of steps taken.
    pub fn steps(&self) -> usize {
        self.sites.len() - 1
    }

    pub fn site(&self, n: usize) -> Site {
        self.sites[n]
    }

    /// `I_n - J_n` at step `n`.
    pub fn difference(&self, n: usize) -> i64 {
        let s = self.sites[n];
        s.i - s.j
    }
}

fn trace_with<C, T>(n_max: usize, color_of: C, tau: T) -> Result<InterfaceTrace, InterfaceError>
where
    C: Fn(Site, usize) -> Result<Color, InterfaceError>,
    T: Fn(Site, usize) -> Result<Passage, InterfaceError>,
{
    let mut phi = Site::new(0, 0);
    let mut sites = Vec::with_capacity(n_max + 1);
    let mut times = Vec::with_capacity(n_max + 1);
    sites.push(phi);
    times.push(tau(phi, 0)?);
    for n in 0..n_max {
        phi = match color_of(Site::new(phi.i + 1, phi.j + 1), n)? {
            Color::Red => phi.right(),
            Color::Blue => phi.up(),
        };
        sites.push(phi);
        times.push(tau(phi, n)?);
    }
    Ok(InterfaceTrace { sites, times })
}

/// Traces `n_max` steps of the interface from two precomputed grids.
pub fn trace_from_grids(
    plus: &PassageGrid,
    minus: &PassageGrid,
    n_max: usize,
) -> Result<InterfaceTrace, InterfaceError> {
    trace_with(
        n_max,
        |diag, n| {
            if !plus.window().contains(diag) || !minus.window().contains(diag) {
                return Err(InterfaceError::LeftWindow(n));
            }
            color(diag, plus, minus)
        },
        |p, n| {
            let a = plus.get(p).ok_or(InterfaceError::LeftWindow(n))?;
            let b = minus.get(p).ok_or(InterfaceError::LeftWindow(n))?;
            Ok(if a > b { a } else { b })
        },
    )
}

/// Colours and `max(L+, L-)` on the triangle `i, j >= 0, i + j <= n`,
/// enough to trace `n - 2` interface steps. Sites the sweep did not reach
/// are unknown.
#[derive(Clone, Debug, PartialEq)]
pub struct ColorTriangle {
    n: i64,
    // 1 red, -1 blue, 0 tie, 2 unknown
    colors: Vec<i8>,
    tau: Vec<f64>,
}

impl ColorTriangle {
    fn offset(&self, site: Site) -> Option<usize> {
        let (i, j) = (site.i, site.j);
        if i < 0 || j < 0 || i + j > self.n {
            return None;
        }
        Some((j * (self.n + 1) - j * (j - 1) / 2 + i) as usize)
    }

    pub fn size(&self) -> i64 {
        self.n
    }

    /// `None` outside the triangle or where the sweep did not reach.
    pub fn color(&self, site: Site) -> Option<Result<Color, InterfaceError>> {
        self.offset(site).and_then(|k| match self.colors[k] {
            1 => Some(Ok(Color::Red)),
            -1 => Some(Ok(Color::Blue)),
            0 => Some(Err(InterfaceError::Tie(site))),
            _ => None,
        })
    }

    pub fn tau(&self, site: Site) -> Option<Passage> {
        self.offset(site).filter(|k| self.colors[*k] != 2).map(|k| Passage::from_raw(self.tau[k]))
    }

    /// Fails with [`InterfaceError::LeftWindow`] when the interface needs a
    /// site outside the computed part.
    pub fn trace(&self, n_max: usize) -> Result<InterfaceTrace, InterfaceError> {
        trace_with(
            n_max,
            |diag, n| self.color(diag).ok_or(InterfaceError::LeftWindow(n))?,
            |p, n| self.tau(p).ok_or(InterfaceError::LeftWindow(n)),
        )
    }
}

/// Builds the colour triangle of size `n` in one [`sweep_pair`] over the
/// region `rows`/`cols`, which must contain every site feeding into the
/// part of the triangle it covers. `forbidden` bars sites for the `+` and
/// `-` recursions.
pub fn color_triangle<W, C, F, G>(
    weight: W,
    start_plus: &StartSet,
    start_minus: &StartSet,
    forbidden: (F, G),
    rows: (i64, i64),
    cols: C,
    n: i64,
) -> Result<ColorTriangle, InterfaceError>
where
    W: Fn(Site) -> f64,
    C: Fn(i64) -> (i64, i64),
    F: Fn(Site) -> bool,
    G: Fn(Site) -> bool,
{
    if n < 0 {
        return Err(InterfaceError::BadHorizon);
    }
    let size = ((n + 1) * (n + 2) / 2) as usize;
    let mut tri = ColorTriangle { n, colors: alloc::vec![2; size], tau: alloc::vec![f64::NAN; size] };
    let rows = (rows.0, rows.1.min(n));
    sweep_pair(weight, [start_plus, start_minus], forbidden, rows, cols, |j, i0, ra, rb| {
        if j < 0 {
            return true;
        }
        let lo = i0.max(0);
        let hi = (i0 + ra.len() as i64 - 1).min(n - j);
        let base = tri.offset(Site::new(0, j)).expect("row in triangle");
        for i in lo..=hi {
            let (a, b) = (ra[(i - i0) as usize], rb[(i - i0) as usize]);
            tri.colors[base + i as usize] = if a > b { 1 } else if b > a { -1 } else { 0 };
            tri.tau[base + i as usize] = if a > b { a } else { b };
        }
        true
    });
    Ok(tri)
}

/// Computes both grids over the sampled window and traces the interface.
pub fn trace_interface(
    weights: &WeightSample,
    start_plus: &StartSet,
    start_minus: &StartSet,
    n_max: usize,
) -> Result<InterfaceTrace, InterfaceError> {
    let plus = passage_times(weights, start_plus, weights.window())?;
    let minus = passage_times(weights, start_minus, weights.window())?;
    trace_from_grids(&plus, &minus, n_max)
}

/// Checks that on anti-diagonal `n` every site left of `phi_n` is red and
/// every site right of it is blue.
pub fn antidiagonal_split_holds(
    trace: &InterfaceTrace,
    plus: &PassageGrid,
    minus: &PassageGrid,
    n: usize,
) -> Result<bool, InterfaceError> {
    let phi = trace.site(n);
    let n = n as i64;
    for k in 0..=n {
        if k == phi.i {
            continue;
        }
        let c = color(Site::new(k, n - k), plus, minus)?;
        let want = if k < phi.i { Color::Red } else { Color::Blue };
        if c != want {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The three nested events relating the interface to colours on one
/// anti-diagonal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TranslationEvents {
    /// `(M, n - M)` is blue.
    pub lower: bool,
    /// `I_n <= M`.
    pub middle: bool,
    /// `(M + 1, n - M - 1)` is blue.
    pub upper: bool,
}

impl TranslationEvents {
    pub fn sandwich_holds(&self) -> bool {
        (!self.lower || self.middle) && (!self.middle || self.upper)
    }
}

/// Evaluates the events for `0 <= m < n`.
pub fn event_translation_check(
    trace: &InterfaceTrace,
    plus: &PassageGrid,
    minus: &PassageGrid,
    m: i64,
    n: usize,
) -> Result<TranslationEvents, InterfaceError> {
    let nn = n as i64;
    assert!((0..nn).contains(&m), "need 0 <= m < n");
    Ok(TranslationEvents {
        lower: color(Site::new(m, nn - m), plus, minus)? == Color::Blue,
        middle: trace.site(n).i <= m,
        upper: color(Site::new(m + 1, nn - m - 1), plus, minus)? == Color::Blue,
    })
}

/// Centering and scaling applied to `I_t - J_t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Centering {
    /// `(D - (alpha - 1) t) / t^(1/3)`.
    TwoSpeed { alpha: f64 },
    /// `(D + t (1 - eta0) / (1 + eta0) - 2 u t^(1/3) / (1 + eta0)^(4/3)) / t^(1/3)`.
    Shock { eta0: f64, u: f64 },
    /// `(D + t (1 - eta) / (1 + eta)) / t^(1/2)`.
    Diffusive { eta: f64 },
}

/// Rescaled interface position `I_t - J_t` at step `floor(t)`.
pub fn interface_statistic(
    trace: &InterfaceTrace,
    t: f64,
    centering: Centering,
) -> Result<f64, InterfaceError> {
    if !(t >= 1.0) {
        return Err(InterfaceError::BadHorizon);
    }
    let n = libm::floor(t) as usize;
    if n > trace.steps() {
        return Err(InterfaceError::LeftWindow(trace.steps()));
    }
    Ok(rescale_difference(trace.difference(n) as f64, t, centering))
}

/// Same rescaling applied to a raw difference `I - J`.
pub fn rescale_difference(d: f64, t: f64, centering: Centering) -> f64 {
    let c3 = libm::cbrt(t);
    match centering {
        Centering::TwoSpeed { alpha } => (d - (alpha - 1.0) * t) / c3,
        Centering::Shock { eta0, u } => {
            (d + t * (1.0 - eta0) / (1.0 + eta0)
                - 2.0 * u * c3 / libm::pow(1.0 + eta0, 4.0 / 3.0))
                / c3
        }
        Centering::Diffusive { eta } => (d + t * (1.0 - eta) / (1.0 + eta)) / libm::sqrt(t),
    }
}
