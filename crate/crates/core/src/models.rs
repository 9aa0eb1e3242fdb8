//! The concrete LPP models and their per-replica observables.
//!
//! Every function here is a pure function of its parameters and a
//! [`SeedPlan`], so replicas can run in any order or in parallel.

use alloc::vec::Vec;

use rand::Rng;

use crate::interface::{color_triangle, rescale_difference, Centering, InterfaceError, InterfaceTrace};
use crate::lattice::{Site, Window};
use crate::lpp::{
    endpoint_passages, max_path, passage_times, path_hits, staircase_from_config, sweep_pair, Half,
    LppError, Passage, StartSet,
};
use crate::tasep::{evolve_from_weights, simulate_events, ParticleConfig, TasepError};
use crate::twdist::{point_to_point_constants, BernoulliLawParams, MultipointLawParams, ShockLawParams};
use crate::weights::{sample_weights, RateField, SeedPlan, SiteSampler, WeightsError};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Weights(#[from] WeightsError),
    #[error(transparent)]
    Lpp(#[from] LppError),
    #[error(transparent)]
    Interface(#[from] InterfaceError),
    #[error(transparent)]
    Tasep(#[from] TasepError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

fn floor_i(x: f64) -> i64 {
    libm::floor(x) as i64
}

fn horizon(t: f64) -> Result<usize, ModelError> {
    if !(t >= 1.0 && t.is_finite()) {
        return Err(ModelError::InvalidParameter("t must be at least 1"));
    }
    Ok(libm::floor(t) as usize)
}

fn never(_: Site) -> bool {
    false
}

/// Particles `x_k = -2k` for `k != 0` and `x_0 = 1`, rate `alpha` for
/// labels `k <= 0`; `+` start set from `k > 0`, `-` from `k <= 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoSpeedModel {
    pub alpha: f64,
    field: RateField,
}

/// Position of particle `k` in the two-speed initial condition.
pub fn two_speed_position(k: i64) -> i64 {
    if k == 0 {
        1
    } else {
        -2 * k
    }
}

impl TwoSpeedModel {
    pub fn new(alpha: f64) -> Result<Self, ModelError> {
        Ok(Self { alpha, field: RateField::two_speed(alpha)? })
    }

    pub fn field(&self) -> RateField {
        self.field
    }

    pub fn constants(&self) -> ShockLawParams {
        ShockLawParams::new(self.alpha).expect("alpha checked")
    }

    /// Start sets from the labels `|k| <= k_bound`.
    pub fn start_sets(&self, k_bound: i64) -> (StartSet, StartSet) {
        let cfg: Vec<(i64, i64)> = (-k_bound..=k_bound).map(|k| (k, two_speed_position(k))).collect();
        (
            staircase_from_config(&cfg, Half::Positive, k_bound).expect("decreasing"),
            staircase_from_config(&cfg, Half::NonPositive, k_bound).expect("decreasing"),
        )
    }

    /// Interface up to step `n`, using start labels `|k| <= k_bound`.
    /// Both start sets lie on `i + j = 0` (plus `(1, 0)`), so only the band
    /// `0 <= i + j <= n + 1` matters and labels beyond `n + 1` never reach
    /// it: any `k_bound >= n + 1` gives the exact interface.
    pub fn trace(&self, plan: SeedPlan, n: usize, k_bound: i64) -> Result<InterfaceTrace, ModelError> {
        self.trace_capped(plan, n, k_bound, None)
    }

    /// As [`trace`](Self::trace) with the sweep cut to columns `<= cap.0`
    /// and rows `<= cap.1`. Every site below-left of the cut is still
    /// exact; the trace fails if the interface reaches beyond it.
    fn trace_capped(
        &self,
        plan: SeedPlan,
        n: usize,
        k_bound: i64,
        cap: Option<(i64, i64)>,
    ) -> Result<InterfaceTrace, ModelError> {
        let size = n as i64 + 1;
        let (ci, cj) = cap.unwrap_or((size, size));
        let (sp, sm) = self.start_sets(k_bound);
        let sampler = SiteSampler::new(self.field, plan);
        let bottom = -k_bound.min(size).min(ci.max(0));
        let tri = color_triangle(
            |s| sampler.at(s),
            &sp,
            &sm,
            (never, never),
            (bottom, cj.min(size)),
            |j| (-j, (if j < 0 { size } else { size - j }).min(ci)),
            size,
        )?;
        Ok(tri.trace(n)?)
    }

    /// `I_n - J_n` at `n = floor(t)`. The sweep is first cut a margin of
    /// `margin_units * n^(1/3)` sites beyond the typical endpoint
    /// `(alpha n / 2, (1 - alpha / 2) n)` and redone over the whole band if
    /// the interface leaves the cut region, so the result is always exact.
    pub fn difference(&self, plan: SeedPlan, t: f64) -> Result<i64, ModelError> {
        self.difference_with_margin(plan, t, 12.0)
    }

    fn difference_with_margin(&self, plan: SeedPlan, t: f64, margin_units: f64) -> Result<i64, ModelError> {
        let n = horizon(t)?;
        let nf = n as f64;
        let m = margin_units * libm::cbrt(nf);
        let cap = (
            libm::ceil(self.alpha * nf / 2.0 + m) as i64,
            libm::ceil((1.0 - self.alpha / 2.0) * nf + m) as i64,
        );
        let k = n as i64 + 1;
        let tr = match self.trace_capped(plan, n, k, Some(cap)) {
            Err(ModelError::Interface(InterfaceError::LeftWindow(_))) => self.trace(plan, n, k)?,
            other => other?,
        };
        Ok(tr.difference(n))
    }

    /// `(I_t - J_t - (alpha - 1) t) / t^(1/3)`.
    pub fn statistic(&self, d: i64, t: f64) -> f64 {
        rescale_difference(d as f64, t, Centering::TwoSpeed { alpha: self.alpha })
    }

    /// Endpoint `(eta0 t, t)` of the characteristic through the shock and
    /// the point `E+ = (eta0 t - kappa t^nu, t - t^nu)` on the `+`
    /// characteristic. Starting from the anti-diagonal with unit rates the
    /// characteristic is the diagonal, so `kappa = 1` and
    /// `L(E+ -> E) ~ mu0 t^nu` with `mu0 = 4`.
    pub fn decorrelation_points(&self, t: f64, nu: f64) -> (Site, Site) {
        let eta0 = self.constants().eta0;
        let tn = libm::pow(t, nu);
        let e = Site::new(floor_i(eta0 * t), floor_i(t));
        let ep = Site::new(floor_i(eta0 * t - SLOW_KAPPA * tn), floor_i(t - tn));
        (ep, e)
    }

    /// Gap `(L(L+ -> E) - L(L+ -> E+) - L(E+ -> E)) / t^(1/3)`, nonnegative
    /// by superadditivity.
    pub fn decorrelation_gap(&self, plan: SeedPlan, t: f64, nu: f64) -> Result<DecorrelationGap, ModelError> {
        if !(nu > 1.0 / 3.0 && nu < 1.0) {
            return Err(ModelError::InvalidParameter("nu must lie in (1/3, 1)"));
        }
        horizon(t)?;
        let (ep, e) = self.decorrelation_points(t, nu);
        if ep.j < 1 || !ep.precedes(e) {
            return Err(ModelError::InvalidParameter("t too small for the chosen nu"));
        }
        let (sp, _) = self.start_sets(e.j);
        let to_ep = StartSet::single(ep);
        let sampler = SiteSampler::new(self.field, plan);
        let (mut l_e, mut l_ep, mut l_ep_e) = (f64::NAN, f64::NAN, f64::NAN);
        sweep_pair(
            |s| sampler.at(s),
            [&sp, &to_ep],
            (never, never),
            (1, e.j),
            |j| (-j, e.i),
            |j, i0, ra, rb| {
                if j == ep.j {
                    l_ep = ra[(ep.i - i0) as usize];
                }
                if j == e.j {
                    l_e = ra[(e.i - i0) as usize];
                    l_ep_e = rb[(e.i - i0) as usize];
                }
                true
            },
        );
        let c3 = libm::cbrt(t);
        let path_len = (e.i + 2 * e.j + 2) as f64;
        Ok(DecorrelationGap {
            gap: (l_e - l_ep - l_ep_e) / c3,
            bulk: (l_ep_e - SLOW_MU0 * libm::pow(t, nu)) / libm::pow(t, nu / 3.0),
            rounding: path_len * f64::EPSILON * l_e.abs() / c3,
        })
    }
}

/// Slope of the `+` characteristic in the two-speed model.
pub const SLOW_KAPPA: f64 = 1.0;
/// Growth rate of `L(E+ -> E)` per unit of `t^nu`.
pub const SLOW_MU0: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecorrelationGap {
    /// `(L(L+ -> E) - L(L+ -> E+) - L(E+ -> E)) / t^(1/3)`.
    pub gap: f64,
    /// `(L(E+ -> E) - mu0 t^nu) / t^(nu/3)`.
    pub bulk: f64,
    /// Bound on the floating-point error of `gap`: the three times sum
    /// the same weights in different orders, so a maximizer through `E+`
    /// can leave a gap of either sign below this size.
    pub rounding: f64,
}

/// Product Bernoulli initial data: boundary weights on the axes and a
/// single start at the origin. The `+` cluster leaves the origin upwards
/// (paths barred from `(1, 0)`) and the `-` cluster rightwards (barred
/// from `(0, 1)`), so each includes its first boundary weight and the
/// two clusters cannot tie at `(1, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BernoulliModel {
    pub params: BernoulliLawParams,
    field: RateField,
}

impl BernoulliModel {
    pub fn new(rho_minus: f64, rho_plus: f64) -> Result<Self, ModelError> {
        let field = RateField::bernoulli_boundary(rho_minus, rho_plus)?;
        let params = BernoulliLawParams::new(rho_minus, rho_plus)
            .map_err(|_| ModelError::InvalidParameter("need 0 < rho_minus < rho_plus < 1"))?;
        Ok(Self { params, field })
    }

    pub fn field(&self) -> RateField {
        self.field
    }

    pub fn trace(&self, plan: SeedPlan, n: usize) -> Result<InterfaceTrace, ModelError> {
        self.trace_capped(plan, n, None)
    }

    fn trace_capped(&self, plan: SeedPlan, n: usize, cap: Option<(i64, i64)>) -> Result<InterfaceTrace, ModelError> {
        let size = n as i64 + 1;
        let (ci, cj) = cap.unwrap_or((size, size));
        let origin = StartSet::single(Site::new(0, 0));
        let sampler = SiteSampler::new(self.field, plan);
        let tri = color_triangle(
            |s| sampler.at(s),
            &origin,
            &origin,
            (|s: Site| s == Site::new(1, 0), |s: Site| s == Site::new(0, 1)),
            (0, cj.min(size)),
            |j| (0, (size - j).min(ci)),
            size,
        )?;
        Ok(tri.trace(n)?)
    }

    /// `I_n - J_n` at `n = floor(t)`, first over a region cut a margin of
    /// `margin_units` standard deviations beyond the typical endpoint and
    /// redone over the whole triangle if the interface leaves it.
    pub fn difference(&self, plan: SeedPlan, t: f64) -> Result<i64, ModelError> {
        self.difference_with_margin(plan, t, 8.0)
    }

    fn difference_with_margin(&self, plan: SeedPlan, t: f64, margin_units: f64) -> Result<i64, ModelError> {
        let n = horizon(t)?;
        let nf = n as f64;
        let p = &self.params;
        let sd_u = libm::sqrt(p.v_plus + p.v_minus) / (p.m_minus - p.m_plus);
        let m = margin_units * sd_u * libm::sqrt(nf) / libm::pow(1.0 + p.eta, 1.5) + 10.0;
        let cap = (libm::ceil(nf / (1.0 + p.eta) + m) as i64, libm::ceil(nf * p.eta / (1.0 + p.eta) + m) as i64);
        let tr = match self.trace_capped(plan, n, Some(cap)) {
            Err(ModelError::Interface(InterfaceError::LeftWindow(_))) => self.trace(plan, n)?,
            other => other?,
        };
        Ok(tr.difference(n))
    }

    /// `U` with `I_t - J_t = -t (1 - eta) / (1 + eta) + 2 U t^(1/2) / (1 + eta)^(3/2)`.
    pub fn statistic(&self, d: i64, t: f64) -> f64 {
        let eta = self.params.eta;
        rescale_difference(d as f64, t, Centering::Diffusive { eta }) * libm::pow(1.0 + eta, 1.5) / 2.0
    }

    /// Rescaled `(L(L+ -> p) - t / (rho+ rho-)) / t^(1/2)` and the same for
    /// `L-`, at `p = (eta t + u t^(1/2), t)` for each `u`, with the start
    /// sets `{(0, 1)}` and `{(1, 0)}`.
    pub fn marginals(&self, plan: SeedPlan, t: f64, u: &[f64]) -> Result<(Vec<f64>, Vec<f64>), ModelError> {
        horizon(t)?;
        let top = floor_i(t);
        let sq = libm::sqrt(t);
        let ends: Vec<Site> = u.iter().map(|u| Site::new(floor_i(self.params.eta * t + u * sq), top)).collect();
        if ends.iter().any(|p| p.i < 1) {
            return Err(ModelError::InvalidParameter("endpoint left of the boundary"));
        }
        let right = ends.iter().map(|p| p.i).max().unwrap_or(1);
        let sampler = SiteSampler::new(self.field, plan);
        let plus = StartSet::single(Site::new(0, 1));
        let minus = StartSet::single(Site::new(1, 0));
        let (mut a, mut b) = (alloc::vec![0.0; ends.len()], alloc::vec![0.0; ends.len()]);
        sweep_pair(|s| sampler.at(s), [&plus, &minus], (never, never), (0, top), |_| (0, right), |j, i0, ra, rb| {
            if j == top {
                for (k, p) in ends.iter().enumerate() {
                    a[k] = ra[(p.i - i0) as usize];
                    b[k] = rb[(p.i - i0) as usize];
                }
            }
            true
        });
        let centre = t / (self.params.rho_plus * self.params.rho_minus);
        let resc = |v: Vec<f64>| v.into_iter().map(|x| (x - centre) / sq).collect();
        Ok((resc(a), resc(b)))
    }
}

/// Point-to-point model with `L+ = (floor(-beta t), 0)`,
/// `L- = (0, floor(-beta t))` and endpoints `P_k = (t + u_k t^(1/3), t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultipointModel {
    pub params: MultipointLawParams,
    pub t: f64,
    pub u: Vec<f64>,
}

/// Rescaled passage times at the endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct MultipointSample {
    /// `(L(L+ -> P_k) - mu t) / t^(1/3)`.
    pub plus: Vec<f64>,
    /// `(L(L- -> P_k) - mu t) / t^(1/3)`.
    pub minus: Vec<f64>,
}

impl MultipointSample {
    /// `(L(L -> P_k) - mu t) / t^(1/3)` for the union start set.
    pub fn joint(&self) -> Vec<f64> {
        self.plus.iter().zip(&self.minus).map(|(a, b)| a.max(*b)).collect()
    }
}

impl MultipointModel {
    pub fn new(beta: f64, t: f64, u: Vec<f64>) -> Result<Self, ModelError> {
        let params =
            MultipointLawParams::new(beta).map_err(|_| ModelError::InvalidParameter("beta must be positive"))?;
        horizon(t)?;
        if u.is_empty() || u.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ModelError::InvalidParameter("u must be nonempty and strictly increasing"));
        }
        let m = Self { params, t, u };
        if m.endpoints().iter().any(|p| p.i < 1) {
            return Err(ModelError::InvalidParameter("endpoints must lie right of the axis"));
        }
        Ok(m)
    }

    fn corner(&self) -> i64 {
        floor_i(-self.params.beta * self.t)
    }

    pub fn start_plus(&self) -> Site {
        Site::new(self.corner(), 0)
    }

    pub fn start_minus(&self) -> Site {
        Site::new(0, self.corner())
    }

    pub fn endpoints(&self) -> Vec<Site> {
        let c3 = libm::cbrt(self.t);
        self.u.iter().map(|u| Site::new(floor_i(self.t + u * c3), floor_i(self.t))).collect()
    }

    fn right(&self) -> i64 {
        self.endpoints().iter().map(|p| p.i).max().expect("nonempty")
    }

    pub fn sample(&self, plan: SeedPlan) -> MultipointSample {
        let ends = self.endpoints();
        let top = floor_i(self.t);
        let (c, right) = (self.corner(), self.right());
        let sampler = SiteSampler::new(RateField::Homogeneous, plan);
        let plus = StartSet::single(self.start_plus());
        let minus = StartSet::single(self.start_minus());
        let (mut a, mut b) = (alloc::vec![0.0; ends.len()], alloc::vec![0.0; ends.len()]);
        sweep_pair(
            |s| sampler.at(s),
            [&plus, &minus],
            (never, never),
            (c, top),
            |j| (if j < 0 { 0 } else { c }, right),
            |j, i0, ra, rb| {
                if j == top {
                    for (k, p) in ends.iter().enumerate() {
                        a[k] = ra[(p.i - i0) as usize];
                        b[k] = rb[(p.i - i0) as usize];
                    }
                }
                true
            },
        );
        let (mu, c3) = (self.params.mu * self.t, libm::cbrt(self.t));
        let resc = |v: Vec<f64>| v.into_iter().map(|x| (x - mu) / c3).collect();
        MultipointSample { plus: resc(a), minus: resc(b) }
    }

    /// `gamma_0 = 1 - t^(nu - 1) (1 + beta / 2)`.
    pub fn gamma_max(&self, nu: f64) -> f64 {
        1.0 - libm::pow(self.t, nu - 1.0) * (1.0 + self.params.beta / 2.0)
    }

    /// Lattice points `D_gamma = (floor(gamma a), floor(gamma t))` with
    /// `a = t + u_m t^(1/3)` over `gamma in [0, gamma_0]`, sorted.
    pub fn d_sites(&self, nu: f64) -> Vec<Site> {
        d_gamma_sites(self.t + self.u[self.u.len() - 1] * libm::cbrt(self.t), self.t, self.gamma_max(nu))
    }

    /// `E_k+ = (t - t^nu (1 + beta) + u_k t^(1/3) - u_k t^(nu - 2/3), t - t^nu)`.
    pub fn e_plus(&self, nu: f64) -> Vec<Site> {
        let (t, b) = (self.t, self.params.beta);
        let tn = libm::pow(t, nu);
        self.u
            .iter()
            .map(|u| {
                Site::new(
                    floor_i(t - tn * (1.0 + b) + u * libm::cbrt(t) - u * libm::pow(t, nu - 2.0 / 3.0)),
                    floor_i(t - tn),
                )
            })
            .collect()
    }

    /// Whether the maximizers `L+ -> E_k+` and `L- -> P_k` touch the `D`
    /// set, and whether avoiding `D` leaves the passage times unchanged on
    /// the replicas where they do not.
    pub fn crossing(&self, plan: SeedPlan, nu: f64) -> Result<CrossingOutcome, ModelError> {
        if !(nu > 1.0 / 3.0 && nu < 1.0) {
            return Err(ModelError::InvalidParameter("nu must lie in (1/3, 1)"));
        }
        let d = self.d_sites(nu);
        let in_d = |s: Site| d.binary_search_by_key(&(s.i, s.j), |p| (p.i, p.j)).is_ok();
        let top = floor_i(self.t);
        let (c, right) = (self.corner(), self.right());
        let mut out = CrossingOutcome::default();

        let wp = Window::new(c, right, 0, top).expect("nonempty");
        let weights = sample_weights(&RateField::Homogeneous, wp, plan);
        let sp = StartSet::single(self.start_plus());
        let grid = passage_times(&weights, &sp, wp)?;
        let targets = self.e_plus(nu);
        for e in &targets {
            out.plus_hits |= path_hits(&max_path(&grid, *e)?, in_d);
        }
        if !out.plus_hits {
            let r = endpoint_passages(&weights, &sp, wp, &targets, in_d)?;
            for (k, e) in targets.iter().enumerate() {
                out.restricted_mismatches += usize::from(r[k] != grid.passage(*e)?);
            }
        }
        drop(grid);

        let wm = Window::new(0, right, c, top).expect("nonempty");
        let weights = sample_weights(&RateField::Homogeneous, wm, plan);
        let sm = StartSet::single(self.start_minus());
        let grid = passage_times(&weights, &sm, wm)?;
        let targets = self.endpoints();
        for p in &targets {
            out.minus_hits |= path_hits(&max_path(&grid, *p)?, in_d);
        }
        if !out.minus_hits {
            let r = endpoint_passages(&weights, &sm, wm, &targets, in_d)?;
            for (k, p) in targets.iter().enumerate() {
                out.restricted_mismatches += usize::from(r[k] != grid.passage(*p)?);
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CrossingOutcome {
    pub plus_hits: bool,
    pub minus_hits: bool,
    /// Endpoints where the `D`-avoiding time differs from the free one
    /// although no maximizer touched `D`.
    pub restricted_mismatches: usize,
}

impl CrossingOutcome {
    pub fn crossed(&self) -> bool {
        self.plus_hits || self.minus_hits
    }
}

/// `{(floor(gamma a), floor(gamma b)) : 0 <= gamma <= gamma_max}` for
/// `a >= b > 0`, sorted by `(i, j)`.
pub fn d_gamma_sites(a: f64, b: f64, gamma_max: f64) -> Vec<Site> {
    let mut out = Vec::new();
    if !(gamma_max >= 0.0) {
        return out;
    }
    let jmax = floor_i(gamma_max * b);
    for j in 0..=jmax {
        // gamma ranges over [j / b, (j + 1) / b) within [0, gamma_max]
        let g0 = j as f64 / b;
        let lo = floor_i(g0 * a);
        let g1 = (j + 1) as f64 / b;
        let hi = if g1 > gamma_max { floor_i(gamma_max * a) } else { libm::ceil(g1 * a) as i64 - 1 };
        for i in lo..=hi.max(lo) {
            out.push(Site::new(i, j));
        }
    }
    out.sort_by_key(|s| (s.i, s.j));
    out.dedup();
    out
}

/// Single-source point-to-point times from the origin with unit rates.
fn origin_passages(plan: SeedPlan, ends: &[Site]) -> Vec<f64> {
    let top = ends.iter().map(|p| p.j).max().unwrap_or(0);
    let right = ends.iter().map(|p| p.i).max().unwrap_or(0);
    let sampler = SiteSampler::new(RateField::Homogeneous, plan);
    let origin = StartSet::single(Site::new(0, 0));
    let empty = StartSet::default();
    let mut out = alloc::vec![f64::NEG_INFINITY; ends.len()];
    sweep_pair(|s| sampler.at(s), [&origin, &empty], (never, never), (0, top), |_| (0, right), |j, _, ra, _| {
        for (k, p) in ends.iter().enumerate() {
            if p.j == j && p.i >= 0 {
                out[k] = ra[p.i as usize];
            }
        }
        true
    });
    out
}

/// `(L(0 -> (eta l, l)) - mu l) / l^(1/3)` with `mu = (1 + sqrt(eta))^2`.
pub fn point_to_point_sample(plan: SeedPlan, eta: f64, l: f64) -> Result<f64, ModelError> {
    if !(eta > 0.0) {
        return Err(ModelError::InvalidParameter("eta must be positive"));
    }
    horizon(l)?;
    let (mu, _) = point_to_point_constants(eta);
    let end = Site::new(floor_i(eta * l), floor_i(l));
    Ok((origin_passages(plan, &[end])[0] - mu * l) / libm::cbrt(l))
}

/// `(L(0 -> (s t + u t^(1/3), t)) - mu_s u t^(1/3) - L(0 -> (s t, t))) / t^(1/3)`
/// with `mu_s = 1 + s^(-1/2)`.
pub fn local_increment(plan: SeedPlan, s: f64, u: f64, t: f64) -> Result<f64, ModelError> {
    if !(s > 0.0) {
        return Err(ModelError::InvalidParameter("s must be positive"));
    }
    horizon(t)?;
    let c3 = libm::cbrt(t);
    let a = Site::new(floor_i(s * t), floor_i(t));
    let b = Site::new(floor_i(s * t + u * c3), floor_i(t));
    if b.i < 0 {
        return Err(ModelError::InvalidParameter("endpoint left of the origin"));
    }
    let v = origin_passages(plan, &[a, b]);
    Ok((v[1] - (1.0 + 1.0 / libm::sqrt(s)) * u * c3 - v[0]) / c3)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CorrespondenceOutcome {
    pub probes: usize,
    pub violations: usize,
    /// Sites where the tandem recursion, the event simulation and the LPP
    /// grid disagree.
    pub table_mismatches: usize,
}

/// Checks `{x_n(t) >= m - n} = {L(m, n) <= t}` at `probes` random
/// `(m, n, t)` on a `size x size` window of the two-speed TASEP, with the
/// positions taken from the event-driven simulation.
pub fn correspondence_probe(
    alpha: f64,
    size: i64,
    probes: usize,
    plan: SeedPlan,
) -> Result<CorrespondenceOutcome, ModelError> {
    if size < 2 {
        return Err(ModelError::InvalidParameter("window size must be at least 2"));
    }
    let model = TwoSpeedModel::new(alpha)?;
    let lo = -(size / 2) + 1;
    let labels: Vec<i64> = (lo..lo + size).collect();
    let config = ParticleConfig::new(
        lo,
        labels.iter().map(|&k| two_speed_position(k)).collect(),
        labels.iter().map(|&k| model.field().rate_at(Site::new(0, k)).expect("exponential")).collect(),
    )?;
    let start = config.staircase();
    let i0 = start.points().iter().map(|p| p.i).min().expect("nonempty");
    let window = Window::new(i0, i0 + size - 1, lo, lo + size - 1).expect("nonempty");
    let weights = sample_weights(&model.field(), window, plan);
    let grid = passage_times(&weights, &start, window)?;
    let run = simulate_events(&config, &weights, window)?;
    let table = evolve_from_weights(&config, &weights, window)?;
    let mut out = CorrespondenceOutcome::default();
    for (k, v) in grid.raw().iter().enumerate() {
        let same = |x: f64| x.to_bits() == v.to_bits();
        out.table_mismatches += usize::from(!same(table.raw()[k]) || !same(run.table().raw()[k]));
    }
    let horizon = grid.raw().iter().copied().filter(|x| x.is_finite()).fold(0.0, f64::max);
    let mut rng = plan.stream(0x636f_7272);
    for p in 0..probes {
        let m = rng.random_range(i0..=i0 + size - 1);
        let n = rng.random_range(lo..=lo + size - 1);
        let t = match p % 3 {
            0 => 0.0,
            // exactly at some passage time, where the right-continuity
            // conventions of both sides meet
            1 => {
                let s = Site::new(rng.random_range(i0..=i0 + size - 1), rng.random_range(lo..=lo + size - 1));
                grid.passage(s)?.time().unwrap_or(0.0)
            }
            _ => rng.random::<f64>() * 1.2 * horizon,
        };
        let occupied_beyond = run.position(n, t).expect("label in window") >= m - n;
        let reached = grid.passage(Site::new(m, n))? <= Passage::Time(t);
        out.probes += 1;
        out.violations += usize::from(occupied_beyond != reached);
    }
    Ok(out)
}
