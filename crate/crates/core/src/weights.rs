//! Site weights: rate fields, per-site laws and reproducible sampling.
//!
//! Every site draws from its own counter-based stream keyed by
//! `(master_seed, replica, site)`, so two windows sampled under the same
//! [`SeedPlan`] agree on every site they share.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rand_distr::{Distribution, Exp1};

use crate::lattice::{Site, Window};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum WeightsError {
    #[error("invalid rate parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("window {requested} is not covered by the sampled window {sampled}")]
    Coverage { requested: Window, sampled: Window },
    #[error("value count {got} does not match window size {expected}")]
    Shape { expected: usize, got: usize },
}

/// Law of a single site weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SiteLaw {
    /// Exponential with the given rate (mean `1 / rate`).
    Exponential { rate: f64 },
    /// Deterministic zero.
    Zero,
}

impl SiteLaw {
    pub fn mean(&self) -> f64 {
        match *self {
            SiteLaw::Exponential { rate } => 1.0 / rate,
            SiteLaw::Zero => 0.0,
        }
    }
}

/// Assignment of a law to every site of the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RateField {
    /// Rate 1 everywhere.
    Homogeneous,
    /// Rate 1 on rows `j > 0`, rate `alpha` on rows `j <= 0`.
    TwoSpeed { alpha: f64 },
    /// Zero at the origin, rate `rho_minus` on `{0} x [1, inf)`, rate
    /// `1 - rho_plus` on `[1, inf) x {0}`, rate 1 elsewhere.
    BernoulliBoundary { rho_minus: f64, rho_plus: f64 },
}

fn open_unit(x: f64) -> bool {
    x > 0.0 && x < 1.0
}

impl RateField {
    pub fn two_speed(alpha: f64) -> Result<Self, WeightsError> {
        if !open_unit(alpha) {
            return Err(WeightsError::InvalidParameter("alpha must lie in (0, 1)"));
        }
        Ok(RateField::TwoSpeed { alpha })
    }

    pub fn bernoulli_boundary(rho_minus: f64, rho_plus: f64) -> Result<Self, WeightsError> {
        if !open_unit(rho_minus) || !open_unit(rho_plus) {
            return Err(WeightsError::InvalidParameter("densities must lie in (0, 1)"));
        }
        if rho_minus >= rho_plus {
            return Err(WeightsError::InvalidParameter("a shock needs rho_minus < rho_plus"));
        }
        Ok(RateField::BernoulliBoundary { rho_minus, rho_plus })
    }

    pub fn law_at(&self, site: Site) -> SiteLaw {
        match *self {
            RateField::Homogeneous => SiteLaw::Exponential { rate: 1.0 },
            RateField::TwoSpeed { alpha } => SiteLaw::Exponential {
                rate: if site.j > 0 { 1.0 } else { alpha },
            },
            RateField::BernoulliBoundary { rho_minus, rho_plus } => match (site.i, site.j) {
                (0, 0) => SiteLaw::Zero,
                (0, j) if j >= 1 => SiteLaw::Exponential { rate: rho_minus },
                (i, 0) if i >= 1 => SiteLaw::Exponential { rate: 1.0 - rho_plus },
                _ => SiteLaw::Exponential { rate: 1.0 },
            },
        }
    }

    /// Rate of the exponential law at `site`; `None` for deterministic sites.
    pub fn rate_at(&self, site: Site) -> Option<f64> {
        match self.law_at(site) {
            SiteLaw::Exponential { rate } => Some(rate),
            SiteLaw::Zero => None,
        }
    }
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn site_code(site: Site) -> u64 {
    ((site.i as u32 as u64) << 32) | (site.j as u32 as u64)
}

/// Master seed and replica index. All randomness of one replica derives
/// from this pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeedPlan {
    pub master_seed: u64,
    pub replica: u64,
}

impl SeedPlan {
    pub const fn new(master_seed: u64, replica: u64) -> Self {
        Self { master_seed, replica }
    }

    /// 64-bit key of this replica.
    pub fn key(&self) -> u64 {
        mix64(mix64(self.master_seed ^ GOLDEN).wrapping_add(mix64(self.replica.wrapping_mul(GOLDEN) ^ 0x5851_f42d_4c95_7f2d)))
    }

    /// Independent generator for the weight at `site`.
    pub fn site_rng(&self, site: Site) -> SiteRng {
        SiteRng { state: self.key() ^ site_code(site) }
    }

    /// Sequential generator for auxiliary randomness; `purpose` separates
    /// streams of the same replica.
    pub fn stream(&self, purpose: u64) -> ChaCha8Rng {
        let mut seed = [0u8; 32];
        let a = self.key();
        let b = mix64(a ^ mix64(purpose.wrapping_add(GOLDEN)));
        for (k, w) in [a, b, mix64(b), mix64(a.wrapping_add(b))].iter().enumerate() {
            seed[8 * k..8 * k + 8].copy_from_slice(&w.to_le_bytes());
        }
        ChaCha8Rng::from_seed(seed)
    }
}

/// SplitMix64 stream for single-site draws, seeded with the replica key
/// xored with the site code.
#[derive(Clone, Debug)]
pub struct SiteRng {
    state: u64,
}

impl RngCore for SiteRng {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let v = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&v[..chunk.len()]);
        }
    }
}

/// Draws the weight of `site` under `plan`.
#[inline]
pub fn sample_site(field: &RateField, plan: &SeedPlan, site: Site) -> f64 {
    match field.law_at(site) {
        SiteLaw::Zero => 0.0,
        SiteLaw::Exponential { rate } => {
            let e: f64 = Exp1.sample(&mut plan.site_rng(site));
            e / rate
        }
    }
}

/// Per-replica sampler that draws site weights on demand. Agrees bitwise
/// with [`sample_site`] and [`sample_weights`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SiteSampler {
    field: RateField,
    key: u64,
}

impl SiteSampler {
    pub fn new(field: RateField, plan: SeedPlan) -> Self {
        Self { field, key: plan.key() }
    }

    #[inline]
    pub fn at(&self, site: Site) -> f64 {
        match self.field.law_at(site) {
            SiteLaw::Zero => 0.0,
            SiteLaw::Exponential { rate } => {
                let mut rng = SiteRng { state: self.key ^ site_code(site) };
                let e: f64 = Exp1.sample(&mut rng);
                e / rate
            }
        }
    }
}

/// Weights over a window, stored row by row (constant `j`).
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSample {
    window: Window,
    field: Option<RateField>,
    plan: Option<SeedPlan>,
    values: Vec<f64>,
}

/// Samples every site of `window`.
pub fn sample_weights(field: &RateField, window: Window, plan: SeedPlan) -> WeightSample {
    let mut values = Vec::with_capacity(window.len());
    let sampler = SiteSampler::new(*field, plan);
    let (i0, i1) = window.i_range();
    let (j0, j1) = window.j_range();
    for j in j0..=j1 {
        for i in i0..=i1 {
            values.push(sampler.at(Site::new(i, j)));
        }
    }
    WeightSample { window, field: Some(*field), plan: Some(plan), values }
}

impl WeightSample {
    /// Wraps explicit values (row-major over `window`), e.g. hand-built
    /// fixtures. Such samples carry no rate field.
    pub fn from_values(window: Window, values: Vec<f64>) -> Result<Self, WeightsError> {
        if values.len() != window.len() {
            return Err(WeightsError::Shape { expected: window.len(), got: values.len() });
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(WeightsError::InvalidParameter("weights must be finite and nonnegative"));
        }
        Ok(Self { window, field: None, plan: None, values })
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn field(&self) -> Option<&RateField> {
        self.field.as_ref()
    }

    pub fn plan(&self) -> Option<SeedPlan> {
        self.plan
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, site: Site) -> Option<f64> {
        self.window.index(site).map(|k| self.values[k])
    }

    /// Weights of row `j` restricted to columns `[i0, i1]`.
    pub fn row(&self, j: i64, i0: i64, i1: i64) -> Option<&[f64]> {
        let a = self.window.index(Site::new(i0, j))?;
        let b = self.window.index(Site::new(i1, j))?;
        (a <= b).then(|| &self.values[a..=b])
    }

    /// Errors unless `window` lies inside the sampled window.
    pub fn check_covers(&self, window: &Window) -> Result<(), WeightsError> {
        if self.window.contains_window(window) {
            Ok(())
        } else {
            Err(WeightsError::Coverage { requested: *window, sampled: self.window })
        }
    }
}
