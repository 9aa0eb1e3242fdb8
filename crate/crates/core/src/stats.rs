//! Empirical distributions, Kolmogorov-Smirnov distance, correlation and
//! order-independent aggregation of replica results.

use alloc::vec::Vec;

use crate::weights::SeedPlan;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("empty sample")]
    Empty,
    #[error("paired samples differ in length ({0} vs {1})")]
    Length(usize, usize),
    #[error("sample has zero variance")]
    Degenerate,
    #[error("non-finite value in sample")]
    NonFinite,
}

/// Replica values tagged with the seed plan that produced them, kept
/// sorted by plan so that merging is order-independent.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EmpiricalSample {
    entries: Vec<(SeedPlan, f64)>,
}

impl EmpiricalSample {
    pub fn new(mut entries: Vec<(SeedPlan, f64)>) -> Self {
        entries.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        Self { entries }
    }

    pub fn merge(mut self, other: EmpiricalSample) -> Self {
        self.entries.extend(other.entries);
        Self::new(self.entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(SeedPlan, f64)] {
        &self.entries
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.1).collect()
    }

    pub fn ecdf(&self) -> Result<Ecdf, StatsError> {
        Ecdf::new(self.values())
    }
}

/// Right-continuous empirical distribution function.
#[derive(Clone, Debug, PartialEq)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(mut values: Vec<f64>) -> Result<Self, StatsError> {
        if values.is_empty() {
            return Err(StatsError::Empty);
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(StatsError::NonFinite);
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { sorted: values })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of values `<= s`.
    pub fn at(&self, s: f64) -> f64 {
        self.sorted.partition_point(|v| *v <= s) as f64 / self.sorted.len() as f64
    }

    /// Fraction of values `< s`.
    pub fn below(&self, s: f64) -> f64 {
        self.sorted.partition_point(|v| *v < s) as f64 / self.sorted.len() as f64
    }

    /// Empirical `p`-quantile: smallest value with `at(value) >= p`.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.sorted.len();
        let k = (libm::ceil(p * n as f64) as usize).clamp(1, n);
        self.sorted[k - 1]
    }
}

/// Fraction of `sample` at or below `s`.
pub fn ecdf(sample: &[f64], s: f64) -> Result<f64, StatsError> {
    if sample.is_empty() {
        return Err(StatsError::Empty);
    }
    Ok(sample.iter().filter(|v| **v <= s).count() as f64 / sample.len() as f64)
}

/// Location and size of the largest gap between an ECDF and a model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsResult {
    pub distance: f64,
    pub location: f64,
    pub model_value: f64,
}

/// `sup |ecdf - model|`, evaluated at the distinct sample values: the
/// ECDF at each value against the model there, and the ECDF just below
/// it against the model a relative `1e-12` below it (so a model with a
/// jump at a sample value is compared on both sides of the jump).
pub fn ks_distance(ecdf: &Ecdf, model: impl Fn(f64) -> f64) -> KsResult {
    let n = ecdf.sorted.len();
    let nf = n as f64;
    let mut best = KsResult { distance: 0.0, location: ecdf.sorted[0], model_value: model(ecdf.sorted[0]) };
    let mut i = 0;
    while i < n {
        let v = ecdf.sorted[i];
        let mut j = i;
        while j < n && ecdf.sorted[j] == v {
            j += 1;
        }
        let f = model(v);
        let f_left = model(v - 1e-12 * v.abs().max(1.0));
        let d = (f_left - i as f64 / nf).abs().max((f - j as f64 / nf).abs());
        if d > best.distance {
            best = KsResult { distance: d, location: v, model_value: f };
        }
        i = j;
    }
    best
}

/// Two-sample KS distance `sup |F_a - F_b|`.
pub fn ks_two_sample(a: &Ecdf, b: &Ecdf) -> f64 {
    let mut d: f64 = 0.0;
    for v in a.sorted.iter().chain(&b.sorted) {
        d = d.max((a.at(*v) - b.at(*v)).abs());
    }
    d
}

/// Pearson correlation of paired samples.
pub fn pearson_correlation(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::Length(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(StatsError::Empty);
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::Degenerate);
    }
    Ok((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Half-width `eps` of the DKW band: `P(sup |F_n - F| > eps) <= delta`.
pub fn dkw_epsilon(n: usize, delta: f64) -> f64 {
    libm::sqrt(libm::log(2.0 / delta) / (2.0 * n as f64))
}

pub fn mean(x: &[f64]) -> Result<f64, StatsError> {
    if x.is_empty() {
        return Err(StatsError::Empty);
    }
    Ok(x.iter().sum::<f64>() / x.len() as f64)
}

/// Sample standard deviation divided by `sqrt(n)`.
pub fn standard_error(x: &[f64]) -> Result<f64, StatsError> {
    if x.len() < 2 {
        return Err(StatsError::Empty);
    }
    let m = mean(x)?;
    let n = x.len() as f64;
    let var = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
    Ok(libm::sqrt(var / n))
}

/// Standard error of an empirical frequency `p` over `n` trials.
pub fn binomial_se(p: f64, n: usize) -> f64 {
    libm::sqrt(p * (1.0 - p) / n as f64)
}
