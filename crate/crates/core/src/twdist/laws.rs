//! Limit laws: parameter sets of the three models, the generic
//! shock-law construction and the predicted distribution functions.

use alloc::vec::Vec;

use super::cdf::NumericCdf;
use super::painleve::{solve, PainleveSettings};
use super::TwError;

/// A real-valued law that can report its distribution function and
/// integrate against its measure.
pub trait Law {
    fn cdf(&self, x: f64) -> f64;
    fn expect(&self, f: &dyn Fn(f64) -> f64) -> f64;
}

impl Law for NumericCdf {
    fn cdf(&self, x: f64) -> f64 {
        self.at(x)
    }

    fn expect(&self, f: &dyn Fn(f64) -> f64) -> f64 {
        NumericCdf::expect(self, f)
    }
}

/// Law of `loc + scale * X`, `scale > 0`.
pub struct Affine<'a, L: Law + ?Sized> {
    pub base: &'a L,
    pub loc: f64,
    pub scale: f64,
}

impl<L: Law + ?Sized> Law for Affine<'_, L> {
    fn cdf(&self, x: f64) -> f64 {
        self.base.cdf((x - self.loc) / self.scale)
    }

    fn expect(&self, f: &dyn Fn(f64) -> f64) -> f64 {
        self.base.expect(&|y| f(self.loc + self.scale * y))
    }
}

/// Law of `-X` for a law without atoms: `G_-(x) = 1 - G(-x)`.
pub struct Negated<'a, L: Law + ?Sized>(pub &'a L);

impl<L: Law + ?Sized> Law for Negated<'_, L> {
    fn cdf(&self, x: f64) -> f64 {
        1.0 - self.0.cdf(-x)
    }

    fn expect(&self, f: &dyn Fn(f64) -> f64) -> f64 {
        self.0.expect(&|y| f(-y))
    }
}

/// Unit mass at a point.
pub struct PointMass(pub f64);

impl Law for PointMass {
    fn cdf(&self, x: f64) -> f64 {
        if x >= self.0 { 1.0 } else { 0.0 }
    }

    fn expect(&self, f: &dyn Fn(f64) -> f64) -> f64 {
        f(self.0)
    }
}

/// Normal law with the given mean and variance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gaussian {
    pub mean: f64,
    pub variance: f64,
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

impl Law for Gaussian {
    fn cdf(&self, x: f64) -> f64 {
        normal_cdf((x - self.mean) / libm::sqrt(self.variance))
    }

    fn expect(&self, f: &dyn Fn(f64) -> f64) -> f64 {
        let sd = libm::sqrt(self.variance);
        let n = 8000;
        let h = 24.0 / n as f64;
        let dens = |z: f64| libm::exp(-z * z / 2.0) / libm::sqrt(2.0 * core::f64::consts::PI);
        let g = |z: f64| f(self.mean + sd * z) * dens(z);
        let mut acc = g(-12.0) + g(12.0);
        for k in 1..n {
            let z = -12.0 + k as f64 * h;
            acc += if k % 2 == 1 { 4.0 } else { 2.0 } * g(z);
        }
        acc * h / 3.0
    }
}

/// `P(A > B)` for independent `A`, `B`, by the two quadratures
/// `E[1 - F_A(B)]` and `E[F_B(A)]`.
pub fn prob_greater(a: &dyn Law, b: &dyn Law) -> [f64; 2] {
    [b.expect(&|y| 1.0 - a.cdf(y)), a.expect(&|x| b.cdf(x))]
}

/// Distribution function of `A + B` at `z`: `E[F_A(z - B)]`.
pub fn convolution_cdf(a: &dyn Law, b: &dyn Law, z: f64) -> f64 {
    b.expect(&|y| a.cdf(z - y))
}

/// Samples the distribution function of `A + B` on `grid`.
pub fn convolve(a: &dyn Law, b: &dyn Law, grid: Vec<f64>) -> Result<NumericCdf, TwError> {
    let vals = grid.iter().map(|&z| convolution_cdf(a, b, z).clamp(0.0, 1.0)).collect();
    NumericCdf::new(grid, vals, None)
}

/// Mass that `G_2 * G_{1,-}` puts on `(0, inf)`, i.e. `P(X_2 - X_1 > 0)`
/// for independent `X_2 ~ G_2`, `X_1 ~ G_1`.
pub fn shock_law_mass(g2: &dyn Law, g1: &dyn Law) -> f64 {
    1.0 - convolution_cdf(g2, &Negated(g1), 0.0)
}

/// GUE and GOE Tracy-Widom distribution functions tabulated from the
/// Painleve II route on `[-12, 12]` with spacing `1e-3`.
#[derive(Clone, Debug, PartialEq)]
pub struct TracyWidom {
    pub gue: NumericCdf,
    pub goe: NumericCdf,
}

impl TracyWidom {
    pub fn new() -> Self {
        Self::with_settings(&PainleveSettings::default())
    }

    pub fn with_settings(settings: &PainleveSettings) -> Self {
        let t = solve(settings);
        let gue = NumericCdf::new(t.grid.clone(), t.f2, Some(t.d2)).expect("valid table");
        let goe = NumericCdf::new(t.grid, t.f1, Some(t.d1)).expect("valid table");
        Self { gue, goe }
    }
}

impl Default for TracyWidom {
    fn default() -> Self {
        Self::new()
    }
}

/// Constants of the two-speed model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShockLawParams {
    pub alpha: f64,
    pub eta0: f64,
    pub mu: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub gamma: f64,
}

impl ShockLawParams {
    pub fn new(alpha: f64) -> Result<Self, TwError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(TwError::InvalidParameter("alpha must lie in (0, 1)"));
        }
        let c = 2.0 - alpha;
        let two23 = libm::cbrt(4.0);
        Ok(Self {
            alpha,
            eta0: alpha / c,
            mu: 4.0 / c,
            sigma1: two23 / libm::cbrt(c),
            sigma2: two23 * libm::cbrt(2.0 - 2.0 * alpha + alpha * alpha)
                / (libm::cbrt(alpha * alpha) * c),
            gamma: libm::cbrt(16.0) / libm::pow(c, 4.0 / 3.0),
        })
    }

    /// Laws `(chi_1, chi_2)` at level `s`: `chi_1 = gamma s + sigma1 X_1`
    /// (the `+` side) and `chi_2 = gamma s / alpha + sigma2 X_2`, with
    /// `X_1`, `X_2` GOE.
    pub fn laws<'a>(&self, goe: &'a NumericCdf, s: f64) -> (Affine<'a, NumericCdf>, Affine<'a, NumericCdf>) {
        (
            Affine { base: goe, loc: self.gamma * s, scale: self.sigma1 },
            Affine { base: goe, loc: self.gamma * s / self.alpha, scale: self.sigma2 },
        )
    }
}

/// Limit of `P((I_t - J_t - (alpha - 1) t) / t^(1/3) <= s)`:
/// `P(chi_2 > chi_1)`, nondecreasing in `s`.
pub fn two_speed_prediction(params: &ShockLawParams, goe: &NumericCdf, s: f64) -> f64 {
    let (chi1, chi2) = params.laws(goe, s);
    prob_greater(&chi2, &chi1)[0]
}

/// The same value by three routes: both quadratures of `P(chi_2 > chi_1)`
/// and the mass of `G_2 * G_{1,-}` on `(0, inf)`.
pub fn two_speed_prediction_routes(params: &ShockLawParams, goe: &NumericCdf, s: f64) -> [f64; 3] {
    let (chi1, chi2) = params.laws(goe, s);
    let [a, b] = prob_greater(&chi2, &chi1);
    [a, b, shock_law_mass(&chi2, &chi1)]
}

/// Constants of the Bernoulli-shock model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BernoulliLawParams {
    pub rho_minus: f64,
    pub rho_plus: f64,
    pub eta: f64,
    pub v_plus: f64,
    pub v_minus: f64,
    pub m_plus: f64,
    pub m_minus: f64,
}

impl BernoulliLawParams {
    pub fn new(rho_minus: f64, rho_plus: f64) -> Result<Self, TwError> {
        if !(rho_minus > 0.0 && rho_plus < 1.0 && rho_minus < rho_plus) {
            return Err(TwError::InvalidParameter("need 0 < rho_minus < rho_plus < 1"));
        }
        let (a, b) = (rho_minus, rho_plus);
        let eta = (1.0 - b) * (1.0 - a) / (a * b);
        let p = Self {
            rho_minus: a,
            rho_plus: b,
            eta,
            v_plus: 1.0 / (a * a) - eta / ((1.0 - a) * (1.0 - a)),
            v_minus: eta / ((1.0 - b) * (1.0 - b)) - 1.0 / (b * b),
            m_plus: 1.0 / (1.0 - a),
            m_minus: 1.0 / (1.0 - b),
        };
        if !(p.v_plus > 0.0 && p.v_minus > 0.0) {
            return Err(TwError::InvalidParameter("variances must be positive"));
        }
        Ok(p)
    }

    /// Law of the rescaled `L+` (`plus`) or `L-` at `u`.
    pub fn marginal(&self, plus: bool, u: f64) -> Gaussian {
        if plus {
            Gaussian { mean: self.m_plus * u, variance: self.v_plus }
        } else {
            Gaussian { mean: self.m_minus * u, variance: self.v_minus }
        }
    }
}

/// `P(N(0, v+ + v-) > u (m+ - m-))`.
pub fn bernoulli_prediction(params: &BernoulliLawParams, u: f64) -> f64 {
    let v = params.v_plus + params.v_minus;
    0.5 * libm::erfc(u * (params.m_plus - params.m_minus) / libm::sqrt(2.0 * v))
}

/// Constants of the two-source point-to-point model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MultipointLawParams {
    pub beta: f64,
    pub mu: f64,
    pub mu_plus: f64,
    pub mu_minus: f64,
    /// Fluctuation scale `(1 + sqrt(1 + beta))^(4/3) / (1 + beta)^(1/6)`
    /// of a point-to-point time over a `(1 + beta) t x t` rectangle.
    pub sigma: f64,
}

impl MultipointLawParams {
    pub fn new(beta: f64) -> Result<Self, TwError> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(TwError::InvalidParameter("beta must be positive"));
        }
        let r = libm::sqrt(1.0 + beta);
        Ok(Self {
            beta,
            mu: (1.0 + r) * (1.0 + r),
            mu_plus: 1.0 + 1.0 / r,
            mu_minus: 1.0 + r,
            sigma: libm::pow(1.0 + r, 4.0 / 3.0) / libm::pow(1.0 + beta, 1.0 / 6.0),
        })
    }
}

/// `F((min_k s_k - mu+ u_k) / sigma) F((min_k s_k - mu- u_k) / sigma)`
/// with `F` the GUE law.
pub fn multipoint_prediction(
    params: &MultipointLawParams,
    gue: &NumericCdf,
    u: &[f64],
    s: &[f64],
) -> Result<f64, TwError> {
    if u.len() != s.len() {
        return Err(TwError::Dimension(u.len(), s.len()));
    }
    if u.is_empty() || u.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(TwError::InvalidParameter("u must be nonempty and strictly increasing"));
    }
    let min_over = |mu: f64| u.iter().zip(s).map(|(u, s)| s - mu * u).fold(f64::INFINITY, f64::min);
    Ok(gue.at(min_over(params.mu_plus) / params.sigma) * gue.at(min_over(params.mu_minus) / params.sigma))
}

/// Centering and scale of the point-to-point time to `(eta l, l)`:
/// `(1 + sqrt(eta))^2` and `eta^(-1/6) (1 + sqrt(eta))^(4/3)`.
pub fn point_to_point_constants(eta: f64) -> (f64, f64) {
    let r = libm::sqrt(eta);
    ((1.0 + r) * (1.0 + r), libm::pow(eta, -1.0 / 6.0) * libm::pow(1.0 + r, 4.0 / 3.0))
}
