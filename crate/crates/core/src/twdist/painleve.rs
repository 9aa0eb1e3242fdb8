//! Tracy-Widom distribution functions from the Hastings-McLeod solution
//! of Painleve II, `q'' = x q + 2 q^3`, `q ~ Ai` as `x -> inf`.
//!
//! With `K(s) = int_s^inf q^2`, `R(s) = int_s^inf (x - s) q^2` and
//! `G(s) = int_s^inf q`:
//! `F_2 = exp(-R)`, `F_1 = exp(-(R + G) / 2)`, `F_2' = F_2 K`,
//! `F_1' = F_1 (q + K) / 2`.

use alloc::vec::Vec;

use super::airy::airy_pair;
use super::quad::gauss_legendre;

/// Integration settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PainleveSettings {
    /// Point where `q` is initialized with `Ai`.
    pub x0: f64,
    /// Step of the fixed-step RK4 scheme (also the table spacing).
    pub h: f64,
    /// Table range.
    pub lo: f64,
    pub hi: f64,
    /// Below this point `q` is replaced by its `-inf` asymptotics, where
    /// the backward integration loses all accuracy and both laws are
    /// below `1e-18`.
    pub asymptotic_below: f64,
}

impl Default for PainleveSettings {
    fn default() -> Self {
        Self { x0: 8.0, h: 1e-3, lo: -12.0, hi: 12.0, asymptotic_below: -8.0 }
    }
}

/// Values of both laws and their densities on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PainleveTable {
    pub grid: Vec<f64>,
    pub f2: Vec<f64>,
    pub d2: Vec<f64>,
    pub f1: Vec<f64>,
    pub d1: Vec<f64>,
}

#[derive(Clone, Copy)]
struct State {
    q: f64,
    p: f64,
    r: f64,
    k: f64,
    g: f64,
}

fn hm_asymptotic(x: f64) -> f64 {
    let z = -x;
    libm::sqrt(z / 2.0) * (1.0 - 1.0 / (8.0 * z * z * z) - 73.0 / (128.0 * libm::pow(z, 6.0)))
}

fn deriv(x: f64, s: &State, q_given: Option<f64>) -> State {
    let q = q_given.unwrap_or(s.q);
    State { q: s.p, p: x * q + 2.0 * q * q * q, r: -s.k, k: -q * q, g: -q }
}

fn rk4(x: f64, s: State, h: f64, q_at: &dyn Fn(f64) -> Option<f64>) -> State {
    let add = |a: &State, b: &State, c: f64| State {
        q: a.q + c * b.q,
        p: a.p + c * b.p,
        r: a.r + c * b.r,
        k: a.k + c * b.k,
        g: a.g + c * b.g,
    };
    let k1 = deriv(x, &s, q_at(x));
    let k2 = deriv(x + h / 2.0, &add(&s, &k1, h / 2.0), q_at(x + h / 2.0));
    let k3 = deriv(x + h / 2.0, &add(&s, &k2, h / 2.0), q_at(x + h / 2.0));
    let k4 = deriv(x + h, &add(&s, &k3, h), q_at(x + h));
    State {
        q: s.q + h / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q),
        p: s.p + h / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p),
        r: s.r + h / 6.0 * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r),
        k: s.k + h / 6.0 * (k1.k + 2.0 * k2.k + 2.0 * k3.k + k4.k),
        g: s.g + h / 6.0 * (k1.g + 2.0 * k2.g + 2.0 * k3.g + k4.g),
    }
}

/// Tail integrals of `Ai` at `x0`, where `q` and `Ai` agree to far below
/// double precision.
fn initial_state(x0: f64) -> State {
    let (x, w) = gauss_legendre(80, x0, x0 + 20.0);
    let (mut r, mut k, mut g) = (0.0, 0.0, 0.0);
    for (xi, wi) in x.iter().zip(&w) {
        let a = airy_pair(*xi).0;
        k += wi * a * a;
        r += wi * (xi - x0) * a * a;
        g += wi * a;
    }
    let (q, p) = airy_pair(x0);
    State { q, p, r, k, g }
}

pub fn solve(settings: &PainleveSettings) -> PainleveTable {
    let PainleveSettings { x0, h, lo, hi, asymptotic_below } = *settings;
    let n = libm::round((hi - lo) / h) as usize + 1;
    let grid: Vec<f64> = (0..n).map(|k| lo + k as f64 * h).collect();
    let mut states: Vec<Option<State>> = alloc::vec![None; n];
    let idx0 = libm::round((x0 - lo) / h) as usize;
    let start = initial_state(grid[idx0]);
    states[idx0] = Some(start);

    // forward: q is Ai to double precision
    let ai = |x: f64| Some(airy_pair(x).0);
    let mut s = start;
    for k in idx0..n - 1 {
        s = rk4(grid[k], s, h, &ai);
        s.q = airy_pair(grid[k + 1]).0;
        states[k + 1] = Some(s);
    }
    // backward
    let mut s = start;
    let mut asym = false;
    for k in (1..=idx0).rev() {
        let x = grid[k];
        if !asym && x - h < asymptotic_below {
            asym = true;
        }
        if asym {
            let qa = |x: f64| Some(hm_asymptotic(x));
            s = rk4(x, s, -h, &qa);
            s.q = hm_asymptotic(x - h);
        } else {
            s = rk4(x, s, -h, &|_| None);
        }
        states[k - 1] = Some(s);
    }
    let mut f2 = Vec::with_capacity(n);
    let mut d2 = Vec::with_capacity(n);
    let mut f1 = Vec::with_capacity(n);
    let mut d1 = Vec::with_capacity(n);
    for st in states.iter().map(|s| s.unwrap()) {
        let a = libm::exp(-st.r);
        let b = libm::exp(-(st.r + st.g) / 2.0);
        f2.push(a);
        d2.push(a * st.k);
        f1.push(b);
        d1.push(b * (st.q + st.k) / 2.0);
    }
    PainleveTable { grid, f2, d2, f1, d1 }
}
