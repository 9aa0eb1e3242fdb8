//! Tracy-Widom distribution functions as Fredholm determinants, by
//! Nystrom discretization with Gauss-Legendre nodes.

use alloc::vec::Vec;

use super::airy::airy_pair;
use super::quad::{determinant, gauss_legendre};
use super::TwError;

/// `det(I - K_Ai)` on `L^2(s, inf)`, truncated to `[s, max(s, 0) + 16]`,
/// with `m` nodes.
pub fn gue_determinant(s: f64, m: usize) -> f64 {
    let (x, w) = gauss_legendre(m, s, s.max(0.0) + 16.0);
    let ai: Vec<(f64, f64)> = x.iter().map(|&t| airy_pair(t)).collect();
    let sw: Vec<f64> = w.iter().map(|v| libm::sqrt(*v)).collect();
    let mut a = alloc::vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            let k = if i == j {
                ai[i].1 * ai[i].1 - x[i] * ai[i].0 * ai[i].0
            } else {
                (ai[i].0 * ai[j].1 - ai[i].1 * ai[j].0) / (x[i] - x[j])
            };
            a[i * m + j] = f64::from(u8::from(i == j)) - sw[i] * k * sw[j];
        }
    }
    determinant(&mut a, m)
}

/// `det(I - B_s)` on `L^2(0, inf)` with `B_s(x, y) = Ai(x + y + s)`,
/// truncated where `Ai(x + s)` is negligible, with `m` nodes.
pub fn goe_determinant(s: f64, m: usize) -> f64 {
    let len = (16.0 - s).max(6.0);
    let (x, w) = gauss_legendre(m, 0.0, len);
    let sw: Vec<f64> = w.iter().map(|v| libm::sqrt(*v)).collect();
    let mut a = alloc::vec![0.0; m * m];
    for i in 0..m {
        for j in i..m {
            let b = sw[i] * airy_pair(x[i] + x[j] + s).0 * sw[j];
            a[i * m + j] = f64::from(u8::from(i == j)) - b;
            a[j * m + i] = a[i * m + j];
        }
    }
    determinant(&mut a, m)
}

fn converged(s: f64, det: impl Fn(f64, usize) -> f64) -> Result<f64, TwError> {
    if !(s.is_finite() && (-10.0..=10.0).contains(&s)) {
        return Err(TwError::Range(s));
    }
    let mut m = 40;
    let mut prev = det(s, m);
    while m < 320 {
        m += m / 2;
        let next = det(s, m);
        if (next - prev).abs() <= 1e-11 {
            return Ok(next.clamp(0.0, 1.0));
        }
        prev = next;
    }
    Err(TwError::NoConvergence(s))
}

/// GUE Tracy-Widom distribution function, `s` in `[-10, 10]`.
pub fn f_gue(s: f64) -> Result<f64, TwError> {
    converged(s, gue_determinant)
}

/// GOE Tracy-Widom distribution function, `s` in `[-10, 10]`.
pub fn f_goe(s: f64) -> Result<f64, TwError> {
    converged(s, goe_determinant)
}
