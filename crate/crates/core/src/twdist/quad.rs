//! Gauss-Legendre rules and dense determinants.

use alloc::vec::Vec;
use core::f64::consts::PI;

/// Nodes and weights of the `m`-point Gauss-Legendre rule on `[a, b]`.
pub fn gauss_legendre(m: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut x = alloc::vec![0.0; m];
    let mut w = alloc::vec![0.0; m];
    let half = (b - a) / 2.0;
    let mid = (b + a) / 2.0;
    for k in 0..m.div_ceil(2) {
        let mut z = libm::cos(PI * (k as f64 + 0.75) / (m as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for n in 2..=m {
                let nf = n as f64;
                (p0, p1) = (p1, ((2.0 * nf - 1.0) * z * p1 - (nf - 1.0) * p0) / nf);
            }
            if m == 1 {
                (p0, p1) = (1.0, z);
            }
            dp = m as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wk = 2.0 / ((1.0 - z * z) * dp * dp);
        x[k] = mid - half * z;
        x[m - 1 - k] = mid + half * z;
        w[k] = half * wk;
        w[m - 1 - k] = half * wk;
    }
    (x, w)
}

/// Determinant of the row-major `n x n` matrix `a` by LU with partial
/// pivoting; `a` is overwritten.
pub fn determinant(a: &mut [f64], n: usize) -> f64 {
    assert_eq!(a.len(), n * n);
    let mut det = 1.0;
    for c in 0..n {
        let mut p = c;
        let mut best = a[c * n + c].abs();
        for r in c + 1..n {
            let v = a[r * n + c].abs();
            if v > best {
                best = v;
                p = r;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if p != c {
            for k in 0..n {
                a.swap(c * n + k, p * n + k);
            }
            det = -det;
        }
        let pivot = a[c * n + c];
        det *= pivot;
        for r in c + 1..n {
            let f = a[r * n + c] / pivot;
            if f != 0.0 {
                for k in c + 1..n {
                    a[r * n + k] -= f * a[c * n + k];
                }
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        for m in [1usize, 2, 5, 12, 40] {
            let (x, w) = gauss_legendre(m, -1.0, 3.0);
            for deg in 0..(2 * m) {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * libm::pow(*x, deg as f64)).sum();
                let d = deg as f64 + 1.0;
                let want = (libm::pow(3.0, d) - libm::pow(-1.0, d)) / d;
                assert!((got - want).abs() < 1e-11 * want.abs().max(1.0), "m={m} deg={deg}");
            }
        }
    }

    #[test]
    fn determinant_small() {
        let mut a = [2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0];
        assert!((determinant(&mut a, 3) - 18.0).abs() < 1e-12);
        let mut b = [0.0, 1.0, 1.0, 0.0];
        assert_eq!(determinant(&mut b, 2), -1.0);
        let mut s = [1.0, 2.0, 2.0, 4.0];
        assert_eq!(determinant(&mut s, 2), 0.0);
    }
}
