//! Airy function `Ai` and its derivative.
//!
//! Asymptotic expansions for `|x| >= 10`; in between, Taylor steps of the
//! equation `y'' = x y` from the exact values at 0 (negative side) or from
//! the asymptotic values at 10 (positive side, integrating toward the
//! origin where `Ai` is the dominant solution).

use core::f64::consts::{FRAC_PI_4, PI};

use super::TwError;

const AI0: f64 = 0.355_028_053_887_817_24;
const AIP0: f64 = -0.258_819_403_792_806_8;
const SWITCH: f64 = 10.0;
const MAX_STEP: f64 = 0.5;

/// `Ai(x)` for `|x| <= 50`.
pub fn airy(x: f64) -> Result<f64, TwError> {
    check(x)?;
    Ok(airy_pair(x).0)
}

/// `Ai'(x)` for `|x| <= 50`.
pub fn airy_prime(x: f64) -> Result<f64, TwError> {
    check(x)?;
    Ok(airy_pair(x).1)
}

fn check(x: f64) -> Result<(), TwError> {
    if x.is_finite() && x.abs() <= 50.0 {
        Ok(())
    } else {
        Err(TwError::Range(x))
    }
}

/// `(Ai(x), Ai'(x))` without range check. Underflows to zero far right.
pub fn airy_pair(x: f64) -> (f64, f64) {
    if x >= SWITCH {
        asymptotic_right(x)
    } else if x <= -SWITCH {
        asymptotic_left(-x)
    } else if x > 0.0 {
        let (y, yp) = asymptotic_right(SWITCH);
        integrate(SWITCH, y, yp, x)
    } else {
        integrate(0.0, AI0, AIP0, x)
    }
}

fn integrate(mut x0: f64, mut y: f64, mut yp: f64, x: f64) -> (f64, f64) {
    let n = libm::ceil((x - x0).abs() / MAX_STEP).max(1.0);
    let h = (x - x0) / n;
    for k in 0..n as usize {
        (y, yp) = taylor_step(x0, y, yp, h);
        x0 = if k + 1 == n as usize { x } else { x0 + h };
    }
    (y, yp)
}

/// Advances `y'' = x y` from `x0` by `h` with the power series at `x0`,
/// whose coefficients obey `(n+2)(n+1) a_{n+2} = x0 a_n + a_{n-1}`.
fn taylor_step(x0: f64, y: f64, yp: f64, h: f64) -> (f64, f64) {
    let (mut am1, mut a0, mut a1) = (0.0, y, yp);
    let mut sum = y + yp * h;
    let mut dsum = yp;
    let mut hp = h;
    let mut quiet = 0;
    for n in 0..200 {
        let nf = n as f64;
        let a2 = (x0 * a0 + am1) / ((nf + 2.0) * (nf + 1.0));
        let dterm = (nf + 2.0) * a2 * hp;
        hp *= h;
        let term = a2 * hp;
        sum += term;
        dsum += dterm;
        let scale = sum.abs() + dsum.abs() + 1e-300;
        if term.abs() + dterm.abs() < 1e-18 * scale {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        (am1, a0, a1) = (a0, a1, a2);
    }
    (sum, dsum)
}

/// `u_k` coefficients of the Airy asymptotic series.
fn next_u(k: usize, prev: f64) -> f64 {
    let k = k as f64;
    prev * (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / ((2.0 * k - 1.0) * 216.0 * k)
}

/// Sums `sum (-1)^k c_k z^-k` for `c = u` and `c = v`, stopping at the
/// smallest term.
fn series(zeta: f64, alternate: bool) -> ([f64; 2], [f64; 2]) {
    // returns even/odd partial sums for u and v separately
    let mut u = 1.0;
    let mut su = [1.0, 0.0];
    let mut sv = [1.0, 0.0];
    let mut zp = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..80 {
        u = next_u(k, u);
        let kf = k as f64;
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        zp /= zeta;
        let tu = u * zp;
        if tu.abs() > last {
            break;
        }
        last = tu.abs();
        let sign = if alternate {
            if (k / 2) % 2 == 0 { 1.0 } else { -1.0 }
        } else if k % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        su[k % 2] += sign * tu;
        sv[k % 2] += sign * v * zp;
        if tu.abs() < 1e-20 {
            break;
        }
    }
    (su, sv)
}

fn asymptotic_right(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x * libm::sqrt(x);
    let (su, sv) = series(zeta, false);
    let e = libm::exp(-zeta) / (2.0 * libm::sqrt(PI));
    let q = libm::sqrt(libm::sqrt(x));
    (e / q * (su[0] + su[1]), -e * q * (sv[0] + sv[1]))
}

/// `Ai(-z)`, `Ai'(-z)` for large `z > 0`.
fn asymptotic_left(z: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * z * libm::sqrt(z);
    let (su, sv) = series(zeta, true);
    let (s, c) = libm::sincos(zeta - FRAC_PI_4);
    let q = libm::sqrt(libm::sqrt(z));
    let rp = 1.0 / libm::sqrt(PI);
    let ai = rp / q * (c * su[0] + s * su[1]);
    let aip = rp * q * (s * sv[0] - c * sv[1]);
    (ai, aip)
}

#[cfg(test)]
mod tests {
    use super::*;

    // 30-digit reference values (mpmath.airyai)
    const REF: &[(f64, f64, f64)] = &[
        (-50.0, -0.16188142361232092392, 0.96898983727674908714),
        (-30.0, -0.087968188456842162833, 1.2286206026374851347),
        (-12.5, -0.27627456138116024823, -0.41933133041950516441),
        (-10.0, 0.040241238486443190689, 0.9962650441327900559),
        (-8.0, -0.052705050356386202622, 0.93556093819830655103),
        (-5.3, 0.18256793106833963344, 0.75457541994701086913),
        (-2.5, -0.11232506769296608919, 0.67885273426479436337),
        (-1.0, 0.5355608832923521188, -0.010160567116645209395),
        (-0.25, 0.41872461427545292423, -0.24638918992017597303),
        (0.0, 0.35502805388781723926, -0.25881940379280679841),
        (0.7, 0.18916240039815008218, -0.19985119158228048105),
        (1.0, 0.13529241631288141552, -0.15914744129679321279),
        (2.0, 0.034924130423274379135, -0.053090384433653631704),
        (4.2, 0.00062749586830916314018, -0.0013210006638876860872),
        (7.9, 6.2396400972839341797e-8, -1.7729958329430335231e-7),
        (8.0, 4.6922076160992316256e-8, -1.3414392979067865743e-7),
        (10.0, 1.1047532552898685934e-10, -3.5206336767389236366e-10),
        (15.0, 2.164962520737992299e-18, -8.4205679540177727661e-18),
        (25.0, 8.1160268246913866838e-38, -4.0660893372432810053e-37),
        (50.0, 4.5849417240748284783e-104, -3.2443318198287992961e-103),
    ];

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(if b.abs() < 1e-3 { 0.0 } else { 1.0 })
    }

    #[test]
    fn reference_values() {
        for &(x, ai, aip) in REF {
            let (y, yp) = airy_pair(x);
            // oscillatory side: error relative to the envelope
            let env = if x < 0.0 { 1.0 } else { ai.abs() };
            assert!((y - ai).abs() <= 1e-10 * env, "Ai({x}) = {y}, want {ai}");
            let envp = if x < 0.0 { 1.0 } else { aip.abs() };
            assert!((yp - aip).abs() <= 1e-10 * envp.max(1e-300), "Ai'({x}) = {yp}, want {aip}");
            assert!(close(y, ai, 1e-9) || x < 0.0);
        }
    }

    #[test]
    fn closed_form_at_zero() {
        let ai0 = 1.0 / (libm::pow(3.0, 2.0 / 3.0) * libm::tgamma(2.0 / 3.0));
        let aip0 = -1.0 / (libm::cbrt(3.0) * libm::tgamma(1.0 / 3.0));
        assert!((airy(0.0).unwrap() - ai0).abs() < 1e-15);
        assert!((airy_prime(0.0).unwrap() - aip0).abs() < 1e-15);
    }

    #[test]
    fn range_checked() {
        assert!(airy(50.5).is_err());
        assert!(airy(f64::NAN).is_err());
        assert!(airy(-50.0).is_ok());
    }

    #[test]
    fn positive_and_decreasing_on_right() {
        let mut prev = airy(0.0).unwrap();
        for k in 1..=500 {
            let x = k as f64 * 0.1;
            let y = airy(x).unwrap();
            assert!(y > 0.0);
            assert!(y < prev);
            prev = y;
        }
    }

    #[test]
    fn ode_residual() {
        let h = 5e-3;
        for k in 0..100 {
            let x = -9.9 + 0.2 * k as f64;
            let f = |t: f64| airy_pair(t).0;
            let d2 = (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h))
                / (12.0 * h * h);
            assert!((d2 - x * f(x)).abs() < 1e-8, "x = {x}: {}", d2 - x * f(x));
        }
    }

    #[test]
    fn expansion_and_integration_agree() {
        let a = asymptotic_left(SWITCH);
        let b = integrate(0.0, AI0, AIP0, -SWITCH);
        assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-11, "{a:?} {b:?}");
        let x = SWITCH - 1.5;
        let a = asymptotic_right(x);
        let (y, yp) = asymptotic_right(SWITCH);
        let b = integrate(SWITCH, y, yp, x);
        assert!((a.0 / b.0 - 1.0).abs() < 1e-12 && (a.1 / b.1 - 1.0).abs() < 1e-12, "{a:?} {b:?}");
    }
}
