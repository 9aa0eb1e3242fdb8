//! Tracy-Widom distribution functions and the limit laws built from them.

mod airy;
mod cdf;
mod fredholm;
mod laws;
mod painleve;
mod quad;

pub use airy::{airy, airy_pair, airy_prime};
pub use cdf::NumericCdf;
pub use fredholm::{f_goe, f_gue, goe_determinant, gue_determinant};
pub use laws::*;
pub use painleve::{solve as solve_painleve, PainleveSettings, PainleveTable};
pub use quad::{determinant, gauss_legendre};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum TwError {
    #[error("argument {0} outside the supported range")]
    Range(f64),
    #[error("quadrature did not converge at s = {0}")]
    NoConvergence(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("grid must be strictly increasing with at least two points")]
    Grid,
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn fredholm_orders_agree() {
        for k in 0..=16 {
            let s = -8.0 + k as f64;
            let a = gue_determinant(s, 60);
            let b = gue_determinant(s, 120);
            assert!((a - b).abs() < 1e-8, "gue {s}");
            let a = goe_determinant(s, 60);
            let b = goe_determinant(s, 120);
            assert!((a - b).abs() < 1e-8, "goe {s}");
        }
    }

    #[test]
    fn limits() {
        assert!(f_gue(-10.0).unwrap() < 1e-6 && f_gue(10.0).unwrap() > 1.0 - 1e-6);
        assert!(f_goe(-10.0).unwrap() < 1e-6 && f_goe(10.0).unwrap() > 1.0 - 1e-6);
        assert!(f_gue(10.5).is_err());
        let tw = TracyWidom::new();
        for c in [&tw.gue, &tw.goe] {
            assert!(c.at(-12.0) < 1e-6 && c.at(12.0) > 1.0 - 1e-6);
        }
    }

    #[test]
    fn routes_agree_pointwise() {
        let tw = TracyWidom::new();
        for k in 0..=28 {
            let s = -8.0 + 0.5 * k as f64 + 0.0137;
            assert!((f_gue(s).unwrap() - tw.gue.at(s)).abs() < 1e-6, "gue {s}");
            assert!((f_goe(s).unwrap() - tw.goe.at(s)).abs() < 1e-6, "goe {s}");
        }
    }

    #[test]
    fn moments_of_tables() {
        // published values of the means and variances
        let tw = TracyWidom::new();
        assert!((tw.gue.mean() + 1.771_086_807_4).abs() < 1e-6);
        assert!((tw.gue.variance() - 0.813_194_792_8).abs() < 1e-6);
        assert!((tw.goe.mean() + 1.206_533_574_5).abs() < 1e-6);
        assert!((tw.goe.variance() - 1.607_781_034_5).abs() < 1e-6);
    }

    #[test]
    fn goe_wider_single_density_crossing() {
        let tw = TracyWidom::new();
        let xs: Vec<f64> = (0..=1600).map(|k| -8.0 + 0.01 * k as f64).collect();
        let diff: Vec<f64> = xs.iter().map(|&x| tw.goe.density(x) - tw.gue.density(x)).collect();
        assert!(xs.iter().all(|&x| tw.goe.density(x) >= 0.0 && tw.gue.density(x) >= 0.0));
        let signs: Vec<bool> = diff.iter().filter(|d| d.abs() > 1e-9).map(|d| *d > 0.0).collect();
        let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
        // GOE heavier on both sides: its density exceeds GUE's in both tails
        assert_eq!(changes, 2);
        assert!(signs[0] && *signs.last().unwrap());
    }

    #[test]
    fn two_speed_routes_and_shape() {
        let tw = TracyWidom::new();
        let p = ShockLawParams::new(0.5).unwrap();
        assert!((p.sigma1 - libm::cbrt(4.0) / libm::cbrt(1.5)).abs() < 1e-15);
        let want2 = libm::cbrt(4.0) * libm::cbrt(1.25) / (libm::cbrt(0.25) * 1.5);
        assert!((p.sigma2 - want2).abs() < 1e-14);
        let r = two_speed_prediction_routes(&p, &tw.goe, 0.0);
        assert!((r[0] - r[1]).abs() < 1e-6 && (r[0] - r[2]).abs() < 1e-6, "{r:?}");
        let mut prev = 0.0;
        for k in 0..=60 {
            let s = -6.0 + 0.2 * k as f64;
            let v = two_speed_prediction(&p, &tw.goe, s);
            assert!(v >= prev - 1e-12);
            prev = v;
        }
        assert!(two_speed_prediction(&p, &tw.goe, -20.0) < 1e-6);
        assert!(two_speed_prediction(&p, &tw.goe, 20.0) > 1.0 - 1e-6);
    }

    #[test]
    fn identical_laws_split_evenly() {
        let tw = TracyWidom::new();
        let a = Affine { base: &tw.goe, loc: 0.3, scale: 1.7 };
        let r = prob_greater(&a, &a);
        assert!((r[0] - 0.5).abs() < 1e-9 && (r[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn convolution_with_point_mass() {
        let tw = TracyWidom::new();
        for k in 0..200 {
            let z = -7.0 + 0.061 * k as f64;
            assert!((convolution_cdf(&tw.gue, &PointMass(0.0), z) - tw.gue.at(z)).abs() < 1e-8);
        }
    }

    #[test]
    fn bernoulli_constants_and_identity() {
        let p = BernoulliLawParams::new(0.25, 0.75).unwrap();
        assert!((p.eta - 1.0).abs() < 1e-15);
        assert!((p.m_plus - 4.0 / 3.0).abs() < 1e-15 && (p.m_minus - 4.0).abs() < 1e-15);
        assert!((p.v_plus - 128.0 / 9.0).abs() < 1e-12 && (p.v_minus - 128.0 / 9.0).abs() < 1e-12);
        assert_eq!(bernoulli_prediction(&p, 0.0), 0.5);
        let v = p.v_plus + p.v_minus;
        let mut prev = 0.0;
        for k in 0..=100 {
            let u = -5.0 + 0.1 * k as f64;
            let f = bernoulli_prediction(&p, u);
            let x = u * (p.m_minus - p.m_plus) / libm::sqrt(v);
            let g = 0.5 * (1.0 + libm::erf(x / core::f64::consts::SQRT_2));
            assert!((f - g).abs() < 1e-12);
            assert!(f >= prev);
            prev = f;
        }
        assert!(BernoulliLawParams::new(0.75, 0.25).is_err());
    }

    #[test]
    fn multipoint_constants_and_min_structure() {
        let p = MultipointLawParams::new(3.0).unwrap();
        assert!((p.mu - 9.0).abs() < 1e-14);
        assert!((p.mu_plus - 1.5).abs() < 1e-15 && (p.mu_minus - 3.0).abs() < 1e-15);
        assert!((p.sigma - libm::pow(3.0, 4.0 / 3.0) / libm::pow(4.0, 1.0 / 6.0)).abs() < 1e-13);
        let (mu, sig) = point_to_point_constants(1.0 / 4.0);
        // the same rectangle seen with unit horizontal side
        assert!((mu * 4.0 - p.mu).abs() < 1e-13);
        assert!((sig * libm::cbrt(4.0) - p.sigma).abs() < 1e-13);

        let tw = TracyWidom::new();
        let one = multipoint_prediction(&p, &tw.gue, &[0.5], &[1.0]).unwrap();
        let g1 = tw.gue.at((1.0 - 1.5 * 0.5) / p.sigma);
        let g2 = tw.gue.at((1.0 - 3.0 * 0.5) / p.sigma);
        assert!((one - g1 * g2).abs() < 1e-15);
        let two = multipoint_prediction(&p, &tw.gue, &[-1.0, 1.0], &[0.5, 2.0]).unwrap();
        let three = multipoint_prediction(&p, &tw.gue, &[-1.0, 0.0, 1.0], &[0.5, 1e6, 2.0]).unwrap();
        assert_eq!(two, three);
        assert!(multipoint_prediction(&p, &tw.gue, &[1.0, 0.0], &[0.0, 0.0]).is_err());
        assert!(multipoint_prediction(&p, &tw.gue, &[0.0], &[0.0, 1.0]).is_err());
    }
}
