//! Distribution functions sampled on a grid with monotone cubic
//! interpolation.

use alloc::vec::Vec;

use super::TwError;

/// Nondecreasing grid-sampled distribution function. Between nodes it is
/// the cubic Hermite interpolant with slopes limited so that it stays
/// monotone; outside the grid it is constant.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericCdf {
    grid: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    uniform: Option<(f64, f64)>,
}

impl NumericCdf {
    /// `density`, when given, supplies the node slopes; otherwise they are
    /// estimated with harmonic-mean (PCHIP) differences.
    pub fn new(grid: Vec<f64>, values: Vec<f64>, density: Option<Vec<f64>>) -> Result<Self, TwError> {
        let n = grid.len();
        if n < 2 || grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|x| !x.is_finite()) {
            return Err(TwError::Grid);
        }
        if values.len() != n {
            return Err(TwError::Dimension(values.len(), n));
        }
        let mut vals = values;
        for k in 0..n {
            let v = vals[k];
            if !(-1e-12..=1.0 + 1e-12).contains(&v) {
                return Err(TwError::InvalidParameter("values must lie in [0, 1]"));
            }
            if k > 0 && v < vals[k - 1] - 1e-12 {
                return Err(TwError::InvalidParameter("values must be nondecreasing"));
            }
            vals[k] = v.clamp(0.0, 1.0);
            if k > 0 && vals[k] < vals[k - 1] {
                vals[k] = vals[k - 1];
            }
        }
        let mut slopes = match density {
            Some(d) if d.len() != n => return Err(TwError::Dimension(d.len(), n)),
            Some(d) => d.into_iter().map(|v| if v.is_finite() { v.max(0.0) } else { 0.0 }).collect(),
            None => pchip_slopes(&grid, &vals),
        };
        limit_slopes(&grid, &vals, &mut slopes);
        let h = grid[1] - grid[0];
        let uniform = grid
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h)
            .then_some((grid[0], h));
        Ok(Self { grid, values: vals, slopes, uniform })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn lower(&self) -> f64 {
        self.grid[0]
    }

    pub fn upper(&self) -> f64 {
        self.grid[self.grid.len() - 1]
    }

    /// Interval `k` with `grid[k] <= x < grid[k + 1]`, for `x` inside.
    #[inline]
    fn interval(&self, x: f64) -> usize {
        let last = self.grid.len() - 2;
        match self.uniform {
            Some((x0, h)) => {
                let mut k = (((x - x0) / h) as usize).min(last);
                if x < self.grid[k] && k > 0 {
                    k -= 1;
                } else if k < last && x >= self.grid[k + 1] {
                    k += 1;
                }
                k
            }
            None => self.grid.partition_point(|g| *g <= x).saturating_sub(1).min(last),
        }
    }

    pub fn at(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x <= self.lower() {
            return self.values[0];
        }
        if x >= self.upper() {
            return self.values[self.values.len() - 1];
        }
        let k = self.interval(x);
        let h = self.grid[k + 1] - self.grid[k];
        let t = (x - self.grid[k]) / h;
        let (y0, y1, m0, m1) = (self.values[k], self.values[k + 1], self.slopes[k], self.slopes[k + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * h * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * h * m1;
        v.clamp(y0, y1)
    }

    /// Derivative of the interpolant (zero outside the grid).
    pub fn density(&self, x: f64) -> f64 {
        if !(x > self.lower() && x < self.upper()) {
            return 0.0;
        }
        let k = self.interval(x);
        self.hermite_derivative(k, (x - self.grid[k]) / (self.grid[k + 1] - self.grid[k]))
    }

    fn hermite_derivative(&self, k: usize, t: f64) -> f64 {
        let h = self.grid[k + 1] - self.grid[k];
        let (y0, y1, m0, m1) = (self.values[k], self.values[k + 1], self.slopes[k], self.slopes[k + 1]);
        (6.0 * t * t - 6.0 * t) * (y0 - y1) / h + (3.0 * t * t - 4.0 * t + 1.0) * m0 + (3.0 * t * t - 2.0 * t) * m1
    }

    /// `E f(X)`: Simpson's rule on every grid cell against the
    /// interpolant's density, plus the mass left outside the grid placed
    /// at the two ends.
    pub fn expect(&self, f: &dyn Fn(f64) -> f64) -> f64 {
        let n = self.grid.len();
        let mut acc = self.values[0] * f(self.grid[0]) + (1.0 - self.values[n - 1]) * f(self.grid[n - 1]);
        let mut f_left = f(self.grid[0]);
        for k in 0..n - 1 {
            let (a, b) = (self.grid[k], self.grid[k + 1]);
            let h = b - a;
            if self.values[k + 1] == self.values[k] {
                f_left = f(b);
                continue;
            }
            let pm = self.hermite_derivative(k, 0.5);
            let f_right = f(b);
            acc += h / 6.0 * (f_left * self.slopes[k] + 4.0 * f((a + b) / 2.0) * pm + f_right * self.slopes[k + 1]);
            f_left = f_right;
        }
        acc
    }

    /// Smallest grid-resolved `x` with `F(x) >= p`, by bisection.
    pub fn quantile(&self, p: f64) -> f64 {
        let (mut lo, mut hi) = (self.lower(), self.upper());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.at(mid) >= p {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-13 * (1.0 + hi.abs()) {
                break;
            }
        }
        hi
    }

    pub fn mean(&self) -> f64 {
        self.expect(&|x| x)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.expect(&|x| (x - m) * (x - m))
    }
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let d: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / (x[k + 1] - x[k])).collect();
    let mut m = alloc::vec![0.0; n];
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for k in 1..n - 1 {
        if d[k - 1] > 0.0 && d[k] > 0.0 {
            let (h0, h1) = (x[k] - x[k - 1], x[k + 1] - x[k]);
            let (w1, w2) = (2.0 * h1 + h0, h1 + 2.0 * h0);
            m[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
        }
    }
    m
}

/// Fritsch-Carlson limiter: keeps each cubic piece monotone.
fn limit_slopes(x: &[f64], y: &[f64], m: &mut [f64]) {
    for k in 0..x.len() - 1 {
        let delta = (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
        if delta == 0.0 {
            m[k] = 0.0;
            m[k + 1] = 0.0;
            continue;
        }
        let a = m[k] / delta;
        let b = m[k + 1] / delta;
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / libm::sqrt(r);
            m[k] = tau * a * delta;
            m[k + 1] = tau * b * delta;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn logistic() -> NumericCdf {
        let grid: Vec<f64> = (0..=400).map(|k| -20.0 + 0.1 * k as f64).collect();
        let vals = grid.iter().map(|x| 1.0 / (1.0 + libm::exp(-x))).collect();
        NumericCdf::new(grid, vals, None).unwrap()
    }

    #[test]
    fn interpolates_smooth_cdf() {
        let c = logistic();
        for k in 0..1000 {
            let x = -19.9 + 0.0397 * k as f64;
            let want = 1.0 / (1.0 + libm::exp(-x));
            assert!((c.at(x) - want).abs() < 5e-5, "{x}");
        }
        assert!((c.mean()).abs() < 1e-6);
        let pi2_3 = core::f64::consts::PI * core::f64::consts::PI / 3.0;
        assert!((c.variance() - pi2_3).abs() < 1e-3);
        assert!((c.quantile(0.5)).abs() < 1e-9);
    }

    #[test]
    fn monotone_on_steps() {
        let grid = alloc::vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let vals = alloc::vec![0.0, 0.0, 0.9, 0.9, 1.0];
        let c = NumericCdf::new(grid, vals, Some(alloc::vec![5.0; 5])).unwrap();
        let mut prev = 0.0;
        for k in 0..=4000 {
            let v = c.at(k as f64 * 1e-3);
            assert!(v >= prev);
            prev = v;
        }
        assert_eq!(c.at(-1.0), 0.0);
        assert_eq!(c.at(10.0), 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(NumericCdf::new(alloc::vec![0.0], alloc::vec![0.5], None).is_err());
        assert!(NumericCdf::new(alloc::vec![0.0, 0.0], alloc::vec![0.5, 0.6], None).is_err());
        assert!(NumericCdf::new(alloc::vec![0.0, 1.0], alloc::vec![0.6, 0.5], None).is_err());
        assert!(NumericCdf::new(alloc::vec![0.0, 1.0], alloc::vec![0.6, 1.5], None).is_err());
    }
}
