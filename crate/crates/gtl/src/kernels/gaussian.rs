use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{Error, Result};

/// Which series evaluates the periodic Gaussian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Fourier,
    Poisson,
}

/// Reduce to `[-1/2, 1/2)`.
#[inline]
pub fn wrap(x: f64) -> f64 {
    let y = x - x.round();
    if y >= 0.5 {
        y - 1.0
    } else if y < -0.5 {
        y + 1.0
    } else {
        y
    }
}

/// The periodic Gaussian `G(x) = c * sum_k exp(-k^2 / (2 sigma^2)) cos(2 pi k x)`,
/// normalized so that `G(0) = 1`.
///
/// The same function is `d * sum_l exp(-2 pi^2 sigma^2 (x + l)^2)` with
/// `d = sigma c sqrt(2 pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicGaussian {
    sigma: f64,
    c_sigma: f64,
    d_sigma: f64,
    fourier_cutoff: usize,
    comb_cutoff: usize,
    tol: f64,
    /// `exp(-k^2 / (2 sigma^2))` for `k = 0..=K_f`.
    weights: Vec<f64>,
}

impl PeriodicGaussian {
    pub fn new(sigma: f64, tol: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "sigma {sigma} must be positive"
            )));
        }
        let s2 = sigma * sigma;
        // Mills-ratio tail: sum_{k>K} (2 pi k)^3 e^{-k^2/2s^2} stays below tol.
        let mut kf = 1usize;
        loop {
            let k = kf as f64;
            let tail = (s2 / k) * (-k * k / (2.0 * s2)).exp() * (2.0 * PI * k).powi(3).max(1.0);
            if tail < tol * 1e-3 {
                break;
            }
            kf += 1;
        }
        let a = 2.0 * PI * PI * s2;
        let mut lc = 1usize;
        loop {
            let v = lc as f64 - 0.5;
            let tail = (-a * v * v).exp() * (1.0 + (a.sqrt() * (v + 1.0)).powi(3));
            if tail < tol * 1e-3 {
                break;
            }
            lc += 1;
        }
        let weights: Vec<f64> = (0..=kf)
            .map(|k| (-((k * k) as f64) / (2.0 * s2)).exp())
            .collect();
        // Evaluate the normalization with whichever dual series is shorter.
        let (c_sigma, d_sigma) = if sigma >= 1.0 {
            let theta: f64 = 1.0 + 2.0 * (1..=lc).map(|l| (-a * (l * l) as f64).exp()).sum::<f64>();
            let d = 1.0 / theta;
            (d / (sigma * (2.0 * PI).sqrt()), d)
        } else {
            let sum: f64 = 1.0 + 2.0 * weights[1..].iter().sum::<f64>();
            let c = 1.0 / sum;
            (c, sigma * c * (2.0 * PI).sqrt())
        };
        Ok(PeriodicGaussian {
            sigma,
            c_sigma,
            d_sigma,
            fourier_cutoff: kf,
            comb_cutoff: lc,
            tol,
            weights,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn c_sigma(&self) -> f64 {
        self.c_sigma
    }

    pub fn d_sigma(&self) -> f64 {
        self.d_sigma
    }

    pub fn fourier_cutoff(&self) -> usize {
        self.fourier_cutoff
    }

    pub fn comb_cutoff(&self) -> usize {
        self.comb_cutoff
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `2 pi^2 sigma^2`, the comb exponent.
    pub fn comb_rate(&self) -> f64 {
        2.0 * PI * PI * self.sigma * self.sigma
    }

    /// The series that converges faster for this sigma.
    pub fn preferred_route(&self) -> Route {
        if self.sigma >= 1.0 {
            Route::Poisson
        } else {
            Route::Fourier
        }
    }

    /// Fourier coefficient `c exp(-k^2 / (2 sigma^2))` of the untruncated Gaussian.
    pub fn fourier_coeff(&self, k: i64) -> f64 {
        let k = k as f64;
        self.c_sigma * (-k * k / (2.0 * self.sigma * self.sigma)).exp()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.deriv(x, 0, self.preferred_route())
    }

    pub fn eval_route(&self, x: f64, route: Route) -> f64 {
        self.deriv(x, 0, route)
    }

    /// Derivative of order `0..=3`.
    pub fn deriv(&self, x: f64, order: u32, route: Route) -> f64 {
        let mut out = [0.0; 4];
        match route {
            Route::Fourier => self.fourier_all(x, &mut out),
            Route::Poisson => self.poisson_all(x, &mut out),
        }
        out[order.min(3) as usize]
    }

    /// Orders 0 through 3 at once, preferred route.
    pub fn derivs(&self, x: f64) -> [f64; 4] {
        let mut out = [0.0; 4];
        match self.preferred_route() {
            Route::Fourier => self.fourier_all(x, &mut out),
            Route::Poisson => self.poisson_all(x, &mut out),
        }
        out
    }

    fn fourier_all(&self, x: f64, out: &mut [f64; 4]) {
        let x = wrap(x);
        let (s1, c1) = (2.0 * PI * x).sin_cos();
        // cos/sin(2 pi k x) by the angle-addition recurrence
        let (mut s, mut c) = (0.0f64, 1.0f64);
        let mut acc = [self.weights[0], 0.0, 0.0, 0.0];
        for k in 1..=self.fourier_cutoff {
            let sn = s * c1 + c * s1;
            let cn = c * c1 - s * s1;
            s = sn;
            c = cn;
            let w = 2.0 * self.weights[k];
            let om = 2.0 * PI * k as f64;
            acc[0] += w * c;
            acc[1] -= w * om * s;
            acc[2] -= w * om * om * c;
            acc[3] += w * om * om * om * s;
        }
        for (o, a) in out.iter_mut().zip(acc) {
            *o = self.c_sigma * a;
        }
    }

    fn poisson_all(&self, x: f64, out: &mut [f64; 4]) {
        let x = wrap(x);
        let a = self.comb_rate();
        let sa = a.sqrt();
        let mut acc = [0.0; 4];
        let lc = self.comb_cutoff as i64;
        for l in -lc..=lc {
            let u = x + l as f64;
            let e = (-a * u * u).exp();
            if e == 0.0 {
                continue;
            }
            // d^n/du^n e^{-a u^2} = (-sqrt a)^n H_n(sqrt a u) e^{-a u^2}
            let t = sa * u;
            let h1 = 2.0 * t;
            let h2 = 4.0 * t * t - 2.0;
            let h3 = 8.0 * t * t * t - 12.0 * t;
            acc[0] += e;
            acc[1] -= sa * h1 * e;
            acc[2] += a * h2 * e;
            acc[3] -= a * sa * h3 * e;
        }
        for (o, v) in out.iter_mut().zip(acc) {
            *o = self.d_sigma * v;
        }
    }

    /// Taylor coefficients `g_n = G^(n)(x0) / n!` for `n < len`, Poisson form.
    pub fn taylor(&self, x0: f64, len: usize) -> Vec<f64> {
        let a = self.comb_rate();
        let mut out = vec![0.0; len];
        let lc = self.comb_cutoff as i64 + 1;
        let mut e = vec![0.0; len];
        for l in -lc..=lc {
            let v = x0 + l as f64;
            let base = (-a * v * v).exp();
            if base == 0.0 {
                continue;
            }
            // exp(p(t)), p(t) = -2 a v t - a t^2, by n e_n = p1 e_{n-1} + 2 p2 e_{n-2}
            let p1 = -2.0 * a * v;
            let p2 = -a;
            e[0] = base;
            if len > 1 {
                e[1] = p1 * base;
            }
            for n in 2..len {
                e[n] = (p1 * e[n - 1] + 2.0 * p2 * e[n - 2]) / n as f64;
            }
            for (o, v) in out.iter_mut().zip(&e) {
                *o += self.d_sigma * v;
            }
        }
        out
    }

    /// Double-double evaluation on `|x| < 1/2`, Poisson form.
    pub fn eval_dd(&self, x: Dd, rate: Dd, norm: Dd) -> Dd {
        let mut acc = Dd::ZERO;
        for l in -1i32..=1 {
            let u = x.add_f64(l as f64);
            let arg = -(rate * u.sqr());
            if arg.hi < -745.0 {
                continue;
            }
            acc = acc + arg.exp();
        }
        norm * acc
    }

    /// `(2 pi^2 sigma^2, d)` in double-double, for [`Self::eval_dd`].
    ///
    /// Valid for `sigma >= 1`, where three comb terms resolve every point of
    /// `[-1/2, 1/2)` to double-double accuracy; smaller sigma is rejected.
    pub fn dd_constants(&self) -> Result<(Dd, Dd)> {
        if self.sigma < 1.0 {
            return Err(Error::InvalidParams(
                "double-double evaluation needs sigma >= 1".into(),
            ));
        }
        let rate = (crate::dd::PI * crate::dd::PI).mul_f64(2.0 * self.sigma * self.sigma);
        let mut theta = Dd::ONE;
        let mut l = 1.0f64;
        loop {
            let t = (-(rate.mul_f64(l * l))).exp();
            if t.hi < 1e-34 {
                break;
            }
            theta = theta + t.ldexp(1);
            l += 1.0;
        }
        Ok((rate, Dd::ONE / theta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_at_zero() {
        for &s in &[0.3, 0.5, 1.0, 2.0, 3.64, 10.0, 40.0] {
            let g = PeriodicGaussian::new(s, 1e-16).unwrap();
            for route in [Route::Fourier, Route::Poisson] {
                assert!(
                    (g.eval_route(0.0, route) - 1.0).abs() < 1e-14,
                    "{s} {route:?}"
                );
            }
            assert!(g.c_sigma() <= 1.0);
        }
    }

    #[test]
    fn routes_agree_on_derivatives() {
        let g = PeriodicGaussian::new(2.0, 1e-16).unwrap();
        for i in 0..40 {
            let x = -0.5 + i as f64 / 40.0;
            for order in 0..=3 {
                let f = g.deriv(x, order, Route::Fourier);
                let p = g.deriv(x, order, Route::Poisson);
                let scale = (2.0 * PI * 2.0 * 6.0).powi(order as i32);
                assert!((f - p).abs() < 1e-12 * scale, "x={x} order={order}");
            }
        }
    }

    #[test]
    fn taylor_matches_derivatives() {
        let g = PeriodicGaussian::new(3.0, 1e-16).unwrap();
        let x0 = 0.21;
        let t = g.taylor(x0, 4);
        let d = g.derivs(x0);
        assert!((t[0] - d[0]).abs() < 1e-14);
        assert!((t[1] - d[1]).abs() < 1e-12 * d[1].abs().max(1.0));
        assert!((2.0 * t[2] - d[2]).abs() < 1e-11 * d[2].abs().max(1.0));
        assert!((6.0 * t[3] - d[3]).abs() < 1e-10 * d[3].abs().max(1.0));
    }

    #[test]
    fn dd_matches_f64() {
        let g = PeriodicGaussian::new(3.6, 1e-16).unwrap();
        let (rate, norm) = g.dd_constants().unwrap();
        for &x in &[0.0, 0.1, -0.3, 0.45] {
            let v = g.eval_dd(Dd::new(x), rate, norm).to_f64();
            assert!((v - g.eval(x)).abs() <= 1e-13 * g.eval(x));
        }
    }

    #[test]
    fn wrap_convention() {
        assert_eq!(wrap(0.5), -0.5);
        assert_eq!(wrap(-0.5), -0.5);
        assert!((wrap(0.7) + 0.3).abs() < 1e-15);
        assert!((wrap(1.25) - 0.25).abs() < 1e-15);
    }
}
