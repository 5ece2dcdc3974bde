use std::f64::consts::PI;

use num_complex::Complex64;

use super::gaussian::{wrap, PeriodicGaussian, Route};
use super::params::RegularizerParams;
use crate::error::{Error, Result};
use crate::quadrature::{self, QuadOptions};
use crate::signal::SampleVector;

/// `sin(pi t)` with the argument reduced exactly, so integers give zero.
#[inline]
pub fn sin_pi(t: f64) -> f64 {
    let n = t.round();
    let s = (PI * (t - n)).sin();
    if (n as i64) & 1 == 0 {
        s
    } else {
        -s
    }
}

/// `s_N(x) = (1/2N) sum_{k=-N}^{N-1} exp(i 2 pi k x)`.
///
/// Uses `exp(-i pi x) sin(2 pi N x) / (2N sin(pi x))`, falling back to the
/// direct sum next to the removable singularity.
pub fn eval_sn(x: f64, n: usize) -> Complex64 {
    let u = wrap(x);
    let den = sin_pi(u);
    if den.abs() < 1e-8 {
        return eval_sn_direct(u, n);
    }
    let nf = n as f64;
    let amp = sin_pi(2.0 * nf * u) / (2.0 * nf * den);
    let (s, c) = (PI * u).sin_cos();
    Complex64::new(c * amp, -s * amp)
}

/// The 2N-term sum for `s_N`, used as a fallback and as a reference.
pub fn eval_sn_direct(x: f64, n: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in -(n as i64)..(n as i64) {
        let t = wrap((k as f64) * wrap(x));
        let (s, c) = (2.0 * PI * t).sin_cos();
        acc += Complex64::new(c, s);
    }
    acc / (2 * n) as f64
}

/// `s_N^(l)(x)` for `l = 0..=3`; order zero from the closed form.
pub fn sn_derivs(x: f64, n: usize) -> [Complex64; 4] {
    let u = wrap(x);
    let (s1, c1) = (2.0 * PI * u).sin_cos();
    let step = Complex64::new(c1, s1);
    let nf = n as f64;
    let (s0, c0) = (2.0 * PI * wrap(nf * u)).sin_cos();
    // e^{-i 2 pi N u}
    let mut w = Complex64::new(c0, -s0);
    let mut acc = [Complex64::new(0.0, 0.0); 4];
    for k in -(n as i64)..(n as i64) {
        let kf = k as f64;
        acc[1] += w * kf;
        acc[2] += w * (kf * kf);
        acc[3] += w * (kf * kf * kf);
        w *= step;
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let norm = 1.0 / (2.0 * nf);
    [
        eval_sn(u, n),
        acc[1] * two_pi_i * norm,
        acc[2] * (two_pi_i * two_pi_i) * norm,
        acc[3] * (two_pi_i * two_pi_i * two_pi_i) * norm,
    ]
}

const BINOM: [[f64; 4]; 4] = [
    [1.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0],
    [1.0, 3.0, 3.0, 1.0],
];

/// The product `h = s_N * G_{r,sigma}` and its derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingKernel {
    params: RegularizerParams,
    gaussian: PeriodicGaussian,
}

impl SamplingKernel {
    pub fn new(params: RegularizerParams) -> Result<Self> {
        params.validate()?;
        let gaussian = PeriodicGaussian::new(params.sigma, params.series_tol)?;
        Ok(SamplingKernel { params, gaussian })
    }

    pub fn params(&self) -> &RegularizerParams {
        &self.params
    }

    pub fn gaussian(&self) -> &PeriodicGaussian {
        &self.gaussian
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn r(&self) -> f64 {
        self.params.r
    }

    /// Inside the support `[-r, r]` mod 1.
    #[inline]
    pub fn in_support(&self, x: f64) -> bool {
        wrap(x).abs() <= self.params.r
    }

    /// Truncated regularizer derivative: `G^(order)(x)` on the support, zero elsewhere.
    pub fn regularizer_deriv(&self, x: f64, order: u32) -> f64 {
        self.regularizer_deriv_route(x, order, self.gaussian.preferred_route())
    }

    pub fn regularizer_deriv_route(&self, x: f64, order: u32, route: Route) -> f64 {
        if !self.in_support(x) {
            return 0.0;
        }
        self.gaussian.deriv(x, order, route)
    }

    /// `h^(k)(x)` for `k = 0..=3`, zero outside the support.
    pub fn derivs(&self, x: f64) -> [Complex64; 4] {
        let zero = Complex64::new(0.0, 0.0);
        if !self.in_support(x) {
            return [zero; 4];
        }
        let s = sn_derivs(x, self.params.n);
        let g = self.gaussian.derivs(x);
        let mut out = [zero; 4];
        for (k, o) in out.iter_mut().enumerate() {
            for l in 0..=k {
                *o += s[l] * (BINOM[k][l] * g[k - l]);
            }
        }
        out
    }

    /// `h^(order)(x)`.
    pub fn eval(&self, x: f64, order: u32) -> Complex64 {
        if order == 0 {
            return self.value(x);
        }
        self.derivs(x)[order.min(3) as usize]
    }

    /// `h(x)` alone, cheaper than [`Self::derivs`].
    pub fn value(&self, x: f64) -> Complex64 {
        if !self.in_support(x) {
            return Complex64::new(0.0, 0.0);
        }
        eval_sn(x, self.params.n) * self.gaussian.eval(x)
    }

    /// `h''(x)`, the factor shared by the graphon and graph kernels.
    ///
    /// For `G*(x, y) = d^2/dy^2 h(x - y)` the inner derivative contributes
    /// `(-1)^2`, so `G*(x, y) = h''(x - y)`.
    pub fn second(&self, x: f64) -> Complex64 {
        self.derivs(x)[2]
    }

    /// Window of sample indices `j` with `|x - j/2N| mod 1 <= r`.
    pub fn sample_window(&self, x: f64) -> impl Iterator<Item = usize> + '_ {
        let count = 2 * self.params.n as i64;
        let lo = ((x - self.params.r) * count as f64).ceil() as i64;
        let hi = ((x + self.params.r) * count as f64).floor() as i64;
        (lo..=hi)
            .map(move |j| j.rem_euclid(count) as usize)
            .filter(move |&j| self.in_support(x - j as f64 / count as f64))
    }

    /// `R f(x) = sum_j f(j/2N) h(x - j/2N)`.
    pub fn reconstruct(&self, samples: &SampleVector, x: f64) -> Result<Vec<Complex64>> {
        if samples.half_count() != self.params.n {
            return Err(Error::Shape(format!(
                "samples at N={} but kernel at N={}",
                samples.half_count(),
                self.params.n
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); samples.channels()];
        self.reconstruct_into(samples, x, &mut out);
        Ok(out)
    }

    pub fn reconstruct_into(&self, samples: &SampleVector, x: f64, out: &mut [Complex64]) {
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        let count = samples.len() as f64;
        for j in self.sample_window(x) {
            let h = self.value(x - j as f64 / count);
            for (c, o) in out.iter_mut().enumerate() {
                *o += samples.value(c, j) * h;
            }
        }
    }

    /// Both sides of the integration-by-parts identity; returns `|left - right|`.
    ///
    /// Left is `h(x - j/2N)`. Right is
    /// `(x + r - j/2N) h'(-r) + h(-r) + int_{x-r}^{x+r} ReLU(y - j/2N) h''(x - y) dy`.
    pub fn verify_integration_by_parts(&self, x: f64, j: usize) -> Result<f64> {
        let r = self.params.r;
        let count = 2 * self.params.n;
        if j >= count {
            return Err(Error::InvalidParams(format!(
                "sample index {j} out of range"
            )));
        }
        if !(x >= r && x <= 1.0 - r) {
            return Err(Error::Domain { x });
        }
        let a = j as f64 / count as f64;
        let d = x - a;
        if !(d >= -r && d < r) {
            return Err(Error::InvalidParams(format!(
                "x - j/2N = {d} not in [-r, r)"
            )));
        }
        let left = self.value(d);
        let edge = self.derivs(-r);
        let opts = QuadOptions {
            rel_tol: 1e-12,
            abs_tol: 1e-13,
            ..QuadOptions::default()
        };
        let integral = quadrature::integrate_complex(
            1,
            |y, out| {
                out[0] = if y > a {
                    self.second(x - y) * (y - a)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            },
            x - r,
            x + r,
            &[a, x],
            &opts,
        )?;
        let right = edge[1] * (x + r - a) + edge[0] + integral[0];
        Ok((left - right).norm())
    }
}

/// Plain sampling series `sum_j f(j/2N) s_N(x - j/2N)`, exact on the band.
pub fn reconstruct_exact(samples: &SampleVector, x: f64) -> Vec<Complex64> {
    let n = samples.half_count();
    let count = samples.len();
    let mut out = vec![Complex64::new(0.0, 0.0); samples.channels()];
    for j in 0..count {
        let s = eval_sn(x - j as f64 / count as f64, n);
        for (c, o) in out.iter_mut().enumerate() {
            *o += samples.value(c, j) * s;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sn_reference_values() {
        for n in [1usize, 4, 7, 32] {
            assert!((eval_sn(0.0, n) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
            for j in 1..2 * n {
                assert!(eval_sn(j as f64 / (2 * n) as f64, n).norm() < 1e-14);
            }
        }
        let v = eval_sn(0.1, 4);
        assert!((v - Complex64::new(0.22612, -0.07347)).norm() < 1e-5);
        assert!((v - eval_sn_direct(0.1, 4)).norm() < 1e-14);
    }

    #[test]
    fn sn_derivatives_by_differences() {
        let n = 6;
        let h = 1e-5;
        let x = 0.173;
        let d = sn_derivs(x, n);
        let fd1 = (eval_sn(x + h, n) - eval_sn(x - h, n)) / (2.0 * h);
        let fd2 = (eval_sn(x + h, n) - 2.0 * eval_sn(x, n) + eval_sn(x - h, n)) / (h * h);
        assert!((d[1] - fd1).norm() < 1e-6 * d[1].norm());
        assert!((d[2] - fd2).norm() < 1e-4 * d[2].norm());
    }

    #[test]
    fn kernel_support_and_normalization() {
        let p = RegularizerParams::standard(2, 32).unwrap();
        let k = SamplingKernel::new(p).unwrap();
        assert!((k.eval(0.0, 0) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        for order in 0..=3 {
            assert_eq!(k.eval(p.r + 1e-9, order), Complex64::new(0.0, 0.0));
            assert_eq!(k.eval(0.5, order), Complex64::new(0.0, 0.0));
        }
        assert!(k.regularizer_deriv(0.0, 1).abs() < 1e-12);
    }

    #[test]
    fn window_indices() {
        let p = RegularizerParams::standard(2, 32).unwrap();
        let k = SamplingKernel::new(p).unwrap();
        let w: Vec<usize> = k.sample_window(0.02).collect();
        assert!(w.contains(&0) && w.contains(&63));
        for j in 0..64 {
            let inside = k.in_support(0.02 - j as f64 / 64.0);
            assert_eq!(inside, w.contains(&j));
        }
    }
}
