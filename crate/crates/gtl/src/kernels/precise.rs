//! Reconstruction error measured in double-double arithmetic.
//!
//! With the default schedule `f - R f` is of order 1e-17 while `f` is of
//! order one, so the difference must be formed at roughly 32 digits before
//! it is squared and integrated.

use super::gaussian::PeriodicGaussian;
use super::params::RegularizerParams;
use crate::dd::{Dd, DdComplex};
use crate::error::{Error, Result};
use crate::quadrature::{self, QuadOptions};
use crate::signal::BandlimitedSignal;

/// An evaluator for `f(x) - R f(x)` at double-double precision.
#[derive(Debug, Clone)]
pub struct PreciseError {
    n: usize,
    r: f64,
    channels: usize,
    band: Vec<i64>,
    coeffs: Vec<DdComplex>,
    /// Channel-major samples `f(j/2N)`.
    samples: Vec<DdComplex>,
    rate: Dd,
    norm: Dd,
    gaussian: PeriodicGaussian,
}

impl PreciseError {
    pub fn new(signal: &BandlimitedSignal, params: &RegularizerParams) -> Result<Self> {
        params.validate()?;
        if signal.band().half_width() > params.n {
            return Err(Error::Aliasing {
                m_frak: signal.band().half_width(),
                n: params.n,
            });
        }
        let gaussian = PeriodicGaussian::new(params.sigma, params.series_tol)?;
        let (rate, norm) = gaussian.dd_constants()?;
        let n = params.n;
        let count = 2 * n;
        let band: Vec<i64> = signal.band().iter().collect();
        let channels = signal.channels();
        let coeffs: Vec<DdComplex> = (0..channels)
            .flat_map(|c| band.iter().map(move |&k| (c, k)))
            .map(|(c, k)| {
                let v = signal.coeff(c, k);
                DdComplex::new(Dd::new(v.re), Dd::new(v.im))
            })
            .collect();
        let mut samples = vec![DdComplex::ZERO; channels * count];
        for j in 0..count {
            for (slot, &k) in band.iter().enumerate() {
                let p = (k * j as i64).rem_euclid(count as i64);
                let e = DdComplex::cis_pi(Dd::new(p as f64) / Dd::new(n as f64));
                for c in 0..channels {
                    let s = &mut samples[c * count + j];
                    *s = *s + coeffs[c * band.len() + slot] * e;
                }
            }
        }
        Ok(PreciseError {
            n,
            r: params.r,
            channels,
            band,
            coeffs,
            samples,
            rate,
            norm,
            gaussian,
        })
    }

    /// `s_N(w) G(w)` for `|w| <= 1/2`.
    fn kernel(&self, w: Dd) -> DdComplex {
        let two_n = (2 * self.n) as f64;
        let (sw, cw) = w.sin_cos_pi();
        let g = self.gaussian.eval_dd(w, self.rate, self.norm);
        if sw.hi.abs() < 1e-8 {
            let mut acc = DdComplex::ZERO;
            for k in -(self.n as i64)..(self.n as i64) {
                acc = acc + DdComplex::cis_pi(w.mul_f64(2.0 * k as f64));
            }
            return acc.scale(g / Dd::new(two_n));
        }
        let (s2, _) = w.mul_f64(two_n).sin_cos_pi();
        let amp = s2 / sw.mul_f64(two_n) * g;
        DdComplex::new(cw * amp, -(sw * amp))
    }

    /// `sum_c |f_c(x) - R f_c(x)|^2`.
    pub fn squared_error(&self, x: f64) -> f64 {
        let count = 2 * self.n;
        let xd = Dd::new(x);
        let mut err = vec![DdComplex::ZERO; self.channels];
        for (slot, &k) in self.band.iter().enumerate() {
            let e = DdComplex::cis_pi(xd.mul_f64(2.0 * k as f64));
            for (c, v) in err.iter_mut().enumerate() {
                *v = *v + self.coeffs[c * self.band.len() + slot] * e;
            }
        }
        let lo = ((x - self.r) * count as f64).ceil() as i64 - 1;
        let hi = ((x + self.r) * count as f64).floor() as i64 + 1;
        for jj in lo..=hi {
            let j = jj.rem_euclid(count as i64) as usize;
            let u = xd - Dd::new(jj as f64) / Dd::new(count as f64);
            if u.hi.abs() > self.r {
                continue;
            }
            let h = self.kernel(u);
            for (c, v) in err.iter_mut().enumerate() {
                *v = *v - self.samples[c * count + j] * h;
            }
        }
        err.iter().map(|v| v.norm_sqr().to_f64()).sum()
    }

    /// Kinks of the error: the truncation edges `j/2N +- r` mod 1.
    pub fn breakpoints(&self) -> Vec<f64> {
        let count = 2 * self.n;
        let mut out = Vec::with_capacity(2 * count);
        for j in 0..count {
            let c = j as f64 / count as f64;
            for e in [c - self.r, c + self.r] {
                out.push(e.rem_euclid(1.0));
            }
        }
        out
    }
}

/// `||f - R f||_{L^2([0,1])}` by adaptive quadrature of the double-double error.
pub fn measured_l2_error(
    signal: &BandlimitedSignal,
    params: &RegularizerParams,
    opts: &QuadOptions,
) -> Result<f64> {
    let p = PreciseError::new(signal, params)?;
    let breaks = p.breakpoints();
    let v = quadrature::integrate(|x| p.squared_error(x), 0.0, 1.0, &breaks, opts).map_err(
        |e| match e {
            Error::ToleranceNotMet { estimate, panels } => Error::ToleranceNotMet {
                estimate: estimate.max(0.0).sqrt(),
                panels,
            },
            other => other,
        },
    )?;
    Ok(v.max(0.0).sqrt())
}
