//! Fourier-bandlimited vector-valued signals on `[0, 1]`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, QuadOptions};

/// The index band `{-m, ..., m-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexBand {
    half_width: usize,
}

impl IndexBand {
    pub fn new(half_width: usize) -> Result<IndexBand> {
        if half_width == 0 {
            return Err(Error::InvalidParams(
                "band half width must be positive".into(),
            ));
        }
        Ok(IndexBand { half_width })
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn len(&self) -> usize {
        2 * self.half_width
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn lo(&self) -> i64 {
        -(self.half_width as i64)
    }

    pub fn hi(&self) -> i64 {
        self.half_width as i64 - 1
    }

    pub fn contains(&self, k: i64) -> bool {
        k >= self.lo() && k <= self.hi()
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.lo()..=self.hi()
    }

    /// Position of `k` in storage order.
    pub fn slot(&self, k: i64) -> Option<usize> {
        self.contains(k).then(|| (k - self.lo()) as usize)
    }
}

#[inline]
fn cis(theta: f64) -> Complex64 {
    let (s, c) = theta.sin_cos();
    Complex64::new(c, s)
}

/// Signal `f(x) = sum_k c_k exp(i 2 pi k x)` with `k` in the band and `m` channels.
#[derive(Debug, Clone, PartialEq)]
pub struct BandlimitedSignal {
    band: IndexBand,
    channels: usize,
    /// Channel-major: `coeffs[c * band.len() + slot(k)]`.
    coeffs: Vec<Complex64>,
}

impl BandlimitedSignal {
    /// Build from channel-major coefficients.
    pub fn new(band: IndexBand, channels: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if channels == 0 {
            return Err(Error::InvalidParams("at least one channel".into()));
        }
        if coeffs.len() != channels * band.len() {
            return Err(Error::Shape(format!(
                "expected {} coefficients, got {}",
                channels * band.len(),
                coeffs.len()
            )));
        }
        Ok(BandlimitedSignal {
            band,
            channels,
            coeffs,
        })
    }

    pub fn zero(band: IndexBand, channels: usize) -> Self {
        BandlimitedSignal {
            band,
            channels,
            coeffs: vec![Complex64::new(0.0, 0.0); channels * band.len()],
        }
    }

    /// Single channel signal with the listed `(k, coefficient)` pairs.
    pub fn from_modes(band: IndexBand, modes: &[(i64, Complex64)]) -> Result<Self> {
        let mut s = Self::zero(band, 1);
        for &(k, v) in modes {
            let slot = band
                .slot(k)
                .ok_or_else(|| Error::InvalidParams(format!("mode {k} outside the band")))?;
            s.coeffs[slot] = v;
        }
        Ok(s)
    }

    /// Real-valued signal from the nonnegative modes `0..m` of each channel.
    ///
    /// `positive[c * m + k]` is the coefficient of mode `k`. Negative modes are
    /// filled by conjugation, the imaginary part of mode 0 is dropped and mode
    /// `-m` is left at zero, since the band is not symmetric.
    pub fn real(band: IndexBand, channels: usize, positive: &[Complex64]) -> Result<Self> {
        let m = band.half_width();
        if positive.len() != channels * m {
            return Err(Error::Shape(format!(
                "expected {} coefficients",
                channels * m
            )));
        }
        let mut s = Self::zero(band, channels);
        for c in 0..channels {
            for k in 0..m {
                let v = positive[c * m + k];
                if k == 0 {
                    *s.coeff_mut(c, 0) = Complex64::new(v.re, 0.0);
                } else {
                    *s.coeff_mut(c, k as i64) = v;
                    *s.coeff_mut(c, -(k as i64)) = v.conj();
                }
            }
        }
        Ok(s)
    }

    pub fn band(&self) -> IndexBand {
        self.band
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, channel: usize, k: i64) -> Complex64 {
        match self.band.slot(k) {
            Some(s) => self.coeffs[channel * self.band.len() + s],
            None => Complex64::new(0.0, 0.0),
        }
    }

    fn coeff_mut(&mut self, channel: usize, k: i64) -> &mut Complex64 {
        let s = self.band.slot(k).expect("mode in band");
        &mut self.coeffs[channel * self.band.len() + s]
    }

    /// Squared coefficient norm across channels at mode `k`.
    pub fn mode_energy(&self, k: i64) -> f64 {
        (0..self.channels)
            .map(|c| self.coeff(c, k).norm_sqr())
            .sum()
    }

    /// Evaluate at `x` in `[0, 1]`.
    pub fn evaluate(&self, x: f64) -> Result<Vec<Complex64>> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain { x });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.channels];
        self.eval_into(x, &mut out);
        Ok(out)
    }

    /// Evaluate at any real `x` (the signal is 1-periodic) without a domain check.
    pub fn eval_into(&self, x: f64, out: &mut [Complex64]) {
        for o in out.iter_mut() {
            *o = Complex64::new(0.0, 0.0);
        }
        let n = self.band.len();
        for (slot, k) in self.band.iter().enumerate() {
            let e = cis(2.0 * PI * (k as f64) * x);
            for (c, o) in out.iter_mut().enumerate() {
                *o += self.coeffs[c * n + slot] * e;
            }
        }
    }

    /// Samples `f(j / 2N)` for `j = 0..2N`.
    pub fn sample_uniform(&self, n: usize) -> SampleVector {
        let count = 2 * n;
        let mut values = vec![Complex64::new(0.0, 0.0); count * self.channels];
        let mut buf = vec![Complex64::new(0.0, 0.0); self.channels];
        for j in 0..count {
            // exp(i 2 pi k j / 2N) with the exponent reduced exactly
            for o in buf.iter_mut() {
                *o = Complex64::new(0.0, 0.0);
            }
            for (slot, k) in self.band.iter().enumerate() {
                let p = (k * j as i64).rem_euclid(count as i64);
                let e = cis(2.0 * PI * p as f64 / count as f64);
                for (c, o) in buf.iter_mut().enumerate() {
                    *o += self.coeffs[c * self.band.len() + slot] * e;
                }
            }
            for c in 0..self.channels {
                values[c * count + j] = buf[c];
            }
        }
        SampleVector {
            half_count: n,
            channels: self.channels,
            values,
            sub_nyquist: n < self.band.half_width(),
        }
    }

    /// `sum_k |c_k|^2`, the squared L2 norm on `[0, 1]`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Scale to unit energy; the zero signal is returned unchanged.
    pub fn normalized(mut self) -> Self {
        let e = self.energy();
        if e > 0.0 {
            let s = 1.0 / e.sqrt();
            for c in self.coeffs.iter_mut() {
                *c *= s;
            }
        }
        self
    }

    pub fn to_json(&self) -> SignalJson {
        SignalJson {
            m_frak: self.band.half_width(),
            channels: self.channels,
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }

    pub fn from_json(j: &SignalJson) -> Result<Self> {
        let band = IndexBand::new(j.m_frak)?;
        let coeffs = j
            .coeffs
            .iter()
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        Self::new(band, j.channels, coeffs)
    }
}

/// Coefficients drawn i.i.d. standard complex normal, deterministic in `seed`.
pub fn random_signal(
    m_frak: usize,
    channels: usize,
    seed: u64,
    normalize: bool,
) -> Result<BandlimitedSignal> {
    let band = IndexBand::new(m_frak)?;
    if channels == 0 {
        return Err(Error::InvalidParams("at least one channel".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let coeffs = (0..channels * band.len())
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(s * re, s * im)
        })
        .collect();
    let f = BandlimitedSignal::new(band, channels, coeffs)?;
    Ok(if normalize { f.normalized() } else { f })
}

/// Real-valued variant of [`random_signal`].
pub fn random_real_signal(
    m_frak: usize,
    channels: usize,
    seed: u64,
    normalize: bool,
) -> Result<BandlimitedSignal> {
    let base = random_signal(m_frak, channels, seed, false)?;
    let band = base.band();
    let positive: Vec<Complex64> = (0..channels)
        .flat_map(|c| (0..m_frak as i64).map(move |k| (c, k)))
        .map(|(c, k)| base.coeff(c, k))
        .collect();
    let f = BandlimitedSignal::real(band, channels, &positive)?;
    Ok(if normalize { f.normalized() } else { f })
}

/// The vector of values `f(j / 2N)`, `j = 0..2N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleVector {
    half_count: usize,
    channels: usize,
    /// Channel-major: `values[c * 2N + j]`.
    values: Vec<Complex64>,
    sub_nyquist: bool,
}

impl SampleVector {
    pub fn new(half_count: usize, channels: usize, values: Vec<Complex64>) -> Result<Self> {
        if half_count == 0 || channels == 0 {
            return Err(Error::InvalidParams("empty sample vector".into()));
        }
        if values.len() != 2 * half_count * channels {
            return Err(Error::Shape(format!(
                "expected {} values, got {}",
                2 * half_count * channels,
                values.len()
            )));
        }
        Ok(SampleVector {
            half_count,
            channels,
            values,
            sub_nyquist: false,
        })
    }

    pub fn half_count(&self) -> usize {
        self.half_count
    }

    pub fn len(&self) -> usize {
        2 * self.half_count
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// True when the signal band was wider than the sampling rate allows.
    pub fn sub_nyquist(&self) -> bool {
        self.sub_nyquist
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, channel: usize, j: usize) -> Complex64 {
        self.values[channel * self.len() + j]
    }

    /// Entry `j` as an `m`-vector.
    pub fn entry(&self, j: usize) -> Vec<Complex64> {
        (0..self.channels).map(|c| self.value(c, j)).collect()
    }

    pub fn set_value(&mut self, channel: usize, j: usize, v: Complex64) {
        let n = self.len();
        self.values[channel * n + j] = v;
    }

    /// `a * self + b * other`.
    pub fn combine(
        &self,
        a: Complex64,
        other: &SampleVector,
        b: Complex64,
    ) -> Result<SampleVector> {
        if self.half_count != other.half_count || self.channels != other.channels {
            return Err(Error::Shape("sample vectors differ in shape".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        SampleVector::new(self.half_count, self.channels, values)
    }

    /// `(1/2N) sum_j |f(j/2N)|^2`, the discrete energy on the uniform grid.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.len() as f64
    }

    /// `sum_j |f(j/2N)|^2` without the grid weight.
    pub fn raw_energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn to_json(&self) -> SamplesJson {
        SamplesJson {
            n: self.half_count,
            channels: self.channels,
            values: self.values.iter().map(|c| [c.re, c.im]).collect(),
        }
    }

    pub fn from_json(j: &SamplesJson) -> Result<Self> {
        let values = j
            .values
            .iter()
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        Self::new(j.n, j.channels, values)
    }
}

/// Recover the band coefficients from uniform samples by the discrete transform.
pub fn coeffs_from_samples(samples: &SampleVector, band: IndexBand) -> Result<BandlimitedSignal> {
    let n = samples.half_count();
    if band.half_width() > n {
        return Err(Error::Aliasing {
            m_frak: band.half_width(),
            n,
        });
    }
    let count = samples.len();
    let mut out = BandlimitedSignal::zero(band, samples.channels());
    for c in 0..samples.channels() {
        for k in band.iter() {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..count {
                let p = (k * j as i64).rem_euclid(count as i64);
                acc += samples.value(c, j) * cis(-2.0 * PI * p as f64 / count as f64);
            }
            *out.coeff_mut(c, k) = acc / count as f64;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalJson {
    pub m_frak: usize,
    pub channels: usize,
    pub coeffs: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplesJson {
    #[serde(rename = "N")]
    pub n: usize,
    pub channels: usize,
    pub values: Vec<[f64; 2]>,
}

/// `(int_a^b |f - g|^2)^(1/2)` for two `m`-channel evaluables.
///
/// The breakpoints isolate kinks of either function. When refinement stops at
/// the panel cap the error carries the best estimate of the norm.
pub fn l2_error<F, G>(
    m: usize,
    f: F,
    g: G,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: &QuadOptions,
) -> Result<f64>
where
    F: Fn(f64, &mut [Complex64]),
    G: Fn(f64, &mut [Complex64]),
{
    if a >= b {
        return Err(Error::InvalidParams(format!("empty interval [{a}, {b}]")));
    }
    let mut fv = vec![Complex64::new(0.0, 0.0); m];
    let mut gv = vec![Complex64::new(0.0, 0.0); m];
    let run = quadrature::adaptive(
        1,
        |x, out| {
            f(x, &mut fv);
            g(x, &mut gv);
            out[0] = fv.iter().zip(&gv).map(|(p, q)| (p - q).norm_sqr()).sum();
        },
        a,
        b,
        breaks,
        opts,
    );
    let v = run.value[0].max(0.0).sqrt();
    if run.converged {
        Ok(v)
    } else {
        Err(Error::ToleranceNotMet {
            estimate: v,
            panels: run.panels,
        })
    }
}
