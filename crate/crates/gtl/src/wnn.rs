//! The two-layer graphon neural network `Psi_f`.
//!
//! Layer one applies `rho_j(y) = ReLU(y - j/2N)`, layer two filters with
//! `K(x, y) = h''(x - y) W(x, y) / W_x` and contracts with the weights
//! `f(j/2N)`. By linearity the output is the filter applied to
//! `f_sharp(y) = sum_j f(j/2N) rho_j(y)`, which is what `forward` evaluates.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphon::{local_average, Graphon, RegularityCertificate};
use crate::kernels::{RegularizerParams, SamplingKernel};
use crate::quadrature::{self, QuadOptions};
use crate::signal::{l2_error, BandlimitedSignal, SampleVector};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Smallest `W_x` accepted as a denominator.
pub const MIN_LOCAL_AVERAGE: f64 = 1e-12;

/// `K(x, y) = h''(x - y) W(x, y) / W_x` with a cache of the local averages.
#[derive(Debug)]
pub struct WnnKernel {
    sampling: SamplingKernel,
    graphon: Graphon,
    certificate: Option<RegularityCertificate>,
    wx_cache: RwLock<HashMap<u64, f64>>,
    opts: QuadOptions,
}

impl Clone for WnnKernel {
    fn clone(&self) -> Self {
        WnnKernel {
            sampling: self.sampling.clone(),
            graphon: self.graphon.clone(),
            certificate: self.certificate,
            wx_cache: RwLock::new(self.wx_cache.read().expect("cache lock").clone()),
            opts: self.opts,
        }
    }
}

impl WnnKernel {
    pub fn new(
        sampling: SamplingKernel,
        graphon: Graphon,
        certificate: Option<RegularityCertificate>,
    ) -> Self {
        WnnKernel {
            sampling,
            graphon,
            certificate,
            wx_cache: RwLock::new(HashMap::new()),
            opts: QuadOptions {
                rel_tol: 1e-12,
                ..QuadOptions::default()
            },
        }
    }

    pub fn from_params(
        params: RegularizerParams,
        graphon: Graphon,
        certificate: Option<RegularityCertificate>,
    ) -> Result<Self> {
        Ok(Self::new(
            SamplingKernel::new(params)?,
            graphon,
            certificate,
        ))
    }

    /// Tolerances for the filter quadrature.
    pub fn with_options(mut self, opts: QuadOptions) -> Self {
        self.opts = opts;
        self
    }

    pub fn sampling(&self) -> &SamplingKernel {
        &self.sampling
    }

    pub fn graphon(&self) -> &Graphon {
        &self.graphon
    }

    pub fn certificate(&self) -> Option<&RegularityCertificate> {
        self.certificate.as_ref()
    }

    pub fn params(&self) -> &RegularizerParams {
        self.sampling.params()
    }

    /// `W_x`, cached per point.
    pub fn local_average(&self, x: f64) -> Result<f64> {
        let key = x.to_bits();
        if let Some(v) = self.wx_cache.read().expect("cache lock").get(&key) {
            return Ok(*v);
        }
        let v = local_average(&self.graphon, x, self.sampling.r())?;
        if v < MIN_LOCAL_AVERAGE {
            return Err(Error::DegenerateDenominator { value: v });
        }
        self.wx_cache.write().expect("cache lock").insert(key, v);
        Ok(v)
    }

    pub fn kernel_eval(&self, x: f64, y: f64) -> Result<Complex64> {
        if !self.sampling.in_support(x - y) {
            return Ok(ZERO);
        }
        let wx = self.local_average(x)?;
        Ok(self.sampling.second(x - y) * (self.graphon.eval(x, y) / wx))
    }

    /// `[x - r, x + r]` clipped to `[0, 1]`.
    pub fn window(&self, x: f64) -> (f64, f64) {
        let r = self.sampling.r();
        ((x - r).max(0.0), (x + r).min(1.0))
    }

    /// Window edges, `x`, the samples `j/2N` inside and the graphon kinks.
    pub fn breakpoints(&self, x: f64) -> Vec<f64> {
        let (a, b) = self.window(x);
        let count = 2 * self.sampling.n();
        let mut out = vec![a, x, b];
        let lo = (a * count as f64).ceil() as usize;
        let hi = ((b * count as f64).floor() as usize).min(count - 1);
        out.extend((lo..=hi).map(|j| j as f64 / count as f64));
        out.extend(self.graphon.kinks(x));
        out
    }

    /// `int_0^1 K(x, y) g(y) dy` for an `m`-channel `g`.
    pub fn filter<G>(&self, m: usize, g: G, x: f64) -> Result<Vec<Complex64>>
    where
        G: Fn(f64, &mut [Complex64]),
    {
        let wx = self.local_average(x)?;
        let (a, b) = self.window(x);
        let breaks = self.breakpoints(x);
        let mut gv = vec![ZERO; m];
        let out = quadrature::integrate_complex(
            m,
            |y, out| {
                let h = self.sampling.second(x - y);
                let w = self.graphon.eval(x, y) / wx;
                g(y, &mut gv);
                for (o, v) in out.iter_mut().zip(&gv) {
                    *o = h * w * v;
                }
            },
            a,
            b,
            &breaks,
            &self.opts,
        )?;
        Ok(out)
    }
}

/// `T_K g (x)` for a scalar `g`.
pub fn graphon_filter<G: Fn(f64) -> Complex64>(
    kernel: &WnnKernel,
    g: G,
    x: f64,
) -> Result<Complex64> {
    Ok(kernel.filter(1, |y, out| out[0] = g(y), x)?[0])
}

/// `Psi_f`: 2N sampled weights and a graphon filter.
#[derive(Debug, Clone)]
pub struct WnnModel {
    weights: SampleVector,
    kernel: Arc<WnnKernel>,
    /// Prefix sums over `j` of `f_j` and `f_j j/2N`, channel-major, length `2N + 1` each.
    prefix: Vec<Complex64>,
    prefix_moment: Vec<Complex64>,
}

impl WnnModel {
    pub fn new(kernel: Arc<WnnKernel>, weights: SampleVector) -> Result<Self> {
        let n = kernel.params().n;
        if weights.half_count() != n {
            return Err(Error::Shape(format!(
                "{} weights for a kernel at N = {n}",
                weights.len()
            )));
        }
        let count = 2 * n;
        let m = weights.channels();
        let mut prefix = vec![ZERO; m * (count + 1)];
        let mut prefix_moment = vec![ZERO; m * (count + 1)];
        for c in 0..m {
            let base = c * (count + 1);
            for j in 0..count {
                let v = weights.value(c, j);
                prefix[base + j + 1] = prefix[base + j] + v;
                prefix_moment[base + j + 1] =
                    prefix_moment[base + j] + v * (j as f64 / count as f64);
            }
        }
        Ok(WnnModel {
            weights,
            kernel,
            prefix,
            prefix_moment,
        })
    }

    /// Weights `f(j/2N)` sampled from `signal`.
    pub fn from_signal(kernel: Arc<WnnKernel>, signal: &BandlimitedSignal) -> Result<Self> {
        let n = kernel.params().n;
        Self::new(kernel, signal.sample_uniform(n))
    }

    pub fn weights(&self) -> &SampleVector {
        &self.weights
    }

    pub fn kernel(&self) -> &WnnKernel {
        &self.kernel
    }

    pub fn params(&self) -> &RegularizerParams {
        self.kernel.params()
    }

    pub fn channels(&self) -> usize {
        self.weights.channels()
    }

    pub fn in_zone(&self, x: f64) -> bool {
        self.params().in_zone(x)
    }

    /// `f_sharp(y) = sum_j f(j/2N) ReLU(y - j/2N)`.
    pub fn fsharp(&self, y: f64, out: &mut [Complex64]) {
        let count = self.weights.len();
        // number of samples strictly left of y; the ReLU vanishes at the kink
        let below = ((y * count as f64).ceil().max(0.0) as usize).min(count);
        for (c, o) in out.iter_mut().enumerate() {
            let base = c * (count + 1);
            *o = self.prefix[base + below] * y - self.prefix_moment[base + below];
        }
    }

    /// `Psi_f(x)`.
    pub fn forward(&self, x: f64) -> Result<Vec<Complex64>> {
        self.kernel
            .filter(self.channels(), |y, out| self.fsharp(y, out), x)
    }

    /// Layer-one features `T_K rho_j (x)` for all `j`.
    pub fn features(&self, x: f64) -> Result<Vec<Complex64>> {
        let count = self.weights.len();
        self.kernel.filter(
            count,
            |y, out| {
                for (j, o) in out.iter_mut().enumerate() {
                    *o = Complex64::new((y - j as f64 / count as f64).max(0.0), 0.0);
                }
            },
            x,
        )
    }

    /// `sum_j f(j/2N) T_K rho_j (x)` through the features.
    pub fn forward_by_features(&self, x: f64) -> Result<Vec<Complex64>> {
        let feats = self.features(x)?;
        let out = (0..self.channels())
            .map(|c| {
                feats
                    .iter()
                    .enumerate()
                    .map(|(j, t)| self.weights.value(c, j) * t)
                    .sum()
            })
            .collect();
        Ok(out)
    }

    /// `Psi_f` at many points, in parallel. Each entry carries the zone flag.
    pub fn forward_many(&self, xs: &[f64]) -> Result<Vec<(Vec<Complex64>, bool)>> {
        xs.par_iter()
            .map(|&x| Ok((self.forward(x)?, self.in_zone(x))))
            .collect()
    }

    /// `||Psi_f - f||` over the predictable zone `[r, 1 - r]`.
    pub fn zone_error(&self, signal: &BandlimitedSignal, opts: &QuadOptions) -> Result<f64> {
        let (a, b) = self.params().zone();
        let m = self.channels();
        let failed = RefCell::new(None);
        let v = l2_error(
            m,
            |x, out| match self.forward(x) {
                Ok(v) => out.copy_from_slice(&v),
                Err(e) => {
                    failed.borrow_mut().get_or_insert(e);
                    out.iter_mut().for_each(|o| *o = ZERO);
                }
            },
            |x, out| signal.eval_into(x, out),
            a,
            b,
            &self.sample_breaks(a, b),
            opts,
        );
        if let Some(e) = failed.into_inner() {
            return Err(e);
        }
        v
    }

    /// `Psi_f` is smooth apart from jumps of order `h(r)` at `j/2N +- r`, so
    /// panels of one sample spacing suffice.
    fn sample_breaks(&self, a: f64, b: f64) -> Vec<f64> {
        let count = self.weights.len();
        (0..count)
            .map(|j| j as f64 / count as f64)
            .filter(|&t| t > a && t < b)
            .collect()
    }

    /// Piecewise Chebyshev table of `Psi_f` on `[a, b]`.
    pub fn tabulate(&self, a: f64, b: f64, panels: usize, order: usize) -> Result<PiecewiseTable> {
        PiecewiseTable::build(self.channels(), a, b, panels, order, |x| self.forward(x))
    }
}

/// Barycentric Chebyshev interpolation on equal panels, used to evaluate
/// an expensive smooth function many times.
#[derive(Debug, Clone)]
pub struct PiecewiseTable {
    a: f64,
    b: f64,
    panels: usize,
    channels: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `values[(p * order + i) * channels + c]`.
    values: Vec<Complex64>,
}

impl PiecewiseTable {
    pub fn build<F>(
        channels: usize,
        a: f64,
        b: f64,
        panels: usize,
        order: usize,
        f: F,
    ) -> Result<Self>
    where
        F: Fn(f64) -> Result<Vec<Complex64>> + Sync,
    {
        if a.is_nan() || b.is_nan() || a >= b || panels == 0 || order < 2 {
            return Err(Error::InvalidParams(
                "table needs a < b, panels >= 1, order >= 2".into(),
            ));
        }
        // Chebyshev points of the second kind on [-1, 1]
        let nodes: Vec<f64> = (0..order)
            .map(|i| -(PI * i as f64 / (order - 1) as f64).cos())
            .collect();
        let weights: Vec<f64> = (0..order)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                if i == 0 || i == order - 1 {
                    0.5 * s
                } else {
                    s
                }
            })
            .collect();
        let width = (b - a) / panels as f64;
        let points: Vec<f64> = (0..panels)
            .flat_map(|p| {
                let lo = a + p as f64 * width;
                nodes
                    .iter()
                    .map(move |t| lo + 0.5 * (t + 1.0) * width)
                    .collect::<Vec<_>>()
            })
            .collect();
        let rows: Vec<Vec<Complex64>> = points.par_iter().map(|&x| f(x)).collect::<Result<_>>()?;
        let values = rows.into_iter().flatten().collect();
        Ok(PiecewiseTable {
            a,
            b,
            panels,
            channels,
            nodes,
            weights,
            values,
        })
    }

    pub fn eval_into(&self, x: f64, out: &mut [Complex64]) {
        let width = (self.b - self.a) / self.panels as f64;
        let p = (((x - self.a) / width).floor().max(0.0) as usize).min(self.panels - 1);
        let lo = self.a + p as f64 * width;
        let t = 2.0 * (x - lo) / width - 1.0;
        let order = self.nodes.len();
        let base = p * order;
        out.iter_mut().for_each(|o| *o = ZERO);
        let mut den = 0.0;
        for (i, (&node, &w)) in self.nodes.iter().zip(&self.weights).enumerate() {
            let d = t - node;
            if d == 0.0 {
                out.copy_from_slice(
                    &self.values[(base + i) * self.channels..(base + i + 1) * self.channels],
                );
                return;
            }
            let q = w / d;
            den += q;
            for (c, o) in out.iter_mut().enumerate() {
                *o += self.values[(base + i) * self.channels + c] * q;
            }
        }
        out.iter_mut().for_each(|o| *o /= den);
    }

    pub fn eval(&self, x: f64) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.channels];
        self.eval_into(x, &mut out);
        out
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }
}
