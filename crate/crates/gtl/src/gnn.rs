//! The two-layer graph neural network `Psi_{n,f}` on a graph drawn from a graphon.
//!
//! The filter is the vertex discretization of the graphon filter,
//! `F g (x_k) = (1 / (n W_{x_k})) sum_{l != k} h''(x_k - x_l) A_kl g(x_l)`.
//! Because `x_k - x_l = (k - l)/n` the `h''` factor is tabulated once per
//! index difference.

use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphon::{
    deterministic_graph, local_average, random_graph, AdjacencyMatrix, Graphon, StepSignal,
    VertexGrid,
};
use crate::kernels::{RegularizerParams, SamplingKernel};
use crate::quadrature::QuadOptions;
use crate::signal::{l2_error, SampleVector};
use crate::wnn::MIN_LOCAL_AVERAGE;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Discretized filter kernel on a fixed graph.
#[derive(Debug, Clone)]
pub struct GnnKernel {
    sampling: SamplingKernel,
    graphon: Graphon,
    adjacency: Arc<AdjacencyMatrix>,
    grid: VertexGrid,
    /// `W_{x_k}` from the graphon, never from the adjacency.
    wx: Arc<Vec<f64>>,
    /// `h''(d/n)` for `d = -reach..=reach`.
    gstar: Arc<Vec<Complex64>>,
    reach: usize,
}

impl GnnKernel {
    pub fn new(
        sampling: SamplingKernel,
        graphon: Graphon,
        adjacency: Arc<AdjacencyMatrix>,
    ) -> Result<Self> {
        let n = adjacency.n();
        let grid = adjacency.grid();
        let r = sampling.r();
        let wx: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|k| local_average(&graphon, grid.point(k), r))
            .collect::<Result<_>>()?;
        if let Some(&v) = wx.iter().find(|&&v| v < MIN_LOCAL_AVERAGE) {
            return Err(Error::DegenerateDenominator { value: v });
        }
        let reach = ((r * n as f64).floor() as usize + 1).min(n - 1);
        let gstar: Vec<Complex64> = (-(reach as i64)..=reach as i64)
            .into_par_iter()
            .map(|d| {
                let t = d as f64 / n as f64;
                if sampling.in_support(t) {
                    sampling.second(t)
                } else {
                    ZERO
                }
            })
            .collect();
        Ok(GnnKernel {
            sampling,
            graphon,
            adjacency,
            grid,
            wx: Arc::new(wx),
            gstar: Arc::new(gstar),
            reach,
        })
    }

    /// Same kernel on another graph; the caches are kept when `n` is unchanged.
    pub fn with_adjacency(&self, adjacency: Arc<AdjacencyMatrix>) -> Result<Self> {
        if adjacency.n() != self.grid.n() {
            return Self::new(self.sampling.clone(), self.graphon.clone(), adjacency);
        }
        Ok(GnnKernel {
            adjacency,
            ..self.clone()
        })
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn grid(&self) -> VertexGrid {
        self.grid
    }

    pub fn adjacency(&self) -> &AdjacencyMatrix {
        &self.adjacency
    }

    pub fn graphon(&self) -> &Graphon {
        &self.graphon
    }

    pub fn sampling(&self) -> &SamplingKernel {
        &self.sampling
    }

    pub fn params(&self) -> &RegularizerParams {
        self.sampling.params()
    }

    pub fn local_average(&self, k: usize) -> f64 {
        self.wx[k]
    }

    /// Cached `h''(d/n)`; zero beyond the support.
    #[inline]
    pub fn gstar(&self, d: i64) -> Complex64 {
        if d.unsigned_abs() as usize > self.reach {
            return ZERO;
        }
        self.gstar[(d + self.reach as i64) as usize]
    }

    /// `K_n(x_k, x_l)`.
    pub fn entry(&self, k: usize, l: usize) -> Complex64 {
        if k == l {
            return ZERO;
        }
        let n = self.n() as f64;
        self.gstar(k as i64 - l as i64) * (self.adjacency.get(k, l) / (n * self.wx[k]))
    }

    /// `F g (x_k)` for vertex-major `g` with `m` channels.
    pub fn filter_into(&self, g: &[Complex64], m: usize, k: usize, out: &mut [Complex64]) {
        let n = self.n();
        out.iter_mut().for_each(|o| *o = ZERO);
        let lo = k.saturating_sub(self.reach);
        let hi = (k + self.reach).min(n - 1);
        let row = self.adjacency.row(k);
        for l in lo..=hi {
            if l == k || row[l] == 0.0 {
                continue;
            }
            let c = self.gstar(k as i64 - l as i64) * row[l];
            for (o, v) in out.iter_mut().zip(&g[l * m..(l + 1) * m]) {
                *o += c * v;
            }
        }
        let s = 1.0 / (n as f64 * self.wx[k]);
        out.iter_mut().for_each(|o| *o *= s);
    }

    /// `F g` at every vertex.
    pub fn filter_all(&self, g: &[Complex64], m: usize) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.n() * m];
        out.par_chunks_mut(m)
            .enumerate()
            .for_each(|(k, o)| self.filter_into(g, m, k, o));
        out
    }
}

/// `F g (x_k)` for scalar vertex values.
pub fn graph_filter(kernel: &GnnKernel, g: &[Complex64], k: usize) -> Complex64 {
    let mut out = [ZERO];
    kernel.filter_into(g, 1, k, &mut out);
    out[0]
}

/// The GNN: the same 2N weights as the graphon network, on a graph.
#[derive(Debug, Clone)]
pub struct GnnModel {
    weights: SampleVector,
    kernel: GnnKernel,
}

impl GnnModel {
    pub fn new(kernel: GnnKernel, weights: SampleVector) -> Result<Self> {
        let n_half = kernel.params().n;
        if weights.half_count() != n_half {
            return Err(Error::Shape(format!(
                "{} weights for a kernel at N = {n_half}",
                weights.len()
            )));
        }
        Ok(GnnModel { weights, kernel })
    }

    pub fn weights(&self) -> &SampleVector {
        &self.weights
    }

    pub fn kernel(&self) -> &GnnKernel {
        &self.kernel
    }

    pub fn params(&self) -> &RegularizerParams {
        self.kernel.params()
    }

    pub fn channels(&self) -> usize {
        self.weights.channels()
    }

    pub fn n(&self) -> usize {
        self.kernel.n()
    }

    /// `f_sharp(x_l) = sum_j f(j/2N) ReLU(x_l - j/2N)`, vertex-major.
    pub fn fsharp_vertices(&self) -> Vec<Complex64> {
        let m = self.channels();
        let count = self.weights.len();
        let grid = self.kernel.grid();
        let mut out = vec![ZERO; grid.n() * m];
        let mut sum = vec![ZERO; m];
        let mut moment = vec![ZERO; m];
        let mut j = 0;
        for (l, o) in out.chunks_mut(m).enumerate() {
            let x = grid.point(l);
            while j < count && (j as f64) / (count as f64) < x {
                let a = j as f64 / count as f64;
                for c in 0..m {
                    let v = self.weights.value(c, j);
                    sum[c] += v;
                    moment[c] += v * a;
                }
                j += 1;
            }
            for c in 0..m {
                o[c] = sum[c] * x - moment[c];
            }
        }
        out
    }

    /// Layer-one feature `rho_j` on the vertices.
    pub fn feature_vertices(&self, j: usize) -> Vec<Complex64> {
        let a = j as f64 / self.weights.len() as f64;
        self.kernel
            .grid()
            .points()
            .map(|x| Complex64::new((x - a).max(0.0), 0.0))
            .collect()
    }

    /// `Psi_{n,f}(x_k)`.
    pub fn forward(&self, k: usize) -> Result<Vec<Complex64>> {
        if k >= self.n() {
            return Err(Error::InvalidParams(format!("vertex {k} out of range")));
        }
        let m = self.channels();
        let g = self.fsharp_vertices();
        let mut out = vec![ZERO; m];
        self.kernel.filter_into(&g, m, k, &mut out);
        Ok(out)
    }

    /// `Psi_{n,f}` at every vertex, vertex-major.
    pub fn forward_all(&self) -> Vec<Complex64> {
        self.kernel
            .filter_all(&self.fsharp_vertices(), self.channels())
    }

    /// `sum_j f(j/2N) F rho_j (x_k)` built from the layer-one features.
    pub fn forward_by_features(&self, k: usize) -> Vec<Complex64> {
        let m = self.channels();
        let mut out = vec![ZERO; m];
        for j in 0..self.weights.len() {
            let t = graph_filter(&self.kernel, &self.feature_vertices(j), k);
            for (c, o) in out.iter_mut().enumerate() {
                *o += self.weights.value(c, j) * t;
            }
        }
        out
    }

    /// `Psi-bar_{n,f}`.
    pub fn step_extension(&self) -> StepSignal {
        StepSignal::new(self.n(), self.channels(), self.forward_all())
            .expect("shape fixed by the model")
    }

    /// Same weights and parameters on a new graph.
    pub fn transfer(&self, adjacency: Arc<AdjacencyMatrix>) -> Result<GnnModel> {
        Ok(GnnModel {
            weights: self.weights.clone(),
            kernel: self.kernel.with_adjacency(adjacency)?,
        })
    }
}

/// `||s - g||` over `[a, b]` for a step signal, with breakpoints at every cell edge.
pub fn step_l2_error<G>(s: &StepSignal, g: G, a: f64, b: f64, opts: &QuadOptions) -> Result<f64>
where
    G: Fn(f64, &mut [Complex64]),
{
    let grid = s.grid();
    let breaks: Vec<f64> = (1..grid.n())
        .map(|k| grid.point(k))
        .filter(|&t| t > a && t < b)
        .collect();
    l2_error(
        s.channels(),
        |x, out| out.copy_from_slice(s.eval(x)),
        g,
        a,
        b,
        &breaks,
        opts,
    )
}

/// `||s - t||` over `[a, b]` for two step signals on the same grid, computed exactly.
pub fn step_distance(s: &StepSignal, t: &StepSignal, a: f64, b: f64) -> Result<f64> {
    if s.n() != t.n() || s.channels() != t.channels() {
        return Err(Error::Shape("step signals on different grids".into()));
    }
    let grid = s.grid();
    let mut acc = 0.0;
    for k in grid.cell(a)..=grid.cell(b) {
        let (p, q) = grid.interval(k);
        let w = (q.min(b) - p.max(a)).max(0.0);
        let d: f64 = s
            .vertex(k)
            .iter()
            .zip(t.vertex(k))
            .map(|(u, v)| (u - v).norm_sqr())
            .sum();
        acc += w * d;
    }
    Ok(acc.sqrt())
}

/// Size, seeds and reporting constants for `random_trial_suite`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSettings {
    pub n: usize,
    pub seeds: Vec<u64>,
    /// `eta` of the certificate, used only in the probability expression.
    pub eta: f64,
    pub probability_constant: f64,
    pub opts: QuadOptions,
}

/// One seeded realization in a random-graph suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub l2_err_zone: f64,
    pub runtime_ms: f64,
}

/// Outcome of `random_trial_suite`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSuite {
    pub n: usize,
    pub deterministic_error: f64,
    pub trials: Vec<TrialRecord>,
    pub mean_error: f64,
    pub max_error: f64,
    pub std_error: f64,
    /// Share of seeds with error at most `1.5x` the deterministic one.
    pub within_factor: f64,
    /// `||mean_s Psi-bar^ran_s - Psi-bar^det|| / ||Psi-bar^det||` over the zone.
    pub mean_relative_difference: f64,
    /// The high-probability expression at the supplied constant; not normative.
    pub probability_bound: f64,
    pub probability_constant: f64,
}

/// `1 - 2n eps^{10(1-a)/9} exp(-C eta^2 n / eps^{4(15b-5a-2)/9})` with `eps = N^{-9/10}`.
pub fn probability_expression(params: &RegularizerParams, n: usize, eta: f64, c: f64) -> f64 {
    let eps = (params.n as f64).powf(-0.9);
    let (a, b) = (params.alpha, params.beta);
    let nf = n as f64;
    let pre = 2.0 * nf * eps.powf(10.0 * (1.0 - a) / 9.0);
    let rate = c * eta * eta * nf / eps.powf(4.0 * (15.0 * b - 5.0 * a - 2.0) / 9.0);
    1.0 - pre * (-rate).exp()
}

/// Error profile of the GNN over random graphs with the given seeds.
///
/// `target` is compared against each step extension over `[r, 1 - r]`.
pub fn random_trial_suite<G>(
    graphon: &Graphon,
    params: &RegularizerParams,
    weights: &SampleVector,
    target: G,
    settings: &TrialSettings,
) -> Result<TrialSuite>
where
    G: Fn(f64, &mut [Complex64]) + Sync,
{
    let TrialSettings {
        n,
        ref seeds,
        eta,
        probability_constant,
        ref opts,
    } = *settings;
    if n < 2 {
        return Err(Error::InvalidParams("random trials need n >= 2".into()));
    }
    if seeds.len() < 10 {
        return Err(Error::InvalidParams(format!(
            "random trials need at least 10 seeds, got {}",
            seeds.len()
        )));
    }
    let (a, b) = params.zone();
    let det_adj = Arc::new(deterministic_graph(graphon, n)?);
    let kernel = GnnKernel::new(SamplingKernel::new(*params)?, graphon.clone(), det_adj)?;
    let det = GnnModel::new(kernel, weights.clone())?;
    let det_step = det.step_extension();
    let det_err = step_l2_error(&det_step, &target, a, b, opts)?;

    let runs: Vec<(TrialRecord, StepSignal)> = seeds
        .par_iter()
        .map(|&seed| {
            let t = Instant::now();
            let adj = Arc::new(random_graph(graphon, n, seed)?);
            let model = det.transfer(adj)?;
            let step = model.step_extension();
            let err = step_l2_error(&step, &target, a, b, opts)?;
            Ok((
                TrialRecord {
                    seed,
                    l2_err_zone: err,
                    runtime_ms: t.elapsed().as_secs_f64() * 1e3,
                },
                step,
            ))
        })
        .collect::<Result<_>>()?;

    let count = runs.len() as f64;
    let m = weights.channels();
    let mut mean = vec![ZERO; n * m];
    for (_, s) in &runs {
        for (acc, v) in mean.iter_mut().zip(s.values()) {
            *acc += v / count;
        }
    }
    let mean_step = StepSignal::new(n, m, mean)?;
    let zero = StepSignal::new(n, m, vec![ZERO; n * m])?;
    let det_norm = step_distance(&det_step, &zero, a, b)?;
    let mean_relative_difference = step_distance(&mean_step, &det_step, a, b)? / det_norm;

    let trials: Vec<TrialRecord> = runs.into_iter().map(|(t, _)| t).collect();
    let errs: Vec<f64> = trials.iter().map(|t| t.l2_err_zone).collect();
    let mean_error = errs.iter().sum::<f64>() / count;
    let max_error = errs.iter().copied().fold(0.0, f64::max);
    let std_error = (errs.iter().map(|e| (e - mean_error).powi(2)).sum::<f64>() / count).sqrt();
    let within_factor = errs.iter().filter(|&&e| e <= 1.5 * det_err).count() as f64 / count;
    Ok(TrialSuite {
        n,
        deterministic_error: det_err,
        trials,
        mean_error,
        max_error,
        std_error,
        within_factor,
        mean_relative_difference,
        probability_bound: probability_expression(params, n, eta, probability_constant),
        probability_constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphon::GraphonSpec;

    fn model(n: usize) -> GnnModel {
        let p = RegularizerParams::standard(2, 32).unwrap();
        let w = Graphon::from_spec(GraphonSpec::Ring).unwrap();
        let adj = Arc::new(deterministic_graph(&w, n).unwrap());
        let k = GnnKernel::new(SamplingKernel::new(p).unwrap(), w, adj).unwrap();
        let f = crate::signal::random_signal(2, 2, 5, false).unwrap();
        GnnModel::new(k, f.sample_uniform(32)).unwrap()
    }

    #[test]
    fn fsharp_at_vertices_matches_direct_sum() {
        let m = model(100);
        let v = m.fsharp_vertices();
        let s = m.weights();
        for k in [0usize, 1, 37, 50, 99] {
            let x = k as f64 / 100.0;
            for c in 0..2 {
                let direct: Complex64 = (0..64)
                    .map(|j| s.value(c, j) * (x - j as f64 / 64.0).max(0.0))
                    .sum();
                assert!((v[k * 2 + c] - direct).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn features_and_fsharp_agree() {
        let m = model(64);
        let all = m.forward_all();
        for k in [3usize, 31, 60] {
            let by = m.forward_by_features(k);
            for c in 0..2 {
                assert!((all[k * 2 + c] - by[c]).norm() < 1e-9 * (1.0 + by[c].norm()));
            }
        }
    }

    #[test]
    fn step_distance_is_exact() {
        let s = StepSignal::new(4, 1, vec![Complex64::new(1.0, 0.0); 4]).unwrap();
        let z = StepSignal::new(4, 1, vec![ZERO; 4]).unwrap();
        assert!((step_distance(&s, &z, 0.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((step_distance(&s, &z, 0.1, 0.6).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    }
}
