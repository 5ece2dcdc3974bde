//! Computations shared by the experiment runners and the check suite.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gnn::{step_l2_error, GnnKernel, GnnModel};
use crate::graphon::{deterministic_graph, AdjacencyMatrix, Graphon, RegularityCertificate};
use crate::kernels::precise::measured_l2_error;
use crate::kernels::{
    error_bound_tilde, exact_l2_error, AliasingCoefficients, RegularizerParams, SamplingKernel,
};
use crate::quadrature::QuadOptions;
use crate::signal::BandlimitedSignal;
use crate::wnn::{PiecewiseTable, WnnKernel, WnnModel};

/// One `N` of a reconstruction sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub r: f64,
    pub sigma: f64,
    pub measured_l2: f64,
    pub exact_identity_l2: f64,
    pub tilde_e: f64,
    pub ratio: f64,
}

/// Measured error, spectral identity and `E-tilde` for each parameter set.
pub fn sampling_sweep(
    signal: &BandlimitedSignal,
    params: &[RegularizerParams],
    opts: &QuadOptions,
) -> Result<Vec<SweepRow>> {
    params
        .par_iter()
        .map(|p| {
            let measured = measured_l2_error(signal, p, opts)?;
            let exact = exact_l2_error(signal, &AliasingCoefficients::new(*p)?)?;
            let tilde = error_bound_tilde(p)?.total;
            Ok(SweepRow {
                n: p.n,
                r: p.r,
                sigma: p.sigma,
                measured_l2: measured,
                exact_identity_l2: exact,
                tilde_e: tilde,
                ratio: measured / tilde,
            })
        })
        .collect()
}

/// `C` minimizing `sum (ln y - ln C - ln x)^2`, i.e. `y ~ C x` with unit slope in log space.
pub fn fit_log_constant(x: &[f64], y: &[f64]) -> Result<f64> {
    check_fit(x, y)?;
    let mean = x.iter().zip(y).map(|(a, b)| b.ln() - a.ln()).sum::<f64>() / x.len() as f64;
    Ok(mean.exp())
}

/// Least-squares line `ln y = slope ln x + b`; returns `(slope, e^b)`.
pub fn fit_log_line(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    check_fit(x, y)?;
    if x.len() < 2 {
        return Err(Error::InvalidParams("a slope needs two points".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParams("fit abscissae are all equal".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, (my - slope * mx).exp()))
}

fn check_fit(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::Shape(format!(
            "fit over {} abscissae and {} values",
            x.len(),
            y.len()
        )));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidParams(
            "log fit needs positive finite data".into(),
        ));
    }
    Ok(())
}

pub fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// `Psi_f` for a signal on a graphon.
pub fn wnn_model(
    graphon: &Graphon,
    certificate: Option<RegularityCertificate>,
    params: RegularizerParams,
    signal: &BandlimitedSignal,
) -> Result<WnnModel> {
    let kernel = Arc::new(WnnKernel::from_params(
        params,
        graphon.clone(),
        certificate,
    )?);
    WnnModel::from_signal(kernel, signal)
}

/// Table of `Psi_f` on the predictable zone, two panels per sample spacing.
pub fn zone_table(model: &WnnModel) -> Result<PiecewiseTable> {
    let p = model.params();
    let (a, b) = p.zone();
    let panels = 2 * ((b - a) * p.sample_count() as f64).ceil() as usize;
    model.tabulate(a, b, panels.max(1), 16)
}

/// GNN errors against the signal and against the graphon network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnnErrors {
    pub n: usize,
    pub l2_err_zone: f64,
    pub l2_err_vs_wnn: f64,
}

pub fn gnn_errors(
    model: &GnnModel,
    signal: &BandlimitedSignal,
    table: &PiecewiseTable,
    opts: &QuadOptions,
) -> Result<GnnErrors> {
    let (a, b) = model.params().zone();
    let step = model.step_extension();
    Ok(GnnErrors {
        n: model.n(),
        l2_err_zone: step_l2_error(&step, |x, o| signal.eval_into(x, o), a, b, opts)?,
        l2_err_vs_wnn: step_l2_error(&step, |x, o| table.eval_into(x, o), a, b, opts)?,
    })
}

/// A GNN on the deterministic graph of size `n`, weighted by `signal` samples.
pub fn deterministic_gnn(
    graphon: &Graphon,
    params: RegularizerParams,
    signal: &BandlimitedSignal,
    n: usize,
) -> Result<GnnModel> {
    let adj = Arc::new(deterministic_graph(graphon, n)?);
    gnn_on(graphon, params, signal, adj)
}

pub fn gnn_on(
    graphon: &Graphon,
    params: RegularizerParams,
    signal: &BandlimitedSignal,
    adj: Arc<AdjacencyMatrix>,
) -> Result<GnnModel> {
    let kernel = GnnKernel::new(SamplingKernel::new(params)?, graphon.clone(), adj)?;
    GnnModel::new(kernel, signal.sample_uniform(params.n))
}

/// Errors of deterministic GNNs over a list of graph sizes.
pub fn gnn_rate(
    graphon: &Graphon,
    params: RegularizerParams,
    signal: &BandlimitedSignal,
    table: &PiecewiseTable,
    sizes: &[usize],
    opts: &QuadOptions,
) -> Result<Vec<GnnErrors>> {
    sizes
        .iter()
        .map(|&n| {
            gnn_errors(
                &deterministic_gnn(graphon, params, signal, n)?,
                signal,
                table,
                opts,
            )
        })
        .collect()
}

/// `C / n + ||Psi_f - f||` with `C` fitted to `e(n) ~ C / n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferStudy {
    pub fit: Vec<GnnErrors>,
    pub fitted_constant: f64,
    pub wnn_error: f64,
    pub rows: Vec<TransferRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferRow {
    pub errors: GnnErrors,
    pub bound: f64,
}

impl TransferStudy {
    pub fn bound(&self, n: usize) -> f64 {
        self.fitted_constant / n as f64 + self.wnn_error
    }
}

/// Weights sampled once at `2N` points, evaluated on each graph in `targets`.
pub fn transfer_study(
    graphon: &Graphon,
    certificate: Option<RegularityCertificate>,
    params: RegularizerParams,
    signal: &BandlimitedSignal,
    fit_sizes: &[usize],
    targets: &[Arc<AdjacencyMatrix>],
    opts: &QuadOptions,
) -> Result<TransferStudy> {
    let wnn = wnn_model(graphon, certificate, params, signal)?;
    let table = zone_table(&wnn)?;
    let wnn_error = wnn.zone_error(signal, opts)?;
    let fit = gnn_rate(graphon, params, signal, &table, fit_sizes, opts)?;
    let ns: Vec<f64> = fit.iter().map(|e| 1.0 / e.n as f64).collect();
    let es: Vec<f64> = fit.iter().map(|e| e.l2_err_vs_wnn).collect();
    let fitted_constant = fit_log_constant(&ns, &es)?;
    let base = match targets.first() {
        Some(adj) => gnn_on(graphon, params, signal, adj.clone())?,
        None => {
            return Err(Error::InvalidParams(
                "transfer needs at least one target graph".into(),
            ))
        }
    };
    let mut study = TransferStudy {
        fit,
        fitted_constant,
        wnn_error,
        rows: Vec::with_capacity(targets.len()),
    };
    for adj in targets {
        let model = base.transfer(adj.clone())?;
        let errors = gnn_errors(&model, signal, &table, opts)?;
        study.rows.push(TransferRow {
            errors,
            bound: study.bound(errors.n),
        });
    }
    Ok(study)
}

/// Largest `|Psi_f(x) - R f(x)|` over the points.
pub fn reduction_gap(model: &WnnModel, xs: &[f64]) -> Result<f64> {
    let sk = model.kernel().sampling();
    let gaps: Vec<f64> = xs
        .par_iter()
        .map(|&x| {
            let psi = model.forward(x)?;
            let rf = sk.reconstruct(model.weights(), x)?;
            Ok(psi
                .iter()
                .zip(&rf)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max))
        })
        .collect::<Result<_>>()?;
    Ok(gaps.into_iter().fold(0.0, f64::max))
}

/// `n` equispaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

pub(crate) fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(u, v)| (u - v).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_fits_recover_power_laws() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-1.5)).collect();
        let (s, c) = fit_log_line(&x, &y).unwrap();
        assert!((s + 1.5).abs() < 1e-12 && (c - 3.0).abs() < 1e-12);
        let y: Vec<f64> = x.iter().map(|v| 0.25 * v).collect();
        assert!((fit_log_constant(&x, &y).unwrap() - 0.25).abs() < 1e-15);
        assert!(fit_log_constant(&[1.0], &[-1.0]).is_err());
    }

    #[test]
    fn decreasing() {
        assert!(strictly_decreasing(&[3.0, 2.0, 1.0]));
        assert!(!strictly_decreasing(&[3.0, 3.0]));
    }
}
