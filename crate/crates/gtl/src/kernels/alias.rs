use std::f64::consts::PI;

use num_complex::Complex64;

use super::gaussian::PeriodicGaussian;
use super::params::RegularizerParams;
use crate::error::{Error, Result};
use crate::quadrature::{self, gl64, QuadOptions};
use crate::signal::{BandlimitedSignal, IndexBand};

/// Hard cap on alias shells.
pub const MAX_SHELLS: usize = 10_000;

/// Length of the boundary expansion at `u = r`.
const SERIES_LEN: usize = 32;

/// Spectral weights of regularized sampling.
///
/// `mu(q) = sum_{l in q - B_N} Ghat_{r,sigma}(l)` and `nu = 1 - mu`. The
/// transform of the truncated regularizer is split as
/// `Ghat_{r,sigma}(l) = Ghat_sigma(l) - tau(l)`, with `tau(l)` the integral of
/// `G_sigma(u) exp(-i 2 pi l u)` over `[r, 1 - r]`. Window sums of `tau` are
/// integrated once against the Dirichlet kernel, and `nu` uses the Gaussian
/// tail outside the window directly, so neither suffers the cancellation of
/// `1 - mu` when both are near 1e-17.
#[derive(Debug, Clone, PartialEq)]
pub struct AliasingCoefficients {
    params: RegularizerParams,
    band: IndexBand,
    mu: Vec<f64>,
    nu: Vec<f64>,
    /// Per band slot, `(mu(k + 2lN), mu(k - 2lN))` for `l = 1..=L_a`.
    alias: Vec<Vec<(f64, f64)>>,
    /// Per band slot, estimated `sum_{|l| > L_a} mu(k + 2lN)^2`.
    tails: Vec<f64>,
    alias_cutoff: usize,
}

/// Evaluates the pieces `mu` and `nu` are assembled from.
#[derive(Debug, Clone)]
pub struct AliasEngine {
    params: RegularizerParams,
    gaussian: PeriodicGaussian,
    /// `B^(n)(r)` for `B(u) = G(u) / sin(pi u)`.
    boundary: Vec<f64>,
    /// Past this `|omega|` the boundary expansion is used.
    omega_switch: f64,
    u_cut: f64,
}

impl AliasEngine {
    pub fn new(params: RegularizerParams) -> Result<Self> {
        params.validate()?;
        let gaussian = PeriodicGaussian::new(params.sigma, params.series_tol)?;
        let r = params.r;
        let g = gaussian.taylor(r, SERIES_LEN);
        // sin(pi (r + t)) = sum_n pi^n / n! sin(pi r + n pi / 2) t^n
        let mut s = vec![0.0; SERIES_LEN];
        let mut f = 1.0;
        for (n, v) in s.iter_mut().enumerate() {
            if n > 0 {
                f *= PI / n as f64;
            }
            *v = f * (PI * r + n as f64 * PI / 2.0).sin();
        }
        let mut q = vec![0.0; SERIES_LEN];
        q[0] = 1.0 / s[0];
        for n in 1..SERIES_LEN {
            let acc: f64 = (1..=n).map(|k| s[k] * q[n - k]).sum();
            q[n] = -acc / s[0];
        }
        let mut boundary = vec![0.0; SERIES_LEN];
        let mut fact = 1.0;
        for n in 0..SERIES_LEN {
            if n > 0 {
                fact *= n as f64;
            }
            let b: f64 = (0..=n).map(|k| g[k] * q[n - k]).sum();
            boundary[n] = fact * b;
        }
        let ratio = (boundary[1] / boundary[0]).abs();
        let omega_switch = 12.0 * ratio.max(2.0 * PI);
        let a = gaussian.comb_rate();
        let u_cut = (r * r + 52.0 / a).sqrt().min(0.5);
        Ok(AliasEngine {
            params,
            gaussian,
            boundary,
            omega_switch,
            u_cut,
        })
    }

    pub fn params(&self) -> &RegularizerParams {
        &self.params
    }

    pub fn gaussian(&self) -> &PeriodicGaussian {
        &self.gaussian
    }

    /// `sum_{l=lo}^{hi} Ghat_sigma(l)`, summing outward from zero and stopping
    /// once terms no longer register.
    pub fn gauss_window(&self, lo: i64, hi: i64) -> f64 {
        if lo > hi {
            return 0.0;
        }
        let g = &self.gaussian;
        if lo <= 0 && hi >= 0 {
            let mut s = g.fourier_coeff(0);
            s += self.gauss_ray(1, hi);
            s += self.gauss_ray(1, -lo);
            return s;
        }
        if lo > 0 {
            self.gauss_ray(lo, hi)
        } else {
            self.gauss_ray(-hi, -lo)
        }
    }

    /// `sum_{l=a}^{b} Ghat_sigma(l)` for `0 < a`, from the small end.
    fn gauss_ray(&self, a: i64, b: i64) -> f64 {
        let mut s = 0.0;
        let mut l = a;
        while l <= b {
            let t = self.gaussian.fourier_coeff(l);
            s += t;
            if t < 1e-40 * s.max(1e-300) || t == 0.0 {
                break;
            }
            l += 1;
        }
        s
    }

    /// `sum_{l not in q - B_N} Ghat_sigma(l)`.
    pub fn gauss_outside(&self, q: i64) -> f64 {
        let n = self.params.n as i64;
        self.gauss_ray_left(q - n) + self.gauss_window(q + n + 1, i64::MAX / 4)
    }

    /// `sum_{l <= b} Ghat_sigma(l)`.
    fn gauss_ray_left(&self, b: i64) -> f64 {
        if b >= 0 {
            // not needed for the windows used here, kept for completeness
            return 1.0 - self.gauss_window(b + 1, i64::MAX / 4);
        }
        self.gauss_ray(-b, i64::MAX / 4)
    }

    /// `W(q) = sum_{l in q - B_N} tau(l)`.
    pub fn tau_window(&self, q: i64) -> f64 {
        let n = self.params.n as f64;
        let a = -PI * (2 * q + 1) as f64;
        let om1 = a + 2.0 * PI * n;
        let om2 = a - 2.0 * PI * n;
        if om1.abs().min(om2.abs()) >= self.omega_switch {
            if let (Some(j1), Some(j2)) =
                (self.boundary_expansion(om1), self.boundary_expansion(om2))
            {
                // Re[(J1 - J2) / 2i] = Im(J1 - J2) / 2
                return 0.5 * (j1 - j2).im;
            }
        }
        self.tau_window_quadrature(q)
    }

    /// `J(omega) = int_r^{1-r} B(u) e^{i omega u} du` from the endpoint expansion.
    ///
    /// `B` is symmetric about 1/2, so `B^(n)(1 - r) = (-1)^n B^(n)(r)`.
    /// Returns `None` if the series stops decreasing before it settles.
    fn boundary_expansion(&self, omega: f64) -> Option<Complex64> {
        let r = self.params.r;
        let e0 = Complex64::from_polar(1.0, omega * r);
        let e1 = Complex64::from_polar(1.0, omega * (1.0 - r));
        let inv = Complex64::new(0.0, -1.0 / omega); // 1 / (i omega)
        let mut pow = inv;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut last = f64::INFINITY;
        for (n, b) in self.boundary.iter().enumerate() {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let bracket = e1 * sign - e0;
            let term = pow * bracket * (sign * b);
            let mag = (b * pow.norm()).abs();
            sum += term;
            if mag < 1e-17 * sum.norm() {
                return Some(sum);
            }
            if mag > last {
                return None;
            }
            last = mag;
            pow *= inv;
        }
        None
    }

    /// `W(q) = 2 int_r^{1/2} G(u) cos(pi (2q + 1) u) sin(2 pi N u) / sin(pi u) du`.
    pub fn tau_window_quadrature(&self, q: i64) -> f64 {
        let r = self.params.r;
        let n = self.params.n as f64;
        let fq = PI * (2 * q + 1) as f64;
        let omega = fq.abs() + 2.0 * PI * n;
        let width = PI / omega;
        let len = self.u_cut - r;
        let pieces = ((len / width).ceil() as usize).max(4);
        let breaks: Vec<f64> = (1..pieces)
            .map(|i| r + len * i as f64 / pieces as f64)
            .collect();
        let opts = QuadOptions {
            rel_tol: 1e-12,
            abs_tol: 0.0,
            max_panels: 1 << 20,
        };
        let g = &self.gaussian;
        let half = quadrature::adaptive(
            1,
            |u, out| {
                out[0] = g.eval(u) * (fq * u).cos() * (2.0 * PI * n * u).sin() / (PI * u).sin();
            },
            r,
            self.u_cut,
            &breaks,
            &opts,
        );
        2.0 * half.value[0]
    }

    /// `mu(q)` for any integer `q`.
    pub fn mu(&self, q: i64) -> f64 {
        let n = self.params.n as i64;
        self.gauss_window(q - n + 1, q + n) - self.tau_window(q)
    }

    /// `nu(k) = 1 - mu(k)` assembled from the tail and the window sum.
    pub fn nu(&self, k: i64) -> f64 {
        self.gauss_outside(k) + self.tau_window(k)
    }

    /// `Ghat_{r,sigma}(l) = 2 int_0^r G(u) cos(2 pi l u) du` by 64-point
    /// Gauss-Legendre with dyadic refinement. Accurate to about 1e-16
    /// absolute; used as a cross-check on the split form.
    pub fn regularizer_transform(&self, l: i64) -> f64 {
        let r = self.params.r;
        let g = &self.gaussian;
        let f = |u: f64| g.eval(u) * (2.0 * PI * l as f64 * u).cos();
        let rule = gl64();
        let mut panels = 1usize.max((2.0 * r * l.unsigned_abs() as f64).ceil() as usize);
        let mut prev = f64::NAN;
        loop {
            let h = r / panels as f64;
            let est: f64 = (0..panels)
                .map(|i| rule.integrate(i as f64 * h, (i + 1) as f64 * h, f))
                .sum();
            if (est - prev).abs() <= 1e-15 * est.abs().max(1e-300) || panels > 1 << 12 {
                return 2.0 * est;
            }
            prev = est;
            panels *= 2;
        }
    }
}

impl AliasingCoefficients {
    /// Compute `mu`, `nu` on the band of `params` and the alias shells.
    pub fn new(params: RegularizerParams) -> Result<Self> {
        Self::with_cap(params, MAX_SHELLS)
    }

    pub fn with_cap(params: RegularizerParams, cap: usize) -> Result<Self> {
        let engine = AliasEngine::new(params)?;
        let band = IndexBand::new(params.m_frak)?;
        let n2 = 2 * params.n as i64;
        let mut mu = Vec::with_capacity(band.len());
        let mut nu = Vec::with_capacity(band.len());
        let mut alias = Vec::with_capacity(band.len());
        let mut tails = Vec::with_capacity(band.len());
        let mut cutoff = 0;
        for k in band.iter() {
            mu.push(engine.mu(k));
            nu.push(engine.nu(k));
            let mut shells = Vec::new();
            let mut sum = 0.0;
            let mut l = 0usize;
            let mut tail;
            loop {
                l += 1;
                if l > cap {
                    return Err(Error::AliasOverflow { cap });
                }
                let li = l as i64;
                let p = engine.mu(k + li * n2);
                let m = engine.mu(k - li * n2);
                shells.push((p, m));
                sum += p * p + m * m;
                // Past the first few shells mu^2 decays like l^-2; estimate the
                // rest from the mean of l^2 mu^2 over the latter half.
                if l >= 64 && l.is_multiple_of(64) {
                    let half = l / 2;
                    let mean: f64 = shells[half..]
                        .iter()
                        .enumerate()
                        .map(|(i, (p, m))| {
                            let ll = (half + i + 1) as f64;
                            ll * ll * (p * p + m * m)
                        })
                        .sum::<f64>()
                        / (l - half) as f64;
                    tail = mean / (l as f64 + 0.5);
                    if tail <= 2e-4 * sum || sum == 0.0 {
                        break;
                    }
                }
            }
            cutoff = cutoff.max(l);
            alias.push(shells);
            tails.push(tail);
        }
        Ok(AliasingCoefficients {
            params,
            band,
            mu,
            nu,
            alias,
            tails,
            alias_cutoff: cutoff,
        })
    }

    pub fn params(&self) -> &RegularizerParams {
        &self.params
    }

    pub fn band(&self) -> IndexBand {
        self.band
    }

    pub fn alias_cutoff(&self) -> usize {
        self.alias_cutoff
    }

    /// `mu(k)` for `k` in the band.
    pub fn mu(&self, k: i64) -> Option<f64> {
        self.band.slot(k).map(|s| self.mu[s])
    }

    pub fn nu(&self, k: i64) -> Option<f64> {
        self.band.slot(k).map(|s| self.nu[s])
    }

    /// `mu(k + 2 l N)` for `k` in the band and `0 < |l| <= L_a`.
    pub fn alias_mu(&self, k: i64, l: i64) -> Option<f64> {
        let s = self.band.slot(k)?;
        let shells = &self.alias[s];
        let idx = l.unsigned_abs() as usize;
        if idx == 0 || idx > shells.len() {
            return None;
        }
        let (p, m) = shells[idx - 1];
        Some(if l > 0 { p } else { m })
    }

    /// `sum_{l != 0} mu(k + 2lN)^2` including the estimated tail.
    pub fn alias_energy(&self, k: i64) -> Option<f64> {
        let s = self.band.slot(k)?;
        let direct: f64 = self.alias[s].iter().map(|(p, m)| p * p + m * m).sum();
        Some(direct + self.tails[s])
    }

    /// Estimated contribution of the shells past the cutoff.
    pub fn tail_energy(&self, k: i64) -> Option<f64> {
        self.band.slot(k).map(|s| self.tails[s])
    }
}

/// `||f - R f||_{L^2}` from the spectral identity
/// `sum_k |f(k) nu(k)|^2 + sum_{l != 0} sum_k |f(k) mu(k + 2lN)|^2`.
pub fn exact_l2_error(signal: &BandlimitedSignal, coeffs: &AliasingCoefficients) -> Result<f64> {
    let m = signal.band().half_width();
    let p = coeffs.params();
    if m >= p.n {
        return Err(Error::Aliasing { m_frak: m, n: p.n });
    }
    if m > coeffs.band().half_width() {
        return Err(Error::Shape(format!(
            "signal band {m} wider than the coefficient band {}",
            coeffs.band().half_width()
        )));
    }
    let mut total = 0.0;
    for k in signal.band().iter() {
        let e = signal.mode_energy(k);
        let nu = coeffs.nu(k).expect("k in band");
        total += e * (nu * nu + coeffs.alias_energy(k).expect("k in band"));
    }
    Ok(total.sqrt())
}

/// Per-mode error `sqrt(nu(k)^2 + sum_{l != 0} mu(k + 2lN)^2)`.
pub fn mode_error(coeffs: &AliasingCoefficients, k: i64) -> Option<f64> {
    let nu = coeffs.nu(k)?;
    Some((nu * nu + coeffs.alias_energy(k)?).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn engine(n: usize) -> AliasEngine {
        AliasEngine::new(RegularizerParams::standard(2, n).unwrap()).unwrap()
    }

    #[test]
    fn expansion_matches_quadrature_where_both_apply() {
        let e = engine(32);
        // just above the switch, both routes are valid
        let n2 = 64;
        for l in [8i64, 20] {
            for k in [-2i64, 1] {
                let q = k + l * n2;
                let a = e.tau_window(q);
                let b = e.tau_window_quadrature(q);
                assert!((a - b).abs() <= 1e-6 * b.abs() + 1e-30, "q={q} {a:e} {b:e}");
            }
        }
    }

    fn direct_tau(e: &AliasEngine, l: i64) -> f64 {
        let r = e.params().r;
        let g = e.gaussian();
        let v = crate::quadrature::integrate(
            |u| g.eval(u) * (2.0 * PI * l as f64 * u).cos(),
            r,
            0.5,
            &[],
            &QuadOptions {
                rel_tol: 1e-13,
                abs_tol: 1e-28,
                ..QuadOptions::default()
            },
        )
        .unwrap();
        2.0 * v
    }

    #[test]
    fn split_agrees_with_direct_transform() {
        let e = engine(32);
        let g = e.gaussian();
        for l in [0i64, 1, 5, 31, 40] {
            let direct = e.regularizer_transform(l);
            let split = g.fourier_coeff(l) - direct_tau(&e, l);
            assert!((direct - split).abs() < 2e-15, "l={l} {direct:e} {split:e}");
        }
    }

    #[test]
    fn window_sum_matches_termwise_sum() {
        let e = engine(32);
        for q in [-2i64, 0, 1, 70] {
            let termwise: f64 = (q - 31..=q + 32).map(|l| direct_tau(&e, l)).sum();
            let w = e.tau_window(q);
            assert!(
                (w - termwise).abs() < 1e-6 * termwise.abs(),
                "q={q} {w:e} {termwise:e}"
            );
        }
    }

    #[test]
    fn mu_plus_nu_is_one() {
        let c = AliasingCoefficients::new(RegularizerParams::standard(2, 32).unwrap()).unwrap();
        for k in c.band().iter() {
            assert!((c.mu(k).unwrap() + c.nu(k).unwrap() - 1.0).abs() < 1e-12);
        }
    }
}
