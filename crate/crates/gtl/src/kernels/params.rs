use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_ALPHA: f64 = 0.96;
pub const DEFAULT_BETA: f64 = 0.98;
pub const DEFAULT_SERIES_TOL: f64 = 1e-16;

/// Truncation radius and variance parameter of the regularizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizerParams {
    pub m_frak: usize,
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub r: f64,
    pub sigma: f64,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub series_tol: f64,
}

/// `(r, sigma)` from the schedule `r = c1 / M^alpha`, `sigma = M^beta / c2`, `M = N - m`.
pub fn schedule(
    m_frak: usize,
    n: usize,
    alpha: f64,
    beta: f64,
    c1: Option<f64>,
    c2: Option<f64>,
) -> (f64, f64) {
    let m = n as f64 - m_frak as f64;
    let c1 = c1.unwrap_or(3.0 * PI);
    let c2 = c2.unwrap_or(6f64.sqrt() * PI);
    (c1 / m.powf(alpha), m.powf(beta) / c2)
}

impl RegularizerParams {
    /// Default schedule with `c1 = 3 pi`, `c2 = sqrt(6) pi`.
    pub fn new(m_frak: usize, n: usize, alpha: f64, beta: f64) -> Result<Self> {
        Self::with_overrides(m_frak, n, alpha, beta, None, None)
    }

    /// The default exponents 0.96 and 0.98.
    pub fn standard(m_frak: usize, n: usize) -> Result<Self> {
        Self::new(m_frak, n, DEFAULT_ALPHA, DEFAULT_BETA)
    }

    pub fn with_overrides(
        m_frak: usize,
        n: usize,
        alpha: f64,
        beta: f64,
        c1: Option<f64>,
        c2: Option<f64>,
    ) -> Result<Self> {
        check_shape(m_frak, n, alpha, beta)?;
        for c in [c1, c2].into_iter().flatten() {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidParams(format!(
                    "override constant {c} must be positive"
                )));
            }
        }
        let (r, sigma) = schedule(m_frak, n, alpha, beta, c1, c2);
        let p = RegularizerParams {
            m_frak,
            n,
            alpha,
            beta,
            r,
            sigma,
            c1,
            c2,
            series_tol: DEFAULT_SERIES_TOL,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_shape(self.m_frak, self.n, self.alpha, self.beta)?;
        if !(self.r > 0.0 && self.r < 0.5) {
            return Err(Error::InvalidParams(format!(
                "truncation radius {} exceeds half-period",
                self.r
            )));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "sigma {} must be positive",
                self.sigma
            )));
        }
        if !(self.series_tol > 0.0 && self.series_tol < 1e-6) {
            return Err(Error::InvalidParams("series tolerance out of range".into()));
        }
        Ok(())
    }

    /// `N - m`.
    pub fn gap(&self) -> f64 {
        self.n as f64 - self.m_frak as f64
    }

    pub fn sample_count(&self) -> usize {
        2 * self.n
    }

    /// The interval `[r, 1 - r]` on which the generalization bounds hold.
    pub fn zone(&self) -> (f64, f64) {
        (self.r, 1.0 - self.r)
    }

    pub fn in_zone(&self, x: f64) -> bool {
        x >= self.r && x <= 1.0 - self.r
    }
}

fn check_shape(m_frak: usize, n: usize, alpha: f64, beta: f64) -> Result<()> {
    if m_frak == 0 {
        return Err(Error::InvalidParams("bandwidth must be positive".into()));
    }
    if n <= m_frak {
        return Err(Error::Aliasing { m_frak, n });
    }
    if !(alpha > 0.0 && alpha < beta && beta < 1.0) {
        return Err(Error::InvalidParams(format!(
            "need 0 < alpha < beta < 1, got alpha={alpha}, beta={beta}"
        )));
    }
    Ok(())
}

/// What the planner derives from a target accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    pub epsilon: f64,
    pub m_frak: usize,
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub r: f64,
    pub sigma: f64,
    pub weights: usize,
    pub n_min: u64,
    pub zone: (f64, f64),
    pub valid: bool,
    pub issues: Vec<String>,
}

impl PlanReport {
    /// The parameters, when the plan is usable.
    pub fn params(&self) -> Option<RegularizerParams> {
        if !self.valid {
            return None;
        }
        Some(RegularizerParams {
            m_frak: self.m_frak,
            n: self.n,
            alpha: self.alpha,
            beta: self.beta,
            r: self.r,
            sigma: self.sigma,
            c1: None,
            c2: None,
            series_tol: DEFAULT_SERIES_TOL,
        })
    }
}

/// Ceiling that ignores float noise just above an integer.
fn ceil_clean(v: f64) -> f64 {
    let near = v.round();
    if (v - near).abs() <= 1e-12 * v.abs().max(1.0) {
        near
    } else {
        v.ceil()
    }
}

/// Plan `N = ceil(eps^(-10/9))` and `n_min = ceil(eps^(-13/3))` for accuracy `eps`.
///
/// A radius at or above one half does not abort planning; the report comes
/// back with `valid = false` and the reason listed.
pub fn plan_params(
    epsilon: f64,
    m_frak: usize,
    alpha: f64,
    beta: f64,
    c1: Option<f64>,
    c2: Option<f64>,
) -> Result<PlanReport> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParams(format!(
            "epsilon {epsilon} must lie in (0, 1)"
        )));
    }
    if m_frak == 0 {
        return Err(Error::InvalidParams("bandwidth must be positive".into()));
    }
    let n = ceil_clean(epsilon.powf(-10.0 / 9.0)) as usize;
    if n <= m_frak {
        return Err(Error::Aliasing { m_frak, n });
    }
    if !(alpha > 0.0 && alpha < beta && beta < 1.0) {
        return Err(Error::InvalidParams(format!(
            "need 0 < alpha < beta < 1, got alpha={alpha}, beta={beta}"
        )));
    }
    let n_min = ceil_clean(epsilon.powf(-13.0 / 3.0)) as u64;
    let (r, sigma) = schedule(m_frak, n, alpha, beta, c1, c2);
    let mut issues = Vec::new();
    if r >= 0.5 {
        issues.push(format!("truncation radius {r:.6} exceeds half-period"));
    }
    Ok(PlanReport {
        epsilon,
        m_frak,
        n,
        alpha,
        beta,
        r,
        sigma,
        weights: 2 * n,
        n_min,
        zone: (r, 1.0 - r),
        valid: issues.is_empty(),
        issues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_values() {
        let p = RegularizerParams::standard(2, 32).unwrap();
        assert!((p.r - 3.0 * PI / 30f64.powf(0.96)).abs() < 1e-15);
        assert!((p.sigma - 30f64.powf(0.98) / (6f64.sqrt() * PI)).abs() < 1e-15);
        assert!((p.r - 0.35994).abs() < 1e-4);
        assert!((p.sigma - 3.6421).abs() < 1e-3);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            RegularizerParams::standard(4, 4),
            Err(Error::Aliasing { .. })
        ));
        assert!(RegularizerParams::new(2, 32, 0.98, 0.96).is_err());
        // radius too large for small gaps
        assert!(RegularizerParams::standard(1, 13).is_err());
        assert!(RegularizerParams::with_overrides(1, 13, 0.96, 0.98, Some(1.0), None).is_ok());
    }

    #[test]
    fn planner_reference_case() {
        let rep = plan_params(0.1, 1, DEFAULT_ALPHA, DEFAULT_BETA, None, None).unwrap();
        assert_eq!(rep.n, 13);
        assert_eq!(rep.weights, 26);
        assert_eq!(rep.n_min, 21545);
        assert!(!rep.valid);
        assert!((rep.r - 0.868).abs() < 1e-3);
        assert!(rep.params().is_none());
        assert!(plan_params(1.5, 1, 0.96, 0.98, None, None).is_err());
    }
}
