use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::params::RegularizerParams;
use crate::error::{Error, Result};

/// The rate function of the regularized sampling bound and its two parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TildeBound {
    pub total: f64,
    /// Form bounding the in-band attenuation `nu`.
    pub nu_part: f64,
    /// Form bounding the out-of-band leakage `mu`.
    pub mu_part: f64,
}

/// `E(M) = e^{-3 pi^2 M^{2(1-b)}} max(1, M^{2b-1}) + M^{a+b} e^{-3 pi^2 M^{2(b-a)}}`
/// with `M = N - m`, plus the component forms
/// `E1 = E` and `E2 = M^b e^{-3 pi^2 M^{2(b-a)}} + M^{2b-a-1} e^{-3 pi^2 M^{2(1-b)}}`.
pub fn error_bound_tilde_raw(gap: f64, alpha: f64, beta: f64) -> Result<TildeBound> {
    if gap <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "N - m = {gap} must be positive"
        )));
    }
    let m = gap;
    let k = 3.0 * PI * PI;
    let e_beta = (-k * m.powf(2.0 * (1.0 - beta))).exp();
    let e_gap = (-k * m.powf(2.0 * (beta - alpha))).exp();
    let total = e_beta * m.powf(2.0 * beta - 1.0).max(1.0) + m.powf(alpha + beta) * e_gap;
    let mu_part = m.powf(beta) * e_gap + m.powf(2.0 * beta - alpha - 1.0) * e_beta;
    Ok(TildeBound {
        total,
        nu_part: total,
        mu_part,
    })
}

pub fn error_bound_tilde(params: &RegularizerParams) -> Result<TildeBound> {
    error_bound_tilde_raw(params.gap(), params.alpha, params.beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        let b = error_bound_tilde_raw(62.0, 0.96, 0.98).unwrap();
        assert!((b.total - 2.0784e-12).abs() < 1e-15);
        let b30 = error_bound_tilde_raw(30.0, 0.96, 0.98).unwrap();
        assert!((b30.total - 1.4056e-12).abs() < 1e-15);
        assert!(error_bound_tilde_raw(0.0, 0.96, 0.98).is_err());
    }

    #[test]
    fn limit_scale() {
        // with both exponents at 1 the exponentials are e^{-3 pi^2}
        let b = error_bound_tilde_raw(62.0, 0.999999, 0.9999995).unwrap();
        let e = (-3.0 * PI * PI).exp();
        assert!((e - 1.4e-13).abs() < 1e-14);
        assert!((b.total / e - (62.0 + 62f64.powi(2))).abs() < 0.01 * 62f64.powi(2));
    }
}
