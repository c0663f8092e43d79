//! Retarded dipole-dipole (Casimir-Polder) interaction of two identical atoms:
//!
//! `U(r) = -(1/πr²) ∫₀^∞ ω⁴ α²(iω) e^{-2ωr} [1 + 2/(ωr) + 5/(ωr)² + 6/(ωr)³ + 3/(ωr)⁴] dω`.

use std::f64::consts::PI;

use crate::error::{CasimirError, Result};
use crate::polarizability::PolarizabilityModel;
use crate::quadrature::{integrate_semi_infinite, IntegralResult, QuadratureConfig};

fn check_separation(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(CasimirError::Domain(format!(
            "pair separation must be positive and finite, got {r}"
        )))
    }
}

/// The bracket multiplied through by `ω⁴`, finite at `ω = 0`.
#[inline]
fn retardation_polynomial(omega: f64, r: f64) -> f64 {
    let inv = 1.0 / r;
    (((omega + 2.0 * inv) * omega + 5.0 * inv * inv) * omega + 6.0 * inv * inv * inv) * omega
        + 3.0 * inv.powi(4)
}

/// `U(r)` with its quadrature diagnostics.
pub fn pair_u_detailed(
    model: &PolarizabilityModel,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    check_separation(r)?;
    let integral = integrate_semi_infinite(
        |omega| {
            let alpha = model.alpha_imag_axis(omega);
            alpha * alpha * (-2.0 * omega * r).exp() * retardation_polynomial(omega, r)
        },
        0.0,
        0.5 / r,
        cfg,
    )?;
    let scale = -1.0 / (PI * r * r);
    Ok(IntegralResult {
        value: scale * integral.value,
        error_estimate: scale.abs() * integral.error_estimate,
        ..integral
    })
}

/// `U(r)` by quadrature; fails if the frequency integral does not converge.
pub fn pair_u(model: &PolarizabilityModel, r: f64, cfg: &QuadratureConfig) -> Result<f64> {
    pair_u_detailed(model, r, cfg)?.require("pair potential frequency integral")
}

/// Closed form for constant polarizability: `U(r) = -23 α₀² / (4π r⁷)`.
pub fn pair_u_static_closed(alpha0: f64, r: f64) -> Result<f64> {
    check_separation(r)?;
    Ok(-23.0 * alpha0 * alpha0 / (4.0 * PI * r.powi(7)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn static_closed_form_values() {
        let u = pair_u_static_closed(1.0, 1.0).unwrap();
        assert!((u + 23.0 / (4.0 * PI)).abs() < 1e-15);
        assert!((u + 1.830_281_845_556_796).abs() < 1e-12);
        assert_eq!(pair_u_static_closed(0.0, 2.0).unwrap(), 0.0);
        let ratio = pair_u_static_closed(1.3, 2.4).unwrap() / pair_u_static_closed(1.3, 1.2).unwrap();
        assert!((ratio - 2f64.powi(-7)).abs() < 1e-15);
        assert!(pair_u_static_closed(1.0, 0.0).is_err());
    }

    #[test]
    fn quadrature_matches_static_closed_form() {
        let m = PolarizabilityModel::constant(0.8).unwrap();
        let cfg = QuadratureConfig::default();
        for &r in &[0.01, 0.3, 1.0, 17.0, 1000.0] {
            let q = pair_u(&m, r, &cfg).unwrap();
            let c = pair_u_static_closed(0.8, r).unwrap();
            assert!(((q - c) / c).abs() < 1e-8, "r = {r}");
        }
    }

    #[test]
    fn zero_model_and_domain() {
        let m = PolarizabilityModel::oscillators(vec![]).unwrap();
        assert_eq!(pair_u(&m, 1.0, &QuadratureConfig::default()).unwrap(), 0.0);
        assert!(pair_u(&m, -1.0, &QuadratureConfig::default()).is_err());
    }

    #[test]
    fn oscillator_reference_value() {
        // 30-digit mpmath quadrature of the defining integral.
        let m = PolarizabilityModel::single_oscillator(1.0, 1.0).unwrap();
        let u = pair_u(&m, 1.0, &QuadratureConfig::default().with_rel_tol(1e-12)).unwrap();
        assert!(((u + 0.651_266_426_221_154_049_6) / 0.651_266_426_221_154_049_6).abs() < 1e-10);
    }
}
