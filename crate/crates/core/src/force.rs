//! Casimir force per unit surface area, `F = -(1/4πa²) ∂E/∂a`, where the
//! derivative is taken along an adiabatic collapse: the number of atoms and
//! `N = a/λ` stay fixed, so `ρ ∝ a⁻³` and `λ ∝ a`, while the atoms themselves
//! (their polarizability) do not change.
//!
//! Two routes: the spectral double integral
//! `F = -(ρ²/4πa³) ∫dω ∫dx x(7x² + 3ω²) g(x)/(x² + ω²)² α(iω) f(N, ωλ)`,
//! and a Richardson-extrapolated central difference of the energy.

use std::cell::RefCell;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{energy_analytic, kernel_f};
use crate::error::{CasimirError, Result};
use crate::polarizability::{BallGeometry, PolarizabilityModel, SpectralTable};
use crate::quadrature::{integrate_finite, integrate_semi_infinite, QuadratureConfig};

pub const DEFAULT_STEP: f64 = 1e-4;
pub const MIN_STEP: f64 = 1e-6;
pub const MAX_STEP: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForceMethod {
    Spectral,
    FiniteDifference,
}

/// Surface pressure; negative means the force points inward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceResult {
    pub method: ForceMethod,
    pub pressure: f64,
    pub error_estimate: f64,
}

/// `∫ x(7x² + 3ω²)g(x)/(x² + ω²)² dx` over the linear segments of `table`.
fn tabulated_force_weight(table: &SpectralTable, omega: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let w2 = omega * omega;
    let mut total = 0.0;
    for ((x0, g0), (x1, g1)) in table.segments() {
        if g0 == 0.0 && g1 == 0.0 {
            continue;
        }
        let width = x1 - x0;
        let r = integrate_finite(
            |x| {
                let t = (x - x0) / width;
                let g = g0 * (1.0 - t) + g1 * t;
                let d = x * x + w2;
                x * (7.0 * x * x + 3.0 * w2) * g / (d * d)
            },
            x0,
            x1,
            cfg,
        )?;
        total += r.require("spectral weight over x")?;
    }
    Ok(total)
}

/// Force from the spectral double integral.
///
/// The oscillator family collapses the `x`-integral to a sum over resonances;
/// a tabulated density is integrated numerically inside the `ω`-integral. The
/// static model has no spectral density and is rejected.
pub fn force_spectral(
    geom: &BallGeometry,
    model: &PolarizabilityModel,
    cfg: &QuadratureConfig,
) -> Result<ForceResult> {
    geom.validate()?;
    model.validate()?;
    cfg.validate()?;
    let n = geom.ratio();
    let lambda = geom.lambda;
    let prefactor = -geom.rho * geom.rho / (4.0 * PI * geom.a.powi(3));

    let integral = match model {
        PolarizabilityModel::Static { .. } => {
            return Err(CasimirError::ModelKind {
                operation: "force_spectral",
                kind: "static",
            })
        }
        PolarizabilityModel::Oscillators(list) => integrate_semi_infinite(
            |omega| {
                let w2 = omega * omega;
                let weight: f64 = list
                    .iter()
                    .map(|o| {
                        let r2 = o.resonance * o.resonance;
                        let d = r2 + w2;
                        o.strength * o.resonance * (7.0 * r2 + 3.0 * w2) / (d * d)
                    })
                    .sum();
                weight * model.alpha_imag_axis(omega) * kernel_f(n, omega * lambda).f_value
            },
            0.0,
            0.5 / lambda,
            cfg,
        )?,
        PolarizabilityModel::TabulatedSpectral(table) => {
            let level = cfg.per_level(2);
            let failure = RefCell::new(None);
            let r = integrate_semi_infinite(
                |omega| match tabulated_force_weight(table, omega, &level) {
                    Ok(weight) => {
                        weight * model.alpha_imag_axis(omega) * kernel_f(n, omega * lambda).f_value
                    }
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        f64::NAN
                    }
                },
                0.0,
                0.5 / lambda,
                &level,
            )?;
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            r
        }
    };

    Ok(ForceResult {
        method: ForceMethod::Spectral,
        pressure: prefactor * integral.require("spectral force frequency integral")?,
        error_estimate: prefactor.abs() * integral.error_estimate,
    })
}

fn check_step(step: f64) -> Result<()> {
    if (MIN_STEP..=MAX_STEP).contains(&step) {
        Ok(())
    } else {
        Err(CasimirError::Domain(format!(
            "relative step {step} outside [{MIN_STEP:e}, {MAX_STEP:e}]"
        )))
    }
}

/// `∂E/∂a` along the collapse, Richardson-extrapolated from steps `h` and
/// `h/2`, together with the extrapolation correction.
fn constrained_derivative(
    geom: &BallGeometry,
    model: &PolarizabilityModel,
    cfg: &QuadratureConfig,
    step: f64,
) -> Result<(f64, f64)> {
    let a = geom.a;
    let energy_at = |radius: f64| -> Result<f64> {
        Ok(energy_analytic(&geom.collapsed_to(radius), model, cfg)?.total)
    };
    let central = |h: f64| -> Result<f64> {
        Ok((energy_at(a * (1.0 + h))? - energy_at(a * (1.0 - h))?) / (2.0 * a * h))
    };
    let coarse = central(step)?;
    let fine = central(0.5 * step)?;
    let extrapolated = (4.0 * fine - coarse) / 3.0;
    Ok((extrapolated, (extrapolated - fine).abs()))
}

/// Force from a central difference of the analytic energy under the
/// collapse constraints. Works for every model kind.
pub fn force_finite_difference(
    geom: &BallGeometry,
    model: &PolarizabilityModel,
    cfg: &QuadratureConfig,
    step: f64,
) -> Result<ForceResult> {
    check_step(step)?;
    geom.validate()?;
    model.validate()?;
    let (derivative, correction) = constrained_derivative(geom, model, cfg, step)?;
    let area = 4.0 * PI * geom.a * geom.a;
    Ok(ForceResult {
        method: ForceMethod::FiniteDifference,
        pressure: -derivative / area,
        error_estimate: correction / area,
    })
}

/// `d ln E / d ln a` along the collapse; `-7` for a static polarizability.
pub fn energy_log_slope(
    geom: &BallGeometry,
    model: &PolarizabilityModel,
    cfg: &QuadratureConfig,
    step: f64,
) -> Result<f64> {
    check_step(step)?;
    let (derivative, _) = constrained_derivative(geom, model, cfg, step)?;
    let energy = energy_analytic(geom, model, cfg)?.total;
    Ok(geom.a * derivative / energy)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanCase {
    pub geometry: BallGeometry,
    pub model: PolarizabilityModel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanEntry {
    pub case: ScanCase,
    pub outcome: Result<ForceResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttractivityReport {
    pub entries: Vec<ScanEntry>,
}

impl AttractivityReport {
    pub fn evaluated(&self) -> usize {
        self.entries.len()
    }

    /// Cases with a non-negative pressure.
    pub fn violations(&self) -> impl Iterator<Item = &ScanEntry> {
        self.entries
            .iter()
            .filter(|e| matches!(&e.outcome, Ok(f) if !(f.pressure < 0.0)))
    }

    pub fn failures(&self) -> impl Iterator<Item = &ScanEntry> {
        self.entries.iter().filter(|e| e.outcome.is_err())
    }

    pub fn all_attractive(&self) -> bool {
        self.violations().next().is_none() && self.failures().next().is_none()
    }

    /// Largest pressure over the grid relative to its own magnitude scale
    /// `ρ²α²(0)/a⁴`; negative when every case is attractive.
    pub fn worst_margin(&self) -> Option<f64> {
        self.entries
            .iter()
            .filter_map(|e| {
                let f = e.outcome.as_ref().ok()?;
                let g = &e.case.geometry;
                let scale = (g.rho * e.case.model.static_alpha()).powi(2) / g.a.powi(4);
                Some(if scale > 0.0 { f.pressure / scale } else { f.pressure })
            })
            .reduce(f64::max)
    }
}

/// Evaluates [`force_spectral`] on every case, in parallel, keeping grid
/// order. Non-negative pressures and failures are reported, never raised.
pub fn attractivity_scan(cases: &[ScanCase], cfg: &QuadratureConfig) -> AttractivityReport {
    let entries = cases
        .par_iter()
        .map(|case| ScanEntry {
            case: case.clone(),
            outcome: force_spectral(&case.geometry, &case.model, cfg),
        })
        .collect();
    AttractivityReport { entries }
}

/// Single-oscillator cases over `ω₁λ × N` at fixed radius, density and
/// strength.
pub fn oscillator_scan_grid(
    omega_lambda: &[f64],
    ratios: &[f64],
    a: f64,
    rho: f64,
    strength: f64,
) -> Result<Vec<ScanCase>> {
    let mut cases = Vec::with_capacity(omega_lambda.len() * ratios.len());
    for &n in ratios {
        let geometry = BallGeometry::with_ratio(a, n, rho)?;
        for &wl in omega_lambda {
            let model = PolarizabilityModel::single_oscillator(strength, wl / geometry.lambda)?;
            cases.push(ScanCase {
                geometry,
                model: model.clone(),
            });
        }
    }
    Ok(cases)
}
