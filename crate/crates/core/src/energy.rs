//! Casimir energy of the ball.
//!
//! With `N = a/λ` and `p = ωλ` the closed single-frequency form is
//!
//! ```text
//! E = -ρ² (π/48) ∫₀^∞ dω α²(iω) G(N, ωλ)
//!   = -(ρ²/λ) ∫₀^∞ dp α²(ip/λ) f(N, p),        f = (π/48) G,
//! ```
//!
//! where `G` is the sum of four lines: the volume line (`∝ N³`), the surface
//! line (`∝ N²`), the `N`-independent line and the line carrying `e^{-4Np}`
//! and `E1(4Np)`, whose static part is the large-distance energy
//! `E_ld = ρ²α²(0)·23π/(96a)`.
//!
//! The brute-force path integrates the pair potential over all atom pairs in
//! the ball directly and shares no algebra with the closed form.

use std::cell::RefCell;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{CasimirError, Result};
use crate::geometry::{inside_area, regions, Region};
use crate::pair_potential::pair_u_detailed;
use crate::polarizability::{BallGeometry, PolarizabilityModel};
use crate::quadrature::{
    integrate_finite, integrate_semi_infinite, IntegralResult, QuadratureConfig,
};
use crate::special_functions::{e1, e1_diff_unchecked};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyMethod {
    BruteForce,
    Analytic,
    Kernel,
}

/// The four lines of the closed form, each integrated separately.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalyticTerms {
    pub volume_term: f64,
    pub surface_term: f64,
    pub constant_term: f64,
    pub large_distance_term: f64,
}

impl AnalyticTerms {
    pub fn sum(&self) -> f64 {
        self.volume_term + self.surface_term + self.constant_term + self.large_distance_term
    }
}

/// Contributions of the three geometric integration regions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionContributions {
    pub region_i: f64,
    pub region_ii: f64,
    pub region_iii: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub method: EnergyMethod,
    pub total: f64,
    pub error_estimate: f64,
    /// Present for [`EnergyMethod::Analytic`]; serialized inline.
    #[serde(flatten)]
    pub terms: Option<AnalyticTerms>,
    /// Present for [`EnergyMethod::BruteForce`]. Regions do not map onto the
    /// analytic terms; only totals are comparable.
    #[serde(flatten)]
    pub regions: Option<RegionContributions>,
    /// `λ ≥ 2a`: no atom pair is admitted and the energy is zero.
    pub degenerate: bool,
}

/// Value of `f(N, p)` together with whether `(N, p)` lies in `N > 1/2, p > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelPoint {
    pub n: f64,
    pub p: f64,
    pub f_value: f64,
    pub in_domain: bool,
}

fn validate_inputs(geom: &BallGeometry, model: &PolarizabilityModel) -> Result<()> {
    geom.validate()?;
    model.validate()?;
    Ok(())
}

fn degenerate_result(method: EnergyMethod) -> EnergyBreakdown {
    EnergyBreakdown {
        method,
        total: 0.0,
        error_estimate: 0.0,
        terms: (method == EnergyMethod::Analytic).then_some(AnalyticTerms {
            volume_term: 0.0,
            surface_term: 0.0,
            constant_term: 0.0,
            large_distance_term: 0.0,
        }),
        regions: (method == EnergyMethod::BruteForce).then_some(RegionContributions {
            region_i: 0.0,
            region_ii: 0.0,
            region_iii: 0.0,
        }),
        degenerate: true,
    }
}

/// Records the first failure raised inside an integrand.
struct FailureSlot(RefCell<Option<CasimirError>>);

impl FailureSlot {
    fn new() -> Self {
        FailureSlot(RefCell::new(None))
    }

    fn check(&self, r: Result<IntegralResult>, stage: impl FnOnce() -> String) -> f64 {
        match r {
            Ok(res) if res.converged => res.value,
            Ok(res) => {
                self.record(CasimirError::not_converged(
                    stage(),
                    res.value,
                    res.error_estimate,
                ));
                res.value
            }
            Err(e) => {
                self.record(e);
                f64::NAN
            }
        }
    }

    fn record(&self, e: CasimirError) {
        let mut slot = self.0.borrow_mut();
        if slot.is_none() {
            *slot = Some(e);
        }
    }

    fn take(self) -> Option<CasimirError> {
        self.0.into_inner()
    }
}

/// Pairwise sum over the ball by direct integration:
/// `E = (ρ²/2) Σ_regions ∫ dp 4πp² ∫ dr S(p, r) U(r)` with `S` the area of the
/// separation-`r` sphere around an atom at radius `p` that lies inside the ball.
///
/// Three nested adaptive integrals; each level gets `cfg.per_level(3)`.
pub fn energy_brute_force(
    geom: &BallGeometry,
    model: &PolarizabilityModel,
    cfg: &QuadratureConfig,
) -> Result<EnergyBreakdown> {
    validate_inputs(geom, model)?;
    cfg.validate()?;
    if geom.is_degenerate() {
        return Ok(degenerate_result(EnergyMethod::BruteForce));
    }
    let level = cfg.per_level(3);
    let a = geom.a;

    let mut values = [0.0; 3];
    let mut error = 0.0;
    for (slot, bounds) in values.iter_mut().zip(regions(geom)) {
        if bounds.is_empty() {
            continue;
        }
        let label = match bounds.region {
            Region::I => "region I",
            Region::II => "region II",
            Region::III => "region III",
        };
        let failures = FailureSlot::new();
        let shell = |p: f64| {
            let (r_lo, r_hi) = bounds.r_interval(p);
            if r_lo >= r_hi {
                return 0.0;
            }
            let inner = integrate_finite(
                |r| {
                    let u = failures.check(pair_u_detailed(model, r, &level), || {
                        format!("{label}: pair potential at r = {r:e}")
                    });
                    inside_area(p, r, a).unwrap_or(f64::NAN) * u
                },
                r_lo,
                r_hi,
                &level,
            );
            let v = failures.check(inner, || format!("{label}: separation integral at p = {p:e}"));
            4.0 * PI * p * p * v
        };
        let outer = integrate_finite(shell, bounds.p_interval.0, bounds.p_interval.1, &level)?;
        if let Some(e) = failures.take() {
            return Err(e);
        }
        let value = outer.require(&format!("{label}: radial integral"))?;
        *slot = 0.5 * geom.rho * geom.rho * value;
        error += 0.5 * geom.rho * geom.rho * outer.error_estimate;
    }

    let [region_i, region_ii, region_iii] = values;
    Ok(EnergyBreakdown {
        method: EnergyMethod::BruteForce,
        total: region_i + region_ii + region_iii,
        error_estimate: error,
        terms: None,
        regions: Some(RegionContributions {
            region_i,
            region_ii,
            region_iii,
        }),
        degenerate: false,
    })
}

/// Volume line of `G`.
fn volume_line(n: f64, p: f64) -> f64 {
    n * n * n * (-2.0 * p).exp() * (128.0 + p * (256.0 + p * (128.0 + 64.0 * p)))
}

/// Surface line of `G`.
fn surface_line(n: f64, p: f64) -> f64 {
    let poly = (-2.0 * p).exp() * (144.0 + p * (288.0 + p * (120.0 + 48.0 * p)));
    -n * n * (poly - 96.0 * p * p * e1(2.0 * p))
}

/// `N`-independent line of `G`.
fn constant_line(p: f64) -> f64 {
    (-2.0 * p).exp() * (41.0 + p * (34.0 + p * (14.0 + 4.0 * p))) + 24.0 * e1(2.0 * p)
}

/// Line of `G` carrying the ball size through `q = ωa = Np`.
fn large_distance_line(q: f64) -> f64 {
    (-4.0 * q).exp() * (-21.0 + 12.0 * q) - e1(4.0 * q) * (24.0 + 96.0 * q * q)
}

/// `f(N, p) = (π/48) G(N, p)`, with `24 E1(2p) - 24 E1(4Np)` taken as one
/// difference so the small-`p` logarithms cancel.
///
/// `p = 0` returns the limit [`kernel_f_small_p_limit`]; `p < 0` or `N ≤ 0`
/// give NaN. Points outside `N > 1/2, p > 0` are flagged, not rejected.
pub fn kernel_f(n: f64, p: f64) -> KernelPoint {
    let in_domain = n > 0.5 && p > 0.0;
    let f_value = if !(n > 0.0) || !(p >= 0.0) {
        f64::NAN
    } else if p == 0.0 {
        kernel_f_small_p_limit(n)
    } else {
        let two_p = 2.0 * p;
        let four_np = 4.0 * n * p;
        let decay = (-two_p).exp();
        let decay_ball = (-four_np).exp();
        let n2 = n * n;
        let p2 = p * p;
        let g = n2 * n * decay * (128.0 + p * (256.0 + p * (128.0 + 64.0 * p)))
            - n2 * (decay * (144.0 + p * (288.0 + p * (120.0 + 48.0 * p)))
                - 96.0 * p2 * e1(two_p))
            + decay * (41.0 + p * (34.0 + p * (14.0 + 4.0 * p)))
            + decay_ball * (-21.0 + 12.0 * n * p)
            - 96.0 * n2 * p2 * e1(four_np)
            + 24.0 * e1_diff_unchecked(two_p, four_np);
        PI / 48.0 * g
    };
    KernelPoint {
        n,
        p,
        f_value,
        in_domain,
    }
}

/// `lim_{p→0⁺} f(N, p) = (π/48)(128N³ - 144N² + 20 + 24 ln 2N)`.
pub fn kernel_f_small_p_limit(n: f64) -> f64 {
    PI / 48.0 * (128.0 * n * n * n - 144.0 * n * n + 20.0 + 24.0 * (2.0 * n).ln())
}

/// Closed single-frequency form with the four lines integrated separately.
///
/// Each line is integrated to `cfg`; the reported total is their sum. The
/// first three lines use the decay length `1/(2λ)` of `e^{-2ωλ}`, the last
/// one `1/(4a)` of `e^{-4ωa}`.
pub fn energy_analytic(
    geom: &BallGeometry,
    model: &PolarizabilityModel,
    cfg: &QuadratureConfig,
) -> Result<EnergyBreakdown> {
    validate_inputs(geom, model)?;
    cfg.validate()?;
    let (a, lambda) = (geom.a, geom.lambda);
    let n = geom.ratio();
    let prefactor = -geom.rho * geom.rho * PI / 48.0;
    let alpha_sq = |omega: f64| {
        let al = model.alpha_imag_axis(omega);
        al * al
    };

    let near_scale = 0.5 / lambda;
    let lines: [(&str, f64, Box<dyn Fn(f64) -> f64 + '_>); 4] = [
        ("volume term", near_scale, Box::new(|w: f64| volume_line(n, w * lambda))),
        ("surface term", near_scale, Box::new(|w: f64| surface_line(n, w * lambda))),
        ("constant term", near_scale, Box::new(|w: f64| constant_line(w * lambda))),
        ("large-distance term", 0.25 / a, Box::new(|w: f64| large_distance_line(w * a))),
    ];

    let mut values = [0.0; 4];
    let mut error = 0.0;
    for (slot, (stage, scale, line)) in values.iter_mut().zip(lines.iter()) {
        let r = integrate_semi_infinite(|w| alpha_sq(w) * line(w), 0.0, *scale, cfg)?;
        *slot = prefactor * r.require(stage)?;
        error += prefactor.abs() * r.error_estimate;
    }

    let [volume_term, surface_term, constant_term, large_distance_term] = values;
    let terms = AnalyticTerms {
        volume_term,
        surface_term,
        constant_term,
        large_distance_term,
    };
    Ok(EnergyBreakdown {
        method: EnergyMethod::Analytic,
        total: terms.sum(),
        error_estimate: error,
        terms: Some(terms),
        regions: None,
        degenerate: geom.is_degenerate(),
    })
}

/// `E = -(ρ²/λ) ∫₀^∞ dp α²(ip/λ) f(N, p)`.
pub fn energy_via_kernel(
    geom: &BallGeometry,
    model: &PolarizabilityModel,
    cfg: &QuadratureConfig,
) -> Result<EnergyBreakdown> {
    validate_inputs(geom, model)?;
    cfg.validate()?;
    let (n, lambda) = (geom.ratio(), geom.lambda);
    let r = integrate_semi_infinite(
        |p| {
            let al = model.alpha_imag_axis(p / lambda);
            al * al * kernel_f(n, p).f_value
        },
        0.0,
        0.5,
        cfg,
    )?;
    let prefactor = -geom.rho * geom.rho / lambda;
    Ok(EnergyBreakdown {
        method: EnergyMethod::Kernel,
        total: prefactor * r.require("kernel integral")?,
        error_estimate: prefactor.abs() * r.error_estimate,
        terms: None,
        regions: None,
        degenerate: geom.is_degenerate(),
    })
}

/// The large-distance energy by quadrature and in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LargeDistanceEnergy {
    pub numeric: f64,
    pub closed_form: f64,
    pub error_estimate: f64,
}

impl LargeDistanceEnergy {
    pub fn relative_difference(&self) -> f64 {
        relative_difference(self.numeric, self.closed_form)
    }
}

/// Static part of the last line, `-ρ²α²(0)(π/48)∫₀^∞ [e^{-4ωa}(-21 + 12ωa)
/// - E1(4ωa)(24 + 96ω²a²)] dω`, next to its closed form `ρ²α²(0)·23π/(96a)`.
pub fn large_distance_energy(
    geom: &BallGeometry,
    model: &PolarizabilityModel,
    cfg: &QuadratureConfig,
) -> Result<LargeDistanceEnergy> {
    validate_inputs(geom, model)?;
    let a = geom.a;
    let coupling = geom.rho * model.static_alpha();
    let coupling_sq = coupling * coupling;
    let r = integrate_semi_infinite(|w| large_distance_line(w * a), 0.0, 0.25 / a, cfg)?;
    let prefactor = -coupling_sq * PI / 48.0;
    Ok(LargeDistanceEnergy {
        numeric: prefactor * r.require("large-distance integral")?,
        closed_form: coupling_sq * 23.0 * PI / (96.0 * a),
        error_estimate: prefactor.abs() * r.error_estimate,
    })
}

/// `(23/(1536π a)) (ε-1)²` with `ε - 1` taken at zero frequency.
pub fn large_distance_from_permittivity(epsilon_minus_one: f64, a: f64) -> f64 {
    23.0 / (1536.0 * PI * a) * epsilon_minus_one * epsilon_minus_one
}

/// `|x - reference| / |reference|`, or `|x|` when the reference is zero.
pub fn relative_difference(x: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        x.abs()
    } else {
        ((x - reference) / reference).abs()
    }
}
