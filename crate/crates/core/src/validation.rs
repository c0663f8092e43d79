//! Built-in self-checks run by `casimir-ball check`.
//!
//! Each check compares two independent routes (closed form vs quadrature,
//! brute force vs analytic, spectral vs finite difference) and records the
//! worst observed discrepancy against a fixed threshold.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{
    energy_analytic, energy_brute_force, kernel_f, kernel_f_small_p_limit,
    large_distance_energy, large_distance_from_permittivity, relative_difference,
};
use crate::error::Result;
use crate::force::{
    attractivity_scan, energy_log_slope, force_finite_difference, force_spectral,
    oscillator_scan_grid, DEFAULT_STEP,
};
use crate::pair_potential::{pair_u, pair_u_static_closed};
use crate::polarizability::{epsilon_minus_one, BallGeometry, Oscillator, PolarizabilityModel};
use crate::quadrature::QuadratureConfig;
use crate::special_functions::{e1_continued_fraction, e1_series, exp_integral_e1};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub metric: f64,
    pub threshold: f64,
    pub detail: String,
}

/// `max` that lets a NaN through, so a broken evaluation fails its check.
fn worse(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

fn lesser(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.min(b)
    }
}

impl CheckOutcome {
    fn at_most(name: &str, metric: f64, threshold: f64, detail: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            passed: metric <= threshold,
            metric,
            threshold,
            detail: detail.into(),
        }
    }

    fn failed(name: &str, threshold: f64, err: impl std::fmt::Display) -> Self {
        CheckOutcome {
            name: name.into(),
            passed: false,
            metric: f64::NAN,
            threshold,
            detail: format!("error: {err}"),
        }
    }

    fn from_result(name: &str, threshold: f64, r: Result<CheckOutcome>) -> Self {
        r.unwrap_or_else(|e| Self::failed(name, threshold, e))
    }
}

pub fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (l0, l1) = (lo.log10(), hi.log10());
    (0..count)
        .map(|i| 10f64.powf(l0 + (l1 - l0) * i as f64 / (count - 1) as f64))
        .collect()
}

/// The test-matrix models: static, one oscillator, two oscillators.
pub fn reference_models() -> Vec<PolarizabilityModel> {
    vec![
        PolarizabilityModel::Static { alpha0: 1.0 },
        PolarizabilityModel::Oscillators(vec![Oscillator::new(1.0, 1.0)]),
        PolarizabilityModel::Oscillators(vec![
            Oscillator::new(1.0, 0.5),
            Oscillator::new(2.0, 3.0),
        ]),
    ]
}

fn tight() -> QuadratureConfig {
    QuadratureConfig::default().with_rel_tol(1e-12)
}

fn check_large_distance() -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for &rho in &[0.5, 1.0, 2.0] {
        for &alpha0 in &[0.1, 1.0, 3.0] {
            for &a in &[0.5, 1.0, 4.0] {
                let geom = BallGeometry::new(a, a / 10.0, rho)?;
                let model = PolarizabilityModel::constant(alpha0)?;
                let ld = large_distance_energy(&geom, &model, &tight())?;
                let eps = epsilon_minus_one(&model, rho, 0.0);
                worst = worse(worst, ld.relative_difference());
                worst = worse(
                    worst,
                    relative_difference(large_distance_from_permittivity(eps, a), ld.closed_form),
                );
            }
        }
    }
    Ok(CheckOutcome::at_most(
        "large_distance_closed_form",
        worst,
        1e-8,
        "3x3x3 grid over (rho, alpha0, a)",
    ))
}

fn check_static_potential() -> Result<CheckOutcome> {
    let model = PolarizabilityModel::constant(1.0)?;
    let cfg = QuadratureConfig::default();
    let mut worst: f64 = 0.0;
    for r in logspace(1e-2, 1e3, 50) {
        let q = pair_u(&model, r, &cfg)?;
        worst = worse(worst, relative_difference(q, pair_u_static_closed(1.0, r)?));
    }
    Ok(CheckOutcome::at_most(
        "static_pair_potential",
        worst,
        1e-8,
        "50 separations on logspace[1e-2, 1e3]",
    ))
}

fn check_brute_force() -> Result<CheckOutcome> {
    let cases: Vec<(PolarizabilityModel, f64)> = reference_models()
        .into_iter()
        .flat_map(|m| [2.0, 5.0, 20.0].map(|n| (m.clone(), n)))
        .collect();
    let diffs: Vec<Result<f64>> = cases
        .par_iter()
        .map(|(model, n)| {
            let geom = BallGeometry::with_ratio(1.0, *n, 1.0)?;
            let brute = energy_brute_force(&geom, model, &QuadratureConfig::nested())?;
            let analytic = energy_analytic(&geom, model, &tight())?;
            Ok(relative_difference(brute.total, analytic.total))
        })
        .collect();
    let mut worst: f64 = 0.0;
    for d in diffs {
        worst = worse(worst, d?);
    }
    Ok(CheckOutcome::at_most(
        "brute_force_vs_analytic",
        worst,
        1e-4,
        "{static, 1-osc, 2-osc} x N in {2, 5, 20}",
    ))
}

fn check_kernel() -> Vec<CheckOutcome> {
    let ratios = [0.51, 0.6, 1.0, 2.0, 5.0, 10.0, 100.0, 1000.0];
    let ps = logspace(1e-4, 50.0, 100);
    let mut min_f = f64::INFINITY;
    for &n in &ratios {
        for &p in &ps {
            min_f = lesser(min_f, kernel_f(n, p).f_value);
        }
    }
    let positivity = CheckOutcome {
        name: "kernel_positivity".into(),
        passed: min_f > 0.0,
        metric: min_f,
        threshold: 0.0,
        detail: format!("min f over {} grid points", ratios.len() * ps.len()),
    };
    let limit = ratios
        .iter()
        .map(|&n| relative_difference(kernel_f(n, 1e-8).f_value, kernel_f_small_p_limit(n)))
        .fold(0.0, worse);
    let boundary = kernel_f(0.5, 1e-9).f_value.abs();
    vec![
        positivity,
        CheckOutcome::at_most("kernel_small_p_limit", limit, 1e-6, "p = 1e-8"),
        CheckOutcome::at_most("kernel_boundary_zero", boundary, 1e-10, "|f(1/2, 1e-9)|"),
    ]
}

/// Cases where both force routes are defined: oscillator and tabulated models.
pub fn force_comparison_cases() -> Vec<(BallGeometry, PolarizabilityModel)> {
    let mut cases = Vec::new();
    let tabulated = PolarizabilityModel::tabulated(&[(0.5, 0.0), (1.5, 2.0), (4.0, 0.3), (6.0, 0.0)])
        .expect("valid table");
    for &n in &[2.0, 5.0, 20.0] {
        let geom = BallGeometry::with_ratio(1.0, n, 1.0).expect("valid geometry");
        for model in reference_models().into_iter().skip(1) {
            cases.push((geom, model));
        }
        cases.push((geom, tabulated.clone()));
    }
    cases
}

fn check_force() -> Vec<CheckOutcome> {
    let scan = oscillator_scan_grid(
        &logspace(0.1, 10.0, 5),
        &[1.0, 2.0, 5.0, 10.0, 20.0, 50.0],
        1.0,
        1.0,
        1.0,
    )
    .map(|cases| attractivity_scan(&cases, &QuadratureConfig::default()));
    let attractive = match scan {
        Ok(report) => CheckOutcome {
            name: "force_attractivity".into(),
            passed: report.all_attractive(),
            metric: report.worst_margin().unwrap_or(f64::NAN),
            threshold: 0.0,
            detail: format!("{} oscillator cases, worst scaled pressure", report.evaluated()),
        },
        Err(e) => CheckOutcome::failed("force_attractivity", 0.0, e),
    };

    let agreement: Result<CheckOutcome> = (|| {
        let cases = force_comparison_cases();
        let diffs: Vec<Result<f64>> = cases
            .par_iter()
            .map(|(geom, model)| {
                let s = force_spectral(geom, model, &QuadratureConfig::default().with_rel_tol(1e-10))?;
                let d = force_finite_difference(geom, model, &tight(), DEFAULT_STEP)?;
                Ok(relative_difference(d.pressure, s.pressure))
            })
            .collect();
        let mut worst: f64 = 0.0;
        for d in diffs {
            worst = worse(worst, d?);
        }
        Ok(CheckOutcome::at_most(
            "force_cross_method",
            worst,
            1e-3,
            format!("{} configurations", cases.len()),
        ))
    })();

    let exponent: Result<CheckOutcome> = (|| {
        let model = PolarizabilityModel::constant(1.0)?;
        let mut worst: f64 = 0.0;
        for &n in &[2.0, 5.0, 20.0] {
            let geom = BallGeometry::with_ratio(1.0, n, 1.0)?;
            let slope = energy_log_slope(&geom, &model, &tight(), DEFAULT_STEP)?;
            worst = worse(worst, (slope + 7.0).abs());
        }
        Ok(CheckOutcome::at_most(
            "static_energy_exponent",
            worst,
            1e-6,
            "|dlnE/dlna + 7| at N in {2, 5, 20}",
        ))
    })();

    vec![
        attractive,
        CheckOutcome::from_result("force_cross_method", 1e-3, agreement),
        CheckOutcome::from_result("static_energy_exponent", 1e-6, exponent),
    ]
}

fn check_scaling() -> Result<CheckOutcome> {
    let geom = BallGeometry::with_ratio(1.0, 5.0, 1.0)?;
    let mut worst: f64 = 0.0;
    for model in reference_models() {
        let base = energy_analytic(&geom, &model, &tight())?.total;
        for &s in &[0.01, 0.5, 2.0, 7.0, 300.0] {
            let scaled = energy_analytic(&geom.rescaled(s), &model.rescaled(s), &tight())?.total;
            worst = worse(worst, relative_difference(scaled, base / s));
        }
    }
    Ok(CheckOutcome::at_most(
        "scaling_covariance",
        worst,
        1e-10,
        "E(s) = E/s for 5 scale factors, 3 models",
    ))
}

fn check_special_functions() -> Vec<CheckOutcome> {
    // 30-digit reference values.
    let refs = [
        (1.0, 0.219_383_934_395_520_273_677),
        (10.0, 4.156_968_929_685_324_277_4e-6),
        (1e-8, 17.843_465_089_050_832_587),
        (100.0, 3.683_597_761_682_032_180_7e-46),
    ];
    let reference = refs
        .iter()
        .map(|&(x, v)| relative_difference(exp_integral_e1(x).unwrap_or(f64::NAN), v))
        .fold(0.0, worse);
    let overlap = (0..=60)
        .map(|i| 0.5 + 1.5 * i as f64 / 60.0)
        .map(|x| relative_difference(e1_series(x), e1_continued_fraction(x)))
        .fold(0.0, worse);
    let mut violations = 0usize;
    for x in logspace(1e-8, 100.0, 200) {
        let e = exp_integral_e1(x).unwrap_or(f64::NAN);
        let lower = 0.5 * (-x).exp() * (2.0 / x).ln_1p();
        let upper = (-x).exp() * (1.0 / x).ln_1p();
        if !(lower < e && e < upper) {
            violations += 1;
        }
    }
    vec![
        CheckOutcome::at_most("e1_reference_values", reference, 1e-12, "x in {1e-8, 1, 10, 100}"),
        CheckOutcome::at_most("e1_regime_overlap", overlap, 1e-12, "series vs continued fraction on [0.5, 2]"),
        CheckOutcome::at_most(
            "e1_bracketing_bounds",
            violations as f64,
            0.0,
            "violations on logspace[1e-8, 100], 200 points",
        ),
    ]
}

/// Runs every built-in check in a fixed order.
pub fn run_builtin_checks() -> Vec<CheckOutcome> {
    let mut out = vec![
        CheckOutcome::from_result("large_distance_closed_form", 1e-8, check_large_distance()),
        CheckOutcome::from_result("static_pair_potential", 1e-8, check_static_potential()),
        CheckOutcome::from_result("brute_force_vs_analytic", 1e-4, check_brute_force()),
    ];
    out.extend(check_kernel());
    out.extend(check_force());
    out.push(CheckOutcome::from_result("scaling_covariance", 1e-10, check_scaling()));
    out.extend(check_special_functions());
    out
}

/// Density giving `ε - 1 = epsilon_minus_one` for a static `alpha0`.
pub fn density_for_permittivity(alpha0: f64, epsilon_minus_one: f64) -> f64 {
    epsilon_minus_one / (4.0 * PI * alpha0)
}
