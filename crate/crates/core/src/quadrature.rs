//! Adaptive Gauss-Kronrod integration.
//!
//! A 15-point Kronrod rule with its embedded 7-point Gauss rule is applied on
//! each subinterval; the interval with the largest error estimate is bisected
//! until the global estimate meets the tolerance or the subdivision budget is
//! spent. Semi-infinite ranges are mapped onto `[0, 1)` with a rational
//! substitution scaled by a caller-supplied decay length.
//!
//! Evaluation order is fixed, so results are bit-reproducible on a given
//! platform.

use serde::{Deserialize, Serialize};

use crate::error::{CasimirError, Result};

// Kronrod abscissae in descending order; odd indices are the Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and budget for one adaptive integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-9,
            abs_tol: 0.0,
            max_subdivisions: 200,
        }
    }
}

impl QuadratureConfig {
    /// Default for nested integrals: `1e-6` relative at each of three levels.
    pub fn nested() -> Self {
        QuadratureConfig {
            rel_tol: 3e-6,
            ..Default::default()
        }
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        QuadratureConfig { rel_tol, ..self }
    }

    pub fn with_max_subdivisions(self, max_subdivisions: usize) -> Self {
        QuadratureConfig {
            max_subdivisions,
            ..self
        }
    }

    /// Per-level configuration for an integral nested `depth` deep.
    ///
    /// Relative errors of nested levels add to first order, so each level gets
    /// `rel_tol / depth` and `abs_tol / depth`.
    pub fn per_level(&self, depth: usize) -> Self {
        let depth = depth.max(1) as f64;
        QuadratureConfig {
            rel_tol: self.rel_tol / depth,
            abs_tol: self.abs_tol / depth,
            max_subdivisions: self.max_subdivisions,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let tol_ok = |t: f64| t.is_finite() && t >= 0.0;
        if !tol_ok(self.rel_tol) || !tol_ok(self.abs_tol) {
            return Err(CasimirError::InvalidConfig(format!(
                "tolerances must be finite and non-negative (rel_tol = {}, abs_tol = {})",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.rel_tol == 0.0 && self.abs_tol == 0.0 {
            return Err(CasimirError::InvalidConfig(
                "one of rel_tol, abs_tol must be positive".into(),
            ));
        }
        if self.max_subdivisions < 1 {
            return Err(CasimirError::InvalidConfig(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn tolerance(&self, value: f64) -> f64 {
        (self.rel_tol * value.abs()).max(self.abs_tol)
    }
}

/// Value of an adaptive integral with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl IntegralResult {
    pub fn zero() -> Self {
        IntegralResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        }
    }

    /// The value, or a [`CasimirError::NotConverged`] naming `stage`.
    pub fn require(self, stage: &str) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(CasimirError::not_converged(
                stage,
                self.value,
                self.error_estimate,
            ))
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One application of the 15/7 rule pair on `[lo, hi]`.
fn kronrod15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let f_center = f(center);

    let mut res_kronrod = f_center * WGK[7];
    let mut res_gauss = f_center * WG[3];
    let mut res_abs = res_kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let width = half.abs();
    let error = rescale_error(
        (res_kronrod - res_gauss) * half,
        res_abs * width,
        res_asc * width,
    );
    let value = res_kronrod * half;
    Segment {
        lo,
        hi,
        value,
        error: if value.is_finite() { error } else { f64::INFINITY },
    }
}

/// Integrates `f` over the finite interval `[lo, hi]`.
///
/// `lo == hi` yields an exact zero. Integrable endpoint singularities are fine:
/// the rule never evaluates the endpoints. On budget exhaustion the best
/// estimate is returned with `converged = false`.
pub fn integrate_finite<F>(f: F, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<IntegralResult>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(CasimirError::Domain(format!(
            "integration bounds must be finite with lo <= hi, got [{lo}, {hi}]"
        )));
    }
    if lo == hi {
        return Ok(IntegralResult::zero());
    }

    let mut segments = vec![kronrod15(&f, lo, hi)];
    let mut evaluations = 15;

    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        let converged = value.is_finite() && error <= cfg.tolerance(value);
        if converged || segments.len() >= cfg.max_subdivisions || !value.is_finite() {
            return Ok(IntegralResult {
                value,
                error_estimate: error,
                evaluations,
                converged,
            });
        }

        // Worst segment; ties resolve to the lowest index.
        let (worst, _) = segments
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, be), (i, s)| {
                if s.error > be {
                    (i, s.error)
                } else {
                    (bi, be)
                }
            });
        let seg = segments[worst];
        let mid = 0.5 * (seg.lo + seg.hi);
        if mid <= seg.lo || mid >= seg.hi {
            // Interval can no longer be split in floating point.
            return Ok(IntegralResult {
                value,
                error_estimate: error,
                evaluations,
                converged: false,
            });
        }
        segments[worst] = kronrod15(&f, seg.lo, mid);
        segments.insert(worst + 1, kronrod15(&f, mid, seg.hi));
        evaluations += 30;
    }
}

/// Integrates `f` over `[lo, ∞)` with `t = lo + decay_scale·u/(1-u)`.
///
/// `decay_scale` should be the length over which `f` decays by a factor `e`;
/// it places the quadrature nodes where the integrand lives.
pub fn integrate_semi_infinite<F>(
    f: F,
    lo: f64,
    decay_scale: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult>
where
    F: Fn(f64) -> f64,
{
    if !lo.is_finite() {
        return Err(CasimirError::Domain(format!("lower bound must be finite, got {lo}")));
    }
    if !(decay_scale > 0.0 && decay_scale.is_finite()) {
        return Err(CasimirError::Domain(format!(
            "decay_scale must be positive and finite, got {decay_scale}"
        )));
    }
    let mapped = |u: f64| {
        let one_minus = 1.0 - u;
        let t = lo + decay_scale * u / one_minus;
        if !t.is_finite() {
            return 0.0;
        }
        let ft = f(t);
        if ft == 0.0 {
            0.0
        } else {
            ft * decay_scale / (one_minus * one_minus)
        }
    };
    integrate_finite(mapped, 0.0, 1.0, cfg)
}
