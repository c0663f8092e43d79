//! Atomic polarizability on the imaginary frequency axis and the ball
//! parameters it is paired with.
//!
//! Every causal model has the spectral form
//! `α(iω) = ∫₀^∞ x g(x) / (x² + ω²) dx` with `g ≥ 0`. The oscillator family is
//! the case `g(x) = Σ_j A_j δ(x - ω_j)`; the tabulated family interpolates `g`
//! linearly between samples and is zero outside the grid. The static model has
//! no spectral density and stands for the limit of infinitely high absorption
//! frequencies.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{CasimirError, Result};

/// `ε - 1` above which the dilute approximation is reported as questionable.
pub const DILUTENESS_WARNING_THRESHOLD: f64 = 0.1;

/// A single Lorentz oscillator contributing `A·ω_j/(ω_j² + ω²)` to `α(iω)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillator {
    pub strength: f64,
    pub resonance: f64,
}

impl Oscillator {
    pub fn new(strength: f64, resonance: f64) -> Self {
        Oscillator {
            strength,
            resonance,
        }
    }

    fn alpha(&self, omega: f64) -> f64 {
        let w = self.resonance;
        self.strength * w / (w * w + omega * omega)
    }
}

/// Spectral density `g(x)` sampled on an ascending grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralTable {
    x: Vec<f64>,
    g: Vec<f64>,
}

impl SpectralTable {
    /// Builds a table from `(x, g)` pairs in strictly ascending `x`.
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(CasimirError::InvalidModel(
                "tabulated spectral density needs at least two points".into(),
            ));
        }
        for (i, &(x, g)) in points.iter().enumerate() {
            if !x.is_finite() || x < 0.0 {
                return Err(CasimirError::InvalidModel(format!(
                    "spectral point {i}: x = {x} must be finite and non-negative"
                )));
            }
            if !g.is_finite() || g < 0.0 {
                return Err(CasimirError::InvalidModel(format!(
                    "spectral point {i}: g = {g} must be finite and non-negative"
                )));
            }
            if i > 0 && x <= points[i - 1].0 {
                return Err(CasimirError::InvalidModel(format!(
                    "spectral point {i}: x values must be strictly ascending"
                )));
            }
        }
        if points[0].0 == 0.0 && points[0].1 != 0.0 {
            return Err(CasimirError::InvalidModel(
                "g(0) must vanish, otherwise α(0) diverges".into(),
            ));
        }
        Ok(SpectralTable {
            x: points.iter().map(|p| p.0).collect(),
            g: points.iter().map(|p| p.1).collect(),
        })
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.x.iter().copied().zip(self.g.iter().copied())
    }

    /// Segments `((x0, g0), (x1, g1))` of the piecewise-linear density.
    pub fn segments(&self) -> impl Iterator<Item = ((f64, f64), (f64, f64))> + '_ {
        self.points().zip(self.points().skip(1))
    }

    /// Linear interpolation of `g`, zero outside the grid.
    pub fn density(&self, x: f64) -> f64 {
        let n = self.x.len();
        if x < self.x[0] || x > self.x[n - 1] {
            return 0.0;
        }
        let i = self.x.partition_point(|&xi| xi <= x).clamp(1, n - 1);
        let (x0, x1) = (self.x[i - 1], self.x[i]);
        let t = (x - x0) / (x1 - x0);
        self.g[i - 1] * (1.0 - t) + self.g[i] * t
    }

    fn alpha(&self, omega: f64) -> f64 {
        self.segments()
            .map(|((x0, g0), (x1, g1))| {
                let (w0, w1) = segment_hat_integrals(x0, x1, omega);
                let mut acc = 0.0;
                if g0 != 0.0 {
                    acc += g0 * w0;
                }
                if g1 != 0.0 {
                    acc += g1 * w1;
                }
                acc
            })
            .sum()
    }

    fn rescaled(&self, s: f64) -> Self {
        SpectralTable {
            x: self.x.iter().map(|x| x / s).collect(),
            g: self.g.iter().map(|g| g * s.powi(3)).collect(),
        }
    }
}

/// `∫_{x0}^{x1} x/(x²+ω²) dx`.
fn segment_log_integral(x0: f64, x1: f64, omega: f64) -> f64 {
    0.5 * ((x1 * x1 - x0 * x0) / (x0 * x0 + omega * omega)).ln_1p()
}

/// `∫_{x0}^{x1} x²/(x²+ω²) dx`, evaluated without cancellation for large ω.
fn segment_quadratic_integral(x0: f64, x1: f64, omega: f64) -> f64 {
    let width = x1 - x0;
    if omega == 0.0 {
        return width;
    }
    let denom = omega * omega + x0 * x1;
    let z = width * omega / denom;
    if z < 0.5 {
        // z - atan z = z³/3 - z⁵/5 + ...
        let z2 = z * z;
        let mut power = z * z2;
        let mut tail = 0.0;
        let mut k = 1;
        loop {
            let term = power / (2 * k + 1) as f64;
            tail += if k % 2 == 1 { term } else { -term };
            if term <= f64::EPSILON * 0.25 * tail.abs() || k > 60 {
                break;
            }
            power *= z2;
            k += 1;
        }
        width * x0 * x1 / denom + omega * tail
    } else {
        width - omega * z.atan()
    }
}

/// Integrals of `x/(x²+ω²)` against the two hat functions of `[x0, x1]`.
fn segment_hat_integrals(x0: f64, x1: f64, omega: f64) -> (f64, f64) {
    let width = x1 - x0;
    let quad = segment_quadratic_integral(x0, x1, omega);
    // The left hat weight needs the log integral, which diverges for
    // x0 = ω = 0; g(0) = 0 is enforced, so it is never used there.
    let right = if x0 == 0.0 {
        quad / width
    } else {
        ((quad - x0 * segment_log_integral(x0, x1, omega)) / width).max(0.0)
    };
    let left = if x0 == 0.0 && omega == 0.0 {
        f64::INFINITY
    } else {
        ((x1 * segment_log_integral(x0, x1, omega) - quad) / width).max(0.0)
    };
    (left, right)
}

/// Causal atomic polarizability `α(iω)`.
#[derive(Debug, Clone, PartialEq)]
pub enum PolarizabilityModel {
    /// Frequency-independent `α(iω) = alpha0`.
    Static { alpha0: f64 },
    Oscillators(Vec<Oscillator>),
    TabulatedSpectral(SpectralTable),
}

impl PolarizabilityModel {
    pub fn constant(alpha0: f64) -> Result<Self> {
        let m = PolarizabilityModel::Static { alpha0 };
        m.validate()?;
        Ok(m)
    }

    pub fn oscillators(oscillators: Vec<Oscillator>) -> Result<Self> {
        let m = PolarizabilityModel::Oscillators(oscillators);
        m.validate()?;
        Ok(m)
    }

    pub fn single_oscillator(strength: f64, resonance: f64) -> Result<Self> {
        Self::oscillators(vec![Oscillator::new(strength, resonance)])
    }

    pub fn tabulated(points: &[(f64, f64)]) -> Result<Self> {
        Ok(PolarizabilityModel::TabulatedSpectral(SpectralTable::new(
            points,
        )?))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            PolarizabilityModel::Static { .. } => "static",
            PolarizabilityModel::Oscillators(_) => "oscillators",
            PolarizabilityModel::TabulatedSpectral(_) => "tabulated",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PolarizabilityModel::Static { alpha0 } => {
                if !alpha0.is_finite() || *alpha0 < 0.0 {
                    return Err(CasimirError::InvalidModel(format!(
                        "alpha0 = {alpha0} must be finite and non-negative"
                    )));
                }
            }
            PolarizabilityModel::Oscillators(list) => {
                for (j, osc) in list.iter().enumerate() {
                    if !osc.strength.is_finite() || osc.strength < 0.0 {
                        return Err(CasimirError::InvalidModel(format!(
                            "oscillator {j}: strength {} must be finite and non-negative",
                            osc.strength
                        )));
                    }
                    if !osc.resonance.is_finite() || osc.resonance <= 0.0 {
                        return Err(CasimirError::InvalidModel(format!(
                            "oscillator {j}: resonance {} must be finite and positive",
                            osc.resonance
                        )));
                    }
                }
            }
            // Checked at construction.
            PolarizabilityModel::TabulatedSpectral(_) => {}
        }
        Ok(())
    }

    /// `α(iω)` for `ω ≥ 0`.
    pub fn alpha_imag_axis(&self, omega: f64) -> f64 {
        match self {
            PolarizabilityModel::Static { alpha0 } => *alpha0,
            PolarizabilityModel::Oscillators(list) => {
                list.iter().map(|osc| osc.alpha(omega)).sum()
            }
            PolarizabilityModel::TabulatedSpectral(table) => table.alpha(omega),
        }
    }

    pub fn static_alpha(&self) -> f64 {
        self.alpha_imag_axis(0.0)
    }

    /// Smallest absorption frequency `ω₀`; `None` for the static model or
    /// a vanishing spectral density.
    pub fn characteristic_frequency(&self) -> Option<f64> {
        match self {
            PolarizabilityModel::Static { .. } => None,
            PolarizabilityModel::Oscillators(list) => list
                .iter()
                .filter(|o| o.strength > 0.0)
                .map(|o| o.resonance)
                .reduce(f64::min),
            PolarizabilityModel::TabulatedSpectral(table) => {
                let pts: Vec<_> = table.points().collect();
                pts.iter().enumerate().find_map(|(i, &(x, g))| {
                    if g > 0.0 {
                        Some(if i > 0 { pts[i - 1].0.max(x * 0.5) } else { x })
                    } else {
                        None
                    }
                })
            }
        }
    }

    /// Whether `α(iω)` vanishes identically.
    pub fn is_zero(&self) -> bool {
        match self {
            PolarizabilityModel::Static { alpha0 } => *alpha0 == 0.0,
            PolarizabilityModel::Oscillators(list) => list.iter().all(|o| o.strength == 0.0),
            PolarizabilityModel::TabulatedSpectral(table) => table.points().all(|(_, g)| g == 0.0),
        }
    }

    /// Length rescaling by `s`: resonances `ω_j → ω_j/s`, strengths
    /// `A_j → s²A_j`, so that `α'(iω/s) = s³ α(iω)`.
    pub fn rescaled(&self, s: f64) -> Self {
        match self {
            PolarizabilityModel::Static { alpha0 } => PolarizabilityModel::Static {
                alpha0: alpha0 * s.powi(3),
            },
            PolarizabilityModel::Oscillators(list) => PolarizabilityModel::Oscillators(
                list.iter()
                    .map(|o| Oscillator::new(o.strength * s * s, o.resonance / s))
                    .collect(),
            ),
            PolarizabilityModel::TabulatedSpectral(table) => {
                PolarizabilityModel::TabulatedSpectral(table.rescaled(s))
            }
        }
    }
}

/// `ε(iω) - 1 = 4πρα(iω)` in the dilute limit.
pub fn epsilon_minus_one(model: &PolarizabilityModel, rho: f64, omega: f64) -> f64 {
    4.0 * PI * rho * model.alpha_imag_axis(omega)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DilutenessReport {
    /// `max_ω (ε(iω) - 1)`, attained at `ω = 0`.
    pub max_epsilon_minus_one: f64,
    pub warning: bool,
}

pub fn diluteness_report(model: &PolarizabilityModel, rho: f64) -> DilutenessReport {
    let max_epsilon_minus_one = epsilon_minus_one(model, rho, 0.0);
    DilutenessReport {
        max_epsilon_minus_one,
        warning: max_epsilon_minus_one > DILUTENESS_WARNING_THRESHOLD,
    }
}

/// Ball radius `a`, minimum interatomic distance `λ` and atom number density `ρ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallGeometry {
    pub a: f64,
    pub lambda: f64,
    pub rho: f64,
}

impl BallGeometry {
    /// Positivity is enforced; `N = a/λ ≤ 1/2` is admitted and surfaces as a
    /// degenerate-domain flag on results.
    pub fn new(a: f64, lambda: f64, rho: f64) -> Result<Self> {
        let g = BallGeometry { a, lambda, rho };
        g.validate()?;
        Ok(g)
    }

    /// Geometry with `λ = a/n`.
    pub fn with_ratio(a: f64, n: f64, rho: f64) -> Result<Self> {
        Self::new(a, a / n, rho)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("lambda", self.lambda), ("rho", self.rho)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CasimirError::InvalidGeometry(format!(
                    "{name} = {v} must be finite and positive"
                )));
            }
        }
        Ok(())
    }

    /// `N = a/λ`.
    pub fn ratio(&self) -> f64 {
        self.a / self.lambda
    }

    /// True when `N ≤ 1/2`: no pair separation `≥ λ` fits inside the ball.
    pub fn is_degenerate(&self) -> bool {
        self.lambda >= 2.0 * self.a
    }

    pub fn atom_count(&self) -> f64 {
        self.rho * 4.0 * PI * self.a.powi(3) / 3.0
    }

    /// The same ball collapsed or expanded to radius `a`: `N` and the number
    /// of atoms are conserved, the atoms themselves are unchanged.
    pub fn collapsed_to(&self, a: f64) -> BallGeometry {
        let ratio = self.a / a;
        BallGeometry {
            a,
            lambda: a / self.ratio(),
            rho: self.rho * ratio * ratio * ratio,
        }
    }

    /// Length rescaling `(a, λ, ρ) → (s·a, s·λ, ρ/s³)`.
    pub fn rescaled(&self, s: f64) -> BallGeometry {
        BallGeometry {
            a: self.a * s,
            lambda: self.lambda * s,
            rho: self.rho / s.powi(3),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_finite, QuadratureConfig};

    #[test]
    fn static_and_oscillator_values() {
        let m = PolarizabilityModel::constant(1.0).unwrap();
        assert_eq!(m.alpha_imag_axis(0.0), 1.0);
        assert_eq!(m.alpha_imag_axis(123.0), 1.0);
        let o = PolarizabilityModel::single_oscillator(1.0, 1.0).unwrap();
        assert_eq!(o.alpha_imag_axis(0.0), 1.0);
        assert_eq!(o.alpha_imag_axis(1.0), 0.5);
    }

    #[test]
    fn oscillator_static_sum() {
        let list = vec![Oscillator::new(2.0, 0.5), Oscillator::new(0.3, 7.0)];
        let m = PolarizabilityModel::oscillators(list).unwrap();
        assert!((m.static_alpha() - (2.0 / 0.5 + 0.3 / 7.0)).abs() < 1e-15);
        assert_eq!(m.characteristic_frequency(), Some(0.5));
    }

    #[test]
    fn invalid_models_rejected() {
        assert!(PolarizabilityModel::constant(-1.0).is_err());
        assert!(PolarizabilityModel::single_oscillator(-1.0, 1.0).is_err());
        assert!(PolarizabilityModel::single_oscillator(1.0, 0.0).is_err());
        assert!(PolarizabilityModel::tabulated(&[(1.0, 1.0)]).is_err());
        assert!(PolarizabilityModel::tabulated(&[(1.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(PolarizabilityModel::tabulated(&[(1.0, -1.0), (2.0, 2.0)]).is_err());
        assert!(PolarizabilityModel::tabulated(&[(0.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(PolarizabilityModel::tabulated(&[(0.0, 0.0), (2.0, 2.0)]).is_ok());
    }

    #[test]
    fn tabulated_matches_direct_quadrature() {
        let pts = [(0.0, 0.0), (0.5, 1.0), (1.3, 0.2), (4.0, 2.5), (9.0, 0.0)];
        let m = PolarizabilityModel::tabulated(&pts).unwrap();
        let PolarizabilityModel::TabulatedSpectral(table) = &m else {
            unreachable!()
        };
        let cfg = QuadratureConfig::default().with_rel_tol(1e-13);
        for &omega in &[0.0, 1e-3, 0.7, 3.0, 50.0, 1e4] {
            let direct: f64 = table
                .segments()
                .map(|((x0, _), (x1, _))| {
                    integrate_finite(
                        |x| x * table.density(x) / (x * x + omega * omega),
                        x0,
                        x1,
                        &cfg,
                    )
                    .unwrap()
                    .value
                })
                .sum();
            let closed = m.alpha_imag_axis(omega);
            assert!(((closed - direct) / direct).abs() < 1e-11, "ω={omega}: {closed} vs {direct}");
        }
    }

    #[test]
    fn narrow_bump_approaches_oscillator() {
        // Normalized triangular bump of half-width w around x = 1.
        let osc = PolarizabilityModel::single_oscillator(1.0, 1.0).unwrap();
        let mut previous = f64::INFINITY;
        for &w in &[0.2, 0.05, 0.01] {
            let pts = [(1.0 - w, 0.0), (1.0, 1.0 / w), (1.0 + w, 0.0)];
            let m = PolarizabilityModel::tabulated(&pts).unwrap();
            let worst = [0.0, 0.5, 1.0, 2.0]
                .iter()
                .map(|&om| (m.alpha_imag_axis(om) - osc.alpha_imag_axis(om)).abs())
                .fold(0.0, f64::max);
            assert!(worst < previous);
            previous = worst;
        }
        assert!(previous < 1e-3);
    }

    #[test]
    fn rescaling_law() {
        let models = [
            PolarizabilityModel::constant(0.7).unwrap(),
            PolarizabilityModel::oscillators(vec![
                Oscillator::new(1.0, 2.0),
                Oscillator::new(0.4, 9.0),
            ])
            .unwrap(),
            PolarizabilityModel::tabulated(&[(0.5, 0.0), (1.0, 2.0), (3.0, 0.5)]).unwrap(),
        ];
        for m in &models {
            for &s in &[0.1, 3.0] {
                let scaled = m.rescaled(s);
                for &om in &[0.0, 0.3, 4.0] {
                    let lhs = scaled.alpha_imag_axis(om / s);
                    let rhs = s.powi(3) * m.alpha_imag_axis(om);
                    assert!(((lhs - rhs) / rhs).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn epsilon_and_diluteness() {
        let m = PolarizabilityModel::constant(1.0).unwrap();
        assert!((epsilon_minus_one(&m, 1.0 / (4.0 * PI), 3.0) - 1.0).abs() < 1e-15);
        assert_eq!(epsilon_minus_one(&m, 0.0, 3.0), 0.0);
        let r = diluteness_report(&m, 0.05 / (4.0 * PI));
        assert!((r.max_epsilon_minus_one - 0.05).abs() < 1e-15 && !r.warning);
        let r = diluteness_report(&m, 0.5 / (4.0 * PI));
        assert!(r.warning);
        let o = PolarizabilityModel::single_oscillator(2.0, 4.0).unwrap();
        let r = diluteness_report(&o, 1.0);
        assert!((r.max_epsilon_minus_one - 4.0 * PI * 0.5).abs() < 1e-14);
    }

    #[test]
    fn geometry_constraints() {
        assert!(BallGeometry::new(0.0, 1.0, 1.0).is_err());
        assert!(BallGeometry::new(1.0, -1.0, 1.0).is_err());
        let g = BallGeometry::new(1.0, 2.5, 1.0).unwrap();
        assert!(g.is_degenerate());
        let g = BallGeometry::new(2.0, 0.1, 3.0).unwrap();
        let c = g.collapsed_to(1.5);
        assert!((c.ratio() - g.ratio()).abs() < 1e-12);
        assert!((c.atom_count() - g.atom_count()).abs() < 1e-12 * g.atom_count());
    }
}
