//! Overlap of a sphere of radius `r`, centred a distance `p` from the ball
//! centre, with the ball of radius `a`, and the three integration regions of
//! the pairwise energy.

use std::f64::consts::PI;

use crate::error::{CasimirError, Result};
use crate::polarizability::BallGeometry;

const SEAM_GUARD: f64 = 1e-14;

/// Area of the part of the sphere `|x - P| = r` inside the ball `|x| ≤ a`,
/// with `|P| = p`.
///
/// Full `4πr²` when the sphere lies inside, zero when it lies outside, the cap
/// `2πr²(1 - (p² + r² - a²)/(2pr))` in between.
pub fn inside_area(p: f64, r: f64, a: f64) -> Result<f64> {
    if !(p >= 0.0) || !(r > 0.0) || !(a > 0.0) {
        return Err(CasimirError::Domain(format!(
            "inside_area requires p >= 0, r > 0, a > 0; got p = {p}, r = {r}, a = {a}"
        )));
    }
    let full = 4.0 * PI * r * r;
    if p == 0.0 {
        return Ok(if r < a { full } else { 0.0 });
    }
    let guard = SEAM_GUARD * a.max(p);
    if r <= (a - p).abs() + guard {
        return Ok(if p < a { full } else { 0.0 });
    }
    if r >= a + p - guard {
        return Ok(0.0);
    }
    let cap = 2.0 * PI * r * r * (1.0 - (p * p + r * r - a * a) / (2.0 * p * r));
    Ok(cap.clamp(0.0, full))
}

/// The same cap area written as `2πr²(1 - r/(2p) - (p² - a²)/(2pr))`.
pub fn cap_area_expanded(p: f64, r: f64, a: f64) -> f64 {
    2.0 * PI * r * r * (1.0 - r / (2.0 * p) - (p * p - a * a) / (2.0 * p * r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    /// `p ∈ [0, a-λ]`, `r ∈ [λ, a-p]`: the whole shell is inside.
    I,
    /// `p ∈ [0, a-λ]`, `r ∈ [a-p, a+p]`: partial cap.
    II,
    /// `p ∈ [a-λ, a]`, `r ∈ [λ, a+p]`: partial cap near the surface.
    III,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionBounds {
    pub region: Region,
    pub p_interval: (f64, f64),
    a: f64,
    lambda: f64,
}

impl RegionBounds {
    /// The `r`-interval at distance `p`; empty intervals come back as `lo >= hi`.
    pub fn r_interval(&self, p: f64) -> (f64, f64) {
        let (a, l) = (self.a, self.lambda);
        match self.region {
            Region::I => (l, a - p),
            Region::II => (a - p, a + p),
            Region::III => (l, a + p),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.p_interval.0 >= self.p_interval.1
    }
}

/// The three regions for a ball, with `p`-intervals clamped to `[0, a]` so
/// degenerate geometries give empty regions instead of reversed ones.
pub fn regions(geom: &BallGeometry) -> [RegionBounds; 3] {
    let (a, l) = (geom.a, geom.lambda);
    let split = (a - l).clamp(0.0, a);
    let mk = |region, p_interval| RegionBounds {
        region,
        p_interval,
        a,
        lambda: l,
    };
    [
        mk(Region::I, (0.0, split)),
        mk(Region::II, (0.0, split)),
        mk(Region::III, (split, a)),
    ]
}
