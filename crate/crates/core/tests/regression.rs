//! Energies pinned to 30-digit values from tests/fixtures/gen_energy.py.

use std::path::Path;

use casimir_ball::energy::{energy_analytic, energy_brute_force, energy_via_kernel};
use casimir_ball::{BallGeometry, Oscillator, PolarizabilityModel, QuadratureConfig};
use serde_json::Value;

fn cases() -> Vec<(String, BallGeometry, PolarizabilityModel, f64)> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/energy_reference.json");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v["cases"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            let g = &c["geometry"];
            let geom = BallGeometry::new(
                g["a"].as_f64().unwrap(),
                g["lambda"].as_f64().unwrap(),
                g["rho"].as_f64().unwrap(),
            )
            .unwrap();
            let model = match c.get("alpha0") {
                Some(a0) => PolarizabilityModel::constant(a0.as_f64().unwrap()).unwrap(),
                None => PolarizabilityModel::oscillators(
                    c["oscillators"]
                        .as_array()
                        .unwrap()
                        .iter()
                        .map(|o| Oscillator::new(o[0].as_f64().unwrap(), o[1].as_f64().unwrap()))
                        .collect(),
                )
                .unwrap(),
            };
            let energy = c["energy"].as_str().unwrap().parse().unwrap();
            (c["name"].as_str().unwrap().to_string(), geom, model, energy)
        })
        .collect()
}

#[test]
fn all_energy_routes_match_high_precision_values() {
    let cfg = QuadratureConfig::default();
    for (name, geom, model, expected) in cases() {
        let rel = |x: f64| ((x - expected) / expected).abs();
        let analytic = energy_analytic(&geom, &model, &cfg).unwrap().total;
        let kernel = energy_via_kernel(&geom, &model, &cfg).unwrap().total;
        let brute = energy_brute_force(&geom, &model, &QuadratureConfig::nested()).unwrap().total;
        assert!(rel(analytic) < 1e-9, "{name}: analytic {analytic} vs {expected}");
        assert!(rel(kernel) < 1e-9, "{name}: kernel {kernel} vs {expected}");
        assert!(rel(brute) < 1e-5, "{name}: brute force {brute} vs {expected}");
    }
}
