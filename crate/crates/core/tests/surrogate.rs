mod support;

use lft_core::crush::{hollow_trace, simulate_crush, surrogate_forces, CrushTrace};
use lft_core::geometry::derive_geometry;
use lft_core::metrics::{absorbed_energy, compute_metrics};
use lft_core::{DesignPoint, EvaluationSetup, MaterialSpec, SurrogateParams, TubeConstants};
use proptest::prelude::*;
use support::oracle::{polynomial_at, polynomial_integral, surrogate_energy};

/// m = 4, n = 3, t = 1.1, h = 3 with d = 2.
fn anchor() -> DesignPoint {
    DesignPoint::new(3, 4, 2.0, 1.1, 3.0)
}

#[test]
fn anchor_energy_matches_closed_form() {
    let setup = EvaluationSetup::default();
    let dp = anchor();
    let eval = setup.evaluate(&dp).unwrap();

    // independent force level from the stated laws
    let sigma_tube = 1.05 * 187.0;
    let sigma_lat = 1.05 * 162.0;
    let tube_force = 13.06 * sigma_tube * 75f64.cbrt() * 1.1f64.powf(5.0 / 3.0) / 1000.0;
    let tan = 2f64.sqrt() * 4.0 * 197.0 / (146.0 * 3.0);
    let sin = tan / (1.0 + tan * tan).sqrt();
    let area = std::f64::consts::PI;
    let lattice_force = 0.5 * sigma_lat * area * (25.0 + 128.0 * sin) / 1000.0;
    let level = tube_force + 1.1 * lattice_force;
    let z = 0.7 * 197.0;
    let energy = surrogate_energy(level, z, 4.0, 1.3, 0.25);

    assert!((eval.metrics.z - z).abs() < 1e-9);
    let tea = energy / 1000.0;
    assert!((eval.metrics.tea - tea).abs() / tea < 5e-4, "tea {} vs {}", eval.metrics.tea, tea);
    assert!((eval.metrics.pm - energy / z).abs() / (energy / z) < 5e-4);
    assert!((eval.metrics.sea - tea / eval.mass.total_mass).abs() / eval.metrics.sea < 5e-4);
}

#[test]
fn hollow_force_formula() {
    let c = TubeConstants::default();
    let tube = MaterialSpec::al6063_t5();
    let p = SurrogateParams::default();
    let tr = hollow_trace(1.4, &tube, &p, &c).unwrap();
    let level = 13.06 * 1.05 * 187.0 * 75f64.cbrt() * 1.4f64.powf(5.0 / 3.0) / 1000.0;
    let energy = surrogate_energy(level, 140.0, 4.0, 1.3, 0.25);
    assert!((absorbed_energy(&tr) - energy).abs() / energy < 5e-4);
    assert!(hollow_trace(-1.0, &tube, &p, &c).is_err());
}

#[test]
fn sea_rises_with_rod_diameter() {
    let setup = EvaluationSetup::default();
    let mut prev = f64::NEG_INFINITY;
    for i in 0..=40 {
        let d = 1.0 + 0.05 * i as f64;
        let sea = setup.evaluate(&DesignPoint { d, ..anchor() }).unwrap().metrics.sea;
        assert!(sea > prev, "d={d}");
        prev = sea;
    }
}

#[test]
fn height_difference_barely_matters() {
    let setup = EvaluationSetup::default();
    let seas: Vec<f64> = (0..=50).map(|i| setup.evaluate(&DesignPoint { h: 0.1 * i as f64, ..anchor() }).unwrap().metrics.sea).collect();
    let max = seas.iter().cloned().fold(f64::MIN, f64::max);
    let min = seas.iter().cloned().fold(f64::MAX, f64::min);
    assert!(max / min < 1.05, "ratio {}", max / min);
}

#[test]
fn step_halving_changes_tea_little() {
    let coarse = EvaluationSetup::default();
    let mut fine = coarse.clone();
    fine.surrogate.sample_step = 0.25;
    for dp in [anchor(), DesignPoint::new(6, 5, 3.0, 0.8, 0.0), DesignPoint::new(2, 2, 1.0, 2.0, 5.0)] {
        let a = coarse.evaluate(&dp).unwrap().metrics.tea;
        let b = fine.evaluate(&dp).unwrap().metrics.tea;
        assert!((a - b).abs() / b < 1e-3);
    }
}

#[test]
fn trace_is_deterministic() {
    let c = TubeConstants::default();
    let (tube, lat) = (MaterialSpec::al6063_t5(), MaterialSpec::alsi10mg());
    let p = SurrogateParams::default();
    let dp = anchor();
    let g = derive_geometry(&dp, &c).unwrap();
    let a = simulate_crush(&dp, &g, &tube, &lat, &p, &c).unwrap();
    let b = simulate_crush(&dp, &g, &tube, &lat, &p, &c).unwrap();
    let bits = |t: &CrushTrace| t.samples().flat_map(|(x, f)| [x.to_bits(), f.to_bits()]).collect::<Vec<_>>();
    assert_eq!(bits(&a), bits(&b));
    assert!(a.force().iter().all(|&f| f >= 0.0));
    let forces = surrogate_forces(&dp, &g, &tube, &lat, &p, &c);
    assert!(forces.total > forces.tube);
}

fn poly_trace(coeffs: &[f64], z: f64) -> CrushTrace {
    let steps = (z / 0.5).round() as usize;
    let x: Vec<f64> = (0..=steps).map(|i| i as f64 * 0.5).collect();
    let f = x.iter().map(|&x| polynomial_at(coeffs, x)).collect();
    CrushTrace::new(x, f).unwrap()
}

proptest! {
    #[test]
    fn trapezoid_matches_polynomial_integral(
        c0 in 15.0f64..50.0,
        c1 in -0.05f64..0.05,
        c2 in -5e-5f64..5e-5,
        c3 in -2e-7f64..2e-7,
        half_steps in 100usize..300,
    ) {
        let z = half_steps as f64 * 0.5;
        let coeffs = [c0, c1, c2, c3];
        let trace = poly_trace(&coeffs, z);
        let exact = polynomial_integral(&coeffs, z);
        prop_assert!((absorbed_energy(&trace) - exact).abs() / exact < 1e-6);
    }

    #[test]
    fn force_scaling(scale in 0.1f64..10.0, c0 in 5.0f64..40.0, c1 in 0.0f64..0.1) {
        let base = poly_trace(&[c0, c1], 140.0);
        let scaled = CrushTrace::new(base.displacement().to_vec(), base.force().iter().map(|f| f * scale).collect()).unwrap();
        let a = compute_metrics(&base, 0.3).unwrap();
        let b = compute_metrics(&scaled, 0.3).unwrap();
        for (x, y) in [(a.tea, b.tea), (a.pm, b.pm), (a.pcf, b.pcf), (a.sea, b.sea)] {
            prop_assert!((y - scale * x).abs() <= 1e-12 * y.abs().max(1.0));
        }
        prop_assert!((a.cfe - b.cfe).abs() < 1e-9);
        prop_assert!((b.tea - b.pm * b.z / 1000.0).abs() < 1e-9 * b.tea);
    }
}
