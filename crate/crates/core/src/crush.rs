//! Force-displacement responses.
//!
//! The surrogate is phenomenological: a classical square-tube mean crushing
//! force plus an axial capacity term for the lattice struts, shaped into a
//! trace with an initial triangular peak followed by a sinusoidal folding
//! plateau. It is deterministic and monotone in the directions the design
//! study relies on; it is not a mechanics model.
//!
//! Units: mm, kN (1 kN·mm = 1 J).

use core::f64::consts::PI;

use alloc::format;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::geometry::{strut_area, DerivedGeometry, DesignPoint, MaterialSpec, TubeConstants};

/// Coefficient of the square-tube mean crushing force law.
pub const SQUARE_TUBE_COEFFICIENT: f64 = 13.06;

/// Apex and end of the initial peak, as fractions of the crush distance.
const PEAK_APEX: f64 = 0.025;
const PEAK_END: f64 = 0.05;

/// Fold count used when neither the parameters nor a lattice supply one.
const MIN_FOLDS: u32 = 4;

/// A sampled force-displacement curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrushTrace {
    x: Vec<f64>,
    force: Vec<f64>,
}

impl CrushTrace {
    /// Displacements must start at 0 and increase strictly; forces must be
    /// finite and non-negative. Errors name the offending sample index.
    pub fn new(x: Vec<f64>, force: Vec<f64>) -> Result<Self> {
        if x.len() != force.len() {
            return Err(argument(format!("{} displacements but {} forces", x.len(), force.len())));
        }
        if x.len() < 2 {
            return Err(argument("a trace needs at least two samples"));
        }
        if x[0] != 0.0 {
            return Err(argument(format!("sample 0: displacement must start at 0, got {}", x[0])));
        }
        for i in 0..x.len() {
            if !x[i].is_finite() || !force[i].is_finite() {
                return Err(argument(format!("sample {i}: non-finite value")));
            }
            if force[i] < 0.0 {
                return Err(argument(format!("sample {i}: negative force {}", force[i])));
            }
            if i > 0 && x[i] <= x[i - 1] {
                return Err(argument(format!("sample {i}: displacement {} not greater than {}", x[i], x[i - 1])));
            }
        }
        Ok(CrushTrace { x, force })
    }

    pub fn displacement(&self) -> &[f64] {
        &self.x
    }

    pub fn force(&self) -> &[f64] {
        &self.force
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Crush distance `z`, the last displacement.
    pub fn crush_distance(&self) -> f64 {
        *self.x.last().expect("trace is never empty")
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.x.iter().copied().zip(self.force.iter().copied())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurrogateParams {
    /// Fraction of the lattice height `H - h` that is crushed.
    pub crush_fraction: f64,
    /// Initial peak over mean force level.
    pub peak_factor: f64,
    /// Relative amplitude of the folding oscillation.
    pub fold_amplitude: f64,
    /// Folds over the stroke; `None` uses `max(n, 4)`.
    pub fold_count: Option<u32>,
    /// Share of strut axial capacity realised.
    pub lattice_efficiency: f64,
    /// Tube/lattice interaction multiplier on the lattice force.
    pub interaction_factor: f64,
    /// Sampling interval, mm.
    pub sample_step: f64,
}

impl Default for SurrogateParams {
    fn default() -> Self {
        SurrogateParams {
            crush_fraction: 0.7,
            peak_factor: 1.3,
            fold_amplitude: 0.25,
            fold_count: None,
            lattice_efficiency: 0.5,
            interaction_factor: 1.1,
            sample_step: 0.5,
        }
    }
}

impl SurrogateParams {
    pub fn validate(&self) -> Result<()> {
        let check = |field: &'static str, value: f64, ok: bool, bound: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Domain { field, value, bound: bound.into() })
            }
        };
        let p = self;
        check("crush_fraction", p.crush_fraction, p.crush_fraction > 0.0 && p.crush_fraction <= 1.0, "0 < crush_fraction <= 1")?;
        check("peak_factor", p.peak_factor, p.peak_factor > 1.0 && p.peak_factor.is_finite(), "peak_factor > 1")?;
        check("fold_amplitude", p.fold_amplitude, p.fold_amplitude >= 0.0 && p.fold_amplitude < 1.0, "0 <= fold_amplitude < 1")?;
        check(
            "lattice_efficiency",
            p.lattice_efficiency,
            p.lattice_efficiency > 0.0 && p.lattice_efficiency <= 1.0,
            "0 < lattice_efficiency <= 1",
        )?;
        check(
            "interaction_factor",
            p.interaction_factor,
            p.interaction_factor > 0.0 && p.interaction_factor.is_finite(),
            "interaction_factor > 0",
        )?;
        check("sample_step", p.sample_step, p.sample_step > 0.0 && p.sample_step.is_finite(), "sample_step > 0")?;
        if p.fold_count == Some(0) {
            return Err(Error::Domain { field: "fold_count", value: 0.0, bound: "fold_count >= 1".into() });
        }
        Ok(())
    }

    fn folds_for(&self, layers: Option<u32>) -> u32 {
        self.fold_count.unwrap_or_else(|| layers.unwrap_or(MIN_FOLDS).max(MIN_FOLDS))
    }
}

/// Mean crushing force of a square tube, kN.
pub fn tube_mean_force(t: f64, c: &TubeConstants, tube: &MaterialSpec) -> f64 {
    SQUARE_TUBE_COEFFICIENT * tube.flow_stress_mpa * libm::cbrt(c.side) * libm::pow(t, 5.0 / 3.0) / 1000.0
}

/// Axial capacity of one transverse layer of struts, kN (before interaction).
pub fn lattice_mean_force(dp: &DesignPoint, g: &DerivedGeometry, lattice: &MaterialSpec, p: &SurrogateParams) -> f64 {
    let m = dp.m as f64;
    let verticals = (m + 1.0) * (m + 1.0);
    let diagonals = 8.0 * m * m;
    p.lattice_efficiency * lattice.flow_stress_mpa * strut_area(dp.d) * (verticals + diagonals * libm::sin(g.omega)) / 1000.0
}

/// Force levels feeding one surrogate trace, kN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceLevels {
    pub tube: f64,
    pub lattice: f64,
    /// `tube + interaction_factor * lattice`
    pub total: f64,
}

pub fn surrogate_forces(
    dp: &DesignPoint,
    g: &DerivedGeometry,
    tube: &MaterialSpec,
    lattice: &MaterialSpec,
    p: &SurrogateParams,
    c: &TubeConstants,
) -> ForceLevels {
    let tube_force = tube_mean_force(dp.t, c, tube);
    let lattice_force = lattice_mean_force(dp, g, lattice, p);
    ForceLevels { tube: tube_force, lattice: lattice_force, total: tube_force + p.interaction_factor * lattice_force }
}

/// Force at displacement `x` for level `level`, stroke `z` and `folds` folds.
pub fn surrogate_force_at(x: f64, level: f64, z: f64, folds: u32, p: &SurrogateParams) -> f64 {
    let plateau = |x: f64| level * (1.0 + p.fold_amplitude * libm::sin(2.0 * PI * folds as f64 * x / z));
    let apex = PEAK_APEX * z;
    let end = PEAK_END * z;
    let peak = p.peak_factor * level;
    if x <= apex {
        peak * x / apex
    } else if x <= end {
        let settle = plateau(end);
        peak + (settle - peak) * (x - apex) / (end - apex)
    } else {
        plateau(x)
    }
}

/// Uniform grid of `step` plus the peak breakpoints and the end point.
fn sample_grid(z: f64, step: f64) -> Vec<f64> {
    let tol = 1e-9 * z;
    let mut xs: Vec<f64> = Vec::with_capacity((z / step) as usize + 4);
    let mut i = 0u64;
    loop {
        let x = i as f64 * step;
        if x >= z - tol {
            break;
        }
        xs.push(x);
        i += 1;
    }
    for b in [PEAK_APEX * z, PEAK_END * z] {
        if xs.iter().all(|&x| (x - b).abs() > tol) {
            xs.push(b);
        }
    }
    xs.push(z);
    xs.sort_by(f64::total_cmp);
    xs
}

fn build_trace(level: f64, z: f64, folds: u32, p: &SurrogateParams) -> Result<CrushTrace> {
    let x = sample_grid(z, p.sample_step);
    let force = x.iter().map(|&x| surrogate_force_at(x, level, z, folds, p).max(0.0)).collect();
    CrushTrace::new(x, force)
}

/// Surrogate trace for a lattice-filled tube. `dp` is not re-checked against
/// the design box (the geometry already was); only `t > 0` and `d >= 0` are
/// required.
pub fn simulate_crush(
    dp: &DesignPoint,
    g: &DerivedGeometry,
    tube: &MaterialSpec,
    lattice: &MaterialSpec,
    p: &SurrogateParams,
    c: &TubeConstants,
) -> Result<CrushTrace> {
    p.validate()?;
    tube.validate()?;
    lattice.validate()?;
    if !(dp.t > 0.0) {
        return Err(Error::Domain { field: "t", value: dp.t, bound: "t > 0".into() });
    }
    if !(dp.d >= 0.0) {
        return Err(Error::Domain { field: "d", value: dp.d, bound: "d >= 0".into() });
    }
    let levels = surrogate_forces(dp, g, tube, lattice, p, c);
    let z = p.crush_fraction * (c.height - dp.h);
    build_trace(levels.total, z, p.folds_for(Some(dp.n)), p)
}

/// Surrogate trace of the empty tube of thickness `t`, crushed over
/// `crush_fraction * H`.
pub fn hollow_trace(t: f64, tube: &MaterialSpec, p: &SurrogateParams, c: &TubeConstants) -> Result<CrushTrace> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(argument(format!("wall thickness must be positive, got {t}")));
    }
    p.validate()?;
    tube.validate()?;
    let z = p.crush_fraction * c.height;
    build_trace(tube_mean_force(t, c, tube), z, p.folds_for(None), p)
}

/// Mass of the empty tube, kg (same shell model as [`crate::geometry::compute_mass`]).
pub fn hollow_mass(t: f64, tube: &MaterialSpec, c: &TubeConstants) -> f64 {
    4.0 * c.side * c.height * t * tube.density * 1e-9
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::derive_geometry;

    fn mats() -> (MaterialSpec, MaterialSpec) {
        (MaterialSpec::al6063_t5(), MaterialSpec::alsi10mg())
    }

    #[test]
    fn trace_validation_names_sample() {
        let err = CrushTrace::new(alloc::vec![0.0, 2.0, 1.0], alloc::vec![0.0, 1.0, 1.0]).unwrap_err();
        assert!(alloc::format!("{err}").contains("sample 2"));
        assert!(CrushTrace::new(alloc::vec![0.0, 1.0], alloc::vec![0.0, -1.0]).is_err());
        assert!(CrushTrace::new(alloc::vec![0.5, 1.0], alloc::vec![0.0, 1.0]).is_err());
        let ok = CrushTrace::new(alloc::vec![0.0, 1.0, 2.0], alloc::vec![0.0, 10.0, 10.0]).unwrap();
        assert_eq!(ok.crush_distance(), 2.0);
    }

    #[test]
    fn zero_lattice_equals_hollow() {
        let c = TubeConstants::default();
        let (tube, lat) = mats();
        let p = SurrogateParams::default();
        let g = derive_geometry(&DesignPoint::new(4, 3, 1.0, 1.4, 0.0), &c).unwrap();
        let mut dp = DesignPoint::new(4, 3, 0.0, 1.4, 0.0);
        let mut q = p;
        q.fold_count = Some(4);
        let filled = simulate_crush(&dp, &g, &tube, &lat, &q, &c).unwrap();
        let hollow = hollow_trace(1.4, &tube, &q, &c).unwrap();
        assert_eq!(filled, hollow);
        dp.d = 1.0;
        assert_ne!(simulate_crush(&dp, &g, &tube, &lat, &q, &c).unwrap(), hollow);
    }

    #[test]
    fn flat_plateau_without_folds() {
        let c = TubeConstants::default();
        let (tube, lat) = mats();
        let p = SurrogateParams { fold_amplitude: 0.0, peak_factor: 1.0 + 1e-9, ..Default::default() };
        let dp = DesignPoint::new(3, 4, 2.0, 1.1, 3.0);
        let g = derive_geometry(&dp, &c).unwrap();
        let level = surrogate_forces(&dp, &g, &tube, &lat, &p, &c).total;
        let trace = simulate_crush(&dp, &g, &tube, &lat, &p, &c).unwrap();
        let z = trace.crush_distance();
        for (x, f) in trace.samples().filter(|(x, _)| *x > 0.05 * z) {
            assert_eq!(f, level, "x={x}");
        }
    }

    #[test]
    fn hollow_thickness_checks() {
        let c = TubeConstants::default();
        let (tube, _) = mats();
        let p = SurrogateParams::default();
        assert!(hollow_trace(0.0, &tube, &p, &c).is_err());
        let expected = 13.06 * tube.flow_stress_mpa * libm::cbrt(75.0) * libm::pow(1.4, 5.0 / 3.0) / 1000.0;
        assert!((tube_mean_force(1.4, &c, &tube) - expected).abs() < 1e-12);
        assert!(tube_mean_force(1.5, &c, &tube) > tube_mean_force(1.4, &c, &tube));
        let tr = hollow_trace(1.4, &tube, &p, &c).unwrap();
        assert!((tr.crush_distance() - 140.0).abs() < 1e-12);
    }

    #[test]
    fn peak_reached_early() {
        let c = TubeConstants::default();
        let (tube, lat) = mats();
        let p = SurrogateParams::default();
        let dp = DesignPoint::new(3, 4, 2.0, 1.1, 3.0);
        let g = derive_geometry(&dp, &c).unwrap();
        let level = surrogate_forces(&dp, &g, &tube, &lat, &p, &c).total;
        let tr = simulate_crush(&dp, &g, &tube, &lat, &p, &c).unwrap();
        let z = tr.crush_distance();
        let early = tr.samples().filter(|(x, _)| *x <= 0.05 * z).map(|(_, f)| f).fold(0.0, f64::max);
        assert!((early - p.peak_factor * level).abs() < 1e-9 * level);
        assert!((z - 0.7 * 197.0).abs() < 1e-9);
    }

    #[test]
    fn bad_params_rejected() {
        let bad = SurrogateParams { peak_factor: 1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = SurrogateParams { fold_count: Some(0), ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = SurrogateParams { sample_step: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
