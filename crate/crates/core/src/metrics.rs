//! Crashworthiness indices of a crush trace.

use alloc::format;
use serde::{Deserialize, Serialize};

use crate::crush::CrushTrace;
use crate::error::{argument, Result};

/// Default initial-peak window as a fraction of the crush distance.
pub const DEFAULT_PEAK_WINDOW: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrashMetrics {
    /// Total energy absorbed, kJ.
    pub tea: f64,
    /// Specific energy absorption, kJ/kg.
    pub sea: f64,
    /// Mean crushing force, kN.
    pub pm: f64,
    /// Initial peak force, kN.
    pub pcf: f64,
    /// Crush force efficiency, percent. May exceed 100.
    pub cfe: f64,
    /// Structure mass, kg.
    pub mass: f64,
    /// Crush distance, mm.
    pub z: f64,
}

/// Trapezoidal integral of force over displacement, J (kN·mm).
pub fn absorbed_energy(trace: &CrushTrace) -> f64 {
    let x = trace.displacement();
    let f = trace.force();
    x.windows(2).zip(f.windows(2)).map(|(x, f)| 0.5 * (f[0] + f[1]) * (x[1] - x[0])).sum()
}

/// Largest force for `x <= window * z`, including the interpolated value at
/// the window edge.
pub fn initial_peak(trace: &CrushTrace, window: f64) -> f64 {
    let edge = window * trace.crush_distance();
    let mut peak = 0.0f64;
    let mut prev: Option<(f64, f64)> = None;
    for (x, f) in trace.samples() {
        if x <= edge {
            peak = peak.max(f);
        } else {
            if let Some((x0, f0)) = prev {
                peak = peak.max(f0 + (f - f0) * (edge - x0) / (x - x0));
            }
            break;
        }
        prev = Some((x, f));
    }
    peak
}

pub fn compute_metrics(trace: &CrushTrace, mass: f64) -> Result<CrashMetrics> {
    compute_metrics_with_window(trace, mass, DEFAULT_PEAK_WINDOW)
}

pub fn compute_metrics_with_window(trace: &CrushTrace, mass: f64, window: f64) -> Result<CrashMetrics> {
    if trace.is_empty() {
        return Err(argument("empty trace"));
    }
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(argument(format!("mass must be positive, got {mass}")));
    }
    if !(window > 0.0 && window <= 1.0) {
        return Err(argument(format!("peak window must be in (0, 1], got {window}")));
    }
    let z = trace.crush_distance();
    let energy_j = absorbed_energy(trace);
    let pcf = initial_peak(trace, window);
    if !(pcf > 0.0) {
        return Err(argument("no positive force inside the initial-peak window"));
    }
    let tea = energy_j / 1000.0;
    let pm = energy_j / z;
    Ok(CrashMetrics { tea, sea: tea / mass, pm, pcf, cfe: 100.0 * pm / pcf, mass, z })
}
