//! Geometry → surrogate crush → metrics for one design.

use serde::{Deserialize, Serialize};

use crate::crush::{hollow_mass, hollow_trace, simulate_crush, CrushTrace, SurrogateParams};
use crate::error::Result;
use crate::geometry::{compute_mass, derive_geometry, DerivedGeometry, DesignPoint, MassBreakdown, MaterialSpec, TubeConstants};
use crate::metrics::{compute_metrics_with_window, CrashMetrics, DEFAULT_PEAK_WINDOW};

/// Everything needed to evaluate a design besides the design itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationSetup {
    pub tube: TubeConstants,
    pub tube_material: MaterialSpec,
    pub lattice_material: MaterialSpec,
    pub surrogate: SurrogateParams,
    /// Initial-peak window for PCF, fraction of the crush distance.
    pub peak_window: f64,
}

impl Default for EvaluationSetup {
    fn default() -> Self {
        EvaluationSetup {
            tube: TubeConstants::default(),
            tube_material: MaterialSpec::al6063_t5(),
            lattice_material: MaterialSpec::alsi10mg(),
            surrogate: SurrogateParams::default(),
            peak_window: DEFAULT_PEAK_WINDOW,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignEvaluation {
    pub design: DesignPoint,
    pub geometry: DerivedGeometry,
    pub mass: MassBreakdown,
    pub metrics: CrashMetrics,
    pub trace: CrushTrace,
}

impl EvaluationSetup {
    pub fn validate(&self) -> Result<()> {
        self.tube.validate()?;
        self.tube_material.validate()?;
        self.lattice_material.validate()?;
        self.surrogate.validate()
    }

    pub fn evaluate(&self, dp: &DesignPoint) -> Result<DesignEvaluation> {
        let geometry = derive_geometry(dp, &self.tube)?;
        let mass = compute_mass(dp, &geometry, &self.tube, &self.tube_material, &self.lattice_material)?;
        let trace = simulate_crush(dp, &geometry, &self.tube_material, &self.lattice_material, &self.surrogate, &self.tube)?;
        let metrics = compute_metrics_with_window(&trace, mass.total_mass, self.peak_window)?;
        Ok(DesignEvaluation { design: *dp, geometry, mass, metrics, trace })
    }

    /// Metrics of the empty tube with wall thickness `t`.
    pub fn evaluate_hollow(&self, t: f64) -> Result<CrashMetrics> {
        let trace = hollow_trace(t, &self.tube_material, &self.surrogate, &self.tube)?;
        compute_metrics_with_window(&trace, hollow_mass(t, &self.tube_material, &self.tube), self.peak_window)
    }
}
