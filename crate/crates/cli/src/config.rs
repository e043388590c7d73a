//! Pipeline configuration, stored as JSON.
//!
//! Every field has a default, so a config file only needs the values it
//! changes. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use lft_core::crush::SurrogateParams;
use lft_core::doe::DEFAULT_SAMPLE_COUNT;
use lft_core::labeling::Thresholds;
use lft_core::metrics::DEFAULT_PEAK_WINDOW;
use lft_core::{DesignSpace, EvaluationSetup, MaterialSpec, Objective, ObjectiveCriteria, TreeParams, TubeConstants};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult, StageExt};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub design_space: DesignSpace,
    pub tube: TubeConstants,
    pub tube_material: MaterialSpec,
    pub lattice_material: MaterialSpec,
    pub surrogate: SurrogateParams,
    /// Initial-peak window as a fraction of the crush distance.
    pub peak_window: f64,
    pub tree: TreeParams,
    pub thresholds: Thresholds,
    /// Objectives for which trees and rules are built.
    pub objectives: Vec<Objective>,
    /// Designs in the sampling plan.
    pub k: usize,
    pub seed: u64,
    /// Designs sampled per selected rule during validation.
    pub validation_k: usize,
    pub out_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let setup = EvaluationSetup::default();
        PipelineConfig {
            design_space: DesignSpace::default(),
            tube: setup.tube,
            tube_material: setup.tube_material,
            lattice_material: setup.lattice_material,
            surrogate: setup.surrogate,
            peak_window: DEFAULT_PEAK_WINDOW,
            tree: TreeParams::default(),
            thresholds: Thresholds::default(),
            objectives: Objective::ALL.to_vec(),
            k: DEFAULT_SAMPLE_COUNT,
            seed: 42,
            validation_k: 5,
            out_dir: PathBuf::from("lft-out"),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::json(path, e))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn setup(&self) -> EvaluationSetup {
        EvaluationSetup {
            tube: self.tube,
            tube_material: self.tube_material.clone(),
            lattice_material: self.lattice_material.clone(),
            surrogate: self.surrogate,
            peak_window: self.peak_window,
        }
    }

    pub fn criteria(&self, objective: Objective) -> ObjectiveCriteria {
        ObjectiveCriteria { objective, thresholds: self.thresholds }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.k < 1 {
            return Err(CliError::Argument("k must be at least 1".into()));
        }
        if self.validation_k < 1 {
            return Err(CliError::Argument("validation_k must be at least 1".into()));
        }
        if self.objectives.is_empty() {
            return Err(CliError::Argument("at least one objective is required".into()));
        }
        if !(self.peak_window > 0.0 && self.peak_window <= 1.0) {
            return Err(CliError::Argument(format!("peak_window must be in (0, 1], got {}", self.peak_window)));
        }
        self.design_space.validate().stage("config")?;
        self.setup().validate().stage("config")?;
        self.tree.validate().stage("config")?;
        self.thresholds.validate().stage("config")
    }
}
