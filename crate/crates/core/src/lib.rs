//! Data-mining design of lattice-filled thin-walled tubes.
//!
//! The crate is `no_std` (with `alloc`) and free of IO: parametric geometry,
//! Latin Hypercube sampling, a deterministic crush surrogate, crashworthiness
//! metrics, three-level labeling, C4.5 trees with pessimistic pruning, and
//! design-rule extraction and validation.

#![no_std]
// `!(x > 0.0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod crush;
pub mod doe;
pub mod dtree;
pub mod error;
pub mod evaluate;
pub mod geometry;
pub mod labeling;
pub mod metrics;
pub mod rules;

pub use crush::{CrushTrace, SurrogateParams};
pub use doe::{lhs_sample, DesignSpace, VariableRange};
pub use dtree::{build_c45, classify, Dataset, DecisionTree, Sample, TreeParams};
pub use error::{Error, Result};
pub use evaluate::{DesignEvaluation, EvaluationSetup};
pub use geometry::{DesignPoint, MaterialSpec, TubeConstants, Variable};
pub use labeling::{ClassLabel, Objective, ObjectiveCriteria, Thresholds};
pub use metrics::CrashMetrics;
pub use rules::{extract_rules, select_design_rule, Rule, ValidationReport};
