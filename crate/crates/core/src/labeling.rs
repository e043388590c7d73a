//! Three-level performance classes under each design objective.
//!
//! Classes are nested sets: `e` when the excellent condition holds, `g` when
//! the general condition holds but not the excellent one, `b` otherwise. The
//! general set is not upper-bounded by the excellent thresholds.

use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::metrics::CrashMetrics;

/// Performance class. Declaration order `e < g < b` is the tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClassLabel {
    #[serde(rename = "e")]
    Excellent,
    #[serde(rename = "g")]
    General,
    #[serde(rename = "b")]
    Bad,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 3] = [ClassLabel::Excellent, ClassLabel::General, ClassLabel::Bad];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ClassLabel::Excellent => "e",
            ClassLabel::General => "g",
            ClassLabel::Bad => "b",
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "e" => Ok(ClassLabel::Excellent),
            "g" => Ok(ClassLabel::General),
            "b" => Ok(ClassLabel::Bad),
            other => Err(argument(alloc::format!("unknown class label {other:?}"))),
        }
    }
}

/// Row counts per class, indexed by [`ClassLabel`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts(pub [usize; 3]);

impl ClassCounts {
    pub fn from_labels<'a>(labels: impl IntoIterator<Item = &'a ClassLabel>) -> Self {
        let mut c = ClassCounts::default();
        for l in labels {
            c[*l] += 1;
        }
        c
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

impl Index<ClassLabel> for ClassCounts {
    type Output = usize;
    fn index(&self, l: ClassLabel) -> &usize {
        &self.0[l.index()]
    }
}

impl IndexMut<ClassLabel> for ClassCounts {
    fn index_mut(&mut self, l: ClassLabel) -> &mut usize {
        &mut self.0[l.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// SEA and crush force efficiency.
    Efficiency,
    /// SEA and total energy absorption.
    TotalEa,
    /// SEA and mass.
    Lightweight,
}

impl Objective {
    pub const ALL: [Objective; 3] = [Objective::Efficiency, Objective::TotalEa, Objective::Lightweight];

    /// Short name used on the command line and in file names.
    pub fn short(self) -> &'static str {
        match self {
            Objective::Efficiency => "eff",
            Objective::TotalEa => "tea",
            Objective::Lightweight => "light",
        }
    }

    pub fn from_short(s: &str) -> Option<Objective> {
        Objective::ALL.into_iter().find(|o| o.short() == s)
    }

    /// The quantity judged alongside SEA.
    pub fn secondary(self, m: &CrashMetrics) -> f64 {
        match self {
            Objective::Efficiency => m.cfe,
            Objective::TotalEa => m.tea,
            Objective::Lightweight => m.mass,
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

/// Class thresholds. Excellent thresholds must be strictly stricter than
/// the general ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// kJ/kg
    pub sea_e: f64,
    pub sea_g: f64,
    /// percent
    pub cfe_e: f64,
    pub cfe_g: f64,
    /// kJ
    pub tea_e: f64,
    pub tea_g: f64,
    /// kg, upper limits
    pub mass_e: f64,
    pub mass_g: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { sea_e: 16.0, sea_g: 13.64, cfe_e: 45.0, cfe_g: 35.0, tea_e: 6.0, tea_g: 4.45, mass_e: 0.45, mass_g: 0.5 }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        let pairs = [
            ("sea", self.sea_e > self.sea_g),
            ("cfe", self.cfe_e > self.cfe_g),
            ("tea", self.tea_e > self.tea_g),
            ("mass", self.mass_e < self.mass_g),
        ];
        match pairs.iter().find(|(_, ok)| !ok) {
            Some((name, _)) => Err(argument(alloc::format!("{name}: excellent threshold must be stricter than general"))),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveCriteria {
    pub objective: Objective,
    pub thresholds: Thresholds,
}

impl ObjectiveCriteria {
    pub fn new(objective: Objective) -> Self {
        ObjectiveCriteria { objective, thresholds: Thresholds::default() }
    }

    /// Class from SEA and the objective's secondary quantity (CFE %, TEA kJ
    /// or mass kg).
    pub fn label_values(&self, sea: f64, secondary: f64) -> ClassLabel {
        let th = &self.thresholds;
        let (excellent, general) = match self.objective {
            Objective::Efficiency => (secondary >= th.cfe_e, secondary >= th.cfe_g),
            Objective::TotalEa => (secondary >= th.tea_e, secondary >= th.tea_g),
            Objective::Lightweight => (secondary <= th.mass_e, secondary <= th.mass_g),
        };
        if sea >= th.sea_e && excellent {
            ClassLabel::Excellent
        } else if sea >= th.sea_g && general {
            ClassLabel::General
        } else {
            ClassLabel::Bad
        }
    }
}

pub fn label(metrics: &CrashMetrics, crit: &ObjectiveCriteria) -> ClassLabel {
    crit.label_values(metrics.sea, crit.objective.secondary(metrics))
}

/// Labels every record under one objective and tallies the classes.
pub fn label_dataset(records: &[CrashMetrics], crit: &ObjectiveCriteria) -> (Vec<ClassLabel>, ClassCounts) {
    let labels: Vec<ClassLabel> = records.iter().map(|m| label(m, crit)).collect();
    let counts = ClassCounts::from_labels(&labels);
    (labels, counts)
}
