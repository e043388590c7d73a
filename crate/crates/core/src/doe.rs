//! Latin Hypercube design of experiments.
//!
//! Random numbers come from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `SeedableRng::seed_from_u64`. Variables are drawn in the fixed order
//! `d, n, m, t, h`; for each one a Fisher-Yates permutation of the strata is
//! drawn first, then one uniform offset per sample. The same
//! `(space, k, seed)` therefore always yields the same list.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::geometry::{DesignPoint, Variable};

/// Default sample size: comfortably above the `3N` rule for five variables.
pub const DEFAULT_SAMPLE_COUNT: usize = 150;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariableRange {
    pub lower: f64,
    pub upper: f64,
    /// Sampled values are rounded to integers.
    pub integer: bool,
}

impl VariableRange {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Per-variable bounds of the explored region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignSpace {
    pub d: VariableRange,
    pub n: VariableRange,
    pub m: VariableRange,
    pub t: VariableRange,
    pub h: VariableRange,
}

impl Default for DesignSpace {
    fn default() -> Self {
        let range = |v: Variable| {
            let (lower, upper) = v.default_range();
            VariableRange { lower, upper, integer: v.is_integer() }
        };
        DesignSpace { d: range(Variable::D), n: range(Variable::N), m: range(Variable::M), t: range(Variable::T), h: range(Variable::H) }
    }
}

impl DesignSpace {
    pub fn range(&self, v: Variable) -> &VariableRange {
        match v {
            Variable::D => &self.d,
            Variable::N => &self.n,
            Variable::M => &self.m,
            Variable::T => &self.t,
            Variable::H => &self.h,
        }
    }

    pub fn range_mut(&mut self, v: Variable) -> &mut VariableRange {
        match v {
            Variable::D => &mut self.d,
            Variable::N => &mut self.n,
            Variable::M => &mut self.m,
            Variable::T => &mut self.t,
            Variable::H => &mut self.h,
        }
    }

    /// Bounds must be ordered and lie inside the admissible design box;
    /// integer variables need integral bounds.
    pub fn validate(&self) -> Result<()> {
        for v in Variable::ALL {
            let r = self.range(v);
            let (lo, hi) = v.default_range();
            if !(r.lower < r.upper) {
                return Err(Error::Domain { field: v.name(), value: r.lower, bound: format!("lower < upper = {}", r.upper) });
            }
            if r.lower < lo || r.upper > hi {
                return Err(Error::Domain {
                    field: v.name(),
                    value: if r.lower < lo { r.lower } else { r.upper },
                    bound: format!("{lo} <= {} <= {hi}", v.name()),
                });
            }
            if r.integer != v.is_integer() {
                return Err(argument(format!("integrality flag of {v} must be {}", v.is_integer())));
            }
            if r.integer && (libm::round(r.lower) != r.lower || libm::round(r.upper) != r.upper) {
                return Err(argument(format!("bounds of integer variable {v} must be integers")));
            }
        }
        Ok(())
    }

    pub fn contains(&self, dp: &DesignPoint) -> bool {
        Variable::ALL.iter().all(|&v| {
            let r = self.range(v);
            let x = dp.get(v);
            x >= r.lower && x <= r.upper
        })
    }
}

/// One position per stratum of `[0, 1)`, in random stratum order.
pub(crate) fn stratified_unit<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let mut strata: Vec<usize> = (0..k).collect();
    strata.shuffle(rng);
    strata
        .into_iter()
        .map(|s| {
            let u: f64 = rng.random();
            // keep the point inside its stratum after rounding
            let pos = (s as f64 + u) / k as f64;
            pos.min(libm::nextafter((s + 1) as f64 / k as f64, 0.0))
        })
        .collect()
}

/// Maps a unit position onto a range; integers use `[lo - 0.5, hi + 0.5]`
/// and are rounded to the nearest admissible value.
pub(crate) fn map_position(r: &VariableRange, pos: f64) -> f64 {
    if r.integer {
        let x = (r.lower - 0.5) + pos * (r.width() + 1.0);
        libm::round(x).clamp(r.lower, r.upper)
    } else {
        (r.lower + pos * r.width()).clamp(r.lower, r.upper)
    }
}

pub(crate) fn assemble(columns: &[Vec<f64>; 5], i: usize) -> DesignPoint {
    let col = |v: Variable| columns[v.index()][i];
    DesignPoint { n: col(Variable::N) as u32, m: col(Variable::M) as u32, d: col(Variable::D), t: col(Variable::T), h: col(Variable::H) }
}

/// Plain (non-optimised) Latin Hypercube sample of `k` designs.
pub fn lhs_sample(space: &DesignSpace, k: usize, seed: u64) -> Result<Vec<DesignPoint>> {
    if k < 1 {
        return Err(argument("sample count k must be at least 1"));
    }
    space.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let columns = Variable::ALL.map(|v| {
        let r = space.range(v);
        stratified_unit(&mut rng, k).into_iter().map(|p| map_position(r, p)).collect::<Vec<_>>()
    });
    Ok((0..k).map(|i| assemble(&columns, i)).collect())
}
