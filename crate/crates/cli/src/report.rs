//! Univariate sweeps and the filled-versus-hollow comparison.

use lft_core::{DesignPoint, DesignSpace, EvaluationSetup, Variable};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult, StageExt};
use crate::io::DatasetRow;

/// Column name of a design variable in CSV files.
pub fn variable_column(v: Variable) -> &'static str {
    match v {
        Variable::D => "d_mm",
        Variable::N => "n",
        Variable::M => "m",
        Variable::T => "t_mm",
        Variable::H => "h_mm",
    }
}

/// Fixed point of the univariate study: `m = 4, n = 3, t = 1.1, h = 3` and a
/// mid-range rod diameter.
pub fn default_sweep_point() -> DesignPoint {
    DesignPoint::new(3, 4, 2.0, 1.1, 3.0)
}

/// Parses `d=2,n=3` overrides onto a base point.
pub fn parse_point(text: &str, base: DesignPoint) -> CliResult<DesignPoint> {
    let mut dp = base;
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, value) = part.split_once('=').ok_or_else(|| CliError::Argument(format!("expected name=value, got {part:?}")))?;
        let v = Variable::from_name(name.trim()).ok_or_else(|| CliError::Argument(format!("unknown variable {name:?}")))?;
        let x: f64 = value.trim().parse().map_err(|_| CliError::Argument(format!("bad value {value:?} for {v}")))?;
        match v {
            Variable::D => dp.d = x,
            Variable::T => dp.t = x,
            Variable::H => dp.h = x,
            Variable::N | Variable::M => {
                if x.fract() != 0.0 || x < 0.0 {
                    return Err(CliError::Argument(format!("{v} must be a non-negative integer, got {x}")));
                }
                if v == Variable::N {
                    dp.n = x as u32
                } else {
                    dp.m = x as u32
                }
            }
        }
    }
    Ok(dp)
}

/// Designs that vary `var` over its range with the other four held at
/// `fixed`. Continuous variables use `points` evenly spaced values; integer
/// variables use every admissible integer. A single point returns `fixed`.
pub fn sweep_grid(space: &DesignSpace, var: Variable, fixed: &DesignPoint, points: usize) -> CliResult<Vec<DesignPoint>> {
    fixed.validate().stage("sweep")?;
    if !space.contains(fixed) {
        return Err(CliError::Argument(format!("fixed point {fixed:?} lies outside the design space")));
    }
    if points == 0 {
        return Err(CliError::Argument("sweep needs at least one point".into()));
    }
    if points == 1 {
        return Ok(vec![*fixed]);
    }
    let r = space.range(var);
    let values: Vec<f64> = if r.integer {
        (r.lower as i64..=r.upper as i64).map(|i| i as f64).collect()
    } else {
        (0..points).map(|i| r.lower + r.width() * i as f64 / (points - 1) as f64).collect()
    };
    Ok(values
        .into_iter()
        .map(|x| {
            let mut dp = *fixed;
            match var {
                Variable::D => dp.d = x,
                Variable::N => dp.n = x as u32,
                Variable::M => dp.m = x as u32,
                Variable::T => dp.t = x,
                Variable::H => dp.h = x,
            }
            dp
        })
        .collect())
}

/// Hollow-tube SEA (kJ/kg) at the five printed wall thicknesses.
pub const REFERENCE_BASELINES: [(f64, f64); 5] = [(0.8, 7.50), (1.1, 9.76), (1.4, 11.03), (1.7, 12.90), (2.0, 13.64)];

/// Printed baseline at `t`, linear between the tabulated thicknesses and
/// held constant beyond them.
pub fn reference_baseline(t: f64) -> f64 {
    let first = REFERENCE_BASELINES[0];
    let last = REFERENCE_BASELINES[REFERENCE_BASELINES.len() - 1];
    if t <= first.0 {
        return first.1;
    }
    if t >= last.0 {
        return last.1;
    }
    let w = REFERENCE_BASELINES.windows(2).find(|w| t <= w[1].0).expect("t inside the table");
    let (a, b) = (w[0], w[1]);
    a.1 + (b.1 - a.1) * (t - a.0) / (b.0 - a.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineSource {
    /// Hollow tubes run through the same surrogate.
    Surrogate,
    /// The printed reference values.
    Reference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HollowRow {
    pub index: usize,
    pub t_mm: f64,
    pub sea: f64,
    pub baseline: f64,
    /// `100 * (sea - baseline) / baseline`
    pub increase_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HollowSummary {
    pub baseline_source: BaselineSource,
    pub designs: usize,
    pub exceed_count: usize,
    pub exceed_pct: f64,
    pub below_count: usize,
    pub over_20_count: usize,
    pub over_50_count: usize,
    /// Largest gain over the baseline, when any design exceeds it.
    pub max_increase: Option<HollowRow>,
    /// Largest shortfall, when any design falls below it.
    pub max_decrease: Option<HollowRow>,
}

pub fn hollow_rows(rows: &[DatasetRow], setup: &EvaluationSetup, source: BaselineSource) -> CliResult<Vec<HollowRow>> {
    rows.iter()
        .map(|r| {
            let t = r.design.t;
            let baseline = match source {
                BaselineSource::Reference => reference_baseline(t),
                BaselineSource::Surrogate => setup.evaluate_hollow(t).stage("hollow-report")?.sea,
            };
            let sea = r.metrics.sea;
            Ok(HollowRow { index: r.index, t_mm: t, sea, baseline, increase_pct: 100.0 * (sea - baseline) / baseline })
        })
        .collect()
}

pub fn summarize(rows: &[HollowRow], source: BaselineSource) -> HollowSummary {
    let exceed_count = rows.iter().filter(|r| r.sea > r.baseline).count();
    let pick = |better: fn(f64, f64) -> bool, keep: fn(&HollowRow) -> bool| {
        rows.iter().filter(|r| keep(r)).fold(None::<HollowRow>, |best, r| match best {
            Some(b) if !better(r.increase_pct, b.increase_pct) => Some(b),
            _ => Some(*r),
        })
    };
    HollowSummary {
        baseline_source: source,
        designs: rows.len(),
        exceed_count,
        exceed_pct: if rows.is_empty() { 0.0 } else { 100.0 * exceed_count as f64 / rows.len() as f64 },
        below_count: rows.iter().filter(|r| r.sea < r.baseline).count(),
        over_20_count: rows.iter().filter(|r| r.increase_pct > 20.0).count(),
        over_50_count: rows.iter().filter(|r| r.increase_pct > 50.0).count(),
        max_increase: pick(|a, b| a > b, |r| r.sea > r.baseline),
        max_decrease: pick(|a, b| a < b, |r| r.sea < r.baseline),
    }
}
