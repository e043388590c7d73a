//! Independent reference computations used to check the library.
//!
//! Nothing here calls into the code paths it checks: entropies, candidate
//! enumeration and closed-form integrals are recomputed from scratch.

#![allow(dead_code)]

use lft_core::dtree::{DecisionTree, Node, NodeKind};
use lft_core::{ClassLabel, Sample, Variable};

fn entropy_of(labels: &[ClassLabel]) -> f64 {
    let n = labels.len() as f64;
    if labels.is_empty() {
        return 0.0;
    }
    let mut h = 0.0;
    for c in ClassLabel::ALL {
        let k = labels.iter().filter(|&&l| l == c).count();
        if k > 0 {
            let p = k as f64 / n;
            h -= p * p.ln() / std::f64::consts::LN_2;
        }
    }
    h
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSplit {
    pub attribute: Variable,
    pub threshold: f64,
    pub gain: f64,
    pub gain_ratio: f64,
}

/// Brute-force split choice: every midpoint of every attribute, partitioned
/// by direct filtering, positive gain, mean-gain guard, max gain ratio,
/// earliest attribute then smallest threshold on ties.
pub fn brute_force_split(rows: &[Sample], min_leaf: usize) -> Option<OracleSplit> {
    let labels: Vec<ClassLabel> = rows.iter().map(|r| r.label).collect();
    let h = entropy_of(&labels);
    let n = rows.len() as f64;
    let mut all = Vec::new();
    for attribute in Variable::ALL {
        let a = attribute.index();
        let mut values: Vec<f64> = rows.iter().map(|r| r.features[a]).collect();
        values.sort_by(|x, y| x.partial_cmp(y).unwrap());
        values.dedup();
        for w in values.windows(2) {
            let mid = (w[0] + w[1]) / 2.0;
            let left: Vec<ClassLabel> = rows.iter().filter(|r| r.features[a] <= mid).map(|r| r.label).collect();
            let right: Vec<ClassLabel> = rows.iter().filter(|r| r.features[a] > mid).map(|r| r.label).collect();
            if left.len() < min_leaf || right.len() < min_leaf {
                continue;
            }
            let (pl, pr) = (left.len() as f64 / n, right.len() as f64 / n);
            let gain = h - pl * entropy_of(&left) - pr * entropy_of(&right);
            let split_info = -(pl * pl.log2() + pr * pr.log2());
            let threshold = rows.iter().map(|r| r.features[a]).filter(|&x| x <= mid).fold(f64::MIN, f64::max);
            all.push(OracleSplit { attribute, threshold, gain, gain_ratio: gain / split_info });
        }
    }
    let positive: Vec<OracleSplit> = all.into_iter().filter(|c| c.gain > 1e-12).collect();
    if positive.is_empty() {
        return None;
    }
    let mean = positive.iter().map(|c| c.gain).sum::<f64>() / positive.len() as f64;
    let eligible: Vec<OracleSplit> = positive.into_iter().filter(|c| c.gain >= mean - 1e-12).collect();
    let best = eligible.iter().map(|c| c.gain_ratio).fold(f64::MIN, f64::max);
    eligible
        .into_iter()
        .filter(|c| c.gain_ratio >= best - 1e-12)
        .min_by(|x, y| x.attribute.cmp(&y.attribute).then(x.threshold.partial_cmp(&y.threshold).unwrap()))
}

/// Walks a built tree and checks every node against [`brute_force_split`].
/// Returns a description of the first disagreement.
pub fn check_tree(tree: &DecisionTree, rows: &[Sample], min_leaf: usize) -> Result<usize, String> {
    fn visit(node: &Node, rows: &[Sample], min_leaf: usize, checked: &mut usize) -> Result<(), String> {
        *checked += 1;
        let pure = rows.iter().all(|r| r.label == rows[0].label);
        let expected = if pure || rows.len() < 2 * min_leaf { None } else { brute_force_split(rows, min_leaf) };
        match (&node.kind, expected) {
            (NodeKind::Leaf, None) => Ok(()),
            (NodeKind::Leaf, Some(e)) => Err(format!("leaf where oracle splits on {} <= {}", e.attribute, e.threshold)),
            (NodeKind::Split { attribute, threshold, .. }, None) => {
                Err(format!("split {attribute} <= {threshold} where oracle stops ({} rows)", rows.len()))
            }
            (NodeKind::Split { attribute, threshold, left, right }, Some(e)) => {
                if *attribute != e.attribute || *threshold != e.threshold {
                    return Err(format!("split {attribute} <= {threshold}, oracle {} <= {}", e.attribute, e.threshold));
                }
                let a = attribute.index();
                let l: Vec<Sample> = rows.iter().filter(|r| r.features[a] <= *threshold).copied().collect();
                let r: Vec<Sample> = rows.iter().filter(|r| r.features[a] > *threshold).copied().collect();
                visit(left, &l, min_leaf, checked)?;
                visit(right, &r, min_leaf, checked)
            }
        }
    }
    let mut checked = 0;
    visit(&tree.root, rows, min_leaf, &mut checked)?;
    Ok(checked)
}

/// Closed-form integral (J) of the surrogate force shape: linear rise to
/// `peak * level` at 2.5 % of `z`, linear fall to the plateau value at 5 %,
/// then `level * (1 + amp * sin(2π folds x / z))`.
pub fn surrogate_energy(level: f64, z: f64, folds: f64, peak: f64, amp: f64) -> f64 {
    use std::f64::consts::PI;
    let a = 0.025 * z;
    let b = 0.05 * z;
    let k = 2.0 * PI * folds / z;
    let settle = level * (1.0 + amp * (k * b).sin());
    let rise = 0.5 * peak * level * a;
    let fall = 0.5 * (peak * level + settle) * (b - a);
    let plateau = level * (z - b) + level * amp / k * ((k * b).cos() - (k * z).cos());
    rise + fall + plateau
}

/// `∫_0^z Σ c_i x^i dx`
pub fn polynomial_integral(coeffs: &[f64], z: f64) -> f64 {
    coeffs.iter().enumerate().map(|(i, c)| c * z.powi(i as i32 + 1) / (i as f64 + 1.0)).sum()
}

pub fn polynomial_at(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Values per stratum of `[lo, hi]` split into `values.len()` equal bins.
pub fn occupancy(values: &[f64], lo: f64, hi: f64) -> Vec<usize> {
    let k = values.len();
    let mut bins = vec![0usize; k];
    for &v in values {
        let b = (((v - lo) / (hi - lo)) * k as f64).floor() as usize;
        bins[b.min(k - 1)] += 1;
    }
    bins
}
