//! C4.5-style decision trees over the five numeric design variables.
//!
//! Splits are binary (`x <= threshold` left, `x > threshold` right). At each
//! node every midpoint between consecutive distinct values of every attribute
//! is a candidate, provided both sides keep at least `min_leaf` rows. Among
//! candidates with positive information gain, only those whose gain is at
//! least the mean positive gain are eligible, and the eligible candidate with
//! the highest gain ratio wins. Ties go to the earlier attribute in
//! `d, n, m, t, h` order, then to the smaller threshold. The stored threshold
//! is the largest observed value not above the chosen midpoint.

mod prune;

pub use prune::{pessimistic_error_rate, prune, prune_with_floor, PruneAttempt, PruneOutcome, CF_LADDER};

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};
use crate::geometry::{DesignPoint, Variable};
use crate::labeling::{ClassCounts, ClassLabel};

/// Scores closer than this are treated as equal.
pub const SCORE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    /// Values in [`Variable::ALL`] order.
    pub features: [f64; 5],
    pub label: ClassLabel,
}

impl Sample {
    pub fn from_design(dp: &DesignPoint, label: ClassLabel) -> Self {
        Sample { features: dp.features(), label }
    }
}

/// Training rows. Non-empty, all values finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    rows: Vec<Sample>,
}

impl Dataset {
    pub fn new(rows: Vec<Sample>) -> Result<Self> {
        if rows.is_empty() {
            return Err(argument("dataset has no rows"));
        }
        if let Some(i) = rows.iter().position(|r| r.features.iter().any(|x| !x.is_finite())) {
            return Err(argument(format!("row {i}: non-finite feature")));
        }
        Ok(Dataset { rows })
    }

    pub fn rows(&self) -> &[Sample] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn class_counts(&self) -> ClassCounts {
        ClassCounts::from_labels(self.rows.iter().map(|r| &r.label))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// Minimum rows on each side of a split.
    pub min_leaf: usize,
    /// Pruning confidence factor.
    pub cf: f64,
    /// Lowest acceptable average class recall after pruning.
    pub min_avg_accuracy: f64,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { min_leaf: 2, cf: 0.25, min_avg_accuracy: 0.80 }
    }
}

impl TreeParams {
    pub fn validate(&self) -> Result<()> {
        if self.min_leaf < 1 {
            return Err(argument("min_leaf must be at least 1"));
        }
        if !(self.cf > 0.0 && self.cf < 1.0) {
            return Err(argument(format!("confidence factor must be in (0, 1), got {}", self.cf)));
        }
        if !(0.0..=1.0).contains(&self.min_avg_accuracy) {
            return Err(argument("min_avg_accuracy must be in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    /// Training rows reaching this node, by class.
    pub counts: ClassCounts,
    /// Leaf prediction, or the majority class of an internal node.
    pub class: ClassLabel,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NodeKind {
    Leaf,
    Split { attribute: Variable, threshold: f64, left: Box<Node>, right: Box<Node> },
}

impl Node {
    pub fn leaf(class: ClassLabel, counts: ClassCounts) -> Self {
        Node { counts, class, kind: NodeKind::Leaf }
    }

    pub fn split(attribute: Variable, threshold: f64, class: ClassLabel, counts: ClassCounts, left: Node, right: Node) -> Self {
        Node { counts, class, kind: NodeKind::Split { attribute, threshold, left: Box::new(left), right: Box::new(right) } }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, NodeKind::Leaf)
    }

    pub fn n_total(&self) -> usize {
        self.counts.total()
    }

    /// Rows reaching the node that are not of its class.
    pub fn n_errors(&self) -> usize {
        self.n_total() - self.counts[self.class]
    }

    pub fn leaf_count(&self) -> usize {
        match &self.kind {
            NodeKind::Leaf => 1,
            NodeKind::Split { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }

    pub fn depth(&self) -> usize {
        match &self.kind {
            NodeKind::Leaf => 0,
            NodeKind::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    fn predict(&self, features: &[f64; 5]) -> ClassLabel {
        let mut node = self;
        loop {
            match &node.kind {
                NodeKind::Leaf => return node.class,
                NodeKind::Split { attribute, threshold, left, right } => {
                    node = if features[attribute.index()] <= *threshold { left } else { right };
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub root: Node,
}

impl DecisionTree {
    pub fn leaf_count(&self) -> usize {
        self.root.leaf_count()
    }

    /// Edge count: two per internal node.
    pub fn branch_count(&self) -> usize {
        2 * (self.leaf_count() - 1)
    }

    pub fn classify_features(&self, features: &[f64; 5]) -> ClassLabel {
        self.root.predict(features)
    }
}

pub fn classify(tree: &DecisionTree, dp: &DesignPoint) -> ClassLabel {
    tree.classify_features(&dp.features())
}

/// Shannon entropy (bits) of a class distribution.
pub fn entropy(counts: &ClassCounts) -> f64 {
    let total = counts.total() as f64;
    if total == 0.0 {
        return 0.0;
    }
    counts
        .0
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * libm::log2(p)
        })
        .sum()
}

fn two_way_entropy(left: usize, right: usize) -> f64 {
    entropy(&ClassCounts([left, right, 0]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitScore {
    pub info_gain: f64,
    pub split_info: f64,
    pub gain_ratio: f64,
}

fn score_counts(parent: &ClassCounts, left: &ClassCounts) -> SplitScore {
    let right = ClassCounts(core::array::from_fn(|i| parent.0[i] - left.0[i]));
    let n = parent.total() as f64;
    let (nl, nr) = (left.total(), right.total());
    let info_gain = entropy(parent) - (nl as f64 / n) * entropy(left) - (nr as f64 / n) * entropy(&right);
    let split_info = two_way_entropy(nl, nr);
    SplitScore { info_gain, split_info, gain_ratio: info_gain / split_info }
}

/// Gain, split information and gain ratio of `attribute <= threshold`.
pub fn gain_ratio(rows: &[Sample], attribute: Variable, threshold: f64) -> Result<SplitScore> {
    let parent = ClassCounts::from_labels(rows.iter().map(|r| &r.label));
    let left = ClassCounts::from_labels(rows.iter().filter(|r| r.features[attribute.index()] <= threshold).map(|r| &r.label));
    if left.total() == 0 || left.total() == parent.total() {
        return Err(argument(format!("{attribute} <= {threshold} leaves one side empty")));
    }
    Ok(score_counts(&parent, &left))
}

/// Majority class; ties go to the class more frequent in the whole
/// training set, then to `e < g < b`.
pub fn majority(counts: &ClassCounts, global: &ClassCounts) -> ClassLabel {
    *ClassLabel::ALL
        .iter()
        .max_by(|a, b| counts[**a].cmp(&counts[**b]).then(global[**a].cmp(&global[**b])).then(b.cmp(a)))
        .expect("three classes")
}

/// A candidate split considered at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub attribute: Variable,
    /// Midpoint between consecutive distinct values.
    pub midpoint: f64,
    /// Largest observed value `<= midpoint`.
    pub threshold: f64,
    pub score: SplitScore,
}

/// Every admissible candidate at a node, in attribute then threshold order.
pub fn candidates(rows: &[&Sample], min_leaf: usize) -> Vec<Candidate> {
    let parent = ClassCounts::from_labels(rows.iter().map(|r| &r.label));
    let mut out = Vec::new();
    let mut order: Vec<&Sample> = rows.to_vec();
    for attribute in Variable::ALL {
        let a = attribute.index();
        order.sort_by(|x, y| x.features[a].total_cmp(&y.features[a]));
        let mut left = ClassCounts::default();
        for i in 0..order.len() - 1 {
            left[order[i].label] += 1;
            let (lo, hi) = (order[i].features[a], order[i + 1].features[a]);
            if lo == hi {
                continue;
            }
            let nl = i + 1;
            if nl < min_leaf || order.len() - nl < min_leaf {
                continue;
            }
            out.push(Candidate { attribute, midpoint: 0.5 * (lo + hi), threshold: lo, score: score_counts(&parent, &left) });
        }
    }
    out
}

/// Keeps positive-gain candidates whose gain reaches the mean, then takes the
/// best gain ratio. Ties follow the module-level order.
pub fn choose_split(cands: &[Candidate]) -> Option<Candidate> {
    let positive: Vec<&Candidate> = cands.iter().filter(|c| c.score.info_gain > SCORE_EPS).collect();
    if positive.is_empty() {
        return None;
    }
    let mean_gain = positive.iter().map(|c| c.score.info_gain).sum::<f64>() / positive.len() as f64;
    let eligible: Vec<&Candidate> = positive.into_iter().filter(|c| c.score.info_gain >= mean_gain - SCORE_EPS).collect();
    let best = eligible.iter().map(|c| c.score.gain_ratio).fold(f64::NEG_INFINITY, f64::max);
    eligible
        .into_iter()
        .filter(|c| c.score.gain_ratio >= best - SCORE_EPS)
        .min_by(|a, b| a.attribute.cmp(&b.attribute).then(a.threshold.total_cmp(&b.threshold)))
        .copied()
}

fn grow(rows: &[&Sample], global: &ClassCounts, p: &TreeParams) -> Node {
    let counts = ClassCounts::from_labels(rows.iter().map(|r| &r.label));
    let class = majority(&counts, global);
    let pure = counts.0.iter().filter(|&&c| c > 0).count() <= 1;
    if pure || rows.len() < 2 * p.min_leaf {
        return Node::leaf(class, counts);
    }
    let Some(best) = choose_split(&candidates(rows, p.min_leaf)) else {
        return Node::leaf(class, counts);
    };
    let a = best.attribute.index();
    let (left, right): (Vec<&Sample>, Vec<&Sample>) = rows.iter().partition(|r| r.features[a] <= best.threshold);
    Node::split(best.attribute, best.threshold, class, counts, grow(&left, global, p), grow(&right, global, p))
}

/// Unpruned tree.
pub fn build_c45(data: &Dataset, p: &TreeParams) -> Result<DecisionTree> {
    p.validate()?;
    let rows: Vec<&Sample> = data.rows().iter().collect();
    Ok(DecisionTree { root: grow(&rows, &data.class_counts(), p) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeStats {
    /// Recall per class, `None` when the class is absent from the data.
    pub recall: [Option<f64>; 3],
    /// Unweighted mean of the present classes' recalls.
    pub average_accuracy: f64,
    pub correct: usize,
    pub total: usize,
    pub leaf_count: usize,
    pub branch_count: usize,
}

impl TreeStats {
    pub fn recall_of(&self, class: ClassLabel) -> Option<f64> {
        self.recall[class.index()]
    }
}

pub fn tree_stats(tree: &DecisionTree, data: &Dataset) -> TreeStats {
    let mut hits = ClassCounts::default();
    let totals = data.class_counts();
    for r in data.rows() {
        if tree.classify_features(&r.features) == r.label {
            hits[r.label] += 1;
        }
    }
    let recall = core::array::from_fn(|i| (totals.0[i] > 0).then(|| hits.0[i] as f64 / totals.0[i] as f64));
    let present: Vec<f64> = recall.iter().flatten().copied().collect();
    TreeStats {
        recall,
        average_accuracy: present.iter().sum::<f64>() / present.len() as f64,
        correct: hits.total(),
        total: data.len(),
        leaf_count: tree.leaf_count(),
        branch_count: tree.branch_count(),
    }
}
