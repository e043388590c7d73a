//! Confidence-factor pessimistic pruning (subtree replacement only).

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{majority, tree_stats, Dataset, DecisionTree, Node, NodeKind, Sample, TreeParams, TreeStats};
use crate::labeling::ClassCounts;

/// Confidence factors tried, in order, when the requested one breaks the
/// accuracy floor.
pub const CF_LADDER: [f64; 4] = [0.25, 0.10, 0.05, 0.01];

fn ln_binomial(n: usize, k: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)
}

/// `P(X <= errors)` for `X ~ Binomial(n, p)`.
fn binomial_cdf(errors: usize, n: usize, p: f64) -> f64 {
    if p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return if errors >= n { 1.0 } else { 0.0 };
    }
    let (lp, lq) = (libm::log(p), libm::log1p(-p));
    (0..=errors).map(|k| libm::exp(ln_binomial(n, k) + k as f64 * lp + (n - k) as f64 * lq)).sum::<f64>().min(1.0)
}

/// Upper confidence limit `U_cf(E, N)` on the error rate of a leaf with `n`
/// rows and `errors` misclassified: the `p` at which `P(X <= E) = cf`.
pub fn pessimistic_error_rate(errors: usize, n: usize, cf: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if errors >= n {
        return 1.0;
    }
    if errors == 0 {
        return 1.0 - libm::pow(cf, 1.0 / n as f64);
    }
    // the CDF falls monotonically in p
    let (mut lo, mut hi) = (errors as f64 / n as f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if binomial_cdf(errors, n, mid) > cf {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn leaf_estimate(counts: &ClassCounts, errors: usize, cf: f64) -> f64 {
    let n = counts.total();
    n as f64 * pessimistic_error_rate(errors, n, cf)
}

/// Reroutes `rows` through the tree, refreshing every node's counts and the
/// majority class of internal nodes. Leaf predictions are kept.
fn recount(node: &mut Node, rows: &[&Sample], global: &ClassCounts) {
    node.counts = ClassCounts::from_labels(rows.iter().map(|r| &r.label));
    if let NodeKind::Split { attribute, threshold, left, right } = &mut node.kind {
        let a = attribute.index();
        let (l, r): (Vec<&Sample>, Vec<&Sample>) = rows.iter().partition(|s| s.features[a] <= *threshold);
        recount(left, &l, global);
        recount(right, &r, global);
        node.class = majority(&node.counts, global);
    }
}

/// Returns the summed leaf estimate of the (possibly collapsed) subtree.
fn prune_node(node: &mut Node, cf: f64) -> f64 {
    let NodeKind::Split { left, right, .. } = &mut node.kind else {
        return leaf_estimate(&node.counts, node.n_errors(), cf);
    };
    let subtree = prune_node(left, cf) + prune_node(right, cf);
    let as_leaf = leaf_estimate(&node.counts, node.n_errors(), cf);
    if as_leaf <= subtree {
        node.kind = NodeKind::Leaf;
        as_leaf
    } else {
        subtree
    }
}

/// Bottom-up subtree replacement: a subtree becomes a majority leaf when the
/// leaf's estimated errors `N * U_cf(E, N)` do not exceed the sum over its
/// leaves.
pub fn prune(tree: &DecisionTree, data: &Dataset, cf: f64) -> DecisionTree {
    let mut root = tree.root.clone();
    let rows: Vec<&Sample> = data.rows().iter().collect();
    recount(&mut root, &rows, &data.class_counts());
    prune_node(&mut root, cf);
    DecisionTree { root }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruneAttempt {
    pub cf: f64,
    pub leaf_count: usize,
    pub average_accuracy: f64,
    pub meets_floor: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PruneOutcome {
    pub tree: DecisionTree,
    /// Confidence factor of the kept tree; `None` means the unpruned tree
    /// was kept because no attempt met the floor.
    pub cf: Option<f64>,
    pub attempts: Vec<PruneAttempt>,
    pub stats: TreeStats,
}

/// Prunes with `p.cf`; if the average recall drops below
/// `p.min_avg_accuracy`, retries every smaller value of [`CF_LADDER`] and
/// keeps the most pruned tree that meets the floor (ties: larger cf), or the
/// unpruned tree when none does.
pub fn prune_with_floor(tree: &DecisionTree, data: &Dataset, p: &TreeParams) -> PruneOutcome {
    let mut attempts = Vec::new();
    let mut try_cf = |cf: f64| {
        let pruned = prune(tree, data, cf);
        let stats = tree_stats(&pruned, data);
        attempts.push(PruneAttempt {
            cf,
            leaf_count: stats.leaf_count,
            average_accuracy: stats.average_accuracy,
            meets_floor: stats.average_accuracy >= p.min_avg_accuracy,
        });
        (pruned, stats)
    };

    let (first, first_stats) = try_cf(p.cf);
    if first_stats.average_accuracy >= p.min_avg_accuracy {
        return PruneOutcome { tree: first, cf: Some(p.cf), attempts, stats: first_stats };
    }
    let mut best: Option<(f64, DecisionTree, TreeStats)> = None;
    for cf in CF_LADDER.into_iter().filter(|&cf| cf < p.cf) {
        let (pruned, stats) = try_cf(cf);
        if stats.average_accuracy < p.min_avg_accuracy {
            continue;
        }
        if best.as_ref().is_none_or(|(_, _, s)| stats.leaf_count < s.leaf_count) {
            best = Some((cf, pruned, stats));
        }
    }
    match best {
        Some((cf, tree, stats)) => PruneOutcome { tree, cf: Some(cf), attempts, stats },
        None => {
            let stats = tree_stats(tree, data);
            PruneOutcome { tree: tree.clone(), cf: None, attempts, stats }
        }
    }
}
