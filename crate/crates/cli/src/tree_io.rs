//! Tree exports. The JSON form can be read back; text and DOT are for people
//! and Graphviz.

use std::collections::HashMap;
use std::fmt::Write as _;

use lft_core::dtree::{Node, NodeKind, PruneAttempt, TreeStats};
use lft_core::labeling::ClassCounts;
use lft_core::{ClassLabel, DecisionTree, Objective, Variable};
use serde::{Deserialize, Serialize};

fn leaf_text(node: &Node) -> String {
    format!("{} ({:.1}/{:.1})", node.class, node.n_total() as f64, node.n_errors() as f64)
}

/// One line per branch in the J48 style:
///
/// ```text
/// d <= 2
/// |   n <= 4: b (5.0/0.0)
/// |   n > 4: g (5.0/2.0)
/// d > 2: e (5.0/0.0)
/// ```
pub fn to_text(tree: &DecisionTree) -> String {
    fn branch(out: &mut String, depth: usize, cond: String, child: &Node) {
        let indent = "|   ".repeat(depth);
        if child.is_leaf() {
            let _ = writeln!(out, "{indent}{cond}: {}", leaf_text(child));
        } else {
            let _ = writeln!(out, "{indent}{cond}");
            visit(out, child, depth + 1);
        }
    }
    fn visit(out: &mut String, node: &Node, depth: usize) {
        if let NodeKind::Split { attribute, threshold, left, right } = &node.kind {
            branch(out, depth, format!("{attribute} <= {threshold}"), left);
            branch(out, depth, format!("{attribute} > {threshold}"), right);
        }
    }
    let mut out = String::new();
    if tree.root.is_leaf() {
        let _ = writeln!(out, ": {}", leaf_text(&tree.root));
    } else {
        visit(&mut out, &tree.root, 0);
    }
    let _ = writeln!(out, "\nNumber of Leaves  : {}\nSize of the tree  : {}", tree.leaf_count(), 2 * tree.leaf_count() - 1);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonNode {
    pub id: usize,
    /// Prediction for leaves, majority class for internal nodes.
    pub class: ClassLabel,
    pub counts: ClassCounts,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub attribute: Option<Variable>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `attribute <= threshold`
    Le,
    /// `attribute > threshold`
    Gt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonEdge {
    pub from: usize,
    pub to: usize,
    pub branch: Branch,
}

/// Serialized tree together with how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeDocument {
    pub objective: Objective,
    pub pruned: bool,
    /// Confidence factor of the kept pruning, if any.
    pub cf: Option<f64>,
    #[serde(default)]
    pub prune_attempts: Vec<PruneAttempt>,
    pub stats: TreeStats,
    pub nodes: Vec<JsonNode>,
    pub edges: Vec<JsonEdge>,
}

/// Pre-order node list and parent-to-child edges; the root has id 0.
pub fn flatten(tree: &DecisionTree) -> (Vec<JsonNode>, Vec<JsonEdge>) {
    fn visit(node: &Node, nodes: &mut Vec<JsonNode>, edges: &mut Vec<JsonEdge>) -> usize {
        let id = nodes.len();
        let (attribute, threshold) = match &node.kind {
            NodeKind::Split { attribute, threshold, .. } => (Some(*attribute), Some(*threshold)),
            NodeKind::Leaf => (None, None),
        };
        nodes.push(JsonNode { id, class: node.class, counts: node.counts, attribute, threshold });
        if let NodeKind::Split { left, right, .. } = &node.kind {
            let l = visit(left, nodes, edges);
            edges.push(JsonEdge { from: id, to: l, branch: Branch::Le });
            let r = visit(right, nodes, edges);
            edges.push(JsonEdge { from: id, to: r, branch: Branch::Gt });
        }
        id
    }
    let (mut nodes, mut edges) = (Vec::new(), Vec::new());
    visit(&tree.root, &mut nodes, &mut edges);
    (nodes, edges)
}

impl TreeDocument {
    pub fn new(
        objective: Objective,
        tree: &DecisionTree,
        stats: TreeStats,
        pruned: bool,
        cf: Option<f64>,
        attempts: Vec<PruneAttempt>,
    ) -> Self {
        let (nodes, edges) = flatten(tree);
        TreeDocument { objective, pruned, cf, prune_attempts: attempts, stats, nodes, edges }
    }

    /// Rebuilds the tree. Every split node needs exactly one `le` and one
    /// `gt` edge and every other node must be reachable once.
    pub fn to_tree(&self) -> Result<DecisionTree, String> {
        let by_id: HashMap<usize, &JsonNode> = self.nodes.iter().map(|n| (n.id, n)).collect();
        if by_id.len() != self.nodes.len() {
            return Err("duplicate node ids".into());
        }
        let mut children: HashMap<usize, [Option<usize>; 2]> = HashMap::new();
        for e in &self.edges {
            let slot = &mut children.entry(e.from).or_default()[(e.branch == Branch::Gt) as usize];
            if slot.replace(e.to).is_some() {
                return Err(format!("node {} has two {:?} edges", e.from, e.branch));
            }
        }
        fn build(
            id: usize,
            by_id: &HashMap<usize, &JsonNode>,
            children: &HashMap<usize, [Option<usize>; 2]>,
            seen: &mut usize,
        ) -> Result<Node, String> {
            *seen += 1;
            if *seen > by_id.len() {
                return Err("edges form a cycle".into());
            }
            let n = by_id.get(&id).ok_or_else(|| format!("edge to unknown node {id}"))?;
            match (n.attribute, n.threshold, children.get(&id)) {
                (None, None, None) => Ok(Node::leaf(n.class, n.counts)),
                (Some(a), Some(t), Some([Some(l), Some(r)])) => {
                    let left = build(*l, by_id, children, seen)?;
                    let right = build(*r, by_id, children, seen)?;
                    Ok(Node::split(a, t, n.class, n.counts, left, right))
                }
                _ => Err(format!("node {id} is neither a complete split nor a leaf")),
            }
        }
        let mut seen = 0;
        let root = build(0, &by_id, &children, &mut seen)?;
        if seen != self.nodes.len() {
            return Err(format!("{} nodes unreachable from the root", self.nodes.len() - seen));
        }
        Ok(DecisionTree { root })
    }
}

pub fn to_dot(tree: &DecisionTree, name: &str) -> String {
    let (nodes, edges) = flatten(tree);
    let mut out = format!("digraph \"{name}\" {{\n  node [fontname=\"Helvetica\"];\n");
    for n in &nodes {
        match (n.attribute, n.threshold) {
            (Some(a), _) => {
                let _ = writeln!(out, "  n{} [label=\"{a}\", shape=ellipse];", n.id);
            }
            _ => {
                let total: usize = n.counts.total();
                let errors = total - n.counts[n.class];
                let _ = writeln!(out, "  n{} [label=\"{} ({:.1}/{:.1})\", shape=box];", n.id, n.class, total as f64, errors as f64);
            }
        }
    }
    for e in &edges {
        let t = nodes[e.from].threshold.expect("edge leaves a split");
        let op = match e.branch {
            Branch::Le => "<=",
            Branch::Gt => ">",
        };
        let _ = writeln!(out, "  n{} -> n{} [label=\"{op} {t}\"];", e.from, e.to);
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use lft_core::dtree::tree_stats;
    use lft_core::{build_c45, Dataset, Sample, TreeParams};
    use ClassLabel::*;

    fn sample_tree() -> (DecisionTree, Dataset) {
        let row = |d: f64, n: f64, label| Sample { features: [d, n, 3.0, 1.0, 0.0], label };
        let data = Dataset::new(vec![
            row(1.0, 2.0, Bad),
            row(1.5, 3.0, Bad),
            row(1.2, 5.0, General),
            row(1.8, 6.0, General),
            row(2.5, 3.0, Excellent),
            row(2.8, 4.0, Excellent),
        ])
        .unwrap();
        let tree = build_c45(&data, &TreeParams { min_leaf: 1, ..Default::default() }).unwrap();
        (tree, data)
    }

    #[test]
    fn json_round_trip() {
        let (tree, data) = sample_tree();
        let doc = TreeDocument::new(Objective::Efficiency, &tree, tree_stats(&tree, &data), false, None, vec![]);
        let text = serde_json::to_string(&doc).unwrap();
        let back: TreeDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_tree().unwrap(), tree);
        assert_eq!(doc.edges.len(), doc.nodes.len() - 1);
    }

    #[test]
    fn text_form() {
        let (tree, _) = sample_tree();
        let text = to_text(&tree);
        assert!(text.starts_with("d <= "), "{text}");
        assert!(text.contains("e (2.0/0.0)"));
        assert!(text.contains("|   n "));
    }

    #[test]
    fn dot_form() {
        let (tree, _) = sample_tree();
        let dot = to_dot(&tree, "eff");
        assert!(dot.starts_with("digraph"));
        assert_eq!(dot.matches("->").count(), 2 * (tree.leaf_count() - 1));
        assert!(dot.trim_end().ends_with('}'));
    }

    #[test]
    fn broken_document_is_rejected() {
        let (tree, data) = sample_tree();
        let mut doc = TreeDocument::new(Objective::Efficiency, &tree, tree_stats(&tree, &data), false, None, vec![]);
        doc.edges.pop();
        assert!(doc.to_tree().is_err());
    }
}
