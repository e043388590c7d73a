//! Design rules: the root-to-leaf regions of a tree.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::doe::{assemble, stratified_unit, DesignSpace};
use crate::dtree::{DecisionTree, Node, NodeKind};
use crate::error::{argument, Error, Result};
use crate::geometry::{DesignPoint, Variable};
use crate::labeling::{label, ClassLabel, ObjectiveCriteria};
use crate::metrics::CrashMetrics;

/// `lower < x <= upper`; a missing bound is unconstrained.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lower.is_none_or(|lo| x > lo) && self.upper.is_none_or(|hi| x <= hi)
    }

    pub fn is_unconstrained(&self) -> bool {
        self.lower.is_none() && self.upper.is_none()
    }

    fn tighten_upper(&mut self, t: f64) {
        self.upper = Some(self.upper.map_or(t, |u| u.min(t)));
    }

    fn tighten_lower(&mut self, t: f64) {
        self.lower = Some(self.lower.map_or(t, |l| l.max(t)));
    }

    fn cmp_key(&self, other: &Self) -> Ordering {
        let lo = |i: &Interval| i.lower.unwrap_or(f64::NEG_INFINITY);
        let hi = |i: &Interval| i.upper.unwrap_or(f64::INFINITY);
        lo(self).total_cmp(&lo(other)).then(hi(self).total_cmp(&hi(other)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    /// One interval per variable, in [`Variable::ALL`] order.
    pub bounds: [Interval; 5],
    pub class: ClassLabel,
    /// Edges from the root to the leaf.
    pub path_len: usize,
    pub n_total: usize,
    pub n_errors: usize,
}

impl Rule {
    /// A rule with no conditions.
    pub fn unconstrained(class: ClassLabel) -> Self {
        Rule { bounds: [Interval::default(); 5], class, path_len: 0, n_total: 0, n_errors: 0 }
    }

    pub fn interval(&self, v: Variable) -> &Interval {
        &self.bounds[v.index()]
    }

    pub fn contains_features(&self, features: &[f64; 5]) -> bool {
        self.bounds.iter().zip(features).all(|(b, &x)| b.contains(x))
    }

    pub fn contains(&self, dp: &DesignPoint) -> bool {
        self.contains_features(&dp.features())
    }

    /// Leaf error rate; a leaf without support counts as always wrong.
    pub fn error_rate(&self) -> f64 {
        if self.n_total == 0 {
            1.0
        } else {
            self.n_errors as f64 / self.n_total as f64
        }
    }

    /// Conditions only, e.g. `d > 2, n > 2, m > 3`.
    pub fn conditions(&self) -> String {
        let parts: Vec<String> = Variable::ALL
            .iter()
            .filter_map(|&v| {
                let b = self.interval(v);
                match (b.lower, b.upper) {
                    (None, None) => None,
                    (Some(lo), None) => Some(format!("{v} > {lo}")),
                    (None, Some(hi)) => Some(format!("{v} <= {hi}")),
                    (Some(lo), Some(hi)) => Some(format!("{lo} < {v} <= {hi}")),
                }
            })
            .collect();
        if parts.is_empty() {
            "(any)".to_string()
        } else {
            parts.join(", ")
        }
    }

    /// Parses `d>2, n>2, m>3`-style conditions (`<=`, `>` and `a < x <= b`).
    pub fn parse(conditions: &str, class: ClassLabel) -> Result<Rule> {
        let mut rule = Rule::unconstrained(class);
        let text = conditions.trim();
        if text.is_empty() || text == "(any)" {
            return Ok(rule);
        }
        let number = |s: &str| s.trim().parse::<f64>().map_err(|_| argument(format!("bad number {s:?} in rule")));
        let var = |s: &str| Variable::from_name(s.trim()).ok_or_else(|| argument(format!("unknown variable {s:?} in rule")));
        for cond in text.split([',', '&']).map(str::trim).filter(|c| !c.is_empty()) {
            let cond = cond.replace(' ', "");
            if let Some((head, hi)) = cond.split_once("<=") {
                if let Some((lo, v)) = head.split_once('<') {
                    let b = &mut rule.bounds[var(v)?.index()];
                    b.tighten_lower(number(lo)?);
                    b.tighten_upper(number(hi)?);
                } else {
                    rule.bounds[var(head)?.index()].tighten_upper(number(hi)?);
                }
            } else if let Some((v, lo)) = cond.split_once('>') {
                rule.bounds[var(v)?.index()].tighten_lower(number(lo)?);
            } else {
                return Err(argument(format!("cannot parse rule condition {cond:?}")));
            }
            rule.path_len += 1;
        }
        Ok(rule)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} ({}/{})", self.conditions(), self.class, self.n_total, self.n_errors)
    }
}

fn walk(node: &Node, bounds: [Interval; 5], depth: usize, out: &mut Vec<Rule>) {
    match &node.kind {
        NodeKind::Leaf => out.push(Rule { bounds, class: node.class, path_len: depth, n_total: node.n_total(), n_errors: node.n_errors() }),
        NodeKind::Split { attribute, threshold, left, right } => {
            let mut lb = bounds;
            lb[attribute.index()].tighten_upper(*threshold);
            walk(left, lb, depth + 1, out);
            let mut rb = bounds;
            rb[attribute.index()].tighten_lower(*threshold);
            walk(right, rb, depth + 1, out);
        }
    }
}

/// One rule per leaf, left to right. Repeated conditions on an attribute are
/// merged into one interval.
pub fn extract_rules(tree: &DecisionTree) -> Vec<Rule> {
    let mut out = Vec::new();
    walk(&tree.root, [Interval::default(); 5], 0, &mut out);
    out
}

/// Shortest path first, then lowest leaf error rate, then largest support,
/// then interval order.
pub fn select_design_rule(rules: &[Rule], class: ClassLabel) -> Result<&Rule> {
    rules
        .iter()
        .filter(|r| r.class == class)
        .min_by(|a, b| {
            a.path_len
                .cmp(&b.path_len)
                .then(a.error_rate().total_cmp(&b.error_rate()))
                .then(b.n_total.cmp(&a.n_total))
                .then_with(|| a.bounds.iter().zip(&b.bounds).map(|(x, y)| x.cmp_key(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal))
        })
        .ok_or_else(|| Error::NotFound(format!("no rule predicts class {class}")))
}

/// Admissible values of one variable inside a rule.
enum Region {
    /// `(lo, hi]` when `open`, else `[lo, hi]`.
    Continuous {
        lo: f64,
        hi: f64,
        open: bool,
    },
    Integers(Vec<f64>),
}

fn region(rule: &Rule, space: &DesignSpace, v: Variable) -> Result<Region> {
    let r = space.range(v);
    let b = rule.interval(v);
    let empty = || Error::InfeasibleRule(format!("{} leaves no admissible {v}", rule.conditions()));
    if r.integer {
        let lo = libm::ceil(r.lower) as i64;
        let hi = libm::floor(r.upper) as i64;
        let values: Vec<f64> = (lo..=hi).map(|i| i as f64).filter(|&x| b.contains(x)).collect();
        if values.is_empty() {
            return Err(empty());
        }
        return Ok(Region::Integers(values));
    }
    let (lo, open) = match b.lower {
        Some(l) if l >= r.lower => (l, true),
        _ => (r.lower, false),
    };
    let hi = b.upper.map_or(r.upper, |u| u.min(r.upper));
    if hi < lo || (open && hi <= lo) {
        return Err(empty());
    }
    Ok(Region::Continuous { lo, hi, open })
}

/// `k` designs Latin-Hypercube-stratified inside the rule's region.
pub fn sample_within_rule(rule: &Rule, space: &DesignSpace, k: usize, seed: u64) -> Result<Vec<DesignPoint>> {
    space.validate()?;
    let regions: Vec<Region> = Variable::ALL.iter().map(|&v| region(rule, space, v)).collect::<Result<_>>()?;
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let columns: [Vec<f64>; 5] = core::array::from_fn(|i| {
        let positions = stratified_unit(&mut rng, k);
        match &regions[i] {
            Region::Integers(values) => {
                positions.into_iter().map(|p| values[((p * values.len() as f64) as usize).min(values.len() - 1)]).collect()
            }
            Region::Continuous { lo, hi, open } => positions
                .into_iter()
                .map(|p| {
                    let x = hi - p * (hi - lo);
                    if *open && x <= *lo {
                        libm::nextafter(*lo, f64::INFINITY).min(*hi)
                    } else {
                        x.clamp(*lo, *hi)
                    }
                })
                .collect(),
        }
    });
    Ok((0..k).map(|i| assemble(&columns, i)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub design: DesignPoint,
    pub metrics: CrashMetrics,
    pub actual: ClassLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub rule: Rule,
    pub rows: Vec<ValidationRow>,
    /// Fraction of rows whose actual class equals the rule's class.
    pub accuracy: f64,
}

impl ValidationReport {
    /// Labels already evaluated designs. Every design must satisfy the rule
    /// and the design box.
    pub fn from_evaluations(rule: &Rule, designs: &[DesignPoint], metrics: &[CrashMetrics], crit: &ObjectiveCriteria) -> Result<Self> {
        if designs.len() != metrics.len() {
            return Err(argument(format!("{} designs but {} metric records", designs.len(), metrics.len())));
        }
        if designs.is_empty() {
            return Err(argument("validation needs at least one design"));
        }
        let mut rows = Vec::with_capacity(designs.len());
        for (i, (dp, m)) in designs.iter().zip(metrics).enumerate() {
            dp.validate().map_err(|e| argument(format!("design {i}: {e}")))?;
            if !rule.contains(dp) {
                return Err(argument(format!("design {i} lies outside rule {}", rule.conditions())));
            }
            rows.push(ValidationRow { design: *dp, metrics: *m, actual: label(m, crit) });
        }
        let hits = rows.iter().filter(|r| r.actual == rule.class).count();
        Ok(ValidationReport { rule: rule.clone(), accuracy: hits as f64 / rows.len() as f64, rows })
    }

    pub fn matches(&self) -> usize {
        self.rows.iter().filter(|r| r.actual == self.rule.class).count()
    }
}

/// Samples `k` designs inside the rule and labels their evaluated metrics.
/// Evaluation runs in sample order. The first evaluation failure aborts with its index.
pub fn validate_rule<F, E>(
    rule: &Rule,
    space: &DesignSpace,
    k: usize,
    seed: u64,
    mut evaluate: F,
    crit: &ObjectiveCriteria,
) -> Result<ValidationReport>
where
    F: FnMut(&DesignPoint) -> core::result::Result<CrashMetrics, E>,
    E: fmt::Display,
{
    if k < 1 {
        return Err(argument("validation needs k >= 1"));
    }
    let designs = sample_within_rule(rule, space, k, seed)?;
    let metrics = designs
        .iter()
        .enumerate()
        .map(|(index, dp)| evaluate(dp).map_err(|e| Error::Evaluation { index, message: e.to_string() }))
        .collect::<Result<Vec<_>>>()?;
    ValidationReport::from_evaluations(rule, &designs, &metrics, crit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtree::Node;
    use crate::labeling::ClassCounts;
    use crate::labeling::ClassLabel::*;
    use crate::labeling::Objective;

    fn three_leaf_tree() -> DecisionTree {
        let leaf = |c, counts| Node::leaf(c, ClassCounts(counts));
        let inner = Node::split(Variable::N, 2.0, Excellent, ClassCounts([5, 2, 0]), leaf(General, [0, 2, 0]), leaf(Excellent, [5, 0, 0]));
        DecisionTree { root: Node::split(Variable::D, 2.0, Bad, ClassCounts([5, 2, 8]), leaf(Bad, [0, 0, 8]), inner) }
    }

    #[test]
    fn path_reading() {
        let rules = extract_rules(&three_leaf_tree());
        assert_eq!(rules.len(), 3);
        assert_eq!(rules[2].class, Excellent);
        assert_eq!(rules[2].conditions(), "d > 2, n > 2");
        assert_eq!(rules[2].path_len, 2);
        assert_eq!(rules[0].conditions(), "d <= 2");
        let single = DecisionTree { root: Node::leaf(Bad, ClassCounts([0, 0, 3])) };
        let r = extract_rules(&single);
        assert_eq!(r.len(), 1);
        assert!(r[0].bounds.iter().all(Interval::is_unconstrained));
    }

    #[test]
    fn repeated_conditions_merge() {
        let leaf = |c| Node::leaf(c, ClassCounts([1, 0, 0]));
        let deeper = Node::split(Variable::D, 2.5, Excellent, ClassCounts::default(), leaf(Excellent), leaf(Bad));
        let tree = DecisionTree { root: Node::split(Variable::D, 1.5, Excellent, ClassCounts::default(), leaf(Bad), deeper) };
        let rules = extract_rules(&tree);
        assert_eq!(rules[1].conditions(), "1.5 < d <= 2.5");
    }

    #[test]
    fn selection_chain() {
        let mut a = Rule::parse("d>2, n>2, m>3", Excellent).unwrap();
        a.n_total = 10;
        let mut b = Rule::parse("d>1, n>2, m>3, t<=1.7, h<=4", Excellent).unwrap();
        b.n_total = 30;
        assert_eq!(select_design_rule(&[b.clone(), a.clone()], Excellent).unwrap(), &a);
        let mut c = Rule::parse("d>2, n>3, m>3", Excellent).unwrap();
        c.n_total = 20;
        c.n_errors = 3;
        assert_eq!(select_design_rule(&[c.clone(), a.clone()], Excellent).unwrap(), &a);
        assert_eq!(select_design_rule(&[c.clone()], Excellent).unwrap(), &c);
        assert!(matches!(select_design_rule(&[c], Bad), Err(Error::NotFound(_))));
    }

    #[test]
    fn parse_forms() {
        let r = Rule::parse("1.5<d<=2, m>2, n<=4", General).unwrap();
        assert_eq!(r.interval(Variable::D), &Interval { lower: Some(1.5), upper: Some(2.0) });
        assert_eq!(r.interval(Variable::N).upper, Some(4.0));
        assert_eq!(r.path_len, 3);
        assert!(Rule::parse("q>1", General).is_err());
        assert!(Rule::parse("d=1", General).is_err());
    }

    #[test]
    fn sampling_inside_excellent_rule() {
        let rule = Rule::parse("d>2, n>2, m>3", Excellent).unwrap();
        let pts = sample_within_rule(&rule, &DesignSpace::default(), 5, 9).unwrap();
        assert_eq!(pts.len(), 5);
        for p in &pts {
            assert!(p.d > 2.0 && p.d <= 3.0);
            assert!((3..=6).contains(&p.n));
            assert!((4..=5).contains(&p.m));
            p.validate().unwrap();
        }
    }

    #[test]
    fn degenerate_and_empty_regions() {
        let rule = Rule::parse("d<=1", Bad).unwrap();
        for p in sample_within_rule(&rule, &DesignSpace::default(), 5, 1).unwrap() {
            assert_eq!(p.d, 1.0);
        }
        assert!(sample_within_rule(&rule, &DesignSpace::default(), 0, 1).unwrap().is_empty());
        let impossible = Rule::parse("d>3", Bad).unwrap();
        assert!(matches!(sample_within_rule(&impossible, &DesignSpace::default(), 3, 1), Err(Error::InfeasibleRule(_))));
        let no_int = Rule::parse("m>5", Bad).unwrap();
        assert!(sample_within_rule(&no_int, &DesignSpace::default(), 3, 1).is_err());
    }

    #[test]
    fn adversarial_validation_scores_zero() {
        let rule = Rule::parse("d>2", Excellent).unwrap();
        let crit = ObjectiveCriteria::new(Objective::Efficiency);
        let report = validate_rule(
            &rule,
            &DesignSpace::default(),
            4,
            3,
            |_dp: &DesignPoint| Ok::<_, Error>(CrashMetrics { tea: 1.0, sea: 1.0, pm: 1.0, pcf: 1.0, cfe: 1.0, mass: 1.0, z: 1.0 }),
            &crit,
        )
        .unwrap();
        assert_eq!(report.accuracy, 0.0);
        assert_eq!(report.rows.len(), 4);
        let failing = validate_rule(
            &rule,
            &DesignSpace::default(),
            4,
            3,
            |dp: &DesignPoint| {
                if dp.n == 3 {
                    Err("boom")
                } else {
                    Ok(CrashMetrics { tea: 1.0, sea: 1.0, pm: 1.0, pcf: 1.0, cfe: 1.0, mass: 1.0, z: 1.0 })
                }
            },
            &crit,
        );
        match failing {
            Err(Error::Evaluation { message, .. }) => assert_eq!(message, "boom"),
            Ok(r) => assert!(r.rows.iter().all(|row| row.design.n != 3)),
            Err(e) => panic!("unexpected {e}"),
        }
        assert!(validate_rule(&rule, &DesignSpace::default(), 0, 3, |_: &DesignPoint| Err::<CrashMetrics, _>("x"), &crit).is_err());
    }
}
