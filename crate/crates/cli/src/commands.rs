//! Stage entry points. Each reads its inputs from files so it can run on
//! its own; `pipeline` chains them.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use lft_core::dtree::{prune_with_floor, tree_stats, PruneOutcome};
use lft_core::evaluate::DesignEvaluation;
use lft_core::labeling::{label, ClassCounts};
use lft_core::rules::{sample_within_rule, ValidationReport};
use lft_core::{
    build_c45, extract_rules, lhs_sample, select_design_rule, ClassLabel, Dataset, DesignPoint, Error, Objective, Rule, Sample, TreeParams,
    Variable,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::error::{CliError, CliResult, StageExt};
use crate::io::{self, DatasetRow};
use crate::report::{self, BaselineSource, HollowSummary};
use crate::svg;
use crate::tree_io::{to_dot, to_text, TreeDocument};

/// File names inside the output directory.
#[derive(Debug, Clone)]
pub struct Layout {
    pub dir: PathBuf,
}

impl Layout {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Layout { dir: dir.into() }
    }

    pub fn file(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn designs(&self) -> PathBuf {
        self.file("designs.csv")
    }

    pub fn dataset(&self) -> PathBuf {
        self.file("dataset.csv")
    }

    /// `tree_<obj>[_unpruned].<ext>`
    pub fn tree(&self, objective: Objective, pruned: bool, ext: &str) -> PathBuf {
        let suffix = if pruned { "" } else { "_unpruned" };
        self.file(&format!("tree_{}{suffix}.{ext}", objective.short()))
    }

    pub fn rules(&self) -> PathBuf {
        self.file("rules.json")
    }

    pub fn rules_table(&self, objective: Objective) -> PathBuf {
        self.file(&format!("rules_{}.txt", objective.short()))
    }

    pub fn validation(&self, objective: Objective) -> PathBuf {
        self.file(&format!("validation_{}.csv", objective.short()))
    }

    pub fn manifest(&self) -> PathBuf {
        self.file("manifest.json")
    }
}

/// Runtime knobs that never change results.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads for evaluation; `None` uses every core.
    pub jobs: Option<usize>,
    /// Where to write one force trace per evaluated design.
    pub trace_dir: Option<PathBuf>,
}

/// Evaluates designs in parallel. Results keep input order, and the error
/// reported is the one with the lowest design index.
pub fn evaluate_all(cfg: &PipelineConfig, designs: &[DesignPoint], jobs: Option<usize>) -> CliResult<Vec<DesignEvaluation>> {
    let setup = cfg.setup();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Argument(format!("thread pool: {e}")))?;
    let results: Vec<lft_core::Result<DesignEvaluation>> = pool.install(|| designs.par_iter().map(|dp| setup.evaluate(dp)).collect());
    results
        .into_iter()
        .enumerate()
        .map(|(index, r)| r.map_err(|e| Error::Evaluation { index, message: e.to_string() }))
        .collect::<lft_core::Result<_>>()
        .stage("evaluate")
}

pub fn cmd_sample(cfg: &PipelineConfig) -> CliResult<Vec<DesignPoint>> {
    cfg.validate()?;
    let designs = lhs_sample(&cfg.design_space, cfg.k, cfg.seed).stage("sample")?;
    io::write_designs(&Layout::new(&cfg.out_dir).designs(), &designs)?;
    Ok(designs)
}

pub fn cmd_evaluate(cfg: &PipelineConfig, opts: &RunOptions, input: Option<&Path>) -> CliResult<Vec<DatasetRow>> {
    cfg.validate()?;
    let layout = Layout::new(&cfg.out_dir);
    let designs = io::read_designs(input.map_or(layout.designs(), Path::to_path_buf).as_path())?;
    let evals = evaluate_all(cfg, &designs, opts.jobs)?;
    if let Some(dir) = &opts.trace_dir {
        for (i, e) in evals.iter().enumerate() {
            io::write_trace(&dir.join(format!("design_{i}.csv")), &e.trace)?;
        }
    }
    let rows: Vec<DatasetRow> = evals.iter().enumerate().map(|(i, e)| DatasetRow::new(i, e.design, &e.geometry, e.metrics)).collect();
    io::write_dataset(&layout.dataset(), &rows)?;
    Ok(rows)
}

/// Fills all three label columns in place and returns the class counts per
/// objective.
pub fn label_rows(cfg: &PipelineConfig, rows: &mut [DatasetRow]) -> Vec<(Objective, ClassCounts)> {
    Objective::ALL
        .iter()
        .enumerate()
        .map(|(slot, &o)| {
            let crit = cfg.criteria(o);
            for r in rows.iter_mut() {
                r.labels[slot] = Some(label(&r.metrics, &crit));
            }
            (o, ClassCounts::from_labels(rows.iter().filter_map(|r| r.labels[slot].as_ref())))
        })
        .collect()
}

pub fn cmd_label(cfg: &PipelineConfig, input: Option<&Path>) -> CliResult<Vec<(Objective, ClassCounts)>> {
    cfg.validate()?;
    let layout = Layout::new(&cfg.out_dir);
    let mut rows = io::read_dataset(input.map_or(layout.dataset(), Path::to_path_buf).as_path())?;
    let counts = label_rows(cfg, &mut rows);
    io::write_dataset(&layout.dataset(), &rows)?;
    Ok(counts)
}

fn training_set(path: &Path, objective: Objective) -> CliResult<Dataset> {
    let rows = io::read_training_rows(path, objective)?;
    Dataset::new(rows.iter().map(|(dp, l)| Sample::from_design(dp, *l)).collect())
        .map_err(|e| CliError::schema(path, format!("{}: {e}", io::label_column(objective))))
}

fn write_tree(layout: &Layout, doc: &TreeDocument, tree: &lft_core::DecisionTree) -> CliResult<()> {
    let (o, pruned) = (doc.objective, doc.pruned);
    io::write_atomic(&layout.tree(o, pruned, "txt"), to_text(tree).as_bytes())?;
    io::write_json(&layout.tree(o, pruned, "json"), doc)?;
    io::write_atomic(&layout.tree(o, pruned, "dot"), to_dot(tree, &format!("tree_{}", o.short())).as_bytes())
}

fn read_tree(path: &Path) -> CliResult<(TreeDocument, lft_core::DecisionTree)> {
    let doc: TreeDocument = io::read_json(path)?;
    let tree = doc.to_tree().map_err(|e| CliError::schema(path, e))?;
    Ok((doc, tree))
}

pub fn cmd_train(cfg: &PipelineConfig, objectives: &[Objective], input: Option<&Path>) -> CliResult<Vec<TreeDocument>> {
    cfg.tree.validate().stage("train")?;
    let layout = Layout::new(&cfg.out_dir);
    let path = input.map_or(layout.dataset(), Path::to_path_buf);
    objectives
        .iter()
        .map(|&o| {
            let data = training_set(&path, o)?;
            let tree = build_c45(&data, &cfg.tree).stage("train")?;
            let doc = TreeDocument::new(o, &tree, tree_stats(&tree, &data), false, None, Vec::new());
            write_tree(&layout, &doc, &tree)?;
            Ok(doc)
        })
        .collect()
}

pub fn cmd_prune(cfg: &PipelineConfig, objectives: &[Objective], cf: Option<f64>, input: Option<&Path>) -> CliResult<Vec<TreeDocument>> {
    let params = TreeParams { cf: cf.unwrap_or(cfg.tree.cf), ..cfg.tree };
    params.validate().stage("prune")?;
    let layout = Layout::new(&cfg.out_dir);
    let path = input.map_or(layout.dataset(), Path::to_path_buf);
    objectives
        .iter()
        .map(|&o| {
            let (_, unpruned) = read_tree(&layout.tree(o, false, "json"))?;
            let data = training_set(&path, o)?;
            let PruneOutcome { tree, cf, attempts, stats } = prune_with_floor(&unpruned, &data, &params);
            let doc = TreeDocument::new(o, &tree, stats, true, cf, attempts);
            write_tree(&layout, &doc, &tree)?;
            Ok(doc)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleEntry {
    pub conditions: String,
    #[serde(flatten)]
    pub rule: Rule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedRule {
    pub class: ClassLabel,
    /// Position in `rules`; `None` when no leaf predicts the class.
    pub index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveRules {
    pub objective: Objective,
    pub rules: Vec<RuleEntry>,
    pub selected: Vec<SelectedRule>,
}

impl ObjectiveRules {
    pub fn selected_rules(&self) -> impl Iterator<Item = &Rule> {
        self.selected.iter().filter_map(|s| s.index.map(|i| &self.rules[i].rule))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RulesDocument {
    pub objectives: Vec<ObjectiveRules>,
}

impl RulesDocument {
    pub fn get(&self, objective: Objective) -> Option<&ObjectiveRules> {
        self.objectives.iter().find(|o| o.objective == objective)
    }

    /// Replaces or adds one objective, keeping objectives in canonical order.
    pub fn upsert(&mut self, entry: ObjectiveRules) {
        self.objectives.retain(|o| o.objective != entry.objective);
        self.objectives.push(entry);
        self.objectives.sort_by_key(|o| o.objective);
    }
}

pub fn rules_for(objective: Objective, tree: &lft_core::DecisionTree) -> ObjectiveRules {
    let rules = extract_rules(tree);
    let selected = ClassLabel::ALL
        .iter()
        .map(|&class| SelectedRule {
            class,
            index: select_design_rule(&rules, class).ok().map(|r| rules.iter().position(|x| std::ptr::eq(x, r)).expect("rule from slice")),
        })
        .collect();
    ObjectiveRules { objective, rules: rules.into_iter().map(|rule| RuleEntry { conditions: rule.conditions(), rule }).collect(), selected }
}

/// One line per rule: conditions, class, support and leaf error rate. The
/// selected design rule of each class is starred.
pub fn rules_table(entry: &ObjectiveRules) -> String {
    let chosen: Vec<usize> = entry.selected.iter().filter_map(|s| s.index).collect();
    let width = entry.rules.iter().map(|r| r.conditions.len()).max().unwrap_or(0).max("conditions".len());
    let mut out = format!("  {:<width$}  class  support  error_rate\n", "conditions");
    for (i, r) in entry.rules.iter().enumerate() {
        let mark = if chosen.contains(&i) { '*' } else { ' ' };
        out.push_str(&format!(
            "{mark} {:<width$}  {:<5}  {:>7}  {:>10.4}\n",
            r.conditions,
            r.rule.class.as_str(),
            r.rule.n_total,
            r.rule.error_rate()
        ));
    }
    out
}

pub fn cmd_rules(cfg: &PipelineConfig, objectives: &[Objective]) -> CliResult<RulesDocument> {
    let layout = Layout::new(&cfg.out_dir);
    let mut doc: RulesDocument = if layout.rules().exists() { io::read_json(&layout.rules())? } else { RulesDocument::default() };
    for &o in objectives {
        let (_, tree) = read_tree(&layout.tree(o, true, "json"))?;
        let entry = rules_for(o, &tree);
        io::write_atomic(&layout.rules_table(o), rules_table(&entry).as_bytes())?;
        doc.upsert(entry);
    }
    io::write_json(&layout.rules(), &doc)?;
    Ok(doc)
}

fn secondary_column(objective: Objective) -> &'static str {
    match objective {
        Objective::Efficiency => "cfe_pct",
        Objective::TotalEa => "tea_kj",
        Objective::Lightweight => "mass_kg",
    }
}

pub const VALIDATION_HEADER: [&str; 9] = ["rule", "rule_class", "no", "d_mm", "n", "m", "h_mm", "t_mm", "sea_kj_per_kg"];

/// Validation rows in the printed table layout: rule, number, the five
/// variables, SEA, the objective's second index and the actual label.
pub fn validation_bytes(objective: Objective, reports: &[ValidationReport]) -> Vec<u8> {
    let mut header: Vec<&str> = VALIDATION_HEADER.to_vec();
    header.extend([secondary_column(objective), "actual_label"]);
    let rows = reports.iter().flat_map(|rep| {
        rep.rows.iter().enumerate().map(move |(i, row)| {
            let d = &row.design;
            vec![
                rep.rule.conditions(),
                rep.rule.class.to_string(),
                (i + 1).to_string(),
                d.d.to_string(),
                d.n.to_string(),
                d.m.to_string(),
                d.h.to_string(),
                d.t.to_string(),
                row.metrics.sea.to_string(),
                objective.secondary(&row.metrics).to_string(),
                row.actual.to_string(),
            ]
        })
    });
    io::csv_bytes(&header, rows)
}

/// Seed for the validation sample of one rule, distinct per objective and
/// class.
pub fn validation_seed(seed: u64, objective: Objective, class: ClassLabel) -> u64 {
    seed.wrapping_add(1 + 3 * io::objective_slot(objective) as u64 + class.index() as u64)
}

pub fn validate_one(cfg: &PipelineConfig, objective: Objective, rule: &Rule, k: usize, jobs: Option<usize>) -> CliResult<ValidationReport> {
    if k < 1 {
        return Err(CliError::Argument("validation needs at least one design per rule".into()));
    }
    let designs = sample_within_rule(rule, &cfg.design_space, k, validation_seed(cfg.seed, objective, rule.class)).stage("validate")?;
    let metrics: Vec<_> = evaluate_all(cfg, &designs, jobs)?.into_iter().map(|e| e.metrics).collect();
    ValidationReport::from_evaluations(rule, &designs, &metrics, &cfg.criteria(objective)).stage("validate")
}

/// Validates the selected rules of each objective from `rules.json`, or the
/// single `explicit` rule for the first objective.
pub fn cmd_validate(
    cfg: &PipelineConfig,
    objectives: &[Objective],
    explicit: Option<&Rule>,
    opts: &RunOptions,
) -> CliResult<Vec<(Objective, Vec<ValidationReport>)>> {
    cfg.validate()?;
    let layout = Layout::new(&cfg.out_dir);
    let plan: Vec<(Objective, Vec<Rule>)> = match explicit {
        Some(rule) => {
            let o = *objectives.first().ok_or_else(|| CliError::Argument("an objective is required".into()))?;
            vec![(o, vec![rule.clone()])]
        }
        None => {
            let doc: RulesDocument = io::read_json(&layout.rules())?;
            objectives
                .iter()
                .map(|&o| {
                    let entry = doc.get(o).ok_or_else(|| CliError::schema(&layout.rules(), format!("no rules for objective {o}")))?;
                    Ok((o, entry.selected_rules().cloned().collect()))
                })
                .collect::<CliResult<_>>()?
        }
    };
    plan.into_iter()
        .map(|(o, rules)| {
            let reports = rules.iter().map(|r| validate_one(cfg, o, r, cfg.validation_k, opts.jobs)).collect::<CliResult<Vec<_>>>()?;
            io::write_atomic(&layout.validation(o), &validation_bytes(o, &reports))?;
            Ok((o, reports))
        })
        .collect()
}

pub struct SweepOutput {
    pub csv: PathBuf,
    pub svg: PathBuf,
    pub points: Vec<(f64, f64)>,
}

pub fn cmd_sweep(
    cfg: &PipelineConfig,
    variable: Variable,
    fixed: &DesignPoint,
    points: usize,
    opts: &RunOptions,
) -> CliResult<SweepOutput> {
    cfg.validate()?;
    let grid = report::sweep_grid(&cfg.design_space, variable, fixed, points)?;
    let evals = evaluate_all(cfg, &grid, opts.jobs)?;
    let data: Vec<(f64, f64)> = evals.iter().map(|e| (e.design.get(variable), e.metrics.sea)).collect();
    let layout = Layout::new(&cfg.out_dir);
    let col = report::variable_column(variable);
    let csv = layout.file(&format!("sweep_{variable}.csv"));
    let svg_path = layout.file(&format!("sweep_{variable}.svg"));
    io::write_atomic(&csv, &io::csv_bytes(&[col, "sea_kj_per_kg"], data.iter().map(|(x, y)| vec![x.to_string(), y.to_string()])))?;
    let title = format!("SEA against {variable}");
    io::write_atomic(&svg_path, svg::scatter(&title, col, "SEA (kJ/kg)", &data).as_bytes())?;
    Ok(SweepOutput { csv, svg: svg_path, points: data })
}

pub fn cmd_hollow_report(cfg: &PipelineConfig, use_reference: bool, input: Option<&Path>) -> CliResult<HollowSummary> {
    cfg.validate()?;
    let layout = Layout::new(&cfg.out_dir);
    let rows = io::read_dataset(input.map_or(layout.dataset(), Path::to_path_buf).as_path())?;
    let source = if use_reference { BaselineSource::Reference } else { BaselineSource::Surrogate };
    let hollow = report::hollow_rows(&rows, &cfg.setup(), source)?;
    let header = ["index", "t_mm", "sea_kj_per_kg", "baseline_sea_kj_per_kg", "increase_pct"];
    let records = hollow
        .iter()
        .map(|h| vec![h.index.to_string(), h.t_mm.to_string(), h.sea.to_string(), h.baseline.to_string(), h.increase_pct.to_string()]);
    io::write_atomic(&layout.file("hollow_report.csv"), &io::csv_bytes(&header, records))?;
    let bars: Vec<(String, f64)> = hollow.iter().map(|h| (h.index.to_string(), h.increase_pct)).collect();
    let chart = svg::bars("SEA change over the hollow tube", "design index", "increase (%)", &bars);
    io::write_atomic(&layout.file("hollow_report.svg"), chart.as_bytes())?;
    let summary = report::summarize(&hollow, source);
    io::write_json(&layout.file("hollow_summary.json"), &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeRecord {
    pub objective: Objective,
    pub unpruned_leaves: usize,
    pub leaves: usize,
    pub cf: Option<f64>,
    pub average_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRecord {
    pub objective: Objective,
    pub class: ClassLabel,
    pub rule: String,
    pub designs: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact_version: String,
    pub seed: u64,
    pub config: PipelineConfig,
    pub stages: Vec<StageRecord>,
    pub label_counts: Vec<(Objective, ClassCounts)>,
    pub trees: Vec<TreeRecord>,
    pub validation: Vec<ValidationRecord>,
    pub files: Vec<String>,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
}

fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis())
}

/// Runs every stage in order and finishes with the manifest.
pub fn cmd_pipeline(cfg: &PipelineConfig, opts: &RunOptions) -> CliResult<RunManifest> {
    cfg.validate()?;
    let started = now_ms();
    let layout = Layout::new(&cfg.out_dir);
    let objectives = &cfg.objectives;

    let designs = cmd_sample(cfg)?;
    let rows = cmd_evaluate(cfg, opts, None)?;
    let label_counts = cmd_label(cfg, None)?;
    let unpruned = cmd_train(cfg, objectives, None)?;
    let pruned = cmd_prune(cfg, objectives, None, None)?;
    let rules = cmd_rules(cfg, objectives)?;
    let validation = cmd_validate(cfg, objectives, None, opts)?;

    let mut files = vec!["designs.csv".to_string(), "dataset.csv".to_string()];
    for &o in objectives.iter() {
        for pruned in [false, true] {
            for ext in ["txt", "json", "dot"] {
                files.push(file_name(&layout.tree(o, pruned, ext)));
            }
        }
        files.push(file_name(&layout.rules_table(o)));
        files.push(file_name(&layout.validation(o)));
    }
    files.push("rules.json".into());
    files.push("manifest.json".into());

    let manifest = RunManifest {
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        config: cfg.clone(),
        stages: vec![
            StageRecord { stage: "sample".into(), rows: designs.len() },
            StageRecord { stage: "evaluate".into(), rows: rows.len() },
            StageRecord { stage: "label".into(), rows: rows.len() },
            StageRecord { stage: "rules".into(), rows: rules.objectives.iter().map(|o| o.rules.len()).sum() },
            StageRecord { stage: "validate".into(), rows: validation.iter().flat_map(|(_, r)| r).map(|r| r.rows.len()).sum() },
        ],
        label_counts,
        trees: unpruned
            .iter()
            .zip(&pruned)
            .map(|(u, p)| TreeRecord {
                objective: p.objective,
                unpruned_leaves: u.stats.leaf_count,
                leaves: p.stats.leaf_count,
                cf: p.cf,
                average_accuracy: p.stats.average_accuracy,
            })
            .collect(),
        validation: validation
            .iter()
            .flat_map(|(o, reps)| {
                reps.iter().map(move |r| ValidationRecord {
                    objective: *o,
                    class: r.rule.class,
                    rule: r.rule.conditions(),
                    designs: r.rows.len(),
                    accuracy: r.accuracy,
                })
            })
            .collect(),
        files,
        started_unix_ms: started,
        finished_unix_ms: now_ms(),
    };
    io::write_json(&layout.manifest(), &manifest)?;
    Ok(manifest)
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}
