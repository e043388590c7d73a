use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lft::commands::{self, RunOptions};
use lft::report::{default_sweep_point, parse_point};
use lft::{CliError, CliResult, PipelineConfig};
use lft_core::{ClassLabel, Objective, Rule, Variable};

#[derive(Parser)]
#[command(name = "lft", version, about = "Design mining for lattice-filled thin-walled tubes")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Pipeline configuration (JSON); defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sample count (designs per rule for `validate`).
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Evaluation threads; defaults to every core.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Limits the per-objective stages to one objective.
    #[arg(long, global = true, value_enum)]
    objective: Option<ObjectiveArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Eff,
    Tea,
    Light,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Eff => Objective::Efficiency,
            ObjectiveArg::Tea => Objective::TotalEa,
            ObjectiveArg::Light => Objective::Lightweight,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Latin Hypercube plan, written to designs.csv.
    Sample,
    /// Evaluates designs.csv into dataset.csv.
    Evaluate {
        /// Design plan; defaults to designs.csv in the output directory.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Writes one `x_mm,F_kN` trace per design here.
        #[arg(long)]
        trace_dir: Option<PathBuf>,
    },
    /// Fills the label columns of dataset.csv.
    Label {
        /// Dataset; defaults to dataset.csv in the output directory.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Grows unpruned trees from a labeled dataset.
    Train {
        /// Dataset; defaults to dataset.csv in the output directory.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Prunes the trained trees.
    Prune {
        /// Dataset; defaults to dataset.csv in the output directory.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Confidence factor; defaults to the configured one.
        #[arg(long)]
        cf: Option<f64>,
    },
    /// Extracts rules and selects one design rule per class.
    Rules,
    /// Samples and evaluates new designs inside rules.
    Validate {
        /// Conditions such as "d>2, n>2, m>3"; defaults to the selected rules.
        #[arg(long, requires = "class")]
        rule: Option<String>,
        /// Class predicted by `--rule` (e, g or b).
        #[arg(long)]
        class: Option<String>,
    },
    /// SEA against one variable with the other four fixed.
    Sweep {
        /// One of d, n, m, t, h.
        #[arg(long)]
        variable: String,
        /// Grid points for continuous variables.
        #[arg(long, default_value_t = 9)]
        points: usize,
        /// Fixed values, e.g. "d=2,n=3,m=4,t=1.1,h=3".
        #[arg(long)]
        at: Option<String>,
    },
    /// Compares each design's SEA with the hollow tube of equal thickness.
    HollowReport {
        /// Dataset; defaults to dataset.csv in the output directory.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Uses the printed hollow-tube SEA values.
        #[arg(long)]
        paper_baselines: bool,
    },
    /// Runs every stage and writes manifest.json.
    Pipeline {
        /// Also writes one trace CSV per design here.
        #[arg(long)]
        trace_dir: Option<PathBuf>,
        /// Pruning confidence factor.
        #[arg(long)]
        cf: Option<f64>,
    },
    /// Configuration helpers.
    Config {
        #[command(subcommand)]
        action: ConfigAction,
    },
}

#[derive(Subcommand)]
enum ConfigAction {
    /// Prints the default configuration as JSON.
    PrintDefault,
}

fn load_config(g: &Global) -> CliResult<PipelineConfig> {
    let mut cfg = match &g.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    if let Some(dir) = &g.out_dir {
        cfg.out_dir = dir.clone();
    }
    if let Some(o) = g.objective {
        cfg.objectives = vec![o.into()];
    }
    Ok(cfg)
}

fn run(cli: Cli) -> CliResult<()> {
    let g = &cli.global;
    let mut cfg = load_config(g)?;
    if !matches!(cli.command, Command::Validate { .. }) {
        if let Some(k) = g.k {
            cfg.k = k;
        }
    }
    let mut opts = RunOptions { jobs: g.jobs, trace_dir: None };
    match cli.command {
        Command::Sample => {
            let designs = commands::cmd_sample(&cfg)?;
            println!("sampled {} designs (seed {})", designs.len(), cfg.seed);
        }
        Command::Evaluate { input, trace_dir } => {
            opts.trace_dir = trace_dir;
            let rows = commands::cmd_evaluate(&cfg, &opts, input.as_deref())?;
            println!("evaluated {} designs", rows.len());
        }
        Command::Label { input } => {
            for (o, c) in commands::cmd_label(&cfg, input.as_deref())? {
                println!("{o}: e={} g={} b={}", c.0[0], c.0[1], c.0[2]);
            }
        }
        Command::Train { input } => {
            for doc in commands::cmd_train(&cfg, &cfg.objectives, input.as_deref())? {
                println!("{}: {} leaves, average recall {:.4}", doc.objective, doc.stats.leaf_count, doc.stats.average_accuracy);
            }
        }
        Command::Prune { input, cf } => {
            for doc in commands::cmd_prune(&cfg, &cfg.objectives, cf, input.as_deref())? {
                let cf = doc.cf.map_or("none (unpruned kept)".to_string(), |c| c.to_string());
                println!("{}: {} leaves, cf {cf}, average recall {:.4}", doc.objective, doc.stats.leaf_count, doc.stats.average_accuracy);
            }
        }
        Command::Rules => {
            let doc = commands::cmd_rules(&cfg, &cfg.objectives)?;
            for o in doc.objectives.iter().filter(|o| cfg.objectives.contains(&o.objective)) {
                println!("{}:", o.objective);
                print!("{}", commands::rules_table(o));
            }
        }
        Command::Validate { rule, class } => {
            if let Some(k) = g.k {
                cfg.validation_k = k;
            }
            let explicit = match (rule, class) {
                (Some(r), Some(c)) => {
                    let class: ClassLabel = c.parse().map_err(|e: lft_core::Error| CliError::Argument(e.to_string()))?;
                    Some(Rule::parse(&r, class).map_err(|e| CliError::Argument(e.to_string()))?)
                }
                _ => None,
            };
            for (o, reports) in commands::cmd_validate(&cfg, &cfg.objectives, explicit.as_ref(), &opts)? {
                for r in reports {
                    println!(
                        "{o} {}: {} -> {}/{} match ({:.1}%)",
                        r.rule.class,
                        r.rule.conditions(),
                        r.matches(),
                        r.rows.len(),
                        100.0 * r.accuracy
                    );
                }
            }
        }
        Command::Sweep { variable, points, at } => {
            let v = Variable::from_name(&variable).ok_or_else(|| CliError::Argument(format!("unknown variable {variable:?}")))?;
            let fixed = match at {
                Some(text) => parse_point(&text, default_sweep_point())?,
                None => default_sweep_point(),
            };
            let out = commands::cmd_sweep(&cfg, v, &fixed, points, &opts)?;
            println!("{} points -> {}", out.points.len(), out.csv.display());
        }
        Command::HollowReport { input, paper_baselines } => {
            let s = commands::cmd_hollow_report(&cfg, paper_baselines, input.as_deref())?;
            println!("{} of {} designs exceed the hollow tube ({:.1}%)", s.exceed_count, s.designs, s.exceed_pct);
            println!("over +20%: {}, over +50%: {}, below: {}", s.over_20_count, s.over_50_count, s.below_count);
            if let Some(r) = s.max_increase {
                println!("largest increase: design {} ({:+.2}%)", r.index, r.increase_pct);
            }
            if let Some(r) = s.max_decrease {
                println!("largest decrease: design {} ({:+.2}%)", r.index, r.increase_pct);
            }
        }
        Command::Pipeline { trace_dir, cf } => {
            opts.trace_dir = trace_dir;
            if let Some(cf) = cf {
                cfg.tree.cf = cf;
            }
            let m = commands::cmd_pipeline(&cfg, &opts)?;
            for t in &m.trees {
                println!("{}: {} -> {} leaves, average recall {:.4}", t.objective, t.unpruned_leaves, t.leaves, t.average_accuracy);
            }
            for v in &m.validation {
                println!("{} {}: {} ({:.1}%)", v.objective, v.class, v.rule, 100.0 * v.accuracy);
            }
            println!("wrote {} files to {}", m.files.len(), cfg.out_dir.display());
        }
        Command::Config { action: ConfigAction::PrintDefault } => print!("{}", PipelineConfig::default().to_json()),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
