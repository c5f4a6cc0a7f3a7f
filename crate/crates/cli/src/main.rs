use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use cost_minimax::cost::{class_stats, CostMatrixSet};
use cost_minimax::framework::{solve, Framework, FrameworkConfig};
use cost_minimax::harness::bench::{resolve_costs, run_benchmark, BenchmarkConfig, CostSource};
use cost_minimax::harness::data::{load_csv, read_table};
use cost_minimax::harness::docs::{read_cost_set, read_model, write_json, ModelDocument};
use cost_minimax::harness::verify::{verify_theory, Suite};
use cost_minimax::learner::{DEFAULT_MAX_ITERS, DEFAULT_MIN_IMPROVEMENT};
use cost_minimax::Exec;

const COST_LO: f64 = 0.0;
const COST_HI: f64 = 10.0;

#[derive(Parser)]
#[command(
    name = "cost-minimax",
    version,
    about = "Minimax classification over a set of cost matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one model with the S, SP or M strategy
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "label")]
        label_col: String,
        /// Cost-set document, or `random:K` for K sampled non-dominated matrices
        #[arg(long)]
        costs: String,
        #[arg(long, default_value = "sp", value_parser = parse_framework)]
        framework: Framework,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERS, value_parser = at_least::<1>)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        model_out: PathBuf,
        /// Run candidate trainings on one thread
        #[arg(long)]
        sequential: bool,
    },
    /// Predict labels with a trained model
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Column to ignore when present (e.g. the label of a labeled file)
        #[arg(long)]
        label_col: Option<String>,
    },
    /// Repeated stratified cross-validation of S, SP and M
    Bench {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "label")]
        label_col: String,
        #[arg(long)]
        costs: String,
        #[arg(long, value_delimiter = ',', default_values = ["s", "sp", "m"], value_parser = parse_framework)]
        frameworks: Vec<Framework>,
        #[arg(long, default_value_t = 20, value_parser = at_least::<1>)]
        repeats: usize,
        #[arg(long, default_value_t = 5, value_parser = at_least::<2>)]
        folds: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERS, value_parser = at_least::<1>)]
        iters: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Full JSON report
        #[arg(long)]
        out: PathBuf,
        /// Summary table (CSV); defaults to the report path with a .csv extension
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        sequential: bool,
    },
    /// Randomized checks of the front geometry
    Verify {
        #[arg(long, value_parser = parse_suite)]
        suite: Suite,
        #[arg(long, value_parser = at_least::<1>)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        sequential: bool,
    },
}

fn parse_framework(s: &str) -> Result<Framework, String> {
    s.parse().map_err(|e: cost_minimax::Error| e.to_string())
}

fn at_least<const MIN: usize>(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|e| format!("{e}"))?;
    if v < MIN {
        return Err(format!("must be at least {MIN}"));
    }
    Ok(v)
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: cost_minimax::Error| e.to_string())
}

fn exec(sequential: bool) -> Exec {
    if sequential {
        Exec::Sequential
    } else {
        Exec::default()
    }
}

fn cost_source(spec: &str) -> Result<CostSource> {
    match spec.strip_prefix("random:") {
        Some(k) => {
            let k: usize = k.parse().with_context(|| format!("invalid matrix count in '{spec}'"))?;
            Ok(CostSource::Random {
                k,
                lo: COST_LO,
                hi: COST_HI,
            })
        }
        None => Ok(CostSource::Fixed(
            read_cost_set(Path::new(spec)).with_context(|| format!("reading cost set {spec}"))?,
        )),
    }
}

#[allow(clippy::too_many_arguments)]
fn train(
    data: &Path,
    label_col: &str,
    costs: &str,
    framework: Framework,
    iters: usize,
    seed: u64,
    model_out: &Path,
    sequential: bool,
) -> Result<()> {
    let dataset = load_csv(data, label_col)?;
    let u: CostMatrixSet = resolve_costs(&cost_source(costs)?, seed)?;
    let cfg = FrameworkConfig {
        max_iters: iters,
        min_improvement: DEFAULT_MIN_IMPROVEMENT,
        exec: exec(sequential),
    };
    let candidate = solve(framework, &dataset, &u, &cfg)?;
    let doc = ModelDocument::new(
        &candidate,
        framework,
        &u,
        iters,
        Some(seed),
        dataset.feature_names().map(<[String]>::to_vec),
    );
    write_json(model_out, &doc)?;
    let stats = class_stats(&dataset)?;
    println!(
        "{} model: {} stumps, provenance {:?}, train max cost {} (n0={}, n1={})",
        framework,
        candidate.model.len(),
        candidate.provenance,
        candidate.train_max_cost,
        stats.n0,
        stats.n1
    );
    Ok(())
}

fn predict(model: &Path, data: &Path, out: &Path, label_col: Option<&str>) -> Result<()> {
    let doc = read_model(model)?;
    let mut table = read_table(data, None)?;
    if let Some(col) = label_col {
        if let Some(j) = table.names.iter().position(|n| n == col) {
            table.names.remove(j);
            for row in &mut table.rows {
                row.remove(j);
            }
        }
    }
    let mut w = csv::Writer::from_path(out).with_context(|| format!("creating {}", out.display()))?;
    w.write_record(["score", "prediction"])?;
    for row in &table.rows {
        let score = doc.model.score(row)?;
        w.write_record([format!("{score}"), u8::from(score > 0.0).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn bench(
    data: PathBuf,
    label_col: String,
    costs: &str,
    frameworks: Vec<Framework>,
    repeats: usize,
    folds: usize,
    iters: usize,
    alpha: f64,
    seed: u64,
    out: &Path,
    table: Option<PathBuf>,
    sequential: bool,
) -> Result<()> {
    let config = BenchmarkConfig {
        dataset: data,
        label_column: label_col,
        costs: cost_source(costs)?,
        frameworks,
        repeats,
        folds,
        learner: FrameworkConfig {
            max_iters: iters,
            min_improvement: DEFAULT_MIN_IMPROVEMENT,
            exec: exec(sequential),
        },
        alpha,
        seed,
    };
    let report = run_benchmark(&config)?;
    write_json(out, &report)?;
    let table_path = table.unwrap_or_else(|| out.with_extension("csv"));
    let file = std::fs::File::create(&table_path).with_context(|| format!("creating {}", table_path.display()))?;
    report.write_table(file)?;
    report.write_table(std::io::stdout())?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Train {
            data,
            label_col,
            costs,
            framework,
            iters,
            seed,
            model_out,
            sequential,
        } => train(
            &data, &label_col, &costs, framework, iters, seed, &model_out, sequential,
        )?,
        Command::Predict {
            model,
            data,
            out,
            label_col,
        } => predict(&model, &data, &out, label_col.as_deref())?,
        Command::Bench {
            data,
            label_col,
            costs,
            frameworks,
            repeats,
            folds,
            iters,
            alpha,
            seed,
            out,
            table,
            sequential,
        } => bench(
            data, label_col, &costs, frameworks, repeats, folds, iters, alpha, seed, &out, table, sequential,
        )?,
        Command::Verify {
            suite,
            trials,
            seed,
            sequential,
        } => {
            let report = verify_theory(suite, trials, seed, exec(sequential))?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            if !report.all_passed() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = matches!(
                e.downcast_ref::<cost_minimax::Error>(),
                Some(cost_minimax::Error::InvalidArgument(_))
            );
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
