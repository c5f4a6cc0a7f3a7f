//! Repeated stratified cross-validation comparing S, SP and M.
//!
//! Every `(repeat, fold, framework)` cell trains on the fold's training split
//! and records the worst-case cost over the full, unfiltered cost set on both
//! splits. SP is then compared against S and M with a Wilcoxon signed-rank
//! test over the paired per-fold costs.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cost::{class_stats, CostMatrixSet, LabeledDataset};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::framework::{
    evaluate, filter_dominated, non_dominated_indices, sample_cost_set_with, solve, Framework, FrameworkConfig,
    Provenance, DEFAULT_SAMPLE_ATTEMPTS,
};
use crate::stats::{significance_mark, wilcoxon_signed_rank, Mark, PMethod, PairedSample};

use super::cv::{stratified_folds, Fold};
use super::data::load_csv;
use super::docs::FORMAT_VERSION;
use super::{stream_rng, COST_STREAM, REPEAT_STREAM_BASE};

/// Slack allowed when checking that SP never trains worse than S.
pub const SUPERSET_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum CostSource {
    /// A fixed set, e.g. read from a cost-set document.
    Fixed(CostMatrixSet),
    /// `k` non-dominated matrices sampled uniformly from `[lo, hi)` using
    /// the cost stream of the master seed.
    Random { k: usize, lo: f64, hi: f64 },
}

#[derive(Debug, Clone)]
pub struct BenchmarkConfig {
    pub dataset: PathBuf,
    pub label_column: String,
    pub costs: CostSource,
    pub frameworks: Vec<Framework>,
    pub repeats: usize,
    pub folds: usize,
    pub learner: FrameworkConfig,
    pub alpha: f64,
    pub seed: u64,
}

impl BenchmarkConfig {
    pub fn new(dataset: impl Into<PathBuf>, costs: CostSource) -> Self {
        Self {
            dataset: dataset.into(),
            label_column: "label".into(),
            costs,
            frameworks: Framework::ALL.to_vec(),
            repeats: 20,
            folds: 5,
            learner: FrameworkConfig::default(),
            alpha: 0.05,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::InvalidArgument("repeats must be at least 1".into()));
        }
        if self.folds < 2 {
            return Err(Error::InvalidArgument("folds must be at least 2".into()));
        }
        if self.frameworks.is_empty() {
            return Err(Error::InvalidArgument("no frameworks requested".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha {} must lie in (0, 1)",
                self.alpha
            )));
        }
        if self.learner.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub repeat: usize,
    pub fold: usize,
    pub framework: Framework,
    pub train_max_cost: f64,
    pub test_max_cost: f64,
    pub provenance: Provenance,
}

impl FoldResult {
    pub fn cost(&self, split: Split) -> f64 {
        match split {
            Split::Train => self.train_max_cost,
            Split::Test => self.test_max_cost,
        }
    }
}

/// SP against another framework on one split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub w_plus: f64,
    pub n_effective: usize,
    pub p_two_sided: f64,
    pub method: PMethod,
    pub mark: Option<Mark>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub framework: Framework,
    pub split: Split,
    pub mean_max_cost: f64,
    /// Lowest mean among the frameworks on this split (ties all count).
    pub best: bool,
    /// Present on S and M rows when SP was also run.
    pub vs_sp: Option<Comparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub dataset: String,
    pub label_column: String,
    pub frameworks: Vec<Framework>,
    pub repeats: usize,
    pub folds: usize,
    pub max_iters: usize,
    pub min_improvement: f64,
    pub alpha: f64,
    pub seed: u64,
    pub cost_source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub format_version: u32,
    pub config: ConfigEcho,
    pub n: usize,
    pub n0: usize,
    pub n1: usize,
    pub n_features: usize,
    pub cost_set: CostMatrixSet,
    pub summaries: Vec<Summary>,
    /// Folds where SP trained worse than S. Always zero when the cost set is
    /// free of dominated matrices and has at least three members.
    pub superset_violations: usize,
    pub folds: Vec<FoldResult>,
}

impl BenchmarkReport {
    pub fn summary(&self, framework: Framework, split: Split) -> Option<&Summary> {
        self.summaries
            .iter()
            .find(|s| s.framework == framework && s.split == split)
    }

    /// Per-fold costs of `framework` in `(repeat, fold)` order.
    pub fn fold_costs(&self, framework: Framework, split: Split) -> Vec<f64> {
        self.folds
            .iter()
            .filter(|r| r.framework == framework)
            .map(|r| r.cost(split))
            .collect()
    }

    /// One row per `(framework, split)`: means, best flag and the SP mark.
    pub fn write_table<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "dataset",
            "k",
            "framework",
            "split",
            "mean_max_cost",
            "best",
            "mark_vs_sp",
            "p_value",
            "w_plus",
            "n_effective",
        ])?;
        for s in &self.summaries {
            let (mark, p, wp, ne) = match &s.vs_sp {
                Some(c) => (
                    c.mark.map(|m| m.to_string()).unwrap_or_default(),
                    format!("{}", c.p_two_sided),
                    format!("{}", c.w_plus),
                    c.n_effective.to_string(),
                ),
                None => Default::default(),
            };
            w.write_record([
                self.config.dataset.clone(),
                self.cost_set.len().to_string(),
                s.framework.to_string(),
                s.split.name().to_string(),
                format!("{}", s.mean_max_cost),
                s.best.to_string(),
                mark,
                p,
                wp,
                ne,
            ])?;
        }
        w.flush().map_err(|source| Error::Io {
            path: PathBuf::from("<table>"),
            source,
        })?;
        Ok(())
    }
}

pub fn resolve_costs(source: &CostSource, seed: u64) -> Result<CostMatrixSet> {
    match source {
        CostSource::Fixed(set) => Ok(set.clone()),
        CostSource::Random { k, lo, hi } => {
            let mut rng = stream_rng(seed, COST_STREAM);
            sample_cost_set_with(&mut rng, *k, *lo, *hi, DEFAULT_SAMPLE_ATTEMPTS)
        }
    }
}

/// Fold partitions of every repeat, each from its own stream of the master seed.
pub fn repeat_splits(dataset: &LabeledDataset, repeats: usize, folds: usize, seed: u64) -> Result<Vec<Vec<Fold>>> {
    (0..repeats)
        .map(|r| {
            let split_seed: u64 = stream_rng(seed, REPEAT_STREAM_BASE + r as u64).gen();
            stratified_folds(dataset.labels(), folds, split_seed)
        })
        .collect()
}

pub fn run_benchmark(config: &BenchmarkConfig) -> Result<BenchmarkReport> {
    let dataset = load_csv(&config.dataset, &config.label_column)?;
    run_benchmark_on(&dataset, config)
}

/// Runs the benchmark on an already loaded dataset; `config.dataset` is only
/// echoed into the report.
pub fn run_benchmark_on(dataset: &LabeledDataset, config: &BenchmarkConfig) -> Result<BenchmarkReport> {
    config.validate()?;
    let stats = class_stats(dataset)?;
    let u = resolve_costs(&config.costs, config.seed)?;
    let filtered = filter_dominated(&u);
    let splits = repeat_splits(dataset, config.repeats, config.folds, config.seed)?;

    let mut frameworks = config.frameworks.clone();
    frameworks.sort_by_key(|f| Framework::ALL.iter().position(|g| g == f));
    frameworks.dedup();

    // Cells run in parallel; the solvers inside each cell stay sequential so
    // the two levels don't oversubscribe.
    let inner = FrameworkConfig {
        exec: Exec::Sequential,
        ..config.learner
    };
    let mut cells = Vec::new();
    for (r, folds) in splits.iter().enumerate() {
        for (f, fold) in folds.iter().enumerate() {
            for &fw in &frameworks {
                cells.push((r, f, fold, fw));
            }
        }
    }
    let folds: Vec<FoldResult> = config
        .learner
        .exec
        .try_map(cells, |(repeat, fold_idx, fold, framework)| {
            run_cell(dataset, fold, framework, &u, &filtered, &inner)
                .map(|(train, test, provenance)| FoldResult {
                    repeat,
                    fold: fold_idx,
                    framework,
                    train_max_cost: train,
                    test_max_cost: test,
                    provenance,
                })
                .map_err(|e| Error::Fold {
                    repeat,
                    fold: fold_idx,
                    source: Box::new(e),
                })
        })?;

    let superset_violations = check_superset(&folds, &u)?;
    let summaries = summarize(&folds, &frameworks, config.alpha)?;

    Ok(BenchmarkReport {
        format_version: FORMAT_VERSION,
        config: ConfigEcho {
            dataset: config.dataset.display().to_string(),
            label_column: config.label_column.clone(),
            frameworks,
            repeats: config.repeats,
            folds: config.folds,
            max_iters: config.learner.max_iters,
            min_improvement: config.learner.min_improvement,
            alpha: config.alpha,
            seed: config.seed,
            cost_source: match &config.costs {
                CostSource::Fixed(_) => "fixed".into(),
                CostSource::Random { k, lo, hi } => format!("random:{k} in [{lo}, {hi})"),
            },
        },
        n: stats.n,
        n0: stats.n0,
        n1: stats.n1,
        n_features: dataset.n_features(),
        cost_set: u,
        summaries,
        superset_violations,
        folds,
    })
}

fn run_cell(
    dataset: &LabeledDataset,
    fold: &Fold,
    framework: Framework,
    u: &CostMatrixSet,
    filtered: &CostMatrixSet,
    cfg: &FrameworkConfig,
) -> Result<(f64, f64, Provenance)> {
    let train = dataset.subset(&fold.train)?;
    let test = dataset.subset(&fold.test)?;
    let candidate = solve(framework, &train, u, cfg)?;
    let (_, train_cost) = evaluate(&candidate.model, &train, u)?;
    let (_, test_cost) = evaluate(&candidate.model, &test, u)?;
    for (split, data, full) in [(Split::Train, &train, train_cost), (Split::Test, &test, test_cost)] {
        let (_, reduced) = evaluate(&candidate.model, data, filtered)?;
        if reduced != full {
            return Err(Error::Invariant(format!(
                "{} max cost changed under dominance filtering: {full} vs {reduced}",
                split.name()
            )));
        }
    }
    Ok((train_cost, test_cost, candidate.provenance))
}

fn check_superset(folds: &[FoldResult], u: &CostMatrixSet) -> Result<usize> {
    let guaranteed = non_dominated_indices(u).len() == u.len() && u.len() >= 3;
    let mut by_cell: BTreeMap<(usize, usize), (Option<f64>, Option<f64>)> = BTreeMap::new();
    for r in folds {
        let e = by_cell.entry((r.repeat, r.fold)).or_default();
        match r.framework {
            Framework::S => e.0 = Some(r.train_max_cost),
            Framework::SP => e.1 = Some(r.train_max_cost),
            Framework::M => {}
        }
    }
    let mut violations = 0;
    for (&(repeat, fold), &(s, sp)) in &by_cell {
        if let (Some(s), Some(sp)) = (s, sp) {
            if sp > s + SUPERSET_TOL {
                if guaranteed {
                    return Err(Error::Invariant(format!(
                        "repeat {repeat}, fold {fold}: SP trained worse than S ({sp} > {s})"
                    )));
                }
                violations += 1;
            }
        }
    }
    Ok(violations)
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn summarize(folds: &[FoldResult], frameworks: &[Framework], alpha: f64) -> Result<Vec<Summary>> {
    let costs = |fw: Framework, split: Split| -> Vec<f64> {
        folds
            .iter()
            .filter(|r| r.framework == fw)
            .map(|r| r.cost(split))
            .collect()
    };
    let mut out = Vec::new();
    for split in [Split::Train, Split::Test] {
        let means: Vec<f64> = frameworks.iter().map(|&fw| mean(&costs(fw, split))).collect();
        let lowest = means.iter().copied().fold(f64::INFINITY, f64::min);
        let sp = frameworks.contains(&Framework::SP).then(|| costs(Framework::SP, split));
        for (&fw, &m) in frameworks.iter().zip(&means) {
            let vs_sp = match (&sp, fw) {
                (Some(sp_costs), Framework::S | Framework::M) => {
                    let sample = PairedSample::new(sp_costs.clone(), costs(fw, split))?;
                    let result = wilcoxon_signed_rank(&sample);
                    let mark = significance_mark(&result, mean(sp_costs), m, alpha)?;
                    Some(Comparison {
                        w_plus: result.w_plus,
                        n_effective: result.n_effective,
                        p_two_sided: result.p_two_sided,
                        method: result.method,
                        mark,
                    })
                }
                _ => None,
            };
            out.push(Summary {
                framework: fw,
                split,
                mean_max_cost: m,
                best: m == lowest,
                vs_sp,
            });
        }
    }
    Ok(out)
}
