//! The three strategies for a set of cost matrices `U`:
//!
//! * **S** trains one cost-sensitive model per matrix and keeps the one with
//!   the smallest worst-case training cost.
//! * **SP** removes dominated matrices, then trains one model per remaining
//!   matrix and one pairwise minimax model per unordered pair, and keeps the
//!   best of all of them. With one or two matrices left it trains that single
//!   or pair model directly.
//! * **M** trains one model against the worst case over all of `U` at once.
//!
//! Also the cost-set utilities: dominance filtering, seeded sampling of
//! non-dominated sets, and interval discretization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cost::{class_stats, max_total_cost, CostMatrix, CostMatrixSet, LabeledDataset, OperatingPoint};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::learner::{fit_gam, CostObjective, StumpEnsemble, DEFAULT_MAX_ITERS, DEFAULT_MIN_IMPROVEMENT};

pub const DEFAULT_SAMPLE_ATTEMPTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Framework {
    S,
    SP,
    M,
}

impl Framework {
    pub const ALL: [Framework; 3] = [Framework::S, Framework::SP, Framework::M];

    pub fn name(self) -> &'static str {
        match self {
            Framework::S => "S",
            Framework::SP => "SP",
            Framework::M => "M",
        }
    }
}

impl std::fmt::Display for Framework {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Framework {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "s" => Ok(Framework::S),
            "sp" => Ok(Framework::SP),
            "m" => Ok(Framework::M),
            _ => Err(Error::InvalidArgument(format!(
                "unknown framework '{s}' (expected s, sp or m)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameworkConfig {
    pub max_iters: usize,
    pub min_improvement: f64,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for FrameworkConfig {
    fn default() -> Self {
        Self {
            max_iters: DEFAULT_MAX_ITERS,
            min_improvement: DEFAULT_MIN_IMPROVEMENT,
            exec: Exec::default(),
        }
    }
}

/// Which objective produced a candidate. Indices refer to positions in the
/// cost set handed to the solver, before any filtering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Provenance {
    Single { index: usize },
    Pair { i: usize, j: usize },
    Direct,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedCandidate {
    pub model: StumpEnsemble,
    pub provenance: Provenance,
    pub train_point: OperatingPoint,
    /// Worst-case training cost over the set the solver selected against.
    pub train_max_cost: f64,
}

/// True iff `ci` is dominated by `cj`: componentwise no larger and not equal.
/// A dominated matrix never attains the maximum total cost.
pub fn matrix_dominated_by(ci: &CostMatrix, cj: &CostMatrix) -> bool {
    ci.c0() <= cj.c0() && ci.c1() <= cj.c1() && ci != cj
}

/// Indices of the matrices that survive [`filter_dominated`].
pub fn non_dominated_indices(u: &CostMatrixSet) -> Vec<usize> {
    let m = u.as_slice();
    (0..m.len())
        .filter(|&i| {
            let dominated = m.iter().any(|cj| matrix_dominated_by(&m[i], cj));
            let duplicate = m[..i].contains(&m[i]);
            !dominated && !duplicate
        })
        .collect()
}

/// Drops dominated matrices and later duplicates, preserving order.
pub fn filter_dominated(u: &CostMatrixSet) -> CostMatrixSet {
    let kept = non_dominated_indices(u).into_iter().map(|i| u[i]).collect();
    CostMatrixSet::new(kept).expect("a nonempty set keeps at least one maximal matrix")
}

fn is_antichain(matrices: &[CostMatrix]) -> bool {
    matrices.iter().enumerate().all(|(i, a)| {
        matrices
            .iter()
            .enumerate()
            .all(|(j, b)| i == j || (a != b && !matrix_dominated_by(a, b)))
    })
}

/// `k` matrices with entries uniform in `[lo, hi)`, redrawn as a whole until
/// no matrix dominates another.
pub fn sample_cost_set(k: usize, lo: f64, hi: f64, seed: u64) -> Result<CostMatrixSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_cost_set_with(&mut rng, k, lo, hi, DEFAULT_SAMPLE_ATTEMPTS)
}

pub fn sample_cost_set_with<R: Rng>(
    rng: &mut R,
    k: usize,
    lo: f64,
    hi: f64,
    max_attempts: usize,
) -> Result<CostMatrixSet> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() || lo < 0.0 {
        return Err(Error::InvalidArgument(format!("invalid cost range [{lo}, {hi})")));
    }
    for _ in 0..max_attempts {
        let drawn: Vec<(f64, f64)> = (0..k).map(|_| (rng.gen_range(lo..hi), rng.gen_range(lo..hi))).collect();
        let Ok(set) = CostMatrixSet::from_pairs(&drawn) else {
            continue;
        };
        if is_antichain(set.as_slice()) {
            return Ok(set);
        }
    }
    Err(Error::RejectionBudgetExhausted {
        k,
        attempts: max_attempts,
    })
}

/// Evenly spaced `c1` values over `[c1_lo, c1_hi]` with `c0` held fixed.
///
/// With a shared `c0` every matrix but the last is dominated, so
/// [`filter_dominated`] reduces the result to `(c0_fixed, c1_hi)`. To get a
/// genuine multi-matrix problem, vary `c0` as well.
pub fn discretize_interval(c0_fixed: f64, c1_lo: f64, c1_hi: f64, steps: usize) -> Result<CostMatrixSet> {
    if steps < 2 {
        return Err(Error::InvalidArgument(format!("steps must be at least 2, got {steps}")));
    }
    if !(c1_lo < c1_hi) {
        return Err(Error::InvalidArgument(format!("invalid interval [{c1_lo}, {c1_hi}]")));
    }
    let step = (c1_hi - c1_lo) / (steps - 1) as f64;
    let matrices = (0..steps)
        .map(|t| {
            let c1 = if t == steps - 1 { c1_hi } else { c1_lo + t as f64 * step };
            CostMatrix::new(c0_fixed, c1)
        })
        .collect::<Result<Vec<_>>>()?;
    CostMatrixSet::new(matrices)
}

/// Operating point and worst-case cost over `u` of `model` on `dataset`.
pub fn evaluate(model: &StumpEnsemble, dataset: &LabeledDataset, u: &CostMatrixSet) -> Result<(OperatingPoint, f64)> {
    let predictions = model.predict(dataset)?;
    let stats = class_stats(dataset)?;
    let point = crate::cost::operating_point(&predictions, dataset.labels())?;
    Ok((point, max_total_cost(&stats, &point, u).0))
}

fn train(
    dataset: &LabeledDataset,
    objective_set: CostMatrixSet,
    provenance: Provenance,
    selection_set: &CostMatrixSet,
    cfg: &FrameworkConfig,
) -> Result<TrainedCandidate> {
    let stats = class_stats(dataset)?;
    let objective = CostObjective::new(stats, objective_set);
    let model = fit_gam(dataset, &objective, cfg.max_iters, cfg.min_improvement)?;
    let (train_point, train_max_cost) = evaluate(&model, dataset, selection_set)?;
    Ok(TrainedCandidate {
        model,
        provenance,
        train_point,
        train_max_cost,
    })
}

pub fn solve_single(dataset: &LabeledDataset, c: &CostMatrix, cfg: &FrameworkConfig) -> Result<TrainedCandidate> {
    let set = CostMatrixSet::singleton(*c);
    train(dataset, set.clone(), Provenance::Single { index: 0 }, &set, cfg)
}

pub fn solve_pair(
    dataset: &LabeledDataset,
    ci: &CostMatrix,
    cj: &CostMatrix,
    cfg: &FrameworkConfig,
) -> Result<TrainedCandidate> {
    let set = CostMatrixSet::pair(*ci, *cj);
    train(dataset, set.clone(), Provenance::Pair { i: 0, j: 1 }, &set, cfg)
}

/// Trains every job, in parallel when `cfg.exec` allows, and returns the
/// first candidate (in job order) with the smallest worst-case cost over
/// `selection_set`.
fn select_best(
    dataset: &LabeledDataset,
    u: &CostMatrixSet,
    jobs: Vec<Provenance>,
    selection_set: &CostMatrixSet,
    cfg: &FrameworkConfig,
) -> Result<TrainedCandidate> {
    let candidates = cfg.exec.try_map(jobs, |provenance| {
        let objective_set = match provenance {
            Provenance::Single { index } => CostMatrixSet::singleton(u[index]),
            Provenance::Pair { i, j } => CostMatrixSet::pair(u[i], u[j]),
            Provenance::Direct => selection_set.clone(),
        };
        train(dataset, objective_set, provenance, selection_set, cfg)
    })?;
    let mut best: Option<TrainedCandidate> = None;
    for c in candidates {
        if best.as_ref().is_none_or(|b| c.train_max_cost < b.train_max_cost) {
            best = Some(c);
        }
    }
    best.ok_or(Error::EmptyCostSet)
}

/// Per-matrix training, then selection over the unfiltered `u`.
pub fn solve_s(dataset: &LabeledDataset, u: &CostMatrixSet, cfg: &FrameworkConfig) -> Result<TrainedCandidate> {
    let jobs = (0..u.len()).map(|index| Provenance::Single { index }).collect();
    select_best(dataset, u, jobs, u, cfg)
}

/// Candidate set of all singles followed by all pairs `(i, j)`, `i < j`, over
/// the non-dominated subset of `u`.
pub fn sp_candidates(u: &CostMatrixSet) -> Vec<Provenance> {
    let kept = non_dominated_indices(u);
    match kept.as_slice() {
        [index] => vec![Provenance::Single { index: *index }],
        [i, j] => vec![Provenance::Pair { i: *i, j: *j }],
        _ => {
            let mut jobs: Vec<Provenance> = kept.iter().map(|&index| Provenance::Single { index }).collect();
            for (a, &i) in kept.iter().enumerate() {
                for &j in &kept[a + 1..] {
                    jobs.push(Provenance::Pair { i, j });
                }
            }
            jobs
        }
    }
}

pub fn solve_sp(dataset: &LabeledDataset, u: &CostMatrixSet, cfg: &FrameworkConfig) -> Result<TrainedCandidate> {
    let filtered = filter_dominated(u);
    select_best(dataset, u, sp_candidates(u), &filtered, cfg)
}

pub fn solve_m(dataset: &LabeledDataset, u: &CostMatrixSet, cfg: &FrameworkConfig) -> Result<TrainedCandidate> {
    let filtered = filter_dominated(u);
    train(dataset, filtered.clone(), Provenance::Direct, &filtered, cfg)
}

pub fn solve(
    framework: Framework,
    dataset: &LabeledDataset,
    u: &CostMatrixSet,
    cfg: &FrameworkConfig,
) -> Result<TrainedCandidate> {
    match framework {
        Framework::S => solve_s(dataset, u, cfg),
        Framework::SP => solve_sp(dataset, u, cfg),
        Framework::M => solve_m(dataset, u, cfg),
    }
}
