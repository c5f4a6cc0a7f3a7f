//! Unweighted additive model of decision stumps, `F(x) = sign(sum_i f_i(x))`,
//! fitted greedily against a cost objective.
//!
//! Each round scans every candidate stump (midpoint thresholds of every
//! feature in both polarities, then the two constants) and appends the one
//! that most lowers the objective. Fitting stops after `max_iters` stumps or
//! once the best candidate no longer improves by more than `min_improvement`.
//!
//! Class 1 is encoded as `+1`, class 0 as `-1`. A score of exactly zero
//! predicts class 0. A threshold stump fires its polarity when
//! `x[feature] >= threshold`.

use serde::{Deserialize, Serialize};

use crate::cost::{error_counts, max_total_cost, ClassStats, CostMatrixSet, Label, LabeledDataset, OperatingPoint};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_ITERS: usize = 50;
pub const DEFAULT_MIN_IMPROVEMENT: f64 = 1e-9;

/// Output of a stump: `+1` or `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.value() as i8
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(v: i8) -> Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(format!("stump output must be 1 or -1, got {other}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DecisionStump {
    Threshold {
        feature: usize,
        threshold: f64,
        polarity: Sign,
    },
    Constant {
        output: Sign,
    },
}

impl DecisionStump {
    pub fn output(&self, x: &[f64]) -> Result<Sign> {
        match *self {
            DecisionStump::Threshold {
                feature,
                threshold,
                polarity,
            } => {
                let v = x.get(feature).ok_or(Error::FeatureMismatch {
                    expected: feature + 1,
                    actual: x.len(),
                })?;
                Ok(if *v >= threshold { polarity } else { -polarity })
            }
            DecisionStump::Constant { output } => Ok(output),
        }
    }

    /// The stump whose output is always the opposite of this one.
    pub fn negated(&self) -> Self {
        match *self {
            DecisionStump::Threshold {
                feature,
                threshold,
                polarity,
            } => DecisionStump::Threshold {
                feature,
                threshold,
                polarity: -polarity,
            },
            DecisionStump::Constant { output } => DecisionStump::Constant { output: -output },
        }
    }
}

pub fn stump_output(stump: &DecisionStump, x: &[f64]) -> Result<Sign> {
    stump.output(x)
}

/// Nonempty list of stumps trained on data with `n_features` columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEnsemble")]
pub struct StumpEnsemble {
    n_features: usize,
    stumps: Vec<DecisionStump>,
}

#[derive(Deserialize)]
struct RawEnsemble {
    n_features: usize,
    stumps: Vec<DecisionStump>,
}

impl TryFrom<RawEnsemble> for StumpEnsemble {
    type Error = Error;

    fn try_from(raw: RawEnsemble) -> Result<Self> {
        StumpEnsemble::new(raw.n_features, raw.stumps)
    }
}

impl StumpEnsemble {
    pub fn new(n_features: usize, stumps: Vec<DecisionStump>) -> Result<Self> {
        if stumps.is_empty() {
            return Err(Error::InvalidArgument("an ensemble needs at least one stump".into()));
        }
        for s in &stumps {
            if let DecisionStump::Threshold { feature, threshold, .. } = *s {
                if feature >= n_features {
                    return Err(Error::FeatureMismatch {
                        expected: n_features,
                        actual: feature + 1,
                    });
                }
                if !threshold.is_finite() {
                    return Err(Error::InvalidArgument(format!("non-finite threshold {threshold}")));
                }
            }
        }
        Ok(Self { n_features, stumps })
    }

    pub fn stumps(&self) -> &[DecisionStump] {
        &self.stumps
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn len(&self) -> usize {
        self.stumps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stumps.is_empty()
    }

    /// Sum of stump outputs, an integer in `[-T, T]`.
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        self.check_width(x)?;
        let mut sum = 0;
        for s in &self.stumps {
            sum += s.output(x)?.value();
        }
        Ok(sum as f64)
    }

    pub fn predict_one(&self, x: &[f64]) -> Result<Label> {
        Ok(u8::from(self.score(x)? > 0.0))
    }

    pub fn predict_rows<'a, I>(&self, rows: I) -> Result<Vec<Label>>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        rows.into_iter().map(|x| self.predict_one(x)).collect()
    }

    pub fn predict(&self, dataset: &LabeledDataset) -> Result<Vec<Label>> {
        if dataset.n_features() != self.n_features {
            return Err(Error::FeatureMismatch {
                expected: self.n_features,
                actual: dataset.n_features(),
            });
        }
        self.predict_rows(dataset.rows())
    }

    fn check_width(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_features {
            return Err(Error::FeatureMismatch {
                expected: self.n_features,
                actual: x.len(),
            });
        }
        Ok(())
    }
}

pub fn ensemble_score(ensemble: &StumpEnsemble, x: &[f64]) -> Result<f64> {
    ensemble.score(x)
}

pub fn ensemble_predict(ensemble: &StumpEnsemble, dataset: &LabeledDataset) -> Result<Vec<Label>> {
    ensemble.predict(dataset)
}

/// What the learner minimizes: the largest total cost over `matrices`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostObjective {
    pub stats: ClassStats,
    pub matrices: CostMatrixSet,
}

impl CostObjective {
    pub fn new(stats: ClassStats, matrices: CostMatrixSet) -> Self {
        Self { stats, matrices }
    }

    /// Objective at the operating point given by raw error counts.
    pub fn value_from_counts(&self, errors0: usize, errors1: usize) -> f64 {
        let point = OperatingPoint::from_counts(errors0, errors1, &self.stats);
        max_total_cost(&self.stats, &point, &self.matrices).0
    }
}

pub fn objective_value(objective: &CostObjective, predictions: &[Label], labels: &[Label]) -> Result<f64> {
    let stats = ClassStats::from_labels(labels)?;
    if stats != objective.stats {
        return Err(Error::InvalidArgument(format!(
            "objective built for {:?}, labels give {:?}",
            objective.stats, stats
        )));
    }
    let (e0, e1) = error_counts(predictions, labels)?;
    Ok(objective.value_from_counts(e0, e1))
}

/// Instances of one feature sorted by value, plus the admissible cut points.
struct FeatureCuts {
    order: Vec<usize>,
    /// `(prefix length, threshold)`: the first `prefix` instances of `order`
    /// lie strictly below `threshold`, the rest at or above it.
    cuts: Vec<(usize, f64)>,
}

fn feature_cuts(dataset: &LabeledDataset, feature: usize) -> FeatureCuts {
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    order.sort_by(|&a, &b| dataset.value(a, feature).total_cmp(&dataset.value(b, feature)));
    let mut cuts = Vec::new();
    for k in 1..order.len() {
        let lo = dataset.value(order[k - 1], feature);
        let hi = dataset.value(order[k], feature);
        if lo < hi {
            cuts.push((k, midpoint(lo, hi)));
        }
    }
    FeatureCuts { order, cuts }
}

/// A threshold strictly above `lo` and at most `hi`.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid > lo && mid <= hi {
        mid
    } else {
        hi
    }
}

/// All candidate stumps in search order: by feature, then threshold, then
/// polarity (`+1` before `-1`); the constants `+1` and `-1` last.
pub fn enumerate_candidate_stumps(dataset: &LabeledDataset) -> Vec<DecisionStump> {
    let mut out = Vec::new();
    for feature in 0..dataset.n_features() {
        for &(_, threshold) in &feature_cuts(dataset, feature).cuts {
            for polarity in [Sign::Plus, Sign::Minus] {
                out.push(DecisionStump::Threshold {
                    feature,
                    threshold,
                    polarity,
                });
            }
        }
    }
    out.push(DecisionStump::Constant { output: Sign::Plus });
    out.push(DecisionStump::Constant { output: Sign::Minus });
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Errors {
    class0: usize,
    class1: usize,
}

impl std::ops::Add for Errors {
    type Output = Errors;

    fn add(self, o: Errors) -> Errors {
        Errors {
            class0: self.class0 + o.class0,
            class1: self.class1 + o.class1,
        }
    }
}

impl std::ops::Sub for Errors {
    type Output = Errors;

    fn sub(self, o: Errors) -> Errors {
        Errors {
            class0: self.class0 - o.class0,
            class1: self.class1 - o.class1,
        }
    }
}

/// Error contributed by one instance if the new stump outputs `sign` on it.
fn instance_error(label: Label, score: i32, sign: Sign) -> Errors {
    let predicted = score + sign.value() > 0;
    match (label, predicted) {
        (0, true) => Errors { class0: 1, class1: 0 },
        (1, false) => Errors { class0: 0, class1: 1 },
        _ => Errors::default(),
    }
}

/// Greedy stagewise fit. Deterministic: candidates are scanned in
/// [`enumerate_candidate_stumps`] order and only a strictly better objective
/// replaces the incumbent.
pub fn fit_gam(
    dataset: &LabeledDataset,
    objective: &CostObjective,
    max_iters: usize,
    min_improvement: f64,
) -> Result<StumpEnsemble> {
    if max_iters == 0 {
        return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
    }
    if !(min_improvement >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "min_improvement {min_improvement} must be nonnegative"
        )));
    }
    let stats = ClassStats::from_labels(dataset.labels())?;
    if stats != objective.stats {
        return Err(Error::InvalidArgument(format!(
            "objective built for {:?}, dataset has {:?}",
            objective.stats, stats
        )));
    }

    let labels = dataset.labels();
    let sweeps: Vec<FeatureCuts> = (0..dataset.n_features()).map(|j| feature_cuts(dataset, j)).collect();
    let mut scores = vec![0i32; dataset.len()];
    let mut stumps: Vec<DecisionStump> = Vec::new();
    // empty ensemble: every score is 0, so everything is predicted class 0
    let mut current = objective.value_from_counts(0, stats.n1);

    let mut plus = vec![Errors::default(); dataset.len()];
    let mut minus = vec![Errors::default(); dataset.len()];

    for _ in 0..max_iters {
        for i in 0..dataset.len() {
            plus[i] = instance_error(labels[i], scores[i], Sign::Plus);
            minus[i] = instance_error(labels[i], scores[i], Sign::Minus);
        }
        let total_plus = plus.iter().fold(Errors::default(), |a, &e| a + e);
        let total_minus = minus.iter().fold(Errors::default(), |a, &e| a + e);

        let mut best: Option<(f64, DecisionStump)> = None;
        let mut consider = |value: f64, stump: DecisionStump| {
            if best.as_ref().is_none_or(|(v, _)| value < *v) {
                best = Some((value, stump));
            }
        };

        for (feature, sweep) in sweeps.iter().enumerate() {
            let mut prefix_plus = Errors::default();
            let mut prefix_minus = Errors::default();
            let mut consumed = 0;
            for &(prefix, threshold) in &sweep.cuts {
                while consumed < prefix {
                    let i = sweep.order[consumed];
                    prefix_plus = prefix_plus + plus[i];
                    prefix_minus = prefix_minus + minus[i];
                    consumed += 1;
                }
                // polarity +1: below the cut outputs -1, at or above outputs +1
                let e = prefix_minus + (total_plus - prefix_plus);
                consider(
                    objective.value_from_counts(e.class0, e.class1),
                    DecisionStump::Threshold {
                        feature,
                        threshold,
                        polarity: Sign::Plus,
                    },
                );
                let e = prefix_plus + (total_minus - prefix_minus);
                consider(
                    objective.value_from_counts(e.class0, e.class1),
                    DecisionStump::Threshold {
                        feature,
                        threshold,
                        polarity: Sign::Minus,
                    },
                );
            }
        }
        consider(
            objective.value_from_counts(total_plus.class0, total_plus.class1),
            DecisionStump::Constant { output: Sign::Plus },
        );
        consider(
            objective.value_from_counts(total_minus.class0, total_minus.class1),
            DecisionStump::Constant { output: Sign::Minus },
        );

        let (value, stump) = best.expect("the constant stumps are always candidates");
        if !(value < current - min_improvement) {
            break;
        }
        for (i, s) in scores.iter_mut().enumerate() {
            *s += stump.output(dataset.row(i))?.value();
        }
        stumps.push(stump);
        current = value;
    }

    if stumps.is_empty() {
        let plus_value = objective.value_from_counts(stats.n0, 0);
        let minus_value = objective.value_from_counts(0, stats.n1);
        let output = if plus_value <= minus_value {
            Sign::Plus
        } else {
            Sign::Minus
        };
        stumps.push(DecisionStump::Constant { output });
    }
    StumpEnsemble::new(dataset.n_features(), stumps)
}
