//! Domain types shared by every module: datasets, cost matrices, operating
//! points, and the total-cost arithmetic
//!
//! ```text
//! L = n0 * p10 * c0 + n1 * p01 * c1
//! ```
//!
//! where `p10` is the fraction of class-0 instances predicted as class 1 and
//! `p01` the fraction of class-1 instances predicted as class 0. Correct
//! classifications cost nothing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary class label, always 0 or 1.
pub type Label = u8;

/// Feature matrix (row-major, `n x m`) with binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: Vec<f64>,
    labels: Vec<Label>,
    n_features: usize,
    feature_names: Option<Vec<String>>,
}

impl LabeledDataset {
    /// Builds a dataset from rows. Every row must have the same length, every
    /// value must be finite, and both classes must be present.
    pub fn from_rows(rows: Vec<Vec<f64>>, labels: Vec<Label>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::LengthMismatch {
                expected: rows.len(),
                actual: labels.len(),
            });
        }
        let n_features = rows.first().map_or(0, Vec::len);
        let mut features = Vec::with_capacity(rows.len() * n_features);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n_features {
                return Err(Error::InvalidDataset(format!(
                    "row {i} has {} features, expected {n_features}",
                    row.len()
                )));
            }
            features.extend(row);
        }
        Self::from_flat(features, labels, n_features)
    }

    /// Builds a dataset from a row-major buffer of `labels.len() * n_features` values.
    pub fn from_flat(features: Vec<f64>, labels: Vec<Label>, n_features: usize) -> Result<Self> {
        if features.len() != labels.len() * n_features {
            return Err(Error::LengthMismatch {
                expected: labels.len() * n_features,
                actual: features.len(),
            });
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            let (row, col) = (pos / n_features.max(1), pos % n_features.max(1));
            return Err(Error::InvalidDataset(format!(
                "non-finite feature value at row {row}, column {col}"
            )));
        }
        if let Some((i, l)) = labels.iter().enumerate().find(|(_, &l)| l > 1) {
            return Err(Error::InvalidDataset(format!("label {l} at row {i} is not 0 or 1")));
        }
        let dataset = Self {
            features,
            labels,
            n_features,
            feature_names: None,
        };
        class_stats(&dataset)?;
        Ok(dataset)
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_features {
            return Err(Error::LengthMismatch {
                expected: self.n_features,
                actual: names.len(),
            });
        }
        self.feature_names = Some(names);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.features[i * self.n_features + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.len()).map(move |i| self.row(i))
    }

    /// The instances at `indices`, in that order. Fails if the subset loses a class.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        let mut sub = Self::from_flat(features, labels, self.n_features)?;
        sub.feature_names = self.feature_names.clone();
        Ok(sub)
    }
}

/// Class counts and priors of a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassStats {
    pub n: usize,
    pub n0: usize,
    pub n1: usize,
}

impl ClassStats {
    pub fn new(n0: usize, n1: usize) -> Result<Self> {
        if n0 == 0 || n1 == 0 {
            return Err(Error::DegenerateDataset(format!(
                "class counts n0={n0}, n1={n1}; both classes are required"
            )));
        }
        Ok(Self { n: n0 + n1, n0, n1 })
    }

    pub fn from_labels(labels: &[Label]) -> Result<Self> {
        let n1 = labels.iter().filter(|&&l| l == 1).count();
        Self::new(labels.len() - n1, n1)
    }

    pub fn p0(&self) -> f64 {
        self.n0 as f64 / self.n as f64
    }

    pub fn p1(&self) -> f64 {
        self.n1 as f64 / self.n as f64
    }
}

/// Misclassification costs: `c0` for a class-0 instance predicted 1, `c1` for
/// a class-1 instance predicted 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCostMatrix")]
pub struct CostMatrix {
    c0: f64,
    c1: f64,
}

#[derive(Deserialize)]
struct RawCostMatrix {
    c0: f64,
    c1: f64,
}

impl TryFrom<RawCostMatrix> for CostMatrix {
    type Error = Error;

    fn try_from(raw: RawCostMatrix) -> Result<Self> {
        CostMatrix::new(raw.c0, raw.c1)
    }
}

impl CostMatrix {
    pub fn new(c0: f64, c1: f64) -> Result<Self> {
        let reason = if !c0.is_finite() || !c1.is_finite() {
            Some("costs must be finite")
        } else if c0 < 0.0 || c1 < 0.0 {
            Some("costs must be nonnegative")
        } else if c0 + c1 <= 0.0 {
            Some("costs must not both be zero")
        } else {
            None
        };
        match reason {
            Some(reason) => Err(Error::InvalidCostMatrix { c0, c1, reason }),
            None => Ok(Self { c0, c1 }),
        }
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    /// The same matrix with the class roles exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            c0: self.c1,
            c1: self.c0,
        }
    }
}

/// Per-class error rates `(p10, p01)` of a classifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    p10: f64,
    p01: f64,
}

impl OperatingPoint {
    pub fn new(p10: f64, p01: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p10) || !(0.0..=1.0).contains(&p01) {
            return Err(Error::InvalidOperatingPoint { p10, p01 });
        }
        Ok(Self { p10, p01 })
    }

    /// Operating point from raw error counts: `errors0` of `stats.n0` class-0
    /// instances and `errors1` of `stats.n1` class-1 instances misclassified.
    pub fn from_counts(errors0: usize, errors1: usize, stats: &ClassStats) -> Self {
        debug_assert!(errors0 <= stats.n0 && errors1 <= stats.n1);
        Self {
            p10: errors0 as f64 / stats.n0 as f64,
            p01: errors1 as f64 / stats.n1 as f64,
        }
    }

    pub fn p10(&self) -> f64 {
        self.p10
    }

    pub fn p01(&self) -> f64 {
        self.p01
    }
}

/// Nonempty ordered list of cost matrices. Order is significant for tie-breaking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<CostMatrix>", into = "Vec<CostMatrix>")]
pub struct CostMatrixSet(Vec<CostMatrix>);

impl TryFrom<Vec<CostMatrix>> for CostMatrixSet {
    type Error = Error;

    fn try_from(matrices: Vec<CostMatrix>) -> Result<Self> {
        Self::new(matrices)
    }
}

impl From<CostMatrixSet> for Vec<CostMatrix> {
    fn from(set: CostMatrixSet) -> Self {
        set.0
    }
}

impl CostMatrixSet {
    pub fn new(matrices: Vec<CostMatrix>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::EmptyCostSet);
        }
        Ok(Self(matrices))
    }

    pub fn singleton(c: CostMatrix) -> Self {
        Self(vec![c])
    }

    pub fn pair(a: CostMatrix, b: CostMatrix) -> Self {
        Self(vec![a, b])
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let matrices = pairs
            .iter()
            .map(|&(c0, c1)| CostMatrix::new(c0, c1))
            .collect::<Result<Vec<_>>>()?;
        Self::new(matrices)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[CostMatrix] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CostMatrix> {
        self.0.iter()
    }

    pub fn get(&self, i: usize) -> Option<&CostMatrix> {
        self.0.get(i)
    }
}

impl std::ops::Index<usize> for CostMatrixSet {
    type Output = CostMatrix;

    fn index(&self, i: usize) -> &CostMatrix {
        &self.0[i]
    }
}

impl<'a> IntoIterator for &'a CostMatrixSet {
    type Item = &'a CostMatrix;
    type IntoIter = std::slice::Iter<'a, CostMatrix>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

pub fn class_stats(dataset: &LabeledDataset) -> Result<ClassStats> {
    ClassStats::from_labels(dataset.labels())
}

/// Counts the misclassified instances of each class: `(class-0 predicted 1,
/// class-1 predicted 0)`.
pub fn error_counts(predictions: &[Label], labels: &[Label]) -> Result<(usize, usize)> {
    if predictions.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: labels.len(),
            actual: predictions.len(),
        });
    }
    let mut errors = (0, 0);
    for (&p, &y) in predictions.iter().zip(labels) {
        match (y, p) {
            (0, 1) => errors.0 += 1,
            (1, 0) => errors.1 += 1,
            _ => {}
        }
    }
    Ok(errors)
}

pub fn operating_point(predictions: &[Label], labels: &[Label]) -> Result<OperatingPoint> {
    let (e0, e1) = error_counts(predictions, labels)?;
    let stats = ClassStats::from_labels(labels)?;
    Ok(OperatingPoint::from_counts(e0, e1, &stats))
}

pub fn total_cost(stats: &ClassStats, point: &OperatingPoint, c: &CostMatrix) -> f64 {
    stats.n0 as f64 * point.p10 * c.c0 + stats.n1 as f64 * point.p01 * c.c1
}

/// Largest total cost over `u` and the smallest index attaining it.
pub fn max_total_cost(stats: &ClassStats, point: &OperatingPoint, u: &CostMatrixSet) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, c) in u.iter().enumerate() {
        let v = total_cost(stats, point, c);
        if v > best.0 {
            best = (v, i);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn stats(n0: usize, n1: usize) -> ClassStats {
        ClassStats::new(n0, n1).unwrap()
    }

    fn pt(p10: f64, p01: f64) -> OperatingPoint {
        OperatingPoint::new(p10, p01).unwrap()
    }

    fn cm(c0: f64, c1: f64) -> CostMatrix {
        CostMatrix::new(c0, c1).unwrap()
    }

    #[test]
    fn class_stats_counts() {
        let s = ClassStats::from_labels(&[0, 0, 1, 1]).unwrap();
        assert_eq!((s.n, s.n0, s.n1), (4, 2, 2));
        assert_eq!(s.p0(), 0.5);

        let s = ClassStats::from_labels(&[0, 0, 0, 1]).unwrap();
        assert_eq!((s.n0, s.n1), (3, 1));
        assert_eq!(s.p1(), 0.25);
        assert_eq!(s.p0() + s.p1(), 1.0);
    }

    #[test]
    fn single_class_is_degenerate() {
        let err = ClassStats::from_labels(&[1, 1, 1, 1]).unwrap_err();
        assert!(err.to_string().contains("degenerate dataset"), "{err}");
        let err = LabeledDataset::from_rows(vec![vec![1.0]; 4], vec![1; 4]).unwrap_err();
        assert!(matches!(err, Error::DegenerateDataset(_)));
    }

    #[test]
    fn dataset_rejects_bad_input() {
        assert!(LabeledDataset::from_rows(vec![vec![1.0], vec![2.0]], vec![0, 2]).is_err());
        assert!(LabeledDataset::from_rows(vec![vec![1.0], vec![f64::NAN]], vec![0, 1]).is_err());
        assert!(LabeledDataset::from_rows(vec![vec![1.0], vec![2.0, 3.0]], vec![0, 1]).is_err());
        assert!(LabeledDataset::from_rows(vec![vec![1.0]], vec![0, 1]).is_err());
        let d = LabeledDataset::from_rows(vec![vec![1.0, 5.0], vec![2.0, 6.0]], vec![0, 1]).unwrap();
        assert_eq!(d.row(1), &[2.0, 6.0]);
        assert_eq!(d.value(0, 1), 5.0);
        assert!(d.subset(&[0]).is_err());
    }

    #[test]
    fn operating_point_examples() {
        assert_eq!(operating_point(&[1, 0, 1, 0], &[0, 0, 1, 1]).unwrap(), pt(0.5, 0.5));
        assert_eq!(operating_point(&[0, 0, 1, 1], &[0, 0, 1, 1]).unwrap(), pt(0.0, 0.0));
        assert_eq!(operating_point(&[1, 1, 1, 1], &[0, 0, 1, 1]).unwrap(), pt(1.0, 0.0));
        assert!(matches!(
            operating_point(&[1, 1, 1], &[0, 0, 1, 1]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            operating_point(&[1, 1], &[0, 0]),
            Err(Error::DegenerateDataset(_))
        ));
    }

    #[test]
    fn cost_matrix_validation() {
        assert!(CostMatrix::new(0.0, 1.0).is_ok());
        assert!(CostMatrix::new(0.0, 0.0).is_err());
        assert!(CostMatrix::new(-1.0, 1.0).is_err());
        assert!(CostMatrix::new(f64::INFINITY, 1.0).is_err());
        assert!(serde_json::from_str::<CostMatrix>(r#"{"c0": -1, "c1": 2}"#).is_err());
        assert!(CostMatrixSet::new(vec![]).is_err());
        assert!(OperatingPoint::new(1.5, 0.0).is_err());
    }

    #[test]
    fn total_cost_examples() {
        let s = stats(10, 10);
        assert_eq!(total_cost(&stats(3, 7), &pt(0.0, 0.0), &cm(4.0, 9.0)), 0.0);
        assert_eq!(total_cost(&s, &pt(1.0, 1.0), &cm(2.0, 1.0)), 30.0);
        assert_eq!(total_cost(&s, &pt(0.5, 0.25), &cm(2.0, 1.0)), 12.5);
    }

    #[test]
    fn max_total_cost_examples() {
        let s = stats(10, 10);
        let single = CostMatrixSet::singleton(cm(2.0, 1.0));
        assert_eq!(max_total_cost(&s, &pt(0.5, 0.25), &single), (12.5, 0));
        let u = CostMatrixSet::from_pairs(&[(2.0, 1.0), (1.0, 2.0)]).unwrap();
        assert_eq!(max_total_cost(&s, &pt(0.5, 0.25), &u), (12.5, 0));
        assert_eq!(max_total_cost(&s, &pt(0.0, 1.0), &u), (20.0, 1));
        // ties resolve to the smallest index
        assert_eq!(max_total_cost(&s, &pt(0.5, 0.5), &u).1, 0);
    }

    fn arb_point() -> impl Strategy<Value = OperatingPoint> {
        (0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(a, b)| pt(a, b))
    }

    fn arb_matrix() -> impl Strategy<Value = CostMatrix> {
        (0.0..10.0f64, 0.0..10.0f64)
            .prop_filter("not both zero", |(a, b)| a + b > 0.0)
            .prop_map(|(a, b)| cm(a, b))
    }

    proptest! {
        #[test]
        fn total_cost_is_linear(a in arb_point(), b in arb_point(), alpha in 0.0..=1.0f64,
                                n0 in 1usize..500, n1 in 1usize..500, c in arb_matrix()) {
            let s = stats(n0, n1);
            let mix = pt(alpha * a.p10() + (1.0 - alpha) * b.p10(),
                         alpha * a.p01() + (1.0 - alpha) * b.p01());
            let lhs = total_cost(&s, &mix, &c);
            let rhs = alpha * total_cost(&s, &a, &c) + (1.0 - alpha) * total_cost(&s, &b, &c);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(1.0));
        }

        #[test]
        fn total_cost_is_monotone(a in arb_point(), dx in 0.0..=1.0f64, dy in 0.0..=1.0f64,
                                  n0 in 1usize..500, n1 in 1usize..500, c in arb_matrix()) {
            let s = stats(n0, n1);
            let b = pt((a.p10() + dx).min(1.0), (a.p01() + dy).min(1.0));
            prop_assert!(total_cost(&s, &a, &c) <= total_cost(&s, &b, &c));
        }

        #[test]
        fn max_matches_individual_costs(p in arb_point(), n0 in 1usize..500, n1 in 1usize..500,
                                        ms in proptest::collection::vec(arb_matrix(), 1..20)) {
            let s = stats(n0, n1);
            let u = CostMatrixSet::new(ms.clone()).unwrap();
            let (v, i) = max_total_cost(&s, &p, &u);
            let costs: Vec<f64> = ms.iter().map(|c| total_cost(&s, &p, c)).collect();
            let best = costs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert_eq!(v, best);
            prop_assert_eq!(i, costs.iter().position(|&x| x == best).unwrap());
        }
    }
}
