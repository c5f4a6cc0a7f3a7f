//! Classifier-dominance geometry in the `(p10, p01)` plane.
//!
//! A front is the lower-left convex hull of the non-dominated operating points.
//! Along such a front the total cost for any fixed cost matrix first
//! decreases and then increases, which is what lets the minimax search over a
//! set of matrices be reduced to per-matrix minima plus pairwise minimax
//! points ([`candidate_minimax`]). [`brute_minimax`] is the exhaustive oracle
//! that reduction is checked against.

use std::cmp::Ordering;

use crate::cost::{max_total_cost, total_cost, ClassStats, CostMatrix, CostMatrixSet, OperatingPoint};
use crate::error::{Error, Result};

/// Relative tolerance for cost-value ties.
pub const REL_TOL: f64 = 1e-9;

/// Absolute tolerance on the hull turn test; coordinates live in the unit square.
pub const CONVEXITY_TOL: f64 = 1e-9;

/// `|a - b| <= REL_TOL * max(|a|, |b|)`.
pub fn costs_tie(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs())
}

/// Convex chain of operating points, strictly increasing in `p10` and
/// strictly decreasing in `p01`.
#[derive(Debug, Clone, PartialEq)]
pub struct Front {
    points: Vec<OperatingPoint>,
}

impl Front {
    /// Validates ordering and convexity. The convexity test is the turn
    /// `(b - a) x (c - b) >= -CONVEXITY_TOL` for consecutive `a, b, c`, which
    /// is the non-increasing absolute slope condition without the division.
    pub fn new(points: Vec<OperatingPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        for (i, w) in points.windows(2).enumerate() {
            if !(w[0].p10() < w[1].p10() && w[0].p01() > w[1].p01()) {
                return Err(Error::InvalidFront(format!(
                    "points {i} and {} are not strictly ordered: {:?}, {:?}",
                    i + 1,
                    w[0],
                    w[1]
                )));
            }
        }
        for (i, w) in points.windows(3).enumerate() {
            if turn(&w[0], &w[1], &w[2]) < -CONVEXITY_TOL {
                return Err(Error::InvalidFront(format!(
                    "absolute slope increases at point {}",
                    i + 1
                )));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[OperatingPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Cross product of `(b - a)` and `(c - b)`; positive for a left turn.
fn turn(a: &OperatingPoint, b: &OperatingPoint, c: &OperatingPoint) -> f64 {
    (b.p10() - a.p10()) * (c.p01() - b.p01()) - (b.p01() - a.p01()) * (c.p10() - b.p10())
}

/// Total cost of each front point under one cost matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CostProfile {
    pub values: Vec<f64>,
}

/// Minimum value and every index attaining it within [`REL_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct TieSet {
    pub value: f64,
    pub indices: Vec<usize>,
}

impl TieSet {
    fn of(values: &[f64]) -> Self {
        let value = values.iter().copied().fold(f64::INFINITY, f64::min);
        let indices = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| costs_tie(v, value))
            .map(|(i, _)| i)
            .collect();
        Self { value, indices }
    }
}

/// `a` dominates `b` when it is no worse in both error rates and not equal.
pub fn point_dominates(a: &OperatingPoint, b: &OperatingPoint) -> bool {
    a.p10() <= b.p10() && a.p01() <= b.p01() && a != b
}

/// The points no other input point dominates, sorted by `p10`, duplicates collapsed.
pub fn pareto_filter(points: &[OperatingPoint]) -> Result<Vec<OperatingPoint>> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.p10().total_cmp(&b.p10()).then(a.p01().total_cmp(&b.p01())));
    let mut kept: Vec<OperatingPoint> = Vec::new();
    for p in sorted {
        // Sorted by p10 then p01: p survives iff it strictly improves p01.
        if kept.last().is_none_or(|last| p.p01() < last.p01()) {
            kept.push(p);
        }
    }
    Ok(kept)
}

/// Lower-left convex hull of the non-dominated points (monotone chain).
/// Collinear points are kept.
pub fn convex_front(points: &[OperatingPoint]) -> Result<Front> {
    let pareto = pareto_filter(points)?;
    let mut hull: Vec<OperatingPoint> = Vec::with_capacity(pareto.len());
    for p in pareto {
        while hull.len() >= 2 && turn(&hull[hull.len() - 2], &hull[hull.len() - 1], &p) < 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let front = Front::new(hull);
    assert!(front.is_ok(), "hull construction broke the front invariant: {front:?}");
    front
}

/// Orders `L(h1)` against `L(h2)` by the slope test
/// `(p01(h1) - p01(h2)) * n1 * c1` vs `(p10(h2) - p10(h1)) * n0 * c0`,
/// with `h1` left of and above `h2`. The two sides compare equal when they
/// differ by at most `REL_TOL * (n0 * c0 + n1 * c1)`.
pub fn slope_compare(h1: &OperatingPoint, h2: &OperatingPoint, stats: &ClassStats, c: &CostMatrix) -> Result<Ordering> {
    if !(h1.p10() <= h2.p10() && h1.p01() >= h2.p01()) || h1 == h2 {
        return Err(Error::NotInLemmaConfiguration(format!(
            "need p10(h1) <= p10(h2), p01(h1) >= p01(h2) and h1 != h2; got {h1:?}, {h2:?}"
        )));
    }
    let w0 = stats.n0 as f64 * c.c0();
    let w1 = stats.n1 as f64 * c.c1();
    let vertical = (h1.p01() - h2.p01()) * w1;
    let horizontal = (h2.p10() - h1.p10()) * w0;
    Ok(compare_with_scale(vertical, horizontal, w0 + w1))
}

/// Three-way comparison with an absolute slack of `REL_TOL * scale`.
pub fn compare_with_scale(a: f64, b: f64, scale: f64) -> Ordering {
    if (a - b).abs() <= REL_TOL * scale {
        Ordering::Equal
    } else if a > b {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

pub fn cost_profile(front: &Front, stats: &ClassStats, c: &CostMatrix) -> CostProfile {
    CostProfile {
        values: front.points.iter().map(|p| total_cost(stats, p, c)).collect(),
    }
}

/// True iff the profile is non-increasing up to some index and non-decreasing
/// after it. Each comparison is slack by `tol` relative to the largest
/// magnitude in the profile.
pub fn check_unimodal(profile: &CostProfile, tol: f64) -> Result<bool> {
    let v = &profile.values;
    if v.is_empty() {
        return Err(Error::InvalidArgument("empty cost profile".into()));
    }
    if !(tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be nonnegative")));
    }
    let slack = tol * v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut i = 0;
    while i + 1 < v.len() && v[i + 1] <= v[i] + slack {
        i += 1;
    }
    while i + 1 < v.len() {
        if v[i + 1] < v[i] - slack {
            return Ok(false);
        }
        i += 1;
    }
    Ok(true)
}

/// Front indices minimizing the total cost for `c`.
pub fn single_best(front: &Front, stats: &ClassStats, c: &CostMatrix) -> Vec<usize> {
    TieSet::of(&cost_profile(front, stats, c).values).indices
}

/// Minimum over the front of `max(L_ci, L_cj)` with its full tie set.
pub fn pair_minimax(front: &Front, stats: &ClassStats, ci: &CostMatrix, cj: &CostMatrix) -> TieSet {
    let values: Vec<f64> = front
        .points
        .iter()
        .map(|p| total_cost(stats, p, ci).max(total_cost(stats, p, cj)))
        .collect();
    TieSet::of(&values)
}

/// Exhaustive minimax over every front point.
pub fn brute_minimax(front: &Front, stats: &ClassStats, u: &CostMatrixSet) -> TieSet {
    let values: Vec<f64> = front.points.iter().map(|p| max_total_cost(stats, p, u).0).collect();
    TieSet::of(&values)
}

/// Minimax restricted to the per-matrix minimizers and the pairwise minimax
/// tie sets. Returns the value and the smallest index attaining it.
///
/// `u` should be free of dominated matrices.
pub fn candidate_minimax(front: &Front, stats: &ClassStats, u: &CostMatrixSet) -> (f64, usize) {
    let mut candidate = vec![false; front.len()];
    let matrices = u.as_slice();
    for c in matrices {
        for i in single_best(front, stats, c) {
            candidate[i] = true;
        }
    }
    for (i, ci) in matrices.iter().enumerate() {
        for cj in &matrices[i + 1..] {
            for idx in pair_minimax(front, stats, ci, cj).indices {
                candidate[idx] = true;
            }
        }
    }
    let mut best = (f64::INFINITY, 0);
    for (idx, _) in candidate.iter().enumerate().filter(|(_, &c)| c) {
        let v = max_total_cost(stats, &front.points[idx], u).0;
        if v < best.0 {
            best = (v, idx);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn pt(p10: f64, p01: f64) -> OperatingPoint {
        OperatingPoint::new(p10, p01).unwrap()
    }

    fn pts(raw: &[(f64, f64)]) -> Vec<OperatingPoint> {
        raw.iter().map(|&(a, b)| pt(a, b)).collect()
    }

    fn cm(c0: f64, c1: f64) -> CostMatrix {
        CostMatrix::new(c0, c1).unwrap()
    }

    fn balanced() -> ClassStats {
        ClassStats::new(10, 10).unwrap()
    }

    fn three_point_front() -> Front {
        convex_front(&pts(&[(0.0, 1.0), (0.5, 0.25), (1.0, 0.0)])).unwrap()
    }

    #[test]
    fn dominance_examples() {
        assert!(point_dominates(&pt(0.1, 0.2), &pt(0.3, 0.4)));
        assert!(!point_dominates(&pt(0.1, 0.5), &pt(0.3, 0.2)));
        assert!(!point_dominates(&pt(0.1, 0.5), &pt(0.1, 0.5)));
    }

    #[test]
    fn pareto_filter_examples() {
        let kept = pareto_filter(&pts(&[(0.1, 0.5), (0.2, 0.3), (0.4, 0.4), (0.3, 0.2)])).unwrap();
        assert_eq!(kept, pts(&[(0.1, 0.5), (0.2, 0.3), (0.3, 0.2)]));
        assert_eq!(pareto_filter(&pts(&[(0.3, 0.3)])).unwrap(), pts(&[(0.3, 0.3)]));
        assert_eq!(
            pareto_filter(&pts(&[(0.3, 0.3), (0.3, 0.3)])).unwrap(),
            pts(&[(0.3, 0.3)])
        );
        assert!(matches!(pareto_filter(&[]), Err(Error::EmptyPointSet)));
    }

    #[test]
    fn convex_front_examples() {
        assert_eq!(
            three_point_front().points(),
            pts(&[(0.0, 1.0), (0.5, 0.25), (1.0, 0.0)]).as_slice()
        );
        let f = convex_front(&pts(&[(0.0, 1.0), (0.5, 0.6), (1.0, 0.0)])).unwrap();
        assert_eq!(f.points(), pts(&[(0.0, 1.0), (1.0, 0.0)]).as_slice());
        assert_eq!(convex_front(&pts(&[(0.2, 0.7)])).unwrap().len(), 1);
        assert!(convex_front(&[]).is_err());
    }

    #[test]
    fn front_rejects_invalid_chains() {
        assert!(Front::new(pts(&[(0.0, 1.0), (0.0, 0.5)])).is_err());
        assert!(Front::new(pts(&[(0.0, 1.0), (0.5, 0.6), (1.0, 0.0)])).is_err());
        assert!(Front::new(pts(&[(0.0, 1.0), (0.5, 0.5), (1.0, 0.0)])).is_ok());
    }

    #[test]
    fn slope_compare_examples() {
        let (h1, h2) = (pt(0.1, 0.4), pt(0.3, 0.2));
        let s = balanced();
        assert_eq!(slope_compare(&h1, &h2, &s, &cm(1.0, 1.0)).unwrap(), Ordering::Equal);
        assert_eq!(slope_compare(&h1, &h2, &s, &cm(1.0, 3.0)).unwrap(), Ordering::Greater);
        assert_eq!(slope_compare(&h1, &h2, &s, &cm(3.0, 1.0)).unwrap(), Ordering::Less);
        assert!(matches!(
            slope_compare(&h2, &h1, &s, &cm(1.0, 1.0)),
            Err(Error::NotInLemmaConfiguration(_))
        ));
        assert!(slope_compare(&h1, &h1, &s, &cm(1.0, 1.0)).is_err());
        // vertical segment and a zero cost never divide
        let v = slope_compare(&pt(0.2, 0.9), &pt(0.2, 0.1), &s, &cm(0.0, 1.0)).unwrap();
        assert_eq!(v, Ordering::Greater);
    }

    #[test]
    fn cost_profile_examples() {
        let f = three_point_front();
        let s = balanced();
        assert_eq!(cost_profile(&f, &s, &cm(2.0, 1.0)).values, vec![10.0, 12.5, 20.0]);
        assert_eq!(cost_profile(&f, &s, &cm(1.0, 2.0)).values, vec![20.0, 10.0, 10.0]);
        let single = convex_front(&pts(&[(0.2, 0.2)])).unwrap();
        assert_eq!(cost_profile(&single, &s, &cm(1.0, 1.0)).values.len(), 1);
    }

    #[test]
    fn unimodal_examples() {
        let p = |v: &[f64]| CostProfile { values: v.to_vec() };
        assert!(check_unimodal(&p(&[3.0, 2.0, 1.0, 2.0, 3.0]), 0.0).unwrap());
        assert!(!check_unimodal(&p(&[3.0, 1.0, 2.0, 1.0]), 0.0).unwrap());
        assert!(check_unimodal(&p(&[5.0]), 0.0).unwrap());
        assert!(check_unimodal(&p(&[2.0, 2.0, 1.0, 1.0, 4.0, 4.0]), 0.0).unwrap());
        assert!(check_unimodal(&p(&[3.0, 1.0, 1.0 - 1e-12, 2.0]), 1e-9).unwrap());
        assert!(check_unimodal(&p(&[]), 1e-9).is_err());
        assert!(check_unimodal(&p(&[1.0]), -1.0).is_err());
    }

    #[test]
    fn single_best_examples() {
        let f = three_point_front();
        let s = balanced();
        assert_eq!(single_best(&f, &s, &cm(2.0, 1.0)), vec![0]);
        assert_eq!(single_best(&f, &s, &cm(1.0, 2.0)), vec![1, 2]);
        let one = convex_front(&pts(&[(0.4, 0.4)])).unwrap();
        assert_eq!(single_best(&one, &s, &cm(1.0, 2.0)), vec![0]);
    }

    #[test]
    fn pair_minimax_examples() {
        let f = three_point_front();
        let s = balanced();
        let r = pair_minimax(&f, &s, &cm(2.0, 1.0), &cm(1.0, 2.0));
        assert_eq!(
            r,
            TieSet {
                value: 12.5,
                indices: vec![1]
            }
        );
        let same = pair_minimax(&f, &s, &cm(1.0, 2.0), &cm(1.0, 2.0));
        assert_eq!(same.indices, single_best(&f, &s, &cm(1.0, 2.0)));
        let one = convex_front(&pts(&[(0.4, 0.4)])).unwrap();
        assert_eq!(pair_minimax(&one, &s, &cm(2.0, 1.0), &cm(1.0, 2.0)).indices, vec![0]);
    }

    #[test]
    fn brute_and_candidate_minimax_examples() {
        let f = three_point_front();
        let s = balanced();
        let u = CostMatrixSet::from_pairs(&[(2.0, 1.0), (1.0, 2.0)]).unwrap();
        assert_eq!(
            brute_minimax(&f, &s, &u),
            TieSet {
                value: 12.5,
                indices: vec![1]
            }
        );
        assert_eq!(candidate_minimax(&f, &s, &u), (12.5, 1));

        let single = CostMatrixSet::singleton(cm(1.0, 2.0));
        assert_eq!(
            brute_minimax(&f, &s, &single).indices,
            single_best(&f, &s, &cm(1.0, 2.0))
        );
        assert_eq!(candidate_minimax(&f, &s, &single), (10.0, 1));

        let dup = CostMatrixSet::from_pairs(&[(2.0, 1.0), (1.0, 2.0), (2.0, 1.0)]).unwrap();
        assert_eq!(brute_minimax(&f, &s, &dup), brute_minimax(&f, &s, &u));
    }

    fn arb_points(max: usize) -> impl Strategy<Value = Vec<OperatingPoint>> {
        proptest::collection::vec((0.0..=1.0f64, 0.0..=1.0f64), 1..max)
            .prop_map(|v| v.into_iter().map(|(a, b)| pt(a, b)).collect())
    }

    proptest! {
        #[test]
        fn pareto_filter_is_exact(points in arb_points(40)) {
            let kept = pareto_filter(&points).unwrap();
            for a in &kept {
                for b in &kept {
                    prop_assert!(!point_dominates(a, b));
                }
            }
            for p in &points {
                prop_assert!(kept.contains(p) || kept.iter().any(|k| point_dominates(k, p)));
            }
        }

        #[test]
        fn convex_front_lies_below_inputs(points in arb_points(40)) {
            let front = convex_front(&points).unwrap();
            let fp = front.points();
            for p in &points {
                // every input is dominated by or on the hull, or above a hull segment
                let covered = fp.iter().any(|h| h == p || point_dominates(h, p))
                    || fp.windows(2).any(|w| {
                        p.p10() >= w[0].p10() && p.p10() <= w[1].p10() && turn(&w[0], &w[1], p) >= -1e-12
                    });
                prop_assert!(covered, "{p:?} not covered by {fp:?}");
            }
        }

        #[test]
        fn convex_front_is_permutation_invariant(points in arb_points(40), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut shuffled = points.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(convex_front(&points).unwrap(), convex_front(&shuffled).unwrap());
        }
    }
}
