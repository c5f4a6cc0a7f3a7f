use proptest::prelude::*;

use cost_minimax::cost::{ClassStats, CostMatrixSet, Label, LabeledDataset};
use cost_minimax::learner::{
    enumerate_candidate_stumps, fit_gam, objective_value, CostObjective, DecisionStump, Sign, StumpEnsemble,
};

/// Greedy fit written directly from the definition: score every candidate by
/// predicting with the extended ensemble.
fn naive_fit(
    d: &LabeledDataset,
    objective: &CostObjective,
    max_iters: usize,
    min_improvement: f64,
) -> Vec<DecisionStump> {
    let candidates = enumerate_candidate_stumps(d);
    let value = |stumps: &[DecisionStump]| -> f64 {
        let preds: Vec<Label> = if stumps.is_empty() {
            vec![0; d.len()]
        } else {
            StumpEnsemble::new(d.n_features(), stumps.to_vec())
                .unwrap()
                .predict(d)
                .unwrap()
        };
        objective_value(objective, &preds, d.labels()).unwrap()
    };
    let mut stumps: Vec<DecisionStump> = Vec::new();
    let mut current = value(&stumps);
    for _ in 0..max_iters {
        let mut best: Option<(f64, DecisionStump)> = None;
        for c in &candidates {
            let mut trial = stumps.clone();
            trial.push(*c);
            let v = value(&trial);
            if best.is_none_or(|(b, _)| v < b) {
                best = Some((v, *c));
            }
        }
        let (v, c) = best.unwrap();
        if current - v <= min_improvement {
            break;
        }
        stumps.push(c);
        current = v;
    }
    if stumps.is_empty() {
        let plus = value(&[DecisionStump::Constant { output: Sign::Plus }]);
        let minus = value(&[DecisionStump::Constant { output: Sign::Minus }]);
        let output = if minus < plus { Sign::Minus } else { Sign::Plus };
        stumps.push(DecisionStump::Constant { output });
    }
    stumps
}

fn arb_problem() -> impl Strategy<Value = (LabeledDataset, CostMatrixSet)> {
    (2usize..4, 4usize..14)
        .prop_flat_map(|(m, n)| {
            (
                proptest::collection::vec(proptest::collection::vec(0u8..5, m), n),
                proptest::collection::vec(0u8..2, n),
                proptest::collection::vec((1u8..10, 1u8..10), 1..4),
            )
        })
        .prop_filter_map("both classes", |(rows, labels, costs)| {
            let rows: Vec<Vec<f64>> = rows
                .into_iter()
                .map(|r| r.into_iter().map(f64::from).collect())
                .collect();
            let d = LabeledDataset::from_rows(rows, labels).ok()?;
            let pairs: Vec<(f64, f64)> = costs.into_iter().map(|(a, b)| (f64::from(a), f64::from(b))).collect();
            Some((d, CostMatrixSet::from_pairs(&pairs).ok()?))
        })
}

fn mirrored(d: &LabeledDataset, u: &CostMatrixSet) -> (LabeledDataset, CostMatrixSet) {
    let rows: Vec<Vec<f64>> = d.rows().map(<[f64]>::to_vec).collect();
    let labels = d.labels().iter().map(|l| 1 - l).collect();
    let pairs: Vec<(f64, f64)> = u.iter().map(|c| (c.c1(), c.c0())).collect();
    (
        LabeledDataset::from_rows(rows, labels).unwrap(),
        CostMatrixSet::from_pairs(&pairs).unwrap(),
    )
}

fn train_value(d: &LabeledDataset, u: &CostMatrixSet, model: &StumpEnsemble) -> f64 {
    let objective = CostObjective::new(ClassStats::from_labels(d.labels()).unwrap(), u.clone());
    objective_value(&objective, &model.predict(d).unwrap(), d.labels()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fit_matches_naive_greedy((d, u) in arb_problem(), iters in 1usize..6) {
        let objective = CostObjective::new(ClassStats::from_labels(d.labels()).unwrap(), u);
        let fitted = fit_gam(&d, &objective, iters, 1e-9).unwrap();
        let naive = naive_fit(&d, &objective, iters, 1e-9);
        prop_assert_eq!(fitted.stumps(), naive.as_slice());
        prop_assert!(fitted.len() <= iters);
    }

    #[test]
    fn accepted_stumps_strictly_improve((d, u) in arb_problem()) {
        let objective = CostObjective::new(ClassStats::from_labels(d.labels()).unwrap(), u.clone());
        let fitted = fit_gam(&d, &objective, 10, 1e-9).unwrap();
        if let [DecisionStump::Threshold { .. }, ..] = fitted.stumps() {
            let mut previous = objective_value(&objective, &vec![0; d.len()], d.labels()).unwrap();
            for t in 1..=fitted.len() {
                let prefix = StumpEnsemble::new(d.n_features(), fitted.stumps()[..t].to_vec()).unwrap();
                let v = train_value(&d, &u, &prefix);
                prop_assert!(previous - v > 1e-9, "prefix {}: {} -> {}", t, previous, v);
                previous = v;
            }
        }
    }

    #[test]
    fn one_stump_fit_is_mirror_symmetric((d, u) in arb_problem()) {
        let (md, mu) = mirrored(&d, &u);
        let fit = |d: &LabeledDataset, u: &CostMatrixSet| {
            let objective = CostObjective::new(ClassStats::from_labels(d.labels()).unwrap(), u.clone());
            fit_gam(d, &objective, 1, 1e-9).unwrap()
        };
        let a = fit(&d, &u);
        let b = fit(&md, &mu);
        prop_assert_eq!(train_value(&d, &u, &a), train_value(&md, &mu, &b));
        // the mirrored model of `a` is the negated stump, and it scores the same
        let negated = StumpEnsemble::new(d.n_features(), a.stumps().iter().map(DecisionStump::negated).collect()).unwrap();
        prop_assert_eq!(train_value(&md, &mu, &negated), train_value(&d, &u, &a));
    }
}

#[test]
fn mirrored_problem_gives_mirrored_predictions() {
    // distinct values and a single stump, so no ties or zero scores arise
    let rows = vec![
        vec![0.3, 7.0],
        vec![1.1, 2.0],
        vec![2.4, 5.5],
        vec![3.2, 1.0],
        vec![4.8, 6.1],
        vec![5.5, 3.3],
        vec![6.9, 0.4],
    ];
    let labels = vec![0, 1, 0, 1, 1, 0, 1];
    let d = LabeledDataset::from_rows(rows, labels).unwrap();
    let u = CostMatrixSet::from_pairs(&[(2.0, 3.0)]).unwrap();
    let (md, mu) = mirrored(&d, &u);
    let fit = |d: &LabeledDataset, u: &CostMatrixSet| {
        let objective = CostObjective::new(ClassStats::from_labels(d.labels()).unwrap(), u.clone());
        fit_gam(d, &objective, 1, 1e-9).unwrap()
    };
    let a = fit(&d, &u).predict(&d).unwrap();
    let b = fit(&md, &mu).predict(&md).unwrap();
    assert_eq!(a.iter().map(|l| 1 - l).collect::<Vec<_>>(), b);
}
