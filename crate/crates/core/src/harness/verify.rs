//! Randomized checks of the front geometry against brute force.
//!
//! * `lemma1`: the slope test orders two front points the same way as their
//!   directly computed total costs.
//! * `lemma2`: total cost along a convex front is unimodal.
//! * `corollary`: minimax restricted to per-matrix minimizers and pairwise
//!   minimax points equals the exhaustive minimax.
//! * `dominance`: removing dominated matrices never changes the worst-case cost.
//!
//! Every trial draws from its own stream of the seed, so results do not
//! depend on the execution mode.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cost::{max_total_cost, total_cost, ClassStats, CostMatrix, CostMatrixSet, OperatingPoint};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::framework::filter_dominated;
use crate::geometry::{
    brute_minimax, candidate_minimax, check_unimodal, compare_with_scale, convex_front, cost_profile, costs_tie,
    slope_compare, Front,
};

use super::{stream_rng, TRIAL_STREAM_BASE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lemma1,
    Lemma2,
    Corollary,
    Dominance,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Lemma1, Suite::Lemma2, Suite::Corollary, Suite::Dominance];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::Lemma2 => "lemma2",
            Suite::Corollary => "corollary",
            Suite::Dominance => "dominance",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: Suite,
    pub seed: u64,
    pub trials: usize,
    pub passed: usize,
    pub first_counterexample: Option<String>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.trials
    }
}

/// Largest front size (anchors included) per suite.
pub const COROLLARY_MAX_POINTS: usize = 50;
pub const COROLLARY_MAX_MATRICES: usize = 20;
pub const LEMMA2_MAX_POINTS: usize = 100;
pub const DOMINANCE_MAX_MATRICES: usize = 20;
pub const COST_HI: f64 = 10.0;
pub const MAX_CLASS_COUNT: usize = 1000;

pub fn random_point<R: Rng>(rng: &mut R) -> OperatingPoint {
    OperatingPoint::new(rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0)).expect("unit square")
}

/// Up to `max_points - 2` uniform points plus the anchors `(0, 1)` and
/// `(1, 0)`, reduced to their lower-left hull.
pub fn random_front<R: Rng>(rng: &mut R, max_points: usize) -> Front {
    let extra = rng.gen_range(0..=max_points.saturating_sub(2));
    let mut points = vec![
        OperatingPoint::new(0.0, 1.0).expect("anchor"),
        OperatingPoint::new(1.0, 0.0).expect("anchor"),
    ];
    points.extend((0..extra).map(|_| random_point(rng)));
    convex_front(&points).expect("nonempty")
}

pub fn random_matrix<R: Rng>(rng: &mut R, hi: f64) -> CostMatrix {
    loop {
        if let Ok(c) = CostMatrix::new(rng.gen_range(0.0..hi), rng.gen_range(0.0..hi)) {
            return c;
        }
    }
}

/// `k` pairwise non-dominated matrices with entries in `[0, hi)`: sorted
/// `c0` values paired with reverse-sorted `c1` values.
pub fn random_antichain<R: Rng>(rng: &mut R, k: usize, hi: f64) -> CostMatrixSet {
    loop {
        let mut c0: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..hi)).collect();
        let mut c1: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..hi)).collect();
        c0.sort_by(f64::total_cmp);
        c1.sort_by(|a, b| b.total_cmp(a));
        let distinct = c0.windows(2).all(|w| w[0] < w[1]) && c1.windows(2).all(|w| w[0] > w[1]);
        let pairs: Vec<(f64, f64)> = c0.into_iter().zip(c1).collect();
        if let (true, Ok(set)) = (distinct, CostMatrixSet::from_pairs(&pairs)) {
            return set;
        }
    }
}

pub fn random_stats<R: Rng>(rng: &mut R) -> ClassStats {
    ClassStats::new(rng.gen_range(1..=MAX_CLASS_COUNT), rng.gen_range(1..=MAX_CLASS_COUNT)).expect("positive counts")
}

/// One trial; `Some(description)` on failure.
type Trial = fn(&mut ChaCha8Rng) -> Option<String>;

fn lemma1_trial(rng: &mut ChaCha8Rng) -> Option<String> {
    let stats = random_stats(rng);
    // half the trials on a coarse grid with integer costs, where exact ties are common
    let grid = rng.gen_bool(0.5);
    let (a, b, c) = loop {
        let (a, b, c) = if grid {
            let g = |rng: &mut ChaCha8Rng| rng.gen_range(0..=10) as f64 / 10.0;
            let a = OperatingPoint::new(g(rng), g(rng)).expect("grid");
            let b = OperatingPoint::new(g(rng), g(rng)).expect("grid");
            let c = CostMatrix::new(rng.gen_range(0..10) as f64, rng.gen_range(0..10) as f64);
            (a, b, c)
        } else {
            let c = Ok(random_matrix(rng, COST_HI));
            (random_point(rng), random_point(rng), c)
        };
        let Ok(c) = c else { continue };
        if a == b {
            continue;
        }
        // arrange into the lemma configuration: h1 left of and above h2
        let (lo, hi) = if a.p10() <= b.p10() { (a, b) } else { (b, a) };
        let h1 = OperatingPoint::new(lo.p10(), lo.p01().max(hi.p01())).expect("unit square");
        let h2 = OperatingPoint::new(hi.p10(), lo.p01().min(hi.p01())).expect("unit square");
        if h1 != h2 {
            break (h1, h2, c);
        }
    };
    let by_slope = match slope_compare(&a, &b, &stats, &c) {
        Ok(o) => o,
        Err(e) => return Some(format!("slope_compare failed: {e}; h1={a:?} h2={b:?}")),
    };
    let (l1, l2) = (total_cost(&stats, &a, &c), total_cost(&stats, &b, &c));
    let scale = stats.n0 as f64 * c.c0() + stats.n1 as f64 * c.c1();
    let direct = compare_with_scale(l1, l2, scale);
    (by_slope != direct).then(|| {
        format!(
            "h1={a:?} h2={b:?} stats={stats:?} c={c:?}: slope test {by_slope:?}, direct {direct:?} (L1={l1}, L2={l2})"
        )
    })
}

fn lemma2_trial(rng: &mut ChaCha8Rng) -> Option<String> {
    let front = random_front(rng, LEMMA2_MAX_POINTS);
    let stats = random_stats(rng);
    let c = random_matrix(rng, COST_HI);
    let profile = cost_profile(&front, &stats, &c);
    match check_unimodal(&profile, 1e-9) {
        Ok(true) => None,
        Ok(false) => Some(format!(
            "not unimodal: front={:?} stats={stats:?} c={c:?} profile={:?}",
            front.points(),
            profile.values
        )),
        Err(e) => Some(e.to_string()),
    }
}

fn corollary_trial(rng: &mut ChaCha8Rng) -> Option<String> {
    let front = random_front(rng, COROLLARY_MAX_POINTS);
    let stats = random_stats(rng);
    let k = rng.gen_range(1..=COROLLARY_MAX_MATRICES);
    let u = random_antichain(rng, k, COST_HI);
    let brute = brute_minimax(&front, &stats, &u);
    let (value, index) = candidate_minimax(&front, &stats, &u);
    (!costs_tie(value, brute.value)).then(|| {
        format!(
            "front={:?} stats={stats:?} u={:?}: candidate {value} at {index}, brute {} at {:?}",
            front.points(),
            u.as_slice(),
            brute.value,
            brute.indices
        )
    })
}

fn dominance_trial(rng: &mut ChaCha8Rng) -> Option<String> {
    let stats = random_stats(rng);
    let point = random_point(rng);
    let k = rng.gen_range(1..=DOMINANCE_MAX_MATRICES);
    let mut matrices: Vec<CostMatrix> = (0..k).map(|_| random_matrix(rng, COST_HI)).collect();
    // sprinkle exact duplicates and shared coordinates
    if k > 1 && rng.gen_bool(0.3) {
        let i = rng.gen_range(0..k);
        matrices.push(matrices[i]);
    }
    let u = CostMatrixSet::new(matrices).expect("nonempty");
    let full = max_total_cost(&stats, &point, &u).0;
    let reduced = max_total_cost(&stats, &point, &filter_dominated(&u)).0;
    (full != reduced).then(|| {
        format!(
            "point={point:?} stats={stats:?} u={:?}: {full} vs {reduced}",
            u.as_slice()
        )
    })
}

pub fn verify_theory(suite: Suite, trials: usize, seed: u64, exec: Exec) -> Result<VerificationReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let trial: Trial = match suite {
        Suite::Lemma1 => lemma1_trial,
        Suite::Lemma2 => lemma2_trial,
        Suite::Corollary => corollary_trial,
        Suite::Dominance => dominance_trial,
    };
    let outcomes = exec.map((0..trials).collect(), |t| {
        let mut rng = stream_rng(seed, TRIAL_STREAM_BASE + t as u64);
        trial(&mut rng).map(|msg| format!("trial {t}: {msg}"))
    });
    let failures = outcomes.iter().filter(|o| o.is_some()).count();
    Ok(VerificationReport {
        suite,
        seed,
        trials,
        passed: trials - failures,
        first_counterexample: outcomes.into_iter().flatten().next(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framework::non_dominated_indices;

    #[test]
    fn generators_respect_their_contracts() {
        let mut rng = stream_rng(3, 0);
        for _ in 0..200 {
            let f = random_front(&mut rng, 20);
            assert!(f.len() >= 2 && f.len() <= 20);
            assert_eq!(f.points()[0], OperatingPoint::new(0.0, 1.0).unwrap());
            assert_eq!(*f.points().last().unwrap(), OperatingPoint::new(1.0, 0.0).unwrap());
            let u = random_antichain(&mut rng, 7, COST_HI);
            assert_eq!(non_dominated_indices(&u).len(), 7);
        }
    }

    #[test]
    fn short_suites_pass() {
        for suite in Suite::ALL {
            let r = verify_theory(suite, 300, 5, Exec::default()).unwrap();
            assert!(r.all_passed(), "{suite:?}: {:?}", r.first_counterexample);
        }
    }

    #[test]
    fn zero_trials_is_an_error() {
        assert!(verify_theory(Suite::Lemma1, 0, 1, Exec::default()).is_err());
    }

    #[test]
    fn suite_names_parse() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("lemma3".parse::<Suite>().is_err());
    }
}
