//! Wilcoxon signed-rank test on paired per-fold costs.
//!
//! Zero differences are dropped and tied magnitudes share their average rank.
//! Up to [`EXACT_MAX_N`] non-zero differences the two-sided p-value comes
//! from the exact null distribution of `W+` (every sign assignment equally
//! likely, counted with a subset-sum recurrence over doubled ranks so that
//! half-integer ranks stay integral). Above that, a normal approximation
//! with tie-corrected variance and continuity correction is used.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

pub const EXACT_MAX_N: usize = 25;

#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl PairedSample {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch {
                expected: a.len(),
                actual: b.len(),
            });
        }
        if a.is_empty() {
            return Err(Error::InvalidArgument("empty paired sample".into()));
        }
        if a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "paired sample contains a non-finite value".into(),
            ));
        }
        Ok(Self { a, b })
    }

    pub fn swapped(&self) -> Self {
        Self {
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PMethod {
    Exact,
    Normal,
}

/// Direction of a significant difference, reported from SP's side: `Better`
/// (written `1`) when SP has the lower mean cost, `Worse` (`-1`) otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Mark {
    Better,
    Worse,
}

impl From<Mark> for i8 {
    fn from(m: Mark) -> i8 {
        match m {
            Mark::Better => 1,
            Mark::Worse => -1,
        }
    }
}

impl TryFrom<i8> for Mark {
    type Error = String;

    fn try_from(v: i8) -> Result<Self, String> {
        match v {
            1 => Ok(Mark::Better),
            -1 => Ok(Mark::Worse),
            other => Err(format!("mark must be 1 or -1, got {other}")),
        }
    }
}

impl std::fmt::Display for Mark {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", i8::from(*self))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub w_plus: f64,
    pub n_effective: usize,
    pub p_two_sided: f64,
    pub method: PMethod,
    pub mark: Option<Mark>,
}

/// Signed ranks of the non-zero differences, doubled so that average ranks
/// of ties are integers. Returns `(doubled ranks, positive flags)`.
pub(crate) fn doubled_signed_ranks(sample: &PairedSample) -> (Vec<u64>, Vec<bool>) {
    let mut d: Vec<f64> = sample
        .a
        .iter()
        .zip(&sample.b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    d.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    let mut ranks = vec![0u64; d.len()];
    let mut i = 0;
    while i < d.len() {
        let mut j = i;
        while j + 1 < d.len() && d[j + 1].abs() == d[i].abs() {
            j += 1;
        }
        // 1-based ranks i+1 ..= j+1; doubled average is (i+1) + (j+1)
        for r in &mut ranks[i..=j] {
            *r = (i + j + 2) as u64;
        }
        i = j + 1;
    }
    let positive = d.iter().map(|v| *v > 0.0).collect();
    (ranks, positive)
}

/// Number of sign assignments giving each doubled rank sum `0..=sum(ranks)`.
pub(crate) fn null_counts(doubled_ranks: &[u64]) -> Vec<f64> {
    let total: u64 = doubled_ranks.iter().sum();
    let mut counts = vec![0.0f64; total as usize + 1];
    counts[0] = 1.0;
    let mut reach = 0usize;
    for &r in doubled_ranks {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    counts
}

fn exact_p(doubled_ranks: &[u64], doubled_w: u64) -> f64 {
    let counts = null_counts(doubled_ranks);
    let all = 2f64.powi(doubled_ranks.len() as i32);
    let w = doubled_w as usize;
    let upper: f64 = counts[w..].iter().sum();
    let lower: f64 = counts[..=w].iter().sum();
    (2.0 * upper.min(lower) / all).min(1.0)
}

fn normal_p(doubled_ranks: &[u64], w_plus: f64) -> f64 {
    let n = doubled_ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < doubled_ranks.len() {
        let mut j = i;
        while j + 1 < doubled_ranks.len() && doubled_ranks[j + 1] == doubled_ranks[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    let z = ((w_plus - mean).abs() - 0.5) / var.sqrt();
    if z <= 0.0 {
        return 1.0;
    }
    // 2 * (1 - Phi(z))
    erfc(z / std::f64::consts::SQRT_2).min(1.0)
}

pub fn wilcoxon_signed_rank(sample: &PairedSample) -> TestResult {
    let (ranks, positive) = doubled_signed_ranks(sample);
    let n_effective = ranks.len();
    let doubled_w: u64 = ranks.iter().zip(&positive).filter(|(_, &p)| p).map(|(r, _)| r).sum();
    let w_plus = doubled_w as f64 / 2.0;
    let (p_two_sided, method) = if n_effective == 0 {
        (1.0, PMethod::Exact)
    } else if n_effective <= EXACT_MAX_N {
        (exact_p(&ranks, doubled_w), PMethod::Exact)
    } else {
        (normal_p(&ranks, w_plus), PMethod::Normal)
    };
    TestResult {
        w_plus,
        n_effective,
        p_two_sided,
        method,
        mark: None,
    }
}

/// Exact two-sided p-value regardless of sample size. Used to check the
/// normal approximation.
pub fn wilcoxon_exact_p(sample: &PairedSample) -> f64 {
    let (ranks, positive) = doubled_signed_ranks(sample);
    if ranks.is_empty() {
        return 1.0;
    }
    let doubled_w: u64 = ranks.iter().zip(&positive).filter(|(_, &p)| p).map(|(r, _)| r).sum();
    exact_p(&ranks, doubled_w)
}

pub fn significance_mark(result: &TestResult, sp_mean: f64, other_mean: f64, alpha: f64) -> Result<Option<Mark>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} must lie in (0, 1)")));
    }
    Ok(if result.p_two_sided >= alpha {
        None
    } else if sp_mean < other_mean {
        Some(Mark::Better)
    } else {
        Some(Mark::Worse)
    })
}
