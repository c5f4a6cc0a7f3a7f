use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cost::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Stratified `folds`-way partition: each class is shuffled with `seed` and
/// cut into near-equal parts; fold `f` tests on part `f` of both classes.
/// Index lists are sorted ascending.
pub fn stratified_folds(labels: &[Label], folds: usize, seed: u64) -> Result<Vec<Fold>> {
    if folds < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 folds, got {folds}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut test_sets = vec![Vec::new(); folds];
    for class in [0u8, 1] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < folds {
            return Err(Error::InvalidArgument(format!(
                "{folds} folds exceed the {} instances of class {class}",
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        let len = members.len();
        for (f, test) in test_sets.iter_mut().enumerate() {
            test.extend_from_slice(&members[f * len / folds..(f + 1) * len / folds]);
        }
    }
    Ok(test_sets
        .into_iter()
        .map(|mut test| {
            test.sort_unstable();
            let mut in_test = vec![false; labels.len()];
            for &i in &test {
                in_test[i] = true;
            }
            let train = (0..labels.len()).filter(|&i| !in_test[i]).collect();
            Fold { train, test }
        })
        .collect())
}
