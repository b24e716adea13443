use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::Dataset;
use crate::error::{Error, Result};

/// Disjoint train/validation partition of a dataset's conversations.
#[derive(Debug, Clone)]
pub struct SplitPair {
    pub train: Dataset,
    pub val: Dataset,
    pub ratio: f64,
}

/// Shuffle conversations with a seeded RNG, then assign them to the train
/// side until its token share reaches `ratio`; the remainder is validation.
/// Deterministic given `(dataset, ratio, seed)`. If the greedy pass would
/// leave validation empty, the last train conversation moves over so both
/// sides stay usable.
pub fn split_train_val(dataset: &Dataset, ratio: f64, seed: u64) -> Result<SplitPair> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::invalid(format!("split ratio must be in (0,1), got {ratio}")));
    }
    if dataset.len() < 2 {
        return Err(Error::invalid(format!(
            "dataset {:?} has {} conversations; need at least 2 to split",
            dataset.name(),
            dataset.len()
        )));
    }

    let mut order: Vec<usize> = (0..dataset.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let total = dataset.token_count() as f64;
    let mut train_idx = Vec::new();
    let mut val_idx = Vec::new();
    let mut train_tokens = 0usize;
    for &i in &order {
        if (train_tokens as f64) / total >= ratio {
            val_idx.push(i);
        } else {
            train_tokens += dataset.conversations()[i].token_count();
            train_idx.push(i);
        }
    }
    if val_idx.is_empty() {
        let moved = train_idx.pop().expect("at least 2 conversations");
        val_idx.push(moved);
    }

    let pick = |idx: &[usize]| -> Vec<_> {
        idx.iter().map(|&i| dataset.conversations()[i].clone()).collect()
    };
    Ok(SplitPair {
        train: Dataset::new(format!("{}-train", dataset.name()), pick(&train_idx)),
        val: Dataset::new(format!("{}-val", dataset.name()), pick(&val_idx)),
        ratio,
    })
}
