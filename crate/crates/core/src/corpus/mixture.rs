use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::Dataset;
use crate::error::{Error, Result};

/// Per-source token quotas proportional to source size:
/// `quota_i = budget * tokens_i / total_tokens`.
pub fn proportional_quotas(token_counts: &[usize], budget: usize) -> Vec<f64> {
    let total: usize = token_counts.iter().sum();
    if total == 0 {
        return vec![0.0; token_counts.len()];
    }
    token_counts
        .iter()
        .map(|&t| budget as f64 * t as f64 / total as f64)
        .collect()
}

/// Build a pooled mixture by sampling whole conversations from each source
/// family in proportion to its size.
///
/// Each family's conversations are shuffled with the seeded RNG and the
/// prefix whose cumulative token count is closest to that family's quota is
/// taken (slight overshoot allowed). Families contribute in the order given.
pub fn build_mixture(
    name: impl Into<String>,
    sources: &[&Dataset],
    token_budget: usize,
    seed: u64,
) -> Result<Dataset> {
    let total: usize = sources.iter().map(|d| d.token_count()).sum();
    if token_budget > total {
        return Err(Error::invalid(format!(
            "token budget {token_budget} exceeds {total} tokens available across {} sources",
            sources.len()
        )));
    }
    let counts: Vec<usize> = sources.iter().map(|d| d.token_count()).collect();
    let quotas = proportional_quotas(&counts, token_budget);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut conversations = Vec::new();
    for (source, &quota) in sources.iter().zip(quotas.iter()) {
        if source.is_empty() {
            log::warn!("mixture source {:?} has no conversations; skipped", source.name());
            continue;
        }
        let mut order: Vec<usize> = (0..source.len()).collect();
        order.shuffle(&mut rng);
        let prefix = closest_prefix(
            order.iter().map(|&i| source.conversations()[i].token_count()),
            quota,
        );
        conversations.extend(
            order[..prefix]
                .iter()
                .map(|&i| source.conversations()[i].clone()),
        );
    }
    Ok(Dataset::new(name, conversations))
}

/// Length of the prefix whose cumulative count is closest to `quota`.
/// Ties prefer the shorter prefix.
fn closest_prefix(sizes: impl Iterator<Item = usize>, quota: f64) -> usize {
    let mut best_len = 0usize;
    let mut best_gap = quota.abs();
    let mut cum = 0usize;
    for (i, size) in sizes.enumerate() {
        cum += size;
        let gap = (cum as f64 - quota).abs();
        if gap < best_gap {
            best_gap = gap;
            best_len = i + 1;
        }
        if cum as f64 >= quota {
            break;
        }
    }
    best_len
}
