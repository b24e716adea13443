use serde::{Deserialize, Serialize};

use crate::analysis::DesignMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GbtConfig {
    pub rounds: usize,
    pub depth: usize,
    pub learning_rate: f64,
    /// Minimum samples in a leaf.
    pub min_leaf: usize,
}

impl Default for GbtConfig {
    fn default() -> Self {
        GbtConfig { rounds: 200, depth: 3, learning_rate: 0.1, min_leaf: 1 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
enum Node {
    Branch {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn predict(&self, row: &[f64]) -> f64 {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Leaf { value } => return *value,
                Node::Branch { feature, threshold, left, right } => {
                    at = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }
}

/// Gradient-boosted regression trees with exact greedy split search and
/// squared loss. Stagewise: each round fits a depth-limited tree to the
/// current residuals. Split gain ties resolve to the lowest column index,
/// so training is deterministic given the data.
#[derive(Debug, Clone)]
pub struct GbtModel {
    pub feature_names: Vec<String>,
    pub init: f64,
    trees: Vec<Tree>,
    /// Squared-error reduction attributed to each feature, normalized to
    /// sum 1 whenever any split occurred.
    pub importances: Vec<f64>,
    /// Training RSS after each round.
    pub train_rss: Vec<f64>,
    pub learning_rate: f64,
}

impl GbtModel {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.init
            + self
                .trees
                .iter()
                .map(|t| self.learning_rate * t.predict(row))
                .sum::<f64>()
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn importances_named(&self) -> Vec<(String, f64)> {
        self.feature_names
            .iter()
            .cloned()
            .zip(self.importances.iter().copied())
            .collect()
    }
}

pub fn gbt_fit(x: &DesignMatrix, y: &[f64], cfg: &GbtConfig) -> Result<GbtModel> {
    let n = x.n_rows();
    if n != y.len() {
        return Err(Error::invalid("design and target lengths differ"));
    }
    if n < 5 {
        return Err(Error::invalid(format!("need at least 5 rows, got {n}")));
    }
    let init = y.iter().sum::<f64>() / n as f64;
    let variance = y.iter().map(|v| (v - init) * (v - init)).sum::<f64>() / n as f64;
    let mut model = GbtModel {
        feature_names: x.columns.clone(),
        init,
        trees: Vec::new(),
        importances: vec![0.0; x.n_cols()],
        train_rss: Vec::new(),
        learning_rate: cfg.learning_rate,
    };
    if variance <= 1e-24 {
        log::warn!("constant target; boosted model has no trees");
        return Ok(model);
    }

    let mut preds = vec![init; n];
    let mut gains = vec![0.0; x.n_cols()];
    for _ in 0..cfg.rounds {
        let residuals: Vec<f64> = y.iter().zip(&preds).map(|(a, b)| a - b).collect();
        let mut tree = Tree { nodes: Vec::new() };
        let idx: Vec<usize> = (0..n).collect();
        grow(&mut tree, x, &residuals, idx, cfg.depth, cfg.min_leaf, &mut gains);
        for (i, p) in preds.iter_mut().enumerate() {
            *p += cfg.learning_rate * tree.predict(&x.data[i]);
        }
        model
            .train_rss
            .push(y.iter().zip(&preds).map(|(a, b)| (a - b) * (a - b)).sum());
        model.trees.push(tree);
    }

    let total: f64 = gains.iter().sum();
    if total > 0.0 {
        model.importances = gains.iter().map(|g| g / total).collect();
    }
    Ok(model)
}

/// Grow a node; returns its index within the tree.
fn grow(
    tree: &mut Tree,
    x: &DesignMatrix,
    residuals: &[f64],
    idx: Vec<usize>,
    depth_left: usize,
    min_leaf: usize,
    gains: &mut [f64],
) -> usize {
    let sum: f64 = idx.iter().map(|&i| residuals[i]).sum();
    let mean = sum / idx.len() as f64;
    if depth_left == 0 || idx.len() < 2 * min_leaf {
        tree.nodes.push(Node::Leaf { value: mean });
        return tree.nodes.len() - 1;
    }
    match best_split(x, residuals, &idx, min_leaf) {
        None => {
            tree.nodes.push(Node::Leaf { value: mean });
            tree.nodes.len() - 1
        }
        Some((feature, threshold, gain)) => {
            gains[feature] += gain;
            let (left_idx, right_idx): (Vec<usize>, Vec<usize>) =
                idx.into_iter().partition(|&i| x.data[i][feature] <= threshold);
            // placeholder branch, patched after children exist
            tree.nodes.push(Node::Leaf { value: mean });
            let at = tree.nodes.len() - 1;
            let left = grow(tree, x, residuals, left_idx, depth_left - 1, min_leaf, gains);
            let right = grow(tree, x, residuals, right_idx, depth_left - 1, min_leaf, gains);
            tree.nodes[at] = Node::Branch { feature, threshold, left, right };
            at
        }
    }
}

/// Exact greedy search over all features and midpoints between distinct
/// consecutive values. Returns (feature, threshold, squared-error gain).
fn best_split(
    x: &DesignMatrix,
    residuals: &[f64],
    idx: &[usize],
    min_leaf: usize,
) -> Option<(usize, f64, f64)> {
    let total_sum: f64 = idx.iter().map(|&i| residuals[i]).sum();
    let total_sq: f64 = idx.iter().map(|&i| residuals[i] * residuals[i]).sum();
    let m = idx.len() as f64;
    let parent_sse = total_sq - total_sum * total_sum / m;

    let mut best: Option<(usize, f64, f64)> = None;
    for feature in 0..x.n_cols() {
        let mut sorted: Vec<usize> = idx.to_vec();
        sorted.sort_by(|&a, &b| {
            x.data[a][feature]
                .partial_cmp(&x.data[b][feature])
                .expect("finite features")
        });
        let mut left_sum = 0.0;
        let mut left_sq = 0.0;
        for pos in 0..sorted.len() - 1 {
            let i = sorted[pos];
            left_sum += residuals[i];
            left_sq += residuals[i] * residuals[i];
            let a = x.data[i][feature];
            let b = x.data[sorted[pos + 1]][feature];
            if a == b {
                continue;
            }
            let left_n = (pos + 1) as f64;
            let right_n = m - left_n;
            if (left_n as usize) < min_leaf || (right_n as usize) < min_leaf {
                continue;
            }
            let right_sum = total_sum - left_sum;
            let right_sq = total_sq - left_sq;
            let sse = (left_sq - left_sum * left_sum / left_n)
                + (right_sq - right_sum * right_sum / right_n);
            let gain = parent_sse - sse;
            if gain > 1e-12 && best.map_or(true, |(_, _, g)| gain > g) {
                best = Some((feature, (a + b) / 2.0, gain));
            }
        }
    }
    best
}
