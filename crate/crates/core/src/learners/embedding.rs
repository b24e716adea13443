use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::corpus::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    /// Co-occurrence window: +/- this many tokens within an utterance.
    pub window: usize,
    /// Embedding dimensionality.
    pub dim: usize,
    /// Context-distribution smoothing exponent on context marginals.
    pub context_smoothing: f64,
    /// Power iterations for the randomized SVD.
    pub power_iters: usize,
    /// Oversampling columns beyond `dim` during range finding.
    pub oversample: usize,
    pub seed: u64,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            window: 5,
            dim: 100,
            context_smoothing: 0.75,
            power_iters: 4,
            oversample: 10,
            seed: 0,
        }
    }
}

/// Distributional word embeddings: symmetric windowed co-occurrence counts,
/// PPMI transform with smoothed context marginals (Levy & Goldberg, 2014),
/// then a rank-`dim` randomized truncated SVD (Halko et al., 2011). Rows
/// are L2-normalized; words whose PPMI row is entirely zero carry no vector.
#[derive(Debug, Clone)]
pub struct EmbeddingModel {
    words: Vec<String>,
    index: HashMap<String, usize>,
    dim: usize,
    window: usize,
    /// Row-major `words.len() x dim`, unit-norm rows.
    vectors: Vec<f64>,
}

impl EmbeddingModel {
    pub fn train(data: &Dataset, cfg: &EmbeddingConfig) -> Result<Self> {
        let types: Vec<&String> = data.vocabulary().keys().collect();
        if types.len() < cfg.dim {
            return Err(Error::invalid(format!(
                "{} distinct types but dim {}; use a smaller dim",
                types.len(),
                cfg.dim
            )));
        }
        let vocab_index: HashMap<&str, u32> = types
            .iter()
            .enumerate()
            .map(|(i, w)| (w.as_str(), i as u32))
            .collect();
        let n = types.len();

        // Symmetric co-occurrence counts within +/- window, per utterance.
        let mut cooc: Vec<BTreeMap<u32, f64>> = vec![BTreeMap::new(); n];
        for utt in data.utterances() {
            let ids: Vec<u32> = utt.tokens.iter().map(|t| vocab_index[t.as_str()]).collect();
            for i in 0..ids.len() {
                let hi = (i + cfg.window).min(ids.len().saturating_sub(1));
                for j in i + 1..=hi {
                    *cooc[ids[i] as usize].entry(ids[j]).or_insert(0.0) += 1.0;
                    *cooc[ids[j] as usize].entry(ids[i]).or_insert(0.0) += 1.0;
                }
            }
        }

        let row_sums: Vec<f64> = cooc.iter().map(|r| r.values().sum()).collect();
        let total: f64 = row_sums.iter().sum();
        if total == 0.0 {
            return Err(Error::invalid(
                "no co-occurrence pairs; utterances are too short for the window",
            ));
        }
        // Column marginals equal row sums by symmetry of the raw counts.
        let smoothed: Vec<f64> = row_sums.iter().map(|&c| c.powf(cfg.context_smoothing)).collect();
        let smoothed_total: f64 = smoothed.iter().sum();
        let distinct_contexts = row_sums.iter().filter(|&&c| c > 0.0).count();
        if cfg.dim > distinct_contexts {
            return Err(Error::invalid(format!(
                "{distinct_contexts} distinct contexts but dim {}; use a smaller dim",
                cfg.dim
            )));
        }

        // PPMI(x, y) = max(0, ln[ p(x,y) / (p(x) q(y)) ]) with q the
        // smoothed context distribution.
        let mut ppmi: Vec<BTreeMap<u32, f64>> = vec![BTreeMap::new(); n];
        for (x, row) in cooc.iter().enumerate() {
            for (&y, &c) in row {
                let q = smoothed[y as usize] / smoothed_total;
                let pmi = ((c / total) / ((row_sums[x] / total) * q)).ln();
                if pmi > 0.0 {
                    ppmi[x].insert(y, pmi);
                }
            }
        }

        let svd = randomized_svd(&ppmi, n, cfg.dim, cfg.oversample, cfg.power_iters, cfg.seed);

        // Word vector = row of U * sqrt(S), L2-normalized. Zero rows are
        // words with no positive PPMI cell; they get no vector.
        let mut words = Vec::new();
        let mut index = HashMap::new();
        let mut vectors = Vec::new();
        for (i, w) in types.iter().enumerate() {
            let mut v: Vec<f64> = (0..cfg.dim)
                .map(|c| svd.u[(i, c)] * svd.s[c].max(0.0).sqrt())
                .collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-12 {
                continue;
            }
            for x in &mut v {
                *x /= norm;
            }
            index.insert((*w).clone(), words.len());
            words.push((*w).clone());
            vectors.extend(v);
        }

        Ok(EmbeddingModel {
            words,
            index,
            dim: cfg.dim,
            window: cfg.window,
            vectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn vocab_len(&self) -> usize {
        self.words.len()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn vector(&self, word: &str) -> Option<&[f64]> {
        self.index
            .get(word)
            .map(|&i| &self.vectors[i * self.dim..(i + 1) * self.dim])
    }

    /// Cosine similarity; `None` if either word has no vector.
    pub fn cosine(&self, w1: &str, w2: &str) -> Option<f64> {
        let a = self.vector(w1)?;
        let b = self.vector(w2)?;
        Some(dot(a, b))
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) struct Svd {
    pub u: DMatrix<f64>,
    pub s: DVector<f64>,
    pub v: DMatrix<f64>,
}

/// Randomized truncated SVD of a sparse matrix given as per-row maps.
/// Range finding with Gaussian test vectors, QR re-orthonormalization
/// between power iterations, then an exact eigendecomposition of the small
/// projected Gram matrix.
pub(crate) fn randomized_svd(
    rows: &[BTreeMap<u32, f64>],
    ncols: usize,
    k: usize,
    oversample: usize,
    power_iters: usize,
    seed: u64,
) -> Svd {
    let n = rows.len();
    let l = (k + oversample).min(n).min(ncols);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = DMatrix::from_fn(ncols, l, |_, _| rng.sample::<f64, _>(StandardNormal));

    let mut q = mul_sparse(rows, &omega, n, l).qr().q();
    for _ in 0..power_iters {
        let z = mul_sparse_t(rows, &q, ncols, l).qr().q();
        q = mul_sparse(rows, &z, n, l).qr().q();
    }

    // B = Q^T A, an l x ncols projection; factor via eigen of B B^T.
    let b = mul_sparse_t(rows, &q, ncols, l).transpose();
    let m = &b * b.transpose();
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..l).collect();
    order.sort_by(|&a, &c| {
        eig.eigenvalues[c]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("finite eigenvalues")
    });

    let mut u = DMatrix::zeros(n, k);
    let mut s = DVector::zeros(k);
    let mut v = DMatrix::zeros(ncols, k);
    for (out_c, &src) in order.iter().take(k).enumerate() {
        let sigma = eig.eigenvalues[src].max(0.0).sqrt();
        s[out_c] = sigma;
        let uprime = eig.eigenvectors.column(src);
        let ucol = &q * &uprime;
        u.set_column(out_c, &ucol);
        if sigma > 1e-12 {
            let vcol = (b.transpose() * uprime) / sigma;
            v.set_column(out_c, &vcol);
        }
    }
    Svd { u, s, v }
}

/// Dense = Sparse(n x ncols) * Dense(ncols x l).
fn mul_sparse(rows: &[BTreeMap<u32, f64>], dense: &DMatrix<f64>, n: usize, l: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(n, l);
    for (i, row) in rows.iter().enumerate() {
        for (&j, &a) in row {
            for c in 0..l {
                out[(i, c)] += a * dense[(j as usize, c)];
            }
        }
    }
    out
}

/// Dense = Sparse^T(ncols x n) * Dense(n x l).
fn mul_sparse_t(rows: &[BTreeMap<u32, f64>], dense: &DMatrix<f64>, ncols: usize, l: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(ncols, l);
    for (i, row) in rows.iter().enumerate() {
        for (&j, &a) in row {
            for c in 0..l {
                out[(j as usize, c)] += a * dense[(i, c)];
            }
        }
    }
    out
}
