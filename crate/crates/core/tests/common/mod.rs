//! Oracles and generators shared by the integration tests. Each oracle is a
//! deliberately naive re-derivation, independent of the library code paths.

#![allow(dead_code)]

use std::f64::consts::PI;

use biomm::ingest::LabeledDataset;
use biomm::linalg::Matrix;
use biomm::pipeline::voice_features;
use biomm::synth::{corpus, CorpusSpec, SyntheticCorpus};
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(-scale..scale))
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let a = random_matrix(rng, n, n, 1.0);
    Matrix::from_fn(n, n, |i, j| a[(i, j)] + a[(j, i)])
}

/// Gaussian-ish clusters: class `k` centered at a random point of norm
/// ≈ `separation`, unit-scale noise.
pub fn clustered(
    rng: &mut ChaCha8Rng,
    dim: usize,
    classes: usize,
    per_class: usize,
    separation: f64,
) -> LabeledDataset {
    let centers: Vec<Vec<f64>> = (0..classes)
        .map(|_| (0..dim).map(|_| rng.random_range(-separation..separation)).collect())
        .collect();
    let mut cols = Vec::new();
    let mut labels = Vec::new();
    for (k, c) in centers.iter().enumerate() {
        for _ in 0..per_class {
            cols.push(c.iter().map(|v| v + rng.random_range(-1.0..1.0)).collect::<Vec<f64>>());
            labels.push(k);
        }
    }
    LabeledDataset::from_parts(Matrix::from_columns(&cols).unwrap(), labels).unwrap()
}

/// Naive triple-loop product.
pub fn naive_matmul(a: &Matrix, b: &Matrix) -> Matrix {
    Matrix::from_fn(a.rows(), b.cols(), |i, j| {
        let mut s = 0.0;
        for k in 0..a.cols() {
            s += a[(i, k)] * b[(k, j)];
        }
        s
    })
}

/// `Σ (x − m)(x − m)ᵀ` over all samples, summed element by element.
pub fn total_scatter(x: &Matrix) -> Matrix {
    let (d, p) = (x.rows(), x.cols());
    let mean: Vec<f64> = (0..d)
        .map(|i| (0..p).map(|j| x[(i, j)]).sum::<f64>() / p as f64)
        .collect();
    Matrix::from_fn(d, d, |r, c| {
        (0..p).map(|j| (x[(r, j)] - mean[r]) * (x[(c, j)] - mean[c])).sum()
    })
}

/// `X_k = Σ x_n e^{−2πi k n / N}` with the angle reduced exactly via `k·n mod N`.
pub fn naive_dft(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &v) in x.iter().enumerate() {
                let ang = -2.0 * PI * ((k * j) % n) as f64 / n as f64;
                acc += Complex64::new(v * ang.cos(), v * ang.sin());
            }
            acc
        })
        .collect()
}

/// Characteristic polynomial coefficients `[c_0, …, c_n]` of `det(λI − A)`
/// (monic, `c_n = 1`) by Faddeev–LeVerrier.
pub fn charpoly(a: &Matrix) -> Vec<f64> {
    let n = a.rows();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut m = Matrix::zeros(n, n);
    for k in 1..=n {
        // M_k = A·M_{k−1} + c_{n−k+1}·I
        let mut next = naive_matmul(a, &m);
        for i in 0..n {
            next[(i, i)] += coeffs[n - k + 1];
        }
        m = next;
        let am = naive_matmul(a, &m);
        coeffs[n - k] = -am.trace() / k as f64;
    }
    coeffs
}

/// Real roots of the characteristic polynomial of a small symmetric matrix,
/// descending: dense sign-change scan inside the Gershgorin bound, then
/// bisection.
pub fn charpoly_eigenvalues(a: &Matrix) -> Vec<f64> {
    let n = a.rows();
    let coeffs = charpoly(a);
    let eval = |x: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
    let bound = (0..n)
        .map(|i| (0..n).map(|j| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
        + 1.0;
    let steps = 200_000;
    let h = 2.0 * bound / steps as f64;
    let mut roots = Vec::new();
    let mut x0 = -bound;
    let mut f0 = eval(x0);
    for s in 1..=steps {
        let x1 = -bound + s as f64 * h;
        let f1 = eval(x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0 * f1 < 0.0 {
            let (mut lo, mut hi, mut flo) = (x0, x1, f0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = eval(mid);
                if fm * flo <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    roots
}

/// Label and neighbor indices by sorting every gallery distance.
pub fn brute_knn(points: &Matrix, labels: &[usize], q: &[f64], k: usize) -> (usize, Vec<usize>) {
    let mut all: Vec<(f64, usize, usize)> = (0..points.cols())
        .map(|i| {
            let d = points
                .col(i)
                .iter()
                .zip(q)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            (d, labels[i], i)
        })
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let top = &all[..k];
    let max_label = labels.iter().copied().max().unwrap_or(0);
    let mut best: Option<(usize, usize, f64)> = None;
    for l in 0..=max_label {
        let ds: Vec<f64> = top.iter().filter(|t| t.1 == l).map(|t| t.0).collect();
        if ds.is_empty() {
            continue;
        }
        let votes = ds.len();
        let mean = ds.iter().sum::<f64>() / votes as f64;
        let better = match best {
            None => true,
            Some((_, bv, bm)) => votes > bv || (votes == bv && mean < bm),
        };
        if better {
            best = Some((l, votes, mean));
        }
    }
    (best.unwrap().0, top.iter().map(|t| t.2).collect())
}

/// Dual objective at `alpha` for data `x`, labels `y`, kernel function `k`.
pub fn dual_value(alpha: &[f64], x: &Matrix, y: &[f64], k: &dyn Fn(&[f64], &[f64]) -> f64) -> f64 {
    let n = alpha.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * k(x.col(i), x.col(j));
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Maximum of the dual over a grid of the feasible set for 2–4 points: the
/// last multiplier is fixed by `Σ aᵢyᵢ = 0` and must land in `[0, c]`.
pub fn dual_grid_max(
    x: &Matrix,
    y: &[f64],
    c: f64,
    step: f64,
    k: &dyn Fn(&[f64], &[f64]) -> f64,
) -> (f64, Vec<f64>) {
    let n = y.len();
    assert!((2..=4).contains(&n));
    let ticks = (c / step).round() as usize;
    let free = n - 1;
    let mut best = (f64::NEG_INFINITY, vec![0.0; n]);
    let mut idx = vec![0usize; free];
    loop {
        let mut alpha: Vec<f64> = idx.iter().map(|&t| t as f64 * step).collect();
        let s: f64 = alpha.iter().zip(y).map(|(a, yi)| a * yi).sum();
        let last = -s * y[n - 1];
        if (-1e-12..=c + 1e-12).contains(&last) {
            alpha.push(last.clamp(0.0, c));
            let v = dual_value(&alpha, x, y, k);
            if v > best.0 {
                best = (v, alpha);
            }
        }
        // odometer increment
        let mut d = 0;
        loop {
            if d == free {
                return best;
            }
            idx[d] += 1;
            if idx[d] <= ticks {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// MFCC summaries of a synthetic corpus's enrollment utterances.
pub fn voice_dataset(c: &SyntheticCorpus) -> LabeledDataset {
    let refs: Vec<_> = c.clients.iter().flat_map(|k| k.voices.iter()).collect();
    let labels: Vec<usize> = c
        .clients
        .iter()
        .enumerate()
        .flat_map(|(i, k)| std::iter::repeat_n(i, k.voices.len()))
        .collect();
    LabeledDataset::from_parts(voice_features(&refs, &Default::default()).unwrap(), labels).unwrap()
}

/// Enrollment voices only, with utterances long enough for stable 10-fold
/// estimates.
pub fn voice_corpus(utterances: usize, seed: u64) -> SyntheticCorpus {
    corpus(
        &CorpusSpec {
            utterances_per_client: utterances,
            faces_per_client: 2,
            probes_per_client: 0,
            impostors: 0,
            utterance_secs: 0.8,
            ..CorpusSpec::default()
        },
        seed,
    )
    .unwrap()
}
