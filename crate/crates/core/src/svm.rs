//! Soft-margin kernel SVM.
//!
//! Binary machines solve the dual
//! `max Σaᵢ − ½ΣΣ aᵢaⱼyᵢyⱼk(xᵢ,xⱼ)` s.t. `0 ≤ aᵢ ≤ c`, `Σaᵢyᵢ = 0`
//! by sequential pairwise updates: the first multiplier is the maximal KKT
//! violator, the second the one giving the largest objective gain along the
//! feasible direction. Multiclass uses one-vs-one voting.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ingest::LabeledDataset;
use crate::linalg::{dot_raw, Matrix};

pub const DEFAULT_C: f64 = 10.0;
pub const DEFAULT_GAMMA: f64 = 2.0;
pub const DEFAULT_TOL: f64 = 1e-3;
pub const DEFAULT_FOLDS: usize = 10;
/// Iteration cap in passes; one pass is as many pair updates as there are
/// training points.
pub const MAX_PASSES: usize = 100_000;
/// Multipliers at or below this are not kept as support vectors.
pub const PRUNE_EPS: f64 = 1e-12;
const TAU: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelSpec {
    Linear,
    Rbf { gamma: f64 },
}

impl KernelSpec {
    pub fn rbf(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::domain(format!("rbf gamma must be > 0, got {gamma}")));
        }
        Ok(KernelSpec::Rbf { gamma })
    }

    fn eval_raw(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            KernelSpec::Linear => dot_raw(x, y),
            KernelSpec::Rbf { gamma } => {
                let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                (-gamma * d2).exp()
            }
        }
    }
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec::Rbf {
            gamma: DEFAULT_GAMMA,
        }
    }
}

pub fn kernel_eval(k: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::dim(format!(
            "kernel of lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(k.eval_raw(x, y))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvmParams {
    pub kernel: KernelSpec,
    pub c: f64,
    pub tol: f64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            kernel: KernelSpec::default(),
            c: DEFAULT_C,
            tol: DEFAULT_TOL,
        }
    }
}

impl SvmParams {
    fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(Error::domain(format!("c must be > 0, got {}", self.c)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::domain(format!("tol must be > 0, got {}", self.tol)));
        }
        if let KernelSpec::Rbf { gamma } = self.kernel {
            KernelSpec::rbf(gamma)?;
        }
        Ok(())
    }
}

/// `f(x) = Σ coefᵢ·k(svᵢ, x) + bias`, with `coefᵢ = aᵢyᵢ`.
#[derive(Clone, Debug, PartialEq)]
pub struct BinarySvm {
    pub support_vectors: Matrix,
    pub dual_coefs: Vec<f64>,
    pub bias: f64,
    pub kernel: KernelSpec,
    pub c: f64,
    /// Column index of each support vector in the training matrix.
    pub support_indices: Vec<usize>,
}

impl BinarySvm {
    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.support_vectors.rows() {
            return Err(Error::dim(format!(
                "input of length {} for a model over {} features",
                x.len(),
                self.support_vectors.rows()
            )));
        }
        Ok(self
            .support_vectors
            .columns()
            .zip(&self.dual_coefs)
            .map(|(sv, a)| a * self.kernel.eval_raw(sv, x))
            .sum::<f64>()
            + self.bias)
    }

    /// Dual multiplier `aᵢ` of training column `i` (zero for non-support vectors).
    pub fn alpha_of(&self, i: usize) -> f64 {
        self.support_indices
            .iter()
            .position(|&s| s == i)
            .map_or(0.0, |p| self.dual_coefs[p].abs())
    }
}

/// Returns `(score, ±1)`; a zero score counts as `+1`.
pub fn predict_binary(m: &BinarySvm, x: &[f64]) -> Result<(f64, i8)> {
    let s = m.decision(x)?;
    Ok((s, if s >= 0.0 { 1 } else { -1 }))
}

/// Train one machine on the columns of `x` with labels `y ∈ {−1, +1}`.
pub fn train_binary(x: &Matrix, y: &[i8], params: &SvmParams) -> Result<BinarySvm> {
    params.validate()?;
    if y.len() != x.cols() {
        return Err(Error::dim(format!(
            "{} samples with {} labels",
            x.cols(),
            y.len()
        )));
    }
    if y.iter().any(|&v| v != 1 && v != -1) {
        return Err(Error::Class("binary labels must be +1 or -1".into()));
    }
    if !y.contains(&1) || !y.contains(&-1) {
        return Err(Error::Class("both classes must be present".into()));
    }

    let n = y.len();
    let c = params.c;
    let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
    let kmat = Matrix::from_fn(n, n, |i, j| params.kernel.eval_raw(x.col(i), x.col(j)));

    let mut alpha = vec![0.0; n];
    // gradient of ½aᵀQa − eᵀa with Q_ij = y_i y_j K_ij
    let mut grad = vec![-1.0; n];

    let in_up = |a: f64, yi: f64| (yi > 0.0 && a < c) || (yi < 0.0 && a > 0.0);
    let in_low = |a: f64, yi: f64| (yi > 0.0 && a > 0.0) || (yi < 0.0 && a < c);

    let mut iterations = 0;
    let (gmax, gmin) = loop {
        let mut gmax = f64::NEG_INFINITY;
        let mut gmin = f64::INFINITY;
        let mut i_sel = usize::MAX;
        for t in 0..n {
            let f = -yf[t] * grad[t];
            if in_up(alpha[t], yf[t]) && f > gmax {
                gmax = f;
                i_sel = t;
            }
            if in_low(alpha[t], yf[t]) && f < gmin {
                gmin = f;
            }
        }
        if gmax - gmin < params.tol {
            break (gmax, gmin);
        }
        if iterations >= MAX_PASSES * n {
            return Err(Error::SvmConvergence {
                iterations,
                violation: gmax - gmin,
            });
        }
        iterations += 1;

        let i = i_sel;
        let mut j_sel = usize::MAX;
        let mut best_gain = f64::NEG_INFINITY;
        for t in 0..n {
            if !in_low(alpha[t], yf[t]) {
                continue;
            }
            let b = gmax + yf[t] * grad[t];
            if b <= 0.0 {
                continue;
            }
            let mut a = kmat[(i, i)] + kmat[(t, t)] - 2.0 * kmat[(i, t)];
            if a <= 0.0 {
                a = TAU;
            }
            let gain = b * b / a;
            if gain > best_gain {
                best_gain = gain;
                j_sel = t;
            }
        }
        let j = j_sel;

        // move a_i by +y_i·δ and a_j by −y_j·δ
        let b = gmax + yf[j] * grad[j];
        let mut a = kmat[(i, i)] + kmat[(j, j)] - 2.0 * kmat[(i, j)];
        if a <= 0.0 {
            a = TAU;
        }
        let bound_i = if yf[i] > 0.0 { c - alpha[i] } else { alpha[i] };
        let bound_j = if yf[j] > 0.0 { alpha[j] } else { c - alpha[j] };
        let delta = (b / a).min(bound_i).min(bound_j);

        let new_i = if delta == bound_i {
            if yf[i] > 0.0 {
                c
            } else {
                0.0
            }
        } else {
            alpha[i] + yf[i] * delta
        };
        let new_j = if delta == bound_j {
            if yf[j] > 0.0 {
                0.0
            } else {
                c
            }
        } else {
            alpha[j] - yf[j] * delta
        };
        let di = new_i - alpha[i];
        let dj = new_j - alpha[j];
        alpha[i] = new_i;
        alpha[j] = new_j;
        for t in 0..n {
            grad[t] += yf[t] * (yf[i] * kmat[(t, i)] * di + yf[j] * kmat[(t, j)] * dj);
        }
    };

    // bias: mean over free vectors, else midpoint of the feasible interval
    let mut free_sum = 0.0;
    let mut free_n = 0usize;
    for t in 0..n {
        if alpha[t] > 0.0 && alpha[t] < c {
            free_sum += -yf[t] * grad[t];
            free_n += 1;
        }
    }
    let bias = if free_n > 0 {
        free_sum / free_n as f64
    } else {
        0.5 * (gmax + gmin)
    };

    let support_indices: Vec<usize> = (0..n).filter(|&t| alpha[t] > PRUNE_EPS).collect();
    let support_vectors = x.select_columns(&support_indices)?;
    let dual_coefs = support_indices.iter().map(|&t| alpha[t] * yf[t]).collect();
    Ok(BinarySvm {
        support_vectors,
        dual_coefs,
        bias,
        kernel: params.kernel,
        c,
        support_indices,
    })
}

/// Largest violation of the three-case KKT conditions over the training set.
pub fn kkt_violation(m: &BinarySvm, x: &Matrix, y: &[i8]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, &yi) in y.iter().enumerate() {
        let a = m.alpha_of(i);
        let margin = yi as f64 * m.decision(x.col(i))?;
        let v = if a <= PRUNE_EPS {
            (1.0 - margin).max(0.0)
        } else if a >= m.c * (1.0 - 1e-12) {
            (margin - 1.0).max(0.0)
        } else {
            (margin - 1.0).abs()
        };
        worst = worst.max(v);
    }
    Ok(worst)
}

/// Dual objective `Σaᵢ − ½ΣΣ aᵢaⱼyᵢyⱼk(xᵢ,xⱼ)` of a trained machine.
pub fn dual_objective(m: &BinarySvm) -> f64 {
    let sv = &m.support_vectors;
    let mut quad = 0.0;
    for (i, ci) in m.dual_coefs.iter().enumerate() {
        for (j, cj) in m.dual_coefs.iter().enumerate() {
            quad += ci * cj * m.kernel.eval_raw(sv.col(i), sv.col(j));
        }
    }
    m.dual_coefs.iter().map(|c| c.abs()).sum::<f64>() - 0.5 * quad
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairMachine {
    /// Class mapped to `+1`.
    pub positive: usize,
    /// Class mapped to `−1`.
    pub negative: usize,
    pub machine: BinarySvm,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SvmModel {
    /// Size of the label space (votes are reported for `0..num_classes`).
    pub num_classes: usize,
    /// Classes that had training data, ascending.
    pub trained_classes: Vec<usize>,
    pub pairs: Vec<PairMachine>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MulticlassPrediction {
    pub label: usize,
    pub votes: Vec<usize>,
    /// Per class, the summed `|score|` of the machines that voted for it.
    pub score_sums: Vec<f64>,
}

impl SvmModel {
    /// Machine for the unordered pair `{a, b}`.
    pub fn machine_for(&self, a: usize, b: usize) -> Option<&PairMachine> {
        self.pairs.iter().find(|p| {
            (p.positive == a && p.negative == b) || (p.positive == b && p.negative == a)
        })
    }

    pub fn num_machines(&self) -> usize {
        self.pairs.len()
    }

    /// Worst [`kkt_violation`] over every pairwise machine, given the training
    /// data the model was fitted on.
    pub fn kkt_violation(&self, x: &Matrix, labels: &[usize]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for p in &self.pairs {
            let idx: Vec<usize> = (0..labels.len())
                .filter(|&i| labels[i] == p.positive || labels[i] == p.negative)
                .collect();
            let y: Vec<i8> = idx
                .iter()
                .map(|&i| if labels[i] == p.positive { 1 } else { -1 })
                .collect();
            let mut local = p.machine.clone();
            local.support_indices = p
                .machine
                .support_indices
                .iter()
                .map(|s| idx.iter().position(|i| i == s).ok_or(Error::Index { index: *s, len: labels.len() }))
                .collect::<Result<_>>()?;
            worst = worst.max(kkt_violation(&local, &x.select_columns(&idx)?, &y)?);
        }
        Ok(worst)
    }

    /// Fraction of `class`'s pairwise machines that vote for it.
    pub fn class_vote_fraction(&self, x: &[f64], class: usize) -> Result<f64> {
        let mut total = 0;
        let mut won = 0;
        for p in self.pairs.iter().filter(|p| p.positive == class || p.negative == class) {
            total += 1;
            let (_, sign) = predict_binary(&p.machine, x)?;
            let winner = if sign > 0 { p.positive } else { p.negative };
            if winner == class {
                won += 1;
            }
        }
        if total == 0 {
            return Err(Error::Class(format!("class {class} has no machines")));
        }
        Ok(won as f64 / total as f64)
    }
}

pub fn train_multiclass(ds: &LabeledDataset, params: &SvmParams) -> Result<SvmModel> {
    train_multiclass_raw(ds.features(), ds.labels(), ds.num_classes(), params)
}

/// One machine per pair of classes present in `labels`.
pub fn train_multiclass_raw(
    x: &Matrix,
    labels: &[usize],
    num_classes: usize,
    params: &SvmParams,
) -> Result<SvmModel> {
    if labels.len() != x.cols() {
        return Err(Error::dim(format!(
            "{} samples with {} labels",
            x.cols(),
            labels.len()
        )));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= num_classes) {
        return Err(Error::Class(format!("label {bad} outside [0, {num_classes})")));
    }
    let mut present: Vec<usize> = labels.to_vec();
    present.sort_unstable();
    present.dedup();
    if present.len() < 2 {
        return Err(Error::Class(format!(
            "need at least 2 classes, got {}",
            present.len()
        )));
    }
    let mut pairs = Vec::with_capacity(present.len() * (present.len() - 1) / 2);
    for (ai, &a) in present.iter().enumerate() {
        for &b in &present[ai + 1..] {
            let idx: Vec<usize> = (0..labels.len())
                .filter(|&i| labels[i] == a || labels[i] == b)
                .collect();
            let sub = x.select_columns(&idx)?;
            let y: Vec<i8> = idx.iter().map(|&i| if labels[i] == a { 1 } else { -1 }).collect();
            let mut machine = train_binary(&sub, &y, params)?;
            machine.support_indices = machine.support_indices.iter().map(|&s| idx[s]).collect();
            pairs.push(PairMachine {
                positive: a,
                negative: b,
                machine,
            });
        }
    }
    Ok(SvmModel {
        num_classes,
        trained_classes: present,
        pairs,
    })
}

/// Majority vote; ties go to the larger `|score|` sum, then the smaller class id.
pub fn predict_multiclass(m: &SvmModel, x: &[f64]) -> Result<MulticlassPrediction> {
    let mut votes = vec![0usize; m.num_classes];
    let mut score_sums = vec![0.0; m.num_classes];
    for p in &m.pairs {
        let (score, sign) = predict_binary(&p.machine, x)?;
        let winner = if sign > 0 { p.positive } else { p.negative };
        votes[winner] += 1;
        score_sums[winner] += score.abs();
    }
    let label = (0..m.num_classes)
        .min_by(|&a, &b| {
            votes[b]
                .cmp(&votes[a])
                .then(score_sums[b].total_cmp(&score_sums[a]))
                .then(a.cmp(&b))
        })
        .expect("num_classes >= 2");
    Ok(MulticlassPrediction {
        label,
        votes,
        score_sums,
    })
}

/// Stratified fold id per sample. Each class is shuffled with the seeded RNG
/// and dealt round-robin, continuing the deal across classes.
pub fn stratified_folds(labels: &[usize], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::Fold(format!("need at least 2 folds, got {folds}")));
    }
    if folds > labels.len() {
        return Err(Error::Fold(format!(
            "{folds} folds for {} samples",
            labels.len()
        )));
    }
    let num_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; labels.len()];
    let mut next = 0;
    for class in 0..num_classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        members.shuffle(&mut rng);
        for i in members {
            assignment[i] = next % folds;
            next += 1;
        }
    }
    Ok(assignment)
}

/// Generic k-fold loop: `fit_predict(train_x, train_labels, test_x)` returns
/// one predicted label per test column. Returns accuracy in percent.
pub fn cross_validate_with<F>(
    x: &Matrix,
    labels: &[usize],
    folds: usize,
    seed: u64,
    mut fit_predict: F,
) -> Result<f64>
where
    F: FnMut(&Matrix, &[usize], &Matrix) -> Result<Vec<usize>>,
{
    if labels.len() != x.cols() {
        return Err(Error::dim("labels and samples differ in count"));
    }
    let assignment = stratified_folds(labels, folds, seed)?;
    let mut correct = 0usize;
    for f in 0..folds {
        let (test_idx, train_idx): (Vec<usize>, Vec<usize>) =
            (0..labels.len()).partition(|&i| assignment[i] == f);
        if test_idx.is_empty() {
            continue;
        }
        let train_x = x.select_columns(&train_idx)?;
        let train_y: Vec<usize> = train_idx.iter().map(|&i| labels[i]).collect();
        let test_x = x.select_columns(&test_idx)?;
        let predicted = fit_predict(&train_x, &train_y, &test_x)?;
        correct += test_idx
            .iter()
            .zip(&predicted)
            .filter(|(&i, &p)| labels[i] == p)
            .count();
    }
    Ok(100.0 * correct as f64 / labels.len() as f64)
}

pub fn cross_validate(
    ds: &LabeledDataset,
    params: &SvmParams,
    folds: usize,
    seed: u64,
) -> Result<f64> {
    let c = ds.num_classes();
    cross_validate_with(ds.features(), ds.labels(), folds, seed, |tx, ty, qx| {
        let model = train_multiclass_raw(tx, ty, c, params)?;
        qx.columns()
            .map(|q| predict_multiclass(&model, q).map(|p| p.label))
            .collect()
    })
}
