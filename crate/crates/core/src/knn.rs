//! Euclidean k-nearest-neighbor classification by linear scan.

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// `√Σ(xⱼ − yⱼ)²`
pub fn euclidean(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::dim(format!(
            "distance between lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(squared_distance(x, y).sqrt())
}

fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct KnnModel {
    points: Matrix,
    labels: Vec<usize>,
    k: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub label: usize,
    /// Winning votes / k.
    pub confidence: f64,
    /// Mean distance from the query to the winning class's voting neighbors.
    pub mean_distance: f64,
    /// Gallery indices of the k neighbors, nearest first.
    pub neighbors: Vec<usize>,
}

impl KnnModel {
    pub fn new(points: Matrix, labels: Vec<usize>, k: usize) -> Result<Self> {
        if labels.len() != points.cols() {
            return Err(Error::dim(format!(
                "{} gallery points with {} labels",
                points.cols(),
                labels.len()
            )));
        }
        if k == 0 || k > points.cols() {
            return Err(Error::domain(format!(
                "k must be in 1..={}, got {k}",
                points.cols()
            )));
        }
        Ok(KnnModel { points, labels, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn points(&self) -> &Matrix {
        &self.points
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.points.rows()
    }

    pub fn with_k(&self, k: usize) -> Result<Self> {
        KnnModel::new(self.points.clone(), self.labels.clone(), k)
    }

    fn check_query(&self, q: &[f64]) -> Result<()> {
        if q.len() != self.dim() {
            return Err(Error::dim(format!(
                "query of length {} against a {}-dimensional gallery",
                q.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Gallery indices sorted by (distance, label, index).
    fn ranked(&self, q: &[f64], filter: impl Fn(usize) -> bool) -> Vec<(f64, usize)> {
        let mut d: Vec<(f64, usize)> = (0..self.points.cols())
            .filter(|&i| filter(i))
            .map(|i| (squared_distance(self.points.col(i), q), i))
            .collect();
        d.sort_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then(self.labels[a.1].cmp(&self.labels[b.1]))
                .then(a.1.cmp(&b.1))
        });
        d
    }

    pub fn classify(&self, q: &[f64]) -> Result<Classification> {
        self.check_query(q)?;
        let ranked = self.ranked(q, |_| true);
        let nearest = &ranked[..self.k];

        // (votes, summed distance) per label that appears among the neighbors
        let mut tally: Vec<(usize, usize, f64)> = Vec::new();
        for &(d2, i) in nearest {
            let l = self.labels[i];
            let d = d2.sqrt();
            match tally.iter_mut().find(|t| t.0 == l) {
                Some(t) => {
                    t.1 += 1;
                    t.2 += d;
                }
                None => tally.push((l, 1, d)),
            }
        }
        let (label, votes, dist_sum) = tally
            .into_iter()
            .min_by(|a, b| {
                b.1.cmp(&a.1)
                    .then_with(|| (a.2 / a.1 as f64).total_cmp(&(b.2 / b.1 as f64)))
                    .then(a.0.cmp(&b.0))
            })
            .expect("k >= 1");
        Ok(Classification {
            label,
            confidence: votes as f64 / self.k as f64,
            mean_distance: dist_sum / votes as f64,
            neighbors: nearest.iter().map(|&(_, i)| i).collect(),
        })
    }

    /// Mean distance from `q` to the `min(k, n_class)` nearest gallery points
    /// of `class`, optionally skipping one gallery index.
    pub fn class_mean_distance(
        &self,
        q: &[f64],
        class: usize,
        exclude: Option<usize>,
    ) -> Result<f64> {
        self.check_query(q)?;
        let ranked = self.ranked(q, |i| self.labels[i] == class && Some(i) != exclude);
        if ranked.is_empty() {
            return Err(Error::Class(format!("no gallery points for class {class}")));
        }
        let take = self.k.min(ranked.len());
        Ok(ranked[..take].iter().map(|&(d2, _)| d2.sqrt()).sum::<f64>() / take as f64)
    }
}
