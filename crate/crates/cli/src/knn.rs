//! Leave-one-out k-nearest-neighbour classification.

use gccha_core::{CMatrix, Complex};
use rayon::prelude::*;

use crate::{CliError, CliResult};

/// Predicts each row's label from its `k` nearest other rows (squared
/// Euclidean distance over complex features). Equal distances are ordered by
/// row index; a tied vote goes to the smallest label.
pub fn knn_classify(features: &CMatrix<f64>, labels: &[i64], k: usize) -> CliResult<Vec<i64>> {
    let n = features.nrows();
    if labels.len() != n {
        return Err(CliError::Validation(format!("{n} feature rows but {} labels", labels.len())));
    }
    if k == 0 || k >= n {
        return Err(CliError::Validation(format!("k = {k} must satisfy 1 <= k < {n}")));
    }
    let rows: Vec<Vec<Complex<f64>>> = (0..n).map(|i| features.row(i).iter().copied().collect()).collect();
    let pred = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut d: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (rows[i].iter().zip(&rows[j]).map(|(a, b)| (a - b).norm_sqr()).sum(), j))
                .collect();
            d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut votes: Vec<(i64, usize)> = Vec::new();
            for &(_, j) in &d[..k] {
                match votes.iter_mut().find(|v| v.0 == labels[j]) {
                    Some(v) => v.1 += 1,
                    None => votes.push((labels[j], 1)),
                }
            }
            votes.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            votes[0].0
        })
        .collect();
    Ok(pred)
}

pub fn accuracy(pred: &[i64], truth: &[i64]) -> f64 {
    let hits = pred.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / truth.len().max(1) as f64
}
