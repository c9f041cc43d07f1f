use crate::matrix::Matrix;
use crate::{Error, Result};

/// Mean response of the `k` nearest training rows (Euclidean distance) for
/// each test row. Equal distances resolve toward the lower training index.
/// Inputs are expected to be standardized already.
pub fn knn_predict(train: &Matrix, train_y: &[f64], test: &Matrix, k: usize) -> Result<Vec<f64>> {
    let n = train.nrows();
    if k == 0 || k > n {
        return Err(Error::Argument(format!(
            "KNN k = {k} must be between 1 and the number of training rows ({n})"
        )));
    }
    let mut dist: Vec<(f64, usize)> = Vec::with_capacity(n);
    let mut out = Vec::with_capacity(test.nrows());
    for q in test.rows() {
        dist.clear();
        dist.extend(train.rows().enumerate().map(|(i, r)| {
            let d2: f64 = r.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
            (d2, i)
        }));
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < n {
            dist.select_nth_unstable_by(k - 1, cmp);
        }
        let sum: f64 = dist[..k].iter().map(|&(_, i)| train_y[i]).sum();
        out.push(sum / k as f64);
    }
    Ok(out)
}
