use super::standardize::standardize;
use crate::matrix::Matrix;
use crate::{Error, Result};

/// Ridge regression on standardized descriptors with an unpenalized
/// intercept.
///
/// Minimizes `||y - b0 - Z beta||^2 + lambda ||beta||^2`, where `Z` is the
/// standardized design. Because `Z` has zero column means the intercept is
/// `mean(y)` and `beta` solves `(Z'Z + lambda I) beta = Z'(y - mean(y))`,
/// here by Cholesky factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeModel {
    intercept: f64,
    coef: Vec<f64>,
    centers: Vec<f64>,
    scales: Vec<f64>,
}

impl RidgeModel {
    pub fn fit(x: &Matrix, y: &[f64], lambda: f64) -> Result<Self> {
        let n = x.nrows();
        let p = x.ncols();
        if n != y.len() || n == 0 {
            return Err(Error::Argument("ridge needs matching, nonempty x and y".into()));
        }
        let z = standardize(x, &Matrix::zeros(0, p));
        let ybar = y.iter().sum::<f64>() / n as f64;

        let mut gram = vec![0.0; p * p];
        let mut rhs = vec![0.0; p];
        for (row, &yi) in z.train.rows().zip(y) {
            let r = yi - ybar;
            for a in 0..p {
                rhs[a] += row[a] * r;
                let ra = row[a];
                if ra == 0.0 {
                    continue;
                }
                for b in a..p {
                    gram[a * p + b] += ra * row[b];
                }
            }
        }
        for a in 0..p {
            gram[a * p + a] += lambda;
            for b in 0..a {
                gram[a * p + b] = gram[b * p + a];
            }
        }
        let coef = cholesky_solve(&mut gram, &mut rhs, p).map_err(|()| {
            Error::Numeric(format!(
                "ridge system is singular with lambda = {lambda}; use lambda > 0"
            ))
        })?;
        Ok(Self {
            intercept: ybar,
            coef,
            centers: z.centers,
            scales: z.scales,
        })
    }

    /// Coefficients on the standardized scale.
    pub fn coefficients(&self) -> &[f64] {
        &self.coef
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    /// Intercept and slopes expressed on the raw descriptor scale.
    pub fn raw_coefficients(&self) -> (f64, Vec<f64>) {
        let slopes: Vec<f64> = self.coef.iter().zip(&self.scales).map(|(b, s)| b / s).collect();
        let shift: f64 = slopes.iter().zip(&self.centers).map(|(b, c)| b * c).sum();
        (self.intercept - shift, slopes)
    }

    /// Unclamped predictions.
    pub fn predict_raw(&self, x: &Matrix) -> Vec<f64> {
        x.rows()
            .map(|row| {
                self.intercept
                    + row
                        .iter()
                        .enumerate()
                        .map(|(j, v)| (v - self.centers[j]) / self.scales[j] * self.coef[j])
                        .sum::<f64>()
            })
            .collect()
    }
}

/// Solves `A x = b` for symmetric positive definite `A` (row-major, `p x p`),
/// overwriting both. Fails when a pivot is not safely positive.
fn cholesky_solve(a: &mut [f64], b: &mut [f64], p: usize) -> std::result::Result<Vec<f64>, ()> {
    let max_diag = (0..p).map(|i| a[i * p + i].abs()).fold(0.0f64, f64::max);
    let tol = max_diag * 1e-12;
    for j in 0..p {
        let mut d = a[j * p + j];
        for k in 0..j {
            d -= a[j * p + k] * a[j * p + k];
        }
        if !(d > tol) {
            return Err(());
        }
        let d = d.sqrt();
        a[j * p + j] = d;
        for i in j + 1..p {
            let mut s = a[i * p + j];
            for k in 0..j {
                s -= a[i * p + k] * a[j * p + k];
            }
            a[i * p + j] = s / d;
        }
    }
    // forward then back substitution with L and L'
    for i in 0..p {
        let mut s = b[i];
        for k in 0..i {
            s -= a[i * p + k] * b[k];
        }
        b[i] = s / a[i * p + i];
    }
    for i in (0..p).rev() {
        let mut s = b[i];
        for k in i + 1..p {
            s -= a[k * p + i] * b[k];
        }
        b[i] = s / a[i * p + i];
    }
    Ok(b.to_vec())
}
