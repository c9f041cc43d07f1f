use crate::matrix::Matrix;

/// Train/test matrices centered and scaled with training-set statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardized {
    pub train: Matrix,
    pub test: Matrix,
    pub centers: Vec<f64>,
    pub scales: Vec<f64>,
    /// Columns that were constant on the training rows (scale forced to 1).
    pub constant: Vec<bool>,
}

/// Centers each column at its training mean and divides by the training
/// sample standard deviation. A constant column keeps scale 1.
pub fn standardize(train: &Matrix, test: &Matrix) -> Standardized {
    let n = train.nrows();
    let p = train.ncols();
    let mut centers = vec![0.0; p];
    let mut scales = vec![1.0; p];
    let mut constant = vec![false; p];
    for j in 0..p {
        let mean = train.column(j).sum::<f64>() / n as f64;
        let ss: f64 = train.column(j).map(|v| (v - mean) * (v - mean)).sum();
        centers[j] = mean;
        let sd = if n > 1 { (ss / (n - 1) as f64).sqrt() } else { 0.0 };
        if sd > 0.0 && sd.is_finite() {
            scales[j] = sd;
        } else {
            constant[j] = true;
        }
    }
    let apply = |m: &Matrix| {
        let mut out = m.clone();
        for i in 0..m.nrows() {
            for (j, v) in out.row_mut(i).iter_mut().enumerate() {
                *v = (*v - centers[j]) / scales[j];
            }
        }
        out
    };
    let train_z = apply(train);
    let test_z = apply(test);
    Standardized {
        train: train_z,
        test: test_z,
        centers,
        scales,
        constant,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_sd_column() {
        let train = Matrix::from_rows(&[vec![1.0, 5.0], vec![2.0, 5.0], vec![3.0, 5.0]]);
        let test = Matrix::from_rows(&[vec![2.0, 5.0]]);
        let z = standardize(&train, &test);
        assert_eq!(z.train.column(0).collect::<Vec<_>>(), [-1.0, 0.0, 1.0]);
        assert_eq!(z.scales, [1.0, 1.0]);
        assert_eq!(z.constant, [false, true]);
        assert_eq!(z.train.column(1).collect::<Vec<_>>(), [0.0, 0.0, 0.0]);
        // test row equal to the training mean maps to zero
        assert_eq!(z.test.row(0), [0.0, 0.0]);
    }

    #[test]
    fn zero_mean_unit_sd() {
        let train = Matrix::from_rows(&[vec![3.0], vec![7.5], vec![-1.0], vec![10.0]]);
        let z = standardize(&train, &Matrix::zeros(0, 1));
        let col: Vec<f64> = z.train.column(0).collect();
        let mean = col.iter().sum::<f64>() / 4.0;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 3.0;
        assert!(mean.abs() < 1e-15);
        assert!((var - 1.0).abs() < 1e-14);
    }
}
