//! Built-in learners behind a single fit/predict entry point.
//!
//! Binary responses are modelled as continuous 0/1 targets; the resulting
//! scores are probability-like and can be thresholded with [`binarize`].

mod forest;
mod knn;
mod registry;
mod ridge;
mod standardize;
mod tree;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use forest::{fit_forest, ForestParams, Resample};
pub use knn::knn_predict;
pub use registry::{make_model_defaults, ParamRegistry, Params};
pub use ridge::RidgeModel;
pub use standardize::{standardize, Standardized};
pub use tree::{RegressionTree, TreeParams};

use crate::dataio::TaskKind;
use crate::matrix::Matrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "KNN")]
    Knn,
    Ridge,
    Tree,
    #[serde(rename = "RF")]
    Rf,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Knn, Method::Ridge, Method::Tree, Method::Rf];

    pub fn name(self) -> &'static str {
        match self {
            Method::Knn => "KNN",
            Method::Ridge => "Ridge",
            Method::Tree => "Tree",
            Method::Rf => "RF",
        }
    }

    /// Whether the fit yields probability-like scores on binary data (as
    /// opposed to a regression fit whose output is only thresholded).
    pub fn is_probabilistic(self) -> bool {
        !matches!(self, Method::Ridge)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::Argument(format!(
                    "unknown method '{s}' (built-in methods: KNN, Ridge, Tree, RF)"
                ))
            })
    }
}

/// A learner together with its full parameter map.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSpec {
    method: Method,
    params: Params,
    task: TaskKind,
}

impl MethodSpec {
    /// Validates `params` against the method's registry entry: the key set
    /// must match exactly and every value must be in range.
    pub fn new(method: Method, params: Params, task: TaskKind) -> Result<Self> {
        let spec = Self {
            method,
            params,
            task,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Spec using the registry's entry for `method`.
    pub fn from_registry(method: Method, registry: &ParamRegistry, task: TaskKind) -> Result<Self> {
        let params = registry
            .get(method.name())
            .cloned()
            .ok_or_else(|| Error::Argument(format!("no registry entry for {method}")))?;
        Self::new(method, params, task)
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn task(&self) -> TaskKind {
        self.task
    }

    fn expected_keys(&self) -> &'static [&'static str] {
        match self.method {
            Method::Knn => &["k"],
            Method::Ridge => &["lambda"],
            Method::Tree => &["max_depth", "min_leaf"],
            Method::Rf => &["min_leaf", "mtry", "n_trees"],
        }
    }

    fn validate(&self) -> Result<()> {
        let mut keys: Vec<&str> = self.params.keys().map(String::as_str).collect();
        keys.sort_unstable();
        let mut expected = self.expected_keys().to_vec();
        expected.sort_unstable();
        if keys != expected {
            return Err(Error::Argument(format!(
                "{} expects parameters {:?}, got {:?}",
                self.method, expected, keys
            )));
        }
        for &key in self.expected_keys() {
            let v = self.params[key];
            let ok = if key == "lambda" {
                v.is_finite() && v >= 0.0
            } else {
                v.is_finite() && v >= 1.0 && v.fract() == 0.0
            };
            if !ok {
                return Err(Error::Argument(format!(
                    "{}.{key} = {v} is out of range",
                    self.method
                )));
            }
        }
        Ok(())
    }

    fn count(&self, key: &str) -> usize {
        self.params[key] as usize
    }
}

/// Fits `spec` on the training rows and predicts the test rows.
///
/// For binary tasks every method returns scores in `[0, 1]`; Ridge output
/// is clamped to that range (use [`RidgeModel`] for unclamped values).
pub fn fit_predict(
    spec: &MethodSpec,
    train_x: &Matrix,
    train_y: &[f64],
    test_x: &Matrix,
    task_seed: u64,
) -> Result<Vec<f64>> {
    if train_x.nrows() != train_y.len() {
        return Err(Error::Argument(format!(
            "{} training rows but {} responses",
            train_x.nrows(),
            train_y.len()
        )));
    }
    if train_x.ncols() != test_x.ncols() {
        return Err(Error::Argument(format!(
            "train has {} columns, test has {}",
            train_x.ncols(),
            test_x.ncols()
        )));
    }
    if test_x.nrows() == 0 {
        return Ok(Vec::new());
    }
    if train_x.nrows() == 0 {
        return Err(Error::Argument("empty training set".into()));
    }
    let preds = match spec.method {
        Method::Knn => {
            let z = standardize(train_x, test_x);
            knn_predict(&z.train, train_y, &z.test, spec.count("k"))?
        }
        Method::Ridge => {
            let model = RidgeModel::fit(train_x, train_y, spec.params["lambda"])?;
            let raw = model.predict_raw(test_x);
            match spec.task {
                TaskKind::Binary => raw.into_iter().map(|v| v.clamp(0.0, 1.0)).collect(),
                TaskKind::Continuous => raw,
            }
        }
        Method::Tree => {
            let params = TreeParams {
                max_depth: spec.count("max_depth"),
                min_leaf: spec.count("min_leaf"),
                mtry: None,
            };
            let rows: Vec<usize> = (0..train_x.nrows()).collect();
            RegressionTree::fit(train_x, train_y, &rows, &params, None).predict(test_x)
        }
        Method::Rf => {
            let params = ForestParams {
                n_trees: spec.count("n_trees"),
                mtry: spec.count("mtry"),
                min_leaf: spec.count("min_leaf"),
                max_depth: registry::DEFAULT_MAX_DEPTH,
                resample: Resample::Bootstrap,
            };
            fit_forest(train_x, train_y, &params, task_seed).predict(test_x)
        }
    };
    if let Some(bad) = preds.iter().find(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!("{} produced a non-finite prediction ({bad})", spec.method)));
    }
    Ok(preds)
}

/// Labels each score 1 when `score >= threshold`, else 0.
pub fn binarize(scores: &[f64], threshold: f64) -> Vec<u8> {
    scores.iter().map(|&s| u8::from(s >= threshold)).collect()
}

/// Default classification threshold.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

pub(crate) fn params_from<const N: usize>(pairs: [(&str, f64); N]) -> Params {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<BTreeMap<_, _>>()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn registry() -> ParamRegistry {
        make_model_defaults(20, 2, true, 5)
    }

    #[test]
    fn binarize_uses_ge() {
        assert_eq!(binarize(&[0.2, 0.5, 0.9], 0.5), [0, 1, 1]);
        assert_eq!(binarize(&[0.49], 0.5), [0]);
        assert_eq!(binarize(&[-3.0, 0.0, 7.0], -1e300), [1, 1, 1]);
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert_eq!("rf".parse::<Method>().unwrap(), Method::Rf);
        assert!("SVM".parse::<Method>().is_err());
    }

    #[test]
    fn spec_validation() {
        let reg = registry();
        assert!(MethodSpec::from_registry(Method::Knn, &reg, TaskKind::Binary).is_ok());
        assert!(MethodSpec::new(Method::Knn, params_from([("k", 0.0)]), TaskKind::Binary).is_err());
        assert!(MethodSpec::new(Method::Knn, params_from([("k", 2.5)]), TaskKind::Binary).is_err());
        assert!(MethodSpec::new(Method::Ridge, params_from([("lambda", -1.0)]), TaskKind::Binary).is_err());
        assert!(MethodSpec::new(
            Method::Ridge,
            params_from([("lambda", 1.0), ("extra", 1.0)]),
            TaskKind::Binary
        )
        .is_err());
    }

    #[test]
    fn empty_test_gives_empty_predictions() {
        let x = Matrix::from_rows(&[vec![0.0], vec![1.0]]);
        let spec = MethodSpec::new(Method::Knn, params_from([("k", 1.0)]), TaskKind::Continuous).unwrap();
        let out = fit_predict(&spec, &x, &[0.0, 1.0], &Matrix::zeros(0, 1), 0).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn knn_k_too_large_is_an_error() {
        let x = Matrix::from_rows(&[vec![0.0], vec![1.0]]);
        let spec = MethodSpec::new(Method::Knn, params_from([("k", 3.0)]), TaskKind::Continuous).unwrap();
        assert!(matches!(
            fit_predict(&spec, &x, &[0.0, 1.0], &x, 0),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn binary_ridge_scores_are_clamped() {
        let x = Matrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0], vec![3.0]]);
        let y = [0.0, 0.0, 1.0, 1.0];
        let test = Matrix::from_rows(&[vec![-10.0], vec![10.0]]);
        let spec = MethodSpec::new(Method::Ridge, params_from([("lambda", 0.1)]), TaskKind::Binary).unwrap();
        assert_eq!(fit_predict(&spec, &x, &y, &test, 0).unwrap(), [0.0, 1.0]);
        let raw = RidgeModel::fit(&x, &y, 0.1).unwrap().predict_raw(&test);
        assert!(raw[0] < 0.0 && raw[1] > 1.0);
    }

    #[test]
    fn binary_scores_stay_in_unit_interval() {
        let mut rng = crate::rng::SplitMix64::new(5);
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|_| (0..3).map(|_| rng.below(1000) as f64 / 100.0).collect())
            .collect();
        let y: Vec<f64> = rows.iter().map(|r| f64::from(r[0] + r[1] > 10.0)).collect();
        let x = Matrix::from_rows(&rows);
        let reg = make_model_defaults(60, 3, true, 5);
        for m in Method::ALL {
            let spec = MethodSpec::from_registry(m, &reg, TaskKind::Binary).unwrap();
            let p = fit_predict(&spec, &x, &y, &x, 3).unwrap();
            assert!(p.iter().all(|v| (0.0..=1.0).contains(v)), "{m}");
        }
    }
}
