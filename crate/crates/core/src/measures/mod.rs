//! Performance measures over pooled out-of-fold predictions.
//!
//! Whenever observations must be put in "testing order" (initial
//! enhancement, accumulation curves) they are sorted by descending score
//! with ties broken by ascending row index. See [`testing_order`].

mod store;
mod table;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use store::{Combo, PredictionStore, StoreEntry};
pub use table::{build_measure_table, MeasureOptions, MeasureTable};

use crate::dataio::TaskKind;
use crate::learners::binarize;
use crate::{Error, Result};

/// Default number of tests for initial enhancement.
pub const DEFAULT_IE_TESTS: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Error,
    Sensitivity,
    Specificity,
    Auc,
    Ppv,
    Fmeasure,
    Enhancement,
    Rmse,
    R2,
    Rho,
}

impl Metric {
    pub const BINARY: [Metric; 7] = [
        Metric::Enhancement,
        Metric::Error,
        Metric::Sensitivity,
        Metric::Specificity,
        Metric::Auc,
        Metric::Ppv,
        Metric::Fmeasure,
    ];
    pub const CONTINUOUS: [Metric; 3] = [Metric::Rmse, Metric::R2, Metric::Rho];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Error => "error",
            Metric::Sensitivity => "sensitivity",
            Metric::Specificity => "specificity",
            Metric::Auc => "auc",
            Metric::Ppv => "ppv",
            Metric::Fmeasure => "fmeasure",
            Metric::Enhancement => "enhancement",
            Metric::Rmse => "rmse",
            Metric::R2 => "r2",
            Metric::Rho => "rho",
        }
    }

    pub fn task(self) -> TaskKind {
        if Metric::CONTINUOUS.contains(&self) {
            TaskKind::Continuous
        } else {
            TaskKind::Binary
        }
    }

    pub fn valid_for(kind: TaskKind) -> &'static [Metric] {
        match kind {
            TaskKind::Binary => &Metric::BINARY,
            TaskKind::Continuous => &Metric::CONTINUOUS,
        }
    }

    pub fn lower_is_better(self) -> bool {
        matches!(self, Metric::Error | Metric::Rmse)
    }

    pub fn uses_threshold(self) -> bool {
        matches!(
            self,
            Metric::Error | Metric::Sensitivity | Metric::Specificity | Metric::Ppv | Metric::Fmeasure
        )
    }

    pub fn uses_tests(self) -> bool {
        self == Metric::Enhancement
    }

    /// Default metric for a task: initial enhancement for binary
    /// responses, RMSE for continuous ones.
    pub fn default_for(kind: TaskKind) -> Metric {
        match kind {
            TaskKind::Binary => Metric::Enhancement,
            TaskKind::Continuous => Metric::Rmse,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace([' ', '-'], "_");
        let m = match key.as_str() {
            "error" | "error_rate" => Metric::Error,
            "sensitivity" | "sens" | "recall" => Metric::Sensitivity,
            "specificity" | "spec" => Metric::Specificity,
            "auc" => Metric::Auc,
            "ppv" | "precision" => Metric::Ppv,
            "fmeasure" | "f1" => Metric::Fmeasure,
            "enhancement" | "ie" | "initial_enhancement" => Metric::Enhancement,
            "rmse" => Metric::Rmse,
            "r2" | "rsquared" => Metric::R2,
            "rho" | "spearman" => Metric::Rho,
            _ => {
                return Err(Error::Argument(format!(
                    "unknown metric '{s}' (valid: {})",
                    Metric::BINARY
                        .iter()
                        .chain(&Metric::CONTINUOUS)
                        .map(|m| m.name())
                        .collect::<Vec<_>>()
                        .join(", ")
                )))
            }
        };
        Ok(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl Confusion {
    pub fn n(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

pub fn confusion_counts(y: &[f64], labels: &[u8]) -> Result<Confusion> {
    if y.len() != labels.len() {
        return Err(Error::Argument(format!(
            "{} responses but {} labels",
            y.len(),
            labels.len()
        )));
    }
    let mut c = Confusion {
        tp: 0,
        fp: 0,
        tn: 0,
        fn_: 0,
    };
    for (&yi, &li) in y.iter().zip(labels) {
        match (yi == 1.0, li == 1) {
            (true, true) => c.tp += 1,
            (false, true) => c.fp += 1,
            (false, false) => c.tn += 1,
            (true, false) => c.fn_ += 1,
        }
    }
    Ok(c)
}

/// Threshold-based measures. `ppv` is NaN when nothing is predicted
/// positive and `f1` is NaN when `sensitivity + ppv` is zero or undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryMeasures {
    pub error_rate: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub ppv: f64,
    pub f1: f64,
}

fn class_counts(y: &[f64]) -> Result<(usize, usize)> {
    let p = y.iter().filter(|&&v| v == 1.0).count();
    if p == 0 || p == y.len() {
        return Err(Error::UndefinedMeasure(
            "response must contain both classes".into(),
        ));
    }
    Ok((p, y.len() - p))
}

fn check_lengths(y: &[f64], scores: &[f64]) -> Result<()> {
    if y.len() != scores.len() {
        return Err(Error::Argument(format!(
            "{} responses but {} predictions",
            y.len(),
            scores.len()
        )));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::Argument("predictions must be finite".into()));
    }
    Ok(())
}

pub fn binary_measures(y: &[f64], scores: &[f64], threshold: f64) -> Result<BinaryMeasures> {
    check_lengths(y, scores)?;
    class_counts(y)?;
    let c = confusion_counts(y, &binarize(scores, threshold))?;
    let n = c.n() as f64;
    let sensitivity = c.tp as f64 / (c.tp + c.fn_) as f64;
    let specificity = c.tn as f64 / (c.tn + c.fp) as f64;
    let ppv = if c.tp + c.fp == 0 {
        f64::NAN
    } else {
        c.tp as f64 / (c.tp + c.fp) as f64
    };
    let f1 = if ppv.is_nan() || sensitivity + ppv == 0.0 {
        f64::NAN
    } else {
        2.0 * sensitivity * ppv / (sensitivity + ppv)
    };
    Ok(BinaryMeasures {
        error_rate: (c.fp + c.fn_) as f64 / n,
        sensitivity,
        specificity,
        ppv,
        f1,
    })
}

/// Average (1-based) ranks, with tied values sharing the mean of their ranks.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && values[idx[j]] == values[idx[i]] {
            j += 1;
        }
        // positions i..j (0-based) share rank mean((i+1)..=j)
        let r = (i + 1 + j) as f64 / 2.0;
        for &k in &idx[i..j] {
            ranks[k] = r;
        }
        i = j;
    }
    ranks
}

/// Area under the ROC curve in Mann-Whitney form with midranks for ties.
pub fn auc(y: &[f64], scores: &[f64]) -> Result<f64> {
    check_lengths(y, scores)?;
    let (p, neg) = class_counts(y)?;
    let ranks = midranks(scores);
    let rank_sum: f64 = ranks
        .iter()
        .zip(y)
        .filter(|(_, &yi)| yi == 1.0)
        .map(|(r, _)| r)
        .sum();
    let p = p as f64;
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * neg as f64))
}

/// Row indices by descending score; equal scores keep ascending row order.
pub fn testing_order(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx
}

/// Hit rate among the first `m` tests divided by the overall positive rate.
pub fn initial_enhancement(y: &[f64], scores: &[f64], m: usize) -> Result<f64> {
    check_lengths(y, scores)?;
    let n = y.len();
    if m == 0 || m > n {
        return Err(Error::Argument(format!(
            "number of tests m = {m} must be between 1 and n = {n}"
        )));
    }
    let p = y.iter().filter(|&&v| v == 1.0).count();
    if p == 0 {
        return Err(Error::UndefinedMeasure(
            "initial enhancement needs at least one positive".into(),
        ));
    }
    let hits = testing_order(scores)[..m]
        .iter()
        .filter(|&&i| y[i] == 1.0)
        .count();
    let hit_rate = hits as f64 / m as f64;
    Ok(hit_rate / (p as f64 / n as f64))
}

/// Continuous measures. `r2` is NaN for constant `y`; `rho` is NaN when
/// either side has constant ranks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousMeasures {
    pub rmse: f64,
    pub r2: f64,
    pub rho: f64,
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return f64::NAN;
    }
    sab / (saa * sbb).sqrt()
}

pub fn continuous_measures(y: &[f64], pred: &[f64]) -> Result<ContinuousMeasures> {
    check_lengths(y, pred)?;
    if y.len() < 3 {
        return Err(Error::Argument("continuous measures need at least 3 observations".into()));
    }
    let n = y.len() as f64;
    let ss_res: f64 = y.iter().zip(pred).map(|(a, b)| (a - b) * (a - b)).sum();
    let ybar = y.iter().sum::<f64>() / n;
    let ss_tot: f64 = y.iter().map(|v| (v - ybar) * (v - ybar)).sum();
    let r2 = if ss_tot == 0.0 { f64::NAN } else { 1.0 - ss_res / ss_tot };
    Ok(ContinuousMeasures {
        rmse: (ss_res / n).sqrt(),
        r2,
        rho: pearson(&midranks(y), &midranks(pred)),
    })
}

/// Evaluates one metric. Undefined values surface as `UndefinedMeasure`.
pub fn evaluate(metric: Metric, y: &[f64], scores: &[f64], opts: &MeasureOptions) -> Result<f64> {
    let v = match metric {
        Metric::Enhancement => initial_enhancement(y, scores, opts.m)?,
        Metric::Auc => auc(y, scores)?,
        Metric::Error | Metric::Sensitivity | Metric::Specificity | Metric::Ppv | Metric::Fmeasure => {
            let b = binary_measures(y, scores, opts.threshold)?;
            match metric {
                Metric::Error => b.error_rate,
                Metric::Sensitivity => b.sensitivity,
                Metric::Specificity => b.specificity,
                Metric::Ppv => b.ppv,
                _ => b.f1,
            }
        }
        Metric::Rmse | Metric::R2 | Metric::Rho => {
            let c = continuous_measures(y, scores)?;
            match metric {
                Metric::Rmse => c.rmse,
                Metric::R2 => c.r2,
                _ => c.rho,
            }
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::UndefinedMeasure(format!("{metric} is undefined for these predictions")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn confusion_cases() {
        let y = [1.0, 1.0, 0.0, 0.0];
        let c = confusion_counts(&y, &[1, 0, 0, 1]).unwrap();
        assert_eq!((c.tp, c.fp, c.tn, c.fn_), (1, 1, 1, 1));
        let c = confusion_counts(&y, &[1, 1, 0, 0]).unwrap();
        assert_eq!((c.tp, c.fp, c.tn, c.fn_), (2, 0, 2, 0));
        let c = confusion_counts(&y, &[0, 0, 1, 1]).unwrap();
        assert_eq!((c.tp, c.fp, c.tn, c.fn_), (0, 2, 0, 2));
        assert!(confusion_counts(&y, &[1]).is_err());
    }

    #[test]
    fn binary_measures_hand_table() {
        let b = binary_measures(&[1.0, 1.0, 0.0, 0.0], &[0.9, 0.4, 0.6, 0.1], 0.5).unwrap();
        assert_eq!(
            b,
            BinaryMeasures {
                error_rate: 0.5,
                sensitivity: 0.5,
                specificity: 0.5,
                ppv: 0.5,
                f1: 0.5
            }
        );
        let perfect = binary_measures(&[1.0, 0.0, 1.0], &[0.8, 0.2, 0.6], 0.5).unwrap();
        assert_eq!(
            perfect,
            BinaryMeasures {
                error_rate: 0.0,
                sensitivity: 1.0,
                specificity: 1.0,
                ppv: 1.0,
                f1: 1.0
            }
        );
    }

    #[test]
    fn low_sensitivity_low_error() {
        // 50 positives among 3311, two of them caught
        let n = 3311;
        let y: Vec<f64> = (0..n).map(|i| f64::from(i < 50)).collect();
        let scores: Vec<f64> = (0..n).map(|i| f64::from(i < 2)).collect();
        let b = binary_measures(&y, &scores, 0.5).unwrap();
        assert!((b.sensitivity - 0.04).abs() < 1e-15);
        assert!(b.error_rate < 0.015);
    }

    #[test]
    fn ppv_undefined_without_predicted_positives() {
        let b = binary_measures(&[1.0, 0.0], &[0.1, 0.2], 0.5).unwrap();
        assert!(b.ppv.is_nan() && b.f1.is_nan());
        let opts = MeasureOptions::default();
        assert!(matches!(
            evaluate(Metric::Ppv, &[1.0, 0.0], &[0.1, 0.2], &opts),
            Err(Error::UndefinedMeasure(_))
        ));
    }

    #[test]
    fn auc_cases() {
        assert_eq!(auc(&[1.0, 0.0, 1.0, 0.0], &[0.9, 0.8, 0.7, 0.1]).unwrap(), 0.75);
        assert_eq!(auc(&[0.0, 1.0, 1.0], &[0.1, 0.5, 0.7]).unwrap(), 1.0);
        assert_eq!(auc(&[0.0, 1.0, 1.0, 0.0], &[0.3; 4]).unwrap(), 0.5);
        assert!(matches!(auc(&[1.0, 1.0], &[0.1, 0.2]), Err(Error::UndefinedMeasure(_))));
    }

    #[test]
    fn midranks_average_ties() {
        assert_eq!(midranks(&[10.0, 20.0, 10.0, 5.0]), [2.5, 4.0, 2.5, 1.0]);
    }

    #[test]
    fn enhancement_cases() {
        let n = 500;
        let y: Vec<f64> = (0..n).map(|i| f64::from(i % 10 == 0)).collect();
        // ideal ordering: positives score highest
        let ideal: Vec<f64> = y.clone();
        assert!((initial_enhancement(&y, &ideal, 50).unwrap() - 10.0).abs() < 1e-12);
        assert!(initial_enhancement(&y, &ideal, n + 1).is_err());
        assert!(initial_enhancement(&[0.0; 5], &[0.0; 5], 2).is_err());
        assert!((initial_enhancement(&y, &ideal, n).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn enhancement_at_base_rate_is_one() {
        // 5 positives in the first 50 of 500 with 50 positives overall
        let n = 500;
        let mut y = vec![0.0; n];
        y[..5].fill(1.0);
        y[100..145].fill(1.0);
        let scores: Vec<f64> = (0..n).map(|i| -(i as f64)).collect();
        assert!((initial_enhancement(&y, &scores, 50).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn continuous_cases() {
        let y = [1.0, 2.0, 3.0, 4.0];
        let c = continuous_measures(&y, &y).unwrap();
        assert_eq!((c.rmse, c.r2, c.rho), (0.0, 1.0, 1.0));
        let r = continuous_measures(&[1.0, 2.0, 3.0], &[3.0, 1.0, 2.0]).unwrap();
        assert!((r.rho + 0.5).abs() < 1e-15);
        let mean = [2.5; 4];
        let c = continuous_measures(&y, &mean).unwrap();
        assert_eq!(c.r2, 0.0);
        let pop_sd = (y.iter().map(|v| (v - 2.5f64).powi(2)).sum::<f64>() / 4.0).sqrt();
        assert!((c.rmse - pop_sd).abs() < 1e-15);
        assert!(c.rho.is_nan());
    }

    #[test]
    fn metric_names_parse() {
        for m in Metric::BINARY.iter().chain(&Metric::CONTINUOUS) {
            assert_eq!(m.name().parse::<Metric>().unwrap(), *m);
        }
        assert_eq!("error rate".parse::<Metric>().unwrap(), Metric::Error);
        assert!("bogus".parse::<Metric>().is_err());
    }

    fn brute_force_auc(y: &[f64], s: &[f64]) -> f64 {
        let mut num = 0.0;
        let mut pairs = 0.0;
        for i in 0..y.len() {
            for j in 0..y.len() {
                if y[i] == 1.0 && y[j] == 0.0 {
                    pairs += 1.0;
                    if s[i] > s[j] {
                        num += 1.0;
                    } else if s[i] == s[j] {
                        num += 0.5;
                    }
                }
            }
        }
        num / pairs
    }

    proptest! {
        #[test]
        fn auc_matches_pair_count(
            data in proptest::collection::vec((0u8..2, 0u8..6), 2..30)
        ) {
            let y: Vec<f64> = data.iter().map(|d| f64::from(d.0)).collect();
            let s: Vec<f64> = data.iter().map(|d| f64::from(d.1) / 5.0).collect();
            let p = y.iter().filter(|&&v| v == 1.0).count();
            prop_assume!(p > 0 && p < y.len());
            prop_assert_eq!(auc(&y, &s).unwrap(), brute_force_auc(&y, &s));
        }

        #[test]
        fn monotone_transform_invariance(
            data in proptest::collection::vec((0u8..2, -50i32..50), 4..60),
            m_frac in 0.05f64..1.0,
        ) {
            let y: Vec<f64> = data.iter().map(|d| f64::from(d.0)).collect();
            let s: Vec<f64> = data.iter().map(|d| f64::from(d.1) / 10.0).collect();
            let t: Vec<f64> = s.iter().map(|v| (v * 0.7).exp() + 3.0).collect();
            let p = y.iter().filter(|&&v| v == 1.0).count();
            prop_assume!(p > 0 && p < y.len());
            prop_assert_eq!(auc(&y, &s).unwrap(), auc(&y, &t).unwrap());
            let m = ((y.len() as f64 * m_frac).ceil() as usize).clamp(1, y.len());
            let ie = initial_enhancement(&y, &s, m).unwrap();
            prop_assert_eq!(ie, initial_enhancement(&y, &t, m).unwrap());
            let n = y.len() as f64;
            prop_assert!(ie >= 0.0 && ie <= n / p as f64 + 1e-12);
            let b = binary_measures(&y, &s, 0.0).unwrap();
            prop_assert!((b.error_rate - (1.0 - (b.sensitivity * p as f64 + b.specificity * (n - p as f64)) / n)).abs() < 1e-12);
            for v in [b.error_rate, b.sensitivity, b.specificity] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            for v in [b.ppv, b.f1] {
                prop_assert!(v.is_nan() || (0.0..=1.0).contains(&v));
            }
        }
    }
}
