use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use super::anova::AnovaTable;
use super::ptukey::studentized_range_sf;
use crate::measures::{Combo, Metric};
use crate::{Error, Result};

/// Significance bucket of an adjusted p-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bucket {
    /// p > 0.05
    NotSignificant,
    /// 0.01 < p <= 0.05
    P05,
    /// p <= 0.01
    P01,
}

impl Bucket {
    pub fn from_p(p: f64) -> Self {
        if p <= 0.01 {
            Bucket::P01
        } else if p <= 0.05 {
            Bucket::P05
        } else {
            Bucket::NotSignificant
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Bucket::NotSignificant => "ns",
            Bucket::P05 => "p05",
            Bucket::P01 => "p01",
        }
    }
}

impl fmt::Display for Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Bucket {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ns" => Ok(Bucket::NotSignificant),
            "p05" => Ok(Bucket::P05),
            "p01" => Ok(Bucket::P01),
            _ => Err(Error::Argument(format!("unknown significance bucket '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseComparison {
    /// Combo indices, `a < b`.
    pub combo_a: usize,
    pub combo_b: usize,
    pub mean_a: f64,
    pub mean_b: f64,
    pub diff: f64,
    pub se_diff: f64,
    pub q_stat: f64,
    pub p_adj: f64,
    pub bucket: Bucket,
}

/// All `J(J-1)/2` pairwise comparisons of combo means, each mean averaging
/// `nsplits` observations.
///
/// `q = |mean_a - mean_b| / sqrt(MSE / I)` is referred to the studentized
/// range with `J` groups and the ANOVA error degrees of freedom.
pub fn tukey_kramer(anova: &AnovaTable, combo_means: &[f64], nsplits: usize) -> Result<Vec<PairwiseComparison>> {
    let j = combo_means.len();
    if j < 2 {
        return Err(Error::Argument("need at least 2 combos to compare".into()));
    }
    if nsplits == 0 {
        return Err(Error::Argument("nsplits must be positive".into()));
    }
    let mse = anova.error().ms;
    if !(mse > 0.0) {
        return Err(Error::DegenerateVariance(format!("error mean square is {mse}")));
    }
    let nu = anova.error().df as f64;
    let scale = (mse / nsplits as f64).sqrt();
    let se_diff = (2.0 * mse / nsplits as f64).sqrt();
    let pairs: Vec<(usize, usize)> = (0..j).flat_map(|a| (a + 1..j).map(move |b| (a, b))).collect();
    pairs
        .into_par_iter()
        .map(|(a, b)| {
            let diff = combo_means[a] - combo_means[b];
            let q_stat = diff.abs() / scale;
            let p_adj = studentized_range_sf(q_stat, j, nu)?;
            Ok(PairwiseComparison {
                combo_a: a,
                combo_b: b,
                mean_a: combo_means[a],
                mean_b: combo_means[b],
                diff,
                se_diff,
                q_stat,
                p_adj,
                bucket: Bucket::from_p(p_adj),
            })
        })
        .collect::<Vec<Result<_>>>()
        .into_iter()
        .collect()
}

/// Context carried alongside pairwise results on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseFile {
    pub metric: Metric,
    pub m: Option<usize>,
    pub threshold: Option<f64>,
    pub combos: Vec<Combo>,
    pub comparisons: Vec<PairwiseComparison>,
}

const PAIRWISE_HEADER: [&str; 16] = [
    "metric",
    "m",
    "threshold",
    "set_a",
    "method_a",
    "set_b",
    "method_b",
    "combo_a",
    "combo_b",
    "mean_a",
    "mean_b",
    "diff",
    "se_diff",
    "q_stat",
    "p_adj",
    "bucket",
];

/// Writes `pairwise.csv`, one row per comparison in `(combo_a, combo_b)`
/// order.
pub fn write_pairwise_csv(path: &Path, file: &PairwiseFile) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(PAIRWISE_HEADER)?;
    let m = file.m.map(|m| m.to_string()).unwrap_or_default();
    let t = file.threshold.map(|t| t.to_string()).unwrap_or_default();
    for c in &file.comparisons {
        let a = &file.combos[c.combo_a];
        let b = &file.combos[c.combo_b];
        w.write_record([
            file.metric.name(),
            &m,
            &t,
            &a.set,
            &a.method,
            &b.set,
            &b.method,
            &a.label(),
            &b.label(),
            &c.mean_a.to_string(),
            &c.mean_b.to_string(),
            &c.diff.to_string(),
            &c.se_diff.to_string(),
            &c.q_stat.to_string(),
            &c.p_adj.to_string(),
            c.bucket.as_str(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Reads back a file written by [`write_pairwise_csv`]. Combos are indexed
/// in order of first appearance.
pub fn read_pairwise_csv(path: &Path) -> Result<PairwiseFile> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut combos: Vec<Combo> = Vec::new();
    let mut comparisons = Vec::new();
    let mut meta: Option<(Metric, Option<usize>, Option<f64>)> = None;
    let bad = |what: &str, row: usize| Error::Parse {
        row,
        column: what.to_string(),
        message: format!("bad value in {}", path.display()),
    };
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        if rec.len() != PAIRWISE_HEADER.len() {
            return Err(bad("record", row));
        }
        let metric: Metric = rec[0].parse()?;
        let m = if rec[1].is_empty() {
            None
        } else {
            Some(rec[1].parse().map_err(|_| bad("m", row))?)
        };
        let t = if rec[2].is_empty() {
            None
        } else {
            Some(rec[2].parse().map_err(|_| bad("threshold", row))?)
        };
        meta.get_or_insert((metric, m, t));
        let mut index_of = |set: &str, method: &str| {
            let c = Combo::new(set, method);
            match combos.iter().position(|x| *x == c) {
                Some(i) => i,
                None => {
                    combos.push(c);
                    combos.len() - 1
                }
            }
        };
        let a = index_of(&rec[3], &rec[4]);
        let b = index_of(&rec[5], &rec[6]);
        let num = |col: usize| -> Result<f64> { rec[col].parse().map_err(|_| bad(PAIRWISE_HEADER[col], row)) };
        comparisons.push(PairwiseComparison {
            combo_a: a,
            combo_b: b,
            mean_a: num(9)?,
            mean_b: num(10)?,
            diff: num(11)?,
            se_diff: num(12)?,
            q_stat: num(13)?,
            p_adj: num(14)?,
            bucket: rec[15].parse()?,
        });
    }
    let (metric, m, threshold) =
        meta.ok_or_else(|| Error::Validation(format!("{} has no comparisons", path.display())))?;
    Ok(PairwiseFile {
        metric,
        m,
        threshold,
        combos,
        comparisons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::anova_blocked;
    use crate::measures::MeasureTable;

    fn table(nsplits: usize, values: Vec<f64>) -> MeasureTable {
        let j = values.len() / nsplits;
        let combos = (0..j).map(|c| Combo::new(format!("S{c}"), "M")).collect();
        MeasureTable::new(Metric::Auc, None, nsplits, combos, values).unwrap()
    }

    #[test]
    fn buckets() {
        assert_eq!(Bucket::from_p(0.01), Bucket::P01);
        assert_eq!(Bucket::from_p(0.010_001), Bucket::P05);
        assert_eq!(Bucket::from_p(0.05), Bucket::P05);
        assert_eq!(Bucket::from_p(0.051), Bucket::NotSignificant);
    }

    #[test]
    fn equal_means_not_significant() {
        let t = table(2, vec![1.0, 1.0, 2.0, 3.0, 1.5, 1.0]);
        let a = anova_blocked(&t).unwrap();
        let means = [2.0, 2.0, 2.0];
        let pairs = tukey_kramer(&a, &means, 2).unwrap();
        assert_eq!(pairs.len(), 3);
        for p in pairs {
            assert_eq!(p.q_stat, 0.0);
            assert_eq!(p.p_adj, 1.0);
            assert_eq!(p.bucket, Bucket::NotSignificant);
        }
    }

    #[test]
    fn q_stat_formula() {
        // 2 splits x 3 combos; error MS known from the table
        let t = table(2, vec![1.0, 2.0, 4.0, 1.5, 2.2, 5.1]);
        let a = anova_blocked(&t).unwrap();
        let means = t.combo_means();
        let pairs = tukey_kramer(&a, &means, 2).unwrap();
        let mse = a.error().ms;
        for p in &pairs {
            let expected = (means[p.combo_a] - means[p.combo_b]).abs() / (mse / 2.0).sqrt();
            assert!((p.q_stat - expected).abs() < 1e-12);
            assert!((p.se_diff - (2.0 * mse / 2.0).sqrt()).abs() < 1e-15);
        }
    }
}
