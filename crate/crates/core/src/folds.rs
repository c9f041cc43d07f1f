//! Seeded fold assignment for repeated k-fold cross-validation.
//!
//! Each split starts from the balanced label vector, where the first
//! `n mod k` folds get `ceil(n/k)` members and the rest `floor(n/k)`, laid
//! out as `[1, 1, .., 2, 2, .., k]`. That vector is then Fisher-Yates
//! shuffled by a [`SplitMix64`] stream seeded with the split seed.

use std::path::Path;

use crate::rng::SplitMix64;
use crate::{Error, Result};

/// Seeds used when none are supplied: `11111 * s` for split `s = 1..=nsplits`.
pub fn default_seeds(nsplits: usize) -> Result<Vec<u64>> {
    if nsplits == 0 {
        return Err(Error::Argument("nsplits must be at least 1".into()));
    }
    Ok((1..=nsplits as u64).map(|s| 11111 * s).collect())
}

/// Fold labels (1-based) for `n` observations.
pub fn assign_folds(n: usize, nfolds: usize, seed: u64) -> Result<Vec<usize>> {
    if nfolds < 2 {
        return Err(Error::Argument(format!("nfolds must be at least 2, got {nfolds}")));
    }
    if nfolds > n {
        return Err(Error::Argument(format!(
            "nfolds ({nfolds}) exceeds the number of observations ({n})"
        )));
    }
    let base = n / nfolds;
    let extra = n % nfolds;
    let mut labels = Vec::with_capacity(n);
    for fold in 1..=nfolds {
        let size = base + usize::from(fold <= extra);
        labels.extend(std::iter::repeat_n(fold, size));
    }
    SplitMix64::new(seed).shuffle(&mut labels);
    Ok(labels)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlan {
    nfolds: usize,
    seeds: Vec<u64>,
    assignment: Vec<Vec<usize>>,
}

impl SplitPlan {
    pub fn nsplits(&self) -> usize {
        self.seeds.len()
    }

    pub fn nfolds(&self) -> usize {
        self.nfolds
    }

    pub fn seeds(&self) -> &[u64] {
        &self.seeds
    }

    pub fn n(&self) -> usize {
        self.assignment.first().map_or(0, Vec::len)
    }

    /// Fold labels for split `s` (0-based split index).
    pub fn labels(&self, split: usize) -> &[usize] {
        &self.assignment[split]
    }

    /// Row indices held out in `fold` (1-based) of `split` (0-based).
    pub fn test_rows(&self, split: usize, fold: usize) -> Vec<usize> {
        self.assignment[split]
            .iter()
            .enumerate()
            .filter_map(|(i, &f)| (f == fold).then_some(i))
            .collect()
    }

    /// Row indices used for training when `fold` is held out.
    pub fn train_rows(&self, split: usize, fold: usize) -> Vec<usize> {
        self.assignment[split]
            .iter()
            .enumerate()
            .filter_map(|(i, &f)| (f != fold).then_some(i))
            .collect()
    }

    /// Writes `folds.csv` with columns `split,row_index,fold` (1-based splits
    /// and row indices).
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["split", "row_index", "fold"])?;
        for (s, row) in self.assignment.iter().enumerate() {
            for (i, fold) in row.iter().enumerate() {
                w.write_record([(s + 1).to_string(), (i + 1).to_string(), fold.to_string()])?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

pub fn make_split_plan(
    n: usize,
    nsplits: usize,
    nfolds: usize,
    seeds: Option<&[u64]>,
) -> Result<SplitPlan> {
    let seeds = match seeds {
        Some(s) if s.len() != nsplits => {
            return Err(Error::Argument(format!(
                "{} seeds given for {nsplits} splits",
                s.len()
            )))
        }
        Some(s) => s.to_vec(),
        None => default_seeds(nsplits)?,
    };
    if seeds.is_empty() {
        return Err(Error::Argument("nsplits must be at least 1".into()));
    }
    let assignment = seeds
        .iter()
        .map(|&seed| assign_folds(n, nfolds, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(SplitPlan {
        nfolds,
        seeds,
        assignment,
    })
}
