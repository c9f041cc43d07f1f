use std::path::Path;

use rayon::prelude::*;

use super::{evaluate, Combo, Metric, PredictionStore, DEFAULT_IE_TESTS};
use crate::learners::DEFAULT_THRESHOLD;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureOptions {
    /// Tests counted by initial enhancement.
    pub m: usize,
    /// Classification threshold for the threshold-based measures.
    pub threshold: f64,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        Self {
            m: DEFAULT_IE_TESTS,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

/// One measure value per (split, combo) cell: the ANOVA response.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureTable {
    metric: Metric,
    m: Option<usize>,
    threshold: Option<f64>,
    nsplits: usize,
    combos: Vec<Combo>,
    /// Row-major `nsplits x ncombos`.
    values: Vec<f64>,
}

impl MeasureTable {
    /// `values` is row-major by split: `values[split * ncombos + combo]`.
    pub fn new(
        metric: Metric,
        opts: Option<MeasureOptions>,
        nsplits: usize,
        combos: Vec<Combo>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if values.len() != nsplits * combos.len() {
            return Err(Error::IncompleteDesign(format!(
                "{} values for {nsplits} splits x {} combos",
                values.len(),
                combos.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::UndefinedMeasure(format!(
                "non-finite value at split {}, {}",
                i / combos.len() + 1,
                combos[i % combos.len()]
            )));
        }
        Ok(Self {
            metric,
            m: opts.filter(|_| metric.uses_tests()).map(|o| o.m),
            threshold: opts.filter(|_| metric.uses_threshold()).map(|o| o.threshold),
            nsplits,
            combos,
            values,
        })
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn m(&self) -> Option<usize> {
        self.m
    }

    pub fn threshold(&self) -> Option<f64> {
        self.threshold
    }

    pub fn nsplits(&self) -> usize {
        self.nsplits
    }

    pub fn ncombos(&self) -> usize {
        self.combos.len()
    }

    pub fn combos(&self) -> &[Combo] {
        &self.combos
    }

    /// `split` and `combo` are 0-based.
    pub fn value(&self, split: usize, combo: usize) -> f64 {
        self.values[split * self.combos.len() + combo]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(split (1-based), combo, value)` rows.
    pub fn rows(&self) -> impl Iterator<Item = (usize, &Combo, f64)> {
        let j = self.combos.len();
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (i / j + 1, &self.combos[i % j], v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn combo_means(&self) -> Vec<f64> {
        (0..self.ncombos())
            .map(|c| (0..self.nsplits).map(|s| self.value(s, c)).sum::<f64>() / self.nsplits as f64)
            .collect()
    }

    pub fn split_means(&self) -> Vec<f64> {
        (0..self.nsplits)
            .map(|s| (0..self.ncombos()).map(|c| self.value(s, c)).sum::<f64>() / self.ncombos() as f64)
            .collect()
    }

    /// Writes `measures.csv`:
    /// `split,descriptor_set,method,metric,m,threshold,value`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["split", "descriptor_set", "method", "metric", "m", "threshold", "value"])?;
        let m = self.m.map(|m| m.to_string()).unwrap_or_default();
        let t = self.threshold.map(|t| t.to_string()).unwrap_or_default();
        for (split, combo, v) in self.rows() {
            w.write_record([
                split.to_string().as_str(),
                &combo.set,
                &combo.method,
                self.metric.name(),
                &m,
                &t,
                &v.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

/// Evaluates `metric` on each split's pooled out-of-fold predictions.
pub fn build_measure_table(
    store: &PredictionStore,
    metric: Metric,
    opts: &MeasureOptions,
) -> Result<MeasureTable> {
    if metric.task() != store.kind() {
        return Err(Error::IncompatibleMetric(format!(
            "'{metric}' does not apply to a {} response (valid metrics: {})",
            store.kind().as_str(),
            Metric::valid_for(store.kind())
                .iter()
                .map(|m| m.name())
                .collect::<Vec<_>>()
                .join(", ")
        )));
    }
    store.check_complete()?;
    let combos = store.combos().to_vec();
    let ncombos = combos.len();
    let y = store.response();
    let results: Vec<Result<f64>> = (0..store.nsplits() * ncombos)
        .into_par_iter()
        .map(|cell| {
            let split = cell / ncombos + 1;
            let combo = &combos[cell % ncombos];
            let scores = store.get(split, combo).expect("store checked complete");
            evaluate(metric, y, scores, opts).map_err(|e| {
                Error::UndefinedMeasure(format!("split {split}, {combo}: {e}"))
            })
        })
        .collect();
    let values = results.into_iter().collect::<Result<Vec<_>>>()?;
    MeasureTable::new(metric, Some(*opts), store.nsplits(), combos, values)
}
