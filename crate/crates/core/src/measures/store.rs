use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::dataio::{Dataset, TaskKind};
use crate::{Error, Result};

/// A descriptor set x method (D-M) combination.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Combo {
    pub set: String,
    pub method: String,
}

impl Combo {
    pub fn new(set: impl Into<String>, method: impl Into<String>) -> Self {
        Self {
            set: set.into(),
            method: method.into(),
        }
    }

    /// `<Set>-<Method>`.
    pub fn label(&self) -> String {
        format!("{}-{}", self.set, self.method)
    }
}

impl fmt::Display for Combo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.set, self.method)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoreEntry<'a> {
    /// 1-based split number.
    pub split: usize,
    pub combo: &'a Combo,
    pub values: &'a [f64],
}

/// Out-of-fold predictions per (split, combo), each aligned to dataset row
/// order and covering all `n` observations.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionStore {
    kind: TaskKind,
    ids: Vec<String>,
    response: Vec<f64>,
    nsplits: usize,
    combos: Vec<Combo>,
    cells: BTreeMap<(usize, usize), Vec<f64>>,
}

impl PredictionStore {
    pub fn new(kind: TaskKind, ids: Vec<String>, response: Vec<f64>, nsplits: usize) -> Result<Self> {
        if ids.len() != response.len() {
            return Err(Error::Argument("ids and response lengths differ".into()));
        }
        if nsplits == 0 {
            return Err(Error::Argument("nsplits must be at least 1".into()));
        }
        Ok(Self {
            kind,
            ids,
            response,
            nsplits,
            combos: Vec::new(),
            cells: BTreeMap::new(),
        })
    }

    pub fn for_dataset(data: &Dataset, nsplits: usize) -> Result<Self> {
        Self::new(
            data.kind(),
            data.ids().to_vec(),
            data.response().values().to_vec(),
            nsplits,
        )
    }

    pub fn kind(&self) -> TaskKind {
        self.kind
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    pub fn n(&self) -> usize {
        self.response.len()
    }

    pub fn nsplits(&self) -> usize {
        self.nsplits
    }

    pub fn combos(&self) -> &[Combo] {
        &self.combos
    }

    /// Number of stored prediction vectors.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn combo_index(&self, combo: &Combo) -> Option<usize> {
        self.combos.iter().position(|c| c == combo)
    }

    /// Adds the prediction vector for `split` (1-based) and `combo`.
    pub fn insert(&mut self, split: usize, combo: Combo, values: Vec<f64>) -> Result<()> {
        if split == 0 || split > self.nsplits {
            return Err(Error::Argument(format!(
                "split {split} is outside 1..={}",
                self.nsplits
            )));
        }
        if values.len() != self.n() {
            return Err(Error::Argument(format!(
                "{} predictions for split {split}, {combo}; expected {}",
                values.len(),
                self.n()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument(format!(
                "non-finite prediction in split {split}, {combo}"
            )));
        }
        let idx = match self.combo_index(&combo) {
            Some(i) => i,
            None => {
                self.combos.push(combo);
                self.combos.len() - 1
            }
        };
        if self.cells.contains_key(&(split, idx)) {
            return Err(Error::Argument(format!(
                "duplicate predictions for split {split}, {}",
                self.combos[idx]
            )));
        }
        self.cells.insert((split, idx), values);
        Ok(())
    }

    pub fn get(&self, split: usize, combo: &Combo) -> Option<&[f64]> {
        let idx = self.combo_index(combo)?;
        self.cells.get(&(split, idx)).map(Vec::as_slice)
    }

    /// Entries ordered by split, then combo insertion order.
    pub fn entries(&self) -> impl Iterator<Item = StoreEntry<'_>> {
        self.cells.iter().map(|(&(split, c), v)| StoreEntry {
            split,
            combo: &self.combos[c],
            values: v,
        })
    }

    /// Every (split, combo) cell must be present.
    pub fn check_complete(&self) -> Result<()> {
        if self.combos.is_empty() {
            return Err(Error::IncompleteDesign("prediction store is empty".into()));
        }
        for split in 1..=self.nsplits {
            for (c, combo) in self.combos.iter().enumerate() {
                if !self.cells.contains_key(&(split, c)) {
                    return Err(Error::IncompleteDesign(format!(
                        "no predictions for split {split}, {combo}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Writes `predictions.csv`: `split,descriptor_set,method,id,prediction`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["split", "descriptor_set", "method", "id", "prediction"])?;
        for e in self.entries() {
            let split = e.split.to_string();
            for (id, v) in self.ids.iter().zip(e.values) {
                w.write_record([
                    split.as_str(),
                    &e.combo.set,
                    &e.combo.method,
                    id,
                    &v.to_string(),
                ])?;
            }
        }
        w.flush().map_err(|err| Error::io(path, err))?;
        Ok(())
    }
}
