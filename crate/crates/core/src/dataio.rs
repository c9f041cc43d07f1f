//! CSV ingestion of datasets with an optional ID column, one response column
//! and one or more named descriptor sets.

use std::collections::HashSet;
use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Binary,
    Continuous,
}

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::Binary => "binary",
            TaskKind::Continuous => "continuous",
        }
    }
}

/// Response values plus the inferred task kind.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseVector {
    values: Vec<f64>,
    kind: TaskKind,
}

impl ResponseVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> TaskKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of 1-valued responses (meaningful for binary responses).
    pub fn positives(&self) -> usize {
        self.values.iter().filter(|&&v| v == 1.0).count()
    }
}

/// Classifies `values` as binary when every value is 0 or 1, otherwise as
/// continuous. A binary response must contain both classes.
pub fn validate_response(values: Vec<f64>) -> Result<ResponseVector> {
    validate_response_as(values, None)
}

/// As [`validate_response`], but `forced` overrides the inferred kind.
/// Forcing `Binary` on non-0/1 values is an error.
pub fn validate_response_as(values: Vec<f64>, forced: Option<TaskKind>) -> Result<ResponseVector> {
    if values.len() < 2 {
        return Err(Error::Validation(format!(
            "response needs at least 2 observations, got {}",
            values.len()
        )));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Validation(format!(
            "response value at row {} is not finite ({})",
            i + 1,
            values[i]
        )));
    }
    let all_01 = values.iter().all(|&v| v == 0.0 || v == 1.0);
    let kind = match forced {
        Some(TaskKind::Continuous) => TaskKind::Continuous,
        Some(TaskKind::Binary) if !all_01 => {
            return Err(Error::Validation(
                "binary response requested but values other than 0 and 1 are present".into(),
            ))
        }
        _ if all_01 => TaskKind::Binary,
        _ => TaskKind::Continuous,
    };
    if kind == TaskKind::Binary {
        let ones = values.iter().filter(|&&v| v == 1.0).count();
        if ones == 0 || ones == values.len() {
            return Err(Error::Validation(format!(
                "binary response has a single class (all values are {})",
                values[0]
            )));
        }
    }
    Ok(ResponseVector { values, kind })
}

/// Column counts (and optional names) of the descriptor sets, in file order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DescriptorSetSpec {
    pub lengths: Vec<usize>,
    pub names: Option<Vec<String>>,
}

impl DescriptorSetSpec {
    pub fn new(lengths: Vec<usize>, names: Option<Vec<String>>) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::Schema("descriptor set lengths are empty".into()));
        }
        if lengths.contains(&0) {
            return Err(Error::Schema("descriptor set lengths must be positive".into()));
        }
        if let Some(n) = &names {
            if n.len() != lengths.len() {
                return Err(Error::Schema(format!(
                    "{} descriptor set names given for {} sets",
                    n.len(),
                    lengths.len()
                )));
            }
        }
        Ok(Self { lengths, names })
    }

    /// Parses `Name:len,Name:len` pairs as used by `--sets`.
    pub fn parse_pairs(s: &str) -> Result<Self> {
        let mut lengths = Vec::new();
        let mut names = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, len) = part
                .rsplit_once(':')
                .ok_or_else(|| Error::Schema(format!("expected name:length, got '{part}'")))?;
            let len: usize = len
                .trim()
                .parse()
                .map_err(|_| Error::Schema(format!("bad descriptor set length in '{part}'")))?;
            names.push(name.trim().to_string());
            lengths.push(len);
        }
        Self::new(lengths, Some(names))
    }

    fn name(&self, i: usize) -> String {
        match &self.names {
            Some(n) => n[i].clone(),
            None => format!("Set{}", i + 1),
        }
    }
}

/// Sidecar JSON schema: `{id_col, response_col, sets: [{name, length}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    #[serde(default)]
    pub id_col: Option<String>,
    pub response_col: String,
    #[serde(default)]
    pub sets: Vec<SetEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetEntry {
    pub name: String,
    pub length: usize,
}

impl Schema {
    pub fn from_path(path: &Path) -> Result<Self> {
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_reader(f)?)
    }

    pub fn set_spec(&self) -> Result<Option<DescriptorSetSpec>> {
        if self.sets.is_empty() {
            return Ok(None);
        }
        DescriptorSetSpec::new(
            self.sets.iter().map(|s| s.length).collect(),
            Some(self.sets.iter().map(|s| s.name.clone()).collect()),
        )
        .map(Some)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorSet {
    pub name: String,
    pub columns: Vec<String>,
    pub matrix: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    id_column: Option<String>,
    response_column: String,
    ids: Vec<String>,
    response: ResponseVector,
    sets: Vec<DescriptorSet>,
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    pub id_col: Option<String>,
    pub response_col: String,
    pub spec: Option<DescriptorSetSpec>,
    pub force_continuous: bool,
}

impl Dataset {
    /// Assembles a dataset from parts, checking the cross-field invariants.
    pub fn new(
        id_column: Option<String>,
        response_column: String,
        ids: Option<Vec<String>>,
        response: ResponseVector,
        sets: Vec<DescriptorSet>,
    ) -> Result<Self> {
        let n = response.len();
        let ids = match ids {
            Some(ids) => {
                if ids.len() != n {
                    return Err(Error::Validation(format!(
                        "{} ids for {n} observations",
                        ids.len()
                    )));
                }
                let mut seen = HashSet::with_capacity(n);
                for id in &ids {
                    if !seen.insert(id.as_str()) {
                        return Err(Error::Validation(format!("duplicate id '{id}'")));
                    }
                }
                ids
            }
            None => (1..=n).map(|i| i.to_string()).collect(),
        };
        if sets.is_empty() {
            return Err(Error::Schema("dataset has no descriptor sets".into()));
        }
        let mut names = HashSet::new();
        for s in &sets {
            if s.name.is_empty() {
                return Err(Error::Schema("descriptor set name is empty".into()));
            }
            if !names.insert(s.name.as_str()) {
                return Err(Error::Schema(format!("duplicate descriptor set name '{}'", s.name)));
            }
            if s.matrix.nrows() != n {
                return Err(Error::Schema(format!(
                    "descriptor set '{}' has {} rows, expected {n}",
                    s.name,
                    s.matrix.nrows()
                )));
            }
            if s.matrix.ncols() == 0 || s.matrix.ncols() != s.columns.len() {
                return Err(Error::Schema(format!(
                    "descriptor set '{}' has inconsistent columns",
                    s.name
                )));
            }
        }
        Ok(Self {
            id_column,
            response_column,
            ids,
            response,
            sets,
        })
    }

    pub fn n(&self) -> usize {
        self.response.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id_column(&self) -> Option<&str> {
        self.id_column.as_deref()
    }

    pub fn response_column(&self) -> &str {
        &self.response_column
    }

    pub fn response(&self) -> &ResponseVector {
        &self.response
    }

    pub fn kind(&self) -> TaskKind {
        self.response.kind()
    }

    pub fn descriptor_sets(&self) -> &[DescriptorSet] {
        &self.sets
    }

    pub fn set(&self, name: &str) -> Option<&DescriptorSet> {
        self.sets.iter().find(|s| s.name == name)
    }

    /// Writes the dataset back out in the layout [`load_dataset`] reads.
    /// Floats are printed in shortest round-trip form, so reloading with the
    /// same spec reproduces every value exactly.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header: Vec<&str> = Vec::new();
        if let Some(id) = &self.id_column {
            header.push(id);
        }
        header.push(&self.response_column);
        for s in &self.sets {
            header.extend(s.columns.iter().map(String::as_str));
        }
        w.write_record(&header)?;
        let mut record = Vec::with_capacity(header.len());
        for i in 0..self.n() {
            record.clear();
            if self.id_column.is_some() {
                record.push(self.ids[i].clone());
            }
            record.push(self.response.values[i].to_string());
            for s in &self.sets {
                record.extend(s.matrix.row(i).iter().map(f64::to_string));
            }
            w.write_record(&record)?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }

    /// Spec describing this dataset's descriptor layout.
    pub fn set_spec(&self) -> DescriptorSetSpec {
        DescriptorSetSpec {
            lengths: self.sets.iter().map(|s| s.matrix.ncols()).collect(),
            names: Some(self.sets.iter().map(|s| s.name.clone()).collect()),
        }
    }
}

/// Loads a header-bearing, comma-delimited CSV.
///
/// Descriptor sets are contiguous blocks of the non-ID, non-response
/// columns, in file order, with the widths given by `opts.spec`. Without a
/// spec every descriptor column goes into one set named `Set1`.
pub fn load_dataset(path: &Path, opts: &LoadOptions) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .delimiter(b',')
        .from_reader(file);
    let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();

    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("column '{name}' not found in {}", path.display())))
    };
    let response_idx = find(&opts.response_col)?;
    let id_idx = opts.id_col.as_deref().map(find).transpose()?;
    if id_idx == Some(response_idx) {
        return Err(Error::Schema("id and response columns must differ".into()));
    }
    let descriptor_idx: Vec<usize> = (0..headers.len())
        .filter(|&i| i != response_idx && Some(i) != id_idx)
        .collect();
    if descriptor_idx.is_empty() {
        return Err(Error::Schema("no descriptor columns".into()));
    }
    let spec = match &opts.spec {
        Some(s) => s.clone(),
        None => DescriptorSetSpec {
            lengths: vec![descriptor_idx.len()],
            names: None,
        },
    };
    let total: usize = spec.lengths.iter().sum();
    if total != descriptor_idx.len() {
        return Err(Error::Schema(format!(
            "descriptor set lengths sum to {total} but the file has {} descriptor columns",
            descriptor_idx.len()
        )));
    }

    let mut ids = Vec::new();
    let mut response = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = row + 2;
        if rec.len() != headers.len() {
            return Err(Error::Parse {
                row: line,
                column: String::new(),
                message: format!("expected {} fields, found {}", headers.len(), rec.len()),
            });
        }
        let cell = |i: usize| -> Result<f64> {
            let raw = rec[i].trim();
            if raw.is_empty() || raw.eq_ignore_ascii_case("na") {
                return Err(Error::Parse {
                    row: line,
                    column: headers[i].clone(),
                    message: "missing value".into(),
                });
            }
            raw.parse::<f64>().map_err(|_| Error::Parse {
                row: line,
                column: headers[i].clone(),
                message: format!("'{raw}' is not a number"),
            })
        };
        if let Some(i) = id_idx {
            ids.push(rec[i].trim().to_string());
        }
        response.push(cell(response_idx)?);
        for &i in &descriptor_idx {
            let v = cell(i)?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row: line,
                    column: headers[i].clone(),
                    message: "value is not finite".into(),
                });
            }
            values.push(v);
        }
    }

    let n = response.len();
    let forced = opts.force_continuous.then_some(TaskKind::Continuous);
    let response = validate_response_as(response, forced)?;
    let width = descriptor_idx.len();
    let mut sets = Vec::with_capacity(spec.lengths.len());
    let mut start = 0;
    for (s, &len) in spec.lengths.iter().enumerate() {
        let mut data = Vec::with_capacity(n * len);
        for r in 0..n {
            data.extend_from_slice(&values[r * width + start..r * width + start + len]);
        }
        sets.push(DescriptorSet {
            name: spec.name(s),
            columns: descriptor_idx[start..start + len]
                .iter()
                .map(|&i| headers[i].clone())
                .collect(),
            matrix: Matrix::from_row_major(n, len, data),
        });
        start += len;
    }
    Dataset::new(
        opts.id_col.clone(),
        opts.response_col.clone(),
        id_idx.map(|_| ids),
        response,
        sets,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn response_kind_inference() {
        assert_eq!(validate_response(vec![0.0, 1.0, 1.0, 0.0]).unwrap().kind(), TaskKind::Binary);
        assert_eq!(
            validate_response(vec![0.2, 1.0, 0.0]).unwrap().kind(),
            TaskKind::Continuous
        );
        assert!(matches!(
            validate_response(vec![0.0, 0.0, 0.0]),
            Err(Error::Validation(_))
        ));
        assert!(validate_response(vec![1.0]).is_err());
        assert!(validate_response(vec![1.0, f64::NAN]).is_err());
        assert!(validate_response(vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn force_continuous_accepts_zero_one() {
        let r = validate_response_as(vec![0.0, 1.0, 0.0], Some(TaskKind::Continuous)).unwrap();
        assert_eq!(r.kind(), TaskKind::Continuous);
    }

    #[test]
    fn two_named_sets() {
        let f = write_tmp("CID,Outcome,a,b,c\nx1,1,0.5,1,2\nx2,0,1.5,0,3\nx3,0,2.5,1,4\n");
        let spec = DescriptorSetSpec::parse_pairs("First:1,Second:2").unwrap();
        let d = load_dataset(
            f.path(),
            &LoadOptions {
                id_col: Some("CID".into()),
                response_col: "Outcome".into(),
                spec: Some(spec),
                force_continuous: false,
            },
        )
        .unwrap();
        assert_eq!(d.n(), 3);
        assert_eq!(d.kind(), TaskKind::Binary);
        assert_eq!(d.ids(), ["x1", "x2", "x3"]);
        let sets = d.descriptor_sets();
        assert_eq!(sets[0].name, "First");
        assert_eq!(sets[0].matrix.ncols(), 1);
        assert_eq!(sets[1].columns, ["b", "c"]);
        assert_eq!(sets[1].matrix.row(2), [1.0, 4.0]);
    }

    #[test]
    fn no_spec_gives_single_set() {
        let f = write_tmp("y,a,b\n1.5,1,2\n2.5,3,4\n");
        let d = load_dataset(
            f.path(),
            &LoadOptions {
                response_col: "y".into(),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(d.descriptor_sets().len(), 1);
        assert_eq!(d.descriptor_sets()[0].name, "Set1");
        assert_eq!(d.descriptor_sets()[0].matrix.ncols(), 2);
        assert_eq!(d.ids(), ["1", "2"]);
        assert_eq!(d.kind(), TaskKind::Continuous);
    }

    #[test]
    fn errors_name_the_problem() {
        let f = write_tmp("y,a\n0,1\n0,2\n0,3\n");
        let opts = LoadOptions {
            response_col: "y".into(),
            ..Default::default()
        };
        assert!(matches!(load_dataset(f.path(), &opts), Err(Error::Validation(_))));

        let missing = LoadOptions {
            response_col: "nope".into(),
            ..Default::default()
        };
        let err = load_dataset(f.path(), &missing).unwrap_err().to_string();
        assert!(err.contains("'nope'"), "{err}");

        let f = write_tmp("y,a\n0,1\n1,oops\n");
        match load_dataset(f.path(), &opts) {
            Err(Error::Parse { row, column, .. }) => {
                assert_eq!(row, 3);
                assert_eq!(column, "a");
            }
            other => panic!("unexpected {other:?}"),
        }

        let f = write_tmp("y,a\n0,1\n1,\n");
        assert!(matches!(load_dataset(f.path(), &opts), Err(Error::Parse { .. })));
    }

    #[test]
    fn lengths_must_partition_columns() {
        let f = write_tmp("y,a,b,c\n0,1,2,3\n1,4,5,6\n");
        let opts = LoadOptions {
            response_col: "y".into(),
            spec: Some(DescriptorSetSpec::new(vec![1, 1], None).unwrap()),
            ..Default::default()
        };
        assert!(matches!(load_dataset(f.path(), &opts), Err(Error::Schema(_))));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let f = write_tmp("id,y,a\nA,0,1\nA,1,2\n");
        let opts = LoadOptions {
            id_col: Some("id".into()),
            response_col: "y".into(),
            ..Default::default()
        };
        assert!(matches!(load_dataset(f.path(), &opts), Err(Error::Validation(_))));
    }

    #[test]
    fn schema_sidecar() {
        let f = write_tmp(r#"{"id_col":"CID","response_col":"Outcome","sets":[{"name":"A","length":24},{"name":"B","length":147}]}"#);
        let s = Schema::from_path(f.path()).unwrap();
        let spec = s.set_spec().unwrap().unwrap();
        assert_eq!(spec.lengths, [24, 147]);
        assert_eq!(spec.names.unwrap(), ["A", "B"]);
    }
}
