//! End-to-end driver. `run_model_train` fits the D-M grid under repeated
//! k-fold cross-validation and persists a run directory; the assessment
//! helpers reload that directory and produce measures, ANOVA, pairwise
//! comparisons, curves and the MCS plot.
//!
//! Run directory layout:
//!
//! ```text
//! manifest.json     config echo, seeds, grid, tool version
//! response.csv      id,response
//! folds.csv         split,row_index,fold
//! predictions.csv   split,descriptor_set,method,id,prediction
//! measures.csv, anova_<metric>.txt, pairwise.csv, mcs_<metric>.{svg,csv}
//! curves.csv, acc_<series>_split<i>_<key>.svg
//! ```

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::{render_curve_series, CurveFilter, CurveSet, PlotSize, Series};
use crate::dataio::{load_dataset, Dataset, LoadOptions, SetEntry, TaskKind};
use crate::folds::{make_split_plan, SplitPlan};
use crate::inference::tukey::PairwiseFile;
use crate::inference::{anova_blocked, tukey_kramer, write_pairwise_csv, AnovaTable, PairwiseComparison};
use crate::learners::{fit_predict, make_model_defaults, Method, MethodSpec, ParamRegistry, Params, DEFAULT_THRESHOLD};
use crate::mcs::{build_mcs, mcs_file_stem, render_mcs_svg, write_mcs_csv, McsMatrix};
use crate::measures::{build_measure_table, Combo, MeasureOptions, MeasureTable, Metric, PredictionStore, DEFAULT_IE_TESTS};
use crate::rng::task_seed;
use crate::{Error, Result, VERSION};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const RESPONSE_FILE: &str = "response.csv";
pub const FOLDS_FILE: &str = "folds.csv";
pub const PREDICTIONS_FILE: &str = "predictions.csv";
pub const MEASURES_FILE: &str = "measures.csv";
pub const PAIRWISE_FILE: &str = "pairwise.csv";
pub const CURVES_FILE: &str = "curves.csv";

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub data: PathBuf,
    pub load: LoadOptions,
    pub methods: Vec<Method>,
    /// Method -> parameter overrides, merged over the per-set defaults.
    pub params: BTreeMap<String, Params>,
    pub nfolds: usize,
    pub nsplits: usize,
    pub seeds: Option<Vec<u64>>,
    pub threshold: f64,
    /// Default number of tests for initial enhancement.
    pub m: usize,
    pub out_dir: PathBuf,
    /// Worker threads; `None` uses the available parallelism.
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(data: impl Into<PathBuf>, response_col: impl Into<String>, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            data: data.into(),
            load: LoadOptions {
                response_col: response_col.into(),
                ..LoadOptions::default()
            },
            methods: Method::ALL.to_vec(),
            params: BTreeMap::new(),
            nfolds: 10,
            nsplits: 3,
            seeds: None,
            threshold: DEFAULT_THRESHOLD,
            m: DEFAULT_IE_TESTS,
            out_dir: out_dir.into(),
            threads: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.nfolds < 2 {
            return Err(Error::Argument(format!("nfolds must be at least 2, got {}", self.nfolds)));
        }
        if self.nsplits < 1 {
            return Err(Error::Argument("nsplits must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Argument("no methods selected".into()));
        }
        let mut seen = Vec::new();
        for m in &self.methods {
            if seen.contains(m) {
                return Err(Error::Argument(format!("method {m} listed twice")));
            }
            seen.push(*m);
        }
        if !self.threshold.is_finite() {
            return Err(Error::Argument("threshold must be finite".into()));
        }
        if self.m == 0 {
            return Err(Error::Argument("m must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Argument("threads must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComboSource {
    Builtin,
    Imported,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComboEntry {
    pub set: String,
    pub method: String,
    pub source: ComboSource,
}

/// `manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub data: String,
    pub id_col: Option<String>,
    pub response_col: String,
    pub force_continuous: bool,
    pub task: TaskKind,
    pub n: usize,
    pub sets: Vec<SetEntry>,
    pub methods: Vec<String>,
    /// Descriptor set -> method -> parameters actually used.
    pub params: BTreeMap<String, BTreeMap<String, Params>>,
    pub nfolds: usize,
    pub nsplits: usize,
    pub seeds: Vec<u64>,
    pub threshold: f64,
    pub m: usize,
    pub combos: Vec<ComboEntry>,
}

impl Manifest {
    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }

    pub fn combo_list(&self) -> Vec<Combo> {
        self.combos.iter().map(|c| Combo::new(&c.set, &c.method)).collect()
    }
}

#[derive(Debug)]
pub struct RunOutput {
    pub manifest: Manifest,
    pub store: PredictionStore,
    pub plan: SplitPlan,
}

/// Runs `f` on a pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Argument(format!("cannot build a {t}-thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Parameters per method for one descriptor set of width `p`.
pub fn registry_for_set(
    n: usize,
    p: usize,
    kind: TaskKind,
    nfolds: usize,
    overrides: &BTreeMap<String, Params>,
) -> Result<ParamRegistry> {
    let mut reg = make_model_defaults(n, p, kind == TaskKind::Binary, nfolds);
    reg.merge(overrides)?;
    Ok(reg)
}

struct Task {
    split: usize,
    combo: usize,
    set: usize,
    fold: usize,
}

/// Fits every (split, descriptor set, method, fold) task and writes the
/// run directory.
pub fn run_model_train(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let data = load_dataset(&config.data, &config.load)?;
    let out = train_dataset(&data, config)?;
    std::fs::create_dir_all(&config.out_dir).map_err(|e| Error::io(&config.out_dir, e))?;
    write_response(&config.out_dir, &out.store)?;
    out.plan.write_csv(&config.out_dir.join(FOLDS_FILE))?;
    out.store.write_csv(&config.out_dir.join(PREDICTIONS_FILE))?;
    out.manifest.write(&config.out_dir)?;
    Ok(out)
}

/// The fitting half of [`run_model_train`], without touching the disk.
pub fn train_dataset(data: &Dataset, config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let n = data.n();
    let kind = data.kind();
    let plan = make_split_plan(n, config.nsplits, config.nfolds, config.seeds.as_deref())?;
    let sets = data.descriptor_sets();

    let mut specs: Vec<Vec<MethodSpec>> = Vec::with_capacity(sets.len());
    let mut params = BTreeMap::new();
    for set in sets {
        let reg = registry_for_set(n, set.matrix.ncols(), kind, config.nfolds, &config.params)?;
        let row: Vec<MethodSpec> = config
            .methods
            .iter()
            .map(|&m| MethodSpec::from_registry(m, &reg, kind))
            .collect::<Result<_>>()?;
        params.insert(
            set.name.clone(),
            row.iter()
                .map(|s| (s.method().name().to_string(), s.params().clone()))
                .collect(),
        );
        specs.push(row);
    }

    let nmethods = config.methods.len();
    let mut tasks = Vec::new();
    for split in 0..config.nsplits {
        for set in 0..sets.len() {
            for method in 0..nmethods {
                for fold in 1..=config.nfolds {
                    tasks.push(Task {
                        split,
                        combo: set * nmethods + method,
                        set,
                        fold,
                    });
                }
            }
        }
    }

    let y = data.response().values();
    let results: Vec<Result<(Vec<usize>, Vec<f64>)>> = with_threads(config.threads, || {
        tasks
            .par_iter()
            .map(|t| {
                let spec = &specs[t.set][t.combo % nmethods];
                let train = plan.train_rows(t.split, t.fold);
                let test = plan.test_rows(t.split, t.fold);
                let x = &sets[t.set].matrix;
                let train_y: Vec<f64> = train.iter().map(|&i| y[i]).collect();
                let seed = task_seed(plan.seeds()[t.split], t.split, t.combo, t.fold);
                let preds = fit_predict(spec, &x.select_rows(&train), &train_y, &x.select_rows(&test), seed)
                    .map_err(|e| Error::Task {
                        split: t.split + 1,
                        set: sets[t.set].name.clone(),
                        method: spec.method().name().to_string(),
                        fold: t.fold,
                        source: Box::new(e),
                    })?;
                Ok((test, preds))
            })
            .collect()
    })?;

    let ncombos = sets.len() * nmethods;
    let mut oof: Vec<Vec<Option<f64>>> = vec![vec![None; n]; config.nsplits * ncombos];
    for (t, r) in tasks.iter().zip(results) {
        let (rows, preds) = r?;
        let cell = &mut oof[t.split * ncombos + t.combo];
        for (row, v) in rows.into_iter().zip(preds) {
            if cell[row].replace(v).is_some() {
                return Err(Error::Numeric(format!("row {} predicted twice in split {}", row + 1, t.split + 1)));
            }
        }
    }

    let mut store = PredictionStore::for_dataset(data, config.nsplits)?;
    let mut combos = Vec::with_capacity(ncombos);
    for set in sets {
        for m in &config.methods {
            combos.push(Combo::new(&set.name, m.name()));
        }
    }
    for split in 0..config.nsplits {
        for (c, combo) in combos.iter().enumerate() {
            let values = oof[split * ncombos + c]
                .iter()
                .enumerate()
                .map(|(row, v)| {
                    v.ok_or_else(|| Error::Numeric(format!("row {} has no prediction in split {}", row + 1, split + 1)))
                })
                .collect::<Result<Vec<f64>>>()?;
            store.insert(split + 1, combo.clone(), values)?;
        }
    }

    let manifest = Manifest {
        tool: "cvbench".into(),
        version: VERSION.into(),
        data: config.data.display().to_string(),
        id_col: data.id_column().map(str::to_string),
        response_col: data.response_column().to_string(),
        force_continuous: config.load.force_continuous,
        task: kind,
        n,
        sets: sets
            .iter()
            .map(|s| SetEntry {
                name: s.name.clone(),
                length: s.matrix.ncols(),
            })
            .collect(),
        methods: config.methods.iter().map(|m| m.name().to_string()).collect(),
        params,
        nfolds: config.nfolds,
        nsplits: config.nsplits,
        seeds: plan.seeds().to_vec(),
        threshold: config.threshold,
        m: config.m,
        combos: combos
            .iter()
            .map(|c| ComboEntry {
                set: c.set.clone(),
                method: c.method.clone(),
                source: ComboSource::Builtin,
            })
            .collect(),
    };
    Ok(RunOutput { manifest, store, plan })
}

fn write_response(dir: &Path, store: &PredictionStore) -> Result<()> {
    let path = dir.join(RESPONSE_FILE);
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["id", "response"])?;
    for (id, y) in store.ids().iter().zip(store.response()) {
        w.write_record([id.as_str(), &y.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(())
}

fn read_response(dir: &Path) -> Result<(Vec<String>, Vec<f64>)> {
    let path = dir.join(RESPONSE_FILE);
    let mut rdr = csv::Reader::from_path(&path)?;
    let mut ids = Vec::new();
    let mut y = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        ids.push(rec.get(0).unwrap_or_default().to_string());
        let v = rec.get(1).unwrap_or_default();
        y.push(v.parse().map_err(|_| Error::Parse {
            row: i + 2,
            column: "response".into(),
            message: format!("'{v}' is not a number"),
        })?);
    }
    Ok((ids, y))
}

/// One (split, combo) prediction vector read from a CSV, aligned to the
/// run's id order.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionEntry {
    pub split: usize,
    pub combo: Combo,
    pub values: Vec<f64>,
}

const LIST_LIMIT: usize = 10;

fn list_keys(keys: &[String]) -> String {
    let mut s = keys.iter().take(LIST_LIMIT).cloned().collect::<Vec<_>>().join("; ");
    if keys.len() > LIST_LIMIT {
        s.push_str(&format!("; ... ({} in total)", keys.len()));
    }
    s
}

/// Reads a `split,descriptor_set,method,id,prediction` file and checks that
/// every (split, combo) covers each of `ids` exactly once and that every
/// combo covers all `nsplits` splits.
pub fn read_predictions(path: &Path, ids: &[String], nsplits: usize) -> Result<Vec<PredictionEntry>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let expected = ["split", "descriptor_set", "method", "id", "prediction"];
    if header != expected {
        return Err(Error::Import(format!(
            "{} must have columns {}, found {}",
            path.display(),
            expected.join(","),
            header.join(",")
        )));
    }
    let id_index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let mut combos: Vec<Combo> = Vec::new();
    let mut cells: BTreeMap<(usize, usize), Vec<Option<f64>>> = BTreeMap::new();
    let mut problems = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        if rec.len() != 5 {
            return Err(Error::Import(format!("row {row}: expected 5 fields, found {}", rec.len())));
        }
        let split: usize = rec[0]
            .trim()
            .parse()
            .map_err(|_| Error::Import(format!("row {row}: bad split '{}'", &rec[0])))?;
        if split == 0 || split > nsplits {
            return Err(Error::Import(format!("row {row}: split {split} is outside 1..={nsplits}")));
        }
        let combo = Combo::new(rec[1].trim(), rec[2].trim());
        if combo.set.is_empty() || combo.method.is_empty() {
            return Err(Error::Import(format!("row {row}: empty descriptor_set or method")));
        }
        let value: f64 = rec[4]
            .trim()
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| Error::Import(format!("row {row}: bad prediction '{}'", &rec[4])))?;
        let id = rec[3].trim();
        let Some(&idx) = id_index.get(id) else {
            problems.push(format!("(split {split}, {combo}, unknown id {id})"));
            continue;
        };
        let c = match combos.iter().position(|x| *x == combo) {
            Some(c) => c,
            None => {
                combos.push(combo.clone());
                combos.len() - 1
            }
        };
        let cell = cells.entry((split, c)).or_insert_with(|| vec![None; ids.len()]);
        if cell[idx].replace(value).is_some() {
            problems.push(format!("(split {split}, {combo}, duplicate id {id})"));
        }
    }
    for (c, combo) in combos.iter().enumerate() {
        for split in 1..=nsplits {
            match cells.get(&(split, c)) {
                None => problems.push(format!("(split {split}, {combo}, all ids missing)")),
                Some(cell) => {
                    for (idx, v) in cell.iter().enumerate() {
                        if v.is_none() {
                            problems.push(format!("(split {split}, {combo}, missing id {})", ids[idx]));
                        }
                    }
                }
            }
        }
    }
    if !problems.is_empty() {
        return Err(Error::Import(format!(
            "{}: {}",
            path.display(),
            list_keys(&problems)
        )));
    }
    let mut out = Vec::new();
    for split in 1..=nsplits {
        for (c, combo) in combos.iter().enumerate() {
            let values = cells[&(split, c)].iter().map(|v| v.expect("coverage checked")).collect();
            out.push(PredictionEntry {
                split,
                combo: combo.clone(),
                values,
            });
        }
    }
    Ok(out)
}

/// A run directory loaded back for assessment.
#[derive(Debug, Clone)]
pub struct LoadedRun {
    pub dir: PathBuf,
    pub manifest: Manifest,
    pub store: PredictionStore,
}

pub fn load_run(dir: &Path) -> Result<LoadedRun> {
    let manifest = Manifest::read(dir)?;
    let (ids, y) = read_response(dir)?;
    if ids.len() != manifest.n {
        return Err(Error::Validation(format!(
            "{} lists {} observations, manifest says {}",
            RESPONSE_FILE,
            ids.len(),
            manifest.n
        )));
    }
    let entries = read_predictions(&dir.join(PREDICTIONS_FILE), &ids, manifest.nsplits)?;
    let mut by_key: HashMap<(usize, Combo), Vec<f64>> =
        entries.into_iter().map(|e| ((e.split, e.combo), e.values)).collect();
    let mut store = PredictionStore::new(manifest.task, ids, y, manifest.nsplits)?;
    for split in 1..=manifest.nsplits {
        for combo in manifest.combo_list() {
            let values = by_key.remove(&(split, combo.clone())).ok_or_else(|| {
                Error::IncompleteDesign(format!("{PREDICTIONS_FILE} has no predictions for split {split}, {combo}"))
            })?;
            store.insert(split, combo, values)?;
        }
    }
    if let Some(((_, combo), _)) = by_key.into_iter().next() {
        return Err(Error::Validation(format!(
            "{PREDICTIONS_FILE} has predictions for {combo}, which the manifest does not list"
        )));
    }
    Ok(LoadedRun {
        dir: dir.to_path_buf(),
        manifest,
        store,
    })
}

/// Validates external predictions against a loaded run. Combos already in
/// the run are rejected.
pub fn import_predictions(path: &Path, run: &LoadedRun) -> Result<Vec<PredictionEntry>> {
    let entries = read_predictions(path, run.store.ids(), run.manifest.nsplits)?;
    let clashes: Vec<String> = entries
        .iter()
        .filter(|e| e.split == 1 && run.store.combo_index(&e.combo).is_some())
        .map(|e| e.combo.label())
        .collect();
    if !clashes.is_empty() {
        return Err(Error::Import(format!(
            "combination(s) already present in the run: {}",
            clashes.join(", ")
        )));
    }
    Ok(entries)
}

/// Imports external predictions into a run directory, rewriting
/// `predictions.csv` and `manifest.json`. Returns the new combos.
pub fn import_into_run(dir: &Path, path: &Path) -> Result<Vec<Combo>> {
    let mut run = load_run(dir)?;
    let entries = import_predictions(path, &run)?;
    let mut added = Vec::new();
    for e in entries {
        if !added.contains(&e.combo) {
            added.push(e.combo.clone());
        }
        run.store.insert(e.split, e.combo, e.values)?;
    }
    for c in &added {
        run.manifest.combos.push(ComboEntry {
            set: c.set.clone(),
            method: c.method.clone(),
            source: ComboSource::Imported,
        });
    }
    run.store.write_csv(&dir.join(PREDICTIONS_FILE))?;
    run.manifest.write(dir)?;
    Ok(added)
}

/// Measures, blocked ANOVA, pairwise comparisons and the MCS matrix for one
/// metric.
#[derive(Debug, Clone)]
pub struct Assessment {
    pub table: MeasureTable,
    pub anova: AnovaTable,
    pub pairwise: Vec<PairwiseComparison>,
    pub mcs: McsMatrix,
}

pub fn assess(store: &PredictionStore, metric: Metric, opts: &MeasureOptions) -> Result<Assessment> {
    let table = build_measure_table(store, metric, opts)?;
    let anova = anova_blocked(&table)?;
    let means = table.combo_means();
    let pairwise = tukey_kramer(&anova, &means, table.nsplits())?;
    let mcs = build_mcs(&pairwise, table.combos(), &means, metric, table.m(), table.threshold())?;
    Ok(Assessment {
        table,
        anova,
        pairwise,
        mcs,
    })
}

/// Writes the assessment artifacts into `dir` and returns their paths.
pub fn write_assessment(dir: &Path, a: &Assessment) -> Result<Vec<PathBuf>> {
    let metric = a.table.metric();
    let measures = dir.join(MEASURES_FILE);
    a.table.write_csv(&measures)?;
    let anova = dir.join(format!("anova_{}.txt", metric.name()));
    std::fs::write(&anova, a.anova.render_text()).map_err(|e| Error::io(&anova, e))?;
    let pairwise = dir.join(PAIRWISE_FILE);
    write_pairwise_csv(
        &pairwise,
        &PairwiseFile {
            metric,
            m: a.table.m(),
            threshold: a.table.threshold(),
            combos: a.table.combos().to_vec(),
            comparisons: a.pairwise.clone(),
        },
    )?;
    let stem = mcs_file_stem(metric);
    let svg = dir.join(format!("{stem}.svg"));
    render_mcs_svg(&a.mcs, &svg)?;
    let csv = dir.join(format!("{stem}.csv"));
    write_mcs_csv(&a.mcs, &csv)?;
    Ok(vec![measures, anova, pairwise, svg, csv])
}

/// Writes `curves.csv` and the requested accumulation plots into `dir`.
pub fn write_curves(
    dir: &Path,
    store: &PredictionStore,
    series: Series,
    filter: &CurveFilter,
    max_select: usize,
    size: PlotSize,
) -> Result<Vec<PathBuf>> {
    let curves = CurveSet::from_store(store, max_select)?;
    let mut paths = render_curve_series(&curves, series, filter, dir, size)?;
    let csv = dir.join(CURVES_FILE);
    curves.write_csv(&csv)?;
    paths.push(csv);
    Ok(paths)
}
