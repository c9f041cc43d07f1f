//! WebAssembly front end for the browser demo. Everything runs in memory:
//! a synthetic screening dataset is simulated, cross-validated with the four
//! built-in methods, then assessed and plotted on request.

use std::collections::BTreeMap;

use cvbench::curves::{default_max_select, methods_plot_svg, CurveSet, PlotSize};
use cvbench::dataio::{validate_response, Dataset, DescriptorSet};
use cvbench::learners::Params;
use cvbench::matrix::Matrix;
use cvbench::measures::{MeasureOptions, Metric, PredictionStore};
use cvbench::orchestrator::{assess, train_dataset, RunConfig};
use cvbench::rng::SplitMix64;
use wasm_bindgen::prelude::*;

pub const SETS: [&str; 2] = ["Strong", "Weak"];

fn uniform(rng: &mut SplitMix64) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

fn normal(rng: &mut SplitMix64) -> f64 {
    let (u, v) = (uniform(rng), uniform(rng));
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

/// Binary dataset with two descriptor sets. "Strong" shifts 3 of 4 columns
/// by `signal` for actives, "Weak" shifts 2 of 6 columns by half as much.
pub fn simulate(n: usize, positives: usize, signal: f64, seed: u64) -> cvbench::Result<Dataset> {
    if positives == 0 || positives >= n {
        return Err(cvbench::Error::Argument(format!(
            "need 0 < positives < n, got {positives} of {n}"
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let mut order: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut order);
    let mut y = vec![0.0; n];
    for &i in &order[..positives] {
        y[i] = 1.0;
    }
    let block = |rng: &mut SplitMix64, p: usize, shifted: usize, shift: f64| {
        let mut m = Matrix::zeros(n, p);
        for (i, &yi) in y.iter().enumerate() {
            for j in 0..p {
                let s = if j < shifted { shift * yi } else { 0.0 };
                m.set(i, j, normal(rng) + s);
            }
        }
        m
    };
    let strong = block(&mut rng, 4, 3, signal);
    let weak = block(&mut rng, 6, 2, 0.5 * signal);
    let sets = vec![
        DescriptorSet {
            name: SETS[0].into(),
            columns: (1..=4).map(|j| format!("s{j}")).collect(),
            matrix: strong,
        },
        DescriptorSet {
            name: SETS[1].into(),
            columns: (1..=6).map(|j| format!("w{j}")).collect(),
            matrix: weak,
        },
    ];
    let ids = (1..=n).map(|i| format!("C{i:04}")).collect();
    Dataset::new(Some("id".into()), "active".into(), Some(ids), validate_response(y)?, sets)
}

/// Repeated 5-fold cross-validation of all built-in methods.
pub fn fit(data: &Dataset, nsplits: usize) -> cvbench::Result<PredictionStore> {
    let mut config = RunConfig::new("memory", "active", "memory");
    config.nfolds = 5;
    config.nsplits = nsplits;
    let rf: Params = [("n_trees".to_string(), 60.0)].into_iter().collect();
    config.params = BTreeMap::from([("RF".to_string(), rf)]);
    Ok(train_dataset(data, &config)?.store)
}

#[wasm_bindgen]
pub struct Benchmark {
    store: PredictionStore,
    curves: CurveSet,
}

#[wasm_bindgen]
pub struct AssessmentView {
    anova: String,
    mcs: String,
    ranking: String,
}

#[wasm_bindgen]
impl AssessmentView {
    #[wasm_bindgen(getter)]
    pub fn anova(&self) -> String {
        self.anova.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn mcs(&self) -> String {
        self.mcs.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn ranking(&self) -> String {
        self.ranking.clone()
    }
}

fn js(e: cvbench::Error) -> JsError {
    JsError::new(&e.to_string())
}

impl Benchmark {
    pub fn build(n: usize, positives: usize, signal: f64, nsplits: usize, seed: u64) -> cvbench::Result<Self> {
        let data = simulate(n, positives, signal, seed)?;
        let store = fit(&data, nsplits)?;
        let curves = CurveSet::from_store(&store, default_max_select(n))?;
        Ok(Self { store, curves })
    }

    pub fn evaluate(&self, metric: &str, m: usize, threshold: f64) -> cvbench::Result<AssessmentView> {
        let metric: Metric = metric.parse()?;
        let a = assess(&self.store, metric, &MeasureOptions { m, threshold })?;
        let ranking = a
            .mcs
            .labels()
            .iter()
            .zip(&a.mcs.means)
            .enumerate()
            .map(|(i, (l, v))| format!("{:>2}. {l:<14} {v:.4}", i + 1))
            .collect::<Vec<_>>()
            .join("\n");
        Ok(AssessmentView {
            anova: a.anova.render_text(),
            mcs: cvbench::mcs::mcs_svg(&a.mcs),
            ranking,
        })
    }

    pub fn curve(&self, split: usize, set: &str) -> cvbench::Result<String> {
        if split == 0 || split > self.curves.nsplits() || !SETS.contains(&set) {
            return Err(cvbench::Error::Argument(format!("no curves for split {split}, set '{set}'")));
        }
        Ok(methods_plot_svg(&self.curves, split, set, PlotSize { width: 720.0, height: 480.0 }))
    }
}

#[wasm_bindgen]
impl Benchmark {
    /// Simulates and cross-validates a dataset.
    #[wasm_bindgen(constructor)]
    pub fn new(n: usize, positives: usize, signal: f64, nsplits: usize, seed: u64) -> Result<Benchmark, JsError> {
        Self::build(n, positives, signal, nsplits, seed).map_err(js)
    }

    /// Blocked ANOVA, Tukey comparisons and the MCS plot for one metric.
    pub fn assess(&self, metric: &str, m: usize, threshold: f64) -> Result<AssessmentView, JsError> {
        self.evaluate(metric, m, threshold).map_err(js)
    }

    /// Accumulation curves of every method for one split and descriptor set.
    #[wasm_bindgen(js_name = curveSvg)]
    pub fn curve_svg(&self, split: usize, set: &str) -> Result<String, JsError> {
        self.curve(split, set).map_err(js)
    }

    #[wasm_bindgen(getter)]
    pub fn n(&self) -> usize {
        self.store.n()
    }

    #[wasm_bindgen(getter)]
    pub fn nsplits(&self) -> usize {
        self.store.nsplits()
    }
}
