//! Accumulation curves: the running total of the response over tests taken
//! in descending order of out-of-fold score. For a 0/1 response that is
//! the number of positives found after `m` tests.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::dataio::TaskKind;
use crate::learners::Method;
use crate::measures::{testing_order, PredictionStore};
use crate::svg::{tick_label, ticks, Anchor, Svg, MARKERS};
use crate::{Error, Result};

fn check_max_select(n: usize, max_select: usize) -> Result<()> {
    if max_select == 0 || max_select > n {
        return Err(Error::Argument(format!(
            "max_select = {max_select} must be between 1 and n = {n}"
        )));
    }
    Ok(())
}

/// `accumulated[m - 1]` is the sum of `y` over the first `m` tests.
pub fn accumulation(y: &[f64], scores: &[f64], max_select: usize) -> Result<Vec<f64>> {
    if y.len() != scores.len() {
        return Err(Error::Argument(format!(
            "{} responses but {} scores",
            y.len(),
            scores.len()
        )));
    }
    check_max_select(y.len(), max_select)?;
    Ok(running_sum(testing_order(scores)[..max_select].iter().map(|&i| y[i])))
}

/// Best achievable curve: tests taken in descending order of `y` itself.
pub fn ideal_curve(y: &[f64], max_select: usize) -> Result<Vec<f64>> {
    check_max_select(y.len(), max_select)?;
    let mut sorted = y.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    Ok(running_sum(sorted.into_iter().take(max_select)))
}

/// Expected curve under a uniformly random testing order, `m * mean(y)`.
pub fn random_curve(y: &[f64], max_select: usize) -> Result<Vec<f64>> {
    check_max_select(y.len(), max_select)?;
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    Ok((1..=max_select).map(|m| m as f64 * mean).collect())
}

/// `floor(min(300, n / 4))`, at least 1.
pub fn default_max_select(n: usize) -> usize {
    (n / 4).clamp(1, 300)
}

fn running_sum(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    values
        .map(|v| {
            acc += v;
            acc
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveLabel {
    Model { split: usize, set: String, method: String },
    Ideal,
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccumulationCurve {
    pub label: CurveLabel,
    pub accumulated: Vec<f64>,
}

impl AccumulationCurve {
    pub fn max_select(&self) -> usize {
        self.accumulated.len()
    }
}

/// Model curves for every (split, combo) of a store plus the two reference
/// curves, all of length `max_select`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSet {
    kind: TaskKind,
    nsplits: usize,
    models: Vec<AccumulationCurve>,
    ideal: AccumulationCurve,
    random: AccumulationCurve,
}

impl CurveSet {
    pub fn from_store(store: &PredictionStore, max_select: usize) -> Result<Self> {
        store.check_complete()?;
        let y = store.response();
        let mut models = Vec::with_capacity(store.len());
        for entry in store.entries() {
            models.push(AccumulationCurve {
                label: CurveLabel::Model {
                    split: entry.split,
                    set: entry.combo.set.clone(),
                    method: entry.combo.method.clone(),
                },
                accumulated: accumulation(y, entry.values, max_select)?,
            });
        }
        Ok(Self {
            kind: store.kind(),
            nsplits: store.nsplits(),
            models,
            ideal: AccumulationCurve {
                label: CurveLabel::Ideal,
                accumulated: ideal_curve(y, max_select)?,
            },
            random: AccumulationCurve {
                label: CurveLabel::Random,
                accumulated: random_curve(y, max_select)?,
            },
        })
    }

    pub fn kind(&self) -> TaskKind {
        self.kind
    }

    pub fn nsplits(&self) -> usize {
        self.nsplits
    }

    pub fn models(&self) -> &[AccumulationCurve] {
        &self.models
    }

    pub fn ideal(&self) -> &AccumulationCurve {
        &self.ideal
    }

    pub fn random(&self) -> &AccumulationCurve {
        &self.random
    }

    /// Descriptor set names in first-appearance order.
    pub fn sets(&self) -> Vec<String> {
        self.keys(|set, _| set)
    }

    /// Method names in first-appearance order.
    pub fn methods(&self) -> Vec<String> {
        self.keys(|_, method| method)
    }

    fn keys(&self, pick: impl for<'a> Fn(&'a str, &'a str) -> &'a str) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for c in &self.models {
            if let CurveLabel::Model { set, method, .. } = &c.label {
                let k = pick(set, method);
                if !out.iter().any(|x| x == k) {
                    out.push(k.to_string());
                }
            }
        }
        out
    }

    fn model(&self, split: usize, set: &str, method: &str) -> Option<&AccumulationCurve> {
        self.models.iter().find(|c| {
            matches!(&c.label, CurveLabel::Model { split: s, set: d, method: m }
                if *s == split && d == set && m == method)
        })
    }

    /// Writes `curves.csv` (`split,set,method,m,accumulated`). Reference
    /// curves are written once with an empty split and set and method
    /// `Ideal` or `Random`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["split", "set", "method", "m", "accumulated"])?;
        for c in &self.models {
            if let CurveLabel::Model { split, set, method } = &c.label {
                for (i, v) in c.accumulated.iter().enumerate() {
                    w.write_record([&split.to_string(), set, method, &(i + 1).to_string(), &v.to_string()])?;
                }
            }
        }
        for (name, c) in [("Ideal", &self.ideal), ("Random", &self.random)] {
            for (i, v) in c.accumulated.iter().enumerate() {
                w.write_record(["", "", name, &(i + 1).to_string(), &v.to_string()])?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Series {
    /// One plot per (split, descriptor set), overlaying methods.
    Methods,
    /// One plot per (split, method), overlaying descriptor sets.
    Descriptors,
    Both,
}

impl FromStr for Series {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "methods" => Ok(Series::Methods),
            "descriptors" => Ok(Series::Descriptors),
            "both" => Ok(Series::Both),
            _ => Err(Error::Argument(format!(
                "unknown series '{s}' (expected methods, descriptors or both)"
            ))),
        }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Series::Methods => "methods",
            Series::Descriptors => "descriptors",
            Series::Both => "both",
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct CurveFilter {
    /// 1-based splits; `None` keeps all.
    pub splits: Option<Vec<usize>>,
    /// Method names; `None` keeps all.
    pub methods: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotSize {
    pub width: f64,
    pub height: f64,
}

impl Default for PlotSize {
    fn default() -> Self {
        Self {
            width: 800.0,
            height: 600.0,
        }
    }
}

/// Okabe-Ito palette without black, which is kept for the ideal curve.
const COLORS: [&str; 7] = ["#E69F00", "#56B4E9", "#009E73", "#0072B2", "#D55E00", "#CC79A7", "#F0E442"];
const IDEAL_COLOR: &str = "#000000";
const RANDOM_COLOR: &str = "#808080";

/// Ridge is a regression fit whose scores are only thresholded; it is drawn
/// dashed without markers. Everything else, imported methods included, is
/// drawn solid with markers.
fn is_thresholded_fit(method: &str) -> bool {
    matches!(method.parse::<Method>(), Ok(m) if !m.is_probabilistic())
}

struct Line<'a> {
    name: String,
    values: &'a [f64],
    color: &'static str,
    dash: Option<&'static str>,
    marker: Option<usize>,
}

/// Renders the requested series into `out_dir` and returns the written
/// paths in generation order.
pub fn render_curve_series(
    curves: &CurveSet,
    series: Series,
    filter: &CurveFilter,
    out_dir: &Path,
    size: PlotSize,
) -> Result<Vec<PathBuf>> {
    let splits: Vec<usize> = match &filter.splits {
        None => (1..=curves.nsplits()).collect(),
        Some(req) => {
            let bad: Vec<String> = req
                .iter()
                .filter(|s| **s == 0 || **s > curves.nsplits())
                .map(|s| s.to_string())
                .collect();
            if !bad.is_empty() || req.is_empty() {
                return Err(Error::Argument(format!(
                    "no such split(s) [{}]; available splits: 1..={}",
                    bad.join(", "),
                    curves.nsplits()
                )));
            }
            req.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
        }
    };
    let all_methods = curves.methods();
    let methods: Vec<String> = match &filter.methods {
        None => all_methods.clone(),
        Some(req) => {
            let bad: Vec<&str> = req
                .iter()
                .filter(|m| !all_methods.contains(m))
                .map(String::as_str)
                .collect();
            if !bad.is_empty() || req.is_empty() {
                return Err(Error::Argument(format!(
                    "no such method(s) [{}]; available methods: {}",
                    bad.join(", "),
                    all_methods.join(", ")
                )));
            }
            all_methods.iter().filter(|m| req.contains(m)).cloned().collect()
        }
    };
    let sets = curves.sets();
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let mut written = Vec::new();
    let do_methods = matches!(series, Series::Methods | Series::Both);
    let do_descriptors = matches!(series, Series::Descriptors | Series::Both);
    for &split in &splits {
        if do_methods {
            for set in &sets {
                let path = out_dir.join(format!("acc_methods_split{split}_{}.svg", file_key(set)));
                let svg = methods_plot(curves, split, set, &methods, size);
                std::fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
                written.push(path);
            }
        }
        if do_descriptors {
            for m in &methods {
                let lines = sets
                    .iter()
                    .enumerate()
                    .filter_map(|(i, set)| {
                        curves.model(split, set, m).map(|c| model_line(set.clone(), m, &c.accumulated, i))
                    })
                    .collect();
                let title = format!("Split {split}: {m}");
                let path = out_dir.join(format!("acc_descriptors_split{split}_{}.svg", file_key(m)));
                let svg = plot_document(curves, &title, lines, size);
                std::fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
                written.push(path);
            }
        }
    }
    Ok(written)
}

/// All methods for `set` in a 1-based `split`, as an SVG document.
pub fn methods_plot_svg(curves: &CurveSet, split: usize, set: &str, size: PlotSize) -> String {
    methods_plot(curves, split, set, &curves.methods(), size)
}

fn methods_plot(curves: &CurveSet, split: usize, set: &str, methods: &[String], size: PlotSize) -> String {
    let lines = methods
        .iter()
        .enumerate()
        .filter_map(|(i, m)| curves.model(split, set, m).map(|c| model_line(m.clone(), m, &c.accumulated, i)))
        .collect();
    plot_document(curves, &format!("Split {split}: {set}"), lines, size)
}

fn model_line<'a>(name: String, method: &str, values: &'a [f64], i: usize) -> Line<'a> {
    let thresholded = is_thresholded_fit(method);
    Line {
        name,
        values,
        color: COLORS[i % COLORS.len()],
        dash: thresholded.then_some("8,4"),
        marker: (!thresholded).then_some(i % MARKERS.len()),
    }
}

fn file_key(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' })
        .collect()
}

fn plot_document<'a>(curves: &'a CurveSet, title: &str, mut lines: Vec<Line<'a>>, size: PlotSize) -> String {
    lines.push(Line {
        name: "Ideal".into(),
        values: &curves.ideal.accumulated,
        color: IDEAL_COLOR,
        dash: None,
        marker: None,
    });
    lines.push(Line {
        name: "Random".into(),
        values: &curves.random.accumulated,
        color: RANDOM_COLOR,
        dash: Some("3,3"),
        marker: None,
    });
    let ylabel = match curves.kind {
        TaskKind::Binary => "Number of positives",
        TaskKind::Continuous => "Accumulated response",
    };
    plot_svg(title, ylabel, &lines, size)
}

fn plot_svg(title: &str, ylabel: &str, lines: &[Line<'_>], size: PlotSize) -> String {
    let (left, right, top, bottom) = (70.0, 150.0, 40.0, 55.0);
    let pw = (size.width - left - right).max(10.0);
    let ph = (size.height - top - bottom).max(10.0);
    let n = lines.iter().map(|l| l.values.len()).max().unwrap_or(1).max(1);
    let ymin = lines
        .iter()
        .flat_map(|l| l.values.iter().copied())
        .fold(0.0f64, f64::min);
    let ymax = lines
        .iter()
        .flat_map(|l| l.values.iter().copied())
        .fold(0.0f64, f64::max);
    let yspan = if ymax - ymin > 0.0 { ymax - ymin } else { 1.0 };
    let px = |m: f64| left + pw * m / n as f64;
    let py = |v: f64| top + ph * (1.0 - (v - ymin) / yspan);

    let mut svg = Svg::new(size.width, size.height);
    svg.text(left + pw / 2.0, 24.0, title, 16.0, Anchor::Middle);
    svg.rect(left, top, pw, ph, "none", Some("#000000"));
    for t in ticks(n as f64, 6) {
        svg.line(px(t), top + ph, px(t), top + ph + 5.0, "#000000", 1.0);
        svg.text(px(t), top + ph + 18.0, &tick_label(t), 11.0, Anchor::Middle);
    }
    for t in ticks(ymax - ymin, 6) {
        let v = ymin + t;
        svg.line(left - 5.0, py(v), left, py(v), "#000000", 1.0);
        svg.text(left - 8.0, py(v) + 4.0, &tick_label(v), 11.0, Anchor::End);
    }
    svg.text(left + pw / 2.0, size.height - 12.0, "Number of tests", 13.0, Anchor::Middle);
    svg.text_rotated(18.0, top + ph / 2.0, ylabel, 13.0, Anchor::Middle, -90.0);

    let marker_every = (n / 10).max(1);
    for line in lines {
        let pts: Vec<(f64, f64)> = std::iter::once((px(0.0), py(0.0)))
            .chain(line.values.iter().enumerate().map(|(i, &v)| (px((i + 1) as f64), py(v))))
            .collect();
        svg.polyline(&pts, line.color, 1.5, line.dash);
        if let Some(mk) = line.marker {
            for (i, &v) in line.values.iter().enumerate() {
                if (i + 1) % marker_every == 0 {
                    svg.marker(MARKERS[mk], px((i + 1) as f64), py(v), 3.0, line.color);
                }
            }
        }
    }

    let lx = left + pw + 15.0;
    for (i, line) in lines.iter().enumerate() {
        let ly = top + 10.0 + 20.0 * i as f64;
        svg.polyline(&[(lx, ly), (lx + 28.0, ly)], line.color, 1.5, line.dash);
        if let Some(mk) = line.marker {
            svg.marker(MARKERS[mk], lx + 14.0, ly, 3.0, line.color);
        }
        svg.text(lx + 34.0, ly + 4.0, &line.name, 11.0, Anchor::Start);
    }
    svg.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_orderings() {
        assert_eq!(accumulation(&[1.0, 0.0, 1.0], &[0.9, 0.5, 0.8], 3).unwrap(), [1.0, 2.0, 2.0]);
        assert_eq!(accumulation(&[2.0, 1.0], &[0.1, 0.9], 2).unwrap(), [1.0, 3.0]);
    }

    #[test]
    fn ties_go_to_lower_rows() {
        assert_eq!(accumulation(&[0.0, 1.0, 1.0], &[0.5, 0.5, 0.1], 3).unwrap(), [0.0, 1.0, 2.0]);
    }

    #[test]
    fn reference_curves() {
        let mut y = vec![0.0; 500];
        y[..50].fill(1.0);
        assert_eq!(ideal_curve(&y, 300).unwrap()[299], 50.0);
        assert_eq!(ideal_curve(&y, 300).unwrap()[24], 25.0);
        assert!((random_curve(&y, 100).unwrap()[99] - 10.0).abs() < 1e-12);
        assert!((random_curve(&y, 500).unwrap()[499] - 50.0).abs() < 1e-9);
        assert_eq!(ideal_curve(&[3.0, 1.0, 2.0], 2).unwrap()[1], 5.0);
        assert_eq!(random_curve(&[1.0, 3.0], 2).unwrap(), [2.0, 4.0]);
    }

    #[test]
    fn max_select_defaults_and_guard() {
        assert_eq!(default_max_select(3311), 300);
        assert_eq!(default_max_select(500), 125);
        assert_eq!(default_max_select(1200), 300);
        assert_eq!(default_max_select(3), 1);
        assert!(accumulation(&[1.0], &[1.0], 2).is_err());
        assert!(ideal_curve(&[1.0], 0).is_err());
    }

    #[test]
    fn series_parse() {
        assert_eq!("both".parse::<Series>().unwrap(), Series::Both);
        assert!("all".parse::<Series>().is_err());
    }
}
