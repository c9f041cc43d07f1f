//! Multiple-comparisons-similarity (MCS) plot: a heatmap of Tukey
//! significance buckets between every pair of D-M combinations, with both
//! axes ordered best to worst.

use std::fmt::Write as _;
use std::path::Path;

use crate::inference::{Bucket, PairwiseComparison};
use crate::measures::{Combo, Metric};
use crate::svg::{Anchor, Svg};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    HigherIsBetter,
    LowerIsBetter,
}

impl Direction {
    pub fn for_metric(metric: Metric) -> Self {
        if metric.lower_is_better() {
            Direction::LowerIsBetter
        } else {
            Direction::HigherIsBetter
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McsCell {
    SelfPair,
    Pair(Bucket),
}

impl McsCell {
    pub fn as_str(self) -> &'static str {
        match self {
            McsCell::SelfPair => "self",
            McsCell::Pair(b) => b.as_str(),
        }
    }

    fn color(self) -> &'static str {
        match self {
            McsCell::SelfPair => "#BBBBBB",
            McsCell::Pair(Bucket::P01) => "#D55E00",
            McsCell::Pair(Bucket::P05) => "#E69F00",
            McsCell::Pair(Bucket::NotSignificant) => "#56B4E9",
        }
    }
}

/// Rows and columns of `cells` follow `ordering`.
#[derive(Debug, Clone, PartialEq)]
pub struct McsMatrix {
    pub metric: Metric,
    pub m: Option<usize>,
    pub threshold: Option<f64>,
    pub direction: Direction,
    pub ordering: Vec<Combo>,
    pub means: Vec<f64>,
    pub cells: Vec<Vec<McsCell>>,
}

impl McsMatrix {
    pub fn len(&self) -> usize {
        self.ordering.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordering.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.ordering.iter().map(Combo::label).collect()
    }
}

/// Arranges complete pairwise results into an ordered matrix. `combos` and
/// `means` are indexed like `combo_a`/`combo_b` in the comparisons.
pub fn build_mcs(
    comparisons: &[PairwiseComparison],
    combos: &[Combo],
    means: &[f64],
    metric: Metric,
    m: Option<usize>,
    threshold: Option<f64>,
) -> Result<McsMatrix> {
    let j = combos.len();
    if j == 0 || means.len() != j {
        return Err(Error::Argument(format!(
            "{} combos but {} means",
            combos.len(),
            means.len()
        )));
    }
    let mut grid: Vec<Vec<Option<Bucket>>> = vec![vec![None; j]; j];
    for c in comparisons {
        let (a, b) = (c.combo_a, c.combo_b);
        if a >= j || b >= j || a == b {
            return Err(Error::Argument(format!("comparison ({a}, {b}) out of range for {j} combos")));
        }
        if grid[a][b].is_some() {
            return Err(Error::IncompleteDesign(format!(
                "duplicate comparison {} vs {}",
                combos[a], combos[b]
            )));
        }
        grid[a][b] = Some(c.bucket);
        grid[b][a] = Some(c.bucket);
    }
    let mut missing = Vec::new();
    for a in 0..j {
        for b in a + 1..j {
            if grid[a][b].is_none() {
                missing.push(format!("{} vs {}", combos[a], combos[b]));
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::IncompleteDesign(format!(
            "missing comparisons: {}",
            missing.join("; ")
        )));
    }

    let direction = Direction::for_metric(metric);
    let labels: Vec<String> = combos.iter().map(Combo::label).collect();
    let mut order: Vec<usize> = (0..j).collect();
    order.sort_by(|&a, &b| {
        let by_mean = match direction {
            Direction::HigherIsBetter => means[b].total_cmp(&means[a]),
            Direction::LowerIsBetter => means[a].total_cmp(&means[b]),
        };
        by_mean.then_with(|| labels[a].cmp(&labels[b]))
    });
    let cells = order
        .iter()
        .map(|&r| {
            order
                .iter()
                .map(|&c| match grid[r][c] {
                    None => McsCell::SelfPair,
                    Some(b) => McsCell::Pair(b),
                })
                .collect()
        })
        .collect();
    Ok(McsMatrix {
        metric,
        m,
        threshold,
        direction,
        ordering: order.iter().map(|&i| combos[i].clone()).collect(),
        means: order.iter().map(|&i| means[i]).collect(),
        cells,
    })
}

fn title(mx: &McsMatrix) -> String {
    let mut t = format!("MCS plot: {}", mx.metric.name());
    if let Some(m) = mx.m {
        let _ = write!(t, " (m = {m})");
    }
    if let Some(th) = mx.threshold {
        let _ = write!(t, " (threshold = {th})");
    }
    t
}

const CELL: f64 = 28.0;
const CHAR_W: f64 = 7.0;

/// The heatmap as an SVG document. A pure function of the matrix.
pub fn mcs_svg(mx: &McsMatrix) -> String {
    let labels = mx.labels();
    let j = labels.len() as f64;
    let label_w = labels.iter().map(|l| l.chars().count()).max().unwrap_or(0) as f64 * CHAR_W + 12.0;
    let left = label_w + 10.0;
    let top = 50.0 + label_w;
    let legend_w = 190.0;
    let title_text = title(mx);
    let width = (left + j * CELL + 30.0 + legend_w).max(title_text.chars().count() as f64 * 8.5 + 20.0);
    let height = (top + j * CELL + 20.0).max(top + 120.0);

    let mut svg = Svg::new(width, height);
    svg.text(10.0, 26.0, &title_text, 16.0, Anchor::Start);
    for (i, label) in labels.iter().enumerate() {
        let y = top + (i as f64 + 0.5) * CELL + 4.0;
        svg.text(left - 6.0, y, label, 12.0, Anchor::End);
        let x = left + (i as f64 + 0.5) * CELL + 4.0;
        svg.text_rotated(x, top - 6.0, label, 12.0, Anchor::Start, -90.0);
    }
    for (r, row) in mx.cells.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            svg.rect(
                left + c as f64 * CELL,
                top + r as f64 * CELL,
                CELL,
                CELL,
                cell.color(),
                Some("#FFFFFF"),
            );
        }
    }

    let lx = left + j * CELL + 30.0;
    let entries = [
        (McsCell::Pair(Bucket::P01), "p <= 0.01"),
        (McsCell::Pair(Bucket::P05), "0.01 < p <= 0.05"),
        (McsCell::Pair(Bucket::NotSignificant), "p > 0.05"),
        (McsCell::SelfPair, "same combination"),
    ];
    svg.text(lx, top + 12.0, "Tukey adjusted p", 12.0, Anchor::Start);
    for (i, (cell, text)) in entries.iter().enumerate() {
        let y = top + 24.0 + 22.0 * i as f64;
        svg.rect(lx, y, 16.0, 16.0, cell.color(), None);
        svg.text(lx + 22.0, y + 12.0, text, 12.0, Anchor::Start);
    }
    svg.finish()
}

pub fn render_mcs_svg(mx: &McsMatrix, path: &Path) -> Result<()> {
    if mx.is_empty() {
        return Err(Error::Argument("empty MCS matrix".into()));
    }
    std::fs::write(path, mcs_svg(mx)).map_err(|e| Error::io(path, e))
}

/// Writes `mcs_<metric>.csv`: rank, combo, mean, then one bucket column per
/// combo in plot order.
pub fn write_mcs_csv(mx: &McsMatrix, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let labels = mx.labels();
    let mut header = vec!["rank".to_string(), "combo".to_string(), "mean".to_string()];
    header.extend(labels.iter().cloned());
    w.write_record(&header)?;
    for (i, row) in mx.cells.iter().enumerate() {
        let mut rec = vec![(i + 1).to_string(), labels[i].clone(), mx.means[i].to_string()];
        rec.extend(row.iter().map(|c| c.as_str().to_string()));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// File stem for a metric's MCS artifacts.
pub fn mcs_file_stem(metric: Metric) -> String {
    format!("mcs_{}", metric.name())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cmp(a: usize, b: usize, p: f64) -> PairwiseComparison {
        PairwiseComparison {
            combo_a: a,
            combo_b: b,
            mean_a: 0.0,
            mean_b: 0.0,
            diff: 0.0,
            se_diff: 1.0,
            q_stat: 0.0,
            p_adj: p,
            bucket: Bucket::from_p(p),
        }
    }

    fn combos(n: usize) -> Vec<Combo> {
        (0..n).map(|i| Combo::new(format!("S{i}"), "RF")).collect()
    }

    #[test]
    fn uniform_not_significant() {
        let c = vec![cmp(0, 1, 1.0), cmp(0, 2, 1.0), cmp(1, 2, 1.0)];
        let mx = build_mcs(&c, &combos(3), &[1.0, 2.0, 3.0], Metric::Auc, None, None).unwrap();
        for (r, row) in mx.cells.iter().enumerate() {
            for (k, cell) in row.iter().enumerate() {
                if r == k {
                    assert_eq!(*cell, McsCell::SelfPair);
                } else {
                    assert_eq!(*cell, McsCell::Pair(Bucket::NotSignificant));
                }
            }
        }
        assert_eq!(mx.ordering[0].set, "S2");
    }

    #[test]
    fn lower_is_better_orders_ascending() {
        let c = vec![cmp(0, 1, 0.001)];
        let mx = build_mcs(&c, &combos(2), &[0.3, 0.1], Metric::Error, None, Some(0.5)).unwrap();
        assert_eq!(mx.direction, Direction::LowerIsBetter);
        assert_eq!(mx.ordering[0].set, "S1");
    }

    #[test]
    fn ties_break_by_label() {
        let c = vec![cmp(0, 1, 0.5)];
        let cs = vec![Combo::new("B", "RF"), Combo::new("A", "RF")];
        let mx = build_mcs(&c, &cs, &[1.0, 1.0], Metric::Auc, None, None).unwrap();
        assert_eq!(mx.ordering[0].set, "A");
    }

    #[test]
    fn missing_pair_is_an_error() {
        let c = vec![cmp(0, 1, 0.5), cmp(0, 2, 0.5)];
        let err = build_mcs(&c, &combos(3), &[1.0, 2.0, 3.0], Metric::Auc, None, None).unwrap_err();
        assert!(err.to_string().contains("S1-RF vs S2-RF"));
    }

    #[test]
    fn transposed_input_gives_same_matrix() {
        let c = vec![cmp(0, 1, 0.001), cmp(0, 2, 0.03), cmp(1, 2, 0.4)];
        let t: Vec<_> = c
            .iter()
            .map(|x| PairwiseComparison {
                combo_a: x.combo_b,
                combo_b: x.combo_a,
                ..x.clone()
            })
            .collect();
        let means = [1.0, 2.0, 3.0];
        let a = build_mcs(&c, &combos(3), &means, Metric::Auc, None, None).unwrap();
        let b = build_mcs(&t, &combos(3), &means, Metric::Auc, None, None).unwrap();
        assert_eq!(mcs_svg(&a), mcs_svg(&b));
    }

    #[test]
    fn two_by_two_svg_counts() {
        let mx = build_mcs(&[cmp(0, 1, 0.2)], &combos(2), &[1.0, 2.0], Metric::Auc, None, None).unwrap();
        let svg = mcs_svg(&mx);
        // background + 4 cells + 4 legend swatches
        assert_eq!(svg.matches("<rect").count(), 9);
        assert_eq!(svg.matches(">S0-RF</text>").count(), 2);
        assert_eq!(svg.matches(">S1-RF</text>").count(), 2);
    }
}
