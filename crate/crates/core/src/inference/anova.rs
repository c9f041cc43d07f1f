//! Additive two-factor ANOVA with split as a block, one observation per
//! (split, combo) cell:
//!
//! ```text
//! y_ij = mu + alpha_i + beta_j + e_ij
//! ```
//!
//! With `I` splits and `J` combos, the split-by-combo interaction is the
//! error term, giving `(I-1)(J-1)` error degrees of freedom.

use std::fmt::Write as _;

use crate::measures::{Combo, MeasureTable, Metric};
use crate::special::f_sf;
use crate::{Error, Result};

/// A tested source: split, combo, or the whole model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectRow {
    pub df: usize,
    pub ss: f64,
    pub ms: f64,
    pub f: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow {
    pub df: usize,
    pub ss: f64,
    pub ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TotalRow {
    pub df: usize,
    pub ss: f64,
}

/// The Model/Error/Total block and its summary statistics, derived from
/// the model and error sums of squares alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverallFit {
    pub model: EffectRow,
    pub error: ErrorRow,
    pub total: TotalRow,
    pub r_square: f64,
    pub coef_var: f64,
    pub root_mse: f64,
    pub mean: f64,
}

impl OverallFit {
    pub fn derive(model_ss: f64, model_df: usize, error_ss: f64, error_df: usize, mean: f64) -> Result<Self> {
        if model_df == 0 || error_df == 0 {
            return Err(Error::Argument("degrees of freedom must be positive".into()));
        }
        let error_ms = error_ss / error_df as f64;
        if !(error_ms > 0.0) {
            return Err(Error::DegenerateVariance(format!(
                "error mean square is {error_ms}; the measure does not vary within the design"
            )));
        }
        let model = effect(model_df, model_ss, error_ms, error_df)?;
        let total_ss = model_ss + error_ss;
        let root_mse = error_ms.sqrt();
        Ok(Self {
            model,
            error: ErrorRow {
                df: error_df,
                ss: error_ss,
                ms: error_ms,
            },
            total: TotalRow {
                df: model_df + error_df,
                ss: total_ss,
            },
            r_square: model_ss / total_ss,
            coef_var: 100.0 * root_mse / mean,
            root_mse,
            mean,
        })
    }
}

fn effect(df: usize, ss: f64, error_ms: f64, error_df: usize) -> Result<EffectRow> {
    let ms = ss / df as f64;
    let f = ms / error_ms;
    Ok(EffectRow {
        df,
        ss,
        ms,
        f,
        p: f_sf(f, df as f64, error_df as f64)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnovaTable {
    metric: Metric,
    overall: OverallFit,
    split: EffectRow,
    combo: EffectRow,
    combos: Vec<Combo>,
    grand_mean: f64,
    split_effects: Vec<f64>,
    combo_effects: Vec<f64>,
    residuals: Vec<f64>,
}

impl AnovaTable {
    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn overall(&self) -> &OverallFit {
        &self.overall
    }

    pub fn model(&self) -> &EffectRow {
        &self.overall.model
    }

    pub fn error(&self) -> &ErrorRow {
        &self.overall.error
    }

    pub fn total(&self) -> &TotalRow {
        &self.overall.total
    }

    pub fn split_row(&self) -> &EffectRow {
        &self.split
    }

    pub fn combo_row(&self) -> &EffectRow {
        &self.combo
    }

    pub fn nsplits(&self) -> usize {
        self.split_effects.len()
    }

    pub fn ncombos(&self) -> usize {
        self.combo_effects.len()
    }

    pub fn combos(&self) -> &[Combo] {
        &self.combos
    }

    /// mu
    pub fn grand_mean(&self) -> f64 {
        self.grand_mean
    }

    /// alpha_i
    pub fn split_effects(&self) -> &[f64] {
        &self.split_effects
    }

    /// beta_j
    pub fn combo_effects(&self) -> &[f64] {
        &self.combo_effects
    }

    /// Per-combo means, `mu + beta_j`.
    pub fn combo_means(&self) -> Vec<f64> {
        self.combo_effects.iter().map(|b| self.grand_mean + b).collect()
    }

    /// e_ij, row-major by split.
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    /// Renders the table in the classic fixed-width layout.
    pub fn render_text(&self) -> String {
        let o = &self.overall;
        let mut s = String::new();
        let _ = writeln!(s, "   Analysis of Variance on: '{}'", self.metric.name());
        let _ = writeln!(s, " Using factors: Split and Descriptor/Method combination");
        let _ = writeln!(
            s,
            "{:<6}{:>6}{:>10}{:>10}{:>10}{:>10}   ",
            "Source", "DF", "SS", "MS", "F", "p-value"
        );
        let _ = writeln!(
            s,
            "{:<6}{:>6}{:>10.4}{:>10.4}{:>10.4}{:>10}   ",
            "Model",
            o.model.df,
            o.model.ss,
            o.model.ms,
            o.model.f,
            format_p(o.model.p)
        );
        let _ = writeln!(s, "{:<6}{:>6}{:>10.4}{:>10.4}   ", "Error", o.error.df, o.error.ss, o.error.ms);
        let _ = writeln!(s, "{:<6}{:>6}{:>10.4}   ", "Total", o.total.df, o.total.ss);
        let _ = writeln!(
            s,
            "{:>14}{:>11}{:>11}{:>11}   ",
            "R-Square", "Coef Var", "Root MSE", "Mean"
        );
        let _ = writeln!(
            s,
            "{:>14.4}{:>11.4}{:>11.4}{:>11.4}   ",
            o.r_square, o.coef_var, o.root_mse, o.mean
        );
        let _ = writeln!(
            s,
            "{:<9}{:>6}{:>9}{:>9}{:>9}{:>10}   ",
            "Source", "DF", "SS", "MS", "F", "p-value"
        );
        for (name, row) in [("Split", &self.split), ("Desc/Meth", &self.combo)] {
            let _ = writeln!(
                s,
                "{:<9}{:>6}{:>9.3}{:>9.3}{:>9.3}{:>10}   ",
                name,
                row.df,
                row.ss,
                row.ms,
                row.f,
                format_p(row.p)
            );
        }
        s
    }
}

/// `<.0001` below 1e-4, otherwise four decimals.
pub fn format_p(p: f64) -> String {
    if p < 1e-4 {
        "<.0001".to_string()
    } else {
        format!("{p:.4}")
    }
}

/// Fits the blocked two-factor model to a complete measure table.
pub fn anova_blocked(table: &MeasureTable) -> Result<AnovaTable> {
    let i_n = table.nsplits();
    let j_n = table.ncombos();
    if i_n < 2 || j_n < 2 {
        return Err(Error::Argument(format!(
            "blocked ANOVA needs at least 2 splits and 2 combos, got {i_n} x {j_n}"
        )));
    }
    let total_n = (i_n * j_n) as f64;
    let grand = table.values().iter().sum::<f64>() / total_n;
    let split_means = table.split_means();
    let combo_means = table.combo_means();
    let split_effects: Vec<f64> = split_means.iter().map(|m| m - grand).collect();
    let combo_effects: Vec<f64> = combo_means.iter().map(|m| m - grand).collect();

    let ss_split = j_n as f64 * split_effects.iter().map(|a| a * a).sum::<f64>();
    let ss_combo = i_n as f64 * combo_effects.iter().map(|b| b * b).sum::<f64>();
    let mut residuals = Vec::with_capacity(i_n * j_n);
    for (s, alpha) in split_effects.iter().enumerate() {
        for (c, beta) in combo_effects.iter().enumerate() {
            residuals.push(table.value(s, c) - grand - alpha - beta);
        }
    }
    // Equal to SS_total - SS_split - SS_combo; summing squared residuals
    // avoids the cancellation of the subtraction.
    let ss_error: f64 = residuals.iter().map(|e| e * e).sum();

    let split_df = i_n - 1;
    let combo_df = j_n - 1;
    let error_df = split_df * combo_df;
    let overall = OverallFit::derive(ss_split + ss_combo, split_df + combo_df, ss_error, error_df, grand)?;
    let error_ms = overall.error.ms;
    Ok(AnovaTable {
        metric: table.metric(),
        split: effect(split_df, ss_split, error_ms, error_df)?,
        combo: effect(combo_df, ss_combo, error_ms, error_df)?,
        overall,
        combos: table.combos().to_vec(),
        grand_mean: grand,
        split_effects,
        combo_effects,
        residuals,
    })
}
