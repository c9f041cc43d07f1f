//! Blocked ANOVA and Tukey-Kramer all-pairs comparisons.

pub mod anova;
pub mod ptukey;
pub mod tukey;

pub use anova::{anova_blocked, AnovaTable, EffectRow, ErrorRow, OverallFit, TotalRow};
pub use ptukey::{studentized_range_cdf, studentized_range_sf};
pub use tukey::{read_pairwise_csv, tukey_kramer, write_pairwise_csv, Bucket, PairwiseComparison};
