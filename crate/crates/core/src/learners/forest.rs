use super::tree::{RegressionTree, TreeParams};
use crate::matrix::Matrix;
use crate::rng::{mix64, SplitMix64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resample {
    /// `n` draws with replacement per tree.
    Bootstrap,
    /// Every tree sees the training rows unchanged. Test hook: with one tree
    /// and `mtry` equal to the feature count the forest reduces to a single
    /// [`RegressionTree`].
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForestParams {
    pub n_trees: usize,
    pub mtry: usize,
    pub min_leaf: usize,
    pub max_depth: usize,
    pub resample: Resample,
}

/// Bagged regression trees with per-split feature subsampling.
#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    trees: Vec<RegressionTree>,
}

impl Forest {
    pub fn predict(&self, x: &Matrix) -> Vec<f64> {
        let k = self.trees.len() as f64;
        x.rows()
            .map(|r| self.trees.iter().map(|t| t.predict_row(r)).sum::<f64>() / k)
            .collect()
    }

    pub fn trees(&self) -> &[RegressionTree] {
        &self.trees
    }
}

/// Tree `t` draws from its own SplitMix64 stream seeded with
/// `mix64(task_seed ^ mix64(t + 1))`.
pub fn fit_forest(x: &Matrix, y: &[f64], params: &ForestParams, task_seed: u64) -> Forest {
    let n = x.nrows();
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_leaf: params.min_leaf,
        mtry: Some(params.mtry.clamp(1, x.ncols().max(1))),
    };
    let trees = (0..params.n_trees.max(1))
        .map(|t| {
            let mut rng = SplitMix64::new(mix64(task_seed ^ mix64(t as u64 + 1)));
            let rows: Vec<usize> = match params.resample {
                Resample::Bootstrap => (0..n).map(|_| rng.index(n)).collect(),
                Resample::Identity => (0..n).collect(),
            };
            RegressionTree::fit(x, y, &rows, &tree_params, Some(&mut rng))
        })
        .collect();
    Forest { trees }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> (Matrix, Vec<f64>) {
        let mut rng = SplitMix64::new(42);
        let rows: Vec<Vec<f64>> = (0..80)
            .map(|_| (0..4).map(|_| rng.below(10_000) as f64 / 1000.0).collect())
            .collect();
        let y = rows.iter().map(|r| r[0] * 2.0 - r[2] + (r[1] > 5.0) as u8 as f64).collect();
        (Matrix::from_rows(&rows), y)
    }

    #[test]
    fn single_identity_tree_equals_tree() {
        let (x, y) = data();
        let forest = fit_forest(
            &x,
            &y,
            &ForestParams {
                n_trees: 1,
                mtry: 4,
                min_leaf: 3,
                max_depth: 30,
                resample: Resample::Identity,
            },
            987,
        );
        let rows: Vec<usize> = (0..x.nrows()).collect();
        let tree = RegressionTree::fit(
            &x,
            &y,
            &rows,
            &TreeParams {
                max_depth: 30,
                min_leaf: 3,
                mtry: None,
            },
            None,
        );
        assert_eq!(forest.trees()[0], tree);
        assert_eq!(forest.predict(&x), tree.predict(&x));
    }

    #[test]
    fn seeded_and_deterministic() {
        let (x, y) = data();
        let params = ForestParams {
            n_trees: 10,
            mtry: 2,
            min_leaf: 2,
            max_depth: 30,
            resample: Resample::Bootstrap,
        };
        let a = fit_forest(&x, &y, &params, 1).predict(&x);
        assert_eq!(a, fit_forest(&x, &y, &params, 1).predict(&x));
        assert_ne!(a, fit_forest(&x, &y, &params, 2).predict(&x));
    }
}
