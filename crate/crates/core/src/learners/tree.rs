use crate::matrix::Matrix;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Features tried per split; `None` tries all of them.
    pub mtry: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// CART regression tree grown greedily on squared-error impurity.
///
/// Each split maximizes the reduction in within-node sum of squares over
/// thresholds placed midway between consecutive distinct values; rows with
/// `x <= threshold` go left. Growth stops at `max_depth`, when a node is
/// pure, or when no split leaves `min_leaf` rows on both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTree {
    nodes: Vec<Node>,
}

struct Grower<'a> {
    x: &'a Matrix,
    y: &'a [f64],
    params: &'a TreeParams,
    rng: Option<&'a mut SplitMix64>,
    nodes: Vec<Node>,
    buf: Vec<(f64, f64)>,
}

impl RegressionTree {
    /// Grows a tree on `rows` of `x` (duplicates allowed, as in bootstrap
    /// samples). `rng` drives per-split feature subsampling when
    /// `params.mtry` is below the feature count.
    pub fn fit(
        x: &Matrix,
        y: &[f64],
        rows: &[usize],
        params: &TreeParams,
        rng: Option<&mut SplitMix64>,
    ) -> Self {
        let mut g = Grower {
            x,
            y,
            params,
            rng,
            nodes: Vec::new(),
            buf: Vec::with_capacity(rows.len()),
        };
        if rows.is_empty() {
            return Self {
                nodes: vec![Node::Leaf(0.0)],
            };
        }
        g.grow(rows.to_vec(), 0);
        Self { nodes: g.nodes }
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf(v) => return *v,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn predict(&self, x: &Matrix) -> Vec<f64> {
        x.rows().map(|r| self.predict_row(r)).collect()
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf(_))).count()
    }

    /// `(feature, threshold)` of every internal node, in build order.
    pub fn splits(&self) -> Vec<(usize, f64)> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Split {
                    feature, threshold, ..
                } => Some((*feature, *threshold)),
                Node::Leaf(_) => None,
            })
            .collect()
    }
}

impl Grower<'_> {
    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf(0.0));
        let n = rows.len() as f64;
        let sum: f64 = rows.iter().map(|&r| self.y[r]).sum();
        let mean = sum / n;
        let sse: f64 = rows.iter().map(|&r| (self.y[r] - mean).powi(2)).sum();

        let min_leaf = self.params.min_leaf.max(1);
        if depth >= self.params.max_depth || rows.len() < 2 * min_leaf || sse <= 0.0 {
            self.nodes[id] = Node::Leaf(mean);
            return id;
        }
        let Some((feature, threshold)) = self.best_split(&rows, sum, sse, min_leaf) else {
            self.nodes[id] = Node::Leaf(mean);
            return id;
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&r| self.x.get(r, feature) <= threshold);
        let left = self.grow(left_rows, depth + 1);
        let right = self.grow(right_rows, depth + 1);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let p = self.x.ncols();
        match (self.params.mtry, self.rng.as_deref_mut()) {
            (Some(m), Some(rng)) if m < p => {
                let mut idx: Vec<usize> = (0..p).collect();
                for i in 0..m {
                    let j = i + rng.index(p - i);
                    idx.swap(i, j);
                }
                idx.truncate(m);
                idx.sort_unstable();
                idx
            }
            _ => (0..p).collect(),
        }
    }

    fn best_split(&mut self, rows: &[usize], sum: f64, sse: f64, min_leaf: usize) -> Option<(usize, f64)> {
        let n = rows.len();
        let parent_score = sum * sum / n as f64;
        let mut best: Option<(f64, usize, f64)> = None;
        for feature in self.candidate_features() {
            self.buf.clear();
            self.buf
                .extend(rows.iter().map(|&r| (self.x.get(r, feature), self.y[r])));
            self.buf.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            let mut left_sum = 0.0;
            for i in 0..n - 1 {
                left_sum += self.buf[i].1;
                let nl = i + 1;
                if nl < min_leaf {
                    continue;
                }
                if n - nl < min_leaf {
                    break;
                }
                let (a, b) = (self.buf[i].0, self.buf[i + 1].0);
                if a == b {
                    continue;
                }
                let right_sum = sum - left_sum;
                let score = left_sum * left_sum / nl as f64 + right_sum * right_sum / (n - nl) as f64;
                if best.is_none_or(|(s, _, _)| score > s) {
                    let mut threshold = a + (b - a) / 2.0;
                    if threshold >= b {
                        threshold = a;
                    }
                    best = Some((score, feature, threshold));
                }
            }
        }
        let (score, feature, threshold) = best?;
        (score - parent_score > sse * 1e-12).then_some((feature, threshold))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full(max_depth: usize, min_leaf: usize) -> TreeParams {
        TreeParams {
            max_depth,
            min_leaf,
            mtry: None,
        }
    }

    #[test]
    fn step_function_single_split() {
        let xs: Vec<f64> = (-10..10).map(|i| i as f64 / 10.0 + 0.05).collect();
        let y: Vec<f64> = xs.iter().map(|&v| f64::from(v > 0.0)).collect();
        let x = Matrix::from_rows(&xs.iter().map(|&v| vec![v]).collect::<Vec<_>>());
        let rows: Vec<usize> = (0..xs.len()).collect();
        let tree = RegressionTree::fit(&x, &y, &rows, &full(30, 1), None);
        assert_eq!(tree.predict(&x), y);
        let splits = tree.splits();
        assert_eq!(splits.len(), 1);
        assert!(splits[0].1.abs() < 0.1, "{splits:?}");
    }

    #[test]
    fn min_leaf_and_depth_respected() {
        let x = Matrix::from_rows(&(0..40).map(|i| vec![i as f64]).collect::<Vec<_>>());
        let y: Vec<f64> = (0..40).map(|i| ((i * 7) % 11) as f64).collect();
        let rows: Vec<usize> = (0..40).collect();
        let stump = RegressionTree::fit(&x, &y, &rows, &full(1, 1), None);
        assert_eq!(stump.n_leaves(), 2);
        let coarse = RegressionTree::fit(&x, &y, &rows, &full(30, 10), None);
        assert!(coarse.n_leaves() <= 4);
    }

    #[test]
    fn constant_response_is_a_leaf() {
        let x = Matrix::from_rows(&[vec![1.0], vec![2.0], vec![3.0]]);
        let tree = RegressionTree::fit(&x, &[4.0; 3], &[0, 1, 2], &full(30, 1), None);
        assert_eq!(tree.n_leaves(), 1);
        assert_eq!(tree.predict_row(&[100.0]), 4.0);
    }
}
