//! CART regression trees: axis-aligned splits chosen by the largest
//! reduction in squared error, thresholds at midpoints between consecutive
//! distinct values.

use rand::seq::SliceRandom;
use rand::Rng;

use super::dataset::Matrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or too small to split.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// Features examined per split before falling back to the rest.
    pub max_features: usize,
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

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTree {
    nodes: Vec<Node>,
}

impl RegressionTree {
    pub fn fit<R: Rng>(x: &Matrix, y: &[f64], rows: Vec<usize>, params: &TreeParams, rng: &mut R) -> Self {
        assert!(!rows.is_empty(), "tree needs at least one row");
        let mut tree = Self { nodes: Vec::new() };
        tree.grow(x, y, rows, 0, params, rng);
        tree
    }

    fn grow<R: Rng>(&mut self, x: &Matrix, y: &[f64], rows: Vec<usize>, depth: usize, params: &TreeParams, rng: &mut R) -> usize {
        let id = self.nodes.len();
        let mean = rows.iter().map(|&i| y[i]).sum::<f64>() / rows.len() as f64;
        self.nodes.push(Node::Leaf(mean));

        let pure = rows.iter().all(|&i| y[i] == y[rows[0]]);
        let depth_reached = params.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_reached || rows.len() < 2 * params.min_leaf.max(1) {
            return id;
        }
        let Some((feature, threshold)) = best_split(x, y, &rows, params, rng) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| x.get(i, feature) <= threshold);
        let left = self.grow(x, y, l, depth + 1, params, rng);
        let right = self.grow(x, y, r, depth + 1, params, rng);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut node = 0;
        loop {
            match self.nodes[node] {
                Node::Leaf(v) => return v,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if row[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

fn best_split<R: Rng>(x: &Matrix, y: &[f64], rows: &[usize], params: &TreeParams, rng: &mut R) -> Option<(usize, f64)> {
    let mut features: Vec<usize> = (0..x.cols()).collect();
    features.shuffle(rng);
    let mtry = params.max_features.clamp(1, x.cols());
    let min_leaf = params.min_leaf.max(1);

    let mut best: Option<(f64, usize, f64)> = None;
    let mut order: Vec<usize> = rows.to_vec();
    for (n_seen, &f) in features.iter().enumerate() {
        if n_seen >= mtry && best.is_some() {
            break;
        }
        order.sort_by(|&a, &b| x.get(a, f).total_cmp(&x.get(b, f)).then(a.cmp(&b)));
        let total: f64 = order.iter().map(|&i| y[i]).sum();
        let n = order.len();
        let mut left_sum = 0.0;
        for split in 1..n {
            left_sum += y[order[split - 1]];
            if split < min_leaf || n - split < min_leaf {
                continue;
            }
            let lo = x.get(order[split - 1], f);
            let hi = x.get(order[split], f);
            if lo >= hi {
                continue;
            }
            // maximizing this is equivalent to minimizing the children's SSE
            let right_sum = total - left_sum;
            let score = left_sum * left_sum / split as f64 + right_sum * right_sum / (n - split) as f64;
            if best.is_none_or(|(s, _, _)| score > s) {
                let mid = lo + (hi - lo) / 2.0;
                let threshold = if mid < hi { mid } else { lo };
                best = Some((score, f, threshold));
            }
        }
    }
    best.map(|(_, f, t)| (f, t))
}
