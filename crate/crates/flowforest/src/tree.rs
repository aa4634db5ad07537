//! CART-style decision trees: greedy Gini splits, three split modes, and
//! minimal cost-complexity pruning.
//!
//! Trees store the training class distribution and impurity of every node,
//! so leaves emit probability vectors and pruning can be run after the
//! fact without the training data.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, RandomSeed};
use crate::error::{Error, Result};

/// How split candidates are generated at each node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitMode {
    /// Every feature, every boundary threshold.
    Exhaustive,
    /// Best split within a random feature subset, the random-forest rule.
    RandomSubspace,
    /// One random feature, one uniform-random threshold. Labels play no
    /// part in the choice, which is what makes these trees "completely
    /// random".
    FullyRandom,
}

/// Hyperparameters for a single tree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub ccp_alpha: f64,
    pub split_mode: SplitMode,
    /// Candidate features per split in random-subspace mode.
    /// `None` means ceil(sqrt(d)).
    pub features_per_split: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> TreeParams {
        TreeParams {
            max_depth: None,
            min_samples_split: 2,
            ccp_alpha: 0.0,
            split_mode: SplitMode::Exhaustive,
            features_per_split: None,
        }
    }
}

impl TreeParams {
    pub fn validate(&self) -> Result<()> {
        if self.min_samples_split < 2 {
            return Err(Error::InvalidParameter {
                what: "min_samples_split",
                requirement: "at least 2",
                got: self.min_samples_split.to_string(),
            });
        }
        if !(self.ccp_alpha >= 0.0) {
            return Err(Error::InvalidParameter {
                what: "ccp_alpha",
                requirement: "non-negative",
                got: self.ccp_alpha.to_string(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub left: usize,
    pub right: usize,
}

/// One arena slot. Internal nodes carry a [`Split`]; every node keeps its
/// training statistics for pruning and importance computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub n: usize,
    pub impurity: f64,
    pub probs: [f64; 2],
    pub split: Option<Split>,
}

/// A fitted tree. Node 0 is the root; rows route left when
/// `row[feature] < threshold`, right otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
    pub n_features: usize,
}

fn gini(counts: [usize; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p0 = counts[0] as f64 / n;
    let p1 = counts[1] as f64 / n;
    1.0 - p0 * p0 - p1 * p1
}

fn count_labels(ds: &Dataset, indices: &[usize]) -> [usize; 2] {
    let mut counts = [0usize; 2];
    for &i in indices {
        counts[ds.label(i).code()] += 1;
    }
    counts
}

/// Splits below this Gini gain are treated as no improvement.
const GAIN_EPS: f64 = 1e-12;

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
}

/// Best boundary threshold for one feature, by Gini gain. Boundaries sit
/// at midpoints between consecutive distinct values; the midpoint is
/// nudged up to the larger value if rounding collapsed it onto the
/// smaller one, preserving the scanned partition under strict less-than.
fn best_threshold_for_feature(
    ds: &Dataset,
    indices: &[usize],
    feature: usize,
    parent_gini: f64,
) -> Option<(f64, f64)> {
    let n = indices.len();
    let mut vals: Vec<(f64, usize)> = indices
        .iter()
        .map(|&i| (ds.row(i)[feature], ds.label(i).code()))
        .collect();
    vals.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut total = [0usize; 2];
    for &(_, c) in &vals {
        total[c] += 1;
    }
    let mut left = [0usize; 2];
    let mut best: Option<(f64, f64)> = None;
    for w in 0..n - 1 {
        left[vals[w].1] += 1;
        let (a, b) = (vals[w].0, vals[w + 1].0);
        if a == b {
            continue;
        }
        let right = [total[0] - left[0], total[1] - left[1]];
        let nl = (w + 1) as f64;
        let nr = (n - w - 1) as f64;
        let gain = parent_gini - (nl * gini(left) + nr * gini(right)) / n as f64;
        if gain > best.map_or(GAIN_EPS, |(_, g)| g) {
            let mut threshold = (a + b) / 2.0;
            if threshold <= a {
                threshold = b;
            }
            best = Some((threshold, gain));
        }
    }
    best
}

fn choose_split(
    ds: &Dataset,
    indices: &[usize],
    params: &TreeParams,
    parent_gini: f64,
    rng: &mut ChaCha8Rng,
) -> Option<(usize, f64)> {
    let d = ds.n_features();
    match params.split_mode {
        SplitMode::Exhaustive => {
            let mut best: Option<BestSplit> = None;
            for feature in 0..d {
                if let Some((threshold, gain)) =
                    best_threshold_for_feature(ds, indices, feature, parent_gini)
                {
                    if best.as_ref().map_or(true, |b| gain > b.gain) {
                        best = Some(BestSplit {
                            feature,
                            threshold,
                            gain,
                        });
                    }
                }
            }
            best.map(|b| (b.feature, b.threshold))
        }
        SplitMode::RandomSubspace => {
            let k = params
                .features_per_split
                .unwrap_or_else(|| (d as f64).sqrt().ceil() as usize)
                .clamp(1, d);
            let mut candidates = rand::seq::index::sample(rng, d, k).into_vec();
            candidates.sort_unstable();
            let mut best: Option<BestSplit> = None;
            for feature in candidates {
                if let Some((threshold, gain)) =
                    best_threshold_for_feature(ds, indices, feature, parent_gini)
                {
                    if best.as_ref().map_or(true, |b| gain > b.gain) {
                        best = Some(BestSplit {
                            feature,
                            threshold,
                            gain,
                        });
                    }
                }
            }
            best.map(|b| (b.feature, b.threshold))
        }
        SplitMode::FullyRandom => {
            // Feature and threshold are drawn without looking at labels,
            // so any split with two non-empty children is accepted.
            let mut features: Vec<usize> = (0..d).collect();
            features.shuffle(rng);
            for feature in features {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for &i in indices {
                    let v = ds.row(i)[feature];
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                if hi > lo {
                    let threshold = loop {
                        let t = rng.gen_range(lo..hi);
                        if t > lo {
                            break t;
                        }
                    };
                    return Some((feature, threshold));
                }
            }
            None
        }
    }
}

struct WorkItem {
    indices: Vec<usize>,
    depth: usize,
    // arena slot of the parent and which child pointer to patch
    parent: Option<(usize, bool)>,
}

impl DecisionTree {
    /// Grow a tree by greedy Gini splitting. Growth stops at `max_depth`,
    /// below `min_samples_split`, on pure nodes, and when no candidate
    /// split helps. `ccp_alpha` is not applied here; call
    /// [`DecisionTree::ccp_prune`] for that.
    pub fn fit(ds: &Dataset, params: &TreeParams, seed: RandomSeed) -> Result<DecisionTree> {
        params.validate()?;
        if ds.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut rng = seed.rng();
        let mut nodes: Vec<Node> = Vec::new();
        // Explicit worklist, right child pushed first so the arena comes
        // out in preorder. Recursion would risk the stack on degenerate
        // fully-random trees.
        let mut work = vec![WorkItem {
            indices: (0..ds.n_rows()).collect(),
            depth: 0,
            parent: None,
        }];
        while let Some(item) = work.pop() {
            let counts = count_labels(ds, &item.indices);
            let n = item.indices.len();
            let impurity = gini(counts);
            let id = nodes.len();
            nodes.push(Node {
                n,
                impurity,
                probs: [counts[0] as f64 / n as f64, counts[1] as f64 / n as f64],
                split: None,
            });
            if let Some((parent, is_left)) = item.parent {
                let split = nodes[parent].split.as_mut().expect("parent is internal");
                if is_left {
                    split.left = id;
                } else {
                    split.right = id;
                }
            }

            let depth_ok = params.max_depth.map_or(true, |d| item.depth < d);
            if !depth_ok || n < params.min_samples_split || impurity == 0.0 {
                continue;
            }
            let Some((feature, threshold)) =
                choose_split(ds, &item.indices, params, impurity, &mut rng)
            else {
                continue;
            };
            let (left, right): (Vec<usize>, Vec<usize>) = item
                .indices
                .iter()
                .partition(|&&i| ds.row(i)[feature] < threshold);
            if left.is_empty() || right.is_empty() {
                continue;
            }
            // Child ids get patched when the children are popped.
            nodes[id].split = Some(Split {
                feature,
                threshold,
                left: usize::MAX,
                right: usize::MAX,
            });
            work.push(WorkItem {
                indices: right,
                depth: item.depth + 1,
                parent: Some((id, false)),
            });
            work.push(WorkItem {
                indices: left,
                depth: item.depth + 1,
                parent: Some((id, true)),
            });
        }
        Ok(DecisionTree {
            nodes,
            n_features: ds.n_features(),
        })
    }

    /// Class-probability vector for one row.
    pub fn predict_proba_row(&self, row: &[f64]) -> Result<[f64; 2]> {
        if row.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                got: row.len(),
            });
        }
        let mut id = 0;
        while let Some(split) = self.nodes[id].split {
            id = if row[split.feature] < split.threshold {
                split.left
            } else {
                split.right
            };
        }
        Ok(self.nodes[id].probs)
    }

    pub fn depth(&self) -> usize {
        let mut max = 0;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((id, depth)) = stack.pop() {
            max = max.max(depth);
            if let Some(split) = self.nodes[id].split {
                stack.push((split.left, depth + 1));
                stack.push((split.right, depth + 1));
            }
        }
        max
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| n.split.is_none()).count()
    }

    /// Leaf indices under `id`, honoring `as_leaf` overrides.
    fn leaves_under(&self, id: usize, as_leaf: &[bool]) -> Vec<usize> {
        let mut leaves = Vec::new();
        let mut stack = vec![id];
        while let Some(t) = stack.pop() {
            match self.nodes[t].split {
                Some(split) if !as_leaf[t] => {
                    stack.push(split.left);
                    stack.push(split.right);
                }
                _ => leaves.push(t),
            }
        }
        leaves
    }

    /// Training risk of node `t` if collapsed to a leaf: impurity weighted
    /// by its share of training rows.
    fn node_risk(&self, t: usize) -> f64 {
        self.nodes[t].impurity * self.nodes[t].n as f64 / self.nodes[0].n as f64
    }

    /// Rebuild a compact preorder arena, treating flagged nodes as leaves.
    pub(crate) fn pruned_copy(&self, as_leaf: &[bool]) -> DecisionTree {
        let mut nodes = Vec::new();
        // (old id, parent patch) worklist, preorder as in fit
        let mut work: Vec<(usize, Option<(usize, bool)>)> = vec![(0, None)];
        while let Some((old, parent)) = work.pop() {
            let id = nodes.len();
            let mut node = self.nodes[old];
            if as_leaf[old] {
                node.split = None;
            }
            nodes.push(node);
            if let Some((p, is_left)) = parent {
                let split = nodes[p].split.as_mut().expect("parent is internal");
                if is_left {
                    split.left = id;
                } else {
                    split.right = id;
                }
            }
            if let Some(split) = self.nodes[old].split {
                if !as_leaf[old] {
                    work.push((split.right, Some((id, false))));
                    work.push((split.left, Some((id, true))));
                }
            }
        }
        DecisionTree {
            nodes,
            n_features: self.n_features,
        }
    }

    /// Minimal cost-complexity pruning: repeatedly collapse the internal
    /// node(s) with the smallest effective alpha
    /// g(t) = (R(t) - R(subtree_t)) / (leaves_t - 1) while that minimum
    /// stays at or below `alpha`.
    pub fn ccp_prune(&self, alpha: f64) -> DecisionTree {
        let mut as_leaf = vec![false; self.nodes.len()];
        loop {
            let mut min_g = f64::INFINITY;
            let mut internal = Vec::new();
            let mut stack = vec![0usize];
            while let Some(t) = stack.pop() {
                if let Some(split) = self.nodes[t].split {
                    if !as_leaf[t] {
                        let leaves = self.leaves_under(t, &as_leaf);
                        let subtree_risk: f64 = leaves.iter().map(|&u| self.node_risk(u)).sum();
                        let g = (self.node_risk(t) - subtree_risk) / (leaves.len() - 1) as f64;
                        internal.push((t, g));
                        min_g = min_g.min(g);
                        stack.push(split.left);
                        stack.push(split.right);
                    }
                }
            }
            if internal.is_empty() || min_g > alpha {
                break;
            }
            for (t, g) in internal {
                if g == min_g {
                    as_leaf[t] = true;
                }
            }
        }
        self.pruned_copy(&as_leaf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{ClassLabel, Dataset};

    fn ds(rows: Vec<Vec<f64>>, labels: Vec<usize>) -> Dataset {
        let labels = labels
            .into_iter()
            .map(|c| ClassLabel::from_code(c).unwrap())
            .collect();
        Dataset::from_rows_unnamed(rows, labels).unwrap()
    }

    #[test]
    fn pure_data_gives_single_leaf() {
        let d = ds(vec![vec![1.0], vec![2.0], vec![3.0]], vec![1, 1, 1]);
        let t = DecisionTree::fit(&d, &TreeParams::default(), RandomSeed(0)).unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.predict_proba_row(&[9.0]).unwrap(), [0.0, 1.0]);
    }

    #[test]
    fn one_split_separates_sign() {
        let d = ds(
            vec![vec![-2.0], vec![-1.0], vec![1.0], vec![2.0]],
            vec![0, 0, 1, 1],
        );
        let t = DecisionTree::fit(&d, &TreeParams::default(), RandomSeed(0)).unwrap();
        assert_eq!(t.depth(), 1);
        assert_eq!(t.nodes.len(), 3);
        for i in 0..4 {
            assert_eq!(
                t.predict_proba_row(d.row(i)).unwrap(),
                [1.0 - d.label(i).code() as f64, d.label(i).code() as f64]
            );
        }
    }

    #[test]
    fn max_depth_zero_gives_prior_leaf() {
        let d = ds(
            vec![vec![-1.0], vec![1.0], vec![2.0], vec![3.0]],
            vec![0, 1, 1, 1],
        );
        let params = TreeParams {
            max_depth: Some(0),
            ..TreeParams::default()
        };
        let t = DecisionTree::fit(&d, &params, RandomSeed(0)).unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.predict_proba_row(&[0.0]).unwrap(), [0.25, 0.75]);
    }

    #[test]
    fn threshold_is_midpoint_and_strictly_less_than() {
        let d = ds(vec![vec![1.0], vec![3.0]], vec![0, 1]);
        let t = DecisionTree::fit(&d, &TreeParams::default(), RandomSeed(0)).unwrap();
        let split = t.nodes[0].split.unwrap();
        assert_eq!(split.threshold, 2.0);
        // exactly at the threshold routes right
        assert_eq!(t.predict_proba_row(&[2.0]).unwrap(), [0.0, 1.0]);
        assert_eq!(t.predict_proba_row(&[1.999]).unwrap(), [1.0, 0.0]);
    }

    #[test]
    fn min_samples_split_stops_growth() {
        let d = ds(
            vec![vec![-2.0], vec![-1.0], vec![1.0], vec![2.0]],
            vec![0, 0, 1, 1],
        );
        let params = TreeParams {
            min_samples_split: 5,
            ..TreeParams::default()
        };
        let t = DecisionTree::fit(&d, &params, RandomSeed(0)).unwrap();
        assert_eq!(t.nodes.len(), 1);
    }

    #[test]
    fn empty_dataset_errors() {
        let d = Dataset::from_rows_unnamed(vec![], vec![]).unwrap();
        assert!(matches!(
            DecisionTree::fit(&d, &TreeParams::default(), RandomSeed(0)),
            Err(Error::EmptyDataset)
        ));
    }

    #[test]
    fn useless_features_leave_a_leaf() {
        // same feature value, mixed labels: no split possible
        let d = ds(vec![vec![1.0], vec![1.0]], vec![0, 1]);
        let t = DecisionTree::fit(&d, &TreeParams::default(), RandomSeed(0)).unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.predict_proba_row(&[1.0]).unwrap(), [0.5, 0.5]);
    }

    #[test]
    fn wrong_width_row_errors() {
        let d = ds(vec![vec![1.0, 2.0]], vec![0]);
        let t = DecisionTree::fit(&d, &TreeParams::default(), RandomSeed(0)).unwrap();
        assert!(matches!(
            t.predict_proba_row(&[1.0]),
            Err(Error::DimensionMismatch {
                expected: 2,
                got: 1
            })
        ));
    }

    #[test]
    fn leaf_probs_sum_to_one() {
        let d = quadrant_grid();
        let t = DecisionTree::fit(&d, &TreeParams::default(), RandomSeed(1)).unwrap();
        for node in &t.nodes {
            assert!((node.probs[0] + node.probs[1] - 1.0).abs() < 1e-9);
        }
    }

    fn quadrant_grid() -> Dataset {
        // malicious only in the upper-right quadrant: needs two split levels
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for x in [-2.0, -1.0, 1.0, 2.0] {
            for y in [-2.0, -1.0, 1.0, 2.0] {
                rows.push(vec![x, y]);
                labels.push(usize::from(x > 0.0 && y > 0.0));
            }
        }
        ds(rows, labels)
    }

    #[test]
    fn exhaustive_solves_quadrant_exactly() {
        let d = quadrant_grid();
        let t = DecisionTree::fit(&d, &TreeParams::default(), RandomSeed(0)).unwrap();
        for i in 0..d.n_rows() {
            let p = t.predict_proba_row(d.row(i)).unwrap();
            assert_eq!(p[d.label(i).code()], 1.0);
        }
    }

    #[test]
    fn random_subspace_with_all_features_matches_exhaustive() {
        let d = quadrant_grid();
        let exhaustive = DecisionTree::fit(&d, &TreeParams::default(), RandomSeed(3)).unwrap();
        let params = TreeParams {
            split_mode: SplitMode::RandomSubspace,
            features_per_split: Some(2),
            ..TreeParams::default()
        };
        let subspace = DecisionTree::fit(&d, &params, RandomSeed(3)).unwrap();
        assert_eq!(exhaustive, subspace);
    }

    #[test]
    fn fully_random_ignores_labels_for_structure() {
        use rand::seq::SliceRandom;
        // labels shuffled, structure identical under the same seed; depth
        // cap keeps purity-based stops out of the picture
        let mut rows = Vec::new();
        let mut rng = RandomSeed(42).rng();
        for _ in 0..64 {
            rows.push(vec![rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()]);
        }
        let labels: Vec<usize> = (0..64).map(|i| i % 2).collect();
        let mut shuffled = labels.clone();
        shuffled.shuffle(&mut rng);
        let params = TreeParams {
            split_mode: SplitMode::FullyRandom,
            max_depth: Some(3),
            ..TreeParams::default()
        };
        let t1 = DecisionTree::fit(&ds(rows.clone(), labels), &params, RandomSeed(5)).unwrap();
        let t2 = DecisionTree::fit(&ds(rows, shuffled), &params, RandomSeed(5)).unwrap();
        let structure = |t: &DecisionTree| -> Vec<Option<(usize, f64)>> {
            t.nodes
                .iter()
                .map(|n| n.split.map(|s| (s.feature, s.threshold)))
                .collect()
        };
        assert_eq!(structure(&t1), structure(&t2));
    }

    #[test]
    fn fully_random_is_deterministic() {
        let d = quadrant_grid();
        let params = TreeParams {
            split_mode: SplitMode::FullyRandom,
            ..TreeParams::default()
        };
        let t1 = DecisionTree::fit(&d, &params, RandomSeed(11)).unwrap();
        let t2 = DecisionTree::fit(&d, &params, RandomSeed(11)).unwrap();
        assert_eq!(t1, t2);
    }

    /// Hand-built 7-node tree with known per-node statistics:
    /// root (4,4); left (3,1) with children (2,1) and (1,0);
    /// right (1,3) with children (1,0) and (0,3).
    fn fixture_tree() -> DecisionTree {
        let node = |n: usize, counts: [usize; 2], split: Option<Split>| Node {
            n,
            impurity: gini(counts),
            probs: [
                counts[0] as f64 / n as f64,
                counts[1] as f64 / n as f64,
            ],
            split,
        };
        DecisionTree {
            nodes: vec![
                node(8, [4, 4], Some(Split { feature: 0, threshold: 0.5, left: 1, right: 4 })),
                node(4, [3, 1], Some(Split { feature: 1, threshold: 0.5, left: 2, right: 3 })),
                node(3, [2, 1], None),
                node(1, [1, 0], None),
                node(4, [1, 3], Some(Split { feature: 1, threshold: 0.5, left: 5, right: 6 })),
                node(1, [1, 0], None),
                node(3, [0, 3], None),
            ],
            n_features: 2,
        }
    }

    /// Exhaustive minimizer of R(T) + alpha * |leaves| over all pruned
    /// subtrees, ties resolved toward fewer leaves.
    fn brute_force_prune(tree: &DecisionTree, alpha: f64) -> DecisionTree {
        let internal: Vec<usize> = (0..tree.nodes.len())
            .filter(|&i| tree.nodes[i].split.is_some())
            .collect();
        let mut best: Option<(f64, usize, Vec<bool>)> = None;
        for mask in 0..(1u32 << internal.len()) {
            let mut as_leaf = vec![false; tree.nodes.len()];
            for (bit, &t) in internal.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    as_leaf[t] = true;
                }
            }
            let leaves = tree.leaves_under(0, &as_leaf);
            let cost: f64 =
                leaves.iter().map(|&u| tree.node_risk(u)).sum::<f64>() + alpha * leaves.len() as f64;
            let better = match &best {
                None => true,
                Some((c, l, _)) => {
                    cost.total_cmp(c) == std::cmp::Ordering::Less
                        || (cost == *c && leaves.len() < *l)
                }
            };
            if better {
                best = Some((cost, leaves.len(), as_leaf));
            }
        }
        tree.pruned_copy(&best.unwrap().2)
    }

    #[test]
    fn ccp_alpha_zero_is_identity() {
        let d = quadrant_grid();
        let t = DecisionTree::fit(&d, &TreeParams::default(), RandomSeed(0)).unwrap();
        assert_eq!(t.ccp_prune(0.0), t);
    }

    #[test]
    fn ccp_infinite_alpha_gives_stump() {
        let t = fixture_tree();
        let pruned = t.ccp_prune(f64::INFINITY);
        assert_eq!(pruned.nodes.len(), 1);
        assert_eq!(pruned.nodes[0].probs, [0.5, 0.5]);
    }

    #[test]
    fn ccp_matches_brute_force_on_fixture() {
        let t = fixture_tree();
        // g values of the fixture: left child ~0.0208, root 0.15625 once
        // the left child is gone, right child 0.1875
        for alpha in [0.0, 0.01, 0.05, 0.1, 0.15, 0.15625, 0.17, 0.2, 1.0] {
            let pruned = t.ccp_prune(alpha);
            let oracle = brute_force_prune(&t, alpha);
            assert_eq!(pruned, oracle, "alpha={alpha}");
        }
    }

    #[test]
    fn ccp_prune_is_monotonic() {
        let t = fixture_tree();
        for (a1, a2) in [(0.01, 0.05), (0.05, 0.16), (0.0, 1.0), (0.1, 0.1)] {
            let twice = t.ccp_prune(a1).ccp_prune(a2);
            let once = t.ccp_prune(a2);
            assert_eq!(twice, once, "a1={a1} a2={a2}");
        }
    }

    #[test]
    fn params_validation() {
        let bad = TreeParams {
            min_samples_split: 1,
            ..TreeParams::default()
        };
        assert!(bad.validate().is_err());
        let bad = TreeParams {
            ccp_alpha: -0.1,
            ..TreeParams::default()
        };
        assert!(bad.validate().is_err());
    }
}
