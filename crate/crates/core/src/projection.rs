//! Cosine distances, 2D content-map layout and the hierarchy behind the
//! edge-bundle view.
//!
//! The layout starts from classical (Torgerson) MDS and is refined by SMACOF
//! stress majorization, which never increases the raw stress
//! `sum_{i<j} (d_ij - |x_i - x_j|)^2`.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::textprep::TermDocumentMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProjectionError {
    #[error("need at least 2 documents, got {0}")]
    TooFewDocuments(usize),
    #[error("distance matrix must be square with {expected} entries, got {got}")]
    BadShape { expected: usize, got: usize },
    #[error("invalid distance at ({i}, {j}): {reason}")]
    InvalidDistance { i: usize, j: usize, reason: &'static str },
}

/// Symmetric matrix of cosine distances with zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
    doc_keys: Vec<String>,
    /// Documents with an all-zero vector, pinned at distance 1 from everything.
    zero_vector_docs: Vec<usize>,
}

impl DistanceMatrix {
    /// Builds from a dense row-major `n x n` slice, checking symmetry, the zero
    /// diagonal and finiteness.
    pub fn from_dense(doc_keys: Vec<String>, values: Vec<f64>) -> Result<Self, ProjectionError> {
        let n = doc_keys.len();
        if values.len() != n * n {
            return Err(ProjectionError::BadShape { expected: n * n, got: values.len() });
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(ProjectionError::InvalidDistance { i, j: i, reason: "non-zero diagonal" });
            }
            for j in 0..n {
                let v = values[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(ProjectionError::InvalidDistance { i, j, reason: "negative or non-finite" });
                }
                if v != values[j * n + i] {
                    return Err(ProjectionError::InvalidDistance { i, j, reason: "asymmetric" });
                }
            }
        }
        Ok(DistanceMatrix { n, values, doc_keys, zero_vector_docs: Vec::new() })
    }

    /// Builds from a symmetric function of the pair `(i, j)`, `i < j`.
    pub fn from_fn(doc_keys: Vec<String>, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self, ProjectionError> {
        let n = doc_keys.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Self::from_dense(doc_keys, values)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn doc_keys(&self) -> &[String] {
        &self.doc_keys
    }

    pub fn zero_vector_docs(&self) -> &[usize] {
        &self.zero_vector_docs
    }
}

fn sparse_dot(a: &[(usize, f64)], b: &[(usize, f64)]) -> f64 {
    let (mut i, mut j, mut acc) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                acc += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

/// `d(i, j) = 1 - cos(x_i, x_j)`, clamped to `[0, 1]`.
pub fn distance_matrix(m: &TermDocumentMatrix) -> Result<DistanceMatrix, ProjectionError> {
    let n = m.n_docs();
    if n < 2 {
        return Err(ProjectionError::TooFewDocuments(n));
    }
    let norms: Vec<f64> = m.rows.iter().map(|r| sparse_dot(r, r).sqrt()).collect();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = if norms[i] == 0.0 || norms[j] == 0.0 {
                1.0
            } else {
                let cos = sparse_dot(&m.rows[i], &m.rows[j]) / (norms[i] * norms[j]);
                (1.0 - cos).clamp(0.0, 1.0)
            };
            values[i * n + j] = d;
            values[j * n + i] = d;
        }
    }
    let zero_vector_docs = (0..n).filter(|&i| norms[i] == 0.0).collect();
    Ok(DistanceMatrix {
        n,
        values,
        doc_keys: m.doc_keys.clone(),
        zero_vector_docs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionConfig {
    pub seed: u64,
    pub max_iterations: usize,
    /// Stop once the relative decrease of raw stress falls below this.
    pub tolerance: f64,
}

impl Default for ProjectionConfig {
    fn default() -> Self {
        ProjectionConfig { seed: 42, max_iterations: 300, tolerance: 1e-6 }
    }
}

/// 2D position per document plus the stress the layout achieved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectedMap {
    pub positions: Vec<[f64; 2]>,
    pub doc_keys: Vec<String>,
    /// Kruskal stress-1 of `positions`.
    pub final_stress: f64,
    pub iterations_run: usize,
    pub seed: u64,
}

impl ProjectedMap {
    /// Single-document map, at the origin.
    pub fn single(key: String, seed: u64) -> Self {
        ProjectedMap {
            positions: vec![[0.0, 0.0]],
            doc_keys: vec![key],
            final_stress: 0.0,
            iterations_run: 0,
            seed,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn layout_distance(&self, i: usize, j: usize) -> f64 {
        euclid(self.positions[i], self.positions[j])
    }
}

#[inline]
fn euclid(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn raw_stress(d: &DistanceMatrix, x: &[[f64; 2]]) -> f64 {
    let n = d.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let r = d.get(i, j) - euclid(x[i], x[j]);
            acc += r * r;
        }
    }
    acc
}

fn distance_energy(d: &DistanceMatrix) -> f64 {
    let n = d.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            acc += d.get(i, j) * d.get(i, j);
        }
    }
    acc
}

/// Kruskal stress-1: `sqrt(sum (d - delta)^2 / sum d^2)` over pairs, where
/// `delta` is the layout distance. Defined as 0 for an all-zero `d`.
pub fn stress(d: &DistanceMatrix, positions: &[[f64; 2]]) -> f64 {
    assert_eq!(d.len(), positions.len(), "distance matrix and layout sizes differ");
    let energy = distance_energy(d);
    if energy == 0.0 {
        return 0.0;
    }
    (raw_stress(d, positions) / energy).sqrt()
}

pub fn map_stress(d: &DistanceMatrix, map: &ProjectedMap) -> f64 {
    stress(d, &map.positions)
}

/// Lays the documents out in 2D. Deterministic for a fixed seed.
pub fn project(d: &DistanceMatrix, config: &ProjectionConfig) -> ProjectedMap {
    project_traced(d, config).0
}

/// Like [`project`], also returning the Kruskal stress after initialization
/// and after every SMACOF iteration.
pub fn project_traced(d: &DistanceMatrix, config: &ProjectionConfig) -> (ProjectedMap, Vec<f64>) {
    let n = d.len();
    let energy = distance_energy(d);
    let normalize = |raw: f64| if energy == 0.0 { 0.0 } else { (raw / energy).sqrt() };

    let mut x = classical_mds(d, config.seed);
    separate_collapsed(d, &mut x, config.seed);

    let mut raw = raw_stress(d, &x);
    let mut trace = vec![normalize(raw)];
    let mut iterations = 0;
    let mut next = vec![[0.0; 2]; n];
    while iterations < config.max_iterations && raw > 0.0 {
        guttman_transform(d, &x, &mut next);
        let new_raw = raw_stress(d, &next);
        iterations += 1;
        std::mem::swap(&mut x, &mut next);
        trace.push(normalize(new_raw));
        let decrease = raw - new_raw;
        raw = new_raw;
        if decrease <= config.tolerance * (raw + decrease) {
            break;
        }
    }

    let map = ProjectedMap {
        final_stress: stress(d, &x),
        positions: x,
        doc_keys: d.doc_keys.clone(),
        iterations_run: iterations,
        seed: config.seed,
    };
    (map, trace)
}

/// `X <- (1/n) B(X) X` with unit weights.
fn guttman_transform(d: &DistanceMatrix, x: &[[f64; 2]], out: &mut [[f64; 2]]) {
    let n = x.len();
    let inv_n = 1.0 / n as f64;
    for i in 0..n {
        let mut acc = [0.0; 2];
        for j in 0..n {
            if i == j {
                continue;
            }
            let delta = euclid(x[i], x[j]);
            if delta > 0.0 {
                let ratio = d.get(i, j) / delta;
                acc[0] += ratio * (x[i][0] - x[j][0]);
                acc[1] += ratio * (x[i][1] - x[j][1]);
            }
        }
        out[i] = [acc[0] * inv_n, acc[1] * inv_n];
    }
}

/// Torgerson scaling: top-2 eigenpairs of `-1/2 J D^2 J`.
pub fn classical_mds(d: &DistanceMatrix, seed: u64) -> Vec<[f64; 2]> {
    let n = d.len();
    if n == 0 {
        return Vec::new();
    }
    let mut b = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            b[i * n + j] = d.get(i, j) * d.get(i, j);
        }
    }
    let row_mean: Vec<f64> = (0..n).map(|i| b[i * n..(i + 1) * n].iter().sum::<f64>() / n as f64).collect();
    let grand = row_mean.iter().sum::<f64>() / n as f64;
    for i in 0..n {
        for j in 0..n {
            b[i * n + j] = -0.5 * (b[i * n + j] - row_mean[i] - row_mean[j] + grand);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (l1, v1) = top_eigenpair(&b, n, &[], &mut rng);
    let (l2, v2) = top_eigenpair(&b, n, &[&v1], &mut rng);
    let s1 = l1.max(0.0).sqrt();
    let s2 = l2.max(0.0).sqrt();
    (0..n).map(|i| [s1 * v1[i], s2 * v2[i]]).collect()
}

/// Largest algebraic eigenpair of symmetric `b`, orthogonal to `deflate`,
/// by power iteration on `b + cI` with `c` a Gershgorin bound.
fn top_eigenpair(b: &[f64], n: usize, deflate: &[&[f64]], rng: &mut ChaCha8Rng) -> (f64, Vec<f64>) {
    const MAX_ITERS: usize = 5000;
    let shift = (0..n)
        .map(|i| b[i * n..(i + 1) * n].iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    orthonormalize(&mut v, deflate);
    let mut w = vec![0.0; n];
    for _ in 0..MAX_ITERS {
        for i in 0..n {
            let row = &b[i * n..(i + 1) * n];
            w[i] = row.iter().zip(&v).map(|(a, x)| a * x).sum::<f64>() + shift * v[i];
        }
        if !orthonormalize(&mut w, deflate) {
            return (0.0, vec![0.0; n]);
        }
        let change = w.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        std::mem::swap(&mut v, &mut w);
        if change < 1e-12 {
            break;
        }
    }
    // Fix the sign: largest-magnitude component positive.
    let pivot = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    if v[pivot] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let mut lambda = 0.0;
    for i in 0..n {
        let row = &b[i * n..(i + 1) * n];
        lambda += v[i] * row.iter().zip(&v).map(|(a, x)| a * x).sum::<f64>();
    }
    (lambda, v)
}

fn orthonormalize(v: &mut [f64], basis: &[&[f64]]) -> bool {
    for u in basis {
        let dot: f64 = v.iter().zip(u.iter()).map(|(a, b)| a * b).sum();
        v.iter_mut().zip(u.iter()).for_each(|(a, b)| *a -= dot * b);
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-300 {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    true
}

/// Majorization cannot pull apart points that coincide; nudge the layout when
/// two points with positive target distance start on top of each other.
fn separate_collapsed(d: &DistanceMatrix, x: &mut [[f64; 2]], seed: u64) {
    let n = x.len();
    let scale = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| d.get(i, j))
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return;
    }
    let collapsed = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .any(|(i, j)| d.get(i, j) > 0.0 && euclid(x[i], x[j]) <= 1e-9 * scale);
    if !collapsed {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_c011_a95e);
    let amp = 1e-3 * scale;
    for p in x.iter_mut() {
        p[0] += rng.random_range(-amp..amp);
        p[1] += rng.random_range(-amp..amp);
    }
}

/// One node of the bundle hierarchy. Leaves are nodes `0..n`, in document order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    /// `[left, right]` for internal nodes.
    pub children: Option<[usize; 2]>,
    /// Average-linkage merge distance; 0 for leaves.
    pub height: f64,
    pub size: usize,
}

/// Binary hierarchy over the documents, leaves ordered around the bundle circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleTree {
    pub doc_keys: Vec<String>,
    pub nodes: Vec<TreeNode>,
    pub root: usize,
    /// Documents in left-to-right DFS order.
    pub leaf_order: Vec<usize>,
}

impl BundleTree {
    pub fn n_leaves(&self) -> usize {
        self.doc_keys.len()
    }

    pub fn is_leaf(&self, node: usize) -> bool {
        self.nodes[node].children.is_none()
    }

    /// Leaves below `node`, in DFS order.
    pub fn leaves_under(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(id) = stack.pop() {
            match self.nodes[id].children {
                Some([l, r]) => {
                    stack.push(r);
                    stack.push(l);
                }
                None => out.push(id),
            }
        }
        out
    }

    /// Parent of each node; the root maps to `None`.
    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut parents = vec![None; self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            if let Some([l, r]) = node.children {
                parents[l] = Some(id);
                parents[r] = Some(id);
            }
        }
        parents
    }

    /// Nested `{key, height}` / `{height, children}` form for the views.
    pub fn to_nested(&self) -> serde_json::Value {
        fn walk(tree: &BundleTree, id: usize) -> serde_json::Value {
            let node = &tree.nodes[id];
            match node.children {
                Some([l, r]) => serde_json::json!({
                    "id": id,
                    "height": node.height,
                    "children": [walk(tree, l), walk(tree, r)],
                }),
                None => serde_json::json!({ "id": id, "key": tree.doc_keys[id], "height": 0.0 }),
            }
        }
        if self.nodes.is_empty() {
            return serde_json::Value::Null;
        }
        walk(self, self.root)
    }
}

/// Average-linkage agglomerative clustering over `d`.
///
/// Ties on linkage distance go to the pair whose smallest member keys sort
/// first; the child holding the smaller key is placed left.
pub fn build_bundle_tree(d: &DistanceMatrix) -> BundleTree {
    let n = d.len();
    let keys = d.doc_keys.clone();
    let mut nodes: Vec<TreeNode> = (0..n).map(|_| TreeNode { children: None, height: 0.0, size: 1 }).collect();
    if n == 0 {
        return BundleTree { doc_keys: keys, nodes, root: 0, leaf_order: Vec::new() };
    }

    // Active clusters: (node id, smallest key index by key order).
    let mut active: Vec<usize> = (0..n).collect();
    let mut min_key: Vec<usize> = (0..n).collect();
    // Linkage between active clusters, indexed by node id.
    let cap = 2 * n - 1;
    let mut link = vec![0.0; cap * cap];
    for i in 0..n {
        for j in 0..n {
            link[i * cap + j] = d.get(i, j);
        }
    }

    while active.len() > 1 {
        let mut best: Option<(f64, &str, &str, usize, usize)> = None;
        for (ai, &a) in active.iter().enumerate() {
            for &b in &active[ai + 1..] {
                let (lo, hi) = if keys[min_key[a]] <= keys[min_key[b]] { (a, b) } else { (b, a) };
                let cand = (link[a * cap + b], keys[min_key[lo]].as_str(), keys[min_key[hi]].as_str(), lo, hi);
                let better = match &best {
                    None => true,
                    Some(cur) => cand.0.total_cmp(&cur.0).then(cand.1.cmp(cur.1)).then(cand.2.cmp(cur.2)) == Ordering::Less,
                };
                if better {
                    best = Some(cand);
                }
            }
        }
        let (height, _, _, left, right) = best.expect("at least one pair");
        let id = nodes.len();
        let (sl, sr) = (nodes[left].size as f64, nodes[right].size as f64);
        nodes.push(TreeNode { children: Some([left, right]), height, size: nodes[left].size + nodes[right].size });
        min_key.push(min_key[left]);
        active.retain(|&c| c != left && c != right);
        for &c in &active {
            let v = (sl * link[left * cap + c] + sr * link[right * cap + c]) / (sl + sr);
            link[id * cap + c] = v;
            link[c * cap + id] = v;
        }
        active.push(id);
    }

    let root = active[0];
    let mut tree = BundleTree { doc_keys: keys, nodes, root, leaf_order: Vec::new() };
    tree.leaf_order = tree.leaves_under(root);
    tree
}
