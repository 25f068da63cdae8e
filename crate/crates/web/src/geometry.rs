//! Radial layout of the bundle tree and citation paths routed along it.
//!
//! Leaves sit on the unit circle in `leaf_order`; internal nodes sit inside,
//! at the mean angle of their leaves and a radius that shrinks with merge
//! height. A citation follows the tree from its source leaf up to the lowest
//! common ancestor and down to its target. `beta` in `[0, 1]` pulls the control
//! points toward the straight chord: 0 draws straight lines, 1 follows the
//! tree exactly.

use std::f64::consts::TAU;

use srmap_core::projection::BundleTree;

#[derive(Debug, Clone, PartialEq)]
pub struct RadialLayout {
    /// Position of every tree node, leaves included.
    pub points: Vec<[f64; 2]>,
    /// Angle of each leaf in radians.
    pub leaf_angle: Vec<f64>,
}

/// Radius of internal nodes relative to the leaf circle.
const INNER: f64 = 0.85;

pub fn radial_layout(tree: &BundleTree) -> RadialLayout {
    let n = tree.n_leaves();
    let mut points = vec![[0.0, 0.0]; tree.nodes.len()];
    let mut leaf_angle = vec![0.0; n];
    if n == 0 {
        return RadialLayout { points, leaf_angle };
    }
    for (slot, &leaf) in tree.leaf_order.iter().enumerate() {
        leaf_angle[leaf] = TAU * slot as f64 / n as f64;
        points[leaf] = [leaf_angle[leaf].cos(), leaf_angle[leaf].sin()];
    }
    let max_h = tree.nodes.iter().map(|t| t.height).fold(0.0, f64::max);
    let slot_of: Vec<usize> = {
        let mut s = vec![0; n];
        for (slot, &leaf) in tree.leaf_order.iter().enumerate() {
            s[leaf] = slot;
        }
        s
    };
    for id in n..tree.nodes.len() {
        let leaves = tree.leaves_under(id);
        // Leaves under a node are contiguous in leaf order, so the plain mean
        // slot is its angular middle.
        let mid = leaves.iter().map(|&l| slot_of[l] as f64).sum::<f64>() / leaves.len() as f64;
        let angle = TAU * mid / n as f64;
        let r = if max_h > 0.0 { INNER * (1.0 - tree.nodes[id].height / max_h) } else { INNER };
        points[id] = [r * angle.cos(), r * angle.sin()];
    }
    RadialLayout { points, leaf_angle }
}

/// Node ids from `a` up to the lowest common ancestor and down to `b`.
pub fn tree_path(tree: &BundleTree, a: usize, b: usize) -> Vec<usize> {
    let parents = tree.parents();
    let ancestors = |mut x: usize| {
        let mut chain = vec![x];
        while let Some(p) = parents[x] {
            chain.push(p);
            x = p;
        }
        chain
    };
    let up = ancestors(a);
    let down = ancestors(b);
    let lca = *up.iter().find(|n| down.contains(n)).expect("shared root");
    let mut path: Vec<usize> = up.iter().copied().take_while(|&n| n != lca).collect();
    path.push(lca);
    let tail: Vec<usize> = down.iter().copied().take_while(|&n| n != lca).collect();
    path.extend(tail.into_iter().rev());
    path
}

/// Control points of the bundled curve from leaf `a` to leaf `b`.
pub fn bundle_path(tree: &BundleTree, layout: &RadialLayout, a: usize, b: usize, beta: f64) -> Vec<[f64; 2]> {
    let beta = beta.clamp(0.0, 1.0);
    let ids = tree_path(tree, a, b);
    let p0 = layout.points[a];
    let pn = layout.points[b];
    let last = (ids.len() - 1).max(1) as f64;
    ids.iter()
        .enumerate()
        .map(|(i, &id)| {
            let t = i as f64 / last;
            let p = layout.points[id];
            let chord = [p0[0] + t * (pn[0] - p0[0]), p0[1] + t * (pn[1] - p0[1])];
            [beta * p[0] + (1.0 - beta) * chord[0], beta * p[1] + (1.0 - beta) * chord[1]]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use srmap_core::projection::{build_bundle_tree, DistanceMatrix};

    fn tree4() -> BundleTree {
        // {a,b} close, {c,d} close.
        let d = [
            0.0, 0.1, 0.9, 0.9, //
            0.1, 0.0, 0.9, 0.9, //
            0.9, 0.9, 0.0, 0.2, //
            0.9, 0.9, 0.2, 0.0,
        ];
        let keys = ["a", "b", "c", "d"].map(String::from).to_vec();
        build_bundle_tree(&DistanceMatrix::from_dense(keys, d.to_vec()).unwrap())
    }

    #[test]
    fn leaves_on_unit_circle_root_at_center() {
        let t = tree4();
        let l = radial_layout(&t);
        for leaf in 0..4 {
            let [x, y] = l.points[leaf];
            assert!(((x * x + y * y).sqrt() - 1.0).abs() < 1e-12);
        }
        let [x, y] = l.points[t.root];
        assert!(x.abs() < 1e-12 && y.abs() < 1e-12);
    }

    #[test]
    fn path_goes_through_common_ancestor() {
        let t = tree4();
        let p = tree_path(&t, 0, 2);
        assert_eq!(p.first(), Some(&0));
        assert_eq!(p.last(), Some(&2));
        assert!(p.contains(&t.root));
        assert_eq!(p.len(), 5);
        // Siblings meet just above the leaves.
        assert_eq!(tree_path(&t, 0, 1).len(), 3);
    }

    #[test]
    fn beta_zero_is_straight() {
        let t = tree4();
        let l = radial_layout(&t);
        let pts = bundle_path(&t, &l, 0, 3, 0.0);
        let (a, b) = (l.points[0], l.points[3]);
        for p in pts {
            let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
            assert!(cross.abs() < 1e-12);
        }
    }

    #[test]
    fn beta_one_follows_tree() {
        let t = tree4();
        let l = radial_layout(&t);
        let pts = bundle_path(&t, &l, 1, 2, 1.0);
        let ids = tree_path(&t, 1, 2);
        for (p, id) in pts.iter().zip(ids) {
            assert_eq!(*p, l.points[id]);
        }
    }

    #[test]
    fn endpoints_fixed_for_any_beta() {
        let t = tree4();
        let l = radial_layout(&t);
        for beta in [0.0, 0.3, 0.85, 1.0] {
            let pts = bundle_path(&t, &l, 3, 0, beta);
            assert_eq!(pts[0], l.points[3]);
            assert_eq!(*pts.last().unwrap(), l.points[0]);
        }
    }
}
