//! Exact automorphism counting by individualization-refinement.
//!
//! The search maintains a pair of colorings, one on the domain copy of the
//! graph and one on the image copy, refined in lockstep to equitable
//! partitions. A branch individualizes the smallest vertex of the first
//! non-singleton domain cell against every image vertex of the matching
//! cell. Every automorphism follows exactly one root-to-leaf path, and a
//! leaf with discrete matched colorings determines at most one bijection,
//! so counting accepted leaves counts automorphisms exactly.
//!
//! Refinement signatures are isomorphism-invariant (own color plus the
//! multiset of neighbor colors) and new color ids are assigned by sorted
//! signature on both sides simultaneously, so cells with equal ids always
//! correspond. The traversal order is fixed; the count is deterministic.

use std::collections::BTreeMap;

use super::AdjacencyBits;

type Coloring = Vec<u32>;

/// Signature of a vertex under a coloring: its own color plus the sorted
/// (color, count) profile of its neighbors.
fn signature(adj: &AdjacencyBits, colors: &Coloring, v: usize) -> Vec<u32> {
    let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
    for u in 0..adj.len() {
        if adj.get(v, u) {
            *counts.entry(colors[u]).or_insert(0) += 1;
        }
    }
    let mut sig = vec![colors[v]];
    for (c, n) in counts {
        sig.push(c);
        sig.push(n);
    }
    sig
}

/// Refine both colorings to stable equitable partitions with matching
/// cells. Returns false when the signature multisets diverge, which proves
/// no automorphism is consistent with the current individualization.
fn refine_pair(adj: &AdjacencyBits, dom: &mut Coloring, img: &mut Coloring) -> bool {
    let n = adj.len();
    loop {
        let dom_sigs: Vec<Vec<u32>> = (0..n).map(|v| signature(adj, dom, v)).collect();
        let img_sigs: Vec<Vec<u32>> = (0..n).map(|v| signature(adj, img, v)).collect();

        let mut order: BTreeMap<&Vec<u32>, u32> = BTreeMap::new();
        for sig in &dom_sigs {
            let next = order.len() as u32;
            order.entry(sig).or_insert(next);
        }
        // the image must produce exactly the same signature multiset
        let mut dom_count: BTreeMap<&Vec<u32>, i64> = BTreeMap::new();
        for sig in &dom_sigs {
            *dom_count.entry(sig).or_insert(0) += 1;
        }
        for sig in &img_sigs {
            match dom_count.get_mut(sig) {
                Some(c) => *c -= 1,
                None => return false,
            }
        }
        if dom_count.values().any(|&c| c != 0) {
            return false;
        }

        let new_dom: Coloring = dom_sigs.iter().map(|s| order[s]).collect();
        let new_img: Coloring = img_sigs.iter().map(|s| order[s]).collect();
        let stable = class_count(&new_dom) == class_count(dom);
        *dom = new_dom;
        *img = new_img;
        if stable {
            return true;
        }
    }
}

fn class_count(colors: &Coloring) -> usize {
    let mut seen: Vec<u32> = colors.clone();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

/// First color id owning more than one vertex, if any.
fn first_non_singleton(colors: &Coloring) -> Option<u32> {
    let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
    for &c in colors {
        *counts.entry(c).or_insert(0) += 1;
    }
    counts.into_iter().find(|&(_, n)| n > 1).map(|(c, _)| c)
}

fn search(adj: &AdjacencyBits, dom: Coloring, img: Coloring, count: &mut u64) {
    let mut dom = dom;
    let mut img = img;
    if !refine_pair(adj, &mut dom, &mut img) {
        return;
    }
    let n = adj.len();
    match first_non_singleton(&dom) {
        None => {
            // discrete colorings: read the candidate map and verify it
            let mut perm = vec![usize::MAX; n];
            let mut by_color = BTreeMap::new();
            for (v, &c) in img.iter().enumerate() {
                by_color.insert(c, v);
            }
            for (v, &c) in dom.iter().enumerate() {
                perm[v] = by_color[&c];
            }
            let ok = (0..n).all(|a| (a + 1..n).all(|b| adj.get(a, b) == adj.get(perm[a], perm[b])));
            if ok {
                *count += 1;
            }
        }
        Some(cell) => {
            let fresh = n as u32 + 1;
            let u = (0..n).find(|&v| dom[v] == cell).expect("cell is non-empty");
            for w in 0..n {
                if img[w] != cell {
                    continue;
                }
                let mut d2 = dom.clone();
                let mut i2 = img.clone();
                d2[u] = fresh;
                i2[w] = fresh;
                search(adj, d2, i2, count);
            }
        }
    }
}

pub(super) fn count_automorphisms(adj: &AdjacencyBits) -> u64 {
    let n = adj.len();
    if n == 0 {
        return 1;
    }
    let dom = vec![0u32; n];
    let img = vec![0u32; n];
    let mut count = 0;
    search(adj, dom, img, &mut count);
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Field;
    use crate::grassmann::GrassmannGraph;
    use crate::linalg::Matrix;

    fn graph_from_edges(n: usize, edges: &[(usize, usize)]) -> AdjacencyBits {
        let mut adj = AdjacencyBits::new(n);
        for &(a, b) in edges {
            adj.set(a, b);
            adj.set(b, a);
        }
        adj
    }

    #[test]
    fn small_graphs() {
        // triangle: S3
        let tri = graph_from_edges(3, &[(0, 1), (0, 2), (1, 2)]);
        assert_eq!(count_automorphisms(&tri), 6);
        // path on 3 vertices: one flip
        let path = graph_from_edges(3, &[(0, 1), (1, 2)]);
        assert_eq!(count_automorphisms(&path), 2);
        // 4-cycle: dihedral group of order 8
        let c4 = graph_from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(count_automorphisms(&c4), 8);
        // empty graph on 4 vertices: S4
        let e4 = graph_from_edges(4, &[]);
        assert_eq!(count_automorphisms(&e4), 24);
        // asymmetric tree
        let t = graph_from_edges(7, &[(0, 1), (1, 2), (2, 3), (2, 4), (4, 5), (5, 6)]);
        assert_eq!(count_automorphisms(&t), 1);
    }

    #[test]
    fn complete_projective_line_graph() {
        let f = Field::with_default_modulus(2, 1).unwrap();
        let g = GrassmannGraph::new(&f, 2, 1).unwrap();
        assert_eq!(g.automorphism_group_order(None).unwrap(), 6);
    }

    /// Petersen graph: |Aut| = 120.
    #[test]
    fn petersen() {
        let outer = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)];
        let spokes = [(0, 5), (1, 6), (2, 7), (3, 8), (4, 9)];
        let inner = [(5, 7), (7, 9), (9, 6), (6, 8), (8, 5)];
        let edges: Vec<(usize, usize)> =
            outer.iter().chain(&spokes).chain(&inner).copied().collect();
        let adj = graph_from_edges(10, &edges);
        assert_eq!(count_automorphisms(&adj), 120);
    }

    /// Every invertible matrix over GF(2) acts as a distinct automorphism
    /// of Γ_2(F_2^4); the kernel of the action is trivial.
    #[test]
    fn gl_4_2_acts_faithfully() {
        let f = Field::with_default_modulus(2, 1).unwrap();
        let g = GrassmannGraph::new(&f, 4, 2).unwrap();
        let mut perms = std::collections::HashSet::new();
        let mut gl_count = 0u64;
        for code in 0..(1u32 << 16) {
            let entries: Vec<u32> = (0..16).map(|b| (code >> b) & 1).collect();
            let m = Matrix::from_flat(&f, 4, 4, entries);
            if !m.is_invertible() {
                continue;
            }
            gl_count += 1;
            let perm: Vec<usize> = (0..g.vertex_count())
                .map(|i| {
                    let image = crate::linalg::Subspace::from_spanning(
                        &g.vertex(i).basis().mul(&m),
                    );
                    g.index_of(&image).unwrap()
                })
                .collect();
            perms.insert(perm);
        }
        // order formula: (2^4-1)(2^4-2)(2^4-4)(2^4-8)
        assert_eq!(gl_count, 15 * 14 * 12 * 8);
        assert_eq!(perms.len() as u64, gl_count);
    }
}
