//! The Grassmann graph Γ_k(V) over a finite field.
//!
//! Vertices are the k-dimensional subspaces of F_q^n in a fixed canonical
//! order: pivot sets first (colexicographically, with columns counted from
//! the right, so the first vertex is the span of the last k standard basis
//! vectors), then the free entries of the RREF read as a base-q number with
//! the first free position most significant. Two vertices are adjacent when
//! their intersection has dimension k-1; the graph distance is
//! `k - dim(X ∩ Y)` and the diameter is `min(k, n-k)`.

mod automorphism;
mod map;

pub use map::GrassmannMap;

use std::collections::HashMap;
use std::sync::Arc;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::gf::Field;
use crate::linalg::{Matrix, QuotientStructure, Subspace};

/// Hard cap on explicit vertex enumeration.
const MAX_ENUMERATION: u128 = 1 << 22;

/// Default vertex budget for graph construction.
const DEFAULT_MAX_VERTICES: u128 = 1 << 20;

/// Default vertex budget for the automorphism search.
pub const DEFAULT_AUTOMORPHISM_BUDGET: usize = 200;

fn checked_pow(base: u128, exp: u64) -> Result<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base).ok_or(Error::CountOverflow)?;
    }
    Ok(acc)
}

/// The Gaussian binomial coefficient `[n choose k]_q`, the number of
/// k-dimensional subspaces of F_q^n, by the exact product formula
/// `prod_{i=0}^{k-1} (q^{n-i}-1)/(q^{i+1}-1)`. Every partial product is
/// itself a Gaussian binomial, so the computation stays integral.
pub fn gaussian_binomial(n: u64, k: u64, q: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let q = q as u128;
    let mut result: u128 = 1;
    for i in 0..k {
        let num = checked_pow(q, n - i)? - 1;
        let den = checked_pow(q, i + 1)? - 1;
        result = result.checked_mul(num).ok_or(Error::CountOverflow)?;
        debug_assert_eq!(result % den, 0);
        result /= den;
    }
    Ok(result)
}

/// Number of projective points of F_q^m, `(q^m - 1)/(q - 1)`.
pub fn projective_point_count(m: u64, q: u64) -> Result<u128> {
    gaussian_binomial(m, 1, q)
}

/// Pivot sets of k-subspace RREFs in canonical order: colexicographic with
/// columns counted from the right, so `{n-k, .., n-1}` comes first.
fn pivot_sets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut sets: Vec<Vec<usize>> = (0..n).combinations(k).collect();
    sets.sort_by_key(|p| p.iter().map(|&c| n - 1 - c).collect::<Vec<_>>());
    sets
}

/// All k-dimensional subspaces of F_q^n in the canonical vertex order.
pub fn enumerate_subspaces(field: &Field, n: usize, k: usize) -> Result<Vec<Subspace>> {
    let count = gaussian_binomial(n as u64, k as u64, field.order() as u64)?;
    if count > MAX_ENUMERATION {
        return Err(Error::BudgetExceeded {
            needed: count.min(u64::MAX as u128) as u64,
            budget: MAX_ENUMERATION as u64,
        });
    }
    let q = field.order() as u64;
    let mut out = Vec::with_capacity(count as usize);
    for pivots in pivot_sets(n, k) {
        let free: Vec<(usize, usize)> = (0..k)
            .flat_map(|i| {
                let pivots = &pivots;
                (pivots[i] + 1..n).filter(move |j| !pivots.contains(j)).map(move |j| (i, j))
            })
            .collect();
        let combos = checked_pow(q as u128, free.len() as u64)?;
        for code in 0..combos {
            let mut m = Matrix::zero(field, k, n);
            for (i, &p) in pivots.iter().enumerate() {
                m.set(i, p, 1);
            }
            // first free position is the most significant base-q digit
            let mut c = code;
            for &(i, j) in free.iter().rev() {
                m.set(i, j, (c % q as u128) as u32);
                c /= q as u128;
            }
            out.push(Subspace::from_spanning(&m));
        }
    }
    debug_assert_eq!(out.len() as u128, count);
    Ok(out)
}

/// All j-dimensional subspaces of a given subspace, in the canonical order
/// of their coordinate representations.
pub fn subspaces_within(space: &Subspace, j: usize) -> Result<Vec<Subspace>> {
    let coords = enumerate_subspaces(space.field(), space.dim(), j)?;
    Ok(coords
        .into_iter()
        .map(|c| Subspace::from_spanning(&c.basis().mul(space.basis())))
        .collect())
}

/// A maximal clique of Γ_k(V): either the star of a (k-1)-subspace or the
/// top of a (k+1)-subspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueDescriptor {
    pub kind: CliqueKind,
    pub center: Subspace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CliqueKind {
    Star,
    Top,
}

/// Square adjacency matrix packed into machine words.
#[derive(Clone)]
pub struct AdjacencyBits {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl AdjacencyBits {
    pub fn new(n: usize) -> AdjacencyBits {
        let words = n.div_ceil(64);
        AdjacencyBits { n, words, bits: vec![0; n * words] }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&j| self.get(i, j)).collect()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// The Grassmann graph Γ_k(F_q^n) with explicitly enumerated vertices.
///
/// Immutable after construction. Adjacency is computed on demand from the
/// RREF bases; callers that need many adjacency queries should build the
/// packed matrix once via [`GrassmannGraph::adjacency_bits`].
pub struct GrassmannGraph {
    field: Field,
    n: usize,
    k: usize,
    vertices: Vec<Subspace>,
    index: HashMap<Subspace, usize>,
}

impl PartialEq for GrassmannGraph {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.n == other.n && self.k == other.k
    }
}

impl Eq for GrassmannGraph {}

impl std::fmt::Debug for GrassmannGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Grassmann({}, n={}, k={}, vertices={})",
            self.field.header(),
            self.n,
            self.k,
            self.vertices.len()
        )
    }
}

impl GrassmannGraph {
    pub fn new(field: &Field, n: usize, k: usize) -> Result<GrassmannGraph> {
        Self::new_with_budget(field, n, k, DEFAULT_MAX_VERTICES)
    }

    pub fn new_with_budget(
        field: &Field,
        n: usize,
        k: usize,
        max_vertices: u128,
    ) -> Result<GrassmannGraph> {
        if k > n {
            return Err(Error::OutOfRange(format!("k = {k} exceeds n = {n}")));
        }
        let count = gaussian_binomial(n as u64, k as u64, field.order() as u64)?;
        if count > max_vertices {
            return Err(Error::BudgetExceeded {
                needed: count.min(u64::MAX as u128) as u64,
                budget: max_vertices.min(u64::MAX as u128) as u64,
            });
        }
        let vertices = enumerate_subspaces(field, n, k)?;
        let index = vertices.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Ok(GrassmannGraph { field: field.clone(), n, k, vertices, index })
    }

    pub fn shared(field: &Field, n: usize, k: usize) -> Result<Arc<GrassmannGraph>> {
        Ok(Arc::new(Self::new(field, n, k)?))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn grade(&self) -> usize {
        self.k
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, i: usize) -> &Subspace {
        &self.vertices[i]
    }

    pub fn vertices(&self) -> &[Subspace] {
        &self.vertices
    }

    pub fn index_of(&self, s: &Subspace) -> Option<usize> {
        self.index.get(s).copied()
    }

    fn check_vertex(&self, s: &Subspace) -> Result<()> {
        if s.field() != &self.field || s.ambient_dim() != self.n || s.dim() != self.k {
            return Err(Error::GradeMismatch);
        }
        Ok(())
    }

    /// Adjacency: the intersection has dimension k-1.
    pub fn adjacent(&self, x: &Subspace, y: &Subspace) -> Result<bool> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        Ok(x != y && x.intersection(y)?.dim() == self.k - 1)
    }

    /// Graph distance `k - dim(X ∩ Y)`.
    pub fn distance(&self, x: &Subspace, y: &Subspace) -> Result<usize> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        Ok(self.k - x.intersection(y)?.dim())
    }

    pub fn distance_by_index(&self, i: usize, j: usize) -> usize {
        self.distance(&self.vertices[i], &self.vertices[j]).expect("indices are in range")
    }

    /// Diameter `min(k, n-k)`.
    pub fn diameter(&self) -> usize {
        self.k.min(self.n - self.k)
    }

    /// Common vertex degree `q · [k]_q · [n-k]_q`.
    pub fn degree(&self) -> Result<u128> {
        let q = self.field.order() as u64;
        let a = projective_point_count(self.k as u64, q)?;
        let b = projective_point_count((self.n - self.k) as u64, q)?;
        (q as u128).checked_mul(a).and_then(|x| x.checked_mul(b)).ok_or(Error::CountOverflow)
    }

    pub fn edge_count(&self) -> Result<u128> {
        Ok(self.vertex_count() as u128 * self.degree()? / 2)
    }

    /// Size of a star clique, `(q^{n-k+1}-1)/(q-1)`.
    pub fn star_size(&self) -> Result<u128> {
        projective_point_count((self.n - self.k + 1) as u64, self.field.order() as u64)
    }

    /// Size of a top clique, `(q^{k+1}-1)/(q-1)`.
    pub fn top_size(&self) -> Result<u128> {
        projective_point_count((self.k + 1) as u64, self.field.order() as u64)
    }

    /// The star `[S⟩_k`: all vertices containing the (k-1)-subspace S.
    pub fn star(&self, s: &Subspace) -> Result<Vec<usize>> {
        if s.field() != &self.field || s.ambient_dim() != self.n || s.dim() + 1 != self.k {
            return Err(Error::DimensionMismatch { expected: self.k - 1, got: s.dim() });
        }
        let quot = QuotientStructure::new(s);
        let points = enumerate_subspaces(&self.field, quot.quotient_dim(), 1)?;
        let mut out: Vec<usize> = points
            .iter()
            .map(|p| {
                self.index_of(&quot.lift_subspace(p)).expect("lift is a k-subspace vertex")
            })
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    /// The top `⟨U]_k`: all vertices contained in the (k+1)-subspace U.
    pub fn top(&self, u: &Subspace) -> Result<Vec<usize>> {
        if u.field() != &self.field || u.ambient_dim() != self.n || u.dim() != self.k + 1 {
            return Err(Error::DimensionMismatch { expected: self.k + 1, got: u.dim() });
        }
        let mut out: Vec<usize> = subspaces_within(u, self.k)?
            .iter()
            .map(|x| self.index_of(x).expect("subspace of U is a vertex"))
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    /// The line `[S, U]_k`: all vertices between incident S (dim k-1) and
    /// U (dim k+1). Contains exactly q+1 vertices.
    pub fn line(&self, s: &Subspace, u: &Subspace) -> Result<Vec<usize>> {
        if s.dim() + 1 != self.k || u.dim() != self.k + 1 {
            return Err(Error::DimensionMismatch { expected: self.k, got: s.dim() + 1 });
        }
        if !u.contains(s) {
            return Err(Error::NotIncident);
        }
        let quot = QuotientStructure::new(s);
        let ubar = quot.project_subspace(u);
        debug_assert_eq!(ubar.dim(), 2);
        let mut out: Vec<usize> = subspaces_within(&ubar, 1)?
            .iter()
            .map(|p| self.index_of(&quot.lift_subspace(p)).expect("line point is a vertex"))
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    /// The star and top through an adjacent pair: the star of X ∩ Y and the
    /// top of X + Y, the only two maximal cliques containing both.
    pub fn maximal_cliques_containing(
        &self,
        x: &Subspace,
        y: &Subspace,
    ) -> Result<(CliqueDescriptor, CliqueDescriptor)> {
        if !self.adjacent(x, y)? {
            return Err(Error::NotAdjacent);
        }
        Ok((
            CliqueDescriptor { kind: CliqueKind::Star, center: x.intersection(y)? },
            CliqueDescriptor { kind: CliqueKind::Top, center: x.sum(y)? },
        ))
    }

    /// Packed adjacency matrix over all vertex pairs.
    pub fn adjacency_bits(&self) -> AdjacencyBits {
        let n = self.vertex_count();
        let mut adj = AdjacencyBits::new(n);
        for i in 0..n {
            for j in i + 1..n {
                if self
                    .adjacent(&self.vertices[i], &self.vertices[j])
                    .expect("vertices share parameters")
                {
                    adj.set(i, j);
                    adj.set(j, i);
                }
            }
        }
        adj
    }

    /// Exhaustive maximal-clique enumeration (Bron–Kerbosch with pivoting).
    /// Cliques and the clique list are sorted for determinism.
    pub fn maximal_cliques(&self) -> Result<Vec<Vec<usize>>> {
        let n = self.vertex_count();
        if n > 4096 {
            return Err(Error::BudgetExceeded { needed: n as u64, budget: 4096 });
        }
        let adj = self.adjacency_bits();
        let words = n.div_ceil(64);
        let mut p = vec![u64::MAX; words];
        if n % 64 != 0 {
            p[words - 1] = (1u64 << (n % 64)) - 1;
        }
        let x = vec![0u64; words];
        let mut out = Vec::new();
        let mut r = Vec::new();
        bron_kerbosch(&adj, &mut r, p, x, &mut out);
        for c in out.iter_mut() {
            c.sort_unstable();
        }
        out.sort();
        Ok(out)
    }

    /// Exact order of the combinatorial automorphism group, found by an
    /// individualization-refinement backtracking search. Refuses graphs
    /// with more vertices than the budget (default 200).
    pub fn automorphism_group_order(&self, budget: Option<usize>) -> Result<u64> {
        let budget = budget.unwrap_or(DEFAULT_AUTOMORPHISM_BUDGET);
        let n = self.vertex_count();
        if n > budget {
            return Err(Error::BudgetExceeded { needed: n as u64, budget: budget as u64 });
        }
        let adj = self.adjacency_bits();
        Ok(automorphism::count_automorphisms(&adj))
    }

    /// The annihilator isomorphism Γ_k(V) → Γ_{n-k}(V*): each vertex maps
    /// to its annihilator. Bijective and distance-preserving.
    pub fn dual_isomorphism(self: &Arc<Self>) -> Result<GrassmannMap> {
        let codomain = GrassmannGraph::shared(&self.field, self.n, self.n - self.k)?;
        let table = self
            .vertices
            .iter()
            .map(|v| codomain.index_of(&v.annihilator()).expect("annihilator is a vertex"))
            .collect();
        GrassmannMap::new(Arc::clone(self), codomain, table)
    }

    /// Deterministic export: sorted edge list or DOT.
    pub fn export(&self, format: ExportFormat) -> Result<String> {
        let n = self.vertex_count();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.adjacent(&self.vertices[i], &self.vertices[j])? {
                    edges.push((i, j));
                }
            }
        }
        let mut out = String::new();
        match format {
            ExportFormat::EdgeList => {
                out.push_str(&format!("{}\n", self.field.header()));
                out.push_str(&format!("{} {} {} {}\n", self.n, self.k, n, edges.len()));
                for (i, j) in edges {
                    out.push_str(&format!("{i} {j}\n"));
                }
            }
            ExportFormat::Dot => {
                out.push_str(&format!(
                    "// {} n={} k={}\ngraph grassmann {{\n",
                    self.field.header(),
                    self.n,
                    self.k
                ));
                for i in 0..n {
                    out.push_str(&format!("  {i};\n"));
                }
                for (i, j) in edges {
                    out.push_str(&format!("  {i} -- {j};\n"));
                }
                out.push_str("}\n");
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    EdgeList,
    Dot,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<ExportFormat> {
        match s {
            "edge-list" => Ok(ExportFormat::EdgeList),
            "dot" => Ok(ExportFormat::Dot),
            other => Err(Error::OutOfRange(format!("unknown format `{other}`"))),
        }
    }
}

fn bron_kerbosch(
    adj: &AdjacencyBits,
    r: &mut Vec<usize>,
    p: Vec<u64>,
    x: Vec<u64>,
    out: &mut Vec<Vec<usize>>,
) {
    let popcount = |v: &[u64]| v.iter().map(|w| w.count_ones() as usize).sum::<usize>();
    if popcount(&p) == 0 && popcount(&x) == 0 {
        out.push(r.clone());
        return;
    }
    // pivot: vertex of P ∪ X with the most neighbors in P
    let mut pivot = None;
    let mut best = usize::MAX;
    for v in iter_bits(&p).chain(iter_bits(&x)) {
        let missed = iter_bits(&p).filter(|&u| !adj.get(v, u)).count();
        if missed < best {
            best = missed;
            pivot = Some(v);
        }
    }
    let candidates: Vec<usize> = match pivot {
        Some(pv) => iter_bits(&p).filter(|&u| !adj.get(pv, u)).collect(),
        None => iter_bits(&p).collect(),
    };
    let mut p = p;
    let mut x = x;
    for v in candidates {
        let np: Vec<u64> = p.iter().zip(adj.row(v)).map(|(a, b)| a & b).collect();
        let nx: Vec<u64> = x.iter().zip(adj.row(v)).map(|(a, b)| a & b).collect();
        r.push(v);
        bron_kerbosch(adj, r, np, nx, out);
        r.pop();
        p[v / 64] &= !(1 << (v % 64));
        x[v / 64] |= 1 << (v % 64);
    }
}

fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            }
        })
    })
}
