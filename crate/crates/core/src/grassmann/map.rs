//! Explicit finite maps between Grassmann graphs.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grassmann::GrassmannGraph;
use crate::linalg::Subspace;

/// A total map from the vertices of one Grassmann graph to the vertices of
/// another, stored as a table of codomain indices in domain vertex order.
#[derive(Clone)]
pub struct GrassmannMap {
    domain: Arc<GrassmannGraph>,
    codomain: Arc<GrassmannGraph>,
    table: Vec<usize>,
}

impl std::fmt::Debug for GrassmannMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GrassmannMap {:?} -> {:?}", self.domain, self.codomain)
    }
}

impl PartialEq for GrassmannMap {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain
            && self.codomain == other.codomain
            && self.table == other.table
    }
}

impl Eq for GrassmannMap {}

impl GrassmannMap {
    pub fn new(
        domain: Arc<GrassmannGraph>,
        codomain: Arc<GrassmannGraph>,
        table: Vec<usize>,
    ) -> Result<GrassmannMap> {
        if table.len() != domain.vertex_count() {
            return Err(Error::DimensionMismatch {
                expected: domain.vertex_count(),
                got: table.len(),
            });
        }
        if let Some(&bad) = table.iter().find(|&&j| j >= codomain.vertex_count()) {
            return Err(Error::OutOfRange(format!(
                "codomain index {bad} out of range 0..{}",
                codomain.vertex_count()
            )));
        }
        Ok(GrassmannMap { domain, codomain, table })
    }

    pub fn identity(graph: &Arc<GrassmannGraph>) -> GrassmannMap {
        GrassmannMap {
            domain: Arc::clone(graph),
            codomain: Arc::clone(graph),
            table: (0..graph.vertex_count()).collect(),
        }
    }

    /// Build a map by evaluating a subspace-level function on every domain
    /// vertex; the images must be canonical vertices of the codomain.
    pub fn from_fn(
        domain: Arc<GrassmannGraph>,
        codomain: Arc<GrassmannGraph>,
        mut f: impl FnMut(&Subspace) -> Result<Subspace>,
    ) -> Result<GrassmannMap> {
        let mut table = Vec::with_capacity(domain.vertex_count());
        for v in domain.vertices() {
            let image = f(v)?;
            let idx = codomain
                .index_of(&image)
                .ok_or_else(|| Error::OutOfRange("image is not a codomain vertex".into()))?;
            table.push(idx);
        }
        GrassmannMap::new(domain, codomain, table)
    }

    pub fn domain(&self) -> &Arc<GrassmannGraph> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<GrassmannGraph> {
        &self.codomain
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, i: usize) -> usize {
        self.table[i]
    }

    /// Image of a domain vertex given as a subspace.
    pub fn apply_subspace(&self, x: &Subspace) -> Result<&Subspace> {
        let i = self.domain.index_of(x).ok_or(Error::GradeMismatch)?;
        Ok(self.codomain.vertex(self.table[i]))
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.codomain.vertex_count()];
        self.table.iter().all(|&j| !std::mem::replace(&mut seen[j], true))
    }

    /// Composition `other ∘ self` (apply `self` first).
    pub fn compose(&self, other: &GrassmannMap) -> Result<GrassmannMap> {
        if self.codomain != other.domain {
            return Err(Error::GraphMismatch);
        }
        let table = self.table.iter().map(|&i| other.table[i]).collect();
        GrassmannMap::new(Arc::clone(&self.domain), Arc::clone(&other.codomain), table)
    }
}
