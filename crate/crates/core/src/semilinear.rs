//! Semilinear maps between finite vector spaces and the operations built on
//! them: m-embedding tests, induced maps on Grassmannians, constructive
//! recovery of a semilinear map from its action on projective points, and
//! the linear-automorphism extension test characterizing semilinear
//! embeddings.

use std::sync::Arc;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::gf::{hom_enumerate, Field, FieldHom};
use crate::grassmann::{enumerate_subspaces, subspaces_within, GrassmannGraph, GrassmannMap};
use crate::linalg::{normalize_rep, vec_add, vec_is_zero, vec_scale, Matrix, Subspace};

/// Default exhaustion budget: vector spaces with more elements than this are
/// refused by the exhaustive checks.
pub const DEFAULT_EXHAUSTION_BUDGET: u64 = 1 << 16;

/// An additive map `l` with `l(a x) = σ(a) l(x)` for a field homomorphism
/// `σ`, stored as the homomorphism plus the matrix whose row `i` is the
/// image of the i-th standard basis vector:
/// `l(a_1, .., a_n) = Σ σ(a_i) · row_i`.
#[derive(Clone, PartialEq, Eq)]
pub struct SemilinearMap {
    twist: FieldHom,
    matrix: Matrix,
}

impl std::fmt::Debug for SemilinearMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "SemilinearMap {}^{} -> {}^{} via {:?}",
            self.source_field().header(),
            self.source_dim(),
            self.target_field().header(),
            self.target_dim(),
            self.twist
        )
    }
}

impl SemilinearMap {
    pub fn new(twist: FieldHom, matrix: Matrix) -> Result<SemilinearMap> {
        if matrix.field() != twist.target() {
            return Err(Error::FieldMismatch);
        }
        Ok(SemilinearMap { twist, matrix })
    }

    /// A linear map (identity twist) over one field.
    pub fn linear(matrix: Matrix) -> SemilinearMap {
        let twist = FieldHom::identity(matrix.field());
        SemilinearMap { twist, matrix }
    }

    pub fn identity(field: &Field, n: usize) -> SemilinearMap {
        SemilinearMap::linear(Matrix::identity(field, n))
    }

    pub fn twist(&self) -> &FieldHom {
        &self.twist
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn source_field(&self) -> &Field {
        self.twist.source()
    }

    pub fn target_field(&self) -> &Field {
        self.twist.target()
    }

    pub fn source_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn apply(&self, x: &[u32]) -> Vec<u32> {
        assert_eq!(x.len(), self.source_dim());
        let twisted: Vec<u32> = x.iter().map(|&a| self.twist.apply(a)).collect();
        self.matrix.apply_row(&twisted)
    }

    /// The map `c · l` for a nonzero target scalar.
    pub fn scale(&self, c: u32) -> SemilinearMap {
        let f = self.target_field().clone();
        let rows: Vec<Vec<u32>> =
            self.matrix.rows_iter().map(|r| vec_scale(&f, c, r)).collect();
        SemilinearMap { twist: self.twist.clone(), matrix: Matrix::from_rows(&f, &rows) }
    }

    /// True when the two maps differ by a single nonzero scalar (and share
    /// the same twist). Inducing maps of one point map agree in this sense.
    pub fn proportional_to(&self, other: &SemilinearMap) -> bool {
        if self.twist != other.twist
            || self.source_dim() != other.source_dim()
            || self.target_dim() != other.target_dim()
        {
            return false;
        }
        let f = self.target_field();
        let a = &self.matrix;
        let b = &other.matrix;
        let mut ratio = None;
        for r in 0..a.rows() {
            for c in 0..a.cols() {
                let (x, y) = (a.get(r, c), b.get(r, c));
                if x == 0 && y == 0 {
                    continue;
                }
                if x == 0 || y == 0 {
                    return false;
                }
                let q = f.div(y, x);
                match ratio {
                    None => ratio = Some(q),
                    Some(r0) if r0 != q => return false,
                    _ => {}
                }
            }
        }
        ratio.is_some() || a.rows() == 0
    }

    /// Injectivity, decided exactly by ranking the map as a linear map over
    /// the source field: through the twist the target becomes a
    /// source-field vector space (dimension multiplied by the subfield
    /// index), and `l` is injective iff the expanded matrix has full row
    /// rank. In test builds the result is cross-checked by exhaustion.
    pub fn is_injective(&self) -> bool {
        let expanded = self.expand_over_source();
        let injective = expanded.rank() == self.source_dim();
        #[cfg(debug_assertions)]
        {
            let size = (self.source_field().order() as u64)
                .checked_pow(self.source_dim() as u32);
            if size.is_some_and(|s| s <= DEFAULT_EXHAUSTION_BUDGET) {
                debug_assert_eq!(injective, self.is_injective_exhaustive());
            }
        }
        injective
    }

    /// Exhaustive injectivity check: no nonzero vector maps to zero. Kept
    /// as the independent oracle guarding the expansion path.
    pub fn is_injective_exhaustive(&self) -> bool {
        let full = Subspace::full(self.source_field(), self.source_dim());
        full.nonzero_vectors().iter().all(|x| !vec_is_zero(&self.apply(x)))
    }

    /// The matrix of `l` as a source-field linear map into the target seen
    /// as F^(n' · d), d the subfield index.
    fn expand_over_source(&self) -> Matrix {
        let fs = self.source_field();
        let (_, coords) = subfield_coordinates(&self.twist);
        let d = coords[0].len().max(1);
        let n = self.source_dim();
        let np = self.target_dim();
        let mut out = Matrix::zero(fs, n, np * d);
        for r in 0..n {
            for c in 0..np {
                let y = self.matrix.get(r, c);
                for (t, &coord) in coords[y as usize].iter().enumerate() {
                    out.set(r, c * d + t, coord);
                }
            }
        }
        out
    }

    /// Index (in canonical G_m order) of a witness m-subspace whose image
    /// span degenerates, or `None` when `l` is an m-embedding.
    ///
    /// Checking over subspaces instead of all m-element subsets is exact:
    /// for any subspace X with basis B, semilinearity gives
    /// `⟨l(X)⟩ = ⟨l(B)⟩`, so an independent m-set with dependent image
    /// exists iff the m-subspace it spans has image span of dimension < m.
    pub fn m_embedding_witness(&self, m: usize) -> Result<Option<usize>> {
        if m < 1 || m > self.source_dim().min(self.target_dim()) {
            return Err(Error::OutOfRange(format!(
                "m = {m} not in 1..=min({}, {})",
                self.source_dim(),
                self.target_dim()
            )));
        }
        if !self.is_injective() {
            return Err(Error::NotInjective);
        }
        let subs = enumerate_subspaces(self.source_field(), self.source_dim(), m)?;
        for (i, x) in subs.iter().enumerate() {
            if self.image_span(x).dim() < m {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// True iff the image of every independent m-element subset is
    /// independent. Requires `l` injective.
    pub fn is_m_embedding(&self, m: usize) -> Result<bool> {
        Ok(self.m_embedding_witness(m)?.is_none())
    }

    /// A semilinear embedding is an n-embedding of the full source space.
    pub fn is_embedding(&self) -> Result<bool> {
        self.is_m_embedding(self.source_dim())
    }

    /// Span of the image of a source subspace.
    pub fn image_span(&self, x: &Subspace) -> Subspace {
        let rows: Vec<Vec<u32>> = x.basis().rows_iter().map(|b| self.apply(b)).collect();
        if rows.is_empty() {
            return Subspace::zero(self.target_field(), self.target_dim());
        }
        Subspace::from_rows(self.target_field(), &rows)
    }

    /// The induced map `X ↦ ⟨l(X)⟩` on p-dimensional subspaces. Refuses,
    /// naming a witness, when `l` is not a p-embedding.
    pub fn induced(&self, p: usize) -> Result<GrassmannMap> {
        let domain = GrassmannGraph::shared(self.source_field(), self.source_dim(), p)?;
        let codomain = GrassmannGraph::shared(self.target_field(), self.target_dim(), p)?;
        self.induced_with(p, domain, codomain)
    }

    /// As [`SemilinearMap::induced`] with caller-provided graphs.
    pub fn induced_with(
        &self,
        p: usize,
        domain: Arc<GrassmannGraph>,
        codomain: Arc<GrassmannGraph>,
    ) -> Result<GrassmannMap> {
        if let Some(witness) = self.m_embedding_witness(p)? {
            return Err(Error::NotMEmbedding { m: p, witness });
        }
        GrassmannMap::from_fn(domain, codomain, |x| Ok(self.image_span(x)))
    }

    /// The action on projective points, defined for injective maps.
    pub fn point_map(&self) -> Result<PointMap> {
        PointMap::new(self.induced(1)?)
    }
}

/// Coordinate table of the target field as a vector space over the source
/// field through a homomorphism: returns the greedy basis and, for every
/// target element, its coordinate tuple.
fn subfield_coordinates(twist: &FieldHom) -> (Vec<u32>, Vec<Vec<u32>>) {
    let fs = twist.source();
    let ft = twist.target();
    let q = fs.order();
    let qp = ft.order();
    let mut basis: Vec<u32> = Vec::new();
    for t in 1..qp {
        let mut rows: Vec<u32> = basis.clone();
        rows.push(t);
        if spans_distinctly(twist, &rows) {
            basis.push(t);
        }
        if (q as u64).pow(basis.len() as u32) == qp as u64 {
            break;
        }
    }
    let d = basis.len();
    // enumerate all coordinate tuples once to fill the table
    let mut coords: Vec<Vec<u32>> = vec![Vec::new(); qp as usize];
    let total = (q as u64).pow(d as u32);
    for code in 0..total {
        let mut tuple = vec![0u32; d];
        let mut c = code;
        for v in tuple.iter_mut() {
            *v = (c % q as u64) as u32;
            c /= q as u64;
        }
        let mut value = 0u32;
        for (i, &a) in tuple.iter().enumerate() {
            value = ft.add(value, ft.mul(twist.apply(a), basis[i]));
        }
        coords[value as usize] = tuple;
    }
    (basis, coords)
}

/// True when all source-coefficient combinations of the candidate rows are
/// distinct, i.e. the rows are independent over the embedded source field.
fn spans_distinctly(twist: &FieldHom, elems: &[u32]) -> bool {
    let fs = twist.source();
    let ft = twist.target();
    let q = fs.order() as u64;
    let total = q.pow(elems.len() as u32);
    let mut seen = vec![false; ft.order() as usize];
    for code in 0..total {
        let mut c = code;
        let mut value = 0u32;
        for &b in elems {
            let a = (c % q) as u32;
            c /= q;
            value = ft.add(value, ft.mul(twist.apply(a), b));
        }
        if std::mem::replace(&mut seen[value as usize], true) {
            return false;
        }
    }
    true
}

/// A total map from the projective points of one space to those of another,
/// not necessarily injective. Indices follow the canonical G_1 vertex
/// order on both sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointMap(GrassmannMap);

impl PointMap {
    pub fn new(map: GrassmannMap) -> Result<PointMap> {
        if map.domain().grade() != 1 || map.codomain().grade() != 1 {
            return Err(Error::GradeMismatch);
        }
        Ok(PointMap(map))
    }

    pub fn from_fn(
        domain: Arc<GrassmannGraph>,
        codomain: Arc<GrassmannGraph>,
        f: impl FnMut(&Subspace) -> Result<Subspace>,
    ) -> Result<PointMap> {
        PointMap::new(GrassmannMap::from_fn(domain, codomain, f)?)
    }

    pub fn as_map(&self) -> &GrassmannMap {
        &self.0
    }

    pub fn domain(&self) -> &Arc<GrassmannGraph> {
        self.0.domain()
    }

    pub fn codomain(&self) -> &Arc<GrassmannGraph> {
        self.0.codomain()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0.apply(i)
    }
}

/// Recover a semilinear map from its point map.
///
/// The input must send every line of the source projective space into a
/// subset of a line of the target. The output is canonical under the
/// declared gauge: the image of `e_1` is the reduced-row-echelon
/// representative of its image point, the remaining basis representatives
/// are forced by collinearity through the pair points `e_1 + e_i` (falling
/// back to `e_j + e_i` against a fixed pivot index when an image collapses
/// onto the first direction), and the twist is read off the points
/// `e_1 + a·e_j`. The assembled map is verified against the whole point
/// table; any violated constraint is reported with its witness point.
///
/// Domains of dimension < 3 and point maps collapsing all basis points to a
/// single point are refused: too little geometry remains to pin the map.
pub fn ftpg_recover(g: &PointMap) -> Result<SemilinearMap> {
    let fs = g.domain().field().clone();
    let ft = g.codomain().field().clone();
    let n = g.domain().ambient_dim();
    if n < 3 {
        return Err(Error::RecoveryDegenerate("domain dimension must be at least 3".into()));
    }

    // line preservation
    let planes = enumerate_subspaces(&fs, n, 2)?;
    for (li, plane) in planes.iter().enumerate() {
        let rows: Vec<Vec<u32>> = subspaces_within(plane, 1)?
            .iter()
            .map(|p| {
                let i = g.domain().index_of(p).expect("point of the plane");
                g.codomain().vertex(g.apply(i)).basis().row_vec(0)
            })
            .collect();
        if Subspace::from_rows(&ft, &rows).dim() > 2 {
            return Err(Error::NotLinePreserving { witness: li });
        }
    }

    let point_index = |v: &[u32]| -> usize {
        g.domain()
            .index_of(&Subspace::from_rows(&fs, &[v.to_vec()]))
            .expect("nonzero vector spans a point")
    };
    let image_rep = |v: &[u32]| -> Vec<u32> {
        g.codomain().vertex(g.apply(point_index(v))).basis().row_vec(0)
    };
    let unit = |i: usize| -> Vec<u32> {
        let mut v = vec![0u32; n];
        v[i] = 1;
        v
    };
    let y: Vec<Vec<u32>> = (0..n).map(|i| image_rep(&unit(i))).collect();

    let independent = |a: &[u32], b: &[u32]| -> bool {
        Subspace::from_rows(&ft, &[a.to_vec(), b.to_vec()]).dim() == 2
    };

    // pivot: first basis point whose image is not collinear with y_1
    let Some(pivot) = (1..n).find(|&j| independent(&y[0], &y[j])) else {
        return Err(Error::RecoveryDegenerate(
            "all standard basis points map to a single point".into(),
        ));
    };

    // solve z = α·a + β·b with both coefficients nonzero
    let solve_pair = |a: &[u32], b: &[u32], z: &[u32], witness: usize| -> Result<(u32, u32)> {
        let m = Matrix::from_rows(&ft, &[a.to_vec(), b.to_vec()]);
        let coeffs = m.solve_left(z).ok_or(Error::RecoveryInconsistent { witness })?;
        if coeffs[0] == 0 || coeffs[1] == 0 {
            return Err(Error::RecoveryInconsistent { witness });
        }
        Ok((coeffs[0], coeffs[1]))
    };

    // scalars fixing the representatives: l(e_i) = c_i · y_i, gauge c_1 = 1
    let mut scalars = vec![0u32; n];
    scalars[0] = 1;
    for i in 1..n {
        if independent(&y[0], &y[i]) {
            let pair = vec_add(&fs, &unit(0), &unit(i));
            let z = image_rep(&pair);
            let (alpha, beta) = solve_pair(&y[0], &y[i], &z, point_index(&pair))?;
            scalars[i] = ft.div(beta, alpha);
        }
    }
    for i in 1..n {
        if scalars[i] == 0 {
            // image collinear with y_1: force through the pivot instead
            let pair = vec_add(&fs, &unit(pivot), &unit(i));
            let z = image_rep(&pair);
            let (alpha, beta) = solve_pair(&y[pivot], &y[i], &z, point_index(&pair))?;
            scalars[i] = ft.mul(scalars[pivot], ft.div(beta, alpha));
        }
    }

    // twist read off the points e_1 + a·e_pivot
    let pivot_image = vec_scale(&ft, scalars[pivot], &y[pivot]);
    let mut sigma_table = vec![0u32; fs.order() as usize];
    sigma_table[1] = 1;
    for a in 2..fs.order() {
        let point = vec_add(&fs, &unit(0), &vec_scale(&fs, a, &unit(pivot)));
        let z = image_rep(&point);
        let (alpha, beta) = solve_pair(&y[0], &pivot_image, &z, point_index(&point))?;
        sigma_table[a as usize] = ft.div(beta, alpha);
    }
    let sigma = hom_enumerate(&fs, &ft)
        .into_iter()
        .find(|h| fs.elements().all(|a| h.apply(a) == sigma_table[a as usize]))
        .ok_or(Error::RecoveryInconsistent { witness: point_index(&unit(0)) })?;

    let rows: Vec<Vec<u32>> = (0..n).map(|i| vec_scale(&ft, scalars[i], &y[i])).collect();
    let recovered = SemilinearMap::new(sigma, Matrix::from_rows(&ft, &rows))?;

    // full verification against the table
    for (i, p) in g.domain().vertices().iter().enumerate() {
        let image = recovered.apply(p.basis().row(0));
        if vec_is_zero(&image)
            || normalize_rep(&ft, &image) != g.codomain().vertex(g.apply(i)).basis().row_vec(0)
        {
            return Err(Error::RecoveryInconsistent { witness: i });
        }
    }
    Ok(recovered)
}

fn check_point_set(points: &[Subspace]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::OutOfRange("empty point set".into()));
    }
    let first = &points[0];
    for p in points {
        if p.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: p.dim() });
        }
        if p.field() != first.field() || p.ambient_dim() != first.ambient_dim() {
            return Err(Error::AmbientMismatch {
                left: first.ambient_dim(),
                right: p.ambient_dim(),
            });
        }
    }
    if (1..points.len()).any(|i| points[..i].contains(&points[i])) {
        return Err(Error::DuplicatePoints);
    }
    Ok(())
}

fn stacked_reps(points: &[Subspace]) -> Matrix {
    let rows: Vec<Vec<u32>> = points.iter().map(|p| p.basis().row_vec(0)).collect();
    Matrix::from_rows(points[0].field(), &rows)
}

/// Independence of a set of projective points: representatives are linearly
/// independent.
pub fn is_independent(points: &[Subspace]) -> Result<bool> {
    check_point_set(points)?;
    Ok(stacked_reps(points).rank() == points.len())
}

/// An m-simplex is a set of m+1 points that is dependent while every
/// m-element subset is independent.
pub fn is_simplex(points: &[Subspace]) -> Result<bool> {
    check_point_set(points)?;
    let s = points.len();
    if s < 2 {
        return Ok(false);
    }
    if stacked_reps(points).rank() == s {
        return Ok(false);
    }
    for subset in points.iter().cloned().combinations(s - 1) {
        if stacked_reps(&subset).rank() != s - 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Decide whether every permutation of the point set extends to a
/// semilinear automorphism of the ambient space.
///
/// For each permutation the solver picks a maximal independent subset B of
/// the representatives, assigns unknown nonzero scalars to the images of B,
/// and demands that the forced images of the dependent points land on the
/// right points; the search over field automorphisms and scalar vectors is
/// complete at desk scale. A solution on the span extends to the whole
/// space because the point set spans the same subspace before and after
/// the permutation.
pub fn permutations_inducible(points: &[Subspace]) -> Result<bool> {
    check_point_set(points)?;
    let s = points.len();
    if s > 6 {
        return Err(Error::BudgetExceeded { needed: s as u64, budget: 6 });
    }
    let field = points[0].field().clone();
    let q = field.order();
    let reps: Vec<Vec<u32>> = points.iter().map(|p| p.basis().row_vec(0)).collect();

    // greedy maximal independent subset
    let mut base: Vec<usize> = Vec::new();
    for i in 0..s {
        let mut rows: Vec<Vec<u32>> = base.iter().map(|&b| reps[b].clone()).collect();
        rows.push(reps[i].clone());
        if Matrix::from_rows(&field, &rows).rank() == rows.len() {
            base.push(i);
        }
    }
    let r = base.len();
    let scalar_space = (q as u64 - 1).checked_pow(r as u32).unwrap_or(u64::MAX);
    if scalar_space > 100_000 {
        return Err(Error::BudgetExceeded { needed: scalar_space, budget: 100_000 });
    }

    // coefficients of the dependent points over the base
    let base_matrix = Matrix::from_rows(
        &field,
        &base.iter().map(|&b| reps[b].clone()).collect::<Vec<_>>(),
    );
    let dependents: Vec<(usize, Vec<u32>)> = (0..s)
        .filter(|i| !base.contains(i))
        .map(|i| {
            let c = base_matrix.solve_left(&reps[i]).expect("base spans the point set");
            (i, c)
        })
        .collect();

    let autos = hom_enumerate(&field, &field);
    let parallel = |a: &[u32], b: &[u32]| -> bool {
        Subspace::from_rows(&field, &[a.to_vec(), b.to_vec()]).dim() == 1
    };

    'perms: for tau in (0..s).permutations(s) {
        // images of the base must stay independent
        let target_rows: Vec<Vec<u32>> = base.iter().map(|&b| reps[tau[b]].clone()).collect();
        if Matrix::from_rows(&field, &target_rows).rank() != r {
            return Ok(false);
        }
        for sigma in &autos {
            // iterate over all scalar vectors in (F^*)^r
            let mut lambda = vec![1u32; r];
            loop {
                let ok = dependents.iter().all(|(j, coeffs)| {
                    let mut v = vec![0u32; reps[0].len()];
                    for t in 0..r {
                        let c = field.mul(sigma.apply(coeffs[t]), lambda[t]);
                        v = vec_add(&field, &v, &vec_scale(&field, c, &target_rows[t]));
                    }
                    !vec_is_zero(&v) && parallel(&v, &reps[tau[*j]])
                });
                if ok {
                    continue 'perms;
                }
                let mut idx = 0;
                while idx < r {
                    lambda[idx] += 1;
                    if lambda[idx] < q {
                        break;
                    }
                    lambda[idx] = 1;
                    idx += 1;
                }
                if idx == r {
                    break;
                }
            }
        }
        return Ok(false);
    }
    Ok(true)
}

/// Generators of GL(n, q): the n(n-1) transvections `e_i ↦ e_i + e_j` plus
/// the diagonal map scaling `e_1` by a primitive element (the identity over
/// GF(2), where transvections already generate the group).
pub fn gl_generators(field: &Field, n: usize) -> Vec<Matrix> {
    let mut out = Vec::with_capacity(n * (n - 1) + 1);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut m = Matrix::identity(field, n);
            m.set(i, j, 1);
            out.push(m);
        }
    }
    let mut diag = Matrix::identity(field, n);
    diag.set(0, 0, field.primitive_element());
    out.push(diag);
    out
}

/// Search for a linear automorphism `u'` of the target completing the
/// square `u' ∘ l = l ∘ u` at the vector level, or prove that none exists.
///
/// Completeness: commutation at the basis vectors forces
/// `u'(l(e_i)) = l(u(e_i))` for every i, which pins `u'` on the span W of
/// the image basis; the pinned map must be well-defined (dependent image
/// vectors must transform consistently) and injective on W, and both checks
/// are decided exactly. Off W the action of `u'` is unconstrained and a
/// deterministic completion to an automorphism always exists, so a
/// consistent rank-preserving candidate is sufficient as well as
/// necessary. The commutation is re-verified on every source vector by
/// exhaustion as a guard.
pub fn gl_extension_exists(
    l: &SemilinearMap,
    u: &Matrix,
    budget: Option<u64>,
) -> Result<Option<Matrix>> {
    let budget = budget.unwrap_or(DEFAULT_EXHAUSTION_BUDGET);
    let n = l.source_dim();
    let np = l.target_dim();
    if u.rows() != n || u.cols() != n || u.field() != l.source_field() {
        return Err(Error::DimensionMismatch { expected: n, got: u.rows() });
    }
    if !u.is_invertible() {
        return Err(Error::SingularMatrix);
    }
    let space = (l.source_field().order() as u64).checked_pow(n as u32);
    match space {
        Some(s) if s <= budget => {}
        _ => return Err(Error::BudgetExceeded { needed: space.unwrap_or(u64::MAX), budget }),
    }
    let fs = l.source_field().clone();
    let ft = l.target_field().clone();

    // images of the standard basis and their prescribed targets
    let d: Vec<Vec<u32>> = l.matrix().rows_iter().map(|r| r.to_vec()).collect();
    let t: Vec<Vec<u32>> = (0..n).map(|i| l.apply(u.row(i))).collect();

    // maximal independent subset of the d_i
    let mut base: Vec<usize> = Vec::new();
    for i in 0..n {
        let mut rows: Vec<Vec<u32>> = base.iter().map(|&b| d[b].clone()).collect();
        rows.push(d[i].clone());
        if Matrix::from_rows(&ft, &rows).rank() == rows.len() {
            base.push(i);
        }
    }
    let base_matrix =
        Matrix::from_rows(&ft, &base.iter().map(|&b| d[b].clone()).collect::<Vec<_>>());
    let target_matrix =
        Matrix::from_rows(&ft, &base.iter().map(|&b| t[b].clone()).collect::<Vec<_>>());

    // dependent images must transform consistently
    for j in 0..n {
        if base.contains(&j) {
            continue;
        }
        let coeffs = base_matrix.solve_left(&d[j]).expect("base spans the images");
        if target_matrix.apply_row(&coeffs) != t[j] {
            return Ok(None);
        }
    }
    // the prescribed targets must stay independent
    if target_matrix.rank() != base.len() {
        return Ok(None);
    }

    // assemble u': base rows map to targets, a complement completes it;
    // first try the identity on the complement, then fall back to a basis
    // completing the target span
    let w = Subspace::from_spanning(&base_matrix);
    let standard_complement = |s: &Subspace| -> Vec<Vec<u32>> {
        (0..np)
            .filter(|c| !s.pivots().contains(c))
            .map(|c| {
                let mut v = vec![0u32; np];
                v[c] = 1;
                v
            })
            .collect()
    };
    let complement_rows = standard_complement(&w);
    let mut full_rows: Vec<Vec<u32>> = base.iter().map(|&b| d[b].clone()).collect();
    full_rows.extend(complement_rows.iter().cloned());
    let basis_matrix = Matrix::from_rows(&ft, &full_rows);
    debug_assert!(basis_matrix.is_invertible());

    let mut images: Vec<Vec<u32>> = base.iter().map(|&b| t[b].clone()).collect();
    images.extend(complement_rows.iter().cloned());
    let mut image_matrix = Matrix::from_rows(&ft, &images);
    if !image_matrix.is_invertible() {
        let tw = Subspace::from_spanning(&target_matrix);
        let mut images: Vec<Vec<u32>> = base.iter().map(|&b| t[b].clone()).collect();
        images.extend(standard_complement(&tw));
        image_matrix = Matrix::from_rows(&ft, &images);
    }
    let uprime = basis_matrix.inverse()?.mul(&image_matrix);
    debug_assert!(uprime.is_invertible());

    // exhaustive commutation guard
    let full = Subspace::full(&fs, n);
    for x in full.nonzero_vectors() {
        let ux = Matrix::from_rows(&fs, &[x.clone()]).mul(u).row_vec(0);
        let lhs = l.apply(&ux);
        let rhs = Matrix::from_rows(&ft, &[l.apply(&x)]).mul(&uprime).row_vec(0);
        if lhs != rhs {
            return Ok(None);
        }
    }
    Ok(Some(uprime))
}

/// Characterization of semilinear embeddings by extensions: `l` is a
/// semilinear embedding exactly when every linear automorphism of the
/// source extends through `l` to a linear automorphism of the target.
///
/// Only the generators of GL(V) are tested: extendable automorphisms are
/// closed under composition and inverse (their extensions compose), so they
/// form a subgroup, and a subgroup containing a generating set is the whole
/// group.
pub fn is_semilinear_embedding_via_extension(
    l: &SemilinearMap,
    budget: Option<u64>,
) -> Result<bool> {
    if !l.is_injective() {
        return Err(Error::NotInjective);
    }
    for u in gl_generators(l.source_field(), l.source_dim()) {
        if gl_extension_exists(l, &u, budget)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::hom_canonical;

    fn f2() -> Field {
        Field::with_default_modulus(2, 1).unwrap()
    }

    fn f4() -> Field {
        Field::with_default_modulus(2, 2).unwrap()
    }

    /// GF(2)^3 -> GF(4)^2 with rows (1,0), (0,1), (ω,ω): injective but not
    /// a 2-embedding — the independent pair {e1+e2, e3} has images (1,1)
    /// and (ω,ω) = ω·(1,1). No 2-embedding into a 2-dimensional GF(4)
    /// space exists from a 3-dimensional source: the induced point map
    /// would inject 7 points into a 5-point projective line.
    fn collapsing_map() -> SemilinearMap {
        let sigma = hom_canonical(&f2(), &f4()).unwrap();
        let m = Matrix::from_rows(&f4(), &[vec![1, 0], vec![0, 1], vec![2, 2]]);
        SemilinearMap::new(sigma, m).unwrap()
    }

    /// GF(2)^3 -> GF(8)^3 with rows (1,0,0), (0,1,0), (ω,ω²,0): injective,
    /// a 2-embedding, and not a 3-embedding — a subfield-twist witness
    /// that an m-embedding need not be an (m+1)-embedding. The seven image
    /// points are distinct on a 9-point projective line of PG(2,8) while
    /// the whole image spans only 2 dimensions.
    fn strictness_witness() -> SemilinearMap {
        let f8 = Field::with_default_modulus(2, 3).unwrap();
        let sigma = hom_canonical(&f2(), &f8).unwrap();
        let m = Matrix::from_rows(&f8, &[vec![1, 0, 0], vec![0, 1, 0], vec![2, 4, 0]]);
        SemilinearMap::new(sigma, m).unwrap()
    }

    #[test]
    fn apply_field_arithmetic() {
        let l = collapsing_map();
        assert_eq!(l.apply(&[0, 0, 0]), vec![0, 0]);
        // e1 + e3 -> (1 + ω, ω) = (ω², ω): codes (3, 2)
        assert_eq!(l.apply(&[1, 0, 1]), vec![3, 2]);
        let id = SemilinearMap::identity(&f2(), 3);
        for code in 0..8u32 {
            let v = vec![code & 1, (code >> 1) & 1, (code >> 2) & 1];
            assert_eq!(id.apply(&v), v);
        }
    }

    #[test]
    fn semilinearity_exhaustive() {
        let l = collapsing_map();
        let fs = f2();
        let ft = f4();
        let full = Subspace::full(&fs, 3);
        let mut vectors = full.nonzero_vectors();
        vectors.push(vec![0, 0, 0]);
        for x in &vectors {
            for y in &vectors {
                assert_eq!(
                    l.apply(&vec_add(&fs, x, y)),
                    vec_add(&ft, &l.apply(x), &l.apply(y))
                );
            }
            for a in fs.elements() {
                assert_eq!(
                    l.apply(&vec_scale(&fs, a, x)),
                    vec_scale(&ft, l.twist().apply(a), &l.apply(x))
                );
            }
        }
    }

    #[test]
    fn injectivity() {
        let l = collapsing_map();
        assert!(l.is_injective());
        assert!(l.is_injective_exhaustive());
        assert!(strictness_witness().is_injective());

        let zero = SemilinearMap::linear(Matrix::zero(&f2(), 3, 2));
        assert!(!zero.is_injective());

        // zero row on a basis vector
        let sigma = hom_canonical(&f2(), &f4()).unwrap();
        let m = Matrix::from_rows(&f4(), &[vec![1, 0], vec![0, 0], vec![2, 2]]);
        let bad = SemilinearMap::new(sigma, m).unwrap();
        assert!(!bad.is_injective());

        // GF(2)^3 -> GF(8)^1: injective despite a 1-dimensional target
        let f8 = Field::with_default_modulus(2, 3).unwrap();
        let sigma = hom_canonical(&f2(), &f8).unwrap();
        let m = Matrix::from_rows(&f8, &[vec![1], vec![2], vec![4]]);
        let packed = SemilinearMap::new(sigma, m).unwrap();
        assert!(packed.is_injective());
        assert!(packed.is_injective_exhaustive());
    }

    #[test]
    fn m_embedding_strictness() {
        let l = strictness_witness();
        assert!(l.is_injective());
        assert!(l.is_m_embedding(1).unwrap());
        assert!(l.is_m_embedding(2).unwrap());
        // the three rows span only 2 dimensions over GF(8)
        assert!(!l.is_m_embedding(3).unwrap());
        // m out of range
        assert!(l.is_m_embedding(4).is_err());
    }

    /// The GF(4)² map collapses an independent pair: {e1+e2, e3} has
    /// images (1,1) and ω·(1,1). Injective, yet not even a 2-embedding;
    /// asking for m = 3 exceeds min(n, n') and errors.
    #[test]
    fn collapsing_map_is_not_a_2_embedding() {
        let l = collapsing_map();
        assert!(l.is_injective());
        assert!(l.is_m_embedding(1).unwrap());
        match l.m_embedding_witness(2).unwrap() {
            Some(witness) => {
                let plane = enumerate_subspaces(&f2(), 3, 2).unwrap()[witness].clone();
                assert!(l.image_span(&plane).dim() < 2);
            }
            None => panic!("expected a degenerate plane"),
        }
        assert!(matches!(l.is_m_embedding(3), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn identity_maps_are_full_embeddings() {
        let id = SemilinearMap::identity(&f2(), 4);
        for m in 1..=4 {
            assert!(id.is_m_embedding(m).unwrap());
        }
    }

    #[test]
    fn induced_identity_on_points() {
        let id = SemilinearMap::identity(&f2(), 3);
        let map = id.induced(1).unwrap();
        for i in 0..map.domain().vertex_count() {
            assert_eq!(map.apply(i), i);
        }
    }

    #[test]
    fn induced_refusal_names_witness() {
        let l = strictness_witness();
        assert!(l.induced(2).is_ok());
        match l.induced(3) {
            Err(Error::NotMEmbedding { m: 3, witness }) => {
                // only one 3-subspace of F_2^3 exists: the whole space
                assert_eq!(witness, 0);
            }
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn induced_map_of_2k_embedding_is_isometric() {
        // a full embedding GF(2)^4 -> GF(2)^5, induced at grade 2
        let f = f2();
        let mut m = Matrix::zero(&f, 4, 5);
        for i in 0..4 {
            m.set(i, i, 1);
            m.set(i, 4, 1);
        }
        let l = SemilinearMap::linear(m);
        assert!(l.is_m_embedding(4).unwrap());
        let map = l.induced(2).unwrap();
        let (dom, cod) = (map.domain(), map.codomain());
        for i in 0..dom.vertex_count() {
            for j in 0..dom.vertex_count() {
                assert_eq!(
                    dom.distance_by_index(i, j),
                    cod.distance_by_index(map.apply(i), map.apply(j))
                );
            }
        }
    }

    #[test]
    fn ftpg_identity_recovery() {
        let id = SemilinearMap::identity(&f2(), 3);
        let g = id.point_map().unwrap();
        let rec = ftpg_recover(&g).unwrap();
        assert_eq!(rec.matrix(), id.matrix());
        assert!(rec.twist().is_identity());
    }

    #[test]
    fn ftpg_recovers_collapsing_map_twist() {
        // the point map here is not injective, yet recovery still works
        let l = collapsing_map();
        let g = l.point_map().unwrap();
        let rec = ftpg_recover(&g).unwrap();
        // the recovered twist is the unique GF(2) -> GF(4) embedding
        assert_eq!(rec.twist(), &hom_canonical(&f2(), &f4()).unwrap());
        // re-inducing reproduces the table; the map agrees up to gauge
        assert_eq!(rec.point_map().unwrap(), g);
        assert!(rec.proportional_to(&l));
    }

    #[test]
    fn ftpg_refuses_small_domains() {
        let id = SemilinearMap::identity(&f2(), 2);
        let g = id.point_map().unwrap();
        assert!(matches!(ftpg_recover(&g), Err(Error::RecoveryDegenerate(_))));
    }

    #[test]
    fn ftpg_rejects_non_line_preserving() {
        let f = f2();
        let domain = GrassmannGraph::shared(&f, 3, 1).unwrap();
        let codomain = GrassmannGraph::shared(&f, 3, 1).unwrap();
        // swap two points of the identity: some line breaks
        let mut table: Vec<usize> = (0..7).collect();
        table.swap(0, 1);
        let g = PointMap::new(
            GrassmannMap::new(Arc::clone(&domain), Arc::clone(&codomain), table).unwrap(),
        )
        .unwrap();
        assert!(matches!(ftpg_recover(&g), Err(Error::NotLinePreserving { .. })));
    }

    #[test]
    fn ftpg_handles_collinear_basis_images() {
        // e1 and e2 map into the same target direction over the subfield
        let f8 = Field::with_default_modulus(2, 3).unwrap();
        let sigma = hom_canonical(&f2(), &f8).unwrap();
        let m = Matrix::from_rows(
            &f8,
            &[vec![1, 0, 0], vec![2, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
        );
        let l = SemilinearMap::new(sigma, m).unwrap();
        assert!(l.is_injective());
        let g = l.point_map().unwrap();
        let rec = ftpg_recover(&g).unwrap();
        assert_eq!(rec.point_map().unwrap(), g);
        assert!(rec.proportional_to(&l));
    }

    #[test]
    fn simplex_and_independence() {
        let f = f2();
        let pt = |v: Vec<u32>| Subspace::from_rows(&f, &[v]);
        let basis3 = vec![pt(vec![1, 0, 0]), pt(vec![0, 1, 0]), pt(vec![0, 0, 1])];
        assert!(is_independent(&basis3).unwrap());
        assert!(!is_simplex(&basis3).unwrap());

        let mut with_sum = basis3.clone();
        with_sum.push(pt(vec![1, 1, 1]));
        assert!(!is_independent(&with_sum).unwrap());
        assert!(is_simplex(&with_sum).unwrap());

        let triangle = vec![pt(vec![1, 0, 0]), pt(vec![0, 1, 0]), pt(vec![1, 1, 0])];
        assert!(is_simplex(&triangle).unwrap());

        // dependent but not a simplex: a dependent proper subset exists
        let mixed = vec![
            pt(vec![1, 0, 0]),
            pt(vec![0, 1, 0]),
            pt(vec![1, 1, 0]),
            pt(vec![0, 0, 1]),
        ];
        assert!(!is_simplex(&mixed).unwrap());
        assert!(!is_independent(&mixed).unwrap());

        let dup = vec![pt(vec![1, 0, 0]), pt(vec![1, 0, 0])];
        assert!(matches!(is_independent(&dup), Err(Error::DuplicatePoints)));
    }

    /// Dependent sets with all-nonzero coefficients over an independent
    /// prefix are exactly the simplices; used as an oracle.
    #[test]
    fn simplex_nonzero_coefficient_characterization() {
        let f = Field::with_default_modulus(3, 1).unwrap();
        let points = enumerate_subspaces(&f, 3, 1).unwrap();
        for combo in points.iter().cloned().combinations(4) {
            let is_sx = is_simplex(&combo).unwrap();
            let mut oracle = false;
            for perm in combo.iter().cloned().permutations(4) {
                let head = Matrix::from_rows(
                    &f,
                    &perm[..3].iter().map(|p| p.basis().row_vec(0)).collect::<Vec<_>>(),
                );
                if head.rank() != 3 {
                    continue;
                }
                let coeffs = head.solve_left(&perm[3].basis().row_vec(0)).unwrap();
                if coeffs.iter().all(|&c| c != 0) {
                    oracle = true;
                    break;
                }
            }
            assert_eq!(is_sx, oracle);
        }
    }

    /// Brute-force oracle: enumerate all semilinear automorphisms and
    /// collect the permutations they induce on the point set.
    fn inducible_oracle(points: &[Subspace]) -> bool {
        let f = points[0].field().clone();
        let n = points[0].ambient_dim();
        let q = f.order() as u64;
        let total = q.pow((n * n) as u32);
        let autos = hom_enumerate(&f, &f);
        let mut seen: std::collections::HashSet<Vec<usize>> = Default::default();
        for code in 0..total {
            let mut entries = vec![0u32; n * n];
            let mut c = code;
            for e in entries.iter_mut() {
                *e = (c % q) as u32;
                c /= q;
            }
            let m = Matrix::from_flat(&f, n, n, entries);
            if !m.is_invertible() {
                continue;
            }
            for sigma in &autos {
                let l = SemilinearMap::new(sigma.clone(), m.clone()).unwrap();
                let images: Vec<Option<usize>> = points
                    .iter()
                    .map(|p| {
                        let v = l.apply(p.basis().row(0));
                        let ip = Subspace::from_rows(&f, &[v]);
                        points.iter().position(|x| *x == ip)
                    })
                    .collect();
                if images.iter().all(Option::is_some) {
                    let perm: Vec<usize> = images.into_iter().map(Option::unwrap).collect();
                    let mut sorted = perm.clone();
                    sorted.sort_unstable();
                    if sorted == (0..points.len()).collect::<Vec<_>>() {
                        seen.insert(perm);
                    }
                }
            }
        }
        let mut fact = 1usize;
        for i in 2..=points.len() {
            fact *= i;
        }
        seen.len() == fact
    }

    #[test]
    fn permutations_inducible_examples() {
        let f = f2();
        let pt = |v: Vec<u32>| Subspace::from_rows(&f, &[v]);

        // simplex in F_2^2
        let tri = vec![pt(vec![1, 0]), pt(vec![0, 1]), pt(vec![1, 1])];
        assert!(permutations_inducible(&tri).unwrap());
        assert!(inducible_oracle(&tri));

        // independent set
        let ind = vec![pt(vec![1, 0, 0]), pt(vec![0, 1, 0]), pt(vec![0, 0, 1])];
        assert!(permutations_inducible(&ind).unwrap());

        // neither independent nor a simplex
        let bad = vec![
            pt(vec![1, 0, 0]),
            pt(vec![0, 1, 0]),
            pt(vec![1, 1, 0]),
            pt(vec![0, 0, 1]),
        ];
        assert!(!permutations_inducible(&bad).unwrap());
        assert!(!inducible_oracle(&bad));
    }

    #[test]
    fn permutations_inducible_matches_oracle_f3() {
        let f = Field::with_default_modulus(3, 1).unwrap();
        let points = enumerate_subspaces(&f, 2, 1).unwrap();
        for size in 2..=3usize {
            for combo in points.iter().cloned().combinations(size) {
                assert_eq!(
                    permutations_inducible(&combo).unwrap(),
                    inducible_oracle(&combo),
                    "points {combo:?}"
                );
            }
        }
    }

    fn gl_order(n: u32, q: u64) -> u64 {
        let qn = q.pow(n);
        (0..n).map(|i| qn - q.pow(i)).product()
    }

    #[test]
    fn generators_generate_gl() {
        for (n, q) in [(2usize, 2u32), (2, 3), (3, 2)] {
            let f = Field::of_order(q).unwrap();
            let gens = gl_generators(&f, n);
            let id = Matrix::identity(&f, n);
            let mut seen = std::collections::HashSet::new();
            seen.insert(id.clone());
            let mut frontier = vec![id];
            while let Some(m) = frontier.pop() {
                for g in &gens {
                    let next = m.mul(g);
                    if seen.insert(next.clone()) {
                        frontier.push(next);
                    }
                }
            }
            assert_eq!(seen.len() as u64, gl_order(n as u32, q as u64), "GL({n},{q})");
        }
    }

    #[test]
    fn extension_exists_for_full_embedding() {
        // GF(2)^3 -> GF(2)^4 coordinate inclusion: every u in GL(3,2) extends
        let f = f2();
        let mut m = Matrix::zero(&f, 3, 4);
        for i in 0..3 {
            m.set(i, i, 1);
        }
        let l = SemilinearMap::linear(m);
        assert!(l.is_embedding().unwrap());

        // exhaust all of GL(3,2), not only the generators
        let mut checked = 0;
        for code in 0..(1u32 << 9) {
            let entries: Vec<u32> = (0..9).map(|b| (code >> b) & 1).collect();
            let u = Matrix::from_flat(&f, 3, 3, entries);
            if !u.is_invertible() {
                continue;
            }
            checked += 1;
            let ext = gl_extension_exists(&l, &u, None).unwrap();
            assert!(ext.is_some(), "no extension for {u:?}");
        }
        assert_eq!(checked, 168);
        assert!(is_semilinear_embedding_via_extension(&l, None).unwrap());
    }

    #[test]
    fn extension_identity_case() {
        let l = collapsing_map();
        let id = Matrix::identity(&f2(), 3);
        let ext = gl_extension_exists(&l, &id, None).unwrap().unwrap();
        assert_eq!(ext, Matrix::identity(&f4(), 2));
    }

    #[test]
    fn extension_fails_for_non_embedding() {
        // exhaust GL(3,2) against both non-embedding maps
        for l in [collapsing_map(), strictness_witness()] {
            assert!(!is_semilinear_embedding_via_extension(&l, None).unwrap());
            let mut failures = 0;
            for code in 0..(1u32 << 9) {
                let entries: Vec<u32> = (0..9).map(|b| (code >> b) & 1).collect();
                let u = Matrix::from_flat(&f2(), 3, 3, entries);
                if !u.is_invertible() {
                    continue;
                }
                if gl_extension_exists(&l, &u, None).unwrap().is_none() {
                    failures += 1;
                }
            }
            assert!(failures > 0, "{l:?} should have a non-extendable automorphism");
        }
    }

    #[test]
    fn extendable_automorphisms_form_a_subgroup() {
        let f = f2();
        let mut m = Matrix::zero(&f, 3, 4);
        for i in 0..3 {
            m.set(i, i, 1);
            m.set(i, 3, 1);
        }
        let l = SemilinearMap::linear(m);
        let gens = gl_generators(&f, 3);
        for u1 in &gens {
            for u2 in &gens {
                let e1 = gl_extension_exists(&l, u1, None).unwrap().unwrap();
                let e2 = gl_extension_exists(&l, u2, None).unwrap().unwrap();
                // the composite extensions extend the composite
                let u12 = u1.mul(u2);
                let e12 = e1.mul(&e2);
                let full = Subspace::full(&f, 3);
                for x in full.nonzero_vectors() {
                    let lhs =
                        l.apply(&Matrix::from_rows(&f, &[x.clone()]).mul(&u12).row_vec(0));
                    let rhs = Matrix::from_rows(l.target_field(), &[l.apply(&x)])
                        .mul(&e12)
                        .row_vec(0);
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}
