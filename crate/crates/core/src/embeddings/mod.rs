//! Embeddings of one Grassmann graph in another, handled as explicit
//! vertex tables: the verifier, the type-A/type-B/balanced constructors,
//! the descent to lower grades, the decomposer recovering the inducing
//! semilinear map, duality transforms, the contragredient, and the
//! rigidity checker.

mod rigidity;

pub use rigidity::{check_l_rigidity, RigidityReport};

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf::{hom_enumerate, Field};
use crate::grassmann::{enumerate_subspaces, GrassmannGraph, GrassmannMap};
use crate::linalg::{Matrix, QuotientStructure, Subspace};
use crate::semilinear::{ftpg_recover, PointMap, SemilinearMap};

/// Cap on recorded violating pairs.
const MAX_WITNESSES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmbeddingType {
    A,
    B,
    NotAnEmbedding,
}

impl std::fmt::Display for EmbeddingType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EmbeddingType::A => write!(f, "A"),
            EmbeddingType::B => write!(f, "B"),
            EmbeddingType::NotAnEmbedding => write!(f, "none"),
        }
    }
}

/// Everything the verifier establishes about a map in one pass.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub injective: bool,
    /// adjacent vertices have adjacent images
    pub adjacency_forward: bool,
    /// vertices with adjacent images are adjacent
    pub adjacency_backward: bool,
    pub isometric: bool,
    pub embedding_type: EmbeddingType,
    /// informational: the two graphs live over different fields
    pub cross_field: bool,
    /// violating vertex pairs, capped
    pub witnesses: Vec<(usize, usize)>,
}

impl VerificationReport {
    /// Injective, adjacency-preserving in both directions, and
    /// distance-preserving.
    pub fn is_isometric_embedding(&self) -> bool {
        self.injective && self.adjacency_forward && self.adjacency_backward && self.isometric
    }
}

/// Verify a Grassmann-graph map: injectivity, the two adjacency directions,
/// isometry (by the distance formula on both sides), and the type
/// classification checked globally against every star and every top.
pub fn verify(f: &GrassmannMap) -> VerificationReport {
    let dom = f.domain();
    let cod = f.codomain();
    let n = dom.vertex_count();

    let injective = f.is_injective();

    struct PairScan {
        forward: bool,
        backward: bool,
        isometric: bool,
        witnesses: Vec<(usize, usize)>,
    }

    let scans: Vec<PairScan> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut scan =
                PairScan { forward: true, backward: true, isometric: true, witnesses: vec![] };
            for j in i + 1..n {
                let dd = dom.distance_by_index(i, j);
                let dc = cod.distance_by_index(f.apply(i), f.apply(j));
                let mut bad = false;
                if dd == 1 && dc != 1 {
                    scan.forward = false;
                    bad = true;
                }
                if dc == 1 && dd != 1 {
                    scan.backward = false;
                    bad = true;
                }
                if dd != dc {
                    scan.isometric = false;
                    bad = true;
                }
                if bad && scan.witnesses.len() < MAX_WITNESSES {
                    scan.witnesses.push((i, j));
                }
            }
            scan
        })
        .collect();

    let mut adjacency_forward = true;
    let mut adjacency_backward = true;
    let mut isometric = true;
    let mut witnesses = Vec::new();
    for scan in scans {
        adjacency_forward &= scan.forward;
        adjacency_backward &= scan.backward;
        isometric &= scan.isometric;
        for w in scan.witnesses {
            if witnesses.len() < MAX_WITNESSES {
                witnesses.push(w);
            }
        }
    }

    let embedding_type = if injective && adjacency_forward && adjacency_backward {
        classify(f)
    } else {
        EmbeddingType::NotAnEmbedding
    };

    VerificationReport {
        injective,
        adjacency_forward,
        adjacency_backward,
        isometric,
        embedding_type,
        cross_field: dom.field() != cod.field(),
        witnesses,
    }
}

/// Whether the image set lies in a star (all members share a (k'-1)-space)
/// and/or in a top (the joint span fits in a (k'+1)-space).
fn image_clique_flags(f: &GrassmannMap, members: &[usize]) -> (bool, bool) {
    let cod = f.codomain();
    let kp = cod.grade();
    let images: Vec<&Subspace> = members.iter().map(|&i| cod.vertex(f.apply(i))).collect();
    let mut inter = images[0].clone();
    let mut sum = images[0].clone();
    for im in &images[1..] {
        if inter.dim() + 1 >= kp {
            inter = inter.intersection(im).expect("same codomain");
        }
        if sum.dim() <= kp + 1 {
            sum = sum.sum(im).expect("same codomain");
        }
    }
    (inter.dim() + 1 >= kp, sum.dim() <= kp + 1)
}

/// Global type classification: every star image must sit in one kind of
/// maximal clique and every top image in the other, consistently.
fn classify(f: &GrassmannMap) -> EmbeddingType {
    let dom = f.domain();
    let field = dom.field();
    let (n, k) = (dom.ambient_dim(), dom.grade());

    let mut stars_in_star = true;
    let mut stars_in_top = true;
    for center in enumerate_subspaces(field, n, k - 1).expect("desk-scale enumeration") {
        let members = dom.star(&center).expect("valid star center");
        let (in_star, in_top) = image_clique_flags(f, &members);
        stars_in_star &= in_star;
        stars_in_top &= in_top;
        if !stars_in_star && !stars_in_top {
            return EmbeddingType::NotAnEmbedding;
        }
    }
    let mut tops_in_star = true;
    let mut tops_in_top = true;
    for center in enumerate_subspaces(field, n, k + 1).expect("desk-scale enumeration") {
        let members = dom.top(&center).expect("valid top center");
        let (in_star, in_top) = image_clique_flags(f, &members);
        tops_in_star &= in_star;
        tops_in_top &= in_top;
        if !tops_in_star && !tops_in_top {
            return EmbeddingType::NotAnEmbedding;
        }
    }

    if stars_in_star && tops_in_top {
        EmbeddingType::A
    } else if stars_in_top && tops_in_star {
        EmbeddingType::B
    } else {
        EmbeddingType::NotAnEmbedding
    }
}

/// Type-A constructor: given S in V' of dimension k'-k and a semilinear
/// (2k)-embedding `l` of V into V'/S (in quotient coordinates), build
/// `X ↦ π(⟨l(X)⟩)`, the k'-subspace of V' over ⟨l(X)⟩.
pub fn construct_type_a(s: &Subspace, l: &SemilinearMap, k: usize) -> Result<GrassmannMap> {
    let n = l.source_dim();
    let np = s.ambient_dim();
    let kp = k + s.dim();
    if l.target_field() != s.field() {
        return Err(Error::FieldMismatch);
    }
    let quot = QuotientStructure::new(s);
    if l.target_dim() != quot.quotient_dim() {
        return Err(Error::DimensionMismatch {
            expected: quot.quotient_dim(),
            got: l.target_dim(),
        });
    }
    if k > kp || k > n - k || k > np - kp {
        return Err(Error::OutOfRange(format!(
            "need k ≤ min(k', n-k, n'-k'): k={k} k'={kp} n={n} n'={np}"
        )));
    }
    if let Some(witness) = l.m_embedding_witness(2 * k)? {
        return Err(Error::NotMEmbedding { m: 2 * k, witness });
    }
    let domain = GrassmannGraph::shared(l.source_field(), n, k)?;
    let codomain = GrassmannGraph::shared(s.field(), np, kp)?;
    GrassmannMap::from_fn(domain, codomain, |x| Ok(quot.lift_subspace(&l.image_span(x))))
}

/// Type-B constructor: given U in V' of dimension k'+k and a semilinear
/// (2k)-embedding `v` of V into U* (coordinates dual to the echelon basis
/// of U), build `X ↦ annihilator of ⟨v(X)⟩ inside U`.
pub fn construct_type_b(u: &Subspace, v: &SemilinearMap, k: usize) -> Result<GrassmannMap> {
    let n = v.source_dim();
    let np = u.ambient_dim();
    let m = u.dim();
    if m < k + 1 {
        return Err(Error::DimensionMismatch { expected: k + 1, got: m });
    }
    let kp = m - k;
    if v.target_field() != u.field() {
        return Err(Error::FieldMismatch);
    }
    if v.target_dim() != m {
        return Err(Error::DimensionMismatch { expected: m, got: v.target_dim() });
    }
    if k > kp || k > n - k || k + kp > np {
        return Err(Error::OutOfRange(format!(
            "need k ≤ min(k', n-k) and k+k' ≤ n': k={k} k'={kp} n={n} n'={np}"
        )));
    }
    if let Some(witness) = v.m_embedding_witness(2 * k)? {
        return Err(Error::NotMEmbedding { m: 2 * k, witness });
    }
    let domain = GrassmannGraph::shared(v.source_field(), n, k)?;
    let codomain = GrassmannGraph::shared(u.field(), np, kp)?;
    GrassmannMap::from_fn(domain, codomain, |x| {
        // functionals vanishing on the image span, expressed inside U
        let span = v.image_span(x);
        let kernel = span.basis().kernel();
        Ok(Subspace::from_spanning(&kernel.mul(u.basis())))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BalancedFlavor {
    /// semilinear embedding of V into U/S
    Quotient,
    /// semilinear embedding of V into (U/S)*
    DualQuotient,
}

/// Balanced constructor for n = 2k: S ⊂ U incident with dim S = k'-k and
/// dim U = k'+k, and `w` a semilinear embedding of V into U/S (quotient
/// flavor) or into (U/S)* (dual-quotient flavor). The image lies inside
/// the segment [S, U].
pub fn construct_balanced(
    s: &Subspace,
    u: &Subspace,
    w: &SemilinearMap,
    flavor: BalancedFlavor,
    k: usize,
) -> Result<GrassmannMap> {
    let n = w.source_dim();
    if n != 2 * k {
        return Err(Error::OutOfRange(format!("balanced constructor needs n = 2k, n={n} k={k}")));
    }
    if !u.contains(s) {
        return Err(Error::NotIncident);
    }
    if u.dim() != s.dim() + 2 * k {
        return Err(Error::DimensionMismatch { expected: s.dim() + 2 * k, got: u.dim() });
    }
    if w.target_dim() != 2 * k {
        return Err(Error::DimensionMismatch { expected: 2 * k, got: w.target_dim() });
    }
    let quot = QuotientStructure::new(s);
    let ubar = quot.project_subspace(u);
    debug_assert_eq!(ubar.dim(), 2 * k);
    match flavor {
        BalancedFlavor::Quotient => {
            // include U/S into V'/S and fall through to the type-A path
            let included = SemilinearMap::new(w.twist().clone(), w.matrix().mul(ubar.basis()))?;
            construct_type_a(s, &included, k)
        }
        BalancedFlavor::DualQuotient => {
            if let Some(witness) = w.m_embedding_witness(2 * k)? {
                return Err(Error::NotMEmbedding { m: 2 * k, witness });
            }
            let domain = GrassmannGraph::shared(w.source_field(), n, k)?;
            let codomain =
                GrassmannGraph::shared(s.field(), s.ambient_dim(), s.dim() + k)?;
            GrassmannMap::from_fn(domain, codomain, |x| {
                // annihilator of the image span inside U/S, lifted to V'
                let span = w.image_span(x);
                let ann_in_ubar = Subspace::from_spanning(&span.basis().kernel().mul(ubar.basis()));
                Ok(quot.lift_subspace(&ann_in_ubar))
            })
        }
    }
}

/// Post-compose with the codomain annihilator: Γ_k(V) → Γ_{n'-k'}(V'*).
/// Preserves isometry and flips the type.
pub fn dualize_codomain(f: &GrassmannMap) -> Result<GrassmannMap> {
    f.compose(&f.codomain().dual_isomorphism()?)
}

/// Pre-compose with the domain annihilator: Γ_{n-k}(V*) → Γ_{k'}(V'),
/// `X ↦ f(X^0)`. Preserves isometry and flips the type.
pub fn dualize_domain(f: &GrassmannMap) -> Result<GrassmannMap> {
    let dom = f.domain();
    let dual_domain =
        GrassmannGraph::shared(dom.field(), dom.ambient_dim(), dom.ambient_dim() - dom.grade())?;
    let table = dual_domain
        .vertices()
        .iter()
        .map(|x| {
            let i = dom.index_of(&x.annihilator()).expect("annihilator is a domain vertex");
            f.apply(i)
        })
        .collect();
    GrassmannMap::new(dual_domain, Arc::clone(f.codomain()), table)
}

/// The contragredient of an invertible matrix: the inverse transpose. It
/// maps the annihilator of S to the annihilator of u(S) for every S.
pub fn contragredient(u: &Matrix) -> Result<Matrix> {
    Ok(u.inverse()?.transpose())
}

/// One descent step on a type-A isometric embedding: the image of the star
/// of X determines a common (k'-1)-subspace, and mapping X there is again
/// a type-A isometric embedding one grade down.
fn descend_step(f: &GrassmannMap, full_star_validation: bool) -> Result<GrassmannMap> {
    let dom = f.domain();
    let cod = f.codomain();
    let (k, kp) = (dom.grade(), cod.grade());
    if k < 1 || kp < 1 {
        return Err(Error::OutOfRange("cannot descend below grade 1".into()));
    }
    let lower_domain = GrassmannGraph::shared(dom.field(), dom.ambient_dim(), k - 1)?;
    let lower_codomain = GrassmannGraph::shared(cod.field(), cod.ambient_dim(), kp - 1)?;
    let mut table = Vec::with_capacity(lower_domain.vertex_count());
    for (xi, x) in lower_domain.vertices().iter().enumerate() {
        let star = dom.star(x)?;
        let mut common: Option<Subspace> = None;
        for &y in &star {
            let image = cod.vertex(f.apply(y));
            common = Some(match common {
                None => image.clone(),
                Some(c) => c.intersection(image)?,
            });
            if !full_star_validation {
                if let Some(c) = &common {
                    if c.dim() == kp - 1 {
                        break;
                    }
                }
            }
        }
        let common = common.expect("stars are non-empty");
        if common.dim() != kp - 1 {
            return Err(Error::DescendFailed { star: xi });
        }
        table.push(lower_codomain.index_of(&common).expect("canonical vertex"));
    }
    GrassmannMap::new(lower_domain, lower_codomain, table)
}

/// Descend a type-A isometric embedding by the given number of grades,
/// re-verifying the isometric type-A property after every step. With
/// `full_star_validation` the whole star is intersected even after the
/// target dimension is reached; otherwise the intersection stops early.
pub fn descend(
    f: &GrassmannMap,
    steps: usize,
    full_star_validation: bool,
) -> Result<GrassmannMap> {
    let (n, k) = (f.domain().ambient_dim(), f.domain().grade());
    if k > n - k {
        return Err(Error::OutOfRange("descent requires k ≤ n-k".into()));
    }
    if steps >= k {
        return Err(Error::OutOfRange(format!("cannot descend {steps} steps from grade {k}")));
    }
    let report = verify(f);
    if !report.is_isometric_embedding() {
        return Err(Error::NotIsometric);
    }
    if report.embedding_type != EmbeddingType::A {
        return Err(Error::WrongEmbeddingType);
    }
    let mut current = f.clone();
    for _ in 0..steps {
        let lower = descend_step(&current, full_star_validation)?;
        let report = verify(&lower);
        if !report.is_isometric_embedding() {
            return Err(Error::NotIsometric);
        }
        if report.embedding_type != EmbeddingType::A {
            return Err(Error::WrongEmbeddingType);
        }
        current = lower;
    }
    Ok(current)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecompositionKind {
    TypeA,
    TypeB,
}

/// The recovered data inducing an isometric embedding: S and l: V → V'/S
/// for type A, U and v: V → U* for type B. Re-running the matching
/// constructor reproduces the original table exactly.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub kind: DecompositionKind,
    /// S (dimension k'-k) for type A, U (dimension k'+k) for type B.
    pub space: Subspace,
    /// l: V → V'/S in quotient coordinates, or v: V → U* in coordinates
    /// dual to the echelon basis of U.
    pub inner: SemilinearMap,
    /// grade of the decomposed embedding's domain
    pub grade: usize,
    /// for n = 2k both parameters exist and are incident: (S, U)
    pub incident_pair: Option<(Subspace, Subspace)>,
}

impl Decomposition {
    /// Rebuild the embedding from the recovered data.
    pub fn reconstruct(&self) -> Result<GrassmannMap> {
        match self.kind {
            DecompositionKind::TypeA => construct_type_a(&self.space, &self.inner, self.grade),
            DecompositionKind::TypeB => construct_type_b(&self.space, &self.inner, self.grade),
        }
    }
}

/// Decompose an isometric embedding into its inducing semilinear data.
///
/// Requires k ≤ n-k; for k > n-k dualize the domain first (see
/// [`dualize_domain`]). The type-A path descends to the point map, takes
/// the common subspace S of all point images, recovers l on V'/S, and
/// checks the reconstruction reproduces the input table. The type-B path
/// conjugates by the codomain annihilator, runs the type-A path, and
/// translates the result back to (U, v).
pub fn decompose(f: &GrassmannMap) -> Result<Decomposition> {
    let (n, k) = (f.domain().ambient_dim(), f.domain().grade());
    if k > n - k {
        return Err(Error::OutOfRange(
            "decomposition requires k ≤ n-k; dualize the domain first".into(),
        ));
    }
    let report = verify(f);
    if !report.is_isometric_embedding() {
        return Err(Error::NotIsometric);
    }
    match report.embedding_type {
        EmbeddingType::A => decompose_type_a(f),
        EmbeddingType::B => {
            let dual = dualize_codomain(f)?;
            let da = decompose_type_a(&dual)?;
            translate_dual_decomposition(f, da)
        }
        EmbeddingType::NotAnEmbedding => Err(Error::WrongEmbeddingType),
    }
}

fn decompose_type_a(f: &GrassmannMap) -> Result<Decomposition> {
    let (n, k) = (f.domain().ambient_dim(), f.domain().grade());
    let kp = f.codomain().grade();
    let f1 = if k > 1 { descend(f, k - 1, false)? } else { f.clone() };

    // S: the common part of all point images
    let mut common: Option<Subspace> = None;
    for i in 0..f1.domain().vertex_count() {
        let image = f1.codomain().vertex(f1.apply(i));
        common = Some(match common {
            None => image.clone(),
            Some(c) => c.intersection(image)?,
        });
    }
    let s = common.expect("point graphs are non-empty");
    if s.dim() != kp - k {
        return Err(Error::DecompositionFailed { stage: "star-center" });
    }

    // point map into the projective space of V'/S
    let quot = QuotientStructure::new(&s);
    let quotient_points =
        GrassmannGraph::shared(f.codomain().field(), quot.quotient_dim(), 1)?;
    let g = PointMap::from_fn(
        Arc::clone(f1.domain()),
        quotient_points,
        |p| {
            let image = f1.apply_subspace(p)?;
            let projected = quot.project_subspace(image);
            if projected.dim() != 1 {
                return Err(Error::DecompositionFailed { stage: "point-projection" });
            }
            Ok(projected)
        },
    )?;

    let l = ftpg_recover(&g)?;
    if l.m_embedding_witness(2 * k)?.is_some() {
        return Err(Error::DecompositionFailed { stage: "2k-embedding" });
    }

    let rebuilt = construct_type_a(&s, &l, k)?;
    if rebuilt.table() != f.table() {
        return Err(Error::DecompositionFailed { stage: "reconstruction" });
    }

    let incident_pair = (n == 2 * k)
        .then(|| {
            let image = l.image_span(&Subspace::full(l.source_field(), n));
            let u = quot.lift_subspace(&image);
            (s.clone(), u)
        })
        .filter(|(s, u)| u.dim() == s.dim() + 2 * k);

    Ok(Decomposition {
        kind: DecompositionKind::TypeA,
        space: s,
        inner: l,
        grade: k,
        incident_pair,
    })
}

/// Turn the type-A decomposition of the codomain-dualized map back into
/// type-B data for the original: U is the annihilator of S', and v is l'
/// re-expressed through the isomorphism V'*/S' ≅ U*.
fn translate_dual_decomposition(
    f: &GrassmannMap,
    da: Decomposition,
) -> Result<Decomposition> {
    let k = da.grade;
    let s_dual = &da.space;
    let u = s_dual.annihilator();
    let quot = QuotientStructure::new(s_dual);
    // functional coordinates: class of φ ↦ (φ(u_1), .., φ(u_m))
    let functional_to_u = quot.complement_basis().mul(&u.basis().transpose());
    let v = SemilinearMap::new(
        da.inner.twist().clone(),
        da.inner.matrix().mul(&functional_to_u),
    )?;
    let rebuilt = construct_type_b(&u, &v, k)?;
    if rebuilt.table() != f.table() {
        return Err(Error::DecompositionFailed { stage: "dual-reconstruction" });
    }
    let incident_pair = da
        .incident_pair
        .map(|(sd, ud)| (ud.annihilator(), sd.annihilator()))
        .filter(|(s, u2)| u2.contains(s));
    Ok(Decomposition {
        kind: DecompositionKind::TypeB,
        space: u,
        inner: v,
        grade: k,
        incident_pair,
    })
}

/// Arithmetic feasibility of embedding Γ_k(F_q^n) into Γ_{k'}(F_{q'}^{n'}).
#[derive(Clone, Copy, Debug)]
pub struct FeasibilityReport {
    /// necessary for any isometric embedding: the domain diameter fits
    pub diameter_condition: bool,
    /// dimension conditions of the rigid type-A description
    pub type_a_rigid_condition: bool,
    /// dimension conditions of the rigid type-B description
    pub type_b_rigid_condition: bool,
    /// a field homomorphism q → q' exists
    pub field_hom_exists: bool,
}

/// Check the arithmetic conditions. Boundary grades (k ∈ {1, n-1}) are
/// rejected: those Grassmann graphs are complete and carry no structure.
pub fn feasibility(
    q: u32,
    n: usize,
    k: usize,
    q2: u32,
    n2: usize,
    k2: usize,
) -> Result<FeasibilityReport> {
    if k <= 1 || k >= n - 1 {
        return Err(Error::OutOfRange(format!("need 1 < k < n-1: k={k} n={n}")));
    }
    if k2 <= 1 || k2 >= n2 - 1 {
        return Err(Error::OutOfRange(format!("need 1 < k' < n'-1: k'={k2} n'={n2}")));
    }
    let f = Field::of_order(q)?;
    let f2 = Field::of_order(q2)?;
    Ok(FeasibilityReport {
        diameter_condition: k.min(n - k) <= k2.min(n2 - k2),
        type_a_rigid_condition: k <= k2 && n - k <= n2 - k2,
        type_b_rigid_condition: n <= k + k2 && k + k2 <= n2,
        field_hom_exists: !hom_enumerate(&f, &f2).is_empty(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    fn f2() -> Field {
        Field::with_default_modulus(2, 1).unwrap()
    }

    /// S = first 1-subspace of F_2^6 and l = coordinate inclusion of F_2^4
    /// into the 5-dimensional quotient.
    fn sample_type_a() -> (Subspace, SemilinearMap, GrassmannMap) {
        let f = f2();
        let s = enumerate_subspaces(&f, 6, 1).unwrap()[0].clone();
        let mut m = Matrix::zero(&f, 4, 5);
        for i in 0..4 {
            m.set(i, i, 1);
        }
        let l = SemilinearMap::linear(m);
        let map = construct_type_a(&s, &l, 2).unwrap();
        (s, l, map)
    }

    fn sample_type_b() -> (Subspace, SemilinearMap, GrassmannMap) {
        let f = f2();
        let u = enumerate_subspaces(&f, 6, 5).unwrap()[0].clone();
        let mut m = Matrix::zero(&f, 4, 5);
        for i in 0..4 {
            m.set(i, i, 1);
            m.set(i, 4, 1);
        }
        let v = SemilinearMap::linear(m);
        let map = construct_type_b(&u, &v, 2).unwrap();
        (u, v, map)
    }

    #[test]
    fn identity_is_isometric_type_a() {
        let f = f2();
        let g = GrassmannGraph::shared(&f, 4, 2).unwrap();
        let id = GrassmannMap::identity(&g);
        let report = verify(&id);
        assert!(report.is_isometric_embedding());
        assert_eq!(report.embedding_type, EmbeddingType::A);
        assert!(!report.cross_field);
        assert!(report.witnesses.is_empty());
    }

    #[test]
    fn dual_isomorphism_is_isometric_type_b() {
        let f = f2();
        let g = GrassmannGraph::shared(&f, 4, 2).unwrap();
        let dual = g.dual_isomorphism().unwrap();
        let report = verify(&dual);
        assert!(report.is_isometric_embedding());
        assert_eq!(report.embedding_type, EmbeddingType::B);
    }

    #[test]
    fn constant_map_is_not_an_embedding() {
        let f = f2();
        let g = GrassmannGraph::shared(&f, 4, 2).unwrap();
        let table = vec![0; g.vertex_count()];
        let c = GrassmannMap::new(Arc::clone(&g), Arc::clone(&g), table).unwrap();
        let report = verify(&c);
        assert!(!report.injective);
        assert_eq!(report.embedding_type, EmbeddingType::NotAnEmbedding);
        assert!(!report.witnesses.is_empty());
    }

    #[test]
    fn construct_type_a_is_isometric_type_a() {
        let (s, _, map) = sample_type_a();
        assert_eq!(map.codomain().grade(), 3);
        assert_eq!(map.codomain().ambient_dim(), 6);
        let report = verify(&map);
        assert!(report.is_isometric_embedding());
        assert_eq!(report.embedding_type, EmbeddingType::A);
        // every image vertex contains S
        for i in 0..map.domain().vertex_count() {
            assert!(map.codomain().vertex(map.apply(i)).contains(&s));
        }
    }

    #[test]
    fn construct_type_a_with_zero_s_is_induced_map() {
        let f = f2();
        let s0 = Subspace::zero(&f, 5);
        let mut m = Matrix::zero(&f, 4, 5);
        for i in 0..4 {
            m.set(i, i, 1);
        }
        let l = SemilinearMap::linear(m);
        let via_a = construct_type_a(&s0, &l, 2).unwrap();
        let induced = l.induced(2).unwrap();
        assert_eq!(via_a.table(), induced.table());
    }

    #[test]
    fn construct_type_b_is_isometric_type_b() {
        let (u, _, map) = sample_type_b();
        let report = verify(&map);
        assert!(report.is_isometric_embedding());
        assert_eq!(report.embedding_type, EmbeddingType::B);
        // all image vertices lie inside U
        for i in 0..map.domain().vertex_count() {
            assert!(u.contains(map.codomain().vertex(map.apply(i))));
        }
    }

    #[test]
    fn dualize_codomain_flips_type_and_preserves_isometry() {
        let (_, _, a) = sample_type_a();
        let ad = dualize_codomain(&a).unwrap();
        let report = verify(&ad);
        assert!(report.is_isometric_embedding());
        assert_eq!(report.embedding_type, EmbeddingType::B);

        let (_, _, b) = sample_type_b();
        let bd = dualize_codomain(&b).unwrap();
        let report = verify(&bd);
        assert!(report.is_isometric_embedding());
        assert_eq!(report.embedding_type, EmbeddingType::A);

        // double dualization is the identity transform
        let add = dualize_codomain(&ad).unwrap();
        assert_eq!(add.table(), a.table());
    }

    #[test]
    fn dualize_domain_flips_type() {
        let (_, _, a) = sample_type_a();
        let ad = dualize_domain(&a).unwrap();
        assert_eq!(ad.domain().grade(), 2);
        let report = verify(&ad);
        assert!(report.is_isometric_embedding());
        assert_eq!(report.embedding_type, EmbeddingType::B);
    }

    #[test]
    fn contragredient_examples_and_equivariance() {
        let f = f2();
        let id = Matrix::identity(&f, 4);
        assert_eq!(contragredient(&id).unwrap(), id);

        // permutation matrices are their own contragredients
        let mut p = Matrix::zero(&f, 4, 4);
        p.set(0, 2, 1);
        p.set(1, 0, 1);
        p.set(2, 3, 1);
        p.set(3, 1, 1);
        assert_eq!(contragredient(&p).unwrap(), p);

        let singular = Matrix::zero(&f, 4, 4);
        assert!(contragredient(&singular).is_err());

        // equivariance on a few matrices across every subspace of F_2^4
        let u = Matrix::from_rows(
            &f,
            &[vec![1, 1, 0, 0], vec![0, 1, 0, 0], vec![0, 1, 1, 1], vec![1, 0, 0, 1]],
        );
        assert!(u.is_invertible());
        let ucheck = contragredient(&u).unwrap();
        for k in 0..=4usize {
            for s in enumerate_subspaces(&f, 4, k).unwrap() {
                let lhs = Subspace::from_spanning(&s.annihilator().basis().mul(&ucheck));
                let rhs = Subspace::from_spanning(&s.basis().mul(&u)).annihilator();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn descend_identity_is_identity() {
        let f = f2();
        let g = GrassmannGraph::shared(&f, 4, 2).unwrap();
        let id = GrassmannMap::identity(&g);
        let down = descend(&id, 1, true).unwrap();
        for i in 0..down.domain().vertex_count() {
            assert_eq!(down.apply(i), i);
        }
    }

    #[test]
    fn descend_preserves_top_containment() {
        // f_{i-1}(⟨Y]) ⊆ ⟨f_i(Y)] for every Y one grade up
        let (_, _, map) = sample_type_a();
        let down = descend(&map, 1, true).unwrap();
        let dom = map.domain();
        for (yi, y) in dom.vertices().iter().enumerate() {
            let fy = map.codomain().vertex(map.apply(yi));
            for xi in down.domain().vertices().iter().positions(|x| y.contains(x)) {
                let fx = down.codomain().vertex(down.apply(xi));
                assert!(fy.contains(fx));
            }
        }
    }

    #[test]
    fn decompose_type_a_roundtrip() {
        let (s, l, map) = sample_type_a();
        let dec = decompose(&map).unwrap();
        assert_eq!(dec.kind, DecompositionKind::TypeA);
        assert_eq!(dec.space, s);
        assert!(dec.inner.proportional_to(&l));
        assert_eq!(dec.reconstruct().unwrap().table(), map.table());
        // n = 2k: the incident pair exists
        let (ps, pu) = dec.incident_pair.expect("n = 2k");
        assert!(pu.contains(&ps));
        assert_eq!(ps.dim(), 1);
        assert_eq!(pu.dim(), 5);
    }

    #[test]
    fn decompose_type_b_roundtrip() {
        let (u, v, map) = sample_type_b();
        let dec = decompose(&map).unwrap();
        assert_eq!(dec.kind, DecompositionKind::TypeB);
        assert_eq!(dec.space, u);
        assert!(dec.inner.proportional_to(&v));
        assert_eq!(dec.reconstruct().unwrap().table(), map.table());
    }

    #[test]
    fn decompose_dual_isomorphism() {
        let f = f2();
        let g = GrassmannGraph::shared(&f, 4, 2).unwrap();
        let dual = g.dual_isomorphism().unwrap();
        let dec = decompose(&dual).unwrap();
        assert_eq!(dec.kind, DecompositionKind::TypeB);
        // U is the whole dual space
        assert_eq!(dec.space, Subspace::full(&f, 4));
        // v is a bijective semilinear map
        assert!(dec.inner.is_injective());
        assert_eq!(dec.inner.source_dim(), dec.inner.target_dim());
    }

    #[test]
    fn balanced_flavors() {
        let f = f2();
        let s = enumerate_subspaces(&f, 6, 1).unwrap()[0].clone();
        // a 5-dimensional U containing S
        let quot = QuotientStructure::new(&s);
        let u = {
            let coords = enumerate_subspaces(&f, 5, 4).unwrap()[0].clone();
            quot.lift_subspace(&coords)
        };
        assert!(u.contains(&s));
        let w = SemilinearMap::identity(&f, 4);

        let q = construct_balanced(&s, &u, &w, BalancedFlavor::Quotient, 2).unwrap();
        let qr = verify(&q);
        assert!(qr.is_isometric_embedding());
        assert_eq!(qr.embedding_type, EmbeddingType::A);

        let d = construct_balanced(&s, &u, &w, BalancedFlavor::DualQuotient, 2).unwrap();
        let dr = verify(&d);
        assert!(dr.is_isometric_embedding());
        assert_eq!(dr.embedding_type, EmbeddingType::B);

        // images lie in the segment [S, U]
        for map in [&q, &d] {
            for i in 0..map.domain().vertex_count() {
                let image = map.codomain().vertex(map.apply(i));
                assert!(image.contains(&s));
                assert!(u.contains(image));
            }
        }

        // quotient flavor equals construct_type_a with the included map
        let ubar = quot.project_subspace(&u);
        let included =
            SemilinearMap::new(w.twist().clone(), w.matrix().mul(ubar.basis())).unwrap();
        let via_a = construct_type_a(&s, &included, 2).unwrap();
        assert_eq!(q.table(), via_a.table());

        // both decompose back; the roundtrip reproduces the tables
        for map in [&q, &d] {
            let dec = decompose(map).unwrap();
            assert_eq!(dec.reconstruct().unwrap().table(), map.table());
            assert!(dec.incident_pair.is_some());
        }
    }

    #[test]
    fn feasibility_examples() {
        let r = feasibility(2, 4, 2, 2, 6, 3).unwrap();
        assert!(r.diameter_condition);
        assert!(r.type_a_rigid_condition);
        assert!(r.type_b_rigid_condition);
        assert!(r.field_hom_exists);

        let r = feasibility(2, 6, 3, 2, 4, 2).unwrap();
        assert!(!r.diameter_condition);

        let r = feasibility(2, 5, 2, 2, 5, 3).unwrap();
        assert!(!r.type_a_rigid_condition);
        assert!(r.type_b_rigid_condition);

        assert!(feasibility(2, 4, 1, 2, 6, 3).is_err());
        assert!(feasibility(2, 4, 3, 2, 6, 3).is_err());
    }

    #[test]
    fn prop_image_of_maximal_clique_in_exactly_one_maximal_clique() {
        let (_, _, map) = sample_type_a();
        let f = f2();
        let dom = map.domain();
        let kp = map.codomain().grade();
        let mut cliques: Vec<Vec<usize>> = Vec::new();
        for s in enumerate_subspaces(&f, 4, 1).unwrap() {
            cliques.push(dom.star(&s).unwrap());
        }
        for u in enumerate_subspaces(&f, 4, 3).unwrap() {
            cliques.push(dom.top(&u).unwrap());
        }
        for members in cliques {
            let images: Vec<&Subspace> =
                members.iter().map(|&i| map.codomain().vertex(map.apply(i))).collect();
            let mut inter = images[0].clone();
            let mut sum = images[0].clone();
            for im in &images[1..] {
                inter = inter.intersection(im).unwrap();
                sum = sum.sum(im).unwrap();
            }
            // containing stars: one per (k'-1)-subspace of the intersection;
            // containing tops: one per (k'+1)-space over the sum
            let stars = if inter.dim() >= kp - 1 {
                crate::grassmann::gaussian_binomial(
                    inter.dim() as u64,
                    (kp - 1) as u64,
                    2,
                )
                .unwrap()
            } else {
                0
            };
            let tops = if sum.dim() <= kp + 1 {
                crate::grassmann::gaussian_binomial(
                    (map.codomain().ambient_dim() - sum.dim()) as u64,
                    (kp + 1 - sum.dim()) as u64,
                    2,
                )
                .unwrap()
            } else {
                0
            };
            assert_eq!(stars + tops, 1, "image must lie in exactly one maximal clique");
        }
    }
}
