//! The rigidity checker: does every automorphism of the domain graph that
//! comes from a linear automorphism extend through the embedding to one of
//! the codomain space?
//!
//! Only the generators of GL(V) are examined: extendable automorphisms form
//! a subgroup (extensions compose and invert), so the generators decide the
//! whole group. For each generator the search runs through the embedding's
//! decomposition: any valid extension must stabilize S (the common part of
//! all image vertices, which is canonical under the image configuration),
//! so it induces a linear map on V'/S pinned, up to scalars, on the span of
//! the image basis. The scalars are propagated where forced and enumerated
//! where free, and every candidate is validated against the full vertex
//! table, so a reported extension is always genuine and a reported failure
//! means the exhaustive scalar space contained no extension.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grassmann::GrassmannMap;
use crate::linalg::{vec_add, vec_is_zero, vec_scale, Matrix, QuotientStructure, Subspace};
use crate::semilinear::{gl_generators, SemilinearMap};

use super::{
    contragredient, decompose, dualize_codomain, verify, DecompositionKind, EmbeddingType,
};

/// Default budget on the scalar search space per generator.
pub const DEFAULT_SCALAR_BUDGET: u64 = 100_000;

#[derive(Clone, Debug)]
pub struct RigidityReport {
    pub rigid: bool,
    /// the generators of GL(V) that were checked, in order
    pub checked_generators: Vec<Matrix>,
    /// indices (into `checked_generators`) with no extension
    pub failures: Vec<usize>,
    /// for each extendable generator, the extending matrix
    pub witnesses: Vec<(usize, Matrix)>,
}

/// Check l-rigidity of an isometric embedding.
///
/// Requires the embedding to verify and decompose (so `k ≤ n-k`; dualize
/// the domain first otherwise). Type-B embeddings are handled by running
/// the type-A search against the codomain-dualized map; witnesses
/// translate back through the contragredient, and rigidity itself is
/// unchanged by the dualization because it is an involution that preserves
/// extendability in both directions.
pub fn check_l_rigidity(f: &GrassmannMap, budget: Option<u64>) -> Result<RigidityReport> {
    let budget = budget.unwrap_or(DEFAULT_SCALAR_BUDGET);
    let report = verify(f);
    if !report.is_isometric_embedding() {
        return Err(Error::NotIsometric);
    }
    if report.embedding_type == EmbeddingType::NotAnEmbedding {
        return Err(Error::WrongEmbeddingType);
    }

    let (target, dualized) = match report.embedding_type {
        EmbeddingType::A => (f.clone(), false),
        EmbeddingType::B => (dualize_codomain(f)?, true),
        EmbeddingType::NotAnEmbedding => unreachable!(),
    };
    let dec = decompose(&target)?;
    debug_assert_eq!(dec.kind, DecompositionKind::TypeA);

    let generators = gl_generators(f.domain().field(), f.domain().ambient_dim());
    let results: Vec<Result<Option<Matrix>>> = generators
        .par_iter()
        .map(|u| extension_via_decomposition(&target, &dec.space, &dec.inner, u, budget))
        .collect();

    let mut failures = Vec::new();
    let mut witnesses = Vec::new();
    for (gi, res) in results.into_iter().enumerate() {
        match res? {
            Some(uprime) => {
                let uprime = if dualized { contragredient(&uprime)? } else { uprime };
                debug_assert!(extends(f, &generators[gi], &uprime));
                witnesses.push((gi, uprime));
            }
            None => failures.push(gi),
        }
    }
    Ok(RigidityReport {
        rigid: failures.is_empty(),
        checked_generators: generators,
        failures,
        witnesses,
    })
}

/// Does `uprime` extend `u` through `f` at the vertex level?
pub fn extends(f: &GrassmannMap, u: &Matrix, uprime: &Matrix) -> bool {
    let dom = f.domain();
    let cod = f.codomain();
    (0..dom.vertex_count()).all(|i| {
        let moved = Subspace::from_spanning(&dom.vertex(i).basis().mul(u));
        let lhs = match dom.index_of(&moved) {
            Some(j) => cod.vertex(f.apply(j)),
            None => return false,
        };
        let rhs = Subspace::from_spanning(&cod.vertex(f.apply(i)).basis().mul(uprime));
        *lhs == rhs
    })
}

/// Search for an extension of one generator through a type-A decomposition
/// `f = π ∘ l_k` with parameter subspace S.
fn extension_via_decomposition(
    f: &GrassmannMap,
    s: &Subspace,
    l: &SemilinearMap,
    u: &Matrix,
    budget: u64,
) -> Result<Option<Matrix>> {
    let ft = l.target_field().clone();
    let q = ft.order();
    let n = l.source_dim();
    let m = l.target_dim();
    let quot = QuotientStructure::new(s);
    debug_assert_eq!(quot.quotient_dim(), m);

    // image basis and its prescribed targets in quotient coordinates
    let d: Vec<Vec<u32>> = l.matrix().rows_iter().map(|r| r.to_vec()).collect();
    let t: Vec<Vec<u32>> = (0..n).map(|i| l.apply(u.row(i))).collect();

    let mut base: Vec<usize> = Vec::new();
    for i in 0..n {
        let mut rows: Vec<Vec<u32>> = base.iter().map(|&b| d[b].clone()).collect();
        rows.push(d[i].clone());
        if Matrix::from_rows(&ft, &rows).rank() == rows.len() {
            base.push(i);
        }
    }
    let r = base.len();
    let target_matrix =
        Matrix::from_rows(&ft, &base.iter().map(|&b| t[b].clone()).collect::<Vec<_>>());
    if target_matrix.rank() != r {
        // the prescribed images of an independent set collapse
        return Ok(None);
    }

    let parallel = |a: &[u32], b: &[u32]| -> bool {
        Subspace::from_rows(&ft, &[a.to_vec(), b.to_vec()]).dim() <= 1
    };

    // scalar gauge: lambda[0] = 1; pair points force lambda where the
    // target directions differ; the rest stay free
    let mut lambda = vec![0u32; r];
    lambda[0] = 1;
    let mut free: Vec<usize> = Vec::new();
    for bi in 1..r {
        if parallel(&t[base[0]], &t[base[bi]]) {
            free.push(bi);
        } else {
            lambda[bi] = 1;
        }
    }
    let space = (q as u64 - 1).checked_pow(free.len() as u32).unwrap_or(u64::MAX);
    if space > budget {
        return Err(Error::BudgetExceeded { needed: space, budget });
    }

    // dependent image vectors and their coefficients over the base
    let base_matrix =
        Matrix::from_rows(&ft, &base.iter().map(|&b| d[b].clone()).collect::<Vec<_>>());
    let dependents: Vec<(usize, Vec<u32>)> = (0..n)
        .filter(|i| !base.contains(i))
        .map(|i| (i, base_matrix.solve_left(&d[i]).expect("base spans the images")))
        .collect();

    let mut assignment = vec![1u32; free.len()];
    loop {
        for (slot, &bi) in free.iter().enumerate() {
            lambda[bi] = assignment[slot];
        }
        if scalar_filter(&ft, &lambda, &base, &t, &dependents, &target_matrix) {
            if let Some(uprime) = lift_candidate(&ft, s, &quot, &base, &d, &t, &lambda)? {
                if extends(f, u, &uprime) {
                    return Ok(Some(uprime));
                }
            }
        }
        // next assignment over (F^*)^free
        let mut idx = 0;
        while idx < assignment.len() {
            assignment[idx] += 1;
            if assignment[idx] < q {
                break;
            }
            assignment[idx] = 1;
            idx += 1;
        }
        if idx == assignment.len() {
            return Ok(None);
        }
    }
}

/// Point-level consistency of one scalar assignment on the dependent image
/// vectors.
fn scalar_filter(
    ft: &crate::gf::Field,
    lambda: &[u32],
    base: &[usize],
    t: &[Vec<u32>],
    dependents: &[(usize, Vec<u32>)],
    target_matrix: &Matrix,
) -> bool {
    let m = target_matrix.cols();
    dependents.iter().all(|(j, coeffs)| {
        let mut v = vec![0u32; m];
        for (bi, &b) in base.iter().enumerate() {
            let c = ft.mul(coeffs[bi], lambda[bi]);
            if c != 0 {
                v = vec_add(ft, &v, &vec_scale(ft, c, &t[b]));
            }
        }
        if vec_is_zero(&v) {
            return false;
        }
        Subspace::from_rows(ft, &[v, t[*j].clone()]).dim() == 1
    })
}

/// Assemble the candidate automorphism of V' from one scalar assignment:
/// identity on S, the scaled map on the image span of the quotient, and a
/// deterministic completion elsewhere.
fn lift_candidate(
    ft: &crate::gf::Field,
    s: &Subspace,
    quot: &QuotientStructure,
    base: &[usize],
    d: &[Vec<u32>],
    t: &[Vec<u32>],
    lambda: &[u32],
) -> Result<Option<Matrix>> {
    let m = quot.quotient_dim();
    let np = s.ambient_dim();

    // w on the quotient: base rows map to scaled targets
    let w_span = Subspace::from_rows(ft, &base.iter().map(|&b| d[b].clone()).collect::<Vec<_>>());
    let standard_complement = |sp: &Subspace| -> Vec<Vec<u32>> {
        (0..m)
            .filter(|c| !sp.pivots().contains(c))
            .map(|c| {
                let mut v = vec![0u32; m];
                v[c] = 1;
                v
            })
            .collect()
    };
    let complement = standard_complement(&w_span);
    let mut basis_rows: Vec<Vec<u32>> = base.iter().map(|&b| d[b].clone()).collect();
    basis_rows.extend(complement.iter().cloned());
    let basis_matrix = Matrix::from_rows(ft, &basis_rows);

    let scaled_targets: Vec<Vec<u32>> = base
        .iter()
        .zip(lambda)
        .map(|(&b, &lam)| vec_scale(ft, lam, &t[b]))
        .collect();
    let mut image_rows = scaled_targets.clone();
    image_rows.extend(complement.iter().cloned());
    let mut image_matrix = Matrix::from_rows(ft, &image_rows);
    if !image_matrix.is_invertible() {
        let tspan = Subspace::from_rows(ft, &scaled_targets);
        let mut image_rows = scaled_targets.clone();
        image_rows.extend(standard_complement(&tspan));
        image_matrix = Matrix::from_rows(ft, &image_rows);
        if !image_matrix.is_invertible() {
            return Ok(None);
        }
    }
    let w = basis_matrix.inverse()?.mul(&image_matrix);

    // lift to V': identity on S, w through the quotient on a complement
    let mut rows: Vec<Vec<u32>> = s.basis().rows_iter().map(|r| r.to_vec()).collect();
    let mut images: Vec<Vec<u32>> = rows.clone();
    for crow in quot.complement_basis().rows_iter() {
        rows.push(crow.to_vec());
        let wq = Matrix::from_rows(ft, &[quot.project_vec(crow)]).mul(&w).row_vec(0);
        images.push(quot.lift_vec(&wq));
    }
    let basis = Matrix::from_rows(ft, &rows);
    let image = Matrix::from_rows(ft, &images);
    let uprime = basis.inverse()?.mul(&image);
    debug_assert_eq!(uprime.rows(), np);
    if !uprime.is_invertible() {
        return Ok(None);
    }
    Ok(Some(uprime))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::{construct_type_a, construct_type_b};
    use crate::gf::Field;
    use crate::grassmann::{enumerate_subspaces, GrassmannGraph};
    use crate::semilinear::SemilinearMap;

    fn f2() -> Field {
        Field::with_default_modulus(2, 1).unwrap()
    }

    #[test]
    fn type_a_full_embedding_is_rigid() {
        let f = f2();
        let s = enumerate_subspaces(&f, 6, 1).unwrap()[0].clone();
        let mut m = Matrix::zero(&f, 4, 5);
        for i in 0..4 {
            m.set(i, i, 1);
        }
        let l = SemilinearMap::linear(m);
        let map = construct_type_a(&s, &l, 2).unwrap();
        let report = check_l_rigidity(&map, None).unwrap();
        assert!(report.rigid);
        assert_eq!(report.checked_generators.len(), 13);
        assert!(report.failures.is_empty());
        assert_eq!(report.witnesses.len(), 13);
        for (gi, uprime) in &report.witnesses {
            assert!(extends(&map, &report.checked_generators[*gi], uprime));
        }
    }

    #[test]
    fn type_b_full_embedding_is_rigid() {
        let f = f2();
        let u = enumerate_subspaces(&f, 6, 5).unwrap()[2].clone();
        let mut m = Matrix::zero(&f, 4, 5);
        for i in 0..4 {
            m.set(i, i, 1);
        }
        let v = SemilinearMap::linear(m);
        let map = construct_type_b(&u, &v, 2).unwrap();
        let report = check_l_rigidity(&map, None).unwrap();
        assert!(report.rigid, "failures: {:?}", report.failures);
        for (gi, uprime) in &report.witnesses {
            assert!(extends(&map, &report.checked_generators[*gi], uprime));
        }
    }

    #[test]
    fn dual_isomorphism_is_rigid() {
        // an isometric embedding with n = 2k: rigid by the general clause
        let f = f2();
        let g = GrassmannGraph::shared(&f, 4, 2).unwrap();
        let dual = g.dual_isomorphism().unwrap();
        let report = check_l_rigidity(&dual, None).unwrap();
        assert!(report.rigid);
    }

    #[test]
    fn witness_extensions_compose() {
        let f = f2();
        let s = enumerate_subspaces(&f, 6, 1).unwrap()[0].clone();
        let mut m = Matrix::zero(&f, 4, 5);
        for i in 0..4 {
            m.set(i, i, 1);
            m.set(i, 4, 1);
        }
        let l = SemilinearMap::linear(m);
        let map = construct_type_a(&s, &l, 2).unwrap();
        let report = check_l_rigidity(&map, None).unwrap();
        assert!(report.rigid);
        let gens = &report.checked_generators;
        for (i1, w1) in report.witnesses.iter().take(4) {
            for (i2, w2) in report.witnesses.iter().take(4) {
                let u12 = gens[*i1].mul(&gens[*i2]);
                let w12 = w1.mul(w2);
                assert!(extends(&map, &u12, &w12));
            }
        }
    }
}
