//! Matrices and subspaces over a finite field.
//!
//! Subspaces are kept in reduced row echelon form, which is the unique
//! canonical representative: structural equality of the basis matrix is
//! subspace equality. The dual space is represented concretely as row
//! vectors under the standard dot-product pairing, so annihilators are
//! kernels and contragredients are inverse-transposes.
//!
//! Elimination over GF(2) packs rows into machine words and eliminates
//! word-parallel; every other field goes through the generic path. The two
//! paths are checked against each other in the tests.

use crate::error::{Error, Result};
use crate::gf::Field;

/// Dense row-major matrix over a finite field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.field.header())?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zero(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix { field: field.clone(), rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        let mut m = Matrix::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: &Field, rows: &[Vec<u32>]) -> Matrix {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let entries = rows.iter().flatten().copied().collect();
        Matrix { field: field.clone(), rows: rows.len(), cols, entries }
    }

    pub fn from_flat(field: &Field, rows: usize, cols: usize, entries: Vec<u32>) -> Matrix {
        assert_eq!(entries.len(), rows * cols);
        Matrix { field: field.clone(), rows, cols, entries }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        debug_assert!(v < self.field.order());
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vec(&self, r: usize) -> Vec<u32> {
        self.row(r).to_vec()
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[u32]> {
        (0..self.rows).map(|r| self.row(r))
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zero(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    /// Stack `other` below `self`.
    pub fn stack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        assert_eq!(self.field, other.field);
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Matrix { field: self.field.clone(), rows: self.rows + other.rows, cols: self.cols, entries }
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.field, other.field);
        let f = &self.field;
        let mut out = Matrix::zero(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let add = f.mul(a, other.get(k, c));
                    let cur = out.get(r, c);
                    out.set(r, c, f.add(cur, add));
                }
            }
        }
        out
    }

    /// Row vector times matrix: `x . self`.
    pub fn apply_row(&self, x: &[u32]) -> Vec<u32> {
        assert_eq!(x.len(), self.rows);
        let f = &self.field;
        let mut out = vec![0u32; self.cols];
        for (r, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for c in 0..self.cols {
                out[c] = f.add(out[c], f.mul(xi, self.get(r, c)));
            }
        }
        out
    }

    /// Reduced row echelon form. Returns (rref, rank, pivot columns).
    pub fn rref(&self) -> (Matrix, usize, Vec<usize>) {
        let mut m = self.clone();
        let (rank, pivots) = m.reduce_in_place();
        (m, rank, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1
    }

    fn reduce_in_place(&mut self) -> (usize, Vec<usize>) {
        if self.field.order() == 2 {
            gf2::rref_packed(self)
        } else {
            self.reduce_generic()
        }
    }

    fn reduce_generic(&mut self) -> (usize, Vec<usize>) {
        let f = self.field.clone();
        let mut pivots = Vec::new();
        let mut pivot_row = 0usize;
        for col in 0..self.cols {
            if pivot_row >= self.rows {
                break;
            }
            let Some(src) = (pivot_row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            self.swap_rows(pivot_row, src);
            let lead = self.get(pivot_row, col);
            if lead != 1 {
                let inv = f.inv(lead);
                for c in col..self.cols {
                    let v = self.get(pivot_row, c);
                    self.set(pivot_row, c, f.mul(v, inv));
                }
            }
            for r in 0..self.rows {
                if r == pivot_row {
                    continue;
                }
                let factor = self.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in col..self.cols {
                    let sub = f.mul(factor, self.get(pivot_row, c));
                    let v = self.get(r, c);
                    self.set(r, c, f.sub(v, sub));
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        (pivot_row, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// RREF together with the transformation: returns `(r, t, rank, pivots)`
    /// where `t * self = r` and `t` is invertible.
    pub fn rref_with_transform(&self) -> (Matrix, Matrix, usize, Vec<usize>) {
        // augment with the identity and reduce generically
        let f = &self.field;
        let n = self.rows;
        let mut aug = Matrix::zero(f, n, self.cols + n);
        for r in 0..n {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols + r, 1);
        }
        // pivot search restricted to the original columns
        let mut pivots = Vec::new();
        let mut pivot_row = 0usize;
        let field = f.clone();
        for col in 0..self.cols {
            if pivot_row >= n {
                break;
            }
            let Some(src) = (pivot_row..n).find(|&r| aug.get(r, col) != 0) else {
                continue;
            };
            aug.swap_rows(pivot_row, src);
            let lead = aug.get(pivot_row, col);
            if lead != 1 {
                let inv = field.inv(lead);
                for c in 0..aug.cols {
                    let v = aug.get(pivot_row, c);
                    aug.set(pivot_row, c, field.mul(v, inv));
                }
            }
            for r in 0..n {
                if r == pivot_row {
                    continue;
                }
                let factor = aug.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in 0..aug.cols {
                    let sub = field.mul(factor, aug.get(pivot_row, c));
                    let v = aug.get(r, c);
                    aug.set(r, c, field.sub(v, sub));
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        let mut r = Matrix::zero(f, n, self.cols);
        let mut t = Matrix::zero(f, n, n);
        for i in 0..n {
            for c in 0..self.cols {
                r.set(i, c, aug.get(i, c));
            }
            for c in 0..n {
                t.set(i, c, aug.get(i, self.cols + c));
            }
        }
        (r, t, pivot_row, pivots)
    }

    /// Inverse of a square matrix.
    pub fn inverse(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch { expected: self.rows, got: self.cols });
        }
        let (_, t, rank, _) = self.rref_with_transform();
        if rank < self.rows {
            return Err(Error::SingularMatrix);
        }
        Ok(t)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Basis (as rows) of the right kernel `{ v : self . v^T = 0 }`.
    pub fn kernel(&self) -> Matrix {
        let f = &self.field;
        let (r, rank, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zero(f, free.len(), self.cols);
        for (i, &fc) in free.iter().enumerate() {
            out.set(i, fc, 1);
            for (pr, &pc) in pivots.iter().enumerate().take(rank) {
                out.set(i, pc, f.neg(r.get(pr, fc)));
            }
        }
        out
    }

    /// Coefficients `c` with `c . self = target`, if the target lies in the
    /// row space.
    pub fn solve_left(&self, target: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(target.len(), self.cols);
        let f = &self.field;
        let (r, t, rank, pivots) = self.rref_with_transform();
        let mut residue = target.to_vec();
        let mut coeffs = vec![0u32; self.rows];
        for (row, &pc) in pivots.iter().enumerate().take(rank) {
            let c = residue[pc];
            if c == 0 {
                continue;
            }
            coeffs[row] = c;
            for j in 0..self.cols {
                let sub = f.mul(c, r.get(row, j));
                residue[j] = f.sub(residue[j], sub);
            }
        }
        if residue.iter().any(|&v| v != 0) {
            return None;
        }
        Some(t.apply_row(&coeffs))
    }
}

/// Vector helpers over a field.
pub fn vec_add(f: &Field, a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(&x, &y)| f.add(x, y)).collect()
}

pub fn vec_scale(f: &Field, c: u32, a: &[u32]) -> Vec<u32> {
    a.iter().map(|&x| f.mul(c, x)).collect()
}

pub fn vec_is_zero(a: &[u32]) -> bool {
    a.iter().all(|&x| x == 0)
}

pub fn dot(f: &Field, a: &[u32], b: &[u32]) -> u32 {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

/// Normalize a nonzero vector so its leading nonzero entry is 1.
pub fn normalize_rep(f: &Field, a: &[u32]) -> Vec<u32> {
    let lead = a.iter().copied().find(|&x| x != 0).expect("nonzero vector");
    if lead == 1 {
        a.to_vec()
    } else {
        vec_scale(f, f.inv(lead), a)
    }
}

/// Word-packed elimination over GF(2).
mod gf2 {
    use super::Matrix;

    pub fn rref_packed(m: &mut Matrix) -> (usize, Vec<usize>) {
        let cols = m.cols;
        let words = cols.div_ceil(64);
        let mut packed: Vec<Vec<u64>> = (0..m.rows)
            .map(|r| {
                let mut w = vec![0u64; words];
                for (c, &v) in m.row(r).iter().enumerate() {
                    if v != 0 {
                        w[c / 64] |= 1 << (c % 64);
                    }
                }
                w
            })
            .collect();

        let mut pivots = Vec::new();
        let mut pivot_row = 0usize;
        for col in 0..cols {
            if pivot_row >= m.rows {
                break;
            }
            let bit = (col / 64, 1u64 << (col % 64));
            let Some(src) =
                (pivot_row..m.rows).find(|&r| packed[r][bit.0] & bit.1 != 0)
            else {
                continue;
            };
            packed.swap(pivot_row, src);
            let pivot = std::mem::take(&mut packed[pivot_row]);
            for (r, row) in packed.iter_mut().enumerate() {
                if r != pivot_row && row[bit.0] & bit.1 != 0 {
                    for (w, &p) in row.iter_mut().zip(&pivot) {
                        *w ^= p;
                    }
                }
            }
            packed[pivot_row] = pivot;
            pivots.push(col);
            pivot_row += 1;
        }

        for (r, row) in packed.iter().enumerate() {
            for c in 0..cols {
                m.entries[r * cols + c] = ((row[c / 64] >> (c % 64)) & 1) as u32;
            }
        }
        (pivot_row, pivots)
    }
}

/// A subspace of F_q^n in reduced-row-echelon canonical form.
///
/// Structural equality equals subspace equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    basis: Matrix,
    pivots: Vec<usize>,
}

impl std::fmt::Debug for Subspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Subspace dim {} of F^{} ", self.dim(), self.ambient_dim())?;
        let rows: Vec<String> = self
            .basis
            .rows_iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(""))
            .collect();
        write!(f, "[{}]", rows.join(" | "))
    }
}

impl Subspace {
    /// The row space of an arbitrary spanning matrix.
    pub fn from_spanning(m: &Matrix) -> Subspace {
        let (r, rank, pivots) = m.rref();
        let mut basis = Matrix::zero(m.field(), rank, m.cols());
        for i in 0..rank {
            for c in 0..m.cols() {
                basis.set(i, c, r.get(i, c));
            }
        }
        Subspace { basis, pivots }
    }

    pub fn from_rows(field: &Field, rows: &[Vec<u32>]) -> Subspace {
        Subspace::from_spanning(&Matrix::from_rows(field, rows))
    }

    pub fn zero(field: &Field, ambient: usize) -> Subspace {
        Subspace { basis: Matrix::zero(field, 0, ambient), pivots: vec![] }
    }

    pub fn full(field: &Field, ambient: usize) -> Subspace {
        Subspace { basis: Matrix::identity(field, ambient), pivots: (0..ambient).collect() }
    }

    pub fn field(&self) -> &Field {
        self.basis.field()
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduce a vector against the basis: the result is zero iff the vector
    /// lies in the subspace, and is supported on non-pivot columns.
    pub fn reduce_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.ambient_dim());
        let f = self.field().clone();
        let mut out = v.to_vec();
        for (r, &pc) in self.pivots.iter().enumerate() {
            let c = out[pc];
            if c == 0 {
                continue;
            }
            for j in 0..out.len() {
                let sub = f.mul(c, self.basis.get(r, j));
                out[j] = f.sub(out[j], sub);
            }
        }
        out
    }

    pub fn contains_vec(&self, v: &[u32]) -> bool {
        vec_is_zero(&self.reduce_vec(v))
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        other.basis.rows_iter().all(|r| self.contains_vec(r))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        Ok(Subspace::from_spanning(&self.basis.stack(&other.basis)))
    }

    /// Intersection by the Zassenhaus block construction.
    pub fn intersection(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let f = self.field();
        let n = self.ambient_dim();
        let (da, db) = (self.dim(), other.dim());
        // [ A | A ]
        // [ B | 0 ]  -> rows with zero left half carry an intersection basis
        let mut block = Matrix::zero(f, da + db, 2 * n);
        for r in 0..da {
            for c in 0..n {
                let v = self.basis.get(r, c);
                block.set(r, c, v);
                block.set(r, n + c, v);
            }
        }
        for r in 0..db {
            for c in 0..n {
                block.set(da + r, c, other.basis.get(r, c));
            }
        }
        let (red, rank, _) = block.rref();
        let mut rows: Vec<Vec<u32>> = Vec::new();
        for r in 0..rank {
            if (0..n).all(|c| red.get(r, c) == 0) {
                rows.push((n..2 * n).map(|c| red.get(r, c)).collect());
            }
        }
        if rows.is_empty() {
            return Ok(Subspace::zero(f, n));
        }
        Ok(Subspace::from_rows(f, &rows))
    }

    /// The annihilator under the dot-product pairing: all row vectors
    /// vanishing on this subspace. `dim X^0 = n - dim X`, and taking the
    /// annihilator twice returns the original subspace.
    pub fn annihilator(&self) -> Subspace {
        Subspace::from_spanning(&self.basis.kernel())
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.field() != other.field() {
            return Err(Error::FieldMismatch);
        }
        if self.ambient_dim() != other.ambient_dim() {
            return Err(Error::AmbientMismatch {
                left: self.ambient_dim(),
                right: other.ambient_dim(),
            });
        }
        Ok(())
    }

    /// All nonzero vectors, in deterministic order of coefficient codes.
    pub fn nonzero_vectors(&self) -> Vec<Vec<u32>> {
        let f = self.field();
        let q = f.order() as u64;
        let k = self.dim();
        let total = q.pow(k as u32);
        let mut out = Vec::with_capacity(total as usize - 1);
        for code in 1..total {
            let mut coeffs = vec![0u32; k];
            let mut c = code;
            for d in coeffs.iter_mut() {
                *d = (c % q) as u32;
                c /= q;
            }
            out.push(self.basis.apply_row(&coeffs));
        }
        out
    }
}

/// A quotient space V/S with explicit projection and section maps.
///
/// The complement is completed greedily by standard basis vectors in index
/// order, which for an RREF basis is exactly the non-pivot coordinates; the
/// choice is deterministic so quotient coordinates are reproducible.
#[derive(Clone)]
pub struct QuotientStructure {
    s: Subspace,
    complement_cols: Vec<usize>,
}

impl QuotientStructure {
    pub fn new(s: &Subspace) -> QuotientStructure {
        let complement_cols =
            (0..s.ambient_dim()).filter(|c| !s.pivots().contains(c)).collect();
        QuotientStructure { s: s.clone(), complement_cols }
    }

    pub fn subspace(&self) -> &Subspace {
        &self.s
    }

    pub fn ambient_dim(&self) -> usize {
        self.s.ambient_dim()
    }

    pub fn quotient_dim(&self) -> usize {
        self.complement_cols.len()
    }

    /// Rows completing the subspace to a basis of the ambient space.
    pub fn complement_basis(&self) -> Matrix {
        let f = self.s.field();
        let mut m = Matrix::zero(f, self.quotient_dim(), self.ambient_dim());
        for (i, &c) in self.complement_cols.iter().enumerate() {
            m.set(i, c, 1);
        }
        m
    }

    /// Coordinates of the class of `v` in the quotient.
    pub fn project_vec(&self, v: &[u32]) -> Vec<u32> {
        let reduced = self.s.reduce_vec(v);
        self.complement_cols.iter().map(|&c| reduced[c]).collect()
    }

    /// The canonical section: `project(lift(y)) = y`.
    pub fn lift_vec(&self, y: &[u32]) -> Vec<u32> {
        assert_eq!(y.len(), self.quotient_dim());
        let mut out = vec![0u32; self.ambient_dim()];
        for (&c, &v) in self.complement_cols.iter().zip(y) {
            out[c] = v;
        }
        out
    }

    /// Image of an ambient subspace in the quotient.
    pub fn project_subspace(&self, w: &Subspace) -> Subspace {
        let rows: Vec<Vec<u32>> = w.basis().rows_iter().map(|r| self.project_vec(r)).collect();
        let f = self.s.field();
        if rows.is_empty() {
            return Subspace::zero(f, self.quotient_dim());
        }
        Subspace::from_rows(f, &rows)
    }

    /// Preimage of a quotient subspace: contains S, and the dimension grows
    /// by `dim S`.
    pub fn lift_subspace(&self, w: &Subspace) -> Subspace {
        assert_eq!(w.ambient_dim(), self.quotient_dim());
        let mut rows: Vec<Vec<u32>> =
            self.s.basis().rows_iter().map(|r| r.to_vec()).collect();
        rows.extend(w.basis().rows_iter().map(|r| self.lift_vec(r)));
        Subspace::from_rows(self.s.field(), &rows)
    }
}
