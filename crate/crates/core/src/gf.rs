//! Finite field arithmetic GF(p^e) and field homomorphisms.
//!
//! Elements are encoded as integers in `0..p^e`: the base-p digits of the
//! code are the coefficients of a polynomial residue modulo a fixed monic
//! irreducible polynomial of degree `e`. All cross-module APIs exchange
//! these integer codes, which makes serialization deterministic.
//!
//! Multiplication and inversion are table-driven for `q <= 4096` and fall
//! back to on-the-fly polynomial arithmetic above that.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported field size.
pub const MAX_FIELD_SIZE: u64 = 1 << 16;

/// Fields up to this size precompute full multiplication/inverse tables.
const TABLE_LIMIT: u64 = 1 << 12;

struct FieldInner {
    p: u32,
    e: u32,
    q: u32,
    /// Monic modulus, little-endian coefficients, length `e + 1`.
    modulus: Vec<u32>,
    mul_table: Option<Vec<u32>>,
    inv_table: Option<Vec<u32>>,
}

/// A concrete finite field GF(p^e).
///
/// Cheap to clone (shared internals); immutable after construction, so safe
/// to share across threads. Equality compares `(p, e, modulus)`.
#[derive(Clone)]
pub struct Field(Arc<FieldInner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.e == other.0.e && self.0.modulus == other.0.modulus
    }
}

impl Eq for Field {}

impl std::hash::Hash for Field {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.p.hash(state);
        self.0.e.hash(state);
        self.0.modulus.hash(state);
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.header())
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    let n = n as u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Polynomials over GF(p) as little-endian coefficient vectors.
mod poly {
    /// Trim trailing zero coefficients.
    pub fn normalize(mut a: Vec<u32>) -> Vec<u32> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn degree(a: &[u32]) -> Option<usize> {
        a.iter().rposition(|&c| c != 0)
    }

    pub fn mul(p: u32, a: &[u32], b: &[u32]) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0u32; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + ai * bj) % p;
            }
        }
        normalize(out)
    }

    /// Remainder of `a` modulo monic `m`.
    pub fn rem(p: u32, a: &[u32], m: &[u32]) -> Vec<u32> {
        let md = degree(m).expect("modulus must be nonzero");
        let mut r: Vec<u32> = a.to_vec();
        loop {
            let rd = match degree(&r) {
                Some(d) if d >= md => d,
                _ => break,
            };
            let lead = r[rd];
            let shift = rd - md;
            for (i, &mc) in m.iter().enumerate().take(md + 1) {
                let idx = i + shift;
                let sub = (lead * mc) % p;
                r[idx] = (r[idx] + p - sub) % p;
            }
        }
        normalize(r)
    }
}

impl Field {
    /// Construct GF(p^e) with an explicit monic irreducible modulus
    /// (little-endian coefficients, length `e + 1`).
    pub fn new(p: u32, e: u32, modulus: Vec<u32>) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e < 1 {
            return Err(Error::OutOfRange("extension degree must be >= 1".into()));
        }
        let q = (p as u64).checked_pow(e).filter(|&q| q <= MAX_FIELD_SIZE).ok_or(
            Error::FieldTooLarge { q: (p as u64).saturating_pow(e), limit: MAX_FIELD_SIZE },
        )?;
        if modulus.len() != e as usize + 1 {
            return Err(Error::InvalidModulus(format!(
                "expected {} coefficients, got {}",
                e + 1,
                modulus.len()
            )));
        }
        if modulus[e as usize] != 1 {
            return Err(Error::InvalidModulus("modulus must be monic".into()));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidModulus("coefficient out of range".into()));
        }
        if !irreducible(p, &modulus) {
            return Err(Error::ReducibleModulus { p });
        }
        let mut inner = FieldInner { p, e, q: q as u32, modulus, mul_table: None, inv_table: None };
        if q <= TABLE_LIMIT {
            let q = q as u32;
            let mut mul = vec![0u32; (q as usize) * (q as usize)];
            for a in 0..q {
                for b in a..q {
                    let prod = inner.mul_poly(a, b);
                    mul[(a as usize) * (q as usize) + b as usize] = prod;
                    mul[(b as usize) * (q as usize) + a as usize] = prod;
                }
            }
            let mut inv = vec![0u32; q as usize];
            for a in 1..q {
                if inv[a as usize] != 0 {
                    continue;
                }
                let b = (1..q)
                    .find(|&b| mul[(a as usize) * (q as usize) + b as usize] == 1)
                    .expect("every nonzero element has an inverse");
                inv[a as usize] = b;
                inv[b as usize] = a;
            }
            inner.mul_table = Some(mul);
            inner.inv_table = Some(inv);
        }
        Ok(Field(Arc::new(inner)))
    }

    /// Construct GF(p^e) with the default modulus: the lexicographically
    /// smallest monic irreducible polynomial of degree `e` over GF(p)
    /// (coefficients compared from the highest degree down).
    pub fn with_default_modulus(p: u32, e: u32) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e < 1 {
            return Err(Error::OutOfRange("extension degree must be >= 1".into()));
        }
        let modulus = default_modulus(p, e)
            .ok_or_else(|| Error::InvalidModulus("no irreducible of this degree".into()))?;
        Field::new(p, e, modulus)
    }

    /// GF(q) for a prime power q, with the default modulus.
    pub fn of_order(q: u32) -> Result<Field> {
        let (p, e) = factor_prime_power(q)
            .ok_or_else(|| Error::OutOfRange(format!("{q} is not a prime power")))?;
        Field::with_default_modulus(p, e)
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn e(&self) -> u32 {
        self.0.e
    }

    /// Field size q = p^e.
    pub fn order(&self) -> u32 {
        self.0.q
    }

    /// Modulus coefficients, little-endian, length `e + 1`.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    /// Serialization header `GF(p^e;c_e,...,c_0)`.
    pub fn header(&self) -> String {
        let coeffs: Vec<String> =
            self.0.modulus.iter().rev().map(|c| c.to_string()).collect();
        format!("GF({}^{};{})", self.0.p, self.0.e, coeffs.join(","))
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.0.q
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        debug_assert!(a < self.0.q && b < self.0.q);
        let p = self.0.p;
        if p == 2 {
            return a ^ b;
        }
        // digit-wise addition mod p
        let mut out = 0u32;
        let mut scale = 1u32;
        let (mut a, mut b) = (a, b);
        while a != 0 || b != 0 {
            out += ((a % p + b % p) % p) * scale;
            a /= p;
            b /= p;
            scale *= p;
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        debug_assert!(a < self.0.q);
        let p = self.0.p;
        if p == 2 {
            return a;
        }
        let mut out = 0u32;
        let mut scale = 1u32;
        let mut a = a;
        while a != 0 {
            out += ((p - a % p) % p) * scale;
            a /= p;
            scale *= p;
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        debug_assert!(a < self.0.q && b < self.0.q);
        match &self.0.mul_table {
            Some(t) => t[(a as usize) * (self.0.q as usize) + b as usize],
            None => self.0.mul_poly(a, b),
        }
    }

    /// Multiplicative inverse of a nonzero element.
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "zero has no inverse");
        match &self.0.inv_table {
            Some(t) => t[a as usize],
            None => self.pow(a, self.0.q as u64 - 2),
        }
    }

    pub fn div(&self, a: u32, b: u32) -> u32 {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: u32, mut n: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    /// Smallest generator of the multiplicative group.
    pub fn primitive_element(&self) -> u32 {
        let q = self.0.q as u64;
        let group = q - 1;
        let factors = prime_factors(group);
        'outer: for g in 2..self.0.q.max(3) {
            if g >= self.0.q {
                break;
            }
            for &f in &factors {
                if self.pow(g, group / f) == 1 {
                    continue 'outer;
                }
            }
            return g;
        }
        // q = 2: the group is trivial
        1
    }

    /// Evaluate a polynomial over this field (little-endian coefficients,
    /// each already a field element code) at `x`.
    pub fn eval_poly(&self, coeffs: &[u32], x: u32) -> u32 {
        let mut acc = 0u32;
        for &c in coeffs.iter().rev() {
            acc = self.add(self.mul(acc, x), c);
        }
        acc
    }

    /// The residue class of the polynomial variable: the element whose
    /// digit vector is (0, 1, 0, ...). For e = 1 this reduces to the
    /// constant `-c_0`.
    pub fn generator(&self) -> u32 {
        if self.0.e >= 2 {
            self.0.p
        } else {
            (self.0.p - self.0.modulus[0]) % self.0.p
        }
    }

    /// Embed a prime-field value (0..p) into this field.
    pub fn from_prime(&self, a: u32) -> u32 {
        debug_assert!(a < self.0.p);
        a
    }
}

impl FieldInner {
    fn mul_poly(&self, a: u32, b: u32) -> u32 {
        let pa = digits(self.p, self.e, a);
        let pb = digits(self.p, self.e, b);
        let prod = poly::mul(self.p, &pa, &pb);
        let red = poly::rem(self.p, &prod, &self.modulus);
        undigits(self.p, &red)
    }
}

fn digits(p: u32, e: u32, mut a: u32) -> Vec<u32> {
    let mut out = vec![0u32; e as usize];
    for d in out.iter_mut() {
        *d = a % p;
        a /= p;
    }
    out
}

fn undigits(p: u32, ds: &[u32]) -> u32 {
    let mut out = 0u32;
    for &d in ds.iter().rev() {
        out = out * p + d;
    }
    out
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn factor_prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u32;
    while (p as u64) * (p as u64) <= q as u64 {
        if q % p == 0 {
            let mut e = 0u32;
            let mut rest = q;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            return (rest == 1).then_some((p, e));
        }
        p += 1;
    }
    Some((q, 1))
}

/// Irreducibility over GF(p) by trial division against all lower-degree
/// monic polynomials.
fn irreducible(p: u32, modulus: &[u32]) -> bool {
    let deg = match poly::degree(modulus) {
        Some(d) => d,
        None => return false,
    };
    if deg == 0 {
        return false;
    }
    if deg == 1 {
        return true;
    }
    for d in 1..=deg / 2 {
        // all monic polynomials of degree d
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut cand = vec![0u32; d + 1];
            let mut c = code;
            for coef in cand.iter_mut().take(d) {
                *coef = (c % p as u64) as u32;
                c /= p as u64;
            }
            cand[d] = 1;
            if poly::rem(p, modulus, &cand).is_empty() {
                return false;
            }
        }
    }
    true
}

fn default_modulus(p: u32, e: u32) -> Option<Vec<u32>> {
    if e == 1 {
        // x itself: the smallest monic degree-1 polynomial
        return Some(vec![0, 1]);
    }
    // Lexicographic order on (c_{e-1}, ..., c_0).
    let count = (p as u64).checked_pow(e)?;
    for code in 0..count {
        let mut cand = vec![0u32; e as usize + 1];
        let mut c = code;
        for i in (0..e as usize).rev() {
            cand[i] = (c % p as u64) as u32;
            c /= p as u64;
        }
        cand[e as usize] = 1;
        if irreducible(p, &cand) {
            return Some(cand);
        }
    }
    None
}

/// An injective field homomorphism between two finite fields, stored as a
/// full lookup table. Nonzero homomorphisms GF(p^e) -> GF(p^e') exist
/// exactly when e divides e', and there are e of them.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldHom {
    source: Field,
    target: Field,
    table: Vec<u32>,
}

impl fmt::Debug for FieldHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Hom({} -> {}; x -> {})",
            self.source.header(),
            self.target.header(),
            self.generator_image()
        )
    }
}

impl FieldHom {
    /// Build the homomorphism determined by sending the residue class of
    /// the source variable to `root`, which must be a root of the source
    /// modulus inside the target field.
    pub fn from_generator_image(source: &Field, target: &Field, root: u32) -> Result<FieldHom> {
        if source.p() != target.p() {
            return Err(Error::FieldMismatch);
        }
        // source modulus coefficients are prime-field values, valid in the target
        let modulus: Vec<u32> = source.modulus().to_vec();
        if target.eval_poly(&modulus, root) != 0 {
            return Err(Error::OutOfRange("not a root of the source modulus".into()));
        }
        let p = source.p();
        let e = source.e();
        let mut table = vec![0u32; source.order() as usize];
        for a in source.elements() {
            let ds = digits(p, e, a);
            table[a as usize] = target.eval_poly(&ds, root);
        }
        Ok(FieldHom { source: source.clone(), target: target.clone(), table })
    }

    /// The identity on a field.
    pub fn identity(field: &Field) -> FieldHom {
        let table = field.elements().collect();
        FieldHom { source: field.clone(), target: field.clone(), table }
    }

    pub fn source(&self) -> &Field {
        &self.source
    }

    pub fn target(&self) -> &Field {
        &self.target
    }

    pub fn apply(&self, a: u32) -> u32 {
        self.table[a as usize]
    }

    /// Image of the source's polynomial generator; together with the two
    /// fields this determines the homomorphism.
    pub fn generator_image(&self) -> u32 {
        self.table[self.source.generator() as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.table.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    /// Composition `other . self` (apply `self` first).
    pub fn compose(&self, other: &FieldHom) -> Result<FieldHom> {
        if self.target != other.source {
            return Err(Error::FieldMismatch);
        }
        let table = self.table.iter().map(|&v| other.table[v as usize]).collect();
        Ok(FieldHom { source: self.source.clone(), target: other.target.clone(), table })
    }

    /// Inverse, defined when the homomorphism is bijective.
    pub fn inverse(&self) -> Result<FieldHom> {
        if self.source.order() != self.target.order() {
            return Err(Error::FieldMismatch);
        }
        let mut table = vec![0u32; self.table.len()];
        for (a, &v) in self.table.iter().enumerate() {
            table[v as usize] = a as u32;
        }
        Ok(FieldHom { source: self.target.clone(), target: self.source.clone(), table })
    }
}

/// All field homomorphisms `source -> target`, ordered by the image of the
/// source generator. Empty when the characteristics differ or the source
/// degree does not divide the target degree.
pub fn hom_enumerate(source: &Field, target: &Field) -> Vec<FieldHom> {
    if source.p() != target.p() {
        return vec![];
    }
    let modulus: Vec<u32> = source.modulus().to_vec();
    let mut out = vec![];
    for root in target.elements() {
        if target.eval_poly(&modulus, root) == 0 {
            out.push(
                FieldHom::from_generator_image(source, target, root)
                    .expect("root determines a homomorphism"),
            );
        }
    }
    out
}

/// The unique homomorphism when there is exactly one natural choice:
/// the identity for equal fields, otherwise the Galois-twist with the
/// smallest generator image.
pub fn hom_canonical(source: &Field, target: &Field) -> Result<FieldHom> {
    if source == target {
        return Ok(FieldHom::identity(source));
    }
    hom_enumerate(source, target)
        .into_iter()
        .next()
        .ok_or(Error::FieldMismatch)
}
