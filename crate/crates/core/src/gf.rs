//! Exact arithmetic in `GF(p)`, `GF(p^k)` and cubic extensions `GF(q³)` of
//! such a field.
//!
//! Elements of `GF(p^k)` are dense coefficient vectors (constant term first)
//! modulo a fixed monic irreducible polynomial. The polynomial chosen by
//! [`GfField::new`] is the smallest irreducible one when coefficient vectors
//! are read as base-`p` integers `c_0 + c_1 p + … + c_{k-1} p^{k-1}`; the same
//! integer encoding ("index") orders field elements.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::arith::{factorize, is_prime, mul_mod};

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 12;

/// Largest base field accepted by [`CubicExtension`] (its tables are `q²`).
pub const MAX_CUBIC_BASE: u64 = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree {0} outside 1..={MAX_DEGREE}")]
    DegreeOutOfRange(u32),
    #[error("field order {p}^{k} exceeds the supported range")]
    OrderTooLarge { p: u64, k: u32 },
    #[error("no irreducible polynomial of degree {k} over GF({p}) found")]
    NoIrreducibleFound { p: u64, k: u32 },
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial has degree < 1")]
    DegreeTooSmall,
}

#[derive(Debug, PartialEq, Eq)]
struct FieldData {
    p: u64,
    k: u32,
    order: u64,
    /// Monic modulus, constant term first, length `k + 1`. `None` for `k = 1`.
    modulus: Option<Vec<u64>>,
}

/// The finite field `GF(p^k)`. Cheap to clone; clones share storage.
#[derive(Clone, PartialEq, Eq)]
pub struct GfField(Arc<FieldData>);

impl fmt::Debug for GfField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.0.p, self.0.k)?;
        if let Some(m) = &self.0.modulus {
            write!(f, " mod {}", fmt_poly(m))?;
        }
        Ok(())
    }
}

/// Builds `GF(p^k)`. See [`GfField::new`].
pub fn make_field(p: u64, k: u32) -> Result<GfField, GfError> {
    GfField::new(p, k)
}

impl GfField {
    /// Builds `GF(p^k)` modulo the smallest monic irreducible polynomial of
    /// degree `k`. Prime fields (`k = 1`) use plain residue arithmetic.
    pub fn new(p: u64, k: u32) -> Result<Self, GfError> {
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        if !(1..=MAX_DEGREE).contains(&k) {
            return Err(GfError::DegreeOutOfRange(k));
        }
        let order = p.checked_pow(k).ok_or(GfError::OrderTooLarge { p, k })?;
        let modulus = if k == 1 {
            None
        } else {
            Some(smallest_irreducible(p, k)?)
        };
        Ok(GfField(Arc::new(FieldData {
            p,
            k,
            order,
            modulus,
        })))
    }

    pub fn characteristic(&self) -> u64 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.k
    }

    /// Number of elements, `p^k`.
    pub fn order(&self) -> u64 {
        self.0.order
    }

    /// The monic modulus (constant term first), or `None` for a prime field.
    pub fn modulus_poly(&self) -> Option<&[u64]> {
        self.0.modulus.as_deref()
    }

    pub fn zero(&self) -> GfElement {
        GfElement {
            field: self.clone(),
            coeffs: vec![0; self.0.k as usize],
        }
    }

    pub fn one(&self) -> GfElement {
        self.from_index(1)
    }

    /// Element with the given coefficients (constant term first), reduced
    /// mod `p` and zero-padded to length `k`. Longer inputs are reduced
    /// modulo the field polynomial.
    pub fn element(&self, coeffs: &[u64]) -> GfElement {
        let p = self.0.p;
        let mut c: Vec<u64> = coeffs.iter().map(|&x| x % p).collect();
        let k = self.0.k as usize;
        if c.len() > k {
            c = match &self.0.modulus {
                Some(m) => poly_rem(&c, m, p),
                None => vec![c.iter().fold(0, |acc, &x| (acc + x) % p)],
            };
        }
        c.resize(k, 0);
        GfElement {
            field: self.clone(),
            coeffs: c,
        }
    }

    /// Element whose base-`p` digits are its coefficients.
    pub fn from_index(&self, mut index: u64) -> GfElement {
        let p = self.0.p;
        let mut coeffs = Vec::with_capacity(self.0.k as usize);
        for _ in 0..self.0.k {
            coeffs.push(index % p);
            index /= p;
        }
        GfElement {
            field: self.clone(),
            coeffs,
        }
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = GfElement> + '_ {
        (0..self.0.order).map(|i| self.from_index(i))
    }

    /// The smallest element (by index, skipping 0 and 1) whose
    /// multiplicative order is `p^k − 1`. For `GF(2)` this is 1.
    pub fn primitive_element(&self) -> GfElement {
        let group = self.0.order - 1;
        if group == 1 {
            return self.one();
        }
        let primes: Vec<u64> = factorize(group).into_iter().map(|(r, _)| r).collect();
        (2..self.0.order)
            .map(|i| self.from_index(i))
            .find(|a| primes.iter().all(|&r| !a.pow(group / r).is_one()))
            .expect("the multiplicative group of a finite field is cyclic")
    }

    fn mul_coeffs(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let p = self.0.p;
        match &self.0.modulus {
            None => vec![mul_mod(a[0], b[0], p)],
            Some(m) => {
                let mut prod = poly_mul(a, b, p);
                prod = poly_rem(&prod, m, p);
                prod.resize(self.0.k as usize, 0);
                prod
            }
        }
    }
}

/// Element of a [`GfField`].
#[derive(Clone, PartialEq, Eq)]
pub struct GfElement {
    field: GfField,
    coeffs: Vec<u64>,
}

impl fmt::Debug for GfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.0.k == 1 {
            write!(f, "{}", self.coeffs[0])
        } else {
            write!(f, "{}", fmt_poly(&self.coeffs))
        }
    }
}

impl GfElement {
    pub fn field(&self) -> &GfField {
        &self.field
    }

    /// Coefficients, constant term first, length `k`.
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn index(&self) -> u64 {
        let p = self.field.0.p;
        self.coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    fn check(&self, other: &Self) -> Result<(), GfError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(GfError::FieldMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, GfError> {
        self.check(other)?;
        let p = self.field.0.p;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| (a + b) % p)
            .collect();
        Ok(GfElement {
            field: self.field.clone(),
            coeffs,
        })
    }

    pub fn neg(&self) -> Self {
        let p = self.field.0.p;
        GfElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|&a| (p - a) % p).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, GfError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, GfError> {
        self.check(other)?;
        Ok(GfElement {
            field: self.field.clone(),
            coeffs: self.field.mul_coeffs(&self.coeffs, &other.coeffs),
        })
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut acc = self.field.one();
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc.coeffs = self.field.mul_coeffs(&acc.coeffs, &base.coeffs);
            }
            base.coeffs = self.field.mul_coeffs(&base.coeffs, &base.coeffs);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, `a^(p^k − 2)`.
    pub fn inv(&self) -> Result<Self, GfError> {
        if self.is_zero() {
            return Err(GfError::DivisionByZero);
        }
        Ok(self.pow(self.field.0.order - 2))
    }

    pub fn div(&self, other: &Self) -> Result<Self, GfError> {
        self.check(other)?;
        self.mul(&other.inv()?)
    }

    /// Least `t ≥ 1` with `a^t = 1`.
    pub fn element_order(&self) -> Result<u64, GfError> {
        if self.is_zero() {
            return Err(GfError::DivisionByZero);
        }
        let mut t = self.field.0.order - 1;
        for (r, _) in factorize(t) {
            while t.is_multiple_of(r) && self.pow(t / r).is_one() {
                t /= r;
            }
        }
        Ok(t)
    }
}

/// Whether the monic polynomial `poly` (constant term first) is irreducible
/// over `GF(p)`, by Rabin's test: `x^(p^d) ≡ x (mod f)` and
/// `gcd(x^(p^(d/r)) − x, f) = 1` for every prime `r | d`.
pub fn is_irreducible(poly: &[u64], p: u64) -> Result<bool, GfError> {
    if !is_prime(p) {
        return Err(GfError::NotPrime(p));
    }
    let f = poly_trim(poly.iter().map(|&c| c % p).collect());
    if f.len() < 2 {
        return Err(GfError::DegreeTooSmall);
    }
    if *f.last().unwrap() != 1 {
        return Err(GfError::NotMonic);
    }
    let d = (f.len() - 1) as u64;
    if d == 1 {
        return Ok(true);
    }
    let x = vec![0, 1];
    // frob[j] = x^(p^j) mod f
    let mut frob = Vec::with_capacity(d as usize + 1);
    frob.push(x.clone());
    for j in 1..=d as usize {
        let next = poly_pow_mod(&frob[j - 1], p, &f, p);
        frob.push(next);
    }
    if poly_trim(frob[d as usize].clone()) != x {
        return Ok(false);
    }
    for (r, _) in factorize(d) {
        let h = poly_sub(&frob[(d / r) as usize], &x, p);
        if poly_gcd(&f, &h, p).len() != 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn smallest_irreducible(p: u64, k: u32) -> Result<Vec<u64>, GfError> {
    let count = p.pow(k);
    for index in 0..count {
        let mut poly = Vec::with_capacity(k as usize + 1);
        let mut rest = index;
        for _ in 0..k {
            poly.push(rest % p);
            rest /= p;
        }
        poly.push(1);
        // A zero constant term means x divides the polynomial.
        if poly[0] != 0 && is_irreducible(&poly, p)? {
            return Ok(poly);
        }
    }
    Err(GfError::NoIrreducibleFound { p, k })
}

// ---------------------------------------------------------------------------
// Dense polynomials over GF(p), constant term first.

fn poly_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    if a.is_empty() {
        a.push(0);
    }
    a
}

fn poly_is_zero(a: &[u64]) -> bool {
    a.iter().all(|&c| c == 0)
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    out
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    poly_trim(out)
}

/// Remainder of `a` modulo `m` (any nonzero `m`).
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let m = poly_trim(m.to_vec());
    let dm = m.len() - 1;
    let lead_inv = crate::arith::inv_mod(m[dm], p).expect("nonzero leading coefficient");
    let mut r = poly_trim(a.to_vec());
    while r.len() > dm && !poly_is_zero(&r) {
        let shift = r.len() - 1 - dm;
        let factor = mul_mod(*r.last().unwrap(), lead_inv, p);
        for (i, &c) in m.iter().enumerate() {
            let sub = mul_mod(factor, c, p);
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        r = poly_trim(r);
    }
    r
}

fn poly_pow_mod(base: &[u64], mut exp: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = poly_rem(base, m, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = poly_rem(&poly_mul(&acc, &b, p), m, p);
        }
        b = poly_rem(&poly_mul(&b, &b, p), m, p);
        exp >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (poly_trim(a.to_vec()), poly_trim(b.to_vec()));
    while !poly_is_zero(&b) {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn fmt_poly(c: &[u64]) -> String {
    let terms: Vec<String> = c
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &x)| x != 0)
        .map(|(i, &x)| {
            let coef = if x == 1 && i > 0 {
                String::new()
            } else {
                x.to_string()
            };
            match i {
                0 => x.to_string(),
                1 => format!("{coef}x"),
                _ => format!("{coef}x^{i}"),
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

// ---------------------------------------------------------------------------
// Cubic extension GF(q³) of a base field GF(q).

/// Element of a [`CubicExtension`]: coefficients `c_0 + c_1 y + c_2 y²`
/// given as base-field indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExtElement(pub [u32; 3]);

impl ExtElement {
    pub fn is_zero(&self) -> bool {
        self.0 == [0, 0, 0]
    }
}

/// `GF(q³) = GF(q)[y] / (y³ + b₂y² + b₁y + b₀)` for the smallest cubic
/// without roots in `GF(q)` (index `b₀ + b₁q + b₂q²`).
///
/// Base-field arithmetic goes through precomputed `q × q` tables.
#[derive(Clone)]
pub struct CubicExtension {
    base: GfField,
    q: u32,
    /// `[b₀, b₁, b₂]`, base-field indices.
    modulus: [u32; 3],
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
}

impl fmt::Debug for CubicExtension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [b0, b1, b2] = self.modulus;
        write!(
            f,
            "{:?}[y] / (y^3 + [{b2}]y^2 + [{b1}]y + [{b0}])",
            self.base
        )
    }
}

impl CubicExtension {
    pub fn new(base: GfField) -> Result<Self, GfError> {
        let order = base.order();
        if order > MAX_CUBIC_BASE {
            return Err(GfError::OrderTooLarge {
                p: base.characteristic(),
                k: base.degree(),
            });
        }
        let q = order as usize;
        let elems: Vec<GfElement> = base.elements().collect();
        let mut add = vec![0u32; q * q];
        let mut mul = vec![0u32; q * q];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                add[i * q + j] = a.add(b)?.index() as u32;
                mul[i * q + j] = a.mul(b)?.index() as u32;
            }
        }
        let neg = elems.iter().map(|a| a.neg().index() as u32).collect();
        let mut ext = CubicExtension {
            base,
            q: q as u32,
            modulus: [0; 3],
            add,
            mul,
            neg,
        };
        let q3 = (q * q * q) as u32;
        let q = q as u32;
        ext.modulus = (0..q3)
            .map(|i| [i % q, (i / q) % q, i / (q * q)])
            .find(|m| (0..q).all(|x| ext.eval_monic_cubic(*m, x) != 0))
            .ok_or(GfError::NoIrreducibleFound {
                p: ext.base.characteristic(),
                k: 3 * ext.base.degree(),
            })?;
        Ok(ext)
    }

    pub fn base(&self) -> &GfField {
        &self.base
    }

    /// Size of the base field.
    pub fn base_order(&self) -> u64 {
        self.q as u64
    }

    /// `q³`.
    pub fn order(&self) -> u64 {
        (self.q as u64).pow(3)
    }

    /// Base-field indices `[b₀, b₁, b₂]` of the monic modulus.
    pub fn modulus(&self) -> [u32; 3] {
        self.modulus
    }

    #[inline]
    pub fn base_add(&self, a: u32, b: u32) -> u32 {
        self.add[(a * self.q + b) as usize]
    }

    #[inline]
    pub fn base_mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.q + b) as usize]
    }

    #[inline]
    pub fn base_neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    pub fn base_sub(&self, a: u32, b: u32) -> u32 {
        self.base_add(a, self.base_neg(b))
    }

    /// Inverse in the base field by table lookup.
    pub fn base_inv(&self, a: u32) -> Option<u32> {
        (1..self.q).find(|&b| self.base_mul(a, b) == 1)
    }

    fn eval_monic_cubic(&self, [b0, b1, b2]: [u32; 3], x: u32) -> u32 {
        // ((x + b2) x + b1) x + b0
        let mut acc = self.base_add(x, b2);
        acc = self.base_add(self.base_mul(acc, x), b1);
        self.base_add(self.base_mul(acc, x), b0)
    }

    pub fn zero(&self) -> ExtElement {
        ExtElement([0, 0, 0])
    }

    pub fn one(&self) -> ExtElement {
        ExtElement([1, 0, 0])
    }

    pub fn from_index(&self, index: u64) -> ExtElement {
        let q = self.q as u64;
        ExtElement([
            (index % q) as u32,
            ((index / q) % q) as u32,
            (index / (q * q)) as u32,
        ])
    }

    pub fn index(&self, a: ExtElement) -> u64 {
        let q = self.q as u64;
        a.0[0] as u64 + q * (a.0[1] as u64 + q * a.0[2] as u64)
    }

    /// Embeds a base-field element.
    pub fn embed(&self, c: u32) -> ExtElement {
        ExtElement([c, 0, 0])
    }

    pub fn add(&self, a: ExtElement, b: ExtElement) -> ExtElement {
        ExtElement([
            self.base_add(a.0[0], b.0[0]),
            self.base_add(a.0[1], b.0[1]),
            self.base_add(a.0[2], b.0[2]),
        ])
    }

    pub fn scale(&self, c: u32, a: ExtElement) -> ExtElement {
        ExtElement(a.0.map(|x| self.base_mul(c, x)))
    }

    pub fn mul(&self, a: ExtElement, b: ExtElement) -> ExtElement {
        let mut c = [0u32; 5];
        for i in 0..3 {
            for j in 0..3 {
                let t = self.base_mul(a.0[i], b.0[j]);
                c[i + j] = self.base_add(c[i + j], t);
            }
        }
        // y³ = −(b₂y² + b₁y + b₀); fold degrees 4 then 3.
        for d in (3..5).rev() {
            let lead = c[d];
            if lead == 0 {
                continue;
            }
            c[d] = 0;
            for (i, &b) in self.modulus.iter().enumerate() {
                let t = self.base_mul(lead, b);
                c[d - 3 + i] = self.base_sub(c[d - 3 + i], t);
            }
        }
        ExtElement([c[0], c[1], c[2]])
    }

    pub fn pow(&self, a: ExtElement, mut exp: u64) -> ExtElement {
        let mut acc = self.one();
        let mut base = a;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Least `t ≥ 1` with `a^t = 1`.
    pub fn element_order(&self, a: ExtElement) -> Result<u64, GfError> {
        if a.is_zero() {
            return Err(GfError::DivisionByZero);
        }
        let mut t = self.order() - 1;
        for (r, _) in factorize(t) {
            while t.is_multiple_of(r) && self.pow(a, t / r) == self.one() {
                t /= r;
            }
        }
        Ok(t)
    }

    /// Smallest element by index (skipping 0 and 1) of order `q³ − 1`.
    pub fn primitive_element(&self) -> ExtElement {
        let group = self.order() - 1;
        let primes: Vec<u64> = factorize(group).into_iter().map(|(r, _)| r).collect();
        (2..self.order())
            .map(|i| self.from_index(i))
            .find(|&a| primes.iter().all(|&r| self.pow(a, group / r) != self.one()))
            .expect("the multiplicative group of a finite field is cyclic")
    }

    /// Solves `c₀·1 + c₁·t = v` over the base field. `t` must lie outside the
    /// base field, so that `{1, t}` is linearly independent.
    pub fn solve_in_span(&self, t: ExtElement, v: ExtElement) -> Option<(u32, u32)> {
        let [t0, t1, t2] = t.0;
        let [v0, v1, v2] = v.0;
        // The y and y² coordinates must satisfy (v1, v2) = c1 (t1, t2).
        let det = self.base_sub(self.base_mul(t1, v2), self.base_mul(t2, v1));
        if det != 0 {
            return None;
        }
        let c1 = if t1 != 0 {
            self.base_mul(v1, self.base_inv(t1)?)
        } else {
            self.base_mul(v2, self.base_inv(t2)?)
        };
        let c0 = self.base_sub(v0, self.base_mul(c1, t0));
        Some((c0, c1))
    }
}
