//! Finite fields `F_q`, `q = p^k`, backed by exp/log/Zech tables.
//!
//! Elements are identified by their canonical integer encoding: the
//! coefficients of the polynomial-basis representation (against the field
//! modulus) read as base-`p` digits, constant term least significant. In
//! particular the prime subfield `F_p` is encoded as `0..p` in every
//! extension.

use std::fmt;

use num_integer::Integer;
use thiserror::Error;

/// Default upper bound on `q` for table-backed fields.
pub const DEFAULT_FIELD_BOUND: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field size {p}^{k} exceeds the configured bound {bound}")]
    TooLarge { p: u64, k: u32, bound: u64 },
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("zero has no power residue class")]
    ZeroResidue,
    #[error("element {value} does not belong to F_{q}")]
    ForeignElement { value: u64, q: u32 },
}

/// An element of some [`FieldSpec`], by canonical encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[repr(transparent)]
pub struct FieldElement(pub(crate) u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

const NO_LOG: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum AddKind {
    Prime,
    Binary,
    Zech,
}

/// A finite field with precomputed multiplicative tables.
///
/// Immutable after construction; share it behind an `Arc` across workers.
#[derive(Clone)]
pub struct FieldSpec {
    p: u32,
    k: u32,
    q: u32,
    /// Monic modulus over `F_p`, low-to-high, length `k + 1`. For `k = 1`
    /// this is just `x`.
    modulus: Vec<u32>,
    generator: FieldElement,
    add_kind: AddKind,
    /// `exp[i] = g^i`, stored twice over so `log a + log b` needs no reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
    /// `zech[i] = log(1 + g^i)`, `NO_LOG` when `1 + g^i = 0`.
    zech: Vec<u32>,
    neg: Vec<u32>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("modulus", &self.modulus_string())
            .field("generator", &self.generator.0)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Builds `F_{p^k}` with the default size bound.
pub fn make_field(p: u64, k: u32) -> Result<FieldSpec, FieldError> {
    make_field_with_bound(p, k, DEFAULT_FIELD_BOUND)
}

pub fn make_field_with_bound(p: u64, k: u32, bound: u64) -> Result<FieldSpec, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if k == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let too_large = FieldError::TooLarge { p, k, bound };
    let q = p
        .checked_pow(k)
        .filter(|&q| q <= bound && q <= u32::MAX as u64)
        .ok_or(too_large)?;
    let (p, q) = (p as u32, q as u32);

    let modulus = if k == 1 {
        vec![0, 1]
    } else {
        smallest_irreducible(p, k as usize)
    };
    let basis = PolyBasis { p, k: k as usize, modulus: &modulus };

    let order = q - 1;
    let generator = if q == 2 {
        1
    } else {
        (2..q)
            .find(|&c| basis.multiplicative_order(c) == order)
            .expect("F_q^* is cyclic")
    };

    let mut exp = vec![0u32; 2 * order as usize];
    let mut log = vec![NO_LOG; q as usize];
    let mut acc = 1u32;
    for i in 0..order {
        exp[i as usize] = acc;
        exp[(i + order) as usize] = acc;
        log[acc as usize] = i;
        acc = basis.mul(acc, generator);
    }
    debug_assert_eq!(acc, 1);

    let neg: Vec<u32> = (0..q).map(|a| basis.neg(a)).collect();
    let zech: Vec<u32> = (0..order)
        .map(|i| {
            let s = basis.add(1, exp[i as usize]);
            if s == 0 {
                NO_LOG
            } else {
                log[s as usize]
            }
        })
        .collect();

    let add_kind = if k == 1 {
        AddKind::Prime
    } else if p == 2 {
        AddKind::Binary
    } else {
        AddKind::Zech
    };

    Ok(FieldSpec {
        p,
        k,
        q,
        modulus,
        generator: FieldElement(generator),
        add_kind,
        exp,
        log,
        zech,
        neg,
    })
}

impl FieldSpec {
    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.k
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn generator(&self) -> FieldElement {
        self.generator
    }

    /// Coefficients of the modulus over `F_p`, low-to-high.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Human-readable modulus, e.g. `x^2+x+1 over F_2`, or `F_7` for prime fields.
    pub fn modulus_string(&self) -> String {
        if self.k == 1 {
            return format!("F_{}", self.p);
        }
        let mut terms = Vec::new();
        for (i, &c) in self.modulus.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coef = if c == 1 && i > 0 { String::new() } else { c.to_string() };
            let term = match i {
                0 => coef,
                1 => format!("{coef}x"),
                _ => format!("{coef}x^{i}"),
            };
            terms.push(term);
        }
        format!("{} over F_{}", terms.join("+"), self.p)
    }

    /// Validates a canonical encoding.
    pub fn element(&self, value: u64) -> Result<FieldElement, FieldError> {
        if value < self.q as u64 {
            Ok(FieldElement(value as u32))
        } else {
            Err(FieldError::ForeignElement { value, q: self.q })
        }
    }

    /// The image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.q).map(FieldElement)
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        a.0 < self.q
    }

    fn check(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        self.element(a.0 as u64)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match self.add_kind {
            AddKind::Prime => {
                let s = a.0 + b.0;
                FieldElement(if s >= self.p { s - self.p } else { s })
            }
            AddKind::Binary => FieldElement(a.0 ^ b.0),
            AddKind::Zech => {
                if a.0 == 0 {
                    return b;
                }
                if b.0 == 0 {
                    return a;
                }
                let order = self.q - 1;
                let la = self.log[a.0 as usize];
                let lb = self.log[b.0 as usize];
                let diff = if lb >= la { lb - la } else { lb + order - la };
                let z = self.zech[diff as usize];
                if z == NO_LOG {
                    FieldElement::ZERO
                } else {
                    FieldElement(self.exp[(la + z) as usize])
                }
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let idx = self.log[a.0 as usize] + self.log[b.0 as usize];
        FieldElement(self.exp[idx as usize])
    }

    /// Inverse of a nonzero element. Panics on zero; see [`FieldSpec::try_inv`].
    #[inline]
    pub fn inv(&self, a: FieldElement) -> FieldElement {
        assert!(a.0 != 0, "inverse of zero in F_{}", self.q);
        let order = self.q - 1;
        let l = self.log[a.0 as usize];
        FieldElement(self.exp[((order - l) % order) as usize])
    }

    pub fn try_inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        let a = self.check(a)?;
        if a.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.inv(a))
    }

    pub fn try_add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.add(self.check(a)?, self.check(b)?))
    }

    pub fn try_sub(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.sub(self.check(a)?, self.check(b)?))
    }

    pub fn try_mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(self.check(a)?, self.check(b)?))
    }

    pub fn try_div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(self.check(a)?, self.try_inv(b)?))
    }

    /// Square-and-multiply. `0^0 = 1`.
    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Discrete logarithm to the base of [`FieldSpec::generator`].
    pub fn log(&self, a: FieldElement) -> Option<u32> {
        match self.log.get(a.0 as usize) {
            Some(&l) if l != NO_LOG => Some(l),
            _ => None,
        }
    }

    pub fn exp(&self, i: u64) -> FieldElement {
        FieldElement(self.exp[(i % (self.q as u64 - 1)) as usize])
    }

    pub fn frobenius(&self, a: FieldElement) -> FieldElement {
        self.pow(a, self.p as u64)
    }

    /// `p^{-1}`-th power, the inverse of Frobenius.
    pub fn pth_root(&self, a: FieldElement) -> FieldElement {
        self.pow(a, (self.q / self.p) as u64)
    }

    /// Whether `a` lies in `(F_q^*)^r`.
    pub fn is_rth_power(&self, a: FieldElement, r: u64) -> Result<bool, FieldError> {
        let a = self.check(a)?;
        if a.is_zero() {
            return Err(FieldError::ZeroResidue);
        }
        let order = (self.q - 1) as u64;
        Ok(self.pow(a, order / r.gcd(&order)) == FieldElement::ONE)
    }

    /// Same predicate as [`FieldSpec::is_rth_power`], read off the log table.
    #[inline]
    pub(crate) fn is_rth_power_nonzero(&self, a: FieldElement, r: u64) -> bool {
        let order = (self.q - 1) as u64;
        (self.log[a.0 as usize] as u64) % r.gcd(&order) == 0
    }

    /// Number of `y` in `F_q` with `y^m = a`.
    pub fn root_count(&self, a: FieldElement, m: u64) -> u64 {
        if a.is_zero() {
            1
        } else if self.is_rth_power_nonzero(a, m) {
            m.gcd(&((self.q - 1) as u64))
        } else {
            0
        }
    }
}

/// Raw polynomial-basis arithmetic on canonical encodings, used only to
/// bootstrap the tables.
struct PolyBasis<'a> {
    p: u32,
    k: usize,
    modulus: &'a [u32],
}

impl PolyBasis<'_> {
    fn digits(&self, mut a: u32) -> Vec<u32> {
        let mut out = vec![0; self.k];
        for d in out.iter_mut() {
            *d = a % self.p;
            a /= self.p;
        }
        out
    }

    fn encode(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        let (da, db) = (self.digits(a), self.digits(b));
        let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        self.encode(&sum)
    }

    fn neg(&self, a: u32) -> u32 {
        let d: Vec<u32> = self.digits(a).iter().map(|&x| (self.p - x) % self.p).collect();
        self.encode(&d)
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u64; 2 * self.k];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        // reduce by the monic modulus from the top down
        for top in (self.k..2 * self.k).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            for (i, &m) in self.modulus.iter().enumerate() {
                let idx = top - self.k + i;
                prod[idx] = (prod[idx] + (p - c) * m as u64) % p;
            }
        }
        let low: Vec<u32> = prod[..self.k].iter().map(|&x| x as u32).collect();
        self.encode(&low)
    }

    fn multiplicative_order(&self, a: u32) -> u32 {
        let mut acc = a;
        let mut n = 1;
        while acc != 1 {
            acc = self.mul(acc, a);
            n += 1;
            if acc == 0 {
                return 0;
            }
        }
        n
    }
}

/// Smallest monic irreducible of degree `k` over `F_p`, with lower
/// coefficients in lexicographic order (constant term fastest).
fn smallest_irreducible(p: u32, k: usize) -> Vec<u32> {
    let count = (p as u64).pow(k as u32);
    (0..count)
        .map(|idx| {
            let mut coeffs = Vec::with_capacity(k + 1);
            let mut rest = idx;
            for _ in 0..k {
                coeffs.push((rest % p as u64) as u32);
                rest /= p as u64;
            }
            coeffs.push(1);
            coeffs
        })
        .find(|c| is_irreducible_mod_p(c, p))
        .expect("irreducible polynomials exist in every degree")
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
pub(crate) fn is_irreducible_mod_p(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    if f[0] == 0 {
        return deg == 1;
    }
    for dd in 1..=deg / 2 {
        let count = (p as u64).pow(dd as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(dd + 1);
            let mut rest = idx;
            for _ in 0..dd {
                g.push((rest % p as u64) as u32);
                rest /= p as u64;
            }
            g.push(1);
            if divides_mod_p(&g, f, p) {
                return false;
            }
        }
    }
    true
}

fn divides_mod_p(g: &[u32], f: &[u32], p: u32) -> bool {
    let p64 = p as u64;
    let mut r: Vec<u64> = f.iter().map(|&c| c as u64).collect();
    let dg = g.len() - 1;
    for top in (dg..r.len()).rev() {
        let c = r[top];
        if c == 0 {
            continue;
        }
        for (i, &gc) in g.iter().enumerate() {
            let idx = top - dg + i;
            r[idx] = (r[idx] + (p64 - c) * gc as u64) % p64;
        }
    }
    r[..dg].iter().all(|&c| c == 0)
}
