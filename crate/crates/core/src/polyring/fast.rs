//! Allocation-free multiplicity profiles for the scan loops: bit-packed
//! polynomials over `F_2`, and byte-table arithmetic on fixed arrays for
//! fields of size at most 256. Anything larger goes through [`kernel`].

use std::sync::Arc;

use num_integer::Integer;

use super::kernel;
use crate::ff::{FieldElement as Fe, FieldSpec};

/// Longest coefficient vector the fixed-array backends accept.
pub(crate) const FAST_CAP: usize = 64;

trait Backend {
    type P: Copy;
    fn p(&self) -> u32;
    /// `None` for the zero polynomial.
    fn degree(&self, a: &Self::P) -> Option<usize>;
    fn derivative(&self, a: &Self::P) -> Self::P;
    /// Monic gcd; `gcd(a, 0)` is `a` made monic.
    fn gcd(&self, a: &Self::P, b: &Self::P) -> Self::P;
    fn div_exact(&self, a: &Self::P, b: &Self::P) -> Self::P;
    fn pth_root(&self, a: &Self::P) -> Self::P;
}

fn positive_degree<B: Backend>(b: &B, a: &B::P) -> bool {
    b.degree(a).is_some_and(|d| d >= 1)
}

/// Same loop as [`kernel::squarefree_parts`], folding multiplicities into
/// their max and gcd instead of collecting factors.
fn profile<B: Backend>(b: &B, a: &B::P, scale: u32, max: &mut u32, common: &mut u32) {
    let da = b.derivative(a);
    let mut c = b.gcd(a, &da);
    let mut w = b.div_exact(a, &c);
    let mut i = 1u32;
    while positive_degree(b, &w) {
        let y = b.gcd(&w, &c);
        let fac = b.div_exact(&w, &y);
        if positive_degree(b, &fac) {
            *max = (*max).max(i * scale);
            *common = common.gcd(&(i * scale));
        }
        c = b.div_exact(&c, &y);
        w = y;
        i += 1;
    }
    if positive_degree(b, &c) {
        let root = b.pth_root(&c);
        profile(b, &root, scale * b.p(), max, common);
    }
}

fn run_profile<B: Backend>(b: &B, a: &B::P) -> (u32, u32) {
    if !positive_degree(b, a) {
        return (0, 0);
    }
    let da = b.derivative(a);
    if b.degree(&da).is_some() && b.degree(&b.gcd(a, &da)) == Some(0) {
        return (1, 1);
    }
    let (mut max, mut common) = (0, 0);
    profile(b, a, 1, &mut max, &mut common);
    (max, common)
}

/// `F_2[x]` with bit `i` holding the coefficient of `x^i`.
struct Gf2;

impl Backend for Gf2 {
    type P = u64;

    fn p(&self) -> u32 {
        2
    }

    #[inline]
    fn degree(&self, a: &u64) -> Option<usize> {
        (*a != 0).then(|| 63 - a.leading_zeros() as usize)
    }

    #[inline]
    fn derivative(&self, a: &u64) -> u64 {
        (a >> 1) & 0x5555_5555_5555_5555
    }

    #[inline]
    fn gcd(&self, a: &u64, b: &u64) -> u64 {
        let (mut x, mut y) = (*a, *b);
        while y != 0 {
            let dy = 63 - y.leading_zeros();
            while x != 0 && 63 - x.leading_zeros() >= dy {
                x ^= y << (63 - x.leading_zeros() - dy);
            }
            std::mem::swap(&mut x, &mut y);
        }
        x
    }

    #[inline]
    fn div_exact(&self, a: &u64, b: &u64) -> u64 {
        let db = 63 - b.leading_zeros();
        let (mut r, mut quot) = (*a, 0u64);
        while r != 0 && 63 - r.leading_zeros() >= db {
            let shift = 63 - r.leading_zeros() - db;
            quot |= 1 << shift;
            r ^= b << shift;
        }
        debug_assert_eq!(r, 0, "inexact division");
        quot
    }

    fn pth_root(&self, a: &u64) -> u64 {
        (0..32).filter(|j| (a >> (2 * j)) & 1 == 1).fold(0, |acc, j| acc | 1 << j)
    }
}

#[derive(Clone, Copy)]
struct Sp {
    c: [u8; FAST_CAP],
    len: usize,
}

impl Sp {
    const ZERO: Sp = Sp { c: [0; FAST_CAP], len: 0 };

    #[inline]
    fn trim(&mut self) {
        while self.len > 0 && self.c[self.len - 1] == 0 {
            self.len -= 1;
        }
    }
}

/// Byte tables for a field with at most 256 elements.
struct SmallField {
    q: usize,
    p: u32,
    sub: Vec<u8>,
    mul: Vec<u8>,
    inv: Vec<u8>,
    /// Image of the integer `i mod p`.
    int: Vec<u8>,
    proot: Vec<u8>,
}

impl SmallField {
    fn new(field: &FieldSpec) -> SmallField {
        let q = field.q() as usize;
        let el = |v: usize| Fe(v as u32);
        let table = |op: &dyn Fn(Fe, Fe) -> Fe| {
            let mut t = vec![0u8; q * q];
            for a in 0..q {
                for b in 0..q {
                    t[a * q + b] = op(el(a), el(b)).0 as u8;
                }
            }
            t
        };
        SmallField {
            q,
            p: field.p(),
            sub: table(&|a, b| field.sub(a, b)),
            mul: table(&|a, b| field.mul(a, b)),
            inv: (0..q).map(|a| if a == 0 { 0 } else { field.inv(el(a)).0 as u8 }).collect(),
            int: (0..field.p()).map(|i| field.from_int(i as i64).0 as u8).collect(),
            proot: (0..q).map(|a| field.pth_root(el(a)).0 as u8).collect(),
        }
    }

    #[inline]
    fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    fn sub(&self, a: u8, b: u8) -> u8 {
        self.sub[a as usize * self.q + b as usize]
    }

    fn make_monic(&self, a: &mut Sp) {
        if a.len > 0 && a.c[a.len - 1] != 1 {
            let inv = self.inv[a.c[a.len - 1] as usize];
            for c in a.c[..a.len].iter_mut() {
                *c = self.mul(*c, inv);
            }
        }
    }

    /// `a <- a mod b` for monic `b`.
    #[inline]
    fn rem_monic(&self, a: &mut Sp, b: &Sp) {
        let db = b.len - 1;
        while a.len > db {
            let top = a.len - 1;
            let c = a.c[top];
            let base = top - db;
            let row = &self.mul[c as usize * self.q..(c as usize + 1) * self.q];
            for i in 0..db {
                let t = row[b.c[i] as usize];
                a.c[base + i] = self.sub(a.c[base + i], t);
            }
            a.len -= 1;
            a.trim();
        }
    }
}

impl Backend for SmallField {
    type P = Sp;

    fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    fn degree(&self, a: &Sp) -> Option<usize> {
        a.len.checked_sub(1)
    }

    fn derivative(&self, a: &Sp) -> Sp {
        let mut out = Sp::ZERO;
        if a.len > 1 {
            let p = self.p as usize;
            for i in 1..a.len {
                out.c[i - 1] = self.mul(a.c[i], self.int[i % p]);
            }
            out.len = a.len - 1;
            out.trim();
        }
        out
    }

    fn gcd(&self, a: &Sp, b: &Sp) -> Sp {
        let (mut x, mut y) = (*a, *b);
        while y.len > 0 {
            self.make_monic(&mut y);
            self.rem_monic(&mut x, &y);
            std::mem::swap(&mut x, &mut y);
        }
        self.make_monic(&mut x);
        x
    }

    fn div_exact(&self, a: &Sp, b: &Sp) -> Sp {
        let db = b.len - 1;
        let mut r = *a;
        let mut quot = Sp::ZERO;
        if r.len <= db {
            return quot;
        }
        quot.len = r.len - db;
        let inv_lead = self.inv[b.c[db] as usize];
        while r.len > db {
            let top = r.len - 1;
            let c = self.mul(r.c[top], inv_lead);
            let base = top - db;
            quot.c[base] = c;
            for i in 0..db {
                r.c[base + i] = self.sub(r.c[base + i], self.mul(c, b.c[i]));
            }
            r.len -= 1;
            r.trim();
        }
        debug_assert_eq!(r.len, 0, "inexact division");
        quot.trim();
        quot
    }

    fn pth_root(&self, a: &Sp) -> Sp {
        let p = self.p as usize;
        let mut out = Sp::ZERO;
        if a.len > 0 {
            let deg = a.len - 1;
            for j in 0..=deg / p {
                out.c[j] = self.proot[a.c[j * p] as usize];
            }
            out.len = deg / p + 1;
            out.trim();
        }
        out
    }
}

/// Computes `(max, gcd)` of the irreducible-factor multiplicities of a
/// nonzero polynomial, choosing the fastest backend for the field.
pub struct MultiplicityEngine {
    field: Arc<FieldSpec>,
    small: Option<SmallField>,
}

impl MultiplicityEngine {
    pub fn new(field: Arc<FieldSpec>) -> MultiplicityEngine {
        let small = (field.q() <= 256 && field.q() > 2).then(|| SmallField::new(&field));
        MultiplicityEngine { field, small }
    }

    /// `(0, 0)` for constants; `coeffs` must be trimmed and nonzero.
    pub fn profile(&self, coeffs: &[Fe]) -> (u32, u32) {
        if coeffs.len() <= FAST_CAP {
            if self.field.q() == 2 {
                let bits = coeffs.iter().enumerate().fold(0u64, |acc, (i, c)| acc | (c.0 as u64) << i);
                return run_profile(&Gf2, &bits);
            }
            if let Some(small) = &self.small {
                let mut a = Sp::ZERO;
                for (slot, c) in a.c.iter_mut().zip(coeffs) {
                    *slot = c.0 as u8;
                }
                a.len = coeffs.len();
                return run_profile(small, &a);
            }
        }
        kernel::multiplicity_profile(&self.field, coeffs)
    }

    pub fn max_multiplicity(&self, coeffs: &[Fe]) -> u32 {
        self.profile(coeffs).0
    }
}
