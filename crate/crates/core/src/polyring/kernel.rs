//! Coefficient-slice kernels shared by [`Poly`](super::Poly) and the scan
//! loops. Slices are low-to-high with no trailing zeros; the empty slice is
//! the zero polynomial.

use crate::ff::{FieldElement as Fe, FieldSpec};

#[inline]
pub(crate) fn trim(v: &mut Vec<Fe>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

pub(crate) fn add(f: &FieldSpec, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.to_vec();
    for (o, &s) in out.iter_mut().zip(short) {
        *o = f.add(*o, s);
    }
    trim(&mut out);
    out
}

pub(crate) fn sub(f: &FieldSpec, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    let mut out = a.to_vec();
    if b.len() > out.len() {
        out.resize(b.len(), Fe::ZERO);
    }
    for (o, &s) in out.iter_mut().zip(b) {
        *o = f.sub(*o, s);
    }
    trim(&mut out);
    out
}

pub(crate) fn scale(f: &FieldSpec, a: &[Fe], c: Fe) -> Vec<Fe> {
    if c.is_zero() {
        return Vec::new();
    }
    a.iter().map(|&x| f.mul(x, c)).collect()
}

pub(crate) fn mul(f: &FieldSpec, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Fe::ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(&mut out);
    out
}

/// `a <- a mod b`, `b` nonzero.
pub(crate) fn rem_in_place(f: &FieldSpec, a: &mut Vec<Fe>, b: &[Fe]) {
    let db = b.len() - 1;
    let inv_lead = f.inv(b[db]);
    while a.len() > db {
        let top = a.len() - 1;
        let c = f.mul(a[top], inv_lead);
        let base = top - db;
        for i in 0..db {
            a[base + i] = f.sub(a[base + i], f.mul(c, b[i]));
        }
        a.pop();
        trim(a);
    }
}

/// Quotient and remainder, `b` nonzero.
pub(crate) fn divrem(f: &FieldSpec, a: &[Fe], b: &[Fe]) -> (Vec<Fe>, Vec<Fe>) {
    let db = b.len() - 1;
    if a.len() <= db {
        return (Vec::new(), a.to_vec());
    }
    let inv_lead = f.inv(b[db]);
    let mut r = a.to_vec();
    let mut quot = vec![Fe::ZERO; a.len() - db];
    while r.len() > db {
        let top = r.len() - 1;
        let c = f.mul(r[top], inv_lead);
        let base = top - db;
        quot[base] = c;
        for i in 0..db {
            r[base + i] = f.sub(r[base + i], f.mul(c, b[i]));
        }
        r.pop();
        trim(&mut r);
    }
    trim(&mut quot);
    (quot, r)
}

/// Exact division; the caller guarantees `b | a`.
pub(crate) fn div_exact(f: &FieldSpec, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    let (quot, r) = divrem(f, a, b);
    debug_assert!(r.is_empty(), "inexact division");
    quot
}

pub(crate) fn make_monic(f: &FieldSpec, a: &mut [Fe]) {
    if let Some(&lead) = a.last() {
        if lead != Fe::ONE {
            let inv = f.inv(lead);
            for c in a.iter_mut() {
                *c = f.mul(*c, inv);
            }
        }
    }
}

/// Monic gcd; `gcd(0, 0) = 0`.
pub(crate) fn gcd(f: &FieldSpec, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    while !y.is_empty() {
        rem_in_place(f, &mut x, &y);
        std::mem::swap(&mut x, &mut y);
    }
    make_monic(f, &mut x);
    x
}

pub(crate) fn derivative(f: &FieldSpec, a: &[Fe]) -> Vec<Fe> {
    if a.len() <= 1 {
        return Vec::new();
    }
    let mut out: Vec<Fe> = a[1..]
        .iter()
        .enumerate()
        .map(|(i, &c)| f.mul(c, f.from_int(i as i64 + 1)))
        .collect();
    trim(&mut out);
    out
}

#[inline]
pub(crate) fn eval(f: &FieldSpec, a: &[Fe], x: Fe) -> Fe {
    a.iter().rev().fold(Fe::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
}

/// Multiplicity of the root `x0` and the value of the cofactor there.
/// `a` must be nonzero.
pub(crate) fn valuation_and_unit(f: &FieldSpec, a: &[Fe], x0: Fe) -> (u32, Fe) {
    let mut cur = a.to_vec();
    let mut s = 0u32;
    let mut quot = Vec::with_capacity(a.len());
    loop {
        // synthetic division by (x - x0)
        quot.clear();
        let mut acc = Fe::ZERO;
        for &c in cur.iter().rev() {
            acc = f.add(f.mul(acc, x0), c);
            quot.push(acc);
        }
        let rem = quot.pop().unwrap_or(Fe::ZERO);
        if !rem.is_zero() || cur.len() <= 1 {
            return (s, rem);
        }
        quot.reverse();
        std::mem::swap(&mut cur, &mut quot);
        s += 1;
    }
}

pub(crate) fn mulmod(f: &FieldSpec, a: &[Fe], b: &[Fe], m: &[Fe]) -> Vec<Fe> {
    let mut out = mul(f, a, b);
    rem_in_place(f, &mut out, m);
    out
}

pub(crate) fn powmod(f: &FieldSpec, base: &[Fe], mut e: u64, m: &[Fe]) -> Vec<Fe> {
    let mut b = base.to_vec();
    rem_in_place(f, &mut b, m);
    let mut acc = vec![Fe::ONE];
    rem_in_place(f, &mut acc, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(f, &acc, &b, m);
        }
        b = mulmod(f, &b, &b, m);
        e >>= 1;
    }
    acc
}

/// `h` with `h^p = a`, for `a` whose exponents are all multiples of `p`.
pub(crate) fn pth_root(f: &FieldSpec, a: &[Fe]) -> Vec<Fe> {
    let p = f.p() as usize;
    debug_assert!(a.iter().enumerate().all(|(i, c)| i % p == 0 || c.is_zero()));
    a.iter().step_by(p).map(|&c| f.pth_root(c)).collect()
}

/// Square-free decomposition of a monic polynomial: pairs `(A_i, i)` with
/// `prod A_i^i = a`. Multiplicities may repeat before [`merge_parts`].
pub(crate) fn squarefree_parts(f: &FieldSpec, a: &[Fe]) -> Vec<(Vec<Fe>, u32)> {
    let mut out = Vec::new();
    if a.len() <= 1 {
        return out;
    }
    let da = derivative(f, a);
    let mut c = gcd(f, a, &da);
    let mut w = div_exact(f, a, &c);
    let mut i = 1u32;
    while w.len() > 1 {
        let y = gcd(f, &w, &c);
        let fac = div_exact(f, &w, &y);
        if fac.len() > 1 {
            out.push((fac, i));
        }
        c = div_exact(f, &c, &y);
        w = y;
        i += 1;
    }
    if c.len() > 1 {
        // what remains is a p-th power
        let root = pth_root(f, &c);
        let p = f.p();
        out.extend(squarefree_parts(f, &root).into_iter().map(|(g, j)| (g, j * p)));
    }
    out
}

/// Combines parts of equal multiplicity and sorts by multiplicity.
pub(crate) fn merge_parts(f: &FieldSpec, parts: Vec<(Vec<Fe>, u32)>) -> Vec<(Vec<Fe>, u32)> {
    let mut merged: std::collections::BTreeMap<u32, Vec<Fe>> = std::collections::BTreeMap::new();
    for (g, i) in parts {
        merged
            .entry(i)
            .and_modify(|acc| *acc = mul(f, acc, &g))
            .or_insert(g);
    }
    merged.into_iter().map(|(i, g)| (g, i)).collect()
}

/// Largest multiplicity of an irreducible factor; 0 for constants.
pub(crate) fn max_multiplicity(f: &FieldSpec, a: &[Fe]) -> u32 {
    multiplicity_profile(f, a).0
}

thread_local! {
    static SCRATCH: std::cell::RefCell<(Vec<Fe>, Vec<Fe>)> = const {
        std::cell::RefCell::new((Vec::new(), Vec::new()))
    };
}

/// `gcd(a, a') = 1` for nonconstant `a`, using per-thread buffers.
pub(crate) fn coprime_to_derivative(f: &FieldSpec, a: &[Fe]) -> bool {
    SCRATCH.with(|cell| {
        let (x, y) = &mut *cell.borrow_mut();
        x.clear();
        x.extend_from_slice(a);
        y.clear();
        y.extend(a[1..].iter().enumerate().map(|(i, &c)| f.mul(c, f.from_int(i as i64 + 1))));
        trim(y);
        if y.is_empty() {
            return false;
        }
        while !y.is_empty() {
            rem_in_place(f, x, y);
            std::mem::swap(x, y);
        }
        x.len() == 1
    })
}

/// `(max, gcd)` of the irreducible-factor multiplicities; `(0, 0)` for
/// constants.
pub(crate) fn multiplicity_profile(f: &FieldSpec, a: &[Fe]) -> (u32, u32) {
    if a.len() <= 1 {
        return (0, 0);
    }
    if coprime_to_derivative(f, a) {
        return (1, 1);
    }
    let mut monic = a.to_vec();
    make_monic(f, &mut monic);
    let parts = squarefree_parts(f, &monic);
    let max = parts.iter().map(|&(_, i)| i).max().unwrap_or(0);
    let common = parts.iter().fold(0u32, |acc, &(_, i)| num_integer::Integer::gcd(&acc, &i));
    (max, common)
}

/// Number of irreducible factors of a monic square-free polynomial, by
/// distinct-degree factorization.
pub(crate) fn count_irreducible_factors(f: &FieldSpec, a: &[Fe]) -> usize {
    let q = f.q() as u64;
    let x = [Fe::ZERO, Fe::ONE];
    let mut rest = a.to_vec();
    let mut h = x.to_vec();
    rem_in_place(f, &mut h, &rest);
    let mut count = 0;
    let mut i = 1;
    while rest.len() > 2 * i {
        h = powmod(f, &h, q, &rest);
        let hx = sub(f, &h, &x);
        let g = gcd(f, &rest, &hx);
        if g.len() > 1 {
            count += (g.len() - 1) / i;
            rest = div_exact(f, &rest, &g);
            rem_in_place(f, &mut h, &rest);
        }
        i += 1;
    }
    if rest.len() > 1 {
        count += 1;
    }
    count
}
