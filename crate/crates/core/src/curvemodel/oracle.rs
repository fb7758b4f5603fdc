//! Frobenius-orbit count of degree-1 branches, computed in an explicit
//! splitting field of `z^d = a` rather than from power residues in `F_q`.

use std::sync::Arc;

use crate::ff::{FieldElement as Fe, FieldSpec};
use crate::polyring::{kernel, Poly};

/// Default cap on the size of splitting fields built by the oracle.
pub const DEFAULT_ORACLE_BOUND: u128 = 1 << 40;

/// `F_{q^e} = F_q[t]/(M(t))` in polynomial basis, no tables.
pub struct ExtensionField {
    base: Arc<FieldSpec>,
    modulus: Vec<Fe>,
    degree: usize,
    order: u128,
}

impl ExtensionField {
    /// Uses the first monic irreducible of degree `e` in enumeration order.
    pub fn new(base: Arc<FieldSpec>, e: usize) -> ExtensionField {
        let q = base.q() as u128;
        let modulus = (0..q.pow(e as u32))
            .map(|i| Poly::from_index(base.clone(), e, i).expect("index in range"))
            .find(|m| m.is_irreducible())
            .expect("irreducible polynomials exist in every degree")
            .coeffs()
            .to_vec();
        ExtensionField { order: q.pow(e as u32), base, modulus, degree: e }
    }

    pub fn order(&self) -> u128 {
        self.order
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn embed(&self, a: Fe) -> Vec<Fe> {
        if a.is_zero() {
            Vec::new()
        } else {
            vec![a]
        }
    }

    /// The element with canonical index `i`: base-`q` digits as coefficients.
    pub fn element(&self, mut i: u128) -> Vec<Fe> {
        let q = self.base.q() as u128;
        let mut out = Vec::with_capacity(self.degree);
        for _ in 0..self.degree {
            out.push(Fe((i % q) as u32));
            i /= q;
        }
        kernel::trim(&mut out);
        out
    }

    pub fn mul(&self, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
        kernel::mulmod(&self.base, a, b, &self.modulus)
    }

    pub fn pow(&self, a: &[Fe], mut e: u128) -> Vec<Fe> {
        let mut acc = vec![Fe::ONE];
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn frobenius(&self, a: &[Fe]) -> Vec<Fe> {
        self.pow(a, self.base.q() as u128)
    }

    fn is_one(a: &[Fe]) -> bool {
        a == [Fe::ONE]
    }

    /// Smallest-index generator of the multiplicative group.
    pub fn generator(&self) -> Vec<Fe> {
        let n = self.order - 1;
        let primes = prime_factors(n);
        (1..self.order)
            .map(|i| self.element(i))
            .find(|g| primes.iter().all(|&r| !Self::is_one(&self.pow(g, n / r))))
            .expect("multiplicative group is cyclic")
    }
}

pub(crate) fn prime_factors(mut n: u128) -> Vec<u128> {
    let mut out = Vec::new();
    let mut d = 2u128;
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

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplittingTooLarge {
    pub needed_at_least: u128,
    pub bound: u128,
}

/// Degree of the smallest extension of `F_q` over which `z^d - a` splits.
pub(crate) fn splitting_degree(base: &FieldSpec, d: u64, a: Fe, bound: u128) -> Result<usize, SplittingTooLarge> {
    let q = base.q() as u128;
    let group = (q - 1) as u64;
    let mut order = q;
    let mut e = 1usize;
    loop {
        if order > bound {
            return Err(SplittingTooLarge { needed_at_least: order, bound });
        }
        let n = order - 1;
        // d | q^e - 1 gives all d-th roots of unity; a must also be a d-th power there
        if n % d as u128 == 0 {
            let exponent = ((n / d as u128) % group as u128) as u64;
            if base.pow(a, exponent) == Fe::ONE {
                return Ok(e);
            }
        }
        e += 1;
        order = match order.checked_mul(q) {
            Some(o) => o,
            None => return Err(SplittingTooLarge { needed_at_least: u128::MAX, bound }),
        };
    }
}

/// Number of roots of `z^d = a` (in a splitting field) fixed by `z -> z^q`.
pub fn frobenius_fixed_roots(
    base: &Arc<FieldSpec>,
    d: u64,
    a: Fe,
    bound: u128,
) -> Result<u64, SplittingTooLarge> {
    assert!(!a.is_zero() && d >= 1);
    let e = splitting_degree(base, d, a, bound)?;
    let ext = ExtensionField::new(base.clone(), e);
    let n = ext.order() - 1;
    let g = ext.generator();

    // g^{n/(q-1)} generates the copy of F_q^*; find the exponent hitting a
    let q1 = base.q() as u128 - 1;
    let h = ext.pow(&g, n / q1);
    let target = ext.embed(a);
    let mut acc = vec![Fe::ONE];
    let mut j = 0u128;
    while acc != target {
        acc = ext.mul(&acc, &h);
        j += 1;
        assert!(j < q1, "a lies outside the copy of F_q");
    }
    let log_a = j * (n / q1);
    let d = d as u128;
    assert!(log_a % d == 0, "z^d = a does not split over the chosen extension");

    let step = n / d;
    let roots: Vec<Vec<Fe>> = (0..d)
        .map(|i| ext.pow(&g, log_a / d + i * step))
        .collect();
    for (i, z) in roots.iter().enumerate() {
        assert_eq!(ext.pow(z, d), target, "not a root");
        assert!(roots[..i].iter().all(|w| w != z), "repeated root");
    }
    Ok(roots.iter().filter(|z| ext.frobenius(z) == **z).count() as u64)
}
