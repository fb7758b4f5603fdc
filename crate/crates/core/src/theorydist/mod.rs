//! Limiting distributions of per-x point counts, built in any [`Scalar`]
//! (exact rationals for verification, floats for display).
//!
//! A site `x_i` contributes `X_i` points; as `deg f` grows over n-th
//! power-free `f`, the `X_i` become i.i.d. with the laws constructed here.
//! Both laws come from the same conditional structure: the valuation of
//! `f` at a site is `s` with probability `q^{-s}(1-q^{-1})/(1-q^{-n})` for
//! `0 <= s < n`, and given `s` the unit value is uniform on `F_q^*`.

mod pmf;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use pmf::{joint_prob, rational_from_json, rational_json, total_dist, tv_distance, Pmf, Rational, Scalar};

use pmf::scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("q = {q} and m = {m} are not coprime")]
    NotCoprime { q: u32, m: u32 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("m = {0} must be at least 2")]
    DegreeTooSmall(u32),
    #[error("n = {0} must be at least 2")]
    ExponentTooSmall(u32),
    #[error("negative mass at outcome {outcome}")]
    NegativeMass { outcome: u64 },
    #[error("wrong variant for this distribution")]
    WrongVariant,
    #[error("q = {0} is not 1 mod 3")]
    NotTrigonal(u32),
    #[error("malformed distribution JSON")]
    MalformedJson,
}

/// Which curve the counts are taken on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// The affine model `y^m = f(x)` itself.
    Singular,
    /// Its normalization.
    Normalization,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremParams {
    pub q: u32,
    pub m: u32,
    pub n: u32,
    pub variant: Variant,
}

pub(crate) fn is_prime_power(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let p = (2..=q).find(|d| q % d == 0).unwrap();
    let mut r = q;
    while r % p == 0 {
        r /= p;
    }
    r == 1
}

impl TheoremParams {
    pub fn new(q: u32, m: u32, n: u32, variant: Variant) -> Result<TheoremParams, TheoryError> {
        if !is_prime_power(q) {
            return Err(TheoryError::NotPrimePower(q));
        }
        if m < 2 {
            return Err(TheoryError::DegreeTooSmall(m));
        }
        if n < 2 {
            return Err(TheoryError::ExponentTooSmall(n));
        }
        if q.gcd(&m) != 1 {
            return Err(TheoryError::NotCoprime { q, m });
        }
        Ok(TheoremParams { q, m, n, variant })
    }

    pub fn distribution<T: Scalar>(&self) -> Pmf<T> {
        match self.variant {
            Variant::Singular => singular_masses(self),
            Variant::Normalization => normalization_masses(self),
        }
    }
}

fn inv_pow<T: Scalar>(q: u32, e: u32) -> T {
    T::one() / num_traits::pow(scalar::<T>(q as u64), e as usize)
}

/// `(1 - q^{-1}) / (1 - q^{-n})`: probability that a site is not a root.
fn unit_weight<T: Scalar>(q: u32, n: u32) -> T {
    (T::one() - inv_pow::<T>(q, 1)) / (T::one() - inv_pow::<T>(q, n))
}

/// Per-site law for the affine model: outcomes `0`, `1`, `gcd(m, q-1)`.
pub fn xj_singular<T: Scalar>(params: &TheoremParams) -> Result<Pmf<T>, TheoryError> {
    if params.variant != Variant::Singular {
        return Err(TheoryError::WrongVariant);
    }
    Ok(singular_masses(params))
}

fn singular_masses<T: Scalar>(params: &TheoremParams) -> Pmf<T> {
    let TheoremParams { q, m, n, .. } = *params;
    let g = m.gcd(&(q - 1));
    let base = unit_weight::<T>(q, n);
    let inv_g = T::one() / scalar::<T>(g as u64);
    let root = (inv_pow::<T>(q, 1) - inv_pow::<T>(q, n)) / (T::one() - inv_pow::<T>(q, n));
    Pmf::from_masses([
        (0, (T::one() - inv_g.clone()) * base.clone()),
        (1, root),
        (g as u64, inv_g * base),
    ])
    .expect("masses are nonnegative")
}

/// Per-site law for the normalization.
pub fn xj_normalization<T: Scalar>(params: &TheoremParams) -> Result<Pmf<T>, TheoryError> {
    if params.variant != Variant::Normalization {
        return Err(TheoryError::WrongVariant);
    }
    Ok(normalization_masses(params))
}

/// Valuation weight `P(s)` and branch count `gcd(m, s, q-1)` for each `s < n`.
fn valuation_branches<T: Scalar>(params: &TheoremParams) -> Vec<(T, u32)> {
    let TheoremParams { q, m, n, .. } = *params;
    let base = unit_weight::<T>(q, n);
    (0..n)
        .map(|s| {
            let weight = inv_pow::<T>(q, s) * base.clone();
            (weight, m.gcd(&s).gcd(&(q - 1)))
        })
        .collect()
}

fn normalization_masses<T: Scalar>(params: &TheoremParams) -> Pmf<T> {
    let pairs = valuation_branches::<T>(params).into_iter().flat_map(|(w, big_n)| {
        let inv = T::one() / scalar::<T>(big_n as u64);
        [
            (big_n as u64, w.clone() * inv.clone()),
            (0, w * (T::one() - inv)),
        ]
    });
    Pmf::from_masses(pairs).expect("masses are nonnegative")
}

/// The normalization law with the zero outcome taken in the unweighted form
/// `sum_s (1 - 1/N_s)(1-q^{-1})/(1-q^{-n})`. Kept only to report how it
/// compares with the valuation-weighted law; it need not sum to 1.
pub fn printed_normalization_masses<T: Scalar>(params: &TheoremParams) -> Vec<(u64, T)> {
    let base = unit_weight::<T>(params.q, params.n);
    let branches = valuation_branches::<T>(params);
    let zero = branches.iter().fold(T::zero(), |acc, (_, big_n)| {
        acc + (T::one() - T::one() / scalar::<T>(*big_n as u64)) * base.clone()
    });
    let mut out = std::collections::BTreeMap::<u64, T>::new();
    out.insert(0, zero);
    for (w, big_n) in branches {
        let slot = out.entry(big_n as u64).or_insert_with(T::zero);
        *slot = slot.clone() + w / scalar::<T>(big_n as u64);
    }
    out.into_iter().collect()
}

pub fn mean<T: Scalar>(x: &Pmf<T>) -> T {
    x.mean()
}

/// `q^{a}` for a possibly negative integer exponent.
fn signed_pow<T: Scalar>(q: u32, e: i64) -> T {
    let mag = num_traits::pow(scalar::<T>(q as u64), e.unsigned_abs() as usize);
    if e >= 0 {
        mag
    } else {
        T::one() / mag
    }
}

/// Main term `q^{d-l}(q-1) / (zeta(n) (1-q^{-n})^l)` for the number of
/// n-th power-free degree-`d` polynomials taking prescribed nonzero values
/// at `l` distinct points.
pub fn interpolation_main_term<T: Scalar>(q: u32, n: u32, d: u32, l: u32) -> T {
    let zeta_inv = T::one() - signed_pow::<T>(q, 1 - n as i64);
    let local = num_traits::pow(T::one() - inv_pow::<T>(q, n), l as usize);
    signed_pow::<T>(q, d as i64 - l as i64) * scalar::<T>(q as u64 - 1) * zeta_inv / local
}

/// Main term when every point of `F_q` has a prescribed valuation `s_i` and
/// unit value: `q^{d - sum s - q}(q-1) / (zeta(n) (1-q^{-n})^q)`.
pub fn refined_main_term<T: Scalar>(q: u32, n: u32, d: u32, valuations: &[u32]) -> T {
    assert_eq!(valuations.len(), q as usize, "one valuation per field element");
    let shift: i64 = valuations.iter().map(|&s| s as i64).sum();
    let zeta_inv = T::one() - signed_pow::<T>(q, 1 - n as i64);
    let local = num_traits::pow(T::one() - inv_pow::<T>(q, n), q as usize);
    signed_pow::<T>(q, d as i64 - shift - q as i64) * scalar::<T>(q as u64 - 1) * zeta_inv / local
}

/// The cyclic trigonal per-site laws for `q = 1 mod 3`: the one obtained as
/// `deg f` grows (masses `2/3, q^{-1}+q^{-2}, 1/3` over `1+q^{-1}+q^{-2}`)
/// and the one obtained when every part of the signature grows (masses
/// `2/3, 2q^{-1}, 1/3` over `1+2q^{-1}`).
pub fn trigonal_contrast<T: Scalar>(q: u32) -> Result<(Pmf<T>, Pmf<T>), TheoryError> {
    if q % 3 != 1 || !is_prime_power(q) {
        return Err(TheoryError::NotTrigonal(q));
    }
    let two_thirds = scalar::<T>(2) / scalar::<T>(3);
    let third = T::one() / scalar::<T>(3);
    let qi = inv_pow::<T>(q, 1);
    let qi2 = inv_pow::<T>(q, 2);

    let den = T::one() + qi.clone() + qi2.clone();
    let degree_limit = Pmf::from_masses([
        (0, two_thirds.clone() / den.clone()),
        (1, (qi.clone() + qi2) / den.clone()),
        (3, third.clone() / den),
    ])?;

    let den = T::one() + scalar::<T>(2) * qi.clone();
    let signature_limit = Pmf::from_masses([
        (0, two_thirds / den.clone()),
        (1, scalar::<T>(2) * qi / den.clone()),
        (3, third / den),
    ])?;
    Ok((degree_limit, signature_limit))
}
