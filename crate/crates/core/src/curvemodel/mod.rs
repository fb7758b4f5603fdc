//! Superelliptic models `y^m = f(x)`: per-x point counts on the affine
//! curve and on its normalization, and irreducibility classification.

pub mod oracle;

use std::sync::Arc;

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::ff::{FieldElement, FieldSpec};
use crate::polyring::{Poly, PolyError};

pub use oracle::DEFAULT_ORACLE_BOUND;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("m = {m} must be at least 2")]
    DegreeTooSmall { m: u32 },
    #[error("q = {q} and m = {m} are not coprime")]
    NotCoprime { q: u32, m: u32 },
    #[error("f is the zero polynomial")]
    ZeroPolynomial,
    #[error("f is constant")]
    ConstantPolynomial,
    #[error("y^m - f is geometrically reducible; the normalization count is undefined")]
    GeometricallyReducible,
    #[error("splitting field of size at least {needed} exceeds the oracle bound {bound}")]
    SplittingFieldTooLarge { needed: u128, bound: u128 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `gcd(m, s)` with `gcd(m, 0) = m`.
#[inline]
pub fn branch_degree(m: u32, s: u32) -> u32 {
    m.gcd(&s)
}

/// Degree-1 points of the normalization over a point with valuation `s` and
/// unit `a`: `gcd(m, s, q-1)` when `a` is a `gcd(m, s)`-th power, else 0.
#[inline]
pub fn local_normalization_count(field: &FieldSpec, m: u32, s: u32, a: FieldElement) -> u32 {
    let d = branch_degree(m, s);
    if field.is_rth_power_nonzero(a, d as u64) {
        d.gcd(&(field.q() - 1))
    } else {
        0
    }
}

/// The curve `y^m = f(x)` over `F_q`.
#[derive(Debug, Clone)]
pub struct SuperellipticModel {
    m: u32,
    f: Poly,
}

impl SuperellipticModel {
    pub fn new(m: u32, f: Poly) -> Result<SuperellipticModel, CurveError> {
        if m < 2 {
            return Err(CurveError::DegreeTooSmall { m });
        }
        let q = f.field().q();
        if q.gcd(&m) != 1 {
            return Err(CurveError::NotCoprime { q, m });
        }
        if f.is_zero() {
            return Err(CurveError::ZeroPolynomial);
        }
        Ok(SuperellipticModel { m, f })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        self.f.field()
    }

    /// Solutions `y` of `y^m = f(x0)`.
    pub fn affine_count_at(&self, x0: FieldElement) -> u32 {
        self.field().root_count(self.f.eval(x0), self.m as u64) as u32
    }

    /// `y^m - f` irreducible over the algebraic closure, i.e.
    /// `gcd(m, bar_power(f)) = 1`.
    pub fn is_geometrically_irreducible(&self) -> Result<bool, CurveError> {
        if self.f.is_constant() {
            return Err(CurveError::ConstantPolynomial);
        }
        Ok(self.f.bar_power()?.gcd(&self.m) == 1)
    }

    /// Binomial criterion over `F_q(x)`: reducible iff `f` is an `l`-th power
    /// for a prime `l | m`, or `4 | m` and `f` lies in `-4 (F_q(x))^4`.
    pub fn is_irreducible_over_fq(&self) -> Result<bool, CurveError> {
        if self.f.is_constant() {
            return Err(CurveError::ConstantPolynomial);
        }
        let power = self.f.power_over_fq()?;
        let m = self.m;
        let prime_power = (2..=m)
            .filter(|&l| m % l == 0 && crate::ff::is_prime(l as u64))
            .any(|l| power % l == 0);
        if prime_power {
            return Ok(false);
        }
        if m % 4 == 0 && self.f.bar_power()? % 4 == 0 {
            let field = self.field();
            let minus_four = field.neg(field.from_int(4));
            if !minus_four.is_zero() {
                let ratio = field.mul(self.f.leading(), field.inv(minus_four));
                if field.is_rth_power_nonzero(ratio, 4) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn require_geometrically_irreducible(&self) -> Result<(), CurveError> {
        if self.is_geometrically_irreducible()? {
            Ok(())
        } else {
            Err(CurveError::GeometricallyReducible)
        }
    }

    /// Degree-1 points of the normalization lying over `x = x0`.
    pub fn normalization_count_at(&self, x0: FieldElement) -> Result<u32, CurveError> {
        self.require_geometrically_irreducible()?;
        let (s, a) = self.f.valuation_and_unit(x0)?;
        Ok(local_normalization_count(self.field(), self.m, s, a))
    }

    /// Same count as [`Self::normalization_count_at`], by enumerating the
    /// roots of `z^gcd(m,s) = a` in a splitting field and counting those
    /// fixed by Frobenius.
    pub fn branch_orbit_count(&self, x0: FieldElement, bound: u128) -> Result<u32, CurveError> {
        self.require_geometrically_irreducible()?;
        let (s, a) = self.f.valuation_and_unit(x0)?;
        let d = branch_degree(self.m, s) as u64;
        oracle::frobenius_fixed_roots(self.field(), d, a, bound)
            .map(|n| n as u32)
            .map_err(|e| CurveError::SplittingFieldTooLarge { needed: e.needed_at_least, bound: e.bound })
    }

    /// Local data at every `x0` in `F_q` plus the structural flags; `n` is
    /// the power-freeness exponent to report.
    pub fn profile(&self, n: u32) -> CurveProfile {
        let field = self.field();
        let constant = self.f.is_constant();
        let geometric = !constant && self.is_geometrically_irreducible().unwrap_or(false);
        let irreducible = !constant && self.is_irreducible_over_fq().unwrap_or(false);
        let points: Vec<LocalPointData> = field
            .elements()
            .map(|x0| {
                let (s, a) = self.f.valuation_and_unit(x0).expect("f is nonzero");
                let affine = if s > 0 {
                    1
                } else {
                    field.root_count(a, self.m as u64) as u32
                };
                let normalized = geometric.then(|| local_normalization_count(field, self.m, s, a));
                LocalPointData { x0: x0.value(), s, a: a.value(), affine, normalized }
            })
            .collect();
        let total_affine = points.iter().map(|p| p.affine as u64).sum();
        let total_normalized = points
            .iter()
            .map(|p| p.normalized.map(u64::from))
            .sum::<Option<u64>>();
        let max_mult = self.f.squarefree_decompose().expect("f is nonzero").max_multiplicity();
        CurveProfile {
            m: self.m,
            q: field.q(),
            n,
            points,
            total_affine,
            total_normalized,
            smooth: max_mult <= 1,
            geometrically_irreducible: geometric,
            irreducible_over_fq: irreducible,
            n_power_free: max_mult < n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalPointData {
    pub x0: u32,
    pub s: u32,
    pub a: u32,
    pub affine: u32,
    /// `None` when `y^m - f` is geometrically reducible.
    pub normalized: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurveProfile {
    pub m: u32,
    pub q: u32,
    pub n: u32,
    pub points: Vec<LocalPointData>,
    pub total_affine: u64,
    pub total_normalized: Option<u64>,
    pub smooth: bool,
    pub geometrically_irreducible: bool,
    pub irreducible_over_fq: bool,
    pub n_power_free: bool,
}
