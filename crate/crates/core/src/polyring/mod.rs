//! Polynomials over `F_q`: arithmetic, square-free structure, Möbius,
//! root valuations, exhaustive enumeration and the exact counting
//! identities for n-th power-free polynomials.

mod counting;
pub(crate) mod enumerate;
pub(crate) mod fast;
pub(crate) mod kernel;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_integer::Integer;
use thiserror::Error;

use crate::ff::{FieldElement, FieldError, FieldSpec};

pub use counting::{count_nth_power_free, zeta_value};
pub use fast::MultiplicityEngine;
pub use enumerate::{degree_count, enumerate_degree_d, enumerate_range, DegreeEnumerator, DEFAULT_ENUMERATION_BUDGET};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("operands live over different fields")]
    MixedFields,
    #[error("constant polynomial has no power structure")]
    ConstantPolynomial,
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
    #[error("enumeration of {count} polynomials exceeds the budget {budget}")]
    BudgetExceeded { count: u128, budget: u128 },
    #[error("index range {start}..{end} outside 0..{count}")]
    RangeOutOfBounds { start: u128, end: u128, count: u128 },
    #[error("zeta has a pole at s = {0}")]
    ZetaPole(i64),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A polynomial over a shared [`FieldSpec`], coefficients low-to-high with
/// no trailing zeros.
#[derive(Clone)]
pub struct Poly {
    field: Arc<FieldSpec>,
    coeffs: Vec<FieldElement>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && same_field(&self.field, &other.field)
    }
}

impl Eq for Poly {}

fn same_field(a: &Arc<FieldSpec>, b: &Arc<FieldSpec>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Square-free decomposition `unit * prod A_i^i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquarefreeDecomposition {
    pub unit: FieldElement,
    /// `(A_i, i)` sorted by multiplicity; each `A_i` monic, square-free,
    /// nonconstant, pairwise coprime.
    pub parts: Vec<(Poly, u32)>,
}

impl SquarefreeDecomposition {
    pub fn max_multiplicity(&self) -> u32 {
        self.parts.iter().map(|&(_, i)| i).max().unwrap_or(0)
    }

    /// Multiplies the decomposition back out.
    pub fn reconstruct(&self, field: &Arc<FieldSpec>) -> Poly {
        let mut acc = Poly::constant(field.clone(), self.unit);
        for (a, i) in &self.parts {
            acc = &acc * &a.pow(*i);
        }
        acc
    }
}

impl Poly {
    pub fn new(field: Arc<FieldSpec>, mut coeffs: Vec<FieldElement>) -> Result<Poly, PolyError> {
        for &c in &coeffs {
            field.element(c.value() as u64)?;
        }
        kernel::trim(&mut coeffs);
        Ok(Poly { field, coeffs })
    }

    pub(crate) fn from_trimmed(field: Arc<FieldSpec>, coeffs: Vec<FieldElement>) -> Poly {
        debug_assert!(coeffs.last().map_or(true, |c| !c.is_zero()));
        Poly { field, coeffs }
    }

    /// From canonical integer encodings, low-to-high.
    pub fn from_values(field: Arc<FieldSpec>, values: &[u64]) -> Result<Poly, PolyError> {
        let coeffs = values
            .iter()
            .map(|&v| field.element(v))
            .collect::<Result<Vec<_>, _>>()?;
        Poly::new(field, coeffs)
    }

    /// Parses the comma-separated text format, e.g. `"1,0,2"` for `2x^2+1`.
    pub fn parse(field: Arc<FieldSpec>, text: &str) -> Result<Poly, PolyError> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Poly::zero(field));
        }
        let values = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| PolyError::Parse(format!("bad coefficient {t:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Poly::from_values(field, &values)
    }

    /// The comma-separated text format; the zero polynomial is `"0"`.
    pub fn to_text(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        self.coeffs
            .iter()
            .map(|c| c.value().to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn zero(field: Arc<FieldSpec>) -> Poly {
        Poly { field, coeffs: Vec::new() }
    }

    pub fn one(field: Arc<FieldSpec>) -> Poly {
        Poly::constant(field, FieldElement::ONE)
    }

    pub fn constant(field: Arc<FieldSpec>, c: FieldElement) -> Poly {
        let coeffs = if c.is_zero() { Vec::new() } else { vec![c] };
        Poly { field, coeffs }
    }

    /// `x`.
    pub fn x(field: Arc<FieldSpec>) -> Poly {
        Poly { field, coeffs: vec![FieldElement::ZERO, FieldElement::ONE] }
    }

    /// `x - x0`.
    pub fn linear_root(field: Arc<FieldSpec>, x0: FieldElement) -> Poly {
        let c = field.neg(x0);
        Poly { field, coeffs: vec![c, FieldElement::ONE] }
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or(FieldElement::ZERO)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> FieldElement {
        self.coeffs.last().copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == FieldElement::ONE
    }

    pub fn monic(&self) -> Poly {
        let mut c = self.coeffs.clone();
        kernel::make_monic(&self.field, &mut c);
        Poly::from_trimmed(self.field.clone(), c)
    }

    fn compatible(&self, other: &Poly) -> Result<(), PolyError> {
        if same_field(&self.field, &other.field) {
            Ok(())
        } else {
            Err(PolyError::MixedFields)
        }
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.compatible(other)?;
        Ok(self.wrap(kernel::add(&self.field, &self.coeffs, &other.coeffs)))
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.compatible(other)?;
        Ok(self.wrap(kernel::sub(&self.field, &self.coeffs, &other.coeffs)))
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.compatible(other)?;
        Ok(self.wrap(kernel::mul(&self.field, &self.coeffs, &other.coeffs)))
    }

    pub fn scale(&self, c: FieldElement) -> Poly {
        self.wrap(kernel::scale(&self.field, &self.coeffs, c))
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.field.clone());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn divrem(&self, divisor: &Poly) -> Result<(Poly, Poly), PolyError> {
        self.compatible(divisor)?;
        if divisor.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let (q, r) = kernel::divrem(&self.field, &self.coeffs, &divisor.coeffs);
        Ok((self.wrap(q), self.wrap(r)))
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.compatible(other)?;
        Ok(self.wrap(kernel::gcd(&self.field, &self.coeffs, &other.coeffs)))
    }

    pub fn derivative(&self) -> Poly {
        self.wrap(kernel::derivative(&self.field, &self.coeffs))
    }

    pub fn eval(&self, x0: FieldElement) -> FieldElement {
        kernel::eval(&self.field, &self.coeffs, x0)
    }

    /// `f(x - c)`.
    pub fn shift(&self, c: FieldElement) -> Poly {
        let lin = Poly::linear_root(self.field.clone(), c);
        let mut acc = Poly::zero(self.field.clone());
        for &coef in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &Poly::constant(self.field.clone(), coef);
        }
        acc
    }

    fn wrap(&self, coeffs: Vec<FieldElement>) -> Poly {
        Poly::from_trimmed(self.field.clone(), coeffs)
    }

    pub fn squarefree_decompose(&self) -> Result<SquarefreeDecomposition, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let unit = self.leading();
        let monic = self.monic();
        let parts = kernel::merge_parts(&self.field, kernel::squarefree_parts(&self.field, &monic.coeffs));
        Ok(SquarefreeDecomposition {
            unit,
            parts: parts.into_iter().map(|(g, i)| (self.wrap(g), i)).collect(),
        })
    }

    /// No nonconstant `g` with `g^n | f`.
    pub fn is_nth_power_free(&self, n: u32) -> Result<bool, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        Ok(kernel::max_multiplicity(&self.field, &self.coeffs) < n)
    }

    pub fn is_squarefree(&self) -> Result<bool, PolyError> {
        self.is_nth_power_free(2)
    }

    /// Möbius function; nonzero constants map to 1.
    pub fn mobius(&self) -> Result<i8, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        if self.is_constant() {
            return Ok(1);
        }
        if !self.is_squarefree()? {
            return Ok(0);
        }
        let k = kernel::count_irreducible_factors(&self.field, &self.monic().coeffs);
        Ok(if k % 2 == 0 { 1 } else { -1 })
    }

    pub fn is_irreducible(&self) -> bool {
        if self.is_constant() {
            return false;
        }
        kernel::max_multiplicity(&self.field, &self.coeffs) == 1
            && kernel::count_irreducible_factors(&self.field, &self.monic().coeffs) == 1
    }

    /// Largest `r` with `f = g^r` over the algebraic closure: the gcd of the
    /// square-free multiplicities.
    pub fn bar_power(&self) -> Result<u32, PolyError> {
        if self.is_constant() {
            return Err(PolyError::ConstantPolynomial);
        }
        let dec = self.squarefree_decompose()?;
        Ok(dec.parts.iter().fold(0u32, |acc, &(_, i)| acc.gcd(&i)))
    }

    /// Largest `r` with `f = g^r`, `g` over `F_q`.
    pub fn power_over_fq(&self) -> Result<u32, PolyError> {
        let bar = self.bar_power()?;
        let unit = self.leading();
        let r = (1..=bar)
            .rev()
            .filter(|r| bar % r == 0)
            .find(|&r| self.field.is_rth_power_nonzero(unit, r as u64))
            .unwrap_or(1);
        Ok(r)
    }

    /// `(s, a)` with `f = (x - x0)^s g`, `a = g(x0) != 0`.
    pub fn valuation_and_unit(&self, x0: FieldElement) -> Result<(u32, FieldElement), PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        Ok(kernel::valuation_and_unit(&self.field, &self.coeffs, x0))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            let coef = if c.value() == 1 && i > 0 { String::new() } else { c.to_string() };
            match i {
                0 => write!(f, "{coef}")?,
                1 => write!(f, "{coef}x")?,
                _ => write!(f, "{coef}x^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self} over F_{})", self.field.q())
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                self.$checked(rhs).expect("polynomials over different fields")
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let c = self.coeffs.iter().map(|&c| self.field.neg(c)).collect();
        self.wrap(c)
    }
}

#[cfg(test)]
mod tests;
