use std::ops::Range;
use std::sync::Arc;

use super::{Poly, PolyError};
use crate::ff::{FieldElement, FieldSpec};

/// Default cap on the number of polynomials a single enumeration may yield.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 10_000_000;

/// Number of polynomials of exact degree `d`: `(q - 1) q^d`.
pub fn degree_count(q: u32, d: usize) -> u128 {
    (q as u128 - 1) * (q as u128).pow(d as u32)
}

/// All polynomials of exact degree `d`, in index order: the index written
/// in base `q` gives the coefficients with the constant term fastest, and
/// the leading coefficient is `1 + index / q^d`.
#[derive(Clone)]
pub struct DegreeEnumerator {
    field: Arc<FieldSpec>,
    coeffs: Vec<FieldElement>,
    next: u128,
    end: u128,
}

pub fn enumerate_degree_d(
    field: Arc<FieldSpec>,
    d: usize,
    budget: u128,
) -> Result<DegreeEnumerator, PolyError> {
    let count = degree_count(field.q(), d);
    if count > budget {
        return Err(PolyError::BudgetExceeded { count, budget });
    }
    enumerate_range(field, d, 0..count)
}

/// A contiguous sub-range of the index order, for partitioned scans.
pub fn enumerate_range(
    field: Arc<FieldSpec>,
    d: usize,
    range: Range<u128>,
) -> Result<DegreeEnumerator, PolyError> {
    let count = degree_count(field.q(), d);
    if range.start > range.end || range.end > count {
        return Err(PolyError::RangeOutOfBounds { start: range.start, end: range.end, count });
    }
    let coeffs = coeffs_at(field.q(), d, range.start.min(count.saturating_sub(1)));
    Ok(DegreeEnumerator { field, coeffs, next: range.start, end: range.end })
}

/// Coefficients of the polynomial at `index` in the order above.
pub(crate) fn coeffs_at(q: u32, d: usize, index: u128) -> Vec<FieldElement> {
    let q = q as u128;
    let mut rest = index;
    let mut out = Vec::with_capacity(d + 1);
    for _ in 0..d {
        out.push(FieldElement((rest % q) as u32));
        rest /= q;
    }
    out.push(FieldElement(rest as u32 + 1));
    out
}

/// Inverse of [`coeffs_at`] for a polynomial of exact degree `d`.
pub(crate) fn index_of(q: u32, coeffs: &[FieldElement]) -> u128 {
    let q = q as u128;
    let d = coeffs.len() - 1;
    let lead = (coeffs[d].0 as u128 - 1) * q.pow(d as u32);
    coeffs[..d]
        .iter()
        .rev()
        .fold(0u128, |acc, c| acc * q + c.0 as u128)
        + lead
}

/// Advances coefficients to the next index; returns false on wrap-around.
#[inline]
pub(crate) fn advance(q: u32, coeffs: &mut [FieldElement]) -> bool {
    let d = coeffs.len() - 1;
    for c in coeffs[..d].iter_mut() {
        c.0 += 1;
        if c.0 < q {
            return true;
        }
        c.0 = 0;
    }
    coeffs[d].0 += 1;
    coeffs[d].0 < q
}

impl DegreeEnumerator {
    pub fn len_remaining(&self) -> u128 {
        self.end - self.next
    }
}

impl Iterator for DegreeEnumerator {
    type Item = Poly;

    fn next(&mut self) -> Option<Poly> {
        if self.next >= self.end {
            return None;
        }
        let out = Poly::from_trimmed(self.field.clone(), self.coeffs.clone());
        self.next += 1;
        if self.next < self.end {
            advance(self.field.q(), &mut self.coeffs);
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = usize::try_from(self.len_remaining()).unwrap_or(usize::MAX);
        (n, Some(n))
    }
}

impl Poly {
    /// The polynomial at `index` among those of exact degree `d`.
    pub fn from_index(field: Arc<FieldSpec>, d: usize, index: u128) -> Result<Poly, PolyError> {
        let count = degree_count(field.q(), d);
        if index >= count {
            return Err(PolyError::RangeOutOfBounds { start: index, end: index + 1, count });
        }
        let coeffs = coeffs_at(field.q(), d, index);
        Ok(Poly::from_trimmed(field, coeffs))
    }

    /// Position in the enumeration order of its degree.
    pub fn index(&self) -> Result<u128, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        Ok(index_of(self.field.q(), &self.coeffs))
    }
}
