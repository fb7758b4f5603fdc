use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::PolyError;

/// `1 / (1 - q^{1-s})`, exact.
pub fn zeta_value(q: u64, s: i64) -> Result<BigRational, PolyError> {
    if s <= 1 {
        return Err(PolyError::ZetaPole(s));
    }
    let qp = BigInt::from(q).pow((s - 1) as u32);
    // 1 / (1 - 1/q^{s-1}) = q^{s-1} / (q^{s-1} - 1)
    Ok(BigRational::new(qp.clone(), qp - BigInt::one()))
}

/// Number of n-th power-free polynomials of exact degree `d` over `F_q`.
pub fn count_nth_power_free(q: u64, n: u32, d: u32) -> BigInt {
    let q = BigInt::from(q);
    let unit_count = &q - BigInt::one();
    if d < n {
        return unit_count * q.pow(d);
    }
    unit_count * (q.pow(d) - q.pow(d - n + 1))
}
