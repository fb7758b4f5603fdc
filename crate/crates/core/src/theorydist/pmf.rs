use std::collections::BTreeMap;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, ToPrimitive};
use serde_json::{json, Map, Value};

use super::TheoryError;

/// Scalar types a [`Pmf`] can carry: exact rationals or floats.
pub trait Scalar: Clone + PartialOrd + Num + FromPrimitive + ToPrimitive + Debug {}

impl<T> Scalar for T where T: Clone + PartialOrd + Num + FromPrimitive + ToPrimitive + Debug {}

pub(crate) fn scalar<T: Scalar>(n: u64) -> T {
    T::from_u64(n).expect("integer fits the scalar type")
}

pub(crate) fn abs_diff<T: Scalar>(a: &T, b: &T) -> T {
    if a >= b {
        a.clone() - b.clone()
    } else {
        b.clone() - a.clone()
    }
}

/// A probability mass function on nonnegative integers. Zero masses are
/// never stored; equal outcomes are merged by addition.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf<T> {
    masses: BTreeMap<u64, T>,
}

impl<T: Scalar> Pmf<T> {
    /// Merges repeated outcomes and drops zero masses. Negative masses are
    /// rejected; total mass is not checked (see [`Pmf::total_mass`]).
    pub fn from_masses<I>(pairs: I) -> Result<Pmf<T>, TheoryError>
    where
        I: IntoIterator<Item = (u64, T)>,
    {
        let mut masses: BTreeMap<u64, T> = BTreeMap::new();
        for (k, p) in pairs {
            if p < T::zero() {
                return Err(TheoryError::NegativeMass { outcome: k });
            }
            let slot = masses.entry(k).or_insert_with(T::zero);
            *slot = slot.clone() + p;
        }
        masses.retain(|_, p| !p.is_zero());
        Ok(Pmf { masses })
    }

    /// Point mass at `k`.
    pub fn point(k: u64) -> Pmf<T> {
        Pmf { masses: BTreeMap::from([(k, T::one())]) }
    }

    pub fn mass(&self, k: u64) -> T {
        self.masses.get(&k).cloned().unwrap_or_else(T::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &T)> {
        self.masses.iter().map(|(&k, p)| (k, p))
    }

    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.masses.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn total_mass(&self) -> T {
        self.masses.values().fold(T::zero(), |acc, p| acc + p.clone())
    }

    pub fn mean(&self) -> T {
        self.masses
            .iter()
            .fold(T::zero(), |acc, (&k, p)| acc + scalar::<T>(k) * p.clone())
    }

    /// Distribution of the sum of independent draws.
    pub fn convolve(&self, other: &Pmf<T>) -> Pmf<T> {
        let mut out: BTreeMap<u64, T> = BTreeMap::new();
        for (&a, pa) in &self.masses {
            for (&b, pb) in &other.masses {
                let slot = out.entry(a + b).or_insert_with(T::zero);
                *slot = slot.clone() + pa.clone() * pb.clone();
            }
        }
        out.retain(|_, p| !p.is_zero());
        Pmf { masses: out }
    }

    pub fn map_scalar<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Pmf<U> {
        Pmf { masses: self.masses.iter().map(|(&k, p)| (k, f(p))).collect() }
    }

    pub fn to_f64(&self) -> Pmf<f64> {
        self.map_scalar(|p| p.to_f64().unwrap_or(f64::NAN))
    }
}

/// Law of the sum of `count` i.i.d. copies of `x`, by repeated squaring.
pub fn total_dist<T: Scalar>(x: &Pmf<T>, count: u32) -> Pmf<T> {
    let mut acc = Pmf::point(0);
    let mut base = x.clone();
    let mut e = count;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.convolve(&base);
        }
        e >>= 1;
        if e > 0 {
            base = base.convolve(&base);
        }
    }
    acc
}

/// `P(X_i = k_i for all i)` for i.i.d. `X_i ~ x`.
pub fn joint_prob<T: Scalar>(x: &Pmf<T>, outcomes: &[u64]) -> T {
    outcomes.iter().fold(T::one(), |acc, &k| acc * x.mass(k))
}

/// Half the l1 distance over the union of supports.
pub fn tv_distance<T: Scalar>(a: &Pmf<T>, b: &Pmf<T>) -> T {
    let mut keys: Vec<u64> = a.support().chain(b.support()).collect();
    keys.sort_unstable();
    keys.dedup();
    let sum = keys
        .into_iter()
        .fold(T::zero(), |acc, k| acc + abs_diff(&a.mass(k), &b.mass(k)));
    sum / scalar::<T>(2)
}

pub type Rational = BigRational;

/// `{num, den}` with decimal-string integers.
pub fn rational_json(r: &Rational) -> Value {
    json!({ "num": r.numer().to_string(), "den": r.denom().to_string() })
}

pub fn rational_from_json(v: &Value) -> Option<Rational> {
    let num: BigInt = v.get("num")?.as_str()?.parse().ok()?;
    let den: BigInt = v.get("den")?.as_str()?.parse().ok()?;
    if den == BigInt::from(0) {
        return None;
    }
    Some(Rational::new(num, den))
}

impl Pmf<Rational> {
    /// JSON object mapping each outcome to `{num, den}`.
    pub fn to_json(&self) -> Value {
        let map: Map<String, Value> = self
            .masses
            .iter()
            .map(|(k, p)| (k.to_string(), rational_json(p)))
            .collect();
        Value::Object(map)
    }

    pub fn from_json(v: &Value) -> Result<Pmf<Rational>, TheoryError> {
        let obj = v.as_object().ok_or(TheoryError::MalformedJson)?;
        let pairs = obj
            .iter()
            .map(|(k, p)| {
                let k: u64 = k.parse().map_err(|_| TheoryError::MalformedJson)?;
                let p = rational_from_json(p).ok_or(TheoryError::MalformedJson)?;
                Ok((k, p))
            })
            .collect::<Result<Vec<_>, TheoryError>>()?;
        Pmf::from_masses(pairs)
    }
}
