use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use super::*;
use crate::ff::make_field;

fn field(p: u64, k: u32) -> Arc<FieldSpec> {
    Arc::new(make_field(p, k).unwrap())
}

fn poly(f: &Arc<FieldSpec>, values: &[u64]) -> Poly {
    Poly::from_values(f.clone(), values).unwrap()
}

fn fe(v: u32) -> FieldElement {
    FieldElement(v)
}

/// All monic polynomials of exact degree `d`.
fn monics(f: &Arc<FieldSpec>, d: usize) -> Vec<Poly> {
    let q = f.q() as u128;
    (0..q.pow(d as u32))
        .map(|i| Poly::from_index(f.clone(), d, i).unwrap())
        .collect()
}

/// Trial-division oracle: some monic `g` of degree `1..=deg/n` has `g^n | f`.
fn naive_has_nth_power_divisor(f: &Poly, n: u32) -> bool {
    let d = f.degree().unwrap();
    (1..=d / n as usize).any(|dg| {
        monics(f.field(), dg)
            .iter()
            .any(|g| f.divrem(&g.pow(n)).unwrap().1.is_zero())
    })
}

/// Full factorization by trial division, returning irreducible factors with
/// multiplicity.
fn naive_factor(f: &Poly) -> Vec<(Poly, u32)> {
    let mut rest = f.monic();
    let mut out = Vec::new();
    let mut dg = 1;
    while rest.degree().unwrap() >= 1 {
        if 2 * dg > rest.degree().unwrap() {
            out.push((rest.clone(), 1));
            break;
        }
        for g in monics(f.field(), dg) {
            let mut e = 0;
            loop {
                let (quot, r) = rest.divrem(&g).unwrap();
                if !r.is_zero() {
                    break;
                }
                rest = quot;
                e += 1;
            }
            if e > 0 {
                out.push((g, e));
            }
        }
        dg += 1;
    }
    out
}

#[test]
fn eval_derivative_gcd_examples() {
    let f3 = field(3, 1);
    assert_eq!(poly(&f3, &[1, 0, 1]).eval(fe(1)), fe(2));
    assert!(poly(&f3, &[0, 0, 0, 1]).derivative().is_zero());
    let f5 = field(5, 1);
    let g = poly(&f5, &[4, 0, 1]).gcd(&poly(&f5, &[4, 1])).unwrap();
    assert_eq!(g, poly(&f5, &[4, 1]));
    assert!(g.is_monic());
}

#[test]
fn divrem_by_zero_and_mixed_fields() {
    let f3 = field(3, 1);
    let f5 = field(5, 1);
    let a = poly(&f3, &[1, 1]);
    assert_eq!(a.divrem(&Poly::zero(f3.clone())).unwrap_err(), PolyError::DivisionByZero);
    assert_eq!(a.checked_mul(&poly(&f5, &[1, 1])).unwrap_err(), PolyError::MixedFields);
    // separately constructed but equal fields are compatible
    let other = field(3, 1);
    assert!(a.checked_add(&poly(&other, &[1])).is_ok());
}

#[test]
fn degree_marker() {
    let f3 = field(3, 1);
    assert_eq!(Poly::zero(f3.clone()).degree(), None);
    assert_eq!(poly(&f3, &[2]).degree(), Some(0));
    assert_eq!(poly(&f3, &[1, 0, 2, 0, 0]).degree(), Some(2));
}

#[test]
fn text_format() {
    let f3 = field(3, 1);
    let f = Poly::parse(f3.clone(), "1,0,2").unwrap();
    assert_eq!(f.to_string(), "2x^2+1");
    assert_eq!(f.to_text(), "1,0,2");
    assert!(Poly::parse(f3.clone(), "1,3").is_err());
    assert!(Poly::parse(f3.clone(), "1,a").is_err());
    assert!(Poly::parse(f3, "").unwrap().is_zero());
    // F_4 elements are base-2 encodings against x^2+x+1
    let f4 = field(2, 2);
    assert_eq!(Poly::parse(f4, "3,0,1").unwrap().coeffs()[0], fe(3));
}

#[test]
fn squarefree_examples() {
    let f5 = field(5, 1);
    // x^2 (x+1)
    let dec = poly(&f5, &[0, 0, 1, 1]).squarefree_decompose().unwrap();
    assert_eq!(dec.unit, fe(1));
    assert_eq!(dec.parts, vec![(poly(&f5, &[1, 1]), 1), (poly(&f5, &[0, 1]), 2)]);

    let f3 = field(3, 1);
    let dec = poly(&f3, &[0, 0, 0, 1]).squarefree_decompose().unwrap();
    assert_eq!(dec.parts, vec![(poly(&f3, &[0, 1]), 3)]);

    let dec = poly(&f3, &[2]).squarefree_decompose().unwrap();
    assert_eq!(dec.unit, fe(2));
    assert!(dec.parts.is_empty());

    assert_eq!(Poly::zero(f3).squarefree_decompose().unwrap_err(), PolyError::ZeroPolynomial);
}

#[test]
fn squarefree_char_p_mixed() {
    // (x+1)^3 (x+2)^4 x over F_3: exercises the p-th root branch with leftovers
    let f3 = field(3, 1);
    let x = Poly::x(f3.clone());
    let a = poly(&f3, &[1, 1]);
    let b = poly(&f3, &[2, 1]);
    let f = &(&a.pow(3) * &b.pow(4)) * &x;
    let dec = f.squarefree_decompose().unwrap();
    assert_eq!(dec.parts, vec![(x, 1), (a, 3), (b, 4)]);
    assert_eq!(dec.reconstruct(&f3), f);
    // (x^2+1)^6 over F_3 has multiplicity 2p
    let g = poly(&f3, &[1, 0, 1]).pow(6);
    assert_eq!(g.squarefree_decompose().unwrap().parts, vec![(poly(&f3, &[1, 0, 1]), 6)]);
}

#[test]
fn power_free_examples() {
    let f5 = field(5, 1);
    let f = poly(&f5, &[0, 0, 1, 1]);
    assert!(!f.is_nth_power_free(2).unwrap());
    assert!(f.is_nth_power_free(3).unwrap());
    // x(x+1)(x+2)
    let g = poly(&f5, &[0, 2, 3, 1]);
    assert!(g.is_nth_power_free(2).unwrap());
    assert!(Poly::zero(f5).is_nth_power_free(2).is_err());
}

#[test]
fn mobius_examples() {
    let f3 = field(3, 1);
    assert_eq!(poly(&f3, &[0, 1]).mobius().unwrap(), -1);
    assert_eq!(poly(&f3, &[0, 0, 1]).mobius().unwrap(), 0);
    assert_eq!(poly(&f3, &[0, 1, 1]).mobius().unwrap(), 1);
    assert_eq!(poly(&f3, &[2]).mobius().unwrap(), 1);
    assert!(Poly::zero(f3).mobius().is_err());
}

#[test]
fn power_examples() {
    let f3 = field(3, 1);
    assert_eq!(poly(&f3, &[0, 0, 0, 0, 1]).bar_power().unwrap(), 4);
    // x^2 (x+1)^2
    assert_eq!(poly(&f3, &[0, 0, 1, 2, 1]).bar_power().unwrap(), 2);
    assert_eq!(poly(&f3, &[0, 0, 2]).bar_power().unwrap(), 2);
    assert_eq!(poly(&f3, &[0, 0, 0, 0, 1]).power_over_fq().unwrap(), 4);
    assert_eq!(poly(&f3, &[0, 0, 2]).power_over_fq().unwrap(), 1);
    let f5 = field(5, 1);
    assert_eq!(poly(&f5, &[0, 0, 4]).power_over_fq().unwrap(), 2);
    assert_eq!(poly(&f3, &[2]).bar_power().unwrap_err(), PolyError::ConstantPolynomial);
    assert_eq!(poly(&f3, &[2]).power_over_fq().unwrap_err(), PolyError::ConstantPolynomial);
}

#[test]
fn valuation_examples() {
    let f5 = field(5, 1);
    let f = poly(&f5, &[0, 0, 1, 1]);
    assert_eq!(f.valuation_and_unit(fe(0)).unwrap(), (2, fe(1)));
    assert_eq!(f.valuation_and_unit(fe(4)).unwrap(), (1, fe(1)));
    assert_eq!(f.valuation_and_unit(fe(1)).unwrap(), (0, fe(2)));
    assert!(Poly::zero(f5).valuation_and_unit(fe(0)).is_err());
}

#[test]
fn enumeration_counts_and_order() {
    let f3 = field(3, 1);
    assert_eq!(enumerate_degree_d(f3.clone(), 1, 100).unwrap().count(), 6);
    assert_eq!(enumerate_degree_d(f3.clone(), 2, 100).unwrap().count(), 18);
    assert_eq!(enumerate_degree_d(field(2, 2), 3, 1000).unwrap().count(), 192);
    assert!(matches!(
        enumerate_degree_d(f3.clone(), 5, 100),
        Err(PolyError::BudgetExceeded { count: 486, budget: 100 })
    ));
    let first: Vec<String> = enumerate_degree_d(f3.clone(), 1, 100)
        .unwrap()
        .map(|p| p.to_text())
        .collect();
    assert_eq!(first, ["0,1", "1,1", "2,1", "0,2", "1,2", "2,2"]);
    // every polynomial once, index round-trips
    let all: Vec<Poly> = enumerate_degree_d(f3.clone(), 3, 1000).unwrap().collect();
    for (i, p) in all.iter().enumerate() {
        assert_eq!(p.degree(), Some(3));
        assert_eq!(p.index().unwrap(), i as u128);
        assert_eq!(Poly::from_index(f3.clone(), 3, i as u128).unwrap(), *p);
    }
    // disjoint sub-ranges concatenate to the whole stream
    let a: Vec<Poly> = enumerate_range(f3.clone(), 3, 0..17).unwrap().collect();
    let b: Vec<Poly> = enumerate_range(f3.clone(), 3, 17..54).unwrap().collect();
    assert_eq!([a, b].concat(), all);
    assert!(enumerate_range(f3, 3, 0..55).is_err());
}

#[test]
fn zeta_examples() {
    let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    assert_eq!(zeta_value(3, 2).unwrap(), r(3, 2));
    assert_eq!(zeta_value(5, 2).unwrap(), r(5, 4));
    assert_eq!(zeta_value(3, 3).unwrap(), r(9, 8));
    assert_eq!(zeta_value(3, 1).unwrap_err(), PolyError::ZetaPole(1));
}

#[test]
fn power_free_count_examples() {
    assert_eq!(count_nth_power_free(3, 2, 2), BigInt::from(12));
    assert_eq!(count_nth_power_free(3, 2, 1), BigInt::from(6));
    assert_eq!(count_nth_power_free(5, 3, 4), BigInt::from(2400));
}

#[test]
fn power_free_count_matches_enumeration() {
    for (p, k) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
        let f = field(p, k);
        for n in 2..=4u32 {
            for d in 0..=6usize {
                if degree_count(f.q(), d) > 20_000 {
                    continue;
                }
                let brute = enumerate_degree_d(f.clone(), d, u128::MAX)
                    .unwrap()
                    .filter(|g| g.is_nth_power_free(n).unwrap())
                    .count();
                assert_eq!(
                    BigInt::from(brute),
                    count_nth_power_free(f.q() as u64, n, d as u32),
                    "q={} n={n} d={d}",
                    f.q()
                );
            }
        }
    }
}

#[test]
fn power_free_matches_naive_divisor_search() {
    for (p, k, dmax) in [(2, 1, 6), (3, 1, 5), (2, 2, 4), (5, 1, 4)] {
        let f = field(p, k);
        for d in 1..=dmax {
            for g in enumerate_degree_d(f.clone(), d, u128::MAX).unwrap() {
                for n in 2..=3 {
                    assert_eq!(
                        g.is_nth_power_free(n).unwrap(),
                        !naive_has_nth_power_divisor(&g, n),
                        "{g:?} n={n}"
                    );
                }
            }
        }
    }
}

#[test]
fn decomposition_matches_naive_factorization() {
    for (p, k, dmax) in [(2, 1, 7), (3, 1, 5), (2, 2, 4)] {
        let f = field(p, k);
        for d in 1..=dmax {
            for g in enumerate_degree_d(f.clone(), d, u128::MAX).unwrap() {
                let factors = naive_factor(&g);
                let dec = g.squarefree_decompose().unwrap();
                assert_eq!(dec.max_multiplicity(), factors.iter().map(|x| x.1).max().unwrap());
                let bar = factors.iter().fold(0u32, |acc, x| num_integer::gcd(acc, x.1));
                assert_eq!(g.bar_power().unwrap(), bar);
                let mu = if factors.iter().any(|x| x.1 > 1) {
                    0
                } else if factors.len() % 2 == 0 {
                    1
                } else {
                    -1
                };
                assert_eq!(g.mobius().unwrap(), mu, "{g:?}");
                assert_eq!(g.is_irreducible(), factors.len() == 1 && factors[0].1 == 1);
            }
        }
    }
}

fn arb_poly(q_choice: usize, max_deg: usize) -> impl Strategy<Value = Poly> {
    let fields = [(2u64, 1u32), (3, 1), (2, 2), (5, 1), (7, 1), (3, 2), (2, 3)];
    let (p, k) = fields[q_choice % fields.len()];
    let f = field(p, k);
    let q = f.q();
    proptest::collection::vec(0..q, 1..=max_deg + 1).prop_map(move |mut v| {
        let last = v.len() - 1;
        if v[last] == 0 {
            v[last] = 1;
        }
        Poly::new(f.clone(), v.into_iter().map(FieldElement).collect()).unwrap()
    })
}

fn arb_field_poly() -> impl Strategy<Value = Poly> {
    (0usize..7).prop_flat_map(|i| arb_poly(i, 14))
}

fn arb_field_pair() -> impl Strategy<Value = (Poly, Poly)> {
    (0usize..7).prop_flat_map(|i| (arb_poly(i, 7), arb_poly(i, 7)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn decomposition_reconstructs(f in arb_field_poly()) {
        let dec = f.squarefree_decompose().unwrap();
        prop_assert_eq!(dec.reconstruct(f.field()), f.clone());
        for (i, (a, _)) in dec.parts.iter().enumerate() {
            prop_assert!(a.is_monic() && a.degree().unwrap() >= 1);
            prop_assert!(a.gcd(&a.derivative()).unwrap().degree() == Some(0));
            for (b, _) in &dec.parts[i + 1..] {
                prop_assert_eq!(a.gcd(b).unwrap().degree(), Some(0));
            }
        }
    }

    #[test]
    fn valuation_reconstructs(f in arb_field_poly(), x0 in 0u32..4) {
        let x0 = FieldElement(x0 % f.field().q());
        let (s, a) = f.valuation_and_unit(x0).unwrap();
        prop_assert!(!a.is_zero());
        let lin = Poly::linear_root(f.field().clone(), x0).pow(s);
        let (cof, r) = f.divrem(&lin).unwrap();
        prop_assert!(r.is_zero());
        prop_assert_eq!(cof.eval(x0), a);
    }

    #[test]
    fn mobius_multiplicative_on_coprime((f, g) in arb_field_pair()) {
        prop_assume!(f.gcd(&g).unwrap().degree() == Some(0));
        let fg = &f * &g;
        prop_assert_eq!(fg.mobius().unwrap(), f.mobius().unwrap() * g.mobius().unwrap());
    }

    #[test]
    fn powers_over_fq((f, _) in arb_field_pair(), r in 1u32..5) {
        prop_assume!(!f.is_constant());
        let g = f.pow(r);
        let bar = g.bar_power().unwrap();
        let pw = g.power_over_fq().unwrap();
        prop_assert_eq!(bar % pw, 0);
        prop_assert_eq!(pw % r, 0);
        // g is literally a t-th power over F_q iff t | power_over_fq
        for t in 1..=bar {
            let literal = literal_root(&g, t).is_some();
            prop_assert_eq!(literal, pw % t == 0, "t={}", t);
        }
    }
}

/// Tries to write `f = h^t` over `F_q` by recombining the decomposition and
/// searching a unit root, then re-raising to confirm.
fn literal_root(f: &Poly, t: u32) -> Option<Poly> {
    let dec = f.squarefree_decompose().unwrap();
    if dec.parts.iter().any(|&(_, i)| i % t != 0) {
        return None;
    }
    let field = f.field();
    let c = field.elements().find(|&c| field.pow(c, t as u64) == dec.unit)?;
    let mut h = Poly::constant(field.clone(), c);
    for (a, i) in &dec.parts {
        h = &h * &a.pow(i / t);
    }
    (h.pow(t) == *f).then_some(h)
}
