use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use superiso::quadratic::{
    class_number_imaginary, fundamental_part, fundamental_unit, ideal_generator, is_fundamental,
    kronecker_class_number, QuadError,
};
use superiso::{RealQuadElement, RealQuadIdeal};

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Classes of forms `a x^2 + b x y + c y^2`, all primitive forms in a box
/// reduced by the naive `SL2(Z)` action until the orbit stabilises.
fn class_number_by_reduction(d: i64) -> u64 {
    let mut seen = std::collections::BTreeSet::new();
    let bound = (-d) as i64;
    for a in 1..=bound {
        for b in -a..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if num_integer::gcd(num_integer::gcd(a, b), c) != 1 {
                continue;
            }
            let (mut a, mut b, mut c) = (a, b, c);
            loop {
                if c < a {
                    std::mem::swap(&mut a, &mut c);
                    b = -b;
                } else if b > a || b <= -a {
                    // b -> b mod 2a in (-a, a]
                    let k = (a - b).div_euclid(2 * a);
                    let nb = b + 2 * a * k;
                    c = (nb * nb - d) / (4 * a);
                    b = nb;
                } else {
                    break;
                }
            }
            if a == c && b < 0 {
                b = -b;
            }
            seen.insert((a, b, c));
        }
    }
    seen.len() as u64
}

fn pell_brute(d: i64) -> Option<(i64, i64)> {
    // smallest unit (x + y sqrt d)/2 > 1 with x, y > 0
    for y in 1..100_000i64 {
        for sgn in [-4, 4] {
            let x2 = d * y * y + sgn;
            if x2 > 0 {
                let x = (x2 as f64).sqrt().round() as i64;
                if x * x == x2 && (x - d * y) % 2 == 0 {
                    return Some((x, y));
                }
            }
        }
    }
    None
}

#[test]
fn class_numbers() {
    assert_eq!(class_number_imaginary(-3).unwrap(), 1);
    assert_eq!(class_number_imaginary(-4).unwrap(), 1);
    assert_eq!(class_number_imaginary(-23).unwrap(), 3);
    assert_eq!(class_number_imaginary(-20).unwrap(), 2);
    assert_eq!(class_number_imaginary(-71).unwrap(), 7);
    assert!(matches!(class_number_imaginary(-5), Err(QuadError::InvalidDiscriminant(-5))));
    assert!(class_number_imaginary(5).is_err());
}

#[test]
fn class_numbers_match_naive_reduction() {
    for d in -400i64..-2 {
        if d.rem_euclid(4) > 1 {
            continue;
        }
        assert_eq!(class_number_imaginary(d).unwrap(), class_number_by_reduction(d), "D={d}");
    }
}

#[test]
fn heegner_stark_list() {
    let ones: Vec<i64> =
        (-2000i64..0).filter(|&d| is_fundamental(d) && class_number_imaginary(d).unwrap() == 1).collect();
    assert_eq!(ones, vec![-163, -67, -43, -19, -11, -8, -7, -4, -3]);
}

#[test]
fn kronecker_class_numbers() {
    assert_eq!(kronecker_class_number(-3).unwrap(), 1);
    assert_eq!(kronecker_class_number(-12).unwrap(), 2);
    assert_eq!(kronecker_class_number(-27).unwrap(), 2);
    assert_eq!(kronecker_class_number(-16).unwrap(), 2);
    assert_eq!(fundamental_part(-12).unwrap(), (-3, 2));
    assert_eq!(fundamental_part(-108).unwrap(), (-3, 6));
    for d in -500i64..-2 {
        if d.rem_euclid(4) > 1 {
            continue;
        }
        let h = class_number_imaginary(d).unwrap();
        let big_h = kronecker_class_number(d).unwrap();
        assert!(big_h >= h);
        if is_fundamental(d) {
            assert_eq!(big_h, h);
        }
    }
}

#[test]
fn fundamental_units() {
    let e5 = fundamental_unit(5).unwrap();
    assert_eq!((e5.u.clone(), e5.v.clone()), (r(1, 2), r(1, 2)));
    let e8 = fundamental_unit(8).unwrap();
    // 1 + sqrt 2 = 1 + sqrt(8)/2
    assert_eq!((e8.u.clone(), e8.v.clone()), (r(1, 1), r(1, 2)));
    assert_eq!(e5.norm(), r(-1, 1));
    assert!(fundamental_unit(12).is_ok());
    assert!(fundamental_unit(20).is_err());
    assert!(fundamental_unit(-3).is_err());
}

#[test]
fn fundamental_units_match_pell_search() {
    let mut checked = 0;
    for d in 5i64..1500 {
        if !is_fundamental(d) {
            continue;
        }
        let e = fundamental_unit(d).unwrap();
        let Some((x, y)) = pell_brute(d) else { continue };
        checked += 1;
        assert_eq!(e.u, r(x, 2), "d={d}");
        assert_eq!(e.v, r(y, 2), "d={d}");
        assert!(e.norm().abs().is_one());
        assert_eq!(e.cmp_rational(0, &BigRational::one()), Ordering::Greater);
        assert_eq!(e.mul(&e.conjugate()).u.abs(), BigRational::one());
    }
    assert!(checked > 300, "{checked}");
}

#[test]
fn element_ops() {
    let phi = RealQuadElement::new(5, r(1, 2), r(1, 2));
    assert_eq!(phi.norm(), r(-1, 1));
    let p7 = phi.pow(7).unwrap();
    assert_eq!((p7.u.clone(), p7.v.clone()), (r(29, 2), r(13, 2)));
    assert_eq!(phi.pow(-1).unwrap().mul(&phi), RealQuadElement::one(5));
    assert_eq!(phi.conjugate().conjugate(), phi);
    let other = RealQuadElement::from_ints(8, 1, 1);
    assert_eq!(phi.try_mul(&other), Err(QuadError::FieldMismatch(5, 8)));
    assert_eq!(phi.try_add(&other), Err(QuadError::FieldMismatch(5, 8)));
    assert!(RealQuadElement::zero(5).inverse().is_err());
    assert!(phi.is_integral());
    assert!(!RealQuadElement::new(5, r(1, 2), r(0, 1)).is_integral());
    assert!(!RealQuadElement::new(8, r(1, 2), r(1, 2)).is_integral());
}

#[test]
fn ideal_generators() {
    let one = ideal_generator(&RealQuadIdeal::new(5, 1.into(), 9.into()).unwrap()).unwrap();
    assert_eq!(one, RealQuadElement::one(5));
    let i = RealQuadIdeal::new(8, 2.into(), 0.into()).unwrap();
    let g = ideal_generator(&i).unwrap();
    assert_eq!(g, RealQuadElement::new(8, r(0, 1), r(1, 2)));
    assert_eq!(g.norm(), r(-2, 1));
    // same ideal under another second generator
    let i4 = RealQuadIdeal::new(8, 2.into(), 4.into()).unwrap();
    assert_eq!(ideal_generator(&i4).unwrap(), g);
    assert!(RealQuadIdeal::new(8, 2.into(), 2.into()).is_err());
    assert!(RealQuadIdeal::new(8, 0.into(), 0.into()).is_err());
}

/// Brute force: `O_F` elements of both embeddings bounded by `bound`.
fn small_elements(d: i64, bound: i64) -> Vec<RealQuadElement> {
    let mut out = Vec::new();
    for x in -bound * 2..=bound * 2 {
        for y in -bound..=bound {
            let e = RealQuadIdeal::new(d, 1.into(), (d % 2).into()).unwrap().element(&x.into(), &y.into());
            if e.embedding_f64(0).abs() <= bound as f64 && e.embedding_f64(1).abs() <= bound as f64 {
                out.push(e);
            }
        }
    }
    out
}

#[test]
fn ideal_generators_for_split_primes() {
    for d in [5i64, 8, 12, 13, 17, 21, 24, 28, 29, 33, 37, 41, 53, 56, 57, 61, 73, 77, 89, 93, 97] {
        let small = small_elements(d, 40);
        for a in 2i64..40 {
            for b in 0..2 * a {
                let Ok(ideal) = RealQuadIdeal::new(d, a.into(), b.into()) else { continue };
                let g = ideal_generator(&ideal).unwrap();
                assert_eq!(g.norm().abs(), BigRational::from_integer(a.into()), "d={d} a={a} b={b}");
                assert!(ideal.contains(&g));
                // I = gamma O_F: the other basis vector of I is a multiple of gamma
                let w = ideal.second_generator();
                assert!(w.mul(&g.inverse().unwrap()).is_integral());
                assert!(RealQuadElement::rational(d, BigRational::from_integer(a.into()))
                    .mul(&g.inverse().unwrap())
                    .is_integral());
                assert_eq!(g.sign_at(0), Ordering::Greater);
                // no generator of the ideal in the brute-force box has smaller max embedding
                let gmax = g.embedding_f64(0).abs().max(g.embedding_f64(1).abs());
                for e in &small {
                    if e.norm().abs() == g.norm().abs() && ideal.contains(e) {
                        let emax = e.embedding_f64(0).abs().max(e.embedding_f64(1).abs());
                        assert!(emax >= gmax - 1e-9, "d={d} a={a} b={b}: {e:?} beats {g:?}");
                    }
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn prop_conjugate_involution(d in prop::sample::select(vec![5i64, 8, 13, 29, 101, 2881]),
                                 u in -1000i64..1000, v in -1000i64..1000, w in 1i64..7) {
        let x = RealQuadElement::new(d, r(u, w), r(v, w));
        prop_assert_eq!(x.conjugate().conjugate(), x.clone());
        prop_assert_eq!(x.mul(&x.conjugate()).v, BigRational::zero());
        prop_assert_eq!(x.norm(), x.mul(&x.conjugate()).u);
    }

    #[test]
    fn prop_mul_norm_multiplicative(u1 in -50i64..50, v1 in -50i64..50, u2 in -50i64..50, v2 in -50i64..50) {
        let x = RealQuadElement::from_ints(13, u1, v1);
        let y = RealQuadElement::from_ints(13, u2, v2);
        prop_assert_eq!(x.mul(&y).norm(), x.norm() * y.norm());
        prop_assert_eq!(x.mul(&y), y.mul(&x));
    }

    #[test]
    fn prop_unit_orbit_stays_in_ideal(i in -40i64..40, k in 0usize..6) {
        let cases = [(5i64, 11i64, 1i64), (8, 7, 2), (13, 3, 1), (29, 5, 1), (17, 2, 1), (12, 11, 2)];
        let (d, a, b0) = cases[k];
        // pick b with b^2 = d mod 4a
        let b = (b0..b0 + 4 * a).find(|b| (b * b - d).rem_euclid(4 * a) == 0).unwrap();
        let ideal = RealQuadIdeal::new(d, a.into(), b.into()).unwrap();
        let g = ideal_generator(&ideal).unwrap();
        let e = fundamental_unit(d).unwrap();
        prop_assert!(e.mul(&e.conjugate()).u.abs().is_one());
        let s = g.mul(&e.pow(i).unwrap());
        prop_assert!(ideal.contains(&s));
        prop_assert!(ideal.contains(&s.neg()));
        prop_assert_eq!(s.norm().abs(), BigRational::from_integer(BigInt::from(a)));
    }
}
