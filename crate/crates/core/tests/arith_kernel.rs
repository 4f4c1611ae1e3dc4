use num_bigint::{BigInt, BigUint};
use num_traits::One;
use proptest::prelude::*;
use superiso::arith::{
    hamming_weight, is_prime_u64, isqrt, jacobi_i64, kronecker_symbol, log_integral2, log_integral2_ln, sqrt_mod,
    ArithError,
};
use superiso::ec::family_for;
use superiso::{is_prime, split_near_prime, PrimalityPolicy};

fn trial_division(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn sieve(limit: usize) -> Vec<bool> {
    let mut is = vec![true; limit + 1];
    is[0] = false;
    is[1] = false;
    let mut i = 2;
    while i * i <= limit {
        if is[i] {
            let mut j = i * i;
            while j <= limit {
                is[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    is
}

fn midpoint_li2(m: f64, step: f64) -> f64 {
    let n = ((m - 2.0) / step).round() as usize;
    let h = (m - 2.0) / n as f64;
    (0..n).map(|k| 1.0 / (2.0 + (k as f64 + 0.5) * h).ln().powi(2)).sum::<f64>() * h
}

#[test]
fn small_values() {
    let pol = PrimalityPolicy::default();
    assert!(is_prime(&BigInt::from(61), &pol));
    assert!(!is_prime(&BigInt::from(1), &pol));
    assert!(!is_prime(&BigInt::from(0), &pol));
    assert!(!is_prime(&BigInt::from(-7), &pol));
}

#[test]
fn agrees_with_sieve_below_one_million() {
    let pol = PrimalityPolicy::default();
    let table = sieve(1_000_000);
    for (n, &p) in table.iter().enumerate() {
        assert_eq!(is_prime_u64(n as u64), p, "{n}");
    }
    for n in (0..1_000_000u64).step_by(97) {
        assert_eq!(is_prime(&BigInt::from(n), &pol), table[n as usize], "{n}");
    }
}

#[test]
fn strong_pseudoprimes_rejected() {
    let pol = PrimalityPolicy::default();
    // strong pseudoprimes to several small bases
    for s in ["3215031751", "3825123056546413051", "318665857834031151167461", "2047", "1373653"] {
        assert!(!is_prime(&s.parse().unwrap(), &pol), "{s}");
    }
    // Carmichael numbers
    for n in [561u64, 1105, 1729, 2465, 2821, 6601, 8911] {
        assert!(!is_prime_u64(n));
    }
}

#[test]
fn large_primes_and_composites() {
    let pol = PrimalityPolicy::default();
    let m127 = (BigInt::one() << 127) - 1;
    assert!(is_prime(&m127, &pol));
    let m89 = (BigInt::one() << 89) - 1;
    assert!(!is_prime(&(&m127 * &m89), &pol));
    let fam = family_for(3).unwrap();
    let x = (BigInt::one() << 127) + 13906;
    assert!(is_prime(&fam.p(&x), &pol));
    assert!(is_prime(&fam.n(&x), &pol));
}

#[test]
fn policy_bounds() {
    assert!(PrimalityPolicy::new(BigUint::one() << 64u32, 31).is_err());
    assert!(PrimalityPolicy::new(BigUint::one() << 63u32, 40).is_err());
    assert!(PrimalityPolicy::new(BigUint::one() << 64u32, 32).is_ok());
}

#[test]
fn isqrt_examples() {
    assert_eq!(isqrt(&BigInt::from(144)).unwrap(), (BigInt::from(12), true));
    assert_eq!(isqrt(&BigInt::from(150)).unwrap(), (BigInt::from(12), false));
    assert_eq!(isqrt(&BigInt::from(0)).unwrap(), (BigInt::from(0), true));
    assert!(matches!(isqrt(&BigInt::from(-1)), Err(ArithError::Negative(_))));
}

#[test]
fn kronecker_examples() {
    let k = |a: i64, n: i64| kronecker_symbol(&BigInt::from(a), &BigInt::from(n));
    assert_eq!(k(5, 5), 0);
    assert_eq!(k(2, 7), 1);
    assert_eq!(k(-3, 7), 1);
    assert_eq!(k(2, 3), -1);
    assert_eq!(k(-1, 3), -1);
    // (a|2) depends on a mod 8
    assert_eq!(k(5, 2), -1);
    assert_eq!(k(7, 2), 1);
}

#[test]
fn kronecker_matches_euler_criterion() {
    for p in (3..400i64).filter(|&p| trial_division(p as u64)) {
        for a in -50..50i64 {
            let e = BigInt::from(a).modpow(&BigInt::from((p - 1) / 2), &BigInt::from(p));
            let expect = if e == BigInt::from(0) { 0 } else if e == BigInt::from(1) { 1 } else { -1 };
            assert_eq!(kronecker_symbol(&BigInt::from(a), &BigInt::from(p)), expect, "({a}|{p})");
            assert_eq!(jacobi_i64(a, p), expect);
        }
    }
}

#[test]
fn sqrt_mod_roundtrip() {
    for p in [7i64, 13, 17, 41, 97, 7919, 1_000_003] {
        let pb = BigInt::from(p);
        for a in 1..60i64 {
            let ab = BigInt::from(a);
            match sqrt_mod(&ab, &pb) {
                Ok(r) => assert_eq!((&r * &r - &ab) % &pb, BigInt::from(0)),
                Err(_) => assert_eq!(jacobi_i64(a, p), -1),
            }
        }
    }
}

#[test]
fn split_examples() {
    let pol = PrimalityPolicy::default();
    let s = split_near_prime(&BigInt::from(62), 1000, &pol).unwrap();
    assert_eq!((s.cofactor, s.prime_part), (BigInt::from(2), BigInt::from(31)));
    let s = split_near_prime(&BigInt::from(30), 1000, &pol).unwrap();
    assert_eq!((s.cofactor, s.prime_part), (BigInt::from(6), BigInt::from(5)));
    assert!(split_near_prime(&BigInt::from(30), 5, &pol).is_none());
    assert!(split_near_prime(&BigInt::from(1), 5, &pol).is_none());
}

#[test]
fn split_matches_exhaustive_scan() {
    let pol = PrimalityPolicy::default();
    for n in 2..3000u64 {
        let expect = (1..=100u64).find(|&c| n % c == 0 && trial_division(n / c));
        let got = split_near_prime(&BigInt::from(n), 100, &pol).map(|s| s.cofactor);
        assert_eq!(got, expect.map(BigInt::from), "{n}");
    }
}

#[test]
fn li2_examples() {
    assert_eq!(log_integral2(2.0).unwrap(), 0.0);
    assert!(log_integral2(1.5).is_err());
    let v = log_integral2(10.0).unwrap();
    let oracle = midpoint_li2(10.0, 1e-4);
    assert!(((v - oracle) / oracle).abs() < 1e-5, "{v} vs {oracle}");
}

#[test]
fn li2_matches_li_identity() {
    // ∫ dt/log²t = li(M) - M/log M - (li(2) - 2/log 2)
    let li = |x: f64| -> f64 {
        // Ramanujan's series
        let l = x.ln();
        let gamma = 0.577_215_664_901_532_9;
        let mut sum = 0.0;
        let mut fact = 1.0;
        let mut inner = 0.0;
        for n in 1..200 {
            fact *= n as f64;
            if (n - 1) % 2 == 0 {
                inner += 1.0 / (2 * ((n - 1) / 2) + 1) as f64;
            }
            let sign = if (n - 1) % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * l.powi(n) / (fact * 2f64.powi(n - 1)) * inner;
        }
        gamma + l.ln() + x.sqrt() * sum
    };
    for m in [50.0f64, 1e3, 1e6, 1e9] {
        let expect = li(m) - m / m.ln() - (li(2.0) - 2.0 / 2f64.ln());
        let v = log_integral2(m).unwrap();
        assert!(((v - expect) / expect).abs() < 1e-6, "M={m}: {v} vs {expect}");
    }
}

#[test]
fn li2_at_large_argument() {
    // asymptotic M/log²M (1 + 2/log M + 6/log²M + 24/log³M)
    let ln_m = 128.0 * std::f64::consts::LN_2;
    let v = log_integral2_ln(ln_m).unwrap();
    let approx = (ln_m - 2.0 * ln_m.ln()).exp()
        * (1.0 + 2.0 / ln_m + 6.0 / ln_m.powi(2) + 24.0 / ln_m.powi(3) + 120.0 / ln_m.powi(4));
    assert!(((v - approx) / v).abs() < 1e-5);
}

#[test]
fn hamming() {
    assert_eq!(hamming_weight(&BigInt::from(0b1011)), 3);
    assert_eq!(hamming_weight(&((BigInt::one() << 100) - 1)), 100);
}

proptest! {
    #[test]
    fn prop_is_prime_trial_division(n in 0u64..2_000_000) {
        let pol = PrimalityPolicy::default();
        prop_assert_eq!(is_prime(&BigInt::from(n), &pol), trial_division(n));
    }

    #[test]
    fn prop_isqrt_bracket(n in any::<u128>()) {
        let nb = BigInt::from(n);
        let (r, exact) = isqrt(&nb).unwrap();
        prop_assert!(&r * &r <= nb);
        let r1 = &r + 1;
        prop_assert!(nb < &r1 * &r1);
        prop_assert_eq!(exact, &r * &r == nb);
    }

    #[test]
    fn prop_split_reassembles(n in 2u64..10_000_000, c in 1u64..300) {
        let pol = PrimalityPolicy::default();
        let nb = BigInt::from(n);
        if let Some(s) = split_near_prime(&nb, c, &pol) {
            prop_assert_eq!(&s.cofactor * &s.prime_part, nb.clone());
            prop_assert!(is_prime(&s.prime_part, &pol));
            // the smaller bound finds the same cofactor or none at all
            let lower = split_near_prime(&nb, c / 2 + 1, &pol);
            if let Some(l) = lower {
                prop_assert_eq!(l.cofactor, s.cofactor);
            }
        }
    }

    #[test]
    fn prop_li2_monotone(a in 2.0f64..1e7, b in 2.0f64..1e7) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(log_integral2(lo).unwrap() <= log_integral2(hi).unwrap());
    }
}
