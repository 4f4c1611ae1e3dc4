mod common;

use common::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use superiso::cm::{compute_search_polynomials, CmError, FieldKind, QuadForm};
use superiso::quadratic::is_fundamental;
use superiso::{is_prime, split_near_prime, CmField, PrimalityPolicy, Registry};

fn zeta5_field() -> CmField {
    Registry::builtin().get("zeta5").unwrap().clone()
}

fn form(entries: &[((usize, usize), (i64, i64))]) -> QuadForm {
    let mut c: [[BigRational; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| BigRational::zero()));
    for &((i, j), (n, d)) in entries {
        c[i - 1][j - 1] = q(n, d);
    }
    QuadForm { c }
}

#[test]
fn registry_loads() {
    let reg = Registry::builtin();
    assert_eq!(reg.fields.len(), 91);
    let report = Registry::check(Registry::builtin_source());
    assert!(report.failures.is_empty());
    let count = |k: FieldKind| reg.fields.iter().filter(|f| f.kind == k).count();
    assert_eq!(count(FieldKind::Biquadratic) + count(FieldKind::Cyclic) + count(FieldKind::NonNormal), 91);
    let mut ids: Vec<&str> = reg.fields.iter().map(|f| f.id.as_str()).collect();
    ids.dedup();
    assert_eq!(ids.len(), 91);
    let z = reg.get("zeta5").unwrap();
    assert_eq!((z.disc_f, z.disc_k.clone()), (5, BigInt::from(125)));
    assert_eq!(reg.get("4.0.125.1").unwrap().id, z.id);
    let e1 = reg.get("sqrt-m19-m8sqrt2").unwrap();
    assert_eq!(e1.disc_f, 8);
    assert_eq!(e1.beta, e1.f_elem(q(-19, 1), q(-4, 1)));
    assert!(matches!(reg.get("nope"), Err(CmError::UnknownField(_))));
    for f in &reg.fields {
        assert!(is_fundamental(f.disc_f));
        assert_eq!(f.class_number, 1);
        // disc_k = disc_f^2 * N(relative discriminant)
        assert!((&f.disc_k % BigInt::from(f.disc_f * f.disc_f)).is_zero());
    }
}

fn corrupt(field_line_prefix: &str, from: &str, to: &str) -> String {
    Registry::builtin_source()
        .lines()
        .map(|l| if l.starts_with(field_line_prefix) { l.replacen(from, to, 1) } else { l.to_string() })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn corrupted_records_are_named() {
    let src = corrupt("id=4.0.125.1 ", "disc_k=125", "disc_k=126");
    let rep = Registry::check(&src);
    assert_eq!(rep.fields.len(), 90);
    assert_eq!(
        rep.failures,
        vec![CmError::Validation { id: "4.0.125.1".into(), check: "discriminant".into() }]
    );
    assert!(Registry::parse(&src).is_err());
    let src = corrupt("id=4.0.125.1 ", "beta=-5/2,-1/2", "beta=5/2,-1/2");
    let rep = Registry::check(&src);
    assert!(matches!(&rep.failures[0], CmError::Validation { check, .. } if check == "totally negative beta"));
    let src = corrupt("id=4.0.125.1 ", "alpha1=1,0,0,0", "alpha1=2,0,0,0");
    let rep = Registry::check(&src);
    assert!(matches!(&rep.failures[0], CmError::Validation { check, .. } if check == "alpha1 = 1"));
    let src = corrupt("id=4.0.125.1 ", "class_number=1", "class_number=2");
    assert!(matches!(&Registry::check(&src).failures[0], CmError::Validation { check, .. } if check == "class number"));
    let rep = Registry::check("id=x kind=cyclic");
    assert!(matches!(rep.failures[0], CmError::Parse { line: 1, .. }));
}

#[test]
fn registry_from_file_and_env() {
    let dir = std::env::temp_dir().join(format!("superiso-reg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("fields.txt");
    let one: String = Registry::builtin_source().lines().filter(|l| l.contains("alias=zeta5")).collect();
    std::fs::write(&path, one).unwrap();
    let reg = Registry::from_path(&path).unwrap();
    assert_eq!(reg.fields.len(), 1);
    assert!(matches!(Registry::from_path(&dir.join("missing")), Err(CmError::Io(_))));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn zeta5_basis_in_powers_of_zeta() {
    let f = zeta5_field();
    let z = zeta5(&f);
    assert_eq!(power(&f, &z, 5), f.one());
    let z2 = power(&f, &z, 2);
    let z3 = power(&f, &z, 3);
    let sum = |xs: &[(i64, &superiso::cm::QuarticElement)]| {
        xs.iter().fold(f.from_coords(&[0, 0, 0, 0].map(BigInt::from)), |acc, (c, x)| {
            let cx = f.mul(&f.from_coords(&[*c, 0, 0, 0].map(BigInt::from)), x);
            f.add(&acc, &cx)
        })
    };
    let one = f.one();
    let z1 = z.clone();
    // alpha2 = -z^3 - z^2 + 2
    assert_eq!(sum(&[(-1, &z3), (-1, &z2), (2, &one)]), f.basis[1]);
    // alpha3 read as -3 z^3 - 2 z^2 - 2
    assert_eq!(sum(&[(-3, &z3), (-2, &z2), (-2, &one)]), f.basis[2]);
    // alpha4 = -2 z^3 + 3 z^2 - z - 1
    assert_eq!(sum(&[(-2, &z3), (3, &z2), (-1, &z1), (-1, &one)]), f.basis[3]);
    assert_eq!(f.basis[1].a.embedding_f64(0), (5.0 + 5f64.sqrt()) / 2.0);
}

#[test]
fn zeta5_search_polynomials_reference_values() {
    let f = zeta5_field();
    let p = compute_search_polynomials(&f).unwrap();
    assert_eq!(p.f1, [0, 2, 5, -2].map(BigInt::from));
    assert_eq!(p.f1_display(), "2*x2 + 5*x3 - 2*x4");
    assert_eq!((p.f2.a.clone(), p.f2.b.clone(), p.f2.c.clone()), (1.into(), 9.into(), 19.into()));
    assert_eq!(p.f2.discriminant(), BigInt::from(5));
    let p_hat = form(&[
        ((1, 1), (1, 1)),
        ((1, 2), (5, 1)),
        ((2, 2), (15, 2)),
        ((1, 3), (-3, 2)),
        ((2, 3), (5, 2)),
        ((3, 3), (9, 1)),
        ((1, 4), (-2, 1)),
        ((2, 4), (-15, 2)),
        ((3, 4), (3, 2)),
        ((4, 4), (37, 2)),
    ]);
    let p0 = form(&[
        ((1, 2), (1, 1)),
        ((2, 2), (5, 2)),
        ((1, 3), (5, 2)),
        ((2, 3), (11, 2)),
        ((3, 3), (-2, 1)),
        ((1, 4), (-1, 1)),
        ((2, 4), (-7, 2)),
        ((3, 4), (-7, 2)),
        ((4, 4), (-9, 2)),
    ]);
    assert_eq!(p.p_hat, p_hat);
    assert_eq!(p.p0, p0);
    let sol = [115, -45, 17, -3].map(BigInt::from);
    assert_eq!(p.eval_f1(&sol), BigInt::one());
    assert_eq!(p.eval_f2(&sol), BigInt::one());
    assert!(p.p0.eval(&sol).is_zero());
    assert_eq!(p.p_hat.eval(&sol), q(61, 1));
}

#[test]
fn conjugation() {
    let f = zeta5_field();
    let pi = f.from_coords(&[115, -45, 17, -3].map(BigInt::from));
    let c = f.conjugate(&pi);
    assert_eq!(f.conjugate(&c), pi);
    assert!(f.add(&pi, &c).b.is_zero());
    assert_eq!(f.conjugate(&f.basis[1]), f.basis[1]);
    let cc = f.conjugate_coords(&[115, -45, 17, -3].map(BigInt::from));
    assert_eq!(f.from_coords(&cc), c);
}

#[test]
fn char_poly_of_small_solution() {
    let f = zeta5_field();
    let pi = f.from_coords(&[115, -45, 17, -3].map(BigInt::from));
    let cp = f.char_poly(&pi).unwrap();
    assert_eq!(cp[4], BigInt::from(3721));
    let oracle = char_poly_leverrier(&mult_matrix(&f, &pi));
    assert_eq!(cp.clone().map(BigRational::from_integer), oracle);
    // Weil shape x^4 + a x^3 + b x^2 + p a x + p^2
    assert_eq!(&cp[3], &(&cp[1] * 61));
    let n = f.group_order(&pi).unwrap();
    let p = 61f64;
    let lo = (p.sqrt() - 1.0).powi(4);
    let hi = (p.sqrt() + 1.0).powi(4);
    let nf = n.to_string().parse::<f64>().unwrap();
    assert!(lo <= nf && nf <= hi);
    assert!(p * p - 4.0 * p.powf(1.5) - 6.0 * p - 4.0 * p.sqrt() - 1.0 <= nf);
}

#[test]
fn degenerate_char_poly_inputs() {
    let f = zeta5_field();
    assert_eq!(f.char_poly(&f.one()), Err(CmError::NotGenerating));
    let half = f.from_rational_coords(&[q(1, 2), q(0, 1), q(0, 1), q(0, 1)]);
    assert_eq!(f.char_poly(&half), Err(CmError::NotIntegral));
}

#[test]
fn examples_one_and_two() {
    let reg = Registry::builtin();
    let pol = PrimalityPolicy::default();
    for (alias, pi_of, p, c, bits) in [
        ("sqrt-m19-m8sqrt2", example_one as fn(&CmField) -> _, EXAMPLE_ONE_P, 31, 227),
        ("sqrt-m13-m2sqrt5", example_two as fn(&CmField) -> _, EXAMPLE_TWO_P, 521, 236),
    ] {
        let f = reg.get(alias).unwrap();
        let polys = compute_search_polynomials(f).unwrap();
        let pi = pi_of(f);
        let coords = f.integral_coords(&pi).expect("integral");
        let p: BigInt = p.parse().unwrap();
        assert_eq!(polys.p_hat.eval(&coords), BigRational::from_integer(p.clone()));
        assert!(polys.p0.eval(&coords).is_zero());
        assert!(is_prime(&p, &pol));
        let cp = f.char_poly(&pi).unwrap();
        assert_eq!(cp[4], &p * &p);
        assert_eq!(cp.clone().map(BigRational::from_integer), char_poly_leverrier(&mult_matrix(f, &pi)));
        let n = f.group_order(&pi).unwrap();
        let s = split_near_prime(&n, 1000, &pol).unwrap();
        assert_eq!(s.cofactor, BigInt::from(c));
        assert_eq!(s.prime_part.bits(), bits);
        assert_eq!(f.disc_span(&polys, &pi).unwrap(), f.disc_k);
        assert_eq!(polys.eval_f1(&coords).abs(), BigInt::one());
        assert_eq!(polys.eval_f2(&coords).abs(), BigInt::one());
    }
}

#[test]
fn search_polynomial_invariants_on_every_field() {
    for f in &Registry::builtin().fields {
        let p = compute_search_polynomials(f).unwrap();
        assert_eq!(p.f2.discriminant(), BigInt::from(f.disc_f), "{}", f.id);
        assert!(p.f1[0].is_zero() && !p.f1[1].is_zero());
        // 2 p0 = g + f1 x1
        for j in 0..4 {
            let two = &p.p0.c[0][j] * q(2, 1);
            let expect = if j == 0 { BigRational::zero() } else { BigRational::from_integer(p.f1[j].clone()) };
            assert_eq!(two, expect, "{}", f.id);
            assert!(p.g.c[0][j].is_zero());
        }
        for i in 0..4 {
            for j in i..4 {
                assert!((&p.p_hat.c[i][j] * q(2, 1)).is_integer());
                assert!((&p.p0.c[i][j] * q(2, 1)).is_integer());
            }
        }
    }
}

#[test]
fn disc_span_two_paths_on_every_field() {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    for f in &Registry::builtin().fields {
        let polys = compute_search_polynomials(f).unwrap();
        for _ in 0..20 {
            let c = random_coords(&mut rng, 30);
            let pi = f.from_coords(&c);
            if pi.b.is_zero() {
                continue;
            }
            let d = f.disc_span(&polys, &pi).unwrap();
            let f1 = polys.eval_f1(&c);
            let f2 = polys.eval_f2(&c);
            assert_eq!(d, &f.disc_k * f1.pow(4) * &f2 * &f2);
        }
    }
}

#[test]
fn f2_twice_gives_four_disc() {
    let f = zeta5_field();
    let polys = compute_search_polynomials(&f).unwrap();
    // |f2| = 1 and |f1| = 2 gives span index 2
    let mut seen = false;
    for a3 in -6i64..=6 {
        for a4 in -6i64..=6 {
            for a2 in -10i64..=10 {
                let c = [3, a2, a3, a4].map(BigInt::from);
                if polys.eval_f2(&c).abs() == BigInt::one() && polys.eval_f1(&c).abs() == BigInt::from(2) {
                    let d = f.disc_span(&polys, &f.from_coords(&c)).unwrap();
                    assert_eq!(d, &f.disc_k * 16);
                    seen = true;
                }
            }
        }
    }
    assert!(seen);
}

#[test]
fn embedding_cross_check_on_every_field() {
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let tol = BigInt::one() << (FIX_BITS - 64);
    for f in &Registry::builtin().fields {
        let polys = compute_search_polynomials(f).unwrap();
        for _ in 0..20 {
            let c = random_coords(&mut rng, 1 << 20);
            assert!(embedding_residual(f, &polys, &c) < tol, "{}", f.id);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prop_conjugation_is_a_ring_involution(k in 0usize..91, a in prop::array::uniform4(-100i64..100),
                                              b in prop::array::uniform4(-100i64..100)) {
        let reg = Registry::builtin();
        let f = &reg.fields[k];
        let x = f.from_coords(&a.map(BigInt::from));
        let y = f.from_coords(&b.map(BigInt::from));
        prop_assert_eq!(f.conjugate(&f.conjugate(&x)), x.clone());
        prop_assert_eq!(f.conjugate(&f.add(&x, &y)), f.add(&f.conjugate(&x), &f.conjugate(&y)));
        prop_assert_eq!(f.conjugate(&f.mul(&x, &y)), f.mul(&f.conjugate(&x), &f.conjugate(&y)));
        let inf = f.from_coords(&[a[0], a[1], 0, 0].map(BigInt::from));
        prop_assert_eq!(f.conjugate(&inf), inf);
        // integral elements have integral conjugates and characteristic polynomials
        prop_assert!(f.integral_coords(&f.conjugate(&x)).is_some());
        prop_assert!(f.char_poly_rational(&x).iter().all(|c| c.is_integer()));
        prop_assert_eq!(f.char_poly_rational(&x), char_poly_leverrier(&mult_matrix(f, &x)));
    }

    #[test]
    fn prop_relative_norm_matches_forms(k in 0usize..91, a in prop::array::uniform4(-1000i64..1000)) {
        let reg = Registry::builtin();
        let f = &reg.fields[k];
        let polys = compute_search_polynomials(f).unwrap();
        let c = a.map(BigInt::from);
        let n = f.rel_norm(&f.from_coords(&c));
        prop_assert_eq!(n.u, polys.p_hat.eval(&c));
        prop_assert_eq!(n.v, polys.p0.eval(&c));
        prop_assert!(!polys.p_hat.eval(&c).is_negative());
    }
}
