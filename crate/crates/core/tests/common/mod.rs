#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use superiso::cm::{CmField, QuarticElement, SearchPolynomials};
use superiso::RealQuadElement;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Fixed-point scale used by the embedding oracle.
pub const FIX_BITS: u64 = 256;

fn fix(r: &BigRational) -> BigInt {
    (r.numer() << FIX_BITS) / r.denom()
}

fn fix_mul(a: &BigInt, b: &BigInt) -> BigInt {
    (a * b) >> FIX_BITS
}

fn fix_sqrt(a: &BigInt) -> BigInt {
    (a << FIX_BITS).sqrt()
}

/// `phi_k` of an element of `F` in fixed point, given `phi_k(sqrt d)`.
fn fix_f(e: &RealQuadElement, sqrt_d: &BigInt) -> BigInt {
    fix(&e.u) + fix_mul(&fix(&e.v), sqrt_d)
}

/// `max_k |phi_k(g g~) - (p_hat +- p0 sqrt d)|` in units of `2^-FIX_BITS`,
/// where `phi_k(g)` is evaluated through the complex embeddings
/// `phi_k(eta) = i sqrt|phi_k(beta)|`.
pub fn embedding_residual(field: &CmField, polys: &SearchPolynomials, c: &[BigInt; 4]) -> BigInt {
    let g = field.from_coords(c);
    let root = fix_sqrt(&(BigInt::from(field.disc_f) << FIX_BITS));
    let p_hat = fix(&polys.p_hat.eval(c));
    let p0 = fix(&polys.p0.eval(c));
    let mut worst = BigInt::zero();
    for sign in [1i64, -1] {
        let sd = &root * sign;
        let beta = fix_f(&field.beta, &sd);
        assert!(beta.is_negative());
        let eta_im = fix_sqrt(&-beta);
        let re = fix_f(&g.a, &sd);
        let im = fix_mul(&fix_f(&g.b, &sd), &eta_im);
        let abs2 = fix_mul(&re, &re) + fix_mul(&im, &im);
        let expect = &p_hat + fix_mul(&p0, &sd);
        let r = (abs2 - expect).abs();
        if r > worst {
            worst = r;
        }
    }
    worst
}

/// Multiplication-by-`x` matrix over the integral basis.
pub fn mult_matrix(field: &CmField, x: &QuarticElement) -> [[BigRational; 4]; 4] {
    let cols: Vec<[BigRational; 4]> = field.basis.iter().map(|al| field.coords(&field.mul(x, al))).collect();
    std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i].clone()))
}

/// Characteristic polynomial by the Faddeev-LeVerrier recursion.
pub fn char_poly_leverrier(m: &[[BigRational; 4]; 4]) -> [BigRational; 5] {
    let n = 4;
    let zero = || -> [[BigRational; 4]; 4] { std::array::from_fn(|_| std::array::from_fn(|_| BigRational::zero())) };
    let mul = |a: &[[BigRational; 4]; 4], b: &[[BigRational; 4]; 4]| -> [[BigRational; 4]; 4] {
        std::array::from_fn(|i| std::array::from_fn(|j| (0..4).fold(BigRational::zero(), |s, k| s + &a[i][k] * &b[k][j])))
    };
    let mut coeffs = vec![BigRational::one()];
    let mut mk = zero();
    for k in 1..=n {
        let mut next = mul(m, &mk);
        for i in 0..4 {
            next[i][i] += &coeffs[k - 1];
        }
        mk = next;
        let amk = mul(m, &mk);
        let tr = (0..4).fold(BigRational::zero(), |s, i| s + &amk[i][i]);
        coeffs.push(-tr / BigRational::from_integer(BigInt::from(k as i64)));
    }
    coeffs.try_into().unwrap()
}

/// `zeta_5 = (sqrt5 - 1)/4 + eta/2` in the pair form of the registry record.
pub fn zeta5(field: &CmField) -> QuarticElement {
    QuarticElement { a: field.f_elem(q(-1, 4), q(1, 4)), b: field.f_elem(q(1, 2), q(0, 1)) }
}

pub fn power(field: &CmField, x: &QuarticElement, e: u32) -> QuarticElement {
    let mut acc = field.one();
    for _ in 0..e {
        acc = field.mul(&acc, x);
    }
    acc
}

pub fn neg(field: &CmField, x: &QuarticElement) -> QuarticElement {
    let m1 = QuarticElement { a: field.f_elem(q(-1, 1), q(0, 1)), b: field.f_elem(q(0, 1), q(0, 1)) };
    field.mul(&m1, x)
}

/// Random integral coordinates in `[-bound, bound]^4`.
pub fn random_coords(rng: &mut ChaCha20Rng, bound: i64) -> [BigInt; 4] {
    std::array::from_fn(|_| BigInt::from(rng.gen_range(-bound..=bound)))
}

/// `c0 + c1 eta + c2 eta^2 + c3 eta^3` with `eta^2 = beta`.
pub fn from_eta_powers(field: &CmField, c: [BigRational; 4]) -> QuarticElement {
    let r = |x: &BigRational| field.f_elem(x.clone(), BigRational::zero());
    let a = r(&c[0]).add(&field.beta.scale(&c[2]));
    let b = r(&c[1]).add(&field.beta.scale(&c[3]));
    QuarticElement { a, b }
}

fn ratio(s: &str) -> BigRational {
    s.parse().unwrap()
}

/// The Weil number of the 116-bit example, in `Q(sqrt(-19 - 8 sqrt 2))`.
pub fn example_one(field: &CmField) -> QuarticElement {
    from_eta_powers(
        field,
        [ratio("-4404669978983883573/16"), ratio("6822363251/16"), ratio("1/16"), ratio("225058681/16")],
    )
}

/// The Weil number of the 123-bit example, in `Q(sqrt(-13 - 2 sqrt 5))`.
pub fn example_two(field: &CmField) -> QuarticElement {
    from_eta_powers(
        field,
        [ratio("18762798022945344405/8"), ratio("12255108743/8"), ratio("-1/8"), ratio("701408733/8")],
    )
}

pub const EXAMPLE_ONE_P: &str = "75785615717819865717549739169971883";
pub const EXAMPLE_TWO_P: &str = "5500665463278776959453617590160336793";
