//! Big-integer primitives: primality, integer roots, symbols, near-prime
//! splitting and the `∫ dt / log²t` quadrature.

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("negative input: {0}")]
    Negative(BigInt),
    #[error("integral lower limit is 2, got {0}")]
    BelowTwo(String),
    #[error("invalid primality policy: {0}")]
    Policy(&'static str),
    #[error("{0} is not a quadratic residue")]
    NonResidue(BigInt),
}

/// Bound below which Miller-Rabin with the first 13 prime bases is exact.
const DETERMINISTIC_LIMIT: &str = "3317044064679887385961981";
const DET_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimalityPolicy {
    deterministic_threshold: BigUint,
    rounds: u32,
    seed: u64,
}

impl PrimalityPolicy {
    pub fn new(deterministic_threshold: BigUint, rounds: u32) -> Result<Self, ArithError> {
        if rounds < 32 {
            return Err(ArithError::Policy("rounds must be at least 32"));
        }
        if deterministic_threshold < BigUint::one() << 64u32 {
            return Err(ArithError::Policy("deterministic threshold must be at least 2^64"));
        }
        if deterministic_threshold > DETERMINISTIC_LIMIT.parse().unwrap() {
            return Err(ArithError::Policy("deterministic threshold above 3.3e24 is not supported"));
        }
        Ok(PrimalityPolicy { deterministic_threshold, rounds, seed: 0x5eed_15_0 })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn deterministic_threshold(&self) -> &BigUint {
        &self.deterministic_threshold
    }

    pub fn rounds(&self) -> u32 {
        self.rounds
    }
}

impl Default for PrimalityPolicy {
    fn default() -> Self {
        PrimalityPolicy::new(BigUint::one() << 64u32, 32).unwrap()
    }
}

const SMALL_PRIMES: [u32; 54] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251,
];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic primality for machine words.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        let p = p as u64;
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &DET_BASES[..12] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn strong_probable_prime(n: &BigUint, n1: &BigUint, d: &BigUint, s: u32, a: &BigUint) -> bool {
    let mut x = a.modpow(d, n);
    if x.is_one() || &x == n1 {
        return true;
    }
    for _ in 1..s {
        x = &x * &x % n;
        if &x == n1 {
            return true;
        }
    }
    false
}

/// Primality under `policy`: exact below the deterministic threshold,
/// strong-witness probabilistic (fixed bases plus seeded random rounds) above.
pub fn is_prime(n: &BigInt, policy: &PrimalityPolicy) -> bool {
    if n.sign() != Sign::Plus {
        return false;
    }
    let n = n.magnitude();
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &SMALL_PRIMES {
        if (n % p).is_zero() {
            return false;
        }
    }
    let n1 = n - 1u32;
    let s = n1.trailing_zeros().unwrap() as u32;
    let d = &n1 >> s;
    for &a in &DET_BASES {
        if !strong_probable_prime(n, &n1, &d, s, &BigUint::from(a)) {
            return false;
        }
    }
    if n < &policy.deterministic_threshold {
        return true;
    }
    let low = n.iter_u64_digits().next().unwrap_or(0);
    let mut rng = ChaCha20Rng::seed_from_u64(policy.seed ^ low);
    let two = BigUint::from(2u32);
    for _ in 0..policy.rounds {
        let a = rng.gen_biguint_range(&two, &n1);
        if !strong_probable_prime(n, &n1, &d, s, &a) {
            return false;
        }
    }
    true
}

/// `(floor(sqrt(n)), floor(sqrt(n))^2 == n)`.
pub fn isqrt(n: &BigInt) -> Result<(BigInt, bool), ArithError> {
    if n.is_negative() {
        return Err(ArithError::Negative(n.clone()));
    }
    let r = n.sqrt();
    let exact = &r * &r == *n;
    Ok((r, exact))
}

/// Kronecker symbol `(a|n)`.
pub fn kronecker_symbol(a: &BigInt, n: &BigInt) -> i32 {
    if n.is_zero() {
        return if a.abs().is_one() { 1 } else { 0 };
    }
    if a.is_even() && n.is_even() {
        return 0;
    }
    let mut a = a.clone();
    let mut n = n.clone();
    let mut k = 1;
    let v = n.trailing_zeros().unwrap_or(0);
    n >>= v;
    if v % 2 == 1 {
        let r = (&a % 8u32 + 8u32) % 8u32;
        if r == BigInt::from(3) || r == BigInt::from(5) {
            k = -k;
        }
    }
    if n.is_negative() {
        n = -n;
        if a.is_negative() {
            k = -k;
        }
    }
    // n is odd and positive: Jacobi symbol
    a = a.mod_floor(&n);
    while !a.is_zero() {
        let v = a.trailing_zeros().unwrap_or(0);
        a >>= v;
        let n8 = (&n % 8u32).to_u32().unwrap();
        if v % 2 == 1 && (n8 == 3 || n8 == 5) {
            k = -k;
        }
        if (&a % 4u32).to_u32() == Some(3) && n8 % 4 == 3 {
            k = -k;
        }
        std::mem::swap(&mut a, &mut n);
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        k
    } else {
        0
    }
}

/// Kronecker symbol for machine-size arguments with `n > 0` odd.
pub fn jacobi_i64(a: i64, n: i64) -> i32 {
    debug_assert!(n > 0 && n % 2 == 1);
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut k = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                k = -k;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            k = -k;
        }
        a %= n;
    }
    if n == 1 {
        k
    } else {
        0
    }
}

/// Square root of `a` modulo an odd prime `p` (Tonelli-Shanks).
pub fn sqrt_mod(a: &BigInt, p: &BigInt) -> Result<BigInt, ArithError> {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return Ok(a);
    }
    if kronecker_symbol(&a, p) != 1 {
        return Err(ArithError::NonResidue(a));
    }
    let p1: BigInt = p - 1;
    if (p % 4u32) == BigInt::from(3) {
        return Ok(a.modpow(&((p + 1) >> 2u32), p));
    }
    let s = p1.trailing_zeros().unwrap();
    let q = &p1 >> s;
    let mut z = BigInt::from(2);
    while kronecker_symbol(&z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + 1) >> 1u32), p);
    while !t.is_one() {
        let mut i = 0;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = &t2 * &t2 % p;
            i += 1;
        }
        let b = c.modpow(&(BigInt::one() << (m - i - 1)), p);
        m = i;
        c = &b * &b % p;
        t = t * &c % p;
        r = r * b % p;
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NearPrimeSplit {
    pub cofactor: BigInt,
    pub prime_part: BigInt,
}

/// Smallest `c <= c_max` with `c | n` and `n / c` prime.
pub fn split_near_prime(n: &BigInt, c_max: u64, policy: &PrimalityPolicy) -> Option<NearPrimeSplit> {
    if n < &BigInt::from(2) {
        return None;
    }
    for c in 1..=c_max {
        let c = BigInt::from(c);
        if &c > n {
            break;
        }
        let (q, r) = n.div_rem(&c);
        if r.is_zero() && is_prime(&q, policy) {
            return Some(NearPrimeSplit { cofactor: c, prime_part: q });
        }
    }
    None
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let err = left + right - whole;
    if depth == 0 || err.abs() <= 15.0 * tol {
        return left + right + err / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// `∫_2^M dt / log²(t)` for `M` given through its natural logarithm.
pub fn log_integral2_ln(ln_m: f64) -> Result<f64, ArithError> {
    let ln2 = std::f64::consts::LN_2;
    if !(ln_m >= ln2) {
        return Err(ArithError::BelowTwo(format!("exp({ln_m})")));
    }
    if ln_m == ln2 {
        return Ok(0.0);
    }
    // t = e^u; scale by e^{-ln_m} to keep the integrand bounded
    let f = move |u: f64| (u - ln_m).exp() / (u * u);
    let (a, b) = (ln2, ln_m);
    // split into unit pieces so the exponential never under-resolves
    let pieces = ((b - a).ceil() as usize).max(1);
    let h = (b - a) / pieces as f64;
    let mut total = 0.0;
    for k in 0..pieces {
        let lo = a + k as f64 * h;
        let hi = if k + 1 == pieces { b } else { lo + h };
        let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
        let whole = simpson(lo, hi, fa, fm, fb);
        total += adaptive(&f, lo, hi, fa, fm, fb, whole, 1e-13 * whole.abs().max(1e-300), 40);
    }
    Ok(total * ln_m.exp())
}

/// `∫_2^M dt / log²(t)` with relative error well below `1e-6`.
pub fn log_integral2(m: f64) -> Result<f64, ArithError> {
    if !(m >= 2.0) {
        return Err(ArithError::BelowTwo(m.to_string()));
    }
    log_integral2_ln(m.ln())
}

/// Number of ones in the binary expansion of `|n|`.
pub fn hamming_weight(n: &BigInt) -> u64 {
    n.magnitude().count_ones()
}
