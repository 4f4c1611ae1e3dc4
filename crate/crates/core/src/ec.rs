//! Elliptic curves of prime order with CM by a class-number-one order:
//! the trace test, the polynomial search families, CM construction with twist
//! selection, Bateman-Horn density estimates and a brute-force census of
//! isogeny classes over small prime fields.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::{BigInt, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{self, is_prime, jacobi_i64, PrimalityPolicy};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EcError {
    #[error("unknown CM discriminant {0}")]
    UnknownDiscriminant(u32),
    #[error("supersingular trace {t} for p = {p}")]
    Supersingular { p: BigInt, t: BigInt },
    #[error("trace {t} violates the Hasse bound for p = {p}")]
    Hasse { p: BigInt, t: BigInt },
    #[error("t^2 - 4p = {0} does not match -d = -{1}")]
    WrongDiscriminant(BigInt, u32),
    #[error("singular curve")]
    Singular,
    #[error("point not on curve")]
    OffCurve,
    #[error("no twist of j = {j} has {n} points over F_{p}")]
    NoTwist { j: BigInt, p: BigInt, n: BigInt },
    #[error("p = {0} outside census range 5..=500 or not prime")]
    CensusRange(u64),
    #[error("record parse error: {0}")]
    Parse(String),
    #[error("CM table check failed for d = {0}")]
    CmTable(u32),
}

pub const CM_DISCRIMINANTS: [u32; 9] = [3, 4, 7, 8, 11, 19, 43, 67, 163];
pub const SEARCH_DISCRIMINANTS: [u32; 5] = [3, 19, 43, 67, 163];

/// j-invariant of the maximal order of discriminant `-d`.
pub fn cm_j_invariant(d: u32) -> Result<BigInt, EcError> {
    let j: i64 = match d {
        3 => 0,
        4 => 1728,
        7 => -3375,
        8 => 8000,
        11 => -32768,
        19 => -884736,
        43 => -884736000,
        67 => -147197952000,
        163 => -262537412640768000,
        _ => return Err(EcError::UnknownDiscriminant(d)),
    };
    Ok(BigInt::from(j))
}

/// Super-isolated trace test: `t^2 - 4p` is minus a class-number-one discriminant.
pub fn is_super_isolated_trace(p: &BigInt, t: &BigInt) -> Result<bool, EcError> {
    let disc = t * t - BigInt::from(4) * p;
    if !disc.is_negative() {
        return Err(EcError::Hasse { p: p.clone(), t: t.clone() });
    }
    if t.mod_floor(p).is_zero() {
        return Err(EcError::Supersingular { p: p.clone(), t: t.clone() });
    }
    Ok(CM_DISCRIMINANTS.iter().any(|&d| disc == BigInt::from(-(d as i64))))
}

/// Integer polynomial with coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly(pub Vec<i64>);

impl IntPoly {
    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.0.iter().rev().fold(BigInt::zero(), |acc, &c| acc * x + c)
    }

    pub fn eval_i64(&self, x: i64) -> i64 {
        self.0.iter().rev().fold(0, |acc, &c| acc * x + c)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().rposition(|&c| c != 0).unwrap_or(0)
    }

    pub fn mul(&self, o: &IntPoly) -> IntPoly {
        let mut out = vec![0; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly(out)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &c) in self.0.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            let coeff = if mag == 1 && k > 0 { String::new() } else { mag.to_string() };
            let var = match k {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{k}"),
            };
            write!(f, "{sign}{coeff}{var}")?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveFamily {
    pub d: u32,
    pub p_poly: IntPoly,
    pub n_poly: IntPoly,
}

impl CurveFamily {
    pub fn p(&self, x: &BigInt) -> BigInt {
        self.p_poly.eval(x)
    }

    pub fn n(&self, x: &BigInt) -> BigInt {
        self.n_poly.eval(x)
    }

    pub fn trace(&self, x: &BigInt) -> BigInt {
        self.p(x) + 1 - self.n(x)
    }
}

/// The `(p(x), N(x))` family with `t^2 - 4p = -d`.
pub fn family_for(d: u32) -> Result<CurveFamily, EcError> {
    let (p, n): (Vec<i64>, Vec<i64>) = match d {
        3 => (vec![1, 1, 1], vec![1, -1, 1]),
        4 => (vec![1, 0, 1], vec![2, -2, 1]),
        8 => (vec![2, 0, 1], vec![3, -2, 1]),
        7 | 11 | 19 | 43 | 67 | 163 => {
            let k = (d as i64 + 1) / 4;
            (vec![k, 1, 1], vec![k, -1, 1])
        }
        _ => return Err(EcError::UnknownDiscriminant(d)),
    };
    Ok(CurveFamily { d, p_poly: IntPoly(p), n_poly: IntPoly(n) })
}

/// `gcd_a p(a) N(a)`, taken over `a = 0..=deg(pN)`.
pub fn family_content_gcd(d: u32) -> Result<i64, EcError> {
    let fam = family_for(d)?;
    let prod = fam.p_poly.mul(&fam.n_poly);
    let mut g = 0i64;
    for a in 0..=prod.degree() as i64 {
        g = g.gcd(&prod.eval_i64(a));
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeierstrassCurve {
    pub p: BigInt,
    pub a4: BigInt,
    pub a6: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EcPoint {
    Infinity,
    Affine(BigInt, BigInt),
}

impl WeierstrassCurve {
    pub fn new(p: BigInt, a4: BigInt, a6: BigInt) -> Result<Self, EcError> {
        let a4 = a4.mod_floor(&p);
        let a6 = a6.mod_floor(&p);
        let disc = BigInt::from(4) * &a4 * &a4 * &a4 + BigInt::from(27) * &a6 * &a6;
        if p < BigInt::from(5) || disc.mod_floor(&p).is_zero() {
            return Err(EcError::Singular);
        }
        Ok(WeierstrassCurve { p, a4, a6 })
    }

    fn rhs(&self, x: &BigInt) -> BigInt {
        (x * x * x + &self.a4 * x + &self.a6).mod_floor(&self.p)
    }

    pub fn is_on_curve(&self, pt: &EcPoint) -> bool {
        match pt {
            EcPoint::Infinity => true,
            EcPoint::Affine(x, y) => (y * y).mod_floor(&self.p) == self.rhs(x),
        }
    }

    pub fn j_invariant(&self) -> BigInt {
        let p = &self.p;
        let a43 = BigInt::from(4) * &self.a4 * &self.a4 * &self.a4;
        let den = (&a43 + BigInt::from(27) * &self.a6 * &self.a6).mod_floor(p);
        let inv = den.modinv(p).expect("nonsingular");
        (BigInt::from(1728) * a43 * inv).mod_floor(p)
    }

    pub fn neg(&self, pt: &EcPoint) -> EcPoint {
        match pt {
            EcPoint::Infinity => EcPoint::Infinity,
            EcPoint::Affine(x, y) => EcPoint::Affine(x.clone(), (-y).mod_floor(&self.p)),
        }
    }

    pub fn add(&self, a: &EcPoint, b: &EcPoint) -> EcPoint {
        let p = &self.p;
        match (a, b) {
            (EcPoint::Infinity, _) => b.clone(),
            (_, EcPoint::Infinity) => a.clone(),
            (EcPoint::Affine(x1, y1), EcPoint::Affine(x2, y2)) => {
                let lambda = if x1 == x2 {
                    if (y1 + y2).mod_floor(p).is_zero() {
                        return EcPoint::Infinity;
                    }
                    let num = BigInt::from(3) * x1 * x1 + &self.a4;
                    let den = (BigInt::from(2) * y1).modinv(p).unwrap();
                    (num * den).mod_floor(p)
                } else {
                    let den = (x2 - x1).mod_floor(p).modinv(p).unwrap();
                    ((y2 - y1) * den).mod_floor(p)
                };
                let x3 = (&lambda * &lambda - x1 - x2).mod_floor(p);
                let y3 = (lambda * (x1 - &x3) - y1).mod_floor(p);
                EcPoint::Affine(x3, y3)
            }
        }
    }

    /// `[k]P` by double-and-add.
    pub fn scalar_mul(&self, pt: &EcPoint, k: &BigInt) -> Result<EcPoint, EcError> {
        if !self.is_on_curve(pt) {
            return Err(EcError::OffCurve);
        }
        let base = if k.is_negative() { self.neg(pt) } else { pt.clone() };
        let k = k.abs();
        let mut acc = EcPoint::Infinity;
        for i in (0..k.bits()).rev() {
            acc = self.add(&acc, &acc);
            if k.bit(i) {
                acc = self.add(&acc, &base);
            }
        }
        Ok(acc)
    }

    pub fn random_point(&self, rng: &mut ChaCha20Rng) -> EcPoint {
        loop {
            let x = rng.gen_bigint_range(&BigInt::zero(), &self.p);
            let r = self.rhs(&x);
            if let Ok(y) = arith::sqrt_mod(&r, &self.p) {
                let y = if rng.gen_bool_half() { y } else { (-y).mod_floor(&self.p) };
                return EcPoint::Affine(x, y);
            }
        }
    }

    /// Exhaustive point count, for small `p`.
    pub fn count_points(&self) -> u64 {
        let p = self.p.to_i64().expect("small p");
        let a4 = self.a4.to_i64().unwrap();
        let a6 = self.a6.to_i64().unwrap();
        let mut n = 1u64;
        for x in 0..p {
            let r = ((x * x % p * x + a4 * x + a6) % p + p) % p;
            n += match if r == 0 { 0 } else { jacobi_i64(r, p) } {
                0 => 1,
                1 => 2,
                _ => 0,
            };
        }
        n
    }
}

trait HalfCoin {
    fn gen_bool_half(&mut self) -> bool;
}

impl HalfCoin for ChaCha20Rng {
    fn gen_bool_half(&mut self) -> bool {
        rand::Rng::gen::<bool>(self)
    }
}

/// `N * P == O` for `max(trials, 1)` sampled points.
pub fn verify_curve_order(curve: &WeierstrassCurve, n: &BigInt, trials: u32) -> bool {
    let seed = curve.a6.iter_u64_digits().next().unwrap_or(0) ^ curve.p.iter_u64_digits().next().unwrap_or(0);
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0xc0ffee);
    for _ in 0..trials.max(1) {
        let pt = curve.random_point(&mut rng);
        if curve.scalar_mul(&pt, n).unwrap() != EcPoint::Infinity {
            return false;
        }
    }
    true
}

/// Twist trials used when selecting a curve.
pub const TWIST_TRIALS: u32 = 8;

fn twist_candidates(d: u32, p: &BigInt) -> Box<dyn Iterator<Item = (BigInt, BigInt)> + '_> {
    let j = cm_j_invariant(d).unwrap();
    if d == 3 {
        return Box::new((1u64..).map(move |b| (BigInt::zero(), BigInt::from(b))));
    }
    if d == 4 {
        return Box::new((1u64..).map(move |a| (BigInt::from(a), BigInt::zero())));
    }
    // y^2 = x^3 + 3k x + 2k with k = j/(1728 - j), and its quadratic twist
    let k = (j.mod_floor(p) * (BigInt::from(1728) - &j).mod_floor(p).modinv(p).unwrap()).mod_floor(p);
    let mut c = BigInt::from(2);
    while arith::kronecker_symbol(&c, p) != -1 {
        c += 1;
    }
    let base = (BigInt::from(3) * &k, BigInt::from(2) * &k);
    let twist = (
        (BigInt::from(3) * &k * &c * &c).mod_floor(p),
        (BigInt::from(2) * &k * &c * &c * &c).mod_floor(p),
    );
    Box::new([base, twist].into_iter())
}

fn cm_table_checked() -> &'static Result<(), EcError> {
    static CHECK: OnceLock<Result<(), EcError>> = OnceLock::new();
    CHECK.get_or_init(validate_cm_table)
}

/// Check every bundled j-invariant at the smallest prime `p > 163` with
/// `4p = t^2 + d v^2`, by counting points exhaustively on the twists.
pub fn validate_cm_table() -> Result<(), EcError> {
    for &d in &CM_DISCRIMINANTS {
        let di = d as i64;
        let (p, t) = (1i64..)
            .flat_map(|v| (1i64..200).map(move |t| (t, v)))
            .filter_map(|(t, v)| {
                let four_p = t * t + di * v * v;
                (four_p % 4 == 0).then_some((four_p / 4, t))
            })
            .find(|&(p, t)| p > 163 && arith::is_prime_u64(p as u64) && t % p != 0)
            .unwrap();
        let pb = BigInt::from(p);
        let mut ok = false;
        for (a4, a6) in twist_candidates(d, &pb).take(12) {
            if let Ok(c) = WeierstrassCurve::new(pb.clone(), a4, a6) {
                let cnt = c.count_points() as i64;
                if cnt == p + 1 - t || cnt == p + 1 + t {
                    ok = true;
                } else if d != 3 && d != 4 {
                    return Err(EcError::CmTable(d));
                }
            }
        }
        if !ok {
            return Err(EcError::CmTable(d));
        }
    }
    Ok(())
}

/// CM construction of a curve over `F_p` with exactly `n` points.
pub fn construct_curve(d: u32, p: &BigInt, n: &BigInt) -> Result<WeierstrassCurve, EcError> {
    if let Err(e) = cm_table_checked() {
        return Err(e.clone());
    }
    let j = cm_j_invariant(d)?;
    let t: BigInt = p + 1 - n;
    if !is_super_isolated_trace(p, &t)? || &t * &t - BigInt::from(4) * p != BigInt::from(-(d as i64)) {
        return Err(EcError::WrongDiscriminant(&t * &t - BigInt::from(4) * p, d));
    }
    let small = p.bits() <= 16;
    let limit = if d == 3 || d == 4 { 64 } else { 2 };
    for (a4, a6) in twist_candidates(d, p).take(limit) {
        let Ok(curve) = WeierstrassCurve::new(p.clone(), a4, a6) else { continue };
        let ok = if small {
            BigInt::from(curve.count_points()) == *n
        } else {
            verify_curve_order(&curve, n, TWIST_TRIALS)
        };
        if ok {
            return Ok(curve);
        }
    }
    Err(EcError::NoTwist { j, p: p.clone(), n: n.clone() })
}

/// For `j = 0`: `y^2 = x^3 + b1` and `y^2 = x^3 + b2` are isomorphic over `F_p`.
pub fn j0_isomorphic(p: &BigInt, b1: &BigInt, b2: &BigInt) -> bool {
    let ratio = (b2 * b1.modinv(p).unwrap()).mod_floor(p);
    let e: BigInt = (p - 1) / 6;
    (p - 1u32).mod_floor(&BigInt::from(6)).is_zero() && ratio.modpow(&e, p).is_one()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperIsolatedCurveRecord {
    pub d: u32,
    pub x: BigInt,
    pub p: BigInt,
    pub n: BigInt,
    pub t: BigInt,
    pub curve: WeierstrassCurve,
}

impl fmt::Display for SuperIsolatedCurveRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "d={} x={} p={} N={} t={} a4={} a6={}",
            self.d, self.x, self.p, self.n, self.t, self.curve.a4, self.curve.a6
        )
    }
}

pub(crate) fn parse_fields(line: &str) -> BTreeMap<&str, &str> {
    line.split_whitespace().filter_map(|kv| kv.split_once('=')).collect()
}

impl FromStr for SuperIsolatedCurveRecord {
    type Err = EcError;

    fn from_str(line: &str) -> Result<Self, EcError> {
        let kv = parse_fields(line);
        let get = |k: &str| -> Result<BigInt, EcError> {
            kv.get(k)
                .ok_or_else(|| EcError::Parse(format!("missing {k}")))?
                .parse::<BigInt>()
                .map_err(|e| EcError::Parse(format!("{k}: {e}")))
        };
        let d = get("d")?.to_u32().ok_or_else(|| EcError::Parse("d".into()))?;
        let p = get("p")?;
        let curve = WeierstrassCurve { p: p.clone(), a4: get("a4")?, a6: get("a6")? };
        Ok(SuperIsolatedCurveRecord { d, x: get("x")?, p, n: get("N")?, t: get("t")?, curve })
    }
}

/// Re-check a record: primality, trace relation and curve order.
pub fn verify_curve_record(rec: &SuperIsolatedCurveRecord, policy: &PrimalityPolicy) -> Result<(), String> {
    let fam = family_for(rec.d).map_err(|e| e.to_string())?;
    if fam.p(&rec.x) != rec.p || fam.n(&rec.x) != rec.n {
        return Err("p or N does not match the family at x".into());
    }
    if !is_prime(&rec.p, policy) || !is_prime(&rec.n, policy) {
        return Err("p or N not prime".into());
    }
    if &rec.p + 1 - &rec.t != rec.n || &rec.t * &rec.t - BigInt::from(4) * &rec.p != BigInt::from(-(rec.d as i64)) {
        return Err("trace relation fails".into());
    }
    let curve = WeierstrassCurve::new(rec.p.clone(), rec.curve.a4.clone(), rec.curve.a6.clone())
        .map_err(|e| e.to_string())?;
    if curve.j_invariant() != cm_j_invariant(rec.d).unwrap().mod_floor(&rec.p) {
        return Err("wrong j-invariant".into());
    }
    if !verify_curve_order(&curve, &rec.n, 20) {
        return Err("curve order check failed".into());
    }
    Ok(())
}

/// Records for every `x` of the source with `p(x)` and `N(x)` both prime,
/// in source order, at most `count` of them.
pub fn search_curves(
    d: u32,
    xs: impl IntoIterator<Item = BigInt>,
    count: usize,
    policy: &PrimalityPolicy,
) -> Result<Vec<SuperIsolatedCurveRecord>, EcError> {
    let fam = family_for(d)?;
    let mut out = Vec::new();
    let mut it = xs.into_iter().peekable();
    const BATCH: usize = 2048;
    while out.len() < count && it.peek().is_some() {
        let batch: Vec<BigInt> = it.by_ref().take(BATCH).collect();
        let hits: Vec<Option<SuperIsolatedCurveRecord>> = batch
            .par_iter()
            .map(|x| {
                let p = fam.p(x);
                let n = fam.n(x);
                if p < BigInt::from(5) || !is_prime(&p, policy) || !is_prime(&n, policy) {
                    return None;
                }
                let curve = construct_curve(d, &p, &n).ok()?;
                Some(SuperIsolatedCurveRecord { d, x: x.clone(), t: fam.trace(x), p, n, curve })
            })
            .collect();
        out.extend(hits.into_iter().flatten().take(count - out.len()));
    }
    Ok(out)
}

/// Seeded stream of `x` with `p(x)` of exactly `bits` bits.
pub fn random_x_source(d: u32, bits: u64, seed: u64) -> Result<impl Iterator<Item = BigInt>, EcError> {
    let fam = family_for(d)?;
    let lo_p = BigInt::one() << (bits - 1);
    let hi_p = BigInt::one() << bits;
    let lo = num_integer::Roots::sqrt(&lo_p);
    let hi = num_integer::Roots::sqrt(&hi_p) + 1;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    Ok(std::iter::repeat_with(move || rng.gen_bigint_range(&lo, &hi))
        .filter(move |x| {
            let p = fam.p(x);
            p >= lo_p && p < hi_p
        }))
}

// ---------------------------------------------------------------------------
// Density estimates

fn sieve(limit: usize) -> Vec<usize> {
    let mut comp = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !comp[i] {
            out.push(i);
            let mut j = i * i;
            while j <= limit {
                comp[j] = true;
                j += i;
            }
        }
    }
    out
}

fn root_count(fam: &CurveFamily, q: i64) -> i64 {
    if q < 1000 {
        let prod = fam.p_poly.mul(&fam.n_poly);
        return (0..q)
            .filter(|&x| prod.0.iter().rev().fold(0i64, |acc, &c| (acc * x + c).rem_euclid(q)) == 0)
            .count() as i64;
    }
    // both factors have discriminant -d and no common root modulo q > 1000
    2 * (1 + jacobi_i64(-(fam.d as i64), q) as i64)
}

/// Euler product `prod_{q <= bound} (1 - w(q)/q) (1 - 1/q)^-2`.
pub fn bateman_horn_constant(d: u32, prime_bound: usize) -> Result<f64, EcError> {
    let fam = family_for(d)?;
    let primes = sieve(prime_bound);
    let log_sum: f64 = primes
        .par_iter()
        .map(|&q| {
            let qf = q as f64;
            let w = root_count(&fam, q as i64) as f64;
            (1.0 - w / qf).ln() - 2.0 * (1.0 - 1.0 / qf).ln()
        })
        .sum();
    Ok(log_sum.exp())
}

/// Coefficient `sum_d C_d / 4` using the rounded constants.
pub const HEURISTIC_COEFFICIENT: f64 = 19.7;

/// Expected number of super-isolated prime-order curves with `p <= M`.
pub fn expected_curve_count(m: f64) -> Result<f64, arith::ArithError> {
    if m < 4.0 {
        return Err(arith::ArithError::BelowTwo(m.sqrt().to_string()));
    }
    Ok(HEURISTIC_COEFFICIENT * arith::log_integral2(m.sqrt())?)
}

/// Expected number of samples `x` in `[0, 2^x_bits]` per hit for a family with constant `c`.
pub fn expected_samples_per_hit(c: f64, x_bits: u32) -> f64 {
    let ln_x = x_bits as f64 * std::f64::consts::LN_2;
    let li = arith::log_integral2_ln(ln_x).unwrap();
    // X / ((c/4) li2(X)) computed in log space
    (ln_x - li.ln()).exp() / (c / 4.0)
}

// ---------------------------------------------------------------------------
// Census of isogeny classes

/// Number of isomorphism classes of ordinary curves over `F_p` for each trace.
pub fn isogeny_class_census(p: u64) -> Result<BTreeMap<i64, u64>, EcError> {
    if !(5..=500).contains(&p) || !arith::is_prime_u64(p) {
        return Err(EcError::CensusRange(p));
    }
    let pi = p as i64;
    let m = |a: i64, b: i64| (a * b).rem_euclid(pi);
    let units: Vec<(i64, i64)> = (1..pi)
        .map(|u| {
            let u2 = m(u, u);
            (m(u2, u2), m(m(u2, u2), u2))
        })
        .collect();
    let chi: Vec<i64> = (0..pi).map(|r| if r == 0 { 0 } else { jacobi_i64(r, pi) as i64 }).collect();
    let mut seen = vec![false; (p * p) as usize];
    let mut census = BTreeMap::new();
    for a4 in 0..pi {
        for a6 in 0..pi {
            let idx = (a4 * pi + a6) as usize;
            if seen[idx] {
                continue;
            }
            if (4 * m(m(a4, a4), a4) + 27 * m(a6, a6)).rem_euclid(pi) == 0 {
                seen[idx] = true;
                continue;
            }
            for &(u4, u6) in &units {
                seen[(m(u4, a4) * pi + m(u6, a6)) as usize] = true;
            }
            let s: i64 = (0..pi).map(|x| chi[((m(m(x, x), x) + m(a4, x) + a6).rem_euclid(pi)) as usize]).sum();
            let t = -s;
            if t.rem_euclid(pi) != 0 {
                *census.entry(t).or_insert(0) += 1;
            }
        }
    }
    Ok(census)
}
