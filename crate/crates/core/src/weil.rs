//! Enumeration of super-isolated Weil numbers in a quartic CM field of class
//! number one, the termination bound on the unit-orbit index, verification,
//! and a brute-force oracle for small coefficient boxes.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{is_prime, split_near_prime, NearPrimeSplit, PrimalityPolicy};
use crate::cm::{compute_search_polynomials, CmError, CmField, QuarticElement, Registry, SearchPolynomials};
use crate::ec::parse_fields;
use crate::quadratic::{fundamental_unit, ideal_generator, QuadError, RealQuadElement, RealQuadIdeal};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeilError {
    #[error(transparent)]
    Cm(#[from] CmError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("field {0}: no orbit bound below {1}")]
    NoBound(String, u64),
    #[error("field {0}: leading coefficient of P4 is not positive on branch {1}")]
    DegenerateP4(String, Branch),
    #[error("record parse error: {0}")]
    Parse(String),
}

fn q(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// One of the eight sign choices: `sigma = tau * eps^i * gamma`, `f1 = e1`, `f2 = e2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Branch {
    pub tau: i8,
    pub e1: i8,
    pub e2: i8,
}

impl Branch {
    pub fn all() -> Vec<Branch> {
        let mut v = Vec::new();
        for tau in [1, -1] {
            for e1 in [1, -1] {
                for e2 in [1, -1] {
                    v.push(Branch { tau, e1, e2 });
                }
            }
        }
        v
    }
}

fn sgn(s: i8) -> char {
    if s > 0 {
        '+'
    } else {
        '-'
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", sgn(self.tau), sgn(self.e1), sgn(self.e2))
    }
}

impl FromStr for Branch {
    type Err = WeilError;

    fn from_str(s: &str) -> Result<Self, WeilError> {
        let c: Vec<i8> = s
            .chars()
            .map(|ch| match ch {
                '+' => Ok(1),
                '-' => Ok(-1),
                _ => Err(WeilError::Parse(format!("branch {s}"))),
            })
            .collect::<Result<_, _>>()?;
        if c.len() != 3 {
            return Err(WeilError::Parse(format!("branch {s}")));
        }
        Ok(Branch { tau: c[0], e1: c[1], e2: c[2] })
    }
}

/// A field together with its search forms, ideal generator and unit.
#[derive(Debug, Clone)]
pub struct SurfaceContext {
    pub field: CmField,
    pub polys: SearchPolynomials,
    pub gamma: RealQuadElement,
    pub eps: RealQuadElement,
}

impl SurfaceContext {
    pub fn new(field: &CmField) -> Result<Self, WeilError> {
        let polys = compute_search_polynomials(field)?;
        let f2 = &polys.f2;
        let ideal = RealQuadIdeal::new(field.disc_f, f2.a.abs(), f2.b.clone())?;
        let gamma = ideal_generator(&ideal)?;
        let eps = fundamental_unit(field.disc_f)?;
        Ok(SurfaceContext { field: field.clone(), polys, gamma, eps })
    }

    /// Same field with an explicitly chosen generator and unit.
    pub fn with_choices(&self, gamma: RealQuadElement, eps: RealQuadElement) -> Self {
        SurfaceContext { gamma, eps, ..self.clone() }
    }

    fn a(&self) -> &BigInt {
        &self.polys.f2.a
    }

    fn b(&self) -> &BigInt {
        &self.polys.f2.b
    }

    /// `(a3, a4)` with `sigma = a3 * a + a4 * (b + sqrt d)/2`.
    pub fn orbit_coords(&self, sigma: &RealQuadElement) -> (BigRational, BigRational) {
        let a4 = &sigma.v * q(2);
        let a3 = (&sigma.u - &a4 * q(self.b().clone()) / q(2)) / q(self.a().clone());
        (a3, a4)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPoint {
    pub i: i64,
    pub tau: i8,
    pub a3: BigRational,
    pub a4: BigRational,
}

/// `sigma = tau * eps^i * gamma` for `i` in `range`, both signs `tau`.
pub fn enumerate_unit_orbit(ctx: &SurfaceContext, range: std::ops::RangeInclusive<i64>) -> Vec<OrbitPoint> {
    let (lo, hi) = (*range.start(), *range.end());
    if lo > hi {
        return Vec::new();
    }
    let mut cur = ctx.gamma.mul(&ctx.eps.pow(lo).unwrap());
    let mut out = Vec::with_capacity(2 * (hi - lo + 1) as usize);
    for i in lo..=hi {
        for tau in [1i8, -1] {
            let sigma = if tau > 0 { cur.clone() } else { cur.neg() };
            let (a3, a4) = ctx.orbit_coords(&sigma);
            out.push(OrbitPoint { i, tau, a3, a4 });
        }
        cur = cur.mul(&ctx.eps);
    }
    out
}

/// `(a1, a2)` from `f1 = e1` and `2 p0 = g + f1 x1 = 0`, when integral.
pub fn complete_solution(polys: &SearchPolynomials, a3: &BigInt, a4: &BigInt, e1: i8) -> Option<(BigInt, BigInt)> {
    let f1 = &polys.f1;
    let num = BigInt::from(e1) - &f1[2] * a3 - &f1[3] * a4;
    let (a2, r) = num.div_rem(&f1[1]);
    if !r.is_zero() {
        return None;
    }
    let gv = polys.g.eval(&[BigInt::zero(), a2.clone(), a3.clone(), a4.clone()]);
    if !gv.is_integer() {
        return None;
    }
    let a1 = -BigInt::from(e1) * gv.to_integer();
    Some((a1, a2))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperIsolatedWeilRecord {
    pub field_id: String,
    pub coords: [BigInt; 4],
    pub p: BigInt,
    pub char_poly: [BigInt; 5],
    pub order: BigInt,
    pub split: Option<NearPrimeSplit>,
    pub orbit_index: i64,
    pub branch: Branch,
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for SuperIsolatedWeilRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (c, r) = match &self.split {
            Some(s) => (s.cofactor.to_string(), s.prime_part.to_string()),
            None => ("-".to_string(), "-".to_string()),
        };
        write!(
            f,
            "field={} a={} p={} charpoly={} N={} cofactor={} prime={} i={} branch={}",
            self.field_id,
            join(&self.coords),
            self.p,
            join(&self.char_poly),
            self.order,
            c,
            r,
            self.orbit_index,
            self.branch
        )
    }
}

impl FromStr for SuperIsolatedWeilRecord {
    type Err = WeilError;

    fn from_str(line: &str) -> Result<Self, WeilError> {
        let kv = parse_fields(line);
        let perr = |m: String| WeilError::Parse(m);
        let get = |k: &str| kv.get(k).copied().ok_or_else(|| perr(format!("missing {k}")));
        let int = |s: &str| s.parse::<BigInt>().map_err(|e| perr(format!("{s}: {e}")));
        let ints = |s: &str| s.split(',').map(int).collect::<Result<Vec<_>, _>>();
        let coords: [BigInt; 4] = ints(get("a")?)?.try_into().map_err(|_| perr("a needs 4 entries".into()))?;
        let char_poly: [BigInt; 5] =
            ints(get("charpoly")?)?.try_into().map_err(|_| perr("charpoly needs 5 entries".into()))?;
        let split = match (get("cofactor")?, get("prime")?) {
            ("-", "-") => None,
            (c, r) => Some(NearPrimeSplit { cofactor: int(c)?, prime_part: int(r)? }),
        };
        Ok(SuperIsolatedWeilRecord {
            field_id: get("field")?.to_string(),
            coords,
            p: int(get("p")?)?,
            char_poly,
            order: int(get("N")?)?,
            split,
            orbit_index: get("i")?.parse().map_err(|_| perr("i".into()))?,
            branch: get("branch")?.parse()?,
        })
    }
}

#[derive(Debug, Clone)]
pub struct WeilSearchParams {
    pub p_max: BigInt,
    pub i_max: Option<u64>,
    pub sign_set: Vec<Branch>,
    pub cofactor_max: u64,
}

impl WeilSearchParams {
    pub fn new(p_max: BigInt) -> Self {
        WeilSearchParams { p_max, i_max: None, sign_set: Branch::all(), cofactor_max: 1000 }
    }
}

fn record_for(
    ctx: &SurfaceContext,
    coords: [BigInt; 4],
    i: i64,
    branch: Branch,
    p_max: &BigInt,
    cofactor_max: u64,
    policy: &PrimalityPolicy,
) -> Option<SuperIsolatedWeilRecord> {
    let p = ctx.polys.p_hat.eval(&coords);
    if !p.is_integer() {
        return None;
    }
    let p = p.to_integer();
    if &p > p_max || p < BigInt::from(2) || !is_prime(&p, policy) {
        return None;
    }
    let pi = ctx.field.from_coords(&coords);
    let char_poly = ctx.field.char_poly(&pi).ok()?;
    let order: BigInt = char_poly.iter().sum();
    let split = split_near_prime(&order, cofactor_max, policy);
    Some(SuperIsolatedWeilRecord { field_id: ctx.field.id.clone(), coords, p, char_poly, order, split, orbit_index: i, branch })
}

/// Orbit candidates for indices in `range`, before deduplication.
pub fn search_range(
    ctx: &SurfaceContext,
    range: std::ops::RangeInclusive<i64>,
    params: &WeilSearchParams,
    policy: &PrimalityPolicy,
) -> Vec<SuperIsolatedWeilRecord> {
    let (lo, hi) = (*range.start(), *range.end());
    let chunk = 16i64;
    let starts: Vec<i64> = (lo..=hi).step_by(chunk as usize).collect();
    let a = ctx.polys.f2.a.clone();
    let norm_sign = |s: &RealQuadElement| -> i8 {
        // N(sigma) = a * f2(a3, a4)
        let n = s.norm() / q(a.clone());
        if n.is_positive() {
            1
        } else {
            -1
        }
    };
    let mut out: Vec<SuperIsolatedWeilRecord> = starts
        .par_iter()
        .flat_map_iter(|&s| {
            let e = (s + chunk - 1).min(hi);
            let mut recs = Vec::new();
            for pt in enumerate_unit_orbit(ctx, s..=e) {
                if !pt.a3.is_integer() || !pt.a4.is_integer() {
                    continue;
                }
                let (a3, a4) = (pt.a3.to_integer(), pt.a4.to_integer());
                let sigma = ctx.field.f_elem(&pt.a3 * q(a.clone()) + &pt.a4 * q(ctx.polys.f2.b.clone()) / q(2), &pt.a4 / q(2));
                let e2 = norm_sign(&sigma);
                for e1 in [1i8, -1] {
                    let branch = Branch { tau: pt.tau, e1, e2 };
                    if !params.sign_set.contains(&branch) {
                        continue;
                    }
                    if let Some((a1, a2)) = complete_solution(&ctx.polys, &a3, &a4, e1) {
                        let coords = [a1, a2, a3.clone(), a4.clone()];
                        if let Some(r) = record_for(ctx, coords, pt.i, branch, &params.p_max, params.cofactor_max, policy) {
                            recs.push(r);
                        }
                    }
                }
            }
            recs
        })
        .collect();
    // a4 = 0 forces a * a3^2 = +-1
    if ctx.polys.f2.a.abs().is_one() && lo <= 0 && 0 <= hi {
        for a3 in [1i64, -1] {
            let (a3, a4) = (BigInt::from(a3), BigInt::zero());
            let e2: i8 = if ctx.polys.f2.eval(&a3, &a4).is_positive() { 1 } else { -1 };
            for e1 in [1i8, -1] {
                let branch = Branch { tau: if a3.is_positive() { 1 } else { -1 }, e1, e2 };
                if !params.sign_set.contains(&branch) {
                    continue;
                }
                if let Some((a1, a2)) = complete_solution(&ctx.polys, &a3, &a4, e1) {
                    if let Some(r) =
                        record_for(ctx, [a1, a2, a3.clone(), a4.clone()], 0, branch, &params.p_max, params.cofactor_max, policy)
                    {
                        out.push(r);
                    }
                }
            }
        }
    }
    out
}

fn canonical_order(a: &SuperIsolatedWeilRecord, b: &SuperIsolatedWeilRecord) -> Ordering {
    a.p.cmp(&b.p)
        .then_with(|| a.char_poly.cmp(&b.char_poly))
        .then_with(|| a.orbit_index.abs().cmp(&b.orbit_index.abs()))
        .then_with(|| a.orbit_index.cmp(&b.orbit_index))
        .then_with(|| b.branch.cmp(&a.branch))
        .then_with(|| a.coords.cmp(&b.coords))
}

/// One record per characteristic polynomial, in a scheduling-independent order.
pub fn dedup_by_char_poly(mut recs: Vec<SuperIsolatedWeilRecord>) -> Vec<SuperIsolatedWeilRecord> {
    recs.sort_by(canonical_order);
    recs.dedup_by(|a, b| a.char_poly == b.char_poly);
    recs
}

/// All super-isolated Weil numbers of the field with `p <= p_max`.
pub fn search(
    ctx: &SurfaceContext,
    params: &WeilSearchParams,
    policy: &PrimalityPolicy,
) -> Result<(Vec<SuperIsolatedWeilRecord>, Option<BoundCertificate>), WeilError> {
    let (i_max, cert) = match params.i_max {
        Some(i) => (i, None),
        None => {
            let c = compute_i_bound(ctx, &params.p_max)?;
            (c.i_max, Some(c))
        }
    };
    let i = i_max as i64;
    let recs = search_range(ctx, -i..=i, params, policy);
    Ok((dedup_by_char_poly(recs), cert))
}

// ---------------------------------------------------------------------------
// Orbit bound

/// Constants certifying that orbit indices `|i| > i_max` only give `p > p_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCertificate {
    /// `|a3| <= c0 |a4|` whenever `f2(a3, a4) = +-1`, `a4 != 0`.
    pub c0: BigInt,
    /// `max |phi(sigma)| <= bracket * |a4|`.
    pub bracket: BigInt,
    /// `|a4| >= c1 * c2^|i|`.
    pub c1: BigRational,
    pub c2: BigRational,
    /// `p_hat >= p4_leading * a4^4` whenever `|a4| >= p4_threshold`.
    pub p4_leading: BigRational,
    pub p4_threshold: BigRational,
    /// Leading coefficient `A4 + w B3` of each branch, rounded.
    pub branch_leading: Vec<(Branch, f64)>,
    pub i_max: u64,
}

impl fmt::Display for BoundCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lead_min = self.branch_leading.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
        write!(
            f,
            "C0={} bracket={} C1={} C2={} P4_leading={:.6} P4_threshold={:.6} leading_min={:.6} i_max={}",
            self.c0,
            self.bracket,
            self.c1,
            self.c2,
            crate::quadratic::ratio_to_f64(&self.p4_leading),
            crate::quadratic::ratio_to_f64(&self.p4_threshold),
            lead_min,
            self.i_max
        )
    }
}

const SQRT_BITS: u32 = 64;

/// Rational bracket `[lo, hi]` around `sqrt(r)`.
fn sqrt_bounds(r: &BigRational) -> (BigRational, BigRational) {
    let scale = BigInt::one() << (2 * SQRT_BITS);
    let s = r * q(scale);
    let lo_int = s.floor().to_integer().max(BigInt::zero()).sqrt();
    let hi_int = s.ceil().to_integer().sqrt() + 1;
    let den = BigInt::one() << SQRT_BITS;
    (BigRational::new(lo_int, den.clone()), BigRational::new(hi_int, den))
}

/// Smallest integer `n >= 0` with `n >= (x + sqrt(d)) / y`, `y > 0`.
fn ceil_plus_sqrt(x: &BigRational, d: &BigInt, y: &BigRational) -> BigInt {
    let (lo, _) = sqrt_bounds(&q(d.clone()));
    let mut n = ((x + lo) / y).floor().to_integer().max(BigInt::zero());
    loop {
        let lhs = q(n.clone()) * y - x;
        if !lhs.is_negative() && &lhs * &lhs >= q(d.clone()) {
            return n;
        }
        n += 1;
    }
}

/// `[lo, hi]` around `phi_k(e)`.
fn embedding_interval(e: &RealQuadElement, k: usize) -> (BigRational, BigRational) {
    let (slo, shi) = sqrt_bounds(&q(e.disc));
    let v = if k == 0 { e.v.clone() } else { -&e.v };
    let (a, b) = (&v * &slo, &v * &shi);
    let (mn, mx) = if a <= b { (a, b) } else { (b, a) };
    (&e.u + mn, &e.u + mx)
}

fn abs_lower(iv: &(BigRational, BigRational)) -> BigRational {
    if iv.0.is_positive() {
        iv.0.clone()
    } else if iv.1.is_negative() {
        -iv.1.clone()
    } else {
        BigRational::zero()
    }
}

fn abs_upper(iv: &(BigRational, BigRational)) -> BigRational {
    iv.0.abs().max(iv.1.abs())
}

/// Lower bound of `|phi_k(e)|`, through the norm when cancellation is severe.
fn embedding_abs_lower(e: &RealQuadElement, k: usize) -> BigRational {
    let direct = abs_lower(&embedding_interval(e, k));
    let other = abs_upper(&embedding_interval(e, 1 - k));
    if other.is_zero() {
        return direct;
    }
    direct.max(e.norm().abs() / other)
}

type RPoly = Vec<BigRational>;

fn padd(a: &RPoly, b: &RPoly) -> RPoly {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_else(BigRational::zero) + b.get(i).cloned().unwrap_or_else(BigRational::zero))
        .collect()
}

fn pmul(a: &RPoly, b: &RPoly) -> RPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn pscale(a: &RPoly, k: &BigRational) -> RPoly {
    a.iter().map(|x| x * k).collect()
}

/// `A(X) + Y B(X)` with `Y^2 = y2(X)`.
#[derive(Debug, Clone)]
struct Surd {
    a: RPoly,
    b: RPoly,
}

impl Surd {
    fn constant(c: BigRational) -> Surd {
        Surd { a: vec![c], b: Vec::new() }
    }

    fn add(&self, o: &Surd) -> Surd {
        Surd { a: padd(&self.a, &o.a), b: padd(&self.b, &o.b) }
    }

    fn scale(&self, k: &BigRational) -> Surd {
        Surd { a: pscale(&self.a, k), b: pscale(&self.b, k) }
    }

    fn mul(&self, o: &Surd, y2: &RPoly) -> Surd {
        Surd {
            a: padd(&pmul(&self.a, &o.a), &pmul(&pmul(&self.b, &o.b), y2)),
            b: padd(&pmul(&self.a, &o.b), &pmul(&self.b, &o.a)),
        }
    }
}

fn trim(mut p: RPoly) -> RPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

/// `p_hat` along the branch `(e1, e2)` as `A(X) + Y B(X)` with `X = a4`,
/// `Y = 2 a a3 + b a4` and `Y^2 = disc_f X^2 + 4 a e2`.
pub fn p4_branch(ctx: &SurfaceContext, e1: i8, e2: i8) -> (Vec<BigRational>, Vec<BigRational>) {
    let pol = &ctx.polys;
    let (a, b) = (q(pol.f2.a.clone()), q(pol.f2.b.clone()));
    let y2: RPoly = vec![q(4) * &a * q(e2), BigRational::zero(), q(ctx.field.disc_f)];
    let x = Surd { a: vec![BigRational::zero(), BigRational::one()], b: Vec::new() };
    let y = Surd { a: Vec::new(), b: vec![BigRational::one()] };
    let a4 = x.clone();
    let a3 = x.scale(&-&b).add(&y).scale(&(q(2) * &a).recip());
    let a2 = Surd::constant(q(e1))
        .add(&a3.scale(&-q(pol.f1[2].clone())))
        .add(&a4.scale(&-q(pol.f1[3].clone())))
        .scale(&q(pol.f1[1].clone()).recip());
    let eval = |form: &crate::cm::QuadForm, xs: &[Surd; 4], from: usize| {
        let mut acc = Surd { a: Vec::new(), b: Vec::new() };
        for i in from..4 {
            for j in i..4 {
                let c = form.coeff(i, j);
                if !c.is_zero() {
                    acc = acc.add(&xs[i].mul(&xs[j], &y2).scale(c));
                }
            }
        }
        acc
    };
    let zero = Surd { a: Vec::new(), b: Vec::new() };
    let g = eval(&pol.g, &[zero, a2.clone(), a3.clone(), a4.clone()], 1);
    let a1 = g.scale(&-q(e1));
    let p = eval(&pol.p_hat, &[a1, a2, a3, a4], 0);
    (trim(p.a), trim(p.b))
}

fn coeff(p: &[BigRational], k: usize) -> BigRational {
    p.get(k).cloned().unwrap_or_else(BigRational::zero)
}

/// Rational lower bound of `P4(X) / X^4` over `|X| >= 1/h` on one branch.
fn p4_lower(a_poly: &[BigRational], b_poly: &[BigRational], wsign: i8, h: &BigRational, d: i64, a4e2: &BigRational) -> Option<BigRational> {
    // P4 / X^4 = sum A_k u^(4-k) + w sum B_k u^(3-k), u = 1/X, Y = w X
    let mut alow = coeff(a_poly, 4);
    for k in 0..4 {
        alow -= coeff(a_poly, k).abs() * h.pow(4 - k as i32);
    }
    let b3 = coeff(b_poly, 3);
    let mut r = BigRational::zero();
    for k in 0..3 {
        r += coeff(b_poly, k).abs() * h.pow(3 - k as i32);
    }
    // w^2 = d + 4 a e2 u^2 with u^2 in [0, h^2]
    let w2_ends = [q(d), q(d) + a4e2 * h * h];
    let w2_min = w2_ends.iter().min().unwrap().clone();
    let w2_max = w2_ends.iter().max().unwrap().clone();
    if !w2_min.is_positive() {
        return None;
    }
    let (wlo, _) = sqrt_bounds(&w2_min);
    let (_, whi) = sqrt_bounds(&w2_max);
    let (wlo, whi) = if wsign > 0 { (wlo, whi) } else { (-whi, -wlo) };
    let (blo, bhi) = (&b3 - &r, &b3 + &r);
    let prods = [&wlo * &blo, &wlo * &bhi, &whi * &blo, &whi * &bhi];
    Some(alow + prods.iter().min().unwrap().clone())
}

const I_SEARCH_CAP: u64 = 1_000_000;

/// Orbit bound with the constants used to certify it.
pub fn compute_i_bound(ctx: &SurfaceContext, p_max: &BigInt) -> Result<BoundCertificate, WeilError> {
    let pol = &ctx.polys;
    let (a, b) = (pol.f2.a.abs(), pol.f2.b.abs());
    let d = ctx.field.disc_f;
    let dq = BigInt::from(d);
    // |a3| <= c0 |a4|
    let c0 = ceil_plus_sqrt(&q(b.clone()), &(&dq + BigInt::from(4) * &a), &q(BigInt::from(2) * &a));
    // |a| c0 + (|b| + sqrt d)/2 <= bracket
    let bracket = ceil_plus_sqrt(&(q(b.clone()) + q(BigInt::from(2) * &a * &c0)), &dq, &q(2));
    let g_min = embedding_abs_lower(&ctx.gamma, 0).min(embedding_abs_lower(&ctx.gamma, 1));
    let c1 = g_min / q(bracket.clone());
    let e_max = embedding_interval(&ctx.eps, 0).0.max(embedding_interval(&ctx.eps, 1).0.abs());
    let c2 = BigRational::new((e_max * q(2)).floor().to_integer(), 2.into());
    if c2 <= BigRational::one() {
        return Err(WeilError::NoBound(ctx.field.id.clone(), 0));
    }
    let mut branches = Vec::new();
    let mut leading = Vec::new();
    let sd = (d as f64).sqrt();
    for e1 in [1i8, -1] {
        for e2 in [1i8, -1] {
            let (ap, bp) = p4_branch(ctx, e1, e2);
            for wsign in [1i8, -1] {
                let lead = crate::quadratic::ratio_to_f64(&coeff(&ap, 4))
                    + wsign as f64 * sd * crate::quadratic::ratio_to_f64(&coeff(&bp, 3));
                let br = Branch { tau: wsign, e1, e2 };
                leading.push((br, lead));
                branches.push((ap.clone(), bp.clone(), wsign, q(4) * q(pol.f2.a.clone()) * q(e2), br));
            }
        }
    }
    let mut x = c1.clone();
    for i in 0..I_SEARCH_CAP {
        if x >= BigRational::one() {
            let h = x.recip();
            let mut lo: Option<BigRational> = None;
            let mut ok = true;
            for (ap, bp, ws, a4e2, _) in &branches {
                match p4_lower(ap, bp, *ws, &h, d, a4e2) {
                    Some(v) => lo = Some(lo.map_or(v.clone(), |l: BigRational| l.min(v))),
                    None => ok = false,
                }
            }
            if let (true, Some(l)) = (ok, lo) {
                if l.is_positive() && &l * x.pow(4) > q(p_max.clone()) {
                    return Ok(BoundCertificate {
                        c0,
                        bracket,
                        c1,
                        c2,
                        p4_leading: l,
                        p4_threshold: x,
                        branch_leading: leading,
                        i_max: i,
                    });
                }
            }
        }
        x *= &c2;
        if i > 64 && x.numer().bits() > 100_000 {
            break;
        }
    }
    if let Some((b, _)) = leading.iter().find(|(_, l)| *l <= 0.0) {
        return Err(WeilError::DegenerateP4(ctx.field.id.clone(), *b));
    }
    Err(WeilError::NoBound(ctx.field.id.clone(), I_SEARCH_CAP))
}

// ---------------------------------------------------------------------------
// Verification and oracle

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    UnknownField,
    FieldId,
    P0Nonzero,
    PMismatch,
    PNotPrime,
    NotGenerating,
    DiscSpan,
    ClassNumber,
    CharPoly,
    Order,
    Split,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RejectReason::UnknownField => "unknown field",
            RejectReason::FieldId => "field id mismatch",
            RejectReason::P0Nonzero => "p0 != 0",
            RejectReason::PMismatch => "p_hat != p",
            RejectReason::PNotPrime => "p not prime",
            RejectReason::NotGenerating => "pi does not generate K",
            RejectReason::DiscSpan => "disc(1, pi, conj pi, pi^2) != disc_k",
            RejectReason::ClassNumber => "class number != 1",
            RejectReason::CharPoly => "characteristic polynomial mismatch",
            RejectReason::Order => "group order mismatch",
            RejectReason::Split => "cofactor split mismatch",
        };
        f.write_str(s)
    }
}

/// Independent re-derivation of the certificate from the coordinates.
pub fn verify_weil_record(
    field: &CmField,
    polys: &SearchPolynomials,
    rec: &SuperIsolatedWeilRecord,
    policy: &PrimalityPolicy,
) -> Result<(), RejectReason> {
    if rec.field_id != field.id {
        return Err(RejectReason::FieldId);
    }
    if field.class_number != 1 {
        return Err(RejectReason::ClassNumber);
    }
    if !polys.p0.eval(&rec.coords).is_zero() {
        return Err(RejectReason::P0Nonzero);
    }
    if polys.p_hat.eval(&rec.coords) != q(rec.p.clone()) {
        return Err(RejectReason::PMismatch);
    }
    if !is_prime(&rec.p, policy) {
        return Err(RejectReason::PNotPrime);
    }
    let pi = field.from_coords(&rec.coords);
    let cp = field.char_poly(&pi).map_err(|_| RejectReason::NotGenerating)?;
    if field.disc_span_trace(&pi) != field.disc_k {
        return Err(RejectReason::DiscSpan);
    }
    if cp != rec.char_poly {
        return Err(RejectReason::CharPoly);
    }
    let order: BigInt = cp.iter().sum();
    if order != rec.order {
        return Err(RejectReason::Order);
    }
    if let Some(s) = &rec.split {
        if &s.cofactor * &s.prime_part != order || !is_prime(&s.prime_part, policy) {
            return Err(RejectReason::Split);
        }
    }
    Ok(())
}

/// Exhaustive scan of `|a_i| <= coeff_bound`. Pairs `(a3, a4)` with
/// `|f2| != 1` are skipped, since `disc(1, pi, conj pi, pi^2) = disc_k f1^4 f2^2`.
pub fn brute_force_weil_oracle(
    field: &CmField,
    polys: &SearchPolynomials,
    coeff_bound: i64,
    policy: &PrimalityPolicy,
) -> Vec<SuperIsolatedWeilRecord> {
    assert!(coeff_bound <= 200, "desk-scale oracle");
    let to_i = |r: &BigRational| (r * q(2)).to_integer().to_i128().unwrap();
    let p0_2: [[i128; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| to_i(polys.p0.coeff(i, j))));
    let ph_2: [[i128; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| to_i(polys.p_hat.coeff(i, j))));
    let f2 = [&polys.f2.a, &polys.f2.b, &polys.f2.c].map(|c| c.to_i128().unwrap());
    let form = |m: &[[i128; 4]; 4], x: &[i128; 4]| -> i128 {
        let mut s = 0;
        for i in 0..4 {
            for j in i..4 {
                s += m[i][j] * x[i] * x[j];
            }
        }
        s
    };
    let bnd = coeff_bound as i128;
    let mut pairs = Vec::new();
    for a4 in -bnd..=bnd {
        for a3 in -bnd..=bnd {
            let v = f2[0] * a3 * a3 + f2[1] * a3 * a4 + f2[2] * a4 * a4;
            if v.abs() == 1 {
                pairs.push((a3, a4));
            }
        }
    }
    let mut out: Vec<SuperIsolatedWeilRecord> = pairs
        .par_iter()
        .flat_map_iter(|&(a3, a4)| {
            let mut recs = Vec::new();
            for a2 in -bnd..=bnd {
                for a1 in -bnd..=bnd {
                    let x = [a1, a2, a3, a4];
                    if form(&p0_2, &x) != 0 {
                        continue;
                    }
                    let p2 = form(&ph_2, &x);
                    if p2 % 2 != 0 {
                        continue;
                    }
                    let p = BigInt::from(p2 / 2);
                    if !is_prime(&p, policy) {
                        continue;
                    }
                    let coords = x.map(BigInt::from);
                    let pi = field.from_coords(&coords);
                    if pi.b.is_zero() || field.disc_span_trace(&pi) != field.disc_k {
                        continue;
                    }
                    let char_poly = field.char_poly(&pi).unwrap();
                    let order: BigInt = char_poly.iter().sum();
                    recs.push(SuperIsolatedWeilRecord {
                        field_id: field.id.clone(),
                        coords,
                        p: p.clone(),
                        char_poly,
                        order,
                        split: None,
                        orbit_index: 0,
                        branch: Branch { tau: 1, e1: 1, e2: 1 },
                    });
                }
            }
            recs
        })
        .collect();
    out.sort_by(|a, b| a.p.cmp(&b.p).then_with(|| a.coords.cmp(&b.coords)));
    out
}

// ---------------------------------------------------------------------------
// Registry scan

#[derive(Debug, Clone)]
pub struct FieldScan {
    pub field_id: String,
    pub certificate: BoundCertificate,
    pub records: Vec<SuperIsolatedWeilRecord>,
}

#[derive(Debug, Clone)]
pub struct ScanSummary {
    pub fields: Vec<FieldScan>,
    pub total_classes: usize,
    /// Records with a split `c <= cofactor_max` and `r_min <= r <= r_max`.
    pub near_prime: Vec<SuperIsolatedWeilRecord>,
}

/// Search every field with its derived bound.
pub fn scan_all(
    registry: &Registry,
    p_max: &BigInt,
    cofactor_max: u64,
    r_min: &BigInt,
    r_max: &BigInt,
    policy: &PrimalityPolicy,
) -> Result<ScanSummary, WeilError> {
    let scans: Vec<Result<FieldScan, WeilError>> = registry
        .fields
        .par_iter()
        .map(|f| {
            let ctx = SurfaceContext::new(f)?;
            let mut params = WeilSearchParams::new(p_max.clone());
            params.cofactor_max = cofactor_max;
            let (records, cert) = search(&ctx, &params, policy)?;
            Ok(FieldScan { field_id: f.id.clone(), certificate: cert.unwrap(), records })
        })
        .collect();
    let fields: Vec<FieldScan> = scans.into_iter().collect::<Result<_, _>>()?;
    let total_classes = fields.iter().map(|s| s.records.len()).sum();
    let near_prime = fields
        .iter()
        .flat_map(|s| s.records.iter())
        .filter(|r| r.split.as_ref().is_some_and(|s| &s.prime_part >= r_min && &s.prime_part <= r_max))
        .cloned()
        .collect();
    Ok(ScanSummary { fields, total_classes, near_prime })
}

/// Records per characteristic polynomial for a list, keyed canonically.
pub fn by_char_poly(recs: &[SuperIsolatedWeilRecord]) -> BTreeMap<[BigInt; 5], &SuperIsolatedWeilRecord> {
    recs.iter().map(|r| (r.char_poly.clone(), r)).collect()
}

/// `pi` from a record's coordinates.
pub fn record_element(field: &CmField, rec: &SuperIsolatedWeilRecord) -> QuarticElement {
    field.from_coords(&rec.coords)
}
