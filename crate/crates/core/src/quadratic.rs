//! Imaginary quadratic class numbers and exact arithmetic in real quadratic
//! fields: elements, fundamental units and principal ideal generators.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuadError {
    #[error("invalid discriminant {0}")]
    InvalidDiscriminant(i64),
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("field mismatch: Q(sqrt {0}) vs Q(sqrt {1})")]
    FieldMismatch(i64, i64),
    #[error("invalid ideal: {0}")]
    InvalidIdeal(String),
    #[error("no generator found for ideal ({0}, ({1} + sqrt {2})/2)")]
    NoGenerator(BigInt, BigInt, i64),
    #[error("division by zero")]
    DivisionByZero,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryQF {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl BinaryQF {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Self {
        BinaryQF { a: a.into(), b: b.into(), c: c.into() }
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }
}

impl fmt::Display for BinaryQF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

fn valid_disc(d: i64) -> bool {
    d != 0 && d.rem_euclid(4) <= 1
}

fn squarefree(n: i64) -> bool {
    let n = n.unsigned_abs();
    let mut p = 2u64;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// Whether `d` is the discriminant of a quadratic field.
pub fn is_fundamental(d: i64) -> bool {
    if d == 1 || !valid_disc(d) {
        return false;
    }
    if d.rem_euclid(4) == 1 {
        return squarefree(d);
    }
    let m = d / 4;
    matches!(m.rem_euclid(4), 2 | 3) && squarefree(m)
}

/// Write `d = f^2 * d_k` with `d_k` fundamental; returns `(d_k, f)`.
pub fn fundamental_part(d: i64) -> Result<(i64, i64), QuadError> {
    if !valid_disc(d) || d == 1 {
        return Err(QuadError::InvalidDiscriminant(d));
    }
    let mut f = 1i64;
    let mut rest = d;
    let mut p = 2i64;
    while p * p <= rest.abs() {
        while rest % (p * p) == 0 && valid_disc(rest / (p * p)) && rest / (p * p) != 1 {
            rest /= p * p;
            f *= p;
        }
        p += 1;
    }
    if is_fundamental(rest) {
        Ok((rest, f))
    } else {
        Err(QuadError::InvalidDiscriminant(d))
    }
}

/// Number of primitive reduced forms of discriminant `d < 0`.
pub fn class_number_imaginary(d: i64) -> Result<u64, QuadError> {
    if d >= 0 || !valid_disc(d) {
        return Err(QuadError::InvalidDiscriminant(d));
    }
    let n = -d;
    let mut h = 0u64;
    let mut a = 1i64;
    while 3 * a * a <= n {
        let mut b = -a + 1;
        while b <= a {
            let num = b * b - d;
            if num % (4 * a) == 0 {
                let c = num / (4 * a);
                if c >= a && !(b < 0 && (a == c)) && a.gcd(&b).gcd(&c) == 1 {
                    h += 1;
                }
            }
            b += 1;
        }
        a += 1;
    }
    Ok(h)
}

/// Kronecker class number: the sum of `h(f'^2 d_k)` over `f' | f`.
pub fn kronecker_class_number(d: i64) -> Result<u64, QuadError> {
    if d >= 0 {
        return Err(QuadError::InvalidDiscriminant(d));
    }
    let (dk, f) = fundamental_part(d)?;
    let mut total = 0;
    for g in 1..=f {
        if f % g == 0 {
            total += class_number_imaginary(g * g * dk)?;
        }
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Real quadratic fields

fn q(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Element `u + v*sqrt(disc)` of `Q(sqrt disc)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RealQuadElement {
    pub disc: i64,
    pub u: BigRational,
    pub v: BigRational,
}

impl RealQuadElement {
    pub fn new(disc: i64, u: BigRational, v: BigRational) -> Self {
        RealQuadElement { disc, u, v }
    }

    pub fn from_ints(disc: i64, u: i64, v: i64) -> Self {
        RealQuadElement::new(disc, q(u), q(v))
    }

    pub fn rational(disc: i64, u: BigRational) -> Self {
        RealQuadElement::new(disc, u, BigRational::zero())
    }

    pub fn zero(disc: i64) -> Self {
        RealQuadElement::rational(disc, BigRational::zero())
    }

    pub fn one(disc: i64) -> Self {
        RealQuadElement::rational(disc, BigRational::one())
    }

    /// `(1 + sqrt d)/2` or `sqrt(d)/2`, the standard generator of `O_F`.
    pub fn omega(disc: i64) -> Self {
        let half = BigRational::new(1.into(), 2.into());
        if disc.rem_euclid(4) == 1 {
            RealQuadElement::new(disc, half.clone(), half)
        } else {
            RealQuadElement::new(disc, BigRational::zero(), half)
        }
    }

    fn check(&self, other: &Self) -> Result<(), QuadError> {
        if self.disc == other.disc {
            Ok(())
        } else {
            Err(QuadError::FieldMismatch(self.disc, other.disc))
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, QuadError> {
        self.check(o)?;
        Ok(RealQuadElement::new(self.disc, &self.u + &o.u, &self.v + &o.v))
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self, QuadError> {
        self.check(o)?;
        Ok(RealQuadElement::new(self.disc, &self.u - &o.u, &self.v - &o.v))
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self, QuadError> {
        self.check(o)?;
        let d = q(self.disc);
        Ok(RealQuadElement::new(
            self.disc,
            &self.u * &o.u + &self.v * &o.v * d,
            &self.u * &o.v + &self.v * &o.u,
        ))
    }

    pub fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("field mismatch")
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.try_sub(o).expect("field mismatch")
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).expect("field mismatch")
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        RealQuadElement::new(self.disc, &self.u * k, &self.v * k)
    }

    pub fn neg(&self) -> Self {
        RealQuadElement::new(self.disc, -&self.u, -&self.v)
    }

    pub fn conjugate(&self) -> Self {
        RealQuadElement::new(self.disc, self.u.clone(), -&self.v)
    }

    pub fn norm(&self) -> BigRational {
        &self.u * &self.u - &self.v * &self.v * q(self.disc)
    }

    pub fn trace(&self) -> BigRational {
        &self.u * q(2)
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.v.is_zero()
    }

    pub fn inverse(&self) -> Result<Self, QuadError> {
        let n = self.norm();
        if n.is_zero() {
            return Err(QuadError::DivisionByZero);
        }
        Ok(self.conjugate().scale(&n.recip()))
    }

    pub fn pow(&self, e: i64) -> Result<Self, QuadError> {
        let mut base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = RealQuadElement::one(self.disc);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Membership in `O_F`.
    pub fn is_integral(&self) -> bool {
        let two_u = &self.u * q(2);
        let two_v = &self.v * q(2);
        if !two_u.is_integer() || !two_v.is_integer() {
            return false;
        }
        let (su, sv) = (two_u.to_integer(), two_v.to_integer());
        if self.disc.rem_euclid(4) == 1 {
            (su - sv).is_even()
        } else {
            su.is_even()
        }
    }

    /// Exact sign of the image under embedding `k` (0: sqrt d > 0, 1: sqrt d < 0).
    pub fn sign_at(&self, k: usize) -> Ordering {
        let v = if k == 0 { self.v.clone() } else { -&self.v };
        let su = self.u.cmp(&BigRational::zero());
        let sv = v.cmp(&BigRational::zero());
        if sv == Ordering::Equal {
            return su;
        }
        if su == Ordering::Equal || su == sv {
            return sv;
        }
        let u2 = &self.u * &self.u;
        let v2d = &v * &v * q(self.disc);
        match u2.cmp(&v2d) {
            Ordering::Greater => su,
            Ordering::Less => sv,
            Ordering::Equal => Ordering::Equal,
        }
    }

    /// Element whose first embedding equals the `k`-th embedding of `self`.
    fn at(&self, k: usize) -> Self {
        if k == 0 {
            self.clone()
        } else {
            self.conjugate()
        }
    }

    /// Compare `|phi_k(self)|` with `|phi_l(other)|` exactly.
    pub fn abs_cmp(&self, k: usize, other: &Self, l: usize) -> Ordering {
        let x = self.at(k);
        let y = other.at(l);
        x.mul(&x).sub(&y.mul(&y)).sign_at(0)
    }

    /// Compare `phi_k(self)` with the rational `r`.
    pub fn cmp_rational(&self, k: usize, r: &BigRational) -> Ordering {
        let e = RealQuadElement::new(self.disc, &self.u - r, self.v.clone());
        e.sign_at(k)
    }

    pub fn embedding_f64(&self, k: usize) -> f64 {
        let s = (self.disc as f64).sqrt();
        let u = ratio_to_f64(&self.u);
        let v = ratio_to_f64(&self.v);
        if k == 0 {
            u + v * s
        } else {
            u - v * s
        }
    }

    /// `ln |phi_k(self)|`, robust for very large coordinates.
    pub fn ln_abs_at(&self, k: usize) -> f64 {
        let x = self.at(k);
        let lu = ln_abs_ratio(&x.u);
        let lv = ln_abs_ratio(&x.v) + 0.5 * (self.disc as f64).ln();
        if x.v.is_zero() {
            return lu;
        }
        if x.u.is_zero() {
            return lv;
        }
        let m = lu.max(lv);
        let sum = m + ((lu - m).exp() + (lv - m).exp()).ln();
        if x.u.is_negative() == x.v.is_negative() {
            sum
        } else {
            // |u + v sqrt d| = |N| / |u - v sqrt d|, the latter free of cancellation
            ln_abs_ratio(&x.norm()) - sum
        }
    }
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let l = ln_abs_ratio(r);
        let s = if r.is_negative() { -1.0 } else { 1.0 };
        s * l.exp()
    })
}

fn ln_abs_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().unwrap().abs().ln();
    }
    let shift = bits - 60;
    let top = (n.abs() >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub(crate) fn ln_abs_ratio(r: &BigRational) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    ln_abs_bigint(r.numer()) - ln_abs_bigint(r.denom())
}

impl fmt::Display for RealQuadElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt({})", self.u, self.v, self.disc)
    }
}

/// `a Z + ((b + sqrt disc)/2) Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealQuadIdeal {
    pub disc: i64,
    pub a: BigInt,
    pub b: BigInt,
}

impl RealQuadIdeal {
    pub fn new(disc: i64, a: BigInt, b: BigInt) -> Result<Self, QuadError> {
        if !is_fundamental(disc) || disc < 0 {
            return Err(QuadError::NotFundamental(disc));
        }
        if !a.is_positive() {
            return Err(QuadError::InvalidIdeal(format!("a = {a} must be positive")));
        }
        let four_a = BigInt::from(4) * &a;
        if !(&b * &b - BigInt::from(disc)).mod_floor(&four_a).is_zero() {
            return Err(QuadError::InvalidIdeal(format!("{b}^2 != {disc} mod 4*{a}")));
        }
        Ok(RealQuadIdeal { disc, a, b })
    }

    pub fn second_generator(&self) -> RealQuadElement {
        let half = BigRational::new(1.into(), 2.into());
        RealQuadElement::new(self.disc, q(self.b.clone()) * &half, half)
    }

    /// Coordinates `(x, y)` with `e = x*a + y*(b + sqrt d)/2`.
    pub fn coordinates(&self, e: &RealQuadElement) -> (BigRational, BigRational) {
        let y = &e.v * q(2);
        let x = (&e.u - &y * q(self.b.clone()) / q(2)) / q(self.a.clone());
        (x, y)
    }

    pub fn contains(&self, e: &RealQuadElement) -> bool {
        let (x, y) = self.coordinates(e);
        x.is_integer() && y.is_integer()
    }

    pub fn element(&self, x: &BigInt, y: &BigInt) -> RealQuadElement {
        let w = self.second_generator();
        RealQuadElement::rational(self.disc, q(x * &self.a)).add(&w.scale(&q(y.clone())))
    }
}

/// Continued fraction of `(p + sqrt d)/q` with `q | d - p^2`, `d` non-square.
struct QuadCf {
    p: BigInt,
    q: BigInt,
    d: BigInt,
    root: BigInt,
}

impl QuadCf {
    fn new(p: BigInt, q: BigInt, d: BigInt) -> Self {
        let root = d.sqrt();
        debug_assert!((&d - &p * &p).mod_floor(&q).is_zero());
        QuadCf { p, q, d, root }
    }
}

impl Iterator for QuadCf {
    type Item = BigInt;

    fn next(&mut self) -> Option<BigInt> {
        // (p + sqrt d)/q lies strictly between consecutive multiples of 1/q
        let n0 = &self.p + &self.root;
        let a = if self.q.is_positive() {
            n0.div_floor(&self.q)
        } else {
            (n0 + BigInt::one()).div_floor(&self.q)
        };
        let p1 = &a * &self.q - &self.p;
        let q1 = (&self.d - &p1 * &p1) / &self.q;
        self.p = p1;
        self.q = q1;
        Some(a)
    }
}

/// Convergents `(h, k)` of a continued fraction.
fn convergents(cf: impl Iterator<Item = BigInt>) -> impl Iterator<Item = (BigInt, BigInt)> {
    let mut h = (BigInt::zero(), BigInt::one());
    let mut k = (BigInt::one(), BigInt::zero());
    cf.map(move |a| {
        let hn = &a * &h.1 + &h.0;
        let kn = &a * &k.1 + &k.0;
        h = (std::mem::replace(&mut h.1, hn.clone()), hn.clone());
        k = (std::mem::replace(&mut k.1, kn.clone()), kn.clone());
        (hn, kn)
    })
}

/// Fundamental unit `> 1` under the embedding with `sqrt d > 0`.
pub fn fundamental_unit(disc: i64) -> Result<RealQuadElement, QuadError> {
    if disc <= 0 || !is_fundamental(disc) {
        return Err(QuadError::NotFundamental(disc));
    }
    let half = BigRational::new(1.into(), 2.into());
    let (cf, one_mod4) = if disc % 4 == 1 {
        (QuadCf::new(1.into(), 2.into(), disc.into()), true)
    } else {
        (QuadCf::new(0.into(), 1.into(), (disc / 4).into()), false)
    };
    for (h, k) in convergents(cf) {
        // h - k * conj(theta)
        let e = if one_mod4 {
            RealQuadElement::new(disc, q(h) - q(k.clone()) * &half, q(k) * &half)
        } else {
            RealQuadElement::new(disc, q(h), q(k) * &half)
        };
        if e.norm().abs().is_one() {
            return Ok(e);
        }
    }
    unreachable!("continued fraction is infinite")
}

fn max_embedding_cmp(x: &RealQuadElement, y: &RealQuadElement) -> Ordering {
    let mx = if x.abs_cmp(0, x, 1) == Ordering::Less { 1 } else { 0 };
    let my = if y.abs_cmp(0, y, 1) == Ordering::Less { 1 } else { 0 };
    x.abs_cmp(mx, y, my)
}

/// Among `x * eps^k` pick the representative of minimal maximal embedding,
/// positive under the first embedding; ties go to the larger first embedding.
pub fn balance_by_units(x: &RealQuadElement, eps: &RealQuadElement) -> RealQuadElement {
    let l0 = x.ln_abs_at(0);
    let l1 = x.ln_abs_at(1);
    let le = eps.ln_abs_at(0);
    let k0 = (-(l0 - l1) / (2.0 * le)).round() as i64;
    let mut best: Option<RealQuadElement> = None;
    for k in (k0 - 2)..=(k0 + 2) {
        let mut c = x.mul(&eps.pow(k).unwrap());
        if c.sign_at(0) == Ordering::Less {
            c = c.neg();
        }
        best = Some(match best {
            None => c,
            Some(b) => match max_embedding_cmp(&c, &b) {
                Ordering::Less => c,
                Ordering::Greater => b,
                Ordering::Equal => {
                    if c.abs_cmp(0, &b, 0) == Ordering::Greater {
                        c
                    } else {
                        b
                    }
                }
            },
        });
    }
    best.unwrap()
}

/// Generator of a principal ideal of `O_F` (class number one assumed).
pub fn ideal_generator(ideal: &RealQuadIdeal) -> Result<RealQuadElement, QuadError> {
    let d = ideal.disc;
    if ideal.a.is_one() {
        return Ok(RealQuadElement::one(d));
    }
    let eps = fundamental_unit(d)?;
    let a = &ideal.a;
    let b = &ideal.b;
    let c = (b * b - BigInt::from(d)) / (BigInt::from(4) * a);
    // N(x a + y (b + sqrt d)/2) = a * (a x^2 + b x y + c y^2)
    let form = BinaryQF::new(a.clone(), b.clone(), c);
    let is_gen = |x: &BigInt, y: &BigInt| form.eval(x, y).abs().is_one();
    let mut found: Option<(BigInt, BigInt)> = None;
    'small: for y in 0i64..=64 {
        for x in -64i64..=64 {
            let (x, y) = (BigInt::from(x), BigInt::from(y));
            if is_gen(&x, &y) {
                found = Some((x, y));
                break 'small;
            }
        }
    }
    if found.is_none() {
        // proper representations of +-1 are convergents of a root of a t^2 + b t + c
        let two_a = BigInt::from(2) * a;
        for (p, qq) in [(-b.clone(), two_a.clone()), (b.clone(), -two_a)] {
            for (h, k) in convergents(QuadCf::new(p, qq, d.into())).take(4000) {
                if is_gen(&h, &k) {
                    found = Some((h, k));
                    break;
                }
            }
            if found.is_some() {
                break;
            }
        }
    }
    let (x, y) = found.ok_or_else(|| QuadError::NoGenerator(a.clone(), b.clone(), d))?;
    let g = ideal.element(&x, &y);
    Ok(balance_by_units(&g, &eps))
}
