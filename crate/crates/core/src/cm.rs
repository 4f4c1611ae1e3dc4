//! Quartic CM fields of class number one in the form `K = F(eta)`,
//! `eta^2 = beta` with `F` real quadratic, and the exact search forms
//! `f1, f2, p_hat, p0` attached to an integral basis.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::ec::parse_fields;
use crate::quadratic::{is_fundamental, BinaryQF, RealQuadElement};

pub const REGISTRY_ENV: &str = "SUPERISO_REGISTRY";
const BUILTIN_REGISTRY: &str = include_str!("../data/cm_fields.txt");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CmError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("field {id}: {check} check failed")]
    Validation { id: String, check: String },
    #[error("field {id}: invariant violated: {what}")]
    Invariant { id: String, what: String },
    #[error("element is not integral")]
    NotIntegral,
    #[error("element lies in the real subfield and does not generate K")]
    NotGenerating,
    #[error("disc_span mismatch: trace matrix {trace} vs product formula {product}")]
    DiscMismatch { trace: BigInt, product: BigInt },
    #[error("unknown field {0}")]
    UnknownField(String),
    #[error("io: {0}")]
    Io(String),
}

fn q(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `a + b*eta` with `a, b` in `F`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuarticElement {
    pub a: RealQuadElement,
    pub b: RealQuadElement,
}

impl QuarticElement {
    pub fn pair_coords(&self) -> [BigRational; 4] {
        [self.a.u.clone(), self.a.v.clone(), self.b.u.clone(), self.b.v.clone()]
    }
}

impl fmt::Display for QuarticElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})*eta", self.a, self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Cyclic,
    Biquadratic,
    NonNormal,
}

impl FieldKind {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "cyclic" => Some(FieldKind::Cyclic),
            "biquadratic" => Some(FieldKind::Biquadratic),
            "non-normal" => Some(FieldKind::NonNormal),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            FieldKind::Cyclic => "cyclic",
            FieldKind::Biquadratic => "biquadratic",
            FieldKind::NonNormal => "non-normal",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CmField {
    pub id: String,
    pub alias: Option<String>,
    pub kind: FieldKind,
    pub eta_poly: [BigInt; 5],
    pub disc_k: BigInt,
    pub disc_f: i64,
    pub beta: RealQuadElement,
    pub basis: [QuarticElement; 4],
    pub class_number: u32,
    to_basis: [[BigRational; 4]; 4],
}

fn det4(m: &[[BigRational; 4]; 4]) -> BigRational {
    let mut a = m.clone();
    let mut det = BigRational::one();
    for col in 0..4 {
        let Some(piv) = (col..4).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= &a[col][col];
        for r in col + 1..4 {
            let f = &a[r][col] / &a[col][col];
            for c in col..4 {
                let t = &f * &a[col][c];
                a[r][c] -= t;
            }
        }
    }
    det
}

fn inverse4(m: &[[BigRational; 4]; 4]) -> Option<[[BigRational; 4]; 4]> {
    let mut a = m.clone();
    let mut inv: [[BigRational; 4]; 4] =
        std::array::from_fn(|i| std::array::from_fn(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
    for col in 0..4 {
        let piv = (col..4).find(|&r| !a[r][col].is_zero())?;
        a.swap(piv, col);
        inv.swap(piv, col);
        let p = a[col][col].clone();
        for c in 0..4 {
            a[col][c] /= &p;
            inv[col][c] /= &p;
        }
        for r in 0..4 {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..4 {
                    let t = &f * &a[col][c];
                    a[r][c] -= t;
                    let t = &f * &inv[col][c];
                    inv[r][c] -= t;
                }
            }
        }
    }
    Some(inv)
}

impl CmField {
    pub fn name(&self) -> &str {
        self.alias.as_deref().unwrap_or(&self.id)
    }

    pub fn f_elem(&self, u: BigRational, v: BigRational) -> RealQuadElement {
        RealQuadElement::new(self.disc_f, u, v)
    }

    pub fn one(&self) -> QuarticElement {
        QuarticElement { a: RealQuadElement::one(self.disc_f), b: RealQuadElement::zero(self.disc_f) }
    }

    pub fn mul(&self, x: &QuarticElement, y: &QuarticElement) -> QuarticElement {
        QuarticElement {
            a: x.a.mul(&y.a).add(&self.beta.mul(&x.b.mul(&y.b))),
            b: x.a.mul(&y.b).add(&x.b.mul(&y.a)),
        }
    }

    pub fn add(&self, x: &QuarticElement, y: &QuarticElement) -> QuarticElement {
        QuarticElement { a: x.a.add(&y.a), b: x.b.add(&y.b) }
    }

    pub fn conjugate(&self, x: &QuarticElement) -> QuarticElement {
        QuarticElement { a: x.a.clone(), b: x.b.neg() }
    }

    /// `Tr_{K/Q}`.
    pub fn trace(&self, x: &QuarticElement) -> BigRational {
        &x.a.u * q(4)
    }

    /// `x * conj(x)`, an element of `F`.
    pub fn rel_norm(&self, x: &QuarticElement) -> RealQuadElement {
        x.a.mul(&x.a).sub(&self.beta.mul(&x.b.mul(&x.b)))
    }

    pub fn from_coords<T: Clone + Into<BigInt>>(&self, c: &[T; 4]) -> QuarticElement {
        let cs: [BigRational; 4] = std::array::from_fn(|i| q(c[i].clone()));
        self.from_rational_coords(&cs)
    }

    pub fn from_rational_coords(&self, c: &[BigRational; 4]) -> QuarticElement {
        let mut acc = QuarticElement { a: RealQuadElement::zero(self.disc_f), b: RealQuadElement::zero(self.disc_f) };
        for (ci, al) in c.iter().zip(self.basis.iter()) {
            acc.a = acc.a.add(&al.a.scale(ci));
            acc.b = acc.b.add(&al.b.scale(ci));
        }
        acc
    }

    /// Coordinates over the integral basis.
    pub fn coords(&self, x: &QuarticElement) -> [BigRational; 4] {
        let p = x.pair_coords();
        std::array::from_fn(|i| (0..4).fold(BigRational::zero(), |acc, j| acc + &self.to_basis[i][j] * &p[j]))
    }

    pub fn integral_coords(&self, x: &QuarticElement) -> Option<[BigInt; 4]> {
        let c = self.coords(x);
        if c.iter().all(|v| v.is_integer()) {
            Some(std::array::from_fn(|i| c[i].to_integer()))
        } else {
            None
        }
    }

    /// Complex conjugation in basis coordinates.
    pub fn conjugate_coords(&self, c: &[BigInt; 4]) -> [BigInt; 4] {
        self.integral_coords(&self.conjugate(&self.from_coords(c))).expect("O_K is stable under conjugation")
    }

    /// Characteristic polynomial over `Q`, leading coefficient first.
    pub fn char_poly_rational(&self, x: &QuarticElement) -> [BigRational; 5] {
        let t = x.a.scale(&q(2));
        let m = self.rel_norm(x);
        [
            BigRational::one(),
            -t.trace(),
            t.norm() + m.trace(),
            -t.mul(&m.conjugate()).trace(),
            m.norm(),
        ]
    }

    /// Integer characteristic polynomial of an integral element generating `K`.
    pub fn char_poly(&self, x: &QuarticElement) -> Result<[BigInt; 5], CmError> {
        if self.integral_coords(x).is_none() {
            return Err(CmError::NotIntegral);
        }
        if x.b.is_zero() {
            return Err(CmError::NotGenerating);
        }
        let f = self.char_poly_rational(x);
        Ok(std::array::from_fn(|i| f[i].to_integer()))
    }

    /// `#A(F_p) = f(1) = N_{K/Q}(pi - 1)`.
    pub fn group_order(&self, x: &QuarticElement) -> Result<BigInt, CmError> {
        Ok(self.char_poly(x)?.iter().sum())
    }

    /// Determinant of the trace form on four elements.
    pub fn discriminant_of(&self, els: &[QuarticElement; 4]) -> BigRational {
        let m: [[BigRational; 4]; 4] =
            std::array::from_fn(|i| std::array::from_fn(|j| self.trace(&self.mul(&els[i], &els[j]))));
        det4(&m)
    }

    /// `disc(1, pi, conj pi, pi^2)` from the trace matrix.
    pub fn disc_span_trace(&self, x: &QuarticElement) -> BigInt {
        let els = [self.one(), x.clone(), self.conjugate(x), self.mul(x, x)];
        self.discriminant_of(&els).to_integer()
    }

    /// `disc(1, pi, conj pi, pi^2)` computed from the trace matrix and from
    /// `disc_k * f1^4 * f2^2`; the two must agree.
    pub fn disc_span(&self, polys: &SearchPolynomials, x: &QuarticElement) -> Result<BigInt, CmError> {
        let c = self.integral_coords(x).ok_or(CmError::NotIntegral)?;
        let trace = self.disc_span_trace(x);
        let f1 = polys.eval_f1(&c);
        let f2 = polys.eval_f2(&c);
        let product = &self.disc_k * f1.pow(4) * &f2 * &f2;
        if trace != product {
            return Err(CmError::DiscMismatch { trace, product });
        }
        Ok(trace)
    }

    fn validate(&self) -> Result<(), CmError> {
        let fail = |check: &str| CmError::Validation { id: self.id.clone(), check: check.to_string() };
        let d = self.disc_f;
        if d <= 0 || !is_fundamental(d) {
            return Err(fail("real subfield discriminant"));
        }
        if self.class_number != 1 {
            return Err(fail("class number"));
        }
        if !(self.beta.trace().is_negative() && self.beta.norm().is_positive()) {
            return Err(fail("totally negative beta"));
        }
        if !self.beta.is_integral() {
            return Err(fail("integral beta"));
        }
        let tr = self.beta.trace();
        let expect = [BigRational::one(), BigRational::zero(), -tr, BigRational::zero(), self.beta.norm()];
        if self.eta_poly.iter().zip(expect.iter()).any(|(a, b)| &q(a.clone()) != b) {
            return Err(fail("eta polynomial"));
        }
        if self.basis[0] != self.one() {
            return Err(fail("alpha1 = 1"));
        }
        let a2 = &self.basis[1];
        let n = &a2.a.v * q(2);
        let m = if d % 4 == 1 { &a2.a.u - &a2.a.v } else { a2.a.u.clone() };
        if !a2.b.is_zero() || !m.is_integer() || n.abs() != BigRational::one() {
            return Err(fail("{alpha1, alpha2} basis of O_F"));
        }
        for al in &self.basis {
            if self.char_poly_rational(al).iter().any(|c| !c.is_integer()) {
                return Err(fail("integral basis elements"));
            }
        }
        if self.discriminant_of(&self.basis) != q(self.disc_k.clone()) {
            return Err(fail("discriminant"));
        }
        Ok(())
    }

    fn parse_line(line: &str, lineno: usize) -> Result<CmField, CmError> {
        let perr = |msg: String| CmError::Parse { line: lineno, msg };
        let kv = parse_fields(line);
        let get = |k: &str| kv.get(k).copied().ok_or_else(|| perr(format!("missing {k}")));
        let rat = |s: &str| s.parse::<BigRational>().map_err(|e| perr(format!("bad rational {s}: {e}")));
        let rats = |s: &str, n: usize| -> Result<Vec<BigRational>, CmError> {
            let v: Vec<BigRational> = s.split(',').map(rat).collect::<Result<_, _>>()?;
            if v.len() != n {
                return Err(perr(format!("expected {n} entries in {s}")));
            }
            Ok(v)
        };
        let int = |s: &str| s.parse::<BigInt>().map_err(|e| perr(format!("bad integer {s}: {e}")));
        let disc_f: i64 = get("disc_f")?.parse().map_err(|_| perr("disc_f".into()))?;
        let eta: Vec<BigInt> = get("eta_poly")?.split(',').map(int).collect::<Result<_, _>>()?;
        if eta.len() != 5 {
            return Err(perr("eta_poly needs 5 coefficients".into()));
        }
        let b = rats(get("beta")?, 2)?;
        let mut basis = Vec::new();
        for i in 1..=4 {
            let v = rats(get(&format!("alpha{i}"))?, 4)?;
            basis.push(QuarticElement {
                a: RealQuadElement::new(disc_f, v[0].clone(), v[1].clone()),
                b: RealQuadElement::new(disc_f, v[2].clone(), v[3].clone()),
            });
        }
        let basis: [QuarticElement; 4] = basis.try_into().unwrap();
        let m: [[BigRational; 4]; 4] = std::array::from_fn(|r| std::array::from_fn(|c| basis[c].pair_coords()[r].clone()));
        let id = get("id")?.to_string();
        let to_basis = inverse4(&m).ok_or_else(|| CmError::Validation { id: id.clone(), check: "basis independence".into() })?;
        Ok(CmField {
            id,
            alias: kv.get("alias").map(|s| s.to_string()),
            kind: FieldKind::parse(get("kind")?).ok_or_else(|| perr("unknown kind".into()))?,
            eta_poly: eta.try_into().unwrap(),
            disc_k: int(get("disc_k")?)?,
            disc_f,
            beta: RealQuadElement::new(disc_f, b[0].clone(), b[1].clone()),
            basis,
            class_number: get("class_number")?.parse().map_err(|_| perr("class_number".into()))?,
            to_basis,
        })
    }
}

/// The validated field list.
#[derive(Debug, Clone)]
pub struct Registry {
    pub fields: Vec<CmField>,
}

/// Outcome of validating every record of a registry source.
#[derive(Debug, Clone)]
pub struct RegistryReport {
    pub fields: Vec<CmField>,
    pub failures: Vec<CmError>,
}

impl Registry {
    /// Parse and validate, collecting every failure.
    pub fn check(source: &str) -> RegistryReport {
        let mut fields = Vec::new();
        let mut failures = Vec::new();
        for (i, line) in source.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match CmField::parse_line(line, i + 1).and_then(|f| f.validate().map(|_| f)) {
                Ok(f) => fields.push(f),
                Err(e) => failures.push(e),
            }
        }
        RegistryReport { fields, failures }
    }

    pub fn parse(source: &str) -> Result<Registry, CmError> {
        let mut report = Registry::check(source);
        if let Some(e) = report.failures.drain(..).next() {
            return Err(e);
        }
        Ok(Registry { fields: report.fields })
    }

    pub fn builtin_source() -> &'static str {
        BUILTIN_REGISTRY
    }

    pub fn builtin() -> Registry {
        Registry::parse(BUILTIN_REGISTRY).expect("shipped registry validates")
    }

    pub fn from_path(path: &Path) -> Result<Registry, CmError> {
        let s = std::fs::read_to_string(path).map_err(|e| CmError::Io(format!("{}: {e}", path.display())))?;
        Registry::parse(&s)
    }

    /// The registry named by `SUPERISO_REGISTRY`, else the shipped one.
    pub fn load_default() -> Result<Registry, CmError> {
        match std::env::var_os(REGISTRY_ENV) {
            Some(p) => Registry::from_path(Path::new(&p)),
            None => Ok(Registry::builtin()),
        }
    }

    pub fn get(&self, key: &str) -> Result<&CmField, CmError> {
        self.fields
            .iter()
            .find(|f| f.id == key || f.alias.as_deref() == Some(key))
            .ok_or_else(|| CmError::UnknownField(key.to_string()))
    }
}

/// Quadratic form `sum_{i<=j} c_ij x_i x_j` in four variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadForm {
    pub c: [[BigRational; 4]; 4],
}

impl QuadForm {
    fn zero() -> Self {
        QuadForm { c: std::array::from_fn(|_| std::array::from_fn(|_| BigRational::zero())) }
    }

    pub fn coeff(&self, i: usize, j: usize) -> &BigRational {
        if i <= j {
            &self.c[i][j]
        } else {
            &self.c[j][i]
        }
    }

    pub fn eval(&self, x: &[BigInt; 4]) -> BigRational {
        let mut acc = BigRational::zero();
        for i in 0..4 {
            for j in i..4 {
                if !self.c[i][j].is_zero() {
                    acc += &self.c[i][j] * q(&x[i] * &x[j]);
                }
            }
        }
        acc
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for i in 0..4 {
            for j in i..4 {
                let c = &self.c[i][j];
                if c.is_zero() {
                    continue;
                }
                let sign = if c.is_negative() { "- " } else if first { "" } else { "+ " };
                let mag = c.abs();
                let coeff = if mag.is_one() { String::new() } else { format!("{mag}*") };
                let mono = if i == j { format!("x{}^2", i + 1) } else { format!("x{}*x{}", i + 1, j + 1) };
                write!(f, "{}{sign}{coeff}{mono}", if first { "" } else { " " })?;
                first = false;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Exact forms attached to an integral basis: `f1` (linear in `x2..x4`),
/// `f2` (binary in `x3, x4`), `p_hat`, `p0`, and `g = 2 p0 - f1 x1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchPolynomials {
    pub f1: [BigInt; 4],
    pub f2: BinaryQF,
    pub p_hat: QuadForm,
    pub p0: QuadForm,
    pub g: QuadForm,
    pub kappa: BigRational,
}

impl SearchPolynomials {
    pub fn eval_f1(&self, x: &[BigInt; 4]) -> BigInt {
        self.f1.iter().zip(x.iter()).map(|(c, v)| c * v).sum()
    }

    pub fn eval_f2(&self, x: &[BigInt; 4]) -> BigInt {
        self.f2.eval(&x[2], &x[3])
    }

    pub fn f1_display(&self) -> String {
        let mut s = String::new();
        for (i, c) in self.f1.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { if s.is_empty() { "-" } else { " - " } } else if s.is_empty() { "" } else { " + " };
            let mag = c.abs();
            let coeff = if mag.is_one() { String::new() } else { format!("{mag}*") };
            s += &format!("{sign}{coeff}x{}", i + 1);
        }
        s
    }
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer().sqrt(), r.denom().sqrt());
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Exact `f1, f2, p_hat, p0` with embeddings `phi_k(eta) = i*sqrt|phi_k(beta)|`
/// and `phi_1(sqrt disc_f) > 0`.
pub fn compute_search_polynomials(field: &CmField) -> Result<SearchPolynomials, CmError> {
    let inv = |what: String| CmError::Invariant { id: field.id.clone(), what };
    let d = q(field.disc_f);
    let al = &field.basis;
    // f1 = (phi1 - phi2)(pi + conj pi) / sqrt d = 4 * v(U)
    let mut f1 = Vec::new();
    for a in al {
        let c = &a.a.v * q(4);
        if !c.is_integer() {
            return Err(inv(format!("f1 coefficient {c} not integral")));
        }
        f1.push(c.to_integer());
    }
    let f1: [BigInt; 4] = f1.try_into().unwrap();
    if !f1[0].is_zero() {
        return Err(inv("f1 depends on x1".into()));
    }
    if f1[1].is_zero() {
        return Err(inv("coefficient of x2 in f1 vanishes".into()));
    }
    // f2 = phi1(pi - conj pi) phi2(pi - conj pi) * disc_f / sqrt disc_k = -kappa N(V)
    let ratio = field.beta.norm() / q(field.disc_k.clone());
    let root = rational_sqrt(&ratio).ok_or_else(|| inv(format!("N(beta)/disc_k = {ratio} is not a square")))?;
    let kappa = q(4) * &d * root;
    let bil = |x: &RealQuadElement, y: &RealQuadElement| &x.u * &y.u - &x.v * &y.v * &d;
    for k in 0..2 {
        if !al[k].b.is_zero() {
            return Err(inv(format!("alpha{} not in F", k + 1)));
        }
    }
    let coef = |r: BigRational| -> Result<BigInt, CmError> {
        if r.is_integer() {
            Ok(r.to_integer())
        } else {
            Err(inv(format!("f2 coefficient {r} not integral")))
        }
    };
    let f2 = BinaryQF::new(
        coef(-&kappa * bil(&al[2].b, &al[2].b))?,
        coef(-&kappa * q(2) * bil(&al[2].b, &al[3].b))?,
        coef(-&kappa * bil(&al[3].b, &al[3].b))?,
    );
    if f2.discriminant() != BigInt::from(field.disc_f) {
        return Err(inv(format!("disc(f2) = {} != disc_f", f2.discriminant())));
    }
    // pi conj(pi) = sum W_ij x_i x_j, W_ij = A_i A_j - beta B_i B_j
    let mut p_hat = QuadForm::zero();
    let mut p0 = QuadForm::zero();
    for i in 0..4 {
        for j in i..4 {
            let w = al[i].a.mul(&al[j].a).sub(&field.beta.mul(&al[i].b.mul(&al[j].b)));
            let w = if i == j { w } else { w.scale(&q(2)) };
            p_hat.c[i][j] = w.u;
            p0.c[i][j] = w.v;
        }
    }
    for form in [&p_hat, &p0] {
        for i in 0..4 {
            for j in i..4 {
                if !(&form.c[i][j] * q(2)).is_integer() {
                    return Err(inv(format!("coefficient of x{}x{} not in Z/2", i + 1, j + 1)));
                }
            }
        }
    }
    let mut g = QuadForm::zero();
    for i in 0..4 {
        for j in i..4 {
            let two = &p0.c[i][j] * q(2);
            if i == 0 {
                let expect = if j == 0 { BigRational::zero() } else { q(f1[j].clone()) };
                if two != expect {
                    return Err(inv("2 p0 - f1 x1 depends on x1".into()));
                }
            } else {
                g.c[i][j] = two;
            }
        }
    }
    Ok(SearchPolynomials { f1, f2, p_hat, p0, g, kappa })
}
