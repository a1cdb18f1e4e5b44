//! Exact truncated arithmetic in the two henselian valuation rings `Z_p` and
//! `F_p[[t]]`.
//!
//! Every element is known modulo `m^N`, where `m` is the maximal ideal and `N`
//! is the precision fixed by the [`RingSpec`]. Elements are stored in a unique
//! normal form: a valuation `v` together with the `N - v` base-`p` digits of
//! the unit part, leading digit nonzero. An element that is congruent to zero
//! modulo `m^N` is stored with `v = N` and no digits; it is "zero at this
//! precision", which is weaker than being zero.
//!
//! In `Z_p` digits carry; in `F_p[[t]]` they are coefficients of `t^i` and
//! combine independently modulo `p`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest admissible residue characteristic (exclusive).
pub const MAX_PRIME: u64 = 1 << 31;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("{0} is not a prime below 2^31")]
    InvalidPrime(u64),
    #[error("precision must be at least 1")]
    ZeroPrecision,
    #[error("ring mismatch: {left} vs {right}")]
    RingMismatch { left: RingSpec, right: RingSpec },
    #[error("element has positive valuation {valuation}; only units can be inverted")]
    NotAUnit { valuation: u32 },
    #[error("arity mismatch: expected {expected} values, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("digit {digit} is out of range for p = {p}")]
    DigitOutOfRange { digit: u64, p: u32 },
    #[error("malformed polynomial: {0}")]
    MalformedPolynomial(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RingKind {
    /// The p-adic integers `Z_p`.
    Padic,
    /// Formal power series `F_p[[t]]`.
    PowerSeries,
}

impl RingKind {
    pub fn other(self) -> RingKind {
        match self {
            RingKind::Padic => RingKind::PowerSeries,
            RingKind::PowerSeries => RingKind::Padic,
        }
    }
}

impl fmt::Display for RingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingKind::Padic => write!(f, "Z_p"),
            RingKind::PowerSeries => write!(f, "F_p[[t]]"),
        }
    }
}

/// One of the rings `Z_p` or `F_p[[t]]`, truncated at precision `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawRingSpec")]
pub struct RingSpec {
    kind: RingKind,
    p: u32,
    #[serde(rename = "prec")]
    precision: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRingSpec {
    kind: RingKind,
    p: u64,
    prec: u32,
}

impl TryFrom<RawRingSpec> for RingSpec {
    type Error = ArithError;

    fn try_from(raw: RawRingSpec) -> Result<Self, Self::Error> {
        RingSpec::new(raw.kind, raw.p, raw.prec)
    }
}

impl RingSpec {
    pub fn new(kind: RingKind, p: u64, precision: u32) -> Result<Self, ArithError> {
        if p >= MAX_PRIME || !is_prime(p) {
            return Err(ArithError::InvalidPrime(p));
        }
        if precision == 0 {
            return Err(ArithError::ZeroPrecision);
        }
        Ok(RingSpec { kind, p: p as u32, precision })
    }

    pub fn padic(p: u64, precision: u32) -> Result<Self, ArithError> {
        Self::new(RingKind::Padic, p, precision)
    }

    pub fn power_series(p: u64, precision: u32) -> Result<Self, ArithError> {
        Self::new(RingKind::PowerSeries, p, precision)
    }

    pub fn kind(&self) -> RingKind {
        self.kind
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Same prime and precision, other ring kind.
    pub fn counterpart(&self) -> RingSpec {
        RingSpec { kind: self.kind.other(), ..*self }
    }

    pub fn with_precision(&self, precision: u32) -> Result<RingSpec, ArithError> {
        RingSpec::new(self.kind, self.p as u64, precision)
    }

    pub fn with_kind(&self, kind: RingKind) -> RingSpec {
        RingSpec { kind, ..*self }
    }

    fn check_same(&self, other: &RingSpec) -> Result<(), ArithError> {
        if self == other {
            Ok(())
        } else {
            Err(ArithError::RingMismatch { left: *self, right: *other })
        }
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            RingKind::Padic => write!(f, "Z_{} mod {}^{}", self.p, self.p, self.precision),
            RingKind::PowerSeries => write!(f, "F_{}[[t]] mod t^{}", self.p, self.precision),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Inverse of `a` modulo the prime `p`; `a` must be nonzero mod `p`.
pub fn inverse_mod_p(a: u64, p: u32) -> u32 {
    let p = p as i64;
    let (mut r0, mut r1) = (p, (a % p as u64) as i64);
    let (mut s0, mut s1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1, "{a} is not invertible mod {p}");
    s0.rem_euclid(p) as u32
}

/// An element of `Z_p` or `F_p[[t]]` known modulo `m^N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LocalElement {
    ring: RingSpec,
    valuation: u32,
    unit: Vec<u32>,
}

impl LocalElement {
    pub fn zero(ring: RingSpec) -> Self {
        LocalElement { ring, valuation: ring.precision, unit: Vec::new() }
    }

    pub fn one(ring: RingSpec) -> Self {
        Self::from_abs(ring, vec![1])
    }

    /// Builds an element from its absolute digits, least significant first
    /// (coefficients of `p^i` resp. `t^i`). Digits at positions `>= N` are
    /// dropped; missing digits are zero.
    pub fn from_digits(ring: RingSpec, digits: &[u64]) -> Result<Self, ArithError> {
        let mut abs = Vec::with_capacity(digits.len());
        for &d in digits.iter().take(ring.precision as usize) {
            if d >= ring.p as u64 {
                return Err(ArithError::DigitOutOfRange { digit: d, p: ring.p });
            }
            abs.push(d as u32);
        }
        Ok(Self::from_abs(ring, abs))
    }

    /// `uniformizer^valuation * (leading + 0 + 0 + ...)`.
    pub fn monomial(ring: RingSpec, valuation: u32, leading: u32) -> Self {
        let leading = leading % ring.p;
        if valuation >= ring.precision || leading == 0 {
            return Self::zero(ring);
        }
        let mut unit = vec![0; (ring.precision - valuation) as usize];
        unit[0] = leading;
        LocalElement { ring, valuation, unit }
    }

    /// The canonical image of an integer; in `F_p[[t]]` this is the constant
    /// series `n mod p`.
    pub fn embed_integer(n: i128, ring: RingSpec) -> Self {
        let p = ring.p as u128;
        let mut mag = n.unsigned_abs();
        let abs = match ring.kind {
            RingKind::PowerSeries => vec![(mag % p) as u32],
            RingKind::Padic => {
                let mut digits = Vec::new();
                while mag > 0 && digits.len() < ring.precision as usize {
                    digits.push((mag % p) as u32);
                    mag /= p;
                }
                digits
            }
        };
        let x = Self::from_abs(ring, abs);
        if n < 0 {
            x.neg()
        } else {
            x
        }
    }

    fn from_abs(ring: RingSpec, mut abs: Vec<u32>) -> Self {
        let n = ring.precision as usize;
        abs.resize(n, 0);
        match abs.iter().position(|&d| d != 0) {
            None => Self::zero(ring),
            Some(v) => LocalElement { ring, valuation: v as u32, unit: abs.split_off(v) },
        }
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn precision(&self) -> u32 {
        self.ring.precision
    }

    /// Valuation, with `N` standing for "zero at this precision".
    pub fn valuation(&self) -> u32 {
        self.valuation
    }

    pub fn unit_digits(&self) -> &[u32] {
        &self.unit
    }

    pub fn is_zero_at_precision(&self) -> bool {
        self.valuation == self.ring.precision
    }

    pub fn is_unit(&self) -> bool {
        self.valuation == 0
    }

    /// Image in the residue field `A/m`.
    pub fn residue(&self) -> u32 {
        if self.valuation == 0 {
            self.unit[0]
        } else {
            0
        }
    }

    /// First nonzero digit, if the element is not zero at precision.
    pub fn leading_digit(&self) -> Option<u32> {
        self.unit.first().copied()
    }

    /// Absolute digits, least significant first, always of length `N`.
    pub fn abs_digits(&self) -> Vec<u32> {
        let mut abs = vec![0; self.valuation as usize];
        abs.extend_from_slice(&self.unit);
        abs
    }

    /// The unit `u` with `self = uniformizer^v * u`, its unknown trailing
    /// digits filled with zeros. Zero at precision maps to zero.
    pub fn unit_part(&self) -> LocalElement {
        Self::from_abs(self.ring, self.unit.clone())
    }

    /// Multiplies by `uniformizer^k`.
    pub fn shift(&self, k: u32) -> LocalElement {
        let mut abs = vec![0; k as usize];
        abs.extend(self.abs_digits());
        Self::from_abs(self.ring, abs)
    }

    /// The digit representative as an integer in `[0, p^N)`, when it fits.
    /// Only meaningful in `Z_p`.
    pub fn to_u128(&self) -> Option<u128> {
        let p = self.ring.p as u128;
        let mut acc: u128 = 0;
        for &d in self.abs_digits().iter().rev() {
            acc = acc.checked_mul(p)?.checked_add(d as u128)?;
        }
        Some(acc)
    }

    pub fn add(&self, other: &LocalElement) -> Result<LocalElement, ArithError> {
        self.ring.check_same(&other.ring)?;
        if self.is_zero_at_precision() {
            return Ok(other.clone());
        }
        if other.is_zero_at_precision() {
            return Ok(self.clone());
        }
        let (a, b) = (self.abs_digits(), other.abs_digits());
        let p = self.ring.p as u64;
        let mut out = Vec::with_capacity(a.len());
        match self.ring.kind {
            RingKind::Padic => {
                let mut carry = 0u64;
                for (x, y) in a.iter().zip(&b) {
                    let s = *x as u64 + *y as u64 + carry;
                    out.push((s % p) as u32);
                    carry = s / p;
                }
            }
            RingKind::PowerSeries => {
                out.extend(a.iter().zip(&b).map(|(x, y)| ((*x as u64 + *y as u64) % p) as u32));
            }
        }
        Ok(Self::from_abs(self.ring, out))
    }

    pub fn neg(&self) -> LocalElement {
        if self.is_zero_at_precision() {
            return self.clone();
        }
        let p = self.ring.p;
        let unit = match self.ring.kind {
            RingKind::Padic => {
                // p^N - x: complement every digit, the lowest nonzero one against p.
                let mut u = Vec::with_capacity(self.unit.len());
                u.push(p - self.unit[0]);
                u.extend(self.unit[1..].iter().map(|d| p - 1 - d));
                u
            }
            RingKind::PowerSeries => self.unit.iter().map(|d| (p - d) % p).collect(),
        };
        LocalElement { ring: self.ring, valuation: self.valuation, unit }
    }

    pub fn sub(&self, other: &LocalElement) -> Result<LocalElement, ArithError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &LocalElement) -> Result<LocalElement, ArithError> {
        self.ring.check_same(&other.ring)?;
        let n = self.ring.precision;
        let v = self.valuation + other.valuation;
        if v >= n {
            return Ok(Self::zero(self.ring));
        }
        // Only N - v digits of the product of the unit parts survive.
        let len = (n - v) as usize;
        let p = self.ring.p as u128;
        let mut acc = vec![0u128; len];
        for (i, &x) in self.unit.iter().take(len).enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in other.unit.iter().take(len - i).enumerate() {
                acc[i + j] += x as u128 * y as u128;
            }
        }
        let unit: Vec<u32> = match self.ring.kind {
            RingKind::Padic => {
                let mut carry = 0u128;
                acc.into_iter()
                    .map(|a| {
                        let s = a + carry;
                        carry = s / p;
                        (s % p) as u32
                    })
                    .collect()
            }
            RingKind::PowerSeries => acc.into_iter().map(|a| (a % p) as u32).collect(),
        };
        let mut abs = vec![0; v as usize];
        abs.extend(unit);
        Ok(Self::from_abs(self.ring, abs))
    }

    pub fn pow(&self, mut e: u32) -> LocalElement {
        let mut base = self.clone();
        let mut acc = Self::one(self.ring);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same ring");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same ring");
            }
        }
        acc
    }

    /// Multiplicative inverse of a unit, exact at precision `N`.
    pub fn invert(&self) -> Result<LocalElement, ArithError> {
        if self.valuation != 0 {
            return Err(ArithError::NotAUnit { valuation: self.valuation });
        }
        let ring = self.ring;
        let two = Self::embed_integer(2, ring);
        let mut b = Self::from_abs(ring, vec![inverse_mod_p(self.unit[0] as u64, ring.p)]);
        // b <- b (2 - a b); the number of correct digits doubles each round.
        let mut correct = 1u32;
        while correct < ring.precision {
            let ab = self.mul(&b)?;
            b = b.mul(&two.sub(&ab)?)?;
            correct = correct.saturating_mul(2);
        }
        Ok(b)
    }

    /// `self ≡ other (mod m)`.
    pub fn congruent_mod_m(&self, other: &LocalElement) -> bool {
        self.residue() == other.residue()
    }
}

impl fmt::Display for LocalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.ring.p;
        let n = self.ring.precision;
        match self.ring.kind {
            RingKind::Padic => {
                if self.is_zero_at_precision() {
                    return write!(f, "O({p}^{n})");
                }
                match self.to_u128() {
                    Some(v) => write!(f, "{v} + O({p}^{n})"),
                    None => {
                        let digits: Vec<String> = self.abs_digits().iter().map(u32::to_string).collect();
                        write!(f, "[{}]_{p} + O({p}^{n})", digits.join(","))
                    }
                }
            }
            RingKind::PowerSeries => {
                let mut parts = Vec::new();
                for (i, d) in self.abs_digits().into_iter().enumerate() {
                    if d == 0 {
                        continue;
                    }
                    parts.push(match (i, d) {
                        (0, d) => d.to_string(),
                        (1, 1) => "t".to_string(),
                        (1, d) => format!("{d}t"),
                        (i, 1) => format!("t^{i}"),
                        (i, d) => format!("{d}t^{i}"),
                    });
                }
                parts.push(format!("O(t^{n})"));
                write!(f, "{}", parts.join(" + "))
            }
        }
    }
}

pub fn embed_integer(n: i128, ring: RingSpec) -> LocalElement {
    LocalElement::embed_integer(n, ring)
}

pub fn add(a: &LocalElement, b: &LocalElement) -> Result<LocalElement, ArithError> {
    a.add(b)
}

pub fn mul(a: &LocalElement, b: &LocalElement) -> Result<LocalElement, ArithError> {
    a.mul(b)
}

pub fn invert(a: &LocalElement) -> Result<LocalElement, ArithError> {
    a.invert()
}

pub fn eval_polynomial(poly: &Polynomial, point: &[LocalElement]) -> Result<LocalElement, ArithError> {
    poly.eval(point)
}

/// A sparse multivariate polynomial with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, i128>,
}

impl Polynomial {
    pub fn new<I>(vars: Vec<String>, terms: I) -> Result<Self, ArithError>
    where
        I: IntoIterator<Item = (Vec<u32>, i128)>,
    {
        let mut map: BTreeMap<Vec<u32>, i128> = BTreeMap::new();
        for (exp, coef) in terms {
            if exp.len() != vars.len() {
                return Err(ArithError::MalformedPolynomial(format!(
                    "exponent vector {exp:?} does not match {} variables",
                    vars.len()
                )));
            }
            let slot = map.entry(exp).or_insert(0);
            *slot = slot
                .checked_add(coef)
                .ok_or_else(|| ArithError::MalformedPolynomial("coefficient overflow".into()))?;
        }
        map.retain(|_, c| *c != 0);
        Ok(Polynomial { vars, terms: map })
    }

    pub fn zero(vars: Vec<String>) -> Self {
        Polynomial { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: Vec<String>, c: i128) -> Self {
        let n = vars.len();
        Self::new(vars, [(vec![0; n], c)]).expect("well-formed")
    }

    /// The coordinate function of variable `idx`.
    pub fn var(vars: Vec<String>, idx: usize) -> Self {
        let mut exp = vec![0; vars.len()];
        exp[idx] = 1;
        Self::new(vars, [(exp, 1)]).expect("well-formed")
    }

    pub fn monomial(vars: Vec<String>, exp: Vec<u32>, coef: i128) -> Result<Self, ArithError> {
        Self::new(vars, [(exp, coef)])
    }

    /// Default variable names `x1..xn`.
    pub fn default_vars(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("x{i}")).collect()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, i128)> {
        self.terms.iter().map(|(e, c)| (e, *c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self, degree: u32) -> bool {
        self.terms.keys().all(|e| e.iter().sum::<u32>() == degree)
    }

    /// Re-expresses the polynomial over a larger ordered variable list.
    pub fn with_vars(&self, vars: &[String]) -> Result<Polynomial, ArithError> {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| {
                vars.iter().position(|w| w == v).ok_or_else(|| {
                    ArithError::MalformedPolynomial(format!("variable {v} missing from target list"))
                })
            })
            .collect::<Result<_, _>>()?;
        let terms = self.terms.iter().map(|(e, c)| {
            let mut exp = vec![0; vars.len()];
            for (i, &k) in e.iter().enumerate() {
                exp[map[i]] += k;
            }
            (exp, *c)
        });
        Polynomial::new(vars.to_vec(), terms)
    }

    pub fn derivative(&self, idx: usize) -> Polynomial {
        let terms = self.terms.iter().filter(|(e, _)| e[idx] > 0).map(|(e, c)| {
            let mut exp = e.clone();
            exp[idx] -= 1;
            (exp, c * e[idx] as i128)
        });
        Polynomial::new(self.vars.clone(), terms).expect("well-formed")
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::constant(self.vars.clone(), 1);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluates with exact truncated arithmetic in the ring of the point.
    pub fn eval(&self, point: &[LocalElement]) -> Result<LocalElement, ArithError> {
        if point.len() != self.vars.len() {
            return Err(ArithError::ArityMismatch { expected: self.vars.len(), got: point.len() });
        }
        let ring = match point.first() {
            Some(x) => x.ring,
            None => {
                return Err(ArithError::MalformedPolynomial(
                    "cannot infer the ring of an empty point; use eval_in".into(),
                ))
            }
        };
        self.eval_in(ring, point)
    }

    /// Like [`Polynomial::eval`], with the ring given explicitly (needed for
    /// constants).
    pub fn eval_in(&self, ring: RingSpec, point: &[LocalElement]) -> Result<LocalElement, ArithError> {
        if point.len() != self.vars.len() {
            return Err(ArithError::ArityMismatch { expected: self.vars.len(), got: point.len() });
        }
        for x in point {
            ring.check_same(&x.ring)?;
        }
        let max_exp: Vec<u32> = (0..self.vars.len())
            .map(|i| self.terms.keys().map(|e| e[i]).max().unwrap_or(0))
            .collect();
        let powers: Vec<Vec<LocalElement>> = point
            .iter()
            .zip(&max_exp)
            .map(|(x, &m)| {
                let mut ps = vec![LocalElement::one(ring)];
                for k in 1..=m as usize {
                    let next = ps[k - 1].mul(x).expect("same ring");
                    ps.push(next);
                }
                ps
            })
            .collect();
        let mut acc = LocalElement::zero(ring);
        for (exp, &coef) in &self.terms {
            let mut t = LocalElement::embed_integer(coef, ring);
            for (i, &k) in exp.iter().enumerate() {
                if k > 0 {
                    t = t.mul(&powers[i][k as usize])?;
                }
            }
            acc = acc.add(&t)?;
        }
        Ok(acc)
    }

    /// Evaluates modulo `p` at a point of `F_p^n`.
    pub fn eval_mod_p(&self, point: &[u64], p: u32) -> u64 {
        debug_assert_eq!(point.len(), self.vars.len());
        let p64 = p as u64;
        let mut acc = 0u64;
        for (exp, &coef) in &self.terms {
            let mut t = coef.rem_euclid(p as i128) as u64;
            for (i, &k) in exp.iter().enumerate() {
                for _ in 0..k {
                    t = t * (point[i] % p64) % p64;
                }
            }
            acc = (acc + t) % p64;
        }
        acc
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.vars, rhs.vars, "polynomials over different variables");
        let terms = self.terms.iter().chain(rhs.terms.iter()).map(|(e, c)| (e.clone(), *c));
        Polynomial::new(self.vars.clone(), terms).expect("coefficient overflow")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), -c));
        Polynomial::new(self.vars.clone(), terms).expect("well-formed")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.vars, rhs.vars, "polynomials over different variables");
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let exp = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                terms.push((exp, ca.checked_mul(*cb).expect("coefficient overflow")));
            }
        }
        Polynomial::new(self.vars.clone(), terms).expect("coefficient overflow")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (exp, &coef)) in self.terms.iter().rev().enumerate() {
            let mag = coef.unsigned_abs();
            match (k, coef < 0) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let factors: Vec<String> = exp
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { self.vars[i].clone() } else { format!("{}^{e}", self.vars[i]) })
                .collect();
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == 1 {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{mag}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolynomialJson {
    vars: Vec<String>,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermJson {
    exp: Vec<u32>,
    coef: String,
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PolynomialJson {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermJson { exp: e.clone(), coef: c.to_string() })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = PolynomialJson::deserialize(deserializer)?;
        let terms = raw
            .terms
            .into_iter()
            .map(|t| {
                t.coef
                    .trim()
                    .parse::<i128>()
                    .map(|c| (t.exp, c))
                    .map_err(|e| D::Error::custom(format!("bad coefficient {:?}: {e}", t.coef)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Polynomial::new(raw.vars, terms).map_err(D::Error::custom)
    }
}
