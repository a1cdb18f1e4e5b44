//! The monoid of multiplicative residues `MR(A) = A / (1 + m)`.
//!
//! For `A = Z_p` or `A = F_p[[t]]` an element `u * p^v` (resp. `u * t^v`)
//! changes only in its non-leading digits under multiplication by `1 + m`,
//! so the class of a nonzero element is determined by the pair
//! `(v, u mod p)`. The zero class is kept apart from it.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::local_arith::{inverse_mod_p, ArithError, LocalElement, Polynomial, RingKind, RingSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResidueError {
    #[error("indeterminate residue: {0} is zero at the working precision")]
    IndeterminateResidue(String),
    #[error("ring mismatch: {left} vs {right}")]
    RingMismatch { left: RingSpec, right: RingSpec },
    #[error("expected an element over {expected}, got {got}")]
    WrongRingKind { expected: RingKind, got: RingKind },
    #[error("points have different lengths ({0} vs {1})")]
    PointLength(usize, usize),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// The payload of a multiplicative residue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ResidueValue {
    Zero,
    /// `(valuation, leading unit digit in [1, p-1])`.
    Pos { val: u64, unit: u32 },
}

/// An element of `MR(A)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultRes {
    ring: RingSpec,
    #[serde(rename = "mres")]
    value: ResidueValue,
}

impl MultRes {
    pub fn zero(ring: RingSpec) -> Self {
        MultRes { ring, value: ResidueValue::Zero }
    }

    pub fn one(ring: RingSpec) -> Self {
        MultRes { ring, value: ResidueValue::Pos { val: 0, unit: 1 } }
    }

    /// `Pos(val, unit mod p)`; a unit digit divisible by `p` gives `None`.
    pub fn pos(ring: RingSpec, val: u64, unit: u32) -> Option<Self> {
        let unit = unit % ring.p();
        (unit != 0).then_some(MultRes { ring, value: ResidueValue::Pos { val, unit } })
    }

    pub fn from_value(ring: RingSpec, value: ResidueValue) -> Option<Self> {
        match value {
            ResidueValue::Zero => Some(Self::zero(ring)),
            ResidueValue::Pos { unit, .. } => {
                (unit != 0 && unit < ring.p()).then_some(MultRes { ring, value })
            }
        }
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn value(&self) -> ResidueValue {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == ResidueValue::Zero
    }

    pub fn valuation(&self) -> Option<u64> {
        match self.value {
            ResidueValue::Zero => None,
            ResidueValue::Pos { val, .. } => Some(val),
        }
    }

    /// Invertible elements of the monoid are exactly the valuation-0 ones.
    pub fn is_invertible(&self) -> bool {
        matches!(self.value, ResidueValue::Pos { val: 0, .. })
    }

    pub fn inverse(&self) -> Option<MultRes> {
        match self.value {
            ResidueValue::Pos { val: 0, unit } => MultRes::pos(self.ring, 0, inverse_mod_p(unit as u64, self.ring.p())),
            _ => None,
        }
    }

    /// A representative in `A`: `uniformizer^val * unit`. `None` if the
    /// valuation is not below the working precision.
    pub fn representative(&self) -> Option<LocalElement> {
        match self.value {
            ResidueValue::Zero => Some(LocalElement::zero(self.ring)),
            ResidueValue::Pos { val, unit } => (val < self.ring.precision() as u64)
                .then(|| LocalElement::monomial(self.ring, val as u32, unit)),
        }
    }

    /// `Zero`, then `Pos(v, u)` for `v <= val_cap`, `u in [1, p-1]`,
    /// lexicographically.
    pub fn enumerate(ring: RingSpec, val_cap: u64) -> impl Iterator<Item = MultRes> {
        let p = ring.p();
        std::iter::once(MultRes::zero(ring)).chain(
            (0..=val_cap).flat_map(move |val| (1..p).map(move |unit| MultRes { ring, value: ResidueValue::Pos { val, unit } })),
        )
    }

    fn check_same(&self, other: &MultRes) -> Result<(), ResidueError> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(ResidueError::RingMismatch { left: self.ring, right: other.ring })
        }
    }
}

impl fmt::Display for ResidueValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResidueValue::Zero => write!(f, "zero"),
            ResidueValue::Pos { val, unit } => write!(f, "({val}, {unit})"),
        }
    }
}

impl fmt::Display for MultRes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawResidueValue {
    Tag(String),
    Pos { val: u64, unit: u32 },
}

impl Serialize for ResidueValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match *self {
            ResidueValue::Zero => RawResidueValue::Tag("zero".into()),
            ResidueValue::Pos { val, unit } => RawResidueValue::Pos { val, unit },
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ResidueValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        match RawResidueValue::deserialize(deserializer)? {
            RawResidueValue::Tag(t) if t == "zero" => Ok(ResidueValue::Zero),
            RawResidueValue::Tag(t) => Err(D::Error::custom(format!("unknown residue tag {t:?}"))),
            RawResidueValue::Pos { unit: 0, .. } => Err(D::Error::custom("unit residue must be nonzero")),
            RawResidueValue::Pos { val, unit } => Ok(ResidueValue::Pos { val, unit }),
        }
    }
}

/// An element of the residue field `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidueFieldElem {
    value: u32,
    p: u32,
}

impl ResidueFieldElem {
    pub fn new(value: u64, p: u32) -> Self {
        ResidueFieldElem { value: (value % p as u64) as u32, p }
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn p(&self) -> u32 {
        self.p
    }
}

impl fmt::Display for ResidueFieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Multiplicative residue of an element known to be nonzero at precision.
pub fn mres(a: &LocalElement) -> Result<MultRes, ResidueError> {
    match a.leading_digit() {
        Some(unit) => Ok(MultRes { ring: a.ring(), value: ResidueValue::Pos { val: a.valuation() as u64, unit } }),
        None => Err(ResidueError::IndeterminateResidue(a.to_string())),
    }
}

/// Like [`mres`], but for an element the caller knows to be exactly zero.
pub fn mres_exact_zero(ring: RingSpec) -> MultRes {
    MultRes::zero(ring)
}

pub fn mr_mul(a: &MultRes, b: &MultRes) -> Result<MultRes, ResidueError> {
    a.check_same(b)?;
    let value = match (a.value, b.value) {
        (ResidueValue::Pos { val: v1, unit: u1 }, ResidueValue::Pos { val: v2, unit: u2 }) => ResidueValue::Pos {
            val: v1 + v2,
            unit: ((u1 as u64 * u2 as u64) % a.ring.p() as u64) as u32,
        },
        _ => ResidueValue::Zero,
    };
    Ok(MultRes { ring: a.ring, value })
}

pub fn mr_pow(a: &MultRes, e: u32) -> MultRes {
    (0..e).fold(MultRes::one(a.ring), |acc, _| mr_mul(&acc, a).expect("same ring"))
}

/// The map `s_A : MR(A) -> A/m`.
pub fn s_a(a: &MultRes) -> ResidueFieldElem {
    match a.value {
        ResidueValue::Pos { val: 0, unit } => ResidueFieldElem { value: unit, p: a.ring.p() },
        _ => ResidueFieldElem { value: 0, p: a.ring.p() },
    }
}

/// The unique invertible-or-zero residue whose `s_A`-image is
/// `s_A(a) + s_A(b)`.
pub fn plus_mod(a: &MultRes, b: &MultRes) -> Result<MultRes, ResidueError> {
    a.check_same(b)?;
    let p = a.ring.p() as u64;
    let c = ((s_a(a).value as u64 + s_a(b).value as u64) % p) as u32;
    Ok(if c == 0 { MultRes::zero(a.ring) } else { MultRes { ring: a.ring, value: ResidueValue::Pos { val: 0, unit: c } } })
}

/// The isomorphism `MR(Z_p) -> MR(F_p[[t]])`, `mres(u p^m) -> mres((u mod p) t^m)`.
pub fn tau_p(a: &MultRes) -> Result<MultRes, ResidueError> {
    retarget(a, RingKind::Padic)
}

/// Inverse of [`tau_p`].
pub fn tau_p_inverse(a: &MultRes) -> Result<MultRes, ResidueError> {
    retarget(a, RingKind::PowerSeries)
}

fn retarget(a: &MultRes, from: RingKind) -> Result<MultRes, ResidueError> {
    if a.ring.kind() != from {
        return Err(ResidueError::WrongRingKind { expected: from, got: a.ring.kind() });
    }
    Ok(MultRes { ring: a.ring.with_kind(from.other()), value: a.value })
}

/// Whether two points have the same residues with respect to the given
/// regular functions: they agree modulo `m` and every function takes
/// values with equal multiplicative residues at both.
pub fn same_residues(a: &[LocalElement], b: &[LocalElement], funcs: &[Polynomial]) -> Result<bool, ResidueError> {
    if a.len() != b.len() {
        return Err(ResidueError::PointLength(a.len(), b.len()));
    }
    for (x, y) in a.iter().zip(b) {
        if x.ring() != y.ring() {
            return Err(ResidueError::RingMismatch { left: x.ring(), right: y.ring() });
        }
    }
    if !a.iter().zip(b).all(|(x, y)| x.congruent_mod_m(y)) {
        return Ok(false);
    }
    for f in funcs {
        let (fa, fb) = (f.eval(a)?, f.eval(b)?);
        if mres(&fa)? != mres(&fb)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A rational function `numerator / denominator` on affine space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    pub numerator: Polynomial,
    pub denominator: Polynomial,
}

/// Replaces rational functions by the list of their numerators and
/// denominators. Two points at which all denominators are nonzero and which
/// have the same residues with respect to the returned regular functions
/// have the same residues with respect to the quotients.
pub fn regular_pair_decomposition(funcs: &[RationalFunction]) -> Vec<Polynomial> {
    let mut out: Vec<Polynomial> = Vec::with_capacity(2 * funcs.len());
    for f in funcs {
        for g in [&f.numerator, &f.denominator] {
            if !out.contains(g) {
                out.push(g.clone());
            }
        }
    }
    out
}
