//! Three-valued evaluation over truncated `A`.
//!
//! A ring quantifier ranges over the `p^k` residue classes modulo `m^k`
//! (`k` = ring depth), and every verdict is meant for the whole class: an
//! equation is false when the difference is visibly nonzero below the class
//! precision, true when it vanishes identically, and unknown otherwise.
//! Unknown existential equations can be settled by a Hensel lift.
//! Residue quantifiers enumerate `Zero` and `Pos(v, u)` for `v <= val_cap`;
//! a universal (resp. existential) verdict is only trusted when the body
//! cannot distinguish larger valuations.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::{Formula, ResTerm, RingTerm, Sort};
use super::FormulaError;
use crate::hensel::{lift, PolynomialSystem};
use crate::local_arith::{LocalElement, Polynomial, RingKind, RingSpec};
use crate::residue_monoid::{mr_mul, mr_pow, mres, plus_mod, s_a, MultRes, ResidueValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TruthValue {
    True,
    False,
    Unknown,
}

impl TruthValue {
    pub fn from_bool(b: bool) -> Self {
        if b {
            TruthValue::True
        } else {
            TruthValue::False
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            TruthValue::True => Some(true),
            TruthValue::False => Some(false),
            TruthValue::Unknown => None,
        }
    }

    pub fn is_determinate(self) -> bool {
        self != TruthValue::Unknown
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        match self {
            TruthValue::True => TruthValue::False,
            TruthValue::False => TruthValue::True,
            TruthValue::Unknown => TruthValue::Unknown,
        }
    }

    pub fn and(self, other: Self) -> Self {
        use TruthValue::*;
        match (self, other) {
            (False, _) | (_, False) => False,
            (True, True) => True,
            _ => Unknown,
        }
    }

    pub fn or(self, other: Self) -> Self {
        self.not().and(other.not()).not()
    }

    pub fn implies(self, other: Self) -> Self {
        self.not().or(other)
    }

    pub fn iff(self, other: Self) -> Self {
        match (self.as_bool(), other.as_bool()) {
            (Some(a), Some(b)) => TruthValue::from_bool(a == b),
            _ => TruthValue::Unknown,
        }
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TruthValue::True => "true",
            TruthValue::False => "false",
            TruthValue::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub ring: RingSpec,
    /// Ring quantifiers range over classes modulo `m^ring_depth`.
    pub ring_depth: u32,
    /// Largest valuation enumerated by residue quantifiers.
    pub val_cap: u64,
    /// Settle unknown existential equations by Hensel lifting.
    pub certify: bool,
}

impl EvalConfig {
    pub fn new(ring: RingSpec) -> Self {
        EvalConfig { ring, ring_depth: 1, val_cap: 2, certify: true }
    }

    pub fn with_depth(mut self, k: u32) -> Self {
        self.ring_depth = k;
        self
    }

    pub fn with_val_cap(mut self, v: u64) -> Self {
        self.val_cap = v;
        self
    }

    pub fn with_certify(mut self, certify: bool) -> Self {
        self.certify = certify;
        self
    }

    pub fn with_ring(mut self, ring: RingSpec) -> Self {
        self.ring = ring;
        self
    }

    fn validate(&self) -> Result<(), FormulaError> {
        let n = self.ring.precision();
        if self.ring_depth == 0 || self.ring_depth > n {
            return Err(FormulaError::InvalidConfig(format!(
                "ring depth must lie in 1..={n}, got {}",
                self.ring_depth
            )));
        }
        if (self.ring.p() as u128).checked_pow(self.ring_depth).map_or(true, |c| c > u64::MAX as u128) {
            return Err(FormulaError::InvalidConfig("p^depth does not fit in 64 bits".into()));
        }
        Ok(())
    }
}

/// Values for free variables. Ring values are taken as exact elements at
/// the working precision.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    ring: BTreeMap<String, LocalElement>,
    residue: BTreeMap<String, MultRes>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_ring(mut self, name: &str, value: LocalElement) -> Self {
        self.set_ring(name, value);
        self
    }

    pub fn with_residue(mut self, name: &str, value: MultRes) -> Self {
        self.set_residue(name, value);
        self
    }

    pub fn set_ring(&mut self, name: &str, value: LocalElement) {
        self.ring.insert(name.to_string(), value);
    }

    pub fn set_residue(&mut self, name: &str, value: MultRes) {
        self.residue.insert(name.trim_start_matches('%').to_string(), value);
    }

    pub fn ring(&self, name: &str) -> Option<&LocalElement> {
        self.ring.get(name)
    }

    pub fn residue(&self, name: &str) -> Option<&MultRes> {
        self.residue.get(name.trim_start_matches('%'))
    }
}

/// A ring existential settled by lifting a simple root of an equation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub variables: Vec<String>,
    /// Class representatives, one per variable of the block.
    pub residues: Vec<LocalElement>,
    pub depth: u32,
    /// Variable along which the lift ran.
    pub coordinate: String,
    pub root: LocalElement,
}

fn class_repr(x: &LocalElement, k: u32) -> String {
    let digits = x.abs_digits();
    let digits = &digits[..(k as usize).min(digits.len())];
    match x.ring().kind() {
        RingKind::Padic => {
            let p = x.ring().p() as u128;
            digits.iter().rev().fold(0u128, |acc, &d| acc * p + d as u128).to_string()
        }
        RingKind::PowerSeries => {
            let parts: Vec<String> = digits
                .iter()
                .enumerate()
                .filter(|(_, &d)| d != 0)
                .map(|(i, &d)| match (i, d) {
                    (0, d) => d.to_string(),
                    (1, 1) => "t".into(),
                    (1, d) => format!("{d}t"),
                    (i, 1) => format!("t^{i}"),
                    (i, d) => format!("{d}t^{i}"),
                })
                .collect();
            if parts.is_empty() {
                "0".into()
            } else {
                parts.join(" + ")
            }
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let reps: Vec<String> = self.residues.iter().map(|r| class_repr(r, self.depth)).collect();
        let ring = self.root.ring();
        let base = match ring.kind() {
            RingKind::Padic => ring.p().to_string(),
            RingKind::PowerSeries => "t".to_string(),
        };
        let modulus = if self.depth == 1 { base } else { format!("{base}^{}", self.depth) };
        if reps.len() == 1 {
            write!(f, "witness {} mod {modulus}, Hensel", reps[0])
        } else {
            write!(f, "witness ({}) mod {modulus}, Hensel in {}", reps.join(", "), self.coordinate)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub value: TruthValue,
    pub certificates: Vec<Certificate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferResult {
    pub zp: TruthValue,
    pub fpt: TruthValue,
    /// `None` unless both verdicts are determinate.
    pub agree: Option<bool>,
}

enum CTerm {
    Var(String),
    Zero,
    One,
    Mul(Box<CTerm>, Box<CTerm>),
    PlusMod(Box<CTerm>, Box<CTerm>),
    Pow(Box<CTerm>, u32),
    Mres(Polynomial),
}

enum Node {
    RingAtom(Polynomial),
    ResAtom(CTerm, CTerm),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
    RingBlock { exists: bool, vars: Vec<String>, body: Box<Node> },
    /// `uniform` is `Some(needs_positive_valuation)` when the body only
    /// sees the variable through data that `val_cap` enumerates fully.
    ResQuant { exists: bool, var: String, body: Box<Node>, uniform: Option<bool> },
}

fn ring_poly(a: &RingTerm, b: &RingTerm) -> Polynomial {
    let mut vars = a.variables();
    for v in b.variables() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    &a.to_polynomial(&vars) - &b.to_polynomial(&vars)
}

fn compile_term(t: &ResTerm) -> CTerm {
    let b = |t: &ResTerm| Box::new(compile_term(t));
    match t {
        ResTerm::Var(v) => CTerm::Var(v.clone()),
        ResTerm::Zero => CTerm::Zero,
        ResTerm::One => CTerm::One,
        ResTerm::Mul(x, y) => CTerm::Mul(b(x), b(y)),
        ResTerm::PlusMod(x, y) => CTerm::PlusMod(b(x), b(y)),
        ResTerm::Pow(x, e) => CTerm::Pow(b(x), *e),
        ResTerm::Mres(r) => CTerm::Mres(ring_poly(r, &RingTerm::Int(0))),
    }
}

fn compile(phi: &Formula) -> Node {
    let b = |f: &Formula| Box::new(compile(f));
    match phi {
        Formula::RingEq(x, y) => Node::RingAtom(ring_poly(x, y)),
        Formula::ResEq(x, y) => Node::ResAtom(compile_term(x), compile_term(y)),
        Formula::Not(a) => Node::Not(b(a)),
        Formula::And(x, y) => Node::And(b(x), b(y)),
        Formula::Or(x, y) => Node::Or(b(x), b(y)),
        Formula::Implies(x, y) => Node::Implies(b(x), b(y)),
        Formula::Iff(x, y) => Node::Iff(b(x), b(y)),
        Formula::Exists(Sort::Ring, _, _) | Formula::Forall(Sort::Ring, _, _) => {
            let exists = matches!(phi, Formula::Exists(..));
            let mut vars = Vec::new();
            let mut cur = phi;
            loop {
                match (cur, exists) {
                    (Formula::Exists(Sort::Ring, v, body), true) | (Formula::Forall(Sort::Ring, v, body), false) => {
                        vars.push(v.clone());
                        cur = body;
                    }
                    _ => break,
                }
            }
            Node::RingBlock { exists, vars, body: b(cur) }
        }
        Formula::Exists(Sort::Residue, v, body) | Formula::Forall(Sort::Residue, v, body) => {
            let body = b(body);
            let uniform = uniform_in(&body, v);
            Node::ResQuant { exists: matches!(phi, Formula::Exists(..)), var: v.clone(), body, uniform }
        }
    }
}

/// Multiplicative degree of `%var` among the top-level factors of `t`.
fn top_degree(t: &CTerm, var: &str) -> u64 {
    match t {
        CTerm::Var(v) if v == var => 1,
        CTerm::Mul(a, b) => top_degree(a, var) + top_degree(b, var),
        CTerm::Pow(a, e) => top_degree(a, var) * *e as u64,
        _ => 0,
    }
}

fn same_term(a: &CTerm, b: &CTerm) -> bool {
    match (a, b) {
        (CTerm::Var(x), CTerm::Var(y)) => x == y,
        (CTerm::Zero, CTerm::Zero) | (CTerm::One, CTerm::One) => true,
        (CTerm::Mul(a1, a2), CTerm::Mul(b1, b2)) | (CTerm::PlusMod(a1, a2), CTerm::PlusMod(b1, b2)) => {
            same_term(a1, b1) && same_term(a2, b2)
        }
        (CTerm::Pow(a, e), CTerm::Pow(b, f)) => e == f && same_term(a, b),
        (CTerm::Mres(p), CTerm::Mres(q)) => p == q,
        _ => false,
    }
}

/// `T1 = T2 or (T1 +mod 0 = 0 and T2 +mod 0 = 0)`.
fn is_s_equality(node: &Node) -> bool {
    let Node::Or(eq, both) = node else { return false };
    let (Node::ResAtom(t1, t2), Node::And(z1, z2)) = (&**eq, &**both) else { return false };
    let s_zero = |n: &Node, t: &CTerm| match n {
        Node::ResAtom(CTerm::PlusMod(a, z), CTerm::Zero) => matches!(**z, CTerm::Zero) && same_term(a, t),
        _ => false,
    };
    s_zero(z1, t1) && s_zero(z2, t2)
}

// A residue `x` of positive valuation cancels from both sides of an atom in
// which it has the same top-level degree, and is invisible to `+mod`, so the
// atom's truth does not depend on which positive valuation `x` has.
fn uniform_in(node: &Node, var: &str) -> Option<bool> {
    if is_s_equality(node) {
        return Some(false);
    }
    let both = |a: &Node, b: &Node| Some(uniform_in(a, var)? || uniform_in(b, var)?);
    match node {
        Node::RingAtom(_) => Some(false),
        Node::ResAtom(a, b) => {
            let (da, db) = (top_degree(a, var), top_degree(b, var));
            (da == db).then_some(da > 0)
        }
        Node::Not(a) => uniform_in(a, var),
        Node::And(a, b) | Node::Or(a, b) | Node::Implies(a, b) | Node::Iff(a, b) => both(a, b),
        Node::RingBlock { body, .. } => uniform_in(body, var),
        Node::ResQuant { var: v, body, .. } => {
            if v == var {
                Some(false)
            } else {
                uniform_in(body, var)
            }
        }
    }
}

#[derive(Clone)]
enum Binding {
    /// A ring value standing for its class modulo `m^prec`.
    Ring(String, LocalElement, u32),
    Res(String, MultRes),
}

/// A residue term's value; `Unknown` records whether `s_A` is known to
/// vanish (the argument of `mres` is in `m`).
#[derive(Clone, Copy)]
enum RVal {
    Known(MultRes),
    Unknown { s_zero: bool },
}

impl RVal {
    fn s_value(&self) -> Option<u32> {
        match self {
            RVal::Known(m) => Some(s_a(m).value()),
            RVal::Unknown { s_zero: true } => Some(0),
            RVal::Unknown { s_zero: false } => None,
        }
    }
}

struct Evaluator<'a> {
    cfg: &'a EvalConfig,
    env: Vec<Binding>,
    reps: Vec<LocalElement>,
    certificates: Vec<Certificate>,
}

impl<'a> Evaluator<'a> {
    fn ring_var(&self, name: &str) -> Result<(&LocalElement, u32), FormulaError> {
        self.env
            .iter()
            .rev()
            .find_map(|b| match b {
                Binding::Ring(n, x, k) if n == name => Some((x, *k)),
                _ => None,
            })
            .ok_or_else(|| FormulaError::UnboundVariable { sort: Sort::Ring, name: name.to_string() })
    }

    fn res_var(&self, name: &str) -> Result<MultRes, FormulaError> {
        self.env
            .iter()
            .rev()
            .find_map(|b| match b {
                Binding::Res(n, m) if n == name => Some(*m),
                _ => None,
            })
            .ok_or_else(|| FormulaError::UnboundVariable { sort: Sort::Residue, name: name.to_string() })
    }

    /// Value of `poly` at the bound point and the precision to which it is
    /// meaningful for every member of the classes involved.
    fn ring_value(&self, poly: &Polynomial) -> Result<(Vec<LocalElement>, LocalElement, u32), FormulaError> {
        let mut threshold = self.cfg.ring.precision();
        let mut point = Vec::with_capacity(poly.nvars());
        for v in poly.vars() {
            let (x, k) = self.ring_var(v)?;
            threshold = threshold.min(k);
            point.push(x.clone());
        }
        let value = poly.eval_in(self.cfg.ring, &point)?;
        Ok((point, value, threshold))
    }

    fn ring_atom(&self, poly: &Polynomial) -> Result<TruthValue, FormulaError> {
        if poly.is_zero() {
            return Ok(TruthValue::True);
        }
        let (_, d, threshold) = self.ring_value(poly)?;
        Ok(if d.valuation() < threshold {
            TruthValue::False
        } else if threshold >= self.cfg.ring.precision() {
            TruthValue::True
        } else {
            TruthValue::Unknown
        })
    }

    fn term(&self, t: &CTerm) -> Result<RVal, FormulaError> {
        let ring = self.cfg.ring;
        Ok(match t {
            CTerm::Var(v) => RVal::Known(self.res_var(v)?),
            CTerm::Zero => RVal::Known(MultRes::zero(ring)),
            CTerm::One => RVal::Known(MultRes::one(ring)),
            CTerm::Mul(a, b) => match (self.term(a)?, self.term(b)?) {
                (RVal::Known(x), RVal::Known(y)) => RVal::Known(mr_mul(&x, &y)?),
                (RVal::Known(z), _) | (_, RVal::Known(z)) if z.is_zero() => RVal::Known(z),
                (x, y) => RVal::Unknown { s_zero: x.s_value() == Some(0) || y.s_value() == Some(0) },
            },
            CTerm::PlusMod(a, b) => {
                let (x, y) = (self.term(a)?, self.term(b)?);
                match (x.s_value(), y.s_value()) {
                    (Some(sx), Some(sy)) => {
                        let as_res = |s: u32| MultRes::pos(ring, 0, s).unwrap_or_else(|| MultRes::zero(ring));
                        RVal::Known(plus_mod(&as_res(sx), &as_res(sy))?)
                    }
                    _ => RVal::Unknown { s_zero: false },
                }
            }
            CTerm::Pow(a, e) => match (self.term(a)?, *e) {
                (_, 0) => RVal::Known(MultRes::one(ring)),
                (RVal::Known(x), e) => RVal::Known(mr_pow(&x, e)),
                (u, _) => u,
            },
            CTerm::Mres(poly) => {
                if poly.is_zero() {
                    return Ok(RVal::Known(MultRes::zero(ring)));
                }
                let (_, d, threshold) = self.ring_value(poly)?;
                if d.valuation() < threshold {
                    RVal::Known(mres(&d)?)
                } else if threshold >= ring.precision() {
                    RVal::Known(MultRes::zero(ring))
                } else {
                    RVal::Unknown { s_zero: threshold >= 1 }
                }
            }
        })
    }

    fn res_atom(&self, a: &CTerm, b: &CTerm) -> Result<TruthValue, FormulaError> {
        let (x, y) = (self.term(a)?, self.term(b)?);
        let is_unit = |m: &MultRes| matches!(m.value(), ResidueValue::Pos { val: 0, .. });
        Ok(match (x, y) {
            (RVal::Known(x), RVal::Known(y)) => TruthValue::from_bool(x == y),
            (RVal::Known(k), RVal::Unknown { s_zero: true }) | (RVal::Unknown { s_zero: true }, RVal::Known(k))
                if is_unit(&k) =>
            {
                TruthValue::False
            }
            _ => TruthValue::Unknown,
        })
    }

    fn eval(&mut self, node: &Node) -> Result<TruthValue, FormulaError> {
        Ok(match node {
            Node::RingAtom(p) => self.ring_atom(p)?,
            Node::ResAtom(a, b) => self.res_atom(a, b)?,
            Node::Not(a) => self.eval(a)?.not(),
            Node::And(a, b) => {
                let x = self.eval(a)?;
                if x == TruthValue::False {
                    x
                } else {
                    x.and(self.eval(b)?)
                }
            }
            Node::Or(a, b) => {
                let x = self.eval(a)?;
                if x == TruthValue::True {
                    x
                } else {
                    x.or(self.eval(b)?)
                }
            }
            Node::Implies(a, b) => {
                let x = self.eval(a)?;
                if x == TruthValue::False {
                    TruthValue::True
                } else {
                    x.implies(self.eval(b)?)
                }
            }
            Node::Iff(a, b) => {
                let x = self.eval(a)?;
                x.iff(self.eval(b)?)
            }
            Node::RingBlock { exists, vars, body } => self.ring_block(*exists, vars, body)?,
            Node::ResQuant { exists, var, body, uniform } => {
                let complete = match uniform {
                    Some(needs_positive) => !needs_positive || self.cfg.val_cap >= 1,
                    None => false,
                };
                let (hit, miss) = if *exists {
                    (TruthValue::True, TruthValue::False)
                } else {
                    (TruthValue::False, TruthValue::True)
                };
                let mut unknown = false;
                for value in MultRes::enumerate(self.cfg.ring, self.cfg.val_cap) {
                    self.env.push(Binding::Res(var.clone(), value));
                    let r = self.eval(body);
                    self.env.pop();
                    match r? {
                        v if v == hit => return Ok(hit),
                        TruthValue::Unknown => unknown = true,
                        _ => {}
                    }
                }
                if complete && !unknown {
                    miss
                } else {
                    TruthValue::Unknown
                }
            }
        })
    }

    fn ring_block(&mut self, exists: bool, vars: &[String], body: &Node) -> Result<TruthValue, FormulaError> {
        let k = self.cfg.ring_depth;
        let (hit, miss) =
            if exists { (TruthValue::True, TruthValue::False) } else { (TruthValue::False, TruthValue::True) };
        let certifiable = match body {
            Node::RingAtom(p) if exists && self.cfg.certify => Some(p),
            _ => None,
        };
        let nreps = self.reps.len();
        let mut idx = vec![0usize; vars.len()];
        let mut unknown = false;
        loop {
            for (v, &i) in vars.iter().zip(&idx) {
                self.env.push(Binding::Ring(v.clone(), self.reps[i].clone(), k));
            }
            let mut r = self.eval(body);
            if let (Ok(TruthValue::Unknown), Some(poly)) = (&r, certifiable) {
                r = self.certify(vars, poly).map(|ok| if ok { TruthValue::True } else { TruthValue::Unknown });
            }
            self.env.truncate(self.env.len() - vars.len());
            match r? {
                v if v == hit => return Ok(hit),
                TruthValue::Unknown => unknown = true,
                _ => {}
            }
            // Last variable varies fastest.
            let mut pos = vars.len();
            loop {
                if pos == 0 {
                    return Ok(if unknown { TruthValue::Unknown } else { miss });
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < nreps {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    /// Tries to lift the current tuple of a block to an exact root of `poly`
    /// along one block coordinate with a unit partial derivative.
    fn certify(&mut self, vars: &[String], poly: &Polynomial) -> Result<bool, FormulaError> {
        let (point, _, _) = self.ring_value(poly)?;
        let ring = self.cfg.ring;
        for (bi, v) in vars.iter().enumerate() {
            // Only the innermost binding of a repeated name is visible.
            if vars[bi + 1..].contains(v) {
                continue;
            }
            let Some(i) = poly.vars().iter().position(|w| w == v) else { continue };
            if !poly.derivative(i).eval_in(ring, &point)?.is_unit() {
                continue;
            }
            let base = point.iter().map(|x| Some(x.clone())).collect();
            let sys = PolynomialSystem::sliced(vec![poly.clone()], base, vec![i], ring)?;
            if let Ok(trace) = lift(&sys, &[point[i].clone()]) {
                let k = self.cfg.ring_depth;
                let residues =
                    vars.iter().map(|w| self.ring_var(w).map(|(x, _)| x.clone())).collect::<Result<Vec<_>, _>>()?;
                self.certificates.push(Certificate {
                    variables: vars.to_vec(),
                    residues,
                    depth: k,
                    coordinate: v.clone(),
                    root: trace.root[0].clone(),
                });
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn class_representatives(ring: RingSpec, k: u32) -> Vec<LocalElement> {
    let p = ring.p() as u64;
    let count = p.pow(k);
    (0..count)
        .map(|mut i| {
            let digits: Vec<u64> = (0..k)
                .map(|_| {
                    let d = i % p;
                    i /= p;
                    d
                })
                .collect();
            LocalElement::from_digits(ring, &digits).expect("digits below p")
        })
        .collect()
}

fn bind_assignment(phi: &Formula, assignment: &Assignment, cfg: &EvalConfig) -> Result<Vec<Binding>, FormulaError> {
    let mut env = Vec::new();
    for (sort, name) in phi.free_variables() {
        let unbound = || FormulaError::UnboundVariable { sort, name: name.clone() };
        match sort {
            Sort::Ring => {
                let x = assignment.ring(&name).ok_or_else(unbound)?;
                if x.ring() != cfg.ring {
                    return Err(FormulaError::AssignmentMismatch(format!(
                        "`{name}` lives in {}, evaluating over {}",
                        x.ring(),
                        cfg.ring
                    )));
                }
                env.push(Binding::Ring(name.clone(), x.clone(), cfg.ring.precision()));
            }
            Sort::Residue => {
                let m = assignment.residue(&name).ok_or_else(unbound)?;
                if m.ring() != cfg.ring {
                    return Err(FormulaError::AssignmentMismatch(format!(
                        "`%{name}` lives in MR of {}, evaluating over {}",
                        m.ring(),
                        cfg.ring
                    )));
                }
                env.push(Binding::Res(name.clone(), *m));
            }
        }
    }
    Ok(env)
}

pub fn evaluate_traced(phi: &Formula, assignment: &Assignment, cfg: &EvalConfig) -> Result<Evaluation, FormulaError> {
    cfg.validate()?;
    let env = bind_assignment(phi, assignment, cfg)?;
    let node = compile(phi);
    let mut ev = Evaluator { cfg, env, reps: class_representatives(cfg.ring, cfg.ring_depth), certificates: Vec::new() };
    let value = ev.eval(&node)?;
    Ok(Evaluation { value, certificates: ev.certificates })
}

pub fn evaluate(phi: &Formula, assignment: &Assignment, cfg: &EvalConfig) -> Result<TruthValue, FormulaError> {
    Ok(evaluate_traced(phi, assignment, cfg)?.value)
}

/// Evaluates a sentence over `Z_p` and `F_p[[t]]` with the same depth,
/// valuation cap and precision as `template`.
pub fn transfer_check(phi: &Formula, p: u32, template: &EvalConfig) -> Result<TransferResult, FormulaError> {
    if let Some((sort, name)) = phi.free_variables().into_iter().next() {
        return Err(FormulaError::UnboundVariable { sort, name });
    }
    let n = template.ring.precision();
    let zp_cfg = template.with_ring(RingSpec::padic(p as u64, n)?);
    let fpt_cfg = template.with_ring(RingSpec::power_series(p as u64, n)?);
    let empty = Assignment::new();
    let zp = evaluate(phi, &empty, &zp_cfg)?;
    let fpt = evaluate(phi, &empty, &fpt_cfg)?;
    let agree = match (zp.as_bool(), fpt.as_bool()) {
        (Some(a), Some(b)) => Some(a == b),
        _ => None,
    };
    Ok(TransferResult { zp, fpt, agree })
}
