//! Translations into the residue sort.

use super::ast::{Formula, ResTerm, RingTerm, Sort};
use super::FormulaError;
use crate::hensel::MonomialChart;
use crate::local_arith::Polynomial;

/// `c` as a residue term built from `1`, `+mod` and products, by doubling.
fn constant(c: u128) -> ResTerm {
    debug_assert!(c >= 1);
    if c == 1 {
        ResTerm::One
    } else if c % 2 == 0 {
        ResTerm::mul(ResTerm::plus_mod(ResTerm::One, ResTerm::One), constant(c / 2))
    } else {
        ResTerm::plus_mod(constant(c - 1), ResTerm::One)
    }
}

fn monomial(coef: u128, exp: &[u32], vars: &[String]) -> ResTerm {
    let mut factors = Vec::new();
    if coef != 1 {
        factors.push(constant(coef));
    }
    for (v, &e) in vars.iter().zip(exp) {
        match e {
            0 => {}
            1 => factors.push(ResTerm::var(v)),
            e => factors.push(ResTerm::Pow(Box::new(ResTerm::var(v)), e)),
        }
    }
    factors.into_iter().reduce(ResTerm::mul).unwrap_or(ResTerm::One)
}

fn sum(terms: Vec<ResTerm>) -> Option<ResTerm> {
    terms.into_iter().reduce(ResTerm::plus_mod)
}

fn s_zero(t: ResTerm) -> Formula {
    Formula::ResEq(ResTerm::plus_mod(t, ResTerm::Zero), ResTerm::Zero)
}

/// Equality of `s_A`-images: `T1 = T2 or (T1 +mod 0 = 0 and T2 +mod 0 = 0)`.
fn s_equal(t1: ResTerm, t2: ResTerm) -> Formula {
    Formula::or(
        Formula::ResEq(t1.clone(), t2.clone()),
        Formula::and(s_zero(t1), s_zero(t2)),
    )
}

/// Residue-sort formula saying `poly = 0` holds in the residue field, with
/// each ring variable read through `s_A` of the residue variable of the
/// same name.
fn translate_zero(poly: &Polynomial) -> Formula {
    let vars = poly.vars();
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (exp, coef) in poly.terms() {
        let t = monomial(coef.unsigned_abs(), exp, vars);
        if coef > 0 {
            pos.push(t);
        } else {
            neg.push(t);
        }
    }
    match (sum(pos), sum(neg)) {
        (None, None) => Formula::ResEq(ResTerm::Zero, ResTerm::Zero),
        (Some(t), None) | (None, Some(t)) => s_zero(t),
        (Some(a), Some(b)) => s_equal(a, b),
    }
}

fn atom(a: &RingTerm, b: &RingTerm) -> Formula {
    let mut vars = a.variables();
    for v in b.variables() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    translate_zero(&(&a.to_polynomial(&vars) - &b.to_polynomial(&vars)))
}

/// Rewrites a ring-language formula, read over the residue field `A/m`,
/// into a residue-sort formula over `MR(A)`. Ring variable `x` becomes
/// `%x`; field quantifiers become residue quantifiers.
pub fn interpret_residue_field(phi: &Formula) -> Result<Formula, FormulaError> {
    if !phi.is_pure_rings() {
        return Err(FormulaError::NotPureRings(phi.to_string()));
    }
    Ok(rewrite(phi))
}

fn rewrite(phi: &Formula) -> Formula {
    let b = |f: &Formula| Box::new(rewrite(f));
    match phi {
        Formula::RingEq(x, y) => atom(x, y),
        Formula::ResEq(..) => unreachable!("checked by is_pure_rings"),
        Formula::Not(a) => Formula::Not(b(a)),
        Formula::And(x, y) => Formula::And(b(x), b(y)),
        Formula::Or(x, y) => Formula::Or(b(x), b(y)),
        Formula::Implies(x, y) => Formula::Implies(b(x), b(y)),
        Formula::Iff(x, y) => Formula::Iff(b(x), b(y)),
        Formula::Exists(_, v, body) => Formula::Exists(Sort::Residue, v.clone(), b(body)),
        Formula::Forall(_, v, body) => Formula::Forall(Sort::Residue, v.clone(), b(body)),
    }
}

/// `poly` as a ring term, with its variables renamed to `names`.
pub fn polynomial_to_term(poly: &Polynomial, names: &[String]) -> RingTerm {
    assert_eq!(names.len(), poly.nvars(), "one name per variable");
    let mut terms = Vec::new();
    for (exp, coef) in poly.terms() {
        let mut factors = Vec::new();
        for (v, &e) in names.iter().zip(exp) {
            match e {
                0 => {}
                1 => factors.push(RingTerm::var(v)),
                e => factors.push(RingTerm::Pow(Box::new(RingTerm::var(v)), e)),
            }
        }
        let mono = factors.into_iter().reduce(|a, b| RingTerm::Mul(Box::new(a), Box::new(b)));
        terms.push(match (mono, coef) {
            (None, c) => RingTerm::Int(c),
            (Some(m), 1) => m,
            (Some(m), -1) => RingTerm::Neg(Box::new(m)),
            (Some(m), c) => RingTerm::Mul(Box::new(RingTerm::Int(c)), Box::new(m)),
        });
    }
    terms
        .into_iter()
        .reduce(|a, b| RingTerm::Add(Box::new(a), Box::new(b)))
        .unwrap_or(RingTerm::Int(0))
}

/// Residue-sort formula in free variables `%l1..%lm` that holds when
/// `(l1, ..., lm)` is the residue tuple of some point in the image of the
/// chart, with `%c1..%cn` standing for source residues and `%w1..%wm` for
/// the unit factors.
pub fn realizability_formula(chart: &MonomialChart) -> Formula {
    let n = chart.source_dim();
    let m = chart.target_dim();
    let c: Vec<String> = (1..=n).map(|i| format!("c{i}")).collect();
    let mut conjuncts = Vec::new();
    for j in 0..m {
        let w = format!("w{}", j + 1);
        let u = polynomial_to_term(&chart.units()[j], &c);
        conjuncts.push(rewrite(&Formula::RingEq(RingTerm::var(&w), u)));
        conjuncts.push(Formula::not(s_zero(ResTerm::var(&w))));
        let mut image = ResTerm::var(&w);
        for (i, ci) in c.iter().enumerate() {
            match chart.exponent(i, j) {
                0 => {}
                1 => image = ResTerm::mul(image, ResTerm::var(ci)),
                e => image = ResTerm::mul(image, ResTerm::Pow(Box::new(ResTerm::var(ci)), e)),
            }
        }
        conjuncts.push(Formula::ResEq(image, ResTerm::var(&format!("l{}", j + 1))));
    }
    let mut body = conjuncts.into_iter().reduce(Formula::and).expect("charts have a target coordinate");
    for j in (1..=m).rev() {
        body = Formula::exists(Sort::Residue, &format!("w{j}"), body);
    }
    for ci in c.iter().rev() {
        body = Formula::exists(Sort::Residue, ci, body);
    }
    body
}
