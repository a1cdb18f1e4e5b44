use std::fmt;

use crate::local_arith::Polynomial;

/// Sort of a variable or term: ring elements or multiplicative residues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sort {
    Ring,
    Residue,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Ring => write!(f, "ring"),
            Sort::Residue => write!(f, "residue"),
        }
    }
}

/// Terms of the first sort. Integer literals abbreviate `±(1 + ... + 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RingTerm {
    Var(String),
    Int(i128),
    Add(Box<RingTerm>, Box<RingTerm>),
    Sub(Box<RingTerm>, Box<RingTerm>),
    Mul(Box<RingTerm>, Box<RingTerm>),
    Neg(Box<RingTerm>),
    Pow(Box<RingTerm>, u32),
}

/// Terms of the second sort. Variable names are stored without the `%`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ResTerm {
    Var(String),
    Zero,
    One,
    Mul(Box<ResTerm>, Box<ResTerm>),
    PlusMod(Box<ResTerm>, Box<ResTerm>),
    Pow(Box<ResTerm>, u32),
    Mres(RingTerm),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    RingEq(RingTerm, RingTerm),
    ResEq(ResTerm, ResTerm),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(Sort, String, Box<Formula>),
    Forall(Sort, String, Box<Formula>),
}

impl RingTerm {
    pub fn var(name: &str) -> Self {
        RingTerm::Var(name.to_string())
    }

    /// Variables in order of first occurrence.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            RingTerm::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            RingTerm::Int(_) => {}
            RingTerm::Add(a, b) | RingTerm::Sub(a, b) | RingTerm::Mul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            RingTerm::Neg(a) | RingTerm::Pow(a, _) => a.collect_vars(out),
        }
    }

    /// Expands into a polynomial over `vars`, which must contain every
    /// variable of the term.
    pub fn to_polynomial(&self, vars: &[String]) -> Polynomial {
        let vars_v = vars.to_vec();
        match self {
            RingTerm::Var(v) => {
                let idx = vars.iter().position(|w| w == v).expect("variable list covers the term");
                Polynomial::var(vars_v, idx)
            }
            RingTerm::Int(n) => Polynomial::constant(vars_v, *n),
            RingTerm::Add(a, b) => &a.to_polynomial(vars) + &b.to_polynomial(vars),
            RingTerm::Sub(a, b) => &a.to_polynomial(vars) - &b.to_polynomial(vars),
            RingTerm::Mul(a, b) => &a.to_polynomial(vars) * &b.to_polynomial(vars),
            RingTerm::Neg(a) => -&a.to_polynomial(vars),
            RingTerm::Pow(a, e) => a.to_polynomial(vars).pow(*e),
        }
    }
}

impl ResTerm {
    pub fn var(name: &str) -> Self {
        ResTerm::Var(name.trim_start_matches('%').to_string())
    }

    pub fn mul(a: ResTerm, b: ResTerm) -> Self {
        ResTerm::Mul(Box::new(a), Box::new(b))
    }

    pub fn plus_mod(a: ResTerm, b: ResTerm) -> Self {
        ResTerm::PlusMod(Box::new(a), Box::new(b))
    }
}

impl Formula {
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn exists(sort: Sort, var: &str, body: Formula) -> Self {
        Formula::Exists(sort, var.to_string(), Box::new(body))
    }

    pub fn forall(sort: Sort, var: &str, body: Formula) -> Self {
        Formula::Forall(sort, var.to_string(), Box::new(body))
    }

    /// Free variables per sort, in order of first occurrence.
    pub fn free_variables(&self) -> Vec<(Sort, String)> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_variables().is_empty()
    }

    fn collect_free(&self, bound: &mut Vec<(Sort, String)>, out: &mut Vec<(Sort, String)>) {
        let mut push = |s: Sort, v: &String, bound: &Vec<(Sort, String)>| {
            let key = (s, v.clone());
            if !bound.contains(&key) && !out.contains(&key) {
                out.push(key);
            }
        };
        match self {
            Formula::RingEq(a, b) => {
                for v in a.variables().iter().chain(b.variables().iter()) {
                    push(Sort::Ring, v, bound);
                }
            }
            Formula::ResEq(a, b) => {
                let mut vars = Vec::new();
                res_vars(a, &mut vars);
                res_vars(b, &mut vars);
                for (s, v) in &vars {
                    push(*s, v, bound);
                }
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(s, v, body) | Formula::Forall(s, v, body) => {
                bound.push((*s, v.clone()));
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// True when the formula uses no residue-sort syntax at all.
    pub fn is_pure_rings(&self) -> bool {
        match self {
            Formula::RingEq(..) => true,
            Formula::ResEq(..) => false,
            Formula::Not(a) => a.is_pure_rings(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.is_pure_rings() && b.is_pure_rings()
            }
            Formula::Exists(s, _, body) | Formula::Forall(s, _, body) => *s == Sort::Ring && body.is_pure_rings(),
        }
    }

    /// True when the formula uses no ring-sort syntax (pure `L_MR`).
    pub fn is_pure_residue(&self) -> bool {
        match self {
            Formula::RingEq(..) => false,
            Formula::ResEq(a, b) => !has_mres(a) && !has_mres(b),
            Formula::Not(a) => a.is_pure_residue(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.is_pure_residue() && b.is_pure_residue()
            }
            Formula::Exists(s, _, body) | Formula::Forall(s, _, body) => {
                *s == Sort::Residue && body.is_pure_residue()
            }
        }
    }
}

fn has_mres(t: &ResTerm) -> bool {
    match t {
        ResTerm::Mres(_) => true,
        ResTerm::Var(_) | ResTerm::Zero | ResTerm::One => false,
        ResTerm::Mul(a, b) | ResTerm::PlusMod(a, b) => has_mres(a) || has_mres(b),
        ResTerm::Pow(a, _) => has_mres(a),
    }
}

fn res_vars(t: &ResTerm, out: &mut Vec<(Sort, String)>) {
    match t {
        ResTerm::Var(v) => {
            let key = (Sort::Residue, v.clone());
            if !out.contains(&key) {
                out.push(key);
            }
        }
        ResTerm::Zero | ResTerm::One => {}
        ResTerm::Mul(a, b) | ResTerm::PlusMod(a, b) => {
            res_vars(a, out);
            res_vars(b, out);
        }
        ResTerm::Pow(a, _) => res_vars(a, out),
        ResTerm::Mres(r) => {
            for v in r.variables() {
                let key = (Sort::Ring, v);
                if !out.contains(&key) {
                    out.push(key);
                }
            }
        }
    }
}

// Printing. Binding strength, loosest first: sums (+, -, +mod), products,
// unary minus, powers, atoms. Binary operators associate to the left, so a
// right operand of equal strength is parenthesized.

fn ring_prec(t: &RingTerm) -> u8 {
    match t {
        RingTerm::Add(..) | RingTerm::Sub(..) => 1,
        RingTerm::Mul(..) => 2,
        RingTerm::Neg(_) => 3,
        RingTerm::Int(n) if *n < 0 => 3,
        RingTerm::Pow(..) => 4,
        RingTerm::Var(_) | RingTerm::Int(_) => 5,
    }
}

fn write_ring(f: &mut fmt::Formatter<'_>, t: &RingTerm, min: u8) -> fmt::Result {
    let paren = ring_prec(t) < min;
    if paren {
        write!(f, "(")?;
    }
    match t {
        RingTerm::Var(v) => write!(f, "{v}")?,
        RingTerm::Int(n) => write!(f, "{n}")?,
        RingTerm::Add(a, b) => {
            write_ring(f, a, 1)?;
            write!(f, " + ")?;
            write_ring(f, b, 2)?;
        }
        RingTerm::Sub(a, b) => {
            write_ring(f, a, 1)?;
            write!(f, " - ")?;
            write_ring(f, b, 2)?;
        }
        RingTerm::Mul(a, b) => {
            write_ring(f, a, 2)?;
            write!(f, "*")?;
            write_ring(f, b, 3)?;
        }
        RingTerm::Neg(a) => {
            write!(f, "-")?;
            // A bare literal after '-' would read back as a negative literal.
            let min = if matches!(**a, RingTerm::Int(_)) { 6 } else { 3 };
            write_ring(f, a, min)?;
        }
        RingTerm::Pow(a, e) => {
            write_ring(f, a, 5)?;
            write!(f, "^{e}")?;
        }
    }
    if paren {
        write!(f, ")")?;
    }
    Ok(())
}

fn res_prec(t: &ResTerm) -> u8 {
    match t {
        ResTerm::PlusMod(..) => 1,
        ResTerm::Mul(..) => 2,
        ResTerm::Pow(..) => 4,
        _ => 5,
    }
}

// Built from 0, 1, * and ^ only, so the sort is not evident from the text.
fn res_neutral(t: &ResTerm) -> bool {
    match t {
        ResTerm::Zero | ResTerm::One => true,
        ResTerm::Mul(a, b) => res_neutral(a) && res_neutral(b),
        ResTerm::Pow(a, _) => res_neutral(a),
        _ => false,
    }
}

fn write_res(f: &mut fmt::Formatter<'_>, t: &ResTerm, min: u8) -> fmt::Result {
    write_res_typed(f, t, min, false)
}

fn write_res_typed(f: &mut fmt::Formatter<'_>, t: &ResTerm, min: u8, typed: bool) -> fmt::Result {
    let paren = res_prec(t) < min;
    if paren {
        write!(f, "(")?;
    }
    match t {
        ResTerm::Var(v) => write!(f, "%{v}")?,
        ResTerm::Zero => write!(f, "{}0", if typed { "%" } else { "" })?,
        ResTerm::One => write!(f, "{}1", if typed { "%" } else { "" })?,
        ResTerm::Mul(a, b) => {
            write_res_typed(f, a, 2, typed)?;
            write!(f, "*")?;
            write_res_typed(f, b, 3, typed)?;
        }
        ResTerm::PlusMod(a, b) => {
            write_res(f, a, 1)?;
            write!(f, " +mod ")?;
            write_res(f, b, 2)?;
        }
        ResTerm::Pow(a, e) => {
            write_res_typed(f, a, 5, typed)?;
            write!(f, "^{e}")?;
        }
        ResTerm::Mres(r) => write!(f, "mres({r})")?,
    }
    if paren {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for RingTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_ring(f, self, 0)
    }
}

impl fmt::Display for ResTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_res(f, self, 0)
    }
}

// Connectives, loosest first: <-> (left), -> (right), or, and, not.
fn formula_prec(phi: &Formula) -> u8 {
    match phi {
        Formula::Exists(..) | Formula::Forall(..) => 0,
        Formula::Iff(..) => 1,
        Formula::Implies(..) => 2,
        Formula::Or(..) => 3,
        Formula::And(..) => 4,
        Formula::Not(_) => 5,
        Formula::RingEq(..) | Formula::ResEq(..) => 6,
    }
}

fn write_formula(f: &mut fmt::Formatter<'_>, phi: &Formula, min: u8) -> fmt::Result {
    let paren = formula_prec(phi) < min;
    if paren {
        write!(f, "(")?;
    }
    let bin = |f: &mut fmt::Formatter<'_>, a: &Formula, op: &str, b: &Formula, lmin: u8, rmin: u8| {
        write_formula(f, a, lmin)?;
        write!(f, " {op} ")?;
        write_formula(f, b, rmin)
    };
    match phi {
        Formula::RingEq(a, b) => write!(f, "{a} = {b}")?,
        Formula::ResEq(a, b) => {
            let typed = res_neutral(a) && res_neutral(b);
            write_res_typed(f, a, 0, typed)?;
            write!(f, " = ")?;
            write_res_typed(f, b, 0, typed)?;
        }
        Formula::Not(a) => {
            write!(f, "not ")?;
            write_formula(f, a, 5)?;
        }
        Formula::And(a, b) => bin(f, a, "and", b, 4, 5)?,
        Formula::Or(a, b) => bin(f, a, "or", b, 3, 4)?,
        Formula::Implies(a, b) => bin(f, a, "->", b, 3, 2)?,
        Formula::Iff(a, b) => bin(f, a, "<->", b, 1, 2)?,
        Formula::Exists(s, v, body) | Formula::Forall(s, v, body) => {
            let q = if matches!(phi, Formula::Exists(..)) { "exists" } else { "forall" };
            let sigil = if *s == Sort::Residue { "%" } else { "" };
            write!(f, "{q} {sigil}{v}. ")?;
            write_formula(f, body, 0)?;
        }
    }
    if paren {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 0)
    }
}
