//! Text syntax for formulas.
//!
//! ```text
//! formula    := ("exists" | "forall") var "." formula | iff
//! iff        := implies ("<->" implies)*
//! implies    := or ("->" implies)?
//! or         := and ("or" and)*
//! and        := unary ("and" unary)*
//! unary      := "not" unary | quantified | "(" formula ")" | term "=" term
//! term       := product (("+" | "-" | "+mod") product)*
//! product    := signed ("*" signed)*
//! signed     := "-" signed | power
//! power      := primary ("^" integer)?
//! primary    := var | %var | integer | "mres" "(" term ")" | "(" term ")"
//! ```
//!
//! Ring variables match `[a-z][a-z0-9]*`, residue variables carry a `%`
//! prefix. The literals `0` and `1` belong to both sorts; `%0` and `%1`
//! force the residue sort. Sorts are inferred per atom, defaulting to the
//! ring sort when both sides are sort-neutral.

use super::ast::{Formula, ResTerm, RingTerm, Sort};
use super::FormulaError;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    ResVar(String),
    ResLit(bool),
    Int(u128),
    LParen,
    RParen,
    Dot,
    Eq,
    Plus,
    PlusMod,
    Minus,
    Star,
    Caret,
    Arrow,
    DArrow,
    And,
    Or,
    Not,
    Exists,
    Forall,
    Mres,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::ResVar(s) => format!("residue variable `%{s}`"),
            Tok::ResLit(b) => format!("`%{}`", u8::from(*b)),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::End => "end of input".into(),
            other => format!("`{}`", symbol(other)),
        }
    }
}

fn symbol(t: &Tok) -> &'static str {
    match t {
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::Dot => ".",
        Tok::Eq => "=",
        Tok::Plus => "+",
        Tok::PlusMod => "+mod",
        Tok::Minus => "-",
        Tok::Star => "*",
        Tok::Caret => "^",
        Tok::Arrow => "->",
        Tok::DArrow => "<->",
        Tok::And => "and",
        Tok::Or => "or",
        Tok::Not => "not",
        Tok::Exists => "exists",
        Tok::Forall => "forall",
        Tok::Mres => "mres",
        _ => "?",
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_lowercase()
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_lowercase() || c.is_ascii_digit()
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, FormulaError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let at = |i: usize| chars.get(i).map(|&(_, c)| c);
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let word = |mut j: usize| {
            let start = j;
            while at(j).is_some_and(is_ident_char) {
                j += 1;
            }
            (chars[start..j].iter().map(|&(_, c)| c).collect::<String>(), j)
        };
        let (tok, next) = match c {
            '(' => (Tok::LParen, i + 1),
            ')' => (Tok::RParen, i + 1),
            '.' => (Tok::Dot, i + 1),
            '=' => (Tok::Eq, i + 1),
            '*' => (Tok::Star, i + 1),
            '^' => (Tok::Caret, i + 1),
            '-' if at(i + 1) == Some('>') => (Tok::Arrow, i + 2),
            '-' => (Tok::Minus, i + 1),
            '<' if at(i + 1) == Some('-') && at(i + 2) == Some('>') => (Tok::DArrow, i + 3),
            '+' => {
                let (w, j) = word(i + 1);
                if w == "mod" {
                    (Tok::PlusMod, j)
                } else {
                    (Tok::Plus, i + 1)
                }
            }
            '%' => match at(i + 1) {
                Some('0') if !at(i + 2).is_some_and(is_ident_char) => (Tok::ResLit(false), i + 2),
                Some('1') if !at(i + 2).is_some_and(is_ident_char) => (Tok::ResLit(true), i + 2),
                Some(c) if is_ident_start(c) => {
                    let (w, j) = word(i + 1);
                    (Tok::ResVar(w), j)
                }
                _ => return Err(FormulaError::syntax(pos, "expected a residue variable name after `%`")),
            },
            c if c.is_ascii_digit() => {
                let mut j = i;
                while at(j).is_some_and(|c| c.is_ascii_digit()) {
                    j += 1;
                }
                let digits: String = chars[i..j].iter().map(|&(_, c)| c).collect();
                let n = digits
                    .parse::<u128>()
                    .map_err(|_| FormulaError::syntax(pos, "integer literal too large"))?;
                (Tok::Int(n), j)
            }
            c if is_ident_start(c) => {
                let (w, j) = word(i);
                let tok = match w.as_str() {
                    "and" => Tok::And,
                    "or" => Tok::Or,
                    "not" => Tok::Not,
                    "exists" => Tok::Exists,
                    "forall" => Tok::Forall,
                    "mres" => Tok::Mres,
                    _ => Tok::Ident(w),
                };
                (tok, j)
            }
            other => return Err(FormulaError::syntax(pos, format!("unexpected character `{other}`"))),
        };
        out.push((tok, pos));
        i = next;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

/// Untyped term, resolved to a sort once the whole atom is known.
#[derive(Debug, Clone)]
enum Raw {
    RingVar(String),
    ResVar(String),
    ResLit(bool),
    Int(i128),
    Add(Box<Raw>, Box<Raw>),
    Sub(Box<Raw>, Box<Raw>),
    PlusMod(Box<Raw>, Box<Raw>),
    Mul(Box<Raw>, Box<Raw>),
    Neg(Box<Raw>),
    Pow(Box<Raw>, u32),
    Mres(Box<Raw>, usize),
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

pub fn parse(text: &str) -> Result<Formula, FormulaError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let f = p.formula()?;
    p.expect(Tok::End)?;
    Ok(f)
}

/// Parses a ring-sort term such as `x^2 - 7`.
pub fn parse_ring_term(text: &str) -> Result<RingTerm, FormulaError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let start = p.offset();
    let raw = p.term()?;
    p.expect(Tok::End)?;
    to_ring(&raw, start)
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), FormulaError> {
        if self.eat(&t) {
            Ok(())
        } else {
            let what = if t == Tok::End { "end of input".to_string() } else { format!("`{}`", symbol(&t)) };
            Err(FormulaError::syntax(self.offset(), format!("expected {what}, found {}", self.peek().describe())))
        }
    }

    fn formula(&mut self) -> Result<Formula, FormulaError> {
        if matches!(self.peek(), Tok::Exists | Tok::Forall) {
            return self.quantified();
        }
        self.iff()
    }

    fn quantified(&mut self) -> Result<Formula, FormulaError> {
        let exists = self.bump() == Tok::Exists;
        let (sort, name) = match self.bump() {
            Tok::Ident(v) => (Sort::Ring, v),
            Tok::ResVar(v) => (Sort::Residue, v),
            other => {
                return Err(FormulaError::syntax(
                    self.toks[self.pos.saturating_sub(1)].1,
                    format!("expected a variable after the quantifier, found {}", other.describe()),
                ))
            }
        };
        self.expect(Tok::Dot)?;
        let body = Box::new(self.formula()?);
        Ok(if exists { Formula::Exists(sort, name, body) } else { Formula::Forall(sort, name, body) })
    }

    fn iff(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.implies()?;
        while self.eat(&Tok::DArrow) {
            let rhs = self.implies()?;
            lhs = Formula::Iff(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.or()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implies()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::Or) {
            let rhs = self.and()?;
            lhs = Formula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::And) {
            let rhs = self.unary()?;
            lhs = Formula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            Tok::Exists | Tok::Forall => self.quantified(),
            Tok::LParen => {
                // Either a parenthesized formula or an atom whose left term
                // starts with a parenthesis.
                let save = self.pos;
                self.bump();
                let attempt = self.formula().and_then(|f| self.expect(Tok::RParen).map(|_| f));
                match attempt {
                    Ok(f) if !self.continues_term() => Ok(f),
                    _ => {
                        self.pos = save;
                        self.atom()
                    }
                }
            }
            _ => self.atom(),
        }
    }

    fn continues_term(&self) -> bool {
        matches!(self.peek(), Tok::Eq | Tok::Plus | Tok::PlusMod | Tok::Minus | Tok::Star | Tok::Caret)
    }

    fn atom(&mut self) -> Result<Formula, FormulaError> {
        let start = self.offset();
        let lhs = self.term()?;
        let eq_pos = self.offset();
        self.expect(Tok::Eq)?;
        let rhs_start = self.offset();
        let rhs = self.term()?;
        let sl = infer(&lhs, start)?;
        let sr = infer(&rhs, rhs_start)?;
        let sort = match (sl, sr) {
            (Some(a), Some(b)) if a != b => {
                return Err(FormulaError::sort(eq_pos, format!("equality between a {a} term and a {b} term")))
            }
            (a, b) => a.or(b).unwrap_or(Sort::Ring),
        };
        Ok(match sort {
            Sort::Ring => Formula::RingEq(to_ring(&lhs, start)?, to_ring(&rhs, rhs_start)?),
            Sort::Residue => Formula::ResEq(to_res(&lhs, start)?, to_res(&rhs, rhs_start)?),
        })
    }

    fn term(&mut self) -> Result<Raw, FormulaError> {
        let mut lhs = self.product()?;
        loop {
            let op = self.peek().clone();
            match op {
                Tok::Plus | Tok::Minus | Tok::PlusMod => {
                    self.bump();
                    let rhs = Box::new(self.product()?);
                    let l = Box::new(lhs);
                    lhs = match op {
                        Tok::Plus => Raw::Add(l, rhs),
                        Tok::Minus => Raw::Sub(l, rhs),
                        _ => Raw::PlusMod(l, rhs),
                    };
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn product(&mut self) -> Result<Raw, FormulaError> {
        let mut lhs = self.signed()?;
        while self.eat(&Tok::Star) {
            let rhs = self.signed()?;
            lhs = Raw::Mul(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn signed(&mut self) -> Result<Raw, FormulaError> {
        if !self.eat(&Tok::Minus) {
            return self.power();
        }
        // `-7` is a negative literal unless it is raised to a power.
        if let Tok::Int(n) = *self.peek() {
            if self.toks[self.pos + 1].0 != Tok::Caret {
                let pos = self.offset();
                self.bump();
                let v = i128::try_from(n).map_err(|_| FormulaError::syntax(pos, "integer literal too large"))?;
                return Ok(Raw::Int(-v));
            }
        }
        Ok(Raw::Neg(Box::new(self.signed()?)))
    }

    fn power(&mut self) -> Result<Raw, FormulaError> {
        let base = self.primary()?;
        if self.eat(&Tok::Caret) {
            let pos = self.offset();
            return match self.bump() {
                Tok::Int(e) => {
                    let e = u32::try_from(e).map_err(|_| FormulaError::syntax(pos, "exponent too large"))?;
                    Ok(Raw::Pow(Box::new(base), e))
                }
                other => Err(FormulaError::syntax(pos, format!("expected an exponent, found {}", other.describe()))),
            };
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Raw, FormulaError> {
        let pos = self.offset();
        match self.bump() {
            Tok::Ident(v) => Ok(Raw::RingVar(v)),
            Tok::ResVar(v) => Ok(Raw::ResVar(v)),
            Tok::ResLit(b) => Ok(Raw::ResLit(b)),
            Tok::Int(n) => {
                let v = i128::try_from(n).map_err(|_| FormulaError::syntax(pos, "integer literal too large"))?;
                Ok(Raw::Int(v))
            }
            Tok::Mres => {
                self.expect(Tok::LParen)?;
                let arg_pos = self.offset();
                let arg = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(Raw::Mres(Box::new(arg), arg_pos))
            }
            Tok::LParen => {
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            other => Err(FormulaError::syntax(pos, format!("expected a term, found {}", other.describe()))),
        }
    }
}

fn join(a: Option<Sort>, b: Option<Sort>, pos: usize) -> Result<Option<Sort>, FormulaError> {
    match (a, b) {
        (Some(x), Some(y)) if x != y => Err(FormulaError::sort(pos, format!("cannot combine a {x} term with a {y} term"))),
        (x, y) => Ok(x.or(y)),
    }
}

/// The sort forced by a term, or `None` if it is built from `0`, `1`, `*`
/// and `^` alone.
fn infer(t: &Raw, pos: usize) -> Result<Option<Sort>, FormulaError> {
    let need = |t: &Raw, s: Sort| -> Result<(), FormulaError> {
        match infer(t, pos)? {
            Some(found) if found != s => Err(FormulaError::sort(pos, format!("expected a {s} term, found a {found} term"))),
            _ => Ok(()),
        }
    };
    Ok(match t {
        Raw::RingVar(_) => Some(Sort::Ring),
        Raw::ResVar(_) | Raw::ResLit(_) => Some(Sort::Residue),
        Raw::Int(0) | Raw::Int(1) => None,
        Raw::Int(_) => Some(Sort::Ring),
        Raw::Add(a, b) | Raw::Sub(a, b) => {
            need(a, Sort::Ring)?;
            need(b, Sort::Ring)?;
            Some(Sort::Ring)
        }
        Raw::Neg(a) => {
            need(a, Sort::Ring)?;
            Some(Sort::Ring)
        }
        Raw::PlusMod(a, b) => {
            need(a, Sort::Residue)?;
            need(b, Sort::Residue)?;
            Some(Sort::Residue)
        }
        Raw::Mul(a, b) => join(infer(a, pos)?, infer(b, pos)?, pos)?,
        Raw::Pow(a, _) => infer(a, pos)?,
        Raw::Mres(arg, arg_pos) => {
            if infer(arg, *arg_pos)? == Some(Sort::Residue) {
                return Err(FormulaError::sort(*arg_pos, "mres expects a ring-sort argument"));
            }
            Some(Sort::Residue)
        }
    })
}

fn to_ring(t: &Raw, pos: usize) -> Result<RingTerm, FormulaError> {
    let b = |t: &Raw| to_ring(t, pos).map(Box::new);
    Ok(match t {
        Raw::RingVar(v) => RingTerm::Var(v.clone()),
        Raw::Int(n) => RingTerm::Int(*n),
        Raw::Add(x, y) => RingTerm::Add(b(x)?, b(y)?),
        Raw::Sub(x, y) => RingTerm::Sub(b(x)?, b(y)?),
        Raw::Mul(x, y) => RingTerm::Mul(b(x)?, b(y)?),
        Raw::Neg(x) => RingTerm::Neg(b(x)?),
        Raw::Pow(x, e) => RingTerm::Pow(b(x)?, *e),
        Raw::ResVar(_) | Raw::ResLit(_) | Raw::PlusMod(..) | Raw::Mres(..) => {
            return Err(FormulaError::sort(pos, "residue-sort syntax inside a ring term"))
        }
    })
}

fn to_res(t: &Raw, pos: usize) -> Result<ResTerm, FormulaError> {
    let b = |t: &Raw| to_res(t, pos).map(Box::new);
    Ok(match t {
        Raw::ResVar(v) => ResTerm::Var(v.clone()),
        Raw::ResLit(false) | Raw::Int(0) => ResTerm::Zero,
        Raw::ResLit(true) | Raw::Int(1) => ResTerm::One,
        Raw::Mul(x, y) => ResTerm::Mul(b(x)?, b(y)?),
        Raw::PlusMod(x, y) => ResTerm::PlusMod(b(x)?, b(y)?),
        Raw::Pow(x, e) => ResTerm::Pow(b(x)?, *e),
        Raw::Mres(arg, arg_pos) => ResTerm::Mres(to_ring(arg, *arg_pos)?),
        Raw::RingVar(_) | Raw::Int(_) | Raw::Add(..) | Raw::Sub(..) | Raw::Neg(_) => {
            return Err(FormulaError::sort(pos, "ring-sort syntax inside a residue term; wrap it in mres(...)"))
        }
    })
}
