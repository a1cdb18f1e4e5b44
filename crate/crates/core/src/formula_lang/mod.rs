//! Two-sorted first-order language: ring terms over `A` and residue terms
//! over `MR(A)`, with parsing, printing, evaluation and rewriting.

mod ast;
mod eval;
mod parser;
mod rewrite;

use thiserror::Error;

use crate::hensel::HenselError;
use crate::local_arith::ArithError;
use crate::residue_monoid::ResidueError;

pub use ast::{Formula, ResTerm, RingTerm, Sort};
pub use eval::{
    evaluate, evaluate_traced, transfer_check, Assignment, Certificate, EvalConfig, Evaluation, TransferResult,
    TruthValue,
};
pub use parser::{parse, parse_ring_term};
pub use rewrite::{interpret_residue_field, polynomial_to_term, realizability_formula};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("syntax error at offset {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("sort error at offset {pos}: {message}")]
    Sort { pos: usize, message: String },
    #[error("unbound {sort} variable `{name}`")]
    UnboundVariable { sort: Sort, name: String },
    #[error("assignment mismatch: {0}")]
    AssignmentMismatch(String),
    #[error("formula is not in the ring language: {0}")]
    NotPureRings(String),
    #[error("invalid evaluation settings: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Residue(#[from] ResidueError),
    #[error(transparent)]
    Hensel(#[from] HenselError),
}

impl FormulaError {
    pub(crate) fn syntax(pos: usize, message: impl Into<String>) -> Self {
        FormulaError::Syntax { pos, message: message.into() }
    }

    pub(crate) fn sort(pos: usize, message: impl Into<String>) -> Self {
        FormulaError::Sort { pos, message: message.into() }
    }
}

impl std::str::FromStr for Formula {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}
