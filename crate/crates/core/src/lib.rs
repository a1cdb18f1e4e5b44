//! Computational tools for the henselian valuation rings `Z_p` and
//! `F_p[[t]]`: truncated arithmetic, multiplicative residues, classical and
//! logarithmic Hensel lifting, a bounded evaluator for ring and residue
//! formulas, and desk-scale transfer experiments.

pub mod experiments;
pub mod formula_lang;
pub mod hensel;
pub mod local_arith;
pub mod residue_monoid;

pub use formula_lang::{
    evaluate, interpret_residue_field, parse, transfer_check, Assignment, EvalConfig, Formula, FormulaError, TruthValue,
};
pub use hensel::{
    log_hensel_solve, log_jacobian, log_smooth_at, newton_lift, surjectivity_probe, HenselError, LiftProblem,
    LogHenselSolution, MonomialChart,
};
pub use local_arith::{embed_integer, ArithError, LocalElement, Polynomial, RingKind, RingSpec};
pub use residue_monoid::{mr_mul, mres, plus_mod, s_a, same_residues, tau_p, tau_p_inverse, MultRes, ResidueError};
