//! Hensel lifting.
//!
//! [`newton_lift`] is the classical lemma: a simple root modulo `m` of a
//! square polynomial system lifts to a root modulo `m^N` by Newton
//! iteration. [`log_hensel_solve`] handles monomially presented morphisms
//! `y_j = u_j * prod_i x_i^e_ij`: after rescaling each source coordinate by
//! its value at the base point and each target coordinate by its image, the
//! system becomes smooth at a point congruent to `(1, ..., 1)` and the
//! classical lemma applies. Its Jacobian there is the logarithmic Jacobian
//! of the chart.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::local_arith::{inverse_mod_p, ArithError, LocalElement, Polynomial, RingSpec};
use crate::residue_monoid::{mres, ResidueError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HenselError {
    #[error("singular point: the Jacobian is not invertible modulo the maximal ideal")]
    SingularPoint,
    #[error("no root: equation {equation} does not vanish modulo the maximal ideal at the starting point")]
    NoRoot { equation: usize },
    #[error("unit violation: u_{unit} does not evaluate to a unit at the given point")]
    UnitViolation { unit: usize },
    #[error("chart is not log-smooth at the base point (log-Jacobian rank {rank}, target dimension {required})")]
    NotLogSmooth { rank: usize, required: usize },
    #[error("residue mismatch in target coordinate {coordinate}: b and f(a0) have different multiplicative residues")]
    ResidueMismatch { coordinate: usize },
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("malformed input: {0}")]
    Shape(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Residue(#[from] ResidueError),
}

/// A square system `F(x) = 0` over `A` with an explicit Jacobian.
pub trait System {
    /// Number of equations, equal to the number of unknowns.
    fn size(&self) -> usize;
    fn eval(&self, x: &[LocalElement]) -> Result<Vec<LocalElement>, HenselError>;
    /// Row `r` holds the partial derivatives of equation `r`.
    fn jacobian(&self, x: &[LocalElement]) -> Result<Vec<Vec<LocalElement>>, HenselError>;
}

/// Polynomial equations in `n` variables, of which `k` (the number of
/// equations) are unknowns and the rest are pinned to fixed values.
#[derive(Debug, Clone)]
pub struct PolynomialSystem {
    equations: Vec<Polynomial>,
    partials: Vec<Vec<Polynomial>>,
    base: Vec<Option<LocalElement>>,
    free: Vec<usize>,
    ring: RingSpec,
}

impl PolynomialSystem {
    /// All variables free; requires `k` equations in `k` variables.
    pub fn new(equations: Vec<Polynomial>, ring: RingSpec) -> Result<Self, HenselError> {
        let k = equations.len();
        Self::sliced(equations, vec![None; k], (0..k).collect(), ring)
    }

    /// Variables listed in `free` are unknowns; every other coordinate must
    /// carry a value in `base`.
    pub fn sliced(
        equations: Vec<Polynomial>,
        base: Vec<Option<LocalElement>>,
        free: Vec<usize>,
        ring: RingSpec,
    ) -> Result<Self, HenselError> {
        let n = base.len();
        if free.len() != equations.len() {
            return Err(HenselError::Shape(format!(
                "{} equations but {} unknowns",
                equations.len(),
                free.len()
            )));
        }
        if let Some(eq) = equations.iter().find(|e| e.nvars() != n) {
            return Err(HenselError::Shape(format!("equation {eq} has {} variables, expected {n}", eq.nvars())));
        }
        for (i, slot) in base.iter().enumerate() {
            match (free.contains(&i), slot) {
                (false, None) => return Err(HenselError::Shape(format!("coordinate {i} is neither free nor pinned"))),
                (_, Some(v)) if v.ring() != ring => {
                    return Err(ArithError::RingMismatch { left: ring, right: v.ring() }.into())
                }
                _ => {}
            }
        }
        if free.iter().any(|&i| i >= n) {
            return Err(HenselError::Shape("free coordinate out of range".into()));
        }
        let partials = equations.iter().map(|e| free.iter().map(|&i| e.derivative(i)).collect()).collect();
        Ok(PolynomialSystem { equations, partials, base, free, ring })
    }

    fn full_point(&self, x: &[LocalElement]) -> Vec<LocalElement> {
        let mut pt: Vec<LocalElement> =
            self.base.iter().map(|b| b.clone().unwrap_or_else(|| LocalElement::zero(self.ring))).collect();
        for (&i, v) in self.free.iter().zip(x) {
            pt[i] = v.clone();
        }
        pt
    }

    /// Embeds a solution of the unknowns back into the full coordinate vector.
    pub fn complete(&self, x: &[LocalElement]) -> Vec<LocalElement> {
        self.full_point(x)
    }
}

impl System for PolynomialSystem {
    fn size(&self) -> usize {
        self.free.len()
    }

    fn eval(&self, x: &[LocalElement]) -> Result<Vec<LocalElement>, HenselError> {
        let pt = self.full_point(x);
        Ok(self.equations.iter().map(|e| e.eval_in(self.ring, &pt)).collect::<Result<_, _>>()?)
    }

    fn jacobian(&self, x: &[LocalElement]) -> Result<Vec<Vec<LocalElement>>, HenselError> {
        let pt = self.full_point(x);
        self.partials
            .iter()
            .map(|row| row.iter().map(|d| d.eval_in(self.ring, &pt).map_err(HenselError::from)).collect())
            .collect()
    }
}

/// Result of a Newton lift with the defect valuation before the first step
/// and after every step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonTrace {
    pub root: Vec<LocalElement>,
    pub defects: Vec<u32>,
}

fn min_valuation(values: &[LocalElement], ring: RingSpec) -> u32 {
    values.iter().map(LocalElement::valuation).min().unwrap_or(ring.precision())
}

/// Solves `J delta = rhs` over `A` by Gaussian elimination with unit pivots,
/// taking the first unit entry of each column.
pub fn solve_unit_pivot(
    mut mat: Vec<Vec<LocalElement>>,
    mut rhs: Vec<LocalElement>,
) -> Result<Vec<LocalElement>, HenselError> {
    let k = rhs.len();
    for col in 0..k {
        let pivot = (col..k).find(|&r| mat[r][col].is_unit()).ok_or(HenselError::SingularPoint)?;
        mat.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = mat[col][col].invert()?;
        for c in col..k {
            mat[col][c] = mat[col][c].mul(&inv)?;
        }
        rhs[col] = rhs[col].mul(&inv)?;
        for r in 0..k {
            if r == col || mat[r][col].is_zero_at_precision() {
                continue;
            }
            let factor = mat[r][col].clone();
            for c in col..k {
                let t = factor.mul(&mat[col][c])?;
                mat[r][c] = mat[r][c].sub(&t)?;
            }
            let t = factor.mul(&rhs[col])?;
            rhs[r] = rhs[r].sub(&t)?;
        }
    }
    Ok(rhs)
}

/// Newton iteration from a simple root modulo `m`, with the defect trace.
pub fn lift<S: System>(system: &S, x0: &[LocalElement]) -> Result<NewtonTrace, HenselError> {
    let k = system.size();
    if x0.len() != k {
        return Err(HenselError::Shape(format!("system has {k} unknowns, starting point has {}", x0.len())));
    }
    let ring = match x0.first() {
        Some(x) => x.ring(),
        None => return Ok(NewtonTrace { root: Vec::new(), defects: Vec::new() }),
    };
    let n = ring.precision();
    let mut fx = system.eval(x0)?;
    if let Some(eq) = fx.iter().position(LocalElement::is_unit) {
        return Err(HenselError::NoRoot { equation: eq });
    }
    let mut x = x0.to_vec();
    let mut defects = vec![min_valuation(&fx, ring)];
    // The Jacobian must be invertible mod m even when x0 is already a root.
    let mut delta = solve_unit_pivot(system.jacobian(&x)?, fx.clone())?;
    let rounds = u32::BITS - (n - 1).leading_zeros() + 1; // ceil(log2 N) + 1
    for _ in 0..rounds {
        if defects.last() == Some(&n) {
            break;
        }
        x = x.iter().zip(&delta).map(|(a, d)| a.sub(d)).collect::<Result<_, _>>()?;
        fx = system.eval(&x)?;
        defects.push(min_valuation(&fx, ring));
        if defects.last() == Some(&n) {
            break;
        }
        delta = solve_unit_pivot(system.jacobian(&x)?, fx.clone())?;
    }
    if defects.last() != Some(&n) {
        return Err(HenselError::PrecisionExhausted(format!(
            "Newton iteration stalled at defect valuation {:?}",
            defects.last()
        )));
    }
    Ok(NewtonTrace { root: x, defects })
}

/// Lifts a simple root modulo `m` of `k` polynomial equations in `k`
/// variables (taken positionally) to a root modulo `m^N`.
pub fn newton_lift(system: &[Polynomial], x0: &[LocalElement]) -> Result<Vec<LocalElement>, HenselError> {
    let ring = match x0.first() {
        Some(x) => x.ring(),
        None => return Ok(Vec::new()),
    };
    let sys = PolynomialSystem::new(system.to_vec(), ring)?;
    Ok(lift(&sys, x0)?.root)
}

/// A morphism `A^n -> A^m` given by `y_j = u_j(x) * prod_i x_i^e_ij`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawChart", into = "RawChart")]
pub struct MonomialChart {
    n: usize,
    m: usize,
    /// `exponents[j][i] = e_ij`.
    exponents: Vec<Vec<u32>>,
    units: Vec<Polynomial>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChart {
    n: usize,
    m: usize,
    exponents: Vec<Vec<u32>>,
    #[serde(default)]
    units: Option<Vec<Polynomial>>,
}

impl TryFrom<RawChart> for MonomialChart {
    type Error = HenselError;

    fn try_from(raw: RawChart) -> Result<Self, Self::Error> {
        if raw.exponents.len() != raw.m {
            return Err(HenselError::Shape(format!("expected {} exponent rows, got {}", raw.m, raw.exponents.len())));
        }
        let units = raw
            .units
            .unwrap_or_else(|| vec![Polynomial::constant(Polynomial::default_vars(raw.n), 1); raw.m]);
        MonomialChart::new(raw.n, raw.exponents, units)
    }
}

impl From<MonomialChart> for RawChart {
    fn from(c: MonomialChart) -> Self {
        RawChart { n: c.n, m: c.m, exponents: c.exponents, units: Some(c.units) }
    }
}

impl MonomialChart {
    pub fn new(n: usize, exponents: Vec<Vec<u32>>, units: Vec<Polynomial>) -> Result<Self, HenselError> {
        let m = exponents.len();
        if units.len() != m {
            return Err(HenselError::Shape(format!("{m} exponent rows but {} unit polynomials", units.len())));
        }
        if let Some(row) = exponents.iter().find(|r| r.len() != n) {
            return Err(HenselError::Shape(format!("exponent row {row:?} does not have {n} entries")));
        }
        if let Some(u) = units.iter().find(|u| u.nvars() != n) {
            return Err(HenselError::Shape(format!("unit {u} is not a polynomial in {n} variables")));
        }
        Ok(MonomialChart { n, m, exponents, units })
    }

    /// A chart with all units equal to 1.
    pub fn monomial(n: usize, exponents: Vec<Vec<u32>>) -> Result<Self, HenselError> {
        let m = exponents.len();
        Self::new(n, exponents, vec![Polynomial::constant(Polynomial::default_vars(n), 1); m])
    }

    pub fn source_dim(&self) -> usize {
        self.n
    }

    pub fn target_dim(&self) -> usize {
        self.m
    }

    /// `e_ij`: exponent of source coordinate `i` in target coordinate `j`.
    pub fn exponent(&self, i: usize, j: usize) -> u32 {
        self.exponents[j][i]
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    pub fn units(&self) -> &[Polynomial] {
        &self.units
    }

    /// `y_j` as a polynomial in the source coordinates.
    pub fn component(&self, j: usize) -> Polynomial {
        let vars = self.units[j].vars().to_vec();
        let mono = Polynomial::monomial(vars, self.exponents[j].clone(), 1).expect("well-formed");
        &self.units[j] * &mono
    }

    pub fn eval(&self, a: &[LocalElement]) -> Result<Vec<LocalElement>, HenselError> {
        if a.len() != self.n {
            return Err(HenselError::Shape(format!("chart expects {} coordinates, got {}", self.n, a.len())));
        }
        let ring = match a.first() {
            Some(x) => x.ring(),
            None => return Err(HenselError::Shape("chart with empty source needs a ring".into())),
        };
        (0..self.m)
            .map(|j| {
                let mut y = self.units[j].eval_in(ring, a)?;
                for (i, x) in a.iter().enumerate() {
                    y = y.mul(&x.pow(self.exponents[j][i]))?;
                }
                Ok(y)
            })
            .collect()
    }
}

/// The logarithmic Jacobian over `F_p` (rows: source coordinates, columns:
/// target coordinates) with its rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogJacobian {
    pub matrix: Vec<Vec<u32>>,
    pub rank: usize,
}

/// Entries `e_ij + x_i * (du_j/dx_i)(P) / u_j(P)` reduced modulo `p`.
pub fn log_jacobian(chart: &MonomialChart, point: &[u64], p: u32) -> Result<LogJacobian, HenselError> {
    if point.len() != chart.n {
        return Err(HenselError::Shape(format!("chart expects {} coordinates, got {}", chart.n, point.len())));
    }
    let p64 = p as u64;
    let mut matrix = vec![vec![0u32; chart.m]; chart.n];
    for j in 0..chart.m {
        let uj = chart.units[j].eval_mod_p(point, p);
        if uj == 0 {
            return Err(HenselError::UnitViolation { unit: j });
        }
        let inv = inverse_mod_p(uj, p) as u64;
        for (i, row) in matrix.iter_mut().enumerate() {
            let du = chart.units[j].derivative(i).eval_mod_p(point, p);
            let log_part = (point[i] % p64) * du % p64 * inv % p64;
            row[j] = ((chart.exponents[j][i] as u64 % p64 + log_part) % p64) as u32;
        }
    }
    let rank = fp_independent_rows(&matrix, p).len();
    Ok(LogJacobian { matrix, rank })
}

pub fn log_smooth_at(chart: &MonomialChart, point: &[u64], p: u32) -> Result<bool, HenselError> {
    Ok(log_jacobian(chart, point, p)?.rank == chart.m)
}

/// Indices of a maximal set of linearly independent rows over `F_p`,
/// chosen greedily in index order.
pub fn fp_independent_rows(rows: &[Vec<u32>], p: u32) -> Vec<usize> {
    let p64 = p as u64;
    // Echelon basis: each entry is (pivot column, normalized row).
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut chosen = Vec::new();
    for (idx, row) in rows.iter().enumerate() {
        let mut v: Vec<u64> = row.iter().map(|&x| x as u64 % p64).collect();
        for (pc, b) in &basis {
            let f = v[*pc];
            if f != 0 {
                for (x, y) in v.iter_mut().zip(b) {
                    *x = (*x + p64 - f * y % p64) % p64;
                }
            }
        }
        if let Some(pc) = v.iter().position(|&x| x != 0) {
            let inv = inverse_mod_p(v[pc], p) as u64;
            for x in v.iter_mut() {
                *x = *x * inv % p64;
            }
            basis.push((pc, v));
            chosen.push(idx);
        }
    }
    chosen
}

/// Data for one application of the logarithmic lemma.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftProblem {
    pub chart: MonomialChart,
    pub a0: Vec<LocalElement>,
    pub b: Vec<LocalElement>,
}

/// JSON form of a [`LiftProblem`]; points are arrays of absolute digits,
/// least significant first.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftProblemDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<RingSpec>,
    pub chart: MonomialChart,
    pub a0: Vec<Vec<u64>>,
    pub b: Vec<Vec<u64>>,
}

impl LiftProblemDoc {
    pub fn into_problem(self, fallback: Option<RingSpec>) -> Result<LiftProblem, HenselError> {
        let ring = self
            .ring
            .or(fallback)
            .ok_or_else(|| HenselError::Shape("lift problem needs a ring".into()))?;
        let to_point = |pts: Vec<Vec<u64>>| -> Result<Vec<LocalElement>, HenselError> {
            pts.iter().map(|d| LocalElement::from_digits(ring, d).map_err(HenselError::from)).collect()
        };
        Ok(LiftProblem { chart: self.chart, a0: to_point(self.a0)?, b: to_point(self.b)? })
    }

    pub fn from_problem(problem: &LiftProblem) -> Self {
        let digits = |pts: &[LocalElement]| -> Vec<Vec<u64>> {
            pts.iter().map(|x| x.abs_digits().into_iter().map(u64::from).collect()).collect()
        };
        LiftProblemDoc {
            ring: problem.a0.first().map(LocalElement::ring),
            chart: problem.chart.clone(),
            a0: digits(&problem.a0),
            b: digits(&problem.b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogHenselSolution {
    pub point: Vec<LocalElement>,
    /// `N - max_j v(y_j(f(a0)))`: the precision at which the rescaled
    /// system was solved.
    pub effective_precision: u32,
    /// Source coordinates that were moved; the others keep their value.
    pub pivots: Vec<usize>,
}

/// The rescaled system `u_j(c(1+eps)) / u_j(c) * prod_i (1+eps_i)^e_ij = b'_j`
/// in the unknowns `eps_i`, `i` in `free`.
struct RescaledSystem<'a> {
    chart: &'a MonomialChart,
    base: &'a [LocalElement],
    inv_unit_at_base: Vec<LocalElement>,
    target: Vec<LocalElement>,
    free: Vec<usize>,
    ring: RingSpec,
}

impl RescaledSystem<'_> {
    fn full_eps(&self, eps: &[LocalElement]) -> Vec<LocalElement> {
        let mut full = vec![LocalElement::zero(self.ring); self.chart.n];
        for (&i, e) in self.free.iter().zip(eps) {
            full[i] = e.clone();
        }
        full
    }

    fn source_point(&self, eps: &[LocalElement]) -> Result<Vec<LocalElement>, HenselError> {
        let one = LocalElement::one(self.ring);
        self.full_eps(eps)
            .iter()
            .zip(self.base)
            .map(|(e, c)| Ok(c.mul(&one.add(e)?)?))
            .collect()
    }
}

impl System for RescaledSystem<'_> {
    fn size(&self) -> usize {
        self.free.len()
    }

    fn eval(&self, eps: &[LocalElement]) -> Result<Vec<LocalElement>, HenselError> {
        let full = self.full_eps(eps);
        let x = self.source_point(eps)?;
        let one = LocalElement::one(self.ring);
        (0..self.chart.m)
            .map(|j| {
                let mut g = self.chart.units[j].eval_in(self.ring, &x)?.mul(&self.inv_unit_at_base[j])?;
                for (i, e) in full.iter().enumerate() {
                    g = g.mul(&one.add(e)?.pow(self.chart.exponents[j][i]))?;
                }
                Ok(g.sub(&self.target[j])?)
            })
            .collect()
    }

    fn jacobian(&self, eps: &[LocalElement]) -> Result<Vec<Vec<LocalElement>>, HenselError> {
        let full = self.full_eps(eps);
        let x = self.source_point(eps)?;
        let one = LocalElement::one(self.ring);
        let shifted: Vec<LocalElement> = full.iter().map(|e| one.add(e)).collect::<Result<_, _>>()?;
        let mut rows = Vec::with_capacity(self.chart.m);
        for j in 0..self.chart.m {
            let exps = &self.chart.exponents[j];
            let u = self.chart.units[j].eval_in(self.ring, &x)?;
            let mono = shifted
                .iter()
                .zip(exps)
                .try_fold(one.clone(), |acc, (s, &e)| acc.mul(&s.pow(e)))?;
            let mut row = Vec::with_capacity(self.free.len());
            for &i in &self.free {
                // d/d eps_i [u(x)] = c_i * (du/dx_i)(x)
                let du = self.chart.units[j].derivative(i).eval_in(self.ring, &x)?;
                let term_u = self.base[i].mul(&du)?.mul(&mono)?;
                let term_m = if exps[i] == 0 {
                    LocalElement::zero(self.ring)
                } else {
                    let mut rest = LocalElement::embed_integer(exps[i] as i128, self.ring).mul(&shifted[i].pow(exps[i] - 1))?;
                    for (l, (s, &e)) in shifted.iter().zip(exps).enumerate() {
                        if l != i {
                            rest = rest.mul(&s.pow(e))?;
                        }
                    }
                    u.mul(&rest)?
                };
                row.push(term_u.add(&term_m)?.mul(&self.inv_unit_at_base[j])?);
            }
            rows.push(row);
        }
        Ok(rows)
    }
}

/// Lifts `b` through a log-smooth monomial chart to a point with the same
/// residues as `a0`.
pub fn log_hensel_solve(problem: &LiftProblem) -> Result<LogHenselSolution, HenselError> {
    let chart = &problem.chart;
    let (a0, b) = (&problem.a0, &problem.b);
    if a0.len() != chart.n || b.len() != chart.m {
        return Err(HenselError::Shape(format!(
            "chart is {} -> {}, got a0 of length {} and b of length {}",
            chart.n,
            chart.m,
            a0.len(),
            b.len()
        )));
    }
    let ring = a0
        .first()
        .map(LocalElement::ring)
        .ok_or_else(|| HenselError::Shape("source dimension must be positive".into()))?;
    if let Some(x) = a0.iter().chain(b.iter()).find(|x| x.ring() != ring) {
        return Err(ArithError::RingMismatch { left: ring, right: x.ring() }.into());
    }
    let n_prec = ring.precision();
    if let Some(i) = a0.iter().position(LocalElement::is_zero_at_precision) {
        return Err(HenselError::PrecisionExhausted(format!(
            "coordinate {i} of a0 is zero at precision {n_prec}"
        )));
    }
    let p = ring.p();
    let residues: Vec<u64> = a0.iter().map(|x| x.residue() as u64).collect();
    let unit_at_base: Vec<LocalElement> =
        chart.units.iter().map(|u| u.eval_in(ring, a0)).collect::<Result<_, _>>()?;
    if let Some(j) = unit_at_base.iter().position(|u| !u.is_unit()) {
        return Err(HenselError::UnitViolation { unit: j });
    }
    let lj = log_jacobian(chart, &residues, p)?;
    if lj.rank < chart.m {
        return Err(HenselError::NotLogSmooth { rank: lj.rank, required: chart.m });
    }
    let image = chart.eval(a0)?;
    let mut max_val = 0;
    let mut target = Vec::with_capacity(chart.m);
    for (j, (y, bj)) in image.iter().zip(b).enumerate() {
        let v = y.valuation();
        if v + 1 >= n_prec {
            return Err(HenselError::PrecisionExhausted(format!(
                "f(a0)_{j} has valuation {v}, which leaves no room at precision {n_prec}"
            )));
        }
        if mres(bj)? != mres(y)? {
            return Err(HenselError::ResidueMismatch { coordinate: j });
        }
        max_val = max_val.max(v);
        target.push(bj.unit_part().mul(&y.unit_part().invert()?)?);
    }
    let transposed: Vec<Vec<u32>> = (0..chart.m).map(|j| lj.matrix.iter().map(|row| row[j]).collect()).collect();
    // Independent columns of the transpose = source coordinates whose rows
    // of the log-Jacobian form an invertible m x m block.
    let pivots = fp_independent_columns(&transposed, chart.n, p);
    let system = RescaledSystem {
        chart,
        base: a0,
        inv_unit_at_base: unit_at_base.iter().map(LocalElement::invert).collect::<Result<_, _>>()?,
        target,
        free: pivots.clone(),
        ring,
    };
    let eps0 = vec![LocalElement::zero(ring); chart.m];
    let trace = lift(&system, &eps0)?;
    let point = system.source_point(&trace.root)?;
    if chart.eval(&point)? != *b {
        return Err(HenselError::PrecisionExhausted("lifted point does not reproduce the target".into()));
    }
    Ok(LogHenselSolution { point, effective_precision: n_prec - max_val, pivots })
}

fn fp_independent_columns(rows: &[Vec<u32>], ncols: usize, p: u32) -> Vec<usize> {
    let cols: Vec<Vec<u32>> = (0..ncols).map(|c| rows.iter().map(|r| r[c]).collect()).collect();
    fp_independent_rows(&cols, p)
}

/// Searches residue data of source points (valuations up to `search_bound`,
/// unit digits in `F_p^x`, both lexicographically) whose image has the
/// multiplicative residues of `b` at a log-smooth point, then lifts.
pub fn surjectivity_probe(
    chart: &MonomialChart,
    b: &[LocalElement],
    search_bound: u32,
) -> Result<Option<LogHenselSolution>, HenselError> {
    if b.len() != chart.m {
        return Err(HenselError::Shape(format!("target has {} coordinates, chart has {}", b.len(), chart.m)));
    }
    let ring = match b.first() {
        Some(x) => x.ring(),
        None => return Err(HenselError::Shape("target dimension must be positive".into())),
    };
    let target: Vec<(u64, u32)> = b
        .iter()
        .map(|x| mres(x).map(|_| (x.valuation() as u64, x.leading_digit().unwrap_or(0))))
        .collect::<Result<_, _>>()?;
    let n = chart.n;
    let max_val = search_bound.min(ring.precision() - 1);
    let mut vals = vec![0u32; n];
    loop {
        let matches = (0..chart.m)
            .all(|j| (0..n).map(|i| (chart.exponents[j][i] * vals[i]) as u64).sum::<u64>() == target[j].0);
        if matches {
            if let Some(sol) = probe_units(chart, b, &target, &vals, ring)? {
                return Ok(Some(sol));
            }
        }
        if !advance(&mut vals, 0, max_val) {
            return Ok(None);
        }
    }
}

fn probe_units(
    chart: &MonomialChart,
    b: &[LocalElement],
    target: &[(u64, u32)],
    vals: &[u32],
    ring: RingSpec,
) -> Result<Option<LogHenselSolution>, HenselError> {
    let p = ring.p();
    let p64 = p as u64;
    let n = chart.n;
    let mut units = vec![1u32; n];
    loop {
        let residues: Vec<u64> = (0..n).map(|i| if vals[i] == 0 { units[i] as u64 } else { 0 }).collect();
        let leading_ok = (0..chart.m).all(|j| {
            let mut lead = chart.units[j].eval_mod_p(&residues, p);
            for i in 0..n {
                for _ in 0..chart.exponents[j][i] {
                    lead = lead * units[i] as u64 % p64;
                }
            }
            lead == target[j].1 as u64
        });
        if leading_ok && log_smooth_at(chart, &residues, p)? {
            let a0: Vec<LocalElement> = (0..n).map(|i| LocalElement::monomial(ring, vals[i], units[i])).collect();
            let problem = LiftProblem { chart: chart.clone(), a0, b: b.to_vec() };
            match log_hensel_solve(&problem) {
                Ok(sol) => return Ok(Some(sol)),
                Err(e @ HenselError::PrecisionExhausted(_)) => return Err(e),
                Err(HenselError::UnitViolation { .. }) | Err(HenselError::NotLogSmooth { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        if !advance(&mut units, 1, p - 1) {
            return Ok(None);
        }
    }
}

/// Lexicographic successor with the last coordinate fastest; false once
/// the counter wraps.
fn advance(digits: &mut [u32], lo: u32, hi: u32) -> bool {
    for d in digits.iter_mut().rev() {
        if *d < hi {
            *d += 1;
            return true;
        }
        *d = lo;
    }
    false
}
