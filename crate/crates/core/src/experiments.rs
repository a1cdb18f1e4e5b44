//! Desk-scale experiments: zeros of forms lifted from `F_p`, transfer
//! batteries over `Z_p` and `F_p[[t]]`, and surjectivity probes.

use std::fmt;
use std::time::Duration;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula_lang::{parse, transfer_check, EvalConfig, Formula, FormulaError, TruthValue};
use crate::hensel::{lift, surjectivity_probe, HenselError, MonomialChart, PolynomialSystem};
use crate::local_arith::{ArithError, LocalElement, Polynomial, RingKind, RingSpec};

pub const SCHEMA: &str = "hlab-report-1";

/// Largest `p^n` searched exhaustively.
pub const EXHAUSTIVE_LIMIT: u64 = 10_000_000;

pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExperimentError {
    #[error("no nontrivial zero found within a budget of {budget} points")]
    Exhausted { budget: u64 },
    #[error("all {zeros} nontrivial zeros found are singular; singular lifting is not attempted")]
    SingularOnly { zeros: u64 },
    #[error("form is not homogeneous of degree {degree}")]
    NotHomogeneous { degree: u32 },
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Hensel(#[from] HenselError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormInstance {
    pub d: u32,
    pub n: usize,
    pub form: Polynomial,
    pub ring: RingSpec,
}

impl FormInstance {
    pub fn new(form: Polynomial, d: u32, ring: RingSpec) -> Result<Self, ExperimentError> {
        if form.is_zero() || !form.is_homogeneous(d) {
            return Err(ExperimentError::NotHomogeneous { degree: d });
        }
        Ok(FormInstance { d, n: form.nvars(), form, ring })
    }

    /// `sum_i c_i x_i^d`.
    pub fn diagonal(coeffs: &[i128], d: u32, ring: RingSpec) -> Result<Self, ExperimentError> {
        let vars = Polynomial::default_vars(coeffs.len());
        let mut form = Polynomial::zero(vars.clone());
        for (i, &c) in coeffs.iter().enumerate() {
            let mut exp = vec![0; coeffs.len()];
            exp[i] = d;
            form = &form + &Polynomial::monomial(vars.clone(), exp, c)?;
        }
        Self::new(form, d, ring)
    }

    /// Whether `n > d^2`, the range where zeros are guaranteed for large `p`.
    pub fn above_bound(&self) -> bool {
        self.n as u64 > (self.d as u64).pow(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub budget: u64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { budget: DEFAULT_BUDGET, seed: 0 }
    }
}

struct ZeroTest<'a> {
    form: &'a Polynomial,
    grad: Vec<Polynomial>,
    p: u32,
    zeros: u64,
}

impl ZeroTest<'_> {
    fn smooth_zero(&mut self, x: &[u64]) -> bool {
        if self.form.eval_mod_p(x, self.p) != 0 {
            return false;
        }
        self.zeros += 1;
        self.grad.iter().any(|g| g.eval_mod_p(x, self.p) != 0)
    }
}

/// Finds `x != 0` in `F_p^n` with `form(x) = 0` and nonzero gradient.
///
/// Small spaces (`p^n <= 10^7`) are searched exhaustively, ordered by the
/// last nonzero coordinate and then lexicographically; larger ones are
/// sampled with a ChaCha generator seeded by `cfg.seed`, up to `cfg.budget`
/// points.
pub fn chevalley_warning_search(form: &Polynomial, p: u32, cfg: &SearchConfig) -> Result<Vec<u64>, ExperimentError> {
    let n = form.nvars();
    if n == 0 {
        return Err(ExperimentError::Invalid("form has no variables".into()));
    }
    let mut test = ZeroTest { form, grad: (0..n).map(|i| form.derivative(i)).collect(), p, zeros: 0 };
    let space = (p as u64).checked_pow(n as u32).filter(|&s| s <= EXHAUSTIVE_LIMIT);
    let p64 = p as u64;
    if space.is_some() {
        let mut x = vec![0u64; n];
        for s in 0..n {
            // x_s != 0, x_{>s} = 0, x_0..x_{s-1} big-endian.
            for head in 0..p64.pow(s as u32) {
                let mut rest = head;
                for i in (0..s).rev() {
                    x[i] = rest % p64;
                    rest /= p64;
                }
                for last in 1..p64 {
                    x[s] = last;
                    if test.smooth_zero(&x) {
                        return Ok(x);
                    }
                }
            }
            x[s] = 0;
        }
        return Err(if test.zeros > 0 {
            ExperimentError::SingularOnly { zeros: test.zeros }
        } else {
            ExperimentError::Exhausted { budget: p64.pow(n as u32) - 1 }
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut x = vec![0u64; n];
    for _ in 0..cfg.budget {
        for xi in x.iter_mut() {
            *xi = rng.gen_range(0..p64);
        }
        if x.iter().all(|&v| v == 0) {
            continue;
        }
        if test.smooth_zero(&x) {
            return Ok(x);
        }
    }
    Err(if test.zeros > 0 {
        ExperimentError::SingularOnly { zeros: test.zeros }
    } else {
        ExperimentError::Exhausted { budget: cfg.budget }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDescriptor {
    pub d: u32,
    pub n: usize,
    pub form: String,
    pub ring: RingSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// Zero of the reduction found over `F_p`.
    pub residue_point: Vec<u64>,
    /// Coordinate moved by the lift (the others keep their residue value).
    pub lift_coordinate: usize,
    /// Absolute digits of each coordinate, least significant first.
    pub digits: Vec<Vec<u32>>,
    pub display: Vec<String>,
    pub defects: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    /// `form(witness)` as computed by back-substitution.
    pub form_value: String,
    pub zero_at_precision: bool,
    pub nontrivial: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: String,
    pub experiment: String,
    pub seed: u64,
    pub budget: u64,
    pub instance: InstanceDescriptor,
    pub witness: Witness,
    pub verification: Verification,
    /// Excluded from the serialized body so reports are reproducible.
    #[serde(skip)]
    pub wall_clock: Duration,
}

impl ExperimentReport {
    pub fn verified(&self) -> bool {
        self.verification.zero_at_precision && self.verification.nontrivial
    }

    /// Coordinates of the witness as ring elements.
    pub fn point(&self) -> Result<Vec<LocalElement>, ArithError> {
        self.witness
            .digits
            .iter()
            .map(|d| LocalElement::from_digits(self.instance.ring, &d.iter().map(|&x| x as u64).collect::<Vec<_>>()))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

impl fmt::Display for ExperimentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "form      {} over {}", self.instance.form, self.instance.ring)?;
        writeln!(f, "residue   {:?} (lift in x{})", self.witness.residue_point, self.witness.lift_coordinate + 1)?;
        writeln!(f, "witness   ({})", self.witness.display.join(", "))?;
        writeln!(f, "defects   {:?}", self.witness.defects)?;
        writeln!(
            f,
            "verified  {} (form value {}, nontrivial {})",
            self.verified(),
            self.verification.form_value,
            self.verification.nontrivial
        )?;
        write!(f, "seed {}  time {:.3} ms", self.seed, self.wall_clock.as_secs_f64() * 1e3)
    }
}

/// Finds a smooth zero over `F_p` and lifts it to a nontrivial zero of the
/// form at the instance's precision.
pub fn ax_kochen_witness(instance: &FormInstance, cfg: &SearchConfig) -> Result<ExperimentReport, ExperimentError> {
    let start = Instant::now();
    let ring = instance.ring;
    if ring.precision() < 2 {
        return Err(ExperimentError::Invalid("precision must be at least 2".into()));
    }
    let p = ring.p();
    let x0 = chevalley_warning_search(&instance.form, p, cfg)?;
    let coordinate = (0..instance.n)
        .find(|&i| instance.form.derivative(i).eval_mod_p(&x0, p) != 0)
        .expect("search returns smooth points");
    let base: Vec<Option<LocalElement>> =
        x0.iter().map(|&v| LocalElement::from_digits(ring, &[v]).map(Some)).collect::<Result<_, _>>()?;
    let start_value = base[coordinate].clone().expect("pinned");
    let sys = PolynomialSystem::sliced(vec![instance.form.clone()], base, vec![coordinate], ring)?;
    let trace = lift(&sys, &[start_value])?;
    let point = sys.complete(&trace.root);
    let value = instance.form.eval_in(ring, &point)?;
    let verification = Verification {
        form_value: value.to_string(),
        zero_at_precision: value.is_zero_at_precision(),
        nontrivial: point.iter().any(LocalElement::is_unit),
    };
    let witness = Witness {
        residue_point: x0,
        lift_coordinate: coordinate,
        digits: point.iter().map(LocalElement::abs_digits).collect(),
        display: point.iter().map(LocalElement::to_string).collect(),
        defects: trace.defects,
    };
    Ok(ExperimentReport {
        schema: SCHEMA.into(),
        experiment: "axkochen".into(),
        seed: cfg.seed,
        budget: cfg.budget,
        instance: InstanceDescriptor { d: instance.d, n: instance.n, form: instance.form.to_string(), ring },
        witness,
        verification,
        wall_clock: start.elapsed(),
    })
}

/// Closed sentences about quadratic and cubic residues and unit equations.
pub fn default_battery() -> Vec<Formula> {
    let mut texts: Vec<String> = (1..=6).map(|c| format!("exists x. x*x = {c}")).collect();
    texts.extend((2..=5).map(|c| format!("exists x. x*x*x = {c}")));
    texts.extend(
        [
            "exists x. x*x = -1",
            "exists x. x*x*x*x = 2",
            "forall x. exists y. y*y = x",
            "forall x. exists y. y*y*y = x",
            "exists x. x*x + x + 1 = 0",
            "exists x. x*x - x - 1 = 0",
            "exists x. exists y. x*x + y*y + 1 = 0",
            "exists x. exists y. y*y = x*x*x + 1",
            "exists x. exists y. x*y = 1 and x + y = 1",
            "exists x. exists y. x*y = 1 and x + y = 3",
            "exists x. 2*x = 1",
            "forall x. x*x*x - x = (x - 1)*x*(x + 1)",
            "forall x. (exists y. x*y = 1) or (exists y. y*y = x) or (exists y. y*y = 2*x)",
        ]
        .map(String::from),
    );
    texts.iter().map(|t| parse(t).expect("battery sentences parse")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatteryCell {
    pub sentence: String,
    pub p: u32,
    pub zp: TruthValue,
    pub fpt: TruthValue,
    pub agree: Option<bool>,
    /// Determinate disagreement between the two rings.
    pub finding: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceSummary {
    pub sentence: String,
    pub agree: usize,
    pub unknown: usize,
    pub disagree: usize,
    /// Smallest swept prime from which every cell agrees determinately.
    pub agreement_from: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatteryReport {
    pub schema: String,
    pub primes: Vec<u32>,
    pub cells: Vec<BatteryCell>,
    pub sentences: Vec<SentenceSummary>,
    pub agree: usize,
    pub unknown: usize,
    pub disagree: usize,
}

impl BatteryReport {
    pub fn findings(&self) -> impl Iterator<Item = &BatteryCell> {
        self.cells.iter().filter(|c| c.finding)
    }

    /// One JSON object per cell.
    pub fn json_lines(&self) -> Vec<String> {
        self.cells
            .iter()
            .map(|c| {
                let mut v = serde_json::to_value(c).expect("cell serializes");
                v["schema"] = SCHEMA.into();
                v.to_string()
            })
            .collect()
    }
}

impl fmt::Display for BatteryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.sentences.iter().map(|s| s.sentence.len()).max().unwrap_or(8).max(8);
        writeln!(f, "{:<width$}  agree  unknown  disagree  agree-from", "sentence")?;
        for s in &self.sentences {
            let from = s.agreement_from.map_or("-".to_string(), |p| p.to_string());
            writeln!(f, "{:<width$}  {:>5}  {:>7}  {:>8}  {:>10}", s.sentence, s.agree, s.unknown, s.disagree, from)?;
        }
        for c in self.findings() {
            writeln!(f, "FINDING: p = {}: {} is {} over Z_p but {} over F_p[[t]]", c.p, c.sentence, c.zp, c.fpt)?;
        }
        write!(f, "total: {} agree, {} unknown, {} disagree", self.agree, self.unknown, self.disagree)
    }
}

/// Evaluates every sentence over `Z_p` and `F_p[[t]]` for every prime, with
/// the depth, cap and precision of `cfg`.
pub fn transfer_battery(
    sentences: &[Formula],
    primes: &[u32],
    cfg: &EvalConfig,
) -> Result<BatteryReport, ExperimentError> {
    let jobs: Vec<(usize, u32)> = (0..sentences.len()).flat_map(|s| primes.iter().map(move |&p| (s, p))).collect();
    let cells = jobs
        .par_iter()
        .map(|&(s, p)| {
            let r = transfer_check(&sentences[s], p, cfg)?;
            Ok(BatteryCell {
                sentence: sentences[s].to_string(),
                p,
                zp: r.zp,
                fpt: r.fpt,
                agree: r.agree,
                finding: r.agree == Some(false),
            })
        })
        .collect::<Result<Vec<_>, FormulaError>>()?;
    let summaries: Vec<SentenceSummary> = cells
        .chunks(primes.len().max(1))
        .zip(sentences)
        .map(|(row, phi)| {
            let count = |want: Option<bool>| row.iter().filter(|c| c.agree == want).count();
            let mut sorted: Vec<&BatteryCell> = row.iter().collect();
            sorted.sort_by_key(|c| c.p);
            let tail_start = sorted.iter().rposition(|c| c.agree != Some(true)).map_or(0, |i| i + 1);
            SentenceSummary {
                sentence: phi.to_string(),
                agree: count(Some(true)),
                unknown: count(None),
                disagree: count(Some(false)),
                agreement_from: sorted.get(tail_start).map(|c| c.p),
            }
        })
        .collect();
    let total = |f: fn(&SentenceSummary) -> usize| summaries.iter().map(f).sum();
    Ok(BatteryReport {
        schema: SCHEMA.into(),
        primes: primes.to_vec(),
        agree: total(|s| s.agree),
        unknown: total(|s| s.unknown),
        disagree: total(|s| s.disagree),
        cells,
        sentences: summaries,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeOutcome {
    Hit,
    Miss,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeCell {
    pub sample: usize,
    /// Absolute digits of the target, shared by both rings.
    pub target: Vec<u32>,
    pub valuation: u32,
    pub zp: ProbeOutcome,
    pub fpt: ProbeOutcome,
    pub agree: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub schema: String,
    pub p: u32,
    pub precision: u32,
    pub bound: u32,
    pub seed: u64,
    pub cells: Vec<ProbeCell>,
    pub hits: usize,
    pub misses: usize,
    pub errors: usize,
    pub mismatches: usize,
}

impl ProbeReport {
    pub fn json_lines(&self) -> Vec<String> {
        self.cells
            .iter()
            .map(|c| {
                let mut v = serde_json::to_value(c).expect("cell serializes");
                v["schema"] = SCHEMA.into();
                v["p"] = self.p.into();
                v.to_string()
            })
            .collect()
    }
}

impl fmt::Display for ProbeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p = {}, precision {}, bound {}, seed {}", self.p, self.precision, self.bound, self.seed)?;
        writeln!(f, "{:>6}  {:>3}  {:>5}  {:>5}  agree", "sample", "val", "Z_p", "F_p[[t]]")?;
        for c in &self.cells {
            let show = |o: ProbeOutcome| match o {
                ProbeOutcome::Hit => "hit",
                ProbeOutcome::Miss => "miss",
                ProbeOutcome::Error => "error",
            };
            writeln!(f, "{:>6}  {:>3}  {:>5}  {:>8}  {}", c.sample, c.valuation, show(c.zp), show(c.fpt), c.agree)?;
        }
        write!(
            f,
            "hits {}, misses {}, errors {}, mismatches {}",
            self.hits, self.misses, self.errors, self.mismatches
        )
    }
}

fn probe_one(chart: &MonomialChart, ring: RingSpec, digits: &[u64], bound: u32) -> (ProbeOutcome, Option<String>) {
    let b = match LocalElement::from_digits(ring, digits) {
        Ok(b) => b,
        Err(e) => return (ProbeOutcome::Error, Some(e.to_string())),
    };
    match surjectivity_probe(chart, &[b], bound) {
        Ok(Some(_)) => (ProbeOutcome::Hit, None),
        Ok(None) => (ProbeOutcome::Miss, None),
        Err(e) => (ProbeOutcome::Error, Some(format!("{}: {e}", ring.kind()))),
    }
}

/// Samples targets with the same digits in `Z_p` and `F_p[[t]]` (hence
/// `tau_p`-matched residues) and probes the chart on both sides.
pub fn surjectivity_transfer_probe(
    chart: &MonomialChart,
    p: u32,
    precision: u32,
    samples: usize,
    bound: u32,
    seed: u64,
) -> Result<ProbeReport, ExperimentError> {
    if chart.target_dim() != 1 {
        return Err(ExperimentError::Invalid("surjectivity probes need a one-dimensional target".into()));
    }
    if precision < 2 {
        return Err(ExperimentError::Invalid("precision must be at least 2".into()));
    }
    let zp = RingSpec::new(RingKind::Padic, p as u64, precision)?;
    let fpt = zp.counterpart();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_val = bound.min(precision - 2);
    let mut cells = Vec::with_capacity(samples);
    for sample in 0..samples {
        let v = rng.gen_range(0..=max_val) as usize;
        let mut digits = vec![0u64; precision as usize];
        digits[v] = rng.gen_range(1..p as u64);
        for d in digits.iter_mut().skip(v + 1) {
            *d = rng.gen_range(0..p as u64);
        }
        let (a, ea) = probe_one(chart, zp, &digits, bound);
        let (b, eb) = probe_one(chart, fpt, &digits, bound);
        cells.push(ProbeCell {
            sample,
            target: digits.iter().map(|&d| d as u32).collect(),
            valuation: v as u32,
            zp: a,
            fpt: b,
            agree: a == b,
            errors: ea.into_iter().chain(eb).collect(),
        });
    }
    let count = |o: ProbeOutcome| cells.iter().filter(|c| c.agree && c.zp == o).count();
    Ok(ProbeReport {
        schema: SCHEMA.into(),
        p,
        precision,
        bound,
        seed,
        hits: count(ProbeOutcome::Hit),
        misses: count(ProbeOutcome::Miss),
        errors: cells.iter().filter(|c| c.zp == ProbeOutcome::Error || c.fpt == ProbeOutcome::Error).count(),
        mismatches: cells.iter().filter(|c| !c.agree).count(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum_of_powers(n: usize, d: u32, ring: RingSpec) -> FormInstance {
        FormInstance::diagonal(&vec![1; n], d, ring).unwrap()
    }

    #[test]
    fn search_examples() {
        let cfg = SearchConfig::default();
        let ring = RingSpec::padic(7, 8).unwrap();
        assert_eq!(chevalley_warning_search(&sum_of_powers(3, 2, ring).form, 7, &cfg).unwrap(), vec![1, 2, 3]);
        assert_eq!(chevalley_warning_search(&sum_of_powers(2, 2, ring).form, 5, &cfg).unwrap(), vec![1, 2]);
        assert_eq!(chevalley_warning_search(&sum_of_powers(5, 2, ring).form, 7, &cfg).unwrap(), vec![1, 2, 3, 0, 0]);
    }

    #[test]
    fn search_failures() {
        let ring = RingSpec::padic(7, 8).unwrap();
        let cfg = SearchConfig::default();
        // x^2 + y^2 has no nontrivial zero mod 7.
        assert_eq!(
            chevalley_warning_search(&sum_of_powers(2, 2, ring).form, 7, &cfg),
            Err(ExperimentError::Exhausted { budget: 48 })
        );
        // x^3 + y^3 = (x + y)^3 mod 3 vanishes only singularly.
        assert!(matches!(
            chevalley_warning_search(&sum_of_powers(2, 3, ring).form, 3, &cfg),
            Err(ExperimentError::SingularOnly { .. })
        ));
        assert!(matches!(
            FormInstance::new(Polynomial::var(Polynomial::default_vars(2), 0), 2, ring),
            Err(ExperimentError::NotHomogeneous { degree: 2 })
        ));
    }

    #[test]
    fn witnesses_over_both_rings() {
        let cfg = SearchConfig::default();
        let mut residues = Vec::new();
        for ring in [RingSpec::padic(7, 8).unwrap(), RingSpec::power_series(7, 8).unwrap()] {
            let report = ax_kochen_witness(&sum_of_powers(5, 2, ring), &cfg).unwrap();
            assert!(report.verified());
            assert_eq!(report.witness.residue_point, vec![1, 2, 3, 0, 0]);
            let point = report.point().unwrap();
            residues.push(point.iter().map(LocalElement::residue).collect::<Vec<_>>());
            let back: ExperimentReport = serde_json::from_str(&report.to_json()).unwrap();
            assert_eq!(back.witness, report.witness);
        }
        assert_eq!(residues[0], residues[1]);
        let cubic = sum_of_powers(10, 3, RingSpec::padic(7, 8).unwrap());
        assert!(cubic.above_bound());
        assert!(ax_kochen_witness(&cubic, &cfg).unwrap().verified());
    }

    #[test]
    fn battery_examples() {
        let cfg = EvalConfig::new(RingSpec::padic(7, 8).unwrap());
        let empty = transfer_battery(&[], &[7], &cfg).unwrap();
        assert!(empty.cells.is_empty());
        let cubes = [parse("exists x. x*x*x = 2").unwrap()];
        let report = transfer_battery(&cubes, &[3, 5, 7, 11, 13], &cfg).unwrap();
        assert_eq!(report.disagree, 0);
        // Cubing is bijective for p = 5, 11. Mod 3 the derivative vanishes,
        // so no certificate is available.
        for c in &report.cells {
            match c.p {
                3 => assert_eq!(c.zp, TruthValue::Unknown),
                5 | 11 => assert_eq!(c.zp, TruthValue::True),
                7 | 13 => assert_eq!(c.zp, TruthValue::False),
                _ => unreachable!(),
            }
        }
        assert!(default_battery().len() >= 20);
    }

    #[test]
    fn probe_patterns() {
        let product = MonomialChart::monomial(2, vec![vec![1, 1]]).unwrap();
        let r = surjectivity_transfer_probe(&product, 5, 6, 20, 3, 1).unwrap();
        assert_eq!((r.hits, r.mismatches, r.errors), (20, 0, 0));
        let square = MonomialChart::monomial(1, vec![vec![2]]).unwrap();
        let r = surjectivity_transfer_probe(&square, 5, 6, 40, 3, 1).unwrap();
        assert_eq!(r.mismatches, 0);
        for c in &r.cells {
            if c.valuation % 2 == 1 {
                assert_eq!(c.zp, ProbeOutcome::Miss);
            }
        }
        let two = MonomialChart::monomial(2, vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert!(surjectivity_transfer_probe(&two, 5, 6, 1, 1, 0).is_err());
    }
}
