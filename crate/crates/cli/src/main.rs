mod config;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use hlab_core::experiments::{
    ax_kochen_witness, default_battery, surjectivity_transfer_probe, transfer_battery, ExperimentError, FormInstance,
    SearchConfig,
};
use hlab_core::formula_lang::{
    evaluate_traced, interpret_residue_field, parse, parse_ring_term, realizability_formula, Assignment, EvalConfig,
    Formula, FormulaError,
};
use hlab_core::hensel::{lift, LiftProblemDoc, PolynomialSystem};
use hlab_core::local_arith::is_prime;
use hlab_core::residue_monoid::ResidueValue;
use hlab_core::{
    embed_integer, log_hensel_solve, mres, ArithError, HenselError, LocalElement, MonomialChart, MultRes, RingKind,
    RingSpec,
};

use config::{load_config, Defaults};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or input files: exit 2.
    Usage(String),
    /// A precondition of the requested computation failed: exit 1.
    Domain(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Domain(m) => f.write_str(m),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Domain(_) => "domain",
        }
    }
}

impl From<FormulaError> for CliError {
    fn from(e: FormulaError) -> Self {
        match e {
            FormulaError::Syntax { .. } | FormulaError::Sort { .. } | FormulaError::InvalidConfig(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<HenselError> for CliError {
    fn from(e: HenselError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<ArithError> for CliError {
    fn from(e: ArithError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Formula(f) => f.into(),
            ExperimentError::Arith(a) => a.into(),
            other => CliError::Domain(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RingArg {
    Zp,
    Fpt,
}

#[derive(Debug, Parser)]
#[command(name = "hlab", version, about = "Hensel lifting, residue monoids and transfer experiments over Z_p and F_p[[t]]")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Ring: zp (p-adic integers) or fpt (power series over F_p)
    #[arg(long, global = true, value_enum)]
    ring: Option<RingArg>,
    /// Residue characteristic
    #[arg(long, global = true)]
    p: Option<u64>,
    /// Working precision N (elements are known modulo m^N)
    #[arg(long, global = true)]
    prec: Option<u32>,
    /// Ring quantifiers range over classes modulo m^depth
    #[arg(long, global = true)]
    depth: Option<u32>,
    /// Largest valuation enumerated by residue quantifiers
    #[arg(long = "val-cap", global = true)]
    val_cap: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sample budget for randomized searches
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Formula text
    #[arg(long, global = true, allow_hyphen_values = true)]
    formula: Option<String>,
    /// Input file (formula, sentence list or lift problem)
    #[arg(long, global = true)]
    file: Option<PathBuf>,
    /// Monomial chart as JSON
    #[arg(long, global = true)]
    chart: Option<PathBuf>,
    /// Machine-readable output
    #[arg(long, global = true)]
    json: bool,
    /// Config file with defaults (key = value)
    #[arg(long, global = true, env = "HLAB_CONFIG")]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a formula with three-valued bounded semantics
    Eval {
        /// Free variable value: `x=10` (ring) or `%a=zero`, `%a=VAL:UNIT` (residue)
        #[arg(long = "let", allow_hyphen_values = true)]
        bindings: Vec<String>,
        /// Do not upgrade unknown existentials through Hensel lifting
        #[arg(long)]
        no_certify: bool,
    },
    /// Translate a ring formula into the residue language, or emit the
    /// realizability formula of a chart
    Rewrite,
    /// Newton-lift a simple root of a square polynomial system
    Lift {
        /// Equation `P = 0`, given as the term P; repeat once per equation
        #[arg(long = "eq", required = true, allow_hyphen_values = true)]
        eqs: Vec<String>,
        /// Starting value (an integer) for each variable, in order of appearance
        #[arg(long = "at", required = true, allow_hyphen_values = true)]
        at: Vec<i128>,
    },
    /// Solve a logarithmic lifting problem read from --file
    Loghensel,
    /// Find and lift a nontrivial zero of a form
    Axkochen {
        #[arg(long, default_value_t = 2)]
        degree: u32,
        /// Number of variables of the diagonal form (default degree^2 + 1)
        #[arg(long)]
        vars: Option<usize>,
        /// Homogeneous form to use instead of the diagonal one
        #[arg(long, allow_hyphen_values = true)]
        form: Option<String>,
    },
    /// Compare sentence truth over Z_p and F_p[[t]] across primes
    Transfer {
        /// Primes to sweep (default: every prime from 3 to 53)
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u32>,
    },
    /// Probe a chart for surjectivity over both rings with matched targets
    Probe {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Largest source valuation searched
        #[arg(long, default_value_t = 3)]
        bound: u32,
    },
    /// Multiplicative residue of an integer
    Mres {
        #[arg(long = "int", allow_hyphen_values = true)]
        int: i128,
    },
}

struct Settings {
    defaults: Defaults,
    kind: RingKind,
    json: bool,
}

impl Settings {
    fn ring(&self) -> Result<RingSpec, CliError> {
        Ok(RingSpec::new(self.kind, self.defaults.p, self.defaults.prec)?)
    }

    fn prime(&self) -> Result<u32, CliError> {
        Ok(self.ring()?.p())
    }

    fn eval_config(&self) -> Result<EvalConfig, CliError> {
        Ok(EvalConfig::new(self.ring()?).with_depth(self.defaults.depth).with_val_cap(self.defaults.val_cap))
    }

    fn search(&self) -> SearchConfig {
        SearchConfig { budget: self.defaults.budget, seed: self.defaults.seed }
    }
}

fn resolve(g: &GlobalArgs) -> Result<Settings, CliError> {
    let file = load_config(g.config.as_deref())?;
    let defaults = Defaults {
        p: g.p.unwrap_or(file.p),
        prec: g.prec.unwrap_or(file.prec),
        depth: g.depth.unwrap_or(file.depth),
        val_cap: g.val_cap.unwrap_or(file.val_cap),
        seed: g.seed.unwrap_or(file.seed),
        budget: g.budget.unwrap_or(file.budget),
    };
    let kind = match g.ring.unwrap_or(RingArg::Zp) {
        RingArg::Zp => RingKind::Padic,
        RingArg::Fpt => RingKind::PowerSeries,
    };
    let settings = Settings { defaults, kind, json: g.json };
    settings.ring()?;
    Ok(settings)
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn formula_text(g: &GlobalArgs) -> Result<String, CliError> {
    match (&g.formula, &g.file) {
        (Some(f), None) => Ok(f.clone()),
        (None, Some(path)) => read(path),
        (Some(_), Some(_)) => Err(CliError::Usage("give either --formula or --file, not both".into())),
        (None, None) => Err(CliError::Usage("a formula is required (--formula or --file)".into())),
    }
}

fn load_chart(path: &Path) -> Result<MonomialChart, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn element_json(x: &LocalElement) -> serde_json::Value {
    json!({ "digits": x.abs_digits(), "display": x.to_string() })
}

fn parse_binding(text: &str, ring: RingSpec, asg: &mut Assignment) -> Result<(), CliError> {
    let bad = || CliError::Usage(format!("bad --let `{text}`: expected x=INT, %a=zero or %a=VAL:UNIT"));
    let (name, value) = text.split_once('=').ok_or_else(bad)?;
    let (name, value) = (name.trim(), value.trim());
    if let Some(res) = name.strip_prefix('%') {
        let m = if value == "zero" {
            MultRes::zero(ring)
        } else {
            let (v, u) = value.split_once(':').ok_or_else(bad)?;
            let v: u64 = v.parse().map_err(|_| bad())?;
            let u: u32 = u.parse().map_err(|_| bad())?;
            MultRes::from_value(ring, ResidueValue::Pos { val: v, unit: u })
                .ok_or_else(|| CliError::Usage(format!("unit digit {u} is not in [1, p-1]")))?
        };
        asg.set_residue(res, m);
    } else {
        let n: i128 = value.parse().map_err(|_| bad())?;
        asg.set_ring(name, embed_integer(n, ring));
    }
    Ok(())
}

fn cmd_eval(g: &GlobalArgs, s: &Settings, bindings: &[String], no_certify: bool) -> Result<String, CliError> {
    let phi = parse(&formula_text(g)?)?;
    let cfg = s.eval_config()?.with_certify(!no_certify);
    let mut asg = Assignment::new();
    for b in bindings {
        parse_binding(b, cfg.ring, &mut asg)?;
    }
    let ev = evaluate_traced(&phi, &asg, &cfg)?;
    let certs: Vec<String> = ev.certificates.iter().map(ToString::to_string).collect();
    if s.json {
        return Ok(json!({
            "formula": phi.to_string(),
            "ring": cfg.ring,
            "depth": cfg.ring_depth,
            "val_cap": cfg.val_cap,
            "value": ev.value,
            "certificates": certs,
        })
        .to_string());
    }
    Ok(match certs.first() {
        Some(c) => format!("{} (certified: {c})", ev.value),
        None => ev.value.to_string(),
    })
}

fn cmd_rewrite(g: &GlobalArgs, s: &Settings) -> Result<String, CliError> {
    let (input, output) = match &g.chart {
        Some(path) => {
            let chart = load_chart(path)?;
            (serde_json::to_string(&chart).expect("chart serializes"), realizability_formula(&chart))
        }
        None => {
            let phi: Formula = parse(&formula_text(g)?)?;
            let out = interpret_residue_field(&phi)?;
            (phi.to_string(), out)
        }
    };
    Ok(if s.json { json!({ "input": input, "output": output.to_string() }).to_string() } else { output.to_string() })
}

fn cmd_lift(s: &Settings, eqs: &[String], at: &[i128]) -> Result<String, CliError> {
    let ring = s.ring()?;
    let terms = eqs.iter().map(|e| parse_ring_term(e)).collect::<Result<Vec<_>, _>>()?;
    let mut vars: Vec<String> = Vec::new();
    for t in &terms {
        for v in t.variables() {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
    }
    if vars.len() != terms.len() || at.len() != vars.len() {
        return Err(CliError::Usage(format!(
            "{} equations in {} variables with {} starting values; all three must agree",
            terms.len(),
            vars.len(),
            at.len()
        )));
    }
    let polys = terms.iter().map(|t| t.to_polynomial(&vars)).collect();
    let x0: Vec<LocalElement> = at.iter().map(|&a| embed_integer(a, ring)).collect();
    let sys = PolynomialSystem::new(polys, ring)?;
    let trace = lift(&sys, &x0)?;
    if s.json {
        let root: Vec<_> = trace.root.iter().map(element_json).collect();
        return Ok(json!({ "ring": ring, "vars": vars, "root": root, "defects": trace.defects }).to_string());
    }
    let mut out: Vec<String> = vars.iter().zip(&trace.root).map(|(v, x)| format!("{v} = {x}")).collect();
    out.push(format!("defect valuations {:?}", trace.defects));
    Ok(out.join("\n"))
}

fn cmd_loghensel(g: &GlobalArgs, s: &Settings) -> Result<String, CliError> {
    let path = g.file.as_ref().ok_or_else(|| CliError::Usage("loghensel needs --file with a lift problem".into()))?;
    let doc: LiftProblemDoc =
        serde_json::from_str(&read(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let problem = doc.into_problem(Some(s.ring()?))?;
    let sol = log_hensel_solve(&problem)?;
    if s.json {
        let point: Vec<_> = sol.point.iter().map(element_json).collect();
        return Ok(json!({
            "point": point,
            "effective_precision": sol.effective_precision,
            "pivots": sol.pivots,
        })
        .to_string());
    }
    let mut out: Vec<String> = sol.point.iter().enumerate().map(|(i, x)| format!("x{} = {x}", i + 1)).collect();
    out.push(format!("effective precision {}, moved coordinates {:?}", sol.effective_precision, sol.pivots));
    Ok(out.join("\n"))
}

fn cmd_axkochen(s: &Settings, degree: u32, vars: Option<usize>, form: Option<&str>) -> Result<String, CliError> {
    let ring = s.ring()?;
    let instance = match form {
        Some(text) => {
            let t = parse_ring_term(text)?;
            let mut names = t.variables();
            names.sort();
            let poly = t.to_polynomial(&names);
            let d = poly.total_degree().unwrap_or(0);
            FormInstance::new(poly, d, ring)?
        }
        None => {
            let n = vars.unwrap_or((degree * degree) as usize + 1);
            FormInstance::diagonal(&vec![1; n], degree, ring)?
        }
    };
    let mut warning = String::new();
    if !instance.above_bound() {
        warning = format!("warning: {} variables do not exceed degree^2 = {}\n", instance.n, instance.d * instance.d);
    }
    let report = ax_kochen_witness(&instance, &s.search())?;
    if s.json {
        return Ok(report.to_json());
    }
    Ok(format!("{warning}{report}"))
}

fn primes_between(lo: u32, hi: u32) -> Vec<u32> {
    (lo..=hi).filter(|&q| is_prime(q as u64)).collect()
}

fn cmd_transfer(g: &GlobalArgs, s: &Settings, primes: &[u32]) -> Result<String, CliError> {
    let sentences = match (&g.formula, &g.file) {
        (None, None) => default_battery(),
        (Some(f), None) => vec![parse(f)?],
        (None, Some(path)) => read(path)?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(parse)
            .collect::<Result<_, _>>()?,
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --formula or --file, not both".into())),
    };
    let primes = if primes.is_empty() { primes_between(3, 53) } else { primes.to_vec() };
    if let Some(q) = primes.iter().find(|&&q| !is_prime(q as u64)) {
        return Err(CliError::Usage(format!("{q} is not prime")));
    }
    let report = transfer_battery(&sentences, &primes, &s.eval_config()?)?;
    if s.json {
        let mut lines = report.json_lines();
        lines.push(
            json!({
                "schema": report.schema,
                "summary": { "agree": report.agree, "unknown": report.unknown, "disagree": report.disagree },
                "sentences": report.sentences,
            })
            .to_string(),
        );
        return Ok(lines.join("\n"));
    }
    Ok(report.to_string())
}

fn cmd_probe(g: &GlobalArgs, s: &Settings, samples: usize, bound: u32) -> Result<String, CliError> {
    let path = g.chart.as_ref().ok_or_else(|| CliError::Usage("probe needs --chart".into()))?;
    let chart = load_chart(path)?;
    let report = surjectivity_transfer_probe(&chart, s.prime()?, s.defaults.prec, samples, bound, s.defaults.seed)?;
    if s.json {
        let mut lines = report.json_lines();
        lines.push(
            json!({
                "schema": report.schema,
                "summary": {
                    "hits": report.hits,
                    "misses": report.misses,
                    "errors": report.errors,
                    "mismatches": report.mismatches,
                },
            })
            .to_string(),
        );
        return Ok(lines.join("\n"));
    }
    Ok(report.to_string())
}

fn cmd_mres(s: &Settings, n: i128) -> Result<String, CliError> {
    let ring = s.ring()?;
    let value = if n == 0 {
        MultRes::zero(ring)
    } else {
        mres(&embed_integer(n, ring)).map_err(|e| CliError::Domain(e.to_string()))?
    };
    Ok(serde_json::to_string(&value.value()).expect("residue serializes"))
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let g = &cli.global;
    let s = resolve(g)?;
    match &cli.command {
        Command::Eval { bindings, no_certify } => cmd_eval(g, &s, bindings, *no_certify),
        Command::Rewrite => cmd_rewrite(g, &s),
        Command::Lift { eqs, at } => cmd_lift(&s, eqs, at),
        Command::Loghensel => cmd_loghensel(g, &s),
        Command::Axkochen { degree, vars, form } => cmd_axkochen(&s, *degree, *vars, form.as_deref()),
        Command::Transfer { primes } => cmd_transfer(g, &s, primes),
        Command::Probe { samples, bound } => cmd_probe(g, &s, *samples, *bound),
        Command::Mres { int } => cmd_mres(&s, *int),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(&cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            if cli.global.json {
                println!("{}", json!({ "error": e.to_string(), "kind": e.kind() }));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.code())
        }
    }
}
