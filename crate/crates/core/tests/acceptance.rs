//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are printed even when everything passes.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hlab_core::experiments::{
    ax_kochen_witness, default_battery, surjectivity_transfer_probe, transfer_battery, FormInstance, SearchConfig,
};
use hlab_core::formula_lang::{
    evaluate, interpret_residue_field, Assignment, EvalConfig, Formula, RingTerm, Sort, TruthValue,
};
use hlab_core::hensel::LiftProblem;
use hlab_core::local_arith::is_prime;
use hlab_core::residue_monoid::{mr_mul, s_a, ResidueValue};
use hlab_core::{
    embed_integer, log_hensel_solve, log_smooth_at, mres, newton_lift, plus_mod, surjectivity_probe, tau_p,
    LocalElement, MonomialChart, MultRes, Polynomial, RingSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn primes(lo: u32, hi: u32) -> Vec<u32> {
    (lo..=hi).filter(|&q| is_prime(q as u64)).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn to_int(x: &LocalElement) -> u128 {
    let p = x.ring().p() as u128;
    x.abs_digits().iter().rev().fold(0, |acc, &d| acc * p + d as u128)
}

fn criterion_1() -> Outcome {
    let ring = RingSpec::padic(3, 10).unwrap();
    let vars = Polynomial::default_vars(1);
    let eq = &Polynomial::var(vars.clone(), 0).pow(2) - &Polynomial::constant(vars, 7);
    let start = Instant::now();
    let root = newton_lift(&[eq], &[embed_integer(1, ring)]).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let x = to_int(&root[0]);
    let modulus = 3u128.pow(10);
    ensure(x * x % modulus == 7, || format!("x = {x}, x^2 mod 3^10 = {}", x * x % modulus))?;
    ensure(x % 3 == 1, || format!("x = {x} does not reduce to 1"))?;
    ensure(elapsed < Duration::from_millis(1), || format!("took {elapsed:?}"))?;
    Ok(format!("x = {x}, x^2 = 7 mod 3^10, {:.3} ms", elapsed.as_secs_f64() * 1e3))
}

/// Multiplicative residue of a nonzero integer below `p^n`, by plain
/// integer arithmetic.
fn int_residue(mut a: u128, p: u128) -> (u64, u32) {
    let mut v = 0;
    while a % p == 0 {
        a /= p;
        v += 1;
    }
    (v, (a % p) as u32)
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checks = 0u64;
    for p in [2u32, 3, 5, 7, 11] {
        let n = 6;
        let zp = RingSpec::padic(p as u64, n).unwrap();
        let fpt = zp.counterpart();
        let modulus = (p as u128).pow(n);
        let random_res = |rng: &mut ChaCha8Rng| {
            if rng.gen_ratio(1, 10) {
                MultRes::zero(zp)
            } else {
                MultRes::pos(zp, rng.gen_range(0..4), rng.gen_range(1..p)).unwrap()
            }
        };
        for _ in 0..10_000 {
            // mres is multiplicative, checked against integer arithmetic.
            let a = rng.gen_range(1..modulus);
            let b = rng.gen_range(1..modulus);
            let ab = a * b % modulus;
            let (ea, eb) = (embed_integer(a as i128, zp), embed_integer(b as i128, zp));
            let prod = ea.mul(&eb).unwrap();
            if ab != 0 {
                let (v, u) = int_residue(ab, p as u128);
                let expected = MultRes::pos(zp, v, u).unwrap();
                let got = mr_mul(&mres(&ea).unwrap(), &mres(&eb).unwrap()).unwrap();
                ensure(mres(&prod).unwrap() == expected && got == expected, || {
                    format!("p = {p}: mres({a} * {b}) = {got:?}, expected {expected:?}")
                })?;
            }
            // +mod: invertible or zero, with s_A-image the sum of the images.
            let (x, y) = (random_res(&mut rng), random_res(&mut rng));
            let s = plus_mod(&x, &y).unwrap();
            let sum = (s_a(&x).value() + s_a(&y).value()) % p;
            ensure(s_a(&s).value() == sum && (s.is_zero() || s.is_invertible()), || {
                format!("p = {p}: {x:?} +mod {y:?} = {s:?}")
            })?;
            // tau_p commutes with the monoid operations and s_A.
            let (tx, ty) = (tau_p(&x).unwrap(), tau_p(&y).unwrap());
            ensure(tx.ring() == fpt, || "tau_p lands in the wrong ring".into())?;
            ensure(tau_p(&mr_mul(&x, &y).unwrap()).unwrap() == mr_mul(&tx, &ty).unwrap(), || {
                format!("p = {p}: tau_p(x * y) differs for {x:?}, {y:?}")
            })?;
            ensure(tau_p(&s).unwrap() == plus_mod(&tx, &ty).unwrap(), || {
                format!("p = {p}: tau_p(x +mod y) differs for {x:?}, {y:?}")
            })?;
            ensure(s_a(&tx).value() == s_a(&x).value(), || format!("p = {p}: s_A(tau_p {x:?}) differs"))?;
            checks += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("{checks} randomized checks over p in {{2,3,5,7,11}}, {:.2} s", elapsed.as_secs_f64()))
}

/// Re-verifies a witness through ring arithmetic and returns its residues.
fn check_witness(instance: &FormInstance, cfg: &SearchConfig) -> Result<Vec<u32>, String> {
    let report = ax_kochen_witness(instance, cfg).map_err(|e| format!("{} over {}: {e}", instance.form, instance.ring))?;
    let point = report.point().map_err(|e| e.to_string())?;
    let value = instance.form.eval_in(instance.ring, &point).map_err(|e| e.to_string())?;
    ensure(value.is_zero_at_precision(), || format!("{} at witness is {value}", instance.form))?;
    ensure(point.iter().any(LocalElement::is_unit), || "witness has no unit coordinate".into())?;
    ensure(point.iter().all(|x| x.precision() == instance.ring.precision()), || "witness precision".into())?;
    Ok(point.iter().map(LocalElement::residue).collect())
}

fn both_rings(coeffs: &[i128], d: u32, p: u32, cfg: &SearchConfig) -> Result<(), String> {
    let zp = RingSpec::padic(p as u64, 8).unwrap();
    let a = check_witness(&FormInstance::diagonal(coeffs, d, zp).unwrap(), cfg)?;
    let b = check_witness(&FormInstance::diagonal(coeffs, d, zp.counterpart()).unwrap(), cfg)?;
    ensure(a == b, || format!("p = {p}: residues differ between rings: {a:?} vs {b:?}"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cfg = SearchConfig::default();
    let ps = primes(3, 97);
    for &p in &ps {
        for _ in 0..20 {
            let coeffs: Vec<i128> = (0..5).map(|_| rng.gen_range(1..p) as i128).collect();
            both_rings(&coeffs, 2, p, &cfg)?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("{} forms over {} primes, both rings, {:.2} s", 20 * ps.len(), ps.len(), elapsed.as_secs_f64()))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let cfg = SearchConfig::default();
    for p in [7, 13, 19, 31] {
        both_rings(&[1; 10], 3, p, &cfg)?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("sum of 10 cubes for p in {{7,13,19,31}}, both rings, {:.2} s", elapsed.as_secs_f64()))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let battery = default_battery();
    ensure(battery.len() >= 20, || format!("battery has only {} sentences", battery.len()))?;
    let ps = primes(3, 53);
    let cfg = EvalConfig::new(RingSpec::padic(3, 8).unwrap());
    let report = transfer_battery(&battery, &ps, &cfg).map_err(|e| e.to_string())?;
    if let Some(c) = report.findings().next() {
        return Err(format!("p = {}: {} is {} over Z_p, {} over F_p[[t]]", c.p, c.sentence, c.zp, c.fpt));
    }
    // Determinate square-root verdicts must match the residue table.
    for c in &report.cells {
        let Some(rest) = c.sentence.strip_prefix("exists x. x*x = ") else { continue };
        let Ok(k) = rest.parse::<i64>() else { continue };
        let target = k.rem_euclid(c.p as i64) as u64;
        if target == 0 {
            continue;
        }
        let square = (1..c.p as u64).any(|x| x * x % c.p as u64 == target);
        if let Some(v) = c.zp.as_bool() {
            ensure(v == square, || format!("p = {}: {} evaluated {v}", c.p, c.sentence))?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} sentences x {} primes: {} agree, {} unknown, 0 disagree, {:.2} s",
        battery.len(),
        ps.len(),
        report.agree,
        report.unknown,
        elapsed.as_secs_f64()
    ))
}

fn random_term(rng: &mut ChaCha8Rng, vars: &[&str]) -> RingTerm {
    let monomials = rng.gen_range(1..=3);
    let mut acc: Option<RingTerm> = None;
    for _ in 0..monomials {
        let mut t = RingTerm::Int(rng.gen_range(-3..=3));
        for _ in 0..rng.gen_range(0..=2) {
            let v = vars[rng.gen_range(0..vars.len())];
            t = RingTerm::Mul(Box::new(t), Box::new(RingTerm::var(v)));
        }
        if rng.gen_ratio(1, 6) {
            t = RingTerm::Pow(Box::new(t), 2);
        }
        acc = Some(match acc {
            None => t,
            Some(a) if rng.gen() => RingTerm::Add(Box::new(a), Box::new(t)),
            Some(a) => RingTerm::Sub(Box::new(a), Box::new(t)),
        });
    }
    acc.expect("at least one monomial")
}

/// Random ring formula; `z` only occurs under a binder so at most `x` and
/// `y` are free.
fn random_formula(rng: &mut ChaCha8Rng, depth: u32, scope: &[&'static str]) -> Formula {
    let mut vars = vec!["x", "y"];
    if scope.contains(&"z") {
        vars.push("z");
    }
    if depth == 0 || rng.gen_ratio(1, 4) {
        return Formula::RingEq(random_term(rng, &vars), random_term(rng, &vars));
    }
    let sub = |rng: &mut ChaCha8Rng| random_formula(rng, depth - 1, scope);
    match rng.gen_range(0..7) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        3 => Formula::Implies(Box::new(sub(rng)), Box::new(sub(rng))),
        4 => Formula::Iff(Box::new(sub(rng)), Box::new(sub(rng))),
        k => {
            let v = ["x", "y", "z"][rng.gen_range(0..3)];
            let mut inner = scope.to_vec();
            inner.push(v);
            let body = random_formula(rng, depth - 1, &inner);
            if k == 5 {
                Formula::exists(Sort::Ring, v, body)
            } else {
                Formula::forall(Sort::Ring, v, body)
            }
        }
    }
}

fn term_mod_p(t: &RingTerm, env: &BTreeMap<String, i128>, p: i128) -> i128 {
    let r = |t: &RingTerm| term_mod_p(t, env, p);
    match t {
        RingTerm::Var(v) => env[v],
        RingTerm::Int(n) => n.rem_euclid(p),
        RingTerm::Add(a, b) => (r(a) + r(b)).rem_euclid(p),
        RingTerm::Sub(a, b) => (r(a) - r(b)).rem_euclid(p),
        RingTerm::Mul(a, b) => (r(a) * r(b)).rem_euclid(p),
        RingTerm::Neg(a) => (-r(a)).rem_euclid(p),
        RingTerm::Pow(a, e) => (0..*e).fold(1, |acc, _| acc * r(a) % p),
    }
}

/// Exact truth over the field `F_p`.
fn truth_over_fp(phi: &Formula, env: &mut BTreeMap<String, i128>, p: i128) -> bool {
    match phi {
        Formula::RingEq(a, b) => term_mod_p(a, env, p) == term_mod_p(b, env, p),
        Formula::Not(a) => !truth_over_fp(a, env, p),
        Formula::And(a, b) => truth_over_fp(a, env, p) && truth_over_fp(b, env, p),
        Formula::Or(a, b) => truth_over_fp(a, env, p) || truth_over_fp(b, env, p),
        Formula::Implies(a, b) => !truth_over_fp(a, env, p) || truth_over_fp(b, env, p),
        Formula::Iff(a, b) => truth_over_fp(a, env, p) == truth_over_fp(b, env, p),
        Formula::Exists(_, v, body) | Formula::Forall(_, v, body) => {
            let saved = env.get(v).copied();
            let mut results = (0..p).map(|c| {
                env.insert(v.clone(), c);
                truth_over_fp(body, env, p)
            });
            let out = if matches!(phi, Formula::Exists(..)) { results.any(|b| b) } else { results.all(|b| b) };
            match saved {
                Some(s) => env.insert(v.clone(), s),
                None => env.remove(v),
            };
            out
        }
        Formula::ResEq(..) => unreachable!("ring formulas only"),
    }
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let corpus: Vec<Formula> = (0..200).map(|_| random_formula(&mut rng, 3, &[])).collect();
    let mut cases = 0u64;
    for phi in &corpus {
        let theta = interpret_residue_field(phi).map_err(|e| e.to_string())?;
        let free: Vec<String> = phi.free_variables().into_iter().map(|(_, v)| v).collect();
        ensure(free.len() <= 2, || format!("{phi} has {} free variables", free.len()))?;
        for p in [2u32, 3, 5, 7] {
            for ring in [RingSpec::padic(p as u64, 8).unwrap(), RingSpec::power_series(p as u64, 8).unwrap()] {
                let cfg = EvalConfig::new(ring);
                let total = (p as u64).pow(free.len() as u32);
                for code in 0..total {
                    let mut env = BTreeMap::new();
                    let mut asg = Assignment::new();
                    let mut rest = code;
                    for v in &free {
                        let c = (rest % p as u64) as u32;
                        rest /= p as u64;
                        env.insert(v.clone(), c as i128);
                        let m = MultRes::from_value(ring, ResidueValue::Pos { val: 0, unit: c })
                            .unwrap_or_else(|| MultRes::zero(ring));
                        asg.set_residue(v, m);
                    }
                    let expected = TruthValue::from_bool(truth_over_fp(phi, &mut env, p as i128));
                    let got = evaluate(&theta, &asg, &cfg).map_err(|e| format!("{theta}: {e}"))?;
                    ensure(got == expected, || {
                        format!("p = {p}, {}: {phi} at {env:?} is {expected}, rewrite gives {got}", ring.kind())
                    })?;
                    cases += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} formulas, {cases} assignments over p in {{2,3,5,7}} and both rings, {:.2} s",
        corpus.len(),
        elapsed.as_secs_f64()
    ))
}

fn random_element(rng: &mut ChaCha8Rng, ring: RingSpec, max_val: u32) -> LocalElement {
    let p = ring.p() as u64;
    let v = rng.gen_range(0..=max_val) as usize;
    let mut digits = vec![0u64; ring.precision() as usize];
    digits[v] = rng.gen_range(1..p);
    for d in digits.iter_mut().skip(v + 1) {
        *d = rng.gen_range(0..p);
    }
    LocalElement::from_digits(ring, &digits).unwrap()
}

fn random_unit_poly(rng: &mut ChaCha8Rng, n: usize, p: u32) -> Polynomial {
    let vars = Polynomial::default_vars(n);
    let mut u = Polynomial::constant(vars.clone(), rng.gen_range(1..p) as i128);
    for _ in 0..rng.gen_range(0..=2) {
        let exp: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=1)).collect();
        let coef = rng.gen_range(-3..=3i128) * p as i128;
        u = &u + &Polynomial::monomial(vars.clone(), exp, coef).unwrap();
    }
    if rng.gen() {
        // A term that is not divisible by p; the unit check happens at a0.
        let exp: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=1)).collect();
        u = &u + &Polynomial::monomial(vars, exp, rng.gen_range(1..=3)).unwrap();
    }
    u
}

/// Checks the three output clauses of a logarithmic lift using only ring
/// arithmetic and residue comparisons.
fn verify_log_lift(problem: &LiftProblem, a: &[LocalElement], effective: u32) -> Result<(), String> {
    let chart = &problem.chart;
    for j in 0..chart.target_dim() {
        let fj = chart.component(j).eval(a).map_err(|e| e.to_string())?;
        let diff = fj.sub(&problem.b[j]).map_err(|e| e.to_string())?;
        ensure(diff.valuation() >= effective, || {
            format!("coordinate {j}: f(a) = {fj}, b = {}, effective precision {effective}", problem.b[j])
        })?;
    }
    for (ai, a0i) in a.iter().zip(&problem.a0) {
        ensure(ai.sub(a0i).unwrap().valuation() >= 1, || format!("{ai} is not congruent to {a0i}"))?;
        ensure(mres(ai).ok() == mres(a0i).ok(), || format!("mres({ai}) differs from mres({a0i})"))?;
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut solved = 0;
    let mut full_precision = 0;
    while solved < 1000 {
        let p = [2u32, 3, 5, 7, 11][rng.gen_range(0..5)];
        let n = rng.gen_range(1..=3);
        let m = rng.gen_range(1..=n.min(2));
        let ring = RingSpec::new(
            if rng.gen() { hlab_core::RingKind::Padic } else { hlab_core::RingKind::PowerSeries },
            p as u64,
            10,
        )
        .unwrap();
        let exponents: Vec<Vec<u32>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(0..=2)).collect()).collect();
        let units: Vec<Polynomial> = (0..m).map(|_| random_unit_poly(&mut rng, n, p)).collect();
        let chart = MonomialChart::new(n, exponents, units).unwrap();
        let a0: Vec<LocalElement> = (0..n).map(|_| random_element(&mut rng, ring, 1)).collect();
        let residues: Vec<u64> = a0.iter().map(|x| x.residue() as u64).collect();
        if !chart.units().iter().all(|u| u.eval(&a0).is_ok_and(|v| v.is_unit())) {
            continue;
        }
        if !log_smooth_at(&chart, &residues, p).unwrap_or(false) {
            continue;
        }
        let image = chart.eval(&a0).map_err(|e| e.to_string())?;
        let b: Vec<LocalElement> = image
            .iter()
            .map(|y| {
                let r = random_element(&mut rng, ring, 0);
                let perturb = LocalElement::one(ring).add(&r.shift(1)).unwrap();
                y.mul(&perturb).unwrap()
            })
            .collect();
        let problem = LiftProblem { chart, a0, b };
        let sol = log_hensel_solve(&problem).map_err(|e| format!("{problem:?}: {e}"))?;
        verify_log_lift(&problem, &sol.point, sol.effective_precision)?;
        if verify_log_lift(&problem, &sol.point, ring.precision()).is_ok() {
            full_precision += 1;
        }
        solved += 1;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{solved} problems solved and verified ({full_precision} exact at full precision), {:.2} s",
        elapsed.as_secs_f64()
    ))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let charts = [
        ("x1*x2", MonomialChart::monomial(2, vec![vec![1, 1]]).unwrap()),
        ("x1^2", MonomialChart::monomial(1, vec![vec![2]]).unwrap()),
    ];
    let mut roundtrips = 0;
    let mut sampled = 0;
    for (name, chart) in &charts {
        for p in [3u32, 5, 7] {
            let zp = RingSpec::padic(p as u64, 8).unwrap();
            for _ in 0..1000 {
                // The same digits in both rings give tau_p-matched residues.
                let digits: Vec<Vec<u64>> = (0..chart.source_dim())
                    .map(|_| random_element(&mut rng, zp, 1).abs_digits().into_iter().map(u64::from).collect())
                    .collect();
                let mut hits = Vec::new();
                for ring in [zp, zp.counterpart()] {
                    let a: Vec<LocalElement> =
                        digits.iter().map(|d| LocalElement::from_digits(ring, d).unwrap()).collect();
                    let b = chart.eval(&a).map_err(|e| e.to_string())?;
                    let found = surjectivity_probe(chart, &b, 2).map_err(|e| format!("{name}, p = {p}: {e}"))?;
                    match found {
                        Some(sol) => {
                            let image = chart.eval(&sol.point).map_err(|e| e.to_string())?;
                            for (y, t) in image.iter().zip(&b) {
                                ensure(y.sub(t).unwrap().valuation() >= sol.effective_precision, || {
                                    format!("{name}, p = {p}: probe returned a non-preimage")
                                })?;
                            }
                            hits.push(true);
                        }
                        None => hits.push(false),
                    }
                }
                ensure(hits == [true, true], || format!("{name}, p = {p}: round trip failed ({hits:?})"))?;
                roundtrips += 1;
            }
            let report = surjectivity_transfer_probe(chart, p, 8, 200, 2, p as u64).map_err(|e| e.to_string())?;
            ensure(report.mismatches == 0 && report.errors == 0, || {
                format!("{name}, p = {p}: {} mismatches, {} errors", report.mismatches, report.errors)
            })?;
            sampled += report.cells.len();
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{roundtrips} round trips per ring, {sampled} matched target samples agree, {:.2} s",
        elapsed.as_secs_f64()
    ))
}

fn main() -> ExitCode {
    // Under `cargo test -- --list` or filtered runs, behave like an empty suite.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("Hensel lift exactness", criterion_1),
        ("monoid and tau_p properties", criterion_2),
        ("quadratic forms in 5 variables", criterion_3),
        ("sum of 10 cubes", criterion_4),
        ("transfer battery", criterion_5),
        ("residue-field rewrite round trip", criterion_6),
        ("logarithmic Hensel contract", criterion_7),
        ("surjectivity probe round trip", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
