//! Verification suites. Each one exercises a single statement at the
//! configured budget and reports every individual check.

use std::time::Instant;

use deltajet::elliptic::{
    cochar_recurrence, hasse_ok, manin_kernel_leading, psi_elliptic, valuation_profile, EllipticCurve, ProfileBranch,
};
use deltajet::gm::{
    cocharacter_sigma, cocharacter_with, p_isogeny_noninjectivity, psi_eval, verify_section, y_leading,
    y_structure, ybar_sequence, SurjectivityWitnesses,
};
use deltajet::jet::gm_ctx;
use deltajet::limits::{perfection_reduce, LimitElement, PerfectionElement, TowerElement};
use deltajet::modular::{
    coordinate_identities, covariance_check, divisor_sum, eisenstein, f1_expansion, f_lambda_expansion,
};
use deltajet::quasilinear::{decompose, regular_sequence_check, synthetic, Degeneracy, DerivativeClass};
use deltajet::{Error, JetCtx, JetPoly, Monomial, Padic, PadicLike, Result, Scalar};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::report::{Check, Status, VerificationReport};
use crate::{pretty, with_prime, Config, Inputs, Outcome, EXIT_BUDGET, EXIT_MATH, EXIT_PASS, EXIT_USAGE, SCHEMA};

pub struct SuiteInfo {
    pub name: &'static str,
    pub lemma: &'static str,
    /// Wall-time target in seconds.
    pub time_limit: f64,
}

pub const SUITES: [SuiteInfo; 11] = [
    SuiteInfo { name: "delta-axioms", lemma: "p-derivation axioms and phi delta = delta phi on B_2", time_limit: 5.0 },
    SuiteInfo { name: "gm-additivity", lemma: "the G_m character is additive on units", time_limit: 5.0 },
    SuiteInfo { name: "gm-section", lemma: "the cocharacter is a section of the G_m character", time_limit: 10.0 },
    SuiteInfo { name: "gm-yn", lemma: "structure of y_n = delta^n(x^p) mod p", time_limit: 20.0 },
    SuiteInfo { name: "gm-witnesses", lemma: "[p] on limit jets is surjective but not injective", time_limit: 15.0 },
    SuiteInfo { name: "elliptic-integrality", lemma: "integrality of the elliptic delta-character", time_limit: 30.0 },
    SuiteInfo { name: "manin-kernel", lemma: "leading form of the elliptic delta-character in B_2", time_limit: 10.0 },
    SuiteInfo { name: "cochar-recurrence", lemma: "valuation dichotomy of the elliptic cocharacter", time_limit: 1.0 },
    SuiteInfo { name: "quasilinear", lemma: "prolongations of quasi-linear forms and their mod-p covers", time_limit: 20.0 },
    SuiteInfo { name: "modular", lemma: "delta-Fourier expansions and isogeny covariance", time_limit: 20.0 },
    SuiteInfo { name: "limits", lemma: "perfection reduction and the ramified tower", time_limit: 10.0 },
];

pub fn suite_info(name: &str) -> Option<&'static SuiteInfo> {
    SUITES.iter().find(|s| s.name == name)
}

type SuiteResult = Result<(Value, Vec<Check>)>;

/// Run one suite. Unknown names are a usage error.
pub fn run_suite(name: &str, cfg: &Config, inp: &Inputs) -> Result<VerificationReport> {
    let sp = suite_info(name).ok_or_else(|| Error::Invalid(format!("unknown suite {name:?}")))?;
    let t0 = Instant::now();
    let res: SuiteResult = match name {
        "delta-axioms" => with_prime!(cfg.p, delta_axioms(cfg)),
        "gm-additivity" => with_prime!(cfg.p, gm_additivity(cfg)),
        "gm-section" => with_prime!(cfg.p, gm_section(cfg)),
        "gm-yn" => with_prime!(cfg.p, gm_yn(cfg)),
        "gm-witnesses" => with_prime!(cfg.p, gm_witnesses(cfg)),
        "elliptic-integrality" => with_prime!(cfg.p, elliptic_integrality(cfg, inp)),
        "manin-kernel" => with_prime!(cfg.p, manin_kernel(cfg, inp)),
        "cochar-recurrence" => with_prime!(cfg.p, cochar_profile(cfg)),
        "quasilinear" => with_prime!(cfg.p, quasilinear_suite(cfg)),
        "modular" => with_prime!(cfg.p, modular_suite(cfg, inp)),
        "limits" => with_prime!(cfg.p, limits_suite(cfg)),
        _ => unreachable!(),
    };
    let runtime = t0.elapsed().as_secs_f64();
    let base = json!({"p": cfg.p, "seed": cfg.seed});
    let (parameters, checks, status, defect) = match res {
        Ok((params, checks)) => {
            let bad = checks.iter().find(|c| !c.ok);
            let status = if bad.is_some() { Status::Fail } else { Status::Pass };
            let defect = bad.map(|c| format!("{}: {}", c.name, c.detail));
            (merge(base, params), checks, status, defect)
        }
        Err(e) if e.is_usage() => return Err(e),
        Err(e) => {
            let status = if e.is_budget() { Status::SkippedBudget } else { Status::Fail };
            (base, Vec::new(), status, Some(e.to_string()))
        }
    };
    Ok(VerificationReport {
        suite: sp.name.to_string(),
        lemma: sp.lemma.to_string(),
        parameters,
        status,
        defect,
        runtime,
        time_limit: sp.time_limit,
        checks,
    })
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Some(m), Value::Object(o)) = (a.as_object_mut(), b) {
        m.extend(o);
    }
    a
}

/// `verify <suite|all|list>`.
pub fn verify_command(suite: &str, cfg: &Config, inp: &Inputs) -> Outcome {
    if suite == "list" {
        let names: Vec<Value> = SUITES.iter().map(|s| json!({"suite": s.name, "lemma": s.lemma})).collect();
        let stdout = if cfg.json {
            pretty(&json!({"schema": SCHEMA, "suites": names}))
        } else {
            SUITES.iter().map(|s| format!("{:22} {}\n", s.name, s.lemma)).collect()
        };
        return Outcome { code: EXIT_PASS, stdout, stderr: String::new() };
    }
    let names: Vec<&str> = if suite == "all" { SUITES.iter().map(|s| s.name).collect() } else { vec![suite] };
    let jobs = cfg.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(p) => p,
        Err(e) => return crate::error_outcome(&Error::Invalid(e.to_string())),
    };
    let t0 = Instant::now();
    let results: Vec<Result<VerificationReport>> =
        pool.install(|| names.par_iter().map(|n| run_suite(n, cfg, inp)).collect());
    let total = t0.elapsed().as_secs_f64();
    let mut reports = Vec::new();
    for r in results {
        match r {
            Ok(r) => reports.push(r),
            Err(e) => return crate::error_outcome(&e),
        }
    }
    let code = if reports.iter().any(|r| r.status == Status::Fail) {
        EXIT_MATH
    } else if reports.iter().any(|r| r.status == Status::SkippedBudget) {
        EXIT_BUDGET
    } else {
        EXIT_PASS
    };
    let stdout = if cfg.json {
        pretty(&json!({"schema": SCHEMA, "budget": cfg.budget(), "reports": reports, "runtime": total}))
    } else {
        let mut s: String = reports.iter().map(|r| r.line() + "\n").collect();
        let passed = reports.iter().filter(|r| r.passed()).count();
        s.push_str(&format!("{passed}/{} suites passed in {total:.2}s\n", reports.len()));
        s
    };
    debug_assert!(code != EXIT_USAGE);
    Outcome { code, stdout, stderr: String::new() }
}

fn rng_for(cfg: &Config, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt)
}

/// Uniform element of `Z/p^prec`, as a p-adic number at that precision.
fn random_padic<const P: u32, R: Rng>(rng: &mut R, prec: i64) -> Padic<P> {
    let mut n = BigInt::from(0);
    let mut pk = BigInt::from(1);
    for _ in 0..prec {
        n += &pk * rng.gen_range(0..P);
        pk *= P;
    }
    Padic::with_prec(n, prec)
}

fn random_unit<const P: u32, R: Rng>(rng: &mut R, prec: i64) -> Padic<P> {
    loop {
        let u = random_padic::<P, R>(rng, prec);
        if u.is_unit() {
            return u;
        }
    }
}

/// A sparse random polynomial with exponents bounded by `caps`.
fn random_poly<const P: u32, R: Rng>(rng: &mut R, ctx: &JetCtx, caps: &[i64], terms: usize) -> JetPoly<Padic<P>> {
    let mut f = JetPoly::zero(ctx.clone());
    for _ in 0..terms {
        let mut m = Monomial::ONE;
        for (i, &c) in caps.iter().enumerate() {
            m.0[i] = rng.gen_range(0..=c);
        }
        let c = random_padic::<P, R>(rng, ctx.prec);
        f = f.add(&JetPoly::monomial(ctx.clone(), m, c));
    }
    f
}

fn count_ok(v: &[bool]) -> Value {
    json!({"passed": v.iter().filter(|&&b| b).count(), "total": v.len()})
}

fn delta_axioms<const P: u32>(cfg: &Config) -> SuiteResult {
    let budget = cfg.budget();
    // delta(phi(f)) for f in B_2 lives in B_4
    budget.check_order(4)?;
    let n = cfg.prec;
    let pairs = 200;
    let mut rng = rng_for(cfg, 1);
    // one extra digit, since delta costs one
    let ctx = JetCtx::new("T", 2).with_prec(n + 1);
    let (mut add, mut mul, mut comm, mut prec_ok) = (vec![], vec![], vec![], vec![]);
    for _ in 0..pairs {
        let (tf, tg) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let f = random_poly::<P, _>(&mut rng, &ctx, &[2, 2, 1], tf);
        let g = random_poly::<P, _>(&mut rng, &ctx, &[2, 2, 1], tg);
        let r = JetPoly::verify_p_derivation_axioms(&f, &g)?;
        add.push(r.additive);
        mul.push(r.multiplicative);
        prec_ok.push(r.prec >= n);
        let lhs = f.delta()?.phi()?;
        let rhs = f.phi()?.delta()?;
        comm.push(lhs.equals(&rhs) && lhs.prec().min(rhs.prec()) >= n);
    }
    let all = |v: &[bool]| v.iter().all(|&b| b);
    let checks = vec![
        Check::new("additive axiom", all(&add), count_ok(&add)),
        Check::new("multiplicative axiom", all(&mul), count_ok(&mul)),
        Check::new(format!("compared modulo p^{n}"), all(&prec_ok), count_ok(&prec_ok)),
        Check::new("phi delta = delta phi", all(&comm), count_ok(&comm)),
    ];
    Ok((json!({"N": n, "pairs": pairs, "ring": "B_2"}), checks))
}

fn gm_additivity<const P: u32>(cfg: &Config) -> SuiteResult {
    let n = cfg.prec;
    let tol = n - 2;
    if tol < 1 {
        return Err(Error::PrecisionExhausted(format!("additivity needs N >= 3, got {n}")));
    }
    let mut rng = rng_for(cfg, 2);
    let mut oks = Vec::new();
    let mut worst: Option<i64> = None;
    for _ in 0..100 {
        let u = random_unit::<P, _>(&mut rng, n);
        let v = random_unit::<P, _>(&mut rng, n);
        let d = psi_eval(&(u.clone() * v.clone()))? - psi_eval(&u)? - psi_eval(&v)?;
        if d.prec() < tol {
            return Err(Error::PrecisionExhausted(format!("psi known only to p^{}", d.prec())));
        }
        let val = d.val_lower();
        worst = Some(worst.map_or(val, |w| w.min(val)));
        oks.push(val >= tol);
    }
    let checks = vec![Check::new(
        format!("psi(uv) - psi(u) - psi(v) = 0 mod p^{tol}"),
        oks.iter().all(|&b| b),
        json!({"pairs": count_ok(&oks), "min_valuation": worst}),
    )];
    Ok((json!({"N": n, "tolerance": tol, "pairs": 100}), checks))
}

fn gm_section<const P: u32>(cfg: &Config) -> SuiteResult {
    let n = cfg.prec;
    let ms: Vec<u32> = (2..=4).filter(|&m| m <= cfg.stages).collect();
    if ms.is_empty() {
        return Err(Error::Stage { need: 2, budget: cfg.stages });
    }
    let mut checks = Vec::new();
    for &m in &ms {
        let co = cocharacter_sigma::<P>(m, n)?;
        let r = verify_section(&co, m as i64)?;
        let ok = r.ok && r.defect_valuation.is_none_or(|v| v >= m as i64);
        checks.push(Check::new(format!("defect valuation >= {m} at M = {m}"), ok, &r));
    }
    // a_1 moved by p^2: the identity must fail modulo p^2
    let p = P as i64;
    let mut a: Vec<Padic<P>> = (1..=3).map(Padic::p_pow).collect();
    a[0] = Padic::exact(p + p * p);
    let co = cocharacter_with(&a, n)?;
    let r = verify_section(&co, 2)?;
    let broken = !r.ok && r.defect_valuation.is_some_and(|v| v < 2);
    checks.push(Check::new("perturbed a_1 detected modulo p^2", broken, &r));
    Ok((json!({"N": n, "M": ms}), checks))
}

fn gm_yn<const P: u32>(cfg: &Config) -> SuiteResult {
    let n_max = 4;
    cfg.budget().check_order(n_max)?;
    let ybar = ybar_sequence::<P>(n_max)?;
    let mut checks = vec![Check::new("y_1 = 0 mod p", ybar[1].is_empty(), json!({"terms": ybar[1].len()}))];
    let lead2 = y_leading::<P>(2);
    let y2_ok = ybar[2].equals(&lead2.with_ctx(ybar[2].ctx().clone()));
    checks.push(Check::new(
        "y_2 = x^(p^2(p-1)) (x')^p mod p",
        y2_ok,
        json!({"y2": ybar[2].to_text(), "expected": lead2.to_text()}),
    ));
    for n in 3..=n_max {
        let r = y_structure::<P>(n, &ybar[n]);
        checks.push(Check::new(format!("y_{n}: leading term, residual free of x^({}) and x^({n})", n - 1), r.ok, &r));
    }
    Ok((json!({"n": n_max}), checks))
}

fn gm_witnesses<const P: u32>(cfg: &Config) -> SuiteResult {
    let (n_max, i_max) = (4usize, 3u32);
    let w = SurjectivityWitnesses::<P>::build(n_max)?;
    let mut bad = Vec::new();
    let mut count = 0;
    for n in 0..=n_max {
        for i in 0..=i_max {
            count += 1;
            if !w.defect(n, i)?.is_zero() {
                bad.push(json!([n, i]));
            }
        }
    }
    let ni = p_isogeny_noninjectivity::<P>(1, cfg.prec)?;
    let checks = vec![
        Check::new(
            format!("[p]^* G_n^(1/p^i) = [x^(n), i] for n <= {n_max}, i <= {i_max}"),
            bad.is_empty(),
            json!({"checked": count, "failures": bad}),
        ),
        Check::new("[p]^*(x') = 0 mod p while [x', 1] survives", ni.ok, &ni),
    ];
    Ok((json!({"n_max": n_max, "i_max": i_max}), checks))
}

fn curve<const P: u32>(inp: &Inputs) -> Result<EllipticCurve<P>> {
    EllipticCurve::<P>::new(inp.a.unwrap_or(1), inp.b.unwrap_or(1))
}

fn elliptic_integrality<const P: u32>(cfg: &Config, inp: &Inputs) -> SuiteResult {
    let e = curve::<P>(inp)?;
    let d = cfg.deg as usize;
    let n = cfg.prec - 2;
    let ps = psi_elliptic(&e, d, n)?;
    let bumped = e.lambda1.clone() + Padic::exact(1);
    let pert = e.clone().with_lambdas(e.lambda0.clone(), bumped);
    // failures show up in low degree, so a short expansion suffices
    let dp = (P as usize * P as usize + P as usize).max(25).min(d);
    let pr = psi_elliptic(&pert, dp, n)?;
    let fail_deg = pr.report.first_failure.as_ref().map(|f| f.degree);
    let checks = vec![
        Check::new(
            "a_p within the Hasse bound",
            hasse_ok(P, e.ap),
            json!({"ap": e.ap, "class": e.class}),
        ),
        Check::new(format!("psi_E integral to T-degree {d} at N = {n}"), ps.report.ok, &ps.report),
        Check::new(
            "lambda_1 + 1 breaks integrality by degree 25",
            !pr.report.ok && fail_deg.is_some_and(|g| g <= 25),
            &pr.report,
        ),
    ];
    Ok((json!({"A": inp.a.unwrap_or(1), "B": inp.b.unwrap_or(1), "D": d, "N": n, "ap": e.ap}), checks))
}

fn manin_kernel<const P: u32>(cfg: &Config, inp: &Inputs) -> SuiteResult {
    let e = curve::<P>(inp)?;
    let n = cfg.prec - 2;
    let r = manin_kernel_leading(&e, cfg.deg as usize, n)?;
    let checks = vec![
        Check::new("(T')^p coefficient = Omega^(p^2) mod p", r.tprime_p_ok, json!(null)),
        Check::new("T' coefficient = lambda_1 Omega^p mod p", r.tprime_ok, json!(null)),
        Check::new("remainder in filtration level 0", r.remainder_level.within(0), json!({"level": r.remainder_level})),
    ];
    Ok((json!({"A": inp.a.unwrap_or(1), "B": inp.b.unwrap_or(1), "D": r.d, "N": n}), checks))
}

fn cochar_profile<const P: u32>(_cfg: &Config) -> SuiteResult {
    let p = Padic::<P>::exact(P);
    let one = Padic::<P>::exact(1);
    let mut checks = Vec::new();
    let div = cochar_recurrence(P, one.clone(), p.clone(), 20);
    let prof = valuation_profile(&div);
    let v = |n: usize| div.a(n).valuation().unwrap_or(i64::MAX);
    // the sequence starts at a_2
    let bounds = (1..=10usize).all(|k| (k == 1 || v(2 * k - 1) >= k as i64) && v(2 * k) >= k as i64);
    checks.push(Check::new(
        "lambda_1 = p: v(a_(2k-1)), v(a_(2k)) >= k for k <= 10",
        bounds && prof.as_ref().is_ok_and(|r| r.branch == ProfileBranch::Divisible),
        prof.as_ref().map_or_else(|e| json!(e.to_string()), |r| json!(r)),
    ));
    let unit = cochar_recurrence(P, one.clone(), one.clone(), 30);
    let prof = valuation_profile(&unit);
    let all_one = (2..=30).all(|n| unit.a(n).valuation() == Some(1));
    checks.push(Check::new(
        "lambda_1 = 1: v(a_n) = 1 for 2 <= n <= 30",
        all_one && prof.as_ref().is_ok_and(|r| r.branch == ProfileBranch::Unit),
        prof.as_ref().map_or_else(|e| json!(e.to_string()), |r| json!(r)),
    ));
    for seq in [&div, &unit] {
        let a3 = -(p.clone() * seq.lambda1.clone());
        checks.push(Check::new(
            format!("a_2 = p, a_3 = -p lambda_1 (lambda_1 = {})", seq.lambda1),
            *seq.a(2) == p && *seq.a(3) == a3,
            json!({"a2": seq.a(2).to_string(), "a3": seq.a(3).to_string()}),
        ));
    }
    Ok((json!({"lambda0": 1, "lambda1": ["p", 1]}), checks))
}

fn quasilinear_suite<const P: u32>(cfg: &Config) -> SuiteResult {
    let (r, s) = (1usize, 1usize);
    let (j_all, j_deep) = (2usize, 3usize);
    // deciding the remainder filtration after j prolongations needs j + r + 2 digits
    let prec = (j_deep + r + 2) as i64;
    if cfg.prec < prec {
        return Err(Error::PrecisionExhausted(format!("quasi-linear suite needs N >= {prec}")));
    }
    let mut rng = rng_for(cfg, 9);
    let forms: Vec<_> =
        (0..20).map(|k| synthetic::<P, _>(&mut rng, r, s, k % 2 == 1, prec)).collect::<Result<_>>()?;
    let mut round = Vec::new();
    let mut law = Vec::new();
    let mut covers = Vec::new();
    let mut classes = Vec::new();
    let mut deep_done = [false, false];
    let mut deep = Vec::new();
    for q in &forms {
        let f = q.reconstruct()?;
        let d = decompose(&f, r, s)?;
        round.push(d.reconstruct()?.equals(&f) && d.degeneracy == q.degeneracy);
        let slot = (q.degeneracy != Degeneracy::Nondegenerate) as usize;
        let depth = if deep_done[slot] { j_all } else { j_deep };
        let rep = regular_sequence_check(q, depth)?;
        if depth == j_deep {
            deep_done[slot] = true;
            deep.push(json!({"degeneracy": q.degeneracy, "j_max": depth, "ok": rep.ok}));
        }
        law.push(rep.coefficient_law.iter().all(|&b| b));
        covers.push(rep.covers.iter().all(|c| c.ok(r, P)));
        let want = match q.degeneracy {
            Degeneracy::Nondegenerate => DerivativeClass::Etale,
            _ => DerivativeClass::Inseparable,
        };
        classes.push(rep.covers.iter().all(|c| c.derivative_class == want));
    }
    let all = |v: &[bool]| v.iter().all(|&b| b);
    let checks = vec![
        Check::new("decomposition round trip", all(&round), count_ok(&round)),
        Check::new("coefficient law a_i -> a_i^(p^j) mod p", all(&law), count_ok(&law)),
        Check::new("covers of degree p with unit leading coefficient", all(&covers), count_ok(&covers)),
        Check::new("etale iff a_0 is a unit, inseparable iff a_0 = 0 mod p", all(&classes), count_ok(&classes)),
        Check::new("prolongation to j = 3", deep_done.iter().all(|&b| b), json!(deep)),
    ];
    Ok((json!({"r": r, "s": s, "forms": forms.len(), "N": prec, "j_max": j_all, "j_deep": j_deep}), checks))
}

fn parse_padic<const P: u32>(s: &str, prec: i64) -> Result<Padic<P>> {
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| Error::Parse(format!("bad number {s:?}")))?;
    let den: BigInt = den.parse().map_err(|_| Error::Parse(format!("bad number {s:?}")))?;
    Padic::from_ratio(&num, &den, prec)
}

pub(crate) fn padic_input<const P: u32>(s: Option<&String>, default: i64, prec: i64) -> Result<Padic<P>> {
    match s {
        Some(s) => parse_padic::<P>(s, prec),
        None => Ok(Padic::exact(default)),
    }
}

fn modular_suite<const P: u32>(cfg: &Config, inp: &Inputs) -> SuiteResult {
    let n = cfg.prec;
    let q = cfg.q_deg;
    let mut checks = Vec::new();
    for (k, c) in [(4u32, 240i64), (6, -504)] {
        let e = eisenstein::<P>(k, 20, n)?;
        let ok = (0..=20).all(|m| {
            let want = if m == 0 { BigInt::from(1) } else { BigInt::from(c) * divisor_sum(m as u64, k - 1) };
            e.coefficient(m, &[]) == Padic::<P>::from_bigint(&want).cap(n)
        });
        checks.push(Check::new(format!("E_{k} matches divisor sums for 20 coefficients"), ok, json!(null)));
    }
    let f1 = f1_expansion::<P>(n)?;
    checks.push(Check::new("f^1 integral", f1.poly.min_val().unwrap_or(0) >= 0, json!({"terms": f1.poly.len()})));
    let lambda = padic_input::<P>(inp.lambda.as_ref(), 1, n)?;
    if !lambda.is_unit() {
        return Err(Error::NotUnit(format!("lambda = {lambda}")));
    }
    let fl = f_lambda_expansion::<P>(&lambda, n)?;
    for ell in [2u64, 3] {
        for form in [&f1, &fl] {
            let r = covariance_check(form, ell, -2)?;
            let in_range = r.q_range.is_none_or(|(_, hi)| hi <= q);
            checks.push(Check::new(format!("V_{ell}({}) = {ell} {}", form.form, form.form), r.ok && in_range, &r));
        }
    }
    let c = coordinate_identities(P);
    checks.push(Check::new("T(j = 1728) = 0", c.t_vanishes_at_1728, json!({"T": c.t_at_1728})));
    checks.push(Check::new("i + j = 1728 and the coordinate changes invert", c.ok, &c));
    Ok((json!({"N": n, "Q": q, "lambda": lambda.to_string()}), checks))
}

fn limits_suite<const P: u32>(cfg: &Config) -> SuiteResult {
    let n = cfg.prec;
    let m = cfg.stages;
    if m < 4 {
        return Err(Error::Stage { need: 4, budget: m });
    }
    let mut rng = rng_for(cfg, 11);
    let ctx = gm_ctx(2, n);
    let mut mult = Vec::new();
    let mut stage = Vec::new();
    for _ in 0..50 {
        let (su, sv) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
        let u = LimitElement::new(random_poly::<P, _>(&mut rng, &ctx, &[3, 2], 2), su);
        let v = LimitElement::new(random_poly::<P, _>(&mut rng, &ctx, &[3, 2], 2), sv);
        let lhs = perfection_reduce(&u.mul(&v)?, m)?;
        let rhs = perfection_reduce(&u, m)?.mul(&perfection_reduce(&v, m)?);
        mult.push(lhs.equals(&rhs));
        let a = perfection_reduce(&u, m)?;
        let b = perfection_reduce(&u.shift(1)?, m)?;
        stage.push(a.equals(&b));
    }
    let x = JetPoly::<Padic<P>>::var(ctx.clone(), 0);
    let red = perfection_reduce(&LimitElement::new(x.clone(), 1), m)?;
    let root = PerfectionElement::new(x.reduce()?, 0).pth_root(m)?;
    let tctx = JetCtx::new("T", 0).with_prec(n);
    let mut tower = Vec::new();
    for k in 1..=3u32 {
        let z = TowerElement::<P>::z(k, &tctx);
        let zp = z.pow((P as u64).pow(k))?;
        let pe = TowerElement::from_base(k, JetPoly::constant(tctx.clone(), Padic::exact(P)));
        let lifted = z.lift();
        let z1 = TowerElement::<P>::z(k + 1, &tctx).pow(P as u64)?;
        tower.push(zp.equals(&pe) && lifted.equals(&z1));
    }
    let all = |v: &[bool]| v.iter().all(|&b| b);
    let checks = vec![
        Check::new("perfection_reduce is multiplicative", all(&mult), count_ok(&mult)),
        Check::new("[x, 1] -> x-bar^(1/p)", red.equals(&root), red.to_json()),
        Check::new("z^(p^m) = p and z_m = z_(m+1)^p for m <= 3", all(&tower), json!(tower)),
        Check::new("stage m and stage m+1 reductions agree", all(&stage), count_ok(&stage)),
    ];
    Ok((json!({"N": n, "M": m, "pairs": 50}), checks))
}
