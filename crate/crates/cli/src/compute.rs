use clap::ValueEnum;
use deltajet::elliptic::{cochar_recurrence, hasse_ok, psi_elliptic, valuation_profile, EllipticCurve};
use deltajet::gm::{cocharacter_sigma, delta_n_of_xp, psi_eval, psi_series, psi_terms_needed, verify_section, SurjectivityWitnesses};
use deltajet::jet::gm_ctx;
use deltajet::limits::{perfection_reduce, LimitElement, TowerElement};
use deltajet::modular::{covariance_check, eisenstein, f1_expansion, f_lambda_expansion, QExpansion};
use deltajet::quasilinear::{decompose, mod_p_cover, prolong, synthetic, QuasiLinearForm};
use deltajet::{Error, JetCtx, JetPoly, Padic, PadicLike, Result, Scalar};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::suites::padic_input;
use crate::{with_prime, ComputeKind, Config, Inputs, SCHEMA};

pub fn compute(what: ComputeKind, cfg: &Config, inp: &Inputs) -> Result<Value> {
    let body = with_prime!(cfg.p, dispatch(what, cfg, inp))?;
    let name = what.to_possible_value().map(|v| v.get_name().to_string());
    let mut out = json!({"schema": SCHEMA, "command": name, "p": cfg.p});
    if let (Some(o), Value::Object(b)) = (out.as_object_mut(), body) {
        o.extend(b);
    }
    Ok(out)
}

fn dispatch<const P: u32>(what: ComputeKind, cfg: &Config, inp: &Inputs) -> Result<Value> {
    use ComputeKind::*;
    let n = cfg.prec;
    match what {
        GmPsi => {
            let m = inp.terms.unwrap_or_else(|| psi_terms_needed(P, n));
            let ch = psi_series::<P>(m, n)?;
            Ok(json!({"terms": m, "N": n, "psi": ch.psi.to_text()}))
        }
        GmEval => {
            let u = padic_input::<P>(inp.u.as_ref(), 2, n)?.cap(n);
            let v = psi_eval(&u)?;
            Ok(json!({"u": u.to_string(), "psi": v.to_string(), "valuation": v.valuation()}))
        }
        GmCochar => {
            let m = inp.n.unwrap_or(3) as u32;
            cfg.budget().check_stage(m)?;
            let co = cocharacter_sigma::<P>(m, n)?;
            let rep = verify_section(&co, m as i64)?;
            Ok(json!({"M": m, "log": co.log.to_text(), "sigma": co.sigma.to_json(), "section": rep}))
        }
        GmYn => {
            let k = inp.n.unwrap_or(2);
            cfg.budget().check_order(k)?;
            let (y, rep) = delta_n_of_xp::<P>(k, n)?;
            Ok(json!({"n": k, "y": y.to_text(), "y_mod_p": y.reduce()?.to_text(), "structure": rep}))
        }
        GmSurjWitness => {
            let k = inp.n.unwrap_or(1);
            let i = inp.i.unwrap_or(0);
            cfg.budget().check_order(k + 1)?;
            let w = SurjectivityWitnesses::<P>::build(k)?;
            let g = w.witness(k, i)?;
            Ok(json!({"n": k, "i": i, "witness": g.to_json(), "pullback_matches": w.defect(k, i)?.is_zero()}))
        }
        EllAp => {
            let e = curve::<P>(inp)?;
            Ok(json!({"A": inp.a.unwrap_or(1), "B": inp.b.unwrap_or(1), "ap": e.ap, "class": e.class, "hasse": hasse_ok(P, e.ap)}))
        }
        EllLog => {
            let e = curve::<P>(inp)?;
            let d = inp.terms.unwrap_or(20);
            let fg = e.log(d, n)?;
            Ok(json!({"D": d, "N": n, "log": fg.log.to_json(), "omega": fg.omega.to_json()}))
        }
        EllPsi => {
            let e = lambdas(curve::<P>(inp)?, inp, n)?;
            let d = cfg.deg as usize;
            let ps = psi_elliptic(&e, d, n)?;
            let seq = cochar_recurrence(P, e.lambda0.clone(), e.lambda1.clone(), 20);
            let profile = valuation_profile(&seq).map_or_else(|err| json!(err.to_string()), |r| json!(r));
            Ok(json!({
                "ap": e.ap,
                "class": e.class,
                "lambda1": e.lambda1.to_string(),
                "lambda0": e.lambda0.to_string(),
                "integrality": ps.report,
                "profile": profile,
            }))
        }
        EllCochar => {
            let e = lambdas(curve::<P>(inp)?, inp, n)?;
            let m = inp.n.unwrap_or(20).max(2);
            let seq = cochar_recurrence(P, e.lambda0.clone(), e.lambda1.clone(), m);
            let terms: Vec<String> = seq.terms.iter().map(|a| a.to_string()).collect();
            let profile = valuation_profile(&seq).map_or_else(|err| json!(err.to_string()), |r| json!(r));
            Ok(json!({"lambda0": e.lambda0.to_string(), "lambda1": e.lambda1.to_string(), "a": terms, "profile": profile}))
        }
        QlDecompose => {
            let q = ql_form::<P>(cfg, inp)?;
            Ok(form_json(&q))
        }
        QlProlong => {
            let q = ql_form::<P>(cfg, inp)?;
            let j = inp.j.unwrap_or(1);
            let pr = prolong(&q, j)?;
            Ok(json!({"j": j, "f": pr.f.to_text(), "form": form_json(&pr.form), "coefficient_law": pr.coefficient_law}))
        }
        QlCover => {
            let q = ql_form::<P>(cfg, inp)?;
            let j = inp.j.unwrap_or(1);
            Ok(json!(mod_p_cover(&q, j)?))
        }
        ModEisenstein => {
            let k = inp.k.unwrap_or(4);
            Ok(eisenstein::<P>(k, cfg.q_deg as usize, n)?.to_json())
        }
        ModF1 => Ok(f1_expansion::<P>(n)?.to_json()),
        ModFlambda => Ok(f_lambda_expansion::<P>(&unit_lambda::<P>(inp, n)?, n)?.to_json()),
        ModCovariance => {
            let ell = inp.ell.unwrap_or(2);
            if ell as u32 == P || ell < 2 {
                return Err(Error::Invalid(format!("isogeny degree {ell} must be at least 2 and prime to p")));
            }
            let e: QExpansion<P> = match inp.form.as_deref().unwrap_or("f1") {
                "f1" => f1_expansion(n)?,
                "flambda" => f_lambda_expansion(&unit_lambda::<P>(inp, n)?, n)?,
                f => return Err(Error::Invalid(format!("unknown form {f:?}; expected f1 or flambda"))),
            };
            Ok(json!(covariance_check(&e, ell, -2)?))
        }
        LimitPerfection => {
            let stage = inp.i.unwrap_or(1);
            let ctx = gm_ctx(cfg.jet_order, n);
            let rep = match &inp.poly {
                Some(s) => JetPoly::parse(s, &ctx)?,
                None => JetPoly::var(ctx, 0),
            };
            let u = LimitElement::<P>::new(rep, stage);
            let red = perfection_reduce(&u, cfg.stages)?;
            Ok(json!({"element": u.to_json(), "reduction": red.to_json()}))
        }
        Tower => {
            let m = inp.n.map_or(2, |k| k as u32);
            cfg.budget().check_stage(m)?;
            let ctx = JetCtx::new("T", 0).with_prec(n);
            let z = TowerElement::<P>::z(m, &ctx);
            let zp = z.pow((P as u64).pow(m))?;
            let p_elt = TowerElement::from_base(m, JetPoly::constant(ctx, Padic::exact(P)));
            Ok(json!({"m": m, "z": z.to_json(), "z_pow": zp.to_json(), "z_pow_is_p": zp.equals(&p_elt)}))
        }
    }
}

fn curve<const P: u32>(inp: &Inputs) -> Result<EllipticCurve<P>> {
    EllipticCurve::<P>::new(inp.a.unwrap_or(1), inp.b.unwrap_or(1))
}

fn lambdas<const P: u32>(e: EllipticCurve<P>, inp: &Inputs, n: i64) -> Result<EllipticCurve<P>> {
    let l0 = match &inp.lambda0 {
        Some(_) => padic_input::<P>(inp.lambda0.as_ref(), 1, n)?,
        None => e.lambda0.clone(),
    };
    let l1 = match &inp.lambda1 {
        Some(_) => padic_input::<P>(inp.lambda1.as_ref(), 0, n)?,
        None => e.lambda1.clone(),
    };
    Ok(e.with_lambdas(l0, l1))
}

fn unit_lambda<const P: u32>(inp: &Inputs, n: i64) -> Result<Padic<P>> {
    let l = padic_input::<P>(inp.lambda.as_ref(), 1, n)?;
    if !l.is_unit() {
        return Err(Error::Invalid(format!("lambda = {l} must be a p-adic unit")));
    }
    Ok(l)
}

/// The form given by `--poly`, or a synthetic one drawn from the seed.
fn ql_form<const P: u32>(cfg: &Config, inp: &Inputs) -> Result<QuasiLinearForm<P>> {
    let r = inp.r.unwrap_or(1);
    let s = inp.s.unwrap_or(1);
    if r == 0 {
        return Err(Error::Invalid("quasi-linear forms need r >= 1".into()));
    }
    match &inp.poly {
        Some(text) => {
            let ctx = JetCtx::new("T", r + s).with_prec(cfg.prec);
            decompose(&JetPoly::parse(text, &ctx)?, r, s)
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            synthetic::<P, _>(&mut rng, r, s, inp.degenerate, cfg.prec)
        }
    }
}

fn form_json<const P: u32>(q: &QuasiLinearForm<P>) -> Value {
    let a: Vec<String> = q.a.iter().map(|c| c.to_text()).collect();
    json!({"r": q.r, "s": q.s, "a": a, "b": q.b.to_text(), "degeneracy": q.degeneracy})
}
