//! The multiplicative group: the canonical character `Psi`, its section,
//! the elements `y_n = delta^n(x^p)` and the `[p]`-isogeny witnesses.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{gm_ctx, JetCtx, JetPoly, Monomial};
use crate::limits::{perfection_reduce, LimitElement, PerfectionElement};
use crate::padic::{Fp, Padic};
use crate::scalar::{int_valuation, rat_valuation, PadicLike, Scalar, EXACT};

/// The canonical character truncated after `m` terms.
#[derive(Clone, Debug)]
pub struct GmCharacter<const P: u32> {
    pub m: usize,
    /// `sum_{n<=m} (-1)^(n-1) p^(n-1)/n (x'/x^p)^n`, Laurent in `x`.
    pub psi: JetPoly<Padic<P>>,
}

/// Smallest `m` such that every omitted term `p^(n-1)/n t^n` (`n > m`,
/// `t` integral) vanishes modulo `p^prec`.
pub fn psi_terms_needed(p: u32, prec: i64) -> usize {
    let mut m = 1usize;
    loop {
        let ok = (m + 1..m + 64).all(|n| (n as i64 - 1) - int_valuation(&BigInt::from(n), p).unwrap() >= prec);
        if ok {
            return m;
        }
        m += 1;
    }
}

pub fn psi_series<const P: u32>(m: usize, prec: i64) -> Result<GmCharacter<P>> {
    if m == 0 {
        return Err(Error::Invalid("psi needs at least one term".into()));
    }
    if prec >= EXACT {
        return Err(Error::PrecisionExhausted("psi needs a finite precision".into()));
    }
    let p = P as i64;
    let ctx = gm_ctx(1, prec);
    let mut terms = Vec::with_capacity(m);
    for n in 1..=m as i64 {
        let num = BigInt::from(p).pow((n - 1) as u32) * if n % 2 == 1 { 1 } else { -1 };
        let c = Padic::<P>::from_ratio(&num, &BigInt::from(n), prec)?;
        let mut mono = Monomial::var(0, -p * n);
        mono.0[1] = n;
        terms.push((mono, c));
    }
    Ok(GmCharacter { m, psi: JetPoly::from_terms(ctx, terms) })
}

impl<const P: u32> GmCharacter<P> {
    /// `Psi(x = u, x' = du)`.
    pub fn eval(&self, u: &Padic<P>, du: &Padic<P>) -> Result<Padic<P>> {
        let inv = u.inverse(u.prec())?;
        self.psi.eval(&[u.clone(), du.clone()], Some(&inv))
    }
}

/// `delta(u) = (u - u^p)/p` on `Z_p`, where the Frobenius lift is the identity.
pub fn delta_scalar<const P: u32>(u: &Padic<P>) -> Result<Padic<P>> {
    (u.clone() - u.pow(P as u64)).div_exact(1)
}

/// `psi(u) = Psi(u, delta u)` for a unit `u`.
pub fn psi_eval<const P: u32>(u: &Padic<P>) -> Result<Padic<P>> {
    if !u.is_unit() {
        return Err(Error::NotUnit(format!("{u}")));
    }
    let prec = u.prec();
    if prec >= EXACT {
        return Err(Error::PrecisionExhausted("psi_eval needs a finite precision".into()));
    }
    let du = delta_scalar(u)?;
    let ch = psi_series::<P>(psi_terms_needed(P, prec), prec)?;
    ch.eval(u, &du)
}

/// `sum_{k>=1} c(k) w^k` for integral `w`, where `v_p(c(k)) -> infinity`.
/// Each power is formed only to the precision its coefficient still needs.
pub(crate) fn jet_series<const P: u32>(
    w: &JetPoly<Padic<P>>,
    prec: i64,
    c: impl Fn(u64) -> BigRational,
) -> Result<JetPoly<Padic<P>>> {
    if w.min_val().is_some_and(|v| v < 0) {
        return Err(Error::Convergence("series argument is not integral".into()));
    }
    let kmax = (8 * prec.max(1) as u64) * P as u64;
    let vals: Vec<i64> = (1..=kmax).map(|k| rat_valuation(&c(k), P).unwrap_or(i64::MAX / 2)).collect();
    let mut suffix = vals.clone();
    for k in (0..suffix.len() - 1).rev() {
        suffix[k] = suffix[k].min(suffix[k + 1]);
    }
    let mut acc = JetPoly::zero(w.ctx().clone().with_prec(EXACT));
    let mut pw = JetPoly::one(w.ctx().clone().with_prec(EXACT));
    for k in 1..=kmax {
        let need = suffix[(k - 1) as usize];
        if need >= prec {
            return Ok(acc.with_prec(prec));
        }
        pw = pw.mul(w).with_prec(prec - need);
        let v = vals[(k - 1) as usize];
        if v >= prec {
            continue;
        }
        let ck = c(k);
        let unit = ck / BigRational::from_integer(BigInt::from(P).pow(v as u32));
        let u = Padic::<P>::from_ratio(unit.numer(), unit.denom(), prec)?;
        acc = acc.add(&pw.scale(&u).shift_p(v)?);
    }
    Err(Error::Convergence("series did not reach the requested precision".into()))
}

fn factorial(k: u64) -> BigInt {
    (1..=k).fold(BigInt::one(), |a, i| a * i)
}

/// `exp(p w)`.
pub fn jet_exp_p<const P: u32>(w: &JetPoly<Padic<P>>, prec: i64) -> Result<JetPoly<Padic<P>>> {
    let s = jet_series(w, prec, |k| BigRational::new(BigInt::from(P).pow(k as u32), factorial(k)))?;
    Ok(s.add(&JetPoly::one(w.ctx().clone().with_prec(prec))))
}

/// `(1/p) log(1 + p w)`.
pub fn jet_log1p_p_over_p<const P: u32>(w: &JetPoly<Padic<P>>, prec: i64) -> Result<JetPoly<Padic<P>>> {
    jet_series(w, prec, |k| {
        let s = if k % 2 == 1 { 1 } else { -1 };
        BigRational::new(BigInt::from(P).pow(k as u32 - 1) * s, BigInt::from(k))
    })
}

/// `(1 + p r)^(-1)`.
pub fn jet_inverse_1p<const P: u32>(r: &JetPoly<Padic<P>>, prec: i64) -> Result<JetPoly<Padic<P>>> {
    let s = jet_series(r, prec, |k| BigRational::from_integer(BigInt::from(-(P as i64)).pow(k as u32)))?;
    Ok(s.add(&JetPoly::one(r.ctx().clone().with_prec(prec))))
}

/// The cocharacter `Sigma = exp(sum a_n phi^(-n)(z))`, stored at stage `m`
/// as `exp(sum a_n phi^(m-n)(z))`.
#[derive(Clone, Debug)]
pub struct GmCocharacter<const P: u32> {
    pub m: u32,
    pub a: Vec<Padic<P>>,
    /// The argument of `exp` at stage `m`.
    pub log: JetPoly<Padic<P>>,
    pub sigma: LimitElement<P>,
}

fn z_ctx(order: usize, prec: i64) -> JetCtx {
    JetCtx::new("z", order).with_prec(prec)
}

/// The section with `a_n = p^n`.
pub fn cocharacter_sigma<const P: u32>(m: u32, prec: i64) -> Result<GmCocharacter<P>> {
    let a: Vec<Padic<P>> = (1..=m as i64).map(Padic::p_pow).collect();
    cocharacter_with(&a, prec)
}

/// `Sigma` for an arbitrary sequence `a_1, ..., a_m` of multiples of p.
pub fn cocharacter_with<const P: u32>(a: &[Padic<P>], prec: i64) -> Result<GmCocharacter<P>> {
    let m = a.len() as u32;
    if m == 0 {
        return Err(Error::Invalid("empty cocharacter sequence".into()));
    }
    if a.iter().any(|c| !c.is_zero() && c.val_lower() < 1) {
        return Err(Error::Convergence("cocharacter coefficients must be divisible by p".into()));
    }
    let ctx = z_ctx(m as usize, prec);
    let z = JetPoly::<Padic<P>>::var(ctx.clone(), 0);
    let mut phis = vec![z];
    for _ in 1..m {
        let next = phis.last().unwrap().phi()?;
        phis.push(next);
    }
    let mut s = JetPoly::zero(ctx.clone());
    for (n, an) in a.iter().enumerate() {
        s = s.add(&phis[m as usize - 1 - n].scale(an));
    }
    let s = s.with_order(m as usize);
    let sigma = jet_exp_p(&s.div_p(1)?, prec)?;
    Ok(GmCocharacter { m, a: a.to_vec(), log: s, sigma: LimitElement::new(sigma, m) })
}

/// Outcome of the section check `(1/p) log(phi(Sigma)/Sigma^p) = z`.
#[derive(Clone, Debug, Serialize)]
pub struct SectionReport {
    pub m: u32,
    /// Precision of the computed logarithm.
    pub prec: i64,
    /// Valuation of `(1/p) log(phi(Sigma)/Sigma^p) - z`, `None` if zero at precision.
    pub defect_valuation: Option<i64>,
    /// Whether the defect equals `-p^m phi^(-m)(z)` at precision.
    pub defect_matches: bool,
    pub ok: bool,
}

/// `(1/p) log(phi(Sigma) / Sigma^p)` as a class at stage `m`.
pub fn section_log<const P: u32>(co: &GmCocharacter<P>) -> Result<LimitElement<P>> {
    let sig = &co.sigma.rep;
    let prec = sig.prec();
    let ph = sig.phi()?;
    let sp = sig.pow(P as u64).with_order(ph.ctx().order);
    let inv = jet_inverse_1p(&sp.sub(&JetPoly::one(sp.ctx().clone())).div_p(1)?, prec)?;
    let q = ph.mul(&inv);
    let w = q.sub(&JetPoly::one(q.ctx().clone())).div_p(1)?;
    let l = jet_log1p_p_over_p(&w, w.prec())?;
    Ok(LimitElement::new(l, co.m))
}

/// Check the section identity for `a_n = p^n` (or any supplied sequence)
/// modulo `p^check`.
pub fn verify_section<const P: u32>(co: &GmCocharacter<P>, check: i64) -> Result<SectionReport> {
    let l = section_log(co)?;
    let m = co.m;
    if l.rep.prec() < check {
        return Err(Error::PrecisionExhausted(format!(
            "section log known to p^{} but check needs p^{check}",
            l.rep.prec()
        )));
    }
    let ctx = l.rep.ctx().clone();
    let z = JetPoly::<Padic<P>>::var(ctx.clone(), 0);
    let zm = z.phi_iter(m as usize)?.with_ctx(ctx.clone());
    let defect = l.rep.sub(&zm);
    let dv = defect.min_val();
    let expected = z.scale(&Padic::p_pow(m as i64)).neg();
    let defect_matches = defect.equals(&expected);
    let ok = dv.is_none_or(|v| v >= check.min(m as i64));
    Ok(SectionReport { m, prec: l.rep.prec(), defect_valuation: dv, defect_matches, ok })
}

/// `y_n = delta^n(x^p)` for `n = 1..=n_max`, starting from precision `prec`.
/// Entry `k` of the result is `y_k`; entry 0 is `x^p`.
pub fn y_sequence<const P: u32>(n_max: usize, prec: i64) -> Result<Vec<JetPoly<Padic<P>>>> {
    if prec <= n_max as i64 {
        return Err(Error::PrecisionExhausted(format!("y_{n_max} needs precision > {n_max}")));
    }
    let ctx = gm_ctx(0, prec);
    let mut out = vec![JetPoly::monomial(ctx, Monomial::var(0, P as i64), Padic::one())];
    for _ in 0..n_max {
        let next = out.last().unwrap().delta()?;
        out.push(next);
    }
    Ok(out)
}

/// `y_k mod p` for `k = 0..=n_max`.
pub fn ybar_sequence<const P: u32>(n_max: usize) -> Result<Vec<JetPoly<Fp<P>>>> {
    y_sequence::<P>(n_max, n_max as i64 + 1)?.iter().map(|y| y.reduce()).collect()
}

/// `x^(p^n (p-1)) (x^(n-1))^p`, the leading term of `y_n mod p`.
pub fn y_leading<const P: u32>(n: usize) -> JetPoly<Fp<P>> {
    let p = P as i64;
    let mut m = Monomial::var(0, p.pow(n as u32) * (p - 1));
    m.0[n - 1] += p;
    JetPoly::monomial(gm_ctx(n, EXACT), m, Fp::one())
}

#[derive(Clone, Debug, Serialize)]
pub struct YReport {
    pub n: usize,
    pub terms_mod_p: usize,
    /// `y_1 = 0`, `y_2 = leading`, or the leading term is present with
    /// coefficient 1.
    pub leading_ok: bool,
    /// Largest jet index in `y_n mod p` minus its leading term.
    pub residual_order: usize,
    pub ok: bool,
}

/// Structure of `y_n mod p`.
pub fn y_structure<const P: u32>(n: usize, ybar: &JetPoly<Fp<P>>) -> YReport {
    let (leading_ok, residual_order, ok) = match n {
        0 => (true, 0, true),
        1 => (ybar.is_empty(), 0, ybar.is_empty()),
        _ => {
            let lead = y_leading::<P>(n);
            let res = ybar.sub(&lead.with_ctx(ybar.ctx().clone()));
            let l_ok = res.len() + 1 == ybar.len();
            let r = res.order_used();
            let ok = if n == 2 { res.is_empty() } else { l_ok && (res.is_empty() || r + 2 <= n) };
            (if n == 2 { res.is_empty() } else { l_ok }, r, ok)
        }
    };
    YReport { n, terms_mod_p: ybar.len(), leading_ok, residual_order, ok }
}

/// `y_n` together with its mod-p structure report.
pub fn delta_n_of_xp<const P: u32>(n: usize, prec: i64) -> Result<(JetPoly<Padic<P>>, YReport)> {
    let ys = y_sequence::<P>(n, prec)?;
    let y = ys[n].clone();
    let r = y_structure(n, &y.reduce()?);
    Ok((y, r))
}

/// Pullback along `[p]`: `x -> x^p`, `x^(k) -> y_k`, on the perfection of
/// the reduction mod p.
#[derive(Clone, Debug)]
pub struct PIsogeny<const P: u32> {
    /// `ybar[k] = y_k mod p`.
    pub ybar: Vec<JetPoly<Fp<P>>>,
}

impl<const P: u32> PIsogeny<P> {
    pub fn new(max_order: usize) -> Result<Self> {
        Ok(PIsogeny { ybar: ybar_sequence::<P>(max_order)? })
    }

    /// `[p]^*` on a polynomial over `F_p`.
    pub fn pullback_poly(&self, f: &JetPoly<Fp<P>>) -> Result<JetPoly<Fp<P>>> {
        let order = f.order_used();
        if order >= self.ybar.len() {
            return Err(Error::JetOrder { need: order, budget: self.ybar.len() - 1 });
        }
        let ctx = gm_ctx(order.max(1), EXACT);
        let mut cache: FxHashMap<(usize, i64), JetPoly<Fp<P>>> = FxHashMap::default();
        let mut out: FxHashMap<Monomial, Fp<P>> = FxHashMap::default();
        for (m, c) in f.terms() {
            let mut t = JetPoly::monomial(ctx.clone(), Monomial::var(0, m.0[0] * P as i64), *c);
            for k in 1..=order {
                let e = m.0[k];
                if e == 0 {
                    continue;
                }
                let img = cache
                    .entry((k, e))
                    .or_insert_with(|| self.ybar[k].with_ctx(ctx.clone()).pow_frobenius(e as u64));
                t = t.mul(img);
                if t.is_empty() {
                    break;
                }
            }
            for (tm, tc) in t.terms() {
                let e = out.entry(*tm).or_insert(Fp::zero());
                *e = *e + *tc;
            }
        }
        Ok(JetPoly::from_terms(ctx, out))
    }

    pub fn pullback(&self, f: &PerfectionElement<P>) -> Result<PerfectionElement<P>> {
        Ok(PerfectionElement::new(self.pullback_poly(&f.poly)?, f.level))
    }
}

/// Elements `G_n` of the perfection with `[p]^*(G_n) = x^(n)`.
#[derive(Clone, Debug)]
pub struct SurjectivityWitnesses<const P: u32> {
    pub iso: PIsogeny<P>,
    pub g: Vec<PerfectionElement<P>>,
}

fn x_power<const P: u32>(ctx: &JetCtx, e: i64, level: u32) -> PerfectionElement<P> {
    PerfectionElement::new(JetPoly::monomial(ctx.clone(), Monomial::var(0, e), Fp::one()), level)
}

impl<const P: u32> SurjectivityWitnesses<P> {
    /// Build `G_0, ..., G_{n_max}`.
    ///
    /// `G_0 = x^(1/p)`. For `n >= 1`, `y_(n+1) = x^(p^(n+1)(p-1)) (x^(n))^p + v`
    /// mod p with `v` free of `x^(n)` and `x^(n+1)`, so
    /// `G_n = (x^(-p^n(p-1)) x^(n+1) - H)^(1/p)` where `H` is the preimage of
    /// `x^(-p^(n+1)(p-1)) v` under `x -> x^p`, `x^(k) -> x^(k)` with
    /// `x^(k) = [p]^* G_k` for `k < n`.
    pub fn build(n_max: usize) -> Result<Self> {
        let iso = PIsogeny::<P>::new(n_max + 1)?;
        let p = P as i64;
        let ctx = gm_ctx(n_max + 1, EXACT);
        let mut g: Vec<PerfectionElement<P>> = vec![x_power(&ctx, 1, 1)];
        for n in 1..=n_max {
            let lead = y_leading::<P>(n + 1).with_ctx(ctx.clone());
            let v = iso.ybar[n + 1].with_ctx(ctx.clone()).sub(&lead);
            if v.order_used() >= n {
                return Err(Error::Shape(format!("y_{} mod p has an unexpected x^({}) term", n + 1, v.order_used())));
            }
            let shift = p.pow(n as u32 + 1) * (p - 1);
            let mut h = PerfectionElement::new(JetPoly::zero(ctx.clone()), 0);
            for (m, c) in v.terms() {
                let mut t = x_power::<P>(&ctx, m.0[0] - shift, 1);
                t = PerfectionElement::new(t.poly.scale(c), t.level);
                for (k, gk) in g.iter().enumerate().take(n).skip(1) {
                    if m.0[k] != 0 {
                        t = t.mul(&gk.pow(m.0[k] as u64));
                    }
                }
                h = h.add(&t);
            }
            let mut top = Monomial::var(0, -p.pow(n as u32) * (p - 1));
            top.0[n + 1] = 1;
            let inner = PerfectionElement::new(JetPoly::monomial(ctx.clone(), top, Fp::one()), 0).sub(&h);
            g.push(PerfectionElement::new(inner.poly, inner.level + 1));
        }
        Ok(SurjectivityWitnesses { iso, g })
    }

    /// `G_n^(1/p^i)`, mapping to the reduction of `[x^(n), i]`.
    pub fn witness(&self, n: usize, i: u32) -> Result<PerfectionElement<P>> {
        let g = self.g.get(n).ok_or(Error::JetOrder { need: n, budget: self.g.len() - 1 })?;
        Ok(PerfectionElement::new(g.poly.clone(), g.level + i))
    }

    /// The witness as a limit class (Teichmüller-free lift of the representative).
    pub fn witness_limit(&self, n: usize, i: u32, prec: i64) -> Result<LimitElement<P>> {
        let w = self.witness(n, i)?;
        Ok(LimitElement::new(w.poly.lift(prec), w.level))
    }

    /// `[p]^*(G_n^(1/p^i)) - [x^(n), i]` in the perfection.
    pub fn defect(&self, n: usize, i: u32) -> Result<PerfectionElement<P>> {
        let pulled = self.iso.pullback(&self.witness(n, i)?)?;
        let ctx = pulled.poly.ctx().clone().with_order(n.max(1));
        let target = PerfectionElement::new(JetPoly::var(ctx.clone(), n).with_ctx(ctx), i);
        Ok(pulled.sub(&target))
    }
}

/// `[p]^*(x') = y_1 = 0` mod p, while `[x', i]` survives in the perfection.
#[derive(Clone, Debug, Serialize)]
pub struct NonInjectivityReport {
    pub pullback_of_xprime_zero: bool,
    pub xprime_reduction_nonzero: bool,
    pub pullback_of_x_nonzero: bool,
    pub ok: bool,
}

pub fn p_isogeny_noninjectivity<const P: u32>(i: u32, prec: i64) -> Result<NonInjectivityReport> {
    let ys = y_sequence::<P>(1, prec.max(2))?;
    let y1 = ys[1].reduce()?;
    let ctx = gm_ctx(1, prec);
    let xp = LimitElement::new(JetPoly::<Padic<P>>::var(ctx.clone(), 1), i);
    let red = perfection_reduce(&xp, i)?;
    let px = ys[0].reduce()?;
    let a = y1.is_empty();
    let b = !red.is_zero();
    let c = !px.is_empty();
    Ok(NonInjectivityReport {
        pullback_of_xprime_zero: a,
        xprime_reduction_nonzero: b,
        pullback_of_x_nonzero: c,
        ok: a && b && c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::log1p_scalar;
    type Q5 = Padic<5>;

    #[test]
    fn psi_leading_and_trivial_points() {
        let ch = psi_series::<5>(6, 8).unwrap();
        let mut lead = Monomial::var(0, -5);
        lead.0[1] = 1;
        assert_eq!(ch.psi.coeff(&lead), Q5::one());
        let one = Q5::with_prec(1, 8);
        assert!(ch.eval(&one, &Q5::zero_at(8)).unwrap().is_zero());
    }

    #[test]
    fn psi_at_one_one() {
        let ch = psi_series::<5>(psi_terms_needed(5, 8), 8).unwrap();
        let v = ch.eval(&Q5::with_prec(1, 8), &Q5::with_prec(1, 8)).unwrap();
        let oracle = log1p_scalar(&Q5::with_prec(5, 9)).unwrap().div_exact(1).unwrap();
        assert_eq!(v, oracle);
    }

    #[test]
    fn psi_of_teichmuller_vanishes() {
        for a in 1..5 {
            let w = Q5::teichmuller(a, 8).unwrap();
            assert!(psi_eval(&w).unwrap().is_zero());
        }
    }

    #[test]
    fn y_low_orders() {
        let yb = ybar_sequence::<5>(3).unwrap();
        assert!(yb[1].is_empty());
        assert_eq!(yb[2], y_leading::<5>(2).with_ctx(yb[2].ctx().clone()));
        assert_eq!(yb[3].len(), 2);
        for n in 1..=3 {
            assert!(y_structure(n, &yb[n]).ok, "n = {n}");
        }
    }

    #[test]
    fn section_small() {
        let co = cocharacter_sigma::<5>(2, 4).unwrap();
        let r = verify_section(&co, 2).unwrap();
        assert_eq!(r.defect_valuation, Some(2));
        assert!(r.defect_matches && r.ok);
    }

    #[test]
    fn perturbed_section_fails_mod_p2() {
        let a = [Q5::exact(30), Q5::exact(25), Q5::exact(125)];
        let co = cocharacter_with(&a, 5).unwrap();
        let r = verify_section(&co, 2).unwrap();
        assert_eq!(r.defect_valuation, Some(1));
        assert!(!r.ok);
    }

    #[test]
    fn noninjectivity() {
        assert!(p_isogeny_noninjectivity::<5>(2, 4).unwrap().ok);
    }

    #[test]
    fn witnesses_low() {
        let w = SurjectivityWitnesses::<5>::build(2).unwrap();
        assert_eq!(w.g[0].level, 1);
        for n in 0..=2 {
            for i in 0..=2 {
                assert!(w.defect(n, i).unwrap().is_zero(), "n={n} i={i}");
            }
        }
    }
}
