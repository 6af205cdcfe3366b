//! Quasi-linear arithmetic differential equations
//! `f = sum_{i<=r} a_i (T^(s))^(phi^i) + b` with `b` of filtration level `<= s-1`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{FiltrationLevel, JetCtx, JetPoly, Monomial};
use crate::padic::{Fp, Padic};
use crate::scalar::PadicLike;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Degeneracy {
    /// `a_0` is a unit.
    Nondegenerate,
    /// `a_0` is divisible by p.
    TotallyDegenerate,
    Intermediate,
}

#[derive(Clone, Debug)]
pub struct QuasiLinearForm<const P: u32> {
    pub r: usize,
    pub s: usize,
    /// `a[i]` is a polynomial (or truncated series) in the base variable.
    pub a: Vec<JetPoly<Padic<P>>>,
    pub b: JetPoly<Padic<P>>,
    pub degeneracy: Degeneracy,
}

/// `(T^(s))^(phi^i)` without base truncation.
fn phi_power<const P: u32>(ctx: &JetCtx, s: usize, i: usize) -> Result<JetPoly<Padic<P>>> {
    let c = JetCtx { base_max: None, order: s, ..ctx.clone() };
    JetPoly::var(c, s).phi_iter(i)
}

/// Unit test in the completed base ring: for truncated series the constant
/// term must be a unit; for polynomials (or Laurent polynomials) the
/// reduction must be a single nonzero monomial.
pub fn is_base_unit<const P: u32>(a: &JetPoly<Padic<P>>) -> Result<bool> {
    let r = a.reduce()?;
    Ok(match a.base_max() {
        Some(_) => !r.coeff(&Monomial::ONE).is_zero_fp(),
        None => r.len() == 1 && r.terms().all(|(m, _)| m.0[0] == 0 || a.ctx().laurent),
    })
}

trait FpZero {
    fn is_zero_fp(&self) -> bool;
}

impl<const P: u32> FpZero for Fp<P> {
    fn is_zero_fp(&self) -> bool {
        self.value() == 0
    }
}

pub fn degeneracy_of<const P: u32>(a0: &JetPoly<Padic<P>>) -> Result<Degeneracy> {
    Ok(if is_base_unit(a0)? {
        Degeneracy::Nondegenerate
    } else if a0.is_zero_mod_p() {
        Degeneracy::TotallyDegenerate
    } else {
        Degeneracy::Intermediate
    })
}

/// Greedy top-down decomposition at order `(r, s)`.
pub fn decompose<const P: u32>(f: &JetPoly<Padic<P>>, r: usize, s: usize) -> Result<QuasiLinearForm<P>> {
    if s == 0 {
        return Err(Error::Invalid("quasi-linear order needs s >= 1".into()));
    }
    if f.order_used() > r + s {
        return Err(Error::Shape(format!("order {} exceeds r + s = {}", f.order_used(), r + s)));
    }
    let ctx = f.ctx().clone().with_order(f.ctx().order.max(r + s));
    let mut rest = f.with_ctx(ctx.clone());
    let mut a = vec![JetPoly::zero(ctx.clone()); r + 1];
    for i in (0..=r).rev() {
        let c = rest.coeff_of_jets(&Monomial::var(s + i, 1));
        let ai = c.div_p(i as i64).map_err(|e| match e {
            Error::NotDivisible { val, .. } => Error::NotDivisible { val, k: i as i64 },
            e => e,
        })?;
        let term = ai.mul(&phi_power(&ctx, s, i)?);
        rest = rest.sub(&term.with_ctx(rest.ctx().clone()));
        a[i] = ai;
    }
    if !is_base_unit(&a[r])? {
        return Err(Error::Shape(format!("leading coefficient a_{r} is not a unit")));
    }
    match rest.filtration_level()? {
        FiltrationLevel::Level(l) if l < s => {}
        lvl => {
            return Err(Error::Shape(format!("remainder has filtration level {lvl}, need <= {}", s - 1)));
        }
    }
    let degeneracy = degeneracy_of(&a[0])?;
    Ok(QuasiLinearForm { r, s, a, b: rest, degeneracy })
}

impl<const P: u32> QuasiLinearForm<P> {
    pub fn reconstruct(&self) -> Result<JetPoly<Padic<P>>> {
        let ctx = self.b.ctx().clone();
        let mut f = self.b.clone();
        for (i, ai) in self.a.iter().enumerate() {
            let t = ai.mul(&phi_power(&ctx, self.s, i)?);
            f = f.add(&t.with_ctx(f.ctx().clone()));
        }
        Ok(f)
    }

    pub fn order(&self) -> usize {
        self.r + self.s
    }
}

/// Result of `delta^j` followed by re-decomposition at order `(r, s + j)`.
#[derive(Clone, Debug)]
pub struct Prolongation<const P: u32> {
    pub j: usize,
    pub f: JetPoly<Padic<P>>,
    pub form: QuasiLinearForm<P>,
    /// `a_i^(j) = a_i^(p^j)` mod p for every `i`.
    pub coefficient_law: bool,
}

/// Reductions compared up to the smaller base truncation.
fn equal_mod_p<const P: u32>(x: &JetPoly<Fp<P>>, y: &JetPoly<Fp<P>>) -> bool {
    let d = match (x.base_max(), y.base_max()) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    match d {
        Some(d) => x.truncate_base(d).equals(&y.truncate_base(d).with_ctx(x.truncate_base(d).ctx().clone())),
        None => x.equals(&y.with_ctx(x.ctx().clone())),
    }
}

pub fn prolong<const P: u32>(q: &QuasiLinearForm<P>, j: usize) -> Result<Prolongation<P>> {
    let f = q.reconstruct()?.delta_iter(j)?;
    let form = decompose(&f, q.r, q.s + j).map_err(|e| match e {
        e if e.is_budget() => e,
        e => Error::Shape(format!("CRITICAL: prolongation {j} is not quasi-linear: {e}")),
    })?;
    let mut law = true;
    for i in 0..=q.r {
        let want = q.a[i].reduce()?.frobenius(j as u32);
        let got = form.a[i].reduce()?;
        law &= equal_mod_p(&got, &want);
    }
    Ok(Prolongation { j, f, form, coefficient_law: law })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DerivativeClass {
    Etale,
    Inseparable,
    Mixed,
}

/// Shape of `f_j mod p` as a polynomial in `T^(s+j)`.
#[derive(Clone, Debug, Serialize)]
pub struct CoverReport {
    pub j: usize,
    pub degree: i64,
    pub leading_unit: bool,
    pub derivative_class: DerivativeClass,
    pub filtration_ok: bool,
}

impl CoverReport {
    pub fn ok(&self, r: usize, p: u32) -> bool {
        self.degree == (p as i64).pow(r as u32) && self.leading_unit && self.filtration_ok
    }
}

/// Unit test on a reduction, matching [`is_base_unit`].
fn fp_base_unit<const P: u32>(a: &JetPoly<Fp<P>>, series: bool) -> bool {
    if series {
        a.coeff(&Monomial::ONE).value() != 0
    } else {
        a.len() == 1 && a.terms().all(|(m, _)| m.top_index() == 0 && (m.0[0] == 0 || a.ctx().laurent))
    }
}

pub fn mod_p_cover<const P: u32>(q: &QuasiLinearForm<P>, j: usize) -> Result<CoverReport> {
    let pr = if j == 0 {
        Prolongation { j: 0, f: q.reconstruct()?, form: q.clone(), coefficient_law: true }
    } else {
        prolong(q, j)?
    };
    cover_of(&pr)
}

pub fn cover_of<const P: u32>(pr: &Prolongation<P>) -> Result<CoverReport> {
    let top = pr.form.s;
    let fbar = pr.f.reduce()?;
    let series = pr.f.base_max().is_some();
    if fbar.order_used() > top {
        return Err(Error::Shape(format!("f_{} mod p involves a variable above T^({top})", pr.j)));
    }
    // group by the exponent of the top variable
    let mut degree = 0;
    for (m, _) in fbar.terms() {
        degree = degree.max(m.0[top]);
    }
    let leading = coeff_in_top(&fbar, top, degree);
    let leading_unit = fp_base_unit(&leading, series);
    let deriv = coeff_in_top(&fbar, top, 1);
    let derivative_class = if deriv.is_empty() {
        DerivativeClass::Inseparable
    } else if deriv.terms().all(|(m, _)| m.top_index() == 0) && fp_base_unit(&deriv, series) {
        DerivativeClass::Etale
    } else {
        DerivativeClass::Mixed
    };
    let want = pr.form.a[0].reduce()?;
    let a0_matches = equal_mod_p(&deriv, &want);
    let filtration_ok = matches!(pr.form.b.filtration_level()?, FiltrationLevel::Level(l) if l < top) && a0_matches;
    Ok(CoverReport { j: pr.j, degree, leading_unit, derivative_class, filtration_ok })
}

/// Coefficient of `(T^(k))^e` (a polynomial in the remaining variables).
fn coeff_in_top<const P: u32>(f: &JetPoly<Fp<P>>, k: usize, e: i64) -> JetPoly<Fp<P>> {
    let terms: Vec<(Monomial, Fp<P>)> = f
        .terms()
        .filter(|(m, _)| m.0[k] == e)
        .map(|(m, c)| {
            let mut m2 = *m;
            m2.0[k] = 0;
            (m2, *c)
        })
        .collect();
    JetPoly::from_terms(f.ctx().clone(), terms)
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularSequenceReport {
    pub covers: Vec<CoverReport>,
    pub coefficient_law: Vec<bool>,
    /// Top variables `T^(s)`, ..., `T^(s + j_max)`, pairwise distinct.
    pub top_variables: Vec<usize>,
    pub ok: bool,
}

/// Each `f_j mod p` is, up to a unit, monic of degree `p^r` in its own top
/// variable `T^(s+j)`.
pub fn regular_sequence_check<const P: u32>(q: &QuasiLinearForm<P>, j_max: usize) -> Result<RegularSequenceReport> {
    let mut covers = Vec::new();
    let mut law = Vec::new();
    let mut tops = Vec::new();
    let mut f = q.reconstruct()?;
    for j in 0..=j_max {
        if j > 0 {
            f = f.delta()?;
        }
        let form = decompose(&f, q.r, q.s + j)?;
        let mut ok_law = true;
        for i in 0..=q.r {
            ok_law &= equal_mod_p(&form.a[i].reduce()?, &q.a[i].reduce()?.frobenius(j as u32));
        }
        let pr = Prolongation { j, f: f.clone(), form, coefficient_law: ok_law };
        covers.push(cover_of(&pr)?);
        law.push(ok_law);
        tops.push(q.s + j);
    }
    let mut sorted = tops.clone();
    sorted.dedup();
    let ok = covers.iter().all(|c| c.ok(q.r, P)) && law.iter().all(|&b| b) && sorted.len() == tops.len();
    Ok(RegularSequenceReport { covers, coefficient_law: law, top_variables: tops, ok })
}

/// A small random quasi-linear form over `Z_p[T]`. Coefficients are
/// Teichmuller constants and the remainder is a constant, which keeps
/// the prolongations small enough to push to `j = 3`. `degenerate` replaces
/// `a_0` by `p` times a Teichmuller constant (possibly zero).
pub fn synthetic<const P: u32, R: Rng>(
    rng: &mut R,
    r: usize,
    s: usize,
    degenerate: bool,
    prec: i64,
) -> Result<QuasiLinearForm<P>> {
    let ctx = JetCtx::new("T", r + s).with_prec(prec);
    let p = P as i64;
    let teich = |k: i64| -> Result<Padic<P>> {
        if k == 0 {
            Ok(Padic::exact(0))
        } else {
            Padic::<P>::teichmuller(k, prec)
        }
    };
    let mut a = Vec::new();
    for i in 0..=r {
        let c = if i == 0 && degenerate {
            teich(rng.gen_range(0..p))?.shift(1)?
        } else if i == 0 || i == r {
            teich(rng.gen_range(1..p))?
        } else {
            teich(rng.gen_range(0..p))?
        };
        a.push(JetPoly::constant(ctx.clone(), c));
    }
    let b = JetPoly::constant(ctx.clone(), teich(rng.gen_range(0..p))?);
    let degeneracy = degeneracy_of(&a[0])?;
    Ok(QuasiLinearForm { r, s, a, b, degeneracy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    type Q5 = Padic<5>;

    fn ctx() -> JetCtx {
        JetCtx::new("T", 2).with_prec(6)
    }

    #[test]
    fn basis_element() {
        let f = JetPoly::<Q5>::var(ctx(), 1).phi().unwrap();
        let q = decompose(&f, 1, 1).unwrap();
        assert_eq!(q.a[1], JetPoly::one(ctx()));
        assert!(q.a[0].is_empty() && q.b.is_empty());
        assert_eq!(q.degeneracy, Degeneracy::TotallyDegenerate);
    }

    #[test]
    fn rejects_non_quasilinear() {
        let f = JetPoly::<Q5>::var(ctx(), 2);
        assert!(matches!(decompose(&f, 1, 1), Err(Error::NotDivisible { .. })));
        let g = JetPoly::<Q5>::var(ctx(), 1).pow(2).mul(&JetPoly::var(ctx(), 2));
        assert!(decompose(&g, 1, 1).is_err());
    }

    #[test]
    fn synthetic_round_trip_and_covers() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 0..20 {
            let degenerate = k % 2 == 1;
            let q = synthetic::<5, _>(&mut rng, 1, 1, degenerate, 6).unwrap();
            let f = q.reconstruct().unwrap();
            let d = decompose(&f, 1, 1).unwrap();
            assert!(d.reconstruct().unwrap().equals(&f));
            assert_eq!(d.degeneracy, q.degeneracy, "case {k}");
            let rep = regular_sequence_check(&q, 2).unwrap();
            assert!(rep.ok, "{rep:?}");
            let want = if degenerate { DerivativeClass::Inseparable } else { DerivativeClass::Etale };
            assert!(rep.covers.iter().all(|c| c.derivative_class == want));
        }
    }
}
