//! Finite-stage models of direct limits along the Frobenius lift.
//!
//! * [`LimitElement`] is a class `[a, i]` with `[a, i] = [phi(a), i + 1]`.
//! * [`TowerElement`] lives in `A[z]/(z^(p^m) - p)`.
//! * [`PerfectionElement`] is `f^(1/p^level)` for `f` over `F_p`.

use num_traits::One;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::jet::{JetCtx, JetPoly, Monomial};
use crate::padic::{Fp, Padic};
use crate::scalar::EXACT;

/// A class `[a, i]` in the direct limit of `a -> phi(a)`.
#[derive(Clone, Debug)]
pub struct LimitElement<const P: u32> {
    pub rep: JetPoly<Padic<P>>,
    pub stage: u32,
}

impl<const P: u32> LimitElement<P> {
    pub fn new(rep: JetPoly<Padic<P>>, stage: u32) -> Self {
        LimitElement { rep, stage }
    }

    /// The same class written at stage `stage + k`.
    pub fn shift(&self, k: u32) -> Result<Self> {
        Ok(LimitElement { rep: self.rep.phi_iter(k as usize)?, stage: self.stage + k })
    }

    /// Representatives at a common stage.
    pub fn align(&self, o: &Self) -> Result<(JetPoly<Padic<P>>, JetPoly<Padic<P>>, u32)> {
        let s = self.stage.max(o.stage);
        Ok((self.shift(s - self.stage)?.rep, o.shift(s - o.stage)?.rep, s))
    }

    /// Equality modulo the common precision. Comparing at the larger stage
    /// suffices because `phi` is injective modulo every power of p.
    pub fn equals_at_precision(&self, o: &Self, max_stage: u32) -> Result<bool> {
        let s = self.stage.max(o.stage);
        if s > max_stage {
            return Err(Error::Stage { need: s, budget: max_stage });
        }
        let (a, b, _) = self.align(o)?;
        Ok(a.equals(&b))
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        let (a, b, s) = self.align(o)?;
        Ok(LimitElement { rep: a.mul(&b), stage: s })
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        let (a, b, s) = self.align(o)?;
        Ok(LimitElement { rep: a.add(&b), stage: s })
    }

    /// Lower the stage while the representative lies in the image of `phi`.
    /// Idempotent.
    pub fn normalize(&self) -> Self {
        let mut cur = self.clone();
        while cur.stage > 0 {
            match phi_preimage(&cur.rep) {
                Some(b) => cur = LimitElement { rep: b, stage: cur.stage - 1 },
                None => break,
            }
        }
        cur
    }

    pub fn to_json(&self) -> Value {
        json!({"stage": self.stage, "poly": self.rep.to_text()})
    }
}

/// Solve `phi(b) = a` modulo the precision of `a`, if possible.
///
/// Modulo p the Frobenius lift is the p-power map, so the residue of `a`
/// must be a p-th power; its root is lifted and the defect divided by p,
/// digit by digit.
pub fn phi_preimage<const P: u32>(a: &JetPoly<Padic<P>>) -> Option<JetPoly<Padic<P>>> {
    if a.base_max().is_some() {
        return None;
    }
    let prec = a.prec();
    let ctx = a.ctx().clone();
    let mut b = JetPoly::zero(ctx.clone());
    let mut rest = a.clone();
    let mut scale = Padic::<P>::one();
    let digits = if prec >= EXACT { 64 } else { prec };
    for _ in 0..digits {
        if rest.is_empty() {
            return Some(b);
        }
        let r = rest.reduce().ok()?;
        let root = r.pth_root()?;
        let b0 = root.lift(EXACT);
        let b0 = JetPoly::from_terms(ctx.clone(), b0.terms().map(|(m, c)| (*m, c.clone())));
        b = b.add(&b0.scale(&scale));
        let next = rest.sub(&b0.phi().ok()?);
        rest = next.div_p(1).ok()?;
        scale = scale * Padic::exact(P);
    }
    if rest.is_empty() || prec < EXACT {
        Some(b.with_prec(prec))
    } else {
        None
    }
}

/// `f^(1/p^level)` with `f` a polynomial over `F_p`.
#[derive(Clone, Debug)]
pub struct PerfectionElement<const P: u32> {
    pub level: u32,
    pub poly: JetPoly<Fp<P>>,
}

impl<const P: u32> PerfectionElement<P> {
    pub fn new(poly: JetPoly<Fp<P>>, level: u32) -> Self {
        PerfectionElement { level, poly }.normalized()
    }

    /// Take p-th roots while possible so the level is minimal.
    pub fn normalized(mut self) -> Self {
        while self.level > 0 {
            match self.poly.pth_root() {
                Some(r) => {
                    self.poly = r;
                    self.level -= 1;
                }
                None => break,
            }
        }
        self
    }

    /// The representative at a higher level.
    pub fn at_level(&self, l: u32) -> JetPoly<Fp<P>> {
        assert!(l >= self.level);
        self.poly.frobenius(l - self.level)
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_empty()
    }

    pub fn mul(&self, o: &Self) -> Self {
        let l = self.level.max(o.level);
        Self::new(self.at_level(l).mul(&o.at_level(l)), l)
    }

    pub fn add(&self, o: &Self) -> Self {
        let l = self.level.max(o.level);
        Self::new(self.at_level(l).add(&o.at_level(l)), l)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let l = self.level.max(o.level);
        Self::new(self.at_level(l).sub(&o.at_level(l)), l)
    }

    pub fn pow(&self, e: u64) -> Self {
        Self::new(self.poly.pow_frobenius(e), self.level)
    }

    /// The absolute Frobenius `x -> x^p`.
    pub fn frobenius(&self) -> Self {
        if self.level > 0 {
            Self::new(self.poly.clone(), self.level - 1)
        } else {
            Self::new(self.poly.frobenius(1), 0)
        }
    }

    /// The p-th root, within a level budget.
    pub fn pth_root(&self, max_level: u32) -> Result<Self> {
        if self.level + 1 > max_level {
            return Err(Error::Stage { need: self.level + 1, budget: max_level });
        }
        Ok(Self::new(self.poly.clone(), self.level + 1))
    }

    pub fn equals(&self, o: &Self) -> bool {
        let l = self.level.max(o.level);
        self.at_level(l).equals(&o.at_level(l))
    }

    /// Terms with exponents written as reduced fractions `e/p^level`.
    pub fn to_json(&self) -> Value {
        let den = (P as i64).pow(self.level);
        let terms: Vec<Value> = self
            .poly
            .terms()
            .map(|(m, c)| {
                let exps: Vec<String> = m.0[..=m.top_index()]
                    .iter()
                    .map(|&e| {
                        let g = num_integer::gcd(e, den).max(1);
                        if den / g == 1 {
                            format!("{}", e / g)
                        } else {
                            format!("{}/{}", e / g, den / g)
                        }
                    })
                    .collect();
                json!({"exps": exps, "coeff": c.value()})
            })
            .collect();
        json!({"var": &*self.poly.ctx().var, "level": self.level, "terms": terms})
    }
}

/// `[a, i] -> a-bar^(1/p^i)`, the reduction into the perfection of `A/pA`.
pub fn perfection_reduce<const P: u32>(u: &LimitElement<P>, max_stage: u32) -> Result<PerfectionElement<P>> {
    if u.stage > max_stage {
        return Err(Error::Stage { need: u.stage, budget: max_stage });
    }
    Ok(PerfectionElement::new(u.rep.reduce()?, u.stage))
}

/// An element of `A[z]/(z^(p^m) - p)` with `A` a jet algebra; index `k` of
/// `coeffs` holds the coefficient of `z^k`.
#[derive(Clone, Debug)]
pub struct TowerElement<const P: u32> {
    pub m: u32,
    pub coeffs: Vec<JetPoly<Padic<P>>>,
}

impl<const P: u32> TowerElement<P> {
    fn size(m: u32) -> usize {
        (P as usize).pow(m)
    }

    pub fn zero(m: u32, ctx: &JetCtx) -> Self {
        TowerElement { m, coeffs: vec![JetPoly::zero(ctx.clone()); Self::size(m)] }
    }

    pub fn from_base(m: u32, a: JetPoly<Padic<P>>) -> Self {
        let mut t = Self::zero(m, a.ctx());
        t.coeffs[0] = a;
        t
    }

    /// The generator `z_m`.
    pub fn z(m: u32, ctx: &JetCtx) -> Self {
        let mut t = Self::zero(m, ctx);
        if Self::size(m) == 1 {
            t.coeffs[0] = JetPoly::constant(ctx.clone(), Padic::exact(P));
        } else {
            t.coeffs[1] = JetPoly::one(ctx.clone());
        }
        t
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.m != o.m {
            return Err(Error::Invalid(format!("tower stages {} and {} differ; lift first", self.m, o.m)));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.add(b)).collect();
        Ok(TowerElement { m: self.m, coeffs })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.sub(b)).collect();
        Ok(TowerElement { m: self.m, coeffs })
    }

    /// Product reduced by `z^(p^m) = p`.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let n = Self::size(self.m);
        let ctx = self.coeffs[0].ctx().clone();
        let mut out = vec![JetPoly::zero(ctx); n];
        let p = Padic::<P>::exact(P);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_empty() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if b.is_empty() {
                    continue;
                }
                let mut prod = a.mul(b);
                let mut k = i + j;
                if k >= n {
                    k -= n;
                    prod = prod.scale(&p);
                }
                out[k] = out[k].add(&prod);
            }
        }
        Ok(TowerElement { m: self.m, coeffs: out })
    }

    pub fn pow(&self, mut e: u64) -> Result<Self> {
        let ctx = self.coeffs[0].ctx().clone();
        let mut acc = Self::from_base(self.m, JetPoly::one(ctx));
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b)?;
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b)?;
            }
        }
        Ok(acc)
    }

    /// The embedding `z_m -> z_(m+1)^p`.
    pub fn lift(&self) -> Self {
        let ctx = self.coeffs[0].ctx().clone();
        let mut out = Self::zero(self.m + 1, &ctx);
        for (k, c) in self.coeffs.iter().enumerate() {
            out.coeffs[k * P as usize] = c.clone();
        }
        out
    }

    /// Reduction modulo the maximal ideal `(z)` (which contains p).
    pub fn reduce_mod_max(&self) -> Result<JetPoly<Fp<P>>> {
        self.coeffs[0].reduce()
    }

    pub fn equals(&self, o: &Self) -> bool {
        self.m == o.m && self.coeffs.iter().zip(&o.coeffs).all(|(a, b)| a.equals(b))
    }

    /// `z`-adic valuation of the element (p counts as `z^(p^m)`); `None`
    /// for zero at precision.
    pub fn z_valuation(&self) -> Option<i64> {
        let n = Self::size(self.m) as i64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_empty())
            .map(|(k, c)| c.min_val().unwrap() * n + k as i64)
            .min()
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_empty())
            .map(|(k, c)| json!({"z": k, "coeff": c.to_text()}))
            .collect();
        json!({"stage": self.m, "terms": terms})
    }
}

/// Monomial helper for base-only elements.
pub fn base_monomial<const P: u32>(ctx: &JetCtx, e: i64) -> JetPoly<Padic<P>> {
    JetPoly::monomial(ctx.clone(), Monomial::var(0, e), Padic::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::gm_ctx;

    type L5 = LimitElement<5>;

    fn x() -> JetPoly<Padic<5>> {
        JetPoly::var(gm_ctx(3, 6), 0)
    }

    #[test]
    fn defining_relation() {
        let u = L5::new(x().mul(&JetPoly::var(gm_ctx(3, 6), 1)), 1);
        let v = u.shift(1).unwrap();
        assert!(u.equals_at_precision(&v, 6).unwrap());
        let a = L5::new(x(), 1);
        let b = L5::new(x(), 2);
        assert!(!a.equals_at_precision(&b, 6).unwrap());
    }

    #[test]
    fn normalize_is_idempotent() {
        let u = L5::new(x(), 0).shift(2).unwrap();
        let n = u.normalize();
        assert_eq!(n.stage, 0);
        assert!(n.rep.equals(&x()));
        let nn = n.normalize();
        assert_eq!(nn.stage, n.stage);
    }

    #[test]
    fn perfection_examples() {
        let r = perfection_reduce(&L5::new(x(), 1), 6).unwrap();
        assert_eq!(r.level, 1);
        let xp = L5::new(x().pow(5), 1);
        let r0 = perfection_reduce(&L5::new(x(), 0), 6).unwrap();
        assert!(perfection_reduce(&xp, 6).unwrap().equals(&r0));
        assert_eq!(r.to_json()["terms"][0]["exps"][0], "1/5");
    }

    #[test]
    fn tower_basics() {
        let ctx = JetCtx::new("T", 0).with_prec(8);
        for m in 1..=3 {
            let z = TowerElement::<5>::z(m, &ctx);
            let zp = z.pow(5u64.pow(m)).unwrap();
            let p = TowerElement::from_base(m, JetPoly::constant(ctx.clone(), Padic::exact(5)));
            assert!(zp.equals(&p));
            let lifted = z.lift();
            let z1 = TowerElement::<5>::z(m + 1, &ctx).pow(5).unwrap();
            assert!(lifted.equals(&z1));
        }
    }
}
