use num_bigint::BigInt;
use num_traits::Zero;
use rustc_hash::FxHashMap;
use serde::Serialize;

use super::{binomial, JetCtx, JetPoly, Monomial, MAX_VARS};
use crate::error::{Error, Result};
use crate::scalar::{PadicLike, EXACT};

/// Outcome of checking the two p-derivation axioms on a pair.
#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub additive: bool,
    pub multiplicative: bool,
    pub prec: i64,
}

impl AxiomReport {
    pub fn ok(&self) -> bool {
        self.additive && self.multiplicative
    }
}

impl<C: PadicLike> JetPoly<C> {
    /// The Frobenius lift `T^(i) -> (T^(i))^p + p T^(i+1)`, identity on
    /// scalars. The ambient order grows by one.
    ///
    /// Negative base exponents are expanded as a binomial series in
    /// `p T' / T^p`, which terminates at the precision cap. For base-truncated
    /// inputs the result is truncated at
    /// `min(D, p(D + 2 + v - N) - 1)`, where `v` bounds the valuation of the
    /// unknown tail from below: beyond that degree the tail could leak in.
    pub fn phi(&self) -> Result<Self> {
        let p = C::P as i64;
        let top = self.order_used();
        if top + 1 >= MAX_VARS {
            return Err(Error::JetOrder { need: top + 1, budget: MAX_VARS - 1 });
        }
        let prec = self.ctx.prec;
        let mut ctx = self.ctx.clone();
        ctx.order = self.ctx.order.max(top) + 1;
        if let Some(d) = self.ctx.base_max {
            if prec >= EXACT {
                return Err(Error::PrecisionExhausted("phi of a truncated series needs a finite precision".into()));
            }
            let floor = self.min_val().unwrap_or(0).min(0) - 1;
            let bound = p * (d + 2 + floor - prec) - 1;
            if bound < 0 {
                return Err(Error::Degree(format!("phi: base degree {d} too small at precision {prec}")));
            }
            ctx.base_max = Some(d.min(bound));
        }
        let limit = ctx.base_max;

        let mut cur: FxHashMap<Monomial, C> = self.terms.iter().map(|(m, c)| (*m, c.clone())).collect();
        for idx in (0..=top).rev() {
            let mut next: FxHashMap<Monomial, C> = FxHashMap::default();
            for (m, c) in cur {
                let e = m.0[idx];
                if e == 0 {
                    add_into(&mut next, m, c);
                    continue;
                }
                if e < 0 && prec >= EXACT {
                    return Err(Error::PrecisionExhausted(
                        "phi of a negative power needs a finite precision".into(),
                    ));
                }
                let mut k = 0u64;
                let mut pk_c = c.clone();
                loop {
                    if e >= 0 && k as i64 > e {
                        break;
                    }
                    if pk_c.is_zero() || pk_c.val_lower() >= prec {
                        break;
                    }
                    let mut nm = m;
                    nm.0[idx] = p * (e - k as i64);
                    nm.0[idx + 1] += k as i64;
                    let skip = idx == 0 && limit.is_some_and(|d| nm.base() > d);
                    if !skip {
                        let b = C::from_bigint(&binomial(e, k));
                        add_into(&mut next, nm, pk_c.clone() * b);
                    }
                    k += 1;
                    pk_c = pk_c.shift(1)?;
                }
            }
            cur = next;
        }
        Ok(Self::from_terms(ctx, cur))
    }

    /// `phi` with a jet-order budget check.
    pub fn phi_within(&self, max_order: usize) -> Result<Self> {
        let need = self.order_used() + 1;
        if need > max_order {
            return Err(Error::JetOrder { need, budget: max_order });
        }
        self.phi()
    }

    /// `f^e` via `f = u + g` with `u` the unit-coefficient part: the binomial
    /// terms `C(e,k) u^(e-k) g^k` whose valuation reaches the precision are
    /// never formed.
    pub fn pow_split(&self, e: u64) -> Self {
        let prec = self.ctx.prec;
        let (u, g): (Vec<_>, Vec<_>) = self.terms.iter().partition(|(_, c)| c.val_lower() <= 0);
        if prec >= EXACT || g.is_empty() || u.iter().any(|(_, c)| c.val_lower() < 0) {
            return self.pow(e);
        }
        let u = Self::from_terms(self.ctx.clone(), u.into_iter().map(|(m, c)| (*m, c.clone())));
        let g = Self::from_terms(self.ctx.clone(), g.into_iter().map(|(m, c)| (*m, c.clone())));
        let vg = g.min_val().unwrap_or(prec);
        let g = match g.div_p(vg) {
            Ok(g) => g,
            Err(_) => return self.pow(e),
        };
        let p = BigInt::from(C::P);
        let split = |k: u64| {
            let mut b = binomial(e as i64, k);
            let mut v = 0i64;
            while !b.is_zero() && (&b % &p).is_zero() {
                b /= &p;
                v += 1;
            }
            (v, b)
        };
        let mut upow = vec![Self::one(self.ctx.clone())];
        for _ in 0..e {
            let next = upow.last().unwrap().mul(&u);
            upow.push(next);
        }
        let mut acc = Self::zero(self.ctx.clone());
        let mut gk = Self::one(g.ctx.clone());
        for k in 0..=e {
            if k > 0 {
                gk = gk.mul(&g);
            }
            let (vb, unit) = split(k);
            let shift = vb + k as i64 * vg;
            if shift >= prec {
                if k as i64 * vg >= prec {
                    break;
                }
                continue;
            }
            let cap = prec - shift;
            let left = upow[(e - k) as usize].with_prec(cap);
            let term = if k == 0 { left } else { left.mul(&gk.with_prec(cap)) };
            let term = match term.shift_p(shift) {
                Ok(t) => t.scale(&C::from_bigint(&unit)),
                Err(_) => return self.pow(e),
            };
            acc = acc.add(&term);
        }
        acc
    }

    /// `delta(f) = (phi(f) - f^p) / p`. The division is checked to be exact;
    /// the result is known to one digit less than `f`.
    pub fn delta(&self) -> Result<Self> {
        let ph = self.phi()?;
        let fp = self.pow_split(C::P as u64).with_order(ph.ctx.order);
        ph.sub(&fp).div_p(1)
    }

    pub fn delta_within(&self, max_order: usize) -> Result<Self> {
        let need = self.order_used() + 1;
        if need > max_order {
            return Err(Error::JetOrder { need, budget: max_order });
        }
        self.delta()
    }

    /// `delta^k(f)`.
    pub fn delta_iter(&self, k: usize) -> Result<Self> {
        let mut f = self.clone();
        for _ in 0..k {
            f = f.delta()?;
        }
        Ok(f)
    }

    /// `phi^k(f)`.
    pub fn phi_iter(&self, k: usize) -> Result<Self> {
        let mut f = self.clone();
        for _ in 0..k {
            f = f.phi()?;
        }
        Ok(f)
    }

    /// `C_p(X, Y) = (X^p + Y^p - (X + Y)^p) / p` evaluated at a pair.
    pub fn cp(x: &Self, y: &Self) -> Result<Self> {
        let p = C::P as u64;
        x.pow(p).add(&y.pow(p)).sub(&x.add(y).pow(p)).div_p(1)
    }

    /// Check `delta(a+b) = delta a + delta b + C_p(a,b)` and
    /// `delta(ab) = a^p delta b + b^p delta a + p delta a delta b`.
    pub fn verify_p_derivation_axioms(f: &Self, g: &Self) -> Result<AxiomReport> {
        let df = f.delta()?;
        let dg = g.delta()?;
        let lhs_add = f.add(g).delta()?;
        let rhs_add = df.add(&dg).add(&Self::cp(f, g)?);
        let lhs_mul = f.mul(g).delta()?;
        let p = C::P as u64;
        let pc = Self::constant(f.ctx.clone(), C::from_i64(p as i64));
        let rhs_mul = f.pow(p).mul(&dg).add(&g.pow(p).mul(&df)).add(&pc.mul(&df).mul(&dg));
        let prec = lhs_add.prec().min(rhs_add.prec()).min(lhs_mul.prec()).min(rhs_mul.prec());
        Ok(AxiomReport {
            additive: lhs_add.equals(&rhs_add),
            multiplicative: lhs_mul.equals(&rhs_mul),
            prec,
        })
    }

    /// Reduction check for the Frobenius-lift property `phi(f) = f^p mod p`.
    pub fn frobenius_lift_defect(&self) -> Result<Self> {
        let ph = self.phi()?;
        Ok(ph.sub(&self.pow(C::P as u64)))
    }
}

fn add_into<C: PadicLike>(acc: &mut FxHashMap<Monomial, C>, m: Monomial, c: C) {
    match acc.get_mut(&m) {
        Some(e) => {
            let old = std::mem::replace(e, C::zero());
            *e = old + c;
        }
        None => {
            acc.insert(m, c);
        }
    }
}

/// The `G_m` chart: Laurent in `x` with jets up to `order`.
pub fn gm_ctx(order: usize, prec: i64) -> JetCtx {
    JetCtx::new("x", order).laurent().with_prec(prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Padic;
    use crate::scalar::Scalar;
    use num_traits::One;
    type Q5 = Padic<5>;

    fn t(i: usize) -> JetPoly<Q5> {
        JetPoly::var(JetCtx::new("T", 3).with_prec(8), i)
    }

    #[test]
    fn phi_of_base_variable() {
        let ph = t(0).phi().unwrap();
        let expected = t(0).pow(5).add(&t(1).scale(&Q5::exact(5)));
        assert_eq!(ph, expected);
        assert_eq!(t(0).delta().unwrap(), t(1));
        assert_eq!(t(1).delta().unwrap(), t(2));
    }

    #[test]
    fn delta_of_square() {
        let d = t(0).pow(2).delta().unwrap();
        let expected = t(0).pow(5).mul(&t(1)).scale(&Q5::exact(2)).add(&t(1).pow(2).scale(&Q5::exact(5)));
        assert_eq!(d, expected);
    }

    #[test]
    fn split_power_matches() {
        let c = JetCtx::new("T", 2).with_prec(4);
        let f = JetPoly::<Q5>::var(c.clone(), 0)
            .add(&JetPoly::var(c.clone(), 1).pow(2))
            .add(&JetPoly::var(c.clone(), 1).scale(&Q5::exact(10)))
            .add(&JetPoly::var(c.clone(), 2).pow(3).scale(&Q5::exact(75)))
            .add(&JetPoly::constant(c, Q5::exact(3)));
        assert_eq!(f.pow_split(5), f.pow(5));
        assert_eq!(f.pow_split(7), f.pow(7));
    }

    #[test]
    fn delta_of_scalar() {
        let c = JetPoly::constant(JetCtx::new("T", 1).with_prec(8), Q5::exact(3));
        let d = c.delta().unwrap();
        let want = Q5::from_ratio(&(3 - 243).into(), &5.into(), 7).unwrap();
        assert_eq!(d.coeff(&Monomial::ONE), want);
        assert_eq!(d.prec(), 7);
    }

    #[test]
    fn phi_of_inverse() {
        let c = gm_ctx(2, 8);
        let xinv = JetPoly::<Q5>::monomial(c.clone(), Monomial::var(0, -1), Q5::one());
        let x = JetPoly::<Q5>::var(c.clone(), 0);
        let prod = xinv.phi().unwrap().mul(&x.phi().unwrap());
        assert_eq!(prod, JetPoly::one(c));
    }

    #[test]
    fn axioms_laurent_pair() {
        let c = gm_ctx(2, 8);
        let x = JetPoly::<Q5>::var(c.clone(), 0);
        let xinv = JetPoly::<Q5>::monomial(c, Monomial::var(0, -1), Q5::one());
        let r = JetPoly::verify_p_derivation_axioms(&x, &xinv).unwrap();
        assert!(r.ok());
    }
}
