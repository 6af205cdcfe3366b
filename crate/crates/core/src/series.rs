//! Dense truncated power series and elliptic formal-group logarithms.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::jet::{JetCtx, JetPoly, Monomial};
use crate::padic::Padic;
use crate::scalar::{int_valuation, PadicLike, Scalar, EXACT};

/// A series `c_0 + c_1 T + ... + c_D T^D mod T^(D+1)`.
///
/// `prec` is the absolute p-adic precision of the whole series (the minimum
/// over coefficients, including ones that cancelled). `floor` is the declared
/// valuation floor; operations on p-adic coefficients refuse to produce
/// coefficients below it.
#[derive(Clone, Debug)]
pub struct PowerSeries<C> {
    var: Arc<str>,
    coeffs: Vec<C>,
    prec: i64,
    floor: i64,
}

impl<C: Scalar> PowerSeries<C> {
    pub fn new(var: &str, coeffs: Vec<C>) -> Self {
        let prec = coeffs.iter().filter_map(|c| c.precision()).min().unwrap_or(EXACT);
        let coeffs = coeffs.into_iter().map(|c| c.cap(prec)).collect();
        PowerSeries { var: Arc::from(var), coeffs, prec, floor: i64::MIN }
    }

    pub fn zero(var: &str, d: usize) -> Self {
        Self::new(var, vec![C::zero(); d + 1])
    }

    pub fn one(var: &str, d: usize) -> Self {
        let mut v = vec![C::zero(); d + 1];
        v[0] = C::one();
        Self::new(var, v)
    }

    /// The series `T`.
    pub fn gen(var: &str, d: usize) -> Self {
        let mut v = vec![C::zero(); d + 1];
        if d >= 1 {
            v[1] = C::one();
        }
        Self::new(var, v)
    }

    fn like(&self, coeffs: Vec<C>) -> Self {
        let mut s = Self::new(&self.var, coeffs);
        s.floor = self.floor;
        s
    }

    pub fn with_floor(mut self, floor: i64) -> Self {
        self.floor = floor;
        self
    }

    pub fn floor(&self) -> i64 {
        self.floor
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    /// Degree bound `D`.
    pub fn deg(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> C {
        self.coeffs.get(i).cloned().unwrap_or_else(C::zero)
    }

    pub fn truncate(&self, d: usize) -> Self {
        let mut v: Vec<C> = self.coeffs.iter().take(d + 1).cloned().collect();
        v.resize(d + 1, C::zero());
        self.like(v)
    }

    pub fn cap(&self, prec: i64) -> Self {
        let mut s = self.like(self.coeffs.iter().map(|c| c.clone().cap(prec)).collect());
        s.prec = s.prec.min(prec);
        s
    }

    pub fn add(&self, o: &Self) -> Self {
        let d = self.deg().min(o.deg());
        let v = (0..=d).map(|i| self.coeffs[i].clone() + o.coeffs[i].clone()).collect();
        let mut s = self.like(v);
        s.prec = s.prec.min(self.prec).min(o.prec);
        s.cap(s.prec)
    }

    pub fn neg(&self) -> Self {
        let mut s = self.like(self.coeffs.iter().map(|c| -c.clone()).collect());
        s.prec = self.prec;
        s
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &C) -> Self {
        let mut s = self.like(self.coeffs.iter().map(|c| c.clone() * k.clone()).collect());
        if k.precision().is_none() {
            s.prec = s.prec.min(self.prec);
        }
        s
    }

    pub fn mul(&self, o: &Self) -> Self {
        let d = self.deg().min(o.deg());
        let mut v = vec![C::zero(); d + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(d + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(d + 1 - i) {
                if b.is_zero() {
                    continue;
                }
                let t = std::mem::replace(&mut v[i + j], C::zero());
                v[i + j] = t + a.clone() * b.clone();
            }
        }
        let mut s = self.like(v);
        s.prec = s.prec.min(self.prec).min(o.prec);
        s.cap(s.prec)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(&self.var, self.deg());
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        acc
    }

    /// Multiplicative inverse; requires an invertible constant term.
    pub fn inverse(&self) -> Result<Self> {
        let d = self.deg();
        let a0inv = self.coeffs[0].inverse(self.prec)?;
        let mut b = vec![C::zero(); d + 1];
        b[0] = a0inv.clone();
        for n in 1..=d {
            let mut s = C::zero();
            for k in 1..=n {
                if !self.coeffs[k].is_zero() {
                    s = s + self.coeffs[k].clone() * b[n - k].clone();
                }
            }
            b[n] = -(s * a0inv.clone());
        }
        let mut out = self.like(b);
        out.prec = out.prec.min(self.prec);
        Ok(out)
    }

    pub fn derivative(&self) -> Self {
        let d = self.deg();
        let mut v: Vec<C> = (1..=d).map(|i| self.coeffs[i].clone() * C::from_i64(i as i64)).collect();
        v.push(C::zero());
        let mut s = self.like(v);
        s.prec = s.prec.min(self.prec);
        s
    }

    /// `f(g)` for `g(0) = 0`, by Horner's rule.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        if !g.coeffs[0].is_zero() {
            return Err(Error::Invalid("compose: inner series must have zero constant term".into()));
        }
        let d = self.deg().min(g.deg());
        let g = g.truncate(d);
        let mut acc = Self::zero(&self.var, d);
        for i in (0..=d).rev() {
            acc = acc.mul(&g);
            acc.coeffs[0] = acc.coeffs[0].clone() + self.coeffs[i].clone();
        }
        let mut s = acc.clone();
        s.prec = acc.prec.min(self.prec).min(g.prec);
        Ok(s.cap(s.prec))
    }

    /// Compositional inverse of `f = T + O(T^2)`, by Newton iteration
    /// `g <- g - (f(g) - T) / f'(g)`.
    pub fn reverse(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() || self.coeffs.get(1) != Some(&C::one()) {
            return Err(Error::Invalid("reverse: series must be T + O(T^2)".into()));
        }
        let d = self.deg();
        let fd = self.derivative();
        let t = Self::gen(&self.var, d);
        let mut g = t.clone();
        let mut known = 1usize;
        while known < d {
            known = (2 * known + 1).min(d);
            let fg = self.truncate(known).compose(&g.truncate(known))?;
            let dg = fd.truncate(known).compose(&g.truncate(known))?;
            let corr = fg.sub(&t.truncate(known)).mul(&dg.inverse()?);
            g = g.truncate(known).sub(&corr);
        }
        Ok(g.truncate(d))
    }

    /// `sum_(i>=1) s^i / i!` style sums need exact denominators; this
    /// divides a series by an integer.
    pub fn div_int(&self, n: i64) -> Result<Self> {
        let inv = C::from_ratio(&BigInt::from(1), &BigInt::from(n), self.prec)?;
        let mut s = self.like(self.coeffs.iter().map(|c| c.clone() * inv.clone()).collect());
        s.prec = s.prec.min(self.prec);
        Ok(s)
    }

    pub fn to_jet(&self, ctx: &JetCtx) -> JetPoly<C> {
        let ctx = ctx.clone().with_base_max(self.deg() as i64).with_prec(ctx.prec.min(self.prec));
        JetPoly::from_terms(
            ctx,
            self.coeffs.iter().enumerate().map(|(i, c)| (Monomial::var(0, i as i64), c.clone())),
        )
    }

    /// Read a base-only jet polynomial as a series of degree `d`.
    pub fn from_jet(f: &JetPoly<C>, d: usize) -> Result<Self> {
        if f.terms().any(|(m, _)| m.top_index() > 0 || m.base() < 0) {
            return Err(Error::Invalid("not a power series in the base variable".into()));
        }
        if let Some(bm) = f.base_max() {
            if (bm as usize) < d {
                return Err(Error::Degree(format!("series known to degree {bm}, need {d}")));
            }
        }
        let mut s = Self::new(&f.ctx().var, f.base_coeffs(d as i64));
        s.prec = s.prec.min(f.prec());
        Ok(s.cap(s.prec))
    }
}

impl<C: PadicLike> PowerSeries<C> {
    /// Divide by a nonzero integer in `Q_p`; division by `p^v` costs `v`
    /// digits of absolute precision.
    pub fn div_int_padic(&self, n: i64) -> Result<Self> {
        let v = int_valuation(&BigInt::from(n), C::P).ok_or_else(|| Error::Invalid("division by 0".into()))?;
        let unit = n / (C::P as i64).pow(v as u32);
        let uinv = C::from_i64(unit).inverse(self.prec)?;
        let coeffs: Result<Vec<C>> = self.coeffs.iter().map(|c| (c.clone() * uinv.clone()).shift(-v)).collect();
        let mut s = self.like(coeffs?);
        if self.prec < EXACT {
            s.prec = s.prec.min(self.prec - v);
        }
        s.check_floor()?;
        Ok(s.cap(s.prec))
    }

    fn check_floor(&self) -> Result<()> {
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() && c.val_lower() < self.floor {
                return Err(Error::ValuationFloor(format!(
                    "coefficient {i} has valuation {} below floor {}",
                    c.val_lower(),
                    self.floor
                )));
            }
        }
        Ok(())
    }

    fn arg_ok(&self) -> bool {
        let integral = self.min_val().is_none_or(|v| v >= 0);
        integral && (self.coeffs[0].is_zero() || self.coeffs[0].val_lower() >= 1)
    }

    // True when every term `s^m / c_m` with `m >= n` is invisible at the
    // working precision, given `v(s^n) = vn` and `v(s^m) >= max(vn, m - D)`.
    fn tail_negligible(&self, vn: i64, n: i64, loss: impl Fn(i64) -> i64) -> bool {
        if self.prec >= EXACT {
            return false;
        }
        let d = self.deg() as i64;
        (n..n + d + self.prec + 64).all(|m| vn.max(m - d) - loss(m) >= self.prec)
    }

    /// `log(1 + s)` for integral `s` with zero constant term or constant
    /// term divisible by p. Terms `s^n/n` are summed until the rest is
    /// provably below the working precision; the `1/n` loss shows up in the
    /// result's precision.
    pub fn log1p(&self) -> Result<Self> {
        if !self.arg_ok() {
            return Err(Error::Convergence("log1p: argument must be integral and in (p, T)".into()));
        }
        let d = self.deg();
        let p = C::P as i64;
        let mut acc = Self::zero(&self.var, d);
        acc.prec = self.prec;
        let mut pw = self.clone();
        let mut n: i64 = 1;
        while let Some(vn) = pw.min_val() {
            if self.tail_negligible(vn, n, |m| (m as f64).log(p as f64).floor() as i64) {
                break;
            }
            let mut term = pw.div_int_padic(n)?;
            if n % 2 == 0 {
                term = term.neg();
            }
            acc = acc.add(&term);
            pw = pw.mul(self);
            n += 1;
        }
        Ok(acc)
    }

    /// `exp(s)` for integral `s` with zero constant term or constant term
    /// divisible by p (p odd). The loss from `1/n!` is reflected in the
    /// result's precision.
    pub fn exp(&self) -> Result<Self> {
        if !self.arg_ok() {
            return Err(Error::Convergence("exp: argument must be integral and in (p, T)".into()));
        }
        let d = self.deg();
        let p = C::P as i64;
        let mut acc = Self::one(&self.var, d);
        acc.prec = self.prec;
        let mut pw = Self::one(&self.var, d);
        let mut n: i64 = 1;
        let mut fact = BigInt::from(1);
        loop {
            pw = pw.mul(self);
            fact *= n;
            let Some(vn) = pw.min_val() else { break };
            if self.tail_negligible(vn, n, |m| (m - 1) / (p - 1)) {
                break;
            }
            let vf = int_valuation(&fact, C::P).unwrap();
            acc = acc.add(&pw.div_big(&fact, vf)?);
            n += 1;
        }
        Ok(acc)
    }

    fn div_big(&self, n: &BigInt, v: i64) -> Result<Self> {
        let unit = n / num_traits::pow(BigInt::from(C::P), v as usize);
        let uinv = C::from_bigint(&unit).inverse(self.prec)?;
        let coeffs: Result<Vec<C>> = self.coeffs.iter().map(|c| (c.clone() * uinv.clone()).shift(-v)).collect();
        let mut s = self.like(coeffs?);
        if self.prec < EXACT {
            s.prec = s.prec.min(self.prec - v);
        }
        Ok(s.cap(s.prec))
    }

    /// Smallest coefficient valuation, `None` for the zero series.
    pub fn min_val(&self) -> Option<i64> {
        self.coeffs.iter().filter(|c| !c.is_zero()).map(|c| c.val_lower()).min()
    }
}

impl<C: Scalar + serde::Serialize> PowerSeries<C> {
    pub fn to_json(&self) -> Value {
        json!({
            "var": &*self.var,
            "deg": self.deg(),
            "prec": (self.prec < EXACT).then_some(self.prec),
            "coeffs": self.coeffs,
        })
    }
}

/// `log(1 + x)` of a scalar with `x` divisible by p.
pub fn log1p_scalar<const P: u32>(x: &Padic<P>) -> Result<Padic<P>> {
    if !x.is_zero() && x.val_lower() < 1 {
        return Err(Error::Convergence("log1p: argument not divisible by p".into()));
    }
    let prec = x.prec();
    if prec >= EXACT && !x.is_zero() {
        return Err(Error::PrecisionExhausted("log1p of an exact nonzero scalar".into()));
    }
    let mut acc = Padic::<P>::zero_at(prec);
    let mut pw = x.clone();
    let mut n: i64 = 1;
    while !pw.is_zero() {
        let vn = int_valuation(&BigInt::from(n), P).unwrap();
        if pw.val_lower() - vn >= prec && pw.val_lower() > prec {
            break;
        }
        let inv = Padic::<P>::from_ratio(&BigInt::from(1), &BigInt::from(n), prec + vn)?;
        let term = pw.clone() * inv;
        acc = if n % 2 == 1 { acc + term } else { acc - term };
        pw = pw * x.clone();
        n += 1;
    }
    Ok(acc)
}

/// `exp(x)` of a scalar with `x` divisible by p.
pub fn exp_scalar<const P: u32>(x: &Padic<P>) -> Result<Padic<P>> {
    if !x.is_zero() && x.val_lower() < 1 {
        return Err(Error::Convergence("exp: argument not divisible by p".into()));
    }
    let prec = x.prec();
    let mut acc = Padic::<P>::one().cap(prec);
    let mut pw = Padic::<P>::one();
    let mut fact = BigInt::from(1);
    let mut n: i64 = 1;
    loop {
        pw = pw * x.clone();
        fact *= n;
        if pw.is_zero() {
            break;
        }
        let vf = int_valuation(&fact, P).unwrap();
        if pw.val_lower() - vf >= prec && n > 2 * prec + 2 {
            break;
        }
        let inv = Padic::<P>::from_ratio(&BigInt::from(1), &fact, prec + vf)?;
        acc = acc + pw.clone() * inv;
        n += 1;
    }
    Ok(acc)
}

/// The formal group logarithm of `y^2 = x^3 + A x + B` in the parameter
/// `T = -x/y`, with invariant differential `dx/(2y)` so that `c_1 = 1`.
#[derive(Clone, Debug)]
pub struct FormalGroupLog<C> {
    pub a: C,
    pub b: C,
    /// `ell(T) = sum c_i T^i`.
    pub log: PowerSeries<C>,
    /// `Omega = d ell / dT`.
    pub omega: PowerSeries<C>,
    /// Compositional inverse of `log`, when requested.
    pub exp: Option<PowerSeries<C>>,
}

/// `w(T) / T^3 = u(T)` solves `u = 1 + A T^4 u^2 + B T^6 u^3`; from
/// `x = T/w`, `y = -1/w` one gets `dx/(2y) = (1 + T u'/(2u)) dT`.
pub fn weierstrass_u<C: Scalar>(a: &C, b: &C, d: usize, var: &str) -> PowerSeries<C> {
    let one = PowerSeries::<C>::one(var, d);
    let mut t4 = vec![C::zero(); d + 1];
    let mut t6 = vec![C::zero(); d + 1];
    if d >= 4 {
        t4[4] = a.clone();
    }
    if d >= 6 {
        t6[6] = b.clone();
    }
    let t4 = PowerSeries::new(var, t4);
    let t6 = PowerSeries::new(var, t6);
    let mut u = one.clone();
    // each pass fixes at least four more coefficients
    for _ in 0..=(d / 4 + 1) {
        let u2 = u.mul(&u);
        u = one.add(&t4.mul(&u2)).add(&t6.mul(&u2.mul(&u)));
    }
    u
}

impl<C: Scalar> FormalGroupLog<C> {
    /// `Omega` to degree `d - 1` and `ell` to degree `d`, computed with
    /// coefficient type `C`; `div` divides a series coefficientwise by `i`.
    fn build(a: C, b: C, d: usize, divide: impl Fn(&C, i64) -> Result<C>) -> Result<Self> {
        if d < 5 {
            return Err(Error::Degree(format!("formal group log needs D >= 5, got {d}")));
        }
        let u = weierstrass_u(&a, &b, d, "T");
        let uinv = u.inverse()?;
        let du = u.derivative();
        let mut tdu = vec![C::zero(); d + 1];
        for i in 1..=d {
            tdu[i] = du.coeff(i - 1);
        }
        let tdu = PowerSeries::new("T", tdu);
        let half = C::from_ratio(&BigInt::from(1), &BigInt::from(2), u.prec())?;
        let omega = PowerSeries::one("T", d).add(&tdu.mul(&uinv).scale(&half));
        let mut lc = vec![C::zero(); d + 1];
        for i in 1..=d {
            lc[i] = divide(&omega.coeff(i - 1), i as i64)?;
        }
        let log = PowerSeries::new("T", lc);
        Ok(FormalGroupLog { a, b, log, omega: omega.truncate(d - 1), exp: None })
    }

    pub fn with_exp(mut self) -> Result<Self> {
        self.exp = Some(self.log.reverse()?);
        Ok(self)
    }

    pub fn coefficient(&self, i: usize) -> C {
        self.log.coeff(i)
    }
}

/// Exact formal group log over `Q` (for oracles and small degrees).
pub fn formal_group_log_exact(
    a: &num_rational::BigRational,
    b: &num_rational::BigRational,
    d: usize,
) -> Result<FormalGroupLog<num_rational::BigRational>> {
    FormalGroupLog::build(a.clone(), b.clone(), d, |c, i| Ok(c / num_rational::BigRational::from_integer(i.into())))
}

/// Discriminant check `4A^3 + 27B^2` a p-adic unit.
pub fn good_reduction<const P: u32>(a: &Padic<P>, b: &Padic<P>) -> Result<()> {
    let disc = Padic::<P>::exact(4) * a.pow(3) + Padic::<P>::exact(27) * b.pow(2);
    if disc.is_zero() || disc.val_lower() > 0 {
        return Err(Error::BadReduction(format!("4A^3 + 27B^2 = {disc} is not a unit")));
    }
    Ok(())
}

/// The formal group log of `y^2 = x^3 + Ax + B` to degree `d`, with
/// coefficients known to absolute precision `prec`. Internally the series
/// are computed with `floor(log_p d)` guard digits to absorb the `1/i`
/// denominators.
pub fn formal_group_log<const P: u32>(
    a: &Padic<P>,
    b: &Padic<P>,
    d: usize,
    prec: i64,
) -> Result<FormalGroupLog<Padic<P>>> {
    good_reduction(a, b)?;
    let guard = (d as f64).log(P as f64).floor() as i64 + 1;
    let w = prec + guard;
    let mut fg = FormalGroupLog::build(a.clone().cap(w), b.clone().cap(w), d, |c, i| {
        let v = int_valuation(&BigInt::from(i), P).unwrap();
        let unit = i / (P as i64).pow(v as u32);
        let inv = Padic::<P>::exact(unit).inverse(w)?;
        Ok((c.clone() * inv).shift_by(-v))
    })?;
    let floor = -guard;
    fg.log = fg.log.cap(prec).with_floor(floor);
    fg.omega = fg.omega.cap(prec).with_floor(0);
    fg.log.check_floor()?;
    Ok(fg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::{One, Zero};
    type Q5 = Padic<5>;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn reverse_of_t_plus_t2() {
        let f = PowerSeries::new("T", vec![rat(0, 1), rat(1, 1), rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1)]);
        let g = f.reverse().unwrap();
        let want = [0, 1, -1, 2, -5, 14];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(g.coeff(i), rat(*w, 1));
        }
        assert_eq!(f.compose(&PowerSeries::gen("T", 5)).unwrap().coeffs(), f.coeffs());
    }

    #[test]
    fn exact_log_leading_coefficients() {
        let a = rat(3, 1);
        let b = rat(7, 1);
        let fg = formal_group_log_exact(&a, &b, 12).unwrap();
        assert_eq!(fg.coefficient(1), BigRational::one());
        for i in [2, 3, 4, 6] {
            assert!(fg.coefficient(i).is_zero());
        }
        assert_eq!(fg.coefficient(5), rat(6, 5));
        assert_eq!(fg.coefficient(7), rat(3, 1));
    }

    #[test]
    fn scalar_log_exp_inverse() {
        let x = Q5::with_prec(5 * 7, 10);
        let l = log1p_scalar(&x).unwrap();
        let e = exp_scalar(&l).unwrap();
        assert_eq!(e - Q5::one(), x);
    }

    #[test]
    fn exp_zero_is_one() {
        let s = PowerSeries::<Q5>::zero("T", 6).cap(8);
        let e = s.exp().unwrap();
        assert_eq!(e.coeff(0), Q5::one());
        assert!(e.coeffs()[1..].iter().all(|c| c.is_zero()));
    }
}
