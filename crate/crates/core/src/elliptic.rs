//! Elliptic curves `y^2 = x^3 + Ax + B` over `Z_p`: the trace of Frobenius,
//! the delta-character `psi_E` and the cocharacter recurrence.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{FiltrationLevel, JetCtx, JetPoly, Monomial};
use crate::padic::Padic;
use crate::scalar::{PadicLike, Scalar};
use crate::series::{formal_group_log, good_reduction, FormalGroupLog};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    Ordinary,
    Supersingular,
}

/// `#E(F_p)` by enumeration, including the point at infinity.
pub fn count_points(p: u32, a: i64, b: i64) -> u64 {
    let p = p as i64;
    let mut n = 1u64;
    for x in 0..p {
        let f = (x * x % p * x + a * x + b).rem_euclid(p);
        n += if f == 0 {
            1
        } else if legendre(f, p) == 1 {
            2
        } else {
            0
        };
    }
    n
}

fn legendre(a: i64, p: i64) -> i64 {
    let mut r = 1i64;
    let mut base = a.rem_euclid(p);
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    r
}

/// `a_p = p + 1 - #E(F_p)`.
pub fn count_points_ap<const P: u32>(a: &Padic<P>, b: &Padic<P>) -> Result<i64> {
    good_reduction(a, b)?;
    if P > 13 {
        return Err(Error::Invalid(format!("point counting is exhaustive and limited to p <= 13, got {P}")));
    }
    let (ar, br) = (a.residue()? as i64, b.residue()? as i64);
    Ok(P as i64 + 1 - count_points(P, ar, br) as i64)
}

/// `a^2 <= 4p`.
pub fn hasse_ok(p: u32, ap: i64) -> bool {
    ap * ap <= 4 * p as i64
}

/// Ordinary iff `a_p` is prime to p; rejects traces outside the Hasse bound.
pub fn classify(p: u32, ap: i64) -> Result<Reduction> {
    if !hasse_ok(p, ap) {
        return Err(Error::Invalid(format!("a_p = {ap} violates the Hasse bound at p = {p}")));
    }
    Ok(if ap.rem_euclid(p as i64) == 0 { Reduction::Supersingular } else { Reduction::Ordinary })
}

/// A curve with its trace and the constants `lambda_1 = -a_p`, `lambda_0 = 1`.
#[derive(Clone, Debug)]
pub struct EllipticCurve<const P: u32> {
    pub a: Padic<P>,
    pub b: Padic<P>,
    pub ap: i64,
    pub class: Reduction,
    pub lambda0: Padic<P>,
    pub lambda1: Padic<P>,
}

impl<const P: u32> EllipticCurve<P> {
    pub fn new(a: i64, b: i64) -> Result<Self> {
        let (a, b) = (Padic::exact(a), Padic::exact(b));
        let ap = count_points_ap(&a, &b)?;
        let class = classify(P, ap)?;
        Ok(EllipticCurve { a, b, ap, class, lambda0: Padic::one(), lambda1: Padic::exact(-ap) })
    }

    /// Replace the constants, e.g. to test that a perturbation is detected.
    pub fn with_lambdas(mut self, lambda0: Padic<P>, lambda1: Padic<P>) -> Self {
        self.lambda0 = lambda0;
        self.lambda1 = lambda1;
        self
    }

    pub fn log(&self, d: usize, prec: i64) -> Result<FormalGroupLog<Padic<P>>> {
        formal_group_log(&self.a, &self.b, d, prec)
    }
}

/// Where `psi_E` first fails to be integral.
#[derive(Clone, Debug, Serialize)]
pub struct IntegralityFailure {
    pub degree: i64,
    pub term: String,
    pub valuation: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralityReport {
    #[serde(rename = "D")]
    pub d: usize,
    #[serde(rename = "N")]
    pub n: i64,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<IntegralityFailure>,
}

/// `psi_E = (ell^(phi^2) + lambda_1 ell^phi + p lambda_0 ell)/p` in
/// `Z_p[[T]][T', T'']`, known modulo `T^(D+1)` and `p^(N-1)`.
#[derive(Clone, Debug)]
pub struct PsiElliptic<const P: u32> {
    pub psi: JetPoly<Padic<P>>,
    pub log: FormalGroupLog<Padic<P>>,
    pub report: IntegralityReport,
}

pub fn psi_elliptic<const P: u32>(e: &EllipticCurve<P>, d: usize, n: i64) -> Result<PsiElliptic<P>> {
    let p = P as usize;
    if d < p * p + p {
        return Err(Error::Degree(format!("psi_E needs D >= p^2 + p = {}, got {d}", p * p + p)));
    }
    let fg = e.log(d, n)?;
    let ctx = JetCtx::new("T", 0).with_prec(n);
    let ell = fg.log.to_jet(&ctx);
    let ell1 = ell.phi()?;
    let ell2 = ell1.phi()?;
    let pl0 = e.lambda0.clone() * Padic::exact(P);
    let sum = ell2.add(&ell1.scale(&e.lambda1).with_order(2)).add(&ell.scale(&pl0).with_order(2));
    let psi = sum.shift_p(-1)?;
    let bad = psi
        .terms()
        .filter(|(_, c)| c.val_lower() < 0)
        .min_by_key(|(m, _)| (m.base(), **m))
        .map(|(m, c)| IntegralityFailure {
            degree: m.base(),
            term: JetPoly::monomial(psi.ctx().clone().with_prec(crate::scalar::EXACT), *m, Padic::<P>::one())
                .to_text(),
            valuation: c.val_lower(),
        });
    let report = IntegralityReport {
        d: psi.base_max().unwrap_or(d as i64) as usize,
        n: psi.prec(),
        ok: bad.is_none(),
        first_failure: bad,
    };
    Ok(PsiElliptic { psi, log: fg, report })
}

/// Leading form of `psi_E` modulo the zeroth filtration step.
#[derive(Clone, Debug, Serialize)]
pub struct ManinReport {
    #[serde(rename = "D")]
    pub d: i64,
    /// Coefficient of `(T')^p` is `Omega^(p^2)` mod p.
    pub tprime_p_ok: bool,
    /// Coefficient of `T'` is `lambda_1 Omega^p` mod p.
    pub tprime_ok: bool,
    /// Coefficient of `T''` is `p Omega^(p^2)` mod `p^2`.
    pub tsecond_ok: bool,
    /// Level of `psi - Omega^(p^2) (T')^phi - lambda_1 Omega^p T'`.
    pub remainder_level: FiltrationLevel,
    pub ok: bool,
}

pub fn manin_kernel_leading<const P: u32>(e: &EllipticCurve<P>, d: usize, n: i64) -> Result<ManinReport> {
    let ps = psi_elliptic(e, d, n)?;
    let psi = &ps.psi;
    let dd = psi.base_max().unwrap();
    let ctx = psi.ctx().clone();
    let omega = ps.log.omega.truncate(dd as usize);
    let om_p = omega.pow(P as u64);
    let om_p2 = om_p.pow(P as u64);
    let om_p2j = om_p2.to_jet(&ctx).with_ctx(ctx.clone());
    let om_pj = om_p.to_jet(&ctx).with_ctx(ctx.clone());
    let tp = JetPoly::<Padic<P>>::var(ctx.clone(), 1);
    let tpp = JetPoly::<Padic<P>>::var(ctx.clone(), 2);
    let tphi = tp.pow(P as u64).add(&tpp.scale(&Padic::exact(P)));
    let lead = om_p2j.mul(&tphi).add(&om_pj.mul(&tp).scale(&e.lambda1));
    let rem = psi.sub(&lead.with_ctx(ctx.clone()));

    let coeff = |f: &JetPoly<Padic<P>>, k: usize, ex: i64| f.coeff_of_jets(&Monomial::var(k, ex));
    let diff_min = |a: JetPoly<Padic<P>>, b: &JetPoly<Padic<P>>| a.sub(&b.with_ctx(a.ctx().clone())).min_val();
    let tprime_p_ok = diff_min(coeff(psi, 1, P as i64), &om_p2j).is_none_or(|v| v >= 1);
    let tprime_ok = diff_min(coeff(psi, 1, 1), &om_pj.scale(&e.lambda1)).is_none_or(|v| v >= 1);
    let tsecond_ok =
        diff_min(coeff(psi, 2, 1), &om_p2j.scale(&Padic::exact(P))).is_none_or(|v| v >= 2);
    let remainder_level = rem.filtration_level()?;
    let ok = tprime_p_ok && tprime_ok && tsecond_ok && remainder_level == FiltrationLevel::Level(0);
    Ok(ManinReport { d: dd, tprime_p_ok, tprime_ok, tsecond_ok, remainder_level, ok })
}

/// `a_2 = p`, `a_3 = -p lambda_1`, `a_(n+2) = -(lambda_1 a_(n+1) + p lambda_0 a_n)`
/// (the Frobenius lift acts trivially on `Z_p`).
#[derive(Clone, Debug)]
pub struct CocharacterSequence<C> {
    pub lambda0: C,
    pub lambda1: C,
    /// `terms[i] = a_(i+2)`.
    pub terms: Vec<C>,
}

impl<C: Scalar> CocharacterSequence<C> {
    pub fn a(&self, n: usize) -> &C {
        &self.terms[n - 2]
    }

    pub fn n_max(&self) -> usize {
        self.terms.len() + 1
    }
}

pub fn cochar_recurrence<C: Scalar>(p: u32, lambda0: C, lambda1: C, n_max: usize) -> CocharacterSequence<C> {
    let pc = C::from_i64(p as i64);
    let mut terms = vec![pc.clone()];
    if n_max >= 3 {
        terms.push(-(pc.clone() * lambda1.clone()));
    }
    while terms.len() + 1 < n_max {
        let k = terms.len();
        let next = -(lambda1.clone() * terms[k - 1].clone() + pc.clone() * lambda0.clone() * terms[k - 2].clone());
        terms.push(next);
    }
    CocharacterSequence { lambda0, lambda1, terms }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileBranch {
    /// `v(a_(2k-1)), v(a_(2k)) >= k`.
    Divisible,
    /// `v(a_n) = 1` for all `n >= 2`.
    Unit,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileReport {
    pub branch: ProfileBranch,
    pub valuations: Vec<Option<i64>>,
    pub ok: bool,
}

/// Check the valuation dichotomy predicted by `lambda_1 mod p`.
pub fn valuation_profile<const P: u32>(seq: &CocharacterSequence<Padic<P>>) -> Result<ProfileReport> {
    let vals: Vec<Option<i64>> = seq.terms.iter().map(|a| a.valuation()).collect();
    let v = |n: usize| vals[n - 2].unwrap_or(i64::MAX);
    let l1 = &seq.lambda1;
    let divisible = l1.is_zero() || l1.val_lower() >= 1;
    let n_max = seq.n_max();
    let (branch, ok) = if divisible {
        let ok = (2..=n_max).all(|n| v(n) >= n.div_ceil(2) as i64);
        (ProfileBranch::Divisible, ok)
    } else {
        (ProfileBranch::Unit, (2..=n_max).all(|n| v(n) == 1))
    };
    if !ok {
        return Err(Error::Shape(format!("neither valuation profile holds for lambda_1 = {l1}")));
    }
    Ok(ProfileReport { branch, valuations: vals, ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    type Q5 = Padic<5>;

    #[test]
    fn traces() {
        assert_eq!(count_points(5, 1, 1), 9);
        let e = EllipticCurve::<5>::new(1, 1).unwrap();
        assert_eq!(e.ap, -3);
        assert_eq!(e.class, Reduction::Ordinary);
        let s = EllipticCurve::<5>::new(0, 1).unwrap();
        assert_eq!(s.ap, 0);
        assert_eq!(s.class, Reduction::Supersingular);
        assert!(classify(5, 5).is_err());
        assert!(EllipticCurve::<5>::new(0, 0).is_err());
    }

    #[test]
    fn recurrence_examples() {
        let p = Q5::exact(5);
        let s = cochar_recurrence(5, Q5::one(), p.clone(), 4);
        assert_eq!(s.terms, vec![Q5::exact(5), Q5::exact(-25), Q5::exact(125 - 25)]);
        let s = cochar_recurrence(5, Q5::one(), Q5::one(), 4);
        assert_eq!(s.terms, vec![Q5::exact(5), Q5::exact(-5), Q5::exact(5 - 25)]);
        let s = cochar_recurrence(5, Q5::zero(), p, 8);
        let v: Vec<_> = s.terms.iter().map(|a| a.valuation().unwrap()).collect();
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn psi_small_degree() {
        let e = EllipticCurve::<5>::new(1, 1).unwrap();
        let ps = psi_elliptic(&e, 40, 4).unwrap();
        assert!(ps.report.ok);
        assert_eq!(ps.psi.coeff(&Monomial::var(0, 1)), Q5::one());
        let bad = e.clone().with_lambdas(Q5::one(), Q5::exact(4));
        let r = psi_elliptic(&bad, 40, 4).unwrap().report;
        assert!(!r.ok);
        assert_eq!(r.first_failure.unwrap().degree, 5);
    }

    #[test]
    fn psi_truncation_is_stable() {
        for (a, b) in [(1, 1), (0, 1)] {
            let e = EllipticCurve::<5>::new(a, b).unwrap();
            let hi = psi_elliptic(&e, 150, 6).unwrap();
            let lo = psi_elliptic(&e, 60, 6).unwrap();
            assert!(hi.report.ok);
            let d = lo.psi.base_max().unwrap();
            assert!(hi.psi.truncate_base(d).equals(&lo.psi));
        }
    }

    #[test]
    fn manin_small_degree() {
        let e = EllipticCurve::<5>::new(1, 1).unwrap();
        let r = manin_kernel_leading(&e, 40, 4).unwrap();
        assert!(r.ok, "{r:?}");
    }
}
