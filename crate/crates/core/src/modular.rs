//! Delta-modular forms seen through their delta-Fourier expansions.
//!
//! An expansion lives in `Z_p((q))[q', q'', ...]^`: Laurent in `q`, polynomial
//! in the jets, truncated at a p-adic precision and possibly at a q-degree.
//! The forms `f^1` and `f_lambda` are Laurent polynomials in `q` at finite
//! precision, so they carry no q-truncation at all.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gm::{jet_series, psi_series, psi_terms_needed};
use crate::jet::{JetCtx, JetPoly};
use crate::padic::Padic;
use crate::scalar::{PadicLike, Scalar, EXACT};
use crate::series::PowerSeries;

/// Laurent-in-`q` jet context of the given order.
pub fn q_ctx(order: usize, prec: i64) -> JetCtx {
    JetCtx::new("q", order).laurent().with_prec(prec)
}

#[derive(Clone, Debug)]
pub struct QExpansion<const P: u32> {
    pub form: String,
    pub poly: JetPoly<Padic<P>>,
}

impl<const P: u32> QExpansion<P> {
    pub fn new(form: impl Into<String>, poly: JetPoly<Padic<P>>) -> Self {
        QExpansion { form: form.into(), poly }
    }

    pub fn order(&self) -> usize {
        self.poly.ctx().order
    }

    /// Bound on the known q-degrees; `None` when exact in `q`.
    pub fn q_deg(&self) -> Option<i64> {
        self.poly.base_max()
    }

    pub fn p_prec(&self) -> i64 {
        self.poly.prec()
    }

    /// Lowest and highest q-exponent present.
    pub fn q_range(&self) -> Option<(i64, i64)> {
        let lo = self.poly.terms().map(|(m, _)| m.base()).min()?;
        let hi = self.poly.terms().map(|(m, _)| m.base()).max()?;
        Some((lo, hi))
    }

    /// Declared floor of the Laurent tail.
    pub fn floor(&self) -> i64 {
        self.q_range().map_or(0, |(lo, _)| lo.min(0))
    }

    pub fn coefficient(&self, q_exp: i64, jets: &[i64]) -> Padic<P> {
        let mut m = crate::jet::Monomial::var(0, q_exp);
        for (i, &e) in jets.iter().enumerate() {
            m.0[i + 1] = e;
        }
        self.poly.coeff(&m)
    }

    pub fn to_json(&self) -> Value {
        let order = self.order();
        let coeffs: Vec<Value> = self
            .poly
            .terms()
            .map(|(m, c)| {
                let jets: Vec<i64> = (1..=order).map(|i| m.0[i]).collect();
                json!([m.base(), jets, c.valuation(), c.unit_int().to_string()])
            })
            .collect();
        json!({
            "form": self.form,
            "q_deg": self.q_deg(),
            "p_prec": self.p_prec(),
            "coefficients": coeffs,
        })
    }
}

/// Bernoulli numbers with `B_1 = -1/2`.
pub fn bernoulli(k: u32) -> BigRational {
    let mut b: Vec<BigRational> = vec![BigRational::one()];
    for m in 1..=k as usize {
        let mut s = BigRational::zero();
        let mut c = BigInt::one();
        for (j, bj) in b.iter().enumerate() {
            s += BigRational::from_integer(c.clone()) * bj;
            c = c * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b.pop().unwrap()
}

/// `sigma_k(n)`.
pub fn divisor_sum(n: u64, k: u32) -> BigInt {
    (1..=n).filter(|d| n % d == 0).map(|d| BigInt::from(d).pow(k)).sum()
}

/// Normalized Eisenstein series `1 - (2k/B_k) sum sigma_(k-1)(n) q^n` for even
/// `k >= 4`, over any scalar type.
pub fn eisenstein_series<C: Scalar>(k: u32, q_deg: usize, prec: i64) -> Result<PowerSeries<C>> {
    if k < 4 || k % 2 == 1 {
        return Err(Error::Invalid(format!("no Eisenstein series of weight {k}")));
    }
    let f = BigRational::from_integer(BigInt::from(-2 * k as i64)) / bernoulli(k);
    let mut coeffs = vec![C::one()];
    for n in 1..=q_deg as u64 {
        let num = f.numer() * divisor_sum(n, k - 1);
        coeffs.push(C::from_ratio(&num, f.denom(), prec)?);
    }
    Ok(PowerSeries::new("q", coeffs).cap(prec))
}

/// `E_k` for `k` in `{4, 6, p-1}` as an expansion of order 0.
pub fn eisenstein<const P: u32>(k: u32, q_deg: usize, prec: i64) -> Result<QExpansion<P>> {
    if k != 4 && k != 6 && k != P - 1 {
        return Err(Error::Invalid(format!("weight {k} not supported (use 4, 6 or {})", P - 1)));
    }
    let s = eisenstein_series::<Padic<P>>(k, q_deg, prec)?;
    Ok(QExpansion::new(format!("E{k}"), s.to_jet(&q_ctx(0, prec))))
}

/// `f^1 = sum (-1)^(n-1) p^(n-1)/n (q'/q^p)^n`, truncated at `p^prec`.
pub fn f1_expansion<const P: u32>(prec: i64) -> Result<QExpansion<P>> {
    let ch = psi_series::<P>(psi_terms_needed(P, prec), prec)?;
    Ok(QExpansion::new("f1", ch.psi.with_ctx(q_ctx(1, prec))))
}

/// The p-derivation on expansions.
pub fn delta_q<const P: u32>(e: &QExpansion<P>, max_order: usize) -> Result<QExpansion<P>> {
    Ok(QExpansion::new(format!("delta({})", e.form), e.poly.delta_within(max_order)?))
}

/// `f_lambda = phi(f^1) - lambda f^1`; the `f_partial` factors expand to 1.
pub fn f_lambda_expansion<const P: u32>(lambda: &Padic<P>, prec: i64) -> Result<QExpansion<P>> {
    if lambda.val_lower() < 0 {
        return Err(Error::NotUnit(format!("lambda = {lambda} is not integral")));
    }
    let f1 = f1_expansion::<P>(prec)?.poly;
    let ph = f1.phi()?;
    let f = ph.sub(&f1.scale(lambda).with_order(2));
    Ok(QExpansion::new("f_lambda", f))
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// `V_l`: `q -> q^l`, `q^(k) -> delta^k(q^l)`.
pub fn v_ell_action<const P: u32>(e: &QExpansion<P>, ell: u64) -> Result<QExpansion<P>> {
    if ell != 1 && (!is_prime(ell) || ell == P as u64) {
        return Err(Error::Invalid(format!("l = {ell} must be a prime different from {P}")));
    }
    let order = e.order().max(e.poly.order_used());
    let l = ell as i64;
    let exact = q_ctx(order, EXACT);
    let mut images = vec![JetPoly::monomial(exact.clone(), crate::jet::Monomial::var(0, l), Padic::one())];
    for k in 1..=order {
        let next = images[k - 1].delta()?.with_order(order);
        images.push(next);
    }
    let inv = JetPoly::monomial(exact, crate::jet::Monomial::var(0, -l), Padic::one());
    let mut target = e.poly.ctx().clone();
    target.order = order;
    if let Some(d) = target.base_max {
        target.base_max = Some(l * (d + 1) - 1);
    }
    let out = e.poly.substitute(&target, &images, Some(&inv))?;
    Ok(QExpansion::new(format!("V_{ell}({})", e.form), out))
}

#[derive(Clone, Debug, Serialize)]
pub struct CovarianceReport {
    pub form: String,
    pub ell: u64,
    pub weight_degree: i64,
    pub factor: String,
    pub q_range: Option<(i64, i64)>,
    pub p_prec: i64,
    pub terms: usize,
    /// Terms of `V_l(f) - factor f` surviving at the working precision.
    pub defect_terms: usize,
    pub ok: bool,
}

/// Check `V_l(f) = l^(-deg(w)/2) f` coefficientwise.
pub fn covariance_check<const P: u32>(e: &QExpansion<P>, ell: u64, weight_degree: i64) -> Result<CovarianceReport> {
    if weight_degree % 2 != 0 {
        return Err(Error::Invalid(format!("weight degree {weight_degree} is odd")));
    }
    let half = -weight_degree / 2;
    let (num, den) = if half >= 0 {
        (BigInt::from(ell).pow(half as u32), BigInt::one())
    } else {
        (BigInt::one(), BigInt::from(ell).pow((-half) as u32))
    };
    let factor = Padic::<P>::from_ratio(&num, &den, e.p_prec())?;
    let lhs = v_ell_action(e, ell)?;
    let rhs = e.poly.scale(&factor);
    let diff = lhs.poly.sub(&rhs.with_order(lhs.order()));
    Ok(CovarianceReport {
        form: e.form.clone(),
        ell,
        weight_degree,
        factor: BigRational::new(num, den).to_string(),
        q_range: e.q_range(),
        p_prec: diff.prec(),
        terms: e.poly.len(),
        defect_terms: diff.len(),
        ok: diff.is_empty(),
    })
}

/// `t = a_6/a_4 = -E_6/(18 E_4)` as a power series.
pub fn t_series<const P: u32>(q_deg: usize, prec: i64) -> Result<PowerSeries<Padic<P>>> {
    let e4 = eisenstein_series::<Padic<P>>(4, q_deg, prec)?;
    let e6 = eisenstein_series::<Padic<P>>(6, q_deg, prec)?;
    let c = Padic::<P>::from_ratio(&BigInt::from(-1), &BigInt::from(18), prec)?;
    Ok(e6.mul(&e4.inverse()?).scale(&c))
}

/// `binom(1/2, k)`.
fn half_binomial(k: u64) -> BigRational {
    let mut r = BigRational::one();
    for i in 0..k {
        r = r * (BigRational::new(BigInt::one(), BigInt::from(2)) - BigRational::from_integer(BigInt::from(i)))
            / BigRational::from_integer(BigInt::from(i + 1));
    }
    r
}

/// `r^(1/2)` for `r = 1 mod p`.
fn sqrt_one_mod_p<const P: u32>(r: &JetPoly<Padic<P>>, prec: i64) -> Result<JetPoly<Padic<P>>> {
    let w = r
        .sub(&JetPoly::one(r.ctx().clone()))
        .div_p(1)
        .map_err(|_| Error::NotUnit("square-root argument is not 1 mod p".into()))?;
    let s = jet_series(&w, prec, |k| half_binomial(k) * BigRational::from_integer(BigInt::from(P).pow(k as u32)))?;
    Ok(s.add(&JetPoly::one(r.ctx().clone().with_prec(prec))))
}

#[derive(Clone, Debug)]
pub struct PeriodMap<const P: u32> {
    pub t: QExpansion<P>,
    /// `t^((phi^2 + phi)/2)`.
    pub t_weight: QExpansion<P>,
    /// `t^phi / t^p`, which must be 1 mod p.
    pub ratio: QExpansion<P>,
    pub f1: QExpansion<P>,
    /// `t^((phi^2+phi)/2) f^1`.
    pub x1: QExpansion<P>,
    /// `t^((phi^2+phi)/2) phi(f^1)`.
    pub x2: QExpansion<P>,
}

/// The two components of the delta-period map at the expansion level.
pub fn period_map_expansion<const P: u32>(q_deg: usize, prec: i64) -> Result<PeriodMap<P>> {
    let p = P as u64;
    let t = t_series::<P>(q_deg, prec)?;
    let ctx = q_ctx(0, prec);
    let tj = t.to_jet(&ctx);
    let tinv = t.inverse()?.to_jet(&ctx);
    let phi1 = tj.phi()?;
    let phi2 = phi1.phi()?;
    let r1 = phi1.mul(&tinv.pow(p)).with_order(2);
    let r2 = phi2.mul(&tinv.pow(p * p));
    let s1 = sqrt_one_mod_p(&r1, prec)?;
    let s2 = sqrt_one_mod_p(&r2, prec)?;
    let tw = tj.pow((p * p + p) / 2).with_order(2).mul(&s1).mul(&s2);
    let f1 = f1_expansion::<P>(prec)?;
    let x1 = tw.mul(&f1.poly.with_order(2));
    let x2 = tw.mul(&f1.poly.phi()?);
    Ok(PeriodMap {
        t: QExpansion::new("t", tj),
        t_weight: QExpansion::new("t^((phi^2+phi)/2)", tw),
        ratio: QExpansion::new("t^phi/t^p", r1),
        f1,
        x1: QExpansion::new("x1", x1),
        x2: QExpansion::new("x2", x2),
    })
}

impl<const P: u32> PeriodMap<P> {
    /// `x2 - lambda x1 = t^((phi^2+phi)/2) f_lambda`.
    pub fn flat_check(&self, lambda: &Padic<P>) -> Result<bool> {
        let lhs = self.x2.poly.sub(&self.x1.poly.scale(lambda));
        let fl = f_lambda_expansion::<P>(lambda, self.f1.p_prec())?;
        let rhs = self.t_weight.poly.mul(&fl.poly);
        Ok(lhs.equals(&rhs))
    }

    /// `t^phi / t^p = 1 mod p`.
    pub fn ratio_ok(&self) -> bool {
        self.ratio.poly.sub(&JetPoly::one(self.ratio.poly.ctx().clone())).is_zero_mod_p()
    }
}

/// `T = -4/27 + 256/j`.
pub fn t_of_j(j: &BigRational) -> Option<BigRational> {
    (!j.is_zero()).then(|| rat(-4, 27) + rat(256, 1) / j)
}

/// `j = 6912/(4 + 27 T)`.
pub fn j_of_t(t: &BigRational) -> Option<BigRational> {
    let d = rat(4, 1) + rat(27, 1) * t;
    (!d.is_zero()).then(|| rat(6912, 1) / d)
}

/// `i = 1728 - j`.
pub fn i_of_j(j: &BigRational) -> BigRational {
    rat(1728, 1) - j
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Debug, Serialize)]
pub struct CoordinateReport {
    pub p: u32,
    pub t_at_1728: String,
    pub t_vanishes_at_1728: bool,
    pub inverse_ok: bool,
    pub i_plus_j_ok: bool,
    /// Each generator of one localization is a polynomial in the generators
    /// of the other, with p-integral constants.
    pub generators_ok: bool,
    pub constants_p_units: bool,
    pub samples: usize,
    pub ok: bool,
}

/// Exact checks of the `j`/`T`/`i` coordinate changes. The identities are
/// between rational functions of degree at most 2, so agreement on more
/// than a handful of sample points is a proof.
pub fn coordinate_identities(p: u32) -> CoordinateReport {
    let t1728 = t_of_j(&rat(1728, 1)).unwrap();
    let samples: Vec<BigRational> = (1..=40i64)
        .map(|n| rat(n * n * 37 - 11 * n + 5, n + 2))
        .filter(|j| !j.is_zero() && *j != rat(1728, 1))
        .collect();
    let mut inverse_ok = true;
    let mut i_plus_j_ok = true;
    let mut gens = true;
    for j in &samples {
        let t = t_of_j(j).unwrap();
        let i = i_of_j(j);
        inverse_ok &= j_of_t(&t).as_ref() == Some(j);
        i_plus_j_ok &= &i + j == rat(1728, 1);
        let u = rat(4, 1) + rat(27, 1) * &t;
        // generators of R[j, 1/j, 1/i] in terms of T
        gens &= *j == rat(6912, 1) / &u;
        gens &= j.recip() == &u / rat(6912, 1);
        gens &= i.recip() == &u / (rat(46656, 1) * &t);
        // generators of R[T, 1/T, 1/(4+27T)] in terms of j
        gens &= t == rat(-4, 27) + rat(256, 1) * j.recip();
        gens &= t.recip() == rat(27, 4) * j / &i;
        gens &= u.recip() == j / rat(6912, 1);
    }
    let constants_p_units = [4i64, 27, 256, 6912, 46656].iter().all(|c| c % p as i64 != 0);
    let t_vanishes = t1728.is_zero();
    CoordinateReport {
        p,
        t_at_1728: t1728.to_string(),
        t_vanishes_at_1728: t_vanishes,
        inverse_ok,
        i_plus_j_ok,
        generators_ok: gens,
        constants_p_units,
        samples: samples.len(),
        ok: t_vanishes && inverse_ok && i_plus_j_ok && gens && constants_p_units,
    }
}

/// An isobaric polynomial `sum c a_4^i a_6^j` of weight `4i + 6j`.
#[derive(Clone, Debug, Serialize)]
pub struct WeightPolynomial {
    pub weight: u32,
    /// `(i, j, c)` as strings for the exact rational `c`.
    pub terms: Vec<(u32, u32, String)>,
    #[serde(skip)]
    pub coeffs: Vec<(u32, u32, BigRational)>,
}

/// `E_k` written in `a_4 = -E_4/48` and `a_6 = E_6/864` by matching
/// q-expansions in the weight-`k` space.
pub fn eisenstein_polynomial(k: u32) -> Result<WeightPolynomial> {
    let monos: Vec<(u32, u32)> = (0..=k / 4).flat_map(|i| (0..=k / 6).map(move |j| (i, j))).filter(|&(i, j)| 4 * i + 6 * j == k).collect();
    if monos.is_empty() {
        return Err(Error::Invalid(format!("weight {k} space is zero")));
    }
    let n = monos.len();
    let rows = n + 6;
    let e4 = eisenstein_series::<BigRational>(4, rows, EXACT)?;
    let e6 = eisenstein_series::<BigRational>(6, rows, EXACT)?;
    let a4 = e4.scale(&rat(-1, 48));
    let a6 = e6.scale(&rat(1, 864));
    let target = eisenstein_series::<BigRational>(k, rows, EXACT)?;
    let cols: Vec<PowerSeries<BigRational>> = monos.iter().map(|&(i, j)| a4.pow(i as u64).mul(&a6.pow(j as u64))).collect();
    // augmented matrix, one row per q-coefficient
    let mut m: Vec<Vec<BigRational>> =
        (0..=rows).map(|r| cols.iter().map(|c| c.coeff(r)).chain([target.coeff(r)]).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(pr) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(row, pr);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let src = m[row].clone();
                for (x, y) in m[r].iter_mut().zip(src) {
                    *x = &*x - &f * y;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if pivots.len() != n || m[row..].iter().any(|r| !r[n].is_zero()) {
        return Err(Error::Shape(format!("E_{k} is not in the span of a_4, a_6 monomials")));
    }
    let coeffs: Vec<(u32, u32, BigRational)> =
        monos.iter().enumerate().map(|(c, &(i, j))| (i, j, m[c][n].clone())).filter(|t| !t.2.is_zero()).collect();
    Ok(WeightPolynomial {
        weight: k,
        terms: coeffs.iter().map(|(i, j, c)| (*i, *j, c.to_string())).collect(),
        coeffs,
    })
}

/// Reduction of `E_{p-1}` mod p is 1 (von Staudt-Clausen); checked on the
/// expansion.
pub fn hasse_is_one_mod_p<const P: u32>(q_deg: usize) -> Result<bool> {
    let e = eisenstein::<P>(P - 1, q_deg, 2)?;
    Ok(e.poly.sub(&JetPoly::one(e.poly.ctx().clone())).is_zero_mod_p())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Monomial;
    type Q5 = Padic<5>;

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(6), rat(1, 42));
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }

    #[test]
    fn eisenstein_low_terms() {
        let e4 = eisenstein_series::<BigRational>(4, 3, EXACT).unwrap();
        assert_eq!(e4.coeff(1), rat(240, 1));
        assert_eq!(e4.coeff(2), rat(2160, 1));
        let e6 = eisenstein_series::<BigRational>(6, 3, EXACT).unwrap();
        assert_eq!(e6.coeff(1), rat(-504, 1));
        assert_eq!(e6.coeff(2), rat(-16632, 1));
    }

    #[test]
    fn f1_leading_term() {
        let f = f1_expansion::<5>(6).unwrap();
        assert_eq!(f.coefficient(-5, &[1]), Q5::exact(1));
        // n = p term: p^(p-1)/p
        assert_eq!(f.coefficient(-25, &[5]).valuation(), Some(3));
    }

    #[test]
    fn covariance_of_f1() {
        let f = f1_expansion::<5>(6).unwrap();
        for ell in [2, 3] {
            let r = covariance_check(&f, ell, -2).unwrap();
            assert!(r.ok, "{r:?}");
        }
        let bad = covariance_check(&f, 2, 0).unwrap();
        assert!(!bad.ok);
    }

    #[test]
    fn f_lambda_q_second_coefficient() {
        let f = f_lambda_expansion::<5>(&Q5::exact(2), 5).unwrap();
        let c = f.poly.coeff(&{
            let mut m = Monomial::var(0, -25);
            m.0[2] = 1;
            m
        });
        assert_eq!(c, Q5::exact(5));
    }

    #[test]
    fn period_map_small() {
        let pm = period_map_expansion::<5>(15, 5).unwrap();
        assert!(pm.ratio_ok());
        assert!(pm.flat_check(&Q5::exact(2)).unwrap());
        // t = -1/18 + ...
        let c = pm.t.poly.coeff(&Monomial::ONE);
        assert_eq!(c * Q5::exact(-18), Q5::with_prec(1, 5));
    }

    #[test]
    fn coordinates() {
        let r = coordinate_identities(5);
        assert!(r.ok, "{r:?}");
    }

    #[test]
    fn hasse_polynomials() {
        let p5 = eisenstein_polynomial(4).unwrap();
        assert_eq!(p5.coeffs, vec![(1, 0, rat(-48, 1))]);
        let p7 = eisenstein_polynomial(6).unwrap();
        assert_eq!(p7.coeffs, vec![(0, 1, rat(864, 1))]);
        assert!(hasse_is_one_mod_p::<5>(20).unwrap());
        assert!(hasse_is_one_mod_p::<7>(20).unwrap());
    }
}
