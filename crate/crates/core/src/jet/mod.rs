//! Jet polynomial algebras `B_n = A[T', ..., T^(n)]`.
//!
//! A [`JetPoly`] is a sparse polynomial in a base variable `T = T^(0)` and
//! jet variables `T^(1), ..., T^(n)`. The base exponent may be negative when
//! the Laurent flag is set (the `G_m` chart), and the base direction may be
//! truncated: with `base_max = Some(D)` only terms with base exponent `<= D`
//! are meaningful, which turns the base ring into `A[[T]] mod T^(D+1)`.
//!
//! Precision is tracked twice: every coefficient carries its own absolute
//! precision, and the polynomial carries a cap `prec` that is lowered
//! whenever an operation loses digits (including on coefficients that
//! cancel to zero), so the cap always bounds the error of the whole element.

mod filtration;
mod frobenius;
mod text;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use rustc_hash::FxHashMap;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::padic::{Fp, Padic};
use crate::scalar::{PadicLike, Scalar, EXACT};

pub use filtration::FiltrationLevel;
pub use frobenius::{gm_ctx, AxiomReport};
pub use text::CoeffText;

/// Number of variable slots: the base plus nine jet variables.
pub const MAX_VARS: usize = 10;

/// Exponent vector indexed by jet order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub [i64; MAX_VARS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; MAX_VARS]);

    pub fn var(i: usize, e: i64) -> Self {
        let mut m = Monomial::ONE;
        m.0[i] = e;
        m
    }

    pub fn base(&self) -> i64 {
        self.0[0]
    }

    /// Largest jet index with a nonzero exponent (0 for pure base terms).
    pub fn top_index(&self) -> usize {
        (1..MAX_VARS).rev().find(|&i| self.0[i] != 0).unwrap_or(0)
    }

    /// The monomial with its base exponent removed.
    pub fn jet_part(&self) -> Monomial {
        let mut m = *self;
        m.0[0] = 0;
        m
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut m = *self;
        for i in 0..MAX_VARS {
            m.0[i] += o.0[i];
        }
        m
    }

    pub fn scale(&self, k: i64) -> Monomial {
        let mut m = *self;
        for e in m.0.iter_mut() {
            *e *= k;
        }
        m
    }

    /// If the jet part is a single `T^(k)` to the first power, return `k`.
    pub fn linear_jet(&self) -> Option<usize> {
        let nz: Vec<usize> = (1..MAX_VARS).filter(|&i| self.0[i] != 0).collect();
        match nz.as_slice() {
            [k] if self.0[*k] == 1 => Some(*k),
            _ => None,
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        for i in (0..MAX_VARS).rev() {
            match self.0[i].cmp(&o.0[i]) {
                std::cmp::Ordering::Equal => continue,
                c => return c,
            }
        }
        std::cmp::Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.0[..=self.top_index()])
    }
}

/// Ambient data of a jet polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetCtx {
    pub var: Arc<str>,
    /// Ambient jet order `n`.
    pub order: usize,
    pub laurent: bool,
    /// Terms with base exponent above this bound are unknown.
    pub base_max: Option<i64>,
    /// Absolute p-adic precision cap ([`EXACT`] when there is none).
    pub prec: i64,
}

impl JetCtx {
    pub fn new(var: &str, order: usize) -> Self {
        JetCtx { var: Arc::from(var), order, laurent: false, base_max: None, prec: EXACT }
    }

    pub fn laurent(mut self) -> Self {
        self.laurent = true;
        self
    }

    pub fn with_prec(mut self, prec: i64) -> Self {
        self.prec = prec;
        self
    }

    pub fn with_base_max(mut self, d: i64) -> Self {
        self.base_max = Some(d);
        self
    }

    pub fn with_order(mut self, n: usize) -> Self {
        self.order = n;
        self
    }

    fn merge(&self, o: &JetCtx) -> JetCtx {
        assert_eq!(self.var, o.var, "mixing jet algebras in different variables");
        JetCtx {
            var: self.var.clone(),
            order: self.order.max(o.order),
            laurent: self.laurent || o.laurent,
            base_max: min_opt(self.base_max, o.base_max),
            prec: self.prec.min(o.prec),
        }
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// A sparse jet polynomial with coefficients in `C`.
#[derive(Clone)]
pub struct JetPoly<C> {
    ctx: JetCtx,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Scalar> JetPoly<C> {
    pub fn zero(ctx: JetCtx) -> Self {
        JetPoly { ctx, terms: BTreeMap::new() }
    }

    pub fn constant(ctx: JetCtx, c: C) -> Self {
        Self::monomial(ctx, Monomial::ONE, c)
    }

    pub fn one(ctx: JetCtx) -> Self {
        Self::constant(ctx, C::one())
    }

    /// The jet variable `T^(i)`.
    pub fn var(ctx: JetCtx, i: usize) -> Self {
        Self::monomial(ctx, Monomial::var(i, 1), C::one())
    }

    pub fn monomial(ctx: JetCtx, m: Monomial, c: C) -> Self {
        Self::from_terms(ctx, [(m, c)])
    }

    /// Build from terms, applying truncation and dropping zeros. The
    /// precision cap is lowered to the smallest coefficient precision seen.
    pub fn from_terms(mut ctx: JetCtx, it: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut raw = Vec::new();
        for (m, c) in it {
            if let Some(d) = ctx.base_max {
                if m.base() > d {
                    continue;
                }
            }
            if let Some(pc) = c.precision() {
                ctx.prec = ctx.prec.min(pc);
            }
            raw.push((m, c));
        }
        let prec = ctx.prec;
        let terms = raw
            .into_iter()
            .filter_map(|(m, c)| {
                let c = c.cap(prec);
                (!c.is_zero()).then_some((m, c))
            })
            .collect();
        JetPoly { ctx, terms }
    }

    pub fn ctx(&self) -> &JetCtx {
        &self.ctx
    }

    pub fn prec(&self) -> i64 {
        self.ctx.prec
    }

    pub fn base_max(&self) -> Option<i64> {
        self.ctx.base_max
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    /// Largest jet index occurring.
    pub fn order_used(&self) -> usize {
        self.terms.keys().map(|m| m.top_index()).max().unwrap_or(0)
    }

    /// Smallest base exponent present, or the first unknown exponent.
    fn min_base(&self) -> Option<i64> {
        match self.terms.keys().map(|m| m.base()).min() {
            Some(b) => Some(b),
            None => self.ctx.base_max.map(|d| d + 1),
        }
    }

    pub fn with_ctx(&self, ctx: JetCtx) -> Self {
        Self::from_terms(ctx, self.terms.iter().map(|(m, c)| (*m, c.clone())))
    }

    pub fn truncate_base(&self, d: i64) -> Self {
        let ctx = JetCtx { base_max: min_opt(self.ctx.base_max, Some(d)), ..self.ctx.clone() };
        self.with_ctx(ctx)
    }

    pub fn with_prec(&self, prec: i64) -> Self {
        let ctx = JetCtx { prec: self.ctx.prec.min(prec), ..self.ctx.clone() };
        self.with_ctx(ctx)
    }

    pub fn with_order(&self, n: usize) -> Self {
        let mut out = self.clone();
        out.ctx.order = n;
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&C) -> C) -> Self {
        Self::from_terms(self.ctx.clone(), self.terms.iter().map(|(m, c)| (*m, f(c))))
    }

    pub fn try_map_coeffs(&self, f: impl Fn(&C) -> Result<C>) -> Result<Self> {
        let terms: Result<Vec<_>> = self.terms.iter().map(|(m, c)| Ok((*m, f(c)?))).collect();
        Ok(Self::from_terms(self.ctx.clone(), terms?))
    }

    pub fn scale(&self, k: &C) -> Self {
        self.map_coeffs(|c| c.clone() * k.clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        let ctx = self.ctx.merge(&o.ctx);
        let mut acc: BTreeMap<Monomial, C> = self.terms.clone();
        for (m, c) in &o.terms {
            accumulate(&mut acc, *m, c.clone());
        }
        Self::from_terms(ctx, acc)
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c.clone())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut ctx = self.ctx.merge(&o.ctx);
        // known range of the product in the base direction
        let bound = |a: &Self, b: &Self| match (a.ctx.base_max, b.min_base()) {
            (Some(d), Some(mb)) => Some(d + mb),
            (Some(d), None) => Some(d),
            _ => None,
        };
        ctx.base_max = min_opt(bound(self, o), bound(o, self));
        if let (Some(a), Some(b)) = (self.ctx.base_max, o.ctx.base_max) {
            ctx.base_max = min_opt(ctx.base_max, Some(a + b));
        }
        if self.is_empty() || o.is_empty() {
            return Self::zero(ctx);
        }
        if let Some(f) = self.mul_words(o, &ctx) {
            return f;
        }
        let mut acc: FxHashMap<Monomial, C> = FxHashMap::default();
        let limit = ctx.base_max;
        let prec = ctx.prec;
        let right: Vec<(&Monomial, &C, i64)> = o.terms.iter().map(|(m, c)| (m, c, c.val_hint())).collect();
        for (ma, ca) in &self.terms {
            let va = ca.val_hint();
            for &(mb, cb, vb) in &right {
                if va + vb >= prec {
                    continue;
                }
                if let Some(d) = limit {
                    if ma.base() + mb.base() > d {
                        continue;
                    }
                }
                let m = ma.mul(mb);
                let prod = ca.clone() * cb.clone();
                match acc.get_mut(&m) {
                    Some(e) => {
                        let old = std::mem::replace(e, C::zero());
                        *e = old + prod;
                    }
                    None => {
                        acc.insert(m, prod);
                    }
                }
            }
        }
        Self::from_terms(ctx, acc)
    }

    // Integral operands at a small finite precision: multiply residues
    // modulo p^prec in machine words, with monomials packed into mixed-radix
    // integer keys so that a product of monomials is a sum of keys.
    fn mul_words(&self, o: &Self, ctx: &JetCtx) -> Option<Self> {
        let prec = ctx.prec;
        let m = C::word_modulus(prec)?;
        let words = |f: &Self| -> Option<Vec<(Monomial, u64)>> {
            f.terms.iter().map(|(k, c)| Some((*k, c.word_residue(prec)?))).collect()
        };
        let (a, b) = (words(self)?, words(o)?);
        let range = |v: &[(Monomial, u64)], i: usize| {
            let it = v.iter().map(|(k, _)| k.0[i]);
            (it.clone().min().unwrap_or(0), it.max().unwrap_or(0))
        };
        let mut lo_a = [0i64; MAX_VARS];
        let mut lo_b = [0i64; MAX_VARS];
        let mut stride = [0u64; MAX_VARS];
        let mut size = 1u64;
        for i in 0..MAX_VARS {
            let (la, ha) = range(&a, i);
            let (lb, hb) = range(&b, i);
            lo_a[i] = la;
            lo_b[i] = lb;
            stride[i] = size;
            size = size.checked_mul((ha + hb - la - lb + 1) as u64)?;
        }
        let pack = |v: &[(Monomial, u64)], lo: &[i64; MAX_VARS]| -> Vec<(u64, i64, u64)> {
            v.iter()
                .map(|(k, c)| {
                    let key = (0..MAX_VARS).map(|i| (k.0[i] - lo[i]) as u64 * stride[i]).sum();
                    (key, k.0[0], *c)
                })
                .collect()
        };
        let (pa, pb) = (pack(&a, &lo_a), pack(&b, &lo_b));
        let limit = ctx.base_max;
        let mut acc: FxHashMap<u64, u64> = FxHashMap::default();
        for &(ka, ba, ca) in &pa {
            for &(kb, bb, cb) in &pb {
                if limit.is_some_and(|d| ba + bb > d) {
                    continue;
                }
                let e = acc.entry(ka + kb).or_insert(0);
                *e = (*e + ca * cb) % m;
            }
        }
        let mut lo = [0i64; MAX_VARS];
        for i in 0..MAX_VARS {
            lo[i] = lo_a[i] + lo_b[i];
        }
        let unpack = |mut key: u64| {
            let mut mono = Monomial::ONE;
            for i in (0..MAX_VARS).rev() {
                mono.0[i] = lo[i] + (key / stride[i]) as i64;
                key %= stride[i];
            }
            mono
        };
        let terms = acc.into_iter().filter(|&(_, r)| r != 0).map(|(k, r)| (unpack(k), C::from_word_residue(r, prec)));
        Some(Self::from_terms(ctx.clone(), terms))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        // For small exponents, repeated multiplication by the (sparse)
        // base is much cheaper than squaring a large intermediate power.
        if e <= 16 {
            let mut acc = Self::one(self.ctx.clone());
            for _ in 0..e {
                acc = acc.mul(self);
            }
            return acc;
        }
        let mut acc = Self::one(self.ctx.clone());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Multiply by a monomial with unit coefficient.
    pub fn shift_monomial(&self, m: &Monomial) -> Self {
        let mut ctx = self.ctx.clone();
        ctx.base_max = ctx.base_max.map(|d| d + m.base());
        Self::from_terms(ctx, self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())))
    }

    /// Evaluate at scalar values of the variables. Negative base exponents
    /// use `base_inv`.
    pub fn eval(&self, vals: &[C], base_inv: Option<&C>) -> Result<C> {
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let (b, e) = if e > 0 {
                    (vals.get(i).ok_or_else(|| Error::Invalid(format!("no value for index {i}")))?, e)
                } else {
                    (base_inv.ok_or_else(|| Error::Invalid("need inverse of base".into()))?, -e)
                };
                t = t * scalar_pow(b, e as u64);
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Apply the ring map sending `T^(i)` to `images[i]` (and `T^-1` to
    /// `base_inv`) into the target algebra.
    pub fn substitute(
        &self,
        target: &JetCtx,
        images: &[JetPoly<C>],
        base_inv: Option<&JetPoly<C>>,
    ) -> Result<JetPoly<C>> {
        let mut cache: FxHashMap<(usize, i64), JetPoly<C>> = FxHashMap::default();
        let mut out = JetPoly::zero(target.clone());
        for (m, c) in &self.terms {
            let mut t = JetPoly::constant(target.clone(), c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !cache.contains_key(&(i, e)) {
                    let img = if e > 0 {
                        images.get(i).ok_or_else(|| Error::Invalid(format!("no image for index {i}")))?
                    } else {
                        base_inv.ok_or_else(|| Error::Invalid("need image of T^-1".into()))?
                    };
                    cache.insert((i, e), img.pow(e.unsigned_abs()));
                }
                t = t.mul(&cache[&(i, e)]);
            }
            out = out.add(&t);
        }
        Ok(out)
    }

    /// Group terms by jet part; each value is a base-only polynomial.
    pub fn split_by_jets(&self) -> BTreeMap<Monomial, JetPoly<C>> {
        let mut groups: BTreeMap<Monomial, Vec<(Monomial, C)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            groups.entry(m.jet_part()).or_default().push((Monomial::var(0, m.base()), c.clone()));
        }
        let base_ctx = self.ctx.clone();
        groups.into_iter().map(|(k, v)| (k, JetPoly::from_terms(base_ctx.clone(), v))).collect()
    }

    /// Base-only coefficient of a jet monomial.
    pub fn coeff_of_jets(&self, jets: &Monomial) -> JetPoly<C> {
        let jets = jets.jet_part();
        JetPoly::from_terms(
            self.ctx.clone(),
            self.terms
                .iter()
                .filter(|(m, _)| m.jet_part() == jets)
                .map(|(m, c)| (Monomial::var(0, m.base()), c.clone())),
        )
    }

    /// Equality of the represented elements: the difference vanishes at
    /// the common precision and base bound.
    pub fn equals(&self, o: &Self) -> bool {
        self.sub(o).is_empty()
    }

    /// Dense coefficient vector of a base-only polynomial over `0..=d`.
    pub fn base_coeffs(&self, d: i64) -> Vec<C> {
        let mut v = vec![C::zero(); (d + 1).max(0) as usize];
        for (m, c) in &self.terms {
            let b = m.base();
            if m.top_index() == 0 && (0..=d).contains(&b) && m.jet_part() == Monomial::ONE {
                v[b as usize] = c.clone();
            }
        }
        v
    }
}

fn accumulate<C: Scalar>(acc: &mut BTreeMap<Monomial, C>, m: Monomial, c: C) {
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

pub(crate) fn scalar_pow<C: Scalar>(b: &C, mut e: u64) -> C {
    let mut acc = C::one();
    let mut base = b.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base.clone();
        }
        e >>= 1;
        if e > 0 {
            base = base.clone() * base;
        }
    }
    acc
}

impl<C: Scalar> PartialEq for JetPoly<C> {
    fn eq(&self, o: &Self) -> bool {
        self.equals(o)
    }
}

impl<C: PadicLike> JetPoly<C> {
    /// Smallest coefficient valuation (`None` for the zero polynomial).
    pub fn min_val(&self) -> Option<i64> {
        self.terms.values().map(|c| c.val_lower()).min()
    }

    /// Multiply every coefficient by `p^k`.
    pub fn shift_p(&self, k: i64) -> Result<Self> {
        let mut ctx = self.ctx.clone();
        if ctx.prec < EXACT {
            ctx.prec += k;
        }
        let terms: Result<Vec<_>> = self.terms.iter().map(|(m, c)| Ok((*m, c.shift(k)?))).collect();
        Ok(Self::from_terms(ctx, terms?))
    }

    /// Divide by `p^k`, requiring every coefficient to be divisible.
    pub fn div_p(&self, k: i64) -> Result<Self> {
        let mut ctx = self.ctx.clone();
        if ctx.prec < EXACT {
            if ctx.prec < k {
                return Err(Error::PrecisionExhausted(format!("dividing O(p^{}) by p^{k}", ctx.prec)));
            }
            ctx.prec -= k;
        }
        let terms: Result<Vec<_>> =
            self.terms.iter().map(|(m, c)| Ok((*m, c.div_exact(k)?))).collect();
        Ok(Self::from_terms(ctx, terms?))
    }

    /// True when all coefficients are divisible by p (the element reduces to 0).
    pub fn is_zero_mod_p(&self) -> bool {
        self.terms.values().all(|c| c.val_lower() >= 1)
    }
}

impl<const P: u32> JetPoly<Padic<P>> {
    /// Reduction modulo p.
    pub fn reduce(&self) -> Result<JetPoly<Fp<P>>> {
        if self.ctx.prec < 1 {
            return Err(Error::PrecisionExhausted("reduction mod p needs precision >= 1".into()));
        }
        let terms: Result<Vec<_>> = self.terms.iter().map(|(m, c)| Ok((*m, c.reduce()?))).collect();
        let ctx = JetCtx { prec: EXACT, ..self.ctx.clone() };
        Ok(JetPoly::from_terms(ctx, terms?))
    }
}

impl<const P: u32> JetPoly<Fp<P>> {
    /// Teichmüller-free lift with coefficients in `0..p`, known mod `p^prec`.
    pub fn lift(&self, prec: i64) -> JetPoly<Padic<P>> {
        let ctx = JetCtx { prec, ..self.ctx.clone() };
        JetPoly::from_terms(
            ctx,
            self.terms.iter().map(|(m, c)| (*m, Padic::with_prec(c.value(), prec))),
        )
    }

    /// The j-fold absolute Frobenius `f -> f^(p^j)`, computed by scaling
    /// exponents (coefficients in `F_p` are fixed).
    pub fn frobenius(&self, j: u32) -> Self {
        let k = (P as i64).pow(j);
        let mut ctx = self.ctx.clone();
        ctx.base_max = ctx.base_max.map(|d| (d + 1) * k - 1);
        JetPoly::from_terms(ctx, self.terms.iter().map(|(m, c)| (m.scale(k), *c)))
    }

    /// `f^e` via base-p digits of `e` and Frobenius twists.
    pub fn pow_frobenius(&self, mut e: u64) -> Self {
        let mut acc = JetPoly::one(self.ctx.clone());
        let mut j = 0;
        while e > 0 {
            let d = e % P as u64;
            if d > 0 {
                acc = acc.mul(&self.frobenius(j).pow(d));
            }
            e /= P as u64;
            j += 1;
        }
        acc
    }

    /// If every exponent is divisible by `p`, the unique p-th root.
    pub fn pth_root(&self) -> Option<Self> {
        let p = P as i64;
        if self.terms.keys().any(|m| m.0.iter().any(|e| e % p != 0)) {
            return None;
        }
        let mut ctx = self.ctx.clone();
        ctx.base_max = ctx.base_max.map(|d| d.div_euclid(p));
        Some(JetPoly::from_terms(
            ctx,
            self.terms.iter().map(|(m, c)| {
                let mut r = *m;
                for e in r.0.iter_mut() {
                    *e /= p;
                }
                (r, *c)
            }),
        ))
    }
}

impl<C: Scalar + serde::Serialize> JetPoly<C> {
    /// JSON term list, in canonical (descending) order.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| json!({"exps": &m.0[..=m.top_index()], "coeff": c}))
            .collect();
        json!({
            "var": &*self.ctx.var,
            "order": self.ctx.order,
            "laurent": self.ctx.laurent,
            "base_max": self.ctx.base_max,
            "prec": (self.ctx.prec < EXACT).then_some(self.ctx.prec),
            "terms": terms,
        })
    }
}

/// Generalized binomial coefficient `C(e, k)` for any integer `e`.
pub(crate) fn binomial(e: i64, k: u64) -> BigInt {
    let mut b = BigInt::from(1);
    for i in 0..k as i64 {
        b = b * BigInt::from(e - i) / BigInt::from(i + 1);
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    type Q5 = Padic<5>;

    fn ctx() -> JetCtx {
        JetCtx::new("T", 2).with_prec(8)
    }

    #[test]
    fn ring_ops() {
        let t = JetPoly::<Q5>::var(ctx(), 0);
        let t1 = JetPoly::<Q5>::var(ctx(), 1);
        let s = t.add(&t1);
        let sq = s.mul(&s);
        assert_eq!(sq.len(), 3);
        assert_eq!(sq.coeff(&Monomial([1, 1, 0, 0, 0, 0, 0, 0, 0, 0])), Q5::exact(2));
        assert!(s.sub(&s).is_empty());
    }

    #[test]
    fn base_truncation_of_products() {
        let c = JetCtx::new("T", 0).with_base_max(5);
        let t = JetPoly::<Q5>::var(c.clone(), 0);
        let one_plus_t = JetPoly::one(c).add(&t);
        let p = one_plus_t.pow(10);
        assert_eq!(p.base_max(), Some(5));
        assert_eq!(p.coeff(&Monomial::var(0, 5)), Q5::exact(252));
        assert_eq!(p.len(), 6);
    }

    #[test]
    fn monomial_order_descends_by_top_index() {
        let a = Monomial::var(2, 1);
        let b = Monomial::var(0, 100);
        assert!(a > b);
        assert_eq!(a.top_index(), 2);
        assert_eq!(Monomial::var(1, 1).linear_jet(), Some(1));
        assert_eq!(Monomial::var(1, 2).linear_jet(), None);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(-1, 3), BigInt::from(-1));
        assert_eq!(binomial(-2, 2), BigInt::from(3));
    }

    #[test]
    fn frobenius_power_matches_plain_power() {
        let c = JetCtx::new("x", 3);
        let x = JetPoly::<Fp<5>>::var(c.clone(), 0);
        let x1 = JetPoly::<Fp<5>>::var(c, 1);
        let f = x.add(&x1.scale(&Fp::new(2)));
        assert_eq!(f.pow_frobenius(37), f.pow(37));
        assert_eq!(f.frobenius(1).pth_root().unwrap(), f);
    }
}
