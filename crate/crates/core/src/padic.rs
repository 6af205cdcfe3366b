//! Truncated p-adic numbers.
//!
//! A [`Padic`] is `p^val * unit` known modulo `p^prec` (absolute precision),
//! or an exact rational p-adic integer times a power of p. Arithmetic tracks
//! precision with the usual rules: sums keep the smaller precision, products
//! get `min(prec_x + val_y, prec_y + val_x)`, and dividing by `p^k` lowers
//! both valuation and precision by `k`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{clamp, PadicLike, Scalar, EXACT};

// Residues below this bound use u64/u128 arithmetic.
const SMALL_LIMIT: u64 = 1 << 62;

#[derive(Clone, Debug)]
enum Unit {
    // exact integer coprime to p (or 0 for exact zero)
    Exact(BigInt),
    // residue modulo p^(prec - val), below SMALL_LIMIT
    Small(u64),
    Big(BigUint),
}

/// An element of `Q_p` known modulo `p^prec`.
#[derive(Clone)]
pub struct Padic<const P: u32> {
    val: i64,
    prec: i64,
    unit: Unit,
}

#[inline]
fn small_pow(p: u32, k: i64) -> Option<u64> {
    if k < 0 {
        return None;
    }
    let k = u32::try_from(k).ok()?;
    let v = (p as u64).checked_pow(k)?;
    (v < SMALL_LIMIT).then_some(v)
}

fn big_pow(p: u32, k: i64) -> BigUint {
    num_traits::pow(BigUint::from(p), k as usize)
}

fn big_pow_i(p: u32, k: i64) -> BigInt {
    num_traits::pow(BigInt::from(p), k as usize)
}

// Inverse of u modulo m (u coprime to m) with small integers.
fn inv_mod_u64(u: u64, m: u64) -> u64 {
    let (mut a, mut b) = (u as i128, m as i128);
    let (mut x0, mut x1) = (1i128, 0i128);
    while b != 0 {
        let q = a / b;
        (a, b) = (b, a - q * b);
        (x0, x1) = (x1, x0 - q * x1);
    }
    x0.rem_euclid(m as i128) as u64
}

fn inv_mod_big(u: &BigInt, m: &BigInt) -> BigInt {
    let e = u.extended_gcd(m);
    e.x.mod_floor(m)
}

fn strip_p(mut n: BigInt, p: u32) -> (i64, BigInt) {
    let pb = BigInt::from(p);
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return (v, n);
        }
        n = q;
        v += 1;
    }
}

impl<const P: u32> Padic<P> {
    /// The zero element known modulo `p^prec`.
    pub fn zero_at(prec: i64) -> Self {
        if prec >= EXACT {
            return Self::zero();
        }
        Padic { val: prec, prec, unit: Unit::Small(0) }
    }

    pub fn exact(n: impl Into<BigInt>) -> Self {
        Self::from_exact_raw(0, n.into())
    }

    /// `n` known modulo `p^prec`.
    pub fn with_prec(n: impl Into<BigInt>, prec: i64) -> Self {
        Self::exact(n).cap(prec)
    }

    /// `p^k` exactly.
    pub fn p_pow(k: i64) -> Self {
        Padic { val: k, prec: EXACT, unit: Unit::Exact(BigInt::one()) }
    }

    fn from_exact_raw(v: i64, n: BigInt) -> Self {
        if n.is_zero() {
            return Padic { val: EXACT, prec: EXACT, unit: Unit::Exact(n) };
        }
        let (t, u) = strip_p(n, P);
        Padic { val: v + t, prec: EXACT, unit: Unit::Exact(u) }
    }

    // r represents p^v * r modulo p^prec, with 0 <= r < p^(prec - v).
    fn from_small_raw(v: i64, prec: i64, mut r: u64) -> Self {
        if r == 0 || v >= prec {
            return Self::zero_at(prec);
        }
        let p = P as u64;
        let mut v = v;
        while r % p == 0 {
            r /= p;
            v += 1;
        }
        Padic { val: v, prec, unit: Unit::Small(r) }
    }

    fn from_big_raw(v: i64, prec: i64, r: BigInt) -> Self {
        if v >= prec {
            return Self::zero_at(prec);
        }
        let m = big_pow_i(P, prec - v);
        let r = r.mod_floor(&m);
        if r.is_zero() {
            return Self::zero_at(prec);
        }
        let (t, u) = strip_p(r, P);
        let v = v + t;
        match small_pow(P, prec - v) {
            Some(_) => Padic { val: v, prec, unit: Unit::Small(u.to_u64().unwrap()) },
            None => Padic { val: v, prec, unit: Unit::Big(u.to_biguint().unwrap()) },
        }
    }

    pub fn is_exact(&self) -> bool {
        self.prec >= EXACT
    }

    /// Absolute precision (the sentinel [`EXACT`] for exact values).
    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// The valuation when it is certain, `None` for zero at precision.
    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.val)
        }
    }

    fn is_zero_repr(&self) -> bool {
        match &self.unit {
            Unit::Exact(n) => n.is_zero(),
            Unit::Small(u) => *u == 0,
            Unit::Big(u) => u.is_zero(),
        }
    }

    /// Relative precision of the unit part; `None` when exact.
    pub fn rel_prec(&self) -> Option<i64> {
        (!self.is_exact()).then(|| self.prec - self.val)
    }

    /// The unit part as an integer (exact, or the canonical residue).
    pub fn unit_int(&self) -> BigInt {
        match &self.unit {
            Unit::Exact(n) => n.clone(),
            Unit::Small(u) => BigInt::from(*u),
            Unit::Big(u) => BigInt::from(u.clone()),
        }
    }

    fn unit_mod_small(&self, m: u64) -> u64 {
        match &self.unit {
            Unit::Small(u) => u % m,
            Unit::Exact(n) => n.mod_floor(&BigInt::from(m)).to_u64().unwrap(),
            Unit::Big(u) => (u % m).to_u64().unwrap(),
        }
    }

    /// The value as a rational number (the canonical representative).
    pub fn to_rational(&self) -> BigRational {
        if self.is_zero_repr() {
            return BigRational::zero();
        }
        let u = self.unit_int();
        if self.val >= 0 {
            BigRational::from_integer(u * big_pow_i(P, self.val))
        } else {
            BigRational::new(u, big_pow_i(P, -self.val))
        }
    }

    /// Integer representative in `[0, p^prec)`, or the exact integer value.
    /// Fails for negative valuation.
    pub fn to_integer(&self) -> Result<BigInt> {
        if self.is_zero_repr() {
            return Ok(BigInt::zero());
        }
        if self.val < 0 {
            return Err(Error::Integrality(format!("valuation {} < 0", self.val)));
        }
        Ok(self.unit_int() * big_pow_i(P, self.val))
    }

    /// Symmetric representative in `(-p^prec/2, p^prec/2]`, convenient for
    /// printing small negative numbers.
    pub fn to_integer_symmetric(&self) -> Result<BigInt> {
        let n = self.to_integer()?;
        if self.is_exact() {
            return Ok(n);
        }
        let m = big_pow_i(P, self.prec);
        if &n * 2 > m {
            Ok(n - m)
        } else {
            Ok(n)
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
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

    /// The Teichmüller lift of `a mod p` at absolute precision `prec`.
    pub fn teichmuller(a: i64, prec: i64) -> Result<Self> {
        if a.rem_euclid(P as i64) == 0 {
            return Err(Error::NotUnit(format!("teichmuller({a}) with a = 0 mod {P}")));
        }
        let mut x = Self::with_prec(a.rem_euclid(P as i64), prec);
        for _ in 0..=prec {
            let y = x.pow(P as u64);
            if y == x {
                return Ok(y);
            }
            x = y;
        }
        Ok(x)
    }

    fn add_impl(&self, o: &Self) -> Self {
        if self.is_exact() && o.is_exact() {
            if self.is_zero_repr() {
                return o.clone();
            }
            if o.is_zero_repr() {
                return self.clone();
            }
            let v = self.val.min(o.val);
            let a = self.unit_int() * big_pow_i(P, self.val - v);
            let b = o.unit_int() * big_pow_i(P, o.val - v);
            return Self::from_exact_raw(v, a + b);
        }
        let prec = self.prec.min(o.prec);
        if self.is_zero_repr() {
            return o.clone().cap(prec);
        }
        if o.is_zero_repr() {
            return self.clone().cap(prec);
        }
        let v = self.val.min(o.val);
        if v >= prec {
            return Self::zero_at(prec);
        }
        let k = prec - v;
        if let Some(m) = small_pow(P, k) {
            let term = |x: &Self| -> u128 {
                let d = x.val - v;
                if d >= k {
                    return 0;
                }
                let pd = small_pow(P, d).unwrap() as u128;
                (x.unit_mod_small(m) as u128 * pd) % m as u128
            };
            let s = (term(self) + term(o)) % m as u128;
            return Self::from_small_raw(v, prec, s as u64);
        }
        let a = self.unit_int() * big_pow_i(P, self.val - v);
        let b = o.unit_int() * big_pow_i(P, o.val - v);
        Self::from_big_raw(v, prec, a + b)
    }

    fn mul_impl(&self, o: &Self) -> Self {
        if self.is_exact() && o.is_exact() {
            if self.is_zero_repr() || o.is_zero_repr() {
                return Self::zero();
            }
            return Padic {
                val: self.val + o.val,
                prec: EXACT,
                unit: Unit::Exact(self.unit_int() * o.unit_int()),
            };
        }
        let prec = clamp((self.prec + o.val).min(o.prec + self.val));
        if prec >= EXACT {
            return Self::zero();
        }
        if self.is_zero_repr() || o.is_zero_repr() {
            return Self::zero_at(prec);
        }
        let v = self.val + o.val;
        if v >= prec {
            return Self::zero_at(prec);
        }
        let k = prec - v;
        if let Some(m) = small_pow(P, k) {
            let a = self.unit_mod_small(m) as u128;
            let b = o.unit_mod_small(m) as u128;
            return Self::from_small_raw(v, prec, ((a * b) % m as u128) as u64);
        }
        Self::from_big_raw(v, prec, self.unit_int() * o.unit_int())
    }

    fn neg_impl(&self) -> Self {
        match &self.unit {
            Unit::Exact(n) => Padic { val: self.val, prec: self.prec, unit: Unit::Exact(-n) },
            Unit::Small(0) => self.clone(),
            Unit::Small(u) => {
                let m = small_pow(P, self.prec - self.val).unwrap();
                Padic { val: self.val, prec: self.prec, unit: Unit::Small(m - u) }
            }
            Unit::Big(u) => {
                let m = big_pow(P, self.prec - self.val);
                Padic { val: self.val, prec: self.prec, unit: Unit::Big(m - u) }
            }
        }
    }

    fn cap_impl(self, prec: i64) -> Self {
        if prec >= self.prec {
            return self;
        }
        if self.is_zero_repr() || self.val >= prec {
            return Self::zero_at(prec);
        }
        let k = prec - self.val;
        match small_pow(P, k) {
            Some(m) => {
                let r = self.unit_mod_small(m);
                Padic { val: self.val, prec, unit: Unit::Small(r) }
            }
            None => {
                let r = self.unit_int().mod_floor(&big_pow_i(P, k));
                Padic { val: self.val, prec, unit: Unit::Big(r.to_biguint().unwrap()) }
            }
        }
    }

    fn inverse_impl(&self, cap: i64) -> Result<Self> {
        if self.is_zero_repr() {
            return Err(Error::NotUnit(format!("{self} is zero at precision")));
        }
        let val = -self.val;
        if self.is_exact() && cap >= EXACT {
            let u = self.unit_int();
            if u.abs().is_one() {
                return Ok(Padic { val, prec: EXACT, unit: Unit::Exact(u) });
            }
            return Err(Error::PrecisionExhausted(format!("inverse of {self} needs a finite precision")));
        }
        let prec = if self.is_exact() { cap } else { (self.prec - 2 * self.val).min(cap) };
        if val >= prec {
            return Ok(Self::zero_at(prec));
        }
        let k = prec - val;
        if let Some(m) = small_pow(P, k) {
            let u = self.unit_mod_small(m);
            return Ok(Padic { val, prec, unit: Unit::Small(inv_mod_u64(u, m)) });
        }
        let m = big_pow_i(P, k);
        let inv = inv_mod_big(&self.unit_int(), &m);
        Ok(Self::from_big_raw(val, prec, inv))
    }

    /// Multiply by `p^k` (any sign of `k`); valuation and precision move together.
    pub fn shift_by(&self, k: i64) -> Self {
        let mut out = self.clone();
        if self.is_exact() {
            if !self.is_zero_repr() {
                out.val += k;
            }
            return out;
        }
        out.prec = clamp(out.prec + k);
        out.val += k;
        out
    }
}

impl<const P: u32> fmt::Display for Padic<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero_repr() {
            return if self.is_exact() { write!(f, "0") } else { write!(f, "O({P}^{})", self.prec) };
        }
        write!(f, "{}*{P}^{}", self.unit_int(), self.val)?;
        if !self.is_exact() {
            write!(f, " + O({P}^{})", self.prec)?;
        }
        Ok(())
    }
}

impl<const P: u32> fmt::Debug for Padic<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<const P: u32> Serialize for Padic<P> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Padic", 4)?;
        st.serialize_field("p", &P)?;
        let zero = self.is_zero_repr();
        st.serialize_field("val", &(!zero).then_some(self.val))?;
        let u = self.unit_int();
        match u.to_i64() {
            Some(x) => st.serialize_field("unit", &x)?,
            None => st.serialize_field("unit", &u.to_string())?,
        }
        st.serialize_field("prec", &(!self.is_exact()).then_some(self.prec))?;
        st.end()
    }
}

impl<const P: u32> PartialEq for Padic<P> {
    fn eq(&self, other: &Self) -> bool {
        if self.is_exact() && other.is_exact() {
            return self.val == other.val && self.unit_int() == other.unit_int();
        }
        (self.clone() - other.clone()).is_zero_repr()
    }
}

impl<const P: u32> Add for Padic<P> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.add_impl(&o)
    }
}

impl<'a, const P: u32> Add<&'a Padic<P>> for &'a Padic<P> {
    type Output = Padic<P>;
    fn add(self, o: &Padic<P>) -> Padic<P> {
        self.add_impl(o)
    }
}

impl<const P: u32> Sub for Padic<P> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.add_impl(&o.neg_impl())
    }
}

impl<const P: u32> Mul for Padic<P> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.mul_impl(&o)
    }
}

impl<'a, const P: u32> Mul<&'a Padic<P>> for &'a Padic<P> {
    type Output = Padic<P>;
    fn mul(self, o: &Padic<P>) -> Padic<P> {
        self.mul_impl(o)
    }
}

impl<const P: u32> Neg for Padic<P> {
    type Output = Self;
    fn neg(self) -> Self {
        self.neg_impl()
    }
}

impl<const P: u32> Zero for Padic<P> {
    fn zero() -> Self {
        Padic { val: EXACT, prec: EXACT, unit: Unit::Exact(BigInt::zero()) }
    }
    fn is_zero(&self) -> bool {
        self.is_zero_repr()
    }
}

impl<const P: u32> One for Padic<P> {
    fn one() -> Self {
        Padic { val: 0, prec: EXACT, unit: Unit::Exact(BigInt::one()) }
    }
}

impl<const P: u32> Scalar for Padic<P> {
    fn from_bigint(n: &BigInt) -> Self {
        Self::from_exact_raw(0, n.clone())
    }

    fn from_i64(n: i64) -> Self {
        Self::from_exact_raw(0, BigInt::from(n))
    }

    fn from_ratio(num: &BigInt, den: &BigInt, prec: i64) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::NotUnit("zero denominator".into()));
        }
        let n = Self::exact(num.clone());
        let d = Self::exact(den.clone());
        if n.is_zero() {
            return Ok(n);
        }
        if (num % den).is_zero() {
            return Ok(Self::exact(num / den));
        }
        if prec >= EXACT {
            return Err(Error::PrecisionExhausted(format!("{num}/{den} has no exact p-adic form")));
        }
        // the unit part of the denominator is inverted to the precision the
        // quotient needs
        let dv = d.val;
        let du = Padic::<P> { val: 0, prec: EXACT, unit: d.unit.clone() };
        let need = prec - n.val + dv;
        let inv = du.inverse_impl(need.max(1))?;
        Ok((n * inv).shift_by(-dv).cap(prec))
    }

    fn inverse(&self, prec: i64) -> Result<Self> {
        self.inverse_impl(prec)
    }

    fn cap(self, prec: i64) -> Self {
        self.cap_impl(prec)
    }

    fn word_modulus(k: i64) -> Option<u64> {
        (k > 0).then(|| small_pow(P, k)).flatten().filter(|&m| m <= u32::MAX as u64)
    }

    fn word_residue(&self, k: i64) -> Option<u64> {
        if self.is_zero_repr() || self.val >= k {
            return Some(0);
        }
        if self.val < 0 {
            return None;
        }
        let pv = small_pow(P, self.val)?;
        Some(self.unit_mod_small(small_pow(P, k - self.val)?) * pv)
    }

    fn from_word_residue(r: u64, k: i64) -> Self {
        Self::from_small_raw(0, k, r)
    }

    fn precision(&self) -> Option<i64> {
        (!self.is_exact()).then_some(self.prec)
    }

    fn val_hint(&self) -> i64 {
        self.val
    }
}

impl<const P: u32> PadicLike for Padic<P> {
    const P: u32 = P;

    fn val_lower(&self) -> i64 {
        self.val
    }

    fn shift(&self, k: i64) -> Result<Self> {
        Ok(self.shift_by(k))
    }

    fn div_exact(&self, k: i64) -> Result<Self> {
        if self.is_zero_repr() {
            if self.is_exact() {
                return Ok(self.clone());
            }
            if self.prec < k {
                return Err(Error::PrecisionExhausted(format!(
                    "dividing O({P}^{}) by {P}^{k}",
                    self.prec
                )));
            }
            return Ok(Self::zero_at(self.prec - k));
        }
        if self.val < k {
            return Err(Error::NotDivisible { val: self.val, k });
        }
        Ok(self.shift_by(-k))
    }

    fn residue(&self) -> Result<u32> {
        if self.is_zero_repr() {
            if self.prec < 1 {
                return Err(Error::PrecisionExhausted("residue of O(p^0)".into()));
            }
            return Ok(0);
        }
        match self.val.cmp(&0) {
            Ordering::Less => Err(Error::Integrality(format!("valuation {}", self.val))),
            Ordering::Greater => Ok(0),
            Ordering::Equal => Ok(self.unit_mod_small(P as u64) as u32),
        }
    }
}

/// The residue field `F_p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fp<const P: u32>(u32);

impl<const P: u32> Fp<P> {
    pub fn new(n: i64) -> Self {
        Fp(n.rem_euclid(P as i64) as u32)
    }

    pub fn value(self) -> u32 {
        self.0
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut acc = 1u64;
        let mut b = self.0 as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % P as u64;
            }
            b = b * b % P as u64;
            e >>= 1;
        }
        Fp(acc as u32)
    }
}

impl<const P: u32> fmt::Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u32> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u32> Add for Fp<P> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Fp((self.0 + o.0) % P)
    }
}

impl<const P: u32> Sub for Fp<P> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Fp((self.0 + P - o.0) % P)
    }
}

impl<const P: u32> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Fp(((self.0 as u64 * o.0 as u64) % P as u64) as u32)
    }
}

impl<const P: u32> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Fp((P - self.0) % P)
    }
}

impl<const P: u32> Zero for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u32> One for Fp<P> {
    fn one() -> Self {
        Fp(1)
    }
}

impl<const P: u32> Scalar for Fp<P> {
    fn from_bigint(n: &BigInt) -> Self {
        let r = n.mod_floor(&BigInt::from(P));
        Fp(r.to_u32().unwrap())
    }

    fn from_i64(n: i64) -> Self {
        Fp::new(n)
    }

    fn from_ratio(num: &BigInt, den: &BigInt, prec: i64) -> Result<Self> {
        let d = Self::from_bigint(den);
        Ok(Self::from_bigint(num) * d.inverse(prec)?)
    }

    fn inverse(&self, _prec: i64) -> Result<Self> {
        if self.0 == 0 {
            return Err(Error::NotUnit("0 in F_p".into()));
        }
        Ok(self.pow(P as u64 - 2))
    }
}

impl<const P: u32> PadicLike for Fp<P> {
    const P: u32 = P;

    fn val_lower(&self) -> i64 {
        if self.0 == 0 {
            EXACT
        } else {
            0
        }
    }

    fn shift(&self, k: i64) -> Result<Self> {
        match k.cmp(&0) {
            Ordering::Equal => Ok(*self),
            Ordering::Greater => Ok(Fp(0)),
            Ordering::Less => self.div_exact(-k),
        }
    }

    fn div_exact(&self, k: i64) -> Result<Self> {
        if k == 0 || self.0 == 0 {
            Ok(*self)
        } else {
            Err(Error::NotDivisible { val: 0, k })
        }
    }

    fn residue(&self) -> Result<u32> {
        Ok(self.0)
    }
}

impl<const P: u32> Padic<P> {
    /// Reduction modulo p.
    pub fn reduce(&self) -> Result<Fp<P>> {
        Ok(Fp(self.residue()?))
    }
}

impl<const P: u32> From<Fp<P>> for Padic<P> {
    fn from(x: Fp<P>) -> Self {
        Padic::exact(x.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q5 = Padic<5>;

    #[test]
    fn basic_products() {
        assert_eq!(Q5::exact(2) * Q5::exact(3), Q5::exact(6));
        let x = Q5::with_prec(17, 8);
        assert!((x.clone() + (-x)).is_zero());
        assert_eq!(Q5::exact(240).valuation(), Some(1));
    }

    #[test]
    fn div_exact_rules() {
        assert_eq!(Q5::exact(25).div_exact(1).unwrap(), Q5::exact(5));
        let d = (Q5::exact(5) - Q5::p_pow(5)).div_exact(1).unwrap();
        assert_eq!(d, Q5::exact(1) - Q5::p_pow(4));
        assert!(matches!(Q5::exact(3).div_exact(1), Err(Error::NotDivisible { .. })));
        let z = Q5::zero_at(3);
        assert_eq!(z.div_exact(1).unwrap().prec(), 2);
        assert!(matches!(z.div_exact(4), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn precision_rules() {
        let x = Q5::with_prec(7, 8);
        let y = Q5::with_prec(25, 6);
        assert_eq!((x.clone() + y.clone()).prec(), 6);
        // min(8 + val(y), 6 + val(x))
        assert_eq!((x.clone() * y.clone()).prec(), 6);
        assert_eq!((Q5::with_prec(5, 8) * y.clone()).prec(), 7);
        assert_eq!(x.div_exact(0).unwrap().prec(), 8);
        assert_eq!(y.div_exact(2).unwrap().prec(), 4);
    }

    #[test]
    fn teichmuller_57() {
        let w = Q5::teichmuller(2, 3).unwrap();
        assert_eq!(w.to_integer().unwrap(), BigInt::from(57));
        assert_eq!(Q5::teichmuller(1, 8).unwrap(), Q5::one());
        assert!(Q5::teichmuller(10, 8).is_err());
    }

    #[test]
    fn teichmuller_unique_mod_p3() {
        for a in 1..5u64 {
            let fixed: Vec<u64> = (0..125u64)
                .filter(|x| x % 5 == a && Q5::with_prec(*x, 3).pow(5) == Q5::with_prec(*x, 3))
                .collect();
            assert_eq!(fixed.len(), 1);
            assert_eq!(
                BigInt::from(fixed[0]),
                Q5::teichmuller(a as i64, 3).unwrap().to_integer().unwrap()
            );
        }
    }

    #[test]
    fn big_precision_path() {
        let x = Q5::with_prec(3, 60);
        let inv = x.inverse(60).unwrap();
        assert_eq!(x * inv, Q5::with_prec(1, 60));
        let r = Q5::from_ratio(&BigInt::from(2), &BigInt::from(15), 40).unwrap();
        assert_eq!(r.valuation(), Some(-1));
        assert_eq!(r * Q5::exact(15), Q5::with_prec(2, 39));
    }

    #[test]
    fn display_and_json() {
        let x = Q5::with_prec(10, 8);
        assert_eq!(x.to_string(), "2*5^1 + O(5^8)");
        let j = serde_json::to_value(&x).unwrap();
        assert_eq!(j["val"], 1);
        assert_eq!(j["prec"], 8);
        assert_eq!(j["unit"], 2);
    }

    #[test]
    fn fp_field() {
        type F = Fp<7>;
        for a in 1..7 {
            assert_eq!(F::new(a) * F::new(a).inverse(0).unwrap(), F::one());
        }
        assert_eq!(F::new(-1), F::new(6));
    }
}
