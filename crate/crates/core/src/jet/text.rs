//! Text rendering and parsing for jet polynomials.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! poly   := term (('+' | '-') term)*
//! term   := 'O(' INT '^' INT ')'         p-adic precision
//!         | 'O(' VAR '^' INT ')'         base truncation
//!         | coeff | [coeff '*'] factor ('*' factor)*
//! coeff  := INT ['/' INT ['^' INT]]
//! factor := VAR ("'"* | '(' INT ')') ['^' ['-'] INT]
//! ```
//!
//! Jet variables up to the third are written with primes (`T'''`), higher
//! ones as `T(4)`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{JetCtx, JetPoly, Monomial, MAX_VARS};
use crate::error::{Error, Result};
use crate::padic::{Fp, Padic};
use crate::scalar::{Scalar, EXACT};

/// Coefficients that have a text form in the polynomial grammar.
pub trait CoeffText: Scalar {
    fn to_text(&self) -> String;
    /// Prime whose powers appear in `O(p^N)`, if any.
    fn prime() -> Option<u32> {
        None
    }
}

impl<const P: u32> CoeffText for Padic<P> {
    fn to_text(&self) -> String {
        match self.valuation() {
            Some(v) if v < 0 => {
                let u = Padic::<P>::exact(self.unit_int()).cap(self.prec() - v);
                let n = u.to_integer_symmetric().unwrap();
                format!("{n}/{P}^{}", -v)
            }
            _ => self.to_integer_symmetric().unwrap().to_string(),
        }
    }
    fn prime() -> Option<u32> {
        Some(P)
    }
}

impl<const P: u32> CoeffText for Fp<P> {
    fn to_text(&self) -> String {
        self.value().to_string()
    }
    fn prime() -> Option<u32> {
        Some(P)
    }
}

impl CoeffText for BigRational {
    fn to_text(&self) -> String {
        self.to_string()
    }
}

pub(crate) fn var_name(var: &str, i: usize) -> String {
    match i {
        0 => var.to_string(),
        1..=3 => format!("{var}{}", "'".repeat(i)),
        _ => format!("{var}({i})"),
    }
}

fn render_monomial(var: &str, m: &Monomial) -> Vec<String> {
    let mut out = Vec::new();
    for i in 0..MAX_VARS {
        let e = m.0[i];
        if e == 0 {
            continue;
        }
        let name = var_name(var, i);
        if e == 1 {
            out.push(name);
        } else {
            out.push(format!("{name}^{e}"));
        }
    }
    out
}

impl<C: CoeffText> JetPoly<C> {
    pub fn to_text(&self) -> String {
        let var = &*self.ctx.var;
        let mut s = String::new();
        for (m, c) in self.terms.iter().rev() {
            let mut ct = c.to_text();
            let neg = ct.starts_with('-');
            if neg {
                ct.remove(0);
            }
            let factors = render_monomial(var, m);
            let body = if factors.is_empty() {
                ct
            } else if ct == "1" {
                factors.join("*")
            } else {
                format!("{ct}*{}", factors.join("*"))
            };
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
                s.push_str(&body);
            } else {
                s.push_str(if neg { " - " } else { " + " });
                s.push_str(&body);
            }
        }
        if s.is_empty() {
            s.push('0');
        }
        if let (Some(p), true) = (C::prime(), self.ctx.prec < EXACT) {
            s.push_str(&format!(" + O({p}^{})", self.ctx.prec));
        }
        if let Some(d) = self.ctx.base_max {
            s.push_str(&format!(" + O({var}^{})", d + 1));
        }
        s
    }

    /// Parse the text grammar into the algebra described by `ctx`.
    /// `O(...)` terms tighten the context's precision and base bound.
    pub fn parse(s: &str, ctx: &JetCtx) -> Result<Self> {
        let mut ps = Parser { s: s.as_bytes(), i: 0, var: ctx.var.as_bytes() };
        let mut ctx = ctx.clone();
        let mut terms: Vec<(Monomial, BigRational)> = Vec::new();
        let mut sign = BigInt::one();
        ps.ws();
        if ps.eat(b'-') {
            sign = -sign;
        } else {
            ps.eat(b'+');
        }
        loop {
            match ps.term()? {
                Term::Prec(p, n) => {
                    if Some(p) != C::prime() {
                        return Err(Error::Parse(format!("O({p}^{n}) does not match the coefficient prime")));
                    }
                    ctx.prec = ctx.prec.min(n);
                }
                Term::Base(k) => ctx.base_max = Some(ctx.base_max.map_or(k - 1, |d| d.min(k - 1))),
                Term::Mono(c, m) => {
                    if m.0[0] < 0 && !ctx.laurent {
                        return Err(Error::Parse("negative base exponent outside a Laurent chart".into()));
                    }
                    let top = m.top_index();
                    ctx.order = ctx.order.max(top);
                    terms.push((m, c * BigRational::from_integer(sign.clone())));
                }
            }
            ps.ws();
            if ps.eof() {
                break;
            }
            sign = if ps.eat(b'+') {
                BigInt::one()
            } else if ps.eat(b'-') {
                -BigInt::one()
            } else {
                return Err(ps.err("expected '+' or '-'"));
            };
        }
        let prec = ctx.prec;
        let cs: Result<Vec<_>> = terms
            .into_iter()
            .map(|(m, c)| Ok((m, C::from_ratio(c.numer(), c.denom(), prec)?)))
            .collect();
        Ok(JetPoly::from_terms(ctx, cs?))
    }
}

impl<C: CoeffText> fmt::Display for JetPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl<C: CoeffText> fmt::Debug for JetPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

enum Term {
    Prec(u32, i64),
    Base(i64),
    Mono(BigRational, Monomial),
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
    var: &'a [u8],
}

impl Parser<'_> {
    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn eof(&self) -> bool {
        self.i >= self.s.len()
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {}", self.i))
    }

    fn int(&mut self) -> Result<BigInt> {
        self.ws();
        let start = self.i;
        if self.i < self.s.len() && self.s[self.i] == b'-' {
            self.i += 1;
        }
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        let t = std::str::from_utf8(&self.s[start..self.i]).unwrap();
        t.parse::<BigInt>().map_err(|_| self.err("expected an integer"))
    }

    fn small(&mut self) -> Result<i64> {
        let n = self.int()?;
        i64::try_from(n).map_err(|_| self.err("exponent out of range"))
    }

    fn at_var(&mut self) -> bool {
        self.ws();
        self.s[self.i..].starts_with(self.var)
    }

    fn term(&mut self) -> Result<Term> {
        self.ws();
        if self.s[self.i..].starts_with(b"O(") {
            self.i += 2;
            let t = if self.at_var() {
                self.i += self.var.len();
                if !self.eat(b'^') {
                    return Err(self.err("expected '^'"));
                }
                Term::Base(self.small()?)
            } else {
                let p = self.small()?;
                if !self.eat(b'^') {
                    return Err(self.err("expected '^'"));
                }
                Term::Prec(p as u32, self.small()?)
            };
            if !self.eat(b')') {
                return Err(self.err("expected ')'"));
            }
            return Ok(t);
        }
        let mut coeff = BigRational::one();
        let mut m = Monomial::ONE;
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            let num = self.int()?;
            let mut den = BigInt::one();
            if self.eat(b'/') {
                den = self.int()?;
                if self.eat(b'^') {
                    let e = self.small()?;
                    den = num_traits::pow(den, e as usize);
                }
            }
            if den.is_zero() {
                return Err(self.err("zero denominator"));
            }
            coeff = BigRational::new(num, den);
            if !self.eat(b'*') {
                return Ok(Term::Mono(coeff, m));
            }
        }
        loop {
            if !self.at_var() {
                return Err(self.err("expected a variable"));
            }
            self.i += self.var.len();
            let mut idx = 0usize;
            while self.i < self.s.len() && self.s[self.i] == b'\'' {
                idx += 1;
                self.i += 1;
            }
            if idx == 0 && self.i < self.s.len() && self.s[self.i] == b'(' {
                self.i += 1;
                idx = self.small()? as usize;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
            }
            if idx >= MAX_VARS {
                return Err(self.err("jet index out of range"));
            }
            let mut e = 1;
            if self.eat(b'^') {
                e = self.small()?;
            }
            if idx > 0 && e < 0 {
                return Err(self.err("negative exponent on a jet variable"));
            }
            m.0[idx] += e;
            if !self.eat(b'*') {
                break;
            }
        }
        Ok(Term::Mono(coeff, m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    type Q5 = Padic<5>;

    #[test]
    fn render_and_parse() {
        let ctx = JetCtx::new("T", 2).with_prec(8);
        let f = JetPoly::<Q5>::parse("3*T^2*T' - T'' + 2/5^2*T + 7", &ctx).unwrap();
        let s = f.to_text();
        assert_eq!(s, "-T'' + 3*T^2*T' + 2/5^2*T + 7 + O(5^8)");
        let g = JetPoly::<Q5>::parse(&s, &ctx).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn high_jets_and_laurent() {
        let ctx = JetCtx::new("x", 5).laurent().with_prec(6);
        let f = JetPoly::<Q5>::parse("x^-3*x(5)^2 + x'''", &ctx).unwrap();
        assert_eq!(f.order_used(), 5);
        let g = JetPoly::<Q5>::parse(&f.to_text(), &ctx).unwrap();
        assert_eq!(f, g);
        assert!(JetPoly::<Q5>::parse("T^-1", &JetCtx::new("T", 1)).is_err());
    }

    #[test]
    fn base_truncation_round_trip() {
        let ctx = JetCtx::new("T", 1).with_prec(4);
        let f = JetPoly::<Q5>::parse("T + T^9 + O(T^5)", &ctx).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.to_text(), "T + O(5^4) + O(T^5)");
    }
}
