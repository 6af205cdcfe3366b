use std::fmt;

use serde::{Serialize, Serializer};

use super::JetPoly;
use crate::error::{Error, Result};
use crate::scalar::PadicLike;

/// Position of an element in the filtration `F^i B_n = sum_k p^k B_(i+k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiltrationLevel {
    /// Smallest `i` with `f` in `F^i B_n`.
    Level(usize),
    /// Some coefficient has negative valuation, so `f` is not in `B_n`.
    Outside,
}

impl FiltrationLevel {
    /// `f in F^i` for this `i`.
    pub fn within(&self, i: usize) -> bool {
        matches!(self, FiltrationLevel::Level(l) if *l <= i)
    }
}

impl fmt::Display for FiltrationLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiltrationLevel::Level(i) => write!(f, "{i}"),
            FiltrationLevel::Outside => write!(f, "none"),
        }
    }
}

impl Serialize for FiltrationLevel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FiltrationLevel::Level(i) => s.serialize_u64(*i as u64),
            FiltrationLevel::Outside => s.serialize_str("none"),
        }
    }
}

impl<C: PadicLike> JetPoly<C> {
    /// The filtration level inside the ambient `B_n` (n = the context order).
    ///
    /// A term whose top jet index is `t` and whose coefficient has valuation
    /// `v` lies in `F^i` exactly when `v >= t - i`. The unknown remainder
    /// `O(p^N)` lies in `F^i` when `N >= n - i`; if that fails for the level
    /// found the answer is undecidable.
    pub fn filtration_level(&self) -> Result<FiltrationLevel> {
        let n = self.ctx.order.max(self.order_used()) as i64;
        let mut level = 0i64;
        for (m, c) in self.terms() {
            let v = c.val_lower();
            if v < 0 {
                return Ok(FiltrationLevel::Outside);
            }
            level = level.max(m.top_index() as i64 - v);
        }
        if self.ctx.prec < n - level {
            return Err(Error::PrecisionExhausted(format!(
                "filtration level {level} undecidable at precision {} in B_{n}",
                self.ctx.prec
            )));
        }
        Ok(FiltrationLevel::Level(level as usize))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{JetCtx, Monomial};
    use crate::padic::Padic;
    type Q5 = Padic<5>;

    fn ctx() -> JetCtx {
        JetCtx::new("T", 2).with_prec(8)
    }

    #[test]
    fn levels() {
        let t2 = JetPoly::<Q5>::monomial(ctx(), Monomial::var(2, 1), Q5::exact(25));
        assert_eq!(t2.filtration_level().unwrap(), FiltrationLevel::Level(0));
        let t1 = JetPoly::<Q5>::var(ctx(), 1);
        assert_eq!(t1.filtration_level().unwrap(), FiltrationLevel::Level(1));
        let t0 = JetPoly::<Q5>::var(ctx(), 0);
        assert_eq!(t0.filtration_level().unwrap(), FiltrationLevel::Level(0));
        let neg = JetPoly::<Q5>::constant(ctx(), Q5::p_pow(-1));
        assert_eq!(neg.filtration_level().unwrap(), FiltrationLevel::Outside);
    }

    #[test]
    fn undecidable_at_low_precision() {
        let t0 = JetPoly::<Q5>::var(JetCtx::new("T", 2).with_prec(1), 0);
        assert!(t0.filtration_level().is_err());
    }
}
