//! Exact p-adic jet algebras and the arithmetic differential objects built
//! on them: p-derivations, delta-characters of `G_m` and elliptic curves,
//! quasi-linear prolongations, delta-modular expansions and the
//! Frobenius-limit rings.
//!
//! Everything is generic over the scalar type; the prime is a const
//! parameter so that mixing primes does not compile. The aliases below fix
//! the primes used by the command-line tool.

pub mod budget;
pub mod elliptic;
pub mod error;
pub mod gm;
pub mod jet;
pub mod limits;
pub mod modular;
pub mod padic;
pub mod quasilinear;
pub mod scalar;
pub mod series;

pub use budget::PrecisionBudget;
pub use error::{Error, Result};
pub use jet::{FiltrationLevel, JetCtx, JetPoly, Monomial};
pub use padic::{Fp, Padic};
pub use scalar::{PadicLike, Scalar, EXACT};
pub use series::{FormalGroupLog, PowerSeries};

pub type Padic5 = Padic<5>;
pub type Padic7 = Padic<7>;
pub type Padic11 = Padic<11>;
pub type Padic13 = Padic<13>;
pub type Fp5 = Fp<5>;
pub type Fp7 = Fp<7>;
pub type Jet5 = JetPoly<Padic<5>>;
pub type Jet7 = JetPoly<Padic<7>>;
pub type Series5 = PowerSeries<Padic<5>>;
pub type QSeries = PowerSeries<num_rational::BigRational>;
