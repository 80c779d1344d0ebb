//! Sign-rank tools for symmetric XOR functions `D(|x ⊕ y|)`.
//!
//! The lift in [`signrep`] turns a predicate `D` into an explicit low-rank
//! sign representation; [`reduction`] embeds a block of the AND function
//! `D(|x ∧ y|)` into the XOR function; [`protocol`] runs the matching
//! private-coin protocol.

pub mod binomial;
pub mod bits;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod fourier;
pub mod linalg;
pub mod lp;
pub mod predicate;
pub mod protocol;
pub mod rational;
pub mod reduction;
pub mod signrep;

pub use bits::BitString;
pub use bounds::{and_bounds, forster_lower, xor_bounds, BoundReport};
pub use error::{Error, Result};
pub use fourier::{symmetric_spectrum, wht_full, LevelSpectrum, SymmetricFn};
pub use predicate::{family, parse_expr, DegreeProfile, Family, Predicate};
pub use protocol::{exact_bias, factorize, simulate, BiasReport, Factorization};
pub use rational::Rational;
pub use reduction::{reduce, EmbeddingParams, ReductionRecord};
pub use signrep::{lift, verify_lift, CertificateRecord, LiftCertificate, VerifyReport};
