//! Upper and lower sign-rank evidence for symmetric XOR and AND functions.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{self, LevelSpectrum, SymmetricFn};
use crate::predicate::Predicate;
use crate::rational::{self, Rational};
use crate::signrep;

pub const ASYMPTOTIC_CAVEAT: &str = "asymptotic, constants unspecified";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Xor,
    And,
}

/// Bound report. Certificate-backed fields are only present for the XOR
/// function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub function: Target,
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(with = "rational::serde_opt_biguint")]
    pub support_upper: Option<BigUint>,
    pub log2_rank_upper: Option<f64>,
    pub protocol_cost_bits: Option<u64>,
    #[serde(with = "rational::serde_opt_rational")]
    pub forster_lower: Option<Rational>,
    pub log2_forster: Option<f64>,
    pub lower_expr: String,
    pub upper_expr: String,
    pub caveat: String,
}

/// `2^n / ‖f(x ⊕ y)‖ = 1 / max_S |f̂(S)|` for a ±1-valued symmetric `f`.
pub fn forster_lower(spec: &LevelSpectrum) -> Result<Rational> {
    // Parseval: Σ f̂(S)² = 1 exactly when f is ±1-valued
    if !spec.parseval_sum().is_one() {
        return Err(Error::NotSignValued);
    }
    let max = spec.max_abs();
    if max.is_zero() {
        return Err(Error::NotSignValued);
    }
    Ok(max.recip())
}

/// `⌈log₂ support⌉ + 2`, the cost of the sampling protocol.
pub fn paturi_simon_cost(support: &BigUint) -> Result<u64> {
    if support.is_zero() {
        return Err(Error::InvalidParameter("support must be at least 1".into()));
    }
    Ok(rational::ceil_log2(support) + 2)
}

fn expr(label: &str, measure: usize, n: usize, lower: bool) -> String {
    let log = (n as f64).log2();
    let value = if lower { measure as f64 / log.powi(5) } else { measure as f64 * log };
    let shape = if lower { format!("{label}/log2(n)^5") } else { format!("{label}*log2(n)") };
    if value.is_finite() {
        format!("Theta({shape}) with {label}={measure}, n={n}: {value:.6}")
    } else {
        format!("Theta({shape}) with {label}={measure}, n={n}: undefined")
    }
}

/// Certified upper bound (lift), Forster lower bound on the ±1 matrix of
/// `D(|x ⊕ y|)`, and the asymptotic expressions in `M = deg₂(D)`.
pub fn xor_bounds(p: &Predicate) -> BoundReport {
    let cert = signrep::lift(p);
    let spec = fourier::symmetric_spectrum(&SymmetricFn::from_predicate(p));
    let forster = forster_lower(&spec).expect("predicate levels are ±1");
    let m = p.deg2();
    BoundReport {
        function: Target::Xor,
        n: p.n(),
        m,
        k: p.deg(),
        log2_rank_upper: Some(rational::log2_biguint(&cert.support)),
        protocol_cost_bits: Some(paturi_simon_cost(&cert.support).expect("support ≥ 1")),
        support_upper: Some(cert.support),
        log2_forster: Some(rational::log2_rational(&forster)),
        forster_lower: Some(forster),
        lower_expr: expr("M", m, p.n(), true),
        upper_expr: expr("M", m, p.n(), false),
        caveat: ASYMPTOTIC_CAVEAT.into(),
    }
}

/// Statement-level report for `D(|x ∧ y|)` in `K = deg(D)`.
pub fn and_bounds(p: &Predicate) -> BoundReport {
    let k = p.deg();
    BoundReport {
        function: Target::And,
        n: p.n(),
        m: p.deg2(),
        k,
        support_upper: None,
        log2_rank_upper: None,
        protocol_cost_bits: None,
        forster_lower: None,
        log2_forster: None,
        lower_expr: expr("K", k, p.n(), true),
        upper_expr: expr("K", k, p.n(), false),
        caveat: ASYMPTOTIC_CAVEAT.into(),
    }
}
