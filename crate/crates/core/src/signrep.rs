//! Univariate sign representations and the sparse multilinear sign
//! representation of `D(|x ⊕ y|)` obtained from them.
//!
//! The predicate is split into its even and odd halves
//! `A(y) = D(2y)`, `B(y) = D(2y+1)`, each is sign-represented by a
//! minimal-degree univariate polynomial, and the two are glued on the
//! parity of `|x|`. The resulting symmetric function `p` has
//! `p(x)·D(|x|) > 0` everywhere, and the number of nonzero Fourier
//! coefficients of `p` is the rank of `p(x ⊕ y)`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::binomial::Binomials;
use crate::error::{Error, Result};
use crate::fourier::{self, LevelSpectrum, SymmetricFn};
use crate::linalg;
use crate::lp::{self, LpOutcome};
use crate::predicate::Predicate;
use crate::rational::{self, Rational};

/// Largest `n` accepted by [`lp_min_degree`].
pub const LP_N_MAX: usize = 16;

/// Dense univariate polynomial with exact coefficients, lowest degree first.
/// Trailing zeros are trimmed, so the zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    /// `scale · ∏ (x − r)`.
    pub fn from_roots<'a>(scale: Rational, roots: impl IntoIterator<Item = &'a Rational>) -> Self {
        let mut coeffs = vec![scale];
        for r in roots {
            let mut next = vec![Rational::zero(); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }
}

/// The even and odd halves of a predicate on `{0..⌊n/2⌋}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvenOddPair {
    pub even: Predicate,
    pub odd: Predicate,
}

/// Sparse sign representation of `D(|x ⊕ y|)` with its exact sparsity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftCertificate {
    pub n: usize,
    /// `deg₂` of the source predicate.
    pub m: usize,
    pub q1: UniPoly,
    pub q2: UniPoly,
    pub lifted: SymmetricFn,
    pub spectrum: LevelSpectrum,
    pub support: BigUint,
    pub bound: BigUint,
}

/// Serialised form of a certificate together with the predicate it
/// represents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub predicate: Predicate,
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(with = "rational::serde_rational_vec")]
    pub q1_coeffs: Vec<Rational>,
    #[serde(with = "rational::serde_rational_vec")]
    pub q2_coeffs: Vec<Rational>,
    #[serde(with = "rational::serde_rational_vec")]
    pub levels: Vec<Rational>,
    #[serde(with = "rational::serde_rational_vec")]
    pub spectrum_levels: Vec<Rational>,
    #[serde(with = "rational::serde_biguint")]
    pub support: BigUint,
    #[serde(with = "rational::serde_biguint")]
    pub bound: BigUint,
}

/// Verdicts of [`verify_lift`]. `rank_check` is `None` when the explicit
/// matrix was not built.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub sign_ok: bool,
    /// `support ≤ bound` for the stated combinatorial bound.
    pub support_ok: bool,
    /// `support` is at most the number of sets with `|S| ≤ M` or `|S| ≥ n − M`.
    pub structural_ok: bool,
    /// `support ≤ 4 n^M`.
    pub power_bound_ok: bool,
    pub levels_consistent: bool,
    pub spectrum_consistent: bool,
    pub support_consistent: bool,
    pub bound_consistent: bool,
    pub rank_check: Option<bool>,
    pub rank: Option<usize>,
}

impl VerifyReport {
    pub fn all_ok(&self) -> bool {
        self.sign_ok
            && self.support_ok
            && self.structural_ok
            && self.power_bound_ok
            && self.levels_consistent
            && self.spectrum_consistent
            && self.support_consistent
            && self.bound_consistent
            && self.rank_check != Some(false)
    }
}

fn half_point(i: usize) -> Rational {
    Rational::new(BigInt::from(2 * i + 1), BigInt::from(2))
}

/// `σ · ∏_{i ∈ flips} (x − (i + ½))` with `σ` fixing the sign at 0; its
/// degree is `deg(P)`.
pub fn min_sign_poly(p: &Predicate) -> UniPoly {
    let profile = p.degree_profile();
    let roots: Vec<Rational> = profile.flips1.iter().map(|&i| half_point(i)).collect();
    let parity = if roots.len().is_multiple_of(2) { 1 } else { -1 };
    let sigma = rational::int((p.at(0) * parity) as i64);
    UniPoly::from_roots(sigma, &roots)
}

/// `true` iff `poly(i) · P(i) > 0` for every `i ∈ {0..n}`.
pub fn check_sign_match(poly: &UniPoly, p: &Predicate) -> bool {
    if poly.is_zero() {
        return false;
    }
    (0..=p.n()).all(|i| rational::signum(&poly.eval(&rational::int(i as i64))) == p.at(i))
}

/// Decides whether some polynomial of degree ≤ `d` satisfies
/// `P(i) · p(i) ≥ 1` on `{0..n}` by exact linear programming.
pub fn lp_min_degree(p: &Predicate, d: usize) -> Result<Option<UniPoly>> {
    if p.n() > LP_N_MAX {
        return Err(Error::Gate { what: "lp_min_degree", n: p.n(), max: LP_N_MAX });
    }
    if d > p.n() {
        return Err(Error::OutOfRange(format!("degree {d} exceeds n = {}", p.n())));
    }
    let rows: Vec<Vec<Rational>> = (0..=p.n())
        .map(|i| {
            let sign = BigInt::from(p.at(i));
            let base = BigInt::from(i);
            let mut pow = BigInt::one();
            (0..=d)
                .map(|_| {
                    let v = Rational::from_integer(&sign * &pow);
                    pow *= &base;
                    v
                })
                .collect()
        })
        .collect();
    let ones = vec![Rational::one(); rows.len()];
    Ok(match lp::feasible_point(&rows, &ones) {
        LpOutcome::Feasible(c) => Some(UniPoly::new(c)),
        LpOutcome::Infeasible => None,
    })
}

/// `A(y) = D(2y)`, `B(y) = D(2y+1)` on `{0..⌊n/2⌋}`, with `D(n+1) := D(n−1)`.
/// For `n = 1` both halves are single points and are padded to two equal
/// entries, which keeps them valid predicates without adding sign changes.
pub fn even_odd_split(p: &Predicate) -> EvenOddPair {
    let n = p.n();
    let at = |i: usize| if i == n + 1 { p.at(n - 1) } else { p.at(i) };
    let half = n / 2;
    let build = |offset: usize| {
        let mut signs: Vec<i8> = (0..=half).map(|y| at(2 * y + offset)).collect();
        if signs.len() == 1 {
            signs.push(signs[0]);
        }
        Predicate::new(&signs).expect("signs are ±1")
    };
    EvenOddPair { even: build(0), odd: build(1) }
}

/// `4 · Σ_{k=0}^{M} C(⌊n/2⌋ + 1, k)`.
pub fn support_bound(n: usize, m: usize) -> BigUint {
    let top = n / 2 + 1;
    let b = Binomials::new(top);
    let sum: BigUint = (0..=m.min(top)).map(|k| b.get(top, k).magnitude().clone()).sum();
    sum * 4u32
}

/// Number of `S ⊆ [n]` with `|S| ≤ m` or `|S| ≥ n − m`: the spectrum of
/// the lift lives on those levels.
pub fn structural_bound(n: usize, m: usize) -> BigUint {
    let b = Binomials::new(n);
    (0..=n)
        .filter(|&k| k <= m || k + m >= n)
        .map(|k| b.get(n, k).magnitude().clone())
        .sum()
}

/// `4 n^M`.
pub fn power_bound(n: usize, m: usize) -> BigUint {
    BigUint::from(n).pow(m as u32) * 4u32
}

fn glue_levels(n: usize, q1: &UniPoly, q2: &UniPoly) -> Vec<Rational> {
    (0..=n)
        .map(|w| {
            let y = rational::int((w / 2) as i64);
            if w % 2 == 0 {
                q1.eval(&y)
            } else {
                q2.eval(&y)
            }
        })
        .collect()
}

/// Builds the sign representation and its sparsity certificate.
pub fn lift(p: &Predicate) -> LiftCertificate {
    let n = p.n();
    let m = p.deg2();
    let halves = even_odd_split(p);
    let q1 = min_sign_poly(&halves.even);
    let q2 = min_sign_poly(&halves.odd);
    let lifted = SymmetricFn { n, levels: glue_levels(n, &q1, &q2) };
    let spectrum = fourier::symmetric_spectrum(&lifted);
    let support = fourier::support_size(&spectrum);
    LiftCertificate { n, m, q1, q2, lifted, spectrum, support, bound: support_bound(n, m) }
}

/// Checks a certificate against the predicate it claims to represent.
/// The explicit `2^n × 2^n` rank is computed only when `check_rank` is set
/// and `n ≤ EXPLICIT_N_MAX`.
pub fn verify_lift(cert: &LiftCertificate, p: &Predicate, check_rank: bool) -> VerifyReport {
    let n = p.n();
    let shape_ok = cert.n == n && cert.lifted.levels.len() == n + 1 && cert.spectrum.coeffs.len() == n + 1;
    let sign_ok = shape_ok
        && cert.lifted.levels.iter().enumerate().all(|(w, v)| rational::signum(v) == p.at(w));
    let levels_consistent = shape_ok && cert.lifted.levels == glue_levels(n, &cert.q1, &cert.q2);
    let spectrum_consistent = shape_ok && fourier::symmetric_spectrum(&cert.lifted) == cert.spectrum;
    let support_consistent = shape_ok && fourier::support_size(&cert.spectrum) == cert.support;
    let bound_consistent = cert.m == p.deg2() && cert.bound == support_bound(n, cert.m);
    let support_ok = cert.support <= cert.bound;
    let structural_ok = cert.support <= structural_bound(n, cert.m);
    let power_bound_ok = cert.support <= power_bound(n, cert.m);
    let (rank_check, rank) = if check_rank && shape_ok && n <= fourier::EXPLICIT_N_MAX {
        let matrix = fourier::xor_matrix(&cert.lifted).expect("gated above");
        let r = linalg::exact_rank(&matrix);
        (Some(BigUint::from(r) == cert.support), Some(r))
    } else {
        (None, None)
    };
    VerifyReport {
        sign_ok,
        support_ok,
        structural_ok,
        power_bound_ok,
        levels_consistent,
        spectrum_consistent,
        support_consistent,
        bound_consistent,
        rank_check,
        rank,
    }
}

impl LiftCertificate {
    pub fn to_record(&self, p: &Predicate) -> CertificateRecord {
        CertificateRecord {
            predicate: p.clone(),
            n: self.n,
            m: self.m,
            q1_coeffs: self.q1.coeffs().to_vec(),
            q2_coeffs: self.q2.coeffs().to_vec(),
            levels: self.lifted.levels.clone(),
            spectrum_levels: self.spectrum.coeffs.clone(),
            support: self.support.clone(),
            bound: self.bound.clone(),
        }
    }
}

impl CertificateRecord {
    /// Rebuilds the certificate exactly as stored; nothing is recomputed,
    /// so a tampered record fails [`verify_lift`].
    pub fn into_parts(self) -> Result<(LiftCertificate, Predicate)> {
        if self.levels.len() != self.n + 1 || self.spectrum_levels.len() != self.n + 1 {
            return Err(Error::LengthMismatch { expected: self.n + 1, got: self.levels.len() });
        }
        let cert = LiftCertificate {
            n: self.n,
            m: self.m,
            q1: UniPoly::new(self.q1_coeffs),
            q2: UniPoly::new(self.q2_coeffs),
            lifted: SymmetricFn { n: self.n, levels: self.levels },
            spectrum: LevelSpectrum { n: self.n, coeffs: self.spectrum_levels },
            support: self.support,
            bound: self.bound,
        };
        Ok((cert, self.predicate))
    }
}
