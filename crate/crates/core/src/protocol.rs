//! Private-coin protocol induced by a low-rank sign representation.
//!
//! Alice holds `a_x`, Bob holds `b_y`, and `⟨a_x, b_y⟩` has the sign of the
//! target. Alice samples a coordinate `i` with probability
//! `|a_x[i]| / ‖a_x‖₁` and sends `i` together with `sign(a_x[i])`. Bob
//! answers `sign(a_x[i])·sign(b_y[i])` with probability
//! `|b_y[i]| / ‖b_y‖_∞` and a fair coin otherwise. The expected output is
//! `⟨a_x, b_y⟩ / (‖a_x‖₁ ‖b_y‖_∞)`.

use num_bigint::BigUint;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::signrep::LiftCertificate;

/// Largest `n` for which both parties' tables are built.
pub const FACTORIZE_N_MAX: usize = 12;

/// Rank-`d` factorisation `p(x ⊕ y) = Σ_S p̂(S) χ_S(x) χ_S(y)` over the
/// support of the spectrum. Rows are produced on demand from the shared
/// coefficient list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub n: usize,
    /// `(|S|, mask of S)` for each coordinate.
    pub support_index: Vec<(usize, u64)>,
    /// `p̂(S)` for each coordinate.
    pub coeffs: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasReport {
    #[serde(with = "rational::serde_rational")]
    pub exact_bias: Rational,
    #[serde(with = "rational::serde_rational")]
    pub correct_prob: Rational,
    pub empirical_freq: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
}

fn chi(s: u64, x: u64) -> bool {
    (s & x).count_ones().is_multiple_of(2)
}

/// Builds the factorisation of a certificate's lifted function.
pub fn factorize(cert: &LiftCertificate, n_max: usize) -> Result<Factorization> {
    if n_max > FACTORIZE_N_MAX {
        return Err(Error::Gate { what: "factorize limit", n: n_max, max: FACTORIZE_N_MAX });
    }
    if cert.n > n_max {
        return Err(Error::Gate { what: "factorize", n: cert.n, max: n_max });
    }
    let n = cert.n;
    let mut support_index = Vec::new();
    let mut coeffs = Vec::new();
    for s in 0..1u64 << n {
        let k = s.count_ones() as usize;
        let c = &cert.spectrum.coeffs[k];
        if !c.is_zero() {
            support_index.push((k, s));
            coeffs.push(c.clone());
        }
    }
    if BigUint::from(coeffs.len()) != cert.support {
        return Err(Error::Internal(format!(
            "factorisation has {} coordinates but the certificate claims {}",
            coeffs.len(),
            cert.support
        )));
    }
    Ok(Factorization { n, support_index, coeffs })
}

impl Factorization {
    pub fn d(&self) -> usize {
        self.coeffs.len()
    }

    fn check_input(&self, x: u64) -> Result<()> {
        if self.n < 64 && x >> self.n != 0 {
            return Err(Error::OutOfRange(format!("input {x:#b} has more than {} bits", self.n)));
        }
        Ok(())
    }

    /// `a_x[S] = p̂(S) χ_S(x)`.
    pub fn alice(&self, x: u64) -> Result<Vec<Rational>> {
        self.check_input(x)?;
        Ok(self
            .support_index
            .iter()
            .zip(&self.coeffs)
            .map(|(&(_, s), c)| if chi(s, x) { c.clone() } else { -c })
            .collect())
    }

    /// `b_y[S] = χ_S(y)`.
    pub fn bob(&self, y: u64) -> Result<Vec<Rational>> {
        self.check_input(y)?;
        Ok(self.support_index.iter().map(|&(_, s)| rational::int(if chi(s, y) { 1 } else { -1 })).collect())
    }

    /// `⟨a_x, b_y⟩` without materialising the rows.
    pub fn inner(&self, x: u64, y: u64) -> Result<Rational> {
        self.check_input(x)?;
        self.check_input(y)?;
        Ok(self.support_index.iter().zip(&self.coeffs).fold(Rational::zero(), |acc, (&(_, s), c)| {
            if chi(s, x) == chi(s, y) {
                acc + c
            } else {
                acc - c
            }
        }))
    }

    /// `‖a_x‖₁`; the same for every `x`.
    pub fn alice_l1(&self) -> Rational {
        self.coeffs.iter().map(|c| c.abs()).fold(Rational::zero(), |a, b| a + b)
    }

    /// Expected protocol output on `(x, y)`; `‖b_y‖_∞ = 1`.
    pub fn exact_bias(&self, x: u64, y: u64) -> Result<Rational> {
        let l1 = self.alice_l1();
        if l1.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(self.inner(x, y)? / l1)
    }

    pub fn simulate(&self, x: u64, y: u64, trials: u64, seed: u64, workers: usize) -> Result<BiasReport> {
        simulate(&self.alice(x)?, &self.bob(y)?, trials, seed, workers)
    }

    pub fn cost(&self) -> u64 {
        cost(self.d())
    }
}

/// `⟨a, b⟩ / (‖a‖₁ ‖b‖_∞)`.
pub fn exact_bias(a: &[Rational], b: &[Rational]) -> Result<Rational> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { expected: a.len(), got: b.len() });
    }
    let l1 = a.iter().map(|v| v.abs()).fold(Rational::zero(), |x, y| x + y);
    let linf = b.iter().map(|v| v.abs()).max().unwrap_or_else(Rational::zero);
    if l1.is_zero() || linf.is_zero() {
        return Err(Error::ZeroVector);
    }
    let dot = a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y);
    Ok(dot / (l1 * linf))
}

/// Runs the protocol `trials` times. Worker `w` draws from the ChaCha8
/// stream `w` of `seed` and handles an equal share of the trials, so the
/// result depends only on `(seed, trials, workers)`.
pub fn simulate(a: &[Rational], b: &[Rational], trials: u64, seed: u64, workers: usize) -> Result<BiasReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let bias = exact_bias(a, b)?;
    let target = rational::signum(&bias);
    if target == 0 {
        return Err(Error::InvalidParameter("inner product is zero; not a sign representation".into()));
    }
    let workers = workers.max(1);
    let weights: Vec<f64> = a.iter().map(|v| rational::to_f64(&v.abs())).collect();
    let sampler = WeightedIndex::new(&weights).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let linf = b.iter().map(|v| v.abs()).max().expect("nonempty");
    let keep: Vec<f64> = b.iter().map(|v| rational::to_f64(&(v.abs() / &linf))).collect();
    let product: Vec<i8> = a.iter().zip(b).map(|(x, y)| rational::signum(x) * rational::signum(y)).collect();

    let run = |worker: usize| -> u64 {
        let share = trials / workers as u64 + u64::from((worker as u64) < trials % workers as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(worker as u64);
        let mut agree = 0u64;
        for _ in 0..share {
            let i = sampler.sample(&mut rng);
            let out = if rng.random::<f64>() < keep[i] {
                product[i]
            } else if rng.random::<bool>() {
                1
            } else {
                -1
            };
            agree += u64::from(out == target);
        }
        agree
    };
    let agree: u64 = if workers == 1 { run(0) } else { (0..workers).into_par_iter().map(run).sum() };

    let correct_prob = (Rational::from_integer(1.into()) + bias.abs()) / Rational::from_integer(2.into());
    let p = rational::to_f64(&correct_prob);
    Ok(BiasReport {
        exact_bias: bias,
        correct_prob,
        empirical_freq: agree as f64 / trials as f64,
        std_error: (p * (1.0 - p) / trials as f64).sqrt(),
        trials,
        seed,
        workers,
    })
}

/// `⌈log₂ d⌉ + 2` bits: the coordinate, Alice's sign, and Bob's answer.
pub fn cost(d: usize) -> u64 {
    rational::ceil_log2(&BigUint::from(d.max(1))) + 2
}

/// Number of workers requested through `SIGNRANK_THREADS`, if set.
pub fn workers_from_env() -> Option<usize> {
    std::env::var("SIGNRANK_THREADS").ok()?.trim().parse::<usize>().ok().filter(|&w| w > 0)
}

impl BiasReport {
    /// `|empirical − correct_prob|` in units of the binomial standard error.
    pub fn deviation_sigmas(&self) -> f64 {
        let p = self.correct_prob.to_f64().unwrap_or(f64::NAN);
        if self.std_error == 0.0 {
            if (self.empirical_freq - p).abs() == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.empirical_freq - p).abs() / self.std_error
        }
    }
}
