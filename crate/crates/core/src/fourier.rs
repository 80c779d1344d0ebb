//! Exact Fourier analysis of symmetric functions on `{0,1}^n`.
//!
//! A symmetric function is stored by its value on each Hamming level and
//! its spectrum by one coefficient per level `|S| = k`. The full
//! Walsh–Hadamard transform over all `2^n` points is kept alongside as an
//! independent check of the level-wise transform.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::binomial::Binomials;
use crate::error::{Error, Result};
use crate::predicate::Predicate;
use crate::rational::{self, Rational};

/// Largest `n` for which `2^n × 2^n` matrices are materialised.
pub const EXPLICIT_N_MAX: usize = 10;

/// A function on `{0,1}^n` that depends only on the Hamming weight.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetricFn {
    pub n: usize,
    #[serde(with = "rational::serde_rational_vec")]
    pub levels: Vec<Rational>,
}

/// Common Fourier coefficient of every `S` with `|S| = k`, for each `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSpectrum {
    pub n: usize,
    #[serde(with = "rational::serde_rational_vec")]
    pub coeffs: Vec<Rational>,
}

/// Fourier coefficients indexed by subset bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullSpectrum {
    pub n: usize,
    pub coeffs: Vec<Rational>,
}

impl SymmetricFn {
    pub fn new(levels: Vec<Rational>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::TooShort(0));
        }
        Ok(SymmetricFn { n: levels.len() - 1, levels })
    }

    /// The ±1 function `x ↦ D(|x|)`.
    pub fn from_predicate(p: &Predicate) -> Self {
        let levels = p.signs().iter().map(|&s| rational::int(s as i64)).collect();
        SymmetricFn { n: p.n(), levels }
    }

    pub fn at_mask(&self, x: u64) -> &Rational {
        &self.levels[x.count_ones() as usize]
    }

    /// Values on all `2^n` points, indexed by mask.
    pub fn to_values(&self) -> Result<Vec<Rational>> {
        if self.n > 20 {
            return Err(Error::Gate { what: "full value table", n: self.n, max: 20 });
        }
        Ok((0..1u64 << self.n).map(|x| self.at_mask(x).clone()).collect())
    }

    /// True when every level is exactly −1 or +1.
    pub fn is_sign_valued(&self) -> bool {
        self.levels.iter().all(|v| v.abs().is_one())
    }
}

impl LevelSpectrum {
    /// Levels `k` carrying a nonzero coefficient.
    pub fn nonzero_levels(&self) -> Vec<usize> {
        (0..self.coeffs.len()).filter(|&k| !self.coeffs[k].is_zero()).collect()
    }

    /// `Σ_k C(n,k) · coeffs[k]²`.
    pub fn parseval_sum(&self) -> Rational {
        let b = Binomials::new(self.n);
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * c * Rational::from_integer(b.get(self.n, k).clone()))
            .fold(Rational::zero(), |acc, v| acc + v)
    }

    /// `max_k |coeffs[k]|`.
    pub fn max_abs(&self) -> Rational {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_else(Rational::zero)
    }
}

impl FullSpectrum {
    /// Collapses to one coefficient per level; fails unless every level is
    /// constant.
    pub fn level_collapse(&self) -> Result<LevelSpectrum> {
        let mut coeffs: Vec<Option<Rational>> = vec![None; self.n + 1];
        for (s, c) in self.coeffs.iter().enumerate() {
            let k = (s as u64).count_ones() as usize;
            match &coeffs[k] {
                None => coeffs[k] = Some(c.clone()),
                Some(prev) if prev == c => {}
                Some(_) => {
                    return Err(Error::InvalidParameter(format!("spectrum is not symmetric at level {k}")))
                }
            }
        }
        Ok(LevelSpectrum { n: self.n, coeffs: coeffs.into_iter().map(|c| c.unwrap_or_default()).collect() })
    }

    pub fn nonzero_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }
}

/// `Σ_j (−1)^j C(k,j) C(n−k, w−j)`: the character sum of `χ_S` over all
/// inputs of weight `w`, for any `|S| = k`.
pub fn krawtchouk_eval(n: usize, k: usize, w: usize) -> Result<BigInt> {
    if k > n || w > n {
        return Err(Error::OutOfRange(format!("k = {k}, w = {w} with n = {n}")));
    }
    let b = Binomials::new(n);
    Ok(krawtchouk_sum(&b, n, k, w))
}

fn krawtchouk_sum(b: &Binomials, n: usize, k: usize, w: usize) -> BigInt {
    let mut acc = BigInt::zero();
    for j in 0..=k.min(w) {
        let term = b.get(k, j) * b.get(n - k, w - j);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Kernel table `table[k][w]` equal to [`krawtchouk_eval`]`(n, k, w)`,
/// filled by the three-term recurrence in `w`.
pub fn krawtchouk_table(n: usize) -> Vec<Vec<BigInt>> {
    let mut table = vec![vec![BigInt::zero(); n + 1]; n + 1];
    let nb = BigInt::from(n);
    for (k, row) in table.iter_mut().enumerate() {
        row[0] = BigInt::one();
        if n == 0 {
            continue;
        }
        let lin = &nb - BigInt::from(2 * k);
        row[1] = lin.clone();
        for w in 1..n {
            // (w+1) K_{w+1} = (n − 2k) K_w − (n − w + 1) K_{w−1}
            let next = &lin * &row[w] - BigInt::from(n - w + 1) * &row[w - 1];
            row[w + 1] = next / BigInt::from(w + 1);
        }
    }
    table
}

/// Level spectrum of a symmetric function:
/// `coeffs[k] = 2^{−n} Σ_w levels[w] · K(n, k, w)`.
pub fn symmetric_spectrum(f: &SymmetricFn) -> LevelSpectrum {
    let n = f.n;
    let table = krawtchouk_table(n);
    let scale = Rational::new(BigInt::one(), BigInt::one() << n);
    let coeffs = table
        .iter()
        .map(|row| {
            let sum = f
                .levels
                .iter()
                .zip(row)
                .filter(|(v, kw)| !v.is_zero() && !kw.is_zero())
                .fold(Rational::zero(), |acc, (v, kw)| acc + v * Rational::from_integer(kw.clone()));
            sum * &scale
        })
        .collect();
    LevelSpectrum { n, coeffs }
}

/// Normalised Walsh–Hadamard transform
/// `coeffs[S] = 2^{−n} Σ_x values[x] (−1)^{|x∧S|}` by in-place butterflies.
pub fn wht_full(values: &[Rational]) -> Result<FullSpectrum> {
    let len = values.len();
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("length {len} is not a power of two")));
    }
    let n = len.trailing_zeros() as usize;
    let mut data = values.to_vec();
    let mut half = 1;
    while half < len {
        for block in (0..len).step_by(2 * half) {
            for i in block..block + half {
                let (a, b) = (data[i].clone(), data[i + half].clone());
                data[i] = &a + &b;
                data[i + half] = a - b;
            }
        }
        half *= 2;
    }
    let scale = Rational::new(BigInt::one(), BigInt::one() << n);
    for c in &mut data {
        *c *= &scale;
    }
    Ok(FullSpectrum { n, coeffs: data })
}

/// Number of subsets `S` with a nonzero coefficient: `Σ_{k : c_k ≠ 0} C(n,k)`.
pub fn support_size(spec: &LevelSpectrum) -> BigUint {
    let b = Binomials::new(spec.n);
    spec.nonzero_levels()
        .into_iter()
        .map(|k| b.get(spec.n, k).magnitude().clone())
        .sum()
}

/// Rank of the `2^n × 2^n` matrix `p(x ⊕ y)`. The characters diagonalise
/// XOR matrices, so this is the support size of the spectrum.
pub fn xor_matrix_rank(spec: &LevelSpectrum) -> BigUint {
    support_size(spec)
}

/// Spectral norm of `p(x ⊕ y)`: its eigenvalues are `2^n · p̂(S)`.
pub fn spectral_norm_xor(spec: &LevelSpectrum) -> Rational {
    spec.max_abs() * Rational::from_integer(BigInt::one() << spec.n)
}

/// The explicit matrix `M[x][y] = f(x ⊕ y)`.
pub fn xor_matrix(f: &SymmetricFn) -> Result<Vec<Vec<Rational>>> {
    if f.n > EXPLICIT_N_MAX {
        return Err(Error::Gate { what: "explicit XOR matrix", n: f.n, max: EXPLICIT_N_MAX });
    }
    let size = 1u64 << f.n;
    Ok((0..size).map(|x| (0..size).map(|y| f.at_mask(x ^ y).clone()).collect()).collect())
}
