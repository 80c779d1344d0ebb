//! Exact matrix rank over the rationals.
//!
//! [`rank_by_elimination`] is textbook Gaussian elimination over `Q`.
//! [`exact_rank`] clears denominators and computes ranks modulo a sequence
//! of 62-bit primes. Each modular rank is a lower bound on the rational
//! rank; once the product of the primes exceeds the Hadamard bound on every
//! `(r+1) × (r+1)` minor, no such minor can be nonzero over `Z` while
//! vanishing modulo all of them, so the largest modular rank `r` is exact.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::rational::Rational;

/// Rank by fraction-based Gaussian elimination. Cubic in rationals; meant
/// for small matrices and as a reference.
pub fn rank_by_elimination(matrix: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = matrix.to_vec();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, pivot);
        let inv = m[rank][c].recip();
        for k in c..cols {
            m[rank][k] = &m[rank][k] * &inv;
        }
        let (top, bottom) = m.split_at_mut(rank + 1);
        let prow = &top[rank];
        for row in bottom.iter_mut() {
            if row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for k in c..cols {
                if !prow[k].is_zero() {
                    row[k] -= &f * &prow[k];
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Exact rank via certified multi-modular elimination.
pub fn exact_rank(matrix: &[Vec<Rational>]) -> usize {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return 0;
    }
    let ints = IntMatrix::from_rationals(matrix);
    let full = rows.min(cols);

    // squared column norms, largest first, for the Hadamard bound
    let mut norms: Vec<BigUint> = ints.column_norms_sq();
    norms.sort_unstable_by(|a, b| b.cmp(a));
    // bound_sq[k] = product of the k largest squared norms
    let mut bound_sq = Vec::with_capacity(full + 1);
    bound_sq.push(BigUint::one());
    for k in 0..full {
        let next = &bound_sq[k] * &norms[k];
        bound_sq.push(next);
    }

    let mut rank = 0usize;
    let mut modulus_sq = BigUint::one();
    for p in Primes::new() {
        let r = ints.rank_mod(p);
        rank = rank.max(r);
        if rank == full {
            return rank;
        }
        modulus_sq *= BigUint::from(p) * BigUint::from(p);
        if modulus_sq > bound_sq[rank + 1] {
            return rank;
        }
    }
    unreachable!("prime sequence is unbounded")
}

/// Denominator-free copy of a rational matrix.
struct IntMatrix {
    rows: usize,
    cols: usize,
    small: Option<Vec<i128>>,
    big: Vec<BigInt>,
}

impl IntMatrix {
    fn from_rationals(m: &[Vec<Rational>]) -> Self {
        let rows = m.len();
        let cols = m[0].len();
        let lcm = m.iter().flatten().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let big: Vec<BigInt> = m.iter().flatten().map(|v| v.numer() * (&lcm / v.denom())).collect();
        let small = big.iter().map(|v| v.to_i128()).collect::<Option<Vec<_>>>();
        IntMatrix { rows, cols, small, big }
    }

    fn column_norms_sq(&self) -> Vec<BigUint> {
        let mut out = vec![BigUint::zero(); self.cols];
        for (i, v) in self.big.iter().enumerate() {
            let mag = v.magnitude();
            out[i % self.cols] += mag * mag;
        }
        out
    }

    fn rank_mod(&self, p: u64) -> usize {
        let field = Montgomery::new(p);
        let mut data: Vec<u64> = match &self.small {
            Some(vals) => vals.iter().map(|&v| field.to_mont(v.rem_euclid(p as i128) as u64)).collect(),
            None => {
                let pb = BigInt::from(p);
                self.big
                    .iter()
                    .map(|v| field.to_mont(v.mod_floor(&pb).to_u64().expect("reduced below p")))
                    .collect()
            }
        };
        eliminate_mod(&mut data, self.rows, self.cols, &field)
    }
}

/// Row echelon rank of a dense row-major matrix in Montgomery form.
fn eliminate_mod(data: &mut [u64], rows: usize, cols: usize, f: &Montgomery) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| data[r * cols + c] != 0) else { continue };
        if pivot != rank {
            for k in 0..cols {
                data.swap(rank * cols + k, pivot * cols + k);
            }
        }
        let (top, bottom) = data.split_at_mut((rank + 1) * cols);
        let prow = &top[rank * cols..];
        let piv = prow[c];
        for row in bottom.chunks_exact_mut(cols) {
            let lead = row[c];
            if lead == 0 {
                continue;
            }
            // row ← piv·row − lead·prow; scaling by the nonzero pivot keeps the rank
            for k in c..cols {
                let a = f.mul(row[k], piv);
                let b = f.mul(lead, prow[k]);
                row[k] = f.sub(a, b);
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Montgomery arithmetic modulo an odd `p < 2^62`, with `R = 2^64`.
struct Montgomery {
    p: u64,
    neg_inv: u64,
    r2: u64,
}

impl Montgomery {
    fn new(p: u64) -> Self {
        debug_assert!(p % 2 == 1 && p < 1 << 62);
        // Newton iteration for p^{-1} mod 2^64
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r2 = ((1u128 << 64) % p as u128 * ((1u128 << 64) % p as u128) % p as u128) as u64;
        Montgomery { p, neg_inv: inv.wrapping_neg(), r2 }
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.neg_inv);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    fn to_mont(&self, a: u64) -> u64 {
        self.mul(a, self.r2)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'bases: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Primes below `2^62`, descending.
struct Primes {
    next: u64,
}

impl Primes {
    fn new() -> Self {
        Primes { next: (1u64 << 62) - 1 }
    }
}

impl Iterator for Primes {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        while self.next > 3 {
            let c = self.next;
            self.next -= 2;
            if is_prime(c) {
                return Some(c);
            }
        }
        None
    }
}
