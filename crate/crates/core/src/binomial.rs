use num_bigint::BigInt;
use num_traits::Zero;

/// Pascal triangle of exact binomials `C(m, k)` for `m ≤ n`.
#[derive(Clone, Debug)]
pub struct Binomials {
    rows: Vec<Vec<BigInt>>,
    zero: BigInt,
}

impl Binomials {
    pub fn new(n: usize) -> Self {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let mut row = vec![BigInt::from(1u32); m + 1];
            for k in 1..m {
                row[k] = &rows[m - 1][k - 1] + &rows[m - 1][k];
            }
            rows.push(row);
        }
        Binomials { rows, zero: BigInt::zero() }
    }

    pub fn max_n(&self) -> usize {
        self.rows.len() - 1
    }

    /// `C(m, k)`, zero when `k > m`. Panics if `m` exceeds the table.
    pub fn get(&self, m: usize, k: usize) -> &BigInt {
        if k > m {
            &self.zero
        } else {
            &self.rows[m][k]
        }
    }
}
