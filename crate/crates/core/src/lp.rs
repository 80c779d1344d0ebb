//! Exact feasibility of `A x ≥ b` over the rationals with free `x`.
//!
//! Dense tableau, phase-one simplex with Bland's rule, so the search
//! terminates and every decision is exact.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Feasible(Vec<Rational>),
    Infeasible,
}

/// Finds `x` with `A x ≥ b` (row-wise), or proves none exists.
pub fn feasible_point(a: &[Vec<Rational>], b: &[Rational]) -> LpOutcome {
    assert_eq!(a.len(), b.len(), "one right-hand side per row");
    let m = a.len();
    let nv = a.first().map_or(0, Vec::len);
    if m == 0 {
        return LpOutcome::Feasible(vec![Rational::zero(); nv]);
    }
    // columns: u (nv), v (nv), surplus (m), artificial (m), rhs
    // row i: A_i u − A_i v − s_i + art_i = b_i, negated first if b_i < 0
    let art0 = 2 * nv + m;
    let width = art0 + m + 1;
    let rhs = width - 1;
    let mut t = vec![vec![Rational::zero(); width]; m];
    for i in 0..m {
        let neg = b[i].is_negative();
        let flip = |v: &Rational| if neg { -v.clone() } else { v.clone() };
        for j in 0..nv {
            t[i][j] = flip(&a[i][j]);
            t[i][nv + j] = -flip(&a[i][j]);
        }
        t[i][2 * nv + i] = flip(&Rational::from_integer((-1).into()));
        t[i][art0 + i] = Rational::from_integer(1.into());
        t[i][rhs] = b[i].abs();
    }
    let mut basis: Vec<usize> = (art0..art0 + m).collect();

    // reduced costs of min Σ art: c_j − Σ_i t[i][j] over artificial rows
    let mut obj = vec![Rational::zero(); width];
    for row in &t {
        for j in 0..width {
            if j < art0 || j == rhs {
                obj[j] -= &row[j];
            }
        }
    }

    loop {
        let Some(enter) = (0..art0).find(|&j| obj[j].is_negative()) else { break };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if !t[i][enter].is_positive() {
                continue;
            }
            let ratio = &t[i][rhs] / &t[i][enter];
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // phase one is bounded below by zero, so a leaving row always exists
        let (pr, _) = leave.expect("phase-one objective is bounded");
        pivot(&mut t, &mut obj, pr, enter);
        basis[pr] = enter;
    }

    if !obj[rhs].is_zero() {
        return LpOutcome::Infeasible;
    }
    let mut z = vec![Rational::zero(); art0];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < art0 {
            z[bv] = t[i][rhs].clone();
        }
    }
    LpOutcome::Feasible((0..nv).map(|j| &z[j] - &z[nv + j]).collect())
}

fn pivot(t: &mut [Vec<Rational>], obj: &mut [Rational], pr: usize, pc: usize) {
    let width = obj.len();
    let inv = t[pr][pc].recip();
    for v in t[pr].iter_mut() {
        if !v.is_zero() {
            *v *= &inv;
        }
    }
    let prow = t[pr].clone();
    let eliminate = |row: &mut [Rational]| {
        let f = row[pc].clone();
        if f.is_zero() {
            return;
        }
        for j in 0..width {
            if !prow[j].is_zero() {
                row[j] -= &f * &prow[j];
            }
        }
    };
    for (i, row) in t.iter_mut().enumerate() {
        if i != pr {
            eliminate(row);
        }
    }
    eliminate(obj);
}
