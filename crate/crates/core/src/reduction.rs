//! Embedding a symmetric AND function `G(|x' ∧ y'|)` on `q/2` bits into
//! the symmetric XOR function `D(|x ⊕ y|)` on `n` bits.
//!
//! Inputs are padded to fixed weights `|x| = r`, `|y| = t` with `k` forced
//! common ones, after which `|x ⊕ y| = r + t − 2(k + |x' ∧ y'|)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::predicate::Predicate;

/// Inner cubes of dimension up to this are swept exhaustively.
pub const EXHAUSTIVE_HALF_Q_MAX: usize = 10;
/// Pair count and seed of the sampled sweep used beyond that.
pub const SAMPLED_PAIRS: usize = 10_000;
pub const SAMPLE_SEED: u64 = 0x005e_ed0f_a11d;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingParams {
    pub n: usize,
    pub q: usize,
    pub r: usize,
    pub t: usize,
    pub s: usize,
    pub k: usize,
    pub reversed: bool,
}

/// The AND-side predicate `G` on `{0..q/2}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedPredicate {
    pub g: Predicate,
}

/// Tallies from a sweep over inner input pairs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingCheck {
    pub pairs: usize,
    pub exhaustive: bool,
    pub weight_failures: usize,
    pub overlap_failures: usize,
    pub xor_identity_failures: usize,
    pub value_failures: usize,
    pub capacity_failures: usize,
}

impl EmbeddingCheck {
    pub fn ok(&self) -> bool {
        self.weight_failures == 0
            && self.overlap_failures == 0
            && self.xor_identity_failures == 0
            && self.value_failures == 0
            && self.capacity_failures == 0
    }

    fn merge(mut self, o: Self) -> Self {
        self.pairs += o.pairs;
        self.weight_failures += o.weight_failures;
        self.overlap_failures += o.overlap_failures;
        self.xor_identity_failures += o.xor_identity_failures;
        self.value_failures += o.value_failures;
        self.capacity_failures += o.capacity_failures;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeTransfer {
    pub count: usize,
    pub ok: bool,
}

/// JSON record emitted by the `reduce` command.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionRecord {
    pub n: usize,
    pub q: usize,
    pub r: usize,
    pub t: usize,
    pub s: usize,
    pub k: usize,
    pub reversed: bool,
    #[serde(rename = "G")]
    pub g: Predicate,
    #[serde(rename = "deg_G")]
    pub deg_g: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub window_flips: usize,
    pub degree_transfer_ok: bool,
    pub check: EmbeddingCheck,
    pub verified: bool,
}

impl EmbeddingParams {
    pub fn half_q(&self) -> usize {
        self.q / 2
    }

    /// `k + q/2 ≤ r` and `r + t − k ≤ n − q/2`.
    pub fn feasible(&self) -> bool {
        self.k + self.half_q() <= self.r && self.r + self.t <= self.n - self.half_q() + self.k
    }

    /// The predicate the embedding evaluates: `D` or its reverse.
    pub fn effective(&self, p: &Predicate) -> Predicate {
        if self.reversed {
            p.reverse()
        } else {
            p.clone()
        }
    }
}

/// Derives `q = n/32`, `r = (n − q)/2`, the shift and parity, and
/// `k = (n − 2q − s)/2`.
pub fn derive_params(p: &Predicate) -> Result<EmbeddingParams> {
    let n = p.n();
    let sel = p.select_shift()?;
    let q = n / 32;
    let r = (n - q) / 2;
    let t = if sel.odd_parity { r + 1 } else { r };
    let k = (n - 2 * q - sel.s) / 2;
    let params = EmbeddingParams { n, q, r, t, s: sel.s, k, reversed: sel.reversed };
    if !params.feasible() {
        return Err(Error::Internal(format!("embedding parameters infeasible: {params:?}")));
    }
    Ok(params)
}

/// `G(i) = D(r + t − (n − 2q − s) − 2i)` on `{0..q/2}`, where `D` is the
/// effective predicate.
pub fn reduced_predicate(params: &EmbeddingParams, p: &Predicate) -> Result<ReducedPredicate> {
    if p.n() != params.n {
        return Err(Error::LengthMismatch { expected: params.n, got: p.n() });
    }
    let d = params.effective(p);
    let base = (params.r + params.t + 2 * params.q + params.s) as i64 - params.n as i64;
    let signs = (0..=params.half_q())
        .map(|i| {
            let idx = base - 2 * i as i64;
            if idx < 0 || idx > params.n as i64 {
                return Err(Error::OutOfRange(format!("G({i}) reads D({idx}) with n = {}", params.n)));
            }
            Ok(d.at(idx as usize))
        })
        .collect::<Result<Vec<i8>>>()?;
    Ok(ReducedPredicate { g: Predicate::new(&signs)? })
}

/// Pads `(x', y')` to `n` bits. Layout: `x'`/`y'` in the first `q/2`
/// positions, then `k` shared ones, then Alice's block of width `r − k`
/// (filled from the left), then Bob's block of width `t − k`, then zeros.
/// Bob's block starts at a fixed offset, so each party pads using only its
/// own input.
pub fn embed(params: &EmbeddingParams, x_in: &BitString, y_in: &BitString) -> Result<(BitString, BitString)> {
    let h = params.half_q();
    if x_in.len() != h || y_in.len() != h {
        return Err(Error::LengthMismatch { expected: h, got: x_in.len().max(y_in.len()) });
    }
    let (n, r, t, k) = (params.n, params.r, params.t, params.k);
    let capacity = |what: &str| Error::Internal(format!("{what} does not fit with {params:?}"));
    let wx = x_in.weight();
    let wy = y_in.weight();
    let fill_x = r.checked_sub(k + wx).ok_or_else(|| capacity("Alice's padding"))?;
    let fill_y = t.checked_sub(k + wy).ok_or_else(|| capacity("Bob's padding"))?;
    let alice_start = h + k;
    let bob_start = alice_start + r.checked_sub(k).ok_or_else(|| capacity("Alice's block"))?;
    if bob_start + (t - k) > n || alice_start > n {
        return Err(capacity("Bob's block"));
    }
    let mut x = BitString::zeros(n);
    let mut y = BitString::zeros(n);
    for i in 0..h {
        x.set(i, x_in.get(i));
        y.set(i, y_in.get(i));
    }
    x.set_range(h, h + k, true);
    y.set_range(h, h + k, true);
    x.set_range(alice_start, alice_start + fill_x, true);
    y.set_range(bob_start, bob_start + fill_y, true);
    Ok((x, y))
}

fn check_pair(params: &EmbeddingParams, d: &Predicate, g: &Predicate, x_in: &BitString, y_in: &BitString) -> EmbeddingCheck {
    let mut c = EmbeddingCheck { pairs: 1, ..Default::default() };
    let Ok((x, y)) = embed(params, x_in, y_in) else {
        c.capacity_failures = 1;
        return c;
    };
    let inner = x_in.and_weight(y_in);
    let overlap = x.and_weight(&y);
    let xor = x.xor_weight(&y);
    if x.weight() != params.r || y.weight() != params.t {
        c.weight_failures = 1;
    }
    if overlap != params.k + inner {
        c.overlap_failures = 1;
    }
    if xor as i64 != (params.r + params.t) as i64 - 2 * overlap as i64 {
        c.xor_identity_failures = 1;
    }
    if d.at(xor) != g.at(inner) {
        c.value_failures = 1;
    }
    c
}

/// Sweeps all inner pairs (or a seeded sample when `q/2` is large) and
/// tallies every identity the embedding relies on.
pub fn check_embedding(params: &EmbeddingParams, p: &Predicate) -> Result<EmbeddingCheck> {
    let g = reduced_predicate(params, p)?.g;
    let d = params.effective(p);
    let h = params.half_q();
    if h <= EXHAUSTIVE_HALF_Q_MAX {
        let side = 1u64 << h;
        let check = (0..side * side)
            .into_par_iter()
            .map(|pair| {
                let x_in = BitString::from_mask(pair / side, h);
                let y_in = BitString::from_mask(pair % side, h);
                check_pair(params, &d, &g, &x_in, &y_in)
            })
            .reduce(EmbeddingCheck::default, EmbeddingCheck::merge);
        Ok(EmbeddingCheck { exhaustive: true, ..check })
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
        let random_bits = |rng: &mut ChaCha8Rng| {
            let mut b = BitString::zeros(h);
            for i in 0..h {
                b.set(i, rng.random::<bool>());
            }
            b
        };
        let mut check = EmbeddingCheck::default();
        for _ in 0..SAMPLED_PAIRS {
            let x_in = random_bits(&mut rng);
            let y_in = random_bits(&mut rng);
            check = check.merge(check_pair(params, &d, &g, &x_in, &y_in));
        }
        Ok(check)
    }
}

/// `true` iff `D_eff(|x ⊕ y|) = G(|x' ∧ y'|)` and the weight identities hold
/// on every swept pair.
pub fn verify_embedding(params: &EmbeddingParams, p: &Predicate) -> bool {
    check_embedding(params, p).is_ok_and(|c| c.ok())
}

/// `deg(G)` and whether it reaches `⌊deg₂(D)/128⌋`, with `deg₂` taken on
/// the power-of-two normalisation of `D`.
pub fn degree_transfer(p: &Predicate, g: &Predicate) -> DegreeTransfer {
    let m = p.normalize_pow2().0.deg2();
    let count = g.deg();
    DegreeTransfer { count, ok: count >= m / 128 }
}

/// `D(|x ∧ y|)`.
pub fn and_function_eval(p: &Predicate, x: &BitString, y: &BitString) -> Result<i8> {
    if x.len() != p.n() || y.len() != p.n() {
        return Err(Error::LengthMismatch { expected: p.n(), got: if x.len() != p.n() { x.len() } else { y.len() } });
    }
    Ok(p.at(x.and_weight(y)))
}

/// Runs the whole reduction and collects the `reduce` record.
pub fn reduce(p: &Predicate) -> Result<ReductionRecord> {
    let params = derive_params(p)?;
    let sel = p.select_shift()?;
    let g = reduced_predicate(&params, p)?.g;
    let check = check_embedding(&params, p)?;
    let transfer = degree_transfer(p, &g);
    Ok(ReductionRecord {
        n: params.n,
        q: params.q,
        r: params.r,
        t: params.t,
        s: params.s,
        k: params.k,
        reversed: params.reversed,
        deg_g: g.deg(),
        g,
        m: p.deg2(),
        window_flips: sel.window_flips,
        degree_transfer_ok: transfer.ok,
        verified: check.ok(),
        check,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predicate::{family, Family};

    #[test]
    fn params_n64() {
        let p = family(&Family::Parity, 64).unwrap();
        let params = derive_params(&p).unwrap();
        assert_eq!((params.q, params.r, params.s, params.k, params.t), (2, 31, 0, 30, 31));
        assert!(params.k < 31 && 31 + 31 - 30 <= 63);
        assert!(params.feasible());
    }

    #[test]
    fn params_n128_last_window() {
        // distance-two flips at 61 and 62, both inside the last window [60, 64)
        let p = family(&Family::Threshold { t: 63 }, 128).unwrap();
        assert_eq!(p.degree_profile().flips2.into_iter().collect::<Vec<_>>(), vec![61, 62]);
        let params = derive_params(&p).unwrap();
        assert_eq!((params.q, params.r), (4, 62));
        assert_eq!(params.s, 60);
        assert_eq!(params.k, 30);
        assert!(!params.reversed);
        assert!(params.feasible());
    }

    #[test]
    fn rejects_bad_n() {
        assert!(matches!(derive_params(&family(&Family::Parity, 60).unwrap()), Err(Error::NotEmbeddable(60))));
        assert!(derive_params(&family(&Family::Parity, 32).unwrap()).is_err());
    }

    #[test]
    fn feasibility_over_all_shifts() {
        for n in [64usize, 128, 256, 512, 1024] {
            let q = n / 32;
            let r = (n - q) / 2;
            for j in 0..16 {
                for t in [r, r + 1] {
                    let s = j * q;
                    let params = EmbeddingParams { n, q, r, t, s, k: (n - 2 * q - s) / 2, reversed: false };
                    assert!(params.feasible(), "{params:?}");
                }
            }
        }
    }

    #[test]
    fn reduced_predicate_cases() {
        let p = Predicate::random(64, &mut ChaCha8Rng::seed_from_u64(2));
        let params = EmbeddingParams { n: 64, q: 2, r: 31, t: 31, s: 0, k: 30, reversed: false };
        let g = reduced_predicate(&params, &p).unwrap().g;
        assert_eq!(g.signs(), &[p.at(2), p.at(0)]);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let p = Predicate::random(128, &mut rng);
            let params = derive_params(&p).unwrap();
            let d = params.effective(&p);
            let g = reduced_predicate(&params, &p).unwrap().g;
            let off = if params.t == params.r { 0 } else { 1 };
            for i in 0..=params.half_q() {
                assert_eq!(g.at(i), d.at(params.s + params.q - 2 * i + off));
            }
            assert_eq!(g.deg(), p.select_shift().unwrap().window_flips);
        }
    }

    #[test]
    fn embed_weights_and_overlap() {
        for n in [64usize, 128] {
            let p = Predicate::random(n, &mut ChaCha8Rng::seed_from_u64(n as u64));
            let params = derive_params(&p).unwrap();
            let h = params.half_q();
            for a in 0..1u64 << h {
                for b in 0..1u64 << h {
                    let (xi, yi) = (BitString::from_mask(a, h), BitString::from_mask(b, h));
                    let (x, y) = embed(&params, &xi, &yi).unwrap();
                    assert_eq!((x.weight(), y.weight()), (params.r, params.t));
                    assert_eq!(x.and_weight(&y), params.k + xi.and_weight(&yi));
                }
            }
        }
        let params = derive_params(&family(&Family::Parity, 256).unwrap()).unwrap();
        let ones = BitString::ones(params.half_q());
        let (x, y) = embed(&params, &ones, &ones).unwrap();
        assert_eq!(x.and_weight(&y), params.k + params.half_q());
        assert!(embed(&params, &BitString::ones(3), &ones).is_err());
    }

    #[test]
    fn verify_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let p = Predicate::random(64, &mut rng);
            let params = derive_params(&p).unwrap();
            let c = check_embedding(&params, &p).unwrap();
            assert!(c.ok() && c.exhaustive && c.pairs == 4);
        }
        let p = Predicate::random(256, &mut rng);
        let params = derive_params(&p).unwrap();
        let c = check_embedding(&params, &p).unwrap();
        assert!(c.ok());
        assert_eq!(c.pairs, 256);
    }

    #[test]
    fn corrupted_k_breaks_identity() {
        // D alternating in blocks of two: every shift of the XOR weight by 2 flips the sign
        let p = Predicate::from_fn(64, |i| (i / 2) % 2 == 0).unwrap();
        let mut params = derive_params(&p).unwrap();
        assert!(verify_embedding(&params, &p));
        params.k += 1;
        assert!(!verify_embedding(&params, &p));
        params.k -= 2;
        assert!(!verify_embedding(&params, &p));
    }

    #[test]
    fn sampled_sweep_beyond_gate() {
        // n = 1024 gives q/2 = 16 > 10
        let p = Predicate::random(1024, &mut ChaCha8Rng::seed_from_u64(77));
        let params = derive_params(&p).unwrap();
        let c = check_embedding(&params, &p).unwrap();
        assert!(!c.exhaustive);
        assert_eq!(c.pairs, SAMPLED_PAIRS);
        assert!(c.ok());
    }

    #[test]
    fn degree_transfer_examples() {
        let par = family(&Family::Parity, 64).unwrap();
        let rec = reduce(&par).unwrap();
        assert_eq!(rec.deg_g, 0);
        assert!(rec.verified && rec.degree_transfer_ok);

        let th = family(&Family::Threshold { t: 20 }, 128).unwrap();
        let params = derive_params(&th).unwrap();
        let g = reduced_predicate(&params, &th).unwrap().g;
        let dt = degree_transfer(&th, &g);
        assert!(dt.ok);
        assert_eq!(dt.count, 1);

        // blocks of two: deg₂ = n − 1
        let blocks = Predicate::from_fn(256, |i| (i / 2) % 2 == 0).unwrap();
        assert!(blocks.deg2() >= 128);
        let params = derive_params(&blocks).unwrap();
        let g = reduced_predicate(&params, &blocks).unwrap().g;
        let dt = degree_transfer(&blocks, &g);
        assert!(dt.ok && dt.count >= 1);
    }

    #[test]
    fn and_eval() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in 1..=16 {
            let p = Predicate::random(n, &mut rng);
            let zero = BitString::zeros(n);
            let ones = BitString::ones(n);
            assert_eq!(and_function_eval(&p, &zero, &ones).unwrap(), p.at(0));
            assert_eq!(and_function_eval(&p, &ones, &ones).unwrap(), p.at(n));
            for _ in 0..20 {
                let a: u64 = rng.random_range(0..1 << n);
                let b: u64 = rng.random_range(0..1 << n);
                let got = and_function_eval(&p, &BitString::from_mask(a, n), &BitString::from_mask(b, n)).unwrap();
                assert_eq!(got, p.at((a & b).count_ones() as usize));
            }
        }
        let p = family(&Family::Parity, 4).unwrap();
        assert!(and_function_eval(&p, &BitString::zeros(3), &BitString::zeros(4)).is_err());
    }
}
