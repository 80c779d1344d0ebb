use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use signrank::bits::BitString;
use signrank::bounds;
use signrank::fourier::{self, SymmetricFn};
use signrank::linalg;
use signrank::lp::{self, LpOutcome};
use signrank::predicate::Predicate;
use signrank::protocol;
use signrank::rational::{self, int, rat, Rational};
use signrank::reduction;
use signrank::signrep;

fn predicate(max_n: usize) -> impl Strategy<Value = Predicate> {
    prop::collection::vec(any::<bool>(), 2..=max_n + 1)
        .prop_map(|bits| Predicate::new(&bits.iter().map(|&b| if b { 1i8 } else { -1 }).collect::<Vec<_>>()).unwrap())
}

fn rational_value() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=9).prop_map(|(a, b)| rat(a, b))
}

fn symmetric(max_n: usize) -> impl Strategy<Value = SymmetricFn> {
    prop::collection::vec(rational_value(), 2..=max_n + 1).prop_map(|v| SymmetricFn::new(v).unwrap())
}

fn embeddable() -> impl Strategy<Value = Predicate> {
    prop_oneof![Just(64usize), Just(128)].prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n + 1)
            .prop_map(|bits| Predicate::new(&bits.iter().map(|&b| if b { 1i8 } else { -1 }).collect::<Vec<_>>()).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn reverse_keeps_degrees(p in predicate(40)) {
        let r = p.reverse();
        prop_assert_eq!(r.deg(), p.deg());
        prop_assert_eq!(r.deg2(), p.deg2());
        prop_assert_eq!(r.reverse(), p);
    }

    #[test]
    fn restriction_never_raises_degrees(p in predicate(40), a in 0usize..40, len in 2usize..42) {
        if let Ok(q) = p.restrict(a, len) {
            prop_assert!(q.deg() <= p.deg());
            prop_assert!(q.deg2() <= p.deg2());
        }
    }

    #[test]
    fn text_round_trip(p in predicate(60)) {
        let text = p.to_string();
        prop_assert_eq!(text.parse::<Predicate>().unwrap(), p.clone());
        let spaced: String = text.chars().flat_map(|c| [c, ' ']).collect();
        prop_assert_eq!(spaced.parse::<Predicate>().unwrap(), p);
    }

    #[test]
    fn deg2_bounded_by_twice_deg(p in predicate(60)) {
        prop_assert!(p.deg2() <= 2 * p.deg());
        prop_assert!(p.deg2() <= p.n() - 1);
    }

    #[test]
    fn normalization_keeps_half_the_flips(p in predicate(80)) {
        let (q, start) = p.normalize_pow2();
        prop_assert!(q.n().is_power_of_two());
        prop_assert!(q.n() * 2 > p.n());
        prop_assert_eq!(q.clone(), p.restrict(start, q.n() + 1).unwrap());
        prop_assert!(2 * q.deg2() >= p.deg2());
    }

    #[test]
    fn parseval(f in symmetric(14)) {
        // Σ_S f̂(S)² = 2^{−n} Σ_x f(x)²
        let b = signrank::binomial::Binomials::new(f.n);
        let energy = f.levels.iter().enumerate().fold(Rational::zero(), |acc, (w, v)| {
            acc + v * v * Rational::from_integer(b.get(f.n, w).clone())
        }) / int(1i64 << f.n);
        prop_assert_eq!(fourier::symmetric_spectrum(&f).parseval_sum(), energy);
    }

    #[test]
    fn predicate_spectrum_has_unit_energy(p in predicate(30)) {
        let spec = fourier::symmetric_spectrum(&SymmetricFn::from_predicate(&p));
        prop_assert!(spec.parseval_sum().is_one());
        prop_assert!(bounds::forster_lower(&spec).unwrap() >= int(1));
    }

    #[test]
    fn krawtchouk_recurrence_matches_sum(n in 0usize..24) {
        let table = fourier::krawtchouk_table(n);
        for k in 0..=n {
            for w in 0..=n {
                prop_assert_eq!(&table[k][w], &fourier::krawtchouk_eval(n, k, w).unwrap());
            }
        }
    }

    #[test]
    fn level_transform_matches_wht(f in symmetric(7)) {
        let full = fourier::wht_full(&f.to_values().unwrap()).unwrap();
        prop_assert_eq!(full.level_collapse().unwrap(), fourier::symmetric_spectrum(&f));
    }

    #[test]
    fn min_sign_poly_is_minimal_witness(p in predicate(24)) {
        let q = signrep::min_sign_poly(&p);
        prop_assert_eq!(q.degree(), Some(p.deg()));
        prop_assert!(signrep::check_sign_match(&q, &p));
    }

    #[test]
    fn split_halves_have_small_degree(p in predicate(40)) {
        let halves = signrep::even_odd_split(&p);
        prop_assert!(halves.even.deg() <= p.deg2());
        prop_assert!(halves.odd.deg() <= p.deg2());
    }

    #[test]
    fn lift_sign_and_sparsity(p in predicate(40)) {
        let cert = signrep::lift(&p);
        for (w, v) in cert.lifted.levels.iter().enumerate() {
            prop_assert_eq!(rational::signum(v), p.at(w));
        }
        let m = p.deg2();
        for k in cert.spectrum.nonzero_levels() {
            prop_assert!(k <= m || k + m >= p.n());
        }
        prop_assert!(cert.support <= signrep::structural_bound(p.n(), m));
        prop_assert!(cert.support <= signrep::power_bound(p.n(), m));
        let report = signrep::verify_lift(&cert, &p, false);
        prop_assert!(report.sign_ok && report.structural_ok && report.levels_consistent);
    }

    #[test]
    fn certificate_json_round_trip(p in predicate(20)) {
        let cert = signrep::lift(&p);
        let text = serde_json::to_string(&cert.to_record(&p)).unwrap();
        let record: signrep::CertificateRecord = serde_json::from_str(&text).unwrap();
        let (back, q) = record.into_parts().unwrap();
        prop_assert_eq!(back, cert);
        prop_assert_eq!(q, p);
    }

    #[test]
    fn lp_witness_satisfies_constraints(p in predicate(9), extra in 0usize..3) {
        let d = (p.deg() + extra).min(p.n());
        let q = signrep::lp_min_degree(&p, d).unwrap();
        prop_assert!(q.is_some_and(|q| signrep::check_sign_match(&q, &p)));
    }

    #[test]
    fn lp_points_are_feasible(
        rows in prop::collection::vec(prop::collection::vec(-4i64..=4, 3), 1..6),
        rhs in prop::collection::vec(-6i64..=6, 6),
    ) {
        let a: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect();
        let b: Vec<Rational> = rhs[..a.len()].iter().map(|&v| int(v)).collect();
        if let LpOutcome::Feasible(x) = lp::feasible_point(&a, &b) {
            for (row, bi) in a.iter().zip(&b) {
                let lhs = row.iter().zip(&x).fold(Rational::zero(), |acc, (c, v)| acc + c * v);
                prop_assert!(lhs >= *bi);
            }
        }
    }

    #[test]
    fn exact_rank_matches_elimination(
        left in prop::collection::vec(prop::collection::vec(-3i64..=3, 3), 6),
        right in prop::collection::vec(prop::collection::vec(-3i64..=3, 7), 3),
        rank in 0usize..=3,
    ) {
        // product of 6×rank and rank×7 factors
        let m: Vec<Vec<Rational>> = (0..6)
            .map(|i| (0..7).map(|j| int((0..rank).map(|t| left[i][t] * right[t][j]).sum())).collect())
            .collect();
        let r = linalg::exact_rank(&m);
        prop_assert!(r <= rank);
        prop_assert_eq!(r, linalg::rank_by_elimination(&m));
    }

    #[test]
    fn bias_is_bounded(
        a in prop::collection::vec(rational_value(), 1..8),
        b in prop::collection::vec(rational_value(), 8),
    ) {
        let b = &b[..a.len()];
        if let Ok(bias) = protocol::exact_bias(&a, b) {
            prop_assert!(bias.abs() <= int(1));
        }
    }

    #[test]
    fn cost_matches_bound_report(p in predicate(9)) {
        let cert = signrep::lift(&p);
        let f = protocol::factorize(&cert, 9).unwrap();
        prop_assert_eq!(BigUint::from(f.d()), cert.support.clone());
        prop_assert_eq!(f.cost(), bounds::paturi_simon_cost(&cert.support).unwrap());
        prop_assert_eq!(bounds::xor_bounds(&p).protocol_cost_bits, Some(f.cost()));
    }

    #[test]
    fn simulation_is_seed_stable(p in predicate(5), x in 0u64..32, y in 0u64..32, seed in any::<u64>()) {
        let n = p.n();
        let mask = (1u64 << n) - 1;
        let f = protocol::factorize(&signrep::lift(&p), 6).unwrap();
        let a = f.simulate(x & mask, y & mask, 2000, seed, 1).unwrap();
        let b = f.simulate(x & mask, y & mask, 2000, seed, 1).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn bitstring_weights(x in any::<u64>(), y in any::<u64>(), len in 1usize..=64) {
        let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
        let (bx, by) = (BitString::from_mask(x & mask, len), BitString::from_mask(y & mask, len));
        prop_assert_eq!(bx.weight(), (x & mask).count_ones() as usize);
        prop_assert_eq!(bx.and_weight(&by), (x & y & mask).count_ones() as usize);
        prop_assert_eq!(bx.xor_weight(&by), ((x ^ y) & mask).count_ones() as usize);
        prop_assert_eq!(bx.complement().weight(), len - bx.weight());
        prop_assert_eq!(bx.to_string().parse::<BitString>().unwrap(), bx);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn embedding_identities(p in embeddable(), xs in any::<u64>(), ys in any::<u64>()) {
        let params = reduction::derive_params(&p).unwrap();
        let h = params.half_q();
        let (xi, yi) = (BitString::from_mask(xs % (1 << h), h), BitString::from_mask(ys % (1 << h), h));
        let (x, y) = reduction::embed(&params, &xi, &yi).unwrap();
        prop_assert_eq!(x.weight(), params.r);
        prop_assert_eq!(y.weight(), params.t);
        prop_assert_eq!(x.and_weight(&y), params.k + xi.and_weight(&yi));
        let g = reduction::reduced_predicate(&params, &p).unwrap().g;
        prop_assert_eq!(params.effective(&p).at(x.xor_weight(&y)), g.at(xi.and_weight(&yi)));
        prop_assert!(reduction::degree_transfer(&p, &g).ok);
    }

    #[test]
    fn reduced_predicate_of_reverse(p in embeddable()) {
        // the record is well-formed for both orientations
        for q in [p.clone(), p.reverse()] {
            let rec = reduction::reduce(&q).unwrap();
            prop_assert!(rec.verified);
            prop_assert_eq!(rec.g.n(), rec.q / 2);
        }
    }
}
