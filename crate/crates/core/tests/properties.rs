use lastseq::channel::{achievable_rate_rb, dmt_lp_oracle, dmt_mmse_dfe, dmt_optimal, dmt_variable, sample_rayleigh};
use lastseq::decoders::{brute_force_clps, residual_norm_sq, sphere_decode, stack_decode, DecoderParams};
use lastseq::frontend::DecodingProblem;
use lastseq::harness::{wilson_interval, SimConfig};
use lastseq::linalg::{complex_to_real, qr_positive};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn problem(m: usize) -> impl Strategy<Value = DecodingProblem> {
    (
        prop::collection::vec(0.3f64..2.5, m),
        prop::collection::vec(-1.5f64..1.5, m * m),
        prop::collection::vec(-6.0f64..6.0, m),
    )
        .prop_map(move |(diag, upper, y)| {
            let r = DMatrix::from_fn(m, m, |i, j| match i.cmp(&j) {
                std::cmp::Ordering::Equal => diag[i],
                std::cmp::Ordering::Less => upper[i * m + j],
                std::cmp::Ordering::Greater => 0.0,
            });
            DecodingProblem::new(r, DVector::from_vec(y)).unwrap()
        })
}

fn any_problem() -> impl Strategy<Value = DecodingProblem> {
    (1usize..=6).prop_flat_map(problem)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sphere_distance_matches_exhaustive_search(p in (1usize..=3).prop_flat_map(problem)) {
        let s = sphere_decode(&p).z_hat.unwrap();
        let b = brute_force_clps(&p, 12).unwrap();
        let (ds, db) = (residual_norm_sq(&p, &s), residual_norm_sq(&p, &b));
        prop_assert!(ds <= db + 1e-9 * (1.0 + db), "{ds} vs {db}");
        // Exhaustive search covers the box, so it cannot lose to a point inside it.
        if s.iter().all(|v| v.abs() <= 12) {
            prop_assert!((ds - db).abs() <= 1e-9 * (1.0 + db), "{ds} vs {db}");
        }
    }

    #[test]
    fn unbiased_stack_is_a_closest_point_search(p in any_problem()) {
        let st = stack_decode(&p, &DecoderParams::with_bias(0.0)).z_hat.unwrap();
        let sp = sphere_decode(&p).z_hat.unwrap();
        let (a, b) = (residual_norm_sq(&p, &st), residual_norm_sq(&p, &sp));
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b));
    }

    #[test]
    fn stack_leaf_beats_the_remaining_frontier(p in any_problem(), bias in 0.0f64..4.0) {
        let out = stack_decode(&p, &DecoderParams::with_bias(bias));
        let z = out.z_hat.as_ref().unwrap();
        let metric = out.metric.unwrap();
        prop_assert!((metric - (bias * p.dim() as f64 - residual_norm_sq(&p, z))).abs() <= 1e-8 * (1.0 + metric.abs()));
        if let Some(best) = out.frontier_best {
            prop_assert!(metric >= best);
        }
        prop_assert_eq!(out.visits_per_level.iter().sum::<u64>(), out.nodes);
        prop_assert!(out.nodes >= p.dim() as u64);
    }

    #[test]
    fn qr_is_orthogonal_with_positive_diagonal(entries in prop::collection::vec(-3.0f64..3.0, 36)) {
        let a = DMatrix::from_vec(6, 6, entries) + DMatrix::identity(6, 6) * 8.0;
        let (q, r) = qr_positive(&a).unwrap();
        let ortho = (q.transpose() * &q - DMatrix::identity(6, 6)).abs().max();
        prop_assert!(ortho <= 1e-11);
        prop_assert!((&q * &r - &a).abs().max() <= 1e-10 * a.abs().max());
        for i in 0..6 {
            prop_assert!(r[(i, i)] > 0.0);
            for j in 0..i {
                prop_assert_eq!(r[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn real_embedding_determinant(entries in prop::collection::vec(-2.0f64..2.0, 18)) {
        let a = DMatrix::from_fn(3, 3, |i, j| Complex64::new(entries[2 * (3 * i + j)], entries[2 * (3 * i + j) + 1]));
        let d = a.determinant().norm_sqr();
        let e = complex_to_real(&a).determinant();
        prop_assert!((d - e).abs() <= 1e-9 * d.max(1e-12));
    }

    #[test]
    fn rate_is_non_increasing_in_bias(seed in any::<u64>(), snr_db in 0.0f64..30.0, b1 in 0.0f64..5.0, b2 in 0.0f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = sample_rayleigh(2, 3, 10f64.powf(snr_db / 10.0), &mut rng);
        let (lo, hi) = if b1 <= b2 { (b1, b2) } else { (b2, b1) };
        prop_assert!(achievable_rate_rb(&ch, hi, 1.0) <= achievable_rate_rb(&ch, lo, 1.0) + 1e-12);
    }

    #[test]
    fn dmt_curves_are_ordered(z1 in 1.0f64..2.0, r in 0.0f64..2.0) {
        let zeta = [z1, 2.0 - z1];
        let v = dmt_variable(r, &zeta, 2, 2).unwrap();
        prop_assert!(dmt_mmse_dfe(r, 2, 2).unwrap() <= v + 1e-12);
        prop_assert!(v <= dmt_optimal(r, 2, 2).unwrap() + 1e-12);
    }

    #[test]
    fn dmt_matches_grid_lp(total in 0.5f64..=2.0, split in 0.5f64..=1.0, r in 0.0f64..=2.0) {
        let zeta = [total * split, total * (1.0 - split)];
        let v = dmt_variable(r, &zeta, 2, 2).unwrap();
        let o = dmt_lp_oracle(r, &zeta, 2, 2, 0.01);
        prop_assert!((v - o).abs() <= 1e-6 + 4.0 * 0.01, "{v} vs {o}");
    }

    #[test]
    fn wilson_interval_brackets_the_estimate(n in 1u64..1_000_000, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).round() as u64;
        let i = wilson_interval(k, n);
        prop_assert!(0.0 <= i.lo && i.lo <= i.estimate && i.estimate <= i.hi && i.hi <= 1.0);
    }

    #[test]
    fn config_toml_round_trip(m in 1usize..4, extra in 0usize..3, t in 1usize..5, seed in any::<u64>(), trials in 1u64..100_000) {
        let mut cfg = SimConfig::new(m, m + extra, t, vec![0.0, 7.5, 15.0], trials);
        cfg.seed = seed;
        cfg.code.k_info = m * t;
        let back = SimConfig::from_toml(&cfg.to_toml()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
