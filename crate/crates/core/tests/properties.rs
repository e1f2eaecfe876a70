use proptest::prelude::*;

use spherecode::block_codes::{bch_code, reed_muller_code, repetition_code};
use spherecode::bounds::{
    achievable_max_cosine, gv_condition_exact, gv_largest_dmin, message_bits, prop1_cosine_bound,
    rankin_converse,
};
use spherecode::optimize::{loss_lse, optimize_prototypes, project_rows_to_sphere, LossKind, OptimizerConfig};
use spherecode::sphere_map::{
    codebook_from_code, onehot_codebook, random_codebook, separation_stats, simplex_codebook,
    Codebook, DEFAULT_BINS,
};

fn assert_codebook_invariants(cb: &Codebook) {
    for row in cb.rows() {
        let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() <= 1e-12, "row norm {norm}");
    }
    let s = separation_stats(cb, DEFAULT_BINS);
    let k = cb.num_classes();
    assert_eq!(s.pairs as usize, k * (k - 1) / 2);
    assert!(-1.0 <= s.gram_offdiag_min);
    assert!(s.gram_offdiag_min <= s.mean_cosine + 1e-15);
    assert!(s.mean_cosine <= s.max_cosine + 1e-15);
    assert!(s.max_cosine <= 1.0);
    assert!(s.max_cosine >= rankin_converse(k) - 1e-9);
    assert_eq!(s.histogram.iter().map(|b| b.count).sum::<u64>(), s.pairs);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_codebooks_respect_invariants(k in 2usize..40, n in 1usize..20, seed in any::<u64>()) {
        assert_codebook_invariants(&random_codebook(k, n, seed).unwrap());
    }

    #[test]
    fn closed_forms_respect_invariants(k in 2usize..60) {
        assert_codebook_invariants(&simplex_codebook(k).unwrap());
        assert_codebook_invariants(&onehot_codebook(k).unwrap());
    }

    #[test]
    fn code_codebooks_stay_under_certificate(
        m in 3u32..7,
        r in 0u32..3,
        k in 2usize..64,
        seed in proptest::option::of(any::<u64>()),
    ) {
        let code = reed_muller_code(r.min(m), m).unwrap();
        prop_assume!(code.num_codewords() >= k as u128 && code.dimension() <= 20);
        let cb = codebook_from_code(&code, k, seed).unwrap();
        assert_codebook_invariants(&cb);
        let bound = prop1_cosine_bound(&code).unwrap();
        prop_assert!(separation_stats(&cb, DEFAULT_BINS).max_cosine <= bound + 1e-12);
    }

    #[test]
    fn bch_codebooks_stay_under_certificate(delta in 2usize..15, k in 2usize..32) {
        let code = bch_code(4, delta).unwrap();
        prop_assume!(code.num_codewords() >= k as u128);
        let cb = codebook_from_code(&code, k, None).unwrap();
        let bound = prop1_cosine_bound(&code).unwrap();
        prop_assert!(separation_stats(&cb, DEFAULT_BINS).max_cosine <= bound + 1e-12);
    }

    #[test]
    fn gv_is_tight_against_exact_condition(n in 1usize..1100, k_frac in 0.0f64..1.0) {
        let k = 1 + ((n - 1) as f64 * k_frac) as usize;
        let d = gv_largest_dmin(n, k).unwrap();
        prop_assert!(gv_condition_exact(n, k, d));
        if d < n {
            prop_assert!(!gv_condition_exact(n, k, d + 1));
        }
    }

    #[test]
    fn sandwich_holds(k in 2usize..2048, extra in 0usize..600) {
        let n = message_bits(k) + extra;
        prop_assert!(rankin_converse(k) <= achievable_max_cosine(n, k).unwrap());
    }

    #[test]
    fn projection_is_idempotent(rows in proptest::collection::vec(-10.0f64..10.0, 12)) {
        let mut once = rows.clone();
        prop_assume!(project_rows_to_sphere(&mut once, 3).is_ok());
        let mut twice = once.clone();
        project_rows_to_sphere(&mut twice, 3).unwrap();
        for (a, b) in once.iter().zip(&twice) {
            prop_assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn lse_sandwich(k in 2usize..12, n in 1usize..8, seed in any::<u64>(), t in 0.1f64..500.0) {
        let cb = random_codebook(k, n, seed).unwrap();
        let e = loss_lse(cb.as_flat(), k, n, t);
        let gap = ((k * (k - 1)) as f64).ln() / t;
        prop_assert!(e.max_cosine <= e.value + 1e-12);
        prop_assert!(e.value <= e.max_cosine + gap + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn optimizer_trace_invariants(
        k in 2usize..10,
        n in 1usize..6,
        epochs in 1usize..40,
        seed in any::<u64>(),
        lse in any::<bool>(),
    ) {
        let loss = if lse { LossKind::Lse } else { LossKind::Avg };
        let cfg = OptimizerConfig { loss, epochs, seed, ..Default::default() };
        let (cb, trace) = optimize_prototypes(k, n, &cfg).unwrap();
        assert_codebook_invariants(&cb);
        prop_assert_eq!(trace.epochs.len(), epochs);
        let gap = ((k * (k - 1)) as f64).ln();
        let mut best = f64::INFINITY;
        for rec in &trace.epochs {
            best = best.min(rec.max_cosine);
            prop_assert_eq!(rec.best_max_cosine, best);
            if let Some(t) = rec.temperature {
                prop_assert!(t > 0.0);
                prop_assert!(rec.max_cosine <= rec.loss + 1e-12);
                prop_assert!(rec.loss <= rec.max_cosine + gap / t + 1e-12);
            }
        }
        prop_assert!(trace.best_max_cosine <= best);
        let (again, trace_again) = optimize_prototypes(k, n, &cfg).unwrap();
        prop_assert_eq!(cb, again);
        prop_assert_eq!(trace, trace_again);
    }
}

#[test]
fn repetition_codes_are_antipodal() {
    for n in 1..=16 {
        let cb = codebook_from_code(&repetition_code(n).unwrap(), 2, None).unwrap();
        assert_eq!(separation_stats(&cb, DEFAULT_BINS).max_cosine, -1.0);
    }
}
