use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use texfx::geometry::{DistanceField, WidthRegression, DISTANCE_BINS};
use texfx::scale::*;
use texfx::RasterImage;

mod common;
use common::*;

#[test]
fn best_match_equals_exhaustive_scan() {
    let (text, style) = (noise(24, 24, 1, 1), noise(24, 24, 3, 2));
    let stack = ScaleStack::new(&text, &style, 2, 2.0, 5).unwrap();
    for l in 1..=2 {
        let (t, s) = stack.level(l);
        for q in [(2, 2), (11, 7), (21, 21), (0, 23), (12, 12)] {
            let got = best_match_at_scale(&stack, l, q).map(|m| (m.x, m.y, m.cost));
            let c = stack.map_to_level(l, q.0, q.1);
            assert_eq!(got, oracle_match(t, s, 5, c));
        }
    }
}

#[test]
fn periodic_tiling_matches_exactly_one_period_away() {
    let tile = noise(16, 16, 3, 5);
    let style = RasterImage::from_fn(48, 48, 3, |x, y, c| tile.get(x % 16, y % 16, c));
    let text = RasterImage::from_fn(48, 48, 1, |x, y, _| tile.get(x % 16, y % 16, 0));
    let stack = ScaleStack::new(&text, &style, 1, 2.0, 5).unwrap();
    for q in [(20, 20), (24, 30), (30, 17)] {
        let sm = best_match_at_scale(&stack, 1, q).unwrap();
        assert_eq!(sm.cost, 0.0);
        assert_eq!((sm.x.abs_diff(q.0) % 16, sm.y.abs_diff(q.1) % 16), (0, 0));
    }
}

#[test]
fn constant_pair_matches_at_zero_everywhere() {
    let stack = ScaleStack::new(
        &RasterImage::filled(20, 20, 1, 0.3),
        &RasterImage::filled(20, 20, 3, 0.6),
        2,
        2.0,
        3,
    )
    .unwrap();
    for q in [(0, 0), (10, 10), (19, 4)] {
        assert_eq!(best_match_at_scale(&stack, 1, q).unwrap().cost, 0.0);
    }
}

#[test]
fn detection_matches_algorithm_one_on_seeded_pairs() {
    let mut seen = std::collections::BTreeSet::new();
    for seed in 0..10 {
        let (text, style) = mixed_pair(32, seed);
        for (m, levels) in [(5, 2), (3, 3), (5, 3)] {
            let stack = ScaleStack::new(&text, &style, levels, 2.0, m).unwrap();
            let sm = detect_optimal_scales(&stack, 0.3, SearchStrategy::Exhaustive);
            let oracle = algorithm_one(&text, &style, levels, m, 0.3);
            assert_eq!(sm.scale, oracle, "seed {seed}, m={m}, L={levels}");
            seen.extend(sm.scale.iter().copied());
        }
    }
    assert!(seen.len() >= 3, "seeded pairs only produced scales {seen:?}");
}

#[test]
fn raising_omega_never_lowers_a_scale() {
    for seed in 0..3 {
        let (text, style) = mixed_pair(32, 20 + seed);
        let stack = ScaleStack::new(&text, &style, 3, 2.0, 5).unwrap();
        let mut prev: Option<ScaleMap> = None;
        for omega in [0.05, 0.1, 0.2, 0.3, 0.45, 0.7] {
            let sm = detect_optimal_scales(&stack, omega, SearchStrategy::Exhaustive);
            if let Some(p) = &prev {
                assert!(sm.scale.iter().zip(&p.scale).all(|(a, b)| a >= b));
            }
            prev = Some(sm);
        }
    }
}

#[test]
fn flat_left_half_retires_at_the_roughest_scale() {
    let tex = block_noise(64, 4, 3, 9);
    let style = RasterImage::from_fn(64, 64, 3, |x, y, c| if x < 32 { 0.4 } else { tex.get(x, y, c) });
    let text = RasterImage::from_fn(64, 64, 1, |x, _, _| (x >= 32) as u8 as f64);
    let stack = ScaleStack::new(&text, &style, 3, 2.0, 5).unwrap();
    let sm = detect_optimal_scales(&stack, 0.3, SearchStrategy::Exhaustive);
    assert_eq!(sm.scale, algorithm_one(&text, &style, 3, 5, 0.3));
    // Away from the seam, where the roughest-scale patch stays on one side.
    for y in 0..64 {
        for x in 0..20 {
            assert_eq!(sm.at(x, y), 3, "({x}, {y})");
        }
        for x in 44..64 {
            assert!(sm.at(x, y) < 3, "({x}, {y})");
        }
    }
}

#[test]
fn iid_noise_flattens_under_downsampling() {
    let (text, style) = (noise(128, 128, 1, 3), noise(128, 128, 3, 4));
    let full = ScaleStack::new(&text, &style, 5, 2.0, 5).unwrap();
    let (_, s1) = full.level(1);
    let mut sum = 0.0;
    for y in 2..126 {
        for x in 2..126 {
            sum += patch_sigma(s1, (x, y), 5);
        }
    }
    let mean_sigma = sum / (124.0 * 124.0);
    assert!((mean_sigma - (1.0f64 / 12.0).sqrt() / 2.0).abs() < 0.01, "{mean_sigma}");
    // The area prefilter averages the grain away at the roughest scale.
    let sm = detect_optimal_scales(&full, 0.3, SearchStrategy::for_size(128, 128, 1));
    assert!(sm.scale.iter().all(|&s| s == 5));
}

#[test]
fn noise_at_the_examined_scale_keeps_the_finest_scale() {
    // Two-pixel blocks are iid noise again at scale 2.
    let (text, style) = (block_noise(128, 2, 1, 5), block_noise(128, 2, 3, 6));
    let stack = ScaleStack::new(&text, &style, 2, 2.0, 5).unwrap();
    let sm = detect_optimal_scales(&stack, 0.3, SearchStrategy::for_size(128, 128, 2));
    assert!(sm.scale.iter().all(|&s| s == 1));
}

fn field_with_bins(w: usize, h: usize, bins: Vec<u8>) -> DistanceField {
    DistanceField {
        width: w,
        height: h,
        dist: vec![0.0; w * h],
        regression: WidthRegression {
            slope: 0.0,
            intercept: 1.0,
            contour_count: 2,
            mean_radius: 1.0,
        },
        bin_edges: (0..=DISTANCE_BINS).map(|i| i as f64).collect(),
        bins,
    }
}

#[test]
fn checkerboard_histogram_splits_evenly() {
    let checker = |i: usize| (i % 10 + i / 10) % 2 == 0;
    let sm = ScaleMap {
        width: 10,
        height: 10,
        levels: 5,
        scale: (0..100).map(|i| if checker(i) { 2 } else { 4 }).collect(),
    };
    let df = field_with_bins(10, 10, (0..100).map(|i| if checker(i) { 7 } else { 60 }).collect());
    let hist = scale_distance_histogram(&sm, &df).unwrap();
    assert_eq!((hist.get(2, 7), hist.get(4, 60), hist.total()), (50, 50, 100));

    let concentrated = ScaleMap { scale: vec![1; 100], ..sm.clone() };
    let hist = scale_distance_histogram(&concentrated, &field_with_bins(10, 10, vec![0; 100])).unwrap();
    assert_eq!((hist.get(1, 0), hist.total()), (100, 100));
    assert!(scale_distance_histogram(&sm, &field_with_bins(5, 20, vec![0; 100])).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn histogram_totals_the_domain(
        w in 1usize..20, h in 1usize..20, levels in 1usize..6, seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sm = ScaleMap { width: w, height: h, levels, scale: (0..w * h).map(|_| rng.gen_range(1..=levels) as u8).collect() };
        let df = field_with_bins(w, h, (0..w * h).map(|_| rng.gen_range(0..DISTANCE_BINS) as u8).collect());
        prop_assert_eq!(scale_distance_histogram(&sm, &df).unwrap().total(), (w * h) as u64);
    }

    #[test]
    fn posterior_matches_direct_normalization(
        levels in 1usize..=6,
        seed in any::<u64>(),
        density in 0.0f64..1.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts: Vec<u64> = (0..levels * DISTANCE_BINS)
            .map(|_| if rng.gen::<f64>() < density { rng.gen_range(1..50) } else { 0 })
            .collect();
        if counts.iter().all(|&c| c == 0) {
            let i = rng.gen_range(0..counts.len());
            counts[i] = 1;
        }
        let hist = ScaleHistogram::new(levels, counts.clone()).unwrap();
        let post = estimate_posterior(&hist).unwrap();
        let total: u64 = counts.iter().sum();
        let col = |x: usize| -> u64 { (0..levels).map(|l| counts[l * DISTANCE_BINS + x]).sum() };
        let supported: Vec<usize> = (0..DISTANCE_BINS).filter(|&x| col(x) > 0).collect();
        for x in 0..DISTANCE_BINS {
            let sum: f64 = (1..=levels).map(|l| post.posterior(l, x)).sum();
            prop_assert!((sum - 1.0).abs() <= 1e-9);
            // Nearest supported column, lower one on ties.
            let src = *supported.iter().min_by_key(|&&s| (s.abs_diff(x), s)).unwrap();
            for l in 1..=levels {
                let expected = counts[(l - 1) * DISTANCE_BINS + src] as f64 / col(src) as f64;
                prop_assert!((post.posterior(l, x) - expected).abs() <= 1e-12);
                let joint = counts[(l - 1) * DISTANCE_BINS + x] as f64 / total as f64;
                prop_assert!((post.joint(l, x) - joint).abs() <= 1e-15);
            }
        }
    }
}
