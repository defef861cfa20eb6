use proptest::prelude::*;
use texfx::geometry::*;
use texfx::synthetic::bar;

fn brute_nearest(w: usize, points: &[usize], i: usize) -> f64 {
    let (x, y) = ((i % w) as f64, (i / w) as f64);
    points
        .iter()
        .map(|&p| ((p % w) as f64 - x).hypot((p / w) as f64 - y))
        .fold(f64::INFINITY, f64::min)
}

fn bar_field(w: usize) -> (TextMask, SkeletonContour, DistanceField) {
    let mask = binarize(&bar(w), 0.5).unwrap();
    let sc = skeletonize(&mask);
    let df = DistanceField::from_mask(&mask, DEFAULT_OUTLIER_FRACTION).unwrap();
    (mask, sc, df)
}

#[test]
fn edt_matches_brute_force_on_sixteen_square() {
    let points = [3, 17, 40, 77, 100, 129, 180, 201, 230, 255];
    let map = distance_to_set(16, 16, &points).unwrap();
    for i in 0..256 {
        assert_eq!(map.dist[i], brute_nearest(16, &points, i));
        assert_eq!(brute_nearest(16, &[map.nearest[i]], i), map.dist[i]);
    }
}

#[test]
fn disk_skeleton_collapses_to_the_center() {
    let (c, r) = (25.0, 20.0);
    let mask = TextMask::from_fn(51, 51, |x, y| (x as f64 - c).hypot(y as f64 - c) <= r).unwrap();
    let sc = skeletonize(&mask);
    assert!(!sc.skeleton.is_empty());
    for &i in &sc.skeleton {
        let (x, y) = (i % 51, i / 51);
        assert!(x.abs_diff(25) <= 1 && y.abs_diff(25) <= 1, "skeleton pixel ({x}, {y})");
    }
}

#[test]
fn bars_normalize_contour_to_one_and_skeleton_to_zero() {
    for w in [3, 6, 12] {
        let (_, sc, df) = bar_field(w);
        let contour_mean = sc.contour.iter().map(|&i| df.dist[i]).sum::<f64>() / sc.contour.len() as f64;
        assert!((0.95..=1.05).contains(&contour_mean), "w={w}: contour mean {contour_mean}");
        let skel_max = sc.skeleton.iter().map(|&i| df.dist[i]).fold(0.0, f64::max);
        assert!(skel_max <= 0.1, "w={w}: skeleton max {skel_max}");
    }
}

/// `bar(w)` rasterized at `k` times the resolution: rows `|y - k c| <= k w`,
/// columns `k x0 ..= k x1`, so pixel `p` of the original corresponds to `k p`.
fn scaled_bar(w: usize, k: usize) -> DistanceField {
    let img = bar(w);
    let (width, height) = img.dims();
    let (c, x0, x1) = (5 * w, 4 * w, 20 * w - 1);
    let mask = TextMask::from_fn(k * width, k * height, |x, y| {
        y.abs_diff(k * c) <= k * w && (k * x0..=k * x1).contains(&x)
    })
    .unwrap();
    DistanceField::from_mask(&mask, DEFAULT_OUTLIER_FRACTION).unwrap()
}

#[test]
fn doubling_resolution_preserves_normalized_distance() {
    for w in [3, 6, 12] {
        let small = scaled_bar(w, 1);
        assert_eq!(small.dist, bar_field(w).2.dist);
        let large = scaled_bar(w, 2);
        let mut worst: f64 = 0.0;
        for y in 0..small.height {
            for x in 0..small.width {
                worst = worst.max((small.at(x, y) - large.at(2 * x, 2 * y)).abs());
            }
        }
        assert!(worst < 0.05, "w={w}: max change {worst}");
    }
}

#[test]
fn background_grows_by_mean_radius() {
    let (mask, _, df) = bar_field(4);
    let to_contour = distance_to_set(df.width, df.height, &skeletonize(&mask).contour).unwrap();
    for i in (0..df.dist.len()).filter(|&i| !mask.as_slice()[i]) {
        let expected = 1.0 + to_contour.dist[i] / df.regression.mean_radius;
        assert!((df.dist[i] - expected).abs() < 1e-12);
    }
}

#[test]
fn nicked_contour_pixel_is_lifted_to_the_floor() {
    let w = 5;
    let img = bar(w);
    let (width, height) = img.dims();
    let nick = (4 * w + 8 * w) + 4 * w * width; // top edge, middle of the bar
    let mask = TextMask::from_fn(width, height, |x, y| img.get(x, y, 0) > 0.5 && y * width + x != nick).unwrap();
    let sc = skeletonize(&mask);
    let tf = GeometryTransforms::compute(&sc).unwrap();
    let raw: Vec<f64> = (0..width * height).map(|i| brute_nearest(width, &sc.skeleton, i)).collect();
    assert_eq!(raw, tf.to_skeleton.dist);

    // Closed-form least squares of sorted radii against 1-based rank.
    let mut radii: Vec<f64> = sc.contour.iter().map(|&i| raw[i]).collect();
    radii.sort_by(f64::total_cmp);
    let n = radii.len() as f64;
    let (sx, sy) = ((1..=radii.len()).map(|r| r as f64).sum::<f64>(), radii.iter().sum::<f64>());
    let sxy: f64 = radii.iter().enumerate().map(|(i, r)| (i + 1) as f64 * r).sum();
    let sxx: f64 = (1..=radii.len()).map(|r| (r * r) as f64).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let floor = DEFAULT_OUTLIER_FRACTION * slope * n + intercept;

    let reg = fit_width_regression(&sc, &raw).unwrap();
    assert!((reg.slope - slope).abs() < 1e-9 && (reg.intercept - intercept).abs() < 1e-9);

    // The pixel exposed by the nick sits one row inside the original edge.
    let exposed = nick + width;
    assert!(sc.contour.contains(&exposed));
    assert!(raw[exposed] < floor);
    let lifted = corrected_radius(exposed, &reg, &raw, DEFAULT_OUTLIER_FRACTION);
    assert!((lifted - floor).abs() < 1e-9);
    let clean_edge = exposed - width + 3;
    assert!(raw[clean_edge] >= floor);
    assert_eq!(corrected_radius(clean_edge, &reg, &raw, DEFAULT_OUTLIER_FRACTION), raw[clean_edge]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn edt_equals_brute_force(
        w in 1usize..=32, h in 1usize..=32, raw in prop::collection::vec(any::<u32>(), 1..24),
    ) {
        let points: Vec<usize> = raw.iter().map(|&r| r as usize % (w * h)).collect();
        let map = distance_to_set(w, h, &points).unwrap();
        for i in 0..w * h {
            prop_assert_eq!(map.dist[i], brute_nearest(w, &points, i));
        }
    }

    #[test]
    fn binning_is_monotone(a in 0.0f64..5.0, b in 0.0f64..5.0, max in 0.5f64..4.0) {
        let edges = texfx::geometry::distance::uniform_edges(max);
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(bin_with_edges(&edges, lo) <= bin_with_edges(&edges, hi));
        prop_assert!(bin_with_edges(&edges, hi) < DISTANCE_BINS);
    }
}
