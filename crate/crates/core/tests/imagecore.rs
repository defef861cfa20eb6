use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use texfx::image::psnr;
use texfx::{build_pyramid, downsample, patch_ssd, PatchCoord, RasterImage};

fn random_image(w: usize, h: usize, ch: usize, seed: u64) -> RasterImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    RasterImage::from_fn(w, h, ch, |_, _, _| rng.gen())
}

/// Area average by direct 2-D overlap of every input pixel with the output
/// footprint.
fn area_oracle(img: &RasterImage, ow: usize, oh: usize) -> Vec<f64> {
    let (w, h) = img.dims();
    let (sx, sy) = (w as f64 / ow as f64, h as f64 / oh as f64);
    let mut out = Vec::new();
    for oy in 0..oh {
        for ox in 0..ow {
            let (x0, x1, y0, y1) = (ox as f64 * sx, (ox + 1) as f64 * sx, oy as f64 * sy, (oy + 1) as f64 * sy);
            for c in 0..img.channels() {
                let (mut acc, mut area) = (0.0, 0.0);
                for y in 0..h {
                    for x in 0..w {
                        let ax = (x1.min(x as f64 + 1.0) - x0.max(x as f64)).max(0.0);
                        let ay = (y1.min(y as f64 + 1.0) - y0.max(y as f64)).max(0.0);
                        acc += ax * ay * img.get(x, y, c);
                        area += ax * ay;
                    }
                }
                out.push(acc / area);
            }
        }
    }
    out
}

fn ssd_oracle(a: &RasterImage, (ax, ay): (usize, usize), b: &RasterImage, (bx, by): (usize, usize), m: usize) -> f64 {
    let half = m / 2;
    let mut sum = 0.0;
    for dy in 0..m {
        for dx in 0..m {
            for c in 0..a.channels() {
                let d = a.get(ax + dx - half, ay + dy - half, c) - b.get(bx + dx - half, by + dy - half, c);
                sum += d * d;
            }
        }
    }
    sum / (m * m * a.channels()) as f64
}

#[test]
fn random_patches_match_loop_oracle() {
    let a = random_image(12, 12, 3, 1);
    let b = random_image(12, 12, 3, 2);
    for (pa, pb) in [((2, 2), (9, 9)), ((5, 7), (3, 4)), ((9, 2), (2, 9))] {
        let got = patch_ssd(&a, PatchCoord::new(pa.0, pa.1), &b, PatchCoord::new(pb.0, pb.1), 5).unwrap();
        assert!((got - ssd_oracle(&a, pa, &b, pb, 5)).abs() < 1e-9);
    }
}

#[test]
fn downsample_matches_area_oracle() {
    let img = random_image(23, 17, 3, 5);
    for factor in [2.0, 1.5, 3.7] {
        let out = downsample(&img, factor).unwrap();
        let expected = area_oracle(&img, out.width(), out.height());
        for (g, e) in out.data().iter().zip(&expected) {
            assert!((g - e).abs() < 1e-12, "factor {factor}: {g} vs {e}");
        }
    }
}

#[test]
fn pyramid_levels_are_area_resamples_of_the_input() {
    let img = random_image(40, 30, 1, 8);
    let pyr = build_pyramid(&img, 3, 10).unwrap();
    assert_eq!(pyr.finest(), &img);
    for level in &pyr.levels[..2] {
        let expected = area_oracle(&img, level.width(), level.height());
        for (g, e) in level.data().iter().zip(&expected) {
            assert!((g - e).abs() < 1e-12);
        }
    }
}

#[test]
fn psnr_of_known_error() {
    let a = RasterImage::filled(8, 8, 3, 0.5);
    let b = RasterImage::filled(8, 8, 3, 0.6);
    let expected = 10.0 * (1.0f64 / 0.01).log10();
    assert!((psnr(&a, &b).unwrap() - expected).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ssd_is_zero_on_itself_and_symmetric(
        seed in any::<u64>(),
        m in prop::sample::select(vec![1usize, 3, 5, 7]),
        ax in 0usize..16, ay in 0usize..16, bx in 0usize..16, by in 0usize..16,
    ) {
        let a = random_image(16, 16, 3, seed);
        let b = random_image(16, 16, 3, seed ^ 1);
        let (pa, pb) = (PatchCoord::new(ax, ay), PatchCoord::new(bx, by));
        prop_assert_eq!(patch_ssd(&a, pa, &a, pa, m).unwrap(), 0.0);
        prop_assert_eq!(patch_ssd(&a, pa, &b, pb, m).unwrap(), patch_ssd(&b, pb, &a, pa, m).unwrap());
    }

    #[test]
    fn downsampled_constants_are_exact(
        v in 0.0f64..=1.0, w in 4usize..40, h in 4usize..40, factor in 1.01f64..3.9,
    ) {
        let img = RasterImage::filled(w, h, 3, v);
        if let Ok(out) = downsample(&img, factor) {
            prop_assert!(out.data().iter().all(|&x| x == v));
        }
    }
}
