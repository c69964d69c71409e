use super::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub(crate) fn random_gray(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Image {
    Image::new(w, h, 1, (0..w * h).map(|_| rng.gen()).collect()).unwrap()
}

pub(crate) fn random_rgb(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Image {
    Image::new(w, h, 3, (0..w * h * 3).map(|_| rng.gen()).collect()).unwrap()
}

fn random_mask(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Mask {
    loop {
        let bits: Vec<bool> = (0..w * h).map(|_| rng.gen_bool(0.5)).collect();
        let m = Mask::new(w, h, bits).unwrap();
        if !m.is_empty() {
            return m;
        }
    }
}

// ---- independent oracles, transcribed directly from the definitions ----

pub(crate) fn blur_oracle(gray: &Image, mask: &Mask) -> f64 {
    let (w, h) = (gray.width() as isize, gray.height() as isize);
    let at = |x: isize, y: isize| {
        gray.get(
            x.max(0).min(w - 1) as usize,
            y.max(0).min(h - 1) as usize,
            0,
        )
    };
    let mut responses = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if mask.get(x as usize, y as usize) {
                let lap =
                    at(x, y - 1) + at(x - 1, y) + at(x + 1, y) + at(x, y + 1) - 4.0 * at(x, y);
                responses.push(lap);
            }
        }
    }
    let n = responses.len() as f64;
    let mean = responses.iter().sum::<f64>() / n;
    responses.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / n
}

pub(crate) fn color_oracle(img: &Image, region: &Mask, skin: &Mask) -> f64 {
    let lab = crate::imgstat::rgb_to_lab(img).unwrap();
    let mean_l = |m: &Mask| {
        let mut sum = 0.0;
        let mut count = 0.0;
        for y in 0..img.height() {
            for x in 0..img.width() {
                if m.get(x, y) {
                    sum += lab[y * img.width() + x].0;
                    count += 1.0;
                }
            }
        }
        sum / count
    };
    (mean_l(region) - mean_l(skin)).abs()
}

pub(crate) fn ssim_formula_oracle(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let c1 = 0.0001;
    let c2 = 0.0009;
    let mu_a = a.iter().sum::<f64>() / n;
    let mu_b = b.iter().sum::<f64>() / n;
    let var_a = a.iter().map(|x| (x - mu_a) * (x - mu_a)).sum::<f64>() / n;
    let var_b = b.iter().map(|x| (x - mu_b) * (x - mu_b)).sum::<f64>() / n;
    let cov = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - mu_a) * (y - mu_b))
        .sum::<f64>()
        / n;
    (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)
        / ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2))
}

pub(crate) fn texture_oracle(gray: &Image, mask: &Mask) -> f64 {
    let mut glcm = vec![vec![0.0f64; 64]; 64];
    let mut total = 0.0;
    for y in 0..gray.height() {
        for x in 0..gray.width() {
            if x + 1 < gray.width() && mask.get(x, y) && mask.get(x + 1, y) {
                let a = ((gray.get(x, y, 0) * 63.999999).floor() as isize).clamp(0, 63) as usize;
                let b =
                    ((gray.get(x + 1, y, 0) * 63.999999).floor() as isize).clamp(0, 63) as usize;
                glcm[a][b] += 1.0;
                glcm[b][a] += 1.0;
                total += 2.0;
            }
        }
    }
    let mut contrast = 0.0;
    for (i, row) in glcm.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            contrast += c / total * ((i as f64 - j as f64) * (i as f64 - j as f64));
        }
    }
    contrast
}

pub(crate) fn boundary_oracle(gray: &Image, mask: &Mask) -> f64 {
    let (w, h) = (gray.width() as isize, gray.height() as isize);
    let at = |x: isize, y: isize| {
        gray.get(
            x.max(0).min(w - 1) as usize,
            y.max(0).min(h - 1) as usize,
            0,
        )
    };
    let mut sum = 0.0;
    let mut count = 0.0;
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x as usize, y as usize) {
                continue;
            }
            let gx = -at(x - 1, y - 1) + at(x + 1, y - 1) - 2.0 * at(x - 1, y)
                + 2.0 * at(x + 1, y)
                - at(x - 1, y + 1)
                + at(x + 1, y + 1);
            let gy = -at(x - 1, y - 1) - 2.0 * at(x, y - 1) - at(x + 1, y - 1)
                + at(x - 1, y + 1)
                + 2.0 * at(x, y + 1)
                + at(x + 1, y + 1);
            sum += (gx * gx + gy * gy).sqrt();
            count += 1.0;
        }
    }
    sum / count
}

// ---- blur ----

#[test]
fn blur_constant_image_is_zero() {
    let img = Image::constant(8, 8, 0.4).unwrap();
    assert_eq!(blur_indicator(&img, &Mask::full(8, 8)).unwrap(), 0.0);
}

#[test]
fn blur_single_pixel_mask_is_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let img = random_gray(&mut rng, 8, 8);
    let mask = Mask::rect(8, 8, 3, 3, 4, 4);
    assert_eq!(blur_indicator(&img, &mask).unwrap(), 0.0);
}

#[test]
fn blur_checkerboard_matches_oracle() {
    let data: Vec<f64> = (0..64)
        .map(|i| (((i / 8) + (i % 8)) % 2) as f64)
        .collect();
    let img = Image::new(8, 8, 1, data).unwrap();
    let mask = Mask::full(8, 8);
    let got = blur_indicator(&img, &mask).unwrap();
    assert!((got - blur_oracle(&img, &mask)).abs() <= 1e-9);
    assert!(got > 0.0);
}

#[test]
fn blur_random_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let img = random_gray(&mut rng, 12, 10);
    let mask = random_mask(&mut rng, 12, 10);
    let got = blur_indicator(&img, &mask).unwrap();
    assert!((got - blur_oracle(&img, &mask)).abs() <= 1e-9);
}

// ---- color ----

#[test]
fn color_same_masks_is_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let img = random_rgb(&mut rng, 8, 8);
    let m = Mask::rect(8, 8, 1, 1, 6, 6);
    assert!(color_indicator(&img, &m, &m).unwrap().abs() < 1e-12);
}

#[test]
fn color_white_region_black_skin_is_100() {
    let mut data = vec![0.0; 8 * 8 * 3];
    for y in 0..4 {
        for x in 0..8 {
            for c in 0..3 {
                data[(y * 8 + x) * 3 + c] = 1.0;
            }
        }
    }
    let img = Image::new(8, 8, 3, data).unwrap();
    let region = Mask::rect(8, 8, 0, 0, 8, 4);
    let skin = Mask::rect(8, 8, 0, 4, 8, 8);
    let score = color_indicator(&img, &region, &skin).unwrap();
    assert!((score - 100.0).abs() < 1e-6, "got {score}");
}

#[test]
fn color_random_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let img = random_rgb(&mut rng, 10, 9);
    let region = random_mask(&mut rng, 10, 9);
    let skin = random_mask(&mut rng, 10, 9);
    let got = color_indicator(&img, &region, &skin).unwrap();
    assert!((got - color_oracle(&img, &region, &skin)).abs() <= 1e-9);
}

// ---- structure ----

#[test]
fn structure_identical_masks_is_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let img = random_gray(&mut rng, 16, 16);
    let m = Mask::rect(16, 16, 2, 3, 12, 13);
    let got = structural_indicator(&img, &m, &m).unwrap();
    assert!((got - 1.0).abs() <= 1e-9);
}

#[test]
fn structure_two_constant_patches_is_one() {
    let mut data = vec![0.2; 12 * 12];
    for y in 6..12 {
        for x in 0..12 {
            data[y * 12 + x] = 0.9;
        }
    }
    let img = Image::new(12, 12, 1, data).unwrap();
    let a = Mask::rect(12, 12, 1, 1, 5, 5);
    let b = Mask::rect(12, 12, 2, 7, 9, 11);
    let got = structural_indicator(&img, &a, &b).unwrap();
    assert!((got - 1.0).abs() <= 1e-9);
}

#[test]
fn structure_random_matches_formula_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let img = random_gray(&mut rng, 20, 20);
    let region = Mask::rect(20, 20, 1, 2, 9, 11);
    let skin = Mask::rect(20, 20, 10, 8, 19, 19);
    let a = normalized_patch(&img, &region).unwrap();
    let b = normalized_patch(&img, &skin).unwrap();
    let got = structural_indicator(&img, &region, &skin).unwrap();
    assert!((got - ssim_formula_oracle(&a, &b)).abs() <= 1e-9);
}

#[test]
fn structure_scale_invariant_before_normalization() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let base: Vec<f64> = (0..15 * 15).map(|_| rng.gen::<f64>()).collect();
    let scaled: Vec<f64> = base.iter().map(|v| v * 0.35).collect();
    let img1 = Image::new(15, 15, 1, base).unwrap();
    let img2 = Image::new(15, 15, 1, scaled).unwrap();
    let region = Mask::rect(15, 15, 0, 0, 7, 7);
    let skin = Mask::rect(15, 15, 8, 8, 15, 15);
    let s1 = structural_indicator(&img1, &region, &skin).unwrap();
    let s2 = structural_indicator(&img2, &region, &skin).unwrap();
    assert!((s1 - s2).abs() <= 1e-9);
}

// ---- texture ----

#[test]
fn texture_constant_region_is_zero() {
    let img = Image::constant(8, 8, 0.7).unwrap();
    assert_eq!(texture_indicator(&img, &Mask::full(8, 8)).unwrap(), 0.0);
}

#[test]
fn texture_full_contrast_stripes() {
    let data: Vec<f64> = (0..8 * 8).map(|i| ((i % 8) % 2) as f64).collect();
    let img = Image::new(8, 8, 1, data).unwrap();
    let got = texture_indicator(&img, &Mask::full(8, 8)).unwrap();
    assert!((got - 3969.0).abs() <= 1e-9);
    assert!((got - texture_oracle(&img, &Mask::full(8, 8))).abs() <= 1e-9);
}

#[test]
fn texture_random_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let img = random_gray(&mut rng, 16, 16);
    let mask = random_mask(&mut rng, 16, 16);
    match texture_indicator(&img, &mask) {
        Ok(got) => assert!((got - texture_oracle(&img, &mask)).abs() <= 1e-9),
        Err(Error::NoAdjacentPairs) => {}
        Err(e) => panic!("unexpected error {e}"),
    }
}

#[test]
fn texture_no_adjacent_pairs_errors() {
    let mut rng = ChaCha8Rng::seed_from_u64(63);
    let img = random_gray(&mut rng, 8, 8);
    // one-pixel-wide vertical strip: no horizontal neighbor pairs
    let mask = Mask::rect(8, 8, 3, 0, 4, 8);
    assert!(matches!(
        texture_indicator(&img, &mask),
        Err(Error::NoAdjacentPairs)
    ));
}

#[test]
fn texture_invariant_to_sub_bin_offset() {
    // values sit mid-bin, so +0.0001 changes no quantization level
    let data: Vec<f64> = (0..64)
        .map(|i| (i % 7) as f64 / 10.0 + 0.05)
        .collect();
    let shifted: Vec<f64> = data.iter().map(|v| v + 0.0001).collect();
    let img1 = Image::new(8, 8, 1, data).unwrap();
    let img2 = Image::new(8, 8, 1, shifted).unwrap();
    let mask = Mask::full(8, 8);
    assert_eq!(
        texture_indicator(&img1, &mask).unwrap(),
        texture_indicator(&img2, &mask).unwrap()
    );
}

// ---- boundary ----

#[test]
fn boundary_constant_image_is_zero() {
    // non-dyadic constants leave ulp residue in the Sobel accumulation
    let img = Image::constant(9, 9, 0.3).unwrap();
    assert!(boundary_indicator(&img, &Mask::full(9, 9)).unwrap() <= 1e-12);
    let img2 = Image::constant(9, 9, 0.5).unwrap();
    assert_eq!(boundary_indicator(&img2, &Mask::full(9, 9)).unwrap(), 0.0);
}

#[test]
fn boundary_ramp_interior_magnitude() {
    let w = 9;
    let data: Vec<f64> = (0..w * w).map(|i| (i % w) as f64 / (w - 1) as f64).collect();
    let img = Image::new(w, w, 1, data).unwrap();
    // interior mask only: replicate border halves edge-column responses
    let mask = Mask::rect(w, w, 1, 1, w - 1, w - 1);
    let got = boundary_indicator(&img, &mask).unwrap();
    let expect = 8.0 / (w - 1) as f64;
    assert!((got - expect).abs() <= 1e-9, "got {got}, expect {expect}");
    assert!((got - boundary_oracle(&img, &mask)).abs() <= 1e-9);
}

#[test]
fn boundary_random_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let img = random_gray(&mut rng, 11, 13);
    let mask = random_mask(&mut rng, 11, 13);
    let got = boundary_indicator(&img, &mask).unwrap();
    assert!((got - boundary_oracle(&img, &mask)).abs() <= 1e-9);
}

// ---- indicator matrix ----

pub(crate) fn test_mask_set(w: usize, h: usize) -> RegionMaskSet {
    RegionMaskSet::new(
        [
            Mask::rect(w, h, 2, 2, w / 2 - 1, h / 4),
            Mask::rect(w, h, w / 2, 2, w - 2, h / 4),
            Mask::rect(w, h, 2, h / 4 + 1, w / 2 - 1, h / 2),
            Mask::rect(w, h, w / 2, h / 4 + 1, w - 2, h / 2),
            Mask::rect(w, h, 2, h / 2 + 1, w - 2, 3 * h / 4),
            Mask::rect(w, h, 1, 3 * h / 4 + 1, w - 1, h - 1),
        ],
        Mask::rect(w, h, w / 4, h / 8, 3 * w / 4, h / 2),
    )
    .unwrap()
}

#[test]
fn matrix_has_exactly_18_channels() {
    let mut rng = ChaCha8Rng::seed_from_u64(81);
    let img = random_rgb(&mut rng, 16, 16);
    let masks = test_mask_set(16, 16);
    let m = compute_indicator_matrix("img0", &img, &masks).unwrap();
    assert_eq!(CHANNELS.len(), 18);
    assert!(m.raw_values().iter().all(|v| v.is_finite()));
    // jawline and boundary carry only the boundary dimension
    assert_eq!(Region::Jawline.dimensions(), &[Dimension::Boundary]);
    assert_eq!(Region::Boundary.dimensions(), &[Dimension::Boundary]);
    assert!(Channel::new(Region::Jawline, Dimension::Blur).is_err());
}

#[test]
fn matrix_blurred_mouth_scores_below_sharp_eyes() {
    let mut rng = ChaCha8Rng::seed_from_u64(83);
    let mut data: Vec<f64> = (0..32 * 32 * 3).map(|_| rng.gen()).collect();
    let masks = test_mask_set(32, 32);
    // box-blur the mouth region several times
    for _ in 0..4 {
        let snapshot = data.clone();
        for y in 0..32usize {
            for x in 0..32usize {
                if !masks.region(Region::Mouth).get(x, y) {
                    continue;
                }
                for c in 0..3 {
                    let mut acc = 0.0;
                    for dy in -1i32..=1 {
                        for dx in -1i32..=1 {
                            let sy = (y as i32 + dy).clamp(0, 31) as usize;
                            let sx = (x as i32 + dx).clamp(0, 31) as usize;
                            acc += snapshot[(sy * 32 + sx) * 3 + c];
                        }
                    }
                    data[(y * 32 + x) * 3 + c] = acc / 9.0;
                }
            }
        }
    }
    let img = Image::new(32, 32, 3, data).unwrap();
    let m = compute_indicator_matrix("blurred", &img, &masks).unwrap();
    let mouth_blur = m.raw(Channel::new(Region::Mouth, Dimension::Blur).unwrap());
    let eyes_blur = m.raw(Channel::new(Region::Eyes, Dimension::Blur).unwrap());
    assert!(
        mouth_blur < eyes_blur,
        "mouth {mouth_blur} not below eyes {eyes_blur}"
    );
}

#[test]
fn matrix_tags_failing_channel() {
    // a one-column mouth mask has no horizontal pairs; the error must carry
    // the channel it failed on
    let img = Image::new(16, 16, 3, vec![0.5; 256 * 3]).unwrap();
    let base = test_mask_set(16, 16);
    let masks = RegionMaskSet::new(
        [
            base.region(Region::Eyes).clone(),
            base.region(Region::Nose).clone(),
            base.region(Region::Cheeks).clone(),
            Mask::rect(16, 16, 5, 0, 6, 16),
            base.region(Region::Jawline).clone(),
            base.region(Region::Boundary).clone(),
        ],
        base.skin().clone(),
    )
    .unwrap();
    let err = compute_indicator_matrix("x", &img, &masks).unwrap_err();
    match err {
        Error::Channel { channel, source } => {
            assert_eq!(channel, Channel::new(Region::Mouth, Dimension::Texture).unwrap());
            assert!(matches!(*source, Error::NoAdjacentPairs));
        }
        other => panic!("expected channel-tagged error, got {other}"),
    }
}

// ---- normalizer ----

fn matrix_with(vals: f64) -> IndicatorMatrix {
    IndicatorMatrix::from_raw("m", [vals; CHANNEL_COUNT])
}

#[test]
fn normalizer_requires_two_samples() {
    assert!(matches!(
        ChannelNormalizer::fit(&[matrix_with(1.0)]),
        Err(Error::InsufficientCalibration(1))
    ));
}

#[test]
fn normalizer_identical_calibration_floors_mad() {
    let norm = ChannelNormalizer::fit(&[matrix_with(2.0), matrix_with(2.0), matrix_with(2.0)])
        .unwrap();
    for i in 0..CHANNEL_COUNT {
        assert_eq!(norm.mad(i), 1e-9);
    }
    let scored = norm.anomaly_scores(&matrix_with(2.0));
    assert!(scored.anomaly_values().unwrap().iter().all(|a| *a == 0.0));
}

#[test]
fn normalizer_two_point_median_and_mad() {
    let norm = ChannelNormalizer::fit(&[matrix_with(1.0), matrix_with(3.0)]).unwrap();
    for i in 0..CHANNEL_COUNT {
        assert_eq!(norm.median(i), 2.0);
        assert_eq!(norm.mad(i), 1.0);
    }
}

#[test]
fn normalizer_polarity_flips_structure() {
    let norm = ChannelNormalizer::fit(&[matrix_with(0.0), matrix_with(2.0)]).unwrap();
    // raw = median + 2*MAD everywhere
    let scored = norm.anomaly_scores(&matrix_with(3.0));
    let structure = Channel::new(Region::Eyes, Dimension::Structure).unwrap();
    let color = Channel::new(Region::Eyes, Dimension::Color).unwrap();
    let blur = Channel::new(Region::Eyes, Dimension::Blur).unwrap();
    assert_eq!(scored.anomaly(structure).unwrap(), -2.0);
    assert_eq!(scored.anomaly(blur).unwrap(), -2.0);
    assert_eq!(scored.anomaly(color).unwrap(), 2.0);
}

#[test]
fn anomaly_plus_one_mad_on_positive_channel() {
    let norm = ChannelNormalizer::fit(&[matrix_with(1.0), matrix_with(3.0)]).unwrap();
    let scored = norm.anomaly_scores(&matrix_with(3.0));
    let color = Channel::new(Region::Nose, Dimension::Color).unwrap();
    assert_eq!(scored.anomaly(color).unwrap(), 1.0);
}

#[test]
fn anomaly_matches_scalar_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    let cal: Vec<IndicatorMatrix> = (0..7)
        .map(|i| {
            let mut raw = [0.0; CHANNEL_COUNT];
            for v in raw.iter_mut() {
                *v = rng.gen::<f64>() * 10.0;
            }
            IndicatorMatrix::from_raw(format!("c{i}"), raw)
        })
        .collect();
    let norm = ChannelNormalizer::fit(&cal).unwrap();
    let mut raw = [0.0; CHANNEL_COUNT];
    for v in raw.iter_mut() {
        *v = rng.gen::<f64>() * 10.0;
    }
    let m = IndicatorMatrix::from_raw("probe", raw);
    let scored = norm.anomaly_scores(&m);
    for ch in CHANNELS {
        let i = ch.index();
        let expect = ch.dimension.polarity() * (raw[i] - norm.median(i)) / norm.mad(i);
        assert_eq!(scored.anomaly(ch).unwrap(), expect);
    }
}

#[test]
fn anomaly_preserves_within_channel_ordering() {
    let mut rng = ChaCha8Rng::seed_from_u64(93);
    let cal: Vec<IndicatorMatrix> = (0..5)
        .map(|i| {
            let mut raw = [0.0; CHANNEL_COUNT];
            for v in raw.iter_mut() {
                *v = rng.gen::<f64>();
            }
            IndicatorMatrix::from_raw(format!("c{i}"), raw)
        })
        .collect();
    let norm = ChannelNormalizer::fit(&cal).unwrap();
    let scored: Vec<IndicatorMatrix> = cal.iter().map(|m| norm.anomaly_scores(m)).collect();
    for ch in CHANNELS {
        for a in 0..cal.len() {
            for b in 0..cal.len() {
                let raw_order = cal[a].raw(ch) < cal[b].raw(ch);
                let adj_a = ch.dimension.polarity() * scored[a].anomaly(ch).unwrap();
                let adj_b = ch.dimension.polarity() * scored[b].anomaly(ch).unwrap();
                // polarity-adjusted anomaly must order exactly like raw
                assert_eq!(raw_order, adj_a < adj_b);
            }
        }
    }
}

// ---- csv / manifest ----

#[test]
fn csv_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(95);
    let mut raw = [0.0; CHANNEL_COUNT];
    for v in raw.iter_mut() {
        *v = (rng.gen::<f64>() * 100.0).round() / 100.0;
    }
    let cal = vec![
        IndicatorMatrix::from_raw("a", raw),
        IndicatorMatrix::from_raw("b", raw.map(|v| v + 0.25)),
    ];
    let norm = ChannelNormalizer::fit(&cal).unwrap();
    let scored: Vec<IndicatorMatrix> = cal.iter().map(|m| norm.anomaly_scores(m)).collect();
    let text = write_matrix_csv(&scored);
    assert!(text.starts_with("image_id,region,dimension,raw,anomaly\n"));
    let back = read_matrix_csv(&text).unwrap();
    assert_eq!(back.len(), 2);
    assert_eq!(back[0].image_id, "a");
    for ch in CHANNELS {
        assert!((back[0].raw(ch) - scored[0].raw(ch)).abs() < 1e-6);
        assert!((back[0].anomaly(ch).unwrap() - scored[0].anomaly(ch).unwrap()).abs() < 1e-6);
    }
}

#[test]
fn manifest_parses_and_loads() {
    let dir = tempfile::tempdir().unwrap();
    let masks = test_mask_set(16, 16);
    let names = ["eyes", "nose", "cheeks", "mouth", "jawline", "boundary"];
    let mut manifest = String::new();
    for (name, region) in names.iter().zip(Region::ALL) {
        let p = dir.path().join(format!("{name}.pgm"));
        crate::imgstat::io::save_mask(&p, masks.region(region)).unwrap();
        manifest.push_str(&format!("{name}={name}.pgm\n"));
    }
    let sp = dir.path().join("skin.pgm");
    crate::imgstat::io::save_mask(&sp, masks.skin()).unwrap();
    manifest.push_str("skin=skin.pgm\n");
    let mp = dir.path().join("masks.txt");
    std::fs::write(&mp, manifest).unwrap();
    let loaded = parse_mask_manifest(&mp).unwrap();
    for region in Region::ALL {
        assert_eq!(loaded.region(region), masks.region(region));
    }
    assert_eq!(loaded.skin(), masks.skin());
}

#[test]
fn manifest_missing_region_errors() {
    let dir = tempfile::tempdir().unwrap();
    let mp = dir.path().join("masks.txt");
    std::fs::write(&mp, "eyes=e.pgm\n").unwrap();
    assert!(parse_mask_manifest(&mp).is_err());
}
