use super::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_image(rng: &mut ChaCha8Rng, w: usize, h: usize, c: usize) -> Image {
    let data = (0..w * h * c).map(|_| rng.gen::<f64>()).collect();
    Image::new(w, h, c, data).unwrap()
}

#[test]
fn gray_of_white_is_one() {
    let img = Image::new(2, 2, 3, vec![1.0; 12]).unwrap();
    let gray = rgb_to_gray(&img).unwrap();
    assert!(gray.data().iter().all(|v| (*v - 1.0).abs() < 1e-15));
}

#[test]
fn gray_of_pure_red() {
    let img = Image::new(1, 1, 3, vec![1.0, 0.0, 0.0]).unwrap();
    let gray = rgb_to_gray(&img).unwrap();
    assert!((gray.get(0, 0, 0) - 0.299).abs() < 1e-15);
}

#[test]
fn gray_matches_scalar_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let img = random_image(&mut rng, 8, 8, 3);
    let gray = rgb_to_gray(&img).unwrap();
    for y in 0..8 {
        for x in 0..8 {
            let expect =
                0.299 * img.get(x, y, 0) + 0.587 * img.get(x, y, 1) + 0.114 * img.get(x, y, 2);
            assert!((gray.get(x, y, 0) - expect.clamp(0.0, 1.0)).abs() < 1e-15);
        }
    }
}

#[test]
fn gray_rejects_single_channel() {
    let img = Image::constant(2, 2, 0.5).unwrap();
    assert!(matches!(rgb_to_gray(&img), Err(Error::InvalidInput(_))));
}

/// Straight-line transcription of the sRGB -> CIELAB formulas, kept separate
/// from the implementation on purpose.
fn lab_oracle(r: f64, g: f64, b: f64) -> (f64, f64, f64) {
    let lin = |c: f64| {
        if c <= 0.04045 {
            c / 12.92
        } else {
            ((c + 0.055) / 1.055).powf(2.4)
        }
    };
    let (rl, gl, bl) = (lin(r), lin(g), lin(b));
    let x = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl;
    let y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
    let z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl;
    let xn = 0.4124564 + 0.3575761 + 0.1804375;
    let yn = 0.2126729 + 0.7151522 + 0.0721750;
    let zn = 0.0193339 + 0.1191920 + 0.9503041;
    let f = |t: f64| {
        let d = 6.0f64 / 29.0;
        if t > d.powi(3) {
            t.powf(1.0 / 3.0)
        } else {
            t / (3.0 * d * d) + 4.0 / 29.0
        }
    };
    let (fx, fy, fz) = (f(x / xn), f(y / yn), f(z / zn));
    (116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz))
}

#[test]
fn lab_black_and_white_endpoints() {
    let img = Image::new(2, 1, 3, vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap();
    let lab = rgb_to_lab(&img).unwrap();
    assert!(lab[0].0.abs() < 1e-12, "black L = {}", lab[0].0);
    assert!((lab[1].0 - 100.0).abs() < 1e-6, "white L = {}", lab[1].0);
}

#[test]
fn lab_mid_gray_matches_formula_oracle() {
    let img = Image::new(1, 1, 3, vec![0.5, 0.5, 0.5]).unwrap();
    let lab = rgb_to_lab(&img).unwrap()[0];
    let expect = lab_oracle(0.5, 0.5, 0.5);
    assert!((lab.0 - expect.0).abs() < 1e-9);
    assert!((lab.1 - expect.1).abs() < 1e-9);
    assert!((lab.2 - expect.2).abs() < 1e-9);
}

#[test]
fn lab_random_pixels_match_formula_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..64 {
        let (r, g, b) = (rng.gen(), rng.gen(), rng.gen());
        let img = Image::new(1, 1, 3, vec![r, g, b]).unwrap();
        let got = rgb_to_lab(&img).unwrap()[0];
        let expect = lab_oracle(r, g, b);
        assert!((got.0 - expect.0).abs() < 1e-9);
        assert!((got.1 - expect.1).abs() < 1e-9);
        assert!((got.2 - expect.2).abs() < 1e-9);
    }
}

#[test]
fn lab_lightness_monotone_on_gray_ramp() {
    let mut prev = f64::NEG_INFINITY;
    for i in 0..32 {
        let v = i as f64 / 31.0;
        let img = Image::new(1, 1, 3, vec![v, v, v]).unwrap();
        let l = rgb_to_lab(&img).unwrap()[0].0;
        assert!(l > prev, "L not strictly increasing at step {i}");
        prev = l;
    }
}

#[test]
fn convolve_constant_with_laplacian_is_zero() {
    let img = Image::constant(6, 5, 0.37).unwrap();
    let out = convolve2d(&img, &Kernel::laplacian4()).unwrap();
    assert!(out.data().iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn convolve_identity_kernel_preserves_input() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let img = random_image(&mut rng, 7, 4, 1);
    let ident = Kernel::new(3, vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
    let out = convolve2d(&img, &ident).unwrap();
    for (a, b) in out.data().iter().zip(img.data()) {
        assert_eq!(a, b);
    }
}

/// Brute-force double-loop correlation with replicate borders.
fn convolve_oracle(img: &Image, k: &Kernel) -> Vec<f64> {
    let (w, h) = (img.width() as isize, img.height() as isize);
    let side = k.side() as isize;
    let c = side / 2;
    let mut out = vec![0.0; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for dy in 0..side {
                for dx in 0..side {
                    let sy = (y + dy - c).max(0).min(h - 1);
                    let sx = (x + dx - c).max(0).min(w - 1);
                    acc += k.get(dy as usize, dx as usize) * img.get(sx as usize, sy as usize, 0);
                }
            }
            out[(y * w + x) as usize] = acc;
        }
    }
    out
}

#[test]
fn convolve_matches_bruteforce_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let img = random_image(&mut rng, 5, 5, 1);
    let out = convolve2d(&img, &Kernel::sobel_x()).unwrap();
    let expect = convolve_oracle(&img, &Kernel::sobel_x());
    for (a, b) in out.data().iter().zip(&expect) {
        assert!((a - b).abs() <= 1e-12);
    }
}

#[test]
fn convolve_is_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a = random_image(&mut rng, 16, 16, 1);
    let b = random_image(&mut rng, 16, 16, 1);
    let (alpha, beta) = (0.3, 0.6);
    let mixed_data: Vec<f64> = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| alpha * x + beta * y)
        .collect();
    let mixed = Image::new(16, 16, 1, mixed_data).unwrap();
    let k = Kernel::laplacian4();
    let ca = convolve2d(&a, &k).unwrap();
    let cb = convolve2d(&b, &k).unwrap();
    let cm = convolve2d(&mixed, &k).unwrap();
    for i in 0..cm.data().len() {
        let expect = alpha * ca.data()[i] + beta * cb.data()[i];
        assert!((cm.data()[i] - expect).abs() < 1e-12);
    }
}

#[test]
fn moments_of_constant_field() {
    let field = Field::new(3, 3, vec![7.0; 9]).unwrap();
    let mask = Mask::rect(3, 3, 0, 0, 2, 3);
    let (mean, var) = masked_moments(&field, &mask).unwrap();
    assert_eq!(mean, 7.0);
    assert_eq!(var, 0.0);
}

#[test]
fn moments_single_pixel_mask() {
    let field = Field::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
    let mask = Mask::rect(2, 2, 1, 0, 2, 1);
    let (mean, var) = masked_moments(&field, &mask).unwrap();
    assert_eq!(mean, 2.0);
    assert_eq!(var, 0.0);
}

#[test]
fn moments_hand_computed() {
    let field = Field::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
    let (mean, var) = masked_moments(&field, &Mask::full(2, 2)).unwrap();
    assert!((mean - 2.5).abs() < 1e-15);
    assert!((var - 1.25).abs() < 1e-15);
}

#[test]
fn moments_variance_translation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let data: Vec<f64> = (0..64).map(|_| rng.gen::<f64>()).collect();
    let shifted: Vec<f64> = data.iter().map(|v| v + 5.0).collect();
    let mask = Mask::rect(8, 8, 1, 1, 7, 6);
    let (_, v1) = masked_moments(&Field::new(8, 8, data).unwrap(), &mask).unwrap();
    let (_, v2) = masked_moments(&Field::new(8, 8, shifted).unwrap(), &mask).unwrap();
    assert!((v1 - v2).abs() < 1e-12);
}

#[test]
fn moments_empty_mask_errors() {
    let field = Field::new(2, 2, vec![0.0; 4]).unwrap();
    let mask = Mask::new(2, 2, vec![false; 4]).unwrap();
    assert!(matches!(
        masked_moments(&field, &mask),
        Err(Error::EmptyRegion)
    ));
}

#[test]
fn image_invariants_enforced() {
    assert!(Image::new(0, 2, 1, vec![]).is_err());
    assert!(Image::new(2, 2, 2, vec![0.0; 8]).is_err());
    assert!(Image::new(2, 2, 1, vec![0.0; 3]).is_err());
    assert!(Image::new(1, 1, 1, vec![1.5]).is_err());
    assert!(Kernel::new(2, vec![0.0; 4]).is_err());
}

mod io_tests {
    use super::super::io::*;
    use super::*;

    #[test]
    fn pgm_ppm_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let data: Vec<f64> = (0..5 * 4 * 3)
            .map(|_| (rng.gen_range(0..=255u8)) as f64 / 255.0)
            .collect();
        let img = Image::new(5, 4, 3, data).unwrap();
        let p = dir.path().join("img.ppm");
        save_image(&p, &img).unwrap();
        let back = load_ppm(&p).unwrap();
        assert_eq!(img, back);

        let gray = rgb_to_gray(&img).unwrap();
        let p2 = dir.path().join("img.pgm");
        save_image(&p2, &gray).unwrap();
        let back2 = load_pgm(&p2).unwrap();
        assert_eq!(back2.width(), 5);
        for (a, b) in gray.data().iter().zip(back2.data()) {
            assert!((a - b).abs() <= 0.5 / 255.0 + 1e-12);
        }
    }

    #[test]
    fn mask_round_trip_nonzero_is_true() {
        let dir = tempfile::tempdir().unwrap();
        let mask = Mask::rect(6, 3, 1, 0, 4, 2);
        let p = dir.path().join("m.pgm");
        save_mask(&p, &mask).unwrap();
        assert_eq!(load_mask_pgm(&p).unwrap(), mask);
    }

    #[test]
    fn loader_rejects_wrong_maxval() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.pgm");
        std::fs::write(&p, b"P5\n2 2\n65535\n\0\0\0\0\0\0\0\0").unwrap();
        assert!(matches!(load_pgm(&p), Err(Error::Parse(_))));
    }

    #[test]
    fn loader_rejects_wrong_magic() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.ppm");
        std::fs::write(&p, b"P5\n1 1\n255\n\0").unwrap();
        assert!(load_ppm(&p).is_err());
    }
}
