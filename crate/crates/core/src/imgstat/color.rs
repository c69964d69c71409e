//! sRGB color conversions: luma grayscale and CIELAB (D65).

use super::Image;
use crate::error::{Error, Result};

/// Rec.601 luma grayscale: `0.299 R + 0.587 G + 0.114 B`, clamped to `[0,1]`.
pub fn rgb_to_gray(img: &Image) -> Result<Image> {
    if img.channels() != 3 {
        return Err(Error::InvalidInput(format!(
            "rgb_to_gray expects 3 channels, got {}",
            img.channels()
        )));
    }
    let mut out = Vec::with_capacity(img.width() * img.height());
    for px in img.data().chunks_exact(3) {
        let g = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
        out.push(g.clamp(0.0, 1.0));
    }
    Image::new(img.width(), img.height(), 1, out)
}

// sRGB -> linear RGB -> XYZ matrix (IEC 61966-2-1, D65).
const M: [[f64; 3]; 3] = [
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
];

// White point taken as the matrix image of RGB (1,1,1) so that pure white
// maps to L = 100 exactly instead of inheriting the matrix rounding error.
const WHITE: [f64; 3] = [
    M[0][0] + M[0][1] + M[0][2],
    M[1][0] + M[1][1] + M[1][2],
    M[2][0] + M[2][1] + M[2][2],
];

#[inline]
fn srgb_to_linear(c: f64) -> f64 {
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

#[inline]
fn lab_f(t: f64) -> f64 {
    const DELTA: f64 = 6.0 / 29.0;
    if t > DELTA * DELTA * DELTA {
        t.cbrt()
    } else {
        t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
    }
}

/// One sRGB pixel to CIELAB under D65. `L` lies in `[0, 100]`.
pub fn srgb_pixel_to_lab(r: f64, g: f64, b: f64) -> (f64, f64, f64) {
    let (rl, gl, bl) = (srgb_to_linear(r), srgb_to_linear(g), srgb_to_linear(b));
    let x = M[0][0] * rl + M[0][1] * gl + M[0][2] * bl;
    let y = M[1][0] * rl + M[1][1] * gl + M[1][2] * bl;
    let z = M[2][0] * rl + M[2][1] * gl + M[2][2] * bl;
    let fx = lab_f(x / WHITE[0]);
    let fy = lab_f(y / WHITE[1]);
    let fz = lab_f(z / WHITE[2]);
    (116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz))
}

/// Per-pixel CIELAB triples for an sRGB image, row-major.
pub fn rgb_to_lab(img: &Image) -> Result<Vec<(f64, f64, f64)>> {
    if img.channels() != 3 {
        return Err(Error::InvalidInput(format!(
            "rgb_to_lab expects 3 channels, got {}",
            img.channels()
        )));
    }
    Ok(img
        .data()
        .chunks_exact(3)
        .map(|px| srgb_pixel_to_lab(px[0], px[1], px[2]))
        .collect())
}
