//! Small-kernel correlation with replicate borders and masked moments.

use super::{Field, Image, Kernel, Mask};
use crate::error::{Error, Result};

/// Correlate a single-channel image with a kernel, replicating edge pixels.
///
/// `out[y][x] = sum_k k[dy][dx] * img[clamp(y + dy - c)][clamp(x + dx - c)]`
/// with `c = side / 2`. Output is unclamped.
pub fn convolve2d(img: &Image, kernel: &Kernel) -> Result<Field> {
    if img.channels() != 1 {
        return Err(Error::InvalidInput(
            "convolve2d expects a single-channel image".into(),
        ));
    }
    let (w, h) = (img.width() as isize, img.height() as isize);
    let side = kernel.side() as isize;
    let c = side / 2;
    let mut out = vec![0.0; img.width() * img.height()];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for dy in 0..side {
                let sy = (y + dy - c).clamp(0, h - 1) as usize;
                for dx in 0..side {
                    let sx = (x + dx - c).clamp(0, w - 1) as usize;
                    acc += kernel.get(dy as usize, dx as usize) * img.get(sx, sy, 0);
                }
            }
            out[(y * w + x) as usize] = acc;
        }
    }
    Field::new(img.width(), img.height(), out)
}

/// Mean and population variance of a field over the set pixels of a mask.
pub fn masked_moments(field: &Field, mask: &Mask) -> Result<(f64, f64)> {
    if field.width() != mask.width() || field.height() != mask.height() {
        return Err(Error::InvalidInput(
            "field and mask dimensions differ".into(),
        ));
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for (v, m) in field.data().iter().zip(mask.bits()) {
        if *m {
            sum += v;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::EmptyRegion);
    }
    let mean = sum / count as f64;
    let mut ss = 0.0;
    for (v, m) in field.data().iter().zip(mask.bits()) {
        if *m {
            let d = v - mean;
            ss += d * d;
        }
    }
    Ok((mean, ss / count as f64))
}
