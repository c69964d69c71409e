//! The five forgery indicators over six facial regions and their
//! normalization into comparable anomaly scores.
//!
//! Four face-interior regions carry blur, color, structure and texture;
//! the jawline and blending-boundary regions carry only the boundary
//! indicator, for 18 channels total.

mod csv;
mod normalize;

pub use csv::{parse_mask_manifest, read_matrix_csv, write_matrix_csv};
pub use normalize::ChannelNormalizer;

use crate::error::{Error, Result};
use crate::imgstat::{
    convolve2d, masked_moments, rgb_to_gray, rgb_to_lab, Field, Image, Kernel, Mask,
};
use std::fmt;

/// The five artifact dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dimension {
    Blur,
    Color,
    Structure,
    Texture,
    Boundary,
}

impl Dimension {
    pub const ALL: [Dimension; 5] = [
        Dimension::Blur,
        Dimension::Color,
        Dimension::Structure,
        Dimension::Texture,
        Dimension::Boundary,
    ];

    pub fn index(self) -> usize {
        match self {
            Dimension::Blur => 0,
            Dimension::Color => 1,
            Dimension::Structure => 2,
            Dimension::Texture => 3,
            Dimension::Boundary => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Dimension::Blur => "blur",
            Dimension::Color => "color",
            Dimension::Structure => "structure",
            Dimension::Texture => "texture",
            Dimension::Boundary => "boundary",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Dimension::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown dimension {s:?}")))
    }

    /// Sign applied to the z-score so that larger always means more anomalous.
    /// Structure is similarity-like and blur is sharpness-like, so both flip.
    pub fn polarity(self) -> f64 {
        match self {
            Dimension::Blur | Dimension::Structure => -1.0,
            Dimension::Color | Dimension::Texture | Dimension::Boundary => 1.0,
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The six facial regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    Eyes,
    Nose,
    Cheeks,
    Mouth,
    Jawline,
    Boundary,
}

impl Region {
    pub const ALL: [Region; 6] = [
        Region::Eyes,
        Region::Nose,
        Region::Cheeks,
        Region::Mouth,
        Region::Jawline,
        Region::Boundary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Region::Eyes => "eyes",
            Region::Nose => "nose",
            Region::Cheeks => "cheeks",
            Region::Mouth => "mouth",
            Region::Jawline => "jawline",
            Region::Boundary => "boundary",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Region::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown region {s:?}")))
    }

    /// Dimensions measured on this region.
    pub fn dimensions(self) -> &'static [Dimension] {
        match self {
            Region::Eyes | Region::Nose | Region::Cheeks | Region::Mouth => &[
                Dimension::Blur,
                Dimension::Color,
                Dimension::Structure,
                Dimension::Texture,
            ],
            Region::Jawline | Region::Boundary => &[Dimension::Boundary],
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One valid (region, dimension) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Channel {
    pub region: Region,
    pub dimension: Dimension,
}

pub const CHANNEL_COUNT: usize = 18;

/// The 18 valid channels in canonical order: region-major, dimension-minor.
pub const CHANNELS: [Channel; CHANNEL_COUNT] = [
    Channel { region: Region::Eyes, dimension: Dimension::Blur },
    Channel { region: Region::Eyes, dimension: Dimension::Color },
    Channel { region: Region::Eyes, dimension: Dimension::Structure },
    Channel { region: Region::Eyes, dimension: Dimension::Texture },
    Channel { region: Region::Nose, dimension: Dimension::Blur },
    Channel { region: Region::Nose, dimension: Dimension::Color },
    Channel { region: Region::Nose, dimension: Dimension::Structure },
    Channel { region: Region::Nose, dimension: Dimension::Texture },
    Channel { region: Region::Cheeks, dimension: Dimension::Blur },
    Channel { region: Region::Cheeks, dimension: Dimension::Color },
    Channel { region: Region::Cheeks, dimension: Dimension::Structure },
    Channel { region: Region::Cheeks, dimension: Dimension::Texture },
    Channel { region: Region::Mouth, dimension: Dimension::Blur },
    Channel { region: Region::Mouth, dimension: Dimension::Color },
    Channel { region: Region::Mouth, dimension: Dimension::Structure },
    Channel { region: Region::Mouth, dimension: Dimension::Texture },
    Channel { region: Region::Jawline, dimension: Dimension::Boundary },
    Channel { region: Region::Boundary, dimension: Dimension::Boundary },
];

impl Channel {
    pub fn new(region: Region, dimension: Dimension) -> Result<Self> {
        let ch = Channel { region, dimension };
        if ch.is_valid() {
            Ok(ch)
        } else {
            Err(Error::InvalidInput(format!(
                "({region}, {dimension}) is not a measured channel"
            )))
        }
    }

    pub fn is_valid(self) -> bool {
        self.region.dimensions().contains(&self.dimension)
    }

    /// Position in the canonical channel order.
    pub fn index(self) -> usize {
        CHANNELS
            .iter()
            .position(|c| *c == self)
            .expect("channel outside the valid schema")
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.region, self.dimension)
    }
}

/// Named masks for the six regions plus the skin reference, all paired to
/// one image.
#[derive(Debug, Clone)]
pub struct RegionMaskSet {
    masks: [Mask; 6],
    skin: Mask,
}

impl RegionMaskSet {
    /// `masks` ordered as [`Region::ALL`].
    pub fn new(masks: [Mask; 6], skin: Mask) -> Result<Self> {
        let (w, h) = (masks[0].width(), masks[0].height());
        for (i, m) in masks.iter().chain(std::iter::once(&skin)).enumerate() {
            if m.width() != w || m.height() != h {
                return Err(Error::InvalidInput(format!(
                    "mask {i} dimensions differ from the first mask"
                )));
            }
            if m.is_empty() {
                return Err(Error::EmptyRegion);
            }
        }
        Ok(Self { masks, skin })
    }

    pub fn region(&self, region: Region) -> &Mask {
        &self.masks[Region::ALL.iter().position(|r| *r == region).unwrap()]
    }

    pub fn skin(&self) -> &Mask {
        &self.skin
    }

    pub fn width(&self) -> usize {
        self.skin.width()
    }

    pub fn height(&self) -> usize {
        self.skin.height()
    }
}

/// Raw and, once normalized, anomaly scores for the 18 channels of one image.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorMatrix {
    pub image_id: String,
    raw: [f64; CHANNEL_COUNT],
    anomaly: Option<[f64; CHANNEL_COUNT]>,
}

impl IndicatorMatrix {
    pub fn from_raw(image_id: impl Into<String>, raw: [f64; CHANNEL_COUNT]) -> Self {
        Self {
            image_id: image_id.into(),
            raw,
            anomaly: None,
        }
    }

    pub fn raw(&self, ch: Channel) -> f64 {
        self.raw[ch.index()]
    }

    pub fn raw_values(&self) -> &[f64; CHANNEL_COUNT] {
        &self.raw
    }

    pub fn anomaly(&self, ch: Channel) -> Option<f64> {
        self.anomaly.map(|a| a[ch.index()])
    }

    pub fn anomaly_values(&self) -> Option<&[f64; CHANNEL_COUNT]> {
        self.anomaly.as_ref()
    }

    pub(crate) fn set_anomaly(&mut self, anomaly: [f64; CHANNEL_COUNT]) {
        self.anomaly = Some(anomaly);
    }
}

/// Sharpness: population variance of the 4-neighbor Laplacian over the mask.
pub fn blur_indicator(img: &Image, mask: &Mask) -> Result<f64> {
    if mask.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let gray = to_gray(img)?;
    let lap = convolve2d(&gray, &Kernel::laplacian4())?;
    let (_, var) = masked_moments(&lap, mask)?;
    Ok(var)
}

/// Lighting inconsistency: |mean L over region - mean L over skin| in CIELAB.
pub fn color_indicator(img: &Image, region: &Mask, skin: &Mask) -> Result<f64> {
    if region.is_empty() || skin.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let lab = rgb_to_lab(img)?;
    let lum: Vec<f64> = lab.iter().map(|t| t.0).collect();
    let field = Field::new(img.width(), img.height(), lum)?;
    let (mean_region, _) = masked_moments(&field, region)?;
    let (mean_skin, _) = masked_moments(&field, skin)?;
    Ok((mean_region - mean_skin).abs())
}

pub(crate) const SSIM_PATCH: usize = 32;

/// Structural compatibility: global SSIM of min-max-normalized 32x32 patches
/// resampled from the tight bounding boxes of the two masks.
pub fn structural_indicator(img: &Image, region: &Mask, skin: &Mask) -> Result<f64> {
    if region.is_empty() || skin.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let gray = to_gray(img)?;
    let a = normalized_patch(&gray, region)?;
    let b = normalized_patch(&gray, skin)?;
    Ok(global_ssim(&a, &b))
}

/// Extract, bilinearly resize to 32x32 and min-max normalize a mask's
/// bounding-box crop. A constant crop normalizes to all 0.5.
pub(crate) fn normalized_patch(gray: &Image, mask: &Mask) -> Result<Vec<f64>> {
    let (x0, y0, x1, y1) = mask.bounding_box()?;
    let patch = bilinear_resize(gray, x0, y0, x1, y1, SSIM_PATCH, SSIM_PATCH);
    let lo = patch.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = patch.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < 1e-12 {
        return Ok(vec![0.5; patch.len()]);
    }
    Ok(patch.iter().map(|v| (v - lo) / (hi - lo)).collect())
}

/// Bilinear resample of the crop `[x0,x1) x [y0,y1)` onto `ow x oh`,
/// endpoints aligned to the crop corners.
fn bilinear_resize(
    gray: &Image,
    x0: usize,
    y0: usize,
    x1: usize,
    y1: usize,
    ow: usize,
    oh: usize,
) -> Vec<f64> {
    let (cw, ch) = (x1 - x0, y1 - y0);
    let mut out = Vec::with_capacity(ow * oh);
    for oy in 0..oh {
        let sy = if oh > 1 && ch > 1 {
            oy as f64 * (ch - 1) as f64 / (oh - 1) as f64
        } else {
            0.0
        };
        let fy = sy.floor();
        let ty = sy - fy;
        let iy0 = y0 + fy as usize;
        let iy1 = (iy0 + 1).min(y0 + ch - 1);
        for ox in 0..ow {
            let sx = if ow > 1 && cw > 1 {
                ox as f64 * (cw - 1) as f64 / (ow - 1) as f64
            } else {
                0.0
            };
            let fx = sx.floor();
            let tx = sx - fx;
            let ix0 = x0 + fx as usize;
            let ix1 = (ix0 + 1).min(x0 + cw - 1);
            let v00 = gray.get(ix0, iy0, 0);
            let v10 = gray.get(ix1, iy0, 0);
            let v01 = gray.get(ix0, iy1, 0);
            let v11 = gray.get(ix1, iy1, 0);
            let top = v00 + (v10 - v00) * tx;
            let bot = v01 + (v11 - v01) * tx;
            out.push(top + (bot - top) * ty);
        }
    }
    out
}

/// Single-window SSIM over whole patches, dynamic range 1, population moments.
pub(crate) fn global_ssim(a: &[f64], b: &[f64]) -> f64 {
    let c1 = 0.01f64 * 0.01;
    let c2 = 0.03f64 * 0.03;
    let n = a.len() as f64;
    let mu_a = a.iter().sum::<f64>() / n;
    let mu_b = b.iter().sum::<f64>() / n;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    let mut cov = 0.0;
    for (x, y) in a.iter().zip(b) {
        var_a += (x - mu_a) * (x - mu_a);
        var_b += (y - mu_b) * (y - mu_b);
        cov += (x - mu_a) * (y - mu_b);
    }
    var_a /= n;
    var_b /= n;
    cov /= n;
    ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2))
        / ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2))
}

pub(crate) const GLCM_LEVELS: usize = 64;

/// Map a gray value in [0,1] onto 64 quantization levels; 1.0 lands on 63.
#[inline]
pub(crate) fn quantize_level(g: f64) -> usize {
    ((g * 63.999999).floor() as isize).clamp(0, 63) as usize
}

/// Texture anomaly: GLCM contrast at offset (1, 0), symmetric, 64 levels,
/// counting only pairs whose two pixels are both inside the mask.
pub fn texture_indicator(img: &Image, mask: &Mask) -> Result<f64> {
    if mask.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let gray = to_gray(img)?;
    let mut counts = vec![0u64; GLCM_LEVELS * GLCM_LEVELS];
    let mut total = 0u64;
    for y in 0..gray.height() {
        for x in 0..gray.width().saturating_sub(1) {
            if mask.get(x, y) && mask.get(x + 1, y) {
                let a = quantize_level(gray.get(x, y, 0));
                let b = quantize_level(gray.get(x + 1, y, 0));
                counts[a * GLCM_LEVELS + b] += 1;
                counts[b * GLCM_LEVELS + a] += 1;
                total += 2;
            }
        }
    }
    if total == 0 {
        return Err(Error::NoAdjacentPairs);
    }
    let mut contrast = 0.0;
    for i in 0..GLCM_LEVELS {
        for j in 0..GLCM_LEVELS {
            let p = counts[i * GLCM_LEVELS + j] as f64 / total as f64;
            let d = i as f64 - j as f64;
            contrast += p * d * d;
        }
    }
    Ok(contrast)
}

/// Blending seams: mean Sobel gradient magnitude over the mask.
pub fn boundary_indicator(img: &Image, mask: &Mask) -> Result<f64> {
    if mask.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let gray = to_gray(img)?;
    let gx = convolve2d(&gray, &Kernel::sobel_x())?;
    let gy = convolve2d(&gray, &Kernel::sobel_y())?;
    let mag: Vec<f64> = gx
        .data()
        .iter()
        .zip(gy.data())
        .map(|(x, y)| (x * x + y * y).sqrt())
        .collect();
    let field = Field::new(gray.width(), gray.height(), mag)?;
    let (mean, _) = masked_moments(&field, mask)?;
    Ok(mean)
}

fn to_gray(img: &Image) -> Result<Image> {
    if img.channels() == 1 {
        Ok(img.clone())
    } else {
        rgb_to_gray(img)
    }
}

/// Populate the raw scores of all 18 channels for one image.
pub fn compute_indicator_matrix(
    image_id: &str,
    img: &Image,
    masks: &RegionMaskSet,
) -> Result<IndicatorMatrix> {
    if masks.width() != img.width() || masks.height() != img.height() {
        return Err(Error::InvalidInput(
            "mask set dimensions differ from image".into(),
        ));
    }
    let mut raw = [0.0; CHANNEL_COUNT];
    for ch in CHANNELS {
        let m = masks.region(ch.region);
        let score = match ch.dimension {
            Dimension::Blur => blur_indicator(img, m),
            Dimension::Color => color_indicator(img, m, masks.skin()),
            Dimension::Structure => structural_indicator(img, m, masks.skin()),
            Dimension::Texture => texture_indicator(img, m),
            Dimension::Boundary => boundary_indicator(img, m),
        }
        .map_err(|e| e.on_channel(ch))?;
        raw[ch.index()] = score;
    }
    Ok(IndicatorMatrix::from_raw(image_id, raw))
}

#[cfg(test)]
mod tests;
