//! Synthetic face-like data with injected regional artifacts. Reals are
//! smooth gradient images with fine texture; fakes are the paired reals with
//! the task's recipe applied inside its region masks, constructed to trip
//! the matching closed-form indicator.

use crate::anchors::Polarity;
use crate::error::{Error, Result};
use crate::imgstat::{Image, Mask};
use crate::indicators::{compute_indicator_matrix, Channel, Dimension, Region, RegionMaskSet};
use crate::trainer::TrainSample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One artifact injection: a channel plus an intensity knob whose meaning
/// depends on the dimension (blur rounds, luminance shift, pattern gain,
/// noise amplitude, seam contrast).
#[derive(Debug, Clone, PartialEq)]
pub struct RecipeStep {
    pub channel: Channel,
    pub intensity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub side: usize,
    pub patch: usize,
    pub recipe: Vec<RecipeStep>,
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            side: 64,
            patch: 8,
            recipe: Vec::new(),
            train_per_class: 200,
            test_per_class: 100,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.train_per_class < 2 || self.test_per_class < 2 {
            return Err(Error::InvalidInput(
                "need at least 2 samples per class per split".into(),
            ));
        }
        if self.side == 0 || self.patch == 0 || self.side % self.patch != 0 {
            return Err(Error::InvalidInput(
                "patch must divide the image side".into(),
            ));
        }
        for step in &self.recipe {
            if !step.channel.is_valid() {
                return Err(Error::InvalidInput(format!(
                    "recipe channel {} is not measured",
                    step.channel
                )));
            }
        }
        Ok(())
    }
}

/// Generated splits plus the shared fixed masks.
#[derive(Debug, Clone)]
pub struct TaskDataset {
    pub train: Vec<TrainSample>,
    pub test: Vec<TrainSample>,
    pub masks: RegionMaskSet,
    pub spec: SyntheticSpec,
}

fn scaled(v: usize, side: usize) -> usize {
    v * side / 64
}

/// Fixed rectangular region layout, proportional to a 64-pixel base design.
pub fn fixed_masks(side: usize) -> RegionMaskSet {
    let s = |v: usize| scaled(v, side);
    let eyes = Mask::rect(side, side, s(12), s(16), s(52), s(26));
    let nose = Mask::rect(side, side, s(26), s(26), s(38), s(40));
    let cheeks = {
        let mut bits = vec![false; side * side];
        for (x0, x1) in [(s(8), s(24)), (s(40), s(56))] {
            for y in s(30)..s(44) {
                for x in x0..x1 {
                    bits[y * side + x] = true;
                }
            }
        }
        Mask::new(side, side, bits).unwrap()
    };
    let mouth = Mask::rect(side, side, s(22), s(44), s(42), s(54));
    let jawline = Mask::rect(side, side, s(12), s(54), s(52), s(60));
    let boundary = {
        // rectangular ring of width 2 around the face box
        let (x0, y0, x1, y1) = (s(8), s(8), s(56), s(58));
        let mut bits = vec![false; side * side];
        for y in y0..y1 {
            for x in x0..x1 {
                let on_edge = x < x0 + 2 || x >= x1 - 2 || y < y0 + 2 || y >= y1 - 2;
                if on_edge {
                    bits[y * side + x] = true;
                }
            }
        }
        Mask::new(side, side, bits).unwrap()
    };
    let skin = Mask::rect(side, side, s(16), s(4), s(48), s(14));
    RegionMaskSet::new([eyes, nose, cheeks, mouth, jawline, boundary], skin)
        .expect("fixed layout produces non-empty masks")
}

fn sample_rng(seed: u64, task: usize, split: u8, index: usize) -> ChaCha8Rng {
    let mix = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((task as u64) << 40)
        .wrapping_add((split as u64) << 32)
        .wrapping_add(index as u64);
    ChaCha8Rng::seed_from_u64(mix)
}

/// Smooth random-gradient base face with fine texture.
fn base_face(rng: &mut ChaCha8Rng, side: usize) -> Vec<f64> {
    let mut data = vec![0.0; side * side * 3];
    let tau = std::f64::consts::TAU;
    for c in 0..3 {
        let level = rng.gen_range(0.35..0.6);
        let gx = rng.gen_range(-0.2..0.2);
        let gy = rng.gen_range(-0.2..0.2);
        let waves: Vec<(f64, f64, f64, f64)> = (0..3)
            .map(|_| {
                (
                    rng.gen_range(0.02..0.07),
                    rng.gen_range(1.0..4.0),
                    rng.gen_range(1.0..4.0),
                    rng.gen_range(0.0..tau),
                )
            })
            .collect();
        for y in 0..side {
            for x in 0..side {
                let (fx, fy) = (x as f64 / side as f64, y as f64 / side as f64);
                let mut v = level + gx * fx + gy * fy;
                for (amp, kx, ky, phase) in &waves {
                    v += amp * (tau * (kx * fx + ky * fy) + phase).cos();
                }
                data[(y * side + x) * 3 + c] = v;
            }
        }
    }
    // fine texture so blurring has something to erase
    for v in data.iter_mut() {
        *v = (*v + rng.gen_range(-0.03..0.03)).clamp(0.05, 0.95);
    }
    data
}

fn apply_step(data: &mut [f64], side: usize, mask: &Mask, step: &RecipeStep, rng: &mut ChaCha8Rng) {
    match step.channel.dimension {
        Dimension::Blur => {
            let rounds = step.intensity.round().max(1.0) as usize;
            for _ in 0..rounds {
                let snapshot = data.to_vec();
                for y in 0..side {
                    for x in 0..side {
                        if !mask.get(x, y) {
                            continue;
                        }
                        for c in 0..3 {
                            let mut acc = 0.0;
                            for dy in -1i64..=1 {
                                for dx in -1i64..=1 {
                                    let sy = (y as i64 + dy).clamp(0, side as i64 - 1) as usize;
                                    let sx = (x as i64 + dx).clamp(0, side as i64 - 1) as usize;
                                    acc += snapshot[(sy * side + sx) * 3 + c];
                                }
                            }
                            data[(y * side + x) * 3 + c] = acc / 9.0;
                        }
                    }
                }
            }
        }
        Dimension::Color => {
            for y in 0..side {
                for x in 0..side {
                    if mask.get(x, y) {
                        for c in 0..3 {
                            let i = (y * side + x) * 3 + c;
                            data[i] = (data[i] + step.intensity).clamp(0.0, 1.0);
                        }
                    }
                }
            }
        }
        Dimension::Structure => {
            // replace region content with an alien smooth grating
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            for y in 0..side {
                for x in 0..side {
                    if mask.get(x, y) {
                        let carrier =
                            (std::f64::consts::TAU * (x as f64 - y as f64) / 5.0 + phase).cos();
                        for c in 0..3 {
                            let i = (y * side + x) * 3 + c;
                            data[i] = (0.5 + step.intensity * carrier).clamp(0.0, 1.0);
                        }
                    }
                }
            }
        }
        Dimension::Texture => {
            for y in 0..side {
                for x in 0..side {
                    if mask.get(x, y) {
                        let noise = rng.gen_range(-step.intensity..step.intensity);
                        for c in 0..3 {
                            let i = (y * side + x) * 3 + c;
                            data[i] = (data[i] + noise).clamp(0.0, 1.0);
                        }
                    }
                }
            }
        }
        Dimension::Boundary => {
            // hard-edged 2px stripes: a strong seam for the gradient probe
            for y in 0..side {
                for x in 0..side {
                    if mask.get(x, y) {
                        let stripe = ((x / 2 + y / 2) % 2) as f64;
                        let shift = step.intensity * (stripe - 0.5);
                        for c in 0..3 {
                            let i = (y * side + x) * 3 + c;
                            data[i] = (data[i] + shift).clamp(0.0, 1.0);
                        }
                    }
                }
            }
        }
    }
}

fn recipe_targets(recipe: &[RecipeStep]) -> [bool; 5] {
    let mut y = [false; 5];
    for step in recipe {
        y[step.channel.dimension.index()] = true;
    }
    y
}

fn build_split(
    spec: &SyntheticSpec,
    task_index: usize,
    split: u8,
    count: usize,
    masks: &RegionMaskSet,
) -> Result<Vec<TrainSample>> {
    let mut out = Vec::with_capacity(count * 2);
    let split_name = if split == 0 { "train" } else { "test" };
    for i in 0..count {
        let mut rng = sample_rng(spec.seed, task_index, split, i);
        let base = base_face(&mut rng, spec.side);
        let real_img = Image::new(spec.side, spec.side, 3, base.clone())?;
        let real_matrix = compute_indicator_matrix(
            &format!("t{task_index}_{split_name}_real{i}"),
            &real_img,
            masks,
        )?;
        out.push(TrainSample {
            image: real_img,
            label: Polarity::Real,
            y_ind: [false; 5],
            matrix: real_matrix,
        });

        let mut fake_data = base;
        for step in &spec.recipe {
            apply_step(
                &mut fake_data,
                spec.side,
                masks.region(step.channel.region),
                step,
                &mut rng,
            );
        }
        let fake_img = Image::new(spec.side, spec.side, 3, fake_data)?;
        let fake_matrix = compute_indicator_matrix(
            &format!("t{task_index}_{split_name}_fake{i}"),
            &fake_img,
            masks,
        )?;
        out.push(TrainSample {
            image: fake_img,
            label: Polarity::Fake,
            y_ind: recipe_targets(&spec.recipe),
            matrix: fake_matrix,
        });
    }
    Ok(out)
}

/// Deterministic dataset for one task: paired real/fake samples with cached
/// raw indicator matrices.
pub fn gen_synthetic_task(spec: &SyntheticSpec, task_index: usize) -> Result<TaskDataset> {
    spec.validate()?;
    let masks = fixed_masks(spec.side);
    Ok(TaskDataset {
        train: build_split(spec, task_index, 0, spec.train_per_class, &masks)?,
        test: build_split(spec, task_index, 1, spec.test_per_class, &masks)?,
        masks,
        spec: spec.clone(),
    })
}

/// The default artifact recipe for task `t` of the incremental sequence:
/// each task injects a distinct pair of (dimension, region) artifacts.
pub fn default_task_spec(base: &SyntheticSpec, task_index: usize) -> SyntheticSpec {
    let ch = |region, dimension| Channel::new(region, dimension).unwrap();
    let recipes = [
        vec![
            RecipeStep { channel: ch(Region::Mouth, Dimension::Blur), intensity: 4.0 },
            RecipeStep { channel: ch(Region::Cheeks, Dimension::Color), intensity: 0.25 },
        ],
        vec![
            RecipeStep { channel: ch(Region::Eyes, Dimension::Texture), intensity: 0.18 },
            RecipeStep { channel: ch(Region::Jawline, Dimension::Boundary), intensity: 0.3 },
        ],
        vec![
            RecipeStep { channel: ch(Region::Nose, Dimension::Structure), intensity: 0.35 },
            RecipeStep { channel: ch(Region::Boundary, Dimension::Boundary), intensity: 0.3 },
        ],
        vec![
            RecipeStep { channel: ch(Region::Eyes, Dimension::Color), intensity: 0.3 },
            RecipeStep { channel: ch(Region::Cheeks, Dimension::Texture), intensity: 0.15 },
        ],
    ];
    SyntheticSpec {
        recipe: recipes[task_index % recipes.len()].clone(),
        ..base.clone()
    }
}
