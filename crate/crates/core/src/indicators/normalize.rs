//! Robust per-channel normalization. The five raw indicators live in
//! incommensurable units; ranking across channels needs a common scale.

use super::{IndicatorMatrix, CHANNELS, CHANNEL_COUNT};
use crate::error::{Error, Result};

const MAD_FLOOR: f64 = 1e-9;

/// Per-channel median/MAD location-scale model with a fixed per-dimension
/// polarity, fitted on a calibration set of raw matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelNormalizer {
    median: [f64; CHANNEL_COUNT],
    mad: [f64; CHANNEL_COUNT],
    polarity: [f64; CHANNEL_COUNT],
}

fn median_of(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

impl ChannelNormalizer {
    /// Fit medians and MADs per channel; needs at least two matrices.
    pub fn fit(calibration: &[IndicatorMatrix]) -> Result<Self> {
        if calibration.len() < 2 {
            return Err(Error::InsufficientCalibration(calibration.len()));
        }
        let mut median = [0.0; CHANNEL_COUNT];
        let mut mad = [0.0; CHANNEL_COUNT];
        let mut polarity = [0.0; CHANNEL_COUNT];
        for ch in CHANNELS {
            let i = ch.index();
            let mut vals: Vec<f64> = calibration.iter().map(|m| m.raw(ch)).collect();
            median[i] = median_of(&mut vals);
            let mut devs: Vec<f64> = vals.iter().map(|v| (v - median[i]).abs()).collect();
            mad[i] = median_of(&mut devs).max(MAD_FLOOR);
            polarity[i] = ch.dimension.polarity();
        }
        Ok(Self {
            median,
            mad,
            polarity,
        })
    }

    pub fn median(&self, idx: usize) -> f64 {
        self.median[idx]
    }

    pub fn mad(&self, idx: usize) -> f64 {
        self.mad[idx]
    }

    pub fn polarity(&self, idx: usize) -> f64 {
        self.polarity[idx]
    }

    /// `anomaly[c] = polarity[c] * (raw[c] - median[c]) / mad[c]`
    pub fn anomaly_scores(&self, mtx: &IndicatorMatrix) -> IndicatorMatrix {
        let mut out = mtx.clone();
        let mut anomaly = [0.0; CHANNEL_COUNT];
        for i in 0..CHANNEL_COUNT {
            anomaly[i] = self.polarity[i] * (mtx.raw_values()[i] - self.median[i]) / self.mad[i];
        }
        out.set_anomaly(anomaly);
        out
    }
}
