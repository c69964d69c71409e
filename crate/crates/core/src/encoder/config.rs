use crate::error::{Error, Result};

/// Injection gate behavior: trained per-dimension vector (zero-initialized)
/// or a frozen uniform scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateMode {
    Learnable,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncoderConfig {
    pub image_side: usize,
    pub in_channels: usize,
    pub patch_size: usize,
    pub d_model: usize,
    pub layers: usize,
    pub heads: usize,
    pub mlp_ratio: usize,
    /// M: cross-attention is injected into the last M layers.
    pub apa_layers: usize,
    pub gate_mode: GateMode,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        Self {
            image_side: 64,
            in_channels: 3,
            patch_size: 8,
            d_model: 64,
            layers: 6,
            heads: 4,
            mlp_ratio: 4,
            apa_layers: 4,
            gate_mode: GateMode::Learnable,
        }
    }
}

impl EncoderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.patch_size == 0 || self.image_side % self.patch_size != 0 {
            return Err(Error::InvalidInput(format!(
                "patch size {} must divide image side {}",
                self.patch_size, self.image_side
            )));
        }
        if self.heads == 0 || self.d_model % self.heads != 0 {
            return Err(Error::InvalidInput(format!(
                "d_model {} must be divisible by heads {}",
                self.d_model, self.heads
            )));
        }
        if self.layers == 0 || self.apa_layers == 0 || self.apa_layers > self.layers {
            return Err(Error::InvalidInput(format!(
                "need 1 <= M ({}) <= L ({})",
                self.apa_layers, self.layers
            )));
        }
        if self.in_channels != 1 && self.in_channels != 3 {
            return Err(Error::InvalidInput("in_channels must be 1 or 3".into()));
        }
        if self.mlp_ratio == 0 {
            return Err(Error::InvalidInput("mlp_ratio must be >= 1".into()));
        }
        Ok(())
    }

    pub fn patches_per_side(&self) -> usize {
        self.image_side / self.patch_size
    }

    pub fn patch_count(&self) -> usize {
        self.patches_per_side() * self.patches_per_side()
    }

    /// Sequence length: patches plus the class token.
    pub fn tokens(&self) -> usize {
        self.patch_count() + 1
    }

    pub fn patch_dim(&self) -> usize {
        self.in_channels * self.patch_size * self.patch_size
    }

    pub fn hidden(&self) -> usize {
        self.d_model * self.mlp_ratio
    }

    pub fn head_dim(&self) -> usize {
        self.d_model / self.heads
    }

    /// Index of the first layer that carries cross-attention parameters.
    pub fn first_apa_layer(&self) -> usize {
        self.layers - self.apa_layers
    }
}
