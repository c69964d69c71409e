//! Encoder checkpoints: magic `AIFE`, u32 schema version, the config, then
//! every parameter tensor in declaration order as little-endian f64 with a
//! name + shape header.

use super::config::{EncoderConfig, GateMode};
use super::state::EncoderState;
use crate::error::{Error, Result};
use std::path::Path;

pub const MAGIC: &[u8; 4] = b"AIFE";
pub const SCHEMA_VERSION: u32 = 1;

fn push_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::Parse("checkpoint truncated".into()));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

fn encode_config(out: &mut Vec<u8>, cfg: &EncoderConfig) {
    push_u32(out, cfg.image_side as u32);
    push_u32(out, cfg.in_channels as u32);
    push_u32(out, cfg.patch_size as u32);
    push_u32(out, cfg.d_model as u32);
    push_u32(out, cfg.layers as u32);
    push_u32(out, cfg.heads as u32);
    push_u32(out, cfg.mlp_ratio as u32);
    push_u32(out, cfg.apa_layers as u32);
    match cfg.gate_mode {
        GateMode::Learnable => {
            out.push(0);
            out.extend_from_slice(&0.0f64.to_le_bytes());
        }
        GateMode::Fixed(s) => {
            out.push(1);
            out.extend_from_slice(&s.to_le_bytes());
        }
    }
}

fn decode_config(r: &mut Reader) -> Result<EncoderConfig> {
    let image_side = r.u32()? as usize;
    let in_channels = r.u32()? as usize;
    let patch_size = r.u32()? as usize;
    let d_model = r.u32()? as usize;
    let layers = r.u32()? as usize;
    let heads = r.u32()? as usize;
    let mlp_ratio = r.u32()? as usize;
    let apa_layers = r.u32()? as usize;
    let tag = r.take(1)?[0];
    let scale = r.f64()?;
    let gate_mode = match tag {
        0 => GateMode::Learnable,
        1 => GateMode::Fixed(scale),
        _ => return Err(Error::Parse("unknown gate mode tag".into())),
    };
    Ok(EncoderConfig {
        image_side,
        in_channels,
        patch_size,
        d_model,
        layers,
        heads,
        mlp_ratio,
        apa_layers,
        gate_mode,
    })
}

pub fn save(path: &Path, state: &EncoderState) -> Result<()> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    push_u32(&mut out, SCHEMA_VERSION);
    encode_config(&mut out, &state.cfg);
    let mut count = 0u32;
    state.for_each_tensor(|_, _| count += 1);
    push_u32(&mut out, count);
    state.for_each_tensor(|name, tensor| {
        push_u32(&mut out, name.len() as u32);
        out.extend_from_slice(name.as_bytes());
        push_u32(&mut out, 1); // flat shape
        push_u32(&mut out, tensor.len() as u32);
        for v in tensor {
            out.extend_from_slice(&v.to_le_bytes());
        }
    });
    std::fs::write(path, out)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<EncoderState> {
    let bytes = std::fs::read(path)?;
    let mut r = Reader {
        bytes: &bytes,
        pos: 0,
    };
    if r.take(4)? != MAGIC {
        return Err(Error::Parse("bad checkpoint magic".into()));
    }
    let version = r.u32()?;
    if version != SCHEMA_VERSION {
        return Err(Error::Parse(format!(
            "unsupported checkpoint schema {version}"
        )));
    }
    let cfg = decode_config(&mut r)?;
    let mut state = EncoderState::init(cfg, 0)?;
    let count = r.u32()? as usize;
    if count != state.tensor_count() {
        return Err(Error::Parse(format!(
            "checkpoint holds {count} tensors, config implies {}",
            state.tensor_count()
        )));
    }
    let mut failure: Option<Error> = None;
    state.for_each_tensor_mut(|name, tensor| {
        if failure.is_some() {
            return;
        }
        let read = (|| -> Result<()> {
            let name_len = r.u32()? as usize;
            let stored = std::str::from_utf8(r.take(name_len)?)
                .map_err(|_| Error::Parse("non-utf8 tensor name".into()))?;
            if stored != name {
                return Err(Error::Parse(format!(
                    "tensor order mismatch: expected {name}, found {stored}"
                )));
            }
            let ndim = r.u32()? as usize;
            let mut len = 1usize;
            for _ in 0..ndim {
                len *= r.u32()? as usize;
            }
            if len != tensor.len() {
                return Err(Error::Parse(format!(
                    "tensor {name}: stored length {len} does not match config shape {}",
                    tensor.len()
                )));
            }
            for v in tensor.iter_mut() {
                *v = r.f64()?;
            }
            Ok(())
        })();
        if let Err(e) = read {
            failure = Some(e);
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    state.version = 0;
    Ok(state)
}
