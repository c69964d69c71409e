//! Anchor library persistence: a UTF-8 text index with one record per channel
//! plus a binary sidecar of little-endian f64 embedding vectors.
//!
//! Index record: `dimension|region|real_text|fake_text|real_emb_offset|fake_emb_offset`
//! Sidecar: magic `AIFD`, u32 vector count, u32 dimension, then count*dim values.
//! Offsets are vector indices into the sidecar.

use super::{norm, Anchor, AnchorLibrary, TextCandidatePair};
use crate::error::{Error, Result};
use crate::indicators::{Channel, Dimension, Region};
use std::fmt::Write as _;
use std::path::Path;

pub const SIDECAR_MAGIC: &[u8; 4] = b"AIFD";

fn write_sidecar(vectors: &[&[f64]], dim: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + vectors.len() * dim * 8);
    out.extend_from_slice(SIDECAR_MAGIC);
    out.extend_from_slice(&(vectors.len() as u32).to_le_bytes());
    out.extend_from_slice(&(dim as u32).to_le_bytes());
    for v in vectors {
        for x in *v {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    out
}

fn read_sidecar(bytes: &[u8]) -> Result<Vec<Vec<f64>>> {
    if bytes.len() < 12 || &bytes[..4] != SIDECAR_MAGIC {
        return Err(Error::Parse("bad embedding sidecar magic".into()));
    }
    let count = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let dim = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let need = 12 + count * dim * 8;
    if bytes.len() < need {
        return Err(Error::Parse(format!(
            "sidecar truncated: need {need} bytes, have {}",
            bytes.len()
        )));
    }
    let mut vectors = Vec::with_capacity(count);
    let mut pos = 12;
    for _ in 0..count {
        let mut v = Vec::with_capacity(dim);
        for _ in 0..dim {
            v.push(f64::from_le_bytes(bytes[pos..pos + 8].try_into().unwrap()));
            pos += 8;
        }
        vectors.push(v);
    }
    Ok(vectors)
}

fn check_text(text: &str) -> Result<()> {
    if text.contains('|') || text.contains('\n') {
        return Err(Error::InvalidInput(
            "anchor texts must not contain '|' or newlines".into(),
        ));
    }
    Ok(())
}

/// Write `<stem>.idx` and `<stem>.vec` for a library.
pub fn save_library(stem: &Path, lib: &AnchorLibrary) -> Result<()> {
    let mut index = String::new();
    let mut vectors: Vec<&[f64]> = Vec::with_capacity(lib.anchors().len() * 2);
    for anchor in lib.anchors() {
        check_text(&anchor.pair.real_text)?;
        check_text(&anchor.pair.fake_text)?;
        let real_off = vectors.len();
        vectors.push(&anchor.pair.real_embedding);
        let fake_off = vectors.len();
        vectors.push(&anchor.pair.fake_embedding);
        let _ = writeln!(
            index,
            "{}|{}|{}|{}|{}|{}",
            anchor.channel.dimension,
            anchor.channel.region,
            anchor.pair.real_text,
            anchor.pair.fake_text,
            real_off,
            fake_off
        );
    }
    std::fs::write(stem.with_extension("idx"), index)?;
    std::fs::write(
        stem.with_extension("vec"),
        write_sidecar(&vectors, lib.dim()),
    )?;
    Ok(())
}

/// Load a library from `<stem>.idx` / `<stem>.vec`, validating unit norms.
pub fn load_library(stem: &Path) -> Result<AnchorLibrary> {
    let index = std::fs::read_to_string(stem.with_extension("idx"))?;
    let vectors = read_sidecar(&std::fs::read(stem.with_extension("vec"))?)?;
    for (i, v) in vectors.iter().enumerate() {
        if (norm(v) - 1.0).abs() > 1e-6 {
            return Err(Error::Parse(format!(
                "sidecar vector {i} is not unit-norm (|v| = {})",
                norm(v)
            )));
        }
    }
    let mut anchors = Vec::new();
    for (lineno, line) in index.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('|').collect();
        if fields.len() != 6 {
            return Err(Error::Parse(format!(
                "library index line {}: need 6 fields",
                lineno + 1
            )));
        }
        let channel = Channel::new(Region::parse(fields[1])?, Dimension::parse(fields[0])?)?;
        let fetch = |s: &str| -> Result<Vec<f64>> {
            let off: usize = s
                .parse()
                .map_err(|_| Error::Parse(format!("bad embedding offset {s:?}")))?;
            vectors
                .get(off)
                .cloned()
                .ok_or_else(|| Error::Parse(format!("embedding offset {off} out of range")))
        };
        anchors.push(Anchor {
            channel,
            pair: TextCandidatePair::new(fields[2], fields[3], fetch(fields[4])?, fetch(fields[5])?)?,
        });
    }
    AnchorLibrary::new(anchors)
}
