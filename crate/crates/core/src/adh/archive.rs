//! Head archive persistence: magic `AIFH`, u32 entry count, then per entry
//! {kind: u8, task_id: u32, dim: u32, unit vector f64 LE, original norm f64}.

use super::{HeadKind, HeadVector, TaskHeadArchive};
use crate::error::{Error, Result};
use std::path::Path;

pub const MAGIC: &[u8; 4] = b"AIFH";

pub fn save(path: &Path, archive: &TaskHeadArchive) -> Result<()> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(archive.len() as u32).to_le_bytes());
    for e in archive.entries() {
        out.push(e.kind.tag());
        out.extend_from_slice(&e.task_id.to_le_bytes());
        out.extend_from_slice(&(e.unit.len() as u32).to_le_bytes());
        for v in &e.unit {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&e.norm.to_le_bytes());
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<TaskHeadArchive> {
    let bytes = std::fs::read(path)?;
    if bytes.len() < 8 || &bytes[..4] != MAGIC {
        return Err(Error::Parse("bad archive magic".into()));
    }
    let count = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let mut pos = 8;
    let mut take = |n: usize| -> Result<&[u8]> {
        if pos + n > bytes.len() {
            return Err(Error::Parse("archive truncated".into()));
        }
        let s = &bytes[pos..pos + n];
        pos += n;
        Ok(s)
    };
    let mut archive = TaskHeadArchive::new();
    for _ in 0..count {
        let kind = HeadKind::from_tag(take(1)?[0])?;
        let task_id = u32::from_le_bytes(take(4)?.try_into().unwrap());
        let dim = u32::from_le_bytes(take(4)?.try_into().unwrap()) as usize;
        let mut unit = Vec::with_capacity(dim);
        for _ in 0..dim {
            unit.push(f64::from_le_bytes(take(8)?.try_into().unwrap()));
        }
        let norm_val = f64::from_le_bytes(take(8)?.try_into().unwrap());
        let n = crate::anchors::norm(&unit);
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::Parse(format!(
                "archived direction is not unit-norm (|v| = {n})"
            )));
        }
        archive.push(HeadVector {
            unit,
            norm: norm_val,
            kind,
            task_id,
        });
    }
    Ok(archive)
}
