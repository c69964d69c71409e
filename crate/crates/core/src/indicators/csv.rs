//! Flat-file interfaces: the `region=path` mask manifest and the indicator
//! matrix CSV.

use super::{Channel, Dimension, IndicatorMatrix, Region, CHANNELS, CHANNEL_COUNT};
use crate::error::{Error, Result};
use crate::imgstat::io::load_mask_pgm;
use crate::imgstat::Mask;
use crate::indicators::RegionMaskSet;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

/// Parse a mask manifest (`region=path`, one per line, `#` comments) and load
/// every referenced PGM. Relative paths resolve against the manifest's parent.
pub fn parse_mask_manifest(manifest: &Path) -> Result<RegionMaskSet> {
    let text = std::fs::read_to_string(manifest)?;
    let base = manifest.parent().unwrap_or_else(|| Path::new("."));
    let mut loaded: HashMap<String, Mask> = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("manifest line {}: missing '='", lineno + 1)))?;
        let path = base.join(value.trim());
        loaded.insert(key.trim().to_string(), load_mask_pgm(&path)?);
    }
    let mut take = |name: &str| {
        loaded
            .remove(name)
            .ok_or_else(|| Error::Parse(format!("manifest missing region {name:?}")))
    };
    let masks = [
        take("eyes")?,
        take("nose")?,
        take("cheeks")?,
        take("mouth")?,
        take("jawline")?,
        take("boundary")?,
    ];
    let skin = take("skin")?;
    RegionMaskSet::new(masks, skin)
}

/// Serialize matrices as `image_id,region,dimension,raw,anomaly` rows.
/// Unnormalized matrices write an empty anomaly cell.
pub fn write_matrix_csv(matrices: &[IndicatorMatrix]) -> String {
    let mut out = String::from("image_id,region,dimension,raw,anomaly\n");
    for m in matrices {
        for ch in CHANNELS {
            let _ = write!(out, "{},{},{},{:.6},", m.image_id, ch.region, ch.dimension, m.raw(ch));
            match m.anomaly(ch) {
                Some(a) => {
                    let _ = writeln!(out, "{a:.6}");
                }
                None => out.push('\n'),
            }
        }
    }
    out
}

/// Parse the CSV produced by [`write_matrix_csv`].
pub fn read_matrix_csv(text: &str) -> Result<Vec<IndicatorMatrix>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty csv".into()))?;
    if header != "image_id,region,dimension,raw,anomaly" {
        return Err(Error::Parse(format!("unexpected csv header {header:?}")));
    }
    // (raw, anomaly) per channel, keyed by image id, in first-seen order
    let mut order: Vec<String> = Vec::new();
    let mut acc: HashMap<String, ([f64; CHANNEL_COUNT], [Option<f64>; CHANNEL_COUNT])> =
        HashMap::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::Parse(format!("csv line {}: need 5 fields", lineno + 2)));
        }
        let ch = Channel::new(Region::parse(fields[1])?, Dimension::parse(fields[2])?)?;
        let raw: f64 = fields[3]
            .parse()
            .map_err(|_| Error::Parse(format!("csv line {}: bad raw value", lineno + 2)))?;
        let anomaly = if fields[4].is_empty() {
            None
        } else {
            Some(fields[4].parse().map_err(|_| {
                Error::Parse(format!("csv line {}: bad anomaly value", lineno + 2))
            })?)
        };
        if !acc.contains_key(fields[0]) {
            order.push(fields[0].to_string());
        }
        let entry = acc
            .entry(fields[0].to_string())
            .or_insert(([0.0; CHANNEL_COUNT], [None; CHANNEL_COUNT]));
        entry.0[ch.index()] = raw;
        entry.1[ch.index()] = anomaly;
    }
    let mut out = Vec::with_capacity(order.len());
    for id in order {
        let (raw, anomaly) = acc.remove(&id).unwrap();
        let mut m = IndicatorMatrix::from_raw(id, raw);
        if anomaly.iter().all(|a| a.is_some()) {
            let mut vals = [0.0; CHANNEL_COUNT];
            for (v, a) in vals.iter_mut().zip(anomaly) {
                *v = a.unwrap();
            }
            m.set_anomaly(vals);
        }
        out.push(m);
    }
    Ok(out)
}
