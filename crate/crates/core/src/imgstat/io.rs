//! Binary PGM (P5) / PPM (P6) readers and writers, 8-bit only.

use super::{Image, Mask};
use crate::error::{Error, Result};
use std::fs;
use std::io::Write;
use std::path::Path;

struct Header {
    magic: [u8; 2],
    width: usize,
    height: usize,
    maxval: usize,
    data_offset: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    if bytes.len() < 2 {
        return Err(Error::Parse("file too short for a netpbm header".into()));
    }
    let magic = [bytes[0], bytes[1]];
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // skip whitespace and comment lines
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Parse("malformed netpbm header".into()));
        }
        let text = std::str::from_utf8(&bytes[start..pos])
            .map_err(|_| Error::Parse("non-utf8 header".into()))?;
        *field = text
            .parse()
            .map_err(|_| Error::Parse("bad header number".into()))?;
    }
    // exactly one whitespace byte separates the header from pixel data
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::Parse("missing header terminator".into()));
    }
    pos += 1;
    Ok(Header {
        magic,
        width: fields[0],
        height: fields[1],
        maxval: fields[2],
        data_offset: pos,
    })
}

fn load_raw(path: &Path, expect_magic: &[u8; 2], channels: usize) -> Result<(usize, usize, Vec<u8>)> {
    let bytes = fs::read(path)?;
    let hdr = parse_header(&bytes)?;
    if &hdr.magic != expect_magic {
        return Err(Error::Parse(format!(
            "expected {} file, found magic {:?}",
            std::str::from_utf8(expect_magic).unwrap(),
            hdr.magic
        )));
    }
    if hdr.maxval != 255 {
        return Err(Error::Parse(format!(
            "only maxval 255 supported, got {}",
            hdr.maxval
        )));
    }
    let need = hdr.width * hdr.height * channels;
    let data = &bytes[hdr.data_offset..];
    if data.len() < need {
        return Err(Error::Parse(format!(
            "pixel payload truncated: need {need}, have {}",
            data.len()
        )));
    }
    Ok((hdr.width, hdr.height, data[..need].to_vec()))
}

/// Load a binary PGM (P5) as a single-channel image, values scaled by 1/255.
pub fn load_pgm(path: &Path) -> Result<Image> {
    let (w, h, raw) = load_raw(path, b"P5", 1)?;
    Image::new(w, h, 1, raw.iter().map(|b| *b as f64 / 255.0).collect())
}

/// Load a binary PPM (P6) as an RGB image, values scaled by 1/255.
pub fn load_ppm(path: &Path) -> Result<Image> {
    let (w, h, raw) = load_raw(path, b"P6", 3)?;
    Image::new(w, h, 3, raw.iter().map(|b| *b as f64 / 255.0).collect())
}

/// Load a binary PGM (P5) as a mask: any nonzero byte is a set pixel.
pub fn load_mask_pgm(path: &Path) -> Result<Mask> {
    let (w, h, raw) = load_raw(path, b"P5", 1)?;
    Mask::new(w, h, raw.iter().map(|b| *b != 0).collect())
}

/// Write an image as binary PGM (1 channel) or PPM (3 channels).
pub fn save_image(path: &Path, img: &Image) -> Result<()> {
    let magic = if img.channels() == 1 { "P5" } else { "P6" };
    let mut out = Vec::with_capacity(img.data().len() + 32);
    write!(out, "{magic}\n{} {}\n255\n", img.width(), img.height())?;
    out.extend(
        img.data()
            .iter()
            .map(|v| (v * 255.0).round().clamp(0.0, 255.0) as u8),
    );
    fs::write(path, out)?;
    Ok(())
}

/// Write a mask as binary PGM with 255 for set pixels.
pub fn save_mask(path: &Path, mask: &Mask) -> Result<()> {
    let mut out = Vec::with_capacity(mask.bits().len() + 32);
    write!(out, "P5\n{} {}\n255\n", mask.width(), mask.height())?;
    out.extend(mask.bits().iter().map(|b| if *b { 255u8 } else { 0 }));
    fs::write(path, out)?;
    Ok(())
}
