//! Binary PGM (P5) export with 16-bit big-endian samples.
//!
//! The stored dynamic range is quantized linearly onto 0..=65535; the range
//! actually used is returned so callers can record it in the provenance
//! sidecar. Lossy by design — viewing only, never pipeline input.

use crate::error::Result;
use crate::image::Image;

use std::fs;
use std::path::Path;

/// The linear quantization applied by a PGM export.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgmQuantization {
    pub min: f64,
    pub max: f64,
}

pub fn pgm_bytes(image: &Image) -> (Vec<u8>, PgmQuantization) {
    let min = image.pixels().iter().copied().fold(f64::INFINITY, f64::min);
    let max = image.pixels().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    let header = format!("P5\n{} {}\n65535\n", image.width(), image.height());
    let mut out = Vec::with_capacity(header.len() + image.pixels().len() * 2);
    out.extend_from_slice(header.as_bytes());
    for &v in image.pixels() {
        let q = if span > 0.0 {
            ((v - min) / span * 65535.0).round() as u16
        } else {
            0
        };
        out.extend_from_slice(&q.to_be_bytes());
    }
    (out, PgmQuantization { min, max })
}

pub fn write_pgm(path: &Path, image: &Image) -> Result<PgmQuantization> {
    let (bytes, quant) = pgm_bytes(image);
    fs::write(path, bytes)?;
    Ok(quant)
}
