//! File formats of the pipeline.
//!
//! Pipeline math always travels through the exact FIMG format; PGM is a
//! lossy export for human inspection. Result tables are plain CSV with
//! round-trip-exact floating-point formatting, and layouts/experiment specs
//! are plain-text `key=value` files.

pub mod fimg;
pub mod keyval;
pub mod pgm;
pub mod provenance;
pub mod results;

use crate::error::{Error, Result};

use std::path::Path;

/// Floating-point values in text outputs carry 17 significant digits, which
/// round-trips every finite `f64` exactly.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn parse_f64(s: &str, path: &Path, what: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Format {
        path: path.to_path_buf(),
        message: format!("invalid {what}: '{s}'"),
    })
}
