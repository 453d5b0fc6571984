//! FIMG v1, the exact image format: one ASCII header line
//! `FIMG 1 <width> <height>` terminated by a newline, followed by the
//! row-major pixels as 64-bit IEEE-754 little-endian values.

use crate::error::{Error, Result};
use crate::image::Image;

use std::fs;
use std::path::Path;

pub fn fimg_bytes(image: &Image) -> Vec<u8> {
    let header = format!("FIMG 1 {} {}\n", image.width(), image.height());
    let mut out = Vec::with_capacity(header.len() + image.pixels().len() * 8);
    out.extend_from_slice(header.as_bytes());
    for v in image.pixels() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn write_fimg(path: &Path, image: &Image) -> Result<()> {
    fs::write(path, fimg_bytes(image))?;
    Ok(())
}

pub fn image_from_fimg_bytes(bytes: &[u8], path: &Path) -> Result<Image> {
    let fail = |message: String| Error::Format { path: path.to_path_buf(), message };
    let newline = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| fail("missing header line".into()))?;
    let header = std::str::from_utf8(&bytes[..newline])
        .map_err(|_| fail("header is not ASCII".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "FIMG" || fields[1] != "1" {
        return Err(fail(format!("unrecognized header '{header}'")));
    }
    let width: usize =
        fields[2].parse().map_err(|_| fail(format!("invalid width '{}'", fields[2])))?;
    let height: usize =
        fields[3].parse().map_err(|_| fail(format!("invalid height '{}'", fields[3])))?;
    let body = &bytes[newline + 1..];
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(8))
        .ok_or_else(|| fail("dimensions overflow".into()))?;
    if body.len() != expected {
        return Err(fail(format!(
            "payload holds {} bytes, expected {expected} for {width}x{height}",
            body.len()
        )));
    }
    let pixels: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("exact chunk")))
        .collect();
    Image::new(width, height, pixels)
}

pub fn read_fimg(path: &Path) -> Result<Image> {
    let bytes = fs::read(path)?;
    image_from_fimg_bytes(&bytes, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let img = Image::from_fn(5, 3, |x, y| (x as f64 + 0.125) * (y as f64 + 1.0) / 7.0).unwrap();
        let bytes = fimg_bytes(&img);
        let back = image_from_fimg_bytes(&bytes, Path::new("test.fimg")).unwrap();
        assert_eq!(img, back);
    }

    #[test]
    fn header_is_human_readable() {
        let img = Image::filled(4, 2, 1.0).unwrap();
        let bytes = fimg_bytes(&img);
        assert!(bytes.starts_with(b"FIMG 1 4 2\n"));
        assert_eq!(bytes.len(), 11 + 8 * 8);
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let img = Image::filled(4, 2, 1.0).unwrap();
        let mut bytes = fimg_bytes(&img);
        bytes.pop();
        assert!(image_from_fimg_bytes(&bytes, Path::new("bad.fimg")).is_err());
    }

    #[test]
    fn foreign_header_is_rejected() {
        assert!(image_from_fimg_bytes(b"P5 4 2\n", Path::new("bad")).is_err());
    }
}
