//! Rectangular grid of nonnegative intensities, stored row-major as `f64`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Image {
    /// Wraps row-major pixel data, validating dimensions and that every pixel
    /// is finite and nonnegative.
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Dimension(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::Dimension(format!(
                "pixel buffer holds {} values, expected {}",
                data.len(),
                width * height
            )));
        }
        for (i, &v) in data.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::NonFinitePixel { x: i % width, y: i / width });
            }
        }
        Ok(Image { width, height, data })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Image::new(width, height, vec![value; width * height])
    }

    /// Builds an image from a per-pixel function of `(x, y)`.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Image::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x]
    }

    /// Iterates `(x, y, value)` in row-major order.
    pub fn enumerate(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let w = self.width;
        self.data.iter().enumerate().map(move |(i, &v)| (i % w, i / w, v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_dimensions_and_pixels() {
        assert!(Image::new(0, 4, vec![]).is_err());
        assert!(Image::new(2, 2, vec![1.0; 3]).is_err());
        assert!(Image::new(2, 2, vec![1.0, f64::NAN, 1.0, 1.0]).is_err());
        assert!(Image::new(2, 2, vec![1.0, -0.5, 1.0, 1.0]).is_err());
    }

    #[test]
    fn row_major_indexing() {
        let img = Image::from_fn(3, 2, |x, y| (10 * y + x) as f64).unwrap();
        assert_eq!(img.get(2, 0), 2.0);
        assert_eq!(img.get(0, 1), 10.0);
        assert_eq!(img.pixels()[4], 11.0);
    }
}
