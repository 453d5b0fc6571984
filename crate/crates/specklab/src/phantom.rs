//! Deterministic phantom ("points and strips") with a machine-readable
//! region-of-interest registry, and its corruption by speckle under one of
//! the simulated situations.
//!
//! The canonical layout is 256x256 with seven vertical strips of widths
//! 1, 3, 5, 7, 9, 11 and 13 anchored at column 20 with 12-pixel gaps over
//! rows 20..=235, five isolated points on row 245, and a feature-free
//! homogeneous block on the right-hand side. The line measure uses the
//! width-1 strip and its two neighbouring columns; edge measures use
//! 3-column bands offset one pixel from a strip's left boundary.

use crate::distributions::{Looks, ModelSampler, ReturnModel};
use crate::error::{Error, Result};
use crate::image::Image;
use crate::rng::Rng;

/// Inclusive rectangle `[x0, x1] × [y0, y1]` in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl Rect {
    pub fn new(x0: usize, y0: usize, x1: usize, y1: usize) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    pub fn pixel_count(&self) -> usize {
        (self.x1 + 1 - self.x0) * (self.y1 + 1 - self.y0)
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        (self.x0..=self.x1).contains(&x) && (self.y0..=self.y1).contains(&y)
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.x0 <= other.x1 && other.x0 <= self.x1 && self.y0 <= other.y1 && other.y0 <= self.y1
    }

    pub fn inside(&self, width: usize, height: usize) -> bool {
        self.x0 <= self.x1 && self.y0 <= self.y1 && self.x1 < width && self.y1 < height
    }

    /// Copies the covered pixel values in row-major order.
    pub fn extract(&self, image: &Image) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.pixel_count());
        for y in self.y0..=self.y1 {
            for x in self.x0..=self.x1 {
                out.push(image.get(x, y));
            }
        }
        out
    }
}

/// A vertical strip occupying columns `[col, col + width)` over the layout's
/// strip row band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Strip {
    pub width: usize,
    pub col: usize,
}

/// The three single-column regions of the line measure: the width-1 strip
/// and its immediate left/right neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LineTriple {
    pub center: Rect,
    pub left: Rect,
    pub right: Rect,
}

/// Paired 3-column bands around one strip's left edge, offset one pixel from
/// the boundary on each side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeBands {
    pub strip_width: usize,
    pub inside: Rect,
    pub outside: Rect,
}

/// Named regions consumed by the quality measures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoiRegistry {
    pub homogeneous_block: Rect,
    pub line: LineTriple,
    /// One entry per strip wide enough to carry the bands (width ≥ 5),
    /// ordered by increasing width; the widest is the default edge target.
    pub edges: Vec<EdgeBands>,
}

/// Minimum strip width that accommodates a 3-column inside band offset one
/// pixel from the edge.
const MIN_EDGE_STRIP_WIDTH: usize = 5;

/// Deterministic phantom geometry plus the intensities of its two classes.
#[derive(Debug, Clone, PartialEq)]
pub struct PhantomLayout {
    pub width: usize,
    pub height: usize,
    pub background_mean: f64,
    pub contrast_ratio: f64,
    /// Inclusive row band covered by every strip.
    pub strip_row_start: usize,
    pub strip_row_end: usize,
    pub strips: Vec<Strip>,
    pub point_row: usize,
    pub point_cols: Vec<usize>,
    pub homogeneous_block: Rect,
}

impl PhantomLayout {
    /// The reference layout used by the whole assessment pipeline.
    pub fn canonical() -> Self {
        PhantomLayout {
            width: 256,
            height: 256,
            background_mean: 230.0,
            contrast_ratio: 4.0,
            strip_row_start: 20,
            strip_row_end: 235,
            strips: vec![
                Strip { width: 1, col: 20 },
                Strip { width: 3, col: 33 },
                Strip { width: 5, col: 48 },
                Strip { width: 7, col: 65 },
                Strip { width: 9, col: 84 },
                Strip { width: 11, col: 105 },
                Strip { width: 13, col: 128 },
            ],
            point_row: 245,
            point_cols: vec![48, 64, 80, 96, 112],
            homogeneous_block: Rect::new(160, 8, 248, 120),
        }
    }

    pub fn with_background_mean(mut self, mean: f64) -> Self {
        self.background_mean = mean;
        self
    }

    pub fn with_contrast_ratio(mut self, ratio: f64) -> Self {
        self.contrast_ratio = ratio;
        self
    }

    pub fn foreground_mean(&self) -> f64 {
        self.contrast_ratio * self.background_mean
    }

    /// True when `(x, y)` belongs to a strip or a point.
    pub fn is_feature(&self, x: usize, y: usize) -> bool {
        if (self.strip_row_start..=self.strip_row_end).contains(&y)
            && self.strips.iter().any(|s| (s.col..s.col + s.width).contains(&x))
        {
            return true;
        }
        y == self.point_row && self.point_cols.contains(&x)
    }

    fn strip_rect(&self, strip: &Strip) -> Rect {
        Rect::new(strip.col, self.strip_row_start, strip.col + strip.width - 1, self.strip_row_end)
    }

    fn feature_rects(&self) -> Vec<Rect> {
        let mut rects: Vec<Rect> = self.strips.iter().map(|s| self.strip_rect(s)).collect();
        rects.extend(
            self.point_cols.iter().map(|&c| Rect::new(c, self.point_row, c, self.point_row)),
        );
        rects
    }

    /// Checks every structural invariant, reporting all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        if self.width == 0 || self.height == 0 {
            violations.push(format!(
                "image dimensions must be positive, got {}x{}",
                self.width, self.height
            ));
        }
        if !(self.background_mean > 0.0) {
            violations.push(format!(
                "background mean must be positive, got {}",
                self.background_mean
            ));
        }
        if !(self.contrast_ratio > 1.0) {
            violations.push(format!("contrast ratio must exceed 1, got {}", self.contrast_ratio));
        }
        if self.strip_row_start > self.strip_row_end || self.strip_row_end >= self.height {
            violations.push(format!(
                "strip row band {}..={} does not fit a height-{} image",
                self.strip_row_start, self.strip_row_end, self.height
            ));
        }
        for s in &self.strips {
            if s.width == 0 {
                violations.push(format!("strip at column {} has zero width", s.col));
            }
            if s.col + s.width > self.width {
                violations.push(format!(
                    "strip at column {} (width {}) leaves the image",
                    s.col, s.width
                ));
            }
        }
        let mut sorted = self.strips.clone();
        sorted.sort_by_key(|s| s.col);
        for pair in sorted.windows(2) {
            if pair[0].col + pair[0].width > pair[1].col {
                violations.push(format!(
                    "strips at columns {} and {} overlap",
                    pair[0].col, pair[1].col
                ));
            }
        }
        let line_strips: Vec<Strip> =
            self.strips.iter().copied().filter(|s| s.width == 1).collect();
        if line_strips.len() != 1 {
            violations.push(format!(
                "exactly one width-1 strip is required for the line measure, found {}",
                line_strips.len()
            ));
        }
        for &c in &self.point_cols {
            if c >= self.width || self.point_row >= self.height {
                violations.push(format!("point ({c}, {}) leaves the image", self.point_row));
            }
        }
        let mut cols = self.point_cols.clone();
        cols.sort_unstable();
        for pair in cols.windows(2) {
            if pair[1] - pair[0] < 2 {
                violations.push(format!(
                    "points at columns {} and {} are not isolated",
                    pair[0], pair[1]
                ));
            }
        }
        if (self.strip_row_start..=self.strip_row_end).contains(&self.point_row) {
            for &c in &self.point_cols {
                if self.strips.iter().any(|s| (s.col..s.col + s.width).contains(&c)) {
                    violations.push(format!("point at column {c} lies on a strip"));
                }
            }
        }
        if !self.homogeneous_block.inside(self.width, self.height) {
            violations.push("homogeneous block leaves the image".to_string());
        }
        for rect in self.feature_rects() {
            if self.homogeneous_block.intersects(&rect) {
                violations.push(format!(
                    "homogeneous block intersects a feature at column {}",
                    rect.x0
                ));
            }
        }

        // ROI-level checks need the registry geometry, which in turn needs a
        // structurally sound strip list; skip them if that already failed.
        if violations.is_empty() {
            let line = line_strips[0];
            if line.col == 0 || line.col + 1 >= self.width {
                violations.push("line strip has no room for its side columns".to_string());
            } else {
                let triple = self.line_triple(line);
                for (label, rect) in [("left", triple.left), ("right", triple.right)] {
                    for feature in self.feature_rects() {
                        if rect.intersects(&feature) {
                            violations.push(format!(
                                "line {label} column {} intersects a feature",
                                rect.x0
                            ));
                        }
                    }
                }
            }
            for bands in self.edge_bands() {
                for (label, rect) in [("inside", bands.inside), ("outside", bands.outside)] {
                    if !rect.inside(self.width, self.height) {
                        violations.push(format!(
                            "edge {label} band of the width-{} strip leaves the image",
                            bands.strip_width
                        ));
                    }
                }
                let strip_rect = self
                    .strips
                    .iter()
                    .find(|s| s.width == bands.strip_width)
                    .map(|s| self.strip_rect(s))
                    .expect("band derives from a strip");
                if !(strip_rect.contains(bands.inside.x0, bands.inside.y0)
                    && strip_rect.contains(bands.inside.x1, bands.inside.y1))
                {
                    violations.push(format!(
                        "inside band of the width-{} strip leaves the strip",
                        bands.strip_width
                    ));
                }
                for feature in self.feature_rects() {
                    if bands.outside.intersects(&feature) {
                        violations.push(format!(
                            "outside band of the width-{} strip intersects a feature",
                            bands.strip_width
                        ));
                    }
                }
            }
        }

        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(violations))
        }
    }

    fn line_triple(&self, line: Strip) -> LineTriple {
        let (y0, y1) = (self.strip_row_start, self.strip_row_end);
        LineTriple {
            center: Rect::new(line.col, y0, line.col, y1),
            left: Rect::new(line.col - 1, y0, line.col - 1, y1),
            right: Rect::new(line.col + 1, y0, line.col + 1, y1),
        }
    }

    fn edge_bands(&self) -> Vec<EdgeBands> {
        let mut wide: Vec<&Strip> =
            self.strips.iter().filter(|s| s.width >= MIN_EDGE_STRIP_WIDTH).collect();
        wide.sort_by_key(|s| s.width);
        wide.iter()
            .filter(|s| s.col >= 4)
            .map(|s| {
                let (y0, y1) = (self.strip_row_start, self.strip_row_end);
                EdgeBands {
                    strip_width: s.width,
                    inside: Rect::new(s.col + 1, y0, s.col + 3, y1),
                    outside: Rect::new(s.col - 4, y0, s.col - 2, y1),
                }
            })
            .collect()
    }

    /// The validated ROI registry for this layout.
    pub fn roi_registry(&self) -> Result<RoiRegistry> {
        self.validate()?;
        let line = self
            .strips
            .iter()
            .copied()
            .find(|s| s.width == 1)
            .expect("validation guarantees a width-1 strip");
        Ok(RoiRegistry {
            homogeneous_block: self.homogeneous_block,
            line: self.line_triple(line),
            edges: self.edge_bands(),
        })
    }
}

/// Renders the noise-free truth: background pixels at the background mean,
/// feature pixels at `contrast_ratio` times that.
pub fn build_phantom(layout: &PhantomLayout) -> Result<Image> {
    layout.validate()?;
    let (bg, fg) = (layout.background_mean, layout.foreground_mean());
    Image::from_fn(layout.width, layout.height, |x, y| {
        if layout.is_feature(x, y) {
            fg
        } else {
            bg
        }
    })
}

/// Background/foreground return models of one simulated scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Situation {
    pub id: u8,
    pub background: ReturnModel,
    pub foreground: ReturnModel,
}

/// `(alpha, gamma)` pairs of the six built-in heterogeneous situations; the
/// implied background means alternate 230, 50, 230, 50, 230, 50.
pub const G0_SITUATION_PARAMS: [(f64, f64); 6] = [
    (-2.0, 230.0),
    (-2.0, 50.0),
    (-4.0, 690.0),
    (-4.0, 150.0),
    (-10.0, 2070.0),
    (-10.0, 450.0),
];

impl Situation {
    /// Builds one of the standard situations. Situation 0 is pure speckle on
    /// constant truth at `constant_mean`; situations 1-6 use the built-in
    /// heavy-tailed parameters, with the foreground scale multiplied by
    /// `contrast_ratio` so the class means keep the phantom's contrast.
    pub fn standard(
        id: u8,
        looks: Looks,
        contrast_ratio: f64,
        constant_mean: f64,
    ) -> Result<Situation> {
        if !(contrast_ratio > 1.0) {
            return Err(Error::Validation(vec![format!(
                "contrast ratio must exceed 1, got {contrast_ratio}"
            )]));
        }
        match id {
            0 => Ok(Situation {
                id,
                background: ReturnModel::constant_gamma(constant_mean, looks)?,
                foreground: ReturnModel::constant_gamma(constant_mean * contrast_ratio, looks)?,
            }),
            1..=6 => {
                let (alpha, gamma) = G0_SITUATION_PARAMS[id as usize - 1];
                Ok(Situation {
                    id,
                    background: ReturnModel::g0(alpha, gamma, looks)?,
                    foreground: ReturnModel::g0(alpha, gamma * contrast_ratio, looks)?,
                })
            }
            other => Err(Error::Validation(vec![format!(
                "situation id must be 0..=6, got {other}"
            )])),
        }
    }

    /// Mean of the background return law.
    pub fn background_mean(&self) -> Result<f64> {
        self.background.mean()
    }

    /// The layout whose truth image this situation corrupts: the base
    /// geometry with the situation's own background mean.
    pub fn truth_layout(&self, base: &PhantomLayout) -> Result<PhantomLayout> {
        Ok(base.clone().with_background_mean(self.background_mean()?))
    }
}

/// Draws one corrupted image: every background pixel independently from the
/// situation's background model, every feature pixel from its foreground
/// model. The two regions consume independent generators split from `rng`,
/// so swapping one region's model never disturbs the other region's draws.
pub fn corrupt(layout: &PhantomLayout, situation: &Situation, rng: &mut Rng) -> Result<Image> {
    layout.validate()?;
    let mut bg_rng = rng.split();
    let mut fg_rng = rng.split();
    let bg = ModelSampler::new(&situation.background)?;
    let fg = ModelSampler::new(&situation.foreground)?;
    Image::from_fn(layout.width, layout.height, |x, y| {
        if layout.is_feature(x, y) {
            fg.sample_one(&mut fg_rng)
        } else {
            bg.sample_one(&mut bg_rng)
        }
    })
}
