//! Quality measures of a filtered image against the known phantom:
//! equivalent number of looks over a homogeneous block, line-contrast
//! preservation, and edge gradient/variance from paired bands.
//!
//! Direction of merit: the equivalent number of looks is higher-is-better;
//! the remaining three measures are lower-is-better. Comparison helpers must
//! honor this convention.

use crate::error::{Error, Result};
use crate::estimation::{estimate_enl, SampleStats};
use crate::image::Image;
use crate::phantom::{LineTriple, PhantomLayout, Rect};

/// The four protocol measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Enl,
    LinePreservation,
    EdgeGradient,
    EdgeVariance,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::Enl,
        Metric::LinePreservation,
        Metric::EdgeGradient,
        Metric::EdgeVariance,
    ];

    /// Column name used in result files.
    pub fn name(self) -> &'static str {
        match self {
            Metric::Enl => "enl",
            Metric::LinePreservation => "line_pres",
            Metric::EdgeGradient => "edge_gradient",
            Metric::EdgeVariance => "edge_variance",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "enl" => Ok(Metric::Enl),
            "line_pres" => Ok(Metric::LinePreservation),
            "edge_gradient" => Ok(Metric::EdgeGradient),
            "edge_variance" => Ok(Metric::EdgeVariance),
            other => Err(Error::Validation(vec![format!("unknown metric '{other}'")])),
        }
    }

    /// The equivalent number of looks is the one measure where larger values
    /// indicate a better filter.
    pub fn higher_is_better(self) -> bool {
        matches!(self, Metric::Enl)
    }

    /// True when `a` beats `b` under this metric's direction of merit.
    pub fn better(self, a: f64, b: f64) -> bool {
        if self.higher_is_better() {
            a > b
        } else {
            a < b
        }
    }
}

/// One filtered image's four measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricRecord {
    pub enl: f64,
    pub line_preservation: f64,
    pub edge_gradient: f64,
    pub edge_variance: f64,
}

impl MetricRecord {
    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Enl => self.enl,
            Metric::LinePreservation => self.line_preservation,
            Metric::EdgeGradient => self.edge_gradient,
            Metric::EdgeVariance => self.edge_variance,
        }
    }
}

/// Which strips contribute to the edge measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeAggregation {
    /// The widest strip's left edge only.
    #[default]
    WidestStrip,
    /// Mean over the edges of every strip wide enough to carry bands.
    AllWideStrips,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AssessOptions {
    pub edges: EdgeAggregation,
}

/// Equivalent number of looks over a homogeneous region of interest.
pub fn metric_enl(image: &Image, roi: &Rect) -> Result<f64> {
    estimate_enl(&roi.extract(image))
}

fn roi_mean(image: &Image, roi: &Rect) -> Result<f64> {
    let values = roi.extract(image);
    if values.is_empty() {
        return Err(Error::InsufficientData("empty region of interest".into()));
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// The filtered line contrast `2·x_l - (x_l1 + x_l2)/2` from the three
/// column means.
pub fn line_contrast(image: &Image, line: &LineTriple) -> Result<f64> {
    let center = roi_mean(image, &line.center)?;
    let left = roi_mean(image, &line.left)?;
    let right = roi_mean(image, &line.right)?;
    Ok(2.0 * center - (left + right) / 2.0)
}

/// Absolute deviation of the filtered line contrast from the truth contrast;
/// zero means the one-pixel line survived filtering unchanged.
pub fn metric_line(image: &Image, line: &LineTriple, truth_contrast: f64) -> Result<f64> {
    Ok((line_contrast(image, line)? - truth_contrast).abs())
}

/// Edge measures from one pair of bands: the absolute difference of the band
/// means, and the same with unbiased variances.
pub fn metric_edge(image: &Image, inside: &Rect, outside: &Rect) -> Result<(f64, f64)> {
    let a = SampleStats::from_samples(&inside.extract(image))?;
    let b = SampleStats::from_samples(&outside.extract(image))?;
    Ok(((a.mean - b.mean).abs(), (a.variance - b.variance).abs()))
}

/// Computes all four measures of `filtered` against the `truth` image on the
/// layout's regions of interest. The truth contrast is measured on the truth
/// image with the same line formula.
pub fn assess(filtered: &Image, layout: &PhantomLayout, truth: &Image) -> Result<MetricRecord> {
    assess_with(filtered, layout, truth, AssessOptions::default())
}

pub fn assess_with(
    filtered: &Image,
    layout: &PhantomLayout,
    truth: &Image,
    options: AssessOptions,
) -> Result<MetricRecord> {
    for (label, img) in [("filtered", filtered), ("truth", truth)] {
        if img.width() != layout.width || img.height() != layout.height {
            return Err(Error::Dimension(format!(
                "{label} image is {}x{}, layout expects {}x{}",
                img.width(),
                img.height(),
                layout.width,
                layout.height
            )));
        }
    }
    let registry = layout.roi_registry()?;

    // A perfectly flat block (e.g. assessing the truth against itself) has
    // no residual speckle at all; report that as an infinite equivalent
    // number of looks instead of failing the whole record.
    let enl = match metric_enl(filtered, &registry.homogeneous_block) {
        Ok(v) => v,
        Err(Error::DegenerateSample(_)) => f64::INFINITY,
        Err(other) => return Err(other),
    };
    let truth_contrast = line_contrast(truth, &registry.line)?;
    let line_preservation = metric_line(filtered, &registry.line, truth_contrast)?;

    let selected: Vec<_> = match options.edges {
        EdgeAggregation::WidestStrip => registry.edges.last().into_iter().collect(),
        EdgeAggregation::AllWideStrips => registry.edges.iter().collect(),
    };
    if selected.is_empty() {
        return Err(Error::InsufficientData(
            "layout has no strip wide enough for edge bands".into(),
        ));
    }
    let mut gradient = 0.0;
    let mut variance = 0.0;
    for bands in &selected {
        let (g, v) = metric_edge(filtered, &bands.inside, &bands.outside)?;
        gradient += g;
        variance += v;
    }
    gradient /= selected.len() as f64;
    variance /= selected.len() as f64;

    Ok(MetricRecord { enl, line_preservation, edge_gradient: gradient, edge_variance: variance })
}
