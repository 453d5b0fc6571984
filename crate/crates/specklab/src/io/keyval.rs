//! Plain-text `key=value` configuration files for phantom layouts and
//! experiment specifications. Lines starting with `#` and blank lines are
//! ignored; unknown keys are rejected so typos cannot silently fall back to
//! defaults.

use crate::distributions::Looks;
use crate::error::{Error, Result};
use crate::filters::FilterMethod;
use crate::io::{format_f64, parse_f64};
use crate::montecarlo::ExperimentSpec;
use crate::phantom::{PhantomLayout, Rect, Strip};

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

fn parse_pairs(text: &str, path: &Path) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Format {
                path: path.to_path_buf(),
                message: format!("line {}: expected key=value, got '{line}'", lineno + 1),
            });
        };
        if out.insert(key.trim().to_string(), value.trim().to_string()).is_some() {
            return Err(Error::Format {
                path: path.to_path_buf(),
                message: format!("line {}: duplicate key '{}'", lineno + 1, key.trim()),
            });
        }
    }
    Ok(out)
}

fn take(pairs: &mut BTreeMap<String, String>, key: &str, path: &Path) -> Result<String> {
    pairs.remove(key).ok_or_else(|| Error::Format {
        path: path.to_path_buf(),
        message: format!("missing key '{key}'"),
    })
}

fn reject_unknown(pairs: &BTreeMap<String, String>, path: &Path) -> Result<()> {
    if let Some(key) = pairs.keys().next() {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: format!("unknown key '{key}'"),
        });
    }
    Ok(())
}

fn parse_usize(s: &str, path: &Path, what: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| Error::Format {
        path: path.to_path_buf(),
        message: format!("invalid {what}: '{s}'"),
    })
}

fn parse_usize_list(s: &str, path: &Path, what: &str) -> Result<Vec<usize>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|item| parse_usize(item, path, what)).collect()
}

/// Serializes a layout to the documented key=value schema.
pub fn layout_to_string(layout: &PhantomLayout) -> String {
    let widths: Vec<String> = layout.strips.iter().map(|s| s.width.to_string()).collect();
    let cols: Vec<String> = layout.strips.iter().map(|s| s.col.to_string()).collect();
    let points: Vec<String> = layout.point_cols.iter().map(|c| c.to_string()).collect();
    let hb = layout.homogeneous_block;
    format!(
        "# phantom layout\n\
         width={}\n\
         height={}\n\
         background_mean={}\n\
         contrast_ratio={}\n\
         strip_rows={}..{}\n\
         strip_widths={}\n\
         strip_cols={}\n\
         point_row={}\n\
         point_cols={}\n\
         homogeneous_block={},{},{},{}\n",
        layout.width,
        layout.height,
        format_f64(layout.background_mean),
        format_f64(layout.contrast_ratio),
        layout.strip_row_start,
        layout.strip_row_end,
        widths.join(","),
        cols.join(","),
        layout.point_row,
        points.join(","),
        hb.x0,
        hb.y0,
        hb.x1,
        hb.y1,
    )
}

pub fn write_layout(path: &Path, layout: &PhantomLayout) -> Result<()> {
    fs::write(path, layout_to_string(layout))?;
    Ok(())
}

pub fn layout_from_string(text: &str, path: &Path) -> Result<PhantomLayout> {
    let mut pairs = parse_pairs(text, path)?;
    let width = parse_usize(&take(&mut pairs, "width", path)?, path, "width")?;
    let height = parse_usize(&take(&mut pairs, "height", path)?, path, "height")?;
    let background_mean =
        parse_f64(&take(&mut pairs, "background_mean", path)?, path, "background_mean")?;
    let contrast_ratio =
        parse_f64(&take(&mut pairs, "contrast_ratio", path)?, path, "contrast_ratio")?;
    let rows = take(&mut pairs, "strip_rows", path)?;
    let Some((start, end)) = rows.split_once("..") else {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: format!("strip_rows must be 'start..end', got '{rows}'"),
        });
    };
    let strip_row_start = parse_usize(start, path, "strip row start")?;
    let strip_row_end = parse_usize(end, path, "strip row end")?;
    let widths = parse_usize_list(&take(&mut pairs, "strip_widths", path)?, path, "strip width")?;
    let cols = parse_usize_list(&take(&mut pairs, "strip_cols", path)?, path, "strip column")?;
    if widths.len() != cols.len() {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: format!("{} strip widths but {} columns", widths.len(), cols.len()),
        });
    }
    let point_row = parse_usize(&take(&mut pairs, "point_row", path)?, path, "point row")?;
    let point_cols =
        parse_usize_list(&take(&mut pairs, "point_cols", path)?, path, "point column")?;
    let hb = parse_usize_list(&take(&mut pairs, "homogeneous_block", path)?, path, "block bound")?;
    if hb.len() != 4 {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: "homogeneous_block must be x0,y0,x1,y1".to_string(),
        });
    }
    reject_unknown(&pairs, path)?;
    Ok(PhantomLayout {
        width,
        height,
        background_mean,
        contrast_ratio,
        strip_row_start,
        strip_row_end,
        strips: widths
            .into_iter()
            .zip(cols)
            .map(|(width, col)| Strip { width, col })
            .collect(),
        point_row,
        point_cols,
        homogeneous_block: Rect::new(hb[0], hb[1], hb[2], hb[3]),
    })
}

pub fn read_layout(path: &Path) -> Result<PhantomLayout> {
    let text = fs::read_to_string(path)?;
    layout_from_string(&text, path)
}

/// Serializes an experiment spec. The layout is either the word `canonical`
/// or a path to a layout file, resolved relative to the spec file.
pub fn experiment_to_string(spec: &ExperimentSpec, layout_ref: &str) -> String {
    let situations: Vec<String> = spec.situations.iter().map(|s| s.to_string()).collect();
    let filters: Vec<&str> = spec.filters.iter().map(|f| f.name()).collect();
    format!(
        "# experiment specification\n\
         situations={}\n\
         filters={}\n\
         replications={}\n\
         master_seed={}\n\
         looks={}\n\
         window={}\n\
         contrast_ratio={}\n\
         layout={}\n",
        situations.join(","),
        filters.join(","),
        spec.replications,
        spec.master_seed,
        format_f64(spec.looks.get()),
        spec.window,
        format_f64(spec.contrast_ratio),
        layout_ref,
    )
}

pub fn experiment_from_string(text: &str, path: &Path) -> Result<ExperimentSpec> {
    let mut pairs = parse_pairs(text, path)?;
    let situations: Vec<u8> = take(&mut pairs, "situations", path)?
        .split(',')
        .map(|s| {
            s.trim().parse::<u8>().map_err(|_| Error::Format {
                path: path.to_path_buf(),
                message: format!("invalid situation id '{s}'"),
            })
        })
        .collect::<Result<_>>()?;
    let filters: Vec<FilterMethod> = take(&mut pairs, "filters", path)?
        .split(',')
        .map(|f| FilterMethod::parse(f.trim()))
        .collect::<Result<_>>()?;
    let replications = take(&mut pairs, "replications", path)?
        .parse::<u32>()
        .map_err(|_| Error::Format {
            path: path.to_path_buf(),
            message: "invalid replications".to_string(),
        })?;
    let master_seed = take(&mut pairs, "master_seed", path)?
        .parse::<u64>()
        .map_err(|_| Error::Format {
            path: path.to_path_buf(),
            message: "invalid master_seed".to_string(),
        })?;
    let looks = Looks::new(parse_f64(&take(&mut pairs, "looks", path)?, path, "looks")?)?;
    let window = parse_usize(&take(&mut pairs, "window", path)?, path, "window")?;
    let contrast_ratio =
        parse_f64(&take(&mut pairs, "contrast_ratio", path)?, path, "contrast_ratio")?;
    let layout_ref = take(&mut pairs, "layout", path)?;
    reject_unknown(&pairs, path)?;

    let layout = if layout_ref == "canonical" {
        PhantomLayout::canonical()
    } else {
        let layout_path = if Path::new(&layout_ref).is_absolute() {
            Path::new(&layout_ref).to_path_buf()
        } else {
            path.parent().unwrap_or_else(|| Path::new(".")).join(&layout_ref)
        };
        read_layout(&layout_path)?
    };

    Ok(ExperimentSpec {
        situations,
        filters,
        replications,
        master_seed,
        looks,
        window,
        layout,
        contrast_ratio,
    })
}

pub fn read_experiment(path: &Path) -> Result<ExperimentSpec> {
    let text = fs::read_to_string(path)?;
    experiment_from_string(&text, path)
}
