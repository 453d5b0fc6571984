//! Result and summary tables.
//!
//! Results CSV (header mandatory):
//! `situation,filter,replication,seed,enl,line_pres,edge_gradient,edge_variance`
//! with reals at 17 significant digits, making every row reparse to the
//! exact `f64`. Summary CSV:
//! `situation,filter,metric,min,q1,median,q3,max,n_outliers`.

use crate::error::{Error, Result};
use crate::filters::FilterMethod;
use crate::io::{format_f64, parse_f64};
use crate::metrics::MetricRecord;
use crate::montecarlo::{BoxplotSummary, ReplicationResult};

use std::fs;
use std::path::Path;

pub const RESULTS_HEADER: &str =
    "situation,filter,replication,seed,enl,line_pres,edge_gradient,edge_variance";
pub const SUMMARY_HEADER: &str = "situation,filter,metric,min,q1,median,q3,max,n_outliers";

pub fn results_row(r: &ReplicationResult) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        r.situation,
        r.filter.name(),
        r.replication,
        r.seed,
        format_f64(r.record.enl),
        format_f64(r.record.line_preservation),
        format_f64(r.record.edge_gradient),
        format_f64(r.record.edge_variance),
    )
}

pub fn results_to_string(results: &[ReplicationResult]) -> String {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for r in results {
        out.push_str(&results_row(r));
        out.push('\n');
    }
    out
}

pub fn write_results(path: &Path, results: &[ReplicationResult]) -> Result<()> {
    fs::write(path, results_to_string(results))?;
    Ok(())
}

fn parse_row(line: &str, path: &Path) -> Result<ReplicationResult> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 8 {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: format!("expected 8 fields, got {}: '{line}'", fields.len()),
        });
    }
    let situation = fields[0].parse::<u8>().map_err(|_| Error::Format {
        path: path.to_path_buf(),
        message: format!("invalid situation '{}'", fields[0]),
    })?;
    let filter = FilterMethod::parse(fields[1]).map_err(|_| Error::Format {
        path: path.to_path_buf(),
        message: format!("invalid filter '{}'", fields[1]),
    })?;
    let replication = fields[2].parse::<u32>().map_err(|_| Error::Format {
        path: path.to_path_buf(),
        message: format!("invalid replication '{}'", fields[2]),
    })?;
    let seed = fields[3].parse::<u64>().map_err(|_| Error::Format {
        path: path.to_path_buf(),
        message: format!("invalid seed '{}'", fields[3]),
    })?;
    Ok(ReplicationResult {
        situation,
        filter,
        replication,
        seed,
        record: MetricRecord {
            enl: parse_f64(fields[4], path, "enl")?,
            line_preservation: parse_f64(fields[5], path, "line_pres")?,
            edge_gradient: parse_f64(fields[6], path, "edge_gradient")?,
            edge_variance: parse_f64(fields[7], path, "edge_variance")?,
        },
    })
}

pub fn results_from_string(text: &str, path: &Path) -> Result<Vec<ReplicationResult>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == RESULTS_HEADER => {}
        other => {
            return Err(Error::Format {
                path: path.to_path_buf(),
                message: format!("bad results header: {other:?}"),
            })
        }
    }
    lines.filter(|l| !l.trim().is_empty()).map(|l| parse_row(l, path)).collect()
}

pub fn read_results(path: &Path) -> Result<Vec<ReplicationResult>> {
    let text = fs::read_to_string(path)?;
    results_from_string(&text, path)
}

pub fn summary_to_string(summaries: &[BoxplotSummary]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for s in summaries {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            s.situation,
            s.filter.name(),
            s.metric.name(),
            format_f64(s.min),
            format_f64(s.q1),
            format_f64(s.median),
            format_f64(s.q3),
            format_f64(s.max),
            s.outliers.len(),
        ));
    }
    out
}

pub fn write_summary(path: &Path, summaries: &[BoxplotSummary]) -> Result<()> {
    fs::write(path, summary_to_string(summaries))?;
    Ok(())
}

/// One assessed image as a standalone CSV (header plus a single row).
pub fn record_to_csv(record: &MetricRecord) -> String {
    format!(
        "enl,line_pres,edge_gradient,edge_variance\n{},{},{},{}\n",
        format_f64(record.enl),
        format_f64(record.line_preservation),
        format_f64(record.edge_gradient),
        format_f64(record.edge_variance),
    )
}
