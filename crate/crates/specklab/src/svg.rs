//! Self-contained SVG boxplot panels: one file per metric, one horizontal
//! box-and-whisker row per (filter, situation) group. Rows are labelled by
//! filter letter and situation digit ('L' for Lee, 'G' for the G0 MAP
//! filter, 'H' for the GH MAP filter, so e.g. `L3` or `H0`).

use crate::metrics::Metric;
use crate::montecarlo::BoxplotSummary;

const WIDTH: f64 = 760.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 42.0;
const ROW_HEIGHT: f64 = 22.0;
const BOX_HALF: f64 = 6.0;

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let magnitude = v.abs();
    if (0.01..100_000.0).contains(&magnitude) {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

/// Renders every summary of `metric` into one standalone SVG document.
/// Summaries should already be restricted to a single metric; entries for
/// other metrics are ignored.
pub fn render_boxplot_svg(metric: Metric, summaries: &[BoxplotSummary]) -> String {
    let rows: Vec<&BoxplotSummary> =
        summaries.iter().filter(|s| s.metric == metric).collect();
    let height = MARGIN_TOP + MARGIN_BOTTOM + ROW_HEIGHT * rows.len().max(1) as f64;

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in &rows {
        lo = lo.min(s.min).min(s.outliers.iter().copied().fold(f64::INFINITY, f64::min));
        hi = hi.max(s.max).max(s.outliers.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    }
    if !lo.is_finite() || !hi.is_finite() {
        lo = 0.0;
        hi = 1.0;
    }
    if hi - lo <= 0.0 {
        lo -= 1.0;
        hi += 1.0;
    }
    let span = hi - lo;
    let plot_width = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let x = |v: f64| MARGIN_LEFT + (v - lo) / span * plot_width;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{height}\" \
         viewBox=\"0 0 {WIDTH} {height}\" font-family=\"monospace\" font-size=\"11\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{height}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        metric.name()
    ));

    // Axis with five ticks.
    let axis_y = height - MARGIN_BOTTOM + 8.0;
    svg.push_str(&format!(
        "  <line x1=\"{}\" y1=\"{axis_y}\" x2=\"{}\" y2=\"{axis_y}\" stroke=\"black\"/>\n",
        MARGIN_LEFT,
        WIDTH - MARGIN_RIGHT
    ));
    for i in 0..=4 {
        let v = lo + span * i as f64 / 4.0;
        let tx = x(v);
        svg.push_str(&format!(
            "  <line x1=\"{tx}\" y1=\"{axis_y}\" x2=\"{tx}\" y2=\"{}\" stroke=\"black\"/>\n",
            axis_y + 4.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{tx}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            axis_y + 16.0,
            fmt_tick(v)
        ));
    }

    for (i, s) in rows.iter().enumerate() {
        let cy = MARGIN_TOP + ROW_HEIGHT * (i as f64 + 0.5);
        let label = format!("{}{}", s.filter.letter(), s.situation);
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" text-anchor=\"end\">{label}</text>\n",
            MARGIN_LEFT - 8.0,
            cy + 4.0
        ));
        // Whiskers span the non-outlier extremes.
        svg.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{cy}\" x2=\"{}\" y2=\"{cy}\" stroke=\"black\"/>\n",
            x(s.min),
            x(s.max)
        ));
        for v in [s.min, s.max] {
            svg.push_str(&format!(
                "  <line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n",
                x(v),
                cy - BOX_HALF / 2.0,
                cy + BOX_HALF / 2.0
            ));
        }
        svg.push_str(&format!(
            "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#cfe2f3\" stroke=\"black\"/>\n",
            x(s.q1),
            cy - BOX_HALF,
            (x(s.q3) - x(s.q1)).max(1.0),
            2.0 * BOX_HALF
        ));
        svg.push_str(&format!(
            "  <line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\" stroke-width=\"2\"/>\n",
            x(s.median),
            cy - BOX_HALF,
            cy + BOX_HALF
        ));
        for &o in &s.outliers {
            svg.push_str(&format!(
                "  <circle cx=\"{}\" cy=\"{cy}\" r=\"2\" fill=\"none\" stroke=\"black\"/>\n",
                x(o)
            ));
        }
    }

    svg.push_str("</svg>\n");
    svg
}
