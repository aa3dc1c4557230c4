//! Deterministic SVG scatter diagrams.
//!
//! Output is a pure function of the spec: fixed canvas, static stylesheet,
//! ticks at round values derived from the data range, and fixed-precision
//! coordinates, so identical specs give byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Highlight {
    Leader,
    Outsider,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub label: String,
    pub x: f64,
    pub y: f64,
    pub highlight: Highlight,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<ScatterPoint>,
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 560.0;
const MARGIN_LEFT: f64 = 74.0;
const MARGIN_RIGHT: f64 = 28.0;
const MARGIN_TOP: f64 = 48.0;
const MARGIN_BOTTOM: f64 = 64.0;
const TARGET_TICKS: usize = 6;

const STYLE: &str = "\
circle.point{fill:#5b8cb8;stroke:#2c3e50;stroke-width:0.6;}\
circle.point.leader{fill:#1a7f37;}\
circle.point.outsider{fill:#c0392b;}\
line.axis{stroke:#333333;stroke-width:1;}\
line.tick{stroke:#333333;stroke-width:1;}\
line.grid{stroke:#dddddd;stroke-width:0.5;}\
text{font-family:monospace;font-size:12px;fill:#222222;}\
text.title{font-size:15px;}";

struct Tick {
    value: f64,
    label: String,
}

/// Round ticks covering [min, max]: multiples of a 1/2/5 * 10^k step, with
/// labels rendered as exact decimal strings.
fn nice_ticks(min: f64, max: f64) -> Vec<Tick> {
    let (min, max) = if min == max {
        (min - 0.5, max + 0.5)
    } else {
        (min, max)
    };
    let raw_step = (max - min) / TARGET_TICKS as f64;
    let k = raw_step.log10().floor() as i32;
    let base = 10f64.powi(k);
    let mantissa = if raw_step / base <= 1.0 {
        1
    } else if raw_step / base <= 2.0 {
        2
    } else if raw_step / base <= 5.0 {
        5
    } else {
        10
    };
    let (mantissa, k) = if mantissa == 10 { (1, k + 1) } else { (mantissa, k) };
    let step = mantissa as f64 * 10f64.powi(k);
    let lo = (min / step).floor() as i64;
    let hi = (max / step).ceil() as i64;
    (lo..=hi)
        .map(|i| Tick {
            value: i as f64 * step,
            label: decimal_label(i * mantissa as i64, k),
        })
        .collect()
}

/// Exact decimal rendering of n * 10^exp without float formatting.
fn decimal_label(n: i64, exp: i32) -> String {
    if n == 0 {
        return "0".to_string();
    }
    let sign = if n < 0 { "-" } else { "" };
    let digits = n.unsigned_abs().to_string();
    if exp >= 0 {
        format!("{sign}{digits}{}", "0".repeat(exp as usize))
    } else {
        let shift = (-exp) as usize;
        if digits.len() > shift {
            let (head, tail) = digits.split_at(digits.len() - shift);
            let tail = tail.trim_end_matches('0');
            if tail.is_empty() {
                format!("{sign}{head}")
            } else {
                format!("{sign}{head}.{tail}")
            }
        } else {
            let tail = format!("{}{}", "0".repeat(shift - digits.len()), digits);
            let tail = tail.trim_end_matches('0');
            format!("{sign}0.{tail}")
        }
    }
}

fn escape_xml(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn highlight_class(h: Highlight) -> &'static str {
    match h {
        Highlight::Leader => "point leader",
        Highlight::Outsider => "point outsider",
        Highlight::None => "point",
    }
}

/// Render the spec to a self-contained SVG document.
pub fn render_svg(spec: &ScatterSpec) -> Result<String> {
    if spec.points.is_empty() {
        return Err(Error::Config("scatter spec has no points".to_string()));
    }
    if spec
        .points
        .iter()
        .any(|p| !p.x.is_finite() || !p.y.is_finite())
    {
        return Err(Error::Domain {
            context: "scatter point coordinates".to_string(),
        });
    }

    let xs: Vec<f64> = spec.points.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = spec.points.iter().map(|p| p.y).collect();
    let x_min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let x_max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let y_min = ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let y_max = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    let x_ticks = nice_ticks(x_min, x_max);
    let y_ticks = nice_ticks(y_min, y_max);
    let x_lo = x_ticks.first().expect("ticks nonempty").value;
    let x_hi = x_ticks.last().expect("ticks nonempty").value;
    let y_lo = y_ticks.first().expect("ticks nonempty").value;
    let y_hi = y_ticks.last().expect("ticks nonempty").value;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |v: f64| MARGIN_LEFT + (v - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |v: f64| MARGIN_TOP + plot_h - (v - y_lo) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n<style>{STYLE}</style>\n"
    );
    let _ = writeln!(
        svg,
        "<text class=\"title\" x=\"{:.2}\" y=\"24\" text-anchor=\"middle\">{}</text>",
        WIDTH / 2.0,
        escape_xml(&spec.title)
    );

    // Gridlines and ticks.
    for t in &x_ticks {
        let x = sx(t.value);
        let _ = writeln!(
            svg,
            "<line class=\"grid\" x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\"/>",
            MARGIN_TOP,
            MARGIN_TOP + plot_h
        );
        let _ = writeln!(
            svg,
            "<line class=\"tick\" x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\"/>",
            MARGIN_TOP + plot_h,
            MARGIN_TOP + plot_h + 5.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            MARGIN_TOP + plot_h + 18.0,
            t.label
        );
    }
    for t in &y_ticks {
        let y = sy(t.value);
        let _ = writeln!(
            svg,
            "<line class=\"grid\" x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\"/>",
            MARGIN_LEFT,
            MARGIN_LEFT + plot_w
        );
        let _ = writeln!(
            svg,
            "<line class=\"tick\" x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\"/>",
            MARGIN_LEFT - 5.0,
            MARGIN_LEFT
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            MARGIN_LEFT - 9.0,
            y + 4.0,
            t.label
        );
    }

    // Axes.
    let _ = writeln!(
        svg,
        "<line class=\"axis\" x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\"/>",
        MARGIN_LEFT,
        MARGIN_TOP + plot_h,
        MARGIN_LEFT + plot_w,
        MARGIN_TOP + plot_h
    );
    let _ = writeln!(
        svg,
        "<line class=\"axis\" x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\"/>",
        MARGIN_LEFT, MARGIN_TOP, MARGIN_LEFT,
        MARGIN_TOP + plot_h
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 16.0,
        escape_xml(&spec.x_label)
    );
    let _ = writeln!(
        svg,
        "<text x=\"18\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2})\">{}</text>",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        escape_xml(&spec.y_label)
    );

    // One circle per point; highlight via CSS class.
    for p in &spec.points {
        let _ = writeln!(
            svg,
            "<circle class=\"{}\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\"><title>{}</title></circle>",
            highlight_class(p.highlight),
            sx(p.x),
            sy(p.y),
            escape_xml(&p.label)
        );
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Render and write the SVG to a file.
pub fn emit_scatter(spec: &ScatterSpec, out: &Path) -> Result<()> {
    let svg = render_svg(spec)?;
    std::fs::write(out, svg).map_err(|e| Error::io(out.display().to_string(), e))
}
