//! Standalone SVG plots: QQ plots and CDF overlays.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use reactive_paths::stats::{dkw_bound, EmpiricalSample};
use reactive_paths::LimitLaw;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 48.0;
/// QQ plots keep at most this many points.
const MAX_QQ_POINTS: usize = 400;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// What the sample quantiles are plotted against.
#[derive(Debug, Clone)]
pub enum QqReference<'a> {
    Law(&'a LimitLaw),
    Sample(&'a EmpiricalSample),
}

impl QqReference<'_> {
    fn quantile(&self, p: f64) -> Option<f64> {
        match self {
            QqReference::Law(law) => law.quantile(p).ok(),
            QqReference::Sample(s) => Some(s.quantile(p)),
        }
    }
}

/// One QQ point with its pointwise 95% DKW band in quantile space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QqPoint {
    pub level: f64,
    pub reference: f64,
    pub sample: f64,
    pub band_lo: f64,
    pub band_hi: f64,
}

impl QqPoint {
    pub fn in_band(&self) -> bool {
        self.sample >= self.band_lo && self.sample <= self.band_hi
    }
}

/// QQ points at levels `(i - 0.5)/n`, thinned to at most 400.
///
/// The band at level `p` is `[Q(p - δ), Q(p + δ)]` with `δ` the DKW bound at
/// 5%, clipped to the open unit interval.
pub fn qq_points(sample: &EmpiricalSample, reference: &QqReference) -> Vec<QqPoint> {
    let n = sample.n();
    let delta = dkw_bound(n, 0.05);
    let stride = n.div_ceil(MAX_QQ_POINTS).max(1);
    let clip = |p: f64| p.clamp(1e-12, 1.0 - 1e-12);
    (0..n)
        .step_by(stride)
        .filter_map(|i| {
            let level = (i as f64 + 0.5) / n as f64;
            Some(QqPoint {
                level,
                reference: reference.quantile(level)?,
                sample: sample.values()[i],
                band_lo: reference.quantile(clip(level - delta))?,
                band_hi: reference.quantile(clip(level + delta))?,
            })
        })
        .collect()
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let range = |it: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = it
                .filter(|v| v.is_finite())
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(v), hi.max(v))
                });
            if !lo.is_finite() {
                (0.0, 1.0)
            } else if hi - lo < 1e-12 {
                (lo - 0.5, hi + 0.5)
            } else {
                (lo, hi)
            }
        };
        let (x0, x1) = range(&mut xs.clone());
        let (y0, y1) = range(&mut ys.clone());
        Self { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (SIZE - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        SIZE - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (SIZE - 2.0 * MARGIN)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn open(out: &mut String, title: &str, frame: &Frame, x_label: &str, y_label: &str) {
    let _ = write!(
        out,
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n\
         <rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        SIZE / 2.0,
        escape(title),
        SIZE - 2.0 * MARGIN,
        SIZE - 2.0 * MARGIN,
    );
    let _ = write!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\">{}</text>\n\
         <text x=\"14\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 14 {})\">{}</text>\n\
         <text x=\"{MARGIN}\" y=\"{}\" font-size=\"10\">{:.3}</text>\n\
         <text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{:.3}</text>\n\
         <text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{:.3}</text>\n\
         <text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{:.3}</text>\n",
        SIZE / 2.0,
        SIZE - 10.0,
        escape(x_label),
        SIZE / 2.0,
        SIZE / 2.0,
        escape(y_label),
        SIZE - MARGIN + 14.0,
        frame.x0,
        SIZE - MARGIN,
        SIZE - MARGIN + 14.0,
        frame.x1,
        MARGIN - 4.0,
        SIZE - MARGIN,
        frame.y0,
        MARGIN - 4.0,
        MARGIN + 10.0,
        frame.y1,
    );
}

fn polyline(out: &mut String, frame: &Frame, pts: &[(f64, f64)], color: &str, dash: bool) {
    let coords: Vec<String> = pts
        .iter()
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
        .collect();
    let _ = writeln!(
        out,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"{}/>",
        coords.join(" "),
        if dash {
            " stroke-dasharray=\"4 3\""
        } else {
            ""
        }
    );
}

pub fn qq_svg(sample: &EmpiricalSample, reference: &QqReference, title: &str) -> String {
    let pts = qq_points(sample, reference);
    let all = pts
        .iter()
        .flat_map(|p| [p.reference, p.sample, p.band_lo, p.band_hi]);
    let lo = all
        .clone()
        .filter(|v| v.is_finite())
        .fold(f64::INFINITY, f64::min);
    let hi = all
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    let span = [lo, hi];
    let frame = Frame::fit(span.iter().copied(), span.iter().copied());
    let mut out = String::new();
    open(
        &mut out,
        title,
        &frame,
        "reference quantile",
        "sample quantile",
    );
    polyline(
        &mut out,
        &frame,
        &[(frame.x0, frame.x0), (frame.x1, frame.x1)],
        "gray",
        true,
    );
    let lo_band: Vec<(f64, f64)> = pts.iter().map(|p| (p.reference, p.band_lo)).collect();
    let hi_band: Vec<(f64, f64)> = pts.iter().map(|p| (p.reference, p.band_hi)).collect();
    polyline(&mut out, &frame, &lo_band, "#aaaaaa", false);
    polyline(&mut out, &frame, &hi_band, "#aaaaaa", false);
    for p in &pts {
        if p.reference.is_finite() && p.sample.is_finite() {
            let _ = writeln!(
                out,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"{}\"/>",
                frame.px(p.reference),
                frame.py(p.sample),
                COLORS[0]
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// A named curve for [`cdf_overlay_svg`].
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Curve {
    /// Step points of an empirical CDF, thinned to about 400 knots.
    pub fn ecdf(label: impl Into<String>, sample: &EmpiricalSample) -> Self {
        let n = sample.n();
        let stride = n.div_ceil(MAX_QQ_POINTS).max(1);
        let mut points: Vec<(f64, f64)> = (0..n)
            .step_by(stride)
            .map(|i| (sample.values()[i], (i + 1) as f64 / n as f64))
            .collect();
        if let Some(&last) = sample.values().last() {
            points.push((last, 1.0));
        }
        Self {
            label: label.into(),
            points,
        }
    }

    pub fn function(label: impl Into<String>, lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> Self {
        let points = (0..=200)
            .map(|k| {
                let x = lo + (hi - lo) * k as f64 / 200.0;
                (x, f(x))
            })
            .collect();
        Self {
            label: label.into(),
            points,
        }
    }
}

pub fn cdf_overlay_svg(curves: &[Curve], title: &str, x_label: &str) -> String {
    let xs = curves.iter().flat_map(|c| c.points.iter().map(|p| p.0));
    let ys = curves.iter().flat_map(|c| c.points.iter().map(|p| p.1));
    let frame = Frame::fit(xs, ys);
    let mut out = String::new();
    open(&mut out, title, &frame, x_label, "probability");
    for (k, c) in curves.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        polyline(&mut out, &frame, &c.points, color, k > 0);
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"{color}\">{}</text>",
            MARGIN + 8.0,
            MARGIN + 16.0 + 14.0 * k as f64,
            escape(&c.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn emit_qq_svg(
    sample: &EmpiricalSample,
    reference: &QqReference,
    title: &str,
    path: &Path,
) -> io::Result<()> {
    std::fs::write(path, qq_svg(sample, reference, title))
}
