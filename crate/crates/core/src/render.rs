//! SVG output: per-factor circle packings, limit-set samples and
//! log-linear fit plots. Output depends only on the input, never on time
//! or iteration order of hash maps.

use std::fmt::Write;

use num_complex::Complex64;

use crate::orbit::TorusRecord;

#[derive(Debug, Clone, PartialEq)]
pub struct PackingOptions {
    pub factor: usize,
    /// Side of the square canvas in pixels.
    pub size: f64,
    /// `[x_min, x_max, y_min, y_max]` in the plane.
    pub view: [f64; 4],
    /// Circles with smaller radius are dropped.
    pub radius_floor: f64,
}

impl Default for PackingOptions {
    fn default() -> Self {
        Self {
            factor: 0,
            size: 800.0,
            view: [-3.5, 3.5, -3.5, 3.5],
            radius_floor: 1e-3,
        }
    }
}

struct Frame {
    view: [f64; 4],
    w: f64,
    h: f64,
}

impl Frame {
    fn x(&self, x: f64) -> f64 {
        (x - self.view[0]) / (self.view[1] - self.view[0]) * self.w
    }

    fn y(&self, y: f64) -> f64 {
        (self.view[3] - y) / (self.view[3] - self.view[2]) * self.h
    }

    fn scale(&self) -> f64 {
        self.w / (self.view[1] - self.view[0])
    }
}

fn open(out: &mut String, w: f64, h: f64, extra: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}"{extra}>"#
    );
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
}

/// Number of circles `render_packing` draws.
pub fn drawn_circles(records: &[TorusRecord], opts: &PackingOptions) -> usize {
    records
        .iter()
        .filter(|r| r.factors.get(opts.factor).is_some_and(|f| f.radius >= opts.radius_floor))
        .count()
}

/// One `<path>` per factor circle with radius at least the floor.
pub fn render_packing(records: &[TorusRecord], opts: &PackingOptions) -> String {
    let f = Frame {
        view: opts.view,
        w: opts.size,
        h: opts.size,
    };
    let mut out = String::new();
    open(&mut out, opts.size, opts.size, "");
    out.push_str("<g fill=\"none\" stroke=\"black\" stroke-width=\"0.5\">\n");
    for rec in records {
        let Some(c) = rec.factors.get(opts.factor) else {
            continue;
        };
        if c.radius < opts.radius_floor {
            continue;
        }
        let (cx, cy, r) = (f.x(c.center.re), f.y(c.center.im), c.radius * f.scale());
        let _ = writeln!(
            out,
            r#"<path d="M {:.4} {cy:.4} A {r:.4} {r:.4} 0 1 0 {:.4} {cy:.4} A {r:.4} {r:.4} 0 1 0 {:.4} {cy:.4} Z"/>"#,
            cx - r,
            cx + r,
            cx - r
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// Dots at the given points of one factor.
pub fn render_points(points: &[Complex64], size: f64, view: [f64; 4]) -> String {
    let f = Frame { view, w: size, h: size };
    let mut out = String::new();
    open(&mut out, size, size, "");
    out.push_str("<g fill=\"black\">\n");
    for z in points {
        let _ = writeln!(out, r#"<circle cx="{:.4}" cy="{:.4}" r="0.6"/>"#, f.x(z.re), f.y(z.im));
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// Exact `(min, max)` of each coordinate; a degenerate range is widened
/// by `0.5` on both sides.
pub fn axis_ranges(points: &[(f64, f64)]) -> ((f64, f64), (f64, f64)) {
    let ext = |sel: fn(&(f64, f64)) -> f64| {
        let lo = points.iter().map(sel).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(sel).fold(f64::NEG_INFINITY, f64::max);
        match (lo.is_finite(), lo < hi) {
            (false, _) => (0.0, 1.0),
            (true, true) => (lo, hi),
            (true, false) => (lo - 0.5, hi + 0.5),
        }
    };
    (ext(|p| p.0), ext(|p| p.1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitPlot<'a> {
    pub points: &'a [(f64, f64)],
    /// `(slope, intercept)` of the fitted line.
    pub line: Option<(f64, f64)>,
    pub x_label: &'a str,
    pub y_label: &'a str,
}

/// Scatter of `(x, y)` with the fitted line; the axes span the data
/// extent exactly and are recorded in `data-x-range` / `data-y-range`.
pub fn render_fit_plot(plot: &FitPlot<'_>) -> String {
    let (w, h, m) = (640.0, 480.0, 50.0);
    let ((x0, x1), (y0, y1)) = axis_ranges(plot.points);
    let px = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let py = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
    let mut out = String::new();
    open(
        &mut out,
        w,
        h,
        &format!(r#" data-x-range="{x0} {x1}" data-y-range="{y0} {y1}""#),
    );
    let _ = writeln!(
        out,
        r#"<clipPath id="plot"><rect x="{m}" y="{m}" width="{}" height="{}"/></clipPath>"#,
        w - 2.0 * m,
        h - 2.0 * m
    );
    let _ = writeln!(
        out,
        r#"<path d="M {m} {m} L {m} {b} L {r} {b}" fill="none" stroke="black"/>"#,
        b = h - m,
        r = w - m
    );
    for (x, anchor) in [(x0, "start"), (x1, "end")] {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="{anchor}">{x:.4}</text>"#,
            px(x),
            h - m + 16.0
        );
    }
    for y in [y0, y1] {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{y:.4}</text>"#,
            m - 4.0,
            py(y) + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
        w / 2.0,
        h - 10.0,
        escape(plot.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {:.2})">{}</text>"#,
        h / 2.0,
        h / 2.0,
        escape(plot.y_label)
    );
    out.push_str("<g fill=\"steelblue\">\n");
    for &(x, y) in plot.points {
        let _ = writeln!(out, r#"<circle cx="{:.3}" cy="{:.3}" r="2.5"/>"#, px(x), py(y));
    }
    out.push_str("</g>\n");
    if let Some((slope, icept)) = plot.line {
        let _ = writeln!(
            out,
            r#"<path clip-path="url(#plot)" d="M {:.3} {:.3} L {:.3} {:.3}" stroke="firebrick" fill="none"/>"#,
            px(x0),
            py(icept + slope * x0),
            px(x1),
            py(icept + slope * x1)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Intercept of the least-squares line through `points` with the given slope.
pub fn intercept(points: &[(f64, f64)], slope: f64) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    my - slope * mx
}
