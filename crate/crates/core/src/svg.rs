//! Self-contained SVG scatter of a learning window: one dot per observed
//! (Δt, ΔG) bin with opacity equal to its frequency at that Δt, plus the
//! analytic expectation as a polyline.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::montecarlo::StdpWindow;

#[derive(Debug, Clone, PartialEq)]
pub struct SvgOptions {
    pub width: f64,
    pub height: f64,
    /// Bin height on the ΔG axis.
    pub level_bin: f64,
    pub title: Option<String>,
}

impl Default for SvgOptions {
    fn default() -> Self {
        Self {
            width: 720.0,
            height: 480.0,
            level_bin: 0.1,
            title: None,
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Tick positions at a 1-2-5 step covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(1e-12);
    let raw = span / 8.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step + 0.0).collect()
}

fn label(v: f64) -> String {
    let s = format!("{:.3}", v);
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn write_svg_scatter(w: &StdpWindow, opts: &SvgOptions) -> String {
    let (ml, mr, mt, mb) = (
        64.0,
        16.0,
        if opts.title.is_some() { 36.0 } else { 16.0 },
        48.0,
    );
    let pw = opts.width - ml - mr;
    let ph = opts.height - mt - mb;

    let xs = w.points.iter().map(|p| p.delta_t);
    let (mut x0, mut x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
        (a.min(x), b.max(x))
    });
    let ys = w.points.iter().flat_map(|p| {
        p.outcomes
            .iter()
            .map(|o| o.delta_g_norm)
            .chain([p.analytic])
    });
    let (mut y0, mut y1) = ys.fold((0.0f64, 0.0f64), |(a, b), y| (a.min(y), b.max(y)));
    if !(x0 < x1) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if !(y0 < y1) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);
    let sx = |x: f64| ml + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| mt + (y1 - y) / (y1 - y0) * ph;
    let r = (pw / (w.points.len().max(1) as f64) * 0.35).clamp(1.0, 4.0);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="12">"#,
        opts.width, opts.height, opts.width, opts.height
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#,
        opts.width, opts.height
    );
    if let Some(t) = &opts.title {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            ml + pw / 2.0,
            escape(t)
        );
    }

    let _ = writeln!(s, r##"<g stroke="#999" stroke-width="0.5">"##);
    for t in ticks(x0, x1) {
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
            sx(t),
            mt + ph,
            sx(t),
            mt + ph + 4.0
        );
    }
    for t in ticks(y0, y1) {
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
            ml - 4.0,
            sy(t),
            ml,
            sy(t)
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g fill="black">"#);
    for t in ticks(x0, x1) {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(t),
            mt + ph + 16.0,
            label(t)
        );
    }
    for t in ticks(y0, y1) {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            ml - 6.0,
            sy(t) + 4.0,
            label(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Δt</text>"#,
        ml + pw / 2.0,
        opts.height - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">ΔG / G_ON</text>"#,
        mt + ph / 2.0,
        mt + ph / 2.0
    );
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<rect x="{ml:.2}" y="{mt:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#
    );
    if y0 < 0.0 && y1 > 0.0 {
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#ccc"/>"##,
            ml,
            sy(0.0),
            ml + pw,
            sy(0.0)
        );
    }

    let _ = writeln!(s, r##"<g fill="#1f4e9c">"##);
    for p in &w.points {
        let mut bins: BTreeMap<i64, usize> = BTreeMap::new();
        for o in &p.outcomes {
            *bins
                .entry((o.delta_g_norm / opts.level_bin).round() as i64)
                .or_default() += 1;
        }
        let total = p.outcomes.len() as f64;
        for (bin, count) in bins {
            let y = bin as f64 * opts.level_bin;
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill-opacity="{:.4}"/>"#,
                sx(p.delta_t),
                sy(y),
                r,
                count as f64 / total
            );
        }
    }
    let _ = writeln!(s, "</g>");

    let pts: Vec<String> = w
        .points
        .iter()
        .map(|p| format!("{:.2},{:.2}", sx(p.delta_t), sy(p.analytic)))
        .collect();
    let _ = writeln!(
        s,
        r##"<polyline points="{}" fill="none" stroke="#d62728" stroke-width="1.5"/>"##,
        pts.join(" ")
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::{Outcome, WindowPoint};

    fn one_point() -> StdpWindow {
        StdpWindow {
            n: 1,
            points: vec![WindowPoint {
                delta_t: 0.0,
                outcomes: vec![
                    Outcome {
                        delta_g_norm: 1.0,
                        n_set: 1,
                        n_reset: 0,
                    },
                    Outcome {
                        delta_g_norm: 0.0,
                        n_set: 0,
                        n_reset: 0,
                    },
                ],
                analytic: 0.5,
                states: vec![0.5, 0.5],
            }],
        }
    }

    #[test]
    fn single_point_renders() {
        let svg = write_svg_scatter(
            &one_point(),
            &SvgOptions {
                title: Some("a < b".into()),
                ..SvgOptions::default()
            },
        );
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.contains(r#"fill-opacity="0.5000""#));
        assert!(svg.contains("Δt") && svg.contains("a &lt; b"));
    }

    #[test]
    fn deterministic() {
        let w = one_point();
        let o = SvgOptions::default();
        assert_eq!(write_svg_scatter(&w, &o), write_svg_scatter(&w, &o));
    }

    #[test]
    fn tick_steps() {
        assert_eq!(ticks(-6.0, 6.0), vec![-6.0, -4.0, -2.0, 0.0, 2.0, 4.0, 6.0]);
        assert_eq!(ticks(0.0, 1.0).len(), 6);
    }
}
