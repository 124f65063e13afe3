//! Self-contained SVG plots with a fixed layout.
//!
//! Output depends only on the data: coordinates are printed with two
//! decimals, there are no timestamps, fonts are generic families and nothing
//! is referenced from outside the document.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;
const PALETTE: [&str; 4] = ["#1f5fa8", "#c0392b", "#2e8b57", "#8e44ad"];

/// Escape text for use in SVG character data or attributes.
fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
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

/// Affine map from a data box onto the plotting area.
#[derive(Debug, Clone, Copy)]
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let (x0, x1) = padded_range(xs);
        let (y0, y1) = padded_range(ys);
        Self { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn padded_range(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v
        .filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let span = hi - lo;
    let pad = if span > 0.0 { 0.05 * span } else { 0.5 * lo.abs().max(1.0) };
    (lo - pad, hi + pad)
}

fn header(title: &str, xlabel: &str, ylabel: &str) -> String {
    let mut s = String::new();
    writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>
<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>
<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>
<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        WIDTH / 2.0,
        escape(title),
        (LEFT + WIDTH - RIGHT) / 2.0,
        HEIGHT - 14.0,
        escape(xlabel),
        (TOP + HEIGHT - BOTTOM) / 2.0,
        (TOP + HEIGHT - BOTTOM) / 2.0,
        escape(ylabel),
    )
    .expect("write to string");
    writeln!(
        s,
        r##"<rect x="{LEFT}" y="{TOP}" width="{:.2}" height="{:.2}" fill="none" stroke="#444"/>"##,
        WIDTH - LEFT - RIGHT,
        HEIGHT - TOP - BOTTOM
    )
    .expect("write to string");
    s
}

/// Tick label: integers plainly, everything else with three significant digits.
fn tick_label(v: f64) -> String {
    if v == v.round() && v.abs() < 1e6 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

fn linear_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|&s| s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn axes(s: &mut String, f: &Frame, xt: &[(f64, String)], yt: &[(f64, String)]) {
    for (x, label) in xt {
        let px = f.px(*x);
        writeln!(
            s,
            r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="#444"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            HEIGHT - BOTTOM,
            HEIGHT - BOTTOM + 5.0,
            HEIGHT - BOTTOM + 19.0,
            escape(label)
        )
        .expect("write to string");
    }
    for (y, label) in yt {
        let py = f.py(*y);
        writeln!(
            s,
            r##"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="#444"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0,
            escape(label)
        )
        .expect("write to string");
    }
}

fn legend(s: &mut String, entries: &[(String, String, bool)]) {
    for (k, (label, color, dashed)) in entries.iter().enumerate() {
        let y = TOP + 16.0 + 16.0 * k as f64;
        let x = WIDTH - RIGHT - 190.0;
        let dash = if *dashed { r#" stroke-dasharray="6 4""# } else { "" };
        writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="2"{dash}/><text x="{:.2}" y="{:.2}">{}</text>"#,
            x + 24.0,
            x + 30.0,
            y + 4.0,
            escape(label)
        )
        .expect("write to string");
    }
}

/// Roots in the complex plane with the imaginary axis drawn.
pub fn complex_scatter(title: &str, points: &[(f64, f64)]) -> String {
    // keep the axis Re λ = 0 inside the frame
    let xs = points.iter().map(|p| p.0).chain([0.0]);
    let ys = points.iter().map(|p| p.1).chain([-1.0, 1.0]);
    let f = Frame::fit(xs.clone(), ys.clone());
    let mut s = header(title, "Re λ", "Im λ");
    let xt: Vec<_> = linear_ticks(f.x0, f.x1).into_iter().map(|v| (v, tick_label(v))).collect();
    let yt: Vec<_> = linear_ticks(f.y0, f.y1).into_iter().map(|v| (v, tick_label(v))).collect();
    axes(&mut s, &f, &xt, &yt);
    writeln!(
        s,
        r##"<line x1="{0:.2}" y1="{TOP}" x2="{0:.2}" y2="{1:.2}" stroke="#888" stroke-dasharray="4 3"/>"##,
        f.px(0.0),
        HEIGHT - BOTTOM
    )
    .expect("write to string");
    for &(x, y) in points {
        writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#, f.px(x), f.py(y), PALETTE[0])
            .expect("write to string");
    }
    legend(
        &mut s,
        &[
            (format!("{} eigenvalues", points.len()), PALETTE[0].to_string(), false),
            ("imaginary axis".to_string(), "#888".to_string(), true),
        ],
    );
    s.push_str("</svg>\n");
    s
}

/// A named data series for [`loglog`].
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Reference line `y = c·x^slope` through the first point of the first series.
#[derive(Debug, Clone, Copy)]
pub struct Guide {
    pub slope: f64,
}

/// Log–log line plot; non-positive values are skipped.
pub fn loglog(title: &str, xlabel: &str, ylabel: &str, series: &[Series], guides: &[Guide]) -> String {
    let logs: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
                .map(|(x, y)| (x.log10(), y.log10()))
                .collect()
        })
        .collect();
    let all = logs.iter().flatten();
    let f = Frame::fit(all.clone().map(|p| p.0), all.map(|p| p.1));
    let mut s = header(title, xlabel, ylabel);
    let decades = |lo: f64, hi: f64| -> Vec<(f64, String)> {
        let mut t: Vec<(f64, String)> =
            ((lo.ceil() as i64)..=(hi.floor() as i64)).map(|k| (k as f64, format!("1e{k}"))).collect();
        if t.len() < 2 {
            t = linear_ticks(lo, hi).into_iter().map(|v| (v, format!("{:.3}", 10f64.powf(v)))).collect();
        }
        t
    };
    axes(&mut s, &f, &decades(f.x0, f.x1), &decades(f.y0, f.y1));
    writeln!(s, r#"<clipPath id="area"><rect x="{LEFT}" y="{TOP}" width="{:.2}" height="{:.2}"/></clipPath>"#, WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM)
        .expect("write to string");
    let mut entries = Vec::new();
    for (k, pts) in logs.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        if pts.is_empty() {
            continue;
        }
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y))).collect();
        writeln!(
            s,
            r#"<polyline clip-path="url(#area)" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        )
        .expect("write to string");
        if pts.len() <= 64 {
            for &(x, y) in pts {
                writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, f.px(x), f.py(y))
                    .expect("write to string");
            }
        }
        entries.push((series[k].label.clone(), color.to_string(), false));
    }
    let anchor = logs.iter().find_map(|p| p.first().copied());
    if let Some((ax, ay)) = anchor {
        for g in guides {
            let y_at = |x: f64| ay + g.slope * (x - ax);
            writeln!(
                s,
                r##"<line clip-path="url(#area)" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#777" stroke-width="1.2" stroke-dasharray="6 4"/>"##,
                f.px(f.x0),
                f.py(y_at(f.x0)),
                f.px(f.x1),
                f.py(y_at(f.x1))
            )
            .expect("write to string");
            entries.push((format!("reference slope {}", g.slope), "#777".to_string(), true));
        }
    }
    legend(&mut s, &entries);
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn balanced(svg: &str) -> bool {
        // every element is either self-closed or closed by a matching tag
        let mut stack: Vec<String> = Vec::new();
        let mut rest = svg;
        while let Some(i) = rest.find('<') {
            let j = rest[i..].find('>').map(|j| i + j).unwrap();
            let tag = &rest[i + 1..j];
            rest = &rest[j + 1..];
            if tag.starts_with('?') || tag.ends_with('/') {
                continue;
            }
            let name: String = tag.trim_start_matches('/').chars().take_while(|c| c.is_alphanumeric()).collect();
            if tag.starts_with('/') {
                if stack.pop().as_deref() != Some(name.as_str()) {
                    return false;
                }
            } else {
                stack.push(name);
            }
        }
        stack.is_empty()
    }

    #[test]
    fn scatter_is_well_formed_and_draws_the_axis() {
        let svg = complex_scatter("roots <test>", &[(-0.03, 1.07), (-0.03, -1.07), (-2.0, 7.5)]);
        assert!(balanced(&svg));
        assert!(svg.contains("&lt;test&gt;"));
        assert!(svg.contains("imaginary axis"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(!svg.contains("href"));
    }

    #[test]
    fn empty_scatter_still_renders() {
        assert!(balanced(&complex_scatter("none", &[])));
    }

    #[test]
    fn loglog_draws_guides_and_is_deterministic() {
        let pts: Vec<(f64, f64)> = (1..20).map(|k| (k as f64 * 10.0, (k as f64 * 10.0).sqrt())).collect();
        let series = [Series { label: "norm".into(), points: pts }];
        let a = loglog("scan", "s", "norm", &series, &[Guide { slope: 0.5 }]);
        let b = loglog("scan", "s", "norm", &series, &[Guide { slope: 0.5 }]);
        assert_eq!(a, b);
        assert!(balanced(&a));
        assert!(a.contains("reference slope 0.5"));
    }

    #[test]
    fn loglog_skips_non_positive_values() {
        let series = [Series { label: "E".into(), points: vec![(0.0, 1.0), (1.0, 0.0), (2.0, 0.5), (4.0, 0.1)] }];
        let svg = loglog("decay", "t", "E", &series, &[Guide { slope: -4.0 }]);
        assert!(balanced(&svg));
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.contains("reference slope -4"));
    }

    #[test]
    fn ticks_are_round_numbers() {
        assert_eq!(linear_ticks(0.0, 10.0), vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
    }
}
