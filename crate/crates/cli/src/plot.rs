//! Static SVG 1.1 log-log chart of error against mesh width.

use std::fmt::Write as _;

use rdgfv::study::ConvergenceTable;

const W: f64 = 640.0;
const H: f64 = 480.0;
const PAD_L: f64 = 80.0;
const PAD_R: f64 = 170.0;
const PAD_T: f64 = 40.0;
const PAD_B: f64 = 60.0;

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
    dashed: bool,
    color: &'static str,
}

/// Errors (l2, sip, sip*) of each table against `h`, with slope-`order`
/// and slope-`order + 1` guides anchored at the finest sip* point of the
/// first table.
pub fn render(title: &str, order: usize, tables: &[(f64, ConvergenceTable)]) -> String {
    let mut series = Vec::new();
    let mut color = COLORS.iter().cycle();
    for (eta, t) in tables {
        let tag = if tables.len() > 1 { format!(" eta={eta}") } else { String::new() };
        for (name, pick) in [
            ("l2", (|r: &rdgfv::ErrorReport| r.l2) as fn(&rdgfv::ErrorReport) -> f64),
            ("sip", |r| r.sip),
            ("sip*", |r| r.sip_star),
        ] {
            series.push(Series {
                label: format!("{name}{tag}"),
                points: t.rows.iter().map(|r| (r.errors.h, pick(&r.errors))).collect(),
                dashed: false,
                color: color.next().expect("cycle"),
            });
        }
    }
    if let Some((_, t)) = tables.first() {
        let hs: Vec<f64> = t.rows.iter().map(|r| r.errors.h).collect();
        if let (Some(last), Some(&hmax)) = (t.rows.last(), hs.first()) {
            let (h0, e0) = (last.errors.h, last.errors.sip_star);
            for p in [order, order + 1] {
                series.push(Series {
                    label: format!("slope {p}"),
                    points: vec![(h0, e0), (hmax, e0 * (hmax / h0).powi(p as i32))],
                    dashed: true,
                    color: "#777777",
                });
            }
        }
    }

    let all: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|(h, e)| *h > 0.0 && *e > 0.0 && e.is_finite())
        .collect();
    let (mut xmin, mut xmax, mut ymin, mut ymax) = all.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), &(x, y)| (a.min(x.log10()), b.max(x.log10()), c.min(y.log10()), d.max(y.log10())),
    );
    if all.is_empty() {
        (xmin, xmax, ymin, ymax) = (-2.0, 0.0, -6.0, 0.0);
    }
    let (xmin, xmax) = (xmin.floor(), xmax.ceil().max(xmin.floor() + 1.0));
    let (ymin, ymax) = (ymin.floor(), ymax.ceil().max(ymin.floor() + 1.0));
    let sx = |x: f64| PAD_L + (x.log10() - xmin) / (xmax - xmin) * (W - PAD_L - PAD_R);
    let sy = |y: f64| H - PAD_B - (y.log10() - ymin) / (ymax - ymin) * (H - PAD_T - PAD_B);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, (W - PAD_R + PAD_L) / 2.0, escape(title));
    for d in xmin as i32..=xmax as i32 {
        let x = sx(10f64.powi(d));
        let _ = writeln!(svg, r##"<line x1="{x:.1}" y1="{PAD_T}" x2="{x:.1}" y2="{}" stroke="#e0e0e0"/>"##, H - PAD_B);
        let _ = writeln!(svg, r#"<text x="{x:.1}" y="{}" text-anchor="middle">1e{d}</text>"#, H - PAD_B + 18.0);
    }
    for d in ymin as i32..=ymax as i32 {
        let y = sy(10f64.powi(d));
        let _ = writeln!(svg, r##"<line x1="{PAD_L}" y1="{y:.1}" x2="{}" y2="{y:.1}" stroke="#e0e0e0"/>"##, W - PAD_R);
        let _ = writeln!(svg, r#"<text x="{}" y="{:.1}" text-anchor="end">1e{d}</text>"#, PAD_L - 6.0, y + 4.0);
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{PAD_L}" y="{PAD_T}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - PAD_L - PAD_R,
        H - PAD_T - PAD_B
    );
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">h</text>"#, (W - PAD_R + PAD_L) / 2.0, H - 16.0);
    let _ = writeln!(svg, r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">error</text>"#, H / 2.0, H / 2.0);

    for (i, s) in series.iter().enumerate() {
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|(h, e)| *h > 0.0 && *e > 0.0 && e.is_finite())
            .map(|&(h, e)| format!("{:.1},{:.1}", sx(h), sy(e)))
            .collect();
        let dash = if s.dashed { r#" stroke-dasharray="6,4""# } else { "" };
        let _ = writeln!(svg, r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"#, pts.join(" "), s.color);
        if !s.dashed {
            for p in &pts {
                let (x, y) = p.split_once(',').expect("pair");
                let _ = writeln!(svg, r#"<circle cx="{x}" cy="{y}" r="3" fill="{}"/>"#, s.color);
            }
        }
        let ly = PAD_T + 10.0 + 18.0 * i as f64;
        let lx = W - PAD_R + 12.0;
        let _ = writeln!(svg, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="1.5"{dash}/>"#, lx + 24.0, s.color);
        let _ = writeln!(svg, r#"<text x="{}" y="{}">{}</text>"#, lx + 30.0, ly + 4.0, escape(&s.label));
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
