//! Pentagon radar chart of scorecards as standalone SVG.

use std::fmt::Write as _;

use credx_core::scorecard::{Dimension, ScoreCard};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 600.0;
const CX: f64 = 320.0;
const CY: f64 = 280.0;
const RADIUS: f64 = 200.0;
const MAX_SCORE: f64 = 5.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

#[derive(Debug, Clone, PartialEq)]
pub struct RadarSeries {
    pub name: String,
    pub scores: [f64; 5],
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Vertex `k` of the pentagon at `fraction` of the radius; axis 0 points up,
/// the rest follow clockwise.
pub fn vertex(k: usize, fraction: f64) -> (f64, f64) {
    let angle = -std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * k as f64 / 5.0;
    (CX + RADIUS * fraction * angle.cos(), CY + RADIUS * fraction * angle.sin())
}

fn pt(p: (f64, f64)) -> String {
    // avoid "-0.00"
    let f = |v: f64| {
        let s = format!("{v:.2}");
        if s == "-0.00" {
            "0.00".to_string()
        } else {
            s
        }
    };
    format!("{},{}", f(p.0), f(p.1))
}

/// Renders the chart: five rings, five axes, one polygon per series and a legend.
pub fn radar_svg(axes: &[&str; 5], series: &[RadarSeries]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="13">"#
    );
    let _ = writeln!(s, "  <title>Explainability scorecard</title>");
    let _ = writeln!(s, r#"  <rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r##"  <g class="grid" fill="none" stroke="#cccccc" stroke-width="1">"##);
    for ring in 1..=5 {
        let frac = ring as f64 / MAX_SCORE;
        let d: Vec<String> = (0..5).map(|k| pt(vertex(k, frac))).collect();
        let _ = writeln!(s, r#"    <path class="ring" d="M{}Z"/>"#, d.join(" L"));
    }
    let _ = writeln!(s, "  </g>");
    let _ = writeln!(s, r##"  <g class="axes" stroke="#888888" stroke-width="1">"##);
    for k in 0..5 {
        let (x, y) = vertex(k, 1.0);
        let (cx, cy) = vertex(k, 0.0);
        let _ = writeln!(s, r#"    <line class="axis" x1="{cx:.2}" y1="{cy:.2}" x2="{x:.2}" y2="{y:.2}"/>"#);
    }
    let _ = writeln!(s, "  </g>");
    let _ = writeln!(s, r##"  <g class="labels" fill="#222222">"##);
    for (k, label) in axes.iter().enumerate() {
        let (x, y) = vertex(k, 1.12);
        let anchor = match k {
            0 => "middle",
            1 | 2 => "start",
            _ => "end",
        };
        let (x, y) = (x, if k == 0 { y - 4.0 } else { y + 4.0 });
        let _ = writeln!(s, r#"    <text class="axis-label" x="{x:.2}" y="{y:.2}" text-anchor="{anchor}">{}</text>"#, escape(label));
    }
    let _ = writeln!(s, "  </g>");
    let _ = writeln!(s, r#"  <g class="series" stroke-width="2">"#);
    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = ser
            .scores
            .iter()
            .enumerate()
            .map(|(k, &v)| pt(vertex(k, (v / MAX_SCORE).clamp(0.0, 1.0))))
            .collect();
        let _ = writeln!(
            s,
            r#"    <polygon class="model" data-model="{}" points="{}" fill="{color}" fill-opacity="0.15" stroke="{color}"/>"#,
            escape(&ser.name),
            points.join(" ")
        );
    }
    let _ = writeln!(s, "  </g>");
    let _ = writeln!(s, r#"  <g class="legend">"#);
    let top = HEIGHT - 24.0 * series.len() as f64 - 10.0;
    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let y = top + 24.0 * i as f64;
        let _ = writeln!(s, r#"    <rect class="legend-swatch" x="20" y="{y:.2}" width="14" height="14" fill="{color}"/>"#);
        let _ = writeln!(s, r#"    <text class="legend-label" x="42" y="{:.2}">{}</text>"#, y + 12.0, escape(&ser.name));
    }
    let _ = writeln!(s, "  </g>");
    s.push_str("</svg>\n");
    s
}

pub fn radar_from_cards(cards: &[ScoreCard]) -> String {
    let axes = Dimension::ALL.map(|d| d.label());
    let series: Vec<RadarSeries> = cards
        .iter()
        .map(|c| RadarSeries {
            name: c.model.to_string(),
            scores: c.scores(),
        })
        .collect();
    radar_svg(&axes, &series)
}

#[cfg(test)]
mod tests {
    use super::*;

    const AXES: [&str; 5] = ["A", "B", "C", "D", "E"];

    fn series(name: &str, v: f64) -> RadarSeries {
        RadarSeries {
            name: name.into(),
            scores: [v; 5],
        }
    }

    fn polygon_points(svg: &str) -> Vec<Vec<(f64, f64)>> {
        let doc = roxmltree::Document::parse(svg).unwrap();
        doc.descendants()
            .filter(|n| n.has_tag_name("polygon"))
            .map(|n| {
                n.attribute("points")
                    .unwrap()
                    .split(' ')
                    .map(|p| {
                        let (x, y) = p.split_once(',').unwrap();
                        (x.parse().unwrap(), y.parse().unwrap())
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn all_fives_is_regular_outer_pentagon() {
        let svg = radar_svg(&AXES, &[series("m", 5.0)]);
        let polys = polygon_points(&svg);
        assert_eq!(polys.len(), 1);
        for (k, &(x, y)) in polys[0].iter().enumerate() {
            let d = ((x - CX).powi(2) + (y - CY).powi(2)).sqrt();
            assert!((d - RADIUS).abs() < 0.01);
            let (vx, vy) = vertex(k, 1.0);
            assert!((x - vx).abs() < 0.006 && (y - vy).abs() < 0.006);
        }
        let sides: Vec<f64> = (0..5)
            .map(|k| {
                let (a, b) = (polys[0][k], polys[0][(k + 1) % 5]);
                ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
            })
            .collect();
        assert!(sides.iter().all(|s| (s - sides[0]).abs() < 0.02));
    }

    #[test]
    fn all_zeros_collapses_to_center() {
        let polys = polygon_points(&radar_svg(&AXES, &[series("m", 0.0)]));
        assert!(polys[0].iter().all(|&(x, y)| x == CX && y == CY));
    }

    #[test]
    fn three_models_three_polygons_five_axes() {
        let svg = radar_svg(&AXES, &[series("logistic", 4.0), series("forest", 3.0), series("mlp", 2.0)]);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let count = |class: &str| doc.descendants().filter(|n| n.attribute("class") == Some(class)).count();
        assert_eq!(count("axis"), 5);
        assert_eq!(count("model"), 3);
        assert_eq!(count("legend-label"), 3);
        assert_eq!(doc.descendants().filter(|n| n.has_tag_name("polygon")).count(), 3);
        let polys = polygon_points(&svg);
        assert_ne!(polys[0], polys[1]);
        assert_ne!(polys[1], polys[2]);
    }

    #[test]
    fn labels_escaped() {
        let svg = radar_svg(&["R&D", "<x>", "C", "D", "E"], &[series("a\"b", 1.0)]);
        assert!(roxmltree::Document::parse(&svg).is_ok());
    }
}
