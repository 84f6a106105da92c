//! SVG drawing of a representation: the two baselines and one filled
//! quadrilateral per element.

use std::fmt::Write as _;
use std::path::Path;

use crate::geometry::Representation;
use crate::rational::Rational;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 320.0;
const MARGIN: f64 = 40.0;
const UPPER_Y: f64 = 60.0;
const LOWER_Y: f64 = 260.0;
const PALETTE: [&str; 8] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Panics on an empty representation.
pub fn render_svg(rep: &Representation) -> String {
    let (lo, hi) = rep.extent().expect("nonempty representation");
    let span = (&hi - &lo).to_f64();
    let scale = if span > 0.0 { (WIDTH - 2.0 * MARGIN) / span } else { 1.0 };
    let x = |v: &Rational| MARGIN + (v - &lo).to_f64() * scale;
    let mut out = String::new();
    writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">
<rect width="100%" height="100%" fill="white"/>
<line x1="{m}" y1="{UPPER_Y}" x2="{e}" y2="{UPPER_Y}" stroke="black" stroke-width="1.5"/>
<line x1="{m}" y1="{LOWER_Y}" x2="{e}" y2="{LOWER_Y}" stroke="black" stroke-width="1.5"/>"#,
        m = MARGIN / 2.0,
        e = WIDTH - MARGIN / 2.0,
    )
    .unwrap();
    for (k, (id, t)) in rep.iter().enumerate() {
        let pts = [
            (x(&t.lower.left), LOWER_Y),
            (x(&t.lower.right), LOWER_Y),
            (x(&t.upper.right), UPPER_Y),
            (x(&t.upper.left), UPPER_Y),
        ];
        let color = PALETTE[k % PALETTE.len()];
        let points: Vec<String> = pts.iter().map(|(a, b)| format!("{a:.2},{b:.2}")).collect();
        writeln!(
            out,
            r#"<polygon points="{}" fill="{color}" fill-opacity="0.3" stroke="{color}" stroke-width="1.5"/>"#,
            points.join(" ")
        )
        .unwrap();
        let cx = pts.iter().map(|p| p.0).sum::<f64>() / 4.0;
        let cy = (UPPER_Y + LOWER_Y) / 2.0 + ((k % 5) as f64 - 2.0) * 14.0;
        writeln!(
            out,
            r#"<text x="{cx:.2}" y="{cy:.2}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
            escape(id)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

pub fn write_svg(rep: &Representation, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, render_svg(rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Trapezoid;

    #[test]
    fn single_square() {
        let rep = Representation::from_pairs([("a", Trapezoid::ints(0, 1, 0, 1))]).unwrap();
        let s = render_svg(&rep);
        assert_eq!(s.matches("<polygon").count(), 1);
        assert_eq!(s.matches("<line").count(), 2);
        assert!(s.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn degenerate_extent() {
        let rep = Representation::from_pairs([("a<b", Trapezoid::ints(0, 0, 0, 0))]);
        assert!(rep.is_err());
        let rep = Representation::from_pairs([("a", Trapezoid::ints(3, 3, 3, 3))]).unwrap();
        assert!(render_svg(&rep).contains("<polygon"));
    }
}
