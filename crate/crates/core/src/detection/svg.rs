//! The slope circle: the projective line drawn as a circle, `0` on the right
//! and `∞` on the left.

use std::f64::consts::PI;
use std::fmt::Write;

use crate::lattice::Slope;

const SIZE: f64 = 360.0;
const RADIUS: f64 = 140.0;

fn point(s: &Slope) -> (f64, f64) {
    let t = 2.0 * s.angle();
    (SIZE / 2.0 + RADIUS * t.cos(), SIZE / 2.0 - RADIUS * t.sin())
}

/// Certified slopes as green dots, excluded slopes as red crosses and
/// excluded intervals `[from, to]` (counterclockwise) as red arcs.
pub fn slope_circle_svg(certified: &[Slope], excluded: &[Slope], arcs: &[(Slope, Slope)]) -> String {
    let c = SIZE / 2.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<circle cx="{c}" cy="{c}" r="{RADIUS}" fill="none" stroke="grey"/>"#
    );
    for (label, s) in [("0", Slope::rational(0, 1)), ("∞", Slope::rational(1, 0))] {
        let s = s.expect("valid slope");
        let (x, y) = point(&s);
        let dx = if x > c { 8.0 } else { -22.0 };
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="13">{label}</text>"#,
            x + dx,
            y + 4.0
        );
    }
    for (from, to) in arcs {
        let (a, b) = (2.0 * from.angle(), 2.0 * to.angle());
        let sweep = (b - a).rem_euclid(2.0 * PI);
        let (x0, y0) = point(from);
        let (x1, y1) = point(to);
        let large = i32::from(sweep > PI);
        let _ = writeln!(
            out,
            r##"<path d="M {x0:.2} {y0:.2} A {RADIUS} {RADIUS} 0 {large} 0 {x1:.2} {y1:.2}" fill="none" stroke="#d62728" stroke-width="5" opacity="0.6"/>"##
        );
    }
    for s in excluded {
        let (x, y) = point(s);
        let _ = writeln!(
            out,
            r##"<path d="M {:.2} {:.2} L {:.2} {:.2} M {:.2} {:.2} L {:.2} {:.2}" stroke="#d62728" stroke-width="2"/>"##,
            x - 5.0,
            y - 5.0,
            x + 5.0,
            y + 5.0,
            x - 5.0,
            y + 5.0,
            x + 5.0,
            y - 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11">{s}</text>"#,
            x + 7.0,
            y - 7.0
        );
    }
    for s in certified {
        let (x, y) = point(s);
        let _ = writeln!(out, r##"<circle cx="{x:.2}" cy="{y:.2}" r="5" fill="#2ca02c"/>"##);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11">{s}</text>"#,
            x + 7.0,
            y - 7.0
        );
    }
    out.push_str("</svg>\n");
    out
}
