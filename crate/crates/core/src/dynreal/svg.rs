//! SVG plots of realisation maps over the window.

use std::fmt::Write;

use num_traits::ToPrimitive;

use crate::word::Word;

use super::PLAction;

const SIZE: f64 = 480.0;
const PAD: f64 = 30.0;
const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Graphs of `ρ(g)` for the given labelled elements, with the diagonal.
pub fn svg_graphs(action: &PLAction, elements: &[(String, Word)]) -> String {
    let (lo, hi) = action.window();
    let (lo, hi) = (lo.to_f64().unwrap_or(0.0), hi.to_f64().unwrap_or(1.0));
    let span = (hi - lo).max(1.0);
    let sx = |x: f64| PAD + (x - lo) / span * (SIZE - 2.0 * PAD);
    let sy = |y: f64| SIZE - PAD - (y - lo) / span * (SIZE - 2.0 * PAD);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="grey" stroke-dasharray="4 3"/>"#,
        sx(lo),
        sy(lo),
        sx(hi),
        sy(hi)
    );
    for (i, (label, w)) in elements.iter().enumerate() {
        let f = action.rho(w);
        let mut xs: Vec<f64> = vec![lo, hi];
        xs.extend(
            f.breakpoints()
                .iter()
                .filter_map(|b| b.to_f64())
                .filter(|b| *b > lo && *b < hi),
        );
        xs.sort_by(|a, b| a.total_cmp(b));
        let pts: Vec<String> = xs
            .iter()
            .map(|&x| {
                let y = action
                    .evaluate(w, &num_rational::BigRational::from_float(x).unwrap_or_default())
                    .to_f64()
                    .unwrap_or(0.0);
                format!("{:.2},{:.2}", sx(x), sy(y.clamp(lo - span, hi + span)))
            })
            .collect();
        let colour = COLOURS[i % COLOURS.len()];
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.0}" y="{:.0}" font-family="monospace" font-size="12" fill="{colour}">{}</text>"#,
            PAD + 4.0,
            PAD + 14.0 * (i as f64 + 1.0),
            escape(label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
