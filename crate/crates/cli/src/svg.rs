//! Zero-map scatter plots as standalone SVG 1.1 documents.
//!
//! Fixed 800x800 viewport over the square [-2.5, 2.5]^2, with the three
//! reference circles |z| = 1, |z - 1| = 1, |z + 1| = 1 dashed for visual
//! comparison of zero patterns.

use num::complex::Complex64;
use std::fmt::Write;

const SIZE: f64 = 800.0;
const SPAN: f64 = 2.5;

fn map_x(x: f64) -> f64 {
    (x + SPAN) / (2.0 * SPAN) * SIZE
}

fn map_y(y: f64) -> f64 {
    SIZE - (y + SPAN) / (2.0 * SPAN) * SIZE
}

pub fn zero_scatter(title: &str, roots: &[Complex64]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r##"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"##
    );
    let _ = writeln!(s, r##"  <title>{title}</title>"##);
    let _ = writeln!(
        s,
        r##"  <rect width="{SIZE}" height="{SIZE}" fill="white"/>"##
    );
    // axes
    let mid = map_x(0.0);
    let _ = writeln!(
        s,
        r##"  <line x1="0" y1="{mid}" x2="{SIZE}" y2="{mid}" stroke="#cccccc" stroke-width="1"/>"##
    );
    let _ = writeln!(
        s,
        r##"  <line x1="{mid}" y1="0" x2="{mid}" y2="{SIZE}" stroke="#cccccc" stroke-width="1"/>"##
    );
    // reference circles
    let radius = SIZE / (2.0 * SPAN);
    for center in [-1.0, 0.0, 1.0] {
        let _ = writeln!(
            s,
            r##"  <circle cx="{:.3}" cy="{:.3}" r="{:.3}" fill="none" stroke="#888888" stroke-width="1" stroke-dasharray="6,4"/>"##,
            map_x(center),
            map_y(0.0),
            radius
        );
    }
    for z in roots {
        let _ = writeln!(
            s,
            r##"  <circle cx="{:.3}" cy="{:.3}" r="4" fill="#c02020" fill-opacity="0.8"/>"##,
            map_x(z.re),
            map_y(z.im)
        );
    }
    s.push_str("</svg>\n");
    s
}
