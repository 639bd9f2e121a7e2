//! SVG rendering of hyperbolic polygons in the Poincaré disk.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::manifold::{hyperbolic, Manifold};
use crate::subdivision::Polygon;

/// Segments shorter than this (hyperbolic length) are drawn as chords.
pub const ARC_MIN_LENGTH: f64 = 1e-3;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Clone, Copy, Debug)]
pub struct RenderOptions {
    /// Disk radius in pixels.
    pub radius_px: f64,
    pub margin_px: f64,
    pub markers: bool,
    pub geodesic_arcs: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            radius_px: 200.0,
            margin_px: 10.0,
            markers: true,
            geodesic_arcs: false,
        }
    }
}

/// Circle `(center, radius)` orthogonal to the unit circle through disk
/// points `p` and `q`; `None` when the geodesic is a diameter.
pub fn geodesic_circle(p: [f64; 2], q: [f64; 2]) -> Option<([f64; 2], f64)> {
    let det = p[0] * q[1] - p[1] * q[0];
    let scale = (p[0].hypot(p[1]) * q[0].hypot(q[1])).max(f64::MIN_POSITIVE);
    if det.abs() <= 1e-9 * scale {
        return None;
    }
    // c . p = (|p|^2 + 1) / 2 and c . q = (|q|^2 + 1) / 2
    let bp = 0.5 * (p[0] * p[0] + p[1] * p[1] + 1.0);
    let bq = 0.5 * (q[0] * q[0] + q[1] * q[1] + 1.0);
    let cx = (bp * q[1] - bq * p[1]) / det;
    let cy = (p[0] * bq - q[0] * bp) / det;
    let r2 = cx * cx + cy * cy - 1.0;
    (r2 > 0.0).then(|| ([cx, cy], r2.sqrt()))
}

fn fmt_num(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

struct Frame {
    center: f64,
    radius: f64,
}

impl Frame {
    fn x(&self, u: f64) -> String {
        fmt_num(self.center + self.radius * u)
    }

    fn y(&self, v: f64) -> String {
        fmt_num(self.center - self.radius * v)
    }
}

fn segment(frame: &Frame, p: [f64; 2], q: [f64; 2], arcs: bool, out: &mut String) {
    let hyp = |d: [f64; 2]| hyperbolic::from_disk(d[0], d[1]).expect("inside disk");
    let long_enough = arcs && hyperbolic::dist(&hyp(p), &hyp(q)) > ARC_MIN_LENGTH;
    match long_enough.then(|| geodesic_circle(p, q)).flatten() {
        Some((c, r)) => {
            let cross = (p[0] - c[0]) * (q[1] - c[1]) - (p[1] - c[1]) * (q[0] - c[0]);
            let sweep = u8::from(cross > 0.0);
            let rr = fmt_num(r * frame.radius);
            let _ = write!(out, " A {rr} {rr} 0 0 {sweep} {} {}", frame.x(q[0]), frame.y(q[1]));
        }
        None => {
            let _ = write!(out, " L {} {}", frame.x(q[0]), frame.y(q[1]));
        }
    }
}

/// Renders the given levels into a standalone SVG document.
pub fn render_svg(levels: &[&Polygon], options: &RenderOptions) -> Result<String> {
    if let Some(p) = levels.iter().find(|p| p.manifold() != Manifold::Hyperbolic2) {
        return Err(Error::ManifoldMismatch {
            left: "hyperbolic2".into(),
            right: p.manifold().to_string(),
        });
    }
    let size = 2.0 * (options.radius_px + options.margin_px);
    let frame = Frame {
        center: options.radius_px + options.margin_px,
        radius: options.radius_px,
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#,
        s = fmt_num(size)
    );
    let _ = writeln!(
        out,
        r#"  <circle cx="{c}" cy="{c}" r="{r}" fill="none" stroke="black" stroke-width="1"/>"#,
        c = fmt_num(frame.center),
        r = fmt_num(frame.radius)
    );
    for (idx, polygon) in levels.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let disk: Vec<[f64; 2]> = polygon
            .points()
            .iter()
            .map(|p| p.to_disk().expect("hyperbolic"))
            .collect();
        let mut d = format!("M {} {}", frame.x(disk[0][0]), frame.y(disk[0][1]));
        for w in disk.windows(2) {
            segment(&frame, w[0], w[1], options.geodesic_arcs, &mut d);
        }
        if polygon.is_closed() {
            segment(&frame, disk[disk.len() - 1], disk[0], options.geodesic_arcs, &mut d);
            d.push_str(" Z");
        }
        let _ = writeln!(
            out,
            r#"  <path class="level-{}" d="{d}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            polygon.level()
        );
        if options.markers {
            for p in &disk {
                let _ = writeln!(
                    out,
                    r#"  <circle class="marker-{}" cx="{}" cy="{}" r="2.5" fill="{color}"/>"#,
                    polygon.level(),
                    frame.x(p[0]),
                    frame.y(p[1])
                );
            }
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}
