//! SVG renderings of clusters, networks, and label fields: flat chamber
//! fills, a hatched wet region, and dots at junctions and cusps so
//! tangency is visually auditable. Path data is written at full precision.

use crate::cluster::{ArcCluster, BoundaryTrace, JunctionKind, RegionLabel};
use crate::dry::JunctionNetwork;
use crate::geom::{CircArc, Point2, TAU};
use crate::lattice::{LabelField, WET};

const VIEW: f64 = 1.12;
const SIZE: f64 = 640.0;

fn palette(label: usize) -> &'static str {
    const COLORS: [&str; 9] = [
        "#ffffff", "#aecbe8", "#f4b8a0", "#bde3bd", "#e6d3f2", "#f7e3a1", "#c9ebf0",
        "#f2c4da", "#d9d9c8",
    ];
    COLORS[label % COLORS.len()]
}

fn sx(x: f64) -> f64 {
    (x + VIEW) / (2.0 * VIEW) * SIZE
}

fn sy(y: f64) -> f64 {
    (VIEW - y) / (2.0 * VIEW) * SIZE
}

fn header() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{s}\" height=\"{s}\" \
         viewBox=\"0 0 {s} {s}\">\n\
         <defs><pattern id=\"wet\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" \
         patternTransform=\"rotate(45)\">\
         <rect width=\"6\" height=\"6\" fill=\"#9fb6c9\"/>\
         <line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#4a6b8a\" stroke-width=\"2\"/>\
         </pattern></defs>\n",
        s = SIZE
    )
}

/// SVG arc path segment from a [`CircArc`] (arcs subtend at most pi, so
/// the large-arc flag is always 0).
fn arc_path(a: &CircArc) -> String {
    if a.kappa == 0.0 {
        format!("L {} {}", sx(a.end.x), sy(a.end.y))
    } else {
        let r = 1.0 / a.kappa.abs() / (2.0 * VIEW) * SIZE;
        // SVG y-axis points down, so the sweep flag inverts.
        let sweep = if a.kappa > 0.0 { 0 } else { 1 };
        format!("A {r} {r} 0 0 {sweep} {} {}", sx(a.end.x), sy(a.end.y))
    }
}

fn disk_outline() -> String {
    format!(
        "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"#333\" stroke-width=\"1.5\"/>\n",
        sx(0.0),
        sy(0.0),
        SIZE / (2.0 * VIEW)
    )
}

fn dot(p: Point2, color: &str) -> String {
    format!(
        "<circle cx=\"{}\" cy=\"{}\" r=\"3.2\" fill=\"{color}\" stroke=\"#222\" stroke-width=\"0.8\"/>\n",
        sx(p.x),
        sy(p.y)
    )
}

/// Renders an arc cluster: chambers sampled as a fine raster underlay
/// (robust for any region shape), interfaces as exact paths, junction and
/// cusp dots on top.
pub fn render_cluster(c: &ArcCluster) -> String {
    let mut out = header();
    // Raster underlay for region fills.
    let n = 180usize;
    let cellpx = SIZE / n as f64;
    for iy in 0..n {
        for ix in 0..n {
            let x = -VIEW + (ix as f64 + 0.5) / n as f64 * 2.0 * VIEW;
            let y = VIEW - (iy as f64 + 0.5) / n as f64 * 2.0 * VIEW;
            let p = Point2::new(x, y);
            if p.norm() >= 1.0 {
                continue;
            }
            let fill = match c.label_at(p) {
                RegionLabel::Wet => "url(#wet)".to_string(),
               RegionLabel::Chamber(l) => palette(l).to_string(),
            };
            out.push_str(&format!(
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>\n",
                ix as f64 * cellpx,
                iy as f64 * cellpx,
                cellpx + 0.5,
                cellpx + 0.5,
                fill
            ));
        }
    }
    out.push_str(&disk_outline());
    for itf in &c.interfaces {
        let start = itf.start();
        let mut d = format!("M {} {}", sx(start.x), sy(start.y));
        for a in &itf.arcs {
            d.push(' ');
            d.push_str(&arc_path(a));
        }
        let stroke = if itf.is_wet() { "#1f4e79" } else { "#111111" };
        out.push_str(&format!(
            "<path d=\"{d}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"2\"/>\n"
        ));
    }
    for j in &c.junctions {
        let color = match j.kind {
            JunctionKind::InteriorTriple => "#d62728",
            JunctionKind::InteriorCusp => "#ff7f0e",
            JunctionKind::BoundaryCorner => "#9467bd",
            JunctionKind::BoundaryJump => "#2ca02c",
        };
        out.push_str(&dot(j.point, color));
    }
    out.push_str("</svg>\n");
    out
}

/// Renders a solved dry network.
pub fn render_network(net: &JunctionNetwork, trace: &BoundaryTrace) -> String {
    render_cluster(&net.to_cluster(trace))
}

/// Renders a label field, one run-length rectangle row at a time.
pub fn render_field(f: &LabelField) -> String {
    let mut out = header();
    let px = SIZE / (2.0 * VIEW);
    for iy in 0..f.ny {
        let mut ix = 0;
        while ix < f.nx {
            let i = f.idx(ix, iy);
            if !f.mask[i] {
                ix += 1;
                continue;
            }
            let label = f.labels[i];
            let run_start = ix;
            while ix < f.nx && f.mask[f.idx(ix, iy)] && f.labels[f.idx(ix, iy)] == label {
                ix += 1;
            }
            let p0 = f.center(run_start, iy);
            let x = sx(p0.x - 0.5 * f.cell);
            let y = sy(p0.y + 0.5 * f.cell);
            let wpx = (ix - run_start) as f64 * f.cell * px;
            let hpx = f.cell * px;
            let fill = if label == WET {
                "url(#wet)".to_string()
            } else {
                palette(label as usize).to_string()
            };
            out.push_str(&format!(
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{fill}\"/>\n",
                wpx + 0.4,
                hpx + 0.4
            ));
        }
    }
    out.push_str(&disk_outline());
    out.push_str("</svg>\n");
    out
}

/// Renders the trace labels as ticks around the circle (used by instance
/// rendering).
pub fn render_instance(trace: &BoundaryTrace) -> String {
    let mut out = header();
    out.push_str(&disk_outline());
    for (a, b, label) in trace.arcs() {
        let steps = 64;
        let mut d = String::new();
        for k in 0..=steps {
            let ang = a + (b - a) * k as f64 / steps as f64;
            let p = Point2::from_angle(ang.rem_euclid(TAU)).scale(1.03);
            if k == 0 {
                d.push_str(&format!("M {} {}", sx(p.x), sy(p.y)));
            } else {
                d.push_str(&format!(" L {} {}", sx(p.x), sy(p.y)));
            }
        }
        out.push_str(&format!(
            "<path d=\"{d}\" fill=\"none\" stroke=\"{}\" stroke-width=\"6\"/>\n",
            palette(label)
        ));
    }
    for j in &trace.jumps {
        out.push_str(&dot(Point2::from_angle(j.angle), "#2ca02c"));
    }
    out.push_str("</svg>\n");
    out
}
