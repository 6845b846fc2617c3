use std::fmt::Write;

use crate::Disk;

use super::ContourSet;

/// One set of contours drawn in a single stroke colour.
pub struct SvgLayer<'a> {
    pub contours: &'a ContourSet,
    pub color: &'a str,
    pub label: &'a str,
}

/// SVG with the disk boundary as a reference circle and one path per
/// polyline. Only planar contour sets are drawn.
pub fn to_svg(disk: &Disk, layers: &[SvgLayer<'_>]) -> String {
    let size = 512.0;
    let r = disk.radius;
    let (cx, cy) = (disk.center[0], disk.center[1]);
    let scale = 0.45 * size / r;
    let map = |p: [f64; 2]| (0.5 * size + scale * (p[0] - cx), 0.5 * size - scale * (p[1] - cy));
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(
        s,
        r##"<circle cx="{0}" cy="{0}" r="{1:.3}" fill="none" stroke="#999" stroke-dasharray="4 3"/>"##,
        0.5 * size,
        scale * r
    );
    for layer in layers {
        let _ = writeln!(s, r#"<g stroke="{}" fill="none" stroke-width="1.5">"#, layer.color);
        let _ = writeln!(s, "<title>{}</title>", layer.label);
        for p in &layer.contours.polylines {
            let mut d = String::new();
            for (k, q) in p.points.iter().enumerate() {
                let (x, y) = map(*q);
                let _ = write!(d, "{}{x:.3},{y:.3} ", if k == 0 { "M" } else { "L" });
            }
            if p.closed {
                d.push('Z');
            }
            let _ = writeln!(s, r#"<path d="{}"/>"#, d.trim_end());
        }
        if layer.contours.n == 1 {
            for x in &layer.contours.roots {
                let (px, py) = map([*x, 0.0]);
                let _ = writeln!(s, r#"<circle cx="{px:.3}" cy="{py:.3}" r="3"/>"#);
            }
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

/// `contour,vertex,x,y` rows; for `n = 1` one row per root with `y = 0`.
pub fn to_csv(c: &ContourSet) -> String {
    let mut s = String::from("contour,vertex,x,y\n");
    if c.n == 1 {
        for (i, x) in c.roots.iter().enumerate() {
            let _ = writeln!(s, "{i},0,{x:e},0");
        }
    }
    for (i, p) in c.polylines.iter().enumerate() {
        for (k, q) in p.points.iter().enumerate() {
            let _ = writeln!(s, "{i},{k},{:e},{:e}", q[0], q[1]);
        }
    }
    s
}
