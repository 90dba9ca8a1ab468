use super::Polytope;
use crate::geometry::Point;
use serde::Serialize;
use std::fmt::Write;

/// JSON record of one cell.
#[derive(Debug, Clone, Serialize)]
pub struct CellDump {
    pub site: Vec<f64>,
    pub vertices: Vec<Vec<f64>>,
    pub diameter: f64,
}

impl From<&Polytope> for CellDump {
    fn from(c: &Polytope) -> Self {
        CellDump {
            site: c.site.coords(c.dim).to_vec(),
            vertices: c.vertices.iter().map(|v| v.coords(c.dim).to_vec()).collect(),
            diameter: c.diameter(),
        }
    }
}

/// Static SVG of planar cells and their sites over the square viewport
/// `[c − h, c + h]²`.
pub fn cells_svg(cells: &[Polytope], center: Point, half: f64, size_px: u32) -> String {
    let scale = size_px as f64 / (2.0 * half);
    let map = |p: Point| ((p.x() - center.x() + half) * scale, (center.y() + half - p.y()) * scale);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size_px}" height="{size_px}" viewBox="0 0 {size_px} {size_px}">"#
    );
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    for c in cells {
        let pts: Vec<String> = c
            .vertices
            .iter()
            .map(|&v| {
                let (a, b) = map(v);
                format!("{a:.3},{b:.3}")
            })
            .collect();
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="#dce6f2" stroke="#1f3b5c" stroke-width="0.8"/>"##,
            pts.join(" ")
        );
    }
    for c in cells {
        let (a, b) = map(c.site);
        let _ = writeln!(s, r##"<circle cx="{a:.3}" cy="{b:.3}" r="1.8" fill="#b22222"/>"##);
    }
    s.push_str("</svg>\n");
    s
}
