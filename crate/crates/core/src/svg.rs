//! SVG rendering of a Newton polygon: grid, shaded polyhedron, compact
//! edges, vertex markers and labels.

use std::fmt::Write;

use crate::polygon::NewtonPolygon;
use crate::rat::{rat_string, rat_to_f64};

const CELL: f64 = 40.0;
const MARGIN: f64 = 60.0;

/// Renders the polygon to a standalone SVG document.
pub fn polygon_svg(polygon: &NewtonPolygon, title: &str) -> String {
    let coords: Vec<(f64, u64)> = polygon
        .vertex_coords()
        .iter()
        .map(|(p, q)| (rat_to_f64(p), *q))
        .collect();
    let max_p = coords.iter().map(|(p, _)| *p).fold(1.0, f64::max).ceil() + 3.0;
    let max_q = coords.iter().map(|(_, q)| *q).max().unwrap_or(1) as f64 + 3.0;
    let width = MARGIN * 2.0 + max_p * CELL;
    let height = MARGIN * 2.0 + max_q * CELL;
    let x = |p: f64| MARGIN + p * CELL;
    let y = |q: f64| height - MARGIN - q * CELL;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        out,
        r##"<rect width="{width}" height="{height}" fill="white"/>"##
    );
    // Grid.
    let mut gp = 0.0;
    while gp <= max_p {
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#dddddd" stroke-width="1"/>"##,
            x(gp),
            y(0.0),
            x(gp),
            y(max_q)
        );
        gp += 1.0;
    }
    let mut gq = 0.0;
    while gq <= max_q {
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#dddddd" stroke-width="1"/>"##,
            x(0.0),
            y(gq),
            x(max_p),
            y(gq)
        );
        gq += 1.0;
    }
    // Shaded polyhedron region: down the vertical ray, along the diagram,
    // out the horizontal ray, closed over the top-right corner.
    let mut path = String::new();
    let first = coords.first().expect("nonzero polygon");
    let _ = write!(path, "M {:.1} {:.1}", x(first.0), y(max_q));
    for (p, q) in &coords {
        let _ = write!(path, " L {:.1} {:.1}", x(*p), y(*q as f64));
    }
    let last = coords.last().unwrap();
    let _ = write!(path, " L {:.1} {:.1}", x(max_p), y(last.1 as f64));
    let _ = write!(path, " L {:.1} {:.1} Z", x(max_p), y(max_q));
    let _ = writeln!(
        out,
        r##"<path d="{path}" fill="#c8d8f0" fill-opacity="0.6" stroke="none"/>"##
    );
    // Diagram boundary.
    let mut boundary = String::new();
    let _ = write!(boundary, "M {:.1} {:.1}", x(first.0), y(max_q));
    for (p, q) in &coords {
        let _ = write!(boundary, " L {:.1} {:.1}", x(*p), y(*q as f64));
    }
    let _ = write!(boundary, " L {:.1} {:.1}", x(max_p), y(last.1 as f64));
    let _ = writeln!(
        out,
        r##"<path d="{boundary}" fill="none" stroke="#203050" stroke-width="2.5"/>"##
    );
    // Axes.
    let _ = writeln!(
        out,
        r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black" stroke-width="1.5"/>"##,
        x(0.0),
        y(0.0),
        x(max_p),
        y(0.0)
    );
    let _ = writeln!(
        out,
        r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black" stroke-width="1.5"/>"##,
        x(0.0),
        y(0.0),
        x(0.0),
        y(max_q)
    );
    // Vertices and labels.
    for (i, (pf, q)) in coords.iter().enumerate() {
        let (pr, _) = &polygon.vertex_coords()[i];
        let _ = writeln!(
            out,
            r##"<circle cx="{:.1}" cy="{:.1}" r="4" fill="#203050"/>"##,
            x(*pf),
            y(*q as f64)
        );
        let _ = writeln!(
            out,
            r##"<text x="{:.1}" y="{:.1}" font-size="13" font-family="monospace">V{}({},{})</text>"##,
            x(*pf) + 8.0,
            y(*q as f64) - 6.0,
            i + 1,
            rat_string(pr),
            q
        );
    }
    // Edge slope labels.
    for (i, e) in polygon.edges().iter().enumerate() {
        let a = &coords[e.left];
        let b = &coords[e.right];
        let mx = (a.0 + b.0) / 2.0;
        let my = (a.1 as f64 + b.1 as f64) / 2.0;
        let _ = writeln!(
            out,
            r##"<text x="{:.1}" y="{:.1}" font-size="12" font-family="monospace" fill="#604020">E{} m={}</text>"##,
            x(mx) + 6.0,
            y(my) + 14.0,
            i + 1,
            rat_string(&e.m)
        );
    }
    let _ = writeln!(
        out,
        r##"<text x="{:.1}" y="{:.1}" font-size="14" font-family="monospace">{}</text>"##,
        MARGIN,
        MARGIN / 2.0,
        xml_escape(title)
    );
    out.push_str("</svg>\n");
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::example_polynomial;

    #[test]
    fn renders_well_formed_svg() {
        let p = example_polynomial(8);
        let polygon = NewtonPolygon::build(&p).unwrap();
        let svg = polygon_svg(&polygon, "stage 0");
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert!(svg.contains("V1(1,6)"));
        assert!(svg.contains("V4(6,1)"));
        assert!(svg.contains("m=1/2"));
    }
}
