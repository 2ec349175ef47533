//! Deterministic SVG drawings of meshes.

use std::fmt::Write as _;

use tmesh::cvr::cvr_graph;
use tmesh::io::MeshInput;
use tmesh::rational::to_f64;
use tmesh::{Point, Rational};

#[derive(Clone, Copy, Debug, Default)]
pub struct RenderOptions {
    /// Colour mesh lines by hierarchy level.
    pub levels: bool,
    /// Draw the CVR graph on top of the mesh.
    pub cvr: bool,
}

const SIZE: f64 = 600.0;
const PAD: f64 = 20.0;
const LEVEL_COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

struct Frame {
    x0: f64,
    y1: f64,
    scale: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn px(&self, x: &Rational) -> f64 {
        PAD + (to_f64(x) - self.x0) * self.scale
    }

    fn py(&self, y: &Rational) -> f64 {
        PAD + (self.y1 - to_f64(y)) * self.scale
    }
}

fn line(out: &mut String, f: &Frame, a: &Point, b: &Point, stroke: &str, width: f64) {
    let _ = writeln!(
        out,
        r#"  <line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{stroke}" stroke-width="{width:.1}" stroke-linecap="square"/>"#,
        f.px(&a.x),
        f.py(&a.y),
        f.px(&b.x),
        f.py(&b.y)
    );
}

/// Renders the mesh. Output depends only on the mesh and the options.
pub fn render_svg(input: &MeshInput, opts: RenderOptions) -> String {
    let mesh = input.mesh();
    let d = mesh.domain();
    let (w, h) = (to_f64(&d.width()), to_f64(&d.height()));
    let scale = SIZE / w.max(h);
    let frame = Frame { x0: to_f64(&d.x0), y1: to_f64(&d.y1), scale, width: w * scale + 2.0 * PAD, height: h * scale + 2.0 * PAD };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.0} {:.0}">"#,
        frame.width, frame.height, frame.width, frame.height
    );
    let _ = writeln!(out, r#"  <rect width="100%" height="100%" fill="white"/>"#);
    let mesh_colour = if opts.cvr { "#b0b0b0" } else { "#202020" };
    for l in mesh.ledges() {
        let colour = match (opts.levels, input.hierarchy()) {
            (true, Some(hm)) => LEVEL_COLOURS[hm.line_level(l.orientation, &l.line_coord) % LEVEL_COLOURS.len()],
            _ => mesh_colour,
        };
        let [a, b] = l.endpoints();
        line(&mut out, &frame, &a, &b, colour, if l.is_boundary { 2.0 } else { 1.0 });
    }
    if opts.cvr {
        let g = cvr_graph(mesh);
        for &(a, b) in &g.edges {
            line(&mut out, &frame, &mesh.vertices()[a].point, &mesh.vertices()[b].point, "black", 2.5);
        }
        for &v in &g.nodes {
            let p = &mesh.vertices()[v].point;
            let _ = writeln!(out, r#"  <circle cx="{:.3}" cy="{:.3}" r="3.5" fill="black"/>"#, frame.px(&p.x), frame.py(&p.y));
        }
    }
    if opts.levels && input.hierarchy().is_some() {
        let max = input.hierarchy().map_or(0, |h| h.max_level());
        for k in 0..=max {
            let _ = writeln!(
                out,
                r#"  <text x="{:.0}" y="{:.0}" font-family="monospace" font-size="12" fill="{}">level {k}</text>"#,
                PAD + 70.0 * k as f64,
                PAD * 0.75,
                LEVEL_COLOURS[k % LEVEL_COLOURS.len()]
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Number of `<line>` elements in an SVG made by [`render_svg`].
pub fn count_lines(svg: &str) -> usize {
    svg.matches("<line ").count()
}
