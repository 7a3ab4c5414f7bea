//! SVG drawings of planar complexes.
//!
//! Edges are clipped to a box, oriented uphill by an arrowhead at their
//! midpoint, critical vertices are circled and critical 2-cells shaded. Output
//! is byte-deterministic.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::complex::{full_cell_polyhedron, CanonicalComplex, CellId};
use crate::error::{Error, Result};
use crate::lp::{Constraint, ConstraintKind};
use crate::orientation::{classify_vertex, orient_any_edge};
use crate::sign::Sign;

const CANVAS: f64 = 600.0;
const PAD: f64 = 20.0;
const MARGIN: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl Bounds {
    fn around(points: &[[f64; 2]]) -> Bounds {
        let mut b = Bounds { xmin: -MARGIN, ymin: -MARGIN, xmax: MARGIN, ymax: MARGIN };
        if let Some(first) = points.first() {
            b = Bounds { xmin: first[0], ymin: first[1], xmax: first[0], ymax: first[1] };
            for p in points {
                b.xmin = b.xmin.min(p[0]);
                b.ymin = b.ymin.min(p[1]);
                b.xmax = b.xmax.max(p[0]);
                b.ymax = b.ymax.max(p[1]);
            }
            b.xmin -= MARGIN;
            b.ymin -= MARGIN;
            b.xmax += MARGIN;
            b.ymax += MARGIN;
        }
        b
    }

    fn half_planes(&self) -> [Constraint; 4] {
        [
            Constraint::ge(vec![1.0, 0.0], self.xmin),
            Constraint::le(vec![1.0, 0.0], self.xmax),
            Constraint::ge(vec![0.0, 1.0], self.ymin),
            Constraint::le(vec![0.0, 1.0], self.ymax),
        ]
    }
}

/// `xmin,ymin,xmax,ymax`.
impl FromStr for Bounds {
    type Err = Error;

    fn from_str(s: &str) -> Result<Bounds> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Shape(format!("render box {s:?}: {e}")))?;
        let [xmin, ymin, xmax, ymax] = parts[..] else {
            return Err(Error::Shape(format!("render box {s:?} needs four numbers")));
        };
        if !(xmin < xmax && ymin < ymax) || parts.iter().any(|v| !v.is_finite()) {
            return Err(Error::Shape(format!("render box {s:?} is empty")));
        }
        Ok(Bounds { xmin, ymin, xmax, ymax })
    }
}

#[derive(Debug, Clone, Default)]
pub struct RenderOptions {
    /// Overrides the box around the vertices.
    pub bounds: Option<Bounds>,
}

struct Frame {
    b: Bounds,
    scale: f64,
}

impl Frame {
    fn new(b: Bounds) -> Frame {
        let scale = (CANVAS - 2.0 * PAD) / (b.xmax - b.xmin).max(b.ymax - b.ymin);
        Frame { b, scale }
    }

    fn width(&self) -> f64 {
        2.0 * PAD + (self.b.xmax - self.b.xmin) * self.scale
    }

    fn height(&self) -> f64 {
        2.0 * PAD + (self.b.ymax - self.b.ymin) * self.scale
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        (PAD + (p[0] - self.b.xmin) * self.scale, PAD + (self.b.ymax - p[1]) * self.scale)
    }

    fn point(&self, p: [f64; 2]) -> String {
        let (x, y) = self.map(p);
        format!("{},{}", num(x), num(y))
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn dot(a: &[f64], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Restrict `[lo, hi]` to the parameters `t` with `p + t u` satisfying `c`.
fn clip_interval(c: &Constraint, p: [f64; 2], u: [f64; 2], lo: &mut f64, hi: &mut f64) {
    let (cp, cu) = (dot(&c.coeffs, p), dot(&c.coeffs, u));
    // normalise to  cp + t cu >= rhs
    let (cp, cu, rhs) = match c.kind {
        ConstraintKind::Ge => (cp, cu, c.rhs),
        ConstraintKind::Le => (-cp, -cu, -c.rhs),
        ConstraintKind::Eq => return,
    };
    if cu.abs() < 1e-12 {
        if cp < rhs - 1e-9 {
            *lo = f64::INFINITY;
        }
    } else if cu > 0.0 {
        *lo = lo.max((rhs - cp) / cu);
    } else {
        *hi = hi.min((rhs - cp) / cu);
    }
}

/// Sutherland-Hodgman clipping of a convex polygon by one half-plane.
fn clip_polygon(poly: &[[f64; 2]], c: &Constraint) -> Vec<[f64; 2]> {
    let value = |p: [f64; 2]| match c.kind {
        ConstraintKind::Ge => dot(&c.coeffs, p) - c.rhs,
        ConstraintKind::Le => c.rhs - dot(&c.coeffs, p),
        ConstraintKind::Eq => 0.0,
    };
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let (va, vb) = (value(a), value(b));
        if va >= 0.0 {
            out.push(a);
        }
        if (va >= 0.0) != (vb >= 0.0) {
            let t = va / (va - vb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

struct Segment {
    from: [f64; 2],
    to: [f64; 2],
    oriented: bool,
}

fn edge_segment(complex: &CanonicalComplex, e: CellId, bounds: &Bounds) -> Result<Option<Segment>> {
    let signs = &complex.cell(e).signs;
    let poly = full_cell_polyhedron(complex.net(), signs, complex.tolerances());
    let Some(a) = poly.eq_rows.first() else {
        return Err(Error::Inconsistent(format!("edge {signs} has no defining equation")));
    };
    let line = poly
        .constraints
        .iter()
        .find(|c| c.kind == ConstraintKind::Eq)
        .expect("an equation row has a constraint");
    let u = {
        let n = (a[0] * a[0] + a[1] * a[1]).sqrt();
        [-a[1] / n, a[0] / n]
    };
    let anchor = complex.facets(e).iter().find_map(|&f| complex.vertex_of_cell(f));
    let p = match anchor {
        Some(v) => {
            let loc = &complex.vertex(v).location;
            [loc[0], loc[1]]
        }
        None => {
            let n2 = dot(&line.coeffs, [line.coeffs[0], line.coeffs[1]]);
            [line.coeffs[0] * line.rhs / n2, line.coeffs[1] * line.rhs / n2]
        }
    };
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for c in poly.constraints.iter().chain(bounds.half_planes().iter()) {
        clip_interval(c, p, u, &mut lo, &mut hi);
    }
    if lo >= hi || lo.is_nan() || hi.is_nan() {
        return Ok(None);
    }
    let at = |t: f64| [p[0] + t * u[0], p[1] + t * u[1]];
    let (mut from, mut to) = (at(lo), at(hi));
    let oriented = match orient_any_edge(complex, e) {
        Ok(o) => {
            if o.ascent[0] * u[0] + o.ascent[1] * u[1] < 0.0 {
                std::mem::swap(&mut from, &mut to);
            }
            true
        }
        Err(Error::FlatCell { .. }) => false,
        Err(err) => return Err(err),
    };
    Ok(Some(Segment { from, to, oriented }))
}

/// SVG of a planar complex. Orientation and classification are best effort:
/// flat edges are drawn without arrowheads and vertices that cannot be
/// classified are not circled.
pub fn render_svg(complex: &CanonicalComplex, opts: &RenderOptions) -> Result<String> {
    if complex.input_dim() != 2 {
        return Err(Error::Dimension(format!(
            "rendering needs input dimension 2, found {}",
            complex.input_dim()
        )));
    }
    let vertices: Vec<[f64; 2]> = complex.vertices().iter().map(|v| [v.location[0], v.location[1]]).collect();
    let bounds = match opts.bounds {
        Some(b) => b,
        None if !vertices.is_empty() => Bounds::around(&vertices),
        None => {
            // closest points of the vertex-free lines to the origin
            let mut feet = Vec::new();
            for e in complex.cells_of_dim(1) {
                let poly = full_cell_polyhedron(complex.net(), &complex.cell(e).signs, complex.tolerances());
                if let Some(c) = poly.constraints.iter().find(|c| c.kind == ConstraintKind::Eq) {
                    let n2 = dot(&c.coeffs, [c.coeffs[0], c.coeffs[1]]);
                    feet.push([c.coeffs[0] * c.rhs / n2, c.coeffs[1] * c.rhs / n2]);
                }
            }
            Bounds::around(&feet)
        }
    };
    let frame = Frame::new(bounds);

    let mut critical_vertices = Vec::new();
    let mut critical_faces = Vec::new();
    for v in 0..complex.vertices().len() {
        let Ok(cls) = classify_vertex(complex, v) else { continue };
        if cls.index() == Some(2) {
            let mut face = cls.vertex.clone();
            for &a in &cls.descending_axes {
                face = face.with(a, Sign::Neg);
            }
            critical_faces.push(complex.require(&face)?);
        }
        if cls.is_critical() {
            critical_vertices.push(v);
        }
    }

    let mut svg = String::new();
    let (w, h) = (frame.width(), frame.height());
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        num(w),
        num(h),
        num(w),
        num(h)
    );
    svg.push_str(concat!(
        "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"5\" refY=\"5\" markerWidth=\"8\" ",
        "markerHeight=\"8\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#333\"/></marker></defs>\n"
    ));
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#, num(w), num(h));

    for &f in &critical_faces {
        let poly = full_cell_polyhedron(complex.net(), &complex.cell(f).signs, complex.tolerances());
        let mut region = vec![
            [bounds.xmin, bounds.ymin],
            [bounds.xmax, bounds.ymin],
            [bounds.xmax, bounds.ymax],
            [bounds.xmin, bounds.ymax],
        ];
        for c in &poly.constraints {
            region = clip_polygon(&region, c);
        }
        if region.len() >= 3 {
            let points: Vec<String> = region.iter().map(|&p| frame.point(p)).collect();
            let _ = writeln!(
                svg,
                r##"<polygon class="critical-cell" points="{}" fill="#f4b6b6" fill-opacity="0.6" stroke="none"/>"##,
                points.join(" ")
            );
        }
    }

    for e in complex.cells_of_dim(1) {
        let Some(seg) = edge_segment(complex, e, &bounds)? else { continue };
        let mid = [(seg.from[0] + seg.to[0]) / 2.0, (seg.from[1] + seg.to[1]) / 2.0];
        let marker = if seg.oriented { r#" marker-mid="url(#arrow)""# } else { "" };
        let _ = writeln!(
            svg,
            r##"<polyline class="edge" data-signs="{}" points="{} {} {}" fill="none" stroke="#333" stroke-width="1.5"{}/>"##,
            complex.cell(e).signs,
            frame.point(seg.from),
            frame.point(mid),
            frame.point(seg.to),
            marker
        );
    }

    for (v, record) in complex.vertices().iter().enumerate() {
        let (x, y) = frame.map([record.location[0], record.location[1]]);
        if critical_vertices.contains(&v) {
            let _ = writeln!(
                svg,
                r##"<circle class="critical" cx="{}" cy="{}" r="9" fill="none" stroke="#c0392b" stroke-width="2"/>"##,
                num(x),
                num(y)
            );
        }
        let _ = writeln!(
            svg,
            r##"<circle class="vertex" data-signs="{}" cx="{}" cy="{}" r="3" fill="#111"/>"##,
            complex.cell(record.cell).signs,
            num(x),
            num(y)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
