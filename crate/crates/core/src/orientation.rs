//! ∇F-orientations of edges, PL-critical vertex classification and the
//! `(n, n+1, 1)` realizability analyzer.
//!
//! Everything here is analytic: an edge direction at a vertex comes from an
//! `n0 x n0` linear system in the node-map rows of a containing top cell, and
//! its orientation from the sign of the cell gradient along it. The
//! `*_signs` functions need only the network and sign sequences; the complex
//! versions additionally check that the cells exist.

use std::collections::BTreeMap;

use nalgebra::DVector;
use serde::Serialize;

use crate::complex::{plus_container, CanonicalComplex, CellId, VertexId};
use crate::error::{Error, Result};
use crate::linalg;
use crate::lp::{lp_solve, LpProblem, LpResult, LpTolerances};
use crate::network::ReluNetwork;
use crate::sign::{Sign, SignSequence};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    TowardAnchor,
    AwayFromAnchor,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeOrientation {
    pub edge: SignSequence,
    /// Vertex the direction label refers to; `None` for vertex-free lines.
    pub anchor: Option<SignSequence>,
    pub direction: Option<Direction>,
    /// Sign of the derivative of F leaving the anchor.
    pub derivative_sign: i8,
    /// Unit vector along the edge pointing uphill.
    pub ascent: Vec<f64>,
}

/// Both edges of one zero entry (axis) of a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AxisOrientation {
    /// Flat neuron index of the axis.
    pub neuron: usize,
    /// F decreases from the vertex into the edge with `-` at this axis.
    pub minus_descends: bool,
    pub plus_descends: bool,
}

impl AxisOrientation {
    pub fn is_flow_through(&self) -> bool {
        self.minus_descends != self.plus_descends
    }

    pub fn both_descend(&self) -> bool {
        self.minus_descends && self.plus_descends
    }

    /// Signs at this axis whose edge lies in the lower star.
    pub fn descending_signs(&self) -> Vec<Sign> {
        let mut out = Vec::with_capacity(2);
        if self.minus_descends {
            out.push(Sign::Neg);
        }
        if self.plus_descends {
            out.push(Sign::Pos);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "index", rename_all = "lowercase")]
pub enum VertexKind {
    Regular,
    Critical(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FlowAxis {
    pub neuron: usize,
    /// Sign of the descending edge at this axis.
    pub descending_sign: Sign,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexClassification {
    pub vertex: SignSequence,
    pub kind: VertexKind,
    pub axes: Vec<AxisOrientation>,
    /// Neurons of axes whose two edges both descend.
    pub descending_axes: Vec<usize>,
    /// First flow-through axis, for regular vertices.
    pub flow_axis: Option<FlowAxis>,
}

impl VertexClassification {
    pub fn is_critical(&self) -> bool {
        matches!(self.kind, VertexKind::Critical(_))
    }

    pub fn index(&self) -> Option<usize> {
        match self.kind {
            VertexKind::Critical(k) => Some(k),
            VertexKind::Regular => None,
        }
    }

    /// `c` lies in the lower star: it is a coface of the vertex and every
    /// axis where it is nonzero carries a descending sign.
    pub fn in_lower_star(&self, c: &SignSequence) -> bool {
        if !self.vertex.is_face_of(c) {
            return false;
        }
        self.axes.iter().all(|a| match c.get(a.neuron) {
            Sign::Zero => true,
            Sign::Neg => a.minus_descends,
            Sign::Pos => a.plus_descends,
        })
    }

    /// All lower-star cells, sorted.
    pub fn lower_star_signs(&self) -> Vec<SignSequence> {
        let mut cells = vec![self.vertex.clone()];
        for axis in &self.axes {
            let options = axis.descending_signs();
            let mut next = Vec::with_capacity(cells.len() * (1 + options.len()));
            for c in &cells {
                next.push(c.clone());
                for &s in &options {
                    next.push(c.with(axis.neuron, s));
                }
            }
            cells = next;
        }
        cells.sort();
        cells
    }
}

/// Unit direction from vertex `v` into the incident edge `e`.
pub fn edge_direction_signs(
    net: &ReluNetwork,
    v: &SignSequence,
    e: &SignSequence,
) -> Result<DVector<f64>> {
    let n0 = net.input_dim();
    let zeros = v.zero_positions();
    if zeros.len() != n0 || e.num_zeros() + 1 != n0 || !v.is_face_of(e) {
        return Err(Error::Shape(format!("{v} is not a vertex facet of the edge {e}")));
    }
    let flipped = v.single_difference(e).expect("facet differs in one entry");
    let container = plus_container(e);
    let forms = net.prefix_forms(container.entries());
    let rows: Vec<DVector<f64>> = zeros.iter().map(|&k| forms.rows[k].clone()).collect();
    let w = linalg::matrix_from_rows(&rows, n0);
    let mut rhs = DVector::zeros(n0);
    let position = zeros.iter().position(|&k| k == flipped).expect("flipped entry is a zero of v");
    rhs[position] = e.get(flipped).as_f64();
    let d = linalg::solve_square(&w, &rhs).ok_or_else(|| Error::SingularSystem { cell: v.to_string() })?;
    Ok(d.normalize())
}

/// Directional derivative of F from `v` into `e` along the unit edge direction.
pub fn directional_derivative_signs(
    net: &ReluNetwork,
    v: &SignSequence,
    e: &SignSequence,
    tol: &Tolerances,
) -> Result<f64> {
    let d = edge_direction_signs(net, v, e)?;
    let form = net.cell_affine_form(&plus_container(e))?;
    let derivative = form.gradient.dot(&d);
    if derivative.abs() <= tol.flat * form.gradient.norm() {
        return Err(Error::FlatCell { cell: e.to_string() });
    }
    Ok(derivative)
}

/// PL classification of a vertex from its `2 n0` incident edge derivatives.
pub fn classify_signs(
    net: &ReluNetwork,
    v: &SignSequence,
    tol: &Tolerances,
) -> Result<VertexClassification> {
    let mut axes = Vec::new();
    for neuron in v.zero_positions() {
        let minus = directional_derivative_signs(net, v, &v.with(neuron, Sign::Neg), tol)?;
        let plus = directional_derivative_signs(net, v, &v.with(neuron, Sign::Pos), tol)?;
        axes.push(AxisOrientation { neuron, minus_descends: minus < 0.0, plus_descends: plus < 0.0 });
    }
    let flow_axis = axes.iter().find(|a| a.is_flow_through()).map(|a| FlowAxis {
        neuron: a.neuron,
        descending_sign: if a.minus_descends { Sign::Neg } else { Sign::Pos },
    });
    let descending_axes: Vec<usize> = axes.iter().filter(|a| a.both_descend()).map(|a| a.neuron).collect();
    let kind = match flow_axis {
        Some(_) => VertexKind::Regular,
        None => VertexKind::Critical(descending_axes.len()),
    };
    Ok(VertexClassification { vertex: v.clone(), kind, axes, descending_axes, flow_axis })
}

fn vertex_cell(complex: &CanonicalComplex, v: VertexId) -> CellId {
    complex.vertex(v).cell
}

pub fn edge_direction(complex: &CanonicalComplex, v: VertexId, e: CellId) -> Result<DVector<f64>> {
    let vs = &complex.cell(vertex_cell(complex, v)).signs;
    edge_direction_signs(complex.net(), vs, &complex.cell(e).signs)
}

pub fn orient_edge(complex: &CanonicalComplex, v: VertexId, e: CellId) -> Result<EdgeOrientation> {
    let vs = complex.cell(vertex_cell(complex, v)).signs.clone();
    let es = complex.cell(e).signs.clone();
    let d = edge_direction_signs(complex.net(), &vs, &es)?;
    let derivative = directional_derivative_signs(complex.net(), &vs, &es, complex.tolerances())?;
    let (direction, sign) = if derivative > 0.0 {
        (Direction::AwayFromAnchor, 1)
    } else {
        (Direction::TowardAnchor, -1)
    };
    let ascent: Vec<f64> = d.iter().map(|x| x * sign as f64).collect();
    Ok(EdgeOrientation { edge: es, anchor: Some(vs), direction: Some(direction), derivative_sign: sign, ascent })
}

/// Classification with a check that all `2 n0` incident edges are cells.
pub fn classify_vertex(complex: &CanonicalComplex, v: VertexId) -> Result<VertexClassification> {
    let vs = complex.cell(vertex_cell(complex, v)).signs.clone();
    for neuron in vs.zero_positions() {
        for s in [Sign::Neg, Sign::Pos] {
            let e = vs.with(neuron, s);
            if complex.id_of(&e).is_none() {
                return Err(Error::MissingEdge { vertex: vs.to_string(), edge: e.to_string() });
            }
        }
    }
    classify_signs(complex.net(), &vs, complex.tolerances())
}

pub fn classify_all(complex: &CanonicalComplex) -> Result<Vec<VertexClassification>> {
    (0..complex.vertices().len()).map(|v| classify_vertex(complex, v)).collect()
}

/// Orientation of every edge, keyed by the edge's sign sequence.
pub fn orientation_field(complex: &CanonicalComplex) -> Result<BTreeMap<SignSequence, EdgeOrientation>> {
    complex
        .cells_of_dim(1)
        .map(|e| Ok((complex.cell(e).signs.clone(), orient_any_edge(complex, e)?)))
        .collect()
}

/// Orientation of edge `e`, anchored at its smallest vertex when it has one.
pub fn orient_any_edge(complex: &CanonicalComplex, e: CellId) -> Result<EdgeOrientation> {
    let anchor = complex
        .facets(e)
        .iter()
        .filter_map(|&f| complex.vertex_of_cell(f))
        .min_by(|&a, &b| complex.vertex_signs(a).cmp(complex.vertex_signs(b)));
    match anchor {
        Some(v) => orient_edge(complex, v, e),
        None => orient_line(complex, e),
    }
}

/// Vertex-free edge: project the gradient of a containing top cell onto the line.
fn orient_line(complex: &CanonicalComplex, e: CellId) -> Result<EdgeOrientation> {
    let signs = complex.cell(e).signs.clone();
    let net = complex.net();
    let n0 = net.input_dim();
    let container = complex.container_of(e)?;
    let forms = net.prefix_forms(complex.cell(container).signs.entries());
    let rows: Vec<DVector<f64>> = signs.zero_positions().iter().map(|&k| forms.rows[k].clone()).collect();
    let along = linalg::null_vector(&linalg::matrix_from_rows(&rows, n0));
    let gradient = net.cell_affine_form(&complex.cell(container).signs)?.gradient;
    let derivative = gradient.dot(&along);
    if derivative.abs() <= complex.tolerances().flat * gradient.norm() {
        return Err(Error::FlatCell { cell: signs.to_string() });
    }
    let sign = if derivative > 0.0 { 1.0 } else { -1.0 };
    Ok(EdgeOrientation {
        edge: signs,
        anchor: None,
        direction: None,
        derivative_sign: sign as i8,
        ascent: along.iter().map(|x| x * sign).collect(),
    })
}

/// Orientation classes of a `(2, 3, 1)` network, relative to the bounded
/// triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShallowClass {
    AllToward,
    AllAway,
    OneToward,
    OneAway,
}

impl ShallowClass {
    pub fn number(self) -> u8 {
        match self {
            ShallowClass::AllToward => 1,
            ShallowClass::AllAway => 2,
            ShallowClass::OneToward => 3,
            ShallowClass::OneAway => 4,
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            ShallowClass::AllToward => "all unbounded edges toward the bounded cell",
            ShallowClass::AllAway => "all unbounded edges away from the bounded cell",
            ShallowClass::OneToward => "one vertex's unbounded edges toward, all others away",
            ShallowClass::OneAway => "one vertex's unbounded edges away, all others toward",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryType {
    Empty,
    Point,
    Sphere,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalEntry {
    pub vertex: SignSequence,
    pub index: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShallowReport {
    /// Orientation class; only defined for input dimension 2.
    pub class: Option<ShallowClass>,
    pub critical: Vec<CriticalEntry>,
    pub boundary_type: BoundaryType,
    /// Unbounded edges at each vertex share one orientation.
    pub unbounded_edges_agree: bool,
    /// At most one critical vertex, and its index is 0 or n.
    pub critical_bound_holds: bool,
    /// Per vertex: `Some(true)` when its unbounded edges point away from it.
    pub unbounded_away: BTreeMap<SignSequence, Option<bool>>,
}

/// Checks for `(n, n+1, 1)` networks.
pub fn analyze_shallow(complex: &CanonicalComplex) -> Result<ShallowReport> {
    let net = complex.net();
    if !net.architecture().is_shallow_simplex() {
        return Err(Error::Architecture(format!(
            "shallow analysis needs an (n, n+1, 1) network, got {}",
            net.architecture()
        )));
    }
    let n = net.input_dim();

    let mut agree = true;
    let mut away_by_vertex = BTreeMap::new();
    for v in 0..complex.vertices().len() {
        let vc = complex.vertex(v).cell;
        let mut seen: Option<bool> = None;
        for &e in complex.cofacets(vc) {
            if complex.cell(e).bounded {
                continue;
            }
            let away = orient_edge(complex, v, e)?.direction == Some(Direction::AwayFromAnchor);
            match seen {
                None => seen = Some(away),
                Some(prev) if prev != away => agree = false,
                _ => {}
            }
        }
        away_by_vertex.insert(complex.cell(vc).signs.clone(), seen);
    }

    let mut critical = Vec::new();
    for (v, cls) in classify_all(complex)?.into_iter().enumerate() {
        if let VertexKind::Critical(index) = cls.kind {
            critical.push(CriticalEntry { vertex: cls.vertex, index, value: complex.vertex(v).value });
        }
    }
    critical.sort_by(|a, b| a.vertex.cmp(&b.vertex));
    let critical_bound_holds = critical.len() <= 1 && critical.iter().all(|c| c.index == 0 || c.index == n);

    let class = if n == 2 && agree {
        let flags: Vec<bool> = away_by_vertex.values().filter_map(|x| *x).collect();
        let away = flags.iter().filter(|&&a| a).count();
        let total = flags.len();
        match (away, total) {
            (0, 3) => Some(ShallowClass::AllToward),
            (3, 3) => Some(ShallowClass::AllAway),
            (2, 3) => Some(ShallowClass::OneToward),
            (1, 3) => Some(ShallowClass::OneAway),
            _ => None,
        }
    } else {
        None
    };

    let boundary_type = decision_boundary_type(complex, &critical)?;
    Ok(ShallowReport {
        class,
        critical,
        boundary_type,
        unbounded_edges_agree: agree,
        critical_bound_holds,
        unbounded_away: away_by_vertex,
    })
}

/// Homotopy type of `F^-1(0)` for a network with at most one critical point.
fn decision_boundary_type(complex: &CanonicalComplex, critical: &[CriticalEntry]) -> Result<BoundaryType> {
    let n = complex.input_dim();
    match critical {
        [] => {
            let (lo, hi) = value_range(complex)?;
            Ok(if lo < 0.0 && 0.0 < hi { BoundaryType::Point } else { BoundaryType::Empty })
        }
        [c] if c.index == 0 => Ok(if c.value < 0.0 { BoundaryType::Sphere } else { BoundaryType::Empty }),
        [c] if c.index == n => Ok(if c.value > 0.0 { BoundaryType::Sphere } else { BoundaryType::Empty }),
        _ => Err(Error::Inconsistent(format!(
            "decision boundary type is only defined for at most one critical point of index 0 or {n}"
        ))),
    }
}

/// `(inf F, sup F)` over the input space, from LPs on the top cells.
fn value_range(complex: &CanonicalComplex) -> Result<(f64, f64)> {
    let n0 = complex.input_dim();
    let lp_tol = LpTolerances::from(complex.tolerances());
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for top in complex.cells_of_dim(n0) {
        let signs = &complex.cell(top).signs;
        let form = complex.net().cell_affine_form(signs)?;
        let poly = crate::complex::full_cell_polyhedron(complex.net(), signs, complex.tolerances());
        for dir in [1.0, -1.0] {
            let mut p = LpProblem::new(n0, form.gradient.iter().map(|g| g * dir).collect())
                .with_offset(form.offset * dir);
            p.constraints = poly.constraints.clone();
            let extreme = match lp_solve(&p, &lp_tol)? {
                LpResult::Optimal { value, .. } => value * dir,
                LpResult::Unbounded => dir * f64::INFINITY,
                LpResult::Infeasible => continue,
            };
            if dir > 0.0 {
                hi = hi.max(extreme);
            } else {
                lo = lo.min(extreme);
            }
        }
    }
    Ok((lo, hi))
}
