//! The canonical polyhedral complex of a ReLU network.
//!
//! Cells are named by sign sequences. The complex is built by refining one
//! neuron at a time: every existing cell is intersected with the zero set of
//! the next node map, which is affine on that cell, and a candidate sign
//! pattern survives when the resulting system of equalities and strict
//! inequalities has an interior witness.

use std::collections::HashMap;

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::lp::{lp_solve, strict_feasibility, Constraint, LpProblem, LpResult, LpTolerances};
use crate::network::{PrefixForms, ReluNetwork};
use crate::orientation;
use crate::sign::{Sign, SignSequence};
use crate::tolerance::Tolerances;

pub type CellId = usize;
pub type VertexId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub signs: SignSequence,
    pub dim: usize,
    /// `sup F` over the cell is finite.
    pub bounded_above: bool,
    /// `max F` over the closure when `bounded_above`.
    pub max_value: Option<f64>,
    /// The cell is a bounded subset of the input space.
    pub bounded: bool,
    /// A relative-interior point with maximal uniform slack.
    pub witness: Vec<f64>,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexRecord {
    pub cell: CellId,
    pub location: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct CanonicalComplex {
    net: ReluNetwork,
    tol: Tolerances,
    cells: Vec<Cell>,
    index: HashMap<SignSequence, CellId>,
    vertices: Vec<VertexRecord>,
    vertex_of_cell: HashMap<CellId, VertexId>,
    facets: Vec<Vec<CellId>>,
    cofacets: Vec<Vec<CellId>>,
}

/// H-representation of a cell, rows normalised by their infinity norm.
pub(crate) struct CellPolyhedron {
    pub constraints: Vec<Constraint>,
    pub eq_rows: Vec<DVector<f64>>,
    /// Neuron index of each entry of `constraints`.
    pub neurons: Vec<usize>,
    /// A node map is constant on the cell with the wrong sign.
    pub inconsistent: bool,
    /// A zero entry whose node map is identically zero on the cell.
    pub vacuous_zero: bool,
}

pub(crate) fn cell_polyhedron(
    net: &ReluNetwork,
    signs: &[Sign],
    forms: &PrefixForms,
    tol: &Tolerances,
) -> CellPolyhedron {
    let mut poly = CellPolyhedron {
        constraints: Vec::with_capacity(signs.len()),
        eq_rows: Vec::new(),
        neurons: Vec::with_capacity(signs.len()),
        inconsistent: false,
        vacuous_zero: false,
    };
    for (k, &sign) in signs.iter().enumerate() {
        let row = &forms.rows[k];
        let offset = forms.offsets[k];
        let scale = row.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let node_scale = net.node_scale(k).max(f64::MIN_POSITIVE);
        if scale <= 1e-12 * node_scale.max(1.0) {
            // node map constant on this cell
            let value = offset / node_scale;
            match Sign::from_value(value, tol.sign) {
                s if s == sign && s == Sign::Zero => poly.vacuous_zero = true,
                s if s == sign => {}
                _ => poly.inconsistent = true,
            }
            continue;
        }
        let coeffs: Vec<f64> = row.iter().map(|v| v / scale).collect();
        let rhs = -offset / scale;
        poly.neurons.push(k);
        match sign {
            Sign::Zero => {
                poly.eq_rows.push(DVector::from_vec(coeffs.clone()));
                poly.constraints.push(Constraint::eq(coeffs, rhs));
            }
            Sign::Pos => poly.constraints.push(Constraint::ge(coeffs, rhs).strict()),
            Sign::Neg => poly.constraints.push(Constraint::le(coeffs, rhs).strict()),
        }
    }
    poly
}

/// Polyhedron of a full sign sequence, using the cell's own affine forms.
pub(crate) fn full_cell_polyhedron(
    net: &ReluNetwork,
    signs: &SignSequence,
    tol: &Tolerances,
) -> CellPolyhedron {
    let forms = net.prefix_forms(signs.entries());
    cell_polyhedron(net, signs.entries(), &forms, tol)
}

struct Candidate {
    signs: Vec<Sign>,
    witness: Vec<f64>,
    slack: f64,
}

fn pattern_label(signs: &[Sign]) -> String {
    signs.iter().map(|s| s.as_char()).collect()
}

/// Solves the vertex system of `v` using the node-map rows of `container`.
pub fn locate_vertex(
    net: &ReluNetwork,
    vertex: &SignSequence,
    container: &SignSequence,
) -> Result<Vec<f64>> {
    let n0 = net.input_dim();
    let zeros = vertex.zero_positions();
    if zeros.len() != n0 {
        return Err(Error::Dimension(format!(
            "{vertex} has {} zero entries, a vertex needs {n0}",
            zeros.len()
        )));
    }
    if !vertex.is_face_of(container) {
        return Err(Error::Shape(format!("{vertex} is not a face of {container}")));
    }
    let forms = net.prefix_forms(container.entries());
    let rows: Vec<DVector<f64>> = zeros.iter().map(|&k| forms.rows[k].clone()).collect();
    let m = linalg::matrix_from_rows(&rows, n0);
    let rhs = DVector::from_iterator(n0, zeros.iter().map(|&k| -forms.offsets[k]));
    linalg::solve_square(&m, &rhs)
        .map(|x| x.iter().copied().collect())
        .ok_or_else(|| Error::SingularSystem { cell: vertex.to_string() })
}

/// Replace every zero entry by `+`.
pub fn plus_container(cell: &SignSequence) -> SignSequence {
    SignSequence::new(
        cell.entries()
            .iter()
            .map(|&s| if s == Sign::Zero { Sign::Pos } else { s })
            .collect(),
    )
}

impl CanonicalComplex {
    /// Cell enumeration with the genericity checks only. Flat cells and
    /// repeated vertex values are accepted; see [`CanonicalComplex::build`].
    pub fn build_arrangement(net: &ReluNetwork, tol: &Tolerances) -> Result<CanonicalComplex> {
        tol.validate()?;
        let n0 = net.input_dim();
        let lp_tol = LpTolerances::from(tol);
        let mut current = vec![Candidate { signs: Vec::new(), witness: vec![0.0; n0], slack: 1.0 }];

        for _neuron in 0..net.total_neurons() {
            let mut next = Vec::with_capacity(current.len() * 3);
            for cand in &current {
                let forms = net.prefix_forms(&cand.signs);
                for sign in [Sign::Neg, Sign::Zero, Sign::Pos] {
                    let mut signs = cand.signs.clone();
                    signs.push(sign);
                    let poly = cell_polyhedron(net, &signs, &forms, tol);
                    if poly.inconsistent {
                        continue;
                    }
                    let mut problem = LpProblem::new(n0, vec![0.0; n0]);
                    problem.constraints = poly.constraints;
                    let Some(w) = strict_feasibility(&problem, &lp_tol)? else {
                        continue;
                    };
                    if w.slack <= tol.lp_feasibility {
                        continue;
                    }
                    let zeros = signs.iter().filter(|s| s.is_zero()).count();
                    if zeros > n0 || poly.vacuous_zero {
                        return Err(Error::Genericity {
                            cell: pattern_label(&signs),
                            detail: if poly.vacuous_zero {
                                "a node map vanishes identically on a cell".into()
                            } else {
                                format!("{zeros} zero entries in input dimension {n0}")
                            },
                        });
                    }
                    if linalg::rank(&linalg::matrix_from_rows(&poly.eq_rows, n0)) < poly.eq_rows.len() {
                        return Err(Error::Genericity {
                            cell: pattern_label(&signs),
                            detail: "zero-set equations are linearly dependent".into(),
                        });
                    }
                    next.push(Candidate { signs, witness: w.point, slack: w.slack });
                }
            }
            current = next;
        }

        current.sort_by(|a, b| a.signs.cmp(&b.signs));
        let mut cells = Vec::with_capacity(current.len());
        let mut index = HashMap::with_capacity(current.len());
        for (id, cand) in current.into_iter().enumerate() {
            let signs = SignSequence::new(cand.signs);
            let dim = n0 - signs.num_zeros();
            index.insert(signs.clone(), id);
            cells.push(Cell {
                signs,
                dim,
                bounded_above: false,
                max_value: None,
                bounded: dim == 0,
                witness: cand.witness,
                slack: cand.slack,
            });
        }

        let mut complex = CanonicalComplex {
            net: net.clone(),
            tol: *tol,
            cells,
            index,
            vertices: Vec::new(),
            vertex_of_cell: HashMap::new(),
            facets: Vec::new(),
            cofacets: Vec::new(),
        };
        complex.link_faces();
        complex.locate_vertices()?;
        complex.measure_cells()?;
        Ok(complex)
    }

    /// Full construction: genericity, no flat positive-dimensional cells and
    /// pairwise distinct vertex values.
    pub fn build(net: &ReluNetwork, tol: &Tolerances) -> Result<CanonicalComplex> {
        let complex = CanonicalComplex::build_arrangement(net, tol)?;
        complex.check_no_flat_cells()?;
        complex.check_injective()?;
        Ok(complex)
    }

    fn link_faces(&mut self) {
        let n = self.cells.len();
        let mut facets = vec![Vec::new(); n];
        let mut cofacets = vec![Vec::new(); n];
        for id in 0..n {
            let signs = self.cells[id].signs.clone();
            for (k, &s) in signs.entries().iter().enumerate() {
                if s == Sign::Zero {
                    for flip in [Sign::Neg, Sign::Pos] {
                        if let Some(&up) = self.index.get(&signs.with(k, flip)) {
                            cofacets[id].push(up);
                        }
                    }
                } else if let Some(&down) = self.index.get(&signs.with(k, Sign::Zero)) {
                    facets[id].push(down);
                }
            }
            facets[id].sort_unstable();
            cofacets[id].sort_unstable();
        }
        self.facets = facets;
        self.cofacets = cofacets;
    }

    fn locate_vertices(&mut self) -> Result<()> {
        let vertex_cells: Vec<CellId> = (0..self.cells.len()).filter(|&c| self.cells[c].dim == 0).collect();
        for cid in vertex_cells {
            let container = self.container_of(cid)?;
            let location = self.vertex_location(cid, container)?;
            let signs = &self.cells[cid].signs;
            let observed = self.net.sign_sequence_at(&location, self.tol.sign)?;
            if &observed != signs {
                return Err(Error::Genericity {
                    cell: signs.to_string(),
                    detail: format!("vertex solves to a point with sign sequence {observed}"),
                });
            }
            let value = self.net.evaluate(&location)?;
            self.vertex_of_cell.insert(cid, self.vertices.len());
            self.vertices.push(VertexRecord { cell: cid, location, value });
        }
        Ok(())
    }

    /// Boundedness above (and boundedness) of every cell, decided by LP.
    fn measure_cells(&mut self) -> Result<()> {
        let n0 = self.net.input_dim();
        let lp_tol = LpTolerances::from(&self.tol);
        for cid in 0..self.cells.len() {
            if self.cells[cid].dim == 0 {
                let value = self.vertices[self.vertex_of_cell[&cid]].value;
                let cell = &mut self.cells[cid];
                cell.bounded_above = true;
                cell.max_value = Some(value);
                continue;
            }
            let signs = self.cells[cid].signs.clone();
            let poly = full_cell_polyhedron(&self.net, &signs, &self.tol);
            let form = self.net.cell_affine_form(&signs)?;
            let mut problem = LpProblem::new(n0, form.gradient.iter().copied().collect())
                .with_offset(form.offset);
            problem.constraints = poly.constraints.clone();
            let max_value = match lp_solve(&problem, &lp_tol)? {
                LpResult::Optimal { value, .. } => Some(value),
                LpResult::Unbounded => None,
                LpResult::Infeasible => {
                    return Err(Error::Inconsistent(format!("closure of {signs} is empty")))
                }
            };
            let mut bounded = true;
            'axes: for axis in 0..n0 {
                for dir in [1.0, -1.0] {
                    let mut objective = vec![0.0; n0];
                    objective[axis] = dir;
                    let mut p = LpProblem::new(n0, objective);
                    p.constraints = poly.constraints.clone();
                    if lp_solve(&p, &lp_tol)? == LpResult::Unbounded {
                        bounded = false;
                        break 'axes;
                    }
                }
            }
            let cell = &mut self.cells[cid];
            cell.bounded_above = max_value.is_some();
            cell.max_value = max_value;
            cell.bounded = bounded;
        }
        Ok(())
    }

    /// Every positive-dimensional cell must carry a non-constant restriction of F.
    pub fn check_no_flat_cells(&self) -> Result<()> {
        let n0 = self.net.input_dim();
        let out_scale = self
            .net
            .output_layer()
            .weights
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        for cell in self.cells.iter().filter(|c| c.dim > 0) {
            let form = self.net.cell_affine_form(&cell.signs)?;
            let poly = full_cell_polyhedron(&self.net, &cell.signs, &self.tol);
            let eq = linalg::matrix_from_rows(&poly.eq_rows, n0);
            let residual = linalg::residual_off_rowspace(&eq, &form.gradient);
            let g = form.gradient.norm();
            if g <= 1e-14 * out_scale.max(1.0) || residual.norm() <= self.tol.flat * g {
                return Err(Error::FlatCell { cell: cell.signs.to_string() });
            }
        }
        Ok(())
    }

    pub fn check_injective(&self) -> Result<()> {
        let mut order: Vec<VertexId> = (0..self.vertices.len()).collect();
        order.sort_by(|&a, &b| self.vertices[a].value.total_cmp(&self.vertices[b].value));
        for pair in order.windows(2) {
            let (a, b) = (&self.vertices[pair[0]], &self.vertices[pair[1]]);
            let scale = a.value.abs().max(b.value.abs()).max(1.0);
            if (b.value - a.value).abs() <= self.tol.injectivity * scale {
                return Err(Error::Injectivity {
                    first: self.cells[a.cell].signs.to_string(),
                    second: self.cells[b.cell].signs.to_string(),
                    value: a.value,
                });
            }
        }
        Ok(())
    }

    pub fn net(&self) -> &ReluNetwork {
        &self.net
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn input_dim(&self) -> usize {
        self.net.input_dim()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, id: CellId) -> &Cell {
        &self.cells[id]
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn id_of(&self, signs: &SignSequence) -> Option<CellId> {
        self.index.get(signs).copied()
    }

    /// Look up a cell, reporting a missing one as a construction error.
    pub fn require(&self, signs: &SignSequence) -> Result<CellId> {
        self.id_of(signs)
            .ok_or_else(|| Error::Inconsistent(format!("{signs} is not a cell of the complex")))
    }

    pub fn cells_of_dim(&self, dim: usize) -> impl Iterator<Item = CellId> + '_ {
        (0..self.cells.len()).filter(move |&c| self.cells[c].dim == dim)
    }

    pub fn count_dim(&self, dim: usize) -> usize {
        self.cells_of_dim(dim).count()
    }

    pub fn vertices(&self) -> &[VertexRecord] {
        &self.vertices
    }

    pub fn vertex(&self, id: VertexId) -> &VertexRecord {
        &self.vertices[id]
    }

    pub fn vertex_of_cell(&self, cell: CellId) -> Option<VertexId> {
        self.vertex_of_cell.get(&cell).copied()
    }

    pub fn vertex_signs(&self, id: VertexId) -> &SignSequence {
        &self.cells[self.vertices[id].cell].signs
    }

    pub fn facets(&self, id: CellId) -> &[CellId] {
        &self.facets[id]
    }

    pub fn cofacets(&self, id: CellId) -> &[CellId] {
        &self.cofacets[id]
    }

    /// Vertices in the closure of a cell.
    pub fn cell_vertices(&self, id: CellId) -> Vec<VertexId> {
        let signs = &self.cells[id].signs;
        self.vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| self.cells[v.cell].signs.is_face_of(signs))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_face(&self, a: CellId, b: CellId) -> bool {
        self.cells[a].signs.is_face_of(&self.cells[b].signs)
    }

    /// The top cell used to evaluate affine forms around `id`: zeros
    /// replaced by `+` when that cell exists, otherwise the smallest top
    /// cell having `id` as a face.
    pub fn container_of(&self, id: CellId) -> Result<CellId> {
        let signs = &self.cells[id].signs;
        if let Some(c) = self.id_of(&plus_container(signs)) {
            return Ok(c);
        }
        let n0 = self.input_dim();
        self.cells
            .iter()
            .position(|c| c.dim == n0 && signs.is_face_of(&c.signs))
            .ok_or_else(|| Error::Genericity {
                cell: signs.to_string(),
                detail: "no top-dimensional cell contains this cell".into(),
            })
    }

    pub fn vertex_location(&self, vertex: CellId, container: CellId) -> Result<Vec<f64>> {
        locate_vertex(&self.net, &self.cells[vertex].signs, &self.cells[container].signs)
    }

    pub fn bounded_above(&self, id: CellId) -> bool {
        self.cells[id].bounded_above
    }

    /// Cells of the star of `v` on which F attains its maximum at `v`.
    pub fn lower_star(&self, v: VertexId) -> Result<Vec<CellId>> {
        let cls = orientation::classify_vertex(self, v)?;
        let mut ids = cls
            .lower_star_signs()
            .iter()
            .map(|s| self.require(s))
            .collect::<Result<Vec<_>>>()?;
        ids.sort_unstable();
        Ok(ids)
    }

    /// Edges with fewer than two vertices.
    pub fn unbounded_edges(&self) -> Vec<CellId> {
        self.cells_of_dim(1).filter(|&e| !self.cells[e].bounded).collect()
    }

    pub fn export(&self) -> ComplexExport {
        ComplexExport {
            input_dim: self.input_dim(),
            neurons: self.net.total_neurons(),
            counts: (0..=self.input_dim()).map(|d| self.count_dim(d)).collect(),
            cells: self
                .cells
                .iter()
                .enumerate()
                .map(|(id, c)| {
                    let vertex = self.vertex_of_cell(id).map(|v| &self.vertices[v]);
                    CellExport {
                        signs: c.signs.clone(),
                        dim: c.dim,
                        bounded_above: c.bounded_above,
                        bounded: c.bounded,
                        coordinates: vertex.map(|v| v.location.clone()),
                        value: vertex.map(|v| v.value),
                    }
                })
                .collect(),
        }
    }
}

/// Build with default tolerances.
pub fn build_complex(net: &ReluNetwork) -> Result<CanonicalComplex> {
    CanonicalComplex::build(net, &Tolerances::default())
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexExport {
    pub input_dim: usize,
    pub neurons: usize,
    /// Number of cells per dimension.
    pub counts: Vec<usize>,
    pub cells: Vec<CellExport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CellExport {
    pub signs: SignSequence,
    pub dim: usize,
    pub bounded_above: bool,
    pub bounded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::fixtures::net_b;
    use crate::network::{AffineLayer, Architecture};
    use approx::assert_relative_eq;

    fn ss(s: &str) -> SignSequence {
        s.parse().unwrap()
    }

    fn net_b_complex() -> CanonicalComplex {
        build_complex(&net_b()).unwrap()
    }

    fn signs_of(c: &CanonicalComplex, ids: &[CellId]) -> Vec<String> {
        let mut v: Vec<String> = ids.iter().map(|&i| c.cell(i).signs.to_string()).collect();
        v.sort();
        v
    }

    fn sorted(list: &[&str]) -> Vec<String> {
        let mut v: Vec<String> = list.iter().map(|s| s.to_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn net_b_cell_counts() {
        let c = net_b_complex();
        assert_eq!(c.len(), 19);
        assert_eq!(c.count_dim(0), 3);
        assert_eq!(c.count_dim(1), 9);
        assert_eq!(c.count_dim(2), 7);
        assert_eq!(c.unbounded_edges().len(), 6);
        let locations: Vec<(String, Vec<f64>)> = c
            .vertices()
            .iter()
            .map(|v| (c.cell(v.cell).signs.to_string(), v.location.clone()))
            .collect();
        for (signs, expected) in [("00+", [0.0, 0.0]), ("+00", [1.0, 0.0]), ("0+0", [0.0, 1.0])] {
            let (_, loc) = locations.iter().find(|(s, _)| s == signs).unwrap();
            assert_relative_eq!(loc[0], expected[0], epsilon = 1e-12);
            assert_relative_eq!(loc[1], expected[1], epsilon = 1e-12);
        }
        // the all-negative pattern is not realised
        assert!(c.id_of(&ss("---")).is_none());
    }

    #[test]
    fn cofacets_and_facets() {
        let c = net_b_complex();
        let v1 = c.id_of(&ss("00+")).unwrap();
        assert_eq!(signs_of(&c, c.cofacets(v1)), sorted(&["+0+", "-0+", "0++", "0-+"]));
        let e = c.id_of(&ss("++0")).unwrap();
        assert_eq!(signs_of(&c, c.cofacets(e)), sorted(&["+++", "++-"]));
        let top = c.id_of(&ss("+++")).unwrap();
        assert!(c.cofacets(top).is_empty());
        assert_eq!(signs_of(&c, c.facets(top)), sorted(&["0++", "+0+", "++0"]));
        let e = c.id_of(&ss("+0+")).unwrap();
        assert_eq!(signs_of(&c, c.facets(e)), sorted(&["00+", "+00"]));
        assert!(c.facets(v1).is_empty());
    }

    #[test]
    fn vertex_locations() {
        let c = net_b_complex();
        let v2 = c.id_of(&ss("+00")).unwrap();
        let cont = c.container_of(v2).unwrap();
        assert_eq!(c.cell(cont).signs, ss("+++"));
        let loc = c.vertex_location(v2, cont).unwrap();
        assert_relative_eq!(loc[0], 1.0);
        assert_relative_eq!(loc[1], 0.0);

        let identity = AffineLayer::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[0.0, 0.0]).unwrap();
        let out = AffineLayer::from_rows(&[vec![1.0, 1.0]], &[0.0]).unwrap();
        let net = ReluNetwork::new(vec![identity], out).unwrap();
        let origin = locate_vertex(&net, &ss("00"), &ss("++")).unwrap();
        assert_eq!(origin, vec![0.0, 0.0]);
    }

    #[test]
    fn boundedness_above() {
        let c = net_b_complex();
        let sigma = c.id_of(&ss("+++")).unwrap();
        assert!(c.bounded_above(sigma));
        assert_relative_eq!(c.cell(sigma).max_value.unwrap(), 4.0, epsilon = 1e-9);
        assert!(!c.bounded_above(c.id_of(&ss("-0+")).unwrap()));
        assert!(c.cells_of_dim(0).all(|v| c.bounded_above(v)));
        let count = c.cells().iter().filter(|cell| cell.bounded_above).count();
        assert_eq!(count, 7);
        let negated = build_complex(&net_b().negated()).unwrap();
        assert!(negated.cells().iter().all(|cell| cell.bounded_above));
    }

    #[test]
    fn lower_stars_of_fixture() {
        let c = net_b_complex();
        let vid = |s: &str| c.vertex_of_cell(c.id_of(&ss(s)).unwrap()).unwrap();
        let ls = c.lower_star(vid("00+")).unwrap();
        assert_eq!(signs_of(&c, &ls), sorted(&["00+", "+0+", "0++", "+++"]));
        let ls = c.lower_star(vid("+00")).unwrap();
        assert_eq!(signs_of(&c, &ls), sorted(&["+00"]));
        let ls = c.lower_star(vid("0+0")).unwrap();
        assert_eq!(signs_of(&c, &ls), sorted(&["0+0", "++0"]));
    }

    #[test]
    fn duplicated_hyperplane_is_not_generic() {
        let layer = AffineLayer::from_rows(
            &[vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
            &[0.0, 0.0, 0.5],
        )
        .unwrap();
        let out = AffineLayer::from_rows(&[vec![1.0, 2.0, 3.0]], &[0.0]).unwrap();
        let net = ReluNetwork::new(vec![layer], out).unwrap();
        assert!(matches!(build_complex(&net), Err(Error::Genericity { .. })));
    }

    #[test]
    fn three_lines_through_a_point_are_not_generic() {
        let layer = AffineLayer::from_rows(
            &[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
            &[0.0, 0.0, 0.0],
        )
        .unwrap();
        let out = AffineLayer::from_rows(&[vec![1.0, 2.0, 3.0]], &[0.0]).unwrap();
        let net = ReluNetwork::new(vec![layer], out).unwrap();
        assert!(matches!(build_complex(&net), Err(Error::Genericity { .. })));
    }

    #[test]
    fn flat_and_injectivity_errors() {
        // all-negative region exists: x < 0, y < 0 and x + y > -1 ... F vanishes there
        let layer = AffineLayer::from_rows(
            &[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
            &[0.0, 0.0, 1.0],
        )
        .unwrap();
        let out = AffineLayer::from_rows(&[vec![1.0, 2.0, 4.0]], &[0.0]).unwrap();
        let net = ReluNetwork::new(vec![layer], out).unwrap();
        assert!(CanonicalComplex::build_arrangement(&net, &Tolerances::default()).is_ok());
        assert!(matches!(build_complex(&net), Err(Error::FlatCell { .. })));

        // adjacent vertices with equal values force a flat edge, so use the
        // opposite corners (0,0) and (1,1) of a unit square
        let layer = AffineLayer::from_rows(
            &[vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]],
            &[0.0, 0.0, 1.0, 1.0],
        )
        .unwrap();
        let out = AffineLayer::from_rows(&[vec![1.0, 4.0, 2.0, 3.0]], &[0.0]).unwrap();
        let net = ReluNetwork::new(vec![layer], out).unwrap();
        assert!(matches!(build_complex(&net), Err(Error::Injectivity { .. })));
    }

    #[test]
    fn random_shallow_nets_pass_genericity() {
        let arch = Architecture::new(vec![2, 3, 1]).unwrap();
        for seed in 0..100 {
            let net = ReluNetwork::random(&arch, seed, 1.0).unwrap();
            let c = CanonicalComplex::build_arrangement(&net, &Tolerances::default())
                .unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            assert_eq!(c.count_dim(0), 3, "seed {seed}");
        }
    }

    #[test]
    fn zero_count_matches_dimension() {
        let arch = Architecture::new(vec![2, 3, 2, 1]).unwrap();
        let net = ReluNetwork::random(&arch, 3, 1.0).unwrap();
        let c = CanonicalComplex::build_arrangement(&net, &Tolerances::default()).unwrap();
        for cell in c.cells() {
            assert_eq!(cell.signs.num_zeros(), 2 - cell.dim);
        }
        // every witness reproduces its sign sequence
        for cell in c.cells().iter().filter(|c| c.dim == 2) {
            assert_eq!(c.net().sign_sequence_at(&cell.witness, 1e-9).unwrap(), cell.signs);
        }
    }

    #[test]
    fn export_is_sorted() {
        let c = net_b_complex();
        let e = c.export();
        assert_eq!(e.counts, vec![3, 9, 7]);
        let keys: Vec<&SignSequence> = e.cells.iter().map(|c| &c.signs).collect();
        let mut sorted_keys = keys.clone();
        sorted_keys.sort();
        assert_eq!(keys, sorted_keys);
        assert_eq!(e.cells.iter().filter(|c| c.coordinates.is_some()).count(), 3);
    }
}
