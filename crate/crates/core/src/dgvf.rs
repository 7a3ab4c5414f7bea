//! Discrete gradient vector field on the compactified lower-star complex.
//!
//! Every bounded-above cell lies in the lower star of exactly one vertex, the
//! vertex where F attains its maximum over the cell. Lower stars are paired
//! independently with a rule that only looks at sign entries at the vertex's
//! zero positions, and the union of these local pairings, together with the
//! basepoint `*` at value `-inf`, is the global matching.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::complex::{full_cell_polyhedron, CanonicalComplex};
use crate::error::{Error, Result};
pub use crate::lp::{lp_solve, LpProblem, LpResult};
use crate::lp::LpTolerances;
use crate::network::ReluNetwork;
use crate::orientation::{classify_all, classify_signs, VertexClassification, VertexKind};
use crate::sign::{Sign, SignSequence};
use crate::tolerance::Tolerances;

pub type Pair = (SignSequence, SignSequence);

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellLabel {
    Basepoint,
    Cell(SignSequence),
}

impl CellLabel {
    pub fn signs(&self) -> Option<&SignSequence> {
        match self {
            CellLabel::Basepoint => None,
            CellLabel::Cell(s) => Some(s),
        }
    }
}

impl fmt::Display for CellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellLabel::Basepoint => write!(f, "*"),
            CellLabel::Cell(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompactCell {
    pub label: CellLabel,
    pub dim: usize,
    /// Indices of codimension-one faces; arcs to `*` list the basepoint.
    pub facets: Vec<usize>,
    /// Maximum of F over the closure; `-inf` for the basepoint.
    pub fmax: f64,
    /// Vertex whose lower star contains the cell.
    pub owner: Option<SignSequence>,
}

/// Bounded-above cells of C(F) plus the basepoint `*`.
#[derive(Debug, Clone)]
pub struct CompactifiedComplex {
    cells: Vec<CompactCell>,
    index: HashMap<CellLabel, usize>,
    cofacets: Vec<Vec<usize>>,
    ambient_dim: usize,
}

impl CompactifiedComplex {
    /// Assemble from explicit cells. Facet indices must point at cells one
    /// dimension lower; labels must be unique.
    pub fn from_cells(cells: Vec<CompactCell>, ambient_dim: usize) -> Result<Self> {
        let mut index = HashMap::with_capacity(cells.len());
        let mut cofacets = vec![Vec::new(); cells.len()];
        for (i, cell) in cells.iter().enumerate() {
            if cell.dim > ambient_dim {
                return Err(Error::Dimension(format!("cell {} has dimension {} > {ambient_dim}", cell.label, cell.dim)));
            }
            if index.insert(cell.label.clone(), i).is_some() {
                return Err(Error::Inconsistent(format!("duplicate cell label {}", cell.label)));
            }
            for &f in &cell.facets {
                let Some(face) = cells.get(f) else {
                    return Err(Error::IndexOutOfRange(format!("facet {f} of {}", cell.label)));
                };
                if face.dim + 1 != cell.dim {
                    return Err(Error::Inconsistent(format!("{} listed as a facet of {}", face.label, cell.label)));
                }
                cofacets[f].push(i);
            }
        }
        Ok(CompactifiedComplex { cells, index, cofacets, ambient_dim })
    }

    /// Synthetic complex from dimensions and facet lists. Cell `i` is labelled
    /// by the base-3 digits of `i` so that matchings can name it.
    pub fn from_incidence(dims: &[usize], facets: Vec<Vec<usize>>, fmax: &[f64]) -> Result<Self> {
        if dims.len() != facets.len() || dims.len() != fmax.len() {
            return Err(Error::Shape("dims, facets and fmax differ in length".into()));
        }
        let ambient = dims.iter().copied().max().unwrap_or(0);
        let cells = facets
            .into_iter()
            .enumerate()
            .map(|(i, facets)| CompactCell {
                label: CellLabel::Cell(synthetic_label(i)),
                dim: dims[i],
                facets,
                fmax: fmax[i],
                owner: None,
            })
            .collect();
        CompactifiedComplex::from_cells(cells, ambient)
    }

    pub fn cells(&self) -> &[CompactCell] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &CompactCell {
        &self.cells[i]
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn index_of(&self, label: &CellLabel) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn index_of_signs(&self, signs: &SignSequence) -> Option<usize> {
        self.index_of(&CellLabel::Cell(signs.clone()))
    }

    pub fn basepoint(&self) -> Option<usize> {
        self.index_of(&CellLabel::Basepoint)
    }

    pub fn cofacets(&self, i: usize) -> &[usize] {
        &self.cofacets[i]
    }

    pub fn count_dim(&self, dim: usize) -> usize {
        self.cells.iter().filter(|c| c.dim == dim).count()
    }

    /// Sorted distinct values of F at the vertices (the basepoint excluded).
    pub fn vertex_levels(&self) -> Vec<f64> {
        let mut levels: Vec<f64> = self
            .cells
            .iter()
            .filter(|c| c.dim == 0 && c.label != CellLabel::Basepoint)
            .map(|c| c.fmax)
            .collect();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        levels
    }
}

fn synthetic_label(mut i: usize) -> SignSequence {
    let mut digits = Vec::new();
    for _ in 0..8 {
        digits.push(match i % 3 {
            0 => Sign::Neg,
            1 => Sign::Zero,
            _ => Sign::Pos,
        });
        i /= 3;
    }
    digits.reverse();
    SignSequence::new(digits)
}

/// Role of a cell in a matching.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "role", content = "partner", rename_all = "lowercase")]
pub enum PairAssignment {
    /// Paired with the given cofacet.
    Up(SignSequence),
    /// Paired with the given facet.
    Down(SignSequence),
    Critical,
}

/// Pairs `(lower, upper)` and the unpaired cells. The basepoint is never part
/// of a pair.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Matching {
    pub pairs: Vec<Pair>,
    pub critical: Vec<SignSequence>,
    pub includes_basepoint: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatchingExport {
    pub pairs: Vec<[SignSequence; 2]>,
    pub critical: Vec<SignSequence>,
    pub basepoint: bool,
}

impl Matching {
    pub fn empty() -> Matching {
        Matching::default()
    }

    pub fn sort(&mut self) {
        self.pairs.sort();
        self.critical.sort();
    }

    pub fn assignment_of(&self, c: &SignSequence) -> Option<PairAssignment> {
        for (lower, upper) in &self.pairs {
            if lower == c {
                return Some(PairAssignment::Up(upper.clone()));
            }
            if upper == c {
                return Some(PairAssignment::Down(lower.clone()));
            }
        }
        self.critical.contains(c).then_some(PairAssignment::Critical)
    }

    /// Assignment of every matched cell, keyed by sign sequence.
    pub fn assignments(&self) -> HashMap<SignSequence, PairAssignment> {
        let mut map = HashMap::with_capacity(2 * self.pairs.len() + self.critical.len());
        for (lower, upper) in &self.pairs {
            map.insert(lower.clone(), PairAssignment::Up(upper.clone()));
            map.insert(upper.clone(), PairAssignment::Down(lower.clone()));
        }
        for c in &self.critical {
            map.insert(c.clone(), PairAssignment::Critical);
        }
        map
    }

    /// Checks the dimension step, the facet relation, disjointness and that
    /// pairs and critical cells cover `cc` exactly.
    pub fn validate(&self, cc: &CompactifiedComplex) -> Result<()> {
        let mut seen = vec![false; cc.len()];
        let mut mark = |i: usize, label: &dyn fmt::Display| -> Result<()> {
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidMatching(format!("{label} is matched more than once")));
            }
            Ok(())
        };
        let find = |s: &SignSequence| {
            cc.index_of_signs(s)
                .ok_or_else(|| Error::InvalidMatching(format!("{s} is not a cell of the complex")))
        };
        for (lower, upper) in &self.pairs {
            let (l, u) = (find(lower)?, find(upper)?);
            if cc.cell(u).dim != cc.cell(l).dim + 1 || !cc.cell(u).facets.contains(&l) {
                return Err(Error::InvalidMatching(format!("{lower} is not a facet of {upper}")));
            }
            mark(l, lower)?;
            mark(u, upper)?;
        }
        for c in &self.critical {
            mark(find(c)?, c)?;
        }
        match cc.basepoint() {
            Some(b) if self.includes_basepoint => mark(b, &"*")?,
            Some(_) => return Err(Error::InvalidMatching("the basepoint is not marked critical".into())),
            None if self.includes_basepoint => {
                return Err(Error::InvalidMatching("the complex has no basepoint".into()))
            }
            None => {}
        }
        if let Some(i) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidMatching(format!("{} is neither paired nor critical", cc.cell(i).label)));
        }
        Ok(())
    }

    pub fn export(&self) -> MatchingExport {
        let mut sorted = self.clone();
        sorted.sort();
        MatchingExport {
            pairs: sorted.pairs.into_iter().map(|(l, u)| [l, u]).collect(),
            critical: sorted.critical,
            basepoint: sorted.includes_basepoint,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.export()).expect("matching serializes")
    }

    /// Copy with pair `index` dissolved into two critical cells.
    pub fn unpair(&self, index: usize) -> Result<Matching> {
        if index >= self.pairs.len() {
            return Err(Error::IndexOutOfRange(format!("pair {index} of {}", self.pairs.len())));
        }
        let mut out = self.clone();
        let (lower, upper) = out.pairs.remove(index);
        out.critical.push(lower);
        out.critical.push(upper);
        out.sort();
        Ok(out)
    }

    /// Number of critical cells per dimension, the basepoint included.
    pub fn critical_counts(&self, cc: &CompactifiedComplex) -> Vec<usize> {
        let mut counts = vec![0; cc.ambient_dim() + 1];
        for c in &self.critical {
            if let Some(i) = cc.index_of_signs(c) {
                counts[cc.cell(i).dim] += 1;
            }
        }
        if self.includes_basepoint {
            counts[0] += 1;
        }
        counts
    }
}

/// Alternating sequence `C0, D0, C1, D1, ...` stored as its pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VPath {
    pub pairs: Vec<Pair>,
    /// `C0` is a facet of the last `D` other than the last `C`.
    pub closed: bool,
}

impl VPath {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn sequence(&self) -> Vec<SignSequence> {
        self.pairs.iter().flat_map(|(c, d)| [c.clone(), d.clone()]).collect()
    }

    /// Structural validity against a matching and complex.
    pub fn is_valid(&self, matching: &Matching, cc: &CompactifiedComplex) -> bool {
        let is_pair = |p: &Pair| matching.pairs.contains(p);
        let facet = |c: &SignSequence, d: &SignSequence| match (cc.index_of_signs(c), cc.index_of_signs(d)) {
            (Some(c), Some(d)) => cc.cell(d).facets.contains(&c),
            _ => false,
        };
        if !self.pairs.iter().all(is_pair) {
            return false;
        }
        let steps_ok = self.pairs.windows(2).all(|w| facet(&w[1].0, &w[0].1) && w[1].0 != w[0].0);
        let closes = match (self.pairs.first(), self.pairs.last()) {
            (Some(first), Some(last)) => facet(&first.0, &last.1) && first.0 != last.0,
            _ => false,
        };
        steps_ok && closes == self.closed
    }
}

/// Directed graph on pairs: `p -> q` when the lower cell of `q` is a facet of
/// the upper cell of `p` other than the lower cell of `p`.
#[derive(Debug, Clone)]
pub struct PairGraph {
    /// `(lower, upper)` as complex indices, in the matching's order.
    pub pairs: Vec<(usize, usize)>,
    pub successors: Vec<Vec<usize>>,
    /// Pair index by the complex index of its lower cell.
    pub lower_of: HashMap<usize, usize>,
}

impl PairGraph {
    pub fn new(matching: &Matching, cc: &CompactifiedComplex) -> Result<PairGraph> {
        let find = |s: &SignSequence| {
            cc.index_of_signs(s)
                .ok_or_else(|| Error::InvalidMatching(format!("{s} is not a cell of the complex")))
        };
        let pairs = matching
            .pairs
            .iter()
            .map(|(l, u)| Ok((find(l)?, find(u)?)))
            .collect::<Result<Vec<_>>>()?;
        let lower_of: HashMap<usize, usize> = pairs.iter().enumerate().map(|(p, &(l, _))| (l, p)).collect();
        let successors = pairs
            .iter()
            .map(|&(l, u)| {
                cc.cell(u)
                    .facets
                    .iter()
                    .filter(|&&f| f != l)
                    .filter_map(|f| lower_of.get(f).copied())
                    .collect()
            })
            .collect();
        Ok(PairGraph { pairs, successors, lower_of })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Acyclicity {
    pub acyclic: bool,
    pub witness: Option<VPath>,
}

/// Depth-first search for a closed V-path.
pub fn is_acyclic(matching: &Matching, cc: &CompactifiedComplex) -> Result<Acyclicity> {
    let graph = PairGraph::new(matching, cc)?;
    let n = graph.pairs.len();
    // 0 unvisited, 1 on the stack, 2 finished
    let mut state = vec![0u8; n];
    for root in 0..n {
        if state[root] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        state[root] = 1;
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            if let Some(&succ) = graph.successors[node].get(*next) {
                *next += 1;
                match state[succ] {
                    0 => {
                        state[succ] = 1;
                        stack.push((succ, 0));
                    }
                    1 => {
                        let start = stack.iter().position(|&(p, _)| p == succ).expect("on stack");
                        let pairs = stack[start..]
                            .iter()
                            .map(|&(p, _)| matching.pairs[p].clone())
                            .collect();
                        return Ok(Acyclicity { acyclic: false, witness: Some(VPath { pairs, closed: true }) });
                    }
                    _ => {}
                }
            } else {
                state[node] = 2;
                stack.pop();
            }
        }
    }
    Ok(Acyclicity { acyclic: true, witness: None })
}

/// Owner vertex of every bounded-above cell, from the vertex classifications.
fn owners(
    complex: &CanonicalComplex,
    classes: &[VertexClassification],
) -> Result<HashMap<usize, usize>> {
    let mut owner = HashMap::new();
    for (v, cls) in classes.iter().enumerate() {
        for s in cls.lower_star_signs() {
            let id = complex.require(&s)?;
            if let Some(prev) = owner.insert(id, v) {
                return Err(Error::Inconsistent(format!(
                    "{s} lies in the lower stars of {} and {}",
                    classes[prev].vertex, cls.vertex
                )));
            }
        }
    }
    for id in 0..complex.len() {
        if complex.bounded_above(id) != owner.contains_key(&id) {
            return Err(Error::Inconsistent(format!(
                "{} is {}bounded above but {}in a lower star",
                complex.cell(id).signs,
                if complex.bounded_above(id) { "" } else { "not " },
                if owner.contains_key(&id) { "" } else { "not " },
            )));
        }
    }
    Ok(owner)
}

pub fn compactify(complex: &CanonicalComplex) -> Result<CompactifiedComplex> {
    let classes = classify_all(complex)?;
    compactify_classified(complex, &classes)
}

fn compactify_classified(
    complex: &CanonicalComplex,
    classes: &[VertexClassification],
) -> Result<CompactifiedComplex> {
    let owner = owners(complex, classes)?;
    let mut cells = vec![CompactCell {
        label: CellLabel::Basepoint,
        dim: 0,
        facets: Vec::new(),
        fmax: f64::NEG_INFINITY,
        owner: None,
    }];
    let mut new_index = HashMap::new();
    for id in (0..complex.len()).filter(|&id| complex.bounded_above(id)) {
        new_index.insert(id, cells.len());
        let v = owner[&id];
        cells.push(CompactCell {
            label: CellLabel::Cell(complex.cell(id).signs.clone()),
            dim: complex.cell(id).dim,
            facets: Vec::new(),
            fmax: complex.vertex(v).value,
            owner: Some(classes[v].vertex.clone()),
        });
    }
    for (&id, &i) in &new_index {
        let mut facets = complex
            .facets(id)
            .iter()
            .map(|f| {
                new_index.get(f).copied().ok_or_else(|| {
                    Error::Inconsistent(format!("face {} of a bounded-above cell is unbounded above", complex.cell(*f).signs))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if complex.cell(id).dim == 1 && facets.len() == 1 {
            facets.push(0);
        }
        cells[i].facets = facets;
    }
    CompactifiedComplex::from_cells(cells, complex.input_dim())
}

/// Role of `c` under the lower-star pairing rule of the vertex `cls`.
pub fn assign_in_lower_star(cls: &VertexClassification, c: &SignSequence) -> Result<PairAssignment> {
    let incomplete = |detail: String| Error::IncompletePairing { vertex: cls.vertex.to_string(), detail };
    if !cls.in_lower_star(c) {
        return Err(incomplete(format!("{c} is not in the lower star")));
    }
    match (cls.kind, cls.flow_axis) {
        (VertexKind::Regular, Some(flow)) => {
            let entry = c.get(flow.neuron);
            if entry == Sign::Zero {
                Ok(PairAssignment::Up(c.with(flow.neuron, flow.descending_sign)))
            } else if entry == flow.descending_sign {
                Ok(PairAssignment::Down(c.with(flow.neuron, Sign::Zero)))
            } else {
                Err(incomplete(format!("{c} has the ascending sign at the flow axis")))
            }
        }
        (VertexKind::Regular, None) => Err(incomplete("regular vertex without a flow axis".into())),
        (VertexKind::Critical(_), _) => {
            for &a in &cls.descending_axes {
                match c.get(a) {
                    Sign::Neg => continue,
                    Sign::Zero => return Ok(PairAssignment::Up(c.with(a, Sign::Pos))),
                    Sign::Pos => return Ok(PairAssignment::Down(c.with(a, Sign::Zero))),
                }
            }
            Ok(PairAssignment::Critical)
        }
    }
}

fn pair_lower_star(
    complex: &CanonicalComplex,
    cls: &VertexClassification,
) -> Result<(Vec<Pair>, Vec<SignSequence>)> {
    let cells = cls.lower_star_signs();
    let mut pairs = Vec::new();
    let mut critical = Vec::new();
    let mut downs = 0;
    for c in &cells {
        if complex.id_of(c).is_none() {
            return Err(Error::IncompletePairing {
                vertex: cls.vertex.to_string(),
                detail: format!("{c} is not a cell of the complex"),
            });
        }
        match assign_in_lower_star(cls, c)? {
            PairAssignment::Up(upper) => pairs.push((c.clone(), upper)),
            PairAssignment::Down(_) => downs += 1,
            PairAssignment::Critical => critical.push(c.clone()),
        }
    }
    let partners_ok = pairs.iter().all(|(_, u)| cells.binary_search(u).is_ok());
    if !partners_ok || downs != pairs.len() || 2 * pairs.len() + critical.len() != cells.len() {
        return Err(Error::IncompletePairing {
            vertex: cls.vertex.to_string(),
            detail: format!("{} cells, {} pairs, {} critical", cells.len(), pairs.len(), critical.len()),
        });
    }
    Ok((pairs, critical))
}

/// Complete pairing of the lower star of a regular vertex.
pub fn pair_lower_star_regular(complex: &CanonicalComplex, cls: &VertexClassification) -> Result<Vec<Pair>> {
    if cls.is_critical() {
        return Err(Error::IncompletePairing { vertex: cls.vertex.to_string(), detail: "vertex is critical".into() });
    }
    let (pairs, critical) = pair_lower_star(complex, cls)?;
    if !critical.is_empty() {
        return Err(Error::IncompletePairing {
            vertex: cls.vertex.to_string(),
            detail: format!("{} left unpaired", critical[0]),
        });
    }
    Ok(pairs)
}

/// Pairing of the lower star of a `Critical(k)` vertex, leaving one `k`-cell.
pub fn pair_lower_star_critical(
    complex: &CanonicalComplex,
    cls: &VertexClassification,
) -> Result<(Vec<Pair>, SignSequence)> {
    let Some(k) = cls.index() else {
        return Err(Error::IncompletePairing { vertex: cls.vertex.to_string(), detail: "vertex is regular".into() });
    };
    let (pairs, mut critical) = pair_lower_star(complex, cls)?;
    if critical.len() != 1 || critical[0].num_zeros() + k != cls.vertex.num_zeros() {
        return Err(Error::IncompletePairing {
            vertex: cls.vertex.to_string(),
            detail: format!("expected one critical {k}-cell, found {}", critical.len()),
        });
    }
    Ok((pairs, critical.remove(0)))
}

/// Global matching: union of the lower-star pairings, with `*` critical.
pub fn build_dgvf(complex: &CanonicalComplex) -> Result<Matching> {
    let classes = classify_all(complex)?;
    build_dgvf_classified(complex, &classes)
}

fn build_dgvf_classified(complex: &CanonicalComplex, classes: &[VertexClassification]) -> Result<Matching> {
    let mut matching = Matching { includes_basepoint: true, ..Matching::default() };
    for cls in classes {
        if cls.is_critical() {
            let (pairs, c) = pair_lower_star_critical(complex, cls)?;
            matching.pairs.extend(pairs);
            matching.critical.push(c);
        } else {
            matching.pairs.extend(pair_lower_star_regular(complex, cls)?);
        }
    }
    matching.sort();
    Ok(matching)
}

/// Compactified complex and matching from one classification pass.
pub fn compactify_and_match(complex: &CanonicalComplex) -> Result<(CompactifiedComplex, Matching)> {
    let classes = classify_all(complex)?;
    Ok((compactify_classified(complex, &classes)?, build_dgvf_classified(complex, &classes)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalPair {
    /// Lower-star vertex of the cell, read off the tight constraints.
    pub vertex: SignSequence,
    pub assignment: PairAssignment,
}

/// Pairing of `c` computed from the network alone: maximise F over the closure
/// of `c`, read the maximising vertex from the tight constraints and apply the
/// lower-star rule there.
pub fn local_pair(net: &ReluNetwork, c: &SignSequence, tol: &Tolerances) -> Result<LocalPair> {
    let n0 = net.input_dim();
    let poly = full_cell_polyhedron(net, c, tol);
    if poly.inconsistent {
        return Err(Error::Inconsistent(format!("{c} is not a cell of the network")));
    }
    let form = net.cell_affine_form(c)?;
    let mut problem = LpProblem::new(n0, form.gradient.iter().copied().collect()).with_offset(form.offset);
    problem.constraints = poly.constraints;
    let tight = match lp_solve(&problem, &LpTolerances::from(tol))? {
        LpResult::Optimal { tight, .. } => tight,
        LpResult::Unbounded => return Err(Error::UnboundedCell { cell: c.to_string() }),
        LpResult::Infeasible => return Err(Error::Inconsistent(format!("closure of {c} is empty"))),
    };
    let mut vertex = c.clone();
    for t in tight {
        vertex = vertex.with(poly.neurons[t], Sign::Zero);
    }
    if vertex.num_zeros() != n0 {
        return Err(Error::Genericity {
            cell: c.to_string(),
            detail: format!("maximum of F is attained on {vertex}, not at a vertex"),
        });
    }
    let cls = classify_signs(net, &vertex, tol)?;
    let assignment = assign_in_lower_star(&cls, c)?;
    Ok(LocalPair { vertex, assignment })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalCheck {
    pub checked: usize,
    pub mismatches: Vec<String>,
}

impl LocalCheck {
    pub fn pass(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compare [`local_pair`] against `matching` on every bounded-above cell.
pub fn cross_check_local(complex: &CanonicalComplex, matching: &Matching) -> Result<LocalCheck> {
    let global = matching.assignments();
    let mut mismatches = Vec::new();
    let mut checked = 0;
    for cell in complex.cells().iter().filter(|c| c.bounded_above) {
        checked += 1;
        let local = local_pair(complex.net(), &cell.signs, complex.tolerances());
        match (local, global.get(&cell.signs)) {
            (Ok(l), Some(g)) if &l.assignment == g => {}
            (Ok(l), g) => mismatches.push(format!("{}: local {:?}, global {:?}", cell.signs, l.assignment, g)),
            (Err(e), _) => mismatches.push(format!("{}: {e}", cell.signs)),
        }
    }
    Ok(LocalCheck { checked, mismatches })
}
