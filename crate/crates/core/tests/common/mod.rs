//! Shared sampling and structural checks for the integration tests.

#![allow(dead_code)]

use std::collections::HashMap;

use relu_morse::dgvf::{CompactifiedComplex, Matching, PairGraph};
use relu_morse::orientation::{directional_derivative_signs, edge_direction_signs};
use relu_morse::{Architecture, CanonicalComplex, CellId, ReluNetwork, Tolerances, VertexId};

/// Relative tolerance of the finite-difference gradient check.
pub const FD_RELATIVE_TOL: f64 = 1e-6;
/// Step from a vertex into an incident edge for the direction check.
pub const EDGE_STEP: f64 = 1e-4;

pub const DGVF_ARCHS: [&[usize]; 5] = [&[2, 3, 1], &[2, 4, 1], &[2, 5, 1], &[2, 3, 2, 1], &[3, 4, 1]];

pub struct Sample {
    pub seed: u64,
    pub net: ReluNetwork,
    pub complex: CanonicalComplex,
}

/// First seed at or after `seed` whose network passes the full build
/// (generic, no flat cells, injective on vertices).
pub fn first_generic(dims: &[usize], seed: u64) -> Sample {
    let arch = Architecture::new(dims.to_vec()).unwrap();
    let tol = Tolerances::default();
    for s in seed..seed + 100_000 {
        let net = ReluNetwork::random(&arch, s, 1.0).unwrap();
        if let Ok(complex) = CanonicalComplex::build(&net, &tol) {
            return Sample { seed: s, net, complex };
        }
    }
    panic!("no generic network for {dims:?} within 100000 seeds of {seed}");
}

/// `count` generic networks with increasing seeds starting at `start`.
pub fn generic_nets(dims: &[usize], count: usize, start: u64) -> Vec<Sample> {
    let mut out = Vec::with_capacity(count);
    let mut seed = start;
    while out.len() < count {
        let s = first_generic(dims, seed);
        seed = s.seed + 1;
        out.push(s);
    }
    out
}

/// Compares the cell gradient with central differences at the interior
/// witness of every top cell.
pub fn gradient_violations(complex: &CanonicalComplex) -> Vec<String> {
    let net = complex.net();
    let n0 = complex.input_dim();
    let mut bad = Vec::new();
    for id in complex.cells_of_dim(n0) {
        let cell = complex.cell(id);
        let x = &cell.witness;
        let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        // rows are normalised to unit infinity norm, so this stays inside
        let h = (cell.slack / (4.0 * n0 as f64)).min(1e-3 * scale);
        let g = net.cell_affine_form(&cell.signs).unwrap().gradient;
        for i in 0..n0 {
            let mut plus = x.clone();
            let mut minus = x.clone();
            plus[i] += h;
            minus[i] -= h;
            let fd = (net.evaluate(&plus).unwrap() - net.evaluate(&minus).unwrap()) / (2.0 * h);
            if (fd - g[i]).abs() > FD_RELATIVE_TOL * g.norm().max(1.0) {
                bad.push(format!("{}: d/dx{i} analytic {} vs finite difference {fd}", cell.signs, g[i]));
            }
        }
    }
    bad
}

/// A step of `EDGE_STEP` from each vertex along each edge direction lands in
/// that edge.
pub fn edge_direction_violations(complex: &CanonicalComplex) -> Vec<String> {
    let net = complex.net();
    let mut bad = Vec::new();
    for (v, record) in complex.vertices().iter().enumerate() {
        let vs = complex.vertex_signs(v);
        for &e in complex.cofacets(record.cell) {
            let es = &complex.cell(e).signs;
            let d = edge_direction_signs(net, vs, es).unwrap();
            let x: Vec<f64> = record.location.iter().zip(d.iter()).map(|(a, b)| a + EDGE_STEP * b).collect();
            let got = net.sign_sequence_at(&x, complex.tolerances().sign).unwrap();
            if &got != es {
                bad.push(format!("{vs} into {es} lands in {got}"));
            }
        }
    }
    bad
}

/// Endpoints of a bounded edge.
fn ends(complex: &CanonicalComplex, e: CellId) -> Option<(VertexId, VertexId)> {
    let vs: Vec<VertexId> = complex.facets(e).iter().filter_map(|&f| complex.vertex_of_cell(f)).collect();
    (vs.len() == 2).then(|| (vs[0], vs[1]))
}

/// Derivative sign leaving vertex `v` into edge `e`.
fn leaving(complex: &CanonicalComplex, v: VertexId, e: CellId) -> f64 {
    directional_derivative_signs(complex.net(), complex.vertex_signs(v), &complex.cell(e).signs, complex.tolerances())
        .unwrap()
}

/// Bounded edges directed uphill, checked against the vertex values and the
/// derivative at the other end.
pub fn oriented_bounded_edges(complex: &CanonicalComplex) -> Result<Vec<(VertexId, VertexId)>, String> {
    let mut arcs = Vec::new();
    for e in complex.cells_of_dim(1) {
        let Some((a, b)) = ends(complex, e) else { continue };
        let (da, db) = (leaving(complex, a, e), leaving(complex, b, e));
        if da.signum() == db.signum() {
            return Err(format!("{} rises from both ends", complex.cell(e).signs));
        }
        let (lo, hi) = if da > 0.0 { (a, b) } else { (b, a) };
        if complex.vertex(lo).value >= complex.vertex(hi).value {
            return Err(format!("{} is oriented against the vertex values", complex.cell(e).signs));
        }
        arcs.push((lo, hi));
    }
    Ok(arcs)
}

pub fn has_directed_cycle(n: usize, arcs: &[(usize, usize)]) -> bool {
    let mut indegree = vec![0; n];
    let mut out = vec![Vec::new(); n];
    for &(a, b) in arcs {
        out[a].push(b);
        indegree[b] += 1;
    }
    let mut queue: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = queue.pop() {
        seen += 1;
        for &w in &out[v] {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                queue.push(w);
            }
        }
    }
    seen != n
}

/// Every bounded 2-cell has exactly one source and one sink on its boundary.
pub fn source_sink_violations(complex: &CanonicalComplex, arcs: &[(VertexId, VertexId)]) -> Vec<String> {
    let arc_set: std::collections::HashSet<(VertexId, VertexId)> = arcs.iter().copied().collect();
    let mut bad = Vec::new();
    for c in complex.cells_of_dim(2).filter(|&c| complex.cell(c).bounded) {
        let mut outdeg: HashMap<VertexId, usize> = HashMap::new();
        let mut indeg: HashMap<VertexId, usize> = HashMap::new();
        for &e in complex.facets(c) {
            let Some((a, b)) = ends(complex, e) else { continue };
            let (lo, hi) = if arc_set.contains(&(a, b)) { (a, b) } else { (b, a) };
            *outdeg.entry(lo).or_default() += 1;
            *indeg.entry(hi).or_default() += 1;
        }
        let vertices: Vec<VertexId> = outdeg.keys().chain(indeg.keys()).copied().collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        let sources = vertices.iter().filter(|v| !indeg.contains_key(v)).count();
        let sinks = vertices.iter().filter(|v| !outdeg.contains_key(v)).count();
        if sources != 1 || sinks != 1 {
            bad.push(format!("{}: {sources} sources, {sinks} sinks", complex.cell(c).signs));
        }
    }
    bad
}

/// No-zigzags: in a 2-cell with an unbounded edge at `v1` pointing toward
/// `v1` and one at `v2` pointing away from `v2`, the bounded edge `v1 v2`
/// rises from `v1` to `v2`.
pub fn zigzag_violations(complex: &CanonicalComplex) -> Vec<String> {
    let mut bad = Vec::new();
    for c in complex.cells_of_dim(2) {
        let unbounded_at = |v: VertexId| -> Vec<CellId> {
            complex
                .facets(c)
                .iter()
                .copied()
                .filter(|&e| !complex.cell(e).bounded && complex.facets(e).contains(&complex.vertex(v).cell))
                .collect()
        };
        for &e in complex.facets(c) {
            let Some((a, b)) = ends(complex, e) else { continue };
            for (v1, v2) in [(a, b), (b, a)] {
                let toward_v1 = unbounded_at(v1).iter().any(|&e1| leaving(complex, v1, e1) < 0.0);
                let away_v2 = unbounded_at(v2).iter().any(|&e2| leaving(complex, v2, e2) > 0.0);
                if toward_v1 && away_v2 && complex.vertex(v1).value >= complex.vertex(v2).value {
                    bad.push(format!("{} in {}", complex.cell(e).signs, complex.cell(c).signs));
                }
            }
        }
    }
    bad
}

/// Walks every maximal V-path from every pair (bounded by `limit` steps) and
/// checks that owner values never increase and that a path never re-enters a
/// lower star it has left.
pub fn vpath_owner_violations(cc: &CompactifiedComplex, matching: &Matching, limit: usize) -> Vec<String> {
    let graph = PairGraph::new(matching, cc).unwrap();
    let owner_value = |i: usize| cc.cell(i).fmax;
    let owner = |i: usize| cc.cell(i).owner.clone();
    let mut bad = Vec::new();
    for start in 0..graph.pairs.len() {
        // depth-first over paths, carrying the owners left behind
        let mut stack = vec![(start, vec![owner(graph.pairs[start].0)], 0usize)];
        while let Some((p, history, depth)) = stack.pop() {
            if depth >= limit {
                continue;
            }
            let current = graph.pairs[p].0;
            for &q in &graph.successors[p] {
                let next = graph.pairs[q].0;
                if owner_value(next) > owner_value(current) {
                    bad.push(format!("{} rises to {}", cc.cell(current).label, cc.cell(next).label));
                }
                let o = owner(next);
                if history.last() != Some(&o) && history.contains(&o) {
                    bad.push(format!("path re-enters the lower star of {:?}", o));
                }
                let mut h = history.clone();
                if h.last() != Some(&o) {
                    h.push(o);
                }
                stack.push((q, h, depth + 1));
            }
        }
    }
    bad
}

/// Alternating sum of cell counts by dimension.
pub fn alternating_sum(counts: &[usize]) -> i64 {
    counts.iter().enumerate().map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) }).sum()
}

