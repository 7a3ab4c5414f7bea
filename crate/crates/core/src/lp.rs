//! Dense-tableau two-phase simplex with Bland's anti-cycling rule.
//!
//! Problems are stated over free real variables and always maximise. Each
//! constraint carries a `strict` flag; [`lp_solve`] solves the closure (strict
//! rows treated as non-strict) and [`strict_feasibility`] decides whether the
//! strict system has a solution by maximising a uniform slack.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    Le,
    Ge,
    Eq,
}

/// `coeffs · x  (<=|>=|=)  rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub kind: ConstraintKind,
    pub rhs: f64,
    pub strict: bool,
}

impl Constraint {
    pub fn le(coeffs: Vec<f64>, rhs: f64) -> Self {
        Constraint { coeffs, kind: ConstraintKind::Le, rhs, strict: false }
    }

    pub fn ge(coeffs: Vec<f64>, rhs: f64) -> Self {
        Constraint { coeffs, kind: ConstraintKind::Ge, rhs, strict: false }
    }

    pub fn eq(coeffs: Vec<f64>, rhs: f64) -> Self {
        Constraint { coeffs, kind: ConstraintKind::Eq, rhs, strict: false }
    }

    pub fn strict(mut self) -> Self {
        self.strict = true;
        self
    }

    fn residual(&self, x: &[f64]) -> f64 {
        dot(&self.coeffs, x) - self.rhs
    }

    fn violation(&self, x: &[f64]) -> f64 {
        let r = self.residual(x);
        match self.kind {
            ConstraintKind::Le => r.max(0.0),
            ConstraintKind::Ge => (-r).max(0.0),
            ConstraintKind::Eq => r.abs(),
        }
    }
}

/// Maximise `objective · x + offset` over free `x` subject to `constraints`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub offset: f64,
    pub constraints: Vec<Constraint>,
}

impl LpProblem {
    pub fn new(num_vars: usize, objective: Vec<f64>) -> Self {
        LpProblem { num_vars, objective, offset: 0.0, constraints: Vec::new() }
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn push(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    fn check(&self) -> Result<()> {
        if self.objective.len() != self.num_vars {
            return Err(Error::Shape(format!(
                "objective has {} coefficients for {} variables",
                self.objective.len(),
                self.num_vars
            )));
        }
        if let Some(c) = self.constraints.iter().find(|c| c.coeffs.len() != self.num_vars) {
            return Err(Error::Shape(format!(
                "constraint has {} coefficients for {} variables",
                c.coeffs.len(),
                self.num_vars
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpResult {
    Optimal {
        value: f64,
        point: Vec<f64>,
        /// Indices of constraints holding with equality at `point`.
        tight: Vec<usize>,
    },
    Unbounded,
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpTolerances {
    pub pivot: f64,
    pub feasibility: f64,
}

impl Default for LpTolerances {
    fn default() -> Self {
        LpTolerances { pivot: 1e-9, feasibility: 1e-7 }
    }
}

impl From<&crate::Tolerances> for LpTolerances {
    fn from(t: &crate::Tolerances) -> Self {
        LpTolerances { pivot: t.lp_pivot, feasibility: t.lp_feasibility }
    }
}

/// Pivots below this magnitude mean the tableau has lost all precision.
const DEGENERATE_PIVOT: f64 = 1e-12;
const MAX_ITERATIONS: usize = 50_000;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Tableau {
    /// `rows x (cols + 1)`; the last column is the right-hand side.
    a: Vec<Vec<f64>>,
    /// Reduced costs `c_j - c_B B^-1 A_j`, last entry `-c_B B^-1 b`.
    cost: Vec<f64>,
    basis: Vec<usize>,
    cols: usize,
    /// Columns allowed to enter the basis.
    enterable: Vec<bool>,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn set_objective(&mut self, c: &[f64]) {
        let w = self.cols + 1;
        let mut cost = vec![0.0; w];
        cost[..self.cols].copy_from_slice(c);
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = c[b];
            if cb != 0.0 {
                for (k, v) in cost.iter_mut().enumerate() {
                    *v -= cb * self.a[r][k];
                }
            }
        }
        self.cost = cost;
    }

    fn pivot(&mut self, row: usize, col: usize) -> Result<()> {
        let p = self.a[row][col];
        if p.abs() < DEGENERATE_PIVOT {
            return Err(Error::NumericalInstability(format!("pivot magnitude {p:e}")));
        }
        let w = self.cols + 1;
        for k in 0..w {
            self.a[row][k] /= p;
        }
        let pivot_row = self.a[row].clone();
        for (r, line) in self.a.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let f = line[col];
            if f != 0.0 {
                for k in 0..w {
                    line[k] -= f * pivot_row[k];
                }
                line[col] = 0.0;
            }
        }
        let f = self.cost[col];
        if f != 0.0 {
            for (c, p) in self.cost.iter_mut().zip(&pivot_row) {
                *c -= f * p;
            }
            self.cost[col] = 0.0;
        }
        self.basis[row] = col;
        Ok(())
    }

    /// Primal simplex with Bland's rule on the current objective.
    fn run(&mut self, tol: &LpTolerances) -> Result<Phase> {
        for _ in 0..MAX_ITERATIONS {
            let entering = (0..self.cols).find(|&j| self.enterable[j] && self.cost[j] > tol.pivot);
            let Some(col) = entering else {
                return Ok(Phase::Optimal);
            };
            let rhs = self.cols;
            let mut best: Option<(f64, usize, usize)> = None;
            for (r, line) in self.a.iter().enumerate() {
                let coef = line[col];
                if coef > tol.pivot {
                    let ratio = line[rhs].max(0.0) / coef;
                    let candidate = (ratio, self.basis[r], r);
                    best = match best {
                        None => Some(candidate),
                        Some(b) => {
                            let scale = 1.0 + b.0.abs();
                            if ratio < b.0 - 1e-12 * scale
                                || ((ratio - b.0).abs() <= 1e-12 * scale && candidate.1 < b.1)
                            {
                                Some(candidate)
                            } else {
                                Some(b)
                            }
                        }
                    };
                }
            }
            match best {
                None => return Ok(Phase::Unbounded),
                Some((_, _, row)) => self.pivot(row, col)?,
            }
        }
        Err(Error::NumericalInstability("iteration limit reached".into()))
    }
}

/// Solve `p` with strict rows relaxed to their closure.
pub fn lp_solve(p: &LpProblem, tol: &LpTolerances) -> Result<LpResult> {
    p.check()?;
    let n = p.num_vars;
    let m = p.constraints.len();

    // Columns: x+ (n), x- (n), one slack per inequality, one artificial per
    // row that needs it.
    let num_slack = p.constraints.iter().filter(|c| c.kind != ConstraintKind::Eq).count();
    let mut rows: Vec<(Vec<f64>, f64, Option<usize>)> = Vec::with_capacity(m);
    let mut slack_col = 2 * n;
    for c in &p.constraints {
        let mut line = vec![0.0; 2 * n + num_slack];
        for (j, &v) in c.coeffs.iter().enumerate() {
            line[j] = v;
            line[n + j] = -v;
        }
        let mut rhs = c.rhs;
        let mut slack = None;
        match c.kind {
            ConstraintKind::Le => {
                line[slack_col] = 1.0;
                slack = Some(slack_col);
                slack_col += 1;
            }
            ConstraintKind::Ge => {
                line[slack_col] = -1.0;
                slack_col += 1;
            }
            ConstraintKind::Eq => {}
        }
        if rhs < 0.0 {
            line.iter_mut().for_each(|v| *v = -*v);
            rhs = -rhs;
            // a flipped <= slack no longer forms an identity column
            slack = None;
        }
        rows.push((line, rhs, slack));
    }

    let num_art = rows.iter().filter(|r| r.2.is_none()).count();
    let cols = 2 * n + num_slack + num_art;
    let mut a = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art = 2 * n + num_slack;
    for (line, rhs, slack) in rows {
        let mut full = line;
        full.resize(cols + 1, 0.0);
        full[cols] = rhs;
        match slack {
            Some(s) => basis.push(s),
            None => {
                full[art] = 1.0;
                basis.push(art);
                art += 1;
            }
        }
        a.push(full);
    }
    let first_art = 2 * n + num_slack;
    let mut t = Tableau { a, cost: Vec::new(), basis, cols, enterable: vec![true; cols] };

    if num_art > 0 {
        let mut phase1 = vec![0.0; cols];
        for c in phase1.iter_mut().skip(first_art) {
            *c = -1.0;
        }
        t.set_objective(&phase1);
        t.run(tol)?;
        // cost[rhs] = -(c_B x_B) = sum of artificial values
        let infeasibility = t.cost[cols];
        if infeasibility > tol.feasibility {
            return Ok(LpResult::Infeasible);
        }
        // drive remaining artificials out of the basis
        let mut r = 0;
        while r < t.a.len() {
            if t.basis[r] >= first_art {
                let col = (0..first_art)
                    .filter(|&j| t.a[r][j].abs() > tol.pivot)
                    .max_by(|&i, &j| t.a[r][i].abs().total_cmp(&t.a[r][j].abs()));
                match col {
                    Some(j) => t.pivot(r, j)?,
                    None => {
                        // redundant row
                        t.a.remove(r);
                        t.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        for e in t.enterable.iter_mut().skip(first_art) {
            *e = false;
        }
    }

    let mut c = vec![0.0; cols];
    for (j, &v) in p.objective.iter().enumerate() {
        c[j] = v;
        c[n + j] = -v;
    }
    t.set_objective(&c);
    if let Phase::Unbounded = t.run(tol)? {
        return Ok(LpResult::Unbounded);
    }

    let mut y = vec![0.0; cols];
    for (r, &b) in t.basis.iter().enumerate() {
        y[b] = t.a[r][cols];
    }
    let point: Vec<f64> = (0..n).map(|j| y[j] - y[n + j]).collect();
    let mut tight = Vec::new();
    for (i, con) in p.constraints.iter().enumerate() {
        let scale = 1.0 + con.rhs.abs() + con.coeffs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if con.violation(&point) > tol.feasibility * scale {
            return Err(Error::NumericalInstability(format!(
                "constraint {i} violated by {:e} at the reported optimum",
                con.violation(&point)
            )));
        }
        if con.residual(&point).abs() <= tol.feasibility * scale {
            tight.push(i);
        }
    }
    let value = dot(&p.objective, &point) + p.offset;
    Ok(LpResult::Optimal { value, point, tight })
}

/// Result of [`strict_feasibility`]: the largest uniform slack (capped at 1)
/// by which every strict row can be satisfied, and a point attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct StrictWitness {
    pub slack: f64,
    pub point: Vec<f64>,
}

/// Maximise `t <= 1` with every strict row tightened by `t`; non-strict rows
/// are kept as they are. Returns `None` when even the closure is infeasible.
pub fn strict_feasibility(p: &LpProblem, tol: &LpTolerances) -> Result<Option<StrictWitness>> {
    p.check()?;
    let n = p.num_vars;
    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    let mut lifted = LpProblem::new(n + 1, objective);
    for c in &p.constraints {
        let mut coeffs = c.coeffs.clone();
        let t_coef = match (c.strict, c.kind) {
            (true, ConstraintKind::Le) => 1.0,
            (true, ConstraintKind::Ge) => -1.0,
            _ => 0.0,
        };
        coeffs.push(t_coef);
        lifted.push(Constraint { coeffs, kind: c.kind, rhs: c.rhs, strict: false });
    }
    let mut cap = vec![0.0; n + 1];
    cap[n] = 1.0;
    lifted.push(Constraint::le(cap, 1.0));
    match lp_solve(&lifted, tol)? {
        LpResult::Optimal { value, mut point, .. } => {
            point.truncate(n);
            Ok(Some(StrictWitness { slack: value, point }))
        }
        LpResult::Infeasible => Ok(None),
        LpResult::Unbounded => Err(Error::NumericalInstability(
            "slack problem reported unbounded despite its cap".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn tol() -> LpTolerances {
        LpTolerances::default()
    }

    /// The fixture's bounded triangle: x >= 0, y >= 0, 1 - x - y >= 0.
    fn triangle(objective: Vec<f64>, offset: f64) -> LpProblem {
        let mut p = LpProblem::new(2, objective).with_offset(offset);
        p.push(Constraint::ge(vec![1.0, 0.0], 0.0));
        p.push(Constraint::ge(vec![0.0, 1.0], 0.0));
        p.push(Constraint::le(vec![1.0, 1.0], 1.0));
        p
    }

    #[test]
    fn maximum_over_triangle() {
        let p = triangle(vec![-3.0, -2.0], 4.0);
        match lp_solve(&p, &tol()).unwrap() {
            LpResult::Optimal { value, point, tight } => {
                assert_relative_eq!(value, 4.0);
                assert_relative_eq!(point[0], 0.0);
                assert_relative_eq!(point[1], 0.0);
                assert_eq!(tight, vec![0, 1]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn one_dimensional_cases() {
        let mut p = LpProblem::new(1, vec![1.0]);
        p.push(Constraint::le(vec![1.0], 1.0));
        assert!(matches!(
            lp_solve(&p, &tol()).unwrap(),
            LpResult::Optimal { value, .. } if (value - 1.0).abs() < 1e-12
        ));
        let mut q = LpProblem::new(1, vec![1.0]);
        q.push(Constraint::ge(vec![1.0], 0.0));
        assert_eq!(lp_solve(&q, &tol()).unwrap(), LpResult::Unbounded);
        let mut r = LpProblem::new(1, vec![1.0]);
        r.push(Constraint::ge(vec![1.0], 2.0));
        r.push(Constraint::le(vec![1.0], 1.0));
        assert_eq!(lp_solve(&r, &tol()).unwrap(), LpResult::Infeasible);
    }

    #[test]
    fn equality_constraints_and_redundancy() {
        // maximise x + y on the segment x + y = 1, 0 <= x <= 1, duplicated equality
        let mut p = LpProblem::new(2, vec![1.0, 2.0]);
        p.push(Constraint::eq(vec![1.0, 1.0], 1.0));
        p.push(Constraint::eq(vec![2.0, 2.0], 2.0));
        p.push(Constraint::ge(vec![1.0, 0.0], 0.0));
        p.push(Constraint::ge(vec![0.0, 1.0], 0.0));
        match lp_solve(&p, &tol()).unwrap() {
            LpResult::Optimal { value, point, tight } => {
                assert_relative_eq!(value, 2.0);
                assert_relative_eq!(point[1], 1.0);
                assert_eq!(tight, vec![0, 1, 2]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn strict_feasibility_of_open_triangle_and_line() {
        let mut p = triangle(vec![0.0, 0.0], 0.0);
        p.constraints.iter_mut().for_each(|c| c.strict = true);
        let w = strict_feasibility(&p, &tol()).unwrap().unwrap();
        // inradius-style slack of the triangle with these row scalings
        assert!(w.slack > 0.2);
        // open segment on x = 0 between y > 0 and x + y < 1
        let mut q = LpProblem::new(2, vec![0.0, 0.0]);
        q.push(Constraint::eq(vec![1.0, 0.0], 0.0));
        q.push(Constraint::ge(vec![0.0, 1.0], 0.0).strict());
        q.push(Constraint::le(vec![1.0, 1.0], 1.0).strict());
        let w = strict_feasibility(&q, &tol()).unwrap().unwrap();
        assert_relative_eq!(w.slack, 0.5, epsilon = 1e-9);
        // x > 0 and x < 0 has no interior
        let mut r = LpProblem::new(1, vec![0.0]);
        r.push(Constraint::ge(vec![1.0], 0.0).strict());
        r.push(Constraint::le(vec![1.0], 0.0).strict());
        assert!(strict_feasibility(&r, &tol()).unwrap().unwrap().slack <= 1e-12);
    }

    #[test]
    fn shape_errors() {
        let mut p = LpProblem::new(2, vec![1.0]);
        p.push(Constraint::le(vec![1.0, 1.0], 1.0));
        assert!(matches!(lp_solve(&p, &tol()), Err(Error::Shape(_))));
    }

    // Brute force: enumerate all vertices of {A x <= b} in R^2 from pairs of rows.
    fn brute_force_max(rows: &[(f64, f64, f64)], c: (f64, f64)) -> Option<f64> {
        let mut best: Option<f64> = None;
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                let (a1, b1, r1) = rows[i];
                let (a2, b2, r2) = rows[j];
                let det = a1 * b2 - a2 * b1;
                if det.abs() < 1e-9 {
                    continue;
                }
                let x = (r1 * b2 - r2 * b1) / det;
                let y = (a1 * r2 - a2 * r1) / det;
                if rows.iter().all(|&(a, b, r)| a * x + b * y <= r + 1e-9) {
                    let v = c.0 * x + c.1 * y;
                    best = Some(best.map_or(v, |bv: f64| bv.max(v)));
                }
            }
        }
        best
    }

    proptest! {
        #[test]
        fn matches_vertex_enumeration_on_bounded_polygons(
            extra in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, 0.1f64..2.0), 0..6),
            c in (-3.0f64..3.0, -3.0f64..3.0),
        ) {
            // box keeps the feasible region bounded and nonempty (origin inside)
            let mut rows = vec![(1.0, 0.0, 3.0), (-1.0, 0.0, 3.0), (0.0, 1.0, 3.0), (0.0, -1.0, 3.0)];
            rows.extend(extra);
            let mut p = LpProblem::new(2, vec![c.0, c.1]);
            for &(a, b, r) in &rows {
                p.push(Constraint::le(vec![a, b], r));
            }
            let expected = brute_force_max(&rows, c).unwrap();
            match lp_solve(&p, &tol()).unwrap() {
                LpResult::Optimal { value, .. } => prop_assert!((value - expected).abs() < 1e-7),
                other => prop_assert!(false, "unexpected {:?}", other),
            }
        }
    }
}
