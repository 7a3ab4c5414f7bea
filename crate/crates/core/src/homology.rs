//! Mod-2 cellular homology of the compactified complex, used as an oracle
//! for the matching.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::dgvf::{is_acyclic, CompactifiedComplex, Matching, PairGraph};
use crate::error::{Error, Result};

/// Dense matrix over GF(2), rows packed into 64-bit words.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> BitMatrix {
        let words = cols.div_ceil(64);
        BitMatrix { rows, cols, words, data: vec![0; rows * words] }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        let word = &mut self.data[r * self.words + c / 64];
        if value {
            *word |= 1 << (c % 64);
        } else {
            *word &= !(1 << (c % 64));
        }
    }

    pub fn toggle(&mut self, r: usize, c: usize) {
        self.data[r * self.words + c / 64] ^= 1 << (c % 64);
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        for w in 0..self.words {
            let v = self.data[src * self.words + w];
            self.data[dst * self.words + w] ^= v;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(pivot) = (rank..m.rows).find(|&r| m.get(r, col)) else {
                continue;
            };
            if pivot != rank {
                for w in 0..m.words {
                    m.data.swap(pivot * m.words + w, rank * m.words + w);
                }
            }
            for r in 0..m.rows {
                if r != rank && m.get(r, col) {
                    m.xor_row_into(rank, r);
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in (0..self.cols).filter(|&k| self.get(r, k)) {
                for w in 0..out.words {
                    out.data[r * out.words + w] ^= other.row(k)[w];
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: String = (0..self.cols).map(|c| if self.get(r, c) { '1' } else { '0' }).collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

/// Cells grouped by dimension and the boundary maps between them.
#[derive(Debug, Clone)]
pub struct ChainComplex {
    /// Cell identifiers (indices into the source complex) per dimension.
    pub cells_by_dim: Vec<Vec<usize>>,
    /// `boundary[k]` maps `k`-chains to `(k-1)`-chains; `boundary[0]` has no rows.
    pub boundary: Vec<BitMatrix>,
}

impl ChainComplex {
    /// Chain complex from cells grouped by dimension and a facet function on
    /// cell identifiers; facets outside the complex are dropped.
    pub fn from_facets<F>(cells_by_dim: Vec<Vec<usize>>, mut facets: F) -> ChainComplex
    where
        F: FnMut(usize) -> Vec<usize>,
    {
        let position: Vec<HashMap<usize, usize>> = cells_by_dim
            .iter()
            .map(|cells| cells.iter().enumerate().map(|(i, &c)| (c, i)).collect())
            .collect();
        let mut boundary = Vec::with_capacity(cells_by_dim.len());
        for (k, cells) in cells_by_dim.iter().enumerate() {
            if k == 0 {
                boundary.push(BitMatrix::zeros(0, cells.len()));
                continue;
            }
            let mut m = BitMatrix::zeros(cells_by_dim[k - 1].len(), cells.len());
            for (j, &c) in cells.iter().enumerate() {
                for f in facets(c) {
                    if let Some(&i) = position[k - 1].get(&f) {
                        m.toggle(i, j);
                    }
                }
            }
            boundary.push(m);
        }
        ChainComplex { cells_by_dim, boundary }
    }

    pub fn top_dim(&self) -> usize {
        self.cells_by_dim.len().saturating_sub(1)
    }

    pub fn num_cells(&self) -> usize {
        self.cells_by_dim.iter().map(Vec::len).sum()
    }

    pub fn counts(&self) -> Vec<usize> {
        self.cells_by_dim.iter().map(Vec::len).collect()
    }

    /// `d_{k-1} d_k = 0` for every `k`.
    pub fn boundary_squares_to_zero(&self) -> bool {
        (2..self.boundary.len()).all(|k| {
            self.boundary[k - 1].mul(&self.boundary[k]).map(|m| m.is_zero()).unwrap_or(false)
        })
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells_by_dim
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 0 { c.len() as i64 } else { -(c.len() as i64) })
            .sum()
    }
}

/// Ranks of homology groups per dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct BettiVector(pub Vec<usize>);

impl BettiVector {
    pub fn ranks(&self) -> &[usize] {
        &self.0
    }

    pub fn get(&self, k: usize) -> usize {
        self.0.get(k).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&b| b == 0)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.0.iter().enumerate().map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) }).sum()
    }
}

impl fmt::Display for BettiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|b| b.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Cells of `cc` with `fmax <= level` (all cells for `None`).
pub fn chain_complex(cc: &CompactifiedComplex, level: Option<f64>) -> ChainComplex {
    sub_quotient(cc, level, None)
}

/// Chain complex of the sublevel set at `level` with the sublevel set at
/// `killed` collapsed away.
fn sub_quotient(cc: &CompactifiedComplex, level: Option<f64>, killed: Option<f64>) -> ChainComplex {
    let keep = |fmax: f64| level.is_none_or(|l| fmax <= l) && killed.is_none_or(|k| fmax > k);
    let mut cells_by_dim = vec![Vec::new(); cc.ambient_dim() + 1];
    for (i, cell) in cc.cells().iter().enumerate() {
        if keep(cell.fmax) {
            cells_by_dim[cell.dim].push(i);
        }
    }
    ChainComplex::from_facets(cells_by_dim, |c| cc.cell(c).facets.clone())
}

pub fn betti(chain: &ChainComplex) -> BettiVector {
    let ranks: Vec<usize> = chain.boundary.iter().map(BitMatrix::rank).collect();
    BettiVector(
        (0..chain.cells_by_dim.len())
            .map(|k| {
                let next = ranks.get(k + 1).copied().unwrap_or(0);
                chain.cells_by_dim[k].len() - ranks[k] - next
            })
            .collect(),
    )
}

/// Ranks of `H(C_level, C_prev)`; `prev = None` means `-inf`, so only the
/// basepoint is killed.
pub fn relative_ranks(cc: &CompactifiedComplex, level: f64, prev: Option<f64>) -> BettiVector {
    let killed = prev.unwrap_or(f64::NEG_INFINITY);
    betti(&sub_quotient(cc, Some(level), Some(killed)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelRecord {
    pub level: f64,
    pub expected: Vec<usize>,
    pub critical_counts: Vec<usize>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerfectnessReport {
    pub levels: Vec<LevelRecord>,
    pub pass: bool,
}

impl PerfectnessReport {
    pub fn failing_levels(&self) -> Vec<f64> {
        self.levels.iter().filter(|l| !l.pass).map(|l| l.level).collect()
    }
}

/// At every vertex level, the critical cells appearing there must match the
/// relative homology ranks against the previous level.
pub fn verify_relative_perfectness(cc: &CompactifiedComplex, matching: &Matching) -> PerfectnessReport {
    let dims = cc.ambient_dim() + 1;
    let fmax_of: Vec<(usize, f64)> = matching
        .critical
        .iter()
        .filter_map(|c| cc.index_of_signs(c))
        .map(|i| (cc.cell(i).dim, cc.cell(i).fmax))
        .collect();
    let mut levels = Vec::new();
    let mut prev: Option<f64> = None;
    for level in cc.vertex_levels() {
        let lo = prev.unwrap_or(f64::NEG_INFINITY);
        let mut counts = vec![0; dims];
        for &(d, f) in &fmax_of {
            if f > lo && f <= level {
                counts[d] += 1;
            }
        }
        let mut expected = relative_ranks(cc, level, prev).0;
        expected.resize(dims, 0);
        levels.push(LevelRecord { level, pass: expected == counts, expected, critical_counts: counts });
        prev = Some(level);
    }
    let pass = levels.iter().all(|l| l.pass);
    PerfectnessReport { levels, pass }
}

/// Morse complex of an acyclic matching: critical cells, with boundary
/// coefficients counting V-paths mod 2.
pub fn morse_complex(cc: &CompactifiedComplex, matching: &Matching) -> Result<ChainComplex> {
    if !is_acyclic(matching, cc)?.acyclic {
        return Err(Error::CyclicMatching);
    }
    let graph = PairGraph::new(matching, cc)?;
    let mut critical: Vec<usize> = matching
        .critical
        .iter()
        .map(|c| cc.index_of_signs(c).ok_or_else(|| Error::InvalidMatching(format!("{c} is not a cell of the complex"))))
        .collect::<Result<_>>()?;
    if matching.includes_basepoint {
        critical.push(cc.basepoint().ok_or_else(|| Error::InvalidMatching("the complex has no basepoint".into()))?);
    }
    critical.sort_unstable();
    let is_critical: Vec<bool> = {
        let mut v = vec![false; cc.len()];
        critical.iter().for_each(|&c| v[c] = true);
        v
    };
    let mut cells_by_dim = vec![Vec::new(); cc.ambient_dim() + 1];
    for &c in &critical {
        cells_by_dim[cc.cell(c).dim].push(c);
    }

    // flow[c] = critical cells reached from c by V-paths, each with its parity
    let mut memo: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut boundary = |d: usize| -> Vec<usize> {
        let mut out = Vec::new();
        for &f in &cc.cell(d).facets {
            out.extend(flow(f, cc, &graph, &is_critical, &mut memo));
        }
        out
    };
    let mut facets_of: HashMap<usize, Vec<usize>> = HashMap::new();
    for &c in &critical {
        facets_of.insert(c, boundary(c));
    }
    Ok(ChainComplex::from_facets(cells_by_dim, |c| facets_of.remove(&c).unwrap_or_default()))
}

/// Critical cells reached from the codimension-one cell `c` along V-paths,
/// repeated according to the number of paths (callers reduce mod 2).
fn flow(
    c: usize,
    cc: &CompactifiedComplex,
    graph: &PairGraph,
    is_critical: &[bool],
    memo: &mut HashMap<usize, Vec<usize>>,
) -> Vec<usize> {
    if is_critical[c] {
        return vec![c];
    }
    if let Some(hit) = memo.get(&c) {
        return hit.clone();
    }
    let mut parity: HashMap<usize, bool> = HashMap::new();
    if let Some(&p) = graph.lower_of.get(&c) {
        let upper = graph.pairs[p].1;
        for &f in cc.cell(upper).facets.iter().filter(|&&f| f != c) {
            for hit in flow(f, cc, graph, is_critical, memo) {
                *parity.entry(hit).or_insert(false) ^= true;
            }
        }
    }
    let mut hits: Vec<usize> = parity.into_iter().filter(|&(_, odd)| odd).map(|(h, _)| h).collect();
    hits.sort_unstable();
    memo.insert(c, hits.clone());
    hits
}
