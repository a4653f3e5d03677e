//! Simple graphs on `n` labelled nodes with dense bit-packed adjacency, and the
//! matrices derived from them: degrees, Laplacian, incidence and the
//! symmetric directed Laplacian `B Bᵗ`.

use std::fmt;

use crate::eigen::Matrix;
use crate::{Error, Result};

const WORD: usize = 64;

/// A simple graph: no self-loops, no multi-edges, unweighted.
///
/// For directed graphs `has_edge(i, j)` means the arc `i -> j`. Undirected
/// graphs store both `(i, j)` and `(j, i)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    directed: bool,
    words: usize,
    bits: Vec<u64>,
}

impl Graph {
    /// Edgeless graph on `n` nodes.
    ///
    /// # Panics
    /// If `n == 0`.
    pub fn new(n: usize, directed: bool) -> Self {
        assert!(n > 0, "graph must have at least one node");
        let words = n.div_ceil(WORD);
        Graph { n, directed, words, bits: vec![0; n * words] }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::new(n, false);
        for i in 0..n {
            for j in i + 1..n {
                g.set_edge(i, j, true);
            }
        }
        g
    }

    /// Builds a graph from 0-indexed pairs. Self-loops, out-of-range indices
    /// and repeated edges are rejected; for undirected graphs `(j, i)`
    /// repeats `(i, j)`.
    pub fn from_edges(n: usize, directed: bool, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("node count must be positive".into()));
        }
        let mut g = Graph::new(n, directed);
        for &(i, j) in edges {
            g.try_add_edge(i, j)?;
        }
        Ok(g)
    }

    pub(crate) fn try_add_edge(&mut self, i: usize, j: usize) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(Error::InvalidGraph(format!("edge ({i}, {j}) out of range for {} nodes", self.n)));
        }
        if i == j {
            return Err(Error::InvalidGraph(format!("self-loop at node {i}")));
        }
        if self.has_edge(i, j) {
            return Err(Error::InvalidGraph(format!("duplicate edge ({i}, {j})")));
        }
        self.set_edge(i, j, true);
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_directed(&self) -> bool {
        self.directed
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / WORD] >> (j % WORD) & 1 == 1
    }

    #[inline]
    fn set_bit(&mut self, i: usize, j: usize, on: bool) {
        let w = &mut self.bits[i * self.words + j / WORD];
        let mask = 1u64 << (j % WORD);
        if on {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    /// Sets or clears `i -> j` (both directions when undirected).
    ///
    /// # Panics
    /// On a self-loop or out-of-range index.
    #[inline]
    pub fn set_edge(&mut self, i: usize, j: usize, on: bool) {
        assert!(i != j, "self-loops are not allowed");
        assert!(i < self.n && j < self.n, "node index out of range");
        self.set_bit(i, j, on);
        if !self.directed {
            self.set_bit(j, i, on);
        }
    }

    /// Flips the dyad and returns whether the edge is now present.
    #[inline]
    pub fn toggle(&mut self, i: usize, j: usize) -> bool {
        let on = !self.has_edge(i, j);
        self.set_edge(i, j, on);
        on
    }

    /// Packed adjacency row of node `i` (out-neighbours for directed graphs).
    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    /// Number of nodes adjacent to both `i` and `j`.
    #[inline]
    pub fn common_neighbors(&self, i: usize, j: usize) -> usize {
        self.row(i).iter().zip(self.row(j)).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Out-neighbours of `i` in increasing order.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        iter_bits(self.row(i))
    }

    /// Number of edges (arcs for directed graphs).
    pub fn edge_count(&self) -> usize {
        let total: usize = self.bits.iter().map(|w| w.count_ones() as usize).sum();
        if self.directed {
            total
        } else {
            total / 2
        }
    }

    /// Edges in row-major order; undirected edges are reported once with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.neighbors(i).filter(move |&j| self.directed || j > i).map(move |j| (i, j))
        })
    }

    pub fn adjacency_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.n, self.n);
        for (i, j) in self.edges() {
            m[(i, j)] = 1.0;
            if !self.directed {
                m[(j, i)] = 1.0;
            }
        }
        m
    }
}

/// Iterates set bit positions of a packed row.
pub(crate) fn iter_bits(row: &[u64]) -> impl Iterator<Item = usize> + '_ {
    row.iter().enumerate().flat_map(|(w, &word)| {
        let mut rest = word;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(w * WORD + b)
        })
    })
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("directed", &self.directed)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

/// Node degrees. For directed graphs each entry is in-degree plus out-degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeVector(pub Vec<usize>);

impl DegreeVector {
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }
}

pub fn degrees(g: &Graph) -> DegreeVector {
    let mut d: Vec<usize> = (0..g.n()).map(|i| g.out_degree(i)).collect();
    if g.is_directed() {
        for (_, j) in g.edges() {
            d[j] += 1;
        }
    }
    DegreeVector(d)
}

/// `diag(d) - X` for an undirected graph.
pub fn laplacian(g: &Graph) -> Result<Matrix> {
    if g.is_directed() {
        return Err(Error::Directedness { op: "laplacian", expected: "undirected" });
    }
    let n = g.n();
    let mut m = Matrix::zeros(n, n);
    for (i, j) in g.edges() {
        m[(i, j)] = -1.0;
        m[(j, i)] = -1.0;
        m[(i, i)] += 1.0;
        m[(j, j)] += 1.0;
    }
    Ok(m)
}

/// Node-by-edge incidence matrix of a directed graph. Column `c` holds `-1`
/// at the tail and `+1` at the head of the `c`-th arc in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    n: usize,
    arcs: Vec<(usize, usize)>,
}

impl IncidenceMatrix {
    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.arcs.len()
    }

    /// `(tail, head)` of each column.
    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn entry(&self, row: usize, col: usize) -> i8 {
        let (tail, head) = self.arcs[col];
        if row == tail {
            -1
        } else if row == head {
            1
        } else {
            0
        }
    }

    pub fn to_matrix(&self) -> Matrix {
        let mut b = Matrix::zeros(self.n, self.arcs.len());
        for (c, &(t, h)) in self.arcs.iter().enumerate() {
            b[(t, c)] = -1.0;
            b[(h, c)] = 1.0;
        }
        b
    }
}

pub fn incidence(g: &Graph) -> Result<IncidenceMatrix> {
    if !g.is_directed() {
        return Err(Error::Directedness { op: "incidence", expected: "directed" });
    }
    Ok(IncidenceMatrix { n: g.n(), arcs: g.edges().collect() })
}

/// `B Bᵗ` for the incidence matrix `B` of a directed graph.
///
/// This is the Laplacian of the underlying undirected multigraph: a mutual
/// pair `i <-> j` contributes weight 2.
pub fn directed_laplacian(g: &Graph) -> Result<Matrix> {
    let b = incidence(g)?;
    let n = g.n();
    let mut m = Matrix::zeros(n, n);
    for &(t, h) in b.arcs() {
        m[(t, t)] += 1.0;
        m[(h, h)] += 1.0;
        m[(t, h)] -= 1.0;
        m[(h, t)] -= 1.0;
    }
    Ok(m)
}

/// Number of connected components (weak components for directed graphs).
pub fn connected_components(g: &Graph) -> usize {
    let mut parent: Vec<usize> = (0..g.n()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut count = g.n();
    for (i, j) in g.edges() {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a] = b;
            count -= 1;
        }
    }
    count
}

/// Relabels node `i` as `perm[i]`.
pub fn permute(g: &Graph, perm: &[usize]) -> Result<Graph> {
    let n = g.n();
    if perm.len() != n {
        return Err(Error::InvalidPermutation(format!("length {} does not match {} nodes", perm.len(), n)));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n {
            return Err(Error::InvalidPermutation(format!("index {p} out of range")));
        }
        if std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidPermutation(format!("index {p} repeated")));
        }
    }
    let mut out = Graph::new(n, g.is_directed());
    for (i, j) in g.edges() {
        out.set_edge(perm[i], perm[j], true);
    }
    Ok(out)
}
