//! Simple undirected graphs carrying a positive weight per vertex and a
//! positive length per edge.
//!
//! Vertices are 0-based in the library API (`0..n`); the JSON and CSV formats
//! in [`crate::io`] use 1-based ids. Edges are stored canonically as `(u, v)`
//! with `u < v`, sorted lexicographically, and every per-edge vector in the
//! crate (lengths, weights, gradients) is indexed in that order.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// A validated simple graph with vertex weights `s` and edge lengths `l`.
///
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    s: Vec<f64>,
    l: Vec<f64>,
    adj: Vec<Vec<(usize, usize)>>,
}

/// One step of a minor: delete an edge, contract an edge, or drop an isolated vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinorOp {
    DeleteEdge(usize, usize),
    ContractEdge(usize, usize),
    DeleteIsolatedVertex(usize),
}

/// A vertex set together with the components left after removing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Separator {
    /// Separator vertices, sorted.
    pub set: Vec<usize>,
    /// Components of `G - set`, each sorted, ordered by smallest vertex.
    pub components: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a connected graph. `lengths[k]` belongs to `edges[k]` (in the
    /// order given, before canonicalization).
    pub fn new(n: usize, edges: &[(usize, usize)], s: Vec<f64>, lengths: Vec<f64>) -> Result<Self> {
        let g = Self::structural(n, edges, s, lengths)?;
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    /// Unit vertex weights and unit edge lengths.
    pub fn unit(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new(n, edges, vec![1.0; n], vec![1.0; edges.len()])
    }

    /// Same validation as [`Graph::new`] except connectivity, which minor
    /// operations are allowed to break.
    pub fn structural(
        n: usize,
        edges: &[(usize, usize)],
        s: Vec<f64>,
        lengths: Vec<f64>,
    ) -> Result<Self> {
        if s.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: s.len() });
        }
        if lengths.len() != edges.len() {
            return Err(Error::LengthMismatch { expected: edges.len(), got: lengths.len() });
        }
        let mut tagged = Vec::with_capacity(edges.len());
        for (k, &(a, b)) in edges.iter().enumerate() {
            for v in [a, b] {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            tagged.push(((a.min(b), a.max(b)), lengths[k]));
        }
        tagged.sort_by_key(|x| x.0);
        for pair in tagged.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::DuplicateEdge(pair[0].0 .0, pair[0].0 .1));
            }
        }
        for (i, &x) in s.iter().enumerate() {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::NonPositiveParameter { what: "vertex weight", index: i, value: x });
            }
        }
        for (k, &(_, x)) in tagged.iter().enumerate() {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::NonPositiveParameter { what: "edge length", index: k, value: x });
            }
        }
        let (edges, l): (Vec<_>, Vec<_>) = tagged.into_iter().unzip();
        let mut adj = vec![Vec::new(); n];
        for (k, &(a, b)) in edges.iter().enumerate() {
            adj[a].push((b, k));
            adj[b].push((a, k));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Self { n, edges, s, l, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list, `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Vertex weights.
    pub fn s(&self) -> &[f64] {
        &self.s
    }

    /// Edge lengths, aligned with [`Graph::edges`].
    pub fn lengths(&self) -> &[f64] {
        &self.l
    }

    /// `(neighbor, edge index)` pairs, sorted by neighbor.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search(&key).ok()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edge_index(a, b).is_some()
    }

    /// True when every vertex weight and edge length equals one.
    pub fn has_unit_parameters(&self) -> bool {
        self.s.iter().chain(&self.l).all(|&x| x == 1.0)
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.components_excluding(&vec![false; self.n]).len() == 1
    }

    /// Copy of the graph with every edge length multiplied by `factor`.
    pub fn scale_lengths(&self, factor: f64) -> Result<Self> {
        let l = self.l.iter().map(|x| x * factor).collect();
        Self::structural(self.n, &self.edges, self.s.clone(), l)
    }

    /// Connected components of the subgraph induced by the vertices not
    /// marked in `removed`, ordered by smallest vertex.
    pub(crate) fn components_excluding(&self, removed: &[bool]) -> Vec<Vec<usize>> {
        let mut seen = removed.to_vec();
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &(u, _) in &self.adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        queue.push_back(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Removes `set` and reports the resulting components.
    pub fn components_after_removal(&self, set: &[usize]) -> Result<Separator> {
        let mut removed = vec![false; self.n];
        for &v in set {
            if v >= self.n {
                return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
            }
            removed[v] = true;
        }
        let components = self.components_excluding(&removed);
        if components.len() < 2 {
            return Err(Error::NotASeparator);
        }
        let mut set = set.to_vec();
        set.sort_unstable();
        set.dedup();
        Ok(Separator { set, components })
    }

    /// Applies one minor operation. The result may be disconnected.
    ///
    /// Contracting `(a, b)` keeps the smaller endpoint, gives it weight
    /// `s(a) + s(b)` and relabels the vertices above the removed one down by
    /// one. When both endpoints were adjacent to the same vertex, the edge
    /// from the kept endpoint survives with its length.
    pub fn minor(&self, op: MinorOp) -> Result<Self> {
        match op {
            MinorOp::DeleteEdge(a, b) => {
                let k = self.edge_index(a, b).ok_or(Error::MissingEdge(a, b))?;
                let mut edges = self.edges.clone();
                let mut l = self.l.clone();
                edges.remove(k);
                l.remove(k);
                Self::structural(self.n, &edges, self.s.clone(), l)
            }
            MinorOp::ContractEdge(a, b) => {
                self.edge_index(a, b).ok_or(Error::MissingEdge(a, b))?;
                let (keep, gone) = (a.min(b), a.max(b));
                let relabel = |v: usize| {
                    let v = if v == gone { keep } else { v };
                    if v > gone { v - 1 } else { v }
                };
                let mut edges = Vec::new();
                let mut l = Vec::new();
                // edges at the kept endpoint first so they win over parallels
                let mut order: Vec<usize> = (0..self.edges.len()).collect();
                order.sort_by_key(|&k| {
                    let (u, v) = self.edges[k];
                    (u != keep && v != keep, k)
                });
                let mut present = std::collections::HashSet::new();
                for k in order {
                    let (u, v) = self.edges[k];
                    let (u, v) = (relabel(u), relabel(v));
                    if u == v {
                        continue;
                    }
                    if present.insert((u.min(v), u.max(v))) {
                        edges.push((u, v));
                        l.push(self.l[k]);
                    }
                }
                let mut s = self.s.clone();
                s[keep] += s[gone];
                s.remove(gone);
                Self::structural(self.n - 1, &edges, s, l)
            }
            MinorOp::DeleteIsolatedVertex(v) => {
                if v >= self.n {
                    return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
                }
                if self.degree(v) != 0 {
                    return Err(Error::NotIsolated(v));
                }
                let edges: Vec<_> = self
                    .edges
                    .iter()
                    .map(|&(a, b)| (a - usize::from(a > v), b - usize::from(b > v)))
                    .collect();
                let mut s = self.s.clone();
                s.remove(v);
                Self::structural(self.n - 1, &edges, s, self.l.clone())
            }
        }
    }
}

/// `K_n` with unit parameters.
pub fn complete_graph(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::ParameterOutOfRange(format!("complete graph needs n >= 2, got {n}")));
    }
    let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    Graph::unit(n, &edges)
}

/// `K_n` minus the edge between the last two vertices. Vertices `0..n-2`
/// form the common clique of the two glued `K_{n-1}`.
pub fn complete_minus_edge(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::ParameterOutOfRange(format!("K_n minus an edge needs n >= 3, got {n}")));
    }
    let edges: Vec<_> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !(i == n - 2 && j == n - 1))
        .collect();
    Graph::unit(n, &edges)
}

/// `G(m, k)`: a clique on `0..m` plus `k` pairwise non-adjacent satellites,
/// each joined to the whole clique.
pub fn clique_sum_family(m: usize, k: usize) -> Result<Graph> {
    if m < 2 || k < 1 {
        return Err(Error::ParameterOutOfRange(format!("G(m,k) needs m >= 2 and k >= 1, got ({m},{k})")));
    }
    let mut edges: Vec<_> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    for sat in m..m + k {
        edges.extend((0..m).map(|i| (i, sat)));
    }
    Graph::unit(m + k, &edges)
}
