//! Closed-form optima for complete graphs, `K_n` minus an edge and the clique
//! sums `G(m, k)`, plus the graph invariants that bound the rotational
//! dimension: clique number and chordality.
//!
//! Vertex layout follows [`crate::graph`]: the clique is `0..m`, satellites
//! come after it.

use crate::embedding::{kkt_residuals, Embedding, KktReport};
use crate::error::{Error, Result};
use crate::graph::{clique_sum_family, complete_graph, complete_minus_edge, Graph};
use crate::spectral::EdgeWeights;

/// Vertex cap for [`clique_number`].
pub const CLIQUE_VERTEX_CAP: usize = 60;

/// A graph with provably optimal weights and embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticSolution {
    pub graph: Graph,
    pub w: EdgeWeights,
    pub lambda1: f64,
    pub embedding: Embedding,
    /// Dimension spanned by `embedding`.
    pub claimed_dim: usize,
    /// Known rotational dimension of the graph, where one is established.
    pub rotdim_claim: Option<usize>,
}

impl AnalyticSolution {
    pub fn kkt(&self) -> Result<KktReport> {
        kkt_residuals(&self.graph, &self.w, &self.embedding, self.lambda1)
    }
}

/// Centered unit-side simplex on `m` points in dimension `m - 1` (no
/// coordinates at all for `m = 1`).
fn simplex_points(m: usize) -> Vec<Vec<f64>> {
    let mut pts: Vec<Vec<f64>> = vec![Vec::new()];
    for k in 1..m {
        // k points of circumradius R_k; lift an apex over their centroid
        let r2 = (k as f64 - 1.0) / (2.0 * k as f64);
        let h = (1.0 - r2).sqrt();
        let drop = h / (k as f64 + 1.0);
        for p in pts.iter_mut() {
            p.push(-drop);
        }
        let mut apex = vec![0.0; k - 1];
        apex.push(h - drop);
        pts.push(apex);
    }
    pts
}

/// `m` points with unit pairwise distances and barycenter at the origin, in
/// dimension `max(1, m - 1)`.
pub fn regular_simplex(m: usize) -> Result<Vec<Vec<f64>>> {
    if m == 0 {
        return Err(Error::ParameterOutOfRange("regular simplex needs m >= 1".into()));
    }
    let mut pts = simplex_points(m);
    if m == 1 {
        pts[0].push(0.0);
    }
    Ok(pts)
}

fn pad(points: &mut [Vec<f64>], dim: usize) {
    for p in points {
        p.resize(dim, 0.0);
    }
}

fn clique_weights(g: &Graph, m: usize, a: f64, b: f64) -> Result<EdgeWeights> {
    EdgeWeights::new(g.edges().iter().map(|&(_, j)| if j < m { a } else { b }).collect())
}

/// `K_n`: uniform weights `2 / (n (n - 1))`, `lambda1 = 2 / (n - 1)`, regular simplex.
pub fn analytic_complete(n: usize) -> Result<AnalyticSolution> {
    let graph = complete_graph(n)?;
    let nf = n as f64;
    let w = EdgeWeights::uniform(graph.edge_count(), 2.0 / (nf * (nf - 1.0)))?;
    Ok(AnalyticSolution {
        graph,
        w,
        lambda1: 2.0 / (nf - 1.0),
        embedding: Embedding::new(regular_simplex(n)?)?,
        claimed_dim: n - 1,
        rotdim_claim: Some(n - 1),
    })
}

/// `K_n` minus an edge, `m = n - 2`: clique weight `2(m-2) / (m(m^2+m+2))`,
/// cross weight `2 / (m^2+m+2)`, `lambda1 = 2m / (m^2+m+2)`. The clique sits
/// on a simplex and the two satellites at `+-r` on a new axis, with
/// `r^2 = (m+1) / (2m)`.
pub fn analytic_kn_minus_edge(n: usize) -> Result<AnalyticSolution> {
    let graph = complete_minus_edge(n)?;
    let m = n - 2;
    let mf = m as f64;
    let denom = mf * mf + mf + 2.0;
    let w = clique_weights(&graph, m, 2.0 * (mf - 2.0) / (mf * denom), 2.0 / denom)?;
    let r = ((mf + 1.0) / (2.0 * mf)).sqrt();
    let mut coords = simplex_points(m);
    coords.push(vec![0.0; m - 1]);
    coords.push(vec![0.0; m - 1]);
    pad(&mut coords, m);
    coords[m][m - 1] = r;
    coords[m + 1][m - 1] = -r;
    Ok(AnalyticSolution {
        graph,
        w,
        lambda1: 2.0 * mf / denom,
        embedding: Embedding::new(coords)?,
        claimed_dim: m,
        rotdim_claim: (n >= 5).then_some(n - 2),
    })
}

/// `G(m, k)` for `m > k >= 2`, with `D = m^2 + (k-1)m + k`: clique weight
/// `2(m-k) / (mD)`, cross weight `2 / D`, `lambda1 = 2m / D`. Satellites lie
/// on the circle of radius `sqrt((m+1) / (2m))` orthogonal to the clique's
/// simplex: antipodal pairs for even `k` (dimension `m`), and for odd `k` one
/// point at angle zero plus `k - 1` points alternating above and below the
/// axis at `x = -r / (k-1)` (dimension `m + 1`).
///
/// `k = 1` is `K_{m+1}`.
pub fn analytic_gmk(m: usize, k: usize) -> Result<AnalyticSolution> {
    if k == 1 {
        let mut sol = analytic_complete(m + 1)?;
        sol.graph = clique_sum_family(m, 1)?;
        sol.rotdim_claim = Some(m);
        return Ok(sol);
    }
    if k == 0 || m <= k {
        return Err(Error::ParameterOutOfRange(format!("G(m,k) formulas need m > k >= 2, got ({m},{k})")));
    }
    let graph = clique_sum_family(m, k)?;
    let (mf, kf) = (m as f64, k as f64);
    let denom = mf * mf + (kf - 1.0) * mf + kf;
    let w = clique_weights(&graph, m, 2.0 * (mf - kf) / (mf * denom), 2.0 / denom)?;
    let r = ((mf + 1.0) / (2.0 * mf)).sqrt();
    let dim = if k.is_multiple_of(2) { m } else { m + 1 };
    let mut coords = simplex_points(m);
    let axis = m - 1;
    for t in 0..k {
        let mut p = vec![0.0; dim];
        if k.is_multiple_of(2) {
            p[axis] = if t % 2 == 0 { r } else { -r };
        } else if t == 0 {
            p[axis] = r;
        } else {
            let x = -r / (kf - 1.0);
            p[axis] = x;
            let y = (r * r - x * x).sqrt();
            p[axis + 1] = if t % 2 == 1 { y } else { -y };
        }
        coords.push(p);
    }
    pad(&mut coords, dim);
    let rotdim_claim = if k == 2 {
        Some(m)
    } else if m >= 4 {
        Some(m + 1)
    } else {
        None
    };
    Ok(AnalyticSolution {
        graph,
        w,
        lambda1: 2.0 * mf / denom,
        embedding: Embedding::new(coords)?,
        claimed_dim: dim,
        rotdim_claim,
    })
}

/// `G(2, 3)`: zero weight on the clique edge, `1/6` on the six others,
/// `lambda1 = 1/3`. The clique collapses to the origin and the satellites sit
/// on the unit circle at angles `2 pi t / 3`.
pub fn analytic_g23_remark() -> Result<AnalyticSolution> {
    let graph = clique_sum_family(2, 3)?;
    let w = clique_weights(&graph, 2, 0.0, 1.0 / 6.0)?;
    let mut coords = vec![vec![0.0, 0.0]; 2];
    for t in 0..3 {
        let theta = 2.0 * std::f64::consts::PI * t as f64 / 3.0;
        coords.push(vec![theta.cos(), theta.sin()]);
    }
    Ok(AnalyticSolution {
        graph,
        w,
        lambda1: 1.0 / 3.0,
        embedding: Embedding::new(coords)?,
        claimed_dim: 2,
        rotdim_claim: None,
    })
}

/// A named family instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Complete { n: usize },
    KnMinusEdge { n: usize },
    Gmk { m: usize, k: usize },
    G23,
}

impl Family {
    pub fn analytic(self) -> Result<AnalyticSolution> {
        match self {
            Family::Complete { n } => analytic_complete(n),
            Family::KnMinusEdge { n } => analytic_kn_minus_edge(n),
            Family::Gmk { m, k } => analytic_gmk(m, k),
            Family::G23 => analytic_g23_remark(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Complete { .. } => "complete",
            Family::KnMinusEdge { .. } => "kn-minus-e",
            Family::Gmk { .. } => "gmk",
            Family::G23 => "g23",
        }
    }
}

/// Recognizes unit-parameter graphs that are a relabeling of a family with a
/// closed-form optimum. Returns the family and the map from input vertices to
/// the family's vertex layout (clique first, then satellites, each in
/// increasing input order).
///
/// `G(m, 2)` is reported as `K_{m+2}` minus an edge, and `G(m, 1)` as `K_{m+1}`.
pub fn identify_family(g: &Graph) -> Option<(Family, Vec<usize>)> {
    if !g.has_unit_parameters() {
        return None;
    }
    let n = g.n();
    if g.edge_count() == n * (n - 1) / 2 {
        return Some((Family::Complete { n }, (0..n).collect()));
    }
    let (clique, sats): (Vec<usize>, Vec<usize>) = (0..n).partition(|&v| g.degree(v) == n - 1);
    let (m, k) = (clique.len(), sats.len());
    if m == 0 || g.edge_count() != m * (m - 1) / 2 + m * k || sats.iter().any(|&v| g.degree(v) != m) {
        return None;
    }
    let family = match (m, k) {
        (_, 2) => Family::KnMinusEdge { n },
        (2, 3) => Family::G23,
        (m, k) if m > k => Family::Gmk { m, k },
        _ => return None,
    };
    let mut perm = vec![0; n];
    for (new, &old) in clique.iter().chain(&sats).enumerate() {
        perm[old] = new;
    }
    Some((family, perm))
}

fn adjacency_bits(g: &Graph) -> Vec<u64> {
    let mut bits = vec![0u64; g.n()];
    for &(i, j) in g.edges() {
        bits[i] |= 1 << j;
        bits[j] |= 1 << i;
    }
    bits
}

fn bron_kerbosch(adj: &[u64], r: u32, mut p: u64, mut x: u64, best: &mut u32) {
    if p == 0 {
        if x == 0 {
            *best = (*best).max(r);
        }
        return;
    }
    if r + p.count_ones() <= *best {
        return;
    }
    // pivot on the vertex of P or X with the most neighbors in P
    let mut pivot = (p | x).trailing_zeros() as usize;
    let mut most = 0;
    let mut scan = p | x;
    while scan != 0 {
        let u = scan.trailing_zeros() as usize;
        scan &= scan - 1;
        let c = (p & adj[u]).count_ones();
        if c > most {
            most = c;
            pivot = u;
        }
    }
    let mut cand = p & !adj[pivot];
    while cand != 0 {
        let v = cand.trailing_zeros() as usize;
        cand &= cand - 1;
        bron_kerbosch(adj, r + 1, p & adj[v], x & adj[v], best);
        p &= !(1 << v);
        x |= 1 << v;
    }
}

/// Size of a maximum clique (Bron-Kerbosch with pivoting).
pub fn clique_number(g: &Graph) -> Result<usize> {
    if g.n() > CLIQUE_VERTEX_CAP {
        return Err(Error::TooLarge { n: g.n(), cap: CLIQUE_VERTEX_CAP });
    }
    if g.n() == 0 {
        return Ok(0);
    }
    let adj = adjacency_bits(g);
    let all = if g.n() == 64 { u64::MAX } else { (1u64 << g.n()) - 1 };
    let mut best = 0;
    bron_kerbosch(&adj, 0, all, 0, &mut best);
    Ok(best as usize)
}

/// Lexicographic BFS visit order; ties go to the smallest vertex.
fn lex_bfs(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut labels: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for step in 0..n {
        let v = (0..n)
            .filter(|&v| !visited[v])
            .fold(None, |best: Option<usize>, v| match best {
                Some(b) if labels[b] >= labels[v] => Some(b),
                _ => Some(v),
            })
            .expect("unvisited vertex remains");
        visited[v] = true;
        order.push(v);
        for &(u, _) in g.neighbors(v) {
            if !visited[u] {
                labels[u].push(n - step);
            }
        }
    }
    order
}

/// Chordality test. On success returns a perfect elimination ordering: each
/// vertex's neighbors that come later in the ordering form a clique.
pub fn is_chordal(g: &Graph) -> (bool, Option<Vec<usize>>) {
    let mut order = lex_bfs(g);
    order.reverse();
    let mut pos = vec![0; g.n()];
    for (p, &v) in order.iter().enumerate() {
        pos[v] = p;
    }
    for &v in &order {
        let later: Vec<usize> = g.neighbors(v).iter().map(|&(u, _)| u).filter(|&u| pos[u] > pos[v]).collect();
        let Some(&parent) = later.iter().min_by_key(|&&u| pos[u]) else {
            continue;
        };
        if later.iter().any(|&u| u != parent && !g.has_edge(u, parent)) {
            return (false, None);
        }
    }
    (true, Some(order))
}

/// The bound chain `omega - 1 <= rotdim <= treewidth + 1`, with the
/// treewidth known exactly only for chordal graphs (`omega - 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InvariantBounds {
    pub clique_number: usize,
    pub chordal: bool,
    pub treewidth: Option<usize>,
    pub lower: usize,
    pub upper: Option<usize>,
}

pub fn invariant_bounds(g: &Graph) -> Result<InvariantBounds> {
    let omega = clique_number(g)?;
    let chordal = is_chordal(g).0;
    let treewidth = chordal.then(|| omega.saturating_sub(1));
    Ok(InvariantBounds {
        clique_number: omega,
        chordal,
        treewidth,
        lower: omega.saturating_sub(1),
        upper: treewidth.map(|t| t + 1),
    })
}

/// Structural classes with rotational dimension at most one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowRotdimClass {
    /// No edges: rotdim 0.
    Edgeless,
    /// Every component is a path: rotdim at most 1.
    DisjointPaths,
    Other,
}

pub fn low_rotdim_class(g: &Graph) -> LowRotdimClass {
    if g.edge_count() == 0 {
        return LowRotdimClass::Edgeless;
    }
    let components = g.components_excluding(&vec![false; g.n()]).len();
    let forest = g.edge_count() + components == g.n();
    if forest && g.max_degree() <= 2 {
        LowRotdimClass::DisjointPaths
    } else {
        LowRotdimClass::Other
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{numerical_rank, RANK_TOL};
    use crate::spectral::{first_nonzero_eigenvalue, CLUSTER_TOL};

    fn dist(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
    }

    #[test]
    fn simplex_geometry() {
        assert_eq!(regular_simplex(1).unwrap(), vec![vec![0.0]]);
        assert_eq!(regular_simplex(2).unwrap(), vec![vec![-0.5], vec![0.5]]);
        for m in 2..=9 {
            let pts = regular_simplex(m).unwrap();
            let r2 = (m as f64 - 1.0) / (2.0 * m as f64);
            for (i, p) in pts.iter().enumerate() {
                assert_eq!(p.len(), m - 1);
                assert!((p.iter().map(|x| x * x).sum::<f64>() - r2).abs() < 1e-14);
                for q in &pts[i + 1..] {
                    assert!((dist(p, q) - 1.0).abs() < 1e-14);
                }
            }
            for c in 0..m - 1 {
                assert!(pts.iter().map(|p| p[c]).sum::<f64>().abs() < 1e-14);
            }
        }
        assert!(regular_simplex(0).is_err());
    }

    #[test]
    fn complete_examples() {
        let s = analytic_complete(4).unwrap();
        assert!((s.lambda1 - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.claimed_dim, 3);
        let spec = first_nonzero_eigenvalue(&s.graph, &s.w, CLUSTER_TOL).unwrap();
        assert!((spec.lambda1 - s.lambda1).abs() < 1e-12);
        let s = analytic_complete(2).unwrap();
        assert_eq!(s.w.as_slice(), &[1.0]);
        assert_eq!(s.lambda1, 2.0);
        assert_eq!(analytic_complete(5).unwrap().rotdim_claim, Some(4));
    }

    #[test]
    fn kn_minus_edge_examples() {
        let s = analytic_kn_minus_edge(5).unwrap();
        let (a, b) = (s.w[0], s.w[s.w.len() - 1]);
        assert!((a - 1.0 / 21.0).abs() < 1e-15 && (b - 1.0 / 7.0).abs() < 1e-15);
        assert!((s.lambda1 - 3.0 / 7.0).abs() < 1e-15);
        assert!((s.w.cost(&s.graph) - 1.0).abs() < 1e-14);
        let six = analytic_kn_minus_edge(6).unwrap().lambda1;
        assert!((six - 4.0 / 11.0).abs() < 1e-15);
        assert_eq!(six, analytic_gmk(4, 2).unwrap().lambda1);
        assert_eq!(analytic_kn_minus_edge(4).unwrap().rotdim_claim, None);
        assert!(analytic_kn_minus_edge(2).is_err());
    }

    #[test]
    fn gmk_examples() {
        let s = analytic_gmk(4, 3).unwrap();
        assert!((s.w[0] - 1.0 / 54.0).abs() < 1e-15);
        assert!((s.w[s.w.len() - 1] - 2.0 / 27.0).abs() < 1e-15);
        assert!((s.lambda1 - 8.0 / 27.0).abs() < 1e-15);
        assert_eq!(s.claimed_dim, 5);
        let s = analytic_gmk(5, 4).unwrap();
        assert!((s.lambda1 - 5.0 / 22.0).abs() < 1e-15);
        assert_eq!(s.claimed_dim, 5);
        assert!(matches!(analytic_gmk(3, 3), Err(Error::ParameterOutOfRange(_))));
        assert!(matches!(analytic_gmk(2, 3), Err(Error::ParameterOutOfRange(_))));
        assert_eq!(analytic_gmk(3, 1).unwrap().graph, complete_graph(4).unwrap());
    }

    #[test]
    fn every_construction_certifies() {
        let mut sols = vec![analytic_g23_remark().unwrap()];
        sols.extend((2..=9).map(|n| analytic_complete(n).unwrap()));
        sols.extend((3..=9).map(|n| analytic_kn_minus_edge(n).unwrap()));
        for m in 2..=7 {
            sols.extend((1..m).map(|k| analytic_gmk(m, k).unwrap()));
        }
        for s in &sols {
            let rep = s.kkt().unwrap();
            assert!(rep.passes(1e-12), "{rep:?}");
            let rank = numerical_rank(s.embedding.coords(), RANK_TOL).unwrap();
            assert_eq!(rank, s.claimed_dim);
            let spec = first_nonzero_eigenvalue(&s.graph, &s.w, CLUSTER_TOL).unwrap();
            assert!((spec.lambda1 - s.lambda1).abs() < 1e-12);
        }
    }

    #[test]
    fn identifies_relabeled_families() {
        // K_5 minus {1,4}: clique {0,2,3}, satellites 1 and 4
        let edges: Vec<_> = (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j))).filter(|&e| e != (1, 4)).collect();
        let g = Graph::unit(5, &edges).unwrap();
        let (fam, perm) = identify_family(&g).unwrap();
        assert_eq!(fam, Family::KnMinusEdge { n: 5 });
        assert_eq!(perm, vec![0, 3, 1, 2, 4]);
        assert_eq!(identify_family(&complete_graph(4).unwrap()).unwrap().0, Family::Complete { n: 4 });
        assert_eq!(identify_family(&clique_sum_family(4, 3).unwrap()).unwrap().0, Family::Gmk { m: 4, k: 3 });
        assert_eq!(identify_family(&clique_sum_family(2, 3).unwrap()).unwrap().0, Family::G23);
        assert_eq!(identify_family(&clique_sum_family(2, 4).unwrap()), None);
        let c4 = Graph::unit(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(identify_family(&c4), None);
        let scaled = complete_graph(3).unwrap().scale_lengths(2.0).unwrap();
        assert_eq!(identify_family(&scaled), None);
    }

    #[test]
    fn clique_numbers() {
        assert_eq!(clique_number(&complete_graph(5).unwrap()).unwrap(), 5);
        assert_eq!(clique_number(&complete_minus_edge(5).unwrap()).unwrap(), 4);
        assert_eq!(clique_number(&clique_sum_family(4, 3).unwrap()).unwrap(), 5);
        let big: Vec<_> = (0..61).map(|i| (i, i + 1)).collect();
        let path = Graph::unit(62, &big).unwrap();
        assert!(matches!(clique_number(&path), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn chordality() {
        let c4 = Graph::unit(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(is_chordal(&c4), (false, None));
        let (ok, order) = is_chordal(&clique_sum_family(5, 4).unwrap());
        assert!(ok);
        assert_eq!(order.unwrap().len(), 9);
        let tree = Graph::unit(5, &[(0, 1), (0, 2), (2, 3), (2, 4)]).unwrap();
        assert!(is_chordal(&tree).0);
    }

    #[test]
    fn bounds_examples() {
        let b = invariant_bounds(&clique_sum_family(4, 3).unwrap()).unwrap();
        assert_eq!((b.lower, b.upper), (4, Some(5)));
        let b = invariant_bounds(&complete_minus_edge(6).unwrap()).unwrap();
        assert_eq!((b.lower, b.upper), (4, Some(5)));
        let c4 = Graph::unit(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let b = invariant_bounds(&c4).unwrap();
        assert_eq!((b.lower, b.upper, b.treewidth), (1, None, None));
    }

    #[test]
    fn low_classes() {
        let empty = Graph::structural(3, &[], vec![1.0; 3], vec![]).unwrap();
        assert_eq!(low_rotdim_class(&empty), LowRotdimClass::Edgeless);
        let path = Graph::unit(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(low_rotdim_class(&path), LowRotdimClass::DisjointPaths);
        assert_eq!(low_rotdim_class(&complete_graph(3).unwrap()), LowRotdimClass::Other);
        let two_paths = Graph::structural(4, &[(0, 1), (2, 3)], vec![1.0; 4], vec![1.0; 2]).unwrap();
        assert_eq!(low_rotdim_class(&two_paths), LowRotdimClass::DisjointPaths);
    }
}
