//! The vertex-weighted Laplacian `L(G; (w, s)) = D (sum_ij w_ij E_ij) D` with
//! `D = diag(s_i^{-1/2})`, and its first nonzero eigenvalue.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{dot, jacobi_eigendecomposition, SymmetricMatrix, JACOBI_TOL};

/// Default relative width of the eigenvalue cluster counted as `lambda1`.
pub const CLUSTER_TOL: f64 = 1e-6;

/// Nonnegative weight per edge, in the graph's canonical edge order.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeights(Vec<f64>);

impl EdgeWeights {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, &x)) = values.iter().enumerate().find(|(_, x)| !(**x >= 0.0 && x.is_finite())) {
            return Err(Error::Invalid(format!("edge weight {i} must be finite and nonnegative, got {x}")));
        }
        Ok(Self(values))
    }

    /// Same value on every edge.
    pub fn uniform(edge_count: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; edge_count])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `sum_ij l_ij^2 w_ij`; the budget constraint is `cost <= 1`.
    pub fn cost(&self, g: &Graph) -> f64 {
        self.0.iter().zip(g.lengths()).map(|(w, l)| l * l * w).sum()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|w| w * factor).collect())
    }

    pub(crate) fn check_len(&self, g: &Graph) -> Result<()> {
        if self.0.len() != g.edge_count() {
            return Err(Error::LengthMismatch { expected: g.edge_count(), got: self.0.len() });
        }
        Ok(())
    }
}

impl std::ops::Index<usize> for EdgeWeights {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

/// First nonzero eigenvalue of the weighted Laplacian and its eigenspace.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub lambda1: f64,
    /// Size of the eigenvalue cluster at `lambda1`.
    pub multiplicity: usize,
    /// Orthonormal basis of the `lambda1` cluster, orthogonal to `sqrt(s)`.
    pub eigenbasis: Vec<Vec<f64>>,
    /// Eigenvalue values of the cluster members, aligned with `eigenbasis`.
    pub cluster_values: Vec<f64>,
    /// Dimension of the null space (number of components of the weight support).
    pub null_multiplicity: usize,
    pub w_support_connected: bool,
    /// Full spectrum, ascending.
    pub eigenvalues: Vec<f64>,
}

/// Assembles `L(G; (w, s))`.
pub fn build_laplacian(g: &Graph, w: &EdgeWeights) -> Result<SymmetricMatrix> {
    w.check_len(g)?;
    let s = g.s();
    let mut lap = SymmetricMatrix::zeros(g.n());
    for (k, &(i, j)) in g.edges().iter().enumerate() {
        let wk = w[k];
        if wk == 0.0 {
            continue;
        }
        lap.add(i, i, wk / s[i]);
        lap.add(j, j, wk / s[j]);
        lap.add(i, j, -wk / (s[i] * s[j]).sqrt());
    }
    Ok(lap)
}

/// Components of `(V, {ij : w_ij > 0})`, ordered by smallest vertex.
pub fn support_components(g: &Graph, w: &EdgeWeights) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..g.n()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (k, &(i, j)) in g.edges().iter().enumerate() {
        if w[k] > 0.0 {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; g.n()];
    for v in 0..g.n() {
        let r = find(&mut parent, v);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(v);
    }
    groups
}

/// Unit null vector `sqrt(s) / |sqrt(s)|`.
pub fn null_direction(g: &Graph) -> Vec<f64> {
    let mut z: Vec<f64> = g.s().iter().map(|x| x.sqrt()).collect();
    let norm = dot(&z, &z).sqrt();
    z.iter_mut().for_each(|x| *x /= norm);
    z
}

/// Gram-Schmidt `candidates` against `z` and each other, dropping vectors
/// that collapse below `1e-10`.
fn orthonormalize(z: &[f64], candidates: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for mut v in candidates {
        for _ in 0..2 {
            for b in std::iter::once(z).chain(basis.iter().map(Vec::as_slice)) {
                let c = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-10 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    basis
}

/// Computes `lambda1` as the second-smallest eigenvalue of the Laplacian,
/// with its cluster of eigenvalues within `cluster_tol * max(1, lambda1)`.
///
/// If the support of `w` is disconnected, `lambda1 = 0` and the eigenbasis
/// spans the null space minus the `sqrt(s)` direction.
pub fn first_nonzero_eigenvalue(g: &Graph, w: &EdgeWeights, cluster_tol: f64) -> Result<SpectrumReport> {
    spectrum_with_width(g, w, |lambda1| cluster_tol * lambda1.max(1.0))
}

/// Same report with the cluster taken within `rel_tol * lambda1`, so that it
/// is unchanged when `w` is rescaled.
pub(crate) fn first_cluster_relative(g: &Graph, w: &EdgeWeights, rel_tol: f64) -> Result<SpectrumReport> {
    spectrum_with_width(g, w, |lambda1| rel_tol * lambda1)
}

fn spectrum_with_width(g: &Graph, w: &EdgeWeights, width_of: impl Fn(f64) -> f64) -> Result<SpectrumReport> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let lap = build_laplacian(g, w)?;
    let eig = jacobi_eigendecomposition(&lap, JACOBI_TOL)?;
    let z = null_direction(g);
    let comps = support_components(g, w);
    let n = g.n();

    if comps.len() > 1 {
        let indicators = comps
            .iter()
            .map(|c| {
                let mut v = vec![0.0; n];
                for &i in c {
                    v[i] = g.s()[i].sqrt();
                }
                v
            })
            .collect();
        let eigenbasis = orthonormalize(&z, indicators);
        return Ok(SpectrumReport {
            lambda1: 0.0,
            multiplicity: eigenbasis.len(),
            cluster_values: vec![0.0; eigenbasis.len()],
            eigenbasis,
            null_multiplicity: comps.len(),
            w_support_connected: false,
            eigenvalues: eig.values,
        });
    }
    if n < 2 {
        return Err(Error::DegenerateSpectrum);
    }

    let lambda1 = eig.values[1].max(0.0);
    let width = width_of(lambda1);
    let members: Vec<usize> = (1..n).filter(|&k| (eig.values[k] - lambda1).abs() <= width).collect();
    let cluster_values = members.iter().map(|&k| eig.values[k]).collect();
    let eigenbasis = orthonormalize(&z, members.iter().map(|&k| eig.vectors[k].clone()).collect());
    Ok(SpectrumReport {
        lambda1,
        multiplicity: eigenbasis.len(),
        eigenbasis,
        cluster_values,
        null_multiplicity: 1,
        w_support_connected: true,
        eigenvalues: eig.values,
    })
}
