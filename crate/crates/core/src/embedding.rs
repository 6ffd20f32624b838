//! The dual embedding problem
//! `maximize sum s_i |v_i|^2  s.t.  sum s_i v_i = 0,  |v_i - v_j| <= l_ij`,
//! extraction of embeddings from a `lambda1` eigenspace, and optimality
//! certificates.

use crate::error::{Error, Result};
use crate::graph::{Graph, Separator};
use crate::linalg::{dot, jacobi_eigendecomposition, segment_hull_intersects, solve_lp, LinearProgram, LpOutcome, SymmetricMatrix, JACOBI_TOL};
use crate::spectral::{EdgeWeights, SpectrumReport};

/// Gram eigenvalues at or below this are dropped from an extracted embedding.
pub const BETA_DROP: f64 = 1e-12;
const GAP_TOL: f64 = 1e-9;
const MAX_ATOMS_PER_DIM: usize = 40;

/// One point per vertex, all of the same dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    dim: usize,
    coords: Vec<Vec<f64>>,
}

impl Embedding {
    pub fn new(coords: Vec<Vec<f64>>) -> Result<Self> {
        let dim = coords.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(Error::Invalid("embedding dimension must be at least 1".into()));
        }
        if let Some(bad) = coords.iter().find(|p| p.len() != dim) {
            return Err(Error::LengthMismatch { expected: dim, got: bad.len() });
        }
        if coords.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("embedding coordinates must be finite".into()));
        }
        Ok(Self { dim, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[Vec<f64>] {
        &self.coords
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i]
    }

    pub fn vertex_count(&self) -> usize {
        self.coords.len()
    }

    fn check(&self, g: &Graph) -> Result<()> {
        if self.coords.len() != g.n() {
            return Err(Error::LengthMismatch { expected: g.n(), got: self.coords.len() });
        }
        Ok(())
    }
}

/// Residuals of the joint optimality conditions for a weight/embedding pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktReport {
    /// `max |w_ij (l_ij^2 - |v_i - v_j|^2)|`.
    pub slackness: f64,
    /// `max_i |sum_k w_ik (v_i - v_k) - lambda1 s_i v_i|_inf`.
    pub stationarity: f64,
    /// `|sum s_i v_i|_inf`.
    pub equilibrium: f64,
    /// `max max(0, |v_i - v_j| - l_ij)`.
    pub distance_violation: f64,
    /// Budget overrun `max(0, sum l^2 w - 1)`.
    pub weight_feasibility: f64,
}

impl KktReport {
    pub fn max(&self) -> f64 {
        [self.slackness, self.stationarity, self.equilibrium, self.distance_violation, self.weight_feasibility]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max() < tol
    }
}

/// Extraction output with its certificate data.
#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub embedding: Embedding,
    /// Squared scale of each kept coordinate axis, descending; sums to the objective.
    pub beta: Vec<f64>,
    pub objective: f64,
    /// Columns added by pricing after the initial axis-aligned LP.
    pub generated_columns: usize,
    /// Best certified upper bound on the objective over embeddings inside the
    /// eigenbasis span.
    pub upper_bound: f64,
    /// True when `objective` is within a relative `1e-9` of `upper_bound`.
    pub exact: bool,
    /// Multipliers of the edge constraints in the final LP round.
    pub edge_duals: Vec<f64>,
}

/// Builds an embedding inside the span of `spectrum.eigenbasis`.
///
/// With `q(i) = (u_1(i), ..., u_d(i)) / sqrt(s_i)`, embeddings of the form
/// `v(i) = B^{1/2} q(i)` with `B` positive semidefinite satisfy equilibrium
/// automatically and have objective `tr B`. The best `B` under the edge
/// constraints `(q_i - q_j)^T B (q_i - q_j) <= l_ij^2` is found by an LP over
/// rank-one atoms `B = sum beta_k x_k x_k^T`, starting from the coordinate
/// axes and adding the bottom eigenvector of `M(y) = sum y_e a_e a_e^T`
/// (with `y` the LP duals) each round. Every round also yields the bound
/// `value / lambda_min(M(y))`, and `w` scaled by the smallest cluster
/// eigenvalue gives another; the loop stops once the LP value meets the best
/// bound or the column budget runs out.
pub fn extract_embedding_detailed(g: &Graph, w: &EdgeWeights, spectrum: &SpectrumReport) -> Result<Extraction> {
    w.check_len(g)?;
    let d = spectrum.eigenbasis.len();
    if d == 0 {
        return Err(Error::DegenerateSpectrum);
    }
    if let Some(bad) = spectrum.eigenbasis.iter().find(|u| u.len() != g.n()) {
        return Err(Error::LengthMismatch { expected: g.n(), got: bad.len() });
    }
    let q: Vec<Vec<f64>> = (0..g.n())
        .map(|i| {
            let r = g.s()[i].sqrt();
            spectrum.eigenbasis.iter().map(|u| u[i] / r).collect()
        })
        .collect();
    let diffs: Vec<Vec<f64>> = g
        .edges()
        .iter()
        .map(|&(i, j)| q[i].iter().zip(&q[j]).map(|(a, b)| a - b).collect())
        .collect();
    let rhs: Vec<f64> = g.lengths().iter().map(|l| l * l).collect();

    let mut atoms: Vec<Vec<f64>> = (0..d)
        .map(|k| {
            let mut e = vec![0.0; d];
            e[k] = 1.0;
            e
        })
        .collect();
    // Dual bound from `w` itself: on the eigenbasis, sum w_e a_e a_e^T is
    // diagonal with the cluster eigenvalues.
    let cluster_min = spectrum.cluster_values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut upper = if cluster_min > 0.0 { w.cost(g) / cluster_min } else { f64::INFINITY };
    let mut exact = false;
    // atoms, their weights, edge multipliers
    type Round = (Vec<Vec<f64>>, Vec<f64>, Vec<f64>);
    let mut best: Option<Round> = None;
    while atoms.len() <= MAX_ATOMS_PER_DIM * d {
        let a: Vec<Vec<f64>> = diffs.iter().map(|de| atoms.iter().map(|x| dot(de, x).powi(2)).collect()).collect();
        let lp = LinearProgram::new(vec![1.0; atoms.len()], a, rhs.clone())?;
        let s = match solve_lp(&lp) {
            Ok(LpOutcome::Optimal(s)) => s,
            Ok(LpOutcome::Infeasible) => return Err(Error::LpInfeasible),
            Ok(LpOutcome::Unbounded) => {
                return Err(Error::Invalid("eigenbasis direction is constant across every edge".into()))
            }
            // a later round failing still leaves the previous feasible LP solution
            Err(e) if best.is_none() => return Err(e),
            Err(_) => break,
        };
        let mut m = SymmetricMatrix::zeros(d);
        for (de, &y) in diffs.iter().zip(&s.duals) {
            if y == 0.0 {
                continue;
            }
            for r in 0..d {
                for c in 0..=r {
                    m.add(r, c, y * de[r] * de[c]);
                }
            }
        }
        let eig = jacobi_eigendecomposition(&m, JACOBI_TOL)?;
        if eig.values[0] > 0.0 {
            upper = upper.min(s.value / eig.values[0]);
        }
        let value = s.value;
        best = Some((atoms.clone(), s.x, s.duals));
        if value >= (1.0 - GAP_TOL) * upper {
            exact = true;
            break;
        }
        atoms.push(eig.vectors[0].clone());
    }
    let (atoms, beta_atoms, edge_duals) = best.expect("first LP round either succeeds or returns");
    let mut gram = SymmetricMatrix::zeros(d);
    for (x, &b) in atoms.iter().zip(&beta_atoms) {
        if b <= 0.0 {
            continue;
        }
        for r in 0..d {
            for c in 0..=r {
                gram.add(r, c, b * x[r] * x[c]);
            }
        }
    }
    let eig = jacobi_eigendecomposition(&gram, JACOBI_TOL)?;
    let mut axes: Vec<(f64, &Vec<f64>)> =
        eig.values.iter().copied().zip(&eig.vectors).filter(|(mu, _)| *mu > BETA_DROP).collect();
    axes.sort_by(|a, b| b.0.total_cmp(&a.0));
    if axes.is_empty() {
        return Err(Error::DegenerateSpectrum);
    }
    let coords = q
        .iter()
        .map(|qi| axes.iter().map(|(mu, b)| mu.sqrt() * dot(b, qi)).collect())
        .collect();
    let beta: Vec<f64> = axes.iter().map(|(mu, _)| *mu).collect();
    Ok(Extraction {
        embedding: Embedding::new(coords)?,
        objective: beta.iter().sum(),
        beta,
        generated_columns: atoms.len() - d,
        upper_bound: upper,
        exact,
        edge_duals,
    })
}

/// [`extract_embedding_detailed`] without the certificate data.
pub fn extract_embedding(g: &Graph, w: &EdgeWeights, spectrum: &SpectrumReport) -> Result<Embedding> {
    Ok(extract_embedding_detailed(g, w, spectrum)?.embedding)
}

/// `sum s_i |v_i|^2`.
pub fn embedding_objective(g: &Graph, v: &Embedding) -> Result<f64> {
    v.check(g)?;
    Ok(v.coords.iter().zip(g.s()).map(|(p, s)| s * dot(p, p)).sum())
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Evaluates the optimality residuals of `(w, v, lambda1)`. No solving.
pub fn kkt_residuals(g: &Graph, w: &EdgeWeights, v: &Embedding, lambda1: f64) -> Result<KktReport> {
    w.check_len(g)?;
    v.check(g)?;
    let d = v.dim;
    let mut slackness: f64 = 0.0;
    let mut distance_violation: f64 = 0.0;
    let mut force = vec![vec![0.0; d]; g.n()];
    for (k, &(i, j)) in g.edges().iter().enumerate() {
        let l = g.lengths()[k];
        let dd = dist2(&v.coords[i], &v.coords[j]);
        slackness = slackness.max((w[k] * (l * l - dd)).abs());
        distance_violation = distance_violation.max(dd.sqrt() - l);
        for c in 0..d {
            let delta = w[k] * (v.coords[i][c] - v.coords[j][c]);
            force[i][c] += delta;
            force[j][c] -= delta;
        }
    }
    let mut stationarity: f64 = 0.0;
    let mut barycenter = vec![0.0; d];
    for i in 0..g.n() {
        let s = g.s()[i];
        for c in 0..d {
            stationarity = stationarity.max((force[i][c] - lambda1 * s * v.coords[i][c]).abs());
            barycenter[c] += s * v.coords[i][c];
        }
    }
    let equilibrium = barycenter.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let weight_feasibility = (w.cost(g) - 1.0).max(0.0);
    Ok(KktReport { slackness, stationarity, equilibrium, distance_violation: distance_violation.max(0.0), weight_feasibility })
}

/// Index into `sep.components` of the first component all of whose vertices
/// `i` have the segment `[0, v(i)]` meeting the hull of the separator's
/// points, or `None`.
pub fn separator_shadow_check(g: &Graph, sep: &Separator, v: &Embedding, tol: f64) -> Result<Option<usize>> {
    v.check(g)?;
    let hull: Vec<Vec<f64>> = sep.set.iter().map(|&s| v.coords[s].clone()).collect();
    for (idx, comp) in sep.components.iter().enumerate() {
        let mut all = true;
        for &i in comp {
            if !segment_hull_intersects(&v.coords[i], &hull, tol)? {
                all = false;
                break;
            }
        }
        if all {
            return Ok(Some(idx));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, complete_minus_edge};
    use crate::spectral::{first_nonzero_eigenvalue, CLUSTER_TOL};

    fn extract(g: &Graph, w: Vec<f64>) -> (Extraction, f64) {
        let w = EdgeWeights::new(w).unwrap();
        let spec = first_nonzero_eigenvalue(g, &w, CLUSTER_TOL).unwrap();
        (extract_embedding_detailed(g, &w, &spec).unwrap(), spec.lambda1)
    }

    #[test]
    fn k4_uniform() {
        let g = complete_graph(4).unwrap();
        let (ex, lambda) = extract(&g, vec![1.0 / 6.0; 6]);
        assert!((ex.objective - 1.5).abs() < 1e-9, "{}", ex.objective);
        assert!((ex.objective * lambda - 1.0).abs() < 1e-9);
        assert_eq!(ex.embedding.dim(), 3);
        let obj = embedding_objective(&g, &ex.embedding).unwrap();
        assert!((obj - ex.objective).abs() < 1e-10);
    }

    #[test]
    fn k5_minus_edge_analytic_weights() {
        // clique {0,1,2}, satellites 3 and 4
        let g = complete_minus_edge(5).unwrap();
        let (a, b) = (1.0 / 21.0, 1.0 / 7.0);
        let w: Vec<f64> = g.edges().iter().map(|&(_, j)| if j < 3 { a } else { b }).collect();
        let (ex, lambda) = extract(&g, w.clone());
        assert!((lambda - 3.0 / 7.0).abs() < 1e-12);
        assert!((ex.objective - 7.0 / 3.0).abs() < 1e-8, "{}", ex.objective);
        assert!(ex.exact);
        assert_eq!(ex.embedding.dim(), 3);
        let rep = kkt_residuals(&g, &EdgeWeights::new(w).unwrap(), &ex.embedding, lambda).unwrap();
        assert!(rep.passes(1e-8), "{rep:?}");
    }

    #[test]
    fn single_edge_residuals_vanish() {
        let g = Graph::unit(2, &[(0, 1)]).unwrap();
        let w = EdgeWeights::new(vec![1.0]).unwrap();
        let v = Embedding::new(vec![vec![-0.5], vec![0.5]]).unwrap();
        let rep = kkt_residuals(&g, &w, &v, 2.0).unwrap();
        assert_eq!(rep.max(), 0.0);
    }

    #[test]
    fn zero_embedding_objective() {
        let g = complete_graph(3).unwrap();
        let v = Embedding::new(vec![vec![0.0; 2]; 3]).unwrap();
        assert_eq!(embedding_objective(&g, &v).unwrap(), 0.0);
        assert!(embedding_objective(&complete_graph(4).unwrap(), &v).is_err());
    }

    #[test]
    fn embedding_validation() {
        assert!(Embedding::new(vec![]).is_err());
        assert!(Embedding::new(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(Embedding::new(vec![vec![f64::INFINITY]]).is_err());
    }

    #[test]
    fn shadow_on_path() {
        let g = Graph::unit(3, &[(0, 1), (1, 2)]).unwrap();
        let sep = g.components_after_removal(&[1]).unwrap();
        let v = Embedding::new(vec![vec![-1.0], vec![0.0], vec![1.0]]).unwrap();
        assert_eq!(separator_shadow_check(&g, &sep, &v, 1e-9).unwrap(), Some(0));
        let v = Embedding::new(vec![vec![-1.0, 0.0], vec![0.0, 0.5], vec![1.0, 0.0]]).unwrap();
        assert_eq!(separator_shadow_check(&g, &sep, &v, 1e-9).unwrap(), None);
    }
}
