//! Projected supergradient ascent for
//! `maximize lambda1(L(G; (w, s)))  s.t.  sum l_ij^2 w_ij <= 1, w >= 0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral::{first_cluster_relative, first_nonzero_eigenvalue, EdgeWeights, SpectrumReport, CLUSTER_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Step scale `c` in `eta_t = c / sqrt(t)`; `None` means `mean(l^2) / max degree`.
    pub step_scale: Option<f64>,
    /// Best-value progress below this over the final fifth of the run counts as converged.
    pub tol: f64,
    /// Zero starts from exactly uniform weights; other seeds jitter the start.
    pub seed: u64,
    /// Relative eigenvalue-cluster width used when reporting `lambda1`.
    pub cluster_tol: f64,
    /// Initial width, relative to `lambda1`, of the eigenvalue window whose eigenvectors are
    /// averaged into each step direction.
    pub ascent_window: f64,
    /// Iteration after which the averaging window shrinks like `1/t`, down to
    /// `cluster_tol`.
    pub ascent_window_decay: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            step_scale: None,
            tol: 1e-8,
            seed: 0,
            cluster_tol: CLUSTER_TOL,
            ascent_window: 5e-2,
            ascent_window_decay: 500,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Invalid("max_iters must be at least 1".into()));
        }
        if let Some(c) = self.step_scale {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::Invalid(format!("step scale must be positive, got {c}")));
            }
        }
        if !(self.cluster_tol > 0.0 && self.ascent_window > 0.0) {
            return Err(Error::Invalid("cluster tolerances must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Invalid(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub w_star: EdgeWeights,
    pub lambda1: f64,
    pub iterations: usize,
    /// Running maximum of `lambda1`, one entry per evaluated iterate.
    pub best_history: Vec<f64>,
    pub converged: bool,
}

/// Per-edge `(u_i / sqrt(s_i) - u_j / sqrt(s_j))^2` for the first vector `u`
/// of the eigenbasis; a supergradient of the concave map `w -> lambda1(w)`.
pub fn supergradient(g: &Graph, w: &EdgeWeights, spectrum: &SpectrumReport) -> Result<Vec<f64>> {
    w.check_len(g)?;
    if !spectrum.w_support_connected {
        return Err(Error::DisconnectedSupport);
    }
    let u = spectrum.eigenbasis.first().ok_or(Error::DegenerateSpectrum)?;
    Ok(edge_quadratic_form(g, u))
}

/// Average of the per-eigenvector supergradients over the whole eigenbasis of
/// `spectrum`. When the cluster is an exact eigenspace this is a convex
/// combination of supergradients, hence itself a supergradient.
pub fn cluster_supergradient(g: &Graph, w: &EdgeWeights, spectrum: &SpectrumReport) -> Result<Vec<f64>> {
    w.check_len(g)?;
    let d = spectrum.eigenbasis.len();
    if d == 0 {
        return Err(Error::DegenerateSpectrum);
    }
    let mut acc = vec![0.0; g.edge_count()];
    for u in &spectrum.eigenbasis {
        for (a, x) in acc.iter_mut().zip(edge_quadratic_form(g, u)) {
            *a += x / d as f64;
        }
    }
    Ok(acc)
}

fn edge_quadratic_form(g: &Graph, u: &[f64]) -> Vec<f64> {
    let q: Vec<f64> = u.iter().zip(g.s()).map(|(x, s)| x / s.sqrt()).collect();
    g.edges().iter().map(|&(i, j)| (q[i] - q[j]).powi(2)).collect()
}

/// Euclidean projection of `x` onto the probability simplex (sort-based).
pub fn project_simplex(x: &[f64]) -> Vec<f64> {
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - 1.0) / (j + 1) as f64;
        if u - candidate > 0.0 {
            tau = candidate;
        }
    }
    x.iter().map(|&v| (v - tau).max(0.0)).collect()
}

/// Projects raw weights onto `{w >= 0 : sum l^2 w = 1}` through the
/// substitution `x = l^2 w`, where the set becomes the probability simplex.
pub fn project_to_feasible(w_raw: &[f64], lengths: &[f64]) -> Result<EdgeWeights> {
    if w_raw.len() != lengths.len() {
        return Err(Error::LengthMismatch { expected: lengths.len(), got: w_raw.len() });
    }
    let x: Vec<f64> = w_raw.iter().zip(lengths).map(|(w, l)| w * l * l).collect();
    let x = project_simplex(&x);
    EdgeWeights::new(x.iter().zip(lengths).map(|(x, l)| x / (l * l)).collect())
}

fn initial_weights(g: &Graph, seed: u64) -> Result<EdgeWeights> {
    let budget: f64 = g.lengths().iter().map(|l| l * l).sum();
    let mut w = vec![1.0 / budget; g.edge_count()];
    if seed != 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for x in w.iter_mut() {
            *x *= 1.0 + 0.1 * (rng.gen::<f64>() - 0.5);
        }
        let cost: f64 = w.iter().zip(g.lengths()).map(|(w, l)| w * l * l).sum();
        w.iter_mut().for_each(|x| *x /= cost);
    }
    EdgeWeights::new(w)
}

/// Projected supergradient ascent from uniform feasible weights.
///
/// Step `t` moves `x = l^2 w` along the cluster-averaged supergradient
/// (taken with respect to `x`) with length `c / sqrt(t)` and projects back
/// onto the budget simplex. The default `c` is `mean(l^2) / max degree`, so
/// scaling every length leaves the iterates in `x` unchanged. The best iterate
/// by `lambda1` is returned. After `10 * ascent_window_decay` iterations the
/// run stops early once the best value has improved by less than `tol` over
/// the last fifth of the iterations.
pub fn maximize_lambda1(g: &Graph, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if g.edge_count() == 0 {
        return Err(Error::Invalid("graph has no edges".into()));
    }
    let l2: Vec<f64> = g.lengths().iter().map(|l| l * l).collect();
    let mean_l2 = l2.iter().sum::<f64>() / l2.len() as f64;
    let scale = cfg.step_scale.unwrap_or(mean_l2 / g.max_degree() as f64);
    let mut w = initial_weights(g, cfg.seed)?;
    let mut best_w = w.clone();
    let mut best = f64::NEG_INFINITY;
    let mut history = Vec::with_capacity(cfg.max_iters);
    let mut stalled = false;

    for t in 1..=cfg.max_iters {
        let shrink = (cfg.ascent_window_decay as f64 / t as f64).min(1.0);
        let window = (cfg.ascent_window * shrink).max(cfg.cluster_tol);
        let spec = first_cluster_relative(g, &w, window)?;
        if spec.lambda1 > best {
            best = spec.lambda1;
            best_w = w.clone();
        }
        history.push(best);
        if t >= 10 * cfg.ascent_window_decay.max(20) && t % 50 == 0 && best - history[t * 4 / 5 - 1] < cfg.tol {
            stalled = true;
            break;
        }
        if t == cfg.max_iters {
            break;
        }
        let grad = cluster_supergradient(g, &w, &spec)?;
        let eta = scale / (t as f64).sqrt();
        // ascend in x = l^2 w, where the budget set is the simplex: dx = eta * g / l^2
        let raw: Vec<f64> =
            w.as_slice().iter().zip(&grad).zip(&l2).map(|((w, g), l2)| w + eta * g / (l2 * l2)).collect();
        w = project_to_feasible(&raw, g.lengths())?;
    }
    let iterations = history.len();
    let converged = stalled || best - history[(iterations * 4 / 5).saturating_sub(1)] < cfg.tol;
    // report the multiplicity-grade value at the returned weights
    let lambda1 = first_nonzero_eigenvalue(g, &best_w, cfg.cluster_tol)?.lambda1;
    Ok(SolveResult { w_star: best_w, lambda1, iterations, best_history: history, converged })
}
