use serde::Serialize;

use rotdim::embedding::{extract_embedding_detailed, kkt_residuals, separator_shadow_check, KktReport};
use rotdim::families::{identify_family, invariant_bounds, low_rotdim_class, Family, LowRotdimClass};
use rotdim::linalg::numerical_rank;
use rotdim::optimizer::maximize_lambda1;
use rotdim::spectral::first_nonzero_eigenvalue;
use rotdim::{Embedding, Graph, Result, SolverConfig};

pub const SCHEMA: &str = "1";

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub schema: &'static str,
    /// Input echo in the graph file format.
    pub graph: serde_json::Value,
    pub input: InputSummary,
    pub solver: SolverSection,
    pub spectrum: SpectrumSection,
    pub embedding: EmbeddingSection,
    pub kkt: KktSection,
    pub bounds: BoundsSection,
    /// Only present for recognized families; bounds never count as claims.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySection>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputSummary {
    pub n: usize,
    pub edge_count: usize,
    pub unit_parameters: bool,
    pub s_min: f64,
    pub s_max: f64,
    pub l_min: f64,
    pub l_max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverSection {
    pub lambda1: f64,
    pub iterations: usize,
    pub converged: bool,
    pub weight_cost: f64,
    /// Aligned with the edges of the input echo.
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSection {
    pub cluster_tol: f64,
    pub multiplicity: usize,
    pub cluster_values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingSection {
    /// Numerical rank at `rank_tol`.
    pub dimension: usize,
    pub rank_tol: f64,
    pub objective: f64,
    pub duality_gap: f64,
    pub extraction_exact: bool,
    pub extraction_upper_bound: f64,
    pub beta: Vec<f64>,
    /// One row per vertex, in input order.
    pub coords: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct KktSection {
    pub slackness: f64,
    pub stationarity: f64,
    pub equilibrium: f64,
    pub distance_violation: f64,
    pub weight_feasibility: f64,
}

impl From<KktReport> for KktSection {
    fn from(r: KktReport) -> Self {
        Self {
            slackness: r.slackness,
            stationarity: r.stationarity,
            equilibrium: r.equilibrium,
            distance_violation: r.distance_violation,
            weight_feasibility: r.weight_feasibility,
        }
    }
}

impl KktSection {
    pub fn named(&self) -> [(&'static str, f64); 5] {
        [
            ("slackness", self.slackness),
            ("stationarity", self.stationarity),
            ("equilibrium", self.equilibrium),
            ("distance_violation", self.distance_violation),
            ("weight_feasibility", self.weight_feasibility),
        ]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsSection {
    pub clique_number: usize,
    pub chordal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub treewidth: Option<usize>,
    pub lower: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<usize>,
    pub low_rotdim_class: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilySection {
    pub name: &'static str,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub analytic_lambda1: f64,
    pub lambda1_delta: f64,
    /// Largest per-edge gap between numeric and analytic weights, after
    /// mapping the input labels onto the family layout.
    pub weight_max_delta: f64,
    pub analytic_dim: usize,
    pub rank_agreement: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rotdim_claim: Option<usize>,
    pub analytic_kkt_max: f64,
}

pub struct Pipeline {
    pub report: AnalysisReport,
    pub embedding: Embedding,
}

pub struct Options {
    pub solver: SolverConfig,
    pub rank_tol: f64,
    pub cluster_tol: f64,
}

fn class_name(c: LowRotdimClass) -> &'static str {
    match c {
        LowRotdimClass::Edgeless => "edgeless",
        LowRotdimClass::DisjointPaths => "disjoint_paths",
        LowRotdimClass::Other => "other",
    }
}

fn family_section(g: &Graph, fam: Family, perm: &[usize], weights: &[f64], lambda1: f64, dim: usize) -> Result<FamilySection> {
    let sol = fam.analytic()?;
    let mut weight_max_delta: f64 = 0.0;
    for (e, &(i, j)) in g.edges().iter().enumerate() {
        let k = sol.graph.edge_index(perm[i], perm[j]).expect("family relabeling preserves edges");
        weight_max_delta = weight_max_delta.max((weights[e] - sol.w[k]).abs());
    }
    let (m, k) = match fam {
        Family::Complete { .. } => (None, None),
        Family::KnMinusEdge { n } => (Some(n - 2), Some(2)),
        Family::Gmk { m, k } => (Some(m), Some(k)),
        Family::G23 => (Some(2), Some(3)),
    };
    Ok(FamilySection {
        name: fam.name(),
        n: g.n(),
        m,
        k,
        analytic_lambda1: sol.lambda1,
        lambda1_delta: lambda1 - sol.lambda1,
        weight_max_delta,
        analytic_dim: sol.claimed_dim,
        rank_agreement: dim == sol.claimed_dim,
        rotdim_claim: sol.rotdim_claim,
        analytic_kkt_max: sol.kkt()?.max(),
    })
}

/// Solve, extract, certify and bound.
pub fn analyze(g: &Graph, opts: &Options) -> Result<Pipeline> {
    let solve = maximize_lambda1(g, &opts.solver)?;
    let spectrum = first_nonzero_eigenvalue(g, &solve.w_star, opts.cluster_tol)?;
    let ex = extract_embedding_detailed(g, &solve.w_star, &spectrum)?;
    let dimension = numerical_rank(ex.embedding.coords(), opts.rank_tol)?;
    let kkt = kkt_residuals(g, &solve.w_star, &ex.embedding, solve.lambda1)?;
    let bounds = invariant_bounds(g)?;
    let weights = solve.w_star.as_slice().to_vec();
    let family = match identify_family(g) {
        Some((fam, perm)) => Some(family_section(g, fam, &perm, &weights, solve.lambda1, dimension)?),
        None => None,
    };
    let fold = |xs: &[f64], f: fn(f64, f64) -> f64, init: f64| xs.iter().copied().fold(init, f);
    let report = AnalysisReport {
        schema: SCHEMA,
        graph: rotdim::io::graph_to_json_value(g),
        input: InputSummary {
            n: g.n(),
            edge_count: g.edge_count(),
            unit_parameters: g.has_unit_parameters(),
            s_min: fold(g.s(), f64::min, f64::INFINITY),
            s_max: fold(g.s(), f64::max, 0.0),
            l_min: fold(g.lengths(), f64::min, f64::INFINITY),
            l_max: fold(g.lengths(), f64::max, 0.0),
        },
        solver: SolverSection {
            lambda1: solve.lambda1,
            iterations: solve.iterations,
            converged: solve.converged,
            weight_cost: solve.w_star.cost(g),
            weights,
        },
        spectrum: SpectrumSection {
            cluster_tol: opts.cluster_tol,
            multiplicity: spectrum.multiplicity,
            cluster_values: spectrum.cluster_values.clone(),
        },
        embedding: EmbeddingSection {
            dimension,
            rank_tol: opts.rank_tol,
            objective: ex.objective,
            duality_gap: (ex.objective * solve.lambda1 - 1.0).abs(),
            extraction_exact: ex.exact,
            extraction_upper_bound: ex.upper_bound,
            beta: ex.beta.clone(),
            coords: ex.embedding.coords().to_vec(),
        },
        kkt: kkt.into(),
        bounds: BoundsSection {
            clique_number: bounds.clique_number,
            chordal: bounds.chordal,
            treewidth: bounds.treewidth,
            lower: bounds.lower,
            upper: bounds.upper,
            low_rotdim_class: class_name(low_rotdim_class(g)),
        },
        family,
    };
    Ok(Pipeline { report, embedding: ex.embedding })
}

#[derive(Debug, Clone, Serialize)]
pub struct Verification {
    pub certified: bool,
    pub cert_tol: f64,
    pub lambda1: f64,
    pub residuals: KktSection,
    pub failing: Vec<&'static str>,
    /// Index (0-based, in order of smallest vertex) of the component passing
    /// the separator shadow check; absent when no separator was given or
    /// none passes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shadow_component: Option<usize>,
    pub separator_checked: bool,
}

pub fn certify(
    g: &Graph,
    w: &rotdim::EdgeWeights,
    v: &Embedding,
    lambda1: f64,
    separator: Option<&[usize]>,
    cert_tol: f64,
) -> Result<Verification> {
    let residuals: KktSection = kkt_residuals(g, w, v, lambda1)?.into();
    let mut failing: Vec<&'static str> =
        residuals.named().into_iter().filter(|(_, r)| !(*r < cert_tol)).map(|(name, _)| name).collect();
    let mut shadow_component = None;
    if let Some(set) = separator {
        let sep = g.components_after_removal(set)?;
        shadow_component = separator_shadow_check(g, &sep, v, cert_tol)?;
        if shadow_component.is_none() {
            failing.push("separator_shadow");
        }
    }
    Ok(Verification {
        certified: failing.is_empty(),
        cert_tol,
        lambda1,
        residuals,
        failing,
        shadow_component,
        separator_checked: separator.is_some(),
    })
}
