use proptest::prelude::*;

use rotdim::embedding::{embedding_objective, extract_embedding_detailed};
use rotdim::families::{analytic_gmk, analytic_kn_minus_edge, clique_number, is_chordal};
use rotdim::graph::MinorOp;
use rotdim::io::{graph_from_json, graph_to_json};
use rotdim::linalg::{numerical_rank, RANK_TOL};
use rotdim::optimizer::{maximize_lambda1, project_simplex};
use rotdim::spectral::{first_nonzero_eigenvalue, null_direction, CLUSTER_TOL};
use rotdim::{EdgeWeights, Graph, SolverConfig};

/// Connected graph on 3..=7 vertices (a spanning path plus random chords)
/// with random vertex weights, lengths and positive edge weights.
fn weighted_graph() -> impl Strategy<Value = (Graph, Vec<f64>)> {
    (3usize..=7).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let m = pairs.len();
        (
            proptest::collection::vec(any::<bool>(), m),
            proptest::collection::vec(0.5f64..2.0, n),
            proptest::collection::vec(0.5f64..2.0, m),
            proptest::collection::vec(0.05f64..1.0, m),
        )
            .prop_map(move |(keep, s, l, w)| {
                let chosen: Vec<usize> = (0..m).filter(|&k| keep[k] || pairs[k].1 == pairs[k].0 + 1).collect();
                let edges: Vec<_> = chosen.iter().map(|&k| pairs[k]).collect();
                let lengths: Vec<f64> = chosen.iter().map(|&k| l[k]).collect();
                let weights: Vec<f64> = chosen.iter().map(|&k| w[k]).collect();
                (Graph::new(n, &edges, s.clone(), lengths).unwrap(), weights)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn weak_duality((g, w) in weighted_graph()) {
        let w = EdgeWeights::new(w).unwrap();
        let w = w.scaled(1.0 / w.cost(&g)).unwrap();
        let spec = first_nonzero_eigenvalue(&g, &w, CLUSTER_TOL).unwrap();
        let ex = extract_embedding_detailed(&g, &w, &spec).unwrap();
        let obj = embedding_objective(&g, &ex.embedding).unwrap();
        prop_assert!(obj * spec.lambda1 <= 1.0 + 1e-6);
        prop_assert!((obj - ex.objective).abs() <= 1e-10 * obj.max(1.0));
        prop_assert!(ex.objective <= ex.upper_bound * (1.0 + 1e-9));
        let rank = numerical_rank(ex.embedding.coords(), RANK_TOL).unwrap();
        prop_assert!(rank <= spec.multiplicity);
    }

    #[test]
    fn extraction_is_feasible_and_balanced((g, w) in weighted_graph()) {
        let w = EdgeWeights::new(w).unwrap();
        let spec = first_nonzero_eigenvalue(&g, &w, CLUSTER_TOL).unwrap();
        let ex = extract_embedding_detailed(&g, &w, &spec).unwrap();
        let v = &ex.embedding;
        for (k, &(i, j)) in g.edges().iter().enumerate() {
            let d: f64 = v.point(i).iter().zip(v.point(j)).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            prop_assert!(d <= g.lengths()[k] + 1e-8);
        }
        for c in 0..v.dim() {
            let s: f64 = (0..g.n()).map(|i| g.s()[i] * v.point(i)[c]).sum();
            prop_assert!(s.abs() < 1e-8);
        }
    }

    #[test]
    fn eigenbasis_is_orthonormal_and_avoids_the_null_direction((g, w) in weighted_graph()) {
        let spec = first_nonzero_eigenvalue(&g, &EdgeWeights::new(w).unwrap(), CLUSTER_TOL).unwrap();
        let z = null_direction(&g);
        for (a, u) in spec.eigenbasis.iter().enumerate() {
            let zu: f64 = z.iter().zip(u).map(|(x, y)| x * y).sum();
            prop_assert!(zu.abs() < 1e-9);
            for v in &spec.eigenbasis[a..] {
                let d: f64 = u.iter().zip(v).map(|(x, y)| x * y).sum();
                let want = if std::ptr::eq(u, v) { 1.0 } else { 0.0 };
                prop_assert!((d - want).abs() < 1e-9);
            }
        }
        prop_assert!(spec.lambda1 > 0.0);
    }

    #[test]
    fn clique_number_drops_by_at_most_one_under_edge_deletion((g, _w) in weighted_graph(), pick in any::<prop::sample::Index>()) {
        let (a, b) = g.edges()[pick.index(g.edge_count())];
        let h = g.minor(MinorOp::DeleteEdge(a, b)).unwrap();
        let (wg, wh) = (clique_number(&g).unwrap(), clique_number(&h).unwrap());
        prop_assert!(wh <= wg && wg <= wh + 1);
    }

    #[test]
    fn contraction_keeps_total_vertex_weight((g, _w) in weighted_graph(), pick in any::<prop::sample::Index>()) {
        let (a, b) = g.edges()[pick.index(g.edge_count())];
        let h = g.minor(MinorOp::ContractEdge(a, b)).unwrap();
        prop_assert_eq!(h.n(), g.n() - 1);
        prop_assert!((h.s().iter().sum::<f64>() - g.s().iter().sum::<f64>()).abs() < 1e-12);
        prop_assert!(h.is_connected());
    }

    #[test]
    fn chordal_orderings_are_perfect((g, _w) in weighted_graph()) {
        if let (true, Some(order)) = is_chordal(&g) {
            let mut pos = vec![0; g.n()];
            for (p, &v) in order.iter().enumerate() {
                pos[v] = p;
            }
            for &v in &order {
                let later: Vec<usize> = g.neighbors(v).iter().map(|&(u, _)| u).filter(|&u| pos[u] > pos[v]).collect();
                for (i, &x) in later.iter().enumerate() {
                    for &y in &later[i + 1..] {
                        prop_assert!(g.has_edge(x, y));
                    }
                }
            }
        }
    }

    #[test]
    fn graph_json_round_trips((g, _w) in weighted_graph()) {
        prop_assert_eq!(graph_from_json(&graph_to_json(&g)).unwrap(), g);
    }

    #[test]
    fn simplex_projection_is_the_nearest_point(x in proptest::collection::vec(-2.0f64..2.0, 1..8), t in 0.0f64..1.0) {
        let p = project_simplex(&x);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // any other simplex point, here a mix of p and a vertex, is no closer
        let mut other: Vec<f64> = p.iter().map(|v| (1.0 - t) * v).collect();
        other[0] += t;
        let d = |y: &[f64]| x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        prop_assert!(d(&p) <= d(&other) + 1e-12);
    }
}

/// Orthogonal matrix from a Householder product of random vectors.
fn rotation(d: usize, seeds: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut q: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for h in seeds {
        let nn: f64 = h.iter().map(|x| x * x).sum();
        if nn < 1e-6 {
            continue;
        }
        for row in q.iter_mut() {
            let p: f64 = row.iter().zip(h).map(|(a, b)| a * b).sum();
            for (x, hv) in row.iter_mut().zip(h) {
                *x -= 2.0 * p / nn * hv;
            }
        }
    }
    q
}

fn point_cloud() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    (1usize..=6, 1usize..=6, 2usize..=8).prop_flat_map(|(d, r, n)| {
        let r = r.min(d);
        (
            proptest::collection::vec(proptest::collection::vec(-2.0f64..2.0, r), n),
            proptest::collection::vec(proptest::collection::vec(-1.0f64..1.0, d), r),
            proptest::collection::vec(proptest::collection::vec(-1.0f64..1.0, d), 3),
        )
            .prop_map(|(coef, basis, hs)| {
                // n points in the span of r random directions of R^d
                let pts = coef
                    .iter()
                    .map(|c| (0..basis[0].len()).map(|j| c.iter().zip(&basis).map(|(a, b)| a * b[j]).sum()).collect())
                    .collect();
                (pts, hs)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn rank_is_rotation_invariant((pts, hs) in point_cloud()) {
        let d = pts[0].len();
        let q = rotation(d, &hs);
        let turned: Vec<Vec<f64>> =
            pts.iter().map(|p| (0..d).map(|j| p.iter().zip(&q).map(|(x, row)| x * row[j]).sum()).collect()).collect();
        prop_assert_eq!(numerical_rank(&pts, RANK_TOL).unwrap(), numerical_rank(&turned, RANK_TOL).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, failure_persistence: None, ..ProptestConfig::default() })]

    // each solve brackets the optimum between lambda1(w) and 1 / objective(v);
    // scaling lengths by c must scale the bracket by 1 / c^2
    #[test]
    fn scaling_lengths_scales_the_optimum((g, _w) in weighted_graph(), c in 0.5f64..3.0) {
        let bracket = |g: &Graph| {
            let res = maximize_lambda1(g, &SolverConfig { max_iters: 3000, ..SolverConfig::default() }).unwrap();
            let spec = first_nonzero_eigenvalue(g, &res.w_star, 1e-3).unwrap();
            let ex = extract_embedding_detailed(g, &res.w_star, &spec).unwrap();
            (res.lambda1, 1.0 / embedding_objective(g, &ex.embedding).unwrap())
        };
        let (lo, hi) = bracket(&g);
        let (lo_c, hi_c) = bracket(&g.scale_lengths(c).unwrap());
        let (lo_c, hi_c) = (lo_c * c * c, hi_c * c * c);
        prop_assert!(lo <= hi * (1.0 + 1e-6) && lo_c <= hi_c * (1.0 + 1e-6));
        prop_assert!(lo <= hi_c * (1.0 + 1e-6), "{lo} above scaled bound {hi_c}");
        prop_assert!(lo_c <= hi * (1.0 + 1e-6), "scaled {lo_c} above bound {hi}");
    }
}

#[test]
fn closed_form_lambda_identity() {
    for m in 3..=9 {
        assert_eq!(analytic_gmk(m, 2).unwrap().lambda1, analytic_kn_minus_edge(m + 2).unwrap().lambda1);
    }
}
