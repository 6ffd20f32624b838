//! Dense numerical kernels: cyclic Jacobi eigensolver for symmetric matrices,
//! Gram-matrix rank, and a two-phase simplex solver for small dense LPs.

use crate::error::{Error, Result};

/// Default off-diagonal tolerance for [`jacobi_eigendecomposition`], relative
/// to the Frobenius norm of the input.
pub const JACOBI_TOL: f64 = 1e-14;
/// Sweep cap for the Jacobi solver.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Default relative tolerance for [`numerical_rank`].
pub const RANK_TOL: f64 = 1e-7;

/// Dense symmetric matrix; only the lower triangle is stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    order: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(order: usize) -> Self {
        Self { order, data: vec![0.0; order * (order + 1) / 2] }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds from full rows. Only the lower triangle is read, after checking
    /// the input is square and exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: row.len() });
            }
            for j in 0..n {
                if row[j] != rows[j][i] {
                    return Err(Error::Invalid(format!("matrix not symmetric at ({i},{j})")));
                }
                if j <= i {
                    m.set(i, j, row[j]);
                }
            }
        }
        Ok(m)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    fn idx(i: usize, j: usize) -> usize {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        hi * (hi + 1) / 2 + lo
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[Self::idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[Self::idx(i, j)] = value;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        self.data[Self::idx(i, j)] += value;
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.order).map(|i| (0..self.order).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.order).map(|i| (0..self.order).map(|j| self.get(i, j) * x[j]).sum()).collect()
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.order)
            .map(|i| (0..self.order).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    /// `vectors[k]` is the eigenvector for `values[k]`.
    pub vectors: Vec<Vec<f64>>,
}

impl EigenDecomposition {
    /// `Q diag(values) Q^T` as full rows.
    pub fn reconstruct(&self) -> Vec<Vec<f64>> {
        let n = self.values.len();
        let mut out = vec![vec![0.0; n]; n];
        for (lam, q) in self.values.iter().zip(&self.vectors) {
            for i in 0..n {
                for j in 0..n {
                    out[i][j] += lam * q[i] * q[j];
                }
            }
        }
        out
    }
}

/// Cyclic Jacobi eigendecomposition.
///
/// Sweeps until the off-diagonal Frobenius norm drops to `tol` times the
/// Frobenius norm of `a`. Fails with [`Error::NoConvergence`] after
/// [`JACOBI_MAX_SWEEPS`] sweeps.
pub fn jacobi_eigendecomposition(a: &SymmetricMatrix, tol: f64) -> Result<EigenDecomposition> {
    if !a.is_finite() {
        return Err(Error::Invalid("matrix has non-finite entries".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    let n = a.order();
    let mut m = a.to_rows();
    let mut q: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(i == j)).collect()).collect();
    let frob = m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let target = tol * frob;

    let mut converged = false;
    for sweep in 0..=JACOBI_MAX_SWEEPS {
        let off = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= target {
            converged = true;
            break;
        }
        if sweep == JACOBI_MAX_SWEEPS {
            break;
        }
        for p in 0..n {
            for r in p + 1..n {
                let apr = m[p][r];
                if apr == 0.0 {
                    continue;
                }
                let (app, arr) = (m[p][p], m[r][r]);
                // negligible against both diagonal entries: drop it
                if sweep > 3 && apr.abs() * 1e18 < app.abs().min(arr.abs()) {
                    m[p][r] = 0.0;
                    m[r][p] = 0.0;
                    continue;
                }
                let theta = (arr - app) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkr = m[k][r];
                    m[k][p] = c * mkp - s * mkr;
                    m[k][r] = s * mkp + c * mkr;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mrk = m[r][k];
                    m[p][k] = c * mpk - s * mrk;
                    m[r][k] = s * mpk + c * mrk;
                }
                m[p][r] = 0.0;
                m[r][p] = 0.0;
                for row in q.iter_mut() {
                    let (qp, qr) = (row[p], row[r]);
                    row[p] = c * qp - s * qr;
                    row[r] = s * qp + c * qr;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: JACOBI_MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i][i].total_cmp(&m[j][j]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| m[i][i]).collect();
    let vectors = order.iter().map(|&c| q.iter().map(|row| row[c]).collect()).collect();
    Ok(EigenDecomposition { values, vectors })
}

/// Dimension of the span of `vectors`, measured on the Gram matrix: the
/// number of its eigenvalues above `tol` times the largest (or times one when
/// every eigenvalue is zero).
pub fn numerical_rank(vectors: &[Vec<f64>], tol: f64) -> Result<usize> {
    let Some(first) = vectors.first() else {
        return Ok(0);
    };
    let dim = first.len();
    if let Some(bad) = vectors.iter().find(|v| v.len() != dim) {
        return Err(Error::LengthMismatch { expected: dim, got: bad.len() });
    }
    let count = vectors.len();
    let gram = if dim <= count {
        let mut g = SymmetricMatrix::zeros(dim);
        for v in vectors {
            for i in 0..dim {
                for j in 0..=i {
                    g.add(i, j, v[i] * v[j]);
                }
            }
        }
        g
    } else {
        let mut g = SymmetricMatrix::zeros(count);
        for i in 0..count {
            for j in 0..=i {
                g.set(i, j, dot(&vectors[i], &vectors[j]));
            }
        }
        g
    };
    let eig = jacobi_eigendecomposition(&gram, JACOBI_TOL)?;
    let largest = eig.values.iter().copied().fold(0.0, f64::max);
    let threshold = tol * if largest > 0.0 { largest } else { 1.0 };
    Ok(eig.values.iter().filter(|&&x| x > threshold).count())
}

/// `maximize c·x  subject to  A x <= b,  x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub c: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    /// Nonnegative multipliers of the rows of `A`; `b·duals == value` at optimality.
    pub duals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(sol) => Some(sol),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new(c: Vec<f64>, a: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch { expected: a.len(), got: b.len() });
        }
        if let Some(row) = a.iter().find(|row| row.len() != c.len()) {
            return Err(Error::LengthMismatch { expected: c.len(), got: row.len() });
        }
        let finite = c.iter().chain(&b).chain(a.iter().flatten()).all(|x| x.is_finite());
        if !finite {
            return Err(Error::Invalid("LP data must be finite".into()));
        }
        Ok(Self { c, a, b })
    }
}

const PIVOT_EPS: f64 = 1e-9;
const RATIO_TIE: f64 = 1e-12;
const CANCEL_EPS: f64 = 1e-13;
/// Relative row slack tolerated in a returned solution before it is rejected.
const FEAS_TOL: f64 = 1e-7;
const MAX_PIVOTS: usize = 100_000;

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.rows[r][self.width]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let p = self.rows[pr][pc];
        for x in self.rows[pr].iter_mut() {
            *x /= p;
        }
        let pivot_row = self.rows[pr].clone();
        for (r, row) in self.rows.iter_mut().enumerate() {
            if r == pr {
                continue;
            }
            let f = row[pc];
            if f != 0.0 {
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    let before = *x;
                    *x -= f * y;
                    // cancellation down to rounding level is an exact zero
                    if x.abs() <= CANCEL_EPS * before.abs().max((f * y).abs()) {
                        *x = 0.0;
                    }
                }
                row[pc] = 0.0;
            }
        }
        self.basis[pr] = pc;
    }

    /// Maximizes `cost·z` over the current basis with Bland's rule. Returns
    /// `false` if unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> Result<bool> {
        for _ in 0..MAX_PIVOTS {
            let entering = (0..self.width).find(|&j| {
                allowed[j] && !self.basis.contains(&j) && {
                    let z: f64 = self.basis.iter().enumerate().map(|(r, &bj)| cost[bj] * self.rows[r][j]).sum();
                    cost[j] - z > PIVOT_EPS
                }
            });
            let Some(j) = entering else {
                return Ok(true);
            };
            // pivots are judged against the column's own scale; among rows
            // tied on the ratio the largest pivot wins, then the lowest basic index
            let col_scale = self.rows.iter().map(|row| row[j].abs()).fold(0.0, f64::max);
            let floor = PIVOT_EPS * col_scale.max(1.0);
            let ratio_of = |r: usize| self.rhs(r).max(0.0) / self.rows[r][j];
            let min_ratio = (0..self.rows.len())
                .filter(|&r| self.rows[r][j] > floor)
                .map(ratio_of)
                .fold(f64::INFINITY, f64::min);
            if min_ratio == f64::INFINITY {
                return Ok(false);
            }
            let tie = min_ratio + RATIO_TIE * min_ratio.max(1.0);
            let mut best: Option<(f64, usize, usize)> = None;
            for r in (0..self.rows.len()).filter(|&r| self.rows[r][j] > floor && ratio_of(r) <= tie) {
                let coef = self.rows[r][j];
                let better = match best {
                    None => true,
                    Some((bc, _, bvar)) => coef > bc * (1.0 + 1e-9) || (coef >= bc * (1.0 - 1e-9) && self.basis[r] < bvar),
                };
                if better {
                    best = Some((coef, r, self.basis[r]));
                }
            }
            let Some((_, r, _)) = best else {
                return Ok(false);
            };
            self.pivot(r, j);
        }
        Err(Error::Invalid(format!("simplex exceeded {MAX_PIVOTS} pivots")))
    }
}

/// Two-phase dense simplex with Bland's anti-cycling rule.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    let m = lp.b.len();
    let nv = lp.c.len();
    let flipped: Vec<bool> = lp.b.iter().map(|&x| x < 0.0).collect();
    let n_art = flipped.iter().filter(|&&f| f).count();
    let width = nv + m + n_art;
    let mut rows = vec![vec![0.0; width + 1]; m];
    let mut basis = vec![0; m];
    let mut art = nv + m;
    for i in 0..m {
        let sign = if flipped[i] { -1.0 } else { 1.0 };
        for j in 0..nv {
            rows[i][j] = sign * lp.a[i][j];
        }
        rows[i][nv + i] = sign;
        rows[i][width] = sign * lp.b[i];
        if flipped[i] {
            rows[i][art] = 1.0;
            basis[i] = art;
            art += 1;
        } else {
            basis[i] = nv + i;
        }
    }
    let mut tab = Tableau { rows, basis, width };
    let is_art = |j: usize| j >= nv + m;

    if n_art > 0 {
        let cost: Vec<f64> = (0..width).map(|j| if is_art(j) { -1.0 } else { 0.0 }).collect();
        let allowed = vec![true; width];
        tab.optimize(&cost, &allowed)?;
        let infeas: f64 = (0..m).filter(|&r| is_art(tab.basis[r])).map(|r| tab.rhs(r)).sum();
        let scale = lp.b.iter().fold(1.0_f64, |acc, x| acc.max(x.abs()));
        if infeas > 1e-9 * scale {
            return Ok(LpOutcome::Infeasible);
        }
        for r in 0..m {
            if is_art(tab.basis[r]) {
                if let Some(j) = (0..nv + m).find(|&j| tab.rows[r][j].abs() > 1e-9) {
                    tab.pivot(r, j);
                }
            }
        }
    }

    let cost: Vec<f64> = (0..width).map(|j| if j < nv { lp.c[j] } else { 0.0 }).collect();
    let allowed: Vec<bool> = (0..width).map(|j| !is_art(j)).collect();
    if !tab.optimize(&cost, &allowed)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut x = vec![0.0; nv];
    for (r, &bj) in tab.basis.iter().enumerate() {
        if bj < nv {
            x[bj] = tab.rhs(r).max(0.0);
        }
    }
    for (row, bi) in lp.a.iter().zip(&lp.b) {
        let lhs = dot(row, &x);
        let scale = row.iter().zip(&x).map(|(a, x)| (a * x).abs()).sum::<f64>() + bi.abs();
        if lhs - bi > FEAS_TOL * scale.max(1.0) {
            return Err(Error::Invalid(format!("simplex lost feasibility: row at {lhs} against bound {bi}")));
        }
    }
    let value = dot(&lp.c, &x);
    let duals = (0..m)
        .map(|i| {
            let col = nv + i;
            let y: f64 = tab.basis.iter().enumerate().map(|(r, &bj)| cost[bj] * tab.rows[r][col]).sum();
            y.max(0.0)
        })
        .collect();
    Ok(LpOutcome::Optimal(LpSolution { x, value, duals }))
}

/// Whether the segment from the origin to `p` meets the convex hull of
/// `hull_points`, decided as an LP feasibility problem with equalities
/// relaxed to `±tol`.
pub fn segment_hull_intersects(p: &[f64], hull_points: &[Vec<f64>], tol: f64) -> Result<bool> {
    if hull_points.is_empty() {
        return Ok(false);
    }
    let d = p.len();
    if let Some(bad) = hull_points.iter().find(|h| h.len() != d) {
        return Err(Error::LengthMismatch { expected: d, got: bad.len() });
    }
    // variables: t, lambda_1..lambda_k
    let k = hull_points.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut t_row = vec![0.0; k + 1];
    t_row[0] = 1.0;
    a.push(t_row);
    b.push(1.0);
    let sum_row: Vec<f64> = std::iter::once(0.0).chain(std::iter::repeat_n(1.0, k)).collect();
    a.push(sum_row.clone());
    b.push(1.0);
    a.push(sum_row.iter().map(|x| -x).collect());
    b.push(-1.0);
    for c in 0..d {
        let row: Vec<f64> = std::iter::once(p[c]).chain(hull_points.iter().map(|h| -h[c])).collect();
        a.push(row.iter().map(|x| -x).collect());
        a.push(row);
        b.push(tol);
        b.push(tol);
    }
    let lp = LinearProgram::new(vec![0.0; k + 1], a, b)?;
    Ok(matches!(solve_lp(&lp)?, LpOutcome::Optimal(_)))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(rows: &[&[f64]]) -> SymmetricMatrix {
        SymmetricMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identity_spectrum() {
        let eig = jacobi_eigendecomposition(&SymmetricMatrix::identity(4), JACOBI_TOL).unwrap();
        assert_eq!(eig.values, vec![1.0; 4]);
    }

    #[test]
    fn two_by_two() {
        let eig = jacobi_eigendecomposition(&sym(&[&[2.0, -1.0], &[-1.0, 2.0]]), JACOBI_TOL).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn single_edge_laplacian() {
        let eig = jacobi_eigendecomposition(&sym(&[&[1.0, -1.0], &[-1.0, 1.0]]), JACOBI_TOL).unwrap();
        assert!(eig.values[0].abs() < 1e-14);
        assert!((eig.values[1] - 2.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((eig.vectors[0][0].abs() - h).abs() < 1e-14);
        assert!((eig.vectors[0][0] - eig.vectors[0][1]).abs() < 1e-14);
        assert!((eig.vectors[1][0] + eig.vectors[1][1]).abs() < 1e-14);
    }

    #[test]
    fn jacobi_rejects_bad_input() {
        let mut m = SymmetricMatrix::identity(2);
        m.set(0, 1, f64::NAN);
        assert!(jacobi_eigendecomposition(&m, JACOBI_TOL).is_err());
        assert!(jacobi_eigendecomposition(&SymmetricMatrix::identity(2), 0.0).is_err());
        assert!(SymmetricMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 1.0]]).is_err());
    }

    #[test]
    fn rank_examples() {
        let collinear = vec![vec![1.0, 2.0], vec![-2.0, -4.0], vec![0.5, 1.0]];
        assert_eq!(numerical_rank(&collinear, RANK_TOL).unwrap(), 1);
        let r = 1.0 / 3f64.sqrt();
        let tri: Vec<Vec<f64>> = (0..3)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / 3.0;
                vec![r * a.cos(), r * a.sin()]
            })
            .collect();
        assert_eq!(numerical_rank(&tri, RANK_TOL).unwrap(), 2);
        assert_eq!(numerical_rank(&[vec![0.0; 3]], RANK_TOL).unwrap(), 0);
        assert_eq!(numerical_rank(&[], RANK_TOL).unwrap(), 0);
    }

    #[test]
    fn lp_examples() {
        let lp = LinearProgram::new(vec![1.0], vec![vec![1.0]], vec![1.0]).unwrap();
        let sol = solve_lp(&lp).unwrap().optimal().unwrap();
        assert_eq!(sol.x, vec![1.0]);
        assert_eq!(sol.value, 1.0);

        let lp = LinearProgram::new(vec![1.0, 1.0], vec![vec![1.0, 1.0], vec![1.0, 0.0]], vec![1.0, 0.3]).unwrap();
        let sol = solve_lp(&lp).unwrap().optimal().unwrap();
        assert!((sol.value - 1.0).abs() < 1e-12);

        let lp = LinearProgram::new(vec![1.0], vec![vec![-1.0], vec![1.0]], vec![-1.0, 0.0]).unwrap();
        assert_eq!(solve_lp(&lp).unwrap(), LpOutcome::Infeasible);

        let lp = LinearProgram::new(vec![1.0, 0.0], vec![vec![0.0, 1.0]], vec![1.0]).unwrap();
        assert_eq!(solve_lp(&lp).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn lp_phase_one_and_duals() {
        // max 3x + 2y  s.t. x + y <= 4, x + 3y <= 6, x >= 1 (as -x <= -1)
        let lp = LinearProgram::new(
            vec![3.0, 2.0],
            vec![vec![1.0, 1.0], vec![1.0, 3.0], vec![-1.0, 0.0]],
            vec![4.0, 6.0, -1.0],
        )
        .unwrap();
        let sol = solve_lp(&lp).unwrap().optimal().unwrap();
        assert!((sol.value - 12.0).abs() < 1e-12);
        let dual_value: f64 = sol.duals.iter().zip(&lp.b).map(|(y, b)| y * b).sum();
        assert!((dual_value - sol.value).abs() < 1e-10);
        assert!((sol.duals[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn lp_rejects_malformed() {
        assert!(LinearProgram::new(vec![1.0], vec![vec![1.0, 2.0]], vec![1.0]).is_err());
        assert!(LinearProgram::new(vec![1.0], vec![vec![1.0]], vec![]).is_err());
        assert!(LinearProgram::new(vec![f64::INFINITY], vec![vec![1.0]], vec![1.0]).is_err());
    }

    #[test]
    fn segment_hull_examples() {
        assert!(segment_hull_intersects(&[1.0, 0.0], &[vec![0.0, 0.0]], 1e-9).unwrap());
        assert!(segment_hull_intersects(&[2.0, 2.0], &[vec![1.0, 0.0], vec![0.0, 1.0]], 1e-9).unwrap());
        assert!(!segment_hull_intersects(&[-1.0, 0.0], &[vec![1.0, 0.0], vec![1.0, 1.0]], 1e-9).unwrap());
    }
}
