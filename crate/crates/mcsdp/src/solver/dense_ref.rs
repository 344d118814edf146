//! Dense reference interior-point solver. Same framework and direction as
//! the matrix-completion solver, but with fully dense iterates and plain
//! dense linear algebra throughout. Used as the correctness oracle; not
//! meant for large problems.

use std::time::Instant;

use crate::dense::{
    dense_cholesky, inverse_lower_triangular, DenseLowerTriangular, DenseSymMatrix,
};
use crate::problem::SdpProblem;
use crate::scheduler;
use crate::solver::{
    relative_gap, solve_sce, PhaseTimings, Residuals, SolveReport, SolveStatus, SolverError,
    SolverParams,
};

pub struct DenseSolver {
    params: SolverParams,
    prob: SdpProblem,
}

pub struct DenseSolution {
    pub report: SolveReport,
    pub x: DenseSymMatrix,
    pub z: Vec<f64>,
}

struct State {
    x: DenseSymMatrix,
    y: DenseSymMatrix,
    z: Vec<f64>,
    mu: f64,
    pobj: f64,
    dobj: f64,
    res: Residuals,
}

/// Largest step keeping `A + α D` factorizable, by halving plus bisection;
/// mirrors the sparse dual line search.
fn cone_step_length(a: &DenseSymMatrix, d: &DenseSymMatrix) -> Option<f64> {
    let n = a.dim();
    let min_step = 1.0 / (1u64 << 30) as f64;
    let feasible = |alpha: f64| -> bool {
        let mut t = DenseSymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                t.set(i, j, a.get(i, j) + alpha * d.get(i, j));
            }
        }
        dense_cholesky(&t).is_ok()
    };
    let mut alpha = 1.0;
    let mut last_fail = None;
    loop {
        if feasible(alpha) {
            break;
        }
        last_fail = Some(alpha);
        alpha *= 0.5;
        if alpha < min_step {
            return None;
        }
    }
    let Some(mut hi) = last_fail else {
        return Some(1.0);
    };
    let mut lo = alpha;
    for _ in 0..12 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

impl DenseSolver {
    pub fn new(problem: &SdpProblem, params: SolverParams) -> Result<Self, SolverError> {
        params.validate().map_err(SolverError::BadParams)?;
        Ok(Self {
            params,
            prob: problem.clone(),
        })
    }

    fn residuals_of(&self, st: &mut State) {
        let m = self.prob.m;
        st.pobj = self.prob.objective().bullet_dense(&st.x);
        st.dobj = self.prob.b.iter().zip(&st.z).map(|(b, z)| b * z).sum();
        let primal = (0..m)
            .map(|k| (self.prob.b[k] - self.prob.constraint(k).bullet_dense(&st.x)).abs())
            .fold(0.0f64, f64::max);
        let g = self.dual_residual(&st.z, &st.y);
        st.res = Residuals {
            primal_infeas: primal,
            dual_infeas: g.max_abs(),
            rel_gap: relative_gap(st.pobj, st.dobj),
        };
    }

    /// `G = A0 - sum_k Ak zk - Y` as a dense matrix.
    fn dual_residual(&self, z: &[f64], y: &DenseSymMatrix) -> DenseSymMatrix {
        let n = self.prob.n;
        let mut g = DenseSymMatrix::zeros(n);
        for (i, j, v) in self.prob.objective().full_triplets() {
            if i >= j {
                g.set(i, j, v);
            }
        }
        for (k, zk) in z.iter().enumerate() {
            if *zk != 0.0 {
                for (i, j, v) in self.prob.constraint(k).full_triplets() {
                    if i >= j {
                        g.set(i, j, g.get(i, j) - zk * v);
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..=i {
                g.set(i, j, g.get(i, j) - y.get(i, j));
            }
        }
        g
    }

    /// Dense inverse via the Cholesky factor.
    fn spd_inverse(l: &DenseLowerTriangular) -> DenseSymMatrix {
        let n = l.dim();
        let linv = inverse_lower_triangular(l).expect("positive diagonal");
        let mut out = DenseSymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = 0.0;
                for k in i..n {
                    s += linv.get(k, i) * linv.get(k, j);
                }
                out.set(i, j, s);
            }
        }
        out
    }

    fn step(
        &self,
        st: &State,
        iteration: usize,
        timings: &mut PhaseTimings,
        max_sce_residual: &mut f64,
    ) -> Result<State, SolverError> {
        let n = self.prob.n;
        let m = self.prob.m;
        let beta_mu = self.params.beta * st.mu;

        let ly = dense_cholesky(&st.y).map_err(|e| SolverError::Breakdown {
            iteration,
            detail: format!("dual iterate: {e}"),
        })?;
        let yinv = Self::spd_inverse(&ly);
        let g = self.dual_residual(&st.z, &st.y);

        // S-ELEMENTS: same column-wise evaluation as the sparse solver,
        // with dense X and Y^{-1}.
        let t0 = Instant::now();
        let mut b = DenseSymMatrix::zeros(m);
        let mut rhs = vec![0.0; m];
        let mut v1 = vec![0.0; n];
        let mut v2 = vec![0.0; n];
        for j in 0..m {
            let aj = self.prob.constraint(j);
            let mut ghat = 0.0;
            for &k in aj.nonzero_cols() {
                for i in 0..n {
                    v1[i] = st.x.get(i, k);
                }
                v2.fill(0.0);
                for &(r, v) in aj.col(k) {
                    for i in 0..n {
                        v2[i] += yinv.get(i, r) * v;
                    }
                }
                ghat += beta_mu * v2[k];
                let mut adot = 0.0;
                for &(r, v) in aj.col(k) {
                    adot += v * v1[r];
                }
                ghat -= adot;
                let gv2 = g.apply(&v2);
                let mut v1gv2 = 0.0;
                for (a, c) in v1.iter().zip(&gv2) {
                    v1gv2 += a * c;
                }
                ghat -= v1gv2;
                for i in j..m {
                    let add = self.prob.constraint(i).quadratic_form(&v1, &v2);
                    b.set(i, j, b.get(i, j) + add);
                }
            }
            let pj = self.prob.b[j] - aj.bullet_dense(&st.x);
            rhs[j] = pj - ghat;
        }
        timings.s_elements += t0.elapsed();

        let t0 = Instant::now();
        let inner = scheduler::effective_inner_threads(self.params.threads);
        let (dz, sce_res) = solve_sce(&b, &rhs, inner).map_err(|e| SolverError::Breakdown {
            iteration,
            detail: format!("Schur complement equation: {e}"),
        })?;
        timings.s_cholesky += t0.elapsed();
        *max_sce_residual = max_sce_residual.max(sce_res);

        // dY = G - sum_k Ak dzk.
        let mut dy = g.clone();
        for (k, dzk) in dz.iter().enumerate() {
            if *dzk != 0.0 {
                for (i, j, v) in self.prob.constraint(k).full_triplets() {
                    if i >= j {
                        dy.set(i, j, dy.get(i, j) - dzk * v);
                    }
                }
            }
        }

        // P-MATRIX: dX = βμ Y^{-1} - X - X dY Y^{-1}, then symmetrize.
        let t0 = Instant::now();
        let mut dx = DenseSymMatrix::zeros(n);
        // T = dY * Yinv, column by column; dXhat column k needs X * T e_k.
        for k in 0..n {
            let yk: Vec<f64> = (0..n).map(|i| yinv.get(i, k)).collect();
            let t = dy.apply(&yk);
            let xt = st.x.apply(&t);
            for i in 0..n {
                let v = beta_mu * yk[i] - st.x.get(i, k) - xt[i];
                // Accumulate (dXhat + dXhatᵀ) / 2 without storing dXhat.
                if i >= k {
                    dx.set(i, k, dx.get(i, k) + 0.5 * v);
                } else {
                    dx.set(k, i, dx.get(k, i) + 0.5 * v);
                }
            }
        }
        timings.p_matrix += t0.elapsed();

        let alpha_p = cone_step_length(&st.x, &dx).ok_or(SolverError::StepTooSmall { iteration })?;
        let alpha_d = cone_step_length(&st.y, &dy).ok_or(SolverError::StepTooSmall { iteration })?;

        let gp = self.params.gamma * alpha_p;
        let gd = self.params.gamma * alpha_d;
        let mut x = st.x.clone();
        let mut y = st.y.clone();
        for i in 0..n {
            for j in 0..=i {
                x.set(i, j, x.get(i, j) + gp * dx.get(i, j));
                y.set(i, j, y.get(i, j) + gd * dy.get(i, j));
            }
        }
        let mut z = st.z.clone();
        for (zv, dv) in z.iter_mut().zip(&dz) {
            *zv += gd * dv;
        }
        let mu = x.dot(&y) / n as f64;
        let mut next = State {
            x,
            y,
            z,
            mu,
            pobj: 0.0,
            dobj: 0.0,
            res: Residuals {
                primal_infeas: 0.0,
                dual_infeas: 0.0,
                rel_gap: 0.0,
            },
        };
        self.residuals_of(&mut next);
        Ok(next)
    }

    pub fn solve(&self) -> Result<DenseSolution, SolverError> {
        let start = Instant::now();
        let mut timings = PhaseTimings::default();
        let mut max_sce_residual = 0.0f64;
        let lambda = self.params.initial_lambda(&self.prob);
        let n = self.prob.n;
        let mut st = State {
            x: DenseSymMatrix::scaled_identity(n, lambda),
            y: DenseSymMatrix::scaled_identity(n, lambda),
            z: vec![0.0; self.prob.m],
            mu: lambda * lambda,
            pobj: 0.0,
            dobj: 0.0,
            res: Residuals {
                primal_infeas: 0.0,
                dual_infeas: 0.0,
                rel_gap: 0.0,
            },
        };
        self.residuals_of(&mut st);
        let mut iterations = 0;
        let mut status = SolveStatus::MaxIterations;
        while iterations < self.params.max_iter {
            if st.res.converged(self.params.epsilon) {
                status = SolveStatus::Converged;
                break;
            }
            st = self.step(&st, iterations, &mut timings, &mut max_sce_residual)?;
            iterations += 1;
        }
        if st.res.converged(self.params.epsilon) {
            status = SolveStatus::Converged;
        }
        timings.total = start.elapsed();
        Ok(DenseSolution {
            report: SolveReport {
                status,
                iterations,
                primal_objective: st.pobj,
                dual_objective: st.dobj,
                residuals: st.res,
                timings,
                threads: self.params.threads,
                max_sce_residual,
            },
            x: st.x,
            z: st.z,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::SparseSymMat;

    #[test]
    fn scalar_problem_converges_to_four() {
        let a0 = SparseSymMat::from_lower_triplets(1, &[(0, 0, 2.0)]);
        let a1 = SparseSymMat::from_lower_triplets(1, &[(0, 0, 3.0)]);
        let p = SdpProblem::new(1, vec![a0, a1], vec![6.0]);
        let solver = DenseSolver::new(&p, SolverParams::default()).unwrap();
        let sol = solver.solve().unwrap();
        assert_eq!(sol.report.status, SolveStatus::Converged);
        assert!((sol.report.primal_objective - 4.0).abs() < 1e-6);
        assert!((sol.x.get(0, 0) - 2.0).abs() < 1e-6);
    }

    #[test]
    fn maxcut_single_edge() {
        use crate::generators::{maxcut_sdp, Graph};
        let g = Graph::from_edges(2, [(0, 1)]);
        let p = maxcut_sdp(&g, &[1.0]);
        let solver = DenseSolver::new(&p, SolverParams::default()).unwrap();
        let sol = solver.solve().unwrap();
        assert_eq!(sol.report.status, SolveStatus::Converged);
        assert!((sol.report.primal_objective + 4.0).abs() < 1e-5);
        assert!((sol.x.get(0, 1) + 1.0).abs() < 1e-4);
    }

    #[test]
    fn duplicate_constraints_break_down() {
        let a0 = SparseSymMat::from_lower_triplets(2, &[(0, 0, 1.0), (1, 1, 1.0)]);
        let a1 = SparseSymMat::from_lower_triplets(2, &[(0, 0, 1.0)]);
        let p = SdpProblem::new(2, vec![a0, a1.clone(), a1], vec![1.0, 1.0]);
        let solver = DenseSolver::new(&p, SolverParams::default()).unwrap();
        assert!(matches!(
            solver.solve(),
            Err(SolverError::Breakdown { .. })
        ));
    }
}
