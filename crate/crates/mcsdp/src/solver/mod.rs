//! Primal-dual interior-point solvers.
//!
//! [`mc::McSolver`] is the matrix-completion solver: the primal iterate
//! lives only on the extended sparsity pattern and all formulas go through
//! the factored completion. [`dense_ref::DenseSolver`] is the dense
//! reference implementation of the same framework, kept as an oracle.
//!
//! Both follow the framework: from a strictly interior point, compute the
//! HKM direction through the Schur complement equation `B dz = g`, take
//! damped steps that keep both iterates in the cone, and stop when primal
//! infeasibility, dual infeasibility, and the relative duality gap are all
//! below tolerance.

pub mod dense_ref;
pub mod mc;

use std::time::Duration;

use thiserror::Error;

use crate::dense::{
    dense_cholesky_threaded, triangular_solve, DenseError, DenseSymMatrix, SolveMode,
};
use crate::problem::SdpProblem;
use crate::scheduler::WorkerPanic;
use crate::sparse::SparseError;

/// Interior-point parameters. `lambda0 = None` scales the identity start
/// to the problem data; `threads` is the worker count for the column
/// phases (the library default is 1, the CLI defaults to the machine).
#[derive(Debug, Clone)]
pub struct SolverParams {
    pub beta: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub lambda0: Option<f64>,
    pub max_iter: usize,
    pub threads: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            beta: 0.2,
            gamma: 0.9,
            epsilon: 1e-7,
            lambda0: None,
            max_iter: 200,
            threads: 1,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err("beta must be in (0, 1)".into());
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err("gamma must be in (0, 1)".into());
        }
        if !(self.epsilon > 0.0) {
            return Err("epsilon must be positive".into());
        }
        if let Some(l) = self.lambda0 {
            if !(l > 0.0) {
                return Err("lambda0 must be positive".into());
            }
        }
        Ok(())
    }

    /// Initial-point scale: `100 * max(1, max_k |b_k|, max_k ‖A_k‖_max)`
    /// unless overridden.
    pub fn initial_lambda(&self, problem: &SdpProblem) -> f64 {
        self.lambda0.unwrap_or(100.0 * problem.data_scale())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    pub primal_infeas: f64,
    pub dual_infeas: f64,
    pub rel_gap: f64,
}

impl Residuals {
    pub fn converged(&self, epsilon: f64) -> bool {
        self.primal_infeas <= epsilon && self.dual_infeas <= epsilon && self.rel_gap <= epsilon
    }
}

/// Relative duality gap `|p - d| / max(1, (|p| + |d|) / 2)`.
pub fn relative_gap(pobj: f64, dobj: f64) -> f64 {
    (pobj - dobj).abs() / f64::max(1.0, (pobj.abs() + dobj.abs()) / 2.0)
}

/// Wall-clock breakdown of a solve, following the classic taxonomy:
/// Schur-complement element evaluation, its Cholesky factorization, the
/// primal direction matrix, and everything else. The `sub_*` entries are
/// the per-worker average time spent inside triangular substitutions
/// during the corresponding phase.
#[derive(Debug, Clone, Copy, Default)]
pub struct PhaseTimings {
    pub s_elements: Duration,
    pub s_cholesky: Duration,
    pub p_matrix: Duration,
    pub sub_s_elements: Duration,
    pub sub_p_matrix: Duration,
    pub total: Duration,
}

impl PhaseTimings {
    pub fn other(&self) -> Duration {
        self.total
            .saturating_sub(self.s_elements)
            .saturating_sub(self.s_cholesky)
            .saturating_sub(self.p_matrix)
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub iterations: usize,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub residuals: Residuals,
    pub timings: PhaseTimings,
    pub threads: usize,
    /// Worst relative Schur-complement-equation residual observed.
    pub max_sce_residual: f64,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("chordal analysis failed: {0}")]
    Structure(#[from] SparseError),
    #[error("numerical breakdown at iteration {iteration}: {detail}")]
    Breakdown { iteration: usize, detail: String },
    #[error("dual step length underflowed at iteration {iteration}")]
    StepTooSmall { iteration: usize },
    #[error(transparent)]
    Worker(#[from] WorkerPanic),
    #[error("invalid parameters: {0}")]
    BadParams(String),
}

/// Target relative residual for the Schur complement equation.
pub const SCE_RESIDUAL_RTOL: f64 = 1e-9;

/// Solves the Schur complement equation `B dz = g` by dense Cholesky with
/// a few rounds of iterative refinement. Returns the solution and the
/// final relative residual `‖B dz - g‖ / ‖g‖`.
pub fn solve_sce(
    b: &DenseSymMatrix,
    g: &[f64],
    threads: usize,
) -> Result<(Vec<f64>, f64), DenseError> {
    let m = b.dim();
    assert_eq!(g.len(), m);
    let l = dense_cholesky_threaded(b, threads)?;
    let solve = |rhs: &[f64]| -> Vec<f64> {
        let half = triangular_solve(&l, rhs, SolveMode::Forward).expect("positive diagonal");
        triangular_solve(&l, &half, SolveMode::Backward).expect("positive diagonal")
    };
    let mut dz = solve(g);
    let norm_g = g.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let mut ratio = f64::INFINITY;
    for _ in 0..4 {
        let bdz = b.apply(&dz);
        let r: Vec<f64> = g.iter().zip(&bdz).map(|(a, b)| a - b).collect();
        let norm_r = r.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        ratio = if norm_g > 0.0 {
            norm_r / norm_g
        } else {
            norm_r
        };
        if ratio <= SCE_RESIDUAL_RTOL {
            break;
        }
        let corr = solve(&r);
        for (z, c) in dz.iter_mut().zip(&corr) {
            *z += c;
        }
    }
    Ok((dz, ratio))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn sce_identity_and_diagonal() {
        let b = DenseSymMatrix::identity(3);
        let (dz, res) = solve_sce(&b, &[1.0, -2.0, 0.5], 1).unwrap();
        assert_eq!(dz, vec![1.0, -2.0, 0.5]);
        assert!(res <= SCE_RESIDUAL_RTOL);

        let mut d = DenseSymMatrix::zeros(2);
        d.set(0, 0, 2.0);
        d.set(1, 1, 4.0);
        let (dz, _) = solve_sce(&d, &[2.0, 8.0], 1).unwrap();
        assert_eq!(dz, vec![1.0, 2.0]);
    }

    #[test]
    fn sce_constructed_solution() {
        let mut rng = StdRng::seed_from_u64(17);
        let m = 25;
        let mut b = DenseSymMatrix::zeros(m);
        let mut r = vec![0.0; m * m];
        for v in r.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        for i in 0..m {
            for j in 0..=i {
                let mut s = 0.0;
                for k in 0..m {
                    s += r[i * m + k] * r[j * m + k];
                }
                if i == j {
                    s += m as f64;
                }
                b.set(i, j, s);
            }
        }
        let w: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g = b.apply(&w);
        let (dz, res) = solve_sce(&b, &g, 1).unwrap();
        for (a, e) in dz.iter().zip(&w) {
            assert!((a - e).abs() <= 1e-10 * (1.0 + e.abs()));
        }
        assert!(res <= SCE_RESIDUAL_RTOL);
    }

    #[test]
    fn sce_rejects_indefinite() {
        let mut b = DenseSymMatrix::zeros(2);
        b.set(0, 0, 1.0);
        b.set(1, 0, 2.0);
        b.set(1, 1, 1.0);
        assert!(solve_sce(&b, &[1.0, 1.0], 1).is_err());
    }

    #[test]
    fn gap_and_stopping() {
        assert_eq!(relative_gap(4.0, 4.0), 0.0);
        let r = Residuals {
            primal_infeas: 1e-9,
            dual_infeas: 1e-9,
            rel_gap: 1e-8,
        };
        assert!(r.converged(1e-7));
        let r = Residuals {
            primal_infeas: 1e-3,
            dual_infeas: 1e-9,
            rel_gap: 1e-8,
        };
        assert!(!r.converged(1e-7));
    }
}
