//! Matrix-completion interior-point solver: the primal iterate is stored
//! only on the extended sparsity pattern, the completion enters every
//! formula through its inverse Cholesky factor, and the two column-wise
//! phases (Schur complement elements and the primal direction) fan out to
//! the deterministic work queue.

use std::sync::Arc;
use std::time::Instant;

use crate::chordal::{sym_apply, sym_dot, ChordalOptions, ChordalStructure, PartialMatrix};
use crate::completion::{algorithm1_factorize, completed_apply_in_place, InverseCholeskyFactor};
use crate::dense::{dense_cholesky, sym_eigenvalues, triangular_solve, DenseSymMatrix, SolveMode};
use crate::problem::SdpProblem;
use crate::scheduler::{self, run_dx_assembly, run_scm_assembly};
use crate::solver::{
    relative_gap, solve_sce, PhaseTimings, Residuals, SolveReport, SolveStatus, SolverError,
    SolverParams,
};
use crate::sparse::{numeric_factorize, FactorLayout, SparseLowerFactor};

/// Smallest dual step length tried before declaring a stall (2^-30).
const MIN_DUAL_STEP: f64 = 1.0 / (1u64 << 30) as f64;
/// Bisection refinements after the backtracking bracket is found.
const DUAL_BISECTION_STEPS: usize = 12;

/// Per-matrix precomputation against the factor layout.
struct MatCoefs {
    /// `(offset, value)` of every lower-triangle entry, for accumulating
    /// multiples of the matrix into layout-aligned arrays.
    entries: Vec<(usize, f64)>,
    /// `(offset, weight)` with off-diagonal weights doubled, for inner
    /// products against layout-aligned values.
    bullet: Vec<(usize, f64)>,
}

pub struct McSolver {
    params: SolverParams,
    structure: Arc<ChordalStructure>,
    /// Problem data in the permuted index space.
    prob: SdpProblem,
    coefs: Vec<MatCoefs>,
}

/// Final iterate of a matrix-completion solve.
pub struct McSolution {
    pub report: SolveReport,
    /// Primal iterate on the extended pattern (permuted space).
    pub x: PartialMatrix,
    /// Dual vector (constraint order is permutation invariant).
    pub z: Vec<f64>,
    pub structure: Arc<ChordalStructure>,
}

/// Raw per-iteration quantities, exposed for determinism and oracle checks.
pub struct IterationTrace {
    pub scm: DenseSymMatrix,
    pub rhs: Vec<f64>,
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
    pub dz: Vec<f64>,
    pub x_before: Vec<f64>,
    pub y_before: Vec<f64>,
    pub z_before: Vec<f64>,
    pub beta_mu: f64,
}

struct State {
    x: PartialMatrix,
    y: Vec<f64>,
    yfac: SparseLowerFactor,
    z: Vec<f64>,
    mu: f64,
    pobj: f64,
    dobj: f64,
    res: Residuals,
}

struct ColWorkspace {
    v1: Vec<f64>,
    v2: Vec<f64>,
    v3: Vec<f64>,
}

impl McSolver {
    pub fn new(problem: &SdpProblem, params: SolverParams) -> Result<Self, SolverError> {
        params.validate().map_err(SolverError::BadParams)?;
        let structure = ChordalStructure::build(problem, &ChordalOptions::default())?;
        let prob = structure.permute_problem(problem);
        let layout = structure.layout();
        let coefs = prob
            .matrices()
            .iter()
            .map(|a| {
                let mut entries = Vec::new();
                let mut bullet = Vec::new();
                for (i, j, v) in a.lower_triplets() {
                    let off = layout
                        .offset_of(i, j)
                        .expect("data entry outside the extended pattern");
                    entries.push((off, v));
                    bullet.push((off, if i == j { v } else { 2.0 * v }));
                }
                MatCoefs { entries, bullet }
            })
            .collect();
        Ok(Self {
            params,
            structure,
            prob,
            coefs,
        })
    }

    pub fn structure(&self) -> &Arc<ChordalStructure> {
        &self.structure
    }

    pub fn params(&self) -> &SolverParams {
        &self.params
    }

    fn layout(&self) -> &Arc<FactorLayout> {
        self.structure.layout()
    }

    /// `A_k • X` for layout-aligned values (`k = 0` is the objective).
    fn bullet(&self, k: usize, values: &[f64]) -> f64 {
        self.coefs[k]
            .bullet
            .iter()
            .map(|&(off, w)| w * values[off])
            .sum()
    }

    /// Dual residual matrix `G = A0 - sum_k Ak zk - Y` on the layout.
    fn dual_residual(&self, z: &[f64], y: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.layout().nnz()];
        for &(off, v) in &self.coefs[0].entries {
            g[off] = v;
        }
        for (k, zk) in z.iter().enumerate() {
            if *zk != 0.0 {
                for &(off, v) in &self.coefs[k + 1].entries {
                    g[off] -= zk * v;
                }
            }
        }
        for (gv, yv) in g.iter_mut().zip(y) {
            *gv -= yv;
        }
        g
    }

    fn residuals_of(&self, x: &PartialMatrix, y: &[f64], z: &[f64]) -> (Residuals, f64, f64) {
        let pobj = self.bullet(0, x.values());
        let dobj: f64 = self.prob.b.iter().zip(z).map(|(b, z)| b * z).sum();
        let primal = (0..self.prob.m)
            .map(|k| (self.prob.b[k] - self.bullet(k + 1, x.values())).abs())
            .fold(0.0f64, f64::max);
        let g = self.dual_residual(z, y);
        let dual = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        (
            Residuals {
                primal_infeas: primal,
                dual_infeas: dual,
                rel_gap: relative_gap(pobj, dobj),
            },
            pobj,
            dobj,
        )
    }

    fn initial_state(&self) -> Result<State, SolverError> {
        let lambda = self.params.initial_lambda(&self.prob);
        let x = PartialMatrix::scaled_identity(Arc::clone(&self.structure), lambda);
        let mut y = vec![0.0; self.layout().nnz()];
        for j in 0..self.prob.n {
            y[self.layout().diag_offset(j)] = lambda;
        }
        let yfac = numeric_factorize(self.layout(), &y).map_err(|e| SolverError::Breakdown {
            iteration: 0,
            detail: e.to_string(),
        })?;
        let z = vec![0.0; self.prob.m];
        let mu = sym_dot(self.layout(), x.values(), &y) / self.prob.n as f64;
        let (res, pobj, dobj) = self.residuals_of(&x, &y, &z);
        Ok(State {
            x,
            y,
            yfac,
            z,
            mu,
            pobj,
            dobj,
            res,
        })
    }

    /// One interior-point iteration. Fills `trace` when requested.
    fn step(
        &self,
        st: &State,
        iteration: usize,
        timings: &mut PhaseTimings,
        max_sce_residual: &mut f64,
        mut trace: Option<&mut Vec<IterationTrace>>,
    ) -> Result<State, SolverError> {
        let n = self.prob.n;
        let m = self.prob.m;
        let layout = self.layout();
        let beta_mu = self.params.beta * st.mu;

        // Factor the completion of the current primal iterate.
        let lhat = algorithm1_factorize(&st.x).map_err(|e| SolverError::Breakdown {
            iteration,
            detail: e.to_string(),
        })?;

        let g = self.dual_residual(&st.z, &st.y);
        let p: Vec<f64> = (0..m)
            .map(|k| self.prob.b[k] - self.bullet(k + 1, st.x.values()))
            .collect();

        // S-ELEMENTS: lower-triangle columns of B and the right-hand side.
        let t0 = Instant::now();
        let scm_cols = self.assemble_scm(&lhat, &st.yfac, &g, beta_mu, &p)?;
        let workers = self.params.threads.max(1).min(m.max(1));
        let sub_ns: u64 = scm_cols.iter().map(|c| c.2).sum();
        timings.s_elements += t0.elapsed();
        timings.sub_s_elements +=
            std::time::Duration::from_nanos(sub_ns / workers as u64);

        let mut b = DenseSymMatrix::zeros(m);
        let mut rhs = vec![0.0; m];
        for (j, (col, rj, _)) in scm_cols.iter().enumerate() {
            rhs[j] = *rj;
            for (o, v) in col.iter().enumerate() {
                b.set(j + o, j, *v);
            }
        }

        // S-CHOLESKY: factor and solve the Schur complement equation.
        let t0 = Instant::now();
        let inner = scheduler::effective_inner_threads(self.params.threads);
        let (dz, sce_res) = solve_sce(&b, &rhs, inner).map_err(|e| SolverError::Breakdown {
            iteration,
            detail: format!("Schur complement equation: {e}"),
        })?;
        timings.s_cholesky += t0.elapsed();
        *max_sce_residual = max_sce_residual.max(sce_res);

        // dY = G - sum_k Ak dzk on the aggregate pattern.
        let mut dy = g.clone();
        for (k, dzk) in dz.iter().enumerate() {
            if *dzk != 0.0 {
                for &(off, v) in &self.coefs[k + 1].entries {
                    dy[off] -= dzk * v;
                }
            }
        }

        // P-MATRIX: columns of the primal direction, restricted to the
        // extended pattern and symmetrized there.
        let t0 = Instant::now();
        let (dx, sub_ns) = self.assemble_dx(&lhat, &st.yfac, &dy, beta_mu)?;
        let workers = self.params.threads.max(1).min(n);
        timings.p_matrix += t0.elapsed();
        timings.sub_p_matrix += std::time::Duration::from_nanos(sub_ns / workers as u64);

        // Step lengths.
        let alpha_p = primal_step_length(&self.structure, &st.x, &dx)
            .map_err(|r| SolverError::Breakdown {
                iteration,
                detail: format!("primal iterate lost positive definiteness on clique {r}"),
            })?;
        let alpha_d = dual_step_length(layout, &st.y, &dy)
            .ok_or(SolverError::StepTooSmall { iteration })?;

        if let Some(traces) = trace.as_deref_mut() {
            traces.push(IterationTrace {
                scm: b.clone(),
                rhs: rhs.clone(),
                dx: dx.clone(),
                dy: dy.clone(),
                dz: dz.clone(),
                x_before: st.x.values().to_vec(),
                y_before: st.y.clone(),
                z_before: st.z.clone(),
                beta_mu,
            });
        }

        // Damped update; gamma < 1 restores strict interiority.
        let gp = self.params.gamma * alpha_p;
        let gd = self.params.gamma * alpha_d;
        let mut x = st.x.clone();
        x.axpy(gp, &dx);
        let mut y = st.y.clone();
        for (yv, dv) in y.iter_mut().zip(&dy) {
            *yv += gd * dv;
        }
        let mut z = st.z.clone();
        for (zv, dv) in z.iter_mut().zip(&dz) {
            *zv += gd * dv;
        }
        let yfac = numeric_factorize(layout, &y).map_err(|e| SolverError::Breakdown {
            iteration,
            detail: format!("dual update left the cone: {e}"),
        })?;
        let mu = sym_dot(layout, x.values(), &y) / n as f64;
        let (res, pobj, dobj) = self.residuals_of(&x, &y, &z);
        Ok(State {
            x,
            y,
            yfac,
            z,
            mu,
            pobj,
            dobj,
            res,
        })
    }

    /// Column task results: packed column `B[j.., j]`, the right-hand-side
    /// entry, and nanoseconds spent in triangular substitutions.
    #[allow(clippy::type_complexity)]
    fn assemble_scm(
        &self,
        lhat: &InverseCholeskyFactor,
        yfac: &SparseLowerFactor,
        g: &[f64],
        beta_mu: f64,
        p: &[f64],
    ) -> Result<Vec<(Vec<f64>, f64, u64)>, SolverError> {
        let n = self.prob.n;
        let m = self.prob.m;
        let layout = self.layout();
        let out = run_scm_assembly(
            m,
            self.params.threads,
            || ColWorkspace {
                v1: vec![0.0; n],
                v2: vec![0.0; n],
                v3: vec![0.0; n],
            },
            |ws, j| {
                let aj = self.prob.constraint(j);
                let mut col = vec![0.0; m - j];
                let mut ghat = 0.0;
                let mut sub_ns = 0u64;
                for &k in aj.nonzero_cols() {
                    // v1 = X̂ e_k through two triangular solves.
                    ws.v1.fill(0.0);
                    ws.v1[k] = 1.0;
                    let t = Instant::now();
                    completed_apply_in_place(lhat, &mut ws.v1);
                    sub_ns += t.elapsed().as_nanos() as u64;
                    // v2 = Y^{-1} [A_j]_{*k}.
                    ws.v2.fill(0.0);
                    for &(r, v) in aj.col(k) {
                        ws.v2[r] = v;
                    }
                    let t = Instant::now();
                    yfac.solve_in_place(&mut ws.v2);
                    sub_ns += t.elapsed().as_nanos() as u64;
                    // Right-hand side pieces sharing v1 and v2:
                    // A_j • (βμ Y^{-1}) accumulates (Y^{-1}[A_j]_{*k})_k,
                    // A_j • X̂ accumulates [A_j]_{*k}ᵀ v1,
                    // A_j • (X̂ G Y^{-1}) accumulates v1ᵀ G v2.
                    ghat += beta_mu * ws.v2[k];
                    let mut adot = 0.0;
                    for &(r, v) in aj.col(k) {
                        adot += v * ws.v1[r];
                    }
                    ghat -= adot;
                    sym_apply(layout, g, &ws.v2, &mut ws.v3);
                    let mut v1gv2 = 0.0;
                    for (a, c) in ws.v1.iter().zip(&ws.v3) {
                        v1gv2 += a * c;
                    }
                    ghat -= v1gv2;
                    // Lower-triangle column of B.
                    for (o, slot) in col.iter_mut().enumerate() {
                        *slot += self.prob.constraint(j + o).quadratic_form(&ws.v1, &ws.v2);
                    }
                }
                (col, p[j] - ghat, sub_ns)
            },
        )?;
        Ok(out)
    }

    /// Assembles the symmetrized primal direction on the extended pattern.
    /// Each column writes its own lower-column slots and the "row" slots it
    /// owns, so writes never overlap across columns.
    fn assemble_dx(
        &self,
        lhat: &InverseCholeskyFactor,
        yfac: &SparseLowerFactor,
        dy: &[f64],
        beta_mu: f64,
    ) -> Result<(Vec<f64>, u64), SolverError> {
        let n = self.prob.n;
        let layout = self.layout();
        let cols = run_dx_assembly(
            n,
            self.params.threads,
            || ColWorkspace {
                v1: vec![0.0; n],
                v2: vec![0.0; n],
                v3: vec![0.0; n],
            },
            |ws, k| {
                let mut sub_ns = 0u64;
                // v1 = Y^{-1} e_k.
                ws.v1.fill(0.0);
                ws.v1[k] = 1.0;
                let t = Instant::now();
                yfac.solve_in_place(&mut ws.v1);
                sub_ns += t.elapsed().as_nanos() as u64;
                // v2 = X̂ e_k.
                ws.v2.fill(0.0);
                ws.v2[k] = 1.0;
                let t = Instant::now();
                completed_apply_in_place(lhat, &mut ws.v2);
                sub_ns += t.elapsed().as_nanos() as u64;
                // v3 = X̂ dY Y^{-1} e_k.
                sym_apply(layout, dy, &ws.v1, &mut ws.v3);
                let t = Instant::now();
                completed_apply_in_place(lhat, &mut ws.v3);
                sub_ns += t.elapsed().as_nanos() as u64;
                let value = |i: usize| beta_mu * ws.v1[i] - ws.v2[i] - ws.v3[i];
                // Retained entries: column k of the lower triangle...
                let lows: Vec<f64> = layout.col_rows(k).iter().map(|&i| value(i)).collect();
                // ...and the transposed entries along row k.
                let ups: Vec<(usize, f64)> = layout
                    .row_adjacency(k)
                    .iter()
                    .map(|&(c, pos)| (layout.col_range(c).start + pos, value(c)))
                    .collect();
                (lows, ups, sub_ns)
            },
        )?;
        let mut low = vec![0.0; layout.nnz()];
        let mut up = vec![0.0; layout.nnz()];
        let mut sub_total = 0u64;
        for (k, (lows, ups, ns)) in cols.into_iter().enumerate() {
            sub_total += ns;
            let start = layout.col_range(k).start;
            for (o, v) in lows.into_iter().enumerate() {
                low[start + o] = v;
            }
            for (off, v) in ups {
                up[off] = v;
            }
        }
        // Symmetrize on the pattern: diagonal entries are their own mirror.
        let mut dx = vec![0.0; layout.nnz()];
        for j in 0..n {
            let range = layout.col_range(j);
            dx[range.start] = low[range.start];
            for off in range.start + 1..range.end {
                dx[off] = 0.5 * (low[off] + up[off]);
            }
        }
        Ok((dx, sub_total))
    }

    fn run(
        &self,
        mut trace: Option<(&mut Vec<IterationTrace>, usize)>,
    ) -> Result<(SolveReport, State), SolverError> {
        let start = Instant::now();
        let mut timings = PhaseTimings::default();
        let mut max_sce_residual = 0.0f64;
        let mut st = self.initial_state()?;
        let mut iterations = 0;
        let mut status = SolveStatus::MaxIterations;
        while iterations < self.params.max_iter {
            if st.res.converged(self.params.epsilon) {
                status = SolveStatus::Converged;
                break;
            }
            if let Some((_, limit)) = &trace {
                if iterations >= *limit {
                    break;
                }
            }
            let traces = trace.as_mut().map(|(t, _)| &mut **t);
            st = self.step(&st, iterations, &mut timings, &mut max_sce_residual, traces)?;
            iterations += 1;
        }
        if st.res.converged(self.params.epsilon) {
            status = SolveStatus::Converged;
        }
        timings.total = start.elapsed();
        let report = SolveReport {
            status,
            iterations,
            primal_objective: st.pobj,
            dual_objective: st.dobj,
            residuals: st.res,
            timings,
            threads: self.params.threads,
            max_sce_residual,
        };
        Ok((report, st))
    }

    pub fn solve(&self) -> Result<McSolution, SolverError> {
        let (report, st) = self.run(None)?;
        Ok(McSolution {
            report,
            x: st.x,
            z: st.z,
            structure: Arc::clone(&self.structure),
        })
    }

    /// Runs at most `count` iterations collecting the raw direction system
    /// of each, regardless of convergence.
    pub fn trace_iterations(&self, count: usize) -> Result<Vec<IterationTrace>, SolverError> {
        let mut traces = Vec::new();
        let _ = self.run(Some((&mut traces, count)))?;
        Ok(traces)
    }

    /// Current objective value of a layout-aligned primal iterate,
    /// `A0 • X̂`; only pattern entries contribute since the data lives
    /// inside the extended pattern.
    pub fn primal_objective(&self, x: &PartialMatrix) -> f64 {
        self.bullet(0, x.values())
    }
}

/// Largest step keeping every clique block of `X̄ + α dX` in the cone,
/// capped at 1. Per clique: factor the block, transform the direction
/// block, and bound the step by the smallest eigenvalue.
pub fn primal_step_length(
    structure: &ChordalStructure,
    x: &PartialMatrix,
    dx: &[f64],
) -> Result<f64, usize> {
    let mut alpha = 1.0f64;
    for r in 0..structure.cliques().len() {
        let xb = x.clique_block(r);
        let db = structure.gather_block(dx, r);
        let k = xb.dim();
        let l = dense_cholesky(&xb).map_err(|_| r)?;
        // S = L^{-1} dX L^{-T}: forward-solve the columns, then the rows,
        // and average the result to keep it exactly symmetric for the
        // eigenvalue sweep.
        let mut half = vec![vec![0.0; k]; k];
        for j in 0..k {
            let col: Vec<f64> = (0..k).map(|i| db.get(i, j)).collect();
            half[j] = triangular_solve(&l, &col, SolveMode::Forward).expect("positive diagonal");
        }
        let mut rows = Vec::with_capacity(k);
        for i in 0..k {
            let row: Vec<f64> = (0..k).map(|j| half[j][i]).collect();
            rows.push(triangular_solve(&l, &row, SolveMode::Forward).expect("positive diagonal"));
        }
        let mut s = DenseSymMatrix::zeros(k);
        for i in 0..k {
            for j in 0..=i {
                s.set(i, j, 0.5 * (rows[i][j] + rows[j][i]));
            }
        }
        let eig = sym_eigenvalues(&s).expect("clique-scale eigenvalues converge");
        let lambda_min = eig[0];
        if lambda_min < 0.0 {
            alpha = alpha.min(-1.0 / lambda_min).min(1.0);
        }
    }
    Ok(alpha)
}

/// Largest step keeping `Y + α dY` factorizable, found by halving from 1
/// and refining the bracket by bisection. Returns `None` when no step of
/// at least `2^-30` stays in the cone.
pub fn dual_step_length(layout: &Arc<FactorLayout>, y: &[f64], dy: &[f64]) -> Option<f64> {
    let mut buf = vec![0.0; y.len()];
    let mut feasible = |alpha: f64| -> bool {
        for ((b, yv), dv) in buf.iter_mut().zip(y).zip(dy) {
            *b = yv + alpha * dv;
        }
        numeric_factorize(layout, &buf).is_ok()
    };
    let mut alpha = 1.0;
    let mut last_fail = None;
    loop {
        if feasible(alpha) {
            break;
        }
        last_fail = Some(alpha);
        alpha *= 0.5;
        if alpha < MIN_DUAL_STEP {
            return None;
        }
    }
    let Some(mut hi) = last_fail else {
        return Some(1.0);
    };
    let mut lo = alpha;
    for _ in 0..DUAL_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chordal::ChordalOptions;
    use crate::generators::random_chordal_sdp;
    use crate::problem::SparseSymMat;
    use crate::sparse::SymPattern;

    fn scalar_problem() -> SdpProblem {
        // min 2x s.t. 3x = 6, x >= 0.
        let a0 = SparseSymMat::from_lower_triplets(1, &[(0, 0, 2.0)]);
        let a1 = SparseSymMat::from_lower_triplets(1, &[(0, 0, 3.0)]);
        SdpProblem::new(1, vec![a0, a1], vec![6.0])
    }

    #[test]
    fn initial_point_mu_is_lambda_squared() {
        let p = random_chordal_sdp(3, 3, 2, 0.5);
        let solver = McSolver::new(
            &p,
            SolverParams {
                lambda0: Some(100.0),
                ..SolverParams::default()
            },
        )
        .unwrap();
        let st = solver.initial_state().unwrap();
        assert!((st.mu - 10_000.0).abs() < 1e-9);
        // Primal residual at the start is max_k |λ tr(A_k) - b_k| since
        // X = λI only sees diagonal entries.
        let expect = (0..p.m)
            .map(|k| {
                let tr: f64 = p
                    .constraint(k)
                    .lower_triplets()
                    .iter()
                    .filter(|(i, j, _)| i == j)
                    .map(|&(_, _, v)| v)
                    .sum();
                (100.0 * tr - p.b[k]).abs()
            })
            .fold(0.0f64, f64::max);
        assert!((st.res.primal_infeas - expect).abs() <= 1e-12 * (1.0 + expect));
    }

    #[test]
    fn scalar_problem_converges_to_four() {
        let solver = McSolver::new(&scalar_problem(), SolverParams::default()).unwrap();
        let sol = solver.solve().unwrap();
        assert_eq!(sol.report.status, SolveStatus::Converged);
        assert!((sol.report.primal_objective - 4.0).abs() < 1e-6);
        assert!(sol.report.residuals.rel_gap <= 1e-7);
    }

    #[test]
    fn primal_step_examples() {
        let p = SymPattern::full(3);
        let s = ChordalStructure::from_aggregate(p, &ChordalOptions::default()).unwrap();
        let x = PartialMatrix::scaled_identity(Arc::clone(&s), 1.0);
        let nnz = s.layout().nnz();
        // dX = -I: boundary exactly at 1.
        let mut dx = vec![0.0; nnz];
        for j in 0..3 {
            dx[s.layout().diag_offset(j)] = -1.0;
        }
        let a = primal_step_length(&s, &x, &dx).unwrap();
        assert!((a - 1.0).abs() < 1e-12);
        // dX = -2I: boundary at 0.5.
        for j in 0..3 {
            dx[s.layout().diag_offset(j)] = -2.0;
        }
        let a = primal_step_length(&s, &x, &dx).unwrap();
        assert!((a - 0.5).abs() < 1e-12);
        // Positive semidefinite direction: full step.
        for j in 0..3 {
            dx[s.layout().diag_offset(j)] = 0.7;
        }
        let a = primal_step_length(&s, &x, &dx).unwrap();
        assert_eq!(a, 1.0);
    }

    #[test]
    fn dual_step_examples() {
        let p = SymPattern::diagonal(3);
        let s = ChordalStructure::from_aggregate(p, &ChordalOptions::default()).unwrap();
        let layout = s.layout();
        let y = vec![1.0; 3];
        // dY = 0: full step.
        assert_eq!(dual_step_length(layout, &y, &[0.0; 3]), Some(1.0));
        // dY = -2I: boundary at 0.5, bracketed from below.
        let a = dual_step_length(layout, &y, &[-2.0; 3]).unwrap();
        assert!(a <= 0.5 && a >= 0.5 - 2.0_f64.powi(-12));
        // dY positive semidefinite: full step.
        assert_eq!(dual_step_length(layout, &y, &[0.3, 0.0, 1.0]), Some(1.0));
    }

    #[test]
    fn central_path_direction_vanishes() {
        // With dY = 0 and X̂ = βμ Y^{-1}, the direction columns cancel.
        let p = random_chordal_sdp(11, 6, 4, 0.4);
        let solver = McSolver::new(&p, SolverParams::default()).unwrap();
        let layout = solver.layout();
        let n = solver.prob.n;
        let mut y = vec![0.0; layout.nnz()];
        for j in 0..n {
            y[layout.diag_offset(j)] = 1.0;
        }
        let yfac = numeric_factorize(layout, &y).unwrap();
        let beta_mu = 2.0;
        let x = PartialMatrix::scaled_identity(Arc::clone(&solver.structure), beta_mu);
        let lhat = algorithm1_factorize(&x).unwrap();
        let dy = vec![0.0; layout.nnz()];
        let (dx, _) = solver.assemble_dx(&lhat, &yfac, &dy, beta_mu).unwrap();
        assert!(dx.iter().all(|v| v.abs() < 1e-12));
    }
}
