//! First-come-first-served work queue for column-wise parallel phases.
//!
//! A phase hands out column indices in ascending order through a single
//! atomic cursor; whichever worker becomes free claims the smallest
//! remaining index. Each column is computed sequentially by exactly one
//! worker and written to locations no other column touches, so the
//! assembled result is bitwise identical for every worker count.
//!
//! While a phase is active the inner linear-algebra kernels must stay
//! single-threaded; [`enter_column_phase`] provides the scoped setting and
//! [`effective_inner_threads`] is consulted by kernels that can use more
//! than one thread (the dense Cholesky of the Schur complement matrix).

use std::cell::Cell;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("worker panicked while computing column {column}")]
pub struct WorkerPanic {
    pub column: usize,
}

/// Ascending index dispenser shared by the workers of one phase. Every
/// index in `0..total` is dispensed exactly once.
pub struct WorkQueue {
    next: AtomicUsize,
    total: usize,
}

impl WorkQueue {
    pub fn new(total: usize) -> Self {
        Self {
            next: AtomicUsize::new(0),
            total,
        }
    }

    /// Claims the smallest remaining index, or `None` when the queue is
    /// exhausted. Only one claimant ever receives a given index.
    pub fn claim(&self) -> Option<usize> {
        let j = self.next.fetch_add(1, Ordering::Relaxed);
        (j < self.total).then_some(j)
    }
}

thread_local! {
    static COLUMN_PHASE_DEPTH: Cell<usize> = const { Cell::new(0) };
}

/// Scoped marker for an active column phase on the current thread.
pub struct NestedParallelismGuard(());

impl NestedParallelismGuard {
    fn new() -> Self {
        COLUMN_PHASE_DEPTH.with(|d| d.set(d.get() + 1));
        NestedParallelismGuard(())
    }
}

impl Drop for NestedParallelismGuard {
    fn drop(&mut self) {
        COLUMN_PHASE_DEPTH.with(|d| d.set(d.get() - 1));
    }
}

/// Marks the current thread as running inside a column phase until the
/// guard is dropped.
pub fn enter_column_phase() -> NestedParallelismGuard {
    NestedParallelismGuard::new()
}

/// Thread budget an inner kernel may actually use: 1 while a column phase
/// is active on this thread, the requested count otherwise.
pub fn effective_inner_threads(requested: usize) -> usize {
    let in_phase = COLUMN_PHASE_DEPTH.with(|d| d.get()) > 0;
    if in_phase {
        1
    } else {
        requested.max(1)
    }
}

/// Runs `task` over columns `0..count` with `workers` threads and a
/// per-worker workspace created by `init`. Returns the results indexed by
/// column. With one worker this is exactly the sequential loop.
pub fn run_columns_with<W, T, I, F>(
    count: usize,
    workers: usize,
    init: I,
    task: F,
) -> Result<Vec<T>, WorkerPanic>
where
    T: Send,
    I: Fn() -> W + Sync,
    F: Fn(&mut W, usize) -> T + Sync,
{
    let workers = workers.max(1).min(count.max(1));
    let mut slots: Vec<Option<T>> = (0..count).map(|_| None).collect();
    if workers <= 1 {
        let _phase = enter_column_phase();
        let mut ws = init();
        for (j, slot) in slots.iter_mut().enumerate() {
            match catch_unwind(AssertUnwindSafe(|| task(&mut ws, j))) {
                Ok(t) => *slot = Some(t),
                Err(_) => return Err(WorkerPanic { column: j }),
            }
        }
    } else {
        let queue = WorkQueue::new(count);
        let parts = std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|_| {
                    s.spawn(|| {
                        let _phase = enter_column_phase();
                        let mut ws = init();
                        let mut out: Vec<(usize, T)> = Vec::new();
                        while let Some(j) = queue.claim() {
                            match catch_unwind(AssertUnwindSafe(|| task(&mut ws, j))) {
                                Ok(t) => out.push((j, t)),
                                Err(_) => return Err(WorkerPanic { column: j }),
                            }
                        }
                        Ok(out)
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("scheduler worker thread died"))
                .collect::<Vec<_>>()
        });
        for part in parts {
            for (j, t) in part? {
                slots[j] = Some(t);
            }
        }
    }
    // Claim log: every index dispensed exactly once and none lost.
    let out: Vec<T> = slots
        .into_iter()
        .enumerate()
        .map(|(j, s)| s.unwrap_or_else(|| panic!("column {j} was never claimed")))
        .collect();
    Ok(out)
}

/// Evaluates the Schur complement columns `0..m`. `column_task` receives a
/// per-worker workspace and the column index and must only compute that
/// column's contribution (rows `j..m` of the lower triangle plus the
/// right-hand-side entry).
pub fn run_scm_assembly<W, T, I, F>(
    m: usize,
    workers: usize,
    init: I,
    column_task: F,
) -> Result<Vec<T>, WorkerPanic>
where
    T: Send,
    I: Fn() -> W + Sync,
    F: Fn(&mut W, usize) -> T + Sync,
{
    run_columns_with(m, workers, init, column_task)
}

/// Evaluates the primal-direction columns `0..n` under the same claim
/// discipline as the Schur complement assembly.
pub fn run_dx_assembly<W, T, I, F>(
    n: usize,
    workers: usize,
    init: I,
    column_task: F,
) -> Result<Vec<T>, WorkerPanic>
where
    T: Send,
    I: Fn() -> W + Sync,
    F: Fn(&mut W, usize) -> T + Sync,
{
    run_columns_with(n, workers, init, column_task)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::AtomicU64;

    #[test]
    fn queue_dispenses_each_index_once_ascending() {
        let q = WorkQueue::new(8);
        let got: Vec<usize> = std::iter::from_fn(|| q.claim()).collect();
        assert_eq!(got, (0..8).collect::<Vec<_>>());
        assert_eq!(q.claim(), None);
    }

    #[test]
    fn coverage_with_many_workers() {
        for workers in [1, 2, 4, 8] {
            let hits: Vec<AtomicU64> = (0..37).map(|_| AtomicU64::new(0)).collect();
            let res = run_columns_with(
                37,
                workers,
                || (),
                |_, j| {
                    hits[j].fetch_add(1, Ordering::Relaxed);
                    j * j
                },
            )
            .unwrap();
            assert_eq!(res, (0..37).map(|j| j * j).collect::<Vec<_>>());
            assert!(hits.iter().all(|h| h.load(Ordering::Relaxed) == 1));
        }
    }

    #[test]
    fn surplus_workers_exit_on_empty_queue() {
        let res = run_columns_with(1, 8, || (), |_, j| j + 10).unwrap();
        assert_eq!(res, vec![10]);
        let res: Vec<usize> = run_columns_with(0, 4, || (), |_, j| j).unwrap();
        assert!(res.is_empty());
    }

    #[test]
    fn worker_panic_reports_column() {
        let err = run_columns_with(6, 3, || (), |_, j| {
            if j == 4 {
                panic!("boom");
            }
            j
        })
        .unwrap_err();
        assert_eq!(err.column, 4);
    }

    #[test]
    fn inner_threads_clamped_inside_phase() {
        assert_eq!(effective_inner_threads(4), 4);
        run_columns_with(2, 1, || (), |_, _| {
            assert_eq!(effective_inner_threads(4), 1);
        })
        .unwrap();
        assert_eq!(effective_inner_threads(4), 4);
        // Workers observe the clamp too.
        run_columns_with(8, 4, || (), |_, _| {
            assert_eq!(effective_inner_threads(4), 1);
        })
        .unwrap();
        assert_eq!(effective_inner_threads(0), 1);
    }

    /// Event-driven makespan of the dynamic smallest-first queue vs the
    /// static round-robin stripe assignment, on the same cost vector.
    fn dynamic_makespan(costs: &[u64], workers: usize) -> u64 {
        let mut free = vec![0u64; workers];
        for &c in costs {
            let w = (0..workers).min_by_key(|&w| (free[w], w)).unwrap();
            free[w] += c;
        }
        free.into_iter().max().unwrap()
    }

    fn round_robin_makespan(costs: &[u64], workers: usize) -> u64 {
        let mut load = vec![0u64; workers];
        for (j, &c) in costs.iter().enumerate() {
            load[j % workers] += c;
        }
        load.into_iter().max().unwrap()
    }

    #[test]
    fn dynamic_queue_beats_round_robin_on_skewed_costs() {
        // One heavy column among many light ones, in every position.
        for heavy_at in [0usize, 3, 7, 15] {
            let mut costs = vec![1u64; 16];
            costs[heavy_at] = 100;
            for workers in [2, 4] {
                assert!(
                    dynamic_makespan(&costs, workers) <= round_robin_makespan(&costs, workers),
                    "heavy_at={heavy_at} workers={workers}"
                );
            }
        }
    }
}
