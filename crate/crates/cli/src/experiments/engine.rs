//! Deterministic parallel execution of grid and curve specs.
//!
//! A cell is the unit of work. Every `(cell, rep)` pair owns the seed
//! `derive_seed(master_seed, cell, rep)` and consumes its stream in a
//! fixed order (dataset, then eigensolver start vector, then random-Lloyd
//! start), so the tallies are a pure function of the spec regardless of
//! worker count, scheduling or interruption. Workers pull cell indices
//! from a shared counter and report tallies to the coordinating thread,
//! which is the only checkpoint writer.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use hollowgram_core::linalg::{gram, hollow, top_eigpair_with_start};
use hollowgram_core::{
    ab_to_config, default_iter_count, derive_seed, gaussian_tail, hamming_risk, lloyd_steps,
    oracle_known_center, oracle_supervised, sample_dataset_seeded, sample_labels, sign_vec,
    ABPoint, CenterMode, Error as CoreError, ProblemConfig, Rng, SolverOpts,
};

use super::checkpoint;
use super::spec::{
    CellResult, CurveResult, CurveRow, CurveSpec, GridResult, GridSpec, Method, MethodCurve,
    MethodTally,
};
use crate::HarnessError;

/// Execution settings; the spec alone fixes the numbers, these only fix
/// how the run is carried out.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub workers: usize,
    pub checkpoint: Option<PathBuf>,
    /// Abort after this many newly computed cells (used to exercise the
    /// interruption/resume path; the checkpoint stays valid).
    pub stop_after_cells: Option<usize>,
    /// Eigensolver settings for the spectral stage of every rep. Not part
    /// of the grid spec (and so not stored in checkpoints): a resumed run
    /// must use the same settings as the original for bit-identical
    /// results. The defaults are used everywhere unless overridden.
    pub solver: SolverOpts,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            workers: 1,
            checkpoint: None,
            stop_after_cells: None,
            solver: SolverOpts::default(),
        }
    }
}

/// Outcome of one method on one rep.
#[derive(Debug, Clone, Copy)]
struct RepOutcome {
    success: bool,
    miscls: f64,
}

/// Evaluates every requested method on the one dataset of `(cell, rep)`.
///
/// Eigensolver no-convergence is not an error of the run: the affected
/// spectral methods record a failure with the coin-flip misclassified
/// fraction 1/2. Any other error aborts.
fn evaluate_rep(
    config: &ProblemConfig,
    methods: &[Method],
    master_seed: u64,
    cell_index: usize,
    rep: usize,
    solver: &SolverOpts,
) -> Result<Vec<RepOutcome>, HarnessError> {
    let seed = derive_seed(master_seed, cell_index, rep);
    let mut rng = Rng::new(seed);
    let ds = sample_dataset_seeded(config, CenterMode::FixedNorm, &mut rng, seed)?;
    let n = config.n;

    // Fixed stream order regardless of which methods are requested.
    let mut solver_start = vec![0.0f64; n];
    rng.fill_normals(&mut solver_start);
    let random_start = sample_labels(n, &mut rng)?;

    let needs_hollow = methods.iter().any(|m| {
        matches!(
            m,
            Method::SpectralLloyd | Method::Spectral | Method::RandomLloyd
        )
    });
    let needs_eigen = methods
        .iter()
        .any(|m| matches!(m, Method::SpectralLloyd | Method::Spectral));

    let hg = if needs_hollow {
        Some(hollow(gram(&ds.y)?))
    } else {
        None
    };
    let spectral_labels = if needs_eigen {
        let hg = hg.as_ref().expect("hollow gram present when eigen needed");
        let max_iter = solver
            .max_iter
            .unwrap_or_else(|| hollowgram_core::linalg::default_max_iter(n));
        match top_eigpair_with_start(hg.as_sym(), solver_start, solver.tol, max_iter) {
            Ok(top) => Some(sign_vec(&top.vector)),
            Err(CoreError::NoConvergence { .. }) => None,
            Err(other) => return Err(other.into()),
        }
    } else {
        None
    };

    let k_lloyd = default_iter_count(n);
    let mut outcomes = Vec::with_capacity(methods.len());
    for method in methods {
        let labels = match method {
            Method::SpectralLloyd => match &spectral_labels {
                Some(init) => {
                    Some(lloyd_steps(hg.as_ref().unwrap(), init.clone(), k_lloyd)?.labels)
                }
                None => None,
            },
            Method::Spectral => spectral_labels.clone(),
            Method::RandomLloyd => {
                Some(lloyd_steps(hg.as_ref().unwrap(), random_start.clone(), k_lloyd)?.labels)
            }
            Method::OracleSupervised => Some(oracle_supervised(&ds.y, &ds.eta)?),
            Method::OracleKnownCenter => Some(oracle_known_center(&ds.y, &ds.theta)?),
        };
        let outcome = match labels {
            Some(labels) => {
                let report = hamming_risk(&labels, &ds.eta)?;
                RepOutcome {
                    success: report.exact,
                    miscls: report.normalized,
                }
            }
            // solver did not converge: count as non-recovery at coin-flip risk
            None => RepOutcome {
                success: false,
                miscls: 0.5,
            },
        };
        outcomes.push(outcome);
    }
    Ok(outcomes)
}

/// Computes the full tallies of one grid cell (reps in order).
fn evaluate_grid_cell(
    spec: &GridSpec,
    cell_index: usize,
    solver: &SolverOpts,
) -> Result<Vec<MethodTally>, HarnessError> {
    let (ai, bi) = spec.cell_coords(cell_index);
    let point = ABPoint::new(spec.a_grid[ai], spec.b_grid[bi])?;
    let config = ab_to_config(&point, spec.n, spec.sigma)?;
    let mut tallies = vec![MethodTally::default(); spec.methods.len()];
    for rep in 0..spec.reps {
        let outcomes = evaluate_rep(
            &config,
            &spec.methods,
            spec.master_seed,
            cell_index,
            rep as usize,
            solver,
        )?;
        for (tally, outcome) in tallies.iter_mut().zip(&outcomes) {
            tally.reps_done += 1;
            if outcome.success {
                tally.successes += 1;
            }
            tally.sum_miscls += outcome.miscls;
        }
    }
    Ok(tallies)
}

/// Runs the cells listed in `pending` on a pool of `workers` threads,
/// invoking `on_cell` on the coordinating thread for each finished cell.
fn run_cell_pool(
    spec: &GridSpec,
    pending: &[usize],
    opts: &RunOptions,
    mut on_cell: impl FnMut(usize, &[MethodTally]) -> Result<(), HarnessError>,
) -> Result<Vec<(usize, Vec<MethodTally>)>, HarnessError> {
    let workers = opts.workers.max(1).min(pending.len().max(1));
    let next_job = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<Result<(usize, Vec<MethodTally>), HarnessError>>();

    let mut finished: Vec<(usize, Vec<MethodTally>)> = Vec::with_capacity(pending.len());
    std::thread::scope(|scope| -> Result<(), HarnessError> {
        for _ in 0..workers {
            let tx = tx.clone();
            let next_job = &next_job;
            let solver = opts.solver;
            scope.spawn(move || loop {
                let slot = next_job.fetch_add(1, Ordering::Relaxed);
                if slot >= pending.len() {
                    break;
                }
                let cell = pending[slot];
                let result = evaluate_grid_cell(spec, cell, &solver).map(|t| (cell, t));
                if tx.send(result).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for message in rx {
            let (cell, tallies) = message?;
            on_cell(cell, &tallies)?;
            finished.push((cell, tallies));
        }
        Ok(())
    })?;
    Ok(finished)
}

/// Runs a grid spec. When `checkpoint` names a path, a header line plus
/// one record per `(cell, method)` are appended as cells complete; an
/// existing checkpoint at that path is an error (use [`resume_grid`]).
pub fn run_grid(
    spec: &GridSpec,
    workers: usize,
    checkpoint: Option<&Path>,
) -> Result<GridResult, HarnessError> {
    run_grid_with(
        spec,
        &RunOptions {
            workers,
            checkpoint: checkpoint.map(Path::to_path_buf),
            ..RunOptions::default()
        },
    )
}

/// [`run_grid`] with full execution settings.
pub fn run_grid_with(spec: &GridSpec, opts: &RunOptions) -> Result<GridResult, HarnessError> {
    spec.validate()?;
    let mut writer = match &opts.checkpoint {
        Some(path) => Some(checkpoint::Writer::create(path, spec)?),
        None => None,
    };
    let mut result = GridResult::empty(spec.clone());
    let mut pending: Vec<usize> = (0..spec.cell_count()).collect();
    if let Some(limit) = opts.stop_after_cells {
        pending.truncate(limit);
    }
    run_into(spec, &pending, opts, &mut result, writer.as_mut())?;
    Ok(result)
}

fn run_into(
    spec: &GridSpec,
    pending: &[usize],
    opts: &RunOptions,
    result: &mut GridResult,
    mut writer: Option<&mut checkpoint::Writer>,
) -> Result<(), HarnessError> {
    let finished = run_cell_pool(spec, pending, opts, |cell, tallies| {
        if let Some(w) = writer.as_deref_mut() {
            w.record_cell(spec, cell, tallies)?;
        }
        Ok(())
    })?;
    for (cell, tallies) in finished {
        result.cells[cell] = CellResult {
            tallies,
            completed: true,
        };
    }
    Ok(())
}

/// Resumes a checkpointed grid run single-threaded; see
/// [`resume_grid_with`].
pub fn resume_grid(checkpoint_path: &Path) -> Result<GridResult, HarnessError> {
    resume_grid_with(checkpoint_path, &RunOptions::default())
}

/// Reads a checkpoint, verifies its spec hash, and computes only the
/// missing cells (appending them to the checkpoint). The final result is
/// bit-identical to an uninterrupted run of the same spec: cells are pure
/// functions of `(spec, master_seed)`, so it does not matter which run
/// computed them. Resuming a complete checkpoint recomputes nothing.
pub fn resume_grid_with(
    checkpoint_path: &Path,
    opts: &RunOptions,
) -> Result<GridResult, HarnessError> {
    let loaded = checkpoint::read(checkpoint_path)?;
    let spec = loaded.spec.clone();
    let mut result = GridResult::empty(spec.clone());
    for (cell, tallies) in loaded.cells {
        result.cells[cell] = CellResult {
            tallies,
            completed: true,
        };
    }
    let pending: Vec<usize> = (0..spec.cell_count())
        .filter(|&c| !result.cells[c].completed)
        .collect();
    if pending.is_empty() {
        return Ok(result);
    }
    let mut writer = checkpoint::Writer::append(checkpoint_path)?;
    let run_opts = RunOptions {
        checkpoint: None,
        stop_after_cells: None,
        ..opts.clone()
    };
    run_into(&spec, &pending, &run_opts, &mut result, Some(&mut writer))?;
    Ok(result)
}

/// Runs a risk-versus-SNR sweep: one cell per target SNR, the same paired
/// evaluation as the grid engine, plus the reference decay
/// `gaussian_tail(r)` per row.
pub fn run_curve(spec: &CurveSpec, workers: usize) -> Result<CurveResult, HarnessError> {
    run_curve_with(spec, workers, &SolverOpts::default())
}

pub fn run_curve_with(
    spec: &CurveSpec,
    workers: usize,
    solver: &SolverOpts,
) -> Result<CurveResult, HarnessError> {
    spec.validate()?;
    let workers = workers.max(1).min(spec.r_grid.len());
    let next_job = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<Result<(usize, CurveRow), HarnessError>>();
    let mut rows: Vec<Option<CurveRow>> = vec![None; spec.r_grid.len()];
    std::thread::scope(|scope| -> Result<(), HarnessError> {
        for _ in 0..workers {
            let tx = tx.clone();
            let next_job = &next_job;
            let solver = *solver;
            scope.spawn(move || loop {
                let idx = next_job.fetch_add(1, Ordering::Relaxed);
                if idx >= spec.r_grid.len() {
                    break;
                }
                let row = evaluate_curve_point(spec, idx, &solver);
                if tx.send(row.map(|r| (idx, r))).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for message in rx {
            let (idx, row) = message?;
            rows[idx] = Some(row);
        }
        Ok(())
    })?;
    Ok(CurveResult {
        spec: spec.clone(),
        rows: rows.into_iter().map(|r| r.expect("row computed")).collect(),
    })
}

fn evaluate_curve_point(
    spec: &CurveSpec,
    r_index: usize,
    solver: &SolverOpts,
) -> Result<CurveRow, HarnessError> {
    let r = spec.r_grid[r_index];
    let delta = spec.delta_for(r);
    let config = ProblemConfig::new(spec.n, spec.p, spec.sigma, delta)?;
    let mut methods: Vec<MethodCurve> = spec
        .methods
        .iter()
        .map(|_| MethodCurve {
            tally: MethodTally::default(),
            sum_miscls_sq: 0.0,
        })
        .collect();
    for rep in 0..spec.reps {
        let outcomes = evaluate_rep(
            &config,
            &spec.methods,
            spec.master_seed,
            r_index,
            rep as usize,
            solver,
        )?;
        for (stat, outcome) in methods.iter_mut().zip(&outcomes) {
            stat.tally.reps_done += 1;
            if outcome.success {
                stat.tally.successes += 1;
            }
            stat.tally.sum_miscls += outcome.miscls;
            stat.sum_miscls_sq += outcome.miscls * outcome.miscls;
        }
    }
    Ok(CurveRow {
        r,
        delta,
        lower_bound: gaussian_tail(r),
        methods,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::linspace;

    fn tiny_spec() -> GridSpec {
        GridSpec {
            n: 24,
            sigma: 1.0,
            a_grid: linspace(2.0, 8.0, 3),
            b_grid: linspace(0.2, 1.0, 2),
            reps: 3,
            methods: vec![Method::SpectralLloyd, Method::Spectral, Method::RandomLloyd],
            master_seed: 77,
        }
    }

    #[test]
    fn single_cell_noiseless_limit_recovers() {
        // a = 1e6 puts the separation absurdly above the threshold
        let spec = GridSpec {
            n: 16,
            sigma: 1.0,
            a_grid: vec![1e6],
            b_grid: vec![0.5],
            reps: 1,
            methods: vec![Method::SpectralLloyd],
            master_seed: 5,
        };
        let result = run_grid(&spec, 1, None).unwrap();
        assert_eq!(result.cells[0].tallies[0].successes, 1);
        assert_eq!(result.cells[0].tallies[0].reps_done, 1);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let spec = tiny_spec();
        let one = run_grid(&spec, 1, None).unwrap();
        let eight = run_grid(&spec, 8, None).unwrap();
        assert_eq!(one, eight);
    }

    #[test]
    fn conservation_per_cell() {
        let result = run_grid(&tiny_spec(), 2, None).unwrap();
        for cell in &result.cells {
            assert!(cell.completed);
            for tally in &cell.tallies {
                assert!(tally.successes <= tally.reps_done);
                assert_eq!(tally.reps_done, 3);
            }
        }
    }

    #[test]
    fn curve_rows_cover_grid_and_carry_reference() {
        let spec = CurveSpec {
            n: 40,
            p: 30,
            sigma: 1.0,
            r_grid: vec![3.0, 6.0],
            reps: 5,
            methods: vec![Method::SpectralLloyd],
            master_seed: 3,
        };
        let curve = run_curve(&spec, 2).unwrap();
        assert_eq!(curve.rows.len(), 2);
        for (row, &r) in curve.rows.iter().zip(&spec.r_grid) {
            assert_eq!(row.r, r);
            assert_eq!(row.lower_bound, gaussian_tail(r));
            assert_eq!(row.methods[0].tally.reps_done, 5);
        }
    }
}
