//! Grid and curve engine behavior: determinism across worker counts,
//! checkpoint interruption and resume, paired comparisons, and the curve
//! protocol.

use hollowgram_cli::csv_out::grid_csv_string;
use hollowgram_cli::experiments::{
    diff_grids, linspace, resume_grid, run_curve, run_grid, run_grid_with, CurveSpec, GridSpec,
    Method, RunOptions,
};
use hollowgram_cli::HarnessError;

fn small_spec(seed: u64) -> GridSpec {
    GridSpec {
        n: 32,
        sigma: 1.0,
        a_grid: linspace(1.5, 9.0, 4),
        b_grid: linspace(0.2, 2.0, 3),
        reps: 4,
        methods: vec![Method::SpectralLloyd, Method::Spectral, Method::RandomLloyd],
        master_seed: seed,
    }
}

#[test]
fn worker_counts_and_reruns_give_identical_bytes() {
    let spec = small_spec(11);
    let one = run_grid(&spec, 1, None).unwrap();
    let eight = run_grid(&spec, 8, None).unwrap();
    let again = run_grid(&spec, 3, None).unwrap();
    let reference = grid_csv_string(&one).unwrap();
    assert_eq!(reference, grid_csv_string(&eight).unwrap());
    assert_eq!(reference, grid_csv_string(&again).unwrap());
}

#[test]
fn interrupted_run_resumes_to_the_uninterrupted_result() {
    let dir = tempfile::tempdir().unwrap();
    let checkpoint = dir.path().join("grid.jsonl");
    let spec = small_spec(12);

    let partial = run_grid_with(
        &spec,
        &RunOptions {
            workers: 2,
            checkpoint: Some(checkpoint.clone()),
            stop_after_cells: Some(spec.cell_count() / 2),
            ..RunOptions::default()
        },
    )
    .unwrap();
    assert!(!partial.is_complete(), "interruption left cells undone");

    let resumed = resume_grid(&checkpoint).unwrap();
    let reference = run_grid(&spec, 1, None).unwrap();
    assert_eq!(resumed, reference);
    assert_eq!(
        grid_csv_string(&resumed).unwrap(),
        grid_csv_string(&reference).unwrap()
    );
}

#[test]
fn resume_on_a_complete_checkpoint_is_a_no_op() {
    let dir = tempfile::tempdir().unwrap();
    let checkpoint = dir.path().join("grid.jsonl");
    let spec = small_spec(13);
    let full = run_grid(&spec, 2, Some(&checkpoint)).unwrap();
    let before = std::fs::read(&checkpoint).unwrap();
    let resumed = resume_grid(&checkpoint).unwrap();
    assert_eq!(resumed, full);
    // nothing was appended
    assert_eq!(before, std::fs::read(&checkpoint).unwrap());
}

#[test]
fn edited_checkpoint_spec_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let checkpoint = dir.path().join("grid.jsonl");
    let spec = small_spec(14);
    run_grid_with(
        &spec,
        &RunOptions {
            workers: 1,
            checkpoint: Some(checkpoint.clone()),
            stop_after_cells: Some(3),
            ..RunOptions::default()
        },
    )
    .unwrap();

    let text = std::fs::read_to_string(&checkpoint).unwrap();
    let edited = text.replacen("\"reps\":4", "\"reps\":5", 1);
    assert_ne!(text, edited, "the header carries reps");
    std::fs::write(&checkpoint, edited).unwrap();
    match resume_grid(&checkpoint) {
        Err(HarnessError::SpecHashMismatch { .. }) => {}
        other => panic!("expected SpecHashMismatch, got {other:?}"),
    }
}

#[test]
fn corrupt_checkpoint_line_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let checkpoint = dir.path().join("grid.jsonl");
    let spec = small_spec(15);
    run_grid_with(
        &spec,
        &RunOptions {
            workers: 1,
            checkpoint: Some(checkpoint.clone()),
            stop_after_cells: Some(2),
            ..RunOptions::default()
        },
    )
    .unwrap();
    let mut text = std::fs::read_to_string(&checkpoint).unwrap();
    text.push_str("{\"spec_hash\": 1, \"garbage\n");
    std::fs::write(&checkpoint, text).unwrap();
    match resume_grid(&checkpoint) {
        Err(HarnessError::CorruptCheckpoint { .. }) => {}
        other => panic!("expected CorruptCheckpoint, got {other:?}"),
    }
}

#[test]
fn methods_see_the_same_datasets_regardless_of_the_requested_set() {
    // paired evaluation: the oracle's tallies cannot depend on which other
    // methods run alongside it
    let mut lean = small_spec(16);
    lean.methods = vec![Method::OracleSupervised];
    let mut full = small_spec(16);
    full.methods = vec![
        Method::SpectralLloyd,
        Method::Spectral,
        Method::RandomLloyd,
        Method::OracleSupervised,
    ];
    let lean_result = run_grid(&lean, 2, None).unwrap();
    let full_result = run_grid(&full, 2, None).unwrap();
    let slot = full_result.method_index(Method::OracleSupervised).unwrap();
    for (a, b) in lean_result.cells.iter().zip(&full_result.cells) {
        assert_eq!(a.tallies[0], b.tallies[slot]);
    }
}

#[test]
fn diff_of_a_method_with_itself_is_zero() {
    let result = run_grid(&small_spec(17), 2, None).unwrap();
    let diff = diff_grids(&result, Method::Spectral, &result, Method::Spectral).unwrap();
    assert!(diff.values.iter().all(|&v| v == 0.0));
    let cross = diff_grids(&result, Method::SpectralLloyd, &result, Method::Spectral).unwrap();
    assert!(cross.values.iter().all(|&v| (-1.0..=1.0).contains(&v)));
}

#[test]
fn diff_requires_identical_specs() {
    let r1 = run_grid(&small_spec(18), 1, None).unwrap();
    let r2 = run_grid(&small_spec(19), 1, None).unwrap();
    assert!(matches!(
        diff_grids(&r1, Method::Spectral, &r2, Method::Spectral),
        Err(HarnessError::SpecMismatch)
    ));
}

#[test]
fn curve_high_snr_risk_is_negligible() {
    let spec = CurveSpec {
        n: 300,
        p: 600,
        sigma: 1.0,
        r_grid: vec![8.0],
        reps: 50,
        methods: vec![Method::SpectralLloyd],
        master_seed: 21,
    };
    let curve = run_curve(&spec, 2).unwrap();
    let mean = curve.rows[0].methods[0].tally.mean_miscls();
    assert!(mean <= 1e-3, "mean misclassified fraction {mean}");
}

#[test]
fn curve_risk_decreases_along_the_snr_grid() {
    let spec = CurveSpec {
        n: 120,
        p: 240,
        sigma: 1.0,
        r_grid: vec![2.0, 4.0, 6.0],
        reps: 200,
        methods: vec![Method::SpectralLloyd],
        master_seed: 22,
    };
    let curve = run_curve(&spec, 2).unwrap();
    let means: Vec<f64> = curve
        .rows
        .iter()
        .map(|row| row.methods[0].tally.mean_miscls())
        .collect();
    assert!(
        means[0] > means[1] && means[1] > means[2],
        "means not decreasing: {means:?}"
    );
    // delta solved from r round-trips through the SNR
    for row in &curve.rows {
        let config =
            hollowgram_core::ProblemConfig::new(spec.n, spec.p, spec.sigma, row.delta).unwrap();
        let r = hollowgram_core::snr(&config).unwrap();
        assert!((r - row.r).abs() <= 1e-9 * row.r);
    }
}
