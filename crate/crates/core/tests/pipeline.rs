use mechcat::phase_space::{CatState, Parity};
use mechcat::pipeline::config::{DriveConfig, TransmissivitySetting};
use mechcat::pipeline::figures::fig2;
use mechcat::pipeline::optimize::{optimize_over, SearchAxis};
use mechcat::pipeline::{execute, run_pipeline, Command, Output, Protocol, RunConfig, RunManifest};

#[test]
fn reference_run_matches_single_photon_numbers() {
    let m = run_pipeline(&RunConfig::default(), &Output::default()).unwrap();
    let r = &m.results[0];
    assert!((r.fidelity - 0.98).abs() < 0.02);
    assert!((r.herald_probability / 0.126 - 1.0).abs() < 0.1);
    assert!(r.negativity_stored.unwrap() > 0.0);
    assert!(r.negativity_readout.unwrap() > 0.0);
}

#[test]
fn identity_pipeline_passes_the_ground_state() {
    let mut cfg = RunConfig::default();
    cfg.schedule.blue1 = DriveConfig::power(0.0);
    cfg.task.r_m = None;
    cfg.task.n = 0;
    cfg.task.alpha = vec![1e-4];
    cfg.task.transmissivity = TransmissivitySetting::Power(1.0);
    let m = run_pipeline(&cfg, &Output::default()).unwrap();
    let r = &m.results[0];
    assert_eq!(r.parity, Parity::Even);
    assert!((r.herald_probability - 1.0).abs() < 1e-9);
    assert!((r.fidelity - 1.0).abs() < 1e-6, "{}", r.fidelity);
    assert!(r.negativity_mech < 1e-6);
}

#[test]
fn manifest_config_reproduces_scalars() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::default();
    cfg.task.alpha = vec![1.1, 1.3];
    let first = run_pipeline(&cfg, &Output::to(tmp.path(), false)).unwrap();
    let loaded = RunManifest::load(&tmp.path().join("manifest.json")).unwrap();
    let second = run_pipeline(&loaded.config, &Output::default()).unwrap();
    assert_eq!(first.scalars(), second.scalars());
    assert_eq!(loaded.scalars(), second.scalars());
}

#[test]
fn optimizer_never_loses_to_its_grid() {
    let mut cfg = RunConfig::default();
    cfg.task.sweeps.alpha_min = 2.0;
    cfg.task.sweeps.alpha_max = 2.0;
    cfg.task.sweeps.photons = vec![2, 3];
    let protocol = Protocol::new(&cfg).unwrap();
    for row in fig2(&protocol, &cfg).unwrap() {
        let cat = CatState::new(row.alpha, row.parity).unwrap();
        let grid = optimize_over(
            &protocol,
            row.n,
            &cat,
            SearchAxis::new(0.05, 0.99, 0.01),
            SearchAxis::point(row.cavity_r),
            &cfg.task.grid,
        )
        .unwrap();
        assert!(row.fidelity >= grid.grid_fidelity - 1e-12, "{row:?}");
    }
}

#[test]
fn optimize_command_tabulates_each_amplitude() {
    let mut cfg = RunConfig::default();
    cfg.task.alpha = vec![1.0, 1.2];
    let outcome = execute(Command::Optimize, &cfg, &Output::default()).unwrap();
    let rows = outcome.manifest.tables.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r["fidelity"].as_f64().unwrap() > 0.9));
    assert_eq!(outcome.exit_code(), 0);
}
