use std::fs;
use std::path::Path;
use std::process::Command;

use shadowvar::{builtin_model, ModelFile, ScheduleParams, TermTemplate};
use shadowvar_cli::commands::{
    BAG, CORRELATORS, CORRMAT, EXACT_CSV, FLOOR, MANIFEST, OPERATORS, REPORT, SERIES, STATE, SWEEP, TRACE,
};
use shadowvar_cli::{
    cmd_compare, cmd_exact, cmd_floor_fit, cmd_optimize, cmd_sweep, CliError, FloorFitRequest, FloorSpec, ModelSpec,
    RunConfig, SweepRequest,
};

fn small(dir: &Path, model: &str) -> RunConfig {
    RunConfig {
        model: ModelSpec::Named(model.into()),
        sites: 4,
        snapshots: 128,
        seed: 3,
        weights: Some(vec![2, 3]),
        schedule: ScheduleParams { epochs: 6, ..ScheduleParams::default() },
        out: Some(dir.to_path_buf()),
        ..RunConfig::default()
    }
}

#[test]
fn builtin_models_resolve_to_their_coefficients() {
    let main = ModelSpec::Named("main".into()).resolve().unwrap();
    let coeffs: Vec<(f64, &str)> = main.terms.iter().map(|t| (t.coefficient, t.word.as_str())).collect();
    assert_eq!(coeffs, vec![(0.25, "ZZ"), (0.3, "YY"), (0.3, "XX"), (0.25, "Z"), (0.3, "X")]);
    let h3 = ModelSpec::Named("H3".into()).resolve().unwrap();
    let coeffs: Vec<(f64, &str)> = h3.terms.iter().map(|t| (t.coefficient, t.word.as_str())).collect();
    assert_eq!(coeffs, vec![(0.12, "ZZ"), (0.25, "XX"), (0.25, "YY"), (-2.0, "Z")]);
}

#[test]
fn model_files_and_inline_models_load() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("model.json");
    let model = ModelFile {
        name: "xy".into(),
        terms: vec![TermTemplate { coefficient: 1.0, word: "XX".into(), offsets: Some(vec![0, 2]) }],
    };
    fs::write(&path, serde_json::to_string(&model).unwrap()).unwrap();
    let cfg = RunConfig { model: ModelSpec::Named(path.display().to_string()), ..RunConfig::default() };
    assert_eq!(cfg.validate().unwrap().model, model);
    let json = format!(r#"{{"model": {}, "sites": 6}}"#, serde_json::to_string(&model).unwrap());
    let cfg: RunConfig = serde_json::from_str(&json).unwrap();
    let resolved = cfg.validate().unwrap();
    assert_eq!(resolved.hamiltonian.terms().len(), 6);
}

#[test]
fn config_rejects_unknown_fields_and_bad_values() {
    assert!(serde_json::from_str::<RunConfig>(r#"{"sitez": 4}"#).is_err());
    assert!(serde_json::from_str::<RunConfig>(r#"{"schedule": {"epoch": 4}}"#).is_err());
    let bad = [
        RunConfig { basis_weight: 3, ..RunConfig::default() },
        RunConfig { sites: 1, ..RunConfig::default() },
        RunConfig { snapshots: 0, ..RunConfig::default() },
        RunConfig { weights: Some(vec![]), ..RunConfig::default() },
        RunConfig { weights: Some(vec![9]), ..RunConfig::default() },
        RunConfig { model: ModelSpec::Named("nope".into()), ..RunConfig::default() },
        RunConfig {
            schedule: ScheduleParams { x_eps_target: 0.0, ..ScheduleParams::default() },
            ..RunConfig::default()
        },
    ];
    for cfg in bad {
        assert!(matches!(cfg.validate(), Err(CliError::Validation(_))), "{cfg:?}");
    }
    let big = RunConfig { sites: 15, ..RunConfig::default() };
    assert!(big.validate().is_ok());
    assert!(matches!(big.validate_exact(), Err(CliError::Validation(_))));
}

#[test]
fn classical_ising_exact_energy() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = RunConfig { sites: 4, out: Some(tmp.path().join("exact")), ..small(tmp.path(), "ising") };
    let outcome = cmd_exact(&cfg).unwrap();
    assert!((outcome.meta.energy + 4.0).abs() < 1e-10);
}

#[test]
fn transverse_ising_exact_energy_matches_free_fermions() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = RunConfig { sites: 8, out: Some(tmp.path().join("exact")), ..small(tmp.path(), "H1") };
    let outcome = cmd_exact(&cfg).unwrap();
    let l = 8.0;
    let free: f64 = (0..8)
        .map(|n| -2.0 * (std::f64::consts::PI * (2.0 * n as f64 + 1.0) / (2.0 * l)).sin().abs())
        .sum();
    assert!((outcome.meta.energy - free).abs() < 1e-8);
}

#[test]
fn exact_table_round_trips_through_compare() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = RunConfig { sites: 8, weights: Some(vec![2, 5]), out: Some(tmp.path().join("exact")), ..small(tmp.path(), "main") };
    let outcome = cmd_exact(&cfg).unwrap();
    let c = cmd_compare(&outcome.dir, &outcome.dir.join(EXACT_CSV), Some(&tmp.path().join("self"))).unwrap();
    assert_eq!(c.energy_density_error, 0.0);
    assert!(c.rms_error_by_weight.values().all(|&e| e == 0.0));
    assert_eq!(c.rms_error_by_weight.len(), 2);
    for row in &c.series {
        assert_eq!(row.zz_exact, row.zz_rescaled);
        assert_eq!(row.xx_exact, row.xx_rescaled);
    }
}

#[test]
fn optimize_writes_a_self_describing_run() {
    let tmp = tempfile::tempdir().unwrap();
    let run = cmd_optimize(&small(&tmp.path().join("run"), "main"), &mut |_| {}).unwrap();
    for f in [MANIFEST, TRACE, BAG, STATE, CORRELATORS, CORRMAT] {
        assert!(run.dir.join(f).is_file(), "{f}");
    }
    let trace = fs::read_to_string(run.dir.join(TRACE)).unwrap();
    let header = trace.lines().next().unwrap();
    assert_eq!(header, "phase,epoch,cost,energy,energy_density,lambda_min,lr,mu,beta1,beta2,x_eps,retries");
    assert_eq!(trace.lines().filter(|l| l.starts_with("main,")).count(), 6);

    let exact = cmd_exact(&RunConfig { out: Some(tmp.path().join("exact")), ..small(tmp.path(), "main") }).unwrap();
    let c = cmd_compare(&run.dir, &exact.dir, None).unwrap();
    assert!((c.amplitude_factor - run.report.amplitude_factor).abs() < 1e-12);
    assert_eq!(c.snapshots, Some(128));
    assert_eq!(c.reference.len(), 2);
    for f in [REPORT, OPERATORS, SERIES] {
        assert!(run.dir.join("compare").join(f).is_file(), "{f}");
    }
    // a run directory is never reused
    assert!(matches!(
        cmd_optimize(&small(&run.dir, "main"), &mut |_| {}),
        Err(CliError::Validation(_))
    ));
}

#[test]
fn identical_seeds_give_identical_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let a = cmd_optimize(&small(&tmp.path().join("a"), "H3"), &mut |_| {}).unwrap();
    let b = cmd_optimize(&small(&tmp.path().join("b"), "H3"), &mut |_| {}).unwrap();
    for f in [TRACE, CORRELATORS, CORRMAT, BAG] {
        assert_eq!(fs::read(a.dir.join(f)).unwrap(), fs::read(b.dir.join(f)).unwrap(), "{f}");
    }
    let mut other = small(&tmp.path().join("c"), "H3");
    other.seed = 4;
    let c = cmd_optimize(&other, &mut |_| {}).unwrap();
    assert_ne!(fs::read(a.dir.join(TRACE)).unwrap(), fs::read(c.dir.join(TRACE)).unwrap());
}

#[test]
fn single_precision_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = small(tmp.path(), "H2");
    cfg.precision = shadowvar_cli::Precision::F32;
    let run = cmd_optimize(&cfg, &mut |_| {}).unwrap();
    assert!(run.report.final_energy < run.report.initial_energy);
}

#[test]
fn compare_refuses_mismatched_models_and_sizes() {
    let tmp = tempfile::tempdir().unwrap();
    let run = cmd_optimize(&small(&tmp.path().join("run"), "main"), &mut |_| {}).unwrap();
    let other = cmd_exact(&RunConfig { out: Some(tmp.path().join("h3")), ..small(tmp.path(), "H3") }).unwrap();
    let err = cmd_compare(&run.dir, &other.dir, Some(&tmp.path().join("x"))).unwrap_err();
    assert!(matches!(&err, CliError::Validation(m) if m.contains("model mismatch")), "{err}");
    let wide = RunConfig { sites: 6, out: Some(tmp.path().join("l6")), ..small(tmp.path(), "main") };
    let wide = cmd_exact(&wide).unwrap();
    let err = cmd_compare(&run.dir, &wide.dir, Some(&tmp.path().join("y"))).unwrap_err();
    assert!(matches!(&err, CliError::Validation(m) if m.contains("site count")), "{err}");
}

#[test]
fn floor_fit_round_trips_as_floor_override() {
    let tmp = tempfile::tempdir().unwrap();
    let req = FloorFitRequest {
        sites: vec![3, 4],
        snapshots: vec![256, 1024],
        seed: 2,
        repeats: 2,
        workers: 2,
        out: tmp.path().join("floor"),
    };
    let fit = cmd_floor_fit(&req).unwrap();
    assert_eq!(fit.samples.len(), 8);
    let cfg = RunConfig { floor: Some(FloorSpec::File(req.out.join(FLOOR))), ..RunConfig::default() };
    assert_eq!(cfg.validate().unwrap().floor, fit.floor);

    let single = FloorFitRequest { sites: vec![4], snapshots: vec![256], out: tmp.path().join("single"), ..req };
    let err = cmd_floor_fit(&single).unwrap_err();
    assert!(matches!(&err, CliError::Numerical(m) if m.contains("rank deficient")), "{err}");
}

#[test]
fn sweep_emits_one_row_per_run() {
    let tmp = tempfile::tempdir().unwrap();
    let req = SweepRequest {
        config: small(tmp.path(), "H3"),
        snapshots: vec![64, 128],
        seeds: vec![1],
        workers: 2,
        out: tmp.path().join("sweep"),
    };
    let rows = cmd_sweep(&req, &|_| {}).unwrap();
    assert_eq!(rows.len(), 2);
    let table = fs::read_to_string(req.out.join(SWEEP)).unwrap();
    assert_eq!(table.lines().count(), 3);
    assert!(table.lines().next().unwrap().contains("reference_k3"));
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_shadowvar"))
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let status = binary().args(["optimize", "--basis-weight", "3", "-L", "4"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
    let bad = tmp.path().join("bad.json");
    fs::write(&bad, r#"{"snapshots": 0}"#).unwrap();
    let status = binary().args(["optimize", "--config"]).arg(&bad).status().unwrap();
    assert_eq!(status.code(), Some(2));
    let status = binary()
        .args(["floor-fit", "--sites", "4", "--snapshots", "64", "--repeats", "1", "--out"])
        .arg(tmp.path().join("floor"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
    let out = binary()
        .args(["exact", "--model", "ising", "-L", "4", "--out"])
        .arg(tmp.path().join("exact"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("-4.0000000000"));
}

#[test]
fn every_builtin_validates() {
    for name in shadowvar::BUILTIN_MODELS {
        assert!(builtin_model(name).is_some());
        let cfg = RunConfig { model: ModelSpec::Named(name.into()), ..RunConfig::default() };
        cfg.validate().unwrap();
    }
}
