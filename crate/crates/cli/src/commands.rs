//! The pipelines behind each verb. Every run writes into its own directory,
//! and the files there are enough to redo the comparison later.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use shadowvar::oracle::{
    error_report_from, fit_eigen_floor, ground_state_seeded, shadow_budget, shadow_error, simulate_floor_sample,
    ExactTable, FloorFit, FloorSample,
};
use shadowvar::rng::derive_seed;
use shadowvar::shadows::Factors;
use shadowvar::{
    amplitude_factor, assemble, energy, enumerate_basis, enumerate_contiguous, sample_haar, BagCheckpoint,
    EpochRecord, Hamiltonian, ModelFile, Optimizer, PauliAxis, PauliString, ProductCache, Real, RunReport,
    SnapshotBag,
};

use crate::config::{read_json, write_json, Precision, Resolved, RunConfig};
use crate::error::{CliError, CliResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const MANIFEST: &str = "manifest.json";
pub const TRACE: &str = "trace.csv";
pub const BAG: &str = "bag.json";
pub const STATE: &str = "state.json";
pub const CORRELATORS: &str = "correlators.csv";
pub const CORRMAT: &str = "corrmat.csv";
pub const EXACT_CSV: &str = "exact.csv";
pub const EXACT_META: &str = "exact.json";
pub const REPORT: &str = "report.json";
pub const OPERATORS: &str = "operators.csv";
pub const SERIES: &str = "correlations.csv";
pub const FLOOR: &str = "floor.json";
pub const FLOOR_SAMPLES: &str = "floor_samples.csv";
pub const SWEEP: &str = "sweep.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub coefficient: f64,
    pub string: String,
}

/// Contents of `manifest.json` in an optimization run directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    /// Resolved config: model inlined, floor reduced to constants.
    pub config: RunConfig,
    pub fingerprint: String,
    pub terms: Vec<TermRecord>,
    pub report: RunReport,
}

/// Sidecar of `exact.csv` carrying what the `(string, value)` table cannot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactMeta {
    pub version: String,
    pub model: ModelFile,
    pub sites: usize,
    pub seed: u64,
    pub fingerprint: String,
    pub energy: f64,
    pub gap: f64,
    pub degenerate: bool,
    pub weights: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CorrelatorRow {
    string: String,
    weight: usize,
    raw: f64,
    rescaled: f64,
}

fn model_label(model: &ModelFile) -> String {
    model.name.replace(|c: char| !c.is_ascii_alphanumeric() && c != '-' && c != '_', "_")
}

/// Creates `dir` and refuses to reuse one that already holds `marker`.
fn prepare_dir(dir: &Path, marker: &str) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    if dir.join(marker).exists() {
        return Err(CliError::Validation(format!(
            "{} already holds a {marker}; choose another output directory",
            dir.display()
        )));
    }
    Ok(())
}

fn csv_writer(path: &Path) -> CliResult<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(CliError::io(path))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

pub fn write_trace(path: &Path, history: &[EpochRecord]) -> CliResult<()> {
    let mut w = csv_writer(path)?;
    for r in history {
        w.serialize(r)?;
    }
    w.flush().map_err(CliError::io(path))?;
    Ok(())
}

fn weight_one_to(max: usize, sites: usize) -> Vec<usize> {
    (1..=max.min(sites)).collect()
}

fn contiguous_strings(sites: usize, max_weight: usize) -> CliResult<Vec<PauliString>> {
    let mut out = Vec::new();
    for k in weight_one_to(max_weight, sites) {
        out.extend(enumerate_contiguous(sites, k)?);
    }
    Ok(out)
}

/// `Z_0 Z_r` and `X_0 X_r` for `r = 1..=L/2`.
fn series_strings(sites: usize) -> Vec<(usize, PauliString, PauliString)> {
    (1..=sites / 2)
        .map(|r| {
            let zz = PauliString::from_sparse(sites, &[(0, PauliAxis::Z), (r, PauliAxis::Z)]);
            let xx = PauliString::from_sparse(sites, &[(0, PauliAxis::X), (r, PauliAxis::X)]);
            (r, zz, xx)
        })
        .collect()
}

fn estimates<T: Real>(bag: &SnapshotBag<T>, strings: &[PauliString]) -> BTreeMap<PauliString, f64> {
    let factors: Vec<Factors> = strings.iter().map(Factors::of).collect();
    let values = bag.bloch_table().estimate_many(&factors);
    strings.iter().cloned().zip(values.into_iter().map(|v| v.as_f64())).collect()
}

#[derive(Debug, Clone)]
pub struct OptimizeOutcome {
    pub dir: PathBuf,
    pub report: RunReport,
}

pub fn default_run_dir(resolved: &Resolved) -> PathBuf {
    let c = &resolved.config;
    PathBuf::from("runs").join(format!(
        "{}-L{}-N{}-s{}",
        model_label(&resolved.model),
        c.sites,
        c.snapshots,
        c.seed
    ))
}

/// Pre-optimization and main phase, then every artifact of the run.
pub fn cmd_optimize(config: &RunConfig, observer: &mut dyn FnMut(&EpochRecord)) -> CliResult<OptimizeOutcome> {
    let resolved = config.validate()?;
    let dir = config.out.clone().unwrap_or_else(|| default_run_dir(&resolved));
    prepare_dir(&dir, MANIFEST)?;
    let report = match resolved.config.precision {
        Precision::F64 => optimize_in::<f64>(&resolved, &dir, observer)?,
        Precision::F32 => optimize_in::<f32>(&resolved, &dir, observer)?,
    };
    Ok(OptimizeOutcome { dir, report })
}

fn optimize_in<T: Real>(
    r: &Resolved,
    dir: &Path,
    observer: &mut dyn FnMut(&EpochRecord),
) -> CliResult<RunReport> {
    let cfg = &r.config;
    let cache = ProductCache::new(enumerate_basis(cfg.sites, cfg.basis_weight)?)?;
    let optimizer = Optimizer::<T>::new(&cache, &r.hamiltonian, cfg.schedule.clone(), r.floor)?;
    let mut bag = sample_haar::<T>(cfg.seed, cfg.snapshots, cfg.sites)?;
    let outcome = (|| {
        let mut state = optimizer.preoptimize_observed(&mut bag, &mut *observer)?;
        let report = optimizer.optimize_observed(&mut bag, &mut state, &mut *observer)?;
        Ok::<_, shadowvar::Error>((state, report))
    })();
    let (state, report) = match outcome {
        Ok(v) => v,
        Err(e) => {
            if let shadowvar::Error::Stalled { history, .. } = &e {
                write_trace(&dir.join(TRACE), history)?;
            }
            bag.checkpoint().save(&dir.join(BAG))?;
            return Err(e.into());
        }
    };
    write_trace(&dir.join(TRACE), &state.history)?;
    bag.checkpoint().save(&dir.join(BAG))?;
    state.save(&dir.join(STATE))?;

    let f = report.amplitude_factor;
    let mut strings: Vec<PauliString> = cache.basis().to_vec();
    strings.extend(contiguous_strings(cfg.sites, cfg.weights().iter().copied().max().unwrap_or(0))?);
    strings.sort();
    strings.dedup();
    let path = dir.join(CORRELATORS);
    let mut w = csv_writer(&path)?;
    for (p, raw) in estimates(&bag, &strings) {
        let rescaled = if p.is_identity() { raw } else { f * raw };
        w.serialize(CorrelatorRow { string: p.to_string(), weight: p.weight(), raw, rescaled })?;
    }
    w.flush().map_err(CliError::io(&path))?;

    let corr = assemble(&bag, &cache)?;
    let path = dir.join(CORRMAT);
    let mut out = BufWriter::new(File::create(&path).map_err(CliError::io(&path))?);
    corr.export_csv(&cache, &mut out)?;

    let manifest = Manifest {
        version: VERSION.to_string(),
        config: cfg.clone(),
        fingerprint: r.hamiltonian.fingerprint(),
        terms: r
            .hamiltonian
            .terms()
            .iter()
            .map(|(c, s)| TermRecord { coefficient: *c, string: s.to_string() })
            .collect(),
        report: report.clone(),
    };
    write_json(&dir.join(MANIFEST), &manifest)?;
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct ExactOutcome {
    pub dir: PathBuf,
    pub meta: ExactMeta,
}

/// Ground state, weight-<=2 correlators and contiguous correlators up to the largest reported weight.
pub fn cmd_exact(config: &RunConfig) -> CliResult<ExactOutcome> {
    let resolved = config.validate_exact()?;
    let c = &resolved.config;
    let dir = config.out.clone().unwrap_or_else(|| {
        PathBuf::from("runs").join(format!("{}-L{}-exact", model_label(&resolved.model), c.sites))
    });
    prepare_dir(&dir, EXACT_META)?;
    let gs = ground_state_seeded(&resolved.hamiltonian, c.seed)?;
    let max_weight = c.weights().iter().copied().max().unwrap_or(0);
    let strings = ExactTable::standard_strings(c.sites, &weight_one_to(max_weight, c.sites))?;
    let table = ExactTable::from_ground_state(&gs, &strings)?;
    let path = dir.join(EXACT_CSV);
    let mut out = BufWriter::new(File::create(&path).map_err(CliError::io(&path))?);
    table.write_csv(&mut out)?;
    let meta = ExactMeta {
        version: VERSION.to_string(),
        model: resolved.model.clone(),
        sites: c.sites,
        seed: c.seed,
        fingerprint: resolved.hamiltonian.fingerprint(),
        energy: gs.energy,
        gap: gs.gap,
        degenerate: gs.degenerate,
        weights: c.weights(),
    };
    write_json(&dir.join(EXACT_META), &meta)?;
    Ok(ExactOutcome { dir, meta })
}

/// Reads an exact table given as the CSV file or the directory holding it.
pub fn load_exact(path: &Path) -> CliResult<(ExactMeta, ExactTable)> {
    let csv_path = if path.is_dir() { path.join(EXACT_CSV) } else { path.to_path_buf() };
    let meta_path = csv_path.with_extension("json");
    if !meta_path.is_file() {
        return Err(CliError::Validation(format!(
            "{} has no {} sidecar with the ground energy and model fingerprint",
            csv_path.display(),
            meta_path.display()
        )));
    }
    let meta: ExactMeta = read_json(&meta_path)?;
    let file = File::open(&csv_path).map_err(CliError::io(&csv_path))?;
    let table = ExactTable::read_csv(BufReader::new(file), meta.energy, meta.degenerate)?;
    if table.sites != meta.sites {
        return Err(CliError::Validation(format!(
            "{}: table has {} sites but its sidecar says {}",
            csv_path.display(),
            table.sites,
            meta.sites
        )));
    }
    Ok((meta, table))
}

/// Shadow-tomography reference for `operators` weight-`k` strings at the run's budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceLine {
    pub operators: u64,
    /// `sqrt(3^k ln(M) / N)`.
    pub shadow_error: f64,
    /// Snapshots the reference needs to reach the observed RMS error.
    pub budget_for_observed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub r: usize,
    pub zz_exact: f64,
    pub zz_estimated: f64,
    pub zz_rescaled: f64,
    pub xx_exact: f64,
    pub xx_estimated: f64,
    pub xx_rescaled: f64,
}

/// Contents of `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub sites: usize,
    pub snapshots: Option<usize>,
    pub seed: Option<u64>,
    pub fingerprint: String,
    pub exact_energy: f64,
    pub estimated_energy: f64,
    pub rescaled_energy: f64,
    pub amplitude_factor: f64,
    pub raw_energy_density_error: f64,
    pub energy_density_error: f64,
    pub rms_error_by_weight: BTreeMap<usize, f64>,
    pub rms_error_up_to_weight: BTreeMap<usize, f64>,
    pub reference: BTreeMap<usize, ReferenceLine>,
    pub degenerate: bool,
    pub series: Vec<SeriesRow>,
}

struct Estimated {
    sites: usize,
    snapshots: Option<usize>,
    seed: Option<u64>,
    fingerprint: String,
    hamiltonian: Hamiltonian,
    weights: Vec<usize>,
    values: BTreeMap<PauliString, f64>,
    energy: f64,
    f: f64,
}

fn estimated_from_run(dir: &Path) -> CliResult<Estimated> {
    let manifest: Manifest = read_json(&dir.join(MANIFEST))?;
    let resolved = manifest.config.validate()?;
    let h = resolved.hamiltonian;
    if h.fingerprint() != manifest.fingerprint {
        return Err(CliError::Validation(format!(
            "{}: model does not match the recorded fingerprint",
            dir.join(MANIFEST).display()
        )));
    }
    let cfg = &manifest.config;
    let mut strings = contiguous_strings(cfg.sites, cfg.weights().iter().copied().max().unwrap_or(0))?;
    for (_, zz, xx) in series_strings(cfg.sites) {
        strings.push(zz);
        strings.push(xx);
    }
    strings.sort();
    strings.dedup();
    let checkpoint = BagCheckpoint::load(&dir.join(BAG))?;
    let (values, energy, f) = match cfg.precision {
        Precision::F64 => bag_estimates::<f64>(&checkpoint, &h, &strings)?,
        Precision::F32 => bag_estimates::<f32>(&checkpoint, &h, &strings)?,
    };
    Ok(Estimated {
        sites: cfg.sites,
        snapshots: Some(cfg.snapshots),
        seed: Some(cfg.seed),
        fingerprint: manifest.fingerprint,
        hamiltonian: h,
        weights: cfg.weights(),
        values,
        energy,
        f,
    })
}

fn bag_estimates<T: Real>(
    checkpoint: &BagCheckpoint,
    h: &Hamiltonian,
    strings: &[PauliString],
) -> CliResult<(BTreeMap<PauliString, f64>, f64, f64)> {
    let bag = SnapshotBag::<T>::from_checkpoint(checkpoint)?;
    let f = amplitude_factor(&bag, h)?.as_f64();
    Ok((estimates(&bag, strings), energy(&bag, h)?.as_f64(), f))
}

fn estimated_from_exact(path: &Path) -> CliResult<Estimated> {
    let (meta, table) = load_exact(path)?;
    let h = meta.model.expand(meta.sites)?;
    Ok(Estimated {
        sites: meta.sites,
        snapshots: None,
        seed: None,
        fingerprint: meta.fingerprint,
        hamiltonian: h,
        weights: meta.weights,
        values: table.values,
        energy: meta.energy,
        f: 1.0,
    })
}

/// Compares a run directory (or an exact directory, as a self-check) with an exact table.
pub fn cmd_compare(source: &Path, exact: &Path, out: Option<&Path>) -> CliResult<Comparison> {
    let est = if source.join(MANIFEST).is_file() {
        estimated_from_run(source)?
    } else if source.join(EXACT_META).is_file() {
        estimated_from_exact(source)?
    } else {
        return Err(CliError::Validation(format!(
            "{} is neither a run directory ({MANIFEST}) nor an exact directory ({EXACT_META})",
            source.display()
        )));
    };
    let (meta, table) = load_exact(exact)?;
    if meta.sites != est.sites {
        return Err(CliError::Validation(format!(
            "site count mismatch: {} has L={}, {} has L={}",
            source.display(),
            est.sites,
            exact.display(),
            meta.sites
        )));
    }
    if meta.fingerprint != est.fingerprint {
        return Err(CliError::Validation(format!(
            "model mismatch: {} was run on model {} but {} holds model {}",
            source.display(),
            est.fingerprint,
            exact.display(),
            meta.fingerprint
        )));
    }
    let report = error_report_from(&est.values, est.energy, &table, &est.hamiltonian, est.f, &est.weights)?;

    let mut reference = BTreeMap::new();
    if let Some(n) = est.snapshots {
        for &k in &est.weights {
            let operators = enumerate_contiguous(est.sites, k)?.len() as u64;
            let observed = report.rms_error_by_weight.get(&k).copied();
            reference.insert(
                k,
                ReferenceLine {
                    operators,
                    shadow_error: shadow_error(k as u32, operators, n as u64),
                    budget_for_observed: observed
                        .filter(|e| *e > 0.0)
                        .and_then(|e| shadow_budget(k as u32, operators, e).ok()),
                },
            );
        }
    }

    let lookup = |p: &PauliString, from: &BTreeMap<PauliString, f64>| {
        from.get(p).copied().ok_or_else(|| CliError::Validation(format!("no value for {p}")))
    };
    let mut series = Vec::new();
    for (r, zz, xx) in series_strings(est.sites) {
        let (zz_est, xx_est) = (lookup(&zz, &est.values)?, lookup(&xx, &est.values)?);
        series.push(SeriesRow {
            r,
            zz_exact: lookup(&zz, &table.values)?,
            zz_estimated: zz_est,
            zz_rescaled: est.f * zz_est,
            xx_exact: lookup(&xx, &table.values)?,
            xx_estimated: xx_est,
            xx_rescaled: est.f * xx_est,
        });
    }

    let comparison = Comparison {
        sites: est.sites,
        snapshots: est.snapshots,
        seed: est.seed,
        fingerprint: est.fingerprint.clone(),
        exact_energy: report.exact_energy,
        estimated_energy: report.estimated_energy,
        rescaled_energy: report.rescaled_energy,
        amplitude_factor: report.amplitude_factor,
        raw_energy_density_error: report.raw_energy_density_error,
        energy_density_error: report.energy_density_error,
        rms_error_by_weight: report.rms_error_by_weight.clone(),
        rms_error_up_to_weight: report.rms_error_up_to_weight.clone(),
        reference,
        degenerate: report.degenerate,
        series,
    };

    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| source.join("compare"));
    prepare_dir(&dir, REPORT)?;
    let path = dir.join(OPERATORS);
    let mut w = csv_writer(&path)?;
    w.write_record(["string", "weight", "exact", "estimated", "rescaled"])?;
    for row in &report.operators {
        w.write_record([
            row.string.to_string(),
            row.string.weight().to_string(),
            row.exact.to_string(),
            row.estimated.to_string(),
            row.rescaled.to_string(),
        ])?;
    }
    w.flush().map_err(CliError::io(&path))?;
    let path = dir.join(SERIES);
    let mut w = csv_writer(&path)?;
    for row in &comparison.series {
        w.serialize(row)?;
    }
    w.flush().map_err(CliError::io(&path))?;
    write_json(&dir.join(REPORT), &comparison)?;
    Ok(comparison)
}

#[derive(Debug, Clone)]
pub struct FloorFitRequest {
    pub sites: Vec<usize>,
    pub snapshots: Vec<usize>,
    pub seed: u64,
    pub repeats: usize,
    pub workers: usize,
    pub out: PathBuf,
}

impl Default for FloorFitRequest {
    fn default() -> Self {
        Self {
            sites: vec![4, 6, 8],
            snapshots: vec![4096, 16384],
            seed: 0,
            repeats: 3,
            workers: 1,
            out: PathBuf::from("runs").join("floor"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct FloorSampleRow {
    sites: usize,
    snapshots: usize,
    seed: u64,
    lambda_min: f64,
    scaled: f64,
}

fn pool(workers: usize) -> CliResult<rayon::ThreadPool> {
    if workers == 0 {
        return Err(CliError::Validation("workers must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Validation(format!("cannot start worker pool: {e}")))
}

/// Smallest eigenvalues of `M` from `|0...0>` shadows over a grid of `(L, N)`, fitted to `b0 - alpha0 L`.
pub fn cmd_floor_fit(req: &FloorFitRequest) -> CliResult<FloorFit> {
    if req.sites.is_empty() || req.snapshots.is_empty() {
        return Err(CliError::Validation("site and snapshot lists must be non-empty".into()));
    }
    if req.repeats == 0 {
        return Err(CliError::Validation("repeats must be at least 1".into()));
    }
    if let Some(l) = req.sites.iter().find(|&&l| l < 2) {
        return Err(CliError::Validation(format!("need at least 2 sites, got {l}")));
    }
    if req.snapshots.contains(&0) {
        return Err(CliError::Validation("snapshot counts must be at least 1".into()));
    }
    let pool = pool(req.workers)?;
    prepare_dir(&req.out, FLOOR)?;
    let mut jobs = Vec::new();
    for &l in &req.sites {
        for &n in &req.snapshots {
            for _ in 0..req.repeats {
                let seed = derive_seed(req.seed, jobs.len() as u64);
                jobs.push((l, n, seed));
            }
        }
    }
    let samples: Vec<(FloorSample, u64)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(l, n, seed)| simulate_floor_sample(l, n, seed).map(|s| (s, seed)))
            .collect::<shadowvar::Result<_>>()
    })?;
    let path = req.out.join(FLOOR_SAMPLES);
    let mut w = csv_writer(&path)?;
    for (s, seed) in &samples {
        w.serialize(FloorSampleRow {
            sites: s.sites,
            snapshots: s.snapshots,
            seed: *seed,
            lambda_min: s.lambda_min,
            scaled: s.scaled(),
        })?;
    }
    w.flush().map_err(CliError::io(&path))?;
    let samples: Vec<FloorSample> = samples.into_iter().map(|(s, _)| s).collect();
    let fit = fit_eigen_floor(&samples)?;
    write_json(&req.out.join(FLOOR), &fit)?;
    Ok(fit)
}

#[derive(Debug, Clone)]
pub struct SweepRequest {
    pub config: RunConfig,
    pub snapshots: Vec<usize>,
    pub seeds: Vec<u64>,
    pub workers: usize,
    pub out: PathBuf,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub snapshots: usize,
    pub seed: u64,
    /// The comparison, or the numerical failure that stopped the run.
    pub result: Result<Comparison, String>,
}

/// Optimizes one run per `(N, seed)` and compares each with a shared exact table.
pub fn cmd_sweep(req: &SweepRequest, progress: &(dyn Fn(&SweepRow) + Sync)) -> CliResult<Vec<SweepRow>> {
    if req.snapshots.is_empty() || req.seeds.is_empty() {
        return Err(CliError::Validation("snapshot and seed lists must be non-empty".into()));
    }
    let mut jobs = Vec::new();
    for &n in &req.snapshots {
        for &seed in &req.seeds {
            let mut cfg = req.config.clone();
            cfg.snapshots = n;
            cfg.seed = seed;
            cfg.out = Some(req.out.join(format!("N{n}-s{seed}")));
            cfg.validate()?;
            jobs.push(cfg);
        }
    }
    let pool = pool(req.workers)?;
    fs::create_dir_all(&req.out).map_err(CliError::io(&req.out))?;
    let mut exact_cfg = req.config.clone();
    exact_cfg.out = Some(req.out.join("exact"));
    let exact = cmd_exact(&exact_cfg)?;
    let exact_csv = exact.dir.join(EXACT_CSV);
    let rows: Vec<SweepRow> = pool.install(|| {
        jobs.par_iter()
            .map(|cfg| {
                let result = cmd_optimize(cfg, &mut |_| {}).and_then(|o| cmd_compare(&o.dir, &exact_csv, None));
                let row = SweepRow {
                    snapshots: cfg.snapshots,
                    seed: cfg.seed,
                    result: match result {
                        Ok(c) => Ok(c),
                        Err(CliError::Numerical(msg)) => Err(msg),
                        Err(e) => return Err(e),
                    },
                };
                progress(&row);
                Ok(row)
            })
            .collect::<CliResult<_>>()
    })?;
    write_sweep(&req.out.join(SWEEP), &req.config.weights(), &rows)?;
    Ok(rows)
}

fn write_sweep(path: &Path, weights: &[usize], rows: &[SweepRow]) -> CliResult<()> {
    let mut w = csv_writer(path)?;
    let mut header: Vec<String> =
        ["snapshots", "seed", "status", "amplitude_factor", "energy_density_error", "raw_energy_density_error"]
            .map(String::from)
            .to_vec();
    for k in weights {
        header.push(format!("rms_k{k}"));
        header.push(format!("reference_k{k}"));
    }
    w.write_record(&header)?;
    for row in rows {
        let mut rec = vec![row.snapshots.to_string(), row.seed.to_string()];
        match &row.result {
            Ok(c) => {
                rec.push("ok".into());
                rec.push(c.amplitude_factor.to_string());
                rec.push(c.energy_density_error.to_string());
                rec.push(c.raw_energy_density_error.to_string());
                for k in weights {
                    rec.push(c.rms_error_by_weight.get(k).map(f64::to_string).unwrap_or_default());
                    rec.push(c.reference.get(k).map(|r| r.shadow_error.to_string()).unwrap_or_default());
                }
            }
            Err(msg) => {
                rec.push(msg.clone());
                rec.extend(std::iter::repeat(String::new()).take(3 + 2 * weights.len()));
            }
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(CliError::io(path))?;
    Ok(())
}
