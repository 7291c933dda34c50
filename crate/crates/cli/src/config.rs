//! Run configuration: every knob of a run in one JSON document.
//!
//! ```json
//! {
//!   "model": "main",
//!   "sites": 8,
//!   "snapshots": 16384,
//!   "seed": 1,
//!   "weights": [2, 5],
//!   "schedule": { "epochs": 300, "x_eps_target": 0.03, "lr0": 0.05 },
//!   "floor": { "alpha0": 70.0, "b0": 340.0 }
//! }
//! ```
//!
//! `model` is a builtin name, a path to a model file, or an inline model.
//! `floor` is a constant pair, an inline fit, or a path to `floor.json`.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use shadowvar::oracle::{FloorFit, MAX_EXACT_SITES};
use shadowvar::{
    builtin_model, enumerate_basis, epsilon0, g_coefficient, EigenFloor, Hamiltonian, ModelFile, ScheduleParams,
    BUILTIN_MODELS,
};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSpec {
    /// Builtin name or path to a model JSON file.
    Named(String),
    Inline(ModelFile),
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec::Named("main".into())
    }
}

impl ModelSpec {
    pub fn resolve(&self) -> CliResult<ModelFile> {
        match self {
            ModelSpec::Inline(m) => Ok(m.clone()),
            ModelSpec::Named(name) => {
                if let Some(m) = builtin_model(name) {
                    return Ok(m);
                }
                let path = Path::new(name);
                if !path.is_file() {
                    return Err(CliError::Validation(format!(
                        "model \"{name}\" is neither a builtin ({}) nor a readable file",
                        BUILTIN_MODELS.join(", ")
                    )));
                }
                read_json(path)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FloorSpec {
    Constants(EigenFloor),
    Fit(FloorFit),
    File(PathBuf),
}

impl FloorSpec {
    pub fn resolve(&self) -> CliResult<EigenFloor> {
        match self {
            FloorSpec::Constants(f) => Ok(*f),
            FloorSpec::Fit(fit) => Ok(fit.floor),
            FloorSpec::File(path) => {
                let spec: FloorSpec = read_json(path)?;
                match spec {
                    FloorSpec::File(_) => Err(CliError::Validation(format!(
                        "{}: floor file must hold constants or a fit, not another path",
                        path.display()
                    ))),
                    other => other.resolve(),
                }
            }
        }
    }
}

pub const DEFAULT_WEIGHTS: [usize; 2] = [2, 5];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    F64,
    F32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub sites: usize,
    pub snapshots: usize,
    pub seed: u64,
    /// Maximum weight of the correlation-matrix basis (1 or 2).
    pub basis_weight: usize,
    /// Contiguous-string weights reported against the exact solution;
    /// unset means `[2, 5]` without the weights above `sites`.
    pub weights: Option<Vec<usize>>,
    pub schedule: ScheduleParams,
    pub floor: Option<FloorSpec>,
    pub precision: Precision,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelSpec::default(),
            sites: 8,
            snapshots: 16384,
            seed: 0,
            basis_weight: 2,
            weights: None,
            schedule: ScheduleParams::default(),
            floor: None,
            precision: Precision::F64,
            out: None,
        }
    }
}

/// Command-line values layered over a config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub model: Option<String>,
    pub sites: Option<usize>,
    pub snapshots: Option<usize>,
    pub seed: Option<u64>,
    pub epochs: Option<usize>,
    pub x_eps_target: Option<f64>,
    pub lr0: Option<f64>,
    pub weights: Option<Vec<usize>>,
    pub basis_weight: Option<usize>,
    pub floor: Option<PathBuf>,
    pub precision: Option<Precision>,
    pub out: Option<PathBuf>,
}

/// A validated config with its model and floor resolved.
#[derive(Debug, Clone)]
pub struct Resolved {
    /// The config with the model inlined and the floor reduced to constants.
    pub config: RunConfig,
    pub model: ModelFile,
    pub hamiltonian: Hamiltonian,
    pub floor: EigenFloor,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        read_json(path)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(m) = &o.model {
            self.model = ModelSpec::Named(m.clone());
        }
        if let Some(v) = o.sites {
            self.sites = v;
        }
        if let Some(v) = o.snapshots {
            self.snapshots = v;
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.epochs {
            self.schedule.epochs = v;
        }
        if let Some(v) = o.x_eps_target {
            self.schedule.x_eps_target = v;
        }
        if let Some(v) = o.lr0 {
            self.schedule.lr0 = v;
        }
        if let Some(v) = &o.weights {
            self.weights = Some(v.clone());
        }
        if let Some(v) = o.basis_weight {
            self.basis_weight = v;
        }
        if let Some(v) = &o.floor {
            self.floor = Some(FloorSpec::File(v.clone()));
        }
        if let Some(v) = o.precision {
            self.precision = v;
        }
        if let Some(v) = &o.out {
            self.out = Some(v.clone());
        }
    }

    pub fn weights(&self) -> Vec<usize> {
        match &self.weights {
            Some(w) => w.clone(),
            None => DEFAULT_WEIGHTS.iter().copied().filter(|&k| k <= self.sites).collect(),
        }
    }

    /// Checks everything an optimization run would later reject.
    pub fn validate(&self) -> CliResult<Resolved> {
        let model = self.model.resolve()?;
        let hamiltonian = model.expand(self.sites)?;
        if self.snapshots == 0 {
            return Err(CliError::Validation("snapshots must be at least 1".into()));
        }
        enumerate_basis(self.sites, self.basis_weight)?;
        let weights = self.weights();
        if weights.is_empty() {
            return Err(CliError::Validation("weights must name at least one contiguous weight".into()));
        }
        if let Some(&k) = weights.iter().find(|&&k| k == 0 || k > self.sites) {
            return Err(CliError::Validation(format!("weight {k} not in 1..={}", self.sites)));
        }
        self.schedule.validate()?;
        if self.schedule.g.is_none() {
            g_coefficient(&hamiltonian, self.sites)?;
        }
        let floor = match &self.floor {
            Some(spec) => spec.resolve()?,
            None => EigenFloor::default(),
        };
        floor.validate()?;
        let e0 = epsilon0(self.snapshots, self.sites, &floor);
        if !(e0.is_finite() && e0 != 0.0) {
            return Err(CliError::Validation(format!(
                "eigen floor {floor:?} gives a zero constraint relaxation at L={}",
                self.sites
            )));
        }
        let mut config = self.clone();
        config.model = ModelSpec::Inline(model.clone());
        config.weights = Some(weights);
        config.floor = Some(FloorSpec::Constants(floor));
        Ok(Resolved { config, model, hamiltonian, floor })
    }

    /// Validation for exact diagonalization, which ignores the optimizer settings.
    pub fn validate_exact(&self) -> CliResult<Resolved> {
        if self.sites > MAX_EXACT_SITES {
            return Err(CliError::Validation(format!(
                "exact diagonalization supports at most {MAX_EXACT_SITES} sites, got {}",
                self.sites
            )));
        }
        self.validate()
    }
}

pub(crate) fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let file = File::open(path).map_err(CliError::io(path))?;
    serde_json::from_reader(BufReader::new(file))
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let file = File::create(path).map_err(CliError::io(path))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(file), value)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}
