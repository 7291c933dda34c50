//! Two-phase variational optimization of a snapshot bag.
//!
//! The cost at epoch `t` is
//!
//! ```text
//! cost = g * E(theta) - mu(t) * Tr log(M(theta) + eps I)
//! ```
//!
//! A barrier-only pre-optimization first lifts the smallest eigenvalue of `M`
//! above `-x_eps * |eps0(N, L)|`; the main phase then minimizes the full cost
//! with Adam under time-dependent `mu`, `beta1` and `beta2`. Any step that
//! leaves the feasible region is undone and retried with a smaller learning rate.

use serde::{Deserialize, Serialize};

use crate::corrmat::{assemble_from_table, CompiledHamiltonian, CorrelationMatrix, ProductCache};
use crate::error::{Error, Result};
use crate::model::Hamiltonian;
use crate::pauli::{basis_dimension, expand_square};
use crate::scalar::Real;
use crate::shadows::{BlochTable, Factors, SnapshotBag};
use crate::spectral::{eigh, Eigen};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleParams {
    /// Main-phase epoch count `T`.
    pub epochs: usize,
    /// Barrier weight at `t = 0`; `None` means `0.05 / (1 + 3L + 9L(L-1)/2)`.
    pub mu0: Option<f64>,
    /// Energy weight; `None` means `1 / (L * sum |c_m|)`.
    pub g: Option<f64>,
    pub x_eps_target: f64,
    pub lr0: f64,
    pub adam_eps: f64,
    pub backoff_factor: f64,
    pub grad_ratio_cap: f64,
    pub preopt_gap: f64,
    pub preopt_max_steps: usize,
    pub preopt_beta1: f64,
    pub preopt_beta2: f64,
    pub max_retries: usize,
}

impl Default for ScheduleParams {
    fn default() -> Self {
        Self {
            epochs: 300,
            mu0: None,
            g: None,
            x_eps_target: 0.03,
            lr0: 0.05,
            adam_eps: 1e-8,
            backoff_factor: 0.9,
            grad_ratio_cap: 1.5,
            preopt_gap: 0.1,
            preopt_max_steps: 2000,
            preopt_beta1: 0.9,
            preopt_beta2: 0.999,
            max_retries: 50,
        }
    }
}

impl ScheduleParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lr0", self.lr0),
            ("adam_eps", self.adam_eps),
            ("backoff_factor", self.backoff_factor),
            ("grad_ratio_cap", self.grad_ratio_cap),
            ("preopt_gap", self.preopt_gap),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.x_eps_target > 0.0 && self.x_eps_target <= 1.0) {
            return Err(Error::Invalid(format!("x_eps_target must lie in (0, 1], got {}", self.x_eps_target)));
        }
        if self.backoff_factor >= 1.0 {
            return Err(Error::Invalid("backoff_factor must be below 1".into()));
        }
        if self.epochs == 0 {
            return Err(Error::Invalid("epochs must be at least 1".into()));
        }
        for (name, b) in [("preopt_beta1", self.preopt_beta1), ("preopt_beta2", self.preopt_beta2)] {
            if !(0.0..1.0).contains(&b) {
                return Err(Error::Invalid(format!("{name} must lie in [0, 1)")));
            }
        }
        if let Some(mu0) = self.mu0 {
            if !(mu0 > 0.0) {
                return Err(Error::Invalid("mu0 must be positive".into()));
            }
        }
        if let Some(g) = self.g {
            if !(g > 0.0) {
                return Err(Error::Invalid("g must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Constants of the smallest-eigenvalue ansatz `(b0 - alpha0 * L) / sqrt(N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenFloor {
    pub alpha0: f64,
    pub b0: f64,
}

impl Default for EigenFloor {
    fn default() -> Self {
        Self { alpha0: 70.0, b0: 340.0 }
    }
}

impl EigenFloor {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha0 >= 0.0 && self.b0 >= 0.0) {
            return Err(Error::Invalid(format!("eigen floor constants must be non-negative: {self:?}")));
        }
        Ok(())
    }
}

/// Floor used during optimization, with the `L + 2` safety margin.
pub fn epsilon0(snapshots: usize, sites: usize, floor: &EigenFloor) -> f64 {
    (floor.b0 - floor.alpha0 * (sites as f64 + 2.0)) / (snapshots as f64).sqrt()
}

/// Barrier shift `eps = x_eps * |eps0|`; feasibility means `lambda_min(M) > -eps`.
pub fn barrier_shift(snapshots: usize, sites: usize, x_eps: f64, floor: &EigenFloor) -> f64 {
    x_eps * epsilon0(snapshots, sites, floor).abs()
}

pub fn default_mu0(sites: usize) -> f64 {
    5e-2 / basis_dimension(sites) as f64
}

pub fn mu_schedule(t: usize, epochs: usize, mu0: f64) -> f64 {
    let x = std::f64::consts::PI * t as f64 / (4.0 / 3.0 * epochs as f64 + 1.0);
    0.25 * mu0 * (1.0 + x.cos()).powi(2)
}

/// Adam decay rates along the main phase; both peak at `t = 2T/3`.
pub fn beta_schedules(t: usize, epochs: usize) -> (f64, f64) {
    let tau = t as f64 / (4.0 / 3.0 * epochs as f64);
    let bump = (tau - 0.5).powi(2) / 2.0 - 0.125;
    (0.6 + bump * -2.8, 0.85 + bump * -1.192)
}

/// `g = 1 / (L * sum_m |c_m|)` with `c_m` the per-site coefficients; identity terms are ignored.
pub fn g_coefficient(h: &Hamiltonian, sites: usize) -> Result<f64> {
    if h.sites() != sites {
        return Err(Error::Dimension { expected: sites, found: h.sites() });
    }
    let total: f64 = h.terms().iter().filter(|(_, s)| !s.is_identity()).map(|(c, _)| c.abs()).sum();
    if total == 0.0 {
        return Err(Error::Invalid("Hamiltonian has no non-zero Pauli coefficients".into()));
    }
    let per_site = total / sites as f64;
    Ok(1.0 / (sites as f64 * per_site))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunPhase {
    Preopt,
    Main,
    Done,
}

/// One row of the convergence trace, taken after the accepted step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub phase: RunPhase,
    pub epoch: usize,
    pub cost: f64,
    pub energy: f64,
    pub energy_density: f64,
    pub lambda_min: f64,
    pub lr: f64,
    pub mu: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub x_eps: f64,
    pub retries: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct OptimizerState<T: Real> {
    pub phase: RunPhase,
    /// Steps taken in the current phase.
    pub t: usize,
    pub lr: f64,
    pub m: Vec<T>,
    pub v: Vec<T>,
    pub x_eps: f64,
    pub preopt_steps: usize,
    pub history: Vec<EpochRecord>,
}

impl<T: Real> OptimizerState<T> {
    fn fresh(len: usize, lr: f64, phase: RunPhase) -> Self {
        Self {
            phase,
            t: 0,
            lr,
            m: vec![T::zero(); len],
            v: vec![T::zero(); len],
            x_eps: 1.0,
            preopt_steps: 0,
            history: Vec::new(),
        }
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer(f, self)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let f = std::io::BufReader::new(std::fs::File::open(path)?);
        Ok(serde_json::from_reader(f)?)
    }
}

/// Shadow estimates, `M`, its spectrum and the energy at one iterate.
pub struct Evaluation<T: Real> {
    pub table: BlochTable<T>,
    pub corr: CorrelationMatrix<T>,
    pub eigen: Eigen<T>,
    pub energy: T,
}

impl<T: Real> Evaluation<T> {
    pub fn lambda_min(&self) -> T {
        self.eigen.min()
    }
}

#[derive(Debug, Clone)]
pub struct CostGrad<T> {
    pub cost: T,
    /// Row-major `N x L`.
    pub grad: Vec<T>,
    pub energy_grad: Vec<T>,
    pub barrier_grad: Vec<T>,
    pub lambda_min: T,
    pub energy: T,
    /// True when the barrier gradient was scaled down to the ratio cap.
    pub capped: bool,
}

fn mean_abs<T: Real>(v: &[T]) -> T {
    if v.is_empty() {
        return T::zero();
    }
    v.iter().fold(T::zero(), |a, x| a + x.abs()) / T::of(v.len() as f64)
}

/// Cost, gradient and diagnostics for explicit `(g, mu, eps)`; `cap` limits the
/// mean-absolute barrier gradient to `cap` times the energy one.
pub fn cost_and_grad<T: Real>(
    bag: &SnapshotBag<T>,
    h: &Hamiltonian,
    cache: &ProductCache,
    g: f64,
    mu: f64,
    eps: f64,
    cap: Option<f64>,
) -> Result<CostGrad<T>> {
    let objective = Objective::new(cache, h)?;
    let eval = objective.evaluate(bag)?;
    objective.gradient(&eval, T::of(g), T::of(mu), T::of(eps), cap.map(T::of))
}

/// Cost function bound to one model and basis.
pub struct Objective<'a, T: Real> {
    cache: &'a ProductCache,
    hamiltonian: CompiledHamiltonian<T>,
}

impl<'a, T: Real> Objective<'a, T> {
    pub fn new(cache: &'a ProductCache, h: &Hamiltonian) -> Result<Self> {
        if h.sites() != cache.sites() {
            return Err(Error::Dimension { expected: cache.sites(), found: h.sites() });
        }
        Ok(Self { cache, hamiltonian: CompiledHamiltonian::new(h) })
    }

    pub fn evaluate(&self, bag: &SnapshotBag<T>) -> Result<Evaluation<T>> {
        if bag.sites() != self.cache.sites() {
            return Err(Error::Dimension { expected: self.cache.sites(), found: bag.sites() });
        }
        let table = bag.bloch_table();
        let corr = assemble_from_table(&table, self.cache)?;
        let eigen = eigh(corr.matrix())?;
        let energy = self.hamiltonian.energy(&table);
        Ok(Evaluation { table, corr, eigen, energy })
    }

    pub fn cost(&self, eval: &Evaluation<T>, g: T, mu: T, eps: T) -> Result<T> {
        let barrier = if mu == T::zero() { T::zero() } else { eval.eigen.trace_log_shifted(eps)? };
        Ok(g * eval.energy - mu * barrier)
    }

    pub fn gradient(&self, eval: &Evaluation<T>, g: T, mu: T, eps: T, cap: Option<T>) -> Result<CostGrad<T>> {
        let cost = self.cost(eval, g, mu, eps)?;
        let len = eval.table.snapshots() * eval.table.sites();
        let energy_grad = if g == T::zero() {
            vec![T::zero(); len]
        } else {
            self.hamiltonian.gradient(&eval.table).into_iter().map(|x| g * x).collect()
        };
        let mut barrier_grad = if mu == T::zero() {
            vec![T::zero(); len]
        } else {
            let inverse = eval.eigen.inverse_shifted(eps)?;
            let weights = self.cache.contract(&inverse);
            let weighted: Vec<(T, &Factors)> = weights.iter().map(|&w| -mu * w).zip(self.cache.factors()).collect();
            eval.table.gradient(&weighted)
        };
        let mut capped = false;
        if let Some(cap) = cap {
            let (eb, bb) = (mean_abs(&energy_grad), mean_abs(&barrier_grad));
            if eb > T::zero() && bb > cap * eb {
                let scale = cap * eb / bb;
                barrier_grad.iter_mut().for_each(|x| *x = *x * scale);
                capped = true;
            }
        }
        let grad = energy_grad.iter().zip(&barrier_grad).map(|(a, b)| *a + *b).collect();
        Ok(CostGrad {
            cost,
            grad,
            energy_grad,
            barrier_grad,
            lambda_min: eval.lambda_min(),
            energy: eval.energy,
            capped,
        })
    }
}

/// Final numbers of a completed run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub sites: usize,
    pub snapshots: usize,
    pub epsilon0: f64,
    pub eps: f64,
    pub mu0: f64,
    pub g: f64,
    pub preopt_steps: usize,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub final_lambda_min: f64,
    pub amplitude_factor: f64,
}

/// The full algorithm for one model, basis and schedule.
pub struct Optimizer<'a, T: Real> {
    objective: Objective<'a, T>,
    hamiltonian: &'a Hamiltonian,
    params: ScheduleParams,
    floor: EigenFloor,
}

impl<'a, T: Real> Optimizer<'a, T> {
    pub fn new(cache: &'a ProductCache, h: &'a Hamiltonian, params: ScheduleParams, floor: EigenFloor) -> Result<Self> {
        params.validate()?;
        floor.validate()?;
        Ok(Self { objective: Objective::new(cache, h)?, hamiltonian: h, params, floor })
    }

    pub fn params(&self) -> &ScheduleParams {
        &self.params
    }

    pub fn mu0(&self) -> f64 {
        self.params.mu0.unwrap_or_else(|| default_mu0(self.hamiltonian.sites()))
    }

    pub fn g(&self) -> Result<f64> {
        match self.params.g {
            Some(g) => Ok(g),
            None => g_coefficient(self.hamiltonian, self.hamiltonian.sites()),
        }
    }

    pub fn epsilon0(&self, bag: &SnapshotBag<T>) -> f64 {
        epsilon0(bag.snapshots(), bag.sites(), &self.floor)
    }

    /// Feasibility threshold of the main phase.
    pub fn main_shift(&self, bag: &SnapshotBag<T>) -> f64 {
        barrier_shift(bag.snapshots(), bag.sites(), self.params.x_eps_target, &self.floor)
    }

    /// Adam step with backoff: returns the accepted evaluation and the retry count.
    /// `bag` is restored to its pre-step angles if the retry budget runs out.
    #[allow(clippy::too_many_arguments)]
    fn step(
        &self,
        bag: &mut SnapshotBag<T>,
        state: &mut OptimizerState<T>,
        grad: &[T],
        beta1: f64,
        beta2: f64,
        eps: f64,
        epoch_label: usize,
    ) -> Result<(Evaluation<T>, usize)> {
        let (b1, b2) = (T::of(beta1), T::of(beta2));
        let one = T::one();
        for ((m, v), g) in state.m.iter_mut().zip(state.v.iter_mut()).zip(grad) {
            *m = b1 * *m + (one - b1) * *g;
            *v = b2 * *v + (one - b2) * *g * *g;
        }
        let k = (state.t + 1) as i32;
        let bc1 = one - b1.powi(k);
        let bc2 = one - b2.powi(k);
        let adam_eps = T::of(self.params.adam_eps);
        let direction: Vec<T> = state
            .m
            .iter()
            .zip(&state.v)
            .map(|(m, v)| (*m / bc1) / ((*v / bc2).sqrt() + adam_eps))
            .collect();
        let start = bag.theta().to_vec();
        let mut retries = 0;
        loop {
            let lr = T::of(state.lr);
            for ((t, t0), d) in bag.theta_mut().iter_mut().zip(&start).zip(&direction) {
                *t = *t0 - lr * *d;
            }
            let eval = self.objective.evaluate(bag)?;
            if eval.lambda_min().as_f64() > -eps {
                return Ok((eval, retries));
            }
            retries += 1;
            if retries > self.params.max_retries {
                bag.set_theta(&start)?;
                return Err(Error::Stalled { epoch: epoch_label, retries, history: state.history.clone() });
            }
            state.lr *= self.params.backoff_factor;
        }
    }

    /// Barrier-only descent (`g = 0`, `mu = mu0`) that keeps the shift `gap`
    /// below the current smallest eigenvalue until that eigenvalue clears the target floor.
    pub fn preoptimize(&self, bag: &mut SnapshotBag<T>) -> Result<OptimizerState<T>> {
        self.preoptimize_observed(bag, &mut |_| {})
    }

    pub fn preoptimize_observed(
        &self,
        bag: &mut SnapshotBag<T>,
        observer: &mut dyn FnMut(&EpochRecord),
    ) -> Result<OptimizerState<T>> {
        let p = &self.params;
        let e0 = self.epsilon0(bag).abs();
        let target = -p.x_eps_target * e0;
        let mu0 = self.mu0();
        let sites = bag.sites() as f64;
        let mut state = OptimizerState::fresh(bag.theta().len(), p.lr0, RunPhase::Preopt);
        let mut eval = self.objective.evaluate(bag)?;
        while eval.lambda_min().as_f64() <= target {
            if state.t >= p.preopt_max_steps {
                return Err(Error::PreoptNonConvergence {
                    steps: state.t,
                    lambda_min: eval.lambda_min().as_f64(),
                    target,
                });
            }
            let eps = p.preopt_gap - eval.lambda_min().as_f64();
            state.x_eps = eps / e0;
            let cg = self.objective.gradient(&eval, T::zero(), T::of(mu0), T::of(eps), None)?;
            let epoch = state.t;
            let (next, retries) = self.step(bag, &mut state, &cg.grad, p.preopt_beta1, p.preopt_beta2, eps, epoch)?;
            eval = next;
            let record = EpochRecord {
                phase: RunPhase::Preopt,
                epoch: state.t,
                cost: self.objective.cost(&eval, T::zero(), T::of(mu0), T::of(eps))?.as_f64(),
                energy: eval.energy.as_f64(),
                energy_density: eval.energy.as_f64() / sites,
                lambda_min: eval.lambda_min().as_f64(),
                lr: state.lr,
                mu: mu0,
                beta1: p.preopt_beta1,
                beta2: p.preopt_beta2,
                x_eps: state.x_eps,
                retries,
            };
            observer(&record);
            state.history.push(record);
            state.t += 1;
        }
        state.preopt_steps = state.t;
        Ok(state)
    }

    /// Resets the moments and learning rate for the main phase.
    pub fn begin_main(&self, state: &mut OptimizerState<T>) {
        let preopt_history = std::mem::take(&mut state.history);
        let steps = state.preopt_steps;
        *state = OptimizerState::fresh(state.m.len(), self.params.lr0, RunPhase::Main);
        state.preopt_steps = steps;
        state.history = preopt_history;
        state.x_eps = self.params.x_eps_target;
    }

    /// Main phase. Accepts a state straight from [`Self::preoptimize`] or a
    /// resumed mid-run main-phase state.
    pub fn optimize(&self, bag: &mut SnapshotBag<T>, state: &mut OptimizerState<T>) -> Result<RunReport> {
        self.optimize_observed(bag, state, &mut |_| {})
    }

    pub fn optimize_observed(
        &self,
        bag: &mut SnapshotBag<T>,
        state: &mut OptimizerState<T>,
        observer: &mut dyn FnMut(&EpochRecord),
    ) -> Result<RunReport> {
        match state.phase {
            RunPhase::Preopt => self.begin_main(state),
            RunPhase::Main => {}
            RunPhase::Done => return Err(Error::Invalid("optimization already finished".into())),
        }
        if state.m.len() != bag.theta().len() {
            return Err(Error::Dimension { expected: bag.theta().len(), found: state.m.len() });
        }
        let p = &self.params;
        let eps = self.main_shift(bag);
        let (mu0, g) = (self.mu0(), self.g()?);
        let sites = bag.sites() as f64;
        let mut eval = self.objective.evaluate(bag)?;
        if eval.lambda_min().as_f64() <= -eps {
            return Err(Error::BarrierDomain { lambda_min: eval.lambda_min().as_f64(), eps });
        }
        let initial_energy = state
            .history
            .iter()
            .find(|r| r.phase == RunPhase::Main)
            .map(|r| r.energy)
            .unwrap_or(eval.energy.as_f64());
        let initial_energy = if state.t == 0 { eval.energy.as_f64() } else { initial_energy };
        while state.t < p.epochs {
            let t = state.t;
            let mu = mu_schedule(t, p.epochs, mu0);
            let (b1, b2) = beta_schedules(t, p.epochs);
            let cg = self.objective.gradient(&eval, T::of(g), T::of(mu), T::of(eps), Some(T::of(p.grad_ratio_cap)))?;
            let (next, retries) = self.step(bag, state, &cg.grad, b1, b2, eps, t)?;
            eval = next;
            let record = EpochRecord {
                phase: RunPhase::Main,
                epoch: t,
                cost: self.objective.cost(&eval, T::of(g), T::of(mu), T::of(eps))?.as_f64(),
                energy: eval.energy.as_f64(),
                energy_density: eval.energy.as_f64() / sites,
                lambda_min: eval.lambda_min().as_f64(),
                lr: state.lr,
                mu,
                beta1: b1,
                beta2: b2,
                x_eps: p.x_eps_target,
                retries,
            };
            observer(&record);
            state.history.push(record);
            state.t += 1;
        }
        state.phase = RunPhase::Done;
        Ok(RunReport {
            sites: bag.sites(),
            snapshots: bag.snapshots(),
            epsilon0: self.epsilon0(bag),
            eps,
            mu0,
            g,
            preopt_steps: state.preopt_steps,
            initial_energy,
            final_energy: eval.energy.as_f64(),
            final_lambda_min: eval.lambda_min().as_f64(),
            amplitude_factor: amplitude_factor(bag, self.hamiltonian)?.as_f64(),
        })
    }

    /// Pre-optimization followed by the main phase.
    pub fn run(&self, bag: &mut SnapshotBag<T>) -> Result<(OptimizerState<T>, RunReport)> {
        let mut state = self.preoptimize(bag)?;
        let report = self.optimize(bag, &mut state)?;
        Ok((state, report))
    }
}

/// `f = <H^2> / <H>^2` under the bag's shadow.
pub fn amplitude_factor<T: Real>(bag: &SnapshotBag<T>, h: &Hamiltonian) -> Result<T> {
    let table = bag.bloch_table();
    let e = CompiledHamiltonian::<T>::new(h).energy(&table);
    if e == T::zero() {
        return Err(Error::ZeroEnergy);
    }
    let sq = CompiledHamiltonian::<T>::new(&expand_square(h)?).energy(&table);
    Ok(sq / (e * e))
}

/// Applies the amplitude correction to a Pauli expectation; the identity is never rescaled.
pub fn rescale<T: Real>(value: T, f: T, is_identity: bool) -> T {
    if is_identity {
        value
    } else {
        value * f
    }
}
