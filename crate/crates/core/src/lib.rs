//! Variational ground states of 1-D spin chains from parameterized classical-shadow snapshots.
//!
//! A bag of `N` snapshots over `L` sites carries one angle `theta[l][j]` per
//! site and snapshot together with a fixed random single-qubit rotation. The
//! angles are optimized to minimize the shadow estimate of the energy while a
//! log-barrier keeps the weight-<=2 correlation matrix `M` (nearly) positive
//! semi-definite.
//!
//! Numeric kernels are generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar for the common cases.
//!
//! ```
//! use shadowvar::{builtin, sample_haar, ProductCache};
//!
//! let h = builtin("main", 4).unwrap();
//! let bag = sample_haar::<f64>(7, 64, 4).unwrap();
//! let cache = ProductCache::for_sites(4).unwrap();
//! let m = shadowvar::assemble(&bag, &cache).unwrap();
//! assert_eq!(m.dim(), 1 + 3 * 4 + 9 * 4 * 3 / 2);
//! let e = shadowvar::energy(&bag, &h).unwrap();
//! assert!(e.is_finite());
//! ```

pub mod corrmat;
pub mod error;
pub mod model;
pub mod optimizer;
pub mod oracle;
pub mod pauli;
pub mod rng;
pub mod scalar;
pub mod shadows;
pub mod spectral;

pub use corrmat::{assemble, energy, energy_grad, CompiledHamiltonian, CorrelationMatrix, ProductCache};
pub use error::{Error, Result};
pub use model::{builtin, builtin_model, Hamiltonian, ModelFile, TermTemplate, BUILTIN_MODELS};
pub use optimizer::{
    amplitude_factor, barrier_shift, beta_schedules, cost_and_grad, epsilon0, g_coefficient, mu_schedule,
    EigenFloor, EpochRecord, Objective, Optimizer, OptimizerState, RunPhase, RunReport, ScheduleParams,
};
pub use oracle::{
    error_report, exact_expectation, fit_eigen_floor, ground_state, shadow_budget, ErrorReport, ExactTable,
    FloorSample, GroundState,
};
pub use pauli::{enumerate_basis, enumerate_contiguous, expand_square, PauliAxis, PauliString, Phase};
pub use scalar::Real;
pub use shadows::{born_sample, sample_haar, BagCheckpoint, ProductState, SnapshotBag};
pub use spectral::{eigh, eigvalsh, Eigen, HermitianMatrix};

pub type Bag = SnapshotBag<f64>;
pub type Bag32 = SnapshotBag<f32>;
pub type Matrix = HermitianMatrix<f64>;
pub type Matrix32 = HermitianMatrix<f32>;
pub type Correlations = CorrelationMatrix<f64>;
pub type State = OptimizerState<f64>;
pub type State32 = OptimizerState<f32>;
