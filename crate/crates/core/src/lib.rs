//! Cascaded variational quantum eigensolver.
//!
//! The device side runs a fixed set of measurement circuits exactly once.
//! Every later quantity (energy, normalization, gradients for any parameter
//! vector) is computed classically from the recorded samples, so the
//! optimization loop never returns to the device.
//!
//! ```no_run
//! use cvqe::prelude::*;
//!
//! let h = Hamiltonian::two_site_hubbard(-0.158, 1.0);
//! let initial = CircuitSpec::hadamard_layer(4);
//! let compiled = h.compile();
//! let plan = build_plan(&h.indexing, &compiled);
//! let qpu = StatevectorQpu::new(initial.clone())?;
//! let archive = collect_archive(&qpu, &plan, SampleMode::Exact, 0, 0, content_hash(&h, &initial, &plan))?;
//! let est = CascadeEstimator::new(&compiled, &plan, &archive)?;
//! let energy = est.energy(&BlochSinglet, &[0.0, 0.0])?;
//! # Ok::<(), cvqe::Error>(())
//! ```

pub mod ansatz;
pub mod circuits;
pub mod error;
pub mod estimator;
pub mod fock;
pub mod formats;
pub mod hamiltonian;
pub mod optimizer;
pub mod oracle;
pub mod pipeline;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::ansatz::{Ansatz, AnsatzConfig, BlochSinglet, FnAnsatz, JastrowGutzwiller, LambdaValue, ParameterDomain};
    pub use crate::circuits::{CircuitSpec, GateKind, GateOp, SampleMode, SampleSet, StatevectorQpu};
    pub use crate::estimator::{build_plan, collect_archive, content_hash, CascadeEstimator, MeasurementPlan, SampleArchive};
    pub use crate::fock::{OccupationFamily, SystemIndexing};
    pub use crate::hamiltonian::{Hamiltonian, InteractionTerm};
    pub use crate::optimizer::{gradient_descent, CascadeObjective, OptimizationTrace, OptimizerConfig, StepSize};
    pub use crate::Error;
}
