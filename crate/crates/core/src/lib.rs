//! Quantum-correlation measures for small finite-dimensional systems.
//!
//! The central quantity is built from a density matrix's spectral
//! decomposition: the eigenvalue-weighted entanglement of the eigenvectors
//! plus a weighted sum of pairwise non-orthogonality between their reduced
//! states, minimised over the unitary freedom inside degenerate eigenvalue
//! blocks. Total, one-sided, strict (geometric-mean), multipartite, and a
//! closed-form two-qubit strict variant are provided, together with a
//! numerical discord baseline to compare against.
//!
//! Module map:
//! - [`linalg`]: dense complex matrices, Hermitian eigensolver, PSD square
//!   root, tensor product, partial trace.
//! - [`state`]: validated density matrices and pure states, spectral
//!   decomposition into degeneracy blocks, constructors, state-file IO.
//! - [`entanglement`]: concurrence (pure and mixed), entanglement entropy,
//!   multipartite bipartition mean, block averages.
//! - [`nonorthogonality`]: Uhlmann fidelity, the pair functionals, and the
//!   weighted pair sums.
//! - [`measures`]: the measures themselves plus the block-unitary search.
//! - [`discord`]: grid-search discord baseline for two qubits.
//! - [`sampling`]: seeded random states for tests, benches, and the CLI.
//!
//! ```
//! use qcorr_core::measures::{q_total, MeasureConfig};
//! use qcorr_core::state::bell_mixture;
//!
//! let rho = bell_mixture(0.5).unwrap();
//! let report = q_total(&rho, &MeasureConfig::default()).unwrap();
//! assert!((report.value - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);
//! ```

pub mod discord;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod nonorthogonality;
pub(crate) mod optim;
pub mod sampling;
pub mod state;
pub mod tol;

pub use discord::{discord_a, DiscordGrid};
pub use entanglement::EntanglementChoice;
pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use measures::{
    classify, q_multipartite, q_one_sided, q_strict, q_strict_multipartite, q_strict_two_qubit,
    q_subject, q_total, MeasureConfig, MeasureReport, MinimizationMode, OptimizerConfig, Side,
    WeightRule,
};
pub use nonorthogonality::{NonOrthogonalityChoice, NonOrthogonalityKind, PairConvention};
pub use num_complex::Complex64;
pub use state::{
    bell_mixture, CorrelationClass, CorrelationKind, DensityMatrix, PureState,
    SpectralDecomposition,
};
