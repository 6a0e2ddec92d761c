//! Exact dynamics of entangled two-mode coherent-state superpositions under
//! zero-temperature amplitude damping.
//!
//! - [`states`]: coherent amplitudes, overlaps and the orthonormal pair basis.
//! - [`engine`]: the analytic solution and its effective two-qubit matrix.
//! - [`measures`]: negativity, concurrence and partial traces.
//! - [`closed_form`]: analytic negativities and disentanglement times.
//! - [`reservoir`]: modes and reservoirs as four effective qubits.
//! - [`fock`]: truncated Fock-space master-equation integrator used as oracle.
//! - [`reproduce`]: figure sweeps, CSV output and the oracle-check report.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Tensor code indexes several arrays with the same small indices.
#![allow(clippy::needless_range_loop)]

pub mod closed_form;
pub mod engine;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod measures;
pub mod reproduce;
pub mod reservoir;
pub mod states;

pub use engine::{density_in_qubit_basis, evolve_coefficients, CatPairState, CoefficientTensor, DensityMatrix4};
pub use error::{Error, Result};
pub use measures::{concurrence, negativity, NegativityResult};
pub use states::{Amplitude, OrthoBasisMap};
