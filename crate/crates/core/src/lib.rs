//! Mean-field dynamics of fermions on finite-dimensional Hilbert spaces.
//!
//! The crate propagates the exact N-body von Neumann equation next to the
//! time-dependent Hartree-Fock (TDHF) equation for the one-body density and
//! measures every quantity that controls their distance:
//!
//! * [`tensor`]: dense operator algebra (tensor products, permutations,
//!   antisymmetrizers, partial traces, trace and operator norms, propagators).
//! * [`fock`]: the occupation-number representation of the antisymmetric
//!   subspace, Slater determinants and reduced density operators.
//! * [`nbody`]: the mean-field Hamiltonian and exact N-body evolution.
//! * [`tdhf`]: TDHF integrators in operator and orbital form.
//! * [`hierarchy`]: hierarchy error terms, remainders and trace-norm bounds.
//! * [`experiments`]: the convergence sweep, bound audit and closure tables.

pub mod error;
pub mod experiments;
pub mod fock;
pub mod hierarchy;
pub mod nbody;
pub mod random;
pub mod tdhf;
pub mod tensor;

pub use error::{Error, Result};
pub use fock::{AntisymDensity, FockBasis, SlaterOrbitals};
pub use hierarchy::{BoundForm, BoundReport};
pub use nbody::{MeanFieldSystem, Representation, Trajectory, TrajectoryMeta};
pub use tdhf::TdhfState;
pub use tensor::{CMatrix, Operator, Permutation, Space, C64};
