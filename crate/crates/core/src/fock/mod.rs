//! Occupation-number representation of the antisymmetric subspace.

mod basis;
mod density;
mod embed;
mod reduced;
mod slater;

pub use basis::{
    annihilation_matrix, apply_ladder_string, creation_matrix, occupied_modes, FockBasis, Ladder,
    MAX_MODES,
};
pub use density::{random_fermionic_density, validate_density, AntisymDensity, DENSITY_TOL};
pub use embed::{
    compound_matrix, compress_operator, compress_rows, embed_vector, embedding_isometry,
    VECTOR_CAP,
};
pub use reduced::{
    closure_defect, compressed_f_minus, compressed_marginal, embedded_marginal, expectation,
    one_body_reduced, reduced_density, two_body_reduced,
};
pub use slater::{slater_density, SlaterOrbitals, ORTHONORMALITY_TOL};
