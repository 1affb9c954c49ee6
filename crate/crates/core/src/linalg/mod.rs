//! Dense complex and real matrix kernel.

mod eig;
mod matrix;
mod state;

pub use eig::{hermitian_eig, top_eigenpair, SymmetricEigen, HERMITIAN_TOL};
pub use matrix::{kron, kron_all, pauli_x, pauli_y, pauli_z, ComplexMatrix, C64, KRON_DIM_CAP};
pub use state::{expectation, inner, StateVector};
