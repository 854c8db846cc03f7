//! Grids, differential operators, eigensolvers and gauge-fixed derivatives.

mod banded;
mod eigen;
mod fd;
mod gauge;
mod grid;
pub mod optimize;

pub use banded::SymBanded;
pub use eigen::{solve_hermitian, solve_hermitian_all, BasisTag, EigenSolution};
pub use fd::{kinetic_band, kinetic_matrix, nuclear_hamiltonian};
pub use gauge::{align_signs, gauge_fixed_derivative, gauge_fixed_second_derivative, DerivativeScheme};
pub use grid::Grid1D;
