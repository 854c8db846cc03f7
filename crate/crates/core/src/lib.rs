//! Molecules with electronic and nuclear degrees of freedom coupled to a
//! single cavity mode.
//!
//! The model molecule has one active electron moving along `x` and one
//! nuclear coordinate `R`. Everything is in atomic units internally;
//! conversions to eV and mÅ happen only at the output layer (see [`units`]).
//!
//! Module map:
//! - [`numerics`]: grids, finite-difference operators, eigensolvers, gauge fixing
//! - [`molecule`]: bare-molecule model, Born-Oppenheimer structure, exact solve, calibration
//! - [`cavity`]: one molecule in a cavity, polaritonic surfaces, ultrastrong-coupling ground state
//! - [`multimol`]: two molecules sharing one mode, 2D surfaces, correlation fits, scaling
//! - [`spectra`]: absorption cross sections and spectral comparisons
//! - [`nonbo`]: non-adiabatic correction terms, analytic crossing model, validity criterion

pub mod cavity;
pub mod error;
pub mod molecule;
pub mod multimol;
pub mod nonbo;
pub mod numerics;
pub mod spectra;
pub mod units;

pub use error::{Error, Result};
