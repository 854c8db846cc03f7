//! The bare model molecule: potentials, electronic and nuclear structure,
//! the full `(x, R)` solve, observables and calibration.

mod calibrate;
mod electronic;
mod exact;
mod observables;
mod params;
mod potentials;
mod structure;
mod vibrational;

pub use calibrate::{calibrate, CalibrationOptions, CalibrationReport};
pub use electronic::{solve_electronic, ElectronicStates, TAIL_TOLERANCE};
pub use exact::{
    adiabatic_dipole, adiabatic_hamiltonian, electronic_parity, electronic_population, solve_exact_adiabatic,
    solve_exact_molecule, ExactMethod,
};
pub use observables::{measure_observables, measure_report, observe, surface_minimum, MoleculeObservables, ObservableReport};
pub use params::{Fixture, MoleculeParams};
pub use potentials::{morse_frequency, potential_en, potential_nn, soft_coulomb};
pub use structure::{build_bo_structure, ElectronicStructure};
pub use vibrational::{levels_on_surface, levels_within_window, vibrational_levels, VibrationalLevels};

use crate::numerics::Grid1D;
use crate::Result;

/// Electronic grid used unless configured otherwise: `[-15, 15]` a.u., 501 points.
pub fn default_grid_x() -> Grid1D {
    Grid1D::new(-15.0, 15.0, 501).expect("static grid is valid")
}

/// Nuclear grid of a fixture, falling back to `[R0 - 1.5, R0 + 3]` with 301 points.
pub fn default_grid_r(f: &Fixture) -> Result<Grid1D> {
    match f.grid_r {
        Some(g) => Ok(g),
        None => Grid1D::new((f.params.r_eq - 1.5).max(0.1), f.params.r_eq + 3.0, 301),
    }
}
