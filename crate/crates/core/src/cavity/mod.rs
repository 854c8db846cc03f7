//! One molecule in one cavity mode, without the rotating-wave approximation.

mod bare;
mod exact;
mod params;
mod surfaces;
mod usc;

pub use bare::{bare_states, BareStates};
pub use exact::{
    bare_state_transitions, cavity_dipole, cavity_hamiltonian, cavity_transitions, ground_photon_number,
    photon_number, product_parity, solve_cavity, solve_exact_cavity, CavitySolve, FOCK_TOLERANCE, MAX_N_MAX,
};
pub use params::{coupling_from_volume, zero_detuning_omega, CavityParams, CavityRegime};
pub use surfaces::{coupled_pes_single, BlockBasis, PolaritonSurfaces};
pub(crate) use usc::ground_block_from;
pub use usc::{bond_length_shift, ground_state_pes_usc, usc_bond_shift, BondShift, ShiftOptions, UscGround};

#[cfg(test)]
mod tests;
