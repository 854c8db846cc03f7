//! Two molecules sharing one cavity mode: parity blocks, 2D surfaces,
//! nuclear correlation fits, the exact symmetric-sector solve and the
//! collective scaling of ground-state effects.

mod blocks;
mod boa2d;
mod exact;
mod fit;
mod pes2d;
mod sampler;
mod scaling;

pub use boa2d::{boa_two_transitions, ProductVibBasis};
pub use blocks::{build_parity_blocks, full_pair_matrix, pair_basis, pair_matrix, parity_blocks, MolPoint, ParityBlocks};
pub use fit::{fit_harmonic, FitOptions, HarmonicFit};
pub use pes2d::{coupled_pes_two, dark_state_splitting, pair_dipole, CoupledPES2D, DarkStateSplitting, PES2D_LABELS};
pub use sampler::{correlation_fits, CorrelationFits, MolSampler, PairSurfaces};
pub use exact::{
    full_two_mol_hamiltonian, solve_exact_two, two_mol_basis_drift, two_mol_dipole, two_mol_hamiltonian, SymmetricBasis,
    TwoMolBasis, TwoMolSolve,
};
pub use scaling::{collective_scaling_report, log_log_slope, ScalingReport, ScalingRow};
