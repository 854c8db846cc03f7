//! Couplings between polaritonic surfaces beyond the Born-Oppenheimer
//! approximation: finite-difference evaluation, the two-level crossing
//! model, and a validity criterion built on it.

mod fit;
mod model;
mod numeric;
mod two_level;
mod validity;

pub use fit::{crossing, harmonic_fit, harmonic_from_fixture, linearized_model, HarmonicFit, HARMONIC_RESIDUAL_MAX};
pub use model::{nonbo_model, CorrectionTerms, NonBOModel};
pub use numeric::{nonbo_numeric, polariton_fields, NumericCorrections};
pub use two_level::{polariton_2x2, polariton_2x2_scan, Polariton2x2};
pub use validity::{boa_validity, crossing_coupling, typical_momentum, ValidityBand, ValidityReport};
