use serde::{Deserialize, Serialize};

use super::NonBOModel;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidityBand {
    Valid,
    Marginal,
    Invalid,
}

impl ValidityBand {
    pub fn of(ratio: f64) -> Self {
        if ratio < 0.1 {
            ValidityBand::Valid
        } else if ratio <= 1.0 {
            ValidityBand::Marginal
        } else {
            ValidityBand::Invalid
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub p_typ: f64,
    /// `a0 P_typ / (16 M h0²)`: first-derivative coupling acting on a
    /// nuclear state of momentum `P_typ`, over the gap `2 h0`.
    pub ratio_p: f64,
    /// `a0² / (25√5 M h0³)`: largest second-derivative coupling over the local gap.
    pub ratio_p2: f64,
    pub band_p: ValidityBand,
    pub band_p2: ValidityBand,
    /// The worse of the two bands.
    pub verdict: ValidityBand,
}

/// Root-mean-square momentum `√(M ω / 2)` of a harmonic ground state.
pub fn typical_momentum(mass: f64, omega_vib: f64) -> f64 {
    (mass * omega_vib / 2.0).sqrt()
}

/// Coupling `h0` at the avoided crossings for `n` molecules with splitting
/// `omega_r`: `Ω_R/2` for one molecule; for more, neighbouring surfaces
/// (polaritons and the dark manifold) sit `Ω_R/2` apart, so `h0 = Ω_R/4`.
pub fn crossing_coupling(omega_r: f64, n: usize) -> Result<f64> {
    match n {
        0 => Err(Error::param("need at least one molecule")),
        1 => Ok(omega_r / 2.0),
        _ => Ok(omega_r / 4.0),
    }
}

/// Both validity ratios of `m` for nuclear momentum `p_typ`.
pub fn boa_validity(m: &NonBOModel, p_typ: f64) -> Result<ValidityReport> {
    if !(p_typ > 0.0) {
        return Err(Error::param(format!("momentum scale must be positive, got {p_typ}")));
    }
    if !(m.h0 > 0.0) {
        return Err(Error::Singular("validity ratio needs h0 > 0".into()));
    }
    let ratio_p = m.a0.abs() * p_typ / (16.0 * m.mass * m.h0 * m.h0);
    let ratio_p2 = m.a0 * m.a0 / (25.0 * 5f64.sqrt() * m.mass * m.h0.powi(3));
    let (band_p, band_p2) = (ValidityBand::of(ratio_p), ValidityBand::of(ratio_p2));
    Ok(ValidityReport { p_typ, ratio_p, ratio_p2, band_p, band_p2, verdict: band_p.max(band_p2) })
}
