use serde::{Deserialize, Serialize};

use crate::spectra::Spectrum;
use crate::units::ev_to_au;
use crate::{Error, Result};

/// One cavity mode: frequency, coupling strength and Fock cutoff (a.u.).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityParams {
    pub omega_c: f64,
    pub g: f64,
    pub n_max: usize,
}

impl CavityParams {
    /// Cutoff for singly excited physics.
    pub const DEFAULT_N_MAX: usize = 4;
    /// Cutoff for ground-state scans at strong coupling.
    pub const USC_N_MAX: usize = 6;

    pub fn new(omega_c: f64, g: f64, n_max: usize) -> Result<Self> {
        let c = Self { omega_c, g, n_max };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_c > 0.0 && self.omega_c.is_finite()) {
            return Err(Error::param(format!("omega_c must be positive, got {}", self.omega_c)));
        }
        if !(self.g >= 0.0 && self.g.is_finite()) {
            return Err(Error::param(format!("g must be non-negative, got {}", self.g)));
        }
        if self.n_max < 1 {
            return Err(Error::param("n_max must be at least 1"));
        }
        Ok(())
    }

    pub fn with_g(self, g: f64) -> Self {
        Self { g, ..self }
    }

    pub fn with_n_max(self, n_max: usize) -> Self {
        Self { n_max, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CavityRegime {
    Microcavity,
    Plasmonic,
}

/// Coupling per photon for a typical mode volume, `κ ω_c²` with `ω_c` in eV.
pub fn coupling_from_volume(omega_c_ev: f64, regime: CavityRegime) -> Result<f64> {
    if !(omega_c_ev > 0.0) {
        return Err(Error::param(format!("photon energy must be positive, got {omega_c_ev} eV")));
    }
    let kappa = match regime {
        CavityRegime::Microcavity => 1.34e-7,
        CavityRegime::Plasmonic => 3.72e-4,
    };
    Ok(kappa * omega_c_ev * omega_c_ev)
}

/// Cavity frequency tuned to the absorption maximum (a.u.).
pub fn zero_detuning_omega(spectrum: &Spectrum) -> Result<f64> {
    Ok(ev_to_au(spectrum.peak_position()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{absorption_from_transitions, omega_grid, Transition};

    #[test]
    fn volume_estimates() {
        assert_eq!(coupling_from_volume(1.0, CavityRegime::Microcavity).unwrap(), 1.34e-7);
        assert_eq!(coupling_from_volume(1.0, CavityRegime::Plasmonic).unwrap(), 3.72e-4);
        assert!((coupling_from_volume(2.0, CavityRegime::Microcavity).unwrap() - 5.36e-7).abs() < 1e-20);
        assert!(coupling_from_volume(0.0, CavityRegime::Plasmonic).is_err());
    }

    #[test]
    fn validation() {
        assert!(CavityParams::new(0.1, 0.0, 1).is_ok());
        assert!(CavityParams::new(0.0, 0.1, 1).is_err());
        assert!(CavityParams::new(0.1, -0.1, 1).is_err());
        assert!(CavityParams::new(0.1, 0.1, 0).is_err());
    }

    #[test]
    fn zero_detuning_finds_single_line() {
        let grid = omega_grid(2.0, 1.0, 2001).unwrap();
        let s = absorption_from_transitions(&[Transition { energy: ev_to_au(2.1), strength: 1.0 }], 0.002, &grid).unwrap();
        assert!((zero_detuning_omega(&s).unwrap() - ev_to_au(2.1)).abs() < ev_to_au(1e-4));
    }
}
