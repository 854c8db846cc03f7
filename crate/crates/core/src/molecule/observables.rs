use serde::{Deserialize, Serialize};

use super::electronic::solve_electronic;
use super::{vibrational_levels, ElectronicStructure, MoleculeParams};
use crate::numerics::optimize::{local_interpolate, sampled_minimum, scan_minimum};
use crate::numerics::{nuclear_hamiltonian, Grid1D};
use crate::spectra::{bare_transitions, omega_grid, peak_of_transitions, DEFAULT_EPSILON_EV, DEFAULT_HALF_SPAN_EV, DEFAULT_POINTS};
use crate::units::{au_to_ev, ev_to_au};
use crate::{Error, Result};

/// The four quantities the model molecules are tuned to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoleculeObservables {
    /// Vibrational quantum on the ground surface, eV.
    pub omega_vib: f64,
    /// Excited minus ground equilibrium distance, a.u.
    pub delta_r: f64,
    /// Absorption maximum, eV (the vertical gap during calibration).
    pub transition_energy: f64,
    /// `μ_eg` at the ground equilibrium, a.u.
    pub dipole_at_re: f64,
}

impl MoleculeObservables {
    pub fn as_array(&self) -> [f64; 4] {
        [self.omega_vib, self.delta_r, self.transition_energy, self.dipole_at_re]
    }

    /// Signed relative deviations from `target`.
    pub fn relative_errors(&self, target: &Self) -> [f64; 4] {
        let (a, b) = (self.as_array(), target.as_array());
        [0, 1, 2, 3].map(|i| (a[i] - b[i]) / b[i])
    }
}

/// Observables together with the geometry they were read from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableReport {
    pub observables: MoleculeObservables,
    /// Ground equilibrium distance, a.u.
    pub r_e: f64,
    /// Excited-state equilibrium distance, a.u.
    pub r_e_excited: f64,
    /// `E_e(R_e) - E_g(R_e)`, eV.
    pub vertical_gap: f64,
    /// Maximum of the Born-Oppenheimer absorption band, eV.
    pub absorption_peak: f64,
}

/// Read the observables off precomputed surfaces.
pub fn measure_observables(es: &ElectronicStructure, mass: f64) -> Result<MoleculeObservables> {
    Ok(measure_report(es, mass)?.observables)
}

pub fn measure_report(es: &ElectronicStructure, mass: f64) -> Result<ObservableReport> {
    let r = es.grid_r.points();
    let (r_g, _) = sampled_minimum(&r, es.ground())?;
    let (r_x, _) = sampled_minimum(&r, es.excited())?;
    let lv = vibrational_levels(es, 0, mass, 2)?;
    let omega_vib = lv.energies[1] - lv.energies[0];
    if !(omega_vib > 0.0) {
        return Err(Error::Diagnostic("non-positive vibrational spacing".into()));
    }
    let gap: Vec<f64> = es.excited().iter().zip(es.ground()).map(|(e, g)| e - g).collect();
    let vertical_gap = au_to_ev(local_interpolate(&r, &gap, r_g)?);
    let mu = local_interpolate(&r, &es.mu_eg(), r_g)?;
    let sticks = bare_transitions(es, mass, 24)?;
    let grid = omega_grid(vertical_gap, DEFAULT_HALF_SPAN_EV, DEFAULT_POINTS)?;
    let absorption_peak = peak_of_transitions(&sticks, DEFAULT_EPSILON_EV, &grid)?;
    Ok(ObservableReport {
        observables: MoleculeObservables {
            omega_vib: au_to_ev(omega_vib),
            delta_r: r_x - r_g,
            transition_energy: absorption_peak,
            dipole_at_re: mu,
        },
        r_e: r_g,
        r_e_excited: r_x,
        vertical_gap,
        absorption_peak,
    })
}

/// Minimum of electronic surface `k` located with on-demand solves near `R0`.
pub fn surface_minimum(p: &MoleculeParams, grid_x: &Grid1D, k: usize) -> Result<(f64, f64)> {
    let f = |r: f64| solve_electronic(p, r, grid_x, k + 1).map(|s| s.energies[k]).unwrap_or(f64::INFINITY);
    scan_minimum(f, (p.r_eq - 0.8).max(0.2), p.r_eq + 0.8, 33, 1e-8)
}

/// Observables from on-demand electronic solves, with the vertical gap as
/// the transition energy. `omega_hint` (eV) sizes the local nuclear grid.
pub fn observe(p: &MoleculeParams, grid_x: &Grid1D, omega_hint: f64) -> Result<ObservableReport> {
    let (r_g, _) = surface_minimum(p, grid_x, 0)?;
    let (r_x, _) = surface_minimum(p, grid_x, 1)?;
    let width = 1.0 / (2.0 * p.mass * ev_to_au(omega_hint)).sqrt();
    let grid_r = Grid1D::centered(r_g, 10.0 * width, 81)?;
    let eg: Vec<f64> = grid_r
        .points()
        .iter()
        .map(|&r| solve_electronic(p, r, grid_x, 1).map(|s| s.energies[0]))
        .collect::<Result<_>>()?;
    let levels = nuclear_hamiltonian(&eg, &grid_r, p.mass)?.lowest_eigenpairs(2)?;
    let at = solve_electronic(p, r_g, grid_x, 2)?;
    let gap = au_to_ev(at.energies[1] - at.energies[0]);
    Ok(ObservableReport {
        observables: MoleculeObservables {
            omega_vib: au_to_ev(levels.energies[1] - levels.energies[0]),
            delta_r: r_x - r_g,
            transition_energy: gap,
            dipole_at_re: at.dipole(grid_x, 0, 1).abs(),
        },
        r_e: r_g,
        r_e_excited: r_x,
        vertical_gap: gap,
        absorption_peak: f64::NAN,
    })
}
