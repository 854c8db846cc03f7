use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::observables::{observe, MoleculeObservables, ObservableReport};
use super::MoleculeParams;
use crate::numerics::optimize::nelder_mead;
use crate::numerics::Grid1D;
use crate::{Error, Result};

/// Settings for [`calibrate`]. `Z`, `r0` and `De` stay at their initial
/// values; `alpha`, `R0`, `A` and `M` are varied on a log scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationOptions {
    pub grid_x: Grid1D,
    /// Weight of the dipole term relative to the other three.
    pub dipole_weight: f64,
    pub max_iterations: u64,
    /// Extra simplex restarts from the best point with randomized step sizes.
    pub restarts: usize,
    pub seed: u64,
    /// Relative tolerances on ω_vib, ΔR and the transition energy.
    pub tolerances: [f64; 3],
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self {
            grid_x: crate::molecule::default_grid_x(),
            dipole_weight: 0.3,
            max_iterations: 400,
            restarts: 1,
            seed: 0,
            tolerances: [0.05, 0.10, 0.02],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub params: MoleculeParams,
    pub targets: MoleculeObservables,
    pub measured: ObservableReport,
    /// Signed relative errors of ω_vib, ΔR, transition energy and dipole.
    pub residuals: [f64; 4],
    pub objective: f64,
    pub evaluations: usize,
}

const FREE: usize = 4;

fn pack(p: &MoleculeParams) -> Vec<f64> {
    vec![p.alpha.ln(), p.r_eq.ln(), p.a.ln(), p.mass.ln()]
}

fn unpack(base: &MoleculeParams, x: &[f64]) -> MoleculeParams {
    MoleculeParams { alpha: x[0].exp(), r_eq: x[1].exp(), a: x[2].exp(), mass: x[3].exp(), ..*base }
}

fn objective(rel: &[f64; 4], dipole_weight: f64) -> f64 {
    rel[0].powi(2) + rel[1].powi(2) + rel[2].powi(2) + dipole_weight * rel[3].powi(2)
}

/// Fit the free parameters so that the measured observables match `targets`.
///
/// The transition energy is matched as the vertical gap at the ground
/// equilibrium. Fails with the best residuals when the tolerances are not met.
pub fn calibrate(targets: &MoleculeObservables, init: &MoleculeParams, opts: &CalibrationOptions) -> Result<CalibrationReport> {
    init.validate()?;
    if targets.as_array().iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::param("calibration targets must be positive"));
    }
    let eval = |x: &[f64]| -> f64 {
        let p = unpack(init, x);
        match observe(&p, &opts.grid_x, targets.omega_vib) {
            Ok(r) => objective(&r.observables.relative_errors(targets), opts.dipole_weight),
            Err(_) => 1e3,
        }
    };
    let mut rng = StdRng::seed_from_u64(opts.seed);
    let mut best = pack(init);
    let mut best_value = eval(&best);
    let mut evaluations = 1;
    for round in 0..=opts.restarts {
        let scale = if round == 0 { 1.0 } else { rng.random_range(0.3..1.0) };
        let step: Vec<f64> = [0.02, 0.01, 0.02, 0.05].iter().map(|s| s * scale).collect();
        let r = nelder_mead(eval, &best, &step, opts.max_iterations, 1e-12)?;
        evaluations += r.evaluations;
        if r.value < best_value {
            best_value = r.value;
            best = r.x;
        }
    }
    let params = unpack(init, &best);
    let measured = observe(&params, &opts.grid_x, targets.omega_vib)?;
    let residuals = measured.observables.relative_errors(targets);
    let ok = residuals.iter().zip(&opts.tolerances).all(|(r, t)| r.abs() <= *t);
    if !ok {
        return Err(Error::Calibration { evaluations, residuals: residuals.to_vec() });
    }
    debug_assert_eq!(best.len(), FREE);
    Ok(CalibrationReport { params, targets: *targets, measured, residuals, objective: best_value, evaluations })
}
