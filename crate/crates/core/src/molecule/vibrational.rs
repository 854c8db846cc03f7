use nalgebra::DMatrix;

use super::ElectronicStructure;
use crate::numerics::{nuclear_hamiltonian, Grid1D};
use crate::{Error, Result};

/// Edge amplitude, relative to the largest amplitude, accepted for a nuclear state.
pub const NUCLEAR_TAIL_TOLERANCE: f64 = 1e-6;

/// Nuclear eigenstates on one potential-energy surface.
#[derive(Debug, Clone, PartialEq)]
pub struct VibrationalLevels {
    pub pes_tag: String,
    pub grid_r: Grid1D,
    pub energies: Vec<f64>,
    /// Columns `χ_v(R_i)` with `Σ_i χ_v(R_i)² = 1`.
    pub wavefunctions: DMatrix<f64>,
}

impl VibrationalLevels {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Probability density `|χ_v(R)|²` per unit length.
    pub fn density(&self, v: usize) -> Vec<f64> {
        let dr = self.grid_r.spacing();
        self.wavefunctions.column(v).iter().map(|c| c * c / dr).collect()
    }
}

/// Lowest `n` nuclear levels of `T_R + surface(R)`.
pub fn levels_on_surface(
    surface: &[f64],
    grid_r: &Grid1D,
    mass: f64,
    n: usize,
    tag: impl Into<String>,
) -> Result<VibrationalLevels> {
    let tag = tag.into();
    let m = surface.len();
    let imin = surface
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    if imin < 3 || imin + 3 >= m {
        return Err(Error::Window(format!(
            "{tag} surface minimum at R = {:.4} lies at the grid edge [{:.4}, {:.4}]",
            grid_r.point(imin),
            grid_r.min(),
            grid_r.max()
        )));
    }
    let h = nuclear_hamiltonian(surface, grid_r, mass)?;
    let sol = h.lowest_eigenpairs(n)?;
    for v in 0..n {
        let col = sol.vectors.column(v);
        let peak = col.amax();
        let edge = col[0].abs().max(col[m - 1].abs());
        if edge > NUCLEAR_TAIL_TOLERANCE * peak {
            let r = if col[0].abs() > col[m - 1].abs() { grid_r.min() } else { grid_r.max() };
            return Err(Error::BoxTooSmall { state: v, amplitude: edge / peak, r });
        }
    }
    Ok(VibrationalLevels { pes_tag: tag, grid_r: *grid_r, energies: sol.energies, wavefunctions: sol.vectors })
}

/// Like [`levels_on_surface`] but keeps only the levels below the first one
/// that reaches the grid edge (at least the lowest level must fit).
pub fn levels_within_window(
    surface: &[f64],
    grid_r: &Grid1D,
    mass: f64,
    n: usize,
    tag: impl Into<String>,
) -> Result<VibrationalLevels> {
    let tag = tag.into();
    match levels_on_surface(surface, grid_r, mass, n, tag.clone()) {
        Err(Error::BoxTooSmall { state, .. }) if state > 0 => {
            levels_on_surface(surface, grid_r, mass, state, tag)
        }
        other => other,
    }
}

/// Lowest `n` nuclear levels on electronic surface `which`.
pub fn vibrational_levels(es: &ElectronicStructure, which: usize, mass: f64, n: usize) -> Result<VibrationalLevels> {
    if which >= es.n_states() {
        return Err(Error::param(format!("surface {which} not present ({} computed)", es.n_states())));
    }
    levels_on_surface(es.surface(which), &es.grid_r, mass, n, format!("E{which}"))
}
