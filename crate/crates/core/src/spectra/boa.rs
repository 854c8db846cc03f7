use super::Transition;
use crate::molecule::{levels_on_surface, levels_within_window, ElectronicStructure, VibrationalLevels};
use crate::numerics::Grid1D;
use crate::{Error, Result};

/// Sticks from the lowest level of `ground` to every level of `excited`,
/// with strengths `|Σ_R χ_v(R) μ(R) χ_0(R)|²`.
pub fn vibronic_transitions(ground: &VibrationalLevels, excited: &VibrationalLevels, dipole: &[f64]) -> Result<Vec<Transition>> {
    if ground.grid_r != excited.grid_r || dipole.len() != ground.grid_r.len() {
        return Err(Error::param("vibronic transitions need a shared nuclear grid"));
    }
    let chi0 = ground.wavefunctions.column(0);
    Ok((0..excited.len())
        .map(|v| {
            let chi = excited.wavefunctions.column(v);
            let d: f64 = (0..dipole.len()).map(|i| chi[i] * dipole[i] * chi0[i]).sum();
            Transition { energy: excited.energies[v] - ground.energies[0], strength: d * d }
        })
        .collect())
}

/// Born-Oppenheimer absorption sticks: ground surface plus excited surfaces
/// given as `(E_s(R), μ_{0s}(R))`, up to `n_levels` nuclear levels per
/// excited surface (fewer if higher levels reach the grid edge).
pub fn boa_transitions(
    ground: &[f64],
    excited: &[(&[f64], &[f64])],
    grid_r: &Grid1D,
    mass: f64,
    n_levels: usize,
) -> Result<Vec<Transition>> {
    let g = levels_on_surface(ground, grid_r, mass, 1, "ground")?;
    let mut out = Vec::new();
    for (s, (surface, dipole)) in excited.iter().enumerate() {
        let lv = levels_within_window(surface, grid_r, mass, n_levels, format!("excited {s}"))?;
        out.extend(vibronic_transitions(&g, &lv, dipole)?);
    }
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(out)
}

/// Bare-molecule vibronic sticks on the `g → e` band.
pub fn bare_transitions(es: &ElectronicStructure, mass: f64, n_levels: usize) -> Result<Vec<Transition>> {
    let mu = es.mu_eg();
    boa_transitions(es.ground(), &[(es.excited(), &mu)], &es.grid_r, mass, n_levels)
}
