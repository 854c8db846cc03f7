use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{fit_harmonic, FitOptions};
use super::sampler::PairSurfaces;
use crate::cavity::CavityParams;
use crate::molecule::{surface_minimum, MoleculeParams};
use crate::numerics::optimize::{minimize_bracketed, polyfit, polyval};
use crate::numerics::Grid1D;
use crate::units::bohr_to_milliangstrom;
use crate::{Error, Result};

/// One line of the scaling table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n_mol: usize,
    /// Single-molecule coupling.
    pub g: f64,
    /// `2 g √N` (a.u.).
    pub omega_r: f64,
    /// Ground-energy shift at the coupled minimum, total for all molecules (a.u.).
    pub delta_e0: f64,
    /// Per-molecule bond-length shift (bohr).
    pub delta_r0: f64,
    pub delta_r0_milliangstrom: f64,
    /// Cross coefficient of the ground surface; two molecules only.
    pub ground_beta: Option<f64>,
}

/// Ground-state observables for one and two molecules at equal collective Rabi frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub omega_c: f64,
    pub n_max: usize,
    pub rows: Vec<ScalingRow>,
    /// `d ln ΔR₀ / d ln g` for one molecule.
    pub delta_r0_slope: f64,
    /// `d ln |β| / d ln g` of the two-molecule ground surface.
    pub ground_beta_slope: f64,
    /// `ΔE₀(N=2, g/√2) / ΔE₀(N=1, g)` per scanned `g`.
    pub delta_e0_ratio: Vec<f64>,
    /// `ΔR₀(N=2, g/√2) / ΔR₀(N=1, g)` per scanned `g`.
    pub delta_r0_ratio: Vec<f64>,
}

/// Least-squares slope of `ln |y|` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::param("slope needs at least two matching points"));
    }
    if xs.iter().chain(ys).any(|v| *v == 0.0 || !v.is_finite()) {
        return Err(Error::param("log-log slope needs finite nonzero values"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.abs().ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    Ok(polyfit(&lx, &ly, 1, 0.0)?[1])
}

const HALF_WIDTH: f64 = 0.05;
const N_POINTS: usize = 13;
const DEGREE: usize = 6;

/// Minimum of a degree-6 fit through samples on `rs`.
fn fitted_minimum(rs: &[f64], ys: &[f64], center: f64) -> Result<(f64, f64)> {
    let coef = polyfit(rs, ys, DEGREE, center)?;
    let (lo, hi) = (rs[0], rs[rs.len() - 1]);
    let (x, y) = minimize_bracketed(|x| polyval(&coef, x, center), lo, hi, 1e-12)?;
    if (x - lo).abs() < 1e-3 * HALF_WIDTH || (hi - x).abs() < 1e-3 * HALF_WIDTH {
        return Err(Error::Window(format!("minimum {x} at the edge of the fitting window")));
    }
    Ok((x, y))
}

/// ΔE₀ and ΔR₀ for `n_mol` identical molecules (1 or 2) along the symmetric line.
fn ground_shifts(pair: &PairSurfaces, n_mol: usize, r_e: f64) -> Result<(f64, f64)> {
    let rs = Grid1D::centered(r_e, HALF_WIDTH, N_POINTS)?.points();
    let c = &pair.cavity;
    let samples: Vec<(f64, f64)> = rs
        .par_iter()
        .map(|&r| {
            let m = pair.first.at(r)?;
            let shift = if n_mol == 1 {
                let d = nalgebra::DMatrix::from_row_slice(2, 2, &[0.0, m.d, m.d, 0.0]);
                crate::cavity::ground_block_from(&[0.0, m.e_e - m.e_g], &d, c)?.0
            } else {
                pair.ground_shift(r, r)?
            };
            let bare = n_mol as f64 * m.e_g;
            Ok((bare, bare + shift))
        })
        .collect::<Result<_>>()?;
    let bare: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let coupled: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let (rb, eb) = fitted_minimum(&rs, &bare, r_e)?;
    let (rc, ec) = fitted_minimum(&rs, &coupled, r_e)?;
    Ok((ec - eb, rc - rb))
}

/// Scaling table: for every `g`, one molecule at `g` and two at `g/√2`.
///
/// All energies come from on-demand electronic solves with the `g` and `e`
/// states and photons up to `n_max`. The ground `β` is fitted from the
/// coupling-induced part of the two-molecule ground surface on a window of
/// `±3` RMS ground amplitudes.
pub fn collective_scaling_report(
    p: &MoleculeParams,
    grid_x: &Grid1D,
    omega_c: f64,
    g_list: &[f64],
    n_max: usize,
) -> Result<ScalingReport> {
    if g_list.len() < 2 || g_list.iter().any(|&g| g <= 0.0) {
        return Err(Error::param("scaling report needs at least two positive couplings"));
    }
    let (r_e, _) = surface_minimum(p, grid_x, 0)?;
    let mut rows = Vec::new();
    let mut de_ratio = Vec::new();
    let mut dr_ratio = Vec::new();
    let mut omega_vib = None;
    for &g in g_list {
        let one = PairSurfaces::identical(*p, *grid_x, CavityParams::new(omega_c, g, n_max)?);
        let (de1, dr1) = ground_shifts(&one, 1, r_e)?;
        let g2 = g / std::f64::consts::SQRT_2;
        let two = PairSurfaces::identical(*p, *grid_x, CavityParams::new(omega_c, g2, n_max)?);
        let (de2, dr2) = ground_shifts(&two, 2, r_e)?;
        let w = match omega_vib {
            Some(w) => w,
            None => {
                let w = two.first.ground_harmonic()?.1;
                omega_vib = Some(w);
                w
            }
        };
        let opts = FitOptions { locate: false, require_minimum: false, max_residual: f64::INFINITY, ..FitOptions::for_vibration(p.mass, w) };
        let r0 = r_e + dr2;
        let beta = fit_harmonic(|a, b| two.ground_shift(a, b).unwrap_or(f64::NAN), (r0, r0), &opts)?.beta;
        rows.push(ScalingRow {
            n_mol: 1,
            g,
            omega_r: 2.0 * g,
            delta_e0: de1,
            delta_r0: dr1,
            delta_r0_milliangstrom: bohr_to_milliangstrom(dr1),
            ground_beta: None,
        });
        rows.push(ScalingRow {
            n_mol: 2,
            g: g2,
            omega_r: 2.0 * g2 * std::f64::consts::SQRT_2,
            delta_e0: de2,
            delta_r0: dr2,
            delta_r0_milliangstrom: bohr_to_milliangstrom(dr2),
            ground_beta: Some(beta),
        });
        de_ratio.push(de2 / de1);
        dr_ratio.push(dr2 / dr1);
    }
    let ones: Vec<&ScalingRow> = rows.iter().filter(|r| r.n_mol == 1).collect();
    let twos: Vec<&ScalingRow> = rows.iter().filter(|r| r.n_mol == 2).collect();
    let delta_r0_slope =
        log_log_slope(&ones.iter().map(|r| r.g).collect::<Vec<_>>(), &ones.iter().map(|r| r.delta_r0).collect::<Vec<_>>())?;
    let ground_beta_slope = log_log_slope(
        &twos.iter().map(|r| r.g).collect::<Vec<_>>(),
        &twos.iter().map(|r| r.ground_beta.unwrap_or(0.0)).collect::<Vec<_>>(),
    )?;
    Ok(ScalingReport {
        omega_c,
        n_max,
        rows,
        delta_r0_slope,
        ground_beta_slope,
        delta_e0_ratio: de_ratio,
        delta_r0_ratio: dr_ratio,
    })
}
