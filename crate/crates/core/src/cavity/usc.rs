use nalgebra::DMatrix;
use rayon::prelude::*;

use super::surfaces::BlockBasis;
use super::CavityParams;
use crate::molecule::{solve_electronic, surface_minimum, ElectronicStructure, MoleculeParams};
use crate::numerics::optimize::{minimize_bracketed, polyfit, polyval, sampled_minimum};
use crate::numerics::{solve_hermitian_all, Grid1D};
use crate::units::bohr_to_milliangstrom;
use crate::{Error, Result};

/// Coupled ground surface next to its bare and second-order counterparts.
#[derive(Debug, Clone, PartialEq)]
pub struct UscGround {
    pub grid_r: Grid1D,
    pub bare: Vec<f64>,
    /// Lowest state of the even block, all electronic states of the structure included.
    pub exact: Vec<f64>,
    /// `E_g - g² μ_eg² / (E_e + ω_c - E_g)`.
    pub perturbative: Vec<f64>,
    /// `⟨a†a⟩` of the coupled ground state.
    pub photon_number: Vec<f64>,
}

impl UscGround {
    pub fn shift_exact(&self) -> Vec<f64> {
        self.exact.iter().zip(&self.bare).map(|(a, b)| a - b).collect()
    }

    pub fn shift_perturbative(&self) -> Vec<f64> {
        self.perturbative.iter().zip(&self.bare).map(|(a, b)| a - b).collect()
    }
}

/// Lowest eigenvalue and photon number of the even block at grid point `i`.
pub(crate) fn ground_block(es: &ElectronicStructure, i: usize, c: &CavityParams) -> Result<(f64, f64)> {
    let energies: Vec<f64> = es.surfaces.iter().map(|s| s[i]).collect();
    ground_block_from(&energies, &es.dipoles[i], c)
}

pub(crate) fn ground_block_from(energies: &[f64], dipoles: &DMatrix<f64>, c: &CavityParams) -> Result<(f64, f64)> {
    if c.g == 0.0 {
        return Ok((energies[0], 0.0));
    }
    let block = BlockBasis::new(energies.len(), c.n_max, 1);
    let sol = solve_hermitian_all(&block.matrix_from(energies, dipoles, c))?;
    let v = sol.vectors.column(0);
    let n: f64 = block.states.iter().zip(v.iter()).map(|((_, n), x)| *n as f64 * x * x).sum();
    Ok((sol.energies[0], n))
}

/// Coupled ground surface on the grid of `es`. Every electronic state kept
/// in `es` enters the exact block; the second-order form uses only `e`.
pub fn ground_state_pes_usc(es: &ElectronicStructure, c: &CavityParams) -> Result<UscGround> {
    c.validate()?;
    if es.n_states() < 2 {
        return Err(Error::param("ground-state coupling needs the g and e states"));
    }
    let n_r = es.grid_r.len();
    let mut perturbative = Vec::with_capacity(n_r);
    for i in 0..n_r {
        let denom = es.surfaces[1][i] + c.omega_c - es.surfaces[0][i];
        if denom.abs() < 1e-8 {
            return Err(Error::Singular(format!("vanishing denominator at R = {}", es.grid_r.point(i))));
        }
        let m = es.dipoles[i][(0, 1)];
        perturbative.push(es.surfaces[0][i] - c.g * c.g * m * m / denom);
    }
    let blocks: Vec<(f64, f64)> = (0..n_r).into_par_iter().map(|i| ground_block(es, i, c)).collect::<Result<_>>()?;
    Ok(UscGround {
        grid_r: es.grid_r,
        bare: es.surfaces[0].clone(),
        exact: blocks.iter().map(|b| b.0).collect(),
        perturbative,
        photon_number: blocks.iter().map(|b| b.1).collect(),
    })
}

/// Difference of two equilibrium positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BondShift {
    pub r_bare: f64,
    pub r_coupled: f64,
    /// `r_coupled - r_bare` in bohr.
    pub delta_au: f64,
    pub delta_milliangstrom: f64,
}

impl BondShift {
    fn new(r_bare: f64, r_coupled: f64) -> Self {
        let d = r_coupled - r_bare;
        Self { r_bare, r_coupled, delta_au: d, delta_milliangstrom: bohr_to_milliangstrom(d) }
    }
}

/// Minima of two sampled surfaces on a shared grid, each from a local
/// quartic refined by Brent's method.
pub fn bond_length_shift(grid_r: &Grid1D, bare: &[f64], coupled: &[f64]) -> Result<BondShift> {
    let xs = grid_r.points();
    let (a, _) = sampled_minimum(&xs, bare)?;
    let (b, _) = sampled_minimum(&xs, coupled)?;
    Ok(BondShift::new(a, b))
}

/// Options of [`usc_bond_shift`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftOptions {
    /// Electronic states in the ground block.
    pub n_el: usize,
    /// Half width of the fitting window around the bare minimum (bohr).
    pub half_width: f64,
    pub n_points: usize,
    pub degree: usize,
}

impl Default for ShiftOptions {
    fn default() -> Self {
        Self { n_el: 2, half_width: 0.05, n_points: 13, degree: 6 }
    }
}

/// Ground-state bond-length shift from on-demand electronic solves.
///
/// Bare and coupled energies are sampled at the same points around the bare
/// minimum and fitted with the same polynomial, so solver noise common to
/// both largely cancels in the difference.
pub fn usc_bond_shift(p: &MoleculeParams, grid_x: &Grid1D, c: &CavityParams, opts: ShiftOptions) -> Result<BondShift> {
    c.validate()?;
    let (r_e, _) = surface_minimum(p, grid_x, 0)?;
    let grid = Grid1D::centered(r_e, opts.half_width, opts.n_points)?;
    let rs = grid.points();
    let pairs: Vec<(f64, f64)> = rs
        .par_iter()
        .map(|&r| {
            let n_el = opts.n_el.max(2);
            let st = solve_electronic(p, r, grid_x, n_el)?;
            let d = DMatrix::from_fn(n_el, n_el, |a, b| st.dipole(grid_x, a, b));
            Ok((st.energies[0], ground_block_from(&st.energies[..n_el], &d, c)?.0))
        })
        .collect::<Result<_>>()?;
    let bare: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let coupled: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let fit_min = |ys: &[f64]| -> Result<f64> {
        let coef = polyfit(&rs, ys, opts.degree, r_e)?;
        let (x, _) = minimize_bracketed(|x| polyval(&coef, x, r_e), grid.min(), grid.max(), 1e-12)?;
        if (x - grid.min()).abs() < 1e-3 * opts.half_width || (grid.max() - x).abs() < 1e-3 * opts.half_width {
            return Err(Error::Window(format!("minimum {x} at the edge of the fitting window")));
        }
        Ok(x)
    };
    Ok(BondShift::new(fit_min(&bare)?, fit_min(&coupled)?))
}
