use std::collections::HashMap;
use std::sync::Mutex;

use nalgebra::DMatrix;

use super::blocks::{pair_basis, pair_matrix, MolPoint};
use super::fit::{fit_harmonic, FitOptions, HarmonicFit};
use super::pes2d::solve_pair_point;
use crate::cavity::CavityParams;
use crate::molecule::{solve_electronic, surface_minimum, MoleculeParams};
use crate::numerics::{solve_hermitian_all, Grid1D};
use crate::{Error, Result};

/// On-demand `E_g, E_e, μ_eg` of one molecule, cached by `R`.
#[derive(Debug)]
pub struct MolSampler {
    pub params: MoleculeParams,
    pub grid_x: Grid1D,
    cache: Mutex<HashMap<u64, MolPoint>>,
}

impl MolSampler {
    pub fn new(params: MoleculeParams, grid_x: Grid1D) -> Self {
        Self { params, grid_x, cache: Mutex::new(HashMap::new()) }
    }

    pub fn at(&self, r: f64) -> Result<MolPoint> {
        if let Some(m) = self.cache.lock().map_err(|_| Error::Diagnostic("sampler cache poisoned".into()))?.get(&r.to_bits()) {
            return Ok(*m);
        }
        let st = solve_electronic(&self.params, r, &self.grid_x, 2)?;
        let m = MolPoint { e_g: st.energies[0], e_e: st.energies[1], d: st.dipole(&self.grid_x, 0, 1) };
        if let Ok(mut c) = self.cache.lock() {
            c.insert(r.to_bits(), m);
        }
        Ok(m)
    }

    /// Ground-state minimum `R_e` and harmonic frequency from a five-point second difference.
    pub fn ground_harmonic(&self) -> Result<(f64, f64)> {
        let (r_e, _) = surface_minimum(&self.params, &self.grid_x, 0)?;
        let h = 0.01;
        let e = |k: f64| self.at(r_e + k * h).map(|m| m.e_g);
        let k2 = (-e(2.0)? + 16.0 * e(1.0)? - 30.0 * e(0.0)? + 16.0 * e(-1.0)? - e(-2.0)?) / (12.0 * h * h);
        if k2 <= 0.0 {
            return Err(Error::Diagnostic(format!("ground surface not convex at R = {r_e}")));
        }
        Ok((r_e, (k2 / self.params.mass).sqrt()))
    }
}

/// Two-molecule surfaces evaluated at arbitrary `(R₁, R₂)`.
#[derive(Debug)]
pub struct PairSurfaces {
    pub first: MolSampler,
    /// `None` for two identical molecules.
    pub second: Option<MolSampler>,
    pub cavity: CavityParams,
}

impl PairSurfaces {
    pub fn identical(p: MoleculeParams, grid_x: Grid1D, c: CavityParams) -> Self {
        Self { first: MolSampler::new(p, grid_x), second: None, cavity: c }
    }

    fn points(&self, r1: f64, r2: f64) -> Result<(MolPoint, MolPoint)> {
        let m1 = self.first.at(r1)?;
        let m2 = self.second.as_ref().unwrap_or(&self.first).at(r2)?;
        Ok((m1, m2))
    }

    /// `[G, LP, DS, UP]` from the parity blocks with photons up to `cavity.n_max`.
    pub fn energies(&self, r1: f64, r2: f64) -> Result<[f64; 4]> {
        let (m1, m2) = self.points(r1, r2)?;
        let c = &self.cavity;
        let s = solve_pair_point(&pair_basis(c.n_max, 1), &pair_basis(c.n_max, -1), &m1, &m2, c);
        Ok([s.even.0, s.odd.0[0], s.odd.0[1], s.odd.0[2]])
    }

    /// Lowest even eigenvalue minus `E_g(R₁) + E_g(R₂)`, with photons up to `cavity.n_max`.
    ///
    /// The bare energies are removed before diagonalizing, so the small
    /// coupling-induced part keeps full relative precision.
    pub fn ground_shift(&self, r1: f64, r2: f64) -> Result<f64> {
        let (m1, m2) = self.points(r1, r2)?;
        if self.cavity.g == 0.0 {
            return Ok(0.0);
        }
        let basis = pair_basis(self.cavity.n_max, 1);
        let h: DMatrix<f64> = pair_matrix(&basis, &m1, &m2, &self.cavity, m1.e_g + m2.e_g);
        Ok(solve_hermitian_all(&h)?.energies[0])
    }
}

/// Fitted expansions of the ground and the three single-excitation surfaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationFits {
    pub g: f64,
    pub ground: HarmonicFit,
    /// Fit of the coupling-induced ground shift alone; carries the ground `β`.
    pub ground_shift: HarmonicFit,
    pub lp: HarmonicFit,
    pub ds: HarmonicFit,
    pub up: HarmonicFit,
}

/// Fit all four surfaces of an identical pair around their minima.
///
/// The window is `±3` RMS amplitudes of the bare ground vibration. Excited
/// surfaces are searched from the minimum of their diagonal cut.
pub fn correlation_fits(pair: &PairSurfaces, max_residual: f64) -> Result<CorrelationFits> {
    let (r_e, omega) = pair.first.ground_harmonic()?;
    let opts = FitOptions { max_residual, ..FitOptions::for_vibration(pair.first.params.mass, omega) };
    let nan = |r: Result<f64>| r.unwrap_or(f64::NAN);
    let ground = fit_harmonic(|a, b| nan(pair.energies(a, b).map(|e| e[0])), (r_e, r_e), &opts)?;
    let shift_opts = FitOptions { locate: false, require_minimum: false, max_residual: f64::INFINITY, ..opts };
    let ground_shift = fit_harmonic(|a, b| nan(pair.ground_shift(a, b)), (ground.r1_0, ground.r2_0), &shift_opts)?;
    let excited = |s: usize| -> Result<HarmonicFit> {
        let diag = |r: f64| pair.energies(r, r).map(|e| e[s]).unwrap_or(f64::INFINITY);
        let (r0, _) = crate::numerics::optimize::scan_minimum(diag, r_e - 0.3, r_e + 0.5, 81, 1e-7)?;
        fit_harmonic(|a, b| nan(pair.energies(a, b).map(|e| e[s])), (r0, r0), &opts)
    };
    Ok(CorrelationFits { g: pair.cavity.g, ground, ground_shift, lp: excited(1)?, ds: excited(2)?, up: excited(3)? })
}
