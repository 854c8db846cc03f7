use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::electronic::{solve_electronic, ElectronicStates};
use super::MoleculeParams;
use crate::numerics::{align_signs, Grid1D};
use crate::{Error, Result};

/// Born-Oppenheimer surfaces, transition dipoles and (optionally) the
/// gauge-fixed electronic eigenvectors over a nuclear grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ElectronicStructure {
    pub grid_r: Grid1D,
    pub grid_x: Grid1D,
    /// `surfaces[k][i] = E_k(R_i)`.
    pub surfaces: Vec<Vec<f64>>,
    /// `dipoles[i][(a, b)] = ⟨φ_a|x|φ_b⟩` at `R_i`.
    pub dipoles: Vec<DMatrix<f64>>,
    /// Per-R eigenvectors (x grid × states), signs smooth in `R`.
    pub vectors: Option<Vec<DMatrix<f64>>>,
}

impl ElectronicStructure {
    /// Assemble from externally supplied surfaces (two states, no vectors).
    pub fn from_surfaces(grid_r: Grid1D, e_g: Vec<f64>, e_e: Vec<f64>, mu_eg: Vec<f64>) -> Result<Self> {
        let n = grid_r.len();
        if e_g.len() != n || e_e.len() != n || mu_eg.len() != n {
            return Err(Error::param("surface arrays must match the nuclear grid"));
        }
        let dipoles = mu_eg.iter().map(|&m| DMatrix::from_row_slice(2, 2, &[0.0, m, m, 0.0])).collect();
        let grid_x = Grid1D::new(-1.0, 1.0, Grid1D::MIN_POINTS)?;
        Ok(Self { grid_r, grid_x, surfaces: vec![e_g, e_e], dipoles, vectors: None })
    }

    pub fn n_states(&self) -> usize {
        self.surfaces.len()
    }

    pub fn surface(&self, k: usize) -> &[f64] {
        &self.surfaces[k]
    }

    pub fn ground(&self) -> &[f64] {
        &self.surfaces[0]
    }

    pub fn excited(&self) -> &[f64] {
        &self.surfaces[1]
    }

    /// `μ_ab(R)` along the grid.
    pub fn dipole(&self, a: usize, b: usize) -> Vec<f64> {
        self.dipoles.iter().map(|d| d[(a, b)]).collect()
    }

    pub fn mu_eg(&self) -> Vec<f64> {
        self.dipole(1, 0)
    }

    /// Restrict to a contiguous range of nuclear grid points.
    pub fn slice(&self, lo: usize, hi: usize) -> Result<Self> {
        Ok(Self {
            grid_r: self.grid_r.slice(lo, hi)?,
            grid_x: self.grid_x,
            surfaces: self.surfaces.iter().map(|s| s[lo..=hi].to_vec()).collect(),
            dipoles: self.dipoles[lo..=hi].to_vec(),
            vectors: self.vectors.as_ref().map(|v| v[lo..=hi].to_vec()),
        })
    }
}

/// Solve the electronic problem on every nuclear grid point.
///
/// State signs are made continuous in `R`; odd states are then signed so
/// that `⟨φ_0|x|φ_k⟩ > 0` at the middle of the grid.
pub fn build_bo_structure(
    p: &MoleculeParams,
    grid_x: &Grid1D,
    grid_r: &Grid1D,
    k: usize,
    keep_vectors: bool,
) -> Result<ElectronicStructure> {
    p.validate()?;
    if k < 2 {
        return Err(Error::param("at least the g and e states are needed"));
    }
    let mut states: Vec<ElectronicStates> = grid_r
        .points()
        .par_iter()
        .map(|&r| solve_electronic(p, r, grid_x, k))
        .collect::<Result<_>>()?;
    fix_gauge(&mut states, grid_x, grid_r)?;
    let surfaces = (0..k).map(|s| states.iter().map(|st| st.energies[s]).collect()).collect();
    let dipoles = states
        .iter()
        .map(|st| {
            let mut d = DMatrix::zeros(k, k);
            for a in 0..k {
                for b in 0..=a {
                    let v = st.dipole(grid_x, a, b);
                    d[(a, b)] = v;
                    d[(b, a)] = v;
                }
            }
            d
        })
        .collect();
    let vectors = keep_vectors.then(|| states.into_iter().map(|s| s.vectors).collect());
    Ok(ElectronicStructure { grid_r: *grid_r, grid_x: *grid_x, surfaces, dipoles, vectors })
}

pub(crate) fn fix_gauge(states: &mut [ElectronicStates], grid_x: &Grid1D, grid_r: &Grid1D) -> Result<()> {
    let k = states[0].vectors.ncols();
    let mid = states.len() / 2;
    for s in 0..k {
        let mut field: Vec<DVector<f64>> = states.iter().map(|st| st.vectors.column(s).into_owned()).collect();
        align_signs(&mut field, grid_r)?;
        let flip = if s == 0 {
            field[mid].sum() < 0.0
        } else {
            let x0 = &states[mid];
            let mu: f64 = (0..grid_x.len()).map(|i| x0.vectors[(i, 0)] * grid_x.point(i) * field[mid][i]).sum();
            mu < 0.0
        };
        for (st, v) in states.iter_mut().zip(field) {
            let v = if flip { -v } else { v };
            st.vectors.set_column(s, &v);
        }
    }
    Ok(())
}
