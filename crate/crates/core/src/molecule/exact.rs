use nalgebra::DMatrix;
use rayon::prelude::*;

use super::potentials::{cell_averaged_en, potential_nn};
use super::{build_bo_structure, ElectronicStructure, MoleculeParams};
use crate::numerics::{kinetic_band, kinetic_matrix, BasisTag, EigenSolution, Grid1D, SymBanded};
use crate::{Error, Result};

/// How the full `(x, R)` Hamiltonian is represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactMethod {
    /// Basis `|R_i⟩ ⊗ φ_a(x; R_i)` with the `n_el` lowest electronic states per
    /// grid point. Exact for the grid Hamiltonian when `n_el` equals the x grid size;
    /// the non-adiabatic couplings enter through `⟨φ_a(R_i)|φ_b(R_j)⟩`.
    Adiabatic { n_el: usize },
    /// Plain product grid, refused above `cap` points.
    Direct { cap: usize },
}

impl Default for ExactMethod {
    fn default() -> Self {
        ExactMethod::Adiabatic { n_el: 4 }
    }
}

/// Lowest `k` eigenpairs of the full molecular Hamiltonian on `grid_x ⊗ grid_r`.
pub fn solve_exact_molecule(
    p: &MoleculeParams,
    grid_x: &Grid1D,
    grid_r: &Grid1D,
    k: usize,
    method: ExactMethod,
) -> Result<EigenSolution> {
    match method {
        ExactMethod::Adiabatic { n_el } => {
            let es = build_bo_structure(p, grid_x, grid_r, n_el.max(2), true)?;
            solve_exact_adiabatic(&es, p.mass, k)
        }
        ExactMethod::Direct { cap } => solve_exact_direct(p, grid_x, grid_r, k, cap),
    }
}

/// Full solve in the adiabatic-projection basis of an existing structure.
pub fn solve_exact_adiabatic(es: &ElectronicStructure, mass: f64, k: usize) -> Result<EigenSolution> {
    let h = adiabatic_hamiltonian(es, mass)?;
    let n_el = es.n_states();
    Ok(h.lowest_eigenpairs(k)?.with_basis(BasisTag::Adiabatic { n_r: es.grid_r.len(), n_el }))
}

/// The molecular Hamiltonian in the basis `|R_i⟩ ⊗ φ_a(R_i)`, index `i * n_el + a`.
pub fn adiabatic_hamiltonian(es: &ElectronicStructure, mass: f64) -> Result<SymBanded> {
    let vecs = es
        .vectors
        .as_ref()
        .ok_or_else(|| Error::param("adiabatic projection needs the electronic eigenvectors"))?;
    let n_el = es.n_states();
    let n_r = es.grid_r.len();
    let t = kinetic_matrix(&es.grid_r, mass)?;
    let dim = n_r * n_el;
    let bw = 3 * n_el - 1;
    let mut bands: Vec<Vec<f64>> = (0..=bw).map(|d| vec![0.0; dim - d]).collect();
    // Overlaps between electronic states at R_i and R_{i+s}, s = 1, 2.
    let blocks: Vec<[DMatrix<f64>; 2]> = (0..n_r)
        .into_par_iter()
        .map(|i| {
            let ov = |s: usize| {
                if i + s < n_r {
                    vecs[i].transpose() * &vecs[i + s]
                } else {
                    DMatrix::zeros(n_el, n_el)
                }
            };
            [ov(1), ov(2)]
        })
        .collect();
    for i in 0..n_r {
        for a in 0..n_el {
            let row = i * n_el + a;
            bands[0][row] = es.surfaces[a][i] + t[(i, i)];
            for s in 1..=2 {
                if i + s >= n_r {
                    continue;
                }
                for b in 0..n_el {
                    let col = (i + s) * n_el + b;
                    bands[col - row][row] = t[(i, i + s)] * blocks[i][s - 1][(a, b)];
                }
            }
        }
    }
    Ok(SymBanded::from_bands(bands))
}

/// Weight of each exact state on the even electronic states minus that on
/// the odd ones, i.e. the mirror parity `x → -x` in the adiabatic basis.
pub fn electronic_parity(sol: &EigenSolution) -> Result<Vec<f64>> {
    let BasisTag::Adiabatic { n_el, .. } = sol.basis else {
        return Err(Error::param(format!("parity needs an adiabatic basis, got {}", sol.basis)));
    };
    Ok((0..sol.len())
        .map(|s| {
            sol.vectors
                .column(s)
                .iter()
                .enumerate()
                .map(|(idx, c)| if (idx % n_el) % 2 == 0 { c * c } else { -c * c })
                .sum()
        })
        .collect())
}

/// Weight of each exact state on electronic state `a`.
pub fn electronic_population(sol: &EigenSolution, a: usize) -> Result<Vec<f64>> {
    let BasisTag::Adiabatic { n_el, .. } = sol.basis else {
        return Err(Error::param(format!("populations need an adiabatic basis, got {}", sol.basis)));
    };
    Ok((0..sol.len())
        .map(|s| sol.vectors.column(s).iter().enumerate().filter(|(i, _)| i % n_el == a).map(|(_, c)| c * c).sum())
        .collect())
}

/// Dipole operator `x` in the adiabatic basis (block diagonal in R).
pub fn adiabatic_dipole(es: &ElectronicStructure) -> DMatrix<f64> {
    let n_el = es.n_states();
    let dim = es.grid_r.len() * n_el;
    let mut d = DMatrix::zeros(dim, dim);
    for (i, m) in es.dipoles.iter().enumerate() {
        d.view_mut((i * n_el, i * n_el), (n_el, n_el)).copy_from(m);
    }
    d
}

fn solve_exact_direct(p: &MoleculeParams, grid_x: &Grid1D, grid_r: &Grid1D, k: usize, cap: usize) -> Result<EigenSolution> {
    p.validate()?;
    let (nx, nr) = (grid_x.len(), grid_r.len());
    let dim = nx * nr;
    if dim > cap {
        return Err(Error::TooLarge { dim, cap });
    }
    let tx = kinetic_band(grid_x, 1.0)?;
    let tr = kinetic_band(grid_r, p.mass)?;
    let mut bands: Vec<Vec<f64>> = (0..=2 * nx).map(|d| vec![0.0; dim - d]).collect();
    for (ir, r) in grid_r.points().into_iter().enumerate() {
        let vnn = potential_nn(r, p);
        let ven = cell_averaged_en(grid_x, r, p)?;
        for (ix, v) in ven.iter().enumerate() {
            let row = ir * nx + ix;
            bands[0][row] = tx.get(ix, ix) + tr.get(ir, ir) + v + vnn;
            for d in 1..=2 {
                if ix + d < nx {
                    bands[d][row] = tx.get(ix, ix + d);
                }
                if ir + d < nr {
                    bands[d * nx][row] = tr.get(ir, ir + d);
                }
            }
        }
    }
    let h = SymBanded::from_bands(bands);
    Ok(h.lowest_eigenpairs(k)?.with_basis(BasisTag::GridXR { n_x: nx, n_r: nr }))
}
