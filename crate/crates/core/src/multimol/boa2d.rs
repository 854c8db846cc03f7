use nalgebra::DMatrix;

use super::pes2d::CoupledPES2D;
use crate::molecule::levels_within_window;
use crate::numerics::{solve_hermitian_all, EigenSolution, Grid1D};
use crate::spectra::Transition;
use crate::{Error, Result};

/// Product basis `χ_i(R₁) χ_j(R₂)` of one-dimensional vibrational states,
/// index `i n_b + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductVibBasis {
    pub grid_r: Grid1D,
    /// `χ_i(R)` columns, `Σ_R χ² = 1`.
    pub chi: DMatrix<f64>,
    /// Kinetic energy `⟨χ_i|T|χ_k⟩` in the one-dimensional basis.
    pub kinetic: DMatrix<f64>,
}

impl ProductVibBasis {
    /// Eigenstates of `T + reference(R)`, up to `n_b` that fit on the grid.
    pub fn new(reference: &[f64], grid_r: &Grid1D, mass: f64, n_b: usize) -> Result<Self> {
        let lv = levels_within_window(reference, grid_r, mass, n_b, "2D reference")?;
        let chi = lv.wavefunctions;
        let nb = chi.ncols();
        let v = DMatrix::from_fn(grid_r.len(), nb, |r, k| reference[r] * chi[(r, k)]);
        let mut kinetic = -(chi.transpose() * v);
        for i in 0..nb {
            kinetic[(i, i)] += lv.energies[i];
        }
        let kinetic = (&kinetic + kinetic.transpose()) * 0.5;
        Ok(Self { grid_r: *grid_r, chi, kinetic })
    }

    pub fn n_1d(&self) -> usize {
        self.chi.ncols()
    }

    pub fn dim(&self) -> usize {
        self.n_1d() * self.n_1d()
    }

    /// `⟨χ_iχ_j|f(R₁,R₂)|χ_kχ_l⟩` for a function sampled on the lattice.
    pub fn matrix_of(&self, f: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let (nr, nb) = (self.chi.nrows(), self.n_1d());
        if f.nrows() != nr || f.ncols() != nr {
            return Err(Error::param("lattice function does not match the basis grid"));
        }
        // Pair products P(R, (i,k)) = χ_i(R) χ_k(R).
        let p = DMatrix::from_fn(nr, nb * nb, |r, ik| self.chi[(r, ik / nb)] * self.chi[(r, ik % nb)]);
        // m[(i,k),(j,l)] = Σ P(R₁,ik) f(R₁,R₂) P(R₂,jl)
        let m = p.transpose() * f * &p;
        Ok(DMatrix::from_fn(nb * nb, nb * nb, |a, b| {
            let (i, j, k, l) = (a / nb, a % nb, b / nb, b % nb);
            m[(i * nb + k, j * nb + l)]
        }))
    }

    /// `T₁ + T₂ + E(R₁,R₂)`.
    pub fn hamiltonian(&self, surface: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let nb = self.n_1d();
        let mut h = self.matrix_of(surface)?;
        for i in 0..nb {
            for j in 0..nb {
                for k in 0..nb {
                    h[(i * nb + j, k * nb + j)] += self.kinetic[(i, k)];
                    h[(j * nb + i, j * nb + k)] += self.kinetic[(i, k)];
                }
            }
        }
        Ok((&h + h.transpose()) * 0.5)
    }

    pub fn levels(&self, surface: &DMatrix<f64>) -> Result<EigenSolution> {
        solve_hermitian_all(&self.hamiltonian(surface)?)
    }
}

/// Born-Oppenheimer absorption sticks of two molecules: from the lowest
/// level on `G` to every level on LP, DS and UP, through `⟨s|μ₁+μ₂|G⟩(R₁,R₂)`.
pub fn boa_two_transitions(pes: &CoupledPES2D, reference: &[f64], mass: f64, n_b: usize) -> Result<Vec<Transition>> {
    if pes.grid_r1 != pes.grid_r2 {
        return Err(Error::param("two-molecule BOA needs identical R grids"));
    }
    let basis = ProductVibBasis::new(reference, &pes.grid_r1, mass, n_b)?;
    let ground = basis.levels(&pes.surfaces[0])?;
    let c0 = ground.vectors.column(0);
    let mut out = Vec::new();
    for s in 0..3 {
        let lv = basis.levels(&pes.surfaces[s + 1])?;
        let d = basis.matrix_of(&pes.ground_dipoles[s])? * c0;
        for v in 0..lv.len() {
            let amp = lv.vectors.column(v).dot(&d);
            out.push(Transition { energy: lv.energies[v] - ground.energies[0], strength: amp * amp });
        }
    }
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(out)
}
