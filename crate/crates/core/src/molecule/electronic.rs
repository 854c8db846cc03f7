use nalgebra::DMatrix;

use super::potentials::{cell_averaged_en, potential_nn};
use super::MoleculeParams;
use crate::numerics::{kinetic_band, BasisTag, Grid1D};
use crate::{Error, Result};

/// Continuum-normalized amplitude allowed at the box edge.
pub const TAIL_TOLERANCE: f64 = 1e-8;

/// Number of low states whose tails are checked against the box.
pub const TAIL_CHECKED_STATES: usize = 2;

/// Electronic eigenstates at one nuclear distance.
#[derive(Debug, Clone, PartialEq)]
pub struct ElectronicStates {
    pub r: f64,
    /// `E_k(R)`, including the Morse repulsion.
    pub energies: Vec<f64>,
    /// Columns normalized so that `Σ_i v_i² = 1` on the x grid.
    pub vectors: DMatrix<f64>,
}

impl ElectronicStates {
    /// `⟨a|x|b⟩` in a.u.
    pub fn dipole(&self, grid_x: &Grid1D, a: usize, b: usize) -> f64 {
        let (va, vb) = (self.vectors.column(a), self.vectors.column(b));
        (0..grid_x.len()).map(|i| va[i] * grid_x.point(i) * vb[i]).sum()
    }

    /// Mirror parity `⟨φ_k(x)|φ_k(-x)⟩`: +1 gerade, -1 ungerade.
    pub fn parity(&self, k: usize) -> f64 {
        let v = self.vectors.column(k);
        let n = v.len();
        (0..n).map(|i| v[i] * v[n - 1 - i]).sum()
    }
}

/// Lowest `k` eigenpairs of the electronic Hamiltonian at distance `r`.
pub fn solve_electronic(p: &MoleculeParams, r: f64, grid_x: &Grid1D, k: usize) -> Result<ElectronicStates> {
    p.validate()?;
    let mut h = kinetic_band(grid_x, 1.0)?;
    h.add_to_diagonal(&cell_averaged_en(grid_x, r, p)?);
    let sol = h.lowest_eigenpairs(k)?;
    debug_assert_eq!(sol.basis, BasisTag::Generic { dim: grid_x.len() });
    let inv_sqrt_dx = 1.0 / grid_x.spacing().sqrt();
    for s in 0..k.min(TAIL_CHECKED_STATES) {
        let col = sol.vectors.column(s);
        let n = col.len();
        let amplitude = [col[0], col[1], col[n - 2], col[n - 1]]
            .iter()
            .fold(0.0_f64, |m, x| m.max(x.abs()))
            * inv_sqrt_dx;
        if amplitude > TAIL_TOLERANCE {
            return Err(Error::BoxTooSmall { state: s, amplitude, r });
        }
    }
    let vnn = potential_nn(r, p);
    Ok(ElectronicStates { r, energies: sol.energies.iter().map(|e| e + vnn).collect(), vectors: sol.vectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> MoleculeParams {
        MoleculeParams { mass: 5e4, z: 1.0, alpha: 0.3, r0: 0.5, de: 0.25, r_eq: 2.9, a: 2.1 }
    }

    fn grid() -> Grid1D {
        Grid1D::new(-15.0, 15.0, 501).unwrap()
    }

    #[test]
    fn parity_alternates() {
        let s = solve_electronic(&p(), 2.8, &grid(), 4).unwrap();
        for k in 0..4 {
            let expected = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((s.parity(k) - expected).abs() < 1e-8, "state {k}: {}", s.parity(k));
        }
        assert!(s.dipole(&grid(), 0, 0).abs() < 1e-10);
        assert!((s.dipole(&grid(), 0, 1) - s.dipole(&grid(), 1, 0)).abs() < 1e-14);
    }

    #[test]
    fn separated_wells_become_degenerate() {
        let g = Grid1D::new(-25.0, 25.0, 801).unwrap();
        let near = solve_electronic(&p(), 2.0, &g, 2).unwrap();
        let far = solve_electronic(&p(), 14.0, &g, 2).unwrap();
        let split = |s: &ElectronicStates| s.energies[1] - s.energies[0];
        assert!(split(&far) < 1e-2 * split(&near));
    }

    #[test]
    fn small_box_is_rejected() {
        let g = Grid1D::new(-3.0, 3.0, 101).unwrap();
        assert!(matches!(solve_electronic(&p(), 2.8, &g, 2), Err(Error::BoxTooSmall { .. })));
    }

    #[test]
    fn no_kink_when_a_nucleus_crosses_a_grid_point() {
        // R/2 = 1.44 sits on a grid point of the default x grid.
        let g = grid();
        let e: Vec<f64> = (0..9).map(|i| solve_electronic(&p(), 2.86 + 0.005 * i as f64, &g, 1).unwrap().energies[0]).collect();
        let d2: Vec<f64> = e.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).collect();
        let mean = d2.iter().sum::<f64>() / d2.len() as f64;
        assert!(d2.windows(2).all(|w| (w[1] - w[0]).abs() < 0.1 * mean.abs()), "{d2:?}");
    }

    #[test]
    fn energies_continuous_in_r() {
        let g = grid();
        let e: Vec<f64> = (0..6).map(|i| solve_electronic(&p(), 2.7 + 1e-3 * i as f64, &g, 2).unwrap().energies[1]).collect();
        let steps: Vec<f64> = e.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        let mean = steps.iter().sum::<f64>() / steps.len() as f64;
        assert!(steps.iter().all(|s| *s < 2.0 * mean + 1e-12));
    }
}
