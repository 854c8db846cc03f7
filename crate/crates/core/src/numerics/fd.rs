use nalgebra::DMatrix;

use super::{Grid1D, SymBanded};
use crate::{Error, Result};

/// Fourth-order stencil weights of `-(1/2m) d²/dx²` for offsets 0, 1, 2.
fn stencil(grid: &Grid1D, mass: f64) -> Result<[f64; 3]> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::param(format!("mass must be positive, got {mass}")));
    }
    let h = grid.spacing();
    let c = 1.0 / (2.0 * mass * h * h);
    Ok([c * 30.0 / 12.0, -c * 16.0 / 12.0, c / 12.0])
}

/// Banded kinetic-energy operator with Dirichlet boundaries.
pub fn kinetic_band(grid: &Grid1D, mass: f64) -> Result<SymBanded> {
    let w = stencil(grid, mass)?;
    let n = grid.len();
    Ok(SymBanded::from_bands(vec![vec![w[0]; n], vec![w[1]; n - 1], vec![w[2]; n - 2]]))
}

/// Dense kinetic-energy matrix `-(1/2m) ∂²` on `grid` (Dirichlet, 5-point stencil).
pub fn kinetic_matrix(grid: &Grid1D, mass: f64) -> Result<DMatrix<f64>> {
    let w = stencil(grid, mass)?;
    let n = grid.len();
    let mut t = DMatrix::zeros(n, n);
    for i in 0..n {
        t[(i, i)] = w[0];
        for (d, &wd) in w.iter().enumerate().skip(1) {
            if i + d < n {
                t[(i, i + d)] = wd;
                t[(i + d, i)] = wd;
            }
        }
    }
    Ok(t)
}

/// `T + V(R)` for nuclear motion on a sampled surface.
pub fn nuclear_hamiltonian(surface: &[f64], grid: &Grid1D, mass: f64) -> Result<SymBanded> {
    if surface.len() != grid.len() {
        return Err(Error::param(format!(
            "surface has {} samples, grid has {}",
            surface.len(),
            grid.len()
        )));
    }
    let mut h = kinetic_band(grid, mass)?;
    h.add_to_diagonal(surface);
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactly_symmetric_and_nonnegative() {
        let g = Grid1D::new(-3.0, 4.0, 60).unwrap();
        let t = kinetic_matrix(&g, 1.7).unwrap();
        assert_eq!(t, t.transpose());
        let e = t.clone().symmetric_eigen();
        assert!(e.eigenvalues.iter().all(|&v| v > -1e-12));
    }

    #[test]
    fn rejects_nonpositive_mass() {
        let g = Grid1D::new(0.0, 1.0, 10).unwrap();
        assert!(kinetic_matrix(&g, 0.0).is_err());
        assert!(kinetic_matrix(&g, -1.0).is_err());
    }

    #[test]
    fn band_matches_dense() {
        let g = Grid1D::new(-1.0, 2.0, 25).unwrap();
        assert_eq!(kinetic_band(&g, 3.0).unwrap().to_dense(), kinetic_matrix(&g, 3.0).unwrap());
    }

    #[test]
    fn harmonic_oscillator_levels() {
        let g = Grid1D::new(-10.0, 10.0, 801).unwrap();
        let v: Vec<f64> = g.points().iter().map(|x| 0.5 * x * x).collect();
        let h = nuclear_hamiltonian(&v, &g, 1.0).unwrap();
        let sol = h.lowest_eigenpairs(6).unwrap();
        for (n, e) in sol.energies.iter().enumerate() {
            let exact = n as f64 + 0.5;
            assert!(((e - exact) / exact).abs() < 1e-6, "level {n}: {e}");
        }
    }

    #[test]
    fn particle_in_a_box() {
        // Dirichlet nodes sit one spacing outside the first/last grid point.
        let n = 6000;
        let g = Grid1D::new(0.0, 1.0, n).unwrap();
        let box_len = 1.0 + 2.0 * g.spacing();
        let sol = kinetic_band(&g, 1.0).unwrap().lowest_eigenpairs(4).unwrap();
        for (k, e) in sol.energies.iter().enumerate() {
            let m = (k + 1) as f64;
            let exact = m * m * std::f64::consts::PI.powi(2) / (2.0 * box_len * box_len);
            assert!(((e - exact) / exact).abs() < 1e-4, "level {k}: {e} vs {exact}");
        }
    }
}
