use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use super::MoleculeParams;
use crate::numerics::Grid1D;
use crate::{Error, Result};

/// Gauss-Legendre order used on each piece of a grid cell.
const CELL_QUADRATURE_ORDER: usize = 12;

/// Soft-Coulomb attraction of the active electron to one nucleus at distance `r`.
///
/// The charge seen far away is ½; close in it rises to `Z` over the length `r0`.
pub fn soft_coulomb(r: f64, p: &MoleculeParams) -> f64 {
    -(0.5 + (p.z - 0.5) * (-r / p.r0).exp()) / (r * r + p.alpha * p.alpha).sqrt()
}

/// Electron-nuclear potential for nuclei at `±R/2`.
pub fn potential_en(x: f64, r: f64, p: &MoleculeParams) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::param(format!("internuclear distance must be positive, got {r}")));
    }
    Ok(soft_coulomb((x - 0.5 * r).abs(), p) + soft_coulomb((x + 0.5 * r).abs(), p))
}

/// Electron-nuclear potential averaged over each cell `[x_i - dx/2, x_i + dx/2]`.
///
/// The `e^{-r/r0}` term has a cusp at each nucleus. Sampling it pointwise
/// makes the energies jump in slope whenever a nucleus crosses a grid point;
/// averaging with the cell split at the nuclei keeps `E_k(R)` smooth.
pub fn cell_averaged_en(grid_x: &Grid1D, r: f64, p: &MoleculeParams) -> Result<Vec<f64>> {
    if !(r > 0.0) {
        return Err(Error::param(format!("internuclear distance must be positive, got {r}")));
    }
    let order = NonZeroUsize::new(CELL_QUADRATURE_ORDER).expect("nonzero order");
    let quad = GaussLegendre::new(order);
    let dx = grid_x.spacing();
    let nuclei = [-0.5 * r, 0.5 * r];
    let f = |x: f64| soft_coulomb((x - 0.5 * r).abs(), p) + soft_coulomb((x + 0.5 * r).abs(), p);
    Ok(grid_x
        .points()
        .into_iter()
        .map(|x| {
            let (lo, hi) = (x - 0.5 * dx, x + 0.5 * dx);
            let mut cuts = vec![lo];
            cuts.extend(nuclei.iter().copied().filter(|&c| c > lo && c < hi));
            cuts.push(hi);
            cuts.windows(2).map(|w| quad.integrate(w[0], w[1], f)).sum::<f64>() / dx
        })
        .collect())
}

/// Morse nuclear repulsion `De (1 - e^{-A (R - R0)})²`, zero at `R0`.
pub fn potential_nn(r: f64, p: &MoleculeParams) -> f64 {
    p.de * (1.0 - (-p.a * (r - p.r_eq)).exp()).powi(2)
}

/// Harmonic frequency of the bare Morse well, `A √(2 De / M)`.
pub fn morse_frequency(p: &MoleculeParams) -> f64 {
    p.a * (2.0 * p.de / p.mass).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p() -> MoleculeParams {
        MoleculeParams { mass: 2000.0, z: 1.7, alpha: 0.4, r0: 0.6, de: 0.2, r_eq: 2.5, a: 1.3 }
    }

    #[test]
    fn soft_coulomb_limits() {
        let p = p();
        assert!((soft_coulomb(0.0, &p) + p.z / p.alpha).abs() < 1e-14);
        let r = 400.0;
        assert!((soft_coulomb(r, &p) * r + 0.5).abs() < 1e-5);
        let r = 1.3_f64;
        let oracle = -(0.5 + 1.2 * (-r / 0.6).exp()) / (r * r + 0.16).sqrt();
        assert!((soft_coulomb(r, &p) - oracle).abs() < 1e-15);
    }

    #[test]
    fn en_potential() {
        let p = p();
        assert!((potential_en(0.0, 3.0, &p).unwrap() - 2.0 * soft_coulomb(1.5, &p)).abs() < 1e-15);
        let oracle = soft_coulomb(0.3, &p) + soft_coulomb(2.7, &p);
        assert!((potential_en(1.2, 3.0, &p).unwrap() - oracle).abs() < 1e-15);
        assert!(potential_en(0.0, 0.0, &p).is_err());
        assert!(potential_en(0.0, -1.0, &p).is_err());
    }

    #[test]
    fn cell_average_of_smooth_region_matches_midpoint() {
        let p = p();
        let g = Grid1D::new(-10.0, 10.0, 2001).unwrap();
        let v = cell_averaged_en(&g, 3.0, &p).unwrap();
        for i in [0usize, 300, 1700, 2000] {
            let x = g.point(i);
            let h = g.spacing();
            let second = (potential_en(x + h, 3.0, &p).unwrap() - 2.0 * potential_en(x, 3.0, &p).unwrap()
                + potential_en(x - h, 3.0, &p).unwrap())
                / (h * h);
            // Cell mean = f(x) + h²f''/24 + O(h⁴).
            let expected = potential_en(x, 3.0, &p).unwrap() + h * h * second / 24.0;
            assert!((v[i] - expected).abs() < 1e-9, "{i}: {} vs {expected}", v[i]);
        }
    }

    #[test]
    fn morse_shape() {
        let p = p();
        assert_eq!(potential_nn(p.r_eq, &p), 0.0);
        assert!((potential_nn(p.r_eq + 60.0, &p) - p.de).abs() < 1e-12);
        let h = 1e-4;
        let second = (potential_nn(p.r_eq + h, &p) - 2.0 * potential_nn(p.r_eq, &p) + potential_nn(p.r_eq - h, &p)) / (h * h);
        assert!((second - 2.0 * p.de * p.a * p.a).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn en_mirror_symmetric(x in -20.0f64..20.0, r in 0.1f64..8.0) {
            let p = p();
            prop_assert_eq!(potential_en(x, r, &p).unwrap(), potential_en(-x, r, &p).unwrap());
        }
    }
}
