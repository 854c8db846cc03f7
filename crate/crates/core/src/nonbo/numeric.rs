use nalgebra::DVector;
use rayon::prelude::*;

use super::two_level::polariton_2x2;
use super::CorrectionTerms;
use crate::cavity::{BlockBasis, CavityParams};
use crate::molecule::ElectronicStructure;
use crate::numerics::{gauge_fixed_derivative, gauge_fixed_second_derivative, solve_hermitian_all, DerivativeScheme};
use crate::{Error, Result};

/// Lower (`-`) and upper (`+`) polaritons as vectors over `x ⊗ Fock`,
/// component `n · n_x + i`, signs matching `|±⟩` of the two-level model.
pub fn polariton_fields(es: &ElectronicStructure, c: &CavityParams) -> Result<(Vec<DVector<f64>>, Vec<DVector<f64>>)> {
    let vecs = es
        .vectors
        .as_ref()
        .ok_or_else(|| Error::param("polariton fields need the electronic eigenvectors"))?;
    c.validate()?;
    let odd = BlockBasis::new(2, c.n_max, -1);
    let nx = es.grid_x.len();
    let g1 = odd.states.iter().position(|&s| s == (0, 1)).expect("odd block holds |g,1⟩");
    let e0 = odd.states.iter().position(|&s| s == (1, 0)).expect("odd block holds |e,0⟩");
    let pairs: Vec<(DVector<f64>, DVector<f64>)> = (0..es.grid_r.len())
        .into_par_iter()
        .map(|i| {
            let sol = solve_hermitian_all(&odd.matrix(es, i, c))?;
            let model = polariton_2x2(es.surfaces[0][i], es.surfaces[1][i], es.dipoles[i][(0, 1)], c);
            let (ct, st) = (model.theta.cos(), model.theta.sin());
            let build = |j: usize, ref_g1: f64, ref_e0: f64| {
                let coef = sol.vectors.column(j);
                let sign = if coef[g1] * ref_g1 + coef[e0] * ref_e0 < 0.0 { -1.0 } else { 1.0 };
                let mut v = DVector::zeros(nx * (c.n_max + 1));
                for (p, &(a, n)) in odd.states.iter().enumerate() {
                    let w = sign * coef[p];
                    for ix in 0..nx {
                        v[n * nx + ix] += w * vecs[i][(ix, a)];
                    }
                }
                v
            };
            Ok((build(0, st, -ct), build(1, ct, st)))
        })
        .collect::<Result<_>>()?;
    Ok(pairs.into_iter().unzip())
}

/// Numeric correction terms and their self-consistency checks.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericCorrections {
    pub terms: CorrectionTerms,
    /// Largest `|⟨±|∂_R|±⟩|`.
    pub diag_p_max: f64,
    /// Largest `|⟨+|∂_R|-⟩ + ⟨-|∂_R|+⟩|`.
    pub antisymmetry_max: f64,
}

/// Matrix elements of `P = -i ∂_R` and `P²` between two real vector fields
/// by finite differences in a continuous gauge.
pub fn nonbo_numeric(
    minus: &[DVector<f64>],
    plus: &[DVector<f64>],
    grid: &crate::numerics::Grid1D,
    scheme: DerivativeScheme,
) -> Result<NumericCorrections> {
    let dm = gauge_fixed_derivative(minus, grid, scheme)?;
    let dp = gauge_fixed_derivative(plus, grid, scheme)?;
    let ddm = gauge_fixed_second_derivative(minus, grid)?;
    let ddp = gauge_fixed_second_derivative(plus, grid)?;
    let n = grid.len();
    let mut diag_p_max: f64 = 0.0;
    let mut antisymmetry_max: f64 = 0.0;
    for i in 0..n {
        diag_p_max = diag_p_max.max(plus[i].dot(&dp[i]).abs()).max(minus[i].dot(&dm[i]).abs());
        antisymmetry_max = antisymmetry_max.max((plus[i].dot(&dm[i]) + minus[i].dot(&dp[i])).abs());
    }
    Ok(NumericCorrections {
        terms: CorrectionTerms {
            grid_r: *grid,
            p_offdiag: (0..n).map(|i| -minus[i].dot(&dp[i])).collect(),
            p2_offdiag: (0..n).map(|i| -minus[i].dot(&ddp[i])).collect(),
            p2_diag_plus: (0..n).map(|i| -plus[i].dot(&ddp[i])).collect(),
            p2_diag_minus: (0..n).map(|i| -minus[i].dot(&ddm[i])).collect(),
        },
        diag_p_max,
        antisymmetry_max,
    })
}
