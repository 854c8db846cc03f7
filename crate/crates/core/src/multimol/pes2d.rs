use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::blocks::{pair_basis, pair_matrix, MolPoint};
use crate::cavity::CavityParams;
use crate::molecule::ElectronicStructure;
use crate::numerics::Grid1D;
use crate::{Error, Result};

/// Ascending eigenvalues and matching eigenvector columns.
pub(crate) fn eigen_sorted(m: DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let e = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..e.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = DVector::from_fn(order.len(), |i, _| e.eigenvalues[order[i]]);
    let vecs = DMatrix::from_fn(order.len(), order.len(), |r, c| e.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// `⟨odd_j|μ₁ + μ₂|even_k⟩` between two pair bases.
pub fn pair_dipole(odd: &[(usize, usize, usize)], even: &[(usize, usize, usize)], m1: &MolPoint, m2: &MolPoint) -> DMatrix<f64> {
    DMatrix::from_fn(odd.len(), even.len(), |j, k| {
        let (a, b, n) = odd[j];
        let (x, y, m) = even[k];
        if n != m {
            0.0
        } else if b == y && a != x {
            m1.d
        } else if a == x && b != y {
            m2.d
        } else {
            0.0
        }
    })
}

/// Surface labels; `G` is the lowest even state, the rest the three lowest odd states.
pub const PES2D_LABELS: [&str; 4] = ["G", "LP", "DS", "UP"];

/// Coupled two-molecule surfaces on the `(R₁, R₂)` lattice.
///
/// Matrices are indexed `(i₁, i₂)`. Labels follow pointwise energy order,
/// so a label may change character across a seam; the block eigenvectors
/// are kept for relabeling.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledPES2D {
    pub grid_r1: Grid1D,
    pub grid_r2: Grid1D,
    /// In the order of [`PES2D_LABELS`].
    pub surfaces: Vec<DMatrix<f64>>,
    /// Weight on basis states with at least one photon.
    pub photon_weight: Vec<DMatrix<f64>>,
    /// `⟨s|μ₁ + μ₂|G⟩` for `s` = LP, DS, UP, with signs continued over the lattice.
    pub ground_dipoles: Vec<DMatrix<f64>>,
    /// Even and odd block bases `(a, b, n)`.
    pub even_basis: Vec<(usize, usize, usize)>,
    pub odd_basis: Vec<(usize, usize, usize)>,
    /// Lowest even eigenvector per lattice point, row-major.
    pub ground_vectors: Vec<DVector<f64>>,
    /// Three lowest odd eigenvectors per lattice point, row-major.
    pub odd_vectors: Vec<DMatrix<f64>>,
}

impl CoupledPES2D {
    pub fn index(&self, label: &str) -> Result<usize> {
        PES2D_LABELS
            .iter()
            .position(|l| l.eq_ignore_ascii_case(label))
            .ok_or_else(|| Error::param(format!("unknown two-molecule surface '{label}'")))
    }

    pub fn surface(&self, label: &str) -> Result<&DMatrix<f64>> {
        Ok(&self.surfaces[self.index(label)?])
    }

    /// Values along `R₁ = R₂` (grids must coincide).
    pub fn diagonal(&self, label: &str) -> Result<Vec<f64>> {
        if self.grid_r1 != self.grid_r2 {
            return Err(Error::param("diagonal needs identical R grids"));
        }
        let s = self.surface(label)?;
        Ok((0..self.grid_r1.len()).map(|i| s[(i, i)]).collect())
    }

    /// Largest `|E(R₁,R₂) - E(R₂,R₁)|` over all surfaces.
    pub fn exchange_asymmetry(&self) -> f64 {
        if self.grid_r1 != self.grid_r2 {
            return f64::INFINITY;
        }
        self.surfaces.iter().map(|s| (s - s.transpose()).amax()).fold(0.0, f64::max)
    }

    /// Long-format CSV: `R1,R2,E_G,E_LP,E_DS,E_UP` in a.u.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("R1,R2,E_G,E_LP,E_DS,E_UP\n");
        for i in 0..self.grid_r1.len() {
            for j in 0..self.grid_r2.len() {
                let e: Vec<String> = self.surfaces.iter().map(|s| format!("{:.12e}", s[(i, j)])).collect();
                out.push_str(&format!("{},{},{}\n", self.grid_r1.point(i), self.grid_r2.point(j), e.join(",")));
            }
        }
        out
    }
}

/// Lowest even and three lowest odd eigenpairs at one geometry, photons up to `c.n_max`.
pub(crate) struct PairPointSolve {
    pub even: (f64, DVector<f64>),
    pub odd: (DVector<f64>, DMatrix<f64>),
}

pub(crate) fn solve_pair_point(
    even_basis: &[(usize, usize, usize)],
    odd_basis: &[(usize, usize, usize)],
    m1: &MolPoint,
    m2: &MolPoint,
    c: &CavityParams,
) -> PairPointSolve {
    let (ev, vv) = eigen_sorted(pair_matrix(even_basis, m1, m2, c, 0.0));
    let (eo, vo) = eigen_sorted(pair_matrix(odd_basis, m1, m2, c, 0.0));
    PairPointSolve {
        even: (ev[0], vv.column(0).into_owned()),
        odd: (eo.rows(0, 3).into_owned(), vo.columns(0, 3).into_owned()),
    }
}

/// Diagonalize both parity blocks at every lattice point. With `n_max = 1`
/// these are the two 4×4 blocks of [`parity_blocks`].
pub fn coupled_pes_two(es1: &ElectronicStructure, es2: &ElectronicStructure, c: &CavityParams) -> Result<CoupledPES2D> {
    c.validate()?;
    if es1.n_states() < 2 || es2.n_states() < 2 {
        return Err(Error::param("two-molecule surfaces need g and e on both molecules"));
    }
    if c.n_max == 0 {
        return Err(Error::param("two-molecule surfaces need at least one photon"));
    }
    let (n1, n2) = (es1.grid_r.len(), es2.grid_r.len());
    let m1: Vec<MolPoint> = (0..n1).map(|i| MolPoint::at(es1, i)).collect();
    let m2: Vec<MolPoint> = (0..n2).map(|i| MolPoint::at(es2, i)).collect();
    let even_basis = pair_basis(c.n_max, 1);
    let odd_basis = pair_basis(c.n_max, -1);
    let mut points: Vec<PairPointSolve> = (0..n1 * n2)
        .into_par_iter()
        .map(|k| solve_pair_point(&even_basis, &odd_basis, &m1[k / n2], &m2[k % n2], c))
        .collect();
    // Continue eigenvector signs along R₂ within each row, rows seeded along R₁.
    for i in 0..n1 {
        for j in 0..n2 {
            let k = i * n2 + j;
            let prev = match (i, j) {
                (0, 0) => continue,
                (_, 0) => k - n2,
                _ => k - 1,
            };
            if points[prev].even.1.dot(&points[k].even.1) < 0.0 {
                points[k].even.1.neg_mut();
            }
            for s in 0..3 {
                if points[prev].odd.1.column(s).dot(&points[k].odd.1.column(s)) < 0.0 {
                    points[k].odd.1.column_mut(s).neg_mut();
                }
            }
        }
    }
    let photon = |basis: &[(usize, usize, usize)], v: &DVector<f64>| -> f64 {
        basis.iter().zip(v.iter()).filter(|(s, _)| s.2 > 0).map(|(_, x)| x * x).sum()
    };
    let mut surfaces = vec![DMatrix::zeros(n1, n2); 4];
    let mut photon_weight = vec![DMatrix::zeros(n1, n2); 4];
    let mut ground_dipoles = vec![DMatrix::zeros(n1, n2); 3];
    for i in 0..n1 {
        for j in 0..n2 {
            let pt = &points[i * n2 + j];
            surfaces[0][(i, j)] = pt.even.0;
            photon_weight[0][(i, j)] = photon(&even_basis, &pt.even.1);
            let dg = pair_dipole(&odd_basis, &even_basis, &m1[i], &m2[j]) * &pt.even.1;
            for s in 0..3 {
                surfaces[s + 1][(i, j)] = pt.odd.0[s];
                photon_weight[s + 1][(i, j)] = photon(&odd_basis, &pt.odd.1.column(s).into_owned());
                ground_dipoles[s][(i, j)] = pt.odd.1.column(s).dot(&dg);
            }
        }
    }
    Ok(CoupledPES2D {
        grid_r1: es1.grid_r,
        grid_r2: es2.grid_r,
        surfaces,
        photon_weight,
        ground_dipoles,
        even_basis,
        odd_basis,
        ground_vectors: points.iter().map(|p| p.even.1.clone()).collect(),
        odd_vectors: points.into_iter().map(|p| p.odd.1).collect(),
    })
}

/// Dark-state gap along `R₁ = R₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct DarkStateSplitting {
    pub r: Vec<f64>,
    /// `min(E_UP - E_DS, E_DS - E_LP)` from the 4×4 diagonalization.
    pub gap: Vec<f64>,
    /// `"UP"` or `"LP"`, whichever polariton is closer to the dark state.
    pub nearest: Vec<&'static str>,
    /// `(g d)² / 4 |E_gg1 - E_eg0|`, as printed.
    pub printed: Vec<f64>,
    /// Second-order gap of the 4×4 problem, `2 (g d)² |1/δ - 1/(E_e - E_g + ω_c)|`
    /// with `δ = E_eg0 - E_gg1`; the second term is the `ee1` partner.
    pub second_order: Vec<f64>,
    /// Grid points left out because `|E_gg1 - E_eg0|` fell below the threshold.
    pub excluded: Vec<f64>,
}

/// Dark-state-to-nearest-polariton gap on the diagonal of `pes`, next to
/// the perturbative estimates. Points with `|E_gg1 - E_eg0| < 4 g |d|`
/// are near resonance, where no expansion in `g d / δ` holds, and are excluded.
pub fn dark_state_splitting(pes: &CoupledPES2D, es: &ElectronicStructure, c: &CavityParams) -> Result<DarkStateSplitting> {
    if pes.grid_r1 != es.grid_r || pes.grid_r2 != es.grid_r {
        return Err(Error::param("dark-state scan needs the structure grid on both axes"));
    }
    let (lp, ds, up) = (pes.diagonal("LP")?, pes.diagonal("DS")?, pes.diagonal("UP")?);
    let mut out = DarkStateSplitting {
        r: vec![],
        gap: vec![],
        nearest: vec![],
        printed: vec![],
        second_order: vec![],
        excluded: vec![],
    };
    for i in 0..es.grid_r.len() {
        let m = MolPoint::at(es, i);
        let delta = m.e_g + c.omega_c - m.e_e;
        let gd = c.g * m.d;
        let r = es.grid_r.point(i);
        if delta.abs() < 4.0 * gd.abs() {
            out.excluded.push(r);
            continue;
        }
        let (above, below) = (up[i] - ds[i], ds[i] - lp[i]);
        out.r.push(r);
        out.gap.push(above.min(below));
        out.nearest.push(if above <= below { "UP" } else { "LP" });
        out.printed.push(gd * gd / (4.0 * delta.abs()));
        let partner = m.e_e - m.e_g + c.omega_c;
        out.second_order.push(2.0 * gd * gd * (1.0 / -delta - 1.0 / partner).abs());
    }
    if out.r.is_empty() {
        return Err(Error::Window("every diagonal point is within the resonance exclusion".into()));
    }
    Ok(out)
}
