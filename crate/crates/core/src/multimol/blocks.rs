use nalgebra::DMatrix;

use crate::cavity::CavityParams;
use crate::molecule::ElectronicStructure;
use crate::numerics::optimize::local_interpolate;
use crate::Result;

/// Ground and excited energies and their transition dipole for one molecule at one `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MolPoint {
    pub e_g: f64,
    pub e_e: f64,
    pub d: f64,
}

impl MolPoint {
    pub fn at(es: &ElectronicStructure, i: usize) -> Self {
        Self { e_g: es.surfaces[0][i], e_e: es.surfaces[1][i], d: es.dipoles[i][(0, 1)] }
    }

    /// Quartic interpolation of the sampled structure at `r`.
    pub fn interpolate(es: &ElectronicStructure, r: f64) -> Result<Self> {
        let xs = es.grid_r.points();
        Ok(Self {
            e_g: local_interpolate(&xs, es.ground(), r)?,
            e_e: local_interpolate(&xs, es.excited(), r)?,
            d: local_interpolate(&xs, &es.mu_eg(), r)?,
        })
    }

    pub fn energy(&self, a: usize) -> f64 {
        if a == 0 {
            self.e_g
        } else {
            self.e_e
        }
    }
}

/// Even block over `{gg0, eg1, ge1, ee0}` and odd block over `{gg1, eg0, ge0, ee1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParityBlocks {
    pub even: DMatrix<f64>,
    pub odd: DMatrix<f64>,
}

/// The two 4×4 blocks at one geometry (at most one photon).
///
/// `eg ↔ ee` excites the second molecule and carries `g d₂`; `ge ↔ ee`
/// carries `g d₁`. Only this assignment reproduces the full 8×8 spectrum.
pub fn parity_blocks(m1: &MolPoint, m2: &MolPoint, c: &CavityParams) -> ParityBlocks {
    let w = c.omega_c;
    let (h1, h2) = (c.g * m1.d, c.g * m2.d);
    let block = |n_gg: f64, n_eg: f64, n_ee: f64| {
        let diag = [m1.e_g + m2.e_g + n_gg * w, m1.e_e + m2.e_g + n_eg * w, m1.e_g + m2.e_e + n_eg * w, m1.e_e + m2.e_e + n_ee * w];
        DMatrix::from_row_slice(
            4,
            4,
            &[
                diag[0], h1, h2, 0.0, //
                h1, diag[1], 0.0, h2, //
                h2, 0.0, diag[2], h1, //
                0.0, h2, h1, diag[3],
            ],
        )
    };
    ParityBlocks { even: block(0.0, 1.0, 0.0), odd: block(1.0, 0.0, 1.0) }
}

/// [`parity_blocks`] at grid points `i1`, `i2` of two structures.
pub fn build_parity_blocks(
    es1: &ElectronicStructure,
    es2: &ElectronicStructure,
    c: &CavityParams,
    i1: usize,
    i2: usize,
) -> ParityBlocks {
    parity_blocks(&MolPoint::at(es1, i1), &MolPoint::at(es2, i2), c)
}

/// Basis `(a, b, n)` of the two-level pair with photons up to `n_max`,
/// restricted to total parity `(-1)^(a+b+n)` equal to `parity`.
pub fn pair_basis(n_max: usize, parity: i8) -> Vec<(usize, usize, usize)> {
    let want = if parity > 0 { 0 } else { 1 };
    let mut v = Vec::new();
    for n in 0..=n_max {
        for a in 0..2 {
            for b in 0..2 {
                if (a + b + n) % 2 == want {
                    v.push((a, b, n));
                }
            }
        }
    }
    v
}

/// Pair Hamiltonian on `basis`, with the diagonal shifted by `-shift`.
pub fn pair_matrix(basis: &[(usize, usize, usize)], m1: &MolPoint, m2: &MolPoint, c: &CavityParams, shift: f64) -> DMatrix<f64> {
    let k = basis.len();
    let mut h = DMatrix::zeros(k, k);
    for (p, &(a, b, n)) in basis.iter().enumerate() {
        h[(p, p)] = m1.energy(a) + m2.energy(b) + n as f64 * c.omega_c - shift;
        for (q, &(a2, b2, n2)) in basis.iter().enumerate().take(p) {
            if n.abs_diff(n2) != 1 {
                continue;
            }
            let amp = (n.max(n2) as f64).sqrt() * c.g;
            let v = if b == b2 && a != a2 {
                amp * m1.d
            } else if a == a2 && b != b2 {
                amp * m2.d
            } else {
                0.0
            };
            h[(p, q)] = v;
            h[(q, p)] = v;
        }
    }
    h
}

/// All eight `(a, b, n)` states with `n ≤ 1`, in `(n, a, b)` order.
pub fn full_pair_matrix(m1: &MolPoint, m2: &MolPoint, c: &CavityParams) -> DMatrix<f64> {
    let basis: Vec<(usize, usize, usize)> =
        (0..2).flat_map(|n| (0..2).flat_map(move |a| (0..2).map(move |b| (a, b, n)))).collect();
    pair_matrix(&basis, m1, m2, &c.with_n_max(1), 0.0)
}
