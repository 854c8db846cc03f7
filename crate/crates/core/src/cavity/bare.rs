use nalgebra::DMatrix;

use crate::molecule::{
    adiabatic_dipole, build_bo_structure, electronic_parity, electronic_population, solve_exact_adiabatic,
    ElectronicStructure, MoleculeParams,
};
use crate::numerics::{BasisTag, EigenSolution, Grid1D};
use crate::{Error, Result};

/// Exact bare-molecule eigenstates used as the matter basis of cavity solves.
#[derive(Debug, Clone, PartialEq)]
pub struct BareStates {
    /// Ascending energies (a.u.).
    pub energies: Vec<f64>,
    /// `⟨s|x|t⟩` between the selected states.
    pub dipole: DMatrix<f64>,
    /// Mirror parity `±1` of each state.
    pub parity: Vec<i8>,
    /// Weight on the first excited electronic state.
    pub excited_weight: Vec<f64>,
}

impl BareStates {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// The bare states as an already diagonal eigen-solution.
    pub fn as_solution(&self) -> EigenSolution {
        let n = self.len();
        EigenSolution {
            energies: self.energies.clone(),
            vectors: DMatrix::identity(n, n),
            basis: BasisTag::Generic { dim: n },
        }
    }

    /// Builds the structure on `grid_x ⊗ grid_r` with `n_el` electronic states and selects states.
    pub fn from_params(
        p: &MoleculeParams,
        grid_x: &Grid1D,
        grid_r: &Grid1D,
        n_el: usize,
        n_ground: usize,
        n_excited: usize,
    ) -> Result<Self> {
        let es = build_bo_structure(p, grid_x, grid_r, n_el.max(2), true)?;
        bare_states(&es, p.mass, n_ground, n_excited)
    }
}

/// The `n_ground` lowest states of ground-surface character and the
/// `n_excited` lowest of excited-surface character, from the exact
/// molecular solve in the adiabatic-projection basis of `es`.
///
/// Permanent dipoles between equal-parity states are checked to vanish and
/// then stored as exact zeros.
pub fn bare_states(es: &ElectronicStructure, mass: f64, n_ground: usize, n_excited: usize) -> Result<BareStates> {
    if n_ground == 0 || n_excited == 0 {
        return Err(Error::param("need at least one ground and one excited bare state"));
    }
    let dim = es.grid_r.len() * es.n_states();
    let mut k = (n_ground + n_excited + 8).min(dim);
    let (sol, picked) = loop {
        let sol = solve_exact_adiabatic(es, mass, k)?;
        let pop0 = electronic_population(&sol, 0)?;
        let pop1 = electronic_population(&sol, 1)?;
        let g: Vec<usize> = (0..sol.len()).filter(|&s| pop0[s] > 0.5).take(n_ground).collect();
        let e: Vec<usize> = (0..sol.len()).filter(|&s| pop1[s] > 0.5).take(n_excited).collect();
        if g.len() == n_ground && e.len() == n_excited {
            let mut picked: Vec<usize> = g.into_iter().chain(e).collect();
            picked.sort_unstable();
            break (sol, picked);
        }
        if k == dim {
            return Err(Error::param(format!(
                "only {} ground and {} excited states exist on this grid",
                g.len(),
                e.len()
            )));
        }
        k = (2 * k).min(dim);
    };
    let parity_raw = electronic_parity(&sol)?;
    let pop1 = electronic_population(&sol, 1)?;
    let mut parity = Vec::with_capacity(picked.len());
    for &s in &picked {
        let p = parity_raw[s];
        if (p.abs() - 1.0).abs() > 1e-6 {
            return Err(Error::Diagnostic(format!("bare state {s} has mixed parity {p:.6}")));
        }
        parity.push(if p > 0.0 { 1 } else { -1 });
    }
    let v = sol.vectors.select_columns(&picked);
    let mut dipole = v.transpose() * (adiabatic_dipole(es) * &v);
    let scale = dipole.amax().max(1.0);
    for a in 0..picked.len() {
        for b in 0..=a {
            if parity[a] == parity[b] {
                if dipole[(a, b)].abs() > 1e-8 * scale {
                    return Err(Error::Diagnostic(format!(
                        "permanent dipole {:.3e} between equal-parity states",
                        dipole[(a, b)]
                    )));
                }
                dipole[(a, b)] = 0.0;
                dipole[(b, a)] = 0.0;
            } else {
                let m = 0.5 * (dipole[(a, b)] + dipole[(b, a)]);
                dipole[(a, b)] = m;
                dipole[(b, a)] = m;
            }
        }
    }
    Ok(BareStates {
        energies: picked.iter().map(|&s| sol.energies[s]).collect(),
        dipole,
        parity,
        excited_weight: picked.iter().map(|&s| pop1[s]).collect(),
    })
}
