use nalgebra::DMatrix;

use super::{BareStates, CavityParams};
use crate::numerics::{solve_hermitian_all, BasisTag, EigenSolution};
use crate::spectra::{transitions, Transition};
use crate::{Error, Result};

/// Highest Fock cutoff tried by the automatic escalation.
pub const MAX_N_MAX: usize = 24;
/// Default energy drift allowed under `n_max → n_max + 1` (a.u.).
pub const FOCK_TOLERANCE: f64 = 1e-8;

fn index(s: usize, n: usize, n_max: usize) -> usize {
    s * (n_max + 1) + n
}

/// Full `H_m + ω_c a†a + g μ (a† + a)` in the basis `|s⟩ ⊗ |n⟩`, index `s (n_max + 1) + n`.
pub fn cavity_hamiltonian(bare: &BareStates, c: &CavityParams) -> Result<DMatrix<f64>> {
    c.validate()?;
    let (nb, nf) = (bare.len(), c.n_max + 1);
    let mut h = DMatrix::zeros(nb * nf, nb * nf);
    for s in 0..nb {
        for n in 0..nf {
            h[(index(s, n, c.n_max), index(s, n, c.n_max))] = bare.energies[s] + n as f64 * c.omega_c;
        }
    }
    if c.g != 0.0 {
        for s in 0..nb {
            for t in 0..nb {
                let m = bare.dipole[(s, t)];
                if m == 0.0 {
                    continue;
                }
                for n in 0..c.n_max {
                    let v = c.g * m * ((n + 1) as f64).sqrt();
                    h[(index(s, n + 1, c.n_max), index(t, n, c.n_max))] = v;
                    h[(index(t, n, c.n_max), index(s, n + 1, c.n_max))] = v;
                }
            }
        }
    }
    Ok(h)
}

/// `μ ⊗ 1` in the cavity product basis.
pub fn cavity_dipole(bare: &BareStates, n_max: usize) -> DMatrix<f64> {
    let (nb, nf) = (bare.len(), n_max + 1);
    let mut d = DMatrix::zeros(nb * nf, nb * nf);
    for s in 0..nb {
        for t in 0..nb {
            for n in 0..nf {
                d[(index(s, n, n_max), index(t, n, n_max))] = bare.dipole[(s, t)];
            }
        }
    }
    d
}

/// Total parity `π_s (-1)^n` of each product state.
pub fn product_parity(bare: &BareStates, n_max: usize) -> Vec<i8> {
    (0..bare.len())
        .flat_map(|s| (0..=n_max).map(move |n| if n % 2 == 0 { bare.parity[s] } else { -bare.parity[s] }))
        .collect()
}

/// All eigenpairs of the cavity Hamiltonian at fixed cutoff, solved in the
/// two parity blocks and merged.
pub fn solve_cavity(bare: &BareStates, c: &CavityParams) -> Result<EigenSolution> {
    let h = cavity_hamiltonian(bare, c)?;
    let parity = product_parity(bare, c.n_max);
    let dim = h.nrows();
    let mut energies = Vec::with_capacity(dim);
    let mut vectors = DMatrix::zeros(dim, dim);
    let mut col = 0;
    for sign in [1i8, -1] {
        let idx: Vec<usize> = (0..dim).filter(|&i| parity[i] == sign).collect();
        if idx.is_empty() {
            continue;
        }
        let block = h.select_rows(&idx).select_columns(&idx);
        let sol = solve_hermitian_all(&block)?;
        for j in 0..sol.len() {
            energies.push(sol.energies[j]);
            for (r, &i) in idx.iter().enumerate() {
                vectors[(i, col)] = sol.vectors[(r, j)];
            }
            col += 1;
        }
    }
    Ok(EigenSolution::canonical(energies, vectors, BasisTag::CavityProduct { n_bare: bare.len(), n_max: c.n_max }))
}

/// Converged cavity solve.
#[derive(Debug, Clone)]
pub struct CavitySolve {
    pub solution: EigenSolution,
    /// Cutoff actually used (at least the requested one).
    pub n_max: usize,
    /// Largest change of the lowest `k` energies under `n_max → n_max + 1`.
    pub drift: f64,
}

/// Lowest `k` eigenpairs with the Fock cutoff raised from `c.n_max` until the
/// lowest `k` energies move by less than `tol` when one more photon is allowed.
pub fn solve_exact_cavity(bare: &BareStates, c: &CavityParams, k: usize, tol: f64) -> Result<CavitySolve> {
    let mut n_max = c.n_max;
    let mut current = solve_cavity(bare, &c.with_n_max(n_max))?;
    if k == 0 || k > current.len() {
        return Err(Error::param(format!("requested {k} states of a {}-dimensional problem", current.len())));
    }
    let mut drift = f64::INFINITY;
    while n_max < MAX_N_MAX {
        let next = solve_cavity(bare, &c.with_n_max(n_max + 1))?;
        drift = (0..k).map(|i| (next.energies[i] - current.energies[i]).abs()).fold(0.0, f64::max);
        if drift <= tol {
            current.truncate(k);
            return Ok(CavitySolve { solution: current, n_max, drift });
        }
        n_max += 1;
        current = next;
    }
    Err(Error::NotConverged { what: format!("Fock cutoff up to {MAX_N_MAX}"), drift })
}

/// `⟨a†a⟩` in the lowest state of a cavity product solution.
pub fn ground_photon_number(sol: &EigenSolution) -> Result<f64> {
    photon_number(sol, 0)
}

/// `⟨a†a⟩` in state `j` of a cavity product solution.
pub fn photon_number(sol: &EigenSolution, j: usize) -> Result<f64> {
    let BasisTag::CavityProduct { n_max, .. } = sol.basis else {
        return Err(Error::param(format!("photon number needs a cavity product basis, got {}", sol.basis)));
    };
    if j >= sol.len() {
        return Err(Error::param(format!("state {j} not in a {}-state solution", sol.len())));
    }
    Ok(sol.vectors.column(j).iter().enumerate().map(|(i, c)| (i % (n_max + 1)) as f64 * c * c).sum())
}

/// Absorption sticks of a cavity solution through `μ ⊗ 1`.
pub fn cavity_transitions(bare: &BareStates, sol: &EigenSolution) -> Result<Vec<Transition>> {
    let BasisTag::CavityProduct { n_max, .. } = sol.basis else {
        return Err(Error::param(format!("expected a cavity product basis, got {}", sol.basis)));
    };
    transitions(sol, &cavity_dipole(bare, n_max))
}

/// Absorption sticks of the bare molecule in the same truncated basis.
pub fn bare_state_transitions(bare: &BareStates) -> Result<Vec<Transition>> {
    transitions(&bare.as_solution(), &bare.dipole)
}
