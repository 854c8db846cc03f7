use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::cavity::{BareStates, CavityParams};
use crate::numerics::{solve_hermitian_all, BasisTag, EigenSolution};
use crate::spectra::{transitions, Transition};
use crate::{Error, Result};

/// Product basis `|k₁⟩|k₂⟩|n⟩` of two molecules and the photon mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoMolBasis {
    pub k_per_mol: usize,
    pub n_max: usize,
}

impl TwoMolBasis {
    pub fn new(k_per_mol: usize, n_max: usize) -> Self {
        Self { k_per_mol, n_max }
    }

    pub fn dim(&self) -> usize {
        self.k_per_mol * self.k_per_mol * (self.n_max + 1)
    }

    pub fn index(&self, k1: usize, k2: usize, n: usize) -> usize {
        (k1 * self.k_per_mol + k2) * (self.n_max + 1) + n
    }

    pub fn state(&self, i: usize) -> (usize, usize, usize) {
        let nf = self.n_max + 1;
        let pair = i / nf;
        (pair / self.k_per_mol, pair % self.k_per_mol, i % nf)
    }
}

/// Exchange-symmetric states `(|k₁k₂⟩ + |k₂k₁⟩)/norm ⊗ |n⟩` with `k₁ ≤ k₂`.
///
/// The ground state and every state reached from it by `μ₁ + μ₂` live in
/// this sector, so absorption needs nothing else.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricBasis {
    pub states: Vec<(usize, usize, usize)>,
    pub n_max: usize,
    /// Per-molecule state count.
    pub k_per_mol: usize,
}

impl SymmetricBasis {
    /// Every symmetric state whose uncoupled energy lies at most `cap` above
    /// the uncoupled ground energy (`None` keeps all). A cap below the
    /// counter-rotating partners near `3 ω_c` visibly shifts the polaritons.
    pub fn new(bare: &BareStates, c: &CavityParams, cap: Option<f64>) -> Self {
        let k = bare.len();
        let e0 = 2.0 * bare.energies[0];
        let mut states = Vec::new();
        for a in 0..k {
            for b in a..k {
                for n in 0..=c.n_max {
                    let e = bare.energies[a] + bare.energies[b] + n as f64 * c.omega_c - e0;
                    if cap.is_none_or(|m| e <= m) {
                        states.push((a, b, n));
                    }
                }
            }
        }
        Self { states, n_max: c.n_max, k_per_mol: k }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Columns are the symmetric states written in the product basis.
    pub fn embedding(&self) -> DMatrix<f64> {
        let full = TwoMolBasis::new(self.k_per_mol, self.n_max);
        let mut m = DMatrix::zeros(full.dim(), self.len());
        for (j, &(a, b, n)) in self.states.iter().enumerate() {
            if a == b {
                m[(full.index(a, a, n), j)] = 1.0;
            } else {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                m[(full.index(a, b, n), j)] = s;
                m[(full.index(b, a, n), j)] = s;
            }
        }
        m
    }

    fn parity(&self, bare: &BareStates, j: usize) -> i8 {
        let (a, b, n) = self.states[j];
        let p = bare.parity[a] * bare.parity[b];
        if n % 2 == 0 {
            p
        } else {
            -p
        }
    }
}

/// `⟨S_ab|o⊗1 + 1⊗o|S_cd⟩` for a one-molecule operator `o`.
fn symmetric_element(o: &DMatrix<f64>, (a, b): (usize, usize), (c, d): (usize, usize)) -> f64 {
    let m = |x: usize, y: usize, z: usize, w: usize| {
        let mut v = 0.0;
        if y == w {
            v += o[(x, z)];
        }
        if x == z {
            v += o[(y, w)];
        }
        v
    };
    let norm = |x: usize, y: usize| if x == y { 0.5 } else { std::f64::consts::FRAC_1_SQRT_2 };
    norm(a, b) * norm(c, d) * (m(a, b, c, d) + m(a, b, d, c) + m(b, a, c, d) + m(b, a, d, c))
}

/// Two-molecule Hamiltonian restricted to `rows` of the symmetric basis.
fn hamiltonian_rows(bare: &BareStates, c: &CavityParams, basis: &SymmetricBasis, rows: &[usize]) -> DMatrix<f64> {
    let k = rows.len();
    let cols: Vec<Vec<f64>> = (0..k)
        .into_par_iter()
        .map(|p| {
            let (a, b, n) = basis.states[rows[p]];
            (0..k)
                .map(|q| {
                    let (x, y, m) = basis.states[rows[q]];
                    if p == q {
                        bare.energies[a] + bare.energies[b] + n as f64 * c.omega_c
                    } else if n.abs_diff(m) == 1 && c.g != 0.0 {
                        c.g * (n.max(m) as f64).sqrt() * symmetric_element(&bare.dipole, (a, b), (x, y))
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    DMatrix::from_fn(k, k, |i, j| cols[j][i])
}

/// `H_m⊗1 + 1⊗H_m + ω_c a†a + g (μ₁ + μ₂)(a† + a)` in the symmetric basis.
pub fn two_mol_hamiltonian(bare: &BareStates, c: &CavityParams, basis: &SymmetricBasis) -> DMatrix<f64> {
    let all: Vec<usize> = (0..basis.len()).collect();
    hamiltonian_rows(bare, c, basis, &all)
}

/// `μ₁ + μ₂` in the symmetric basis (photon number conserved).
pub fn two_mol_dipole(bare: &BareStates, basis: &SymmetricBasis) -> DMatrix<f64> {
    let k = basis.len();
    DMatrix::from_fn(k, k, |i, j| {
        let (a, b, n) = basis.states[i];
        let (x, y, m) = basis.states[j];
        if n == m {
            symmetric_element(&bare.dipole, (a, b), (x, y))
        } else {
            0.0
        }
    })
}

/// The same Hamiltonian in the full product basis; for small checks only.
pub fn full_two_mol_hamiltonian(bare: &BareStates, c: &CavityParams) -> DMatrix<f64> {
    let basis = TwoMolBasis::new(bare.len(), c.n_max);
    let dim = basis.dim();
    DMatrix::from_fn(dim, dim, |i, j| {
        let (a, b, n) = basis.state(i);
        let (x, y, m) = basis.state(j);
        if i == j {
            return bare.energies[a] + bare.energies[b] + n as f64 * c.omega_c;
        }
        if n.abs_diff(m) != 1 {
            return 0.0;
        }
        let mut v = 0.0;
        if b == y {
            v += bare.dipole[(a, x)];
        }
        if a == x {
            v += bare.dipole[(b, y)];
        }
        c.g * (n.max(m) as f64).sqrt() * v
    })
}

/// Symmetric-sector eigenpairs of two identical molecules in one mode.
#[derive(Debug, Clone)]
pub struct TwoMolSolve {
    pub solution: EigenSolution,
    pub basis: SymmetricBasis,
    pub dipole: DMatrix<f64>,
}

impl TwoMolSolve {
    /// Absorption sticks through `μ₁ + μ₂`.
    pub fn transitions(&self) -> Result<Vec<Transition>> {
        transitions(&self.solution, &self.dipole)
    }

    /// `⟨a†a⟩` in state `j`.
    pub fn photon_number(&self, j: usize) -> Result<f64> {
        if j >= self.solution.len() {
            return Err(Error::param(format!("state {j} not in a {}-state solution", self.solution.len())));
        }
        Ok(self.solution.vectors.column(j).iter().zip(&self.basis.states).map(|(v, s)| s.2 as f64 * v * v).sum())
    }
}

/// All symmetric-sector eigenpairs at Fock cutoff `c.n_max`, solved in the
/// two parity blocks and merged.
pub fn solve_exact_two(bare: &BareStates, c: &CavityParams) -> Result<TwoMolSolve> {
    c.validate()?;
    let basis = SymmetricBasis::new(bare, c, None);
    if basis.is_empty() {
        return Err(Error::param("energy cap leaves no two-molecule states"));
    }
    let dim = basis.len();
    let mut energies = Vec::with_capacity(dim);
    let mut vectors = DMatrix::zeros(dim, dim);
    let mut col = 0;
    for sign in [1i8, -1] {
        let rows: Vec<usize> = (0..dim).filter(|&j| basis.parity(bare, j) == sign).collect();
        if rows.is_empty() {
            continue;
        }
        let sol = solve_hermitian_all(&hamiltonian_rows(bare, c, &basis, &rows))?;
        for j in 0..sol.len() {
            energies.push(sol.energies[j]);
            for (r, &i) in rows.iter().enumerate() {
                vectors[(i, col)] = sol.vectors[(r, j)];
            }
            col += 1;
        }
    }
    let tag = BasisTag::TwoMol { n_pairs: dim / (c.n_max + 1).max(1), n_max: c.n_max };
    let solution = EigenSolution::canonical(energies, vectors, tag);
    let dipole = two_mol_dipole(bare, &basis);
    Ok(TwoMolSolve { solution, basis, dipole })
}

/// Largest change of the lowest `k` symmetric-sector energies between a
/// solve with `small` and one with `large` per-molecule states.
pub fn two_mol_basis_drift(
    small: &BareStates,
    large: &BareStates,
    c: &CavityParams,
    k: usize,
) -> Result<f64> {
    let a = solve_exact_two(small, c)?;
    let b = solve_exact_two(large, c)?;
    if k == 0 || k > a.solution.len().min(b.solution.len()) {
        return Err(Error::param(format!("cannot compare {k} two-molecule states")));
    }
    Ok((0..k).map(|i| (a.solution.energies[i] - b.solution.energies[i]).abs()).fold(0.0, f64::max))
}
