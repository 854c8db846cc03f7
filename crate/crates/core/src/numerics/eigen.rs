use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Which basis the columns of an [`EigenSolution`] are expressed in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisTag {
    Generic { dim: usize },
    GridX { n_x: usize },
    GridR { n_r: usize },
    /// Direct product grid, index `i_r * n_x + i_x`.
    GridXR { n_x: usize, n_r: usize },
    /// `|R_i⟩ ⊗ φ_a(x; R_i)`, index `i_r * n_el + a`.
    Adiabatic { n_r: usize, n_el: usize },
    /// Bare molecular eigenstates times Fock states, index `state * (n_max + 1) + n`.
    CavityProduct { n_bare: usize, n_max: usize },
    /// Exchange-symmetrized two-molecule states times Fock states.
    TwoMol { n_pairs: usize, n_max: usize },
}

impl fmt::Display for BasisTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisTag::Generic { dim } => write!(f, "generic[{dim}]"),
            BasisTag::GridX { n_x } => write!(f, "grid-x[{n_x}]"),
            BasisTag::GridR { n_r } => write!(f, "grid-R[{n_r}]"),
            BasisTag::GridXR { n_x, n_r } => write!(f, "grid-xR[{n_x}x{n_r}]"),
            BasisTag::Adiabatic { n_r, n_el } => write!(f, "adiabatic[{n_r}x{n_el}]"),
            BasisTag::CavityProduct { n_bare, n_max } => {
                write!(f, "product{{e,g}}xFock[{n_bare}x{}]", n_max + 1)
            }
            BasisTag::TwoMol { n_pairs, n_max } => write!(f, "2mol{{k1,k2,n}}[{n_pairs}x{}]", n_max + 1),
        }
    }
}

/// Lowest eigenpairs of a real symmetric operator.
///
/// Energies ascend. Within a degenerate group (relative gap below 1e-10)
/// states are ordered by the index of their first significant coefficient.
/// Each vector is signed so that its leading largest component is positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSolution {
    pub energies: Vec<f64>,
    pub vectors: DMatrix<f64>,
    pub basis: BasisTag,
}

impl EigenSolution {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    /// Keep only the first `k` pairs.
    pub fn truncate(&mut self, k: usize) {
        let k = k.min(self.len());
        self.energies.truncate(k);
        self.vectors = self.vectors.columns(0, k).into_owned();
    }

    pub fn with_basis(mut self, basis: BasisTag) -> Self {
        self.basis = basis;
        self
    }

    /// Largest `|⟨v_i|v_j⟩ - δ_ij|`.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.vectors.transpose() * &self.vectors;
        let mut worst: f64 = 0.0;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// Order pairs and fix signs by the documented convention.
    pub(crate) fn canonical(energies: Vec<f64>, vectors: DMatrix<f64>, basis: BasisTag) -> Self {
        let n = energies.len();
        let scale = energies.iter().fold(1.0_f64, |m, e| m.max(e.abs()));
        let lead: Vec<usize> = (0..n).map(|j| first_significant(vectors.column(j).as_slice())).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]));
        // Reorder near-degenerate runs by leading index.
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && energies[order[end]] - energies[order[end - 1]] <= 1e-10 * scale {
                end += 1;
            }
            order[start..end].sort_by_key(|&j| (lead[j], j));
            start = end;
        }
        let mut out = DMatrix::zeros(vectors.nrows(), n);
        let mut sorted = Vec::with_capacity(n);
        for (dst, &src) in order.iter().enumerate() {
            sorted.push(energies[src]);
            let mut col = vectors.column(src).into_owned();
            if col[sign_index(col.as_slice())] < 0.0 {
                col.neg_mut();
            }
            out.set_column(dst, &col);
        }
        Self { energies: sorted, vectors: out, basis }
    }
}

fn first_significant(v: &[f64]) -> usize {
    let max = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    v.iter().position(|x| x.abs() > 1e-8 * max).unwrap_or(0)
}

/// First index whose magnitude is within 1e-6 of the largest.
fn sign_index(v: &[f64]) -> usize {
    let max = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    v.iter().position(|x| x.abs() >= (1.0 - 1e-6) * max).unwrap_or(0)
}

fn check_symmetric(h: &DMatrix<f64>) -> Result<()> {
    if !h.is_square() {
        return Err(Error::Validation(format!("matrix is {}x{}, not square", h.nrows(), h.ncols())));
    }
    let scale = h.amax().max(1.0);
    for i in 0..h.nrows() {
        for j in 0..i {
            let d = (h[(i, j)] - h[(j, i)]).abs();
            if !(d <= 1e-10 * scale) {
                return Err(Error::Validation(format!(
                    "matrix not symmetric at ({i},{j}): difference {d:.3e}"
                )));
            }
        }
    }
    Ok(())
}

fn is_diagonal(h: &DMatrix<f64>) -> bool {
    (0..h.ncols()).all(|j| (0..h.nrows()).all(|i| i == j || h[(i, j)] == 0.0))
}

/// The `k` lowest eigenpairs of a real symmetric matrix.
pub fn solve_hermitian(h: &DMatrix<f64>, k: usize) -> Result<EigenSolution> {
    check_symmetric(h)?;
    let n = h.nrows();
    if k == 0 || k > n {
        return Err(Error::param(format!("requested {k} eigenpairs of a {n}-dimensional operator")));
    }
    if h.iter().any(|x| !x.is_finite()) {
        return Err(Error::Validation("matrix has non-finite entries".into()));
    }
    let tag = BasisTag::Generic { dim: n };
    let mut sol = if is_diagonal(h) {
        EigenSolution::canonical(h.diagonal().iter().copied().collect(), DMatrix::identity(n, n), tag)
    } else {
        let eig = h.clone().symmetric_eigen();
        EigenSolution::canonical(eig.eigenvalues.iter().copied().collect(), eig.eigenvectors, tag)
    };
    sol.truncate(k);
    Ok(sol)
}

/// Full spectrum; see [`solve_hermitian`].
pub fn solve_hermitian_all(h: &DMatrix<f64>) -> Result<EigenSolution> {
    solve_hermitian(h, h.nrows())
}
