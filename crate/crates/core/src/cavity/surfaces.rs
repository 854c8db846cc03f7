use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::CavityParams;
use crate::molecule::ElectronicStructure;
use crate::numerics::{solve_hermitian_all, Grid1D};
use crate::spectra::{boa_transitions, Transition};
use crate::{Error, Result};

/// Electronic states `a` and Fock states `n` in one parity block of the
/// per-R electronic+photon matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockBasis {
    /// `(a, n)` pairs in block order.
    pub states: Vec<(usize, usize)>,
}

impl BlockBasis {
    /// States with `(-1)^(a+n)` equal to `parity` (`+1` holds `|g,0⟩`).
    pub fn new(n_el: usize, n_max: usize, parity: i8) -> Self {
        let want = if parity > 0 { 0 } else { 1 };
        let states = (0..n_el)
            .flat_map(|a| (0..=n_max).map(move |n| (a, n)))
            .filter(|(a, n)| (a + n) % 2 == want)
            .collect();
        Self { states }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Block matrix at grid point `i`, using the first `n_el` states of `es`.
    pub fn matrix(&self, es: &ElectronicStructure, i: usize, c: &CavityParams) -> DMatrix<f64> {
        let energies: Vec<f64> = es.surfaces.iter().map(|s| s[i]).collect();
        self.matrix_from(&energies, &es.dipoles[i], c)
    }

    /// Block matrix from electronic energies and the dipole matrix at one geometry.
    pub fn matrix_from(&self, energies: &[f64], dipoles: &DMatrix<f64>, c: &CavityParams) -> DMatrix<f64> {
        let m = self.len();
        let mut h = DMatrix::zeros(m, m);
        for (p, &(a, n)) in self.states.iter().enumerate() {
            h[(p, p)] = energies[a] + n as f64 * c.omega_c;
            for (q, &(b, k)) in self.states.iter().enumerate().take(p) {
                if n.abs_diff(k) == 1 {
                    let v = c.g * dipoles[(a, b)] * (n.max(k) as f64).sqrt();
                    h[(p, q)] = v;
                    h[(q, p)] = v;
                }
            }
        }
        h
    }

    /// `⟨a,n|μ|b,n⟩` in the mixed product of two blocks.
    pub fn dipole_between(&self, other: &BlockBasis, es: &ElectronicStructure, i: usize) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.len(), other.len());
        for (p, &(a, n)) in self.states.iter().enumerate() {
            for (q, &(b, k)) in other.states.iter().enumerate() {
                if n == k {
                    d[(p, q)] = es.dipoles[i][(a, b)];
                }
            }
        }
        d
    }
}

/// Coupled surfaces of one molecule: `G` (lowest even state), `LP` and `UP`
/// (two lowest odd states).
#[derive(Debug, Clone, PartialEq)]
pub struct PolaritonSurfaces {
    pub grid_r: Grid1D,
    pub labels: Vec<String>,
    pub surfaces: Vec<Vec<f64>>,
    /// Basis of each labelled surface's block.
    pub blocks: Vec<BlockBasis>,
    /// `|c|²` per surface, per grid point, per block state.
    pub weights: Vec<Vec<Vec<f64>>>,
    /// `⟨G|μ|s⟩(R)` for each surface, signs continuous in R (zero for `G`).
    pub ground_dipoles: Vec<Vec<f64>>,
}

impl PolaritonSurfaces {
    pub fn index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::param(format!("no surface labelled {label}")))
    }

    pub fn surface(&self, label: &str) -> Result<&[f64]> {
        Ok(&self.surfaces[self.index(label)?])
    }

    /// Weight on excited electronic states of surface `s` at grid point `i`.
    pub fn exciton_fraction(&self, s: usize, i: usize) -> f64 {
        self.blocks[s].states.iter().zip(&self.weights[s][i]).filter(|((a, _), _)| *a > 0).map(|(_, w)| w).sum()
    }

    /// `⟨a†a⟩` of surface `s` at grid point `i`.
    pub fn photon_number(&self, s: usize, i: usize) -> f64 {
        self.blocks[s].states.iter().zip(&self.weights[s][i]).map(|((_, n), w)| *n as f64 * w).sum()
    }

    /// Born-Oppenheimer absorption sticks from the lowest level on `G` to
    /// up to `n_levels` levels on `LP` and on `UP`.
    pub fn transitions(&self, mass: f64, n_levels: usize) -> Result<Vec<Transition>> {
        let g = self.index("G")?;
        let lp = self.index("LP")?;
        let up = self.index("UP")?;
        boa_transitions(
            &self.surfaces[g],
            &[(&self.surfaces[lp], &self.ground_dipoles[lp]), (&self.surfaces[up], &self.ground_dipoles[up])],
            &self.grid_r,
            mass,
            n_levels,
        )
    }
}

/// Flip signs so consecutive vectors overlap non-negatively.
fn continuous_signs(vecs: &mut [DVector<f64>]) {
    if let Some(first) = vecs.first_mut() {
        let lead = first.iamax();
        if first[lead] < 0.0 {
            first.neg_mut();
        }
    }
    for i in 1..vecs.len() {
        if vecs[i].dot(&vecs[i - 1]) < 0.0 {
            vecs[i].neg_mut();
        }
    }
}

/// Per-R diagonalization of the electronic+photon matrix on the `g` and `e`
/// states of `es`, parity-blocked.
pub fn coupled_pes_single(es: &ElectronicStructure, c: &CavityParams) -> Result<PolaritonSurfaces> {
    c.validate()?;
    if es.n_states() < 2 {
        return Err(Error::param("coupled surfaces need the g and e states"));
    }
    let even = BlockBasis::new(2, c.n_max, 1);
    let odd = BlockBasis::new(2, c.n_max, -1);
    let n_r = es.grid_r.len();
    let per_r: Vec<(DVector<f64>, DVector<f64>, DVector<f64>, [f64; 3])> = (0..n_r)
        .into_par_iter()
        .map(|i| {
            let se = solve_hermitian_all(&even.matrix(es, i, c))?;
            let so = solve_hermitian_all(&odd.matrix(es, i, c))?;
            Ok((
                se.vectors.column(0).into_owned(),
                so.vectors.column(0).into_owned(),
                so.vectors.column(1).into_owned(),
                [se.energies[0], so.energies[0], so.energies[1]],
            ))
        })
        .collect::<Result<_>>()?;
    let mut vg: Vec<DVector<f64>> = per_r.iter().map(|t| t.0.clone()).collect();
    let mut vl: Vec<DVector<f64>> = per_r.iter().map(|t| t.1.clone()).collect();
    let mut vu: Vec<DVector<f64>> = per_r.iter().map(|t| t.2.clone()).collect();
    for v in [&mut vg, &mut vl, &mut vu] {
        continuous_signs(v);
    }
    let weights = |v: &[DVector<f64>]| v.iter().map(|c| c.iter().map(|x| x * x).collect()).collect();
    let mut mu_l = Vec::with_capacity(n_r);
    let mut mu_u = Vec::with_capacity(n_r);
    for i in 0..n_r {
        let d = even.dipole_between(&odd, es, i);
        mu_l.push(vg[i].dot(&(&d * &vl[i])));
        mu_u.push(vg[i].dot(&(&d * &vu[i])));
    }
    Ok(PolaritonSurfaces {
        grid_r: es.grid_r,
        labels: vec!["G".into(), "LP".into(), "UP".into()],
        surfaces: (0..3).map(|s| per_r.iter().map(|t| t.3[s]).collect()).collect(),
        blocks: vec![even, odd.clone(), odd],
        weights: vec![weights(&vg), weights(&vl), weights(&vu)],
        ground_dipoles: vec![vec![0.0; n_r], mu_l, mu_u],
    })
}
