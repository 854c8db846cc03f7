//! Absorption cross sections and spectral comparison metrics.

mod boa;

pub use boa::{bare_transitions, boa_transitions, vibronic_transitions};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numerics::optimize::minimize_bracketed;
use crate::numerics::EigenSolution;
use crate::units::{au_to_ev, ev_to_au, SPEED_OF_LIGHT_AU};
use crate::{Error, Result};

/// Default Lorentzian half width, eV.
pub const DEFAULT_EPSILON_EV: f64 = 0.015;
/// Default number of frequency points.
pub const DEFAULT_POINTS: usize = 2000;
/// Default half span of the frequency window around the transition, eV.
pub const DEFAULT_HALF_SPAN_EV: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    #[default]
    None,
    Peak,
    Area,
}

/// An excitation from the ground state: energy above it (a.u.) and `|⟨k|μ|0⟩|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub energy: f64,
    pub strength: f64,
}

/// Cross section on a frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Photon energies, eV.
    pub omega: Vec<f64>,
    pub sigma: Vec<f64>,
    /// Lorentzian half width, eV.
    pub epsilon: f64,
    pub normalization: Normalization,
}

/// Uniform grid of `n` photon energies over `center ± half_span` (eV).
pub fn omega_grid(center: f64, half_span: f64, n: usize) -> Result<Vec<f64>> {
    if !(half_span > 0.0) || n < 2 {
        return Err(Error::param("frequency grid needs a positive span and at least two points"));
    }
    let lo = (center - half_span).max(0.0);
    let hi = center + half_span;
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::param(format!("broadening must be positive, got {epsilon}")));
    }
    Ok(())
}

/// `σ(ω) = (4πω/c) Σ_k |d_k|² ε / ((ω_k0 - ω)² + ε²)`, evaluated in a.u.
pub fn absorption_from_transitions(transitions: &[Transition], epsilon_ev: f64, omega_ev: &[f64]) -> Result<Spectrum> {
    check_epsilon(epsilon_ev)?;
    let eps = ev_to_au(epsilon_ev);
    let sigma = omega_ev
        .iter()
        .map(|&w_ev| {
            let w = ev_to_au(w_ev);
            let sum: f64 = transitions.iter().map(|t| t.strength * eps / ((t.energy - w).powi(2) + eps * eps)).sum();
            4.0 * std::f64::consts::PI * w / SPEED_OF_LIGHT_AU * sum
        })
        .collect();
    Ok(Spectrum { omega: omega_ev.to_vec(), sigma, epsilon: epsilon_ev, normalization: Normalization::None })
}

/// Transitions from the lowest state of `sol` through the dipole matrix `dipole`.
pub fn transitions(sol: &EigenSolution, dipole: &DMatrix<f64>) -> Result<Vec<Transition>> {
    if dipole.nrows() != sol.dim() || dipole.ncols() != sol.dim() {
        return Err(Error::param(format!(
            "dipole is {}x{}, solution basis has dimension {}",
            dipole.nrows(),
            dipole.ncols(),
            sol.dim()
        )));
    }
    let mu0 = dipole * sol.vectors.column(0);
    Ok((1..sol.len())
        .map(|k| Transition {
            energy: sol.energies[k] - sol.energies[0],
            strength: sol.vectors.column(k).dot(&mu0).powi(2),
        })
        .collect())
}

/// Sum-over-states absorption of an eigen-solution.
pub fn absorption(sol: &EigenSolution, dipole: &DMatrix<f64>, epsilon_ev: f64, omega_ev: &[f64]) -> Result<Spectrum> {
    absorption_from_transitions(&transitions(sol, dipole)?, epsilon_ev, omega_ev)
}

/// Absorption through the resolvent `Im ⟨μψ₀|(H - E₀ - ω - iε)⁻¹|μψ₀⟩`,
/// one complex linear solve per frequency. The ground-state component of
/// `μψ₀` is removed so only excitations contribute.
pub fn absorption_resolvent(
    h: &DMatrix<f64>,
    dipole: &DMatrix<f64>,
    ground: &DVector<f64>,
    e0: f64,
    epsilon_ev: f64,
    omega_ev: &[f64],
) -> Result<Spectrum> {
    check_epsilon(epsilon_ev)?;
    let eps = ev_to_au(epsilon_ev);
    let mut phi = dipole * ground;
    let c = ground.dot(&phi);
    phi.axpy(-c, ground, 1.0);
    let phi_c: DVector<Complex64> = phi.map(|v| Complex64::new(v, 0.0));
    let n = h.nrows();
    let mut sigma = Vec::with_capacity(omega_ev.len());
    for &w_ev in omega_ev {
        let w = ev_to_au(w_ev);
        let a = DMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { Complex64::new(-e0 - w, -eps) } else { Complex64::new(0.0, 0.0) };
            Complex64::new(h[(i, j)], 0.0) + d
        });
        let x = a.lu().solve(&phi_c).ok_or_else(|| Error::Singular(format!("resolvent at ω = {w_ev} eV")))?;
        let im = phi_c.iter().zip(x.iter()).map(|(p, q)| p.conj() * q).sum::<Complex64>().im;
        sigma.push(4.0 * std::f64::consts::PI * w / SPEED_OF_LIGHT_AU * im);
    }
    Ok(Spectrum { omega: omega_ev.to_vec(), sigma, epsilon: epsilon_ev, normalization: Normalization::None })
}

impl Spectrum {
    pub fn normalized(&self, how: Normalization) -> Result<Spectrum> {
        let factor = match how {
            Normalization::None => 1.0,
            Normalization::Peak => self.sigma.iter().fold(0.0_f64, |m, v| m.max(*v)),
            Normalization::Area => trapezoid(&self.omega, &self.sigma),
        };
        if !(factor > 0.0) {
            return Err(Error::Diagnostic("cannot normalize an empty spectrum".into()));
        }
        Ok(Spectrum {
            omega: self.omega.clone(),
            sigma: self.sigma.iter().map(|v| v / factor).collect(),
            epsilon: self.epsilon,
            normalization: how,
        })
    }

    pub fn area(&self) -> f64 {
        trapezoid(&self.omega, &self.sigma)
    }

    /// Interior local maxima as `(index, value)`, plateaus counted once.
    pub fn local_maxima(&self) -> Vec<(usize, f64)> {
        let s = &self.sigma;
        let mut out = Vec::new();
        let mut i = 1;
        while i + 1 < s.len() {
            if s[i] > s[i - 1] {
                let mut j = i;
                while j + 1 < s.len() && s[j + 1] == s[i] {
                    j += 1;
                }
                if j + 1 < s.len() && s[j + 1] < s[i] {
                    out.push(((i + j) / 2, s[i]));
                }
                i = j + 1;
            } else {
                i += 1;
            }
        }
        out
    }

    /// Peak position refined by a parabola through the three highest samples (eV).
    pub fn refine_peak(&self, i: usize) -> f64 {
        let (w, s) = (&self.omega, &self.sigma);
        if i == 0 || i + 1 >= s.len() {
            return w[i];
        }
        let denom = s[i - 1] - 2.0 * s[i] + s[i + 1];
        if denom >= 0.0 {
            return w[i];
        }
        let off = 0.5 * (s[i - 1] - s[i + 1]) / denom;
        w[i] + off * (w[i + 1] - w[i])
    }

    /// Position of the global maximum (eV).
    ///
    /// Fails with the candidate list when several maxima agree to 1e-12.
    pub fn peak_position(&self) -> Result<f64> {
        let maxima = self.local_maxima();
        let top = maxima.iter().fold(f64::NEG_INFINITY, |m, (_, v)| m.max(*v));
        let best: Vec<usize> = maxima.iter().filter(|(_, v)| (top - v).abs() <= 1e-12 * top.abs()).map(|(i, _)| *i).collect();
        match best.as_slice() {
            [] => Err(Error::Diagnostic("spectrum has no interior maximum".into())),
            [i] => Ok(self.refine_peak(*i)),
            many => Err(Error::Ambiguous { candidates: many.iter().map(|&i| self.omega[i]).collect() }),
        }
    }
}

pub(crate) fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1])).sum()
}

/// Energy difference between the two tallest peaks (eV).
///
/// Two equal Lorentzians a distance `s` apart merge into one peak once the
/// half width exceeds `(√3/2) s`; past that point a diagnostic is returned.
pub fn rabi_splitting(s: &Spectrum) -> Result<f64> {
    let mut maxima = s.local_maxima();
    if maxima.len() < 2 {
        return Err(Error::Diagnostic(format!(
            "found {} resolved peak(s); the polariton doublet is not resolved (not strongly coupled at ε = {} eV)",
            maxima.len(),
            s.epsilon
        )));
    }
    maxima.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let a = s.refine_peak(maxima[0].0);
    let b = s.refine_peak(maxima[1].0);
    Ok((a - b).abs())
}

/// Location of the absorption maximum of a transition list, refined on the
/// continuous Lorentzian sum (eV).
pub fn peak_of_transitions(transitions: &[Transition], epsilon_ev: f64, omega_ev: &[f64]) -> Result<f64> {
    let s = absorption_from_transitions(transitions, epsilon_ev, omega_ev)?;
    let rough = s.peak_position()?;
    let step = omega_ev[1] - omega_ev[0];
    let value = |w: f64| -absorption_from_transitions(transitions, epsilon_ev, &[w]).map(|s| s.sigma[0]).unwrap_or(0.0);
    Ok(minimize_bracketed(value, rough - step, rough + step, 1e-9)?.0)
}

/// `∫σ_a σ_b / √(∫σ_a² ∫σ_b²)` on the grid of `a`; `b` is linearly resampled if needed.
pub fn spectral_overlap(a: &Spectrum, b: &Spectrum) -> Result<f64> {
    let bs: Vec<f64> = if a.omega == b.omega {
        b.sigma.clone()
    } else {
        a.omega.iter().map(|&w| resample(&b.omega, &b.sigma, w)).collect()
    };
    let ab: Vec<f64> = a.sigma.iter().zip(&bs).map(|(x, y)| x * y).collect();
    let aa: Vec<f64> = a.sigma.iter().map(|x| x * x).collect();
    let bb: Vec<f64> = bs.iter().map(|x| x * x).collect();
    let (nab, naa, nbb) = (trapezoid(&a.omega, &ab), trapezoid(&a.omega, &aa), trapezoid(&a.omega, &bb));
    if !(naa > 0.0 && nbb > 0.0) {
        return Err(Error::Diagnostic("similarity undefined for a zero spectrum".into()));
    }
    Ok(nab / (naa * nbb).sqrt())
}

fn resample(x: &[f64], y: &[f64], t: f64) -> f64 {
    if t < x[0] || t > x[x.len() - 1] {
        return 0.0;
    }
    let i = x.partition_point(|&v| v <= t).clamp(1, x.len() - 1);
    let f = (t - x[i - 1]) / (x[i] - x[i - 1]);
    y[i - 1] * (1.0 - f) + y[i] * f
}

/// Convenience: transition energies in eV.
pub fn transition_energies_ev(t: &[Transition]) -> Vec<f64> {
    t.iter().map(|t| au_to_ev(t.energy)).collect()
}
