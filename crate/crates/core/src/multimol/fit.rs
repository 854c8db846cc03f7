use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::numerics::optimize::{least_squares, nelder_mead};
use crate::{Error, Result};

/// Local expansion `E₀ + α₁δ₁² + α₂δ₂² + β δ₁δ₂` around a 2D minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicFit {
    pub e0: f64,
    pub r1_0: f64,
    pub r2_0: f64,
    /// Mean of `alpha1` and `alpha2`.
    pub alpha: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
    /// RMS fit error over the window divided by the energy range sampled.
    pub residual: f64,
}

impl HarmonicFit {
    pub fn beta_over_alpha(&self) -> f64 {
        self.beta / self.alpha
    }

    /// `|α₁ - α₂| / α`; zero for identical molecules up to noise.
    pub fn alpha_asymmetry(&self) -> f64 {
        (self.alpha1 - self.alpha2).abs() / self.alpha.abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Half width of the window in each coordinate (bohr).
    pub half_width: f64,
    /// Lattice points per axis.
    pub n_points: usize,
    pub max_residual: f64,
    /// Locate the minimum first; otherwise fit around the starting point.
    pub locate: bool,
    /// Reject a Hessian that is not positive definite. Off for fitting
    /// energy differences, which need not have a minimum.
    pub require_minimum: bool,
}

impl FitOptions {
    /// Window of `±3` RMS ground-state amplitudes `1/√(2Mω)`.
    pub fn for_vibration(mass: f64, omega: f64) -> Self {
        Self { half_width: 3.0 / (2.0 * mass * omega).sqrt(), ..Self::default() }
    }
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { half_width: 0.05, n_points: 21, max_residual: 1e-3, locate: true, require_minimum: true }
    }
}

/// Monomials `δ₁^p δ₂^q` of the fit: complete to cubic, separable quartics and `δ₁²δ₂²`.
const TERMS: [(i32, i32); 13] =
    [(0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (1, 1), (3, 0), (0, 3), (2, 1), (1, 2), (4, 0), (0, 4), (2, 2)];

fn lattice_fit<F: Fn(f64, f64) -> f64>(f: &F, c1: f64, c2: f64, opts: &FitOptions) -> Result<(DVector<f64>, f64)> {
    let n = opts.n_points;
    let h = opts.half_width;
    let offsets: Vec<f64> = (0..n).map(|i| -h + 2.0 * h * i as f64 / (n - 1) as f64).collect();
    let mut rows = Vec::with_capacity(n * n);
    let mut ys = Vec::with_capacity(n * n);
    for &a in &offsets {
        for &b in &offsets {
            rows.push((a, b));
            ys.push(f(c1 + a, c2 + b));
        }
    }
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::Diagnostic("surface not finite inside the fit window".into()));
    }
    let a = DMatrix::from_fn(rows.len(), TERMS.len(), |i, k| {
        let (x, y) = rows[i];
        x.powi(TERMS[k].0) * y.powi(TERMS[k].1)
    });
    let b = DVector::from_vec(ys.clone());
    let coef = least_squares(&a, &b)?;
    let resid = &a * &coef - &b;
    let span = ys.iter().fold(f64::NEG_INFINITY, |m, &y| m.max(y)) - ys.iter().fold(f64::INFINITY, |m, &y| m.min(y));
    let rms = (resid.norm_squared() / ys.len() as f64).sqrt();
    Ok((coef, if span > 0.0 { rms / span } else { 0.0 }))
}

/// Fit the local expansion of `f` on an `n_points × n_points` lattice.
///
/// With `locate`, a simplex search from `start` finds the minimum first and
/// the lattice is re-centred once on the stationary point of the fitted
/// quadratic. A Hessian that is not positive definite is reported with its
/// signature.
pub fn fit_harmonic<F: Fn(f64, f64) -> f64>(f: F, start: (f64, f64), opts: &FitOptions) -> Result<HarmonicFit> {
    if opts.n_points < 11 || opts.half_width <= 0.0 {
        return Err(Error::param("harmonic fit needs at least 11×11 points and a positive window"));
    }
    let (mut c1, mut c2) = start;
    if opts.locate {
        let step = 0.25 * opts.half_width;
        let r = nelder_mead(|x| f(x[0], x[1]), &[c1, c2], &[step, step], 2000, 1e-15)?;
        c1 = r.x[0];
        c2 = r.x[1];
    }
    let mut passes = if opts.locate { 2 } else { 1 };
    loop {
        let (coef, residual) = lattice_fit(&f, c1, c2, opts)?;
        let (a1, a2, b) = (coef[3], coef[4], coef[5]);
        let det = 4.0 * a1 * a2 - b * b;
        if opts.require_minimum && !(a1 > 0.0 && det > 0.0) {
            let tr = 2.0 * (a1 + a2);
            let disc = ((2.0 * a1 - 2.0 * a2).powi(2) + 4.0 * b * b).sqrt();
            let (l1, l2) = (0.5 * (tr - disc), 0.5 * (tr + disc));
            let sig = |l: f64| if l > 0.0 { '+' } else if l < 0.0 { '-' } else { '0' };
            return Err(Error::Diagnostic(format!(
                "no minimum near ({c1:.6}, {c2:.6}): Hessian signature ({}, {}), eigenvalues {l1:.3e}, {l2:.3e}",
                sig(l1),
                sig(l2)
            )));
        }
        passes -= 1;
        // Stationary point of the quadratic part.
        let (g1, g2) = (coef[1], coef[2]);
        let d1 = (-2.0 * a2 * g1 + b * g2) / det;
        let d2 = (b * g1 - 2.0 * a1 * g2) / det;
        if passes == 0 || !det.is_normal() || (d1.abs() < 1e-9 && d2.abs() < 1e-9) {
            if residual > opts.max_residual {
                return Err(Error::Diagnostic(format!(
                    "harmonic fit residual {residual:.2e} exceeds {:.1e}",
                    opts.max_residual
                )));
            }
            return Ok(HarmonicFit {
                e0: coef[0],
                r1_0: c1,
                r2_0: c2,
                alpha: 0.5 * (a1 + a2),
                alpha1: a1,
                alpha2: a2,
                beta: b,
                residual,
            });
        }
        c1 += d1;
        c2 += d2;
    }
}
