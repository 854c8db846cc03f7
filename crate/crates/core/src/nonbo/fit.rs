use super::NonBOModel;
use crate::cavity::CavityParams;
use crate::molecule::ElectronicStructure;
use crate::numerics::optimize::{local_interpolate, polyfit, polyval, sampled_minimum};
use crate::{Error, Result};

/// Largest relative RMS residual accepted for a harmonic fit.
pub const HARMONIC_RESIDUAL_MAX: f64 = 0.02;

/// Root of `E_g + ω_c - E_e` and the slope there, from a cubic through
/// eight samples around the first sign change.
pub fn crossing(es: &ElectronicStructure, omega_c: f64) -> Result<(f64, f64)> {
    let xs = es.grid_r.points();
    let d: Vec<f64> = (0..xs.len()).map(|i| es.surfaces[0][i] + omega_c - es.surfaces[1][i]).collect();
    let i = (0..xs.len() - 1)
        .find(|&i| d[i] == 0.0 || d[i] * d[i + 1] < 0.0)
        .ok_or_else(|| Error::Window(format!("E_g + ω_c and E_e do not cross on [{}, {}]", xs[0], xs[xs.len() - 1])))?;
    let lo = i.saturating_sub(3).min(xs.len().saturating_sub(8));
    let hi = (lo + 8).min(xs.len());
    let c = polyfit(&xs[lo..hi], &d[lo..hi], 3, xs[i])?;
    let (mut a, mut b) = (xs[i], xs[i + 1]);
    let fa = polyval(&c, a, xs[i]);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (polyval(&c, m, xs[i]) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    let r = 0.5 * (a + b);
    let t = r - xs[i];
    Ok((r, c[1] + 2.0 * c[2] * t + 3.0 * c[3] * t * t))
}

/// Model linearized at the actual crossing: slope `a0` of the detuning,
/// `h0 = g μ_eg(R_c)`.
pub fn linearized_model(es: &ElectronicStructure, mass: f64, c: &CavityParams) -> Result<NonBOModel> {
    let (r_c, a0) = crossing(es, c.omega_c)?;
    let mu = local_interpolate(&es.grid_r.points(), &es.mu_eg(), r_c)?;
    Ok(NonBOModel::linear(mass, a0, c.g * mu.abs(), r_c))
}

/// Harmonic fit of one surface: minimum, curvature and relative residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicFit {
    pub r_min: f64,
    pub e_min: f64,
    pub omega: f64,
    pub residual: f64,
}

/// Quadratic fit between the classical turning points `±1/√(Mω)` of the
/// harmonic ground state, iterated until the window matches the fitted `ω`.
pub fn harmonic_fit(xs: &[f64], ys: &[f64], mass: f64) -> Result<HarmonicFit> {
    let (r0, _) = sampled_minimum(xs, ys)?;
    let mut half = 0.1;
    let mut fit = None;
    for _ in 0..6 {
        let idx: Vec<usize> = (0..xs.len()).filter(|&i| (xs[i] - r0).abs() <= half).collect();
        if idx.len() < 5 {
            return Err(Error::Window(format!("fewer than 5 samples within {half} of the minimum")));
        }
        let (x, y): (Vec<f64>, Vec<f64>) = idx.iter().map(|&i| (xs[i], ys[i])).unzip();
        let c = polyfit(&x, &y, 2, r0)?;
        if c[2] <= 0.0 {
            return Err(Error::Diagnostic(format!("non-convex surface near {r0}")));
        }
        let omega = (2.0 * c[2] / mass).sqrt();
        let rms = (x.iter().zip(&y).map(|(&xi, &yi)| (polyval(&c, xi, r0) - yi).powi(2)).sum::<f64>() / x.len() as f64).sqrt();
        let span = y.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)) - y.iter().fold(f64::INFINITY, |m, &v| m.min(v));
        let r_min = r0 - c[1] / (2.0 * c[2]);
        fit = Some(HarmonicFit { r_min, e_min: polyval(&c, r_min, r0), omega, residual: rms / span });
        let target = 1.0 / (mass * omega).sqrt();
        if (target - half).abs() < 0.05 * half {
            break;
        }
        half = target;
    }
    fit.ok_or_else(|| Error::Diagnostic("harmonic fit failed".into()))
}

/// Shared-frequency harmonic model of the `g` and `e` surfaces.
///
/// The frequency is the ground-surface one; `h0 = g μ_eg(R_c)` at the model
/// crossing. Fails with a diagnostic when either fit leaves more than
/// [`HARMONIC_RESIDUAL_MAX`] relative residual.
pub fn harmonic_from_fixture(es: &ElectronicStructure, mass: f64, c: &CavityParams) -> Result<NonBOModel> {
    let xs = es.grid_r.points();
    let g = harmonic_fit(&xs, es.ground(), mass)?;
    let e = harmonic_fit(&xs, es.excited(), mass)?;
    for (name, f) in [("ground", g), ("excited", e)] {
        if f.residual > HARMONIC_RESIDUAL_MAX {
            return Err(Error::Diagnostic(format!(
                "{name} surface is anharmonic: relative residual {:.3} over the fit window",
                f.residual
            )));
        }
    }
    let mut m = NonBOModel::harmonic(mass, g.omega, e.r_min - g.r_min, e.e_min - g.e_min, c.omega_c, 1.0, g.r_min)?;
    let r_c = m.r_c.clamp(xs[0], xs[xs.len() - 1]);
    m.h0 = c.g * local_interpolate(&xs, &es.mu_eg(), r_c)?.abs();
    Ok(m)
}
