use serde::{Deserialize, Serialize};

use crate::numerics::Grid1D;
use crate::{Error, Result};

/// Two crossing surfaces with a linear detuning `δE = a0 (R - R_c)` and a
/// constant coupling `h0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonBOModel {
    /// Slope of `E_g + ω_c - E_e` at the crossing (a.u.).
    pub a0: f64,
    /// Coupling `g μ_eg` (a.u.).
    pub h0: f64,
    /// Crossing coordinate (bohr).
    pub r_c: f64,
    pub mass: f64,
    /// Harmonic parameters, when the model was built from them (a.u.).
    pub omega_vib: f64,
    pub delta_r: f64,
    pub delta_e: f64,
}

impl NonBOModel {
    /// Shared-frequency displaced oscillators with the ground minimum at `r_g`:
    /// `a0 = M ω² ΔR`, `R_c = r_g + ΔR/2 + (ΔE - ω_c)/a0`.
    pub fn harmonic(mass: f64, omega_vib: f64, delta_r: f64, delta_e: f64, omega_c: f64, h0: f64, r_g: f64) -> Result<Self> {
        if !(mass > 0.0 && omega_vib > 0.0) || delta_r == 0.0 {
            return Err(Error::param("harmonic model needs M > 0, ω_vib > 0 and ΔR ≠ 0"));
        }
        let a0 = mass * omega_vib * omega_vib * delta_r;
        Ok(Self {
            a0,
            h0,
            r_c: r_g + delta_r / 2.0 + (delta_e - omega_c) / a0,
            mass,
            omega_vib,
            delta_r,
            delta_e,
        })
    }

    /// Model from a crossing slope only; the harmonic fields are NaN.
    pub fn linear(mass: f64, a0: f64, h0: f64, r_c: f64) -> Self {
        Self { a0, h0, r_c, mass, omega_vib: f64::NAN, delta_r: f64::NAN, delta_e: f64::NAN }
    }

    fn check(&self) -> Result<()> {
        if !(self.h0 > 0.0) {
            return Err(Error::Singular(format!("model coupling h0 = {} must be positive", self.h0)));
        }
        Ok(())
    }

    fn denom(&self, r: f64) -> f64 {
        4.0 * self.h0 * self.h0 + self.a0 * self.a0 * (r - self.r_c).powi(2)
    }

    /// `Im ⟨-|P|+⟩`.
    pub fn p_offdiag(&self, r: f64) -> f64 {
        -self.a0 * self.h0 / self.denom(r)
    }

    /// `⟨-|P²|+⟩`.
    pub fn p2_offdiag(&self, r: f64) -> f64 {
        2.0 * self.a0.powi(3) * self.h0 * (r - self.r_c) / self.denom(r).powi(2)
    }

    /// `⟨±|P²|±⟩`.
    pub fn p2_diag(&self, r: f64) -> f64 {
        (self.a0 * self.h0).powi(2) / self.denom(r).powi(2)
    }

    /// `|⟨-|P|+⟩|` at the crossing, `a0 / (4 h0)`.
    pub fn peak_p(&self) -> f64 {
        self.a0.abs() / (4.0 * self.h0)
    }

    /// Full width at half maximum of `|⟨-|P|+⟩|` in `R`, `4 h0 / a0`.
    pub fn fwhm(&self) -> f64 {
        4.0 * self.h0 / self.a0.abs()
    }

    /// `max |⟨+|P/2M|-⟩|`; equals `ΔR ω² / (8 h0)` for the harmonic model.
    pub fn peak_p_over_2m(&self) -> f64 {
        self.peak_p() / (2.0 * self.mass)
    }

    /// Position and value of the largest `|⟨-|P²|+⟩| / (2M)` divided by the
    /// local gap `E_+ - E_-`; the value is `M ΔR² ω⁴ / (25√5 h0³)`, reached
    /// at `R_c + h0/a0`.
    pub fn p2_relative_peak(&self) -> (f64, f64) {
        let v = self.a0 * self.a0 / (25.0 * 5f64.sqrt() * self.mass * self.h0.powi(3));
        (self.r_c + self.h0 / self.a0, v)
    }

    /// `max |⟨-|P²|+⟩|`, reached at `R_c ± 2 h0 / (√3 a0)`.
    pub fn p2_offdiag_peak(&self) -> (f64, f64) {
        let x = 2.0 * self.h0 / (3f64.sqrt() * self.a0);
        (self.r_c + x, 9.0 * self.a0 * self.a0 / (64.0 * 3f64.sqrt() * self.h0 * self.h0))
    }

    /// Gap `E_+ - E_-` of the model at `r`.
    pub fn gap(&self, r: f64) -> f64 {
        self.denom(r).sqrt()
    }
}

/// Correction terms on a grid; `p_offdiag` holds `Im ⟨-|P|+⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionTerms {
    pub grid_r: Grid1D,
    pub p_offdiag: Vec<f64>,
    pub p2_offdiag: Vec<f64>,
    pub p2_diag_plus: Vec<f64>,
    pub p2_diag_minus: Vec<f64>,
}

impl CorrectionTerms {
    /// Position and value of the largest `|p_offdiag|`, refined by a parabola through the top three points.
    pub fn p_peak(&self) -> (f64, f64) {
        let y: Vec<f64> = self.p_offdiag.iter().map(|v| v.abs()).collect();
        let i = (0..y.len()).max_by(|&a, &b| y[a].total_cmp(&y[b])).unwrap_or(0);
        if i == 0 || i + 1 == y.len() {
            return (self.grid_r.point(i), y[i]);
        }
        let (a, b, c) = (y[i - 1], y[i], y[i + 1]);
        let d = a - 2.0 * b + c;
        if d >= 0.0 {
            return (self.grid_r.point(i), b);
        }
        let t = 0.5 * (a - c) / d;
        (self.grid_r.point(i) + t * self.grid_r.spacing(), b - 0.25 * (a - c) * t)
    }

    /// Full width at half maximum of `|p_offdiag|`, with linear interpolation of the crossings.
    pub fn p_fwhm(&self) -> Result<f64> {
        let y: Vec<f64> = self.p_offdiag.iter().map(|v| v.abs()).collect();
        let xs = self.grid_r.points();
        let i = (0..y.len()).max_by(|&a, &b| y[a].total_cmp(&y[b])).unwrap_or(0);
        let half = 0.5 * self.p_peak().1;
        let left = (1..=i).rev().find(|&j| y[j - 1] < half);
        let right = (i..y.len() - 1).find(|&j| y[j + 1] < half);
        match (left, right) {
            (Some(l), Some(r)) => {
                let xl = xs[l - 1] + (half - y[l - 1]) / (y[l] - y[l - 1]) * (xs[l] - xs[l - 1]);
                let xr = xs[r] + (y[r] - half) / (y[r] - y[r + 1]) * (xs[r + 1] - xs[r]);
                Ok(xr - xl)
            }
            _ => Err(Error::Window("half maximum not reached inside the grid".into())),
        }
    }

    /// Trapezoidal `∫ |p_offdiag| dR`.
    pub fn p_integral(&self) -> f64 {
        let h = self.grid_r.spacing();
        let y: Vec<f64> = self.p_offdiag.iter().map(|v| v.abs()).collect();
        h * (y.iter().sum::<f64>() - 0.5 * (y[0] + y[y.len() - 1]))
    }

    /// Relative L² distance of `p_offdiag` to another set on the same grid.
    pub fn p_relative_l2(&self, reference: &CorrectionTerms) -> Result<f64> {
        if self.grid_r != reference.grid_r {
            return Err(Error::param("correction terms live on different grids"));
        }
        let num: f64 = self.p_offdiag.iter().zip(&reference.p_offdiag).map(|(a, b)| (a - b).powi(2)).sum();
        let den: f64 = reference.p_offdiag.iter().map(|b| b * b).sum();
        Ok((num / den).sqrt())
    }

    /// CSV with columns R, P, P2 off-diagonal, P2 diagonal (+, -).
    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "# non-adiabatic terms between LP (-) and UP (+), atomic units\n\
             # P and P^2 terms carry different units and are not directly comparable\n\
             R,P_offdiag,P2_offdiag,P2_diag_plus,P2_diag_minus\n",
        );
        for i in 0..self.grid_r.len() {
            s.push_str(&format!(
                "{:.10e},{:.10e},{:.10e},{:.10e},{:.10e}\n",
                self.grid_r.point(i),
                self.p_offdiag[i],
                self.p2_offdiag[i],
                self.p2_diag_plus[i],
                self.p2_diag_minus[i]
            ));
        }
        s
    }
}

/// The closed-form terms of `m` on `grid`.
pub fn nonbo_model(m: &NonBOModel, grid: &Grid1D) -> Result<CorrectionTerms> {
    m.check()?;
    let xs = grid.points();
    Ok(CorrectionTerms {
        grid_r: *grid,
        p_offdiag: xs.iter().map(|&r| m.p_offdiag(r)).collect(),
        p2_offdiag: xs.iter().map(|&r| m.p2_offdiag(r)).collect(),
        p2_diag_plus: xs.iter().map(|&r| m.p2_diag(r)).collect(),
        p2_diag_minus: xs.iter().map(|&r| m.p2_diag(r)).collect(),
    })
}

#[cfg(test)]
impl CorrectionTerms {
    pub(crate) fn peak_scale(&self) -> f64 {
        self.p_offdiag.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub(crate) fn p2_scale(&self) -> f64 {
        self.p2_offdiag.iter().chain(&self.p2_diag_plus).fold(0.0, |m, v| m.max(v.abs()))
    }
}
