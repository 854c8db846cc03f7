use std::f64::consts::PI;

use crate::cavity::CavityParams;

/// Eigen-decomposition of `[[E_g + ω_c, h], [h, E_e]]`, `h = g μ_eg`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polariton2x2 {
    pub lower: f64,
    pub upper: f64,
    /// `|+⟩ = cos θ |g1⟩ + sin θ |e0⟩` is the upper state, `|-⟩ = sin θ |g1⟩ - cos θ |e0⟩` the lower.
    pub theta: f64,
    /// `E_g + ω_c - E_e`.
    pub delta_e: f64,
    pub h: f64,
}

/// Polaritons of the single-excitation pair at one geometry; `θ = atan2(2h, δE)/2`.
pub fn polariton_2x2(e_g: f64, e_e: f64, mu_eg: f64, c: &CavityParams) -> Polariton2x2 {
    let h = c.g * mu_eg;
    let delta_e = e_g + c.omega_c - e_e;
    let avg = 0.5 * (e_g + c.omega_c + e_e);
    let half = 0.5 * (4.0 * h * h + delta_e * delta_e).sqrt();
    Polariton2x2 { lower: avg - half, upper: avg + half, theta: 0.5 * (2.0 * h).atan2(delta_e), delta_e, h }
}

/// [`polariton_2x2`] along a scan, with `2θ` unwrapped so `θ` is continuous.
pub fn polariton_2x2_scan(e_g: &[f64], e_e: &[f64], mu_eg: &[f64], c: &CavityParams) -> Vec<Polariton2x2> {
    let mut out: Vec<Polariton2x2> =
        (0..e_g.len()).map(|i| polariton_2x2(e_g[i], e_e[i], mu_eg[i], c)).collect();
    for i in 1..out.len() {
        let prev = 2.0 * out[i - 1].theta;
        let mut t = 2.0 * out[i].theta;
        while t - prev > PI {
            t -= 2.0 * PI;
        }
        while t - prev < -PI {
            t += 2.0 * PI;
        }
        out[i].theta = 0.5 * t;
    }
    out
}
