use nalgebra::DVector;

use super::Grid1D;
use crate::{Error, Result};

/// Minimum `|⟨v(R_i)|v(R_{i+1})⟩|` accepted before the field is declared discontinuous.
pub const MIN_OVERLAP: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DerivativeScheme {
    /// Second-order central differences with one grid step.
    #[default]
    Central,
    /// Richardson combination of steps `h` and `2h` (fourth order in the interior).
    Richardson,
}

/// Flip signs along `R` so that neighbouring overlaps are positive.
pub fn align_signs(field: &mut [DVector<f64>], grid: &Grid1D) -> Result<()> {
    if field.len() != grid.len() {
        return Err(Error::param(format!("field has {} points, grid has {}", field.len(), grid.len())));
    }
    for i in 1..field.len() {
        let ov = field[i - 1].dot(&field[i]);
        let scale = (field[i - 1].norm() * field[i].norm()).max(f64::MIN_POSITIVE);
        if ov.abs() / scale <= MIN_OVERLAP {
            return Err(Error::Gauge { r_lo: grid.point(i - 1), r_hi: grid.point(i), overlap: ov / scale });
        }
        if ov < 0.0 {
            field[i].neg_mut();
        }
    }
    Ok(())
}

fn project_out(d: &mut DVector<f64>, v: &DVector<f64>) {
    let nn = v.norm_squared();
    if nn > 0.0 {
        let c = v.dot(d) / nn;
        d.axpy(-c, v, 1.0);
    }
}

/// `∂_R |v⟩` in the smooth real gauge.
///
/// Signs of the input are ignored: the field is aligned first and the
/// result is returned in the gauge of the input vector at each `R`.
/// The component along `|v⟩` is projected out, which is exact for a
/// normalized real field.
pub fn gauge_fixed_derivative(
    field: &[DVector<f64>],
    grid: &Grid1D,
    scheme: DerivativeScheme,
) -> Result<Vec<DVector<f64>>> {
    let mut f = field.to_vec();
    align_signs(&mut f, grid)?;
    let n = f.len();
    let h = grid.spacing();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut d = match (i, scheme) {
            (0, _) => (&f[1] * 4.0 - &f[2] - &f[0] * 3.0) / (2.0 * h),
            (i, _) if i == n - 1 => (&f[n - 3] - &f[n - 2] * 4.0 + &f[n - 1] * 3.0) / (2.0 * h),
            (i, DerivativeScheme::Richardson) if i >= 2 && i + 2 < n => {
                (&f[i - 2] - &f[i - 1] * 8.0 + &f[i + 1] * 8.0 - &f[i + 2]) / (12.0 * h)
            }
            _ => (&f[i + 1] - &f[i - 1]) / (2.0 * h),
        };
        project_out(&mut d, &f[i]);
        // Return in the caller's gauge.
        if f[i].dot(&field[i]) < 0.0 {
            d.neg_mut();
        }
        out.push(d);
    }
    Ok(out)
}

/// `∂²_R |v⟩` in the smooth gauge by the three-point stencil (one-sided at the ends).
pub fn gauge_fixed_second_derivative(field: &[DVector<f64>], grid: &Grid1D) -> Result<Vec<DVector<f64>>> {
    let mut f = field.to_vec();
    align_signs(&mut f, grid)?;
    let n = f.len();
    let h2 = grid.spacing().powi(2);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let c = i.clamp(1, n - 2);
        let mut d = (&f[c - 1] - &f[c] * 2.0 + &f[c + 1]) / h2;
        if f[i].dot(&field[i]) < 0.0 {
            d.neg_mut();
        }
        out.push(d);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rotating(grid: &Grid1D, theta: impl Fn(f64) -> f64) -> Vec<DVector<f64>> {
        grid.points().iter().map(|&r| DVector::from_vec(vec![theta(r).cos(), theta(r).sin()])).collect()
    }

    #[test]
    fn constant_field_has_zero_derivative() {
        let g = Grid1D::new(0.0, 1.0, 20).unwrap();
        let f = vec![DVector::from_vec(vec![0.6, 0.8, 0.0]); 20];
        for d in gauge_fixed_derivative(&f, &g, DerivativeScheme::Central).unwrap() {
            assert!(d.norm() < 1e-14);
        }
    }

    #[test]
    fn rotation_generator() {
        let g = Grid1D::new(-2.0, 2.0, 801).unwrap();
        let theta = |r: f64| 0.5 * (3.0 * r).atan();
        let dtheta = |r: f64| 1.5 / (1.0 + 9.0 * r * r);
        let f = rotating(&g, theta);
        for scheme in [DerivativeScheme::Central, DerivativeScheme::Richardson] {
            let d = gauge_fixed_derivative(&f, &g, scheme).unwrap();
            for i in 2..g.len() - 2 {
                let r = g.point(i);
                let exact = DVector::from_vec(vec![-theta(r).sin(), theta(r).cos()]) * dtheta(r);
                assert!((&d[i] - exact).norm() < 1e-4 * 1.5, "{scheme:?} at {r}");
                if scheme == DerivativeScheme::Richardson {
                    let exact = DVector::from_vec(vec![-theta(r).sin(), theta(r).cos()]) * dtheta(r);
                    assert!((&d[i] - exact).norm() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn detects_lost_identity() {
        let g = Grid1D::new(0.0, 1.0, 10).unwrap();
        let mut f = vec![DVector::from_vec(vec![1.0, 0.0]); 10];
        f[5] = DVector::from_vec(vec![0.0, 1.0]);
        match align_signs(&mut f, &g) {
            Err(Error::Gauge { r_lo, .. }) => assert!((r_lo - g.point(4)).abs() < 1e-12),
            other => panic!("expected gauge error, got {other:?}"),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn sign_flips_do_not_matter(mask in proptest::collection::vec(any::<bool>(), 40)) {
            let g = Grid1D::new(0.0, 2.0, 40).unwrap();
            let f = rotating(&g, |r| 0.3 * r * r);
            let mut flipped = f.clone();
            for (v, &m) in flipped.iter_mut().zip(&mask) {
                if m { v.neg_mut(); }
            }
            let a = gauge_fixed_derivative(&f, &g, DerivativeScheme::Central).unwrap();
            let b = gauge_fixed_derivative(&flipped, &g, DerivativeScheme::Central).unwrap();
            for ((x, y), &m) in a.iter().zip(&b).zip(&mask) {
                let y = if m { -y } else { y.clone() };
                prop_assert!((x - y).norm() < 1e-12);
            }
            for (d, v) in a.iter().zip(&f) {
                prop_assert!(d.dot(v).abs() < 1e-8);
            }
        }
    }
}
