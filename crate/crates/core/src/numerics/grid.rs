use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniform one-dimensional grid including both end points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    min: f64,
    max: f64,
    n_points: usize,
}

impl Grid1D {
    pub const MIN_POINTS: usize = 8;

    pub fn new(min: f64, max: f64, n_points: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(Error::param("grid bounds must be finite"));
        }
        if max <= min {
            return Err(Error::param(format!("grid max {max} must exceed min {min}")));
        }
        if n_points < Self::MIN_POINTS {
            return Err(Error::param(format!(
                "grid needs at least {} points, got {n_points}",
                Self::MIN_POINTS
            )));
        }
        Ok(Self { min, max, n_points })
    }

    /// Grid centred on `center` with the given half width.
    pub fn centered(center: f64, half_width: f64, n_points: usize) -> Result<Self> {
        Self::new(center - half_width, center + half_width, n_points)
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.n_points - 1) as f64
    }

    /// Point `i`; the last index returns `max` exactly.
    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.max
        } else {
            self.min + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.min && x <= self.max
    }

    /// Index of the grid point nearest to `x` (clamped to the grid).
    pub fn nearest_index(&self, x: f64) -> usize {
        let t = ((x - self.min) / self.spacing()).round();
        t.clamp(0.0, (self.n_points - 1) as f64) as usize
    }

    /// Sub-grid of points `lo..=hi`.
    pub fn slice(&self, lo: usize, hi: usize) -> Result<Self> {
        if hi >= self.n_points || hi < lo {
            return Err(Error::param(format!("bad slice {lo}..={hi} of {} points", self.n_points)));
        }
        Self::new(self.point(lo), self.point(hi), hi - lo + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid1D::new(0.0, 1.0, 4).is_err());
        assert!(Grid1D::new(1.0, 1.0, 20).is_err());
        assert!(Grid1D::new(f64::NAN, 1.0, 20).is_err());
    }

    #[test]
    fn slice_keeps_spacing() {
        let g = Grid1D::new(-2.0, 2.0, 41).unwrap();
        let s = g.slice(10, 30).unwrap();
        assert!((s.spacing() - g.spacing()).abs() < 1e-14);
        assert!((s.min() - g.point(10)).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn endpoints_reproduced(min in -50.0f64..50.0, width in 0.01f64..100.0, n in 8usize..5000) {
            let g = Grid1D::new(min, min + width, n).unwrap();
            let last = g.min() + (n - 1) as f64 * g.spacing();
            prop_assert!(((last - g.max()) / g.max().abs().max(1.0)).abs() < 1e-12);
            prop_assert!(g.spacing() > 0.0);
            prop_assert_eq!(g.point(n - 1), g.max());
        }
    }
}
