//! Small optimization helpers: simplex search, bracketed 1D minimization,
//! sub-grid minimum location and linear least squares.

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::brent::BrentOpt;
use argmin::solver::neldermead::NelderMead;
use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

struct Cost<F>(F);

impl<F: Fn(&[f64]) -> f64> CostFunction for Cost<F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        Ok((self.0)(p))
    }
}

struct Cost1<F>(F);

impl<F: Fn(f64) -> f64> CostFunction for Cost1<F> {
    type Param = f64;
    type Output = f64;

    fn cost(&self, p: &f64) -> std::result::Result<f64, argmin::core::Error> {
        Ok((self.0)(*p))
    }
}

fn backend(e: argmin::core::Error) -> Error {
    Error::Diagnostic(format!("optimizer: {e}"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: u64,
    pub evaluations: usize,
    /// Whether the simplex spread fell below the tolerance.
    pub converged: bool,
}

/// Nelder-Mead from `x0` with an axis-aligned initial simplex of size `step`.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: F,
    x0: &[f64],
    step: &[f64],
    max_iter: u64,
    tol: f64,
) -> Result<SimplexResult> {
    if x0.len() != step.len() || x0.is_empty() {
        return Err(Error::param("simplex start and step must have equal, nonzero length"));
    }
    let mut simplex = vec![x0.to_vec()];
    for (i, s) in step.iter().enumerate() {
        let mut v = x0.to_vec();
        v[i] += s;
        simplex.push(v);
    }
    let calls = std::cell::Cell::new(0usize);
    let cost = Cost(|x: &[f64]| {
        calls.set(calls.get() + 1);
        f(x)
    });
    let solver = NelderMead::new(simplex).with_sd_tolerance(tol).map_err(backend)?;
    let res = Executor::new(cost, solver)
        .configure(|s| s.max_iters(max_iter))
        .run()
        .map_err(backend)?;
    let state = res.state();
    let iterations = state.get_iter();
    Ok(SimplexResult {
        x: state.get_best_param().cloned().unwrap_or_else(|| x0.to_vec()),
        value: state.get_best_cost(),
        iterations,
        evaluations: calls.get(),
        converged: iterations < max_iter,
    })
}

/// Minimize `f` on `[lo, hi]` to absolute tolerance `tol` in the argument.
pub fn minimize_bracketed<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    if !(hi > lo) {
        return Err(Error::param(format!("empty bracket [{lo}, {hi}]")));
    }
    let rel = (tol / (hi - lo).max(lo.abs().max(hi.abs()))).max(f64::EPSILON.sqrt() * 1e-2);
    let solver = BrentOpt::new(lo, hi).set_tolerance(rel, tol * 0.25);
    let res = Executor::new(Cost1(f), solver)
        .configure(|s| s.max_iters(500))
        .run()
        .map_err(backend)?;
    let state = res.state();
    let x = *state.get_best_param().ok_or_else(|| Error::Diagnostic("no minimum found".into()))?;
    Ok((x, state.get_best_cost()))
}

/// Least-squares solution of `A x ≈ b`.
pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    if a.nrows() != b.len() || a.nrows() < a.ncols() {
        return Err(Error::param(format!(
            "least squares needs rows ≥ columns; got {}x{} with {} targets",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    // Column scaling keeps mixed-degree monomials well conditioned.
    let scales: Vec<f64> = (0..a.ncols()).map(|j| a.column(j).norm().max(f64::MIN_POSITIVE)).collect();
    let scaled = DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] / scales[j]);
    let svd = scaled.svd(true, true);
    let smax = svd.singular_values.max();
    if svd.singular_values.min() <= 1e-13 * smax {
        return Err(Error::Singular("rank-deficient least-squares design".into()));
    }
    let x = svd.solve(b, 0.0).map_err(|e| Error::Singular(e.to_string()))?;
    Ok(DVector::from_fn(x.len(), |j, _| x[j] / scales[j]))
}

/// Polynomial coefficients `c_k` of `Σ c_k (x - center)^k` fitted by least squares.
pub fn polyfit(xs: &[f64], ys: &[f64], degree: usize, center: f64) -> Result<Vec<f64>> {
    let a = DMatrix::from_fn(xs.len(), degree + 1, |i, k| (xs[i] - center).powi(k as i32));
    let b = DVector::from_column_slice(ys);
    Ok(least_squares(&a, &b)?.iter().copied().collect())
}

pub fn polyval(c: &[f64], x: f64, center: f64) -> f64 {
    let t = x - center;
    c.iter().rev().fold(0.0, |acc, &ck| acc * t + ck)
}

/// Sub-grid minimum of sampled data.
///
/// A quartic through the seven samples around the discrete minimum is
/// minimized to `1e-9` of the spacing. The discrete minimum must sit at
/// least three points from either edge.
pub fn sampled_minimum(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 7 {
        return Err(Error::param("need at least 7 matching samples to locate a minimum"));
    }
    let (lo_v, hi_v) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
    if hi_v - lo_v <= 1e-14 * lo_v.abs().max(hi_v.abs()) {
        return Err(Error::Diagnostic("flat surface: no minimum to locate".into()));
    }
    let i = ys
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    if i < 3 || i + 3 >= xs.len() {
        return Err(Error::Window(format!("minimum at sample {i} of {} (x = {}) is at the edge", xs.len(), xs[i])));
    }
    let (lo, hi) = (i - 3, i + 3);
    let c = polyfit(&xs[lo..=hi], &ys[lo..=hi], 4, xs[i])?;
    if c[2] <= 0.0 {
        return Err(Error::Diagnostic(format!("flat or concave surface near x = {}", xs[i])));
    }
    let h = (xs[i + 1] - xs[i - 1]) * 0.5;
    minimize_bracketed(|x| polyval(&c, x, xs[i]), xs[i - 1], xs[i + 1], 1e-9 * h)
}

/// Value at `x` of a quartic fitted through the seven samples nearest to it.
pub fn local_interpolate(xs: &[f64], ys: &[f64], x: f64) -> Result<f64> {
    let n = xs.len();
    if n != ys.len() || n < 7 {
        return Err(Error::param("need at least 7 matching samples to interpolate"));
    }
    if x < xs[0] || x > xs[n - 1] {
        return Err(Error::Window(format!("x = {x} outside [{}, {}]", xs[0], xs[n - 1])));
    }
    let i = xs.partition_point(|&t| t < x).clamp(3, n - 4);
    let c = polyfit(&xs[i - 3..=i + 3], &ys[i - 3..=i + 3], 4, xs[i])?;
    Ok(polyval(&c, x, xs[i]))
}

/// Minimum of an on-demand function: bracket on a coarse scan of `[lo, hi]`
/// with `n` points, then refine to `tol`.
pub fn scan_minimum<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize, tol: f64) -> Result<(f64, f64)> {
    let n = n.max(5);
    let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let i = ys
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    if i == 0 || i == n - 1 {
        return Err(Error::Window(format!("minimum at the edge of [{lo}, {hi}]")));
    }
    minimize_bracketed(f, xs[i - 1], xs[i + 1], tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rosenbrock() {
        let r = nelder_mead(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            &[0.1, 0.1],
            5000,
            1e-14,
        )
        .unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] - 1.0).abs() < 1e-4, "{:?}", r.x);
        assert!(r.converged);
    }

    #[test]
    fn bracketed_quadratic() {
        let (x, _) = minimize_bracketed(|x| (x - 0.3).powi(2) + 1.0, -1.0, 2.0, 1e-9).unwrap();
        assert!((x - 0.3).abs() < 1e-8);
    }

    #[test]
    fn edge_minimum_is_window_error() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        assert!(matches!(sampled_minimum(&xs, &ys), Err(Error::Window(_))));
    }

    #[test]
    fn rank_deficiency_reported() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        let b = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert!(matches!(least_squares(&a, &b), Err(Error::Singular(_))));
    }

    #[test]
    fn interpolation_exact_for_quartics() {
        let xs: Vec<f64> = (0..30).map(|i| 0.1 * i as f64).collect();
        let f = |x: f64| 1.0 - x + 0.5 * x.powi(3) - 0.1 * x.powi(4);
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        for x in [0.0, 0.05, 1.234, 2.9] {
            assert!((local_interpolate(&xs, &ys, x).unwrap() - f(x)).abs() < 1e-11);
        }
        assert!(local_interpolate(&xs, &ys, 3.5).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn shifted_quadratic_minimum_recovered(d in -0.4f64..0.4, a in 0.5f64..50.0) {
            let xs: Vec<f64> = (0..41).map(|i| -2.0 + 0.1 * i as f64).collect();
            let ys: Vec<f64> = xs.iter().map(|x| a * (x - d).powi(2) + 0.7).collect();
            let (x, y) = sampled_minimum(&xs, &ys).unwrap();
            prop_assert!((x - d).abs() < 1e-9);
            prop_assert!((y - 0.7).abs() < 1e-10);
        }
    }
}
