use nalgebra::{DMatrix, DVector};

use super::eigen::{BasisTag, EigenSolution};
use crate::{Error, Result};

/// Real symmetric band matrix; `bands[d][i]` holds entry `(i, i + d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBanded {
    n: usize,
    bands: Vec<Vec<f64>>,
}

/// `LDLᵀ` factor of a shifted band matrix.
struct Ldlt {
    n: usize,
    b: usize,
    d: Vec<f64>,
    /// `l[i * b + (k - 1)] = L[i][i - k]`
    l: Vec<f64>,
}

impl Ldlt {
    fn negative_pivots(&self) -> usize {
        self.d.iter().filter(|&&x| x < 0.0).count()
    }

    fn lik(&self, i: usize, k: usize) -> f64 {
        self.l[i * self.b + (i - k - 1)]
    }

    fn solve_in_place(&self, x: &mut [f64]) {
        let (n, b) = (self.n, self.b);
        for i in 0..n {
            let mut s = x[i];
            for k in i.saturating_sub(b)..i {
                s -= self.lik(i, k) * x[k];
            }
            x[i] = s;
        }
        for (xi, di) in x.iter_mut().zip(&self.d) {
            *xi /= di;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..(i + b + 1).min(n) {
                s -= self.lik(j, i) * x[j];
            }
            x[i] = s;
        }
    }
}

impl SymBanded {
    /// Largest dimension handed to the dense solver when Lanczos fails.
    pub const DENSE_FALLBACK_MAX: usize = 3000;

    /// Build from the main diagonal and `b` super-diagonals.
    ///
    /// # Panics
    /// If band `d` does not have `n - d` entries.
    pub fn from_bands(bands: Vec<Vec<f64>>) -> Self {
        let n = bands[0].len();
        for (d, band) in bands.iter().enumerate() {
            assert_eq!(band.len(), n.saturating_sub(d), "band {d} has wrong length");
        }
        Self { n, bands }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bands.len() - 1
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.bands[0]
    }

    pub fn add_to_diagonal(&mut self, v: &[f64]) {
        assert_eq!(v.len(), self.n);
        for (a, b) in self.bands[0].iter_mut().zip(v) {
            *a += b;
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        self.bands.get(hi - lo).map_or(0.0, |band| band[lo])
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (d, band) in self.bands.iter().enumerate() {
            for (i, &v) in band.iter().enumerate() {
                m[(i, i + d)] = v;
                m[(i + d, i)] = v;
            }
        }
        m
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            y[i] = self.bands[0][i] * x[i];
        }
        for (d, band) in self.bands.iter().enumerate().skip(1) {
            for (i, &v) in band.iter().enumerate() {
                y[i] += v * x[i + d];
                y[i + d] += v * x[i];
            }
        }
    }

    /// Lower bound on the spectrum from Gershgorin discs.
    pub fn gershgorin_lower(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.bandwidth());
                let hi = (i + self.bandwidth()).min(self.n - 1);
                let off: f64 = (lo..=hi).filter(|&j| j != i).map(|j| self.get(i, j).abs()).sum();
                self.bands[0][i] - off
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn norm_estimate(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.bandwidth());
                let hi = (i + self.bandwidth()).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j).abs()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    fn factor(&self, shift: f64) -> Result<Ldlt> {
        let (n, b) = (self.n, self.bandwidth());
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n * b.max(1)];
        let bb = b.max(1);
        let scale = self.norm_estimate().max(f64::MIN_POSITIVE);
        for j in 0..n {
            let mut dj = self.bands[0][j] - shift;
            for k in j.saturating_sub(b)..j {
                let ljk = l[j * bb + (j - k - 1)];
                dj -= ljk * ljk * d[k];
            }
            if dj.abs() <= 1e-14 * scale {
                return Err(Error::Singular(format!("zero pivot at row {j} for shift {shift}")));
            }
            d[j] = dj;
            for i in j + 1..(j + b + 1).min(n) {
                let mut s = self.get(i, j);
                for k in i.saturating_sub(b)..j {
                    s -= l[i * bb + (i - k - 1)] * l[j * bb + (j - k - 1)] * d[k];
                }
                l[i * bb + (i - j - 1)] = s / dj;
            }
        }
        Ok(Ldlt { n, b: bb, d, l })
    }

    /// Number of eigenvalues strictly below `shift` (Sylvester inertia).
    pub fn count_below(&self, shift: f64) -> Result<usize> {
        Ok(self.factor(shift)?.negative_pivots())
    }

    /// Lowest `k` eigenpairs, by shift-invert Lanczos with an inertia check.
    ///
    /// Falls back to dense diagonalization for small problems or when the
    /// inertia count disagrees with the Lanczos result.
    pub fn lowest_eigenpairs(&self, k: usize) -> Result<EigenSolution> {
        let n = self.n;
        if k == 0 || k > n {
            return Err(Error::param(format!("requested {k} eigenpairs of a {n}-dimensional operator")));
        }
        if n <= 80 || 4 * (k + 1) > n {
            return self.dense(k);
        }
        match self.lanczos_checked(k) {
            Some(sol) => Ok(sol),
            None if n <= Self::DENSE_FALLBACK_MAX => self.dense(k),
            None => Err(Error::NotConverged {
                what: format!("shift-invert Lanczos for {k} eigenpairs of dimension {n}"),
                drift: f64::NAN,
            }),
        }
    }

    fn dense(&self, k: usize) -> Result<EigenSolution> {
        let mut s = super::solve_hermitian(&self.to_dense(), k)?;
        s.basis = BasisTag::Generic { dim: self.n };
        Ok(s)
    }

    /// Upper end of the spectrum from Gershgorin discs.
    fn gershgorin_upper(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.bandwidth());
                let hi = (i + self.bandwidth()).min(self.n - 1);
                let off: f64 = (lo..=hi).filter(|&j| j != i).map(|j| self.get(i, j).abs()).sum();
                self.bands[0][i] + off
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Bisection on the inertia count: an interval `[lo, hi]` holding
    /// eigenvalue `index` (ascending, 0-based) with `hi - lo <= rel * scale`.
    fn bracket(&self, index: usize, rel: f64) -> Option<(f64, f64)> {
        let scale = self.norm_estimate().max(1.0);
        let mut lo = self.gershgorin_lower() - 1e-6 * scale;
        let mut hi = self.gershgorin_upper() + 1e-6 * scale;
        for _ in 0..200 {
            if hi - lo <= rel * scale.min(lo.abs().max(hi.abs()).max(1e-300)) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let c = match self.count_below(mid) {
                Ok(c) => c,
                Err(_) => self.count_below(mid + 1e-12 * scale).ok()?,
            };
            if c > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some((lo, hi))
    }

    fn lanczos_checked(&self, k: usize) -> Option<EigenSolution> {
        let nev = k + 1;
        let norm = self.norm_estimate();
        let (l0, _) = self.bracket(0, 1e-6)?;
        let (_, ln) = self.bracket(nev - 1, 1e-4)?;
        let spread = (ln - l0).max(1e-10 * norm.max(1.0));
        let sigma = l0 - 0.1 * spread / nev as f64;
        let (vals, vecs) = self.lanczos(sigma, nev, 1e-14)?;

        // Every eigenvalue below the cut must be one we found.
        let gap = vals[k] - vals[k - 1];
        if gap <= 1e-9 * norm.max(1.0) {
            return None;
        }
        let tau = vals[k - 1] + 0.5 * gap;
        if self.count_below(tau).ok()? != k {
            return None;
        }
        let mut y = vec![0.0; self.n];
        let mut mat = DMatrix::zeros(self.n, k);
        let mut energies = Vec::with_capacity(k);
        for j in 0..k {
            let v = &vecs[j];
            self.matvec(v.as_slice(), &mut y);
            let lam = v.dot(&DVector::from_column_slice(&y));
            let r: f64 = y.iter().zip(v.iter()).map(|(a, b)| (a - lam * b).powi(2)).sum::<f64>().sqrt();
            if r > 1e-9 * norm.max(1.0) {
                return None;
            }
            energies.push(lam);
            mat.set_column(j, v);
        }
        Some(EigenSolution::canonical(energies, mat, BasisTag::Generic { dim: self.n }))
    }

    /// Lanczos on `(H - σ)^{-1}` with full reorthogonalization.
    /// Returns the `nev` eigenvalues of `H` nearest above `σ` with Ritz vectors.
    fn lanczos(&self, sigma: f64, nev: usize, tol: f64) -> Option<(Vec<f64>, Vec<DVector<f64>>)> {
        let n = self.n;
        let f = self.factor(sigma).ok()?;
        if f.negative_pivots() != 0 {
            return None;
        }
        let mut q: Vec<DVector<f64>> = Vec::new();
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut seed = 0x9E37_79B9_7F4A_7C15_u64;
        let mut random_vec = |q: &[DVector<f64>]| -> DVector<f64> {
            let mut v = DVector::from_fn(n, |_, _| {
                seed ^= seed << 13;
                seed ^= seed >> 7;
                seed ^= seed << 17;
                (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            });
            for _ in 0..2 {
                for u in q {
                    let c = u.dot(&v);
                    v.axpy(-c, u, 1.0);
                }
            }
            let nv = v.norm();
            v / nv
        };
        q.push(random_vec(&q));
        let m_max = n.min(40 * nev + 200);
        let check_from = (2 * nev + 10).min(n);
        loop {
            let j = q.len() - 1;
            let mut w = q[j].clone();
            f.solve_in_place(w.as_mut_slice());
            let a = q[j].dot(&w);
            alpha.push(a);
            for _ in 0..2 {
                for u in &q {
                    let c = u.dot(&w);
                    w.axpy(-c, u, 1.0);
                }
            }
            let b = w.norm();
            let m = alpha.len();
            let done_dim = m == m_max;
            if done_dim || (m >= check_from && (m - check_from) % 5 == 0) {
                let t = tridiagonal(&alpha, &beta);
                let eig = t.symmetric_eigen();
                let mut idx: Vec<usize> = (0..m).collect();
                idx.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
                let top = &idx[..nev.min(m)];
                let theta_max = eig.eigenvalues[idx[0]].abs();
                let converged = top.len() == nev
                    && top.iter().all(|&i| {
                        let theta = eig.eigenvalues[i];
                        theta > 0.0 && (b * eig.eigenvectors[(m - 1, i)]).abs() <= tol * theta_max
                    });
                if done_dim && !converged && m_max < n {
                    return None;
                }
                if converged || done_dim {
                    if top.len() < nev {
                        return None;
                    }
                    let mut vals = Vec::with_capacity(nev);
                    let mut vecs = Vec::with_capacity(nev);
                    for &i in top {
                        let theta = eig.eigenvalues[i];
                        if theta <= 0.0 {
                            return None;
                        }
                        let mut x = DVector::zeros(n);
                        for (r, u) in q.iter().enumerate() {
                            x.axpy(eig.eigenvectors[(r, i)], u, 1.0);
                        }
                        let nx = x.norm();
                        vals.push(sigma + 1.0 / theta);
                        vecs.push(x / nx);
                    }
                    return Some((vals, vecs));
                }
            }
            if b <= 1e-12 * a.abs().max(f64::MIN_POSITIVE) {
                // Invariant subspace: continue from a fresh direction.
                beta.push(0.0);
                let v = random_vec(&q);
                q.push(v);
            } else {
                beta.push(b);
                q.push(w / b);
            }
        }
    }
}

fn tridiagonal(alpha: &[f64], beta: &[f64]) -> DMatrix<f64> {
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    t
}
