//! Linear solvers: a cosine-transform solver for constant-coefficient Neumann
//! operators on rectangles, preconditioned conjugate gradients and a
//! tridiagonal (Thomas) solver.

use std::sync::Arc;

use rayon::prelude::*;
use rustdct::{DctPlanner, TransformType2And3};

use crate::error::{Result, TricapError};
use crate::grid::{Domain, Grid2D, Link};

/// Solves `(a + b L + c L^2) x = r` on a full rectangle where `L` is the
/// 5-point Laplacian with homogeneous Neumann conditions, diagonalised by a
/// 2D DCT-II.
pub struct NeumannSpectral {
    nx: usize,
    ny: usize,
    dct_x: Arc<dyn TransformType2And3<f64>>,
    dct_y: Arc<dyn TransformType2And3<f64>>,
    lam_x: Vec<f64>,
    lam_y: Vec<f64>,
}

impl std::fmt::Debug for NeumannSpectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NeumannSpectral").field("nx", &self.nx).field("ny", &self.ny).finish()
    }
}

/// Eigenvalues of the 1D Neumann second difference with `n` cells of size `h`.
pub fn neumann_eigenvalues(n: usize, h: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let s = (std::f64::consts::PI * k as f64 / (2.0 * n as f64)).sin();
            -4.0 * s * s / (h * h)
        })
        .collect()
}

impl NeumannSpectral {
    pub fn new(grid: &Grid2D) -> Self {
        let mut planner = DctPlanner::new();
        Self {
            nx: grid.nx,
            ny: grid.ny,
            dct_x: planner.plan_dct2(grid.nx),
            dct_y: planner.plan_dct2(grid.ny),
            lam_x: neumann_eigenvalues(grid.nx, grid.hx),
            lam_y: neumann_eigenvalues(grid.ny, grid.hy),
        }
    }

    /// Eigenvalue of the 2D Laplacian for mode `(k, l)`.
    #[inline]
    pub fn eigenvalue(&self, k: usize, l: usize) -> f64 {
        self.lam_x[k] + self.lam_y[l]
    }

    fn rows(&self, data: &mut [f64], forward: bool) {
        let dct = &self.dct_x;
        data.par_chunks_mut(self.nx).for_each_init(
            || vec![0.0; dct.get_scratch_len()],
            |scratch, row| {
                if forward {
                    dct.process_dct2_with_scratch(row, scratch)
                } else {
                    dct.process_dct3_with_scratch(row, scratch)
                }
            },
        );
    }

    fn columns(&self, data: &mut [f64], forward: bool) {
        let (nx, ny) = (self.nx, self.ny);
        let mut t = vec![0.0; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                t[i * ny + j] = data[j * nx + i];
            }
        }
        let dct = &self.dct_y;
        t.par_chunks_mut(ny).for_each_init(
            || vec![0.0; dct.get_scratch_len()],
            |scratch, col| {
                if forward {
                    dct.process_dct2_with_scratch(col, scratch)
                } else {
                    dct.process_dct3_with_scratch(col, scratch)
                }
            },
        );
        for j in 0..ny {
            for i in 0..nx {
                data[j * nx + i] = t[i * ny + j];
            }
        }
    }

    /// In-place solve of `symbol(lambda) x = r` for a caller-supplied symbol.
    /// A zero symbol (the constant mode of a singular operator) yields a
    /// zero coefficient, i.e. the mean-free solution.
    pub fn solve_symbol(&self, data: &mut [f64], symbol: impl Fn(f64) -> f64 + Sync) {
        assert_eq!(data.len(), self.nx * self.ny);
        self.rows(data, true);
        self.columns(data, true);
        // dct3(dct2(x)) = (n / 2) x along each axis
        let scale = 4.0 / (self.nx * self.ny) as f64;
        let (nx, lam_x, lam_y) = (self.nx, &self.lam_x, &self.lam_y);
        data.par_chunks_mut(nx).enumerate().for_each(|(l, row)| {
            for (k, v) in row.iter_mut().enumerate() {
                let s = symbol(lam_x[k] + lam_y[l]);
                *v = if s == 0.0 { 0.0 } else { *v * scale / s };
            }
        });
        self.rows(data, false);
        self.columns(data, false);
    }

    /// Solves `(a + b L + c L^2) x = r` in place.
    pub fn solve_poly(&self, data: &mut [f64], a: f64, b: f64, c: f64) {
        self.solve_symbol(data, |lam| a + b * lam + c * lam * lam)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CgStats {
    pub iterations: usize,
    pub residual: f64,
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Preconditioned conjugate gradients for an SPD operator. `tol` is relative
/// to the norm of the right-hand side. `x` holds the initial guess.
pub fn pcg(
    apply: impl Fn(&[f64], &mut [f64]),
    precond: impl Fn(&[f64], &mut [f64]),
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<CgStats> {
    let n = b.len();
    if x.len() != n {
        return Err(TricapError::LengthMismatch { left: x.len(), right: n });
    }
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(CgStats { iterations: 0, residual: 0.0 });
    }
    let mut r = vec![0.0; n];
    apply(x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let mut z = vec![0.0; n];
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut res = dot(&r, &r).sqrt() / bnorm;
    for it in 0..max_iter {
        if res <= tol {
            return Ok(CgStats { iterations: it, residual: res });
        }
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(TricapError::SolverDiverged { iterations: it, residual: res });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        res = dot(&r, &r).sqrt() / bnorm;
        if !res.is_finite() {
            return Err(TricapError::SolverDiverged { iterations: it, residual: res });
        }
        precond(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    if res <= tol {
        Ok(CgStats { iterations: max_iter, residual: res })
    } else {
        Err(TricapError::SolverDiverged { iterations: max_iter, residual: res })
    }
}

/// Symmetric five-point operator on the inside cells of a domain: `diag[c]`
/// plus `-coef[c][s]` couplings to the neighbour across side `s`.
#[derive(Clone, Debug)]
pub struct Stencil5 {
    pub diag: Vec<f64>,
    pub coef: Vec<[f64; 4]>,
}

impl Stencil5 {
    pub fn zeros(n: usize) -> Self {
        Self { diag: vec![0.0; n], coef: vec![[0.0; 4]; n] }
    }

    pub fn apply(&self, domain: &Domain, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().for_each(|(c, yc)| {
            if !domain.is_inside(c) {
                *yc = 0.0;
                return;
            }
            let mut acc = self.diag[c] * x[c];
            for (s, link) in domain.links(c).iter().enumerate() {
                if let Link::Cell(nb) = *link {
                    acc -= self.coef[c][s] * x[nb];
                }
            }
            *yc = acc;
        });
    }

    /// Incomplete Cholesky factor with zero fill-in, returned as the pivot
    /// diagonal for use with [`Stencil5::ic0_solve`].
    pub fn ic0(&self, domain: &Domain) -> Vec<f64> {
        let n = self.diag.len();
        let mut d = vec![0.0; n];
        for c in domain.inside_cells() {
            let mut v = self.diag[c];
            for s in [0usize, 2] {
                if let Link::Cell(nb) = domain.links(c)[s] {
                    v -= self.coef[c][s] * self.coef[c][s] / d[nb];
                }
            }
            if !(v > 0.0) {
                // modified fallback keeps the factor usable on bad pivots
                v = self.diag[c].max(f64::MIN_POSITIVE);
            }
            d[c] = v;
        }
        d
    }

    /// Applies `((D + L) D^-1 (D + L^T))^-1` for the IC(0) pivots `d`.
    pub fn ic0_solve(&self, domain: &Domain, d: &[f64], r: &[f64], z: &mut [f64]) {
        let n = d.len();
        for c in 0..n {
            if !domain.is_inside(c) {
                z[c] = 0.0;
                continue;
            }
            let mut v = r[c];
            for s in [0usize, 2] {
                if let Link::Cell(nb) = domain.links(c)[s] {
                    v += self.coef[c][s] * z[nb];
                }
            }
            z[c] = v / d[c];
        }
        for c in (0..n).rev() {
            if !domain.is_inside(c) {
                continue;
            }
            let mut v = 0.0;
            for s in [1usize, 3] {
                if let Link::Cell(nb) = domain.links(c)[s] {
                    v += self.coef[c][s] * z[nb];
                }
            }
            z[c] += v / d[c];
        }
    }

    /// Solves the system with IC(0)-preconditioned CG.
    pub fn solve(&self, domain: &Domain, b: &[f64], x: &mut [f64], tol: f64, max_iter: usize) -> Result<CgStats> {
        let d = self.ic0(domain);
        pcg(
            |v, out| self.apply(domain, v, out),
            |r, z| self.ic0_solve(domain, &d, r, z),
            b,
            x,
            tol,
            max_iter,
        )
    }
}

/// Solves a tridiagonal system with sub-diagonal `a`, diagonal `b`,
/// super-diagonal `c` (`a[0]` and `c[n-1]` ignored).
pub fn thomas(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    if a.len() != n || c.len() != n || d.len() != n {
        return Err(TricapError::LengthMismatch { left: n, right: d.len() });
    }
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    let mut m = b[0];
    if m == 0.0 {
        return Err(TricapError::InvalidParameter("zero pivot in tridiagonal solve".into()));
    }
    cp[0] = c[0] / m;
    dp[0] = d[0] / m;
    for i in 1..n {
        m = b[i] - a[i] * cp[i - 1];
        if m == 0.0 {
            return Err(TricapError::InvalidParameter("zero pivot in tridiagonal solve".into()));
        }
        cp[i] = c[i] / m;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / m;
    }
    let mut x = dp;
    for i in (0..n - 1).rev() {
        x[i] -= cp[i] * x[i + 1];
    }
    Ok(x)
}
