//! Boyer–Lapuerta multi-well and gradient potentials, interface delta
//! approximants and the smoothed characteristic function.

use crate::energetics::{EnergyModel, Pair, Spreading};
use crate::error::{Result, TricapError};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialParams {
    pub epsilon: f64,
    /// Weight of the sixth-order term that suppresses third-phase leakage.
    pub lambda_cap: f64,
    /// Floor constant `C` of the regularised delta, `C eps^2`.
    pub c_reg: f64,
    /// Cahn–Hilliard mobility.
    pub m_c: f64,
}

impl PotentialParams {
    pub fn new(epsilon: f64, lambda_cap: f64, c_reg: f64, m_c: f64) -> Result<Self> {
        let p = Self { epsilon, lambda_cap, c_reg, m_c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(TricapError::InvalidParameter(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.lambda_cap >= 0.0) || !(self.c_reg >= 0.0) || !(self.m_c >= 0.0) {
            return Err(TricapError::InvalidParameter(
                "lambda, regularisation constant and mobility must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[inline]
fn ordered(phi: &[f64; 3], pair: Pair) -> (f64, f64, f64) {
    let (i, j, k) = pair.phases();
    (phi[i], phi[j], phi[k])
}

/// Multi-well potential `w_ij`.
pub fn w_pair(phi: &[f64; 3], pair: Pair, lambda_cap: f64) -> f64 {
    let (a, b, c) = ordered(phi, pair);
    12.0 * (a * a * b * b + a * a * b * c + a * b * b * c - a * b * c * c) + 4.0 * lambda_cap * a * a * b * b * c * c
}

/// `d w_ij / d phi_k` for k = 1, 2, 3.
pub fn w_pair_grad(phi: &[f64; 3], pair: Pair, lambda_cap: f64) -> [f64; 3] {
    let (a, b, c) = ordered(phi, pair);
    let l8 = 8.0 * lambda_cap;
    let da = 12.0 * (2.0 * a * b * b + 2.0 * a * b * c + b * b * c - b * c * c) + l8 * a * b * b * c * c;
    let db = 12.0 * (2.0 * a * a * b + a * a * c + 2.0 * a * b * c - a * c * c) + l8 * a * a * b * c * c;
    let dc = 12.0 * (a * a * b + a * b * b - 2.0 * a * b * c) + l8 * a * a * b * b * c;
    let (i, j, k) = pair.phases();
    let mut out = [0.0; 3];
    out[i] = da;
    out[j] = db;
    out[k] = dc;
    out
}

/// Tension-weighted multi-well `sum_ij sigma_ij w_ij`.
pub fn w_total(phi: &[f64; 3], sigma: &[f64; 3], lambda_cap: f64) -> f64 {
    Pair::ALL.iter().map(|&p| sigma[p.index()] * w_pair(phi, p, lambda_cap)).sum()
}

/// Gradient potential `a_ij` from the three phase gradients.
pub fn a_pair(grad_phi: &[[f64; 2]; 3], pair: Pair) -> f64 {
    let sq = grad_phi.map(|g| g[0] * g[0] + g[1] * g[1]);
    a_pair_sq(&sq, pair)
}

/// `d a_ij / d grad phi_k` for k = 1, 2, 3.
pub fn a_pair_grad(grad_phi: &[[f64; 2]; 3], pair: Pair) -> [[f64; 2]; 3] {
    let (_, _, k) = pair.phases();
    let mut out = grad_phi.map(|g| [0.75 * g[0], 0.75 * g[1]]);
    out[k] = [-out[k][0], -out[k][1]];
    out
}

/// `a_ij` from squared gradient magnitudes.
#[inline]
pub fn a_pair_sq(grad_sq: &[f64; 3], pair: Pair) -> f64 {
    let (i, j, k) = pair.phases();
    0.375 * (grad_sq[i] + grad_sq[j] - grad_sq[k])
}

/// Interface delta approximant `eps a_ij + w_ij / eps`; not sign-definite.
pub fn delta_pair(phi: &[f64; 3], grad_phi: &[[f64; 2]; 3], pair: Pair, epsilon: f64, lambda_cap: f64) -> f64 {
    epsilon * a_pair(grad_phi, pair) + w_pair(phi, pair, lambda_cap) / epsilon
}

/// Floors `delta` at `C eps^2`. Negative excursions, which occur off the
/// two-phase manifold, are floored as well.
#[inline]
pub fn delta_regularized(delta: f64, epsilon: f64, c_reg: f64) -> f64 {
    let floor = c_reg * epsilon * epsilon;
    if delta > floor {
        delta
    } else {
        floor
    }
}

/// Smoothed characteristic function `p^2 (3 - 2p)` clamped to [0, 1].
#[inline]
pub fn xi(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else if p >= 1.0 {
        1.0
    } else {
        p * p * (3.0 - 2.0 * p)
    }
}

#[inline]
pub fn xi_prime(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        6.0 * p * (1.0 - p)
    }
}

/// `D_i w = sum_{j != i} (d_i w - d_j w) / S_j` for `w = sum sigma_ij w_ij`.
pub fn di_w_weighted(phi: &[f64; 3], sigma: &[f64; 3], s: &[f64; 3], lambda_cap: f64) -> [f64; 3] {
    let mut dw = [0.0; 3];
    for p in Pair::ALL {
        let g = w_pair_grad(phi, p, lambda_cap);
        let sig = sigma[p.index()];
        for l in 0..3 {
            dw[l] += sig * g[l];
        }
    }
    let mut out = [0.0; 3];
    for i in 0..3 {
        for j in 0..3 {
            if j != i {
                out[i] += (dw[i] - dw[j]) / s[j];
            }
        }
    }
    out
}

/// `D_i w` with the tensions and spreading coefficients evaluated at `q`.
pub fn di_w(phi: &[f64; 3], q: f64, model: &EnergyModel, params: &PotentialParams) -> Result<[f64; 3]> {
    let sigma = model.tensions(q);
    let sp = Spreading::from_tensions(sigma, model.sbar);
    sp.check()?;
    Ok(di_w_weighted(phi, &sigma, &sp.s, params.lambda_cap))
}
