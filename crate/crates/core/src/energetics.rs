//! Quadratic surfactant energies expressed through the chemical potential `q`.
//!
//! Every bulk phase `i` carries `g_i(c) = beta_i c^2 / 2` and every interface
//! `ij` carries `gamma_ij(c) = sigma0 + beta_ij c^2 / 2`. Equating chemical
//! potentials gives the densities `c = q / beta`, the surface tensions
//! `sigma_ij(q) = sigma0 - q^2 / (2 beta_ij)` and the bulk grand potentials
//! `lambda_k(q) = -q^2 / (2 beta_k)`.

use crate::error::{Result, TricapError};

/// Interface between two phases. Phases are numbered 0, 1, 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pair {
    P12,
    P13,
    P23,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::P12, Pair::P13, Pair::P23];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    /// The two phases of the pair followed by the absent third phase.
    #[inline]
    pub fn phases(self) -> (usize, usize, usize) {
        match self {
            Pair::P12 => (0, 1, 2),
            Pair::P13 => (0, 2, 1),
            Pair::P23 => (1, 2, 0),
        }
    }

    pub fn from_phases(i: usize, j: usize) -> Option<Pair> {
        match (i.min(j), i.max(j)) {
            (0, 1) => Some(Pair::P12),
            (0, 2) => Some(Pair::P13),
            (1, 2) => Some(Pair::P23),
            _ => None,
        }
    }

    /// The pair not containing phase `k`.
    #[inline]
    pub fn opposite(k: usize) -> Pair {
        match k {
            0 => Pair::P23,
            1 => Pair::P13,
            _ => Pair::P12,
        }
    }
}

/// How the mean spreading coefficient is formed from `S_1, S_2, S_3`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SbarMode {
    /// `3 / (1/S_1 + 1/S_2 + 1/S_3)`
    #[default]
    Harmonic,
    /// `3/S_1 + 3/S_2 + 3/S_3`
    Literal,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyModel {
    pub sigma0: f64,
    /// Ordered as (1,2), (1,3), (2,3).
    pub beta_pair: [f64; 3],
    pub beta_bulk: [f64; 3],
    pub sbar: SbarMode,
}

impl EnergyModel {
    pub fn new(sigma0: f64, beta_pair: [f64; 3], beta_bulk: [f64; 3]) -> Result<Self> {
        let m = Self { sigma0, beta_pair, beta_bulk, sbar: SbarMode::Harmonic };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma0 > 0.0 && self.sigma0.is_finite()) {
            return Err(TricapError::InvalidParameter(format!("sigma0 must be positive, got {}", self.sigma0)));
        }
        for b in self.beta_pair.iter().chain(&self.beta_bulk) {
            if !(*b > 0.0 && b.is_finite()) {
                return Err(TricapError::InvalidParameter(format!("energy curvatures must be positive, got {b}")));
            }
        }
        Ok(())
    }

    pub fn surface_density(&self, pair: Pair, q: f64) -> f64 {
        q / self.beta_pair[pair.index()]
    }

    pub fn bulk_density(&self, phase: usize, q: f64) -> f64 {
        q / self.beta_bulk[phase]
    }

    /// Interfacial energy density `gamma_ij(c)`.
    pub fn surface_energy(&self, pair: Pair, c: f64) -> f64 {
        self.sigma0 + 0.5 * self.beta_pair[pair.index()] * c * c
    }

    /// Bulk energy density `g_i(c)`.
    pub fn bulk_energy(&self, phase: usize, c: f64) -> f64 {
        0.5 * self.beta_bulk[phase] * c * c
    }

    pub fn surface_tension(&self, pair: Pair, q: f64) -> f64 {
        self.sigma0 - q * q / (2.0 * self.beta_pair[pair.index()])
    }

    pub fn tensions(&self, q: f64) -> [f64; 3] {
        Pair::ALL.map(|p| self.surface_tension(p, q))
    }

    /// `d sigma_ij / d q`.
    pub fn surface_tension_slope(&self, pair: Pair, q: f64) -> f64 {
        -q / self.beta_pair[pair.index()]
    }

    pub fn bulk_grand_potential(&self, phase: usize, q: f64) -> f64 {
        -q * q / (2.0 * self.beta_bulk[phase])
    }

    /// `d c / d q` of the surface density.
    pub fn surface_susceptibility(&self, pair: Pair) -> f64 {
        1.0 / self.beta_pair[pair.index()]
    }

    /// `d c / d q` of the bulk density.
    pub fn bulk_susceptibility(&self, phase: usize) -> f64 {
        1.0 / self.beta_bulk[phase]
    }

    pub fn spreading_coefficients(&self, q: f64) -> Spreading {
        Spreading::from_tensions(self.tensions(q), self.sbar)
    }
}

/// Spreading coefficients `S_k = sigma_ik + sigma_jk - sigma_ij` and their mean.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spreading {
    pub s: [f64; 3],
    pub sbar: f64,
    /// Harmonic mean, which normalises the mobility projection.
    pub harmonic: f64,
    /// First phase with `S_k <= 0`, if any.
    pub spreading_phase: Option<usize>,
}

impl Spreading {
    pub fn from_tensions(sigma: [f64; 3], mode: SbarMode) -> Self {
        let [s12, s13, s23] = sigma;
        let s = [s12 + s13 - s23, s12 + s23 - s13, s13 + s23 - s12];
        let spreading_phase = s.iter().position(|&v| v <= 0.0);
        let inv: f64 = s.iter().map(|v| 1.0 / v).sum();
        let harmonic = 3.0 / inv;
        let sbar = match mode {
            SbarMode::Harmonic => harmonic,
            SbarMode::Literal => 3.0 * inv,
        };
        Self { s, sbar, harmonic, spreading_phase }
    }

    pub fn check(&self) -> Result<()> {
        match self.spreading_phase {
            Some(phase) => Err(TricapError::Spreading { phase: phase + 1, value: self.s[phase] }),
            None => Ok(()),
        }
    }
}
