//! Sharp-interface references: diffusion along two interfaces meeting at a
//! junction, Young's law for the equilibrium angles and the leading-order
//! interface profile.

use std::f64::consts::PI;

use crate::energetics::Pair;
use crate::error::{Result, TricapError};
use crate::linalg::thomas;
use crate::surfactant::DirichletSchedule;

/// Two segments `(-L, 0)` and `(0, L)` carrying `beta^-1 dq/dt = M q''`,
/// joined at `s = 0` by continuity of `q` and of the flux `M q'`.
#[derive(Clone, Debug, PartialEq)]
pub struct Junction1DConfig {
    pub half_length: f64,
    pub beta_left: f64,
    pub beta_right: f64,
    pub m_left: f64,
    pub m_right: f64,
    /// Intervals per segment.
    pub n: usize,
    pub dt: f64,
    /// Dirichlet data at `s = -L`; `None` means no flux there.
    pub schedule: Option<DirichletSchedule>,
    pub initial: f64,
}

impl Junction1DConfig {
    /// The hexagon setting: interface 1-3 on the source side, 1-2 beyond.
    pub fn hexagon() -> Self {
        Self {
            half_length: 3f64.sqrt() / 2.0,
            beta_left: 1.0,
            beta_right: 4.0,
            m_left: 100.0,
            m_right: 25.0,
            n: 2000,
            dt: 1e-6,
            schedule: Some(DirichletSchedule::ramp(0.0, 1e-4, 0.5)),
            initial: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = [self.half_length, self.beta_left, self.beta_right, self.m_left, self.m_right, self.dt];
        if pos.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(TricapError::InvalidParameter("junction parameters must be positive".into()));
        }
        if self.n < 50 {
            return Err(TricapError::InvalidParameter(format!("need n >= 50 per segment, got {}", self.n)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Junction1DSolution {
    pub s: Vec<f64>,
    pub q: Vec<f64>,
    pub time: f64,
    pub steps: usize,
    /// Largest `|M_l q'(0-) - M_r q'(0+)|` seen over all steps.
    pub max_flux_residual: f64,
}

impl Junction1DSolution {
    pub fn q_end(&self) -> f64 {
        *self.q.last().expect("non-empty solution")
    }
}

/// Quadrature weights of the conserved amount `sum w_k q_k` for which the
/// scheme is exactly conservative.
pub fn junction_mass_weights(cfg: &Junction1DConfig) -> Vec<f64> {
    let n = cfg.n;
    let h = cfg.half_length / n as f64;
    let mut w = vec![0.0; 2 * n + 1];
    for (k, wk) in w.iter_mut().enumerate() {
        let beta = if k < n { cfg.beta_left } else { cfg.beta_right };
        *wk = if k == n {
            0.0
        } else if k == n - 1 || k == n + 1 {
            1.5 * h / beta
        } else if k == 0 || k == 2 * n {
            0.5 * h / beta
        } else {
            h / beta
        };
    }
    w
}

/// Backward-Euler finite differences with the junction value as a shared
/// algebraic unknown. Both coupling conditions hold exactly in the discrete
/// system; the one-sided second-order junction row is reduced to tridiagonal
/// form by eliminating the second neighbours with their own rows.
pub fn solve_junction_1d(cfg: &Junction1DConfig, t_end: f64) -> Result<Junction1DSolution> {
    let mut q0 = vec![cfg.initial; 2 * cfg.n + 1];
    if let Some(s) = &cfg.schedule {
        q0[0] = s.eval(0.0);
    }
    solve_junction_1d_from(cfg, q0, 0.0, t_end)
}

/// Continues the junction problem from nodal values `q0` at time `t0`.
pub fn solve_junction_1d_from(cfg: &Junction1DConfig, q0: Vec<f64>, t0: f64, t_end: f64) -> Result<Junction1DSolution> {
    cfg.validate()?;
    let n = cfg.n;
    let m = 2 * n + 1;
    if q0.len() != m {
        return Err(TricapError::LengthMismatch { left: q0.len(), right: m });
    }
    let h = cfg.half_length / n as f64;
    let span = t_end - t0;
    let steps = (span / cfg.dt - 1e-9).ceil().max(0.0) as usize;
    let dt = if steps > 0 { span / steps as f64 } else { cfg.dt };
    let rl = dt * cfg.beta_left * cfg.m_left / (h * h);
    let rr = dt * cfg.beta_right * cfg.m_right / (h * h);
    let (ml, mr) = (cfg.m_left, cfg.m_right);

    let mut q = q0;
    let mut a = vec![0.0; m];
    let mut b = vec![0.0; m];
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut max_res: f64 = 0.0;
    for step in 1..=steps {
        let t = t0 + step as f64 * dt;
        for k in 0..m {
            let r = if k < n { rl } else { rr };
            a[k] = -r;
            b[k] = 1.0 + 2.0 * r;
            c[k] = -r;
            d[k] = q[k];
        }
        match &cfg.schedule {
            Some(s) => {
                a[0] = 0.0;
                b[0] = 1.0;
                c[0] = 0.0;
                d[0] = s.eval(t);
            }
            None => {
                c[0] = -2.0 * rl;
            }
        }
        a[m - 1] = -2.0 * rr;
        c[m - 1] = 0.0;
        // junction row after eliminating q[n-2] and q[n+2]
        let (an1, bn1, cn1, dn1) = (a[n - 1], b[n - 1], c[n - 1], d[n - 1]);
        let (ap1, bp1, cp1, dp1) = (a[n + 1], b[n + 1], c[n + 1], d[n + 1]);
        a[n] = -4.0 * ml - ml * bn1 / an1;
        b[n] = 3.0 * ml + 3.0 * mr - ml * cn1 / an1 - mr * ap1 / cp1;
        c[n] = -4.0 * mr - mr * bp1 / cp1;
        d[n] = -ml * dn1 / an1 - mr * dp1 / cp1;
        q = thomas(&a, &b, &c, &d)?;
        if let Some(k) = q.iter().position(|v| !v.is_finite()) {
            return Err(TricapError::NonFinite { what: "junction solve", cell: k });
        }
        let fl = ml * (3.0 * q[n] - 4.0 * q[n - 1] + q[n - 2]) / (2.0 * h);
        let fr = mr * (-3.0 * q[n] + 4.0 * q[n + 1] - q[n + 2]) / (2.0 * h);
        max_res = max_res.max((fl - fr).abs());
    }
    let s = (0..m).map(|k| -cfg.half_length + k as f64 * h).collect();
    Ok(Junction1DSolution { s, q, time: t0 + steps as f64 * dt, steps, max_flux_residual: max_res })
}

/// Equilibrium sector angles `(psi_1, psi_2, psi_3)` for tensions ordered
/// (1,2), (1,3), (2,3). Each `psi_k` is `pi` minus the angle of the tension
/// triangle between the two sides bounding phase `k`.
pub fn young_angles(sigma12: f64, sigma13: f64, sigma23: f64) -> Result<[f64; 3]> {
    let sigma = [sigma12, sigma13, sigma23];
    if sigma.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(TricapError::InvalidParameter(format!("tensions must be positive, got {sigma:?}")));
    }
    for k in 0..3 {
        let opp = sigma[Pair::opposite(k).index()];
        let sum: f64 = sigma.iter().sum::<f64>() - opp;
        if opp >= sum {
            return Err(TricapError::Spreading { phase: k + 1, value: sum - opp });
        }
    }
    let mut psi = [0.0; 3];
    for (k, out) in psi.iter_mut().enumerate() {
        let opp = sigma[Pair::opposite(k).index()];
        let others: Vec<f64> = Pair::ALL
            .iter()
            .filter(|p| {
                let (i, j, _) = p.phases();
                i == k || j == k
            })
            .map(|p| sigma[p.index()])
            .collect();
        let cos = (others[0] * others[0] + others[1] * others[1] - opp * opp) / (2.0 * others[0] * others[1]);
        *out = PI - cos.clamp(-1.0, 1.0).acos();
    }
    Ok(psi)
}

/// Leading-order interface profile `(1 + tanh(2 (z - offset) / eps)) / 2`.
pub fn tanh_profile(epsilon: f64, offset: f64) -> impl Fn(f64) -> f64 {
    move |z| 0.5 * (1.0 + (2.0 * (z - offset) / epsilon).tanh())
}
