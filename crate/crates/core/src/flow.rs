//! Incompressible Navier–Stokes on a staggered (MAC) grid with Chorin
//! projection and phase-field capillary/Marangoni forcing.
//!
//! Velocities live on faces (`x` holds the horizontal component on vertical
//! faces, `y` the vertical component on horizontal faces); pressure lives in
//! cells. Only rectangular domains are supported.

use crate::energetics::{EnergyModel, Pair};
use crate::error::{Result, TricapError};
use crate::grid::{gradient, Domain, FaceField, ScalarField};
use crate::linalg::{pcg, NeumannSpectral};
use crate::potentials::{delta_pair, xi, PotentialParams};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluidParams {
    pub rho: [f64; 3],
    pub eta: [f64; 3],
}

impl FluidParams {
    pub fn matched(rho: f64, eta: f64) -> Self {
        Self { rho: [rho; 3], eta: [eta; 3] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rho.iter().chain(&self.eta).any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(TricapError::InvalidParameter("densities and viscosities must be positive".into()));
        }
        Ok(())
    }

    pub fn is_matched(&self) -> bool {
        self.rho.iter().all(|&r| r == self.rho[0]) && self.eta.iter().all(|&e| e == self.eta[0])
    }

    fn blend(v: [f64; 3], phi: [f64; 3]) -> f64 {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (v[0] * phi[0] + v[1] * phi[1] + v[2] * phi[2]).clamp(lo, hi)
    }

    /// Linear interpolation clipped to the range of the phase values.
    pub fn density(&self, phi: [f64; 3]) -> f64 {
        Self::blend(self.rho, phi)
    }

    pub fn viscosity(&self, phi: [f64; 3]) -> f64 {
        Self::blend(self.eta, phi)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub vel: FaceField,
    pub p: ScalarField,
    pub time: f64,
}

impl FlowState {
    pub fn at_rest(domain: &Domain) -> Self {
        Self { vel: FaceField::zeros(&domain.grid), p: domain.zeros(), time: 0.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowConfig {
    pub lin_tol: f64,
    pub max_lin_iter: usize,
    /// Advective limit `dt <= cfl h / max |v|`.
    pub cfl: f64,
    /// Capillary limit `dt <= c sqrt(rho eps^3 / sigma0)`.
    pub capillary_c: f64,
    /// Tangential wall velocities on the south, east, north and west walls.
    pub wall_velocity: [f64; 4],
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self { lin_tol: 1e-12, max_lin_iter: 2000, cfl: 0.25, capillary_c: 1.0, wall_velocity: [0.0; 4] }
    }
}

/// Per-cell density and viscosity.
struct Material {
    rho: Vec<f64>,
    eta: Vec<f64>,
}

#[derive(Debug)]
pub struct FlowSolver {
    pub domain: Domain,
    pub fluid: FluidParams,
    pub cfg: FlowConfig,
    spectral: NeumannSpectral,
}

impl FlowSolver {
    pub fn new(domain: Domain, fluid: FluidParams, cfg: FlowConfig) -> Result<Self> {
        if !domain.is_full() {
            return Err(TricapError::InvalidParameter("the flow solver needs a rectangular domain".into()));
        }
        fluid.validate()?;
        let spectral = NeumannSpectral::new(&domain.grid);
        Ok(Self { domain, fluid, cfg, spectral })
    }

    fn material(&self, phi: Option<&[ScalarField; 3]>) -> Material {
        let n = self.domain.grid.len();
        match phi {
            Some(p) if !self.fluid.is_matched() => {
                let at = |c: usize| [p[0].values[c], p[1].values[c], p[2].values[c]];
                Material {
                    rho: (0..n).map(|c| self.fluid.density(at(c))).collect(),
                    eta: (0..n).map(|c| self.fluid.viscosity(at(c))).collect(),
                }
            }
            _ => Material { rho: vec![self.fluid.rho[0]; n], eta: vec![self.fluid.eta[0]; n] },
        }
    }

    /// Discrete divergence per cell.
    pub fn divergence(&self, vel: &FaceField) -> Vec<f64> {
        let g = self.domain.grid;
        let mut out = vec![0.0; g.len()];
        for j in 0..g.ny {
            for i in 0..g.nx {
                out[g.idx(i, j)] = (vel.x[FaceField::xi(&g, i + 1, j)] - vel.x[FaceField::xi(&g, i, j)]) / g.hx
                    + (vel.y[FaceField::yi(&g, i, j + 1)] - vel.y[FaceField::yi(&g, i, j)]) / g.hy;
            }
        }
        out
    }

    pub fn max_divergence(&self, vel: &FaceField) -> f64 {
        self.divergence(vel).iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest stable step from the advective, viscous and (with `epsilon`
    /// and `sigma0`) capillary restrictions.
    pub fn stable_dt(&self, state: &FlowState, capillary: Option<(f64, f64)>) -> f64 {
        let g = self.domain.grid;
        let h = g.hx.min(g.hy);
        let vmax = state.vel.x.iter().chain(&state.vel.y).fold(0.0f64, |m, v| m.max(v.abs()));
        let mut dt = f64::INFINITY;
        if vmax > 0.0 {
            dt = dt.min(self.cfg.cfl * h / vmax);
        }
        let rho_min = self.fluid.rho.iter().cloned().fold(f64::INFINITY, f64::min);
        let eta_max = self.fluid.eta.iter().cloned().fold(0.0, f64::max);
        dt = dt.min(0.2 * rho_min * h * h / eta_max);
        if let Some((eps, sigma0)) = capillary {
            dt = dt.min(self.cfg.capillary_c * (rho_min * eps.powi(3) / sigma0).sqrt());
        }
        dt
    }

    /// One projection step. `force` is a face force density (normal
    /// components on boundary faces are ignored); `mass_flux` is the
    /// relative phase mass flux `sum_k rho_k J_k`, which only matters for
    /// unmatched densities.
    pub fn step(
        &self,
        state: &FlowState,
        phi: Option<&[ScalarField; 3]>,
        force: Option<&FaceField>,
        mass_flux: Option<&FaceField>,
        dt: f64,
    ) -> Result<FlowState> {
        if !(dt > 0.0) {
            return Err(TricapError::InvalidParameter(format!("time step must be positive, got {dt}")));
        }
        let g = self.domain.grid;
        let mat = self.material(phi);
        let (hx, hy) = (g.hx, g.hy);
        let (nx, ny) = (g.nx, g.ny);
        let [ws, we, wn, ww] = self.cfg.wall_velocity;
        let u = &state.vel.x;
        let v = &state.vel.y;
        let xi = |i: usize, j: usize| FaceField::xi(&g, i, j);
        let yi = |i: usize, j: usize| FaceField::yi(&g, i, j);
        let cell = |i: usize, j: usize| g.idx(i, j);
        // u at (i, j) with ghost rows for the south/north walls
        let u_at = |i: usize, j: isize| -> f64 {
            if j < 0 {
                2.0 * ws - u[xi(i, 0)]
            } else if j as usize >= ny {
                2.0 * wn - u[xi(i, ny - 1)]
            } else {
                u[xi(i, j as usize)]
            }
        };
        let v_at = |i: isize, j: usize| -> f64 {
            if i < 0 {
                2.0 * ww - v[yi(0, j)]
            } else if i as usize >= nx {
                2.0 * we - v[yi(nx - 1, j)]
            } else {
                v[yi(i as usize, j)]
            }
        };
        // viscosity at grid node (i, j), averaged over the adjacent cells
        let eta_node = |i: usize, j: usize| -> f64 {
            let mut s = 0.0;
            let mut n = 0.0;
            for (ci, cj) in [(i.wrapping_sub(1), j.wrapping_sub(1)), (i, j.wrapping_sub(1)), (i.wrapping_sub(1), j), (i, j)] {
                if ci < nx && cj < ny {
                    s += mat.eta[cell(ci, cj)];
                    n += 1.0;
                }
            }
            s / n
        };
        // shear stress at node (i, j)
        let tau = |i: usize, j: usize| -> f64 {
            let dudy = (u_at(i, j as isize) - u_at(i, j as isize - 1)) / hy;
            let dvdx = (v_at(i as isize, j) - v_at(i as isize - 1, j)) / hx;
            eta_node(i, j) * (dudy + dvdx)
        };
        let mut star = state.vel.clone();
        for j in 0..ny {
            for i in 1..nx {
                let k = xi(i, j);
                let (l, r) = (cell(i - 1, j), cell(i, j));
                let rho = 0.5 * (mat.rho[l] + mat.rho[r]);
                let vbar = 0.25 * (v[yi(i - 1, j)] + v[yi(i, j)] + v[yi(i - 1, j + 1)] + v[yi(i, j + 1)]);
                let dudx = (u[xi(i + 1, j)] - u[xi(i - 1, j)]) / (2.0 * hx);
                let dudy = (u_at(i, j as isize + 1) - u_at(i, j as isize - 1)) / (2.0 * hy);
                let mut adv = u[k] * dudx + vbar * dudy;
                if let Some(jf) = mass_flux {
                    let jx = jf.x[k];
                    let jy = 0.25 * (jf.y[yi(i - 1, j)] + jf.y[yi(i, j)] + jf.y[yi(i - 1, j + 1)] + jf.y[yi(i, j + 1)]);
                    adv += (jx * dudx + jy * dudy) / rho;
                }
                let sxx_r = 2.0 * mat.eta[r] * (u[xi(i + 1, j)] - u[k]) / hx;
                let sxx_l = 2.0 * mat.eta[l] * (u[k] - u[xi(i - 1, j)]) / hx;
                let visc = (sxx_r - sxx_l) / hx + (tau(i, j + 1) - tau(i, j)) / hy;
                let f = force.map_or(0.0, |f| f.x[k]);
                star.x[k] = u[k] + dt * (-adv + (visc + f) / rho);
            }
        }
        for j in 1..ny {
            for i in 0..nx {
                let k = yi(i, j);
                let (b, t) = (cell(i, j - 1), cell(i, j));
                let rho = 0.5 * (mat.rho[b] + mat.rho[t]);
                let ubar = 0.25 * (u[xi(i, j - 1)] + u[xi(i + 1, j - 1)] + u[xi(i, j)] + u[xi(i + 1, j)]);
                let dvdx = (v_at(i as isize + 1, j) - v_at(i as isize - 1, j)) / (2.0 * hx);
                let dvdy = (v[yi(i, j + 1)] - v[yi(i, j - 1)]) / (2.0 * hy);
                let mut adv = ubar * dvdx + v[k] * dvdy;
                if let Some(jf) = mass_flux {
                    let jy = jf.y[k];
                    let jx = 0.25 * (jf.x[xi(i, j - 1)] + jf.x[xi(i + 1, j - 1)] + jf.x[xi(i, j)] + jf.x[xi(i + 1, j)]);
                    adv += (jx * dvdx + jy * dvdy) / rho;
                }
                let syy_t = 2.0 * mat.eta[t] * (v[yi(i, j + 1)] - v[k]) / hy;
                let syy_b = 2.0 * mat.eta[b] * (v[k] - v[yi(i, j - 1)]) / hy;
                let visc = (syy_t - syy_b) / hy + (tau(i + 1, j) - tau(i, j)) / hx;
                let f = force.map_or(0.0, |f| f.y[k]);
                star.y[k] = v[k] + dt * (-adv + (visc + f) / rho);
            }
        }
        for j in 0..ny {
            star.x[xi(0, j)] = 0.0;
            star.x[xi(nx, j)] = 0.0;
        }
        for i in 0..nx {
            star.y[yi(i, 0)] = 0.0;
            star.y[yi(i, ny)] = 0.0;
        }
        let p = self.project(&mut star, &mat, dt)?;
        let mut out = FlowState { vel: star, p: ScalarField { grid: g, values: p }, time: state.time + dt };
        for v in out.vel.x.iter().chain(&out.vel.y) {
            if !v.is_finite() {
                return Err(TricapError::NonFinite { what: "velocity", cell: 0 });
            }
        }
        out.time = state.time + dt;
        Ok(out)
    }

    /// Makes `vel` discretely divergence-free and returns the pressure.
    fn project(&self, vel: &mut FaceField, mat: &Material, dt: f64) -> Result<Vec<f64>> {
        let g = self.domain.grid;
        let div = self.divergence(vel);
        let n = g.len();
        let (nx, ny) = (g.nx, g.ny);
        let inv_rho_x: Vec<f64> = (0..g.n_xfaces())
            .map(|k| {
                let (i, j) = (k % (nx + 1), k / (nx + 1));
                if i == 0 || i == nx {
                    0.0
                } else {
                    2.0 / (mat.rho[g.idx(i - 1, j)] + mat.rho[g.idx(i, j)])
                }
            })
            .collect();
        let inv_rho_y: Vec<f64> = (0..g.n_yfaces())
            .map(|k| {
                let (i, j) = (k % nx, k / nx);
                if j == 0 || j == ny {
                    0.0
                } else {
                    2.0 / (mat.rho[g.idx(i, j - 1)] + mat.rho[g.idx(i, j)])
                }
            })
            .collect();
        let mut p: Vec<f64> = div.iter().map(|d| d / dt).collect();
        let mean = p.iter().sum::<f64>() / n as f64;
        p.iter_mut().for_each(|v| *v -= mean);
        if self.fluid.is_matched() {
            let rho = self.fluid.rho[0];
            p.iter_mut().for_each(|v| *v *= rho);
            self.spectral.solve_poly(&mut p, 0.0, 1.0, 0.0);
        } else {
            let apply = |x: &[f64], y: &mut [f64]| {
                for j in 0..ny {
                    for i in 0..nx {
                        let c = g.idx(i, j);
                        let mut acc = 0.0;
                        let fx = |ii: usize| inv_rho_x[FaceField::xi(&g, ii, j)];
                        let fy = |jj: usize| inv_rho_y[FaceField::yi(&g, i, jj)];
                        if i + 1 < nx {
                            acc += fx(i + 1) * (x[c + 1] - x[c]) / (g.hx * g.hx);
                        }
                        if i > 0 {
                            acc -= fx(i) * (x[c] - x[c - 1]) / (g.hx * g.hx);
                        }
                        if j + 1 < ny {
                            acc += fy(j + 1) * (x[c + nx] - x[c]) / (g.hy * g.hy);
                        }
                        if j > 0 {
                            acc -= fy(j) * (x[c] - x[c - nx]) / (g.hy * g.hy);
                        }
                        // sign flip for a positive semidefinite operator
                        y[c] = -acc;
                    }
                }
            };
            let mean_inv = mat.rho.iter().map(|r| 1.0 / r).sum::<f64>() / n as f64;
            let b: Vec<f64> = p.iter().map(|v| -v).collect();
            let mut x = vec![0.0; n];
            pcg(
                apply,
                |r, z| {
                    let m = r.iter().sum::<f64>() / n as f64;
                    for (zi, ri) in z.iter_mut().zip(r) {
                        *zi = -(ri - m) / mean_inv;
                    }
                    self.spectral.solve_poly(z, 0.0, 1.0, 0.0);
                },
                &b,
                &mut x,
                self.cfg.lin_tol,
                self.cfg.max_lin_iter,
            )?;
            p = x;
        }
        for j in 0..ny {
            for i in 1..nx {
                let k = FaceField::xi(&g, i, j);
                vel.x[k] -= dt * inv_rho_x[k] * (p[g.idx(i, j)] - p[g.idx(i - 1, j)]) / g.hx;
            }
        }
        for j in 1..ny {
            for i in 0..nx {
                let k = FaceField::yi(&g, i, j);
                vel.y[k] -= dt * inv_rho_y[k] * (p[g.idx(i, j)] - p[g.idx(i, j - 1)]) / g.hy;
            }
        }
        Ok(p)
    }

    pub fn kinetic_energy(&self, state: &FlowState, phi: Option<&[ScalarField; 3]>) -> f64 {
        kinetic_energy(&self.domain, state, phi, &self.fluid)
    }
}

/// Face force `sum_k mu_k grad phi_k + sum_ij delta_ij grad sigma_ij -
/// sum_k lambda_k grad xi_k` with gradients taken across each face and the
/// multipliers averaged from the adjacent cells. A constant `mu` therefore
/// yields an exact discrete gradient. Boundary faces carry no force.
pub fn capillary_force(
    domain: &Domain,
    phi: &[ScalarField; 3],
    mu: &[ScalarField; 3],
    q: Option<&ScalarField>,
    model: &EnergyModel,
    params: &PotentialParams,
) -> Result<FaceField> {
    let g = domain.grid;
    let mut out = FaceField::zeros(&g);
    let qv = |c: usize| q.map_or(0.0, |f| f.values[c]);
    // with uniform q the surfactant terms vanish
    let varying_q = q.map_or(false, |f| {
        let mut it = domain.inside_cells().map(|c| f.values[c]);
        let first = it.next().unwrap_or(0.0);
        it.any(|v| v != first)
    });
    let deltas = if varying_q {
        let grads = [gradient(domain, &phi[0])?, gradient(domain, &phi[1])?, gradient(domain, &phi[2])?];
        let mut d = [vec![0.0; g.len()], vec![0.0; g.len()], vec![0.0; g.len()]];
        for c in domain.inside_cells() {
            let p = [phi[0].values[c], phi[1].values[c], phi[2].values[c]];
            let gp = [0, 1, 2].map(|k| [grads[k].0.values[c], grads[k].1.values[c]]);
            for pair in Pair::ALL {
                d[pair.index()][c] = delta_pair(&p, &gp, pair, params.epsilon, params.lambda_cap);
            }
        }
        Some(d)
    } else {
        None
    };
    for c in domain.inside_cells() {
        let (i, j) = g.ij(c);
        for side in [1usize, 3] {
            let nb = match domain.links(c)[side] {
                crate::grid::Link::Cell(nb) => nb,
                crate::grid::Link::Boundary(_) => continue,
            };
            let h = domain.spacing(side);
            let mut f = 0.0;
            for k in 0..3 {
                f += 0.5 * (mu[k].values[c] + mu[k].values[nb]) * (phi[k].values[nb] - phi[k].values[c]) / h;
            }
            if let Some(d) = &deltas {
                let (qa, qb) = (qv(c), qv(nb));
                for pair in Pair::ALL {
                    let dd = 0.5 * (d[pair.index()][c] + d[pair.index()][nb]);
                    f += dd * (model.surface_tension(pair, qb) - model.surface_tension(pair, qa)) / h;
                }
                for k in 0..3 {
                    let lam = 0.5 * (model.bulk_grand_potential(k, qa) + model.bulk_grand_potential(k, qb));
                    f -= lam * (xi(phi[k].values[nb]) - xi(phi[k].values[c])) / h;
                }
            }
            let (is_x, k) = FaceField::face_of(&g, i, j, side);
            if is_x {
                out.x[k] = f;
            } else {
                out.y[k] = f;
            }
        }
    }
    Ok(out)
}

/// Cell-centred velocity obtained by averaging opposite faces.
pub fn cell_velocity(domain: &Domain, vel: &FaceField) -> (Vec<f64>, Vec<f64>) {
    let g = domain.grid;
    let mut u = vec![0.0; g.len()];
    let mut v = vec![0.0; g.len()];
    for j in 0..g.ny {
        for i in 0..g.nx {
            let c = g.idx(i, j);
            u[c] = 0.5 * (vel.x[FaceField::xi(&g, i, j)] + vel.x[FaceField::xi(&g, i + 1, j)]);
            v[c] = 0.5 * (vel.y[FaceField::yi(&g, i, j)] + vel.y[FaceField::yi(&g, i, j + 1)]);
        }
    }
    (u, v)
}

/// `integral of rho(phi) |v|^2 / 2` from cell-averaged velocities.
pub fn kinetic_energy(domain: &Domain, state: &FlowState, phi: Option<&[ScalarField; 3]>, fluid: &FluidParams) -> f64 {
    let (u, v) = cell_velocity(domain, &state.vel);
    let area = domain.grid.cell_area();
    domain
        .inside_cells()
        .map(|c| {
            let rho = phi.map_or(fluid.rho[0], |p| fluid.density([p[0].values[c], p[1].values[c], p[2].values[c]]));
            0.5 * rho * (u[c] * u[c] + v[c] * v[c]) * area
        })
        .sum()
}

/// `L2` norm of the cell-averaged velocity.
pub fn velocity_l2(domain: &Domain, vel: &FaceField) -> f64 {
    let (u, v) = cell_velocity(domain, vel);
    let area = domain.grid.cell_area();
    domain.inside_cells().map(|c| (u[c] * u[c] + v[c] * v[c]) * area).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2D;
    use crate::sharp::tanh_profile;

    fn unit(n: usize) -> Domain {
        Domain::rectangle(Grid2D::new(n, n, 1.0 / n as f64, 1.0 / n as f64, [0.0, 0.0]).unwrap())
    }

    #[test]
    fn rest_state_without_forcing_stays_at_rest() {
        let d = unit(16);
        let s = FlowSolver::new(d.clone(), FluidParams::matched(0.1, 0.01), FlowConfig::default()).unwrap();
        let mut st = FlowState::at_rest(&d);
        for _ in 0..10 {
            st = s.step(&st, None, None, None, 1e-3).unwrap();
        }
        assert!(st.vel.x.iter().chain(&st.vel.y).all(|v| *v == 0.0));
    }

    #[test]
    fn masked_domains_are_rejected() {
        let g = Grid2D::new(16, 16, 0.1, 0.1, [0.0, 0.0]).unwrap();
        let d = Domain::polygon(g, vec![[0.1, 0.1], [1.5, 0.1], [0.8, 1.5]]).unwrap();
        assert!(FlowSolver::new(d, FluidParams::matched(1.0, 1.0), FlowConfig::default()).is_err());
    }

    #[test]
    fn kinetic_energy_examples() {
        let d = unit(10);
        let fluid = FluidParams::matched(0.1, 0.01);
        let mut st = FlowState::at_rest(&d);
        assert_eq!(kinetic_energy(&d, &st, None, &fluid), 0.0);
        st.vel.x.iter_mut().for_each(|v| *v = 1.0);
        let e = kinetic_energy(&d, &st, None, &fluid);
        assert!((e - 0.05).abs() < 1e-14);
        st.vel.x.iter_mut().for_each(|v| *v = 2.0);
        assert!((kinetic_energy(&d, &st, None, &fluid) - 4.0 * e).abs() < 1e-14);
    }

    fn cavity(n: usize, fluid: FluidParams, t_end: f64) -> (FlowSolver, FlowState, f64) {
        let d = unit(n);
        let cfg = FlowConfig { wall_velocity: [0.0, 0.0, 1.0, 0.0], ..FlowConfig::default() };
        let s = FlowSolver::new(d.clone(), fluid, cfg).unwrap();
        let mut st = FlowState::at_rest(&d);
        let mut max_div: f64 = 0.0;
        while st.time < t_end {
            let dt = s.stable_dt(&st, None).min(0.25 / n as f64);
            st = s.step(&st, None, None, None, dt).unwrap();
            max_div = max_div.max(s.max_divergence(&st.vel));
        }
        (s, st, max_div)
    }

    #[test]
    fn lid_driven_cavity_reaches_steady_state() {
        let (s, st, max_div) = cavity(32, FluidParams::matched(1.0, 0.1), 2.0);
        assert!(max_div < 1e-8, "{max_div}");
        let dt = s.stable_dt(&st, None);
        let next = s.step(&st, None, None, None, dt).unwrap();
        let change = next.vel.x.iter().zip(&st.vel.x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / dt;
        assert!(change < 1e-3, "{change}");
        // recirculation: flow opposes the lid below the vortex centre
        let g = s.domain.grid;
        let umin = (0..g.ny).map(|j| st.vel.x[FaceField::xi(&g, g.nx / 2, j)]).fold(f64::INFINITY, f64::min);
        assert!(umin < -0.15 && umin > -0.25, "{umin}");
    }

    #[test]
    fn unmatched_densities_project_to_divergence_free() {
        let d = unit(24);
        let fluid = FluidParams { rho: [1.0, 3.0, 2.0], eta: [0.1, 0.2, 0.1] };
        let s = FlowSolver::new(d.clone(), fluid, FlowConfig { wall_velocity: [0.0, 0.0, 1.0, 0.0], ..FlowConfig::default() }).unwrap();
        let prof = tanh_profile(0.1, 0.5);
        let p1 = d.field_from_fn(|x, _| prof(x));
        let p2 = d.field_from_fn(|x, _| 1.0 - prof(x));
        let phi = [p1, p2, d.zeros()];
        let mut st = FlowState::at_rest(&d);
        for _ in 0..20 {
            st = s.step(&st, Some(&phi), None, None, 2e-3).unwrap();
            assert!(s.max_divergence(&st.vel) < 1e-8);
        }
    }

    #[test]
    fn viscous_decay_without_forcing() {
        let d = unit(24);
        let s = FlowSolver::new(d.clone(), FluidParams::matched(1.0, 0.05), FlowConfig::default()).unwrap();
        let mut st = FlowState::at_rest(&d);
        let g = d.grid;
        for j in 0..g.ny {
            for i in 1..g.nx {
                let y = (j as f64 + 0.5) * g.hy;
                st.vel.x[FaceField::xi(&g, i, j)] = (std::f64::consts::PI * y).sin();
            }
        }
        st = s.step(&st, None, None, None, 1e-3).unwrap();
        let mut e = s.kinetic_energy(&st, None);
        for _ in 0..50 {
            st = s.step(&st, None, None, None, 1e-3).unwrap();
            let en = s.kinetic_energy(&st, None);
            assert!(en <= e * (1.0 + 1e-12));
            e = en;
        }
    }

    fn flat_interface(n: usize, eps: f64, q_of_x: impl Fn(f64) -> f64) -> f64 {
        let d = Domain::rectangle(Grid2D::new(8, n, 1.0 / 8.0, 2.0 / n as f64, [0.0, -1.0]).unwrap());
        let prof = tanh_profile(eps, 0.0);
        let phi = [d.field_from_fn(|_, y| prof(y)), d.field_from_fn(|_, y| 1.0 - prof(y)), d.zeros()];
        let model = EnergyModel::new(1.0, [0.2; 3], [1.0; 3]).unwrap();
        let params = PotentialParams::new(eps, 0.1, 0.001, 1.0).unwrap();
        let q = d.field_from_fn(|x, _| q_of_x(x));
        let mu = crate::cahn_hilliard::compute_mu(&d, &phi, Some(&q), &model, &params).unwrap();
        let f = capillary_force(&d, &phi, &mu, Some(&q), &model, &params).unwrap();
        let g = d.grid;
        // integrate the x-force across the layer on the central vertical face line
        (0..g.ny).map(|j| f.x[FaceField::xi(&g, 4, j)] * g.hy).sum()
    }

    #[test]
    fn uniform_surfactant_gives_no_tangential_force() {
        let t = flat_interface(400, 0.05, |_| 0.3);
        assert!(t.abs() < 1e-10, "{t}");
        let d = unit(8);
        let phi = [ScalarField::constant(&d, 1.0), d.zeros(), d.zeros()];
        let model = EnergyModel::new(1.0, [0.2; 3], [1.0; 3]).unwrap();
        let params = PotentialParams::new(0.1, 0.1, 0.001, 1.0).unwrap();
        let q = ScalarField::constant(&d, 0.4);
        let mu = crate::cahn_hilliard::compute_mu(&d, &phi, Some(&q), &model, &params).unwrap();
        let f = capillary_force(&d, &phi, &mu, Some(&q), &model, &params).unwrap();
        assert!(f.x.iter().chain(&f.y).all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn marangoni_force_matches_tension_gradient() {
        let slope = 0.4;
        let t = flat_interface(400, 0.05, |x| 0.2 + slope * x);
        // d sigma / dx = -(q / beta) dq/dx at the sampled face x = 0.5
        let q = 0.2 + slope * 0.5;
        let expect = -(q / 0.2) * slope;
        assert!((t - expect).abs() < 0.1 * expect.abs(), "{t} vs {expect}");
    }
}
