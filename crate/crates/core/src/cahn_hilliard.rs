//! Three-phase Cahn–Hilliard system in Boyer–Lapuerta form with
//! q-dependent tensions, optional advection and a linearly stabilised
//! semi-implicit time step.

use rayon::prelude::*;

use crate::energetics::{EnergyModel, Pair, Spreading};
use crate::error::{Result, TricapError};
use crate::grid::{grad_sq_cells, neumann_laplacian_into, upwind_divergence, Domain, FaceField, Link, Point, ScalarField};
use crate::linalg::{pcg, NeumannSpectral};
use crate::potentials::{a_pair_sq, w_pair, w_pair_grad, xi, xi_prime, PotentialParams};
use crate::sharp::tanh_profile;

#[derive(Clone, Debug)]
pub struct CHState {
    pub phi: [ScalarField; 3],
    pub mu: [ScalarField; 3],
    pub time: f64,
}

impl CHState {
    pub fn new(phi: [ScalarField; 3]) -> Self {
        let g = phi[0].grid;
        Self { phi, mu: [ScalarField::zeros(g), ScalarField::zeros(g), ScalarField::zeros(g)], time: 0.0 }
    }

    /// `max |phi_1 + phi_2 + phi_3 - 1|` over the domain.
    pub fn simplex_defect(&self, domain: &Domain) -> f64 {
        domain
            .inside_cells()
            .map(|c| (self.phi[0].values[c] + self.phi[1].values[c] + self.phi[2].values[c] - 1.0).abs())
            .fold(0.0, f64::max)
    }

    #[inline]
    pub fn at(&self, c: usize) -> [f64; 3] {
        [self.phi[0].values[c], self.phi[1].values[c], self.phi[2].values[c]]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CHConfig {
    pub dt: f64,
    /// Fixed-point corrections of the explicit part per step.
    pub fp_iters: usize,
    pub lin_tol: f64,
    pub max_lin_iter: usize,
    /// Relaxation stops once `max_i |dphi_i| / dt` falls below this.
    pub stationarity_tol: f64,
    /// Weight `A` of the implicit `-(A / eps) Laplacian` stabiliser.
    pub stabilization: f64,
    pub max_relax_steps: usize,
}

impl CHConfig {
    /// Defaults for interface width `epsilon` on cells of size `h`.
    pub fn for_resolution(epsilon: f64, h: f64) -> Self {
        Self {
            dt: 0.1 * epsilon * h,
            fp_iters: 0,
            lin_tol: 1e-12,
            max_lin_iter: 500,
            stationarity_tol: 1e-4,
            stabilization: 8.0,
            max_relax_steps: 20_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(TricapError::InvalidParameter(format!("time step must be positive, got {}", self.dt)));
        }
        if !(self.stabilization >= 0.0) || !(self.lin_tol > 0.0) {
            return Err(TricapError::InvalidParameter("stabilisation and tolerance must be non-negative".into()));
        }
        Ok(())
    }
}

/// Pointwise tension data evaluated from `q`.
struct Local {
    sigma: [f64; 3],
    s: [f64; 3],
    /// `Sbar / H`: 1 for the harmonic mean.
    well_scale: f64,
    harmonic: f64,
    lambda: [f64; 3],
}

fn local(model: &EnergyModel, q: f64) -> Result<Local> {
    let sigma = model.tensions(q);
    let sp = Spreading::from_tensions(sigma, model.sbar);
    sp.check()?;
    Ok(Local {
        sigma,
        s: sp.s,
        well_scale: sp.sbar / sp.harmonic,
        harmonic: sp.harmonic,
        lambda: [0, 1, 2].map(|k| model.bulk_grand_potential(k, q)),
    })
}

#[inline]
fn qv(q: Option<&ScalarField>, c: usize) -> f64 {
    q.map_or(0.0, |f| f.values[c])
}

/// `(3/4) eps sum_faces S_f (phi_nb - phi_c) / h^2`, i.e. the negative of the
/// gradient part of the chemical potential.
fn weighted_laplacian(domain: &Domain, phi: &[f64], s_cell: &[f64], c: usize) -> f64 {
    let mut acc = 0.0;
    for (side, link) in domain.links(c).iter().enumerate() {
        if let Link::Cell(nb) = *link {
            let h = domain.spacing(side);
            acc += 0.5 * (s_cell[c] + s_cell[nb]) * (phi[nb] - phi[c]) / (h * h);
        }
    }
    acc
}

/// Cahn–Hilliard solver bound to a domain and a parameter set.
#[derive(Debug)]
pub struct ChSolver {
    pub domain: Domain,
    pub model: EnergyModel,
    pub params: PotentialParams,
    pub cfg: CHConfig,
    spectral: NeumannSpectral,
}

impl ChSolver {
    pub fn new(domain: Domain, model: EnergyModel, params: PotentialParams, cfg: CHConfig) -> Result<Self> {
        model.validate()?;
        params.validate()?;
        cfg.validate()?;
        let spectral = NeumannSpectral::new(&domain.grid);
        Ok(Self { domain, model, params, cfg, spectral })
    }

    fn spreading_fields(&self, q: Option<&ScalarField>) -> Result<Vec<[f64; 3]>> {
        let n = self.domain.grid.len();
        let mut out = vec![[1.0; 3]; n];
        for c in self.domain.inside_cells() {
            out[c] = local(&self.model, qv(q, c))?.s;
        }
        Ok(out)
    }

    /// Projected chemical potentials with `sum_i mu_i / S_i = 0` in every cell.
    pub fn compute_mu(&self, phi: &[ScalarField; 3], q: Option<&ScalarField>) -> Result<[ScalarField; 3]> {
        let d = &self.domain;
        for (k, f) in phi.iter().enumerate() {
            f.check_finite(d, ["phi_1", "phi_2", "phi_3"][k])?;
        }
        if let Some(q) = q {
            q.check_finite(d, "q")?;
        }
        let s = self.spreading_fields(q)?;
        let s_comp: [Vec<f64>; 3] = [0, 1, 2].map(|k| s.iter().map(|v| v[k]).collect());
        let eps = self.params.epsilon;
        let lam = self.params.lambda_cap;
        let n = d.grid.len();
        let mut mu = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        let rows: Vec<[f64; 3]> = (0..n)
            .into_par_iter()
            .map(|c| {
                if !d.is_inside(c) {
                    return [0.0; 3];
                }
                let p = [phi[0].values[c], phi[1].values[c], phi[2].values[c]];
                let loc = local(&self.model, qv(q, c)).expect("checked above");
                let mut dw = [0.0; 3];
                for pair in Pair::ALL {
                    let g = w_pair_grad(&p, pair, lam);
                    for l in 0..3 {
                        dw[l] += loc.sigma[pair.index()] * g[l];
                    }
                }
                let mut raw = [0.0; 3];
                for k in 0..3 {
                    raw[k] = -0.75 * eps * weighted_laplacian(d, &phi[k].values, &s_comp[k], c)
                        + loc.well_scale * dw[k] / eps
                        + loc.lambda[k] * xi_prime(p[k]);
                }
                let shift = loc.harmonic / 3.0 * (0..3).map(|l| raw[l] / loc.s[l]).sum::<f64>();
                raw.map(|r| r - shift)
            })
            .collect();
        for (c, r) in rows.into_iter().enumerate() {
            for k in 0..3 {
                mu[k][c] = r[k];
            }
        }
        let g = d.grid;
        Ok(mu.map(|values| ScalarField { grid: g, values }))
    }

    /// Phase fluxes `J_k = -(M_c / S_k) (grad mu_k - (H / 3) sum_l grad mu_l / S_l)`
    /// on faces, with face values of `S` from arithmetic cell means. The three
    /// fluxes sum to zero on every face.
    pub fn fluxes(&self, mu: &[ScalarField; 3], q: Option<&ScalarField>) -> Result<[FaceField; 3]> {
        let d = &self.domain;
        let g = d.grid;
        let s = self.spreading_fields(q)?;
        let m_c = self.params.m_c;
        let mut out = [FaceField::zeros(&g), FaceField::zeros(&g), FaceField::zeros(&g)];
        for c in d.inside_cells() {
            let (i, j) = g.ij(c);
            for side in [1usize, 3] {
                let nb = match d.links(c)[side] {
                    Link::Cell(nb) => nb,
                    Link::Boundary(_) => continue,
                };
                let h = d.spacing(side);
                let sf = [0, 1, 2].map(|k| 0.5 * (s[c][k] + s[nb][k]));
                let grad = [0, 1, 2].map(|k| (mu[k].values[nb] - mu[k].values[c]) / h);
                let hf = 3.0 / (1.0 / sf[0] + 1.0 / sf[1] + 1.0 / sf[2]);
                let mean = hf / 3.0 * (0..3).map(|l| grad[l] / sf[l]).sum::<f64>();
                let (is_x, k) = FaceField::face_of(&g, i, j, side);
                for p in 0..3 {
                    let v = -m_c / sf[p] * (grad[p] - mean);
                    if is_x {
                        out[p].x[k] = v;
                    } else {
                        out[p].y[k] = v;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Explicit right-hand side `-div J_k - div(v phi_k)` for phases 1 and 2.
    fn rhs(&self, phi: &[ScalarField; 3], q: Option<&ScalarField>, velocity: Option<&FaceField>) -> Result<([Vec<f64>; 2], [ScalarField; 3])> {
        let d = &self.domain;
        let g = d.grid;
        let mu = self.compute_mu(phi, q)?;
        let j = self.fluxes(&mu, q)?;
        let mut out = [vec![0.0; g.len()], vec![0.0; g.len()]];
        for k in 0..2 {
            let div = crate::grid::face_divergence(d, &j[k]);
            for c in d.inside_cells() {
                out[k][c] = -div.values[c];
            }
            if let Some(v) = velocity {
                let adv = upwind_divergence(d, &phi[k].values, v);
                for c in d.inside_cells() {
                    out[k][c] -= adv[c];
                }
            }
        }
        Ok((out, mu))
    }

    fn implicit_coeffs(&self, dt: f64) -> (f64, f64) {
        let eps = self.params.epsilon;
        let m = self.params.m_c * dt;
        (0.75 * eps * m, -self.cfg.stabilization / eps * m)
    }

    /// `x + dt L_c x` with `L_c = M_c ((3/4) eps Lap^2 - (A / eps) Lap)`.
    fn apply_implicit(&self, x: &[f64], out: &mut [f64], tmp: &mut [f64], dt: f64) {
        let (c2, c1) = self.implicit_coeffs(dt);
        neumann_laplacian_into(&self.domain, x, tmp);
        neumann_laplacian_into(&self.domain, tmp, out);
        for c in 0..x.len() {
            out[c] = if self.domain.is_inside(c) { x[c] + c1 * tmp[c] + c2 * out[c] } else { 0.0 };
        }
    }

    fn solve_implicit(&self, rhs: &mut Vec<f64>, dt: f64) -> Result<()> {
        let (c2, c1) = self.implicit_coeffs(dt);
        if self.domain.is_full() {
            self.spectral.solve_poly(rhs, 1.0, c1, c2);
            return Ok(());
        }
        let n = rhs.len();
        let b = rhs.clone();
        let mut x = vec![0.0; n];
        let tmp = std::cell::RefCell::new(vec![0.0; n]);
        pcg(
            |v, out| self.apply_implicit(v, out, &mut tmp.borrow_mut(), dt),
            |r, z| {
                z.copy_from_slice(r);
                self.spectral.solve_poly(z, 1.0, c1, c2);
                for c in 0..n {
                    if !self.domain.is_inside(c) {
                        z[c] = 0.0;
                    }
                }
            },
            &b,
            &mut x,
            self.cfg.lin_tol,
            self.cfg.max_lin_iter,
        )?;
        *rhs = x;
        Ok(())
    }

    /// Advances one time step. `velocity` must be discretely divergence-free
    /// with vanishing normal component on the boundary.
    pub fn step(&self, state: &CHState, q: Option<&ScalarField>, velocity: Option<&FaceField>) -> Result<CHState> {
        self.step_dt(state, q, velocity, self.cfg.dt)
    }

    /// As [`ChSolver::step`] with an explicit time step.
    pub fn step_dt(&self, state: &CHState, q: Option<&ScalarField>, velocity: Option<&FaceField>, dt: f64) -> Result<CHState> {
        if !(dt > 0.0) {
            return Err(TricapError::InvalidParameter(format!("time step must be positive, got {dt}")));
        }
        let d = &self.domain;
        let n = d.grid.len();
        let mut iterate = state.phi.clone();
        let mut mu_out = None;
        for it in 0..=self.cfg.fp_iters {
            let (r, mu) = self.rhs(&iterate, q, velocity)?;
            if it == 0 {
                mu_out = Some(mu);
            }
            let mut next = state.phi.clone();
            let mut delta3 = vec![0.0; n];
            for k in 0..2 {
                let mut b = vec![0.0; n];
                for c in d.inside_cells() {
                    b[c] = dt * r[k][c];
                }
                if it > 0 {
                    // dt L_c (phi^k - phi^n) = A (phi^k - phi^n) - (phi^k - phi^n)
                    let diff: Vec<f64> = (0..n).map(|c| iterate[k].values[c] - state.phi[k].values[c]).collect();
                    let mut ad = vec![0.0; n];
                    let mut tmp = vec![0.0; n];
                    self.apply_implicit(&diff, &mut ad, &mut tmp, dt);
                    for c in d.inside_cells() {
                        b[c] += ad[c] - diff[c];
                    }
                }
                self.solve_implicit(&mut b, dt)?;
                for c in d.inside_cells() {
                    next[k].values[c] += b[c];
                    delta3[c] -= b[c];
                }
            }
            for c in d.inside_cells() {
                next[2].values[c] += delta3[c];
            }
            iterate = next;
        }
        for (k, f) in iterate.iter().enumerate() {
            f.check_finite(d, ["phi_1", "phi_2", "phi_3"][k])?;
        }
        Ok(CHState { phi: iterate, mu: mu_out.expect("at least one pass"), time: state.time + dt })
    }

    /// Steps with frozen `q` and no flow until stationary or the step cap is
    /// reached; the flag reports convergence.
    pub fn relax_to_equilibrium(&self, state: &CHState, q: Option<&ScalarField>) -> Result<(CHState, bool)> {
        let d = &self.domain;
        let mut cur = state.clone();
        for _ in 0..self.cfg.max_relax_steps {
            let next = self.step(&cur, q, None)?;
            let rate = (0..3)
                .map(|k| d.inside_cells().map(|c| (next.phi[k].values[c] - cur.phi[k].values[c]).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max)
                / self.cfg.dt;
            cur = next;
            if rate < self.cfg.stationarity_tol {
                return Ok((cur, true));
            }
        }
        Ok((cur, false))
    }

    pub fn energy(&self, phi: &[ScalarField; 3], q: Option<&ScalarField>) -> f64 {
        gl_energy(&self.domain, phi, q, &self.model, &self.params)
    }

    /// See [`grand_potential`].
    pub fn grand_potential(&self, phi: &[ScalarField; 3], q: Option<&ScalarField>) -> f64 {
        grand_potential(&self.domain, phi, q, &self.model, &self.params)
    }
}

/// Chemical potentials for a phase state; see [`ChSolver::compute_mu`].
pub fn compute_mu(
    domain: &Domain,
    phi: &[ScalarField; 3],
    q: Option<&ScalarField>,
    model: &EnergyModel,
    params: &PotentialParams,
) -> Result<[ScalarField; 3]> {
    let cfg = CHConfig::for_resolution(params.epsilon, domain.grid.hx.min(domain.grid.hy));
    ChSolver::new(domain.clone(), *model, *params, cfg)?.compute_mu(phi, q)
}

/// Free energy `integral of sum xi_i g_i(c_i) + sum gamma_ij(c_ij) (w_ij / eps + eps a_ij)`.
pub fn gl_energy(domain: &Domain, phi: &[ScalarField; 3], q: Option<&ScalarField>, model: &EnergyModel, params: &PotentialParams) -> f64 {
    let gsq = [0, 1, 2].map(|k| grad_sq_cells(domain, &phi[k].values));
    let eps = params.epsilon;
    let total: f64 = domain
        .inside_cells()
        .map(|c| {
            let p = [phi[0].values[c], phi[1].values[c], phi[2].values[c]];
            let g = [gsq[0][c], gsq[1][c], gsq[2][c]];
            let qc = qv(q, c);
            let mut e = 0.0;
            for k in 0..3 {
                e += xi(p[k]) * model.bulk_energy(k, model.bulk_density(k, qc));
            }
            for pair in Pair::ALL {
                let gamma = model.surface_energy(pair, model.surface_density(pair, qc));
                e += gamma * (w_pair(&p, pair, params.lambda_cap) / eps + eps * a_pair_sq(&g, pair));
            }
            e
        })
        .sum();
    total * domain.grid.cell_area()
}

/// Energy with the surfactant potential held fixed: tensions and bulk grand
/// potentials evaluated at `q` in place of the free energies. This is the
/// functional the Cahn-Hilliard step dissipates when `q` is frozen.
pub fn grand_potential(domain: &Domain, phi: &[ScalarField; 3], q: Option<&ScalarField>, model: &EnergyModel, params: &PotentialParams) -> f64 {
    let gsq = [0, 1, 2].map(|k| grad_sq_cells(domain, &phi[k].values));
    let eps = params.epsilon;
    let total: f64 = domain
        .inside_cells()
        .map(|c| {
            let p = [phi[0].values[c], phi[1].values[c], phi[2].values[c]];
            let g = [gsq[0][c], gsq[1][c], gsq[2][c]];
            let qc = qv(q, c);
            let mut e = 0.0;
            for k in 0..3 {
                e += xi(p[k]) * model.bulk_grand_potential(k, qc);
            }
            for pair in Pair::ALL {
                e += model.surface_tension(pair, qc) * (w_pair(&p, pair, params.lambda_cap) / eps + eps * a_pair_sq(&g, pair));
            }
            e
        })
        .sum();
    total * domain.grid.cell_area()
}

fn ray_distance(p: Point, apex: Point, angle: f64) -> f64 {
    let d = [angle.cos(), angle.sin()];
    let v = [p[0] - apex[0], p[1] - apex[1]];
    let t = (v[0] * d[0] + v[1] * d[1]).max(0.0);
    ((v[0] - t * d[0]).powi(2) + (v[1] - t * d[1]).powi(2)).sqrt()
}

/// Smoothed characteristic functions of three wedges meeting at `apex`,
/// bounded by rays at the angles `rays` of the interfaces (1,2), (1,3),
/// (2,3). Phase 1 fills the counter-clockwise sweep from ray (1,3) to ray
/// (1,2), phase 2 the sweep from (1,2) to (2,3) and phase 3 the sweep from
/// (2,3) to (1,3). Each wedge must be narrower than a half-plane.
pub fn wedge_phases(domain: &Domain, apex: Point, rays: [f64; 3], epsilon: f64) -> [ScalarField; 3] {
    let prof = tanh_profile(epsilon, 0.0);
    let sweep = |a: f64, from: f64| (a - from).rem_euclid(std::f64::consts::TAU);
    let signed = move |x: f64, y: f64, from: f64, to: f64| {
        let p = [x, y];
        let d = ray_distance(p, apex, from).min(ray_distance(p, apex, to));
        let a = (y - apex[1]).atan2(x - apex[0]);
        if sweep(a, from) < sweep(to, from) {
            d
        } else {
            -d
        }
    };
    let [r12, r13, r23] = rays;
    let mut p = [(r13, r12), (r12, r23), (r23, r13)].map(|(a, b)| domain.field_from_fn(|x, y| prof(signed(x, y, a, b))));
    for c in domain.inside_cells() {
        let sum = p[0].values[c] + p[1].values[c] + p[2].values[c];
        for f in p.iter_mut() {
            f.values[c] /= sum;
        }
    }
    p
}

/// Per-phase integrals `integral of phi_k`.
pub fn phase_masses(domain: &Domain, phi: &[ScalarField; 3]) -> [f64; 3] {
    [0, 1, 2].map(|k| crate::grid::integrate(domain, &phi[k]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2D;

    fn strip(ny: usize, eps: f64) -> (Domain, [ScalarField; 3]) {
        let h = 2.0 / ny as f64;
        let g = Grid2D::new(4, ny, h, h, [0.0, -1.0]).unwrap();
        let d = Domain::rectangle(g);
        let f = tanh_profile(eps, 0.0);
        let p1 = d.field_from_fn(|_, y| f(y));
        let p2 = d.field_from_fn(|_, y| 1.0 - f(y));
        (d.clone(), [p1, p2, d.zeros()])
    }

    fn solver(d: &Domain, eps: f64) -> ChSolver {
        let model = EnergyModel::new(1.0, [1.0; 3], [1.0; 3]).unwrap();
        let params = PotentialParams::new(eps, 0.1, 0.001, 1.0).unwrap();
        let h = d.grid.hx.min(d.grid.hy);
        ChSolver::new(d.clone(), model, params, CHConfig::for_resolution(eps, h)).unwrap()
    }

    #[test]
    fn corner_state_has_zero_potential_and_is_fixed() {
        let g = Grid2D::new(8, 8, 0.1, 0.1, [0.0, 0.0]).unwrap();
        let d = Domain::rectangle(g);
        let s = solver(&d, 0.1);
        let phi = [d.zeros(), ScalarField::constant(&d, 1.0), d.zeros()];
        let q = ScalarField::constant(&d, 0.3);
        let mu = s.compute_mu(&phi, Some(&q)).unwrap();
        // the bulk grand potential shifts mu only through xi', which vanishes at corners
        for k in 0..3 {
            assert!(mu[k].max_abs(&d) < 1e-14);
        }
        let next = s.step(&CHState::new(phi.clone()), Some(&q), None).unwrap();
        for k in 0..3 {
            for c in d.inside_cells() {
                assert!((next.phi[k].values[c] - phi[k].values[c]).abs() < 1e-12);
            }
        }
        assert_eq!(gl_energy(&d, &phi, None, &s.model, &s.params), 0.0);
    }

    #[test]
    fn tanh_profile_is_nearly_stationary() {
        let eps = 0.2;
        let err = |ny: usize| {
            let (d, phi) = strip(ny, eps);
            let mu = solver(&d, eps).compute_mu(&phi, None).unwrap();
            let g = d.grid;
            d.inside_cells()
                .filter(|&c| g.ij(c).1 > 2 && g.ij(c).1 + 3 < g.ny)
                .map(|c| mu[0].values[c].abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(100), err(200));
        assert!(e1 < 0.2, "{e1}");
        assert!(e1 / e2 > 3.5, "{e1} {e2}");
    }

    #[test]
    fn projected_potentials_satisfy_weighted_sum_rule() {
        let g = Grid2D::new(24, 24, 1.0 / 24.0, 1.0 / 24.0, [0.0, 0.0]).unwrap();
        let d = Domain::rectangle(g);
        let model = EnergyModel::new(4.0, [1.0 / 24.0, 1.0 / (8.0 * (4.0 - 3f64.sqrt())), 1.0 / 16.0], [1.0; 3]).unwrap();
        let params = PotentialParams::new(0.1, 0.1, 0.001, 1.0).unwrap();
        let s = ChSolver::new(d.clone(), model, params, CHConfig::for_resolution(0.1, 1.0 / 24.0)).unwrap();
        let p1 = d.field_from_fn(|x, y| 0.5 + 0.4 * (6.0 * x).sin() * (3.0 * y).cos());
        let p2 = d.field_from_fn(|x, y| 0.3 - 0.2 * (4.0 * y).sin() * x);
        let p3 = d.field_from_fn(|x, y| 1.0 - (0.5 + 0.4 * (6.0 * x).sin() * (3.0 * y).cos()) - (0.3 - 0.2 * (4.0 * y).sin() * x));
        let q = d.field_from_fn(|x, y| 0.5 * x * y);
        let phi = [p1, p2, p3];
        let mu = s.compute_mu(&phi, Some(&q)).unwrap();
        for c in d.inside_cells() {
            let sp = model.spreading_coefficients(q.values[c]);
            let sum: f64 = (0..3).map(|k| mu[k].values[c] / sp.s[k]).sum();
            assert!(sum.abs() < 1e-10);
        }
        let j = s.fluxes(&mu, Some(&q)).unwrap();
        for f in 0..j[0].x.len() {
            assert!((j[0].x[f] + j[1].x[f] + j[2].x[f]).abs() < 1e-9);
        }
    }

    #[test]
    fn spreading_state_is_rejected() {
        let g = Grid2D::new(8, 8, 0.1, 0.1, [0.0, 0.0]).unwrap();
        let d = Domain::rectangle(g);
        let model = EnergyModel::new(1.0, [1.0, 10.0, 10.0], [1.0; 3]).unwrap();
        let params = PotentialParams::new(0.1, 0.1, 0.001, 1.0).unwrap();
        let s = ChSolver::new(d.clone(), model, params, CHConfig::for_resolution(0.1, 0.1)).unwrap();
        let phi = [ScalarField::constant(&d, 0.5), ScalarField::constant(&d, 0.5), d.zeros()];
        let q = ScalarField::constant(&d, 3.0);
        assert!(matches!(s.compute_mu(&phi, Some(&q)), Err(TricapError::Spreading { .. })));
    }

    #[test]
    fn third_phase_stays_absent_in_two_phase_data() {
        let g = Grid2D::new(20, 20, 0.05, 0.05, [0.0, 0.0]).unwrap();
        let d = Domain::rectangle(g);
        let s = solver(&d, 0.1);
        let f = tanh_profile(0.1, 0.0);
        let p1 = d.field_from_fn(|x, y| f(0.3 - ((x - 0.5).powi(2) + (y - 0.5).powi(2)).sqrt()));
        let p2 = d.field_from_fn(|x, y| 1.0 - f(0.3 - ((x - 0.5).powi(2) + (y - 0.5).powi(2)).sqrt()));
        let mut st = CHState::new([p1, p2, d.zeros()]);
        for _ in 0..20 {
            st = s.step(&st, None, None).unwrap();
        }
        assert!(st.phi[2].max_abs(&d) < 1e-8);
    }
    fn three_blobs(d: &Domain, eps: f64) -> [ScalarField; 3] {
        let f = tanh_profile(eps, 0.0);
        let p1 = d.field_from_fn(|x, y| 0.9 * f(0.25 - ((x - 0.4).powi(2) + (y - 0.45).powi(2)).sqrt()));
        let p2 = d.field_from_fn(|x, y| {
            let a = 0.9 * f(0.25 - ((x - 0.4).powi(2) + (y - 0.45).powi(2)).sqrt());
            (1.0 - a) * f(0.2 - ((x - 0.65).powi(2) + (y - 0.6).powi(2)).sqrt())
        });
        let mut p3 = d.zeros();
        for c in d.inside_cells() {
            p3.values[c] = 1.0 - p1.values[c] - p2.values[c];
        }
        [p1, p2, p3]
    }

    fn run_invariants(d: &Domain, steps: usize) {
        let eps = 0.08;
        let s = solver(d, eps);
        let mut st = CHState::new(three_blobs(d, eps));
        let m0 = phase_masses(d, &st.phi);
        let mut e = s.energy(&st.phi, None);
        for _ in 0..steps {
            st = s.step(&st, None, None).unwrap();
            assert!(st.simplex_defect(d) < 1e-10);
            let en = s.energy(&st.phi, None);
            assert!(en <= e + 1e-10, "{en} > {e}");
            e = en;
        }
        let m = phase_masses(d, &st.phi);
        for k in 0..3 {
            assert!((m[k] - m0[k]).abs() < 1e-10, "{k}: {} {}", m[k], m0[k]);
        }
    }

    #[test]
    fn rectangle_run_conserves_mass_and_dissipates_energy() {
        let g = Grid2D::new(48, 48, 1.0 / 48.0, 1.0 / 48.0, [0.0, 0.0]).unwrap();
        run_invariants(&Domain::rectangle(g), 200);
    }

    #[test]
    fn masked_run_conserves_mass_and_dissipates_energy() {
        let h = 1.0 / 48.0;
        let g = Grid2D::new(48, 48, h, h, [0.0, 0.0]).unwrap();
        let d = Domain::polygon(g, vec![[0.02, 0.05], [0.98, 0.1], [0.9, 0.97], [0.05, 0.9]]).unwrap();
        run_invariants(&d, 60);
    }

    #[test]
    fn flat_interface_energy_equals_tension() {
        let eps = 0.1;
        let (d, phi) = strip(400, eps);
        let s = solver(&d, eps);
        let width = d.grid.hx * d.grid.nx as f64;
        let e = s.energy(&phi, None) / width;
        assert!((e - 1.0).abs() < 1e-3, "{e}");
    }

    #[test]
    fn stationary_state_relaxes_immediately() {
        let g = Grid2D::new(8, 8, 0.1, 0.1, [0.0, 0.0]).unwrap();
        let d = Domain::rectangle(g);
        let s = solver(&d, 0.1);
        let st = CHState::new([ScalarField::constant(&d, 1.0), d.zeros(), d.zeros()]);
        let (out, ok) = s.relax_to_equilibrium(&st, None).unwrap();
        assert!(ok);
        assert!((out.time - s.cfg.dt).abs() < 1e-15);
    }
}
