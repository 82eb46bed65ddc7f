#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tricap::cahn_hilliard::{phase_masses, CHConfig, CHState, ChSolver};
use tricap::energetics::{EnergyModel, Pair};
use tricap::experiments::lens_phases;
use tricap::flow::{capillary_force, FlowConfig, FlowSolver, FlowState, FluidParams};
use tricap::grid::{Domain, Grid2D, ScalarField};
use tricap::potentials::{a_pair, a_pair_grad, delta_pair, w_pair, w_pair_grad, PotentialParams};
use tricap::sharp::tanh_profile;
use tricap::surfactant::{
    coefficients, interface_weights, step_q, total_surfactant, MobilityParams, SurfactantBc, SurfactantConfig,
    SurfactantState,
};

/// Measured quantity against its bound.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub bound: f64,
}

impl Check {
    pub fn new(name: &'static str, value: f64, bound: f64) -> Self {
        Self { name, value, bound }
    }

    pub fn pass(&self) -> bool {
        self.value.is_finite() && self.value < self.bound
    }

    pub fn line(&self) -> String {
        format!("{}: {:.3e} (bound {:.0e})", self.name, self.value, self.bound)
    }

    pub fn assert(&self) {
        assert!(self.pass(), "{}", self.line());
    }
}

pub fn square(n: usize) -> Domain {
    let h = 1.0 / n as f64;
    Domain::rectangle(Grid2D::new(n, n, h, h, [0.0, 0.0]).unwrap())
}

pub fn unequal_model() -> EnergyModel {
    EnergyModel::new(4.0, [1.0 / 24.0, 1.0 / (8.0 * (4.0 - 3f64.sqrt())), 1.0 / 16.0], [1.0; 3]).unwrap()
}

pub fn solver(d: &Domain, eps: f64, model: EnergyModel) -> ChSolver {
    let params = PotentialParams::new(eps, 0.1, 0.001, 1.0).unwrap();
    let h = d.grid.hx.min(d.grid.hy);
    ChSolver::new(d.clone(), model, params, CHConfig::for_resolution(eps, h)).unwrap()
}

/// Two overlapping discs of phases 1 and 2 in phase 3; `fill` is the peak
/// value of phase 1.
pub fn three_blobs(d: &Domain, eps: f64, fill: f64) -> [ScalarField; 3] {
    let f = tanh_profile(eps, 0.0);
    let r = |x: f64, y: f64, cx: f64, cy: f64| ((x - cx).powi(2) + (y - cy).powi(2)).sqrt();
    let p1 = d.field_from_fn(|x, y| fill * f(0.25 - r(x, y, 0.4, 0.45)));
    let p2 = d.field_from_fn(|x, y| (1.0 - fill * f(0.25 - r(x, y, 0.4, 0.45))) * f(0.2 - r(x, y, 0.65, 0.6)));
    let mut p3 = d.zeros();
    for c in d.inside_cells() {
        p3.values[c] = 1.0 - p1.values[c] - p2.values[c];
    }
    [p1, p2, p3]
}

/// Simplex defect, largest per-phase mass drift and largest energy increase
/// of the frozen-`q` grand potential over `steps` Cahn-Hilliard steps with
/// non-uniform surfactant.
pub fn cahn_hilliard_invariants(steps: usize) -> [Check; 3] {
    let d = square(48);
    let eps = 0.08;
    let s = solver(&d, eps, unequal_model());
    let q = d.field_from_fn(|x, y| 0.3 * x * (1.0 - y));
    let mut st = CHState::new(three_blobs(&d, eps, 0.9));
    let m0 = phase_masses(&d, &st.phi);
    let mut e = s.grand_potential(&st.phi, Some(&q));
    let (mut simplex, mut drift, mut rise) = (st.simplex_defect(&d), 0.0f64, 0.0f64);
    for _ in 0..steps {
        st = s.step(&st, Some(&q), None).unwrap();
        simplex = simplex.max(st.simplex_defect(&d));
        let m = phase_masses(&d, &st.phi);
        for k in 0..3 {
            drift = drift.max((m[k] - m0[k]).abs());
        }
        let en = s.grand_potential(&st.phi, Some(&q));
        rise = rise.max(en - e);
        e = en;
    }
    [
        Check::new("simplex defect", simplex, 1e-10),
        Check::new("phase mass drift", drift, 1e-10),
        Check::new("energy increase", rise, 1e-10),
    ]
}

/// Relative drift of the total surfactant over coupled steps with moving
/// phases and Neumann walls.
pub fn surfactant_conservation(steps: usize) -> Check {
    let d = square(40);
    let eps = 0.08;
    let model = unequal_model();
    let s = solver(&d, eps, model);
    let mob = MobilityParams::new([1.0, 2.0, 0.5], [5.0, 10.0, 20.0]).unwrap();
    let bc = SurfactantBc::neumann(&d);
    let cfg = SurfactantConfig::default();
    let mut st = CHState::new(three_blobs(&d, eps, 1.0));
    let mut q = SurfactantState { q: d.field_from_fn(|x, y| 0.15 + 0.1 * (3.0 * x).sin() * y), time: 0.0 };
    let coef_of = |phi: &[ScalarField; 3]| {
        let w = interface_weights(&d, phi, &s.params, &mob);
        coefficients(&d, &w, &model, &mob).unwrap()
    };
    let mut old = coef_of(&st.phi);
    let total0 = total_surfactant(&d, &old, &q.q);
    let mut drift = 0.0f64;
    for _ in 0..steps {
        st = s.step(&st, Some(&q.q), None).unwrap();
        let new = coef_of(&st.phi);
        q = step_q(&d, &q, &old, &new, None, &bc, 10.0 * s.cfg.dt, &cfg).unwrap();
        drift = drift.max(((total_surfactant(&d, &new, &q.q) - total0) / total0).abs());
        old = new;
    }
    Check::new("relative surfactant drift", drift, 1e-10)
}

/// Largest `|sum_i mu_i / S_i|` for a generic state.
pub fn weighted_potential_sum() -> Check {
    let d = square(24);
    let model = unequal_model();
    let s = solver(&d, 0.1, model);
    let a = |x: f64, y: f64| 0.5 + 0.4 * (6.0 * x).sin() * (3.0 * y).cos();
    let b = |x: f64, y: f64| 0.3 - 0.2 * (4.0 * y).sin() * x;
    let phi = [d.field_from_fn(a), d.field_from_fn(b), d.field_from_fn(|x, y| 1.0 - a(x, y) - b(x, y))];
    let q = d.field_from_fn(|x, y| 0.5 * x * y);
    let mu = s.compute_mu(&phi, Some(&q)).unwrap();
    let worst = d
        .inside_cells()
        .map(|c| {
            let sp = model.spreading_coefficients(q.values[c]);
            (0..3).map(|k| mu[k].values[c] / sp.s[k]).sum::<f64>().abs()
        })
        .fold(0.0, f64::max);
    Check::new("max |sum mu_i / S_i|", worst, 1e-10)
}

fn tanh_pair(eps: f64, z: f64) -> ([f64; 3], [[f64; 2]; 3]) {
    let t = (2.0 * z / eps).tanh();
    let p = 0.5 * (1.0 + t);
    let dp = (1.0 - t * t) / eps;
    ([p, 1.0 - p, 0.0], [[0.0, dp], [0.0, -dp], [0.0, 0.0]])
}

/// Equipartition defect `|eps a - w / eps|` along the tanh profile, and the
/// defect of the integrated delta.
pub fn tanh_identities() -> [Check; 2] {
    let eps = 0.1;
    let lambda = 0.1;
    let mut equi = 0.0f64;
    for i in 0..=2000 {
        let z = -5.0 * eps + 10.0 * eps * i as f64 / 2000.0;
        let (phi, grad) = tanh_pair(eps, z);
        let (a, w) = (a_pair(&grad, Pair::P12), w_pair(&phi, Pair::P12, lambda));
        let scale = (w / eps).max(1.0);
        equi = equi.max((eps * a - w / eps).abs() / scale);
    }
    let (lo, hi, n) = (-20.0 * eps, 20.0 * eps, 200_000);
    let dz = (hi - lo) / n as f64;
    let mut integral = 0.0;
    for i in 0..=n {
        let z = lo + dz * i as f64;
        let (phi, grad) = tanh_pair(eps, z);
        let wgt = if i == 0 || i == n { 0.5 } else { 1.0 };
        integral += wgt * delta_pair(&phi, &grad, Pair::P12, eps, lambda) * dz;
    }
    [Check::new("equipartition defect", equi, 1e-12), Check::new("|integral of delta - 1|", (integral - 1.0).abs(), 1e-6)]
}

fn random_simplex(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let (mut u, mut v) = (rng.gen::<f64>(), rng.gen::<f64>());
    if u > v {
        std::mem::swap(&mut u, &mut v);
    }
    [u, v - u, 1.0 - v]
}

/// Worst relative error of the analytic potential derivatives against
/// central differences at random simplex points.
pub fn potential_derivatives(points: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambda = 0.1;
    let hstep = 1e-6;
    let rel = |exact: f64, fd: f64| (exact - fd).abs() / exact.abs().max(1.0);
    let mut worst = 0.0f64;
    for _ in 0..points {
        let phi = random_simplex(&mut rng);
        let grad: [[f64; 2]; 3] = std::array::from_fn(|_| [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)]);
        for pair in Pair::ALL {
            let g = w_pair_grad(&phi, pair, lambda);
            for k in 0..3 {
                let (mut p, mut m) = (phi, phi);
                p[k] += hstep;
                m[k] -= hstep;
                let fd = (w_pair(&p, pair, lambda) - w_pair(&m, pair, lambda)) / (2.0 * hstep);
                worst = worst.max(rel(g[k], fd));
            }
            let ga = a_pair_grad(&grad, pair);
            for k in 0..3 {
                for c in 0..2 {
                    let (mut p, mut m) = (grad, grad);
                    p[k][c] += hstep;
                    m[k][c] -= hstep;
                    let fd = (a_pair(&p, pair) - a_pair(&m, pair)) / (2.0 * hstep);
                    worst = worst.max(rel(ga[k][c], fd));
                }
            }
        }
    }
    Check::new("potential derivative error", worst, 1e-6)
}

/// Largest cell divergence after projection steps driven by the capillary
/// force of a non-equilibrium lens with non-uniform surfactant.
pub fn projection_divergence(steps: usize) -> Check {
    let h = 1.0 / 32.0;
    let d = Domain::rectangle(Grid2D::new(64, 48, h, h, [-1.0, -0.75]).unwrap());
    let eps = 0.1;
    let model = unequal_model();
    let s = solver(&d, eps, model);
    let phi = lens_phases(&d, [0.1, 0.05], 0.45, eps);
    let q = d.field_from_fn(|x, _| 0.25 * (1.0 + x));
    let mu = s.compute_mu(&phi, Some(&q)).unwrap();
    let force = capillary_force(&d, &phi, &mu, Some(&q), &model, &s.params).unwrap();
    let flow = FlowSolver::new(d.clone(), FluidParams::matched(0.1, 0.01), FlowConfig::default()).unwrap();
    let mut state = FlowState::at_rest(&d);
    let mut worst = 0.0f64;
    for _ in 0..steps {
        let dt = flow.stable_dt(&state, Some((eps, model.sigma0)));
        state = flow.step(&state, Some(&phi), Some(&force), None, dt).unwrap();
        worst = worst.max(flow.max_divergence(&state.vel));
    }
    Check::new("max divergence after projection", worst, 1e-8)
}

/// Largest `|phi_3|` after `steps` steps from two-phase data without surfactant.
pub fn absent_third_phase(steps: usize) -> Check {
    let d = square(40);
    let eps = 0.08;
    let s = solver(&d, eps, unequal_model());
    let f = tanh_profile(eps, 0.0);
    let r = |x: f64, y: f64| ((x - 0.5).powi(2) + (y - 0.45).powi(2)).sqrt();
    let mut st = CHState::new([d.field_from_fn(|x, y| f(0.3 - r(x, y))), d.field_from_fn(|x, y| 1.0 - f(0.3 - r(x, y))), d.zeros()]);
    let mut worst = 0.0f64;
    for _ in 0..steps {
        st = s.step(&st, None, None).unwrap();
        worst = worst.max(st.phi[2].max_abs(&d));
    }
    Check::new("max |phi_3|", worst, 1e-8)
}
