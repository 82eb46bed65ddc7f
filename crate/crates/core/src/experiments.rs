//! Experiment drivers: surfactant diffusion through a fixed triple junction
//! in a hexagon, junction angles of a half lens under surfactant, and a lens
//! driven by Marangoni forces.

use std::f64::consts::PI;

use crate::cahn_hilliard::{phase_masses, wedge_phases, CHConfig, CHState, ChSolver};
use crate::diagnostics::{locate_triple_junction, lp_errors, measure_angles, sample_q_along_segments, AngleMeasurement, SampleSeries};
use crate::energetics::{EnergyModel, SbarMode};
use crate::error::{Result, TricapError};
use crate::flow::{capillary_force, kinetic_energy, velocity_l2, FlowConfig, FlowSolver, FlowState, FluidParams};
use crate::grid::{Domain, Grid2D, Point, ScalarField};
use crate::potentials::PotentialParams;
use crate::sharp::{solve_junction_1d, tanh_profile, Junction1DConfig, Junction1DSolution};
use crate::surfactant::{
    coefficients, interface_weights, step_q, total_surfactant, Coefficients, DirichletSchedule, FrozenSurfactant, MobilityParams, QEdge,
    SurfactantBc, SurfactantConfig, SurfactantState,
};

/// Limits and output cadence shared by all drivers.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunControl {
    /// Hard cap on time steps per stage.
    pub max_steps: Option<usize>,
    /// Report a snapshot every this many steps.
    pub snapshot_every: Option<usize>,
}

impl RunControl {
    fn cap(&self, default: usize) -> usize {
        self.max_steps.map_or(default, |m| m.min(default))
    }

    fn wants_snapshot(&self, step: usize) -> bool {
        self.snapshot_every.map_or(false, |k| k > 0 && step % k == 0)
    }
}

/// Fields handed to a [`Monitor`].
pub struct Snapshot<'a> {
    pub stage: &'static str,
    pub step: usize,
    pub time: f64,
    pub domain: &'a Domain,
    pub phi: &'a [ScalarField; 3],
    pub q: Option<&'a ScalarField>,
}

/// Receives progress from the drivers.
pub trait Monitor {
    fn snapshot(&mut self, _snap: &Snapshot<'_>) -> Result<()> {
        Ok(())
    }

    fn log(&mut self, _message: &str) {}
}

impl Monitor for () {}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(TricapError::InvalidParameter(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

/// Smoothed lens of radius `radius` centred at `center` between phase 1
/// (above) and phase 2 (below); phase 3 fills the disc.
pub fn lens_phases(domain: &Domain, center: Point, radius: f64, epsilon: f64) -> [ScalarField; 3] {
    let prof = tanh_profile(epsilon, 0.0);
    let disc = |x: f64, y: f64| prof(radius - ((x - center[0]).powi(2) + (y - center[1]).powi(2)).sqrt());
    let p3 = domain.field_from_fn(disc);
    let p1 = domain.field_from_fn(|x, y| (1.0 - disc(x, y)) * prof(y - center[1]));
    let p2 = domain.field_from_fn(|x, y| (1.0 - disc(x, y)) * (1.0 - prof(y - center[1])));
    [p1, p2, p3]
}

// ---------------------------------------------------------------------------
// Hexagon

/// Surfactant supplied at one end of interface (1,3) of a fixed, relaxed
/// three-phase network in a regular hexagon of side 1.
#[derive(Clone, Debug, PartialEq)]
pub struct HexagonSetup {
    pub epsilon: f64,
    pub h: f64,
    pub lambda_cap: f64,
    pub c_reg: f64,
    /// Cahn–Hilliard mobility of the relaxation stage.
    pub m_c: f64,
    /// Relaxation step; `None` means `4 eps h`.
    pub dt_ch: Option<f64>,
    pub stabilization: f64,
    pub stationarity_tol: f64,
    pub max_relax_steps: usize,
    /// Relaxation also ends at this time, converged or not.
    pub relax_time: f64,
    pub beta_12: f64,
    pub beta_13: f64,
    pub m_12: f64,
    pub m_13: f64,
    pub schedule: DirichletSchedule,
    pub t_end: f64,
    pub dt_q: f64,
    pub n_samples: usize,
    /// Resolution of the one-dimensional reference.
    pub reference_n: usize,
    pub reference_dt: f64,
}

impl HexagonSetup {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            h: epsilon / 4.0,
            lambda_cap: 0.1,
            c_reg: 0.001,
            m_c: 1.0,
            dt_ch: None,
            stabilization: 8.0,
            stationarity_tol: 1e-3,
            max_relax_steps: 20_000,
            relax_time: 1.0,
            beta_12: 4.0,
            beta_13: 1.0,
            m_12: 25.0,
            m_13: 100.0,
            schedule: DirichletSchedule::ramp(0.0, 1e-4, 0.5),
            t_end: 0.01,
            dt_q: 1e-5,
            n_samples: 400,
            reference_n: 2000,
            reference_dt: 1e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (n, v) in [
            ("epsilon", self.epsilon),
            ("h", self.h),
            ("m_c", self.m_c),
            ("beta_12", self.beta_12),
            ("beta_13", self.beta_13),
            ("t_end", self.t_end),
            ("dt_q", self.dt_q),
            ("relax_time", self.relax_time),
        ] {
            check_positive(n, v)?;
        }
        if self.n_samples < 2 {
            return Err(TricapError::InvalidParameter("need at least two samples".into()));
        }
        Ok(())
    }

    pub fn reference_config(&self) -> Junction1DConfig {
        Junction1DConfig {
            half_length: 3f64.sqrt() / 2.0,
            beta_left: self.beta_13,
            beta_right: self.beta_12,
            m_left: self.m_13,
            m_right: self.m_12,
            n: self.reference_n,
            dt: self.reference_dt,
            schedule: Some(self.schedule.clone()),
            initial: 0.0,
        }
    }
}

/// Regular hexagon of side 1 centred at the origin with a flat bottom edge
/// (edge 4 in counter-clockwise order starting at the vertex `(1, 0)`).
pub fn hexagon_domain(h: f64) -> Result<Domain> {
    let s3 = 3f64.sqrt();
    let grid = Grid2D::covering(-1.0, 1.0, -s3 / 2.0, s3 / 2.0, h)?;
    let verts = (0..6).map(|k| [(k as f64 * PI / 3.0).cos(), (k as f64 * PI / 3.0).sin()]).collect();
    Domain::polygon(grid, verts)
}

pub const HEXAGON_SOURCE_EDGE: usize = 4;

/// Rays of the interfaces (1,2), (1,3), (2,3): (1,3) runs to the middle of
/// the bottom edge, (1,2) and (2,3) to the middles of the upper side edges.
pub const HEXAGON_RAYS: [f64; 3] = [PI / 6.0, -PI / 2.0, 5.0 * PI / 6.0];

/// Sampling path: source end of (1,3), the junction, far end of (1,2).
pub fn hexagon_segments() -> Vec<Vec<Point>> {
    let l = 3f64.sqrt() / 2.0;
    let far = [l * HEXAGON_RAYS[0].cos(), l * HEXAGON_RAYS[0].sin()];
    vec![vec![[0.0, -l], [0.0, 0.0]], vec![[0.0, 0.0], far]]
}

#[derive(Clone, Debug)]
pub struct HexagonResult {
    pub epsilon: f64,
    pub samples: SampleSeries,
    /// Reference solution at the sample coordinates.
    pub reference: Vec<f64>,
    /// Sampled value at the far end `s = L`.
    pub q_far: f64,
    pub linf: f64,
    pub l2: f64,
    pub relax_converged: bool,
    pub relax_steps: usize,
    pub junction: Point,
    pub surfactant_steps: usize,
    pub total_surfactant: f64,
    pub domain: Domain,
    pub phi: [ScalarField; 3],
    pub q: ScalarField,
}

/// Relaxes the phase network with `q = 0` and unit tensions.
pub fn relax_hexagon(setup: &HexagonSetup, control: &RunControl, monitor: &mut dyn Monitor) -> Result<(Domain, CHState, bool, usize)> {
    setup.validate()?;
    let domain = hexagon_domain(setup.h)?;
    let model = EnergyModel::new(1.0, [1.0; 3], [1.0; 3])?;
    let params = PotentialParams::new(setup.epsilon, setup.lambda_cap, setup.c_reg, setup.m_c)?;
    let mut cfg = CHConfig::for_resolution(setup.epsilon, setup.h);
    cfg.dt = setup.dt_ch.unwrap_or(4.0 * setup.epsilon * setup.h);
    cfg.stabilization = setup.stabilization;
    cfg.stationarity_tol = setup.stationarity_tol;
    let ch = ChSolver::new(domain.clone(), model, params, cfg)?;
    let mut state = CHState::new(wedge_phases(&domain, [0.0, 0.0], HEXAGON_RAYS, setup.epsilon));
    let by_time = (setup.relax_time / ch.cfg.dt).ceil() as usize;
    let cap = control.cap(setup.max_relax_steps.min(by_time));
    let mut converged = false;
    let mut steps = 0;
    while steps < cap {
        let next = ch.step(&state, None, None)?;
        steps += 1;
        let rate = max_rate(&domain, &state.phi, &next.phi) / ch.cfg.dt;
        state = next;
        if control.wants_snapshot(steps) {
            monitor.snapshot(&Snapshot { stage: "relax", step: steps, time: state.time, domain: &domain, phi: &state.phi, q: None })?;
        }
        if rate < cfg.stationarity_tol {
            converged = true;
            break;
        }
    }
    monitor.log(&format!("relaxation: {steps} steps, converged = {converged}"));
    Ok((domain, state, converged, steps))
}

fn max_rate(domain: &Domain, a: &[ScalarField; 3], b: &[ScalarField; 3]) -> f64 {
    (0..3)
        .map(|k| domain.inside_cells().map(|c| (a[k].values[c] - b[k].values[c]).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
}

/// Surfactant capacities and mobilities of the frozen hexagon network:
/// bulk indicators and the pair (2,3) are switched off.
pub fn hexagon_coefficients(setup: &HexagonSetup, domain: &Domain, phi: &[ScalarField; 3]) -> Result<(EnergyModel, Coefficients)> {
    // beta_23 is irrelevant with the pair disabled
    let model = EnergyModel::new(1.0, [setup.beta_12, setup.beta_13, 1.0], [1.0; 3])?;
    let params = PotentialParams::new(setup.epsilon, setup.lambda_cap, setup.c_reg, setup.m_c)?;
    let mut mob = MobilityParams::new([0.0; 3], [setup.m_12, setup.m_13, 0.0])?;
    mob.bulk = false;
    mob.pair_enabled = [true, true, false];
    let w = interface_weights(domain, phi, &params, &mob);
    Ok((model, coefficients(domain, &w, &model, &mob)?))
}

/// Both stages plus sampling and comparison with the 1D reference. A
/// precomputed `reference` is reused when given.
pub fn run_hexagon(
    setup: &HexagonSetup,
    reference: Option<&Junction1DSolution>,
    control: &RunControl,
    monitor: &mut dyn Monitor,
) -> Result<HexagonResult> {
    let (domain, relaxed, converged, relax_steps) = relax_hexagon(setup, control, monitor)?;
    let junction = locate_triple_junction(&domain, &relaxed.phi, Some([0.0, 0.0]))?;
    let (_, coef) = hexagon_coefficients(setup, &domain, &relaxed.phi)?;
    let mut edges = vec![QEdge::Neumann; domain.n_edges()];
    edges[HEXAGON_SOURCE_EDGE] = QEdge::Dirichlet(setup.schedule.clone());
    let bc = SurfactantBc { edges };
    let stepper = FrozenSurfactant::new(&domain, coef, bc, setup.dt_q, SurfactantConfig::default())?;
    let mut sq = SurfactantState { q: domain.zeros(), time: 0.0 };
    let n_steps = control.cap(((setup.t_end / setup.dt_q) - 1e-9).ceil() as usize);
    for k in 1..=n_steps {
        sq = stepper.step(&domain, &sq)?;
        if control.wants_snapshot(k) {
            monitor.snapshot(&Snapshot { stage: "surfactant", step: k, time: sq.time, domain: &domain, phi: &relaxed.phi, q: Some(&sq.q) })?;
        }
    }
    monitor.log(&format!("surfactant: {n_steps} steps to t = {}", sq.time));
    let samples = sample_q_along_segments(&domain, &sq.q, &hexagon_segments(), setup.n_samples)?;
    let owned;
    let reference = match reference {
        Some(r) => r,
        None => {
            owned = solve_junction_1d(&setup.reference_config(), sq.time)?;
            &owned
        }
    };
    let ref_series = SampleSeries::new(reference.s.clone(), reference.q.clone())?;
    let yref = ref_series.resample(&samples.s);
    let (linf, l2) = lp_errors(&samples.q, &yref)?;
    let total = total_surfactant(&domain, stepper.coefficients(), &sq.q);
    Ok(HexagonResult {
        epsilon: setup.epsilon,
        q_far: *samples.q.last().expect("samples"),
        samples,
        reference: yref,
        linf,
        l2,
        relax_converged: converged,
        relax_steps,
        junction,
        surfactant_steps: n_steps,
        total_surfactant: total,
        domain,
        phi: relaxed.phi,
        q: sq.q,
    })
}

// ---------------------------------------------------------------------------
// Coupled phase field, surfactant and (optionally) flow

/// Initial phase arrangement.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialShape {
    /// Disc of phase 3 between phase 1 (above) and phase 2 (below).
    Lens { center: Point, radius: f64 },
    /// Three sectors meeting at `apex`, separated by rays of the
    /// interfaces (1,2), (1,3), (2,3).
    Wedge { apex: Point, rays: [f64; 3] },
}

impl InitialShape {
    pub fn phases(&self, domain: &Domain, epsilon: f64) -> [ScalarField; 3] {
        match *self {
            InitialShape::Lens { center, radius } => lens_phases(domain, center, radius, epsilon),
            InitialShape::Wedge { apex, rays } => wedge_phases(domain, apex, rays, epsilon),
        }
    }
}

/// A rectangle `[x0, x1] x [y0, y1]` evolved by the Cahn–Hilliard system
/// coupled to surfactant transport and, when `fluid` is set, to
/// Navier–Stokes flow.
#[derive(Clone, Debug, PartialEq)]
pub struct CoupledSetup {
    pub epsilon: f64,
    pub h: f64,
    pub bounds: [f64; 4],
    pub initial: InitialShape,
    pub t_end: f64,
    pub m_c: f64,
    pub lambda_cap: f64,
    pub c_reg: f64,
    pub sigma0: f64,
    pub beta_pair: [f64; 3],
    pub beta_bulk: [f64; 3],
    pub sbar: SbarMode,
    pub m_bulk: [f64; 3],
    pub m_surf: [f64; 3],
    /// Surfactant conditions on the south, east, north and west sides.
    pub edges: Vec<QEdge>,
    pub fluid: Option<FluidParams>,
    pub dt: Option<f64>,
    pub stabilization: f64,
    pub record_every: f64,
    /// Start point for tracking a triple junction; `None` disables tracking.
    pub junction_hint: Option<Point>,
    pub measure_angles: bool,
}

impl CoupledSetup {
    pub fn validate(&self) -> Result<()> {
        for (n, v) in [
            ("epsilon", self.epsilon),
            ("h", self.h),
            ("t_end", self.t_end),
            ("m_c", self.m_c),
            ("sigma0", self.sigma0),
            ("record_every", self.record_every),
        ] {
            check_positive(n, v)?;
        }
        let [x0, x1, y0, y1] = self.bounds;
        if !(x1 > x0 && y1 > y0) {
            return Err(TricapError::InvalidParameter(format!("empty box {:?}", self.bounds)));
        }
        if self.edges.len() != 4 {
            return Err(TricapError::InvalidParameter(format!("need 4 surfactant edge conditions, got {}", self.edges.len())));
        }
        if let Some(dt) = self.dt {
            check_positive("dt", dt)?;
        }
        if let Some(f) = &self.fluid {
            f.validate()?;
        }
        Ok(())
    }

    pub fn domain(&self) -> Result<Domain> {
        let [x0, x1, y0, y1] = self.bounds;
        Ok(Domain::rectangle(Grid2D::covering(x0, x1, y0, y1, self.h)?))
    }

    pub fn model(&self) -> Result<EnergyModel> {
        let mut model = EnergyModel::new(self.sigma0, self.beta_pair, self.beta_bulk)?;
        model.sbar = self.sbar;
        Ok(model)
    }

    pub fn params(&self) -> Result<PotentialParams> {
        PotentialParams::new(self.epsilon, self.lambda_cap, self.c_reg, self.m_c)
    }

    pub fn ch_config(&self) -> CHConfig {
        let mut cfg = CHConfig::for_resolution(self.epsilon, self.h);
        if let Some(dt) = self.dt {
            cfg.dt = dt;
        }
        cfg.stabilization = self.stabilization;
        cfg
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoupledRecord {
    pub time: f64,
    pub energy: f64,
    pub masses: [f64; 3],
    pub surfactant: f64,
    pub junction: Option<Point>,
    pub anchored: Option<[f64; 3]>,
    pub unanchored: Option<[f64; 3]>,
    pub velocity_l2: f64,
    pub kinetic: f64,
    pub max_divergence: f64,
    /// Abscissa of the centroid of phase 3.
    pub centroid_x: f64,
}

#[derive(Clone, Debug)]
pub struct CoupledResult {
    pub records: Vec<CoupledRecord>,
    pub domain: Domain,
    pub state: CHState,
    pub q: ScalarField,
    pub flow: Option<FlowState>,
    pub steps: usize,
    pub max_divergence: f64,
    pub final_angles: Option<AngleMeasurement>,
}

/// Centroid abscissa of a phase.
pub fn centroid_x(domain: &Domain, phi: &ScalarField) -> f64 {
    let g = domain.grid;
    let (mut m, mut mx) = (0.0, 0.0);
    for c in domain.inside_cells() {
        let (i, j) = g.ij(c);
        let w = phi.values[c].max(0.0);
        m += w;
        mx += w * g.center(i, j)[0];
    }
    mx / m
}

/// Per step: phases from `(phi^n, q^n, v^n)`, capillary force from
/// `(phi^n, mu^n, q^n)`, flow, then surfactant with coefficients at both
/// phase levels and the old velocity.
pub fn run_coupled(setup: &CoupledSetup, control: &RunControl, monitor: &mut dyn Monitor) -> Result<CoupledResult> {
    setup.validate()?;
    let domain = setup.domain()?;
    let model = setup.model()?;
    let params = setup.params()?;
    let cfg = setup.ch_config();
    let ch = ChSolver::new(domain.clone(), model, params, cfg)?;
    let mob = MobilityParams::new(setup.m_bulk, setup.m_surf)?;
    let bc = SurfactantBc { edges: setup.edges.clone() };
    let scfg = SurfactantConfig::default();
    let flow = match setup.fluid {
        Some(f) => Some(FlowSolver::new(domain.clone(), f, FlowConfig::default())?),
        None => None,
    };
    let coefs = |phi: &[ScalarField; 3]| coefficients(&domain, &interface_weights(&domain, phi, &params, &mob), &model, &mob);

    let mut state = CHState::new(setup.initial.phases(&domain, setup.epsilon));
    let mut sq = SurfactantState { q: domain.zeros(), time: 0.0 };
    let mut fs = flow.as_ref().map(|_| FlowState::at_rest(&domain));
    let mut coef = coefs(&state.phi)?;
    let mut hint = setup.junction_hint;
    let mut records = Vec::new();
    let mut max_div: f64 = 0.0;
    let mut last_div = 0.0;
    let cap = control.cap(usize::MAX);
    let mut next_record = 0.0;
    let mut k = 0;
    loop {
        let done = state.time >= setup.t_end - 1e-12 || k >= cap;
        if state.time >= next_record - 1e-12 || done {
            while next_record <= state.time + 1e-12 {
                next_record += setup.record_every;
            }
            let mut rec = CoupledRecord {
                time: state.time,
                energy: ch.energy(&state.phi, Some(&sq.q)),
                masses: phase_masses(&domain, &state.phi),
                surfactant: total_surfactant(&domain, &coef, &sq.q),
                junction: None,
                anchored: None,
                unanchored: None,
                velocity_l2: 0.0,
                kinetic: 0.0,
                max_divergence: last_div,
                centroid_x: centroid_x(&domain, &state.phi[2]),
            };
            if let (Some(f), Some(fl)) = (&fs, &setup.fluid) {
                rec.velocity_l2 = velocity_l2(&domain, &f.vel);
                rec.kinetic = kinetic_energy(&domain, f, Some(&state.phi), fl);
            }
            if let Some(hp) = hint {
                if setup.measure_angles {
                    if let Ok(m) = measure_angles(&domain, &state.phi, Some(hp)) {
                        hint = Some(m.junction);
                        rec.junction = Some(m.junction);
                        rec.anchored = Some(m.psi_anchored);
                        rec.unanchored = Some(m.psi_unanchored);
                    }
                } else if let Ok(p) = locate_triple_junction(&domain, &state.phi, Some(hp)) {
                    hint = Some(p);
                    rec.junction = Some(p);
                }
            }
            records.push(rec);
        }
        if done {
            break;
        }
        k += 1;
        let mut dt = cfg.dt.min(setup.t_end - state.time);
        if let (Some(fl), Some(f)) = (&flow, &fs) {
            dt = dt.min(fl.stable_dt(f, Some((setup.epsilon, setup.sigma0))));
        }
        let vel = fs.as_ref().map(|f| &f.vel);
        let next = ch.step_dt(&state, Some(&sq.q), vel, dt)?;
        let new_flow = match (&flow, &fs) {
            (Some(fl), Some(f)) => {
                let force = capillary_force(&domain, &state.phi, &next.mu, Some(&sq.q), &model, &params)?;
                let nf = fl.step(f, Some(&state.phi), Some(&force), None, dt)?;
                last_div = fl.max_divergence(&nf.vel);
                max_div = max_div.max(last_div);
                Some(nf)
            }
            _ => None,
        };
        let new_coef = coefs(&next.phi)?;
        sq = step_q(&domain, &sq, &coef, &new_coef, vel, &bc, dt, &scfg)?;
        coef = new_coef;
        state = next;
        fs = new_flow;
        if control.wants_snapshot(k) {
            monitor.snapshot(&Snapshot { stage: "coupled", step: k, time: state.time, domain: &domain, phi: &state.phi, q: Some(&sq.q) })?;
        }
    }
    monitor.log(&format!("coupled run: {k} steps to t = {}", state.time));
    let final_angles = match (setup.measure_angles, hint) {
        (true, Some(hp)) => Some(measure_angles(&domain, &state.phi, Some(hp))?),
        _ => None,
    };
    Ok(CoupledResult { records, domain, state, q: sq.q, flow: fs, steps: k, max_divergence: max_div, final_angles })
}

// ---------------------------------------------------------------------------
// Lens angles

/// Half lens in `(0, 2) x (-2, 2)`; surfactant enters through the right side.
#[derive(Clone, Debug, PartialEq)]
pub struct LensSetup {
    pub epsilon: f64,
    pub h: f64,
    pub radius: f64,
    pub t_end: f64,
    pub t0: f64,
    pub tq: f64,
    pub q_bdry: f64,
    pub m_c: f64,
    pub lambda_cap: f64,
    pub c_reg: f64,
    pub sigma0: f64,
    pub beta_pair: [f64; 3],
    pub beta_bulk: [f64; 3],
    pub m_bulk: [f64; 3],
    pub m_surf: [f64; 3],
    pub sbar: SbarMode,
    pub dt: Option<f64>,
    pub stabilization: f64,
    pub record_every: f64,
}

impl LensSetup {
    pub fn new(epsilon: f64) -> Self {
        let beta_pair = [1.0 / 24.0, 1.0 / (8.0 * (4.0 - 3f64.sqrt())), 1.0 / 16.0];
        Self {
            epsilon,
            h: epsilon / 4.0,
            radius: (3.0 / PI).sqrt(),
            t_end: 10.0,
            t0: 1.0,
            tq: 1.0,
            q_bdry: 0.5,
            m_c: 0.1,
            lambda_cap: 0.1,
            c_reg: 0.001,
            sigma0: 4.0,
            beta_pair,
            beta_bulk: [1.0; 3],
            m_bulk: [100.0; 3],
            m_surf: beta_pair.map(|b| 100.0 / b),
            sbar: SbarMode::Harmonic,
            dt: None,
            stabilization: 8.0,
            record_every: 0.1,
        }
    }

    pub fn coupled(&self) -> CoupledSetup {
        let mut edges = vec![QEdge::Neumann; 4];
        edges[1] = QEdge::Dirichlet(DirichletSchedule::ramp(self.t0, self.t0 + self.tq, self.q_bdry));
        CoupledSetup {
            epsilon: self.epsilon,
            h: self.h,
            bounds: [0.0, 2.0, -2.0, 2.0],
            initial: InitialShape::Lens { center: [0.0, 0.0], radius: self.radius },
            t_end: self.t_end,
            m_c: self.m_c,
            lambda_cap: self.lambda_cap,
            c_reg: self.c_reg,
            sigma0: self.sigma0,
            beta_pair: self.beta_pair,
            beta_bulk: self.beta_bulk,
            sbar: self.sbar,
            m_bulk: self.m_bulk,
            m_surf: self.m_surf,
            edges,
            fluid: None,
            dt: self.dt,
            stabilization: self.stabilization,
            record_every: self.record_every,
            junction_hint: Some([self.radius, 0.0]),
            measure_angles: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("radius", self.radius)?;
        if self.radius >= 2.0 {
            return Err(TricapError::InvalidParameter("lens radius must fit into the domain".into()));
        }
        self.coupled().validate()
    }

    /// Sharp-interface angles at full saturation `q = q_bdry`.
    pub fn target_angles(&self) -> Result<[f64; 3]> {
        let s = self.coupled().model()?.tensions(self.q_bdry);
        crate::sharp::young_angles(s[0], s[1], s[2])
    }
}

pub fn run_lens(setup: &LensSetup, control: &RunControl, monitor: &mut dyn Monitor) -> Result<CoupledResult> {
    setup.validate()?;
    run_coupled(&setup.coupled(), control, monitor)
}

/// Largest deviation of measured angles from `target`.
pub fn angle_deviation(angles: &[f64; 3], target: &[f64; 3]) -> f64 {
    (0..3).map(|k| (angles[k] - target[k]).abs()).fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Marangoni

/// Lens of phase 3 between phases 1 (above) and 2 (below) in
/// `(-2, 4) x (-2, 2)`; a surfactant source on the left and a sink on the
/// right drive it by Marangoni forces.
#[derive(Clone, Debug, PartialEq)]
pub struct MarangoniSetup {
    pub epsilon: f64,
    pub h: f64,
    pub radius: f64,
    pub t_end: f64,
    pub t0: f64,
    pub tq: f64,
    pub q_bdry: f64,
    pub m_c: f64,
    pub lambda_cap: f64,
    pub c_reg: f64,
    pub sigma0: f64,
    pub beta_pair: [f64; 3],
    pub beta_bulk: [f64; 3],
    pub m_bulk: [f64; 3],
    pub m_surf: [f64; 3],
    pub fluid: FluidParams,
    pub dt: Option<f64>,
    pub stabilization: f64,
    pub record_every: f64,
}

impl MarangoniSetup {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            h: epsilon / 4.0,
            radius: 1.0,
            t_end: 10.0,
            t0: 2.4,
            tq: 0.05,
            q_bdry: 0.5,
            m_c: 0.005,
            lambda_cap: 0.1,
            c_reg: 0.001,
            sigma0: 1.0,
            beta_pair: [0.2; 3],
            beta_bulk: [1.0; 3],
            m_bulk: [10.0; 3],
            m_surf: [50.0; 3],
            fluid: FluidParams::matched(0.1, 0.01),
            dt: None,
            stabilization: 8.0,
            record_every: 0.05,
        }
    }

    pub fn coupled(&self) -> CoupledSetup {
        let mut edges = vec![QEdge::Neumann; 4];
        edges[3] = QEdge::Dirichlet(DirichletSchedule::ramp(self.t0, self.t0 + self.tq, self.q_bdry));
        edges[1] = QEdge::Dirichlet(DirichletSchedule::constant(0.0));
        CoupledSetup {
            epsilon: self.epsilon,
            h: self.h,
            bounds: [-2.0, 4.0, -2.0, 2.0],
            initial: InitialShape::Lens { center: [0.0, 0.0], radius: self.radius },
            t_end: self.t_end,
            m_c: self.m_c,
            lambda_cap: self.lambda_cap,
            c_reg: self.c_reg,
            sigma0: self.sigma0,
            beta_pair: self.beta_pair,
            beta_bulk: self.beta_bulk,
            sbar: SbarMode::Harmonic,
            m_bulk: self.m_bulk,
            m_surf: self.m_surf,
            edges,
            fluid: Some(self.fluid),
            dt: self.dt,
            stabilization: self.stabilization,
            record_every: self.record_every,
            junction_hint: Some([-self.radius, 0.0]),
            measure_angles: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("radius", self.radius)?;
        self.coupled().validate()
    }
}

pub fn run_marangoni(setup: &MarangoniSetup, control: &RunControl, monitor: &mut dyn Monitor) -> Result<CoupledResult> {
    setup.validate()?;
    run_coupled(&setup.coupled(), control, monitor)
}
