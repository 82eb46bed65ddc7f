//! Conserved surfactant balance `dC/dt + div(v C) = div(M grad q)` written in
//! the chemical potential `q`, with `C = K(phi) q` for quadratic energies.

use crate::energetics::{EnergyModel, Pair};
use crate::error::{Result, TricapError};
use crate::grid::{face_center, grad_sq_cells, upwind_divergence, BoundarySpec, Domain, EdgeCondition, FaceField, Link, ScalarField};
use crate::linalg::Stencil5;
use crate::potentials::{a_pair_sq, delta_regularized, w_pair, xi, PotentialParams};

/// Piecewise-linear boundary data through `(t, value)` knots, held constant
/// before the first and after the last knot.
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletSchedule {
    pub knots: Vec<(f64, f64)>,
}

impl DirichletSchedule {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(TricapError::InvalidParameter("schedule needs at least one knot".into()));
        }
        if knots.windows(2).any(|w| !(w[1].0 >= w[0].0)) || knots.iter().any(|k| !k.0.is_finite() || !k.1.is_finite()) {
            return Err(TricapError::InvalidParameter("schedule knots must be finite and ordered in time".into()));
        }
        Ok(Self { knots })
    }

    pub fn constant(value: f64) -> Self {
        Self { knots: vec![(0.0, value)] }
    }

    /// Zero until `t0`, linear to `value` at `t1`, constant afterwards.
    pub fn ramp(t0: f64, t1: f64, value: f64) -> Self {
        Self { knots: vec![(t0, 0.0), (t1, value)] }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let k = &self.knots;
        if t <= k[0].0 {
            return k[0].1;
        }
        for w in k.windows(2) {
            let ((t0, v0), (t1, v1)) = (w[0], w[1]);
            if t <= t1 {
                if t1 == t0 {
                    return v1;
                }
                return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
            }
        }
        k[k.len() - 1].1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum QEdge {
    Neumann,
    Dirichlet(DirichletSchedule),
}

/// Boundary conditions for `q`, one per polygon edge.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfactantBc {
    pub edges: Vec<QEdge>,
}

impl SurfactantBc {
    pub fn neumann(domain: &Domain) -> Self {
        Self { edges: vec![QEdge::Neumann; domain.n_edges()] }
    }

    pub fn at(&self, t: f64) -> BoundarySpec {
        BoundarySpec {
            edges: self
                .edges
                .iter()
                .map(|e| match e {
                    QEdge::Neumann => EdgeCondition::NeumannZero,
                    QEdge::Dirichlet(s) => EdgeCondition::Dirichlet(s.eval(t)),
                })
                .collect(),
        }
    }
}

/// Mobilities and the switches that select which capacities are active.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MobilityParams {
    /// Bulk mobilities per phase.
    pub m_bulk: [f64; 3],
    /// Interfacial mobilities per pair, ordered (1,2), (1,3), (2,3).
    pub m_surf: [f64; 3],
    /// When false the bulk indicator functions are set to zero.
    pub bulk: bool,
    /// Disabled pairs carry neither capacity nor mobility (no delta floor).
    pub pair_enabled: [bool; 3],
}

impl MobilityParams {
    pub fn new(m_bulk: [f64; 3], m_surf: [f64; 3]) -> Result<Self> {
        if m_bulk.iter().chain(&m_surf).any(|m| !(*m >= 0.0 && m.is_finite())) {
            return Err(TricapError::InvalidParameter("mobilities must be non-negative".into()));
        }
        Ok(Self { m_bulk, m_surf, bulk: true, pair_enabled: [true; 3] })
    }
}

#[derive(Clone, Debug)]
pub struct SurfactantState {
    pub q: ScalarField,
    pub time: f64,
}

/// Per-cell capacity `K = dC/dq` and mobility `M` for a fixed phase state.
#[derive(Clone, Debug)]
pub struct Coefficients {
    pub capacity: Vec<f64>,
    pub mobility: Vec<f64>,
}

/// Regularised interface deltas `delta_ij` and indicators `xi_i` per cell.
#[derive(Clone, Debug)]
pub struct InterfaceWeights {
    pub xi: [Vec<f64>; 3],
    pub delta: [Vec<f64>; 3],
}

pub fn interface_weights(domain: &Domain, phi: &[ScalarField; 3], params: &PotentialParams, mob: &MobilityParams) -> InterfaceWeights {
    let n = domain.grid.len();
    let gsq = [0, 1, 2].map(|k| grad_sq_cells(domain, &phi[k].values));
    let mut xs = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut ds = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let eps = params.epsilon;
    for c in domain.inside_cells() {
        let p = [phi[0].values[c], phi[1].values[c], phi[2].values[c]];
        if mob.bulk {
            for k in 0..3 {
                xs[k][c] = xi(p[k]);
            }
        }
        let g = [gsq[0][c], gsq[1][c], gsq[2][c]];
        for pair in Pair::ALL {
            let i = pair.index();
            if mob.pair_enabled[i] {
                let d = eps * a_pair_sq(&g, pair) + w_pair(&p, pair, params.lambda_cap) / eps;
                ds[i][c] = delta_regularized(d, eps, params.c_reg);
            }
        }
    }
    InterfaceWeights { xi: xs, delta: ds }
}

pub fn coefficients(domain: &Domain, weights: &InterfaceWeights, model: &EnergyModel, mob: &MobilityParams) -> Result<Coefficients> {
    let n = domain.grid.len();
    let mut capacity = vec![0.0; n];
    let mut mobility = vec![0.0; n];
    for c in domain.inside_cells() {
        let (mut k, mut m) = (0.0, 0.0);
        for i in 0..3 {
            k += weights.xi[i][c] * model.bulk_susceptibility(i);
            m += weights.xi[i][c] * mob.m_bulk[i];
        }
        for p in Pair::ALL {
            let d = weights.delta[p.index()][c];
            k += d * model.surface_susceptibility(p);
            m += d * mob.m_surf[p.index()];
        }
        if !(m > 0.0) {
            return Err(TricapError::DegenerateMobility { cell: c, value: m });
        }
        capacity[c] = k;
        mobility[c] = m;
    }
    Ok(Coefficients { capacity, mobility })
}

/// `C = sum xi_i c_i(q) + sum delta_ij c_ij(q)`.
pub fn conserved_density(
    domain: &Domain,
    q: &ScalarField,
    phi: &[ScalarField; 3],
    model: &EnergyModel,
    params: &PotentialParams,
    mob: &MobilityParams,
) -> ScalarField {
    let w = interface_weights(domain, phi, params, mob);
    let mut out = ScalarField::zeros(domain.grid);
    for c in domain.inside_cells() {
        let qc = q.values[c];
        let mut v = 0.0;
        for i in 0..3 {
            v += w.xi[i][c] * model.bulk_density(i, qc);
        }
        for p in Pair::ALL {
            v += w.delta[p.index()][c] * model.surface_density(p, qc);
        }
        out.values[c] = v;
    }
    out
}

/// `M = sum xi_i M_i + sum delta_ij M_ij`; errors where it is not positive.
pub fn total_mobility(domain: &Domain, phi: &[ScalarField; 3], params: &PotentialParams, mob: &MobilityParams) -> Result<ScalarField> {
    let w = interface_weights(domain, phi, params, mob);
    let mut out = ScalarField::zeros(domain.grid);
    for c in domain.inside_cells() {
        let mut m = 0.0;
        for i in 0..3 {
            m += w.xi[i][c] * mob.m_bulk[i];
        }
        for p in Pair::ALL {
            m += w.delta[p.index()][c] * mob.m_surf[p.index()];
        }
        if !(m > 0.0) {
            return Err(TricapError::DegenerateMobility { cell: c, value: m });
        }
        out.values[c] = m;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
pub struct SurfactantConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SurfactantConfig {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: 20_000 }
    }
}

#[inline]
fn harmonic(a: f64, b: f64) -> f64 {
    if a + b > 0.0 {
        2.0 * a * b / (a + b)
    } else {
        0.0
    }
}

/// Backward-Euler operator `K / dt - div(M grad)` with harmonic face
/// mobilities; Dirichlet faces contribute to the diagonal.
pub fn assemble(domain: &Domain, coef: &Coefficients, bc: &SurfactantBc, dt: f64) -> Stencil5 {
    let g = domain.grid;
    let mut st = Stencil5::zeros(g.len());
    for c in domain.inside_cells() {
        let mc = coef.mobility[c];
        let mut diag = coef.capacity[c] / dt;
        for (s, link) in domain.links(c).iter().enumerate() {
            let h = domain.spacing(s);
            match *link {
                Link::Cell(nb) => {
                    let k = harmonic(mc, coef.mobility[nb]) / (h * h);
                    st.coef[c][s] = k;
                    diag += k;
                }
                Link::Boundary(edge) => {
                    if let QEdge::Dirichlet(_) = bc.edges[edge] {
                        diag += 2.0 * mc / (h * h);
                    }
                }
            }
        }
        st.diag[c] = diag;
    }
    st
}

fn boundary_rhs(domain: &Domain, coef: &Coefficients, bc: &SurfactantBc, t: f64, rhs: &mut [f64]) {
    let g = domain.grid;
    let spec = bc.at(t);
    for bf in &domain.mask.boundary_faces {
        let s = bf.side as usize;
        if let Some(v) = spec.value(bf.edge, face_center(&g, bf.cell, s)) {
            let h = domain.spacing(s);
            rhs[bf.cell] += 2.0 * coef.mobility[bf.cell] * v / (h * h);
        }
    }
}

fn check_bc(domain: &Domain, bc: &SurfactantBc) -> Result<()> {
    if bc.edges.len() != domain.n_edges() {
        return Err(TricapError::LengthMismatch { left: bc.edges.len(), right: domain.n_edges() });
    }
    Ok(())
}

/// One backward-Euler step from `t` to `t + dt`. `old` and `new` hold the
/// coefficients at the two time levels; advection of `C^n` is explicit.
#[allow(clippy::too_many_arguments)]
pub fn step_q(
    domain: &Domain,
    state: &SurfactantState,
    old: &Coefficients,
    new: &Coefficients,
    velocity: Option<&FaceField>,
    bc: &SurfactantBc,
    dt: f64,
    cfg: &SurfactantConfig,
) -> Result<SurfactantState> {
    check_bc(domain, bc)?;
    state.q.check_finite(domain, "surfactant state")?;
    let n = domain.grid.len();
    let t = state.time + dt;
    let mut rhs = vec![0.0; n];
    let cn: Vec<f64> = (0..n).map(|c| old.capacity[c] * state.q.values[c]).collect();
    for c in domain.inside_cells() {
        rhs[c] = cn[c] / dt;
    }
    if let Some(v) = velocity {
        let adv = upwind_divergence(domain, &cn, v);
        for c in domain.inside_cells() {
            rhs[c] -= adv[c];
        }
    }
    boundary_rhs(domain, new, bc, t, &mut rhs);
    let st = assemble(domain, new, bc, dt);
    let mut x = state.q.values.clone();
    st.solve(domain, &rhs, &mut x, cfg.tol, cfg.max_iter)?;
    let q = ScalarField { grid: domain.grid, values: x };
    q.check_finite(domain, "surfactant solve")?;
    Ok(SurfactantState { q, time: t })
}

/// Stepper for a frozen phase state: the operator and its incomplete
/// Cholesky factor are built once.
#[derive(Debug)]
pub struct FrozenSurfactant {
    coef: Coefficients,
    stencil: Stencil5,
    ic0: Vec<f64>,
    bc: SurfactantBc,
    dt: f64,
    cfg: SurfactantConfig,
}

impl FrozenSurfactant {
    pub fn new(domain: &Domain, coef: Coefficients, bc: SurfactantBc, dt: f64, cfg: SurfactantConfig) -> Result<Self> {
        check_bc(domain, &bc)?;
        if !(dt > 0.0) {
            return Err(TricapError::InvalidParameter(format!("time step must be positive, got {dt}")));
        }
        let stencil = assemble(domain, &coef, &bc, dt);
        let ic0 = stencil.ic0(domain);
        Ok(Self { coef, stencil, ic0, bc, dt, cfg })
    }

    pub fn step(&self, domain: &Domain, state: &SurfactantState) -> Result<SurfactantState> {
        let n = domain.grid.len();
        let t = state.time + self.dt;
        let mut rhs = vec![0.0; n];
        for c in domain.inside_cells() {
            rhs[c] = self.coef.capacity[c] * state.q.values[c] / self.dt;
        }
        boundary_rhs(domain, &self.coef, &self.bc, t, &mut rhs);
        let mut x = state.q.values.clone();
        crate::linalg::pcg(
            |v, out| self.stencil.apply(domain, v, out),
            |r, z| self.stencil.ic0_solve(domain, &self.ic0, r, z),
            &rhs,
            &mut x,
            self.cfg.tol,
            self.cfg.max_iter,
        )?;
        let q = ScalarField { grid: domain.grid, values: x };
        q.check_finite(domain, "surfactant solve")?;
        Ok(SurfactantState { q, time: t })
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coef
    }
}

/// Total surfactant `integral of K q`.
pub fn total_surfactant(domain: &Domain, coef: &Coefficients, q: &ScalarField) -> f64 {
    domain.inside_cells().map(|c| coef.capacity[c] * q.values[c]).sum::<f64>() * domain.grid.cell_area()
}
