//! C interface to the tricap library.
//!
//! Every function returns a [`TricapStatus`]; results are written through
//! out-pointers. Objects are opaque handles created by `*_new`/`*_parse`
//! functions and released with the matching `*_free`. After a failure,
//! [`tricap_last_error`] yields a message for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use tricap::cahn_hilliard::{gl_energy, CHConfig, CHState, ChSolver};
use tricap::config::ExperimentConfig;
use tricap::diagnostics::measure_angles;
use tricap::energetics::EnergyModel;
use tricap::experiments::{lens_phases, RunControl};
use tricap::grid::{Domain, Grid2D, ScalarField};
use tricap::potentials::PotentialParams;
use tricap::run::run_experiment;
use tricap::sharp::{solve_junction_1d, young_angles, Junction1DConfig, Junction1DSolution};
use tricap::surfactant::DirichletSchedule;
use tricap::TricapError;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TricapStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Spreading = 3,
    SolverDiverged = 4,
    NonFinite = 5,
    TooFewPoints = 6,
    OutsideDomain = 7,
    Io = 8,
    Parse = 9,
    BufferTooSmall = 10,
    Panic = 11,
    NoJunction = 12,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &TricapError) -> TricapStatus {
    match e {
        TricapError::NonFinite { .. } => TricapStatus::NonFinite,
        TricapError::InvalidParameter(_) | TricapError::LengthMismatch { .. } | TricapError::DegenerateMobility { .. } => {
            TricapStatus::InvalidArgument
        }
        TricapError::Spreading { .. } => TricapStatus::Spreading,
        TricapError::SolverDiverged { .. } => TricapStatus::SolverDiverged,
        TricapError::NoJunction => TricapStatus::NoJunction,
        TricapError::TooFewPoints { .. } => TricapStatus::TooFewPoints,
        TricapError::OutsideDomain { .. } => TricapStatus::OutsideDomain,
        TricapError::Config { .. } | TricapError::Parse(_) | TricapError::Csv(_) => TricapStatus::Parse,
        TricapError::Io(_) => TricapStatus::Io,
    }
}

fn fail(status: TricapStatus, msg: impl Into<String>) -> TricapStatus {
    set_error(msg.into());
    status
}

fn guard(f: impl FnOnce() -> Result<(), TricapStatus>) -> TricapStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            TricapStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => fail(TricapStatus::Panic, "internal panic"),
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, TricapStatus>;
}

impl<T> OrStatus<T> for tricap::Result<T> {
    fn or_status(self) -> Result<T, TricapStatus> {
        self.map_err(|e| fail(status_of(&e), e.to_string()))
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), TricapStatus> {
    if p.is_null() {
        Err(fail(TricapStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, TricapStatus> {
    non_null(p, what)?;
    CStr::from_ptr(p).to_str().map_err(|_| fail(TricapStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// Copies `s` NUL-terminated into `buf` of `len` bytes. `needed`, when not
/// null, receives the required size including the terminator.
unsafe fn copy_str(s: &str, buf: *mut c_char, len: usize, needed: *mut usize) -> Result<(), TricapStatus> {
    if !needed.is_null() {
        *needed = s.len() + 1;
    }
    if buf.is_null() {
        return if needed.is_null() { Err(fail(TricapStatus::NullPointer, "buffer is null")) } else { Ok(()) };
    }
    if len < s.len() + 1 {
        return Err(fail(TricapStatus::BufferTooSmall, format!("need {} bytes", s.len() + 1)));
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf as *mut u8, s.len());
    *buf.add(s.len()) = 0;
    Ok(())
}

/// Copies the last error message of this thread into `buf`.
///
/// # Safety
/// `buf` must be valid for `len` bytes or null; `needed` null or writable.
#[no_mangle]
pub unsafe extern "C" fn tricap_last_error(buf: *mut c_char, len: usize, needed: *mut usize) -> TricapStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    match copy_str(&msg, buf, len, needed) {
        Ok(()) => TricapStatus::Ok,
        Err(s) => s,
    }
}

/// Equilibrium angles of phases 1, 2, 3 for tensions (1,2), (1,3), (2,3).
///
/// # Safety
/// `out` must point to three writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tricap_young_angles(sigma12: f64, sigma13: f64, sigma23: f64, out: *mut f64) -> TricapStatus {
    guard(|| {
        non_null(out, "out")?;
        let psi = young_angles(sigma12, sigma13, sigma23).or_status()?;
        ptr::copy_nonoverlapping(psi.as_ptr(), out, 3);
        Ok(())
    })
}

/// Parameters of the one-dimensional junction problem: two segments
/// `(-L, 0)`, `(0, L)` with capacities `1 / beta` and mobilities `m`, a
/// linear ramp of the boundary value at `s = -L` from `ramp_t0` to
/// `ramp_t1`, and a no-flux end at `s = L`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TricapJunctionParams {
    pub half_length: f64,
    pub beta_left: f64,
    pub beta_right: f64,
    pub m_left: f64,
    pub m_right: f64,
    pub n: usize,
    pub dt: f64,
    pub ramp_t0: f64,
    pub ramp_t1: f64,
    pub q_bdry: f64,
}

/// Sampled profile `q(s)`.
pub struct TricapProfile(Junction1DSolution);

/// Fills `out` with the hexagon setting.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tricap_junction_default(out: *mut TricapJunctionParams) -> TricapStatus {
    guard(|| {
        non_null(out, "out")?;
        let c = Junction1DConfig::hexagon();
        let (t0, t1, v) = match c.schedule.as_ref().map(|s| s.knots.as_slice()) {
            Some([(a, _), (b, v)]) => (*a, *b, *v),
            _ => (0.0, 1e-4, 0.5),
        };
        *out = TricapJunctionParams {
            half_length: c.half_length,
            beta_left: c.beta_left,
            beta_right: c.beta_right,
            m_left: c.m_left,
            m_right: c.m_right,
            n: c.n,
            dt: c.dt,
            ramp_t0: t0,
            ramp_t1: t1,
            q_bdry: v,
        };
        Ok(())
    })
}

/// Solves the junction problem up to `t_end`.
///
/// # Safety
/// `params` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tricap_junction_solve(
    params: *const TricapJunctionParams,
    t_end: f64,
    out: *mut *mut TricapProfile,
) -> TricapStatus {
    guard(|| {
        non_null(params, "params")?;
        non_null(out, "out")?;
        let p = *params;
        if !(p.ramp_t1 > p.ramp_t0) {
            return Err(fail(TricapStatus::InvalidArgument, "ramp_t1 must exceed ramp_t0"));
        }
        let cfg = Junction1DConfig {
            half_length: p.half_length,
            beta_left: p.beta_left,
            beta_right: p.beta_right,
            m_left: p.m_left,
            m_right: p.m_right,
            n: p.n,
            dt: p.dt,
            schedule: Some(DirichletSchedule::ramp(p.ramp_t0, p.ramp_t1, p.q_bdry)),
            initial: 0.0,
        };
        let sol = solve_junction_1d(&cfg, t_end).or_status()?;
        *out = Box::into_raw(Box::new(TricapProfile(sol)));
        Ok(())
    })
}

/// Number of samples of a profile.
///
/// # Safety
/// `profile` must be a live handle and `len` writable.
#[no_mangle]
pub unsafe extern "C" fn tricap_profile_len(profile: *const TricapProfile, len: *mut usize) -> TricapStatus {
    guard(|| {
        non_null(profile, "profile")?;
        non_null(len, "len")?;
        *len = (*profile).0.s.len();
        Ok(())
    })
}

/// Copies coordinates and values into arrays of `len` doubles each;
/// either array may be null.
///
/// # Safety
/// `profile` must be live; non-null arrays must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn tricap_profile_copy(profile: *const TricapProfile, s: *mut f64, q: *mut f64, len: usize) -> TricapStatus {
    guard(|| {
        non_null(profile, "profile")?;
        let p = &(*profile).0;
        if len < p.s.len() {
            return Err(fail(TricapStatus::BufferTooSmall, format!("need {} values", p.s.len())));
        }
        if !s.is_null() {
            ptr::copy_nonoverlapping(p.s.as_ptr(), s, p.s.len());
        }
        if !q.is_null() {
            ptr::copy_nonoverlapping(p.q.as_ptr(), q, p.q.len());
        }
        Ok(())
    })
}

/// # Safety
/// `profile` must come from [`tricap_junction_solve`] or be null.
#[no_mangle]
pub unsafe extern "C" fn tricap_profile_free(profile: *mut TricapProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// Parsed experiment configuration.
pub struct TricapConfig(ExperimentConfig);

/// Parses a configuration in the `key = value` format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tricap_config_parse(text: *const c_char, out: *mut *mut TricapConfig) -> TricapStatus {
    guard(|| {
        non_null(out, "out")?;
        let t = str_arg(text, "text")?;
        let cfg = ExperimentConfig::parse(t).or_status()?;
        *out = Box::into_raw(Box::new(TricapConfig(cfg)));
        Ok(())
    })
}

/// Writes the resolved configuration, defaults included.
///
/// # Safety
/// See [`tricap_last_error`] for the buffer contract.
#[no_mangle]
pub unsafe extern "C" fn tricap_config_manifest(
    config: *const TricapConfig,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> TricapStatus {
    guard(|| {
        non_null(config, "config")?;
        copy_str(&(*config).0.manifest(), buf, len, needed)
    })
}

/// Runs the configured experiment, writing artifacts to `output_dir`.
/// Zero `max_steps` or `snapshot_every` means unlimited / none.
///
/// # Safety
/// `config` must be live and `output_dir` a NUL-terminated path.
#[no_mangle]
pub unsafe extern "C" fn tricap_run(
    config: *const TricapConfig,
    output_dir: *const c_char,
    max_steps: usize,
    snapshot_every: usize,
) -> TricapStatus {
    guard(|| {
        non_null(config, "config")?;
        let dir = str_arg(output_dir, "output_dir")?;
        let control = RunControl { max_steps: (max_steps > 0).then_some(max_steps), snapshot_every: (snapshot_every > 0).then_some(snapshot_every) };
        run_experiment(&(*config).0, control, Path::new(dir), &mut |_: &str| {}).or_status()?;
        Ok(())
    })
}

/// # Safety
/// `config` must come from [`tricap_config_parse`] or be null.
#[no_mangle]
pub unsafe extern "C" fn tricap_config_free(config: *mut TricapConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Cahn–Hilliard relaxation of three phases on a rectangle without
/// surfactant or flow.
pub struct TricapPhaseField {
    solver: ChSolver,
    state: CHState,
    q: ScalarField,
}

/// Lens of phase 3 with radius `radius` centred at the origin of the box
/// `[x0, x1] x [y0, y1]`, phase 1 above and phase 2 below. `tensions` holds
/// (1,2), (1,3), (2,3); the grid spacing is `epsilon / 4`.
///
/// # Safety
/// `tensions` must hold three doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn tricap_phase_field_new_lens(
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    radius: f64,
    epsilon: f64,
    tensions: *const f64,
    out: *mut *mut TricapPhaseField,
) -> TricapStatus {
    guard(|| {
        non_null(tensions, "tensions")?;
        non_null(out, "out")?;
        if !(epsilon > 0.0 && radius > 0.0) {
            return Err(fail(TricapStatus::InvalidArgument, "epsilon and radius must be positive"));
        }
        let t = [*tensions, *tensions.add(1), *tensions.add(2)];
        if t.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(fail(TricapStatus::InvalidArgument, "tensions must be positive"));
        }
        let h = epsilon / 4.0;
        let domain = Domain::rectangle(Grid2D::covering(x0, x1, y0, y1, h).or_status()?);
        // sigma_ij(1) = sigma0 - 1 / (2 beta_ij) hits the requested tensions
        let sigma0 = 2.0 * t.iter().fold(0.0f64, |a, b| a.max(*b));
        let beta = t.map(|v| 0.5 / (sigma0 - v));
        let model = EnergyModel::new(sigma0, beta, [1e12; 3]).or_status()?;
        let params = PotentialParams::new(epsilon, 0.1, 0.001, 1.0).or_status()?;
        let solver = ChSolver::new(domain.clone(), model, params, CHConfig::for_resolution(epsilon, h)).or_status()?;
        let state = CHState::new(lens_phases(&domain, [0.0, 0.0], radius, epsilon));
        let q = ScalarField::constant(&domain, 1.0);
        *out = Box::into_raw(Box::new(TricapPhaseField { solver, state, q }));
        Ok(())
    })
}

/// Advances `steps` time steps.
///
/// # Safety
/// `pf` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tricap_phase_field_step(pf: *mut TricapPhaseField, steps: usize) -> TricapStatus {
    guard(|| {
        non_null(pf, "phase field")?;
        let pf = &mut *pf;
        for _ in 0..steps {
            pf.state = pf.solver.step(&pf.state, Some(&pf.q), None).or_status()?;
        }
        Ok(())
    })
}

/// Grid size and current time.
///
/// # Safety
/// `pf` must be live; out-pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn tricap_phase_field_info(pf: *const TricapPhaseField, nx: *mut usize, ny: *mut usize, time: *mut f64) -> TricapStatus {
    guard(|| {
        non_null(pf, "phase field")?;
        let pf = &*pf;
        let g = pf.solver.domain.grid;
        if !nx.is_null() {
            *nx = g.nx;
        }
        if !ny.is_null() {
            *ny = g.ny;
        }
        if !time.is_null() {
            *time = pf.state.time;
        }
        Ok(())
    })
}

/// Copies phase `phase` (1, 2 or 3) in row-major order (x fastest).
///
/// # Safety
/// `pf` must be live and `out` hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn tricap_phase_field_copy(pf: *const TricapPhaseField, phase: u32, out: *mut f64, len: usize) -> TricapStatus {
    guard(|| {
        non_null(pf, "phase field")?;
        non_null(out, "out")?;
        let pf = &*pf;
        if !(1..=3).contains(&phase) {
            return Err(fail(TricapStatus::InvalidArgument, format!("phase must be 1, 2 or 3, got {phase}")));
        }
        let v = &pf.state.phi[phase as usize - 1].values;
        if len < v.len() {
            return Err(fail(TricapStatus::BufferTooSmall, format!("need {} values", v.len())));
        }
        ptr::copy_nonoverlapping(v.as_ptr(), out, v.len());
        Ok(())
    })
}

/// Ginzburg–Landau energy of the current state.
///
/// # Safety
/// `pf` must be live and `energy` writable.
#[no_mangle]
pub unsafe extern "C" fn tricap_phase_field_energy(pf: *const TricapPhaseField, energy: *mut f64) -> TricapStatus {
    guard(|| {
        non_null(pf, "phase field")?;
        non_null(energy, "energy")?;
        let pf = &*pf;
        *energy = gl_energy(&pf.solver.domain, &pf.state.phi, Some(&pf.q), &pf.solver.model, &pf.solver.params);
        Ok(())
    })
}

/// Junction angles by anchored and unanchored regression and the junction
/// position, searching from `(hint_x, hint_y)`.
///
/// # Safety
/// `pf` must be live; `anchored`, `unanchored` hold three and `junction`
/// two doubles (each may be null).
#[no_mangle]
pub unsafe extern "C" fn tricap_phase_field_angles(
    pf: *const TricapPhaseField,
    hint_x: f64,
    hint_y: f64,
    anchored: *mut f64,
    unanchored: *mut f64,
    junction: *mut f64,
) -> TricapStatus {
    guard(|| {
        non_null(pf, "phase field")?;
        let pf = &*pf;
        let m = measure_angles(&pf.solver.domain, &pf.state.phi, Some([hint_x, hint_y])).or_status()?;
        if !anchored.is_null() {
            ptr::copy_nonoverlapping(m.psi_anchored.as_ptr(), anchored, 3);
        }
        if !unanchored.is_null() {
            ptr::copy_nonoverlapping(m.psi_unanchored.as_ptr(), unanchored, 3);
        }
        if !junction.is_null() {
            ptr::copy_nonoverlapping(m.junction.as_ptr(), junction, 2);
        }
        Ok(())
    })
}

/// # Safety
/// `pf` must come from [`tricap_phase_field_new_lens`] or be null.
#[no_mangle]
pub unsafe extern "C" fn tricap_phase_field_free(pf: *mut TricapPhaseField) {
    if !pf.is_null() {
        drop(Box::from_raw(pf));
    }
}
