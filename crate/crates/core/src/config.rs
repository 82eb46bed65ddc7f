//! Experiment configuration in a flat `key = value` format.
//!
//! ```text
//! # hexagon convergence study
//! experiment = hexagon-diffusion
//! physics.epsilon = 0.08, 0.04, 0.02
//! numerics.dt_q = 1e-5
//! ```
//!
//! Keys are namespaced with dots, `#` starts a comment, lists are comma
//! separated. Unknown keys are rejected. Every experiment starts from a
//! preset and the file overrides it.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::energetics::SbarMode;
use crate::error::{Result, TricapError};
use crate::experiments::{CoupledSetup, HexagonSetup, InitialShape, LensSetup, MarangoniSetup};
use crate::flow::FluidParams;
use crate::grid::Point;
use crate::sharp::Junction1DConfig;
use crate::surfactant::{DirichletSchedule, QEdge};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    HexagonDiffusion,
    LensAngles,
    Marangoni,
    Reference1d,
    Young,
    Custom,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::HexagonDiffusion,
        Experiment::LensAngles,
        Experiment::Marangoni,
        Experiment::Reference1d,
        Experiment::Young,
        Experiment::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::HexagonDiffusion => "hexagon-diffusion",
            Experiment::LensAngles => "lens-angles",
            Experiment::Marangoni => "marangoni",
            Experiment::Reference1d => "reference-1d",
            Experiment::Young => "young",
            Experiment::Custom => "custom",
        }
    }

    fn needs_epsilon(self) -> bool {
        !matches!(self, Experiment::Reference1d | Experiment::Young)
    }
}

impl FromStr for Experiment {
    type Err = TricapError;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| TricapError::Parse(format!("unknown experiment {s:?}")))
    }
}

/// Initial arrangement for custom runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialKind {
    Lens,
    Wedge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeometryConfig {
    /// Lens radius.
    pub radius: f64,
    /// `x0, x1, y0, y1` of the box (custom runs).
    pub bounds: [f64; 4],
    pub initial: InitialKind,
    pub center: Point,
    /// Directions of the interfaces (1,2), (1,3), (2,3) in degrees.
    pub rays_deg: [f64; 3],
    pub junction_hint: Option<Point>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhysicsConfig {
    pub epsilon: Vec<f64>,
    pub lambda: f64,
    pub c_reg: f64,
    pub m_c: f64,
    pub sigma0: f64,
    /// Pairs (1,2), (1,3), (2,3).
    pub beta_pair: [f64; 3],
    pub beta_bulk: [f64; 3],
    pub m_bulk: [f64; 3],
    pub m_surf: [f64; 3],
    pub sbar: SbarMode,
    pub rho: [f64; 3],
    pub eta: [f64; 3],
    /// Tensions (1,2), (1,3), (2,3) for Young's law.
    pub tensions: Option<[f64; 3]>,
}

/// Surfactant boundary data.
#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleConfig {
    pub t0: f64,
    pub tq: f64,
    pub q_bdry: f64,
    /// South, east, north, west (custom runs).
    pub edges: [QEdge; 4],
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericsConfig {
    pub h_over_epsilon: f64,
    pub dt: Option<f64>,
    pub dt_q: f64,
    pub t_end: f64,
    pub stabilization: f64,
    pub stationarity_tol: f64,
    pub max_relax_steps: usize,
    pub relax_time: f64,
    pub samples: usize,
    pub reference_n: usize,
    pub reference_dt: f64,
    pub record_every: f64,
    pub flow: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub snapshot_every: usize,
    pub vtk: bool,
    /// Precomputed reference `(s, q)` CSV for hexagon runs.
    pub reference: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub geometry: GeometryConfig,
    pub physics: PhysicsConfig,
    pub schedule: ScheduleConfig,
    pub numerics: NumericsConfig,
    pub output: OutputConfig,
}

const KEYS: &[&str] = &[
    "experiment",
    "geometry.radius",
    "geometry.bounds",
    "geometry.initial",
    "geometry.center",
    "geometry.rays",
    "geometry.junction_hint",
    "physics.epsilon",
    "physics.lambda",
    "physics.c_reg",
    "physics.m_c",
    "physics.sigma0",
    "physics.beta_pair",
    "physics.beta_bulk",
    "physics.m_bulk",
    "physics.m_surf",
    "physics.sbar",
    "physics.rho",
    "physics.eta",
    "physics.tensions",
    "schedule.t0",
    "schedule.tq",
    "schedule.q_bdry",
    "schedule.south",
    "schedule.east",
    "schedule.north",
    "schedule.west",
    "numerics.h_over_epsilon",
    "numerics.dt",
    "numerics.dt_q",
    "numerics.t_end",
    "numerics.stabilization",
    "numerics.stationarity_tol",
    "numerics.max_relax_steps",
    "numerics.relax_time",
    "numerics.samples",
    "numerics.reference_n",
    "numerics.reference_dt",
    "numerics.record_every",
    "numerics.flow",
    "output.directory",
    "output.snapshot_every",
    "output.vtk",
    "output.reference",
];

fn perr(line: usize, message: impl Into<String>) -> TricapError {
    TricapError::Config { line, message: message.into() }
}

fn parse_num(line: usize, key: &str, v: &str) -> Result<f64> {
    let v = v.trim();
    match v {
        "pi" => return Ok(PI),
        "sqrt3" => return Ok(3f64.sqrt()),
        _ => {}
    }
    v.parse::<f64>().map_err(|_| perr(line, format!("{key}: not a number: {v:?}")))
}

fn parse_list(line: usize, key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|x| parse_num(line, key, x)).collect()
}

fn parse_fixed<const N: usize>(line: usize, key: &str, v: &str) -> Result<[f64; N]> {
    let l = parse_list(line, key, v)?;
    l.try_into().map_err(|l: Vec<f64>| perr(line, format!("{key}: expected {N} values, got {}", l.len())))
}

/// One value broadcast to all three entries, or three values.
fn parse_triple(line: usize, key: &str, v: &str) -> Result<[f64; 3]> {
    let l = parse_list(line, key, v)?;
    match l.len() {
        1 => Ok([l[0]; 3]),
        3 => Ok([l[0], l[1], l[2]]),
        n => Err(perr(line, format!("{key}: expected 1 or 3 values, got {n}"))),
    }
}

fn parse_usize(line: usize, key: &str, v: &str) -> Result<usize> {
    v.trim().parse().map_err(|_| perr(line, format!("{key}: not a non-negative integer: {v:?}")))
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => Err(perr(line, format!("{key}: not a boolean: {other:?}"))),
    }
}

/// `neumann`, `const <v>` or `ramp <t0> <t1> <v>`.
fn parse_edge(line: usize, key: &str, v: &str) -> Result<QEdge> {
    let w: Vec<&str> = v.split_whitespace().collect();
    match w.as_slice() {
        ["neumann"] => Ok(QEdge::Neumann),
        ["const", x] => Ok(QEdge::Dirichlet(DirichletSchedule::constant(parse_num(line, key, x)?))),
        ["ramp", a, b, x] => {
            let (a, b, x) = (parse_num(line, key, a)?, parse_num(line, key, b)?, parse_num(line, key, x)?);
            if !(b > a) {
                return Err(perr(line, format!("{key}: ramp needs t0 < t1")));
            }
            Ok(QEdge::Dirichlet(DirichletSchedule::ramp(a, b, x)))
        }
        _ => Err(perr(line, format!("{key}: expected `neumann`, `const <v>` or `ramp <t0> <t1> <v>`, got {v:?}"))),
    }
}

fn fmt_edge(e: &QEdge) -> String {
    match e {
        QEdge::Neumann => "neumann".into(),
        QEdge::Dirichlet(s) => match s.knots.as_slice() {
            [(_, v)] => format!("const {v}"),
            [(a, 0.0), (b, v)] => format!("ramp {a} {b} {v}"),
            _ => format!("const {}", s.eval(f64::INFINITY)),
        },
    }
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(", ")
}

impl ExperimentConfig {
    /// Defaults of an experiment; `epsilon` stays empty.
    pub fn preset(experiment: Experiment) -> Self {
        let lens = LensSetup::new(0.1);
        let mar = MarangoniSetup::new(0.2);
        let hex = HexagonSetup::new(0.1);
        let mut cfg = ExperimentConfig {
            experiment,
            geometry: GeometryConfig {
                radius: lens.radius,
                bounds: [0.0, 2.0, -2.0, 2.0],
                initial: InitialKind::Lens,
                center: [0.0, 0.0],
                rays_deg: [30.0, -90.0, 150.0],
                junction_hint: None,
            },
            physics: PhysicsConfig {
                epsilon: Vec::new(),
                lambda: 0.1,
                c_reg: 0.001,
                m_c: lens.m_c,
                sigma0: lens.sigma0,
                beta_pair: lens.beta_pair,
                beta_bulk: lens.beta_bulk,
                m_bulk: lens.m_bulk,
                m_surf: lens.m_surf,
                sbar: SbarMode::Harmonic,
                rho: [1.0; 3],
                eta: [1.0; 3],
                tensions: None,
            },
            schedule: ScheduleConfig {
                t0: lens.t0,
                tq: lens.tq,
                q_bdry: lens.q_bdry,
                edges: [QEdge::Neumann, QEdge::Neumann, QEdge::Neumann, QEdge::Neumann],
            },
            numerics: NumericsConfig {
                h_over_epsilon: 0.25,
                dt: None,
                dt_q: hex.dt_q,
                t_end: lens.t_end,
                stabilization: 8.0,
                stationarity_tol: hex.stationarity_tol,
                max_relax_steps: hex.max_relax_steps,
                relax_time: hex.relax_time,
                samples: hex.n_samples,
                reference_n: hex.reference_n,
                reference_dt: hex.reference_dt,
                record_every: lens.record_every,
                flow: false,
            },
            output: OutputConfig { directory: PathBuf::from("out"), snapshot_every: 0, vtk: true, reference: None },
        };
        match experiment {
            Experiment::HexagonDiffusion | Experiment::Reference1d => {
                cfg.physics.m_c = hex.m_c;
                cfg.physics.sigma0 = 1.0;
                cfg.physics.beta_pair = [hex.beta_12, hex.beta_13, 1.0];
                cfg.physics.m_surf = [hex.m_12, hex.m_13, 0.0];
                cfg.physics.m_bulk = [0.0; 3];
                cfg.schedule.t0 = 0.0;
                cfg.schedule.tq = 1e-4;
                cfg.schedule.q_bdry = 0.5;
                cfg.numerics.t_end = hex.t_end;
            }
            Experiment::Marangoni => {
                cfg.geometry.radius = mar.radius;
                cfg.geometry.bounds = [-2.0, 4.0, -2.0, 2.0];
                cfg.physics.m_c = mar.m_c;
                cfg.physics.sigma0 = mar.sigma0;
                cfg.physics.beta_pair = mar.beta_pair;
                cfg.physics.beta_bulk = mar.beta_bulk;
                cfg.physics.m_bulk = mar.m_bulk;
                cfg.physics.m_surf = mar.m_surf;
                cfg.physics.rho = [mar.fluid.rho[0]; 3];
                cfg.physics.eta = [mar.fluid.eta[0]; 3];
                cfg.schedule.t0 = mar.t0;
                cfg.schedule.tq = mar.tq;
                cfg.schedule.q_bdry = mar.q_bdry;
                cfg.numerics.t_end = mar.t_end;
                cfg.numerics.record_every = mar.record_every;
                cfg.numerics.flow = true;
            }
            Experiment::Custom => {
                cfg.geometry.junction_hint = Some([lens.radius, 0.0]);
            }
            Experiment::LensAngles | Experiment::Young => {}
        }
        cfg
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = body.split_once('=').ok_or_else(|| perr(line, format!("expected `key = value`, got {body:?}")))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(perr(line, format!("unknown key {k:?}")));
            }
            if v.is_empty() {
                return Err(perr(line, format!("{k}: missing value")));
            }
            if entries.insert(k, (line, v)).is_some() {
                return Err(perr(line, format!("duplicate key {k:?}")));
            }
        }
        let (eline, ename) = entries.remove("experiment").ok_or_else(|| perr(0, "missing required key `experiment`"))?;
        let experiment: Experiment = ename.parse().map_err(|_| perr(eline, format!("unknown experiment {ename:?}")))?;
        let mut cfg = Self::preset(experiment);
        for (key, (line, v)) in entries {
            cfg.set(line, key, v)?;
        }
        if experiment.needs_epsilon() && cfg.physics.epsilon.is_empty() {
            return Err(perr(0, "missing required key `physics.epsilon`"));
        }
        if experiment == Experiment::Young && cfg.physics.tensions.is_none() {
            return Err(perr(0, "missing required key `physics.tensions`"));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, line: usize, key: &str, v: &str) -> Result<()> {
        let (g, p, s, n, o) = (&mut self.geometry, &mut self.physics, &mut self.schedule, &mut self.numerics, &mut self.output);
        match key {
            "geometry.radius" => g.radius = parse_num(line, key, v)?,
            "geometry.bounds" => g.bounds = parse_fixed(line, key, v)?,
            "geometry.initial" => {
                g.initial = match v {
                    "lens" => InitialKind::Lens,
                    "wedge" => InitialKind::Wedge,
                    _ => return Err(perr(line, format!("{key}: expected `lens` or `wedge`"))),
                }
            }
            "geometry.center" => g.center = parse_fixed(line, key, v)?,
            "geometry.rays" => g.rays_deg = parse_fixed(line, key, v)?,
            "geometry.junction_hint" => {
                g.junction_hint = if v == "none" { None } else { Some(parse_fixed(line, key, v)?) };
            }
            "physics.epsilon" => p.epsilon = parse_list(line, key, v)?,
            "physics.lambda" => p.lambda = parse_num(line, key, v)?,
            "physics.c_reg" => p.c_reg = parse_num(line, key, v)?,
            "physics.m_c" => p.m_c = parse_num(line, key, v)?,
            "physics.sigma0" => p.sigma0 = parse_num(line, key, v)?,
            "physics.beta_pair" => p.beta_pair = parse_triple(line, key, v)?,
            "physics.beta_bulk" => p.beta_bulk = parse_triple(line, key, v)?,
            "physics.m_bulk" => p.m_bulk = parse_triple(line, key, v)?,
            "physics.m_surf" => p.m_surf = parse_triple(line, key, v)?,
            "physics.sbar" => {
                p.sbar = match v {
                    "harmonic" => SbarMode::Harmonic,
                    "literal" => SbarMode::Literal,
                    _ => return Err(perr(line, format!("{key}: expected `harmonic` or `literal`"))),
                }
            }
            "physics.rho" => p.rho = parse_triple(line, key, v)?,
            "physics.eta" => p.eta = parse_triple(line, key, v)?,
            "physics.tensions" => p.tensions = Some(parse_fixed(line, key, v)?),
            "schedule.t0" => s.t0 = parse_num(line, key, v)?,
            "schedule.tq" => s.tq = parse_num(line, key, v)?,
            "schedule.q_bdry" => s.q_bdry = parse_num(line, key, v)?,
            "schedule.south" => s.edges[0] = parse_edge(line, key, v)?,
            "schedule.east" => s.edges[1] = parse_edge(line, key, v)?,
            "schedule.north" => s.edges[2] = parse_edge(line, key, v)?,
            "schedule.west" => s.edges[3] = parse_edge(line, key, v)?,
            "numerics.h_over_epsilon" => n.h_over_epsilon = parse_num(line, key, v)?,
            "numerics.dt" => n.dt = if v == "auto" { None } else { Some(parse_num(line, key, v)?) },
            "numerics.dt_q" => n.dt_q = parse_num(line, key, v)?,
            "numerics.t_end" => n.t_end = parse_num(line, key, v)?,
            "numerics.stabilization" => n.stabilization = parse_num(line, key, v)?,
            "numerics.stationarity_tol" => n.stationarity_tol = parse_num(line, key, v)?,
            "numerics.max_relax_steps" => n.max_relax_steps = parse_usize(line, key, v)?,
            "numerics.relax_time" => n.relax_time = parse_num(line, key, v)?,
            "numerics.samples" => n.samples = parse_usize(line, key, v)?,
            "numerics.reference_n" => n.reference_n = parse_usize(line, key, v)?,
            "numerics.reference_dt" => n.reference_dt = parse_num(line, key, v)?,
            "numerics.record_every" => n.record_every = parse_num(line, key, v)?,
            "numerics.flow" => n.flow = parse_bool(line, key, v)?,
            "output.directory" => o.directory = PathBuf::from(v),
            "output.snapshot_every" => o.snapshot_every = parse_usize(line, key, v)?,
            "output.vtk" => o.vtk = parse_bool(line, key, v)?,
            "output.reference" => o.reference = if v == "none" { None } else { Some(PathBuf::from(v)) },
            _ => return Err(perr(line, format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(TricapError::InvalidParameter(m));
        let pos = |name: &str, v: f64| -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                bad(format!("{name} must be positive, got {v}"))
            }
        };
        let nonneg = |name: &str, v: f64| -> Result<()> {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                bad(format!("{name} must be non-negative, got {v}"))
            }
        };
        let (p, n) = (&self.physics, &self.numerics);
        for &e in &p.epsilon {
            pos("physics.epsilon", e)?;
        }
        if self.experiment == Experiment::Young {
            for t in p.tensions.iter().flatten() {
                pos("physics.tensions", *t)?;
            }
            return Ok(());
        }
        nonneg("physics.lambda", p.lambda)?;
        nonneg("physics.c_reg", p.c_reg)?;
        pos("physics.m_c", p.m_c)?;
        pos("physics.sigma0", p.sigma0)?;
        for k in 0..3 {
            pos("physics.beta_pair", p.beta_pair[k])?;
            pos("physics.beta_bulk", p.beta_bulk[k])?;
            nonneg("physics.m_bulk", p.m_bulk[k])?;
            nonneg("physics.m_surf", p.m_surf[k])?;
            pos("physics.rho", p.rho[k])?;
            pos("physics.eta", p.eta[k])?;
        }
        pos("geometry.radius", self.geometry.radius)?;
        nonneg("schedule.t0", self.schedule.t0)?;
        pos("schedule.tq", self.schedule.tq)?;
        pos("numerics.h_over_epsilon", n.h_over_epsilon)?;
        if let Some(dt) = n.dt {
            pos("numerics.dt", dt)?;
        }
        pos("numerics.dt_q", n.dt_q)?;
        pos("numerics.t_end", n.t_end)?;
        nonneg("numerics.stabilization", n.stabilization)?;
        pos("numerics.stationarity_tol", n.stationarity_tol)?;
        pos("numerics.relax_time", n.relax_time)?;
        pos("numerics.reference_dt", n.reference_dt)?;
        pos("numerics.record_every", n.record_every)?;
        if n.samples < 2 || n.reference_n < 2 {
            return bad("numerics.samples and numerics.reference_n must be at least 2".into());
        }
        let [x0, x1, y0, y1] = self.geometry.bounds;
        if !(x1 > x0 && y1 > y0) {
            return bad(format!("geometry.bounds describe an empty box: {:?}", self.geometry.bounds));
        }
        Ok(())
    }

    /// The fully resolved configuration in the input format.
    pub fn manifest(&self) -> String {
        let (g, p, s, n, o) = (&self.geometry, &self.physics, &self.schedule, &self.numerics, &self.output);
        let mut t = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(t, "{k} = {v}");
        };
        kv("experiment", self.experiment.name().into());
        kv("geometry.radius", format!("{}", g.radius));
        kv("geometry.bounds", fmt_list(&g.bounds));
        kv("geometry.initial", if g.initial == InitialKind::Lens { "lens" } else { "wedge" }.into());
        kv("geometry.center", fmt_list(&g.center));
        kv("geometry.rays", fmt_list(&g.rays_deg));
        kv("geometry.junction_hint", g.junction_hint.map_or("none".into(), |h| fmt_list(&h)));
        if !p.epsilon.is_empty() {
            kv("physics.epsilon", fmt_list(&p.epsilon));
        }
        kv("physics.lambda", format!("{}", p.lambda));
        kv("physics.c_reg", format!("{}", p.c_reg));
        kv("physics.m_c", format!("{}", p.m_c));
        kv("physics.sigma0", format!("{}", p.sigma0));
        kv("physics.beta_pair", fmt_list(&p.beta_pair));
        kv("physics.beta_bulk", fmt_list(&p.beta_bulk));
        kv("physics.m_bulk", fmt_list(&p.m_bulk));
        kv("physics.m_surf", fmt_list(&p.m_surf));
        kv("physics.sbar", if p.sbar == SbarMode::Harmonic { "harmonic" } else { "literal" }.into());
        kv("physics.rho", fmt_list(&p.rho));
        kv("physics.eta", fmt_list(&p.eta));
        if let Some(ts) = p.tensions {
            kv("physics.tensions", fmt_list(&ts));
        }
        kv("schedule.t0", format!("{}", s.t0));
        kv("schedule.tq", format!("{}", s.tq));
        kv("schedule.q_bdry", format!("{}", s.q_bdry));
        for (k, e) in ["south", "east", "north", "west"].iter().zip(&s.edges) {
            kv(&format!("schedule.{k}"), fmt_edge(e));
        }
        kv("numerics.h_over_epsilon", format!("{}", n.h_over_epsilon));
        kv("numerics.dt", n.dt.map_or("auto".into(), |d| format!("{d}")));
        kv("numerics.dt_q", format!("{}", n.dt_q));
        kv("numerics.t_end", format!("{}", n.t_end));
        kv("numerics.stabilization", format!("{}", n.stabilization));
        kv("numerics.stationarity_tol", format!("{}", n.stationarity_tol));
        kv("numerics.max_relax_steps", format!("{}", n.max_relax_steps));
        kv("numerics.relax_time", format!("{}", n.relax_time));
        kv("numerics.samples", format!("{}", n.samples));
        kv("numerics.reference_n", format!("{}", n.reference_n));
        kv("numerics.reference_dt", format!("{}", n.reference_dt));
        kv("numerics.record_every", format!("{}", n.record_every));
        kv("numerics.flow", format!("{}", n.flow));
        kv("output.directory", o.directory.display().to_string());
        kv("output.snapshot_every", format!("{}", o.snapshot_every));
        kv("output.vtk", format!("{}", o.vtk));
        kv("output.reference", o.reference.as_ref().map_or("none".into(), |r| r.display().to_string()));
        t
    }

    fn h(&self, eps: f64) -> f64 {
        self.numerics.h_over_epsilon * eps
    }

    pub fn hexagon_setup(&self, eps: f64) -> HexagonSetup {
        let (p, n, s) = (&self.physics, &self.numerics, &self.schedule);
        HexagonSetup {
            epsilon: eps,
            h: self.h(eps),
            lambda_cap: p.lambda,
            c_reg: p.c_reg,
            m_c: p.m_c,
            dt_ch: n.dt,
            stabilization: n.stabilization,
            stationarity_tol: n.stationarity_tol,
            max_relax_steps: n.max_relax_steps,
            relax_time: n.relax_time,
            beta_12: p.beta_pair[0],
            beta_13: p.beta_pair[1],
            m_12: p.m_surf[0],
            m_13: p.m_surf[1],
            schedule: DirichletSchedule::ramp(s.t0, s.t0 + s.tq, s.q_bdry),
            t_end: n.t_end,
            dt_q: n.dt_q,
            n_samples: n.samples,
            reference_n: n.reference_n,
            reference_dt: n.reference_dt,
        }
    }

    /// The one-dimensional junction problem of the hexagon setting.
    pub fn reference_config(&self) -> Junction1DConfig {
        self.hexagon_setup(1.0).reference_config()
    }

    pub fn lens_setup(&self, eps: f64) -> LensSetup {
        let (g, p, n, s) = (&self.geometry, &self.physics, &self.numerics, &self.schedule);
        LensSetup {
            epsilon: eps,
            h: self.h(eps),
            radius: g.radius,
            t_end: n.t_end,
            t0: s.t0,
            tq: s.tq,
            q_bdry: s.q_bdry,
            m_c: p.m_c,
            lambda_cap: p.lambda,
            c_reg: p.c_reg,
            sigma0: p.sigma0,
            beta_pair: p.beta_pair,
            beta_bulk: p.beta_bulk,
            m_bulk: p.m_bulk,
            m_surf: p.m_surf,
            sbar: p.sbar,
            dt: n.dt,
            stabilization: n.stabilization,
            record_every: n.record_every,
        }
    }

    pub fn fluid(&self) -> FluidParams {
        FluidParams { rho: self.physics.rho, eta: self.physics.eta }
    }

    pub fn marangoni_setup(&self, eps: f64) -> MarangoniSetup {
        let (g, p, n, s) = (&self.geometry, &self.physics, &self.numerics, &self.schedule);
        MarangoniSetup {
            epsilon: eps,
            h: self.h(eps),
            radius: g.radius,
            t_end: n.t_end,
            t0: s.t0,
            tq: s.tq,
            q_bdry: s.q_bdry,
            m_c: p.m_c,
            lambda_cap: p.lambda,
            c_reg: p.c_reg,
            sigma0: p.sigma0,
            beta_pair: p.beta_pair,
            beta_bulk: p.beta_bulk,
            m_bulk: p.m_bulk,
            m_surf: p.m_surf,
            fluid: self.fluid(),
            dt: n.dt,
            stabilization: n.stabilization,
            record_every: n.record_every,
        }
    }

    pub fn custom_setup(&self, eps: f64) -> CoupledSetup {
        let (g, p, n, s) = (&self.geometry, &self.physics, &self.numerics, &self.schedule);
        let initial = match g.initial {
            InitialKind::Lens => InitialShape::Lens { center: g.center, radius: g.radius },
            InitialKind::Wedge => InitialShape::Wedge { apex: g.center, rays: g.rays_deg.map(f64::to_radians) },
        };
        CoupledSetup {
            epsilon: eps,
            h: self.h(eps),
            bounds: g.bounds,
            initial,
            t_end: n.t_end,
            m_c: p.m_c,
            lambda_cap: p.lambda,
            c_reg: p.c_reg,
            sigma0: p.sigma0,
            beta_pair: p.beta_pair,
            beta_bulk: p.beta_bulk,
            sbar: p.sbar,
            m_bulk: p.m_bulk,
            m_surf: p.m_surf,
            edges: s.edges.to_vec(),
            fluid: n.flow.then(|| self.fluid()),
            dt: n.dt,
            stabilization: n.stabilization,
            record_every: n.record_every,
            junction_hint: g.junction_hint,
            measure_angles: g.junction_hint.is_some(),
        }
    }
}
