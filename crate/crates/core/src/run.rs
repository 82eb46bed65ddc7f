//! Runs a configured experiment and writes its artifacts: a `manifest`
//! with the resolved configuration, CSV series, VTK snapshots and a
//! plain-text `summary`.

use std::fs;
use std::path::{Path, PathBuf};

use crate::config::{Experiment, ExperimentConfig};
use crate::diagnostics::{eoc, SampleSeries};
use crate::error::{Result, TricapError};
use crate::experiments::{
    angle_deviation, run_coupled, run_hexagon, run_lens, run_marangoni, CoupledResult, Monitor, RunControl, Snapshot,
};
use crate::flow::cell_velocity;
use crate::io::{read_csv, write_csv, write_vtk, Series, VtkImage};
use crate::sharp::{solve_junction_1d, young_angles, Junction1DSolution};

/// Writes VTK snapshots and forwards log lines.
pub struct FileMonitor<'a> {
    dir: PathBuf,
    tag: String,
    vtk: bool,
    log: &'a mut dyn FnMut(&str),
}

impl Monitor for FileMonitor<'_> {
    fn snapshot(&mut self, s: &Snapshot<'_>) -> Result<()> {
        if self.vtk {
            let img = VtkImage::from_state(s.domain, s.time, s.phi, s.q);
            write_vtk(self.dir.join(format!("{}_{}_{:07}.vtk", s.stage, self.tag, s.step)), &img)?;
        }
        Ok(())
    }

    fn log(&mut self, message: &str) {
        (self.log)(&format!("[{}] {message}", self.tag));
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunSummary {
    pub lines: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl RunSummary {
    fn line(&mut self, s: String) {
        self.lines.push(s);
    }
}

struct Out<'a> {
    dir: &'a Path,
    summary: RunSummary,
}

impl Out<'_> {
    fn csv(&mut self, name: &str, s: &Series) -> Result<()> {
        let p = self.dir.join(name);
        write_csv(&p, s)?;
        self.summary.files.push(p);
        Ok(())
    }

    fn vtk(&mut self, name: &str, img: &VtkImage) -> Result<()> {
        let p = self.dir.join(name);
        write_vtk(&p, img)?;
        self.summary.files.push(p);
        Ok(())
    }

    fn text(&mut self, name: &str, t: &str) -> Result<()> {
        let p = self.dir.join(name);
        fs::write(&p, t)?;
        self.summary.files.push(p);
        Ok(())
    }
}

/// Executes `cfg`, writing into `dir` (created if needed). The snapshot
/// cadence of `control` overrides `output.snapshot_every` when set.
pub fn run_experiment(cfg: &ExperimentConfig, control: RunControl, dir: &Path, log: &mut dyn FnMut(&str)) -> Result<RunSummary> {
    cfg.validate()?;
    fs::create_dir_all(dir)?;
    let control = RunControl {
        snapshot_every: control.snapshot_every.or((cfg.output.snapshot_every > 0).then_some(cfg.output.snapshot_every)),
        ..control
    };
    let mut out = Out { dir, summary: RunSummary::default() };
    out.text("manifest", &cfg.manifest())?;
    match cfg.experiment {
        Experiment::Young => young(cfg, &mut out)?,
        Experiment::Reference1d => reference(cfg, &mut out)?,
        Experiment::HexagonDiffusion => hexagon(cfg, control, &mut out, log)?,
        Experiment::LensAngles | Experiment::Marangoni | Experiment::Custom => coupled(cfg, control, &mut out, log)?,
    }
    let text = out.summary.lines.join("\n") + "\n";
    out.text("summary", &text)?;
    Ok(out.summary)
}

fn young(cfg: &ExperimentConfig, out: &mut Out<'_>) -> Result<()> {
    let t = cfg.physics.tensions.ok_or_else(|| TricapError::InvalidParameter("young needs physics.tensions".into()))?;
    let psi = young_angles(t[0], t[1], t[2])?;
    let deg = psi.map(f64::to_degrees);
    let mut s = Series::new(["phase", "angle_rad", "angle_deg"]);
    for k in 0..3 {
        s.push(vec![(k + 1) as f64, psi[k], deg[k]])?;
    }
    out.csv("angles.csv", &s)?;
    out.summary.line(format!("{:.3}, {:.3}, {:.3} degrees", deg[0], deg[1], deg[2]));
    Ok(())
}

fn reference_series(sol: &Junction1DSolution) -> Result<Series> {
    let mut s = Series::new(["s", "q"]);
    for (a, b) in sol.s.iter().zip(&sol.q) {
        s.push(vec![*a, *b])?;
    }
    Ok(s)
}

fn reference(cfg: &ExperimentConfig, out: &mut Out<'_>) -> Result<()> {
    let sol = solve_junction_1d(&cfg.reference_config(), cfg.numerics.t_end)?;
    out.csv("reference.csv", &reference_series(&sol)?)?;
    out.summary.line(format!("t = {}, q(L) = {:.6}", sol.time, sol.q_end()));
    out.summary.line(format!("steps = {}, max junction flux residual = {:.3e}", sol.steps, sol.max_flux_residual));
    Ok(())
}

fn load_reference(path: &Path) -> Result<Junction1DSolution> {
    let s = read_csv(path)?;
    let (sv, qv) = match (s.column("s"), s.column("q")) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(TricapError::Parse(format!("{} needs columns s and q", path.display()))),
    };
    SampleSeries::new(sv.clone(), qv.clone())?;
    Ok(Junction1DSolution { s: sv, q: qv, time: f64::NAN, steps: 0, max_flux_residual: f64::NAN })
}

fn rate_rows(eps: &[f64], cols: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let rates = cols
        .iter()
        .map(|c| eoc(&eps.iter().copied().zip(c.iter().copied()).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..eps.len().saturating_sub(1))
        .map(|i| {
            let mut row = vec![eps[i], eps[i + 1]];
            row.extend(rates.iter().map(|r| r[i]));
            row
        })
        .collect())
}

fn hexagon(cfg: &ExperimentConfig, control: RunControl, out: &mut Out<'_>, log: &mut dyn FnMut(&str)) -> Result<()> {
    let reference = match &cfg.output.reference {
        Some(p) => load_reference(p)?,
        None => {
            let r = solve_junction_1d(&cfg.reference_config(), cfg.numerics.t_end)?;
            out.csv("reference.csv", &reference_series(&r)?)?;
            r
        }
    };
    out.summary.line(format!("reference q(L) = {:.6}", reference.q.last().copied().unwrap_or(f64::NAN)));
    let mut errors = Series::new(["epsilon", "q_far", "linf", "l2", "relax_steps", "relax_converged"]);
    for (i, &eps) in cfg.physics.epsilon.iter().enumerate() {
        let setup = cfg.hexagon_setup(eps);
        let mut mon = FileMonitor { dir: out.dir.to_path_buf(), tag: format!("eps{i}"), vtk: cfg.output.vtk, log: &mut *log };
        let r = run_hexagon(&setup, Some(&reference), &control, &mut mon)?;
        let mut s = Series::new(["s", "q", "q_ref"]);
        for k in 0..r.samples.s.len() {
            s.push(vec![r.samples.s[k], r.samples.q[k], r.reference[k]])?;
        }
        out.csv(&format!("samples_eps{i}.csv"), &s)?;
        if cfg.output.vtk {
            out.vtk(&format!("final_eps{i}.vtk"), &VtkImage::from_state(&r.domain, setup.t_end, &r.phi, Some(&r.q)))?;
        }
        errors.push(vec![eps, r.q_far, r.linf, r.l2, r.relax_steps as f64, f64::from(u8::from(r.relax_converged))])?;
        out.summary.line(format!(
            "epsilon = {eps}: q(L) = {:.6}, linf = {:.6}, l2 = {:.6}, relaxation steps = {} (stationary: {})",
            r.q_far, r.linf, r.l2, r.relax_steps, r.relax_converged
        ));
    }
    out.csv("errors.csv", &errors)?;
    let eps = &cfg.physics.epsilon;
    if eps.len() >= 2 {
        let cols = [errors.column("linf").unwrap_or_default(), errors.column("l2").unwrap_or_default()];
        let mut t = Series::new(["epsilon_1", "epsilon_2", "linf_eoc", "l2_eoc"]);
        for row in rate_rows(eps, &cols)? {
            out.summary.line(format!("EOC({}, {}): linf {:.4}, l2 {:.4}", row[0], row[1], row[2], row[3]));
            t.push(row)?;
        }
        out.csv("eoc.csv", &t)?;
    }
    Ok(())
}

fn timeseries(r: &CoupledResult) -> Result<Series> {
    let mut s = Series::new([
        "time",
        "energy",
        "mass1",
        "mass2",
        "mass3",
        "surfactant",
        "junction_x",
        "junction_y",
        "psi_a1",
        "psi_a2",
        "psi_a3",
        "psi_u1",
        "psi_u2",
        "psi_u3",
        "velocity_l2",
        "kinetic",
        "max_divergence",
        "centroid_x",
    ]);
    for rec in &r.records {
        let j = rec.junction.unwrap_or([f64::NAN; 2]);
        let a = rec.anchored.unwrap_or([f64::NAN; 3]);
        let u = rec.unanchored.unwrap_or([f64::NAN; 3]);
        let mut row = vec![rec.time, rec.energy, rec.masses[0], rec.masses[1], rec.masses[2], rec.surfactant, j[0], j[1]];
        row.extend(a);
        row.extend(u);
        row.extend([rec.velocity_l2, rec.kinetic, rec.max_divergence, rec.centroid_x]);
        s.push(row)?;
    }
    Ok(s)
}

fn coupled(cfg: &ExperimentConfig, control: RunControl, out: &mut Out<'_>, log: &mut dyn FnMut(&str)) -> Result<()> {
    let target = match cfg.experiment {
        Experiment::LensAngles => Some(cfg.lens_setup(1.0).target_angles()?),
        _ => None,
    };
    if let Some(t) = target {
        out.summary.line(format!("sharp-interface angles: {:.5}, {:.5}, {:.5}", t[0], t[1], t[2]));
    }
    let mut table = Series::new(["epsilon", "psi_a1", "psi_a2", "psi_a3", "psi_u1", "psi_u2", "psi_u3", "dev_a", "dev_u"]);
    for (i, &eps) in cfg.physics.epsilon.iter().enumerate() {
        let mut mon = FileMonitor { dir: out.dir.to_path_buf(), tag: format!("eps{i}"), vtk: cfg.output.vtk, log: &mut *log };
        let r = match cfg.experiment {
            Experiment::LensAngles => run_lens(&cfg.lens_setup(eps), &control, &mut mon)?,
            Experiment::Marangoni => run_marangoni(&cfg.marangoni_setup(eps), &control, &mut mon)?,
            _ => run_coupled(&cfg.custom_setup(eps), &control, &mut mon)?,
        };
        out.csv(&format!("timeseries_eps{i}.csv"), &timeseries(&r)?)?;
        if cfg.output.vtk {
            let mut img = VtkImage::from_state(&r.domain, r.state.time, &r.state.phi, Some(&r.q));
            if let Some(f) = &r.flow {
                let (u, v) = cell_velocity(&r.domain, &f.vel);
                img.add("u", u)?;
                img.add("v", v)?;
                img.add("p", f.p.values.clone())?;
            }
            out.vtk(&format!("final_eps{i}.vtk"), &img)?;
        }
        let last = r.records.last();
        out.summary.line(format!("epsilon = {eps}: {} steps to t = {}", r.steps, r.state.time));
        if let Some(m) = &r.final_angles {
            let (a, u) = (m.psi_anchored, m.psi_unanchored);
            let (da, du) = match target {
                Some(t) => (l2_dev(&a, &t), l2_dev(&u, &t)),
                None => (f64::NAN, f64::NAN),
            };
            out.summary.line(format!(
                "  anchored {:.5}, {:.5}, {:.5}; unanchored {:.5}, {:.5}, {:.5}; junction ({:.4}, {:.4})",
                a[0], a[1], a[2], u[0], u[1], u[2], m.junction[0], m.junction[1]
            ));
            if let Some(t) = target {
                out.summary.line(format!("  max deviation anchored {:.5}, unanchored {:.5}", angle_deviation(&a, &t), angle_deviation(&u, &t)));
            }
            table.push(vec![eps, a[0], a[1], a[2], u[0], u[1], u[2], da, du])?;
        }
        if let Some(rec) = last {
            if r.flow.is_some() {
                out.summary.line(format!(
                    "  velocity L2 = {:.5e}, max divergence = {:.3e}, phase-3 centroid x = {:.5}",
                    rec.velocity_l2, r.max_divergence, rec.centroid_x
                ));
            }
        }
    }
    if !table.is_empty() {
        out.csv("angles.csv", &table)?;
        let eps: Vec<f64> = table.column("epsilon").unwrap_or_default();
        let dev = [table.column("dev_a").unwrap_or_default(), table.column("dev_u").unwrap_or_default()];
        if target.is_some() && eps.len() >= 2 && dev.iter().flatten().all(|d| *d > 0.0) {
            let mut t = Series::new(["epsilon_1", "epsilon_2", "anchored_eoc", "unanchored_eoc"]);
            for row in rate_rows(&eps, &dev)? {
                out.summary.line(format!("EOC({:.5}, {:.5}): anchored {:.4}, unanchored {:.4}", row[0], row[1], row[2], row[3]));
                t.push(row)?;
            }
            out.csv("eoc.csv", &t)?;
        }
    }
    Ok(())
}

/// Euclidean distance of two angle triples.
pub fn l2_dev(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (0..3).map(|k| (a[k] - b[k]).powi(2)).sum::<f64>().sqrt()
}

/// Reads CSV tables with an `epsilon` column, merges their rows and
/// returns the rates of every other column between consecutive `epsilon`
/// in decreasing order.
pub fn eoc_table(tables: &[Series]) -> Result<Series> {
    let first = tables.first().ok_or_else(|| TricapError::InvalidParameter("no tables given".into()))?;
    let cols: Vec<String> = first.header.iter().filter(|h| *h != "epsilon").cloned().collect();
    let mut rows: Vec<(f64, Vec<f64>)> = Vec::new();
    for t in tables {
        let e = t.column("epsilon").ok_or_else(|| TricapError::Parse("table has no epsilon column".into()))?;
        let vals = cols
            .iter()
            .map(|c| t.column(c).ok_or_else(|| TricapError::Parse(format!("table has no column {c}"))))
            .collect::<Result<Vec<_>>>()?;
        for (k, eps) in e.iter().enumerate() {
            rows.push((*eps, vals.iter().map(|v| v[k]).collect()));
        }
    }
    rows.sort_by(|a, b| b.0.total_cmp(&a.0));
    let eps: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let per_col: Vec<Vec<f64>> = (0..cols.len()).map(|j| rows.iter().map(|r| r.1[j]).collect()).collect();
    let mut header = vec!["epsilon_1".to_string(), "epsilon_2".to_string()];
    header.extend(cols.iter().map(|c| format!("{c}_eoc")));
    let mut out = Series::new(header);
    for row in rate_rows(&eps, &per_col)? {
        out.push(row)?;
    }
    Ok(out)
}
