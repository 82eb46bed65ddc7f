//! CSV series and legacy VTK snapshots.
//!
//! Numbers are written with 17 significant digits so that output is
//! bit-stable and round-trips exactly.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Result, TricapError};
use crate::grid::{Domain, Grid2D, Point, ScalarField};

/// Fixed 17-significant-digit scientific notation.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// A table of named columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(TricapError::LengthMismatch { left: row.len(), right: self.header.len() });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

pub fn write_csv_to<W: Write>(w: W, series: &Series) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(&series.header)?;
    for row in &series.rows {
        wr.write_record(row.iter().map(|v| fmt_f64(*v)))?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_csv(path: impl AsRef<Path>, series: &Series) -> Result<()> {
    write_csv_to(BufWriter::new(fs::File::create(path)?), series)
}

pub fn parse_csv(text: &str) -> Result<Series> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header: Vec<String> = rd.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let mut series = Series::new(header);
    for rec in rd.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|v| v.trim().parse::<f64>().map_err(|_| TricapError::Parse(format!("not a number in CSV: {v:?}"))))
            .collect::<Result<Vec<_>>>()?;
        series.push(row)?;
    }
    Ok(series)
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Series> {
    parse_csv(&fs::read_to_string(path)?)
}

/// Cell-centred fields on a grid, stored as VTK point data on the cell
/// centres. The domain polygon and the time travel as field data.
#[derive(Clone, Debug, PartialEq)]
pub struct VtkImage {
    pub grid: Grid2D,
    pub time: f64,
    pub polygon: Option<Vec<Point>>,
    pub fields: Vec<(String, Vec<f64>)>,
}

impl VtkImage {
    pub fn new(grid: Grid2D, time: f64) -> Self {
        Self { grid, time, polygon: None, fields: Vec::new() }
    }

    /// Phase fields `phi1..phi3` and, when given, `q`.
    pub fn from_state(domain: &Domain, time: f64, phi: &[ScalarField; 3], q: Option<&ScalarField>) -> Self {
        let mut img = Self::new(domain.grid, time);
        if !domain.is_full() {
            img.polygon = Some(domain.mask.polygon.clone());
        }
        for (k, p) in phi.iter().enumerate() {
            img.fields.push((format!("phi{}", k + 1), p.values.clone()));
        }
        if let Some(q) = q {
            img.fields.push(("q".into(), q.values.clone()));
        }
        img
    }

    pub fn add(&mut self, name: &str, values: Vec<f64>) -> Result<()> {
        if values.len() != self.grid.len() {
            return Err(TricapError::LengthMismatch { left: values.len(), right: self.grid.len() });
        }
        self.fields.push((name.to_string(), values));
        Ok(())
    }

    pub fn field(&self, name: &str) -> Option<ScalarField> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, v)| ScalarField { grid: self.grid, values: v.clone() })
    }

    pub fn domain(&self) -> Result<Domain> {
        match &self.polygon {
            Some(p) => Domain::polygon(self.grid, p.clone()),
            None => Ok(Domain::rectangle(self.grid)),
        }
    }

    pub fn phases(&self) -> Result<[ScalarField; 3]> {
        let get = |k: usize| self.field(&format!("phi{k}")).ok_or_else(|| TricapError::Parse(format!("snapshot has no field phi{k}")));
        Ok([get(1)?, get(2)?, get(3)?])
    }
}

pub fn write_vtk_to<W: Write>(mut w: W, img: &VtkImage) -> Result<()> {
    let g = &img.grid;
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "tricap snapshot")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET STRUCTURED_POINTS")?;
    writeln!(w, "DIMENSIONS {} {} 1", g.nx, g.ny)?;
    writeln!(w, "ORIGIN {} {} {}", fmt_f64(g.origin[0] + 0.5 * g.hx), fmt_f64(g.origin[1] + 0.5 * g.hy), fmt_f64(0.0))?;
    writeln!(w, "SPACING {} {} {}", fmt_f64(g.hx), fmt_f64(g.hy), fmt_f64(1.0))?;
    let n_meta = 1 + usize::from(img.polygon.is_some());
    writeln!(w, "FIELD FieldData {n_meta}")?;
    writeln!(w, "TIME 1 1 double")?;
    writeln!(w, "{}", fmt_f64(img.time))?;
    if let Some(p) = &img.polygon {
        writeln!(w, "POLYGON 2 {} double", p.len())?;
        for v in p {
            writeln!(w, "{} {}", fmt_f64(v[0]), fmt_f64(v[1]))?;
        }
    }
    writeln!(w, "POINT_DATA {}", g.len())?;
    for (name, values) in &img.fields {
        if values.len() != g.len() {
            return Err(TricapError::LengthMismatch { left: values.len(), right: g.len() });
        }
        writeln!(w, "SCALARS {name} double 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for v in values {
            writeln!(w, "{}", fmt_f64(*v))?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_vtk(path: impl AsRef<Path>, img: &VtkImage) -> Result<()> {
    write_vtk_to(BufWriter::new(fs::File::create(path)?), img)
}

struct Tokens<'a> {
    it: std::iter::Peekable<std::str::SplitWhitespace<'a>>,
}

impl<'a> Tokens<'a> {
    fn next(&mut self) -> Result<&'a str> {
        self.it.next().ok_or_else(|| TricapError::Parse("unexpected end of VTK file".into()))
    }

    fn expect(&mut self, word: &str) -> Result<()> {
        let t = self.next()?;
        if t.eq_ignore_ascii_case(word) {
            Ok(())
        } else {
            Err(TricapError::Parse(format!("expected {word} in VTK file, found {t}")))
        }
    }

    fn num<T: std::str::FromStr>(&mut self) -> Result<T> {
        let t = self.next()?;
        t.parse().map_err(|_| TricapError::Parse(format!("bad number in VTK file: {t}")))
    }
}

/// Reads files produced by [`write_vtk`].
pub fn parse_vtk(text: &str) -> Result<VtkImage> {
    let mut lines = text.splitn(3, '\n');
    let magic = lines.next().unwrap_or("");
    if !magic.starts_with("# vtk DataFile") {
        return Err(TricapError::Parse("not a legacy VTK file".into()));
    }
    let _title = lines.next();
    let mut tk = Tokens { it: lines.next().unwrap_or("").split_whitespace().peekable() };
    tk.expect("ASCII")?;
    tk.expect("DATASET")?;
    tk.expect("STRUCTURED_POINTS")?;
    let (mut dims, mut origin, mut spacing) = (None, None, None);
    let mut time = 0.0;
    let mut polygon = None;
    let mut fields = Vec::new();
    let mut n_points = None;
    while let Some(word) = tk.it.next() {
        match word.to_ascii_uppercase().as_str() {
            "DIMENSIONS" => {
                let (nx, ny, nz): (usize, usize, usize) = (tk.num()?, tk.num()?, tk.num()?);
                if nz != 1 {
                    return Err(TricapError::Parse("only planar VTK images are supported".into()));
                }
                dims = Some((nx, ny));
            }
            "ORIGIN" => {
                let o: [f64; 3] = [tk.num()?, tk.num()?, tk.num()?];
                origin = Some([o[0], o[1]]);
            }
            "SPACING" => {
                let s: [f64; 3] = [tk.num()?, tk.num()?, tk.num()?];
                spacing = Some([s[0], s[1]]);
            }
            "FIELD" => {
                tk.next()?;
                let n: usize = tk.num()?;
                for _ in 0..n {
                    let name = tk.next()?;
                    let (comp, tuples): (usize, usize) = (tk.num()?, tk.num()?);
                    tk.next()?;
                    let vals = (0..comp * tuples).map(|_| tk.num::<f64>()).collect::<Result<Vec<_>>>()?;
                    match name {
                        "TIME" => time = vals.first().copied().unwrap_or(0.0),
                        "POLYGON" if comp == 2 => polygon = Some(vals.chunks(2).map(|c| [c[0], c[1]]).collect()),
                        _ => {}
                    }
                }
            }
            "POINT_DATA" => n_points = Some(tk.num::<usize>()?),
            "SCALARS" => {
                let n = n_points.ok_or_else(|| TricapError::Parse("SCALARS before POINT_DATA".into()))?;
                let name = tk.next()?.to_string();
                tk.next()?;
                if tk.it.peek().map_or(false, |t| t.parse::<usize>().is_ok()) {
                    let comps: usize = tk.num()?;
                    if comps != 1 {
                        return Err(TricapError::Parse("only single-component scalars are supported".into()));
                    }
                }
                tk.expect("LOOKUP_TABLE")?;
                tk.next()?;
                let vals = (0..n).map(|_| tk.num::<f64>()).collect::<Result<Vec<_>>>()?;
                fields.push((name, vals));
            }
            other => return Err(TricapError::Parse(format!("unsupported VTK keyword {other}"))),
        }
    }
    let (nx, ny) = dims.ok_or_else(|| TricapError::Parse("missing DIMENSIONS".into()))?;
    let c0 = origin.ok_or_else(|| TricapError::Parse("missing ORIGIN".into()))?;
    let [hx, hy] = spacing.ok_or_else(|| TricapError::Parse("missing SPACING".into()))?;
    if nx == 0 || ny == 0 || !(hx > 0.0 && hy > 0.0) {
        return Err(TricapError::Parse("degenerate VTK image".into()));
    }
    let grid = Grid2D { nx, ny, hx, hy, origin: [c0[0] - 0.5 * hx, c0[1] - 0.5 * hy] };
    if let Some(n) = n_points {
        if n != grid.len() {
            return Err(TricapError::LengthMismatch { left: n, right: grid.len() });
        }
    }
    Ok(VtkImage { grid, time, polygon, fields })
}

pub fn read_vtk(path: impl AsRef<Path>) -> Result<VtkImage> {
    parse_vtk(&fs::read_to_string(path)?)
}
