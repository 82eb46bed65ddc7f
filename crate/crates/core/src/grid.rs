//! Uniform cell-centred grids, masked convex-polygon domains, fields and the
//! finite-volume stencils shared by every solver.
//!
//! Cells are indexed row-major, `idx = j * nx + i`. Face arrays follow the MAC
//! convention: `FaceField::x` holds the `(nx + 1) * ny` vertical faces (face
//! `i` is the west face of cell `i`), `FaceField::y` the `nx * (ny + 1)`
//! horizontal faces (face `j` is the south face of row `j`).

use crate::error::{Result, TricapError};

pub type Point = [f64; 2];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub origin: Point,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, hx: f64, hy: f64, origin: Point) -> Result<Self> {
        if nx < 4 || ny < 4 {
            return Err(TricapError::InvalidParameter(format!(
                "grid needs at least 4x4 cells, got {nx}x{ny}"
            )));
        }
        if !(hx > 0.0 && hy > 0.0) || !hx.is_finite() || !hy.is_finite() {
            return Err(TricapError::InvalidParameter(format!(
                "cell sizes must be positive, got {hx} x {hy}"
            )));
        }
        Ok(Self { nx, ny, hx, hy, origin })
    }

    /// Grid covering `[x0, x1] x [y0, y1]` with cell sizes at most `h`.
    pub fn covering(x0: f64, x1: f64, y0: f64, y1: f64, h: f64) -> Result<Self> {
        if !(x1 > x0 && y1 > y0 && h > 0.0) {
            return Err(TricapError::InvalidParameter(format!(
                "bad bounds [{x0}, {x1}] x [{y0}, {y1}] with h = {h}"
            )));
        }
        let nx = ((x1 - x0) / h - 1e-9).ceil().max(4.0) as usize;
        let ny = ((y1 - y0) / h - 1e-9).ceil().max(4.0) as usize;
        Self::new(nx, ny, (x1 - x0) / nx as f64, (y1 - y0) / ny as f64, [x0, y0])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn ij(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    #[inline]
    pub fn center(&self, i: usize, j: usize) -> Point {
        [
            self.origin[0] + (i as f64 + 0.5) * self.hx,
            self.origin[1] + (j as f64 + 0.5) * self.hy,
        ]
    }

    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.hx * self.hy
    }

    pub fn upper(&self) -> Point {
        [
            self.origin[0] + self.nx as f64 * self.hx,
            self.origin[1] + self.ny as f64 * self.hy,
        ]
    }

    pub fn n_xfaces(&self) -> usize {
        (self.nx + 1) * self.ny
    }

    pub fn n_yfaces(&self) -> usize {
        self.nx * (self.ny + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    West,
    East,
    South,
    North,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::West, Side::East, Side::South, Side::North];
}

/// Connectivity of one cell face.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Link {
    Cell(usize),
    /// Domain boundary, tagged with the polygon edge it belongs to.
    Boundary(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryFace {
    pub cell: usize,
    pub side: Side,
    pub edge: usize,
    pub center: Point,
}

/// Convex polygon realised as a staircase mask over a grid.
#[derive(Clone, Debug)]
pub struct DomainMask {
    pub polygon: Vec<Point>,
    pub inside: Vec<bool>,
    pub boundary_faces: Vec<BoundaryFace>,
    links: Vec<[Link; 4]>,
    full: bool,
}

#[derive(Clone, Debug)]
pub struct Domain {
    pub grid: Grid2D,
    pub mask: DomainMask,
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let q = [a[0] + t * d[0], a[1] + t * d[1]];
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
}

impl Domain {
    /// The full grid rectangle. Edges are numbered counter-clockwise starting
    /// with the bottom side: 0 south, 1 east, 2 north, 3 west.
    pub fn rectangle(grid: Grid2D) -> Self {
        let [x0, y0] = grid.origin;
        let [x1, y1] = grid.upper();
        let polygon = vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]];
        Self::build(grid, polygon, true).expect("rectangle polygon is convex")
    }

    /// A convex polygon masked onto `grid`; a cell is inside when its centre is.
    pub fn polygon(grid: Grid2D, vertices: Vec<Point>) -> Result<Self> {
        Self::build(grid, vertices, false)
    }

    fn build(grid: Grid2D, mut polygon: Vec<Point>, full: bool) -> Result<Self> {
        let n = polygon.len();
        if n < 3 {
            return Err(TricapError::InvalidParameter("polygon needs 3+ vertices".into()));
        }
        let area: f64 = (0..n)
            .map(|k| {
                let a = polygon[k];
                let b = polygon[(k + 1) % n];
                a[0] * b[1] - b[0] * a[1]
            })
            .sum();
        if area < 0.0 {
            polygon.reverse();
        }
        for k in 0..n {
            let c = cross(polygon[k], polygon[(k + 1) % n], polygon[(k + 2) % n]);
            if c <= 0.0 {
                return Err(TricapError::InvalidParameter(
                    "polygon must be simple, convex and non-degenerate".into(),
                ));
            }
        }
        let inside_poly = |p: Point| (0..n).all(|k| cross(polygon[k], polygon[(k + 1) % n], p) >= 0.0);
        let inside: Vec<bool> = (0..grid.len())
            .map(|c| {
                let (i, j) = grid.ij(c);
                full || inside_poly(grid.center(i, j))
            })
            .collect();
        if !inside.iter().any(|&b| b) {
            return Err(TricapError::InvalidParameter("mask contains no cells".into()));
        }
        let nearest_edge = |p: Point| {
            (0..n)
                .map(|k| (k, segment_distance(p, polygon[k], polygon[(k + 1) % n])))
                .fold((0, f64::INFINITY), |acc, (k, d)| if d < acc.1 { (k, d) } else { acc })
                .0
        };
        let mut links = vec![[Link::Boundary(usize::MAX); 4]; grid.len()];
        let mut boundary_faces = Vec::new();
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let c = grid.idx(i, j);
                if !inside[c] {
                    continue;
                }
                let [cx, cy] = grid.center(i, j);
                for (s, side) in Side::ALL.iter().enumerate() {
                    let (nb, fc) = match side {
                        Side::West => ((i > 0).then(|| c - 1), [cx - 0.5 * grid.hx, cy]),
                        Side::East => ((i + 1 < grid.nx).then(|| c + 1), [cx + 0.5 * grid.hx, cy]),
                        Side::South => ((j > 0).then(|| c - grid.nx), [cx, cy - 0.5 * grid.hy]),
                        Side::North => ((j + 1 < grid.ny).then(|| c + grid.nx), [cx, cy + 0.5 * grid.hy]),
                    };
                    links[c][s] = match nb {
                        Some(nbc) if inside[nbc] => Link::Cell(nbc),
                        _ => {
                            let edge = nearest_edge(fc);
                            boundary_faces.push(BoundaryFace { cell: c, side: *side, edge, center: fc });
                            Link::Boundary(edge)
                        }
                    };
                }
            }
        }
        let full = inside.iter().all(|&b| b);
        Ok(Self {
            grid,
            mask: DomainMask { polygon, inside, boundary_faces, links, full },
        })
    }

    #[inline]
    pub fn links(&self, cell: usize) -> &[Link; 4] {
        &self.mask.links[cell]
    }

    #[inline]
    pub fn is_inside(&self, cell: usize) -> bool {
        self.mask.inside[cell]
    }

    /// True when every grid cell belongs to the domain.
    pub fn is_full(&self) -> bool {
        self.mask.full
    }

    pub fn n_edges(&self) -> usize {
        self.mask.polygon.len()
    }

    pub fn inside_cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.inside.iter().enumerate().filter(|(_, &b)| b).map(|(c, _)| c)
    }

    pub fn contains(&self, p: Point) -> bool {
        let poly = &self.mask.polygon;
        let n = poly.len();
        (0..n).all(|k| cross(poly[k], poly[(k + 1) % n], p) >= -1e-12)
    }

    /// Area of the polygon (not of the staircase mask).
    pub fn polygon_area(&self) -> f64 {
        let poly = &self.mask.polygon;
        let n = poly.len();
        0.5 * (0..n)
            .map(|k| {
                let a = poly[k];
                let b = poly[(k + 1) % n];
                a[0] * b[1] - b[0] * a[1]
            })
            .sum::<f64>()
    }

    /// Spacing across the given face.
    #[inline]
    pub fn spacing(&self, side: usize) -> f64 {
        if side < 2 {
            self.grid.hx
        } else {
            self.grid.hy
        }
    }

    pub fn zeros(&self) -> ScalarField {
        ScalarField::zeros(self.grid)
    }

    pub fn field_from_fn(&self, mut f: impl FnMut(f64, f64) -> f64) -> ScalarField {
        let g = self.grid;
        let mut out = ScalarField::zeros(g);
        for c in self.inside_cells() {
            let (i, j) = g.ij(c);
            let [x, y] = g.center(i, j);
            out.values[c] = f(x, y);
        }
        out
    }
}

/// One real per grid cell; cells outside the mask hold zero and are ignored.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub grid: Grid2D,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid2D) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn constant(domain: &Domain, value: f64) -> Self {
        domain.field_from_fn(|_, _| value)
    }

    pub fn check_finite(&self, domain: &Domain, what: &'static str) -> Result<()> {
        match domain.inside_cells().find(|&c| !self.values[c].is_finite()) {
            Some(cell) => Err(TricapError::NonFinite { what, cell }),
            None => Ok(()),
        }
    }

    pub fn max_abs(&self, domain: &Domain) -> f64 {
        domain.inside_cells().map(|c| self.values[c].abs()).fold(0.0, f64::max)
    }
}

/// Face-centred data on the MAC layout.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceField {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl FaceField {
    pub fn zeros(grid: &Grid2D) -> Self {
        Self { x: vec![0.0; grid.n_xfaces()], y: vec![0.0; grid.n_yfaces()] }
    }

    #[inline]
    pub fn xi(grid: &Grid2D, i: usize, j: usize) -> usize {
        j * (grid.nx + 1) + i
    }

    #[inline]
    pub fn yi(grid: &Grid2D, i: usize, j: usize) -> usize {
        j * grid.nx + i
    }

    /// Index into `x` or `y` for face `side` of cell `(i, j)`.
    #[inline]
    pub fn face_of(grid: &Grid2D, i: usize, j: usize, side: usize) -> (bool, usize) {
        match side {
            0 => (true, Self::xi(grid, i, j)),
            1 => (true, Self::xi(grid, i + 1, j)),
            2 => (false, Self::yi(grid, i, j)),
            _ => (false, Self::yi(grid, i, j + 1)),
        }
    }

    #[inline]
    pub fn get(&self, grid: &Grid2D, i: usize, j: usize, side: usize) -> f64 {
        match Self::face_of(grid, i, j, side) {
            (true, k) => self.x[k],
            (false, k) => self.y[k],
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum EdgeCondition {
    NeumannZero,
    Dirichlet(f64),
    /// Dirichlet data evaluated at the face centre.
    DirichletFn(fn(f64, f64) -> f64),
}

/// One condition per polygon edge; boundary faces inherit their edge's.
#[derive(Clone, Debug)]
pub struct BoundarySpec {
    pub edges: Vec<EdgeCondition>,
}

impl BoundarySpec {
    pub fn neumann(domain: &Domain) -> Self {
        Self { edges: vec![EdgeCondition::NeumannZero; domain.n_edges()] }
    }

    pub fn uniform(domain: &Domain, cond: EdgeCondition) -> Self {
        Self { edges: vec![cond; domain.n_edges()] }
    }

    fn check(&self, domain: &Domain) -> Result<()> {
        if self.edges.len() != domain.n_edges() {
            return Err(TricapError::LengthMismatch { left: self.edges.len(), right: domain.n_edges() });
        }
        Ok(())
    }

    /// Dirichlet value for a face of `edge` centred at `p`, `None` for Neumann.
    #[inline]
    pub fn value(&self, edge: usize, p: Point) -> Option<f64> {
        match self.edges[edge] {
            EdgeCondition::NeumannZero => None,
            EdgeCondition::Dirichlet(v) => Some(v),
            EdgeCondition::DirichletFn(f) => Some(f(p[0], p[1])),
        }
    }

    pub fn is_all_neumann(&self) -> bool {
        self.edges.iter().all(|e| matches!(e, EdgeCondition::NeumannZero))
    }
}

#[inline]
pub(crate) fn face_center(grid: &Grid2D, c: usize, side: usize) -> Point {
    let (i, j) = grid.ij(c);
    let [x, y] = grid.center(i, j);
    match side {
        0 => [x - 0.5 * grid.hx, y],
        1 => [x + 0.5 * grid.hx, y],
        2 => [x, y - 0.5 * grid.hy],
        _ => [x, y + 0.5 * grid.hy],
    }
}

/// Outward normal gradient on every face: `(f_nb - f_c) / h` between cells,
/// `2 (g - f_c) / h` on Dirichlet faces and zero on Neumann faces. Values are
/// stored on the MAC face arrays with the sign of the +x / +y direction.
pub fn face_gradient(domain: &Domain, f: &ScalarField, bc: &BoundarySpec) -> Result<FaceField> {
    bc.check(domain)?;
    f.check_finite(domain, "face_gradient input")?;
    let g = domain.grid;
    let mut out = FaceField::zeros(&g);
    for c in domain.inside_cells() {
        let (i, j) = g.ij(c);
        for s in 0..4 {
            let h = domain.spacing(s);
            let outward = match domain.links(c)[s] {
                Link::Cell(nb) => {
                    // interior faces are written by the west/south owner only
                    if s == 0 || s == 2 {
                        continue;
                    }
                    (f.values[nb] - f.values[c]) / h
                }
                Link::Boundary(edge) => match bc.value(edge, face_center(&g, c, s)) {
                    Some(v) => 2.0 * (v - f.values[c]) / h,
                    None => 0.0,
                },
            };
            let signed = if s == 0 || s == 2 { -outward } else { outward };
            match FaceField::face_of(&g, i, j, s) {
                (true, k) => out.x[k] = signed,
                (false, k) => out.y[k] = signed,
            }
        }
    }
    Ok(out)
}

/// Discrete divergence of a face field over the inside cells.
pub fn face_divergence(domain: &Domain, flux: &FaceField) -> ScalarField {
    let g = domain.grid;
    let mut out = ScalarField::zeros(g);
    for c in domain.inside_cells() {
        let (i, j) = g.ij(c);
        let fx = flux.x[FaceField::xi(&g, i + 1, j)] - flux.x[FaceField::xi(&g, i, j)];
        let fy = flux.y[FaceField::yi(&g, i, j + 1)] - flux.y[FaceField::yi(&g, i, j)];
        out.values[c] = fx / g.hx + fy / g.hy;
    }
    out
}

/// Five-point Laplacian with ghost values from `bc` (mirror for Neumann,
/// linear extrapolation through the face value for Dirichlet).
pub fn laplacian(domain: &Domain, f: &ScalarField, bc: &BoundarySpec) -> Result<ScalarField> {
    bc.check(domain)?;
    f.check_finite(domain, "laplacian input")?;
    let g = domain.grid;
    let mut out = ScalarField::zeros(g);
    for c in domain.inside_cells() {
        let fc = f.values[c];
        let mut acc = 0.0;
        for s in 0..4 {
            let h = domain.spacing(s);
            acc += match domain.links(c)[s] {
                Link::Cell(nb) => (f.values[nb] - fc) / (h * h),
                Link::Boundary(edge) => match bc.value(edge, face_center(&g, c, s)) {
                    Some(v) => 2.0 * (v - fc) / (h * h),
                    None => 0.0,
                },
            };
        }
        out.values[c] = acc;
    }
    Ok(out)
}

/// Masked Neumann Laplacian on raw slices, used inside the linear solvers.
pub(crate) fn neumann_laplacian_into(domain: &Domain, x: &[f64], y: &mut [f64]) {
    let g = &domain.grid;
    let (ihx2, ihy2) = (1.0 / (g.hx * g.hx), 1.0 / (g.hy * g.hy));
    if domain.is_full() {
        let (nx, ny) = (g.nx, g.ny);
        for j in 0..ny {
            for i in 0..nx {
                let c = j * nx + i;
                let xc = x[c];
                let mut acc = 0.0;
                if i > 0 {
                    acc += (x[c - 1] - xc) * ihx2;
                }
                if i + 1 < nx {
                    acc += (x[c + 1] - xc) * ihx2;
                }
                if j > 0 {
                    acc += (x[c - nx] - xc) * ihy2;
                }
                if j + 1 < ny {
                    acc += (x[c + nx] - xc) * ihy2;
                }
                y[c] = acc;
            }
        }
        return;
    }
    for c in 0..g.len() {
        if !domain.is_inside(c) {
            y[c] = 0.0;
            continue;
        }
        let xc = x[c];
        let mut acc = 0.0;
        for (s, link) in domain.links(c).iter().enumerate() {
            if let Link::Cell(nb) = *link {
                acc += (x[nb] - xc) * if s < 2 { ihx2 } else { ihy2 };
            }
        }
        y[c] = acc;
    }
}

/// `div(k grad f)` with face coefficients `k` (used on every face, boundary
/// faces included). Neumann faces carry no flux.
pub fn div_coeff_grad(domain: &Domain, k: &FaceField, f: &ScalarField, bc: &BoundarySpec) -> Result<ScalarField> {
    let mut flux = face_gradient(domain, f, bc)?;
    for (a, b) in flux.x.iter_mut().zip(&k.x) {
        *a *= b;
    }
    for (a, b) in flux.y.iter_mut().zip(&k.y) {
        *a *= b;
    }
    Ok(face_divergence(domain, &flux))
}

/// Cell-centred gradient: centred differences, one-sided next to the mask
/// boundary, zero along a direction with no inside neighbour.
pub fn gradient(domain: &Domain, f: &ScalarField) -> Result<(ScalarField, ScalarField)> {
    f.check_finite(domain, "gradient input")?;
    let g = domain.grid;
    let mut gx = ScalarField::zeros(g);
    let mut gy = ScalarField::zeros(g);
    for c in domain.inside_cells() {
        let l = domain.links(c);
        let d = |lo: Link, hi: Link, h: f64| match (lo, hi) {
            (Link::Cell(a), Link::Cell(b)) => (f.values[b] - f.values[a]) / (2.0 * h),
            (Link::Boundary(_), Link::Cell(b)) => (f.values[b] - f.values[c]) / h,
            (Link::Cell(a), Link::Boundary(_)) => (f.values[c] - f.values[a]) / h,
            _ => 0.0,
        };
        gx.values[c] = d(l[0], l[1], g.hx);
        gy.values[c] = d(l[2], l[3], g.hy);
    }
    Ok((gx, gy))
}

/// Midpoint rule over the inside cells.
pub fn integrate(domain: &Domain, f: &ScalarField) -> f64 {
    domain.inside_cells().map(|c| f.values[c]).sum::<f64>() * domain.grid.cell_area()
}

/// Squared gradient magnitude per cell from face differences: each direction
/// averages the squared one-sided differences of its two faces, so that the
/// sum over cells reproduces the face-based Dirichlet energy.
pub fn grad_sq_cells(domain: &Domain, f: &[f64]) -> Vec<f64> {
    let g = domain.grid;
    let mut out = vec![0.0; g.len()];
    for c in domain.inside_cells() {
        let mut acc = 0.0;
        for (s, link) in domain.links(c).iter().enumerate() {
            if let Link::Cell(nb) = *link {
                let h = domain.spacing(s);
                let d = (f[nb] - f[c]) / h;
                acc += 0.5 * d * d;
            }
        }
        out[c] = acc;
    }
    out
}

/// Averages a cell quantity to every face of the inside cells. Faces on the
/// boundary take the value of their single inside cell.
pub fn cell_to_faces(domain: &Domain, v: &[f64], mean: impl Fn(f64, f64) -> f64) -> FaceField {
    let g = domain.grid;
    let mut out = FaceField::zeros(&g);
    for c in domain.inside_cells() {
        let (i, j) = g.ij(c);
        for s in 0..4 {
            let val = match domain.links(c)[s] {
                Link::Cell(nb) => {
                    if s == 0 || s == 2 {
                        continue;
                    }
                    mean(v[c], v[nb])
                }
                Link::Boundary(_) => v[c],
            };
            match FaceField::face_of(&g, i, j, s) {
                (true, k) => out.x[k] = val,
                (false, k) => out.y[k] = val,
            }
        }
    }
    out
}

/// Conservative divergence `div(v f)` with second-order upwind face values
/// `1.5 f_U - 0.5 f_UU` (first order where the second upwind cell is missing).
/// Only faces between two inside cells carry flux; the normal velocity on the
/// domain boundary is taken to vanish.
pub fn upwind_divergence(domain: &Domain, f: &[f64], vel: &FaceField) -> Vec<f64> {
    let g = domain.grid;
    let mut out = vec![0.0; g.len()];
    for c in domain.inside_cells() {
        let (i, j) = g.ij(c);
        for (s, up_side, h) in [(1usize, 0usize, g.hx), (3, 2, g.hy)] {
            let nb = match domain.links(c)[s] {
                Link::Cell(nb) => nb,
                Link::Boundary(_) => continue,
            };
            let u = vel.get(&g, i, j, s);
            if u == 0.0 {
                continue;
            }
            let (up, far) = if u > 0.0 {
                (c, domain.links(c)[up_side])
            } else {
                (nb, domain.links(nb)[s])
            };
            let fv = match far {
                Link::Cell(uu) => 1.5 * f[up] - 0.5 * f[uu],
                Link::Boundary(_) => f[up],
            };
            let flux = u * fv / h;
            out[c] += flux;
            out[nb] -= flux;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square(n: usize) -> Domain {
        Domain::rectangle(Grid2D::new(n, n, 1.0 / n as f64, 1.0 / n as f64, [0.0, 0.0]).unwrap())
    }

    pub(crate) fn hexagon(h: f64) -> Domain {
        let s3 = 3f64.sqrt();
        let grid = Grid2D::covering(-1.0, 1.0, -s3 / 2.0, s3 / 2.0, h).unwrap();
        let verts = (0..6)
            .map(|k| {
                let a = k as f64 * std::f64::consts::PI / 3.0;
                [a.cos(), a.sin()]
            })
            .collect();
        Domain::polygon(grid, verts).unwrap()
    }

    #[test]
    fn grid_rejects_small_or_degenerate() {
        assert!(Grid2D::new(3, 10, 0.1, 0.1, [0.0, 0.0]).is_err());
        assert!(Grid2D::new(10, 10, 0.0, 0.1, [0.0, 0.0]).is_err());
        assert!(Grid2D::new(10, 10, 0.1, -1.0, [0.0, 0.0]).is_err());
    }

    #[test]
    fn laplacian_of_constant_is_zero() {
        let d = unit_square(16);
        let f = ScalarField::constant(&d, 3.0);
        let l = laplacian(&d, &f, &BoundarySpec::neumann(&d)).unwrap();
        assert!(l.max_abs(&d) == 0.0);
        let hex = hexagon(0.05);
        let f = ScalarField::constant(&hex, 3.0);
        let l = laplacian(&hex, &f, &BoundarySpec::neumann(&hex)).unwrap();
        assert!(l.max_abs(&hex) == 0.0);
    }

    #[test]
    fn laplacian_of_quadratic_with_exact_dirichlet() {
        let d = unit_square(20);
        let f = d.field_from_fn(|x, _| x * x);
        let bc = BoundarySpec::uniform(&d, EdgeCondition::DirichletFn(|x, _| x * x));
        let l = laplacian(&d, &f, &bc).unwrap();
        let g = d.grid;
        // interior cells are exact; cells touching an x-boundary carry the
        // O(h^2) ghost-extrapolation error of the quadratic
        for c in d.inside_cells() {
            let (i, _) = g.ij(c);
            let tol = if i == 0 || i + 1 == g.nx { 1.0 } else { 1e-9 };
            assert!((l.values[c] - 2.0).abs() <= tol, "cell {c}: {}", l.values[c]);
        }
    }

    #[test]
    fn laplacian_matches_dense_matrix_assembly() {
        use rand::{Rng, SeedableRng};
        let hex = hexagon(0.15);
        let g = hex.grid;
        let n = g.len();
        // dense matrix built independently from the 5-point coefficients
        let mut a = vec![0.0; n * n];
        for j in 0..g.ny {
            for i in 0..g.nx {
                let c = g.idx(i, j);
                if !hex.mask.inside[c] {
                    continue;
                }
                let nbrs = [
                    (i.checked_sub(1).map(|ii| g.idx(ii, j)), g.hx),
                    ((i + 1 < g.nx).then(|| g.idx(i + 1, j)), g.hx),
                    (j.checked_sub(1).map(|jj| g.idx(i, jj)), g.hy),
                    ((j + 1 < g.ny).then(|| g.idx(i, j + 1)), g.hy),
                ];
                for (nb, h) in nbrs {
                    if let Some(nb) = nb {
                        if hex.mask.inside[nb] {
                            a[c * n + nb] += 1.0 / (h * h);
                            a[c * n + c] -= 1.0 / (h * h);
                        }
                    }
                }
            }
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let f = hex.field_from_fn(|_, _| rng.gen_range(-1.0..1.0));
        let l = laplacian(&hex, &f, &BoundarySpec::neumann(&hex)).unwrap();
        for c in hex.inside_cells() {
            let dense: f64 = (0..n).map(|k| a[c * n + k] * f.values[k]).sum();
            assert!((dense - l.values[c]).abs() <= 1e-14 * dense.abs().max(1.0) * 1e2);
        }
    }

    #[test]
    fn gradient_examples() {
        let d = unit_square(16);
        let (gx, gy) = gradient(&d, &ScalarField::constant(&d, 2.5)).unwrap();
        assert_eq!(gx.max_abs(&d), 0.0);
        assert_eq!(gy.max_abs(&d), 0.0);
        let (gx, gy) = gradient(&d, &d.field_from_fn(|x, _| x)).unwrap();
        for c in d.inside_cells() {
            assert!((gx.values[c] - 1.0).abs() < 1e-12);
            assert!(gy.values[c].abs() < 1e-14);
        }
    }

    #[test]
    fn gradient_converges_at_second_order_in_the_interior() {
        let err = |n: usize| {
            let d = Domain::rectangle(Grid2D::new(n, 4, 2.0 / n as f64, 0.25, [0.0, 0.0]).unwrap());
            let (gx, _) = gradient(&d, &d.field_from_fn(|x, _| x.sin())).unwrap();
            let g = d.grid;
            d.inside_cells()
                .filter(|&c| {
                    let (i, _) = g.ij(c);
                    i > 0 && i + 1 < g.nx
                })
                .map(|c| {
                    let (i, j) = g.ij(c);
                    (gx.values[c] - g.center(i, j)[0].cos()).abs()
                })
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(32), err(64));
        let rate = (e1 / e2).log2();
        assert!(rate > 1.9 && rate < 2.1, "rate {rate}");
    }

    #[test]
    fn integrate_examples() {
        let d = unit_square(10);
        assert!((integrate(&d, &ScalarField::constant(&d, 1.0)) - 1.0).abs() < 1e-14);
        assert!((integrate(&d, &d.field_from_fn(|x, _| x)) - 0.5).abs() < 1e-14);
        let area = 1.5 * 3f64.sqrt();
        let mut errs = vec![];
        for h in [0.04, 0.02, 0.01] {
            let hex = hexagon(h);
            assert!((hex.polygon_area() - area).abs() < 1e-12);
            let e = (integrate(&hex, &ScalarField::constant(&hex, 1.0)) - area).abs();
            assert!(e < 4.0 * h, "h = {h}: {e}");
            errs.push(e);
        }
        assert!(errs[2] < errs[0]);
    }

    #[test]
    fn neumann_laplacian_sums_to_zero() {
        // discrete divergence theorem with zero boundary flux
        let hex = hexagon(0.05);
        let f = hex.field_from_fn(|x, y| (3.0 * x).sin() * (2.0 * y).cos() + x * y);
        let l = laplacian(&hex, &f, &BoundarySpec::neumann(&hex)).unwrap();
        assert!(integrate(&hex, &l).abs() < 1e-12);
    }

    #[test]
    fn face_gradient_divergence_adjointness() {
        let d = Domain::rectangle(Grid2D::new(12, 9, 0.1, 0.15, [-0.3, 0.2]).unwrap());
        let g = d.grid;
        let f = d.field_from_fn(|x, y| (x * 2.0).cos() + y * y);
        let gv = d.field_from_fn(|x, y| x - 0.5 * y + 0.25);
        // an arbitrary face field including boundary faces
        let mut w = FaceField::zeros(&g);
        for (k, v) in w.x.iter_mut().enumerate() {
            *v = (k as f64 * 0.37).sin();
        }
        for (k, v) in w.y.iter_mut().enumerate() {
            *v = (k as f64 * 0.11).cos();
        }
        let bc = BoundarySpec::neumann(&d);
        let gf = face_gradient(&d, &f, &bc).unwrap();
        let area = g.cell_area();
        // <G f, w> over interior faces + <f, D w> = boundary term sum f_c w_face n
        let div = face_divergence(&d, &w);
        let mut lhs = 0.0;
        for (k, (a, b)) in gf.x.iter().zip(&w.x).enumerate() {
            let i = k % (g.nx + 1);
            if i > 0 && i < g.nx {
                lhs += a * b * area;
            }
        }
        for (k, (a, b)) in gf.y.iter().zip(&w.y).enumerate() {
            let j = k / g.nx;
            if j > 0 && j < g.ny {
                lhs += a * b * area;
            }
        }
        lhs += d.inside_cells().map(|c| f.values[c] * div.values[c]).sum::<f64>() * area;
        let mut boundary = 0.0;
        for bf in &d.mask.boundary_faces {
            let (i, j) = g.ij(bf.cell);
            let s = bf.side as usize;
            let (len, sign) = match bf.side {
                Side::West => (g.hy, -1.0),
                Side::East => (g.hy, 1.0),
                Side::South => (g.hx, -1.0),
                Side::North => (g.hx, 1.0),
            };
            boundary += sign * f.values[bf.cell] * w.get(&g, i, j, s) * len;
        }
        assert!((lhs - boundary).abs() < 1e-12, "{lhs} vs {boundary}");
        let _ = gv;
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let d = unit_square(8);
        let mut f = ScalarField::constant(&d, 1.0);
        f.values[5] = f64::NAN;
        assert!(laplacian(&d, &f, &BoundarySpec::neumann(&d)).is_err());
        assert!(gradient(&d, &f).is_err());
    }

    #[test]
    fn hexagon_boundary_edges_are_assigned() {
        let hex = hexagon(0.05);
        let mut seen = [false; 6];
        for bf in &hex.mask.boundary_faces {
            seen[bf.edge] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }
}
