//! Post-processing: triple-junction detection, junction angles, sampling
//! along interfaces, error norms, convergence rates and contour extraction.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{Result, TricapError};
use crate::grid::{Domain, Point, ScalarField};

/// Dual cells of the grid: squares whose corners are four inside cell centres.
fn dual_quads(domain: &Domain) -> impl Iterator<Item = (usize, usize, [usize; 4])> + '_ {
    let g = domain.grid;
    (0..g.ny - 1).flat_map(move |j| {
        (0..g.nx - 1).filter_map(move |i| {
            let c = [g.idx(i, j), g.idx(i + 1, j), g.idx(i + 1, j + 1), g.idx(i, j + 1)];
            c.iter().all(|&k| domain.is_inside(k)).then_some((i, j, c))
        })
    })
}

/// Bilinear interpolant on the unit square with corner values ordered
/// (0,0), (1,0), (1,1), (0,1).
#[inline]
fn bilinear(v: [f64; 4], s: f64, t: f64) -> f64 {
    v[0] * (1.0 - s) * (1.0 - t) + v[1] * s * (1.0 - t) + v[2] * s * t + v[3] * (1.0 - s) * t
}

#[inline]
fn bilinear_grad(v: [f64; 4], s: f64, t: f64) -> [f64; 2] {
    [
        (v[1] - v[0]) * (1.0 - t) + (v[2] - v[3]) * t,
        (v[3] - v[0]) * (1.0 - s) + (v[2] - v[1]) * s,
    ]
}

fn changes_sign(v: [f64; 4]) -> bool {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    lo <= 0.0 && hi >= 0.0
}

/// Newton solve of `F = G = 0` for two bilinear functions inside the unit
/// square; returns the local coordinates if a root lies within it.
fn bilinear_root(f: [f64; 4], g: [f64; 4]) -> Option<(f64, f64)> {
    let (mut s, mut t) = (0.5, 0.5);
    for _ in 0..50 {
        let (fv, gv) = (bilinear(f, s, t), bilinear(g, s, t));
        let (df, dg) = (bilinear_grad(f, s, t), bilinear_grad(g, s, t));
        let det = df[0] * dg[1] - df[1] * dg[0];
        if det.abs() < 1e-300 {
            return None;
        }
        let ds = (fv * dg[1] - gv * df[1]) / det;
        let dt = (df[0] * gv - dg[0] * fv) / det;
        s -= ds;
        t -= dt;
        if !(s.is_finite() && t.is_finite()) || s.abs() > 10.0 || t.abs() > 10.0 {
            return None;
        }
        if ds.abs() + dt.abs() < 1e-13 {
            break;
        }
    }
    let tol = 1e-9;
    let ok = (-tol..=1.0 + tol).contains(&s) && (-tol..=1.0 + tol).contains(&t);
    let res = bilinear(f, s, t).abs() + bilinear(g, s, t).abs();
    (ok && res < 1e-8).then_some((s.clamp(0.0, 1.0), t.clamp(0.0, 1.0)))
}

fn quad_point(domain: &Domain, i: usize, j: usize, s: f64, t: f64) -> Point {
    let g = domain.grid;
    let [x, y] = g.center(i, j);
    [x + s * g.hx, y + t * g.hy]
}

fn corners(f: &ScalarField, c: [usize; 4]) -> [f64; 4] {
    c.map(|k| f.values[k])
}

fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Position of the triple junction: a dual cell where all three `phi_k - 1/3`
/// change sign, refined to the bilinear point with `phi_1 = phi_2 = phi_3`.
/// With several candidates the one closest to `hint` (or with the smallest
/// residual when no hint is given) wins.
pub fn locate_triple_junction(domain: &Domain, phi: &[ScalarField; 3], hint: Option<Point>) -> Result<Point> {
    let third = 1.0 / 3.0;
    let mut best: Option<(f64, Point)> = None;
    for (i, j, c) in dual_quads(domain) {
        let v = [0, 1, 2].map(|k| corners(&phi[k], c).map(|x| x - third));
        if !v.iter().all(|&w| changes_sign(w)) {
            continue;
        }
        let (p, resid) = match bilinear_root(v[0], v[1]) {
            Some((s, t)) => (quad_point(domain, i, j, s, t), 0.0),
            None => {
                let r: f64 = v.iter().map(|w| w.iter().map(|x| x.abs()).sum::<f64>()).sum();
                (quad_point(domain, i, j, 0.5, 0.5), r)
            }
        };
        let score = match hint {
            Some(h) => dist(p, h) + resid,
            None => resid + v.iter().map(|w| w.iter().map(|x| x.abs()).sum::<f64>()).sum::<f64>(),
        };
        if best.map_or(true, |(b, _)| score < b) {
            best = Some((score, p));
        }
    }
    best.map(|(_, p)| p).ok_or(TricapError::NoJunction)
}

/// Values `eta` strictly inside `(9/20, 1/2)` used to trace the interfaces.
pub fn eta_levels() -> Vec<f64> {
    (1..=20).map(|m| 0.45 + 0.05 * m as f64 / 21.0).collect()
}

/// Points where `phi_i = phi_j = eta` (hence `phi_k = 1 - 2 eta`) for each
/// level in [`eta_levels`]; per level the solution closest to `junction`
/// is kept and levels without a solution are skipped.
pub fn eta_junctions(domain: &Domain, phi: &[ScalarField; 3], triple: (usize, usize, usize), junction: Point) -> Result<Vec<Point>> {
    let (a, b, _) = triple;
    let mut out = Vec::new();
    for eta in eta_levels() {
        let mut best: Option<(f64, Point)> = None;
        for (i, j, c) in dual_quads(domain) {
            let f = corners(&phi[a], c).map(|x| x - eta);
            let g = corners(&phi[b], c).map(|x| x - eta);
            if !changes_sign(f) || !changes_sign(g) {
                continue;
            }
            if let Some((s, t)) = bilinear_root(f, g) {
                let p = quad_point(domain, i, j, s, t);
                let d = dist(p, junction);
                if best.map_or(true, |(bd, _)| d < bd) {
                    best = Some((d, p));
                }
            }
        }
        if let Some((_, p)) = best {
            out.push(p);
        }
    }
    if out.len() < 5 {
        return Err(TricapError::TooFewPoints {
            triple: (triple.0 + 1, triple.1 + 1, triple.2 + 1),
            found: out.len(),
            needed: 5,
        });
    }
    Ok(out)
}

/// Principal direction of the scatter of `pts` about `center`, oriented from
/// `center` towards the points.
fn principal_direction(pts: &[Point], center: Point) -> Point {
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    let (mut mx, mut my) = (0.0, 0.0);
    for p in pts {
        let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
        mx += dx;
        my += dy;
    }
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let mut d = [theta.cos(), theta.sin()];
    if d[0] * mx + d[1] * my < 0.0 {
        d = [-d[0], -d[1]];
    }
    d
}

/// Fitted interface line: a point on it and a unit direction pointing away
/// from the junction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterfaceLine {
    pub point: Point,
    pub direction: Point,
    /// Root-mean-square orthogonal distance of the data to the line.
    pub residual: f64,
}

fn fit_line(pts: &[Point], junction: Point, anchored: bool) -> InterfaceLine {
    let center = if anchored {
        junction
    } else {
        let n = pts.len() as f64;
        [pts.iter().map(|p| p[0]).sum::<f64>() / n, pts.iter().map(|p| p[1]).sum::<f64>() / n]
    };
    let mut d = principal_direction(pts, center);
    if !anchored {
        // orient away from the junction
        let (mx, my) = (center[0] - junction[0], center[1] - junction[1]);
        if d[0] * mx + d[1] * my < 0.0 {
            d = [-d[0], -d[1]];
        }
    }
    let ss: f64 = pts
        .iter()
        .map(|p| {
            let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
            (dx * d[1] - dy * d[0]).powi(2)
        })
        .sum();
    InterfaceLine { point: center, direction: d, residual: (ss / pts.len() as f64).sqrt() }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AngleMeasurement {
    /// Sector angles of phases 1, 2, 3 from lines through the junction.
    pub psi_anchored: [f64; 3],
    /// Sector angles from freely fitted lines.
    pub psi_unanchored: [f64; 3],
    pub junction: Point,
    /// Traced points of the interfaces (1,2), (1,3), (2,3).
    pub eta_points: [Vec<Point>; 3],
    pub lines_anchored: [InterfaceLine; 3],
    pub lines_unanchored: [InterfaceLine; 3],
}

/// Sector angles from the three interface directions indexed by pair
/// (1,2), (1,3), (2,3). The sector of phase `k` lies between the rays of the
/// two interfaces bounding it and does not contain the third ray.
pub fn sector_angles(dirs: [Point; 3]) -> [f64; 3] {
    let ang = dirs.map(|d| d[1].atan2(d[0]));
    let ccw = |a: f64, b: f64| (b - a).rem_euclid(2.0 * PI);
    // phase k is bounded by interfaces (i,k) and (j,k); the opposite one is (i,j)
    let bounding = [(0usize, 1usize, 2usize), (0, 2, 1), (1, 2, 0)];
    bounding.map(|(p, q, opp)| {
        let sweep = ccw(ang[p], ang[q]);
        if ccw(ang[p], ang[opp]) < sweep {
            2.0 * PI - sweep
        } else {
            sweep
        }
    })
}

/// Junction angles by anchored and unanchored line regression through the
/// traced points of each interface.
pub fn measure_angles(domain: &Domain, phi: &[ScalarField; 3], hint: Option<Point>) -> Result<AngleMeasurement> {
    let junction = locate_triple_junction(domain, phi, hint)?;
    let triples = [(0, 1, 2), (0, 2, 1), (1, 2, 0)];
    let mut pts: [Vec<Point>; 3] = Default::default();
    for (k, &t) in triples.iter().enumerate() {
        pts[k] = eta_junctions(domain, phi, t, junction)?;
    }
    let anch = [0, 1, 2].map(|k| fit_line(&pts[k], junction, true));
    let free = [0, 1, 2].map(|k| fit_line(&pts[k], junction, false));
    Ok(AngleMeasurement {
        psi_anchored: sector_angles(anch.map(|l| l.direction)),
        psi_unanchored: sector_angles(free.map(|l| l.direction)),
        junction,
        eta_points: pts,
        lines_anchored: anch,
        lines_unanchored: free,
    })
}

/// Values sampled along a path with arclength coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSeries {
    pub s: Vec<f64>,
    pub q: Vec<f64>,
}

impl SampleSeries {
    pub fn new(s: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if s.len() != q.len() {
            return Err(TricapError::LengthMismatch { left: s.len(), right: q.len() });
        }
        if s.windows(2).any(|w| w[1] <= w[0]) {
            return Err(TricapError::InvalidParameter("sample coordinates must increase strictly".into()));
        }
        Ok(Self { s, q })
    }

    /// Piecewise-linear interpolation, constant beyond the ends.
    pub fn interpolate(&self, s: f64) -> f64 {
        let n = self.s.len();
        if n == 0 {
            return f64::NAN;
        }
        if s <= self.s[0] {
            return self.q[0];
        }
        if s >= self.s[n - 1] {
            return self.q[n - 1];
        }
        let k = self.s.partition_point(|&x| x <= s) - 1;
        let w = (s - self.s[k]) / (self.s[k + 1] - self.s[k]);
        (1.0 - w) * self.q[k] + w * self.q[k + 1]
    }

    pub fn resample(&self, s: &[f64]) -> Vec<f64> {
        s.iter().map(|&x| self.interpolate(x)).collect()
    }
}

/// Bilinear interpolation between cell centres; centres outside the mask
/// are dropped and the remaining weights renormalised.
pub fn interpolate_at(domain: &Domain, f: &ScalarField, p: Point) -> Result<f64> {
    if !p.iter().all(|v| v.is_finite()) || !domain.contains(p) {
        return Err(TricapError::OutsideDomain { x: p[0], y: p[1] });
    }
    let g = domain.grid;
    let fx = ((p[0] - g.origin[0]) / g.hx - 0.5).clamp(0.0, (g.nx - 1) as f64);
    let fy = ((p[1] - g.origin[1]) / g.hy - 0.5).clamp(0.0, (g.ny - 1) as f64);
    let i0 = (fx.floor() as usize).min(g.nx - 2);
    let j0 = (fy.floor() as usize).min(g.ny - 2);
    let (s, t) = (fx - i0 as f64, fy - j0 as f64);
    let mut acc = 0.0;
    let mut wsum = 0.0;
    for (di, dj, w) in [(0, 0, (1.0 - s) * (1.0 - t)), (1, 0, s * (1.0 - t)), (1, 1, s * t), (0, 1, (1.0 - s) * t)] {
        let c = g.idx(i0 + di, j0 + dj);
        if domain.is_inside(c) && w > 0.0 {
            acc += w * f.values[c];
            wsum += w;
        }
    }
    if wsum > 1e-12 {
        return Ok(acc / wsum);
    }
    // nearest inside cell centre
    let mut best: Option<(f64, usize)> = None;
    for c in domain.inside_cells() {
        let (i, j) = g.ij(c);
        let d = dist(g.center(i, j), p);
        if best.map_or(true, |(bd, _)| d < bd) {
            best = Some((d, c));
        }
    }
    match best {
        Some((d, c)) if d <= 2.0 * (g.hx + g.hy) => Ok(f.values[c]),
        _ => Err(TricapError::OutsideDomain { x: p[0], y: p[1] }),
    }
}

fn polyline_length(path: &[Point]) -> f64 {
    path.windows(2).map(|w| dist(w[0], w[1])).sum()
}

fn point_at(path: &[Point], mut s: f64) -> Point {
    for w in path.windows(2) {
        let l = dist(w[0], w[1]);
        if s <= l || l == 0.0 {
            let a = if l > 0.0 { (s / l).clamp(0.0, 1.0) } else { 0.0 };
            return [w[0][0] + a * (w[1][0] - w[0][0]), w[0][1] + a * (w[1][1] - w[0][1])];
        }
        s -= l;
    }
    *path.last().expect("non-empty path")
}

/// Samples `q` at `n` equispaced points along the concatenation of
/// `segments`. The first segment runs from the source to the junction, so
/// the arclength is negative on it and zero at its end.
pub fn sample_q_along_segments(domain: &Domain, q: &ScalarField, segments: &[Vec<Point>], n: usize) -> Result<SampleSeries> {
    if segments.is_empty() || segments.iter().any(|s| s.len() < 2) || n < 2 {
        return Err(TricapError::InvalidParameter("sampling needs at least one segment and two points".into()));
    }
    let mut path: Vec<Point> = segments[0].clone();
    for seg in &segments[1..] {
        path.extend(seg.iter().skip(usize::from(dist(seg[0], *path.last().unwrap()) < 1e-14)));
    }
    let offset = polyline_length(&segments[0]);
    let total = polyline_length(&path);
    let mut s = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for k in 0..n {
        let a = total * k as f64 / (n - 1) as f64;
        let p = point_at(&path, a);
        s.push(a - offset);
        v.push(interpolate_at(domain, q, p)?);
    }
    SampleSeries::new(s, v)
}

/// `(max |y - yref|, (sum (y - yref)^2)^(1/2))` over coordinate vectors.
pub fn lp_errors(y: &[f64], yref: &[f64]) -> Result<(f64, f64)> {
    if y.len() != yref.len() {
        return Err(TricapError::LengthMismatch { left: y.len(), right: yref.len() });
    }
    let (mut linf, mut l2) = (0.0f64, 0.0);
    for (a, b) in y.iter().zip(yref) {
        let d = (a - b).abs();
        linf = linf.max(d);
        l2 += d * d;
    }
    Ok((linf, l2.sqrt()))
}

/// Rates `log(e_1 / e_2) / log(eps_1 / eps_2)` for consecutive entries.
pub fn eoc(errors: &[(f64, f64)]) -> Result<Vec<f64>> {
    if let Some(&(e, err)) = errors.iter().find(|(e, err)| !(*e > 0.0 && *err > 0.0)) {
        return Err(TricapError::InvalidParameter(format!("convergence rates need positive data, got ({e}, {err})")));
    }
    Ok(errors.windows(2).map(|w| (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln()).collect())
}

/// Marching-squares contours of `f = level` on the dual grid of cell
/// centres. Closed curves repeat their first point at the end.
pub fn level_set_polylines(domain: &Domain, f: &ScalarField, level: f64) -> Vec<Vec<Point>> {
    let g = domain.grid;
    // crossing keys: (horizontal?, i, j) for the dual edge starting at centre (i, j)
    type Key = (bool, usize, usize);
    let mut points: HashMap<Key, Point> = HashMap::new();
    let mut segs: Vec<(Key, Key)> = Vec::new();
    let crossing = |a: usize, b: usize, pa: Point, pb: Point| -> Option<Point> {
        let (va, vb) = (f.values[a] - level, f.values[b] - level);
        if (va < 0.0) == (vb < 0.0) {
            return None;
        }
        let w = va / (va - vb);
        Some([pa[0] + w * (pb[0] - pa[0]), pa[1] + w * (pb[1] - pa[1])])
    };
    for (i, j, c) in dual_quads(domain) {
        let p = [g.center(i, j), g.center(i + 1, j), g.center(i + 1, j + 1), g.center(i, j + 1)];
        // quad edges: bottom, right, top, left
        let edges: [(Key, usize, usize); 4] =
            [((true, i, j), 0, 1), ((false, i + 1, j), 1, 2), ((true, i, j + 1), 3, 2), ((false, i, j), 0, 3)];
        let mut hits: Vec<Key> = Vec::with_capacity(4);
        for (key, a, b) in edges {
            if let Some(x) = crossing(c[a], c[b], p[a], p[b]) {
                points.insert(key, x);
                hits.push(key);
            }
        }
        match hits.len() {
            2 => segs.push((hits[0], hits[1])),
            4 => {
                let center = c.iter().map(|&k| f.values[k]).sum::<f64>() / 4.0 - level;
                let low0 = f.values[c[0]] - level < 0.0;
                // pair edges so that the centre value decides the saddle
                if (center < 0.0) == low0 {
                    segs.push((hits[0], hits[1]));
                    segs.push((hits[2], hits[3]));
                } else {
                    segs.push((hits[0], hits[3]));
                    segs.push((hits[1], hits[2]));
                }
            }
            _ => {}
        }
    }
    let mut adj: HashMap<Key, Vec<usize>> = HashMap::new();
    for (k, (a, b)) in segs.iter().enumerate() {
        adj.entry(*a).or_default().push(k);
        adj.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; segs.len()];
    let mut out = Vec::new();
    let walk = |start: Key, first: usize, used: &mut Vec<bool>| -> Vec<Key> {
        let mut chain = vec![start];
        let mut cur = start;
        let mut seg = first;
        loop {
            used[seg] = true;
            let (a, b) = segs[seg];
            let next = if a == cur { b } else { a };
            chain.push(next);
            cur = next;
            match adj[&cur].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => break,
            }
        }
        chain
    };
    // open curves first, starting from endpoints of degree one
    let mut starts: Vec<Key> = adj.iter().filter(|(_, v)| v.len() == 1).map(|(k, _)| *k).collect();
    starts.sort();
    for key in starts {
        let s = adj[&key][0];
        if used[s] {
            continue;
        }
        let chain = walk(key, s, &mut used);
        out.push(chain.iter().map(|k| points[k]).collect());
    }
    for s in 0..segs.len() {
        if !used[s] {
            let chain = walk(segs[s].0, s, &mut used);
            out.push(chain.iter().map(|k| points[k]).collect());
        }
    }
    out
}

pub fn polyline_length_of(path: &[Point]) -> f64 {
    polyline_length(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2D;
    use crate::cahn_hilliard::wedge_phases as sectors;
    use crate::sharp::tanh_profile;

    fn square(n: usize, half: f64) -> Domain {
        let h = 2.0 * half / n as f64;
        Domain::rectangle(Grid2D::new(n, n, h, h, [-half, -half]).unwrap())
    }

    const RAYS: [f64; 3] = [PI / 6.0, -PI / 2.0, 5.0 * PI / 6.0];

    #[test]
    fn symmetric_junction_is_found_at_center() {
        let d = square(81, 1.0);
        let phi = sectors(&d, [0.0, 0.0], RAYS, 0.1);
        let p = locate_triple_junction(&d, &phi, None).unwrap();
        assert!(dist(p, [0.0, 0.0]) < d.grid.hx, "{p:?}");
    }

    #[test]
    fn junction_translates_with_the_state() {
        let d = square(80, 1.0);
        let a = locate_triple_junction(&d, &sectors(&d, [0.0, 0.0], RAYS, 0.1), None).unwrap();
        let b = locate_triple_junction(&d, &sectors(&d, [0.2, -0.15], RAYS, 0.1), None).unwrap();
        assert!((b[0] - a[0] - 0.2).abs() < d.grid.hx);
        assert!((b[1] - a[1] + 0.15).abs() < d.grid.hx);
    }

    #[test]
    fn two_phase_state_has_no_junction() {
        let d = square(40, 1.0);
        let prof = tanh_profile(0.1, 0.0);
        let phi = [d.field_from_fn(|x, _| prof(x)), d.field_from_fn(|x, _| 1.0 - prof(x)), d.zeros()];
        assert!(matches!(locate_triple_junction(&d, &phi, None), Err(TricapError::NoJunction)));
        assert!(matches!(eta_junctions(&d, &phi, (0, 1, 2), [0.0, 0.0]), Err(TricapError::TooFewPoints { .. })));
    }

    #[test]
    fn eta_points_lie_on_the_bisecting_ray_and_move_outwards() {
        let d = square(121, 1.0);
        let phi = sectors(&d, [0.0, 0.0], RAYS, 0.1);
        let j = locate_triple_junction(&d, &phi, None).unwrap();
        let pts = eta_junctions(&d, &phi, (0, 1, 2), j).unwrap();
        let dir = [RAYS[0].cos(), RAYS[0].sin()];
        for p in &pts {
            let off = (p[0] * dir[1] - p[1] * dir[0]).abs();
            assert!(off < d.grid.hx, "{p:?}");
        }
        let r: Vec<f64> = pts.iter().map(|p| dist(*p, j)).collect();
        assert!(r.last().unwrap() > r.first().unwrap());
    }

    #[test]
    fn symmetric_sectors_measure_two_thirds_pi() {
        let d = square(161, 1.0);
        let phi = sectors(&d, [0.0, 0.0], RAYS, 0.1);
        let m = measure_angles(&d, &phi, None).unwrap();
        for k in 0..3 {
            assert!((m.psi_anchored[k] - 2.0 * PI / 3.0).abs() < 0.05, "{:?}", m.psi_anchored);
            assert!((m.psi_anchored[k] - m.psi_unanchored[k]).abs() < 0.05);
        }
        assert!((m.psi_anchored.iter().sum::<f64>() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn straight_synthetic_rays_give_exact_regressions() {
        let j = [0.3, -0.2];
        let dirs = [[1.0f64, 0.0], [0.0, -1.0], [-1.0, 1.0]].map(|d| {
            let n = (d[0] * d[0] + d[1] * d[1]).sqrt();
            [d[0] / n, d[1] / n]
        });
        let lines: Vec<InterfaceLine> = dirs
            .iter()
            .flat_map(|d| {
                let pts: Vec<Point> = (1..10).map(|k| [j[0] + 0.1 * k as f64 * d[0], j[1] + 0.1 * k as f64 * d[1]]).collect();
                [fit_line(&pts, j, true), fit_line(&pts, j, false)]
            })
            .collect();
        let anch = sector_angles([lines[0].direction, lines[2].direction, lines[4].direction]);
        let free = sector_angles([lines[1].direction, lines[3].direction, lines[5].direction]);
        let expect = [PI / 2.0, 3.0 * PI / 4.0, 3.0 * PI / 4.0];
        for k in 0..3 {
            assert!((anch[k] - expect[k]).abs() < 1e-12, "{anch:?}");
            assert!((free[k] - expect[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_by_quarter_turn_preserves_angles() {
        let d = square(120, 1.0);
        let rays = [0.3, -1.4, 2.2];
        let a = measure_angles(&d, &sectors(&d, [0.05, 0.02], rays, 0.1), None).unwrap();
        let rot = rays.map(|r| r + PI / 2.0);
        let b = measure_angles(&d, &sectors(&d, [-0.02, 0.05], rot, 0.1), None).unwrap();
        for k in 0..3 {
            assert!((a.psi_anchored[k] - b.psi_anchored[k]).abs() < 0.03);
        }
    }

    #[test]
    fn sampling_constant_and_linear_fields() {
        let d = square(40, 1.0);
        let c = ScalarField::constant(&d, 0.7);
        let seg = vec![vec![[-0.9, 0.0], [0.0, 0.0]], vec![[0.0, 0.0], [0.9, 0.0]]];
        let s = sample_q_along_segments(&d, &c, &seg, 50).unwrap();
        assert!(s.q.iter().all(|v| (v - 0.7).abs() < 1e-14));
        let x = d.field_from_fn(|x, _| x);
        let s = sample_q_along_segments(&d, &x, &seg, 50).unwrap();
        for (a, b) in s.s.iter().zip(&s.q) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((s.s[0] + 0.9).abs() < 1e-14);
        let out = vec![vec![[0.0, 0.0], [1.5, 0.0]]];
        assert!(matches!(sample_q_along_segments(&d, &x, &out, 10), Err(TricapError::OutsideDomain { .. })));
    }

    #[test]
    fn lp_error_examples() {
        assert_eq!(lp_errors(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), (0.0, 0.0));
        assert_eq!(lp_errors(&[3.0, 4.0], &[0.0, 0.0]).unwrap(), (4.0, 5.0));
        assert_eq!(lp_errors(&[1.0; 4], &[0.0; 4]).unwrap(), (1.0, 2.0));
        assert!(lp_errors(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn eoc_examples() {
        let r = eoc(&[(0.08, 0.005887), (0.04, 0.003132)]).unwrap();
        assert!((r[0] - 0.910448).abs() < 1e-5, "{r:?}");
        let lin = eoc(&[(0.1, 0.3), (0.05, 0.15), (0.025, 0.075)]).unwrap();
        assert!(lin.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let quad = eoc(&[(0.1, 0.02), (0.05, 0.005)]).unwrap();
        assert!((quad[0] - 2.0).abs() < 1e-12);
        assert!(eoc(&[(0.1, 0.0), (0.05, 1.0)]).is_err());
    }

    #[test]
    fn contour_of_linear_field_is_a_vertical_line() {
        let d = square(20, 0.5);
        let f = d.field_from_fn(|x, _| x - 0.0);
        let lines = level_set_polylines(&d, &f, 0.0);
        assert_eq!(lines.len(), 1);
        assert!(lines[0].iter().all(|p| p[0].abs() < 1e-12));
        assert!(level_set_polylines(&d, &ScalarField::constant(&d, 1.0), 0.0).is_empty());
    }

    #[test]
    fn circle_contour_length_converges() {
        let r = 0.6;
        let err = |n: usize| {
            let d = square(n, 1.0);
            let f = d.field_from_fn(|x, y| x * x + y * y - r * r);
            let lines = level_set_polylines(&d, &f, 0.0);
            assert_eq!(lines.len(), 1);
            assert_eq!(lines[0].first(), lines[0].last());
            (polyline_length_of(&lines[0]) - 2.0 * PI * r).abs()
        };
        let (a, b) = (err(40), err(80));
        assert!(b < a && b < 5e-3, "{a} {b}");
    }
}
