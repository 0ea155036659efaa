//! Convex polytopes in 2-D and 3-D given as intersections of half-spaces.
//!
//! Vertices are enumerated by solving every triple (pair, in 2-D) of
//! boundary planes and keeping the feasible solutions. With at most ~20
//! planes this brute-force approach is cheap and easy to audit.

use thiserror::Error;

use crate::linalg::{det3, solve3};

pub type Point3 = [f64; 3];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("polytope is unbounded")]
    Unbounded,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}

/// Tolerances for vertex enumeration, both relative to the polytope scale
/// (the largest half-space offset).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeomTolerance {
    /// Slack allowed when checking `n . x <= c`.
    pub feas: f64,
    /// Two vertices closer than this are merged.
    pub dedup: f64,
}

impl Default for GeomTolerance {
    fn default() -> Self {
        GeomTolerance { feas: 1e-9, dedup: 1e-7 }
    }
}

/// `{x : normal . x <= offset}` with a unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSpace {
    pub normal: Point3,
    pub offset: f64,
}

impl HalfSpace {
    /// Normalises `normal`; the caller must pass a nonzero vector.
    pub fn new(normal: Point3, offset: f64) -> Self {
        let len = norm(&normal);
        assert!(len > 0.0, "half-space normal must be nonzero");
        HalfSpace { normal: scale(&normal, 1.0 / len), offset: offset / len }
    }

    /// The Voronoi half-space `x . v <= |v|^2 / 2` of a lattice vector `v`.
    pub fn bisector(v: &Point3) -> Self {
        Self::new(*v, 0.5 * dot(v, v))
    }

    pub fn slack(&self, p: &Point3) -> f64 {
        self.offset - dot(&self.normal, p)
    }
}

/// A bounded convex polyhedron with cached vertices and volume.
#[derive(Debug, Clone)]
pub struct Polyhedron3 {
    halfspaces: Vec<HalfSpace>,
    vertices: Vec<Point3>,
    volume: f64,
    tol: GeomTolerance,
}

impl Polyhedron3 {
    pub fn from_halfspaces(halfspaces: Vec<HalfSpace>) -> Result<Self, GeomError> {
        Self::with_tolerance(halfspaces, GeomTolerance::default())
    }

    pub fn with_tolerance(halfspaces: Vec<HalfSpace>, tol: GeomTolerance) -> Result<Self, GeomError> {
        let halfspaces = merge_parallel(halfspaces);
        let vertices = halfspace_vertices_with(&halfspaces, tol)?;
        let volume = faces_volume(&halfspaces, &vertices, tol);
        Ok(Polyhedron3 { halfspaces, vertices, volume, tol })
    }

    /// Axis-aligned box `lo <= x <= hi`.
    pub fn axis_box(lo: Point3, hi: Point3) -> Result<Self, GeomError> {
        let mut hs = Vec::with_capacity(6);
        for i in 0..3 {
            let mut e = [0.0; 3];
            e[i] = 1.0;
            hs.push(HalfSpace::new(e, hi[i]));
            e[i] = -1.0;
            hs.push(HalfSpace::new(e, -lo[i]));
        }
        Self::from_halfspaces(hs)
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn tolerance(&self) -> GeomTolerance {
        self.tol
    }

    /// Faces with at least three vertices, as (half-space index, vertex indices).
    pub fn faces(&self) -> Vec<(usize, Vec<usize>)> {
        let eps = face_eps(&self.halfspaces, self.tol);
        self.halfspaces
            .iter()
            .enumerate()
            .filter_map(|(i, h)| {
                let on: Vec<usize> = (0..self.vertices.len())
                    .filter(|&k| h.slack(&self.vertices[k]).abs() <= eps)
                    .collect();
                (on.len() >= 3 && polygon_area(h, &on.iter().map(|&k| self.vertices[k]).collect::<Vec<_>>()) > eps * eps)
                    .then_some((i, on))
            })
            .collect()
    }

    pub fn max_vertex_norm(&self) -> f64 {
        self.vertices.iter().map(norm).fold(0.0, f64::max)
    }
}

/// Half-space union of both constraint sets, re-verticised.
pub fn intersect(p: &Polyhedron3, q: &Polyhedron3) -> Result<Polyhedron3, GeomError> {
    let mut hs = p.halfspaces.clone();
    hs.extend_from_slice(&q.halfspaces);
    Polyhedron3::with_tolerance(hs, p.tol)
}

/// Vertices of `{x : n_i . x <= c_i}` with default tolerances.
pub fn halfspace_vertices(halfspaces: &[HalfSpace]) -> Result<Vec<Point3>, GeomError> {
    halfspace_vertices_with(halfspaces, GeomTolerance::default())
}

pub fn halfspace_vertices_with(halfspaces: &[HalfSpace], tol: GeomTolerance) -> Result<Vec<Point3>, GeomError> {
    if halfspaces.len() < 4 {
        return Err(DegenerateInput(format!("{} half-spaces, need at least 4", halfspaces.len())));
    }
    if normal_rank(halfspaces) < 3 {
        return Err(DegenerateInput("normals do not span R^3".into()));
    }
    let s = polytope_scale(halfspaces);
    // Probe box far outside any bounded polytope of this scale.
    let probe = 1e6 * s;
    let mut planes = halfspaces.to_vec();
    for i in 0..3 {
        let mut e = [0.0; 3];
        e[i] = 1.0;
        planes.push(HalfSpace { normal: e, offset: probe });
        e[i] = -1.0;
        planes.push(HalfSpace { normal: e, offset: probe });
    }
    let m = halfspaces.len();
    let feas = tol.feas * s;
    let dedup = tol.dedup * s;
    let mut out: Vec<Point3> = Vec::new();
    for i in 0..planes.len() {
        for j in i + 1..planes.len() {
            for k in j + 1..planes.len() {
                let (a, b, c) = (&planes[i], &planes[j], &planes[k]);
                let Some(x) = solve3([a.normal, b.normal, c.normal], [a.offset, b.offset, c.offset], 1e-12) else {
                    continue;
                };
                if !planes[..m].iter().all(|h| h.slack(&x) >= -feas) {
                    continue;
                }
                if x.iter().any(|v| v.abs() >= probe * (1.0 - 1e-9)) {
                    return Err(GeomError::Unbounded);
                }
                if !out.iter().any(|y| dist(y, &x) <= dedup) {
                    out.push(x);
                }
            }
        }
    }
    Ok(out)
}

use GeomError::DegenerateInput;

/// Convex-hull volume of a point set, with a flag for flat input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeResult {
    pub volume: f64,
    pub degenerate: bool,
}

/// Volume of the convex hull of `vertices` by a centroid fan over hull faces.
/// Coplanar (or fewer than four) points give volume 0 with `degenerate` set.
pub fn polytope_volume(vertices: &[Point3]) -> VolumeResult {
    let tol = GeomTolerance::default();
    let s = vertices.iter().map(norm).fold(0.0, f64::max).max(1e-300);
    let mut pts: Vec<Point3> = Vec::new();
    for v in vertices {
        if !pts.iter().any(|p| dist(p, v) <= tol.dedup * s) {
            pts.push(*v);
        }
    }
    let flat = VolumeResult { volume: 0.0, degenerate: true };
    if pts.len() < 4 {
        return flat;
    }
    let eps = tol.feas * s * 10.0;
    let mut facets: Vec<HalfSpace> = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            for k in j + 1..pts.len() {
                let n = cross(&sub(&pts[j], &pts[i]), &sub(&pts[k], &pts[i]));
                if norm(&n) <= 1e-12 * s * s {
                    continue;
                }
                let h = HalfSpace::new(n, dot(&n, &pts[i]));
                let (mut above, mut below) = (false, false);
                for p in &pts {
                    let sl = h.slack(p);
                    above |= sl < -eps;
                    below |= sl > eps;
                }
                let facet = match (above, below) {
                    (false, true) => h,
                    (true, false) => HalfSpace { normal: scale(&h.normal, -1.0), offset: -h.offset },
                    _ => continue,
                };
                if !facets.iter().any(|f| dist(&f.normal, &facet.normal) <= 1e-9 && (f.offset - facet.offset).abs() <= eps) {
                    facets.push(facet);
                }
            }
        }
    }
    if facets.len() < 4 {
        return flat;
    }
    VolumeResult { volume: faces_volume(&facets, &pts, tol), degenerate: false }
}

fn polytope_scale(hs: &[HalfSpace]) -> f64 {
    let s = hs.iter().map(|h| h.offset.abs()).fold(0.0, f64::max);
    if s > 0.0 { s } else { 1.0 }
}

fn face_eps(hs: &[HalfSpace], tol: GeomTolerance) -> f64 {
    10.0 * tol.feas * polytope_scale(hs)
}

/// Keep only the tightest of (numerically) parallel, same-direction half-spaces.
fn merge_parallel(hs: Vec<HalfSpace>) -> Vec<HalfSpace> {
    let mut out: Vec<HalfSpace> = Vec::with_capacity(hs.len());
    for h in hs {
        match out.iter_mut().find(|g| dist(&g.normal, &h.normal) <= 1e-12) {
            Some(g) => g.offset = g.offset.min(h.offset),
            None => out.push(h),
        }
    }
    out
}

fn normal_rank(hs: &[HalfSpace]) -> usize {
    let mut best = 0;
    'outer: for i in 0..hs.len() {
        for j in i + 1..hs.len() {
            let c = cross(&hs[i].normal, &hs[j].normal);
            if norm(&c) > 1e-9 {
                best = best.max(2);
                for k in j + 1..hs.len() {
                    if det3(&[hs[i].normal, hs[j].normal, hs[k].normal]).abs() > 1e-9 {
                        best = 3;
                        break 'outer;
                    }
                }
            }
        }
        best = best.max(1);
    }
    best
}

/// Sum over faces of pyramid volumes with apex at the vertex centroid.
fn faces_volume(hs: &[HalfSpace], vertices: &[Point3], tol: GeomTolerance) -> f64 {
    if vertices.len() < 4 {
        return 0.0;
    }
    let eps = face_eps(hs, tol);
    let apex = centroid(vertices);
    let mut vol = 0.0;
    for h in hs {
        let on: Vec<Point3> = vertices.iter().filter(|v| h.slack(v).abs() <= eps).copied().collect();
        if on.len() < 3 {
            continue;
        }
        let height = h.slack(&apex);
        vol += polygon_area(h, &on) * height.max(0.0) / 3.0;
    }
    vol
}

/// Area of the convex polygon formed by coplanar points on the plane of `h`.
fn polygon_area(h: &HalfSpace, pts: &[Point3]) -> f64 {
    if pts.len() < 3 {
        return 0.0;
    }
    let (e1, e2) = plane_basis(&h.normal);
    let c = centroid(pts);
    let mut uv: Vec<(f64, f64)> = pts
        .iter()
        .map(|p| {
            let d = sub(p, &c);
            (dot(&d, &e1), dot(&d, &e2))
        })
        .collect();
    uv.sort_by(|a, b| a.1.atan2(a.0).total_cmp(&b.1.atan2(b.0)));
    shoelace(&uv)
}

fn shoelace(uv: &[(f64, f64)]) -> f64 {
    let n = uv.len();
    let mut a = 0.0;
    for i in 0..n {
        let (x0, y0) = uv[i];
        let (x1, y1) = uv[(i + 1) % n];
        a += x0 * y1 - x1 * y0;
    }
    0.5 * a.abs()
}

fn plane_basis(n: &Point3) -> (Point3, Point3) {
    let pick = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = cross(n, &pick);
    let e1 = scale(&e1, 1.0 / norm(&e1));
    let e2 = cross(n, &e1);
    (e1, e2)
}

/// A convex polygon given by half-planes `normal . x <= offset`.
#[derive(Debug, Clone)]
pub struct Polygon2 {
    halfplanes: Vec<([f64; 2], f64)>,
    vertices: Vec<[f64; 2]>,
    area: f64,
}

impl Polygon2 {
    pub fn from_halfplanes(halfplanes: Vec<([f64; 2], f64)>) -> Result<Self, GeomError> {
        if halfplanes.len() < 3 {
            return Err(DegenerateInput(format!("{} half-planes, need at least 3", halfplanes.len())));
        }
        let tol = GeomTolerance::default();
        let hp: Vec<([f64; 2], f64)> = halfplanes
            .into_iter()
            .map(|(n, c)| {
                let l = (n[0] * n[0] + n[1] * n[1]).sqrt();
                assert!(l > 0.0, "half-plane normal must be nonzero");
                ([n[0] / l, n[1] / l], c / l)
            })
            .collect();
        let s = hp.iter().map(|h| h.1.abs()).fold(0.0, f64::max).max(1e-300);
        let probe = 1e6 * s;
        let mut planes = hp.clone();
        planes.extend([([1.0, 0.0], probe), ([-1.0, 0.0], probe), ([0.0, 1.0], probe), ([0.0, -1.0], probe)]);
        let mut verts: Vec<[f64; 2]> = Vec::new();
        for i in 0..planes.len() {
            for j in i + 1..planes.len() {
                let (a, b) = (planes[i], planes[j]);
                let det = a.0[0] * b.0[1] - a.0[1] * b.0[0];
                if det.abs() <= 1e-12 {
                    continue;
                }
                let x = [(a.1 * b.0[1] - a.0[1] * b.1) / det, (a.0[0] * b.1 - a.1 * b.0[0]) / det];
                if !hp.iter().all(|h| h.1 - (h.0[0] * x[0] + h.0[1] * x[1]) >= -tol.feas * s) {
                    continue;
                }
                if x.iter().any(|v| v.abs() >= probe * (1.0 - 1e-9)) {
                    return Err(GeomError::Unbounded);
                }
                if !verts.iter().any(|y| ((y[0] - x[0]).powi(2) + (y[1] - x[1]).powi(2)).sqrt() <= tol.dedup * s) {
                    verts.push(x);
                }
            }
        }
        let (cx, cy) = verts.iter().fold((0.0, 0.0), |acc, v| (acc.0 + v[0], acc.1 + v[1]));
        let k = verts.len().max(1) as f64;
        let (cx, cy) = (cx / k, cy / k);
        verts.sort_by(|a, b| (a[1] - cy).atan2(a[0] - cx).total_cmp(&(b[1] - cy).atan2(b[0] - cx)));
        let area = if verts.len() >= 3 { shoelace(&verts.iter().map(|v| (v[0], v[1])).collect::<Vec<_>>()) } else { 0.0 };
        Ok(Polygon2 { halfplanes: hp, vertices: verts, area })
    }

    /// Counter-clockwise vertices.
    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn halfplanes(&self) -> &[([f64; 2], f64)] {
        &self.halfplanes
    }

    /// Number of half-planes supporting an edge of positive length.
    pub fn edge_count(&self) -> usize {
        let s = self.halfplanes.iter().map(|h| h.1.abs()).fold(0.0, f64::max).max(1e-300);
        self.halfplanes
            .iter()
            .filter(|h| {
                self.vertices
                    .iter()
                    .filter(|v| (h.1 - (h.0[0] * v[0] + h.0[1] * v[1])).abs() <= 1e-8 * s)
                    .count()
                    >= 2
            })
            .count()
    }
}

pub fn dot(a: &Point3, b: &Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: &Point3) -> f64 {
    dot(a, a).sqrt()
}

pub fn cross(a: &Point3, b: &Point3) -> Point3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn sub(a: &Point3, b: &Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn scale(a: &Point3, s: f64) -> Point3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn dist(a: &Point3, b: &Point3) -> f64 {
    norm(&sub(a, b))
}

fn centroid(pts: &[Point3]) -> Point3 {
    let k = pts.len() as f64;
    let s = pts.iter().fold([0.0; 3], |acc, p| [acc[0] + p[0], acc[1] + p[1], acc[2] + p[2]]);
    scale(&s, 1.0 / k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_cube() -> Polyhedron3 {
        Polyhedron3::axis_box([-0.5; 3], [0.5; 3]).unwrap()
    }

    fn voronoi_from(vectors: &[Point3]) -> Polyhedron3 {
        let hs = vectors
            .iter()
            .flat_map(|v| [HalfSpace::bisector(v), HalfSpace::bisector(&scale(v, -1.0))])
            .collect();
        Polyhedron3::from_halfspaces(hs).unwrap()
    }

    #[test]
    fn cube_vertices_and_volume() {
        let c = unit_cube();
        assert_eq!(c.vertices().len(), 8);
        for v in c.vertices() {
            assert!(v.iter().all(|x| (x.abs() - 0.5).abs() < 1e-15));
        }
        assert!((c.volume() - 1.0).abs() < 1e-12);
        assert_eq!(c.faces().len(), 6);
    }

    #[test]
    fn bcc_voronoi_is_truncated_octahedron() {
        // obtuse superbase of the BCC basis with unit first vector
        let r2 = 2f64.sqrt();
        let v1 = [1.0, 0.0, 0.0];
        let v2 = [-1.0 / 3.0, 2.0 * r2 / 3.0, 0.0];
        let v3 = [-1.0 / 3.0, -r2 / 3.0, (2.0f64 / 3.0).sqrt()];
        let add = |a: &Point3, b: &Point3| [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
        let vs = [v1, v2, v3, add(&v1, &v2), add(&v1, &v3), add(&v2, &v3), add(&add(&v1, &v2), &v3)];
        let p = voronoi_from(&vs);
        assert_eq!(p.vertices().len(), 24);
        assert_eq!(p.faces().len(), 14);
        let det = 1.0 * (2.0 * r2 / 3.0) * (2.0f64 / 3.0).sqrt();
        assert!((p.volume() - det).abs() < 1e-9 * det);
    }

    #[test]
    fn hexagonal_prism_has_twelve_vertices() {
        let h = 3f64.sqrt() / 2.0;
        let v1 = [1.0, 0.0, 0.0];
        let v2 = [-0.5, h, 0.0];
        let v12 = [0.5, h, 0.0];
        let p = voronoi_from(&[v1, v2, v12, [0.0, 0.0, 1.0]]);
        assert_eq!(p.vertices().len(), 12);
        // the hexagon of the planar lattice, extruded by +-1/2
        let circ = 1.0 / 3f64.sqrt();
        for v in p.vertices() {
            assert!(((v[0] * v[0] + v[1] * v[1]).sqrt() - circ).abs() < 1e-12);
            assert!((v[2].abs() - 0.5).abs() < 1e-12);
        }
        assert!((p.volume() - h).abs() < 1e-12);
    }

    #[test]
    fn tetrahedron_and_cube_from_points() {
        let t = polytope_volume(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(!t.degenerate);
        assert!((t.volume - 1.0 / 6.0).abs() < 1e-14);
        let cube = unit_cube();
        let c = polytope_volume(cube.vertices());
        assert!((c.volume - 1.0).abs() < 1e-12);
        let flat = polytope_volume(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]]);
        assert!(flat.degenerate);
        assert_eq!(flat.volume, 0.0);
    }

    #[test]
    fn intersection_properties() {
        let c = unit_cube();
        let same = intersect(&c, &c).unwrap();
        assert!((same.volume() - 1.0).abs() < 1e-12);
        let far = Polyhedron3::axis_box([10.0; 3], [11.0; 3]).unwrap();
        let empty = intersect(&c, &far).unwrap();
        assert!(empty.is_empty());
        assert_eq!(empty.volume(), 0.0);
        let shifted = Polyhedron3::axis_box([0.0; 3], [1.0; 3]).unwrap();
        let i = intersect(&c, &shifted).unwrap();
        assert!((i.volume() - 0.125).abs() < 1e-12);
    }

    #[test]
    fn unbounded_and_degenerate() {
        let hs = vec![
            HalfSpace::new([1.0, 0.0, 0.0], 1.0),
            HalfSpace::new([0.0, 1.0, 0.0], 1.0),
            HalfSpace::new([0.0, 0.0, 1.0], 1.0),
            HalfSpace::new([-1.0, 0.0, 0.0], 1.0),
        ];
        assert_eq!(halfspace_vertices(&hs).unwrap_err(), GeomError::Unbounded);
        assert!(matches!(halfspace_vertices(&hs[..3]), Err(GeomError::DegenerateInput(_))));
        let planar = vec![
            HalfSpace::new([1.0, 0.0, 0.0], 1.0),
            HalfSpace::new([-1.0, 0.0, 0.0], 1.0),
            HalfSpace::new([0.0, 1.0, 0.0], 1.0),
            HalfSpace::new([0.0, -1.0, 0.0], 1.0),
        ];
        assert!(matches!(halfspace_vertices(&planar), Err(GeomError::DegenerateInput(_))));
    }

    #[test]
    fn hexagon_polygon() {
        let h = 3f64.sqrt() / 2.0;
        let vs = [[1.0, 0.0], [0.5, h], [-0.5, h]];
        let hp = vs
            .iter()
            .flat_map(|v| {
                let c = 0.5 * (v[0] * v[0] + v[1] * v[1]);
                [(*v, c), ([-v[0], -v[1]], c)]
            })
            .collect();
        let p = Polygon2::from_halfplanes(hp).unwrap();
        assert_eq!(p.vertices().len(), 6);
        assert_eq!(p.edge_count(), 6);
        assert!((p.area() - h).abs() < 1e-12);
    }
}
