//! Obtuse superbases, Voronoi-relevant vectors and Voronoi cells for n = 2, 3.

use std::fmt;

use serde::Serialize;

use super::reduce::minkowski_reduce;
use super::{LatticeBasis, LatticeError};
use crate::geometry::{HalfSpace, Polygon2, Polyhedron3};

/// Conorm magnitude below which a conorm counts as zero (unit-scale lattices).
pub const EPS_CONORM: f64 = 1e-9;

/// `v_0, ..., v_n` with `sum v_i = 0` and `v_i . v_j <= 0` for `i != j`.
#[derive(Debug, Clone)]
pub struct ObtuseSuperbase {
    vectors: Vec<Vec<f64>>,
    conorms: Vec<Vec<f64>>,
}

impl ObtuseSuperbase {
    /// Validates the invariants (tolerance relative to the largest squared norm).
    pub fn new(vectors: Vec<Vec<f64>>) -> Result<Self, LatticeError> {
        let k = vectors.len();
        if !(3..=4).contains(&k) || vectors.iter().any(|v| v.len() != k - 1) {
            return Err(LatticeError::DimensionMismatch(format!("superbase of {k} vectors")));
        }
        let scale = vectors.iter().map(|v| dot(v, v)).fold(0.0, f64::max);
        let sum: Vec<f64> = (0..k - 1).map(|i| vectors.iter().map(|v| v[i]).sum()).collect();
        if dot(&sum, &sum).sqrt() > 1e-9 * scale.sqrt().max(1.0) {
            return Err(LatticeError::NoObtuseSuperbaseFound);
        }
        let conorms: Vec<Vec<f64>> =
            (0..k).map(|i| (0..k).map(|j| if i == j { 0.0 } else { -dot(&vectors[i], &vectors[j]) }).collect()).collect();
        if conorms.iter().flatten().any(|&p| p < -1e-9 * scale) {
            return Err(LatticeError::NoObtuseSuperbaseFound);
        }
        Ok(ObtuseSuperbase { vectors, conorms })
    }

    pub fn dim(&self) -> usize {
        self.vectors.len() - 1
    }

    /// `v_0, ..., v_n`.
    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// `p_ij = -v_i . v_j`.
    pub fn conorm(&self, i: usize, j: usize) -> f64 {
        self.conorms[i][j]
    }

    /// All `(i, j, p_ij)` with `i < j`.
    pub fn conorms(&self) -> Vec<(usize, usize, f64)> {
        let k = self.vectors.len();
        (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).map(|(i, j)| (i, j, self.conorms[i][j])).collect()
    }

    /// Sums `v_S` over nonempty `S` of `{1..n}` (each Voronoi vector pair once)
    /// with their squared norms.
    pub fn vonorms(&self) -> Vec<(Vec<usize>, Vec<f64>, f64)> {
        let n = self.dim();
        (1u32..(1 << n))
            .map(|mask| {
                let s: Vec<usize> = (1..=n).filter(|&i| mask & (1 << (i - 1)) != 0).collect();
                let v: Vec<f64> = (0..n).map(|c| s.iter().map(|&i| self.vectors[i][c]).sum()).collect();
                let nn = dot(&v, &v);
                (s, v, nn)
            })
            .collect()
    }

    /// `+-v_S`: candidates for the Voronoi-relevant vectors (14 in 3-D, 6 in 2-D).
    pub fn relevant_vectors(&self) -> Vec<Vec<f64>> {
        self.vonorms().into_iter().flat_map(|(_, v, _)| [v.clone(), v.iter().map(|x| -x).collect()]).collect()
    }

    pub fn cell_type(&self) -> CellType {
        classify(self, EPS_CONORM)
    }
}

/// Searches sign flips of a Minkowski-reduced basis (norm-sorted order) for a
/// pairwise-obtuse choice, falling back to Selling reduction.
pub fn obtuse_superbase(b: &LatticeBasis) -> Result<ObtuseSuperbase, LatticeError> {
    let n = b.dim();
    if !(2..=3).contains(&n) {
        return Err(LatticeError::UnsupportedDimension { n, max: 3 });
    }
    let reduced = minkowski_reduce(b)?.basis.vectors();
    let scale = reduced.iter().map(|v| dot(v, v)).fold(0.0, f64::max);
    let tol = 1e-9 * scale;
    for mask in 0u32..(1 << (n - 1)) {
        let mut vs: Vec<Vec<f64>> = reduced.clone();
        for (i, v) in vs.iter_mut().enumerate().skip(1) {
            if mask & (1 << (i - 1)) != 0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        let v0: Vec<f64> = (0..n).map(|c| -vs.iter().map(|v| v[c]).sum::<f64>()).collect();
        let mut all = vec![v0];
        all.extend(vs);
        if pairwise_obtuse(&all, tol) {
            return ObtuseSuperbase::new(all);
        }
    }
    selling(reduced, tol)
}

fn pairwise_obtuse(vs: &[Vec<f64>], tol: f64) -> bool {
    (0..vs.len()).all(|i| (i + 1..vs.len()).all(|j| dot(&vs[i], &vs[j]) <= tol))
}

/// Selling reduction: while some `v_i . v_j > 0`, replace `v_i -> -v_i` and
/// add `v_i` to each remaining vector (2-D: add `2 v_i` to the third).
fn selling(basis: Vec<Vec<f64>>, tol: f64) -> Result<ObtuseSuperbase, LatticeError> {
    let n = basis.len();
    let v0: Vec<f64> = (0..n).map(|c| -basis.iter().map(|v| v[c]).sum::<f64>()).collect();
    let mut vs = vec![v0];
    vs.extend(basis);
    for _ in 0..10_000 {
        let Some((i, j)) = (0..=n)
            .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
            .find(|&(i, j)| dot(&vs[i], &vs[j]) > tol)
        else {
            return ObtuseSuperbase::new(vs);
        };
        let vi = vs[i].clone();
        let others: Vec<usize> = (0..=n).filter(|&k| k != i && k != j).collect();
        let factor = if n == 2 { 2.0 } else { 1.0 };
        for k in others {
            for c in 0..n {
                vs[k][c] += factor * vi[c];
            }
        }
        vs[i].iter_mut().for_each(|x| *x = -*x);
    }
    Err(LatticeError::NoObtuseSuperbaseFound)
}

/// Voronoi cell shapes for n = 2 and n = 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellType {
    Rectangle,
    Hexagon,
    Cuboid,
    HexagonalPrism,
    RhombicDodecahedron,
    HexaRhombicDodecahedron,
    TruncatedOctahedron,
}

impl fmt::Display for CellType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CellType::Rectangle => "rectangle",
            CellType::Hexagon => "hexagon",
            CellType::Cuboid => "cuboid",
            CellType::HexagonalPrism => "hexagonal-prism",
            CellType::RhombicDodecahedron => "rhombic-dodecahedron",
            CellType::HexaRhombicDodecahedron => "hexa-rhombic-dodecahedron",
            CellType::TruncatedOctahedron => "truncated-octahedron",
        };
        f.write_str(s)
    }
}

/// Shape from the zero pattern of the conorms. In 3-D the nonzero conorms
/// form a graph on the four superbase vectors: complete (6 edges) gives the
/// truncated octahedron, 5 edges the hexa-rhombic dodecahedron, a 4-cycle the
/// rhombic dodecahedron, a triangle with a pendant edge the hexagonal prism,
/// and a spanning tree the cuboid.
pub fn classify(s: &ObtuseSuperbase, eps: f64) -> CellType {
    let zeros: Vec<(usize, usize)> =
        s.conorms().into_iter().filter(|&(_, _, p)| p.abs() <= eps).map(|(i, j, _)| (i, j)).collect();
    if s.dim() == 2 {
        return if zeros.is_empty() { CellType::Hexagon } else { CellType::Rectangle };
    }
    match zeros.len() {
        0 => CellType::TruncatedOctahedron,
        1 => CellType::HexaRhombicDodecahedron,
        2 => {
            let (a, b) = (zeros[0], zeros[1]);
            let disjoint = a.0 != b.0 && a.0 != b.1 && a.1 != b.0 && a.1 != b.1;
            if disjoint {
                CellType::RhombicDodecahedron
            } else {
                CellType::HexagonalPrism
            }
        }
        _ => CellType::Cuboid,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VoronoiCellSummary {
    pub cell_type: CellType,
    pub relevant_vectors: Vec<Vec<f64>>,
    pub vertices: Vec<Vec<f64>>,
    pub r_pack: f64,
    pub r_cov: f64,
    pub volume: f64,
    pub conorms: Vec<(usize, usize, f64)>,
}

impl VoronoiCellSummary {
    /// Half-spaces `x . v <= |v|^2 / 2` of the cell (3-D only).
    pub fn halfspaces(&self) -> Vec<HalfSpace> {
        self.relevant_vectors.iter().map(|v| HalfSpace::bisector(&[v[0], v[1], v[2]])).collect()
    }

    pub fn polyhedron(&self) -> Result<Polyhedron3, LatticeError> {
        Ok(Polyhedron3::from_halfspaces(self.halfspaces())?)
    }
}

/// Voronoi cell of the lattice generated by the superbase.
pub fn voronoi_cell(s: &ObtuseSuperbase) -> Result<VoronoiCellSummary, LatticeError> {
    let rel = s.relevant_vectors();
    let d_min = rel.iter().map(|v| dot(v, v).sqrt()).fold(f64::INFINITY, f64::min);
    let (vertices, volume) = match s.dim() {
        2 => {
            let p = Polygon2::from_halfplanes(rel.iter().map(|v| ([v[0], v[1]], 0.5 * dot(v, v))).collect())?;
            (p.vertices().iter().map(|v| v.to_vec()).collect::<Vec<_>>(), p.area())
        }
        _ => {
            let hs = rel.iter().map(|v| HalfSpace::bisector(&[v[0], v[1], v[2]])).collect();
            let p = Polyhedron3::from_halfspaces(hs)?;
            (p.vertices().iter().map(|v| v.to_vec()).collect(), p.volume())
        }
    };
    let r_cov = vertices.iter().map(|v: &Vec<f64>| dot(v, v).sqrt()).fold(0.0, f64::max);
    Ok(VoronoiCellSummary {
        cell_type: s.cell_type(),
        relevant_vectors: rel,
        vertices,
        r_pack: d_min / 2.0,
        r_cov,
        volume,
        conorms: s.conorms(),
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
