//! Lattice bases with exact entries, their triangular forms and derived
//! quantities.

pub mod catalog;
pub mod file;
pub mod reduce;
pub mod superbase;

use std::f64::consts::PI;

use thiserror::Error;

use crate::geometry::GeomError;
use crate::linalg::{qr_decompose, LinalgError, MatrixR};
use crate::scalar::{Rational, ScalarError, ScalarExpr};

pub use catalog::{catalog_lookup, CatalogEntry};
pub use file::{parse_lattice_file, parse_lattice_json};
pub use reduce::{is_minkowski_reduced, minkowski_reduce, MinkowskiCheck, Reduced};
pub use superbase::{obtuse_superbase, voronoi_cell, CellType, ObtuseSuperbase, VoronoiCellSummary};

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operation supports n <= {max}, got n = {n}")]
    UnsupportedDimension { n: usize, max: usize },
    #[error("no obtuse superbase found (numerically degenerate basis?)")]
    NoObtuseSuperbaseFound,
    #[error("unknown lattice name '{0}'")]
    UnknownLattice(String),
    #[error("parse error at basis vector {vector}, component {component}: {message}")]
    Parse { vector: usize, component: usize, message: String },
    #[error("malformed lattice file: {0}")]
    Format(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

/// A full-rank lattice `{V u : u in Z^n}`; the columns of `V` are the basis
/// vectors.
///
/// Alongside the exact entries it keeps the upper-triangular form `R = Q^T V`
/// with positive diagonal. When `V` is already upper triangular, `R` is
/// obtained from `V` by flipping row signs, and the exact entries carry over.
#[derive(Clone, Debug)]
pub struct LatticeBasis {
    columns: Vec<Vec<ScalarExpr>>,
    v: MatrixR,
    r: MatrixR,
    r_exact: Option<Vec<Vec<ScalarExpr>>>,
    q: MatrixR,
    perm: Vec<usize>,
}

impl LatticeBasis {
    /// `columns[j][i]` is component `i` of basis vector `j`.
    pub fn from_columns(columns: Vec<Vec<ScalarExpr>>) -> Result<Self, LatticeError> {
        let n = columns.len();
        Self::with_perm(columns, (0..n).collect())
    }

    pub fn from_f64_columns(columns: &[Vec<f64>]) -> Result<Self, LatticeError> {
        let cols = columns
            .iter()
            .map(|c| c.iter().map(|&x| ScalarExpr::from_f64(x)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_columns(cols)
    }

    fn with_perm(columns: Vec<Vec<ScalarExpr>>, perm: Vec<usize>) -> Result<Self, LatticeError> {
        let n = columns.len();
        if n == 0 {
            return Err(LatticeError::DimensionMismatch("empty basis".into()));
        }
        for (j, c) in columns.iter().enumerate() {
            if c.len() != n {
                return Err(LatticeError::DimensionMismatch(format!(
                    "basis vector {j} has {} components, expected {n}",
                    c.len()
                )));
            }
        }
        let v = MatrixR::from_columns(&columns.iter().map(|c| c.iter().map(ScalarExpr::value).collect()).collect::<Vec<_>>())?;
        let exactly_triangular = (0..n).all(|j| (j + 1..n).all(|i| columns[j][i].is_zero()));
        let (r, q, r_exact) = if exactly_triangular {
            if (0..n).any(|i| columns[i][i].is_zero()) {
                return Err(LinalgError::SingularMatrix { det: 0.0, scale: v.frobenius() }.into());
            }
            let signs: Vec<f64> = (0..n).map(|i| columns[i][i].value().signum()).collect();
            let mut r = MatrixR::zeros(n);
            let mut q = MatrixR::zeros(n);
            let mut exact = vec![vec![ScalarExpr::zero(); n]; n];
            for i in 0..n {
                q[(i, i)] = signs[i];
                for j in i..n {
                    let e = if signs[i] < 0.0 { columns[j][i].neg() } else { columns[j][i].clone() };
                    r[(i, j)] = e.value();
                    exact[i][j] = e;
                }
            }
            (r, q, Some(exact))
        } else {
            let d = qr_decompose(&v)?;
            (d.r, d.q, None)
        };
        Ok(LatticeBasis { columns, v, r, r_exact, q, perm })
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    /// Exact basis vectors (columns of `V`).
    pub fn columns(&self) -> &[Vec<ScalarExpr>] {
        &self.columns
    }

    pub fn matrix(&self) -> &MatrixR {
        &self.v
    }

    pub fn vectors(&self) -> Vec<Vec<f64>> {
        self.v.columns()
    }

    /// Upper-triangular `R` with positive diagonal, `V = Q R`.
    pub fn triangular(&self) -> &MatrixR {
        &self.r
    }

    /// Exact entries of `R` (row-major) when `V` was given in triangular form.
    pub fn triangular_exact(&self) -> Option<&[Vec<ScalarExpr>]> {
        self.r_exact.as_deref()
    }

    pub fn q(&self) -> &MatrixR {
        &self.q
    }

    /// Column order relative to the basis this one was permuted from.
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Coordinates of `x` in the frame where the basis is `R`.
    pub fn to_triangular_frame(&self, x: &[f64]) -> Vec<f64> {
        self.q.transpose().mul_vec(x)
    }

    /// Nearest-plane cell sizes `|r_ii|`.
    pub fn babai_sizes(&self) -> Vec<f64> {
        self.r.diagonal()
    }

    /// `|det V|`, taken from the triangular form.
    pub fn volume(&self) -> f64 {
        self.r.diagonal().iter().product::<f64>().abs()
    }

    pub fn gram(&self) -> GramMatrix {
        let g = self.v.transpose().matmul(&self.v);
        let n = self.dim();
        GramMatrix { entries: (0..n).map(|i| (0..n).map(|j| g[(i, j)]).collect()).collect() }
    }

    /// Same lattice, basis vectors reordered: new column `k` is old column `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, LatticeError> {
        let n = self.dim();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(LatticeError::DimensionMismatch(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        let cols = perm.iter().map(|&p| self.columns[p].clone()).collect();
        let composed = perm.iter().map(|&p| self.perm[p]).collect();
        Self::with_perm(cols, composed)
    }

    /// The basis scaled by an exact factor.
    pub fn scaled(&self, c: &ScalarExpr) -> Result<Self, LatticeError> {
        let cols = self.columns.iter().map(|col| col.iter().map(|e| e.mul(c)).collect()).collect();
        Self::with_perm(cols, self.perm.clone())
    }

    /// `M V` for a (typically orthogonal) matrix `M`; entries become plain rationals.
    pub fn transformed(&self, m: &MatrixR) -> Result<Self, LatticeError> {
        Self::from_f64_columns(&m.matmul(&self.v).columns())
    }

    /// Integer combination `V u` with exact entries where radicands allow.
    pub fn combine(&self, u: &[i64]) -> Vec<ScalarExpr> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut acc = Some(ScalarExpr::zero());
                let mut approx = 0.0;
                for (j, &c) in u.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    let term = self.columns[j][i].mul(&ScalarExpr::integer(c));
                    approx += term.value();
                    acc = acc.and_then(|a| a.checked_add(&term));
                }
                acc.unwrap_or_else(|| ScalarExpr::from_f64(approx).unwrap_or_else(|_| ScalarExpr::zero()))
            })
            .collect()
    }

    /// Lattice point `V u` as doubles.
    pub fn point(&self, u: &[i64]) -> Vec<f64> {
        self.v.mul_int(u)
    }
}

/// `A = V^T V`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix {
    pub entries: Vec<Vec<f64>>,
}

impl GramMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }
}

pub fn gram(b: &LatticeBasis) -> GramMatrix {
    b.gram()
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    PI.powf(h) / statrs::function::gamma::gamma(h + 1.0)
}

/// Packing density from a known minimum distance.
pub fn density_from_dmin(n: usize, d_min: f64, volume: f64) -> f64 {
    unit_ball_volume(n) * (d_min / 2.0).powi(n as i32) / volume
}

/// Packing density `vol(ball of radius d_min/2) / vol(lattice)`.
///
/// `d_min` comes from the Voronoi-relevant vectors for n <= 3 and from the
/// enumeration oracle otherwise.
pub fn packing_density(b: &LatticeBasis) -> Result<f64, LatticeError> {
    let n = b.dim();
    let d_min = if (2..=3).contains(&n) {
        voronoi_cell(&obtuse_superbase(b)?)?.r_pack * 2.0
    } else {
        crate::cvp::shortest_vector(b).map_err(|e| LatticeError::DimensionMismatch(e.to_string()))?.1
    };
    Ok(density_from_dmin(n, d_min, b.volume()))
}

pub(crate) fn rat(p: i64, q: i64) -> Rational {
    Rational::new(p, q)
}

/// `r * sqrt(s)` from small integer fractions; panics only on a programming error.
pub(crate) fn surd(rp: i64, rq: i64, sp: i64, sq: i64) -> ScalarExpr {
    ScalarExpr::with_sqrt(rat(rp, rq), rat(sp, sq)).expect("positive radicand")
}

pub(crate) fn ratx(p: i64, q: i64) -> ScalarExpr {
    ScalarExpr::rational(rat(p, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hexagonal() -> LatticeBasis {
        LatticeBasis::from_columns(vec![vec![ratx(1, 1), ratx(0, 1)], vec![ratx(1, 2), surd(1, 2, 3, 1)]]).unwrap()
    }

    #[test]
    fn gram_examples() {
        let z2 = LatticeBasis::from_f64_columns(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(gram(&z2).entries, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let g = gram(&hexagonal());
        assert!((g.get(0, 1) - 0.5).abs() < 1e-15 && (g.get(1, 1) - 1.0).abs() < 1e-15);
        let bcc = catalog_lookup("BCC").unwrap().basis.unwrap();
        let g = gram(&bcc);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { -1.0 / 3.0 };
                assert!((g.get(i, j) - want).abs() < 1e-15, "{i},{j}");
            }
        }
    }

    #[test]
    fn triangular_input_keeps_exact_entries() {
        let h = hexagonal();
        let r = h.triangular_exact().unwrap();
        assert_eq!(r[0][1].to_string(), "1/2");
        assert_eq!(r[1][1].to_string(), "1/2*sqrt(3)");
        assert!((h.volume() - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn negative_diagonal_is_flipped() {
        let b = LatticeBasis::from_f64_columns(&[vec![-2.0, 0.0], vec![1.0, 3.0]]).unwrap();
        assert_eq!(b.babai_sizes(), vec![2.0, 3.0]);
        assert_eq!(b.triangular()[(0, 1)], -1.0);
        let x = [-2.0, 0.0];
        assert_eq!(b.to_triangular_frame(&x), vec![2.0, 0.0]);
    }

    #[test]
    fn general_basis_goes_through_qr() {
        let fcc = catalog_lookup("FCC").unwrap().basis.unwrap();
        assert!(fcc.triangular_exact().is_none());
        assert!((fcc.volume() - 0.5f64.sqrt()).abs() < 1e-12);
        let r = fcc.triangular();
        let rtr = r.transpose().matmul(r);
        let g = fcc.gram();
        for i in 0..3 {
            for j in 0..3 {
                assert!((rtr[(i, j)] - g.get(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn permutation_composes() {
        let fcc = catalog_lookup("FCC").unwrap().basis.unwrap();
        let p = fcc.permuted(&[2, 0, 1]).unwrap().permuted(&[1, 2, 0]).unwrap();
        assert_eq!(p.permutation(), &[0, 1, 2]);
        assert!(fcc.permuted(&[0, 0, 1]).is_err());
    }

    #[test]
    fn combine_is_exact_when_possible() {
        let h = hexagonal();
        let v = h.combine(&[1, 2]);
        assert_eq!(v[0].to_string(), "2");
        assert_eq!(v[1].to_string(), "sqrt(3)");
    }

    #[test]
    fn densities() {
        let z3 = catalog_lookup("Z3").unwrap().basis.unwrap();
        assert!((packing_density(&z3).unwrap() - PI / 6.0).abs() < 1e-12);
        let fcc = catalog_lookup("FCC").unwrap().basis.unwrap();
        let d = packing_density(&fcc).unwrap();
        assert!((d - 0.7404).abs() < 1e-4, "{d}");
        assert!((packing_density(&hexagonal()).unwrap() - PI / (2.0 * 3f64.sqrt())).abs() < 1e-12);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-12);
    }
}
