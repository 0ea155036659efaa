//! Nearest-plane rounding and an exact closest/shortest vector oracle.
//!
//! Rounding is `[x] = floor(x + 1/2)`, so ties go up and the nearest-plane
//! cell of the origin is the half-open box `[-a_i/2, a_i/2)` in triangular
//! coordinates.

use thiserror::Error;

use crate::lattice::LatticeBasis;
use crate::linalg::MatrixR;

/// Largest dimension accepted by the enumeration oracle.
pub const MAX_ENUM_DIM: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CvpError {
    #[error("zero diagonal entry r_{index}{index}")]
    ZeroDiagonal { index: usize },
    #[error("dimension {n} exceeds the enumeration limit {max}")]
    DimensionTooLarge { n: usize, max: usize },
    #[error("expected a vector of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvpResult {
    pub u: Vec<i64>,
    pub point: Vec<f64>,
    pub dist2: f64,
}

pub fn nearest_integer(x: f64) -> i64 {
    (x + 0.5).floor() as i64
}

/// Nearest-plane coefficients for an upper-triangular `r`, computed from the
/// last coordinate back to the first.
pub fn babai_coefficients(r: &MatrixR, x: &[f64]) -> Result<Vec<i64>, CvpError> {
    let n = r.dim();
    if x.len() != n {
        return Err(CvpError::DimensionMismatch { expected: n, got: x.len() });
    }
    let mut u = vec![0i64; n];
    for i in (0..n).rev() {
        let d = r[(i, i)];
        if d == 0.0 {
            return Err(CvpError::ZeroDiagonal { index: i + 1 });
        }
        let mut t = x[i];
        for j in i + 1..n {
            t -= r[(i, j)] * u[j] as f64;
        }
        u[i] = nearest_integer(t / d);
    }
    Ok(u)
}

/// Nearest-plane point of `x`, both in the frame of the triangular `r`.
pub fn babai_nearest_plane(r: &MatrixR, x: &[f64]) -> Result<CvpResult, CvpError> {
    let u = babai_coefficients(r, x)?;
    let point = r.mul_int(&u);
    let dist2 = dist2(x, &point);
    Ok(CvpResult { u, point, dist2 })
}

/// Nearest-plane point of `x` given in the basis's original frame.
pub fn babai_point(b: &LatticeBasis, x: &[f64]) -> Result<CvpResult, CvpError> {
    let y = frame(b, x)?;
    let u = babai_coefficients(b.triangular(), &y)?;
    let point = b.point(&u);
    let dist2 = dist2(x, &point);
    Ok(CvpResult { u, point, dist2 })
}

/// Exact closest lattice point to `x` (original frame).
pub fn closest_point(b: &LatticeBasis, x: &[f64]) -> Result<CvpResult, CvpError> {
    let y = frame(b, x)?;
    let res = closest_point_triangular(b.triangular(), &y)?;
    let point = b.point(&res.u);
    Ok(CvpResult { dist2: dist2(x, &point), u: res.u, point })
}

/// Exact closest point in the frame of `r`: depth-first Schnorr-Euchner
/// enumeration with the radius initialised from the nearest-plane point.
pub fn closest_point_triangular(r: &MatrixR, x: &[f64]) -> Result<CvpResult, CvpError> {
    let n = r.dim();
    if n > MAX_ENUM_DIM {
        return Err(CvpError::DimensionTooLarge { n, max: MAX_ENUM_DIM });
    }
    let start = babai_nearest_plane(r, x)?;
    let mut e = Enum::new(r, x, start.u.clone(), start.dist2, false);
    e.search(n);
    let u = e.best_u;
    let point = r.mul_int(&u);
    Ok(CvpResult { dist2: dist2(x, &point), u, point })
}

/// Shortest nonzero lattice vector and its norm.
pub fn shortest_vector(b: &LatticeBasis) -> Result<(Vec<f64>, f64), CvpError> {
    let n = b.dim();
    if n > MAX_ENUM_DIM {
        return Err(CvpError::DimensionTooLarge { n, max: MAX_ENUM_DIM });
    }
    let r = b.triangular();
    let (k, d2) = (0..n)
        .map(|j| (j, (0..=j).map(|i| r[(i, j)] * r[(i, j)]).sum::<f64>()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("n >= 1");
    let mut u0 = vec![0; n];
    u0[k] = 1;
    let zero = vec![0.0; n];
    let mut e = Enum::new(r, &zero, u0, d2, true);
    e.search(n);
    let v = b.point(&e.best_u);
    let norm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
    Ok((v, norm))
}

struct Enum<'a> {
    r: &'a MatrixR,
    x: &'a [f64],
    u: Vec<i64>,
    best_u: Vec<i64>,
    best: f64,
    exclude_zero: bool,
}

const MARGIN: f64 = 1e-9;

impl<'a> Enum<'a> {
    fn new(r: &'a MatrixR, x: &'a [f64], start: Vec<i64>, d2: f64, exclude_zero: bool) -> Self {
        let n = r.dim();
        Enum { r, x, u: vec![0; n], best_u: start, best: d2, exclude_zero }
    }

    fn bound(&self) -> f64 {
        self.best * (1.0 + MARGIN) + 1e-300
    }

    /// Fix coordinates `level-1, ..., 0` given `u[level..]`; `level == n` at the root.
    fn search(&mut self, level: usize) {
        self.descend(level, 0.0);
    }

    fn descend(&mut self, level: usize, partial: f64) {
        if level == 0 {
            if partial < self.best && !(self.exclude_zero && self.u.iter().all(|&c| c == 0)) {
                self.best = partial;
                self.best_u = self.u.clone();
            }
            return;
        }
        let i = level - 1;
        let n = self.r.dim();
        let d = self.r[(i, i)];
        let mut t = self.x[i];
        for j in i + 1..n {
            t -= self.r[(i, j)] * self.u[j] as f64;
        }
        let c = t / d;
        let c0 = nearest_integer(c);
        // candidates in order of increasing |cand - c|; stop at the first one
        // outside the bound, since the partial distance is convex in cand
        let (mut up, mut down) = (c0, c0 - 1);
        loop {
            let cand = if (up as f64 - c).abs() <= (c - down as f64).abs() { up } else { down };
            let step = d * (cand as f64 - c);
            let p = partial + step * step;
            if p > self.bound() {
                break;
            }
            self.u[i] = cand;
            self.descend(i, p);
            if cand == up {
                up += 1;
            } else {
                down -= 1;
            }
        }
        self.u[i] = 0;
    }
}

fn frame(b: &LatticeBasis, x: &[f64]) -> Result<Vec<f64>, CvpError> {
    if x.len() != b.dim() {
        return Err(CvpError::DimensionMismatch { expected: b.dim(), got: x.len() });
    }
    Ok(b.to_triangular_frame(x))
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
