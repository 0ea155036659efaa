//! Two-dimensional lattices `{(1,0), (a,b)}` in reduced form.
//!
//! With `-1/2 <= a <= 0` and `a^2 + b^2 >= 1` the Voronoi cell is a hexagon
//! (a rectangle when `a = 0`) and the nearest-plane cell is the box
//! `[-1/2,1/2) x [-b/2,b/2)`. The four corner triangles of the box that stick
//! out of the hexagon have total area `(-a - a^2)/4`, giving
//! `P_e = (-a - a^2) / (4 b^2)`.

use std::f64::consts::PI;

use serde::Serialize;

use super::{AnalysisError, ErrorProbabilityReport, Method};
use crate::geometry::Polygon2;

const TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedForm2d {
    pub a: f64,
    pub b: f64,
    pub report: ErrorProbabilityReport,
    /// Voronoi-cell vertices, counter-clockwise.
    pub voronoi_vertices: Vec<[f64; 2]>,
    /// `pi / (4 b)` for unit minimum distance.
    pub density: f64,
}

/// `F(a, b) = (-a - a^2)/(4 b^2)`, after checking the reduction conditions.
pub fn perr_2d_closed_form(a: f64, b: f64) -> Result<ClosedForm2d, AnalysisError> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(AnalysisError::PreconditionViolation("a and b must be finite".into()));
    }
    if b <= 0.0 {
        return Err(AnalysisError::PreconditionViolation(format!("b = {b} must be positive")));
    }
    if a > TOL {
        return Err(AnalysisError::PreconditionViolation(format!("a = {a} > 0: the angle between basis vectors is acute")));
    }
    if a < -0.5 - TOL {
        return Err(AnalysisError::PreconditionViolation(format!("2|a_12| <= a_11 fails: a = {a} < -1/2")));
    }
    if a * a + b * b < 1.0 - TOL {
        return Err(AnalysisError::PreconditionViolation(format!(
            "a_11 <= a_22 fails: a^2 + b^2 = {} < 1",
            a * a + b * b
        )));
    }
    let a = a.min(0.0);
    // + 0.0 turns -0.0 into 0.0 at a = 0
    let p_e = (-a - a * a) / (4.0 * b * b) + 0.0;
    let rel = [[1.0, 0.0], [a, b], [1.0 + a, b]];
    let halfplanes = rel
        .iter()
        .flat_map(|v| {
            let c = 0.5 * (v[0] * v[0] + v[1] * v[1]);
            [(*v, c), ([-v[0], -v[1]], c)]
        })
        .collect();
    let cell = Polygon2::from_halfplanes(halfplanes)?;
    Ok(ClosedForm2d {
        a,
        b,
        report: ErrorProbabilityReport::exact(p_e, Method::ClosedForm),
        voronoi_vertices: cell.vertices().to_vec(),
        density: PI / (4.0 * b),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityOptimum2d {
    pub density: f64,
    pub a: f64,
    pub b: f64,
    pub p_e: f64,
}

/// Smallest `P_e` among reduced 2-D lattices with unit minimum distance and
/// packing density `density`: `b = pi/(4 density)` is fixed, and `F` grows
/// with `|a|`, so `|a|` takes its least feasible value `sqrt(max(0, 1 - b^2))`.
pub fn min_perr_given_density_2d(density: f64) -> Result<DensityOptimum2d, AnalysisError> {
    let max = PI / (2.0 * 3f64.sqrt());
    if !(density > 0.0 && density <= max * (1.0 + 1e-12)) {
        return Err(AnalysisError::DensityOutOfRange(density));
    }
    let b = PI / (4.0 * density);
    let a = if density <= PI / 4.0 { 0.0 } else { -(1.0 - b * b).max(0.0).sqrt() };
    let a = a.max(-0.5);
    let p_e = perr_2d_closed_form(a, b)?.report.p_e;
    Ok(DensityOptimum2d { density, a, b, p_e })
}
