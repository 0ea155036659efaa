//! Upper bounds on `P_c` from the nearest-plane cell sizes `a_i` and the
//! covering radius alone.
//!
//! * Chebyshev: with `X` uniform on the box, `|X|^2` has mean `sum a_i^2/12`
//!   and variance `sum a_i^4/180`; the Voronoi cell lies inside the ball of
//!   radius `r_cov`, so `P_c <= sum a_i^4 / (180 n^2 delta^2)` with
//!   `delta = (sum a_i^2/12 - r_cov^2)/n`, valid when `delta > 0`.
//! * Exclusion: the first `m` sides exceed `2 r_cov`, so only a slab of width
//!   `2 r_cov` in each of them can meet the cell.
//! * Combined: Chebyshev applied to the remaining coordinates inside that slab.

use serde::Serialize;

use super::{AnalysisError, ErrorProbabilityReport, Method};
use crate::lattice::catalog::{an_covering_radius_sq, CatalogEntry};
use crate::scalar::Rational;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundInputs {
    pub n: usize,
    /// Sorted descending.
    pub sizes: Vec<f64>,
    pub r_cov: f64,
    /// `(sum a_i^2 / 12 - r_cov^2) / n`.
    pub delta: f64,
    /// `#{i : a_i > 2 r_cov}`.
    pub m: usize,
    /// `sum_{i > m} a_i^2 / 12 - r_cov^2 (1 - m/3)`.
    pub delta1: f64,
}

impl BoundInputs {
    pub fn new(sizes: &[f64], r_cov: f64) -> Result<Self, AnalysisError> {
        if sizes.is_empty() || sizes.iter().any(|a| !(a.is_finite() && *a > 0.0)) || !(r_cov > 0.0) {
            return Err(AnalysisError::PreconditionViolation("sizes and r_cov must be positive".into()));
        }
        let mut sizes: Vec<f64> = sizes.to_vec();
        sizes.sort_by(|a, b| b.total_cmp(a));
        let n = sizes.len();
        let r2 = r_cov * r_cov;
        let delta = (sizes.iter().map(|a| a * a).sum::<f64>() / 12.0 - r2) / n as f64;
        let m = sizes.iter().filter(|&&a| a > 2.0 * r_cov).count();
        let delta1 = sizes[m..].iter().map(|a| a * a).sum::<f64>() / 12.0 - r2 * (1.0 - m as f64 / 3.0);
        Ok(BoundInputs { n, sizes, r_cov, delta, m, delta1 })
    }

    pub fn from_catalog(entry: &CatalogEntry) -> Result<Self, AnalysisError> {
        let sizes = entry.sizes().ok_or_else(|| AnalysisError::MissingData(format!("{}: no cell sizes", entry.name)))?;
        let r_cov = entry
            .covering_radius
            .ok_or_else(|| AnalysisError::MissingData(format!("{}: no covering radius", entry.name)))?;
        Self::new(&sizes, r_cov)
    }
}

/// `P_c <= sum a_i^4 / (180 n^2 delta^2)`; needs `sum a_i^2 / 12 > r_cov^2`.
pub fn chebyshev_bound(inp: &BoundInputs) -> Result<ErrorProbabilityReport, AnalysisError> {
    let lhs = inp.sizes.iter().map(|a| a * a).sum::<f64>() / 12.0;
    let rhs = inp.r_cov * inp.r_cov;
    if lhs <= rhs {
        return Err(AnalysisError::ConditionFailed { condition: "sum a_i^2 / 12 > r_cov^2".into(), lhs, rhs });
    }
    let n = inp.n as f64;
    let s4: f64 = inp.sizes.iter().map(|a| a.powi(4)).sum();
    Ok(ErrorProbabilityReport::bound(s4 / (180.0 * n * n * inp.delta * inp.delta), Method::ChebyshevBound))
}

/// `P_c <= (2 r_cov)^m / prod_{i<=m} a_i`; 1 when `m = 0`.
pub fn exclusion_bound(inp: &BoundInputs) -> ErrorProbabilityReport {
    let w = 2.0 * inp.r_cov;
    let v: f64 = inp.sizes[..inp.m].iter().map(|a| w / a).product();
    ErrorProbabilityReport::bound(v, Method::ExclusionBound)
}

/// Exclusion factor times `(m (2 r_cov)^4 + sum_{i>m} a_i^4) / (180 delta1^2)`.
/// For `m = 0` this is exactly the Chebyshev bound.
pub fn combined_bound(inp: &BoundInputs) -> Result<ErrorProbabilityReport, AnalysisError> {
    if inp.delta1 <= 0.0 {
        return Err(AnalysisError::ConditionFailed {
            condition: "delta1 = sum_{i>m} a_i^2/12 - r_cov^2 (1 - m/3) > 0".into(),
            lhs: inp.delta1,
            rhs: 0.0,
        });
    }
    let w4 = (2.0 * inp.r_cov).powi(4);
    let num = inp.m as f64 * w4 + inp.sizes[inp.m..].iter().map(|a| a.powi(4)).sum::<f64>();
    let cheb = num / (180.0 * inp.delta1 * inp.delta1);
    Ok(ErrorProbabilityReport::bound(exclusion_bound(inp).p_c * cheb, Method::CombinedBound))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnCondition {
    pub n: usize,
    /// `sum_{k=1}^n (1 + 1/k) / 12`, exact.
    pub lhs: String,
    /// `r_cov(A_n)^2`, exact.
    pub rhs: String,
    pub lhs_value: f64,
    pub rhs_value: f64,
    /// Whether the Chebyshev condition holds (expected false for every n).
    pub holds: bool,
}

/// Both sides of the Chebyshev condition for `A_n` in exact arithmetic.
pub fn an_condition_check(n: usize) -> AnCondition {
    let lhs = (1..=n as i64).fold(Rational::zero(), |acc, k| acc + Rational::new(k + 1, k)) / Rational::from_integer(12);
    let rhs = an_covering_radius_sq(n);
    AnCondition { n, lhs_value: lhs.to_f64(), rhs_value: rhs.to_f64(), holds: lhs > rhs, lhs: lhs.to_string(), rhs: rhs.to_string() }
}
