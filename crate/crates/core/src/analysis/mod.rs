//! Probability that the nearest-plane point differs from the closest point.
//!
//! Exact in 2-D (closed form) and 3-D (polytope volumes), estimated by Monte
//! Carlo in any dimension up to the enumeration limit, and bounded from
//! Babai-cell sizes and the covering radius in high dimensions.

pub mod bounds;
pub mod gaussian;
pub mod monte_carlo;
pub mod planar;
pub mod polyhedral;

use serde::Serialize;
use thiserror::Error;

use crate::cvp::CvpError;
use crate::geometry::GeomError;
use crate::lattice::LatticeError;

pub use bounds::{an_condition_check, chebyshev_bound, combined_bound, exclusion_bound, AnCondition, BoundInputs};
pub use gaussian::{chi2_cdf, gaussian_threshold, GaussianThreshold};
pub use monte_carlo::{perr_mc_gaussian, perr_mc_uniform, GaussianMcReport};
pub use planar::{min_perr_given_density_2d, perr_2d_closed_form, ClosedForm2d, DensityOptimum2d};
pub use polyhedral::{
    comparison_lattice, perr_3d_polyhedral, random_superbase_scatter, wellrounded_basis, wellrounded_sweep,
    PermutationResult, Polyhedral3d, ScatterRow, SweepRow,
};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("packing density {0} outside (0, pi/(2 sqrt 3)]")]
    DensityOutOfRange(f64),
    #[error("condition failed: {condition} ({lhs} vs {rhs})")]
    ConditionFailed { condition: String, lhs: f64, rhs: f64 },
    #[error("hypothesis r_pack <= a_i/2 fails for i in {offending:?}")]
    HypothesisFailed { offending: Vec<usize> },
    #[error("missing lattice data: {0}")]
    MissingData(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Cvp(#[from] CvpError),
}

impl AnalysisError {
    /// Failed preconditions/conditions, as opposed to malformed input or bugs.
    pub fn is_condition(&self) -> bool {
        matches!(
            self,
            AnalysisError::PreconditionViolation(_)
                | AnalysisError::DensityOutOfRange(_)
                | AnalysisError::ConditionFailed { .. }
                | AnalysisError::HypothesisFailed { .. }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Polyhedral,
    MonteCarlo,
    ChebyshevBound,
    ExclusionBound,
    CombinedBound,
}

impl Method {
    pub fn is_bound(self) -> bool {
        matches!(self, Method::ChebyshevBound | Method::ExclusionBound | Method::CombinedBound)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorProbabilityReport {
    pub p_e: f64,
    pub p_c: f64,
    pub method: Method,
    /// Standard error for Monte Carlo, 0 otherwise.
    pub uncertainty: f64,
    /// For bound methods `p_c` is an upper bound on the success probability
    /// (and `p_e` a lower bound on the error probability).
    pub is_bound: bool,
    /// Column order achieving the reported value, when searched.
    pub permutation: Option<Vec<usize>>,
}

impl ErrorProbabilityReport {
    pub fn exact(p_e: f64, method: Method) -> Self {
        let p_e = p_e.clamp(0.0, 1.0);
        ErrorProbabilityReport { p_e, p_c: 1.0 - p_e, method, uncertainty: 0.0, is_bound: false, permutation: None }
    }

    pub fn estimate(p_e: f64, std_error: f64) -> Self {
        ErrorProbabilityReport { uncertainty: std_error, ..Self::exact(p_e, Method::MonteCarlo) }
    }

    /// A bound on `P_c`.
    pub fn bound(p_c: f64, method: Method) -> Self {
        let p_c = p_c.clamp(0.0, 1.0);
        ErrorProbabilityReport { p_e: 1.0 - p_c, p_c, method, uncertainty: 0.0, is_bound: true, permutation: None }
    }
}
