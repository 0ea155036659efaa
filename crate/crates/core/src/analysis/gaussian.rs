//! Lattice point plus Gaussian noise: noise-variance thresholds.
//!
//! If `r_pack <= a_i/2` for all `i`, the ball of radius `r_pack` lies in both
//! the Voronoi cell and the nearest-plane cell, so `P_c >= Prob(|Z| <= r_pack)
//! = chi2_cdf(r_pack^2 / sigma^2; n)`. That tends to 1 with `n` when
//! `sigma^2 < r_pack^2 / n`; Minkowski's bound `r_pack^2 <= n vol^{2/n} / 4`
//! (up to lower-order terms) gives the lattice-free threshold `vol^{2/n} / 4`.

use serde::Serialize;
use statrs::function::gamma::gamma_lr;

use super::AnalysisError;
use crate::cvp::shortest_vector;
use crate::lattice::LatticeBasis;

/// CDF of the chi-squared distribution with `k` degrees of freedom, via the
/// regularised lower incomplete gamma function.
pub fn chi2_cdf(x: f64, k: usize) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    gamma_lr(k as f64 / 2.0, x / 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianThreshold {
    pub n: usize,
    pub r_pack: f64,
    pub babai_sizes: Vec<f64>,
    /// `r_pack^2 / n`.
    pub sharp_threshold: f64,
    /// `vol(Lambda)^{2/n} / 4`.
    pub relaxed_threshold: f64,
}

impl GaussianThreshold {
    /// `chi2_cdf(r_pack^2 / sigma^2; n)`, a lower bound on `P_c` at this `sigma`.
    pub fn success_lower_bound(&self, sigma: f64) -> f64 {
        chi2_cdf(self.r_pack * self.r_pack / (sigma * sigma), self.n)
    }
}

/// Thresholds after checking `r_pack <= a_i / 2` for every `i`.
pub fn gaussian_threshold(b: &LatticeBasis) -> Result<GaussianThreshold, AnalysisError> {
    let n = b.dim();
    let r_pack = shortest_vector(b)?.1 / 2.0;
    let sizes = b.babai_sizes();
    let offending: Vec<usize> =
        sizes.iter().enumerate().filter(|(_, &a)| r_pack > a / 2.0 * (1.0 + 1e-12)).map(|(i, _)| i + 1).collect();
    if !offending.is_empty() {
        return Err(AnalysisError::HypothesisFailed { offending });
    }
    Ok(GaussianThreshold {
        n,
        r_pack,
        sharp_threshold: r_pack * r_pack / n as f64,
        relaxed_threshold: b.volume().powf(2.0 / n as f64) / 4.0,
        babai_sizes: sizes,
    })
}
