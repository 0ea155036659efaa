//! Monte Carlo error probabilities in any dimension up to the enumeration
//! limit. Success is decided by the exact closest-point oracle, not by cell
//! membership tests; boundary ties have probability zero.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::{AnalysisError, ErrorProbabilityReport};
use crate::cvp::{babai_coefficients, closest_point_triangular, CvpError, MAX_ENUM_DIM};
use crate::lattice::LatticeBasis;
use crate::mc::{estimate_probability, run_parallel, BernoulliEstimate};

fn check_dim(b: &LatticeBasis) -> Result<(), AnalysisError> {
    if b.dim() > MAX_ENUM_DIM {
        return Err(CvpError::DimensionTooLarge { n: b.dim(), max: MAX_ENUM_DIM }.into());
    }
    Ok(())
}

/// `x` uniform over the nearest-plane cell of the origin (triangular frame);
/// a trial succeeds when the closest lattice point is the origin.
pub fn perr_mc_uniform(b: &LatticeBasis, samples: u64, seed: u64, workers: usize) -> Result<ErrorProbabilityReport, AnalysisError> {
    check_dim(b)?;
    let r = b.triangular();
    let half: Vec<f64> = b.babai_sizes().iter().map(|a| a / 2.0).collect();
    let est = estimate_probability(seed, samples, workers, |rng| {
        let x: Vec<f64> = half.iter().map(|&h| rng.random_range(-h..h)).collect();
        closest_point_triangular(r, &x).map(|c| c.u.iter().all(|&u| u == 0)).unwrap_or(false)
    });
    Ok(ErrorProbabilityReport::estimate(1.0 - est.p, est.std_error))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianMcReport {
    pub sigma: f64,
    /// Full success event: nearest-plane point equals the closest point.
    pub report: ErrorProbabilityReport,
    /// Estimate of the dominant term: both the nearest-plane and the closest
    /// point are the origin.
    pub t_term: BernoulliEstimate,
    pub full: BernoulliEstimate,
}

/// `z ~ N(0, sigma^2 I)` around the origin (the distribution is isotropic, so
/// the frame does not matter). Reports the full `P_c` and the `T` term.
pub fn perr_mc_gaussian(
    b: &LatticeBasis,
    sigma: f64,
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<GaussianMcReport, AnalysisError> {
    check_dim(b)?;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(AnalysisError::PreconditionViolation(format!("sigma = {sigma} must be positive")));
    }
    let r = b.triangular();
    let n = b.dim();
    let parts = run_parallel(seed, samples, workers, |rng, count, _| {
        let (mut full, mut t) = (0u64, 0u64);
        for _ in 0..count {
            let z: Vec<f64> = (0..n).map(|_| sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng)).collect();
            let (Ok(np), Ok(cl)) = (babai_coefficients(r, &z), closest_point_triangular(r, &z)) else { continue };
            if np == cl.u {
                full += 1;
                if np.iter().all(|&u| u == 0) {
                    t += 1;
                }
            }
        }
        (full, t)
    });
    let (full, t) = parts.into_iter().fold((0, 0), |acc, x| (acc.0 + x.0, acc.1 + x.1));
    let full = BernoulliEstimate::new(full, samples);
    let t_term = BernoulliEstimate::new(t, samples);
    Ok(GaussianMcReport {
        sigma,
        report: ErrorProbabilityReport::estimate(1.0 - full.p, full.std_error),
        t_term,
        full,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::catalog_lookup;

    #[test]
    fn orthogonal_never_fails() {
        let z = catalog_lookup("Z4").unwrap().basis.unwrap();
        assert_eq!(perr_mc_uniform(&z, 20_000, 1, 4).unwrap().p_e, 0.0);
        assert_eq!(perr_mc_gaussian(&z, 0.4, 5_000, 1, 4).unwrap().report.p_e, 0.0);
    }

    #[test]
    fn hexagonal_uniform() {
        let h = catalog_lookup("hexagonal").unwrap().basis.unwrap();
        let r = perr_mc_uniform(&h, 200_000, 2, 8).unwrap();
        assert!((r.p_e - 1.0 / 12.0).abs() <= 3.0 * r.uncertainty, "{r:?}");
    }

    #[test]
    fn gaussian_small_noise() {
        let h = catalog_lookup("hexagonal").unwrap().basis.unwrap();
        let g = perr_mc_gaussian(&h, 0.05, 20_000, 3, 8).unwrap();
        assert_eq!(g.report.p_e, 0.0);
        assert_eq!(g.t_term.successes, g.full.successes);
    }

    #[test]
    fn seeded_results_repeat() {
        let h = catalog_lookup("BCC").unwrap().basis.unwrap();
        assert_eq!(perr_mc_uniform(&h, 10_000, 9, 8).unwrap(), perr_mc_uniform(&h, 10_000, 9, 8).unwrap());
    }
}
