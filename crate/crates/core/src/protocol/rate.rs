//! Sum-rate accounting: `R_sum = sum_i H(U~_i, S_i)`, split as
//! `H(U~_i) + H(S_i | U~_i)`, next to the reference value
//! `n log2 A - log2|det V| + sum_i log2 q_i`.

use std::collections::HashMap;

use serde::Serialize;

use super::{Protocol, ProtocolError, SetOptions, SetPolicy, SetProvenance, SourceSpec};
use crate::entropy::{entropy_bits, jackknife_conditional_entropy, jackknife_entropy};
use crate::lattice::LatticeBasis;
use crate::mc::{run_parallel, DEFAULT_WORKERS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RateMethod {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensorRate {
    /// 1-based.
    pub m: usize,
    pub q: i128,
    pub h_u: f64,
    pub h_s_given_u: f64,
    pub h_us: f64,
    /// Jackknife standard errors (0 for exact).
    pub se_h_u: f64,
    pub se_h_s_given_u: f64,
    pub se_h_us: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundTerms {
    pub n_log2_a: f64,
    pub neg_log2_det: f64,
    pub sum_log2_q: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub method: RateMethod,
    pub sensors: Vec<SensorRate>,
    pub sum_rate: f64,
    /// `sum_i H(S_i | U~_i)`.
    pub extra_rate: f64,
    pub sum_rate_se: f64,
    pub extra_rate_se: f64,
    /// Only for uniform sources.
    pub bound: Option<BoundTerms>,
}

impl RateReport {
    fn assemble(method: RateMethod, sensors: Vec<SensorRate>, bound: Option<BoundTerms>) -> Self {
        let sum_rate = sensors.iter().map(|s| s.h_us).sum();
        let extra_rate = sensors.iter().map(|s| s.h_s_given_u).sum();
        // sensors observe independent coordinates
        let sum_rate_se = sensors.iter().map(|s| s.se_h_us.powi(2)).sum::<f64>().sqrt();
        let extra_rate_se = sensors.iter().map(|s| s.se_h_s_given_u.powi(2)).sum::<f64>().sqrt();
        RateReport { method, sensors, sum_rate, extra_rate, sum_rate_se, extra_rate_se, bound }
    }
}

fn bound_terms(b: &LatticeBasis, a: f64, protocol: &Protocol) -> BoundTerms {
    let n_log2_a = b.dim() as f64 * a.log2();
    let neg_log2_det = -b.volume().log2();
    let sum_log2_q = protocol.rows().iter().map(|r| (r.q_m as f64).log2()).sum();
    BoundTerms { n_log2_a, neg_log2_det, sum_log2_q, total: n_log2_a + neg_log2_det + sum_log2_q }
}

/// Exact rates for a product-uniform source on `[-A/2, A/2)^n`.
///
/// `(U~_m, S_m)` depends on `x_m` alone: with `t = x_m / v_mm + 1/2`,
/// the pair is `(k, s_j)` on `t in [k + s_j/q_m, k + s_{j+1}/q_m)` where
/// `s_0 = 0 < s_1 < ...` are the encoder's breakpoints. Each piece has
/// probability equal to its overlap with the support, so the joint law is
/// a finite sum of interval lengths.
pub fn rate_exact_uniform(b: &LatticeBasis, a: f64) -> Result<RateReport, ProtocolError> {
    let source = SourceSpec::Uniform { a };
    let protocol = Protocol::new(b, &source, SetPolicy::Reachable(SetOptions { samples: 0, ..SetOptions::default() }))?;
    rate_exact_with(b, a, &protocol)
}

/// As [`rate_exact_uniform`] with caller-supplied sets (e.g. full sets).
pub fn rate_exact_with(b: &LatticeBasis, a: f64, protocol: &Protocol) -> Result<RateReport, ProtocolError> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(ProtocolError::UnsupportedForExact("a positive, finite support width A".into()));
    }
    if protocol.sets().iter().any(|s| s.provenance == SetProvenance::Sampled) {
        return Err(ProtocolError::UnsupportedForExact("exactly enumerated reachable sets".into()));
    }
    let mut sensors = Vec::with_capacity(b.dim());
    for (i, (&v, set)) in protocol.diag().iter().zip(protocol.sets()).enumerate() {
        let q = set.q_m;
        let lo = -a / (2.0 * v) + 0.5;
        let hi = a / (2.0 * v) + 0.5;
        let width = hi - lo;
        let mut cuts: Vec<f64> = set.breakpoints().iter().map(|&s| s as f64 / q as f64).collect();
        cuts.push(1.0);
        let mut joint = Vec::new();
        let mut marginal = Vec::new();
        for k in lo.floor() as i64..=hi.floor() as i64 {
            let mut pu = 0.0;
            for w in cuts.windows(2) {
                let l = (k as f64 + w[0]).max(lo);
                let r = (k as f64 + w[1]).min(hi);
                if r > l {
                    joint.push((r - l) / width);
                    pu += (r - l) / width;
                }
            }
            marginal.push(pu);
        }
        let h_us = entropy_bits(joint);
        let h_u = entropy_bits(marginal);
        sensors.push(SensorRate {
            m: i + 1,
            q,
            h_u,
            h_s_given_u: (h_us - h_u).max(0.0),
            h_us,
            se_h_u: 0.0,
            se_h_s_given_u: 0.0,
            se_h_us: 0.0,
        });
    }
    Ok(RateReport::assemble(RateMethod::Exact, sensors, Some(bound_terms(b, a, protocol))))
}

/// Plug-in rates from `samples` seeded draws of `source`, split over
/// [`DEFAULT_WORKERS`] streams.
pub fn rate_monte_carlo(
    b: &LatticeBasis,
    protocol: &Protocol,
    source: &SourceSpec,
    samples: u64,
    seed: u64,
) -> Result<RateReport, ProtocolError> {
    let n = b.dim();
    let r = b.triangular();
    type Counts = Vec<HashMap<(i64, i128), u64>>;
    let parts: Vec<Counts> = run_parallel(seed, samples, DEFAULT_WORKERS, |rng, count, _| {
        let mut c: Counts = vec![HashMap::new(); n];
        for _ in 0..count {
            let x = source.sample(r, rng);
            for (m, cm) in c.iter_mut().enumerate() {
                let msg = protocol.encode(m + 1, x[m]);
                *cm.entry((msg.u_tilde, msg.s)).or_default() += 1;
            }
        }
        c
    });
    let mut merged: Counts = vec![HashMap::new(); n];
    for part in parts {
        for (m, cm) in part.into_iter().enumerate() {
            for (k, v) in cm {
                *merged[m].entry(k).or_default() += v;
            }
        }
    }
    let sensors = merged
        .into_iter()
        .enumerate()
        .map(|(m, cm)| {
            let mut cells: Vec<((i64, i128), u64)> = cm.into_iter().collect();
            cells.sort_unstable();
            let mut groups: Vec<i64> = cells.iter().map(|((u, _), _)| *u).collect();
            groups.dedup();
            let joint: Vec<(usize, u64)> =
                cells.iter().map(|((u, _), c)| (groups.binary_search(u).unwrap(), *c)).collect();
            let mut marg = vec![0u64; groups.len()];
            for &(g, c) in &joint {
                marg[g] += c;
            }
            let hus = jackknife_entropy(&joint.iter().map(|&(_, c)| c).collect::<Vec<_>>());
            let hu = jackknife_entropy(&marg);
            let hsu = jackknife_conditional_entropy(&joint);
            SensorRate {
                m: m + 1,
                q: protocol.rows()[m].q_m,
                h_u: hu.bits,
                h_s_given_u: hsu.bits,
                h_us: hus.bits,
                se_h_u: hu.std_error,
                se_h_s_given_u: hsu.std_error,
                se_h_us: hus.std_error,
            }
        })
        .collect();
    let bound = match *source {
        SourceSpec::Uniform { a } => Some(bound_terms(b, a, protocol)),
        SourceSpec::Gaussian { .. } => None,
    };
    Ok(RateReport::assemble(RateMethod::MonteCarlo { samples, seed }, sensors, bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::catalog_lookup;

    #[test]
    fn diagonal_is_log_a() {
        let z = catalog_lookup("Z2").unwrap().basis.unwrap();
        let rep = rate_exact_uniform(&z, 5.0).unwrap();
        assert!((rep.sum_rate - 2.0 * 5f64.log2()).abs() < 1e-12);
        assert_eq!(rep.extra_rate, 0.0);
        let bound = rep.bound.unwrap();
        assert!((bound.total - rep.sum_rate).abs() < 1e-12);
    }

    #[test]
    fn hexagonal_extra_is_at_most_one_bit() {
        let b = catalog_lookup("hexagonal").unwrap().basis.unwrap();
        let rep = rate_exact_uniform(&b, 5.0).unwrap();
        assert_eq!(rep.sensors[0].q, 2);
        assert!(rep.sensors[0].h_s_given_u <= 1.0 + 1e-12);
        assert!(rep.sensors[0].h_s_given_u > 0.5);
    }

    #[test]
    fn exact_matches_monte_carlo() {
        let b = catalog_lookup("hexagonal").unwrap().basis.unwrap();
        let src = SourceSpec::Uniform { a: 5.0 };
        let p = Protocol::new(&b, &src, SetPolicy::Reachable(SetOptions::default())).unwrap();
        let exact = rate_exact_with(&b, 5.0, &p).unwrap();
        let mc = rate_monte_carlo(&b, &p, &src, 200_000, 3).unwrap();
        assert!((exact.sum_rate - mc.sum_rate).abs() <= 3.0 * mc.sum_rate_se + 1e-3, "{exact:?} {mc:?}");
        assert!((exact.extra_rate - mc.extra_rate).abs() <= 3.0 * mc.extra_rate_se + 1e-3);
    }

    #[test]
    fn conditional_below_log_q() {
        let b = catalog_lookup("BCC").unwrap().basis.unwrap();
        let rep = rate_exact_uniform(&b, 5.0).unwrap();
        for s in &rep.sensors {
            assert!(s.h_s_given_u <= (s.q as f64).log2() + 1e-12);
        }
        assert!(rep.extra_rate <= 6f64.log2());
    }
}
