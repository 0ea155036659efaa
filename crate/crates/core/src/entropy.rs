//! Plug-in entropy of empirical frequencies with a jackknife standard error.

use std::collections::HashMap;
use std::hash::Hash;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub bits: f64,
    pub std_error: f64,
}

/// Entropy in bits of a probability vector (zeros ignored).
pub fn entropy_bits(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs.into_iter().filter(|&p| p > 0.0).map(|p| -p * p.log2()).sum()
}

fn c_log_c(c: f64) -> f64 {
    if c > 0.0 {
        c * c.log2()
    } else {
        0.0
    }
}

/// Plug-in estimate from category counts.
pub fn plugin_entropy(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    nf.log2() - counts.iter().map(|&c| c_log_c(c as f64)).sum::<f64>() / nf
}

/// Plug-in entropy with leave-one-out jackknife standard error. Removing one
/// sample of category `k` only changes that category's term, so the
/// estimate costs O(#categories).
pub fn jackknife_entropy(counts: &[u64]) -> EntropyEstimate {
    let n: u64 = counts.iter().sum();
    let bits = plugin_entropy(counts);
    if n < 2 {
        return EntropyEstimate { bits, std_error: 0.0 };
    }
    let nf = n as f64;
    let m = nf - 1.0;
    let s: f64 = counts.iter().map(|&c| c_log_c(c as f64)).sum();
    let loo: Vec<(f64, f64)> = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let c = c as f64;
            let s_k = s - c_log_c(c) + c_log_c(c - 1.0);
            (c, m.log2() - s_k / m)
        })
        .collect();
    let mean = loo.iter().map(|(c, h)| c * h).sum::<f64>() / nf;
    let var = (nf - 1.0) / nf * loo.iter().map(|(c, h)| c * (h - mean).powi(2)).sum::<f64>();
    EntropyEstimate { bits, std_error: var.sqrt() }
}

/// `H(S | U)` from joint counts `(u_group, count)` with the same jackknife.
/// Dropping one sample of joint cell `k` in group `g` moves only the
/// `c_k log c_k` and `m_g log m_g` terms.
pub fn jackknife_conditional_entropy(joint: &[(usize, u64)]) -> EntropyEstimate {
    let groups = joint.iter().map(|&(g, _)| g + 1).max().unwrap_or(0);
    let mut marg = vec![0u64; groups];
    for &(g, c) in joint {
        marg[g] += c;
    }
    let n: u64 = marg.iter().sum();
    if n == 0 {
        return EntropyEstimate { bits: 0.0, std_error: 0.0 };
    }
    let nf = n as f64;
    let sj: f64 = joint.iter().map(|&(_, c)| c_log_c(c as f64)).sum();
    let sm: f64 = marg.iter().map(|&c| c_log_c(c as f64)).sum();
    let bits = ((sm - sj) / nf).max(0.0);
    if n < 2 {
        return EntropyEstimate { bits, std_error: 0.0 };
    }
    let m = nf - 1.0;
    let loo: Vec<(f64, f64)> = joint
        .iter()
        .filter(|&&(_, c)| c > 0)
        .map(|&(g, c)| {
            let (c, mg) = (c as f64, marg[g] as f64);
            let sj_k = sj - c_log_c(c) + c_log_c(c - 1.0);
            let sm_k = sm - c_log_c(mg) + c_log_c(mg - 1.0);
            (c, (sm_k - sj_k) / m)
        })
        .collect();
    let mean = loo.iter().map(|(c, h)| c * h).sum::<f64>() / nf;
    let var = (nf - 1.0) / nf * loo.iter().map(|(c, h)| c * (h - mean).powi(2)).sum::<f64>();
    EntropyEstimate { bits, std_error: var.sqrt() }
}

/// Counts of hashable symbols, in arbitrary order.
pub fn counts_of<K: Hash + Eq>(symbols: impl IntoIterator<Item = K>) -> Vec<u64> {
    let mut m: HashMap<K, u64> = HashMap::new();
    for s in symbols {
        *m.entry(s).or_default() += 1;
    }
    m.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_counts() {
        assert!((plugin_entropy(&[5, 5, 5, 5]) - 2.0).abs() < 1e-15);
        assert_eq!(plugin_entropy(&[7]), 0.0);
        assert_eq!(plugin_entropy(&[]), 0.0);
        assert!((entropy_bits([0.5, 0.25, 0.25, 0.0]) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn jackknife_matches_direct_leave_one_out() {
        let counts = [3u64, 1, 6, 2];
        let n: u64 = counts.iter().sum();
        let mut loo = Vec::new();
        for k in 0..counts.len() {
            for _ in 0..counts[k] {
                let mut c = counts;
                c[k] -= 1;
                loo.push(plugin_entropy(&c));
            }
        }
        let mean = loo.iter().sum::<f64>() / n as f64;
        let var = (n as f64 - 1.0) / n as f64 * loo.iter().map(|h| (h - mean).powi(2)).sum::<f64>();
        let j = jackknife_entropy(&counts);
        assert!((j.std_error - var.sqrt()).abs() < 1e-12);
        assert_eq!(j.bits, plugin_entropy(&counts));
    }

    #[test]
    fn counting() {
        let mut c = counts_of(["a", "b", "a", "c", "a"]);
        c.sort();
        assert_eq!(c, vec![1, 1, 3]);
    }

    #[test]
    fn conditional_matches_difference() {
        // U in {0,1}; S | U=0 uniform over 2, S | U=1 constant
        let joint = [(0, 25), (0, 25), (1, 50)];
        let h = jackknife_conditional_entropy(&joint);
        assert!((h.bits - 0.5).abs() < 1e-12);
        let hj = plugin_entropy(&[25, 25, 50]);
        let hu = plugin_entropy(&[50, 50]);
        assert!((h.bits - (hj - hu)).abs() < 1e-12);
        assert!(h.std_error > 0.0);
    }
}
