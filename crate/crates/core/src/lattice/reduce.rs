//! Minkowski reduction for n <= 3.

use super::{LatticeBasis, LatticeError};

/// Result of checking the Minkowski inequalities.
#[derive(Debug, Clone, PartialEq)]
pub struct MinkowskiCheck {
    pub reduced: bool,
    pub violations: Vec<String>,
}

/// A reduced basis together with the unimodular `U` (column `j` of the new
/// basis is `V * U[.][j]`).
#[derive(Debug, Clone)]
pub struct Reduced {
    pub basis: LatticeBasis,
    pub transform: Vec<Vec<i64>>,
}

const SLACK: f64 = 1e-12;

/// Checks `0 < a11 <= a22 <= a33`, `2|a_st| <= a_ss` (s < t), and in 3-D
/// `|v3 + e1 v1 + e2 v2| >= |v3|` for all signs, i.e.
/// `2(s12 a12 + s13 a13 + s23 a23) <= a11 + a22` whenever `s12 s13 s23 = -1`.
pub fn is_minkowski_reduced(b: &LatticeBasis) -> Result<MinkowskiCheck, LatticeError> {
    let n = b.dim();
    if n > 3 {
        return Err(LatticeError::UnsupportedDimension { n, max: 3 });
    }
    let g = b.gram();
    Ok(check_gram(&g.entries))
}

pub(crate) fn check_gram(a: &[Vec<f64>]) -> MinkowskiCheck {
    let n = a.len();
    let scale = (0..n).map(|i| a[i][i]).fold(0.0, f64::max);
    let tol = SLACK * scale.max(1e-300);
    let mut v = Vec::new();
    if a[0][0] <= 0.0 {
        v.push("a11 > 0".to_string());
    }
    for s in 0..n.saturating_sub(1) {
        if a[s][s] > a[s + 1][s + 1] + tol {
            v.push(format!("a{0}{0} <= a{1}{1}", s + 1, s + 2));
        }
    }
    for s in 0..n {
        for t in s + 1..n {
            if 2.0 * a[s][t].abs() > a[s][s] + tol {
                v.push(format!("2|a{}{}| <= a{}{}", s + 1, t + 1, s + 1, s + 1));
            }
        }
    }
    if n == 3 {
        for (s12, s13) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            let s23 = -s12 * s13;
            let lhs = 2.0 * (s12 * a[0][1] + s13 * a[0][2] + s23 * a[1][2]);
            if lhs > a[0][0] + a[1][1] + tol {
                v.push(format!("2({s12:+}a12 {s13:+}a13 {s23:+}a23) <= a11 + a22"));
            }
        }
    }
    MinkowskiCheck { reduced: v.is_empty(), violations: v }
}

/// Greedy reduction: repeatedly replace a vector by the shortest
/// `v_k - sum c_j v_j` over integer `c` near the real projection, until no
/// vector can be shortened; then sort by norm.
pub fn minkowski_reduce(b: &LatticeBasis) -> Result<Reduced, LatticeError> {
    let n = b.dim();
    if n > 3 {
        return Err(LatticeError::UnsupportedDimension { n, max: 3 });
    }
    let v = b.vectors();
    let mut u: Vec<Vec<i64>> = (0..n).map(|j| (0..n).map(|i| i64::from(i == j)).collect()).collect();
    let vec_of = |c: &[i64]| -> Vec<f64> { (0..n).map(|i| (0..n).map(|j| v[j][i] * c[j] as f64).sum()).collect() };
    let norm2 = |x: &[f64]| x.iter().map(|t| t * t).sum::<f64>();

    for _ in 0..10_000 {
        let mut improved = false;
        for k in 0..n {
            let cur: Vec<Vec<f64>> = u.iter().map(|c| vec_of(c)).collect();
            let others: Vec<usize> = (0..n).filter(|&j| j != k).collect();
            let centre = project(&cur, k, &others);
            let base_norm = norm2(&cur[k]);
            let mut best: Option<(f64, Vec<i64>)> = None;
            for delta in offsets(others.len()) {
                let coeffs: Vec<i64> = centre.iter().zip(&delta).map(|(c, d)| c.round() as i64 + d).collect();
                let mut w = u[k].clone();
                for (t, &j) in others.iter().enumerate() {
                    for i in 0..n {
                        w[i] -= coeffs[t] * u[j][i];
                    }
                }
                let nn = norm2(&vec_of(&w));
                if best.as_ref().is_none_or(|(bn, _)| nn < *bn) {
                    best = Some((nn, w));
                }
            }
            if let Some((nn, w)) = best {
                if nn < base_norm * (1.0 - 1e-12) {
                    u[k] = w;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = u.iter().map(|c| norm2(&vec_of(c))).collect();
    order.sort_by(|&x, &y| norms[x].total_cmp(&norms[y]));
    let u: Vec<Vec<i64>> = order.into_iter().map(|j| u[j].clone()).collect();
    let cols = u.iter().map(|c| b.combine(c)).collect();
    Ok(Reduced { basis: LatticeBasis::from_columns(cols)?, transform: u })
}

/// Real coefficients of the projection of `cur[k]` onto span of `cur[others]`.
fn project(cur: &[Vec<f64>], k: usize, others: &[usize]) -> Vec<f64> {
    let d = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    match others.len() {
        0 => vec![],
        1 => {
            let o = &cur[others[0]];
            vec![d(&cur[k], o) / d(o, o)]
        }
        _ => {
            let (p, q) = (&cur[others[0]], &cur[others[1]]);
            let (g11, g12, g22) = (d(p, p), d(p, q), d(q, q));
            let (r1, r2) = (d(&cur[k], p), d(&cur[k], q));
            let det = g11 * g22 - g12 * g12;
            vec![(r1 * g22 - r2 * g12) / det, (g11 * r2 - g12 * r1) / det]
        }
    }
}

fn offsets(m: usize) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|p| (-1..=1).map(move |d| [p.clone(), vec![d]].concat()))
            .collect();
    }
    out
}
