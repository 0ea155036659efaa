//! Source distributions, expressed in the triangular frame of the basis
//! (sensor `m` observes coordinate `m`).

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::linalg::MatrixR;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SourceSpec {
    /// Product-uniform over `[-A/2, A/2)^n`.
    Uniform { a: f64 },
    /// A lattice point `R u0` with `u0` uniform in `[-spread, spread]^n`, plus
    /// isotropic Gaussian noise of per-axis deviation `sigma`.
    Gaussian { sigma: f64, spread: i64 },
}

impl Default for SourceSpec {
    fn default() -> Self {
        SourceSpec::Uniform { a: 5.0 }
    }
}

impl SourceSpec {
    pub fn sample<R: Rng + ?Sized>(&self, r: &MatrixR, rng: &mut R) -> Vec<f64> {
        let n = r.dim();
        match *self {
            SourceSpec::Uniform { a } => (0..n).map(|_| rng.random_range(-a / 2.0..a / 2.0)).collect(),
            SourceSpec::Gaussian { sigma, spread } => {
                let u: Vec<i64> = (0..n).map(|_| rng.random_range(-spread..=spread)).collect();
                let mut x = r.mul_int(&u);
                for xi in x.iter_mut() {
                    let z: f64 = StandardNormal.sample(rng);
                    *xi += sigma * z;
                }
                x
            }
        }
    }

    pub fn is_product_uniform(&self) -> bool {
        matches!(self, SourceSpec::Uniform { .. })
    }
}

impl fmt::Display for SourceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceSpec::Uniform { a } => write!(f, "uniform:A={a}"),
            SourceSpec::Gaussian { sigma, spread } => write!(f, "gauss:sigma={sigma},spread={spread}"),
        }
    }
}

/// `uniform:A=5`, `uniform` (A = 5), `gauss:sigma=0.3`, `gauss:sigma=0.3,spread=2`.
impl FromStr for SourceSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, params) = s.split_once(':').unwrap_or((s, ""));
        let mut kv = std::collections::HashMap::new();
        for p in params.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = p.split_once('=').ok_or_else(|| format!("expected key=value, got '{p}'"))?;
            kv.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
        }
        let num = |k: &str| -> Result<Option<f64>, String> {
            kv.get(k).map(|v| v.parse::<f64>().map_err(|e| format!("bad {k}: {e}"))).transpose()
        };
        match kind.trim().to_ascii_lowercase().as_str() {
            "uniform" => {
                let a = num("a")?.unwrap_or(5.0);
                if !(a > 0.0 && a.is_finite()) {
                    return Err("uniform source needs A > 0".into());
                }
                Ok(SourceSpec::Uniform { a })
            }
            "gauss" | "gaussian" => {
                let sigma = num("sigma")?.ok_or("gaussian source needs sigma")?;
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return Err("gaussian source needs sigma > 0".into());
                }
                let spread = num("spread")?.unwrap_or(2.0) as i64;
                Ok(SourceSpec::Gaussian { sigma, spread: spread.max(0) })
            }
            other => Err(format!("unknown source kind '{other}'")),
        }
    }
}
