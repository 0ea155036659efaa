//! Named lattices with exact bases and published covering radii.

use super::{ratx, surd, LatticeBasis, LatticeError};
use crate::scalar::{Rational, ScalarExpr};

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub basis: Option<LatticeBasis>,
    /// Nearest-plane cell sizes when no basis is stored.
    pub babai_sizes: Option<Vec<f64>>,
    pub covering_radius: Option<f64>,
    /// Exact `r_cov^2` when known in closed form.
    pub covering_radius_sq: Option<Rational>,
}

impl CatalogEntry {
    /// Sizes from the stored basis, else the published ones.
    pub fn sizes(&self) -> Option<Vec<f64>> {
        self.basis.as_ref().map(LatticeBasis::babai_sizes).or_else(|| self.babai_sizes.clone())
    }

    fn from_basis(name: &str, basis: LatticeBasis) -> Self {
        CatalogEntry { name: name.into(), basis: Some(basis), babai_sizes: None, covering_radius: None, covering_radius_sq: None }
    }

    fn with_rcov_sq(mut self, r2: Rational) -> Self {
        self.covering_radius = Some(r2.to_f64().sqrt());
        self.covering_radius_sq = Some(r2);
        self
    }
}

/// Names: `Z^n`/`Zn`, `A_n`/`An`, `hexagonal`, `BCC`, `FCC`, `hp`, `hrd`,
/// `E8`, `BW16`, `Leech` (case-insensitive).
pub fn catalog_lookup(name: &str) -> Result<CatalogEntry, LatticeError> {
    let key = name.trim().to_ascii_lowercase().replace(['^', '_'], "");
    let unknown = || LatticeError::UnknownLattice(name.to_string());
    let basis = |cols: Vec<Vec<ScalarExpr>>| LatticeBasis::from_columns(cols);
    let entry = match key.as_str() {
        "hexagonal" | "hex" => {
            CatalogEntry::from_basis(name, basis(vec![vec![ratx(1, 1), ratx(0, 1)], vec![ratx(-1, 2), surd(1, 2, 3, 1)]])?)
                .with_rcov_sq(Rational::new(1, 3))
        }
        "bcc" => CatalogEntry::from_basis(
            name,
            basis(vec![
                vec![ratx(1, 1), ratx(0, 1), ratx(0, 1)],
                vec![ratx(-1, 3), surd(2, 3, 2, 1), ratx(0, 1)],
                vec![ratx(-1, 3), surd(-1, 3, 2, 1), surd(1, 1, 2, 3)],
            ])?,
        )
        .with_rcov_sq(Rational::new(5, 12)),
        "fcc" => CatalogEntry::from_basis(
            name,
            basis(vec![
                vec![ratx(1, 1), ratx(0, 1), ratx(0, 1)],
                vec![ratx(-1, 2), ratx(-1, 2), surd(1, 1, 1, 2)],
                vec![ratx(0, 1), ratx(1, 1), ratx(0, 1)],
            ])?,
        )
        .with_rcov_sq(Rational::new(1, 2)),
        "hp" => CatalogEntry::from_basis(
            name,
            basis(vec![
                vec![ratx(1, 1), ratx(0, 1), ratx(0, 1)],
                vec![ratx(-1, 2), surd(-1, 2, 3, 1), ratx(0, 1)],
                vec![ratx(0, 1), ratx(0, 1), ratx(1, 1)],
            ])?,
        )
        .with_rcov_sq(Rational::new(7, 12)),
        "hrd" => CatalogEntry::from_basis(
            name,
            basis(vec![
                vec![ratx(1, 1), ratx(0, 1), ratx(0, 1)],
                vec![surd(-1, 1, 1, 5), surd(2, 1, 1, 5), ratx(0, 1)],
                vec![ratx(0, 1), ratx(-1, 2), surd(1, 2, 5, 1)],
            ])?,
        ),
        "e8" => CatalogEntry::from_basis(name, e8()?).with_rcov_sq(Rational::one()),
        "bw16" => CatalogEntry {
            name: name.into(),
            basis: None,
            babai_sizes: Some(sizes(&[(4.0, 1), (2.0, 10), (1.0, 5)])),
            covering_radius: Some(3f64.sqrt()),
            covering_radius_sq: Some(Rational::from_integer(3)),
        },
        "leech" => CatalogEntry {
            name: name.into(),
            basis: None,
            babai_sizes: Some(sizes(&[(8.0, 1), (4.0, 11), (2.0, 11), (1.0, 1)])),
            covering_radius: Some(2f64.sqrt()),
            covering_radius_sq: Some(Rational::from_integer(2)),
        },
        k if k.starts_with('z') => {
            let n: usize = k[1..].parse().map_err(|_| unknown())?;
            if n == 0 {
                return Err(unknown());
            }
            let cols = (0..n).map(|j| (0..n).map(|i| ratx(i64::from(i == j), 1)).collect()).collect();
            CatalogEntry::from_basis(name, basis(cols)?).with_rcov_sq(Rational::new(n as i64, 4))
        }
        k if k.starts_with('a') => {
            let n: usize = k[1..].parse().map_err(|_| unknown())?;
            if n == 0 {
                return Err(unknown());
            }
            CatalogEntry::from_basis(name, an_basis(n)?).with_rcov_sq(an_covering_radius_sq(n))
        }
        _ => return Err(unknown()),
    };
    Ok(entry)
}

fn sizes(runs: &[(f64, usize)]) -> Vec<f64> {
    runs.iter().flat_map(|&(a, k)| std::iter::repeat_n(a, k)).collect()
}

/// Triangular basis of `A_n` (Gram: 2 on the diagonal, 1 elsewhere):
/// `r_kk = sqrt((k+1)/k)`, `r_kj = 1/sqrt(k(k+1))` for `j > k` (1-based).
pub fn an_basis(n: usize) -> Result<LatticeBasis, LatticeError> {
    let cols = (1..=n as i64)
        .map(|j| {
            (1..=n as i64)
                .map(|k| match k.cmp(&j) {
                    std::cmp::Ordering::Less => surd(1, 1, 1, k * (k + 1)),
                    std::cmp::Ordering::Equal => surd(1, 1, k + 1, k),
                    std::cmp::Ordering::Greater => ScalarExpr::zero(),
                })
                .collect()
        })
        .collect();
    LatticeBasis::from_columns(cols)
}

/// `r_cov(A_n)^2 = a (n + 1 - a) / (n + 1)` with `a = floor((n+1)/2)`.
pub fn an_covering_radius_sq(n: usize) -> Rational {
    let n = n as i64;
    let a = (n + 1) / 2;
    Rational::new(a * (n + 1 - a), n + 1)
}

/// Standard E8 generator with rows taken as basis vectors; upper triangular
/// with diagonal `(2, 1, 1, 1, 1, 1, 1, 1/2)`.
fn e8() -> Result<LatticeBasis, LatticeError> {
    let mut cols: Vec<Vec<ScalarExpr>> = Vec::with_capacity(8);
    let mut first = vec![ScalarExpr::zero(); 8];
    first[0] = ratx(2, 1);
    cols.push(first);
    for j in 1..7 {
        let mut c = vec![ScalarExpr::zero(); 8];
        c[j - 1] = ratx(-1, 1);
        c[j] = ratx(1, 1);
        cols.push(c);
    }
    cols.push(vec![ratx(1, 2); 8]);
    LatticeBasis::from_columns(cols)
}
