//! Dense square matrices and the Householder QR used to put a generator
//! matrix into upper-triangular form.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is singular (|det| = {det:e}, scale = {scale:e})")]
    SingularMatrix { det: f64, scale: f64 },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix must have dimension >= 1")]
    Empty,
}

/// `n x n` matrix of doubles, stored row-major.
#[derive(Clone, PartialEq)]
pub struct MatrixR {
    n: usize,
    data: Vec<f64>,
}

impl MatrixR {
    pub fn zeros(n: usize) -> Self {
        MatrixR { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let n = rows.len();
        if n == 0 {
            return Err(LinalgError::Empty);
        }
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(LinalgError::DimensionMismatch { expected: n, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(MatrixR { n, data })
    }

    /// Build from basis vectors, each becoming one column.
    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Self, LinalgError> {
        Ok(Self::from_rows(cols)?.transpose())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|j| self.column(j)).collect()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &MatrixR) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    /// `V u` for an integer coefficient vector.
    pub fn mul_int(&self, u: &[i64]) -> Vec<f64> {
        assert_eq!(u.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(u).map(|(a, &b)| a * b as f64).sum())
            .collect()
    }

    /// Columns reordered so that column `j` of the result is column `perm[j]` of `self`.
    pub fn permute_columns(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for (j, &p) in perm.iter().enumerate() {
                out[(i, j)] = self[(i, p)];
            }
        }
        out
    }

    pub fn is_upper_triangular(&self, tol: f64) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self[(i, j)].abs() <= tol))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> f64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| a[x * n + k].abs().total_cmp(&a[y * n + k].abs()))
                .unwrap();
            if a[p * n + k] == 0.0 {
                return 0.0;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                for j in k..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
        det
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }
}

impl std::ops::Index<(usize, usize)> for MatrixR {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for MatrixR {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl fmt::Debug for MatrixR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatrixR({})", self.n)?;
        for i in 0..self.n {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

/// `V = Q R` with `Q` orthogonal and `R` upper triangular with positive diagonal.
#[derive(Debug, Clone)]
pub struct QrDecomposition {
    pub q: MatrixR,
    pub r: MatrixR,
}

/// Householder QR with the signs fixed so that `diag(R) > 0`.
pub fn qr_decompose(v: &MatrixR) -> Result<QrDecomposition, LinalgError> {
    let n = v.dim();
    let mut r = v.clone();
    let mut q = MatrixR::identity(n);
    for k in 0..n.saturating_sub(1) {
        let norm: f64 = (k..n).map(|i| r[(i, k)] * r[(i, k)]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if r[(k, k)] > 0.0 { -norm } else { norm };
        let mut w: Vec<f64> = (k..n).map(|i| r[(i, k)]).collect();
        w[0] -= alpha;
        let wn2: f64 = w.iter().map(|x| x * x).sum();
        if wn2 == 0.0 {
            continue;
        }
        // R <- H R, Q <- Q H with H = I - 2 w w^T / (w^T w)
        for j in 0..n {
            let dot: f64 = (k..n).map(|i| w[i - k] * r[(i, j)]).sum();
            let f = 2.0 * dot / wn2;
            for i in k..n {
                r[(i, j)] -= f * w[i - k];
            }
        }
        for i in 0..n {
            let dot: f64 = (k..n).map(|j| q[(i, j)] * w[j - k]).sum();
            let f = 2.0 * dot / wn2;
            for j in k..n {
                q[(i, j)] -= f * w[j - k];
            }
        }
        for i in k + 1..n {
            r[(i, k)] = 0.0;
        }
    }
    // Flip rows of R (and columns of Q) with negative diagonal.
    for i in 0..n {
        if r[(i, i)] < 0.0 {
            for j in 0..n {
                r[(i, j)] = -r[(i, j)];
                q[(j, i)] = -q[(j, i)];
            }
        }
    }
    let det: f64 = r.diagonal().iter().product();
    let scale: f64 = v.columns().iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).product();
    if !(det.abs() >= 1e-12 * scale) || scale == 0.0 {
        return Err(LinalgError::SingularMatrix { det, scale });
    }
    Ok(QrDecomposition { q, r })
}

/// Upper-triangular `R` with positive diagonal and `R^T R = V^T V`.
pub fn qr_upper_triangular(v: &MatrixR) -> Result<MatrixR, LinalgError> {
    qr_decompose(v).map(|d| d.r)
}

/// Solve a 3x3 system by Cramer's rule; `None` when `|det|` is below `tol`.
pub fn solve3(a: [[f64; 3]; 3], b: [f64; 3], tol: f64) -> Option<[f64; 3]> {
    let det = det3(&a);
    if det.abs() <= tol {
        return None;
    }
    let mut out = [0.0; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut m = a;
        for i in 0..3 {
            m[i][k] = b[i];
        }
        *slot = det3(&m) / det;
    }
    Some(out)
}

pub fn det3(a: &[[f64; 3]; 3]) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gram(v: &MatrixR) -> MatrixR {
        v.transpose().matmul(v)
    }

    #[test]
    fn identity_is_fixed() {
        let r = qr_upper_triangular(&MatrixR::identity(4)).unwrap();
        assert!((r.frobenius() - 2.0).abs() < 1e-15);
        for i in 0..4 {
            assert_eq!(r[(i, i)], 1.0);
        }
    }

    #[test]
    fn triangular_input_is_fixed_point() {
        let v = MatrixR::from_columns(&[vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]]).unwrap();
        let r = qr_upper_triangular(&v).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((r[(i, j)] - v[(i, j)]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn fcc_gram_is_preserved() {
        let s = 1.0 / 2f64.sqrt();
        let v = MatrixR::from_columns(&[vec![1.0, 0.0, 0.0], vec![-0.5, -0.5, s], vec![0.0, 1.0, 0.0]]).unwrap();
        let r = qr_upper_triangular(&v).unwrap();
        assert!(r.is_upper_triangular(0.0));
        let (g1, g2) = (gram(&r), gram(&v));
        for i in 0..3 {
            for j in 0..3 {
                assert!((g1[(i, j)] - g2[(i, j)]).abs() < 1e-12);
            }
        }
        let det: f64 = r.diagonal().iter().product();
        assert!((det - s).abs() < 1e-12);
        assert!((v.det().abs() - s).abs() < 1e-12);
    }

    #[test]
    fn singular_is_rejected() {
        let v = MatrixR::from_columns(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(qr_upper_triangular(&v), Err(LinalgError::SingularMatrix { .. })));
    }

    #[test]
    fn solve3_works() {
        let x = solve3([[2.0, 0.0, 0.0], [0.0, 3.0, 0.0], [1.0, 0.0, 1.0]], [2.0, 3.0, 2.0], 1e-12).unwrap();
        assert_eq!(x, [1.0, 1.0, 1.0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn qr_preserves_gram(n in 1usize..=8, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let cols: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
            let v = MatrixR::from_columns(&cols).unwrap();
            prop_assume!(v.det().abs() > 1e-6);
            let r = qr_upper_triangular(&v).unwrap();
            let (g1, g2) = (gram(&r), gram(&v));
            let mut diff = 0.0;
            for i in 0..n { for j in 0..n { diff += (g1[(i, j)] - g2[(i, j)]).powi(2); } }
            prop_assert!(diff.sqrt() <= 1e-8 * g2.frobenius());
            prop_assert!(r.diagonal().iter().all(|&d| d > 0.0));
            prop_assert!(r.is_upper_triangular(0.0));
        }
    }
}
