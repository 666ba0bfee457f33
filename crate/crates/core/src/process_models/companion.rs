//! Companion-matrix form of the tvARCH(p) recursion.
//!
//! ```text
//! X-block_t = (X_t, …, X_{t-p+1})ᵀ
//! X-block_t = A_t X-block_{t-1} + b_t
//! A_t: first row (a_1(t) Z_t, …, a_p(t) Z_t), ones on the subdiagonal
//! b_t = (a_0(t) Z_t, 0, …, 0)ᵀ,   Ã_t = A_t at Z_t = 1
//! ```

use super::spec::TvArchSpec;
use crate::error::{Error, Result};

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn transpose_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (i, &vi) in v.iter().enumerate() {
            for (j, o) in out.iter_mut().enumerate() {
                *o += self.get(i, j) * vi;
            }
        }
        out
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest singular value by power iteration on MᵀM, stopped when the
    /// relative change of the estimate drops below `tol`.
    pub fn spectral_norm(&self, tol: f64) -> f64 {
        let n = self.n;
        if n == 0 || self.data.iter().all(|&x| x == 0.0) {
            return 0.0;
        }
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        let mut sigma = 0.0;
        for _ in 0..100_000 {
            let w = self.transpose_mul_vec(&self.mul_vec(&v));
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            let next = norm.sqrt();
            for (vi, wi) in v.iter_mut().zip(&w) {
                *vi = wi / norm;
            }
            if (next - sigma).abs() <= tol * next {
                sigma = next;
                break;
            }
            sigma = next;
        }
        // Rayleigh refinement: ‖M v‖ for the converged unit vector
        let mv = self.mul_vec(&v);
        mv.iter().map(|x| x * x).sum::<f64>().sqrt().max(sigma)
    }
}

/// (A_t, Ã_t, b_t) at time t for innovation value z.
#[derive(Debug, Clone, PartialEq)]
pub struct Companion {
    pub a: Matrix,
    pub a_tilde: Matrix,
    pub b: Vec<f64>,
}

pub fn companion_matrices(spec: &TvArchSpec, t: i64, z: f64) -> Result<Companion> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::validation("z", format!("innovation value must be positive, got {z}")));
    }
    spec.validate(t..t + 1)?;
    let p = spec.order();
    let a_tilde = mean_companion(spec, t);
    let mut a = a_tilde.clone();
    for j in 0..p {
        a.set(0, j, a_tilde.get(0, j) * z);
    }
    let mut b = vec![0.0; p];
    b[0] = spec.a0(t) * z;
    Ok(Companion { a, a_tilde, b })
}

/// Ã_t = A_t at Z_t = 1.
pub fn mean_companion(spec: &TvArchSpec, t: i64) -> Matrix {
    let p = spec.order();
    let mut m = Matrix::zeros(p);
    for j in 0..p {
        m.set(0, j, spec.a(j + 1, t));
    }
    for i in 1..p {
        m.set(i, i - 1, 1.0);
    }
    m
}

/// v ↦ A_t v for innovation value z, without forming the matrix.
pub fn companion_apply(spec: &TvArchSpec, t: i64, z: f64, v: &[f64]) -> Vec<f64> {
    let p = v.len();
    let mut out = vec![0.0; p];
    let mut acc = 0.0;
    for j in 0..p {
        acc += spec.a(j + 1, t) * v[j];
    }
    out[0] = z * acc;
    out[1..p].copy_from_slice(&v[..(p - 1)]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_case() {
        let spec = TvArchSpec::constant(0.1, &[0.5], 0.5);
        let c = companion_matrices(&spec, 0, 1.0).unwrap();
        assert_eq!(c.a.get(0, 0), 0.5);
        assert_eq!(c.b, vec![0.1]);
    }

    #[test]
    fn order_two_layout() {
        let spec = TvArchSpec::constant(0.1, &[0.3, 0.2], 0.5);
        let c = companion_matrices(&spec, 3, 2.0).unwrap();
        assert_eq!(c.a.row(0), &[0.6, 0.4]);
        assert_eq!(c.a.row(1), &[1.0, 0.0]);
        assert_eq!(c.a_tilde.row(0), &[0.3, 0.2]);
        assert_eq!(c.b, vec![0.2, 0.0]);
    }

    #[test]
    fn rejects_nonpositive_z() {
        let spec = TvArchSpec::constant(0.1, &[0.5], 0.5);
        assert!(companion_matrices(&spec, 0, 0.0).is_err());
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let mut m = Matrix::zeros(3);
        m.set(0, 0, 0.2);
        m.set(1, 1, -0.7);
        m.set(2, 2, 0.5);
        assert!((m.spectral_norm(1e-12) - 0.7).abs() < 1e-10);
    }

    #[test]
    fn apply_matches_matrix() {
        let spec = TvArchSpec::constant(0.1, &[0.3, 0.2, 0.1], 0.3);
        let c = companion_matrices(&spec, 0, 1.7).unwrap();
        let v = [1.0, 2.0, 3.0];
        let direct = c.a.mul_vec(&v);
        let applied = companion_apply(&spec, 0, 1.7, &v);
        for (x, y) in direct.iter().zip(&applied) {
            assert!((x - y).abs() < 1e-15);
        }
    }
}
