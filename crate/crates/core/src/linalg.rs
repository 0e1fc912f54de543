//! Dense symmetric positive-definite helpers for the small systems that come
//! up here (a handful of predictors plus an intercept).

use crate::error::{Error, Result};

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SymMatrix {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    /// Copies the upper triangle onto the lower one.
    pub fn symmetrize_from_upper(&mut self) {
        for i in 0..self.dim {
            for j in 0..i {
                let v = self.get(j, i);
                self.set(i, j, v);
            }
        }
    }
}

/// Lower-triangular Cholesky factor.
pub(crate) struct Cholesky {
    dim: usize,
    l: Vec<f64>,
}

/// Relative pivot floor below which a matrix is treated as singular.
const PIVOT_TOL: f64 = 1e-12;

impl Cholesky {
    pub fn new(a: &SymMatrix) -> Result<Self> {
        let n = a.dim;
        let scale = (0..n).map(|i| a.get(i, i).abs()).fold(0.0, f64::max);
        if n > 0 && !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::SingularMatrix);
        }
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = a.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            // the pivot is compared against the original diagonal so that
            // badly scaled but independent columns are not flagged
            if !(d > PIVOT_TOL * a.get(j, j).abs().max(f64::MIN_POSITIVE)) || !d.is_finite() {
                return Err(Error::SingularMatrix);
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in (j + 1)..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / d;
            }
        }
        Ok(Self { dim: n, l })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        y
    }

    pub fn inverse(&self) -> SymMatrix {
        let n = self.dim;
        let mut inv = SymMatrix::zeros(n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = 0.0);
            e[j] = 1.0;
            let col = self.solve(&e);
            for i in 0..n {
                inv.set(i, j, col[i]);
            }
        }
        inv
    }

    pub fn inverse_diagonal(&self) -> Vec<f64> {
        let inv = self.inverse();
        (0..self.dim).map(|i| inv.get(i, i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let mut a = SymMatrix::zeros(2);
        a.data = vec![4.0, 2.0, 2.0, 3.0];
        let ch = Cholesky::new(&a).unwrap();
        let x = ch.solve(&[2.0, 1.0]);
        assert!((4.0 * x[0] + 2.0 * x[1] - 2.0).abs() < 1e-14);
        assert!((2.0 * x[0] + 3.0 * x[1] - 1.0).abs() < 1e-14);
        let inv = ch.inverse();
        assert!((inv.get(0, 0) - 3.0 / 8.0).abs() < 1e-14);
        assert!((inv.get(0, 1) + 2.0 / 8.0).abs() < 1e-14);
    }

    #[test]
    fn flags_rank_deficiency() {
        let mut a = SymMatrix::zeros(2);
        a.data = vec![1.0, 1.0, 1.0, 1.0];
        assert!(matches!(Cholesky::new(&a), Err(Error::SingularMatrix)));
    }
}
