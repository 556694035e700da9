//! Direct solver for tridiagonal systems.

use crate::error::{Error, Result};

/// A tridiagonal system `lower[i]·x[i-1] + diag[i]·x[i] + upper[i]·x[i+1] = rhs[i]`.
///
/// `lower[0]` and `upper[n-1]` are ignored.
#[derive(Debug, Clone, Default)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
            rhs: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Thomas elimination without pivoting. Rows are expected to be
    /// diagonally dominant; a vanishing or non-finite pivot is reported as
    /// [`Error::Singular`].
    pub fn solve(&self) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.len()];
        let mut scratch = vec![0.0; self.len()];
        self.solve_into(&mut out, &mut scratch)?;
        Ok(out)
    }

    /// Allocation-free variant of [`Tridiagonal::solve`].
    pub fn solve_into(&self, x: &mut [f64], scratch: &mut [f64]) -> Result<()> {
        let n = self.len();
        debug_assert!(x.len() == n && scratch.len() == n);
        if n == 0 {
            return Ok(());
        }
        let scale = self
            .diag
            .iter()
            .fold(0.0f64, |m, d| m.max(d.abs()))
            .max(f64::MIN_POSITIVE);

        let mut pivot = self.diag[0];
        check_pivot(0, pivot, scale)?;
        scratch[0] = self.upper[0] / pivot;
        x[0] = self.rhs[0] / pivot;
        for i in 1..n {
            pivot = self.diag[i] - self.lower[i] * scratch[i - 1];
            check_pivot(i, pivot, scale)?;
            scratch[i] = self.upper[i] / pivot;
            x[i] = (self.rhs[i] - self.lower[i] * x[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            x[i] -= scratch[i] * x[i + 1];
        }
        Ok(())
    }
}

fn check_pivot(row: usize, pivot: f64, scale: f64) -> Result<()> {
    if !pivot.is_finite() || pivot.abs() <= 1e-14 * scale {
        return Err(Error::Singular { row, pivot });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_second_difference_system() {
        let sys = Tridiagonal {
            lower: vec![0.0, -1.0, -1.0],
            diag: vec![2.0, 2.0, 2.0],
            upper: vec![-1.0, -1.0, 0.0],
            rhs: vec![1.0, 0.0, 1.0],
        };
        let x = sys.solve().unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_pivot_is_reported() {
        let sys = Tridiagonal {
            lower: vec![0.0, 1.0],
            diag: vec![1.0, 1.0],
            upper: vec![1.0, 0.0],
            rhs: vec![1.0, 1.0],
        };
        assert!(matches!(sys.solve(), Err(Error::Singular { row: 1, .. })));
    }

    #[test]
    fn matches_dense_elimination() {
        let n = 7;
        let mut sys = Tridiagonal::zeros(n);
        for i in 0..n {
            sys.diag[i] = 4.0 + i as f64 * 0.3;
            sys.lower[i] = if i > 0 { -1.0 - 0.1 * i as f64 } else { 0.0 };
            sys.upper[i] = if i + 1 < n { -0.5 } else { 0.0 };
            sys.rhs[i] = (i as f64).sin();
        }
        let x = sys.solve().unwrap();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = sys.diag[i];
            if i > 0 {
                a[i][i - 1] = sys.lower[i];
            }
            if i + 1 < n {
                a[i][i + 1] = sys.upper[i];
            }
        }
        let y = crate::testing::dense_solve(a, sys.rhs.clone());
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).abs() < 1e-13);
        }
    }
}
