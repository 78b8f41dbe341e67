//! Dense linear algebra helpers on top of `nalgebra`.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// LU-factored square system with a 1-norm condition estimate.
pub struct FactoredSystem {
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    condition: f64,
}

impl FactoredSystem {
    /// Factors `a`, estimating `κ₁(a)` with Hager's method.
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        if n == 0 || a.ncols() != n {
            return Err(Error::InvalidParameter("matrix must be square and non-empty"));
        }
        let norm = (0..n)
            .map(|j| a.column(j).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let lu_t = a.transpose().lu();
        let lu = a.lu();
        if !lu.is_invertible() {
            return Err(Error::IllConditioned { condition: f64::INFINITY });
        }
        let inv_norm = hager_inverse_norm(n, |v| lu.solve(v), |v| lu_t.solve(v));
        let condition = norm * inv_norm;
        if !condition.is_finite() {
            return Err(Error::IllConditioned { condition });
        }
        Ok(Self { lu, condition })
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let rhs = DVector::from_column_slice(b);
        self.lu
            .solve(&rhs)
            .map(|x| x.iter().copied().collect())
            .unwrap_or_else(|| alloc::vec![f64::NAN; b.len()])
    }
}

fn hager_inverse_norm<S, T>(n: usize, solve: S, solve_t: T) -> f64
where
    S: Fn(&DVector<f64>) -> Option<DVector<f64>>,
    T: Fn(&DVector<f64>) -> Option<DVector<f64>>,
{
    let mut x = DVector::from_element(n, 1.0 / n as f64);
    let mut estimate = 0.0;
    for _ in 0..5 {
        let Some(y) = solve(&x) else { return f64::INFINITY };
        estimate = y.iter().map(|v| v.abs()).sum::<f64>();
        let xi = y.map(|v| if v >= 0.0 { 1.0 } else { -1.0 });
        let Some(z) = solve_t(&xi) else { return f64::INFINITY };
        let (jmax, zmax) = z
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (j, v)| if v.abs() > acc.1 { (j, v.abs()) } else { acc });
        if zmax <= z.dot(&x) {
            break;
        }
        x.fill(0.0);
        x[jmax] = 1.0;
    }
    estimate
}

/// Singular values of a real matrix, largest first.
pub fn singular_values(a: DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = a.singular_values().iter().copied().collect();
    s.sort_by(|p, q| q.total_cmp(p));
    s
}
