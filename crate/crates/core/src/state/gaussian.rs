//! Multimode Gaussian states `N exp(-(q-c)^T A (q-c) / 2 + b^T (q-c))`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{
    analytic_amplitude, analytic_taylor, Analytic, BipartiteState, ConfigPoint, Normalization,
};
use crate::error::{Error, Result};
use crate::taylor::{Scalar, Taylor};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    dim_a: usize,
    dim_b: usize,
    /// Complex symmetric matrix over Alice's coordinates followed by Bob's.
    a: Vec<Vec<C64>>,
    b: Vec<C64>,
    center: Vec<f64>,
    norm: f64,
    feature: f64,
    spread: f64,
}

impl GaussianState {
    pub fn new(
        dim_a: usize,
        dim_b: usize,
        a: Vec<Vec<C64>>,
        b: Option<Vec<C64>>,
        center: Option<Vec<f64>>,
    ) -> Result<Self> {
        let n = dim_a + dim_b;
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::param("dims", "each party needs at least one axis"));
        }
        if a.len() != n || a.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: a.len(),
                context: "Gaussian matrix",
            });
        }
        for i in 0..n {
            for j in 0..n {
                if (a[i][j] - a[j][i]).norm() > 1e-12 * (1.0 + a[i][j].norm()) {
                    return Err(Error::param("A", "must be symmetric"));
                }
            }
        }
        let b = b.unwrap_or_else(|| vec![C64::new(0.0, 0.0); n]);
        let center = center.unwrap_or_else(|| vec![0.0; n]);
        if b.len() != n || center.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: b.len().min(center.len()),
                context: "Gaussian linear term or centre",
            });
        }
        let re = DMatrix::from_fn(n, n, |i, j| a[i][j].re);
        let eig = re.clone().symmetric_eigen();
        let min_eig = eig.eigenvalues.min();
        if !(min_eig > 0.0) {
            return Err(Error::param("A", "real part must be positive definite"));
        }
        let v = DVector::from_iterator(n, b.iter().map(|z| z.re));
        let chol = re.clone().cholesky().expect("positive definite");
        let shift = v.dot(&chol.solve(&v));
        let det = chol.determinant();
        let integral = (PI.powi(n as i32) / det).sqrt() * shift.exp();
        let max_a = a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        let max_b = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let feature = (1.0 / max_a.sqrt()).min(if max_b > 0.0 { 1.0 / max_b } else { f64::INFINITY });
        let centre_shift = chol.solve(&v).amax();
        Ok(GaussianState {
            dim_a,
            dim_b,
            a,
            b,
            center,
            norm: 1.0 / integral.sqrt(),
            feature,
            spread: 1.0 / min_eig.sqrt() + centre_shift,
        })
    }

    /// Two-mode state `exp(-(alpha x^2 + 2 beta x y + gamma y^2) / 2)`.
    pub fn two_mode(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let c = |x: f64| C64::new(x, 0.0);
        GaussianState::new(
            1,
            1,
            vec![vec![c(alpha), c(beta)], vec![c(beta), c(gamma)]],
            None,
            None,
        )
    }

    pub fn matrix(&self) -> &[Vec<C64>] {
        &self.a
    }
}

impl Analytic for GaussianState {
    fn eval<T: Scalar>(&self, q_a: &[T], q_b: &[T]) -> Result<T> {
        let q: Vec<T> = q_a
            .iter()
            .chain(q_b)
            .zip(&self.center)
            .map(|(x, &c)| x.clone() - c)
            .collect();
        let mut arg = q[0].zero_like();
        for (i, qi) in q.iter().enumerate() {
            let mut row = q[0].zero_like();
            for (j, qj) in q.iter().enumerate() {
                row = row + qj.clone() * self.a[i][j];
            }
            arg = arg + qi.clone() * row * -0.5 + qi.clone() * self.b[i];
        }
        Ok(arg.exp() * self.norm)
    }
}

impl BipartiteState for GaussianState {
    fn dim_a(&self) -> usize {
        self.dim_a
    }
    fn dim_b(&self) -> usize {
        self.dim_b
    }
    fn name(&self) -> String {
        format!("gaussian({}+{})", self.dim_a, self.dim_b)
    }
    fn length_scale(&self) -> f64 {
        self.feature
    }
    fn center(&self) -> ConfigPoint {
        ConfigPoint::from_concat(&self.center, self.dim_a)
    }
    fn extent(&self) -> Option<f64> {
        Some(8.0 * self.spread)
    }
    fn amplitude(&self, point: &ConfigPoint) -> Result<C64> {
        analytic_amplitude(self, point)
    }
    fn taylor(&self, point: &ConfigPoint, dirs: &[Vec<f64>], caps: &[u8]) -> Result<Taylor> {
        analytic_taylor(self, point, dirs, caps)
    }
    fn exact_derivatives(&self) -> bool {
        true
    }
    fn normalization(&self) -> Normalization {
        Normalization::Unit
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::composite;

    #[test]
    fn normalized_two_mode() {
        let s = GaussianState::two_mode(1.2, -0.4, 0.8).unwrap();
        let (x, w) = composite(16, 24, -12.0, 12.0);
        let mut total = 0.0;
        for (&a, &wa) in x.iter().zip(&w) {
            for (&b, &wb) in x.iter().zip(&w) {
                total += wa * wb * s.amplitude(&ConfigPoint::new(vec![a], vec![b])).unwrap().norm_sqr();
            }
        }
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_indefinite_matrix() {
        assert!(GaussianState::two_mode(1.0, 2.0, 1.0).is_err());
    }
}
