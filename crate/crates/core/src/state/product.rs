//! Separable product states `psi = f_A(q_A) g_B(q_B)`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::com_rel::oscillator_1d;
use super::{
    analytic_amplitude, analytic_taylor, Analytic, BipartiteState, ConfigPoint, Normalization,
};
use crate::error::{Error, Result};
use crate::taylor::{Scalar, Shape, Taylor};

/// One-dimensional factor along a single axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mode1D {
    /// `(pi w^2)^(-1/4) exp(-(x - c)^2 / (2 w^2) + i k x)`.
    Gaussian { center: f64, width: f64, k: f64 },
    /// `exp(i k x)`.
    PlaneWave { k: f64 },
    /// Oscillator eigenfunction with `n` quanta centred at `center`.
    Oscillator { n: u32, center: f64, width: f64 },
}

impl Mode1D {
    pub fn eval<T: Scalar>(&self, x: &T) -> T {
        match *self {
            Mode1D::Gaussian { center, width, k } => {
                let u = x.clone() - center;
                let arg = u.clone() * u * (-0.5 / (width * width)) + x.clone() * C64::new(0.0, k);
                arg.exp() * (PI * width * width).powf(-0.25)
            }
            Mode1D::PlaneWave { k } => (x.clone() * C64::new(0.0, k)).exp(),
            Mode1D::Oscillator { n, center, width } => oscillator_1d(n, width, &(x.clone() - center)),
        }
    }

    fn normalizable(&self) -> bool {
        !matches!(self, Mode1D::PlaneWave { .. })
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Mode1D::Gaussian { width, .. } | Mode1D::Oscillator { width, .. } if !(width > 0.0) => {
                Err(Error::param("mode.width", "must be positive"))
            }
            _ => Ok(()),
        }
    }

    fn scale(&self) -> (f64, f64) {
        match *self {
            Mode1D::Gaussian { center, width, k } => {
                let feature = if k != 0.0 { width.min(1.0 / k.abs()) } else { width };
                (center, feature)
            }
            Mode1D::PlaneWave { k } => (0.0, if k != 0.0 { 1.0 / k.abs() } else { 1.0 }),
            Mode1D::Oscillator { n, center, width } => {
                (center, width / (2.0 * f64::from(n) + 1.0).sqrt())
            }
        }
    }

    fn extent(&self) -> Option<f64> {
        match *self {
            Mode1D::Gaussian { width, .. } => Some(8.0 * width),
            Mode1D::Oscillator { n, width, .. } => {
                Some(8.0 * width * (2.0 * f64::from(n) + 1.0).sqrt())
            }
            Mode1D::PlaneWave { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductState {
    pub alice: Vec<Mode1D>,
    pub bob: Vec<Mode1D>,
}

impl ProductState {
    pub fn new(alice: Vec<Mode1D>, bob: Vec<Mode1D>) -> Result<Self> {
        if alice.is_empty() || bob.is_empty() {
            return Err(Error::param("modes", "each party needs at least one axis"));
        }
        for m in alice.iter().chain(&bob) {
            m.validate()?;
        }
        Ok(ProductState { alice, bob })
    }
}

impl Analytic for ProductState {
    fn eval<T: Scalar>(&self, q_a: &[T], q_b: &[T]) -> Result<T> {
        let one = q_a[0].lift(C64::new(1.0, 0.0));
        let fa = q_a
            .iter()
            .zip(&self.alice)
            .fold(one.clone(), |acc, (x, m)| acc * m.eval(x));
        let gb = q_b
            .iter()
            .zip(&self.bob)
            .fold(one, |acc, (x, m)| acc * m.eval(x));
        Ok(fa * gb)
    }
}

impl BipartiteState for ProductState {
    fn dim_a(&self) -> usize {
        self.alice.len()
    }
    fn dim_b(&self) -> usize {
        self.bob.len()
    }
    fn name(&self) -> String {
        "product".into()
    }
    fn length_scale(&self) -> f64 {
        self.alice
            .iter()
            .chain(&self.bob)
            .map(|m| m.scale().1)
            .fold(f64::INFINITY, f64::min)
    }
    fn center(&self) -> ConfigPoint {
        ConfigPoint::new(
            self.alice.iter().map(|m| m.scale().0).collect::<Vec<_>>(),
            self.bob.iter().map(|m| m.scale().0).collect::<Vec<_>>(),
        )
    }
    fn extent(&self) -> Option<f64> {
        self.alice
            .iter()
            .chain(&self.bob)
            .map(|m| m.extent())
            .try_fold(0.0f64, |acc, e| e.map(|e| acc.max(e)))
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
        if self.alice.iter().chain(&self.bob).all(Mode1D::normalizable) {
            Normalization::Unit
        } else {
            Normalization::Unnormalizable
        }
    }
    fn alice_marginal(&self, q_a: &[f64], axis: usize) -> Option<Result<[[C64; 3]; 3]>> {
        if q_a.len() != self.alice.len() || axis >= q_a.len() {
            return Some(Err(Error::DimensionMismatch {
                expected: self.alice.len(),
                got: q_a.len(),
                context: "Alice marginal",
            }));
        }
        // rho^A factorizes into f(x) conj(f(x')) times Bob's norm, which
        // cancels in every ratio.
        let shape = Shape::new(&[2]);
        let others: f64 = q_a
            .iter()
            .zip(&self.alice)
            .enumerate()
            .filter(|&(k, _)| k != axis)
            .map(|(_, (&x, m))| m.eval(&C64::new(x, 0.0)).norm_sqr())
            .product();
        let t = self.alice[axis].eval(&Taylor::affine(&shape, C64::new(q_a[axis], 0.0), &[1.0]));
        let d = [t.derivative(&[0]), t.derivative(&[1]), t.derivative(&[2])];
        let mut out = [[C64::new(0.0, 0.0); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = d[i] * d[j].conj() * others;
            }
        }
        Some(Ok(out))
    }
}
