//! One-dimensional interaction potentials `V(r)`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::taylor::{Scalar, Shape, Taylor};

/// Natural cubic spline through tabulated `(r, V)` samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Samples", into = "Samples")]
pub struct CubicSpline {
    r: Vec<f64>,
    v: Vec<f64>,
    second: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Samples {
    r: Vec<f64>,
    v: Vec<f64>,
}

impl TryFrom<Samples> for CubicSpline {
    type Error = Error;
    fn try_from(s: Samples) -> Result<Self> {
        CubicSpline::new(s.r, s.v)
    }
}

impl From<CubicSpline> for Samples {
    fn from(s: CubicSpline) -> Self {
        Samples { r: s.r, v: s.v }
    }
}

impl CubicSpline {
    pub fn new(r: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        let n = r.len();
        if n < 3 || v.len() != n {
            return Err(Error::param("tabulated", "needs at least 3 (r, V) pairs of equal length"));
        }
        if r.windows(2).any(|w| !(w[1] > w[0])) || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::param("tabulated", "r must increase strictly and V be finite"));
        }
        // tridiagonal solve for the second derivatives, zero at both ends
        let mut second = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            let (h0, h1) = (r[i] - r[i - 1], r[i + 1] - r[i]);
            diag[i] = 2.0 * (h0 + h1);
            rhs[i] = 6.0 * ((v[i + 1] - v[i]) / h1 - (v[i] - v[i - 1]) / h0);
        }
        for i in 2..n - 1 {
            let w = (r[i] - r[i - 1]) / diag[i - 1];
            diag[i] -= w * (r[i] - r[i - 1]);
            rhs[i] -= w * rhs[i - 1];
        }
        for i in (1..n - 1).rev() {
            second[i] = (rhs[i] - (r[i + 1] - r[i]) * second[i + 1]) / diag[i];
        }
        Ok(CubicSpline { r, v, second })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.r[0], self.r[self.r.len() - 1])
    }

    fn eval<T: Scalar>(&self, x: &T) -> T {
        let xr = x.value().re;
        let n = self.r.len();
        let i = match self.r.partition_point(|&ri| ri <= xr) {
            0 => 0,
            k => (k - 1).min(n - 2),
        };
        let h = self.r[i + 1] - self.r[i];
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let b = (self.v[i + 1] - self.v[i]) / h - h * (2.0 * m0 + m1) / 6.0;
        let s = x.clone() - self.r[i];
        let c3 = (m1 - m0) / (6.0 * h);
        ((s.clone() * c3 + 0.5 * m0) * s.clone() + b) * s + self.v[i]
    }
}

fn tanh<T: Scalar>(u: &T) -> T {
    // stay on the side where exp does not overflow
    if u.value().re <= 0.0 {
        let e = (u.clone() * 2.0).exp() + 1.0;
        -(e.recip() * 2.0) + 1.0
    } else {
        let e = (u.clone() * -2.0).exp() + 1.0;
        e.recip() * 2.0 - 1.0
    }
}

/// Built-in potentials plus tabulated samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Potential {
    /// `k (r - center)^2 / 2`.
    Harmonic { stiffness: f64, center: f64 },
    /// `D (1 - exp(-alpha (r - r0)))^2`.
    Morse { depth: f64, alpha: f64, r0: f64 },
    /// `-D/2 [tanh((r + w)/s) - tanh((r - w)/s)]`, flat outside `|r| > w`.
    TanhWell { depth: f64, half_width: f64, steepness: f64 },
    /// `F |r - center|`; not smooth at the centre.
    Linear { slope: f64, center: f64 },
    Tabulated(CubicSpline),
}

impl Potential {
    pub fn harmonic(mass: f64, omega: f64) -> Self {
        Potential::Harmonic {
            stiffness: mass * omega * omega,
            center: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Potential::Harmonic { stiffness, center } => *stiffness > 0.0 && center.is_finite(),
            Potential::Morse { depth, alpha, r0 } => *depth > 0.0 && *alpha > 0.0 && r0.is_finite(),
            Potential::TanhWell {
                depth,
                half_width,
                steepness,
            } => *depth > 0.0 && *half_width > 0.0 && *steepness > 0.0,
            Potential::Linear { slope, center } => *slope > 0.0 && center.is_finite(),
            Potential::Tabulated(_) => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::param("potential", "parameters must be positive and finite"))
        }
    }

    pub fn eval<T: Scalar>(&self, r: &T) -> T {
        match self {
            Potential::Harmonic { stiffness, center } => {
                let d = r.clone() - *center;
                d.clone() * d * (0.5 * stiffness)
            }
            Potential::Morse { depth, alpha, r0 } => {
                let e = -((r.clone() - *r0) * -*alpha).exp() + 1.0;
                e.clone() * e * *depth
            }
            Potential::TanhWell {
                depth,
                half_width,
                steepness,
            } => {
                let hi = tanh(&((r.clone() + *half_width) * (1.0 / steepness)));
                let lo = tanh(&((r.clone() - *half_width) * (1.0 / steepness)));
                (hi - lo) * (-0.5 * depth)
            }
            Potential::Linear { slope, center } => {
                let d = r.clone() - *center;
                if d.value().re >= 0.0 {
                    d * *slope
                } else {
                    d * -*slope
                }
            }
            Potential::Tabulated(s) => s.eval(r),
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.eval(&C64::new(r, 0.0)).re
    }

    /// `(V, V', V'')` at `r`.
    pub fn derivs(&self, r: f64) -> (f64, f64, f64) {
        let d = self.series(r, 2);
        (d[0], d[1], d[2])
    }

    /// `V^{(k)}(r)` for `k = 0..=order`.
    pub fn series(&self, r: f64, order: u8) -> Vec<f64> {
        let shape = Shape::new(&[order]);
        let t = self.eval(&Taylor::affine(&shape, C64::new(r, 0.0), &[1.0]));
        (0..=order).map(|k| t.derivative(&[k]).re).collect()
    }
}
