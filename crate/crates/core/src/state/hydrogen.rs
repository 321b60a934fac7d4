//! Hydrogen-like bound states `phi_nlm`.
//!
//! The Cartesian form multiplies `R_nl(r) / r^l` by the solid harmonic
//! `r^l Y_lm`, which is a polynomial in `x, y, z`; this keeps the expression
//! smooth on the polar axis. The spherical form returns the separate radial
//! and angular derivatives needed by the chain rule in
//! [`crate::transforms::spherical_cartesian_jet`].

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{factorial, laguerre_coefficients, legendre_derivative_coefficients, polyval};
use crate::taylor::{Scalar, Shape, Taylor};

/// Radius of the excluded neighbourhood around the nucleus and the polar axis.
pub const EXCLUSION_RADIUS: f64 = 1e-8;

/// Quantum numbers and Bohr radius of one hydrogen-like orbital.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Orbital {
    pub n: u32,
    pub l: u32,
    pub m: i32,
    pub bohr: f64,
}

impl Orbital {
    pub fn new(n: u32, l: u32, m: i32, bohr: f64) -> Result<Self> {
        if n == 0 || l >= n || m.unsigned_abs() > l {
            return Err(Error::param(
                "n, l, m",
                format!("need n >= 1, l < n, |m| <= l (got {n}, {l}, {m})"),
            ));
        }
        if !(bohr > 0.0) {
            return Err(Error::param("bohr", "must be positive"));
        }
        Ok(Orbital { n, l, m, bohr })
    }

    pub fn ground(bohr: f64) -> Self {
        Orbital {
            n: 1,
            l: 0,
            m: 0,
            bohr,
        }
    }

    fn kappa(&self) -> f64 {
        2.0 / (f64::from(self.n) * self.bohr)
    }

    fn radial_norm(&self) -> f64 {
        let (n, l) = (self.n, self.l);
        let k = self.kappa();
        (k.powi(3) * factorial(n - l - 1) / (2.0 * f64::from(n) * factorial(n + l))).sqrt()
    }

    fn angular_norm(&self) -> f64 {
        let l = self.l;
        let am = self.m.unsigned_abs();
        ((2.0 * f64::from(l) + 1.0) / (4.0 * PI) * factorial(l - am) / factorial(l + am)).sqrt()
    }

    /// Condon–Shortley sign for non-negative `m`.
    fn phase(&self) -> f64 {
        if self.m >= 0 && self.m % 2 == 1 {
            -1.0
        } else {
            1.0
        }
    }

    /// `R_nl(r) / r^l` evaluated on `r`.
    fn radial_reduced<T: Scalar>(&self, r: &T) -> T {
        let k = self.kappa();
        let rho = r.clone() * k;
        let lag = polyval(
            &laguerre_coefficients(self.n - self.l - 1, 2 * self.l + 1),
            &rho,
        );
        (rho * -0.5).exp() * lag * (self.radial_norm() * k.powi(self.l as i32))
    }

    /// `phi_nlm(x, y, z)` in Cartesian form. With `check` set, points inside
    /// the nuclear exclusion radius are rejected.
    pub fn cartesian<T: Scalar>(&self, r: &[T], check: bool) -> Result<T> {
        if r.len() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                got: r.len(),
                context: "hydrogen relative coordinate",
            });
        }
        let (x, y, z) = (&r[0], &r[1], &r[2]);
        let r2 = x.clone() * x.clone() + y.clone() * y.clone() + z.clone() * z.clone();
        if check && r2.value().re < EXCLUSION_RADIUS * EXCLUSION_RADIUS {
            return Err(Error::Domain(format!(
                "within {EXCLUSION_RADIUS:e} of the nucleus"
            )));
        }
        let rr = r2.sqrt();
        let am = self.m.unsigned_abs();
        let sign = if self.m >= 0 { 1.0 } else { -1.0 };
        let xy = x.clone() + y.clone() * C64::new(0.0, sign);
        let coeffs = legendre_derivative_coefficients(self.l, am);
        let mut poly = x.zero_like();
        for (j, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let rest = (self.l - am) as usize - j;
            debug_assert!(rest % 2 == 0);
            poly = poly + z.powi(j as u32) * r2.powi((rest / 2) as u32) * c;
        }
        let solid = xy.powi(am) * poly * (self.phase() * self.angular_norm());
        Ok(self.radial_reduced(&rr) * solid)
    }

    /// Radial and angular derivatives at a spherical point.
    pub fn spherical_derivs(&self, r: f64, theta: f64, phi: f64) -> Result<SphericalDerivs> {
        if r < EXCLUSION_RADIUS {
            return Err(Error::Domain(format!(
                "within {EXCLUSION_RADIUS:e} of the nucleus"
            )));
        }
        let s1 = Shape::new(&[2]);
        let rt = Taylor::affine(&s1, C64::new(r, 0.0), &[1.0]);
        let rad = self.radial_reduced(&rt) * rt.powi(self.l);
        let s2 = Shape::new(&[2, 2]);
        let th = Taylor::affine(&s2, C64::new(theta, 0.0), &[1.0, 0.0]);
        let ph = Taylor::affine(&s2, C64::new(phi, 0.0), &[0.0, 1.0]);
        let am = self.m.unsigned_abs();
        let dp = polyval(&legendre_derivative_coefficients(self.l, am), &th.cos());
        let ang = th.sin().powi(am)
            * dp
            * (ph * C64::new(0.0, f64::from(self.m))).exp()
            * (self.phase() * self.angular_norm());
        let (r0, r1, r2) = (rad.derivative(&[0]), rad.derivative(&[1]), rad.derivative(&[2]));
        let y = |e: [u8; 2]| ang.derivative(&e);
        let y0 = y([0, 0]);
        Ok(SphericalDerivs {
            value: r0 * y0,
            d_r: r1 * y0,
            d_theta: r0 * y([1, 0]),
            d_phi: r0 * y([0, 1]),
            d_rr: r2 * y0,
            d_rtheta: r1 * y([1, 0]),
            d_rphi: r1 * y([0, 1]),
            d_thetatheta: r0 * y([2, 0]),
            d_thetaphi: r0 * y([1, 1]),
            d_phiphi: r0 * y([0, 2]),
        })
    }

    /// Characteristic radius of the orbital.
    pub fn size(&self) -> f64 {
        2.0 * f64::from(self.n * self.n) * self.bohr
    }
}

/// First and second partial derivatives in spherical coordinates `(r, theta, phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SphericalDerivs {
    pub value: C64,
    pub d_r: C64,
    pub d_theta: C64,
    pub d_phi: C64,
    pub d_rr: C64,
    pub d_rtheta: C64,
    pub d_rphi: C64,
    pub d_thetatheta: C64,
    pub d_thetaphi: C64,
    pub d_phiphi: C64,
}
