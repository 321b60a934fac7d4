//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Taylor`] value stores the coefficients of a polynomial in a few
//! formal variables `t_0..t_{k-1}`, truncated independently in each variable
//! at the degree cap given by its [`Shape`]. Running a wavefunction formula
//! on `Taylor` inputs instead of plain complex numbers yields every mixed
//! partial derivative up to the caps in one pass, with no step-size error.
//!
//! Formulas are written once against the [`Scalar`] trait, which both
//! `Complex64` and `Taylor` implement.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64 as C64;

/// Arithmetic needed by the closed-form wavefunction families.
pub trait Scalar:
    Clone
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Add<C64, Output = Self>
    + Mul<C64, Output = Self>
{
    /// Constant term.
    fn value(&self) -> C64;
    /// A constant living in the same space as `self`.
    fn lift(&self, c: C64) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn powf(&self, p: f64) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn recip(&self) -> Self;

    fn powi(&self, n: u32) -> Self {
        let mut acc = self.lift(C64::new(1.0, 0.0));
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base.clone();
            }
            n >>= 1;
            if n > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    fn zero_like(&self) -> Self {
        self.lift(C64::new(0.0, 0.0))
    }
}

impl Scalar for C64 {
    fn value(&self) -> C64 {
        *self
    }
    fn lift(&self, c: C64) -> Self {
        c
    }
    fn exp(&self) -> Self {
        C64::exp(*self)
    }
    fn ln(&self) -> Self {
        C64::ln(*self)
    }
    fn sqrt(&self) -> Self {
        C64::sqrt(*self)
    }
    fn powf(&self, p: f64) -> Self {
        C64::powf(*self, p)
    }
    fn sin(&self) -> Self {
        C64::sin(*self)
    }
    fn cos(&self) -> Self {
        C64::cos(*self)
    }
    fn recip(&self) -> Self {
        C64::new(1.0, 0.0) / *self
    }
}

/// Degree caps and the precomputed product table for one variable layout.
pub struct Shape {
    caps: Vec<u8>,
    strides: Vec<usize>,
    exps: Vec<Vec<u8>>,
    table: Vec<(u32, u32, u32)>,
    degree: usize,
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Shape").field("caps", &self.caps).finish()
    }
}

impl Shape {
    pub fn new(caps: &[u8]) -> Arc<Shape> {
        let nvar = caps.len();
        let mut strides = vec![1usize; nvar];
        for k in (0..nvar.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * (caps[k + 1] as usize + 1);
        }
        let len: usize = caps.iter().map(|&c| c as usize + 1).product();
        let mut exps = Vec::with_capacity(len);
        for idx in 0..len {
            let mut e = vec![0u8; nvar];
            let mut rem = idx;
            for k in 0..nvar {
                e[k] = (rem / strides[k]) as u8;
                rem %= strides[k];
            }
            exps.push(e);
        }
        let mut table = Vec::new();
        for i in 0..len {
            for j in 0..len {
                let fits = (0..nvar).all(|k| exps[i][k] + exps[j][k] <= caps[k]);
                if fits {
                    let k: usize = (0..nvar)
                        .map(|v| (exps[i][v] + exps[j][v]) as usize * strides[v])
                        .sum();
                    table.push((i as u32, j as u32, k as u32));
                }
            }
        }
        Arc::new(Shape {
            caps: caps.to_vec(),
            strides,
            exps,
            table,
            degree: caps.iter().map(|&c| c as usize).sum(),
        })
    }

    pub fn caps(&self) -> &[u8] {
        &self.caps
    }

    pub fn nvars(&self) -> usize {
        self.caps.len()
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    /// Exponent vector of a flat index.
    pub fn exponents(&self, idx: usize) -> &[u8] {
        &self.exps[idx]
    }

    /// Flat index of an exponent vector, `None` when it exceeds a cap.
    pub fn index(&self, exps: &[u8]) -> Option<usize> {
        if exps.len() != self.caps.len() {
            return None;
        }
        let mut idx = 0;
        for (k, (&e, &c)) in exps.iter().zip(&self.caps).enumerate() {
            if e > c {
                return None;
            }
            idx += e as usize * self.strides[k];
        }
        Some(idx)
    }
}

/// Truncated Taylor polynomial with complex coefficients.
#[derive(Clone)]
pub struct Taylor {
    shape: Arc<Shape>,
    c: Vec<C64>,
}

impl fmt::Debug for Taylor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Taylor")
            .field("caps", &self.shape.caps)
            .field("coefficients", &self.c)
            .finish()
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl Taylor {
    pub fn constant(shape: &Arc<Shape>, v: C64) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); shape.len()];
        c[0] = v;
        Taylor {
            shape: shape.clone(),
            c,
        }
    }

    /// `v + sum_k slopes[k] t_k`.
    pub fn affine(shape: &Arc<Shape>, v: C64, slopes: &[f64]) -> Self {
        let mut out = Taylor::constant(shape, v);
        for (k, &s) in slopes.iter().enumerate() {
            if s != 0.0 && shape.caps[k] > 0 {
                out.c[shape.strides[k]] = C64::new(s, 0.0);
            }
        }
        out
    }

    /// Builds a value from coefficients laid out as in [`Shape::index`].
    pub fn from_coefficients(shape: &Arc<Shape>, c: Vec<C64>) -> Self {
        assert_eq!(c.len(), shape.len(), "coefficient count must match the shape");
        Taylor {
            shape: shape.clone(),
            c,
        }
    }

    pub fn shape(&self) -> &Arc<Shape> {
        &self.shape
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.c
    }

    /// Coefficient of `prod t_k^{e_k}`; zero when outside the caps.
    pub fn coeff(&self, exps: &[u8]) -> C64 {
        self.shape
            .index(exps)
            .map(|i| self.c[i])
            .unwrap_or(C64::new(0.0, 0.0))
    }

    /// Mixed partial derivative `prod d^{e_k}/dt_k^{e_k}` at the origin.
    pub fn derivative(&self, exps: &[u8]) -> C64 {
        let w: f64 = exps.iter().map(|&e| factorial(e as usize)).product();
        self.coeff(exps) * w
    }

    /// Evaluates `f(self)` from the derivatives `d[k] = f^{(k)}(self.value())`.
    pub(crate) fn compose(&self, d: &[C64]) -> Taylor {
        let k_max = self.shape.degree.min(d.len() - 1);
        let mut delta = self.clone();
        delta.c[0] = C64::new(0.0, 0.0);
        let mut acc = Taylor::constant(&self.shape, d[k_max] / factorial(k_max));
        for k in (0..k_max).rev() {
            acc = acc * delta.clone();
            acc.c[0] += d[k] / factorial(k);
        }
        acc
    }

    fn same_shape(&self, other: &Taylor) {
        debug_assert!(
            Arc::ptr_eq(&self.shape, &other.shape) || self.shape.caps == other.shape.caps,
            "mixing Taylor values of different shapes"
        );
    }
}

impl Add for Taylor {
    type Output = Taylor;
    fn add(mut self, rhs: Taylor) -> Taylor {
        self.same_shape(&rhs);
        for (a, b) in self.c.iter_mut().zip(&rhs.c) {
            *a += b;
        }
        self
    }
}

impl Sub for Taylor {
    type Output = Taylor;
    fn sub(mut self, rhs: Taylor) -> Taylor {
        self.same_shape(&rhs);
        for (a, b) in self.c.iter_mut().zip(&rhs.c) {
            *a -= b;
        }
        self
    }
}

impl Mul for Taylor {
    type Output = Taylor;
    fn mul(self, rhs: Taylor) -> Taylor {
        self.same_shape(&rhs);
        let mut out = vec![C64::new(0.0, 0.0); self.c.len()];
        for &(i, j, k) in &self.shape.table {
            out[k as usize] += self.c[i as usize] * rhs.c[j as usize];
        }
        Taylor {
            shape: self.shape,
            c: out,
        }
    }
}

impl Div for Taylor {
    type Output = Taylor;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Taylor) -> Taylor {
        self * rhs.recip()
    }
}

impl Neg for Taylor {
    type Output = Taylor;
    fn neg(mut self) -> Taylor {
        for a in self.c.iter_mut() {
            *a = -*a;
        }
        self
    }
}

impl Add<f64> for Taylor {
    type Output = Taylor;
    fn add(mut self, rhs: f64) -> Taylor {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Taylor {
    type Output = Taylor;
    fn sub(mut self, rhs: f64) -> Taylor {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Taylor {
    type Output = Taylor;
    fn mul(mut self, rhs: f64) -> Taylor {
        for a in self.c.iter_mut() {
            *a *= rhs;
        }
        self
    }
}

impl Add<C64> for Taylor {
    type Output = Taylor;
    fn add(mut self, rhs: C64) -> Taylor {
        self.c[0] += rhs;
        self
    }
}

impl Mul<C64> for Taylor {
    type Output = Taylor;
    fn mul(mut self, rhs: C64) -> Taylor {
        for a in self.c.iter_mut() {
            *a *= rhs;
        }
        self
    }
}

impl Scalar for Taylor {
    fn value(&self) -> C64 {
        self.c[0]
    }

    fn lift(&self, c: C64) -> Self {
        Taylor::constant(&self.shape, c)
    }

    fn exp(&self) -> Self {
        let e = self.c[0].exp();
        self.compose(&vec![e; self.shape.degree + 1])
    }

    fn ln(&self) -> Self {
        let g = self.c[0];
        let mut d = vec![g.ln()];
        let mut p = C64::new(1.0, 0.0);
        for k in 1..=self.shape.degree {
            p /= g;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            d.push(p * (sign * factorial(k - 1)));
        }
        self.compose(&d)
    }

    fn sqrt(&self) -> Self {
        self.powf(0.5)
    }

    fn powf(&self, p: f64) -> Self {
        let g = self.c[0];
        let base = if p == 0.5 { g.sqrt() } else { g.powf(p) };
        let mut d = vec![base];
        let mut falling = 1.0;
        let mut gk = C64::new(1.0, 0.0);
        for k in 1..=self.shape.degree {
            falling *= p - (k - 1) as f64;
            gk *= g;
            d.push(base * falling / gk);
        }
        self.compose(&d)
    }

    fn sin(&self) -> Self {
        let (s, c) = (self.c[0].sin(), self.c[0].cos());
        let cycle = [s, c, -s, -c];
        let d: Vec<C64> = (0..=self.shape.degree).map(|k| cycle[k % 4]).collect();
        self.compose(&d)
    }

    fn cos(&self) -> Self {
        let (s, c) = (self.c[0].sin(), self.c[0].cos());
        let cycle = [c, -s, -c, s];
        let d: Vec<C64> = (0..=self.shape.degree).map(|k| cycle[k % 4]).collect();
        self.compose(&d)
    }

    fn recip(&self) -> Self {
        let g = self.c[0];
        let mut d = Vec::with_capacity(self.shape.degree + 1);
        let mut p = C64::new(1.0, 0.0) / g;
        for k in 0..=self.shape.degree {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            d.push(p * (sign * factorial(k)));
            p /= g;
        }
        self.compose(&d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn product_of_exponentials_gives_mixed_partials() {
        // f(x, y) = exp(x y) at (0.3, -0.7)
        let shape = Shape::new(&[2, 2]);
        let (x0, y0) = (0.3, -0.7);
        let x = Taylor::affine(&shape, c(x0), &[1.0, 0.0]);
        let y = Taylor::affine(&shape, c(y0), &[0.0, 1.0]);
        let f = (x * y).exp();
        let e = (x0 * y0).exp();
        assert!(close(f.derivative(&[0, 0]), c(e), 1e-14));
        assert!(close(f.derivative(&[1, 0]), c(y0 * e), 1e-14));
        assert!(close(f.derivative(&[1, 1]), c((1.0 + x0 * y0) * e), 1e-14));
        assert!(close(f.derivative(&[2, 1]), c((2.0 * y0 + x0 * y0 * y0) * e), 1e-14));
        assert!(close(
            f.derivative(&[2, 2]),
            c((2.0 + 4.0 * x0 * y0 + x0 * x0 * y0 * y0) * e),
            1e-14
        ));
    }

    #[test]
    fn elementary_functions_match_series() {
        let shape = Shape::new(&[4]);
        let x0 = 1.3;
        let x = Taylor::affine(&shape, c(x0), &[1.0]);
        let s = x.sqrt();
        assert!(close(s.derivative(&[3]), c(3.0 / 8.0 * x0.powf(-2.5)), 1e-13));
        let l = x.ln();
        assert!(close(l.derivative(&[4]), c(-6.0 / x0.powi(4)), 1e-13));
        let r = x.recip();
        assert!(close(r.derivative(&[2]), c(2.0 / x0.powi(3)), 1e-13));
        let sn = x.sin();
        assert!(close(sn.derivative(&[3]), c(-x0.cos()), 1e-13));
        let cs = x.cos();
        assert!(close(cs.derivative(&[4]), c(x0.cos()), 1e-13));
        let q = x.clone() / (x.clone() * x.clone() + 1.0);
        // d/dx x/(1+x^2) = (1-x^2)/(1+x^2)^2
        let expect = (1.0 - x0 * x0) / (1.0 + x0 * x0).powi(2);
        assert!(close(q.derivative(&[1]), c(expect), 1e-13));
    }

    #[test]
    fn powi_agrees_with_repeated_product() {
        let shape = Shape::new(&[3, 1]);
        let x = Taylor::affine(&shape, C64::new(0.4, 0.2), &[1.0, 2.0]);
        let p = x.powi(5);
        let mut q = x.clone();
        for _ in 0..4 {
            q = q * x.clone();
        }
        for (a, b) in p.coefficients().iter().zip(q.coefficients()) {
            assert!(close(*a, *b, 1e-14));
        }
    }

    #[test]
    fn truncation_drops_terms_beyond_caps() {
        let shape = Shape::new(&[1, 1]);
        let x = Taylor::affine(&shape, c(0.0), &[1.0, 0.0]);
        let sq = x.clone() * x;
        assert!(sq.coefficients().iter().all(|v| v.norm() == 0.0));
        assert_eq!(shape.index(&[2, 0]), None);
    }
}
