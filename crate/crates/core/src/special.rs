//! Orthogonal polynomials written against [`Scalar`] so they work for both
//! plain values and Taylor jets.

use num_complex::Complex64 as C64;

use crate::taylor::Scalar;

pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).map(|i| f64::from(n - i) / f64::from(i + 1)).product()
}

/// Physicists' Hermite polynomial `H_n(x)` by the three-term recurrence.
pub fn hermite<T: Scalar>(n: u32, x: &T) -> T {
    let one = x.lift(C64::new(1.0, 0.0));
    if n == 0 {
        return one;
    }
    let mut h0 = one;
    let mut h1 = x.clone() * 2.0;
    for k in 1..n {
        let h2 = x.clone() * h1.clone() * 2.0 - h0 * (2.0 * f64::from(k));
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Coefficients (ascending powers) of the generalized Laguerre polynomial `L_k^alpha`.
pub fn laguerre_coefficients(k: u32, alpha: u32) -> Vec<f64> {
    (0..=k)
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(k + alpha, k - i) / factorial(i)
        })
        .collect()
}

/// Coefficients (ascending powers) of `d^m P_l / dt^m`.
pub fn legendre_derivative_coefficients(l: u32, m: u32) -> Vec<f64> {
    // P_l(t) = 2^-l sum_k (-1)^k C(l,k) C(2l-2k, l) t^(l-2k)
    let mut p = vec![0.0; l as usize + 1];
    for k in 0..=l / 2 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        p[(l - 2 * k) as usize] =
            sign * binomial(l, k) * binomial(2 * l - 2 * k, l) / 2f64.powi(l as i32);
    }
    for _ in 0..m {
        if p.len() <= 1 {
            return vec![0.0];
        }
        p = p
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| c * j as f64)
            .collect();
    }
    p
}

/// Horner evaluation of a real-coefficient polynomial.
pub fn polyval<T: Scalar>(coeffs: &[f64], x: &T) -> T {
    let mut acc = x.lift(C64::new(*coeffs.last().unwrap_or(&0.0), 0.0));
    for &c in coeffs.iter().rev().skip(1) {
        acc = acc * x.clone() + c;
    }
    acc
}
