//! Derivative jets at a reference point and the finite-difference fallback.
//!
//! The local expansion of a state around `(qbar_A, qbar_B)` is summarized by
//! the partials `D_kl = d^k_{q_A,i} d^l_{q_B,j} psi`. The density-matrix
//! partials are products of these,
//! `rho_{n1 n2 n3 n4} = D_{n1 n3} conj(D_{n2 n4})`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{check_request, BipartiteState, ConfigPoint, MultiIndex};
use crate::taylor::{Shape, Taylor};

/// Partials of `psi` along one Alice axis and one Bob axis, up to order
/// `max_order` in each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeJet {
    pub point: ConfigPoint,
    pub axis_a: usize,
    pub axis_b: usize,
    pub max_order: u8,
    /// `d[k][l] = d^k_A d^l_B psi`; entries beyond `max_order` are zero.
    pub d: [[C64; 3]; 3],
    /// Whether the entries are exact rather than finite-difference estimates.
    pub exact: bool,
}

impl DerivativeJet {
    pub fn get(&self, k: usize, l: usize) -> C64 {
        self.d[k][l]
    }

    /// Entry for a multi-index that only involves this jet's two axes.
    pub fn entry(&self, idx: &MultiIndex) -> Result<C64> {
        let others = idx
            .order_a
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != self.axis_a)
            .chain(
                idx.order_b
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != self.axis_b),
            )
            .any(|(_, &o)| o > 0);
        let k = *idx.order_a.get(self.axis_a).unwrap_or(&0);
        let l = *idx.order_b.get(self.axis_b).unwrap_or(&0);
        if others || k > self.max_order || l > self.max_order {
            return Err(Error::UnsupportedOrder {
                order: idx.total(),
                detail: "multi-index not covered by this jet".into(),
            });
        }
        Ok(self.d[k as usize][l as usize])
    }

    /// `rho_{n1 n2 n3 n4}` at the reference point: `n1, n2` count Alice
    /// derivatives on the ket and bra, `n3, n4` Bob's.
    pub fn rho(&self, n1: usize, n2: usize, n3: usize, n4: usize) -> C64 {
        self.d[n1][n3] * self.d[n2][n4].conj()
    }

    /// `D_00 D_11 - D_10 D_01`, the first-order connected part.
    pub fn delta(&self) -> C64 {
        self.d[0][0] * self.d[1][1] - self.d[1][0] * self.d[0][1]
    }
}

/// Partials along Alice axis `axis_a` and Bob axis `axis_b` up to `max_order` (1 or 2).
pub fn build_jet(
    state: &(impl BipartiteState + ?Sized),
    point: &ConfigPoint,
    axis_a: usize,
    axis_b: usize,
    max_order: u8,
) -> Result<DerivativeJet> {
    if axis_a >= state.dim_a() || axis_b >= state.dim_b() {
        return Err(Error::DimensionMismatch {
            expected: state.dim_a().max(state.dim_b()),
            got: axis_a.max(axis_b),
            context: "jet axis",
        });
    }
    if !(1..=2).contains(&max_order) {
        return Err(Error::UnsupportedOrder {
            order: max_order as usize,
            detail: "jets hold orders 1 or 2 per side".into(),
        });
    }
    let n = state.dim_a() + state.dim_b();
    let mut ea = vec![0.0; n];
    ea[axis_a] = 1.0;
    let mut eb = vec![0.0; n];
    eb[state.dim_a() + axis_b] = 1.0;
    let t = state.taylor(point, &[ea, eb], &[max_order, max_order])?;
    let mut d = [[C64::new(0.0, 0.0); 3]; 3];
    for k in 0..=max_order {
        for l in 0..=max_order {
            d[k as usize][l as usize] = t.derivative(&[k, l]);
        }
    }
    Ok(DerivativeJet {
        point: point.clone(),
        axis_a,
        axis_b,
        max_order,
        d,
        exact: state.exact_derivatives(),
    })
}

/// `rho_{n1 n2 n3 n4}` from a jet, rejecting indices beyond its order.
pub fn rho_partial(jet: &DerivativeJet, n: [u8; 4]) -> Result<C64> {
    if n.iter().any(|&k| k > jet.max_order) {
        return Err(Error::UnsupportedOrder {
            order: n.iter().map(|&k| k as usize).sum(),
            detail: format!("jet holds orders up to {}", jet.max_order),
        });
    }
    Ok(jet.rho(n[0] as usize, n[1] as usize, n[2] as usize, n[3] as usize))
}

/// Result of a Richardson-extrapolated finite difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdEstimate {
    pub value: C64,
    /// Relative change between the last two extrapolation levels.
    pub change: f64,
    pub converged: bool,
}

/// Relative change below which a finite-difference estimate counts as converged.
pub const FD_TOLERANCE: f64 = 1e-5;

fn stencil(order: u8) -> (&'static [i32], &'static [f64]) {
    match order {
        0 => (&[0], &[1.0]),
        1 => (&[-1, 1], &[-0.5, 0.5]),
        2 => (&[-1, 0, 1], &[1.0, -2.0, 1.0]),
        3 => (&[-2, -1, 1, 2], &[-0.5, 1.0, -1.0, 0.5]),
        _ => (&[-2, -1, 0, 1, 2], &[1.0, -4.0, 6.0, -4.0, 1.0]),
    }
}

/// Mixed partial derivative of `f` at `x0` by tensor-product central
/// differences with two Richardson refinements (step ratio 2). `scale` is
/// the length over which `f` varies. Total order must not exceed 4.
pub fn fd_derivative<F>(f: F, x0: &[f64], orders: &[u8], scale: f64) -> Result<FdEstimate>
where
    F: Fn(&[f64]) -> Result<C64>,
{
    let total: usize = orders.iter().map(|&o| o as usize).sum();
    if orders.len() != x0.len() {
        return Err(Error::DimensionMismatch {
            expected: x0.len(),
            got: orders.len(),
            context: "finite-difference orders",
        });
    }
    if total > 4 {
        return Err(Error::UnsupportedOrder {
            order: total,
            detail: "finite differences support total order <= 4".into(),
        });
    }
    let f0 = f(x0)?;
    if total == 0 {
        return Ok(FdEstimate {
            value: f0,
            change: 0.0,
            converged: true,
        });
    }
    let h0 = 2.0 * scale * f64::EPSILON.powf(1.0 / (total as f64 + 6.0));
    let active: Vec<usize> = (0..orders.len()).filter(|&k| orders[k] > 0).collect();
    let estimate = |h: f64| -> Result<C64> {
        let stencils: Vec<_> = active.iter().map(|&k| stencil(orders[k])).collect();
        let sizes: Vec<usize> = stencils.iter().map(|s| s.0.len()).collect();
        let count: usize = sizes.iter().product();
        let mut acc = C64::new(0.0, 0.0);
        let mut x = x0.to_vec();
        for flat in 0..count {
            let mut rem = flat;
            let mut w = 1.0;
            for (&k, &(offs, ws)) in active.iter().zip(&stencils).rev() {
                let i = rem % offs.len();
                rem /= offs.len();
                x[k] = x0[k] + f64::from(offs[i]) * h;
                w *= ws[i];
            }
            acc += f(&x)? * w;
        }
        Ok(acc / h.powi(total as i32))
    };
    let d1 = estimate(h0)?;
    let d2 = estimate(h0 / 2.0)?;
    let d3 = estimate(h0 / 4.0)?;
    let r1a = (d2 * 4.0 - d1) / 3.0;
    let r1b = (d3 * 4.0 - d2) / 3.0;
    let r2 = (r1b * 16.0 - r1a) / 15.0;
    let reference = r2.norm().max(f0.norm() / scale.powi(total as i32)).max(1e-300);
    let change = (r2 - r1b).norm() / reference;
    Ok(FdEstimate {
        value: r2,
        change,
        converged: change <= FD_TOLERANCE,
    })
}

/// Taylor expansion of a state by finite differences along the given directions.
pub fn fd_taylor(
    state: &(impl BipartiteState + ?Sized),
    point: &ConfigPoint,
    dirs: &[Vec<f64>],
    caps: &[u8],
) -> Result<Taylor> {
    check_request(state, point, dirs, caps)?;
    let shape = Shape::new(caps);
    let norms: Vec<f64> = dirs
        .iter()
        .map(|d| d.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300))
        .collect();
    let scale = state.length_scale() / norms.iter().cloned().fold(0.0, f64::max).max(1e-300);
    let g = |t: &[f64]| state.amplitude(&point.displaced(dirs, t));
    let t0 = vec![0.0; dirs.len()];
    let mut coeffs = Vec::with_capacity(shape.len());
    for idx in 0..shape.len() {
        let e = shape.exponents(idx).to_vec();
        let est = fd_derivative(g, &t0, &e, scale)?;
        if !est.converged {
            return Err(Error::NotConverged { change: est.change });
        }
        let w: f64 = e
            .iter()
            .map(|&k| (1..=k as u32).map(f64::from).product::<f64>())
            .product();
        coeffs.push(est.value / w);
    }
    Ok(Taylor::from_coefficients(&shape, coeffs))
}
