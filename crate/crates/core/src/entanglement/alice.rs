//! Alice measures alone: Bob's coordinates are traced over all space.

use num_complex::Complex64 as C64;

use super::MeasurementRegion;
use crate::error::{Error, Result};
use crate::quadrature::composite;
use crate::state::{BipartiteState, ConfigPoint};

/// Partials `r[n1][n2] = d^n1_q d^n2_q' rho^A(q, q')` at `q = q' = q_a`
/// along one Alice axis.
pub fn alice_rho_partials(
    state: &(impl BipartiteState + ?Sized),
    q_a: &[f64],
    axis: usize,
) -> Result<[[C64; 3]; 3]> {
    if axis >= state.dim_a() || q_a.len() != state.dim_a() {
        return Err(Error::DimensionMismatch {
            expected: state.dim_a(),
            got: q_a.len().max(axis + 1),
            context: "Alice marginal",
        });
    }
    if let Some(r) = state.alice_marginal(q_a, axis) {
        return r;
    }
    traced_partials(state, q_a, axis)
}

const TRACE_TOLERANCE: f64 = 1e-10;

fn traced_partials(
    state: &(impl BipartiteState + ?Sized),
    q_a: &[f64],
    axis: usize,
) -> Result<[[C64; 3]; 3]> {
    let extent = state.extent().ok_or_else(|| {
        Error::Quadrature("tracing Bob out needs a finite extent for the state".into())
    })?;
    let dim_b = state.dim_b();
    if dim_b > 2 {
        return Err(Error::Quadrature(format!(
            "full-space trace over {dim_b} Bob axes is not supported without a closed-form marginal"
        )));
    }
    let center = state.center().q_b;
    let mut dir = vec![0.0; state.dim_a() + dim_b];
    dir[axis] = 1.0;
    let dirs = [dir];

    let evaluate = |panels: usize| -> Result<[[C64; 3]; 3]> {
        let axes: Vec<(Vec<f64>, Vec<f64>)> = center
            .iter()
            .map(|&c| composite(8, panels, c - extent, c + extent))
            .collect();
        let mut acc = [[C64::new(0.0, 0.0); 3]; 3];
        let n = axes[0].0.len();
        let total = n.pow(dim_b as u32);
        for flat in 0..total {
            let mut rem = flat;
            let mut y = Vec::with_capacity(dim_b);
            let mut w = 1.0;
            for (x, wx) in &axes {
                let k = rem % n;
                rem /= n;
                y.push(x[k]);
                w *= wx[k];
            }
            let t = state.taylor(&ConfigPoint::new(q_a.to_vec(), y), &dirs, &[2])?;
            let d = [t.derivative(&[0]), t.derivative(&[1]), t.derivative(&[2])];
            for n1 in 0..3 {
                for n2 in 0..3 {
                    acc[n1][n2] += d[n1] * d[n2].conj() * w;
                }
            }
        }
        Ok(acc)
    };

    let scale = state.length_scale();
    let mut panels = 16;
    let mut prev = evaluate(panels)?;
    while panels < 256 {
        panels *= 2;
        let next = evaluate(panels)?;
        let r00 = next[0][0].norm();
        let mut worst: f64 = 0.0;
        for n1 in 0..3 {
            for n2 in 0..3 {
                let floor = r00 / scale.powi((n1 + n2) as i32);
                let rel = (next[n1][n2] - prev[n1][n2]).norm() / next[n1][n2].norm().max(floor);
                worst = worst.max(rel);
            }
        }
        if worst < TRACE_TOLERANCE {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature(
        "trace over Bob's space did not settle within 256 panels".into(),
    ))
}

/// `(lambda_1, lambda_2, lambda_3)` when only Alice's box is applied.
/// Requires a region built with [`MeasurementRegion::alice_only`].
pub fn epsilon_alice_only(
    state: &(impl BipartiteState + ?Sized),
    region: &MeasurementRegion,
) -> Result<(f64, f64, f64)> {
    region.check(state)?;
    if !region.is_alice_only() {
        return Err(Error::param("half_widths_b", "must be empty for an Alice-only measurement"));
    }
    let mut l1 = 0.0;
    let mut l3 = 0.0;
    for (i, &a) in region.half_widths_a.iter().enumerate() {
        let r = alice_rho_partials(state, &region.center.q_a, i)?;
        let (c1, c3) = alice_axis_terms(&r, a)?;
        l1 += c1;
        l3 += c3;
    }
    Ok((l1, 1.0 - l1, l3))
}

/// First- and third-eigenvalue contributions of one Alice axis.
pub(crate) fn alice_axis_terms(r: &[[C64; 3]; 3], a: f64) -> Result<(f64, f64)> {
    let r00 = r[0][0];
    if r00.norm() == 0.0 {
        return Err(Error::NodeCutoff);
    }
    let gram2 = r00 * r[1][1] - r[0][1] * r[1][0];
    let l1 = a * a * (gram2 / (r00 * r00)).re / 3.0;
    let br = r[0][2] * r[1][1] * r[2][0] + r[0][1] * r[2][2] * r[1][0] + r[1][2] * r[0][0] * r[2][1]
        - r[0][1] * r[1][2] * r[2][0]
        - r[1][0] * r[0][2] * r[2][1]
        - r[0][0] * r[1][1] * r[2][2];
    let scale = r00.norm() * r[1][1].norm() + r[0][1].norm() * r[1][0].norm();
    let l3 = if gram2.norm() <= 1e-12 * scale {
        0.0
    } else {
        // the a^4 / (90 rho00^2 ...) normalization times 2 rho00
        let partial = br * a.powi(4) / (r00 * r00 * (r[0][1] * r[1][0] - r[1][1] * r00) * 90.0);
        (partial * r00 * 2.0).re
    };
    Ok((l1, l3))
}

/// Largest Alice half-widths for which the expansion of `rho^A` holds.
pub(crate) fn alice_a_max(r: &[[C64; 3]; 3], sigma: f64) -> f64 {
    let g = r[1][0].norm();
    if g == 0.0 {
        f64::INFINITY
    } else {
        sigma * r[0][0].norm() / g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{ComRelState, FnState, GaussianState};

    #[test]
    fn closed_form_marginal_matches_trace() {
        let g = ComRelState::coupled_oscillator_from_lengths(0, 0, 1.0, 1.0, 4.0, 2.0).unwrap();
        let q = [0.7];
        let closed = alice_rho_partials(&g, &q, 0).unwrap();
        let traced = traced_partials(&g, &q, 0).unwrap();
        for n1 in 0..3 {
            for n2 in 0..3 {
                let d = (closed[n1][n2] / closed[0][0] - traced[n1][n2] / traced[0][0]).norm();
                assert!(d < 1e-9, "{n1}{n2}: {d}");
            }
        }
    }

    #[test]
    fn gaussian_ground_state_lambda1() {
        let (alpha, beta, gamma) = (0.8, -0.3, 0.6);
        let s = GaussianState::two_mode(alpha, beta, gamma).unwrap();
        let a = 0.1;
        let region = MeasurementRegion::alice_only(ConfigPoint::new(vec![0.4], vec![0.0]), vec![a]).unwrap();
        let (l1, l2, l3) = epsilon_alice_only(&s, &region).unwrap();
        let want = a * a * beta * beta / (6.0 * gamma);
        assert!((l1 - want).abs() < 1e-9 * want);
        assert!((l1 + l2 - 1.0).abs() < 1e-15);
        assert!(l3 > 0.0 && l3 < l1 * a * a);
    }

    #[test]
    fn product_state_has_no_alice_entanglement() {
        let s = FnState::new("product", 1, 1, |a, b| {
            C64::new((-(a[0] - 0.2).powi(2) - 0.5 * b[0] * b[0]).exp(), 0.0)
        })
        .with_extent(8.0)
        .unwrap();
        let region = MeasurementRegion::alice_only(ConfigPoint::new(vec![0.1], vec![0.0]), vec![0.1]).unwrap();
        let (l1, _, l3) = epsilon_alice_only(&s, &region).unwrap();
        assert!(l1.abs() < 1e-8, "{l1}");
        assert!(l3.abs() < 1e-12, "{l3}");
    }
}
