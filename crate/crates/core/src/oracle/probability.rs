//! Box probabilities `p_ab` by tensor Gauss–Legendre quadrature.

use rayon::prelude::*;

use crate::entanglement::MeasurementRegion;
use crate::error::{Error, Result};
use crate::quadrature::{composite, GaussLegendre};
use crate::state::{BipartiteState, ConfigPoint, Normalization};

const PROBABILITY_TOLERANCE: f64 = 1e-8;

/// Tensor grid as per-axis (nodes, weights).
type Axes = Vec<(Vec<f64>, Vec<f64>)>;

fn tensor_sum<F>(axes: &Axes, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let dims = axes.len();
    let sizes: Vec<usize> = axes.iter().map(|a| a.0.len()).collect();
    let total: usize = sizes.iter().product();
    // fixed chunking keeps the summation order independent of thread count
    const CHUNK: usize = 4096;
    let partial: Vec<f64> = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| -> Result<f64> {
            let mut acc = 0.0;
            let mut x = vec![0.0; dims];
            for flat in c * CHUNK..((c + 1) * CHUNK).min(total) {
                let mut rem = flat;
                let mut w = 1.0;
                for k in 0..dims {
                    let i = rem % sizes[k];
                    rem /= sizes[k];
                    x[k] = axes[k].0[i];
                    w *= axes[k].1[i];
                }
                acc += w * f(&x)?;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(partial.iter().sum())
}

fn density(state: &(impl BipartiteState + ?Sized), x: &[f64]) -> Result<f64> {
    Ok(state
        .amplitude(&ConfigPoint::from_concat(x, state.dim_a()))?
        .norm_sqr())
}

/// `int |psi|^2` over the state's extent, computed once and cached.
pub fn normalization_constant(state: &(impl BipartiteState + ?Sized)) -> Result<f64> {
    match state.normalization() {
        Normalization::Unit => Ok(1.0),
        Normalization::RelativeOnly => Err(Error::Unnormalizable(
            "plane-wave centre of mass; only the relative density is normalized".into(),
        )),
        Normalization::Unnormalizable => Err(Error::Unnormalizable(state.name())),
        Normalization::Numeric => {
            if let Some(v) = state.norm_cache().and_then(|c| c.get()) {
                return Ok(*v);
            }
            let z = integrate_extent(state)?;
            if let Some(c) = state.norm_cache() {
                let _ = c.set(z);
            }
            Ok(z)
        }
    }
}

fn integrate_extent(state: &(impl BipartiteState + ?Sized)) -> Result<f64> {
    let extent = state
        .extent()
        .ok_or_else(|| Error::Unnormalizable(format!("{} has no finite extent", state.name())))?;
    let dims = state.dim_a() + state.dim_b();
    let (per_panel, panels) = match dims {
        0..=2 => (16, 32),
        3..=4 => (8, 8),
        _ => {
            return Err(Error::Unnormalizable(format!(
                "numerical normalization over {dims} axes is not supported"
            )))
        }
    };
    let c = state.center().concat();
    let axes: Axes = c
        .iter()
        .map(|&c| composite(per_panel, panels, c - extent, c + extent))
        .collect();
    let z = tensor_sum(&axes, |x| density(state, x))?;
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::Unnormalizable(format!("integral of |psi|^2 is {z}")));
    }
    Ok(z)
}

fn box_axes(region: &MeasurementRegion, order: usize) -> Axes {
    let rule = GaussLegendre::cached(order);
    let c = region.center.concat();
    c.iter()
        .zip(region.half_widths_a.iter().chain(&region.half_widths_b))
        .map(|(&c, &w)| rule.on_interval(c - w, c + w))
        .collect()
}

/// Probability that both particles are found in their boxes, with the
/// default order: 16 nodes per axis up to four axes, otherwise 8 nodes
/// checked against 6.
pub fn probability_mass(state: &(impl BipartiteState + ?Sized), region: &MeasurementRegion) -> Result<f64> {
    probability_mass_order(state, region, None)
}

/// [`probability_mass`] with an explicit per-axis order (no convergence check).
pub fn probability_mass_order(
    state: &(impl BipartiteState + ?Sized),
    region: &MeasurementRegion,
    order: Option<usize>,
) -> Result<f64> {
    region.check(state)?;
    region.require_joint()?;
    if state.normalization() == Normalization::RelativeOnly {
        return relative_probability(state, region, order);
    }
    let z = normalization_constant(state)?;
    let dims = state.dim_a() + state.dim_b();
    let eval = |n: usize| tensor_sum(&box_axes(region, n), |x| density(state, x)).map(|p| p / z);
    match order {
        Some(n) => eval(n),
        None if dims <= 4 => eval(16),
        None => {
            let fine = eval(8)?;
            let coarse = eval(6)?;
            check_converged(fine, coarse)?;
            Ok(fine)
        }
    }
}

fn check_converged(fine: f64, coarse: f64) -> Result<()> {
    let change = (fine - coarse).abs() / fine.abs().max(f64::MIN_POSITIVE);
    if change > PROBABILITY_TOLERANCE && (fine - coarse).abs() > 1e-300 {
        Err(Error::Quadrature(format!(
            "box probability changed by {change:.3e} between orders"
        )))
    } else {
        Ok(())
    }
}

/// Plane-wave centre of mass: the probability that Alice lies in her box
/// given that Bob lies in his, `int |phi(r)|^2 prod_i w_i(r_i) dr` with
/// `w_i` the overlap length of the two boxes along `r_i` divided by `2 b_i`.
fn relative_probability(
    state: &(impl BipartiteState + ?Sized),
    region: &MeasurementRegion,
    order: Option<usize>,
) -> Result<f64> {
    let d = state.dim_a();
    if state.dim_b() != d {
        return Err(Error::Unnormalizable("relative density needs equal dimensions".into()));
    }
    let n = order.unwrap_or(if d <= 2 { 16 } else { 8 });
    let rule = GaussLegendre::cached(n);
    let mut axes: Axes = Vec::with_capacity(d);
    for i in 0..d {
        let (ca, cb) = (region.center.q_a[i], region.center.q_b[i]);
        let (a, b) = (region.half_widths_a[i], region.half_widths_b[i]);
        let off = ca - cb;
        let breaks = [off - a - b, off - (a - b).abs(), off + (a - b).abs(), off + a + b];
        let mut x = Vec::new();
        let mut w = Vec::new();
        for k in 0..3 {
            if breaks[k + 1] - breaks[k] <= 0.0 {
                continue;
            }
            let (xs, ws) = rule.on_interval(breaks[k], breaks[k + 1]);
            for (xr, wr) in xs.into_iter().zip(ws) {
                let overlap = ((ca + a).min(cb + b + xr) - (ca - a).max(cb - b + xr)).max(0.0);
                x.push(xr);
                w.push(wr * overlap / (2.0 * b));
            }
        }
        axes.push((x, w));
    }
    tensor_sum(&axes, |r| {
        state
            .relative_density(r)
            .ok_or_else(|| Error::Unnormalizable("state does not expose its relative density".into()))
    })
}

/// Probability that Alice is found in her box, Bob anywhere.
pub fn alice_probability(state: &(impl BipartiteState + ?Sized), region: &MeasurementRegion) -> Result<f64> {
    region.check(state)?;
    let z = normalization_constant(state)?;
    let extent = state
        .extent()
        .ok_or_else(|| Error::Unnormalizable(format!("{} has no finite extent", state.name())))?;
    if state.dim_b() > 2 || state.dim_a() > 2 {
        return Err(Error::Quadrature(
            "Alice-only probability is limited to two axes per party".into(),
        ));
    }
    let rule = GaussLegendre::cached(16);
    let mut axes: Axes = region
        .center
        .q_a
        .iter()
        .zip(&region.half_widths_a)
        .map(|(&c, &w)| rule.on_interval(c - w, c + w))
        .collect();
    for &c in &state.center().q_b {
        axes.push(composite(8, 32, c - extent, c + extent));
    }
    Ok(tensor_sum(&axes, |x| density(state, x))? / z)
}
