//! Brute-force reduced density matrices of the filtered state.
//!
//! The filtered amplitude is sampled on Gauss–Legendre grids inside the
//! boxes as `K[x, y] = sqrt(w_x w_y) psi(x, y)`; Alice's reduced density
//! matrix is `K K^dagger / tr`, and its spectrum is the squared singular
//! values of `K`. Large sides are first projected onto tensor Legendre
//! modes of bounded total degree, which keeps the matrices small while
//! accounting exactly for the discarded weight.

mod compare;
mod probability;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use compare::{compare, log_log_slope, CompareOptions, ComparisonReport, LadderParty, Rung};
pub use probability::{
    alice_probability, normalization_constant, probability_mass, probability_mass_order,
};

use crate::entanglement::MeasurementRegion;
use crate::error::{Error, Result};
use crate::quadrature::{composite, legendre_modal_matrix, GaussLegendre};
pub use crate::state::Party;
use crate::state::{BipartiteState, ConfigPoint};

/// Eigenvalues below this are treated as rounding noise and clamped to zero.
pub const CLAMP_THRESHOLD: f64 = -1e-10;
/// Largest entropy change tolerated when the grid is halved.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-6;
/// Total Legendre degree kept per side after compression.
pub const MODAL_DEGREE: usize = 8;
/// Sides with more grid points than this are compressed.
pub const COMPRESS_ABOVE: usize = 256;

/// Discretized reduced density matrix for one party.
#[derive(Debug, Clone)]
pub struct DiscretizedRdm {
    pub party: Party,
    /// Node positions along each of the party's axes.
    pub grid: Vec<Vec<f64>>,
    /// Hermitian, unit trace (in the modal basis when compressed).
    pub matrix: DMatrix<C64>,
    /// `K / ||K||`, rows indexed by the party's grid or modes.
    pub factor: DMatrix<C64>,
    /// Trace before normalization.
    pub trace: f64,
    /// Fraction of `||K||^2` dropped by modal compression.
    pub truncation_residual: f64,
    pub nodes_per_axis: usize,
}

/// Eigenvalues in descending order and the derived monotones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSpectrum {
    pub eigenvalues: Vec<f64>,
    pub entropy: f64,
    pub concurrence: f64,
    pub negativity: f64,
}

impl OracleSpectrum {
    /// Builds the monotones from eigenvalues (any order, small negatives clamped).
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>) -> Result<Self> {
        for v in eigenvalues.iter_mut() {
            if *v < CLAMP_THRESHOLD {
                return Err(Error::NegativeEigenvalue { value: *v });
            }
            *v = v.max(0.0);
        }
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        let entropy = eigenvalues
            .iter()
            .filter(|&&l| l > 0.0)
            .map(|&l| -l * l.log2())
            .sum();
        // sum_{m<n} products through running prefix sums, smallest first
        let mut pair = 0.0;
        let mut pair_sqrt = 0.0;
        let mut prefix = 0.0;
        let mut prefix_sqrt = 0.0;
        for &l in eigenvalues.iter().rev() {
            pair += l * prefix;
            pair_sqrt += l.sqrt() * prefix_sqrt;
            prefix += l;
            prefix_sqrt += l.sqrt();
        }
        Ok(OracleSpectrum {
            eigenvalues,
            entropy,
            concurrence: (4.0 * pair).sqrt(),
            negativity: pair_sqrt,
        })
    }

    pub fn lambda(&self, k: usize) -> f64 {
        self.eigenvalues.get(k).copied().unwrap_or(0.0)
    }
}

struct SideGrid {
    grid: Vec<Vec<f64>>,
    points: Vec<Vec<f64>>,
    sqrt_w: Vec<f64>,
    /// `points x modes` projection (row-major) when compressing.
    modal: Option<(usize, Vec<f64>)>,
}

fn total_degree_modes(dims: usize, degree: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; dims];
    loop {
        if cur.iter().sum::<usize>() <= degree {
            out.push(cur.clone());
        }
        let mut k = 0;
        loop {
            if k == dims {
                return out;
            }
            cur[k] += 1;
            if cur[k] <= degree {
                break;
            }
            cur[k] = 0;
            k += 1;
        }
    }
}

fn tensor_grid(axes: &[(Vec<f64>, Vec<f64>)]) -> (Vec<Vec<f64>>, Vec<f64>, Vec<Vec<usize>>) {
    let sizes: Vec<usize> = axes.iter().map(|a| a.0.len()).collect();
    let total: usize = sizes.iter().product();
    let mut pts = Vec::with_capacity(total);
    let mut sw = Vec::with_capacity(total);
    let mut idx = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = flat;
        let mut p = Vec::with_capacity(axes.len());
        let mut w = 1.0;
        let mut id = Vec::with_capacity(axes.len());
        for (k, (x, wx)) in axes.iter().enumerate() {
            let i = rem % sizes[k];
            rem /= sizes[k];
            p.push(x[i]);
            w *= wx[i];
            id.push(i);
        }
        pts.push(p);
        sw.push(w.sqrt());
        idx.push(id);
    }
    (pts, sw, idx)
}

fn box_side(center: &[f64], widths: &[f64], n: usize, allow_compress: bool) -> SideGrid {
    let rule = GaussLegendre::cached(n);
    let axes: Vec<(Vec<f64>, Vec<f64>)> = center
        .iter()
        .zip(widths)
        .map(|(&c, &w)| rule.on_interval(c - w, c + w))
        .collect();
    let (points, sqrt_w, idx) = tensor_grid(&axes);
    let modal = (allow_compress && points.len() > COMPRESS_ABOVE).then(|| {
        let keep = (MODAL_DEGREE + 1).min(n);
        let q = legendre_modal_matrix(n, keep);
        let modes = total_degree_modes(center.len(), keep - 1);
        let mut m = vec![0.0; points.len() * modes.len()];
        for (p, id) in idx.iter().enumerate() {
            for (j, mode) in modes.iter().enumerate() {
                m[p * modes.len() + j] = id
                    .iter()
                    .zip(mode)
                    .map(|(&i, &deg)| q[i * keep + deg])
                    .product();
            }
        }
        (modes.len(), m)
    });
    SideGrid {
        grid: axes.into_iter().map(|a| a.0).collect(),
        points,
        sqrt_w,
        modal,
    }
}

/// Bob's full space for Alice-only filtering: composite rule over the extent.
fn full_side(state: &(impl BipartiteState + ?Sized), panels: usize) -> Result<SideGrid> {
    let extent = state
        .extent()
        .ok_or_else(|| Error::Quadrature("tracing over all space needs a finite extent".into()))?;
    if state.dim_b() > 2 {
        return Err(Error::Quadrature(
            "full-space trace is limited to two Bob axes".into(),
        ));
    }
    let axes: Vec<(Vec<f64>, Vec<f64>)> = state
        .center()
        .q_b
        .iter()
        .map(|&c| composite(8, panels, c - extent, c + extent))
        .collect();
    let (points, sqrt_w, _) = tensor_grid(&axes);
    Ok(SideGrid {
        grid: axes.into_iter().map(|a| a.0).collect(),
        points,
        sqrt_w,
        modal: None,
    })
}

/// Rows of `K` (Alice side) with Bob's side already projected when compressed.
fn sample(
    state: &(impl BipartiteState + ?Sized),
    alice: &SideGrid,
    bob: &SideGrid,
) -> Result<(DMatrix<C64>, f64)> {
    let ncol = bob.modal.as_ref().map_or(bob.points.len(), |m| m.0);
    let rows: Vec<(Vec<C64>, f64)> = alice
        .points
        .par_iter()
        .zip(&alice.sqrt_w)
        .map(|(xa, &wa)| -> Result<(Vec<C64>, f64)> {
            let mut raw = Vec::with_capacity(bob.points.len());
            let mut energy = 0.0;
            for (xb, &wb) in bob.points.iter().zip(&bob.sqrt_w) {
                let v = state.amplitude(&ConfigPoint::new(xa.clone(), xb.clone()))? * (wa * wb);
                energy += v.norm_sqr();
                raw.push(v);
            }
            let row = match &bob.modal {
                None => raw,
                Some((nm, m)) => {
                    let mut out = vec![C64::new(0.0, 0.0); *nm];
                    for (p, v) in raw.iter().enumerate() {
                        let mrow = &m[p * nm..(p + 1) * nm];
                        for (o, &q) in out.iter_mut().zip(mrow) {
                            *o += v * q;
                        }
                    }
                    out
                }
            };
            Ok((row, energy))
        })
        .collect::<Result<_>>()?;
    let energy: f64 = rows.iter().map(|r| r.1).sum();
    let mut k = DMatrix::from_fn(rows.len(), ncol, |i, j| rows[i].0[j]);
    if let Some((nm, m)) = &alice.modal {
        let ma = DMatrix::from_row_slice(alice.points.len(), *nm, m).map(|x| C64::new(x, 0.0));
        k = ma.transpose() * k;
    }
    Ok((k, energy))
}

fn assemble(
    state: &(impl BipartiteState + ?Sized),
    region: &MeasurementRegion,
    n: usize,
    party: Party,
) -> Result<DiscretizedRdm> {
    let alice = box_side(&region.center.q_a, &region.half_widths_a, n, true);
    let bob = if region.is_alice_only() {
        full_side(state, if state.dim_b() == 1 { 64 } else { 16 })?
    } else {
        box_side(&region.center.q_b, &region.half_widths_b, n, true)
    };
    let (k, energy) = sample(state, &alice, &bob)?;
    if !(energy > 0.0) {
        return Err(Error::NodeCutoff);
    }
    let kept = k.norm_squared();
    let truncation_residual = ((energy - kept) / energy).max(0.0);
    let factor = match party {
        Party::Alice => k / C64::new(energy.sqrt(), 0.0),
        Party::Bob => k.transpose() / C64::new(energy.sqrt(), 0.0),
    };
    let matrix = &factor * factor.adjoint();
    let grid = match party {
        Party::Alice => alice.grid,
        Party::Bob => bob.grid,
    };
    Ok(DiscretizedRdm {
        party,
        grid,
        matrix,
        factor,
        trace: energy,
        truncation_residual,
        nodes_per_axis: n,
    })
}

/// Alice's reduced density matrix of the filtered state, with `n` nodes per
/// box axis. Certified by halving the grid: the entropy may change by at
/// most [`CONVERGENCE_TOLERANCE`] bits.
pub fn build_rdm(
    state: &(impl BipartiteState + ?Sized),
    region: &MeasurementRegion,
    nodes_per_axis: usize,
) -> Result<DiscretizedRdm> {
    build_rdm_for(state, region, nodes_per_axis, Party::Alice)
}

/// [`build_rdm`] for either party.
pub fn build_rdm_for(
    state: &(impl BipartiteState + ?Sized),
    region: &MeasurementRegion,
    nodes_per_axis: usize,
    party: Party,
) -> Result<DiscretizedRdm> {
    region.check(state)?;
    if nodes_per_axis < 8 {
        return Err(Error::param("nodes_per_axis", "need at least 8 nodes"));
    }
    if state.dim_a() > 3 || state.dim_b() > 3 {
        return Err(Error::param("dims", "the oracle handles at most three axes per party"));
    }
    if party == Party::Bob && region.is_alice_only() {
        return Err(Error::param("party", "Bob's matrix needs a Bob box"));
    }
    let fine = assemble(state, region, nodes_per_axis, party)?;
    let coarse = assemble(state, region, nodes_per_axis / 2, party)?;
    let change = (spectrum(&fine)?.entropy - spectrum(&coarse)?.entropy).abs();
    if change > CONVERGENCE_TOLERANCE {
        return Err(Error::Quadrature(format!(
            "entropy changed by {change:.3e} bits when halving the grid"
        )));
    }
    Ok(fine)
}

/// Spectrum from the singular values of the sampled factor; accurate for
/// eigenvalues many orders of magnitude below the largest.
pub fn spectrum(rdm: &DiscretizedRdm) -> Result<OracleSpectrum> {
    let f = &rdm.factor;
    let sv = if f.nrows() <= f.ncols() {
        f.adjoint().singular_values()
    } else {
        f.clone().singular_values()
    };
    OracleSpectrum::from_eigenvalues(sv.iter().map(|s| s * s).collect())
}

/// Spectrum from a Hermitian eigensolve of `rdm.matrix`.
pub fn spectrum_hermitian(rdm: &DiscretizedRdm) -> Result<OracleSpectrum> {
    let m = &rdm.matrix;
    let dev = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if dev > 1e-12 {
        return Err(Error::Quadrature(format!("matrix deviates from Hermitian by {dev:.3e}")));
    }
    let eig = m.clone().symmetric_eigen();
    OracleSpectrum::from_eigenvalues(eig.eigenvalues.iter().copied().collect())
}

/// Default node count per axis for a side of `dims` axes.
pub fn default_nodes(dims: usize) -> usize {
    match dims {
        1 => 32,
        2 => 16,
        _ => 8,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{ComRelState, Mode1D, ProductState};

    #[test]
    fn two_level_spectra() {
        let s = OracleSpectrum::from_eigenvalues(vec![0.5, 0.5]).unwrap();
        assert!((s.entropy - 1.0).abs() < 1e-15);
        assert!((s.concurrence - 1.0).abs() < 1e-15);
        assert!((s.negativity - 0.5).abs() < 1e-15);
        let e: f64 = 1e-4;
        let s = OracleSpectrum::from_eigenvalues(vec![e, 1.0 - e]).unwrap();
        assert!((s.concurrence - 2.0 * (e * (1.0 - e)).sqrt()).abs() < 1e-15);
        let pure = OracleSpectrum::from_eigenvalues(vec![1.0]).unwrap();
        assert_eq!((pure.entropy, pure.concurrence, pure.negativity), (0.0, 0.0, 0.0));
        assert!(OracleSpectrum::from_eigenvalues(vec![1.0, -1e-6]).is_err());
    }

    #[test]
    fn product_is_rank_one() {
        let s = ProductState::new(
            vec![Mode1D::Gaussian { center: 0.0, width: 1.0, k: 0.4 }],
            vec![Mode1D::Gaussian { center: 0.3, width: 0.7, k: 0.0 }],
        )
        .unwrap();
        let r = MeasurementRegion::cubic(ConfigPoint::new(vec![0.2], vec![0.1]), 0.1, 0.1).unwrap();
        let sp = spectrum(&build_rdm(&s, &r, 32).unwrap()).unwrap();
        assert!((sp.lambda(0) - 1.0).abs() < 1e-14);
        assert!(sp.lambda(1) < 1e-28);
    }

    #[test]
    fn oscillator_lambda2_matches_closed_form() {
        let s = ComRelState::coupled_oscillator_from_lengths(0, 0, 1.0, 1.0, 4.0, 2.0).unwrap();
        let r = MeasurementRegion::cubic(ConfigPoint::new(vec![0.0], vec![0.0]), 0.1, 0.1).unwrap();
        let rdm = build_rdm(&s, &r, 32).unwrap();
        let sp = spectrum(&rdm).unwrap();
        let beta: f64 = 0.25 / 16.0 - 0.25;
        let eps = 1e-4 * beta * beta / 9.0;
        assert!((sp.lambda(1) / eps - 1.0).abs() < 1e-2);
        let herm = spectrum_hermitian(&rdm).unwrap();
        assert!((herm.lambda(1) / sp.lambda(1) - 1.0).abs() < 1e-6);
        let bob = spectrum(&build_rdm_for(&s, &r, 32, Party::Bob).unwrap()).unwrap();
        assert!((bob.lambda(1) / sp.lambda(1) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn modes_of_bounded_degree() {
        assert_eq!(total_degree_modes(3, 8).len(), 165);
        assert_eq!(total_degree_modes(1, 8).len(), 9);
    }
}
