//! Other coordinate systems for the same entanglement: local orthogonal
//! changes of axes, separable (normal-mode) coordinates, the centre-of-mass
//! and relative split, and spherical coordinates.
//!
//! Measurement boxes always refer to the original particle coordinates
//! except for local transforms, which carry their own widths.

mod spherical;

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub use spherical::{spherical_cartesian_jet, spherical_gradient, to_spherical, CartesianJet, POLE_TOLERANCE};

use crate::entanglement::{epsilon_joint, MeasurementRegion};
use crate::error::{Error, Result};
use crate::state::{
    analytic_amplitude, analytic_taylor, Analytic, BipartiteState, ComPart, ComRelState, ConfigPoint,
    Normalization, Party,
};
use crate::taylor::{Scalar, Shape, Taylor};

/// Largest tolerated deviation of `O O^T` from the identity.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-12;

fn orthogonality_deviation(o: &[Vec<f64>]) -> f64 {
    let n = o.len();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let dot: f64 = (0..n).map(|k| o[i][k] * o[j][k]).sum();
            dev = dev.max((dot - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    dev
}

/// `Q_i / A_i = sum_j O_ij q_j / a_j` on one party's coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalTransform {
    pub party: Party,
    pub matrix: Vec<Vec<f64>>,
    pub old_widths: Vec<f64>,
    pub new_widths: Vec<f64>,
}

impl LocalTransform {
    pub fn new(party: Party, matrix: Vec<Vec<f64>>, old_widths: Vec<f64>, new_widths: Vec<f64>) -> Result<Self> {
        let n = matrix.len();
        if matrix.iter().any(|r| r.len() != n) || old_widths.len() != n || new_widths.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: old_widths.len().min(new_widths.len()),
                context: "local transform",
            });
        }
        if old_widths.iter().chain(&new_widths).any(|&w| !(w > 0.0)) {
            return Err(Error::param("widths", "must be positive"));
        }
        let deviation = orthogonality_deviation(&matrix);
        if !(deviation <= ORTHOGONALITY_TOLERANCE) {
            return Err(Error::NotOrthogonal { deviation });
        }
        Ok(LocalTransform {
            party,
            matrix,
            old_widths,
            new_widths,
        })
    }

    /// Plain rotation of a hypercube of half-width `width`.
    pub fn rotation(party: Party, matrix: Vec<Vec<f64>>, width: f64) -> Result<Self> {
        let n = matrix.len();
        LocalTransform::new(party, matrix, vec![width; n], vec![width; n])
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    /// New coordinates `Q` of old coordinates `q`.
    pub fn to_new(&self, q: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|i| {
                self.new_widths[i]
                    * (0..self.dim())
                        .map(|j| self.matrix[i][j] * q[j] / self.old_widths[j])
                        .sum::<f64>()
            })
            .collect()
    }

    /// Old coordinates `q` of new coordinates `Q`.
    pub fn to_old(&self, q_new: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|j| {
                self.old_widths[j]
                    * (0..self.dim())
                        .map(|i| self.matrix[i][j] * q_new[i] / self.new_widths[i])
                        .sum::<f64>()
            })
            .collect()
    }

    fn offset(&self, dim_a: usize) -> usize {
        match self.party {
            Party::Alice => 0,
            Party::Bob => dim_a,
        }
    }

    fn check_dims(&self, state: &(impl BipartiteState + ?Sized)) -> Result<()> {
        let want = match self.party {
            Party::Alice => state.dim_a(),
            Party::Bob => state.dim_b(),
        };
        if want != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: want,
                got: self.dim(),
                context: "local transform",
            });
        }
        Ok(())
    }
}

/// A state expressed in the transformed coordinates of one party.
#[derive(Debug, Clone)]
pub struct PulledBack<'a, S: ?Sized> {
    inner: &'a S,
    transform: LocalTransform,
}

impl<'a, S: BipartiteState + ?Sized> PulledBack<'a, S> {
    pub fn new(inner: &'a S, transform: LocalTransform) -> Result<Self> {
        transform.check_dims(inner)?;
        Ok(PulledBack { inner, transform })
    }

    fn old_point(&self, p: &ConfigPoint) -> ConfigPoint {
        match self.transform.party {
            Party::Alice => ConfigPoint::new(self.transform.to_old(&p.q_a), p.q_b.clone()),
            Party::Bob => ConfigPoint::new(p.q_a.clone(), self.transform.to_old(&p.q_b)),
        }
    }

    fn new_point(&self, p: &ConfigPoint) -> ConfigPoint {
        match self.transform.party {
            Party::Alice => ConfigPoint::new(self.transform.to_new(&p.q_a), p.q_b.clone()),
            Party::Bob => ConfigPoint::new(p.q_a.clone(), self.transform.to_new(&p.q_b)),
        }
    }
}

impl<S: BipartiteState + ?Sized> BipartiteState for PulledBack<'_, S> {
    fn dim_a(&self) -> usize {
        self.inner.dim_a()
    }
    fn dim_b(&self) -> usize {
        self.inner.dim_b()
    }
    fn name(&self) -> String {
        format!("{} (local transform)", self.inner.name())
    }
    fn length_scale(&self) -> f64 {
        let t = &self.transform;
        let ratio = t
            .new_widths
            .iter()
            .zip(&t.old_widths)
            .map(|(n, o)| n / o)
            .fold(f64::INFINITY, f64::min);
        self.inner.length_scale() * ratio
    }
    fn center(&self) -> ConfigPoint {
        self.new_point(&self.inner.center())
    }
    fn amplitude(&self, point: &ConfigPoint) -> Result<C64> {
        self.inner.amplitude(&self.old_point(point))
    }
    fn taylor(&self, point: &ConfigPoint, dirs: &[Vec<f64>], caps: &[u8]) -> Result<Taylor> {
        let off = self.transform.offset(self.inner.dim_a());
        let n = self.transform.dim();
        let mapped: Vec<Vec<f64>> = dirs
            .iter()
            .map(|d| {
                let mut out = d.clone();
                let old = self.transform.to_old(&d[off..off + n]);
                out[off..off + n].copy_from_slice(&old);
                out
            })
            .collect();
        self.inner.taylor(&self.old_point(point), &mapped, caps)
    }
    fn exact_derivatives(&self) -> bool {
        self.inner.exact_derivatives()
    }
    fn normalization(&self) -> Normalization {
        Normalization::Unnormalizable
    }
}

/// `eps` evaluated in the transformed coordinates with the new widths.
/// The region's widths for the transformed party must equal `old_widths`.
pub fn orthogonal_pullback_epsilon(
    state: &(impl BipartiteState + ?Sized),
    region: &MeasurementRegion,
    transform: &LocalTransform,
) -> Result<f64> {
    let pulled = PulledBack::new(state, transform.clone())?;
    let widths = match transform.party {
        Party::Alice => &region.half_widths_a,
        Party::Bob => &region.half_widths_b,
    };
    if widths
        .iter()
        .zip(&transform.old_widths)
        .any(|(w, o)| (w - o).abs() > 1e-12 * o)
    {
        return Err(Error::param("old_widths", "must match the region's widths"));
    }
    let center = pulled.new_point(&region.center);
    let r = match transform.party {
        Party::Alice => MeasurementRegion::new(center, transform.new_widths.clone(), region.half_widths_b.clone())?,
        Party::Bob => MeasurementRegion::new(center, region.half_widths_a.clone(), transform.new_widths.clone())?,
    };
    epsilon_joint(&pulled, &r)
}

/// One factor `psi_k(X_k)` of a separable state.
#[derive(Clone)]
pub enum SeparableFactor {
    /// Oscillator eigenfunction with `n` quanta and width `width` in `X_k`.
    Oscillator { n: u32, width: f64 },
    /// Only `d^2 S_k / dX_k^2` is known, with `S_k = -ln psi_k`.
    LogCurvature(Arc<dyn Fn(f64) -> Result<C64> + Send + Sync>),
}

impl fmt::Debug for SeparableFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeparableFactor::Oscillator { n, width } => f
                .debug_struct("Oscillator")
                .field("n", n)
                .field("width", width)
                .finish(),
            SeparableFactor::LogCurvature(_) => f.write_str("LogCurvature(..)"),
        }
    }
}

impl SeparableFactor {
    fn eval<T: Scalar>(&self, x: &T) -> Result<T> {
        match self {
            SeparableFactor::Oscillator { n, width } => {
                Ok(crate::state::oscillator_1d(*n, *width, x))
            }
            SeparableFactor::LogCurvature(_) => Err(Error::param(
                "factor",
                "only the log-curvature is known; the amplitude is unavailable",
            )),
        }
    }

    /// `d^2 S_k / dX_k^2` at `x`.
    pub fn log_curvature(&self, x: f64) -> Result<C64> {
        match self {
            SeparableFactor::LogCurvature(f) => f(x),
            _ => {
                let shape = Shape::new(&[2]);
                let t = self.eval(&Taylor::affine(&shape, C64::new(x, 0.0), &[1.0]))?;
                let (p0, p1, p2) = (t.derivative(&[0]), t.derivative(&[1]), t.derivative(&[2]));
                if p0.norm() == 0.0 {
                    return Err(Error::NodeCutoff);
                }
                Ok((p1 * p1 - p0 * p2) / (p0 * p0))
            }
        }
    }
}

/// `psi = prod_k psi_k(X_k)` with `X_k = sum_i T_ik x_i` over all coordinates
/// (Alice's first, then Bob's).
#[derive(Debug, Clone)]
pub struct SeparableSystem {
    dim_a: usize,
    dim_b: usize,
    mixing: DMatrix<f64>,
    factors: Vec<SeparableFactor>,
    norm: f64,
}

impl SeparableSystem {
    pub fn new(dim_a: usize, dim_b: usize, mixing: DMatrix<f64>, factors: Vec<SeparableFactor>) -> Result<Self> {
        let n = dim_a + dim_b;
        if mixing.nrows() != n || mixing.ncols() != n || factors.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: factors.len(),
                context: "separable system",
            });
        }
        let det = mixing.determinant();
        if !(det.abs() > 0.0) {
            return Err(Error::param("T", "mixing matrix is singular"));
        }
        Ok(SeparableSystem {
            dim_a,
            dim_b,
            mixing,
            factors,
            norm: det.abs().sqrt(),
        })
    }

    pub fn mixing(&self) -> &DMatrix<f64> {
        &self.mixing
    }

    pub fn factors(&self) -> &[SeparableFactor] {
        &self.factors
    }

    /// Mode coordinates `X` of a configuration point.
    pub fn modes(&self, point: &ConfigPoint) -> Vec<f64> {
        let x = point.concat();
        (0..x.len())
            .map(|k| (0..x.len()).map(|i| self.mixing[(i, k)] * x[i]).sum())
            .collect()
    }
}

impl Analytic for SeparableSystem {
    fn eval<T: Scalar>(&self, q_a: &[T], q_b: &[T]) -> Result<T> {
        let x: Vec<&T> = q_a.iter().chain(q_b).collect();
        let mut out = x[0].lift(C64::new(self.norm, 0.0));
        for (k, f) in self.factors.iter().enumerate() {
            let mut xk = x[0].zero_like();
            for (i, xi) in x.iter().enumerate() {
                xk = xk + (*xi).clone() * self.mixing[(i, k)];
            }
            out = out * f.eval(&xk)?;
        }
        Ok(out)
    }
}

impl BipartiteState for SeparableSystem {
    fn dim_a(&self) -> usize {
        self.dim_a
    }
    fn dim_b(&self) -> usize {
        self.dim_b
    }
    fn name(&self) -> String {
        format!("separable({}+{})", self.dim_a, self.dim_b)
    }
    fn length_scale(&self) -> f64 {
        let tmax = self.mixing.amax();
        self.factors
            .iter()
            .map(|f| match f {
                SeparableFactor::Oscillator { n, width } => width / (2.0 * f64::from(*n) + 1.0).sqrt(),
                SeparableFactor::LogCurvature(_) => 1.0,
            })
            .fold(f64::INFINITY, f64::min)
            / tmax
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
        if self.factors.iter().all(|f| matches!(f, SeparableFactor::Oscillator { .. })) {
            Normalization::Unit
        } else {
            Normalization::Unnormalizable
        }
    }
}

/// `eps = sum_ij (a_i b_j)^2 / 9 |sum_k T_ik T_jk S_k''(X_k)|^2`.
pub fn separable_epsilon(sys: &SeparableSystem, region: &MeasurementRegion) -> Result<f64> {
    region.check(sys)?;
    let x = sys.modes(&region.center);
    let curv: Vec<C64> = sys
        .factors
        .iter()
        .zip(&x)
        .map(|(f, &xk)| f.log_curvature(xk))
        .collect::<Result<_>>()?;
    let mut eps = 0.0;
    for (i, a) in region.half_widths_a.iter().enumerate() {
        for (j, b) in region.half_widths_b.iter().enumerate() {
            let jj = sys.dim_a + j;
            let s: C64 = curv
                .iter()
                .enumerate()
                .map(|(k, c)| c * (sys.mixing[(i, k)] * sys.mixing[(jj, k)]))
                .sum();
            eps += (a * b).powi(2) / 9.0 * s.norm_sqr();
        }
    }
    Ok(eps)
}

/// Normal modes of `V = x^T H x / 2` with masses `m_i`: `T_ik = sqrt(m_i) O_ik`,
/// each mode an oscillator of width `sqrt(hbar / omega_k)` in `X_k`.
pub fn harmonic_normal_modes(
    dim_a: usize,
    masses: &[f64],
    hessian: &[Vec<f64>],
    quanta: &[u32],
    hbar: f64,
) -> Result<SeparableSystem> {
    let n = masses.len();
    if hessian.len() != n || hessian.iter().any(|r| r.len() != n) || quanta.len() != n || dim_a >= n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: hessian.len(),
            context: "normal modes",
        });
    }
    if masses.iter().any(|&m| !(m > 0.0)) || !(hbar > 0.0) {
        return Err(Error::param("masses", "masses and hbar must be positive"));
    }
    let weighted = DMatrix::from_fn(n, n, |i, j| hessian[i][j] / (masses[i] * masses[j]).sqrt());
    if (&weighted - weighted.transpose()).amax() > 1e-12 * weighted.amax() {
        return Err(Error::param("hessian", "must be symmetric"));
    }
    let eig = weighted.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&w2| !(w2 > 0.0)) {
        return Err(Error::param("hessian", "must be positive definite"));
    }
    let mixing = DMatrix::from_fn(n, n, |i, k| masses[i].sqrt() * eig.eigenvectors[(i, k)]);
    let factors = eig
        .eigenvalues
        .iter()
        .zip(quanta)
        .map(|(&w2, &q)| SeparableFactor::Oscillator {
            n: q,
            width: (hbar / w2.sqrt()).sqrt(),
        })
        .collect();
    SeparableSystem::new(dim_a, n - dim_a, mixing, factors)
}

/// `-d^2 ln f / dx_i dx_j` for a function given on Taylor variables.
fn log_hessian<F>(x: &[f64], f: F) -> Result<Vec<Vec<C64>>>
where
    F: Fn(&[Taylor]) -> Result<Taylor>,
{
    let n = x.len();
    let shape = Shape::new(&[1, 1]);
    let mut out = vec![vec![C64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in i..n {
            let vars: Vec<Taylor> = (0..n)
                .map(|m| {
                    let s = [f64::from(u8::from(m == i)), f64::from(u8::from(m == j))];
                    Taylor::affine(&shape, C64::new(x[m], 0.0), &s)
                })
                .collect();
            let t = f(&vars)?;
            let (p, pi, pj, pij) = (
                t.derivative(&[0, 0]),
                t.derivative(&[1, 0]),
                t.derivative(&[0, 1]),
                t.derivative(&[1, 1]),
            );
            if p.norm() == 0.0 {
                return Err(Error::NodeCutoff);
            }
            let s = -(p * pij - pi * pj) / (p * p);
            out[i][j] = s;
            out[j][i] = s;
        }
    }
    Ok(out)
}

/// Per pair `(d^2 S_phi / dr_i dr_j, -(mu^2 / m_A m_B) d^2 S_chi / dR_i dR_j)`.
pub fn com_rel_pair_terms(state: &ComRelState, region: &MeasurementRegion) -> Result<Vec<Vec<(C64, C64)>>> {
    region.check(state)?;
    let (com, rel) = state.split(&region.center.q_a, &region.center.q_b);
    let s_rel = log_hessian(&rel, |r| state.rel.eval(r, true))?;
    let s_com = log_hessian(&com, |c| Ok(state.com.eval(c)))?;
    let mu = state.reduced_mass();
    let k = mu * mu / (state.mass_a * state.mass_b);
    Ok((0..state.dim())
        .map(|i| (0..state.dim()).map(|j| (s_rel[i][j], -s_com[i][j] * k)).collect())
        .collect())
}

/// `eps` from the separated centre-of-mass and relative log-curvatures.
pub fn com_rel_epsilon(state: &ComRelState, region: &MeasurementRegion) -> Result<f64> {
    region.require_joint()?;
    let terms = com_rel_pair_terms(state, region)?;
    Ok(sum_pairs(region, |i, j| {
        let (r, c) = terms[i][j];
        (r + c).norm_sqr()
    }))
}

fn sum_pairs(region: &MeasurementRegion, f: impl Fn(usize, usize) -> f64) -> f64 {
    let mut eps = 0.0;
    for (i, a) in region.half_widths_a.iter().enumerate() {
        for (j, b) in region.half_widths_b.iter().enumerate() {
            eps += (a * b).powi(2) / 9.0 * f(i, j);
        }
    }
    eps
}

/// `eps` from derivatives of `psi(R, r)` without assuming it separates:
/// `d/dq_A = (mu/m_B) d/dR + d/dr` and `d/dq_B = (mu/m_A) d/dR - d/dr`.
pub fn com_rel_epsilon_general(state: &ComRelState, region: &MeasurementRegion) -> Result<f64> {
    region.check(state)?;
    region.require_joint()?;
    let d = state.dim();
    let mu = state.reduced_mass();
    let (com, rel) = state.split(&region.center.q_a, &region.center.q_b);
    let mut vals = vec![vec![0.0; d]; d];
    for (i, row) in vals.iter_mut().enumerate() {
        for (j, out) in row.iter_mut().enumerate() {
            let mut da = vec![0.0; 2 * d];
            da[i] = mu / state.mass_b;
            da[d + i] = 1.0;
            let mut db = vec![0.0; 2 * d];
            db[j] = mu / state.mass_a;
            db[d + j] = -1.0;
            let t = state.taylor_com_rel(&com, &rel, &[da, db], &[1, 1])?;
            let (p, pa, pb, pab) = (
                t.derivative(&[0, 0]),
                t.derivative(&[1, 0]),
                t.derivative(&[0, 1]),
                t.derivative(&[1, 1]),
            );
            if p.norm() == 0.0 {
                return Err(Error::NodeCutoff);
            }
            *out = (p * pab - pa * pb).norm_sqr() / p.norm_sqr().powi(2);
        }
    }
    Ok(sum_pairs(region, |i, j| vals[i][j]))
}

/// The Gaussian-packet form with the centre-of-mass term written out,
/// `|d^2 S_phi / dr_i dr_j - 2 mu^2 / (m_A m_B R0^2) delta_ij|^2`.
pub fn gaussian_packet_epsilon(state: &ComRelState, region: &MeasurementRegion) -> Result<f64> {
    let ComPart::GaussianPacket { width, .. } = &state.com else {
        return Err(Error::param("com", "needs a Gaussian centre-of-mass packet"));
    };
    region.require_joint()?;
    let terms = com_rel_pair_terms(state, region)?;
    let mu = state.reduced_mass();
    let packet = 2.0 * mu * mu / (state.mass_a * state.mass_b * width * width);
    Ok(sum_pairs(region, |i, j| {
        let delta = if i == j { packet } else { 0.0 };
        (terms[i][j].0 - delta).norm_sqr()
    }))
}
