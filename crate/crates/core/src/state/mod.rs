//! Bipartite continuous-variable wavefunctions.
//!
//! A state is a complex amplitude `psi(q_A, q_B)` over Alice's and Bob's
//! coordinates. Every state can report truncated Taylor expansions along
//! arbitrary directions of configuration space; the closed-form families do
//! this exactly through [`crate::taylor`], user-supplied closures fall back
//! to Richardson-extrapolated finite differences.

mod com_rel;
mod custom;
mod gaussian;
pub mod hydrogen;
mod product;

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub use com_rel::{ComPart, ComRelState, RelPart};
pub(crate) use com_rel::oscillator_1d;
pub use hydrogen::Orbital;
pub use custom::FnState;
pub use gaussian::GaussianState;
pub use product::{Mode1D, ProductState};

use crate::deriv::fd_taylor;
use crate::error::{Error, Result};
use crate::taylor::{Scalar, Shape, Taylor};

/// A point `(q_A, q_B)` in the joint configuration space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigPoint {
    pub q_a: Vec<f64>,
    pub q_b: Vec<f64>,
}

impl ConfigPoint {
    pub fn new(q_a: impl Into<Vec<f64>>, q_b: impl Into<Vec<f64>>) -> Self {
        ConfigPoint {
            q_a: q_a.into(),
            q_b: q_b.into(),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.q_a.len(), self.q_b.len())
    }

    /// Alice's coordinates followed by Bob's.
    pub fn concat(&self) -> Vec<f64> {
        let mut v = self.q_a.clone();
        v.extend_from_slice(&self.q_b);
        v
    }

    pub fn from_concat(v: &[f64], dim_a: usize) -> Self {
        ConfigPoint::new(v[..dim_a].to_vec(), v[dim_a..].to_vec())
    }

    /// `self + sum_k t_k d_k` for directions over the concatenated coordinates.
    pub fn displaced(&self, dirs: &[Vec<f64>], t: &[f64]) -> Self {
        let mut v = self.concat();
        for (d, &tk) in dirs.iter().zip(t) {
            for (x, dx) in v.iter_mut().zip(d) {
                *x += tk * dx;
            }
        }
        ConfigPoint::from_concat(&v, self.q_a.len())
    }
}

/// Orders of differentiation along each of Alice's and Bob's coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex {
    pub order_a: Vec<u8>,
    pub order_b: Vec<u8>,
}

impl MultiIndex {
    pub fn new(order_a: impl Into<Vec<u8>>, order_b: impl Into<Vec<u8>>) -> Self {
        MultiIndex {
            order_a: order_a.into(),
            order_b: order_b.into(),
        }
    }

    pub fn total(&self) -> usize {
        self.order_a
            .iter()
            .chain(&self.order_b)
            .map(|&o| o as usize)
            .sum()
    }

    pub fn concat(&self) -> Vec<u8> {
        let mut v = self.order_a.clone();
        v.extend_from_slice(&self.order_b);
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    Alice,
    Bob,
}

/// How the probability density of a state is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `int |psi|^2 = 1` analytically.
    Unit,
    /// Plane-wave centre of mass: only the relative density is normalized.
    RelativeOnly,
    /// Normalize numerically over the state's extent.
    Numeric,
    Unnormalizable,
}

pub trait BipartiteState: Send + Sync + fmt::Debug {
    fn dim_a(&self) -> usize;
    fn dim_b(&self) -> usize;

    fn name(&self) -> String;

    /// Smallest length over which the amplitude varies appreciably.
    fn length_scale(&self) -> f64 {
        1.0
    }

    /// Centre of the region carrying the probability.
    fn center(&self) -> ConfigPoint {
        ConfigPoint::new(vec![0.0; self.dim_a()], vec![0.0; self.dim_b()])
    }

    /// Half-width around [`BipartiteState::center`] outside which the
    /// density is negligible, when one exists.
    fn extent(&self) -> Option<f64> {
        None
    }

    fn amplitude(&self, point: &ConfigPoint) -> Result<C64>;

    /// Truncated Taylor expansion of `t -> psi(point + sum_k t_k dirs[k])`,
    /// degree in `t_k` capped by `caps[k]`. Directions run over Alice's
    /// coordinates followed by Bob's.
    fn taylor(&self, point: &ConfigPoint, dirs: &[Vec<f64>], caps: &[u8]) -> Result<Taylor> {
        fd_taylor(self, point, dirs, caps)
    }

    /// Whether [`BipartiteState::taylor`] is exact rather than a finite-difference estimate.
    fn exact_derivatives(&self) -> bool {
        false
    }

    fn normalization(&self) -> Normalization {
        Normalization::Numeric
    }

    /// `|phi(r)|^2` of the relative wavefunction for plane-wave centre-of-mass states.
    fn relative_density(&self, _r: &[f64]) -> Option<f64> {
        None
    }

    /// Closed-form partials `rho^A_{n1 n2}` (`n1, n2 <= 2`) of Alice's reduced
    /// density matrix along one axis, when available.
    fn alice_marginal(&self, _q_a: &[f64], _axis: usize) -> Option<Result<[[C64; 3]; 3]>> {
        None
    }

    /// Cache slot for a numerically computed norm.
    fn norm_cache(&self) -> Option<&OnceLock<f64>> {
        None
    }
}

/// Shared handle to a state.
pub type StateRef = Arc<dyn BipartiteState>;

fn check_point(state: &(impl BipartiteState + ?Sized), point: &ConfigPoint) -> Result<()> {
    if point.q_a.len() != state.dim_a() {
        return Err(Error::DimensionMismatch {
            expected: state.dim_a(),
            got: point.q_a.len(),
            context: "Alice coordinates",
        });
    }
    if point.q_b.len() != state.dim_b() {
        return Err(Error::DimensionMismatch {
            expected: state.dim_b(),
            got: point.q_b.len(),
            context: "Bob coordinates",
        });
    }
    if point.concat().iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("non-finite coordinate".into()));
    }
    Ok(())
}

/// Amplitude at a point, with dimension checks.
pub fn evaluate(state: &(impl BipartiteState + ?Sized), point: &ConfigPoint) -> Result<C64> {
    check_point(state, point)?;
    state.amplitude(point)
}

/// Mixed partial derivative of the amplitude.
pub fn derivative(
    state: &(impl BipartiteState + ?Sized),
    point: &ConfigPoint,
    idx: &MultiIndex,
) -> Result<C64> {
    check_point(state, point)?;
    if idx.order_a.len() != state.dim_a() || idx.order_b.len() != state.dim_b() {
        return Err(Error::DimensionMismatch {
            expected: state.dim_a() + state.dim_b(),
            got: idx.order_a.len() + idx.order_b.len(),
            context: "multi-index",
        });
    }
    let orders = idx.concat();
    let n = orders.len();
    let mut dirs = Vec::new();
    let mut caps = Vec::new();
    for (k, &o) in orders.iter().enumerate() {
        if o > 0 {
            let mut d = vec![0.0; n];
            d[k] = 1.0;
            dirs.push(d);
            caps.push(o);
        }
    }
    if dirs.is_empty() {
        return state.amplitude(point);
    }
    let jet = state.taylor(point, &dirs, &caps)?;
    Ok(jet.derivative(&caps))
}

/// Validates a Taylor request against the state's dimensions.
pub(crate) fn check_request(
    state: &(impl BipartiteState + ?Sized),
    point: &ConfigPoint,
    dirs: &[Vec<f64>],
    caps: &[u8],
) -> Result<()> {
    check_point(state, point)?;
    let n = state.dim_a() + state.dim_b();
    if dirs.len() != caps.len() {
        return Err(Error::DimensionMismatch {
            expected: dirs.len(),
            got: caps.len(),
            context: "degree caps",
        });
    }
    for d in dirs {
        if d.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: d.len(),
                context: "direction vector",
            });
        }
    }
    Ok(())
}

/// A family whose amplitude is a closed-form expression, so it can be
/// evaluated on Taylor jets.
pub trait Analytic {
    fn eval<T: Scalar>(&self, q_a: &[T], q_b: &[T]) -> Result<T>;
}

pub(crate) fn analytic_amplitude<S: Analytic>(s: &S, point: &ConfigPoint) -> Result<C64> {
    let qa: Vec<C64> = point.q_a.iter().map(|&x| C64::new(x, 0.0)).collect();
    let qb: Vec<C64> = point.q_b.iter().map(|&x| C64::new(x, 0.0)).collect();
    s.eval(&qa, &qb)
}

pub(crate) fn analytic_taylor<S: Analytic + BipartiteState>(
    s: &S,
    point: &ConfigPoint,
    dirs: &[Vec<f64>],
    caps: &[u8],
) -> Result<Taylor> {
    check_request(s, point, dirs, caps)?;
    let shape = Shape::new(caps);
    let coords = point.concat();
    let vars: Vec<Taylor> = coords
        .iter()
        .enumerate()
        .map(|(m, &x)| {
            let slopes: Vec<f64> = dirs.iter().map(|d| d[m]).collect();
            Taylor::affine(&shape, C64::new(x, 0.0), &slopes)
        })
        .collect();
    let (qa, qb) = vars.split_at(point.q_a.len());
    s.eval(qa, qb)
}

/// The same state with the roles of Alice and Bob exchanged.
#[derive(Debug, Clone)]
pub struct SwappedParties {
    inner: StateRef,
}

impl SwappedParties {
    pub fn new(inner: StateRef) -> Self {
        SwappedParties { inner }
    }

    fn swap_vec(&self, v: &[f64]) -> Vec<f64> {
        // v is in swapped layout (inner Bob first); reorder to inner layout
        let db = self.inner.dim_b();
        let mut out = v[db..].to_vec();
        out.extend_from_slice(&v[..db]);
        out
    }
}

impl BipartiteState for SwappedParties {
    fn dim_a(&self) -> usize {
        self.inner.dim_b()
    }
    fn dim_b(&self) -> usize {
        self.inner.dim_a()
    }
    fn name(&self) -> String {
        format!("swapped({})", self.inner.name())
    }
    fn length_scale(&self) -> f64 {
        self.inner.length_scale()
    }
    fn center(&self) -> ConfigPoint {
        let c = self.inner.center();
        ConfigPoint::new(c.q_b, c.q_a)
    }
    fn extent(&self) -> Option<f64> {
        self.inner.extent()
    }
    fn amplitude(&self, point: &ConfigPoint) -> Result<C64> {
        self.inner
            .amplitude(&ConfigPoint::new(point.q_b.clone(), point.q_a.clone()))
    }
    fn taylor(&self, point: &ConfigPoint, dirs: &[Vec<f64>], caps: &[u8]) -> Result<Taylor> {
        check_request(self, point, dirs, caps)?;
        let p = ConfigPoint::new(point.q_b.clone(), point.q_a.clone());
        let d: Vec<Vec<f64>> = dirs.iter().map(|d| self.swap_vec(d)).collect();
        self.inner.taylor(&p, &d, caps)
    }
    fn exact_derivatives(&self) -> bool {
        self.inner.exact_derivatives()
    }
    fn normalization(&self) -> Normalization {
        self.inner.normalization()
    }
    fn relative_density(&self, r: &[f64]) -> Option<f64> {
        let neg: Vec<f64> = r.iter().map(|x| -x).collect();
        self.inner.relative_density(&neg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_rejects_wrong_dimensions() {
        let s = ComRelState::coupled_oscillator_from_lengths(0, 0, 1.0, 1.0, 4.0, 2.0).unwrap();
        let p = ConfigPoint::new(vec![0.0, 1.0], vec![0.0]);
        assert!(matches!(
            evaluate(&s, &p),
            Err(Error::DimensionMismatch { .. })
        ));
        let ok = ConfigPoint::new(vec![0.0], vec![0.0]);
        let idx = MultiIndex::new(vec![1, 0], vec![0]);
        assert!(derivative(&s, &ok, &idx).is_err());
    }

    #[test]
    fn swapped_state_exchanges_coordinates() {
        let s: StateRef =
            Arc::new(ComRelState::coupled_oscillator_from_lengths(1, 2, 1.0, 2.0, 4.0, 2.0).unwrap());
        let w = SwappedParties::new(s.clone());
        let p = ConfigPoint::new(vec![0.3], vec![-1.1]);
        let q = ConfigPoint::new(vec![-1.1], vec![0.3]);
        assert_eq!(s.amplitude(&p).unwrap(), w.amplitude(&q).unwrap());
        let d1 = derivative(s.as_ref(), &p, &MultiIndex::new(vec![2], vec![1])).unwrap();
        let d2 = derivative(&w, &q, &MultiIndex::new(vec![1], vec![2])).unwrap();
        assert!((d1 - d2).norm() < 1e-14);
    }
}
