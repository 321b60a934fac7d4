//! States given as plain closures; derivatives come from finite differences.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64 as C64;

use super::{check_point, BipartiteState, ConfigPoint, Normalization};
use crate::error::{Error, Result};

type Amplitude = dyn Fn(&[f64], &[f64]) -> C64 + Send + Sync;

/// A user-supplied amplitude `psi(q_A, q_B)`.
#[derive(Clone)]
pub struct FnState {
    name: String,
    dim_a: usize,
    dim_b: usize,
    f: Arc<Amplitude>,
    length_scale: f64,
    extent: Option<f64>,
    normalized: bool,
    norm: Arc<OnceLock<f64>>,
}

impl fmt::Debug for FnState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnState")
            .field("name", &self.name)
            .field("dim_a", &self.dim_a)
            .field("dim_b", &self.dim_b)
            .field("length_scale", &self.length_scale)
            .finish()
    }
}

impl FnState {
    pub fn new<F>(name: impl Into<String>, dim_a: usize, dim_b: usize, f: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> C64 + Send + Sync + 'static,
    {
        FnState {
            name: name.into(),
            dim_a,
            dim_b,
            f: Arc::new(f),
            length_scale: 1.0,
            extent: None,
            normalized: false,
            norm: Arc::new(OnceLock::new()),
        }
    }

    /// Length over which the amplitude varies; sets the finite-difference step.
    pub fn with_length_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::param("length_scale", "must be positive"));
        }
        self.length_scale = scale;
        Ok(self)
    }

    /// Half-width of the box around the origin holding the density; enables
    /// numerical normalization and full-space quadrature.
    pub fn with_extent(mut self, extent: f64) -> Result<Self> {
        if !(extent > 0.0) {
            return Err(Error::param("extent", "must be positive"));
        }
        self.extent = Some(extent);
        Ok(self)
    }

    /// Declares the amplitude already unit-normalized.
    pub fn normalized(mut self) -> Self {
        self.normalized = true;
        self
    }
}

impl BipartiteState for FnState {
    fn dim_a(&self) -> usize {
        self.dim_a
    }
    fn dim_b(&self) -> usize {
        self.dim_b
    }
    fn name(&self) -> String {
        self.name.clone()
    }
    fn length_scale(&self) -> f64 {
        self.length_scale
    }
    fn extent(&self) -> Option<f64> {
        self.extent
    }
    fn amplitude(&self, point: &ConfigPoint) -> Result<C64> {
        check_point(self, point)?;
        let v = (self.f)(&point.q_a, &point.q_b);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain("amplitude is not finite".into()))
        }
    }
    fn normalization(&self) -> Normalization {
        match (self.normalized, self.extent) {
            (true, _) => Normalization::Unit,
            (false, Some(_)) => Normalization::Numeric,
            (false, None) => Normalization::Unnormalizable,
        }
    }
    fn norm_cache(&self) -> Option<&OnceLock<f64>> {
        Some(&self.norm)
    }
}
