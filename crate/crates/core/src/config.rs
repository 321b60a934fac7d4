//! JSON run configuration for the command-line front end.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::entanglement::MeasurementRegion;
use crate::error::{Error, Result};
use crate::oracle::CompareOptions;
use crate::state::{
    ComPart, ComRelState, ConfigPoint, GaussianState, Mode1D, Orbital, ProductState, StateRef,
};
use crate::transforms::harmonic_normal_modes;
use crate::wkb::{Potential, WkbProblem, WkbState};

/// Proton to electron mass ratio.
pub const PROTON_ELECTRON_MASS_RATIO: f64 = 1836.15267343;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Point,
    Map,
    Verify,
    Models,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Optional; when given it must match the subcommand.
    #[serde(default)]
    pub mode: Option<Mode>,
    pub model: ModelSpec,
    #[serde(default)]
    pub region: RegionSpec,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub verify: VerifySpec,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub units: Units,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Units {
    pub hbar: f64,
    pub bohr: f64,
}

impl Default for Units {
    fn default() -> Self {
        Units { hbar: 1.0, bohr: 1.0 }
    }
}

fn one() -> f64 {
    1.0
}

fn proton() -> f64 {
    PROTON_ELECTRON_MASS_RATIO
}

/// Built-in model families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ModelSpec {
    /// Two oscillators coupled by a spring, in a centre-of-mass/relative
    /// eigenstate. Give either `omega` (and `spring`) or both lengths.
    CoupledOscillator {
        #[serde(default)]
        n_com: u32,
        #[serde(default)]
        n_rel: u32,
        #[serde(default = "one")]
        mass_a: f64,
        #[serde(default = "one")]
        mass_b: f64,
        #[serde(default)]
        omega: Option<f64>,
        #[serde(default)]
        spring: Option<f64>,
        #[serde(default)]
        r_com: Option<f64>,
        #[serde(default)]
        r_rel: Option<f64>,
    },
    /// Hydrogen-like atom, electron as Alice.
    Hydrogen {
        n: u32,
        l: u32,
        m: i32,
        #[serde(default = "one")]
        mass_a: f64,
        #[serde(default = "proton")]
        mass_b: f64,
        #[serde(default)]
        com: Option<ComPart>,
    },
    /// `exp(-x^T A x / 2)` over Alice's axes then Bob's.
    Gaussian {
        dim_a: usize,
        dim_b: usize,
        a: Vec<Vec<f64>>,
        #[serde(default)]
        a_imag: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    /// `exp(-(alpha x^2 + 2 beta x y + gamma y^2) / 2)`.
    TwoMode { alpha: f64, beta: f64, gamma: f64 },
    Product { alice: Vec<Mode1D>, bob: Vec<Mode1D> },
    /// Eigenstate of `V = x^T H x / 2` in its normal modes.
    NormalModes {
        dim_a: usize,
        masses: Vec<f64>,
        hessian: Vec<Vec<f64>>,
        #[serde(default)]
        quanta: Option<Vec<u32>>,
    },
    /// Semiclassical relative wavefunction on a line.
    Wkb {
        potential: Potential,
        energy: f64,
        #[serde(default = "one")]
        mass: f64,
        domain: (f64, f64),
    },
}

/// A built model and the particle masses when the state has a
/// centre-of-mass/relative structure.
#[derive(Debug, Clone)]
pub struct Model {
    pub state: StateRef,
    pub masses: Option<(f64, f64)>,
}

impl ModelSpec {
    pub fn build(&self, units: &Units) -> Result<Model> {
        if !(units.hbar > 0.0) || !(units.bohr > 0.0) {
            return Err(Error::param("units", "hbar and bohr must be positive"));
        }
        Ok(match self {
            ModelSpec::CoupledOscillator {
                n_com,
                n_rel,
                mass_a,
                mass_b,
                omega,
                spring,
                r_com,
                r_rel,
            } => {
                let s = match (omega, r_com, r_rel) {
                    (Some(w), None, None) => ComRelState::coupled_oscillator(
                        *n_com,
                        *n_rel,
                        *mass_a,
                        *mass_b,
                        *w,
                        spring.unwrap_or(0.0),
                        units.hbar,
                    )?,
                    (None, Some(rc), Some(rr)) if spring.is_none() => {
                        ComRelState::coupled_oscillator_from_lengths(*n_com, *n_rel, *mass_a, *mass_b, *rc, *rr)?
                    }
                    _ => {
                        return Err(Error::param(
                            "model",
                            "give either omega (with optional spring) or both r_com and r_rel",
                        ))
                    }
                };
                Model {
                    state: Arc::new(s),
                    masses: Some((*mass_a, *mass_b)),
                }
            }
            ModelSpec::Hydrogen {
                n,
                l,
                m,
                mass_a,
                mass_b,
                com,
            } => {
                let orbital = Orbital::new(*n, *l, *m, units.bohr)?;
                let com = com.clone().unwrap_or(ComPart::PlaneWave { k0: vec![0.0; 3] });
                Model {
                    state: Arc::new(ComRelState::hydrogen(orbital, *mass_a, *mass_b, com)?),
                    masses: Some((*mass_a, *mass_b)),
                }
            }
            ModelSpec::Gaussian {
                dim_a,
                dim_b,
                a,
                a_imag,
                center,
            } => {
                let n = a.len();
                let im = a_imag.clone().unwrap_or_else(|| vec![vec![0.0; n]; n]);
                if im.len() != n || im.iter().zip(a).any(|(r, s)| r.len() != s.len()) {
                    return Err(Error::param("a_imag", "must have the shape of a"));
                }
                let matrix = a
                    .iter()
                    .zip(&im)
                    .map(|(re, im)| re.iter().zip(im).map(|(&x, &y)| C64::new(x, y)).collect())
                    .collect();
                Model {
                    state: Arc::new(GaussianState::new(*dim_a, *dim_b, matrix, None, center.clone())?),
                    masses: None,
                }
            }
            ModelSpec::TwoMode { alpha, beta, gamma } => Model {
                state: Arc::new(GaussianState::two_mode(*alpha, *beta, *gamma)?),
                masses: None,
            },
            ModelSpec::Product { alice, bob } => Model {
                state: Arc::new(ProductState::new(alice.clone(), bob.clone())?),
                masses: None,
            },
            ModelSpec::NormalModes {
                dim_a,
                masses,
                hessian,
                quanta,
            } => {
                let q = quanta.clone().unwrap_or_else(|| vec![0; masses.len()]);
                Model {
                    state: Arc::new(harmonic_normal_modes(*dim_a, masses, hessian, &q, units.hbar)?),
                    masses: None,
                }
            }
            ModelSpec::Wkb {
                potential,
                energy,
                mass,
                domain,
            } => {
                let p = WkbProblem::new(potential.clone(), *energy, *mass, units.hbar, *domain)?;
                Model {
                    state: Arc::new(WkbState::new(p)),
                    masses: None,
                }
            }
        })
    }
}

/// One width for every axis, or one per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Widths {
    Uniform(f64),
    PerAxis(Vec<f64>),
}

impl Widths {
    fn expand(&self, dim: usize) -> Vec<f64> {
        match self {
            Widths::Uniform(w) => vec![*w; dim],
            Widths::PerAxis(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegionSpec {
    /// Centre; the state's own centre when omitted.
    pub q_a: Option<Vec<f64>>,
    pub q_b: Option<Vec<f64>>,
    pub a: Widths,
    pub b: Widths,
    pub sigma: f64,
    /// Only Alice filters.
    pub alice_only: bool,
}

impl Default for RegionSpec {
    fn default() -> Self {
        RegionSpec {
            q_a: None,
            q_b: None,
            a: Widths::Uniform(0.1),
            b: Widths::Uniform(0.1),
            sigma: crate::entanglement::DEFAULT_SIGMA,
            alice_only: false,
        }
    }
}

impl RegionSpec {
    pub fn center(&self, model: &Model) -> ConfigPoint {
        let c = model.state.center();
        ConfigPoint::new(self.q_a.clone().unwrap_or(c.q_a), self.q_b.clone().unwrap_or(c.q_b))
    }

    pub fn build(&self, model: &Model, center: ConfigPoint) -> Result<MeasurementRegion> {
        if !(self.sigma > 0.0) {
            return Err(Error::param("region.sigma", "must be positive"));
        }
        let (da, db) = (model.state.dim_a(), model.state.dim_b());
        let r = if self.alice_only {
            MeasurementRegion::alice_only(center, self.a.expand(da))?
        } else {
            MeasurementRegion::new(center, self.a.expand(da), self.b.expand(db))?
        };
        r.check(&*model.state)?;
        Ok(r)
    }
}

/// Which coordinate a sweep axis moves: `q_a[i]`, `q_b[i]`, or for
/// two-particle models the relative `r[i] = q_A - q_B` or centre of mass `R[i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum AxisCoord {
    Alice(usize),
    Bob(usize),
    Relative(usize),
    CentreOfMass(usize),
}

impl FromStr for AxisCoord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("axis `{s}`: expected q_a[i], q_b[i], r[i] or R[i]"));
        let (name, rest) = s.split_once('[').ok_or_else(bad)?;
        let idx: usize = rest.strip_suffix(']').ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        match name.trim() {
            "q_a" => Ok(AxisCoord::Alice(idx)),
            "q_b" => Ok(AxisCoord::Bob(idx)),
            "r" => Ok(AxisCoord::Relative(idx)),
            "R" => Ok(AxisCoord::CentreOfMass(idx)),
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for AxisCoord {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<AxisCoord> for String {
    fn from(c: AxisCoord) -> Self {
        c.to_string()
    }
}

impl fmt::Display for AxisCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxisCoord::Alice(i) => write!(f, "q_a[{i}]"),
            AxisCoord::Bob(i) => write!(f, "q_b[{i}]"),
            AxisCoord::Relative(i) => write!(f, "r[{i}]"),
            AxisCoord::CentreOfMass(i) => write!(f, "R[{i}]"),
        }
    }
}

impl AxisCoord {
    /// Sets this coordinate of `point` to `value`, keeping the others.
    pub fn apply(&self, point: &mut ConfigPoint, value: f64, masses: Option<(f64, f64)>) -> Result<()> {
        let check = |len: usize, i: usize| {
            if i < len {
                Ok(())
            } else {
                Err(Error::Config(format!("axis {self} is out of range")))
            }
        };
        match *self {
            AxisCoord::Alice(i) => {
                check(point.q_a.len(), i)?;
                point.q_a[i] = value;
            }
            AxisCoord::Bob(i) => {
                check(point.q_b.len(), i)?;
                point.q_b[i] = value;
            }
            AxisCoord::Relative(i) | AxisCoord::CentreOfMass(i) => {
                let (ma, mb) = masses
                    .ok_or_else(|| Error::Config(format!("axis {self} needs a two-particle model")))?;
                check(point.q_a.len().min(point.q_b.len()), i)?;
                let m = ma + mb;
                let com = (ma * point.q_a[i] + mb * point.q_b[i]) / m;
                let rel = point.q_a[i] - point.q_b[i];
                let (com, rel) = if matches!(self, AxisCoord::Relative(_)) {
                    (com, value)
                } else {
                    (value, rel)
                };
                point.q_a[i] = com + mb / m * rel;
                point.q_b[i] = com - ma / m * rel;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub coord: AxisCoord,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Axis {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.count < 2 || !(self.hi > self.lo) {
            return Err(Error::Config(format!(
                "axis {}: needs count >= 2 and lo < hi",
                self.coord
            )));
        }
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        Ok((0..self.count).map(|k| self.lo + step * k as f64).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// One or two axes; the first varies slowest.
    pub axes: Vec<Axis>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifySpec {
    #[serde(flatten)]
    pub options: CompareOptions,
    /// Centres to run the ladder at; the region centre when empty.
    pub points: Vec<ConfigPoint>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            Error::Config(format!(
                "at `{path}` (line {}, column {}): {inner}",
                inner.line(),
                inner.column()
            ))
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        RunConfig::from_json(&text)
    }
}
