//! Two particles written as a centre-of-mass part times a relative part,
//! `psi(q_A, q_B) = chi(R) phi(r)` with `R = (m_A q_A + m_B q_B) / M` and
//! `r = q_A - q_B`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::hydrogen::Orbital;
use super::{analytic_amplitude, analytic_taylor, Analytic, BipartiteState, Normalization};
use crate::error::{Error, Result};
use crate::special::{factorial, hermite};
use crate::taylor::{Scalar, Taylor};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComPart {
    /// `exp(i k0 . R)`, not normalizable.
    PlaneWave { k0: Vec<f64> },
    /// `(2 / (pi w^2))^(d/4) exp(-R^2 / w^2 + i k0 . R)`.
    GaussianPacket { width: f64, k0: Vec<f64> },
    /// Product of harmonic-oscillator eigenfunctions of width `w` per axis.
    Oscillator { n: Vec<u32>, width: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RelPart {
    Oscillator { n: Vec<u32>, width: f64 },
    Hydrogen(Orbital),
}

/// Normalized one-dimensional oscillator eigenfunction of width `w`.
pub(crate) fn oscillator_1d<T: Scalar>(n: u32, width: f64, x: &T) -> T {
    let norm = 1.0 / (PI.sqrt() * 2f64.powi(n as i32) * factorial(n) * width).sqrt();
    let u = x.clone() * (1.0 / width);
    let g = (u.clone() * u.clone() * -0.5).exp();
    hermite(n, &u) * g * norm
}

impl ComPart {
    fn dim(&self) -> usize {
        match self {
            ComPart::PlaneWave { k0 } | ComPart::GaussianPacket { k0, .. } => k0.len(),
            ComPart::Oscillator { n, .. } => n.len(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ComPart::GaussianPacket { width, .. } | ComPart::Oscillator { width, .. }
                if !(*width > 0.0) =>
            {
                Err(Error::param("com.width", "must be positive"))
            }
            _ => Ok(()),
        }
    }

    pub fn eval<T: Scalar>(&self, r: &[T]) -> T {
        let one = r[0].lift(C64::new(1.0, 0.0));
        match self {
            ComPart::PlaneWave { k0 } => {
                let mut ph = r[0].zero_like();
                for (x, &k) in r.iter().zip(k0) {
                    ph = ph + x.clone() * k;
                }
                (ph * C64::new(0.0, 1.0)).exp()
            }
            ComPart::GaussianPacket { width, k0 } => {
                let d = r.len() as f64;
                let norm = (2.0 / (PI * width * width)).powf(d / 4.0);
                let mut arg = r[0].zero_like();
                for (x, &k) in r.iter().zip(k0) {
                    arg = arg + x.clone() * x.clone() * (-1.0 / (width * width))
                        + x.clone() * C64::new(0.0, k);
                }
                arg.exp() * norm
            }
            ComPart::Oscillator { n, width } => r
                .iter()
                .zip(n)
                .fold(one, |acc, (x, &nk)| acc * oscillator_1d(nk, *width, x)),
        }
    }

    fn scale(&self) -> f64 {
        match self {
            ComPart::PlaneWave { .. } => f64::INFINITY,
            ComPart::GaussianPacket { width, .. } => *width,
            ComPart::Oscillator { n, width } => {
                width * (2.0 * f64::from(*n.iter().max().unwrap_or(&0)) + 1.0).sqrt()
            }
        }
    }
}

impl RelPart {
    fn dim(&self) -> usize {
        match self {
            RelPart::Oscillator { n, .. } => n.len(),
            RelPart::Hydrogen(_) => 3,
        }
    }

    pub fn eval<T: Scalar>(&self, r: &[T], check: bool) -> Result<T> {
        match self {
            RelPart::Oscillator { n, width } => {
                let one = r[0].lift(C64::new(1.0, 0.0));
                Ok(r
                    .iter()
                    .zip(n)
                    .fold(one, |acc, (x, &nk)| acc * oscillator_1d(nk, *width, x)))
            }
            RelPart::Hydrogen(o) => o.cartesian(r, check),
        }
    }

    fn scale(&self) -> f64 {
        match self {
            RelPart::Oscillator { n, width } => {
                width * (2.0 * f64::from(*n.iter().max().unwrap_or(&0)) + 1.0).sqrt()
            }
            RelPart::Hydrogen(o) => o.size(),
        }
    }

    /// Smallest length over which the relative part varies.
    fn feature(&self) -> f64 {
        match self {
            RelPart::Oscillator { n, width } => {
                width / (2.0 * f64::from(*n.iter().max().unwrap_or(&0)) + 1.0).sqrt()
            }
            RelPart::Hydrogen(o) => o.bohr,
        }
    }
}

/// `chi(R) phi(r)` for two particles of masses `m_A`, `m_B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComRelState {
    pub mass_a: f64,
    pub mass_b: f64,
    pub com: ComPart,
    pub rel: RelPart,
}

impl ComRelState {
    pub fn new(mass_a: f64, mass_b: f64, com: ComPart, rel: RelPart) -> Result<Self> {
        if !(mass_a > 0.0) || !(mass_b > 0.0) {
            return Err(Error::param("masses", "must be positive"));
        }
        if com.dim() != rel.dim() {
            return Err(Error::DimensionMismatch {
                expected: rel.dim(),
                got: com.dim(),
                context: "centre-of-mass part",
            });
        }
        if let RelPart::Oscillator { width, .. } = &rel {
            if !(*width > 0.0) {
                return Err(Error::param("rel.width", "must be positive"));
            }
        }
        com.validate()?;
        Ok(ComRelState {
            mass_a,
            mass_b,
            com,
            rel,
        })
    }

    /// Coupled oscillators `V = m_A w^2 q_A^2 / 2 + m_B w^2 q_B^2 / 2 + K (q_A - q_B)^2 / 2`
    /// in the eigenstate with `n_R` quanta in the centre of mass and `n_r` in
    /// the relative coordinate.
    pub fn coupled_oscillator(
        n_com: u32,
        n_rel: u32,
        mass_a: f64,
        mass_b: f64,
        omega: f64,
        spring: f64,
        hbar: f64,
    ) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(Error::param("omega", "must be positive"));
        }
        if !(spring >= 0.0) {
            return Err(Error::param("K", "must be non-negative"));
        }
        if !(hbar > 0.0) {
            return Err(Error::param("hbar", "must be positive"));
        }
        let total = mass_a + mass_b;
        let mu = mass_a * mass_b / total;
        let r_com = (hbar / (total * omega)).sqrt();
        let r_rel = (hbar / (mu * (omega * omega + spring / mu).sqrt())).sqrt();
        Self::coupled_oscillator_from_lengths(n_com, n_rel, mass_a, mass_b, r_com, r_rel)
    }

    /// Coupled oscillators specified by the two oscillator lengths.
    pub fn coupled_oscillator_from_lengths(
        n_com: u32,
        n_rel: u32,
        mass_a: f64,
        mass_b: f64,
        r_com: f64,
        r_rel: f64,
    ) -> Result<Self> {
        ComRelState::new(
            mass_a,
            mass_b,
            ComPart::Oscillator {
                n: vec![n_com],
                width: r_com,
            },
            RelPart::Oscillator {
                n: vec![n_rel],
                width: r_rel,
            },
        )
    }

    /// Hydrogen-like atom: electron as Alice, nucleus as Bob.
    pub fn hydrogen(orbital: Orbital, mass_a: f64, mass_b: f64, com: ComPart) -> Result<Self> {
        ComRelState::new(mass_a, mass_b, com, RelPart::Hydrogen(orbital))
    }

    pub fn dim(&self) -> usize {
        self.rel.dim()
    }

    pub fn total_mass(&self) -> f64 {
        self.mass_a + self.mass_b
    }

    pub fn reduced_mass(&self) -> f64 {
        self.mass_a * self.mass_b / self.total_mass()
    }

    /// `(R, r)` for a configuration point.
    pub fn split(&self, q_a: &[f64], q_b: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let m = self.total_mass();
        let com = q_a
            .iter()
            .zip(q_b)
            .map(|(a, b)| (self.mass_a * a + self.mass_b * b) / m)
            .collect();
        let rel = q_a.iter().zip(q_b).map(|(a, b)| a - b).collect();
        (com, rel)
    }

    /// Oscillator lengths `(R0, r0)` when both parts are oscillators.
    pub fn oscillator_lengths(&self) -> Option<(f64, f64)> {
        match (&self.com, &self.rel) {
            (ComPart::Oscillator { width: a, .. }, RelPart::Oscillator { width: b, .. }) => {
                Some((*a, *b))
            }
            _ => None,
        }
    }

    /// Amplitude as a function of `(R, r)` directly.
    pub fn eval_com_rel<T: Scalar>(&self, com: &[T], rel: &[T]) -> Result<T> {
        Ok(self.com.eval(com) * self.rel.eval(rel, true)?)
    }

    /// Taylor expansion in `(R, r)` along the given directions (length `2d`,
    /// centre-of-mass components first).
    pub fn taylor_com_rel(
        &self,
        com: &[f64],
        rel: &[f64],
        dirs: &[Vec<f64>],
        caps: &[u8],
    ) -> Result<Taylor> {
        let shape = crate::taylor::Shape::new(caps);
        let d = self.dim();
        let mut vars = Vec::with_capacity(2 * d);
        for (m, &x) in com.iter().chain(rel).enumerate() {
            let slopes: Vec<f64> = dirs.iter().map(|v| v[m]).collect();
            vars.push(Taylor::affine(&shape, C64::new(x, 0.0), &slopes));
        }
        let (c, r) = vars.split_at(d);
        self.eval_com_rel(c, r)
    }

    fn is_ground_oscillator(&self) -> bool {
        matches!(
            (&self.com, &self.rel),
            (ComPart::Oscillator { n: a, .. }, RelPart::Oscillator { n: b, .. })
                if a.iter().chain(b).all(|&k| k == 0)
        )
    }

    /// Quadratic form `(alpha, beta, gamma)` of `-2 ln psi` per axis for the
    /// oscillator ground state: `alpha q_A^2 + 2 beta q_A q_B + gamma q_B^2`.
    pub fn ground_quadratic_form(&self) -> Option<(f64, f64, f64)> {
        if !self.is_ground_oscillator() {
            return None;
        }
        let (rc, rr) = self.oscillator_lengths()?;
        let m = self.total_mass();
        let (ma, mb) = (self.mass_a / m, self.mass_b / m);
        let (u, v) = (1.0 / (rc * rc), 1.0 / (rr * rr));
        Some((ma * ma * u + v, ma * mb * u - v, mb * mb * u + v))
    }
}

impl Analytic for ComRelState {
    fn eval<T: Scalar>(&self, q_a: &[T], q_b: &[T]) -> Result<T> {
        let m = self.total_mass();
        let (wa, wb) = (self.mass_a / m, self.mass_b / m);
        let com: Vec<T> = q_a
            .iter()
            .zip(q_b)
            .map(|(a, b)| a.clone() * wa + b.clone() * wb)
            .collect();
        let rel: Vec<T> = q_a
            .iter()
            .zip(q_b)
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        self.eval_com_rel(&com, &rel)
    }
}

impl BipartiteState for ComRelState {
    fn dim_a(&self) -> usize {
        self.dim()
    }
    fn dim_b(&self) -> usize {
        self.dim()
    }

    fn name(&self) -> String {
        let com = match &self.com {
            ComPart::PlaneWave { .. } => "plane-wave".to_string(),
            ComPart::GaussianPacket { width, .. } => format!("packet(R0={width})"),
            ComPart::Oscillator { n, width } => format!("osc(n={n:?}, R0={width})"),
        };
        let rel = match &self.rel {
            RelPart::Oscillator { n, width } => format!("osc(n={n:?}, r0={width})"),
            RelPart::Hydrogen(o) => format!("hydrogen({},{},{})", o.n, o.l, o.m),
        };
        format!("com={com} rel={rel}")
    }

    fn length_scale(&self) -> f64 {
        let com = match &self.com {
            ComPart::PlaneWave { k0 } => {
                let k = k0.iter().map(|k| k * k).sum::<f64>().sqrt();
                if k > 0.0 {
                    1.0 / k
                } else {
                    f64::INFINITY
                }
            }
            ComPart::GaussianPacket { width, .. } => *width,
            ComPart::Oscillator { n, width } => {
                width / (2.0 * f64::from(*n.iter().max().unwrap_or(&0)) + 1.0).sqrt()
            }
        };
        com.min(self.rel.feature())
    }

    fn extent(&self) -> Option<f64> {
        let c = self.com.scale();
        c.is_finite().then(|| 8.0 * c.max(self.rel.scale()))
    }

    fn amplitude(&self, point: &super::ConfigPoint) -> Result<C64> {
        analytic_amplitude(self, point)
    }

    fn taylor(
        &self,
        point: &super::ConfigPoint,
        dirs: &[Vec<f64>],
        caps: &[u8],
    ) -> Result<Taylor> {
        analytic_taylor(self, point, dirs, caps)
    }

    fn exact_derivatives(&self) -> bool {
        true
    }

    fn normalization(&self) -> Normalization {
        match self.com {
            ComPart::PlaneWave { .. } => Normalization::RelativeOnly,
            _ => Normalization::Unit,
        }
    }

    fn relative_density(&self, r: &[f64]) -> Option<f64> {
        if !matches!(self.com, ComPart::PlaneWave { .. }) || r.len() != self.dim() {
            return None;
        }
        let v: Vec<C64> = r.iter().map(|&x| C64::new(x, 0.0)).collect();
        self.rel.eval(&v, false).ok().map(|z| z.norm_sqr())
    }

    fn alice_marginal(&self, q_a: &[f64], axis: usize) -> Option<Result<[[C64; 3]; 3]>> {
        let (alpha, beta, gamma) = self.ground_quadratic_form()?;
        if axis >= self.dim() || q_a.len() != self.dim() {
            return Some(Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: q_a.len(),
                context: "Alice marginal",
            }));
        }
        Some(Ok(gaussian_marginal_partials(alpha, beta, gamma, q_a, axis)))
    }
}

/// Partials of `rho^A(x, x')` for `psi = prod_axes exp(-(alpha x^2 + 2 beta x y + gamma y^2)/2)`
/// (up to a constant), along one axis at `x = x' = q_a[axis]`, scaled by the
/// diagonal of the other axes. Scale factors cancel in every ratio used downstream.
pub(crate) fn gaussian_marginal_partials(
    alpha: f64,
    beta: f64,
    gamma: f64,
    q_a: &[f64],
    axis: usize,
) -> [[C64; 3]; 3] {
    // rho(x, x') ~ exp(L), L = -alpha (x^2 + x'^2)/2 + beta^2 (x + x')^2 / (4 gamma)
    let c = beta * beta / (2.0 * gamma);
    let diag = |x: f64| (-alpha * x * x + c * 2.0 * x * x).exp();
    let x = q_a[axis];
    let others: f64 = q_a
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != axis)
        .map(|(_, &y)| diag(y))
        .product();
    let r00 = diag(x) * others;
    let a = -alpha * x + c * 2.0 * x;
    let b = a;
    let p = -alpha + c;
    let q = p;
    let xx = c;
    let rel = [
        [1.0, b, b * b + q],
        [a, a * b + xx, 2.0 * b * xx + (q + b * b) * a],
        [
            a * a + p,
            2.0 * a * xx + (p + a * a) * b,
            2.0 * xx * xx + 4.0 * a * b * xx + (p + a * a) * (q + b * b),
        ],
    ];
    let mut out = [[C64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = C64::new(rel[i][j] * r00, 0.0);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{derivative, evaluate, ConfigPoint, MultiIndex};

    #[test]
    fn oscillator_value_at_origin() {
        let s = ComRelState::coupled_oscillator_from_lengths(0, 0, 1.0, 1.0, 4.0, 2.0).unwrap();
        let v = evaluate(&s, &ConfigPoint::new(vec![0.0], vec![0.0])).unwrap();
        assert!((v.re - 1.0 / (8.0 * PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn oscillator_is_normalized() {
        use crate::quadrature::composite;
        let s = ComRelState::coupled_oscillator_from_lengths(1, 3, 1.0, 2.5, 3.0, 1.5).unwrap();
        let (x, w) = composite(16, 40, -30.0, 30.0);
        let mut total = 0.0;
        for (&a, &wa) in x.iter().zip(&w) {
            for (&b, &wb) in x.iter().zip(&w) {
                let v = s.amplitude(&ConfigPoint::new(vec![a], vec![b])).unwrap();
                total += wa * wb * v.norm_sqr();
            }
        }
        assert!((total - 1.0).abs() < 1e-12, "{total}");
    }

    #[test]
    fn frequencies_map_to_lengths() {
        let omega = 1.0 / 32.0;
        let big = 0.5f64;
        let spring = 0.5 * (big * big - omega * omega);
        let s = ComRelState::coupled_oscillator(0, 0, 1.0, 1.0, omega, spring, 1.0).unwrap();
        let (rc, rr) = s.oscillator_lengths().unwrap();
        assert!((rc - 4.0).abs() < 1e-14 && (rr - 2.0).abs() < 1e-14);
    }

    #[test]
    fn ground_state_mixed_derivative() {
        // psi ~ exp(-(alpha qa^2 + 2 beta qa qb + gamma qb^2)/2), d_A d_B psi / psi = alpha beta qa^2 ... at 0: -beta
        let s = ComRelState::coupled_oscillator_from_lengths(0, 0, 1.0, 3.0, 4.0, 2.0).unwrap();
        let (_, beta, _) = s.ground_quadratic_form().unwrap();
        let p = ConfigPoint::new(vec![0.0], vec![0.0]);
        let psi = evaluate(&s, &p).unwrap();
        let d = derivative(&s, &p, &MultiIndex::new(vec![1], vec![1])).unwrap();
        assert!((d / psi + beta).norm() < 1e-14);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ComRelState::coupled_oscillator(0, 0, 1.0, 1.0, -1.0, 0.0, 1.0).is_err());
        assert!(ComRelState::coupled_oscillator(0, 0, 0.0, 1.0, 1.0, 0.0, 1.0).is_err());
        assert!(ComRelState::new(
            1.0,
            1.0,
            ComPart::PlaneWave { k0: vec![0.0] },
            RelPart::Hydrogen(Orbital::ground(1.0))
        )
        .is_err());
    }
}
