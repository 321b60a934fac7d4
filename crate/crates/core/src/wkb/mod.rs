//! Semiclassical wavefunctions of a relative coordinate in a single well,
//! and the local concurrence in each of the three regions.
//!
//! Region 1 lies left of the first turning point, region 2 between the two
//! and region 3 right of the second. The centre-of-mass part is a plane wave
//! and drops out.

mod potential;

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub use potential::{CubicSpline, Potential};

use crate::entanglement::{report, MeasurementRegion, ReportOptions, Validity};
use crate::error::{Error, Result};
use crate::quadrature::integrate_adaptive;
use crate::state::{check_request, BipartiteState, ConfigPoint, Normalization};
use crate::taylor::{Scalar, Shape, Taylor};

/// Points per domain scan when bracketing turning points.
pub const SCAN_STEPS: usize = 1024;
pub const TURNING_POINT_TOLERANCE: f64 = 1e-12;
pub const ACTION_TOLERANCE: f64 = 1e-10;
/// Multiple of the Airy length excluded around each turning point.
pub const EXCLUSION_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WkbRegion {
    Region1,
    Region2,
    Region3,
}

/// Which turning point an action integral runs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    R1,
    R2,
}

#[derive(Debug, Clone, Copy)]
enum Integrand {
    Momentum,
    InverseMomentum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WkbProblem {
    pub potential: Potential,
    pub energy: f64,
    pub mass: f64,
    pub hbar: f64,
    pub domain: (f64, f64),
    turning: (f64, f64),
    norm: f64,
    nodes: u32,
}

impl WkbProblem {
    pub fn new(potential: Potential, energy: f64, mass: f64, hbar: f64, domain: (f64, f64)) -> Result<Self> {
        potential.validate()?;
        if !(mass > 0.0) || !(hbar > 0.0) || !energy.is_finite() {
            return Err(Error::param("wkb", "mass and hbar must be positive, energy finite"));
        }
        if !(domain.1 > domain.0) || !domain.0.is_finite() || !domain.1.is_finite() {
            return Err(Error::param("domain", "needs lo < hi"));
        }
        let turning = find_turning_points(&potential, energy, domain)?;
        let mut p = WkbProblem {
            potential,
            energy,
            mass,
            hbar,
            domain,
            turning,
            norm: 0.0,
            nodes: 0,
        };
        let inv = p.endpoint_integral(turning.0, turning.1, Integrand::InverseMomentum)?;
        p.norm = 1.0 / (2.0 * inv).sqrt();
        let total = p.endpoint_integral(turning.0, turning.1, Integrand::Momentum)?;
        p.nodes = ((total / hbar + FRAC_PI_4) / PI).floor() as u32;
        Ok(p)
    }

    /// Harmonic relative motion `m omega^2 r^2 / 2` at the `n`-th level.
    pub fn harmonic(mass: f64, omega: f64, hbar: f64, n: u32) -> Result<Self> {
        let energy = hbar * omega * (f64::from(n) + 0.5);
        let reach = 2.0 * (2.0 * energy / (mass * omega * omega)).sqrt();
        WkbProblem::new(Potential::harmonic(mass, omega), energy, mass, hbar, (-reach, reach))
    }

    pub fn turning_points(&self) -> (f64, f64) {
        self.turning
    }

    /// Normalization `A`, from `2 A^2 int dr / p = 1` over region 2.
    pub fn normalization(&self) -> f64 {
        self.norm
    }

    /// Nodes of the region-2 wavefunction.
    pub fn node_count(&self) -> u32 {
        self.nodes
    }

    pub fn region(&self, r: f64) -> WkbRegion {
        if r < self.turning.0 {
            WkbRegion::Region1
        } else if r <= self.turning.1 {
            WkbRegion::Region2
        } else {
            WkbRegion::Region3
        }
    }

    /// `|p(r)| = sqrt(2m |E - V(r)|)`.
    pub fn momentum(&self, r: f64) -> f64 {
        (2.0 * self.mass * (self.energy - self.potential.value(r)).abs()).sqrt()
    }

    /// `(|p|, d|p|/dr, d^2|p|/dr^2)` from `V'` and `V''`.
    pub fn momentum_derivs(&self, r: f64) -> (f64, f64, f64) {
        let (v, v1, v2) = self.potential.derivs(r);
        let m = self.mass;
        // forbidden regions use the inverted surface
        let s = if v <= self.energy { -1.0 } else { 1.0 };
        let p = (2.0 * m * (v - self.energy) * s).sqrt();
        let p1 = s * m * v1 / p;
        let p2 = (s * m * v2 - p1 * p1) / p;
        (p, p1, p2)
    }

    /// Half-width `10 (hbar^2 / (m |V'(r_t)|))^(1/3)` of the zone around a
    /// turning point where the semiclassical forms are not used.
    pub fn exclusion_width(&self, bound: Bound) -> f64 {
        let rt = self.turning_point(bound);
        let v1 = self.potential.derivs(rt).1.abs();
        EXCLUSION_FACTOR * (self.hbar * self.hbar / (self.mass * v1)).cbrt()
    }

    fn turning_point(&self, bound: Bound) -> f64 {
        match bound {
            Bound::R1 => self.turning.0,
            Bound::R2 => self.turning.1,
        }
    }

    pub fn check_outside_exclusion(&self, r: f64) -> Result<()> {
        for b in [Bound::R1, Bound::R2] {
            let d = (r - self.turning_point(b)).abs();
            if !(d > self.exclusion_width(b)) {
                return Err(Error::Domain(format!(
                    "r = {r} is within the turning-point exclusion zone around {}",
                    self.turning_point(b)
                )));
            }
        }
        Ok(())
    }

    /// `int |p| dr'` between `r` and the chosen turning point.
    pub fn action_integral(&self, r: f64, bound: Bound) -> Result<f64> {
        let rt = self.turning_point(bound);
        let other = self.turning_point(match bound {
            Bound::R1 => Bound::R2,
            Bound::R2 => Bound::R1,
        });
        if (r - rt) * (other - rt) > 0.0 && (r - rt).abs() > (other - rt).abs() {
            return Err(Error::Domain("action integral would cross the other turning point".into()));
        }
        let (lo, hi) = if r < rt { (r, rt) } else { (rt, r) };
        self.endpoint_integral(lo, hi, Integrand::Momentum)
    }

    /// `int_lo^hi` of `|p|` or `1/|p|` with `u^2` substitutions at any end
    /// that is a turning point.
    fn endpoint_integral(&self, lo: f64, hi: f64, what: Integrand) -> Result<f64> {
        if hi <= lo {
            return Ok(0.0);
        }
        let is_tp = |x: f64| x == self.turning.0 || x == self.turning.1;
        let plain = |x: f64| match what {
            Integrand::Momentum => self.momentum(x),
            Integrand::InverseMomentum => 1.0 / self.momentum(x),
        };
        let piece = |from: f64, to: f64| -> Result<f64> {
            if !is_tp(from) {
                return integrate_adaptive(plain, from.min(to), from.max(to), ACTION_TOLERANCE);
            }
            // substitution anchored at the turning point `from`
            let dir = (to - from).signum();
            let slope = (2.0 * self.mass * self.potential.derivs(from).1.abs()).sqrt();
            integrate_adaptive(
                |u| {
                    let p = self.momentum(from + dir * u * u);
                    match what {
                        Integrand::Momentum => 2.0 * u * p,
                        // rounding near the turning point; use the limit
                        Integrand::InverseMomentum if !(p > 1e-6 * slope * u) => 2.0 / slope,
                        Integrand::InverseMomentum => 2.0 * u / p,
                    }
                },
                0.0,
                (to - from).abs().sqrt(),
                ACTION_TOLERANCE,
            )
        };
        let mid = 0.5 * (lo + hi);
        Ok(piece(lo, mid)? + piece(hi, mid)?)
    }

    /// Phase `(1/hbar) int_r^{r2} p dr' + pi/4` of the region-2 form.
    pub fn phase(&self, r: f64) -> Result<f64> {
        Ok(self.action_integral(r, Bound::R2)? / self.hbar + FRAC_PI_4)
    }

    /// Value and region of the semiclassical wavefunction.
    pub fn wavefunction(&self, r: f64) -> Result<(f64, WkbRegion)> {
        Ok((self.phi_series(r, 0)?[0], self.region(r)))
    }

    /// `phi^{(k)}(r)` for `k = 0..=order`.
    pub fn phi_series(&self, r: f64, order: u8) -> Result<Vec<f64>> {
        self.check_outside_exclusion(r)?;
        let region = self.region(r);
        let shape = Shape::new(&[order]);
        let x = Taylor::affine(&shape, C64::new(r, 0.0), &[1.0]);
        let v = self.potential.eval(&x);
        let sign = if region == WkbRegion::Region2 { -1.0 } else { 1.0 };
        let p = ((v - self.energy) * (2.0 * self.mass * sign)).sqrt();
        // antiderivative of p from r, vanishing at r
        let pc = p.coefficients();
        let mut integral = vec![C64::new(0.0, 0.0); pc.len()];
        for j in 1..pc.len() {
            integral[j] = pc[j - 1] / j as f64;
        }
        let integral = Taylor::from_coefficients(&shape, integral);
        let a = self.norm;
        let hbar = self.hbar;
        let phi = match region {
            WkbRegion::Region2 => {
                let theta = (integral * (-1.0 / hbar)) + self.phase(r)?;
                p.powf(-0.5) * theta.sin() * (2.0 * a)
            }
            WkbRegion::Region1 => {
                let i0 = self.action_integral(r, Bound::R1)?;
                let expo = (integral * (1.0 / hbar)) - i0 / hbar;
                let sign = if self.nodes % 2 == 0 { 1.0 } else { -1.0 };
                p.powf(-0.5) * expo.exp() * (sign * a)
            }
            WkbRegion::Region3 => {
                let i0 = self.action_integral(r, Bound::R2)?;
                let expo = (integral * (-1.0 / hbar)) - i0 / hbar;
                p.powf(-0.5) * expo.exp() * a
            }
        };
        Ok((0..=order).map(|k| phi.derivative(&[k]).re).collect())
    }
}

fn find_turning_points(potential: &Potential, energy: f64, domain: (f64, f64)) -> Result<(f64, f64)> {
    let f = |r: f64| potential.value(r) - energy;
    let step = (domain.1 - domain.0) / SCAN_STEPS as f64;
    let mut roots = Vec::new();
    let mut prev = (domain.0, f(domain.0));
    for i in 1..=SCAN_STEPS {
        let x = domain.0 + step * i as f64;
        let cur = (x, f(x));
        if prev.1.is_nan() || cur.1.is_nan() {
            return Err(Error::TurningPoints("potential is not finite on the domain".into()));
        }
        if (prev.1 > 0.0) != (cur.1 > 0.0) {
            roots.push((bisect(&f, prev.0, cur.0), prev.1 > 0.0));
        }
        prev = cur;
    }
    match roots.as_slice() {
        [(r1, true), (r2, false)] => Ok((*r1, *r2)),
        [] => Err(Error::TurningPoints(format!(
            "no classical turning point at E = {energy} on the domain"
        ))),
        other => Err(Error::TurningPoints(format!(
            "expected one well with two turning points, found {} sign changes",
            other.len()
        ))),
    }
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let lo_pos = f(lo) > 0.0;
    while hi - lo > TURNING_POINT_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == lo_pos {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The region-wise closed forms for the local concurrence with Alice and Bob
/// widths `a`, `b`. Infinite on a region-2 node.
pub fn wkb_concurrence(problem: &WkbProblem, r: f64, a: f64, b: f64) -> Result<f64> {
    problem.check_outside_exclusion(r)?;
    let hbar = problem.hbar;
    let (p, p1, p2) = problem.momentum_derivs(r);
    let c = match problem.region(r) {
        WkbRegion::Region2 => {
            let theta = problem.phase(r)?;
            let (s, co) = theta.sin_cos();
            let csc2 = 1.0 / (s * s);
            let cot = co / s;
            let inner = 2.0 * csc2 * p.powi(4) + hbar * hbar * p * p2 - hbar * hbar * p1 * p1
                + 2.0 * hbar * cot * p * p * p1;
            a * b / (3.0 * hbar * hbar * p * p) * inner
        }
        WkbRegion::Region1 => {
            -a * b / (3.0 * hbar * p * p) * (2.0 * p * p * p1 + hbar * p1 * p1 - hbar * p * p2)
        }
        WkbRegion::Region3 => {
            a * b / (3.0 * hbar * p * p) * (2.0 * p * p * p1 - hbar * p1 * p1 + hbar * p * p2)
        }
    };
    Ok(if c.is_nan() { f64::INFINITY } else { c.abs() })
}

/// Concurrence after the node cutoff, via the generic report on [`WkbState`].
pub fn wkb_concurrence_capped(problem: &WkbProblem, r: f64, a: f64, b: f64, sigma: f64) -> Result<(f64, Validity)> {
    let state = WkbState::new(problem.clone());
    let region = MeasurementRegion::cubic(ConfigPoint::new(vec![0.5 * r], vec![-0.5 * r]), a, b)?;
    let opts = ReportOptions {
        sigma,
        with_probability: false,
        with_lambda3: false,
        probability_order: None,
    };
    let rep = report(&state, &region, &opts)?;
    Ok((rep.concurrence, rep.validity))
}

/// Two particles on a line whose relative wavefunction is the WKB form,
/// `psi(q_A, q_B) = phi(q_A - q_B)`.
#[derive(Debug, Clone)]
pub struct WkbState {
    problem: WkbProblem,
    wavelength: f64,
}

impl WkbState {
    pub fn new(problem: WkbProblem) -> Self {
        let (r1, r2) = problem.turning;
        let p_max = (0..=64)
            .map(|i| problem.momentum(r1 + (r2 - r1) * f64::from(i) / 64.0))
            .fold(0.0, f64::max);
        let wavelength = problem.hbar / p_max.max(f64::MIN_POSITIVE);
        WkbState { problem, wavelength }
    }

    pub fn problem(&self) -> &WkbProblem {
        &self.problem
    }
}

impl BipartiteState for WkbState {
    fn dim_a(&self) -> usize {
        1
    }
    fn dim_b(&self) -> usize {
        1
    }
    fn name(&self) -> String {
        format!("wkb(E = {})", self.problem.energy)
    }
    fn length_scale(&self) -> f64 {
        self.wavelength
    }
    fn center(&self) -> ConfigPoint {
        let mid = 0.5 * (self.problem.turning.0 + self.problem.turning.1);
        ConfigPoint::new(vec![0.5 * mid], vec![-0.5 * mid])
    }
    fn amplitude(&self, point: &ConfigPoint) -> Result<C64> {
        let (v, _) = self.problem.wavefunction(point.q_a[0] - point.q_b[0])?;
        Ok(C64::new(v, 0.0))
    }
    fn taylor(&self, point: &ConfigPoint, dirs: &[Vec<f64>], caps: &[u8]) -> Result<Taylor> {
        check_request(self, point, dirs, caps)?;
        let order: u8 = caps.iter().sum();
        let r0 = point.q_a[0] - point.q_b[0];
        let d: Vec<C64> = self
            .problem
            .phi_series(r0, order)?
            .into_iter()
            .map(|x| C64::new(x, 0.0))
            .collect();
        let shape = Shape::new(caps);
        let slopes: Vec<f64> = dirs.iter().map(|v| v[0] - v[1]).collect();
        Ok(Taylor::affine(&shape, C64::new(r0, 0.0), &slopes).compose(&d))
    }
    fn exact_derivatives(&self) -> bool {
        true
    }
    fn normalization(&self) -> Normalization {
        Normalization::Unnormalizable
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::epsilon_joint;

    #[test]
    fn harmonic_ground_turning_points_and_action() {
        let p = WkbProblem::harmonic(1.0, 1.0, 1.0, 0).unwrap();
        let (r1, r2) = p.turning_points();
        assert!((r1 + 1.0).abs() < 1e-10 && (r2 - 1.0).abs() < 1e-10);
        assert!((p.momentum(0.0) - 1.0).abs() < 1e-15);
        let s = p.action_integral(r1, Bound::R2).unwrap();
        assert!((s - PI / 2.0).abs() < 1e-10, "{s}");
        assert_eq!(p.action_integral(r2, Bound::R2).unwrap(), 0.0);
        assert_eq!(p.node_count(), 0);
    }

    #[test]
    fn below_the_well_is_rejected() {
        let r = WkbProblem::new(Potential::harmonic(1.0, 1.0), -0.1, 1.0, 1.0, (-5.0, 5.0));
        assert!(matches!(r, Err(Error::TurningPoints(_))));
    }

    #[test]
    fn linear_well_action() {
        let (f, e, m) = (2.0, 3.0, 0.7);
        let p = WkbProblem::new(Potential::Linear { slope: f, center: 0.0 }, e, m, 1.0, (-4.0, 4.1)).unwrap();
        let r = 0.5 * e / f;
        // int_r^{E/F} sqrt(2m(E - F x)) dx
        let want = (2.0 * m).sqrt() * 2.0 / 3.0 * (e - f * r).powf(1.5) / f;
        assert!((p.action_integral(r, Bound::R2).unwrap() - want).abs() < 1e-10);
    }

    #[test]
    fn closed_form_c2_matches_generic_concurrence() {
        let p = WkbProblem::harmonic(1.0, 1.0, 1.0, 200).unwrap();
        let s = WkbState::new(p.clone());
        let (a, b) = (1e-3, 2e-3);
        let mut checked = 0;
        for i in 0..60 {
            let r = -15.0 + 0.5 * f64::from(i);
            if p.phase(r).unwrap().sin().abs() < 0.2 {
                continue;
            }
            let region = MeasurementRegion::cubic(ConfigPoint::new(vec![0.5 * r], vec![-0.5 * r]), a, b).unwrap();
            let generic = 2.0 * epsilon_joint(&s, &region).unwrap().sqrt();
            let closed = wkb_concurrence(&p, r, a, b).unwrap();
            assert!((closed - generic).abs() < 1e-6 * generic, "r = {r}: {closed} {generic}");
            checked += 1;
        }
        assert!(checked > 30);
    }

    #[test]
    fn forbidden_regions_match_generic_and_mirror() {
        let p = WkbProblem::harmonic(1.0, 1.0, 1.0, 200).unwrap();
        let s = WkbState::new(p.clone());
        let (r1, r2) = p.turning_points();
        let d = p.exclusion_width(Bound::R2) + 0.5;
        let c1 = wkb_concurrence(&p, r1 - d, 0.01, 0.01).unwrap();
        let c3 = wkb_concurrence(&p, r2 + d, 0.01, 0.01).unwrap();
        assert!((c1 - c3).abs() < 1e-9 * c3);
        for r in [r1 - d, r2 + d] {
            let region = MeasurementRegion::cubic(ConfigPoint::new(vec![r], vec![0.0]), 0.01, 0.01).unwrap();
            let generic = 2.0 * epsilon_joint(&s, &region).unwrap().sqrt();
            assert!((generic - c3).abs() < 1e-6 * c3);
        }
    }

    #[test]
    fn flat_region_three_has_no_concurrence() {
        let pot = Potential::TanhWell {
            depth: 50.0,
            half_width: 3.0,
            steepness: 0.5,
        };
        let p = WkbProblem::new(pot, -10.0, 1.0, 1.0, (-30.0, 30.0)).unwrap();
        let c = wkb_concurrence(&p, 25.0, 0.1, 0.1).unwrap();
        assert!(c < 1e-12, "{c}");
        // region 2 keeps a force-free term
        assert!(wkb_concurrence(&p, 0.1, 0.1, 0.1).unwrap() > 1e-3);
    }

    #[test]
    fn decays_into_region_three() {
        let p = WkbProblem::harmonic(1.0, 1.0, 1.0, 50).unwrap();
        let (_, r2) = p.turning_points();
        let start = r2 + p.exclusion_width(Bound::R2) + 0.01;
        let vals: Vec<f64> = (0..5)
            .map(|i| p.wavefunction(start + 0.2 * f64::from(i)).unwrap().0.abs())
            .collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn nodes_sit_on_phase_multiples_of_pi() {
        let p = WkbProblem::harmonic(1.0, 1.0, 1.0, 200).unwrap();
        let (lo, hi) = (-5.0, 5.0);
        let (t_lo, t_hi) = (p.phase(lo).unwrap(), p.phase(hi).unwrap());
        let k = (t_hi / PI).ceil();
        assert!(k * PI < t_lo);
        // phase decreases with r
        let (mut a, mut b) = (lo, hi);
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if p.phase(m).unwrap() > k * PI {
                a = m;
            } else {
                b = m;
            }
        }
        let node = 0.5 * (a + b);
        let scale = p.wavefunction(node + 0.3).unwrap().0.abs().max(p.wavefunction(node - 0.3).unwrap().0.abs());
        assert!(p.wavefunction(node).unwrap().0.abs() < 1e-8 * scale);
    }

    #[test]
    fn deep_tail_amplitudes_keep_their_concurrence() {
        let morse = Potential::Morse { depth: 12.0, alpha: 0.8, r0: 2.0 };
        let p = WkbProblem::new(morse, 4.0, 1.0, 0.05, (0.2, 30.0)).unwrap();
        let r = 9.0;
        assert!(p.wavefunction(r).unwrap().0.abs() < 1e-150);
        let s = WkbState::new(p.clone());
        let region = MeasurementRegion::cubic(ConfigPoint::new(vec![r], vec![0.0]), 5e-4, 5e-4).unwrap();
        let generic = 2.0 * epsilon_joint(&s, &region).unwrap().sqrt();
        let closed = wkb_concurrence(&p, r, 5e-4, 5e-4).unwrap();
        assert!((generic - closed).abs() < 1e-6 * closed, "{generic} vs {closed}");
    }
}
