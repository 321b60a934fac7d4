//! Closed-form expressions evaluated on one derivative jet, i.e. for one
//! (Alice axis, Bob axis) pair with half-widths `a` and `b`.
//!
//! All first-order forms are algebraically identical for pure states; they
//! differ only in which partials they combine and so serve as cross-checks.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::deriv::DerivativeJet;

/// Which algebraic route to use for the first-order eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonForm {
    /// Compact bracket of density-matrix partials.
    Lambda1,
    /// Symmetric bracket treating both parties alike.
    Lambda1Symmetric,
    /// Bracket before the purity rearrangement; needs second Bob derivatives.
    Lambda1Expanded,
    /// `|psi psi_AB - psi_A psi_B|^2 / |psi|^4`.
    ChighD,
    /// `|d^2 S / dq_A dq_B|^2` with `S = -ln psi`.
    LogDerivative,
}

impl EpsilonForm {
    pub const ALL: [EpsilonForm; 5] = [
        EpsilonForm::Lambda1,
        EpsilonForm::Lambda1Symmetric,
        EpsilonForm::Lambda1Expanded,
        EpsilonForm::ChighD,
        EpsilonForm::LogDerivative,
    ];

    /// Bob derivative order the form needs.
    pub fn required_order(self) -> u8 {
        match self {
            EpsilonForm::Lambda1Expanded => 2,
            _ => 1,
        }
    }
}

/// First-order eigenvalue contribution of one axis pair.
pub fn pair_epsilon(jet: &DerivativeJet, a: f64, b: f64, form: EpsilonForm) -> f64 {
    let r = |n1, n2, n3, n4| jet.rho(n1, n2, n3, n4);
    let ab2 = a * a * b * b;
    match form {
        EpsilonForm::Lambda1 => {
            let r0 = r(0, 0, 0, 0);
            let br = r(1, 1, 0, 0) * r(0, 0, 1, 1) + r0 * r(1, 1, 1, 1)
                - r(1, 0, 0, 0) * r(0, 1, 1, 1)
                - r(0, 1, 0, 0) * r(1, 0, 1, 1);
            ab2 * (br / (r0 * r0)).re / 9.0
        }
        EpsilonForm::Lambda1Symmetric => {
            let r0 = r(0, 0, 0, 0);
            let br = r(1, 1, 0, 0) * r(0, 0, 1, 1) * 2.0 + r0 * r(1, 1, 1, 1) * 2.0
                - r(1, 0, 0, 0) * r(0, 1, 1, 1)
                - r(0, 1, 0, 0) * r(1, 0, 1, 1)
                - r(0, 0, 1, 0) * r(1, 1, 0, 1)
                - r(0, 0, 0, 1) * r(1, 1, 1, 0);
            ab2 * (br / (r0 * r0)).re / 18.0
        }
        EpsilonForm::Lambda1Expanded => {
            let r0 = r(0, 0, 0, 0);
            let bob = |n1, n2| r(n1, n2, 2, 0) + r(n1, n2, 1, 1) * 2.0 + r(n1, n2, 0, 2);
            let br = r(1, 1, 0, 0) * (r(0, 0, 2, 0) + r(0, 0, 1, 1) * 2.0 + r(0, 0, 0, 2))
                + r0 * bob(1, 1)
                - r(1, 0, 0, 0) * bob(0, 1)
                - r(0, 1, 0, 0) * bob(1, 0);
            ab2 * (br / (r0 * r0)).re / 18.0
        }
        EpsilonForm::ChighD => {
            // delta / psi^2 from partials scaled by psi, so tails far below
            // sqrt(f64::MIN_POSITIVE) neither underflow nor lose the ratio
            let psi = jet.get(0, 0);
            let q = |k, l| jet.get(k, l).fdiv(psi);
            ab2 * (q(1, 1) - q(1, 0) * q(0, 1)).norm_sqr() / 9.0
        }
        EpsilonForm::LogDerivative => {
            // S_A = -psi_A / psi, S_AB = d_B S_A by the quotient rule
            let psi = jet.get(0, 0);
            let s_ab = -jet.get(1, 1).fdiv(psi) + jet.get(1, 0).fdiv(psi) * jet.get(0, 1).fdiv(psi);
            ab2 * s_ab.norm_sqr() / 9.0
        }
    }
}

/// `(2 a b / 3) |d^2 S / dq_A dq_B|`, the pair concurrence from the log form.
pub fn pair_concurrence_log(jet: &DerivativeJet, a: f64, b: f64) -> f64 {
    let psi = jet.get(0, 0);
    let s_ab = -jet.get(1, 1).fdiv(psi) + jet.get(1, 0).fdiv(psi) * jet.get(0, 1).fdiv(psi);
    2.0 * a * b * s_ab.norm() / 3.0
}

/// Relative size of `D00 D11 - D10 D01` below which a pair is treated as
/// locally separable: the cancellation is then at rounding level.
pub(crate) const SEPARABLE_TOLERANCE: f64 = 1e-12;

fn numerator(r: &dyn Fn(usize, usize, usize, usize) -> C64) -> C64 {
    // (sign, three index quadruples)
    const TERMS: [(f64, [[usize; 4]; 3]); 36] = [
        (1.0, [[0, 2, 1, 1], [1, 1, 2, 0], [2, 0, 0, 2]]),
        (-1.0, [[0, 1, 2, 0], [1, 2, 1, 1], [2, 0, 0, 2]]),
        (-1.0, [[0, 1, 1, 1], [1, 2, 2, 0], [2, 0, 0, 2]]),
        (1.0, [[0, 2, 2, 0], [1, 1, 1, 1], [2, 0, 0, 2]]),
        (1.0, [[0, 2, 0, 2], [1, 1, 2, 0], [2, 0, 1, 1]]),
        (-1.0, [[0, 1, 2, 0], [1, 2, 0, 2], [2, 0, 1, 1]]),
        (-1.0, [[0, 1, 0, 2], [1, 2, 2, 0], [2, 0, 1, 1]]),
        (1.0, [[0, 2, 2, 0], [1, 1, 0, 2], [2, 0, 1, 1]]),
        (-1.0, [[0, 2, 2, 0], [1, 0, 1, 1], [2, 1, 0, 2]]),
        (-1.0, [[0, 2, 1, 1], [1, 0, 2, 0], [2, 1, 0, 2]]),
        (1.0, [[0, 0, 2, 0], [1, 2, 1, 1], [2, 1, 0, 2]]),
        (1.0, [[0, 0, 1, 1], [1, 2, 2, 0], [2, 1, 0, 2]]),
        (-1.0, [[0, 2, 2, 0], [1, 0, 0, 2], [2, 1, 1, 1]]),
        (-1.0, [[0, 2, 0, 2], [1, 0, 2, 0], [2, 1, 1, 1]]),
        (1.0, [[0, 0, 2, 0], [1, 2, 0, 2], [2, 1, 1, 1]]),
        (1.0, [[0, 0, 0, 2], [1, 2, 2, 0], [2, 1, 1, 1]]),
        (-1.0, [[0, 2, 1, 1], [1, 0, 0, 2], [2, 1, 2, 0]]),
        (1.0, [[0, 0, 0, 2], [1, 2, 1, 1], [2, 1, 2, 0]]),
        (1.0, [[0, 2, 1, 1], [1, 0, 0, 0], [2, 1, 2, 2]]),
        (-1.0, [[0, 0, 0, 0], [1, 2, 1, 1], [2, 1, 2, 2]]),
        (1.0, [[0, 1, 2, 0], [1, 0, 1, 1], [2, 2, 0, 2]]),
        (1.0, [[0, 1, 1, 1], [1, 0, 2, 0], [2, 2, 0, 2]]),
        (-1.0, [[0, 0, 2, 0], [1, 1, 1, 1], [2, 2, 0, 2]]),
        (-1.0, [[0, 0, 1, 1], [1, 1, 2, 0], [2, 2, 0, 2]]),
        (1.0, [[0, 1, 2, 0], [1, 0, 0, 2], [2, 2, 1, 1]]),
        (1.0, [[0, 1, 0, 2], [1, 0, 2, 0], [2, 2, 1, 1]]),
        (-1.0, [[0, 0, 2, 0], [1, 1, 0, 2], [2, 2, 1, 1]]),
        (-1.0, [[0, 0, 0, 2], [1, 1, 2, 0], [2, 2, 1, 1]]),
        (1.0, [[0, 1, 1, 1], [1, 0, 0, 2], [2, 2, 2, 0]]),
        (1.0, [[0, 1, 0, 2], [1, 0, 1, 1], [2, 2, 2, 0]]),
        (-1.0, [[0, 0, 1, 1], [1, 1, 0, 2], [2, 2, 2, 0]]),
        (-1.0, [[0, 0, 0, 2], [1, 1, 1, 1], [2, 2, 2, 0]]),
        (-1.0, [[0, 1, 1, 1], [1, 0, 0, 0], [2, 2, 2, 2]]),
        (-1.0, [[0, 1, 0, 0], [1, 0, 1, 1], [2, 2, 2, 2]]),
        (1.0, [[0, 0, 1, 1], [1, 1, 0, 0], [2, 2, 2, 2]]),
        (1.0, [[0, 0, 0, 0], [1, 1, 1, 1], [2, 2, 2, 2]]),
    ];
    let mut acc = C64::new(0.0, 0.0);
    for (s, idx) in TERMS.iter() {
        let mut p = C64::new(*s, 0.0);
        for q in idx {
            p *= r(q[0], q[1], q[2], q[3]);
        }
        acc += p;
    }
    acc / 54.0
}

fn denominator(r: &dyn Fn(usize, usize, usize, usize) -> C64) -> C64 {
    let r0 = r(0, 0, 0, 0);
    let (r10, r01) = (r(1, 0, 0, 0), r(0, 1, 0, 0));
    let sum = r(0, 0, 0, 2) * r01 * r10
        + r(0, 0, 1, 1) * r01 * r10 * 2.0
        + r(0, 0, 2, 0) * r01 * r10
        + r0 * r(0, 1, 0, 2) * r10
        + r0 * r(0, 1, 1, 1) * r10 * 2.0
        + r0 * r(0, 1, 2, 0) * r10
        + r0 * r01 * r(1, 0, 0, 2)
        + r0 * r01 * r(1, 0, 1, 1) * 2.0
        + r0 * r01 * r(1, 0, 2, 0)
        - r0 * r(0, 0, 0, 2) * r(1, 1, 0, 0) * 2.0
        - r0 * r(0, 0, 1, 1) * r(1, 1, 0, 0) * 4.0
        - r0 * r(0, 0, 2, 0) * r(1, 1, 0, 0) * 2.0
        - r0 * r0 * r(1, 1, 0, 2)
        - r0 * r0 * r(1, 1, 1, 1) * 2.0
        - r0 * r0 * r(1, 1, 2, 0);
    sum * 120.0
}

/// Normalization linking the numerator/denominator polynomials to the
/// third eigenvalue of the discretized density matrix.
pub const LAMBDA3_SCALE: f64 = -32.0 / 5.0;

/// Third eigenvalue contribution of one axis pair, `O(a^4 b^4)`. Needs a jet
/// of order 2. Locally separable pairs contribute zero.
pub fn pair_lambda3(jet: &DerivativeJet, a: f64, b: f64) -> f64 {
    debug_assert!(jet.max_order >= 2);
    let d = &jet.d;
    let scale = d[0][0].norm() * d[1][1].norm() + d[1][0].norm() * d[0][1].norm();
    if jet.delta().norm() <= SEPARABLE_TOLERANCE * scale {
        return 0.0;
    }
    let r = |n1, n2, n3, n4| jet.rho(n1, n2, n3, n4);
    let nu = numerator(&r);
    let de = denominator(&r);
    LAMBDA3_SCALE * (a * b).powi(4) * (nu / de).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::ConfigPoint;

    fn jet_from(d: [[f64; 3]; 3]) -> DerivativeJet {
        let mut z = [[C64::new(0.0, 0.0); 3]; 3];
        for k in 0..3 {
            for l in 0..3 {
                z[k][l] = C64::new(d[k][l], 0.0);
            }
        }
        DerivativeJet {
            point: ConfigPoint::new(vec![0.0], vec![0.0]),
            axis_a: 0,
            axis_b: 0,
            max_order: 2,
            d: z,
            exact: true,
        }
    }

    fn det3(d: &[[f64; 3]; 3]) -> f64 {
        d[0][0] * (d[1][1] * d[2][2] - d[1][2] * d[2][1])
            - d[0][1] * (d[1][0] * d[2][2] - d[1][2] * d[2][0])
            + d[0][2] * (d[1][0] * d[2][1] - d[1][1] * d[2][0])
    }

    #[test]
    fn polynomials_reduce_to_determinants() {
        let d = [[1.1, 0.3, -0.7], [0.4, -0.35, 0.2], [-0.9, 0.15, 0.6]];
        let jet = jet_from(d);
        let r = |n1, n2, n3, n4| jet.rho(n1, n2, n3, n4);
        let delta = d[0][0] * d[1][1] - d[1][0] * d[0][1];
        let nu = numerator(&r).re;
        let de = denominator(&r).re;
        assert!((nu - det3(&d).powi(2) / 54.0).abs() < 1e-14);
        assert!((de + 240.0 * d[0][0].powi(2) * delta * delta).abs() < 1e-12);
        let l3 = pair_lambda3(&jet, 0.1, 0.2);
        let want = (0.02f64).powi(4) * det3(&d).powi(2) / (2025.0 * d[0][0].powi(2) * delta * delta);
        assert!((l3 - want).abs() < 1e-12 * want);
    }

    #[test]
    fn forms_agree_on_random_jet() {
        let d = [[0.8, -0.3, 0.5], [0.25, 0.6, -0.1], [0.2, -0.45, 0.3]];
        let mut jet = jet_from(d);
        jet.d[1][1] = C64::new(0.6, -0.2);
        jet.d[0][1] = C64::new(-0.3, 0.4);
        jet.d[0][2] = C64::new(0.5, 0.1);
        let base = pair_epsilon(&jet, 0.1, 0.07, EpsilonForm::ChighD);
        for f in EpsilonForm::ALL {
            let v = pair_epsilon(&jet, 0.1, 0.07, f);
            assert!((v - base).abs() < 1e-13 * base, "{f:?}: {v} vs {base}");
        }
    }
}
