//! Cartesian derivatives of functions given in spherical coordinates.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::hydrogen::SphericalDerivs;

/// Smallest `sin(theta)` accepted for the full chain rule.
pub const POLE_TOLERANCE: f64 = 1e-8;

/// Value, gradient and Hessian with respect to `(x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartesianJet {
    pub value: C64,
    pub gradient: [C64; 3],
    pub hessian: [[C64; 3]; 3],
}

/// `(r, theta, phi)` of a Cartesian point, `theta` from the `z` axis.
pub fn to_spherical(p: [f64; 3]) -> (f64, f64, f64) {
    let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    let theta = if r > 0.0 { (p[2] / r).clamp(-1.0, 1.0).acos() } else { 0.0 };
    (r, theta, p[1].atan2(p[0]))
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain("spherical chain rule needs r > 0".into()))
    }
}

/// First derivatives of `(r, theta, phi)` with respect to `(x, y, z)`, rows by coordinate.
fn first(r: f64, theta: f64, phi: f64) -> [[f64; 3]; 3] {
    let (s, c) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [
        [s * cp, s * sp, c],
        [c * cp / r, c * sp / r, -s / r],
        [-sp / (r * s), cp / (r * s), 0.0],
    ]
}

/// Hessians of `r`, `theta` and `phi` with respect to `(x, y, z)`.
fn second(r: f64, theta: f64, phi: f64) -> [[[f64; 3]; 3]; 3] {
    let (s, c) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let n = [s * cp, s * sp, c];
    let mut hr = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            hr[i][j] = (if i == j { 1.0 } else { 0.0 } - n[i] * n[j]) / r;
        }
    }
    let r2 = r * r;
    let c2t = (2.0 * theta).cos();
    let txx = c * (sp * sp - 2.0 * s * s * cp * cp) / (r2 * s);
    let txy = -sp * cp * c * (2.0 * s * s + 1.0) / (r2 * s);
    let txz = -cp * c2t / r2;
    let tyy = c * (cp * cp - 2.0 * sp * sp * s * s) / (r2 * s);
    let tyz = -sp * c2t / r2;
    let tzz = 2.0 * c * s / r2;
    let ht = [[txx, txy, txz], [txy, tyy, tyz], [txz, tyz, tzz]];
    let den = r2 * s * s;
    let (s2p, c2p) = (2.0 * phi).sin_cos();
    let hp = [
        [s2p / den, -c2p / den, 0.0],
        [-c2p / den, -s2p / den, 0.0],
        [0.0, 0.0, 0.0],
    ];
    [hr, ht, hp]
}

/// Cartesian gradient. At a pole this is only defined when `d_phi` vanishes.
pub fn spherical_gradient(d: &SphericalDerivs, r: f64, theta: f64, phi: f64) -> Result<[C64; 3]> {
    check_radius(r)?;
    let s = theta.sin();
    if s.abs() < POLE_TOLERANCE {
        if d.d_phi.norm() > 0.0 {
            return Err(Error::Domain("azimuthal derivative is singular on the pole".into()));
        }
        let c = theta.cos();
        let (sp, cp) = phi.sin_cos();
        // only the r and theta terms survive
        let g_r = [s * cp, s * sp, c];
        let g_t = [c * cp / r, c * sp / r, -s / r];
        return Ok(std::array::from_fn(|i| d.d_r * g_r[i] + d.d_theta * g_t[i]));
    }
    let j = first(r, theta, phi);
    Ok(std::array::from_fn(|i| {
        d.d_r * j[0][i] + d.d_theta * j[1][i] + d.d_phi * j[2][i]
    }))
}

/// Value, gradient and Hessian in Cartesian coordinates from spherical partials.
pub fn spherical_cartesian_jet(d: &SphericalDerivs, r: f64, theta: f64, phi: f64) -> Result<CartesianJet> {
    check_radius(r)?;
    if theta.sin().abs() < POLE_TOLERANCE {
        return Err(Error::Domain(format!(
            "sin(theta) below {POLE_TOLERANCE:e}; the second-order chain rule is singular"
        )));
    }
    let j = first(r, theta, phi);
    let h = second(r, theta, phi);
    let f1 = [d.d_r, d.d_theta, d.d_phi];
    let f2 = [
        [d.d_rr, d.d_rtheta, d.d_rphi],
        [d.d_rtheta, d.d_thetatheta, d.d_thetaphi],
        [d.d_rphi, d.d_thetaphi, d.d_phiphi],
    ];
    let gradient = std::array::from_fn(|i| (0..3).map(|a| f1[a] * j[a][i]).sum());
    let mut hessian = [[C64::new(0.0, 0.0); 3]; 3];
    for (i, row) in hessian.iter_mut().enumerate() {
        for (k, out) in row.iter_mut().enumerate() {
            let mut v = C64::new(0.0, 0.0);
            for a in 0..3 {
                v += f1[a] * h[a][i][k];
                for b in 0..3 {
                    v += f2[a][b] * (j[a][i] * j[b][k]);
                }
            }
            *out = v;
        }
    }
    Ok(CartesianJet {
        value: d.value,
        gradient,
        hessian,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::Orbital;
    use crate::taylor::{Shape, Taylor};

    fn cartesian_reference(o: &Orbital, p: [f64; 3]) -> CartesianJet {
        let mut hessian = [[C64::new(0.0, 0.0); 3]; 3];
        let mut gradient = [C64::new(0.0, 0.0); 3];
        let mut value = C64::new(0.0, 0.0);
        for i in 0..3 {
            for k in 0..3 {
                let shape = Shape::new(&[1, 1]);
                let v: Vec<Taylor> = (0..3)
                    .map(|m| {
                        let si = if m == i { 1.0 } else { 0.0 };
                        let sk = if m == k { 1.0 } else { 0.0 };
                        Taylor::affine(&shape, C64::new(p[m], 0.0), &[si, sk])
                    })
                    .collect();
                let t = o.cartesian(&v, true).unwrap();
                hessian[i][k] = t.derivative(&[1, 1]);
                gradient[i] = t.derivative(&[1, 0]);
                value = t.derivative(&[0, 0]);
            }
        }
        CartesianJet { value, gradient, hessian }
    }

    #[test]
    fn chain_rule_matches_cartesian_form() {
        for (n, l, m) in [(1, 0, 0), (2, 1, 0), (2, 1, 1), (3, 2, -1)] {
            let o = Orbital::new(n, l, m, 1.0).unwrap();
            for &(r, t, ph) in &[(2.0, 1.0, 0.5), (0.7, 2.3, -1.2), (3.1, 0.2, 2.9)] {
                let d = o.spherical_derivs(r, t, ph).unwrap();
                let jet = spherical_cartesian_jet(&d, r, t, ph).unwrap();
                let p = [r * t.sin() * ph.cos(), r * t.sin() * ph.sin(), r * t.cos()];
                let want = cartesian_reference(&o, p);
                let scale = want.value.norm() + want.gradient.iter().map(|z| z.norm()).sum::<f64>();
                for i in 0..3 {
                    assert!((jet.gradient[i] - want.gradient[i]).norm() < 1e-12 * scale);
                    for k in 0..3 {
                        let e = (jet.hessian[i][k] - want.hessian[i][k]).norm();
                        assert!(e < 1e-11 * scale, "{n}{l}{m} {i}{k}: {e}");
                    }
                }
            }
        }
    }

    #[test]
    fn radial_function_on_the_axis() {
        let o = Orbital::ground(1.0);
        let d = o.spherical_derivs(1.5, 0.0, 0.0).unwrap();
        let g = spherical_gradient(&d, 1.5, 0.0, 0.0).unwrap();
        assert!((g[2] + d.value).norm() < 1e-15);
        assert!(spherical_cartesian_jet(&d, 1.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn equatorial_derivative_of_p_orbital() {
        let o = Orbital::new(2, 1, 0, 1.0).unwrap();
        let (r, t) = (2.0, std::f64::consts::FRAC_PI_2);
        let d = o.spherical_derivs(r, t, 0.3).unwrap();
        let g = spherical_gradient(&d, r, t, 0.3).unwrap();
        assert!((g[2] - (-d.d_theta / r)).norm() < 1e-15);
    }
}
