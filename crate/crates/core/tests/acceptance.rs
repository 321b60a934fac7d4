//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the lines show up in the normal test output.

use std::time::Instant;

use local_entanglement::cli::run_map;
use local_entanglement::config::RunConfig;
use local_entanglement::entanglement::{
    binary_entropy, epsilon_joint, epsilon_max, epsilon_with_form, lambda3_joint, report,
    EpsilonForm, MeasurementRegion, ReportOptions, Validity,
};
use local_entanglement::oracle::{build_rdm, log_log_slope, spectrum, OracleSpectrum};
use local_entanglement::state::{
    derivative, BipartiteState, ComPart, ComRelState, ConfigPoint, FnState, GaussianState, Mode1D,
    MultiIndex, Orbital, Party, ProductState,
};
use local_entanglement::transforms::{
    com_rel_pair_terms, gaussian_packet_epsilon, harmonic_normal_modes,
    orthogonal_pullback_epsilon, LocalTransform,
};
use local_entanglement::wkb::{wkb_concurrence, Potential, WkbProblem, WkbState};
use local_entanglement::Complex64 as C64;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn rel(x: f64, y: f64) -> f64 {
    if x == y {
        0.0
    } else {
        (x - y).abs() / y.abs().max(x.abs())
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn oracle(
    state: &(impl BipartiteState + ?Sized),
    region: &MeasurementRegion,
    nodes: usize,
) -> Result<OracleSpectrum, String> {
    let rdm = e(build_rdm(state, region, nodes))?;
    e(spectrum(&rdm))
}

fn hydrogen_1s() -> Result<ComRelState, String> {
    e(ComRelState::hydrogen(
        Orbital::ground(1.0),
        1.0,
        1836.15267343,
        ComPart::PlaneWave { k0: vec![0.0; 3] },
    ))
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let s = hydrogen_1s()?;
    let (a, b) = (0.05, 0.05);
    let mut scaled = Vec::new();
    let mut worst: f64 = 0.0;
    for r in [2.0, 3.0, 5.0, 8.0] {
        let region = e(MeasurementRegion::cubic(
            ConfigPoint::new(vec![r, 0.0, 0.0], vec![0.0; 3]),
            a,
            b,
        ))?;
        let eps = e(epsilon_joint(&s, &region))?;
        let law = 2.0 * (a * b / (3.0 * r)).powi(2);
        ensure(rel(eps, law) < 1e-12, || {
            format!("r = {r}: eps {eps:e} vs law {law:e}")
        })?;
        // two transverse axes contribute equal Schmidt weights, so eps is the
        // whole first-order weight rather than a single eigenvalue
        let sp = oracle(&s, &region, 8)?;
        let l2: f64 = sp.eigenvalues[1..].iter().sum();
        let err = rel(l2, eps);
        worst = worst.max(err);
        ensure(err < 0.02, || {
            format!("r = {r}: oracle weight {l2:e} vs {eps:e}")
        })?;
        scaled.push(l2 * r * r);
    }
    let mean = scaled.iter().sum::<f64>() / scaled.len() as f64;
    let spread = scaled.iter().map(|v| rel(*v, mean)).fold(0.0, f64::max);
    ensure(spread < 0.01, || {
        format!("oracle eps r^2 spread {spread:.3e}")
    })?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.0} s"))?;
    Ok(format!(
        "max oracle error {worst:.2e}, eps r^2 spread {spread:.2e}"
    ))
}

fn criterion_2() -> Check {
    let (ma, mb, w, k, hbar) = (1.0, 2.0, 1.3, 0.7, 1.0);
    let s = e(ComRelState::coupled_oscillator(0, 0, ma, mb, w, k, hbar))?;
    let (m, mu) = (ma + mb, ma * mb / (ma + mb));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (a, b) = (rng.gen_range(0.01..0.1), rng.gen_range(0.01..0.1));
        let p = ConfigPoint::new(
            vec![rng.gen_range(-2.0..2.0)],
            vec![rng.gen_range(-2.0..2.0)],
        );
        let region = e(MeasurementRegion::cubic(p, a, b))?;
        let eps = e(epsilon_joint(&s, &region))?;
        let want = (a * b).powi(2) / (9.0 * m * m * hbar * hbar)
            * (ma * mb * w - m * mu * (k / mu + w * w).sqrt()).powi(2);
        worst = worst.max(rel(eps, want));
    }
    ensure(worst < 1e-12, || format!("closed form off by {worst:.2e}"))?;
    let region = e(MeasurementRegion::cubic(
        ConfigPoint::new(vec![0.3], vec![-0.2]),
        0.05,
        0.05,
    ))?;
    let eps = e(epsilon_joint(&s, &region))?;
    let l2 = oracle(&s, &region, 32)?.lambda(1);
    let err = rel(l2, eps);
    ensure(err < 0.01, || format!("oracle lambda2 {l2:e} vs {eps:e}"))?;
    Ok(format!(
        "closed form to {worst:.1e}, oracle within {err:.2e}"
    ))
}

fn criterion_3() -> Check {
    let s = e(ComRelState::coupled_oscillator(
        0, 0, 1.7, 1.7, 0.9, 0.0, 1.0,
    ))?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let p = ConfigPoint::new(
            vec![rng.gen_range(-3.0..3.0)],
            vec![rng.gen_range(-3.0..3.0)],
        );
        let region = e(MeasurementRegion::cubic(
            p,
            rng.gen_range(0.01..0.2),
            rng.gen_range(0.01..0.2),
        ))?;
        worst = worst.max(e(epsilon_joint(&s, &region))?);
    }
    ensure(worst <= 1e-14, || format!("eps reached {worst:e}"))?;
    Ok(format!("max eps {worst:.1e}"))
}

fn criterion_4() -> Check {
    let s = e(ComRelState::coupled_oscillator_from_lengths(
        0, 0, 1.0, 1.0, 4.0, 2.0,
    ))?;
    let center = ConfigPoint::new(vec![0.4], vec![-0.1]);
    let b = 0.2;
    let xs = [0.02, 0.04, 0.08];
    let (mut ef, mut eo, mut lf, mut lo) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for &a in &xs {
        let region = e(MeasurementRegion::cubic(center.clone(), a, b))?;
        ef.push(e(epsilon_joint(&s, &region))?);
        lf.push(e(lambda3_joint(&s, &region))?);
        let sp = oracle(&s, &region, 32)?;
        eo.push(sp.lambda(1));
        lo.push(sp.lambda(2));
    }
    let slope = |y: &[f64]| log_log_slope(&xs, y).ok_or_else(|| "non-positive values".to_string());
    let (s_ef, s_eo, s_lf, s_lo) = (slope(&ef)?, slope(&eo)?, slope(&lf)?, slope(&lo)?);
    ensure((s_ef - 2.0).abs() < 1e-9, || {
        format!("formula eps slope {s_ef}")
    })?;
    ensure((s_eo - 2.0).abs() <= 0.05, || {
        format!("oracle lambda2 slope {s_eo}")
    })?;
    ensure((s_lf - 4.0).abs() <= 0.05, || {
        format!("formula lambda3 slope {s_lf}")
    })?;
    ensure((s_lo - 4.0).abs() <= 0.05, || {
        format!("oracle lambda3 slope {s_lo}")
    })?;
    Ok(format!(
        "slopes eps {s_ef:.4}/{s_eo:.4}, lambda3 {s_lf:.4}/{s_lo:.4} (formula/oracle)"
    ))
}

fn random_point(rng: &mut ChaCha8Rng, da: usize, db: usize, reach: f64) -> ConfigPoint {
    ConfigPoint::new(
        (0..da)
            .map(|_| rng.gen_range(-reach..reach))
            .collect::<Vec<_>>(),
        (0..db)
            .map(|_| rng.gen_range(-reach..reach))
            .collect::<Vec<_>>(),
    )
}

fn families() -> Result<Vec<(String, Box<dyn BipartiteState>, f64)>, String> {
    let c = |x: f64, y: f64| C64::new(x, y);
    let wkb = e(WkbProblem::harmonic(1.0, 1.0, 1.0, 40))?;
    let mut out: Vec<(String, Box<dyn BipartiteState>, f64)> = vec![
        (
            "coupled_oscillator".into(),
            Box::new(e(ComRelState::coupled_oscillator_from_lengths(
                1, 3, 1.0, 1.5, 4.0, 2.0,
            ))?),
            5.0,
        ),
        (
            "hydrogen".into(),
            Box::new(e(ComRelState::hydrogen(
                e(Orbital::new(3, 2, 1, 1.0))?,
                1.0,
                7.0,
                ComPart::GaussianPacket {
                    width: 3.0,
                    k0: vec![0.2, 0.0, -0.4],
                },
            ))?),
            4.0,
        ),
        (
            "gaussian".into(),
            Box::new(e(GaussianState::new(
                2,
                1,
                vec![
                    vec![c(1.1, 0.2), c(0.3, -0.1), c(-0.4, 0.05)],
                    vec![c(0.3, -0.1), c(0.8, 0.0), c(0.2, 0.3)],
                    vec![c(-0.4, 0.05), c(0.2, 0.3), c(1.4, -0.2)],
                ],
                None,
                None,
            ))?),
            2.0,
        ),
        (
            "two_mode".into(),
            Box::new(e(GaussianState::two_mode(1.0, 0.4, 0.9))?),
            2.0,
        ),
        (
            "product".into(),
            Box::new(e(ProductState::new(
                vec![Mode1D::Oscillator {
                    n: 2,
                    center: 0.1,
                    width: 1.2,
                }],
                vec![Mode1D::Gaussian {
                    center: -0.3,
                    width: 0.8,
                    k: 1.5,
                }],
            ))?),
            2.0,
        ),
        (
            "normal_modes".into(),
            Box::new(e(harmonic_normal_modes(
                1,
                &[1.0, 2.0, 1.5],
                &[
                    vec![2.0, -0.5, 0.2],
                    vec![-0.5, 3.0, -0.7],
                    vec![0.2, -0.7, 1.8],
                ],
                &[1, 0, 2],
                1.0,
            ))?),
            2.0,
        ),
        ("wkb".into(), Box::new(WkbState::new(wkb)), 2.0),
    ];
    let custom = FnState::new("custom", 1, 1, |a: &[f64], b: &[f64]| {
        let x = a[0];
        let y = b[0];
        C64::new(
            (-(x * x + y * y) / 2.0 - 0.3 * x * y).exp() * (1.0 + 0.2 * (x + 2.0 * y).cos()),
            0.1 * x * y,
        )
    });
    out.push(("custom".into(), Box::new(custom), 2.0));
    Ok(out)
}

/// `(ab)^2/9 |grad_A ln psi|^2 |grad_B ln psi|^2`, the size of the terms
/// that cancel in the first-order weight.
fn gradient_floor(s: &dyn BipartiteState, region: &MeasurementRegion) -> Result<f64, String> {
    let p = &region.center;
    let psi = e(s.amplitude(p))?.norm();
    let grad = |party: usize, dim: usize| -> Result<f64, String> {
        let mut sum = 0.0;
        for i in 0..dim {
            let mut oa = vec![0u8; s.dim_a()];
            let mut ob = vec![0u8; s.dim_b()];
            if party == 0 {
                oa[i] = 1
            } else {
                ob[i] = 1
            }
            sum += (e(derivative(s, p, &MultiIndex::new(oa, ob)))?.norm() / psi).powi(2);
        }
        Ok(sum)
    };
    let a = region.half_widths_a[0];
    let b = region.half_widths_b[0];
    Ok((a * b).powi(2) / 9.0 * grad(0, s.dim_a())? * grad(1, s.dim_b())?)
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut names = Vec::new();
    for (name, s, reach) in families()? {
        let mut accepted = 0;
        let mut tries = 0;
        while accepted < 50 {
            tries += 1;
            ensure(tries < 2000, || {
                format!("{name}: too few nonsingular points")
            })?;
            let mut p = random_point(&mut rng, s.dim_a(), s.dim_b(), reach);
            if name == "wkb" {
                // relative coordinate inside the allowed region, away from turning points
                p = ConfigPoint::new(vec![p.q_a[0]], vec![0.0]);
            }
            let psi = match s.amplitude(&p) {
                Ok(v) => v.norm(),
                Err(_) => continue,
            };
            if !(psi > 1e-8) {
                continue;
            }
            let region = e(MeasurementRegion::cubic(
                p,
                rng.gen_range(0.01..0.1),
                rng.gen_range(0.01..0.1),
            ))?;
            let vals: Vec<f64> = match [
                EpsilonForm::Lambda1,
                EpsilonForm::ChighD,
                EpsilonForm::LogDerivative,
            ]
            .iter()
            .map(|f| epsilon_with_form(&*s, &region, *f))
            .collect::<Result<Vec<_>, _>>()
            {
                Ok(v) => v,
                Err(err) => return Err(format!("{name}: {err}")),
            };
            let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            // the rho-partials form cancels terms of size floor, so gaps are
            // measured against the larger of eps and those terms
            let floor = gradient_floor(&*s, &region)?;
            for v in &vals[1..] {
                worst = worst.max((v - vals[0]).abs() / (scale + floor));
            }
            accepted += 1;
        }
        names.push(name);
    }
    ensure(worst <= 1e-10, || format!("forms disagree by {worst:.2e}"))?;
    Ok(format!(
        "{} families x 50 points, max relative gap {worst:.1e}",
        names.len()
    ))
}

/// Known to fail as stated; see the returned detail.
fn criterion_6() -> Check {
    let s = e(ComRelState::coupled_oscillator_from_lengths(
        0, 0, 1.0, 1.0, 4.0, 2.0,
    ))?;
    let mut first_ok = true;
    let mut second_ok = true;
    let mut lines = Vec::new();
    for a in [0.2, 0.1, 0.05] {
        let region = e(MeasurementRegion::cubic(
            ConfigPoint::new(vec![0.3], vec![-0.2]),
            a,
            a,
        ))?;
        let sp = oracle(&s, &region, 32)?;
        let (c, n, l2, l3) = (sp.concurrence, sp.negativity, sp.lambda(1), sp.lambda(2));
        let gap = (c - 2.0 * n).abs() / c;
        let second = (c - 2.0 * l2.sqrt()).abs() / c;
        first_ok &= gap <= 3.0 * l2;
        second_ok &= second <= 2.0 * l2;
        // 2N - C is carried by the third Schmidt weight: ~ sqrt(lambda3 / lambda2)
        let predicted = (l3 / l2).sqrt();
        ensure(rel(gap, predicted) < 0.1, || {
            format!("a = {a}: gap {gap:e} not explained by lambda3 ({predicted:e})")
        })?;
        lines.push(format!(
            "a={a}: |C-2N|/C={gap:.2e} vs 3*lambda2={:.2e}",
            3.0 * l2
        ));
    }
    ensure(second_ok, || {
        "|C - 2 sqrt(lambda2)|/C exceeds 2 lambda2".to_string()
    })?;
    if first_ok {
        Ok(lines.join("; "))
    } else {
        Err(format!(
            "|C-2N|/C ~ sqrt(lambda3/lambda2) = O(sqrt(eps)) exceeds 3*lambda2 = O(eps) on small regions; {}; |C-2sqrt(lambda2)|/C <= 2*lambda2 holds",
            lines.join("; ")
        ))
    }
}

fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let q = m.qr().q();
    (0..n)
        .map(|i| (0..n).map(|j| q[(i, j)]).collect())
        .collect()
}

fn criterion_7() -> Check {
    let c = |x: f64| C64::new(x, 0.0);
    let h = e(ComRelState::hydrogen(
        e(Orbital::new(2, 1, 1, 1.0))?,
        1.0,
        4.0,
        ComPart::GaussianPacket {
            width: 2.0,
            k0: vec![0.3, 0.1, 0.0],
        },
    ))?;
    let g = e(GaussianState::new(
        2,
        2,
        vec![
            vec![c(1.0), c(0.2), c(-0.3), c(0.1)],
            vec![c(0.2), c(1.3), c(0.25), c(-0.2)],
            vec![c(-0.3), c(0.25), c(0.9), c(0.15)],
            vec![c(0.1), c(-0.2), c(0.15), c(1.1)],
        ],
        None,
        None,
    ))?;
    let states: [&dyn BipartiteState; 2] = [&h, &g];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let s = states[k % 2];
        let p = random_point(&mut rng, s.dim_a(), s.dim_b(), 2.0);
        let wa: Vec<f64> = (0..s.dim_a()).map(|_| rng.gen_range(0.01..0.08)).collect();
        let wb: Vec<f64> = (0..s.dim_b()).map(|_| rng.gen_range(0.01..0.08)).collect();
        let region = e(MeasurementRegion::new(p, wa.clone(), wb.clone()))?;
        let party = if rng.gen_bool(0.5) {
            Party::Alice
        } else {
            Party::Bob
        };
        let old = if party == Party::Alice { wa } else { wb };
        let new: Vec<f64> = old.iter().map(|_| rng.gen_range(0.01..0.08)).collect();
        let t = e(LocalTransform::new(
            party,
            random_orthogonal(&mut rng, old.len()),
            old,
            new,
        ))?;
        let direct = e(epsilon_joint(s, &region))?;
        let pulled = e(orthogonal_pullback_epsilon(s, &region, &t))?;
        worst = worst.max(rel(pulled, direct));
    }
    ensure(worst <= 1e-9, || format!("relative change {worst:.2e}"))?;
    Ok(format!("100 pullbacks, max relative change {worst:.1e}"))
}

fn criterion_8() -> Check {
    let orbital = e(Orbital::new(2, 1, 0, 1.0))?;
    let (ma, mb) = (1.0, 3.0);
    let moving = e(ComRelState::hydrogen(
        orbital,
        ma,
        mb,
        ComPart::PlaneWave {
            k0: vec![0.7, -0.3, 1.1],
        },
    ))?;
    let resting = e(ComRelState::hydrogen(
        orbital,
        ma,
        mb,
        ComPart::PlaneWave { k0: vec![0.0; 3] },
    ))?;
    let width = 2.5;
    let packet = e(ComRelState::hydrogen(
        orbital,
        ma,
        mb,
        ComPart::GaussianPacket {
            width,
            k0: vec![0.4, 0.0, -0.2],
        },
    ))?;
    let mu = ma * mb / (ma + mb);
    let packet_term = -2.0 * mu * mu / (ma * mb * width * width);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut com_max, mut plane_gap, mut term_gap, mut total_gap) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..20 {
        let p = random_point(&mut rng, 3, 3, 2.0);
        let region = e(MeasurementRegion::cubic(p, 0.05, 0.04))?;
        for row in e(com_rel_pair_terms(&moving, &region))? {
            for (_, com) in row {
                com_max = com_max.max(com.norm());
            }
        }
        plane_gap = plane_gap.max(rel(
            e(epsilon_joint(&moving, &region))?,
            e(epsilon_joint(&resting, &region))?,
        ));
        for (i, row) in e(com_rel_pair_terms(&packet, &region))?
            .into_iter()
            .enumerate()
        {
            for (j, (_, com)) in row.into_iter().enumerate() {
                let want = if i == j { packet_term } else { 0.0 };
                term_gap = term_gap.max((com - C64::new(want, 0.0)).norm() / packet_term.abs());
            }
        }
        total_gap = total_gap.max(rel(
            e(gaussian_packet_epsilon(&packet, &region))?,
            e(epsilon_joint(&packet, &region))?,
        ));
    }
    ensure(com_max <= 1e-15, || format!("plane-wave term {com_max:e}"))?;
    ensure(plane_gap <= 1e-12, || {
        format!("plane wave changes eps by {plane_gap:e}")
    })?;
    ensure(term_gap <= 1e-9 && total_gap <= 1e-9, || {
        format!("packet terms {term_gap:e}, total {total_gap:e}")
    })?;
    Ok(format!(
        "plane-wave term {com_max:.0e}, packet terms {term_gap:.1e}, packet eps {total_gap:.1e}"
    ))
}

fn criterion_9() -> Check {
    let s = e(ComRelState::coupled_oscillator_from_lengths(
        1, 3, 1.0, 1.0, 4.0, 2.0,
    ))?;
    let sigma = 0.1;
    let cap = epsilon_max(1, 1, sigma);
    let h = e(binary_entropy(cap))?;
    let opts = ReportOptions {
        sigma,
        ..ReportOptions::default()
    };
    let mut n = 0;
    // R = 0 is a nodal line of the n_R = 1 factor; r = 0 one of the n_r = 3 factor
    for t in [0.7, 1.9, 3.3, 5.0, -2.6] {
        for p in [
            ConfigPoint::new(vec![t], vec![-t]),
            ConfigPoint::new(vec![t], vec![t]),
        ] {
            let region = e(MeasurementRegion::cubic(p, 0.1, 0.1))?;
            let r = e(report(&s, &region, &opts))?;
            ensure(r.validity == Validity::NearNodeCutoff, || {
                format!("t = {t}: {:?}", r.validity)
            })?;
            ensure(rel(r.epsilon, cap) < 1e-15, || {
                format!("t = {t}: eps {}", r.epsilon)
            })?;
            ensure(rel(r.entropy_d, h) < 1e-15, || {
                format!("t = {t}: E_D {}", r.entropy_d)
            })?;
            n += 1;
        }
    }
    Ok(format!(
        "{n} nodal points at eps_MAX = {cap:.4e}, E_D = {h:.4e}"
    ))
}

fn criterion_10() -> Check {
    let p = e(WkbProblem::harmonic(1.0, 1.0, 1.0, 200))?;
    let s = WkbState::new(p.clone());
    let (a, b) = (1e-3, 2e-3);
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for i in 0..121 {
        let r = -15.0 + 0.25 * f64::from(i);
        if e(p.phase(r))?.sin().abs() < 0.2 {
            continue;
        }
        let region = e(MeasurementRegion::cubic(
            ConfigPoint::new(vec![0.5 * r], vec![-0.5 * r]),
            a,
            b,
        ))?;
        let generic = 2.0 * e(epsilon_joint(&s, &region))?.sqrt();
        worst = worst.max(rel(e(wkb_concurrence(&p, r, a, b))?, generic));
        n += 1;
    }
    ensure(worst <= 1e-6, || format!("C2 off by {worst:.2e}"))?;
    let flat = e(WkbProblem::new(
        Potential::TanhWell {
            depth: 50.0,
            half_width: 3.0,
            steepness: 0.5,
        },
        -10.0,
        1.0,
        1.0,
        (-30.0, 30.0),
    ))?;
    let c3 = e(wkb_concurrence(&flat, 25.0, 0.1, 0.1))?;
    ensure(c3 <= 1e-12, || format!("C3 = {c3:e}"))?;
    Ok(format!(
        "C2 vs generic {worst:.1e} over {n} points, flat C3 = {c3:.1e}"
    ))
}

fn criterion_11() -> Check {
    let configs = [
        ("fig2a", include_str!("../configs/fig2a.json")),
        ("fig2b", include_str!("../configs/fig2b.json")),
        ("fig2c", include_str!("../configs/fig2c.json")),
        ("fig3", include_str!("../configs/fig3.json")),
    ];
    let mut parts = Vec::new();
    for (name, text) in configs {
        let cfg = e(RunConfig::from_json(text))?;
        let start = Instant::now();
        let map = e(run_map(&cfg))?;
        let secs = start.elapsed().as_secs_f64();
        ensure(secs < 300.0, || format!("{name} took {secs:.0} s"))?;
        ensure(map.cells.len() == 128 * 128, || {
            format!("{name}: {} cells", map.cells.len())
        })?;
        ensure(map.cells.iter().all(|c| c.validity != "error"), || {
            format!("{name}: error cells")
        })?;
        let ed: Vec<f64> = map.cells.iter().map(|c| c.entropy_d).collect();
        let mean = ed.iter().sum::<f64>() / ed.len() as f64;
        let var = ed.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / ed.len() as f64;
        let max = ed.iter().copied().fold(f64::MIN, f64::max);
        let dims = if name == "fig3" { 3 } else { 1 };
        let cap = e(binary_entropy(epsilon_max(dims, dims, 0.1)))?;
        let capped = map
            .cells
            .iter()
            .filter(|c| c.validity == "near_node_cutoff")
            .count();
        if name == "fig2a" {
            ensure(var < 1e-20, || format!("fig2a: E_D variance {var:e}"))?;
        } else {
            ensure(rel(max, cap) < 1e-12, || {
                format!("{name}: max E_D {max:e} vs cap {cap:e}")
            })?;
            ensure(capped > 0, || format!("{name}: no capped cells"))?;
        }
        parts.push(format!("{name} {secs:.1}s var {var:.1e} max {max:.4e}"));
    }
    Ok(parts.join("; "))
}

/// Criteria that cannot hold as stated; the analysis is in the check itself.
const KNOWN_UNATTAINABLE: &[usize] = &[6];

fn main() {
    let checks: [(usize, &str, fn() -> Check); 11] = [
        (1, "hydrogen 1s law", criterion_1),
        (2, "coupled-oscillator ground state", criterion_2),
        (3, "uncoupled limit", criterion_3),
        (4, "scaling laws", criterion_4),
        (5, "form equivalence", criterion_5),
        (6, "C = 2N = 2 sqrt(eps)", criterion_6),
        (7, "orthogonal invariance", criterion_7),
        (8, "centre-of-mass contributions", criterion_8),
        (9, "node cutoff", criterion_9),
        (10, "WKB consistency", criterion_10),
        (11, "figure data", criterion_11),
    ];
    let mut unexpected = Vec::new();
    for (id, name, f) in checks {
        let start = Instant::now();
        let out = f();
        let secs = start.elapsed().as_secs_f64();
        match out {
            Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                println!("criterion {id:>2} FAIL  {name}: {detail} [{secs:.1}s]");
                if !KNOWN_UNATTAINABLE.contains(&id) {
                    unexpected.push(id);
                }
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
