//! Gauss–Legendre rules, composite panels and an adaptive Gauss–Kronrod
//! integrator for one-dimensional integrals with endpoint behaviour.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "need at least one node"));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Ok(GaussLegendre { nodes, weights })
    }

    /// Shared rule for `n` nodes.
    pub fn cached(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("quadrature cache poisoned");
        guard
            .entry(n.max(1))
            .or_insert_with(|| Arc::new(GaussLegendre::new(n.max(1)).expect("n >= 1")))
            .clone()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped onto `[lo, hi]`.
    pub fn on_interval(&self, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let x = self.nodes.iter().map(|t| mid + half * t).collect();
        let w = self.weights.iter().map(|w| half * w).collect();
        (x, w)
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, lo: f64, hi: f64) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(t, w)| w * f(mid + half * t))
            .sum::<f64>()
            * half
    }
}

/// `P_n(x)` and `P_n'(x)`.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = if (1.0 - x * x).abs() < 1e-300 {
        let nf = n as f64;
        x.signum().powi(n as i32 + 1) * nf * (nf + 1.0) / 2.0
    } else {
        n as f64 * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, d)
}

/// Composite rule: `panels` equal panels of `per_panel` nodes over `[lo, hi]`.
pub fn composite(per_panel: usize, panels: usize, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let rule = GaussLegendre::cached(per_panel);
    let width = (hi - lo) / panels as f64;
    let mut x = Vec::with_capacity(per_panel * panels);
    let mut w = Vec::with_capacity(per_panel * panels);
    for p in 0..panels {
        let a = lo + width * p as f64;
        let (xp, wp) = rule.on_interval(a, a + width);
        x.extend(xp);
        w.extend(wp);
    }
    (x, w)
}

/// Orthonormal Legendre modal matrix for an `n`-point rule, row-major
/// `n x keep`: entry `(k, m)` is `sqrt(w_k) * Phat_m(t_k)` with `Phat_m`
/// normalized on `[-1, 1]`. Its columns are orthonormal for `keep <= n`.
pub fn legendre_modal_matrix(n: usize, keep: usize) -> Vec<f64> {
    let rule = GaussLegendre::cached(n);
    let mut q = vec![0.0; n * keep];
    for (k, (&t, &w)) in rule.nodes().iter().zip(rule.weights()).enumerate() {
        let sw = w.sqrt();
        let mut p0 = 1.0;
        let mut p1 = t;
        for m in 0..keep {
            let pm = match m {
                0 => 1.0,
                1 => t,
                _ => {
                    let mf = m as f64;
                    let p2 = ((2.0 * mf - 1.0) * t * p1 - (mf - 1.0) * p0) / mf;
                    p0 = p1;
                    p1 = p2;
                    p2
                }
            };
            q[k * keep + m] = sw * pm * ((2.0 * m as f64 + 1.0) / 2.0).sqrt();
        }
    }
    q
}

const GK_XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const G7_W: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let fc = f(mid);
    let mut kron = GK_WK[7] * fc;
    let mut gauss = G7_W[3] * fc;
    for j in 0..7 {
        let dx = half * GK_XK[j];
        let s = f(mid - dx) + f(mid + dx);
        kron += GK_WK[j] * s;
        if j % 2 == 1 {
            gauss += G7_W[j / 2] * s;
        }
    }
    (kron * half, ((kron - gauss) * half).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integration to relative tolerance `tol`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let mut stack = vec![(lo, hi, 0usize)];
    let mut total = 0.0;
    let mut total_err = 0.0;
    let (whole, _) = gk15(&f, lo, hi);
    let scale = whole.abs().max(1e-300);
    let mut evaluations = 0usize;
    while let Some((a, b, depth)) = stack.pop() {
        let (v, err) = gk15(&f, a, b);
        evaluations += 1;
        if !v.is_finite() {
            return Err(Error::Quadrature("non-finite integrand".into()));
        }
        let allowed = tol * scale * ((b - a) / (hi - lo)).max(1e-3);
        if err <= allowed || depth >= 40 || evaluations > 20_000 {
            total += v;
            total_err += err;
        } else {
            let m = 0.5 * (a + b);
            stack.push((a, m, depth + 1));
            stack.push((m, b, depth + 1));
        }
    }
    if total_err > 1e3 * tol * scale.max(total.abs()) {
        return Err(Error::Quadrature(format!(
            "estimated error {total_err:.3e} exceeds tolerance"
        )));
    }
    Ok(total)
}
