//! Closed forms against the oracle over a ladder of region sizes.

use serde::{Deserialize, Serialize};

use super::{build_rdm, default_nodes, spectrum};
use crate::entanglement::{
    epsilon_alice_only, report, MeasurementRegion, ReportOptions, Validity,
};
use crate::error::{Error, Result};
use crate::state::BipartiteState;

/// Which widths the ladder rescales.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderParty {
    Alice,
    Bob,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CompareOptions {
    pub sigma: f64,
    /// Factors applied to the region's widths, largest first.
    pub ladder: Vec<f64>,
    pub scale: LadderParty,
    /// Nodes per box axis; `None` picks by dimension.
    pub nodes: Option<usize>,
    /// Allowed relative error of `eps` against the oracle at the smallest rung.
    pub tolerance: f64,
    pub with_lambda3: bool,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            sigma: 0.1,
            ladder: vec![1.0, 0.5, 0.25],
            scale: LadderParty::Both,
            nodes: None,
            tolerance: 0.02,
            with_lambda3: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rung {
    pub scale: f64,
    pub half_widths_a: Vec<f64>,
    pub half_widths_b: Vec<f64>,
    pub eps_formula: f64,
    pub lambda2_oracle: f64,
    pub lambda3_formula: Option<f64>,
    pub lambda3_oracle: f64,
    pub entropy_d_formula: f64,
    pub entropy_d_oracle: f64,
    pub rel_err_eps: f64,
    pub rel_err_lambda3: Option<f64>,
    pub validity: Validity,
    pub truncation_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub state: String,
    pub region: MeasurementRegion,
    pub options: CompareOptions,
    pub rungs: Vec<Rung>,
    /// Least-squares slopes of `ln value` against `ln scale`.
    pub slope_eps_formula: Option<f64>,
    pub slope_lambda2_oracle: Option<f64>,
    pub slope_lambda3_formula: Option<f64>,
    pub slope_lambda3_oracle: Option<f64>,
    pub passed: bool,
    pub failures: Vec<String>,
}

/// Values below this count as zero when forming relative errors.
const ZERO: f64 = 1e-30;

pub(crate) fn relative_error(formula: f64, oracle: f64) -> f64 {
    if formula.abs() < ZERO && oracle.abs() < ZERO {
        0.0
    } else {
        (formula - oracle).abs() / oracle.abs().max(ZERO)
    }
}

/// Slope of `ln y` against `ln x`; `None` unless every `y` is positive.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 || x.len() != y.len() || y.iter().any(|&v| !(v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Runs the ladder. Passes iff every rung is valid and the smallest rung
/// agrees with the oracle within `options.tolerance`.
pub fn compare(
    state: &(impl BipartiteState + ?Sized),
    region: &MeasurementRegion,
    options: &CompareOptions,
) -> Result<ComparisonReport> {
    if options.ladder.is_empty() || options.ladder.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::param("ladder", "needs positive scale factors"));
    }
    let nodes = options
        .nodes
        .unwrap_or_else(|| default_nodes(state.dim_a().max(state.dim_b())));
    let mut rungs = Vec::with_capacity(options.ladder.len());
    for &s in &options.ladder {
        let (ka, kb) = match options.scale {
            LadderParty::Alice => (s, 1.0),
            LadderParty::Bob => (1.0, s),
            LadderParty::Both => (s, s),
        };
        let r = region.scaled(ka, kb)?;
        let opts = ReportOptions {
            sigma: options.sigma,
            with_probability: false,
            with_lambda3: options.with_lambda3,
            probability_order: None,
        };
        let rep = report(state, &r, &opts)?;
        let eps_formula = if r.is_alice_only() {
            epsilon_alice_only(state, &r)?.0
        } else {
            rep.epsilon_formula.unwrap_or(f64::INFINITY)
        };
        let rdm = build_rdm(state, &r, nodes)?;
        let sp = spectrum(&rdm)?;
        let (l2, l3) = (sp.lambda(1), sp.lambda(2));
        rungs.push(Rung {
            scale: s,
            half_widths_a: r.half_widths_a.clone(),
            half_widths_b: r.half_widths_b.clone(),
            eps_formula,
            lambda2_oracle: l2,
            lambda3_formula: rep.lambda3,
            lambda3_oracle: l3,
            entropy_d_formula: rep.entropy_d,
            entropy_d_oracle: sp.entropy,
            rel_err_eps: relative_error(eps_formula, l2),
            rel_err_lambda3: rep.lambda3.map(|f| relative_error(f, l3)),
            validity: rep.validity,
            truncation_residual: rdm.truncation_residual,
        });
    }
    let xs: Vec<f64> = rungs.iter().map(|r| r.scale).collect();
    let col = |f: &dyn Fn(&Rung) -> f64| -> Vec<f64> { rungs.iter().map(f).collect() };
    let slope_eps_formula = log_log_slope(&xs, &col(&|r| r.eps_formula));
    let slope_lambda2_oracle = log_log_slope(&xs, &col(&|r| r.lambda2_oracle));
    let slope_lambda3_formula = if options.with_lambda3 {
        log_log_slope(&xs, &col(&|r| r.lambda3_formula.unwrap_or(0.0)))
    } else {
        None
    };
    let slope_lambda3_oracle = log_log_slope(&xs, &col(&|r| r.lambda3_oracle));

    let mut failures = Vec::new();
    for r in &rungs {
        if r.validity != Validity::Valid {
            failures.push(format!("scale {}: region is {:?}", r.scale, r.validity));
        }
    }
    let smallest = rungs
        .iter()
        .min_by(|a, b| a.scale.total_cmp(&b.scale))
        .expect("non-empty ladder");
    if !(smallest.rel_err_eps <= options.tolerance) {
        failures.push(format!(
            "scale {}: relative error {:.3e} exceeds {:.3e}",
            smallest.scale, smallest.rel_err_eps, options.tolerance
        ));
    }
    Ok(ComparisonReport {
        state: state.name(),
        region: region.clone(),
        options: options.clone(),
        rungs,
        slope_eps_formula,
        slope_lambda2_oracle,
        slope_lambda3_formula,
        slope_lambda3_oracle,
        passed: failures.is_empty(),
        failures,
    })
}
