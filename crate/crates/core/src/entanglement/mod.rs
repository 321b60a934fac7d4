//! Local entanglement after filtering both particles into small boxes.

mod alice;
mod forms;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use alice::{alice_rho_partials, epsilon_alice_only};
pub use forms::{pair_concurrence_log, pair_epsilon, pair_lambda3, EpsilonForm, LAMBDA3_SCALE};

use crate::deriv::{build_jet, DerivativeJet};
use crate::error::{Error, Result};
use crate::oracle;
use crate::state::{BipartiteState, ConfigPoint};

/// Default node-cutoff parameter.
pub const DEFAULT_SIGMA: f64 = 0.1;

/// Boxes `|q_A,i - qbar_A,i| <= a_i` and `|q_B,j - qbar_B,j| <= b_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRegion {
    pub center: ConfigPoint,
    pub half_widths_a: Vec<f64>,
    /// Empty when only Alice measures.
    pub half_widths_b: Vec<f64>,
}

impl MeasurementRegion {
    pub fn new(center: ConfigPoint, half_widths_a: Vec<f64>, half_widths_b: Vec<f64>) -> Result<Self> {
        if half_widths_a.len() != center.q_a.len() {
            return Err(Error::DimensionMismatch {
                expected: center.q_a.len(),
                got: half_widths_a.len(),
                context: "Alice half-widths",
            });
        }
        if !half_widths_b.is_empty() && half_widths_b.len() != center.q_b.len() {
            return Err(Error::DimensionMismatch {
                expected: center.q_b.len(),
                got: half_widths_b.len(),
                context: "Bob half-widths",
            });
        }
        if half_widths_a.iter().chain(&half_widths_b).any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::param("half_widths", "must be positive and finite"));
        }
        Ok(MeasurementRegion {
            center,
            half_widths_a,
            half_widths_b,
        })
    }

    /// Same half-width `a` on every Alice axis and `b` on every Bob axis.
    pub fn cubic(center: ConfigPoint, a: f64, b: f64) -> Result<Self> {
        let (na, nb) = center.dims();
        MeasurementRegion::new(center, vec![a; na], vec![b; nb])
    }

    pub fn alice_only(center: ConfigPoint, half_widths_a: Vec<f64>) -> Result<Self> {
        MeasurementRegion::new(center, half_widths_a, Vec::new())
    }

    pub fn is_alice_only(&self) -> bool {
        self.half_widths_b.is_empty()
    }

    /// Dimension check against a state.
    pub fn check(&self, state: &(impl BipartiteState + ?Sized)) -> Result<()> {
        if self.center.q_a.len() != state.dim_a() || self.center.q_b.len() != state.dim_b() {
            return Err(Error::DimensionMismatch {
                expected: state.dim_a() + state.dim_b(),
                got: self.center.q_a.len() + self.center.q_b.len(),
                context: "region centre",
            });
        }
        Ok(())
    }

    /// Region with Alice's widths scaled by `ka` and Bob's by `kb`.
    pub fn scaled(&self, ka: f64, kb: f64) -> Result<Self> {
        MeasurementRegion::new(
            self.center.clone(),
            self.half_widths_a.iter().map(|w| w * ka).collect(),
            self.half_widths_b.iter().map(|w| w * kb).collect(),
        )
    }

    pub(crate) fn require_joint(&self) -> Result<()> {
        if self.is_alice_only() {
            Err(Error::param("half_widths_b", "both parties must measure"))
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Validity {
    Valid,
    NearNodeCutoff,
    InvalidRegionTooLarge,
}

/// `h(eps) = -eps log2 eps - (1 - eps) log2 (1 - eps)`.
pub fn binary_entropy(eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::param("epsilon", format!("{eps} is outside [0, 1]")));
    }
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    Ok(term(eps) + term(1.0 - eps))
}

/// Jets for every (Alice axis, Bob axis) pair, row-major in Alice's axis.
pub fn pair_jets(
    state: &(impl BipartiteState + ?Sized),
    region: &MeasurementRegion,
    max_order: u8,
) -> Result<Vec<Vec<DerivativeJet>>> {
    region.check(state)?;
    region.require_joint()?;
    (0..state.dim_a())
        .map(|i| {
            (0..state.dim_b())
                .map(|j| build_jet(state, &region.center, i, j, max_order))
                .collect()
        })
        .collect()
}

fn require_nonzero(jet: &DerivativeJet) -> Result<()> {
    if jet.get(0, 0).norm() == 0.0 {
        Err(Error::NodeCutoff)
    } else {
        Ok(())
    }
}

/// Per-pair contributions `eps_ij` using the chosen algebraic form.
pub fn epsilon_pairs_with(
    state: &(impl BipartiteState + ?Sized),
    region: &MeasurementRegion,
    form: EpsilonForm,
) -> Result<Vec<Vec<f64>>> {
    let jets = pair_jets(state, region, form.required_order())?;
    pairs_from_jets(&jets, region, form)
}

fn pairs_from_jets(
    jets: &[Vec<DerivativeJet>],
    region: &MeasurementRegion,
    form: EpsilonForm,
) -> Result<Vec<Vec<f64>>> {
    jets.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, jet)| {
                    require_nonzero(jet)?;
                    Ok(pair_epsilon(
                        jet,
                        region.half_widths_a[i],
                        region.half_widths_b[j],
                        form,
                    ))
                })
                .collect()
        })
        .collect()
}

/// `eps = sum_ij eps_ij` via the squared-concurrence form.
pub fn epsilon_joint(state: &(impl BipartiteState + ?Sized), region: &MeasurementRegion) -> Result<f64> {
    epsilon_with_form(state, region, EpsilonForm::ChighD)
}

pub fn epsilon_with_form(
    state: &(impl BipartiteState + ?Sized),
    region: &MeasurementRegion,
    form: EpsilonForm,
) -> Result<f64> {
    Ok(epsilon_pairs_with(state, region, form)?.iter().flatten().sum())
}

/// Third eigenvalue, summed over axis pairs.
pub fn lambda3_joint(state: &(impl BipartiteState + ?Sized), region: &MeasurementRegion) -> Result<f64> {
    let jets = pair_jets(state, region, 2)?;
    lambda3_from_jets(&jets, region)
}

fn lambda3_from_jets(jets: &[Vec<DerivativeJet>], region: &MeasurementRegion) -> Result<f64> {
    let mut total = 0.0;
    for (i, row) in jets.iter().enumerate() {
        for (j, jet) in row.iter().enumerate() {
            require_nonzero(jet)?;
            total += pair_lambda3(jet, region.half_widths_a[i], region.half_widths_b[j]);
        }
    }
    Ok(total)
}

/// Total concurrence and the per-pair matrix from second derivatives of `-ln psi`.
pub fn concurrence_from_log_state(
    state: &(impl BipartiteState + ?Sized),
    region: &MeasurementRegion,
) -> Result<(f64, Vec<Vec<f64>>)> {
    let jets = pair_jets(state, region, 1)?;
    let mut pairs = Vec::with_capacity(jets.len());
    let mut c2 = 0.0;
    for (i, row) in jets.iter().enumerate() {
        let mut out = Vec::with_capacity(row.len());
        for (j, jet) in row.iter().enumerate() {
            require_nonzero(jet)?;
            let c = pair_concurrence_log(jet, region.half_widths_a[i], region.half_widths_b[j]);
            c2 += c * c;
            out.push(c);
        }
        pairs.push(out);
    }
    Ok((c2.sqrt(), pairs))
}

/// Outcome of the domain-of-validity checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityInfo {
    pub validity: Validity,
    /// `sigma |psi| / |d psi / d q_A,i|`; `None` stands for an unbounded width.
    pub a_max: Vec<Option<f64>>,
    pub b_max: Vec<Option<f64>>,
    pub epsilon_max: f64,
    /// Largest `a_i^2 |d^2 psi / d q_A,i^2| / (2 |psi|)` over both parties.
    pub curvature: f64,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn width_limit(sigma: f64, psi: f64, grad: f64) -> f64 {
    if psi == 0.0 {
        0.0
    } else if grad == 0.0 {
        f64::INFINITY
    } else {
        sigma * psi / grad
    }
}

struct Limits {
    a_max: Vec<f64>,
    b_max: Vec<f64>,
    curvature: f64,
}

fn limits_from_jets(jets: &[Vec<DerivativeJet>], region: &MeasurementRegion, sigma: f64) -> Limits {
    let psi = jets[0][0].get(0, 0).norm();
    let mut curvature: f64 = 0.0;
    let mut a_max = Vec::with_capacity(jets.len());
    for (i, row) in jets.iter().enumerate() {
        let j = &row[0];
        a_max.push(width_limit(sigma, psi, j.get(1, 0).norm()));
        if j.max_order >= 2 && psi > 0.0 {
            curvature = curvature.max(region.half_widths_a[i].powi(2) * j.get(2, 0).norm() / (2.0 * psi));
        }
    }
    let mut b_max = Vec::with_capacity(jets[0].len());
    for (k, j) in jets[0].iter().enumerate() {
        b_max.push(width_limit(sigma, psi, j.get(0, 1).norm()));
        if j.max_order >= 2 && psi > 0.0 {
            curvature = curvature.max(region.half_widths_b[k].powi(2) * j.get(0, 2).norm() / (2.0 * psi));
        }
    }
    Limits {
        a_max,
        b_max,
        curvature,
    }
}

/// `eps_MAX = sum_ij sigma^4 / 9`.
pub fn epsilon_max(dim_a: usize, dim_b: usize, sigma: f64) -> f64 {
    (dim_a * dim_b) as f64 * sigma.powi(4) / 9.0
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma < 1.0 {
        Ok(())
    } else {
        Err(Error::param("sigma", "must lie in (0, 1)"))
    }
}

fn classify(region: &MeasurementRegion, limits: &Limits, eps_formula: f64, sigma: f64, eps_max: f64) -> Validity {
    let near_node = region.half_widths_a.iter().zip(&limits.a_max).any(|(w, m)| w > m)
        || region.half_widths_b.iter().zip(&limits.b_max).any(|(w, m)| w > m);
    if near_node {
        Validity::NearNodeCutoff
    } else if !(eps_formula <= 0.5) || limits.curvature > sigma {
        Validity::InvalidRegionTooLarge
    } else if eps_formula > eps_max {
        // the largest value reachable inside the validity domain
        Validity::NearNodeCutoff
    } else {
        Validity::Valid
    }
}

/// Classifies the region: near a node (some width exceeds its limit), too
/// large for the expansion (`eps > 1/2` or the quadratic Taylor term is not
/// small against `psi`), or valid.
pub fn validity_and_cutoff(
    state: &(impl BipartiteState + ?Sized),
    region: &MeasurementRegion,
    sigma: f64,
) -> Result<ValidityInfo> {
    check_sigma(sigma)?;
    let jets = pair_jets(state, region, 2)?;
    let limits = limits_from_jets(&jets, region, sigma);
    let eps = pairs_raw(&jets, region).iter().flatten().sum::<f64>();
    let eps_max = epsilon_max(state.dim_a(), state.dim_b(), sigma);
    Ok(ValidityInfo {
        validity: classify(region, &limits, eps, sigma, eps_max),
        a_max: limits.a_max.iter().copied().map(finite).collect(),
        b_max: limits.b_max.iter().copied().map(finite).collect(),
        epsilon_max: eps_max,
        curvature: limits.curvature,
    })
}

/// Pair contributions that may be infinite or NaN at an exact node.
fn pairs_raw(jets: &[Vec<DerivativeJet>], region: &MeasurementRegion) -> Vec<Vec<f64>> {
    jets.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, jet)| {
                    let v = pair_epsilon(jet, region.half_widths_a[i], region.half_widths_b[j], EpsilonForm::ChighD);
                    if v.is_nan() {
                        f64::INFINITY
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportOptions {
    pub sigma: f64,
    /// Fill `p_ab` and `E_ND` by quadrature.
    pub with_probability: bool,
    pub with_lambda3: bool,
    /// Gauss-Legendre order per axis for `p_ab`; `None` picks the certified default.
    pub probability_order: Option<usize>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            sigma: DEFAULT_SIGMA,
            with_probability: false,
            with_lambda3: true,
            probability_order: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub epsilon: f64,
    /// Uncapped closed-form value; `None` when it diverges at a node.
    pub epsilon_formula: Option<f64>,
    pub lambda3: Option<f64>,
    /// `E_D = h(eps)` in bits.
    pub entropy_d: f64,
    pub p_ab: Option<f64>,
    pub entropy_nd: Option<f64>,
    pub concurrence: f64,
    pub negativity: f64,
    pub per_pair_concurrence: Vec<Vec<f64>>,
    pub validity: Validity,
    pub sigma_used: f64,
    pub a_max: Vec<Option<f64>>,
    pub b_max: Vec<Option<f64>>,
    pub epsilon_max: Option<f64>,
    pub alice_only: bool,
    pub exact_derivatives: bool,
}

/// Full report at one region. Alice-only regions use the traced marginal.
pub fn report(
    state: &(impl BipartiteState + ?Sized),
    region: &MeasurementRegion,
    opts: &ReportOptions,
) -> Result<EntanglementReport> {
    check_sigma(opts.sigma)?;
    region.check(state)?;
    if region.is_alice_only() {
        return report_alice_only(state, region, opts);
    }
    let sigma = opts.sigma;
    let jets = pair_jets(state, region, 2)?;
    let limits = limits_from_jets(&jets, region, sigma);
    let raw = pairs_raw(&jets, region);
    let eps_formula: f64 = raw.iter().flatten().sum();
    let eps_max = epsilon_max(state.dim_a(), state.dim_b(), sigma);
    let validity = classify(region, &limits, eps_formula, sigma, eps_max);

    let epsilon = if validity != Validity::Valid {
        if eps_formula.is_finite() {
            eps_formula.min(eps_max)
        } else {
            eps_max
        }
    } else {
        eps_formula
    };
    let per_pair_concurrence: Vec<Vec<f64>> = if eps_formula.is_finite() {
        let shrink = if eps_formula > 0.0 {
            (epsilon / eps_formula).sqrt()
        } else {
            1.0
        };
        raw.iter()
            .map(|row| row.iter().map(|e| 2.0 * e.sqrt() * shrink).collect())
            .collect()
    } else {
        let c = 2.0 * sigma * sigma / 3.0;
        raw.iter().map(|row| vec![c; row.len()]).collect()
    };
    let entropy_d = binary_entropy(epsilon.min(0.5))?;

    let lambda3 = if opts.with_lambda3 && validity != Validity::NearNodeCutoff {
        Some(lambda3_from_jets(&jets, region)?)
    } else {
        None
    };

    let (p_ab, entropy_nd) = if opts.with_probability {
        let p = oracle::probability_mass_order(state, region, opts.probability_order)?;
        let p_eff = if validity == Validity::NearNodeCutoff {
            let clipped = clipped_region(region, &limits);
            match clipped {
                Some(r) => oracle::probability_mass_order(state, &r, opts.probability_order)?,
                None => 0.0,
            }
        } else {
            p
        };
        (Some(p), Some(p_eff * entropy_d))
    } else {
        (None, None)
    };

    Ok(EntanglementReport {
        epsilon,
        epsilon_formula: finite(eps_formula),
        lambda3,
        entropy_d,
        p_ab,
        entropy_nd,
        concurrence: 2.0 * epsilon.sqrt(),
        negativity: epsilon.sqrt(),
        per_pair_concurrence,
        validity,
        sigma_used: sigma,
        a_max: limits.a_max.iter().copied().map(finite).collect(),
        b_max: limits.b_max.iter().copied().map(finite).collect(),
        epsilon_max: Some(eps_max),
        alice_only: false,
        exact_derivatives: jets[0][0].exact,
    })
}

/// The region shrunk to the largest valid widths; `None` if one of them is zero.
fn clipped_region(region: &MeasurementRegion, limits: &Limits) -> Option<MeasurementRegion> {
    let clip = |w: &[f64], m: &[f64]| -> Vec<f64> { w.iter().zip(m).map(|(w, m)| w.min(*m)).collect() };
    let a = clip(&region.half_widths_a, &limits.a_max);
    let b = clip(&region.half_widths_b, &limits.b_max);
    MeasurementRegion::new(region.center.clone(), a, b).ok()
}

fn report_alice_only(
    state: &(impl BipartiteState + ?Sized),
    region: &MeasurementRegion,
    opts: &ReportOptions,
) -> Result<EntanglementReport> {
    let sigma = opts.sigma;
    let mut l1 = 0.0;
    let mut l3 = 0.0;
    let mut a_max = Vec::new();
    let mut per_axis = Vec::new();
    for (i, &a) in region.half_widths_a.iter().enumerate() {
        let r = alice_rho_partials(state, &region.center.q_a, i)?;
        let (c1, c3) = alice::alice_axis_terms(&r, a)?;
        l1 += c1;
        l3 += c3;
        a_max.push(alice::alice_a_max(&r, sigma));
        per_axis.push(vec![2.0 * c1.max(0.0).sqrt()]);
    }
    let near_node = region.half_widths_a.iter().zip(&a_max).any(|(w, m)| w > m);
    let validity = if near_node {
        Validity::NearNodeCutoff
    } else if l1 > 0.5 {
        Validity::InvalidRegionTooLarge
    } else {
        Validity::Valid
    };
    let epsilon = l1.max(0.0);
    let entropy_d = binary_entropy(epsilon.min(0.5))?;
    let (p_ab, entropy_nd) = if opts.with_probability {
        let p = oracle::alice_probability(state, region)?;
        (Some(p), Some(p * entropy_d))
    } else {
        (None, None)
    };
    Ok(EntanglementReport {
        epsilon,
        epsilon_formula: Some(l1),
        lambda3: opts.with_lambda3.then_some(l3),
        entropy_d,
        p_ab,
        entropy_nd,
        concurrence: 2.0 * epsilon.sqrt(),
        negativity: epsilon.sqrt(),
        per_pair_concurrence: per_axis,
        validity,
        sigma_used: sigma,
        a_max: a_max.into_iter().map(finite).collect(),
        b_max: Vec::new(),
        epsilon_max: None,
        alice_only: true,
        exact_derivatives: state.exact_derivatives() || state.alice_marginal(&region.center.q_a, 0).is_some(),
    })
}

/// Reports over many regions in parallel; output order follows input order.
pub fn report_many(
    state: &(impl BipartiteState + ?Sized),
    regions: &[MeasurementRegion],
    opts: &ReportOptions,
) -> Vec<Result<EntanglementReport>> {
    regions.par_iter().map(|r| report(state, r, opts)).collect()
}
