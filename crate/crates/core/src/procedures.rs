//! Thresholding procedures.
//!
//! Every ranking rule here ends in the same step-up search: sort the
//! statistics, find the largest `k` whose running criterion still holds, and
//! reject the `k` smallest. Ties are ordered by original index.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{domain, HartError, Result};
use crate::estimation::{estimate_tstats, silverman_1d, storey_pi, univariate_kde, EstimationOptions, HartFit};
use crate::model::{true_lfdr_full, true_lfdr_z, MixtureModel, Noise, TestItem};
use crate::numeric::{normal_pdf, std_normal_sf};
use crate::oracle_calc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Procedure {
    Hart,
    Bh,
    Az,
    OrFull,
    OrZ,
    OrP,
}

impl Procedure {
    pub const ALL: [Procedure; 6] = [
        Procedure::Hart,
        Procedure::Bh,
        Procedure::Az,
        Procedure::OrFull,
        Procedure::OrZ,
        Procedure::OrP,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Procedure::Hart => "hart",
            Procedure::Bh => "bh",
            Procedure::Az => "az",
            Procedure::OrFull => "or-full",
            Procedure::OrZ => "or-z",
            Procedure::OrP => "or-p",
        }
    }

    pub fn is_oracle(self) -> bool {
        matches!(self, Procedure::OrFull | Procedure::OrZ | Procedure::OrP)
    }
}

impl fmt::Display for Procedure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Procedure {
    type Err = HartError;

    fn from_str(s: &str) -> Result<Self> {
        Procedure::ALL
            .into_iter()
            .find(|p| p.tag() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| HartError::Config(format!("unknown procedure `{s}`")))
    }
}

/// Rejection vector plus the realized cutoff on the procedure's own statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionSet {
    pub reject: Vec<bool>,
    pub k: usize,
    /// Largest rejected statistic for step-up rules, the `|z|` cutoff for
    /// the fixed p-value oracle; `None` when nothing is rejected.
    pub threshold: Option<f64>,
    pub procedure: Procedure,
    pub alpha: f64,
}

impl DecisionSet {
    fn empty(m: usize, procedure: Procedure, alpha: f64) -> Self {
        Self { reject: vec![false; m], k: 0, threshold: None, procedure, alpha }
    }

    pub fn rejected_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.reject.iter().enumerate().filter(|(_, &r)| r).map(|(i, _)| i)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    Ok(())
}

fn sorted_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    order
}

fn reject_first(order: &[usize], k: usize, values: &[f64], procedure: Procedure, alpha: f64) -> DecisionSet {
    let mut reject = vec![false; values.len()];
    for &i in &order[..k] {
        reject[i] = true;
    }
    let threshold = (k > 0).then(|| values[order[k - 1]]);
    DecisionSet { reject, k, threshold, procedure, alpha }
}

/// Cumulative-mean step-up on posterior null probabilities:
/// `k = max{j : (1/j) Σ_{i≤j} T_(i) ≤ α}`.
pub fn step_up(tstats: &[f64], alpha: f64) -> Result<DecisionSet> {
    step_up_tagged(tstats, alpha, Procedure::Hart)
}

pub(crate) fn step_up_tagged(tstats: &[f64], alpha: f64, procedure: Procedure) -> Result<DecisionSet> {
    check_alpha(alpha)?;
    if let Some(bad) = tstats.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return domain(format!("statistics must lie in [0, 1], found {bad}"));
    }
    if tstats.is_empty() {
        return Ok(DecisionSet::empty(0, procedure, alpha));
    }
    let order = sorted_order(tstats);
    let mut sum = 0.0;
    let mut k = 0;
    for (j, &i) in order.iter().enumerate() {
        sum += tstats[i];
        if sum / (j + 1) as f64 <= alpha {
            k = j + 1;
        }
    }
    Ok(reject_first(&order, k, tstats, procedure, alpha))
}

/// Benjamini–Hochberg: `k = max{j : p_(j) ≤ j α / m}`.
pub fn bh(pvalues: &[f64], alpha: f64) -> Result<DecisionSet> {
    check_alpha(alpha)?;
    if let Some(bad) = pvalues.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return domain(format!("p-values must lie in [0, 1], found {bad}"));
    }
    let m = pvalues.len();
    if m == 0 {
        return Ok(DecisionSet::empty(0, Procedure::Bh, alpha));
    }
    let order = sorted_order(pvalues);
    let k = order
        .iter()
        .enumerate()
        .filter(|(j, &i)| pvalues[i] <= (j + 1) as f64 * alpha / m as f64)
        .map(|(j, _)| j + 1)
        .max()
        .unwrap_or(0);
    Ok(reject_first(&order, k, pvalues, Procedure::Bh, alpha))
}

/// Two-sided p-value `2 Φ(-|z| / σ0)`.
pub fn pvalue_from_z(z: f64, sigma0: f64) -> Result<f64> {
    if !(sigma0 > 0.0) {
        return domain(format!("null scale must be positive, got {sigma0}"));
    }
    Ok((2.0 * std_normal_sf(z.abs() / sigma0)).min(1.0))
}

/// Adaptive z-value rule: kernel estimate of the z-value density, local fdr
/// `min{(1 - π̂) φ_{σ0}(z) / f̂(z), 1}`, then step-up.
pub fn az(zvalues: &[f64], alpha: f64, pi_hat: f64, sigma0: f64, h: f64) -> Result<DecisionSet> {
    check_alpha(alpha)?;
    if zvalues.len() < 10 {
        return Err(HartError::InsufficientData(format!(
            "adaptive z-value rule needs at least 10 values, got {}",
            zvalues.len()
        )));
    }
    if !(sigma0 > 0.0) {
        return domain(format!("null scale must be positive, got {sigma0}"));
    }
    let lfdr = az_statistics(zvalues, pi_hat, sigma0, h)?;
    step_up_tagged(&lfdr, alpha, Procedure::Az)
}

pub fn az_statistics(zvalues: &[f64], pi_hat: f64, sigma0: f64, h: f64) -> Result<Vec<f64>> {
    zvalues
        .par_iter()
        .map(|&z| {
            let f = univariate_kde(z, zvalues, h)?;
            let f0 = (1.0 - pi_hat) * normal_pdf(z, sigma0);
            Ok(if f > 0.0 { (f0 / f).clamp(0.0, 1.0) } else { 1.0 })
        })
        .collect()
}

/// `az` with Storey's proportion (threshold `lambda`) and a Silverman
/// bandwidth on the z-values.
pub fn az_auto(zvalues: &[f64], alpha: f64, sigma0: f64, lambda: f64) -> Result<DecisionSet> {
    let p: Vec<f64> = zvalues.iter().map(|&z| pvalue_from_z(z, sigma0)).collect::<Result<_>>()?;
    let pi_hat = storey_pi(&p, lambda)?;
    let (h, _) = silverman_1d(zvalues);
    az(zvalues, alpha, pi_hat, sigma0, h)
}

/// Data-driven HART: estimated statistics followed by the cumulative-mean
/// step-up. Items removed by the σ filter are never rejected.
pub fn hart(data: &[TestItem], alpha: f64, opts: &EstimationOptions) -> Result<DecisionSet> {
    hart_with_fit(data, alpha, opts).map(|(d, _)| d)
}

pub fn hart_with_fit(data: &[TestItem], alpha: f64, opts: &EstimationOptions) -> Result<(DecisionSet, HartFit)> {
    check_alpha(alpha)?;
    let fit = estimate_tstats(data, opts)?;
    let inner = step_up_tagged(&fit.tstats.t, alpha, Procedure::Hart)?;
    let mut reject = vec![false; data.len()];
    for (k, &i) in fit.retained.iter().enumerate() {
        reject[i] = inner.reject[k];
    }
    let decisions = DecisionSet { reject, k: inner.k, threshold: inner.threshold, procedure: Procedure::Hart, alpha };
    Ok((decisions, fit))
}

fn require_gaussian(model: &MixtureModel) -> Result<()> {
    model.validate()?;
    if model.noise != Noise::Gaussian {
        return domain("oracle procedures are defined only for Gaussian noise");
    }
    Ok(())
}

/// Step-up on the exact full-data posterior null probabilities.
pub fn oracle_full(data: &[TestItem], model: &MixtureModel, alpha: f64) -> Result<DecisionSet> {
    require_gaussian(model)?;
    let t: Vec<f64> = data
        .par_iter()
        .map(|it| true_lfdr_full(it.x, it.sigma, model))
        .collect::<Result<_>>()?;
    step_up_tagged(&t, alpha, Procedure::OrFull)
}

/// Step-up on the exact z-value local fdr.
pub fn oracle_z(zvalues: &[f64], model: &MixtureModel, alpha: f64) -> Result<DecisionSet> {
    require_gaussian(model)?;
    let lfdr: Vec<f64> = zvalues
        .par_iter()
        .map(|&z| true_lfdr_z(z, model))
        .collect::<Result<_>>()?;
    step_up_tagged(&lfdr, alpha, Procedure::OrZ)
}

/// Fixed two-sided rule `|z| ≥ t_p` with the oracle p-value threshold.
pub fn oracle_p(zvalues: &[f64], model: &MixtureModel, alpha: f64) -> Result<DecisionSet> {
    require_gaussian(model)?;
    check_alpha(alpha)?;
    if model.pi == 0.0 {
        return Ok(DecisionSet::empty(zvalues.len(), Procedure::OrP, alpha));
    }
    let t_p = oracle_calc::p_threshold(model, alpha)?;
    let reject: Vec<bool> = zvalues.iter().map(|z| z.abs() >= t_p).collect();
    let k = reject.iter().filter(|&&r| r).count();
    Ok(DecisionSet { reject, k, threshold: Some(t_p), procedure: Procedure::OrP, alpha })
}
