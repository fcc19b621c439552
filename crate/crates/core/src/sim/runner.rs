use rayon::prelude::*;

use super::config::{NullMode, ScenarioConfig};
use super::generate::generate_scenario;
use super::metrics::Confusion;
use crate::error::Result;
use crate::estimation::{empirical_null, EstimationOptions};
use crate::model::{ScaleLaw, TestItem, TruthVector};
use crate::procedures::{az_auto, bh, hart_with_fit, oracle_full, oracle_p, oracle_z, pvalue_from_z, DecisionSet, Procedure};

/// Largest z scanned when locating fitted cutoffs.
const CUTOFF_Z_MAX: f64 = 15.0;

/// Within-group z cutoffs for the two-value scale law.
///
/// `realized_*` is the smallest positive z rejected in the group.
/// `fitted_*` (HART only) is where the fitted statistic at the group's `σ`
/// first falls to the realized step-up threshold. `None` means no
/// rejection, or a fitted statistic that never gets there.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GroupCutoffs {
    pub realized_a: Option<f64>,
    pub realized_b: Option<f64>,
    pub fitted_a: Option<f64>,
    pub fitted_b: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepRecord {
    pub rep: usize,
    pub procedure: Procedure,
    pub fdp: f64,
    pub power: f64,
    pub rejections: usize,
    pub false_rejections: usize,
    pub true_rejections: usize,
    pub non_nulls: usize,
    /// Null scale used by the data-driven procedures in this rep.
    pub sigma0: f64,
    pub cutoffs: Option<GroupCutoffs>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcedureSummary {
    pub procedure: Procedure,
    /// Mean FDP.
    pub fdr: f64,
    pub fdr_se: f64,
    /// Mean power.
    pub ap: f64,
    pub ap_se: f64,
    pub mean_rejections: f64,
    /// Mean false rejections over mean rejections.
    pub mfdr: f64,
    /// Mean number of true rejections.
    pub etp: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub config: ScenarioConfig,
    pub procedures: Vec<ProcedureSummary>,
    /// Ordered by rep, then by the configured procedure order.
    pub records: Vec<RepRecord>,
    pub diagnostics: Vec<String>,
}

impl RunSummary {
    pub fn get(&self, procedure: Procedure) -> Option<&ProcedureSummary> {
        self.procedures.iter().find(|s| s.procedure == procedure)
    }

    pub fn records_for(&self, procedure: Procedure) -> impl Iterator<Item = &RepRecord> + '_ {
        self.records.iter().filter(move |r| r.procedure == procedure)
    }
}

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn summarize(procedure: Procedure, recs: &[&RepRecord]) -> ProcedureSummary {
    let fdp: Vec<f64> = recs.iter().map(|r| r.fdp).collect();
    let pow: Vec<f64> = recs.iter().map(|r| r.power).collect();
    let (fdr, fdr_se) = mean_se(&fdp);
    let (ap, ap_se) = mean_se(&pow);
    let n = recs.len() as f64;
    let mean_rejections = recs.iter().map(|r| r.rejections as f64).sum::<f64>() / n;
    let mean_false = recs.iter().map(|r| r.false_rejections as f64).sum::<f64>() / n;
    let etp = recs.iter().map(|r| r.true_rejections as f64).sum::<f64>() / n;
    let mfdr = if mean_rejections > 0.0 { mean_false / mean_rejections } else { 0.0 };
    ProcedureSummary { procedure, fdr, fdr_se, ap, ap_se, mean_rejections, mfdr, etp }
}

fn realized_cutoff(items: &[TestItem], truth: &TruthVector, d: &DecisionSet, sigma_g: f64) -> Option<f64> {
    d.rejected_indices()
        .filter(|&i| truth.sigma[i] == sigma_g && items[i].z > 0.0)
        .map(|i| items[i].z)
        .min_by(f64::total_cmp)
}

fn run_rep(cfg: &ScenarioConfig, rep: usize) -> Result<Vec<RepRecord>> {
    let (items, truth) = generate_scenario(cfg, rep)?;
    let z: Vec<f64> = items.iter().map(|t| t.z).collect();
    let sigma0 = match cfg.null_mode {
        NullMode::Theoretical => 1.0,
        NullMode::Empirical { coverage } => empirical_null(&z, coverage)?.sigma0,
    };
    let opts = EstimationOptions { lambda: cfg.lambda, jackknife: cfg.jackknife, null_scale: sigma0, ..Default::default() };
    let groups = match cfg.model.scale {
        ScaleLaw::TwoValues { sigma_a, sigma_b, .. } => Some((sigma_a, sigma_b)),
        _ => None,
    };

    let mut out = Vec::with_capacity(cfg.procedures.len());
    for &procedure in &cfg.procedures {
        let mut fitted = None;
        let d = match procedure {
            Procedure::Hart => {
                let (d, fit) = hart_with_fit(&items, cfg.alpha, &opts)?;
                if let (Some((sa, sb)), Some(t)) = (groups, d.threshold) {
                    fitted = Some((fit.z_cutoff(sa, t, CUTOFF_Z_MAX)?, fit.z_cutoff(sb, t, CUTOFF_Z_MAX)?));
                }
                d
            }
            Procedure::Bh => {
                let p: Vec<f64> = z.iter().map(|&v| pvalue_from_z(v, sigma0)).collect::<Result<_>>()?;
                bh(&p, cfg.alpha)?
            }
            Procedure::Az => az_auto(&z, cfg.alpha, sigma0, cfg.lambda)?,
            Procedure::OrFull => oracle_full(&items, &cfg.model, cfg.alpha)?,
            Procedure::OrZ => oracle_z(&z, &cfg.model, cfg.alpha)?,
            Procedure::OrP => oracle_p(&z, &cfg.model, cfg.alpha)?,
        };
        let c = Confusion::from_slices(&d.reject, &truth.theta);
        let cutoffs = groups.map(|(sa, sb)| GroupCutoffs {
            realized_a: realized_cutoff(&items, &truth, &d, sa),
            realized_b: realized_cutoff(&items, &truth, &d, sb),
            fitted_a: fitted.and_then(|f| f.0),
            fitted_b: fitted.and_then(|f| f.1),
        });
        out.push(RepRecord {
            rep,
            procedure,
            fdp: c.fdp(),
            power: c.power(),
            rejections: c.rejections,
            false_rejections: c.false_rejections,
            true_rejections: c.true_rejections,
            non_nulls: c.non_nulls,
            sigma0,
            cutoffs,
        });
    }
    Ok(out)
}

/// Runs every rep and aggregates per procedure. Reps run in parallel on
/// disjoint random streams; results are reduced in rep order, so the
/// summary depends only on the configuration.
pub fn run_experiment(cfg: &ScenarioConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let mut diagnostics = Vec::new();
    if cfg.dependence != super::config::Dependence::Independent && cfg.block_size() < super::config::FULL_BLOCK {
        diagnostics.push(format!(
            "correlated block scaled down to {} coordinates (m = {})",
            cfg.block_size(),
            cfg.m
        ));
    }
    let per_rep: Vec<Vec<RepRecord>> = (0..cfg.reps).into_par_iter().map(|r| run_rep(cfg, r)).collect::<Result<_>>()?;
    let records: Vec<RepRecord> = per_rep.into_iter().flatten().collect();
    let procedures = cfg
        .procedures
        .iter()
        .map(|&p| {
            let recs: Vec<&RepRecord> = records.iter().filter(|r| r.procedure == p).collect();
            summarize(p, &recs)
        })
        .collect();
    Ok(RunSummary { config: cfg.clone(), procedures, records, diagnostics })
}
