use std::fs;

use super::format::{fmt_g6, fmt_opt};
use super::SimulateArgs;
use crate::error::Result;
use crate::sim::{run_experiment, RunSummary, ScenarioConfig};

pub(super) fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let text = fs::read_to_string(&a.config)?;
    let mut cfg = ScenarioConfig::parse(&text)?;
    if a.full_scale {
        cfg.m = 20_000;
        cfg.reps = 100;
    }
    if let Some(r) = a.reps {
        cfg.reps = r;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    let summary = run_experiment(&cfg)?;
    for d in &summary.diagnostics {
        eprintln!("note: {d}");
    }
    fs::create_dir_all(&a.out)?;
    write_summary(&summary, &a.out.join("summary.csv"))?;
    write_reps(&summary, &a.out.join("reps.csv"))?;
    println!(
        "{:<9}{:>10}{:>10}{:>10}{:>10}{:>12}{:>10}",
        "procedure", "fdr", "fdr_se", "ap", "ap_se", "rejections", "mfdr"
    );
    for s in &summary.procedures {
        println!(
            "{:<9}{:>10}{:>10}{:>10}{:>10}{:>12}{:>10}",
            s.procedure.tag(),
            fmt_g6(s.fdr),
            fmt_g6(s.fdr_se),
            fmt_g6(s.ap),
            fmt_g6(s.ap_se),
            fmt_g6(s.mean_rejections),
            fmt_g6(s.mfdr)
        );
    }
    Ok(())
}

pub(crate) fn write_summary(s: &RunSummary, path: &std::path::Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["procedure", "fdr", "fdr_se", "ap", "ap_se", "mean_rejections", "mfdr"])?;
    for p in &s.procedures {
        w.write_record([
            p.procedure.tag().to_string(),
            fmt_g6(p.fdr),
            fmt_g6(p.fdr_se),
            fmt_g6(p.ap),
            fmt_g6(p.ap_se),
            fmt_g6(p.mean_rejections),
            fmt_g6(p.mfdr),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn write_reps(s: &RunSummary, path: &std::path::Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "rep",
        "procedure",
        "fdp",
        "power",
        "rejections",
        "false_rejections",
        "true_rejections",
        "non_nulls",
        "sigma0",
        "cutoff_a",
        "cutoff_b",
        "fitted_cutoff_a",
        "fitted_cutoff_b",
    ])?;
    for r in &s.records {
        let c = r.cutoffs.unwrap_or_default();
        w.write_record([
            r.rep.to_string(),
            r.procedure.tag().to_string(),
            fmt_g6(r.fdp),
            fmt_g6(r.power),
            r.rejections.to_string(),
            r.false_rejections.to_string(),
            r.true_rejections.to_string(),
            r.non_nulls.to_string(),
            fmt_g6(r.sigma0),
            fmt_opt(c.realized_a),
            fmt_opt(c.realized_b),
            fmt_opt(c.fitted_a),
            fmt_opt(c.fitted_b),
        ])?;
    }
    w.flush()?;
    Ok(())
}
