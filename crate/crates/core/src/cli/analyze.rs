use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use super::format::{fmt_g6, fmt_opt};
use super::{AnalyzeArgs, NullArg, Switch};
use crate::error::{HartError, Result};
use crate::estimation::{empirical_null, EstimationOptions};
use crate::model::TestItem;
use crate::procedures::{az_auto, bh, hart_with_fit, pvalue_from_z, DecisionSet, Procedure};
use crate::sim::Confusion;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputRow {
    pub x: f64,
    pub sigma: f64,
    pub theta: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisInput {
    pub source: PathBuf,
    pub rows: Vec<InputRow>,
}

impl AnalysisInput {
    pub fn has_theta(&self) -> bool {
        self.rows.first().is_some_and(|r| r.theta.is_some())
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> HartError {
    HartError::Parse { line, message: message.into() }
}

/// Reads a CSV with a header naming `x` and `sigma` and optionally `theta`.
/// Other columns are ignored, so an analysis output can be read back.
pub fn read_analysis_input(path: &Path) -> Result<AnalysisInput> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (ix, is) = match (col("x"), col("sigma")) {
        (Some(ix), Some(is)) => (ix, is),
        _ => return Err(parse_err(1, "header must name the columns `x` and `sigma`")),
    };
    let it = col("theta");
    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| parse_err(line, e.to_string()))?;
        let field = |i: usize, name: &str| -> Result<f64> {
            let raw = rec.get(i).ok_or_else(|| parse_err(line, format!("missing `{name}`")))?;
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(line, format!("`{name}` is not a finite number: `{raw}`")))
        };
        let x = field(ix, "x")?;
        let sigma = field(is, "sigma")?;
        if sigma <= 0.0 {
            return Err(parse_err(line, format!("sigma must be positive, got {sigma}")));
        }
        let theta = match it {
            None => None,
            Some(i) => match rec.get(i).unwrap_or("") {
                "0" => Some(false),
                "1" => Some(true),
                other => return Err(parse_err(line, format!("theta must be 0 or 1, got `{other}`"))),
            },
        };
        rows.push(InputRow { x, sigma, theta });
    }
    if rows.is_empty() {
        return Err(HartError::InsufficientData("input has no data rows".into()));
    }
    Ok(AnalysisInput { source: path.to_path_buf(), rows })
}

fn parse_procedures(list: &str) -> Result<Vec<Procedure>> {
    let procs: Vec<Procedure> = list.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect::<Result<_>>()?;
    if procs.is_empty() {
        return Err(HartError::Config("no procedures requested".into()));
    }
    if let Some(p) = procs.iter().find(|p| p.is_oracle()) {
        return Err(HartError::Config(format!("procedure {p} needs the true model; use `simulate`")));
    }
    let mut seen = procs.clone();
    seen.sort_by_key(|p| p.tag());
    seen.dedup();
    if seen.len() != procs.len() {
        return Err(HartError::Config("procedure list has duplicates".into()));
    }
    Ok(procs)
}

pub(super) fn cmd_analyze(a: &AnalyzeArgs) -> Result<()> {
    let procs = parse_procedures(&a.procedures)?;
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(HartError::Config(format!("alpha must lie in (0, 1), got {}", a.alpha)));
    }
    if let Some(cap) = a.sigma_cap {
        if !(cap > 0.0) {
            return Err(HartError::Config(format!("sigma cap must be positive, got {cap}")));
        }
    }
    let input = read_analysis_input(&a.input)?;
    let items: Vec<TestItem> = input.rows.iter().map(|r| TestItem::new(r.x, r.sigma)).collect::<Result<_>>()?;
    let m = items.len();

    let kept: Vec<usize> = (0..m).filter(|&i| a.sigma_cap.is_none_or(|c| items[i].sigma < c)).collect();
    let kept_items: Vec<TestItem> = kept.iter().map(|&i| items[i]).collect();
    let kept_z: Vec<f64> = kept_items.iter().map(|t| t.z).collect();
    let sigma0 = match a.null {
        NullArg::Theoretical => 1.0,
        NullArg::Empirical => empirical_null(&kept_z, a.coverage)?.sigma0,
    };
    let p: Vec<f64> = items.iter().map(|t| pvalue_from_z(t.z, sigma0)).collect::<Result<_>>()?;

    let opts = EstimationOptions {
        lambda: a.lambda,
        jackknife: a.jackknife == Switch::On,
        null_scale: sigma0,
        ..Default::default()
    };
    let mut t_hat: Vec<Option<f64>> = vec![None; m];
    let mut decisions: Vec<(Procedure, Vec<bool>)> = Vec::new();
    for &proc in &procs {
        let d: DecisionSet = match proc {
            Procedure::Hart => {
                let (d, fit) = hart_with_fit(&kept_items, a.alpha, &opts)?;
                for (k, t) in fit.t_by_input().into_iter().enumerate() {
                    t_hat[kept[k]] = t;
                }
                d
            }
            Procedure::Bh => {
                let kp: Vec<f64> = kept.iter().map(|&i| p[i]).collect();
                bh(&kp, a.alpha)?
            }
            Procedure::Az => az_auto(&kept_z, a.alpha, sigma0, a.lambda)?,
            _ => unreachable!("oracles are rejected above"),
        };
        let mut full = vec![false; m];
        for (k, &i) in kept.iter().enumerate() {
            full[i] = d.reject[k];
        }
        decisions.push((proc, full));
    }

    let mut w = csv::Writer::from_path(&a.out)?;
    let mut header: Vec<String> = ["x", "sigma", "z", "p", "t_hat"].iter().map(|s| s.to_string()).collect();
    header.extend(decisions.iter().map(|(p, _)| format!("reject_{}", p.tag())));
    w.write_record(&header)?;
    for i in 0..m {
        let mut rec = vec![
            // Inputs are echoed at full precision so the file reads back to the same items.
            format!("{}", items[i].x),
            format!("{}", items[i].sigma),
            fmt_g6(items[i].z),
            fmt_g6(p[i]),
            fmt_opt(t_hat[i]),
        ];
        rec.extend(decisions.iter().map(|(_, r)| if r[i] { "1".to_string() } else { "0".to_string() }));
        w.write_record(&rec)?;
    }
    w.flush()?;

    println!("rows {m}, analyzed {}, null sd {}", kept.len(), fmt_g6(sigma0));
    let theta: Option<Vec<bool>> = input.has_theta().then(|| input.rows.iter().map(|r| r.theta == Some(true)).collect());
    match &theta {
        Some(_) => println!("{:<10}{:>12}{:>10}{:>10}", "procedure", "rejections", "fdp", "power"),
        None => println!("{:<10}{:>12}", "procedure", "rejections"),
    }
    for (proc, rej) in &decisions {
        let k = rej.iter().filter(|&&r| r).count();
        match &theta {
            Some(t) => {
                let c = Confusion::from_slices(rej, t);
                println!("{:<10}{:>12}{:>10}{:>10}", proc.tag(), k, fmt_g6(c.fdp()), fmt_g6(c.power()));
            }
            None => println!("{:<10}{:>12}", proc.tag(), k),
        }
    }
    Ok(())
}
