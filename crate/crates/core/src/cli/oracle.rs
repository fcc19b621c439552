use super::format::fmt_g6;
use super::OracleArgs;
use crate::error::{HartError, Result};
use crate::oracle_calc::{toy_oracle_report, ToyModel, ToyOracleReport};

const COLUMNS: [&str; 8] = ["t_p", "p_cut", "t_z", "lfdr_cut", "lambda_star", "ap_p", "ap_z", "ap_full"];

fn values(r: &ToyOracleReport) -> [f64; 8] {
    [r.t_p, r.p_cut, r.t_z, r.lfdr_cut_z, r.lambda_star, r.ap_p, r.ap_z, r.ap_full]
}

pub(super) fn cmd_oracle(a: &OracleArgs) -> Result<()> {
    let model = ToyModel { pi: a.pi, mu_a: a.mu, sigma_lo: a.sigma_lo, sigma_hi: a.sigma_hi, alpha: a.alpha };
    model.validate().map_err(|e| match e {
        HartError::Domain(m) => HartError::Config(m),
        other => other,
    })?;
    let report = toy_oracle_report(&model)?;
    let vals = values(&report);
    for (name, v) in COLUMNS.iter().zip(vals) {
        println!("{name:<12} {}", fmt_g6(v));
    }
    if let Some(path) = &a.out {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(COLUMNS)?;
        w.write_record(vals.iter().map(|&v| fmt_g6(v)))?;
        w.flush()?;
    }
    Ok(())
}
