//! Library-level analysis of a CSV of (x, sigma[, theta]) rows: fit the
//! HART statistics, run the three data-driven procedures and report
//! rejections. Usage: `analyze_csv [path]`.

use std::path::PathBuf;

use hart::cli::read_analysis_input;
use hart::estimation::EstimationOptions;
use hart::model::TestItem;
use hart::procedures::{az_auto, bh, hart_with_fit, pvalue_from_z};
use hart::sim::Confusion;

fn main() -> hart::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic_expression.csv"));
    let input = read_analysis_input(&path)?;
    let items: Vec<TestItem> = input.rows.iter().map(|r| TestItem::new(r.x, r.sigma)).collect::<hart::Result<_>>()?;
    let z: Vec<f64> = items.iter().map(|t| t.z).collect();
    let p: Vec<f64> = z.iter().map(|&v| pvalue_from_z(v, 1.0)).collect::<hart::Result<_>>()?;

    let (d_hart, fit) = hart_with_fit(&items, 0.1, &EstimationOptions::default())?;
    println!(
        "{} rows; pi_hat {:.4}; bandwidths h_x {:.3} h_sigma {:.3}",
        items.len(),
        fit.pi_hat(),
        fit.tstats.bandwidths.h_x,
        fit.tstats.bandwidths.h_sigma
    );
    let theta: Option<Vec<bool>> = input.has_theta().then(|| input.rows.iter().map(|r| r.theta == Some(true)).collect());
    for d in [d_hart, bh(&p, 0.1)?, az_auto(&z, 0.1, 1.0, 0.5)?] {
        print!("{:<5} {:>5} rejections", d.procedure.tag(), d.k);
        if let Some(t) = &theta {
            let c = Confusion::from_slices(&d.reject, t);
            print!("  fdp {:.3}  power {:.3}", c.fdp(), c.power());
        }
        println!();
    }
    Ok(())
}
