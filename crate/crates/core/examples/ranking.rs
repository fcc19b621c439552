//! Compares estimated HART statistics with the exact posterior null
//! probabilities of the generating model as the number of tests grows.

use hart::estimation::{estimate_tstats, EstimationOptions};
use hart::model::true_lfdr_full;
use hart::sim::{generate_scenario, presets};

fn main() -> hart::Result<()> {
    for m in [500, 2000, 8000] {
        let cfg = presets::uniform_scale(m, 1);
        let (items, _) = generate_scenario(&cfg, 0)?;
        let fit = estimate_tstats(&items, &EstimationOptions::default())?;
        let mut err = 0.0;
        for (t, &est) in items.iter().zip(&fit.tstats.t) {
            err += (est - true_lfdr_full(t.x, t.sigma, &cfg.model)?).abs();
        }
        println!(
            "m {m:>5}: pi_hat {:.4}, h_x {:.3}, h_sigma {:.3}, mean |T_hat - T| {:.4}",
            fit.pi_hat(),
            fit.tstats.bandwidths.h_x,
            fit.tstats.bandwidths.h_sigma,
            err / m as f64
        );
    }
    Ok(())
}
