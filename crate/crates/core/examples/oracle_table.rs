//! Closed-form oracle thresholds and average powers of the point-mass,
//! uniform-scale model for a few signal strengths and sparsity levels.

use hart::oracle_calc::{toy_oracle_report, ToyModel};

fn main() -> hart::Result<()> {
    println!("{:>5} {:>5} {:>7} {:>9} {:>7} {:>8} {:>7} {:>7} {:>7} {:>7}", "pi", "mu", "t_p", "p_cut", "t_z", "lfdr", "lambda", "ap_p", "ap_z", "ap_full");
    for (pi, mu) in [(0.1, 2.0), (0.05, 2.0), (0.2, 2.0), (0.1, 3.0), (0.1, 1.5)] {
        let model = ToyModel { pi, mu_a: mu, ..ToyModel::illustrative() };
        let r = toy_oracle_report(&model)?;
        println!(
            "{pi:>5} {mu:>5} {:>7.3} {:>9.2e} {:>7.3} {:>8.3} {:>7.3} {:>7.4} {:>7.4} {:>7.4}",
            r.t_p, r.p_cut, r.t_z, r.lfdr_cut_z, r.lambda_star, r.ap_p, r.ap_z, r.ap_full
        );
    }
    Ok(())
}
