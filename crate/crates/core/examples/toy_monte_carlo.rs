//! Draws the illustrative model and applies the three fixed oracle rules,
//! comparing simulated and closed-form average power.

use hart::model::{EffectLaw, MixtureModel, ScaleLaw};
use hart::oracle_calc::{toy_oracle_report, ToyModel};
use hart::sim::{generate_scenario, ScenarioConfig};

fn main() -> hart::Result<()> {
    let m: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200_000);
    let toy = ToyModel::illustrative();
    let r = toy_oracle_report(&toy)?;
    let model = MixtureModel::new(toy.pi, EffectLaw::PointMass(toy.mu_a), ScaleLaw::Uniform { lo: toy.sigma_lo, hi: toy.sigma_hi });
    let (items, truth) = generate_scenario(&ScenarioConfig::new(model, m, 1, 7), 0)?;

    let alt: Vec<_> = items.iter().zip(&truth.theta).filter(|(_, &t)| t).map(|(i, _)| *i).collect();
    let n1 = alt.len() as f64;
    let share = |hit: &dyn Fn(f64, f64) -> bool| alt.iter().filter(|t| hit(t.z, t.sigma)).count() as f64 / n1;
    println!("m = {m}, non-nulls = {n1}");
    for (name, exact, sim) in [
        ("p-value rule", r.ap_p, share(&|z, _| z.abs() >= r.t_p)),
        ("z-value rule", r.ap_z, share(&|z, _| z >= r.t_z)),
        ("full-data rule", r.ap_full, share(&|z, s| z >= toy.full_rule_z_cutoff(r.lambda_star, s))),
    ] {
        let se = (exact * (1.0 - exact) / n1).sqrt();
        println!("{name:<15} closed form {exact:.4}  simulated {sim:.4}  ({:+.2} se)", (sim - exact) / se);
    }
    Ok(())
}
