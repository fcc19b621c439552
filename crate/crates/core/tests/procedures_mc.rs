use hart::model::{EffectLaw, MixtureModel, ScaleLaw, TestItem, TruthVector};
use hart::procedures::{az_auto, oracle_full, oracle_p, oracle_z};
use hart::sim::{average_power, generate_scenario, null_zvalues, ScenarioConfig};

fn toy_model() -> MixtureModel {
    MixtureModel::new(0.1, EffectLaw::PointMass(2.0), ScaleLaw::Uniform { lo: 0.5, hi: 4.0 })
}

fn toy_data() -> (Vec<TestItem>, TruthVector, Vec<f64>) {
    let cfg = ScenarioConfig::new(toy_model(), 200_000, 1, 77);
    let (items, truth) = generate_scenario(&cfg, 0).unwrap();
    let z = items.iter().map(|t| t.z).collect();
    (items, truth, z)
}

// Three binomial standard errors of a power estimate over the realized non-nulls.
fn within_3se(ap: f64, target: f64, truth: &TruthVector) -> bool {
    let n1 = truth.theta.iter().filter(|&&t| t).count() as f64;
    (ap - target).abs() <= 3.0 * (target * (1.0 - target) / n1).sqrt()
}

fn min_rejected(z: &[f64], reject: &[bool], abs: bool) -> f64 {
    z.iter()
        .zip(reject)
        .filter(|(_, &r)| r)
        .map(|(&v, _)| if abs { v.abs() } else { v })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn oracle_rules_on_the_toy_model() {
    let model = toy_model();
    let (items, truth, z) = toy_data();

    let full = oracle_full(&items, &model, 0.1).unwrap();
    let ap = average_power(&full, &truth);
    assert!(within_3se(ap, 0.105, &truth), "full-data oracle AP {ap}");

    let zr = oracle_z(&z, &model, 0.1).unwrap();
    let ap = average_power(&zr, &truth);
    assert!(within_3se(ap, 0.072, &truth), "z oracle AP {ap}");
    let t = min_rejected(&z, &zr.reject, false);
    assert!((t - 3.13).abs() < 0.03, "z oracle threshold {t}");

    let pr = oracle_p(&z, &model, 0.1).unwrap();
    let ap = average_power(&pr, &truth);
    assert!(within_3se(ap, 0.050, &truth), "p oracle AP {ap}");
    let t = min_rejected(&z, &pr.reject, true);
    assert!((t - 3.43).abs() < 0.03, "p oracle threshold {t}");
}

#[test]
fn oracles_reject_nothing_without_signal() {
    let model = MixtureModel::new(0.0, EffectLaw::Zero, ScaleLaw::Uniform { lo: 0.5, hi: 4.0 });
    let cfg = ScenarioConfig::new(model.clone(), 1000, 1, 3);
    let (items, _) = generate_scenario(&cfg, 0).unwrap();
    let z: Vec<f64> = items.iter().map(|t| t.z).collect();
    assert_eq!(oracle_full(&items, &model, 0.1).unwrap().k, 0);
    assert_eq!(oracle_z(&z, &model, 0.1).unwrap().k, 0);
    for alpha in [0.05, 0.5, 0.99] {
        assert_eq!(oracle_p(&z, &model, alpha).unwrap().k, 0);
    }
}

#[test]
fn az_is_quiet_under_the_null() {
    let quiet = (0..20u64)
        .filter(|&seed| az_auto(&null_zvalues(2000, 1.0, 500 + seed), 0.1, 1.0, 0.5).unwrap().k == 0)
        .count();
    assert!(quiet >= 18, "{quiet} of 20 seeds without rejections");
}
