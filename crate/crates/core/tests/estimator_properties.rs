use hart::estimation::{estimate_tstats, Bandwidths, EstimationOptions};
use hart::model::{true_lfdr_full, EffectLaw, TestItem};
use hart::sim::{generate_scenario, presets};

fn kendall_tau_b(a: &[f64], b: &[f64]) -> f64 {
    let (mut conc, mut disc, mut ties_a, mut ties_b) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            let da = (a[i] - a[j]).partial_cmp(&0.0).unwrap() as i64;
            let db = (b[i] - b[j]).partial_cmp(&0.0).unwrap() as i64;
            match (da, db) {
                (0, 0) => {}
                (0, _) => ties_a += 1,
                (_, 0) => ties_b += 1,
                _ if da == db => conc += 1,
                _ => disc += 1,
            }
        }
    }
    let n1 = (conc + disc + ties_a) as f64;
    let n2 = (conc + disc + ties_b) as f64;
    (conc - disc) as f64 / (n1 * n2).sqrt()
}

#[test]
fn pure_null_statistics_stay_high() {
    let mut cfg = presets::uniform_scale(2000, 1);
    cfg.model.pi = 0.0;
    cfg.model.effect = EffectLaw::Zero;
    for seed in 0..20 {
        cfg.seed = 1000 + seed;
        let (items, _) = generate_scenario(&cfg, 0).unwrap();
        let fit = estimate_tstats(&items, &EstimationOptions::default()).unwrap();
        let mut t = fit.tstats.t.clone();
        t.sort_by(f64::total_cmp);
        let median = t[t.len() / 2];
        assert!(median > 0.8, "seed {seed}: median {median}");
    }
}

#[test]
fn ranking_agrees_with_oracle() {
    let cfg = presets::uniform_scale(5000, 1);
    let (items, _) = generate_scenario(&cfg, 0).unwrap();
    let fit = estimate_tstats(&items, &EstimationOptions::default()).unwrap();
    let exact: Vec<f64> = items.iter().map(|t| true_lfdr_full(t.x, t.sigma, &cfg.model).unwrap()).collect();
    let tau = kendall_tau_b(&fit.tstats.t, &exact);
    assert!(tau > 0.9, "Kendall tau {tau}");
}

#[test]
fn permutation_equivariance() {
    let cfg = presets::uniform_scale(800, 1);
    let (items, _) = generate_scenario(&cfg, 2).unwrap();
    let n = items.len();
    let perm: Vec<usize> = (0..n).map(|i| (i * 337 + 11) % n).collect();
    let permuted: Vec<TestItem> = perm.iter().map(|&i| items[i]).collect();
    let a = estimate_tstats(&items, &EstimationOptions::default()).unwrap();
    let b = estimate_tstats(&permuted, &EstimationOptions::default()).unwrap();
    for (k, &i) in perm.iter().enumerate() {
        let (x, y) = (a.tstats.t[i], b.tstats.t[k]);
        assert!((x - y).abs() <= 1e-9 * x.abs().max(1e-12), "{i}: {x} vs {y}");
    }
}

#[test]
fn two_groups_decouple_with_tiny_sigma_bandwidth() {
    let cfg = presets::two_group(1500, 1);
    let (items, truth) = generate_scenario(&cfg, 0).unwrap();
    let pooled = estimate_tstats(&items, &EstimationOptions::default()).unwrap();
    let h = Bandwidths::new(pooled.tstats.bandwidths.h_x, 1e-3).unwrap();
    let opts = EstimationOptions { pi_hat: Some(pooled.pi_hat()), bandwidths: Some(h), ..Default::default() };
    let pooled = estimate_tstats(&items, &opts).unwrap();
    let group_a: Vec<TestItem> = items.iter().zip(&truth.sigma).filter(|(_, &s)| s == 1.0).map(|(t, _)| *t).collect();
    let alone = estimate_tstats(&group_a, &opts).unwrap();
    for x in [-1.0, 0.5, 2.0, 2.5, 3.7] {
        let p = pooled.alt_density_at(x, 1.0).unwrap();
        let q = alone.alt_density_at(x, 1.0).unwrap();
        assert!(((p - q) / q).abs() < 1e-6, "x = {x}: {p} vs {q}");
    }
}
