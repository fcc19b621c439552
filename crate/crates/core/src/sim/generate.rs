use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal, StudentT};

use super::config::{Dependence, ScenarioConfig};
use crate::error::{HartError, Result};
use crate::model::{EffectLaw, Noise, ScaleLaw, TestItem, TruthVector};

const STREAM_LATENT: u64 = 0;
const STREAM_NOISE: u64 = 1;
const STREAMS_PER_REP: u64 = 8;

/// Generator for one `(seed, rep, stream)` triple.
pub fn rep_rng(seed: u64, rep: usize, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep as u64 * STREAMS_PER_REP + stream);
    rng
}

fn draw_sigma(rng: &mut ChaCha8Rng, law: &ScaleLaw) -> f64 {
    match *law {
        ScaleLaw::Uniform { lo, hi } => loop {
            let s = rng.gen_range(lo..hi);
            if s > 0.0 {
                break s;
            }
        },
        ScaleLaw::TwoValues { sigma_a, sigma_b, prob_a } => {
            if rng.gen::<f64>() < prob_a {
                sigma_a
            } else {
                sigma_b
            }
        }
        ScaleLaw::Fixed(s) => s,
    }
}

fn draw_effect(rng: &mut ChaCha8Rng, law: &EffectLaw) -> Result<f64> {
    let comps = law.components()?;
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut pick = comps.last().copied().ok_or_else(|| HartError::Config("effect law has no components".into()))?;
    for c in &comps {
        acc += c.weight;
        if u < acc {
            pick = *c;
            break;
        }
    }
    if pick.sd == 0.0 {
        return Ok(pick.mean);
    }
    let e: f64 = StandardNormal.sample(rng);
    Ok(pick.mean + pick.sd * e)
}

/// Lower-triangular factor of the banded correlation matrix with lag-1
/// entry 0.5 and lag-2 entry 0.4, stored as `(l[i][i-2], l[i][i-1], l[i][i])`.
fn banded_factor(n: usize) -> Vec<[f64; 3]> {
    let (r1, r2): (f64, f64) = (0.5, 0.4);
    let mut l = vec![[0.0; 3]; n];
    for i in 0..n {
        let a = if i >= 2 { r2 / l[i - 2][2] } else { 0.0 };
        let b = if i >= 1 {
            let cross = if i >= 2 { a * l[i - 1][1] } else { 0.0 };
            (r1 - cross) / l[i - 1][2]
        } else {
            0.0
        };
        l[i] = [a, b, (1.0 - a * a - b * b).sqrt()];
    }
    l
}

/// Unit-variance noise vector with the configured dependence on the first
/// `block` coordinates.
struct NoiseSource {
    dependence: Dependence,
    block: usize,
    banded: Vec<[f64; 3]>,
    noise: Noise,
}

impl NoiseSource {
    fn new(cfg: &ScenarioConfig) -> Self {
        let block = match cfg.dependence {
            Dependence::Independent => 0,
            _ => cfg.block_size(),
        };
        let banded = if cfg.dependence == Dependence::BandedBlock { banded_factor(block) } else { Vec::new() };
        Self { dependence: cfg.dependence, block, banded, noise: cfg.model.noise }
    }

    fn fill(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) -> Result<()> {
        match self.noise {
            Noise::Gaussian => out.iter_mut().for_each(|e| *e = StandardNormal.sample(rng)),
            Noise::StudentT { df } => {
                let t = StudentT::new(df).map_err(|e| HartError::Config(format!("Student-t noise: {e}")))?;
                out.iter_mut().for_each(|e| *e = t.sample(rng));
            }
        }
        let b = self.block.min(out.len());
        match self.dependence {
            Dependence::Independent => {}
            Dependence::BandedBlock => {
                // Backwards so each entry still sees the raw innovations.
                for i in (0..b).rev() {
                    let [a, c, d] = self.banded[i];
                    let mut v = d * out[i];
                    if i >= 1 {
                        v += c * out[i - 1];
                    }
                    if i >= 2 {
                        v += a * out[i - 2];
                    }
                    out[i] = v;
                }
            }
            Dependence::AR1Block => {
                let rho: f64 = 0.5;
                let s = (1.0 - rho * rho).sqrt();
                for i in 1..b {
                    out[i] = rho * out[i - 1] + s * out[i];
                }
            }
        }
        Ok(())
    }
}

/// One data set of `cfg.m` hypotheses and its ground truth. The output is a
/// pure function of `(cfg, rep)`.
pub fn generate_scenario(cfg: &ScenarioConfig, rep: usize) -> Result<(Vec<TestItem>, TruthVector)> {
    cfg.validate()?;
    let m = cfg.m;
    let model = &cfg.model;
    let mut latent = rep_rng(cfg.seed, rep, STREAM_LATENT);
    let mut truth = TruthVector { theta: Vec::with_capacity(m), mu: Vec::with_capacity(m), sigma: Vec::with_capacity(m) };
    for _ in 0..m {
        let theta = latent.gen::<f64>() < model.pi;
        let mu = if theta { draw_effect(&mut latent, &model.effect)? } else { 0.0 };
        truth.theta.push(theta);
        truth.mu.push(mu);
        truth.sigma.push(draw_sigma(&mut latent, &model.scale));
    }
    let scale: Vec<f64> = (0..m)
        .map(|i| truth.sigma[i] * if truth.theta[i] { 1.0 } else { model.null_scale })
        .collect();

    let source = NoiseSource::new(cfg);
    let mut noise_rng = rep_rng(cfg.seed, rep, STREAM_NOISE);
    let mut eps = vec![0.0; m];
    let n = cfg.replicates_per_unit;
    let items = if n == 1 {
        source.fill(&mut noise_rng, &mut eps)?;
        (0..m)
            .map(|i| TestItem::new(truth.mu[i] + scale[i] * eps[i], truth.sigma[i]))
            .collect::<Result<Vec<_>>>()?
    } else {
        // Welford accumulation over replicates of mean μ/√n.
        let root_n = (n as f64).sqrt();
        let mut mean = vec![0.0; m];
        let mut m2 = vec![0.0; m];
        for k in 0..n {
            source.fill(&mut noise_rng, &mut eps)?;
            for i in 0..m {
                let y = truth.mu[i] / root_n + scale[i] * eps[i];
                let d = y - mean[i];
                mean[i] += d / (k + 1) as f64;
                m2[i] += d * (y - mean[i]);
            }
        }
        (0..m)
            .map(|i| TestItem::new(root_n * mean[i], (m2[i] / (n - 1) as f64).sqrt()))
            .collect::<Result<Vec<_>>>()?
    };
    Ok((items, truth))
}

/// Draws `m` independent z-values `N(0, scale²)`; used for null-fitting demos.
pub fn null_zvalues(m: usize, scale: f64, seed: u64) -> Vec<f64> {
    let mut rng = rep_rng(seed, 0, STREAM_NOISE);
    let d = Normal::new(0.0, scale).expect("scale must be positive");
    (0..m).map(|_| d.sample(&mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MixtureModel;
    use crate::numeric::mean_sd;
    use crate::sim::presets;

    #[test]
    fn identical_inputs_give_identical_outputs() {
        let cfg = presets::uniform_scale(2000, 1);
        let (a, ta) = generate_scenario(&cfg, 3).unwrap();
        let (b, tb) = generate_scenario(&cfg, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(ta, tb);
        let (c, _) = generate_scenario(&cfg, 4).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn non_null_count_is_binomial() {
        let cfg = presets::uniform_scale(20_000, 1);
        let (_, truth) = generate_scenario(&cfg, 0).unwrap();
        let k = truth.non_null_count() as f64;
        assert!((k - 2000.0).abs() <= 4.0 * (2000.0f64 * 0.9).sqrt(), "{k}");
    }

    #[test]
    fn two_value_groups_split_evenly() {
        let cfg = presets::two_group(20_000, 1);
        let (_, truth) = generate_scenario(&cfg, 0).unwrap();
        let a = truth.sigma.iter().filter(|&&s| s == 1.0).count() as f64;
        let b = truth.sigma.iter().filter(|&&s| s == 3.0).count() as f64;
        assert_eq!(a + b, 20_000.0);
        assert!((a / 20_000.0 - 0.5).abs() <= 4.0 * (0.25f64 / 20_000.0).sqrt());
    }

    #[test]
    fn null_z_values_are_standard_normal() {
        let mut cfg = presets::uniform_scale(20_000, 1);
        cfg.model.pi = 0.0;
        cfg.model.effect = EffectLaw::Zero;
        let (items, _) = generate_scenario(&cfg, 0).unwrap();
        let z: Vec<f64> = items.iter().map(|t| t.z).collect();
        let (mean, sd) = mean_sd(&z);
        assert!(mean.abs() < 0.03 && (sd - 1.0).abs() < 0.02, "{mean} {sd}");
    }

    #[test]
    fn null_scale_shrinks_null_z() {
        let mut cfg = presets::narrow_null(20_000, 1);
        cfg.model.pi = 0.0;
        cfg.model.effect = EffectLaw::Zero;
        let (items, _) = generate_scenario(&cfg, 0).unwrap();
        let (_, sd) = mean_sd(&items.iter().map(|t| t.z).collect::<Vec<_>>());
        assert!((sd - 0.8).abs() < 0.02, "{sd}");
    }

    #[test]
    fn replicates_estimate_sigma() {
        let cfg = presets::estimated_sigma(2000, 1);
        let (items, truth) = generate_scenario(&cfg, 0).unwrap();
        let ratios: Vec<f64> = items.iter().zip(&truth.sigma).map(|(t, s)| t.sigma / s).collect();
        let (mean, sd) = mean_sd(&ratios);
        assert!((mean - 1.0).abs() < 0.01 && sd < 0.07, "{mean} {sd}");
        let null_z: Vec<f64> = items.iter().zip(&truth.theta).filter(|(_, &t)| !t).map(|(i, _)| i.z).collect();
        let (_, sd) = mean_sd(&null_z);
        assert!((sd - 1.0).abs() < 0.05, "{sd}");
    }

    #[test]
    fn banded_factor_reproduces_correlations() {
        let l = banded_factor(50);
        let row = |i: usize| {
            let mut r = vec![0.0; 50];
            r[i] = l[i][2];
            if i >= 1 {
                r[i - 1] = l[i][1];
            }
            if i >= 2 {
                r[i - 2] = l[i][0];
            }
            r
        };
        for i in 0..50usize {
            for j in i.saturating_sub(4)..=i {
                let c: f64 = row(i).iter().zip(row(j)).map(|(a, b)| a * b).sum();
                let want = match i - j {
                    0 => 1.0,
                    1 => 0.5,
                    2 => 0.4,
                    _ => 0.0,
                };
                assert!((c - want).abs() < 1e-12, "{i} {j} {c}");
            }
        }
    }

    fn lag_corr(cfg: &ScenarioConfig, lag: usize) -> f64 {
        let src = NoiseSource::new(cfg);
        let b = src.block;
        let mut rng = rep_rng(9, 0, 1);
        let mut e = vec![0.0; cfg.m];
        let (mut num, mut cnt) = (0.0, 0.0);
        for _ in 0..200 {
            src.fill(&mut rng, &mut e).unwrap();
            for i in lag..b {
                num += e[i] * e[i - lag];
                cnt += 1.0;
            }
        }
        num / cnt
    }

    #[test]
    fn block_correlations() {
        let banded = presets::banded_dependence(5000, 1);
        assert!((lag_corr(&banded, 1) - 0.5).abs() < 0.02);
        assert!((lag_corr(&banded, 2) - 0.4).abs() < 0.02);
        assert!(lag_corr(&banded, 3).abs() < 0.02);
        let ar1 = presets::ar1_dependence(5000, 1);
        assert!((lag_corr(&ar1, 1) - 0.5).abs() < 0.02);
        assert!((lag_corr(&ar1, 2) - 0.25).abs() < 0.02);
    }

    #[test]
    fn heavy_tailed_replicates_run() {
        let cfg = presets::heavy_tails(500, 1);
        let (items, _) = generate_scenario(&cfg, 0).unwrap();
        assert!(items.iter().all(|t| t.sigma > 0.0 && t.x.is_finite()));
    }

    #[test]
    fn gaussian_mixture_effects() {
        let cfg = presets::gaussian_mixture_effects(20_000, 1);
        let (_, truth) = generate_scenario(&cfg, 0).unwrap();
        let mus: Vec<f64> = truth.mu.iter().zip(&truth.theta).filter(|(_, &t)| t).map(|(m, _)| *m).collect();
        let neg = mus.iter().filter(|&&m| m < 0.0).count() as f64 / mus.len() as f64;
        assert!((neg - 0.5).abs() < 0.05);
        assert!(mus.iter().all(|m| (m + 1.5).abs() < 0.6 || (m - 2.0).abs() < 0.6));
    }

    #[test]
    fn invalid_config_is_rejected() {
        let mut cfg = presets::uniform_scale(100, 1);
        cfg.model = MixtureModel::new(1.5, EffectLaw::PointMass(2.0), ScaleLaw::Fixed(1.0));
        assert!(generate_scenario(&cfg, 0).is_err());
    }
}
