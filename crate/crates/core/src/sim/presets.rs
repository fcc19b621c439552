//! Ready-made scenarios. Each takes the number of tests and reps; the seed
//! is fixed and can be changed on the returned value.

use super::config::{Dependence, NullMode, ScenarioConfig};
use crate::model::{EffectLaw, GaussianComponent, MixtureModel, Noise, ScaleLaw};
use crate::procedures::Procedure;

const WITH_ORACLES: [Procedure; 5] = [Procedure::Hart, Procedure::Bh, Procedure::Az, Procedure::OrFull, Procedure::OrZ];
const DATA_DRIVEN: [Procedure; 3] = [Procedure::Hart, Procedure::Bh, Procedure::Az];

fn point_two(lo: f64, hi: f64) -> MixtureModel {
    MixtureModel::new(0.1, EffectLaw::PointMass(2.0), ScaleLaw::Uniform { lo, hi })
}

/// `π = 0.1`, `μ = 2`, `σ ~ U[0, 4]`.
pub fn uniform_scale(m: usize, reps: usize) -> ScenarioConfig {
    ScenarioConfig::new(point_two(0.0, 4.0), m, reps, 20_240_402).with_procedures(&WITH_ORACLES)
}

/// `π = 0.1`, `μ = 2.5`, `σ ∈ {1, 3}` with equal probability.
pub fn two_group(m: usize, reps: usize) -> ScenarioConfig {
    let model = MixtureModel::new(
        0.1,
        EffectLaw::PointMass(2.5),
        ScaleLaw::TwoValues { sigma_a: 1.0, sigma_b: 3.0, prob_a: 0.5 },
    );
    ScenarioConfig::new(model, m, reps, 20_240_403).with_procedures(&WITH_ORACLES)
}

/// `μ ~ 0.5 N(-1.5, 0.1²) + 0.5 N(2, 0.1²)`, `σ ~ U[0.5, 2]`.
pub fn gaussian_mixture_effects(m: usize, reps: usize) -> ScenarioConfig {
    let effect = EffectLaw::GaussianMixture(vec![
        GaussianComponent { weight: 0.5, mean: -1.5, sd: 0.1 },
        GaussianComponent { weight: 0.5, mean: 2.0, sd: 0.1 },
    ]);
    let model = MixtureModel::new(0.1, effect, ScaleLaw::Uniform { lo: 0.5, hi: 2.0 });
    ScenarioConfig::new(model, m, reps, 20_240_501).with_procedures(&WITH_ORACLES)
}

/// 200 Gaussian replicates per test; `σ` replaced by the sample standard
/// deviation. `σ ~ U[0.5, 4]`.
pub fn estimated_sigma(m: usize, reps: usize) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::new(point_two(0.5, 4.0), m, reps, 20_240_502).with_procedures(&DATA_DRIVEN);
    cfg.replicates_per_unit = 200;
    cfg.sigma_known = false;
    cfg
}

/// Banded correlation (0.5 at lag 1, 0.4 at lag 2) on the leading block.
pub fn banded_dependence(m: usize, reps: usize) -> ScenarioConfig {
    let mut cfg = uniform_scale(m, reps);
    cfg.seed = 20_240_503;
    cfg.dependence = Dependence::BandedBlock;
    cfg
}

/// AR(1) correlation `0.5^|i-j|` on the leading block.
pub fn ar1_dependence(m: usize, reps: usize) -> ScenarioConfig {
    let mut cfg = uniform_scale(m, reps);
    cfg.seed = 20_240_504;
    cfg.dependence = Dependence::AR1Block;
    cfg
}

/// 200 replicates per test with `t_5` noise; `σ` estimated.
pub fn heavy_tails(m: usize, reps: usize) -> ScenarioConfig {
    let mut model = point_two(0.0, 4.0);
    model.noise = Noise::StudentT { df: 5.0 };
    let mut cfg = ScenarioConfig::new(model, m, reps, 20_240_505).with_procedures(&DATA_DRIVEN);
    cfg.replicates_per_unit = 200;
    cfg.sigma_known = false;
    cfg
}

/// Null z-values `N(0, 0.8²)`; data-driven rules fit an empirical null.
pub fn narrow_null(m: usize, reps: usize) -> ScenarioConfig {
    let mut model = point_two(0.0, 4.0);
    model.null_scale = 0.8;
    let mut cfg = ScenarioConfig::new(model, m, reps, 20_240_506).with_procedures(&WITH_ORACLES);
    cfg.null_mode = NullMode::Empirical { coverage: 0.99 };
    cfg
}
