//! Generative two-group model and its exact densities.
//!
//! Observations follow `X | μ, σ ~ N(μ, σ²)` with `μ` drawn from a point mass
//! at zero (probability `1 - π`) or from an effect law, and `σ` drawn from a
//! bounded scale law. The functions here evaluate the null, alternative and
//! mixture densities of `X | σ`, the posterior null probability given the
//! full pair `(x, σ)`, and the same quantities after standardizing to
//! `z = x / σ`.

use crate::error::{domain, Result};
use crate::numeric::{
    integrate_adaptive, normal_pdf, std_normal_cdf, std_normal_sf, DENSITY_FLOOR,
};

/// Absolute tolerance of every integral over the scale law.
pub const SCALE_QUAD_TOL: f64 = 1e-8;

/// One hypothesis: summary statistic, its standard deviation, and the
/// derived z- and two-sided p-values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestItem {
    pub x: f64,
    pub sigma: f64,
    pub z: f64,
    pub p: f64,
}

impl TestItem {
    pub fn new(x: f64, sigma: f64) -> Result<Self> {
        Self::with_null_scale(x, sigma, 1.0)
    }

    /// Builds an item whose p-value is taken under `N(0, null_scale²)` for `z`.
    pub fn with_null_scale(x: f64, sigma: f64, null_scale: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return domain(format!("sigma must be positive and finite, got {sigma}"));
        }
        if !x.is_finite() {
            return domain(format!("x must be finite, got {x}"));
        }
        let z = x / sigma;
        let p = crate::procedures::pvalue_from_z(z, null_scale)?;
        Ok(Self { x, sigma, z, p })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianComponent {
    pub weight: f64,
    pub mean: f64,
    pub sd: f64,
}

/// Distribution of the non-null effect `μ`.
#[derive(Debug, Clone, PartialEq)]
pub enum EffectLaw {
    PointMass(f64),
    TwoPointMass { mu1: f64, w1: f64, mu2: f64, w2: f64 },
    GaussianMixture(Vec<GaussianComponent>),
    /// No alternative: only meaningful together with `π = 0`.
    Zero,
}

impl EffectLaw {
    pub fn validate(&self) -> Result<()> {
        let comps = match self {
            EffectLaw::Zero => return Ok(()),
            _ => self.components()?,
        };
        let total: f64 = comps.iter().map(|c| c.weight).sum();
        if comps.iter().any(|c| !(c.weight > 0.0) || !c.mean.is_finite()) {
            return domain("effect weights must be positive and means finite");
        }
        if comps.iter().any(|c| !(c.sd >= 0.0) || !c.sd.is_finite()) {
            return domain("effect component sds must be finite and nonnegative");
        }
        if (total - 1.0).abs() > 1e-12 {
            return domain(format!("effect weights sum to {total}, expected 1"));
        }
        Ok(())
    }

    /// All variants as a list of Gaussian components (a point mass has sd 0).
    pub fn components(&self) -> Result<Vec<GaussianComponent>> {
        Ok(match self {
            EffectLaw::PointMass(mu) => vec![GaussianComponent { weight: 1.0, mean: *mu, sd: 0.0 }],
            EffectLaw::TwoPointMass { mu1, w1, mu2, w2 } => vec![
                GaussianComponent { weight: *w1, mean: *mu1, sd: 0.0 },
                GaussianComponent { weight: *w2, mean: *mu2, sd: 0.0 },
            ],
            EffectLaw::GaussianMixture(c) => c.clone(),
            EffectLaw::Zero => return domain("alternative density undefined for the zero effect law"),
        })
    }
}

/// Distribution of the noise standard deviation `σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleLaw {
    Uniform { lo: f64, hi: f64 },
    TwoValues { sigma_a: f64, sigma_b: f64, prob_a: f64 },
    Fixed(f64),
}

impl ScaleLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ScaleLaw::Uniform { lo, hi } => {
                if !(lo >= 0.0) || !(hi > lo) || !hi.is_finite() {
                    return domain(format!("uniform scale law needs 0 <= lo < hi < inf, got [{lo}, {hi}]"));
                }
            }
            ScaleLaw::TwoValues { sigma_a, sigma_b, prob_a } => {
                if !(sigma_a > 0.0 && sigma_b > 0.0) || !sigma_a.is_finite() || !sigma_b.is_finite() {
                    return domain("two-value scale law needs positive finite values");
                }
                if !(0.0..=1.0).contains(&prob_a) {
                    return domain(format!("prob_a must lie in [0, 1], got {prob_a}"));
                }
            }
            ScaleLaw::Fixed(s) => {
                if !(s > 0.0) || !s.is_finite() {
                    return domain(format!("fixed sigma must be positive, got {s}"));
                }
            }
        }
        Ok(())
    }

    /// Expectation of `f(σ)` under the law. Uniform laws use adaptive
    /// Gauss–Kronrod quadrature.
    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        match *self {
            ScaleLaw::Uniform { lo, hi } => {
                let width = hi - lo;
                integrate_adaptive(&f, lo, hi, SCALE_QUAD_TOL * width) / width
            }
            ScaleLaw::TwoValues { sigma_a, sigma_b, prob_a } => {
                let mut v = 0.0;
                if prob_a > 0.0 {
                    v += prob_a * f(sigma_a);
                }
                if prob_a < 1.0 {
                    v += (1.0 - prob_a) * f(sigma_b);
                }
                v
            }
            ScaleLaw::Fixed(s) => f(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Noise {
    Gaussian,
    StudentT { df: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureModel {
    /// Non-null proportion.
    pub pi: f64,
    pub effect: EffectLaw,
    pub scale: ScaleLaw,
    pub noise: Noise,
    /// Multiplier on `σ` for the null law.
    pub null_scale: f64,
}

impl MixtureModel {
    pub fn new(pi: f64, effect: EffectLaw, scale: ScaleLaw) -> Self {
        Self { pi, effect, scale, noise: Noise::Gaussian, null_scale: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.pi) {
            return domain(format!("pi must lie in [0, 1], got {}", self.pi));
        }
        if !(self.null_scale > 0.0) || !self.null_scale.is_finite() {
            return domain(format!("null_scale must be positive, got {}", self.null_scale));
        }
        if let Noise::StudentT { df } = self.noise {
            if !(df > 2.0) {
                return domain(format!("Student-t noise needs df > 2, got {df}"));
            }
        }
        if self.pi > 0.0 && self.effect == EffectLaw::Zero {
            return domain("pi > 0 requires a non-zero effect law");
        }
        self.effect.validate()?;
        self.scale.validate()
    }
}

/// Ground truth for one generated data set.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TruthVector {
    pub theta: Vec<bool>,
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl TruthVector {
    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn non_null_count(&self) -> usize {
        self.theta.iter().filter(|&&t| t).count()
    }
}

/// Density of `N(0, (σ·null_scale)²)` at `x`.
pub fn null_density(x: f64, sigma: f64, null_scale: f64) -> Result<f64> {
    if !(sigma > 0.0) || !(null_scale > 0.0) {
        return domain(format!("null density needs sigma > 0 and null_scale > 0, got {sigma}, {null_scale}"));
    }
    Ok(normal_pdf(x, sigma * null_scale))
}

/// Density of `X | σ` under the alternative: the effect law convolved with
/// `N(0, σ²)`.
pub fn alt_density(x: f64, sigma: f64, effect: &EffectLaw) -> Result<f64> {
    if !(sigma > 0.0) {
        return domain(format!("alternative density needs sigma > 0, got {sigma}"));
    }
    Ok(effect
        .components()?
        .iter()
        .map(|c| {
            let sd = (sigma * sigma + c.sd * c.sd).sqrt();
            c.weight * normal_pdf(x - c.mean, sd)
        })
        .sum())
}

pub fn mixture_density(x: f64, sigma: f64, model: &MixtureModel) -> Result<f64> {
    let f0 = null_density(x, sigma, model.null_scale)?;
    if model.pi == 0.0 {
        return Ok(f0);
    }
    let f1 = alt_density(x, sigma, &model.effect)?;
    Ok((1.0 - model.pi) * f0 + model.pi * f1)
}

/// Posterior null probability given the full pair, with an underflow flag.
///
/// When the mixture density underflows the floor the value is 1 and the flag
/// is set.
pub fn true_lfdr_full_flagged(x: f64, sigma: f64, model: &MixtureModel) -> Result<(f64, bool)> {
    let f0 = null_density(x, sigma, model.null_scale)?;
    let f1 = if model.pi > 0.0 { alt_density(x, sigma, &model.effect)? } else { 0.0 };
    Ok(posterior_null(f0, f1, model.pi))
}

pub fn true_lfdr_full(x: f64, sigma: f64, model: &MixtureModel) -> Result<f64> {
    true_lfdr_full_flagged(x, sigma, model).map(|(v, _)| v)
}

pub(crate) fn posterior_null(f0: f64, f1: f64, pi: f64) -> (f64, bool) {
    let null_part = (1.0 - pi) * f0;
    let total = null_part + pi * f1;
    if total < DENSITY_FLOOR {
        return (1.0, true);
    }
    ((null_part.max(DENSITY_FLOOR) / total).clamp(0.0, 1.0), false)
}

/// Alternative density of `Z = X / σ` conditional on `σ`.
pub fn alt_z_density_given_sigma(z: f64, sigma: f64, effect: &EffectLaw) -> Result<f64> {
    let comps = effect.components()?;
    Ok(alt_z_density_components(z, sigma, &comps))
}

fn alt_z_density_components(z: f64, sigma: f64, comps: &[GaussianComponent]) -> f64 {
    comps
        .iter()
        .map(|c| {
            let loc = c.mean / sigma;
            let sd = (1.0 + (c.sd / sigma).powi(2)).sqrt();
            let v = c.weight * normal_pdf(z - loc, sd);
            if v.is_nan() { 0.0 } else { v }
        })
        .sum()
}

/// `P(Z > t | σ)` under the alternative.
pub fn alt_z_sf_given_sigma(t: f64, sigma: f64, comps: &[GaussianComponent]) -> f64 {
    comps
        .iter()
        .map(|c| {
            let sd = (1.0 + (c.sd / sigma).powi(2)).sqrt();
            let v = c.weight * std_normal_sf((t - c.mean / sigma) / sd);
            if v.is_nan() { if c.mean > 0.0 { c.weight } else { 0.0 } } else { v }
        })
        .sum()
}

/// `P(Z < t | σ)` under the alternative.
pub fn alt_z_cdf_given_sigma(t: f64, sigma: f64, comps: &[GaussianComponent]) -> f64 {
    comps
        .iter()
        .map(|c| {
            let sd = (1.0 + (c.sd / sigma).powi(2)).sqrt();
            let v = c.weight * std_normal_cdf((t - c.mean / sigma) / sd);
            if v.is_nan() { if c.mean < 0.0 { c.weight } else { 0.0 } } else { v }
        })
        .sum()
}

/// Non-null density of the z-values, integrated over the scale law.
pub fn alt_z_density(z: f64, model: &MixtureModel) -> Result<f64> {
    model.scale.validate()?;
    let comps = model.effect.components()?;
    Ok(model.scale.expect(|s| alt_z_density_components(z, s, &comps)))
}

/// Mixture density of the z-values.
pub fn marginal_z_density(z: f64, model: &MixtureModel) -> Result<f64> {
    model.scale.validate()?;
    let f0 = normal_pdf(z, model.null_scale);
    if model.pi == 0.0 {
        return Ok(f0);
    }
    let f1 = alt_z_density(z, model)?;
    Ok((1.0 - model.pi) * f0 + model.pi * f1)
}

/// Local fdr of a z-value under the model.
pub fn true_lfdr_z(z: f64, model: &MixtureModel) -> Result<f64> {
    model.scale.validate()?;
    let f0 = normal_pdf(z, model.null_scale);
    let f1 = if model.pi > 0.0 { alt_z_density(z, model)? } else { 0.0 };
    Ok(posterior_null(f0, f1, model.pi).0)
}
