//! Closed-form oracle thresholds and average powers.
//!
//! For a model whose effect is a single point mass `μ_a` and whose noise
//! scale is `U[lo, hi]`, the marginal FDR of three fixed rules can be written
//! as ratios of one-dimensional integrals over `σ`:
//!
//! * the two-sided p-value rule `|z| > t_p`,
//! * the one-sided z-value rule `z > t_z`,
//! * the full-data rule `P(H0 | x, σ) < λ`, equivalent to
//!   `z > t_{z,σ}(λ) = [μ_a² - 2σ² log{λπ / ((1-λ)(1-π))}] / (2 μ_a σ)`.
//!
//! Each threshold is the root of its (monotone) mFDR functional at level α.
//! The p- and z-value thresholds are also available for a general
//! [`MixtureModel`], which is what the simulation oracles use.

use crate::error::{domain, HartError, Result};
use crate::model::{alt_z_cdf_given_sigma, alt_z_sf_given_sigma, MixtureModel};
use crate::numeric::{std_normal_pdf, std_normal_sf, GaussLegendre};

const T_BRACKET: (f64, f64) = (0.0, 20.0);
const LAMBDA_BRACKET: (f64, f64) = (1e-9, 1.0 - 1e-9);
const ROOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyModel {
    pub pi: f64,
    pub mu_a: f64,
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    pub alpha: f64,
}

impl ToyModel {
    /// `π = 0.1`, `μ_a = 2`, `σ ~ U[0.5, 4]`, `α = 0.1`.
    pub fn illustrative() -> Self {
        Self { pi: 0.1, mu_a: 2.0, sigma_lo: 0.5, sigma_hi: 4.0, alpha: 0.1 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pi > 0.0 && self.pi < 1.0) {
            return domain(format!("pi must lie in (0, 1), got {}", self.pi));
        }
        if self.mu_a == 0.0 || !self.mu_a.is_finite() {
            return domain("mu_a must be finite and nonzero");
        }
        if !(self.sigma_lo > 0.0 && self.sigma_hi > self.sigma_lo) || !self.sigma_hi.is_finite() {
            return domain(format!(
                "need 0 < sigma_lo < sigma_hi, got [{}, {}]",
                self.sigma_lo, self.sigma_hi
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return domain(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        Ok(())
    }

    // Results are symmetric in the sign of the effect.
    fn mu(&self) -> f64 {
        self.mu_a.abs()
    }

    /// Average of `f(σ)` over `U[lo, hi]` with the 256-point rule.
    fn avg<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        GaussLegendre::shared_256().integrate(f, self.sigma_lo, self.sigma_hi) / (self.sigma_hi - self.sigma_lo)
    }

    /// mFDR of `|z| > t`.
    pub fn mfdr_p(&self, t: f64) -> f64 {
        let mu = self.mu();
        let null = 2.0 * (1.0 - self.pi) * std_normal_sf(t);
        let alt = self.avg(|s| std_normal_sf(t + mu / s) + std_normal_sf(t - mu / s));
        null / (null + self.pi * alt)
    }

    /// mFDR of `z > t`.
    pub fn mfdr_z(&self, t: f64) -> f64 {
        let mu = self.mu();
        let null = (1.0 - self.pi) * std_normal_sf(t);
        let alt = self.avg(|s| std_normal_sf(t - mu / s));
        null / (null + self.pi * alt)
    }

    /// z-scale cutoff of the full-data rule at noise level `sigma`.
    pub fn full_rule_z_cutoff(&self, lambda: f64, sigma: f64) -> f64 {
        let mu = self.mu();
        let odds = (lambda * self.pi / ((1.0 - lambda) * (1.0 - self.pi))).ln();
        (mu * mu - 2.0 * sigma * sigma * odds) / (2.0 * mu * sigma)
    }

    /// mFDR of `P(H0 | x, σ) < λ`.
    pub fn mfdr_full(&self, lambda: f64) -> f64 {
        let mu = self.mu();
        let null = (1.0 - self.pi) * self.avg(|s| std_normal_sf(self.full_rule_z_cutoff(lambda, s)));
        let alt = self.avg(|s| std_normal_sf(self.full_rule_z_cutoff(lambda, s) - mu / s));
        let total = null + self.pi * alt;
        if total <= 0.0 { 0.0 } else { null / total }
    }

    /// Local fdr of a z-value.
    pub fn lfdr_z(&self, z: f64) -> f64 {
        let mu = self.mu();
        let null = (1.0 - self.pi) * std_normal_pdf(z);
        null / (null + self.pi * self.avg(|s| std_normal_pdf(z - mu / s)))
    }
}

/// Bisection for `g(t) = α` with `g` strictly decreasing on the bracket.
/// Monotonicity is checked at every midpoint.
fn solve_decreasing<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, alpha: f64, what: &str) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let (mut g_lo, mut g_hi) = (g(lo), g(hi));
    if g_lo <= alpha {
        return Ok(lo);
    }
    if g_hi > alpha {
        return domain(format!("{what}: mFDR stays above alpha = {alpha} on the search bracket"));
    }
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        let g_mid = g(mid);
        if g_mid > g_lo || g_mid < g_hi {
            return Err(HartError::Domain(format!("{what}: mFDR functional is not monotone near {mid}")));
        }
        if g_mid > alpha {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
            g_hi = g_mid;
        }
    }
    Ok(hi)
}

pub fn toy_threshold_p(model: &ToyModel) -> Result<f64> {
    model.validate()?;
    solve_decreasing(|t| model.mfdr_p(t), T_BRACKET.0, T_BRACKET.1, model.alpha, "p-value threshold")
}

pub fn toy_threshold_z(model: &ToyModel) -> Result<f64> {
    model.validate()?;
    solve_decreasing(|t| model.mfdr_z(t), T_BRACKET.0, T_BRACKET.1, model.alpha, "z-value threshold")
}

/// Supremum of `λ` whose full-data rule keeps mFDR at or below α.
pub fn toy_lambda_star(model: &ToyModel) -> Result<f64> {
    model.validate()?;
    // The functional increases with λ; solve on the reflected argument.
    let (lo, hi) = LAMBDA_BRACKET;
    let s = solve_decreasing(|u| model.mfdr_full(1.0 - u), 1.0 - hi, 1.0 - lo, model.alpha, "lambda*")?;
    Ok(1.0 - s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragePowers {
    pub ap_p: f64,
    pub ap_z: f64,
    pub ap_full: f64,
}

pub fn toy_average_powers(model: &ToyModel) -> Result<AveragePowers> {
    let t_p = toy_threshold_p(model)?;
    let t_z = toy_threshold_z(model)?;
    let lambda = toy_lambda_star(model)?;
    Ok(powers_at(model, t_p, t_z, lambda))
}

fn powers_at(model: &ToyModel, t_p: f64, t_z: f64, lambda: f64) -> AveragePowers {
    let mu = model.mu();
    AveragePowers {
        ap_p: model.avg(|s| std_normal_sf(t_p + mu / s) + std_normal_sf(t_p - mu / s)),
        ap_z: model.avg(|s| std_normal_sf(t_z - mu / s)),
        ap_full: model.avg(|s| std_normal_sf(model.full_rule_z_cutoff(lambda, s) - mu / s)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyOracleReport {
    pub t_p: f64,
    pub p_cut: f64,
    pub t_z: f64,
    pub lfdr_cut_z: f64,
    pub lambda_star: f64,
    pub ap_p: f64,
    pub ap_z: f64,
    pub ap_full: f64,
}

pub fn toy_oracle_report(model: &ToyModel) -> Result<ToyOracleReport> {
    let t_p = toy_threshold_p(model)?;
    let t_z = toy_threshold_z(model)?;
    let lambda_star = toy_lambda_star(model)?;
    let ap = powers_at(model, t_p, t_z, lambda_star);
    Ok(ToyOracleReport {
        t_p,
        p_cut: 2.0 * std_normal_sf(t_p),
        t_z,
        lfdr_cut_z: model.lfdr_z(t_z),
        lambda_star,
        ap_p: ap.ap_p,
        ap_z: ap.ap_z,
        ap_full: ap.ap_full,
    })
}

/// mFDR of `|z| ≥ t` under a general model, null `N(0, null_scale²)`.
pub fn mfdr_two_sided(model: &MixtureModel, t: f64) -> Result<f64> {
    let comps = model.effect.components()?;
    let null = 2.0 * (1.0 - model.pi) * std_normal_sf(t / model.null_scale);
    let alt = model
        .scale
        .expect(|s| alt_z_sf_given_sigma(t, s, &comps) + alt_z_cdf_given_sigma(-t, s, &comps));
    Ok(null / (null + model.pi * alt))
}

/// mFDR of `z ≥ t` under a general model.
pub fn mfdr_one_sided(model: &MixtureModel, t: f64) -> Result<f64> {
    let comps = model.effect.components()?;
    let null = (1.0 - model.pi) * std_normal_sf(t / model.null_scale);
    let alt = model.scale.expect(|s| alt_z_sf_given_sigma(t, s, &comps));
    Ok(null / (null + model.pi * alt))
}

/// Oracle two-sided `|z|` threshold for a general model.
pub fn p_threshold(model: &MixtureModel, alpha: f64) -> Result<f64> {
    model.validate()?;
    if model.pi == 0.0 {
        return domain("p-value oracle threshold undefined without signals");
    }
    model.effect.components()?;
    solve_decreasing(
        |t| mfdr_two_sided(model, t).unwrap_or(f64::NAN),
        T_BRACKET.0,
        T_BRACKET.1,
        alpha,
        "p-value threshold",
    )
}

/// Oracle one-sided threshold `z ≥ t` for a general model.
pub fn z_threshold(model: &MixtureModel, alpha: f64) -> Result<f64> {
    model.validate()?;
    if model.pi == 0.0 {
        return domain("z-value oracle threshold undefined without signals");
    }
    model.effect.components()?;
    solve_decreasing(
        |t| mfdr_one_sided(model, t).unwrap_or(f64::NAN),
        T_BRACKET.0,
        T_BRACKET.1,
        alpha,
        "z-value threshold",
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{true_lfdr_full, EffectLaw, ScaleLaw};
    use crate::numeric::integrate_adaptive;

    #[test]
    fn illustrative_model_values() {
        let r = toy_oracle_report(&ToyModel::illustrative()).unwrap();
        assert!((r.t_p - 3.43).abs() < 0.01, "{r:?}");
        assert!((r.p_cut - 0.0006).abs() < 0.0001);
        assert!((r.t_z - 3.13).abs() < 0.01);
        assert!((r.lfdr_cut_z - 0.24).abs() < 0.01);
        assert!((r.lambda_star - 0.28).abs() < 0.01);
        assert!((r.ap_p - 0.050).abs() < 0.002);
        assert!((r.ap_z - 0.072).abs() < 0.002);
        assert!((r.ap_full - 0.105).abs() < 0.002);
    }

    #[test]
    fn thresholds_plug_back_to_alpha() {
        let m = ToyModel::illustrative();
        let r = toy_oracle_report(&m).unwrap();
        assert!((m.mfdr_p(r.t_p) - m.alpha).abs() < 1e-5);
        assert!((m.mfdr_z(r.t_z) - m.alpha).abs() < 1e-5);
        assert!((m.mfdr_full(r.lambda_star) - m.alpha).abs() < 1e-5);
    }

    #[test]
    fn relaxed_alpha_drives_t_p_to_zero() {
        let m = ToyModel { alpha: 0.8999, ..ToyModel::illustrative() };
        assert!(toy_threshold_p(&m).unwrap() < 0.05);
    }

    #[test]
    fn nearly_all_signal_pushes_lambda_star_to_one() {
        let m = ToyModel { pi: 0.999, ..ToyModel::illustrative() };
        assert!(toy_lambda_star(&m).unwrap() > 0.99);
    }

    #[test]
    fn strong_effects_give_full_power() {
        let m = ToyModel { mu_a: 60.0, ..ToyModel::illustrative() };
        let ap = toy_average_powers(&m).unwrap();
        assert!(ap.ap_p > 0.99 && ap.ap_z > 0.99 && ap.ap_full > 0.99, "{ap:?}");
    }

    #[test]
    fn negative_effect_mirrors_positive() {
        let a = toy_oracle_report(&ToyModel::illustrative()).unwrap();
        let b = toy_oracle_report(&ToyModel { mu_a: -2.0, ..ToyModel::illustrative() }).unwrap();
        assert!((a.t_p - b.t_p).abs() < 1e-12 && (a.ap_full - b.ap_full).abs() < 1e-12);
    }

    #[test]
    fn invalid_models() {
        assert!(toy_threshold_p(&ToyModel { sigma_lo: 0.0, ..ToyModel::illustrative() }).is_err());
        assert!(toy_threshold_p(&ToyModel { mu_a: 0.0, ..ToyModel::illustrative() }).is_err());
        assert!(toy_threshold_p(&ToyModel { pi: 1.0, ..ToyModel::illustrative() }).is_err());
    }

    // First grid point at which a ratio, computed with adaptive quadrature,
    // falls to alpha. Used as an independent oracle for the thresholds.
    fn grid_root(ratio: impl Fn(f64) -> f64, alpha: f64) -> f64 {
        let mut t = 0.0;
        while ratio(t) > alpha {
            t += 1e-3;
        }
        t
    }

    #[test]
    fn one_sided_never_exceeds_two_sided() {
        for pi in [0.05, 0.1, 0.2] {
            for mu in [1.0, 2.0, 3.0] {
                let m = ToyModel { pi, mu_a: mu, ..ToyModel::illustrative() };
                let avg = |f: &dyn Fn(f64) -> f64| integrate_adaptive(f, 0.5, 4.0, 1e-12) / 3.5;
                let rp = |t: f64| {
                    let n = 2.0 * (1.0 - pi) * std_normal_sf(t);
                    n / (n + pi * avg(&|s| std_normal_sf(t + mu / s) + std_normal_sf(t - mu / s)))
                };
                let rz = |t: f64| {
                    let n = (1.0 - pi) * std_normal_sf(t);
                    n / (n + pi * avg(&|s| std_normal_sf(t - mu / s)))
                };
                let (bp, bz) = (grid_root(rp, 0.1), grid_root(rz, 0.1));
                assert!(bz <= bp);
                assert!((toy_threshold_p(&m).unwrap() - bp).abs() < 1.1e-3);
                assert!((toy_threshold_z(&m).unwrap() - bz).abs() < 1.1e-3);
            }
        }
    }

    #[test]
    fn power_ordering_on_grid() {
        for pi in [0.05, 0.1, 0.15, 0.2, 0.3] {
            for mu in [1.5, 2.0, 2.5, 3.0, 4.0] {
                let m = ToyModel { pi, mu_a: mu, ..ToyModel::illustrative() };
                let ap = toy_average_powers(&m).unwrap();
                assert!(ap.ap_p <= ap.ap_z + 1e-9 && ap.ap_z <= ap.ap_full + 1e-9, "{pi} {mu} {ap:?}");
            }
        }
    }

    #[test]
    fn full_rule_cutoff_inverts_exact_posterior() {
        let toy = ToyModel::illustrative();
        let lambda = toy_lambda_star(&toy).unwrap();
        let model = MixtureModel::new(0.1, EffectLaw::PointMass(2.0), ScaleLaw::Uniform { lo: 0.5, hi: 4.0 });
        for sigma in [0.7, 1.5, 3.2] {
            let z = crate::numeric::bisect(
                |z| true_lfdr_full(z * sigma, sigma, &model).unwrap(),
                -5.0,
                15.0,
                lambda,
                1e-12,
            )
            .unwrap();
            assert!((z - toy.full_rule_z_cutoff(lambda, sigma)).abs() < 1e-8);
        }
    }

    #[test]
    fn general_thresholds_agree_with_toy() {
        let toy = ToyModel::illustrative();
        let model = MixtureModel::new(0.1, EffectLaw::PointMass(2.0), ScaleLaw::Uniform { lo: 0.5, hi: 4.0 });
        assert!((p_threshold(&model, 0.1).unwrap() - toy_threshold_p(&toy).unwrap()).abs() < 1e-6);
        assert!((z_threshold(&model, 0.1).unwrap() - toy_threshold_z(&toy).unwrap()).abs() < 1e-6);
    }
}
