use rayon::prelude::*;

use crate::error::{HartError, Result};
use crate::model::{posterior_null, TestItem};
use crate::numeric::{normal_pdf, DENSITY_FLOOR};
use crate::procedures::pvalue_from_z;

use super::{silverman_bandwidths, storey_pi, BandwidthSelection, Bandwidths, KernelSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Pilot,
    Refined,
}

/// Estimated posterior null probabilities, one per retained hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct TStatVector {
    pub t: Vec<f64>,
    pub pi_hat: f64,
    pub bandwidths: Bandwidths,
    pub stage: Stage,
    pub jackknife: bool,
}

fn exclusion(jackknife: bool, i: usize) -> Option<usize> {
    jackknife.then_some(i)
}

fn estimation_error(x: f64, sigma: f64, what: &str) -> HartError {
    HartError::Estimation { x, sigma, reason: format!("{what}: all effective kernel weights are zero") }
}

/// First-pass statistics `min{(1 - π̂) f_0(x_j) / f̂*(x_j), 1}` with the
/// unweighted bivariate estimate `f̂*` of the mixture density.
pub fn pilot_tstats(
    data: &[TestItem],
    pi_hat: f64,
    h: Bandwidths,
    null_scale: f64,
    jackknife: bool,
) -> Result<TStatVector> {
    if data.len() < 2 {
        return Err(HartError::InsufficientData(format!(
            "pilot statistics need at least 2 items, got {}",
            data.len()
        )));
    }
    let sample = KernelSample::from_items(data);
    let t = pilot_values(&sample, pi_hat, h, null_scale, jackknife)?;
    Ok(TStatVector { t, pi_hat, bandwidths: h, stage: Stage::Pilot, jackknife })
}

fn pilot_values(
    sample: &KernelSample,
    pi_hat: f64,
    h: Bandwidths,
    null_scale: f64,
    jackknife: bool,
) -> Result<Vec<f64>> {
    (0..sample.len())
        .into_par_iter()
        .map(|i| {
            let (x, s) = (sample.xs[i], sample.sigmas[i]);
            let fstar = sample
                .density_at(x, s, None, h, exclusion(jackknife, i))
                .ok_or_else(|| estimation_error(x, s, "pilot density"))?;
            if fstar < DENSITY_FLOOR {
                return Ok(1.0);
            }
            let f0 = normal_pdf(x, s * null_scale).max(DENSITY_FLOOR);
            Ok(((1.0 - pi_hat) * f0 / fstar).clamp(0.0, 1.0))
        })
        .collect()
}

/// Posterior null probabilities from a weighted estimate of the alternative
/// density evaluated at every sample point.
fn weighted_pass(
    sample: &KernelSample,
    weights: &[f64],
    pi_hat: f64,
    h: Bandwidths,
    null_scale: f64,
    jackknife: bool,
) -> Result<Vec<f64>> {
    (0..sample.len())
        .into_par_iter()
        .map(|i| {
            let (x, s) = (sample.xs[i], sample.sigmas[i]);
            let f1 = sample
                .density_at(x, s, Some(weights), h, exclusion(jackknife, i))
                .ok_or_else(|| estimation_error(x, s, "alternative density"))?;
            let f0 = normal_pdf(x, s * null_scale);
            Ok(posterior_null(f0, f1, pi_hat).0)
        })
        .collect()
}

/// Two reweighting passes starting from pilot statistics.
///
/// Weights `1 - T̂⁽⁰⁾` give the first alternative-density estimate and
/// `T̂⁽¹⁾`; weights `1 - T̂⁽¹⁾` give the second estimate and the final
/// statistics `(1 - π̂) f_0 / ((1 - π̂) f_0 + π̂ f̂_1)`.
pub fn refine_tstats(
    data: &[TestItem],
    pilot: &TStatVector,
    pi_hat: f64,
    h: Bandwidths,
    null_scale: f64,
    jackknife: bool,
) -> Result<TStatVector> {
    let sample = KernelSample::from_items(data);
    refine_inner(&sample, pilot, pi_hat, h, null_scale, jackknife).map(|(t, _)| t)
}

fn refine_inner(
    sample: &KernelSample,
    pilot: &TStatVector,
    pi_hat: f64,
    h: Bandwidths,
    null_scale: f64,
    jackknife: bool,
) -> Result<(TStatVector, Vec<f64>)> {
    if pilot.stage != Stage::Pilot {
        return Err(HartError::Domain("refinement expects pilot-stage statistics".into()));
    }
    if pilot.t.len() != sample.len() {
        return Err(HartError::Domain(format!(
            "pilot has {} statistics for {} items",
            pilot.t.len(),
            sample.len()
        )));
    }
    let m = sample.len();
    let done = |t: Vec<f64>, w: Vec<f64>| {
        (TStatVector { t, pi_hat, bandwidths: h, stage: Stage::Refined, jackknife }, w)
    };
    // With no estimated signal the alternative term vanishes identically.
    if pi_hat == 0.0 {
        return Ok(done(vec![1.0; m], vec![0.0; m]));
    }
    let w0: Vec<f64> = pilot.t.iter().map(|t| 1.0 - t).collect();
    let t1 = weighted_pass(sample, &w0, pi_hat, h, null_scale, jackknife)?;
    let w1: Vec<f64> = t1.iter().map(|t| 1.0 - t).collect();
    let t2 = weighted_pass(sample, &w1, pi_hat, h, null_scale, jackknife)?;
    Ok(done(t2, w1))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationOptions {
    /// Storey threshold.
    pub lambda: f64,
    pub jackknife: bool,
    /// Null law of `x` given `σ` is `N(0, (σ · null_scale)²)`.
    pub null_scale: f64,
    /// Only items with `σ` strictly below this cap are analyzed.
    pub sigma_filter: Option<f64>,
    /// Overrides the estimated proportion when set.
    pub pi_hat: Option<f64>,
    /// Overrides the rule-of-thumb bandwidths when set.
    pub bandwidths: Option<Bandwidths>,
}

impl Default for EstimationOptions {
    fn default() -> Self {
        Self {
            lambda: 0.5,
            jackknife: true,
            null_scale: 1.0,
            sigma_filter: None,
            pi_hat: None,
            bandwidths: None,
        }
    }
}

/// Fitted statistics plus everything needed to evaluate the fitted
/// posterior at new points.
#[derive(Debug, Clone)]
pub struct HartFit {
    /// Indices into the input that passed the `σ` filter, in input order.
    pub retained: Vec<usize>,
    /// Indices removed by the `σ` filter; never rejected.
    pub filtered: Vec<usize>,
    pub tstats: TStatVector,
    pub null_scale: f64,
    /// True when the likely-non-null subset was unusable and the bandwidths
    /// were chosen from the whole retained sample.
    pub bandwidth_subset_fallback: bool,
    pub bandwidth_selection: Option<BandwidthSelection>,
    n_total: usize,
    sample: KernelSample,
    refined_weights: Vec<f64>,
}

impl HartFit {
    /// Statistics aligned to the original input; filtered items are `None`.
    pub fn t_by_input(&self) -> Vec<Option<f64>> {
        let mut out = vec![None; self.n_total];
        for (k, &i) in self.retained.iter().enumerate() {
            out[i] = Some(self.tstats.t[k]);
        }
        out
    }

    pub fn pi_hat(&self) -> f64 {
        self.tstats.pi_hat
    }

    /// Final-pass alternative density estimate at an arbitrary point, using
    /// every retained item.
    pub fn alt_density_at(&self, x: f64, sigma: f64) -> Result<f64> {
        self.sample
            .density_at(x, sigma, Some(&self.refined_weights), self.tstats.bandwidths, None)
            .ok_or_else(|| estimation_error(x, sigma, "alternative density"))
    }

    /// Fitted posterior null probability at an arbitrary `(x, σ)`.
    pub fn t_at(&self, x: f64, sigma: f64) -> Result<f64> {
        let pi = self.tstats.pi_hat;
        if pi == 0.0 {
            return Ok(1.0);
        }
        let f1 = self.alt_density_at(x, sigma)?;
        let f0 = normal_pdf(x, sigma * self.null_scale);
        Ok(posterior_null(f0, f1, pi).0)
    }

    /// Smallest positive z at which the fitted statistic at noise level
    /// `sigma` drops to `threshold`. Scans `(0, z_max]` and refines the first
    /// crossing by bisection; `None` if the statistic never gets there.
    pub fn z_cutoff(&self, sigma: f64, threshold: f64, z_max: f64) -> Result<Option<f64>> {
        let step = 0.05;
        let below = |z: f64| -> Result<bool> { Ok(self.t_at(z * sigma, sigma)? <= threshold) };
        let mut prev = 0.0;
        let mut z = step;
        while z <= z_max + 1e-12 {
            if below(z)? {
                let (mut lo, mut hi) = (prev, z);
                for _ in 0..40 {
                    let mid = 0.5 * (lo + hi);
                    if below(mid)? {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                return Ok(Some(hi));
            }
            prev = z;
            z += step;
        }
        Ok(None)
    }
}

/// Full estimation pipeline: σ filter, Storey proportion, bandwidths from
/// `{i : p_i < π̂}`, pilot statistics, two refinement passes.
pub fn estimate_tstats(data: &[TestItem], opts: &EstimationOptions) -> Result<HartFit> {
    let (retained, filtered): (Vec<usize>, Vec<usize>) = (0..data.len())
        .partition(|&i| opts.sigma_filter.is_none_or(|cap| data[i].sigma < cap));
    if retained.len() < 10 {
        return Err(HartError::InsufficientData(format!(
            "estimation needs at least 10 retained items, got {}",
            retained.len()
        )));
    }
    let items: Vec<TestItem> = retained.iter().map(|&i| data[i]).collect();
    let pvalues: Vec<f64> = items
        .iter()
        .map(|t| pvalue_from_z(t.z, opts.null_scale))
        .collect::<Result<_>>()?;
    let pi_hat = match opts.pi_hat {
        Some(p) => p.clamp(0.0, 1.0),
        None => storey_pi(&pvalues, opts.lambda)?,
    };

    let (h, selection, subset_fallback) = match opts.bandwidths {
        Some(h) => (h, None, false),
        None => {
            let subset: Vec<TestItem> = items
                .iter()
                .zip(&pvalues)
                .filter(|(_, &p)| p < pi_hat)
                .map(|(t, _)| *t)
                .collect();
            let sel = silverman_bandwidths(&subset);
            if subset.len() >= 2 && !sel.fallback_x && !sel.fallback_sigma {
                (sel.bandwidths, Some(sel), false)
            } else {
                let sel = silverman_bandwidths(&items);
                (sel.bandwidths, Some(sel), true)
            }
        }
    };

    let sample = KernelSample::from_items(&items);
    let (tstats, refined_weights) = if pi_hat == 0.0 {
        let m = items.len();
        (
            TStatVector { t: vec![1.0; m], pi_hat, bandwidths: h, stage: Stage::Refined, jackknife: opts.jackknife },
            vec![0.0; m],
        )
    } else {
        let t0 = pilot_values(&sample, pi_hat, h, opts.null_scale, opts.jackknife)?;
        let pilot = TStatVector { t: t0, pi_hat, bandwidths: h, stage: Stage::Pilot, jackknife: opts.jackknife };
        refine_inner(&sample, &pilot, pi_hat, h, opts.null_scale, opts.jackknife)?
    };

    Ok(HartFit {
        retained,
        filtered,
        tstats,
        null_scale: opts.null_scale,
        bandwidth_subset_fallback: subset_fallback,
        bandwidth_selection: selection,
        n_total: data.len(),
        sample,
        refined_weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::std_normal_pdf;

    fn items(v: &[(f64, f64)]) -> Vec<TestItem> {
        v.iter().map(|&(x, s)| TestItem::new(x, s).unwrap()).collect()
    }

    // Direct transcription of the estimator formulas, independent of
    // `KernelSample`: explicit Gaussian kernels with their constants.
    fn phi_h(u: f64, h: f64) -> f64 {
        std_normal_pdf(u / h) / h
    }

    fn oracle_weighted(x: f64, s: f64, d: &[(f64, f64)], w: &[f64], h: Bandwidths, skip: Option<usize>) -> f64 {
        let idx: Vec<usize> = (0..d.len()).filter(|&j| Some(j) != skip).collect();
        let den: f64 = idx.iter().map(|&k| w[k] * phi_h(s - d[k].1, h.h_sigma)).sum();
        idx.iter()
            .map(|&j| w[j] * phi_h(s - d[j].1, h.h_sigma) / den * phi_h(x - d[j].0, h.h_x * d[j].1))
            .sum()
    }

    fn oracle_pipeline(d: &[(f64, f64)], pi: f64, h: Bandwidths, jk: bool) -> (Vec<f64>, Vec<f64>) {
        let m = d.len();
        let ones = vec![1.0; m];
        let skip = |i: usize| if jk { Some(i) } else { None };
        let f0: Vec<f64> = d.iter().map(|&(x, s)| phi_h(x, s)).collect();
        let t0: Vec<f64> = (0..m)
            .map(|i| ((1.0 - pi) * f0[i] / oracle_weighted(d[i].0, d[i].1, d, &ones, h, skip(i))).min(1.0))
            .collect();
        let post = |w: &[f64]| -> Vec<f64> {
            (0..m)
                .map(|i| {
                    let f1 = oracle_weighted(d[i].0, d[i].1, d, w, h, skip(i));
                    (1.0 - pi) * f0[i] / ((1.0 - pi) * f0[i] + pi * f1)
                })
                .collect()
        };
        let w0: Vec<f64> = t0.iter().map(|t| 1.0 - t).collect();
        let t1 = post(&w0);
        let w1: Vec<f64> = t1.iter().map(|t| 1.0 - t).collect();
        (t0, post(&w1))
    }

    const THREE: [(f64, f64); 3] = [(0.2, 1.0), (3.1, 0.8), (-0.7, 1.6)];

    #[test]
    fn three_point_pilot_matches_oracle() {
        let h = Bandwidths { h_x: 0.9, h_sigma: 0.5 };
        for jk in [false, true] {
            let got = pilot_tstats(&items(&THREE), 0.3, h, 1.0, jk).unwrap();
            let (want, _) = oracle_pipeline(&THREE, 0.3, h, jk);
            for (a, b) in got.t.iter().zip(&want) {
                assert!((a - b).abs() < 1e-12, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn three_point_refinement_matches_oracle() {
        let h = Bandwidths { h_x: 0.9, h_sigma: 0.5 };
        let data = items(&THREE);
        let pilot = pilot_tstats(&data, 0.3, h, 1.0, false).unwrap();
        let got = refine_tstats(&data, &pilot, 0.3, h, 1.0, false).unwrap();
        let (_, want) = oracle_pipeline(&THREE, 0.3, h, false);
        assert_eq!(got.stage, Stage::Refined);
        for (a, b) in got.t.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn pilot_boundaries() {
        let h = Bandwidths { h_x: 0.5, h_sigma: 0.5 };
        let data = items(&[(0.1, 1.0), (0.3, 1.1), (-0.2, 0.9), (2.5, 1.0)]);
        let all_signal = pilot_tstats(&data, 1.0, h, 1.0, false).unwrap();
        assert!(all_signal.t.iter().all(|&t| t == 0.0));
        // Tightly clustered at zero: the kernel estimate is below the null
        // density there, so the clamp binds.
        let tight = items(&[(0.0, 1.0), (0.001, 1.0), (-0.001, 1.0), (0.0005, 1.0)]);
        let p = pilot_tstats(&tight, 0.0, Bandwidths { h_x: 2.0, h_sigma: 0.5 }, 1.0, false).unwrap();
        assert!(p.t.iter().all(|&t| t == 1.0));
    }

    #[test]
    fn constant_pilot_weights_reduce_to_unweighted_estimate() {
        let data = items(&THREE);
        let h = Bandwidths { h_x: 0.9, h_sigma: 0.5 };
        let sample = KernelSample::from_items(&data);
        let w = vec![0.37; 3];
        for &(x, s) in &[(0.5, 1.2), (-1.0, 0.9)] {
            let a = sample.density_at(x, s, Some(&w), h, None).unwrap();
            let b = sample.density_at(x, s, None, h, None).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn refine_rejects_wrong_stage() {
        let h = Bandwidths { h_x: 0.9, h_sigma: 0.5 };
        let data = items(&THREE);
        let pilot = pilot_tstats(&data, 0.3, h, 1.0, false).unwrap();
        let refined = refine_tstats(&data, &pilot, 0.3, h, 1.0, false).unwrap();
        assert!(refine_tstats(&data, &refined, 0.3, h, 1.0, false).is_err());
    }

    #[test]
    fn jackknife_identity_small() {
        let d = [(0.4, 0.7), (1.9, 1.3), (-0.8, 2.2), (3.0, 0.9), (0.0, 1.0)];
        let data = items(&d);
        let h = Bandwidths { h_x: 0.6, h_sigma: 0.4 };
        let sample = KernelSample::from_items(&data);
        for j in 0..d.len() {
            let (x, s) = d[j];
            let full = sample.density_at(x, s, None, h, None).unwrap();
            let loo = sample.density_at(x, s, None, h, Some(j)).unwrap();
            let s_all: f64 = d.iter().map(|p| phi_h(s - p.1, h.h_sigma)).sum();
            let s_minus = s_all - phi_h(0.0, h.h_sigma);
            let rhs = s_minus / s_all * loo
                + 1.0 / (2.0 * s_all * std::f64::consts::PI * h.h_sigma * h.h_x * s);
            assert!((full - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn pipeline_is_deterministic_and_filters() {
        let data: Vec<TestItem> = (0..40)
            .map(|i| {
                let s = 0.5 + (i % 7) as f64 * 0.3;
                let x = if i % 5 == 0 { 3.0 + 0.1 * i as f64 } else { ((i * 37) % 11) as f64 / 5.0 - 1.0 };
                TestItem::new(x * s, s).unwrap()
            })
            .collect();
        let opts = EstimationOptions { sigma_filter: Some(2.0), ..Default::default() };
        let a = estimate_tstats(&data, &opts).unwrap();
        let b = estimate_tstats(&data, &opts).unwrap();
        assert_eq!(a.tstats.t, b.tstats.t);
        assert!(a.filtered.iter().all(|&i| data[i].sigma >= 2.0));
        assert_eq!(a.retained.len() + a.filtered.len(), data.len());
        let by_input = a.t_by_input();
        assert!(a.filtered.iter().all(|&i| by_input[i].is_none()));
        assert!(a.tstats.t.iter().all(|t| (0.0..=1.0).contains(t)));
    }

    #[test]
    fn too_few_retained() {
        let data = items(&[(0.0, 1.0); 9]);
        assert!(matches!(
            estimate_tstats(&data, &EstimationOptions::default()),
            Err(HartError::InsufficientData(_))
        ));
    }
}
