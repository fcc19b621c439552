use crate::error::{domain, HartError, Result};
use crate::model::TestItem;
use crate::numeric::INV_SQRT_2PI;

use super::Bandwidths;

/// Items paired with nonnegative weights for the weighted bivariate estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample {
    pub items: Vec<TestItem>,
    pub weights: Vec<f64>,
}

impl WeightedSample {
    pub fn new(items: Vec<TestItem>, weights: Vec<f64>) -> Result<Self> {
        if items.len() != weights.len() {
            return domain(format!(
                "weighted sample has {} items but {} weights",
                items.len(),
                weights.len()
            ));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return domain("weights must be finite");
        }
        Ok(Self { items, weights })
    }

    pub fn unweighted(items: Vec<TestItem>) -> Self {
        let weights = vec![1.0; items.len()];
        Self { items, weights }
    }
}

/// Column layout of `(x, σ)` used by the hot loops.
#[derive(Debug, Clone)]
pub(crate) struct KernelSample {
    pub xs: Vec<f64>,
    pub sigmas: Vec<f64>,
}

impl KernelSample {
    pub fn from_items(items: &[TestItem]) -> Self {
        Self {
            xs: items.iter().map(|t| t.x).collect(),
            sigmas: items.iter().map(|t| t.sigma).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    /// Weighted bivariate estimate at `(x, sigma)`:
    ///
    /// `Σ_j [w_j φ_{h_σ}(σ - σ_j) / Σ_k w_k φ_{h_σ}(σ - σ_k)] · φ_{h_x σ_j}(x - x_j)`
    ///
    /// `weights = None` means all ones. `exclude` drops one index from both
    /// sums. Returns `None` if the normalizing sum is not positive.
    pub fn density_at(
        &self,
        x: f64,
        sigma: f64,
        weights: Option<&[f64]>,
        h: Bandwidths,
        exclude: Option<usize>,
    ) -> Option<f64> {
        let inv_two_hs2 = 0.5 / (h.h_sigma * h.h_sigma);
        let inv_hx = 1.0 / h.h_x;
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..self.xs.len() {
            if exclude == Some(j) {
                continue;
            }
            let w = weights.map_or(1.0, |w| w[j]);
            if w == 0.0 {
                continue;
            }
            let ds = sigma - self.sigmas[j];
            let ks = w * (-ds * ds * inv_two_hs2).exp();
            if ks == 0.0 {
                continue;
            }
            den += ks;
            let inv_bw = inv_hx / self.sigmas[j];
            let u = (x - self.xs[j]) * inv_bw;
            num += ks * INV_SQRT_2PI * inv_bw * (-0.5 * u * u).exp();
        }
        (den > 0.0).then(|| num / den)
    }
}

/// Weighted bivariate kernel estimate of the density of `x` given `σ`.
///
/// The `σ`-weights of the sample are normalized to sum to one at the
/// evaluation point, so a common rescaling of the weights has no effect.
pub fn weighted_bivariate_kde(
    eval_point: (f64, f64),
    sample: &WeightedSample,
    h: Bandwidths,
) -> Result<f64> {
    let (x, sigma) = eval_point;
    if sample.items.len() != sample.weights.len() {
        return domain("weighted sample lengths differ");
    }
    let ks = KernelSample::from_items(&sample.items);
    ks.density_at(x, sigma, Some(&sample.weights), h, None)
        .ok_or_else(|| HartError::Estimation {
            x,
            sigma,
            reason: "all effective kernel weights are zero".into(),
        })
}

/// Gaussian kernel density estimate `(1 / (n h)) Σ φ((z - z_j) / h)`.
pub fn univariate_kde(z: f64, sample: &[f64], h: f64) -> Result<f64> {
    if sample.is_empty() {
        return domain("univariate_kde needs a nonempty sample");
    }
    if !(h > 0.0) {
        return domain(format!("bandwidth must be positive, got {h}"));
    }
    let inv_h = 1.0 / h;
    let sum: f64 = sample
        .iter()
        .map(|&zj| {
            let u = (z - zj) * inv_h;
            (-0.5 * u * u).exp()
        })
        .sum();
    Ok(sum * INV_SQRT_2PI * inv_h / sample.len() as f64)
}
