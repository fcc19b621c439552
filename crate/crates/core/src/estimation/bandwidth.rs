use crate::model::TestItem;
use crate::numeric::{mean_sd, quantile_sorted};

/// Bandwidth pair for the bivariate estimator. The kernel in the `x`
/// direction for sample point `j` has width `h_x · σ_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bandwidths {
    pub h_x: f64,
    pub h_sigma: f64,
}

impl Bandwidths {
    pub fn new(h_x: f64, h_sigma: f64) -> Option<Self> {
        let ok = |h: f64| h > 0.0 && h.is_finite();
        (ok(h_x) && ok(h_sigma)).then_some(Self { h_x, h_sigma })
    }
}

/// Result of a rule-of-thumb selection with per-coordinate fallback flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthSelection {
    pub bandwidths: Bandwidths,
    pub fallback_x: bool,
    pub fallback_sigma: bool,
}

/// Silverman's rule `0.9 · min(sd, IQR / 1.34) · n^(-1/5)`.
///
/// Returns the bandwidth and whether the degenerate fallback
/// `0.1 · (max - min + 1)` was used instead.
pub fn silverman_1d(values: &[f64]) -> (f64, bool) {
    let n = values.len();
    if n == 0 {
        return (0.1, true);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let range = sorted[n - 1] - sorted[0];
    let fallback = 0.1 * (range + 1.0);
    if n < 2 {
        return (fallback, true);
    }
    let (_, sd) = mean_sd(values);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let robust = iqr / 1.34;
    let spread = if robust > 0.0 { sd.min(robust) } else { sd };
    if !(spread > 0.0) || !spread.is_finite() {
        return (fallback, true);
    }
    (0.9 * spread * (n as f64).powf(-0.2), false)
}

/// Rule-of-thumb bandwidths from the `x` and `σ` coordinates of `subset`.
pub fn silverman_bandwidths(subset: &[TestItem]) -> BandwidthSelection {
    let xs: Vec<f64> = subset.iter().map(|t| t.x).collect();
    let sigmas: Vec<f64> = subset.iter().map(|t| t.sigma).collect();
    let (h_x, fallback_x) = silverman_1d(&xs);
    let (h_sigma, fallback_sigma) = silverman_1d(&sigmas);
    BandwidthSelection {
        bandwidths: Bandwidths { h_x, h_sigma },
        fallback_x,
        fallback_sigma,
    }
}
