use crate::error::{domain, Result};

/// Storey's estimate of the non-null proportion,
/// `1 - #{p > λ} / (m (1 - λ))`, clamped to `[0, 1]`.
pub fn storey_pi(pvalues: &[f64], lambda: f64) -> Result<f64> {
    if pvalues.is_empty() {
        return domain("storey_pi needs at least one p-value");
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return domain(format!("lambda must lie in (0, 1), got {lambda}"));
    }
    let m = pvalues.len() as f64;
    let above = pvalues.iter().filter(|&&p| p > lambda).count() as f64;
    Ok((1.0 - above / (m * (1.0 - lambda))).clamp(0.0, 1.0))
}
