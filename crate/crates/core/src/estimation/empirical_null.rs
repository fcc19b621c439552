use crate::error::{domain, HartError, Result};
use crate::numeric::{mean_sd, quantile_sorted, std_normal_cdf, std_normal_pdf, std_normal_quantile};

/// Fitted null `N(0, sigma0²)` for over- or under-dispersed z-values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalNull {
    pub sigma0: f64,
    pub coverage: f64,
}

/// Standard deviation of a standard normal truncated to its central
/// `coverage` mass.
pub fn truncated_normal_sd_factor(coverage: f64) -> f64 {
    let b = std_normal_quantile(1.0 - (1.0 - coverage) / 2.0);
    let mass = 2.0 * std_normal_cdf(b) - 1.0;
    (1.0 - 2.0 * b * std_normal_pdf(b) / mass).sqrt()
}

/// Fits the null scale from the central `coverage` fraction of the z-values.
///
/// Values between the lower and upper `(1 - coverage) / 2` sample quantiles
/// are kept; their standard deviation is divided by the truncated-normal
/// factor so that a pure `N(0, s²)` sample returns `s`.
pub fn empirical_null(zvalues: &[f64], coverage: f64) -> Result<EmpiricalNull> {
    if zvalues.len() < 100 {
        return Err(HartError::InsufficientData(format!(
            "empirical null needs at least 100 z-values, got {}",
            zvalues.len()
        )));
    }
    if !(coverage > 0.0 && coverage < 1.0) {
        return domain(format!("coverage must lie in (0, 1), got {coverage}"));
    }
    let mut sorted = zvalues.to_vec();
    sorted.sort_by(f64::total_cmp);
    let tail = (1.0 - coverage) / 2.0;
    let lo = quantile_sorted(&sorted, tail);
    let hi = quantile_sorted(&sorted, 1.0 - tail);
    let central: Vec<f64> = sorted.iter().copied().filter(|&z| z >= lo && z <= hi).collect();
    let (_, sd) = mean_sd(&central);
    let sigma0 = sd / truncated_normal_sd_factor(coverage);
    if !(sigma0 > 0.0) || !sigma0.is_finite() {
        return domain("z-values have no spread; empirical null undefined");
    }
    Ok(EmpiricalNull { sigma0, coverage })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn draws(n: usize, scale: f64, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| { let e: f64 = StandardNormal.sample(&mut rng); scale * e }).collect()
    }

    #[test]
    fn factor_for_99_percent() {
        let b: f64 = 2.575_829_303_548_901;
        let phi_b = (-0.5 * b * b).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let expected = (1.0 - 2.0 * b * phi_b / 0.99).sqrt();
        assert!((truncated_normal_sd_factor(0.99) - expected).abs() < 1e-9);
    }

    #[test]
    fn recovers_standard_and_inflated_nulls() {
        let s = empirical_null(&draws(50_000, 1.0, 1), 0.99).unwrap().sigma0;
        assert!((s - 1.0).abs() < 0.03, "{s}");
        let s = empirical_null(&draws(50_000, 1.3, 2), 0.99).unwrap().sigma0;
        assert!((s - 1.3).abs() < 0.04, "{s}");
    }

    #[test]
    fn scale_equivariance() {
        let z = draws(2000, 1.0, 3);
        let a = empirical_null(&z, 0.99).unwrap().sigma0;
        let zc: Vec<f64> = z.iter().map(|v| 2.5 * v).collect();
        let b = empirical_null(&zc, 0.99).unwrap().sigma0;
        assert!((b - 2.5 * a).abs() < 1e-12 * b);
    }

    #[test]
    fn too_few_values() {
        assert!(matches!(empirical_null(&[0.0; 99], 0.99), Err(HartError::InsufficientData(_))));
    }
}
