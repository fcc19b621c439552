//! Fitting an empirical null to over-dispersed z-values and using it for
//! p-values.

use hart::estimation::empirical_null;
use hart::procedures::{bh, pvalue_from_z};
use hart::sim::null_zvalues;

fn main() -> hart::Result<()> {
    for scale in [0.8, 1.0, 1.3] {
        let z = null_zvalues(50_000, scale, 11);
        let fit = empirical_null(&z, 0.99)?;
        let k = |s0: f64| -> hart::Result<usize> {
            let p: Vec<f64> = z.iter().map(|&v| pvalue_from_z(v, s0)).collect::<hart::Result<_>>()?;
            Ok(bh(&p, 0.1)?.k)
        };
        println!(
            "true sd {scale}: fitted {:.4}; BH rejections of pure noise with N(0,1) null {}, with fitted null {}",
            fit.sigma0,
            k(1.0)?,
            k(fit.sigma0)?
        );
    }
    Ok(())
}
