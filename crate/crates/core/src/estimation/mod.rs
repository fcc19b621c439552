//! Data-driven estimation of the heteroscedasticity-adjusted statistics.
//!
//! The pipeline is: Storey's non-null proportion, Silverman bandwidths on the
//! likely-non-null subset, an unweighted bivariate kernel estimate of the
//! mixture density (pilot statistics), then two reweighted passes that
//! estimate the alternative density and give the final statistics.

mod bandwidth;
mod empirical_null;
mod kde;
mod proportion;
mod tstats;

pub use bandwidth::{silverman_1d, silverman_bandwidths, BandwidthSelection, Bandwidths};
pub use empirical_null::{empirical_null, truncated_normal_sd_factor, EmpiricalNull};
pub use kde::{univariate_kde, weighted_bivariate_kde, WeightedSample};
pub use proportion::storey_pi;
pub use tstats::{
    estimate_tstats, pilot_tstats, refine_tstats, EstimationOptions, HartFit, Stage, TStatVector,
};

pub(crate) use kde::KernelSample;
