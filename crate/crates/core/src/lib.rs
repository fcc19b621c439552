//! Heteroscedasticity-adjusted ranking and thresholding (HART) for
//! large-scale multiple testing.
//!
//! Each hypothesis comes as a pair `(x_i, σ_i)`: an observed effect and its
//! noise standard deviation. Instead of standardizing to `z_i = x_i / σ_i`,
//! HART ranks hypotheses by an estimate of the posterior null probability
//! given the full pair, then applies a cumulative-mean step-up rule.
//!
//! Modules:
//! * [`model`]: the hierarchical mixture and its exact densities.
//! * [`estimation`]: Storey proportion, bandwidths, weighted kernel density
//!   estimates, the HART statistics and an empirical null.
//! * [`procedures`]: step-up, BH, AZ, HART and the oracle rules.
//! * [`oracle_calc`]: closed-form thresholds and powers for the toy model.
//! * [`sim`]: seeded scenario generation and replication.
//! * [`cli`]: the `hart` command line.

pub mod cli;
pub mod error;
pub mod estimation;
pub mod model;
pub mod numeric;
pub mod oracle_calc;
pub mod procedures;
pub mod sim;

pub use error::{HartError, Result};
pub use estimation::{estimate_tstats, EstimationOptions, HartFit};
pub use model::{EffectLaw, MixtureModel, Noise, ScaleLaw, TestItem, TruthVector};
pub use procedures::{bh, hart, step_up, DecisionSet, Procedure};
