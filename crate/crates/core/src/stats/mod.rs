//! Numerical kernel: Bernoulli KL divergence and its inversions, the Beta law,
//! and deterministic random streams.

mod beta;
mod kl;
mod rng;
mod special;

pub use beta::{beta_cdf, beta_mean, beta_pdf, beta_quantile, beta_sample, beta_std_dev, BetaParams};
pub use kl::{
    bern_kl, bern_kl_directed, bisection_rounds, kl_ucb_invert_lower, kl_ucb_invert_lower_rounds,
    kl_ucb_invert_upper, kl_ucb_invert_upper_rounds, kl_unchecked, Side,
};
pub use rng::{derive_seed, RngStream};
pub use special::{ln_beta, ln_gamma};

use crate::error::{Error, Result};

pub(crate) fn check_probability(name: &str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} = {value} is not a probability in [0, 1]"
        )))
    }
}
