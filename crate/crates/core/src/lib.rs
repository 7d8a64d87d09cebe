//! Simulation laboratory for safety-constrained stochastic multi-armed bandits.
//!
//! Each arm yields a (reward, safety-risk) pair. An arm is *safe* when its mean
//! risk does not exceed the tolerated level `alpha`, and per-round regret is
//! `max(mu_star - mu_k, nu_k - alpha)`, so playing an unsafe arm is penalised
//! even when its reward is high.
//!
//! The crate is organised as:
//! - [`stats`]: Bernoulli KL divergence, KL-UCB inversion, the Beta law.
//! - [`env`]: problem instances, sampling and ground-truth gaps.
//! - [`agents`]: the doubly optimistic index policy, the two Thompson sampling
//!   variants, naive Thompson safety indices and two policy-based baselines.
//! - [`bounds`]: main terms of the instance-dependent upper and lower bounds.
//! - [`harness`]: configuration, seeded trials, aggregation and CSV/JSON output.
//!
//! Arms are indexed from zero throughout.

pub mod agents;
pub mod bounds;
pub mod env;
pub mod error;
pub mod harness;
pub mod stats;

pub use error::{Error, Result};
