//! Main terms of the instance-dependent regret bounds and of the lower bound.
//!
//! Upper bounds are evaluated at `ε = 0` with remainder terms dropped; each
//! coefficient multiplies `log T`.

use serde::Serialize;

use crate::env::{GroundTruth, SafeBanditInstance};
use crate::error::{Error, Result};
use crate::stats::{bern_kl_directed, Side};

/// How the safety divergence enters the upper-bound denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SafetyDenominator {
    /// `d_<(μ^k‖μ*) ∨ d_>(ν^k‖α)`.
    #[default]
    Full,
    /// `d_<(μ^k‖μ*) ∨ ⅔·d_>(ν^k‖α)`, the Beta-quantile analysis.
    TwoThirds,
}

impl SafetyDenominator {
    fn factor(self) -> f64 {
        match self {
            SafetyDenominator::Full => 1.0,
            SafetyDenominator::TwoThirds => 2.0 / 3.0,
        }
    }
}

/// Directed divergences of one arm against the competitor and the risk level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArmDivergences {
    /// `d_<(μ^k‖μ*)`.
    pub reward: f64,
    /// `d_>(ν^k‖α)`.
    pub safety: f64,
}

fn check_instance(truth: &GroundTruth, instance: &SafeBanditInstance) -> Result<()> {
    if truth.num_arms() != instance.num_arms() {
        return Err(Error::InvalidArgument(format!(
            "ground truth has {} arms, instance has {}",
            truth.num_arms(),
            instance.num_arms()
        )));
    }
    Ok(())
}

pub fn arm_divergences(
    truth: &GroundTruth,
    instance: &SafeBanditInstance,
    arm: usize,
) -> Result<ArmDivergences> {
    let law = instance
        .arms()
        .get(arm)
        .ok_or_else(|| Error::InvalidArgument(format!("arm {arm} out of range")))?;
    Ok(ArmDivergences {
        reward: bern_kl_directed(law.mu(), truth.mu_star, Side::Below)?,
        safety: bern_kl_directed(law.nu(), truth.alpha, Side::Above)?,
    })
}

/// `1 / (d_< ∨ c·d_>)` for `arm`, i.e. the coefficient of `log T` bounding its
/// expected number of plays. Infinite for arms with both gaps zero.
pub fn per_arm_upper_coeff(
    truth: &GroundTruth,
    instance: &SafeBanditInstance,
    arm: usize,
    denominator: SafetyDenominator,
) -> Result<f64> {
    let d = arm_divergences(truth, instance, arm)?;
    Ok(1.0 / d.reward.max(denominator.factor() * d.safety))
}

fn main_term(
    truth: &GroundTruth,
    instance: &SafeBanditInstance,
    denominator: SafetyDenominator,
    unsafe_only: bool,
) -> Result<f64> {
    check_instance(truth, instance)?;
    let mut total = 0.0;
    for k in (0..truth.num_arms()).filter(|&k| k != truth.k_star) {
        let gap = truth.regret_increment(k);
        if gap == 0.0 || (unsafe_only && !truth.is_unsafe(k)) {
            // Zero-gap arms (ties with the competitor) contribute nothing.
            continue;
        }
        let d = arm_divergences(truth, instance, k)?;
        let den = d.reward.max(denominator.factor() * d.safety);
        if den <= 0.0 {
            return Err(Error::numerics(
                "bounds",
                format!("arm {k} has a positive gap but zero divergence"),
            ));
        }
        total += if unsafe_only { 1.0 } else { gap } / den;
    }
    Ok(total)
}

/// Coefficient of `log T` in the regret bound: `Σ (Δ^k ∨ Γ^k) / (d_< ∨ d_>)`.
pub fn regret_main_term(truth: &GroundTruth, instance: &SafeBanditInstance) -> Result<f64> {
    main_term(truth, instance, SafetyDenominator::Full, false)
}

/// As [`regret_main_term`] with a choice of safety denominator.
pub fn regret_main_term_with(
    truth: &GroundTruth,
    instance: &SafeBanditInstance,
    denominator: SafetyDenominator,
) -> Result<f64> {
    main_term(truth, instance, denominator, false)
}

/// Coefficient of `log T` bounding the number of unsafe plays.
pub fn unsafe_main_term(truth: &GroundTruth, instance: &SafeBanditInstance) -> Result<f64> {
    main_term(truth, instance, SafetyDenominator::Full, true)
}

/// `√(28 K T log T) + 6 K log log T + 32`, with `log log` evaluated at `max(T, 16)`.
pub fn gap_independent_bound(num_arms: usize, horizon: f64) -> Result<f64> {
    if num_arms < 2 || !(horizon >= 3.0) {
        return Err(Error::InvalidArgument(format!(
            "gap-independent bound needs K >= 2 and T >= 3, got K={num_arms}, T={horizon}"
        )));
    }
    let k = num_arms as f64;
    let loglog = horizon.max(16.0).ln().ln();
    Ok((28.0 * k * horizon * horizon.ln()).sqrt() + 6.0 * k * loglog + 32.0)
}

/// Lower-bound coefficient `1 / (d_<(μ^k‖μ*) + d_>(ν^k‖α))` for a suboptimal arm.
pub fn lower_bound_coeff(
    truth: &GroundTruth,
    instance: &SafeBanditInstance,
    arm: usize,
) -> Result<f64> {
    check_instance(truth, instance)?;
    if arm == truth.k_star {
        return Err(Error::InvalidArgument(format!(
            "arm {arm} is the competitor; the lower bound concerns suboptimal arms"
        )));
    }
    let d = arm_divergences(truth, instance, arm)?;
    Ok(1.0 / (d.reward + d.safety))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArmBound {
    pub arm: usize,
    pub inefficiency_gap: f64,
    pub safety_gap: f64,
    pub divergences: ArmDivergences,
    pub upper_coeff: f64,
    pub lower_coeff: f64,
}

/// Evaluated bound coefficients for one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub k_star: usize,
    pub regret_main_coeff: f64,
    /// Regret coefficient with the ⅔-deflated safety divergence.
    pub regret_main_coeff_two_thirds: f64,
    pub unsafe_main_coeff: f64,
    pub horizon: f64,
    /// `gap_independent_bound(K, horizon)`.
    pub gap_independent: f64,
    /// `(1/(d_< + d_>))` for each suboptimal arm, in arm order.
    pub lower_bound_coeffs: Vec<f64>,
    /// Main terms multiplied by `ln(horizon)`.
    pub regret_main_at_horizon: f64,
    pub unsafe_main_at_horizon: f64,
    pub arms: Vec<ArmBound>,
}

pub fn bound_report(
    truth: &GroundTruth,
    instance: &SafeBanditInstance,
    horizon: f64,
) -> Result<BoundReport> {
    let regret = regret_main_term(truth, instance)?;
    let unsafe_plays = unsafe_main_term(truth, instance)?;
    let mut arms = Vec::new();
    for k in (0..truth.num_arms()).filter(|&k| k != truth.k_star) {
        arms.push(ArmBound {
            arm: k,
            inefficiency_gap: truth.delta[k],
            safety_gap: truth.gamma[k],
            divergences: arm_divergences(truth, instance, k)?,
            upper_coeff: per_arm_upper_coeff(truth, instance, k, SafetyDenominator::Full)?,
            lower_coeff: lower_bound_coeff(truth, instance, k)?,
        });
    }
    let gap_independent = if truth.num_arms() >= 2 {
        gap_independent_bound(truth.num_arms(), horizon.max(3.0))?
    } else {
        0.0
    };
    Ok(BoundReport {
        k_star: truth.k_star,
        regret_main_coeff: regret,
        regret_main_coeff_two_thirds: regret_main_term_with(
            truth,
            instance,
            SafetyDenominator::TwoThirds,
        )?,
        unsafe_main_coeff: unsafe_plays,
        horizon,
        gap_independent,
        lower_bound_coeffs: arms.iter().map(|a| a.lower_coeff).collect(),
        regret_main_at_horizon: regret * horizon.ln(),
        unsafe_main_at_horizon: unsafe_plays * horizon.ln(),
        arms,
    })
}
