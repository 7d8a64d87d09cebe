use serde::{Deserialize, Serialize};

/// Exploration budget `γ_t` for the KL-UCB indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum GammaSchedule {
    /// `ln(t (ln t)³)`, with `t` clamped to at least 3.
    Theoretical,
    /// `ln t`.
    #[default]
    Practical,
}

/// Quantile level `δ_t^k` for the Beta-quantile safety index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaSchedule {
    /// `min(α/2, (√(8 N_t^k) · t)⁻¹)`.
    Theoretical,
    /// `min(α/2, 1/(t + 1))`.
    #[default]
    Practical,
}

impl GammaSchedule {
    pub fn budget(self, t: u64) -> f64 {
        match self {
            GammaSchedule::Practical => (t.max(1) as f64).ln(),
            GammaSchedule::Theoretical => {
                let t = t.max(3) as f64;
                (t * t.ln().powi(3)).ln()
            }
        }
    }
}

impl DeltaSchedule {
    pub fn level(self, alpha: f64, t: u64, pulls: u64) -> f64 {
        let t = t.max(1) as f64;
        let raw = match self {
            DeltaSchedule::Practical => 1.0 / (t + 1.0),
            DeltaSchedule::Theoretical => 1.0 / ((8.0 * pulls as f64).sqrt() * t),
        };
        (0.5 * alpha).min(raw)
    }
}

/// Per-arm KL budget `γ_t / N`; unbounded for an unplayed arm.
#[inline]
pub fn kl_budget(gamma: f64, pulls: u64) -> f64 {
    if pulls == 0 {
        f64::INFINITY
    } else {
        gamma / pulls as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        assert_eq!(GammaSchedule::Practical.budget(1), 0.0);
        assert!((GammaSchedule::Practical.budget(100) - 100f64.ln()).abs() < 1e-15);
        let g3 = (3.0 * 3f64.ln().powi(3)).ln();
        assert_eq!(GammaSchedule::Theoretical.budget(1), g3);
        assert_eq!(GammaSchedule::Theoretical.budget(3), g3);
        let t = 1000f64;
        assert!((GammaSchedule::Theoretical.budget(1000) - (t.ln() + 3.0 * t.ln().ln())).abs() < 1e-12);
    }

    #[test]
    fn delta_values() {
        assert_eq!(DeltaSchedule::Practical.level(0.5, 1, 0), 0.25);
        assert_eq!(DeltaSchedule::Practical.level(0.5, 99, 7), 0.01);
        assert_eq!(DeltaSchedule::Theoretical.level(0.5, 10, 0), 0.25);
        let d = DeltaSchedule::Theoretical.level(0.5, 100, 50);
        assert!((d - 1.0 / (20.0 * 100.0)).abs() < 1e-15);
    }

    #[test]
    fn budget_for_unplayed_arm() {
        assert!(kl_budget(3.0, 0).is_infinite());
        assert_eq!(kl_budget(3.0, 4), 0.75);
    }
}
