use super::check_probability;
use crate::error::{Error, Result};

/// Which side of the second argument the directed divergence is active on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `d_<(a‖b)`: nonzero only when `a < b`.
    Below,
    /// `d_>(a‖b)`: nonzero only when `a > b`.
    Above,
}

/// KL divergence between Bernoulli laws without argument validation.
///
/// Uses `0·ln 0 = 0`, so the result is `+∞` exactly when `b` sits on a
/// boundary that `a` does not.
#[inline]
pub fn kl_unchecked(a: f64, b: f64) -> f64 {
    xlogy_ratio(a, b) + xlogy_ratio(1.0 - a, 1.0 - b)
}

#[inline]
fn xlogy_ratio(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if y == 0.0 {
        f64::INFINITY
    } else {
        x * (x / y).ln()
    }
}

/// Bernoulli KL divergence `d(a‖b)` in nats.
pub fn bern_kl(a: f64, b: f64) -> Result<f64> {
    check_probability("a", a)?;
    check_probability("b", b)?;
    // Rounding can push tiny divergences slightly negative.
    Ok(kl_unchecked(a, b).max(0.0))
}

/// Directed divergence: `d_<` or `d_>` depending on `side`.
pub fn bern_kl_directed(a: f64, b: f64, side: Side) -> Result<f64> {
    let d = bern_kl(a, b)?;
    let active = match side {
        Side::Below => a < b,
        Side::Above => a > b,
    };
    Ok(if active { d } else { 0.0 })
}

/// Iteration count used inside agents at round `t`: `max(4, ⌈log₂ t⌉)`.
pub fn bisection_rounds(t: u64) -> u32 {
    let ceil_log2 = if t <= 1 {
        0
    } else {
        64 - (t - 1).leading_zeros()
    };
    ceil_log2.max(4)
}

fn check_budget(budget: f64) -> Result<()> {
    if budget >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "KL budget {budget} must be non-negative"
        )))
    }
}

/// Largest `q ∈ [mu_hat, 1]` with `d(mu_hat‖q) ≤ budget`, to full double precision.
///
/// Returns exactly `1` once the feasible set reaches the last representable
/// value below one.
pub fn kl_ucb_invert_upper(mu_hat: f64, budget: f64) -> Result<f64> {
    check_probability("mu_hat", mu_hat)?;
    check_budget(budget)?;
    if let Some(q) = saturated_upper(mu_hat, budget) {
        return Ok(q);
    }
    let (mut lo, mut hi) = (mu_hat, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if kl_unchecked(mu_hat, mid) <= budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi == 1.0 && lo == f64::from_bits(1.0_f64.to_bits() - 1) {
        return Ok(1.0);
    }
    Ok(lo)
}

/// Bisection with a fixed number of halvings; returns the feasible end of the
/// final bracket, so the result never overshoots the exact bound.
pub fn kl_ucb_invert_upper_rounds(mu_hat: f64, budget: f64, rounds: u32) -> f64 {
    if let Some(q) = saturated_upper(mu_hat, budget) {
        return q;
    }
    let (mut lo, mut hi) = (mu_hat, 1.0_f64);
    for _ in 0..rounds {
        let mid = 0.5 * (lo + hi);
        if kl_unchecked(mu_hat, mid) <= budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[inline]
fn saturated_upper(mu_hat: f64, budget: f64) -> Option<f64> {
    if budget == 0.0 || mu_hat >= 1.0 {
        Some(mu_hat)
    } else if budget.is_infinite() || kl_unchecked(mu_hat, 1.0) <= budget {
        Some(1.0)
    } else {
        None
    }
}

/// Smallest `q ∈ [0, nu_hat]` with `d(nu_hat‖q) ≤ budget`.
///
/// Computed through the complement `1 − upper(1 − nu_hat)`, so the symmetry
/// between the two inversions holds exactly.
pub fn kl_ucb_invert_lower(nu_hat: f64, budget: f64) -> Result<f64> {
    check_probability("nu_hat", nu_hat)?;
    Ok(1.0 - kl_ucb_invert_upper(1.0 - nu_hat, budget)?)
}

/// Fixed-round counterpart of [`kl_ucb_invert_lower`].
pub fn kl_ucb_invert_lower_rounds(nu_hat: f64, budget: f64, rounds: u32) -> f64 {
    1.0 - kl_ucb_invert_upper_rounds(1.0 - nu_hat, budget, rounds)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent oracle: plain bisection on the monotone map q -> d(mu‖q).
    fn oracle_upper(mu: f64, c: f64, tol: f64) -> f64 {
        let f = |q: f64| {
            let t1 = if mu == 0.0 { 0.0 } else { mu * (mu / q).ln() };
            let t2 = if mu == 1.0 { 0.0 } else { (1.0 - mu) * ((1.0 - mu) / (1.0 - q)).ln() };
            t1 + t2
        };
        let (mut lo, mut hi) = (mu, 1.0);
        while hi - lo > tol {
            let m = 0.5 * (lo + hi);
            if m >= 1.0 || f(m) > c {
                hi = m;
            } else {
                lo = m;
            }
        }
        lo
    }

    #[test]
    fn kl_closed_form_values() {
        assert_eq!(bern_kl(0.5, 0.5).unwrap(), 0.0);
        assert!((bern_kl(0.5, 0.75).unwrap() - 0.143_841_036_225_890_4).abs() < 1e-12);
        let d = bern_kl(0.3, 0.5).unwrap();
        assert!((d - 0.082_282_878_505_051_78).abs() < 1e-12);
        assert!(d >= 2.0 * 0.2 * 0.2);
    }

    #[test]
    fn kl_boundaries() {
        assert_eq!(bern_kl(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(bern_kl(1.0, 1.0).unwrap(), 0.0);
        assert!(bern_kl(0.2, 0.0).unwrap().is_infinite());
        assert!(bern_kl(0.2, 1.0).unwrap().is_infinite());
        assert!((bern_kl(0.0, 0.5).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(bern_kl(-0.1, 0.5).is_err());
        assert!(bern_kl(0.5, 1.5).is_err());
        assert!(bern_kl(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn directed_divergences() {
        assert_eq!(bern_kl_directed(0.7, 0.5, Side::Below).unwrap(), 0.0);
        assert_eq!(
            bern_kl_directed(0.7, 0.5, Side::Above).unwrap(),
            bern_kl(0.7, 0.5).unwrap()
        );
        let d = bern_kl_directed(0.293, 0.21, Side::Above).unwrap();
        assert!((d - 0.019_109_456_289_684_9).abs() < 1e-12, "{d}");
        assert_eq!(bern_kl_directed(0.5, 0.5, Side::Above).unwrap(), 0.0);
        assert!(bern_kl_directed(2.0, 0.5, Side::Above).is_err());
    }

    #[test]
    fn upper_inversion_examples() {
        assert_eq!(kl_ucb_invert_upper(0.5, 0.0).unwrap(), 0.5);
        let q = kl_ucb_invert_upper(0.0, 2f64.ln()).unwrap();
        assert!((q - 0.5).abs() < 1e-12, "{q}");
        let q = kl_ucb_invert_upper(0.9, 10.0).unwrap();
        assert!((q - oracle_upper(0.9, 10.0, 1e-12)).abs() < 1e-9);
        assert_eq!(q, 1.0);
        assert_eq!(kl_ucb_invert_upper(1.0, 3.0).unwrap(), 1.0);
        assert!(kl_ucb_invert_upper(0.5, -1.0).is_err());
        assert!(kl_ucb_invert_upper(1.2, 1.0).is_err());
    }

    #[test]
    fn lower_inversion_examples() {
        assert_eq!(kl_ucb_invert_lower(0.5, 0.0).unwrap(), 0.5);
        let q = kl_ucb_invert_lower(1.0, 2f64.ln()).unwrap();
        assert!((q - 0.5).abs() < 1e-12);
        let lhs = kl_ucb_invert_lower(0.3, 0.01).unwrap();
        let rhs = 1.0 - kl_ucb_invert_upper(0.7, 0.01).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(kl_ucb_invert_lower(0.0, 5.0).unwrap(), 0.0);
    }

    #[test]
    fn inversion_matches_oracle_on_grid() {
        for i in 0..=20 {
            let mu = i as f64 / 20.0;
            for &c in &[1e-4, 0.01, 0.1, 0.7, 2.0] {
                let q = kl_ucb_invert_upper(mu, c).unwrap();
                let o = oracle_upper(mu, c, 1e-13);
                assert!((q - o).abs() < 1e-9, "mu={mu} c={c} q={q} oracle={o}");
            }
        }
    }

    #[test]
    fn rounds_schedule() {
        assert_eq!(bisection_rounds(1), 4);
        assert_eq!(bisection_rounds(16), 4);
        assert_eq!(bisection_rounds(17), 5);
        assert_eq!(bisection_rounds(1024), 10);
        assert_eq!(bisection_rounds(1025), 11);
    }

    #[test]
    fn rounds_variant_is_feasible_and_close() {
        for &(mu, c, t) in &[(0.3, 0.05, 100u64), (0.8, 0.2, 5000), (0.0, 0.01, 20000)] {
            let r = bisection_rounds(t);
            let q = kl_ucb_invert_upper_rounds(mu, c, r);
            let exact = kl_ucb_invert_upper(mu, c).unwrap();
            assert!(q <= exact);
            assert!(exact - q <= (1.0 - mu) / 2f64.powi(r as i32) + 1e-15);
            assert!(kl_unchecked(mu, q) <= c);
            let l = kl_ucb_invert_lower_rounds(1.0 - mu, c, r);
            assert!((l - (1.0 - q)).abs() < 1e-15);
        }
    }
}
