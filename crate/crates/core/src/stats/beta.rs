use rand::Rng;
use rand_distr::StandardNormal;

use super::special::ln_beta;
use super::{check_probability, RngStream};
use crate::error::{Error, Result};

const CF_MAX_ITER: usize = 300;
const CF_EPS: f64 = 1e-15;
const FPMIN: f64 = 1e-300;
const QUANTILE_MAX_ITER: usize = 200;

/// Shape parameters of a Beta law; both strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParams {
    a: f64,
    b: f64,
}

impl BetaParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite() {
            Ok(BetaParams { a, b })
        } else {
            Err(Error::InvalidArgument(format!(
                "Beta shapes must be positive and finite, got ({a}, {b})"
            )))
        }
    }

    /// Posterior after `successes` out of `n` Bernoulli observations under a uniform prior.
    pub fn posterior(successes: f64, n: f64) -> Result<Self> {
        Self::new(successes + 1.0, n - successes + 1.0)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

pub fn beta_mean(p: BetaParams) -> f64 {
    p.a / (p.a + p.b)
}

pub fn beta_std_dev(p: BetaParams) -> f64 {
    let s = p.a + p.b;
    (p.a * p.b / (s * s * (s + 1.0))).sqrt()
}

/// Density at `x ∈ (0, 1)`; zero outside the open interval unless a shape is ≤ 1.
pub fn beta_pdf(p: BetaParams, x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return match (x <= 0.0, p.a, p.b) {
            (true, a, _) if a < 1.0 => f64::INFINITY,
            (true, a, b) if a == 1.0 => b,
            (false, _, b) if b < 1.0 => f64::INFINITY,
            (false, a, b) if b == 1.0 => a,
            _ => 0.0,
        };
    }
    ((p.a - 1.0) * x.ln() + (p.b - 1.0) * (-x).ln_1p() - ln_beta(p.a, p.b)).exp()
}

/// Modified-Lentz evaluation of the incomplete-beta continued fraction.
fn continued_fraction(a: f64, b: f64, x: f64) -> Result<f64> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            return Ok(h);
        }
    }
    Err(Error::numerics(
        "beta_cdf",
        format!("continued fraction did not converge for a={a}, b={b}, x={x}"),
    ))
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn beta_cdf(p: BetaParams, x: f64) -> Result<f64> {
    check_probability("x", x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let (a, b) = (p.a, p.b);
    let ln_front = a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b);
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok((front * continued_fraction(a, b, x)? / a).clamp(0.0, 1.0))
    } else {
        Ok((1.0 - front * continued_fraction(b, a, 1.0 - x)? / b).clamp(0.0, 1.0))
    }
}

/// The `delta`-quantile of a Beta law: bracketing bisection with Newton refinement.
pub fn beta_quantile(p: BetaParams, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "quantile level {delta} must lie in (0, 1)"
        )));
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut x = beta_mean(p);
    let mut last_residual = f64::INFINITY;
    for _ in 0..QUANTILE_MAX_ITER {
        let residual = beta_cdf(p, x)? - delta;
        if residual.abs() <= 1e-14 * delta.min(1.0 - delta).max(1e-3) {
            return Ok(x);
        }
        if residual < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi.max(f64::MIN_POSITIVE) {
            return Ok(x);
        }
        let mid = 0.5 * (lo + hi);
        let slow = residual.abs() > 0.5 * last_residual;
        last_residual = residual.abs();
        let density = beta_pdf(p, x);
        let newton = x - residual / density;
        x = if !slow && density.is_finite() && density > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            mid
        };
    }
    Err(Error::numerics(
        "beta_quantile",
        format!(
            "no convergence for a={}, b={}, delta={delta}",
            p.a, p.b
        ),
    ))
}

/// Marsaglia–Tsang squeeze/rejection sampler for Gamma(shape, 1).
fn gamma_sample(shape: f64, rng: &mut RngStream) -> f64 {
    if shape < 1.0 {
        // Boost: G(shape) = G(shape + 1) · U^{1/shape}.
        let u = rng.uniform();
        return gamma_sample(shape + 1.0, rng) * u.powf(1.0 / shape);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let z: f64 = rng.sample(StandardNormal);
        let v = 1.0 + c * z;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u = rng.uniform();
        let z2 = z * z;
        if u < 1.0 - 0.0331 * z2 * z2 {
            return d * v;
        }
        if u > 0.0 && u.ln() < 0.5 * z2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// One Beta draw as the ratio `X / (X + Y)` of two independent Gamma draws.
pub fn beta_sample(p: BetaParams, rng: &mut RngStream) -> f64 {
    let x = gamma_sample(p.a, rng);
    let y = gamma_sample(p.b, rng);
    let s = x + y;
    if s > 0.0 {
        x / s
    } else {
        // Both draws underflowed (tiny shapes): the law is near {0, 1}.
        if rng.bernoulli(beta_mean(p)) {
            1.0
        } else {
            0.0
        }
    }
}
