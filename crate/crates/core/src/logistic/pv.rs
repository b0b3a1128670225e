//! Principal value of `I(x) = ∫₀^∞ e^{−y} / (1 − a y) dy`, `a = x/√(2e³)`.
//!
//! This is the Borel-type sum behind the `s = 1` comparison series
//! `Σ fₙ xⁿ`, `fₙ = n! 2^{−n/2} e^{−3n/2}`.

use crate::error::{Error, Result};
use crate::quad;

/// What the excision loop saw on its way to the value.
#[derive(Debug, Clone)]
pub struct PvReport {
    pub value: f64,
    /// Final half-width of the excised window around the pole.
    pub eps: f64,
    /// Richardson estimates, one per halving.
    pub estimates: Vec<f64>,
}

fn scale(x: f64) -> f64 {
    x / (2.0 * (3f64).exp()).sqrt()
}

fn ln_comparison_coefficient(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum::<f64>() - n as f64 * (0.5 * 2f64.ln() + 1.5)
}

/// `fₙ = n! 2^{−n/2} e^{−3n/2}`.
pub fn comparison_coefficient(n: usize) -> f64 {
    ln_comparison_coefficient(n).exp()
}

/// Cauchy principal value of `I(x)`.
pub fn pv_integral(x: f64) -> Result<f64> {
    pv_integral_report(x).map(|r| r.value)
}

/// As [`pv_integral`], keeping the excision history.
///
/// The pole at `y₀ = 1/a` is subtracted on `[0, 2y₀]`, where the singular
/// part integrates to zero by symmetry. A window `(y₀ − ε, y₀ + ε)` is then
/// excised from the smooth remainder and `ε` halved, with one Richardson
/// step per halving, until successive estimates agree to 1e-8.
pub fn pv_integral_report(x: f64) -> Result<PvReport> {
    if x == 0.0 {
        return Ok(PvReport { value: 1.0, eps: 0.0, estimates: vec![1.0] });
    }
    if !x.is_finite() {
        return Err(Error::OutOfDomain { what: format!("pv_integral needs finite x, got {x}") });
    }
    let a = scale(x);
    if a < 0.0 {
        let f = move |y: f64| (-y).exp() / (1.0 - a * y);
        let v = quad::integrate_to_infinity(&f, 0.0, 1e-13)?;
        return Ok(PvReport { value: v, eps: 0.0, estimates: vec![v] });
    }
    let y0 = 1.0 / a;
    let e0 = (-y0).exp();
    // (e^{−y} − e^{−y₀}) / (1 − a y) with d = y − y₀
    let smooth = move |y: f64| {
        let d = y - y0;
        if d == 0.0 {
            return e0 / a;
        }
        e0 * (-d).exp_m1() / (-a * d)
    };
    let tail = quad::integrate_to_infinity(&move |y: f64| (-y).exp() / (1.0 - a * y), 2.0 * y0, 1e-14)?;
    let excised = |eps: f64| -> Result<f64> {
        let left = quad::integrate(&smooth, 0.0, y0 - eps, 1e-14)?;
        let right = quad::integrate(&smooth, y0 + eps, 2.0 * y0, 1e-14)?;
        Ok(left + right + tail)
    };
    let mut eps = 0.25 * y0;
    let mut prev = excised(eps)?;
    let mut estimates = Vec::new();
    for _ in 0..60 {
        let half = 0.5 * eps;
        let cur = excised(half)?;
        // the excised piece is 2ε·h(y₀) + O(ε³)
        let rich = 2.0 * cur - prev;
        estimates.push(rich);
        eps = half;
        prev = cur;
        if let [.., p, q] = estimates[..] {
            if (p - q).abs() < 1e-8 {
                return Ok(PvReport { value: q, eps, estimates });
            }
        }
    }
    Err(Error::QuadratureFailure { what: format!("principal value at x = {x} did not settle under excision halving") })
}

/// Optimally truncated `Σ fₙ xⁿ`, with the number of terms used.
pub fn comparison_series(x: f64) -> (f64, usize) {
    if x == 0.0 {
        return (1.0, 1);
    }
    let sign = x.signum();
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    let mut ln_f = 0.0;
    for n in 0..5000 {
        if n > 0 {
            ln_f += (n as f64).ln() - (0.5 * 2f64.ln() + 1.5);
        }
        let mag = (ln_f + n as f64 * x.abs().ln()).exp();
        if mag > last {
            return (sum, n);
        }
        sum += if n % 2 == 1 { sign * mag } else { mag };
        last = mag;
    }
    (sum, 5000)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_x_matches_series() {
        assert_eq!(pv_integral(0.0).unwrap(), 1.0);
        let v = pv_integral(0.01).unwrap();
        assert!((v - 1.0016).abs() < 1e-3);
        let (s, _) = comparison_series(0.01);
        assert!((v - s).abs() < 1e-12, "{v} vs {s}");
    }

    #[test]
    fn negative_x_has_no_pole() {
        let v = pv_integral(-1.0).unwrap();
        assert!(v > 0.0 && v < 1.0);
    }
}
