//! Logistic map `x ↦ s x (1 − x)`.
//!
//! The potential series about 0 lives here together with its switchback
//! continuations. The `s = 1` case has its own asymptotic series.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::fnser::CoefficientMagnitudes;
use crate::scalar::{ln_abs_bigint, ratio_to_f64, Scalar};
use crate::series::PowerSeries;

mod branches;
mod pv;
pub use branches::*;
pub use pv::*;

/// `U(x) = x²(1 + Σ aₙ xⁿ)` with `V = −ln²s · U`, for rational `s = p/q`.
///
/// Coefficients are held as integers `Aₙ = aₙ Tₙ` over the common
/// denominators `Tₙ = ∏_{m≤n}(qᵐ − pᵐ)`. Nothing is reduced, so high orders
/// never pay for big-integer gcds.
#[derive(Debug, Clone)]
pub struct LogisticSeries {
    pub p: BigInt,
    pub q: BigInt,
    numer: Vec<BigInt>,
    denom: Vec<BigInt>,
}

fn binom(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// The aₙ series through `aₙ` for `n ≤ order`.
pub fn logistic_potential_series(s: &BigRational, order: usize) -> Result<LogisticSeries> {
    if !s.is_positive() {
        return Err(Error::OutOfDomain { what: format!("logistic series needs s > 0, got {s}") });
    }
    if s.is_one() {
        return Err(Error::UnitS);
    }
    let p = s.numer().clone();
    let q = s.denom().clone();
    let n_max = order.max(2);
    let pw = |b: &BigInt, e: usize| num_traits::pow(b.clone(), e);
    let d: Vec<BigInt> = (0..=n_max + 2).map(|m| if m == 0 { BigInt::one() } else { pw(&q, m) - pw(&p, m) }).collect();
    let mut denom = vec![BigInt::one()];
    for m in 1..=n_max {
        let next = &denom[m - 1] * &d[m];
        denom.push(next);
    }
    let mut numer = vec![BigInt::one(), BigInt::from(2) * &q, (BigInt::from(5) * &q - BigInt::from(3) * &p) * &q * &q];
    let p_pows: Vec<BigInt> = (0..=n_max + 2).map(|e| pw(&p, e)).collect();
    let q_pows: Vec<BigInt> = (0..=n_max + 2).map(|e| pw(&q, e)).collect();
    for n in 1..n_max.saturating_sub(1) {
        let qn = &q_pows[n + 2];
        let j0 = 1 + (n - 1) / 2;
        // Σ_j ±C(j+2, n+2−j) pʲ q^{n+2−j} Aⱼ ∏_{m=j+1}^{n+1} dₘ by Horner in j
        let mut acc = BigInt::zero();
        for j in j0..=n + 1 {
            if j > j0 {
                acc *= &d[j];
            }
            let term = binom(j + 2, n + 2 - j) * &p_pows[j] * &q_pows[n + 2 - j] * &numer[j];
            if (n + 1 - j) % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        let four_q = BigInt::from(4) * qn;
        let next = &four_q * &numer[n + 1] - &four_q * &d[n + 1] * &numer[n] + acc;
        numer.push(next);
    }
    numer.truncate(order + 1);
    denom.truncate(order + 1);
    Ok(LogisticSeries { p, q, numer, denom })
}

impl LogisticSeries {
    pub fn order(&self) -> usize {
        self.numer.len() - 1
    }

    pub fn s(&self) -> BigRational {
        BigRational::new(self.p.clone(), self.q.clone())
    }

    /// Reduced `aₙ`.
    pub fn coefficient(&self, n: usize) -> BigRational {
        BigRational::new(self.numer[n].clone(), self.denom[n].clone())
    }

    /// Unreduced `(Aₙ, Tₙ)`.
    pub fn raw(&self, n: usize) -> (&BigInt, &BigInt) {
        (&self.numer[n], &self.denom[n])
    }

    pub fn coefficient_f64(&self, n: usize) -> f64 {
        ratio_to_f64(&self.numer[n], &self.denom[n])
    }

    /// `U` as a float series about 0 through `x^{order+2}`.
    pub fn u_series_f64(&self) -> PowerSeries<f64> {
        let mut c = vec![0.0, 0.0];
        c.extend((0..=self.order()).map(|n| self.coefficient_f64(n)));
        PowerSeries::new(0.0, c)
    }

    /// `U` with reduced rational coefficients.
    pub fn u_series_exact(&self) -> PowerSeries<BigRational> {
        let mut c = vec![BigRational::zero(), BigRational::zero()];
        c.extend((0..=self.order()).map(|n| self.coefficient(n)));
        PowerSeries::new(BigRational::zero(), c)
    }

    /// `V = −ln²s · U` in float.
    pub fn potential_f64(&self) -> PowerSeries<f64> {
        let l = self.s().to_f64().ln();
        self.u_series_f64().scale(&-(l * l))
    }

    /// Coefficients of `U(f(x)) − s²(1−2x)² U(x)` for powers `2..=order+2`,
    /// each multiplied by `T_N qⁿ` so the check runs in integers.
    pub fn residual_scaled(&self) -> Vec<BigInt> {
        let big_n = self.order();
        // ũ_m = a_{m−2} T_N
        let t_n = &self.denom[big_n];
        let mut u = vec![BigInt::zero(), BigInt::zero()];
        let mut tail = BigInt::one();
        let mut tails = vec![BigInt::one(); big_n + 1];
        for n in (0..big_n).rev() {
            tail *= &self.denom[n + 1] / &self.denom[n];
            tails[n] = tail.clone();
        }
        for n in 0..=big_n {
            u.push(&self.numer[n] * &tails[n]);
        }
        debug_assert!(big_n == 0 || &(&self.denom[0] * &tails[0]) == t_n);
        let pw = |b: &BigInt, e: usize| num_traits::pow(b.clone(), e);
        let mut out = Vec::new();
        let get = |m: isize| if m < 0 { BigInt::zero() } else { u[m as usize].clone() };
        for n in 2..=big_n + 2 {
            let mut lhs = BigInt::zero();
            for m in n.div_ceil(2).max(2)..=n {
                let term = &u[m] * pw(&self.p, m) * pw(&self.q, n - m) * binom(m, n - m);
                if (n - m) % 2 == 0 {
                    lhs += term;
                } else {
                    lhs -= term;
                }
            }
            let n_i = n as isize;
            let rhs = pw(&self.p, 2) * pw(&self.q, n - 2) * (get(n_i) - BigInt::from(4) * get(n_i - 1) + BigInt::from(4) * get(n_i - 2));
            out.push(lhs - rhs);
        }
        out
    }
}

impl CoefficientMagnitudes for LogisticSeries {
    fn max_index(&self) -> usize {
        self.order()
    }

    fn ln_abs_coeff(&self, n: usize) -> Option<f64> {
        let a = self.numer.get(n)?;
        if a.is_zero() {
            None
        } else {
            Some(ln_abs_bigint(a) - ln_abs_bigint(&self.denom[n]))
        }
    }
}

/// `cₙ` for `n = 0..=n_max` in `V(x, 1) = −x⁴(1 + Σ cₙ xⁿ)`, iterating
/// `V(x(1−x)) = (1−2x)² V(x)` directly.
pub fn s1_coefficients(n_max: usize) -> Vec<BigRational> {
    // w_m, the x^m coefficient of −V, is W_m / E_m with E_m = ∏_{j=5}^{m}(4 − j)
    let mut w = vec![BigInt::zero(); n_max + 6];
    w[4] = BigInt::one();
    for n in 6..=n_max + 5 {
        // E_{n−2}·Σ_m ±C(m, n−m) w_m, Horner over m with factors (4 − m)
        let m0 = n.div_ceil(2);
        let mut acc = BigInt::zero();
        for m in m0..=n - 2 {
            if m > m0 {
                acc *= BigInt::from(4) - BigInt::from(m);
            }
            let term = binom(m, n - m) * &w[m];
            if (n - m) % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        w[n - 1] = BigInt::from(4) * &w[n - 2] - acc;
    }
    let mut e = BigInt::one();
    let mut out = Vec::with_capacity(n_max + 1);
    for (m, wm) in w.iter().enumerate().take(n_max + 5).skip(4) {
        if m >= 5 {
            e *= BigInt::from(4) - BigInt::from(m);
        }
        out.push(BigRational::new(wm.clone(), e.clone()));
    }
    out
}

/// `ln fₙ` for the comparison sequence `fₙ = 2^{−n/2} e^{−3n/2} n!`.
pub fn ln_comparison(n: usize) -> f64 {
    let ln_fact: f64 = (2..=n).map(|k| (k as f64).ln()).sum();
    -0.5 * n as f64 * std::f64::consts::LN_2 - 1.5 * n as f64 + ln_fact
}

#[derive(Debug, Clone)]
pub struct GrowthRow {
    pub n: usize,
    pub c_root: f64,
    pub f_root: f64,
}

/// Tail growth of `|cₙ|^{1/n}` against `fₙ^{1/n}`.
#[derive(Debug, Clone)]
pub struct GrowthReport {
    pub rows: Vec<GrowthRow>,
    /// Least-squares slope of `|cₙ|^{1/n}` on `[N/2, N]`; estimates `L`.
    pub slope_c: f64,
    pub slope_f: f64,
    /// `1/|c₂₅|^{1/25}`, the radius a short truncation suggests.
    pub apparent_radius_25: f64,
    /// `|cₙ|^{1/n}` grows without bound: asymptotic, not convergent.
    pub asymptotic: bool,
}

impl GrowthReport {
    pub fn l_estimate(&self) -> f64 {
        self.slope_c
    }

    pub fn slope_ratio(&self) -> f64 {
        self.slope_c / self.slope_f
    }
}

pub fn s1_growth_diagnostic(n_max: usize) -> Result<GrowthReport> {
    if n_max < 100 {
        return Err(Error::InsufficientOrder { needed: 100, have: n_max });
    }
    let c = s1_coefficients(n_max);
    let rows: Vec<GrowthRow> = (1..=n_max)
        .map(|n| GrowthRow {
            n,
            c_root: (c[n].ln_abs() / n as f64).exp(),
            f_root: (ln_comparison(n) / n as f64).exp(),
        })
        .collect();
    let tail: Vec<&GrowthRow> = rows.iter().filter(|r| r.n >= n_max / 2).collect();
    let slope = |f: &dyn Fn(&GrowthRow) -> f64| {
        let n = tail.len() as f64;
        let mx = tail.iter().map(|r| r.n as f64).sum::<f64>() / n;
        let my = tail.iter().map(|r| f(r)).sum::<f64>() / n;
        let sxy: f64 = tail.iter().map(|r| (r.n as f64 - mx) * (f(r) - my)).sum();
        let sxx: f64 = tail.iter().map(|r| (r.n as f64 - mx).powi(2)).sum();
        sxy / sxx
    };
    let slope_c = slope(&|r| r.c_root);
    let slope_f = slope(&|r| r.f_root);
    let last = rows.last().unwrap().c_root;
    // a convergent series would have |cₙ|^{1/n} level off; linear growth
    // carries it across any fixed bound
    let asymptotic = slope_c > 0.0 && slope_c * n_max as f64 > 0.5 * last;
    let apparent_radius_25 = 1.0 / rows[24].c_root;
    Ok(GrowthReport { rows, slope_c, slope_f, apparent_radius_25, asymptotic })
}

/// `V(x, 1)` from the asymptotic series, truncated before its smallest
/// term. Returns the value and the number of `cₙ` terms summed.
pub fn s1_potential_value(x: f64, c: &[BigRational]) -> (f64, usize) {
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut used = 0;
    let mut xn = 1.0;
    for (n, cn) in c.iter().enumerate() {
        let term = cn.to_f64() * xn;
        if n > 1 && term.abs() > prev {
            break;
        }
        sum += term;
        prev = term.abs();
        used = n;
        xn *= x;
    }
    (-x.powi(4) * sum, used)
}

fn s4_bracket(p: usize, x: f64) -> f64 {
    let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
    sign * ((1 + p) / 2) as f64 * PI + x.sqrt().asin()
}

/// Closed-form switchback potential `V_P` for `s = 4`.
pub fn s4_potential(p: usize, x: f64) -> f64 {
    let l = 4f64.ln();
    let b = s4_bracket(p, x);
    l * l * x * (x - 1.0) * b * b
}

/// Velocity on branch `P` for `s = 4`; negative on odd branches.
pub fn s4_velocity(p: usize, x: f64) -> f64 {
    4f64.ln() * (x * (1.0 - x)).max(0.0).sqrt() * s4_bracket(p, x)
}
