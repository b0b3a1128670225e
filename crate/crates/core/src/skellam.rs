//! Skellam map `x ↦ k(1 − e^{−x})`.
//!
//! Ψ⁻¹ comes from a Bell-polynomial recursion whose denominators are
//! cleared by integer polynomials pₙ(k). The potential is built from two
//! expansions, one about each fixed point.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::fnser::{solve_potential, solve_potential_unit, MapModel};
use crate::maps::{lambert_w, skellam_fixed_point, WBranch};
use crate::scalar::Scalar;
use crate::series::PowerSeries;

/// Binomial coefficients `C(n, 0..=n)`.
fn binomial_row<T: Scalar>(n: usize) -> Vec<T> {
    let mut row = vec![T::one(); n + 1];
    for i in 1..n {
        row[i] = row[i - 1].clone() * T::from_usize(n + 1 - i) / T::from_usize(i);
    }
    row
}

/// Complete Bell polynomials `B₀..=Bₙ` at `b = (b₁, b₂, …)`, from
/// `B_{m+1} = Σᵢ C(m, i) B_{m−i} b_{i+1}`.
pub fn bell_all<T: Scalar>(n: usize, b: &[T]) -> Vec<T> {
    assert!(b.len() >= n, "need {n} arguments, got {}", b.len());
    let mut out = vec![T::one()];
    for m in 0..n {
        let c = binomial_row::<T>(m);
        let mut acc = T::zero();
        for i in 0..=m {
            acc = acc + c[i].clone() * out[m - i].clone() * b[i].clone();
        }
        out.push(acc);
    }
    out
}

/// `Bₙ(b₁, …, bₙ)`; `b[0]` holds `b₁`.
pub fn bell_complete<T: Scalar>(n: usize, b: &[T]) -> T {
    bell_all(n, b).pop().unwrap()
}

/// `exp(h(x))` for `h(0) = 0`, through the exponential formula.
pub fn exp_series<T: Scalar>(h: &PowerSeries<T>) -> PowerSeries<T> {
    let n = h.order();
    // exponential-generating coefficients n! hₙ
    let mut fact = T::one();
    let mut b = Vec::with_capacity(n);
    let mut facts = vec![T::one()];
    for m in 1..=n {
        fact = fact * T::from_usize(m);
        facts.push(fact.clone());
        b.push(h.coeffs()[m].clone() * fact.clone());
    }
    let big_b = bell_all(n, &b);
    let coeffs = big_b.into_iter().zip(facts).map(|(x, f)| x / f).collect();
    PowerSeries::new(h.center().clone(), coeffs)
}

/// The sequence `b₁ = 1, b₂, …, b_N` solving `f(kx) = k(e^{f(x)} − 1)` with
/// `f = Σ bₙ xⁿ/n!`.
#[derive(Debug, Clone, PartialEq)]
pub struct BellState<T> {
    pub k: T,
    /// `b[0]` is `b₁`.
    pub b: Vec<T>,
}

impl<T: Scalar> BellState<T> {
    pub fn order(&self) -> usize {
        self.b.len()
    }

    /// `bₙ` for `n ≥ 1`.
    pub fn get(&self, n: usize) -> &T {
        &self.b[n - 1]
    }
}

/// `bₙ = Bₙ(b₁, …, b_{n−1}, 0)/(k^{n−1} − 1)`.
pub fn skellam_b_coefficients<T: Scalar>(k: &T, n: usize) -> Result<BellState<T>> {
    if (k.clone() - T::one()).is_negligible() {
        return Err(Error::UnitK);
    }
    let mut b: Vec<T> = Vec::with_capacity(n);
    if n == 0 {
        return Ok(BellState { k: k.clone(), b });
    }
    b.push(T::one());
    let mut big_b = vec![T::one(), T::one()];
    let mut k_pow = k.clone();
    for m in 2..=n {
        let c = binomial_row::<T>(m - 1);
        // i = m − 1 would pair B₀ with bₘ, the zeroed argument
        let mut acc = T::zero();
        for i in 0..m - 1 {
            acc = acc + c[i].clone() * big_b[m - 1 - i].clone() * b[i].clone();
        }
        let den = k_pow.clone() - T::one();
        if den.is_negligible() {
            return Err(Error::ResonantMultiplier { multiplier: k.to_f64(), power: m - 1 });
        }
        let bm = acc.clone() / den;
        big_b.push(acc + bm.clone());
        b.push(bm);
        k_pow = k_pow * k.clone();
    }
    Ok(BellState { k: k.clone(), b })
}

/// Ψ⁻¹ about 0: `Σ (−1)^{n−1} bₙ xⁿ/n!`.
pub fn skellam_psi_inverse_series<T: Scalar>(k: &T, n: usize) -> Result<PowerSeries<T>> {
    let st = skellam_b_coefficients(k, n)?;
    let mut c = vec![T::zero(); n + 1];
    let mut fact = T::one();
    for m in 1..=n {
        fact = fact * T::from_usize(m);
        let v = st.get(m).clone() / fact.clone();
        c[m] = if m % 2 == 1 { v } else { -v };
    }
    Ok(PowerSeries::new(T::zero(), c))
}

/// `Ψ⁻¹(kx) − k(1 − e^{−Ψ⁻¹(x)})`, formally; zero through `n` when exact.
pub fn poincare_residual<T: Scalar>(k: &T, n: usize) -> Result<PowerSeries<T>> {
    let g = skellam_psi_inverse_series(k, n)?;
    let scaled: Vec<T> = g.coeffs().iter().enumerate().map(|(m, c)| c.clone() * k.powi(m)).collect();
    let e = exp_series(&g.scale(&-T::one()));
    let rhs: Vec<T> = e.coeffs().iter().enumerate().map(|(m, c)| {
        let one = if m == 0 { T::one() } else { T::zero() };
        k.clone() * (one - c.clone())
    }).collect();
    let c = scaled.into_iter().zip(rhs).map(|(a, b)| a - b).collect();
    Ok(PowerSeries::new(T::zero(), c))
}

/// Polynomial in `k` with arbitrary-precision integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    /// `coeffs[i]` multiplies `kⁱ`; no trailing zeros.
    pub coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        Self { coeffs }
    }

    pub fn one() -> Self {
        Self { coeffs: vec![BigInt::one()] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = BigInt::zero();
        Self::new((0..n).map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Multiplies by `c·kˢ`.
    pub fn shift_scale(&self, shift: usize, c: &BigInt) -> Self {
        let mut out = vec![BigInt::zero(); shift];
        out.extend(self.coeffs.iter().map(|a| a * c));
        Self::new(out)
    }

    pub fn eval<T: Scalar>(&self, k: &T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * k.clone() + T::from_bigint(c))
    }
}

impl fmt::Display for IntPolynomial {
    /// `24+36k+46k^2`, lowest power first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() && !(self.coeffs.len() == 1) {
                continue;
            }
            if !first {
                f.write_str(if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}")?;
                    }
                    f.write_str("k")?;
                    if i > 1 {
                        write!(f, "^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Gaussian binomials `[n choose r]` in `k` for `r = 0..=n`, built with
/// `[n, r] = [n−1, r−1] + kʳ [n−1, r]`.
fn gaussian_rows(n_max: usize) -> Vec<Vec<IntPolynomial>> {
    let mut rows: Vec<Vec<IntPolynomial>> = vec![vec![IntPolynomial::one()]];
    for n in 1..=n_max {
        let prev = &rows[n - 1];
        let mut row = Vec::with_capacity(n + 1);
        row.push(IntPolynomial::one());
        for r in 1..n {
            row.push(prev[r - 1].add(&prev[r].shift_scale(r, &BigInt::one())));
        }
        row.push(IntPolynomial::one());
        rows.push(row);
    }
    rows
}

/// `p₁..=p_N` with `b_{n+1} = pₙ(k)/∏_{m=1}^{n}(kᵐ − 1)`.
///
/// Uses the differentiated functional equation
/// `k f′(kx) = (f(kx) + k) f′(x)`, which after clearing denominators gives
/// `π_n = Σ_{j=1}^{n−1} C(n−1, j) k^{j−1} π_j π_{n−j} [n−2, j−1]_k`
/// for `πₙ = p_{n−1}`.
pub fn skellam_p_polynomials(n: usize) -> Vec<IntPolynomial> {
    let gauss = gaussian_rows(n.saturating_sub(1));
    let mut pi: Vec<IntPolynomial> = vec![IntPolynomial::one(), IntPolynomial::one()]; // π₀ unused, π₁ = 1
    for m in 2..=n + 1 {
        let c = binomial_row::<BigRational>(m - 1);
        let mut acc = IntPolynomial::new(vec![BigInt::zero()]);
        for j in 1..m {
            let coef = c[j].to_integer();
            let term = pi[j].mul(&pi[m - j]).mul(&gauss[m - 2][j - 1]).shift_scale(j - 1, &coef);
            acc = acc.add(&term);
        }
        pi.push(acc);
    }
    pi.into_iter().skip(2).collect()
}

/// Ψ⁻¹ rebuilt from the k-bracket form
/// `x + x Σ pₙ(k) (x/(1−k))ⁿ / ((n+1)! [n]_k!)`.
pub fn psi_inverse_from_bracket<T: Scalar>(k: &T, n: usize, p: &[IntPolynomial]) -> PowerSeries<T> {
    let mut c = vec![T::zero(); n + 1];
    if n >= 1 {
        c[1] = T::one();
    }
    let one_minus_k = T::one() - k.clone();
    let mut bracket_fact = T::one();
    let mut fact = T::one();
    let mut k_pow = T::one();
    let mut scale = T::one();
    for m in 1..n {
        k_pow = k_pow * k.clone();
        // [m]_k = (kᵐ − 1)/(k − 1)
        bracket_fact = bracket_fact * ((k_pow.clone() - T::one()) / (k.clone() - T::one()));
        fact = fact * T::from_usize(m + 1);
        scale = scale * one_minus_k.clone();
        c[m + 1] = p[m - 1].eval(k) / (fact.clone() * bracket_fact.clone() * scale.clone());
    }
    PowerSeries::new(T::zero(), c)
}

/// `lim_{k→0} Ψ⁻¹`: coefficients `pₙ(0)/(n+1)!`, exact.
pub fn psi_inverse_k0_limit(n: usize) -> PowerSeries<BigRational> {
    limit_series(n, |p, m| p.eval(&BigRational::zero()) / factorial(m + 1))
}

/// `lim_{k→1} Ψ⁻¹((1−k)x, k)/(1−k)`: coefficients `pₙ(1)/((n+1)! n!)`.
pub fn psi_inverse_k1_limit(n: usize) -> PowerSeries<BigRational> {
    limit_series(n, |p, m| p.eval(&BigRational::one()) / (factorial(m + 1) * factorial(m)))
}

fn factorial(n: usize) -> BigRational {
    (1..=n).fold(BigRational::one(), |a, i| a * BigRational::from_usize(i))
}

fn limit_series(n: usize, coeff: impl Fn(&IntPolynomial, usize) -> BigRational) -> PowerSeries<BigRational> {
    let p = skellam_p_polynomials(n.saturating_sub(1));
    let mut c = vec![BigRational::zero(); n + 1];
    if n >= 1 {
        c[1] = BigRational::one();
    }
    for m in 1..n {
        c[m + 1] = coeff(&p[m - 1], m);
    }
    PowerSeries::new(BigRational::zero(), c)
}

/// Normalized potential shape `U(y; q)` about 0 for parameter `q`:
/// `V = −ln²q · U`, `U = y² + …`. The same function gives the expansion about
/// `x*` in `y = x − x*` with `q = ℓ`, since there the local map is
/// `ℓ(1 − e^{−y})`.
pub fn potential_bracket<T: Scalar>(q: &T, n: usize) -> Result<PowerSeries<T>> {
    let v = solve_potential(&MapModel::skellam(q.clone()), &T::zero(), n, &T::one())?;
    Ok(v.scale(&-T::one()))
}

/// The two local potential series for `k > 1`.
#[derive(Debug, Clone)]
pub struct PotentialPair<T> {
    /// Exact shape `U` about 0; `V = −ln²k · U`.
    pub zero_shape: PowerSeries<T>,
    /// `V` about 0 in float, `V″(0) = −2 ln²k`.
    pub about_zero: PowerSeries<f64>,
    /// `V` about `x*`, scaled to agree with `about_zero` at `x*/2`.
    pub about_star: PowerSeries<f64>,
    pub x_star: f64,
    pub ell: f64,
    /// Joined normalization relative to `V″(x*) = −2 ln²ℓ`.
    pub star_scale: f64,
}

/// Potential about both fixed points, joined at `x*/2`. The `x*` series is
/// float because `ℓ` is transcendental.
pub fn skellam_potential_pair<T: Scalar>(k: &T, n: usize) -> Result<PotentialPair<T>> {
    let kf = k.to_f64();
    if kf <= 1.0 {
        return Err(Error::KNotAboveOne { k: kf });
    }
    if n < 5 {
        return Err(Error::InsufficientOrder { needed: 5, have: n });
    }
    let x_star = skellam_fixed_point(kf)?;
    let ell = kf - x_star;
    let zero_shape = potential_bracket(k, n)?;
    let about_zero = zero_shape.to_f64().scale(&-kf.ln().powi(2));
    let ls = ell.ln().powi(2);
    let star_nat = potential_bracket(&ell, n)?.scale(&-ls).with_center(x_star);
    let half = 0.5 * x_star;
    let star_scale = about_zero.eval_f64(half) / star_nat.eval_f64(half);
    let about_star = star_nat.scale(&star_scale);
    Ok(PotentialPair { zero_shape, about_zero, about_star, x_star, ell, star_scale })
}

impl<T: Scalar> PotentialPair<T> {
    /// `V` on `[0, x*]`, switching series at `x*/2`.
    pub fn value(&self, x: f64) -> Result<f64> {
        if !(0.0..=self.x_star).contains(&x) {
            return Err(Error::OutOfInterval { x, lo: 0.0, hi: self.x_star });
        }
        if x <= 0.5 * self.x_star {
            Ok(self.about_zero.eval_f64(x))
        } else {
            Ok(self.about_star.eval_f64(x))
        }
    }
}

/// `V(x)` for `0 ≤ x ≤ x*` from the order-`n` joined pair.
pub fn skellam_potential_value(k: f64, x: f64, n: usize) -> Result<f64> {
    skellam_potential_pair(&k, n)?.value(x)
}

/// Multiplier whose Skellam map shares the fixed-point pair with parameter `ell`:
/// the `k` with `k e^{−k} = ℓ e^{−ℓ}` on the other Lambert branch.
pub fn dual_parameter(ell: f64) -> Result<f64> {
    if ell <= 0.0 || ell == 1.0 {
        return Err(Error::OutOfDomain { what: format!("dual parameter needs ℓ > 0, ℓ ≠ 1, got {ell}") });
    }
    let branch = if ell < 1.0 { WBranch::Lower } else { WBranch::Principal };
    Ok(-lambert_w(branch, -ell * (-ell).exp())?)
}

/// Coefficients of `−V` at `k = 1`, leading term `x⁴/4`. The series is
/// only asymptotic; no convergence is claimed.
pub fn skellam_unit_potential(n: usize) -> Result<PowerSeries<BigRational>> {
    let one = BigRational::one();
    solve_potential_unit(&MapModel::skellam(one.clone()), &BigRational::zero(), n).map(|v| v.scale(&-one))
}
