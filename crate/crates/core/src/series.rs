//! Truncated power series about an expansion point.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `Σ_{n=0}^{N} cₙ (x − center)ⁿ`, truncated at order `N`.
///
/// Missing high-order terms are unknown, not zero: every binary operation
/// truncates to the smaller of the two orders and nothing ever extends it.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries<T> {
    center: T,
    coeffs: Vec<T>,
}

impl<T: Scalar> PowerSeries<T> {
    /// Panics if `coeffs` is empty.
    pub fn new(center: T, coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a power series needs at least a constant term");
        Self { center, coeffs }
    }

    /// `y` about `center`, i.e. the identity `x ↦ x` written in the local variable.
    pub fn variable(center: T, order: usize) -> Self {
        let mut coeffs = vec![T::zero(); order + 1];
        if order >= 1 {
            coeffs[1] = T::one();
        }
        coeffs[0] = center.clone();
        Self { center, coeffs }
    }

    pub fn zero(center: T, order: usize) -> Self {
        Self { center, coeffs: vec![T::zero(); order + 1] }
    }

    pub fn constant(center: T, value: T, order: usize) -> Self {
        let mut s = Self::zero(center, order);
        s.coeffs[0] = value;
        s
    }

    pub fn center(&self) -> &T {
        &self.center
    }

    /// Highest stored power.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Coefficient of `(x − center)ⁿ`; `None` beyond the truncation order.
    pub fn coeff(&self, n: usize) -> Option<&T> {
        self.coeffs.get(n)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let keep = (order + 1).min(self.coeffs.len());
        Self { center: self.center.clone(), coeffs: self.coeffs[..keep].to_vec() }
    }

    pub fn with_center(mut self, center: T) -> Self {
        self.center = center;
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().min(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeffs[i].clone() + other.coeffs[i].clone()).collect();
        Self { center: self.center.clone(), coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().min(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeffs[i].clone() - other.coeffs[i].clone()).collect();
        Self { center: self.center.clone(), coeffs }
    }

    pub fn scale(&self, k: &T) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c.clone() * k.clone()).collect();
        Self { center: self.center.clone(), coeffs }
    }

    /// Cauchy product truncated to the smaller order.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.coeffs.len().min(other.coeffs.len());
        let mut out = vec![T::zero(); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n - i).enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self { center: self.center.clone(), coeffs: out }
    }

    pub fn derivative(&self) -> Self {
        let coeffs: Vec<T> = if self.coeffs.len() == 1 {
            vec![T::zero()]
        } else {
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, c)| c.clone() * T::from_usize(n))
                .collect()
        };
        Self { center: self.center.clone(), coeffs }
    }

    /// Substitutes `inner` for the local variable: the result is
    /// `Σ aₘ (inner(y) − inner₀)ᵐ` expanded in `inner`'s variable.
    ///
    /// `inner`'s constant term is the point in `self`'s coordinates at which
    /// `self` is expanded, so it must equal `self.center`.
    pub fn compose(&self, inner: &Self) -> Self {
        let n = self.coeffs.len().min(inner.coeffs.len());
        let mut shifted = inner.truncate(n - 1);
        shifted.coeffs[0] = T::zero();
        // Horner: a_N, a_N*g + a_{N-1}, ...
        let mut acc = Self::constant(inner.center.clone(), self.coeffs[n - 1].clone(), n - 1);
        for a in self.coeffs[..n - 1].iter().rev() {
            acc = acc.mul(&shifted);
            acc.coeffs[0] = acc.coeffs[0].clone() + a.clone();
        }
        acc
    }

    /// Compositional inverse.
    ///
    /// If `self` maps `center + y ↦ c₀ + Σ cₙ yⁿ`, the result maps
    /// `c₀ + z ↦ center + Σ tₙ zⁿ`, so reverting twice is the identity.
    pub fn reversion(&self) -> Result<Self> {
        let order = self.order();
        let lin = self.coeffs.get(1).cloned().unwrap_or_else(T::zero);
        if lin.is_zero() {
            return Err(Error::ZeroLinearTerm);
        }
        let mut t = vec![T::zero(); order + 1];
        t[0] = self.center.clone();
        if order == 0 {
            return Ok(Self { center: self.coeffs[0].clone(), coeffs: t });
        }
        t[1] = T::one() / lin.clone();
        // powers[m][n] = [zⁿ] (Σ_{j≥1} tⱼ zʲ)^m, filled column by column
        let mut powers = IncrementalPowers::new(order);
        powers.push(&t, 1);
        for n in 2..=order {
            // s₁ tₙ + Σ_{m=2}^{n} sₘ [T^m]ₙ = 0
            let mut acc = T::zero();
            for m in 2..=n {
                let s = &self.coeffs[m];
                if !s.is_zero() {
                    acc = acc + s.clone() * powers.get(m, n, &t);
                }
            }
            t[n] = -(acc / lin.clone());
            powers.push(&t, n);
        }
        Ok(Self { center: self.coeffs[0].clone(), coeffs: t })
    }

    /// `exp(self − c₀)`, via `E′ = S′E`.
    pub fn exp_shifted(&self) -> Self {
        let n = self.order();
        let d = self.derivative();
        let mut e = vec![T::zero(); n + 1];
        e[0] = T::one();
        for k in 1..=n {
            // k e_k = Σ_{j=1}^{k} j s_j e_{k-j}
            let mut acc = T::zero();
            for j in 1..=k {
                acc = acc + d.coeffs[j - 1].clone() * e[k - j].clone();
            }
            e[k] = acc / T::from_usize(k);
        }
        Self { center: self.center.clone(), coeffs: e }
    }

    /// Evaluates at absolute position `x` in f64 (Horner on `x − center`).
    pub fn eval_f64(&self, x: f64) -> f64 {
        let y = x - self.center.to_f64();
        self.eval_local_f64(y)
    }

    /// Evaluates at local offset `y = x − center`.
    pub fn eval_local_f64(&self, y: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * y + c.to_f64())
    }

    /// Exact evaluation at local offset `y`.
    pub fn eval_local(&self, y: &T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * y.clone() + c.clone())
    }

    pub fn to_f64(&self) -> PowerSeries<f64> {
        PowerSeries {
            center: self.center.to_f64(),
            coeffs: self.coeffs.iter().map(|c| c.to_f64()).collect(),
        }
    }

    /// Powers `self − c₀` raised to `1..=max_power`, each truncated to the series order.
    pub fn shifted_powers(&self, max_power: usize) -> Vec<Self> {
        let mut base = self.clone();
        base.coeffs[0] = T::zero();
        let mut out = Vec::with_capacity(max_power);
        let mut cur = base.clone();
        for _ in 0..max_power {
            out.push(cur.clone());
            cur = cur.mul(&base);
        }
        out
    }
}

/// Powers of a series whose coefficients are discovered one at a time.
///
/// `[F^m]ₙ` only involves `f₁..f_{n−m+1}`, so once `f₁..f_{n−1}` are known
/// every `[F^m]ₙ` with `m ≥ 2` can be filled in without knowing `fₙ`.
pub(crate) struct IncrementalPowers<T> {
    // table[m][n], m >= 1
    table: Vec<Vec<Option<T>>>,
}

impl<T: Scalar> IncrementalPowers<T> {
    pub(crate) fn new(order: usize) -> Self {
        Self { table: vec![vec![None; order + 1]; order + 1] }
    }

    /// Records coefficient `f[n]` (as the first power) after it is known.
    pub(crate) fn push(&mut self, f: &[T], n: usize) {
        self.table[1][n] = Some(f[n].clone());
    }

    /// `[F^m]ₙ` for `m ≥ 2`, memoized; requires `f[1..n-m+1]` known.
    pub(crate) fn get(&mut self, m: usize, n: usize, f: &[T]) -> T {
        if n < m {
            return T::zero();
        }
        if let Some(v) = &self.table[m][n] {
            return v.clone();
        }
        let v = if m == 1 {
            f[n].clone()
        } else {
            // [F^m]ₙ = Σ_{j=1}^{n-m+1} f_j [F^{m-1}]_{n-j}
            let mut acc = T::zero();
            for j in 1..=(n + 1 - m) {
                if f[j].is_zero() {
                    continue;
                }
                acc = acc + f[j].clone() * self.get(m - 1, n - j, f);
            }
            acc
        };
        self.table[m][n] = Some(v.clone());
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        rational(n, d)
    }

    fn series(c: &[(i64, i64)]) -> PowerSeries<BigRational> {
        PowerSeries::new(q(0, 1), c.iter().map(|&(n, d)| q(n, d)).collect())
    }

    #[test]
    fn catalan_reversion() {
        let s = series(&[(0, 1), (1, 1), (1, 1), (0, 1), (0, 1)]);
        let r = s.reversion().unwrap();
        assert_eq!(r.coeffs(), series(&[(0, 1), (1, 1), (-1, 1), (2, 1), (-5, 1)]).coeffs());
        let id = s.compose(&r);
        assert_eq!(id.coeffs(), PowerSeries::variable(q(0, 1), 4).coeffs());
    }

    #[test]
    fn identity_reverts_to_itself() {
        let id = PowerSeries::variable(q(0, 1), 6);
        assert_eq!(id.reversion().unwrap(), id);
    }

    #[test]
    fn zero_linear_term_rejected() {
        let s = series(&[(0, 1), (0, 1), (1, 1)]);
        assert_eq!(s.reversion().unwrap_err(), Error::ZeroLinearTerm);
    }

    #[test]
    fn logistic_two_closed_forms_revert() {
        // (1 - e^{-2x})/2 and -ln(1-2x)/2
        let s = series(&[(0, 1), (1, 1), (-1, 1), (2, 3)]);
        let r = s.reversion().unwrap();
        assert_eq!(r.coeffs(), series(&[(0, 1), (1, 1), (1, 1), (4, 3)]).coeffs());
    }

    #[test]
    fn reversion_tracks_centers() {
        // 3 + 2y about 1  <->  1 + z/2 about 3
        let s = PowerSeries::new(q(1, 1), vec![q(3, 1), q(2, 1), q(0, 1)]);
        let r = s.reversion().unwrap();
        assert_eq!(r.center(), &q(3, 1));
        assert_eq!(r.coeffs(), &[q(1, 1), q(1, 2), q(0, 1)]);
        assert_eq!(r.reversion().unwrap(), s);
    }

    #[test]
    fn truncation_never_extends() {
        let a = series(&[(1, 1), (1, 1), (1, 1)]);
        let b = series(&[(1, 1), (1, 1), (1, 1), (1, 1), (1, 1)]);
        assert_eq!(a.mul(&b).order(), 2);
        assert_eq!(a.add(&b).order(), 2);
        assert_eq!(b.compose(&a.sub(&series(&[(1, 1)]))).order(), 0);
    }

    #[test]
    fn exp_of_linear() {
        let x = PowerSeries::variable(q(0, 1), 6);
        let e = x.exp_shifted();
        let fact = [1, 1, 2, 6, 24, 120, 720];
        for (n, c) in e.coeffs().iter().enumerate() {
            assert_eq!(c, &q(1, fact[n]));
        }
    }

    #[test]
    fn float_eval() {
        let s = PowerSeries::new(1.0, vec![2.0, 3.0, 4.0]);
        assert_eq!(s.eval_f64(2.0), 9.0);
    }
}
