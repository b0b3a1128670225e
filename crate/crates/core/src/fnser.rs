//! Map models plus series solvers for the functional equations of Ψ, Ψ⁻¹
//! and V about a fixed point.
//!
//! All solvers work in the local variable `y = x − x*` with the local map
//! `F(y) = f(x* + y) − x*`, whose linear coefficient is the multiplier `s`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{IncrementalPowers, PowerSeries};

/// A one-dimensional analytic map.
#[derive(Debug, Clone, PartialEq)]
pub enum MapModel<T> {
    /// `(a x + b) / (c x + d)`.
    Mobius { name: &'static str, a: T, b: T, c: T, d: T },
    /// `s x (1 − x)`.
    Logistic { s: T },
    /// `k (1 − e^{−x})`.
    Skellam { k: T },
}

impl<T: Scalar> MapModel<T> {
    /// `(2x + 1)/(x + 2)`, fixed points ±1.
    pub fn beverton_holt() -> Self {
        let i = |n| T::from_ratio(n, 1);
        MapModel::Mobius { name: "bh", a: i(2), b: i(1), c: i(1), d: i(2) }
    }

    /// `(1 + x)/(1 − x)`: the quartic flow sampled at `t = π/4`.
    pub fn quartic() -> Self {
        let i = |n| T::from_ratio(n, 1);
        MapModel::Mobius { name: "quartic", a: i(1), b: i(1), c: i(-1), d: i(1) }
    }

    pub fn logistic(s: T) -> Self {
        MapModel::Logistic { s }
    }

    pub fn skellam(k: T) -> Self {
        MapModel::Skellam { k }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MapModel::Mobius { name, .. } => name,
            MapModel::Logistic { .. } => "logistic",
            MapModel::Skellam { .. } => "skellam",
        }
    }

    /// Named parameters, as strings in the scalar's own notation.
    pub fn params(&self) -> Vec<(&'static str, String)> {
        match self {
            MapModel::Mobius { .. } => vec![],
            MapModel::Logistic { s } => vec![("s", s.to_string())],
            MapModel::Skellam { k } => vec![("k", k.to_string())],
        }
    }

    pub fn eval_f64(&self, x: f64) -> Result<f64> {
        match self {
            MapModel::Mobius { a, b, c, d, .. } => {
                let den = c.to_f64() * x + d.to_f64();
                if den == 0.0 {
                    return Err(Error::PoleEncountered { what: format!("map denominator vanishes at x = {x}") });
                }
                Ok((a.to_f64() * x + b.to_f64()) / den)
            }
            MapModel::Logistic { s } => Ok(s.to_f64() * x * (1.0 - x)),
            MapModel::Skellam { k } => Ok(-k.to_f64() * (-x).exp_m1()),
        }
    }

    pub fn derivative_f64(&self, x: f64) -> Result<f64> {
        match self {
            MapModel::Mobius { a, b, c, d, .. } => {
                let den = c.to_f64() * x + d.to_f64();
                if den == 0.0 {
                    return Err(Error::PoleEncountered { what: format!("map denominator vanishes at x = {x}") });
                }
                let det = a.to_f64() * d.to_f64() - b.to_f64() * c.to_f64();
                Ok(det / (den * den))
            }
            MapModel::Logistic { s } => Ok(s.to_f64() * (1.0 - 2.0 * x)),
            MapModel::Skellam { k } => Ok(k.to_f64() * (-x).exp()),
        }
    }

    /// Exact evaluation; Skellam is exact only at `x = 0` unless `T` is a float.
    pub fn eval(&self, x: &T) -> Result<T> {
        match self {
            MapModel::Mobius { a, b, c, d, .. } => {
                let den = c.clone() * x.clone() + d.clone();
                if den.is_zero() {
                    return Err(Error::PoleEncountered { what: format!("map denominator vanishes at x = {x}") });
                }
                Ok((a.clone() * x.clone() + b.clone()) / den)
            }
            MapModel::Logistic { s } => Ok(s.clone() * x.clone() * (T::one() - x.clone())),
            MapModel::Skellam { k } => {
                if x.is_zero() {
                    return Ok(T::zero());
                }
                let e = exp_neg(x)?;
                Ok(k.clone() * (T::one() - e))
            }
        }
    }

    /// Real fixed points, ascending.
    pub fn fixed_points_f64(&self) -> Vec<f64> {
        let mut out = match self {
            MapModel::Mobius { a, b, c, d, .. } => {
                // c x² + (d − a) x − b = 0
                let (c, p, q) = (c.to_f64(), d.to_f64() - a.to_f64(), -b.to_f64());
                if c == 0.0 {
                    if p == 0.0 {
                        vec![]
                    } else {
                        vec![-q / p]
                    }
                } else {
                    let disc = p * p - 4.0 * c * q;
                    if disc < 0.0 {
                        vec![]
                    } else {
                        let r = disc.sqrt();
                        vec![(-p - r) / (2.0 * c), (-p + r) / (2.0 * c)]
                    }
                }
            }
            MapModel::Logistic { s } => vec![0.0, 1.0 - 1.0 / s.to_f64()],
            MapModel::Skellam { k } => match crate::maps::skellam_fixed_point(k.to_f64()) {
                Ok(x) => vec![0.0, x],
                Err(_) => vec![0.0],
            },
        };
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup();
        out
    }

    /// Preimage of `x` closest to `near`.
    pub fn inverse_f64(&self, x: f64, near: f64) -> Result<f64> {
        match self {
            MapModel::Mobius { a, b, c, d, .. } => {
                // x (c y + d) = a y + b
                let den = a.to_f64() - c.to_f64() * x;
                if den == 0.0 {
                    return Err(Error::PoleEncountered { what: format!("no finite preimage of {x}") });
                }
                Ok((d.to_f64() * x - b.to_f64()) / den)
            }
            MapModel::Logistic { s } => {
                let s = s.to_f64();
                let disc = 1.0 - 4.0 * x / s;
                if disc < 0.0 {
                    return Err(Error::ComplexBranch { x, s });
                }
                let r = 0.5 * disc.sqrt();
                let (lo, hi) = (0.5 - r, 0.5 + r);
                Ok(if (lo - near).abs() <= (hi - near).abs() { lo } else { hi })
            }
            MapModel::Skellam { k } => {
                let u = x / k.to_f64();
                if u >= 1.0 {
                    return Err(Error::DomainEscape { value: x });
                }
                Ok(-(-u).ln_1p())
            }
        }
    }

    /// `f(center + y)` as a series in `y` through `order`.
    pub fn taylor(&self, center: &T, order: usize) -> Result<PowerSeries<T>> {
        let mut c = vec![T::zero(); order + 1];
        match self {
            MapModel::Mobius { a, b, c: cc, d, .. } => {
                let n0 = a.clone() * center.clone() + b.clone();
                let d0 = cc.clone() * center.clone() + d.clone();
                if d0.is_zero() {
                    return Err(Error::PoleEncountered { what: format!("map has a pole at the expansion point {center}") });
                }
                // (n0 + a y) Σ (−cc/d0)^j y^j / d0
                let r = -(cc.clone() / d0.clone());
                let mut geo = T::one() / d0;
                let mut prev = T::zero();
                for (j, slot) in c.iter_mut().enumerate() {
                    let cur = geo.clone();
                    *slot = n0.clone() * cur.clone() + if j == 0 { T::zero() } else { a.clone() * prev.clone() };
                    prev = cur;
                    geo = geo * r.clone();
                }
            }
            MapModel::Logistic { s } => {
                c[0] = s.clone() * center.clone() * (T::one() - center.clone());
                if order >= 1 {
                    c[1] = s.clone() * (T::one() - center.clone() - center.clone());
                }
                if order >= 2 {
                    c[2] = -s.clone();
                }
            }
            MapModel::Skellam { k } => {
                // k − k e^{−center} e^{−y}
                let e = exp_neg(center)?;
                let mut term = k.clone() * e;
                c[0] = k.clone() - term.clone();
                for (j, slot) in c.iter_mut().enumerate().skip(1) {
                    term = -(term / T::from_usize(j));
                    *slot = -term.clone();
                }
            }
        }
        Ok(PowerSeries::new(center.clone(), c))
    }

    /// `f′(x*)`, checking that `x*` is fixed.
    pub fn multiplier(&self, x_star: &T) -> Result<T> {
        let f = local_map(self, x_star, 1)?;
        Ok(f.coeffs()[1].clone())
    }
}

fn exp_neg<T: Scalar>(x: &T) -> Result<T> {
    if x.is_zero() {
        return Ok(T::one());
    }
    T::from_f64_lossy((-x.to_f64()).exp()).ok_or_else(|| Error::OutOfDomain {
        what: format!("e^(-{x}) has no exact representative; use float mode"),
    })
}

/// Local map `F(y) = f(x* + y) − x*` with the fixed-point check applied.
pub fn local_map<T: Scalar>(map: &MapModel<T>, x_star: &T, order: usize) -> Result<PowerSeries<T>> {
    let f = map.taylor(x_star, order)?;
    let residual = f.coeffs()[0].clone() - x_star.clone();
    let bad = if T::EXACT {
        !residual.is_zero()
    } else {
        residual.to_f64().abs() > 1e-12 * x_star.to_f64().abs().max(1.0)
    };
    if bad {
        return Err(Error::NotAFixedPoint { point: x_star.to_f64(), residual: residual.to_f64() });
    }
    let mut c = f.into_coeffs();
    c[0] = T::zero();
    Ok(PowerSeries::new(x_star.clone(), c))
}

fn check_multiplier<T: Scalar>(s: &T, x_star: &T, max_power: usize) -> Result<()> {
    if s.is_negligible() {
        return Err(Error::NotAnalytic { point: x_star.to_f64() });
    }
    if (s.clone() - T::one()).is_negligible() {
        return Err(Error::UnitMultiplier);
    }
    let mut p = s.clone();
    for n in 2..=max_power {
        p = p * s.clone();
        if (p.clone() - T::one()).is_negligible() {
            return Err(Error::ResonantMultiplier { multiplier: s.to_f64(), power: n });
        }
    }
    Ok(())
}

/// Ψ about `x*` with `Ψ(x*) = 0`, `Ψ′(x*) = 1` and `sΨ = Ψ∘f` through `order`.
pub fn solve_schroeder<T: Scalar>(map: &MapModel<T>, x_star: &T, order: usize) -> Result<PowerSeries<T>> {
    let f = local_map(map, x_star, order)?;
    let s = f.coeffs()[1].clone();
    check_multiplier(&s, x_star, order)?;
    let powers = f.shifted_powers(order);
    let mut psi = vec![T::zero(); order + 1];
    if order >= 1 {
        psi[1] = T::one();
    }
    let mut s_n = s.clone();
    for n in 2..=order {
        s_n = s_n * s.clone();
        // Σ_m ψ_m [F^m]_n = s ψ_n
        let mut acc = T::zero();
        for m in 1..n {
            acc = acc + psi[m].clone() * powers[m - 1].coeffs()[n].clone();
        }
        psi[n] = acc / (s.clone() - s_n.clone());
    }
    Ok(PowerSeries::new(x_star.clone(), psi))
}

/// Ψ⁻¹ about `0`, taking `0 ↦ x*` with unit slope, satisfying `Ψ⁻¹(sz) = f(Ψ⁻¹(z))`.
pub fn solve_poincare<T: Scalar>(map: &MapModel<T>, x_star: &T, order: usize) -> Result<PowerSeries<T>> {
    let f = local_map(map, x_star, order)?;
    let s = f.coeffs()[1].clone();
    check_multiplier(&s, x_star, order)?;
    let fc = f.coeffs();
    let mut h = vec![T::zero(); order + 1];
    let mut powers = IncrementalPowers::new(order);
    if order >= 1 {
        h[1] = T::one();
        powers.push(&h, 1);
    }
    let mut s_n = s.clone();
    for n in 2..=order {
        s_n = s_n * s.clone();
        let mut acc = T::zero();
        for m in 2..=n {
            if !fc[m].is_zero() {
                acc = acc + fc[m].clone() * powers.get(m, n, &h);
            }
        }
        h[n] = acc / (s_n.clone() - s.clone());
        powers.push(&h, n);
    }
    h[0] = x_star.clone();
    Ok(PowerSeries::new(T::zero(), h))
}

/// V about `x*` with `V(x*) = V′(x*) = 0`, `V″(x*) = −2·log_s_squared`, and
/// `V(f(x)) = f′(x)² V(x)` through `order`.
///
/// Passing `log_s_squared = 1` gives the normalized shape `U = −V/ln²s`.
pub fn solve_potential<T: Scalar>(
    map: &MapModel<T>,
    x_star: &T,
    order: usize,
    log_s_squared: &T,
) -> Result<PowerSeries<T>> {
    let f = local_map(map, x_star, order)?;
    let s = f.coeffs()[1].clone();
    if s.is_negligible() {
        return Err(Error::NotAnalytic { point: x_star.to_f64() });
    }
    if (s.clone() - T::one()).is_negligible() {
        return Err(Error::UnitMultiplier);
    }
    // vₙ is divided by s²(s^{n−2} − 1)
    check_multiplier(&s, x_star, order.saturating_sub(2)).map_err(|e| match e {
        Error::ResonantMultiplier { multiplier, power } => Error::ResonantMultiplier { multiplier, power: power + 2 },
        other => other,
    })?;
    let g = f.derivative().mul(&f.derivative());
    let mut v = vec![T::zero(); order + 1];
    if order >= 2 {
        v[2] = -log_s_squared.clone();
    }
    let powers = f.shifted_powers(order);
    let s2 = s.clone() * s.clone();
    let mut s_n = s2.clone();
    for n in 3..=order {
        s_n = s_n * s.clone();
        let mut acc = T::zero();
        for j in 1..=n - 2 {
            acc = acc + g.coeffs()[j].clone() * v[n - j].clone();
        }
        for m in 2..n {
            acc = acc - v[m].clone() * powers[m - 1].coeffs()[n].clone();
        }
        v[n] = acc / (s_n.clone() - s2.clone());
    }
    Ok(PowerSeries::new(x_star.clone(), v))
}

/// Potential about a fixed point with multiplier exactly 1.
///
/// The leading term is quartic; it is fixed to `−F₂² y⁴` where `F₂` is the
/// quadratic coefficient of the local map. Needs the map through `order + 1`.
pub fn solve_potential_unit<T: Scalar>(map: &MapModel<T>, x_star: &T, order: usize) -> Result<PowerSeries<T>> {
    if order < 4 {
        return Err(Error::InsufficientOrder { needed: 4, have: order });
    }
    let f = local_map(map, x_star, order + 1)?;
    let fc = f.coeffs();
    if !(fc[1].clone() - T::one()).is_negligible() {
        return Err(Error::OutOfDomain { what: format!("multiplier {} is not 1", fc[1]) });
    }
    let f2 = fc[2].clone();
    if f2.is_negligible() {
        return Err(Error::OutOfDomain { what: "unit multiplier with vanishing quadratic term".into() });
    }
    let g = f.derivative().mul(&f.derivative());
    let powers = f.shifted_powers(order);
    let mut v = vec![T::zero(); order + 2];
    v[4] = -(f2.clone() * f2.clone());
    // [yⁿ] fixes v_{n−1} through the factor (n − 5) F₂
    for n in 6..=order + 1 {
        let mut acc = T::zero();
        for j in 2..=n - 4 {
            acc = acc + g.coeffs()[j].clone() * v[n - j].clone();
        }
        for m in 4..=n - 2 {
            acc = acc - v[m].clone() * powers[m - 1].coeffs()[n].clone();
        }
        v[n - 1] = acc / (T::from_usize(n - 5) * f2.clone());
    }
    v.truncate(order + 1);
    Ok(PowerSeries::new(x_star.clone(), v))
}

/// A real function that may fail outside its domain.
pub type Rule<'a> = &'a dyn Fn(f64) -> Result<f64>;

/// `f_t(x) = Ψ⁻¹(sᵗ Ψ(x))`.
pub fn interpolate(s: f64, psi: Rule, psi_inv: Rule, x: f64, t: f64) -> Result<f64> {
    if s <= 0.0 {
        return Err(Error::OutOfDomain { what: format!("s^t needs s > 0, got {s}") });
    }
    let z = s.powf(t) * psi(x)?;
    if !z.is_finite() {
        return Err(Error::DomainEscape { value: z });
    }
    psi_inv(z)
}

/// `v(x) = ln s · Ψ(x)/Ψ′(x)`.
pub fn velocity_from_psi(psi: Rule, dpsi: Rule, s: f64, x: f64) -> Result<f64> {
    let d = dpsi(x)?;
    if d == 0.0 || !d.is_finite() {
        return Err(Error::ZeroDerivative { x });
    }
    Ok(s.ln() * psi(x)? / d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    Psi,
    PsiInverse,
    Potential,
}

/// A truncated series plus what is needed to continue it past its disk.
#[derive(Debug, Clone)]
pub struct SeriesRule {
    pub kind: SeriesKind,
    pub series: PowerSeries<f64>,
    /// Disk radius about the series center in which it is trusted.
    pub radius: f64,
    pub multiplier: f64,
    pub fixed_point: f64,
}

/// Continues a series beyond its disk, contracting the argument with `f` or
/// its local inverse up to `descents` times and unwinding through the
/// functional equation.
pub fn refine_by_functional_equation<T: Scalar>(
    map: &MapModel<T>,
    rule: &SeriesRule,
    x: f64,
    descents: usize,
) -> Result<f64> {
    let s = rule.multiplier;
    let xs = rule.fixed_point;
    let attracting = s.abs() < 1.0;
    let center = rule.series.center().to_f64();
    match rule.kind {
        SeriesKind::Psi => {
            let mut y = x;
            let mut factor = 1.0;
            for i in 0..=descents {
                if (y - center).abs() < rule.radius {
                    return Ok(factor * rule.series.eval_f64(y));
                }
                if i == descents {
                    break;
                }
                if attracting {
                    y = map.eval_f64(y)?;
                    factor /= s;
                } else {
                    y = map.inverse_f64(y, xs)?;
                    factor *= s;
                }
            }
            Err(Error::NoContraction { descents, last: y })
        }
        SeriesKind::PsiInverse => {
            let mut z = x;
            let mut steps = 0;
            loop {
                if (z - center).abs() < rule.radius {
                    break;
                }
                if steps == descents {
                    return Err(Error::NoContraction { descents, last: z });
                }
                z = if attracting { z * s } else { z / s };
                steps += 1;
            }
            let mut w = rule.series.eval_f64(z);
            for _ in 0..steps {
                w = if attracting { map.inverse_f64(w, xs)? } else { map.eval_f64(w)? };
            }
            Ok(w)
        }
        SeriesKind::Potential => {
            let mut y = x;
            let mut factor = 1.0;
            for i in 0..=descents {
                if (y - center).abs() < rule.radius {
                    return Ok(factor * rule.series.eval_f64(y));
                }
                if i == descents {
                    break;
                }
                if attracting {
                    let d = map.derivative_f64(y)?;
                    if d == 0.0 {
                        return Err(Error::ZeroDerivative { x: y });
                    }
                    factor /= d * d;
                    y = map.eval_f64(y)?;
                } else {
                    let prev = map.inverse_f64(y, xs)?;
                    let d = map.derivative_f64(prev)?;
                    factor *= d * d;
                    y = prev;
                }
            }
            Err(Error::NoContraction { descents, last: y })
        }
    }
}

/// Log-magnitudes of a coefficient sequence, indexable by power.
pub trait CoefficientMagnitudes {
    /// Highest stored index.
    fn max_index(&self) -> usize;
    /// `ln |aₙ|`, or `None` when `aₙ = 0`.
    fn ln_abs_coeff(&self, n: usize) -> Option<f64>;
}

impl<T: Scalar> CoefficientMagnitudes for PowerSeries<T> {
    fn max_index(&self) -> usize {
        self.order()
    }

    fn ln_abs_coeff(&self, n: usize) -> Option<f64> {
        let c = self.coeff(n)?;
        if c.is_zero() {
            None
        } else {
            Some(c.ln_abs())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusEstimate {
    /// `1 / max |aₙ|^{1/n}` over the tail window.
    pub limsup_radius: f64,
    /// `e^{−c₁}` from fitting `ln|aₙ| ≈ c₀ + c₁ n + c₂ ln n` to block maxima
    /// over the upper half of the indices. Removes the slow power-law bias
    /// of the plain estimate.
    pub corrected_radius: f64,
    /// `|aₙ|^{1/n}` still rising appreciably at truncation.
    pub still_growing: bool,
}

/// Radius of convergence estimate from the tail of a coefficient sequence.
pub fn estimate_radius<M: CoefficientMagnitudes + ?Sized>(m: &M, tail_window: usize) -> Result<RadiusEstimate> {
    let n_max = m.max_index();
    let w = tail_window.max(2);
    if n_max < 2 * w {
        return Err(Error::InsufficientOrder { needed: 2 * w, have: n_max });
    }
    let lo = n_max + 1 - w;
    let roots: Vec<(f64, f64)> =
        (lo..=n_max).filter_map(|n| m.ln_abs_coeff(n).map(|l| (n as f64, l / n as f64))).collect();
    if roots.is_empty() {
        return Ok(RadiusEstimate { limsup_radius: f64::INFINITY, corrected_radius: f64::INFINITY, still_growing: false });
    }
    let top = roots.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let limsup_radius = (-top).exp();

    let g: Vec<(f64, f64)> = roots.iter().map(|&(n, r)| (n, r.exp())).collect();
    let mean = g.iter().map(|p| p.1).sum::<f64>() / g.len() as f64;
    let slope = linear_slope(&g);
    let still_growing = slope * n_max as f64 / mean > 0.1;

    let block = (w / 5).max(2);
    let mut pts = Vec::new();
    let mut start = n_max / 2;
    while start + block <= n_max + 1 {
        let best = (start..start + block)
            .filter_map(|n| m.ln_abs_coeff(n).map(|l| (n, l)))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        if let Some((n, l)) = best {
            pts.push((n as f64, l));
        }
        start += block;
    }
    let corrected_radius = if pts.len() >= 3 {
        let c = least_squares3(&pts, |n| [1.0, n, n.ln()]);
        (-c[1]).exp()
    } else {
        limsup_radius
    };
    Ok(RadiusEstimate { limsup_radius, corrected_radius, still_growing })
}

fn linear_slope(p: &[(f64, f64)]) -> f64 {
    let n = p.len() as f64;
    let mx = p.iter().map(|q| q.0).sum::<f64>() / n;
    let my = p.iter().map(|q| q.1).sum::<f64>() / n;
    let sxy: f64 = p.iter().map(|q| (q.0 - mx) * (q.1 - my)).sum();
    let sxx: f64 = p.iter().map(|q| (q.0 - mx) * (q.0 - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Least-squares fit `y ≈ Σ cᵢ φᵢ(x)` with three basis functions.
pub(crate) fn least_squares3(p: &[(f64, f64)], basis: impl Fn(f64) -> [f64; 3]) -> [f64; 3] {
    let mut a = [[0.0; 4]; 3];
    for &(x, y) in p {
        let phi = basis(x);
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += phi[i] * phi[j];
            }
            a[i][3] += phi[i] * y;
        }
    }
    // Gaussian elimination, partial pivoting
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()).unwrap();
        a.swap(col, piv);
        for r in 0..3 {
            if r != col && a[col][col] != 0.0 {
                let k = a[r][col] / a[col][col];
                for c in col..4 {
                    a[r][c] -= k * a[col][c];
                }
            }
        }
    }
    [a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_rational::BigRational;

    type Q = BigRational;

    fn qs(v: &[(i64, i64)]) -> Vec<Q> {
        v.iter().map(|&(n, d)| rational(n, d)).collect()
    }

    #[test]
    fn bh_schroeder_coefficients() {
        let bh = MapModel::<Q>::beverton_holt();
        let psi = solve_schroeder(&bh, &rational(1, 1), 3).unwrap();
        assert_eq!(&psi.coeffs()[1..], &qs(&[(1, 1), (-1, 2), (1, 4)])[..]);
    }

    #[test]
    fn logistic_two_schroeder_and_poincare() {
        let m = MapModel::logistic(rational(2, 1));
        let psi = solve_schroeder(&m, &rational(0, 1), 4).unwrap();
        assert_eq!(&psi.coeffs()[1..], &qs(&[(1, 1), (1, 1), (4, 3), (2, 1)])[..]);
        let inv = solve_poincare(&m, &rational(0, 1), 4).unwrap();
        assert_eq!(&inv.coeffs()[1..], &qs(&[(1, 1), (-1, 1), (2, 3), (-1, 3)])[..]);
        assert_eq!(psi.reversion().unwrap(), inv);
    }

    #[test]
    fn logistic_four_is_analytic_at_zero() {
        // arcsin²√x = x + x²/3 + 8x³/45 + 4x⁴/35
        let m = MapModel::logistic(rational(4, 1));
        let psi = solve_schroeder(&m, &rational(0, 1), 4).unwrap();
        assert_eq!(&psi.coeffs()[1..], &qs(&[(1, 1), (1, 3), (8, 45), (4, 35)])[..]);
    }

    #[test]
    fn zero_multiplier_is_not_analytic() {
        let m = MapModel::logistic(rational(2, 1));
        let err = solve_schroeder(&m, &rational(1, 2), 4).unwrap_err();
        assert_eq!(err.kind(), "NotAnalytic");
    }

    #[test]
    fn non_fixed_point_rejected() {
        let m = MapModel::logistic(rational(3, 1));
        assert_eq!(solve_schroeder(&m, &rational(1, 3), 4).unwrap_err().kind(), "NotAFixedPoint");
    }

    #[test]
    fn resonance_detected() {
        let m = MapModel::logistic(rational(3, 1));
        // about x* = 2/3 the multiplier is −1
        let err = solve_schroeder(&m, &rational(2, 3), 4).unwrap_err();
        assert_eq!(err, Error::ResonantMultiplier { multiplier: -1.0, power: 2 });
    }

    #[test]
    fn potential_logistic_three() {
        let m = MapModel::logistic(rational(3, 1));
        let u = solve_potential(&m, &rational(0, 1), 6, &rational(-1, 1)).unwrap();
        // −V/ln²s = U = x²(1 + a₁x + a₂x²); with log_s_squared = −1 we get U directly
        assert_eq!(&u.coeffs()[2..5], &qs(&[(1, 1), (-1, 1), (-1, 4)])[..]);
    }

    #[test]
    fn potential_bh_about_one() {
        let bh = MapModel::<Q>::beverton_holt();
        let v = solve_potential(&bh, &rational(1, 1), 6, &rational(1, 1)).unwrap();
        // −(y² + y³ + y⁴/4): (1 − x²)²/4 about x = 1
        assert_eq!(v.coeffs(), &qs(&[(0, 1), (0, 1), (-1, 1), (-1, 1), (-1, 4), (0, 1), (0, 1)])[..]);
    }

    #[test]
    fn potential_skellam_two_about_zero() {
        let m = MapModel::skellam(rational(2, 1));
        let v = solve_potential(&m, &rational(0, 1), 5, &rational(1, 1)).unwrap();
        assert_eq!(&v.coeffs()[2..], &qs(&[(-1, 1), (1, 1), (-5, 36), (-1, 28)])[..]);
    }

    #[test]
    fn unit_multiplier_logistic() {
        let m = MapModel::logistic(rational(1, 1));
        assert_eq!(solve_potential(&m, &rational(0, 1), 6, &rational(1, 1)).unwrap_err(), Error::UnitMultiplier);
        let v = solve_potential_unit(&m, &rational(0, 1), 8).unwrap();
        // −x⁴(1 + 2x + 4x² + (25/3)x³ + (215/12)x⁴)
        assert_eq!(&v.coeffs()[4..], &qs(&[(-1, 1), (-2, 1), (-4, 1), (-25, 3), (-215, 12)])[..]);
    }

    #[test]
    fn interpolation_and_velocity() {
        let psi = |x: f64| Ok(2.0 * (x - 1.0) / (x + 1.0));
        let inv = |z: f64| Ok((2.0 + z) / (2.0 - z));
        let dpsi = |x: f64| Ok(4.0 / ((x + 1.0) * (x + 1.0)));
        assert!((interpolate(1.0 / 3.0, &psi, &inv, 0.0, 1.0).unwrap() - 0.5).abs() < 1e-12);
        assert!((interpolate(1.0 / 3.0, &psi, &inv, 0.0, 2.0).unwrap() - 0.8).abs() < 1e-12);
        let v = velocity_from_psi(&psi, &dpsi, 1.0 / 3.0, 0.0).unwrap();
        assert!((v - 3f64.ln() / 2.0).abs() < 1e-12);
        assert_eq!(velocity_from_psi(&psi, &dpsi, 1.0 / 3.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn refine_with_zero_descents_is_plain_evaluation() {
        let m = MapModel::logistic(2.0f64);
        let psi = solve_schroeder(&m, &0.0, 20).unwrap();
        let rule = SeriesRule { kind: SeriesKind::Psi, series: psi.clone(), radius: 0.25, multiplier: 2.0, fixed_point: 0.0 };
        assert_eq!(refine_by_functional_equation(&m, &rule, 0.1, 0).unwrap(), psi.eval_f64(0.1));
        let far = refine_by_functional_equation(&m, &rule, 0.4, 3).unwrap();
        assert!((far - (-0.5 * (1.0f64 - 0.8).ln())).abs() < 1e-9);
        assert_eq!(refine_by_functional_equation(&m, &rule, 0.4, 0).unwrap_err().kind(), "NoContraction");
    }

    #[test]
    fn least_squares_recovers_exact_fit() {
        let pts: Vec<(f64, f64)> = (1..20).map(|n| (n as f64, 2.0 - 0.5 * n as f64 + 3.0 * (n as f64).ln())).collect();
        let c = least_squares3(&pts, |n| [1.0, n, n.ln()]);
        assert!((c[0] - 2.0).abs() < 1e-9 && (c[1] + 0.5).abs() < 1e-9 && (c[2] - 3.0).abs() < 1e-9);
    }
}
