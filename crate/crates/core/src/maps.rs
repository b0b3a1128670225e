//! Concrete models with closed forms, and the Lambert W function.

use std::f64::consts::{E, FRAC_PI_2};

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::PowerSeries;

/// Real branches of Lambert W.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WBranch {
    Principal,
    Lower,
}

/// `w` with `w eʷ = z` on the requested branch.
pub fn lambert_w(branch: WBranch, z: f64) -> Result<f64> {
    let branch_pt = -1.0 / E;
    let bad = || Error::OutOfDomain { what: format!("Lambert W argument {z} outside the branch domain") };
    if !z.is_finite() || z < branch_pt - 1e-15 {
        return Err(bad());
    }
    if branch == WBranch::Lower && z >= 0.0 {
        return Err(bad());
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let p2 = 2.0 * (E * z + 1.0);
    if p2 <= 0.0 {
        return Ok(-1.0);
    }
    // starting guesses: branch-point series, then logs
    let near = p2 < 0.5;
    let mut w = match branch {
        WBranch::Principal if near => {
            let p = p2.sqrt();
            -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
        }
        WBranch::Principal if z < 3.0 => {
            let l = z.ln_1p();
            l * (1.0 - (1.0 + l).ln() / (2.0 + l))
        }
        WBranch::Principal => {
            let l = z.ln();
            l - l.ln()
        }
        WBranch::Lower if near => {
            let p = -p2.sqrt();
            -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
        }
        WBranch::Lower => {
            let l = (-z).ln();
            l - (-l).ln()
        }
    };
    for _ in 0..100 {
        let ew = w.exp();
        let r = w * ew - z;
        if r == 0.0 {
            break;
        }
        let w1 = w + 1.0;
        let step = r / (ew * w1 - (w + 2.0) * r / (2.0 * w1));
        if !step.is_finite() {
            break;
        }
        w -= step;
        if step.abs() <= 1e-16 * w.abs().max(1e-300) {
            break;
        }
    }
    Ok(w)
}

/// Nontrivial fixed point of `k(1 − e^{−x})`: positive for `k > 1`,
/// negative for `0 < k < 1`.
pub fn skellam_fixed_point(k: f64) -> Result<f64> {
    if k <= 0.0 || !k.is_finite() {
        return Err(Error::OutOfDomain { what: format!("Skellam needs k > 0, got {k}") });
    }
    if k == 1.0 {
        return Err(Error::DegenerateK);
    }
    let z = -k * (-k).exp();
    let branch = if k > 1.0 { WBranch::Principal } else { WBranch::Lower };
    let mut x = k + lambert_w(branch, z)?;
    // Newton polish on x − k(1 − e^{−x})
    for _ in 0..4 {
        let g = x + k * (-x).exp_m1();
        let dg = 1.0 - k * (-x).exp();
        if dg == 0.0 {
            break;
        }
        x -= g / dg;
    }
    Ok(x)
}

/// `ℓ = k − x*`, the multiplier at the nontrivial Skellam fixed point.
pub fn skellam_ell(k: f64) -> Result<f64> {
    Ok(k - skellam_fixed_point(k)?)
}

/// Closed-form continuous-time Beverton–Holt trajectory.
pub fn bh_trajectory(x: f64, t: f64) -> Result<f64> {
    let r = (1.0f64 / 3.0).powf(t);
    let num = (x + 1.0) + (x - 1.0) * r;
    let den = (x + 1.0) - (x - 1.0) * r;
    if den == 0.0 || !den.is_finite() {
        return Err(Error::PoleEncountered { what: format!("trajectory denominator vanishes at x = {x}, t = {t}") });
    }
    Ok(num / den)
}

/// The same trajectory at integer `n`, exactly.
pub fn bh_trajectory_steps<T: Scalar>(x: &T, n: i64) -> Result<T> {
    let three = T::from_ratio(3, 1);
    let r = if n >= 0 { T::one() / three.powi(n as usize) } else { three.powi(n.unsigned_abs() as usize) };
    let one = T::one();
    let num = (x.clone() + one.clone()) + (x.clone() - one.clone()) * r.clone();
    let den = (x.clone() + one.clone()) - (x.clone() - one) * r;
    if den.is_zero() {
        return Err(Error::PoleEncountered { what: format!("trajectory denominator vanishes at x = {x}, n = {n}") });
    }
    Ok(num / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelId {
    Bh,
    Quartic,
    Logistic2,
    Logistic4,
}

type F1 = fn(f64) -> Result<f64>;

/// A model whose Ψ, Ψ⁻¹ and flow are known in closed form.
#[derive(Clone, Copy)]
pub struct ClosedFormModel {
    pub id: ModelId,
    /// Multiplier per unit time.
    pub s: f64,
    pub interval: (f64, f64),
    pub psi: F1,
    pub dpsi: F1,
    pub psi_inv: F1,
    pub potential: F1,
    pub velocity: F1,
}

impl std::fmt::Debug for ClosedFormModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ClosedFormModel").field("id", &self.id).field("s", &self.s).field("interval", &self.interval).finish()
    }
}

impl ClosedFormModel {
    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "bh" => Some(bh_model()),
            "quartic" => Some(quartic_model()),
            "logistic2" => Some(logistic2_model()),
            "logistic4" => Some(logistic4_model()),
            _ => None,
        }
    }

    /// `Ψ⁻¹(sᵗ Ψ(x))`; `t = 0` returns `x` untouched.
    pub fn trajectory(&self, x: f64, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(x);
        }
        if self.id == ModelId::Quartic {
            return Ok((t + x.atan()).tan());
        }
        if self.id == ModelId::Bh {
            return bh_trajectory(x, t);
        }
        crate::fnser::interpolate(self.s, &self.psi, &self.psi_inv, x, t)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.interval.0 && x <= self.interval.1
    }
}

fn ln3() -> f64 {
    3f64.ln()
}

pub fn bh_model() -> ClosedFormModel {
    ClosedFormModel {
        id: ModelId::Bh,
        s: 1.0 / 3.0,
        interval: (-1.0, 1.0),
        psi: |x| {
            if x == -1.0 {
                return Err(Error::PoleEncountered { what: "Ψ has a pole at x = -1".into() });
            }
            Ok((2.0 * x - 2.0) / (x + 1.0))
        },
        dpsi: |x| Ok(4.0 / ((x + 1.0) * (x + 1.0))),
        psi_inv: |z| {
            if z == 2.0 {
                return Err(Error::DomainEscape { value: z });
            }
            Ok((2.0 + z) / (2.0 - z))
        },
        potential: |x| Ok(-0.25 * ln3() * ln3() * (1.0 - x * x).powi(2)),
        velocity: |x| Ok(0.5 * ln3() * (1.0 - x * x)),
    }
}

/// Inverted quartic `V = −(1 + x²)²`, flowing along `x = tan(t + arctan x₀)`.
pub fn quartic_model() -> ClosedFormModel {
    ClosedFormModel {
        id: ModelId::Quartic,
        s: E,
        interval: (f64::NEG_INFINITY, f64::INFINITY),
        psi: |x| Ok(x.atan().exp()),
        dpsi: |x| Ok(x.atan().exp() / (1.0 + x * x)),
        psi_inv: |z| {
            if z <= 0.0 {
                return Err(Error::DomainEscape { value: z });
            }
            let a = z.ln();
            if a.abs() >= FRAC_PI_2 {
                return Err(Error::DomainEscape { value: z });
            }
            Ok(a.tan())
        },
        potential: |x| Ok(-(1.0 + x * x).powi(2)),
        velocity: |x| Ok(1.0 + x * x),
    }
}

pub fn logistic2_model() -> ClosedFormModel {
    ClosedFormModel {
        id: ModelId::Logistic2,
        s: 2.0,
        interval: (f64::NEG_INFINITY, 0.5),
        psi: |x| logistic_closed_psi(2, x),
        dpsi: |x| Ok(1.0 / (1.0 - 2.0 * x)),
        psi_inv: |z| logistic_closed_psi_inv(2, z),
        potential: |x| {
            let v = logistic2_velocity(x)?;
            Ok(-v * v)
        },
        velocity: logistic2_velocity,
    }
}

fn logistic2_velocity(x: f64) -> Result<f64> {
    if x >= 0.5 {
        return Err(Error::OutOfDomain { what: format!("x = {x} must be below 1/2") });
    }
    let u = 1.0 - 2.0 * x;
    Ok(2f64.ln() * (-0.5 * u.ln()) * u)
}

pub fn logistic4_model() -> ClosedFormModel {
    ClosedFormModel {
        id: ModelId::Logistic4,
        s: 4.0,
        interval: (0.0, 1.0),
        psi: |x| logistic_closed_psi(4, x),
        dpsi: |x| {
            if x <= 0.0 || x >= 1.0 {
                return Err(Error::ZeroDerivative { x });
            }
            Ok((x.sqrt()).asin() / (x * (1.0 - x)).sqrt())
        },
        psi_inv: |z| logistic_closed_psi_inv(4, z),
        potential: |x| Ok(crate::logistic::s4_potential(0, x)),
        velocity: |x| Ok(crate::logistic::s4_velocity(0, x)),
    }
}

/// Closed-form Ψ for `s ∈ {2, 4}`.
pub fn logistic_closed_psi(s: u32, x: f64) -> Result<f64> {
    match s {
        2 if x < 0.5 => Ok(-0.5 * (-2.0 * x).ln_1p()),
        4 if (0.0..=1.0).contains(&x) => {
            let a = x.sqrt().asin();
            Ok(a * a)
        }
        2 | 4 => Err(Error::OutOfDomain { what: format!("x = {x} outside the domain of Ψ for s = {s}") }),
        _ => Err(Error::OutOfDomain { what: format!("no closed form for s = {s}") }),
    }
}

/// Closed-form Ψ⁻¹ for `s ∈ {2, 4}`.
pub fn logistic_closed_psi_inv(s: u32, z: f64) -> Result<f64> {
    match s {
        2 => Ok(-0.5 * (-2.0 * z).exp_m1()),
        4 if z >= 0.0 => {
            let r = z.sqrt().sin();
            Ok(r * r)
        }
        4 => Err(Error::OutOfDomain { what: format!("Ψ⁻¹ for s = 4 needs z >= 0, got {z}") }),
        _ => Err(Error::OutOfDomain { what: format!("no closed form for s = {s}") }),
    }
}

/// A point of the projective real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Projective {
    Finite(f64),
    Infinity,
}

/// `x ↦ (1 + x)/(1 − x)` on the projective line.
pub fn quartic_step(p: Projective) -> Projective {
    match p {
        Projective::Infinity => Projective::Finite(-1.0),
        Projective::Finite(x) if x == 1.0 => Projective::Infinity,
        Projective::Finite(x) => Projective::Finite((1.0 + x) / (1.0 - x)),
    }
}

/// Time to go once around the projective line from `x₀`, passing through
/// infinity once. Each leg is a quadrature of `dx / v`.
pub fn quartic_circumnavigation_time(x0: f64) -> Result<f64> {
    let inv_v = |x: f64| 1.0 / (1.0 + x * x);
    let tol = 1e-12;
    let to_inf = crate::quad::integrate_to_infinity(&inv_v, x0, tol)?;
    let from_neg_inf = crate::quad::integrate_to_infinity(&inv_v, 0.0, tol)?;
    let up = crate::quad::integrate(&inv_v, 0.0, x0, tol)?;
    Ok(to_inf + from_neg_inf + up)
}

/// Quartic energy in angle form, `x = tan θ`: `(θ̇² − 1)/cos⁴θ`.
pub fn quartic_energy_angle(theta: f64, theta_dot: f64) -> f64 {
    (theta_dot * theta_dot - 1.0) / theta.cos().powi(4)
}

/// Exact series of `e^{−x} − (1 − x/2)/(1 + x/2)` about 0.
pub fn skellam_pade_defect(order: usize) -> PowerSeries<BigRational> {
    use crate::scalar::rational;
    let mut c = Vec::with_capacity(order + 1);
    let mut fact = rational(1, 1);
    for n in 0..=order {
        if n > 0 {
            fact = fact / rational(n as i64, 1);
        }
        let e = if n % 2 == 0 { fact.clone() } else { -fact.clone() };
        // (1 − x/2)/(1 + x/2) = 1 + 2 Σ_{n≥1} (−1/2)ⁿ xⁿ
        let half_pow = rational(1, 1i64 << n.min(62));
        let p = if n == 0 {
            rational(1, 1)
        } else if n % 2 == 0 {
            half_pow * rational(2, 1)
        } else {
            -half_pow * rational(2, 1)
        };
        c.push(e - p);
    }
    PowerSeries::new(rational(0, 1), c)
}

/// The period-4 orbit check used by the acceptance suite.
pub fn quartic_is_period_four(x: f64, tol: f64) -> bool {
    let mut p = Projective::Finite(x);
    for _ in 0..4 {
        p = quartic_step(p);
    }
    matches!(p, Projective::Finite(y) if (y - x).abs() <= tol * x.abs().max(1.0))
}
