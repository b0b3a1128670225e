//! Real branches of the logistic potential beyond the disk of the series.
//!
//! `U±(x) = s(s − 4x) U(x±)` with `x± = ½ ± ½√(1 − 4x/s)` continues `U`
//! along the two preimages. The minus path reproduces the primary potential
//! and the plus path produces the switchback branches for `s > 2`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad;
use crate::scalar::Scalar;

use super::{logistic_potential_series, s4_potential, s4_velocity};

/// A real function of `x` that may fail.
pub type EvalRule = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// Which preimage `x±` a continuation step uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BranchSign {
    Minus,
    Plus,
}

impl BranchSign {
    pub fn symbol(self) -> char {
        match self {
            BranchSign::Minus => '-',
            BranchSign::Plus => '+',
        }
    }
}

/// Sign of the velocity on a branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    Left,
    Right,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Left => -1.0,
            Direction::Right => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Left => "left",
            Direction::Right => "right",
        }
    }
}

/// `x±(x) = ½ ± ½√(1 − 4x/s)`.
pub fn preimage(s: f64, x: f64, sign: BranchSign) -> Result<f64> {
    let mut disc = 1.0 - 4.0 * x / s;
    if disc < 0.0 {
        if disc > -1e-13 {
            disc = 0.0;
        } else {
            return Err(Error::ComplexBranch { x, s });
        }
    }
    let r = 0.5 * disc.sqrt();
    Ok(match sign {
        BranchSign::Minus => 0.5 - r,
        BranchSign::Plus => 0.5 + r,
    })
}

/// One continuation step `U±(x) = s(s − 4x) U_prev(x±)`.
pub fn switchback_continue(prev: EvalRule, s: f64, sign: BranchSign) -> EvalRule {
    Arc::new(move |x| {
        let y = preimage(s, x, sign)?;
        Ok((s * (s - 4.0 * x)).max(0.0) * prev(y)?)
    })
}

/// The momentum analogue: `p±(x) = f′(x±) p_prev(x±)`, where
/// `f′(x±) = ∓√(s(s − 4x))`.
pub fn julia_continue(prev: EvalRule, s: f64, sign: BranchSign) -> EvalRule {
    Arc::new(move |x| {
        let y = preimage(s, x, sign)?;
        let root = (s * (s - 4.0 * x)).max(0.0).sqrt();
        let f1 = match sign {
            BranchSign::Minus => root,
            BranchSign::Plus => -root,
        };
        Ok(f1 * prev(y)?)
    })
}

/// Exact `x+` when `1 − 4x/s` is the square of a rational.
pub fn exact_plus_preimage(s: &BigRational, x: &BigRational) -> Option<BigRational> {
    let disc = BigRational::one() - BigRational::from_integer(BigInt::from(4)) * x / s;
    let root = rational_sqrt(&disc)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    Some(&half + &half * root)
}

/// Exact Julia factor `f′(x+) = −√(s(s − 4x))` when the root is rational.
pub fn exact_julia_plus_factor(s: &BigRational, x: &BigRational) -> Option<BigRational> {
    let arg = s * (s - BigRational::from_integer(BigInt::from(4)) * x);
    rational_sqrt(&arg).map(|r| -r)
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

/// Radius of convergence of the series about 0.
pub fn logistic_radius(s: f64) -> f64 {
    if s <= 2.0 / 3.0 {
        0.5
    } else if s <= 2.0 {
        (1.0 - 1.0 / s).abs()
    } else {
        s / 4.0
    }
}

/// Series about 0 plus descent along the minus preimage (or forward
/// iteration when `s < 1`) until the argument lies well inside the disk.
pub struct PrimaryPotential {
    s: f64,
    ln_s: f64,
    a: Vec<f64>,
    disk: f64,
}

const DEFAULT_ORDER: usize = 80;
const MAX_DESCENTS: usize = 20_000;

impl PrimaryPotential {
    pub fn new(s: &BigRational) -> Result<Self> {
        Self::with_order(s, DEFAULT_ORDER)
    }

    pub fn with_order(s: &BigRational, order: usize) -> Result<Self> {
        let series = logistic_potential_series(s, order)?;
        let sf = s.to_f64();
        Ok(PrimaryPotential {
            s: sf,
            ln_s: sf.ln(),
            a: (0..=series.order()).map(|n| series.coefficient_f64(n)).collect(),
            disk: 0.5 * logistic_radius(sf),
        })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    fn bracket(&self, y: f64) -> f64 {
        self.a.iter().rev().fold(0.0, |acc, c| acc * y + c)
    }

    /// Walks `y` into the disk, returning the landing point and the
    /// accumulated Julia factor `∏ f′` (so `p(y₀) = factor · p(y)`).
    fn descend(&self, y0: f64) -> Result<(f64, f64)> {
        let s = self.s;
        let mut y = y0;
        let mut factor = 1.0;
        for _ in 0..MAX_DESCENTS {
            if y.abs() <= self.disk {
                return Ok((y, factor));
            }
            if s > 1.0 {
                let root = (s * (s - 4.0 * y)).max(0.0).sqrt();
                y = preimage(s, y, BranchSign::Minus)?;
                factor *= root;
            } else {
                let d = s * (1.0 - 2.0 * y);
                if d == 0.0 {
                    return Err(Error::NotAnalytic { point: y });
                }
                factor /= d;
                y = s * y * (1.0 - y);
            }
        }
        Err(Error::NoContraction { descents: MAX_DESCENTS, last: y })
    }

    /// `U(y)`.
    pub fn u(&self, y: f64) -> Result<f64> {
        let (z, factor) = self.descend(y)?;
        Ok(factor * factor * z * z * self.bracket(z))
    }

    /// Momentum `p(y) = 2 ln s · y √(1 + Σ aₙ yⁿ)`, continued.
    pub fn p(&self, y: f64) -> Result<f64> {
        let (z, factor) = self.descend(y)?;
        let b = self.bracket(z);
        if b < 0.0 {
            return Err(Error::ComplexBranch { x: y, s: self.s });
        }
        Ok(factor * 2.0 * self.ln_s * z * b.sqrt())
    }
}

/// One branch `V_P` of a switchback sequence.
#[derive(Clone)]
pub struct BranchPotential {
    pub p: usize,
    pub signs: Vec<BranchSign>,
    pub lo: f64,
    pub hi: f64,
    /// Where the particle enters the branch.
    pub start: f64,
    /// Where it leaves (a turning point, or a fixed point approached forever).
    pub end: f64,
    pub turning_points: Vec<f64>,
    pub direction: Direction,
    pub ln_s_sq: f64,
    u: EvalRule,
    momentum: EvalRule,
}

impl std::fmt::Debug for BranchPotential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BranchPotential")
            .field("p", &self.p)
            .field("signs", &self.sign_path())
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("direction", &self.direction)
            .finish()
    }
}

impl BranchPotential {
    /// Assembles a branch from raw rules; `momentum` is `p = 2v`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_rules(
        p: usize,
        signs: Vec<BranchSign>,
        (lo, hi): (f64, f64),
        (start, end): (f64, f64),
        turning_points: Vec<f64>,
        direction: Direction,
        ln_s_sq: f64,
        u: EvalRule,
        momentum: EvalRule,
    ) -> Self {
        BranchPotential { p, signs, lo, hi, start, end, turning_points, direction, ln_s_sq, u, momentum }
    }

    pub fn sign_path(&self) -> String {
        self.signs.iter().map(|s| s.symbol()).collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        let slack = 1e-12 * (self.hi - self.lo).abs().max(1e-300);
        x >= self.lo - slack && x <= self.hi + slack
    }

    fn check(&self, x: f64) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::OutOfInterval { x, lo: self.lo, hi: self.hi });
        }
        Ok(x.clamp(self.lo, self.hi))
    }

    fn at_turning_point(&self, x: f64) -> bool {
        self.turning_points.iter().any(|&t| t == x)
    }

    /// `U_P(x)`, zero exactly at turning points.
    pub fn u(&self, x: f64) -> Result<f64> {
        let x = self.check(x)?;
        if self.at_turning_point(x) {
            return Ok(0.0);
        }
        (self.u)(x)
    }

    /// `V_P(x) = −ln²s · U_P(x)`.
    pub fn potential(&self, x: f64) -> Result<f64> {
        // + 0.0 turns −0 into 0
        Ok(-self.ln_s_sq * self.u(x)? + 0.0)
    }

    /// `p_P(x) = 2 v_P(x)`.
    pub fn momentum(&self, x: f64) -> Result<f64> {
        let x = self.check(x)?;
        if self.at_turning_point(x) {
            return Ok(0.0);
        }
        (self.momentum)(x)
    }

    pub fn velocity(&self, x: f64) -> Result<f64> {
        Ok(0.5 * self.momentum(x)?)
    }

    /// Unchecked `v_P` for use slightly outside the interval by solvers.
    pub(crate) fn raw_velocity(&self, x: f64) -> Result<f64> {
        Ok(0.5 * (self.momentum)(x)?)
    }

    /// `v_P(x)² + V_P(x)`.
    pub fn energy(&self, x: f64) -> Result<f64> {
        let v = self.velocity(x)?;
        Ok(v * v + self.potential(x)?)
    }

    /// Time to travel `from → to` on this branch, `∫ dx/|v|`.
    ///
    /// The cosine substitution over `[lo, hi]` absorbs the square-root
    /// zeros at turning points.
    pub fn transit_time(&self, from: f64, to: f64) -> Result<f64> {
        let (a, b) = (from.min(to), from.max(to));
        let (lo, hi) = (self.lo, self.hi);
        let w = hi - lo;
        let theta = |x: f64| (1.0 - 2.0 * (x.clamp(lo, hi) - lo) / w).clamp(-1.0, 1.0).acos();
        let g = |th: f64| {
            let x = lo + 0.5 * w * (1.0 - th.cos());
            match self.raw_velocity(x) {
                Ok(v) if v != 0.0 => 0.5 * w * th.sin() / v.abs(),
                _ => 0.0,
            }
        };
        quad::integrate(&g, theta(a), theta(b), 1e-12)
    }
}

/// Closed-form `s = 4` branch `V_P` on `[0, 1]`.
pub fn s4_branch(p: usize) -> BranchPotential {
    let mut signs = vec![BranchSign::Minus];
    signs.extend(std::iter::repeat(BranchSign::Plus).take(p));
    let l = 4f64.ln();
    let direction = if p % 2 == 0 { Direction::Right } else { Direction::Left };
    let (start, end) = if p % 2 == 0 { (0.0, 1.0) } else { (1.0, 0.0) };
    let turning = if p == 0 { vec![1.0] } else { vec![0.0, 1.0] };
    BranchPotential::from_rules(
        p,
        signs,
        (0.0, 1.0),
        (start, end),
        turning,
        direction,
        l * l,
        Arc::new(move |x| Ok(s4_potential(p, x) / -(l * l))),
        Arc::new(move |x| Ok(2.0 * s4_velocity(p, x))),
    )
}

/// `Δt₀(x) = log₂((π/2)/arcsin√x)`, the time from `x` to the first turning
/// point at 1 when `s = 4`.
pub fn s4_transit_time(x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::OutOfDomain { what: format!("transit time needs 0 < x < 1, got {x}") });
    }
    Ok(((PI / 2.0) / x.sqrt().asin()).ln() / std::f64::consts::LN_2)
}

/// Branches `P = 0, 1, …` with the covering offsets at each branch start.
#[derive(Debug, Clone)]
pub struct SwitchbackLadder {
    pub s: f64,
    pub branches: Vec<BranchPotential>,
    pub offsets: Vec<f64>,
    /// Set when construction stopped before the requested depth.
    pub halted: Option<Error>,
}

impl SwitchbackLadder {
    fn from_branches(s: f64, branches: Vec<BranchPotential>, halted: Option<Error>) -> Self {
        let mut offsets = Vec::with_capacity(branches.len());
        let mut x_total = 0.0;
        for b in &branches {
            offsets.push(x_total);
            x_total += (b.end - b.start).abs();
        }
        SwitchbackLadder { s, branches, offsets, halted }
    }

    /// A ladder holding one branch.
    pub fn single(s: f64, branch: BranchPotential) -> Self {
        Self::from_branches(s, vec![branch], None)
    }

    /// Covering coordinate of `x` on branch `p`.
    pub fn covering_coordinate(&self, p: usize, x: f64) -> f64 {
        self.offsets[p] + (x - self.branches[p].start).abs()
    }

    /// Total covering length of all branches.
    pub fn length(&self) -> f64 {
        let last = self.branches.last().expect("ladder is never empty");
        self.offsets[self.branches.len() - 1] + (last.end - last.start).abs()
    }

    /// Branch and position for covering coordinate `xc`.
    pub fn locate(&self, xc: f64) -> Option<(usize, f64)> {
        for (i, b) in self.branches.iter().enumerate() {
            let width = (b.end - b.start).abs();
            let local = xc - self.offsets[i];
            if local >= 0.0 && local <= width {
                let x = b.start + b.direction.sign() * local;
                return Some((i, x.clamp(b.lo, b.hi)));
            }
        }
        None
    }
}

/// Closed-form `s = 4` ladder with `branches` members.
pub fn s4_ladder(branches: usize) -> SwitchbackLadder {
    SwitchbackLadder::from_branches(4.0, (0..branches.max(1)).map(s4_branch).collect(), None)
}

fn logistic_map(s: f64, x: f64) -> f64 {
    s * x * (1.0 - x)
}

/// Deepest chain of continuation steps a branch may carry.
pub const MAX_NESTING: usize = 512;

/// Series-built ladder for rational `s`.
///
/// For `s ≤ 2` there is a single branch. For `s > 2` the branches are
/// generated in time order: one unit of time maps the motion onto itself,
/// so each branch, cut at the critical point ½ in the order it is
/// traversed, yields the next branches through the matching preimage.
/// While every branch after the first stays inside `[½, 1]` this is the
/// plain `x+` recursion.
pub fn logistic_ladder(s: &BigRational, branches: usize) -> Result<SwitchbackLadder> {
    let primary = Arc::new(PrimaryPotential::new(s)?);
    let sf = primary.s();
    let ln_s_sq = sf.ln() * sf.ln();
    let base_u: EvalRule = {
        let pp = primary.clone();
        Arc::new(move |x| pp.u(x))
    };
    let base_p: EvalRule = {
        let pp = primary.clone();
        Arc::new(move |x| pp.p(x))
    };

    if sf <= 2.0 {
        let (lo, hi, dir) = if sf > 1.0 { (0.0, 1.0 - 1.0 / sf, Direction::Right) } else { (0.0, 1.0, Direction::Left) };
        let (start, end) = if sf > 1.0 { (lo, hi) } else { (hi, lo) };
        let b = BranchPotential::from_rules(0, vec![BranchSign::Minus], (lo, hi), (start, end), vec![], dir, ln_s_sq, base_u, base_p);
        return Ok(SwitchbackLadder::from_branches(sf, vec![b], None));
    }

    let hi0 = sf / 4.0;
    let mut out = vec![BranchPotential::from_rules(
        0,
        vec![BranchSign::Minus],
        (0.0, hi0),
        (0.0, hi0),
        vec![hi0],
        Direction::Right,
        ln_s_sq,
        base_u,
        base_p,
    )];
    let wanted = branches.max(1);
    let mut halted = None;
    let mut parent = 0;
    'grow: while out.len() < wanted {
        let par = out[parent].clone();
        // pieces of the parent in traversal order; the lower half of
        // branch 0 maps onto branch 0 itself
        let mut pieces = Vec::with_capacity(2);
        let straddles = par.lo < 0.5 && par.hi > 0.5;
        if parent == 0 {
            pieces.push((0.5, par.end));
        } else if straddles {
            pieces.push((par.start, 0.5));
            pieces.push((0.5, par.end));
        } else {
            pieces.push((par.start, par.end));
        }
        for (a, b) in pieces {
            if out.len() >= wanted {
                break 'grow;
            }
            if (b - a).abs() < 1e-15 {
                continue;
            }
            if par.signs.len() >= MAX_NESTING {
                halted = Some(Error::UnsupportedRegime { s: sf, depth: out.len() - 1 });
                break 'grow;
            }
            let sign = if a.max(b) > 0.5 { BranchSign::Plus } else { BranchSign::Minus };
            let (start, end) = (logistic_map(sf, a), logistic_map(sf, b));
            let direction = if end > start { Direction::Right } else { Direction::Left };
            let mut signs = par.signs.clone();
            signs.push(sign);
            let u = switchback_continue(par.u.clone(), sf, sign);
            let mom = julia_continue(par.momentum.clone(), sf, sign);
            out.push(BranchPotential::from_rules(
                out.len(),
                signs,
                (start.min(end), start.max(end)),
                (start, end),
                vec![start, end],
                direction,
                ln_s_sq,
                u,
                mom,
            ));
        }
        parent += 1;
    }
    Ok(SwitchbackLadder::from_branches(sf, out, halted))
}

/// `(x, p)` polylines, one per momentum branch.
#[derive(Debug, Clone, Serialize)]
pub struct PhaseCurve {
    pub s: f64,
    pub branches: Vec<Vec<(f64, f64)>>,
}

/// Momentum branches `p₀, …, p_{n−1}` sampled on `grid` (restricted to each
/// branch interval, with both endpoints included).
pub fn momentum_branches(s: &BigRational, n: usize, grid: &[f64]) -> Result<PhaseCurve> {
    let sf = s.to_f64();
    let four = BigRational::from_integer(BigInt::from(4));
    if !(sf > 2.0 && sf <= 4.0) {
        return Err(Error::OutOfDomain { what: format!("momentum branches need 2 < s ≤ 4, got {s}") });
    }
    let ladder = if *s == four { s4_ladder(n) } else { logistic_ladder(s, n)? };
    if let Some(e) = ladder.halted {
        return Err(e);
    }
    let mut branches = Vec::with_capacity(n);
    for b in &ladder.branches {
        let mut xs: Vec<f64> = grid.iter().copied().filter(|&x| x > b.lo && x < b.hi).collect();
        xs.insert(0, b.lo);
        xs.push(b.hi);
        let mut line = Vec::with_capacity(xs.len());
        for x in xs {
            line.push((x, b.momentum(x)?));
        }
        branches.push(line);
    }
    Ok(PhaseCurve { s: sf, branches })
}

/// Minimum of `V_P` on its interval, sampled on `samples` points.
pub fn branch_depth(b: &BranchPotential, samples: usize) -> Result<f64> {
    let mut best = 0.0f64;
    for i in 0..=samples {
        let x = b.lo + (b.hi - b.lo) * i as f64 / samples as f64;
        best = best.min(b.potential(x)?);
    }
    Ok(best)
}

/// Zero function, useful as a trivial continuation seed.
pub fn zero_rule() -> EvalRule {
    Arc::new(|_| Ok(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    #[test]
    fn transit_closed_form() {
        assert!((s4_transit_time(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!(s4_transit_time(1.0 - 1e-12).unwrap() < 1e-5);
        assert!(s4_transit_time(0.0).is_err());
    }

    #[test]
    fn zero_stays_zero() {
        let r = switchback_continue(zero_rule(), 2.5, BranchSign::Minus);
        assert_eq!(r(0.3).unwrap(), 0.0);
    }

    #[test]
    fn complex_beyond_quarter_s() {
        let r = switchback_continue(zero_rule(), 3.0, BranchSign::Plus);
        assert!(matches!(r(0.9), Err(Error::ComplexBranch { .. })));
    }

    #[test]
    fn exact_s3_factor() {
        let s = rational(3, 1);
        let x = rational(2, 3);
        assert_eq!(exact_plus_preimage(&s, &x).unwrap(), x);
        assert_eq!(exact_julia_plus_factor(&s, &x).unwrap(), -BigRational::one());
        assert!(exact_julia_plus_factor(&s, &rational(1, 2)).is_none());
    }

    #[test]
    fn primary_matches_s2_closed_form() {
        let pp = PrimaryPotential::new(&rational(2, 1)).unwrap();
        for &x in &[0.05f64, 0.2, 0.35, 0.45] {
            let g: f64 = (1.0 - 2.0 * x) * (1.0 - 2.0 * x).ln() / 2.0;
            let want = g * g;
            assert!((pp.u(x).unwrap() - want).abs() < 1e-12, "{x}");
        }
    }
}
