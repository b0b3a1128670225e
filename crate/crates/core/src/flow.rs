//! Zero-energy motion `ẋ = v_P(x)` across a ladder of branches.
//!
//! Away from turning points the position is stepped directly with an
//! embedded Dormand–Prince 5(4) pair. Inside a small window around a
//! turning point `x_T`, where `v ~ √|x_T − x|`, the integrator steps
//! `u = √|x_T − x|` instead, whose rate `|v|/(2u)` stays smooth. Arrival at
//! `u = 0` is the event that moves the particle onto the next branch.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logistic::{BranchPotential, BranchSign, Direction, SwitchbackLadder};
use crate::maps::ClosedFormModel;

/// One row of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub v: f64,
    pub p: usize,
    pub e_residual: f64,
}

/// A turning point crossed at `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Event {
    pub t: f64,
    pub x: f64,
    pub p_before: usize,
    pub p_after: usize,
}

/// How an integration ended.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Outcome {
    /// Reached `t_max`.
    Completed,
    /// Settled onto a fixed point approached in infinite time; not an error.
    StallAtFixedPoint { t: f64, x: f64 },
    /// A turning point was reached on the last branch of the ladder.
    LadderExhausted { t: f64, p: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub events: Vec<Event>,
    pub outcome: Outcome,
}

impl Trajectory {
    /// Position at a sample time, if `t` was one.
    pub fn sample_at(&self, t: f64) -> Option<&Sample> {
        self.samples.iter().find(|s| s.t == t)
    }

    pub fn max_energy_residual(&self) -> f64 {
        self.samples.iter().map(|s| s.e_residual.abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct FlowOptions {
    /// Local error tolerance of the Runge–Kutta pair.
    pub tol: f64,
    /// Half-width of the substitution window around turning points.
    pub window: f64,
    /// Times the integrator must land on exactly (kept sorted).
    pub sample_times: Vec<f64>,
    /// `|v|` below which a step counts as stalled.
    pub stall_speed: f64,
    pub max_steps: usize,
}

impl FlowOptions {
    pub fn new(tol: f64) -> Self {
        FlowOptions { tol, window: 1e-4, sample_times: Vec::new(), stall_speed: 1e-13, max_steps: 2_000_000 }
    }

    pub fn with_sample_times(mut self, mut times: Vec<f64>) -> Self {
        times.sort_by(f64::total_cmp);
        self.sample_times = times;
        self
    }

    pub fn with_window(mut self, window: f64) -> Self {
        self.window = window;
        self
    }
}

/// A one-branch ladder for a closed-form model, so the same integrator
/// drives models without switchbacks.
pub fn single_branch_ladder(model: &ClosedFormModel) -> SwitchbackLadder {
    let (lo, hi) = model.interval;
    let vel = model.velocity;
    let pot = model.potential;
    let mid = if lo.is_finite() && hi.is_finite() { 0.5 * (lo + hi) } else { 0.0 };
    let right = vel(mid).map(|v| v >= 0.0).unwrap_or(true);
    let (direction, start, end) = if right { (Direction::Right, lo, hi) } else { (Direction::Left, hi, lo) };
    let branch = BranchPotential::from_rules(
        0,
        vec![BranchSign::Minus],
        (lo, hi),
        (start, end),
        vec![],
        direction,
        1.0,
        Arc::new(move |x| Ok(-pot(x)?)),
        Arc::new(move |x| Ok(2.0 * vel(x)?)),
    );
    SwitchbackLadder::single(model.s, branch)
}

// Dormand–Prince 5(4) tableau; the system is autonomous so the nodes are unused.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// One autonomous step of `y′ = g(y)`; returns the fifth-order value and
/// the embedded error estimate.
fn dopri_step(g: &dyn Fn(f64) -> Result<f64>, y: f64, h: f64) -> Result<(f64, f64)> {
    let mut k = [0.0; 7];
    for i in 0..7 {
        let yi = y + h * (0..i).map(|j| A[i][j] * k[j]).sum::<f64>();
        k[i] = g(yi)?;
    }
    let y5 = y + h * (0..7).map(|i| B5[i] * k[i]).sum::<f64>();
    let y4 = y + h * (0..7).map(|i| B4[i] * k[i]).sum::<f64>();
    Ok((y5, (y5 - y4).abs()))
}

#[derive(Debug, Clone, Copy)]
enum Phase {
    /// `y = x`.
    Regular,
    /// `y = √|x_T − x|`, heading into the turning point `x_T`.
    Approach { x_t: f64 },
    /// `y = √|x − x_S|`, leaving the turning point `x_S`.
    Depart { x_s: f64 },
}

struct Integrator<'a> {
    ladder: &'a SwitchbackLadder,
    opts: &'a FlowOptions,
}

impl Integrator<'_> {
    fn window(&self, b: &BranchPotential) -> f64 {
        self.opts.window.min(0.25 * (b.hi - b.lo).abs())
    }

    fn ends_at_turning_point(b: &BranchPotential) -> bool {
        b.turning_points.contains(&b.end)
    }

    fn position(b: &BranchPotential, phase: Phase, y: f64) -> f64 {
        let sgn = b.direction.sign();
        match phase {
            Phase::Regular => y,
            Phase::Approach { x_t } => x_t - sgn * y * y,
            Phase::Depart { x_s } => x_s + sgn * y * y,
        }
    }

    fn rate(b: &BranchPotential, phase: Phase, y: f64) -> Result<f64> {
        match phase {
            Phase::Regular => b.raw_velocity(y),
            Phase::Approach { .. } | Phase::Depart { .. } => {
                let speed_at = |u: f64| -> Result<f64> {
                    let x = Self::position(b, phase, u);
                    Ok(b.raw_velocity(x)?.abs() / (2.0 * u))
                };
                // v(x_T ∓ u²) loses digits to cancellation once u² nears
                // rounding, so below U0 the smooth rate |v|/(2u) is taken from
                // the quadratic through U0, 2U0, 3U0
                const U0: f64 = 1e-3;
                let u = y.abs();
                let speed = if u >= U0 {
                    speed_at(u)?
                } else {
                    let g = [speed_at(U0)?, speed_at(2.0 * U0)?, speed_at(3.0 * U0)?];
                    let r = u / U0;
                    g[0] * (r - 2.0) * (r - 3.0) / 2.0 - g[1] * (r - 1.0) * (r - 3.0) + g[2] * (r - 1.0) * (r - 2.0) / 2.0
                };
                Ok(if matches!(phase, Phase::Approach { .. }) { -speed } else { speed })
            }
        }
    }

    fn sample(b: &BranchPotential, t: f64, x: f64) -> Sample {
        let x = x.clamp(b.lo, b.hi);
        let v = b.velocity(x).unwrap_or(f64::NAN);
        let e = b.potential(x).map(|pot| v * v + pot).unwrap_or(f64::NAN);
        Sample { t, x, v, p: b.p, e_residual: e }
    }

    fn run(&self, x0: f64, t_max: f64) -> Result<Trajectory> {
        let ladder = self.ladder;
        let tol = self.opts.tol;
        let mut p = 0;
        let mut b = &ladder.branches[0];
        if !(x0 > b.lo && x0 < b.hi) {
            return Err(Error::OutOfInterval { x: x0, lo: b.lo, hi: b.hi });
        }
        let mut t = 0.0;
        let mut phase = Phase::Regular;
        let mut y = x0;
        if Self::ends_at_turning_point(b) && (b.end - x0).abs() < self.window(b) {
            phase = Phase::Approach { x_t: b.end };
            y = (b.end - x0).abs().sqrt();
        }
        let mut h = 1e-3f64.min(t_max.max(1e-12));
        let mut samples = vec![Self::sample(b, 0.0, x0)];
        let mut events = Vec::new();
        let mut next_sample = self.opts.sample_times.iter().copied().filter(|&s| s > 0.0).peekable();
        let mut slow_steps = 0usize;

        for _ in 0..self.opts.max_steps {
            if t >= t_max {
                return Ok(Trajectory { samples, events, outcome: Outcome::Completed });
            }
            let mut target = t_max;
            if let Some(&ts) = next_sample.peek() {
                target = target.min(ts);
            }
            let clipped = t + h >= target;
            let step = if clipped { target - t } else { h };
            let g = |yy: f64| Self::rate(b, phase, yy);
            let trial = dopri_step(&g, y, step);
            let (y_new, err) = match trial {
                Ok(r) => r,
                Err(_) => {
                    h = 0.5 * step;
                    if h < 1e-15 {
                        return Err(Error::NoContraction { descents: 0, last: Self::position(b, phase, y) });
                    }
                    continue;
                }
            };
            // absolute control, tightened to track the displacement itself so
            // exponential approaches to a fixed point stay resolved
            let scale = (tol * (1.0 + y.abs().max(y_new.abs()))).min((1e-3 * (y_new - y).abs()).max(1e-300));
            let overshoot = match phase {
                Phase::Regular => {
                    Self::ends_at_turning_point(b) && (y_new - b.end) * b.direction.sign() > 0.0
                }
                Phase::Approach { .. } => y_new < 0.0,
                Phase::Depart { .. } => false,
            };
            if err > scale {
                h = step * (0.9 * (scale / err).powf(0.2)).max(0.1);
                continue;
            }
            if overshoot {
                if let Phase::Approach { x_t } = phase {
                    // land on u = 0: the rate is nearly constant there, so
                    // a few secant steps in the step length suffice
                    let hit = Self::time_to_zero(&g, y, step)?;
                    t += hit;
                    let p_after = p + 1;
                    if p_after >= ladder.branches.len() {
                        samples.push(Self::sample(b, t, x_t));
                        return Ok(Trajectory { samples, events, outcome: Outcome::LadderExhausted { t, p } });
                    }
                    events.push(Event { t, x: x_t, p_before: p, p_after });
                    p = p_after;
                    b = &ladder.branches[p];
                    samples.push(Self::sample(b, t, x_t));
                    phase = Phase::Depart { x_s: x_t };
                    y = 0.0;
                    h = h.min(1e-3);
                    if next_sample.peek().is_some_and(|&ts| ts <= t) {
                        next_sample.next();
                    }
                    continue;
                }
                h = 0.5 * step;
                continue;
            }
            t = if clipped { target } else { t + step };
            y = y_new;
            let x = Self::position(b, phase, y);
            if clipped && next_sample.peek().is_some_and(|&ts| ts == t) {
                next_sample.next();
            }
            samples.push(Self::sample(b, t, x));
            let v = samples.last().unwrap().v;
            if v.abs() < self.opts.stall_speed {
                slow_steps += 1;
                if slow_steps >= 2 {
                    return Ok(Trajectory { samples, events, outcome: Outcome::StallAtFixedPoint { t, x } });
                }
            } else {
                slow_steps = 0;
            }
            h = step * (0.9 * (scale / err.max(1e-300)).powf(0.2)).clamp(0.2, 5.0);
            if clipped {
                h = h.max(1e-6);
            }
            // phase changes
            let w = self.window(b);
            match phase {
                Phase::Regular => {
                    if Self::ends_at_turning_point(b) && (b.end - x).abs() < w {
                        phase = Phase::Approach { x_t: b.end };
                        y = (b.end - x).abs().sqrt();
                        h = h.min(0.1 * y.max(1e-8));
                    }
                }
                Phase::Depart { .. } => {
                    if y * y >= w {
                        phase = Phase::Regular;
                        y = x;
                        if Self::ends_at_turning_point(b) && (b.end - x).abs() < w {
                            phase = Phase::Approach { x_t: b.end };
                            y = (b.end - x).abs().sqrt();
                        }
                    }
                }
                Phase::Approach { .. } => {}
            }
        }
        Err(Error::NoContraction { descents: self.opts.max_steps, last: Self::position(b, phase, y) })
    }

    /// Step length at which `u` reaches 0, given that a step of `h` passes it.
    fn time_to_zero(g: &dyn Fn(f64) -> Result<f64>, u: f64, h: f64) -> Result<f64> {
        let f = |s: f64| -> Result<f64> { Ok(dopri_step(g, u, s)?.0) };
        let (mut a, mut fa) = (0.0, u);
        let (mut c, mut fc) = (h, f(h)?);
        for _ in 0..100 {
            let m = if (fa - fc).abs() > 0.0 { a - fa * (c - a) / (fc - fa) } else { 0.5 * (a + c) };
            let m = if m <= a || m >= c { 0.5 * (a + c) } else { m };
            let fm = f(m)?;
            if fm.abs() < 1e-15 || (c - a) < 1e-15 {
                return Ok(m);
            }
            if fm > 0.0 {
                a = m;
                fa = fm;
            } else {
                c = m;
                fc = fm;
            }
        }
        Ok(0.5 * (a + c))
    }
}

/// Integrate `ẋ = v_P(x)` from `x0` on branch 0 up to `t_max`, switching
/// branches at each turning point.
pub fn integrate_zero_energy(ladder: &SwitchbackLadder, x0: f64, t_max: f64, tol: f64) -> Result<Trajectory> {
    integrate_with(ladder, x0, t_max, &FlowOptions::new(tol))
}

pub fn integrate_with(ladder: &SwitchbackLadder, x0: f64, t_max: f64, opts: &FlowOptions) -> Result<Trajectory> {
    if ladder.branches.is_empty() {
        return Err(Error::OutOfDomain { what: "empty ladder".into() });
    }
    if !(opts.tol > 0.0) {
        return Err(Error::OutOfDomain { what: format!("tolerance must be positive, got {}", opts.tol) });
    }
    if let Some(e) = &ladder.halted {
        if ladder.branches.len() <= 1 {
            return Err(e.clone());
        }
    }
    Integrator { ladder, opts }.run(x0, t_max)
}

/// `E(t) = v(t)² + V(x(t))`, using the branch each sample was on, or a
/// fixed branch `wrong_branch` for every sample.
pub fn energy_audit(ladder: &SwitchbackLadder, traj: &Trajectory, wrong_branch: Option<usize>) -> Result<Vec<(f64, f64)>> {
    traj.samples
        .iter()
        .map(|s| {
            let p = wrong_branch.unwrap_or(s.p);
            let b = ladder.branches.get(p).ok_or(Error::OutOfDomain { what: format!("no branch {p} in ladder") })?;
            let pot = b.potential(s.x.clamp(b.lo, b.hi))?;
            Ok((s.t, s.v * s.v + pot))
        })
        .collect()
}

/// The ladder unrolled onto the covering coordinate `X ∈ [0, X_max]`.
pub fn covering_potential(ladder: &SwitchbackLadder, x_max: f64, grid: usize) -> Result<Vec<(f64, f64)>> {
    if ladder.branches.is_empty() {
        return Err(Error::OutOfDomain { what: "empty ladder".into() });
    }
    let n = grid.max(2);
    let top = x_max.min(ladder.length());
    let mut out = Vec::with_capacity(n + ladder.branches.len());
    let mut xs: Vec<f64> = (0..n).map(|i| top * i as f64 / (n - 1) as f64).collect();
    // joins are always sampled
    xs.extend(ladder.offsets.iter().copied().filter(|&o| o <= top));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    for xc in xs {
        if let Some((p, x)) = ladder.locate(xc) {
            out.push((xc, ladder.branches[p].potential(x)?));
        }
    }
    Ok(out)
}
