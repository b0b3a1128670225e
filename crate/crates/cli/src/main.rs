//! `schroeder`: the library's engines as subcommands.
//!
//! Each subcommand writes CSV to `--out` or stdout. File output also gets a
//! JSON sidecar with the same stem.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::{One, Zero};
use schroeder::flow::{covering_potential, integrate_with, single_branch_ladder, FlowOptions, Outcome};
use schroeder::fnser::{
    estimate_radius, refine_by_functional_equation, solve_poincare, solve_potential, solve_potential_unit,
    solve_schroeder, SeriesKind, SeriesRule,
};
use schroeder::io::{self, LadderMeta, TOOL_VERSION};
use schroeder::logistic::{
    comparison_series, logistic_ladder, logistic_potential_series, momentum_branches, pv_integral,
    s1_coefficients, s1_growth_diagnostic, s1_potential_value, s4_ladder, SwitchbackLadder,
};
use schroeder::maps::{skellam_fixed_point, ClosedFormModel};
use schroeder::scalar::parse_rational;
use schroeder::skellam::{skellam_p_polynomials, skellam_potential_pair};
use schroeder::{Error, MapModel, PowerSeries, Scalar};
use serde_json::{json, Value};

const DEFAULT_POINTS: usize = 2001;

#[derive(Parser)]
#[command(name = "schroeder", version, about = "Continuous-time flows for one-dimensional maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact or float series about a fixed point, chosen by --kind.
    Series(SeriesArgs),
    /// Potential V(x) sampled on a grid (default 2001 points on the primary interval).
    Potential(PotentialArgs),
    /// Fractional iterates f_t(x0) over a grid of times (default 2001 points on [0, 3]).
    Interpolate(InterpolateArgs),
    /// Zero-energy trajectory across switchback branches.
    Flow(FlowArgs),
    /// Momentum branches p(x) of the logistic phase curve (default 2001 points).
    Phase(PhaseArgs),
    /// Radius of convergence estimate for a potential series.
    Radius(RadiusArgs),
    /// Integer polynomials pₙ(k) of the Skellam inverse.
    SkellamPoly(SkellamPolyArgs),
    /// Growth of the s = 1 coefficients against the factorial comparison.
    S1Diagnostic(S1Args),
    /// Glued potential along the covering coordinate (default 2001 points).
    Covering(CoveringArgs),
}

#[derive(Args, Clone)]
struct MapArgs {
    /// Model name; logistic2 and logistic4 select the closed-form logistic maps.
    #[arg(long)]
    map: String,
    /// Logistic parameter as "p/q" or a decimal.
    #[arg(long)]
    s: Option<String>,
    /// Skellam parameter as "p/q" or a decimal.
    #[arg(long)]
    k: Option<String>,
}

#[derive(Args)]
struct OutArgs {
    /// CSV destination; stdout when absent (no sidecar then).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Mode {
    Rational,
    Float,
}

impl Mode {
    fn as_str(self) -> &'static str {
        match self {
            Mode::Rational => "rational",
            Mode::Float => "float",
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Kind {
    Schroeder,
    Poincare,
    Potential,
}

#[derive(Args)]
struct SeriesArgs {
    #[command(flatten)]
    map: MapArgs,
    /// Highest power of x kept.
    #[arg(long, default_value_t = 12)]
    order: usize,
    #[arg(long, value_enum, default_value_t = Kind::Potential)]
    kind: Kind,
    /// Expansion point: a rational value or `xstar` (Skellam, float only).
    /// Defaults to 0 for logistic and skellam; required for bh.
    #[arg(long)]
    fixed_point: Option<String>,
    #[arg(long, value_enum, default_value_t = Mode::Rational)]
    mode: Mode,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct PotentialArgs {
    #[command(flatten)]
    map: MapArgs,
    #[arg(long, default_value_t = 40)]
    order: usize,
    /// "lo:hi:count".
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct InterpolateArgs {
    #[command(flatten)]
    map: MapArgs,
    #[arg(long, allow_hyphen_values = true)]
    x0: f64,
    /// Time grid "lo:hi:count".
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Series order for maps without a closed form.
    #[arg(long, default_value_t = 60)]
    order: usize,
    /// Fixed point for the series route (rational or `xstar`).
    #[arg(long)]
    fixed_point: Option<String>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct FlowArgs {
    #[command(flatten)]
    map: MapArgs,
    #[arg(long, allow_hyphen_values = true)]
    x0: f64,
    #[arg(long, default_value_t = 4.0)]
    t_max: f64,
    #[arg(long, default_value_t = 12)]
    branches: usize,
    #[arg(long, default_value_t = 1e-11)]
    tol: f64,
    /// Number of evenly spaced forced sample times on [0, t_max].
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    samples: usize,
    /// Turning-point events CSV; defaults to `<out stem>.events.csv`.
    #[arg(long)]
    events: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct PhaseArgs {
    #[command(flatten)]
    map: MapArgs,
    #[arg(long, default_value_t = 15)]
    branches: usize,
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct RadiusArgs {
    #[command(flatten)]
    map: MapArgs,
    #[arg(long, default_value_t = 400)]
    order: usize,
    /// Tail window; defaults to order / 8.
    #[arg(long)]
    window: Option<usize>,
    /// JSON destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SkellamPolyArgs {
    #[arg(long, default_value_t = 12)]
    n: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct S1Args {
    #[arg(long, default_value_t = 500)]
    order: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct CoveringArgs {
    #[command(flatten)]
    map: MapArgs,
    #[arg(long, default_value_t = 6)]
    branches: usize,
    /// "0:X_max:count"; X_max defaults to the ladder length.
    #[arg(long)]
    grid: Option<String>,
    /// Per-branch table (P,x,V,v,direction) on the physical interval.
    #[arg(long)]
    branch_table: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

enum Failure {
    Usage(String),
    Engine(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Run<T> {
    Err(Failure::Usage(msg.into()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Engine(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn dispatch(cmd: Command) -> Run<()> {
    match cmd {
        Command::Series(a) => series(a),
        Command::Potential(a) => potential(a),
        Command::Interpolate(a) => interpolate(a),
        Command::Flow(a) => flow(a),
        Command::Phase(a) => phase(a),
        Command::Radius(a) => radius(a),
        Command::SkellamPoly(a) => skellam_poly(a),
        Command::S1Diagnostic(a) => s1_diagnostic(a),
        Command::Covering(a) => covering(a),
    }
}

// ---------- argument plumbing ----------

fn parse_param(name: &str, text: &str) -> Run<BigRational> {
    parse_rational(text).map_or_else(|| usage(format!("--{name} {text:?} is not a rational or decimal")), Ok)
}

enum Model {
    Closed(ClosedFormModel),
    Logistic(BigRational),
    Skellam(BigRational),
}

impl Model {
    fn name(&self) -> String {
        match self {
            Model::Closed(m) => format!("{:?}", m.id).to_lowercase(),
            Model::Logistic(_) => "logistic".into(),
            Model::Skellam(_) => "skellam".into(),
        }
    }

    fn params(&self) -> Value {
        match self {
            Model::Closed(_) => json!({}),
            Model::Logistic(s) => json!({ "s": s.to_string() }),
            Model::Skellam(k) => json!({ "k": k.to_string() }),
        }
    }

    fn logistic_s(&self, cmd: &str) -> Run<&BigRational> {
        match self {
            Model::Logistic(s) => Ok(s),
            _ => usage(format!("{cmd} supports only --map logistic")),
        }
    }
}

fn model(a: &MapArgs) -> Run<Model> {
    let lower = a.map.to_ascii_lowercase();
    let need = |flag: &str, v: &Option<String>| -> Run<BigRational> {
        match v {
            Some(t) => parse_param(flag, t),
            None => usage(format!("--map {lower} needs --{flag}")),
        }
    };
    match lower.as_str() {
        "logistic" => Ok(Model::Logistic(need("s", &a.s)?)),
        "skellam" => Ok(Model::Skellam(need("k", &a.k)?)),
        name => match ClosedFormModel::by_name(name) {
            Some(m) => Ok(Model::Closed(m)),
            None => usage(format!("unknown map {:?} (bh, quartic, skellam, logistic, logistic2, logistic4)", a.map)),
        },
    }
}

fn grid_spec(text: Option<&str>, default: (f64, f64)) -> Run<Vec<f64>> {
    let (lo, hi, n) = match text {
        None => (default.0, default.1, DEFAULT_POINTS),
        Some(t) => {
            let parts: Vec<&str> = t.split(':').collect();
            if parts.len() != 3 {
                return usage(format!("grid {t:?} is not lo:hi:count"));
            }
            let num = |p: &str| p.trim().parse::<f64>().ok().filter(|v| v.is_finite());
            let (Some(lo), Some(hi)) = (num(parts[0]), num(parts[1])) else {
                return usage(format!("grid {t:?} has a non-numeric bound"));
            };
            let Ok(n) = parts[2].trim().parse::<usize>() else {
                return usage(format!("grid {t:?} has a bad count"));
            };
            (lo, hi, n)
        }
    };
    if n < 2 {
        return usage("grid count must be at least 2");
    }
    if hi <= lo {
        return usage(format!("grid needs lo < hi, got {lo}:{hi}"));
    }
    let last = (n - 1) as f64;
    Ok((0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / last }).collect())
}

fn open(path: &Path) -> Run<BufWriter<File>> {
    File::create(path).map(BufWriter::new).or_else(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

fn meta(m: &Model, order: Option<usize>, mode: &str, extra: Value) -> Value {
    let mut v = json!({
        "map": m.name(),
        "params": m.params(),
        "order": order,
        "mode": mode,
        "tool-version": TOOL_VERSION,
    });
    if let (Value::Object(base), Value::Object(more)) = (&mut v, extra) {
        base.extend(more);
    }
    v
}

/// Writes the CSV through `body` and, for file output, the sidecar.
fn emit(out: &OutArgs, sidecar: Value, body: impl FnOnce(&mut dyn Write) -> schroeder::Result<()>) -> Run<()> {
    match &out.out {
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)?;
            lock.flush().map_err(Error::from)?;
        }
        Some(path) => {
            let mut w = open(path)?;
            body(&mut w)?;
            w.flush().map_err(Error::from)?;
            write_json_file(&sidecar_path(path), &sidecar)?;
        }
    }
    Ok(())
}

fn write_json_file(path: &Path, v: &Value) -> Run<()> {
    let mut w = open(path)?;
    io::write_json(&mut w, v)?;
    w.flush().map_err(Error::from)?;
    Ok(())
}

enum Center {
    Exact(BigRational),
    SkellamStar,
}

fn center(m: &Model, text: Option<&str>) -> Run<Center> {
    match (text, m) {
        (Some("xstar"), Model::Skellam(_)) => Ok(Center::SkellamStar),
        (Some("xstar"), Model::Logistic(s)) => Ok(Center::Exact(BigRational::one() - s.recip())),
        (Some(t), _) => Ok(Center::Exact(parse_param("fixed-point", t)?)),
        (None, Model::Logistic(_) | Model::Skellam(_)) => Ok(Center::Exact(BigRational::zero())),
        (None, _) => usage("this map needs an explicit --fixed-point"),
    }
}

fn rational_map(m: &Model) -> Run<MapModel<BigRational>> {
    Ok(match m {
        Model::Logistic(s) => MapModel::logistic(s.clone()),
        Model::Skellam(k) => MapModel::skellam(k.clone()),
        Model::Closed(c) => match format!("{:?}", c.id).to_lowercase().as_str() {
            "bh" => MapModel::beverton_holt(),
            "quartic" => MapModel::quartic(),
            "logistic2" => MapModel::logistic(BigRational::from_integer(2.into())),
            "logistic4" => MapModel::logistic(BigRational::from_integer(4.into())),
            other => return usage(format!("no series model for {other}")),
        },
    })
}

fn float_map(m: &Model) -> Run<MapModel<f64>> {
    Ok(match rational_map(m)? {
        MapModel::Logistic { s } => MapModel::logistic(Scalar::to_f64(&s)),
        MapModel::Skellam { k } => MapModel::skellam(Scalar::to_f64(&k)),
        MapModel::Mobius { name: "bh", .. } => MapModel::beverton_holt(),
        MapModel::Mobius { .. } => MapModel::quartic(),
    })
}

fn center_f64(m: &Model, c: &Center) -> Run<f64> {
    match (c, m) {
        (Center::Exact(q), _) => Ok(Scalar::to_f64(q)),
        (Center::SkellamStar, Model::Skellam(k)) => Ok(skellam_fixed_point(Scalar::to_f64(k))?),
        _ => usage("xstar applies to skellam only"),
    }
}

// ---------- subcommands ----------

fn series(a: SeriesArgs) -> Run<()> {
    let m = model(&a.map)?;
    let c = center(&m, a.fixed_point.as_deref())?;
    let at_origin = matches!(&c, Center::Exact(q) if q.is_zero());
    let mode = a.mode.as_str();
    let center_text = match &c {
        Center::Exact(q) => q.to_string(),
        Center::SkellamStar => "xstar".to_string(),
    };
    let side = |form: &str| {
        meta(&m, Some(a.order), mode, json!({ "center": center_text, "kind": kind_name(a.kind), "form": form }))
    };

    // Logistic about 0: the dedicated bracket recursions.
    if let (Model::Logistic(s), Kind::Potential, true) = (&m, a.kind, at_origin) {
        if s.is_one() {
            if a.order < 4 {
                return usage("s = 1 needs --order ≥ 4");
            }
            let cs = s1_coefficients(a.order - 4);
            let form = "bracket c_n: V = -x^4 (1 + sum c_n x^n)";
            return emit(&a.out, side(form), |w| match a.mode {
                Mode::Rational => io::write_series_rational(w, 0, &cs),
                Mode::Float => io::write_series_float(w, 0, &cs.iter().map(Scalar::to_f64).collect::<Vec<_>>()),
            });
        }
        let n = a.order.saturating_sub(2);
        let ser = logistic_potential_series(s, n)?;
        let form = "bracket a_n: V = -ln^2(s) x^2 (1 + sum a_n x^n)";
        return emit(&a.out, side(form), |w| match a.mode {
            Mode::Rational => io::write_series_rational(w, 0, &(0..=n).map(|i| ser.coefficient(i)).collect::<Vec<_>>()),
            Mode::Float => io::write_series_float(w, 0, &(0..=n).map(|i| ser.coefficient_f64(i)).collect::<Vec<_>>()),
        });
    }

    match (a.mode, &c) {
        (Mode::Rational, Center::Exact(q)) => {
            let map = rational_map(&m)?;
            let (ser, form) = match a.kind {
                Kind::Schroeder => (solve_schroeder(&map, q, a.order)?, "psi by power of (x - center)"),
                Kind::Poincare => (solve_poincare(&map, q, a.order)?, "psi inverse by power of z"),
                Kind::Potential => exact_potential_shape(&map, q, a.order)?,
            };
            emit(&a.out, side(form), |w| io::write_series_rational(w, 0, ser.coeffs()))
        }
        (Mode::Rational, Center::SkellamStar) => usage("x* is irrational for skellam; use --mode float"),
        (Mode::Float, _) => {
            let map = float_map(&m)?;
            let x0 = center_f64(&m, &c)?;
            let ser = float_series(&map, x0, a.order, a.kind)?;
            let form = match a.kind {
                Kind::Schroeder => "psi by power of (x - center)",
                Kind::Poincare => "psi inverse by power of z",
                Kind::Potential => "V by power of (x - center)",
            };
            emit(&a.out, side(form), |w| io::write_series_float(w, 0, ser.coeffs()))
        }
    }
}

fn kind_name(k: Kind) -> &'static str {
    match k {
        Kind::Schroeder => "schroeder",
        Kind::Poincare => "poincare",
        Kind::Potential => "potential",
    }
}

/// ln² s is irrational, so away from unit multiplier the exact series is `V / ln² s`.
fn exact_potential_shape(
    map: &MapModel<BigRational>,
    q: &BigRational,
    order: usize,
) -> Run<(PowerSeries<BigRational>, &'static str)> {
    if map.multiplier(q)?.is_one() {
        Ok((solve_potential_unit(map, q, order)?, "V by power of (x - center)"))
    } else {
        Ok((solve_potential(map, q, order, &BigRational::one())?, "V / ln^2(s) by power of (x - center)"))
    }
}

fn float_series(map: &MapModel<f64>, x0: f64, order: usize, kind: Kind) -> Run<PowerSeries<f64>> {
    Ok(match kind {
        Kind::Schroeder => solve_schroeder(map, &x0, order)?,
        Kind::Poincare => solve_poincare(map, &x0, order)?,
        Kind::Potential => {
            let s = map.multiplier(&x0)?;
            if (s - 1.0).abs() < 1e-14 {
                solve_potential_unit(map, &x0, order)?
            } else {
                let l = s.abs().ln();
                solve_potential(map, &x0, order, &(l * l))?
            }
        }
    })
}

fn potential(a: PotentialArgs) -> Run<()> {
    let m = model(&a.map)?;
    let rows: Vec<(f64, f64)> = match &m {
        Model::Skellam(k) => {
            let pair = skellam_potential_pair(k, a.order)?;
            let grid = grid_spec(a.grid.as_deref(), (0.0, pair.x_star))?;
            grid.iter().map(|&x| Ok((x, pair.value(x)?))).collect::<schroeder::Result<_>>()?
        }
        Model::Logistic(s) if s.is_one() => {
            let c = s1_coefficients(a.order);
            let grid = grid_spec(a.grid.as_deref(), (0.0, 0.2))?;
            grid.iter().map(|&x| (x, s1_potential_value(x, &c).0)).collect()
        }
        Model::Logistic(s) => {
            let ladder = logistic_ladder(s, 1)?;
            let b = &ladder.branches[0];
            let grid = grid_spec(a.grid.as_deref(), (b.lo, b.hi))?;
            grid.iter().map(|&x| Ok((x, b.potential(x)?))).collect::<schroeder::Result<_>>()?
        }
        Model::Closed(c) => {
            let (lo, hi) = c.interval;
            let default = (lo.max(-3.0), hi.min(3.0));
            let grid = grid_spec(a.grid.as_deref(), default)?;
            grid.iter().map(|&x| Ok((x, (c.potential)(x)?))).collect::<schroeder::Result<_>>()?
        }
    };
    // no "-0" in the table
    let rows: Vec<(f64, f64)> = rows.into_iter().map(|(x, v)| (x, v + 0.0)).collect();
    let order = matches!(m, Model::Skellam(_) | Model::Logistic(_)).then_some(a.order);
    emit(&a.out, meta(&m, order, "float", json!({})), |w| io::write_xy(w, ["x", "V"], &rows))
}

fn interpolate(a: InterpolateArgs) -> Run<()> {
    let m = model(&a.map)?;
    let times = grid_spec(a.grid.as_deref(), (0.0, 3.0))?;
    let rows: Vec<(f64, f64)> = match &m {
        Model::Closed(c) => times.iter().map(|&t| Ok((t, c.trajectory(a.x0, t)?))).collect::<schroeder::Result<_>>()?,
        _ => {
            let c = center(&m, a.fixed_point.as_deref())?;
            let x_star = center_f64(&m, &c)?;
            let map = float_map(&m)?;
            let s = map.multiplier(&x_star)?;
            let psi = solve_schroeder(&map, &x_star, a.order)?;
            let inv = solve_poincare(&map, &x_star, a.order)?;
            let trust = |ser: &PowerSeries<f64>| {
                estimate_radius(ser, (a.order / 8).max(4)).map(|r| 0.5 * r.corrected_radius.min(r.limsup_radius)).unwrap_or(0.05)
            };
            let rule = |kind, series: PowerSeries<f64>| SeriesRule { kind, radius: trust(&series), series, multiplier: s, fixed_point: x_star };
            let (fwd, back) = (rule(SeriesKind::Psi, psi), rule(SeriesKind::PsiInverse, inv));
            let psi_f = |x: f64| refine_by_functional_equation(&map, &fwd, x, 200);
            let inv_f = |z: f64| {
                // Ψ⁻¹ series is in z about 0
                refine_by_functional_equation(&map, &back, z, 200)
            };
            times
                .iter()
                .map(|&t| {
                    let x = if t == 0.0 { a.x0 } else { schroeder::fnser::interpolate(s, &psi_f, &inv_f, a.x0, t)? };
                    Ok((t, x))
                })
                .collect::<schroeder::Result<_>>()?
        }
    };
    emit(&a.out, meta(&m, None, "float", json!({ "x0": a.x0 })), |w| io::write_xy(w, ["t", "x"], &rows))
}

fn ladder_for(m: &Model, branches: usize) -> Run<SwitchbackLadder> {
    match m {
        Model::Logistic(s) if *s == BigRational::from_integer(4.into()) => Ok(s4_ladder(branches)),
        Model::Logistic(s) => Ok(logistic_ladder(s, branches)?),
        Model::Closed(c) => Ok(single_branch_ladder(c)),
        Model::Skellam(_) => usage("flow and covering support logistic and the closed-form maps"),
    }
}

fn flow(a: FlowArgs) -> Run<()> {
    let m = model(&a.map)?;
    if !(a.t_max > 0.0) || !a.t_max.is_finite() {
        return usage("--t-max must be positive");
    }
    if a.samples < 2 {
        return usage("--samples must be at least 2");
    }
    let ladder = ladder_for(&m, a.branches)?;
    let times = grid_spec(Some(&format!("0:{}:{}", a.t_max, a.samples)), (0.0, a.t_max))?;
    let opts = FlowOptions::new(a.tol).with_sample_times(times);
    let traj = integrate_with(&ladder, a.x0, a.t_max, &opts)?;
    let outcome = match traj.outcome {
        Outcome::Completed => json!({ "kind": "Completed" }),
        Outcome::StallAtFixedPoint { t, x } => json!({ "kind": "StallAtFixedPoint", "t": t, "x": x }),
        Outcome::LadderExhausted { t, p } => json!({ "kind": "LadderExhausted", "t": t, "P": p }),
    };
    let side = meta(
        &m,
        None,
        "float",
        json!({ "x0": a.x0, "t_max": a.t_max, "tol": a.tol, "outcome": outcome, "ladder": LadderMeta::of(&ladder) }),
    );
    emit(&a.out, side, |w| io::write_trajectory(w, &traj))?;
    let events_path = a.events.or_else(|| a.out.out.as_ref().map(|p| p.with_extension("events.csv")));
    match events_path {
        Some(p) => {
            let mut w = open(&p)?;
            io::write_events(&mut w, &traj.events)?;
            w.flush().map_err(Error::from)?;
        }
        None => {
            eprintln!("{} turning-point events", traj.events.len());
        }
    }
    Ok(())
}

fn phase(a: PhaseArgs) -> Run<()> {
    let m = model(&a.map)?;
    let s = m.logistic_s("phase")?;
    let grid = grid_spec(a.grid.as_deref(), (0.0, 1.0))?;
    let curve = momentum_branches(s, a.branches, &grid)?;
    emit(&a.out, meta(&m, None, "float", json!({ "branches": a.branches })), |w| io::write_phase(w, &curve))
}

fn radius(a: RadiusArgs) -> Run<()> {
    let m = model(&a.map)?;
    let window = a.window.unwrap_or((a.order / 8).max(2));
    let est = match &m {
        Model::Logistic(s) => estimate_radius(&logistic_potential_series(s, a.order)?, window)?,
        Model::Skellam(k) => estimate_radius(&skellam_potential_pair(k, a.order)?.zero_shape, window)?,
        Model::Closed(_) => return usage("radius supports logistic and skellam"),
    };
    let report = meta(
        &m,
        Some(a.order),
        "rational",
        json!({
            "window": window,
            "limsup_radius": est.limsup_radius,
            "corrected_radius": est.corrected_radius,
            "still_growing": est.still_growing,
        }),
    );
    match &a.out {
        Some(p) => write_json_file(p, &report),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            io::write_json(&mut lock, &report)?;
            Ok(())
        }
    }
}

fn skellam_poly(a: SkellamPolyArgs) -> Run<()> {
    if a.n == 0 {
        return usage("--n must be at least 1");
    }
    let polys = skellam_p_polynomials(a.n);
    let side = json!({ "map": "skellam", "params": {}, "order": a.n, "mode": "rational", "tool-version": TOOL_VERSION });
    emit(&a.out, side, |w| io::write_p_table(w, &polys))
}

fn s1_diagnostic(a: S1Args) -> Run<()> {
    let report = s1_growth_diagnostic(a.order)?;
    let (series_at_1, terms) = comparison_series(1.0);
    let side = json!({
        "map": "logistic",
        "params": { "s": "1" },
        "order": a.order,
        "mode": "rational",
        "tool-version": TOOL_VERSION,
        "asymptotic": report.asymptotic,
        "L_estimate": report.l_estimate(),
        "slope_c": report.slope_c,
        "slope_f": report.slope_f,
        "slope_ratio": report.slope_ratio(),
        "apparent_radius_25": report.apparent_radius_25,
        "pv_integral_1": pv_integral(1.0)?,
        "comparison_at_1": series_at_1,
        "comparison_terms": terms,
    });
    let rows: Vec<Vec<String>> =
        report.rows.iter().map(|r| vec![r.n.to_string(), r.c_root.to_string(), r.f_root.to_string()]).collect();
    if a.out.out.is_none() {
        eprintln!("asymptotic={} L={:.4}", report.asymptotic, report.l_estimate());
    }
    emit(&a.out, side, |w| io::write_table(w, &["n", "c_root", "f_root"], &rows))
}

fn covering(a: CoveringArgs) -> Run<()> {
    let m = model(&a.map)?;
    let ladder = ladder_for(&m, a.branches)?;
    let (x_max, count) = match a.grid.as_deref() {
        None => (ladder.length(), DEFAULT_POINTS),
        Some(t) => {
            let g = grid_spec(Some(t), (0.0, 1.0))?;
            if g[0] != 0.0 {
                return usage("covering grids start at 0");
            }
            (g[g.len() - 1], g.len())
        }
    };
    let rows = covering_potential(&ladder, x_max, count)?;
    if let Some(p) = &a.branch_table {
        let lo = ladder.branches.iter().map(|b| b.lo).fold(f64::INFINITY, f64::min);
        let hi = ladder.branches.iter().map(|b| b.hi).fold(f64::NEG_INFINITY, f64::max);
        let lo = if lo.is_finite() { lo } else { -3.0 };
        let hi = if hi.is_finite() { hi } else { 3.0 };
        let grid = grid_spec(Some(&format!("{lo}:{hi}:{DEFAULT_POINTS}")), (lo, hi))?;
        let table = io::branch_rows(&ladder, &grid)?;
        let mut w = open(p)?;
        io::write_branches(&mut w, &table)?;
        w.flush().map_err(Error::from)?;
    }
    let side = meta(&m, None, "float", json!({ "x_max": x_max, "ladder": LadderMeta::of(&ladder) }));
    emit(&a.out, side, |w| io::write_xy(w, ["X", "V"], &rows))
}
