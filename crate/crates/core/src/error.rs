use thiserror::Error;

/// Errors raised by the series engines, model catalog and flow integrator.
///
/// Variant names are part of the CLI contract: engine failures are reported
/// by name on stderr.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ZeroLinearTerm: series has a vanishing linear coefficient")]
    ZeroLinearTerm,
    #[error("ResonantMultiplier: s^{power} = 1 for multiplier s = {multiplier}")]
    ResonantMultiplier { multiplier: f64, power: usize },
    #[error("UnitMultiplier: multiplier is exactly 1, use the unit-multiplier path")]
    UnitMultiplier,
    #[error("NotAFixedPoint: f(x*) - x* = {residual} at x* = {point}")]
    NotAFixedPoint { point: f64, residual: f64 },
    #[error("NotAnalytic: multiplier vanishes at x* = {point}, no unit-slope linearization exists")]
    NotAnalytic { point: f64 },
    #[error("DomainEscape: argument {value} leaves the valid range of the inverse")]
    DomainEscape { value: f64 },
    #[error("ZeroDerivative: derivative vanishes at x = {x}")]
    ZeroDerivative { x: f64 },
    #[error("NoContraction: {descents} descents did not reach the convergence disk (last point {last})")]
    NoContraction { descents: usize, last: f64 },
    #[error("InsufficientOrder: need order >= {needed}, have {have}")]
    InsufficientOrder { needed: usize, have: usize },
    #[error("OutOfDomain: {what}")]
    OutOfDomain { what: String },
    #[error("DegenerateK: k = 1 has only the trivial fixed point")]
    DegenerateK,
    #[error("PoleEncountered: {what}")]
    PoleEncountered { what: String },
    #[error("UnitK: k = 1 makes the Bell recursion singular")]
    UnitK,
    #[error("KNotAboveOne: k = {k} must exceed 1")]
    KNotAboveOne { k: f64 },
    #[error("OutOfInterval: x = {x} outside [{lo}, {hi}]")]
    OutOfInterval { x: f64, lo: f64, hi: f64 },
    #[error("UnitS: s = 1 requires the asymptotic s=1 path")]
    UnitS,
    #[error("ComplexBranch: continuation is complex at x = {x} (s = {s})")]
    ComplexBranch { x: f64, s: f64 },
    #[error("UnsupportedRegime: s = {s}, no certified real branch beyond depth {depth}")]
    UnsupportedRegime { s: f64, depth: usize },
    #[error("QuadratureFailure: {what}")]
    QuadratureFailure { what: String },
    #[error("Parse: {0}")]
    Parse(String),
    #[error("Io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// The bare variant name, as printed by the CLI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroLinearTerm => "ZeroLinearTerm",
            Error::ResonantMultiplier { .. } => "ResonantMultiplier",
            Error::UnitMultiplier => "UnitMultiplier",
            Error::NotAFixedPoint { .. } => "NotAFixedPoint",
            Error::NotAnalytic { .. } => "NotAnalytic",
            Error::DomainEscape { .. } => "DomainEscape",
            Error::ZeroDerivative { .. } => "ZeroDerivative",
            Error::NoContraction { .. } => "NoContraction",
            Error::InsufficientOrder { .. } => "InsufficientOrder",
            Error::OutOfDomain { .. } => "OutOfDomain",
            Error::DegenerateK => "DegenerateK",
            Error::PoleEncountered { .. } => "PoleEncountered",
            Error::UnitK => "UnitK",
            Error::KNotAboveOne { .. } => "KNotAboveOne",
            Error::OutOfInterval { .. } => "OutOfInterval",
            Error::UnitS => "UnitS",
            Error::ComplexBranch { .. } => "ComplexBranch",
            Error::UnsupportedRegime { .. } => "UnsupportedRegime",
            Error::QuadratureFailure { .. } => "QuadratureFailure",
            Error::Parse(_) => "Parse",
            Error::Io(_) => "Io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
