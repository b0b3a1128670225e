//! Continuous-time flows for one-dimensional maps through functional
//! conjugation.
//!
//! A discrete map `f` with fixed point `x*` and multiplier `s = f′(x*)` is
//! linearized by the Schröder function, `sΨ = Ψ∘f`. The interpolating flow
//! `f_t = Ψ⁻¹(sᵗΨ)` is the zero-energy motion of a particle in the potential
//! `V = −(ln s · Ψ/Ψ′)²`. These objects are computed here as exact or float
//! power series and continued with the functional equations. Trajectories
//! are then integrated across switchback branches.

pub mod error;
pub mod flow;
pub mod fnser;
pub mod io;
pub mod logistic;
pub mod maps;
pub mod quad;
pub mod scalar;
pub mod series;
pub mod skellam;

pub use error::{Error, Result};
pub use fnser::MapModel;
pub use scalar::Scalar;
pub use series::PowerSeries;

/// Exact coefficients.
pub type Rational = num_rational::BigRational;
pub type RationalSeries = PowerSeries<Rational>;
pub type FloatSeries = PowerSeries<f64>;
pub type RationalMap = MapModel<Rational>;
pub type FloatMap = MapModel<f64>;
