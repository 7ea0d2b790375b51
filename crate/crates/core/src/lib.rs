//! Stochastic porous medium equation `du = Δ(uᵐ)dt + u(f dw + g dt)` through the
//! random change of variables `u(t,x) = U(H(t),x)·h(t)`.
//!
//! * [`noise`]: Brownian paths, the multiplier `h` and the clock `H`.
//! * [`timechange`]: the generic transform between deterministic and stochastic solutions.
//! * [`exact`]: Barenblatt, quadratic- and linear-pressure closed forms.
//! * [`solver`]: conservative finite-volume solver producing snapshot tables.
//! * [`analysis`]: Monte Carlo and pathwise checks of the stochastic equation's properties.

pub mod analysis;
pub mod error;
pub mod exact;
pub mod noise;
pub mod solver;
pub mod stats;
pub mod timechange;

pub use error::{Error, Result};
pub use exact::{BarenblattParams, LinearPressureParams, QuadraticPressureParams, SelfSimilar};
pub use noise::{CoefficientPair, MultiplierPath, NoisePath, StepFunction, TimeGrid};
pub use solver::{FieldState, SchemeConfig, SnapshotTable, SpatialGrid};
pub use timechange::{DeterministicSolution, StochasticFieldSample};
