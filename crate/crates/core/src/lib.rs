//! Productive efficiency measured against an optimal input path instead of
//! a benchmark firm.
//!
//! A linear ODE system ([`InputSystem`]) describes the cheapest input bundle
//! for every output level. Integrating it from zero ([`Trajectory`]) and
//! equating marginal cost with the output price ([`find_optimum`]) gives
//! the ideal input point `X*`. Each observed firm is then scored by its
//! distance to `X*`, relative to the worst feasible point on the same ray
//! ([`score`]).
//!
//! ```
//! use ode_efficiency::{score, Constraint, FeasibleRegion, Mode, Observation};
//!
//! let x_star = [1.25, 2.5];
//! let region = FeasibleRegion::anchored(
//!     &x_star,
//!     vec![Constraint::Ball { center: vec![0.0, 0.0], radius: 10.0 }],
//! )?;
//! let s = score(&region, &x_star, &Observation::new(1.0, vec![1.25, 6.21]), Mode::Strict)?;
//! assert!((s.efficiency - 0.5).abs() < 1e-3);
//! # Ok::<(), ode_efficiency::Error>(())
//! ```

pub mod cli;
pub mod efficiency;
mod error;
pub mod estimation;
pub mod files;
pub mod model;
pub mod optimum;
pub mod region;
pub mod trajectory;

pub use efficiency::{
    distance, score, score_at_output_level, score_sample, Mode, Observation, Sample,
    ScoreBreakdown, ScoredObservation,
};
pub use error::{Error, Result};
pub use estimation::{estimate_derivatives, fit, DerivativeMethod, FitOptions, FitResult};
pub use files::{ModelFile, SampleTable};
pub use model::{InputSystem, Violation};
pub use optimum::{find_optimum, profit, OptimumResult, ProfitSpec};
pub use region::{epsilon_region, Constraint, FeasibleRegion, RayExit, RegionTemplate};
pub use trajectory::{marginal_cost, Trajectory};
