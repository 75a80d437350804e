//! Profit-maximizing output level.
//!
//! Profit at output `y` is revenue `c·y` minus the total input spend along the
//! optimal path, `sum_i x_i(y)`. Its derivative is `c - m(y)` with `m` the
//! marginal cost, so the optimum is where the marginal cost meets the price.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::InputSystem;
use crate::trajectory::Trajectory;

/// Bracket width at which bisection on `m(y) - c` stops.
pub const ROOT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfitSpec {
    pub price: f64,
}

impl ProfitSpec {
    pub fn new(price: f64) -> Result<Self> {
        if price > 0.0 && price.is_finite() {
            Ok(ProfitSpec { price })
        } else {
            Err(Error::param("price", price, "must be positive and finite"))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimumResult {
    pub y_star: f64,
    pub x_star: Vec<f64>,
    pub profit: f64,
    pub marginal_at_star: f64,
}

/// `c·y - sum_i x_i(y)`, reading the input path from `traj`.
pub fn profit(spec: &ProfitSpec, y: f64, traj: &Trajectory) -> Result<f64> {
    let x = traj.state_at(y)?;
    Ok(spec.price * y - x.iter().sum::<f64>())
}

fn marginal_at(sys: &InputSystem, traj: &Trajectory, y: f64) -> Result<f64> {
    let x = traj.state_at(y)?;
    let mut d = vec![0.0; sys.dim];
    sys.field_into(&x, &mut d);
    Ok(d.iter().sum())
}

/// Solves the path on `[0, y_max]` and bisects `m(y) = price`.
///
/// Requires the marginal cost to start below the price, end above it, and
/// increase strictly between grid points; otherwise the optimum is either
/// absent or not unique.
pub fn find_optimum(
    sys: &InputSystem,
    spec: &ProfitSpec,
    y_max: f64,
    step: f64,
) -> Result<OptimumResult> {
    let spec = ProfitSpec::new(spec.price)?;
    let traj = Trajectory::solve(sys, y_max, step)?;
    find_optimum_on(sys, &spec, &traj)
}

/// [`find_optimum`] on an already solved trajectory.
pub fn find_optimum_on(
    sys: &InputSystem,
    spec: &ProfitSpec,
    traj: &Trajectory,
) -> Result<OptimumResult> {
    let price = spec.price;
    let grid = traj.grid();
    let marginals: Vec<f64> = traj
        .derivatives()
        .iter()
        .map(|d| d.iter().sum())
        .collect();

    let Some(&m0) = marginals.first() else {
        return Err(Error::OutOfRange { y: 0.0, max: 0.0 });
    };
    if m0 >= price {
        return Err(Error::NoInteriorOptimum {
            price,
            marginal: m0,
        });
    }
    if let Some(k) = marginals.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::NonMonotoneMarginal {
            y_lo: grid[k],
            y_hi: grid[k + 1],
        });
    }
    let last = *marginals.last().unwrap();
    if last < price {
        return Err(Error::BracketExhausted {
            y_max: traj.y_max(),
            marginal: last,
            price,
        });
    }

    // first grid point whose marginal reaches the price
    let hi_idx = marginals.partition_point(|m| *m < price);
    let (mut lo, mut hi) = (grid[hi_idx - 1], grid[hi_idx]);
    if marginals[hi_idx] == price {
        lo = hi;
    }
    while hi - lo > ROOT_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if marginal_at(sys, traj, mid)? < price {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let y_star = 0.5 * (lo + hi);
    let x_star = traj.state_at(y_star)?;
    let marginal_at_star = marginal_at(sys, traj, y_star)?;
    Ok(OptimumResult {
        y_star,
        profit: price * y_star - x_star.iter().sum::<f64>(),
        x_star,
        marginal_at_star,
    })
}
