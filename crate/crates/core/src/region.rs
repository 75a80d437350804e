//! Feasible input regions and worst-point ray casting.
//!
//! A region is an intersection of constraints. Scoring casts a ray from the
//! ideal point through an observation and walks out to where the ray first
//! leaves the region; that boundary point is the least efficient input mix
//! in that direction.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::model::InputSystem;

/// Used when a marginal cutoff is requested without an explicit epsilon.
pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Directions with every component at or below this size are rejected.
pub const MIN_DIRECTION: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    /// `x[index] >= value`
    LowerBound { index: usize, value: f64 },
    /// `|x - center| <= radius`
    Ball { center: Vec<f64>, radius: f64 },
    /// Every input rate positive and `sum_i 1/rate_i > epsilon`, with the
    /// rates taken from `system` at the query point.
    MarginalCutoff { system: InputSystem, epsilon: f64 },
}

impl Constraint {
    fn holds(&self, x: &[f64]) -> bool {
        match self {
            Constraint::LowerBound { index, value } => x[*index] >= *value,
            Constraint::Ball { center, radius } => {
                squared_distance(x, center) <= radius * radius
            }
            Constraint::MarginalCutoff { system, epsilon } => {
                let mut f = vec![0.0; system.dim];
                system.field_into(x, &mut f);
                cutoff_sum(&f).is_some_and(|s| s > *epsilon)
            }
        }
    }

    /// Largest `t >= 0` with `origin + t·dir` still satisfying this
    /// constraint, assuming `origin` does. `None` means never left.
    fn exit_parameter(&self, origin: &[f64], dir: &[f64]) -> Option<f64> {
        match self {
            Constraint::LowerBound { index, value } => {
                let d = dir[*index];
                (d < 0.0).then(|| ((value - origin[*index]) / d).max(0.0))
            }
            Constraint::Ball { center, radius } => {
                Some(ball_exit(origin, dir, center, *radius))
            }
            Constraint::MarginalCutoff { system, epsilon } => {
                cutoff_exit(system, *epsilon, origin, dir)
            }
        }
    }

    fn describe(&self) -> String {
        match self {
            Constraint::LowerBound { index, value } => format!("x{} >= {value}", index + 1),
            Constraint::Ball { radius, .. } => format!("ball of radius {radius}"),
            Constraint::MarginalCutoff { epsilon, .. } => {
                format!("marginal cutoff epsilon = {epsilon}")
            }
        }
    }
}

/// Sum of reciprocal input rates, or `None` if any rate is not positive.
fn cutoff_sum(field: &[f64]) -> Option<f64> {
    if field.iter().all(|f| *f > 0.0) {
        Some(field.iter().map(|f| 1.0 / f).sum())
    } else {
        None
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Positive root of `|o - c + t·d|^2 = r^2` for `o` inside the ball.
fn ball_exit(origin: &[f64], dir: &[f64], center: &[f64], radius: f64) -> f64 {
    let rel: Vec<f64> = origin.iter().zip(center).map(|(o, c)| o - c).collect();
    let a = dot(dir, dir);
    let b = dot(dir, &rel);
    let c = (dot(&rel, &rel) - radius * radius).min(0.0);
    let root = (b * b - a * c).max(0.0).sqrt();
    if b <= 0.0 {
        (root - b) / a
    } else if root + b > 0.0 {
        -c / (root + b)
    } else {
        0.0
    }
}

/// First exit of the marginal cutoff along the ray.
///
/// Along the ray each rate is affine in `t`, so `h(t) = sum 1/rate_i(t) - eps`
/// is convex wherever all rates stay positive. The first crossing is either
/// on the decreasing branch of `h` or at the first rate hitting zero.
fn cutoff_exit(sys: &InputSystem, epsilon: f64, origin: &[f64], dir: &[f64]) -> Option<f64> {
    let mut f0 = vec![0.0; sys.dim];
    sys.field_into(origin, &mut f0);
    let slope = sys.linear_part(dir);

    let rates = |t: f64| f0.iter().zip(&slope).map(move |(f, s)| f + t * s);
    let h = |t: f64| rates(t).map(|r| 1.0 / r).sum::<f64>() - epsilon;
    let dh = |t: f64| {
        rates(t)
            .zip(&slope)
            .map(|(r, s)| -s / (r * r))
            .sum::<f64>()
    };

    if cutoff_sum(&f0).is_none_or(|s| s <= epsilon) {
        return Some(0.0);
    }

    // first rate to reach zero
    let t_zero = f0
        .iter()
        .zip(&slope)
        .filter(|(_, s)| **s < 0.0)
        .map(|(f, s)| -f / s)
        .fold(f64::INFINITY, f64::min);

    let crossing_below = |upper: f64| -> Option<f64> {
        // h is decreasing on [0, upper]; find the crossing if h(upper) <= 0
        (h(upper) <= 0.0).then(|| bisect(|t| h(t) > 0.0, 0.0, upper))
    };

    if t_zero.is_finite() {
        // minimizer of h on [0, t_zero): h' is increasing and blows up at t_zero
        let t_min = if dh(0.0) >= 0.0 {
            0.0
        } else {
            bisect(|t| dh(t) < 0.0, 0.0, t_zero)
        };
        Some(crossing_below(t_min).unwrap_or(t_zero))
    } else {
        // no rate ever falls, so h is non-increasing for all t >= 0
        let mut upper = 1.0;
        while upper < 1e15 {
            if let Some(t) = crossing_below(upper) {
                return Some(t);
            }
            upper *= 2.0;
        }
        None
    }
}

/// Bisection for the boundary of a predicate that is true at `lo` and false
/// at `hi`, run down to adjacent floats. Returns the last `true` point.
fn bisect(inside: impl Fn(f64) -> bool, mut lo: f64, mut hi: f64) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Result of casting a ray to the region boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct RayExit {
    pub point: Vec<f64>,
    /// Ray parameter: `point = origin + t·(through - origin)`.
    pub t: f64,
    /// Indices of every constraint that is tight at `point`.
    pub tight: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleRegion {
    dim: usize,
    constraints: Vec<Constraint>,
}

impl FeasibleRegion {
    pub fn new(dim: usize, constraints: Vec<Constraint>) -> Result<Self> {
        if constraints.is_empty() {
            return Err(Error::Region("at least one constraint is required".into()));
        }
        for c in &constraints {
            match c {
                Constraint::LowerBound { index, value } => {
                    if *index >= dim {
                        return Err(Error::Region(format!(
                            "lower bound index {index} out of range for {dim} inputs"
                        )));
                    }
                    if !value.is_finite() {
                        return Err(Error::Region(format!("lower bound on x{} is not finite", index + 1)));
                    }
                }
                Constraint::Ball { center, radius } => {
                    check_dim("ball center", dim, center.len())?;
                    if !(*radius > 0.0 && radius.is_finite()) {
                        return Err(Error::Region(format!("ball radius {radius} must be positive")));
                    }
                    if center.iter().any(|v| !v.is_finite()) {
                        return Err(Error::Region("ball center is not finite".into()));
                    }
                }
                Constraint::MarginalCutoff { system, epsilon } => {
                    system.ensure_valid()?;
                    check_dim("cutoff system", dim, system.dim)?;
                    if !(*epsilon > 0.0 && epsilon.is_finite()) {
                        return Err(Error::Region(format!("epsilon {epsilon} must be positive")));
                    }
                }
            }
        }
        Ok(FeasibleRegion { dim, constraints })
    }

    /// `{x_i >= lower_i for all i}` plus the given extra constraints.
    pub fn anchored(lower: &[f64], extra: Vec<Constraint>) -> Result<Self> {
        let mut constraints: Vec<Constraint> = lower
            .iter()
            .enumerate()
            .map(|(index, &value)| Constraint::LowerBound { index, value })
            .collect();
        constraints.extend(extra);
        Self::new(lower.len(), constraints)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        check_dim("point", self.dim, x.len())?;
        Ok(self.constraints.iter().all(|c| c.holds(x)))
    }

    /// Indices of the constraints `x` violates.
    pub fn violated(&self, x: &[f64]) -> Result<Vec<usize>> {
        check_dim("point", self.dim, x.len())?;
        Ok(self
            .constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.holds(x))
            .map(|(i, _)| i)
            .collect())
    }

    pub fn describe_constraint(&self, index: usize) -> String {
        self.constraints[index].describe()
    }

    /// Boundary point where the ray from `origin` through `through` leaves
    /// the region.
    pub fn ray_exit(&self, origin: &[f64], through: &[f64]) -> Result<RayExit> {
        check_dim("ray origin", self.dim, origin.len())?;
        check_dim("ray target", self.dim, through.len())?;
        let dir: Vec<f64> = through.iter().zip(origin).map(|(b, a)| b - a).collect();
        if dir.iter().all(|d| d.abs() <= MIN_DIRECTION) {
            return Err(Error::DegenerateDirection);
        }
        if !self.contains(origin)? {
            return Err(Error::AnchorOutsideRegion);
        }
        self.exit_along(origin, &dir)
    }

    fn exit_along(&self, origin: &[f64], dir: &[f64]) -> Result<RayExit> {
        let exits: Vec<Option<f64>> = self
            .constraints
            .iter()
            .map(|c| c.exit_parameter(origin, dir))
            .collect();
        let t = exits
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if !t.is_finite() {
            return Err(Error::UnboundedRay);
        }
        let tie = 1e-12 * t.max(1.0);
        let tight = exits
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_some_and(|e| e - t <= tie))
            .map(|(i, _)| i)
            .collect();
        let point = origin.iter().zip(dir).map(|(o, d)| o + t * d).collect();
        Ok(RayExit { point, t, tight })
    }

    /// Smallest positive boundary distance from `origin` along the `±e_i`
    /// axes, with the point where it is reached. `None` if every axis ray is
    /// unbounded or exits immediately.
    pub fn nearest_axis_exit(&self, origin: &[f64]) -> Result<Option<(f64, Vec<f64>)>> {
        check_dim("point", self.dim, origin.len())?;
        let mut best: Option<(f64, Vec<f64>)> = None;
        for i in 0..self.dim {
            for sign in [1.0, -1.0] {
                let mut dir = vec![0.0; self.dim];
                dir[i] = sign;
                match self.exit_along(origin, &dir) {
                    Ok(exit) if exit.t > 0.0 => {
                        if best.as_ref().is_none_or(|(d, _)| exit.t < *d) {
                            best = Some((exit.t, exit.point));
                        }
                    }
                    Ok(_) | Err(Error::UnboundedRay) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(best)
    }
}

/// Lower bounds at `anchor` intersected with the marginal cutoff of `sys`.
pub fn epsilon_region(sys: &InputSystem, anchor: &[f64], epsilon: f64) -> Result<FeasibleRegion> {
    let field = sys.derivative_field(anchor)?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::param("epsilon", epsilon, "must be positive and finite"));
    }
    match cutoff_sum(&field) {
        None => Err(Error::Region(
            "input rates at the anchor must all be positive".into(),
        )),
        Some(s) if s <= epsilon => Err(Error::Region(format!(
            "anchor fails the marginal cutoff: sum of reciprocal rates {s} <= epsilon {epsilon}"
        ))),
        Some(_) => FeasibleRegion::anchored(
            anchor,
            vec![Constraint::MarginalCutoff {
                system: sys.clone(),
                epsilon,
            }],
        ),
    }
}

/// Region description as stored in a model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConstraintSpec {
    LowerBound { index: usize, value: f64 },
    Ball { center: Vec<f64>, radius: f64 },
    MarginalCutoff { epsilon: f64 },
}

impl ConstraintSpec {
    /// Binds a cutoff record to `sys`.
    pub fn bind(&self, sys: &InputSystem) -> Constraint {
        match self {
            ConstraintSpec::LowerBound { index, value } => Constraint::LowerBound {
                index: *index,
                value: *value,
            },
            ConstraintSpec::Ball { center, radius } => Constraint::Ball {
                center: center.clone(),
                radius: *radius,
            },
            ConstraintSpec::MarginalCutoff { epsilon } => Constraint::MarginalCutoff {
                system: sys.clone(),
                epsilon: *epsilon,
            },
        }
    }
}

/// Builds a region around whatever anchor a scoring call supplies: lower
/// bounds at the anchor plus fixed outer constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionTemplate {
    pub outer: Vec<Constraint>,
}

impl RegionTemplate {
    pub fn new(outer: Vec<Constraint>) -> Self {
        RegionTemplate { outer }
    }

    pub fn anchored_at(&self, anchor: &[f64]) -> Result<FeasibleRegion> {
        FeasibleRegion::anchored(anchor, self.outer.clone())
    }
}
