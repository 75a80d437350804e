//! Optimal input paths `x(y)` obtained by integrating an [`InputSystem`]
//! from zero inputs at zero output.

use std::io::{self, Write};

use crate::error::{check_dim, check_finite, Error, Result};
use crate::model::InputSystem;

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_NONNEG_TOLERANCE: f64 = 1e-9;

/// Solved input path on a grid of output levels, with the field value
/// stored at every state for dense output.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    grid: Vec<f64>,
    states: Vec<Vec<f64>>,
    derivatives: Vec<Vec<f64>>,
}

impl Trajectory {
    /// Integrates from `x(0) = 0` up to `y_max` with classical RK4 and a
    /// fixed `step`; the last step is shortened to land on `y_max`.
    pub fn solve(sys: &InputSystem, y_max: f64, step: f64) -> Result<Self> {
        Self::solve_from(sys, &vec![0.0; sys.dim], y_max, step)
    }

    /// Same as [`solve`](Self::solve) but starting from an arbitrary state at
    /// `y = 0`. Used to synthesise data away from the zero path.
    pub fn solve_from(sys: &InputSystem, x0: &[f64], y_max: f64, step: f64) -> Result<Self> {
        sys.ensure_valid()?;
        check_dim("initial state", sys.dim, x0.len())?;
        check_finite("initial state", x0)?;
        if !(y_max > 0.0 && y_max.is_finite()) {
            return Err(Error::param("y_max", y_max, "must be positive and finite"));
        }
        if !(step > 0.0 && step <= y_max) {
            return Err(Error::param("step", step, "must satisfy 0 < step <= y_max"));
        }

        let n = sys.dim;
        // Full steps, then one partial step unless the grid already hits y_max.
        let mut full = (y_max / step).floor() as usize;
        if y_max - full as f64 * step <= 1e-9 * step {
            full = full.saturating_sub(1);
        }
        let points = full + 2;

        let mut grid = Vec::with_capacity(points);
        let mut states = Vec::with_capacity(points);
        let mut derivatives = Vec::with_capacity(points);

        let mut x = x0.to_vec();
        let mut dx = vec![0.0; n];
        sys.field_into(&x, &mut dx);
        grid.push(0.0);
        states.push(x.clone());
        derivatives.push(dx.clone());

        let mut k2 = vec![0.0; n];
        let mut k3 = vec![0.0; n];
        let mut k4 = vec![0.0; n];
        let mut tmp = vec![0.0; n];

        for k in 1..points {
            let y_prev = grid[k - 1];
            let y_next = if k == points - 1 { y_max } else { k as f64 * step };
            let h = y_next - y_prev;

            let k1 = &dx;
            for i in 0..n {
                tmp[i] = x[i] + 0.5 * h * k1[i];
            }
            sys.field_into(&tmp, &mut k2);
            for i in 0..n {
                tmp[i] = x[i] + 0.5 * h * k2[i];
            }
            sys.field_into(&tmp, &mut k3);
            for i in 0..n {
                tmp[i] = x[i] + h * k3[i];
            }
            sys.field_into(&tmp, &mut k4);
            for i in 0..n {
                x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::Divergence {
                    y: y_next,
                    index: k,
                });
            }
            sys.field_into(&x, &mut dx);
            if dx.iter().any(|v| !v.is_finite()) {
                return Err(Error::Divergence {
                    y: y_next,
                    index: k,
                });
            }
            grid.push(y_next);
            states.push(x.clone());
            derivatives.push(dx.clone());
        }

        Ok(Trajectory {
            grid,
            states,
            derivatives,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn derivatives(&self) -> &[Vec<f64>] {
        &self.derivatives
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn y_max(&self) -> f64 {
        self.grid.last().copied().unwrap_or(0.0)
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    /// Dense output by cubic Hermite interpolation on the bracketing grid
    /// cell. Exact at grid points.
    pub fn state_at(&self, y: f64) -> Result<Vec<f64>> {
        let max = self.y_max();
        if self.is_empty() || !(0.0..=max).contains(&y) {
            return Err(Error::OutOfRange { y, max });
        }
        // first grid point strictly greater than y
        let upper = self.grid.partition_point(|g| *g <= y);
        if upper == 0 {
            return Ok(self.states[0].clone());
        }
        let lo = upper - 1;
        if self.grid[lo] == y || upper == self.grid.len() {
            return Ok(self.states[lo].clone());
        }
        let (y0, y1) = (self.grid[lo], self.grid[upper]);
        let h = y1 - y0;
        let s = (y - y0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;

        let (x0, x1) = (&self.states[lo], &self.states[upper]);
        let (d0, d1) = (&self.derivatives[lo], &self.derivatives[upper]);
        Ok((0..x0.len())
            .map(|i| h00 * x0[i] + h10 * h * d0[i] + h01 * x1[i] + h11 * h * d1[i])
            .collect())
    }

    /// `(grid index, input index)` for every state entry below `-tolerance`.
    pub fn check_nonnegativity(&self, tolerance: f64) -> Vec<(usize, usize)> {
        self.states
            .iter()
            .enumerate()
            .flat_map(|(k, x)| {
                x.iter()
                    .enumerate()
                    .filter(move |(_, v)| **v < -tolerance)
                    .map(move |(i, _)| (k, i))
            })
            .collect()
    }

    /// CSV with header `y,x1..xn,dx1..dxn`, 17 significant digits per value.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let n = self.dim();
        let mut header = vec!["y".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.extend((1..=n).map(|i| format!("dx{i}")));
        writeln!(out, "{}", header.join(","))?;
        for ((y, x), d) in self.grid.iter().zip(&self.states).zip(&self.derivatives) {
            let row: Vec<String> = std::iter::once(y)
                .chain(x)
                .chain(d)
                .map(|v| format!("{v:.16e}"))
                .collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Aggregate input rate `sum_i dx_i/dy` at the state `x`.
pub fn marginal_cost(sys: &InputSystem, x: &[f64]) -> Result<f64> {
    Ok(sys.derivative_field(x)?.iter().sum())
}
