//! Recovering an [`InputSystem`] from observed input paths by two-stage
//! gradient matching.
//!
//! Stage one differentiates each input path numerically with respect to
//! output. Stage two regresses those slopes on `[1, x_1, …, x_n]`, one
//! least-squares problem per equation. Because the model is linear in both
//! the states and the parameters, the second stage is ordinary (optionally
//! ridge-penalised) least squares.
//!
//! A single path from zero inputs usually keeps the inputs in fixed
//! proportion, which leaves the coefficient columns collinear. Several paths
//! with different starting mixes (segments) break that.

use nalgebra::{DMatrix, DVector};

use crate::efficiency::Sample;
use crate::error::{Error, Result};
use crate::model::InputSystem;

/// Largest condition number of the column-scaled design accepted by [`fit`].
pub const MAX_CONDITION: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum DerivativeMethod {
    /// Three-point Lagrange differences: central inside, one-sided
    /// second-order at both ends. Exact for quadratics.
    #[default]
    ThreePoint,
    /// Slope of a least-squares line through `window` neighbouring points.
    /// Smoother on noisy data.
    LocalLinear { window: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FitOptions {
    /// Ridge penalty on the coefficient matrix (not the intercepts).
    pub ridge: f64,
    pub derivatives: DerivativeMethod,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub system: InputSystem,
    /// Root-mean-square residual of each equation over the data rows.
    pub residual_norms: Vec<f64>,
    /// Slope estimates for every data row, segments concatenated in order.
    pub derivative_estimates: Vec<Vec<f64>>,
}

#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn check_ordering(sample: &Sample) -> Result<()> {
    if sample.len() < 3 {
        return Err(Error::SampleSize {
            needed: 3,
            got: sample.len(),
        });
    }
    for (row, w) in sample.observations().windows(2).enumerate() {
        if !(w[1].output > w[0].output) {
            return Err(Error::Ordering {
                row: row + 1,
                y: w[1].output,
            });
        }
    }
    Ok(())
}

/// Derivative of the quadratic through `(t[k], v[k])` evaluated at `t[at]`.
fn lagrange3(t: [f64; 3], v: [f64; 3], at: usize) -> f64 {
    let x = t[at];
    let mut d = 0.0;
    for j in 0..3 {
        let others: Vec<usize> = (0..3).filter(|&m| m != j).collect();
        let (a, b) = (others[0], others[1]);
        let denom = (t[j] - t[a]) * (t[j] - t[b]);
        d += v[j] * ((x - t[a]) + (x - t[b])) / denom;
    }
    d
}

/// Per-row slopes `dx/dy` of an output-sorted sample.
pub fn estimate_derivatives(sample: &Sample) -> Result<Vec<Vec<f64>>> {
    estimate_derivatives_with(sample, DerivativeMethod::ThreePoint)
}

pub fn estimate_derivatives_with(
    sample: &Sample,
    method: DerivativeMethod,
) -> Result<Vec<Vec<f64>>> {
    check_ordering(sample)?;
    let obs = sample.observations();
    let m = obs.len();
    let n = sample.dim();
    let ys: Vec<f64> = obs.iter().map(|o| o.output).collect();

    match method {
        DerivativeMethod::ThreePoint => Ok((0..m)
            .map(|k| {
                let (start, at) = match k {
                    0 => (0, 0),
                    k if k == m - 1 => (m - 3, 2),
                    k => (k - 1, 1),
                };
                let t = [ys[start], ys[start + 1], ys[start + 2]];
                (0..n)
                    .map(|i| {
                        let v = [
                            obs[start].inputs[i],
                            obs[start + 1].inputs[i],
                            obs[start + 2].inputs[i],
                        ];
                        lagrange3(t, v, at)
                    })
                    .collect()
            })
            .collect()),
        DerivativeMethod::LocalLinear { window } => {
            if window < 2 {
                return Err(Error::param(
                    "window",
                    window as f64,
                    "local-linear window needs at least 2 points",
                ));
            }
            let w = window.min(m);
            Ok((0..m)
                .map(|k| {
                    let start = k.saturating_sub(w / 2).min(m - w);
                    let idx = start..start + w;
                    let y_mean = idx.clone().map(|j| ys[j]).sum::<f64>() / w as f64;
                    let syy: f64 = idx.clone().map(|j| (ys[j] - y_mean).powi(2)).sum();
                    (0..n)
                        .map(|i| {
                            let x_mean =
                                idx.clone().map(|j| obs[j].inputs[i]).sum::<f64>() / w as f64;
                            idx.clone()
                                .map(|j| (ys[j] - y_mean) * (obs[j].inputs[i] - x_mean))
                                .sum::<f64>()
                                / syy
                        })
                        .collect()
                })
                .collect())
        }
    }
}

fn column_name(j: usize) -> String {
    if j == 0 {
        "intercept".to_string()
    } else {
        format!("x{j}")
    }
}

/// Fits one system to one or more segments, each sorted by output.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn fit(segments: &[Sample], options: &FitOptions) -> Result<FitResult> {
    let Some(first) = segments.first() else {
        return Err(Error::SampleSize { needed: 3, got: 0 });
    };
    let n = first.dim();
    if !(options.ridge >= 0.0 && options.ridge.is_finite()) {
        return Err(Error::param("ridge", options.ridge, "must be finite and non-negative"));
    }

    let mut rows: Vec<&[f64]> = Vec::new();
    let mut slopes: Vec<Vec<f64>> = Vec::new();
    for seg in segments {
        crate::error::check_dim("segment inputs", n, seg.dim())?;
        slopes.extend(estimate_derivatives_with(seg, options.derivatives)?);
        rows.extend(seg.observations().iter().map(|o| o.inputs.as_slice()));
    }
    let data_rows = rows.len();
    if data_rows < n + 2 {
        return Err(Error::SampleSize {
            needed: n + 2,
            got: data_rows,
        });
    }

    let penalty_rows = if options.ridge > 0.0 { n } else { 0 };
    let cols = n + 1;
    let mut design = DMatrix::<f64>::zeros(data_rows + penalty_rows, cols);
    for (r, x) in rows.iter().enumerate() {
        design[(r, 0)] = 1.0;
        for (j, v) in x.iter().enumerate() {
            design[(r, j + 1)] = *v;
        }
    }
    let root_ridge = options.ridge.sqrt();
    for j in 0..penalty_rows {
        design[(data_rows + j, j + 1)] = root_ridge;
    }

    // unit-norm columns so the rank test does not depend on input units
    let scales: Vec<f64> = (0..cols)
        .map(|j| {
            let s = design.column(j).norm();
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    for (j, s) in scales.iter().enumerate() {
        design.column_mut(j).scale_mut(1.0 / s);
    }

    let svd = design.clone().svd(false, true);
    let sv = &svd.singular_values;
    let (s_max, s_min) = sv
        .iter()
        .fold((0.0f64, f64::INFINITY), |(hi, lo), s| (hi.max(*s), lo.min(*s)));
    let condition = if s_min > 0.0 { s_max / s_min } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
        let weakest = sv.imin();
        let null = v_t.row(weakest);
        let peak = null.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let columns = null
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() >= 0.1 * peak)
            .map(|(j, _)| column_name(j))
            .collect();
        return Err(Error::Collinear { columns, condition });
    }

    let qr = design.qr();
    let q = qr.q();
    let r = qr.r();

    let mut intercepts = vec![0.0; n];
    let mut coefficients = vec![vec![0.0; n]; n];
    let mut residual_norms = vec![0.0; n];
    for i in 0..n {
        let mut target = DVector::<f64>::zeros(data_rows + penalty_rows);
        for (k, s) in slopes.iter().enumerate() {
            target[k] = s[i];
        }
        let qtb = q.transpose() * &target;
        let beta = r
            .solve_upper_triangular(&qtb)
            .expect("triangular factor is non-singular after the rank test");
        intercepts[i] = beta[0] / scales[0];
        for j in 0..n {
            coefficients[i][j] = beta[j + 1] / scales[j + 1];
        }
        let sq: f64 = rows
            .iter()
            .zip(&slopes)
            .map(|(x, s)| {
                let pred = intercepts[i]
                    + coefficients[i].iter().zip(x.iter()).map(|(a, v)| a * v).sum::<f64>();
                (pred - s[i]).powi(2)
            })
            .sum();
        residual_norms[i] = (sq / data_rows as f64).sqrt();
    }

    Ok(FitResult {
        system: InputSystem::new(intercepts, coefficients)?,
        residual_norms,
        derivative_estimates: slopes,
    })
}
