//! Distance-based efficiency scores.
//!
//! An observation at distance `d_j` from the ideal point `X*` is compared
//! with the worst feasible point `X_w` on the same ray out of `X*`:
//! `I = 1 - d_j / d_w`. The score is 1 at the ideal point and 0 on the
//! region boundary.

use std::io::{self, Write};

use crate::error::{check_dim, Error, Result};
use crate::region::{FeasibleRegion, RegionTemplate, MIN_DIRECTION};
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub output: f64,
    pub inputs: Vec<f64>,
    pub label: Option<String>,
}

impl Observation {
    pub fn new(output: f64, inputs: Vec<f64>) -> Self {
        Observation {
            output,
            inputs,
            label: None,
        }
    }

    pub fn labelled(label: impl Into<String>, output: f64, inputs: Vec<f64>) -> Self {
        Observation {
            output,
            inputs,
            label: Some(label.into()),
        }
    }
}

/// Rows of a sample: one output level paired with one input vector each.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Sample {
    dim: usize,
    observations: Vec<Observation>,
}

impl Sample {
    /// Checks that every row has `dim` finite, non-negative inputs and a
    /// finite, non-negative output.
    pub fn new(dim: usize, observations: Vec<Observation>) -> Result<Self> {
        for obs in &observations {
            check_dim("observation inputs", dim, obs.inputs.len())?;
            if !(obs.output.is_finite() && obs.output >= 0.0) {
                return Err(Error::param("output", obs.output, "must be finite and non-negative"));
            }
            if let Some(v) = obs.inputs.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(Error::param("input", *v, "inputs must be finite and non-negative"));
            }
        }
        Ok(Sample { dim, observations })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }
}

/// What to do with an observation further from `X*` than the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Reject observations outside the region or beyond the worst point.
    #[default]
    Strict,
    /// Score them 0 and set [`ScoreBreakdown::clamped`].
    Clamp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreBreakdown {
    pub d_j: f64,
    pub d_w: f64,
    pub worst_point: Vec<f64>,
    pub efficiency: f64,
    pub anchor: Vec<f64>,
    pub clamped: bool,
}

pub fn distance(a: &[f64], b: &[f64]) -> Result<f64> {
    check_dim("distance operand", a.len(), b.len())?;
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// Scores one observation against the ideal point `x_star`.
pub fn score(
    region: &FeasibleRegion,
    x_star: &[f64],
    obs: &Observation,
    mode: Mode,
) -> Result<ScoreBreakdown> {
    check_dim("anchor", region.dim(), x_star.len())?;
    check_dim("observation inputs", region.dim(), obs.inputs.len())?;
    if !region.contains(x_star)? {
        return Err(Error::AnchorOutsideRegion);
    }
    let inside = region.contains(&obs.inputs)?;
    if !inside && mode == Mode::Strict {
        return Err(Error::OutsideRegion);
    }

    let at_anchor = obs
        .inputs
        .iter()
        .zip(x_star)
        .all(|(a, b)| (a - b).abs() <= MIN_DIRECTION);
    if at_anchor {
        // no direction to cast along; report the nearest axis exit as scale
        let (d_w, worst_point) = region
            .nearest_axis_exit(x_star)?
            .unwrap_or((f64::INFINITY, x_star.to_vec()));
        return Ok(ScoreBreakdown {
            d_j: 0.0,
            d_w,
            worst_point,
            efficiency: 1.0,
            anchor: x_star.to_vec(),
            clamped: false,
        });
    }

    let exit = region.ray_exit(x_star, &obs.inputs)?;
    let d_j = distance(&obs.inputs, x_star)?;
    let d_w = distance(&exit.point, x_star)?;
    let beyond = d_j > d_w || d_w == 0.0;
    if beyond {
        return match mode {
            Mode::Strict => Err(Error::BeyondWorstPoint { d_j, d_w }),
            Mode::Clamp => Ok(ScoreBreakdown {
                d_j,
                d_w,
                worst_point: exit.point,
                efficiency: 0.0,
                anchor: x_star.to_vec(),
                clamped: true,
            }),
        };
    }
    Ok(ScoreBreakdown {
        d_j,
        d_w,
        worst_point: exit.point,
        efficiency: 1.0 - d_j / d_w,
        anchor: x_star.to_vec(),
        clamped: false,
    })
}

/// Per-observation outcome of [`score_sample`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredObservation {
    pub label: Option<String>,
    pub output: f64,
    pub result: Result<ScoreBreakdown>,
}

/// Scores every observation; failures are recorded per row and do not stop
/// the batch.
pub fn score_sample(
    region: &FeasibleRegion,
    x_star: &[f64],
    sample: &Sample,
    mode: Mode,
) -> Vec<ScoredObservation> {
    sample
        .observations()
        .iter()
        .map(|obs| ScoredObservation {
            label: obs.label.clone(),
            output: obs.output,
            result: score(region, x_star, obs, mode),
        })
        .collect()
}

/// Scores against the optimal point for the observation's own output
/// level, read off `traj`, with a region anchored there by `template`.
pub fn score_at_output_level(
    traj: &Trajectory,
    template: &RegionTemplate,
    obs: &Observation,
    mode: Mode,
) -> Result<ScoreBreakdown> {
    let anchor = traj.state_at(obs.output)?;
    let region = template.anchored_at(&anchor)?;
    score(&region, &anchor, obs, mode)
}

/// Formats `v` with `digits` significant digits in plain decimal notation.
pub fn format_significant(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    let s = format!("{v:.decimals$}");
    // rounding can carry into a new digit (9.9996 -> 10.000)
    let rounded: f64 = s.parse().unwrap_or(v);
    let new_mag = rounded.abs().log10().floor() as i64;
    if rounded != 0.0 && new_mag > magnitude && decimals > 0 {
        format!("{v:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}

/// Score report with header `label,y,d_j,d_w,efficiency,clamped`.
///
/// Distances carry 6 significant digits and efficiencies 4. Failed rows keep
/// their label and output, leave the numeric fields empty and put `error`
/// in the last column.
pub fn write_score_csv<W: Write>(rows: &[ScoredObservation], mut out: W) -> io::Result<()> {
    writeln!(out, "label,y,d_j,d_w,efficiency,clamped")?;
    for (k, row) in rows.iter().enumerate() {
        let label = row.label.clone().unwrap_or_else(|| format!("row{}", k + 1));
        match &row.result {
            Ok(s) => writeln!(
                out,
                "{},{},{},{},{},{}",
                label,
                row.output,
                format_significant(s.d_j, 6),
                format_significant(s.d_w, 6),
                format_significant(s.efficiency, 4),
                s.clamped
            )?,
            Err(_) => writeln!(out, "{},{},,,,error", label, row.output)?,
        }
    }
    Ok(())
}
