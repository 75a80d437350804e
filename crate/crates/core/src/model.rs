//! The linear input system: for each input `i`,
//!
//! ```text
//! dx_i/dy = b_i + sum_j a_ij * x_j
//! ```
//!
//! where `y` is the output level and every `x_j` is denominated in the same
//! currency. The intercepts `b` and the square matrix `a` together describe
//! the cheapest way to grow each input as output grows.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, check_finite, Result};

/// Affine right-hand side of the input dynamics.
///
/// Fields are public so the struct can mirror the model-file schema; use
/// [`InputSystem::new`] or [`InputSystem::validate`] before trusting one that
/// came from outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSystem {
    pub dim: usize,
    pub intercepts: Vec<f64>,
    /// Row `i` holds the rates of input `i` with respect to every input.
    pub coefficients: Vec<Vec<f64>>,
}

/// One broken invariant found by [`InputSystem::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    ZeroDimension,
    InterceptLength { expected: usize, got: usize },
    CoefficientRows { expected: usize, got: usize },
    CoefficientRowLength { row: usize, expected: usize, got: usize },
    NonFiniteIntercept { index: usize },
    NonFiniteCoefficient { row: usize, col: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::ZeroDimension => write!(f, "dim must be at least 1"),
            Violation::InterceptLength { expected, got } => {
                write!(f, "intercepts has length {got}, expected {expected}")
            }
            Violation::CoefficientRows { expected, got } => {
                write!(f, "coefficients has {got} rows, expected {expected}")
            }
            Violation::CoefficientRowLength { row, expected, got } => {
                write!(f, "coefficients row {row} has length {got}, expected {expected}")
            }
            Violation::NonFiniteIntercept { index } => {
                write!(f, "intercepts[{index}] is not finite")
            }
            Violation::NonFiniteCoefficient { row, col } => {
                write!(f, "coefficients[{row}][{col}] is not finite")
            }
        }
    }
}

impl Violation {
    pub fn is_dimension(&self) -> bool {
        !matches!(
            self,
            Violation::NonFiniteIntercept { .. } | Violation::NonFiniteCoefficient { .. }
        )
    }
}

impl InputSystem {
    /// Builds a system and rejects it unless [`validate`](Self::validate) is clean.
    pub fn new(intercepts: Vec<f64>, coefficients: Vec<Vec<f64>>) -> Result<Self> {
        let sys = InputSystem {
            dim: intercepts.len(),
            intercepts,
            coefficients,
        };
        sys.ensure_valid()?;
        Ok(sys)
    }

    /// A system with no cross-input effects: every input grows at its own
    /// constant rate.
    pub fn constant_rates(intercepts: Vec<f64>) -> Result<Self> {
        let n = intercepts.len();
        Self::new(intercepts, vec![vec![0.0; n]; n])
    }

    /// The two-input example technology: `dx1/dy = 1 + (x1 + x2)/4`,
    /// `dx2/dy = 2 + (x1 + x2)/2`.
    pub fn two_input_example() -> Self {
        InputSystem {
            dim: 2,
            intercepts: vec![1.0, 2.0],
            coefficients: vec![vec![0.25, 0.25], vec![0.5, 0.5]],
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        let n = self.dim;
        let mut out = Vec::new();
        if n == 0 {
            out.push(Violation::ZeroDimension);
        }
        if self.intercepts.len() != n {
            out.push(Violation::InterceptLength {
                expected: n,
                got: self.intercepts.len(),
            });
        }
        if self.coefficients.len() != n {
            out.push(Violation::CoefficientRows {
                expected: n,
                got: self.coefficients.len(),
            });
        }
        for (row, r) in self.coefficients.iter().enumerate() {
            if r.len() != n {
                out.push(Violation::CoefficientRowLength {
                    row,
                    expected: n,
                    got: r.len(),
                });
            }
        }
        for (index, v) in self.intercepts.iter().enumerate() {
            if !v.is_finite() {
                out.push(Violation::NonFiniteIntercept { index });
            }
        }
        for (row, r) in self.coefficients.iter().enumerate() {
            for (col, v) in r.iter().enumerate() {
                if !v.is_finite() {
                    out.push(Violation::NonFiniteCoefficient { row, col });
                }
            }
        }
        out
    }

    /// Converts the first violation, if any, into an error.
    pub fn ensure_valid(&self) -> Result<()> {
        use crate::error::Error;
        match self.validate().into_iter().next() {
            None => Ok(()),
            Some(Violation::ZeroDimension) => Err(Error::param(
                "dim",
                0.0,
                "an input system needs at least one input",
            )),
            Some(Violation::InterceptLength { expected, got }) => Err(Error::Dimension {
                what: "intercepts",
                expected,
                got,
            }),
            Some(Violation::CoefficientRows { expected, got })
            | Some(Violation::CoefficientRowLength { expected, got, .. }) => {
                Err(Error::Dimension {
                    what: "coefficients",
                    expected,
                    got,
                })
            }
            Some(Violation::NonFiniteIntercept { index }) => Err(Error::NonFinite {
                what: "intercepts",
                index,
            }),
            Some(Violation::NonFiniteCoefficient { row, col }) => Err(Error::NonFinite {
                what: "coefficients",
                index: row * self.dim + col,
            }),
        }
    }

    /// Input rates at the state `x`.
    pub fn derivative_field(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim("input state", self.dim, x.len())?;
        check_finite("input state", x)?;
        let mut out = vec![0.0; self.dim];
        self.field_into(x, &mut out);
        Ok(out)
    }

    /// Unchecked evaluation into a caller-owned buffer.
    pub(crate) fn field_into(&self, x: &[f64], out: &mut [f64]) {
        for ((o, b), row) in out.iter_mut().zip(&self.intercepts).zip(&self.coefficients) {
            *o = b + row.iter().zip(x).map(|(a, xj)| a * xj).sum::<f64>();
        }
    }

    /// `A·d`: how the field changes along the direction `d`.
    pub(crate) fn linear_part(&self, d: &[f64]) -> Vec<f64> {
        self.coefficients
            .iter()
            .map(|row| row.iter().zip(d).map(|(a, dj)| a * dj).sum())
            .collect()
    }

    pub fn has_nonnegative_coefficients(&self) -> bool {
        self.coefficients.iter().flatten().all(|a| *a >= 0.0)
    }
}
