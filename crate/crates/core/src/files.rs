//! Model files (JSON) and sample tables (CSV).
//!
//! A model file looks like
//!
//! ```json
//! {
//!   "dim": 2,
//!   "intercepts": [1.0, 2.0],
//!   "coefficients": [[0.25, 0.25], [0.5, 0.5]],
//!   "price": 6.351,
//!   "region": [
//!     {"type": "lower_bound", "index": 0, "value": 1.25},
//!     {"type": "lower_bound", "index": 1, "value": 2.5},
//!     {"type": "ball", "center": [0.0, 0.0], "radius": 10.0},
//!     {"type": "marginal_cutoff", "epsilon": 1e-6}
//!   ]
//! }
//! ```
//!
//! `price` and `region` are optional; indices are zero-based and a
//! `marginal_cutoff` binds to the file's own system.
//!
//! Sample tables have a header row with `y` and `x1..xn`, plus optional
//! `label` and `segment` columns, in any order.

use std::collections::HashMap;
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::efficiency::{Observation, Sample};
use crate::error::Error;
use crate::model::InputSystem;
use crate::region::{Constraint, ConstraintSpec, FeasibleRegion};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("malformed model file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("model field `{field}`: {source}")]
    Model {
        field: &'static str,
        #[source]
        source: Error,
    },
    #[error("data row {row}, column `{column}`: {message}")]
    Data {
        row: usize,
        column: String,
        message: String,
    },
    #[error("data header: {0}")]
    Header(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub dim: usize,
    pub intercepts: Vec<f64>,
    pub coefficients: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub price: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Vec<ConstraintSpec>>,
}

impl ModelFile {
    pub fn from_system(sys: &InputSystem) -> Self {
        ModelFile {
            dim: sys.dim,
            intercepts: sys.intercepts.clone(),
            coefficients: sys.coefficients.clone(),
            price: None,
            region: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, FileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read<R: Read>(reader: R) -> Result<Self, FileError> {
        Ok(serde_json::from_reader(reader)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model file serializes");
        s.push('\n');
        s
    }

    pub fn system(&self) -> Result<InputSystem, FileError> {
        let sys = InputSystem {
            dim: self.dim,
            intercepts: self.intercepts.clone(),
            coefficients: self.coefficients.clone(),
        };
        sys.ensure_valid().map_err(|source| FileError::Model {
            field: match &source {
                Error::Dimension { what, .. } | Error::NonFinite { what, .. } => what,
                _ => "dim",
            },
            source,
        })?;
        Ok(sys)
    }

    /// The explicit region, if the file has one.
    pub fn region(&self, sys: &InputSystem) -> Option<Result<FeasibleRegion, FileError>> {
        let specs = self.region.as_ref()?;
        let constraints: Vec<Constraint> = specs.iter().map(|s| s.bind(sys)).collect();
        Some(
            FeasibleRegion::new(sys.dim, constraints)
                .map_err(|source| FileError::Model { field: "region", source }),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub label: Option<String>,
    pub output: f64,
    pub inputs: Vec<f64>,
    pub segment: Option<String>,
}

/// Parsed sample CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleTable {
    pub dim: usize,
    pub rows: Vec<TableRow>,
}

impl SampleTable {
    pub fn read<R: Read>(reader: R) -> Result<Self, FileError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = rdr
            .headers()
            .map_err(|e| FileError::Header(e.to_string()))?
            .clone();
        let pos: HashMap<&str, usize> = header.iter().enumerate().map(|(i, h)| (h, i)).collect();
        let y_col = *pos
            .get("y")
            .ok_or_else(|| FileError::Header("missing `y` column".into()))?;
        let mut x_cols = Vec::new();
        while let Some(&c) = pos.get(format!("x{}", x_cols.len() + 1).as_str()) {
            x_cols.push(c);
        }
        if x_cols.is_empty() {
            return Err(FileError::Header("missing `x1` column".into()));
        }
        let label_col = pos.get("label").copied();
        let segment_col = pos.get("segment").copied();

        let mut rows = Vec::new();
        for (k, record) in rdr.records().enumerate() {
            let row = k + 1;
            let record = record.map_err(|e| FileError::Data {
                row,
                column: "*".into(),
                message: e.to_string(),
            })?;
            let number = |col: usize| -> Result<f64, FileError> {
                let name = &header[col];
                let text = record.get(col).unwrap_or("");
                let v: f64 = text.parse().map_err(|_| FileError::Data {
                    row,
                    column: name.to_string(),
                    message: format!("`{text}` is not a number"),
                })?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(FileError::Data {
                        row,
                        column: name.to_string(),
                        message: "value must be finite".into(),
                    })
                }
            };
            let output = number(y_col)?;
            let inputs = x_cols.iter().map(|&c| number(c)).collect::<Result<Vec<_>, _>>()?;
            let text_at = |c: Option<usize>| {
                c.and_then(|c| record.get(c))
                    .filter(|s| !s.is_empty())
                    .map(str::to_string)
            };
            rows.push(TableRow {
                label: text_at(label_col),
                output,
                inputs,
                segment: text_at(segment_col),
            });
        }
        Ok(SampleTable {
            dim: x_cols.len(),
            rows,
        })
    }

    fn row_error(row: usize, source: Error) -> FileError {
        let column = match &source {
            Error::Parameter { name: "output", .. } => "y",
            _ => "x",
        };
        FileError::Data {
            row,
            column: column.into(),
            message: source.to_string(),
        }
    }

    fn observation(r: &TableRow) -> Observation {
        Observation {
            output: r.output,
            inputs: r.inputs.clone(),
            label: r.label.clone(),
        }
    }

    /// All rows as one sample, in file order.
    pub fn sample(&self) -> Result<Sample, FileError> {
        for (k, r) in self.rows.iter().enumerate() {
            Sample::new(self.dim, vec![Self::observation(r)]).map_err(|e| Self::row_error(k + 1, e))?;
        }
        Ok(Sample::new(self.dim, self.rows.iter().map(Self::observation).collect())
            .expect("rows validated individually"))
    }

    /// Rows grouped by `segment`, groups in order of first appearance.
    pub fn segments(&self) -> Result<Vec<Sample>, FileError> {
        let mut order: Vec<Option<&str>> = Vec::new();
        let mut groups: Vec<Vec<Observation>> = Vec::new();
        for (k, r) in self.rows.iter().enumerate() {
            Sample::new(self.dim, vec![Self::observation(r)]).map_err(|e| Self::row_error(k + 1, e))?;
            let key = r.segment.as_deref();
            let g = match order.iter().position(|s| *s == key) {
                Some(g) => g,
                None => {
                    order.push(key);
                    groups.push(Vec::new());
                    groups.len() - 1
                }
            };
            groups[g].push(Self::observation(r));
        }
        Ok(groups
            .into_iter()
            .map(|obs| Sample::new(self.dim, obs).expect("rows validated individually"))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const WORKED_MODEL: &str = r#"{
        "dim": 2,
        "intercepts": [1.0, 2.0],
        "coefficients": [[0.25, 0.25], [0.5, 0.5]],
        "region": [
            {"type": "lower_bound", "index": 0, "value": 1.25},
            {"type": "lower_bound", "index": 1, "value": 2.5},
            {"type": "ball", "center": [0, 0], "radius": 10}
        ]
    }"#;

    #[test]
    fn model_round_trip() {
        let m = ModelFile::parse(WORKED_MODEL).unwrap();
        let sys = m.system().unwrap();
        assert_eq!(sys, InputSystem::two_input_example());
        assert!(m.price.is_none());
        let region = m.region(&sys).unwrap().unwrap();
        assert!(region.contains(&[1.25, 6.21]).unwrap());
        assert_eq!(ModelFile::parse(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn model_errors_name_the_field() {
        let bad = WORKED_MODEL.replace("[1.0, 2.0]", "[1.0]");
        let err = ModelFile::parse(&bad).unwrap().system().unwrap_err();
        assert!(err.to_string().starts_with("model field `intercepts`"), "{err}");
        let bad_region = WORKED_MODEL.replace("\"radius\": 10", "\"radius\": -1");
        let m = ModelFile::parse(&bad_region).unwrap();
        let err = m.region(&m.system().unwrap()).unwrap().unwrap_err();
        assert!(err.to_string().starts_with("model field `region`"), "{err}");
        assert!(matches!(ModelFile::parse("{"), Err(FileError::Json(_))));
    }

    #[test]
    fn table_columns_in_any_order() {
        let text = "x2,label,y,x1,segment\n6.21,firm,1,1.25,a\n3,b2, 0.5 ,2,b\n";
        let t = SampleTable::read(text.as_bytes()).unwrap();
        assert_eq!(t.dim, 2);
        assert_eq!(t.rows[0].inputs, vec![1.25, 6.21]);
        assert_eq!(t.rows[1].label.as_deref(), Some("b2"));
        assert_eq!(t.rows[1].output, 0.5);
        assert_eq!(t.segments().unwrap().len(), 2);
    }

    #[test]
    fn table_errors_name_row_and_column() {
        let err = SampleTable::read("y,x1\n1,2\n1,abc\n".as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), "data row 2, column `x1`: `abc` is not a number");
        assert!(matches!(SampleTable::read("x1\n1\n".as_bytes()), Err(FileError::Header(_))));
        let t = SampleTable::read("y,x1\n1,-2\n".as_bytes()).unwrap();
        let err = t.sample().unwrap_err();
        assert!(err.to_string().starts_with("data row 1, column `x`"), "{err}");
    }
}
