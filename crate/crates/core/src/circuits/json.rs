//! Circuit interchange format.
//!
//! ```json
//! {"dims":[2,2], "witness_count":1,
//!  "gates":[{"label":"H","support":[0]},
//!           {"label":"CNOT","support":[0,1]},
//!           {"label":"U","support":[1],"unitary":[[0,1],[1,0]]}]}
//! ```
//! Matrix entries are either real numbers or `[re, im]` pairs.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::linalg::{RegisterShape, C64};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn value(&self) -> C64 {
        match *self {
            Entry::Real(x) => C64::new(x, 0.0),
            Entry::Complex([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSpec {
    pub label: String,
    pub support: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitary: Option<Vec<Vec<Entry>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitFile {
    pub dims: Vec<usize>,
    #[serde(default)]
    pub witness_count: usize,
    pub gates: Vec<GateSpec>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let file: CircuitFile = serde_json::from_str(text).map_err(json_error)?;
    file.to_circuit()
}

impl CircuitFile {
    pub fn to_circuit(&self) -> Result<Circuit> {
        let shape = RegisterShape::new(self.dims.clone())?;
        let mut c = Circuit::new(shape.clone(), self.witness_count)?;
        for (i, g) in self.gates.iter().enumerate() {
            shape.check_support(&g.support).map_err(|e| Error::Parse(format!("gate {i}: {e}")))?;
            let dims: Vec<usize> = g.support.iter().map(|&s| shape.dim(s)).collect();
            let gate = match &g.unitary {
                None => Gate::named(&g.label, &g.support, &dims),
                Some(rows) => {
                    let n = rows.len();
                    if rows.iter().any(|r| r.len() != n) {
                        return Err(Error::Parse(format!("gate {i}: unitary is not square")));
                    }
                    let m = DMatrix::from_fn(n, n, |r, col| rows[r][col].value());
                    Gate::new(g.label.clone(), g.support.clone(), m)
                }
            }
            .map_err(|e| Error::Parse(format!("gate {i}: {e}")))?;
            c.push(gate).map_err(|e| Error::Parse(format!("gate {i}: {e}")))?;
        }
        Ok(c)
    }

    pub fn from_circuit(c: &Circuit) -> Self {
        let gates = c
            .gates
            .iter()
            .map(|g| {
                let n = g.unitary.nrows();
                let rows = (0..n)
                    .map(|r| (0..n).map(|k| Entry::Complex([g.unitary[(r, k)].re, g.unitary[(r, k)].im])).collect())
                    .collect();
                GateSpec { label: g.label.clone(), support: g.support.clone(), unitary: Some(rows) }
            })
            .collect();
        CircuitFile { dims: c.shape.dims().to_vec(), witness_count: c.witness_count, gates }
    }
}
