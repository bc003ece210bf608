//! JSON layouts shared by MUB files, state files and counterexample dumps.
//!
//! A complex number is `[re, im]`. A matrix is a list of its columns, each
//! column a list of `d` complex entries. Floats are written with 17
//! significant digits so files round-trip bit-exactly.

use std::fmt::Write as _;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, ComplexVector};
use crate::states::{DensityMatrix, PureState};

/// 17 significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// JSON number, or `null` for non-finite values.
pub fn json_f64(x: f64) -> String {
    if x.is_finite() {
        fmt_f64(x)
    } else {
        "null".to_string()
    }
}

pub fn write_complex(out: &mut String, z: Complex64) {
    let _ = write!(out, "[{}, {}]", fmt_f64(z.re), fmt_f64(z.im));
}

pub fn write_vector(out: &mut String, v: impl IntoIterator<Item = Complex64>) {
    out.push('[');
    for (i, z) in v.into_iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_complex(out, z);
    }
    out.push(']');
}

/// Columns of `m`, one per line at the given indentation.
pub fn write_matrix(out: &mut String, m: &ComplexMatrix, indent: &str) {
    out.push_str("[\n");
    for j in 0..m.ncols() {
        out.push_str(indent);
        out.push_str("  ");
        write_vector(out, m.column(j).iter().copied());
        out.push_str(if j + 1 < m.ncols() { ",\n" } else { "\n" });
    }
    out.push_str(indent);
    out.push(']');
}

pub type RawVector = Vec<[f64; 2]>;
pub type RawMatrix = Vec<RawVector>;

pub fn vector_from_raw(raw: &RawVector) -> ComplexVector {
    DVector::from_iterator(raw.len(), raw.iter().map(|&[re, im]| Complex64::new(re, im)))
}

/// Builds a `d × d` matrix from `d` columns of length `d`.
pub fn matrix_from_raw(raw: &RawMatrix, d: usize) -> Result<ComplexMatrix> {
    if raw.len() != d {
        return Err(Error::Parse(format!(
            "expected {d} columns, found {}",
            raw.len()
        )));
    }
    if let Some(bad) = raw.iter().find(|col| col.len() != d) {
        return Err(Error::Parse(format!(
            "expected columns of length {d}, found {}",
            bad.len()
        )));
    }
    Ok(ComplexMatrix::from_fn(d, d, |r, c| {
        let [re, im] = raw[c][r];
        Complex64::new(re, im)
    }))
}

/// Pure or mixed state read from / written to a state file.
#[derive(Clone, Debug, PartialEq)]
pub enum StateFile {
    Pure(PureState),
    Density(DensityMatrix),
}

impl StateFile {
    pub fn dim(&self) -> usize {
        match self {
            StateFile::Pure(psi) => psi.dim(),
            StateFile::Density(rho) => rho.dim(),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            StateFile::Pure(psi) => psi.to_density(),
            StateFile::Density(rho) => rho.clone(),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    kind: String,
    d: usize,
    data: serde_json::Value,
}

/// `{"kind": "pure", "d": d, "data": [[re, im], …]}` or
/// `{"kind": "density", "d": d, "data": [column, …]}`.
pub fn parse_state(content: &[u8]) -> Result<StateFile> {
    let raw: RawState = serde_json::from_slice(content)?;
    state_from_value(raw)
}

pub(crate) fn parse_state_value(value: serde_json::Value) -> Result<StateFile> {
    let raw: RawState = serde_json::from_value(value)?;
    state_from_value(raw)
}

fn state_from_value(raw: RawState) -> Result<StateFile> {
    match raw.kind.as_str() {
        "pure" => {
            let v: RawVector = serde_json::from_value(raw.data)?;
            if v.len() != raw.d {
                return Err(Error::Parse(format!(
                    "expected {} amplitudes, found {}",
                    raw.d,
                    v.len()
                )));
            }
            Ok(StateFile::Pure(PureState::new(vector_from_raw(&v))?))
        }
        "density" => {
            let m: RawMatrix = serde_json::from_value(raw.data)?;
            let m = matrix_from_raw(&m, raw.d)?;
            Ok(StateFile::Density(DensityMatrix::new(m)?))
        }
        other => Err(Error::Parse(format!("unknown state kind {other:?}"))),
    }
}

pub fn serialize_state(state: &StateFile) -> String {
    let mut out = String::new();
    write_state(&mut out, state, "");
    out.push('\n');
    out
}

pub(crate) fn write_state(out: &mut String, state: &StateFile, indent: &str) {
    let (kind, d) = match state {
        StateFile::Pure(psi) => ("pure", psi.dim()),
        StateFile::Density(rho) => ("density", rho.dim()),
    };
    let _ = write!(
        out,
        "{{\n{indent}  \"kind\": \"{kind}\",\n{indent}  \"d\": {d},\n{indent}  \"data\": "
    );
    match state {
        StateFile::Pure(psi) => write_vector(out, psi.amplitudes().iter().copied()),
        StateFile::Density(rho) => write_matrix(out, rho.matrix(), &format!("{indent}  ")),
    }
    let _ = write!(out, "\n{indent}}}");
}
