//! Mutually unbiased bases.
//!
//! [`construct_mub`] returns `d + 1` bases for `d = 2` and every odd prime
//! power, computational basis first. Sets for other dimensions (e.g. `2^n`)
//! can be loaded from the JSON layout handled by [`parse_mub_file`].

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::field::{prime_power, GaloisField};
use crate::io::{self, RawMatrix};
use crate::numerics::{self, ComplexMatrix};

/// Tolerance used when validating a parsed MUB file.
pub const PARSE_TOL: f64 = 1e-6;

/// An orthonormal basis; column `i` is `|b_i⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    vectors: ComplexMatrix,
}

impl Basis {
    /// Wraps a square matrix of column vectors. Orthonormality is checked by
    /// [`verify_mub`], not here.
    pub fn new(vectors: ComplexMatrix) -> Result<Self> {
        numerics::check_square(&vectors)?;
        Ok(Self { vectors })
    }

    pub fn computational(d: usize) -> Self {
        Self {
            vectors: ComplexMatrix::identity(d, d),
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> nalgebra::DVectorView<'_, Complex64> {
        self.vectors.column(i)
    }

    /// `U|b_i⟩` for every vector.
    pub fn rotated(&self, u: &ComplexMatrix) -> Self {
        Self {
            vectors: u * &self.vectors,
        }
    }
}

/// An ordered set of bases sharing one dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct MubSet {
    dim: usize,
    bases: Vec<Basis>,
    label: String,
}

impl MubSet {
    pub fn new(label: impl Into<String>, bases: Vec<Basis>) -> Result<Self> {
        let first = bases
            .first()
            .ok_or_else(|| Error::InvalidParameter("a MUB set needs at least one basis".into()))?;
        let dim = first.dim();
        if let Some(b) = bases.iter().find(|b| b.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: b.dim(),
            });
        }
        Ok(Self {
            dim,
            bases,
            label: label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn bases(&self) -> &[Basis] {
        &self.bases
    }

    /// The first `m` bases.
    pub fn truncated(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.len() {
            return Err(Error::InvalidParameter(format!(
                "cannot take {m} bases from a set of {}",
                self.len()
            )));
        }
        Ok(Self {
            dim: self.dim,
            bases: self.bases[..m].to_vec(),
            label: format!("{}[..{m}]", self.label),
        })
    }

    /// Applies one unitary to every vector of every basis.
    pub fn rotated(&self, u: &ComplexMatrix) -> Self {
        Self {
            dim: self.dim,
            bases: self.bases.iter().map(|b| b.rotated(u)).collect(),
            label: format!("{} (rotated)", self.label),
        }
    }

    pub fn verify(&self, tol: f64) -> Result<MubVerification> {
        verify_mub(&self.bases, tol)
    }
}

/// `d + 1` MUBs for `d = 2` or odd prime powers `d = p^n`.
pub fn construct_mub(d: usize) -> Result<MubSet> {
    match prime_power(d) {
        Some((2, 1)) => Ok(pauli_eigenbases()),
        Some((p, 1)) => prime_mub(p),
        Some((p, n)) if p != 2 => wootters_fields(p, n as usize),
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

fn pauli_eigenbases() -> MubSet {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let r = |x: f64| Complex64::new(x, 0.0);
    let i = |x: f64| Complex64::new(0.0, x);
    // columns: X = (1, ±1)/√2, Y = (1, ±i)/√2
    let x = ComplexMatrix::from_column_slice(2, 2, &[r(s), r(s), r(s), r(-s)]);
    let y = ComplexMatrix::from_column_slice(2, 2, &[r(s), i(s), r(s), i(-s)]);
    MubSet {
        dim: 2,
        bases: vec![
            Basis::computational(2),
            Basis { vectors: x },
            Basis { vectors: y },
        ],
        label: "pauli-d2".into(),
    }
}

/// `ω^k / √q` for `ω = exp(2πi/p)`.
fn phase_table(p: usize, q: usize) -> Vec<Complex64> {
    let norm = 1.0 / (q as f64).sqrt();
    (0..p)
        .map(|k| Complex64::from_polar(norm, 2.0 * PI * k as f64 / p as f64))
        .collect()
}

/// Basis `t` has vectors `j` with components `ω^(t k² + j k)/√p`.
fn prime_mub(p: usize) -> Result<MubSet> {
    let phases = phase_table(p, p);
    let mut bases = vec![Basis::computational(p)];
    for t in 0..p {
        let vectors = ComplexMatrix::from_fn(p, p, |k, j| phases[(t * k * k + j * k) % p]);
        bases.push(Basis { vectors });
    }
    MubSet::new(format!("prime-d{p}"), bases)
}

/// Wootters–Fields construction over GF(p^n): the component at field
/// element `x` of vector `(t, j)` is `ω_p^{Tr(t x² + j x)}/√q`.
fn wootters_fields(p: usize, n: usize) -> Result<MubSet> {
    let field = GaloisField::new(p, n)?;
    let q = field.order();
    let mul = field.mul_table();
    let tr = field.trace_table();
    let phases = phase_table(p, q);
    let squares: Vec<usize> = (0..q).map(|x| mul[x][x]).collect();

    let mut bases = vec![Basis::computational(q)];
    for t in 0..q {
        let vectors = ComplexMatrix::from_fn(q, q, |x, j| {
            let k = (tr[mul[t][squares[x]]] + tr[mul[j][x]]) as usize % p;
            phases[k]
        });
        bases.push(Basis { vectors });
    }
    MubSet::new(format!("wootters-fields-d{q}"), bases)
}

/// Outcome of an exhaustive overlap scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MubVerification {
    /// `max |⟨b_i|b_j⟩ - δ_ij|` within any basis.
    pub max_orthonormality_deviation: f64,
    /// `max | |⟨b_i|b'_j⟩| - 1/√d |` across distinct bases.
    pub max_unbiasedness_deviation: f64,
    pub passed: bool,
}

pub fn verify_mub(bases: &[Basis], tol: f64) -> Result<MubVerification> {
    let d = match bases.first() {
        Some(b) => b.dim(),
        None => {
            return Ok(MubVerification {
                max_orthonormality_deviation: 0.0,
                max_unbiasedness_deviation: 0.0,
                passed: true,
            })
        }
    };
    if let Some(b) = bases.iter().find(|b| b.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: b.dim(),
        });
    }
    let target = 1.0 / (d as f64).sqrt();
    let mut ortho = 0.0_f64;
    let mut unbiased = 0.0_f64;
    for (s, bs) in bases.iter().enumerate() {
        ortho = ortho.max(numerics::unitarity_deviation(bs.matrix()));
        for bt in &bases[s + 1..] {
            let overlaps = bs.matrix().adjoint() * bt.matrix();
            for z in overlaps.iter() {
                unbiased = unbiased.max((z.norm() - target).abs());
            }
        }
    }
    Ok(MubVerification {
        max_orthonormality_deviation: ortho,
        max_unbiasedness_deviation: unbiased,
        passed: ortho <= tol && unbiased <= tol,
    })
}

pub fn serialize_mub(set: &MubSet) -> String {
    let mut out = String::new();
    write_mub(&mut out, set, "");
    out.push('\n');
    out
}

pub(crate) fn write_mub(out: &mut String, set: &MubSet, indent: &str) {
    let label = serde_json::to_string(&set.label).expect("strings serialize");
    let _ = write!(
        out,
        "{{\n{indent}  \"d\": {},\n{indent}  \"label\": {label},\n{indent}  \"bases\": [\n",
        set.dim
    );
    let inner = format!("{indent}    ");
    for (k, b) in set.bases.iter().enumerate() {
        out.push_str(&inner);
        io::write_matrix(out, b.matrix(), &inner);
        out.push_str(if k + 1 < set.bases.len() { ",\n" } else { "\n" });
    }
    let _ = write!(out, "{indent}  ]\n{indent}}}");
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawMub {
    d: usize,
    #[serde(default)]
    label: String,
    bases: Vec<RawMatrix>,
}

/// Parses the JSON MUB layout and checks the set with [`PARSE_TOL`].
pub fn parse_mub_file(content: &[u8]) -> Result<MubSet> {
    let raw: RawMub = serde_json::from_slice(content)?;
    mub_from_raw(raw)
}

/// Parses the JSON MUB layout checking only its shape, so that callers can
/// run [`verify_mub`] at a tolerance of their choosing.
pub fn parse_mub_file_unverified(content: &[u8]) -> Result<MubSet> {
    let raw: RawMub = serde_json::from_slice(content)?;
    mub_shape_from_raw(raw)
}

pub(crate) fn parse_mub_value(value: serde_json::Value) -> Result<MubSet> {
    let raw: RawMub = serde_json::from_value(value)?;
    mub_from_raw(raw)
}

fn mub_from_raw(raw: RawMub) -> Result<MubSet> {
    let set = mub_shape_from_raw(raw)?;
    let report = set.verify(PARSE_TOL)?;
    if !report.passed {
        return Err(Error::NotUnbiased {
            orthonormality: report.max_orthonormality_deviation,
            unbiasedness: report.max_unbiasedness_deviation,
        });
    }
    Ok(set)
}

fn mub_shape_from_raw(raw: RawMub) -> Result<MubSet> {
    if raw.d == 0 {
        return Err(Error::Parse("dimension must be positive".into()));
    }
    if raw.bases.is_empty() {
        return Err(Error::Parse("no bases".into()));
    }
    let mut bases = Vec::with_capacity(raw.bases.len());
    for m in &raw.bases {
        if m.len() != raw.d && m.iter().all(|col| col.len() == m.len()) {
            return Err(Error::DimensionMismatch {
                expected: raw.d,
                found: m.len(),
            });
        }
        bases.push(Basis {
            vectors: io::matrix_from_raw(m, raw.d)?,
        });
    }
    MubSet::new(raw.label, bases)
}
