//! Right-hand sides of the coherence and entropic uncertainty bounds for
//! `M` mutually unbiased bases in dimension `d`, and a uniform record for
//! checking an inequality numerically.
//!
//! Every evaluator is a total function of `(d, M)` and, where the bound is
//! state dependent, of the purity `tr ρ²` and the von Neumann entropy.
//! Values are returned raw: a negative lower bound is vacuous but valid.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mub::MubSet;
use crate::numerics::{self, ComplexMatrix, ZERO_CUTOFF};

/// Default absolute tolerance for inequality checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Stable identifiers used in reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundId {
    /// Averaged relative entropy of coherence, purity/entropy dependent.
    Prop1,
    /// The same for pure states: `ln(Md / (d + M - 1))`.
    Prop1Pure,
    /// Competing pure-state bound `(ln d)/M`.
    PatiMub,
    /// Averaged geometric coherence, purity dependent.
    Prop2,
    /// The same at purity one: `(d-1)/d (1 - 1/√M)`.
    Prop2Pure,
    /// Pure-state bound from the maximal-probability sum.
    Prop2LpPure,
    /// `Σ_t p_max(ℬ_t|ψ) ≤ 1 + √((M² - M)/d)`.
    MaxprobSum,
    /// Landau–Pollak-type POVM bound on a sum of chosen probabilities.
    Mim6,
    /// `Σ_t J(ℬ_t|ρ) ≤ tr ρ² + (M - 1)/d`.
    IcSum,
    /// Averaged min-entropy, new state-independent bound.
    Prop3,
    /// Averaged min-entropy, competing state-independent bound.
    Rmub12,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    /// `lhs ≥ rhs`
    Lower,
    /// `lhs ≤ rhs`
    Upper,
}

impl BoundId {
    pub const ALL: [BoundId; 11] = [
        BoundId::Prop1,
        BoundId::Prop1Pure,
        BoundId::PatiMub,
        BoundId::Prop2,
        BoundId::Prop2Pure,
        BoundId::Prop2LpPure,
        BoundId::MaxprobSum,
        BoundId::Mim6,
        BoundId::IcSum,
        BoundId::Prop3,
        BoundId::Rmub12,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundId::Prop1 => "prop1",
            BoundId::Prop1Pure => "prop1_pure",
            BoundId::PatiMub => "pati_mub",
            BoundId::Prop2 => "prop2",
            BoundId::Prop2Pure => "prop2_pure",
            BoundId::Prop2LpPure => "prop2_lp_pure",
            BoundId::MaxprobSum => "maxprob_sum",
            BoundId::Mim6 => "mim6",
            BoundId::IcSum => "ic_sum",
            BoundId::Prop3 => "prop3",
            BoundId::Rmub12 => "rmub12",
        }
    }

    pub fn kind(self) -> BoundKind {
        match self {
            BoundId::MaxprobSum | BoundId::Mim6 | BoundId::IcSum => BoundKind::Upper,
            _ => BoundKind::Lower,
        }
    }

    /// Proven for pure states only.
    pub fn pure_only(self) -> bool {
        matches!(
            self,
            BoundId::Prop1Pure
                | BoundId::PatiMub
                | BoundId::Prop2Pure
                | BoundId::Prop2LpPure
                | BoundId::MaxprobSum
        )
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundId::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown bound id {s:?}")))
    }
}

/// `(d, M, tr ρ², S₁(ρ))`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MubBoundParams {
    pub d: usize,
    pub m: usize,
    pub purity: f64,
    pub entropy: f64,
}

const PARAM_TOL: f64 = 1e-9;

impl MubBoundParams {
    pub fn new(d: usize, m: usize, purity: f64, entropy: f64) -> Result<Self> {
        check_dm(d, m)?;
        let df = d as f64;
        if !(purity >= 1.0 / df - PARAM_TOL && purity <= 1.0 + PARAM_TOL) {
            return Err(Error::InvalidParameter(format!(
                "purity {purity} outside [1/{d}, 1]"
            )));
        }
        if !(entropy >= -PARAM_TOL && entropy <= df.ln() + PARAM_TOL) {
            return Err(Error::InvalidParameter(format!(
                "entropy {entropy} outside [0, ln {d}]"
            )));
        }
        Ok(Self {
            d,
            m,
            purity,
            entropy,
        })
    }

    /// Purity one, entropy zero.
    pub fn pure(d: usize, m: usize) -> Result<Self> {
        Self::new(d, m, 1.0, 0.0)
    }

    /// The completely mixed state `I/d`.
    pub fn maximally_mixed(d: usize, m: usize) -> Result<Self> {
        Self::new(d, m, 1.0 / d as f64, (d as f64).ln())
    }
}

fn check_dm(d: usize, m: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::BadDimension(d));
    }
    if m < 1 {
        return Err(Error::InvalidParameter("M must be at least 1".into()));
    }
    Ok(())
}

/// `ln(M d / (tr ρ² d + M - 1)) - S₁(ρ)`
pub fn prop1_rhs(p: &MubBoundParams) -> f64 {
    let (d, m) = (p.d as f64, p.m as f64);
    (m * d / (p.purity * d + m - 1.0)).ln() - p.entropy
}

/// `ln(M d / (d + M - 1))`, the pure-state case of [`prop1_rhs`].
pub fn prop1_pure_rhs(d: usize, m: usize) -> f64 {
    let (d, m) = (d as f64, m as f64);
    (m * d / (d + m - 1.0)).ln()
}

/// `-ln m(𝔹) / M` with `m(𝔹) = 1/d` for MUBs, i.e. `(ln d)/M`.
pub fn pati_mub_rhs(d: usize, m: usize) -> f64 {
    (d as f64).ln() / m as f64
}

fn prop2_radicand(p: &MubBoundParams) -> f64 {
    let (d, m) = (p.d as f64, p.m as f64);
    m * d - 1.0 - (m * d - d) * p.purity
}

/// `(d-1)/d - √(d-1)/(d√M) · √(Md - 1 - (Md - d) tr ρ²)`
pub fn prop2_rhs(p: &MubBoundParams) -> Result<f64> {
    let radicand = prop2_radicand(p);
    if radicand < -1e-10 {
        return Err(Error::NegativeRadicand(radicand));
    }
    let (d, m) = (p.d as f64, p.m as f64);
    Ok((d - 1.0) / d - (d - 1.0).sqrt() / (d * m.sqrt()) * radicand.max(0.0).sqrt())
}

/// `(d-1)/d · (1 - 1/√M)`, [`prop2_rhs`] at purity one.
pub fn prop2_pure_rhs(d: usize, m: usize) -> f64 {
    let (d, m) = (d as f64, m as f64);
    (d - 1.0) / d * (1.0 - 1.0 / m.sqrt())
}

/// `1 - (1 + √((M² - M)/d)) / M`
pub fn prop2_pure_lp_rhs(d: usize, m: usize) -> f64 {
    1.0 - maxprob_sum_rhs(d, m) / m as f64
}

/// `1 + √((M² - M)/d)`
pub fn maxprob_sum_rhs(d: usize, m: usize) -> f64 {
    let (d, m) = (d as f64, m as f64);
    1.0 + ((m * m - m) / d).sqrt()
}

/// State-dependent and state-free upper bounds on `Σ_t J(ℬ_t|ρ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IcSumRhs {
    pub state_dependent: f64,
    pub state_free: f64,
}

/// `tr ρ² + (M-1)/d` and `1 + (M-1)/d`.
pub fn ic_sum_rhs(d: usize, m: usize, purity: f64) -> IcSumRhs {
    let extra = (m as f64 - 1.0) / d as f64;
    IcSumRhs {
        state_dependent: purity + extra,
        state_free: 1.0 + extra,
    }
}

/// `ln(M√d / (√d + √(M² - M)))`
pub fn prop3_rhs(d: usize, m: usize) -> f64 {
    let (sd, m) = ((d as f64).sqrt(), m as f64);
    (m * sd / (sd + (m * m - m).sqrt())).ln()
}

/// `ln(√M d / (d + √M - 1))`
pub fn rmub12_rhs(d: usize, m: usize) -> f64 {
    let (d, sm) = (d as f64, (m as f64).sqrt());
    (sm * d / (d + sm - 1.0)).ln()
}

// --- POVMs ------------------------------------------------------------------

/// A measurement `{A_j}` with `A_j ≥ 0` and `Σ A_j = I`.
#[derive(Clone, Debug)]
pub struct Povm {
    dim: usize,
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidPovm("no elements".into()))?;
        let dim = numerics::check_square(first)?;
        let mut total = ComplexMatrix::zeros(dim, dim);
        for (j, a) in elements.iter().enumerate() {
            if numerics::check_square(a)? != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: a.nrows(),
                });
            }
            let spec = numerics::hermitian_eig(a, numerics::HERMITICITY_TOL)?;
            if spec.eigenvalues[0] < -1e-10 {
                return Err(Error::InvalidPovm(format!(
                    "element {j} has eigenvalue {:e}",
                    spec.eigenvalues[0]
                )));
            }
            total += a;
        }
        let dev = numerics::max_abs_diff(&total, &ComplexMatrix::identity(dim, dim));
        if dev > 1e-9 {
            return Err(Error::InvalidPovm(format!(
                "elements sum to identity only within {dev:e}"
            )));
        }
        Ok(Self { dim, elements })
    }

    /// Rank-one projectors onto the columns of a basis matrix.
    pub fn projective(basis: &crate::mub::Basis) -> Result<Self> {
        let b = basis.matrix();
        let elements = (0..b.ncols())
            .map(|i| {
                let v = b.column(i);
                v * v.adjoint()
            })
            .collect();
        Self::new(elements)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }
}

/// `‖√A √B‖_∞²`
fn cross_term(sqrt_a: &ComplexMatrix, sqrt_b: &ComplexMatrix) -> Result<f64> {
    let n = numerics::norms(&(sqrt_a * sqrt_b))?.spectral;
    Ok(n * n)
}

fn sqrt_element(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    numerics::apply_spectral_function(a, f64::sqrt, numerics::Domain::NonNegative, ZERO_CUTOFF)
}

/// `1 + (Σ_{s≠t} ‖√A^{(s)}_{j(s)} √A^{(t)}_{j(t)}‖_∞²)^{1/2}`, an upper bound
/// on `Σ_t p_{j(t)}(𝒜_t|ρ)`.
pub fn mim6_rhs(povms: &[Povm], indices: &[usize]) -> Result<f64> {
    if povms.len() != indices.len() {
        return Err(Error::InvalidParameter(format!(
            "{} measurements but {} indices",
            povms.len(),
            indices.len()
        )));
    }
    let Some(first) = povms.first() else {
        return Ok(1.0);
    };
    let mut roots = Vec::with_capacity(povms.len());
    for (t, (povm, &j)) in povms.iter().zip(indices).enumerate() {
        if povm.dim != first.dim {
            return Err(Error::DimensionMismatch {
                expected: first.dim,
                found: povm.dim,
            });
        }
        let a = povm.elements.get(j).ok_or(Error::BadIndex {
            measurement: t,
            index: j,
            outcomes: povm.len(),
        })?;
        roots.push(sqrt_element(a)?);
    }
    let mut total = 0.0;
    for s in 0..roots.len() {
        for t in 0..roots.len() {
            if s != t {
                total += cross_term(&roots[s], &roots[t])?;
            }
        }
    }
    Ok(1.0 + total.sqrt())
}

/// Precomputed cross terms for the projective measurements of a MUB set,
/// so [`mim6_rhs`] can be evaluated per sample by table lookup.
#[derive(Clone, Debug)]
pub struct Mim6Table {
    d: usize,
    /// `terms[(s d + i) * n + (t d + j)]` for `n = M d` outcomes in total.
    terms: Vec<f64>,
    bases: usize,
}

impl Mim6Table {
    pub fn for_mub(set: &MubSet) -> Result<Self> {
        let d = set.dim();
        let mut roots = Vec::with_capacity(set.len() * d);
        for basis in set.bases() {
            let povm = Povm::projective(basis)?;
            for a in povm.elements() {
                roots.push(sqrt_element(a)?);
            }
        }
        let n = roots.len();
        let mut terms = vec![0.0; n * n];
        for a in 0..n {
            for b in a..n {
                let v = cross_term(&roots[a], &roots[b])?;
                terms[a * n + b] = v;
                terms[b * n + a] = v;
            }
        }
        Ok(Self {
            d,
            terms,
            bases: set.len(),
        })
    }

    /// [`mim6_rhs`] for the first `indices.len()` bases, `indices[t]`
    /// choosing an outcome of basis `t`.
    pub fn rhs(&self, indices: &[usize]) -> f64 {
        assert!(indices.len() <= self.bases);
        let n = self.bases * self.d;
        let mut total = 0.0;
        for (s, &i) in indices.iter().enumerate() {
            for (t, &j) in indices.iter().enumerate() {
                if s != t {
                    total += self.terms[(s * self.d + i) * n + t * self.d + j];
                }
            }
        }
        1.0 + total.sqrt()
    }
}

// --- reports ----------------------------------------------------------------

/// One evaluated inequality.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub bound_id: BoundId,
    pub d: usize,
    pub m: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - rhs` for lower bounds, `rhs - lhs` for upper bounds.
    pub slack: f64,
    pub holds: bool,
    pub tol: f64,
    pub purity: f64,
    pub entropy: f64,
    pub label: String,
}

pub fn check_lower_bound(
    bound_id: BoundId,
    lhs: f64,
    rhs: f64,
    tol: f64,
    params: &MubBoundParams,
    label: &str,
) -> BoundReport {
    report(bound_id, lhs, rhs, lhs - rhs, tol, params, label)
}

pub fn check_upper_bound(
    bound_id: BoundId,
    lhs: f64,
    rhs: f64,
    tol: f64,
    params: &MubBoundParams,
    label: &str,
) -> BoundReport {
    report(bound_id, lhs, rhs, rhs - lhs, tol, params, label)
}

/// Dispatches on [`BoundId::kind`].
pub fn check_bound(
    bound_id: BoundId,
    lhs: f64,
    rhs: f64,
    tol: f64,
    params: &MubBoundParams,
    label: &str,
) -> BoundReport {
    match bound_id.kind() {
        BoundKind::Lower => check_lower_bound(bound_id, lhs, rhs, tol, params, label),
        BoundKind::Upper => check_upper_bound(bound_id, lhs, rhs, tol, params, label),
    }
}

fn report(
    bound_id: BoundId,
    lhs: f64,
    rhs: f64,
    slack: f64,
    tol: f64,
    params: &MubBoundParams,
    label: &str,
) -> BoundReport {
    BoundReport {
        bound_id,
        d: params.d,
        m: params.m,
        lhs,
        rhs,
        slack,
        holds: slack >= -tol,
        tol,
        purity: params.purity,
        entropy: params.entropy,
        label: label.to_string(),
    }
}

/// Evaluates the right-hand side of a bound from `(d, M, purity, entropy)`.
/// `mim6` needs concrete measurements and is not available here; `ic_sum`
/// returns the state-dependent value.
pub fn eval_rhs(bound_id: BoundId, p: &MubBoundParams) -> Result<f64> {
    Ok(match bound_id {
        BoundId::Prop1 => prop1_rhs(p),
        BoundId::Prop1Pure => prop1_pure_rhs(p.d, p.m),
        BoundId::PatiMub => pati_mub_rhs(p.d, p.m),
        BoundId::Prop2 => prop2_rhs(p)?,
        BoundId::Prop2Pure => prop2_pure_rhs(p.d, p.m),
        BoundId::Prop2LpPure => prop2_pure_lp_rhs(p.d, p.m),
        BoundId::MaxprobSum => maxprob_sum_rhs(p.d, p.m),
        BoundId::IcSum => ic_sum_rhs(p.d, p.m, p.purity).state_dependent,
        BoundId::Prop3 => prop3_rhs(p.d, p.m),
        BoundId::Rmub12 => rmub12_rhs(p.d, p.m),
        BoundId::Mim6 => {
            return Err(Error::InvalidParameter(
                "mim6 depends on the measurements; use mim6_rhs".into(),
            ))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mub::construct_mub;
    use crate::numerics::real_diagonal;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn prop1_examples() {
        for d in 2..8 {
            for m in 1..=d + 1 {
                let p = MubBoundParams::maximally_mixed(d, m).unwrap();
                assert!(prop1_rhs(&p).abs() < 1e-14);
            }
        }
        let p = MubBoundParams::pure(2, 3).unwrap();
        assert!(close(prop1_rhs(&p), 1.5f64.ln(), 1e-15));
        assert!(close(prop1_rhs(&p), 0.4055, 1e-4));
        for d in 2..30 {
            let p = MubBoundParams::pure(d, d + 1).unwrap();
            let expected = ((d + 1) as f64).ln() - 2f64.ln();
            assert!(close(prop1_rhs(&p), expected, 1e-13));
            assert!(close(prop1_pure_rhs(d, d + 1), expected, 1e-13));
        }
    }

    #[test]
    fn prop1_full_set_form() {
        // with M = d + 1 the argument simplifies to (d + 1)/(tr ρ² + 1)
        for d in [2, 3, 5] {
            for purity in [1.0 / d as f64, 0.5, 0.8, 1.0] {
                let p = MubBoundParams::new(d, d + 1, purity, 0.1).unwrap();
                let expected = ((d as f64 + 1.0) / (purity + 1.0)).ln() - 0.1;
                assert!(close(prop1_rhs(&p), expected, 1e-13));
            }
        }
    }

    #[test]
    fn pati_examples() {
        assert!(close(pati_mub_rhs(2, 3), 2f64.ln() / 3.0, 1e-15));
        assert!(close(pati_mub_rhs(2, 3), 0.2310, 1e-4));
        for d in 2..20 {
            assert!(close(pati_mub_rhs(d, d + 1), (d as f64).ln() / (d as f64 + 1.0), 1e-15));
            assert!(close(pati_mub_rhs(d, 1), (d as f64).ln(), 1e-15));
        }
    }

    #[test]
    fn prop2_examples() {
        for d in 2..10 {
            for m in 1..=d + 1 {
                let p = MubBoundParams::maximally_mixed(d, m).unwrap();
                assert!(prop2_rhs(&p).unwrap().abs() < 1e-14);
                let pure = MubBoundParams::pure(d, m).unwrap();
                assert!(close(prop2_rhs(&pure).unwrap(), prop2_pure_rhs(d, m), 1e-14));
            }
        }
        let expected = 0.5 * (1.0 - 1.0 / 3f64.sqrt());
        assert!(close(prop2_pure_rhs(2, 3), expected, 1e-15));
        assert!(close(expected, 0.2113, 1e-4));
        assert_eq!(prop2_pure_rhs(7, 1), 0.0);
    }

    #[test]
    fn prop2_negative_radicand() {
        let p = MubBoundParams {
            d: 2,
            m: 3,
            purity: 2.0,
            entropy: 0.0,
        };
        assert!(matches!(prop2_rhs(&p), Err(Error::NegativeRadicand(_))));
    }

    #[test]
    fn lp_examples() {
        let expected = 1.0 - (1.0 + 3f64.sqrt()) / 3.0;
        assert!(close(prop2_pure_lp_rhs(2, 3), expected, 1e-15));
        assert!(close(expected, 0.0893, 1e-4));
        assert_eq!(prop2_pure_lp_rhs(5, 1), 0.0);
        // M = 2, large d: 1/2 against (d-1)/d (1 - 1/√2)
        let d = 1_000_000;
        assert!(close(prop2_pure_lp_rhs(d, 2), 0.5, 1e-3));
        assert!(close(prop2_pure_rhs(d, 2), 0.2929, 1e-4));
        assert!(prop2_pure_lp_rhs(d, 2) > prop2_pure_rhs(d, 2));
    }

    #[test]
    fn maxprob_examples() {
        assert!(close(maxprob_sum_rhs(2, 3), 1.0 + 3f64.sqrt(), 1e-15));
        assert!(close(maxprob_sum_rhs(2, 3), 2.7321, 1e-4));
        assert_eq!(maxprob_sum_rhs(9, 1), 1.0);
    }

    #[test]
    fn ic_sum_examples() {
        let r = ic_sum_rhs(4, 3, 0.25);
        assert!(close(r.state_dependent, 3.0 / 4.0, 1e-15));
        let r = ic_sum_rhs(5, 4, 1.0);
        assert_eq!(r.state_dependent, r.state_free);
        assert!(close(ic_sum_rhs(3, 4, 1.0).state_dependent, 2.0, 1e-15));
    }

    #[test]
    fn min_entropy_bound_examples() {
        assert!(prop3_rhs(7, 1).abs() < 1e-15);
        let expected = (3.0 * 2f64.sqrt() / (2f64.sqrt() + 6f64.sqrt())).ln();
        assert!(close(prop3_rhs(2, 3), expected, 1e-15));
        assert!(close(expected, 0.0936, 1e-4));
        let expected = (20.0 / (10.0 + 2f64.sqrt())).ln();
        assert!(close(prop3_rhs(100, 2), expected, 1e-14));
        assert!(close(expected, 0.5609, 1e-4));

        assert!(rmub12_rhs(7, 1).abs() < 1e-15);
        let expected = (2.0 * 3f64.sqrt() / (1.0 + 3f64.sqrt())).ln();
        assert!(close(rmub12_rhs(2, 3), expected, 1e-15));
        assert!(close(expected, 0.2374, 1e-4));
        let expected = (100.0 * 2f64.sqrt() / (99.0 + 2f64.sqrt())).ln();
        assert!(close(rmub12_rhs(100, 2), expected, 1e-14));
        assert!(close(expected, 0.3425, 1e-4));
        assert!(prop3_rhs(100, 2) > rmub12_rhs(100, 2));
    }

    #[test]
    fn monotonicity_in_m() {
        for d in 2..60 {
            for m in 1..3 * d {
                assert!(prop1_pure_rhs(d, m + 1) > prop1_pure_rhs(d, m));
                assert!(pati_mub_rhs(d, m + 1) < pati_mub_rhs(d, m));
            }
        }
    }

    #[test]
    fn full_set_comparison_inequality() {
        for d in 2..=50 {
            let df = d as f64;
            let lhs = (1.0 + (df - 1.0) / (df + 1.0).sqrt()) / df;
            let rhs = 1.0 / (df + 1.0) + 1.0 / (df + 1.0).sqrt();
            assert!(lhs < rhs);
            assert!(prop2_pure_rhs(d, d + 1) > prop2_pure_lp_rhs(d, d + 1));
        }
    }

    #[test]
    fn mim6_on_mub_projectors() {
        for d in [2, 3, 5] {
            let set = construct_mub(d).unwrap();
            let povms: Vec<Povm> = set.bases().iter().map(|b| Povm::projective(b).unwrap()).collect();
            let table = Mim6Table::for_mub(&set).unwrap();
            for m in 2..=d + 1 {
                let indices: Vec<usize> = (0..m).map(|t| (t * 7 + 1) % d).collect();
                let general = mim6_rhs(&povms[..m], &indices).unwrap();
                assert!(close(general, maxprob_sum_rhs(d, m), 1e-10));
                assert!(close(table.rhs(&indices), general, 1e-12));
            }
        }
    }

    #[test]
    fn mim6_degenerate_cases() {
        let z = Povm::projective(&crate::mub::Basis::computational(3)).unwrap();
        let same = mim6_rhs(&[z.clone(), z.clone()], &[1, 1]).unwrap();
        assert!(close(same, 1.0 + 2f64.sqrt(), 1e-12));
        let orth = mim6_rhs(&[z.clone(), z.clone()], &[0, 2]).unwrap();
        assert!(close(orth, 1.0, 1e-12));
        assert!(matches!(
            mim6_rhs(&[z.clone(), z.clone()], &[0, 3]),
            Err(Error::BadIndex { .. })
        ));
        let q = Povm::projective(&crate::mub::Basis::computational(2)).unwrap();
        assert!(matches!(
            mim6_rhs(&[z, q], &[0, 0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn povm_validation() {
        let half = real_diagonal(&[0.5, 0.5]);
        assert!(Povm::new(vec![half.clone(), half.clone()]).is_ok());
        assert!(Povm::new(vec![half.clone()]).is_err());
        let neg = real_diagonal(&[1.5, -0.5]);
        assert!(Povm::new(vec![neg, real_diagonal(&[-0.5, 1.5])]).is_err());
    }

    #[test]
    fn check_semantics() {
        let p = MubBoundParams::pure(2, 3).unwrap();
        let r = check_lower_bound(BoundId::Prop1, 0.5, 0.4, 1e-9, &p, "x");
        assert!(r.holds && close(r.slack, 0.1, 1e-15));
        let r = check_lower_bound(BoundId::Prop1, 0.4, 0.4 + 1e-12, 1e-9, &p, "x");
        assert!(r.holds);
        let r = check_lower_bound(BoundId::Prop1, 0.3, 0.4, 1e-9, &p, "x");
        assert!(!r.holds && close(r.slack, -0.1, 1e-15));
        let r = check_upper_bound(BoundId::IcSum, 1.0, 1.5, 1e-9, &p, "x");
        assert!(r.holds && close(r.slack, 0.5, 1e-15));
    }

    #[test]
    fn ids_round_trip() {
        for id in BoundId::ALL {
            assert_eq!(id.as_str().parse::<BoundId>().unwrap(), id);
        }
        assert!("prop4".parse::<BoundId>().is_err());
    }

    #[test]
    fn params_validation() {
        assert!(MubBoundParams::new(1, 1, 1.0, 0.0).is_err());
        assert!(MubBoundParams::new(2, 0, 1.0, 0.0).is_err());
        assert!(MubBoundParams::new(2, 1, 0.4, 0.0).is_err());
        assert!(MubBoundParams::new(2, 1, 1.0, 1.0).is_err());
    }
}
