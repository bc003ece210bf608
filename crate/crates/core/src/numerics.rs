//! Dense complex-matrix primitives.
//!
//! Everything here works on small Hermitian operators (d up to a few dozen),
//! so singular values are taken from the eigenvalues of `X†X` rather than a
//! general SVD.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Default absolute max-entry tolerance for `A ≈ A†`.
pub const HERMITICITY_TOL: f64 = 1e-9;

/// Default cutoff, relative to the largest eigenvalue magnitude, below which
/// an eigenvalue is treated as a numerical zero.
pub const ZERO_CUTOFF: f64 = 1e-12;

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: DVector<f64>,
    /// Columns are the orthonormal eigenvectors, in eigenvalue order.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let d = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let fk = f(lambda);
            scaled.column_mut(k).scale_mut(fk);
        }
        let out = &scaled * self.eigenvectors.adjoint();
        debug_assert_eq!(out.nrows(), d);
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }

    /// Largest eigenvalue magnitude; zero for the zero matrix.
    pub fn scale(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Absolute zero threshold for a relative cutoff.
    pub fn zero_threshold(&self, relative_cutoff: f64) -> f64 {
        relative_cutoff * self.scale().max(f64::MIN_POSITIVE)
    }
}

pub fn check_square(a: &ComplexMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if a.nrows() == 0 {
        return Err(Error::EmptyDimension);
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(a.nrows())
}

/// Max-entry deviation `max |A - A†|`.
pub fn hermiticity_deviation(a: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut dev = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    dev
}

/// `(A + A†) / 2`.
pub fn symmetrize(a: &ComplexMatrix) -> ComplexMatrix {
    (a + a.adjoint()).scale(0.5)
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
///
/// The input is symmetrized before decomposition, so the tolerance only
/// guards against feeding in something that is not Hermitian at all.
pub fn hermitian_eig(a: &ComplexMatrix, hermiticity_tol: f64) -> Result<Spectrum> {
    check_square(a)?;
    let deviation = hermiticity_deviation(a);
    if deviation > hermiticity_tol {
        return Err(Error::NotHermitian {
            deviation,
            tol: hermiticity_tol,
        });
    }
    let eig = SymmetricEigen::new(symmetrize(a));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let eigenvalues = DVector::from_iterator(order.len(), order.iter().map(|&k| eig.eigenvalues[k]));
    let eigenvectors = ComplexMatrix::from_fn(a.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Where a spectral function is defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// Every real number.
    Real,
    /// `[0, ∞)`; eigenvalues in `[-cutoff, 0)` are clamped to zero.
    NonNegative,
    /// `(0, ∞)`; eigenvalues at or below the cutoff are rejected.
    Positive,
}

/// `V f(Λ) V†` for Hermitian `A`.
pub fn apply_spectral_function(
    a: &ComplexMatrix,
    f: impl Fn(f64) -> f64,
    domain: Domain,
    zero_cutoff: f64,
) -> Result<ComplexMatrix> {
    let spectrum = hermitian_eig(a, HERMITICITY_TOL)?;
    spectral_map(&spectrum, f, domain, zero_cutoff)
}

/// Same as [`apply_spectral_function`] on an already decomposed operator.
pub fn spectral_map(
    spectrum: &Spectrum,
    f: impl Fn(f64) -> f64,
    domain: Domain,
    zero_cutoff: f64,
) -> Result<ComplexMatrix> {
    let threshold = spectrum.zero_threshold(zero_cutoff);
    for &lambda in spectrum.eigenvalues.iter() {
        let bad = match domain {
            Domain::Real => false,
            Domain::NonNegative => lambda < -threshold,
            Domain::Positive => lambda <= threshold,
        };
        if bad {
            return Err(Error::Domain { eigenvalue: lambda });
        }
    }
    Ok(match domain {
        Domain::NonNegative => spectrum.map(|x| f(if x <= threshold { 0.0 } else { x })),
        _ => spectrum.map(f),
    })
}

/// Principal square root of a positive-semidefinite matrix.
pub fn psd_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    apply_spectral_function(a, f64::sqrt, Domain::NonNegative, ZERO_CUTOFF)
}

/// Thin singular value decomposition `X = U diag(σ) V†` of an `m × n`
/// matrix. Columns of `U` belonging to zero singular values are zero.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    /// `Σ_k u_k v_k†` over singular values above `threshold`.
    pub fn polar(&self, threshold: f64) -> ComplexMatrix {
        let mut p = ComplexMatrix::zeros(self.u.nrows(), self.v.nrows());
        for (k, &sigma) in self.singular_values.iter().enumerate() {
            if sigma > threshold {
                p += self.u.column(k) * self.v.column(k).adjoint();
            }
        }
        p
    }
}

/// One-sided Jacobi SVD: plane rotations applied on the right until the
/// columns are mutually orthogonal. Small singular values come out with
/// absolute error of order `ε‖X‖`, also for rank-deficient input.
pub fn svd(x: &ComplexMatrix) -> Result<Svd> {
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = x.ncols();
    let mut a = x.clone();
    let mut v = ComplexMatrix::identity(n, n);
    // columns this short are roundoff and need no further rotation
    let negligible = (f64::EPSILON * x.norm()).powi(2);
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.norm();
                if alpha <= negligible
                    || beta <= negligible
                    || g <= f64::EPSILON * (alpha * beta).sqrt()
                {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for m in [&mut a, &mut v] {
                    for r in 0..m.nrows() {
                        let ap = m[(r, p)];
                        let aq = m[(r, q)] * phase;
                        m[(r, p)] = ap * c - aq * s;
                        m[(r, q)] = ap * s + aq * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|k| a.column(k).norm()).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let mut u = ComplexMatrix::zeros(a.nrows(), n);
    let mut v_sorted = ComplexMatrix::zeros(n, n);
    for (k, &j) in order.iter().enumerate() {
        if norms[j] > 0.0 {
            u.set_column(k, &a.column(j).unscale(norms[j]));
        }
        v_sorted.set_column(k, &v.column(j));
    }
    Ok(Svd {
        u,
        singular_values: order.iter().map(|&j| norms[j]).collect(),
        v: v_sorted,
    })
}

/// Singular values, descending.
pub fn singular_values(x: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(svd(x)?.singular_values)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Norms {
    pub trace: f64,
    pub spectral: f64,
}

/// Trace norm (sum of singular values) and spectral norm (largest one).
pub fn norms(x: &ComplexMatrix) -> Result<Norms> {
    let sv = singular_values(x)?;
    Ok(Norms {
        trace: sv.iter().sum(),
        spectral: sv.first().copied().unwrap_or(0.0),
    })
}

/// Real part of the trace.
pub fn trace_re(a: &ComplexMatrix) -> f64 {
    a.diagonal().iter().map(|z| z.re).sum()
}

/// Largest entry modulus of `a - b`.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).norm()))
}

/// Largest entry modulus of `U†U - I`.
pub fn unitarity_deviation(u: &ComplexMatrix) -> f64 {
    let gram = u.adjoint() * u;
    max_abs_diff(&gram, &ComplexMatrix::identity(u.ncols(), u.ncols()))
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn real_diagonal(values: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(
        values.len(),
        values.iter().map(|&v| c(v, 0.0)),
    ))
}
