//! Quantum states and reproducible random sampling.
//!
//! Every random draw is a pure function of `(dimension, seed)`. Harness
//! code derives the per-trial seed from a master seed and the trial's
//! coordinates with [`derive_seed`], so parallel and serial runs see the
//! same ensemble.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::numerics::{
    self, check_square, hermitian_eig, ComplexMatrix, ComplexVector, Spectrum, HERMITICITY_TOL,
};

/// Eigenvalues may dip this far below zero before a matrix is rejected.
pub const PSD_TOL: f64 = 1e-10;
/// Allowed deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-10;
/// Allowed deviation of a pure state's norm from one.
pub const NORM_TOL: f64 = 1e-12;

/// A pure state `|ψ⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: ComplexVector,
}

impl PureState {
    pub fn new(amplitudes: ComplexVector) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyDimension);
        }
        let norm = amplitudes.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "pure state has norm {norm}, expected 1"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(amplitudes: ComplexVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Self::new(amplitudes.unscale(norm))
    }

    pub fn basis_state(d: usize, index: usize) -> Self {
        let mut v = ComplexVector::zeros(d);
        v[index] = Complex64::new(1.0, 0.0);
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    /// `|ψ⟩⟨ψ|`
    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }
}

/// A density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates and symmetrizes `matrix`.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        check_square(&matrix)?;
        let spectrum = hermitian_eig(&matrix, HERMITICITY_TOL)?;
        let min = spectrum.eigenvalues[0];
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        let trace = numerics::trace_re(&matrix);
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {trace}, expected 1")));
        }
        Ok(Self {
            matrix: numerics::symmetrize(&matrix),
        })
    }

    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    /// `I/d`
    pub fn maximally_mixed(d: usize) -> Self {
        let w = 1.0 / d as f64;
        Self {
            matrix: ComplexMatrix::identity(d, d).scale(w),
        }
    }

    /// Diagonal state in the computational basis.
    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        Self::new(numerics::real_diagonal(weights))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> Spectrum {
        hermitian_eig(&self.matrix, HERMITICITY_TOL).expect("density matrix is Hermitian")
    }

    /// `U ρ U†`
    pub fn conjugated(&self, u: &ComplexMatrix) -> Self {
        Self {
            matrix: numerics::symmetrize(&(u * &self.matrix * u.adjoint())),
        }
    }

    /// `tr ρ²`
    pub fn purity(&self) -> f64 {
        purity(self)
    }

    pub fn von_neumann_entropy(&self) -> f64 {
        von_neumann_entropy(self)
    }
}

impl From<&PureState> for DensityMatrix {
    fn from(psi: &PureState) -> Self {
        psi.to_density()
    }
}

/// `tr ρ²`, computed as the squared Frobenius norm of the Hermitian `ρ`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix.iter().map(|z| z.norm_sqr()).sum()
}

/// `-Σ λ ln λ` with `0 ln 0 = 0`, natural logarithm.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.spectrum())
}

pub(crate) fn entropy_of_spectrum(spectrum: &Spectrum) -> f64 {
    spectrum
        .eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.ln())
        .sum::<f64>()
        .max(0.0)
}

// --- sampling ---------------------------------------------------------------

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent 64-bit seed from a master seed and coordinates.
pub fn derive_seed(master: u64, coordinates: &[u64]) -> u64 {
    coordinates
        .iter()
        .fold(mix64(master), |acc, &c| mix64(acc ^ mix64(c)))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

fn ginibre(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    // column-major fill keeps the draw order independent of nalgebra internals
    let mut g = ComplexMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            g[(i, j)] = complex_gaussian(rng);
        }
    }
    g
}

/// Haar-random pure state.
pub fn sample_pure(d: usize, seed: u64) -> Result<PureState> {
    if d < 2 {
        return Err(Error::BadDimension(d));
    }
    let mut rng = rng_from_seed(seed);
    let v = DVector::from_iterator(d, (0..d).map(|_| complex_gaussian(&mut rng)));
    PureState::normalized(v)
}

/// Random density matrix `GG†/tr(GG†)` with `G` a `d × rank` Ginibre matrix.
pub fn sample_density(d: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if rank == 0 || rank > d {
        return Err(Error::BadRank { rank, dim: d });
    }
    let mut rng = rng_from_seed(seed);
    let g = ginibre(d, rank, &mut rng);
    let gg = &g * g.adjoint();
    let tr = numerics::trace_re(&gg);
    Ok(DensityMatrix::new_unchecked(numerics::symmetrize(&gg.unscale(tr))))
}

/// Haar-random unitary from the QR factorization of a Ginibre matrix, with
/// the phases of `R`'s diagonal moved into `Q`.
pub fn sample_unitary(d: usize, seed: u64) -> Result<ComplexMatrix> {
    if d == 0 {
        return Err(Error::EmptyDimension);
    }
    let mut rng = rng_from_seed(seed);
    let z = ginibre(d, d, &mut rng);
    let qr = z.qr();
    let (mut q, r) = qr.unpack();
    for k in 0..d {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 {
            rkk / rkk.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for z in q.column_mut(k).iter_mut() {
            *z *= phase;
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{max_abs_diff, unitarity_deviation};

    #[test]
    fn purity_examples() {
        let psi = sample_pure(4, 3).unwrap();
        assert!((purity(&psi.to_density()) - 1.0).abs() < 1e-12);
        assert!((purity(&DensityMatrix::maximally_mixed(5)) - 0.2).abs() < 1e-15);
        let rho = DensityMatrix::diagonal(&[0.75, 0.25]).unwrap();
        assert!((purity(&rho) - 0.625).abs() < 1e-15);
    }

    #[test]
    fn entropy_examples() {
        let psi = sample_pure(3, 9).unwrap();
        assert!(von_neumann_entropy(&psi.to_density()).abs() < 1e-9);
        for d in 2..6 {
            let s = von_neumann_entropy(&DensityMatrix::maximally_mixed(d));
            assert!((s - (d as f64).ln()).abs() < 1e-12);
        }
        // -(3/4 ln 3/4 + 1/4 ln 1/4) evaluated independently
        let expected = -(0.75_f64 * 0.75_f64.ln() + 0.25_f64 * 0.25_f64.ln());
        let rho = DensityMatrix::diagonal(&[0.75, 0.25]).unwrap();
        let s = von_neumann_entropy(&rho);
        assert!((s - expected).abs() < 1e-12);
        assert!((s - 0.5623).abs() < 1e-4);
    }

    #[test]
    fn sampling_is_deterministic() {
        assert_eq!(sample_pure(4, 11).unwrap(), sample_pure(4, 11).unwrap());
        assert_ne!(sample_pure(4, 11).unwrap(), sample_pure(4, 12).unwrap());
        assert_eq!(
            sample_density(3, 2, 5).unwrap(),
            sample_density(3, 2, 5).unwrap()
        );
        assert_eq!(sample_unitary(3, 5).unwrap(), sample_unitary(3, 5).unwrap());
    }

    #[test]
    fn sampling_errors() {
        assert!(matches!(sample_pure(1, 0), Err(Error::BadDimension(1))));
        assert!(matches!(sample_density(3, 0, 0), Err(Error::BadRank { .. })));
        assert!(matches!(sample_density(3, 4, 0), Err(Error::BadRank { .. })));
    }

    #[test]
    fn sampled_density_properties() {
        for seed in 0..50 {
            let rho = sample_density(4, 1, seed).unwrap();
            assert!((purity(&rho) - 1.0).abs() < 1e-12);
            let rho = sample_density(5, 2, seed).unwrap();
            let spec = rho.spectrum();
            let above = spec.eigenvalues.iter().filter(|&&l| l > 1e-10).count();
            assert!(above <= 2);
            let rho = sample_density(4, 4, seed).unwrap();
            let spec = rho.spectrum();
            assert!(spec.eigenvalues[0] >= -1e-10);
            assert!((numerics::trace_re(rho.matrix()) - 1.0).abs() < 1e-12);
            let p = purity(&rho);
            assert!((0.25 - 1e-10..=1.0 + 1e-10).contains(&p));
        }
    }

    #[test]
    fn unitaries_are_unitary() {
        for seed in 0..20 {
            let u = sample_unitary(5, seed).unwrap();
            assert!(unitarity_deviation(&u) < 1e-10);
            assert!((u.determinant().norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn entropy_is_unitarily_invariant() {
        for seed in 0..20 {
            let rho = sample_density(4, 3, seed).unwrap();
            let u = sample_unitary(4, seed + 1000).unwrap();
            let rotated = rho.conjugated(&u);
            assert!((von_neumann_entropy(&rho) - von_neumann_entropy(&rotated)).abs() < 1e-9);
            assert!(max_abs_diff(rho.matrix(), rotated.matrix()) > 1e-6);
        }
    }

    #[test]
    fn density_validation() {
        let bad_trace = numerics::real_diagonal(&[0.5, 0.4]);
        assert!(DensityMatrix::new(bad_trace).is_err());
        let negative = numerics::real_diagonal(&[1.2, -0.2]);
        assert!(DensityMatrix::new(negative).is_err());
        assert!(PureState::new(DVector::from_element(2, Complex64::new(1.0, 0.0))).is_err());
    }

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(1, &[2, 3]);
        let b = derive_seed(1, &[3, 2]);
        let c = derive_seed(2, &[2, 3]);
        assert!(a != b && a != c && b != c);
        assert_eq!(a, derive_seed(1, &[2, 3]));
    }
}
