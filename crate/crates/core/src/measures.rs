//! State functionals taken with respect to a basis: outcome probabilities,
//! Shannon / min-entropy, index of coincidence, relative entropy, the
//! relative entropy of coherence, fidelity and geometric coherence.
//!
//! All logarithms are natural.

use nalgebra::DVector;
use rand_distr::{Distribution, Exp1};

use num_complex::Complex64;
use crate::error::{Error, Result};
use crate::mub::Basis;
use crate::numerics::{self, ComplexMatrix, ZERO_CUTOFF};
use crate::states::{self, DensityMatrix, PureState};

/// Entries down to this value are treated as roundoff and clamped to zero.
pub const PROB_NEG_TOL: f64 = 1e-12;
/// Allowed deviation of a distribution's total from one.
pub const PROB_SUM_TOL: f64 = 1e-10;
/// Maximal imaginary residue of `⟨b|ρ|b⟩`.
pub const IMAG_TOL: f64 = 1e-10;
/// Weight of `ρ` outside `ran(ω)` above which `D(ρ‖ω) = ∞`.
pub const RANGE_TOL: f64 = 1e-8;
/// Slack allowed before a negative coherence value is reported as such.
pub const COHERENCE_CLAMP_TOL: f64 = 1e-9;

/// Outcome probabilities of a measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbDist(Vec<f64>);

impl ProbDist {
    /// Clamps roundoff negatives and renormalizes within tolerance.
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyDimension);
        }
        for p in probs.iter_mut() {
            if !p.is_finite() || *p < -PROB_NEG_TOL {
                return Err(Error::InvalidState(format!("invalid probability {p}")));
            }
            *p = p.max(0.0);
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidState(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(Self(probs))
    }

    pub fn uniform(d: usize) -> Self {
        Self(vec![1.0 / d as f64; d])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    /// Index of the largest probability (first one on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.0.iter().enumerate() {
            if p > self.0[best] {
                best = i;
            }
        }
        best
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `p_i = ⟨b_i|ρ|b_i⟩`
pub fn probabilities(basis: &Basis, rho: &DensityMatrix) -> Result<ProbDist> {
    check_dims(basis.dim(), rho.dim())?;
    let b = basis.matrix();
    let rb = rho.matrix() * b;
    let mut probs = Vec::with_capacity(b.ncols());
    for i in 0..b.ncols() {
        let z = b.column(i).dotc(&rb.column(i));
        if z.im.abs() > IMAG_TOL {
            return Err(Error::InvalidState(format!(
                "⟨b|ρ|b⟩ has imaginary part {:e}",
                z.im
            )));
        }
        probs.push(z.re);
    }
    ProbDist::new(probs)
}

/// `p_i = |⟨b_i|ψ⟩|²`
pub fn probabilities_pure(basis: &Basis, psi: &PureState) -> Result<ProbDist> {
    check_dims(basis.dim(), psi.dim())?;
    let amps = basis.matrix().adjoint() * psi.amplitudes();
    ProbDist::new(amps.iter().map(|z| z.norm_sqr()).collect())
}

/// `H₁ = -Σ p ln p`
pub fn shannon_entropy(p: &ProbDist) -> f64 {
    p.0.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.ln())
        .sum::<f64>()
        .max(0.0)
}

/// `H_∞ = -ln max p`
pub fn min_entropy(p: &ProbDist) -> f64 {
    (-p.max().ln()).max(0.0)
}

/// `J = Σ p²`
pub fn index_of_coincidence(p: &ProbDist) -> f64 {
    p.0.iter().map(|x| x * x).sum()
}

/// Quantum relative entropy `D(ρ‖ω)`; `f64::INFINITY` when `ran ρ ⊄ ran ω`.
pub fn relative_entropy(rho: &DensityMatrix, omega: &DensityMatrix) -> Result<f64> {
    check_dims(rho.dim(), omega.dim())?;
    let omega_spec = omega.spectrum();
    let threshold = omega_spec.zero_threshold(ZERO_CUTOFF);
    let v = &omega_spec.eigenvectors;
    let rv = rho.matrix() * v;

    let mut outside = 0.0;
    let mut cross = 0.0;
    for (k, &mu) in omega_spec.eigenvalues.iter().enumerate() {
        let weight = v.column(k).dotc(&rv.column(k)).re;
        if mu <= threshold {
            outside += weight;
        } else {
            cross += weight * mu.ln();
        }
    }
    if outside > RANGE_TOL {
        return Ok(f64::INFINITY);
    }
    let neg_entropy = -states::von_neumann_entropy(rho);
    Ok((neg_entropy - cross).max(0.0))
}

/// Relative entropy of coherence `C₁(ℬ|ρ) = H₁(ℬ|ρ) - S₁(ρ)`.
pub fn rel_entropy_coherence(basis: &Basis, rho: &DensityMatrix) -> Result<f64> {
    let p = probabilities(basis, rho)?;
    Ok(coherence_from_entropies(
        shannon_entropy(&p),
        states::von_neumann_entropy(rho),
    ))
}

/// `H₁ - S₁`, with roundoff negatives clamped.
pub fn coherence_from_entropies(shannon: f64, von_neumann: f64) -> f64 {
    let c = shannon - von_neumann;
    if (-COHERENCE_CLAMP_TOL..0.0).contains(&c) {
        0.0
    } else {
        c
    }
}

/// `F(ρ, ω) = ‖√ρ √ω‖₁²`, clamped to `[0, 1]`.
pub fn fidelity(rho: &DensityMatrix, omega: &DensityMatrix) -> Result<f64> {
    check_dims(rho.dim(), omega.dim())?;
    let x = numerics::psd_sqrt(rho.matrix())? * numerics::psd_sqrt(omega.matrix())?;
    let t = numerics::norms(&x)?.trace;
    Ok((t * t).clamp(0.0, 1.0))
}

/// `C_g(ℬ|ψ) = 1 - max |⟨b_i|ψ⟩|²`
pub fn geometric_coherence_pure(basis: &Basis, psi: &PureState) -> Result<f64> {
    let p = probabilities_pure(basis, psi)?;
    Ok((1.0 - p.max()).max(0.0))
}

/// Two-sided estimate of the geometric coherence of a mixed state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeomBounds {
    /// Lower estimate clamped at zero.
    pub lower: f64,
    pub upper: f64,
    /// Lower estimate before clamping; negative whenever `J > tr ρ²`.
    pub raw_lower: f64,
}

/// Lower estimate from the index of coincidence and purity, upper estimate
/// `1 - max_i p_i`.
pub fn geometric_coherence_bounds(basis: &Basis, rho: &DensityMatrix) -> Result<GeomBounds> {
    let p = probabilities(basis, rho)?;
    geom_bounds_from_stats(
        rho.dim(),
        index_of_coincidence(&p),
        states::purity(rho),
        p.max(),
    )
}

pub fn geom_bounds_from_stats(d: usize, ic: f64, purity: f64, pmax: f64) -> Result<GeomBounds> {
    if d < 2 {
        return Err(Error::BadDimension(d));
    }
    let df = d as f64;
    let radicand = 1.0 + df / (df - 1.0) * (ic - purity);
    if radicand < -1e-10 {
        return Err(Error::NegativeRadicand(radicand));
    }
    let raw_lower = (df - 1.0) / df * (1.0 - radicand.max(0.0).sqrt());
    Ok(GeomBounds {
        lower: raw_lower.max(0.0),
        upper: 1.0 - pmax,
        raw_lower,
    })
}

/// Settings for [`geometric_coherence_numeric`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericCgOptions {
    /// Uniform start plus `starts - 1` random starts.
    pub starts: usize,
    pub max_iters: usize,
    /// Stop when an iterate moves less than this.
    pub tol: f64,
    /// Seed for the random starts.
    pub seed: u64,
}

impl Default for NumericCgOptions {
    fn default() -> Self {
        Self {
            starts: 32,
            max_iters: 10_000,
            tol: 1e-10,
            seed: 0x6d75_6263_6f68,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericCg {
    /// `1 - F_best`; an upper estimate of `C_g` since the ascent may stop
    /// short of the maximal fidelity.
    pub value: f64,
    /// Best fidelity to an incoherent state found.
    pub fidelity: f64,
    /// Whether every start met the step tolerance within `max_iters`.
    pub converged: bool,
    pub iterations: usize,
}

/// `√F(ρ, δ)` for incoherent `δ = Σ y_i² |b_i⟩⟨b_i|`, with `ρ` given in the
/// basis coordinates `R = B†ρB`: `√F = tr √(D_y R D_y)`.
pub(crate) struct IncoherentFidelity {
    r: ComplexMatrix,
    s: ComplexMatrix,
}

impl IncoherentFidelity {
    pub(crate) fn new(basis: &Basis, rho: &DensityMatrix) -> Result<Self> {
        check_dims(basis.dim(), rho.dim())?;
        let b = basis.matrix();
        let r = numerics::symmetrize(&(b.adjoint() * rho.matrix() * b));
        let s = b.adjoint() * numerics::psd_sqrt(rho.matrix())?;
        Ok(Self { r, s })
    }

    /// `D_y S`, whose Gram matrix is `D_y R D_y`.
    fn factor(&self, y: &DVector<f64>) -> ComplexMatrix {
        let mut x = self.s.clone();
        for (i, mut row) in x.row_iter_mut().enumerate() {
            row *= Complex64::new(y[i], 0.0);
        }
        x
    }

    /// `√F` at amplitudes `y`: the trace norm of `D_y S`.
    pub(crate) fn root_fidelity(&self, y: &DVector<f64>) -> f64 {
        numerics::singular_values(&self.factor(y))
            .expect("factor is finite")
            .iter()
            .sum()
    }

    /// `√F` and its Euclidean gradient in `y`: `Re[(M^{-1/2} D_y R)_ii]`
    /// with `M = D_y R D_y`. Writing `D_y S = U Σ V†`, this is the diagonal
    /// of `U V† S†` restricted to the nonzero singular values.
    pub(crate) fn value_and_gradient(&self, y: &DVector<f64>) -> (f64, DVector<f64>) {
        let d = y.len();
        let svd = numerics::svd(&self.factor(y)).expect("factor is finite");
        let value: f64 = svd.singular_values.iter().sum();
        let largest = svd.singular_values.first().copied().unwrap_or(0.0);
        let polar = svd.polar(largest * 1e-12);
        let grad = DVector::from_fn(d, |i, _| {
            (0..d)
                .map(|k| (polar[(i, k)] * self.s[(i, k)].conj()).re)
                .sum()
        });
        (value, grad)
    }

    fn vertex_fidelity(&self) -> f64 {
        (0..self.r.nrows())
            .map(|i| self.r[(i, i)].re)
            .fold(0.0, f64::max)
    }
}

fn normalize_abs(mut y: DVector<f64>) -> DVector<f64> {
    y.iter_mut().for_each(|v| *v = v.abs());
    let n = y.norm();
    y / n
}

/// Riemannian gradient ascent of `√F` on the positive orthant of the unit
/// sphere (`δ_i = y_i²`), Barzilai–Borwein steps with Armijo backtracking.
fn ascend(
    obj: &IncoherentFidelity,
    start: DVector<f64>,
    opts: &NumericCgOptions,
) -> (f64, bool, usize) {
    let mut y = normalize_abs(start);
    let (mut value, grad) = obj.value_and_gradient(&y);
    let mut g = &grad - &y * grad.dot(&y);
    let mut step = 1.0;

    for iter in 0..opts.max_iters {
        let g_norm2 = g.norm_squared();
        if g_norm2.sqrt() < 1e-15 {
            return (value, true, iter);
        }
        let mut alpha = step;
        let mut accepted = None;
        for _ in 0..60 {
            let candidate = normalize_abs(&y + &g * alpha);
            let cand_value = obj.root_fidelity(&candidate);
            if cand_value >= value + 1e-4 * alpha * g_norm2 {
                accepted = Some(candidate);
                break;
            }
            alpha *= 0.5;
        }
        let Some(next) = accepted else {
            // no ascent direction left at machine precision
            return (value, true, iter);
        };
        let moved = (&next - &y).norm();
        let (next_value, next_grad) = obj.value_and_gradient(&next);
        let next_g = &next_grad - &next * next_grad.dot(&next);

        let s = &next - &y;
        let dg = &next_g - &g;
        let sy = s.dot(&dg);
        step = if sy < 0.0 {
            (s.norm_squared() / -sy).clamp(1e-8, 1e8)
        } else {
            (alpha * 2.0).min(1e8)
        };

        y = next;
        value = next_value.max(value);
        g = next_g;
        if moved < opts.tol {
            return (value, true, iter + 1);
        }
    }
    (value, false, opts.max_iters)
}

/// Numerical geometric coherence `1 - max_δ F(ρ, δ)` over incoherent `δ`.
///
/// Multi-start ascent from the uniform distribution and random Dirichlet
/// points. The vertices `δ = |b_i⟩⟨b_i|` are always candidates, so the
/// result never exceeds `1 - max_i p_i`.
pub fn geometric_coherence_numeric(
    basis: &Basis,
    rho: &DensityMatrix,
    opts: &NumericCgOptions,
) -> Result<NumericCg> {
    if opts.starts == 0 {
        return Err(Error::InvalidParameter("at least one start is required".into()));
    }
    let obj = IncoherentFidelity::new(basis, rho)?;
    let d = basis.dim();
    let mut rng = states::rng_from_seed(opts.seed);

    let mut best_root = obj.vertex_fidelity().max(0.0).sqrt();
    let mut converged = true;
    let mut iterations = 0;
    for s in 0..opts.starts {
        let start = if s == 0 {
            DVector::from_element(d, 1.0)
        } else {
            // Dirichlet(1, …, 1) weights, as amplitudes
            DVector::from_fn(d, |_, _| {
                let e: f64 = Exp1.sample(&mut rng);
                e.sqrt() + f64::MIN_POSITIVE
            })
        };
        let (value, ok, iters) = ascend(&obj, start, opts);
        best_root = best_root.max(value);
        converged &= ok;
        iterations += iters;
    }
    let fidelity = (best_root * best_root).clamp(0.0, 1.0);
    Ok(NumericCg {
        value: (1.0 - fidelity).max(0.0),
        fidelity,
        converged,
        iterations,
    })
}

/// `ρ_diag` as a density matrix: `Σ p_i |b_i⟩⟨b_i|`.
pub fn dephased(basis: &Basis, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let p = probabilities(basis, rho)?;
    incoherent_state(basis, &p)
}

/// `Σ w_i |b_i⟩⟨b_i|`.
pub fn incoherent_state(basis: &Basis, weights: &ProbDist) -> Result<DensityMatrix> {
    check_dims(basis.dim(), weights.len())?;
    let b = basis.matrix();
    let m = b * numerics::real_diagonal(weights.as_slice()) * b.adjoint();
    DensityMatrix::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mub::construct_mub;
    use crate::numerics::c;
    use crate::states::{sample_density, sample_pure, sample_unitary};
    use rand::Rng;

    fn plus() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(DVector::from_vec(vec![c(s, 0.0), c(s, 0.0)])).unwrap()
    }

    #[test]
    fn probability_examples() {
        let z = Basis::computational(2);
        let rho = DensityMatrix::diagonal(&[0.7, 0.3]).unwrap();
        let p = probabilities(&z, &rho).unwrap();
        assert!((p.as_slice()[0] - 0.7).abs() < 1e-15 && (p.as_slice()[1] - 0.3).abs() < 1e-15);
        let p = probabilities(&z, &plus().to_density()).unwrap();
        assert!((p.as_slice()[0] - 0.5).abs() < 1e-15);
        let set = construct_mub(5).unwrap();
        for seed in 0..10 {
            let rho = sample_density(5, 3, seed).unwrap();
            for b in set.bases() {
                let total: f64 = probabilities(b, &rho).unwrap().as_slice().iter().sum();
                assert!((total - 1.0).abs() < 1e-10);
            }
        }
        assert!(matches!(
            probabilities(&Basis::computational(3), &rho),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn prob_dist_validation() {
        let p = ProbDist::new(vec![1.0 + 5e-11, -5e-13]).unwrap();
        assert_eq!(p.as_slice()[1], 0.0);
        assert!((p.as_slice()[0] - 1.0).abs() < 1e-15);
        assert!(ProbDist::new(vec![0.5, 0.4]).is_err());
        assert!(ProbDist::new(vec![1.1, -0.1]).is_err());
    }

    #[test]
    fn entropy_examples() {
        let ln = |x: f64| x.ln();
        for d in 2..7 {
            let u = ProbDist::uniform(d);
            assert!((shannon_entropy(&u) - ln(d as f64)).abs() < 1e-14);
            assert!((min_entropy(&u) - ln(d as f64)).abs() < 1e-14);
            assert!((index_of_coincidence(&u) - 1.0 / d as f64).abs() < 1e-15);
        }
        let point = ProbDist::new(vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(shannon_entropy(&point), 0.0);
        assert_eq!(min_entropy(&point), 0.0);
        assert_eq!(index_of_coincidence(&point), 1.0);

        let p = ProbDist::new(vec![0.75, 0.25]).unwrap();
        let expected = -(0.75 * ln(0.75) + 0.25 * ln(0.25));
        assert!((shannon_entropy(&p) - expected).abs() < 1e-15);
        assert!((shannon_entropy(&p) - 0.5623).abs() < 1e-4);
        assert!((min_entropy(&p) - ln(4.0 / 3.0)).abs() < 1e-15);
        assert!((min_entropy(&p) - 0.2877).abs() < 1e-4);
        assert!((index_of_coincidence(&p) - 0.625).abs() < 1e-15);
    }

    #[test]
    fn relative_entropy_examples() {
        for seed in 0..10 {
            let rho = sample_density(3, 3, seed).unwrap();
            assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-9);
            let mixed = DensityMatrix::maximally_mixed(3);
            let expected = 3f64.ln() - states::von_neumann_entropy(&rho);
            assert!((relative_entropy(&rho, &mixed).unwrap() - expected).abs() < 1e-9);
        }
        let zero = PureState::basis_state(2, 0).to_density();
        let one = PureState::basis_state(2, 1).to_density();
        assert_eq!(relative_entropy(&zero, &one).unwrap(), f64::INFINITY);
        // rank-deficient ρ inside the range of ω stays finite
        let r = relative_entropy(&zero, &DensityMatrix::maximally_mixed(2)).unwrap();
        assert!((r - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn coherence_examples() {
        let z = Basis::computational(3);
        let rho = DensityMatrix::diagonal(&[0.2, 0.3, 0.5]).unwrap();
        assert_eq!(rel_entropy_coherence(&z, &rho).unwrap(), 0.0);
        let c1 = rel_entropy_coherence(&Basis::computational(2), &plus().to_density()).unwrap();
        assert!((c1 - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn dephasing_minimizes_relative_entropy() {
        // random-search oracle for min over incoherent δ
        let mut rng = states::rng_from_seed(99);
        let set = construct_mub(3).unwrap();
        for seed in 0..5 {
            let rho = sample_density(3, 3, seed).unwrap();
            for basis in set.bases() {
                let at_diag = relative_entropy(&rho, &dephased(basis, &rho).unwrap()).unwrap();
                let c1 = rel_entropy_coherence(basis, &rho).unwrap();
                assert!((at_diag - c1).abs() < 1e-9);
                for _ in 0..100 {
                    let w: Vec<f64> = (0..3).map(|_| rng.random::<f64>() + 1e-3).collect();
                    let total: f64 = w.iter().sum();
                    let w = ProbDist::new(w.iter().map(|x| x / total).collect()).unwrap();
                    let delta = incoherent_state(basis, &w).unwrap();
                    assert!(at_diag <= relative_entropy(&rho, &delta).unwrap() + 1e-12);
                }
            }
        }
    }

    #[test]
    fn fidelity_examples() {
        for seed in 0..10 {
            let rho = sample_density(3, 2, seed).unwrap();
            assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-9);
            let omega = sample_density(3, 3, seed + 50).unwrap();
            let f1 = fidelity(&rho, &omega).unwrap();
            let f2 = fidelity(&omega, &rho).unwrap();
            assert!((f1 - f2).abs() < 1e-9);
        }
        let zero = PureState::basis_state(2, 0).to_density();
        let one = PureState::basis_state(2, 1).to_density();
        assert!(fidelity(&zero, &one).unwrap() < 1e-10);
        let f = fidelity(&zero, &DensityMatrix::maximally_mixed(2)).unwrap();
        assert!((f - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fidelity_with_pure_state_is_expectation() {
        for seed in 0..10 {
            let psi = sample_pure(4, seed).unwrap();
            let omega = sample_density(4, 4, seed + 1).unwrap();
            let expected = psi
                .amplitudes()
                .dotc(&(omega.matrix() * psi.amplitudes()))
                .re;
            assert!((fidelity(&psi.to_density(), &omega).unwrap() - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn geometric_pure_examples() {
        let z = Basis::computational(3);
        assert_eq!(geometric_coherence_pure(&z, &PureState::basis_state(3, 1)).unwrap(), 0.0);
        let g = geometric_coherence_pure(&Basis::computational(2), &plus()).unwrap();
        assert!((g - 0.5).abs() < 1e-15);
        for d in 2..7 {
            let amp = c(1.0 / (d as f64).sqrt(), 0.0);
            let psi = PureState::normalized(DVector::from_element(d, amp)).unwrap();
            let g = geometric_coherence_pure(&Basis::computational(d), &psi).unwrap();
            assert!((g - (1.0 - 1.0 / d as f64)).abs() < 1e-14);
        }
    }

    #[test]
    fn geometric_bounds_examples() {
        let set = construct_mub(3).unwrap();
        for seed in 0..20 {
            let psi = sample_pure(3, seed).unwrap();
            for b in set.bases() {
                let bounds = geometric_coherence_bounds(b, &psi.to_density()).unwrap();
                let exact = geometric_coherence_pure(b, &psi).unwrap();
                assert!((bounds.upper - exact).abs() < 1e-12);
                assert!(bounds.lower <= exact + 1e-10);
            }
            let rho = sample_density(3, 3, seed).unwrap();
            for b in set.bases() {
                let bounds = geometric_coherence_bounds(b, &rho).unwrap();
                assert!(bounds.lower <= bounds.upper + 1e-10);
            }
        }
        let mixed = DensityMatrix::maximally_mixed(4);
        let b = geometric_coherence_bounds(&Basis::computational(4), &mixed).unwrap();
        assert!(b.lower.abs() < 1e-15);
        assert!((b.upper - 0.75).abs() < 1e-15);
    }

    #[test]
    fn negative_raw_lower_is_clamped() {
        // J > tr ρ² pushes the radicand above one
        let b = geom_bounds_from_stats(3, 0.6, 0.5, 0.7).unwrap();
        assert!(b.raw_lower < 0.0);
        assert_eq!(b.lower, 0.0);
        assert!(matches!(
            geom_bounds_from_stats(3, 0.0, 1.0, 0.5),
            Err(Error::NegativeRadicand(_))
        ));
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let set = construct_mub(3).unwrap();
        let mut rng = states::rng_from_seed(5);
        for seed in 0..5 {
            let rho = sample_density(3, 3, seed).unwrap();
            let obj = IncoherentFidelity::new(&set.bases()[2], &rho).unwrap();
            let y = DVector::from_fn(3, |_, _| rng.random::<f64>() + 0.1);
            let (_, grad) = obj.value_and_gradient(&y);
            let h = 1e-6;
            for i in 0..3 {
                let mut up = y.clone();
                let mut down = y.clone();
                up[i] += h;
                down[i] -= h;
                let fd = (obj.root_fidelity(&up) - obj.root_fidelity(&down)) / (2.0 * h);
                assert!((fd - grad[i]).abs() < 1e-7, "i={i}: fd {fd} vs {}", grad[i]);
            }
        }
    }

    #[test]
    fn root_fidelity_matches_general_fidelity() {
        let set = construct_mub(3).unwrap();
        let mut rng = states::rng_from_seed(8);
        for seed in 0..5 {
            let rho = sample_density(3, 2, seed).unwrap();
            let basis = &set.bases()[1];
            let obj = IncoherentFidelity::new(basis, &rho).unwrap();
            let w: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
            let total: f64 = w.iter().sum();
            let w: Vec<f64> = w.iter().map(|x| x / total).collect();
            let y = DVector::from_iterator(3, w.iter().map(|x| x.sqrt()));
            let delta = incoherent_state(basis, &ProbDist::new(w).unwrap()).unwrap();
            let f = fidelity(&rho, &delta).unwrap();
            assert!((obj.root_fidelity(&y).powi(2) - f).abs() < 1e-9);
        }
    }

    #[test]
    fn numeric_diagonal_state_is_incoherent() {
        let rho = DensityMatrix::diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let r = geometric_coherence_numeric(&Basis::computational(3), &rho, &NumericCgOptions::default())
            .unwrap();
        assert!(r.value < 1e-8, "{r:?}");
    }

    #[test]
    fn numeric_matches_pure_closed_form() {
        let opts = NumericCgOptions {
            starts: 4,
            ..Default::default()
        };
        for d in [2, 3] {
            let set = construct_mub(d).unwrap();
            for seed in 0..20 {
                let psi = sample_pure(d, seed).unwrap();
                for b in set.bases() {
                    let exact = geometric_coherence_pure(b, &psi).unwrap();
                    let num = geometric_coherence_numeric(b, &psi.to_density(), &opts).unwrap();
                    assert!((num.value - exact).abs() < 1e-6);
                }
            }
        }
    }

    /// Brute-force maximization of F(ρ, diag(x, 1-x)) on a fine grid with
    /// golden-section refinement.
    fn qubit_max_fidelity(basis: &Basis, rho: &DensityMatrix) -> f64 {
        let f = |x: f64| {
            let w = ProbDist::new(vec![x, 1.0 - x]).unwrap();
            fidelity(rho, &incoherent_state(basis, &w).unwrap()).unwrap()
        };
        let n = 2000;
        let (mut best_x, mut best) = (0.0, f(0.0));
        for k in 1..=n {
            let x = k as f64 / n as f64;
            let v = f(x);
            if v > best {
                best = v;
                best_x = x;
            }
        }
        let (mut a, mut b) = ((best_x - 1.0 / n as f64).max(0.0), (best_x + 1.0 / n as f64).min(1.0));
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..100 {
            let c1 = b - phi * (b - a);
            let c2 = a + phi * (b - a);
            if f(c1) < f(c2) {
                a = c1;
            } else {
                b = c2;
            }
        }
        best.max(f(0.5 * (a + b)))
    }

    #[test]
    fn numeric_matches_qubit_brute_force() {
        let set = construct_mub(2).unwrap();
        let opts = NumericCgOptions {
            starts: 4,
            ..Default::default()
        };
        for seed in 0..10 {
            let rho = sample_density(2, 2, seed).unwrap();
            for b in set.bases() {
                let brute = 1.0 - qubit_max_fidelity(b, &rho);
                let num = geometric_coherence_numeric(b, &rho, &opts).unwrap();
                assert!((num.value - brute).abs() < 1e-8, "{} vs {brute}", num.value);
                assert!(num.converged);
            }
        }
    }

    #[test]
    fn numeric_within_sandwich() {
        let set = construct_mub(3).unwrap();
        let opts = NumericCgOptions {
            starts: 4,
            ..Default::default()
        };
        for seed in 0..10 {
            let rho = sample_density(3, 3, seed).unwrap();
            for b in set.bases() {
                let g = geometric_coherence_bounds(b, &rho).unwrap();
                let num = geometric_coherence_numeric(b, &rho, &opts).unwrap();
                assert!(num.value >= g.lower - 1e-7 && num.value <= g.upper + 1e-7);
            }
        }
    }

    #[test]
    fn coherence_is_jointly_covariant() {
        let set = construct_mub(3).unwrap();
        for seed in 0..10 {
            let u = sample_unitary(3, seed + 7).unwrap();
            let rho = sample_density(3, 3, seed).unwrap();
            let psi = sample_pure(3, seed).unwrap();
            let psi_rot =
                PureState::normalized(&u * psi.amplitudes()).unwrap();
            for b in set.bases() {
                let br = b.rotated(&u);
                let c = rel_entropy_coherence(b, &rho).unwrap();
                let cr = rel_entropy_coherence(&br, &rho.conjugated(&u)).unwrap();
                assert!((c - cr).abs() < 1e-8);
                let g = geometric_coherence_pure(b, &psi).unwrap();
                let gr = geometric_coherence_pure(&br, &psi_rot).unwrap();
                assert!((g - gr).abs() < 1e-8);
            }
        }
    }
}
