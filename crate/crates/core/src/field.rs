//! Arithmetic in GF(p^n) for odd primes p.
//!
//! Elements are polynomials over ℤ_p of degree < n reduced modulo a fixed
//! monic irreducible polynomial. The element with coefficients
//! `c_0, …, c_{n-1}` has index `Σ c_k p^k`; that index is also the
//! computational-basis label used by the MUB construction.

use std::fmt;

use crate::error::{Error, Result};

/// `Some((p, n))` if `q = p^n` for a prime `p` and `n ≥ 1`.
pub fn prime_power(q: usize) -> Option<(usize, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|k| q.is_multiple_of(*k))?;
    let mut rest = q;
    let mut n = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        n += 1;
    }
    (rest == 1).then_some((p, n))
}

pub fn is_prime(q: usize) -> bool {
    matches!(prime_power(q), Some((_, 1)))
}

/// A polynomial over ℤ_p, coefficients lowest degree first.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    coeffs: Vec<u32>,
}

impl FieldElement {
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs)
    }
}

#[derive(Clone, Debug)]
pub struct GaloisField {
    p: u32,
    n: usize,
    /// Monic, `n + 1` coefficients, lowest degree first.
    modulus: Vec<u32>,
}

impl GaloisField {
    /// GF(p^n) with the lexicographically smallest monic irreducible modulus.
    pub fn new(p: usize, n: usize) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidParameter(format!(
                "field characteristic must be an odd prime, got {p}"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("field degree must be positive".into()));
        }
        let p32 = p as u32;
        let modulus = smallest_irreducible(p32, n);
        Ok(Self {
            p: p32,
            n,
            modulus,
        })
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        (self.p as usize).pow(self.n as u32)
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn element(&self, index: usize) -> FieldElement {
        assert!(index < self.order(), "field index out of range");
        let p = self.p as usize;
        let mut rest = index;
        let coeffs = (0..self.n)
            .map(|_| {
                let c = (rest % p) as u32;
                rest /= p;
                c
            })
            .collect();
        FieldElement { coeffs }
    }

    pub fn index(&self, x: &FieldElement) -> usize {
        x.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| acc * self.p as usize + c as usize)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            coeffs: vec![0; self.n],
        }
    }

    pub fn one(&self) -> FieldElement {
        let mut e = self.zero();
        e.coeffs[0] = 1;
        e
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| (x + y) % self.p)
            .collect();
        FieldElement { coeffs }
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.p as u64;
        let mut prod = vec![0u64; 2 * self.n - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        // reduce x^k for k ≥ n using the monic modulus
        for k in (self.n..prod.len()).rev() {
            let lead = prod[k];
            if lead == 0 {
                continue;
            }
            prod[k] = 0;
            for (i, &m) in self.modulus[..self.n].iter().enumerate() {
                let idx = k - self.n + i;
                prod[idx] = (prod[idx] + p - (lead * m as u64) % p) % p;
            }
        }
        FieldElement {
            coeffs: prod[..self.n].iter().map(|&c| c as u32).collect(),
        }
    }

    pub fn pow(&self, a: &FieldElement, mut e: u64) -> FieldElement {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Field trace `x + x^p + … + x^{p^{n-1}}`, an element of ℤ_p.
    pub fn trace(&self, x: &FieldElement) -> u32 {
        let mut sum = self.zero();
        let mut term = x.clone();
        for _ in 0..self.n {
            sum = self.add(&sum, &term);
            term = self.pow(&term, self.p as u64);
        }
        debug_assert!(sum.coeffs[1..].iter().all(|&c| c == 0));
        sum.coeffs[0]
    }

    /// Multiplication table indexed by element index.
    pub fn mul_table(&self) -> Vec<Vec<usize>> {
        let q = self.order();
        let elems: Vec<_> = (0..q).map(|i| self.element(i)).collect();
        elems
            .iter()
            .map(|a| elems.iter().map(|b| self.index(&self.mul(a, b))).collect())
            .collect()
    }

    /// Trace of every element, indexed by element index.
    pub fn trace_table(&self) -> Vec<u32> {
        (0..self.order()).map(|i| self.trace(&self.element(i))).collect()
    }
}

/// Polynomial remainder over ℤ_p; `divisor` must be monic.
fn poly_rem(p: u32, dividend: &[u32], divisor: &[u32]) -> Vec<u32> {
    let mut rem: Vec<u64> = dividend.iter().map(|&c| c as u64).collect();
    let dd = divisor.len() - 1;
    let p = p as u64;
    if rem.len() <= dd {
        return dividend.to_vec();
    }
    for k in (dd..rem.len()).rev() {
        let lead = rem[k];
        if lead == 0 {
            continue;
        }
        for (i, &m) in divisor.iter().enumerate() {
            let idx = k - dd + i;
            rem[idx] = (rem[idx] + p - (lead * m as u64) % p) % p;
        }
    }
    rem[..dd].iter().map(|&c| c as u32).collect()
}

/// Monic polynomial of degree `deg` whose lower coefficients spell `code` in base p.
fn monic_from_code(p: u32, deg: usize, mut code: usize) -> Vec<u32> {
    let mut coeffs = Vec::with_capacity(deg + 1);
    for _ in 0..deg {
        coeffs.push((code % p as usize) as u32);
        code /= p as usize;
    }
    coeffs.push(1);
    coeffs
}

/// Irreducible iff no monic factor of degree 1..=deg/2 divides it.
pub fn is_irreducible(p: u32, poly: &[u32]) -> bool {
    let deg = poly.len() - 1;
    for fdeg in 1..=deg / 2 {
        let count = (p as usize).pow(fdeg as u32);
        for code in 0..count {
            let factor = monic_from_code(p, fdeg, code);
            if poly_rem(p, poly, &factor).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Smallest monic irreducible of degree `n` over ℤ_p, ordering candidates by
/// their coefficients from the highest non-leading degree down.
pub fn smallest_irreducible(p: u32, n: usize) -> Vec<u32> {
    let count = (p as usize).pow(n as u32);
    (0..count)
        .map(|code| monic_from_code(p, n, code))
        .find(|poly| is_irreducible(p, poly))
        .expect("an irreducible polynomial exists for every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_power_detection() {
        assert_eq!(prime_power(2), Some((2, 1)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(49), Some((7, 2)));
        assert_eq!(prime_power(27), Some((3, 3)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_power(12), None);
    }

    #[test]
    fn known_moduli() {
        // x^2 + 1 is the first irreducible quadratic over ℤ_3
        assert_eq!(smallest_irreducible(3, 2), vec![1, 0, 1]);
        // x^2 + 2 = (x - 1)(x + 1) over ℤ_3
        assert!(!is_irreducible(3, &[2, 0, 1]));
        // x^2 + 1 over ℤ_5 has roots ±2
        assert!(!is_irreducible(5, &[1, 0, 1]));
        assert_eq!(smallest_irreducible(5, 2), vec![2, 0, 1]);
    }

    fn check_field_axioms(f: &GaloisField) {
        let q = f.order();
        let table = f.mul_table();
        // every nonzero element has an inverse, so each row is a permutation
        for (a, row) in table.iter().enumerate().skip(1) {
            let mut seen = vec![false; q];
            for &x in row {
                seen[x] = true;
            }
            assert!(seen.iter().all(|&s| s), "row {a} is not a permutation");
        }
        // commutativity and distributivity on all triples
        for (a, row) in table.iter().enumerate() {
            for (b, &x) in row.iter().enumerate() {
                assert_eq!(x, table[b][a]);
                let (ea, eb) = (f.element(a), f.element(b));
                for c in 0..q.min(9) {
                    let ec = f.element(c);
                    let lhs = f.mul(&ea, &f.add(&eb, &ec));
                    let rhs = f.add(&f.mul(&ea, &eb), &f.mul(&ea, &ec));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn field_axioms_small_fields() {
        for (p, n) in [(3, 1), (3, 2), (5, 2), (3, 3), (7, 2)] {
            check_field_axioms(&GaloisField::new(p, n).unwrap());
        }
    }

    #[test]
    fn trace_is_linear_and_balanced() {
        for (p, n) in [(3, 2), (5, 2), (3, 3)] {
            let f = GaloisField::new(p, n).unwrap();
            let tr = f.trace_table();
            let q = f.order();
            // nonzero linear functional: every value hit q/p times
            let mut counts = vec![0usize; p];
            for &t in &tr {
                counts[t as usize] += 1;
            }
            assert!(counts.iter().all(|&c| c == q / p));
            for a in 0..q {
                for b in 0..q {
                    let s = f.index(&f.add(&f.element(a), &f.element(b)));
                    assert_eq!(tr[s], (tr[a] + tr[b]) % p as u32);
                }
            }
        }
    }

    #[test]
    fn index_round_trip() {
        let f = GaloisField::new(3, 3).unwrap();
        for i in 0..f.order() {
            assert_eq!(f.index(&f.element(i)), i);
        }
    }

    #[test]
    fn rejects_even_characteristic() {
        assert!(GaloisField::new(2, 2).is_err());
        assert!(GaloisField::new(9, 1).is_err());
    }
}
