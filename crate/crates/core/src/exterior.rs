//! Dense exterior powers `∧^k W`.
//!
//! Basis: `e_I` for strictly increasing `I ⊂ {0..n}` in lexicographic order. Signs:
//! `e_I ∧ e_J = (−1)^{#{(a, b) ∈ I × J : a > b}} e_{I ∪ J}`, and the Leibniz derivative
//! (contraction with the dual basis vector) is `∂e_I/∂x_i = (−1)^{pos_I(i)} e_{I ∖ i}`,
//! where `pos_I(i)` is the zero-based position of `i` in `I`. The subset basis is
//! orthonormal for the Gram-determinant form, so all weights are 1.

use crate::critical::GeneratorSet;
use crate::error::{Error, Result};
use crate::frobenius::{bilinear_dot, FrobeniusSpace};
use crate::linalg;
use crate::tensor::{binomial, C64, ONE, ZERO};

/// Bitmask subsets of `{0..dim}` of size `k`, in lex order.
pub fn subsets(dim: usize, k: usize) -> Vec<u64> {
    fn rec(start: usize, dim: usize, left: usize, mask: u64, out: &mut Vec<u64>) {
        if left == 0 {
            out.push(mask);
            return;
        }
        for i in start..=dim - left {
            rec(i + 1, dim, left - 1, mask | (1 << i), out);
        }
    }
    let mut out = Vec::with_capacity(binomial(dim, k));
    if k <= dim {
        rec(0, dim, k, 0, &mut out);
    }
    out
}

/// Lex position of a `k`-subset of `{0..dim}`.
pub fn subset_rank(mask: u64, dim: usize) -> usize {
    let k = mask.count_ones() as usize;
    let mut rank = 0;
    let mut prev = 0;
    for (pos, i) in members(mask).enumerate() {
        for v in prev..i {
            rank += binomial(dim - 1 - v, k - 1 - pos);
        }
        prev = i + 1;
    }
    rank
}

fn members(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask & (1 << i) != 0)
}

fn shuffle_sign(left: u64, right: u64) -> f64 {
    let inversions: u32 = members(right).map(|b| (left >> (b + 1)).count_ones()).sum();
    if inversions.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlternatingTensor {
    dim: usize,
    k: usize,
    coeffs: Vec<C64>,
}

impl AlternatingTensor {
    /// `k = 0` (scalars) is accepted so that derivatives of vectors stay in the type.
    pub fn new(dim: usize, k: usize, coeffs: Vec<C64>) -> Result<Self> {
        if dim == 0 || dim > 63 || k > dim {
            return Err(Error::InvalidShape(format!("∧^{k} C^{dim}")));
        }
        let expected = binomial(dim, k);
        if coeffs.len() != expected {
            return Err(Error::CoefficientLength {
                expected,
                got: coeffs.len(),
            });
        }
        Ok(Self { dim, k, coeffs })
    }

    pub fn zeros(dim: usize, k: usize) -> Self {
        Self {
            dim,
            k,
            coeffs: vec![ZERO; binomial(dim, k)],
        }
    }

    /// Basis vector `e_j` of `W = ∧^1 W`.
    pub fn basis_vector(dim: usize, j: usize) -> Self {
        let mut t = Self::zeros(dim, 1);
        t.coeffs[j] = ONE;
        t
    }

    pub fn from_vector(v: &[C64]) -> Self {
        Self {
            dim: v.len(),
            k: 1,
            coeffs: v.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coefficient of `e_I` for an increasing index list.
    pub fn coeff(&self, subset: &[usize]) -> C64 {
        let mask = subset.iter().fold(0u64, |m, &i| m | (1 << i));
        self.coeffs[subset_rank(mask, self.dim)]
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.k != other.k {
            return Err(Error::ShapeMismatch(format!(
                "∧^{} C^{} vs ∧^{} C^{}",
                self.k, self.dim, other.k, other.dim
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            dim: self.dim,
            k: self.k,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            dim: self.dim,
            k: self.k,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            k: self.k,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::ShapeMismatch(format!(
                "ambient C^{} vs C^{}",
                self.dim, other.dim
            )));
        }
        if self.k + other.k > self.dim {
            return Err(Error::DegreeOverflow {
                a: self.k,
                b: other.k,
                dim: self.dim,
            });
        }
        let left = subsets(self.dim, self.k);
        let right = subsets(self.dim, other.k);
        let mut out = Self::zeros(self.dim, self.k + other.k);
        for (a, &i) in self.coeffs.iter().zip(&left) {
            if *a == ZERO {
                continue;
            }
            for (b, &j) in other.coeffs.iter().zip(&right) {
                if *b == ZERO || i & j != 0 {
                    continue;
                }
                let idx = subset_rank(i | j, self.dim);
                out.coeffs[idx] += a * b * shuffle_sign(i, j);
            }
        }
        Ok(out)
    }

    /// `∂f/∂x_i`, the Leibniz derivative extended linearly.
    pub fn leibniz_derivative(&self, i: usize) -> Result<Self> {
        if self.k == 0 {
            return Err(Error::DegreeZero { factor: 0 });
        }
        if i >= self.dim {
            return Err(Error::IndexOutOfRange(format!("variable {i} of C^{}", self.dim)));
        }
        let mut out = Self::zeros(self.dim, self.k - 1);
        for (c, mask) in self.coeffs.iter().zip(subsets(self.dim, self.k)) {
            if mask & (1 << i) == 0 || *c == ZERO {
                continue;
            }
            let pos = (mask & ((1u64 << i) - 1)).count_ones();
            let sign = if pos.is_multiple_of(2) { 1.0 } else { -1.0 };
            out.coeffs[subset_rank(mask & !(1 << i), self.dim)] += c * sign;
        }
        Ok(out)
    }
}

impl FrobeniusSpace for AlternatingTensor {
    fn weighted_coords(&self) -> Vec<C64> {
        self.coeffs.clone()
    }

    fn with_weighted_coords(&self, coords: &[C64]) -> Self {
        Self {
            dim: self.dim,
            k: self.k,
            coeffs: coords.to_vec(),
        }
    }

    fn ambient_dimension(&self) -> usize {
        self.coeffs.len()
    }
}

/// `D_ij f = ∂f/∂x_i ∧ x_j − ∂f/∂x_j ∧ x_i`, `0 ≤ i < j ≤ n`, labelled `(0, i, j)`.
pub fn so_generators_ext(f: &AlternatingTensor) -> Result<GeneratorSet<AlternatingTensor>> {
    if f.k == 0 || f.k >= f.dim {
        return Err(Error::InvalidInput(format!(
            "so generators need 1 ≤ k ≤ n, got k = {} in C^{}",
            f.k, f.dim
        )));
    }
    let partials: Vec<_> = (0..f.dim).map(|i| f.leibniz_derivative(i)).collect::<Result<_>>()?;
    let mut generators = Vec::new();
    let mut labels = Vec::new();
    for i in 0..f.dim {
        for j in i + 1..f.dim {
            let a = partials[i].wedge(&AlternatingTensor::basis_vector(f.dim, j))?;
            let b = partials[j].wedge(&AlternatingTensor::basis_vector(f.dim, i))?;
            generators.push(a.checked_sub(&b)?);
            labels.push((0, i, j));
        }
    }
    Ok(GeneratorSet { generators, labels })
}

/// `Σ_I c_I(u) c_I(v)`; equals the Gram determinant on decomposables.
pub fn gram_inner(u: &AlternatingTensor, v: &AlternatingTensor) -> Result<C64> {
    u.check_same(v)?;
    Ok(bilinear_dot(&u.coeffs, &v.coeffs))
}

/// `v_1 ∧ … ∧ v_k`, coefficients the maximal minors of the `k × (n+1)` matrix.
pub fn decomposable(vs: &[Vec<C64>]) -> Result<AlternatingTensor> {
    let k = vs.len();
    let dim = vs
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::InvalidInput("decomposable needs at least one vector".into()))?;
    if let Some(bad) = vs.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: bad.len(),
        });
    }
    if k > dim {
        return Err(Error::DegreeOverflow { a: k, b: 0, dim });
    }
    let coeffs = subsets(dim, k)
        .into_iter()
        .map(|mask| {
            let cols: Vec<usize> = members(mask).collect();
            let minor: Vec<Vec<C64>> = vs.iter().map(|v| cols.iter().map(|&c| v[c]).collect()).collect();
            linalg::det(&minor)
        })
        .collect();
    AlternatingTensor::new(dim, k, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    fn e(dim: usize, j: usize) -> AlternatingTensor {
        AlternatingTensor::basis_vector(dim, j)
    }

    #[test]
    fn subset_ranks() {
        for dim in 1..7 {
            for k in 0..=dim {
                let s = subsets(dim, k);
                assert_eq!(s.len(), binomial(dim, k));
                for (i, &m) in s.iter().enumerate() {
                    assert_eq!(subset_rank(m, dim), i);
                }
            }
        }
    }

    #[test]
    fn wedge_examples() {
        let w = e(3, 0).wedge(&e(3, 1)).unwrap();
        assert_eq!(w.coeff(&[0, 1]), ONE);
        let w = e(3, 1).wedge(&e(3, 0)).unwrap();
        assert_eq!(w.coeff(&[0, 1]), -ONE);
        let a = AlternatingTensor::from_vector(&r(&[1.0, 1.0, 0.0]));
        let b = AlternatingTensor::from_vector(&r(&[1.0, -1.0, 0.0]));
        let w = a.wedge(&b).unwrap();
        assert_eq!(w.coeff(&[0, 1]), C64::new(-2.0, 0.0));
        assert_eq!(w.coeff(&[0, 2]), ZERO);
    }

    #[test]
    fn wedge_overflow() {
        let a = e(2, 0).wedge(&e(2, 1)).unwrap();
        assert!(matches!(a.wedge(&e(2, 0)), Err(Error::DegreeOverflow { .. })));
    }

    #[test]
    fn leibniz_examples() {
        let f = e(3, 0).wedge(&e(3, 1)).unwrap();
        assert_eq!(f.leibniz_derivative(0).unwrap(), e(3, 1));
        assert_eq!(f.leibniz_derivative(2).unwrap(), AlternatingTensor::zeros(3, 1));
        let g = AlternatingTensor::from_vector(&r(&[1.0, 0.0, 1.0]))
            .wedge(&e(3, 1))
            .unwrap();
        assert_eq!(g.leibniz_derivative(2).unwrap(), e(3, 1));
    }

    #[test]
    fn generators_of_plane() {
        let f = e(3, 0).wedge(&e(3, 1)).unwrap();
        let gens = so_generators_ext(&f).unwrap();
        assert_eq!(gens.labels, vec![(0, 0, 1), (0, 0, 2), (0, 1, 2)]);
        // D01 rotates inside the plane, so it kills e0∧e1
        assert_eq!(gens.generators[0], AlternatingTensor::zeros(3, 2));
        // D02: ∂0 f ∧ e2 = e1∧e2, ∂2 f = 0
        assert_eq!(gens.generators[1].coeff(&[1, 2]), ONE);
        // D12: −∂2 f ∧ e1 + ∂1 f ∧ e2 = −e0∧e2
        assert_eq!(gens.generators[2].coeff(&[0, 2]), -ONE);
        let info = crate::critical::orbit_dimension(&gens, 1e-8);
        assert_eq!(info.orbit_dimension, 2);
    }

    #[test]
    fn gram_examples() {
        let a = e(3, 0).wedge(&e(3, 1)).unwrap();
        let b = e(3, 0).wedge(&e(3, 2)).unwrap();
        assert_eq!(gram_inner(&a, &a).unwrap(), ONE);
        assert_eq!(gram_inner(&a, &b).unwrap(), ZERO);
    }

    #[test]
    fn decomposable_examples() {
        let d = decomposable(&[r(&[1.0, 0.0, 0.0]), r(&[0.0, 1.0, 0.0])]).unwrap();
        assert_eq!(d, e(3, 0).wedge(&e(3, 1)).unwrap());
        let d = decomposable(&[r(&[1.0, 2.0, 3.0]), r(&[2.0, 4.0, 6.0])]).unwrap();
        assert!(d.coeffs().iter().all(|c| c.norm() == 0.0));
        let d = decomposable(&[r(&[1.0, 1.0, 0.0]), r(&[0.0, 1.0, 1.0])]).unwrap();
        assert_eq!(d.coeffs(), &r(&[1.0, 1.0, 1.0])[..]);
    }

    #[test]
    fn derivatives_anticommute() {
        let coeffs: Vec<C64> = (0..10).map(|i| C64::new(i as f64 - 3.0, 0.0)).collect();
        let f = AlternatingTensor::new(5, 3, coeffs).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let ij = f.leibniz_derivative(i).unwrap().leibniz_derivative(j).unwrap();
                let ji = f.leibniz_derivative(j).unwrap().leibniz_derivative(i).unwrap();
                assert_eq!(ij, ji.scale(-ONE));
            }
        }
    }
}
