//! Dense partially symmetric tensors, viewed as multi-homogeneous polynomials.
//!
//! An element of `Sym^{d_1} V_1 ⊗ … ⊗ Sym^{d_k} V_k` is stored as the list of its raw
//! monomial coefficients `f = Σ_α c_α x^α`. The basis is ordered as follows:
//!
//! * inside one factor, exponent vectors of total degree `d_p` are listed in
//!   lexicographically *decreasing* order, e.g. `(2,0), (1,1), (0,2)`;
//! * factors are concatenated left to right, the first factor being the most
//!   significant digit of the flat index.
//!
//! Every dense routine in the crate (the Frobenius weights, generator matrices, the
//! JSON format) keys off this order.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frobenius;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// `n choose k` in machine integers; callers keep arguments desk-sized.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// One tensor factor `Sym^degree C^dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub dim: usize,
    pub degree: usize,
}

impl Factor {
    pub fn new(dim: usize, degree: usize) -> Self {
        Self { dim, degree }
    }

    /// Number of monomials of degree `degree` in `dim` variables.
    pub fn size(&self) -> usize {
        binomial(self.dim - 1 + self.degree, self.degree)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Shape {
    factors: Vec<Factor>,
}

impl Shape {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidShape("at least one factor required".into()));
        }
        if let Some(p) = factors.iter().position(|f| f.dim == 0) {
            return Err(Error::InvalidShape(format!("factor {p} has dim 0")));
        }
        Ok(Self { factors })
    }

    /// `Sym^degree C^dim`, the symmetric case (k = 1).
    pub fn symmetric(dim: usize, degree: usize) -> Result<Self> {
        Self::new(vec![Factor::new(dim, degree)])
    }

    /// Ordinary tensors `C^{n_1} ⊗ … ⊗ C^{n_k}` (all degrees 1).
    pub fn segre(dims: &[usize]) -> Result<Self> {
        Self::new(dims.iter().map(|&n| Factor::new(n, 1)).collect())
    }

    /// `Sym^{d_1} C^2 ⊗ … ⊗ Sym^{d_k} C^2`.
    pub fn binary(degrees: &[usize]) -> Result<Self> {
        Self::new(degrees.iter().map(|&d| Factor::new(2, d)).collect())
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn factor_sizes(&self) -> Vec<usize> {
        self.factors.iter().map(Factor::size).collect()
    }

    pub fn basis_size(&self) -> usize {
        self.factors.iter().map(Factor::size).product()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.degree).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim).collect()
    }

    /// The same shape with factor `p` moved to degree `degree`.
    pub fn with_degree(&self, p: usize, degree: usize) -> Shape {
        let mut factors = self.factors.clone();
        factors[p].degree = degree;
        Shape { factors }
    }

    /// Dimension of `so(V_1) × … × so(V_k)`.
    pub fn lie_algebra_dimension(&self) -> usize {
        self.factors.iter().map(|f| binomial(f.dim, 2)).sum()
    }

    fn check_factor(&self, p: usize) -> Result<()> {
        if p >= self.factors.len() {
            return Err(Error::IndexOutOfRange(format!("factor {p} of {}", self.factors.len())));
        }
        Ok(())
    }

    fn check_variable(&self, p: usize, i: usize) -> Result<()> {
        self.check_factor(p)?;
        if i >= self.factors[p].dim {
            return Err(Error::IndexOutOfRange(format!(
                "variable {i} of factor {p} (dim {})",
                self.factors[p].dim
            )));
        }
        Ok(())
    }
}

/// Exponent vector of a single factor.
pub type Exponent = Vec<u32>;

/// One exponent vector per factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiExponent(pub Vec<Exponent>);

/// All exponents of total degree `degree` in `dim` variables, lex-decreasing.
pub fn factor_monomials(dim: usize, degree: usize) -> Vec<Exponent> {
    fn rec(pos: usize, remaining: u32, cur: &mut Exponent, out: &mut Vec<Exponent>) {
        if pos + 1 == cur.len() {
            cur[pos] = remaining;
            out.push(cur.clone());
            return;
        }
        for e in (0..=remaining).rev() {
            cur[pos] = e;
            rec(pos + 1, remaining - e, cur, out);
        }
    }
    let mut out = Vec::with_capacity(binomial(dim - 1 + degree, degree));
    let mut cur = vec![0; dim];
    rec(0, degree as u32, &mut cur, &mut out);
    out
}

/// Position of `alpha` in [`factor_monomials`] for its own dimension and degree.
pub fn monomial_rank(alpha: &[u32]) -> usize {
    let m = alpha.len();
    let mut remaining: u32 = alpha.iter().sum();
    let mut rank = 0;
    for (i, &a) in alpha.iter().enumerate().take(m.saturating_sub(1)) {
        let free = m - i - 2;
        for e in a + 1..=remaining {
            rank += binomial((remaining - e) as usize + free, free);
        }
        remaining -= a;
    }
    rank
}

/// The full multi-homogeneous monomial basis of `shape`, in storage order.
pub fn monomial_basis(shape: &Shape) -> Vec<MultiExponent> {
    let per_factor: Vec<Vec<Exponent>> = shape
        .factors()
        .iter()
        .map(|f| factor_monomials(f.dim, f.degree))
        .collect();
    let mut out = vec![MultiExponent(Vec::new())];
    for monos in &per_factor {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                monos.iter().map(move |m| {
                    let mut v = prefix.0.clone();
                    v.push(m.clone());
                    MultiExponent(v)
                })
            })
            .collect();
    }
    out
}

/// A point `(v_1, …, v_k)` of `V_1 × … × V_k` with no zero component.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorTuple {
    vectors: Vec<Vec<C64>>,
}

impl VectorTuple {
    pub fn new(vectors: Vec<Vec<C64>>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::InvalidInput("empty vector tuple".into()));
        }
        for (p, v) in vectors.iter().enumerate() {
            if v.iter().all(|z| *z == ZERO) {
                return Err(Error::ZeroVector(p));
            }
        }
        Ok(Self { vectors })
    }

    pub fn from_real(vectors: &[&[f64]]) -> Result<Self> {
        Self::new(
            vectors
                .iter()
                .map(|v| v.iter().map(|&x| C64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<Vec<C64>> {
        self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Each component rescaled to unit Hermitian norm.
    pub fn normalized(&self) -> VectorTuple {
        VectorTuple {
            vectors: self.vectors.iter().map(|v| normalize(v)).collect(),
        }
    }

    fn check_shape(&self, shape: &Shape) -> Result<()> {
        if self.vectors.len() != shape.num_factors() {
            return Err(Error::DimensionMismatch {
                expected: shape.num_factors(),
                got: self.vectors.len(),
            });
        }
        for (v, f) in self.vectors.iter().zip(shape.factors()) {
            if v.len() != f.dim {
                return Err(Error::DimensionMismatch {
                    expected: f.dim,
                    got: v.len(),
                });
            }
        }
        Ok(())
    }
}

pub(crate) fn hermitian_vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn normalize(v: &[C64]) -> Vec<C64> {
    let n = hermitian_vec_norm(v);
    v.iter().map(|z| z / n).collect()
}

/// Values of all monomials of one factor at `v`, in basis order.
fn factor_monomial_values(v: &[C64], degree: usize) -> Vec<C64> {
    let powers: Vec<Vec<C64>> = v
        .iter()
        .map(|&z| {
            let mut p = Vec::with_capacity(degree + 1);
            let mut acc = ONE;
            for _ in 0..=degree {
                p.push(acc);
                acc *= z;
            }
            p
        })
        .collect();
    factor_monomials(v.len(), degree)
        .iter()
        .map(|alpha| alpha.iter().zip(&powers).map(|(&e, pw)| pw[e as usize]).product())
        .collect()
}

/// Kronecker product of per-factor vectors, first factor most significant.
pub(crate) fn kronecker(parts: &[Vec<C64>]) -> Vec<C64> {
    let mut out = vec![ONE];
    for part in parts {
        out = out.iter().flat_map(|&a| part.iter().map(move |&b| a * b)).collect();
    }
    out
}

/// Element of `Sym^{d_1} V_1 ⊗ … ⊗ Sym^{d_k} V_k` as raw monomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PsTensor {
    shape: Shape,
    coeffs: Vec<C64>,
}

impl PsTensor {
    pub fn new(shape: Shape, coeffs: Vec<C64>) -> Result<Self> {
        let expected = shape.basis_size();
        if coeffs.len() != expected {
            return Err(Error::CoefficientLength {
                expected,
                got: coeffs.len(),
            });
        }
        Ok(Self { shape, coeffs })
    }

    pub fn zeros(shape: Shape) -> Self {
        let n = shape.basis_size();
        Self {
            shape,
            coeffs: vec![ZERO; n],
        }
    }

    pub fn from_real(shape: Shape, coeffs: &[f64]) -> Result<Self> {
        Self::new(shape, coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Builds a tensor from `(coefficient, per-factor exponents)` terms.
    pub fn from_terms(shape: Shape, terms: &[(C64, Vec<Exponent>)]) -> Result<Self> {
        let mut t = Self::zeros(shape);
        for (c, exps) in terms {
            let idx = t.index_of(exps)?;
            t.coeffs[idx] += c;
        }
        Ok(t)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    /// Flat storage index of a multi-exponent.
    pub fn index_of(&self, exps: &[Exponent]) -> Result<usize> {
        let factors = self.shape.factors();
        if exps.len() != factors.len() {
            return Err(Error::DimensionMismatch {
                expected: factors.len(),
                got: exps.len(),
            });
        }
        let mut idx = 0;
        for (alpha, f) in exps.iter().zip(factors) {
            if alpha.len() != f.dim || alpha.iter().sum::<u32>() as usize != f.degree {
                return Err(Error::IndexOutOfRange(format!(
                    "exponent {alpha:?} not in Sym^{} C^{}",
                    f.degree, f.dim
                )));
            }
            idx = idx * f.size() + monomial_rank(alpha);
        }
        Ok(idx)
    }

    pub fn coeff(&self, exps: &[Exponent]) -> Result<C64> {
        Ok(self.coeffs[self.index_of(exps)?])
    }

    /// Applies a one-to-one relabelling of factor `p`'s monomials.
    /// `mid_map[m] = Some((m', s))` sends basis monomial `m` to `s·m'` of `target`.
    fn remap_factor(&self, p: usize, target: Shape, mid_map: &[Option<(usize, f64)>]) -> PsTensor {
        let sizes = self.shape.factor_sizes();
        let outer: usize = sizes[..p].iter().product();
        let inner: usize = sizes[p + 1..].iter().product();
        let src = sizes[p];
        let dst = target.factors()[p].size();
        let mut out = vec![ZERO; outer * dst * inner];
        for o in 0..outer {
            for (m, entry) in mid_map.iter().enumerate() {
                let Some((nm, scale)) = *entry else { continue };
                let from = (o * src + m) * inner;
                let to = (o * dst + nm) * inner;
                for i in 0..inner {
                    out[to + i] += self.coeffs[from + i] * scale;
                }
            }
        }
        PsTensor {
            shape: target,
            coeffs: out,
        }
    }

    /// `∂f/∂x_{p,i}`.
    pub fn partial_derivative(&self, p: usize, i: usize) -> Result<PsTensor> {
        self.shape.check_variable(p, i)?;
        let f = self.shape.factors()[p];
        if f.degree == 0 {
            return Err(Error::DegreeZero { factor: p });
        }
        let map: Vec<_> = factor_monomials(f.dim, f.degree)
            .into_iter()
            .map(|mut alpha| {
                let e = alpha[i];
                (e > 0).then(|| {
                    alpha[i] -= 1;
                    (monomial_rank(&alpha), e as f64)
                })
            })
            .collect();
        Ok(self.remap_factor(p, self.shape.with_degree(p, f.degree - 1), &map))
    }

    /// `x_{p,j} · f`.
    pub fn multiply_by_variable(&self, p: usize, j: usize) -> Result<PsTensor> {
        self.shape.check_variable(p, j)?;
        let f = self.shape.factors()[p];
        let map: Vec<_> = factor_monomials(f.dim, f.degree)
            .into_iter()
            .map(|mut alpha| {
                alpha[j] += 1;
                Some((monomial_rank(&alpha), 1.0))
            })
            .collect();
        Ok(self.remap_factor(p, self.shape.with_degree(p, f.degree + 1), &map))
    }

    /// Exact polynomial evaluation `Σ_α c_α Π_p v_p^{α_p}`.
    pub fn evaluate(&self, t: &VectorTuple) -> Result<C64> {
        t.check_shape(&self.shape)?;
        Ok(self.evaluate_unchecked(t.vectors()))
    }

    pub(crate) fn evaluate_unchecked(&self, vectors: &[Vec<C64>]) -> C64 {
        let mut acc = self.coeffs.clone();
        for (v, f) in vectors.iter().zip(self.shape.factors()).rev() {
            let vals = factor_monomial_values(v, f.degree);
            let s = vals.len();
            acc = acc
                .chunks(s)
                .map(|chunk| chunk.iter().zip(&vals).map(|(c, m)| c * m).sum())
                .collect();
        }
        acc[0]
    }

    /// `(∂f/∂x_{p,i}(t))_i`. This is `d_p` times the contraction of `f` with
    /// `v_1^{d_1} ⊗ … ⊗ v_p^{d_p − 1} ⊗ … ⊗ v_k^{d_k}` under the Frobenius form.
    pub fn gradient_contraction(&self, t: &VectorTuple, p: usize) -> Result<Vec<C64>> {
        t.check_shape(&self.shape)?;
        self.shape.check_factor(p)?;
        (0..self.shape.factors()[p].dim)
            .map(|i| Ok(self.partial_derivative(p, i)?.evaluate_unchecked(t.vectors())))
            .collect()
    }

    /// The decomposable tensor `v_1^{d_1} ⊗ … ⊗ v_k^{d_k}` written in raw coefficients,
    /// `c_α = Π_p multinomial(d_p; α_p) v_p^{α_p}`.
    pub fn rank_one(t: &VectorTuple, shape: &Shape) -> Result<PsTensor> {
        t.check_shape(shape)?;
        let parts: Vec<Vec<C64>> = t
            .vectors()
            .iter()
            .zip(shape.factors())
            .map(|(v, f)| {
                let vals = factor_monomial_values(v, f.degree);
                factor_monomials(f.dim, f.degree)
                    .iter()
                    .zip(vals)
                    .map(|(alpha, m)| m * frobenius::multinomial(alpha) as f64)
                    .collect()
            })
            .collect();
        Ok(PsTensor {
            shape: shape.clone(),
            coeffs: kronecker(&parts),
        })
    }

    pub fn scale(&self, s: C64) -> PsTensor {
        PsTensor {
            shape: self.shape.clone(),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    fn zip_with(&self, other: &PsTensor, op: impl Fn(C64, C64) -> C64) -> Result<PsTensor> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.shape.factors(),
                other.shape.factors()
            )));
        }
        Ok(PsTensor {
            shape: self.shape.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| op(a, b)).collect(),
        })
    }

    pub fn checked_add(&self, other: &PsTensor) -> Result<PsTensor> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &PsTensor) -> Result<PsTensor> {
        self.zip_with(other, |a, b| a - b)
    }
}

impl Add for &PsTensor {
    type Output = PsTensor;
    fn add(self, rhs: &PsTensor) -> PsTensor {
        self.checked_add(rhs).expect("shape mismatch in tensor addition")
    }
}

impl Sub for &PsTensor {
    type Output = PsTensor;
    fn sub(self, rhs: &PsTensor) -> PsTensor {
        self.checked_sub(rhs).expect("shape mismatch in tensor subtraction")
    }
}

impl Mul<C64> for &PsTensor {
    type Output = PsTensor;
    fn mul(self, rhs: C64) -> PsTensor {
        self.scale(rhs)
    }
}

impl Neg for &PsTensor {
    type Output = PsTensor;
    fn neg(self) -> PsTensor {
        self.scale(-ONE)
    }
}
