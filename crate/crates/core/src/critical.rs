//! Infinitesimal generators of the `so` action, orbit dimension, and the critical
//! space `H_f = (g·f)^⊥`.
//!
//! For a partially symmetric `f` the tangent space `g·f` is spanned by
//! `D^{(p)}_{ij} f = ∂f/∂x_{p,i} · x_{p,j} − ∂f/∂x_{p,j} · x_{p,i}`. All numerical work
//! happens in weighted coordinates (see [`FrobeniusSpace`]), where `q` is the plain
//! bilinear dot product, so the same kernels serve tensors and exterior powers.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{so_generators_ext, AlternatingTensor};
use crate::frobenius::{bilinear_dot, hermitian_norm_of, FrobeniusSpace};
use crate::linalg;
use crate::tensor::PsTensor;

/// Default relative threshold on singular values.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Generators whose norm is below this fraction of the largest one count as zero.
const ZERO_GENERATOR_REL: f64 = 1e-14;

/// Spanning set of `g·f`, one element per label `(p, i, j)`.
#[derive(Clone, Debug)]
pub struct GeneratorSet<T> {
    pub generators: Vec<T>,
    pub labels: Vec<(usize, usize, usize)>,
}

impl<T: FrobeniusSpace> GeneratorSet<T> {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    fn weighted_rows(&self) -> Vec<Vec<num_complex::Complex64>> {
        self.generators.iter().map(|g| g.weighted_coords()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalSpaceInfo {
    pub orbit_dimension: usize,
    pub ambient_dimension: usize,
    pub codim_hf: usize,
    pub lie_algebra_dimension: usize,
    pub singular_value_profile: Vec<f64>,
}

/// `D^{(p)}_{ij} f` for every factor `p` and `0 ≤ i < j ≤ n_p`, labels in `(p, i, j)` order.
pub fn infinitesimal_generators(f: &PsTensor) -> Result<GeneratorSet<PsTensor>> {
    if let Some(p) = f.shape().factors().iter().position(|fac| fac.degree == 0) {
        return Err(Error::DegreeZero { factor: p });
    }
    let mut generators = Vec::new();
    let mut labels = Vec::new();
    for (p, fac) in f.shape().factors().iter().enumerate() {
        let partials: Vec<PsTensor> = (0..fac.dim)
            .map(|i| f.partial_derivative(p, i))
            .collect::<Result<_>>()?;
        for i in 0..fac.dim {
            for j in i + 1..fac.dim {
                let a = partials[i].multiply_by_variable(p, j)?;
                let b = partials[j].multiply_by_variable(p, i)?;
                generators.push(a.checked_sub(&b)?);
                labels.push((p, i, j));
            }
        }
    }
    Ok(GeneratorSet { generators, labels })
}

/// Numerical rank of the generators in the weighted basis.
pub fn orbit_dimension<T: FrobeniusSpace>(gens: &GeneratorSet<T>, tol: f64) -> CriticalSpaceInfo {
    let ambient = gens.generators.first().map_or(0, |g| g.ambient_dimension());
    let profile = linalg::singular_values(&gens.weighted_rows(), ambient);
    let rank = linalg::numerical_rank(&profile, tol);
    CriticalSpaceInfo {
        orbit_dimension: rank,
        ambient_dimension: ambient,
        codim_hf: rank,
        lie_algebra_dimension: gens.len(),
        singular_value_profile: profile,
    }
}

/// Dimension of the orbit of `[f]` in projective space: `dim(g·f + ⟨f⟩) − 1`.
pub fn projective_orbit_dimension<T: FrobeniusSpace>(f: &T, gens: &GeneratorSet<T>, tol: f64) -> usize {
    let mut rows = gens.weighted_rows();
    rows.push(f.weighted_coords());
    let profile = linalg::singular_values(&rows, f.ambient_dimension());
    linalg::numerical_rank(&profile, tol).saturating_sub(1)
}

/// One generator's contribution to the membership residual.
#[derive(Clone, Debug, Serialize)]
pub struct GeneratorResidual {
    pub label: (usize, usize, usize),
    pub residual: f64,
    pub generator_norm: f64,
}

/// Per-generator `|q(v, D)| / (‖v‖ ‖D‖)`; numerically zero generators contribute 0.
pub fn membership_breakdown<T: FrobeniusSpace>(v: &T, gens: &GeneratorSet<T>) -> Vec<GeneratorResidual> {
    let vc = v.weighted_coords();
    let vn = hermitian_norm_of(&vc);
    let rows = gens.weighted_rows();
    let norms: Vec<f64> = rows.iter().map(|r| hermitian_norm_of(r)).collect();
    let top = norms.iter().copied().fold(0.0, f64::max);
    rows.iter()
        .zip(&norms)
        .zip(&gens.labels)
        .map(|((row, &dn), &label)| {
            let residual = if vn == 0.0 || dn == 0.0 || dn <= ZERO_GENERATOR_REL * top {
                0.0
            } else {
                bilinear_dot(&vc, row).norm() / (vn * dn)
            };
            GeneratorResidual {
                label,
                residual,
                generator_norm: dn,
            }
        })
        .collect()
}

/// `max_D |q(v, D)| / (‖v‖ ‖D‖)` over the generators of `g·f`.
pub fn membership_residual_with<T: FrobeniusSpace>(v: &T, gens: &GeneratorSet<T>) -> f64 {
    membership_breakdown(v, gens)
        .iter()
        .map(|g| g.residual)
        .fold(0.0, f64::max)
}

/// Scale-invariant distance of `v` from `H_f`; 0 iff `v ∈ H_f` up to rounding.
pub fn membership_residual(v: &PsTensor, f: &PsTensor) -> Result<f64> {
    if v.shape() != f.shape() {
        return Err(Error::ShapeMismatch(format!(
            "{:?} vs {:?}",
            v.shape().factors(),
            f.shape().factors()
        )));
    }
    Ok(membership_residual_with(v, &infinitesimal_generators(f)?))
}

/// Membership residual for exterior powers, against [`so_generators_ext`].
pub fn membership_residual_ext(v: &AlternatingTensor, f: &AlternatingTensor) -> Result<f64> {
    if v.dim() != f.dim() || v.k() != f.k() {
        return Err(Error::ShapeMismatch(format!(
            "∧^{} C^{} vs ∧^{} C^{}",
            v.k(),
            v.dim(),
            f.k(),
            f.dim()
        )));
    }
    Ok(membership_residual_with(v, &so_generators_ext(f)?))
}

/// Hermitian-orthonormal basis of `H_f` given the generators of `g·f` and any element of
/// the ambient space (used only for its shape).
pub fn critical_space_basis_with<T: FrobeniusSpace>(template: &T, gens: &GeneratorSet<T>, tol: f64) -> Vec<T> {
    let (_, kernel) = linalg::bilinear_kernel(&gens.weighted_rows(), template.ambient_dimension(), tol);
    kernel.iter().map(|k| template.with_weighted_coords(k)).collect()
}

pub fn critical_space_basis(f: &PsTensor, tol: f64) -> Result<Vec<PsTensor>> {
    Ok(critical_space_basis_with(f, &infinitesimal_generators(f)?, tol))
}

/// Relative distance from `v` to the Hermitian span of an orthonormal basis.
pub fn projection_defect<T: FrobeniusSpace>(v: &T, basis: &[T]) -> f64 {
    let vc = v.weighted_coords();
    let vn = hermitian_norm_of(&vc);
    if vn == 0.0 {
        return 0.0;
    }
    let mut rest = vc.clone();
    for b in basis {
        let bc = b.weighted_coords();
        let coef: num_complex::Complex64 = bc.iter().zip(&vc).map(|(x, y)| x.conj() * y).sum();
        for (r, x) in rest.iter_mut().zip(&bc) {
            *r -= coef * x;
        }
    }
    hermitian_norm_of(&rest) / vn
}
