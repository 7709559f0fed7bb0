use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::exterior::AlternatingTensor;
use crate::frobenius::{weights, FrobeniusSpace};
use crate::solvers::rng_from_seed;
use crate::tensor::{binomial, hermitian_vec_norm, PsTensor, Shape, C64};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    #[default]
    Real,
    Complex,
}

/// Standard Gaussian vector: real entries, or complex with `E|z|² = 1`.
pub fn gaussian_vector(rng: &mut rand_chacha::ChaCha8Rng, n: usize, field: Field) -> Vec<C64> {
    (0..n)
        .map(|_| match field {
            Field::Real => C64::new(StandardNormal.sample(rng), 0.0),
            Field::Complex => {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
            }
        })
        .collect()
}

fn unit(mut z: Vec<C64>) -> Vec<C64> {
    let n = hermitian_vec_norm(&z);
    for c in &mut z {
        *c /= n;
    }
    z
}

/// Gaussian in the weighted basis, scaled to Hermitian norm 1.
pub fn random_tensor(shape: &Shape, seed: u64, field: Field) -> PsTensor {
    let mut rng = rng_from_seed(seed);
    let z = unit(gaussian_vector(&mut rng, shape.basis_size(), field));
    let raw = z.iter().zip(weights(shape)).map(|(c, w)| c * w.sqrt()).collect();
    PsTensor::new(shape.clone(), raw).expect("coefficient count matches the shape")
}

/// Gaussian element of `∧^k C^dim` with Hermitian norm 1.
pub fn random_alternating(dim: usize, k: usize, seed: u64, field: Field) -> AlternatingTensor {
    let mut rng = rng_from_seed(seed);
    let z = unit(gaussian_vector(&mut rng, binomial(dim, k), field));
    AlternatingTensor::zeros(dim, k).with_weighted_coords(&z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius::hermitian_norm;

    #[test]
    fn same_seed_same_tensor() {
        let s = Shape::binary(&[2, 1]).unwrap();
        assert_eq!(
            random_tensor(&s, 9, Field::Complex),
            random_tensor(&s, 9, Field::Complex)
        );
        assert_ne!(
            random_tensor(&s, 9, Field::Complex),
            random_tensor(&s, 10, Field::Complex)
        );
    }

    #[test]
    fn unit_hermitian_norm() {
        for field in [Field::Real, Field::Complex] {
            let f = random_tensor(&Shape::symmetric(3, 4).unwrap(), 1, field);
            assert!((hermitian_norm(&f) - 1.0).abs() < 1e-12);
            let g = random_alternating(5, 2, 1, field);
            assert!((hermitian_vec_norm(g.coeffs()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn real_field_is_real() {
        let f = random_tensor(&Shape::segre(&[2, 3]).unwrap(), 4, Field::Real);
        assert!(f.coeffs().iter().all(|c| c.im == 0.0));
    }
}
