//! The Frobenius (Bombieri–Weyl) bilinear form and the Hermitian norm used for numerics.
//!
//! In raw monomial coefficients the form is diagonal:
//! `q(f, g) = Σ_α c_α(f) c_α(g) / w(α)` with `w(α) = Π_p multinomial(d_p; α_p)`.
//! Dividing each coefficient by `sqrt(w(α))` turns `q` into the plain bilinear dot product,
//! which is how the dense kernels in [`crate::critical`] see every ambient space.
//!
//! `q` is complex *bilinear*. The Hermitian norm only scales residuals and distances.

use crate::error::{Error, Result};
use crate::tensor::{factor_monomials, PsTensor, C64, ZERO};

/// `multinomial(|α|; α)`, exact.
pub fn multinomial(alpha: &[u32]) -> u128 {
    let mut total: u128 = 0;
    let mut acc: u128 = 1;
    for &a in alpha {
        for j in 1..=a as u128 {
            total += 1;
            acc = acc * total / j;
        }
    }
    acc
}

/// Frobenius weights of one factor, in basis order.
pub fn factor_weights(dim: usize, degree: usize) -> Vec<u128> {
    factor_monomials(dim, degree).iter().map(|a| multinomial(a)).collect()
}

/// Weights `w(α)` of the full basis of `shape`, computed in integers and converted once.
pub fn weights(shape: &crate::tensor::Shape) -> Vec<f64> {
    let mut out: Vec<u128> = vec![1];
    for f in shape.factors() {
        let w = factor_weights(f.dim, f.degree);
        out = out
            .iter()
            .flat_map(|&a| {
                w.iter()
                    .map(move |&b| a.checked_mul(b).expect("Frobenius weight overflow"))
            })
            .collect();
    }
    out.into_iter().map(|w| w as f64).collect()
}

/// An ambient space with a diagonal Frobenius form, seen through weighted coordinates.
pub trait FrobeniusSpace: Clone {
    /// Coordinates in which `q` is the standard bilinear dot product.
    fn weighted_coords(&self) -> Vec<C64>;

    /// An element of the same space with the given weighted coordinates.
    fn with_weighted_coords(&self, coords: &[C64]) -> Self;

    fn ambient_dimension(&self) -> usize {
        self.weighted_coords().len()
    }
}

impl FrobeniusSpace for PsTensor {
    fn weighted_coords(&self) -> Vec<C64> {
        self.coeffs()
            .iter()
            .zip(weights(self.shape()))
            .map(|(c, w)| c / w.sqrt())
            .collect()
    }

    fn with_weighted_coords(&self, coords: &[C64]) -> Self {
        let raw = coords
            .iter()
            .zip(weights(self.shape()))
            .map(|(c, w)| c * w.sqrt())
            .collect();
        PsTensor::new(self.shape().clone(), raw).expect("length preserved")
    }

    fn ambient_dimension(&self) -> usize {
        self.shape().basis_size()
    }
}

pub(crate) fn bilinear_dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn hermitian_norm_of(coords: &[C64]) -> f64 {
    coords.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Bilinear form of any [`FrobeniusSpace`] element pair.
pub fn q<T: FrobeniusSpace>(x: &T, y: &T) -> C64 {
    bilinear_dot(&x.weighted_coords(), &y.weighted_coords())
}

/// `q(f, g) = Σ_α c_α(f) c_α(g) / w(α)`, complex bilinear and symmetric.
pub fn frobenius_inner(f: &PsTensor, g: &PsTensor) -> Result<C64> {
    if f.shape() != g.shape() {
        return Err(Error::ShapeMismatch(format!(
            "{:?} vs {:?}",
            f.shape().factors(),
            g.shape().factors()
        )));
    }
    Ok(f.coeffs()
        .iter()
        .zip(g.coeffs())
        .zip(weights(f.shape()))
        .map(|((a, b), w)| a * b / w)
        .fold(ZERO, |acc, z| acc + z))
}

/// `sqrt(Σ_α |c_α|² / w(α))`.
pub fn hermitian_norm(f: &PsTensor) -> f64 {
    f.coeffs()
        .iter()
        .zip(weights(f.shape()))
        .map(|(c, w)| c.norm_sqr() / w)
        .sum::<f64>()
        .sqrt()
}

/// `q_W(v, w) = Σ_i v_i w_i`, no conjugation.
pub fn q_w(v: &[C64], w: &[C64]) -> Result<C64> {
    if v.len() != w.len() {
        return Err(Error::DimensionMismatch {
            expected: v.len(),
            got: w.len(),
        });
    }
    Ok(bilinear_dot(v, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{Shape, VectorTuple};

    fn sym(dim: usize, degree: usize) -> Shape {
        Shape::symmetric(dim, degree).unwrap()
    }

    #[test]
    fn multinomials() {
        assert_eq!(multinomial(&[2, 0]), 1);
        assert_eq!(multinomial(&[1, 1]), 2);
        assert_eq!(multinomial(&[1, 1, 1]), 6);
        assert_eq!(multinomial(&[2, 1, 1]), 12);
        assert_eq!(multinomial(&[20]), 1);
        assert_eq!(multinomial(&[10, 10]), 184_756);
    }

    #[test]
    fn pure_powers_have_unit_weight() {
        for dim in 1..5 {
            for degree in 0..7 {
                let monos = factor_monomials(dim, degree);
                for (a, w) in monos.iter().zip(factor_weights(dim, degree)) {
                    assert!(w >= 1);
                    if a.iter().filter(|&&e| e > 0).count() <= 1 {
                        assert_eq!(w, 1);
                    }
                }
            }
        }
    }

    #[test]
    fn inner_examples() {
        let x0sq = PsTensor::from_real(sym(2, 2), &[1.0, 0.0, 0.0]).unwrap();
        let v = VectorTuple::from_real(&[&[1.0, 1.0]]).unwrap();
        let sum_sq = PsTensor::rank_one(&v, &sym(2, 2)).unwrap();
        assert_eq!(frobenius_inner(&x0sq, &sum_sq).unwrap(), C64::new(1.0, 0.0));

        let x0x1 = PsTensor::from_real(sym(2, 2), &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(frobenius_inner(&x0x1, &x0x1).unwrap(), C64::new(0.5, 0.0));

        let f = PsTensor::from_real(sym(2, 2), &[1.0, 0.0, 1.0]).unwrap();
        assert_eq!(frobenius_inner(&f, &f).unwrap(), C64::new(2.0, 0.0));

        let g = PsTensor::from_real(sym(3, 2), &[1.0; 6]).unwrap();
        assert!(matches!(frobenius_inner(&f, &g), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(hermitian_norm(&PsTensor::zeros(sym(2, 2))), 0.0);
        let f = PsTensor::from_real(sym(2, 2), &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(hermitian_norm(&f), 1.0);
        let mut c = vec![ZERO; 4];
        c[0] = C64::new(1.0, 1.0);
        let f = PsTensor::new(sym(2, 3), c).unwrap();
        assert!((hermitian_norm(&f) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn q_w_examples() {
        let r = |v: &[f64]| v.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>();
        assert_eq!(q_w(&r(&[1.0, 0.0]), &r(&[1.0, 1.0])).unwrap(), C64::new(1.0, 0.0));
        let iso = vec![C64::new(1.0, 0.0), C64::i()];
        assert_eq!(q_w(&iso, &iso).unwrap(), ZERO);
        assert_eq!(q_w(&r(&[1.0, 2.0]), &r(&[3.0, 4.0])).unwrap(), C64::new(11.0, 0.0));
        assert!(q_w(&r(&[1.0]), &r(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn gram_matrix_is_diagonal() {
        let shape = Shape::new(vec![crate::tensor::Factor::new(3, 2), crate::tensor::Factor::new(2, 1)]).unwrap();
        let n = shape.basis_size();
        let w = weights(&shape);
        for i in 0..n {
            let mut a = vec![ZERO; n];
            a[i] = C64::new(1.0, 0.0);
            let ei = PsTensor::new(shape.clone(), a).unwrap();
            for j in 0..n {
                let mut b = vec![ZERO; n];
                b[j] = C64::new(1.0, 0.0);
                let ej = PsTensor::new(shape.clone(), b).unwrap();
                let g = frobenius_inner(&ei, &ej).unwrap();
                let expected = if i == j { 1.0 / w[i] } else { 0.0 };
                assert_eq!(g, C64::new(expected, 0.0));
            }
        }
    }

    #[test]
    fn weighted_coords_roundtrip() {
        let f = PsTensor::from_real(sym(3, 3), &(0..10).map(|i| i as f64).collect::<Vec<_>>()).unwrap();
        let back = f.with_weighted_coords(&f.weighted_coords());
        for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!((q(&f, &f) - frobenius_inner(&f, &f).unwrap()).norm() < 1e-12);
    }
}
