//! Closed-form counts: binary Segre–Veronese ED degree, and the degree, Hilbert function
//! and Euler characteristic of complete flag varieties `F_n = SL(n+1)/B`.
//!
//! Everything is exact. The flag formulas are products over `1 ≤ i < j ≤ n+1` of
//! `(a_i + … + a_{j−1} + j − i)/(j − i)` (Weyl dimension) and of
//! `(a_i + … + a_{j−1})/(j − i)` (normalized leading term), kept as rationals until the
//! end.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Line bundle `O(a_1, …, a_n)` on `F_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagWeight {
    pub n: usize,
    pub a: Vec<u64>,
}

impl FlagWeight {
    /// Very ample weight: `n ≥ 1`, all `a_i ≥ 1`.
    pub fn new(a: Vec<u64>) -> Result<Self> {
        let w = Self::nonnegative(a)?;
        if w.a.contains(&0) {
            return Err(Error::InvalidInput(format!("flag weight {:?} is not very ample", w.a)));
        }
        Ok(w)
    }

    /// Any weight with `a_i ≥ 0`, as needed for Hilbert function values.
    pub fn nonnegative(a: Vec<u64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidInput("flag weight needs n ≥ 1".into()));
        }
        Ok(Self { n: a.len(), a })
    }

    pub fn uniform(n: usize, value: u64) -> Self {
        Self { n, a: vec![value; n] }
    }

    /// `dim F_n = C(n+1, 2)`.
    pub fn variety_dimension(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    fn scaled(&self, t: u64) -> Self {
        Self {
            n: self.n,
            a: self.a.iter().map(|&x| x * t).collect(),
        }
    }

    /// `(a_i + … + a_{j−1}, j − i)` for all `1 ≤ i < j ≤ n+1`.
    fn root_pairs(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        let n1 = self.n + 1;
        (1..n1).flat_map(move |i| {
            (i + 1..=n1).map(move |j| {
                let s: u64 = self.a[i - 1..j - 1].iter().sum();
                (s, (j - i) as u64)
            })
        })
    }
}

fn factorial(m: u64) -> BigInt {
    (1..=m).fold(BigInt::one(), |acc, i| acc * i)
}

fn into_integer(r: BigRational, what: &str) -> Result<BigInt> {
    if !r.is_integer() {
        return Err(Error::NonIntegral(format!("{what} = {r}")));
    }
    Ok(r.to_integer())
}

/// `k! · d_1 ⋯ d_k`.
pub fn binary_segre_veronese_eddegree(d: &[u64]) -> Result<BigInt> {
    if d.is_empty() || d.contains(&0) {
        return Err(Error::InvalidInput(format!("degrees {d:?} must be positive")));
    }
    Ok(d.iter().fold(factorial(d.len() as u64), |acc, &x| acc * x))
}

/// Weyl dimension of the irreducible `SL(n+1)` module with highest weight `a`.
pub fn flag_weyl_dimension(w: &FlagWeight) -> Result<BigInt> {
    let prod = w.root_pairs().fold(BigRational::one(), |acc, (s, len)| {
        acc * BigRational::new(BigInt::from(s + len), BigInt::from(len))
    });
    into_integer(prod, "Weyl dimension")
}

/// Hilbert function `t ↦ h^0(F_n, O(t a))`.
pub fn flag_hilbert(w: &FlagWeight, t: u64) -> Result<BigInt> {
    flag_weyl_dimension(&w.scaled(t))
}

/// Degree of `F_n` embedded by `O(a)`; by the critical-space dimension count this is also
/// its ED degree for the Frobenius form.
pub fn flag_degree(w: &FlagWeight) -> Result<BigInt> {
    let prod = w.root_pairs().fold(BigRational::one(), |acc, (s, len)| {
        acc * BigRational::new(BigInt::from(s), BigInt::from(len))
    });
    let top = BigRational::from_integer(factorial(w.variety_dimension() as u64));
    into_integer(prod * top, "flag degree")
}

/// `χ(F_n) = (n+1)!`.
pub fn flag_euler_characteristic(n: usize) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::InvalidInput("n ≥ 1 required".into()));
    }
    Ok(factorial(n as u64 + 1))
}

/// `D!` times the leading coefficient of the Hilbert polynomial of degree
/// `D = dim F_n`, computed as the `D`-th forward difference at 0 of integer samples.
pub fn hilbert_leading_term_times_factorial(w: &FlagWeight) -> Result<BigInt> {
    let dim = w.variety_dimension();
    let mut diffs: Vec<BigInt> = (0..=dim as u64).map(|t| flag_hilbert(w, t)).collect::<Result<_>>()?;
    for _ in 0..dim {
        diffs = diffs.windows(2).map(|p| &p[1] - &p[0]).collect();
    }
    Ok(diffs.pop().unwrap_or_else(BigInt::zero))
}

/// Exact leading coefficient of the Hilbert polynomial.
pub fn hilbert_leading_coefficient(w: &FlagWeight) -> Result<BigRational> {
    let scaled = hilbert_leading_term_times_factorial(w)?;
    let fact = factorial(w.variety_dimension() as u64);
    let g = scaled.gcd(&fact);
    Ok(BigRational::new(scaled / &g, fact / g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: u64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn binary_eddegree_examples() {
        assert_eq!(binary_segre_veronese_eddegree(&[3]).unwrap(), big(3));
        assert_eq!(binary_segre_veronese_eddegree(&[1, 1]).unwrap(), big(2));
        assert_eq!(binary_segre_veronese_eddegree(&[1, 1, 1]).unwrap(), big(6));
        assert_eq!(binary_segre_veronese_eddegree(&[2, 2]).unwrap(), big(8));
        assert!(binary_segre_veronese_eddegree(&[]).is_err());
        assert!(binary_segre_veronese_eddegree(&[2, 0]).is_err());
    }

    #[test]
    fn weyl_dimension_examples() {
        assert_eq!(flag_weyl_dimension(&FlagWeight::new(vec![3]).unwrap()).unwrap(), big(4));
        assert_eq!(
            flag_weyl_dimension(&FlagWeight::new(vec![1, 1]).unwrap()).unwrap(),
            big(8)
        );
        assert_eq!(
            flag_weyl_dimension(&FlagWeight::new(vec![2, 1]).unwrap()).unwrap(),
            big(15)
        );
        // sl4 adjoint (1,0,1) has dimension 15
        assert_eq!(
            flag_weyl_dimension(&FlagWeight::nonnegative(vec![1, 0, 1]).unwrap()).unwrap(),
            big(15)
        );
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(flag_hilbert(&FlagWeight::uniform(2, 1), 2).unwrap(), big(27));
        assert_eq!(flag_hilbert(&FlagWeight::new(vec![2, 3]).unwrap(), 0).unwrap(), big(1));
        assert_eq!(flag_hilbert(&FlagWeight::uniform(1, 1), 5).unwrap(), big(6));
    }

    #[test]
    fn degree_examples() {
        assert_eq!(flag_degree(&FlagWeight::new(vec![1, 1]).unwrap()).unwrap(), big(6));
        assert_eq!(flag_degree(&FlagWeight::new(vec![2, 1]).unwrap()).unwrap(), big(18));
        assert_eq!(flag_degree(&FlagWeight::uniform(3, 1)).unwrap(), big(720));
        assert_eq!(flag_degree(&FlagWeight::uniform(1, 4)).unwrap(), big(4));
    }

    #[test]
    fn euler_examples() {
        assert_eq!(flag_euler_characteristic(1).unwrap(), big(2));
        assert_eq!(flag_euler_characteristic(2).unwrap(), big(6));
        assert_eq!(flag_euler_characteristic(3).unwrap(), big(24));
    }

    #[test]
    fn leading_term_matches_degree() {
        let w = FlagWeight::new(vec![1, 2, 1]).unwrap();
        assert_eq!(
            hilbert_leading_term_times_factorial(&w).unwrap(),
            flag_degree(&w).unwrap()
        );
        let lc = hilbert_leading_coefficient(&FlagWeight::uniform(2, 1)).unwrap();
        assert_eq!(lc, BigRational::one());
    }

    #[test]
    fn rejects_non_ample() {
        assert!(FlagWeight::new(vec![1, 0]).is_err());
        assert!(FlagWeight::new(vec![]).is_err());
        assert!(flag_euler_characteristic(0).is_err());
    }
}
