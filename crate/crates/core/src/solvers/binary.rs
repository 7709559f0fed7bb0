//! Eigenvectors of binary forms: the roots of `D_01 f = ∂_0 f · x_1 − ∂_1 f · x_0`.

use serde::{Deserialize, Serialize};

use super::dedupe::dedupe_projective;
use super::ISOTROPIC_REL;
use crate::cjson;
use crate::critical::infinitesimal_generators;
use crate::error::{Error, Result};
use crate::frobenius::hermitian_norm;
use crate::linalg::polynomial_roots;
use crate::tensor::{hermitian_vec_norm, normalize, PsTensor, C64, ONE, ZERO};

/// Relative size below which `D_01 f` counts as identically zero.
const DEGENERATE_REL: f64 = 1e-12;
/// Relative size below which a top coefficient counts as vanished (root at infinity).
const LEADING_REL: f64 = 1e-13;
/// Roots closer than this (Fubini–Study) are merged into one root with multiplicity.
const MULTIPLICITY_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinaryRoot {
    /// Unit representative `(x_0, x_1)`.
    #[serde(with = "cjson::vec")]
    pub point: Vec<C64>,
    pub multiplicity: usize,
    pub isotropic: bool,
}

fn check_binary(f: &PsTensor) -> Result<usize> {
    let fac = f.shape().factors();
    if fac.len() != 1 || fac[0].dim != 2 {
        return Err(Error::InvalidInput(format!("binary form expected, got shape {fac:?}")));
    }
    Ok(fac[0].degree)
}

fn horner(ascending: &[C64], t: C64) -> (C64, C64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for &c in ascending.iter().rev() {
        dp = dp * t + p;
        p = p * t + c;
    }
    (p, dp)
}

/// A few Newton steps on the dehomogenized form, in whichever chart keeps |t| ≤ 1.
fn polish(ascending: &[C64], t: C64) -> C64 {
    let reversed: Vec<C64> = ascending.iter().rev().copied().collect();
    let (poly, mut z, inverted) = if t.norm() > 1.0 {
        (&reversed[..], ONE / t, true)
    } else {
        (ascending, t, false)
    };
    for _ in 0..3 {
        let (p, dp) = horner(poly, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        if !(step.re.is_finite() && step.im.is_finite()) || step.norm() > 1e-3 * (1.0 + z.norm()) {
            break;
        }
        z -= step;
    }
    if inverted {
        ONE / z
    } else {
        z
    }
}

/// Projective roots of a nonzero binary form `g` of degree `d`, with multiplicities
/// summing to `d`.
pub fn binary_form_roots(g: &PsTensor) -> Result<Vec<BinaryRoot>> {
    let d = check_binary(g)?;
    // coefficient m belongs to x0^{d-m} x1^m, so g(1, t) = Σ_m g_m t^m
    let coeffs = g.coeffs();
    let top = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if top == 0.0 {
        return Err(Error::InvalidInput("zero binary form has no root set".into()));
    }
    let mut deg = d;
    while coeffs[deg].norm() <= LEADING_REL * top {
        deg -= 1;
    }
    let at_infinity = d - deg;
    let finite = &coeffs[..=deg];
    let mut points: Vec<Vec<Vec<C64>>> = polynomial_roots(finite)
        .into_iter()
        .map(|t| {
            let t = polish(finite, t);
            vec![normalize(&[ONE, t])]
        })
        .collect();
    points.extend((0..at_infinity).map(|_| vec![vec![ZERO, ONE]]));

    let clusters = dedupe_projective(&points, MULTIPLICITY_TOL);
    Ok(clusters
        .into_iter()
        .map(|c| {
            let v = points[c.representative][0].clone();
            let qv = v[0] * v[0] + v[1] * v[1];
            BinaryRoot {
                isotropic: qv.norm() <= ISOTROPIC_REL * hermitian_vec_norm(&v).powi(2),
                point: v,
                multiplicity: c.multiplicity(),
            }
        })
        .collect())
}

/// All eigenvectors of a binary form `f`, i.e. the projective roots of `D_01 f`.
///
/// Returns [`Error::OrbitDegenerate`] when `D_01 f ≡ 0` (e.g. `f` a power of `x_0² + x_1²`).
pub fn binary_eigenvectors(f: &PsTensor) -> Result<Vec<BinaryRoot>> {
    let d = check_binary(f)?;
    if d == 0 {
        return Err(Error::DegreeZero { factor: 0 });
    }
    let fnorm = hermitian_norm(f);
    if fnorm == 0.0 {
        return Err(Error::InvalidInput("f = 0".into()));
    }
    let gens = infinitesimal_generators(f)?;
    let g = &gens.generators[0];
    if hermitian_norm(g) <= DEGENERATE_REL * fnorm {
        return Err(Error::OrbitDegenerate);
    }
    binary_form_roots(g)
}
