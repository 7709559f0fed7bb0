//! Critical points of `d_f` on the cone over `Gr(k, W) ⊂ P(∧^k W)`.
//!
//! A point `x = λ w_1 ∧ … ∧ w_k` is critical iff `q(f − x, τ) = 0` for every `τ` in the
//! tangent space `span{w_1 ∧ … ∧ u ∧ … ∧ w_k}` (slot `a` replaced by `u ∈ W`) and for
//! `τ = v = w_1 ∧ … ∧ w_k`. Newton runs on `(Y, λ)` in the chart
//! `w_a = p_a + Σ_b Y_ab p_{k+b}` for a random frame `p_0, …, p_n`, with one equation per
//! chart direction `τ_ab = ∂v/∂Y_ab` plus the one along `v`. Keeping `λ` as an unknown
//! avoids the spurious family `q(v, v) = q(f, v) = 0` of the projective formulation.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{
    complex_gaussian_vec, dedupe_projective, rng_from_seed, stream_seed, tally, Certified, CriticalPoint,
    CriticalPointReport, RestartResult, SolveDiagnostics, SolveOutcome, SolverConfig, ISOTROPIC_REL,
};
use crate::critical::membership_residual_with;
use crate::error::{Error, Result};
use crate::exterior::{decomposable, gram_inner, so_generators_ext, AlternatingTensor};
use crate::frobenius::{hermitian_norm_of, q};
use crate::linalg;
use crate::tensor::{hermitian_vec_norm, normalize, C64, ZERO};

/// `|q(f, v)|` below this fraction of `‖f‖ ‖v‖` puts the critical point at the vertex.
const VERTEX_REL: f64 = 1e-10;
const DIVERGENCE_NORM: f64 = 1e8;
const MAX_HALVINGS: usize = 12;
/// Tangent vectors this small (after orthonormalizing the plane) are skipped.
const NULL_TANGENT: f64 = 1e-12;

fn wedge_all(vs: &[Vec<C64>]) -> AlternatingTensor {
    decomposable(vs).expect("vectors share the ambient dimension")
}

fn norm(t: &AlternatingTensor) -> f64 {
    hermitian_norm_of(t.coeffs())
}

/// Hermitian Gram–Schmidt; `None` if the vectors are numerically dependent.
fn orthonormalize(vs: &[Vec<C64>]) -> Option<Vec<Vec<C64>>> {
    let scale = vs.iter().map(|v| hermitian_vec_norm(v)).fold(0.0, f64::max);
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(vs.len());
    for v in vs {
        let mut w = v.clone();
        for u in &out {
            let c: C64 = u.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in w.iter_mut().zip(u) {
                *x -= c * y;
            }
        }
        if hermitian_vec_norm(&w) <= 1e-12 * scale {
            return None;
        }
        out.push(normalize(&w));
    }
    Some(out)
}

/// Chart-free first-order residual of the plane spanned by `vectors`:
/// `max_τ |q(f, τ) q(v, v) − q(f, v) q(v, τ)| / (‖f‖ ‖τ‖ ‖v‖²)` over the tangent vectors
/// `τ_{a,m}` (slot `a` of an orthonormal frame replaced by `e_m`).
pub fn tangency_residual(f: &AlternatingTensor, vectors: &[Vec<C64>]) -> Result<f64> {
    if vectors.len() != f.k() {
        return Err(Error::InvalidInput(format!(
            "{} vectors for a point of ∧^{}",
            vectors.len(),
            f.k()
        )));
    }
    if let Some(bad) = vectors.iter().find(|v| v.len() != f.dim()) {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: bad.len(),
        });
    }
    let u = orthonormalize(vectors).ok_or(Error::ZeroVector(0))?;
    let v = wedge_all(&u);
    let fnorm = norm(f);
    let qvv = q(&v, &v);
    let qfv = q(f, &v);
    let mut worst: f64 = 0.0;
    for a in 0..u.len() {
        for m in 0..f.dim() {
            let mut frame = u.clone();
            frame[a] = AlternatingTensor::basis_vector(f.dim(), m).coeffs().to_vec();
            let tau = wedge_all(&frame);
            let tn = norm(&tau);
            if tn <= NULL_TANGENT {
                continue;
            }
            let e = q(f, &tau) * qvv - qfv * q(&v, &tau);
            worst = worst.max(e.norm() / (fnorm * tn));
        }
    }
    Ok(worst)
}

struct Frame {
    p: Vec<Vec<C64>>,
}

impl Frame {
    fn planes(&self, k: usize, y: &[Vec<C64>]) -> Vec<Vec<C64>> {
        (0..k)
            .map(|a| {
                let mut w = self.p[a].clone();
                for (b, yab) in y[a].iter().enumerate() {
                    for (x, pb) in w.iter_mut().zip(&self.p[k + b]) {
                        *x += yab * pb;
                    }
                }
                w
            })
            .collect()
    }
}

/// Residuals `q(f − λv, τ_ab)` and `q(f − λv, v)` with their Jacobian in `(Y, λ)`,
/// `Y` in row-major `(a, b)` order followed by `λ`.
fn system(f: &AlternatingTensor, frame: &Frame, k: usize, y: &[Vec<C64>], lambda: C64) -> (Vec<C64>, DMatrix<C64>) {
    let r = y[0].len();
    let n = k * r;
    let w = frame.planes(k, y);
    let v = wedge_all(&w);
    let replaced = |slots: &[(usize, usize)]| {
        let mut fr = w.clone();
        for &(a, b) in slots {
            fr[a] = frame.p[k + b].clone();
        }
        wedge_all(&fr)
    };
    let taus: Vec<AlternatingTensor> = (0..n).map(|i| replaced(&[(i / r, i % r)])).collect();
    let qvv = q(&v, &v);
    let qfv = q(f, &v);
    let qft: Vec<C64> = taus.iter().map(|t| q(f, t)).collect();
    let qvt: Vec<C64> = taus.iter().map(|t| q(&v, t)).collect();

    let mut res: Vec<C64> = (0..n).map(|i| qft[i] - lambda * qvt[i]).collect();
    res.push(qfv - lambda * qvv);
    let mut jac = DMatrix::from_element(n + 1, n + 1, ZERO);
    for i in 0..n {
        let (a, b) = (i / r, i % r);
        for j in 0..n {
            let (c, d) = (j / r, j % r);
            let (qfs, qvs) = if a == c {
                (ZERO, ZERO)
            } else {
                let s = replaced(&[(a, b), (c, d)]);
                (q(f, &s), q(&v, &s))
            };
            jac[(i, j)] = qfs - lambda * (q(&taus[j], &taus[i]) + qvs);
        }
        jac[(i, n)] = -qvt[i];
        jac[(n, i)] = qft[i] - 2.0 * lambda * qvt[i];
    }
    jac[(n, n)] = -qvv;
    (res, jac)
}

fn residual_norm(f: &AlternatingTensor, frame: &Frame, k: usize, y: &[Vec<C64>], lambda: C64) -> f64 {
    let r = y[0].len();
    let w = frame.planes(k, y);
    let v = wedge_all(&w);
    let mut res: Vec<C64> = (0..k * r)
        .map(|i| {
            let mut fr = w.clone();
            fr[i / r] = frame.p[k + i % r].clone();
            let tau = wedge_all(&fr);
            q(f, &tau) - lambda * q(&v, &tau)
        })
        .collect();
    res.push(q(f, &v) - lambda * q(&v, &v));
    hermitian_vec_norm(&res)
}

/// Damped Newton: each step is halved until the residual norm decreases.
fn newton(
    f: &AlternatingTensor,
    frame: &Frame,
    k: usize,
    mut y: Vec<Vec<C64>>,
    cfg: &SolverConfig,
) -> Option<Vec<Vec<C64>>> {
    let r = y[0].len();
    let v0 = wedge_all(&frame.planes(k, &y));
    let mut lambda = q(f, &v0) / q(&v0, &v0);
    let mut polish = 0;
    for _ in 0..cfg.max_iters {
        let (res, jac) = system(f, frame, k, &y, lambda);
        let current = hermitian_vec_norm(&res);
        let neg: Vec<C64> = res.iter().map(|x| -x).collect();
        let step = linalg::solve(jac, &neg)?;
        let mut flat: Vec<C64> = y.iter().flatten().copied().collect();
        flat.push(lambda);
        let scale = hermitian_vec_norm(&flat).max(1.0);
        let mut t = 1.0;
        let (mut y_next, mut l_next) = (y.clone(), lambda);
        for _ in 0..MAX_HALVINGS {
            y_next = y.clone();
            for (i, s) in step[..k * r].iter().enumerate() {
                y_next[i / r][i % r] += s * t;
            }
            l_next = lambda + step[k * r] * t;
            if residual_norm(f, frame, k, &y_next, l_next) < current {
                break;
            }
            t *= 0.5;
        }
        y = y_next;
        lambda = l_next;
        let mut flat: Vec<C64> = y.iter().flatten().copied().collect();
        flat.push(lambda);
        let norm = hermitian_vec_norm(&flat);
        if !norm.is_finite() || norm > DIVERGENCE_NORM {
            return None;
        }
        if t == 1.0 && hermitian_vec_norm(&step) <= cfg.newton_tol * scale {
            polish += 1;
            if polish >= 2 {
                return Some(frame.planes(k, &y));
            }
        }
    }
    None
}

fn run_restart(f: &AlternatingTensor, cfg: &SolverConfig, restart: usize) -> RestartResult {
    let k = f.k();
    let dim = f.dim();
    let seed = stream_seed(cfg.master_seed, restart as u64);
    let mut rng = rng_from_seed(seed);
    let frame = Frame {
        p: (0..dim).map(|_| complex_gaussian_vec(&mut rng, dim)).collect(),
    };
    let y0: Vec<Vec<C64>> = (0..k).map(|_| complex_gaussian_vec(&mut rng, dim - k)).collect();
    let Some(w) = newton(f, &frame, k, y0, cfg) else {
        return RestartResult::Diverged;
    };
    let Some(u) = orthonormalize(&w) else {
        return RestartResult::Rejected;
    };
    let v = wedge_all(&u);
    if q(f, &v).norm() <= VERTEX_REL * norm(f) * norm(&v) {
        return RestartResult::Rejected;
    }
    match tangency_residual(f, &u) {
        Ok(res) if res <= cfg.certify_tol => RestartResult::Certified {
            vectors: u,
            residual: res,
            seed,
            restart,
        },
        _ => RestartResult::Rejected,
    }
}

fn report(
    f: &AlternatingTensor,
    certified: Vec<Certified>,
    cfg: &SolverConfig,
    diagnostics: SolveDiagnostics,
) -> Result<SolveOutcome> {
    let gens = so_generators_ext(f)?;
    let fnorm = norm(f);
    let plucker: Vec<Vec<Vec<C64>>> = certified
        .iter()
        .map(|c| vec![wedge_all(&c.0).coeffs().to_vec()])
        .collect();
    let mut out = SolveOutcome {
        diagnostics,
        ..Default::default()
    };
    for cluster in dedupe_projective(&plucker, cfg.dedupe_tol) {
        let (vectors, residual, seed, restart) = &certified[cluster.representative];
        let v = wedge_all(vectors);
        let vv = gram_inner(&v, &v)?;
        let vn = norm(&v);
        let isotropic = vv.norm() <= ISOTROPIC_REL * vn * vn;
        let (lambda, rescaling_residual) = if isotropic {
            (None, None)
        } else {
            let lambda = q(f, &v) / vv;
            let scaled = v.scale(lambda);
            let sn = norm(&scaled);
            let rr = q(&scaled, &scaled.checked_sub(f)?).norm() / (sn * (sn + fnorm));
            (Some(lambda), Some(rr))
        };
        let rep = CriticalPointReport {
            point: CriticalPoint::Plane {
                vectors: vectors.clone(),
            },
            first_order_residual: *residual,
            membership_residual: membership_residual_with(&v, &gens),
            cluster_size: cluster.multiplicity(),
            seed: *seed,
            restart_index: *restart,
            isotropic,
            lambda,
            rescaling_residual,
        };
        if isotropic {
            out.isotropic.push(rep);
        } else {
            out.points.push(rep);
        }
    }
    Ok(out)
}

/// Distinct critical `k`-planes of `d_f` for `f ∈ ∧^k W`, found by `cfg.restarts`
/// Newton runs.
pub fn grassmann_critical_points(f: &AlternatingTensor, k: usize, cfg: &SolverConfig) -> Result<SolveOutcome> {
    cfg.validate()?;
    if k != f.k() {
        return Err(Error::InvalidInput(format!("k = {k} but f ∈ ∧^{}", f.k())));
    }
    if k == 0 || k >= f.dim() {
        return Err(Error::InvalidInput(format!("need 1 ≤ k < {}, got {k}", f.dim())));
    }
    if norm(f) == 0.0 {
        return Err(Error::InvalidInput("f = 0".into()));
    }
    let results: Vec<RestartResult> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_restart(f, cfg, r))
        .collect();
    let (diag, certified) = tally(cfg.restarts, results);
    report(f, certified, cfg, diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius::FrobeniusSpace;
    use crate::tensor::ONE;

    fn plucker(vectors: &[Vec<C64>]) -> Vec<C64> {
        normalize(wedge_all(vectors).weighted_coords().as_slice())
    }

    fn unit(dim: usize, j: usize) -> Vec<C64> {
        let mut v = vec![ZERO; dim];
        v[j] = ONE;
        v
    }

    fn cfg(restarts: usize) -> SolverConfig {
        SolverConfig {
            restarts,
            master_seed: 3,
            ..Default::default()
        }
    }

    #[test]
    fn decomposable_f_is_its_own_critical_point() {
        let f = wedge_all(&[unit(4, 0), unit(4, 1)]);
        assert!(tangency_residual(&f, &[unit(4, 0), unit(4, 1)]).unwrap() < 1e-15);
        let out = grassmann_critical_points(&f, 2, &cfg(300)).unwrap();
        let target = plucker(&[unit(4, 0), unit(4, 1)]);
        let hit = out.points.iter().find(|p| match &p.point {
            CriticalPoint::Plane { vectors: vs } => super::super::fubini_study(&plucker(vs), &target) < 1e-9,
            _ => false,
        });
        let hit = hit.expect("f itself is found");
        assert!(hit.first_order_residual <= 1e-10);
        assert!(hit.membership_residual <= 1e-10);
    }

    #[test]
    fn random_real_planes_lie_in_critical_space() {
        let coeffs: Vec<C64> = [0.4, -1.2, 0.3, 0.8, 0.5, -0.7]
            .iter()
            .map(|&x| C64::new(x, 0.0))
            .collect();
        let f = AlternatingTensor::new(4, 2, coeffs).unwrap();
        let out = grassmann_critical_points(&f, 2, &cfg(60)).unwrap();
        assert!(out.distinct_count() > 0);
        for p in out.all_points() {
            assert!(p.membership_residual <= 1e-8, "{}", p.membership_residual);
            assert!(p.first_order_residual <= 1e-9);
        }
        for p in &out.points {
            assert!(p.rescaling_residual.unwrap() <= 1e-9);
        }
    }

    #[test]
    fn non_critical_plane_has_large_residual() {
        let coeffs: Vec<C64> = [0.4, -1.2, 0.3, 0.8, 0.5, -0.7]
            .iter()
            .map(|&x| C64::new(x, 0.0))
            .collect();
        let f = AlternatingTensor::new(4, 2, coeffs).unwrap();
        assert!(tangency_residual(&f, &[unit(4, 0), unit(4, 2)]).unwrap() > 1e-3);
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let mut rng = rng_from_seed(5);
        let (dim, k) = (5, 2);
        let f = AlternatingTensor::new(dim, k, complex_gaussian_vec(&mut rng, 10)).unwrap();
        let frame = Frame {
            p: (0..dim).map(|_| complex_gaussian_vec(&mut rng, dim)).collect(),
        };
        let y: Vec<Vec<C64>> = (0..k).map(|_| complex_gaussian_vec(&mut rng, dim - k)).collect();
        let lambda = C64::new(0.3, -0.7);
        let (_, jac) = system(&f, &frame, k, &y, lambda);
        let r = dim - k;
        let h = 1e-6;
        for col in 0..k * r {
            let mut yp = y.clone();
            yp[col / r][col % r] += h;
            let mut ym = y.clone();
            ym[col / r][col % r] -= h;
            let (rp, _) = system(&f, &frame, k, &yp, lambda);
            let (rm, _) = system(&f, &frame, k, &ym, lambda);
            for row in 0..=k * r {
                let fd = (rp[row] - rm[row]) / (2.0 * h);
                assert!((fd - jac[(row, col)]).norm() < 1e-6, "({row}, {col})");
            }
        }
        let (rp, _) = system(&f, &frame, k, &y, lambda + h);
        let (rm, _) = system(&f, &frame, k, &y, lambda - h);
        for row in 0..=k * r {
            let fd = (rp[row] - rm[row]) / (2.0 * h);
            assert!((fd - jac[(row, k * r)]).norm() < 1e-6);
        }
    }

    #[test]
    fn rejects_wrong_k() {
        let f = AlternatingTensor::basis_vector(3, 0);
        assert!(grassmann_critical_points(&f, 2, &cfg(2)).is_err());
    }
}
