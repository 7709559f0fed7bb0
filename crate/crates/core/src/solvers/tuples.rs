//! Singular tuples (eigenvectors when `k = 1`) by multistart complex Newton.
//!
//! Unknowns: `v_p ∈ C^{n_p+1}` for every factor. Per factor and restart we draw a chart
//! covector `ℓ_p`, an elimination covector `m_p` and an `n_p × (n_p+1)` projection `B_p`,
//! and solve the square system
//!
//! ```text
//! ℓ_p(v_p) = 1,      B_p (g_p − λ_p v_p) = 0,      λ_p = m_p(g_p) / m_p(v_p),
//! ```
//!
//! where `g_p = ∇_p f(v_1, …, v_k)`. The vector `g_p − λ_p v_p` always lies in `ker m_p`,
//! so `B_p` is generically injective on it.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{
    complex_gaussian_vec, dedupe_projective, rng_from_seed, stream_seed, tally, Certified, CriticalPoint,
    CriticalPointReport, RestartResult, SolveDiagnostics, SolveOutcome, SolverConfig, ISOTROPIC_REL,
};
use crate::critical::{infinitesimal_generators, membership_residual_with};
use crate::error::{Error, Result};
use crate::frobenius::{frobenius_inner, hermitian_norm};
use crate::linalg;
use crate::tensor::{hermitian_vec_norm, PsTensor, VectorTuple, C64, ZERO};

/// Gradient below this fraction of `‖f‖` at a unit tuple is treated as vanishing.
const VANISHING_GRADIENT_REL: f64 = 1e-10;
const DIVERGENCE_NORM: f64 = 1e8;

/// `max_p ‖g_p ∧ v_p‖ / (‖g_p‖ ‖v_p‖)`, the chart-free parallelism residual, or `None`
/// if some partial gradient vanishes.
pub fn minor_residual(f: &PsTensor, t: &VectorTuple) -> Result<Option<f64>> {
    let fnorm = hermitian_norm(f);
    let unit = t.normalized();
    let mut worst: f64 = 0.0;
    for p in 0..t.len() {
        let g = f.gradient_contraction(&unit, p)?;
        let gn = hermitian_vec_norm(&g);
        if gn <= VANISHING_GRADIENT_REL * fnorm {
            return Ok(None);
        }
        worst = worst.max(wedge_norm(&g, &unit.vectors()[p]) / gn);
    }
    Ok(Some(worst))
}

/// `sqrt(Σ_{i<j} |a_i b_j − a_j b_i|²) / ‖b‖`.
fn wedge_norm(a: &[C64], b: &[C64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            s += (a[i] * b[j] - a[j] * b[i]).norm_sqr();
        }
    }
    s.sqrt() / hermitian_vec_norm(b)
}

/// Gradient and Hessian tensors of `f`, computed once per solve.
struct Calculus {
    dims: Vec<usize>,
    offsets: Vec<usize>,
    grad: Vec<Vec<PsTensor>>,
    /// `hess[p][i][q][j] = ∂²f / ∂x_{p,i} ∂x_{q,j}`; `None` where it vanishes identically.
    hess: Vec<Vec<Vec<Vec<Option<PsTensor>>>>>,
}

impl Calculus {
    fn new(f: &PsTensor) -> Result<Self> {
        let dims = f.shape().dims();
        let mut offsets = vec![0];
        for d in &dims {
            offsets.push(offsets.last().unwrap() + d);
        }
        let grad: Vec<Vec<PsTensor>> = (0..dims.len())
            .map(|p| (0..dims[p]).map(|i| f.partial_derivative(p, i)).collect())
            .collect::<Result<_>>()?;
        let hess = grad
            .iter()
            .map(|gp| {
                gp.iter()
                    .map(|g| {
                        (0..dims.len())
                            .map(|q| {
                                (0..dims[q])
                                    .map(|j| {
                                        if g.shape().factors()[q].degree == 0 {
                                            None
                                        } else {
                                            g.partial_derivative(q, j).ok()
                                        }
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            dims,
            offsets,
            grad,
            hess,
        })
    }

    fn unknowns(&self) -> usize {
        *self.offsets.last().unwrap()
    }
}

/// Random data defining one restart's square system.
struct Chart {
    ell: Vec<Vec<C64>>,
    m: Vec<Vec<C64>>,
    proj: Vec<Vec<Vec<C64>>>,
}

impl Chart {
    fn draw(dims: &[usize], rng: &mut rand_chacha::ChaCha8Rng) -> Self {
        let ell = dims.iter().map(|&n| complex_gaussian_vec(rng, n)).collect();
        let m = dims.iter().map(|&n| complex_gaussian_vec(rng, n)).collect();
        let proj = dims
            .iter()
            .map(|&n| (0..n - 1).map(|_| complex_gaussian_vec(rng, n)).collect())
            .collect();
        Self { ell, m, proj }
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Residual and Jacobian of the chart system at `v`.
fn system(calc: &Calculus, chart: &Chart, v: &[Vec<C64>]) -> Option<(Vec<C64>, DMatrix<C64>)> {
    let n = calc.unknowns();
    let k = calc.dims.len();
    let mut res = vec![ZERO; n];
    let mut jac = DMatrix::from_element(n, n, ZERO);
    for p in 0..k {
        let np = calc.dims[p];
        let row0 = calc.offsets[p];
        let g: Vec<C64> = calc.grad[p].iter().map(|t| t.evaluate_unchecked(v)).collect();
        let mv = dot(&chart.m[p], &v[p]);
        if mv.norm() == 0.0 {
            return None;
        }
        let mg = dot(&chart.m[p], &g);
        let lambda = mg / mv;

        res[row0] = dot(&chart.ell[p], &v[p]) - 1.0;
        for j in 0..np {
            jac[(row0, row0 + j)] = chart.ell[p][j];
        }

        let r: Vec<C64> = g.iter().zip(&v[p]).map(|(gi, vi)| gi - lambda * vi).collect();
        for (a, b_row) in chart.proj[p].iter().enumerate() {
            res[row0 + 1 + a] = dot(b_row, &r);
        }

        for q in 0..k {
            for j in 0..calc.dims[q] {
                let col = calc.offsets[q] + j;
                // ∂g_p[i] / ∂v_q[j]
                let dg: Vec<C64> = (0..np)
                    .map(|i| calc.hess[p][i][q][j].as_ref().map_or(ZERO, |h| h.evaluate_unchecked(v)))
                    .collect();
                let mut dlambda = dot(&chart.m[p], &dg) / mv;
                if p == q {
                    dlambda -= mg * chart.m[p][j] / (mv * mv);
                }
                let dr: Vec<C64> = (0..np)
                    .map(|i| {
                        let mut x = dg[i] - dlambda * v[p][i];
                        if p == q && i == j {
                            x -= lambda;
                        }
                        x
                    })
                    .collect();
                for (a, b_row) in chart.proj[p].iter().enumerate() {
                    jac[(row0 + 1 + a, col)] = dot(b_row, &dr);
                }
            }
        }
    }
    Some((res, jac))
}

fn flatten(v: &[Vec<C64>]) -> Vec<C64> {
    v.iter().flatten().copied().collect()
}

/// Newton iteration from a random start; returns the converged tuple.
fn newton(calc: &Calculus, chart: &Chart, mut v: Vec<Vec<C64>>, cfg: &SolverConfig) -> Option<Vec<Vec<C64>>> {
    let mut polish = 0;
    for _ in 0..cfg.max_iters {
        let (res, jac) = system(calc, chart, &v)?;
        let neg: Vec<C64> = res.iter().map(|r| -r).collect();
        let step = linalg::solve(jac, &neg)?;
        let scale = hermitian_vec_norm(&flatten(&v));
        for p in 0..v.len() {
            for i in 0..calc.dims[p] {
                v[p][i] += step[calc.offsets[p] + i];
            }
        }
        let vn = hermitian_vec_norm(&flatten(&v));
        if !vn.is_finite() || vn > DIVERGENCE_NORM {
            return None;
        }
        if hermitian_vec_norm(&step) <= cfg.newton_tol * scale.max(1.0) {
            polish += 1;
            if polish >= 2 {
                return Some(v);
            }
        }
    }
    None
}

fn run_restart(f: &PsTensor, calc: &Calculus, cfg: &SolverConfig, restart: usize) -> RestartResult {
    let seed = stream_seed(cfg.master_seed, restart as u64);
    let mut rng = rng_from_seed(seed);
    let chart = Chart::draw(&calc.dims, &mut rng);
    let start: Vec<Vec<C64>> = calc
        .dims
        .iter()
        .enumerate()
        .map(|(p, &n)| {
            let v = complex_gaussian_vec(&mut rng, n);
            let l = dot(&chart.ell[p], &v);
            v.iter().map(|x| x / l).collect()
        })
        .collect();
    let Some(v) = newton(calc, &chart, start, cfg) else {
        return RestartResult::Diverged;
    };
    let Ok(t) = VectorTuple::new(v) else {
        return RestartResult::Rejected;
    };
    match minor_residual(f, &t) {
        Ok(Some(r)) if r <= cfg.certify_tol => RestartResult::Certified {
            vectors: t.normalized().into_vectors(),
            residual: r,
            seed,
            restart,
        },
        _ => RestartResult::Rejected,
    }
}

/// Builds the reports for clustered certified points of a tuple solve.
fn report(
    f: &PsTensor,
    certified: Vec<Certified>,
    cfg: &SolverConfig,
    diagnostics: SolveDiagnostics,
) -> Result<SolveOutcome> {
    let gens = infinitesimal_generators(f)?;
    let fnorm = hermitian_norm(f);
    let points: Vec<Vec<Vec<C64>>> = certified.iter().map(|c| c.0.clone()).collect();
    let mut out = SolveOutcome {
        diagnostics,
        ..Default::default()
    };
    for cluster in dedupe_projective(&points, cfg.dedupe_tol) {
        let (vectors, residual, seed, restart) = &certified[cluster.representative];
        let t = VectorTuple::new(vectors.clone())?;
        let x = PsTensor::rank_one(&t, f.shape())?;
        let xx = frobenius_inner(&x, &x)?;
        let xnorm = hermitian_norm(&x);
        let isotropic = xx.norm() <= ISOTROPIC_REL * xnorm * xnorm;
        let (lambda, rescaling_residual, membership) = if isotropic {
            (None, None, membership_residual_with(&x, &gens))
        } else {
            let lambda = frobenius_inner(&x, f)? / xx;
            let scaled = x.scale(lambda);
            let diff = scaled.checked_sub(f)?;
            let sn = hermitian_norm(&scaled);
            let rr = frobenius_inner(&scaled, &diff)?.norm() / (sn * (sn + fnorm)).max(f64::MIN_POSITIVE);
            (Some(lambda), Some(rr), membership_residual_with(&scaled, &gens))
        };
        let rep = CriticalPointReport {
            point: CriticalPoint::Tuple {
                vectors: vectors.clone(),
            },
            first_order_residual: *residual,
            membership_residual: membership,
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

/// Distinct singular tuples of `f` found by `cfg.restarts` Newton runs.
pub fn singular_tuples(f: &PsTensor, cfg: &SolverConfig) -> Result<SolveOutcome> {
    cfg.validate()?;
    if let Some(p) = f.shape().factors().iter().position(|fac| fac.degree == 0) {
        return Err(Error::DegreeZero { factor: p });
    }
    if f.is_zero() {
        return Err(Error::InvalidInput("f = 0".into()));
    }
    let calc = Calculus::new(f)?;
    let results: Vec<RestartResult> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_restart(f, &calc, cfg, r))
        .collect();
    let (diag, certified) = tally(cfg.restarts, results);
    report(f, certified, cfg, diag)
}
