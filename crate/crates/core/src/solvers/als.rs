//! Real CP-ALS for rank-`q` approximation of an ordinary (all degrees 1) tensor.
//!
//! With factor matrices `A_1, …, A_k` (`A_p` is `(n_p+1) × q`), each sweep solves
//! `A_p V_p = M_p` for every `p`, where `M_p` is the MTTKRP of `f` against the other
//! factors and `V_p` is the Hadamard product of their Gram matrices.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{rng_from_seed, stream_seed, CriticalPoint, CriticalPointReport, SolverConfig};
use crate::critical::membership_residual;
use crate::error::{Error, Result};
use crate::tensor::{PsTensor, C64};

/// Ridge added (relative to `trace(V)/q`) when `V_p` is not positive definite.
pub const ALS_RIDGE: f64 = 1e-12;
/// Imaginary parts above this fraction of `‖f‖` make `f` non-real.
const REAL_TOL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlsOutcome {
    /// Approximant `X` with `first_order_residual` = stationarity and
    /// `membership_residual` = membership of `X` in `H_f`.
    pub report: CriticalPointReport,
    /// The fit change fell below `newton_tol` before `max_iters`.
    pub converged: bool,
    pub iterations: usize,
    /// `‖f − X‖ / ‖f‖`.
    pub relative_error: f64,
    /// `factors[p][r]` is the `r`-th column of `A_p`.
    pub factors: Vec<Vec<Vec<f64>>>,
}

struct Dense {
    dims: Vec<usize>,
    data: Vec<f64>,
}

impl Dense {
    /// Row-major multi-index of linear position `idx`.
    fn index(&self, mut idx: usize, out: &mut [usize]) {
        for p in (0..self.dims.len()).rev() {
            out[p] = idx % self.dims[p];
            idx /= self.dims[p];
        }
    }
}

fn reconstruct(dims: &[usize], a: &[DMatrix<f64>]) -> Vec<f64> {
    let size: usize = dims.iter().product();
    let rank = a[0].ncols();
    let shape = Dense {
        dims: dims.to_vec(),
        data: Vec::new(),
    };
    let mut ix = vec![0; dims.len()];
    (0..size)
        .map(|l| {
            shape.index(l, &mut ix);
            (0..rank)
                .map(|r| ix.iter().enumerate().map(|(p, &i)| a[p][(i, r)]).product::<f64>())
                .sum()
        })
        .collect()
}

/// `M_p[i][r] = Σ t[…i…] Π_{s≠p} A_s[i_s][r]`.
fn mttkrp(t: &Dense, a: &[DMatrix<f64>], p: usize) -> DMatrix<f64> {
    let rank = a[0].ncols();
    let mut m = DMatrix::zeros(t.dims[p], rank);
    let mut ix = vec![0; t.dims.len()];
    for (l, &x) in t.data.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        t.index(l, &mut ix);
        for r in 0..rank {
            let mut prod = x;
            for (s, &i) in ix.iter().enumerate() {
                if s != p {
                    prod *= a[s][(i, r)];
                }
            }
            m[(ix[p], r)] += prod;
        }
    }
    m
}

fn hadamard_gram(a: &[DMatrix<f64>], p: usize) -> DMatrix<f64> {
    let rank = a[0].ncols();
    let mut v = DMatrix::from_element(rank, rank, 1.0);
    for (s, m) in a.iter().enumerate() {
        if s != p {
            v.component_mul_assign(&(m.transpose() * m));
        }
    }
    v
}

/// `M V^{-1}` for symmetric positive semidefinite `V`.
fn right_solve(m: &DMatrix<f64>, v: DMatrix<f64>) -> DMatrix<f64> {
    let rank = v.nrows();
    let chol = v.clone().cholesky().or_else(|| {
        let ridge = ALS_RIDGE * (v.trace() / rank as f64).max(f64::MIN_POSITIVE);
        (v + DMatrix::identity(rank, rank) * ridge).cholesky()
    });
    match chol {
        Some(c) => c.solve(&m.transpose()).transpose(),
        None => m.clone() * 0.0,
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Columns of all but the last factor scaled to unit norm, norms moved to the last.
fn balance(a: &mut [DMatrix<f64>]) {
    let k = a.len();
    for r in 0..a[0].ncols() {
        for p in 0..k - 1 {
            let n = a[p].column(r).norm();
            if n > 0.0 {
                a[p].column_mut(r).scale_mut(1.0 / n);
                a[k - 1].column_mut(r).scale_mut(n);
            }
        }
    }
}

/// `max_p ‖(f − X)_(p) K_p‖_F ‖A_p‖_F / (‖f‖ ‖X‖)`, the gradient of `½‖f − X‖²` in each
/// factor block, made scale-free.
fn stationarity(t: &Dense, a: &[DMatrix<f64>], x: &[f64]) -> f64 {
    let resid = Dense {
        dims: t.dims.clone(),
        data: t.data.iter().zip(x).map(|(f, y)| f - y).collect(),
    };
    let denom = norm(&t.data) * norm(x);
    if denom == 0.0 {
        return 0.0;
    }
    (0..a.len())
        .map(|p| mttkrp(&resid, a, p).norm() * a[p].norm() / denom)
        .fold(0.0, f64::max)
}

struct Run {
    factors: Vec<DMatrix<f64>>,
    error: f64,
    iterations: usize,
    converged: bool,
}

fn run(t: &Dense, rank: usize, cfg: &SolverConfig, seed: u64) -> Run {
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = rng_from_seed(seed);
    let mut a: Vec<DMatrix<f64>> = t
        .dims
        .iter()
        .map(|&n| DMatrix::from_fn(n, rank, |_, _| StandardNormal.sample(&mut rng)))
        .collect();
    let fnorm = norm(&t.data);
    let mut prev = f64::INFINITY;
    let mut error = prev;
    for it in 1..=cfg.max_iters {
        for p in 0..a.len() {
            let m = mttkrp(t, &a, p);
            a[p] = right_solve(&m, hadamard_gram(&a, p));
        }
        balance(&mut a);
        let x = reconstruct(&t.dims, &a);
        error = t
            .data
            .iter()
            .zip(&x)
            .map(|(f, y)| (f - y) * (f - y))
            .sum::<f64>()
            .sqrt()
            / fnorm;
        if !error.is_finite() {
            break;
        }
        if (prev - error).abs() <= cfg.newton_tol {
            return Run {
                factors: a,
                error,
                iterations: it,
                converged: true,
            };
        }
        prev = error;
    }
    Run {
        factors: a,
        error,
        iterations: cfg.max_iters,
        converged: false,
    }
}

/// Best of `cfg.restarts` ALS runs for a rank-`rank` approximation of a real ordinary
/// tensor `f`.
pub fn cp_als(f: &PsTensor, rank: usize, cfg: &SolverConfig) -> Result<AlsOutcome> {
    cfg.validate()?;
    let shape = f.shape();
    if shape.degrees().iter().any(|&d| d != 1) {
        return Err(Error::InvalidInput("CP-ALS needs every degree to be 1".into()));
    }
    if rank == 0 {
        return Err(Error::InvalidInput("rank must be ≥ 1".into()));
    }
    let scale = f.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::InvalidInput("f = 0".into()));
    }
    if f.coeffs().iter().any(|c| c.im.abs() > REAL_TOL * scale) {
        return Err(Error::InvalidInput(
            "CP-ALS runs over the reals; f has imaginary parts".into(),
        ));
    }
    let t = Dense {
        dims: shape.dims(),
        data: f.coeffs().iter().map(|c| c.re).collect(),
    };
    let mut best: Option<(Run, u64, usize)> = None;
    for r in 0..cfg.restarts {
        let seed = stream_seed(cfg.master_seed, r as u64);
        let candidate = run(&t, rank, cfg, seed);
        let better = match &best {
            None => true,
            Some((b, _, _)) => {
                (candidate.converged && !b.converged)
                    || (candidate.converged == b.converged && candidate.error < b.error)
            }
        };
        if better {
            best = Some((candidate, seed, r));
        }
    }
    let (run, seed, restart) = best.expect("restarts ≥ 1");
    let x = reconstruct(&t.dims, &run.factors);
    let approx = PsTensor::new(shape.clone(), x.iter().map(|&v| C64::new(v, 0.0)).collect())?;
    let membership = if approx.is_zero() {
        0.0
    } else {
        membership_residual(&approx, f)?
    };
    let report = CriticalPointReport {
        point: CriticalPoint::Tensor {
            coeffs: approx.coeffs().to_vec(),
        },
        first_order_residual: stationarity(&t, &run.factors, &x),
        membership_residual: membership,
        cluster_size: 1,
        seed,
        restart_index: restart,
        isotropic: false,
        lambda: None,
        rescaling_residual: None,
    };
    Ok(AlsOutcome {
        report,
        converged: run.converged,
        iterations: run.iterations,
        relative_error: run.error,
        factors: run
            .factors
            .iter()
            .map(|m| m.column_iter().map(|c| c.iter().copied().collect()).collect())
            .collect(),
    })
}
