//! Critical points of `d_f` on the Veronese, Segre–Veronese and Grassmann cones, and
//! CP-ALS for low-rank approximation.
//!
//! Tuple and Grassmann solvers run multistart Newton over the complex numbers in random
//! affine charts. A converged point is accepted only when a chart-free residual is below
//! [`SolverConfig::certify_tol`]; accepted points are then clustered in projective space.
//! Restart `r` draws from an RNG stream derived from `(master_seed, r)`, so reports do
//! not depend on how restarts are scheduled.

mod als;
mod binary;
mod dedupe;
mod grassmann;
mod tuples;

pub use als::{cp_als, AlsOutcome};
pub use binary::{binary_eigenvectors, binary_form_roots, BinaryRoot};
pub use dedupe::{dedupe_projective, fubini_study, tuple_distance, Cluster};
pub use grassmann::{grassmann_critical_points, tangency_residual};
pub use tuples::{minor_residual, singular_tuples};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::cjson;
use crate::tensor::C64;

/// `q(x, x)` below this fraction of `‖x‖²` marks `x` as isotropic.
pub const ISOTROPIC_REL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Newton stops once the step is below this (relative); ALS once the fit changes less.
    pub newton_tol: f64,
    /// Projective distance under which two certified points are the same.
    pub dedupe_tol: f64,
    /// Chart-free residual a converged point must reach to count as critical.
    pub certify_tol: f64,
    pub master_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_iters: 80,
            newton_tol: 1e-12,
            dedupe_tol: 1e-6,
            certify_tol: 1e-9,
            master_seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> crate::Result<()> {
        let in_unit = |x: f64| x > 0.0 && x < 1.0;
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(crate::Error::InvalidInput("restarts and max_iters must be ≥ 1".into()));
        }
        if !(in_unit(self.newton_tol) && in_unit(self.dedupe_tol) && in_unit(self.certify_tol)) {
            return Err(crate::Error::InvalidInput("tolerances must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// splitmix64 finalizer.
pub fn mix_seed(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of stream `index` under `master`.
pub fn stream_seed(master: u64, index: u64) -> u64 {
    mix_seed(master ^ mix_seed(index.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn complex_gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub(crate) fn complex_gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| complex_gaussian(rng)).collect()
}

/// What was found: a tuple, the spanning vectors of a plane, or a full tensor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CriticalPoint {
    Tuple {
        #[serde(with = "cjson::vecvec")]
        vectors: Vec<Vec<C64>>,
    },
    Plane {
        #[serde(with = "cjson::vecvec")]
        vectors: Vec<Vec<C64>>,
    },
    Tensor {
        #[serde(with = "cjson::vec")]
        coeffs: Vec<C64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPointReport {
    pub point: CriticalPoint,
    pub first_order_residual: f64,
    pub membership_residual: f64,
    pub cluster_size: usize,
    pub seed: u64,
    pub restart_index: usize,
    pub isotropic: bool,
    /// `q(x, f) / q(x, x)` for non-isotropic points.
    #[serde(with = "cjson::option")]
    pub lambda: Option<C64>,
    /// `|q(λx, λx − f)|` relative to `‖λx‖(‖λx‖ + ‖f‖)`.
    pub rescaling_residual: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub restarts: usize,
    pub converged: usize,
    pub certified: usize,
    pub diverged: usize,
    pub rejected: usize,
}

/// Distinct certified critical points; isotropic ones are kept apart.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub points: Vec<CriticalPointReport>,
    pub isotropic: Vec<CriticalPointReport>,
    pub diagnostics: SolveDiagnostics,
}

impl SolveOutcome {
    /// Number of distinct certified points, isotropic included.
    pub fn distinct_count(&self) -> usize {
        self.points.len() + self.isotropic.len()
    }

    pub fn all_points(&self) -> impl Iterator<Item = &CriticalPointReport> {
        self.points.iter().chain(&self.isotropic)
    }
}

/// Outcome of one Newton restart before clustering.
#[derive(Clone, Debug)]
pub(crate) enum RestartResult {
    Certified {
        vectors: Vec<Vec<C64>>,
        residual: f64,
        seed: u64,
        restart: usize,
    },
    Rejected,
    Diverged,
}

/// A certified restart: unit vectors, residual, stream seed, restart index.
pub(crate) type Certified = (Vec<Vec<C64>>, f64, u64, usize);

/// Counts restart outcomes, keeping certified points in restart order.
pub(crate) fn tally(restarts: usize, results: Vec<RestartResult>) -> (SolveDiagnostics, Vec<Certified>) {
    let mut diag = SolveDiagnostics {
        restarts,
        ..Default::default()
    };
    let mut certified = Vec::new();
    for r in results {
        match r {
            RestartResult::Certified {
                vectors,
                residual,
                seed,
                restart,
            } => {
                diag.converged += 1;
                diag.certified += 1;
                certified.push((vectors, residual, seed, restart));
            }
            RestartResult::Rejected => {
                diag.converged += 1;
                diag.rejected += 1;
            }
            RestartResult::Diverged => diag.diverged += 1,
        }
    }
    (diag, certified)
}
