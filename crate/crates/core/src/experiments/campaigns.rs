use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use super::{
    gaussian_vector, random_alternating, random_tensor, run_grid, AssertionResult, Campaign, Field, GridShape,
    InstanceRecord, Space, Status,
};
use crate::critical::{
    critical_space_basis, infinitesimal_generators, membership_residual, membership_residual_ext, orbit_dimension,
    projective_orbit_dimension, DEFAULT_RANK_TOL,
};
use crate::ed_degree::{
    binary_segre_veronese_eddegree, flag_degree, flag_euler_characteristic, flag_hilbert,
    hilbert_leading_term_times_factorial, FlagWeight,
};
use crate::error::Result;
use crate::exterior::{decomposable, gram_inner, so_generators_ext};
use crate::frobenius::{frobenius_inner, hermitian_norm, hermitian_norm_of, q, weights, FrobeniusSpace};
use crate::linalg;
use crate::solvers::{
    binary_eigenvectors, binary_form_roots, cp_als, grassmann_critical_points, minor_residual, rng_from_seed,
    singular_tuples, stream_seed, tuple_distance, CriticalPoint, SolveOutcome,
};
use crate::tensor::{PsTensor, Shape, VectorTuple, C64};
use crate::Error;

type Outcome = Result<(Vec<InstanceRecord>, Vec<AssertionResult>)>;

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

/// Number of eigenvectors of a general `f ∈ S^d C^m`.
fn symmetric_eigencount(m: usize, d: usize) -> Option<u64> {
    match d {
        0 => None,
        1 => Some(1),
        2 => Some(m as u64),
        _ => {
            let p = ((d - 1) as u64).checked_pow(m as u32)?;
            Some((p - 1) / (d as u64 - 2))
        }
    }
}

fn expected_count(shape: &Shape) -> Option<u64> {
    if shape.dims().iter().all(|&n| n == 2) {
        let degs: Vec<u64> = shape.degrees().iter().map(|&d| d as u64).collect();
        return binary_segre_veronese_eddegree(&degs).ok()?.to_u64();
    }
    if shape.num_factors() == 1 {
        let f = shape.factors()[0];
        return symmetric_eigencount(f.dim, f.degree);
    }
    None
}

/// Per-shape assertion that the fraction of records satisfying `ok` reaches `min_rate`.
fn rate_assertions(
    c: &Campaign,
    records: &[InstanceRecord],
    name: &str,
    min_rate: f64,
    ok: impl Fn(&InstanceRecord) -> bool,
) -> Vec<AssertionResult> {
    (0..c.shapes.len())
        .map(|s| {
            let shape: Vec<&InstanceRecord> = records.iter().filter(|r| r.shape_index == s).collect();
            let hits = shape.iter().filter(|r| ok(r)).count();
            let rate = hits as f64 / shape.len().max(1) as f64;
            AssertionResult {
                name: format!("{name} [{}]", c.shapes[s].label()),
                passed: rate >= min_rate,
                detail: format!("{hits}/{} = {rate:.3} (required ≥ {min_rate})", shape.len()),
            }
        })
        .collect()
}

fn record_solve(rec: &mut InstanceRecord, out: &SolveOutcome, membership_tol: f64, rescaling_tol: f64) {
    rec.count("distinct", out.points.len());
    rec.count("isotropic", out.isotropic.len());
    rec.count("certified_restarts", out.diagnostics.certified);
    rec.count("diverged_restarts", out.diagnostics.diverged);
    rec.count("rejected_restarts", out.diagnostics.rejected);
    if out.distinct_count() == 0 {
        rec.inconclusive("no certified critical point".into());
        return;
    }
    rec.residual("first_order", max_of(out.all_points().map(|p| p.first_order_residual)));
    rec.check_le(
        "membership",
        max_of(out.all_points().map(|p| p.membership_residual)),
        membership_tol,
    );
    rec.check_le(
        "rescaling",
        max_of(out.points.iter().filter_map(|p| p.rescaling_residual)),
        rescaling_tol,
    );
}

pub(super) fn self_membership(c: &Campaign) -> Outcome {
    let tol = c.tol("self_membership", 1e-12);
    let records = run_grid(c, |_, space, mut rec| {
        let r = match space {
            Space::Partial(shape) => {
                let f = random_tensor(shape, rec.seed, c.field);
                membership_residual(&f, &f)
            }
            Space::Exterior { dim, k } => {
                let f = random_alternating(*dim, *k, rec.seed, c.field);
                membership_residual_ext(&f, &f)
            }
            Space::Slice { .. } => Err(Error::InvalidInput("not a random-tensor shape".into())),
        };
        match r {
            Ok(v) => rec.check_le("self_membership", v, tol),
            Err(e) => rec.fail(e.to_string()),
        }
        rec
    })?;
    Ok((records, Vec::new()))
}

pub(super) fn verify_main(c: &Campaign) -> Outcome {
    let self_tol = c.tol("self_membership", 1e-12);
    let mem_tol = c.tol("membership", 1e-8);
    let resc_tol = c.tol("rescaling", 1e-9);
    let records = run_grid(c, |_, space, mut rec| {
        let cfg = c.instance_cfg(stream_seed(rec.seed, 1));
        let result = match space {
            Space::Partial(shape) => {
                let f = random_tensor(shape, rec.seed, c.field);
                if let Some(n) = expected_count(shape) {
                    rec.count("expected", n as usize);
                }
                membership_residual(&f, &f).and_then(|s| Ok((s, singular_tuples(&f, &cfg)?)))
            }
            Space::Exterior { dim, k } => {
                let f = random_alternating(*dim, *k, rec.seed, c.field);
                membership_residual_ext(&f, &f).and_then(|s| Ok((s, grassmann_critical_points(&f, *k, &cfg)?)))
            }
            Space::Slice { .. } => Err(Error::InvalidInput("not a random-tensor shape".into())),
        };
        match result {
            Ok((self_res, out)) => {
                rec.check_le("self_membership", self_res, self_tol);
                record_solve(&mut rec, &out, mem_tol, resc_tol);
            }
            Err(e) => rec.fail(e.to_string()),
        }
        rec
    })?;
    Ok((records, Vec::new()))
}

fn binary_degree(space: &Space) -> Result<(Shape, usize)> {
    match space {
        Space::Partial(shape) if shape.num_factors() == 1 && shape.dims()[0] == 2 => {
            Ok((shape.clone(), shape.degrees()[0]))
        }
        _ => Err(Error::InvalidInput(
            "binary form shape (one factor, dim 2) required".into(),
        )),
    }
}

pub(super) fn binary_roots(c: &Campaign) -> Outcome {
    let minor_tol = c.tol("minor", 1e-8);
    let records = run_grid(c, |_, space, mut rec| {
        let (shape, d) = match binary_degree(space) {
            Ok(x) => x,
            Err(e) => {
                rec.fail(e.to_string());
                return rec;
            }
        };
        let f = random_tensor(&shape, rec.seed, c.field);
        match binary_eigenvectors(&f) {
            Ok(roots) => {
                let total: usize = roots.iter().map(|r| r.multiplicity).sum();
                let isotropic = roots.iter().filter(|r| r.isotropic).count();
                rec.count("degree", d);
                rec.count("roots_with_multiplicity", total);
                rec.count("distinct", roots.len());
                rec.count("isotropic", isotropic);
                rec.count("generic", usize::from(roots.len() == d && isotropic == 0));
                if total != d {
                    rec.fail(format!("{total} roots with multiplicity, expected {d}"));
                }
                let minors = roots.iter().map(|r| {
                    let t = VectorTuple::new(vec![r.point.clone()]).expect("unit root");
                    minor_residual(&f, &t).ok().flatten().unwrap_or(f64::INFINITY)
                });
                rec.check_le("minor", max_of(minors), minor_tol);
            }
            Err(Error::OrbitDegenerate) => rec.inconclusive("orbit-degenerate".into()),
            Err(e) => rec.fail(e.to_string()),
        }
        rec
    })?;
    let rate = c.tol("generic_rate", 0.99);
    let assertions = rate_assertions(c, &records, "distinct and non-isotropic", rate, |r| {
        r.counts.get("generic") == Some(&1)
    });
    Ok((records, assertions))
}

pub(super) fn count_binary(c: &Campaign) -> Outcome {
    let records = run_grid(c, |_, space, mut rec| {
        let Space::Partial(shape) = space else {
            rec.fail("binary shape required".into());
            return rec;
        };
        let Some(target) = expected_count(shape).filter(|_| shape.dims().iter().all(|&n| n == 2)) else {
            rec.fail("binary shape required".into());
            return rec;
        };
        let f = random_tensor(shape, rec.seed, c.field);
        let mut cfg = c.instance_cfg(stream_seed(rec.seed, 1));
        cfg.restarts = cfg.restarts.max(100 * target as usize);
        rec.count("target", target as usize);
        rec.count("restarts", cfg.restarts);
        match singular_tuples(&f, &cfg) {
            Ok(out) => {
                let found = out.distinct_count();
                rec.count("found", found);
                rec.count("isotropic", out.isotropic.len());
                rec.count("certified_restarts", out.diagnostics.certified);
                rec.count("diverged_restarts", out.diagnostics.diverged);
                rec.count("rejected_restarts", out.diagnostics.rejected);
                rec.residual("membership", max_of(out.all_points().map(|p| p.membership_residual)));
                if found as u64 > target {
                    rec.fail(format!("{found} distinct tuples exceed k!·Πd = {target}"));
                } else if (found as u64) < target {
                    rec.inconclusive(format!(
                        "{found} of {target} found ({} certified, {} diverged, {} rejected restarts)",
                        out.diagnostics.certified, out.diagnostics.diverged, out.diagnostics.rejected
                    ));
                }
            }
            Err(e) => rec.fail(e.to_string()),
        }
        rec
    })?;
    let rate = c.tol("exact_rate", 0.95);
    let assertions = rate_assertions(c, &records, "count equals k!·Πd", rate, |r| r.status == Status::Pass);
    Ok((records, assertions))
}

/// Both lists have the same size and every point of each is within `tol` of the other.
fn same_points(a: &[Vec<C64>], b: &[Vec<C64>], tol: f64) -> bool {
    let covered = |x: &[Vec<C64>], y: &[Vec<C64>]| {
        x.iter().all(|u| {
            y.iter()
                .any(|v| tuple_distance(std::slice::from_ref(u), std::slice::from_ref(v)) <= tol)
        })
    };
    a.len() == b.len() && covered(a, b) && covered(b, a)
}

/// Roots of `v ↦ q(v^d, N)` where `N` spans the complement of `H_f`: the Veronese
/// points of `H_f`, computed from the critical space alone.
fn veronese_points_of_critical_space(f: &PsTensor) -> Result<Vec<Vec<C64>>> {
    let basis = critical_space_basis(f, DEFAULT_RANK_TOL)?;
    let rows: Vec<Vec<C64>> = basis.iter().map(|b| b.weighted_coords()).collect();
    let (_, normal) = linalg::bilinear_kernel(&rows, f.shape().basis_size(), DEFAULT_RANK_TOL);
    if normal.len() != 1 {
        return Err(Error::InvalidInput(format!(
            "H_f has codimension {}, expected 1",
            normal.len()
        )));
    }
    // rank_one(v) has weighted coordinates √w_α v^α, so q(v^d, N) = Σ √w_α N_α v^α
    let coeffs = normal[0]
        .iter()
        .zip(weights(f.shape()))
        .map(|(n, w)| n * w.sqrt())
        .collect();
    let poly = PsTensor::new(f.shape().clone(), coeffs)?;
    Ok(binary_form_roots(&poly)?.into_iter().map(|r| r.point).collect())
}

pub(super) fn verify_converse(c: &Campaign) -> Outcome {
    let match_tol = c.tol("match", 1e-6);
    let mem_tol = c.tol("membership", 1e-8);
    let minor_tol = c.tol("minor", 1e-9);
    let negatives = c.tol("negatives", 4.0) as usize;
    let negative_floor = c.tol("negative_floor", 1e-2);
    let records = run_grid(c, |_, space, mut rec| {
        let (shape, _) = match binary_degree(space) {
            Ok(x) => x,
            Err(e) => {
                rec.fail(e.to_string());
                return rec;
            }
        };
        let f = random_tensor(&shape, rec.seed, c.field);
        let roots = match binary_eigenvectors(&f) {
            Ok(r) => r,
            Err(Error::OrbitDegenerate) => {
                rec.inconclusive("orbit-degenerate: excluded".into());
                return rec;
            }
            Err(e) => {
                rec.fail(e.to_string());
                return rec;
            }
        };
        let isotropic = roots.iter().filter(|r| r.isotropic).count();
        rec.count("roots", roots.len());
        rec.count("isotropic_roots", isotropic);
        if isotropic > 0 {
            rec.fail(format!("{isotropic} isotropic roots"));
        }
        let exact: Vec<Vec<C64>> = roots.into_iter().map(|r| r.point).collect();

        let membership_of = |v: &Vec<C64>| -> Result<(f64, f64)> {
            let t = VectorTuple::new(vec![v.clone()])?;
            let m = membership_residual(&PsTensor::rank_one(&t, f.shape())?, &f)?;
            let minor = minor_residual(&f, &t)?.unwrap_or(f64::INFINITY);
            Ok((m, minor))
        };

        match veronese_points_of_critical_space(&f) {
            Ok(critical) => {
                rec.count("critical_space_points", critical.len());
                let mut worst = (0.0f64, 0.0f64);
                for v in critical.iter().chain(&exact) {
                    match membership_of(v) {
                        Ok((m, minor)) => worst = (worst.0.max(m), worst.1.max(minor)),
                        Err(e) => rec.fail(e.to_string()),
                    }
                }
                rec.check_le("membership", worst.0, mem_tol);
                rec.check_le("minor", worst.1, minor_tol);
                if !same_points(&exact, &critical, match_tol) {
                    rec.fail("roots of D01 f differ from the Veronese points of H_f".into());
                }
            }
            Err(e) => rec.fail(e.to_string()),
        }

        let cfg = c.instance_cfg(stream_seed(rec.seed, 1));
        match singular_tuples(&f, &cfg) {
            Ok(out) => {
                let solver: Vec<Vec<C64>> = out
                    .all_points()
                    .filter_map(|p| match &p.point {
                        CriticalPoint::Tuple { vectors } => Some(vectors[0].clone()),
                        _ => None,
                    })
                    .collect();
                rec.count("solver_points", solver.len());
                if !same_points(&exact, &solver, match_tol) {
                    rec.fail("roots of D01 f differ from the solver's eigenvectors".into());
                }
            }
            Err(e) => rec.fail(e.to_string()),
        }

        let mut rng = rng_from_seed(stream_seed(rec.seed, 2));
        let mut lowest = f64::INFINITY;
        for _ in 0..negatives {
            let v = gaussian_vector(&mut rng, 2, Field::Complex);
            match membership_of(&v) {
                Ok((m, _)) => lowest = lowest.min(m),
                Err(e) => rec.fail(e.to_string()),
            }
        }
        rec.residual("random_point_membership_min", lowest);
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if negatives > 0 && !(lowest > negative_floor) {
            rec.fail(format!("a random point passed membership ({lowest:e})"));
        }
        rec
    })?;
    Ok((records, Vec::new()))
}

pub(super) fn degenerate_locus(c: &Campaign) -> Outcome {
    let rank_tol = c.tol("rank", DEFAULT_RANK_TOL);
    let shape = Shape::segre(&[2, 2, 2])?;
    let records = run_grid(c, |entry, space, mut rec| {
        let f = match space {
            Space::Partial(s) if *s == shape => random_tensor(s, rec.seed, c.field),
            Space::Slice { factor, sign } => {
                let mut rng = rng_from_seed(rec.seed);
                let mut vs: Vec<Vec<C64>> = (0..3).map(|_| gaussian_vector(&mut rng, 2, c.field)).collect();
                vs[*factor] = vec![C64::new(1.0, 0.0), C64::new(0.0, *sign as f64)];
                match VectorTuple::new(vs).and_then(|t| PsTensor::rank_one(&t, &shape)) {
                    Ok(f) => f,
                    Err(e) => {
                        rec.fail(e.to_string());
                        return rec;
                    }
                }
            }
            _ => {
                rec.fail(format!("{} is not a C²⊗C²⊗C² family", entry.label()));
                return rec;
            }
        };
        let gens = match infinitesimal_generators(&f) {
            Ok(g) => g,
            Err(e) => {
                rec.fail(e.to_string());
                return rec;
            }
        };
        let info = orbit_dimension(&gens, rank_tol);
        let projective = projective_orbit_dimension(&f, &gens, rank_tol);
        rec.count("orbit_dimension", info.orbit_dimension);
        rec.count("projective_orbit_dimension", projective);
        rec.residual(
            "smallest_singular_value",
            info.singular_value_profile.last().copied().unwrap_or(0.0),
        );
        match entry {
            GridShape::IsotropicSlice { .. } if info.orbit_dimension > 2 => rec.fail(format!(
                "orbit dimension {} > 2 on an isotropic slice",
                info.orbit_dimension
            )),
            GridShape::IsotropicSlice { .. } => {}
            _ if info.orbit_dimension != 3 => {
                rec.fail(format!("orbit dimension {} ≠ 3 for generic f", info.orbit_dimension))
            }
            _ => {}
        }
        rec
    })?;
    Ok((records, Vec::new()))
}

pub(super) fn als_membership(c: &Campaign) -> Outcome {
    let floor = c.tol("floor", 1e-6);
    let factor = c.tol("factor", 10.0);
    let records = run_grid(c, |entry, space, mut rec| {
        let (Space::Partial(shape), GridShape::Segre { rank: Some(q), .. }) = (space, entry) else {
            rec.fail("segre shape with a rank required".into());
            return rec;
        };
        let f = random_tensor(shape, rec.seed, Field::Real);
        match cp_als(&f, *q, &c.instance_cfg(stream_seed(rec.seed, 1))) {
            Ok(out) => {
                let stat = out.report.first_order_residual;
                rec.count("converged", usize::from(out.converged));
                rec.count("iterations", out.iterations);
                rec.residual("stationarity", stat);
                rec.residual("relative_error", out.relative_error);
                if out.converged {
                    rec.check_le("membership", out.report.membership_residual, floor.max(factor * stat));
                } else {
                    rec.residual("membership", out.report.membership_residual);
                    rec.inconclusive("not converged".into());
                }
            }
            Err(e) => rec.fail(e.to_string()),
        }
        rec
    })?;
    let wanted = c.tol("min_converged", c.samples as f64) as usize;
    let rate = c.tol("converged_rate", 0.95);
    let mut assertions = rate_assertions(c, &records, "converged rate", rate, |r| {
        r.counts.get("converged") == Some(&1)
    });
    assertions.extend((0..c.shapes.len()).map(|s| {
        let shape = records.iter().filter(|r| r.shape_index == s);
        let converged = shape.clone().filter(|r| r.counts.get("converged") == Some(&1)).count();
        AssertionResult {
            name: format!("converged instances [{}]", c.shapes[s].label()),
            passed: converged >= wanted,
            detail: format!("{converged} of {} drawn (required ≥ {wanted})", shape.count()),
        }
    }));
    Ok((records, assertions))
}

fn factorial(m: u64) -> BigInt {
    (1..=m).fold(BigInt::one(), |acc, i| acc * i)
}

fn all_weights(n: usize, max_a: u64) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| (1..=max_a).map(move |a| [w.clone(), vec![a]].concat()))
            .collect();
    }
    out
}

/// Exact identities for complete flags; one record per identity instance.
pub(super) fn flag_formulas(c: &Campaign) -> Outcome {
    let max_ab = c.tol("max_ab", 10.0) as u64;
    let max_n = c.tol("max_n", 4.0) as usize;
    let max_t = c.tol("max_t", 10.0) as u64;
    let max_a = c.tol("max_a", 4.0) as u64;
    let max_euler_n = c.tol("max_euler_n", 6.0) as usize;
    let mut records = Vec::new();
    let mut push = |family: usize, label: String, got: Result<BigInt>, want: BigInt| {
        let mut rec = InstanceRecord::new(label, family, records.len(), 0);
        match got {
            Ok(v) if v == want => {}
            Ok(v) => rec.fail(format!("got {v}, expected {want}")),
            Err(e) => rec.fail(e.to_string()),
        }
        records.push(rec);
    };
    for a in 1..=max_ab {
        for b in 1..=max_ab {
            let got = FlagWeight::new(vec![a, b]).and_then(|w| flag_degree(&w));
            push(
                0,
                format!("deg F_2 O({a},{b}) = 3ab(a+b)"),
                got,
                BigInt::from(3 * a * b * (a + b)),
            );
        }
    }
    for n in 1..=max_n {
        let dim = (n * (n + 1) / 2) as u64;
        push(
            1,
            format!("deg F_{n} O(1,…,1)"),
            flag_degree(&FlagWeight::uniform(n, 1)),
            factorial(dim),
        );
        for t in 0..=max_t {
            let got = flag_hilbert(&FlagWeight::uniform(n, 1), t);
            push(
                2,
                format!("h F_{n} O(1,…,1) t={t}"),
                got,
                BigInt::from(t + 1).pow(dim as u32),
            );
        }
    }
    for n in 1..=max_n {
        for a in all_weights(n, max_a) {
            let label = format!("deg = D!·lc, a={a:?}");
            match FlagWeight::new(a) {
                Ok(w) => {
                    let want = hilbert_leading_term_times_factorial(&w);
                    match want {
                        Ok(want) => push(3, label, flag_degree(&w), want),
                        Err(e) => push(3, label, Err(e), BigInt::from(0)),
                    }
                }
                Err(e) => push(3, label, Err(e), BigInt::from(0)),
            }
        }
    }
    for n in 1..=max_euler_n {
        push(
            4,
            format!("χ(F_{n})"),
            flag_euler_characteristic(n),
            factorial(n as u64 + 1),
        );
    }
    let _ = c;
    Ok((records, Vec::new()))
}

fn relative(a: C64, b: C64, scale: f64) -> f64 {
    if scale == 0.0 {
        (a - b).norm()
    } else {
        (a - b).norm() / scale
    }
}

/// Frobenius rank-one identity, Gram-determinant identity and antisymmetry of the
/// generators under `q`.
pub(super) fn form_identities(c: &Campaign) -> Outcome {
    let tol = c.tol("identity", 1e-10);
    let records = run_grid(c, |_, space, mut rec| {
        let mut rng = rng_from_seed(stream_seed(rec.seed, 3));
        let result: Result<()> = (|| {
            match space {
                Space::Partial(shape) => {
                    let draw = |rng: &mut _| -> Result<VectorTuple> {
                        VectorTuple::new(
                            shape
                                .dims()
                                .iter()
                                .map(|&n| gaussian_vector(rng, n, Field::Complex))
                                .collect(),
                        )
                    };
                    let (v, w) = (draw(&mut rng)?, draw(&mut rng)?);
                    let (x, y) = (PsTensor::rank_one(&v, shape)?, PsTensor::rank_one(&w, shape)?);
                    let lhs = frobenius_inner(&x, &y)?;
                    let rhs: C64 = v
                        .vectors()
                        .iter()
                        .zip(w.vectors())
                        .zip(shape.degrees())
                        .map(|((a, b), d)| a.iter().zip(b).map(|(s, t)| s * t).sum::<C64>().powu(d as u32))
                        .product();
                    rec.check_le(
                        "rank_one_identity",
                        relative(lhs, rhs, hermitian_norm(&x) * hermitian_norm(&y)),
                        tol,
                    );

                    let f = random_tensor(shape, stream_seed(rec.seed, 1), c.field);
                    let g = random_tensor(shape, stream_seed(rec.seed, 2), c.field);
                    let (df, dg) = (infinitesimal_generators(&f)?, infinitesimal_generators(&g)?);
                    let worst = max_of(df.generators.iter().zip(&dg.generators).map(|(a, b)| {
                        let scale = hermitian_norm(a) * hermitian_norm(&g) + hermitian_norm(&f) * hermitian_norm(b);
                        relative(q(a, &g), -q(&f, b), scale)
                    }));
                    rec.check_le("antisymmetry", worst, tol);
                }
                Space::Exterior { dim, k } => {
                    let vs: Vec<Vec<C64>> = (0..*k)
                        .map(|_| gaussian_vector(&mut rng, *dim, Field::Complex))
                        .collect();
                    let ws: Vec<Vec<C64>> = (0..*k)
                        .map(|_| gaussian_vector(&mut rng, *dim, Field::Complex))
                        .collect();
                    let (x, y) = (decomposable(&vs)?, decomposable(&ws)?);
                    let gram: Vec<Vec<C64>> = vs
                        .iter()
                        .map(|v| ws.iter().map(|w| v.iter().zip(w).map(|(a, b)| a * b).sum()).collect())
                        .collect();
                    let scale = hermitian_norm_of(x.coeffs()) * hermitian_norm_of(y.coeffs());
                    rec.check_le(
                        "gram_identity",
                        relative(gram_inner(&x, &y)?, linalg::det(&gram), scale),
                        tol,
                    );

                    let f = random_alternating(*dim, *k, stream_seed(rec.seed, 1), c.field);
                    let g = random_alternating(*dim, *k, stream_seed(rec.seed, 2), c.field);
                    let (df, dg) = (so_generators_ext(&f)?, so_generators_ext(&g)?);
                    let norm = |t: &crate::exterior::AlternatingTensor| hermitian_norm_of(t.coeffs());
                    let worst = max_of(df.generators.iter().zip(&dg.generators).map(|(a, b)| {
                        let scale = norm(a) * norm(&g) + norm(&f) * norm(b);
                        relative(q(a, &g), -q(&f, b), scale)
                    }));
                    rec.check_le("antisymmetry", worst, tol);
                }
                Space::Slice { .. } => return Err(Error::InvalidInput("not a random-tensor shape".into())),
            }
            Ok(())
        })();
        if let Err(e) = result {
            rec.fail(e.to_string());
        }
        rec
    })?;
    Ok((records, Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigencounts() {
        assert_eq!(symmetric_eigencount(2, 3), Some(3));
        assert_eq!(symmetric_eigencount(3, 3), Some(7));
        assert_eq!(symmetric_eigencount(3, 2), Some(3));
        assert_eq!(expected_count(&Shape::binary(&[2, 2]).unwrap()), Some(8));
        assert_eq!(expected_count(&Shape::segre(&[2, 3]).unwrap()), None);
    }

    #[test]
    fn weight_grid() {
        assert_eq!(all_weights(2, 3).len(), 9);
        assert_eq!(all_weights(1, 4), vec![vec![1], vec![2], vec![3], vec![4]]);
    }

    #[test]
    fn point_set_comparison() {
        let a = vec![vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]];
        let b = vec![vec![C64::new(0.0, 2.0), C64::new(0.0, 0.0)]];
        assert!(same_points(&a, &b, 1e-9));
        assert!(!same_points(&a, &[], 1e-9));
    }
}
