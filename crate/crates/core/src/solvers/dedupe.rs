use crate::tensor::{hermitian_vec_norm, C64};

/// Fubini–Study angle between `[u]` and `[v]`, computed from the chord between the
/// phase-aligned unit representatives so that nearby points keep full precision.
pub fn fubini_study(u: &[C64], v: &[C64]) -> f64 {
    let (nu, nv) = (hermitian_vec_norm(u), hermitian_vec_norm(v));
    if nu == 0.0 || nv == 0.0 {
        return std::f64::consts::FRAC_PI_2;
    }
    let overlap: C64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum::<C64>() / (nu * nv);
    let mag = overlap.norm();
    if mag == 0.0 {
        return std::f64::consts::FRAC_PI_2;
    }
    let phase = overlap / mag;
    let chord = u
        .iter()
        .zip(v)
        .map(|(a, b)| (b / nv - phase * a / nu).norm_sqr())
        .sum::<f64>()
        .sqrt();
    2.0 * (chord / 2.0).min(1.0).asin()
}

/// Maximum over factors of the Fubini–Study distance.
pub fn tuple_distance(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
    a.iter().zip(b).map(|(u, v)| fubini_study(u, v)).fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    /// Index of the medoid in the input.
    pub representative: usize,
    /// Input indices in this cluster, in input order.
    pub members: Vec<usize>,
}

impl Cluster {
    pub fn multiplicity(&self) -> usize {
        self.members.len()
    }
}

/// Greedy clustering: each point joins the first cluster whose founding point is within
/// `tol`, otherwise it founds a new one. Deterministic in input order.
pub fn dedupe_projective(points: &[Vec<Vec<C64>>], tol: f64) -> Vec<Cluster> {
    let mut clusters: Vec<Cluster> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        match clusters
            .iter_mut()
            .find(|c| tuple_distance(&points[c.members[0]], p) <= tol)
        {
            Some(c) => c.members.push(i),
            None => clusters.push(Cluster {
                representative: i,
                members: vec![i],
            }),
        }
    }
    for c in &mut clusters {
        if c.members.len() > 2 {
            c.representative = *c
                .members
                .iter()
                .min_by(|&&a, &&b| {
                    let cost =
                        |x: usize| -> f64 { c.members.iter().map(|&y| tuple_distance(&points[x], &points[y])).sum() };
                    cost(a).total_cmp(&cost(b))
                })
                .expect("nonempty cluster");
        }
    }
    clusters
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    #[test]
    fn phase_is_invisible() {
        let v = vec![C64::new(0.3, 0.1), C64::new(-1.0, 0.4)];
        let w: Vec<C64> = v.iter().map(|z| z * C64::from_polar(2.5, 1.1)).collect();
        assert!(fubini_study(&v, &w) < 1e-15);
        let clusters = dedupe_projective(&[vec![v], vec![w]], 1e-8);
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].multiplicity(), 2);
    }

    #[test]
    fn separated_points_stay_apart() {
        let tol = 1e-6;
        let a = r(&[1.0, 0.0]);
        let b = r(&[1.0, 10.0 * tol]);
        assert!((fubini_study(&a, &b) - 10.0 * tol).abs() < 1e-12);
        assert_eq!(dedupe_projective(&[vec![a], vec![b]], tol).len(), 2);
    }

    #[test]
    fn empty_input() {
        assert!(dedupe_projective(&[], 1e-6).is_empty());
    }

    #[test]
    fn orthogonal_is_right_angle() {
        let d = fubini_study(&r(&[1.0, 0.0]), &r(&[0.0, 1.0]));
        assert!((d - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn medoid_is_central() {
        let pts: Vec<Vec<Vec<C64>>> = [0.0, 1e-9, 2e-9].iter().map(|&e| vec![r(&[1.0, e])]).collect();
        let c = dedupe_projective(&pts, 1e-6);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].representative, 1);
    }
}
