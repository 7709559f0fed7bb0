//! Algebraic invariants on random inputs.

use critspace::critical::{infinitesimal_generators, membership_residual, orbit_dimension, DEFAULT_RANK_TOL};
use critspace::ed_degree::{binary_segre_veronese_eddegree, flag_hilbert, FlagWeight};
use critspace::experiments::{random_tensor, Field};
use critspace::exterior::AlternatingTensor;
use critspace::frobenius::frobenius_inner;
use critspace::tensor::{Factor, PsTensor, Shape, VectorTuple, C64};
use proptest::prelude::*;

fn shape_strategy() -> impl Strategy<Value = Shape> {
    prop::collection::vec((1usize..=3, 1usize..=3), 1..=3)
        .prop_map(|fs| Shape::new(fs.into_iter().map(|(dim, degree)| Factor::new(dim, degree)).collect()).unwrap())
}

fn integer_tensor(shape: Shape) -> impl Strategy<Value = PsTensor> {
    prop::collection::vec((-5i32..=5, -5i32..=5), shape.basis_size()).prop_map(move |cs| {
        let coeffs = cs.into_iter().map(|(a, b)| C64::new(a as f64, b as f64)).collect();
        PsTensor::new(shape.clone(), coeffs).unwrap()
    })
}

fn shaped_tensor() -> impl Strategy<Value = PsTensor> {
    shape_strategy().prop_flat_map(integer_tensor)
}

fn point_for(shape: &Shape) -> impl Strategy<Value = VectorTuple> {
    let dims = shape.dims();
    dims.into_iter()
        .map(|n| prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n))
        .collect::<Vec<_>>()
        .prop_map(|vs| {
            VectorTuple::new(
                vs.into_iter()
                    .map(|v| v.into_iter().map(|(a, b)| C64::new(a, b)).collect())
                    .collect(),
            )
            .unwrap()
        })
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_derivatives_commute(f in shaped_tensor(), sel in any::<[prop::sample::Index; 4]>()) {
        let dims = f.shape().dims();
        let p = sel[0].index(dims.len());
        let q = sel[1].index(dims.len());
        let i = sel[2].index(dims[p]);
        let j = sel[3].index(dims[q]);
        let once = f.partial_derivative(p, i).and_then(|g| g.partial_derivative(q, j));
        let other = f.partial_derivative(q, j).and_then(|g| g.partial_derivative(p, i));
        match (once, other) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (a, b) => prop_assert!(a.is_err() && b.is_err()),
        }
    }

    #[test]
    fn euler_identity(f in shaped_tensor()) {
        for (p, fac) in f.shape().factors().iter().enumerate() {
            let mut acc = PsTensor::zeros(f.shape().clone());
            for i in 0..fac.dim {
                let term = f.partial_derivative(p, i).unwrap().multiply_by_variable(p, i).unwrap();
                acc = acc.checked_add(&term).unwrap();
            }
            prop_assert_eq!(acc, f.scale(C64::new(fac.degree as f64, 0.0)));
        }
    }

    #[test]
    fn derivative_matches_central_difference(
        (f, t) in shaped_tensor().prop_flat_map(|f| { let s = f.shape().clone(); (Just(f), point_for(&s)) }),
        sel in any::<[prop::sample::Index; 2]>(),
    ) {
        let dims = f.shape().dims();
        let p = sel[0].index(dims.len());
        let i = sel[1].index(dims[p]);
        let h = 1e-5;
        let shifted = |s: f64| {
            let mut vs = t.vectors().to_vec();
            vs[p][i] += C64::new(s, 0.0);
            f.evaluate(&VectorTuple::new(vs).unwrap()).unwrap()
        };
        let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
        let exact = f.partial_derivative(p, i).unwrap().evaluate(&t).unwrap();
        prop_assert!(rel(fd, exact) <= 1e-6, "fd {fd} vs {exact}");
    }

    #[test]
    fn rank_one_evaluation_is_multiplicative(
        (shape, t, s) in shape_strategy().prop_flat_map(|sh| { let a = point_for(&sh); let b = point_for(&sh); (Just(sh), a, b) })
    ) {
        let x = PsTensor::rank_one(&t, &shape).unwrap();
        let expected: C64 = t.vectors().iter().zip(s.vectors()).zip(shape.degrees())
            .map(|((a, b), d)| a.iter().zip(b).map(|(u, v)| u * v).sum::<C64>().powu(d as u32))
            .product();
        prop_assert!(rel(x.evaluate(&s).unwrap(), expected) <= 1e-10);
        let y = PsTensor::rank_one(&s, &shape).unwrap();
        prop_assert!(rel(frobenius_inner(&x, &y).unwrap(), expected) <= 1e-10);
    }

    #[test]
    fn frobenius_is_bilinear_and_symmetric(
        (f, g, h) in shape_strategy().prop_flat_map(|s| (integer_tensor(s.clone()), integer_tensor(s.clone()), integer_tensor(s))),
        a in -4i32..=4,
    ) {
        let a = C64::new(a as f64, 0.0);
        let lhs = frobenius_inner(&f.scale(a).checked_add(&g).unwrap(), &h).unwrap();
        let rhs = a * frobenius_inner(&f, &h).unwrap() + frobenius_inner(&g, &h).unwrap();
        prop_assert!(rel(lhs, rhs) <= 1e-12);
        prop_assert_eq!(frobenius_inner(&f, &g).unwrap(), frobenius_inner(&g, &f).unwrap());
    }

    #[test]
    fn every_tensor_lies_in_its_critical_space(shape in shape_strategy(), seed in any::<u64>()) {
        let f = random_tensor(&shape, seed, Field::Complex);
        prop_assert!(membership_residual(&f, &f).unwrap() <= 1e-12);
    }

    #[test]
    fn orbit_dimension_is_at_most_the_lie_algebra(shape in shape_strategy(), seed in any::<u64>()) {
        let f = random_tensor(&shape, seed, Field::Real);
        let info = orbit_dimension(&infinitesimal_generators(&f).unwrap(), DEFAULT_RANK_TOL);
        prop_assert!(info.orbit_dimension <= shape.lie_algebra_dimension());
        prop_assert_eq!(info.codim_hf, info.orbit_dimension);
    }

    #[test]
    fn leibniz_derivatives_anticommute(
        coeffs in prop::collection::vec(-5i32..=5, 10),
        i in 0usize..5,
        j in 0usize..5,
    ) {
        let f = AlternatingTensor::new(5, 2, coeffs.into_iter().map(|x| C64::new(x as f64, 0.0)).collect()).unwrap();
        let ij = f.leibniz_derivative(i).unwrap().leibniz_derivative(j).unwrap();
        let ji = f.leibniz_derivative(j).unwrap().leibniz_derivative(i).unwrap();
        prop_assert_eq!(ij, ji.scale(C64::new(-1.0, 0.0)));
    }

    #[test]
    fn wedge_is_graded_anticommutative(
        a in prop::collection::vec(-3i32..=3, 4),
        b in prop::collection::vec(-3i32..=3, 6),
    ) {
        let to = |v: Vec<i32>| v.into_iter().map(|x| C64::new(x as f64, 0.0)).collect::<Vec<_>>();
        let u = AlternatingTensor::new(4, 1, to(a)).unwrap();
        let w = AlternatingTensor::new(4, 2, to(b)).unwrap();
        prop_assert_eq!(u.wedge(&w).unwrap(), w.wedge(&u).unwrap());
        prop_assert_eq!(u.wedge(&u).unwrap(), AlternatingTensor::zeros(4, 2));
    }

    #[test]
    fn binary_ed_degree_is_symmetric_and_multiplicative(
        d in prop::collection::vec(1u64..=6, 1..=4),
        m in 1u64..=4,
    ) {
        let mut rev = d.clone();
        rev.reverse();
        let base = binary_segre_veronese_eddegree(&d).unwrap();
        prop_assert_eq!(&base, &binary_segre_veronese_eddegree(&rev).unwrap());
        let mut scaled = d.clone();
        scaled[0] *= m;
        prop_assert_eq!(binary_segre_veronese_eddegree(&scaled).unwrap(), base * m);
    }

    #[test]
    fn hilbert_function_starts_at_one(a in prop::collection::vec(1u64..=4, 1..=4)) {
        let w = FlagWeight::new(a).unwrap();
        prop_assert_eq!(flag_hilbert(&w, 0).unwrap(), 1.into());
        let n = w.variety_dimension();
        let k = (((8 * n + 1) as f64).sqrt() as usize - 1) / 2;
        prop_assert_eq!(n, k * (k + 1) / 2);
    }
}
