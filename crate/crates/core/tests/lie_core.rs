use nilweyl::lie_core::matrix_model::{exp_via_matrix, log_via_matrix, mul_via_matrix};
use nilweyl::lie_core::*;
use nilweyl::linalg::Matrix;
use nilweyl::{q, Rational};
use num::traits::{One, Zero};
use proptest::prelude::*;

fn shape_strategy() -> impl Strategy<Value = AlgebraShape> {
    prop::collection::vec(1usize..=4, 1..=3).prop_map(|d| AlgebraShape::new(d).unwrap())
}

fn rational() -> impl Strategy<Value = Rational> {
    (-24i64..=24, 1i64..=6).prop_map(|(n, d)| q(n, d))
}

fn element(a: usize) -> impl Strategy<Value = (Rational, Vec<Rational>)> {
    (rational(), prop::collection::vec(rational(), a))
}

fn shape_and_elements(count: usize) -> impl Strategy<Value = (AlgebraShape, Vec<(Rational, Vec<Rational>)>)> {
    shape_strategy().prop_flat_map(move |s| {
        let a = s.a();
        (Just(s), prop::collection::vec(element(a), count))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_law_is_associative_with_inverses((shape, els) in shape_and_elements(3)) {
        let g: Vec<GroupElement<Rational>> = els.into_iter().map(|(t, v)| GroupElement::new(t, v)).collect();
        let left = shape.group_mul(&shape.group_mul(&g[0], &g[1]).unwrap(), &g[2]).unwrap();
        let right = shape.group_mul(&g[0], &shape.group_mul(&g[1], &g[2]).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        let inv = shape.group_inv(&g[0]).unwrap();
        prop_assert_eq!(shape.group_mul(&g[0], &inv).unwrap(), GroupElement::identity(shape.a()));
        prop_assert_eq!(shape.group_mul(&inv, &g[0]).unwrap(), GroupElement::identity(shape.a()));
    }

    #[test]
    fn log_and_exp_are_inverse((shape, els) in shape_and_elements(1)) {
        let (t, v) = els[0].clone();
        let x = AlgebraElement::new(t.clone(), v.clone());
        prop_assert_eq!(shape.log(&shape.exp(&x).unwrap()).unwrap(), x.clone());
        let g = GroupElement::new(t, v);
        prop_assert_eq!(shape.exp(&shape.log(&g).unwrap()).unwrap(), g);
    }

    #[test]
    fn matrix_model_is_a_faithful_homomorphism((shape, els) in shape_and_elements(2)) {
        let g0 = GroupElement::new(els[0].0.clone(), els[0].1.clone());
        let g1 = GroupElement::new(els[1].0.clone(), els[1].1.clone());
        prop_assert_eq!(mul_via_matrix(&shape, &g0, &g1), shape.group_mul(&g0, &g1).unwrap());
        let x = AlgebraElement::new(els[0].0.clone(), els[0].1.clone());
        prop_assert_eq!(exp_via_matrix(&shape, &x), shape.exp(&x).unwrap());
        prop_assert_eq!(log_via_matrix(&shape, &g1), shape.log(&g1).unwrap());
    }

    #[test]
    fn bracket_satisfies_jacobi((shape, els) in shape_and_elements(3)) {
        let x: Vec<AlgebraElement<Rational>> = els.into_iter().map(|(t, v)| AlgebraElement::new(t, v)).collect();
        let br = |a: &AlgebraElement<Rational>, b: &AlgebraElement<Rational>| shape.bracket(a, b).unwrap();
        let sum = br(&x[0], &br(&x[1], &x[2])).add(&br(&x[1], &br(&x[2], &x[0]))).add(&br(&x[2], &br(&x[0], &x[1])));
        prop_assert_eq!(sum, AlgebraElement::zero(shape.a()));
        prop_assert_eq!(br(&x[0], &x[1]), br(&x[1], &x[0]).scale(&-Rational::one()));
    }

    #[test]
    fn one_parameter_subgroups_add_times((shape, els) in shape_and_elements(1), s in rational(), t in rational()) {
        let x = AlgebraElement::new(els[0].0.clone(), els[0].1.clone());
        let gs = shape.exp(&x.scale(&s)).unwrap();
        let gt = shape.exp(&x.scale(&t)).unwrap();
        prop_assert_eq!(shape.group_mul(&gs, &gt).unwrap(), shape.exp(&x.scale(&(s + t))).unwrap());
    }

    #[test]
    fn reduction_is_a_lattice_translate((shape, els) in shape_and_elements(1)) {
        let g = GroupElement::new(els[0].0.clone(), els[0].1.clone());
        let (r, gamma) = shape.reduce_with_witness(&g).unwrap();
        prop_assert_eq!(shape.lattice_mul(&gamma, &g).unwrap(), r.clone());
        prop_assert!(r.t >= Rational::zero() && r.t < Rational::one());
        prop_assert!(r.v.iter().all(|x| *x >= Rational::zero() && *x < Rational::one()));
    }
}

#[test]
fn lattice_generators_conjugate_by_the_unipotent_shift() {
    // x y_j x^{-1} = exp(h(1) η̃_j) for the lattice generators.
    for shape in ["1|1", "3|3", "4|4,2", "3|3,3,1"] {
        let shape: AlgebraShape = shape.parse().unwrap();
        let a = shape.a();
        let x = GroupElement::<Rational>::x(a);
        let xinv = shape.group_inv(&x).unwrap();
        for j in 0..a {
            let y = GroupElement::<Rational>::y(a, j);
            let c = shape.group_mul(&shape.group_mul(&x, &y).unwrap(), &xinv).unwrap();
            let mut e = vec![Rational::zero(); a];
            e[j] = Rational::one();
            assert_eq!(c, GroupElement::new(Rational::zero(), shape.apply_h(&Rational::one(), &e)));
        }
        assert_eq!(shape.exp(&AlgebraElement::<Rational>::xi(a)).unwrap(), x);
    }
}

#[test]
fn jordan_change_of_basis_matrices_are_inverse() {
    for shape in ["2|2", "5|5", "4|4,3,1"] {
        let shape: AlgebraShape = shape.parse().unwrap();
        let jd = jordan_from_lattice_basis::<Rational>(&shape);
        for (r, s) in jd.r.iter().zip(&jd.s) {
            let id = Matrix::<Rational>::identity(r.rows());
            assert_eq!(id.add(r).mul(&id.add(s)), id);
        }
        let xi = AlgebraElement::<Rational>::xi(shape.a());
        for chain in &jd.basis.chains {
            for w in chain.windows(2) {
                assert_eq!(shape.ad_ideal(&xi, &jd.basis.y[w[0]]), jd.basis.y[w[1]]);
            }
            let last = &jd.basis.y[*chain.last().unwrap()];
            assert!(shape.ad_ideal(&xi, last).iter().all(|c| c.is_zero()));
        }
        assert_eq!(jd.basis.volume(), Rational::one());
    }
}

#[test]
fn shape_strings_round_trip() {
    for s in ["2|2", "3|3,1", "5|2,5,3"] {
        let shape: AlgebraShape = s.parse().unwrap();
        assert_eq!(shape.to_string().parse::<AlgebraShape>().unwrap(), shape);
    }
    assert!("3|2,2".parse::<AlgebraShape>().is_err());
}
