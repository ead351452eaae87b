use nilweyl::lie_core::{AlgebraShape, GroupElement};
use nilweyl::modmath::{centered, frac};
use nilweyl::nilflow::*;
use nilweyl::{q, Rational, Scalar};
use num::complex::Complex64;
use num::traits::Zero;
use num::Integer;
use proptest::prelude::*;

fn phi() -> f64 {
    0.5 * (5f64.sqrt() - 1.0)
}

fn frac_q(x: &Rational) -> Rational {
    x - x.floor()
}

/// `x^n · (0, s) · exp(X_α)^n`, by repeated exact group multiplication.
fn return_by_products(freq: &FrequencyVector<Rational>, s: &[Rational], n: usize) -> GroupElement<Rational> {
    let shape = &freq.shape;
    let a = shape.a();
    let step = shape.exp(&build_x_alpha(freq)).unwrap();
    let x = GroupElement::<Rational>::x(a);
    let mut g = GroupElement::new(Rational::zero(), s.to_vec());
    for _ in 0..n {
        g = shape.group_mul(&shape.group_mul(&x, &g).unwrap(), &step).unwrap();
    }
    g
}

fn shape_freq_start() -> impl Strategy<Value = (AlgebraShape, Vec<Rational>, Vec<Rational>)> {
    prop::collection::vec(1usize..=4, 1..=3).prop_flat_map(|d| {
        let shape = AlgebraShape::new(d).unwrap();
        let a = shape.a();
        let r = (0i64..60, 1i64..=12).prop_map(|(n, d)| q(n, d));
        (Just(shape), prop::collection::vec(r.clone(), a), prop::collection::vec(r, a))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_form_return_map_matches_group_products((shape, alpha, s) in shape_freq_start(), n in 0usize..12) {
        let freq = FrequencyVector::new(shape, alpha).unwrap();
        let g = return_by_products(&freq, &s, n);
        prop_assert!(g.t.is_zero());
        prop_assert_eq!(g.v, return_map_exact(&freq, &s, n as i64));
    }

    #[test]
    fn floating_return_map_agrees_modulo_one((shape, alpha, s) in shape_freq_start(), n in -100_000i64..100_000) {
        let af: Vec<f64> = alpha.iter().map(|x| x.to_f64()).collect();
        let sf: Vec<f64> = s.iter().map(|x| x.to_f64()).collect();
        // Compare against the exact map evaluated at the rounded inputs.
        let aq: Vec<Rational> = af.iter().map(|x| x.to_rational().unwrap()).collect();
        let sq: Vec<Rational> = sf.iter().map(|x| x.to_rational().unwrap()).collect();
        let flow = Nilflow::new(shape.clone(), af).unwrap();
        let got = flow.return_map(0.0, &sf, n);
        let exact = return_map_exact(&FrequencyVector::new(shape, aq).unwrap(), &sq, n);
        for (g, e) in got.iter().zip(&exact) {
            prop_assert!(centered(g - frac_q(e).to_f64()).abs() < 1e-9);
        }
    }

    #[test]
    fn return_map_is_a_cocycle(theta in 0.0f64..1.0, s in prop::collection::vec(0.0f64..1.0, 4), m in -5000i64..5000, n in -5000i64..5000) {
        let flow = Nilflow::new("3|3,1".parse().unwrap(), vec![phi(), 0.2, 0.7, 2f64.sqrt() - 1.0]).unwrap();
        let two = flow.return_map(theta, &flow.return_map(theta, &s, m), n);
        let one = flow.return_map(theta, &s, m + n);
        let d: Vec<f64> = two.iter().zip(&one).map(|(a, b)| a - b).collect();
        let u = flow.shape().apply_h(&theta, &d);
        prop_assert!(u.iter().all(|x| centered(*x).abs() < 1e-8), "{u:?}");
    }

    #[test]
    fn flow_is_a_one_parameter_group(t0 in 0.0f64..1.0, v in prop::collection::vec(0.0f64..1.0, 3), s in 0.0f64..40.0, t in 0.0f64..40.0) {
        let flow = Nilflow::new(AlgebraShape::filiform(3), vec![phi(), 0.31, 0.5]).unwrap();
        let x = GroupElement::new(t0, v);
        let a = flow.flow(&flow.flow(&x, s), t);
        let b = flow.flow(&x, s + t);
        let dt = centered(a.t - b.t);
        prop_assert!(dt.abs() < 1e-9);
        if a.t.min(b.t) > 1e-6 && a.t.max(b.t) < 1.0 - 1e-6 {
            prop_assert!(a.v.iter().zip(&b.v).all(|(p, q)| centered(p - q).abs() < 1e-7));
        }
    }

    #[test]
    fn weyl_polynomial_binomial_round_trip(coeffs in prop::collection::vec((-30i64..30, 1i64..8), 2..=6)) {
        let p = WeylPolynomial::new(coeffs.iter().map(|&(n, d)| q(n, d)).collect());
        let (alpha, s) = p.to_binomial();
        let back = WeylPolynomial::from_binomial(&alpha, &s).unwrap();
        prop_assert_eq!(&back, &p);
        for n in -3i64..10 {
            prop_assert_eq!(weyl_polynomial_value(&alpha, &s, n).unwrap(), p.eval(&q(n, 1)));
        }
    }
}

/// Error-free sum of doubles: `(s, e)` with `s + e = a + b` exactly.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[derive(Default)]
struct DoubleDouble(f64, f64);

impl DoubleDouble {
    fn add(&mut self, x: f64) {
        let (s, e) = two_sum(self.0, x);
        let (hi, lo) = two_sum(s, e + self.1);
        *self = DoubleDouble(hi, lo);
    }
}

/// Direct sum of `e(P(n))` with the phase reduced exactly in rational arithmetic.
fn naive_weyl_sum(coeffs: &[f64], n: u64) -> Complex64 {
    let c: Vec<Rational> = coeffs.iter().map(|x| x.to_rational().unwrap()).collect();
    let mut re = DoubleDouble::default();
    let mut im = DoubleDouble::default();
    for m in 0..n {
        let mq = q(m as i64, 1);
        let v = c.iter().rev().fold(Rational::zero(), |acc, x| acc * &mq + x);
        let (num, den) = (v.numer(), v.denom());
        let r = num.mod_floor(den);
        let phase = Rational::new(r, den.clone()).to_f64();
        let (sn, cs) = (std::f64::consts::TAU * phase).sin_cos();
        re.add(cs);
        im.add(sn);
    }
    Complex64::new(re.0 + re.1, im.0 + im.1)
}

#[test]
fn weyl_sum_matches_the_exact_phase_oracle() {
    let cases: Vec<Vec<f64>> = vec![
        vec![0.1, phi()],
        vec![0.3, 0.7, phi() * 1e-3],
        vec![0.0, 2f64.sqrt(), 3f64.sqrt(), 5f64.sqrt() * 0.01],
        vec![0.25, 1e-7, 1e-9, 1e-11, std::f64::consts::PI * 1e-12],
        vec![0.0, 0.0, 0.0, 0.0, 0.0, std::f64::consts::E * 1e-9],
    ];
    for coeffs in cases {
        let ws = WeylSum::new(&WeylPolynomial::new(coeffs.clone()), WeylSumConfig { chunk: 97 });
        for n in [1u64, 10, 333, 2500] {
            let got = ws.sum(n);
            let want = naive_weyl_sum(&coeffs, n);
            assert!((got - want).norm() < 1e-10 * (n as f64).max(1.0), "{coeffs:?} N={n}: {got} vs {want}");
        }
    }
}

#[test]
fn weyl_sum_is_chunk_independent_and_grid_consistent() {
    let poly = WeylPolynomial::new(vec![0.1, phi(), 0.5 * 2f64.sqrt(), 1e-4]);
    let a = WeylSum::new(&poly, WeylSumConfig { chunk: 1000 });
    let b = WeylSum::new(&poly, WeylSumConfig { chunk: 1 << 16 });
    let grid = [17u64, 1000, 12_345, 200_000];
    let from_grid = a.sum_grid(&grid);
    for (n, g) in grid.iter().zip(&from_grid) {
        assert!((a.sum(*n) - b.sum(*n)).norm() < 1e-8);
        assert!((a.sum(*n) - g).norm() < 1e-8);
    }
    let split = a.sum_range(0, 5000) + a.sum_range(5000, 12_345);
    assert!((split - a.sum(12_345)).norm() < 1e-9);
}

#[test]
fn rational_quadratic_sum_is_a_gauss_sum() {
    // Σ_{n<p} e(n²/p) = √p for p ≡ 1 mod 4 and i√p for p ≡ 3 mod 4.
    for (p, sqrt_p) in [(5i64, Complex64::new(5f64.sqrt(), 0.0)), (7, Complex64::new(0.0, 7f64.sqrt())), (13, Complex64::new(13f64.sqrt(), 0.0))] {
        let poly = WeylPolynomial::new(vec![q(0, 1), q(0, 1), q(1, p)]);
        let ws = WeylSum::from_rational(&poly, WeylSumConfig::default());
        assert!((ws.sum(p as u64) - sqrt_p).norm() < 1e-12, "p={p}");
        assert!((ws.sum(10 * p as u64) - sqrt_p * 10.0).norm() < 1e-11);
    }
}

#[test]
fn large_n_sum_stays_accurate() {
    // Linear phases have a closed form: |Σ e(nβ)| = |sin(πNβ)/sin(πβ)|.
    let beta = phi();
    let ws = WeylSum::new(&WeylPolynomial::new(vec![0.0, beta]), WeylSumConfig::default());
    for n in [1_000_000u64, 3_000_000] {
        let want = ((std::f64::consts::PI * frac((n as f64) * beta)).sin() / (std::f64::consts::PI * beta).sin()).abs();
        let nq = Rational::from_integer(n.into()) * beta.to_rational().unwrap();
        let want_exact = ((std::f64::consts::PI * frac_q(&nq).to_f64()).sin() / (std::f64::consts::PI * beta).sin()).abs();
        let got = ws.sum(n).norm();
        assert!((got - want_exact).abs() < 1e-7, "N={n}: {got} vs {want_exact} ({want})");
    }
}

#[test]
fn reduction_identity_holds_on_filiform_flows() {
    let f = |x: f64| (std::f64::consts::TAU * x).cos() + 0.5 * (2.0 * std::f64::consts::TAU * x).sin();
    let quad = OrbitQuadrature { panel: 0.125, nodes: 4 };
    let cases = [
        (vec![phi(), 0.3], vec![0.2, 0.45]),
        (vec![phi(), 0.3, 0.77], vec![0.1, 0.6, 0.35]),
        (vec![2f64.sqrt() - 1.0, 0.1, 0.2, 0.9], vec![0.05, 0.15, 0.25, 0.5]),
    ];
    for (alpha, s) in cases {
        let flow = Nilflow::new(AlgebraShape::filiform(alpha.len()), alpha).unwrap();
        for range in [SumRange::Inclusive, SumRange::Exclusive] {
            for n in [1u64, 8, 40] {
                let c = reduction_identity(&flow, &f, &s, Bump::c2(0.05).unwrap(), n, range, &quad).unwrap();
                assert!(c.error() <= 1e-8, "n={n} {range:?}: {c:?}");
            }
        }
    }
}

#[test]
fn generator_has_unit_negative_time_component() {
    let freq = FrequencyVector::new("3|3,2".parse().unwrap(), vec![q(1, 3), q(2, 5), q(1, 7), q(3, 11), q(5, 13)]).unwrap();
    let x = build_x_alpha(&freq);
    assert_eq!(x.t, q(-1, 1));
    let g = freq.shape.exp(&x).unwrap();
    assert_eq!(g.t, q(-1, 1));
}
