use nilweyl::diophantine::*;
use nilweyl::lie_core::AlgebraShape;
use nilweyl::nilflow::Nilflow;
use nilweyl::width::CloseReturns;
use nilweyl::{q, Rational};
use num::bigint::BigInt;
use num::traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;

fn phi() -> f64 {
    0.5 * (5f64.sqrt() - 1.0)
}

fn fibonacci(n: usize) -> Vec<BigInt> {
    let mut f = vec![BigInt::one(), BigInt::one()];
    while f.len() < n {
        let next = &f[f.len() - 1] + &f[f.len() - 2];
        f.push(next);
    }
    f
}

/// Value of `[0; a_1, …, a_m]` as an exact rational.
fn from_quotients(a: &[u64]) -> Rational {
    let mut x = Rational::zero();
    for &ai in a.iter().rev() {
        x = (Rational::from_integer(ai.into()) + x).recip();
    }
    x
}

#[test]
fn golden_expansion_is_all_ones_with_fibonacci_denominators() {
    let cf = continued_fraction(&phi(), 30).unwrap();
    let fib = fibonacci(32);
    assert_eq!(cf.quotients[0], BigInt::zero());
    for i in 1..=30 {
        assert_eq!(cf.quotients[i], BigInt::one());
        assert_eq!(cf.convergents[i].1, fib[i]);
    }
}

#[test]
fn floating_expansion_agrees_with_a_high_precision_rational() {
    // F_150 / F_151 matches φ − 1 far beyond double precision.
    let fib = fibonacci(152);
    let exact = Rational::new(fib[149].clone(), fib[150].clone());
    let reference = continued_fraction(&exact, 140).unwrap();
    let float = continued_fraction(&phi(), 140).unwrap();
    assert!(float.truncated);
    assert_eq!(float.quotients[..], reference.quotients[..float.quotients.len()]);

    // √2 − 1 rounded once; `2f64.sqrt() - 1.0` would carry the error of √2.
    let exact = from_quotients(&[2; 120]);
    let reference = continued_fraction(&exact, 110).unwrap();
    let float = continued_fraction(&exact.to_f64().unwrap(), 110).unwrap();
    assert!(float.truncated && float.depth() > 15);
    assert_eq!(float.quotients[..], reference.quotients[..float.quotients.len()]);
}

#[test]
fn convergent_errors_shrink_below_the_next_denominator() {
    for quotients in [vec![1u64; 60], vec![2; 60], (1..=30).map(|i| 1 + (i * 7) % 5).collect::<Vec<_>>()] {
        let x = from_quotients(&quotients);
        let cf = continued_fraction(&x, 25).unwrap();
        let mut prev: Option<Rational> = None;
        for i in 0..21 {
            let (p, q) = &cf.convergents[i];
            let err = (Rational::from_integer(q.clone()) * &x - Rational::from_integer(p.clone())).abs();
            assert!(err < Rational::new(BigInt::one(), cf.convergents[i + 1].1.clone()), "level {i}");
            if let Some(e) = prev {
                assert!(err < e);
            }
            prev = Some(err);
            if i >= 1 {
                let q_prev = &cf.convergents[i - 1].1;
                let q_prev2 = if i >= 2 { cf.convergents[i - 2].1.clone() } else { BigInt::zero() };
                assert_eq!(*q, &cf.quotients[i] * q_prev + q_prev2);
            }
        }
    }
}

#[test]
fn one_dimensional_best_approximations_are_convergent_denominators() {
    for x in [phi(), 2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0, std::f64::consts::E - 2.0, std::f64::consts::PI - 3.0] {
        let q_max = 10_000_000;
        let best: Vec<u64> = best_approximations(&[x], q_max).unwrap().iter().map(|b| b.q).collect();
        let mut denoms = continued_fraction(&x, 40).unwrap().denominators();
        denoms.dedup();
        denoms.retain(|q| *q <= q_max);
        assert_eq!(best, denoms, "α = {x}");
    }
    let fib: Vec<u64> = fibonacci(17)[1..16].iter().map(|f| f.to_u64().unwrap()).collect();
    let best: Vec<u64> = best_approximations(&[phi()], 1000).unwrap().iter().map(|b| b.q).collect();
    assert_eq!(best[..15], fib[..]);
}

#[test]
fn near_half_has_an_early_best_approximation() {
    let best = best_approximations(&[0.5 + 1e-9], 100).unwrap();
    assert_eq!(best[1].q, 2);
    assert_eq!(best[1].p, vec![1]);
    assert!(best[1].d < 1e-8);
}

#[test]
fn two_dimensional_best_approximations_match_a_naive_scan() {
    let alpha = [phi(), 2f64.sqrt() - 1.0];
    let best = best_approximations(&alpha, 100_000).unwrap();
    let mut naive = Vec::new();
    let mut min = f64::INFINITY;
    for q in 1..=100_000u64 {
        let d = alpha.iter().map(|a| {
            let y = q as f64 * a;
            (y - y.round()).abs()
        });
        let d = d.fold(0.0, f64::max);
        if d < min {
            min = d;
            naive.push(q);
        }
    }
    assert_eq!(best.iter().map(|b| b.q).collect::<Vec<_>>(), naive);
    assert!(best.windows(2).all(|w| w[1].d < w[0].d));
    for b in &best {
        for (a, p) in alpha.iter().zip(&b.p) {
            assert!((b.q as f64 * a - *p as f64).abs() <= b.d + 1e-9);
        }
    }
    assert!(dlemma_conditions(&best, &[0.5, 0.5], 1.0).unwrap().dirichlet_ok);
}

#[test]
fn saturated_thresholds_count_everything() {
    for alpha in [vec![phi()], vec![phi(), 0.3], vec![0.1, 0.2, 0.7]] {
        let setup = CountingSetup::standard(alpha).unwrap();
        assert_eq!(setup.count(500, 1.0), 1000);
        assert_eq!(setup.clone().with_zero(true).count(500, 1.0), 1001);
    }
}

#[test]
fn golden_count_matches_sorted_fractional_parts() {
    let (n, delta) = (10_000u64, 1e-3);
    let mut parts: Vec<f64> = (1..=n).map(|r| {
        let y = r as f64 * phi();
        y - y.round()
    }).collect();
    parts.sort_by(f64::total_cmp);
    let inside = parts.partition_point(|&v| v <= delta) - parts.partition_point(|&v| v < -delta);
    let setup = CountingSetup::standard(vec![phi()]).unwrap();
    assert_eq!(setup.count(n, delta), 2 * inside as u64);
}

#[test]
fn rational_count_is_a_multiple_of_the_denominator() {
    for (num, den) in [(1u64, 4u64), (3, 8), (5, 16)] {
        let setup = CountingSetup::standard(vec![num as f64 / den as f64]).unwrap();
        for n in [10, 97, 1000] {
            assert_eq!(setup.count(n, 1e-6), 2 * (n / den));
            assert_eq!(setup.clone().with_zero(true).count(n, 1e-6), 2 * (n / den) + 1);
        }
    }
}

#[test]
fn golden_counting_constant_is_stable() {
    let setup = CountingSetup::standard(vec![phi()]).unwrap();
    let small = dn_constant_estimate(&setup, 1.0, 50_000).unwrap();
    let large = dn_constant_estimate(&setup, 1.0, 100_000).unwrap();
    assert!(small.c.is_finite() && small.c > 0.0);
    assert!(large.c >= small.c);
    assert!(large.c <= 1.2 * small.c, "{} vs {}", small.c, large.c);
    assert!(small.records.iter().all(|r| r.count <= 2 * r.n));
}

#[test]
fn a_huge_partial_quotient_blows_up_the_counting_constant() {
    let golden = CountingSetup::standard(vec![phi()]).unwrap();
    let mut quotients = vec![1u64; 8];
    quotients.push(20_000);
    quotients.extend([1; 40]);
    let liouville = from_quotients(&quotients).to_f64().unwrap();
    let spiked = CountingSetup::standard(vec![liouville]).unwrap();
    let g = dn_constant_estimate(&golden, 1.0, 100_000).unwrap().c;
    let s = dn_constant_estimate(&spiked, 1.0, 100_000).unwrap().c;
    assert!(s > 20.0 * g, "golden {g}, spiked {s}");
}

#[test]
fn rational_counting_ratio_diverges() {
    let setup = CountingSetup::standard(vec![0.375]).unwrap();
    let c: Vec<f64> = [1_000, 10_000, 100_000].iter().map(|&n| dn_constant_estimate(&setup, 1.0, n).unwrap().c).collect();
    assert!(c[1] > 5.0 * c[0] && c[2] > 5.0 * c[1], "{c:?}");
}

#[test]
fn golden_dc_constant() {
    let dc = dc_check(&[phi()], 1.0, 1_000_000).unwrap();
    let lower = 1.0 / (phi() + 3.0);
    assert!(dc.c >= lower, "{dc:?}");
    let first = (1.0 - phi()).min(phi());
    assert!(dc.c <= first + 1e-15);
    let rational = dc_check(&[0.375], 1.0, 100).unwrap();
    assert_eq!((rational.c, rational.argmin), (0.0, 8));
}

#[test]
fn counting_and_classical_constants_are_consistent() {
    let setup = CountingSetup::standard(vec![phi()]).unwrap();
    let est = dn_constant_estimate(&setup, 1.0, 100_000).unwrap();
    let check = std_check(&setup, 1.0, est.c, 100_000);
    assert!(check.holds, "{check:?}");
    let dc = dc_check(&[phi()], 1.0, 100_000).unwrap();
    assert!(dc.c <= check.min_scaled);
}

#[test]
fn golden_dlemma_constants() {
    let best = best_approximations(&[phi()], 1_000_000).unwrap();
    let rep = dlemma_conditions(&best, &[1.0], 1.0).unwrap();
    assert!(rep.levels.len() >= 25);
    assert!(rep.envelope[0] <= 2.0);
    assert!(rep.levels.iter().all(|l| l.holds(2.0)[0]));
    // One dimension: (b) and (c) carry no d-factor.
    assert!(rep.levels.iter().all(|l| (l.b - l.a).abs() < 1e-12 && (l.c - l.a).abs() < 1e-12));
    assert!(rep.dirichlet_ok);
}

#[test]
fn cutoff_stays_below_the_logarithmic_bound() {
    let setup = CountingSetup::standard(vec![phi()]).unwrap();
    let c_dn = dn_constant_estimate(&setup, 1.0, 100_000).unwrap().c;
    let flow = Nilflow::new(AlgebraShape::filiform(2), vec![phi(), 0.3]).unwrap();
    let cr = CloseReturns::new(flow, vec![0.4, 0.0], 0.5).unwrap();
    let mut k_fit: f64 = 0.0;
    for l in [1.0, 10.0, 1000.0] {
        for r in 1..=3000i64 {
            let j = cr.cutoff(cr.delta_one(r, l)) as f64;
            let bound = cutoff_upper_bound(2, 1, 1.0, 0.5, 0.5, c_dn, r).unwrap();
            assert!(j <= bound, "r={r} L={l}: J={j} bound={bound}");
            k_fit = k_fit.max(j / cutoff_log_scale(0.5, c_dn, r));
        }
    }
    assert!(k_fit > 0.0 && k_fit < 10.0, "K = {k_fit}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn count_is_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0, n in 1u64..400, dn in 0u64..200, d in 1e-4f64..0.6, f in 1.0f64..3.0) {
        let setup = CountingSetup::standard(vec![a, b]).unwrap();
        let c = setup.count(n, d);
        prop_assert!(c <= 2 * n);
        prop_assert!(setup.count(n + dn, d) >= c);
        prop_assert!(setup.count(n, (d * f).min(1.0)) >= c);
    }

    #[test]
    fn dfull_is_the_strict_dcond_threshold(w in 1i64..20, v in 1i64..20, u in 0i64..20, nu_num in 100i64..400, three in any::<bool>()) {
        let sigma = if three {
            let t = w + v + u + 1;
            vec![q(w, t), q(v, t), q(u + 1, t)]
        } else {
            vec![q(w, w + v), q(v, w + v)]
        };
        let nu = q(nu_num, 100);
        let mu = dcond_exponent(&sigma, &nu).unwrap();
        prop_assert_eq!(dfull_holds(&sigma, &nu).unwrap(), mu > q(1, 1));
        prop_assert!(mu <= nu);
    }
}
