//! Acceptance suite: one PASS/FAIL line per primary criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use nilweyl::lie_core::matrix_model::{exp_via_matrix, log_via_matrix, mul_via_matrix};
use nilweyl::lie_core::{jordan_from_lattice_basis, AlgebraElement, AlgebraShape, GroupElement};
use nilweyl::linalg::Matrix;
use nilweyl::nilflow::{reduction_identity, Bump, Nilflow, OrbitQuadrature, SumRange, WeylPolynomial, WeylSum, WeylSumConfig};
use nilweyl::renorm::{delta_rho, lambda_chain, optimal_rho};
use nilweyl::width::ap_measure_check;
use nilweyl::{q, Rational};
use nilweyl_cli::commands::{dioph, rep_norms, return_map, scaling, weyl_decay};
use nilweyl_cli::config::ExperimentConfig;
use num::complex::Complex64;
use num::traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn phi() -> f64 {
    0.5 * (5f64.sqrt() - 1.0)
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn return_map_oracle() -> Outcome {
    let r = return_map::run(&ExperimentConfig::default()).map_err(|e| e.to_string())?.summary;
    ensure(
        r.cases == 1000 && r.max_error <= 1e-10 && r.wall_seconds < 30.0,
        format!("{} cases, max error {:.3e}, {:.2} s", r.cases, r.max_error, r.wall_seconds),
    )
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    q(rng.gen_range(-40..=40), rng.gen_range(1..=9))
}

fn exact_algebra() -> Outcome {
    let clock = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut checks = 0usize;
    let mut fail = Vec::new();
    let mut check = |ok: bool, what: &str| {
        checks += 1;
        if !ok && fail.len() < 5 {
            fail.push(what.to_string());
        }
    };
    for shape in ["1|1", "2|2", "3|3", "4|4,2", "5|5", "3|3,3,1", "5|5,4,2", "6|6,1"] {
        let shape: AlgebraShape = shape.parse().unwrap();
        let a = shape.a();

        // Generator relations: x y_j x⁻¹ = (0, h(1) e_j) and exp(ξ) = x.
        let x = GroupElement::<Rational>::x(a);
        let xinv = shape.group_inv(&x).unwrap();
        for j in 0..a {
            let c = shape.group_mul(&shape.group_mul(&x, &GroupElement::y(a, j)).unwrap(), &xinv).unwrap();
            let mut e = vec![Rational::zero(); a];
            e[j] = Rational::one();
            check(c == GroupElement::new(Rational::zero(), shape.apply_h(&Rational::one(), &e)), "x y_j x⁻¹");
        }
        check(shape.exp(&AlgebraElement::<Rational>::xi(a)).unwrap() == x, "exp ξ = x");

        // R/S inversion and the Jordan chain structure.
        let jd = jordan_from_lattice_basis::<Rational>(&shape);
        for (r, s) in jd.r.iter().zip(&jd.s) {
            let id = Matrix::<Rational>::identity(r.rows());
            check(id.add(r).mul(&id.add(s)) == id && id.add(s).mul(&id.add(r)) == id, "(I+R)(I+S) = I");
        }
        let xi = AlgebraElement::<Rational>::xi(a);
        for chain in &jd.basis.chains {
            for w in chain.windows(2) {
                check(shape.ad_ideal(&xi, &jd.basis.y[w[0]]) == jd.basis.y[w[1]], "[ξ, η_i] = η_{i+1}");
            }
        }

        for _ in 0..40 {
            let g: Vec<GroupElement<Rational>> =
                (0..3).map(|_| GroupElement::new(random_rational(&mut rng), (0..a).map(|_| random_rational(&mut rng)).collect())).collect();
            let left = shape.group_mul(&shape.group_mul(&g[0], &g[1]).unwrap(), &g[2]).unwrap();
            let right = shape.group_mul(&g[0], &shape.group_mul(&g[1], &g[2]).unwrap()).unwrap();
            check(left == right, "associativity");
            check(shape.group_mul(&g[0], &shape.group_inv(&g[0]).unwrap()).unwrap() == GroupElement::identity(a), "inverse");
            let y = AlgebraElement::new(g[1].t.clone(), g[1].v.clone());
            check(shape.log(&shape.exp(&y).unwrap()).unwrap() == y, "log∘exp");
            check(shape.exp(&shape.log(&g[2]).unwrap()).unwrap() == g[2], "exp∘log");
            check(mul_via_matrix(&shape, &g[0], &g[1]) == shape.group_mul(&g[0], &g[1]).unwrap(), "matrix product");
            check(exp_via_matrix(&shape, &y) == shape.exp(&y).unwrap(), "matrix exp");
            check(log_via_matrix(&shape, &g[2]) == shape.log(&g[2]).unwrap(), "matrix log");
        }
    }
    let secs = clock.elapsed().as_secs_f64();
    ensure(fail.is_empty() && secs < 10.0, format!("{checks} exact identities, {:.2} s{}", secs, if fail.is_empty() { String::new() } else { format!(", failed: {fail:?}") }))
}

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
        *self = {
            let (hi, lo) = two_sum(s, e + self.1);
            DoubleDouble(hi, lo)
        };
    }
}

/// `Σ_{n<N} e(P(n))` with `P(n) mod 1` computed exactly in integers: each
/// coefficient is a dyadic `m / 2^e`, so the phase is an integer mod `2^E`.
fn naive_weyl_sum(coeffs: &[f64], n: u64) -> Complex64 {
    let parts: Vec<(u128, u32)> = coeffs
        .iter()
        .map(|&c| {
            assert!((0.0..1.0).contains(&c));
            if c == 0.0 {
                return (0, 0);
            }
            let bits = c.to_bits();
            let exp = ((bits >> 52) & 0x7ff) as i32;
            let mant = (bits & ((1 << 52) - 1)) | (1 << 52);
            // c = mant · 2^(exp − 1075)
            let e = (1075 - exp) as u32;
            let tz = mant.trailing_zeros().min(e);
            ((mant >> tz) as u128, e - tz)
        })
        .collect();
    let big_e = parts.iter().map(|p| p.1).max().unwrap_or(0);
    assert!(big_e <= 120, "coefficient too small for the integer oracle");
    let mask = if big_e == 0 { 0 } else { (1u128 << big_e) - 1 };
    let scale = 0.5f64.powi(big_e as i32);
    let (mut re, mut im) = (DoubleDouble::default(), DoubleDouble::default());
    for m in 0..n {
        let mut r: u128 = 0;
        let mut pw: u128 = 1;
        for &(num, e) in &parts {
            r = r.wrapping_add(num.wrapping_mul(pw) << (big_e - e));
            pw = pw.wrapping_mul(m as u128);
        }
        let phase = (r & mask) as f64 * scale;
        let (s, c) = (std::f64::consts::TAU * phase).sin_cos();
        re.add(c);
        im.add(s);
    }
    Complex64::new(re.0 + re.1, im.0 + im.1)
}

fn weyl_kernel() -> Outcome {
    let n = 1_000_000u64;
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut worst: f64 = 0.0;
    let mut kernel_secs = 0.0;
    let mut terms = 0u64;
    for k in 1..=4usize {
        for _ in 0..2 {
            let mut coeffs: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..1.0)).collect();
            coeffs.push(phi() / (1..=k).product::<usize>() as f64);
            let ws = WeylSum::new(&WeylPolynomial::new(coeffs.clone()), WeylSumConfig::default());
            let clock = Instant::now();
            let got = ws.sum(n);
            kernel_secs += clock.elapsed().as_secs_f64();
            terms += n;
            let want = naive_weyl_sum(&coeffs, n);
            worst = worst.max((got - want).norm() / want.norm());
        }
    }
    let rate = terms as f64 / kernel_secs / rayon::current_num_threads() as f64;
    ensure(worst <= 1e-6, format!("k ≤ 4, N = 10^6, max relative error {worst:.3e}; throughput {rate:.3e} terms/s/core"))
}

fn reduction() -> Outcome {
    let f = |x: f64| (std::f64::consts::TAU * x).cos() + 0.5 * (2.0 * std::f64::consts::TAU * x).sin();
    let quad = OrbitQuadrature::default();
    let mut worst: f64 = 0.0;
    for (alpha, s) in [(vec![phi(), 0.3], vec![0.2, 0.45]), (vec![phi(), 0.3, 0.77], vec![0.1, 0.6, 0.35])] {
        let flow = Nilflow::new(AlgebraShape::filiform(alpha.len()), alpha).unwrap();
        for range in [SumRange::Inclusive, SumRange::Exclusive] {
            for n in [1u64, 10, 37, 100] {
                let c = reduction_identity(&flow, &f, &s, Bump::c2(0.05).unwrap(), n, range, &quad).map_err(|e| e.to_string())?;
                worst = worst.max(c.error());
            }
        }
    }
    ensure(worst <= 1e-8, format!("k = 2, 3, N ≤ 100, max error {worst:.3e}"))
}

fn rep_norm_checks() -> Outcome {
    let r = rep_norms::run(&ExperimentConfig::default()).map_err(|e| e.to_string())?;
    let s = r.summary;
    let rescale = s.rescaling.iter().map(|c| c.i_error.max(c.j_error)).fold(0.0, f64::max);
    ensure(
        s.pass && r.table.rows.len() == 20,
        format!(
            "|I_1(x²) − √π| = {:.1e}, rescaling {:.1e}, Green ratio ≤ J on {}/20 (max ratio {:.4}, J = {:.4})",
            s.cauchy_error,
            rescale,
            20 - s.green_failures.len(),
            s.green_max_ratio,
            s.j
        ),
    )
}

fn scaling_laws() -> Outcome {
    let cfg = ExperimentConfig { shape: "3|3".into(), t_max: 10.0, ..Default::default() };
    let s = scaling::run(&cfg).map_err(|e| e.to_string())?.summary;
    let e = s.exact.clone().ok_or("no exact exponents")?;
    let exact_ok = e.lambda == "1/3" && e.delta == "1/3";
    let slope_ok = (s.weight_slope + 2.0 / 3.0).abs() <= 0.02;
    ensure(
        exact_ok && slope_ok && s.hat_bounded,
        format!(
            "λ = {}, δ = {}, weight slope {:.6} vs −2/3, max |Λ̂| {} ≤ ‖Λ‖ = {}",
            e.lambda, e.delta, s.weight_slope, s.max_hat_norm, s.weighted_norm
        ),
    )
}

fn exponent_identity() -> Outcome {
    let mut cases = 0;
    for k in 2..=6usize {
        let blocks = [(format!("{k}|{k}"), vec![q(1, 1)]), (format!("{k}|{k},{k}"), vec![q(1, 3), q(2, 3)]), (format!("{k}|{k},{}", k - 1), vec![q(3, 4), q(1, 4)])];
        for (shape, weights) in blocks {
            let shape: AlgebraShape = shape.parse().unwrap();
            for m0 in 0..weights.len() {
                if shape.degrees()[m0] != k {
                    continue;
                }
                let rho = optimal_rho(&shape, &weights, m0).map_err(|e| e.to_string())?;
                let chain = rho.block(m0).to_vec();
                let s = weights[m0].clone();
                let kq = q(k as i64, 1);
                let want = q(2, 1) * &s / ((&kq - q(1, 1)) * ((&kq - q(2, 1)) * &s + q(2, 1)));
                let (l, d) = (lambda_chain(&chain), delta_rho(&chain));
                if l != want || d != want {
                    return Err(format!("k = {k}, shape {shape}, m0 = {m0}: λ = {l}, δ = {d}, want {want}"));
                }
                cases += 1;
            }
        }
    }
    Ok(format!("λ(ρ) = δ(ρ) = 2σ/((k−1)((k−2)σ+2)) exactly in {cases} cases, k = 2..6"))
}

fn ap_measure() -> Outcome {
    let cases: Vec<(AlgebraShape, Vec<f64>, Vec<f64>, i64)> = vec![
        (AlgebraShape::filiform(2), vec![phi(), 0.3], vec![0.3, 0.05], 3),
        (AlgebraShape::filiform(2), vec![phi(), 0.3], vec![0.1, 0.1], 5),
        (AlgebraShape::filiform(3), vec![phi(), 0.3, 0.7], vec![0.2, 0.1, 0.25], 3),
        (AlgebraShape::filiform(3), vec![2f64.sqrt() - 1.0, 0.11, 0.5], vec![0.1, 0.05, 0.2], 12),
    ];
    let mut worst: f64 = 0.0;
    for (shape, alpha, half, r) in cases {
        let flow = Nilflow::new(shape, alpha).unwrap();
        let m = ap_measure_check(&flow, 0.37, &half, r, 100_000, 7).map_err(|e| e.to_string())?;
        if m.exact == 0.0 {
            return Err(format!("empty AP set for r = {r}"));
        }
        worst = worst.max(m.z.abs());
    }
    ensure(worst <= 3.0, format!("k = 2, 3, 10^5 samples, max |z| = {worst:.2}"))
}

fn decay() -> Outcome {
    let clock = Instant::now();
    let two = weyl_decay::run(&ExperimentConfig { shape: "2|2".into(), ..Default::default() }).map_err(|e| e.to_string())?.summary;
    let three = weyl_decay::run(&ExperimentConfig { shape: "3|3".into(), ..Default::default() }).map_err(|e| e.to_string())?.summary;
    let secs = clock.elapsed().as_secs_f64();
    let ok2 = two.pass && (0.45..=0.55).contains(&two.fitted_slope) && two.max_slope <= 2.0 / 3.0 + 0.05;
    let ok3 = three.pass && three.samples.len() == 20 && three.max_slope <= 8.0 / 9.0 + 0.05;
    ensure(
        ok2 && ok3 && secs < 600.0,
        format!(
            "k = 2: mean slope {:.4} (max {:.4} ≤ {:.4}); k = 3: max slope {:.4} ≤ {:.4} over {} samples; N ∈ [{}, {}], {:.1} s",
            two.fitted_slope,
            two.max_slope,
            2.0 / 3.0 + 0.05,
            three.max_slope,
            8.0 / 9.0 + 0.05,
            three.samples.len(),
            two.fit_range[0],
            two.fit_range[1],
            secs
        ),
    )
}

fn diophantine() -> Outcome {
    let golden = dioph::run(&ExperimentConfig::default()).map_err(|e| e.to_string())?.summary;
    let rational = dioph::run(&ExperimentConfig { alpha: Some(vec![0.375]), ..Default::default() }).map_err(|e| e.to_string())?.summary;
    ensure(
        golden.dc.c >= 0.27 && golden.dc.q_max == 1_000_000 && !golden.ratio_diverges && !rational.dc_pass && rational.ratio_diverges,
        format!(
            "φ: c = {:.4} at Q_max = {}; 3/8: c = {}, D_1 ratio slope {:.3}",
            golden.dc.c, golden.dc.q_max, rational.dc.c, rational.ratio_growth_slope
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("return-map oracle equivalence", return_map_oracle),
        ("exact algebra suite", exact_algebra),
        ("Weyl-sum kernel vs exact-phase summation", weyl_kernel),
        ("reduction identity", reduction),
        ("representation norms", rep_norm_checks),
        ("scaling laws", scaling_laws),
        ("optimal exponent identity", exponent_identity),
        ("AP-measure Monte Carlo", ap_measure),
        ("empirical decay vs exponent bound", decay),
        ("Diophantine certificates", diophantine),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panicked".into()))
        });
        match out {
            Ok(d) => println!("PASS  {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL  {name}: {d}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
