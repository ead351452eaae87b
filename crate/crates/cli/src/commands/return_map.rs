use std::time::Instant;

use anyhow::Result;
use nilweyl::lie_core::{AlgebraShape, GroupElement};
use nilweyl::modmath::centered;
use nilweyl::nilflow::{build_x_alpha, FrequencyVector, Nilflow};
use nilweyl::{Rational, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Report, Summary};
use crate::config::ExperimentConfig;
use crate::output::{num, Table};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReturnMapCase {
    pub case: usize,
    pub shape: String,
    pub n: u32,
    pub theta: f64,
    pub error: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReturnMapSummary {
    pub cases: usize,
    pub max_error: f64,
    pub worst: ReturnMapCase,
    pub tolerance: f64,
    pub pass: bool,
    pub wall_seconds: f64,
}

impl Summary for ReturnMapSummary {
    fn failure(&self) -> Option<String> {
        (!self.pass).then(|| {
            let w = &self.worst;
            format!("case {} (shape {}, N = {}, θ = {}): error {} > {}", w.case, w.shape, w.n, w.theta, w.error, self.tolerance)
        })
    }
}

/// Draws a shape with step `k ∈ [2, 5]` and one to three blocks, the first of full length.
fn random_shape(rng: &mut ChaCha8Rng) -> AlgebraShape {
    let k = rng.gen_range(2..=5);
    let n = rng.gen_range(1..=3);
    let mut degrees = vec![k];
    degrees.extend((1..n).map(|_| rng.gen_range(1..=k)));
    AlgebraShape::new(degrees).expect("positive degrees")
}

fn exact(x: f64) -> Rational {
    x.to_rational().expect("finite input")
}

/// Largest coordinate gap between `Φ^N(θ, s)` and `N` reduced unit steps of the
/// group flow. The steps run in exact arithmetic from the same binary inputs.
pub fn check_case(flow: &Nilflow, theta: f64, s: &[f64], n: u32) -> f64 {
    let shape = flow.shape();
    let freq = FrequencyVector::new(shape.clone(), flow.alpha().iter().map(|a| exact(*a)).collect()).expect("α has the shape's length");
    let step = shape.exp(&build_x_alpha(&freq)).expect("generator matches the shape");
    let th = exact(theta);
    let s_q: Vec<Rational> = s.iter().map(|x| exact(*x)).collect();
    let mut g: GroupElement<Rational> = shape.reduce(&GroupElement::new(th.clone(), shape.apply_h(&th, &s_q))).expect("same shape");
    for _ in 0..n {
        g = shape.reduce(&shape.group_mul(&g, &step).expect("same shape")).expect("same shape");
    }
    let closed = flow.fiber_point(theta, &flow.return_map(theta, s, n as i64));
    std::iter::once(centered(g.t.to_f64() - closed.t))
        .chain(g.v.iter().zip(&closed.v).map(|(a, b)| centered(a.to_f64() - b)))
        .map(f64::abs)
        .fold(0.0, f64::max)
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report<ReturnMapSummary>> {
    let clock = Instant::now();
    let results: Vec<ReturnMapCase> = (0..cfg.cases)
        .into_par_iter()
        .map(|case| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(case as u64);
            let shape = random_shape(&mut rng);
            let a = shape.a();
            let alpha: Vec<f64> = (0..a).map(|_| rng.gen()).collect();
            let s: Vec<f64> = (0..a).map(|_| rng.gen()).collect();
            let theta: f64 = rng.gen();
            let n = rng.gen_range(1..=cfg.max_steps);
            let flow = Nilflow::new(shape.clone(), alpha).expect("α has the shape's length");
            let error = check_case(&flow, theta, &s, n);
            ReturnMapCase { case, shape: shape.to_string(), n, theta, error }
        })
        .collect();
    let wall = clock.elapsed().as_secs_f64();
    let mut table = Table::new("return-map-check", &cfg.shape, &["case", "case_shape", "n", "theta", "error"]);
    for r in &results {
        table.push(vec![r.case.to_string(), r.shape.clone(), r.n.to_string(), num(r.theta), num(r.error)]);
    }
    let worst = results.iter().max_by(|a, b| a.error.total_cmp(&b.error)).cloned().expect("at least one case");
    Ok(Report {
        table,
        summary: ReturnMapSummary {
            cases: results.len(),
            max_error: worst.error,
            pass: worst.error <= cfg.tolerance,
            worst,
            tolerance: cfg.tolerance,
            wall_seconds: wall,
        },
    })
}
