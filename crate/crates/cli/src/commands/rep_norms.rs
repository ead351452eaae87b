use anyhow::Result;
use nilweyl::quad::QuadratureConfig;
use nilweyl::rep_theory::{green_bound_check, integral_i, integral_j, DeltaPolynomial, GreenConfig};
use nilweyl::Scalar;
use serde::{Deserialize, Serialize};

use super::scaling::form_on_jordan_basis;
use super::{Report, Summary};
use crate::config::ExperimentConfig;
use crate::output::{num, Table};

/// Tolerance on the closed-form and rescaling self-checks.
const SELF_CHECK_TOL: f64 = 1e-8;
/// Relative slack allowed on `ratio ≤ J`.
const GREEN_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RescaleCheck {
    pub w: f64,
    /// `|I(Δ_w) √w / I(Δ) − 1|`.
    pub i_error: f64,
    /// `|J(Δ_w) w / J(Δ) − 1|`.
    pub j_error: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RepNormsSummary {
    pub degrees: Vec<usize>,
    /// Monomial coefficients of `Δ`.
    pub delta: Vec<f64>,
    pub weight: f64,
    pub hat_norm: f64,
    pub weighted_norm: f64,
    pub sigma: f64,
    pub i_sigma: f64,
    pub tau: f64,
    pub green_sigma: f64,
    pub j: f64,
    /// `|I_1(x²) − √π|`.
    pub cauchy_error: f64,
    pub rescaling: Vec<RescaleCheck>,
    pub green_max_ratio: f64,
    pub green_failures: Vec<usize>,
    pub pass: bool,
}

impl RepNormsSummary {
    fn max_rescale_error(&self) -> f64 {
        self.rescaling.iter().map(|r| r.i_error.max(r.j_error)).fold(0.0, f64::max)
    }
}

impl Summary for RepNormsSummary {
    fn failure(&self) -> Option<String> {
        if self.pass {
            return None;
        }
        let mut why = Vec::new();
        if self.cauchy_error > SELF_CHECK_TOL {
            why.push(format!("I_1(x²) off √π by {}", self.cauchy_error));
        }
        let r = self.max_rescale_error();
        if r > SELF_CHECK_TOL {
            why.push(format!("rescaling error {r}"));
        }
        if !self.green_failures.is_empty() {
            why.push(format!("Green ratio above J = {} for test functions {:?}", self.j, self.green_failures));
        }
        Some(why.join("; "))
    }
}

/// `(m, c, s)` of the kernel function `f = g'` with `g(x) = x^m exp(−(x−c)²/(2s²))`.
pub fn test_function_params(i: usize) -> (i32, f64, f64) {
    let m = (i % 3) as i32;
    let c = -1.5 + 3.0 * ((i * 7) % 11) as f64 / 10.0;
    let s = 0.5 + ((i * 5) % 9) as f64 / 8.0;
    (m, c, s)
}

fn kernel_function(m: i32, c: f64, s: f64) -> impl Fn(f64) -> f64 + Copy {
    move |x: f64| {
        let e = (-(x - c) * (x - c) / (2.0 * s * s)).exp();
        let dm = if m == 0 { 0.0 } else { m as f64 * x.powi(m - 1) };
        (dm - x.powi(m) * (x - c) / (s * s)) * e
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

/// Rep coefficients, `I_σ` and `J` for the configured form, with closed-form,
/// rescaling and Green-operator self-checks.
pub fn run(cfg: &ExperimentConfig) -> Result<Report<RepNormsSummary>> {
    let shape = cfg.parsed_shape()?;
    let (_, rc_q) = form_on_jordan_basis(&shape, cfg.lambda.as_deref())?;
    let rc = rc_q.map(|c| c.to_f64());
    let delta = rc.delta().to_f64();
    let quad = QuadratureConfig::default();
    let d = delta.degree() as f64 / 2.0;
    let green_sigma = cfg.tau * d + 1.25;

    let i_sigma = integral_i(&delta, cfg.sobolev, &quad)?;
    let j = integral_j(&delta, cfg.tau, green_sigma, &quad)?;
    let x2 = DeltaPolynomial::from_polynomials(vec![vec![0.0, 1.0]]);
    let cauchy_error = (integral_i(&x2, 1.0, &quad)? - std::f64::consts::PI.sqrt()).abs();
    let rescaling = cfg
        .rescale_factors
        .iter()
        .map(|&w| {
            let dw = delta.rescaled(w);
            Ok(RescaleCheck {
                w,
                i_error: rel(integral_i(&dw, cfg.sobolev, &quad)? * w.sqrt(), i_sigma),
                j_error: rel(integral_j(&dw, cfg.tau, green_sigma, &quad)? * w, j),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table = Table::new("rep-norms", &cfg.shape, &["test_function", "m", "c", "s", "tau", "sigma", "ratio", "j", "holds"]);
    let green = GreenConfig::default();
    let mut green_max_ratio: f64 = 0.0;
    let mut green_failures = Vec::new();
    for i in 0..cfg.test_functions {
        let (m, c, s) = test_function_params(i);
        let check = green_bound_check(kernel_function(m, c, s), &delta, cfg.tau, green_sigma, &green, &quad)?;
        let holds = check.holds(GREEN_SLACK);
        if !holds {
            green_failures.push(i);
        }
        green_max_ratio = green_max_ratio.max(check.ratio);
        table.push(vec![
            i.to_string(),
            m.to_string(),
            num(c),
            num(s),
            num(cfg.tau),
            num(green_sigma),
            num(check.ratio),
            num(check.j),
            holds.to_string(),
        ]);
    }

    let mut summary = RepNormsSummary {
        degrees: rc.degrees.clone(),
        delta: delta.coeffs.clone(),
        weight: rc.weight()?,
        hat_norm: rc.hat_norm()?,
        weighted_norm: rc.weighted_norm()?,
        sigma: cfg.sobolev,
        i_sigma,
        tau: cfg.tau,
        green_sigma,
        j,
        cauchy_error,
        rescaling,
        green_max_ratio,
        green_failures,
        pass: false,
    };
    summary.pass = summary.cauchy_error <= SELF_CHECK_TOL
        && summary.max_rescale_error() <= SELF_CHECK_TOL
        && summary.green_failures.is_empty();
    Ok(Report { table, summary })
}
