use anyhow::{bail, Result};
use nilweyl::lie_core::{jordan_from_lattice_basis, AlgebraShape};
use nilweyl::quad::QuadratureConfig;
use nilweyl::renorm::{choose_m0, coefficients_at, delta_rho, lambda_chain, lyapunov_norm, optimal_exponent, optimal_rho, scaling_report, LyapunovConfig};
use nilweyl::rep_theory::{rep_coefficients, LinearForm, RepCoefficients};
use nilweyl::{Rational, Scalar};
use serde::{Deserialize, Serialize};

use super::{Report, Summary};
use crate::config::ExperimentConfig;
use crate::output::{num, Table};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExactExponents {
    pub m0: usize,
    pub rho: Vec<String>,
    pub lambda: String,
    pub delta: String,
    pub optimum: String,
    pub lambda_equals_delta: bool,
    pub lambda_equals_optimum: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingSummary {
    pub rho: Vec<f64>,
    /// Present when the exponents come from the optimal formula.
    pub exact: Option<ExactExponents>,
    /// `λ_F(ρ) = min ρ_i / d_i`.
    pub lambda: f64,
    pub weight_slope: f64,
    /// `−(1 − λ)`.
    pub weight_prediction: f64,
    pub i_slope: f64,
    /// `−(1 − λ)/2`.
    pub i_prediction: f64,
    pub dist_slope: f64,
    /// `λ/2`.
    pub dist_prediction: f64,
    pub slope_tol: f64,
    /// `‖Λ‖_F` at `t = 0`.
    pub weighted_norm: f64,
    pub max_hat_norm: f64,
    pub hat_bounded: bool,
    pub pass: bool,
}

impl Summary for ScalingSummary {
    fn failure(&self) -> Option<String> {
        if self.pass {
            return None;
        }
        let mut why = Vec::new();
        if (self.weight_slope - self.weight_prediction).abs() > self.slope_tol {
            why.push(format!("weight slope {} vs {}", self.weight_slope, self.weight_prediction));
        }
        if (self.i_slope - self.i_prediction).abs() > self.slope_tol {
            why.push(format!("I slope {} vs {}", self.i_slope, self.i_prediction));
        }
        if !self.hat_bounded {
            why.push(format!("|Λ̂| reaches {} > ‖Λ‖ = {}", self.max_hat_norm, self.weighted_norm));
        }
        if let Some(e) = &self.exact {
            if !(e.lambda_equals_delta && e.lambda_equals_optimum) {
                why.push(format!("λ = {}, δ = {}, optimum {}", e.lambda, e.delta, e.optimum));
            }
        }
        Some(why.join("; "))
    }
}

/// `Λ` from its values on the Jordan basis, with rep coefficients in exact arithmetic.
pub fn form_on_jordan_basis(shape: &AlgebraShape, values: Option<&[f64]>) -> Result<(LinearForm<Rational>, RepCoefficients<Rational>)> {
    let basis = jordan_from_lattice_basis::<Rational>(shape).basis;
    let vals: Vec<Rational> = match values {
        Some(v) => {
            if v.len() != shape.a() {
                bail!("Λ needs {} values for shape {shape}, got {}", shape.a(), v.len());
            }
            v.iter().map(|x| x.to_rational().ok_or_else(|| anyhow::anyhow!("Λ value {x} is not finite"))).collect::<Result<_>>()?
        }
        None => {
            let mut v = vec![Rational::from_integer(0.into()); shape.a()];
            v[shape.index(0, shape.degrees()[0] - 1)] = Rational::from_integer(1.into());
            v
        }
    };
    let lam = LinearForm::from_basis_values(&basis, &vals)?;
    let rc = rep_coefficients(&lam, &basis)?;
    if !rc.is_nondegenerate() {
        bail!("Λ vanishes on the derived algebra; its representation is one-dimensional");
    }
    Ok((lam, rc))
}

fn exact_exponents(shape: &AlgebraShape, lam: &LinearForm<Rational>, weights: &[Rational]) -> Result<ExactExponents> {
    let m0 = choose_m0(shape, &lam.values)?;
    let rho = optimal_rho(shape, weights, m0)?;
    let chain = rho.block(m0).to_vec();
    let (lambda, delta) = (lambda_chain(&chain), delta_rho(&chain));
    let optimum = optimal_exponent(shape.k(), &weights[m0]);
    Ok(ExactExponents {
        m0,
        rho: rho.rho.iter().map(|r| r.to_string()).collect(),
        lambda_equals_delta: lambda == delta,
        lambda_equals_optimum: lambda == optimum,
        lambda: lambda.to_string(),
        delta: delta.to_string(),
        optimum: optimum.to_string(),
    })
}

/// Weight, `|Λ̂|`, `I_σ`, `|D|` and the Lyapunov norm along `t ↦ A^ρ_t F`.
pub fn run(cfg: &ExperimentConfig) -> Result<Report<ScalingSummary>> {
    let shape = cfg.parsed_shape()?;
    let (lam, rc_q) = form_on_jordan_basis(&shape, cfg.lambda.as_deref())?;
    let rc = rc_q.map(|c| c.to_f64());
    let (rho, exact) = match &cfg.rho {
        Some(r) => {
            if r.len() != shape.a() {
                bail!("ρ needs {} entries, got {}", shape.a(), r.len());
            }
            (r.clone(), None)
        }
        None => {
            let weights = cfg.parsed_block_weights()?;
            let e = exact_exponents(&shape, &lam, &weights)?;
            let rho: Vec<f64> = e.rho.iter().map(|s| s.parse::<Rational>().map(|q| q.to_f64())).collect::<Result<_, _>>()?;
            (rho, Some(e))
        }
    };
    let t = cfg.t_scan();
    let quad = QuadratureConfig::default();
    let rep = scaling_report(&rc, &rho, cfg.sobolev, &t, &quad)?;
    let lyap_cfg = LyapunovConfig::default();
    let mut table = Table::new("scaling-scan", &cfg.shape, &["t", "weight", "hat_norm", "i_sigma", "dist_norm", "lyapunov"]);
    for (i, &ti) in t.iter().enumerate() {
        let ly = lyapunov_norm(&coefficients_at(&rc, &rho, ti), &rho, cfg.sobolev, &lyap_cfg)?;
        table.push(vec![num(ti), num(rep.weight[i]), num(rep.hat_norm[i]), num(rep.i_sigma[i]), num(rep.dist_norm[i]), num(ly.value)]);
    }
    let lambda = rep.lambda;
    let max_hat_norm = rep.hat_norm.iter().cloned().fold(0.0, f64::max);
    let hat_bounded = rep.hat_norm.iter().all(|h| *h <= rep.weighted_norm * (1.0 + 1e-12));
    let mut s = ScalingSummary {
        rho,
        exact,
        lambda,
        weight_slope: rep.weight_fit.slope,
        weight_prediction: -(1.0 - lambda),
        i_slope: rep.i_fit.slope,
        i_prediction: -(1.0 - lambda) / 2.0,
        dist_slope: rep.dist_fit.slope,
        dist_prediction: lambda / 2.0,
        slope_tol: cfg.slope_tol,
        weighted_norm: rep.weighted_norm,
        max_hat_norm,
        hat_bounded,
        pass: false,
    };
    let exact_ok = s.exact.as_ref().is_none_or(|e| e.lambda_equals_delta && e.lambda_equals_optimum);
    s.pass = exact_ok
        && hat_bounded
        && (s.weight_slope - s.weight_prediction).abs() <= cfg.slope_tol
        && (s.i_slope - s.i_prediction).abs() <= cfg.slope_tol;
    Ok(Report { table, summary: s })
}
