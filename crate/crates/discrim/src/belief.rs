//! Bayesian belief tracking over the two hypotheses: likelihood/posterior
//! primitives and the additive log-likelihood-ratio parametrization.

use crate::error::{Error, Result};
use crate::measurements::{outcome_prob, ProjectiveMeasurement};
use crate::quantum::DensityMatrix;

/// Outcomes with total likelihood below this are treated as impossible.
pub const LIKELIHOOD_FLOOR: f64 = 1e-300;

/// ℒ(p, a, d) = P(d | ρ₊, a)·p + P(d | ρ₋, a)·(1−p).
pub fn likelihood(
    p: f64,
    a: &ProjectiveMeasurement,
    rho_plus: &DensityMatrix,
    rho_minus: &DensityMatrix,
    d: usize,
) -> Result<f64> {
    let lp = outcome_prob(a, rho_plus, d)?;
    let lm = outcome_prob(a, rho_minus, d)?;
    Ok(lp * p + lm * (1.0 - p))
}

/// 𝒫(p, a, d) = P(d | ρ₊, a)·p / ℒ(p, a, d).
pub fn posterior(
    p: f64,
    a: &ProjectiveMeasurement,
    rho_plus: &DensityMatrix,
    rho_minus: &DensityMatrix,
    d: usize,
) -> Result<f64> {
    let lp = outcome_prob(a, rho_plus, d)?;
    let lm = outcome_prob(a, rho_minus, d)?;
    posterior_from_probs(p, lp, lm)
}

/// Posterior from precomputed outcome probabilities under each hypothesis.
pub fn posterior_from_probs(p: f64, prob_plus: f64, prob_minus: f64) -> Result<f64> {
    let l = prob_plus * p + prob_minus * (1.0 - p);
    if l < LIKELIHOOD_FLOOR {
        return Err(Error::ImpossibleObservation(format!(
            "outcome has likelihood {l:.3e} at prior {p}"
        )));
    }
    Ok((prob_plus * p / l).clamp(0.0, 1.0))
}

/// ℓ ← ℓ + ln[P(d|ρ₊,a) / P(d|ρ₋,a)], with ±∞ sentinels when the outcome is
/// impossible under exactly one hypothesis.
pub fn llr_update(
    ell: f64,
    a: &ProjectiveMeasurement,
    rho_plus: &DensityMatrix,
    rho_minus: &DensityMatrix,
    d: usize,
) -> Result<f64> {
    let lp = outcome_prob(a, rho_plus, d)?;
    let lm = outcome_prob(a, rho_minus, d)?;
    if lp < LIKELIHOOD_FLOOR && lm < LIKELIHOOD_FLOOR {
        return Err(Error::ImpossibleObservation(
            "outcome impossible under both hypotheses".into(),
        ));
    }
    if lp < LIKELIHOOD_FLOOR {
        return Ok(f64::NEG_INFINITY);
    }
    if lm < LIKELIHOOD_FLOOR {
        return Ok(f64::INFINITY);
    }
    Ok(ell + (lp / lm).ln())
}

/// ln(p / (1−p)); ±∞ at the endpoints.
pub fn logit(p: f64) -> f64 {
    if p <= 0.0 {
        f64::NEG_INFINITY
    } else if p >= 1.0 {
        f64::INFINITY
    } else {
        (p / (1.0 - p)).ln()
    }
}

pub fn sigmoid(ell: f64) -> f64 {
    if ell == f64::INFINITY {
        1.0
    } else if ell == f64::NEG_INFINITY {
        0.0
    } else if ell >= 0.0 {
        1.0 / (1.0 + (-ell).exp())
    } else {
        let e = ell.exp();
        e / (1.0 + e)
    }
}
