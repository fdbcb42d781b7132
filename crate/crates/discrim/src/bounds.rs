//! Analytic and exact reference values: joint N-system Helstrom success, the
//! pure-state closed form, the depolarized-success affine relation, and the
//! prior/γ success bound.

use crate::error::{Error, Result};
use crate::measurements::ZERO_EIG_TOL;
use crate::quantum::{eig_sym, tensor, DensityMatrix, DEFAULT_DIM_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    JointHelstrom,
    Theorem1,
    Lemma1,
    Corollary1,
    Plateau,
}

#[derive(Clone, Debug)]
pub struct BoundReport {
    pub value: f64,
    pub kind: BoundKind,
    pub applicable: bool,
    pub reason: String,
}

/// Optimal joint-measurement success: q + Tr[Π M] with M = (1−q)ρ₋ − q·ρ₊ and
/// Π the projector onto the λ ≥ 0 eigenspace. Equals q plus the sum of the
/// non-negative eigenvalues of M.
pub fn joint_helstrom_success(
    q: f64,
    rho_plus_full: &DensityMatrix,
    rho_minus_full: &DensityMatrix,
) -> Result<f64> {
    if rho_plus_full.dim() != rho_minus_full.dim() {
        return Err(Error::Parameter("joint oracle: dimension mismatch".into()));
    }
    if rho_plus_full.dim() > DEFAULT_DIM_CAP {
        return Err(Error::Resource(format!(
            "joint oracle dimension {} exceeds cap {DEFAULT_DIM_CAP}",
            rho_plus_full.dim()
        )));
    }
    let m = rho_minus_full
        .mat()
        .scaled(1.0 - q)
        .sub(&rho_plus_full.mat().scaled(q));
    let eig = eig_sym(&m)?;
    let gain: f64 = eig
        .eigenvalues
        .iter()
        .filter(|&&l| l >= -ZERO_EIG_TOL)
        .sum();
    Ok((q + gain).clamp(0.0, 1.0))
}

/// Joint Helstrom success of a tensor-product problem.
pub fn joint_helstrom_success_problem(problem: &crate::problem::DiscriminationProblem) -> Result<f64> {
    let plus: Vec<DensityMatrix> = problem.pairs().iter().map(|p| p.plus.clone()).collect();
    let minus: Vec<DensityMatrix> = problem.pairs().iter().map(|p| p.minus.clone()).collect();
    joint_helstrom_success(problem.prior(), &tensor(&plus)?, &tensor(&minus)?)
}

/// Overlap angle of a pure pair: arccos|⟨ψ₊|ψ₋⟩| ∈ [0, π/2], computed from
/// the projectors via Tr[ρ₊ρ₋] = |⟨ψ₊|ψ₋⟩|².
pub fn overlap_angle(plus: &DensityMatrix, minus: &DensityMatrix) -> Result<f64> {
    if plus.dim() != minus.dim() {
        return Err(Error::Parameter("overlap_angle: dimension mismatch".into()));
    }
    let overlap_sq = plus.mat().trace_product(minus.mat()).clamp(0.0, 1.0);
    Ok(overlap_sq.sqrt().clamp(0.0, 1.0).acos())
}

/// Pure-product closed form: ½(1 + √(1 − ∏_{j=0}^N cos²θ_j)) with
/// θ₀ = arcsin(2q − 1) and θ_j the per-subsystem overlap angles.
pub fn theorem1(q: f64, thetas: &[f64]) -> f64 {
    let theta0 = (2.0 * q - 1.0).clamp(-1.0, 1.0).asin();
    let mut prod = theta0.cos().powi(2);
    for t in thetas {
        prod *= t.cos().powi(2);
    }
    0.5 * (1.0 + (1.0 - prod).max(0.0).sqrt())
}

/// Affine depolarized-success relation P^dep = γq + γ(1−2q)k/d + (1−γ)P_succ.
/// Applicability requires q ≤ 1/2 and γ/(1−γ)·(1−2q)/d strictly below the
/// magnitude of the largest negative eigenvalue of the undepolarized
/// (1−q)ρ₋ − q·ρ₊, which the caller supplies.
pub fn lemma1_depolarized(
    p_succ: f64,
    q: f64,
    gamma: f64,
    d: usize,
    k_rank: usize,
    neg_eig_magnitude: f64,
) -> BoundReport {
    let value = (gamma * q + gamma * (1.0 - 2.0 * q) * k_rank as f64 / d as f64
        + (1.0 - gamma) * p_succ)
        .clamp(0.0, 1.0);
    let mut applicable = true;
    let mut reason = String::from("affine relation applicable");
    if q > 0.5 {
        applicable = false;
        reason = format!("requires q ≤ 1/2 (got {q}); relabel hypotheses");
    } else if gamma >= 1.0 {
        applicable = false;
        reason = "fully depolarizing channel".into();
    } else {
        let shift = gamma / (1.0 - gamma) * (1.0 - 2.0 * q) / d as f64;
        if shift >= neg_eig_magnitude {
            applicable = false;
            reason = format!(
                "spectral shift {shift:.3e} not below largest negative eigenvalue magnitude {neg_eig_magnitude:.3e}"
            );
        }
    }
    BoundReport {
        value,
        kind: BoundKind::Lemma1,
        applicable,
        reason,
    }
}

/// P^dep ≤ max{1−q, q, 1−γ_min/2} with γ_min = min(γ₊, γ₋).
pub fn corollary1_bound(q: f64, gamma_plus: f64, gamma_minus: f64) -> f64 {
    let gamma_min = gamma_plus.min(gamma_minus);
    (1.0 - q).max(q).max(1.0 - gamma_min / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurements::{modified_helstrom, outcome_prob};
    use crate::belief::posterior_from_probs;
    use crate::greedy::plateau_bound;
    use crate::quantum::{depolarize, pure_qubit, pure_qutrit, Mat};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn joint_oracle_trivial_cases() {
        let plus = DensityMatrix::new(Mat::diag(&[1.0, 0.0])).unwrap();
        let minus = DensityMatrix::new(Mat::diag(&[0.0, 1.0])).unwrap();
        assert!((joint_helstrom_success(0.5, &plus, &minus).unwrap() - 1.0).abs() <= 1e-12);
        let any = depolarize(&pure_qubit(0.4), 0.6, 2).unwrap();
        assert!((joint_helstrom_success(1.0, &any, &minus).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn theorem1_examples() {
        assert!((theorem1(0.5, &[std::f64::consts::FRAC_PI_2]) - 1.0).abs() <= 1e-12);
        let want = 0.5 * (1.0 + (1.0 - 0.25f64).sqrt());
        let got = theorem1(0.5, &[std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_4]);
        assert!((got - want).abs() <= 1e-12);
        assert!((got - 0.9330).abs() <= 1e-4);
        assert!((theorem1(1.0, &[0.2, 0.3]) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn theorem1_matches_joint_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..40 {
            let n = rng.gen_range(1..=6);
            let q: f64 = rng.gen();
            let mut plus = Vec::new();
            let mut minus = Vec::new();
            let mut thetas = Vec::new();
            for _ in 0..n {
                let tp = rng.gen_range(0.0..std::f64::consts::TAU);
                let tm = rng.gen_range(0.0..std::f64::consts::TAU);
                plus.push(pure_qubit(tp));
                minus.push(pure_qubit(tm));
                thetas.push(overlap_angle(&pure_qubit(tp), &pure_qubit(tm)).unwrap());
            }
            let joint = joint_helstrom_success(
                q,
                &tensor(&plus).unwrap(),
                &tensor(&minus).unwrap(),
            )
            .unwrap();
            assert!(
                (joint - theorem1(q, &thetas)).abs() <= 1e-9,
                "n={n} q={q}"
            );
        }
    }

    #[test]
    fn lemma1_matches_direct_computation() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let mut checked = 0;
        for _ in 0..400 {
            let q: f64 = rng.gen_range(0.05..0.5);
            let gamma: f64 = rng.gen_range(0.0..0.4);
            let (d, plus, minus) = if rng.gen_bool(0.5) {
                (
                    2usize,
                    pure_qubit(rng.gen_range(0.0..std::f64::consts::TAU)),
                    pure_qubit(rng.gen_range(0.0..std::f64::consts::TAU)),
                )
            } else {
                (
                    3usize,
                    pure_qutrit(rng.gen_range(0.0..6.0), rng.gen_range(0.0..3.0)),
                    pure_qutrit(rng.gen_range(0.0..6.0), rng.gen_range(0.0..3.0)),
                )
            };
            let m = minus.mat().scaled(1.0 - q).sub(&plus.mat().scaled(q));
            let eig = eig_sym(&m).unwrap();
            let k = eig.eigenvalues.iter().filter(|&&l| l >= -ZERO_EIG_TOL).count();
            let neg_mag = eig
                .eigenvalues
                .iter()
                .filter(|&&l| l < -ZERO_EIG_TOL)
                .fold(0.0f64, |a, &l| a.max(-l));
            let p_succ = joint_helstrom_success(q, &plus, &minus).unwrap();
            let report = lemma1_depolarized(p_succ, q, gamma, d, k, neg_mag);
            if !report.applicable {
                continue;
            }
            checked += 1;
            let dep_plus = depolarize(&plus, gamma, d).unwrap();
            let dep_minus = depolarize(&minus, gamma, d).unwrap();
            let direct = joint_helstrom_success(q, &dep_plus, &dep_minus).unwrap();
            assert!(
                (report.value - direct).abs() <= 1e-9,
                "q={q} gamma={gamma} d={d}: {} vs {direct}",
                report.value
            );
        }
        assert!(checked > 100, "only {checked} applicable instances");
    }

    #[test]
    fn lemma1_trivial_specializations() {
        let r = lemma1_depolarized(0.8, 0.5, 0.3, 2, 1, 1.0);
        assert!((r.value - (0.3 / 2.0 + 0.7 * 0.8)).abs() <= 1e-12);
        let r = lemma1_depolarized(0.8, 0.4, 0.0, 2, 1, 1.0);
        assert!((r.value - 0.8).abs() <= 1e-15);
        assert!(!lemma1_depolarized(0.8, 0.6, 0.1, 2, 1, 1.0).applicable);
    }

    #[test]
    fn corollary1_examples_and_sweep() {
        assert!((corollary1_bound(0.5, 0.3, 0.3) - 0.85).abs() <= 1e-12);
        assert!((corollary1_bound(0.95, 0.3, 0.3) - 0.95).abs() <= 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..500 {
            let q: f64 = rng.gen();
            let gp: f64 = rng.gen();
            let gm: f64 = rng.gen();
            let plus = depolarize(&pure_qubit(rng.gen_range(0.0..6.3)), gp, 2).unwrap();
            let minus = depolarize(&pure_qubit(rng.gen_range(0.0..6.3)), gm, 2).unwrap();
            let s = joint_helstrom_success(q, &plus, &minus).unwrap();
            assert!(s <= corollary1_bound(q, gp, gm) + 1e-10);
        }
    }

    #[test]
    fn plateau_bound_is_tight_one_step() {
        // At p = 1 − γ/2 with a depolarized orthogonal pure pair (the "best
        // jump" instance), the one-step MLG posterior reaches the plateau
        // bound exactly.
        for gamma in [0.1, 0.3, 0.5] {
            let p = 1.0 - gamma / 2.0;
            let zero = DensityMatrix::new(Mat::diag(&[1.0, 0.0])).unwrap();
            let one = DensityMatrix::new(Mat::diag(&[0.0, 1.0])).unwrap();
            let plus = depolarize(&zero, gamma, 2).unwrap();
            let minus = depolarize(&one, gamma, 2).unwrap();
            let m = modified_helstrom(p, &plus, &minus).unwrap();
            let mut best: f64 = 0.0;
            for d in 0..2 {
                let lp = outcome_prob(&m, &plus, d).unwrap();
                let lm = outcome_prob(&m, &minus, d).unwrap();
                best = best.max(posterior_from_probs(p, lp, lm).unwrap());
            }
            assert!(
                (best - plateau_bound(gamma)).abs() <= 1e-9,
                "gamma {gamma}: {best} vs {}",
                plateau_bound(gamma)
            );
        }
    }

    #[test]
    fn overlap_angle_range() {
        let a = pure_qubit(0.0);
        assert!((overlap_angle(&a, &pure_qubit(0.0)).unwrap()).abs() <= 1e-12);
        let perp = overlap_angle(&a, &pure_qubit(std::f64::consts::PI)).unwrap();
        assert!((perp - std::f64::consts::FRAC_PI_2).abs() <= 1e-7);
    }
}
