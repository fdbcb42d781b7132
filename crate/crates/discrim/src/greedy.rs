//! The Locally Greedy (LG) and Modified Locally Greedy (MLG) strategies,
//! evaluated exactly by enumeration of the full outcome tree — no sampling.

use crate::belief::{posterior_from_probs, LIKELIHOOD_FLOOR};
use crate::error::{Error, Result};
use crate::measurements::{helstrom, modified_helstrom, outcome_prob, ProjectiveMeasurement};
use crate::problem::{CandidatePair, DiscriminationProblem};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GreedyVariant {
    Lg,
    Mlg,
}

/// One completed outcome path through the tree.
#[derive(Clone, Debug)]
pub struct LeafRecord {
    pub outcomes: Vec<usize>,
    /// P(path | ρ₊) and P(path | ρ₋).
    pub prob_plus: f64,
    pub prob_minus: f64,
    pub final_belief: f64,
    /// +1 decodes ρ₊, −1 decodes ρ₋.
    pub decode: i32,
}

#[derive(Clone, Debug)]
pub struct StrategyEvaluation {
    pub success_probability: f64,
    /// Per-round error probability along the path of most likely outcomes.
    pub per_round_error: Vec<f64>,
    pub leaf_records: Option<Vec<LeafRecord>>,
}

fn check_order(order: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(Error::Parameter(format!(
            "order length {} != subsystem count {n}",
            order.len()
        )));
    }
    for &j in order {
        if j >= n || seen[j] {
            return Err(Error::Parameter("order is not a permutation".into()));
        }
        seen[j] = true;
    }
    Ok(())
}

fn choose(variant: GreedyVariant, p: f64, pair: &CandidatePair) -> Result<ProjectiveMeasurement> {
    match variant {
        GreedyVariant::Lg => helstrom(p, &pair.plus, &pair.minus),
        GreedyVariant::Mlg => modified_helstrom(p, &pair.plus, &pair.minus),
    }
}

/// Exact evaluation by depth-first enumeration of all outcome words.
pub fn evaluate_greedy(
    problem: &DiscriminationProblem,
    order: &[usize],
    variant: GreedyVariant,
    collect_leaves: bool,
) -> Result<StrategyEvaluation> {
    check_order(order, problem.n())?;
    let q = problem.prior();
    let mut success = 0.0;
    let mut leaves = if collect_leaves { Some(Vec::new()) } else { None };
    let mut outcomes = Vec::with_capacity(problem.n());

    // Recursion carried on an explicit helper to keep the node state small.
    fn descend(
        problem: &DiscriminationProblem,
        order: &[usize],
        variant: GreedyVariant,
        depth: usize,
        belief: f64,
        prob_plus: f64,
        prob_minus: f64,
        outcomes: &mut Vec<usize>,
        success: &mut f64,
        leaves: &mut Option<Vec<LeafRecord>>,
    ) -> Result<()> {
        let q = problem.prior();
        if depth == order.len() {
            let decode = if belief >= 0.5 { 1 } else { -1 };
            if decode == 1 {
                *success += q * prob_plus;
            } else {
                *success += (1.0 - q) * prob_minus;
            }
            if let Some(ls) = leaves {
                ls.push(LeafRecord {
                    outcomes: outcomes.clone(),
                    prob_plus,
                    prob_minus,
                    final_belief: belief,
                    decode,
                });
            }
            return Ok(());
        }
        let pair = problem.pair(order[depth]);
        let m = choose(variant, belief, pair)?;
        for d in 0..m.num_outcomes() {
            let lp = outcome_prob(&m, &pair.plus, d)?;
            let lm = outcome_prob(&m, &pair.minus, d)?;
            let l = lp * belief + lm * (1.0 - belief);
            if l < LIKELIHOOD_FLOOR {
                continue; // outcome unreachable from this node
            }
            let next = posterior_from_probs(belief, lp, lm)?;
            outcomes.push(d);
            descend(
                problem,
                order,
                variant,
                depth + 1,
                next,
                prob_plus * lp,
                prob_minus * lm,
                outcomes,
                success,
                leaves,
            )?;
            outcomes.pop();
        }
        Ok(())
    }

    descend(
        problem,
        order,
        variant,
        0,
        q,
        1.0,
        1.0,
        &mut outcomes,
        &mut success,
        &mut leaves,
    )?;

    // Eq.-style per-round error along the maximum-likelihood path.
    let mut per_round_error = Vec::with_capacity(problem.n());
    let mut p = q;
    for &j in order {
        let pair = problem.pair(j);
        let m = choose(variant, p, pair)?;
        let pi = &m.projectors[1];
        let err = (1.0 - pi.trace_product(pair.minus.mat())) * (1.0 - p)
            + pi.trace_product(pair.plus.mat()) * p;
        per_round_error.push(err.clamp(0.0, 1.0));
        let mut best = (0usize, -1.0f64);
        for d in 0..m.num_outcomes() {
            let l = outcome_prob(&m, &pair.plus, d)? * p
                + outcome_prob(&m, &pair.minus, d)? * (1.0 - p);
            if l > best.1 {
                best = (d, l);
            }
        }
        let lp = outcome_prob(&m, &pair.plus, best.0)?;
        let lm = outcome_prob(&m, &pair.minus, best.0)?;
        p = posterior_from_probs(p, lp, lm)?;
    }

    Ok(StrategyEvaluation {
        success_probability: success.clamp(0.0, 1.0),
        per_round_error,
        leaf_records: leaves,
    })
}

pub fn run_lg(problem: &DiscriminationProblem, order: &[usize]) -> Result<StrategyEvaluation> {
    evaluate_greedy(problem, order, GreedyVariant::Lg, false)
}

pub fn run_mlg(problem: &DiscriminationProblem, order: &[usize]) -> Result<StrategyEvaluation> {
    evaluate_greedy(problem, order, GreedyVariant::Mlg, false)
}

/// Identity permutation helper.
pub fn natural_order(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// Upper bound on LG success for identical depolarized copies:
/// (1−γ/2)² / ((1−γ/2)² + (γ/2)²).
pub fn plateau_bound(gamma: f64) -> f64 {
    let a = (1.0 - gamma / 2.0).powi(2);
    let b = (gamma / 2.0).powi(2);
    a / (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{overlap_angle, theorem1};
    use crate::problem::CandidatePair;
    use crate::quantum::{depolarize, pure_qubit};
    use rand::{seq::SliceRandom, Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pure_problem(thetas: &[(f64, f64)], q: f64) -> DiscriminationProblem {
        let pairs = thetas
            .iter()
            .map(|&(tp, tm)| CandidatePair {
                plus: pure_qubit(tp),
                minus: pure_qubit(tm),
            })
            .collect();
        DiscriminationProblem::new(pairs, q).unwrap()
    }

    fn depolarized_problem(angles: &[(f64, f64)], gamma: f64, q: f64) -> DiscriminationProblem {
        let pairs = angles
            .iter()
            .map(|&(tp, tm)| CandidatePair {
                plus: depolarize(&pure_qubit(tp), gamma, 2).unwrap(),
                minus: depolarize(&pure_qubit(tm), gamma, 2).unwrap(),
            })
            .collect();
        DiscriminationProblem::new(pairs, q).unwrap()
    }

    #[test]
    fn single_round_matches_helstrom_formula() {
        // q = 1/2, pure pair with overlap angle θ → success (1 + sinθ)/2.
        for theta in [0.2, 0.7, 1.3] {
            let prob = pure_problem(&[(theta, -theta)], 0.5);
            let eval = run_lg(&prob, &[0]).unwrap();
            assert!(
                (eval.success_probability - 0.5 * (1.0 + theta.sin())).abs() <= 1e-12,
                "theta {theta}"
            );
        }
    }

    #[test]
    fn pure_products_match_theorem1() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..30 {
            let n = rng.gen_range(1..=6);
            let q: f64 = rng.gen();
            let angles: Vec<(f64, f64)> = (0..n)
                .map(|_| {
                    (
                        rng.gen_range(0.0..std::f64::consts::TAU),
                        rng.gen_range(0.0..std::f64::consts::TAU),
                    )
                })
                .collect();
            let prob = pure_problem(&angles, q);
            let thetas: Vec<f64> = angles
                .iter()
                .map(|&(tp, tm)| overlap_angle(&pure_qubit(tp), &pure_qubit(tm)).unwrap())
                .collect();
            let eval = run_lg(&prob, &natural_order(n)).unwrap();
            let want = theorem1(q, &thetas);
            assert!(
                (eval.success_probability - want).abs() <= 1e-9,
                "n={n} q={q} got {} want {want}",
                eval.success_probability
            );
        }
    }

    #[test]
    fn indistinguishable_states_give_prior() {
        for q in [0.5, 0.3, 0.8] {
            let prob = depolarized_problem(&[(0.4, 0.4), (0.4, 0.4)], 0.2, q);
            let eval = run_mlg(&prob, &[0, 1]).unwrap();
            assert!((eval.success_probability - q.max(1.0 - q)).abs() <= 1e-12);
        }
    }

    #[test]
    fn leaf_records_sum_to_success() {
        let prob = depolarized_problem(&[(0.4, -0.8), (1.4, 2.0), (0.1, 2.9)], 0.3, 0.45);
        let eval = evaluate_greedy(&prob, &[2, 0, 1], GreedyVariant::Mlg, true).unwrap();
        let leaves = eval.leaf_records.as_ref().unwrap();
        let q = prob.prior();
        let total: f64 = leaves
            .iter()
            .map(|l| {
                if l.decode == 1 {
                    q * l.prob_plus
                } else {
                    (1.0 - q) * l.prob_minus
                }
            })
            .sum();
        assert!((total - eval.success_probability).abs() <= 1e-12);
        let mass_plus: f64 = leaves.iter().map(|l| l.prob_plus).sum();
        let mass_minus: f64 = leaves.iter().map(|l| l.prob_minus).sum();
        assert!((mass_plus - 1.0).abs() <= 1e-10);
        assert!((mass_minus - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn mlg_dominates_lg() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..500 {
            let n = rng.gen_range(1..=6);
            let q: f64 = rng.gen_range(0.05..0.95);
            let pairs: Vec<CandidatePair> = (0..n)
                .map(|_| CandidatePair {
                    plus: depolarize(
                        &pure_qubit(rng.gen_range(0.0..std::f64::consts::TAU)),
                        rng.gen_range(0.0..1.0),
                        2,
                    )
                    .unwrap(),
                    minus: depolarize(
                        &pure_qubit(rng.gen_range(0.0..std::f64::consts::TAU)),
                        rng.gen_range(0.0..1.0),
                        2,
                    )
                    .unwrap(),
                })
                .collect();
            let prob = DiscriminationProblem::new(pairs, q).unwrap();
            let order = natural_order(n);
            let lg = run_lg(&prob, &order).unwrap().success_probability;
            let mlg = run_mlg(&prob, &order).unwrap().success_probability;
            assert!(mlg >= lg - 1e-12, "lg {lg} mlg {mlg}");
        }
    }

    #[test]
    fn pure_state_order_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let angles: Vec<(f64, f64)> = (0..5)
            .map(|_| (rng.gen_range(0.0..6.0), rng.gen_range(0.0..6.0)))
            .collect();
        let prob = pure_problem(&angles, 0.41);
        let base = run_lg(&prob, &natural_order(5)).unwrap().success_probability;
        for _ in 0..10 {
            let mut order = natural_order(5);
            order.shuffle(&mut rng);
            let s = run_lg(&prob, &order).unwrap().success_probability;
            assert!((s - base).abs() <= 1e-10);
        }
    }

    #[test]
    fn plateau_bound_values() {
        assert!((plateau_bound(0.1) - 0.9972).abs() <= 5e-5);
        assert!((plateau_bound(0.3) - 0.9698).abs() <= 5e-5);
        assert!((plateau_bound(0.4) - 0.9412).abs() <= 5e-5);
        assert!((plateau_bound(0.5) - 0.9000).abs() <= 5e-5);
        assert!((plateau_bound(1.0) - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn lg_respects_plateau_on_identical_copies() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for gamma in [0.1, 0.3, 0.5] {
            for _ in 0..20 {
                let tp = rng.gen_range(0.0..std::f64::consts::TAU);
                let tm = rng.gen_range(0.0..std::f64::consts::TAU);
                let angles: Vec<(f64, f64)> = vec![(tp, tm); 8];
                let prob = depolarized_problem(&angles, gamma, 0.5);
                let s = run_lg(&prob, &natural_order(8)).unwrap().success_probability;
                assert!(s <= 0.5f64.max(plateau_bound(gamma)) + 1e-10);
            }
        }
    }

    #[test]
    fn lg_trapping_at_extreme_belief() {
        // Once belief passes 1 − γ/2 on identical-γ copies, the LG Helstrom is
        // trivial and every subsequent belief on every path stays put.
        let gamma = 0.4;
        let pair = CandidatePair {
            plus: depolarize(&pure_qubit(0.9), gamma, 2).unwrap(),
            minus: depolarize(&pure_qubit(-0.7), gamma, 2).unwrap(),
        };
        let p0 = 1.0 - gamma / 2.0 + 0.02;
        let m = helstrom(p0, &pair.plus, &pair.minus).unwrap();
        assert!(crate::measurements::is_trivial(&m));
        for d in 0..2 {
            let lp = outcome_prob(&m, &pair.plus, d).unwrap();
            let lm = outcome_prob(&m, &pair.minus, d).unwrap();
            if lp * p0 + lm * (1.0 - p0) < LIKELIHOOD_FLOOR {
                continue;
            }
            let p1 = posterior_from_probs(p0, lp, lm).unwrap();
            assert!((p1 - p0).abs() <= 1e-12);
        }
    }

    #[test]
    fn per_round_error_shrinks_for_pure_states() {
        let prob = pure_problem(&[(0.6, -0.6), (0.6, -0.6), (0.6, -0.6)], 0.5);
        let eval = run_lg(&prob, &natural_order(3)).unwrap();
        assert_eq!(eval.per_round_error.len(), 3);
        for w in eval.per_round_error.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }
}
