//! Dynamic programming over belief × unmeasured-subsystem subsets: the
//! order-optimized MLG, the MOODY best/worst-ordering planners, an
//! identical-copies fast path, and policy persistence.

use crate::belief::{posterior_from_probs, LIKELIHOOD_FLOOR};
use crate::error::{Error, Result};
use crate::measurements::{
    helstrom, modified_helstrom, outcome_prob, qubit_action_space, qutrit_action_spaces,
    ActionSpace, ActionSpaceKind, ProjectiveMeasurement,
};
use crate::problem::DiscriminationProblem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const MAX_PLANNER_N: usize = 12;
const POLICY_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlannerMode {
    /// Natural-order MLG evaluated on the belief grid (no optimization).
    FixedOrder,
    /// Minimize over the next subsystem; action fixed to Π*(p, k).
    OrderOptMlg,
    /// Minimize over the next subsystem; action fixed to the plain Helstrom
    /// measurement Π(p, k), which may be trivial (no belief update).
    OrderOptLg,
    /// Minimize over subsystem and quantized action (MOODY).
    MoodyBest,
    /// Adversarial ordering: max over subsystem of min over action.
    MoodyWorst,
}

impl PlannerMode {
    fn uses_action_space(self) -> bool {
        matches!(self, PlannerMode::MoodyBest | PlannerMode::MoodyWorst)
    }
}

/// An empty action space for the MLG-based planner modes.
pub fn modified_helstrom_space() -> ActionSpace {
    ActionSpace {
        actions: Vec::new(),
        kind: ActionSpaceKind::ModifiedHelstromOnly,
    }
}

/// Risk and policy tables over the belief grid. In the general path rows are
/// indexed by the subset bitmask of unmeasured subsystems; in the
/// identical-copies fast path rows are indexed by subset size, giving the
/// O(N·Q_p) memory footprint.
#[derive(Clone, Debug)]
pub struct RiskTables {
    pub mode: PlannerMode,
    pub q_p: usize,
    pub n: usize,
    pub fast_path: bool,
    pub problem_hash: String,
    pub action_kind: ActionSpaceKind,
    actions: Vec<ProjectiveMeasurement>,
    risk: Vec<Vec<f64>>,
    policy: Vec<Vec<(u8, u32)>>,
}

#[inline]
fn interp(v: &[f64], x: f64, scale: f64) -> f64 {
    let t = x.clamp(0.0, 1.0) * scale;
    let i = (t as usize).min(v.len() - 2);
    let f = t - i as f64;
    v[i] * (1.0 - f) + v[i + 1] * f
}

/// Tr(Π_d ρ₊) and Tr(Π_d ρ₋) per outcome for one measurement on subsystem k.
fn traces_for(
    m: &ProjectiveMeasurement,
    pair: &crate::problem::CandidatePair,
) -> Result<Vec<(f64, f64)>> {
    (0..m.num_outcomes())
        .map(|d| Ok((outcome_prob(m, &pair.plus, d)?, outcome_prob(m, &pair.minus, d)?)))
        .collect()
}

/// Expected child risk Σ_d ℒ·R_child(𝒫) at belief p for one action's traces.
#[inline]
fn expected_child_risk(traces: &[(f64, f64)], p: f64, child: &[f64], scale: f64) -> f64 {
    let mut acc = 0.0;
    for &(tp, tm) in traces {
        let l = tp * p + tm * (1.0 - p);
        if l < LIKELIHOOD_FLOOR {
            continue;
        }
        let post = (tp * p / l).clamp(0.0, 1.0);
        acc += l * interp(child, post, scale);
    }
    acc
}

/// Per-grid-point min over the action space for one subsystem; argmin keeps
/// the lowest action index on ties (strict improvement comparison).
fn min_over_actions(
    action_traces: &[Vec<(f64, f64)>],
    grid: &[f64],
    child: &[f64],
    scale: f64,
) -> (Vec<f64>, Vec<u32>) {
    let qp = grid.len();
    let mut best = vec![f64::INFINITY; qp];
    let mut arg = vec![0u32; qp];
    for (ai, tr) in action_traces.iter().enumerate() {
        for i in 0..qp {
            let r = expected_child_risk(tr, grid[i], child, scale);
            if r < best[i] {
                best[i] = r;
                arg[i] = ai as u32;
            }
        }
    }
    (best, arg)
}

/// Risk vector when the action is pinned to Π*(p, k) per grid point.
fn mlg_risk_vec(mlg_traces_k: &[Vec<(f64, f64)>], grid: &[f64], child: &[f64], scale: f64) -> Vec<f64> {
    grid.iter()
        .enumerate()
        .map(|(i, &p)| expected_child_risk(&mlg_traces_k[i], p, child, scale))
        .collect()
}

pub fn build_risk_tables(
    problem: &DiscriminationProblem,
    actions: &ActionSpace,
    mode: PlannerMode,
    q_p: usize,
) -> Result<RiskTables> {
    build_risk_tables_opts(problem, actions, mode, q_p, true)
}

/// As [`build_risk_tables`], with the identical-copies fast path controllable
/// (the general path on identical copies is used to validate the fast path).
pub fn build_risk_tables_opts(
    problem: &DiscriminationProblem,
    actions: &ActionSpace,
    mode: PlannerMode,
    q_p: usize,
    allow_fast: bool,
) -> Result<RiskTables> {
    if q_p < 3 {
        return Err(Error::Parameter(format!("Q_p {q_p} < 3")));
    }
    let n = problem.n();
    if n > MAX_PLANNER_N {
        return Err(Error::Resource(format!(
            "planner supports N ≤ {MAX_PLANNER_N}, got {n}"
        )));
    }
    if mode.uses_action_space() && actions.is_empty() {
        return Err(Error::Parameter("MOODY modes need a non-empty action space".into()));
    }
    let fast = allow_fast && problem.is_identical_copies() && mode != PlannerMode::FixedOrder;
    let scale = (q_p - 1) as f64;
    let grid: Vec<f64> = (0..q_p).map(|i| i as f64 / scale).collect();
    let base: Vec<f64> = grid.iter().map(|&p| p.min(1.0 - p)).collect();

    // Outcome traces are belief-independent for fixed actions; for the
    // MLG-based modes the action itself depends on (k, grid point), so traces
    // are precomputed per grid point instead.
    let ks = if fast { 1 } else { n };
    let mut action_traces: Vec<Vec<Vec<(f64, f64)>>> = Vec::new();
    let mut mlg_traces: Vec<Vec<Vec<(f64, f64)>>> = Vec::new();
    if mode.uses_action_space() {
        for k in 0..ks {
            let pair = problem.pair(k);
            action_traces.push(
                actions
                    .actions
                    .iter()
                    .map(|m| traces_for(m, pair))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
    } else {
        for k in 0..ks {
            let pair = problem.pair(k);
            mlg_traces.push(
                grid.iter()
                    .map(|&p| {
                        let m = if mode == PlannerMode::OrderOptLg {
                            helstrom(p, &pair.plus, &pair.minus)?
                        } else {
                            modified_helstrom(p, &pair.plus, &pair.minus)?
                        };
                        traces_for(&m, pair)
                    })
                    .collect::<Result<Vec<_>>>()?,
            );
        }
    }

    let per_k = |k: usize, child: &[f64]| -> (Vec<f64>, Vec<u32>) {
        if mode.uses_action_space() {
            min_over_actions(&action_traces[k], &grid, child, scale)
        } else {
            (mlg_risk_vec(&mlg_traces[k], &grid, child, scale), vec![0u32; q_p])
        }
    };

    let mut risk: Vec<Vec<f64>>;
    let mut policy: Vec<Vec<(u8, u32)>>;

    if fast {
        risk = Vec::with_capacity(n + 1);
        policy = Vec::with_capacity(n + 1);
        risk.push(base);
        policy.push(Vec::new());
        for level in 1..=n {
            let (r, a) = per_k(0, &risk[level - 1]);
            risk.push(r);
            policy.push(a.into_iter().map(|ai| (0u8, ai)).collect());
        }
    } else {
        let full = 1usize << n;
        risk = vec![Vec::new(); full];
        policy = vec![Vec::new(); full];
        risk[0] = base;
        for mask in 1..full {
            let mut best_r: Option<Vec<f64>> = None;
            let mut best_pol: Vec<(u8, u32)> = Vec::new();
            let forced_k = if mode == PlannerMode::FixedOrder {
                Some(mask.trailing_zeros() as usize)
            } else {
                None
            };
            for k in 0..n {
                if mask & (1 << k) == 0 {
                    continue;
                }
                if let Some(fk) = forced_k {
                    if k != fk {
                        continue;
                    }
                }
                let child = mask & !(1 << k);
                let (r, a) = per_k(k, &risk[child]);
                match &mut best_r {
                    None => {
                        best_pol = a.iter().map(|&ai| (k as u8, ai)).collect();
                        best_r = Some(r);
                    }
                    Some(cur) => {
                        for i in 0..q_p {
                            let better = if mode == PlannerMode::MoodyWorst {
                                r[i] > cur[i]
                            } else {
                                r[i] < cur[i]
                            };
                            if better {
                                cur[i] = r[i];
                                best_pol[i] = (k as u8, a[i]);
                            }
                        }
                    }
                }
            }
            risk[mask] = best_r.expect("non-empty mask");
            policy[mask] = best_pol;
        }
    }

    Ok(RiskTables {
        mode,
        q_p,
        n,
        fast_path: fast,
        problem_hash: problem.content_hash(),
        action_kind: actions.kind.clone(),
        actions: actions.actions.clone(),
        risk,
        policy,
    })
}

impl RiskTables {
    fn scale(&self) -> f64 {
        (self.q_p - 1) as f64
    }

    fn row(&self, mask: usize) -> &[f64] {
        if self.fast_path {
            &self.risk[mask.count_ones() as usize]
        } else {
            &self.risk[mask]
        }
    }

    pub fn full_mask(&self) -> usize {
        (1 << self.n) - 1
    }

    /// Risk at an arbitrary belief by linear interpolation.
    pub fn risk_at(&self, mask: usize, p: f64) -> f64 {
        interp(self.row(mask), p, self.scale())
    }

    /// Grid index whose stored policy governs belief p (lower point on ties).
    fn policy_index(&self, p: f64) -> usize {
        let t = p.clamp(0.0, 1.0) * self.scale();
        let lo = (t as usize).min(self.q_p - 1);
        let frac = t - lo as f64;
        if frac > 0.5 {
            lo + 1
        } else {
            lo
        }
    }

    pub fn grid_point(&self, i: usize) -> f64 {
        i as f64 / self.scale()
    }
}

/// 1 − R_{[N]}(q), the planner's exact success probability from prior q.
pub fn evaluate(tables: &RiskTables, q: f64) -> f64 {
    1.0 - tables.risk_at(tables.full_mask(), q)
}

/// The stored argmin (subsystem, measurement) for subset `s_mask` at belief p.
pub fn next_action(
    tables: &RiskTables,
    problem: &DiscriminationProblem,
    s_mask: usize,
    p: f64,
) -> Result<(usize, ProjectiveMeasurement)> {
    if s_mask == 0 {
        return Err(Error::Parameter("next_action on empty subset".into()));
    }
    if problem.content_hash() != tables.problem_hash {
        return Err(Error::StalePolicy("tables built for a different problem".into()));
    }
    let gi = tables.policy_index(p);
    let (k, ai) = if tables.fast_path {
        let (stored_k, ai) = tables.policy[s_mask.count_ones() as usize][gi];
        debug_assert_eq!(stored_k, 0);
        (s_mask.trailing_zeros() as usize, ai)
    } else {
        let (k, ai) = tables.policy[s_mask][gi];
        (k as usize, ai)
    };
    let m = if tables.mode.uses_action_space() {
        tables.actions[ai as usize].clone()
    } else {
        let pair = problem.pair(k);
        if tables.mode == PlannerMode::OrderOptLg {
            helstrom(tables.grid_point(gi), &pair.plus, &pair.minus)?
        } else {
            modified_helstrom(tables.grid_point(gi), &pair.plus, &pair.minus)?
        }
    };
    Ok((k, m))
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    /// (subsystem, outcome) per round, in measurement order.
    pub steps: Vec<(usize, usize)>,
    /// Belief after each round (beliefs[0] is the prior).
    pub beliefs: Vec<f64>,
    /// +1 decodes ρ₊, −1 decodes ρ₋.
    pub decode: i32,
    pub correct: bool,
}

/// Sample one adaptive episode under the given true hypothesis (+1 / −1).
pub fn simulate_episode(
    tables: &RiskTables,
    problem: &DiscriminationProblem,
    true_plus: bool,
    rng_seed: u64,
) -> Result<Trajectory> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut mask = tables.full_mask();
    let mut p = problem.prior();
    let mut steps = Vec::with_capacity(problem.n());
    let mut beliefs = vec![p];
    while mask != 0 {
        let (k, m) = next_action(tables, problem, mask, p)?;
        let pair = problem.pair(k);
        let truth = if true_plus { &pair.plus } else { &pair.minus };
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut outcome = m.num_outcomes() - 1;
        for d in 0..m.num_outcomes() {
            acc += outcome_prob(&m, truth, d)?;
            if u < acc {
                outcome = d;
                break;
            }
        }
        let lp = outcome_prob(&m, &pair.plus, outcome)?;
        let lm = outcome_prob(&m, &pair.minus, outcome)?;
        p = posterior_from_probs(p, lp, lm)?;
        steps.push((k, outcome));
        beliefs.push(p);
        mask &= !(1 << k);
    }
    let decode = if p > 0.5 {
        1
    } else if p < 0.5 {
        -1
    } else if rng.gen_bool(0.5) {
        1
    } else {
        -1
    };
    Ok(Trajectory {
        steps,
        beliefs,
        decode,
        correct: (decode == 1) == true_plus,
    })
}

#[derive(Serialize, Deserialize)]
struct PolicyFile {
    format_version: u32,
    problem_hash: String,
    n: usize,
    q_p: usize,
    mode: PlannerMode,
    action_space: ActionSpaceKind,
    fast_path: bool,
    risk: Vec<Vec<f64>>,
    /// Parallel to `risk`; flattened (k, action) pairs per subset row.
    policy_k: Vec<Vec<u8>>,
    policy_a: Vec<Vec<u32>>,
}

pub fn save_tables(tables: &RiskTables, path: &std::path::Path) -> Result<()> {
    let file = PolicyFile {
        format_version: POLICY_FORMAT_VERSION,
        problem_hash: tables.problem_hash.clone(),
        n: tables.n,
        q_p: tables.q_p,
        mode: tables.mode,
        action_space: tables.action_kind.clone(),
        fast_path: tables.fast_path,
        risk: tables.risk.clone(),
        policy_k: tables
            .policy
            .iter()
            .map(|row| row.iter().map(|&(k, _)| k).collect())
            .collect(),
        policy_a: tables
            .policy
            .iter()
            .map(|row| row.iter().map(|&(_, a)| a).collect())
            .collect(),
    };
    let text = serde_json::to_string(&file).map_err(|e| Error::Format(e.to_string()))?;
    std::fs::write(path, text)?;
    Ok(())
}

fn rebuild_actions(kind: &ActionSpaceKind) -> Result<Vec<ProjectiveMeasurement>> {
    Ok(match kind {
        ActionSpaceKind::ModifiedHelstromOnly => Vec::new(),
        ActionSpaceKind::QubitGrid { q_phi } => qubit_action_space(*q_phi)?.actions,
        ActionSpaceKind::QutritTernary { r_vec, q } => qutrit_action_spaces(r_vec, *q)?.0.actions,
        ActionSpaceKind::QutritBinary { r_vec, q } => qutrit_action_spaces(r_vec, *q)?.1.actions,
    })
}

/// Load tables and verify they were built for `problem`.
pub fn load_tables(path: &std::path::Path, problem: &DiscriminationProblem) -> Result<RiskTables> {
    let text = std::fs::read_to_string(path)?;
    let file: PolicyFile =
        serde_json::from_str(&text).map_err(|e| Error::Format(format!("policy file: {e}")))?;
    if file.format_version != POLICY_FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported policy format version {}",
            file.format_version
        )));
    }
    if file.problem_hash != problem.content_hash() {
        return Err(Error::StalePolicy(
            "policy file was built for a different problem".into(),
        ));
    }
    if file.policy_k.len() != file.risk.len() || file.policy_a.len() != file.risk.len() {
        return Err(Error::Format("policy/risk row count mismatch".into()));
    }
    let actions = rebuild_actions(&file.action_space)?;
    let policy = file
        .policy_k
        .iter()
        .zip(&file.policy_a)
        .map(|(ks, asx)| ks.iter().copied().zip(asx.iter().copied()).collect())
        .collect();
    Ok(RiskTables {
        mode: file.mode,
        q_p: file.q_p,
        n: file.n,
        fast_path: file.fast_path,
        problem_hash: file.problem_hash,
        action_kind: file.action_space,
        actions,
        risk: file.risk,
        policy,
    })
}
