//! Command-line front end: solve single problems, reproduce figures, build and
//! query planner policies, and report analytic bounds.

use clap::{Args, Parser, Subcommand};
use discrim::bounds::{
    corollary1_bound, joint_helstrom_success_problem, overlap_angle, theorem1,
};
use discrim::dp::{
    build_risk_tables, evaluate, load_tables, modified_helstrom_space, next_action, save_tables,
    PlannerMode,
};
use discrim::error::Error;
use discrim::experiments::{emit_csv, run_experiment, ExperimentConfig, FigureId};
use discrim::greedy::{evaluate_greedy, natural_order, plateau_bound, GreedyVariant};
use discrim::measurements::{qubit_action_space, qutrit_action_spaces, ActionSpace};
use discrim::problem::{DiscriminationProblem, ProblemFile};
use discrim::quantum::eig_sym;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "discrim", version, about = "Adaptive discrimination of tensor-product quantum states")]
struct Cli {
    /// Cap worker parallelism (default: available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a strategy's exact success probability on a problem file.
    Discriminate(DiscriminateArgs),
    /// Reproduce a figure's data as CSV.
    Figure(FigureArgs),
    /// Build, evaluate, or inspect planner policy files.
    Policy {
        #[command(subcommand)]
        action: PolicyCommand,
    },
    /// Report analytic bounds and oracle values for a problem file.
    Bounds(BoundsArgs),
}

#[derive(Args)]
struct DiscriminateArgs {
    problem: PathBuf,
    /// lg | mlg | order-mlg | moody
    #[arg(long, default_value = "lg")]
    strategy: String,
    #[arg(long, default_value_t = 1001)]
    q_p: usize,
    #[arg(long, default_value_t = 128)]
    q_phi: usize,
    /// Icosphere subdivision factors for qutrit action spaces.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    qutrit_r: Vec<usize>,
    /// Equatorial resolution for qutrit action spaces.
    #[arg(long, default_value_t = 4)]
    qutrit_q: usize,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct FigureArgs {
    /// fig1 | fig2 | fig3 | fig4 | fig5 | fig6 | appb | appb_comparison
    figure: String,
    #[arg(long, default_value = "figure.csv")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n_trial: Option<usize>,
    /// Use the full-fidelity experiment settings (slow for fig5/fig6).
    #[arg(long)]
    paper_scale: bool,
}

#[derive(Subcommand)]
enum PolicyCommand {
    /// Build risk/policy tables for a problem and write them to a file.
    Build {
        problem: PathBuf,
        #[arg(long, default_value = "policy.json")]
        out: PathBuf,
        /// fixed-order | order-mlg | moody-best | moody-worst
        #[arg(long, default_value = "moody-best")]
        mode: String,
        #[arg(long, default_value_t = 1001)]
        q_p: usize,
        #[arg(long, default_value_t = 128)]
        q_phi: usize,
        #[arg(long, value_delimiter = ',', default_value = "2")]
        qutrit_r: Vec<usize>,
        #[arg(long, default_value_t = 4)]
        qutrit_q: usize,
        /// Use the binary qutrit action space instead of the ternary one.
        #[arg(long)]
        binary: bool,
    },
    /// Print 1 − R_[N](q) from a stored policy.
    Eval {
        policy: PathBuf,
        problem: PathBuf,
        #[arg(long)]
        q: Option<f64>,
    },
    /// Dump the first-action map over the belief grid.
    Inspect { policy: PathBuf, problem: PathBuf },
}

#[derive(Args)]
struct BoundsArgs {
    problem: PathBuf,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    json: bool,
}

fn parse_mode(s: &str) -> Result<PlannerMode, Error> {
    Ok(match s {
        "fixed-order" => PlannerMode::FixedOrder,
        "order-mlg" => PlannerMode::OrderOptMlg,
        "order-lg" => PlannerMode::OrderOptLg,
        "moody-best" => PlannerMode::MoodyBest,
        "moody-worst" => PlannerMode::MoodyWorst,
        other => return Err(Error::Parameter(format!("unknown mode '{other}'"))),
    })
}

fn action_space_for(
    problem: &DiscriminationProblem,
    q_phi: usize,
    qutrit_r: &[usize],
    qutrit_q: usize,
    binary: bool,
) -> Result<ActionSpace, Error> {
    match problem.dim() {
        2 => qubit_action_space(q_phi),
        3 => {
            let (t, b) = qutrit_action_spaces(qutrit_r, qutrit_q)?;
            Ok(if binary { b } else { t })
        }
        d => Err(Error::Parameter(format!("no action space for dimension {d}"))),
    }
}

/// True when every candidate state in the problem is (numerically) pure.
fn all_pure(problem: &DiscriminationProblem) -> bool {
    problem.pairs().iter().all(|p| {
        let purity = |m: &discrim::quantum::DensityMatrix| m.mat().trace_product(m.mat());
        purity(&p.plus) > 1.0 - 1e-9 && purity(&p.minus) > 1.0 - 1e-9
    })
}

/// Depolarizing parameter if the state looks like a depolarized pure state
/// (eigenvalues {1 − γ(d−1)/d, γ/d, ...}); None otherwise.
fn inferred_gamma(m: &discrim::quantum::DensityMatrix) -> Option<f64> {
    let eig = eig_sym(m.mat()).ok()?;
    let d = m.dim() as f64;
    let min = *eig.eigenvalues.last()?;
    let gamma = (min * d).clamp(0.0, 1.0);
    let top = 1.0 - gamma + gamma / d;
    let ok = (eig.eigenvalues[0] - top).abs() <= 1e-9
        && eig.eigenvalues[1..]
            .iter()
            .all(|&l| (l - gamma / d).abs() <= 1e-9);
    ok.then_some(gamma)
}

fn cmd_discriminate(args: &DiscriminateArgs) -> Result<(), Error> {
    let problem = ProblemFile::load(&args.problem)?;
    let n = problem.n();
    let mut first_action: Option<usize> = None;
    let (label, success, per_round) = match args.strategy.as_str() {
        "lg" | "mlg" => {
            let variant = if args.strategy == "lg" {
                GreedyVariant::Lg
            } else {
                GreedyVariant::Mlg
            };
            let eval = evaluate_greedy(&problem, &natural_order(n), variant, false)?;
            (
                args.strategy.clone(),
                eval.success_probability,
                Some(eval.per_round_error),
            )
        }
        "order-mlg" | "moody" => {
            let (mode, actions) = if args.strategy == "order-mlg" {
                (PlannerMode::OrderOptMlg, modified_helstrom_space())
            } else {
                (
                    PlannerMode::MoodyBest,
                    action_space_for(&problem, args.q_phi, &args.qutrit_r, args.qutrit_q, false)?,
                )
            };
            if n > 7 {
                eprintln!("warning: planner with N = {n} subsystems may be slow");
            }
            let tables = build_risk_tables(&problem, &actions, mode, args.q_p)?;
            let (k, _) = next_action(&tables, &problem, tables.full_mask(), problem.prior())?;
            first_action = Some(k + 1);
            (
                args.strategy.clone(),
                evaluate(&tables, problem.prior()),
                None,
            )
        }
        other => return Err(Error::Parameter(format!("unknown strategy '{other}'"))),
    };

    if args.json {
        let mut obj = serde_json::json!({
            "strategy": label,
            "n": n,
            "prior_q": problem.prior(),
            "success_probability": success,
        });
        if let Some(pr) = &per_round {
            obj["per_round_error"] = serde_json::json!(pr);
        }
        if let Some(k) = first_action {
            obj["first_subsystem"] = serde_json::json!(k);
        }
        println!("{obj}");
    } else {
        println!("strategy: {label}");
        println!("subsystems: {n} (dim {})", problem.dim());
        println!("prior q: {}", problem.prior());
        println!("success probability: {success:.12}");
        if let Some(pr) = per_round {
            for (j, e) in pr.iter().enumerate() {
                println!("round {} error (most-likely path): {e:.12}", j + 1);
            }
        }
        if let Some(k) = first_action {
            println!("first measured subsystem: {k}");
        }
    }
    Ok(())
}

fn cmd_figure(args: &FigureArgs) -> Result<(), Error> {
    let id = FigureId::parse(&args.figure)?;
    let mut cfg = ExperimentConfig::for_figure(id, args.paper_scale);
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(n) = args.n_trial {
        cfg.n_trial = n;
    }
    let records = run_experiment(&cfg)?;
    emit_csv(&records, Some(&cfg), &args.out)?;
    println!(
        "wrote {} rows for {} (seed {}, n_trial {}) to {}",
        records.len(),
        id.name(),
        cfg.seed,
        cfg.n_trial,
        args.out.display()
    );
    Ok(())
}

fn cmd_policy(action: &PolicyCommand) -> Result<(), Error> {
    match action {
        PolicyCommand::Build {
            problem,
            out,
            mode,
            q_p,
            q_phi,
            qutrit_r,
            qutrit_q,
            binary,
        } => {
            let problem = ProblemFile::load(problem)?;
            let mode = parse_mode(mode)?;
            let actions = match mode {
                PlannerMode::MoodyBest | PlannerMode::MoodyWorst => {
                    action_space_for(&problem, *q_phi, qutrit_r, *qutrit_q, *binary)?
                }
                _ => modified_helstrom_space(),
            };
            if problem.n() > 7 {
                eprintln!("warning: planner with N = {} subsystems may be slow", problem.n());
            }
            let tables = build_risk_tables(&problem, &actions, mode, *q_p)?;
            save_tables(&tables, out)?;
            println!(
                "wrote policy ({:?}, N={}, Q_p={}, fast_path={}) to {}",
                tables.mode,
                tables.n,
                tables.q_p,
                tables.fast_path,
                out.display()
            );
            Ok(())
        }
        PolicyCommand::Eval { policy, problem, q } => {
            let problem = ProblemFile::load(problem)?;
            let tables = load_tables(policy, &problem)?;
            let q = q.unwrap_or(problem.prior());
            println!("{:.15}", evaluate(&tables, q));
            Ok(())
        }
        PolicyCommand::Inspect { policy, problem } => {
            let problem = ProblemFile::load(problem)?;
            let tables = load_tables(policy, &problem)?;
            let full = tables.full_mask();
            println!("p,subsystem");
            for i in 0..tables.q_p {
                let p = tables.grid_point(i);
                let (k, _) = next_action(&tables, &problem, full, p)?;
                println!("{p},{}", k + 1);
            }
            Ok(())
        }
    }
}

fn cmd_bounds(args: &BoundsArgs) -> Result<(), Error> {
    let problem = ProblemFile::load(&args.problem)?;
    let q = args.q.unwrap_or(problem.prior());
    let mut rows: Vec<(String, Option<f64>, String)> = Vec::new();

    match joint_helstrom_success_problem(&problem) {
        Ok(v) => rows.push(("joint_helstrom".into(), Some(v), "exact oracle".into())),
        Err(Error::Resource(msg)) => rows.push(("joint_helstrom".into(), None, format!("omitted: {msg}"))),
        Err(e) => return Err(e),
    }

    if all_pure(&problem) {
        let thetas: Result<Vec<f64>, Error> = problem
            .pairs()
            .iter()
            .map(|p| overlap_angle(&p.plus, &p.minus))
            .collect();
        rows.push((
            "theorem1".into(),
            Some(theorem1(q, &thetas?)),
            "pure-product closed form".into(),
        ));
    } else {
        rows.push(("theorem1".into(), None, "inapplicable: mixed states present".into()));
    }

    let gammas: Vec<Option<f64>> = problem
        .pairs()
        .iter()
        .flat_map(|p| [inferred_gamma(&p.plus), inferred_gamma(&p.minus)])
        .collect();
    if gammas.iter().all(|g| g.is_some()) {
        let gp = gammas
            .iter()
            .step_by(2)
            .map(|g| g.unwrap())
            .fold(1.0f64, f64::min);
        let gm = gammas
            .iter()
            .skip(1)
            .step_by(2)
            .map(|g| g.unwrap())
            .fold(1.0f64, f64::min);
        rows.push((
            "corollary1".into(),
            Some(corollary1_bound(q, gp, gm)),
            format!("depolarized-pure detection: gamma_plus={gp:.6}, gamma_minus={gm:.6}"),
        ));
        let g_all: Vec<f64> = gammas.iter().map(|g| g.unwrap()).collect();
        let g0 = g_all[0];
        if g_all.iter().all(|&g| (g - g0).abs() <= 1e-9) && problem.dim() == 2 {
            rows.push((
                "plateau".into(),
                Some(plateau_bound(g0)),
                format!("identical depolarizing parameter gamma={g0:.6}"),
            ));
        } else {
            rows.push(("plateau".into(), None, "inapplicable: needs one shared qubit gamma".into()));
        }
    } else {
        rows.push((
            "corollary1".into(),
            None,
            "inapplicable: states are not depolarized pure states".into(),
        ));
        rows.push(("plateau".into(), None, "inapplicable: states are not depolarized pure states".into()));
    }

    if args.json {
        let items: Vec<serde_json::Value> = rows
            .iter()
            .map(|(kind, value, note)| {
                serde_json::json!({"kind": kind, "value": value, "note": note})
            })
            .collect();
        println!("{}", serde_json::json!({"q": q, "bounds": items}));
    } else {
        println!("q = {q}");
        for (kind, value, note) in rows {
            match value {
                Some(v) => println!("{kind:>16}: {v:.12}  ({note})"),
                None => println!("{kind:>16}: -  ({note})"),
            }
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Error> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Discriminate(args) => cmd_discriminate(args),
        Command::Figure(args) => cmd_figure(args),
        Command::Policy { action } => cmd_policy(action),
        Command::Bounds(args) => cmd_bounds(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Resource(_) => 3,
                Error::StalePolicy(_) => 4,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}
