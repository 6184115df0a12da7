use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use campaign_core::analysis::{certify_epsilon_mpe, default_horizon, evaluate_policy, monte_carlo, simulate, StatePolicy};
use campaign_core::solution::{load_solution, save_solution};
use campaign_core::solver::{solve, Algorithm};
use campaign_core::transitions::{validate_assumptions, ValidationMode};
use campaign_core::{report, CampaignState, Player, Scenario, Solution, SolveError, SolveOptions, StateSpace};
use campaign_service::{AppState, Engine};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "campaign", version, about = "Solve military campaigns as zero-sum stochastic games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Subcommand)]
enum Command {
    /// Check structure, the initial state and the probability-model assumptions.
    Validate {
        scenario: String,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: Mode,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run value iteration and write the solution file.
    Solve {
        scenario: String,
        #[arg(long, default_value_t = 0.001)]
        epsilon: f64,
        #[arg(long, default_value = "avi")]
        algo: Algorithm,
        #[arg(long)]
        out: PathBuf,
        /// Override the iteration cap (bound plus margin by default).
        #[arg(long)]
        max_iterations: Option<usize>,
        #[arg(long)]
        audit_isotonicity: bool,
    },
    /// Measure best-response gains of a solved profile over the full action space.
    Certify {
        scenario: String,
        solution: PathBuf,
        #[arg(long, default_value_t = 0.001)]
        epsilon: f64,
    },
    /// Print values, mixed strategies and solve statistics.
    Report {
        scenario: String,
        solution: PathBuf,
        /// Control vectors such as 221211; defaults to the initial state.
        #[arg(long = "state")]
        states: Vec<String>,
    },
    /// Play the equilibrium profile forward by Monte Carlo.
    Simulate {
        scenario: String,
        solution: PathBuf,
        #[arg(long)]
        state: Option<String>,
        #[arg(long, default_value_t = 1_000)]
        episodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Start the session HTTP API; solves with AVI first when no solution is given.
    Serve {
        scenario: String,
        solution: Option<PathBuf>,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        #[arg(long, default_value_t = 0.001)]
        epsilon: f64,
        /// Append session events as JSON lines to this file.
        #[arg(long)]
        log: Option<PathBuf>,
    },
}

/// Message plus process exit code.
struct Failure {
    code: u8,
    message: String,
}

const VALIDATION: u8 = 1;
const NON_CONVERGENCE: u8 = 2;
const CERTIFICATION: u8 = 3;

fn fail(code: u8, message: impl ToString) -> Failure {
    Failure { code, message: message.to_string() }
}

type CmdResult = Result<(), Failure>;

/// A file path, or the name of a bundled scenario.
fn load_scenario(arg: &str) -> Result<Scenario, Failure> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Some(bundled) = Scenario::bundled(arg) {
            return bundled.map_err(|e| fail(VALIDATION, format!("bundled scenario {arg}: {e}")));
        }
    }
    Scenario::load(path).map_err(|e| fail(VALIDATION, format!("{arg}: {e}")))
}

fn space_of(scenario: &Scenario) -> Result<StateSpace, Failure> {
    StateSpace::new(scenario.campaign().clone()).map_err(|e| fail(VALIDATION, e))
}

fn load(scenario_arg: &str, solution: &Path) -> Result<(Scenario, StateSpace, Solution), Failure> {
    let scenario = load_scenario(scenario_arg)?;
    let space = space_of(&scenario)?;
    let solution = load_solution(solution, &scenario, &space).map_err(|e| fail(VALIDATION, format!("{}: {e}", solution.display())))?;
    Ok((scenario, space, solution))
}

fn parse_state(space: &StateSpace, text: &str) -> Result<CampaignState, Failure> {
    let state: CampaignState = text.parse().map_err(|e| fail(VALIDATION, format!("state {text:?}: {e}")))?;
    space.index_of(&state).map_err(|e| fail(VALIDATION, format!("state {text}: {e}")))?;
    Ok(state)
}

fn solve_failure(e: SolveError) -> Failure {
    match e {
        SolveError::NonConvergence { .. } => fail(NON_CONVERGENCE, e),
        other => fail(VALIDATION, other),
    }
}

fn validate(scenario: &str, mode: Mode, samples: usize, seed: u64) -> CmdResult {
    let scenario = load_scenario(scenario)?;
    let c = scenario.campaign();
    println!("scenario      {}", scenario.name().unwrap_or("(unnamed)"));
    println!("digest        {}", scenario.digest());
    println!("objectives    {}, axes {}, commanders {}", c.objective_count(), c.axes().len(), c.commanders().len());
    println!("initial state {} (achievable)", scenario.initial_state());
    let states = c.achievable_state_count().map_err(|e| fail(VALIDATION, e))?;
    println!("states        {states}");
    let mode = match mode {
        Mode::Exhaustive => ValidationMode::Exhaustive,
        Mode::Sampled => ValidationMode::Sampled { samples, seed },
    };
    let report = validate_assumptions(c, mode).map_err(|e| fail(VALIDATION, e))?;
    println!("checked       {} states", report.states_checked);
    for (n, list) in [(1, &report.assumption1), (2, &report.assumption2)] {
        let errors = list.iter().filter(|v| v.severity == campaign_core::transitions::Severity::Error).count();
        println!("assumption {n}  {} errors, {} warnings", errors, list.len() - errors);
        for v in list.iter().take(5) {
            println!(
                "  {:?} player {} objective {} {}: {} vs {} slack {:.3e}",
                v.severity, v.player, v.objective, v.quantity, v.state, v.other, v.slack
            );
        }
    }
    let s = report.strictness;
    println!(
        "strictness    losses>0 {}, attack>0 {}, reinforce in (0,1) {}",
        s.positive_losses, s.positive_attack, s.interior_reinforce
    );
    if report.passes() {
        println!("valid");
        Ok(())
    } else {
        Err(fail(VALIDATION, "probability model violates the monotonicity or defence-advantage assumption"))
    }
}

fn solve_cmd(scenario_arg: &str, epsilon: f64, algo: Algorithm, out: &Path, max_iterations: Option<usize>, audit: bool) -> CmdResult {
    let scenario = load_scenario(scenario_arg)?;
    let space = space_of(&scenario)?;
    let mut options = SolveOptions::new(epsilon, algo);
    options.max_iterations = max_iterations;
    options.audit_isotonicity = audit;
    let solution = solve(&space, &options).map_err(solve_failure)?;
    save_solution(out, &scenario, &space, &solution).map_err(|e| fail(VALIDATION, format!("{}: {e}", out.display())))?;
    print!("{}", report::statistics_table(&space, &solution).map_err(|e| fail(VALIDATION, e))?);
    if let Some(v) = solution.report.isotonicity_violations {
        println!("{:<28}{v}", "isotonicity violations");
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn certify(scenario_arg: &str, solution: &Path, epsilon: f64) -> CmdResult {
    let (_, space, solution) = load(scenario_arg, solution)?;
    let r = certify_epsilon_mpe(&space, &solution.policy, &solution.values, epsilon);
    println!("epsilon                 {}", r.epsilon_claimed);
    println!("max gain player 1       {:.3e}", r.max_deviation_gain_p1);
    println!("max gain player 2       {:.3e}", r.max_deviation_gain_p2);
    println!("worst state             {}", space.state(r.worst_state));
    println!("profile value gap       {:.3e}", r.profile_value_gap);
    if r.certified {
        println!("certified");
        Ok(())
    } else {
        Err(fail(CERTIFICATION, format!("not an {epsilon}-MPE")))
    }
}

fn report_cmd(scenario_arg: &str, solution: &Path, states: &[String]) -> CmdResult {
    let (scenario, space, solution) = load(scenario_arg, solution)?;
    let states = if states.is_empty() {
        vec![scenario.initial_state().clone()]
    } else {
        states.iter().map(|s| parse_state(&space, s)).collect::<Result<_, _>>()?
    };
    print!("{}", report::render(&space, &solution, &states).map_err(|e| fail(VALIDATION, e))?);
    Ok(())
}

fn simulate_cmd(scenario_arg: &str, solution: &Path, state: Option<&str>, episodes: usize, seed: u64, horizon: Option<usize>) -> CmdResult {
    let (scenario, space, solution) = load(scenario_arg, solution)?;
    let start = match state {
        Some(s) => parse_state(&space, s)?,
        None => scenario.initial_state().clone(),
    };
    let horizon = horizon.unwrap_or_else(|| default_horizon(&space));
    let pi1 = StatePolicy::from_profile(&space, &solution.policy, Player::One);
    let pi2 = StatePolicy::from_profile(&space, &solution.policy, Player::Two);
    let exact = evaluate_policy(&space, &pi1, &pi2).get(space.index_of(&start).map_err(|e| fail(VALIDATION, e))?);
    if episodes <= 1 {
        let t = simulate(&space, &pi1, &pi2, &start, horizon, seed).map_err(|e| fail(VALIDATION, e))?;
        for (k, (s, (a1, a2))) in t.states.iter().zip(&t.actions).enumerate().take(20) {
            println!("{k:>4}  {s}  P1 {a1}  P2 {a2}");
        }
        println!("final state      {}", t.states.last().expect("trajectory has a start"));
        println!("discounted loss  {:.6}", t.discounted_loss);
    } else {
        let est = monte_carlo(&space, &pi1, &pi2, &start, episodes, horizon, seed).map_err(|e| fail(VALIDATION, e))?;
        println!("episodes         {}", est.episodes);
        println!("horizon          {horizon}");
        println!("mean loss        {:.6} ± {:.6}", est.mean, est.std_error);
    }
    println!("profile value    {exact:.6}");
    Ok(())
}

fn serve_cmd(scenario_arg: &str, solution: Option<&Path>, addr: SocketAddr, epsilon: f64, log: Option<&Path>) -> CmdResult {
    let scenario = load_scenario(scenario_arg)?;
    let space = space_of(&scenario)?;
    let solution = match solution {
        Some(p) => load_solution(p, &scenario, &space).map_err(|e| fail(VALIDATION, format!("{}: {e}", p.display())))?,
        None => solve(&space, &SolveOptions::new(epsilon, Algorithm::Avi)).map_err(solve_failure)?,
    };
    let alias = Path::new(scenario_arg).file_stem().map_or_else(|| scenario_arg.to_string(), |s| s.to_string_lossy().into_owned());
    let mut state = AppState::new(Engine::new(scenario, space, solution).with_alias(alias));
    if let Some(path) = log {
        state = state.with_log(path).map_err(|e| fail(VALIDATION, format!("{}: {e}", path.display())))?;
    }
    tracing_subscriber::fmt().with_target(false).init();
    let runtime = tokio::runtime::Runtime::new().map_err(|e| fail(VALIDATION, e))?;
    runtime.block_on(campaign_service::serve(state, addr)).map_err(|e| fail(VALIDATION, e))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { VALIDATION } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Validate { scenario, mode, samples, seed } => validate(scenario, *mode, *samples, *seed),
        Command::Solve { scenario, epsilon, algo, out, max_iterations, audit_isotonicity } => {
            solve_cmd(scenario, *epsilon, *algo, out, *max_iterations, *audit_isotonicity)
        }
        Command::Certify { scenario, solution, epsilon } => certify(scenario, solution, *epsilon),
        Command::Report { scenario, solution, states } => report_cmd(scenario, solution, states),
        Command::Simulate { scenario, solution, state, episodes, seed, horizon } => {
            simulate_cmd(scenario, solution, state.as_deref(), *episodes, *seed, *horizon)
        }
        Command::Serve { scenario, solution, port, host, epsilon, log } => {
            serve_cmd(scenario, solution.as_deref(), SocketAddr::new(*host, *port), *epsilon, log.as_deref())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
