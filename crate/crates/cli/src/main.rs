//! `qsimplex`: run the simulated quantum simplex loop, the classical
//! reference solver, the cost model and the property suites on LP instances.
//!
//! Exit codes: 0 on success (optimal or unbounded), 1 on a failure outcome
//! (subroutine failure, iteration cap, infeasible start, failed suite),
//! 2 on usage or parse errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use qsimplex_core::classical::{self, solve_classical, ClassicalStatus, PivotRule};
use qsimplex_core::cost::{mu, CostInputs, CostReport};
use qsimplex_core::lp::{normalize, parse_json, parse_mps, BasisState, LpInstance, DEFAULT_EPS_PRIME};
use qsimplex_core::qsim::{Mode, QlsaErrorMode, QueryStats};
use qsimplex_core::subroutines::{
    run_quantum_simplex, IterationRecord, OutcomeTag, PrecisionParams, QContext, RunStatus, SimplexOptions,
};
use qsimplex_core::verify::{run_criterion, scaled_ratios, SuiteResult, VerifyConfig};
use qsimplex_core::Error;

/// Version of the summary and report JSON layout.
const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "qsimplex", version, about = "Simulated quantum simplex subroutines with a classical reference")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the simulated quantum simplex loop.
    Solve(SolveArgs),
    /// Run the classical revised simplex method.
    Classical(ClassicalArgs),
    /// Print the cost model for an instance and basis.
    Analyze(AnalyzeArgs),
    /// Run the property suites and print pass/fail per criterion.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Analytic,
    Sampling,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Analytic => Mode::Analytic,
            ModeArg::Sampling => Mode::Sampling,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum QlsaErrorArg {
    Zero,
    Worst,
    Random,
}

impl From<QlsaErrorArg> for QlsaErrorMode {
    fn from(m: QlsaErrorArg) -> Self {
        match m {
            QlsaErrorArg::Zero => QlsaErrorMode::Zero,
            QlsaErrorArg::Worst => QlsaErrorMode::Worst,
            QlsaErrorArg::Random => QlsaErrorMode::Random,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Dantzig,
    Bland,
    Random,
}

#[derive(Args, Clone)]
struct PrecisionArgs {
    /// Optimality tolerance, in (0, 1/2].
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Feasibility tolerance, in (0, 1/2].
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Ratio-test precision multiplier (at least 1).
    #[arg(long, default_value_t = 100.0)]
    t: f64,
    /// Majority-vote repetitions for boosted subroutines (odd).
    #[arg(long, default_value_t = 15)]
    repetitions: usize,
}

impl PrecisionArgs {
    fn params(&self) -> Result<PrecisionParams, CliError> {
        Ok(PrecisionParams::new(self.epsilon, self.delta, self.t, self.repetitions)?)
    }
}

#[derive(Args)]
struct InstanceArgs {
    /// LP instance in JSON, or MPS when the extension is `.mps`.
    #[arg(long)]
    instance: PathBuf,
    /// Starting basis as comma-separated column indices (default: slack basis).
    #[arg(long, value_delimiter = ',')]
    basis: Option<Vec<usize>>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InstanceArgs,
    #[command(flatten)]
    precision: PrecisionArgs,
    #[arg(long, env = "QSIMPLEX_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Analytic)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = QlsaErrorArg::Zero)]
    qlsa_error: QlsaErrorArg,
    /// Iteration cap (default 50(m+n)).
    #[arg(long)]
    max_iters: Option<usize>,
    /// Spectral-norm margin used when scaling the basis.
    #[arg(long, default_value_t = DEFAULT_EPS_PRIME)]
    eps_prime: f64,
    /// Normalization constant for norm estimation (default: κ).
    #[arg(long)]
    alpha: Option<f64>,
    /// Search the columns in blocks when the split threshold holds.
    #[arg(long)]
    split: bool,
    #[arg(long)]
    out_trace: Option<PathBuf>,
    #[arg(long)]
    out_summary: Option<PathBuf>,
    #[arg(long, hide = true, default_value_t = 0.0)]
    nfn_threshold_offset: f64,
}

#[derive(Args)]
struct ClassicalArgs {
    #[command(flatten)]
    input: InstanceArgs,
    #[arg(long, value_enum, default_value_t = RuleArg::Dantzig)]
    rule: RuleArg,
    /// Seed for the random pivot rule.
    #[arg(long, env = "QSIMPLEX_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_trace: Option<PathBuf>,
    #[arg(long)]
    out_summary: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InstanceArgs,
    #[command(flatten)]
    precision: PrecisionArgs,
    #[arg(long, default_value_t = DEFAULT_EPS_PRIME)]
    eps_prime: f64,
    /// Trace CSV written by `solve`; its counters are reported as measured.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    out_report: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Shared precision flags; validated, while each suite uses the fixed
    /// precisions of its criterion.
    #[command(flatten)]
    precision: PrecisionArgs,
    #[arg(long, env = "QSIMPLEX_SEED", default_value_t = 2024)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Analytic)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = QlsaErrorArg::Worst)]
    qlsa_error: QlsaErrorArg,
    /// Criteria to run (default: all of 1–10).
    #[arg(long, value_delimiter = ',')]
    criteria: Option<Vec<u32>>,
    /// Print every check, not only the per-criterion verdict.
    #[arg(long)]
    details: bool,
    #[arg(long)]
    out_summary: Option<PathBuf>,
    #[arg(long, hide = true, default_value_t = 0.0)]
    nfn_threshold_offset: f64,
}

#[derive(Debug)]
enum CliError {
    /// Bad flags, unreadable or malformed input (exit 2).
    Usage(String),
    /// The run itself failed (exit 1).
    Failure(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::InvalidParameter(_) | Error::InvalidInstance(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Failure(e.to_string()),
        }
    }
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{}: {e}", path.display()))
}

fn load_instance(path: &Path) -> Result<LpInstance, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let is_mps = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("mps"));
    let parsed = if is_mps { parse_mps(&text) } else { parse_json(&text) };
    parsed.map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn start_basis(lp: &LpInstance, basis: &Option<Vec<usize>>) -> Result<Vec<usize>, CliError> {
    match basis {
        Some(b) => {
            if b.len() != lp.num_rows() || b.iter().any(|&j| j >= lp.num_cols()) {
                return Err(CliError::Usage(format!(
                    "--basis needs {} column indices below {}",
                    lp.num_rows(),
                    lp.num_cols()
                )));
            }
            Ok(b.clone())
        }
        None => lp
            .slack_basis()
            .ok_or_else(|| CliError::Failure("no slack basis; supply a starting basis with --basis".to_string())),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    fs::write(path, text + "\n").map_err(|e| io_error(path, e))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.12e}")).unwrap_or_default()
}

fn join(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

/// One row of the `solve` trace CSV. Column order is fixed.
#[derive(Debug, Serialize, Deserialize)]
struct TraceRow {
    iteration: usize,
    basis: String,
    objective: String,
    outcome: String,
    entering: Option<usize>,
    leaving_row: Option<usize>,
    kappa: String,
    cost_scale: String,
    matrix_scale: String,
    rho_estimate: String,
    rho_exact: String,
    reduced_cost: String,
    ratio_estimate: String,
    ratio_exact: String,
    sound: bool,
    numerically_optimal: bool,
    recovered: bool,
    column_blocks: usize,
    /// Classical cross-check of the outcome: `pass`, `fail` or empty.
    classical_check: String,
    u_calls: u64,
    controlled_u_calls: u64,
    qlsa_invocations: u64,
    p_a_queries: u64,
    p_b_queries: u64,
    grover_iterations: u64,
    ae_repetitions: u64,
    gate_tally: u64,
}

/// Checks an iteration's outcome against the classical oracle: a pivot must
/// enter an improving column and keep the next basis feasible; optimality
/// and unboundedness are checked against the guaranteed tolerances.
fn classical_check(lp: &LpInstance, rec: &IterationRecord, params: &PrecisionParams) -> Option<bool> {
    let b = &rec.basis;
    match rec.outcome {
        OutcomeTag::Pivot { entering, leaving_row } => {
            let improving = classical::reduced_cost(lp, b, entering).ok()? < 0.0;
            let mut next = b.clone();
            next[leaving_row] = entering;
            let feasible = classical::basic_solution(lp, &next).is_ok_and(|x| x.iter().all(|&v| v >= -1e-9));
            Some(improving && feasible)
        }
        OutcomeTag::Optimal => {
            let ratios = scaled_ratios(lp, b).ok()?;
            Some(ratios.iter().all(|&(_, r)| r >= -2.2 * params.epsilon))
        }
        OutcomeTag::Unbounded { column } => {
            let u = classical::direction(lp, b, column).ok()?;
            let un = u.iter().map(|v| v * v).sum::<f64>().sqrt();
            Some(u.iter().all(|&v| v < params.delta * un))
        }
        OutcomeTag::Failure { .. } => None,
    }
}

fn trace_row(lp: &LpInstance, rec: &IterationRecord, params: &PrecisionParams) -> TraceRow {
    let (entering, leaving_row) = match rec.outcome {
        OutcomeTag::Pivot { entering, leaving_row } => (Some(entering), Some(leaving_row)),
        OutcomeTag::Unbounded { column } => (Some(column), None),
        _ => (None, None),
    };
    let outcome = match rec.outcome {
        OutcomeTag::Failure { kind } => format!("failure:{kind:?}"),
        other => other.name().to_string(),
    };
    let d = &rec.diagnostics;
    let s = &rec.stats;
    TraceRow {
        iteration: rec.iteration,
        basis: join(&rec.basis),
        objective: format!("{:.12e}", rec.objective),
        outcome,
        entering,
        leaving_row,
        kappa: format!("{:.12e}", d.kappa),
        cost_scale: format!("{:.12e}", d.cost_scale),
        matrix_scale: format!("{:.12e}", d.matrix_scale),
        rho_estimate: fmt_opt(d.rho_estimate),
        rho_exact: fmt_opt(d.rho_exact),
        reduced_cost: fmt_opt(d.reduced_cost),
        ratio_estimate: fmt_opt(d.ratio_estimate),
        ratio_exact: fmt_opt(d.ratio_exact),
        sound: d.sound,
        numerically_optimal: d.numerically_optimal,
        recovered: d.recovered,
        column_blocks: d.column_blocks,
        classical_check: match classical_check(lp, rec, params) {
            Some(true) => "pass".to_string(),
            Some(false) => "fail".to_string(),
            None => String::new(),
        },
        u_calls: s.u_calls,
        controlled_u_calls: s.controlled_u_calls,
        qlsa_invocations: s.qlsa_invocations,
        p_a_queries: s.p_a_queries,
        p_b_queries: s.p_b_queries,
        grover_iterations: s.grover_iterations,
        ae_repetitions: s.ae_repetitions,
        gate_tally: s.gate_tally,
    }
}

#[derive(Serialize)]
struct RunConfigOut {
    instance: String,
    epsilon: f64,
    delta: f64,
    t: f64,
    repetitions: usize,
    eps_prime: f64,
    alpha: Option<f64>,
    seed: u64,
    mode: Mode,
    qlsa_error: QlsaErrorMode,
    max_iters: Option<usize>,
    split: bool,
}

#[derive(Serialize)]
struct SolveSummary {
    schema_version: u32,
    command: &'static str,
    config: RunConfigOut,
    #[serde(flatten)]
    status: RunStatus,
    objective: f64,
    basis: Vec<usize>,
    x_basic: Vec<f64>,
    iterations: usize,
    pivots: usize,
    stats: QueryStats,
    classical_objective: Option<f64>,
    classical_status: Option<String>,
    elapsed_ms: u128,
}

fn cmd_solve(args: &SolveArgs) -> Result<ExitCode, CliError> {
    let params = args.precision.params()?;
    if !(args.eps_prime > 0.0 && args.eps_prime < 1.0) {
        return Err(CliError::Usage(format!("eps-prime = {} outside (0, 1)", args.eps_prime)));
    }
    let lp = load_instance(&args.input.instance)?;
    let start = start_basis(&lp, &args.input.basis)?;
    let mut ctx = QContext::new(args.seed, args.mode.into(), args.qlsa_error.into());
    ctx.alpha = args.alpha;
    ctx.nfn_threshold_offset = args.nfn_threshold_offset;
    let options = SimplexOptions { eps_prime: args.eps_prime, max_iterations: args.max_iters, split: args.split };
    let began = Instant::now();
    let run = run_quantum_simplex(&lp, Some(start.clone()), &params, &options, &mut ctx)?;
    let elapsed_ms = began.elapsed().as_millis();

    if let Some(path) = &args.out_trace {
        let mut w = csv::Writer::from_path(path).map_err(|e| io_error(path, e))?;
        for rec in &run.records {
            w.serialize(trace_row(&lp, rec, &params)).map_err(|e| io_error(path, e))?;
        }
        w.flush().map_err(|e| io_error(path, e))?;
    }
    let classical = solve_classical(&lp, &start, PivotRule::Dantzig).ok();
    let summary = SolveSummary {
        schema_version: SCHEMA_VERSION,
        command: "solve",
        config: RunConfigOut {
            instance: args.input.instance.display().to_string(),
            epsilon: params.epsilon,
            delta: params.delta,
            t: params.t,
            repetitions: params.repetitions,
            eps_prime: args.eps_prime,
            alpha: args.alpha,
            seed: args.seed,
            mode: args.mode.into(),
            qlsa_error: args.qlsa_error.into(),
            max_iters: args.max_iters,
            split: args.split,
        },
        status: run.status,
        objective: run.objective,
        basis: run.basis.clone(),
        x_basic: run.x_basic.clone(),
        iterations: run.iterations,
        pivots: run.pivots,
        stats: run.stats,
        classical_objective: classical.as_ref().map(|c| c.objective),
        classical_status: classical.as_ref().map(|c| match c.status {
            ClassicalStatus::Optimal => "optimal".to_string(),
            ClassicalStatus::Unbounded { column } => format!("unbounded (column {column})"),
        }),
        elapsed_ms,
    };
    if let Some(path) = &args.out_summary {
        write_json(path, &summary)?;
    }
    let status = match run.status {
        RunStatus::Optimal => "optimal".to_string(),
        RunStatus::Unbounded { column } => format!("unbounded (column {column})"),
        RunStatus::Failure { kind } => format!("failure ({kind:?})"),
        RunStatus::IterationCap => "iteration cap reached".to_string(),
    };
    println!("status: {status}");
    println!("objective: {:.12}", run.objective);
    println!("basis: {}", join(&run.basis));
    println!("iterations: {}  pivots: {}", run.iterations, run.pivots);
    if let Some(c) = &classical {
        println!("classical objective: {:.12}", c.objective);
    }
    Ok(match run.status {
        RunStatus::Optimal | RunStatus::Unbounded { .. } => ExitCode::SUCCESS,
        _ => ExitCode::from(1),
    })
}

/// One row of the `classical` trace CSV.
#[derive(Serialize)]
struct ClassicalRow {
    iteration: usize,
    entering: Option<usize>,
    leaving_row: Option<usize>,
    ratio_min: String,
    eligible: usize,
    min_reduced_cost: String,
}

#[derive(Serialize)]
struct ClassicalSummary {
    schema_version: u32,
    command: &'static str,
    instance: String,
    status: String,
    unbounded_column: Option<usize>,
    objective: f64,
    basis: Vec<usize>,
    x_basic: Vec<f64>,
    pivots: usize,
    iteration_cap: usize,
    switched_to_bland: bool,
}

fn cmd_classical(args: &ClassicalArgs) -> Result<ExitCode, CliError> {
    let lp = load_instance(&args.input.instance)?;
    let start = start_basis(&lp, &args.input.basis)?;
    let rule = match args.rule {
        RuleArg::Dantzig => PivotRule::Dantzig,
        RuleArg::Bland => PivotRule::Bland,
        RuleArg::Random => PivotRule::RandomEligible { seed: args.seed },
    };
    let sol = solve_classical(&lp, &start, rule)?;
    if let Some(path) = &args.out_trace {
        let mut w = csv::Writer::from_path(path).map_err(|e| io_error(path, e))?;
        for (i, r) in sol.reports.iter().enumerate() {
            let min_rc = r.reduced_costs.iter().map(|&(_, c)| c).fold(f64::INFINITY, f64::min);
            w.serialize(ClassicalRow {
                iteration: i,
                entering: r.entering,
                leaving_row: r.leaving_row,
                ratio_min: fmt_opt(r.ratio_min),
                eligible: r.eligible.len(),
                min_reduced_cost: fmt_opt(min_rc.is_finite().then_some(min_rc)),
            })
            .map_err(|e| io_error(path, e))?;
        }
        w.flush().map_err(|e| io_error(path, e))?;
    }
    let (status, column) = match sol.status {
        ClassicalStatus::Optimal => ("optimal", None),
        ClassicalStatus::Unbounded { column } => ("unbounded", Some(column)),
    };
    if let Some(path) = &args.out_summary {
        write_json(
            path,
            &ClassicalSummary {
                schema_version: SCHEMA_VERSION,
                command: "classical",
                instance: args.input.instance.display().to_string(),
                status: status.to_string(),
                unbounded_column: column,
                objective: sol.objective,
                basis: sol.basis.clone(),
                x_basic: sol.x_basic.clone(),
                pivots: sol.pivots,
                iteration_cap: classical::iteration_cap(lp.num_rows(), lp.num_cols()),
                switched_to_bland: sol.switched_to_bland,
            },
        )?;
    }
    match column {
        Some(k) => println!("status: unbounded (column {k})"),
        None => println!("status: optimal"),
    }
    println!("objective: {:.11e}", sol.objective);
    println!("basis: {}", join(&sol.basis));
    println!("pivots: {}", sol.pivots);
    Ok(ExitCode::SUCCESS)
}

/// Sums the counters of a `solve` trace.
fn measured_from_trace(path: &Path) -> Result<QueryStats, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| io_error(path, e))?;
    let mut total = QueryStats::default();
    for row in r.deserialize::<TraceRow>() {
        let row = row.map_err(|e| io_error(path, e))?;
        total.add(&QueryStats {
            u_calls: row.u_calls,
            controlled_u_calls: row.controlled_u_calls,
            qlsa_invocations: row.qlsa_invocations,
            p_a_queries: row.p_a_queries,
            p_b_queries: row.p_b_queries,
            grover_iterations: row.grover_iterations,
            ae_repetitions: row.ae_repetitions,
            gate_tally: row.gate_tally,
        });
    }
    Ok(total)
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<ExitCode, CliError> {
    let params = args.precision.params()?;
    let lp = load_instance(&args.input.instance)?;
    let basis = start_basis(&lp, &args.input.basis)?;
    let state = normalize(&lp, &BasisState::new(&lp, basis)?, args.eps_prime)?;
    let stats = qsimplex_core::lp::sparsity_stats(&lp, state.basis())?;
    let ab = state.scaled_basis_matrix(&lp);
    let a_n_frobenius = state
        .nonbasic()
        .iter()
        .flat_map(|&k| state.scaled_column(&lp, k))
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt();
    let measured = args.trace.as_deref().map(measured_from_trace).transpose()?;
    let report = CostReport::new(
        CostInputs {
            m: lp.num_rows(),
            n: lp.num_cols(),
            d_c: stats.d_c,
            d_r: stats.d_r,
            kappa: state.kappa,
            mu_basis: mu(&ab),
            a_n_frobenius,
            epsilon: params.epsilon,
            delta: params.delta,
            t: params.t,
        },
        measured,
    );
    print!("{}", report.to_table());
    if let Some(path) = &args.out_report {
        write_json(path, &report)?;
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct VerifySummary {
    schema_version: u32,
    command: &'static str,
    config: VerifyConfig,
    passed: bool,
    suites: Vec<SuiteResult>,
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode, CliError> {
    args.precision.params()?;
    let criteria = args.criteria.clone().unwrap_or_else(|| (1..=10).collect());
    if let Some(c) = criteria.iter().find(|c| !(1..=10).contains(*c)) {
        return Err(CliError::Usage(format!("unknown criterion {c}; expected 1-10")));
    }
    let cfg = VerifyConfig {
        seed: args.seed,
        qlsa_error: args.qlsa_error.into(),
        mode: args.mode.into(),
        nfn_threshold_offset: args.nfn_threshold_offset,
        repetitions: args.precision.repetitions,
    };
    // suites are independent and seeded, so they run in parallel
    let results: Vec<SuiteResult> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|&c| s.spawn(move || run_criterion(c, &cfg).expect("criterion in range")))
            .collect();
        handles.into_iter().map(|h| h.join().expect("suite panicked")).collect()
    });
    let mut passed = true;
    for r in &results {
        println!("{}", r.summary_line());
        for d in &r.details {
            if args.details || d.starts_with("[FAIL]") {
                println!("    {d}");
            }
        }
        if let Some(seed) = r.counterexample_seed {
            println!("    counterexample seed: {seed}");
        }
        passed &= r.passed;
    }
    if let Some(path) = &args.out_summary {
        write_json(
            path,
            &VerifySummary { schema_version: SCHEMA_VERSION, command: "verify", config: cfg, passed, suites: results },
        )?;
    }
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Classical(a) => cmd_classical(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
