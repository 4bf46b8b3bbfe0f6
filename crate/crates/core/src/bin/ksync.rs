//! Command-line front end.
//!
//! Exit codes: 0 solved and certified, 1 input or validation error,
//! 2 solved but not certified, 3 solver failure. Failures print a JSON
//! object with a `reason` field on stderr.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use kuramoto_series::experiments::{self, Method, SweepConfig};
use kuramoto_series::graph::{inf_norm, GraphOperators};
use kuramoto_series::io::{self, CaseFile};
use kuramoto_series::random::{self, FrequencyDist, FrequencySpec, GraphModel, ModelSpec};
use kuramoto_series::series::{self, evaluate_terms};
use kuramoto_series::solvers;
use kuramoto_series::sync_tests::{self, CouplingConvention, ScanConfig, SyncTestReport, TestId};
use kuramoto_series::Error;

#[derive(Parser)]
#[command(name = "ksync", version, about = "Kuramoto synchronization by power series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveMethod {
    Series,
    Newton,
    FixedPoint,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesFormat {
    Text,
    Latex,
    Csv,
}

#[derive(clap::Args)]
struct CaseArgs {
    #[arg(long)]
    case: PathBuf,
    /// Shift frequencies to mean zero instead of rejecting them.
    #[arg(long)]
    center: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a case and report the certificate, angles and residuals.
    Solve {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long, value_enum, default_value = "series")]
        method: SolveMethod,
        #[arg(long, default_value_t = 7)]
        order: usize,
        #[arg(long, default_value_t = solvers::DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate synchronization tests at the nominal frequencies.
    Test {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long, value_delimiter = ',', default_value = "T0,T1,T2,AT1,AT3,AT5,AT7")]
        tests: Vec<TestId>,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
        gamma: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Critical coupling and test thresholds for one case.
    Scan {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long, value_delimiter = ',', default_value = "T0,T1,T2,AT1,AT3,AT5,AT7")]
        tests: Vec<TestId>,
        #[arg(long = "dK", default_value_t = sync_tests::DEFAULT_DK)]
        dk: f64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
        gamma: f64,
        #[arg(long, default_value_t = sync_tests::DEFAULT_RESOLUTION)]
        resolution: f64,
        /// Overrides the convention stored in the case file.
        #[arg(long)]
        convention: Option<CouplingConvention>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Threshold accuracy over random graph ensembles.
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "er")]
        model: Vec<GraphModel>,
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.5,0.8")]
        p: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "bipolar")]
        dist: Vec<FrequencyDist>,
        #[arg(long, default_value_t = 30)]
        trials: usize,
        #[arg(long, value_delimiter = ',', default_value = "1,3,5,7")]
        orders: Vec<usize>,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
        gamma: f64,
        #[arg(long, default_value = "uniform_gain")]
        convention: CouplingConvention,
        /// Use the full-scale protocol instead of the flags above.
        #[arg(long)]
        full: bool,
        #[arg(long, env = "KURAMOTO_SEED", default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time series, fixed-point and Newton solvers on dense random graphs.
    Bench {
        #[arg(long, default_value_t = 120)]
        n: usize,
        #[arg(long, default_value_t = 0.8)]
        p: f64,
        #[arg(long, default_value_t = 1)]
        graphs: usize,
        /// Frequency vectors per graph.
        #[arg(long, default_value_t = 20)]
        omegas: usize,
        /// `‖eta‖∞` as a fraction of the T0 threshold.
        #[arg(long, default_value_t = 0.1)]
        load: f64,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long, value_delimiter = ',', default_value = "series5,series7,fixed_point,newton")]
        methods: Vec<Method>,
        #[arg(long)]
        include_precompute: bool,
        #[arg(long, env = "KURAMOTO_SEED", default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a random case file.
    Gen {
        #[arg(long, default_value = "er")]
        model: GraphModel,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value = "bipolar")]
        dist: FrequencyDist,
        #[arg(long, default_value = "scaled_injection")]
        convention: CouplingConvention,
        #[arg(long, env = "KURAMOTO_SEED", default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the symbolic series terms.
    SeriesGen {
        #[arg(long, default_value_t = 7)]
        order: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: SeriesFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Input(Error),
    Solver(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let input = e.is_validation()
            || matches!(
                e,
                Error::ParseError { .. }
                    | Error::UnsupportedSchema(_)
                    | Error::UncenteredFrequencies { .. }
                    | Error::DimensionMismatch { .. }
                    | Error::InvalidSpec(_)
                    | Error::InvalidOrder(_)
                    | Error::OrderTooLarge { .. }
                    | Error::Io(_)
            );
        if input {
            Failure::Input(e)
        } else {
            Failure::Solver(e)
        }
    }
}

type CmdResult = Result<ExitCode, Failure>;

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => io::atomic_write(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_json(out: &Option<PathBuf>, value: &Value) -> Result<(), Failure> {
    emit(out, &(serde_json::to_string_pretty(value).expect("json serializes") + "\n"))
}

fn report_json(r: &SyncTestReport) -> Value {
    json!({
        "test": r.test_id.to_string(),
        "gamma": r.gamma,
        "lhs": r.lhs,
        "rhs": r.rhs,
        "passed": r.passed,
        "margin": r.margin,
        "certified_gamma": r.certified_gamma,
    })
}

fn solve(case: &CaseArgs, method: SolveMethod, order: usize, tol: f64, out: &Option<PathBuf>) -> CmdResult {
    let c = io::parse_case(&case.case, case.center)?;
    let ops = GraphOperators::new(&c.graph)?;
    let t0 = series::test_t0(&ops, &c.omega)?;
    let eta = ops.eta(&c.omega)?;
    let (x, method_name, iterations) = match method {
        SolveMethod::Series => {
            let se = evaluate_terms(&ops.projections, &eta, order)?;
            (solvers::recover_angles(&ops, se.truncated_solution(order)?).map_err(Failure::Solver)?, format!("series{order}"), 0)
        }
        SolveMethod::FixedPoint => {
            let fp = solvers::solve_fixed_point(&ops.projections, &eta, tol, solvers::FIXED_POINT_MAX_ITER).map_err(Failure::Solver)?;
            (solvers::recover_angles(&ops, &fp.solution).map_err(Failure::Solver)?, "fixed_point".into(), fp.iterations)
        }
        SolveMethod::Newton => {
            let nt = solvers::solve_newton(&ops, &c.omega, None, tol, solvers::NEWTON_MAX_ITER).map_err(Failure::Solver)?;
            (nt.solution, "newton".into(), nt.iterations)
        }
    };
    let eq = solvers::check_equivalence(&ops, &c.omega, &x)?;
    let angles = c.graph.edge_differences(&x);
    let phi = angles.map(f64::sin);
    let max_angle = inf_norm(&angles);
    let certified = match method {
        SolveMethod::Series => t0.passes_t0,
        _ => eq.node_residual < solvers::MEMBERSHIP_TOLERANCE && max_angle < std::f64::consts::FRAC_PI_2,
    };
    let value = json!({
        "status": if certified { "certified" } else { "uncertified" },
        "method": method_name,
        "iterations": iterations,
        "t0": {
            "eta_norm": t0.eta_norm,
            "pcyc_norm": t0.pcyc_norm,
            "h_of_pcyc": t0.h_of_pcyc,
            "passed": t0.passes_t0,
            "gamma_star": t0.gamma_star,
        },
        "phi": phi.as_slice(),
        "edge_angles": angles.as_slice(),
        "x": x.as_slice(),
        "max_edge_angle": max_angle,
        "residuals": {
            "node": eq.node_residual,
            "flow": eq.flow_residual,
            "constrained": eq.constrained_residual,
            "unconstrained": eq.unconstrained_residual,
            "max_mismatch": eq.max_mismatch,
        },
        "config": { "case": case.case, "order": order, "tol": tol, "center": case.center },
    });
    emit_json(out, &value)?;
    Ok(ExitCode::from(if certified { 0 } else { 2 }))
}

fn run_tests(case: &CaseArgs, tests: &[TestId], gamma: f64, out: &Option<PathBuf>) -> CmdResult {
    let c = io::parse_case(&case.case, case.center)?;
    let ops = GraphOperators::new(&c.graph)?;
    let max_order = tests.iter().filter_map(|t| if let TestId::At(k) = t { Some(*k) } else { None }).max();
    let se = match max_order {
        Some(k) => Some(evaluate_terms(&ops.projections, &ops.eta(&c.omega)?, k)?),
        None => None,
    };
    let mut reports = Vec::new();
    let mut certified = false;
    for &t in tests {
        let r = match t {
            TestId::T0 => sync_tests::test_t0(&ops, &c.omega),
            TestId::T1 => sync_tests::test_t1(&ops, &c.omega),
            TestId::T2 => sync_tests::test_t2(&ops, &c.omega),
            TestId::At(k) => sync_tests::test_atk(se.as_ref().expect("series built"), k, gamma),
        };
        match r {
            Ok(r) => {
                certified |= r.passed && t.is_sufficient();
                reports.push(report_json(&r));
            }
            Err(e) => reports.push(json!({ "test": t.to_string(), "error": e.reason(), "message": e.to_string() })),
        }
    }
    let value = json!({
        "certified": certified,
        "reports": reports,
        "config": { "case": case.case, "gamma": gamma, "center": case.center },
    });
    emit_json(out, &value)?;
    Ok(ExitCode::from(if certified { 0 } else { 2 }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: CmdResult = match &cli.command {
        Command::Solve { case, method, order, tol, out } => solve(case, *method, *order, *tol, out),
        Command::Test { case, tests, gamma, out } => run_tests(case, tests, *gamma, out),
        Command::Scan { case, tests, dk, gamma, resolution, convention, out } => (|| {
            let c = io::parse_case(&case.case, case.center)?;
            let ops = GraphOperators::new(&c.graph)?;
            let convention = convention.unwrap_or(c.convention);
            let cfg = ScanConfig { convention, dk: *dk, resolution: *resolution, ..ScanConfig::default() };
            let scan = sync_tests::critical_ratios(&ops, &c.omega, tests, *gamma, &cfg)?;
            let echo = json!({ "case": case.case, "convention": convention, "dK": dk, "gamma": gamma, "resolution": resolution });
            emit(out, &io::scan_csv(&scan, &echo.to_string()))?;
            Ok(ExitCode::SUCCESS)
        })(),
        Command::Sweep { model, n, p, dist, trials, orders, gamma, convention, full, seed, threads, out } => (|| {
            let cfg = if *full {
                SweepConfig { master_seed: *seed, ..SweepConfig::full() }
            } else {
                SweepConfig {
                    models: model.clone(),
                    p_grid: p.clone(),
                    dists: dist.clone(),
                    trials: *trials,
                    n: *n,
                    gamma: *gamma,
                    orders: orders.clone(),
                    convention: *convention,
                    master_seed: *seed,
                    ..SweepConfig::default()
                }
            };
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.unwrap_or(0))
                .build()
                .map_err(|e| Error::InvalidSpec(e.to_string()))?;
            let records = pool.install(|| experiments::accuracy_sweep(&cfg));
            emit(out, &io::sweep_csv(&cfg, &records))?;
            Ok(ExitCode::SUCCESS)
        })(),
        Command::Bench { n, p, graphs, omegas, load, repeats, methods, include_precompute, seed, out } => (|| {
            let instances = (0..*graphs)
                .map(|g| experiments::t0_scaled_instance(*n, *p, *omegas, *load, random::derive_seed(*seed, g as u64)))
                .collect::<Result<Vec<_>, _>>()?;
            let rows = experiments::timing_bench(&instances, methods, *repeats, *include_precompute);
            let echo = json!({ "n": n, "p": p, "graphs": graphs, "omegas": omegas, "load": load,
                               "repeats": repeats, "include_precompute": include_precompute, "seed": seed });
            emit(out, &io::timing_csv(&rows, &echo.to_string()))?;
            let failed = rows.iter().any(|r| r.failed.is_some());
            Ok(ExitCode::from(if failed { 3 } else { 0 }))
        })(),
        Command::Gen { model, n, p, dist, convention, seed, out } => (|| {
            let g = random::gen_graph(&ModelSpec::new(*model, *n, *p, *seed))?;
            let omega = random::gen_frequencies(&FrequencySpec { dist: *dist, n: *n, seed: random::derive_seed(*seed, 1) });
            let mut file = CaseFile::from_parts(&g, &omega, *convention);
            file.source = Some(format!("ksync gen --model {model} --n {n} --p {p} --dist {dist} --seed {seed}"));
            emit(out, &file.to_json())?;
            Ok(ExitCode::SUCCESS)
        })(),
        Command::SeriesGen { order, format, out } => (|| {
            let terms = series::symbolic_terms(*order)?;
            let text = match format {
                SeriesFormat::Text => series::format_text(&terms),
                SeriesFormat::Latex => series::format_latex(&terms),
                SeriesFormat::Csv => series::format_csv(&terms),
            };
            emit(out, &text)?;
            Ok(ExitCode::SUCCESS)
        })(),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            let (code, e) = match failure {
                Failure::Input(e) => (1, e),
                Failure::Solver(e) => (3, e),
            };
            eprintln!("{}", json!({ "status": "error", "reason": e.reason(), "message": e.to_string() }));
            ExitCode::from(code)
        }
    }
}
