//! `degreeplan`: validate catalogs, mine grade rules, plan, serve.
//!
//! Exit codes: 0 success, 1 bad input, 2 no plan satisfies the constraints,
//! 3 internal fault.

use std::fmt::Write as _;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use degreeplan::catalog::{parse_transcript, validate_catalog, Catalog, Transcript};
use degreeplan::milp::write_lp;
use degreeplan::model::{build_model, normalize_preferences, GradeEstimates, ObjectivePriority, Preferences};
use degreeplan::planner::{optimize, PlanError};
use degreeplan::rules::{mine_rules, parse_records, parse_rules, predict, write_rules, MineConfig, RuleSet};
use degreeplan::solver::SolverConfig;
use degreeplan::term::TermIndex;
use degreeplan_service::AppState;

#[derive(Parser)]
#[command(name = "degreeplan", version, about = "Degree-plan optimizer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a catalog directory for structural problems.
    Validate {
        #[arg(long)]
        catalog: PathBuf,
    },
    /// Mine grade rules from historical records.
    Mine {
        #[arg(long)]
        records: PathBuf,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0.005)]
        min_support: f64,
        #[arg(long, default_value_t = 0.90)]
        min_confidence: f64,
    },
    /// Optimize one plan and print it.
    Plan(PlanArgs),
    /// Serve the HTTP API.
    Serve {
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Objective {
    Gpa,
    Time,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverKind {
    Internal,
    External,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value = "internal")]
    solver: SolverKind,
    /// External solver command; `{lp}`, `{sol}` and `{time}` are substituted.
    #[arg(long)]
    solver_cmd: Option<String>,
    /// Seconds.
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    catalog: PathBuf,
    /// Looked up in the catalog directory when not found as given.
    #[arg(long)]
    transcript: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "gpa")]
    objective: Objective,
    #[arg(long)]
    honors: bool,
    #[arg(long)]
    summers_off: bool,
    #[arg(long)]
    max_per_term: Option<u32>,
    #[arg(long)]
    thesis_max: Option<u32>,
    #[arg(long, num_args = 1..)]
    desire: Vec<String>,
    #[arg(long, num_args = 1..)]
    reject: Vec<String>,
    /// `CODE=TERM`, TERM a token such as SP2024 or a term number.
    #[arg(long, num_args = 1..)]
    pin: Vec<String>,
    #[arg(long)]
    concentration: Option<String>,
    /// Mined rules file for grade estimates.
    #[arg(long, conflicts_with = "records")]
    rules: Option<PathBuf>,
    /// Records to mine with default thresholds instead of a rules file.
    #[arg(long)]
    records: Option<PathBuf>,
    /// Writes the model: to this file if it ends in `.lp`, otherwise as
    /// `plan_<timestamp>.lp` inside this directory.
    #[arg(long)]
    lp_out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

enum Failure {
    Input(String),
    Infeasible(String),
    Internal(String),
}

impl Failure {
    fn input(e: impl std::fmt::Display) -> Failure {
        Failure::Input(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_catalog(dir: &Path) -> Result<Catalog, Failure> {
    Catalog::load(dir).map_err(Failure::input)
}

fn solver_config(args: &SolverArgs) -> Result<SolverConfig, Failure> {
    let time_limit = Duration::try_from_secs_f64(args.time_limit).map_err(Failure::input)?;
    let config = match args.solver {
        SolverKind::Internal => SolverConfig::default(),
        SolverKind::External => {
            let cmd = args
                .solver_cmd
                .clone()
                .or_else(|| std::env::var("DEGREEPLAN_SOLVER_CMD").ok())
                .ok_or_else(|| Failure::Input("--solver external needs --solver-cmd or DEGREEPLAN_SOLVER_CMD".into()))?;
            SolverConfig::external(cmd)
        }
    };
    Ok(SolverConfig { time_limit, ..config })
}

fn load_rules(path: &Path) -> Result<RuleSet, Failure> {
    parse_rules(&read(path)?).map_err(Failure::input)
}

fn parse_term(catalog: &Catalog, token: &str) -> Result<TermIndex, Failure> {
    let term = match token.parse::<u32>() {
        Ok(n) => TermIndex::new(n).map_err(Failure::input)?,
        Err(_) => catalog.calendar().anchor.term_index(token).map_err(Failure::input)?,
    };
    Ok(term)
}

fn plan(args: PlanArgs) -> Result<String, Failure> {
    let catalog = load_catalog(&args.catalog)?;
    let transcript = match &args.transcript {
        None => Transcript::empty(&catalog),
        Some(path) => {
            let path = if path.exists() { path.clone() } else { args.catalog.join(path) };
            parse_transcript(&read(&path)?, &catalog).map_err(Failure::input)?
        }
    };
    let mut prefs = Preferences {
        objective: match args.objective {
            Objective::Gpa => ObjectivePriority::ExpectedGpa,
            Objective::Time => ObjectivePriority::FastestCompletion,
        },
        honors: args.honors,
        summers_off: args.summers_off,
        max_per_term: args.max_per_term,
        thesis_max: args.thesis_max,
        desired: args.desire.iter().cloned().collect(),
        rejected: args.reject.iter().cloned().collect(),
        concentration: args.concentration.clone(),
        ..Preferences::default()
    };
    for pin in &args.pin {
        let (code, token) = pin
            .split_once('=')
            .ok_or_else(|| Failure::Input(format!("--pin expects CODE=TERM, got `{pin}`")))?;
        prefs.pins.insert(code.trim().to_string(), parse_term(&catalog, token.trim())?);
    }
    let estimates = match (&args.rules, &args.records) {
        (Some(path), _) => predict(&load_rules(path)?, &transcript),
        (None, Some(path)) => {
            let data = parse_records(&read(path)?).map_err(Failure::input)?;
            predict(&mine_rules(&data, &MineConfig::default()), &transcript)
        }
        (None, None) => GradeEstimates::default(),
    };
    let config = solver_config(&args.solver)?;

    if let Some(out) = &args.lp_out {
        let prefs = normalize_preferences(&catalog, &transcript, &prefs).map_err(Failure::input)?;
        let (model, _) = build_model(&catalog, &transcript, &prefs, &estimates).map_err(|e| Failure::from(PlanError::from(e)))?;
        let path = if out.extension().is_some_and(|e| e == "lp") {
            out.clone()
        } else {
            std::fs::create_dir_all(out).map_err(Failure::input)?;
            let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis());
            out.join(format!("plan_{stamp}.lp"))
        };
        std::fs::write(&path, write_lp(&model)).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        eprintln!("model written to {}", path.display());
    }

    let outcome = optimize(&catalog, &transcript, &prefs, &estimates, &config)?;
    eprintln!("solved in {:.3} s, {} nodes", outcome.solve_time.as_secs_f64(), outcome.nodes);
    let s = &outcome.summary;
    let mut text = outcome.plan.render();
    let _ = writeln!(text);
    let _ = writeln!(text, "status: {:?}", outcome.status);
    let _ = writeln!(text, "objective: {}", degreeplan::milp::format_number(outcome.objective));
    let _ = writeln!(text, "completion: {}", catalog.calendar().token(TermIndex::new(s.completion.max(1)).map_err(Failure::input)?));
    let _ = writeln!(text, "credits planned: {}", s.total_credits);
    let _ = writeln!(text, "difficulty gap: {:.2}", s.max_gap);
    match s.expected_gpa {
        Some(g) => {
            let _ = writeln!(text, "expected GPA over {} estimated courses: {g:.2}", s.eligible_scheduled);
        }
        None => {
            let _ = writeln!(text, "expected GPA: no estimates");
        }
    }
    Ok(text)
}

impl From<PlanError> for Failure {
    fn from(e: PlanError) -> Self {
        match e {
            PlanError::Build(_) => Failure::Input(e.to_string()),
            PlanError::Infeasible { .. } => Failure::Infeasible(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { catalog } => {
            let cat = load_catalog(&catalog)?;
            let diagnostics = validate_catalog(&cat);
            if diagnostics.is_empty() {
                println!("catalog OK: {} courses, {} groups, {} terms", cat.len(), cat.groups().len(), cat.calendar().s_max);
                return Ok(());
            }
            for d in &diagnostics {
                println!("{d}");
            }
            Err(Failure::Input(format!("{} problem(s) found", diagnostics.len())))
        }
        Command::Mine { records, out, min_support, min_confidence } => {
            let data = parse_records(&read(&records)?).map_err(Failure::input)?;
            let config = MineConfig { min_support, min_confidence, ..MineConfig::default() };
            let rules = mine_rules(&data, &config);
            let text = write_rules(&rules);
            match out {
                Some(path) => {
                    std::fs::write(&path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                    eprintln!("{} rules from {} students written to {}", rules.len(), data.n_students(), path.display());
                }
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Plan(args) => {
            print!("{}", plan(args)?);
            Ok(())
        }
        Command::Serve { catalog, rules, addr, solver } => {
            let state = AppState {
                catalog: load_catalog(&catalog)?,
                rules: rules.as_deref().map(load_rules).transpose()?.unwrap_or_default(),
                solver: solver_config(&solver)?,
            };
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Internal(e.to_string()))?;
            eprintln!("listening on http://{addr}");
            runtime
                .block_on(degreeplan_service::serve(addr, state))
                .map_err(|e| Failure::Internal(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which is reserved for infeasibility
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(u8::from(e.use_stderr()));
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Infeasible(m)) => {
            eprintln!("infeasible: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(3)
        }
    }
}
