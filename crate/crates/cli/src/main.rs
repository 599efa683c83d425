use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use kmsteiner_cli::config::parse_encodings;
use kmsteiner_cli::stages::load_design;
use kmsteiner_cli::{fixtures, Job, JobConfig, Outcome};
use kmsteiner_core::designs::{canonical_form_with_budget, verify_steiner, DEFAULT_BUDGET};
use kmsteiner_core::xcc::{solve_with, Engine, SolveLimits, SolveMode, XccProblem};

const EXIT_VALIDATION: u8 = 1;
const EXIT_CAP: u8 = 2;

/// Construct and classify Steiner designs with a prescribed automorphism group.
#[derive(Parser)]
#[command(name = "kmsteiner", version)]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StageArgs {
    #[arg(long)]
    config: PathBuf,
    /// Node cap for the solver; overrides `node_cap`.
    #[arg(long)]
    limit: Option<u64>,
    /// Comma-separated encodings (a, b, c or all); overrides `encoding`.
    #[arg(long)]
    encoding: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate t-subset orbits and good k-subset orbits.
    Orbits(StageArgs),
    /// Build the Kramer-Mesner matrix.
    Km(StageArgs),
    /// Compute normalizer classes and write the exact cover problems.
    Encode(StageArgs),
    /// Solve the exact cover problems.
    Solve(StageArgs),
    /// Expand, verify and classify the solutions.
    Classify(StageArgs),
    /// Print the summary and benchmark tables.
    Report(StageArgs),
    /// Run every stage, reusing up-to-date artifacts.
    Run(StageArgs),
    /// Standalone exact cover solver on a problem file.
    Xcc {
        #[command(subcommand)]
        command: XccCommand,
    },
    /// Check the Steiner property of a design file and print its automorphism group order.
    Verify {
        design: PathBuf,
        #[arg(long, default_value_t = 2)]
        t: usize,
        /// Number of points, needed for list-of-lists files.
        #[arg(long)]
        v: Option<usize>,
    },
    /// Write the shipped group files and configurations.
    Fixtures { dir: PathBuf },
}

#[derive(Subcommand)]
enum XccCommand {
    Solve {
        file: PathBuf,
        #[arg(long)]
        limit: Option<u64>,
        #[arg(long, value_enum, default_value_t = EngineArg::Auto)]
        engine: EngineArg,
        /// Print each solution's option ids.
        #[arg(long)]
        print: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Auto,
    Links,
    Bitmask,
}

fn load_job(args: &StageArgs) -> Result<Job> {
    let mut cfg = JobConfig::load(&args.config)?;
    if let Some(limit) = args.limit {
        cfg.node_cap = Some(limit);
    }
    if let Some(e) = &args.encoding {
        cfg.encodings = parse_encodings(e)?;
    }
    Job::new(cfg)
}

fn run(cli: Cli) -> Result<Outcome> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            bail!("--jobs must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
    }
    match cli.command {
        Command::Orbits(a) => load_job(&a)?.orbits(),
        Command::Km(a) => load_job(&a)?.km(),
        Command::Encode(a) => load_job(&a)?.encode(),
        Command::Solve(a) => load_job(&a)?.solve(),
        Command::Classify(a) => load_job(&a)?.classify(),
        Command::Report(a) => {
            print!("{}", load_job(&a)?.report()?);
            Ok(Outcome::Done)
        }
        Command::Run(a) => {
            let (outcome, report) = load_job(&a)?.run()?;
            print!("{report}");
            Ok(outcome)
        }
        Command::Xcc {
            command:
                XccCommand::Solve {
                    file,
                    limit,
                    engine,
                    print,
                },
        } => {
            let p = XccProblem::parse(&std::fs::read_to_string(&file)?)?;
            let engine = match engine {
                EngineArg::Auto => Engine::Auto,
                EngineArg::Links => Engine::Links,
                EngineArg::Bitmask => Engine::Bitmask,
            };
            let limits = SolveLimits {
                max_nodes: limit,
                ..Default::default()
            };
            let mode = if print { SolveMode::Enumerate } else { SolveMode::Count };
            let stats = solve_with(&p, engine, mode, limits, |s| {
                let ids: Vec<String> = s.option_ids.iter().map(u32::to_string).collect();
                println!("{}", ids.join(" "));
            });
            println!("solutions={} nodes={} seconds={:.3}", stats.solutions, stats.nodes, stats.elapsed);
            Ok(match stats.limit_hit {
                Some(kind) => Outcome::CapHit(format!("stopped at the {kind:?} limit")),
                None => Outcome::Done,
            })
        }
        Command::Verify { design, t, v } => {
            let d = load_design(&design, v)?;
            let report = verify_steiner(&d, t)?;
            println!("v={} b={} k={} t={t}", d.v(), d.b(), d.k());
            if !report.pass {
                for (s, c) in &report.violations {
                    println!("violation {s} covered {c} times");
                }
                bail!("not a Steiner system: {} t-subsets covered wrongly", report.violation_count);
            }
            let cf = canonical_form_with_budget(&d, DEFAULT_BUDGET)?;
            println!("steiner=pass replication={:?} aut={}", report.replication, cf.aut_order);
            Ok(Outcome::Done)
        }
        Command::Fixtures { dir } => {
            fixtures::generate(&dir)?;
            Ok(Outcome::Done)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    match run(Cli::parse()) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::CapHit(msg)) => {
            log::warn!("{msg}");
            ExitCode::from(EXIT_CAP)
        }
        Err(e) => {
            let budget = e
                .downcast_ref::<kmsteiner_core::Error>()
                .is_some_and(|c| matches!(c, kmsteiner_core::Error::BudgetExceeded(_)));
            eprintln!("error: {e:#}");
            ExitCode::from(if budget { EXIT_CAP } else { EXIT_VALIDATION })
        }
    }
}
