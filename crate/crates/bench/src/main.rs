use std::fs;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use proms::theory;
use proms::{generate, BaselineParams, ClauseSelection, GenSpec, Scheme};
use proms_bench::config::ConfigError;
use proms_bench::report::{read_jsonl, to_jsonl};
use proms_bench::runner::{load_formula, run_solver, BenchError};
use proms_bench::{
    flips_per_second_probe, render_table, run_bench, summarize, BenchConfig, OutputFormat, Overrides, ProbeBudget,
    RunRecord, SolverKind,
};

const EXIT_PARSE: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "proms", version, about = "Local search for unweighted Max-SAT")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one DIMACS instance and print the best assignment found.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Stop once this many unsatisfied clauses are reached.
        #[arg(long)]
        target: Option<usize>,
        #[arg(long, default_value = "table")]
        format: OutputFormat,
    },
    /// Run solvers over instance files or directories and tabulate results.
    Bench {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value_t = 1)]
        runs: usize,
        /// `<instance> <optimum>` lines; runs stop when the optimum is reached.
        #[arg(long)]
        optima: Option<PathBuf>,
        #[arg(long, default_value = "table")]
        format: OutputFormat,
        /// Worker threads (defaults to the number of cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Also write the per-run records as JSON lines to this file.
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Render a results table from JSON-lines run records.
    Report { records: PathBuf },
    /// Write uniform random k-SAT instances in DIMACS format.
    Gen {
        #[arg(long = "vars", short = 'n')]
        num_vars: usize,
        #[arg(long = "clauses", short = 'm')]
        num_clauses: usize,
        #[arg(short, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of instances; with more than one, `--out` is a directory.
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Print threshold ratios and the satisfiable-fraction curve h(r).
    Theory {
        #[arg(long, value_delimiter = ',', default_values_t = [6.0, 7.5, 10.0, 12.5, 15.0, 17.5, 20.0, 21.5, 50.0])]
        ratios: Vec<f64>,
    },
    /// Measure flips per second of each caching scheme on one instance.
    Probe {
        instance: PathBuf,
        #[arg(long, value_delimiter = ',', default_values = ["mcbc", "mcbn", "mnbc", "mnbn"])]
        schemes: Vec<Scheme>,
        #[arg(long, default_value_t = 1.0, conflicts_with = "steps")]
        seconds: f64,
        /// Fixed step budget instead of a time budget.
        #[arg(long)]
        steps: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct SolverArgs {
    /// Comma-separated list for `bench`.
    #[arg(long, value_delimiter = ',', default_value = "proms")]
    solver: Vec<SolverKind>,
    #[arg(long = "clause-sel")]
    clause_sel: Option<ClauseSelection>,
    #[arg(long)]
    scheme: Option<Scheme>,
    /// Wall-clock limit per run in seconds; 0 disables it.
    #[arg(long, default_value_t = 300.0)]
    cutoff: f64,
    #[arg(long)]
    max_steps: Option<u64>,
    /// Seed of the first run; run i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, allow_negative_numbers = true)]
    eta: Option<f64>,
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long = "mmax-factor")]
    mmax_factor: Option<f64>,
    /// probSAT break base.
    #[arg(long, default_value_t = 0.9)]
    cb: f64,
    /// probSAT exponent.
    #[arg(long, default_value_t = 2.06)]
    cb_exp: f64,
    /// WalkSAT noise.
    #[arg(long, default_value_t = 0.567)]
    noise: f64,
}

impl SolverArgs {
    fn config(&self) -> BenchConfig {
        BenchConfig {
            solvers: self.solver.clone(),
            cutoff: (self.cutoff > 0.0).then(|| Duration::from_secs_f64(self.cutoff)),
            max_steps: self.max_steps.unwrap_or(proms::solver::DEFAULT_MAX_STEPS),
            seed_base: self.seed,
            overrides: Overrides {
                zeta: self.zeta,
                eta: self.eta,
                delta: self.delta,
                m_max_factor: self.mmax_factor,
                scheme: self.scheme,
                clause_selection: self.clause_sel,
            },
            baseline: BaselineParams { cb: self.cb, k: self.cb_exp, noise: self.noise },
            ..BenchConfig::default()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) if is_broken_pipe(&err) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", message(&err));
            let config = err
                .downcast_ref::<BenchError>()
                .is_some_and(|e| matches!(e, BenchError::Config(_)))
                || err.downcast_ref::<ConfigError>().is_some();
            ExitCode::from(if config { EXIT_CONFIG } else { EXIT_PARSE })
        }
    }
}

fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe)
}

/// The error chain joined by `: `, skipping causes already quoted by their parent.
fn message(err: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in err.chain() {
        let text = cause.to_string();
        if !out.contains(&text) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&text);
        }
    }
    out
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Solve { instance, solver, target, format } => {
            let cfg = solver.config();
            if cfg.solvers.len() != 1 {
                return Err(ConfigError::NoSolver).context("`solve` takes exactly one solver");
            }
            cfg.validate()?;
            let kind = cfg.solvers[0];
            let formula = load_formula(&instance)?;
            let params = cfg.solver_params(kind, &formula, cfg.seed_base, target);
            let r = run_solver(kind, &formula, &params, &cfg);
            match format {
                OutputFormat::Jsonl => {
                    let record = RunRecord {
                        instance: instance.file_name().map_or_else(String::new, |s| s.to_string_lossy().into_owned()),
                        class: instance.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned()),
                        solver: kind,
                        seed: params.seed,
                        best: r.best_unsat,
                        steps: r.steps,
                        steps_to_best: r.steps_to_best,
                        time_to_best: r.time_to_best,
                        wall_time: r.wall_time,
                    };
                    write!(stdout, "{}", to_jsonl(&[record]))?;
                }
                OutputFormat::Table => {
                    writeln!(stdout, "c solver {kind} scheme {} clause-sel {}", params.scheme, params.clause_selection)?;
                    writeln!(
                        stdout,
                        "c steps {} time {:.3}s best-at-step {} best-at {:.3}s flips/s {:.0}",
                        r.steps, r.wall_time, r.steps_to_best, r.time_to_best, r.flips_per_second
                    )?;
                    writeln!(stdout, "o {}", r.best_unsat)?;
                    let lits: Vec<String> = r
                        .best_assignment
                        .values()
                        .iter()
                        .enumerate()
                        .map(|(i, &b)| if b { format!("{}", i + 1) } else { format!("-{}", i + 1) })
                        .collect();
                    writeln!(stdout, "v {} 0", lits.join(" "))?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { paths, solver, runs, optima, format, workers, records } => {
            let mut cfg = solver.config();
            cfg.paths = paths;
            cfg.runs = runs;
            cfg.optima = optima;
            if let Some(w) = workers {
                cfg.workers = w;
            }
            let outcome = run_bench(&cfg)?;
            if let Some(path) = records {
                fs::write(&path, to_jsonl(&outcome.records)).with_context(|| format!("writing {}", path.display()))?;
            }
            match format {
                OutputFormat::Jsonl => write!(stdout, "{}", to_jsonl(&outcome.records))?,
                OutputFormat::Table => write!(stdout, "{}", render_table(&summarize(&outcome.records)))?,
            }
            for failure in &outcome.failures {
                eprintln!("skipped: {failure}");
            }
            Ok(if outcome.failures.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_PARSE) })
        }
        Command::Report { records } => {
            let file = fs::File::open(&records).with_context(|| format!("opening {}", records.display()))?;
            let recs = read_jsonl(BufReader::new(file)).with_context(|| format!("reading {}", records.display()))?;
            write!(stdout, "{}", render_table(&summarize(&recs)))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen { num_vars, num_clauses, k, seed, count, out } => {
            if count == 0 {
                return Err(ConfigError::NoRuns).context("--count must be at least 1");
            }
            if count == 1 {
                let f = generate(&GenSpec { num_vars, num_clauses, k, seed }).map_err(ConfigError::from)?;
                match out {
                    Some(path) => fs::write(&path, f.to_dimacs()).with_context(|| format!("writing {}", path.display()))?,
                    None => write!(stdout, "{}", f.to_dimacs())?,
                }
                return Ok(ExitCode::SUCCESS);
            }
            let dir = out.context("--out <dir> is required with --count > 1")?;
            fs::create_dir_all(&dir)?;
            for i in 0..count as u64 {
                let spec = GenSpec { num_vars, num_clauses, k, seed: seed + i };
                let f = generate(&spec).map_err(ConfigError::from)?;
                let path = dir.join(format!("v{num_vars}c{num_clauses}-{:03}.cnf", i));
                fs::write(&path, f.to_dimacs())?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Theory { ratios } => {
            writeln!(stdout, "constant-violation threshold ratio: {:.4}", theory::constant_violation_threshold())?;
            writeln!(stdout, "{:>10} {:>10}", "r", "h(r)")?;
            for r in ratios {
                match theory::h_of_r(r) {
                    Ok(h) => writeln!(stdout, "{r:>10.2} {h:>10.5}")?,
                    Err(_) => writeln!(stdout, "{r:>10.2} {:>10}", "-")?,
                }
            }
            let lambda = 0.972;
            let exponent = theory::exponent_per_clause(21.5, lambda)?;
            writeln!(
                stdout,
                "r=21.50 lambda={lambda}: E[X] ~ {:.3}^n, hamming gap {:.4} n",
                (exponent * 21.5).exp2(),
                theory::hamming_gap(21.5, lambda, 1.0)?
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Probe { instance, schemes, seconds, steps, seed } => {
            let formula = load_formula(&instance)?;
            let budget = match steps {
                Some(n) => ProbeBudget::Steps(n),
                None => ProbeBudget::Seconds(seconds),
            };
            writeln!(stdout, "{:>6} {:>12} {:>10} {:>14}", "scheme", "steps", "time (s)", "flips/s")?;
            for scheme in schemes {
                let p = flips_per_second_probe(&formula, scheme, budget, seed);
                writeln!(stdout, "{:>6} {:>12} {:>10.3} {:>14.0}", scheme.name(), p.steps, p.wall_time, p.flips_per_second)?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
