use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pradius::harness::{self, run_suite_with_threads, Report, SharpnessParams, SuiteConfig};
use pradius::laws::{self, evaluate_law, LawCheck, LawInput};
use pradius::{omega, schatten, ComplexMatrix, MatrixKind, OptimizerConfig, PNorm};

#[derive(Parser)]
#[command(name = "pradius", version, about = "Schatten norms, the Schatten p-numerical radius, and a law verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Copy)]
struct OptimizerArgs {
    /// Certificate width for each radius evaluation.
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    /// Evaluation budget for each radius evaluation.
    #[arg(long, default_value_t = 200_000)]
    max_evals: usize,
}

impl OptimizerArgs {
    fn config(self) -> OptimizerConfig {
        OptimizerConfig {
            eps: self.eps,
            max_evals: self.max_evals,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the Schatten p-norm of a matrix.
    Norm {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        p: PNorm,
    },
    /// Print the certified Schatten p-numerical radius of a matrix.
    Radius {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        p: PNorm,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Check one law on seeded random trials, one regenerated trial, or explicit inputs.
    Check {
        #[arg(long)]
        law: String,
        #[arg(long)]
        p: PNorm,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Regenerate a single trial from its recorded seed.
        #[arg(long, requires = "kind", conflicts_with = "input")]
        trial_seed: Option<u64>,
        #[arg(long)]
        kind: Option<MatrixKind>,
        /// Block grid for the block-partition laws.
        #[arg(long)]
        grid: Option<usize>,
        /// Input matrix file; repeat once per law argument.
        #[arg(long)]
        input: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Run a seeded trial suite over the catalog.
    Suite {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Worker threads; 0 uses all cores.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Hill-climb towards inputs of minimal slack for an inequality law.
    Sharpness {
        #[arg(long)]
        law: String,
        #[arg(long)]
        p: PNorm,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// List the law catalog.
    Laws,
}

/// Usage and input errors; reported with exit code 2.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

/// `writeln!` into the output buffer.
macro_rules! say {
    ($out:expr, $($arg:tt)*) => {{
        use std::fmt::Write as _;
        writeln!($out, $($arg)*).expect("writing to a String cannot fail")
    }};
}

type CliResult = Result<bool, UsageError>;

fn read_matrix(path: &Path) -> Result<ComplexMatrix, UsageError> {
    let text = fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    ComplexMatrix::from_json_str(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), UsageError> {
    fs::write(path, contents).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn find_law(id: &str) -> Result<&'static laws::Law, UsageError> {
    laws::find_law(id).map_err(|e| UsageError(format!("--law: {e}")))
}

/// Separates a missed certificate (exit 1) from usage errors (exit 2).
fn certified<T>(r: pradius::Result<T>, out: &mut String) -> Result<Option<T>, UsageError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e @ pradius::Error::Uncertified { .. }) => {
            say!(out, "uncertified: {e}");
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

fn print_check(out: &mut String, check: &LawCheck) {
    say!(out, "law {} p {} verdict {}", check.law_id, check.p, check.verdict);
    say!(out, "slack {:e}", check.slack);
    say!(out, "eps_budget {:e}", check.eps_budget);
    for s in &check.sides {
        say!(out, "  {} = {} (+{:e})", s.name, s.value, s.width);
    }
}

fn print_report(out: &mut String, report: &Report) {
    for law in &report.laws {
        let t = &law.tally;
        say!(out, 
            "{:<9} {:>5} trials {:>5} pass {:>4} fail {:>4} uncertified {:>4} witnesses  min slack {}",
            law.law_id.as_str(),
            t.trials,
            t.passes,
            t.failures,
            t.uncertified,
            t.equality_witnesses,
            t.min_slack.map_or("-".into(), |s| format!("{s:.3e}")),
        );
        if law.exploratory > 0 {
            say!(out, 
                "{:<9} {:>5} exploratory checks, {} outside the statement",
                "", law.exploratory, law.exploratory_violations
            );
        }
    }
    for f in &report.failures {
        let what = match (&f.check, &f.message) {
            (Some(c), _) => format!("slack {:e} budget {:e}", c.slack, c.eps_budget),
            (None, Some(m)) => m.clone(),
            (None, None) => String::new(),
        };
        say!(out, "{:?} {} {}: {}", f.outcome, f.law_id, what, f.reproduce);
    }
}

/// Runs one command, appending its standard output to `out`.
fn run(cli: Cli, out: &mut String) -> CliResult {
    match cli.command {
        Command::Norm { input, p } => {
            let a = read_matrix(&input)?;
            say!(out, "{}", schatten(&a, p)?);
            Ok(true)
        }
        Command::Radius { input, p, opt } => {
            let a = read_matrix(&input)?;
            let Some(r) = certified(omega(&a, p, &opt.config()), out)? else {
                return Ok(false);
            };
            say!(out, "value {}", r.value);
            say!(out, "eps {:e}", r.eps);
            say!(out, "arg {}", r.arg);
            say!(out, "evals {}", r.evals);
            Ok(true)
        }
        Command::Check {
            law,
            p,
            dim,
            trials,
            seed,
            trial_seed,
            kind,
            grid,
            input,
            out: out_path,
            opt,
        } => {
            let law = find_law(&law)?;
            let cfg = opt.config();
            cfg.validate()?;
            if !law.p_domain.contains(p) {
                return Err(UsageError(format!("--p: law {} is asserted on p in {}, got {p}", law.id, law.p_domain)));
            }
            if !input.is_empty() || trial_seed.is_some() {
                let check = if input.is_empty() {
                    let trial_seed = trial_seed.expect("checked above");
                    let kind = kind.expect("required by --trial-seed");
                    let inputs = harness::trial_inputs(law, kind, dim, trial_seed, grid)?;
                    let Some(mut check) = certified(evaluate_law(law, &inputs, p, &cfg), out)? else {
                        return Ok(false);
                    };
                    check.input = laws::InputDescriptor::Generated {
                        kind,
                        dim,
                        trial_seed,
                        grid,
                    };
                    check
                } else {
                    let matrices = input.iter().map(|f| read_matrix(f)).collect::<Result<Vec<_>, _>>()?;
                    let mut inputs = LawInput::new(matrices);
                    if let Some(g) = grid {
                        inputs = inputs.with_grid(g);
                    }
                    match certified(evaluate_law(law, &inputs, p, &cfg), out).map_err(|e| UsageError(format!("--input: {}", e.0)))? {
                        Some(check) => check,
                        None => return Ok(false),
                    }
                };
                print_check(out, &check);
                if let Some(path) = out_path {
                    write_file(&path, &serde_json::to_string_pretty(&check)?)?;
                }
                return Ok(check.verdict.passed());
            }
            let suite = SuiteConfig {
                p_grid: vec![p],
                dims: vec![dim],
                trials,
                master_seed: seed,
                optimizer: cfg,
                laws: Some(vec![law.id]),
                ..SuiteConfig::default()
            };
            let report = harness::run_suite(&suite)?;
            print_report(out, &report);
            if let Some(path) = out_path {
                write_file(&path, &report.to_json_pretty())?;
            }
            Ok(report.all_passed())
        }
        Command::Suite {
            config,
            out: out_path,
            csv,
            threads,
        } => {
            let cfg = match config {
                Some(path) => {
                    let text = fs::read_to_string(&path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
                    SuiteConfig::from_json_str(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))?
                }
                None => SuiteConfig::default(),
            };
            let report = run_suite_with_threads(&cfg, threads)?;
            print_report(out, &report);
            if let Some(path) = out_path {
                write_file(&path, &report.to_json_pretty())?;
            }
            if let Some(path) = csv {
                write_file(&path, &report.to_csv())?;
            }
            Ok(report.all_passed())
        }
        Command::Sharpness {
            law,
            p,
            dim,
            restarts,
            steps,
            seed,
            out: out_path,
            opt,
        } => {
            let law = find_law(&law)?;
            let params = SharpnessParams {
                law: law.id,
                p,
                dim,
                restarts,
                steps,
                master_seed: seed,
                optimizer: opt.config(),
                start: None,
            };
            let Some(result) = certified(harness::sharpness_search(&params), out)? else {
                return Ok(false);
            };
            say!(out, 
                "best from restart {} after {} accepted steps ({} evaluations)",
                result.restart, result.accepted_steps, result.evaluations
            );
            print_check(out, &result.best);
            if let Some(path) = out_path {
                write_file(&path, &serde_json::to_string_pretty(&result)?)?;
            }
            Ok(result.best.verdict.passed())
        }
        Command::Laws => {
            for law in laws::list_laws() {
                let kind = if law.is_equality() { "equality" } else { "inequality" };
                say!(out, "{}\t{}\tp in {}\t{}", law.id, kind, law.p_domain, law.anchor);
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = run(cli, &mut out);
    // a closed pipe downstream is not an error worth reporting
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
