//! `jacobi`: run registered verification checks and print their reports.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jacobi_core::verify::{emit_report, run_checks, Format, Params, Status, CHECKS, DEFAULT_SEED};

const EXIT_FAIL: u8 = 1;
const EXIT_INVALID: u8 = 2;

#[derive(Parser)]
#[command(
    name = "jacobi",
    version,
    about = "Exact verification of Jacobi diagram and associator identities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more checks (`all` selects every check).
    Verify {
        /// Check names.
        #[arg(value_name = "CHECK")]
        checks: Vec<String>,
        #[command(flatten)]
        opts: Opts,
    },
    /// Dimension of the degree-`d` chord space on two strands.
    Dims {
        #[arg(long, default_value = "reduced", value_parser = ["chords", "reduced"])]
        space: String,
        #[arg(long)]
        degree: usize,
        #[command(flatten)]
        common: Common,
    },
    /// List registered checks.
    List,
}

#[derive(Args)]
struct Opts {
    #[arg(long)]
    n: Option<usize>,
    /// Rational or `sym`.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Rational or `sym`.
    #[arg(long, allow_hyphen_values = true)]
    lambda1: Option<String>,
    /// Rational or `sym`.
    #[arg(long, allow_hyphen_values = true)]
    lambda2: Option<String>,
    #[arg(long)]
    max_degree: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// grt element (sigma3|sigma5|sigma7|bracket35) or associator (kz4|general5).
    #[arg(long)]
    element: Option<String>,
    /// Weight system (sl2|glN|slN|soN|sp2N).
    #[arg(long)]
    system: Option<String>,
    /// Space for the `dims` check.
    #[arg(long)]
    space: Option<String>,
    /// Degree for the `dims` check.
    #[arg(long)]
    degree: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Enable computations beyond the default budget.
    #[arg(long)]
    deep: bool,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, default_value = "json", value_parser = ["json", "text"])]
    format: String,
}

fn invalid(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_INVALID)
}

fn run(names: Vec<String>, params: Params, common: &Common) -> ExitCode {
    if let Ok(v) = std::env::var("JACOBI_GUARD_BYTES") {
        if v.trim().parse::<usize>().is_err() {
            return invalid(format!(
                "JACOBI_GUARD_BYTES must be a byte count, got `{v}`"
            ));
        }
    }
    if let Err(e) = params.validate() {
        return invalid(e);
    }
    if let Some(k) = common.jobs {
        if k == 0 {
            return invalid("--jobs must be positive");
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
        {
            return invalid(e);
        }
    }
    let format: Format = common.format.parse().expect("validated by clap");
    match run_checks(&names, &params) {
        Ok(reports) => {
            print!("{}", emit_report(&reports, format));
            if reports.iter().any(|r| r.status == Status::Fail) {
                ExitCode::from(EXIT_FAIL)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => invalid(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify { checks, opts } => {
            let params = Params {
                n: opts.n,
                alpha: opts.alpha,
                lambda1: opts.lambda1,
                lambda2: opts.lambda2,
                max_degree: opts.max_degree,
                deep: opts.common.deep,
                seed: opts.seed,
                element: opts.element,
                system: opts.system,
                space: opts.space,
                degree: opts.degree,
            };
            run(checks, params, &opts.common)
        }
        Command::Dims {
            space,
            degree,
            common,
        } => {
            let params = Params {
                space: Some(space),
                degree: Some(degree),
                deep: common.deep,
                ..Params::default()
            };
            run(vec!["dims".into()], params, &common)
        }
        Command::List => {
            for c in CHECKS {
                println!("{c}");
            }
            ExitCode::SUCCESS
        }
    }
}
