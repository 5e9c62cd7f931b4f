use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

mod run;

#[derive(Parser, Debug)]
#[command(
    name = "moframe",
    version,
    about = "Fiber-preserving invariants of u''' = F(x, u, p, q)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Invariants of one or more equations at sampled points
    Invariants(Common),
    /// One row per equation of a corpus
    Classify(Common),
    /// Compare two equations, optionally with a candidate map
    Equivalent {
        #[command(flatten)]
        common: Common,
        /// X = ξ(x) taking the first equation to the second
        #[arg(long, requires = "hint_phi")]
        hint_xi: Option<String>,
        /// U = φ(x, u)
        #[arg(long, requires = "hint_xi")]
        hint_phi: Option<String>,
    },
    /// Run the verification suites
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = OutFormat::Text)]
        format: OutFormat,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// right-hand side F; `name: F` also accepted
    #[arg(long)]
    ode: Vec<String>,
    /// corpus file, one `name: F` per line
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// longest invariant word; 4 adds the generic-branch invariants
    #[arg(long, default_value_t = 4)]
    order: usize,
    #[arg(long, value_enum, default_value_t = RunMode::Pointwise)]
    mode: RunMode,
    #[arg(long, value_enum, default_value_t = OutFormat::Text)]
    format: OutFormat,
    /// term cap for symbolic work
    #[arg(long, default_value_t = 20_000)]
    budget: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    Pointwise,
    Symbolic,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutFormat {
    Text,
    Json,
    Latex,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Determining,
    GroupLaw,
    Structure,
    Recurrence,
    All,
}

/// Failure with its exit code.
#[derive(Debug)]
pub enum Fail {
    Verification(String),
    Input(String),
    Budget(String),
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Verification(_) => 1,
            Fail::Input(_) => 2,
            Fail::Budget(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Fail::Verification(m) | Fail::Input(m) | Fail::Budget(m) => m,
        }
    }
}

fn config_json(command: &str, c: &Common) -> Value {
    json!({
        "command": command,
        "points": c.points,
        "seed": c.seed,
        "order": c.order,
        "mode": format!("{:?}", c.mode).to_lowercase(),
        "budget": c.budget,
    })
}

fn envelope(config: Value, results: Value, suites: Value) -> Value {
    json!({
        "tool-version": env!("CARGO_PKG_VERSION"),
        "typo-ledger-version": moframe::typos::version(),
        "config": config,
        "results": results,
        "suite-residuals": suites,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (format, out) = match cli.command {
        Command::Invariants(c) => (
            c.format,
            run::invariants(&c)
                .map(|(r, ok)| (envelope(config_json("invariants", &c), r, json!([])), ok)),
        ),
        Command::Classify(c) => (
            c.format,
            run::classify(&c)
                .map(|(r, ok)| (envelope(config_json("classify", &c), r, json!([])), ok)),
        ),
        Command::Equivalent {
            common,
            hint_xi,
            hint_phi,
        } => {
            let hint = hint_xi.zip(hint_phi);
            let mut cfg = config_json("equivalent", &common);
            if let Some((x, p)) = &hint {
                cfg["hint"] = json!({"xi": x, "phi": p});
            }
            (
                common.format,
                run::equivalent(&common, hint.as_ref())
                    .map(|(r, ok)| (envelope(cfg, r, json!([])), ok)),
            )
        }
        Command::Verify {
            suite,
            seed,
            format,
        } => {
            let cfg = json!({"command": "verify", "suite": format!("{suite:?}").to_lowercase(), "seed": seed});
            (
                format,
                run::verify(suite, seed).map(|(s, ok)| (envelope(cfg, json!([]), s), ok)),
            )
        }
    };
    match out {
        Ok((report, ok)) => {
            print!("{}", run::emit(&report, format));
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
