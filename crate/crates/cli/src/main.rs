mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use daml::model::FrameClass;
use daml::reduction::TranslationMode;

#[derive(Parser)]
#[command(name = "daml", version, about = "Model checker for deontic action model logic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Inputs {
    /// Model document (JSON).
    #[arg(long)]
    pub model: PathBuf,
    /// Action documents, comma-separated, in application order.
    #[arg(long, value_delimiter = ',')]
    pub actions: Vec<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Semantics {
    Strict,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum FirstConjunct {
    Note,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a formula at a world (or globally).
    Check {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        formula: String,
        /// World id; defaults to the model's point.
        #[arg(long)]
        at: Option<String>,
        #[arg(long)]
        global: bool,
        #[arg(long)]
        explain: bool,
        #[arg(long)]
        json: bool,
        #[arg(long, value_enum, default_value = "strict")]
        semantics: Semantics,
        /// Annotate conjuncts that fail at a strict precondition.
        #[arg(long, value_enum)]
        first_conjunct: Option<FirstConjunct>,
    },
    /// Print the product of the model with the action documents.
    Update {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Print expected values of action components.
    Expect {
        #[command(flatten)]
        inputs: Inputs,
        /// Base world whose instance roots the component.
        #[arg(long)]
        at: Option<String>,
        #[arg(long)]
        agent: Option<String>,
        /// Restrict to one trace, e.g. `U.delta;U2.beta`.
        #[arg(long)]
        trace: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Rewrite a formula into the ought-free, diamond-free fragment.
    Translate {
        #[arg(long)]
        formula: String,
        /// Action documents resolving the formula's decision points.
        #[arg(long, value_delimiter = ',')]
        actions: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "standard")]
        mode: ModeArg,
        /// Print every rewrite step with its complexity values.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run the randomized axiom suite.
    Axioms {
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "s5")]
        frame: FrameArg,
        #[arg(long)]
        json: bool,
    },
    /// Run a built-in scenario.
    Scenario {
        name: String,
        #[arg(long)]
        json: bool,
        /// Directory receiving DOT renderings of every model involved.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Render a model, product or submodel as Graphviz DOT.
    ExportDot {
        #[command(flatten)]
        inputs: Inputs,
        /// Render the submodel generated from this world.
        #[arg(long)]
        root: Option<String>,
        /// With `--root`, follow only this agent's relation.
        #[arg(long)]
        agent: Option<String>,
        #[arg(long)]
        no_loops: bool,
    },
    /// Validate a model and action documents.
    Validate {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Standard,
    Literal,
}

impl From<ModeArg> for TranslationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Standard => TranslationMode::Standard,
            ModeArg::Literal => TranslationMode::Literal,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum FrameArg {
    #[value(name = "s5", alias = "S5")]
    S5,
    #[value(name = "kd45", alias = "KD45")]
    Kd45,
}

impl From<FrameArg> for FrameClass {
    fn from(f: FrameArg) -> Self {
        match f {
            FrameArg::S5 => FrameClass::S5,
            FrameArg::Kd45 => FrameClass::KD45,
        }
    }
}

/// Outcome of a command: exit status 0 (holds or success) or 1 (fails).
pub enum Outcome {
    Success,
    Failure,
}

/// Errors caused by the user's input; exit status 2.
pub struct InputError(pub String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn run(cli: Cli) -> Result<Outcome, InputError> {
    match cli.command {
        Command::Check {
            inputs,
            formula,
            at,
            global,
            explain,
            json,
            semantics: Semantics::Strict,
            first_conjunct,
        } => commands::check(&inputs, &formula, at.as_deref(), global, explain, json, first_conjunct.is_some()),
        Command::Update { inputs } => commands::update(&inputs),
        Command::Expect {
            inputs,
            at,
            agent,
            trace,
            json,
        } => commands::expect(&inputs, at.as_deref(), agent.as_deref(), trace.as_deref(), json),
        Command::Translate {
            formula,
            actions,
            mode,
            trace,
            json,
        } => commands::translate(&formula, &actions, mode.into(), trace, json),
        Command::Axioms {
            trials,
            seed,
            frame,
            json,
        } => Ok(commands::axioms(trials, seed, frame.into(), json)),
        Command::Scenario { name, json, dot } => commands::scenario(&name, json, dot.as_deref()),
        Command::ExportDot {
            inputs,
            root,
            agent,
            no_loops,
        } => commands::export_dot(&inputs, root.as_deref(), agent.as_deref(), no_loops),
        Command::Validate { inputs, json } => commands::validate(&inputs, json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(move || run(cli)) {
        Ok(Ok(Outcome::Success)) => ExitCode::SUCCESS,
        Ok(Ok(Outcome::Failure)) => ExitCode::from(1),
        Ok(Err(InputError(message))) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(_) => ExitCode::from(3),
    }
}
