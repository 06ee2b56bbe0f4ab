use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use focusgen_cli::{
    cmd_check, cmd_diff, cmd_generate, cmd_operators, cmd_oracle, cmd_simulate, cmd_template, Console, RunConfig,
};

/// Compile component-network models into Focus specifications.
#[derive(Parser)]
#[command(name = "focusgen", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    config: RunConfig,
}

#[derive(Subcommand)]
enum Command {
    /// Write one specification document per component.
    Generate {
        #[arg(required = true)]
        models: Vec<PathBuf>,
    },
    /// Validate models and lint hand-edited `.spec.txt` / `.spec.tex` documents.
    Check {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Run a model on the inputs of a trace file.
    Simulate {
        model: PathBuf,
        /// Input file, one slot per line: `0; x=on; y=off`.
        #[arg(long)]
        inputs: PathBuf,
    },
    /// Check every simulator run up to the horizon against the generated specification.
    Oracle { model: PathBuf },
    /// Compare stored documents with the ones the models generate now.
    Diff {
        #[arg(required = true)]
        models: Vec<PathBuf>,
    },
    /// Print a filled-in template skeleton.
    Template { id: String },
    /// List the operator catalog.
    Operators,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut config = cli.config;
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr().lock());
    let mut con = Console {
        out: &mut out,
        err: &mut err,
    };
    let code = match cli.command {
        Command::Generate { models } => {
            config.inputs = models;
            cmd_generate(&config, &mut con)
        }
        Command::Check { paths } => {
            config.inputs = paths;
            cmd_check(&config, &mut con)
        }
        Command::Simulate { model, inputs } => {
            config.inputs = vec![model];
            cmd_simulate(&config, &inputs, &mut con)
        }
        Command::Oracle { model } => {
            config.inputs = vec![model];
            cmd_oracle(&config, &mut con)
        }
        Command::Diff { models } => {
            config.inputs = models;
            cmd_diff(&config, &mut con)
        }
        Command::Template { id } => cmd_template(&config, &id, &mut con),
        Command::Operators => cmd_operators(&mut con),
    };
    ExitCode::from(code as u8)
}
