use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

use commands::{Failure, ParseOptions, TableFormat, ValueFormat, MAX_DERIVATIONS_VAR};

/// Checks, normalizes and tabulates XML grammars, and parses documents with them.
#[derive(Parser)]
#[command(name = "xmlgram", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, well-formedness, normalization and LL(1) checks.
    Check { grammar: PathBuf },
    /// Print the predict table of the normalized grammar.
    Tables {
        grammar: PathBuf,
        #[arg(long, value_enum, default_value_t = TableArg::Text)]
        format: TableArg,
    },
    /// Print the grammar in normal form.
    Normalize { grammar: PathBuf },
    /// Parse a document and print the synthesized value.
    Parse {
        grammar: PathBuf,
        /// Start rule; defaults to the first rule of the grammar.
        #[arg(long)]
        start: Option<String>,
        document: PathBuf,
        #[arg(long, value_enum, default_value_t = ValueArg::Term)]
        format: ValueArg,
        /// Use the exhaustive reference interpreter instead of the predictive engine.
        #[arg(long)]
        oracle: bool,
        /// Keep whitespace-only text between elements.
        #[arg(long)]
        keep_whitespace: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TableArg {
    Text,
    Kv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ValueArg {
    Term,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check { grammar } => commands::check(grammar),
        Command::Tables { grammar, format } => {
            let format = match format {
                TableArg::Text => TableFormat::Text,
                TableArg::Kv => TableFormat::Kv,
            };
            commands::tables(grammar, format)
        }
        Command::Normalize { grammar } => commands::normalize(grammar),
        Command::Parse { grammar, start, document, format, oracle, keep_whitespace } => {
            let opts = ParseOptions {
                start: start.as_deref(),
                format: match format {
                    ValueArg::Term => ValueFormat::Term,
                    ValueArg::Json => ValueFormat::Json,
                },
                oracle: *oracle,
                keep_whitespace: *keep_whitespace,
                max_derivations: std::env::var(MAX_DERIVATIONS_VAR).ok(),
            };
            commands::parse(grammar, document, &opts)
        }
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure { code, messages, output }) => {
            print!("{output}");
            let _ = std::io::stdout().flush();
            for m in messages {
                eprintln!("error: {m}");
            }
            ExitCode::from(code)
        }
    }
}
