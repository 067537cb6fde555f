mod bench;
mod commands;
mod error;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "vlrs", version, about = "Variable length rewriting system codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a code spec and print the validation report.
    Validate(ValidateArgs),
    /// Encode a symbol file into a container.
    Encode(EncodeArgs),
    /// Decode a container back into symbols.
    Decode(DecodeArgs),
    /// Build a code from a distribution and print its spec.
    Construct(ConstructArgs),
    /// Entropy, rule chain and mean description length of a code.
    Analyze(AnalyzeArgs),
    /// Simulated zero-bit frequencies of encoded output.
    Bitstats(BitstatsArgs),
    /// Compare constructions on every file of a directory.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct ValidateArgs {
    spec: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct EncodeArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Treat the input as raw bytes; the code must have 256 symbols.
    #[arg(long)]
    byte_alphabet: bool,
    /// Drop the termination bits (suffix-constrained codes only).
    #[arg(long)]
    strip_termination: bool,
}

#[derive(Args, Debug)]
struct DecodeArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Write raw bytes instead of whitespace-separated labels.
    #[arg(long)]
    byte_alphabet: bool,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
struct PdfArgs {
    /// Comma-separated probabilities in alphabet order.
    #[arg(long, value_name = "P1,P2,...")]
    pdf: Option<String>,
    /// Byte distribution of a file (add-one smoothed, 256 symbols).
    #[arg(long, value_name = "FILE")]
    pdf_from: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Construction {
    Huffman,
    Hutucker,
    Lex,
    Mirror,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(value_enum)]
    kind: Construction,
    #[command(flatten)]
    pdf: PdfArgs,
    /// Merge sibling rules after construction.
    #[arg(long)]
    simplify: bool,
    /// Comma-separated symbol labels, or `bytes` for 00..ff.
    #[arg(long)]
    labels: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[arg(long)]
    code: PathBuf,
    #[command(flatten)]
    pdf: PdfArgs,
    /// Also compute the exact expected length of an N-symbol block.
    #[arg(long, value_name = "N")]
    length: Option<usize>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct BitstatsArgs {
    #[arg(long)]
    code: PathBuf,
    /// Distribution the symbols are drawn from.
    #[command(flatten)]
    pdf: PdfArgs,
    /// Distribution the code was designed for (defaults to --pdf).
    #[arg(long, value_name = "P1,P2,...")]
    encode_pdf: Option<String>,
    #[arg(long)]
    length: usize,
    #[arg(long)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum PdfMode {
    Empirical,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum, default_value_t = PdfMode::Empirical)]
    pdf_mode: PdfMode,
    /// Decode every encoding and check it against the file.
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    json: bool,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate(a) => commands::validate(&a),
        Command::Encode(a) => commands::encode(&a),
        Command::Decode(a) => commands::decode(&a),
        Command::Construct(a) => commands::construct(&a),
        Command::Analyze(a) => commands::analyze(&a),
        Command::Bitstats(a) => commands::bitstats(&a),
        Command::Bench(a) => bench::run(&a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(error::EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
