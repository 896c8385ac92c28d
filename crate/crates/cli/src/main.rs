//! `diachron`: batch workflows over the diachronic normalization
//! toolkit. One process, one subcommand; all randomness comes from the
//! explicit --seed, and every output file is written atomically.

mod align_cmd;
mod build_cmd;
mod evaluate_cmd;
mod lint_cmd;
mod normalize_cmd;
mod util;
mod variants_cmd;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "diachron",
    version,
    about = "Diachronic normalization of historical Polish text"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rewrite historical text into contemporary spelling.
    Normalize(normalize_cmd::NormalizeArgs),
    /// Align two paragraph files into scored beads.
    Align(align_cmd::AlignArgs),
    /// Build the pair corpus and the four dataset variants.
    Build(build_cmd::BuildArgs),
    /// Score normalization systems on a dataset variant.
    Evaluate(evaluate_cmd::EvaluateArgs),
    /// Expand a search query with historical spelling variants.
    Variants(variants_cmd::VariantsArgs),
    /// Check a ruleset for empty matches, bad group references and
    /// shadowed rules.
    Lint(lint_cmd::LintArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Normalize(args) => normalize_cmd::run(args),
        Command::Align(args) => align_cmd::run(args),
        Command::Build(args) => build_cmd::run(args),
        Command::Evaluate(args) => evaluate_cmd::run(args),
        Command::Variants(args) => variants_cmd::run(args),
        Command::Lint(args) => lint_cmd::run(args),
    };
    if let Err(failure) = result {
        eprintln!("diachron: {failure}");
        std::process::exit(failure.code());
    }
}
