use crate::util::{self, Failure};
use clap::Args;
use std::path::PathBuf;

#[derive(Args, Debug)]
pub struct NormalizeArgs {
    /// Input text file, `-` for stdin.
    #[arg(default_value = "-")]
    pub input: PathBuf,
    /// Output file, `-` for stdout.
    #[arg(short, long, default_value = "-")]
    pub output: PathBuf,
    /// Ruleset file; the built-in Polish ruleset when absent.
    #[arg(long)]
    pub ruleset: Option<PathBuf>,
    /// Write a JSONL trace here: a header record naming the ruleset,
    /// then one record per changed or skipped token.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

pub fn run(args: &NormalizeArgs) -> Result<(), Failure> {
    let ruleset = util::load_ruleset(args.ruleset.as_deref())?;
    let text = util::read_input(&args.input)?;
    let (normalized, trace) = ruleset.normalize_text(&text);
    util::write_output(&args.output, &normalized)?;
    if let Some(path) = &args.trace {
        let mut lines = serde_json::json!({
            "ruleset": trace.ruleset,
            "version": trace.version,
        })
        .to_string();
        lines.push('\n');
        for token in &trace.tokens {
            lines.push_str(&serde_json::to_string(token).expect("trace serializes"));
            lines.push('\n');
        }
        util::write_output(path, &lines)?;
    }
    Ok(())
}
