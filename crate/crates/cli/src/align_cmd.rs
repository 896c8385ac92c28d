use crate::util::{self, Failure};
use clap::Args;
use diachron_core::corpus::formats::{beads_to_jsonl, paragraphs_from_lines};
use diachron_core::{align, AlignConfig};
use std::path::{Path, PathBuf};

#[derive(Args, Debug)]
pub struct AlignArgs {
    /// Historical paragraphs, one per line (tabs/newlines escaped).
    pub src: PathBuf,
    /// Contemporary paragraphs, same format.
    pub tgt: PathBuf,
    /// Output beads JSONL, `-` for stdout.
    #[arg(short, long, default_value = "-")]
    pub output: PathBuf,
    /// Penalty for 1-2 and 2-1 beads.
    #[arg(long, default_value_t = 0.25)]
    pub split_penalty: f64,
    /// Penalty for 1-0 and 0-1 beads.
    #[arg(long, default_value_t = 0.45)]
    pub gap_penalty: f64,
}

fn read_paragraphs(path: &Path) -> Result<Vec<String>, Failure> {
    let text = util::read_input(path)?;
    paragraphs_from_lines(&text)
        .map_err(|e| util::validation(format!("{}: {e}", path.display())))
}

pub fn run(args: &AlignArgs) -> Result<(), Failure> {
    let src = read_paragraphs(&args.src)?;
    let tgt = read_paragraphs(&args.tgt)?;
    let config = AlignConfig {
        split_penalty: args.split_penalty,
        gap_penalty: args.gap_penalty,
    };
    let result = align(&src, &tgt, &config);
    util::write_output(&args.output, &beads_to_jsonl(&result))
}
