use crate::util::{self, Failure};
use clap::Args;
use diachron_core::invert_ruleset;
use diachron_core::reverse::DEFAULT_MAX_VARIANTS;
use std::path::PathBuf;

#[derive(Args, Debug)]
pub struct VariantsArgs {
    /// Word or whitespace-separated query to expand.
    pub query: String,
    /// Ruleset file; the built-in Polish ruleset when absent.
    #[arg(long)]
    pub ruleset: Option<PathBuf>,
    /// Variant budget per term, the query form included.
    #[arg(long, default_value_t = DEFAULT_MAX_VARIANTS)]
    pub max: usize,
    /// Output file, `-` for stdout.
    #[arg(short, long, default_value = "-")]
    pub output: PathBuf,
}

pub fn run(args: &VariantsArgs) -> Result<(), Failure> {
    if args.max == 0 {
        return Err(Failure::Io("--max must be at least 1".to_string()));
    }
    let ruleset = util::load_ruleset(args.ruleset.as_deref())?;
    let (generator, diagnostics) = invert_ruleset(&ruleset, args.max);
    for diagnostic in &diagnostics {
        eprintln!("warning: {diagnostic}");
    }
    let expansion = generator.expand_query(&args.query);
    let mut json = serde_json::to_string_pretty(&expansion).expect("expansion serializes");
    json.push('\n');
    util::write_output(&args.output, &json)
}
