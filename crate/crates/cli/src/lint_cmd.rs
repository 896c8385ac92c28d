use crate::util::{self, Failure};
use clap::Args;
use diachron_core::lint_ruleset;
use std::path::PathBuf;

#[derive(Args, Debug)]
pub struct LintArgs {
    /// Ruleset file; the built-in Polish ruleset when absent.
    pub ruleset: Option<PathBuf>,
    /// Text file whose tokens are probed for shadowed rules.
    #[arg(long)]
    pub probe: Option<PathBuf>,
}

pub fn run(args: &LintArgs) -> Result<(), Failure> {
    let ruleset = util::load_ruleset(args.ruleset.as_deref())?;
    let probe = match &args.probe {
        Some(path) => Some(util::read_input(path)?),
        None => None,
    };
    let diagnostics = lint_ruleset(&ruleset, probe.as_deref());
    for diagnostic in &diagnostics {
        println!("{diagnostic}");
    }
    if diagnostics.is_empty() {
        println!(
            "ok: {} rule(s), {} map entries, {} exception(s)",
            ruleset.rules.len(),
            ruleset.word_map.len(),
            ruleset.exceptions.len()
        );
        Ok(())
    } else {
        Err(util::validation(format!(
            "{} diagnostic(s)",
            diagnostics.len()
        )))
    }
}
