use crate::util::{self, Failure};
use clap::Args;
use diachron_core::corpus::formats::{
    pairs_from_tsv, predictions_from_jsonl, variant_manifest_from_json, VariantManifest,
};
use diachron_core::metrics::{render_table, EvalMeta, EvalReport, TableRow};
use diachron_core::{
    evaluate, identity_normalize, memorizer_normalize, train_memorizer, ParagraphPair, RuleSet,
};
use std::collections::HashMap;
use std::path::PathBuf;

#[derive(clap::ValueEnum, Clone, Copy, PartialEq, Debug)]
pub enum Builtin {
    Transducers,
    Identity,
    Memorizer,
}

impl Builtin {
    fn name(self) -> &'static str {
        match self {
            Builtin::Transducers => "Transducers",
            Builtin::Identity => "Identity",
            Builtin::Memorizer => "Memorizer",
        }
    }
}

const ALL_BUILTINS: [Builtin; 3] = [Builtin::Transducers, Builtin::Identity, Builtin::Memorizer];

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Variant manifest JSON; repeat to evaluate several variants.
    #[arg(long = "variant", required = true, num_args = 1)]
    pub variants: Vec<PathBuf>,
    /// Pair corpus TSV the manifests refer into.
    #[arg(long)]
    pub pairs: PathBuf,
    /// Built-in system to run; repeatable. All three when neither
    /// --system nor --predictions is given.
    #[arg(long = "system")]
    pub systems: Vec<Builtin>,
    /// External predictions as NAME=PATH, JSONL of {pair_id,
    /// hypothesis}; repeatable, single --variant only.
    #[arg(long = "predictions")]
    pub predictions: Vec<String>,
    /// Ruleset for the transducers system; built-in when absent.
    #[arg(long)]
    pub ruleset: Option<PathBuf>,
    /// Write the full JSON report (per-pair records included) here.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

fn resolve<'a>(
    ids: &[String],
    by_id: &'a HashMap<&str, &ParagraphPair>,
    manifest: &VariantManifest,
    split: &str,
) -> Result<Vec<ParagraphPair>, Failure> {
    ids.iter()
        .map(|id| {
            by_id.get(id.as_str()).map(|p| (*p).clone()).ok_or_else(|| {
                util::validation(format!(
                    "variant {}: {split} pair '{id}' not found in the corpus",
                    manifest.variant_id
                ))
            })
        })
        .collect()
}

fn external_hypotheses(
    path: &PathBuf,
    name: &str,
    test: &[ParagraphPair],
) -> Result<Vec<String>, Failure> {
    let text = util::read_input(path)?;
    let predictions = predictions_from_jsonl(&text)
        .map_err(|e| util::validation(format!("{name}: {e}")))?;
    let mut by_id: HashMap<&str, &str> = HashMap::new();
    for p in &predictions {
        if by_id.insert(&p.pair_id, &p.hypothesis).is_some() {
            return Err(util::validation(format!(
                "{name}: duplicate prediction for pair '{}'",
                p.pair_id
            )));
        }
    }
    let test_ids: std::collections::HashSet<&str> =
        test.iter().map(|p| p.pair_id.as_str()).collect();
    for p in &predictions {
        if !test_ids.contains(p.pair_id.as_str()) {
            return Err(util::validation(format!(
                "{name}: prediction for pair '{}' which is not in the test set",
                p.pair_id
            )));
        }
    }
    test.iter()
        .map(|pair| {
            by_id
                .get(pair.pair_id.as_str())
                .map(|h| h.to_string())
                .ok_or_else(|| {
                    util::validation(format!(
                        "{name}: missing prediction for test pair '{}'",
                        pair.pair_id
                    ))
                })
        })
        .collect()
}

fn run_builtin(
    system: Builtin,
    ruleset: &RuleSet,
    train: &[ParagraphPair],
    test: &[ParagraphPair],
) -> (Vec<String>, String) {
    match system {
        Builtin::Transducers => (
            test.iter().map(|p| ruleset.normalize(&p.src)).collect(),
            util::ruleset_stamp(ruleset),
        ),
        Builtin::Identity => (
            test.iter().map(|p| identity_normalize(&p.src)).collect(),
            diachron_core::VERSION.to_string(),
        ),
        Builtin::Memorizer => {
            let table = train_memorizer(train);
            (
                test.iter()
                    .map(|p| memorizer_normalize(&p.src, &table))
                    .collect(),
                diachron_core::VERSION.to_string(),
            )
        }
    }
}

/// Table 1/2 group order: (No,No), (Yes,No), (No,Yes), (Yes,Yes).
fn variant_rank(pruning: bool, separation: bool) -> usize {
    usize::from(separation) * 2 + usize::from(pruning)
}

pub fn run(args: &EvaluateArgs) -> Result<(), Failure> {
    let externals: Vec<(String, PathBuf)> = args
        .predictions
        .iter()
        .map(|spec| {
            spec.split_once('=')
                .map(|(name, path)| (name.to_string(), PathBuf::from(path)))
                .ok_or_else(|| Failure::Io(format!("--predictions wants NAME=PATH, got '{spec}'")))
        })
        .collect::<Result<_, _>>()?;
    if !externals.is_empty() && args.variants.len() > 1 {
        return Err(util::validation(
            "external predictions target one test set; pass a single --variant",
        ));
    }
    let builtins: Vec<Builtin> = if args.systems.is_empty() && externals.is_empty() {
        ALL_BUILTINS.to_vec()
    } else {
        args.systems.clone()
    };

    let ruleset = util::load_ruleset(args.ruleset.as_deref())?;
    let tsv = util::read_input(&args.pairs)?;
    let pairs = pairs_from_tsv(&tsv)
        .map_err(|e| util::validation(format!("{}: {e}", args.pairs.display())))?;
    let by_id: HashMap<&str, &ParagraphPair> =
        pairs.iter().map(|p| (p.pair_id.as_str(), p)).collect();

    let mut entries: Vec<(usize, TableRow, EvalReport)> = Vec::new();
    for manifest_path in &args.variants {
        let manifest_text = util::read_input(manifest_path)?;
        let manifest = variant_manifest_from_json(&manifest_text)
            .map_err(|e| util::validation(format!("{}: {e}", manifest_path.display())))?;
        let test = resolve(&manifest.test, &by_id, &manifest, "test")?;
        let train = resolve(&manifest.train, &by_id, &manifest, "train")?;

        let mut systems: Vec<(String, Vec<String>, String)> = Vec::new();
        for builtin in &builtins {
            let (hyps, version) = run_builtin(*builtin, &ruleset, &train, &test);
            systems.push((builtin.name().to_string(), hyps, version));
        }
        for (name, path) in &externals {
            let hyps = external_hypotheses(path, name, &test)?;
            systems.push((name.clone(), hyps, "external".to_string()));
        }

        for (name, hyps, version) in systems {
            let meta = EvalMeta {
                system: name,
                version,
                variant_id: manifest.variant_id.clone(),
            };
            let report = evaluate(&test, &hyps, meta)
                .map_err(|e| util::validation(e.to_string()))?;
            let row = TableRow {
                method: report.system.clone(),
                pruning: manifest.pruning,
                separation: manifest.separation,
                cer: report.cer,
                wer: report.wer,
            };
            entries.push((variant_rank(manifest.pruning, manifest.separation), row, report));
        }
    }
    entries.sort_by_key(|(rank, ..)| *rank);

    let rows: Vec<TableRow> = entries.iter().map(|(_, row, _)| row.clone()).collect();
    print!("{}", render_table(&rows));
    if let Some(path) = &args.json {
        let reports: Vec<&EvalReport> = entries.iter().map(|(.., report)| report).collect();
        let mut json = serde_json::to_string_pretty(&reports).expect("reports serialize");
        json.push('\n');
        util::write_output(path, &json)?;
    }
    Ok(())
}
