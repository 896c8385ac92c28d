//! Diachronic normalization of historical Polish text.
//!
//! The crate bundles an ordered rewrite-rule engine with a word map and
//! exception list, a paragraph aligner and corpus construction pipeline,
//! CER/WER evaluation with reference baselines, and reverse search that
//! expands contemporary queries into historical spelling variants.

pub mod align;
pub mod baselines;
pub mod corpus;
pub mod metrics;
pub mod reverse;
pub mod rules;

pub use align::{align, AlignConfig, AlignedPair, AlignmentBead, AlignmentResult};
pub use baselines::{identity_normalize, memorizer_normalize, train_memorizer, MemorizationTable};
pub use corpus::{
    build_variant, clean_paragraph, extract_paragraphs, match_editions, run_pipeline,
    variant_stats, DatasetVariant, DocumentFormat, Edition, EditionSource, MatchConfig,
    ParagraphPair, PipelineConfig, VariantError,
};
pub use metrics::{cer, evaluate, wer, EvalReport, MetricsError};
pub use reverse::{invert_ruleset, QueryExpansion, VariantGenerator};
pub use rules::{lint_ruleset, tokenize, LintDiagnostic, RuleSet, RulesetError, Token, TokenKind};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
