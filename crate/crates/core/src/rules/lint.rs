//! Static and probe-driven ruleset diagnostics.
//!
//! Supports a conservative authoring policy: rules that can match the
//! empty string (rewrite-loop risk), replacement templates referencing
//! groups the pattern does not capture, and rules that can never fire on
//! a probe corpus because an earlier rule always rewrites their matches
//! first.

use super::{tokenize, RuleSet};
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LintDiagnostic {
    /// The pattern admits a zero-width match.
    EmptyMatch { rule_id: String },
    /// The replacement references a group the pattern does not have.
    GroupArity {
        rule_id: String,
        max_reference: usize,
        group_count: usize,
    },
    /// On the probe corpus the rule never fired: every token it matches
    /// in isolation is rewritten out from under it by an earlier rule.
    Shadowed {
        rule_id: String,
        by: String,
        example: String,
    },
}

impl fmt::Display for LintDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LintDiagnostic::EmptyMatch { rule_id } => {
                write!(f, "rule '{rule_id}': pattern can match the empty string")
            }
            LintDiagnostic::GroupArity {
                rule_id,
                max_reference,
                group_count,
            } => write!(
                f,
                "rule '{rule_id}': replacement references group {max_reference} but the pattern captures {group_count}"
            ),
            LintDiagnostic::Shadowed { rule_id, by, example } => write!(
                f,
                "rule '{rule_id}': never fires on the probe corpus; earlier rule '{by}' rewrites its matches (e.g. token '{example}')"
            ),
        }
    }
}

/// Zero-width-match probes. `is_match("")` alone misses patterns that
/// need surrounding context, so short nonempty probes are scanned too.
const EMPTY_PROBES: [&str; 3] = ["", "a", "za"];

pub fn lint_ruleset(ruleset: &RuleSet, probe_corpus: Option<&str>) -> Vec<LintDiagnostic> {
    let mut diagnostics = Vec::new();

    for rule in &ruleset.rules {
        let max_reference = rule.template.max_group();
        if max_reference > rule.pattern.group_count() {
            diagnostics.push(LintDiagnostic::GroupArity {
                rule_id: rule.id.clone(),
                max_reference,
                group_count: rule.pattern.group_count(),
            });
        }
        if EMPTY_PROBES
            .iter()
            .any(|p| rule.pattern.match_spans(p).iter().any(|(s, e)| s == e))
        {
            diagnostics.push(LintDiagnostic::EmptyMatch {
                rule_id: rule.id.clone(),
            });
        }
    }

    if let Some(corpus) = probe_corpus {
        diagnostics.extend(shadowing(ruleset, corpus));
    }
    diagnostics
}

/// For each rule j that matches some raw probe token but never matches
/// its own input state in the pipeline, blame the earliest rule whose
/// rewrite destroyed the match.
fn shadowing(ruleset: &RuleSet, corpus: &str) -> Vec<LintDiagnostic> {
    let n = ruleset.rules.len();
    let tokens: BTreeSet<String> = tokenize(corpus)
        .into_iter()
        .filter(|t| t.is_word())
        .map(|t| t.text)
        .collect();

    let mut fired = vec![false; n];
    let mut matched_raw = vec![false; n];
    // (earlier index, later index) -> example token, first seen.
    let mut blames: Vec<Option<(usize, String)>> = vec![None; n];

    for token in &tokens {
        // states[k] = token after the first k rules.
        let mut states = Vec::with_capacity(n + 1);
        states.push(token.clone());
        for rule in &ruleset.rules {
            let prev = states.last().unwrap();
            states.push(rule.pattern.apply(prev, &rule.template));
        }
        let matches: Vec<Vec<bool>> = ruleset
            .rules
            .iter()
            .map(|r| states.iter().map(|s| r.pattern.is_match(s)).collect())
            .collect();
        for j in 0..n {
            if matches[j][0] {
                matched_raw[j] = true;
            }
            if matches[j][j] {
                fired[j] = true;
            } else if matches[j][0] && blames[j].is_none() {
                // Match existed on the raw token and is gone by rule j's
                // turn; the first state transition that dropped it names
                // the shadowing rule.
                for i in 0..j {
                    if matches[j][i] && !matches[j][i + 1] {
                        blames[j] = Some((i, token.clone()));
                        break;
                    }
                }
            }
        }
    }

    let mut diagnostics = Vec::new();
    for j in 0..n {
        if matched_raw[j] && !fired[j] {
            if let Some((i, example)) = &blames[j] {
                diagnostics.push(LintDiagnostic::Shadowed {
                    rule_id: ruleset.rules[j].id.clone(),
                    by: ruleset.rules[*i].id.clone(),
                    example: example.clone(),
                });
            }
        }
    }
    diagnostics
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::parse_ruleset;

    #[test]
    fn empty_match_is_flagged() {
        let rs = parse_ruleset("RULE\topt\tx?\ty\n").unwrap();
        let diags = lint_ruleset(&rs, None);
        assert_eq!(
            diags,
            vec![LintDiagnostic::EmptyMatch {
                rule_id: "opt".into()
            }]
        );
    }

    #[test]
    fn context_bound_empty_match_is_flagged() {
        let rs = parse_ruleset("RULE\tb\t\\bx?\ty\n").unwrap();
        assert!(lint_ruleset(&rs, None)
            .iter()
            .any(|d| matches!(d, LintDiagnostic::EmptyMatch { .. })));
    }

    #[test]
    fn arity_mismatch_is_flagged() {
        let rs = parse_ruleset("RULE\tr\t(a)(b)\t$3\n").unwrap();
        let diags = lint_ruleset(&rs, None);
        assert_eq!(
            diags,
            vec![LintDiagnostic::GroupArity {
                rule_id: "r".into(),
                max_reference: 3,
                group_count: 2
            }]
        );
    }

    #[test]
    fn shadowed_rule_is_flagged_with_culprit() {
        let rs = parse_ruleset("RULE\tfirst\tab\tx\nRULE\tsecond\tab\ty\n").unwrap();
        let diags = lint_ruleset(&rs, Some("ab abc kot"));
        assert_eq!(
            diags,
            vec![LintDiagnostic::Shadowed {
                rule_id: "second".into(),
                by: "first".into(),
                example: "ab".into()
            }]
        );
    }

    #[test]
    fn firing_rule_is_not_shadowed() {
        // Rule two fires on "cb" even though rule one eats its "ab" match.
        let rs = parse_ruleset("RULE\tone\tab\tx\nRULE\ttwo\t[ac]b\tz\n").unwrap();
        assert!(lint_ruleset(&rs, Some("ab cb")).is_empty());
    }

    #[test]
    fn no_probe_means_no_shadowing_analysis() {
        let rs = parse_ruleset("RULE\tfirst\tab\tx\nRULE\tsecond\tab\ty\n").unwrap();
        assert!(lint_ruleset(&rs, None).is_empty());
    }

    #[test]
    fn builtin_ruleset_is_clean() {
        let rs = crate::rules::RuleSet::builtin();
        assert!(lint_ruleset(&rs, None).is_empty());
        let probe = "decyzya egzystencya teorya Anglja Marjetka jenerał niema \
                     przyczem poczem napewno blizko historyja uledz anti-teza \
                     ziemi dobremi logicznem szyja kot pies";
        assert!(lint_ruleset(&rs, Some(probe)).is_empty());
    }
}
