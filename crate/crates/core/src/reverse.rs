//! Historical variant generation for search-time query expansion.
//!
//! The word map inverts into a multimap. Rules flagged INVERTIBLE whose
//! pattern is a flat sequence of literals, capture groups and boundary
//! anchors get a mechanical inverse: the replacement template becomes the
//! pattern (literals escaped, groups reused verbatim) and the pattern
//! pieces become the replacement, groups renumbered by template order.
//! Every candidate must forward-normalize to the query's normal form, so
//! emitted variants are sound even where the inverse overgenerates.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::rules::{
    capitalized, decapitalized, tokenize, PatternPiece, ReplacementTemplate, RewritePattern, Rule,
    RuleSet, TemplatePart,
};

pub const DEFAULT_MAX_VARIANTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvertDiagnostic {
    pub rule_id: String,
    pub reason: String,
}

impl fmt::Display for InvertDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {}: {}", self.rule_id, self.reason)
    }
}

struct InverseRule {
    pattern: RewritePattern,
    template: ReplacementTemplate,
}

fn invert_rule(rule: &Rule) -> Result<InverseRule, String> {
    let pieces = rule
        .pattern
        .invertible_pieces()
        .ok_or_else(|| "pattern contains constructs without a mechanical inverse".to_string())?;

    // Boundary anchors transfer to the inverse; interior ones do not.
    let mut lead = 0;
    while lead < pieces.len() && matches!(pieces[lead], PatternPiece::Anchor(_)) {
        lead += 1;
    }
    let mut trail = pieces.len();
    while trail > lead && matches!(pieces[trail - 1], PatternPiece::Anchor(_)) {
        trail -= 1;
    }
    let body = &pieces[lead..trail];
    if body.iter().any(|p| matches!(p, PatternPiece::Anchor(_))) {
        return Err("anchors sit between literal segments".to_string());
    }

    let group_count = rule.pattern.group_count();
    let order: Vec<usize> = rule
        .template
        .parts()
        .iter()
        .filter_map(|part| match part {
            TemplatePart::Group(index) => Some(*index),
            TemplatePart::Literal(_) => None,
        })
        .collect();
    let mut sorted = order.clone();
    sorted.sort_unstable();
    if sorted != (1..=group_count).collect::<Vec<_>>() {
        return Err("replacement must use each capture group exactly once".to_string());
    }

    let group_sources: BTreeMap<usize, &str> = body
        .iter()
        .filter_map(|piece| match piece {
            PatternPiece::Group { index, source } => Some((*index, source.as_str())),
            _ => None,
        })
        .collect();

    let mut inverse_pattern = String::new();
    for piece in &pieces[..lead] {
        if let PatternPiece::Anchor(anchor) = piece {
            inverse_pattern.push_str(anchor);
        }
    }
    for part in rule.template.parts() {
        match part {
            TemplatePart::Literal(text) => inverse_pattern.push_str(&regex::escape(text)),
            TemplatePart::Group(index) => inverse_pattern.push_str(group_sources[index]),
        }
    }
    for piece in &pieces[trail..] {
        if let PatternPiece::Anchor(anchor) = piece {
            inverse_pattern.push_str(anchor);
        }
    }

    let mut inverse_replacement = String::new();
    for piece in body {
        match piece {
            PatternPiece::Literal(text) => {
                for c in text.chars() {
                    if c == '$' {
                        inverse_replacement.push_str("$$");
                    } else {
                        inverse_replacement.push(c);
                    }
                }
            }
            PatternPiece::Group { index, .. } => {
                let renumbered = order.iter().position(|g| g == index).unwrap() + 1;
                inverse_replacement.push_str(&format!("${{{renumbered}}}"));
            }
            PatternPiece::Anchor(_) => unreachable!("anchors excluded from the body"),
        }
    }

    let pattern = RewritePattern::new(&inverse_pattern)
        .map_err(|e| format!("inverse pattern does not compile: {e}"))?;
    let template = ReplacementTemplate::parse(&inverse_replacement)
        .map_err(|e| format!("inverse replacement does not parse: {e}"))?;
    Ok(InverseRule { pattern, template })
}

/// Immutable generator of historical spelling variants.
pub struct VariantGenerator {
    ruleset: RuleSet,
    inverse_map: BTreeMap<String, BTreeSet<String>>,
    inverse_rules: Vec<InverseRule>,
    max_variants: usize,
}

/// Invert a ruleset. Rules flagged INVERTIBLE but outside the invertible
/// shape are skipped and reported.
pub fn invert_ruleset(
    ruleset: &RuleSet,
    max_variants: usize,
) -> (VariantGenerator, Vec<InvertDiagnostic>) {
    assert!(max_variants >= 1, "variant budget must admit the query itself");
    let mut inverse_map: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (token, replacement) in &ruleset.word_map {
        inverse_map
            .entry(replacement.clone())
            .or_default()
            .insert(token.clone());
    }
    let mut inverse_rules = Vec::new();
    let mut diagnostics = Vec::new();
    for rule in &ruleset.rules {
        if !rule.invertible {
            continue;
        }
        match invert_rule(rule) {
            Ok(inverse) => inverse_rules.push(inverse),
            Err(reason) => diagnostics.push(InvertDiagnostic {
                rule_id: rule.id.clone(),
                reason,
            }),
        }
    }
    let generator = VariantGenerator {
        ruleset: ruleset.clone(),
        inverse_map,
        inverse_rules,
        max_variants,
    };
    (generator, diagnostics)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermExpansion {
    pub term: String,
    pub variants: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryExpansion {
    pub expanded: String,
    pub terms: Vec<TermExpansion>,
}

impl VariantGenerator {
    pub fn max_variants(&self) -> usize {
        self.max_variants
    }

    /// Sorted variants of one word: the word itself plus every sound
    /// candidate from the inverse map and single inverse-rule rewrites,
    /// within the budget.
    pub fn historical_variants(&self, word: &str) -> Vec<String> {
        let reference = self.ruleset.normalize_token(word).0;
        let mut candidates: BTreeSet<String> = BTreeSet::new();
        if let Some(hits) = self.inverse_map.get(word) {
            candidates.extend(hits.iter().cloned());
        }
        if let Some(lower) = decapitalized(word) {
            if let Some(hits) = self.inverse_map.get(&lower) {
                candidates.extend(hits.iter().map(|hit| capitalized(hit)));
            }
        }
        for rule in &self.inverse_rules {
            for candidate in rule.pattern.single_applications(word, &rule.template) {
                candidates.insert(candidate);
            }
        }
        candidates.remove(word);

        let mut kept = Vec::new();
        for candidate in candidates {
            if kept.len() + 1 >= self.max_variants {
                break;
            }
            if self.ruleset.normalize_token(&candidate).0 == reference {
                kept.push(candidate);
            }
        }
        kept.push(word.to_string());
        kept.sort();
        kept
    }

    /// Replace each word token with a disjunction of its variants;
    /// separators pass through.
    pub fn expand_query(&self, query: &str) -> QueryExpansion {
        let mut expanded = String::new();
        let mut terms = Vec::new();
        for token in tokenize(query) {
            if token.is_word() {
                let variants = self.historical_variants(&token.text);
                if variants.len() == 1 {
                    expanded.push_str(&variants[0]);
                } else {
                    expanded.push('(');
                    expanded.push_str(&variants.join(" OR "));
                    expanded.push(')');
                }
                terms.push(TermExpansion {
                    term: token.text.clone(),
                    variants,
                });
            } else {
                expanded.push_str(&token.text);
            }
        }
        QueryExpansion { expanded, terms }
    }
}
