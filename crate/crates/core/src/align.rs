//! Monotone paragraph alignment.
//!
//! Scores pair candidates with a two-component similarity (length ratio
//! plus character-trigram cosine, each in [0,1]) and picks the bead
//! sequence maximizing total score minus shape penalties by dynamic
//! programming. Scores stored on beads are raw similarities; penalties
//! exist only inside the DP objective. The convention that a score of
//! 1.0 separates good pairs from suspect ones is relied on downstream by
//! the corpus pipeline's bead filter.

use serde::Serialize;
use std::collections::BTreeMap;

/// Shape penalties subtracted in the DP objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignConfig {
    /// Penalty for 1-2 and 2-1 beads.
    pub split_penalty: f64,
    /// Penalty for 1-0 and 0-1 beads.
    pub gap_penalty: f64,
}

impl Default for AlignConfig {
    fn default() -> Self {
        AlignConfig {
            split_penalty: 0.25,
            gap_penalty: 0.45,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlignmentBead {
    #[serde(rename = "src")]
    pub src_indices: Vec<usize>,
    #[serde(rename = "tgt")]
    pub tgt_indices: Vec<usize>,
    /// Raw similarity of the joined sides; 0.0 for 1-0/0-1 beads.
    pub score: f64,
}

impl AlignmentBead {
    /// A bead with both sides non-empty carries a meaningful score.
    pub fn is_null(&self) -> bool {
        self.src_indices.is_empty() || self.tgt_indices.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlignmentResult {
    pub beads: Vec<AlignmentBead>,
    /// Mean score of non-null beads; 0.0 when there are none.
    pub average_score: f64,
}

/// A filtered bead materialized as a text pair, sides joined with single
/// spaces. Corpus identifiers are attached by the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPair {
    pub src: String,
    pub tgt: String,
    pub score: f64,
}

fn fold(text: &str) -> Vec<char> {
    text.chars().flat_map(char::to_lowercase).collect()
}

fn trigram_counts(chars: &[char]) -> BTreeMap<(char, char, char), u32> {
    let mut counts = BTreeMap::new();
    for w in chars.windows(3) {
        *counts.entry((w[0], w[1], w[2])).or_insert(0) += 1;
    }
    counts
}

/// Similarity in [0, 2]: length ratio (shorter/longer in characters)
/// plus cosine over case-folded character-trigram counts. Symmetric;
/// equal non-empty strings score exactly 2.0.
pub fn similarity(a: &str, b: &str) -> f64 {
    let fa = fold(a);
    let fb = fold(b);
    if fa.is_empty() && fb.is_empty() {
        return 0.0;
    }
    if fa == fb {
        return 2.0;
    }
    let (min, max) = if fa.len() <= fb.len() {
        (fa.len(), fb.len())
    } else {
        (fb.len(), fa.len())
    };
    let length_ratio = min as f64 / max as f64;
    let ca = trigram_counts(&fa);
    let cb = trigram_counts(&fb);
    let dot: f64 = ca
        .iter()
        .filter_map(|(t, na)| cb.get(t).map(|nb| *na as f64 * *nb as f64))
        .sum();
    let norm = |c: &BTreeMap<(char, char, char), u32>| {
        c.values().map(|n| (*n as f64).powi(2)).sum::<f64>().sqrt()
    };
    let denom = norm(&ca) * norm(&cb);
    let cosine = if denom == 0.0 { 0.0 } else { dot / denom };
    length_ratio + cosine
}

#[derive(Clone, Copy, PartialEq)]
struct Value {
    score: f64,
    /// Count of 1-1 beads, the first tie-breaker.
    ones: u32,
}

const EPS: f64 = 1e-9;

impl Value {
    fn better_than(&self, other: &Value) -> bool {
        if self.score > other.score + EPS {
            return true;
        }
        if self.score >= other.score - EPS {
            return self.ones > other.ones;
        }
        false
    }
}

/// Transition shapes in reconstruction preference order; together with
/// the ones-count tie-breaker this fixes one canonical alignment among
/// equal-objective candidates.
#[derive(Clone, Copy, PartialEq, Debug)]
enum Shape {
    Gap01,
    Gap10,
    OneOne,
    OneTwo,
    TwoOne,
}
const SHAPES: [Shape; 5] = [Shape::Gap01, Shape::Gap10, Shape::OneOne, Shape::OneTwo, Shape::TwoOne];

/// Optimal monotone alignment of `src` against `tgt`.
pub fn align(src: &[String], tgt: &[String], config: &AlignConfig) -> AlignmentResult {
    let n = src.len();
    let m = tgt.len();

    // Candidate similarities, computed once. Joins use a single space,
    // matching how filter_beads materializes them.
    let mut sim11 = vec![vec![0.0; m]; n];
    for i in 0..n {
        for j in 0..m {
            sim11[i][j] = similarity(&src[i], &tgt[j]);
        }
    }
    let mut sim12 = vec![vec![0.0; m.saturating_sub(1)]; n];
    for i in 0..n {
        for j in 0..m.saturating_sub(1) {
            sim12[i][j] = similarity(&src[i], &format!("{} {}", tgt[j], tgt[j + 1]));
        }
    }
    let mut sim21 = vec![vec![0.0; m]; n.saturating_sub(1)];
    for i in 0..n.saturating_sub(1) {
        for j in 0..m {
            sim21[i][j] = similarity(&format!("{} {}", src[i], src[i + 1]), &tgt[j]);
        }
    }

    // dp[i][j] = best value aligning src[i..] with tgt[j..]. The suffix
    // formulation lets reconstruction walk forward, emitting the
    // preference-first transition at every step.
    let mut dp = vec![vec![Value { score: 0.0, ones: 0 }; m + 1]; n + 1];
    let step = |shape: Shape, i: usize, j: usize, dp: &Vec<Vec<Value>>| -> Option<Value> {
        let (di, dj, gain, one) = match shape {
            Shape::Gap01 if j < m => (0, 1, -config.gap_penalty, 0),
            Shape::Gap10 if i < n => (1, 0, -config.gap_penalty, 0),
            Shape::OneOne if i < n && j < m => (1, 1, sim11[i][j], 1),
            Shape::OneTwo if i < n && j + 1 < m => (1, 2, sim12[i][j] - config.split_penalty, 0),
            Shape::TwoOne if i + 1 < n && j < m => (2, 1, sim21[i][j] - config.split_penalty, 0),
            _ => return None,
        };
        let next = dp[i + di][j + dj];
        Some(Value {
            score: gain + next.score,
            ones: one + next.ones,
        })
    };

    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            if i == n && j == m {
                continue;
            }
            let mut best: Option<Value> = None;
            for shape in SHAPES {
                if let Some(v) = step(shape, i, j, &dp) {
                    if best.map_or(true, |b| v.better_than(&b)) {
                        best = Some(v);
                    }
                }
            }
            dp[i][j] = best.expect("at least one transition applies");
        }
    }

    let mut beads = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < n || j < m {
        let here = dp[i][j];
        let chosen = SHAPES
            .into_iter()
            .find(|&s| step(s, i, j, &dp) == Some(here))
            .expect("dp value reachable by some transition");
        let (bead, di, dj) = match chosen {
            Shape::Gap01 => (
                AlignmentBead {
                    src_indices: vec![],
                    tgt_indices: vec![j],
                    score: 0.0,
                },
                0,
                1,
            ),
            Shape::Gap10 => (
                AlignmentBead {
                    src_indices: vec![i],
                    tgt_indices: vec![],
                    score: 0.0,
                },
                1,
                0,
            ),
            Shape::OneOne => (
                AlignmentBead {
                    src_indices: vec![i],
                    tgt_indices: vec![j],
                    score: sim11[i][j],
                },
                1,
                1,
            ),
            Shape::OneTwo => (
                AlignmentBead {
                    src_indices: vec![i],
                    tgt_indices: vec![j, j + 1],
                    score: sim12[i][j],
                },
                1,
                2,
            ),
            Shape::TwoOne => (
                AlignmentBead {
                    src_indices: vec![i, i + 1],
                    tgt_indices: vec![j],
                    score: sim21[i][j],
                },
                2,
                1,
            ),
        };
        beads.push(bead);
        i += di;
        j += dj;
    }

    let scored: Vec<f64> = beads.iter().filter(|b| !b.is_null()).map(|b| b.score).collect();
    let average_score = if scored.is_empty() {
        0.0
    } else {
        scored.iter().sum::<f64>() / scored.len() as f64
    };
    AlignmentResult {
        beads,
        average_score,
    }
}

/// Keep non-null beads scoring at least `threshold`; join grouped sides
/// with single spaces. Gap beads never survive.
pub fn filter_beads(
    result: &AlignmentResult,
    src: &[String],
    tgt: &[String],
    threshold: f64,
) -> Vec<AlignedPair> {
    result
        .beads
        .iter()
        .filter(|b| !b.is_null() && b.score >= threshold)
        .map(|b| AlignedPair {
            src: join(&b.src_indices, src),
            tgt: join(&b.tgt_indices, tgt),
            score: b.score,
        })
        .collect()
}

fn join(indices: &[usize], paragraphs: &[String]) -> String {
    let parts: Vec<&str> = indices.iter().map(|&i| paragraphs[i].as_str()).collect();
    parts.join(" ")
}

/// Edition-level quality: the mean non-null bead score. The pipeline
/// drops edition pairs below its threshold.
pub fn edition_pair_quality(result: &AlignmentResult) -> f64 {
    result.average_score
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn strings(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn similarity_identity_is_exactly_two() {
        assert_eq!(similarity("Ala ma kota", "Ala ma kota"), 2.0);
        assert_eq!(similarity("Ala", "ALA"), 2.0);
        assert_eq!(similarity("ab", "ab"), 2.0);
    }

    #[test]
    fn similarity_degenerate_cases() {
        assert_eq!(similarity("abc", ""), 0.0);
        assert_eq!(similarity("", ""), 0.0);
    }

    #[test]
    fn similarity_close_variants_score_high() {
        // 11 trigrams per side, 8 shared, all counts 1: cosine 8/11.
        let s = similarity("decyzya padła", "decyzja padła");
        assert!((s - (1.0 + 8.0 / 11.0)).abs() < 1e-9, "{s}");
        assert!(s > 1.5);
    }

    #[test]
    fn similarity_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let lexicon = ["kot", "pies", "dom", "las", "rzeka", "głowa"];
        for _ in 0..50 {
            let mk = |rng: &mut ChaCha8Rng| {
                let k = rng.gen_range(0..5);
                (0..k)
                    .map(|_| *lexicon.choose(rng).unwrap())
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let a = mk(&mut rng);
            let b = mk(&mut rng);
            assert_eq!(similarity(&a, &b), similarity(&b, &a));
        }
    }

    #[test]
    fn identical_lists_align_one_to_one() {
        let pars = strings(&["Pierwszy akapit o kocie.", "Drugi akapit o psie.", "Trzeci, zupełnie inny."]);
        let result = align(&pars, &pars, &AlignConfig::default());
        assert_eq!(result.beads.len(), 3);
        for (k, bead) in result.beads.iter().enumerate() {
            assert_eq!(bead.src_indices, vec![k]);
            assert_eq!(bead.tgt_indices, vec![k]);
            assert_eq!(bead.score, 2.0);
        }
        assert_eq!(result.average_score, 2.0);
    }

    #[test]
    fn empty_inputs() {
        let cfg = AlignConfig::default();
        let empty: Vec<String> = vec![];
        let one = strings(&["Cokolwiek tu stoi."]);
        let r = align(&empty, &empty, &cfg);
        assert!(r.beads.is_empty());
        assert_eq!(r.average_score, 0.0);
        let r = align(&empty, &one, &cfg);
        assert_eq!(r.beads.len(), 1);
        assert!(r.beads[0].src_indices.is_empty());
        assert_eq!(r.beads[0].tgt_indices, vec![0]);
        assert_eq!(r.average_score, 0.0);
    }

    #[test]
    fn concatenated_target_recovers_split_bead() {
        let a = "Zupełnie osobne zdanie wstępne o wiośnie.";
        let b = "Potem nadeszła długa zima i mróz trzymał.";
        let c = "Na koniec przyszła odwilż, całkiem nagła.";
        let src = vec![a.to_string(), format!("{b} {c}")];
        let tgt = strings(&[a, b, c]);
        let result = align(&src, &tgt, &AlignConfig::default());
        assert_eq!(result.beads.len(), 2);
        assert_eq!(result.beads[0].src_indices, vec![0]);
        assert_eq!(result.beads[0].tgt_indices, vec![0]);
        assert_eq!(result.beads[1].src_indices, vec![1]);
        assert_eq!(result.beads[1].tgt_indices, vec![1, 2]);
        assert_eq!(result.beads[1].score, 2.0);
    }

    /// Every monotone bead sequence, scored directly.
    fn brute_force_best(src: &[String], tgt: &[String], cfg: &AlignConfig) -> f64 {
        fn go(src: &[String], tgt: &[String], i: usize, j: usize, acc: f64, best: &mut f64, cfg: &AlignConfig) {
            if i == src.len() && j == tgt.len() {
                if acc > *best {
                    *best = acc;
                }
                return;
            }
            if j < tgt.len() {
                go(src, tgt, i, j + 1, acc - cfg.gap_penalty, best, cfg);
            }
            if i < src.len() {
                go(src, tgt, i + 1, j, acc - cfg.gap_penalty, best, cfg);
            }
            if i < src.len() && j < tgt.len() {
                let s = similarity(&src[i], &tgt[j]);
                go(src, tgt, i + 1, j + 1, acc + s, best, cfg);
            }
            if i < src.len() && j + 1 < tgt.len() {
                let s = similarity(&src[i], &format!("{} {}", tgt[j], tgt[j + 1]));
                go(src, tgt, i + 1, j + 2, acc + s - cfg.split_penalty, best, cfg);
            }
            if i + 1 < src.len() && j < tgt.len() {
                let s = similarity(&format!("{} {}", src[i], src[i + 1]), &tgt[j]);
                go(src, tgt, i + 2, j + 1, acc + s - cfg.split_penalty, best, cfg);
            }
        }
        let mut best = f64::NEG_INFINITY;
        go(src, tgt, 0, 0, 0.0, &mut best, cfg);
        best
    }

    fn objective(result: &AlignmentResult, cfg: &AlignConfig) -> f64 {
        result
            .beads
            .iter()
            .map(|b| match (b.src_indices.len(), b.tgt_indices.len()) {
                (1, 1) => b.score,
                (1, 2) | (2, 1) => b.score - cfg.split_penalty,
                _ => -cfg.gap_penalty,
            })
            .sum()
    }

    #[test]
    fn dp_matches_brute_force_on_small_cases() {
        let pool = strings(&[
            "Ranek wstał nad rzeką mglisty i cichy.",
            "Kowal bił młotem aż iskry szły snopami.",
            "Dziewczyna niosła dzban pełen zimnej wody.",
            "Stary pies spał w cieniu pod płotem.",
            "Wozy skrzypiały na gościńcu od świtu.",
            "W sadzie pachniały dojrzałe jabłka.",
        ]);
        let cfg = AlignConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..40 {
            let n = rng.gen_range(0..=4);
            let m = rng.gen_range(0..=4);
            let src: Vec<String> = (0..n).map(|_| pool.choose(&mut rng).unwrap().clone()).collect();
            let tgt: Vec<String> = (0..m).map(|_| pool.choose(&mut rng).unwrap().clone()).collect();
            let result = align(&src, &tgt, &cfg);
            let dp_obj = objective(&result, &cfg);
            let bf_obj = brute_force_best(&src, &tgt, &cfg);
            assert!((dp_obj - bf_obj).abs() < 1e-9, "dp {dp_obj} vs brute {bf_obj}");
        }
    }

    #[test]
    fn coverage_and_monotonicity_hold() {
        let pool = strings(&[
            "Jedno zdanie zupełnie zwyczajne.",
            "Drugie zdanie odrobinę dłuższe od pierwszego.",
            "Trzecie o rzece, moście i przewoźniku.",
            "Czwarte wspomina o jesiennym deszczu.",
        ]);
        let cfg = AlignConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..30 {
            let n = rng.gen_range(0..=4);
            let m = rng.gen_range(0..=4);
            let src: Vec<String> = (0..n).map(|_| pool.choose(&mut rng).unwrap().clone()).collect();
            let tgt: Vec<String> = (0..m).map(|_| pool.choose(&mut rng).unwrap().clone()).collect();
            let result = align(&src, &tgt, &cfg);
            let src_flat: Vec<usize> = result.beads.iter().flat_map(|b| b.src_indices.clone()).collect();
            let tgt_flat: Vec<usize> = result.beads.iter().flat_map(|b| b.tgt_indices.clone()).collect();
            assert_eq!(src_flat, (0..n).collect::<Vec<_>>());
            assert_eq!(tgt_flat, (0..m).collect::<Vec<_>>());
        }
    }

    fn random_paragraph(rng: &mut ChaCha8Rng, lexicon: &[&str]) -> String {
        let len = rng.gen_range(6..=12);
        (0..len)
            .map(|_| *lexicon.choose(rng).unwrap())
            .collect::<Vec<_>>()
            .join(" ")
    }

    #[test]
    fn identity_recovery_on_random_distinct_lists() {
        let lexicon = [
            "szlachcic", "karczma", "gościniec", "podwórze", "czeladź", "jarmark",
            "powiat", "klasztor", "młyn", "przysiółek", "bór", "mokradło",
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..20 {
            let n = rng.gen_range(1..=8);
            let mut pars = Vec::new();
            while pars.len() < n {
                let p = random_paragraph(&mut rng, &lexicon);
                if !pars.contains(&p) {
                    pars.push(p);
                }
            }
            let result = align(&pars, &pars, &AlignConfig::default());
            assert_eq!(result.beads.len(), n);
            assert!(result.beads.iter().enumerate().all(|(k, b)| {
                b.src_indices == vec![k] && b.tgt_indices == vec![k] && b.score == 2.0
            }));
        }
    }

    #[test]
    fn split_recovery_rate_is_high() {
        let lexicon = [
            "wieczór", "zmierzch", "ognisko", "opowieść", "wędrowiec", "gospoda",
            "świeca", "okiennica", "piwnica", "strych", "komora", "sień",
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let trials = 100;
        let mut recovered = 0;
        for _ in 0..trials {
            let n = rng.gen_range(4..=8);
            let mut tgt = Vec::new();
            while tgt.len() < n {
                let p = random_paragraph(&mut rng, &lexicon);
                if !tgt.contains(&p) {
                    tgt.push(p);
                }
            }
            let k = rng.gen_range(0..n - 1);
            let mut src = Vec::new();
            let mut idx = 0;
            while idx < n {
                if idx == k {
                    src.push(format!("{} {}", tgt[idx], tgt[idx + 1]));
                    idx += 2;
                } else {
                    src.push(tgt[idx].clone());
                    idx += 1;
                }
            }
            let result = align(&src, &tgt, &AlignConfig::default());
            if result
                .beads
                .iter()
                .any(|b| b.tgt_indices == vec![k, k + 1] && b.src_indices.len() == 1)
            {
                recovered += 1;
            }
        }
        assert!(recovered >= 95, "recovered {recovered}/{trials}");
    }

    #[test]
    fn filter_beads_keeps_qualifying_beads_only() {
        let result = AlignmentResult {
            beads: vec![
                AlignmentBead {
                    src_indices: vec![0],
                    tgt_indices: vec![0],
                    score: 2.0,
                },
                AlignmentBead {
                    src_indices: vec![1],
                    tgt_indices: vec![],
                    score: 0.0,
                },
                AlignmentBead {
                    src_indices: vec![2],
                    tgt_indices: vec![1, 2],
                    score: 1.4,
                },
                AlignmentBead {
                    src_indices: vec![3],
                    tgt_indices: vec![3],
                    score: 0.4,
                },
            ],
            average_score: 0.0,
        };
        let src = strings(&["s0", "s1", "s2", "s3"]);
        let tgt = strings(&["t0", "t1", "t2", "t3"]);
        let pairs = filter_beads(&result, &src, &tgt, 1.0);
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].src, "s0");
        assert_eq!(pairs[0].tgt, "t0");
        assert_eq!(pairs[1].src, "s2");
        assert_eq!(pairs[1].tgt, "t1 t2");
        assert_eq!(pairs[1].score, 1.4);
    }

    #[test]
    fn unrelated_texts_stay_below_the_edition_gate() {
        // Disjoint vocabularies and varied lengths: the trigram cosine is
        // near zero and the length component alone cannot reach the 0.9
        // edition threshold on average.
        let lex_a = ["belfer", "kałamarz", "bakałarz", "pergamin", "inkaust", "lektyka"];
        let lex_b = ["parowóz", "semafor", "zwrotnica", "peron", "konduktor", "lokomotywa"];
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let mk = |rng: &mut ChaCha8Rng, lex: &[&str]| {
            let len = rng.gen_range(3..=18);
            (0..len)
                .map(|_| *lex.choose(rng).unwrap())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let src: Vec<String> = (0..12).map(|_| mk(&mut rng, &lex_a)).collect();
        let tgt: Vec<String> = (0..12).map(|_| mk(&mut rng, &lex_b)).collect();
        let result = align(&src, &tgt, &AlignConfig::default());
        let quality = edition_pair_quality(&result);
        assert!(quality < 1.2, "quality {quality}");
    }
}
