//! Acceptance checks, one test per criterion. Each prints a PASS line
//! and enforces its own runtime budget where one is declared.

use diachron_core::corpus::formats::{variant_manifest_json, VariantManifest};
use diachron_core::corpus::variant_stats;
use diachron_core::metrics::{edit_distance, evaluate, EvalMeta};
use diachron_core::{
    align, build_variant, cer, identity_normalize, invert_ruleset, lint_ruleset,
    memorizer_normalize, train_memorizer, AlignConfig, ParagraphPair, PipelineConfig, RuleSet,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

fn assert_within(start: Instant, budget: Duration, label: &str) {
    let elapsed = start.elapsed();
    assert!(
        elapsed <= budget,
        "{label} took {elapsed:?}, budget {budget:?}"
    );
}

#[test]
fn a1_fixture_normalization() {
    let start = Instant::now();
    let ruleset = RuleSet::builtin();
    let fixtures = [
        ("decyzya", "decyzja"),
        ("egzystencya", "egzystencja"),
        ("teorya", "teoria"),
        ("Anglja", "Anglia"),
        ("Marjetka", "Marietka"),
        ("jenerał", "generał"),
        ("niema", "nie ma"),
        ("przyczem", "przy czym"),
        ("poczem", "po czym"),
        ("napewno", "na pewno"),
    ];
    for (historical, contemporary) in fixtures {
        assert_eq!(
            ruleset.normalize(historical),
            contemporary,
            "normalize({historical:?})"
        );
    }
    assert_within(start, Duration::from_secs(1), "A1");
    println!("A1: PASS");
}

/// Plain recursion over insert/delete/substitute choices; exponential,
/// viable only because inputs stay short.
fn distance_oracle(a: &[u8], b: &[u8]) -> usize {
    match (a.split_first(), b.split_first()) {
        (None, _) => b.len(),
        (_, None) => a.len(),
        (Some((x, ra)), Some((y, rb))) => {
            let sub = distance_oracle(ra, rb) + usize::from(x != y);
            let del = distance_oracle(ra, b) + 1;
            let ins = distance_oracle(a, rb) + 1;
            sub.min(del).min(ins)
        }
    }
}

#[test]
fn a2_metric_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let alphabet = b"abcd";
    for case in 0..1000 {
        let draw = |rng: &mut ChaCha8Rng| {
            let len = rng.gen_range(0..=8);
            (0..len)
                .map(|_| *alphabet.choose(rng).unwrap())
                .collect::<Vec<u8>>()
        };
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        assert_eq!(
            edit_distance(&a, &b),
            distance_oracle(&a, &b),
            "case {case}: {a:?} vs {b:?}"
        );
    }
    assert_eq!(cer("tekst", "tekst").unwrap(), 0.0);
    assert_eq!(cer("", "ab").unwrap(), 1.0);
    assert_within(start, Duration::from_secs(30), "A2");
    println!("A2: PASS");
}

const POOL: [&str; 12] = [
    "Słońce wschodziło nad miastem powoli i bez pośpiechu.",
    "Dzieci biegały po podwórku między starymi drzewami.",
    "Stary zegar wybił północ w zupełnie pustym domu.",
    "Rzeka płynęła szeroko przez zielone łąki doliny.",
    "Kupiec liczył monety przy ciężkim drewnianym stole.",
    "Wiatr niósł zapach świeżego siana znad dalekich pól.",
    "Lampa naftowa migotała nierówno w ciemnej izbie.",
    "Goście rozmawiali głośno przy sutej kolacji.",
    "Koń parskał niespokojnie w ciasnej stajni.",
    "List leżał nieotwarty na biurku od tygodnia.",
    "Ogień trzaskał wesoło na kamiennym kominku.",
    "Ścieżka wiodła stromo pod górę między głazami.",
];

/// Maximum objective over every monotone bead sequence, by recursion
/// over suffixes. Independent of the aligner's DP.
fn brute_force(src: &[String], tgt: &[String], config: &AlignConfig) -> f64 {
    fn sim(a: &[String], b: &[String]) -> f64 {
        diachron_core::align::similarity(&a.join(" "), &b.join(" "))
    }
    fn best(src: &[String], tgt: &[String], config: &AlignConfig) -> f64 {
        if src.is_empty() && tgt.is_empty() {
            return 0.0;
        }
        let mut top = f64::NEG_INFINITY;
        if !tgt.is_empty() {
            top = top.max(-config.gap_penalty + best(src, &tgt[1..], config));
        }
        if !src.is_empty() {
            top = top.max(-config.gap_penalty + best(&src[1..], tgt, config));
        }
        if !src.is_empty() && !tgt.is_empty() {
            top = top.max(
                sim(&src[..1], &tgt[..1]) + best(&src[1..], &tgt[1..], config),
            );
        }
        if !src.is_empty() && tgt.len() >= 2 {
            top = top.max(
                sim(&src[..1], &tgt[..2]) - config.split_penalty
                    + best(&src[1..], &tgt[2..], config),
            );
        }
        if src.len() >= 2 && !tgt.is_empty() {
            top = top.max(
                sim(&src[..2], &tgt[..1]) - config.split_penalty
                    + best(&src[2..], &tgt[1..], config),
            );
        }
        top
    }
    best(src, tgt, config)
}

/// The DP's total objective, recomputed from its emitted beads.
fn objective_of(beads: &[diachron_core::AlignmentBead], src: &[String], tgt: &[String], config: &AlignConfig) -> f64 {
    beads
        .iter()
        .map(|bead| {
            if bead.src_indices.is_empty() || bead.tgt_indices.is_empty() {
                return -config.gap_penalty;
            }
            let join = |idx: &[usize], side: &[String]| {
                idx.iter().map(|&i| side[i].as_str()).collect::<Vec<_>>().join(" ")
            };
            let sim = diachron_core::align::similarity(
                &join(&bead.src_indices, src),
                &join(&bead.tgt_indices, tgt),
            );
            if bead.src_indices.len() + bead.tgt_indices.len() > 2 {
                sim - config.split_penalty
            } else {
                sim
            }
        })
        .sum()
}

#[test]
fn a3_aligner_optimality() {
    let start = Instant::now();
    let config = AlignConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..200 {
        let draw = |rng: &mut ChaCha8Rng| {
            let len = rng.gen_range(0..=6);
            (0..len)
                .map(|_| POOL.choose(rng).unwrap().to_string())
                .collect::<Vec<String>>()
        };
        let src = draw(&mut rng);
        let tgt = draw(&mut rng);
        let result = align(&src, &tgt, &config);
        let dp = objective_of(&result.beads, &src, &tgt, &config);
        let oracle = brute_force(&src, &tgt, &config);
        let baseline = if src.is_empty() && tgt.is_empty() { 0.0 } else { oracle };
        assert!(
            (dp - baseline).abs() < 1e-9,
            "case {case}: dp {dp} vs brute force {baseline} for {} x {}",
            src.len(),
            tgt.len()
        );
    }

    let identity: Vec<String> = POOL.iter().map(|p| p.to_string()).collect();
    let result = align(&identity, &identity, &config);
    assert_eq!(result.beads.len(), identity.len());
    for (i, bead) in result.beads.iter().enumerate() {
        assert_eq!(bead.src_indices, vec![i]);
        assert_eq!(bead.tgt_indices, vec![i]);
    }
    assert_within(start, Duration::from_secs(60), "A3");
    println!("A3: PASS");
}

/// Twenty novels with uneven pair counts, roughly a third identical.
fn synthetic_corpus() -> Vec<ParagraphPair> {
    let mut pairs = Vec::new();
    for novel in 0..20usize {
        let novel_id = format!("n{novel:02}");
        let count = 60 + novel * 4;
        for k in 0..count {
            let (src, tgt) = if k % 3 == 0 {
                let text = format!("Wspólny akapit {k} powieści {novel} bez zmian.");
                (text.clone(), text)
            } else {
                (
                    format!("Jenerał omawiał decyzyę {k} w powieści {novel}."),
                    format!("Generał omawiał decyzję {k} w powieści {novel}."),
                )
            };
            pairs.push(ParagraphPair {
                pair_id: format!("{novel_id}:{k:05}"),
                novel_id: novel_id.clone(),
                score: 2.0,
                src,
                tgt,
            });
        }
    }
    pairs
}

#[test]
fn a4_dataset_invariants() {
    let pairs = synthetic_corpus();
    assert!(pairs.len() > 1900, "corpus holds {} pairs", pairs.len());
    let config = PipelineConfig::standard();
    let seed = 17;

    let combos = [(false, false), (true, false), (false, true), (true, true)];
    let mut stats = std::collections::HashMap::new();
    for (pruning, separation) in combos {
        let variant = build_variant(&pairs, pruning, separation, seed).unwrap();
        let by_id: std::collections::HashMap<&str, &ParagraphPair> =
            pairs.iter().map(|p| (p.pair_id.as_str(), p)).collect();

        if pruning {
            for id in variant.train.iter().chain(&variant.test) {
                let pair = by_id[id.as_str()];
                assert_ne!(pair.src, pair.tgt, "pruned variant kept identical pair {id}");
            }
        }

        if separation {
            let novels = |ids: &[String]| {
                ids.iter()
                    .map(|id| by_id[id.as_str()].novel_id.clone())
                    .collect::<std::collections::BTreeSet<String>>()
            };
            let train_novels = novels(&variant.train);
            let test_novels = novels(&variant.test);
            assert!(train_novels.is_disjoint(&test_novels));
            assert_eq!(test_novels.len(), 16);

            // Recompute the quartile ranking over eligible pairs and
            // check each quartile contributed exactly four test novels.
            let mut counts: std::collections::HashMap<String, usize> =
                std::collections::HashMap::new();
            for pair in &pairs {
                if !pruning || pair.src != pair.tgt {
                    *counts.entry(pair.novel_id.clone()).or_default() += 1;
                }
            }
            let mut ranked: Vec<(String, usize)> = counts.into_iter().collect();
            ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            let quartile_size = ranked.len().div_ceil(4);
            for (q, chunk) in ranked.chunks(quartile_size).enumerate() {
                let drawn = chunk
                    .iter()
                    .filter(|(novel, _)| test_novels.contains(novel))
                    .count();
                assert_eq!(drawn, 4, "quartile {q} contributed {drawn} test novels");
            }
        }

        stats.insert(
            (pruning, separation),
            variant_stats(&variant, &pairs),
        );

        // Fixed inputs and seed reproduce the manifest byte for byte.
        let again = build_variant(&pairs, pruning, separation, seed).unwrap();
        let first = variant_manifest_json(&VariantManifest::new(
            &variant,
            &config,
            "pl-diachronic 1.0.0".to_string(),
            diachron_core::VERSION.to_string(),
        ));
        let second = variant_manifest_json(&VariantManifest::new(
            &again,
            &config,
            "pl-diachronic 1.0.0".to_string(),
            diachron_core::VERSION.to_string(),
        ));
        assert_eq!(first, second);
    }

    for pruning in [false, true] {
        let pooled = &stats[&(pruning, false)];
        let separated = &stats[&(pruning, true)];
        assert_eq!(pooled.characters, separated.characters, "pruning={pruning}");
        assert_eq!(pooled.words, separated.words, "pruning={pruning}");
    }
    println!("A4: PASS");
}

#[test]
fn a5_end_to_end_ordering() {
    let start = Instant::now();
    let ruleset = RuleSet::builtin();
    let (generator, _) = invert_ruleset(&ruleset, 16);

    let candidates = [
        "generał", "decyzja", "egzystencja", "dobrymi", "ulec", "móc", "miski", "kimi",
        "logicznym", "dom", "las", "woda", "pole", "okno", "droga", "chleb", "wiatr", "kamień",
        "ogień", "most",
    ];
    // Only fixed points of the forward ruleset go into references, so a
    // perfect system could reach zero error.
    let lexicon: Vec<&str> = candidates
        .iter()
        .copied()
        .filter(|w| ruleset.normalize(w) == *w)
        .collect();
    assert!(lexicon.len() >= 18, "lexicon shrank to {}", lexicon.len());

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pairs = Vec::new();
    for novel in 0..20usize {
        let novel_id = format!("s{novel:02}");
        for k in 0..10 {
            let words: Vec<&str> = (0..rng.gen_range(6..=12))
                .map(|_| *lexicon.choose(&mut rng).unwrap())
                .collect();
            let tgt = format!("{}.", words.join(" "));
            let src_words: Vec<String> = words
                .iter()
                .map(|word| {
                    let variants = generator.historical_variants(word);
                    let historical: Vec<&String> =
                        variants.iter().filter(|v| v != word).collect();
                    if historical.is_empty() || !rng.gen_bool(0.8) {
                        word.to_string()
                    } else {
                        (*historical.choose(&mut rng).unwrap()).clone()
                    }
                })
                .collect();
            let src = format!("{}.", src_words.join(" "));
            pairs.push(ParagraphPair {
                pair_id: format!("{novel_id}:{k:05}"),
                novel_id: novel_id.clone(),
                score: 2.0,
                src,
                tgt,
            });
        }
    }

    let variant = build_variant(&pairs, false, false, 5).unwrap();
    let by_id: std::collections::HashMap<&str, &ParagraphPair> =
        pairs.iter().map(|p| (p.pair_id.as_str(), p)).collect();
    let resolve = |ids: &[String]| -> Vec<ParagraphPair> {
        ids.iter().map(|id| by_id[id.as_str()].clone()).collect()
    };
    let train = resolve(&variant.train);
    let test = resolve(&variant.test);

    let meta = |system: &str| EvalMeta {
        system: system.to_string(),
        version: "test".to_string(),
        variant_id: variant.id.clone(),
    };
    let transducer_hyps: Vec<String> = test.iter().map(|p| ruleset.normalize(&p.src)).collect();
    let identity_hyps: Vec<String> = test.iter().map(|p| identity_normalize(&p.src)).collect();
    let table = train_memorizer(&train);
    let memorizer_hyps: Vec<String> = test
        .iter()
        .map(|p| memorizer_normalize(&p.src, &table))
        .collect();

    let transducers = evaluate(&test, &transducer_hyps, meta("transducers")).unwrap();
    let identity = evaluate(&test, &identity_hyps, meta("identity")).unwrap();
    let memorizer = evaluate(&test, &memorizer_hyps, meta("memorizer")).unwrap();

    assert!(identity.cer > 0.0, "test set contains no changed pairs");
    assert!(
        transducers.cer < identity.cer,
        "transducers CER {} vs identity {}",
        transducers.cer,
        identity.cer
    );
    assert!(
        transducers.wer < identity.wer,
        "transducers WER {} vs identity {}",
        transducers.wer,
        identity.wer
    );
    assert!(
        memorizer.wer <= identity.wer,
        "memorizer WER {} vs identity {}",
        memorizer.wer,
        identity.wer
    );
    assert_within(start, Duration::from_secs(120), "A5");
    println!("A5: PASS");
}

#[test]
fn a6_reverse_soundness() {
    let start = Instant::now();
    let ruleset = RuleSet::builtin();
    let (generator, _) = invert_ruleset(&ruleset, 16);

    let onsets = [
        "b", "c", "ch", "cz", "d", "g", "j", "k", "l", "ł", "m", "n", "p", "r", "s", "sz", "t",
        "w", "z", "ż",
    ];
    let nuclei = ["a", "e", "i", "o", "u", "y", "ą", "ę", "ó"];
    let suffixes = [
        "", "ja", "ya", "cja", "zja", "sja", "izk", "isk", "emi", "ymi", "iemi", "imi", "dz",
        "c", "ledz", "lec", "em", "ym", "yja", "ał",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut lexicon = std::collections::BTreeSet::new();
    while lexicon.len() < 10_000 {
        let mut word = String::new();
        for _ in 0..rng.gen_range(2..=4) {
            word.push_str(onsets.choose(&mut rng).unwrap());
            word.push_str(nuclei.choose(&mut rng).unwrap());
        }
        word.push_str(suffixes.choose(&mut rng).unwrap());
        lexicon.insert(word);
    }

    let mut emitted = 0usize;
    for word in &lexicon {
        let reference = ruleset.normalize_token(word).0;
        for variant in generator.historical_variants(word) {
            emitted += 1;
            let normalized = ruleset.normalize_token(&variant).0;
            assert_eq!(
                normalized, reference,
                "variant {variant:?} of {word:?} normalizes to {normalized:?}"
            );
        }
    }
    assert!(emitted >= 10_000, "only {emitted} variants emitted");
    assert_within(start, Duration::from_secs(120), "A6");
    println!("A6: PASS");
}

#[test]
fn a7_lint_cleanliness() {
    let ruleset = RuleSet::builtin();
    let structural = lint_ruleset(&ruleset, None);
    assert!(structural.is_empty(), "{structural:?}");

    // A probe where every rule fires at least once, so the shadowing
    // check is exercised rather than vacuous.
    let probe = "decyzya mizka decyzyja uledz antireligijny kiemi dobremi \
                 logicznem anglja marjetka egzystencya teorya";
    let with_probe = lint_ruleset(&ruleset, Some(probe));
    assert!(with_probe.is_empty(), "{with_probe:?}");
    println!("A7: PASS");
}
