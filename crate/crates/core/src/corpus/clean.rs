//! Paragraph-level character normalization and dialogue cleanup.
//!
//! Polish letters and ASCII pass through untouched. Other accented Latin
//! letters lose their diacritics; typographic punctuation folds to ASCII
//! except en/em dashes, which are kept when interior. Leading quotation
//! dashes and all-caps character cues (stage-direction prefixes like
//! "WOJEWODA:") are stripped repeatedly, so the cleanup is idempotent.
//! Output is NFC with collapsed whitespace.

use once_cell::sync::Lazy;
use regex::Regex;
use unicode_normalization::UnicodeNormalization;

const POLISH_LETTERS: &str = "ąćęłńóśźżĄĆĘŁŃÓŚŹŻ";

/// Dashes that open quoted dialogue: hyphen, en/em dash, horizontal bar,
/// figure dash.
const DIALOGUE_DASHES: [char; 5] = ['-', '–', '—', '―', '‒'];

/// All-caps speaker cue at paragraph start, colon included, followed by
/// whitespace or end. Two characters minimum: a lone capital before a
/// colon is ordinary text, not a cue.
static CUE: Lazy<Regex> = Lazy::new(|| {
    Regex::new(r"^([A-ZĄĆĘŁŃÓŚŹŻ][A-ZĄĆĘŁŃÓŚŹŻ .]{1,28}:)(\s|$)").unwrap()
});

/// ASCII fallbacks for Latin letters that do not decompose.
fn special_fold(c: char) -> Option<&'static str> {
    Some(match c {
        'ø' => "o",
        'Ø' => "O",
        'đ' => "d",
        'Đ' => "D",
        'ß' => "ss",
        'æ' => "ae",
        'Æ' => "AE",
        'œ' => "oe",
        'Œ' => "OE",
        'þ' => "th",
        'Þ' => "Th",
        'ð' => "d",
        'Ð' => "D",
        'ı' => "i",
        'ƒ' => "f",
        _ => return None,
    })
}

/// Strip combining marks from one letter via canonical decomposition.
/// Returns `None` when the letter has no ASCII-ish base form.
fn strip_marks(c: char) -> Option<String> {
    let base: String = c
        .nfd()
        .filter(|d| !unicode_normalization::char::is_combining_mark(*d))
        .collect();
    if base.is_empty() || base.chars().any(|d| !d.is_ascii()) {
        return None;
    }
    Some(base)
}

/// Fold a single Latin letter outside the preserved set to ASCII, when a
/// mapping exists.
pub(crate) fn ascii_fold(c: char) -> Option<String> {
    if let Some(s) = special_fold(c) {
        return Some(s.to_string());
    }
    strip_marks(c)
}

/// Case- and diacritic-folded form for fuzzy metadata matching. Unlike
/// `clean_paragraph` this folds Polish letters too (ł → l), so spellings
/// with and without diacritics compare as equal.
pub(crate) fn match_fold(text: &str) -> String {
    let lowered: String = text.nfc().flat_map(char::to_lowercase).collect();
    let mut out = String::with_capacity(lowered.len());
    for c in lowered.chars() {
        if c.is_ascii() {
            out.push(c);
        } else if c == 'ł' {
            out.push('l');
        } else if let Some(folded) = ascii_fold(c) {
            out.push_str(&folded);
        } else {
            out.push(c);
        }
    }
    out.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn map_characters(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.nfc() {
        match c {
            _ if c.is_ascii() => out.push(c),
            _ if POLISH_LETTERS.contains(c) => out.push(c),
            '„' | '“' | '”' | '»' | '«' | '‟' | '〝' | '〞' | '″' => out.push('"'),
            '‘' | '’' | '‚' | '‛' | '‹' | '›' | '′' => out.push('\''),
            '…' => out.push_str("..."),
            '\u{2010}' | '\u{2011}' | '\u{2012}' | '\u{2212}' => out.push('-'),
            // En/em dashes and the horizontal bar survive; interior ones
            // are meaningful punctuation, leading ones are stripped later.
            '–' | '—' | '―' => out.push(c),
            '⁄' => out.push('/'),
            '\u{00AD}' => {}
            _ if c.is_whitespace() => out.push(' '),
            _ if c.is_alphabetic() => match ascii_fold(c) {
                Some(folded) => out.push_str(&folded),
                None => out.push(c),
            },
            _ => out.push(c),
        }
    }
    out
}

fn strip_dialogue_prefixes(text: &str) -> &str {
    let mut rest = text.trim_start();
    loop {
        if let Some(c) = rest.chars().next() {
            if DIALOGUE_DASHES.contains(&c) {
                rest = rest[c.len_utf8()..].trim_start();
                continue;
            }
        }
        if let Some(caps) = CUE.captures(rest) {
            rest = rest[caps.get(1).unwrap().end()..].trim_start();
            continue;
        }
        return rest;
    }
}

pub fn clean_paragraph(paragraph: &str) -> String {
    let mapped = map_characters(paragraph);
    let stripped = strip_dialogue_prefixes(&mapped);
    let collapsed = stripped.split_whitespace().collect::<Vec<_>>().join(" ");
    collapsed.nfc().collect()
}
