//! Personal-name mentions from document text.
//!
//! The built-in recognizer is a capitalization heuristic: a run of
//! capitalized tokens is a name if it follows an honorific or starts with a
//! known given name. Pre-tagged documents skip recognition entirely, so a
//! better tagger can be plugged in upstream.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use crate::corpus_io::{Content, Document};
use crate::error::{Error, Result};
use crate::time::Timestamp;

pub const DEFAULT_HONORIFICS: &[&str] = &[
    "Mr.", "Mrs.", "Ms.", "Miss", "Dr.", "Prof.", "Rev.", "Sir", "Lady", "Lord", "Gen.", "Col.",
    "Capt.", "Lt.", "Sgt.", "Sen.", "Rep.", "Gov.", "Pres.", "Mr", "Mrs", "Ms", "Dr",
];

pub const DEFAULT_STOP_CAPITALIZED: &[&str] = &[
    "The",
    "A",
    "An",
    "On",
    "In",
    "At",
    "As",
    "By",
    "For",
    "From",
    "Of",
    "To",
    "With",
    "And",
    "But",
    "Or",
    "If",
    "It",
    "Its",
    "This",
    "That",
    "These",
    "Those",
    "When",
    "While",
    "After",
    "Before",
    "Since",
    "Yesterday",
    "Today",
    "Monday",
    "Tuesday",
    "Wednesday",
    "Thursday",
    "Friday",
    "Saturday",
    "Sunday",
];

#[derive(Clone, Debug)]
pub struct RecognizerConfig {
    pub given_name_gazetteer: HashSet<String>,
    pub honorifics: HashSet<String>,
    pub stop_capitalized: HashSet<String>,
    pub min_phrase_tokens: usize,
    pub max_phrase_tokens: usize,
}

impl RecognizerConfig {
    /// Default honorific and stop lists around the given gazetteer.
    pub fn with_gazetteer<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        RecognizerConfig {
            given_name_gazetteer: names.into_iter().map(Into::into).collect(),
            honorifics: DEFAULT_HONORIFICS.iter().map(|s| s.to_string()).collect(),
            stop_capitalized: DEFAULT_STOP_CAPITALIZED
                .iter()
                .map(|s| s.to_string())
                .collect(),
            min_phrase_tokens: 2,
            max_phrase_tokens: 4,
        }
    }

    /// Loads word lists (one entry per line); missing optional lists use defaults.
    pub fn from_files(
        gazetteer: &Path,
        honorifics: Option<&Path>,
        stop_capitalized: Option<&Path>,
    ) -> Result<Self> {
        let mut cfg = Self::with_gazetteer(read_word_list(gazetteer)?);
        if let Some(p) = honorifics {
            cfg.honorifics = read_word_list(p)?;
        }
        if let Some(p) = stop_capitalized {
            cfg.stop_capitalized = read_word_list(p)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_phrase_tokens < 2 {
            return Err(Error::Config("min_phrase_tokens must be at least 2".into()));
        }
        if self.max_phrase_tokens < self.min_phrase_tokens {
            return Err(Error::Config(
                "max_phrase_tokens must be >= min_phrase_tokens".into(),
            ));
        }
        if self.given_name_gazetteer.is_empty() {
            return Err(Error::Config("given-name gazetteer is empty".into()));
        }
        Ok(())
    }
}

pub fn read_word_list(path: &Path) -> Result<HashSet<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mention {
    pub name: String,
    pub timestamp: Timestamp,
    pub count: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Honorific,
    Capitalized,
    Other,
}

#[derive(Debug)]
struct Token<'a> {
    word: &'a str,
    kind: Kind,
    break_before: bool,
    break_after: bool,
}

const LEADING: &[char] = &['"', '\'', '(', '[', '{', '“', '‘', '«'];
const TRAILING: &[char] = &[
    '.', ',', ';', ':', '!', '?', '"', '\'', ')', ']', '}', '”', '’', '»',
];

fn is_initial(s: &str) -> bool {
    let mut chars = s.chars();
    matches!((chars.next(), chars.next(), chars.next()), (Some(c), Some('.'), None) if c.is_uppercase())
}

fn is_capitalized(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_uppercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphabetic() || matches!(c, '-' | '\'' | '’'))
}

fn classify<'a>(raw: &'a str, cfg: &RecognizerConfig) -> Token<'a> {
    let lead = raw.trim_start_matches(LEADING);
    let break_before = lead.len() != raw.len();
    if cfg.honorifics.contains(lead) {
        return Token {
            word: lead,
            kind: Kind::Honorific,
            break_before,
            break_after: false,
        };
    }
    let stripped = lead.trim_end_matches(TRAILING);
    let (word, mut break_after) = if is_initial(lead) {
        (lead, false)
    } else {
        (stripped, stripped.len() != lead.len())
    };
    let word = match word.strip_suffix("'s").or_else(|| word.strip_suffix("’s")) {
        Some(base) if !base.is_empty() => {
            break_after = true;
            base
        }
        _ => word,
    };
    let kind = if is_initial(word) || is_capitalized(word) {
        Kind::Capitalized
    } else {
        Kind::Other
    };
    Token {
        word,
        kind,
        break_before,
        break_after,
    }
}

/// Accepted name occurrences, in text order.
fn accepted_occurrences(text: &str, cfg: &RecognizerConfig) -> Vec<String> {
    let mut out = Vec::new();
    let mut run: Vec<&str> = Vec::new();
    let mut run_after_honorific = false;
    let mut pending_honorific = false;

    let flush = |run: &mut Vec<&str>, after_honorific: bool, out: &mut Vec<String>| {
        resolve_run(run, after_honorific, cfg, out);
        run.clear();
    };

    for raw in text.split_whitespace() {
        let tok = classify(raw, cfg);
        match tok.kind {
            Kind::Honorific => {
                flush(&mut run, run_after_honorific, &mut out);
                pending_honorific = true;
            }
            Kind::Capitalized => {
                if tok.break_before && !run.is_empty() {
                    flush(&mut run, run_after_honorific, &mut out);
                }
                if run.is_empty() {
                    run_after_honorific = pending_honorific;
                }
                pending_honorific = false;
                run.push(tok.word);
                if tok.break_after {
                    flush(&mut run, run_after_honorific, &mut out);
                }
            }
            Kind::Other => {
                flush(&mut run, run_after_honorific, &mut out);
                pending_honorific = false;
            }
        }
    }
    flush(&mut run, run_after_honorific, &mut out);
    out
}

/// Splits one capitalized run into names, leftmost-longest.
fn resolve_run(run: &[&str], after_honorific: bool, cfg: &RecognizerConfig, out: &mut Vec<String>) {
    let mut i = 0;
    while i < run.len() {
        let len = cfg.max_phrase_tokens.min(run.len() - i);
        let anchored = (i == 0 && after_honorific) || cfg.given_name_gazetteer.contains(run[i]);
        if anchored && len >= cfg.min_phrase_tokens && !cfg.stop_capitalized.contains(run[i]) {
            out.push(run[i..i + len].join(" "));
            i += len;
        } else {
            i += 1;
        }
    }
}

/// One mention per distinct name, counted, ordered by first occurrence.
pub fn extract_mentions(doc: &Document, cfg: &RecognizerConfig) -> Vec<Mention> {
    let text = match &doc.content {
        Content::Text(t) => t,
        Content::Mentions(_) => return Vec::new(),
    };
    let mut order: Vec<String> = Vec::new();
    let mut counts: HashMap<String, u64> = HashMap::new();
    for name in accepted_occurrences(text, cfg) {
        let c = counts.entry(name.clone()).or_insert(0);
        if *c == 0 {
            order.push(name);
        }
        *c += 1;
    }
    order
        .into_iter()
        .map(|name| Mention {
            count: counts[&name],
            name,
            timestamp: doc.timestamp,
        })
        .collect()
}

/// Recognizes names in raw documents and passes pre-tagged mentions through.
pub fn mentions_of(doc: &Document, cfg: &RecognizerConfig) -> Vec<Mention> {
    match &doc.content {
        Content::Text(_) => extract_mentions(doc, cfg),
        Content::Mentions(list) => list
            .iter()
            .map(|(name, count)| Mention {
                name: name.clone(),
                timestamp: doc.timestamp,
                count: *count,
            })
            .collect(),
    }
}
