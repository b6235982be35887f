//! Tokenized corpora with optional gold annotation, plus the CoNLL-U
//! subset reader/writer used for gold data.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::tags::PosTag;

/// A single surface token, optionally gold-annotated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub gold_tag: Option<PosTag>,
}

impl Token {
    pub fn new(surface: impl Into<String>) -> Token {
        Token {
            surface: surface.into(),
            gold_tag: None,
        }
    }

    pub fn tagged(surface: impl Into<String>, tag: PosTag) -> Token {
        Token {
            surface: surface.into(),
            gold_tag: Some(tag),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Sentence {
        Sentence { tokens }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub sentences: Vec<Sentence>,
    pub language_code: String,
}

impl Corpus {
    pub fn new(language_code: impl Into<String>) -> Corpus {
        Corpus {
            sentences: Vec::new(),
            language_code: language_code.into(),
        }
    }

    pub fn sentence_count(&self) -> usize {
        self.sentences.len()
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flat_map(|s| s.tokens.iter())
    }
}

/// Reads the CoNLL-U subset: tab-separated token lines with at least 4
/// columns (id, form, lemma, upos), `#` comments, blank-line sentence
/// separation. Multiword-token ranges (ids containing `-`) are skipped.
pub fn parse_conllu(text: &str, language_code: &str) -> Result<Corpus> {
    let mut corpus = Corpus::new(language_code);
    let mut tokens: Vec<Token> = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            if !tokens.is_empty() {
                corpus.sentences.push(Sentence::new(std::mem::take(&mut tokens)));
            }
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 4 {
            return Err(Error::parse(
                lineno,
                format!("expected at least 4 tab-separated columns, found {}", cols.len()),
            ));
        }
        if cols[0].contains('-') {
            // multiword token range
            continue;
        }
        let gold_tag = match cols[3] {
            "_" => None,
            tag => Some(tag.parse::<PosTag>().map_err(|_| {
                Error::parse(lineno, format!("unknown UPOS value `{}`", cols[3]))
            })?),
        };
        tokens.push(Token {
            surface: cols[1].to_string(),
            gold_tag,
        });
    }
    if !tokens.is_empty() {
        corpus.sentences.push(Sentence::new(tokens));
    }
    Ok(corpus)
}

/// Writes a corpus back out in the CoNLL-U subset accepted by
/// [`parse_conllu`]. Surfaces and gold tags round-trip exactly.
pub fn to_conllu(corpus: &Corpus) -> String {
    let mut out = String::new();
    for sentence in &corpus.sentences {
        for (i, token) in sentence.tokens.iter().enumerate() {
            let tag = token.gold_tag.map(|t| t.as_str()).unwrap_or("_");
            let _ = writeln!(out, "{}\t{}\t_\t{}", i + 1, token.surface, tag);
        }
        out.push('\n');
    }
    out
}
