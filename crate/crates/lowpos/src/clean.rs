//! Raw-corpus cleaning: sentence segmentation, tokenization, and the
//! three sentence-removal rules applied to scraped text.

use crate::corpus::{Corpus, Sentence, Token};
use crate::dict::{BilingualDictionary, MonolingualTagDictionary};

/// Unicode script allow-list entries for the "foreign characters" rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Script {
    Latin,
    Cyrillic,
    Greek,
    Armenian,
    Ethiopic,
    Devanagari,
    Tamil,
    Telugu,
    Arabic,
}

impl Script {
    fn contains(self, c: char) -> bool {
        let cp = c as u32;
        let ranges: &[(u32, u32)] = match self {
            Script::Latin => &[(0x0041, 0x024F), (0x1E00, 0x1EFF)],
            Script::Cyrillic => &[(0x0400, 0x052F)],
            Script::Greek => &[(0x0370, 0x03FF), (0x1F00, 0x1FFF)],
            Script::Armenian => &[(0x0530, 0x058F)],
            Script::Ethiopic => &[(0x1200, 0x139F)],
            Script::Devanagari => &[(0x0900, 0x097F)],
            Script::Tamil => &[(0x0B80, 0x0BFF)],
            Script::Telugu => &[(0x0C00, 0x0C7F)],
            Script::Arabic => &[(0x0600, 0x06FF), (0x0750, 0x077F)],
        };
        ranges.iter().any(|&(lo, hi)| (lo..=hi).contains(&cp))
    }
}

impl std::str::FromStr for Script {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Script, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "latin" => Ok(Script::Latin),
            "cyrillic" => Ok(Script::Cyrillic),
            "greek" => Ok(Script::Greek),
            "armenian" => Ok(Script::Armenian),
            "ethiopic" => Ok(Script::Ethiopic),
            "devanagari" => Ok(Script::Devanagari),
            "tamil" => Ok(Script::Tamil),
            "telugu" => Ok(Script::Telugu),
            "arabic" => Ok(Script::Arabic),
            other => Err(crate::error::Error::Config(format!("unknown script `{other}`"))),
        }
    }
}

/// Thresholds and script allow-list for [`clean_corpus`].
#[derive(Debug, Clone)]
pub struct CleaningConfig {
    /// Max fraction of tokens containing out-of-script characters.
    pub foreign_frac: f64,
    /// Max fraction of tokens consisting entirely of symbols/punctuation.
    pub symbol_frac: f64,
    pub allowed_scripts: Vec<Script>,
}

impl Default for CleaningConfig {
    fn default() -> CleaningConfig {
        CleaningConfig {
            foreign_frac: 0.5,
            symbol_frac: 0.5,
            allowed_scripts: vec![Script::Latin],
        }
    }
}

fn is_symbol_char(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace()
}

/// Sentence-final punctuation recognized by the segmenter.
fn is_sentence_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?' | '።' | '।')
}

/// Splits one raw line into sentence substrings. A terminal character
/// followed by whitespace or end of line closes a sentence; lines never
/// merge with each other.
pub fn segment_line(line: &str) -> Vec<String> {
    let mut sentences = Vec::new();
    let mut current = String::new();
    let chars: Vec<char> = line.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        current.push(c);
        let at_boundary = is_sentence_terminal(c)
            && chars.get(i + 1).map_or(true, |n| n.is_whitespace());
        if at_boundary {
            let trimmed = current.trim();
            if !trimmed.is_empty() {
                sentences.push(trimmed.to_string());
            }
            current.clear();
        }
    }
    let trimmed = current.trim();
    if !trimmed.is_empty() {
        sentences.push(trimmed.to_string());
    }
    sentences
}

/// Whitespace tokenization with leading/trailing punctuation split off
/// into separate tokens.
pub fn tokenize(sentence: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in sentence.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let mut start = 0;
        let mut end = chars.len();
        while start < end && is_symbol_char(chars[start]) {
            start += 1;
        }
        while end > start && is_symbol_char(chars[end - 1]) {
            end -= 1;
        }
        for &c in &chars[..start] {
            tokens.push(c.to_string());
        }
        if start < end {
            tokens.push(chars[start..end].iter().collect());
        }
        for &c in &chars[end..] {
            tokens.push(c.to_string());
        }
    }
    tokens
}

fn token_is_foreign(token: &str, cfg: &CleaningConfig) -> bool {
    token.chars().any(|c| {
        c.is_alphabetic() && !cfg.allowed_scripts.iter().any(|s| s.contains(c))
    })
}

fn token_is_symbolic(token: &str) -> bool {
    token.chars().all(is_symbol_char)
}

/// Segments and tokenizes raw lines, then drops every sentence in which
/// (i) the out-of-script token fraction exceeds `foreign_frac`, or
/// (ii) the all-symbol token fraction exceeds `symbol_frac`, or
/// (iii) no token is found in B or M. Survivors keep their input order.
pub fn clean_corpus(
    raw_lines: &[String],
    bilingual: &BilingualDictionary,
    monolingual: Option<&MonolingualTagDictionary>,
    cfg: &CleaningConfig,
    language_code: &str,
) -> Corpus {
    let mut corpus = Corpus::new(language_code);
    for line in raw_lines {
        for sentence_text in segment_line(line) {
            let tokens = tokenize(&sentence_text);
            if tokens.is_empty() {
                continue;
            }
            let n = tokens.len() as f64;
            let foreign = tokens.iter().filter(|t| token_is_foreign(t, cfg)).count() as f64;
            if foreign / n > cfg.foreign_frac {
                continue;
            }
            let symbolic = tokens.iter().filter(|t| token_is_symbolic(t)).count() as f64;
            if symbolic / n > cfg.symbol_frac {
                continue;
            }
            let in_dict = tokens.iter().any(|t| {
                bilingual.contains(t) || monolingual.map_or(false, |m| m.contains(t))
            });
            if !in_dict {
                continue;
            }
            corpus
                .sentences
                .push(Sentence::new(tokens.into_iter().map(Token::new).collect()));
        }
    }
    corpus
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dict::load_bilingual_dictionary;

    fn dict(pairs: &str) -> BilingualDictionary {
        load_bilingual_dictionary(pairs).unwrap()
    }

    #[test]
    fn segmenter_splits_on_terminals() {
        assert_eq!(
            segment_line("Hej med dig. Hvordan går det? Fint"),
            vec!["Hej med dig.", "Hvordan går det?", "Fint"]
        );
        // internal period without following whitespace does not split
        assert_eq!(segment_line("ca. 3.14 er pi."), vec!["ca.", "3.14 er pi."]);
    }

    #[test]
    fn tokenizer_splits_edge_punctuation() {
        assert_eq!(tokenize("(hello, world!)"), vec!["(", "hello", ",", "world", "!", ")"]);
        assert_eq!(tokenize("a-b c"), vec!["a-b", "c"]);
        assert_eq!(tokenize("..."), vec![".", ".", "."]);
    }

    #[test]
    fn all_punctuation_sentence_removed() {
        let b = dict("hello\thej\n");
        let corpus = clean_corpus(
            &["! ! ?".to_string()],
            &b,
            None,
            &CleaningConfig::default(),
            "xx",
        );
        assert_eq!(corpus.sentence_count(), 0);
    }

    #[test]
    fn sentence_without_dictionary_words_removed() {
        let b = dict("hello\thej\n");
        let corpus = clean_corpus(
            &["zzz yyy xxx".to_string()],
            &b,
            None,
            &CleaningConfig::default(),
            "xx",
        );
        assert_eq!(corpus.sentence_count(), 0);
    }

    #[test]
    fn mostly_foreign_sentence_removed() {
        let b = dict("привет\thello\n");
        let mut cfg = CleaningConfig::default();
        cfg.allowed_scripts = vec![Script::Latin];
        let corpus = clean_corpus(
            &["привет мир сегодня hello".to_string()],
            &b,
            None,
            &cfg,
            "xx",
        );
        assert_eq!(corpus.sentence_count(), 0);
        // With Cyrillic allowed the same sentence survives.
        cfg.allowed_scripts = vec![Script::Latin, Script::Cyrillic];
        let corpus = clean_corpus(
            &["привет мир сегодня hello".to_string()],
            &b,
            None,
            &cfg,
            "xx",
        );
        assert_eq!(corpus.sentence_count(), 1);
    }

    #[test]
    fn mixed_sentence_kept() {
        // 10 tokens: 3 in B, 0 foreign, 1 punctuation token, defaults.
        // foreign 0/10 <= 0.5, symbolic 1/10 <= 0.5, dictionary hit: keep.
        let b = dict("ki\tdog\nlo\tcat\nmu\tbird\n");
        let line = "ki lo mu aa bb cc dd ee ff .".to_string();
        let corpus = clean_corpus(&[line], &b, None, &CleaningConfig::default(), "xx");
        assert_eq!(corpus.sentence_count(), 1);
        assert_eq!(corpus.sentences[0].len(), 10);
    }

    #[test]
    fn output_is_ordered_subsequence() {
        let b = dict("ki\tdog\n");
        let lines = vec![
            "ki aa".to_string(),
            "zz yy".to_string(),
            "ki bb".to_string(),
        ];
        let corpus = clean_corpus(&lines, &b, None, &CleaningConfig::default(), "xx");
        let firsts: Vec<&str> = corpus
            .sentences
            .iter()
            .map(|s| s.tokens[1].surface.as_str())
            .collect();
        assert_eq!(firsts, vec!["aa", "bb"]);
    }
}
