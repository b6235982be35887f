//! Word and character indices with reserved ids.

use std::collections::HashMap;

use crate::corpus::Corpus;
use crate::dict::EmbeddingTable;

pub const WORD_UNK: usize = 0;
pub const CHAR_UNK: usize = 0;
pub const CHAR_BOS: usize = 1;
pub const CHAR_EOS: usize = 2;

/// Bijective word/char indices. Ids are contiguous from 0; id 0 is UNK
/// for both, and chars additionally reserve BOS/EOS at ids 1 and 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    word_ids: HashMap<String, usize>,
    chars: Vec<char>,
    char_ids: HashMap<char, usize>,
}

impl Vocabulary {
    /// Builds the index from training corpora: the `max_words` most
    /// frequent surface forms (ties broken lexicographically), plus
    /// every word with a pretrained embedding, plus UNK. The char index
    /// covers every character observed in the corpora.
    pub fn build(
        corpora: &[&Corpus],
        embeddings: Option<&EmbeddingTable>,
        max_words: usize,
    ) -> Vocabulary {
        let mut freq: HashMap<&str, usize> = HashMap::new();
        let mut char_set: Vec<char> = Vec::new();
        for corpus in corpora {
            for token in corpus.tokens() {
                *freq.entry(token.surface.as_str()).or_insert(0) += 1;
                char_set.extend(token.surface.chars());
            }
        }
        char_set.sort_unstable();
        char_set.dedup();

        let mut by_freq: Vec<(&str, usize)> = freq.into_iter().collect();
        by_freq.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        by_freq.truncate(max_words);

        let mut words = vec!["<unk>".to_string()];
        let mut word_ids = HashMap::new();
        word_ids.insert(words[0].clone(), WORD_UNK);
        for (w, _) in by_freq {
            if !word_ids.contains_key(w) {
                word_ids.insert(w.to_string(), words.len());
                words.push(w.to_string());
            }
        }
        if let Some(table) = embeddings {
            for w in table.words() {
                if !word_ids.contains_key(w.as_str()) {
                    word_ids.insert(w.clone(), words.len());
                    words.push(w.clone());
                }
            }
        }

        let mut chars = vec!['\u{0}', '\u{1}', '\u{2}'];
        let mut char_ids = HashMap::new();
        for c in char_set {
            char_ids.insert(c, chars.len());
            chars.push(c);
        }

        Vocabulary {
            words,
            word_ids,
            chars,
            char_ids,
        }
    }

    /// Rebuilds a vocabulary from its stored index order (checkpoints).
    pub fn from_parts(words: Vec<String>, chars: Vec<char>) -> Vocabulary {
        let word_ids = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        let char_ids = chars
            .iter()
            .enumerate()
            .skip(3)
            .map(|(i, c)| (*c, i))
            .collect();
        Vocabulary {
            words,
            word_ids,
            chars,
            char_ids,
        }
    }

    pub fn word_id(&self, word: &str) -> usize {
        self.word_ids.get(word).copied().unwrap_or(WORD_UNK)
    }

    pub fn contains_word(&self, word: &str) -> bool {
        self.word_ids.contains_key(word)
    }

    pub fn char_id(&self, c: char) -> usize {
        self.char_ids.get(&c).copied().unwrap_or(CHAR_UNK)
    }

    /// Character ids of a word's surface, without BOS/EOS wrapping.
    pub fn char_ids(&self, word: &str) -> Vec<usize> {
        word.chars().map(|c| self.char_id(c)).collect()
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    pub fn char_count(&self) -> usize {
        self.chars.len()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Sentence, Token};
    use crate::dict::load_embeddings;

    fn corpus_of(words: &[&str]) -> Corpus {
        let mut c = Corpus::new("xx");
        c.sentences.push(Sentence::new(
            words.iter().map(|w| Token::new(*w)).collect(),
        ));
        c
    }

    #[test]
    fn frequency_order_with_cap() {
        let c = corpus_of(&["a", "a", "b"]);
        let v = Vocabulary::build(&[&c], None, 1);
        assert_eq!(v.word_count(), 2); // UNK + a
        assert_ne!(v.word_id("a"), WORD_UNK);
        assert_eq!(v.word_id("b"), WORD_UNK);
    }

    #[test]
    fn all_words_kept_under_cap() {
        let c = corpus_of(&["a", "b"]);
        let v = Vocabulary::build(&[&c], None, 10);
        assert!(v.contains_word("a"));
        assert!(v.contains_word("b"));
        // tie on frequency broken lexicographically
        assert!(v.word_id("a") < v.word_id("b"));
    }

    #[test]
    fn embedding_words_included() {
        let c = corpus_of(&["a"]);
        let table = load_embeddings("z 1.0 2.0\n").unwrap();
        let v = Vocabulary::build(&[&c], Some(&table), 10);
        assert!(v.contains_word("z"));
    }

    #[test]
    fn char_index_reserves_and_covers() {
        let c = corpus_of(&["ab", "bc"]);
        let v = Vocabulary::build(&[&c], None, 10);
        assert_eq!(v.char_count(), 3 + 3); // UNK,BOS,EOS + a,b,c
        assert!(v.char_id('a') >= 3);
        assert_eq!(v.char_id('z'), CHAR_UNK);
        assert_eq!(v.char_ids("ba"), vec![v.char_id('b'), v.char_id('a')]);
    }

    #[test]
    fn deterministic_reconstruction() {
        let c = corpus_of(&["b", "a", "b", "c", "a"]);
        let v1 = Vocabulary::build(&[&c], None, 2);
        let v2 = Vocabulary::build(&[&c], None, 2);
        assert_eq!(v1, v2);
        let v3 = Vocabulary::from_parts(v1.words.clone(), v1.chars.clone());
        assert_eq!(v1, v3);
    }
}
