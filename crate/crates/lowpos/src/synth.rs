//! Generated toy language pair for controlled cross-lingual
//! experiments: a shared tag grammar, a deterministic word-for-word
//! translation dictionary with controlled ambiguity, a gold-tagged
//! high-resource corpus, raw low-resource training text, and a gold
//! low-resource test set.

use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Sentence, Token};
use crate::dict::BilingualDictionary;
use crate::tags::{PosTag, NUM_TAGS};

/// Word types generated per tag.
const TYPES_PER_TAG: usize = 20;
/// Every 10th type also translates into a word of the next tag,
/// giving AMB sets of size 2 and occasionally misleading FREQ.
const AMBIGUITY_STRIDE: usize = 10;

/// Everything the synthetic experiment consumes.
#[derive(Debug, Clone)]
pub struct SyntheticData {
    /// Gold-tagged high-resource corpus (the tag-statistics source).
    pub high_corpus: Corpus,
    /// Low-resource -> high-resource translation dictionary.
    pub bilingual: BilingualDictionary,
    /// Untagged low-resource training sentences.
    pub train_raw: Corpus,
    /// Gold-tagged low-resource test sentences.
    pub gold_test: Corpus,
}

fn stem(j: usize) -> String {
    // CV syllables keyed by the type index, so forms stay pronounceable
    // and distinct
    const CONS: &[u8] = b"bdfgklmnprst";
    const VOWS: &[u8] = b"aeiou";
    let c1 = CONS[j % CONS.len()] as char;
    let v1 = VOWS[(j / CONS.len()) % VOWS.len()] as char;
    let c2 = CONS[(j / 7 + 3) % CONS.len()] as char;
    format!("{c1}{v1}{c2}")
}

/// High-resource surface form for type `j` of a tag. The lowercase tag
/// name is the suffix, so character structure predicts the tag.
pub fn high_word(tag: PosTag, j: usize) -> String {
    format!("{}{}", stem(j), tag.as_str().to_lowercase())
}

/// Low-resource counterpart: a fixed prefix over the same form.
pub fn low_word(tag: PosTag, j: usize) -> String {
    format!("zu{}", high_word(tag, j))
}

fn tag_weights() -> [f64; NUM_TAGS] {
    let mut w = [1.0; NUM_TAGS];
    w[PosTag::NOUN.index()] = 8.0;
    w[PosTag::VERB.index()] = 6.0;
    w[PosTag::DET.index()] = 4.0;
    w[PosTag::ADJ.index()] = 3.0;
    w[PosTag::ADP.index()] = 3.0;
    w[PosTag::PRON.index()] = 2.0;
    w
}

/// A first-order tag bigram: each tag boosts one successor on top of
/// the global weights, so context carries signal too.
fn next_tag(rng: &mut ChaCha8Rng, current: Option<PosTag>) -> PosTag {
    let mut w = tag_weights();
    if let Some(cur) = current {
        let favored = PosTag::ALL[(cur.index() + 5) % NUM_TAGS];
        w[favored.index()] *= 4.0;
    }
    let dist = WeightedIndex::new(w).expect("positive weights");
    PosTag::ALL[dist.sample(rng)]
}

fn sample_type(rng: &mut ChaCha8Rng) -> usize {
    // Zipf-ish emission over the tag's types
    let weights: Vec<f64> = (0..TYPES_PER_TAG).map(|j| 1.0 / (j + 1) as f64).collect();
    WeightedIndex::new(weights).expect("positive weights").sample(rng)
}

fn generate_sentence(rng: &mut ChaCha8Rng) -> Vec<(PosTag, usize)> {
    let len = rng.gen_range(3..=12);
    let mut tags = Vec::with_capacity(len);
    let mut current = None;
    for _ in 0..len {
        let tag = next_tag(rng, current);
        tags.push((tag, sample_type(rng)));
        current = Some(tag);
    }
    tags
}

fn is_ambiguous(tag: PosTag, j: usize) -> bool {
    (tag.index() * TYPES_PER_TAG + j) % AMBIGUITY_STRIDE == 0
}

/// Generates the full paired dataset deterministically from the seed.
pub fn generate(seed: u64, train_sentences: usize, test_sentences: usize) -> SyntheticData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut bilingual = BilingualDictionary::new();
    for tag in PosTag::ALL {
        for j in 0..TYPES_PER_TAG {
            bilingual.insert(&low_word(tag, j), &high_word(tag, j));
            if is_ambiguous(tag, j) {
                let other = PosTag::ALL[(tag.index() + 1) % NUM_TAGS];
                bilingual.insert(&low_word(tag, j), &high_word(other, j));
            }
        }
    }

    let mut high_corpus = Corpus::new("hi");
    for _ in 0..train_sentences.max(1_000) {
        let tokens = generate_sentence(&mut rng)
            .into_iter()
            .map(|(tag, j)| Token::tagged(high_word(tag, j), tag))
            .collect();
        high_corpus.sentences.push(Sentence::new(tokens));
    }

    let mut train_raw = Corpus::new("lo");
    for _ in 0..train_sentences {
        let tokens = generate_sentence(&mut rng)
            .into_iter()
            .map(|(tag, j)| Token::new(low_word(tag, j)))
            .collect();
        train_raw.sentences.push(Sentence::new(tokens));
    }

    let mut gold_test = Corpus::new("lo");
    for _ in 0..test_sentences {
        let tokens = generate_sentence(&mut rng)
            .into_iter()
            .map(|(tag, j)| Token::tagged(low_word(tag, j), tag))
            .collect();
        gold_test.sentences.push(Sentence::new(tokens));
    }

    SyntheticData {
        high_corpus,
        bilingual,
        train_raw,
        gold_test,
    }
}

/// Majority gold tag and its token share, i.e. the accuracy of the
/// constant-tag baseline on this corpus.
pub fn majority_tag(gold: &Corpus) -> (PosTag, f64) {
    let mut counts = [0usize; NUM_TAGS];
    let mut total = 0usize;
    for token in gold.tokens() {
        if let Some(tag) = token.gold_tag {
            counts[tag.index()] += 1;
            total += 1;
        }
    }
    let mut best = PosTag::ALL[0];
    for tag in PosTag::ALL {
        if counts[tag.index()] > counts[best.index()] {
            best = tag;
        }
    }
    let share = if total == 0 {
        0.0
    } else {
        counts[best.index()] as f64 / total as f64
    };
    (best, share)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::silver::{amb_tagset, compute_pos_stats, freq_tag};

    #[test]
    fn generation_is_deterministic() {
        let a = generate(7, 50, 10);
        let b = generate(7, 50, 10);
        assert_eq!(a.train_raw.sentences, b.train_raw.sentences);
        assert_eq!(a.gold_test.sentences, b.gold_test.sentences);
        assert_eq!(a.high_corpus.sentences, b.high_corpus.sentences);
        let c = generate(8, 50, 10);
        assert_ne!(a.train_raw.sentences, c.train_raw.sentences);
    }

    #[test]
    fn sizes_and_lengths() {
        let d = generate(7, 40, 9);
        assert_eq!(d.train_raw.sentence_count(), 40);
        assert_eq!(d.gold_test.sentence_count(), 9);
        assert!(d.high_corpus.sentence_count() >= 1_000);
        for s in &d.train_raw.sentences {
            assert!((3..=12).contains(&s.len()));
        }
    }

    #[test]
    fn every_low_word_translates() {
        let d = generate(7, 30, 5);
        for token in d.train_raw.tokens().chain(d.gold_test.tokens()) {
            assert!(
                d.bilingual.contains(&token.surface),
                "untranslatable {}",
                token.surface
            );
        }
    }

    #[test]
    fn amb_sets_small_and_contain_truth() {
        let d = generate(7, 30, 5);
        let stats = compute_pos_stats(&d.high_corpus).unwrap();
        for token in d.gold_test.tokens() {
            let set = amb_tagset(&token.surface, &d.bilingual, &stats, None);
            assert!(set.len() <= 2, "{}: {set}", token.surface);
            assert!(
                set.contains(token.gold_tag.unwrap()),
                "{}: {set}",
                token.surface
            );
        }
    }

    #[test]
    fn freq_tags_mostly_correct() {
        let d = generate(7, 200, 20);
        let stats = compute_pos_stats(&d.high_corpus).unwrap();
        let mut total = 0;
        let mut correct = 0;
        for token in d.gold_test.tokens() {
            if let crate::silver::Supervision::Single(tag) =
                freq_tag(&token.surface, &d.bilingual, &stats)
            {
                total += 1;
                if tag == token.gold_tag.unwrap() {
                    correct += 1;
                }
            }
        }
        assert!(total > 0);
        let acc = correct as f64 / total as f64;
        assert!(acc > 0.85, "silver FREQ accuracy only {acc}");
    }

    #[test]
    fn majority_matches_hand_count() {
        let mut c = Corpus::new("xx");
        c.sentences.push(Sentence::new(vec![
            Token::tagged("a", PosTag::NOUN),
            Token::tagged("b", PosTag::NOUN),
            Token::tagged("c", PosTag::NOUN),
            Token::tagged("d", PosTag::VERB),
        ]));
        let (tag, share) = majority_tag(&c);
        assert_eq!(tag, PosTag::NOUN);
        assert!((share - 0.75).abs() < 1e-12);
        // the generator's marginals are NOUN-heavy but far from dominant
        let d = generate(7, 200, 50);
        let (tag, share) = majority_tag(&d.gold_test);
        assert_eq!(tag, PosTag::NOUN);
        assert!(share > 0.10 && share < 0.50, "share {share}");
    }
}
