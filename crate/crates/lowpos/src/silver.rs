//! Silver-standard annotation: the FREQ and AMB strategies driven by a
//! bilingual dictionary and high-resource tag statistics, plus the
//! auxiliary-task example builders.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::corpus::Corpus;
use crate::dict::{normalize_key, BilingualDictionary, MonolingualTagDictionary};
use crate::error::{Error, Result};
use crate::tags::{PosTag, TagSet};

/// Per-word attested tag counts from gold-annotated high-resource data.
#[derive(Debug, Clone, Default)]
pub struct PosStats {
    counts: BTreeMap<String, BTreeMap<PosTag, u64>>,
    total: u64,
}

impl PosStats {
    pub fn tag_counts(&self, word: &str) -> Option<&BTreeMap<PosTag, u64>> {
        self.counts.get(&normalize_key(word))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.counts.contains_key(&normalize_key(word))
    }

    /// Total number of counted (word, tag) token occurrences.
    pub fn total_count(&self) -> u64 {
        self.total
    }
}

/// Counts (word, tag) token occurrences over fully gold-tagged data.
/// Keys are normalized the same way as bilingual dictionary keys.
pub fn compute_pos_stats(high_resource: &Corpus) -> Result<PosStats> {
    let mut stats = PosStats::default();
    for (idx, sentence) in high_resource.sentences.iter().enumerate() {
        for token in &sentence.tokens {
            let tag = token.gold_tag.ok_or_else(|| {
                Error::Data(format!(
                    "sentence {idx}: token `{}` has no gold tag",
                    token.surface
                ))
            })?;
            *stats
                .counts
                .entry(normalize_key(&token.surface))
                .or_default()
                .entry(tag)
                .or_insert(0) += 1;
            stats.total += 1;
        }
    }
    Ok(stats)
}

/// Supervision attached to one silver token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Supervision {
    /// Excluded from loss and gradients.
    Masked,
    Single(PosTag),
    Ambiguous(TagSet),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SilverToken {
    pub surface: String,
    pub supervision: Supervision,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SilverMode {
    Freq,
    Amb,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SilverCorpus {
    pub sentences: Vec<Vec<SilverToken>>,
    pub mode: SilverMode,
}

impl SilverCorpus {
    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }
}

/// The FREQ rule: the tag most frequently assigned in D to any
/// translation of `w`, with counts summed across all translations and
/// ties broken by tag order. Words with no translation evidence stay
/// untagged (masked).
pub fn freq_tag(word: &str, bilingual: &BilingualDictionary, stats: &PosStats) -> Supervision {
    let Some(translations) = bilingual.translations(word) else {
        return Supervision::Masked;
    };
    let mut totals: BTreeMap<PosTag, u64> = BTreeMap::new();
    for high in translations {
        if let Some(counts) = stats.tag_counts(high) {
            for (&tag, &n) in counts {
                *totals.entry(tag).or_insert(0) += n;
            }
        }
    }
    // BTreeMap iterates in tag order, so strict > keeps the first
    // (alphabetically smallest) maximum.
    let mut best: Option<(PosTag, u64)> = None;
    for (tag, n) in totals {
        if best.map_or(true, |(_, bn)| n > bn) {
            best = Some((tag, n));
        }
    }
    match best {
        Some((tag, _)) => Supervision::Single(tag),
        None => Supervision::Masked,
    }
}

/// The AMB rule: the union of attested tags over all translations,
/// unioned with the monolingual dictionary's tags when available. Words
/// with no evidence at all receive the full inventory.
pub fn amb_tagset(
    word: &str,
    bilingual: &BilingualDictionary,
    stats: &PosStats,
    monolingual: Option<&MonolingualTagDictionary>,
) -> TagSet {
    let mut set = TagSet::EMPTY;
    if let Some(translations) = bilingual.translations(word) {
        for high in translations {
            if let Some(counts) = stats.tag_counts(high) {
                for &tag in counts.keys() {
                    set.insert(tag);
                }
            }
        }
    }
    if let Some(m) = monolingual {
        if let Some(tags) = m.tags(word) {
            set = set.union(tags);
        }
    }
    if set.is_empty() {
        TagSet::FULL
    } else {
        set
    }
}

/// Applies [`freq_tag`] per token and drops sentences whose tokens are
/// all masked.
pub fn annotate_freq(
    corpus: &Corpus,
    bilingual: &BilingualDictionary,
    stats: &PosStats,
) -> SilverCorpus {
    let mut sentences = Vec::new();
    for sentence in &corpus.sentences {
        let tokens: Vec<SilverToken> = sentence
            .tokens
            .iter()
            .map(|t| SilverToken {
                surface: t.surface.clone(),
                supervision: freq_tag(&t.surface, bilingual, stats),
            })
            .collect();
        if tokens.iter().any(|t| t.supervision != Supervision::Masked) {
            sentences.push(tokens);
        }
    }
    SilverCorpus {
        sentences,
        mode: SilverMode::Freq,
    }
}

/// Applies [`amb_tagset`] per token and drops sentences in which every
/// token received the uninformative full inventory.
pub fn annotate_amb(
    corpus: &Corpus,
    bilingual: &BilingualDictionary,
    stats: &PosStats,
    monolingual: Option<&MonolingualTagDictionary>,
) -> SilverCorpus {
    let mut sentences = Vec::new();
    for sentence in &corpus.sentences {
        let tokens: Vec<SilverToken> = sentence
            .tokens
            .iter()
            .map(|t| SilverToken {
                surface: t.surface.clone(),
                supervision: Supervision::Ambiguous(amb_tagset(
                    &t.surface,
                    bilingual,
                    stats,
                    monolingual,
                )),
            })
            .collect();
        let informative = tokens
            .iter()
            .any(|t| t.supervision != Supervision::Ambiguous(TagSet::FULL));
        if informative {
            sentences.push(tokens);
        }
    }
    SilverCorpus {
        sentences,
        mode: SilverMode::Amb,
    }
}

/// An auxiliary seq2seq training example. For word autoencoding the
/// input and target coincide.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxExample {
    pub input: String,
    pub target: String,
}

/// One `w -> w` example per distinct word, in lexicographic order.
pub fn make_autoencode_examples<I, S>(words: I) -> Vec<AuxExample>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let mut distinct: Vec<String> = words.into_iter().map(Into::into).collect();
    distinct.sort();
    distinct.dedup();
    distinct
        .into_iter()
        .map(|w| AuxExample {
            input: w.clone(),
            target: w,
        })
        .collect()
}

/// The PLA16 auxiliary label: the truncated natural log of the next
/// word's training frequency. Sentence-final positions and unseen next
/// words fall into bucket 0.
pub fn make_logfreq_labels(sentences: &Corpus, freq_source: &Corpus) -> Vec<Vec<i64>> {
    let mut freq: BTreeMap<&str, u64> = BTreeMap::new();
    for token in freq_source.tokens() {
        *freq.entry(token.surface.as_str()).or_insert(0) += 1;
    }
    sentences
        .sentences
        .iter()
        .map(|sentence| {
            (0..sentence.len())
                .map(|i| match sentence.tokens.get(i + 1) {
                    Some(next) => match freq.get(next.surface.as_str()) {
                        Some(&n) => (n as f64).ln().trunc() as i64,
                        None => 0,
                    },
                    None => 0,
                })
                .collect()
        })
        .collect()
}

/// Serializes a silver corpus: one `surface<TAB>supervision` line per
/// token, a blank line between sentences. Supervision is `MASK`, a
/// single tag, or `|`-joined tags.
pub fn serialize_silver(corpus: &SilverCorpus) -> String {
    let mut out = String::new();
    for sentence in &corpus.sentences {
        for token in sentence {
            let sup = match token.supervision {
                Supervision::Masked => "MASK".to_string(),
                Supervision::Single(tag) => tag.to_string(),
                Supervision::Ambiguous(set) => set.to_string(),
            };
            let _ = writeln!(out, "{}\t{}", token.surface, sup);
        }
        out.push('\n');
    }
    out
}

/// Parses the format written by [`serialize_silver`].
pub fn parse_silver(text: &str, mode: SilverMode) -> Result<SilverCorpus> {
    let mut sentences = Vec::new();
    let mut tokens: Vec<SilverToken> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            if !tokens.is_empty() {
                sentences.push(std::mem::take(&mut tokens));
            }
            continue;
        }
        let mut fields = line.split('\t');
        let (surface, sup_str) = match (fields.next(), fields.next(), fields.next()) {
            (Some(s), Some(t), None) => (s, t),
            _ => return Err(Error::parse(lineno, "expected exactly 2 tab-separated fields")),
        };
        let supervision = if sup_str == "MASK" {
            Supervision::Masked
        } else if sup_str.contains('|') || mode == SilverMode::Amb {
            let set: TagSet = sup_str
                .split('|')
                .map(|t| {
                    t.parse::<PosTag>()
                        .map_err(|_| Error::parse(lineno, format!("unknown tag `{t}`")))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .collect();
            Supervision::Ambiguous(set)
        } else {
            Supervision::Single(
                sup_str
                    .parse::<PosTag>()
                    .map_err(|_| Error::parse(lineno, format!("unknown tag `{sup_str}`")))?,
            )
        };
        tokens.push(SilverToken {
            surface: surface.to_string(),
            supervision,
        });
    }
    if !tokens.is_empty() {
        sentences.push(tokens);
    }
    Ok(SilverCorpus { sentences, mode })
}
