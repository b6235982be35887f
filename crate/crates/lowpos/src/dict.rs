//! Dictionary and embedding resources: the bilingual dictionary B, the
//! monolingual tag dictionary M, and pretrained word embeddings.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::tags::{map_legacy_tag, PosTag, TagSet};

/// Lookup-key normalization shared by all dictionary-backed resources:
/// Unicode default lowercasing. Corpus surfaces are left untouched.
pub fn normalize_key(word: &str) -> String {
    word.to_lowercase()
}

/// Word-to-word translations from the low-resource language into the
/// high-resource language.
#[derive(Debug, Clone, Default)]
pub struct BilingualDictionary {
    entries: BTreeMap<String, BTreeSet<String>>,
}

impl BilingualDictionary {
    pub fn new() -> BilingualDictionary {
        BilingualDictionary::default()
    }

    pub fn insert(&mut self, low: &str, high: &str) {
        self.entries
            .entry(normalize_key(low))
            .or_default()
            .insert(normalize_key(high));
    }

    /// Translations of a low-resource word, or `None` when absent.
    pub fn translations(&self, low: &str) -> Option<&BTreeSet<String>> {
        self.entries.get(&normalize_key(low))
    }

    pub fn contains(&self, low: &str) -> bool {
        self.entries.contains_key(&normalize_key(low))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &BTreeSet<String>)> {
        self.entries.iter()
    }
}

/// Tag scheme of a monolingual dictionary file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DictScheme {
    /// UD tags, with the CONJ/"." legacy mapping applied.
    Ud,
    /// Unimorph coarse tags: N, V, ADJ, ADV.
    Unimorph,
}

impl std::str::FromStr for DictScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<DictScheme> {
        match s {
            "ud" => Ok(DictScheme::Ud),
            "unimorph" => Ok(DictScheme::Unimorph),
            other => Err(Error::Config(format!("unknown dictionary scheme `{other}`"))),
        }
    }
}

/// Word form -> set of possible POS tags in the low-resource language.
#[derive(Debug, Clone, Default)]
pub struct MonolingualTagDictionary {
    entries: BTreeMap<String, TagSet>,
}

impl MonolingualTagDictionary {
    pub fn new() -> MonolingualTagDictionary {
        MonolingualTagDictionary::default()
    }

    pub fn insert(&mut self, word: &str, tag: PosTag) {
        self.entries
            .entry(normalize_key(word))
            .or_insert(TagSet::EMPTY)
            .insert(tag);
    }

    pub fn tags(&self, word: &str) -> Option<TagSet> {
        self.entries.get(&normalize_key(word)).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(&normalize_key(word))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, TagSet)> {
        self.entries.iter().map(|(w, t)| (w, *t))
    }
}

/// Pretrained word embeddings loaded from a text file.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    pub dimension: usize,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.vectors.get(word).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &String> {
        self.vectors.keys()
    }
}

fn is_comment_or_blank(line: &str) -> bool {
    line.is_empty() || line.starts_with('#')
}

/// Loads a 2-column TSV `low_resource_word<TAB>high_resource_word`.
/// Duplicate pairs collapse; translation sets stay non-empty by
/// construction.
pub fn load_bilingual_dictionary(text: &str) -> Result<BilingualDictionary> {
    let mut dict = BilingualDictionary::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if is_comment_or_blank(line) {
            continue;
        }
        let mut fields = line.split('\t');
        match (fields.next(), fields.next(), fields.next()) {
            (Some(low), Some(high), None) if !low.is_empty() && !high.is_empty() => {
                dict.insert(low, high);
            }
            _ => {
                return Err(Error::parse(
                    idx + 1,
                    "expected exactly 2 tab-separated fields",
                ))
            }
        }
    }
    Ok(dict)
}

fn convert_unimorph_tag(tag: &str) -> Option<PosTag> {
    match tag {
        "N" => Some(PosTag::NOUN),
        "V" => Some(PosTag::VERB),
        "ADJ" => Some(PosTag::ADJ),
        "ADV" => Some(PosTag::ADV),
        _ => None,
    }
}

/// Loads a 2-column TSV `word<TAB>tag`, converting tags according to the
/// declared scheme. Multiple lines for one word union into one tag set.
pub fn load_monolingual_dictionary(text: &str, scheme: DictScheme) -> Result<MonolingualTagDictionary> {
    let mut dict = MonolingualTagDictionary::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim_end_matches('\r');
        if is_comment_or_blank(line) {
            continue;
        }
        let mut fields = line.split('\t');
        let (word, tag_str) = match (fields.next(), fields.next(), fields.next()) {
            (Some(w), Some(t), None) if !w.is_empty() && !t.is_empty() => (w, t),
            _ => {
                return Err(Error::parse(lineno, "expected exactly 2 tab-separated fields"));
            }
        };
        let tag = match scheme {
            DictScheme::Unimorph => convert_unimorph_tag(tag_str).ok_or_else(|| {
                Error::parse(lineno, format!("unknown Unimorph tag `{tag_str}`"))
            })?,
            DictScheme::Ud => map_legacy_tag(tag_str).map_err(|_| {
                Error::parse(lineno, format!("unknown UD tag `{tag_str}`"))
            })?,
        };
        dict.insert(word, tag);
    }
    Ok(dict)
}

/// Loads space-separated text embeddings: `word v1 v2 ... vd`. The first
/// line fixes the dimension; later duplicates of a word overwrite
/// earlier rows.
pub fn load_embeddings(text: &str) -> Result<EmbeddingTable> {
    let mut vectors: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut dimension: Option<usize> = None;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let word = fields
            .next()
            .ok_or_else(|| Error::parse(lineno, "missing word field"))?;
        let values: Vec<f64> = fields
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::parse(lineno, format!("unparseable value `{v}`")))
            })
            .collect::<Result<_>>()?;
        match dimension {
            None => {
                if values.is_empty() {
                    return Err(Error::parse(lineno, "embedding row has no values"));
                }
                dimension = Some(values.len());
            }
            Some(d) if d != values.len() => {
                return Err(Error::Dimension(format!(
                    "line {lineno}: expected {d} values, found {}",
                    values.len()
                )));
            }
            Some(_) => {}
        }
        vectors.insert(word.to_string(), values);
    }
    let dimension = dimension.ok_or_else(|| {
        Error::Data("embedding file is empty; dimension undeterminable".to_string())
    })?;
    Ok(EmbeddingTable { dimension, vectors })
}
