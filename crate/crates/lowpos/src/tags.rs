//! The 17-tag Universal Dependencies POS inventory and sets over it.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// One of the 17 Universal Dependencies POS categories.
///
/// Variants are declared in alphabetical order, and the derived `Ord`
/// is the canonical tie-breaking order used everywhere in the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[allow(clippy::upper_case_acronyms)]
pub enum PosTag {
    ADJ,
    ADP,
    ADV,
    AUX,
    CCONJ,
    DET,
    INTJ,
    NOUN,
    NUM,
    PART,
    PRON,
    PROPN,
    PUNCT,
    SCONJ,
    SYM,
    VERB,
    X,
}

/// Number of POS categories.
pub const NUM_TAGS: usize = 17;

impl PosTag {
    /// All tags in canonical (alphabetical) order.
    pub const ALL: [PosTag; NUM_TAGS] = [
        PosTag::ADJ,
        PosTag::ADP,
        PosTag::ADV,
        PosTag::AUX,
        PosTag::CCONJ,
        PosTag::DET,
        PosTag::INTJ,
        PosTag::NOUN,
        PosTag::NUM,
        PosTag::PART,
        PosTag::PRON,
        PosTag::PROPN,
        PosTag::PUNCT,
        PosTag::SCONJ,
        PosTag::SYM,
        PosTag::VERB,
        PosTag::X,
    ];

    /// Index of this tag in [`PosTag::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }

    /// Tag at a given index in [`PosTag::ALL`].
    pub fn from_index(idx: usize) -> Option<PosTag> {
        PosTag::ALL.get(idx).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PosTag::ADJ => "ADJ",
            PosTag::ADP => "ADP",
            PosTag::ADV => "ADV",
            PosTag::AUX => "AUX",
            PosTag::CCONJ => "CCONJ",
            PosTag::DET => "DET",
            PosTag::INTJ => "INTJ",
            PosTag::NOUN => "NOUN",
            PosTag::NUM => "NUM",
            PosTag::PART => "PART",
            PosTag::PRON => "PRON",
            PosTag::PROPN => "PROPN",
            PosTag::PUNCT => "PUNCT",
            PosTag::SCONJ => "SCONJ",
            PosTag::SYM => "SYM",
            PosTag::VERB => "VERB",
            PosTag::X => "X",
        }
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PosTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        for tag in PosTag::ALL {
            if tag.as_str() == s {
                return Ok(tag);
            }
        }
        Err(Error::UnknownTag(s.to_string()))
    }
}

/// Maps a Petrov-style universal tag (or a plain UD tag) onto the UD
/// inventory. `CONJ` becomes `CCONJ` and `.` becomes `PUNCT`; tags that
/// already exist in UD map to themselves.
pub fn map_legacy_tag(tag_string: &str) -> Result<PosTag, Error> {
    match tag_string {
        "CONJ" => Ok(PosTag::CCONJ),
        "." => Ok(PosTag::PUNCT),
        other => other.parse(),
    }
}

/// A set of POS tags, stored as a 17-bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct TagSet(u32);

impl TagSet {
    pub const EMPTY: TagSet = TagSet(0);
    /// The full 17-tag inventory.
    pub const FULL: TagSet = TagSet((1 << NUM_TAGS) - 1);

    pub fn singleton(tag: PosTag) -> TagSet {
        TagSet(1 << tag.index())
    }

    pub fn insert(&mut self, tag: PosTag) {
        self.0 |= 1 << tag.index();
    }

    pub fn contains(self, tag: PosTag) -> bool {
        self.0 & (1 << tag.index()) != 0
    }

    pub fn union(self, other: TagSet) -> TagSet {
        TagSet(self.0 | other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Tags in canonical order.
    pub fn iter(self) -> impl Iterator<Item = PosTag> {
        PosTag::ALL.into_iter().filter(move |t| self.contains(*t))
    }
}

impl FromIterator<PosTag> for TagSet {
    fn from_iter<I: IntoIterator<Item = PosTag>>(iter: I) -> TagSet {
        let mut set = TagSet::EMPTY;
        for tag in iter {
            set.insert(tag);
        }
        set
    }
}

impl fmt::Display for TagSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for tag in self.iter() {
            if !first {
                f.write_str("|")?;
            }
            first = false;
            f.write_str(tag.as_str())?;
        }
        Ok(())
    }
}
