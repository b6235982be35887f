//! Reference systems: a multinomial mixture word-clustering baseline
//! with dictionary-based cluster labeling, and a fixed-tag majority
//! baseline.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::Corpus;
use crate::dict::MonolingualTagDictionary;
use crate::error::{Error, Result};
use crate::tags::PosTag;

/// Context/shape count features per word type.
#[derive(Debug, Clone)]
pub struct TypeFeatures {
    /// Word types in lexicographic order.
    pub types: Vec<String>,
    /// One count vector per type: left-neighbor counts over the F most
    /// frequent words, right-neighbor counts, then 3 shape features.
    pub features: Vec<Vec<f64>>,
    pub feature_dim: usize,
}

impl TypeFeatures {
    pub fn type_index(&self, word: &str) -> Option<usize> {
        self.types.binary_search_by(|t| t.as_str().cmp(word)).ok()
    }
}

fn has_digit(word: &str) -> bool {
    word.chars().any(|c| c.is_ascii_digit())
}

fn has_punct(word: &str) -> bool {
    word.chars().any(|c| !c.is_alphanumeric() && !c.is_whitespace())
}

fn is_capitalized(word: &str) -> bool {
    word.chars().next().map_or(false, char::is_uppercase)
}

/// Builds per-type feature vectors from neighbor counts restricted to
/// the `top_f` most frequent words (frequency then lexicographic order)
/// plus has-digit, has-punct, and is-capitalized flags.
pub fn extract_type_features(corpus: &Corpus, top_f: usize) -> TypeFeatures {
    let mut freq: BTreeMap<&str, usize> = BTreeMap::new();
    for token in corpus.tokens() {
        *freq.entry(token.surface.as_str()).or_insert(0) += 1;
    }
    let mut types: Vec<String> = freq.keys().map(|s| s.to_string()).collect();
    types.sort();

    let mut by_freq: Vec<(&str, usize)> = freq.iter().map(|(w, n)| (*w, *n)).collect();
    by_freq.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    by_freq.truncate(top_f);
    let frequent: BTreeMap<&str, usize> = by_freq
        .iter()
        .enumerate()
        .map(|(i, (w, _))| (*w, i))
        .collect();

    let f = frequent.len();
    let feature_dim = 2 * f + 3;
    let mut features = vec![vec![0.0; feature_dim]; types.len()];
    let index: BTreeMap<&str, usize> = types
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();
    for sentence in &corpus.sentences {
        for (i, token) in sentence.tokens.iter().enumerate() {
            let ti = index[token.surface.as_str()];
            if i > 0 {
                if let Some(&fi) = frequent.get(sentence.tokens[i - 1].surface.as_str()) {
                    features[ti][fi] += 1.0;
                }
            }
            if i + 1 < sentence.tokens.len() {
                if let Some(&fi) = frequent.get(sentence.tokens[i + 1].surface.as_str()) {
                    features[ti][f + fi] += 1.0;
                }
            }
        }
    }
    for (ti, word) in types.iter().enumerate() {
        features[ti][2 * f] = has_digit(word) as u64 as f64;
        features[ti][2 * f + 1] = has_punct(word) as u64 as f64;
        features[ti][2 * f + 2] = is_capitalized(word) as u64 as f64;
    }
    TypeFeatures {
        types,
        features,
        feature_dim,
    }
}

/// A fitted multinomial mixture over word types.
#[derive(Debug, Clone)]
pub struct MixtureModel {
    pub k: usize,
    /// Cluster priors (simplex).
    pub priors: Vec<f64>,
    /// Per-cluster multinomial over features (each a simplex).
    pub multinomials: Vec<Vec<f64>>,
    /// Word type -> cluster id.
    pub assignment: BTreeMap<String, usize>,
    /// EM objective (data log-likelihood plus Dirichlet smoothing
    /// terms) after each iteration; non-decreasing.
    pub log_likelihoods: Vec<f64>,
}

const DIRICHLET_ALPHA: f64 = 0.1;

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// EM with add-alpha Dirichlet smoothing on priors and multinomials.
/// Deterministic given the seed.
pub fn fit_mixture(
    features: &TypeFeatures,
    k: usize,
    iterations: usize,
    seed: u64,
) -> Result<MixtureModel> {
    let n = features.types.len();
    let dim = features.feature_dim;
    if k < 2 {
        return Err(Error::Config("cluster count must be at least 2".into()));
    }
    if n < k {
        return Err(Error::Data(format!("{n} word types but K={k} clusters")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // initialize from random soft assignments
    let mut resp: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            raw.into_iter().map(|r| r / sum).collect()
        })
        .collect();

    let mut priors = vec![0.0; k];
    let mut multinomials = vec![vec![0.0; dim]; k];
    let m_step = |resp: &[Vec<f64>], priors: &mut Vec<f64>, multinomials: &mut Vec<Vec<f64>>| {
        for c in 0..k {
            let mass: f64 = resp.iter().map(|r| r[c]).sum();
            priors[c] = (mass + DIRICHLET_ALPHA) / (n as f64 + k as f64 * DIRICHLET_ALPHA);
            let mut counts = vec![0.0; dim];
            for (x, r) in features.features.iter().zip(resp) {
                let w = r[c];
                if w > 0.0 {
                    for (acc, v) in counts.iter_mut().zip(x) {
                        *acc += w * v;
                    }
                }
            }
            let total: f64 = counts.iter().sum::<f64>() + dim as f64 * DIRICHLET_ALPHA;
            for (m, cnt) in multinomials[c].iter_mut().zip(&counts) {
                *m = (cnt + DIRICHLET_ALPHA) / total;
            }
        }
    };
    m_step(&resp, &mut priors, &mut multinomials);

    let mut log_likelihoods = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        // E-step and objective under current parameters
        let log_priors: Vec<f64> = priors.iter().map(|p| p.ln()).collect();
        let log_thetas: Vec<Vec<f64>> = multinomials
            .iter()
            .map(|m| m.iter().map(|t| t.ln()).collect())
            .collect();
        let mut data_ll = 0.0;
        for (x, r) in features.features.iter().zip(resp.iter_mut()) {
            let mut scores = vec![0.0; k];
            for c in 0..k {
                let mut s = log_priors[c];
                for (v, lt) in x.iter().zip(&log_thetas[c]) {
                    if *v != 0.0 {
                        s += v * lt;
                    }
                }
                scores[c] = s;
            }
            let lse = log_sum_exp(&scores);
            data_ll += lse;
            for c in 0..k {
                r[c] = (scores[c] - lse).exp();
            }
        }
        let prior_term: f64 = DIRICHLET_ALPHA
            * (log_priors.iter().sum::<f64>()
                + log_thetas.iter().flat_map(|m| m.iter()).sum::<f64>());
        log_likelihoods.push(data_ll + prior_term);

        m_step(&resp, &mut priors, &mut multinomials);
    }

    let mut assignment = BTreeMap::new();
    for (ti, r) in resp.iter().enumerate() {
        let mut best = 0;
        for c in 1..k {
            if r[c] > r[best] {
                best = c;
            }
        }
        assignment.insert(features.types[ti].clone(), best);
    }
    Ok(MixtureModel {
        k,
        priors,
        multinomials,
        assignment,
        log_likelihoods,
    })
}

/// Cluster id -> POS tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterTagMap {
    pub tags: Vec<PosTag>,
}

/// Labels each cluster with the tag most frequently associated with its
/// token occurrences through the monolingual dictionary (each
/// dictionary tag of a token contributes one count). Ties break by tag
/// order; clusters without dictionary evidence fall back to NOUN.
pub fn map_clusters_to_tags(
    model: &MixtureModel,
    corpus: &Corpus,
    dictionary: &MonolingualTagDictionary,
) -> ClusterTagMap {
    let mut counts: Vec<BTreeMap<PosTag, u64>> = vec![BTreeMap::new(); model.k];
    for token in corpus.tokens() {
        let Some(&cluster) = model.assignment.get(&token.surface) else {
            continue;
        };
        if let Some(tags) = dictionary.tags(&token.surface) {
            for tag in tags.iter() {
                *counts[cluster].entry(tag).or_insert(0) += 1;
            }
        }
    }
    let tags = counts
        .iter()
        .map(|per_tag| {
            let mut best: Option<(PosTag, u64)> = None;
            for (&tag, &n) in per_tag {
                if best.map_or(true, |(_, bn)| n > bn) {
                    best = Some((tag, n));
                }
            }
            best.map(|(t, _)| t).unwrap_or(PosTag::NOUN)
        })
        .collect();
    ClusterTagMap { tags }
}

/// Type-level cluster tagger: every token of a type receives its
/// cluster's mapped tag; unclustered types fall back to NOUN.
#[derive(Debug, Clone)]
pub struct ClusterTagger {
    pub model: MixtureModel,
    pub map: ClusterTagMap,
}

impl ClusterTagger {
    pub fn tag_word(&self, word: &str) -> PosTag {
        match self.model.assignment.get(word) {
            Some(&c) => self.map.tags[c],
            None => PosTag::NOUN,
        }
    }
}

/// Assigns one fixed tag to every token (diagnostic lower bound).
#[derive(Debug, Clone, Copy)]
pub struct MajorityBaseline {
    pub tag: PosTag,
}

impl Default for MajorityBaseline {
    fn default() -> MajorityBaseline {
        MajorityBaseline { tag: PosTag::NOUN }
    }
}

/// TSV dump `word<TAB>cluster_id<TAB>mapped_tag`.
pub fn dump_cluster_assignment(tagger: &ClusterTagger) -> String {
    let mut out = String::new();
    for (word, &cluster) in &tagger.model.assignment {
        let _ = writeln!(out, "{word}\t{cluster}\t{}", tagger.map.tags[cluster]);
    }
    out
}
