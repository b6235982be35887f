//! Loss functions over already-computed distributions. Training uses a
//! fused softmax/cross-entropy path; these definitions are the contract
//! both paths must satisfy.

use crate::error::{Error, Result};
use crate::silver::Supervision;
use crate::tags::{PosTag, TagSet};

/// Sum of -ln p(tag) over non-masked positions. Masked positions
/// contribute exactly zero. Errors when every position is masked (such
/// sentences must have been discarded upstream).
pub fn loss_tagging_masked(distributions: &[Vec<f64>], silver: &[Supervision]) -> Result<f64> {
    debug_assert_eq!(distributions.len(), silver.len());
    let mut loss = 0.0;
    let mut supervised = 0;
    for (dist, sup) in distributions.iter().zip(silver) {
        match sup {
            Supervision::Masked => {}
            Supervision::Single(tag) => {
                supervised += 1;
                loss -= dist[tag.index()].ln();
            }
            Supervision::Ambiguous(_) => {
                return Err(Error::Data(
                    "ambiguous supervision passed to the masked tagging loss".into(),
                ))
            }
        }
    }
    if supervised == 0 {
        return Err(Error::Data(
            "all positions masked; sentence should have been discarded".into(),
        ));
    }
    Ok(loss)
}

/// Picks the in-set tag with the highest model probability (ties broken
/// by tag order) and returns its index.
pub fn ambiguous_argmax(dist: &[f64], set: TagSet) -> Result<PosTag> {
    if set.is_empty() {
        return Err(Error::Data("empty ambiguous tag set".into()));
    }
    let mut best: Option<(PosTag, f64)> = None;
    for tag in set.iter() {
        let p = dist[tag.index()];
        if best.map_or(true, |(_, bp)| p > bp) {
            best = Some((tag, p));
        }
    }
    Ok(best.unwrap().0)
}

/// Per position, -ln of the maximum in-set probability, summed.
pub fn loss_tagging_ambiguous(distributions: &[Vec<f64>], sets: &[TagSet]) -> Result<f64> {
    debug_assert_eq!(distributions.len(), sets.len());
    let mut loss = 0.0;
    for (dist, &set) in distributions.iter().zip(sets) {
        let tag = ambiguous_argmax(dist, set)?;
        loss -= dist[tag.index()].ln();
    }
    Ok(loss)
}

/// Teacher-forced reconstruction loss: sum of per-step -ln p(y_t) over
/// the target characters plus EOS.
pub fn loss_autoencode(step_distributions: &[Vec<f64>], target_with_eos: &[usize]) -> f64 {
    debug_assert_eq!(step_distributions.len(), target_with_eos.len());
    step_distributions
        .iter()
        .zip(target_with_eos)
        .map(|(dist, &y)| -dist[y].ln())
        .sum()
}
