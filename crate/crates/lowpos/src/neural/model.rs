//! Forward and backward passes for the hierarchical tagger, the shared
//! character seq2seq decoder, and the auxiliary heads.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::silver::Supervision;
use crate::tags::{PosTag, NUM_TAGS};
use crate::vocab::{Vocabulary, CHAR_BOS, CHAR_EOS, CHAR_UNK};

use super::math::{add_assign, lstm_backward, lstm_forward, softmax, LstmCache};
use super::{Gradients, Hyperparams, ModelParams, LOGFREQ_BUCKETS};

/// Forward-pass mode. Train applies character dropout and word-embedding
/// noise; Eval is deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// One tagging training sentence, already mapped through the vocabulary.
#[derive(Debug, Clone)]
pub struct TaggingItem {
    pub word_ids: Vec<usize>,
    pub char_ids: Vec<Vec<usize>>,
    pub supervision: Vec<Supervision>,
}

/// One seq2seq auxiliary example (character ids, no BOS/EOS).
#[derive(Debug, Clone)]
pub struct AuxItem {
    pub input_ids: Vec<usize>,
    pub target_ids: Vec<usize>,
}

/// One log-frequency auxiliary sentence (PLA16).
#[derive(Debug, Clone)]
pub struct LogFreqItem {
    pub word_ids: Vec<usize>,
    pub char_ids: Vec<Vec<usize>>,
    pub labels: Vec<i64>,
}

/// Loss components of one joint step.
#[derive(Debug, Clone, Copy, Default)]
pub struct LossParts {
    pub tagging: f64,
    pub autoencode: f64,
    pub logfreq: f64,
}

impl LossParts {
    pub fn total(&self) -> f64 {
        self.tagging + self.autoencode + self.logfreq
    }
}

struct CharEncoding {
    /// ids actually consumed (after dropout)
    ids: Vec<usize>,
    fwd: LstmCache,
    bwd: LstmCache,
    v: Vec<f64>,
}

fn check_char_ids(params: &ModelParams, ids: &[usize]) -> Result<()> {
    if ids.is_empty() {
        return Err(Error::Data("empty character sequence".into()));
    }
    for &id in ids {
        if id >= params.char_vocab() {
            return Err(Error::Data(format!(
                "character id {id} outside vocabulary of size {}",
                params.char_vocab()
            )));
        }
    }
    Ok(())
}

fn encode_chars(
    params: &ModelParams,
    ids: &[usize],
    h: &Hyperparams,
    mode: Mode,
    rng: &mut ChaCha8Rng,
) -> CharEncoding {
    let ids: Vec<usize> = match mode {
        Mode::Train if h.char_dropout_rate > 0.0 => ids
            .iter()
            .map(|&id| {
                if rng.gen::<f64>() < h.char_dropout_rate {
                    CHAR_UNK
                } else {
                    id
                }
            })
            .collect(),
        _ => ids.to_vec(),
    };
    let hd = params.hidden_dim();
    let zeros = vec![0.0; hd];
    let fwd_inputs: Vec<Vec<f64>> = ids.iter().map(|&id| params.char_embed.row(id).to_vec()).collect();
    let bwd_inputs: Vec<Vec<f64>> = ids
        .iter()
        .rev()
        .map(|&id| params.char_embed.row(id).to_vec())
        .collect();
    let fwd = lstm_forward(&params.char_fwd, &zeros, &zeros, fwd_inputs);
    let bwd = lstm_forward(&params.char_bwd, &zeros, &zeros, bwd_inputs);
    let mut v = Vec::with_capacity(2 * hd);
    v.extend_from_slice(fwd.last_hidden());
    v.extend_from_slice(bwd.last_hidden());
    CharEncoding { ids, fwd, bwd, v }
}

/// Accumulates gradients of the char bi-LSTM and char embeddings given
/// the gradient on the concatenated final states.
fn backward_chars(params: &ModelParams, enc: &CharEncoding, d_v: &[f64], grads: &mut Gradients) {
    let hd = params.hidden_dim();
    let steps = enc.ids.len();
    let mut d_h_fwd = vec![vec![0.0; hd]; steps];
    d_h_fwd[steps - 1].copy_from_slice(&d_v[..hd]);
    let mut d_h_bwd = vec![vec![0.0; hd]; steps];
    d_h_bwd[steps - 1].copy_from_slice(&d_v[hd..]);
    let back_f = lstm_backward(&params.char_fwd, &enc.fwd, &d_h_fwd, &mut grads.char_fwd);
    let back_b = lstm_backward(&params.char_bwd, &enc.bwd, &d_h_bwd, &mut grads.char_bwd);
    for (t, d_x) in back_f.d_inputs.iter().enumerate() {
        add_assign(grads.char_embed.row_mut(enc.ids[t]), d_x);
    }
    for (t, d_x) in back_b.d_inputs.iter().enumerate() {
        add_assign(grads.char_embed.row_mut(enc.ids[steps - 1 - t]), d_x);
    }
}

/// Character-level word encoding: the concatenation of the forward and
/// backward char-LSTM final hidden states (length 2 * hidden_dim).
pub fn char_encode(
    params: &ModelParams,
    char_ids: &[usize],
    h: &Hyperparams,
    mode: Mode,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    check_char_ids(params, char_ids)?;
    Ok(encode_chars(params, char_ids, h, mode, rng).v)
}

struct SentenceEncoding {
    char_encs: Vec<CharEncoding>,
    word_ids: Vec<usize>,
    fwd: LstmCache,
    bwd: LstmCache,
    v_w: Vec<Vec<f64>>,
}

fn encode_sentence(
    params: &ModelParams,
    word_ids: &[usize],
    char_ids: &[Vec<usize>],
    h: &Hyperparams,
    mode: Mode,
    rng: &mut ChaCha8Rng,
) -> SentenceEncoding {
    let hd = params.hidden_dim();
    let n = word_ids.len();
    let char_encs: Vec<CharEncoding> = char_ids
        .iter()
        .map(|ids| encode_chars(params, ids, h, mode, rng))
        .collect();
    let mut inputs = Vec::with_capacity(n);
    for (i, &wid) in word_ids.iter().enumerate() {
        let mut x = params.word_embed.row(wid).to_vec();
        if mode == Mode::Train && h.word_noise_sigma > 0.0 {
            for v in x.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                *v += z * h.word_noise_sigma;
            }
        }
        x.extend_from_slice(&char_encs[i].v);
        inputs.push(x);
    }
    let zeros = vec![0.0; hd];
    let fwd = lstm_forward(&params.word_fwd, &zeros, &zeros, inputs.clone());
    let bwd_inputs: Vec<Vec<f64>> = inputs.iter().rev().cloned().collect();
    let bwd = lstm_forward(&params.word_bwd, &zeros, &zeros, bwd_inputs);
    let mut v_w = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = Vec::with_capacity(2 * hd);
        v.extend_from_slice(&fwd.hiddens[i]);
        v.extend_from_slice(&bwd.hiddens[n - 1 - i]);
        v_w.push(v);
    }
    SentenceEncoding {
        char_encs,
        word_ids: word_ids.to_vec(),
        fwd,
        bwd,
        v_w,
    }
}

fn backward_sentence(
    params: &ModelParams,
    enc: &SentenceEncoding,
    d_v_w: &[Vec<f64>],
    grads: &mut Gradients,
) {
    let hd = params.hidden_dim();
    let n = enc.word_ids.len();
    let wd = params.word_dim();
    let mut d_h_fwd = vec![vec![0.0; hd]; n];
    let mut d_h_bwd = vec![vec![0.0; hd]; n];
    for i in 0..n {
        d_h_fwd[i].copy_from_slice(&d_v_w[i][..hd]);
        d_h_bwd[n - 1 - i].copy_from_slice(&d_v_w[i][hd..]);
    }
    let back_f = lstm_backward(&params.word_fwd, &enc.fwd, &d_h_fwd, &mut grads.word_fwd);
    let back_b = lstm_backward(&params.word_bwd, &enc.bwd, &d_h_bwd, &mut grads.word_bwd);
    for i in 0..n {
        let mut d_x = back_f.d_inputs[i].clone();
        add_assign(&mut d_x, &back_b.d_inputs[n - 1 - i]);
        add_assign(grads.word_embed.row_mut(enc.word_ids[i]), &d_x[..wd]);
        backward_chars(params, &enc.char_encs[i], &d_x[wd..], grads);
    }
}

/// Per-token context representations for a sentence.
pub fn word_context_encode(
    params: &ModelParams,
    word_ids: &[usize],
    char_ids: &[Vec<usize>],
    h: &Hyperparams,
    mode: Mode,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec<f64>>> {
    if word_ids.is_empty() || word_ids.len() != char_ids.len() {
        return Err(Error::Data("empty or misaligned sentence".into()));
    }
    for ids in char_ids {
        check_char_ids(params, ids)?;
    }
    Ok(encode_sentence(params, word_ids, char_ids, h, mode, rng).v_w)
}

/// Softmax tag distribution for one context vector.
pub fn classify(params: &ModelParams, v_w: &[f64]) -> Vec<f64> {
    let mut logits = params.tag_w.matvec(v_w);
    add_assign(&mut logits, &params.tag_b);
    softmax(&logits)
}

struct DecoderForward {
    prev_ids: Vec<usize>,
    targets: Vec<usize>,
    cache: LstmCache,
    probs: Vec<Vec<f64>>,
}

fn decode_forward(params: &ModelParams, v_c: &[f64], target_ids: &[usize]) -> DecoderForward {
    let mut h0 = params.dec_h0_w.matvec(v_c);
    add_assign(&mut h0, &params.dec_h0_b);
    let mut c0 = params.dec_c0_w.matvec(v_c);
    add_assign(&mut c0, &params.dec_c0_b);
    // teacher forcing: inputs BOS + target, outputs target + EOS
    let mut prev_ids = Vec::with_capacity(target_ids.len() + 1);
    prev_ids.push(CHAR_BOS);
    prev_ids.extend_from_slice(target_ids);
    let mut targets = target_ids.to_vec();
    targets.push(CHAR_EOS);
    let inputs: Vec<Vec<f64>> = prev_ids
        .iter()
        .map(|&id| {
            let mut x = params.char_embed.row(id).to_vec();
            x.extend_from_slice(v_c);
            x
        })
        .collect();
    let cache = lstm_forward(&params.dec, &h0, &c0, inputs);
    let probs = cache
        .hiddens
        .iter()
        .map(|h| {
            let mut logits = params.out_w.matvec(h);
            add_assign(&mut logits, &params.out_b);
            softmax(&logits)
        })
        .collect();
    DecoderForward {
        prev_ids,
        targets,
        cache,
        probs,
    }
}

/// Teacher-forced per-step output distributions over the char
/// vocabulary: BOS + target as inputs, target + EOS as outputs.
pub fn decode_chars(
    params: &ModelParams,
    v_c: &[f64],
    target_ids: &[usize],
) -> Result<Vec<Vec<f64>>> {
    if target_ids.is_empty() {
        return Err(Error::Data("empty decoder target".into()));
    }
    check_char_ids(params, target_ids)?;
    Ok(decode_forward(params, v_c, target_ids).probs)
}

fn tagging_item_step(
    params: &ModelParams,
    item: &TaggingItem,
    h: &Hyperparams,
    mode: Mode,
    rng: &mut ChaCha8Rng,
    grads: &mut Gradients,
) -> Result<f64> {
    let enc = encode_sentence(params, &item.word_ids, &item.char_ids, h, mode, rng);
    let mut loss = 0.0;
    let mut d_v_w = vec![vec![0.0; 2 * params.hidden_dim()]; item.word_ids.len()];
    let mut any = false;
    for (i, sup) in item.supervision.iter().enumerate() {
        let mut logits = params.tag_w.matvec(&enc.v_w[i]);
        add_assign(&mut logits, &params.tag_b);
        let probs = softmax(&logits);
        let target = match sup {
            Supervision::Masked => continue,
            Supervision::Single(tag) => *tag,
            Supervision::Ambiguous(set) => super::loss::ambiguous_argmax(&probs, *set)?,
        };
        any = true;
        loss -= super::math::log_softmax_at(&logits, target.index());
        let mut d_logits = probs;
        d_logits[target.index()] -= 1.0;
        grads.tag_w.outer_add(&d_logits, &enc.v_w[i]);
        add_assign(&mut grads.tag_b, &d_logits);
        params.tag_w.matvec_t_add(&d_logits, &mut d_v_w[i]);
    }
    if any {
        backward_sentence(params, &enc, &d_v_w, grads);
    }
    Ok(loss)
}

fn aux_item_step(
    params: &ModelParams,
    item: &AuxItem,
    h: &Hyperparams,
    mode: Mode,
    rng: &mut ChaCha8Rng,
    grads: &mut Gradients,
) -> Result<f64> {
    check_char_ids(params, &item.input_ids)?;
    check_char_ids(params, &item.target_ids)?;
    let enc = encode_chars(params, &item.input_ids, h, mode, rng);
    let fwd = decode_forward(params, &enc.v, &item.target_ids);
    let mut d_v = vec![0.0; enc.v.len()];
    let loss = backward_decoder(params, &fwd, &enc.v, grads, &mut d_v);
    backward_chars(params, &enc, &d_v, grads);
    Ok(loss)
}

/// Backward through the decoder given per-step cross-entropy targets.
/// Parameter gradients land in `grads`; the gradient on v_c accumulates
/// into `d_v`. Returns the reconstruction loss.
fn backward_decoder(
    params: &ModelParams,
    fwd: &DecoderForward,
    v_c: &[f64],
    grads: &mut Gradients,
    d_v: &mut [f64],
) -> f64 {
    let hd = params.hidden_dim();
    let cd = params.char_dim();
    let steps = fwd.targets.len();
    let mut loss = 0.0;
    let mut d_hiddens = vec![vec![0.0; hd]; steps];
    for t in 0..steps {
        let probs = &fwd.probs[t];
        let y = fwd.targets[t];
        loss -= probs[y].max(1e-300).ln();
        let mut d_logits = probs.clone();
        d_logits[y] -= 1.0;
        grads.out_w.outer_add(&d_logits, &fwd.cache.hiddens[t]);
        add_assign(&mut grads.out_b, &d_logits);
        params.out_w.matvec_t_add(&d_logits, &mut d_hiddens[t]);
    }
    let back = lstm_backward(&params.dec, &fwd.cache, &d_hiddens, &mut grads.dec);
    for (t, d_x) in back.d_inputs.iter().enumerate() {
        add_assign(grads.char_embed.row_mut(fwd.prev_ids[t]), &d_x[..cd]);
        add_assign(d_v, &d_x[cd..]);
    }
    grads.dec_h0_w.outer_add(&back.d_h0, v_c);
    add_assign(&mut grads.dec_h0_b, &back.d_h0);
    params.dec_h0_w.matvec_t_add(&back.d_h0, d_v);
    grads.dec_c0_w.outer_add(&back.d_c0, v_c);
    add_assign(&mut grads.dec_c0_b, &back.d_c0);
    params.dec_c0_w.matvec_t_add(&back.d_c0, d_v);
    loss
}

fn logfreq_item_step(
    params: &ModelParams,
    item: &LogFreqItem,
    h: &Hyperparams,
    mode: Mode,
    rng: &mut ChaCha8Rng,
    grads: &mut Gradients,
) -> Result<f64> {
    let enc = encode_sentence(params, &item.word_ids, &item.char_ids, h, mode, rng);
    let mut loss = 0.0;
    let mut d_v_w = vec![vec![0.0; 2 * params.hidden_dim()]; item.word_ids.len()];
    for (i, &label) in item.labels.iter().enumerate() {
        let bucket = label.clamp(0, LOGFREQ_BUCKETS as i64 - 1) as usize;
        let mut logits = params.logfreq_w.matvec(&enc.v_w[i]);
        add_assign(&mut logits, &params.logfreq_b);
        let probs = softmax(&logits);
        loss -= super::math::log_softmax_at(&logits, bucket);
        let mut d_logits = probs;
        d_logits[bucket] -= 1.0;
        grads.logfreq_w.outer_add(&d_logits, &enc.v_w[i]);
        add_assign(&mut grads.logfreq_b, &d_logits);
        params.logfreq_w.matvec_t_add(&d_logits, &mut d_v_w[i]);
    }
    backward_sentence(params, &enc, &d_v_w, grads);
    Ok(loss)
}

/// One joint forward/backward pass over the given batches. The total
/// loss is the unweighted sum of the components; char-LSTM and char
/// embedding gradients accumulate contributions from every path.
pub fn joint_step(
    pos_batch: &[TaggingItem],
    aux_batch: &[AuxItem],
    logfreq_batch: &[LogFreqItem],
    params: &ModelParams,
    h: &Hyperparams,
    mode: Mode,
    rng: &mut ChaCha8Rng,
) -> Result<(LossParts, Gradients)> {
    let mut grads = params.zeros_like();
    let mut parts = LossParts::default();
    for item in pos_batch {
        parts.tagging += tagging_item_step(params, item, h, mode, rng, &mut grads)?;
    }
    for item in aux_batch {
        parts.autoencode += aux_item_step(params, item, h, mode, rng, &mut grads)?;
    }
    for item in logfreq_batch {
        parts.logfreq += logfreq_item_step(params, item, h, mode, rng, &mut grads)?;
    }
    Ok((parts, grads))
}

/// Greedy decoding from a character encoding; stops at EOS or
/// `max_len` characters. Returns emitted char ids (EOS excluded).
pub fn decode_greedy(params: &ModelParams, v_c: &[f64], max_len: usize) -> Vec<usize> {
    let mut h = params.dec_h0_w.matvec(v_c);
    add_assign(&mut h, &params.dec_h0_b);
    let mut c = params.dec_c0_w.matvec(v_c);
    add_assign(&mut c, &params.dec_c0_b);
    let mut prev = CHAR_BOS;
    let mut out = Vec::new();
    for _ in 0..max_len {
        let mut x = params.char_embed.row(prev).to_vec();
        x.extend_from_slice(v_c);
        let cache = lstm_forward(&params.dec, &h, &c, vec![x]);
        h = cache.hiddens[0].clone();
        c = cache.last_cell().to_vec();
        let mut logits = params.out_w.matvec(&h);
        add_assign(&mut logits, &params.out_b);
        let next = argmax(&logits);
        if next == CHAR_EOS {
            break;
        }
        out.push(next);
        prev = next;
    }
    out
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Argmax tag per token in eval mode (no dropout or noise). Ties break
/// by tag order.
pub fn predict_tags(
    params: &ModelParams,
    h: &Hyperparams,
    vocab: &Vocabulary,
    surfaces: &[String],
) -> Result<Vec<PosTag>> {
    let word_ids: Vec<usize> = surfaces.iter().map(|w| vocab.word_id(w)).collect();
    let char_ids: Vec<Vec<usize>> = surfaces.iter().map(|w| vocab.char_ids(w)).collect();
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let v_w = word_context_encode(params, &word_ids, &char_ids, h, Mode::Eval, &mut rng)?;
    Ok(v_w
        .iter()
        .map(|v| {
            let dist = classify(params, v);
            let mut best = PosTag::ALL[0];
            for tag in PosTag::ALL {
                if dist[tag.index()] > dist[best.index()] {
                    best = tag;
                }
            }
            debug_assert_eq!(dist.len(), NUM_TAGS);
            best
        })
        .collect())
}
